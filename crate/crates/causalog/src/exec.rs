//! Parallel evaluation of satisfiability branches.

use std::sync::atomic::{AtomicUsize, Ordering};

use causalog_core::sat::{BranchOutcome, BranchResult, Executor};
use rayon::prelude::*;

/// Runs branches on a thread pool. Branches after the lowest satisfiable
/// index found so far are skipped, and the results are cut after that
/// index, so the verdict matches sequential evaluation.
pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        Ok(Parallel { pool: rayon::ThreadPoolBuilder::new().num_threads(threads).build()? })
    }
}

impl Executor for Parallel {
    fn run(
        &self,
        n: usize,
        f: &(dyn Fn(usize) -> causalog_core::Result<BranchResult> + Sync),
    ) -> Vec<causalog_core::Result<BranchResult>> {
        let best = AtomicUsize::new(usize::MAX);
        let mut out: Vec<Option<causalog_core::Result<BranchResult>>> = self.pool.install(|| {
            (0..n)
                .into_par_iter()
                .map(|i| {
                    if i > best.load(Ordering::Relaxed) {
                        return None;
                    }
                    let r = f(i);
                    if matches!(&r, Ok(b) if matches!(b.outcome, BranchOutcome::Sat(_))) {
                        best.fetch_min(i, Ordering::Relaxed);
                    }
                    Some(r)
                })
                .collect()
        });
        let cut = best.load(Ordering::Relaxed);
        if cut != usize::MAX {
            out.truncate(cut + 1);
        }
        out.into_iter().map(|r| r.expect("branches up to the first satisfiable one all ran")).collect()
    }
}
