//! Exact decision of linear systems by a rational two-phase simplex with
//! Bland's rule.
//!
//! Strict rows share one slack `t ∈ [0, 1]` that is maximized: the system
//! is satisfiable iff the optimum is positive. Disequalities split into two
//! strict branches. Unknowns carrying a bare `x ≥ 0` constraint become
//! sign-restricted columns instead of rows, so a returned witness is a basic
//! solution whose support is bounded by the number of remaining rows.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::{Constraint, PolySystem, Rel};
use crate::num::Rat;
use crate::{Error, Result};

/// Outcome of an exact linear decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearVerdict {
    Sat(Vec<Rat>),
    Unsat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RowKind {
    Eq,
    Ge,
}

/// `Σ a_j x_j (= | ≥) rhs` over nonnegative LP columns.
struct Row {
    a: Vec<Rat>,
    kind: RowKind,
    rhs: Rat,
}

enum LpOutcome {
    Infeasible,
    Optimal(Vec<Rat>),
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    cost: Vec<Rat>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for (x, y) in self.cost.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes the current cost row over the allowed columns. Returns
    /// false when unbounded.
    fn optimize(&mut self, allowed: &[bool]) -> bool {
        loop {
            let entering = (0..self.cols).find(|&j| allowed[j] && self.cost[j].is_negative());
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if a.is_positive() {
                    let ratio = self.rhs(i) / a;
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn set_cost(&mut self, c: &[Rat]) {
        let mut cost: Vec<Rat> = c.to_vec();
        cost.push(Rat::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() {
                let f = cost[b].clone();
                for (x, y) in cost.iter_mut().zip(&self.rows[i]) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        self.cost = cost;
    }
}

/// Minimizes `objective · x` subject to the rows and `x ≥ 0`, or only finds
/// a basic feasible point when `objective` is `None`. The objective must be
/// bounded below on the feasible set.
fn lp(rows: &[Row], n: usize, objective: Option<&[Rat]>) -> LpOutcome {
    let slacks: usize = rows.iter().filter(|r| r.kind == RowKind::Ge).count();
    let m = rows.len();
    let cols = n + slacks + m;
    let mut t = Vec::with_capacity(m);
    let mut s = n;
    for (i, r) in rows.iter().enumerate() {
        let mut row = vec![Rat::zero(); cols + 1];
        row[..n].clone_from_slice(&r.a);
        if r.kind == RowKind::Ge {
            row[s] = -Rat::one();
            s += 1;
        }
        row[cols] = r.rhs.clone();
        if row[cols].is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        row[n + slacks + i] = Rat::one();
        t.push(row);
    }
    let mut tab = Tableau { rows: t, cost: Vec::new(), basis: (n + slacks..cols).collect(), cols };
    let mut phase1 = vec![Rat::zero(); cols];
    for c in phase1.iter_mut().skip(n + slacks) {
        *c = Rat::one();
    }
    tab.set_cost(&phase1);
    let all = vec![true; cols];
    tab.optimize(&all);
    if !tab.cost[cols].is_zero() {
        return LpOutcome::Infeasible;
    }
    // Drive artificials out of the basis; drop redundant rows.
    let first_art = n + slacks;
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= first_art {
            match (0..first_art).find(|&j| !tab.rows[i][j].is_zero()) {
                Some(j) => {
                    tab.pivot(i, j);
                    i += 1;
                }
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }
    let mut allowed = vec![true; cols];
    for a in allowed.iter_mut().skip(first_art) {
        *a = false;
    }
    if let Some(obj) = objective {
        let mut c = vec![Rat::zero(); cols];
        c[..n].clone_from_slice(obj);
        tab.set_cost(&c);
        if !tab.optimize(&allowed) {
            // Callers only pass bounded objectives.
            return LpOutcome::Infeasible;
        }
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs(i).clone();
        }
    }
    LpOutcome::Optimal(x)
}

/// Exact decision of a system whose constraints all have degree ≤ 1.
pub fn decide_linear(s: &PolySystem) -> Result<LinearVerdict> {
    if let Some(c) = s.constraints.iter().find(|c| !c.poly.is_linear()) {
        return Err(Error::Nonlinear(c.poly.degree() as u32));
    }
    let mut base = Vec::new();
    let mut neqs = Vec::new();
    for c in &s.constraints {
        if c.rel == Rel::Neq {
            neqs.push(c.poly.clone());
        } else {
            base.push(c.clone());
        }
    }
    let verdict = branch(s.unknowns.len(), &mut base, &neqs)?;
    if let LinearVerdict::Sat(x) = &verdict {
        if !s.holds_at(x) {
            return Err(Error::Witness("linear witness failed exact verification".into()));
        }
    }
    Ok(verdict)
}

fn branch(n: usize, base: &mut Vec<Constraint>, neqs: &[super::Poly]) -> Result<LinearVerdict> {
    match neqs.split_first() {
        None => Ok(solve_closed(n, base)),
        Some((p, rest)) => {
            for q in [p.clone(), -p] {
                base.push(Constraint { poly: q, rel: Rel::Gt });
                let v = branch(n, base, rest);
                base.pop();
                if let Ok(LinearVerdict::Sat(_)) = &v {
                    return v;
                }
                v?;
            }
            Ok(LinearVerdict::Unsat)
        }
    }
}

fn is_sign_constraint(c: &Constraint) -> Option<u32> {
    if c.rel != Rel::Geq || c.poly.len() != 1 {
        return None;
    }
    let (m, coeff) = c.poly.terms().next()?;
    (m.degree() == 1 && coeff.is_positive()).then(|| m.vars()[0])
}

fn solve_closed(n: usize, cons: &[Constraint]) -> LinearVerdict {
    let mut nonneg = vec![false; n];
    let mut rest = Vec::new();
    for c in cons {
        match is_sign_constraint(c) {
            Some(v) => nonneg[v as usize] = true,
            None => rest.push(c),
        }
    }
    // LP column layout: x_v (or x_v⁺ then x_v⁻ for free unknowns), then t.
    let mut col_of = Vec::with_capacity(n);
    let mut ncols = 0;
    for &nn in &nonneg {
        col_of.push(ncols);
        ncols += if nn { 1 } else { 2 };
    }
    let strict = rest.iter().any(|c| c.rel == Rel::Gt);
    let t_col = ncols;
    if strict {
        ncols += 1;
    }
    let mut rows = Vec::new();
    for c in &rest {
        let (coeffs, k) = c.poly.linear_form();
        if coeffs.is_empty() {
            let ok = match c.rel {
                Rel::Eq => k.is_zero(),
                Rel::Geq => !k.is_negative(),
                Rel::Gt => k.is_positive(),
                Rel::Neq => !k.is_zero(),
            };
            if !ok {
                return LinearVerdict::Unsat;
            }
            continue;
        }
        let mut a = vec![Rat::zero(); ncols];
        for (v, q) in coeffs {
            let col = col_of[v as usize];
            a[col] += &q;
            if !nonneg[v as usize] {
                a[col + 1] -= &q;
            }
        }
        let kind = match c.rel {
            Rel::Eq => RowKind::Eq,
            Rel::Gt => {
                a[t_col] = -Rat::one();
                RowKind::Ge
            }
            _ => RowKind::Ge,
        };
        rows.push(Row { a, kind, rhs: -k });
    }
    let objective;
    let obj = if strict {
        let mut cap = vec![Rat::zero(); ncols];
        cap[t_col] = -Rat::one();
        rows.push(Row { a: cap, kind: RowKind::Ge, rhs: -Rat::one() });
        let mut c = vec![Rat::zero(); ncols];
        c[t_col] = -Rat::one();
        objective = c;
        Some(objective.as_slice())
    } else {
        None
    };
    match lp(&rows, ncols, obj) {
        LpOutcome::Infeasible => LinearVerdict::Unsat,
        LpOutcome::Optimal(y) => {
            if strict && !y[t_col].is_positive() {
                return LinearVerdict::Unsat;
            }
            let x = (0..n)
                .map(|v| {
                    let c = col_of[v];
                    if nonneg[v] {
                        y[c].clone()
                    } else {
                        &y[c] - &y[c + 1]
                    }
                })
                .collect();
            LinearVerdict::Sat(x)
        }
    }
}
