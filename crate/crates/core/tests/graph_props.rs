mod common;

use std::collections::{BTreeMap, BTreeSet};

use causalog_core::graph::{random_markov_scm, Dag, DoSets};
use causalog_core::scm::Scm;
use causalog_core::semantics::model_check;
use causalog_core::Rat;
use num_traits::Zero;
use proptest::prelude::*;

const NAMES: [&str; 7] = ["A", "B", "C", "D", "E", "F", "G"];

/// A random DAG on `n` nodes: edges only go forward in a shuffled order.
fn dag(max: usize) -> impl Strategy<Value = Dag> {
    (2..=max)
        .prop_flat_map(|n| (Just(n), Just((0..n).collect::<Vec<usize>>()).prop_shuffle(), proptest::collection::vec(any::<bool>(), n * (n - 1) / 2)))
        .prop_map(|(n, order, bits)| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        edges.push((NAMES[order[i]], NAMES[order[j]]));
                    }
                    k += 1;
                }
            }
            Dag::new(&NAMES[..n], &edges).unwrap()
        })
}

/// Disjoint node sets: each node lands in X, Y, Z or nowhere.
fn split(n: usize, labels: &[u8]) -> (BTreeSet<usize>, BTreeSet<usize>, BTreeSet<usize>) {
    let pick = |l: u8| (0..n).filter(|&v| labels[v] % 4 == l).collect();
    (pick(0), pick(1), pick(2))
}

fn descendants(g: &Dag, v: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([v]);
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        for &c in g.children(x) {
            if seen.insert(c) {
                stack.push(c);
            }
        }
    }
    seen
}

/// d-separation by enumerating every simple path of the skeleton.
fn brute_dsep(g: &Dag, x: &BTreeSet<usize>, y: &BTreeSet<usize>, z: &BTreeSet<usize>) -> bool {
    let adjacent = |a: usize, b: usize| g.parents(b).contains(&a) || g.parents(a).contains(&b);
    let arrow = |a: usize, b: usize| g.parents(b).contains(&a);
    let active = |path: &[usize]| {
        path.windows(3).all(|w| {
            let (a, m, b) = (w[0], w[1], w[2]);
            if arrow(a, m) && arrow(b, m) {
                descendants(g, m).iter().any(|d| z.contains(d))
            } else {
                !z.contains(&m)
            }
        })
    };
    fn extend(
        path: &mut Vec<usize>,
        n: usize,
        y: &BTreeSet<usize>,
        adjacent: &dyn Fn(usize, usize) -> bool,
        active: &dyn Fn(&[usize]) -> bool,
    ) -> bool {
        let last = *path.last().unwrap();
        if path.len() > 1 && y.contains(&last) {
            return active(path);
        }
        for next in 0..n {
            if !path.contains(&next) && adjacent(last, next) {
                path.push(next);
                let found = extend(path, n, y, adjacent, active);
                path.pop();
                if found {
                    return true;
                }
            }
        }
        false
    }
    !x.iter().any(|&s| extend(&mut vec![s], g.len(), y, &adjacent, &active))
}

/// `P(x, y, z) P(z) = P(x, z) P(y, z)` for every instantiation.
fn independent(m: &Scm, x: &BTreeSet<usize>, y: &BTreeSet<usize>, z: &BTreeSet<usize>) -> bool {
    let dist = m.distribution().unwrap();
    let marginal = |keep: &[&BTreeSet<usize>]| {
        let mut out: BTreeMap<Vec<Option<usize>>, Rat> = BTreeMap::new();
        for (inst, p) in &dist {
            let key = inst.iter().enumerate().map(|(v, &x)| keep.iter().any(|s| s.contains(&v)).then_some(x)).collect();
            *out.entry(key).or_insert_with(Rat::zero) += p;
        }
        out
    };
    let xyz = marginal(&[x, y, z]);
    let xz = marginal(&[x, z]);
    let yz = marginal(&[y, z]);
    let zz = marginal(&[z]);
    let project = |key: &[Option<usize>], s: &[&BTreeSet<usize>]| -> Vec<Option<usize>> {
        key.iter().enumerate().map(|(v, &k)| if s.iter().any(|t| t.contains(&v)) { k } else { None }).collect()
    };
    let get = |m: &BTreeMap<Vec<Option<usize>>, Rat>, k: Vec<Option<usize>>| m.get(&k).cloned().unwrap_or_else(Rat::zero);
    // Every full instantiation of X, Y, Z, including zero-probability ones.
    let sizes: Vec<usize> = (0..m.signature().len()).map(|v| m.signature().domain(v).len()).collect();
    let vars: Vec<usize> = x.iter().chain(y).chain(z).copied().collect();
    let count: usize = vars.iter().map(|&v| sizes[v]).product();
    (0..count).all(|mut k| {
        let mut key = vec![None; sizes.len()];
        for &v in vars.iter().rev() {
            key[v] = Some(k % sizes[v]);
            k /= sizes[v];
        }
        get(&xyz, key.clone()) * get(&zz, project(&key, &[z])) == get(&xz, project(&key, &[x, z])) * get(&yz, project(&key, &[y, z]))
    })
}

fn names(g: &Dag, s: &BTreeSet<usize>) -> Vec<String> {
    s.iter().map(|&v| g.names()[v].clone()).collect()
}

proptest! {
    #[test]
    fn dsep_matches_path_enumeration(g in dag(7), labels in proptest::collection::vec(any::<u8>(), 7)) {
        let (x, y, z) = split(g.len(), &labels);
        prop_assume!(!x.is_empty() && !y.is_empty());
        let fast = g.d_separated_idx(&x, &y, &z);
        prop_assert_eq!(fast, brute_dsep(&g, &x, &y, &z));
        prop_assert_eq!(fast, g.d_separated_idx(&y, &x, &z));
        prop_assert_eq!(fast, g.d_separated(&names(&g, &x), &names(&g, &y), &names(&g, &z)).unwrap());
    }

    #[test]
    fn dsep_is_monotone_under_edge_removal(g in dag(6), labels in proptest::collection::vec(any::<u8>(), 6), drop in any::<prop::sample::Index>()) {
        let (x, y, z) = split(g.len(), &labels);
        prop_assume!(!x.is_empty() && !y.is_empty() && !g.edges().is_empty());
        let edges = g.edges();
        let gone = edges[drop.index(edges.len())];
        let kept: Vec<(usize, usize)> = edges.into_iter().filter(|&e| e != gone).collect();
        let smaller = Dag::from_parts_unchecked(g.names().to_vec(), kept);
        // Paths of the smaller graph are paths of the larger one, and its
        // colliders have fewer descendants, so no path can become active.
        if g.d_separated_idx(&x, &y, &z) {
            prop_assert!(smaller.d_separated_idx(&x, &y, &z));
        }
    }

    #[test]
    fn dseparation_implies_independence(g in dag(4), labels in proptest::collection::vec(any::<u8>(), 4), seed in any::<u64>(), three in any::<bool>()) {
        let (x, y, z) = split(g.len(), &labels);
        prop_assume!(!x.is_empty() && !y.is_empty());
        let sizes = vec![if three { 3 } else { 2 }; g.len()];
        let m = random_markov_scm(&g, seed, &sizes).unwrap();
        if g.d_separated_idx(&x, &y, &z) {
            prop_assert!(independent(&m, &x, &y, &z));
        } else {
            // The falsification direction: a few seeds expose a dependence.
            let found = (0..5).any(|k| !independent(&random_markov_scm(&g, seed.wrapping_add(k), &sizes).unwrap(), &x, &y, &z));
            prop_assert!(found, "no dependence found for a d-connected triple");
        }
    }

    #[test]
    fn do_calculus_instances_hold(g in dag(4), labels in proptest::collection::vec(any::<u8>(), 4), rule in 1u8..=3, seed in any::<u64>()) {
        let n = g.len();
        // Node 0 is in Y and node 1 in Z; the graph's order is random anyway.
        let label = |v: usize| [1, 2].get(v).copied().unwrap_or(labels[v] % 5);
        let pick = |l: u8| -> Vec<String> { (0..n).filter(|&v| label(v) == l).map(|v| g.names()[v].clone()).collect() };
        let sets = DoSets { x: pick(0), y: pick(1), z: pick(2), w: pick(3) };
        let m = random_markov_scm(&g, seed, &vec![2; n]).unwrap();
        match g.docalc_instances(m.signature(), rule, &sets) {
            Ok(instances) => {
                prop_assert!(g.docalc_premise(rule, &sets).unwrap());
                for f in &instances {
                    prop_assert!(model_check(&m, f).unwrap(), "rule {} instance {} fails", rule, f);
                }
            }
            Err(_) => prop_assert!(!g.docalc_premise(rule, &sets).unwrap()),
        }
    }
}
