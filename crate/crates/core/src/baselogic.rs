//! Deterministic base-language reasoning through Δ-atoms.
//!
//! A formula fixes the variables it mentions, the values it mentions for
//! each of them, and the interventions it uses. An atom assigns, under every
//! such intervention, one outcome block to every variable: either a
//! mentioned value or the "other" block standing for all remaining values.
//! The atoms with a given variable order that some deterministic model
//! recursive over that order satisfies are decided by the conflict-table
//! check in [`DeltaContext::in_delta_order`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::formula::{Event, Formula, Intervention, Prop};
use crate::signature::Signature;
use crate::{Error, Result};

/// Outcome block of one variable: a mentioned value or the rest.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Block {
    Value(String),
    Other,
}

/// One element of Δ: block indices laid out row by row (one row per
/// intervention of the context, one column per variable).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeltaAtom {
    pub blocks: Vec<u16>,
}

/// Enumeration caps. Exceeding one is an error, never a silent cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_atoms: usize,
    pub max_orders: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_atoms: 1 << 20, max_orders: 40_320 }
    }
}

/// The variables, blocks and interventions an atom ranges over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaContext {
    vars: Vec<String>,
    blocks: Vec<Vec<Block>>,
    interventions: Vec<Intervention>,
    /// `forced[r][v]`: the block intervention `r` imposes on variable `v`.
    forced: Vec<Vec<Option<u16>>>,
}

/// One entry of a [`ConflictTable`]: `None` for an intervened variable,
/// otherwise the pair (blocks of the earlier columns, block of the column).
pub type Cell = Option<(Vec<u16>, u16)>;

/// The table of functional constraints an atom induces under an order.
/// `cells[r][i]` is the entry for row `r` and the variable in column `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictTable {
    pub order: Vec<usize>,
    pub cells: Vec<Vec<Cell>>,
}

/// A witness that two base formulas are not equivalent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub order: Vec<String>,
    pub atom: Event,
}

impl DeltaContext {
    /// Context of the listed variables. `values[v]` are the mentioned values
    /// of `vars[v]`; `closed[v]` says the domain equals them, which drops
    /// the "other" block.
    pub fn new(vars: Vec<String>, values: Vec<Vec<String>>, closed: Vec<bool>, interventions: Vec<Intervention>) -> Result<Self> {
        if values.len() != vars.len() || closed.len() != vars.len() {
            return Err(Error::Schema("one value list per variable is required".into()));
        }
        let mut blocks = Vec::new();
        for (vals, &closed) in values.iter().zip(&closed) {
            let mut b: Vec<Block> = vals.iter().cloned().map(Block::Value).collect();
            if !closed {
                b.push(Block::Other);
            }
            if b.is_empty() || b.len() > u16::MAX as usize {
                return Err(Error::Schema("a variable needs between 1 and 65535 blocks".into()));
            }
            blocks.push(b);
        }
        let mut forced = Vec::new();
        for alpha in &interventions {
            let mut row = vec![None; vars.len()];
            for (var, val) in alpha.iter() {
                let v = vars.iter().position(|n| n == var).ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
                let b = blocks[v]
                    .iter()
                    .position(|b| *b == Block::Value(val.to_string()))
                    .ok_or_else(|| Error::ValueOutsideDomain { var: var.to_string(), value: val.to_string() })?;
                row[v] = Some(b as u16);
            }
            forced.push(row);
        }
        Ok(DeltaContext { vars, blocks, interventions, forced })
    }

    /// Context of a set of base formulas: their variables, mentioned values
    /// and interventions. With a signature, variables whose domain is fully
    /// mentioned lose the "other" block; without one every domain is open.
    pub fn from_events<'a>(events: impl IntoIterator<Item = &'a Event>, sig: Option<&Signature>) -> Result<Self> {
        let mut vals: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        let mut ints: BTreeSet<Intervention> = BTreeSet::new();
        for e in events {
            for atom in e.atoms() {
                vals.entry(atom.var).or_default().insert(atom.value);
            }
            ints.extend(e.interventions());
        }
        let vars: Vec<String> = vals.keys().cloned().collect();
        let mut values = Vec::new();
        let mut closed = Vec::new();
        for v in &vars {
            let mentioned: Vec<String> = vals[v].iter().cloned().collect();
            let is_closed = match sig {
                Some(sig) => {
                    let dom = sig.domain_of(v).ok_or_else(|| Error::UnknownVariable(v.clone()))?;
                    for x in &mentioned {
                        if !dom.contains(x) {
                            return Err(Error::ValueOutsideDomain { var: v.clone(), value: x.clone() });
                        }
                    }
                    dom.len() == mentioned.len()
                }
                None => false,
            };
            values.push(mentioned);
            closed.push(is_closed);
        }
        DeltaContext::new(vars, values, closed, ints.into_iter().collect())
    }

    /// Context of every probability argument of `f`.
    pub fn from_formula(f: &Formula, sig: Option<&Signature>) -> Result<Self> {
        let events = f.events();
        DeltaContext::from_events(events.iter(), sig)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn interventions(&self) -> &[Intervention] {
        &self.interventions
    }

    pub fn blocks(&self, v: usize) -> &[Block] {
        &self.blocks[v]
    }

    /// Values mentioned for variable `v`.
    pub fn mentioned(&self, v: usize) -> Vec<&str> {
        self.blocks[v]
            .iter()
            .filter_map(|b| match b {
                Block::Value(x) => Some(x.as_str()),
                Block::Other => None,
            })
            .collect()
    }

    fn width(&self) -> usize {
        self.vars.len()
    }

    fn cell_count(&self) -> usize {
        self.vars.len() * self.interventions.len()
    }

    pub fn block_of(&self, d: &DeltaAtom, row: usize, v: usize) -> &Block {
        &self.blocks[v][d.blocks[row * self.width() + v] as usize]
    }

    /// `|Δ|` if it fits in 128 bits.
    pub fn delta_size(&self) -> Option<u128> {
        let mut n: u128 = 1;
        for _ in &self.interventions {
            for b in &self.blocks {
                n = n.checked_mul(b.len() as u128)?;
            }
        }
        Some(n)
    }

    /// Lazily enumerates all of Δ in mixed-radix order.
    pub fn atoms(&self) -> impl Iterator<Item = DeltaAtom> + '_ {
        let radix: Vec<u16> = (0..self.cell_count()).map(|i| self.blocks[i % self.width().max(1)].len() as u16).collect();
        let mut next = Some(vec![0u16; self.cell_count()]);
        core::iter::from_fn(move || {
            let cur = next.take()?;
            let mut succ = cur.clone();
            let mut k = succ.len();
            let mut advanced = false;
            while k > 0 {
                k -= 1;
                succ[k] += 1;
                if succ[k] < radix[k] {
                    advanced = true;
                    break;
                }
                succ[k] = 0;
            }
            if advanced {
                next = Some(succ);
            }
            Some(DeltaAtom { blocks: cur })
        })
    }

    /// Builds the conflict table of `d` under `order` (a permutation of
    /// variable indices).
    pub fn conflict_table(&self, d: &DeltaAtom, order: &[usize]) -> ConflictTable {
        let w = self.width();
        let cells = (0..self.interventions.len())
            .map(|r| {
                order
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        if self.forced[r][v].is_some() {
                            None
                        } else {
                            let key = order[..i].iter().map(|&p| d.blocks[r * w + p]).collect();
                            Some((key, d.blocks[r * w + v]))
                        }
                    })
                    .collect()
            })
            .collect();
        ConflictTable { order: order.to_vec(), cells }
    }

    /// Whether some deterministic model recursive over `order` satisfies
    /// `d`: intervened variables must show their assigned value, and no two
    /// cells of a column may map the same input to different outputs.
    pub fn in_delta_order(&self, d: &DeltaAtom, order: &[usize]) -> bool {
        let w = self.width();
        for (r, row) in self.forced.iter().enumerate() {
            for (v, f) in row.iter().enumerate() {
                if let Some(b) = f {
                    if d.blocks[r * w + v] != *b {
                        return false;
                    }
                }
            }
        }
        let table = self.conflict_table(d, order);
        for col in 0..order.len() {
            let mut seen: BTreeMap<&[u16], u16> = BTreeMap::new();
            for row in &table.cells {
                if let Some((key, out)) = &row[col] {
                    match seen.get(key.as_slice()) {
                        Some(prev) if prev != out => return false,
                        _ => {
                            seen.insert(key, *out);
                        }
                    }
                }
            }
        }
        true
    }

    /// Δ restricted to atoms satisfiable over `order`, generated column by
    /// column with conflicts pruned as soon as they arise.
    pub fn delta_order(&self, order: &[usize], max_atoms: usize) -> Result<Vec<DeltaAtom>> {
        let rows = self.interventions.len();
        let w = self.width();
        let mut out = Vec::new();
        let mut cur = vec![0u16; rows * w];
        let mut columns: Vec<BTreeMap<Vec<u16>, u16>> = vec![BTreeMap::new(); w];
        // Positions in column-major order along `order`.
        let slots: Vec<(usize, usize)> = order.iter().flat_map(|&v| (0..rows).map(move |r| (r, v))).collect();
        self.dfs(order, &slots, 0, &mut cur, &mut columns, &mut out, max_atoms)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        order: &[usize],
        slots: &[(usize, usize)],
        k: usize,
        cur: &mut Vec<u16>,
        columns: &mut Vec<BTreeMap<Vec<u16>, u16>>,
        out: &mut Vec<DeltaAtom>,
        max_atoms: usize,
    ) -> Result<()> {
        let w = self.width();
        if k == slots.len() {
            if out.len() >= max_atoms {
                return Err(Error::SizeGuard(alloc::format!("more than {max_atoms} atoms for one order")));
            }
            out.push(DeltaAtom { blocks: cur.clone() });
            return Ok(());
        }
        let (r, v) = slots[k];
        if let Some(b) = self.forced[r][v] {
            cur[r * w + v] = b;
            return self.dfs(order, slots, k + 1, cur, columns, out, max_atoms);
        }
        let col = order.iter().position(|&x| x == v).expect("order covers variables");
        let key: Vec<u16> = order[..col].iter().map(|&p| cur[r * w + p]).collect();
        if let Some(&fixed) = columns[v].get(&key) {
            cur[r * w + v] = fixed;
            return self.dfs(order, slots, k + 1, cur, columns, out, max_atoms);
        }
        for b in 0..self.blocks[v].len() as u16 {
            cur[r * w + v] = b;
            columns[v].insert(key.clone(), b);
            let res = self.dfs(order, slots, k + 1, cur, columns, out, max_atoms);
            columns[v].remove(&key);
            res?;
        }
        Ok(())
    }

    fn row_of(&self, alpha: &Intervention) -> Result<usize> {
        self.interventions
            .iter()
            .position(|a| a == alpha)
            .ok_or_else(|| Error::Schema(alloc::format!("intervention {alpha} is not part of the context")))
    }

    /// Whether `d` entails `e`, decided from the blocks alone.
    pub fn entails(&self, d: &DeltaAtom, e: &Event) -> Result<bool> {
        Ok(match e {
            Event::Cond(alpha, p) => {
                let r = self.row_of(alpha)?;
                self.prop_holds(d, r, p)?
            }
            Event::Not(x) => !self.entails(d, x)?,
            Event::And(a, b) => self.entails(d, a)? && self.entails(d, b)?,
        })
    }

    fn prop_holds(&self, d: &DeltaAtom, r: usize, p: &Prop) -> Result<bool> {
        let mut err = None;
        let val = p.eval(&mut |var, value| match self.vars.iter().position(|n| n == var) {
            Some(v) => *self.block_of(d, r, v) == Block::Value(value.to_string()),
            None => {
                err.get_or_insert_with(|| Error::UnknownVariable(var.to_string()));
                false
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(val),
        }
    }

    /// Indices of the atoms in `atoms` that entail `e`.
    pub fn expand_prob(&self, e: &Event, atoms: &[DeltaAtom]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, d) in atoms.iter().enumerate() {
            if self.entails(d, e)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// The atom as a base formula: one conditional per intervention whose
    /// consequent fixes every variable's block.
    pub fn atom_event(&self, d: &DeltaAtom) -> Event {
        let rows = self.interventions.iter().enumerate().map(|(r, alpha)| {
            let parts = (0..self.width()).map(|v| match self.block_of(d, r, v) {
                Block::Value(x) => Prop::atom(self.vars[v].clone(), x.clone()),
                Block::Other => Prop::conj(self.mentioned(v).into_iter().map(|x| Prop::atom(self.vars[v].clone(), x).not())),
            });
            Event::cond(alpha.clone(), Prop::conj(parts))
        });
        Event::conj(rows)
    }

    /// All permutations of the variables in lexicographic order.
    pub fn orders(&self) -> Permutations {
        Permutations::new(self.width())
    }

    pub fn order_names(&self, order: &[usize]) -> Vec<String> {
        order.iter().map(|&v| self.vars[v].clone()).collect()
    }
}

/// Lexicographic permutations of `0..n`.
pub struct Permutations {
    next: Option<Vec<usize>>,
}

impl Permutations {
    pub fn new(n: usize) -> Self {
        Permutations { next: Some((0..n).collect()) }
    }
}

impl Iterator for Permutations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut p = cur.clone();
        let n = p.len();
        if n >= 2 {
            let mut i = n - 1;
            while i > 0 && p[i - 1] >= p[i] {
                i -= 1;
            }
            if i > 0 {
                let mut j = n - 1;
                while p[j] <= p[i - 1] {
                    j -= 1;
                }
                p.swap(i - 1, j);
                p[i..].reverse();
                self.next = Some(p);
            }
        }
        Some(cur)
    }
}

/// Number of orders, or `None` past `usize`.
pub fn factorial(n: usize) -> Option<usize> {
    (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k))
}

fn check_orders(ctx: &DeltaContext, limits: &Limits) -> Result<()> {
    match factorial(ctx.vars.len()) {
        Some(n) if n <= limits.max_orders => Ok(()),
        _ => Err(Error::SizeGuard(alloc::format!("{} variables exceed the order limit", ctx.vars.len()))),
    }
}

/// Decides whether `e1 ↔ e2` holds in every deterministic model; returns a
/// refuting order and atom otherwise.
pub fn base_valid(e1: &Event, e2: &Event, sig: Option<&Signature>, limits: &Limits) -> Result<Option<Counterexample>> {
    let ctx = DeltaContext::from_events([e1, e2], sig)?;
    check_orders(&ctx, limits)?;
    for order in ctx.orders() {
        for d in ctx.delta_order(&order, limits.max_atoms)? {
            if ctx.entails(&d, e1)? != ctx.entails(&d, e2)? {
                return Ok(Some(Counterexample { order: ctx.order_names(&order), atom: ctx.atom_event(&d) }));
            }
        }
    }
    Ok(None)
}

/// Decides whether some deterministic model satisfies `e`; returns the
/// satisfying order and atom.
pub fn base_sat(e: &Event, sig: Option<&Signature>, limits: &Limits) -> Result<Option<Counterexample>> {
    let ctx = DeltaContext::from_events([e], sig)?;
    check_orders(&ctx, limits)?;
    for order in ctx.orders() {
        for d in ctx.delta_order(&order, limits.max_atoms)? {
            if ctx.entails(&d, e)? {
                return Ok(Some(Counterexample { order: ctx.order_names(&order), atom: ctx.atom_event(&d) }));
            }
        }
    }
    Ok(None)
}
