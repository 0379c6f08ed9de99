//! Bounded probabilistic simulation programs.
//!
//! A program reads bits from a random tape into registers, branches forward
//! on registers, and writes every endogenous variable exactly once on each
//! path. These restrictions make every program halt, read at most
//! `bit_bound` bits, and define a function from bit strings to
//! instantiations, so its distribution is computed exactly by enumerating
//! all `2^bit_bound` tapes.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::formula::Intervention;
use crate::num::{dyadic_exponent, Rat};
use crate::scm::{ExoSpace, Instantiation, Mechanism, Scm};
use crate::signature::Signature;
use crate::{Error, Result};

/// Largest tape length enumerated by default.
pub const DEFAULT_BIT_CAP: u32 = 20;

const MAX_PATHS: usize = 1 << 16;

/// A value source: a register holding one bit, or an endogenous variable
/// written earlier on the path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Operand {
    Reg(usize),
    Var(usize),
}

/// Right-hand side of a write. Values are indices into the target's
/// domain; a register bit `b` reads as value index `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Value(usize),
    Read(Operand),
    /// Lookup in a table indexed by the inputs in mixed radix, first input
    /// most significant. Registers have radix 2.
    Table { inputs: Vec<Operand>, values: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instr {
    ReadBit(usize),
    /// Jump forward by `offset` instructions when the register holds 1.
    IfGoto { reg: usize, offset: usize },
    Write { var: usize, expr: Expr },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimProgram {
    sig: Signature,
    bit_bound: u32,
    instrs: Vec<Instr>,
}

/// Output of [`compile_scm`]: the program and the total-variation distance
/// between the model's exogenous measure and the one the program samples.
/// The distance is zero unless weights were approximated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compiled {
    pub program: SimProgram,
    pub tv_bound: Rat,
}

/// First point where a program and a model disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Difference {
    pub intervention: Intervention,
    pub instantiation: Vec<(String, String)>,
    pub program: Rat,
    pub model: Rat,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidProgram(msg.into())
}

impl Operand {
    fn radix(self, sig: &Signature) -> usize {
        match self {
            Operand::Reg(_) => 2,
            Operand::Var(v) => sig.domain(v).len(),
        }
    }
}

#[derive(Clone)]
struct PathState {
    pc: usize,
    written: Vec<bool>,
    regs: Vec<bool>,
    bits: u32,
}

impl SimProgram {
    /// Validates the structural invariants over every control-flow path:
    /// forward jumps inside the program, registers set before use, variables
    /// written before they are read, each variable written exactly once, at
    /// most `bit_bound` bits read.
    pub fn new(sig: Signature, bit_bound: u32, instrs: Vec<Instr>) -> Result<Self> {
        let p = SimProgram { sig, bit_bound, instrs };
        p.validate()?;
        Ok(p)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn bit_bound(&self) -> u32 {
        self.bit_bound
    }

    pub fn instructions(&self) -> &[Instr] {
        &self.instrs
    }

    fn registers(&self) -> usize {
        let mut n = 0;
        let mut see = |op: &Operand| {
            if let Operand::Reg(r) = op {
                n = n.max(r + 1);
            }
        };
        for i in &self.instrs {
            match i {
                Instr::ReadBit(r) | Instr::IfGoto { reg: r, .. } => see(&Operand::Reg(*r)),
                Instr::Write { expr: Expr::Read(op), .. } => see(op),
                Instr::Write { expr: Expr::Table { inputs, .. }, .. } => inputs.iter().for_each(&mut see),
                Instr::Write { .. } => {}
            }
        }
        n
    }

    fn check_expr(&self, var: usize, expr: &Expr, st: &PathState) -> Result<()> {
        let name = self.sig.name(var);
        let size = self.sig.domain(var).len();
        let operand = |op: &Operand| -> Result<()> {
            match *op {
                Operand::Reg(r) if !st.regs[r] => Err(invalid(alloc::format!("register r{r} is read before it is set"))),
                Operand::Var(w) if w >= self.sig.len() => Err(invalid("unknown variable")),
                Operand::Var(w) if !st.written[w] => {
                    Err(invalid(alloc::format!("`{}` is read before it is written", self.sig.name(w))))
                }
                _ => Ok(()),
            }
        };
        match expr {
            Expr::Value(x) if *x >= size => Err(invalid(alloc::format!("value outside the domain of `{name}`"))),
            Expr::Value(_) => Ok(()),
            Expr::Read(op) => {
                operand(op)?;
                match *op {
                    Operand::Reg(_) if size < 2 => Err(invalid(alloc::format!("a bit does not fit the domain of `{name}`"))),
                    Operand::Var(w) if self.sig.domain(w) != self.sig.domain(var) => {
                        Err(invalid(alloc::format!("`{}` and `{name}` have different domains", self.sig.name(w))))
                    }
                    _ => Ok(()),
                }
            }
            Expr::Table { inputs, values } => {
                inputs.iter().try_for_each(operand)?;
                let count = inputs.iter().try_fold(1usize, |acc, op| acc.checked_mul(op.radix(&self.sig)));
                if count != Some(values.len()) {
                    return Err(invalid(alloc::format!("the table for `{name}` has the wrong number of entries")));
                }
                if values.iter().any(|&x| x >= size) {
                    return Err(invalid(alloc::format!("the table for `{name}` leaves its domain")));
                }
                Ok(())
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.sig.len();
        let mut stack = vec![PathState { pc: 0, written: vec![false; n], regs: vec![false; self.registers()], bits: 0 }];
        let mut paths = 0usize;
        while let Some(mut st) = stack.pop() {
            loop {
                let Some(instr) = self.instrs.get(st.pc) else {
                    if let Some(v) = st.written.iter().position(|w| !w) {
                        return Err(invalid(alloc::format!("a path ends without writing `{}`", self.sig.name(v))));
                    }
                    paths += 1;
                    if paths > MAX_PATHS {
                        return Err(Error::SizeGuard("too many program paths".into()));
                    }
                    break;
                };
                match instr {
                    Instr::ReadBit(r) => {
                        st.bits += 1;
                        if st.bits > self.bit_bound {
                            return Err(invalid(alloc::format!("a path reads more than {} bits", self.bit_bound)));
                        }
                        st.regs[*r] = true;
                        st.pc += 1;
                    }
                    Instr::IfGoto { reg, offset } => {
                        if !st.regs[*reg] {
                            return Err(invalid(alloc::format!("register r{reg} is tested before it is set")));
                        }
                        if *offset == 0 || st.pc + offset > self.instrs.len() {
                            return Err(invalid(alloc::format!("jump at instruction {} is not forward", st.pc + 1)));
                        }
                        let mut taken = st.clone();
                        taken.pc += offset;
                        stack.push(taken);
                        st.pc += 1;
                    }
                    Instr::Write { var, expr } => {
                        if *var >= n {
                            return Err(invalid("unknown variable"));
                        }
                        if st.written[*var] {
                            return Err(invalid(alloc::format!("a path writes `{}` twice", self.sig.name(*var))));
                        }
                        self.check_expr(*var, expr, &st)?;
                        st.written[*var] = true;
                        st.pc += 1;
                    }
                }
            }
        }
        Ok(())
    }

    /// Runs the program on a tape, which must hold at least `bit_bound`
    /// bits.
    pub fn run(&self, bits: &[bool]) -> Result<Instantiation> {
        if bits.len() < self.bit_bound as usize {
            return Err(invalid(alloc::format!("the tape needs {} bits", self.bit_bound)));
        }
        Ok(self.run_unchecked(bits))
    }

    fn run_unchecked(&self, bits: &[bool]) -> Instantiation {
        let mut regs = vec![false; self.registers()];
        let mut vals = vec![0usize; self.sig.len()];
        let mut next = 0;
        let mut pc = 0;
        let read = |op: &Operand, regs: &[bool], vals: &[usize]| match *op {
            Operand::Reg(r) => regs[r] as usize,
            Operand::Var(v) => vals[v],
        };
        while let Some(instr) = self.instrs.get(pc) {
            match instr {
                Instr::ReadBit(r) => {
                    regs[*r] = bits[next];
                    next += 1;
                    pc += 1;
                }
                Instr::IfGoto { reg, offset } => pc += if regs[*reg] { *offset } else { 1 },
                Instr::Write { var, expr } => {
                    vals[*var] = match expr {
                        Expr::Value(x) => *x,
                        Expr::Read(op) => read(op, &regs, &vals),
                        Expr::Table { inputs, values } => {
                            let idx = inputs.iter().fold(0, |acc, op| acc * op.radix(&self.sig) + read(op, &regs, &vals));
                            values[idx]
                        }
                    };
                    pc += 1;
                }
            }
        }
        vals
    }

    /// The program with the intervened variables' writes replaced by their
    /// fixed values, so later reads see the intervened value.
    pub fn intervene(&self, i: &Intervention) -> Result<SimProgram> {
        let mut fixed = vec![None; self.sig.len()];
        for (var, value) in i.iter() {
            let (v, x) = self.sig.resolve(var, value)?;
            fixed[v] = Some(x);
        }
        let instrs = self
            .instrs
            .iter()
            .map(|instr| match instr {
                Instr::Write { var, .. } if fixed[*var].is_some() => {
                    Instr::Write { var: *var, expr: Expr::Value(fixed[*var].expect("checked")) }
                }
                other => other.clone(),
            })
            .collect();
        Ok(SimProgram { sig: self.sig.clone(), bit_bound: self.bit_bound, instrs })
    }

    /// Exact distribution of the intervened program over all tapes of
    /// length `bit_bound`.
    pub fn distribution(&self, i: &Intervention, bit_cap: u32) -> Result<BTreeMap<Instantiation, Rat>> {
        if self.bit_bound > bit_cap {
            return Err(Error::SizeGuard(alloc::format!("{} random bits exceed the cap of {bit_cap}", self.bit_bound)));
        }
        let p = self.intervene(i)?;
        let b = self.bit_bound as usize;
        let weight = Rat::new(BigInt::one(), BigInt::one() << b);
        let mut dist: BTreeMap<Instantiation, Rat> = BTreeMap::new();
        let mut bits = vec![false; b];
        for n in 0u64..(1u64 << b) {
            for (k, bit) in bits.iter_mut().enumerate() {
                *bit = n >> (b - 1 - k) & 1 == 1;
            }
            *dist.entry(p.run_unchecked(&bits)).or_insert_with(Rat::zero) += &weight;
        }
        Ok(dist)
    }

    /// The model whose exogenous points are the tapes, each of weight
    /// `2^-bit_bound`, and whose mechanism for `V` runs the program with
    /// the variables read by `V`'s writes fixed. Fails with
    /// [`Error::NotRecursive`] when the reads form a cycle at some tape.
    pub fn tabulate(&self, bit_cap: u32) -> Result<Scm> {
        if self.bit_bound > bit_cap {
            return Err(Error::SizeGuard(alloc::format!("{} random bits exceed the cap of {bit_cap}", self.bit_bound)));
        }
        let b = self.bit_bound as usize;
        let tapes = 1usize << b;
        let weight = Rat::new(BigInt::one(), BigInt::one() << b);
        let labels: Vec<(String, Rat)> = (0..tapes)
            .map(|n| {
                let label = if b == 0 { "empty".to_string() } else { (0..b).map(|k| if n >> (b - 1 - k) & 1 == 1 { '1' } else { '0' }).collect() };
                (label, weight.clone())
            })
            .collect();
        let exo = ExoSpace::new(labels)?;
        let n = self.sig.len();
        let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
        for instr in &self.instrs {
            if let Instr::Write { var, expr } = instr {
                let ops: Vec<Operand> = match expr {
                    Expr::Value(_) => Vec::new(),
                    Expr::Read(op) => vec![*op],
                    Expr::Table { inputs, .. } => inputs.clone(),
                };
                for op in ops {
                    if let Operand::Var(w) = op {
                        if !parents[*var].contains(&w) {
                            parents[*var].push(w);
                        }
                    }
                }
            }
        }
        let mut bits = vec![false; b];
        let mut mechs = Vec::with_capacity(n);
        for (v, ps) in parents.iter().enumerate() {
            let radix: Vec<usize> = ps.iter().map(|&p| self.sig.domain(p).len()).collect();
            let count = radix.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r)).and_then(|c| c.checked_mul(tapes));
            let Some(size) = count.filter(|&c| c <= 1 << 22) else {
                return Err(Error::SizeGuard("tabulated mechanism".into()));
            };
            let mut table = Vec::with_capacity(size);
            for idx in 0..size / tapes {
                let mut rest = idx;
                let mut pairs = Vec::new();
                for (k, &p) in ps.iter().enumerate().rev() {
                    pairs.push((self.sig.name(p).to_string(), self.sig.domain(p)[rest % radix[k]].clone()));
                    rest /= radix[k];
                }
                let fixed = self.intervene(&Intervention::new(pairs)?)?;
                for u in 0..tapes {
                    for (k, bit) in bits.iter_mut().enumerate() {
                        *bit = u >> (b - 1 - k) & 1 == 1;
                    }
                    table.push(fixed.run_unchecked(&bits)[v]);
                }
            }
            mechs.push(Mechanism { parents: ps.clone(), table });
        }
        let m = Scm::new(self.sig.clone(), exo, mechs)?;
        m.order()?;
        Ok(m)
    }
}

/// Counts of `2^k` tape slots per exogenous point: exact for dyadic
/// weights, largest-remainder rounding otherwise.
fn slots(exo: &ExoSpace, k: u32) -> Vec<BigInt> {
    let scale = BigInt::one() << k as usize;
    let scaled: Vec<Rat> = exo.iter().map(|(_, w)| w * Rat::from_integer(scale.clone())).collect();
    let mut counts: Vec<BigInt> = scaled.iter().map(|q| q.floor().to_integer()).collect();
    let mut missing = &scale - counts.iter().sum::<BigInt>();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| (&scaled[b] - scaled[b].floor()).cmp(&(&scaled[a] - scaled[a].floor())).then(a.cmp(&b)));
    for u in order {
        if !missing.is_positive() {
            break;
        }
        counts[u] += 1;
        missing -= 1;
    }
    counts
}

/// A program that samples the exogenous point from `k` bits and evaluates
/// the mechanisms in the model's recursive order. Non-dyadic weights are
/// rejected unless `approx_bits` gives the tape length to round them to.
pub fn compile_scm(m: &Scm, approx_bits: Option<u32>, bit_cap: u32) -> Result<Compiled> {
    let order = m.order()?;
    let exo = m.exo();
    let exact: Option<u64> = exo.iter().map(|(_, w)| dyadic_exponent(w)).try_fold(0u64, |acc, e| e.map(|e| acc.max(e)));
    let k = match (exact, approx_bits) {
        (Some(e), _) => e as u32,
        (None, Some(bits)) => bits,
        (None, None) => {
            let (label, w) = exo.iter().find(|(_, w)| dyadic_exponent(w).is_none()).expect("some weight is not dyadic");
            return Err(Error::NonDyadic(alloc::format!("{w} at `{label}`")));
        }
    };
    if k > bit_cap {
        return Err(Error::SizeGuard(alloc::format!("{k} random bits exceed the cap of {bit_cap}")));
    }
    let counts = slots(exo, k);
    let scale = Rat::from_integer(BigInt::one() << k as usize);
    let tv = exo
        .iter()
        .zip(&counts)
        .map(|((_, w), c)| (w - Rat::from_integer(c.clone()) / &scale).abs())
        .fold(Rat::zero(), |a, b| a + b)
        / Rat::from_integer(BigInt::from(2));
    let tapes = 1usize << k;
    let mut point_of = Vec::with_capacity(tapes);
    for (u, c) in counts.iter().enumerate() {
        point_of.extend(core::iter::repeat_n(u, c.to_usize().expect("at most 2^k slots")));
    }

    let sig = m.signature();
    let mut instrs: Vec<Instr> = (0..k as usize).map(Instr::ReadBit).collect();
    let regs: Vec<Operand> = (0..k as usize).map(Operand::Reg).collect();
    let mut done = vec![false; sig.len()];
    let mut values = vec![0usize; sig.len()];
    for &v in &order {
        let parents: Vec<usize> = m.mechanism(v).parents.iter().copied().filter(|&p| done[p]).collect();
        let mut inputs: Vec<Operand> = parents.iter().map(|&p| Operand::Var(p)).collect();
        inputs.extend(regs.iter().copied());
        let radix: Vec<usize> = parents.iter().map(|&p| sig.domain(p).len()).collect();
        let combos: usize = radix.iter().product();
        let mut table = Vec::with_capacity(combos * tapes);
        for idx in 0..combos {
            let mut rest = idx;
            for (k, &p) in parents.iter().enumerate().rev() {
                values[p] = rest % radix[k];
                rest /= radix[k];
            }
            for &u in &point_of {
                table.push(m.eval_mechanism(v, &values, u));
            }
        }
        for &p in &parents {
            values[p] = 0;
        }
        instrs.push(Instr::Write { var: v, expr: simplify(inputs, table, sig, v) });
        done[v] = true;
    }
    let program = SimProgram::new(sig.clone(), k, instrs)?;
    Ok(Compiled { program, tv_bound: tv })
}

/// Constant tables become values, and identity tables over one input
/// become reads.
fn simplify(inputs: Vec<Operand>, values: Vec<usize>, sig: &Signature, var: usize) -> Expr {
    if values.iter().all(|&x| x == values[0]) {
        return Expr::Value(values[0]);
    }
    // Drop inputs the table does not depend on.
    let radix: Vec<usize> = inputs.iter().map(|op| op.radix(sig)).collect();
    let mut keep = Vec::new();
    for (k, _) in inputs.iter().enumerate() {
        let stride: usize = radix[k + 1..].iter().product();
        let matters = (0..values.len()).any(|i| {
            let digit = i / stride % radix[k];
            digit > 0 && values[i] != values[i - digit * stride]
        });
        if matters {
            keep.push(k);
        }
    }
    let kept_inputs: Vec<Operand> = keep.iter().map(|&k| inputs[k]).collect();
    let kept_radix: Vec<usize> = keep.iter().map(|&k| radix[k]).collect();
    let count: usize = kept_radix.iter().product();
    let mut kept_values = Vec::with_capacity(count);
    for idx in 0..count {
        let mut rest = idx;
        let mut full = 0;
        let mut digits = vec![0; inputs.len()];
        for (j, &k) in keep.iter().enumerate().rev() {
            digits[k] = rest % kept_radix[j];
            rest /= kept_radix[j];
        }
        for (k, d) in digits.iter().enumerate() {
            full = full * radix[k] + d;
        }
        kept_values.push(values[full]);
    }
    if let [op] = kept_inputs.as_slice() {
        let same_domain = match *op {
            Operand::Reg(_) => true,
            Operand::Var(w) => sig.domain(w) == sig.domain(var),
        };
        if same_domain && kept_values.iter().enumerate().all(|(i, &x)| i == x) {
            return Expr::Read(*op);
        }
    }
    Expr::Table { inputs: kept_inputs, values: kept_values }
}

/// Every intervention that sets one variable to one value.
pub fn single_interventions(sig: &Signature) -> Vec<Intervention> {
    sig.iter()
        .flat_map(|(name, dom)| dom.iter().map(move |x| Intervention::single(name, x.as_str())))
        .collect()
}

/// Compares the program's and the model's distributions under each
/// intervention, returning the first disagreement.
pub fn equiv_check(p: &SimProgram, m: &Scm, interventions: &[Intervention], bit_cap: u32) -> Result<Option<Difference>> {
    if p.signature() != m.signature() {
        return Err(Error::InvalidModel("the program and the model have different signatures".into()));
    }
    for i in interventions {
        let dp = p.distribution(i, bit_cap)?;
        let dm = m.distribution_under(i)?;
        let keys: alloc::collections::BTreeSet<&Instantiation> = dp.keys().chain(dm.keys()).collect();
        for key in keys {
            let a = dp.get(key).cloned().unwrap_or_else(Rat::zero);
            let b = dm.get(key).cloned().unwrap_or_else(Rat::zero);
            if a != b {
                return Ok(Some(Difference { intervention: i.clone(), instantiation: m.describe(key), program: a, model: b }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::num::rat;

    fn copy_program() -> SimProgram {
        let sig = Signature::binary(&["X", "Y"]);
        SimProgram::new(
            sig,
            1,
            vec![Instr::ReadBit(0), Instr::Write { var: 0, expr: Expr::Read(Operand::Reg(0)) }, Instr::Write { var: 1, expr: Expr::Read(Operand::Var(0)) }],
        )
        .unwrap()
    }

    #[test]
    fn run_and_intervene() {
        let p = copy_program();
        assert_eq!(p.run(&[true]).unwrap(), vec![1, 1]);
        let q = p.intervene(&Intervention::single("X", "0")).unwrap();
        assert_eq!(q.run(&[true]).unwrap(), vec![0, 0]);
        assert_eq!(q.run(&[false]).unwrap(), vec![0, 0]);
        assert_eq!(p.intervene(&Intervention::top()).unwrap(), p);
        assert!(p.run(&[]).is_err());
    }

    #[test]
    fn distributions() {
        let p = copy_program();
        let d = p.distribution(&Intervention::top(), DEFAULT_BIT_CAP).unwrap();
        assert_eq!(d.get(&vec![1, 1]), Some(&rat(1, 2)));
        assert_eq!(d.get(&vec![0, 0]), Some(&rat(1, 2)));
        let d = p.distribution(&Intervention::single("X", "0"), DEFAULT_BIT_CAP).unwrap();
        assert_eq!(d.get(&vec![0, 0]), Some(&rat(1, 1)));
        assert!(p.distribution(&Intervention::single("X", "2"), DEFAULT_BIT_CAP).is_err());
    }

    #[test]
    fn quarter_quarter_half() {
        let sig = Signature::uniform(&["K"], 3);
        let p = SimProgram::new(
            sig,
            2,
            vec![
                Instr::ReadBit(0),
                Instr::ReadBit(1),
                Instr::Write { var: 0, expr: Expr::Table { inputs: vec![Operand::Reg(0), Operand::Reg(1)], values: vec![0, 1, 2, 2] } },
            ],
        )
        .unwrap();
        let d = p.distribution(&Intervention::top(), DEFAULT_BIT_CAP).unwrap();
        assert_eq!(d.values().cloned().collect::<Vec<_>>(), vec![rat(1, 4), rat(1, 4), rat(1, 2)]);
    }

    #[test]
    fn conditional_read() {
        // A second bit is drawn only when the first is 0.
        let sig = Signature::binary(&["K"]);
        let p = SimProgram::new(
            sig,
            2,
            vec![
                Instr::ReadBit(0),
                Instr::IfGoto { reg: 0, offset: 2 },
                Instr::ReadBit(0),
                Instr::Write { var: 0, expr: Expr::Read(Operand::Reg(0)) },
            ],
        )
        .unwrap();
        let d = p.distribution(&Intervention::top(), DEFAULT_BIT_CAP).unwrap();
        assert_eq!(d.get(&vec![1]), Some(&rat(3, 4)));
        assert_eq!(p.run(&[true, false]).unwrap(), vec![1]);
    }

    #[test]
    fn structural_violations() {
        let sig = Signature::binary(&["X"]);
        let write = |e| Instr::Write { var: 0, expr: e };
        assert!(SimProgram::new(sig.clone(), 0, vec![write(Expr::Read(Operand::Reg(0)))]).is_err());
        assert!(SimProgram::new(sig.clone(), 0, vec![Instr::ReadBit(0), write(Expr::Value(0))]).is_err());
        assert!(SimProgram::new(sig.clone(), 1, vec![write(Expr::Value(0)), write(Expr::Value(1))]).is_err());
        assert!(SimProgram::new(sig.clone(), 1, vec![Instr::ReadBit(0), Instr::IfGoto { reg: 0, offset: 0 }, write(Expr::Value(0))]).is_err());
        assert!(SimProgram::new(sig.clone(), 1, vec![]).is_err());
        let branchy = vec![
            Instr::ReadBit(0),
            Instr::IfGoto { reg: 0, offset: 3 },
            write(Expr::Value(0)),
            Instr::IfGoto { reg: 0, offset: 2 },
            write(Expr::Value(1)),
        ];
        assert!(SimProgram::new(sig, 1, branchy).is_err());
    }

    #[test]
    fn compile_matches_model() {
        let m1 = fixtures::prop2_m1();
        let c = compile_scm(&m1, None, DEFAULT_BIT_CAP).unwrap();
        assert_eq!(c.tv_bound, Rat::zero());
        assert_eq!(c.program, copy_program());
        let mut all = vec![Intervention::top()];
        all.extend(single_interventions(m1.signature()));
        assert_eq!(all.len(), 5);
        assert_eq!(equiv_check(&c.program, &m1, &all, DEFAULT_BIT_CAP).unwrap(), None);

        let diff = equiv_check(&c.program, &fixtures::prop2_m2(), &[Intervention::single("X", "1")], DEFAULT_BIT_CAP).unwrap().unwrap();
        assert_eq!(diff.instantiation, vec![("X".into(), "1".into()), ("Y".into(), "0".into())]);
        assert_eq!((diff.program, diff.model), (Rat::zero(), rat(1, 2)));
    }

    #[test]
    fn point_mass_reads_nothing() {
        let sig = Signature::binary(&["X"]);
        let m = Scm::from_fn(sig, ExoSpace::point(), vec![vec![]], |_, _, _| 1).unwrap();
        let c = compile_scm(&m, None, DEFAULT_BIT_CAP).unwrap();
        assert_eq!(c.program.bit_bound(), 0);
        assert!(!c.program.instructions().iter().any(|i| matches!(i, Instr::ReadBit(_))));
    }

    #[test]
    fn non_dyadic_weights() {
        let m = fixtures::prop3_m1();
        assert!(matches!(compile_scm(&m, None, DEFAULT_BIT_CAP), Err(Error::NonDyadic(_))));
        let c = compile_scm(&m, Some(6), DEFAULT_BIT_CAP).unwrap();
        // Six points of weight 1/6 on 64 slots: four get 11, two get 10.
        assert_eq!(c.tv_bound, (rat(4, 1) * (rat(11, 64) - rat(1, 6)) + rat(2, 1) * (rat(1, 6) - rat(10, 64))) / rat(2, 1));
        let d = c.program.distribution(&Intervention::top(), DEFAULT_BIT_CAP).unwrap();
        assert_eq!(d.values().fold(Rat::zero(), |a, b| a + b), Rat::one());
    }

    #[test]
    fn tabulation_round_trip() {
        let p = copy_program();
        let m = p.tabulate(DEFAULT_BIT_CAP).unwrap();
        let mut all = vec![Intervention::top()];
        all.extend(single_interventions(m.signature()));
        assert_eq!(equiv_check(&p, &m, &all, DEFAULT_BIT_CAP).unwrap(), None);
        let back = compile_scm(&m, None, DEFAULT_BIT_CAP).unwrap().program;
        assert_eq!(equiv_check(&back, &m, &all, DEFAULT_BIT_CAP).unwrap(), None);
    }
}
