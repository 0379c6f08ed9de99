//! The `causalog` command line.
//!
//! Results go to standard output as `key: value` lines; diagnostics go to
//! standard error. Exit status 0 means an affirmative answer (true, SAT,
//! VALID, accepted), 1 a negative one, 2 an undecided one and 3 a usage or
//! input error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use causalog_core::axioms::{check_proof, generate_schema, Link, Params, ProofVerdict, Schema, System};
use causalog_core::baselogic::Limits;
use causalog_core::formula::{desugar, parse, parse_event, parse_formula, parse_term, Event, Formula, Intervention, Parsed, Prop};
use causalog_core::graph::{Dag, DoSets};
use causalog_core::num::fmt_rat;
use causalog_core::realsolve::{export_nra, PolySystem, Verdict};
use causalog_core::sat::{decide_sat_with, decide_valid_with, Executor, NraOracle, SatConfig, SatStats, SatVerdict, SatWitness, Sequential, ValidVerdict};
use causalog_core::scm::Scm;
use causalog_core::semantics::Evaluator;
use causalog_core::signature::Signature;
use causalog_core::simprog::{compile_scm, equiv_check, single_interventions, SimProgram, DEFAULT_BIT_CAP};
use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::exec::Parallel;
use crate::graph_file::parse_graph;
use crate::program_file::{parse_program, write_program};
use crate::proof_file::parse_proof;
use crate::scm_file::{parse_scm, write_scm};
use crate::text::{parse_assignment, parse_names};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "causalog", version, about = "Probabilistic causal reasoning: model checking, satisfiability, proofs and simulation programs")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Reject formulas above this level of the hierarchy.
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub level: Option<u8>,
    /// Cap on the Δ-atoms enumerated per variable order.
    #[arg(long, global = true)]
    pub max_atoms: Option<usize>,
    /// Cap on the number of variable orders.
    #[arg(long, global = true)]
    pub max_orders: Option<usize>,
    /// Work per nonlinear branch: local-search iterations and relaxation nodes.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Seed for the local search.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for satisfiability branches.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Variable domains, as `X: 0, 1; Y: a, b, c`.
    #[arg(long, global = true)]
    pub sig: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a formula or base formula and print its structure and level.
    Parse { formula: String },
    /// Model-check a formula against a model file.
    Check { model: PathBuf, formula: String },
    /// Evaluate a term or the probability of a base formula in a model.
    Prob { model: PathBuf, expr: String },
    /// Decide satisfiability.
    Sat {
        formula: String,
        /// Write the nonlinear systems left undecided as SMT-LIB.
        #[arg(long)]
        export_nra: Option<PathBuf>,
        /// Write the witness model here instead of printing it.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Decide validity.
    Valid {
        formula: String,
        /// Write the counter-model here instead of printing it.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Test d-separation of X and Y given Z.
    Dsep {
        graph: PathBuf,
        x: String,
        y: String,
        z: String,
        /// Remove edges into these nodes first.
        #[arg(long, default_value = "")]
        overline: String,
        /// Remove edges out of these nodes first.
        #[arg(long, default_value = "")]
        underline: String,
    },
    /// Check a do-calculus premise and list the licensed equations.
    Docalc {
        graph: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        rule: u8,
        #[arg(long, default_value = "")]
        x: String,
        #[arg(long, default_value = "")]
        y: String,
        #[arg(long, default_value = "")]
        z: String,
        #[arg(long, default_value = "")]
        w: String,
        /// Print every instance of the rule when the premise holds.
        #[arg(long)]
        instances: bool,
    },
    /// Check a proof file.
    Prove {
        proof: PathBuf,
        /// Override the system named in the file.
        #[arg(long)]
        system: Option<String>,
    },
    /// Simulation programs.
    Sim {
        #[command(subcommand)]
        command: SimCommand,
    },
    /// Print an instance of an axiom schema.
    GenAxiom { name: String, params: String },
}

#[derive(Subcommand, Debug)]
pub enum SimCommand {
    /// Run a program on a tape such as `0110`.
    Run {
        program: PathBuf,
        bits: String,
        #[arg(long = "do", default_value = "")]
        intervention: String,
    },
    /// Exact distribution of a program.
    Dist {
        program: PathBuf,
        #[arg(long = "do", default_value = "")]
        intervention: String,
    },
    /// Compare a program with a model under interventions (default: none
    /// and every single-variable intervention).
    Equiv {
        program: PathBuf,
        model: PathBuf,
        #[arg(long = "do")]
        interventions: Vec<String>,
    },
    /// Compile a model into a program.
    Compile {
        model: PathBuf,
        /// Round non-dyadic weights to this many bits.
        #[arg(long)]
        approx_bits: Option<u32>,
    },
    /// The model obtained by tabulating a program over its tapes.
    Tabulate { program: PathBuf },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::{DisplayHelp, DisplayVersion};
            let text = e.render().to_string();
            return if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                let _ = write!(out, "{text}");
                EXIT_YES
            } else {
                let _ = write!(err, "{text}");
                EXIT_ERROR
            };
        }
    };
    let mut buf = String::new();
    match execute(&cli, &mut buf) {
        Ok(code) => {
            let _ = out.write_all(buf.as_bytes());
            code
        }
        Err(e) => {
            let _ = out.write_all(buf.as_bytes());
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn line(out: &mut String, key: &str, value: impl std::fmt::Display) {
    out.push_str(&format!("{key}: {value}\n"));
}

fn inline_signature(text: &str) -> Result<Signature> {
    let mut vars = Vec::new();
    for part in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, values) = part.split_once(':').ok_or_else(|| Error::Usage(format!("expected `Name: values` in `{part}`")))?;
        vars.push((name.trim().to_string(), parse_names(values)));
    }
    Ok(Signature::new(vars)?)
}

impl Options {
    fn signature(&self) -> Result<Option<Signature>> {
        self.sig.as_deref().map(inline_signature).transpose()
    }

    fn limits(&self) -> Limits {
        let mut l = Limits::default();
        if let Some(n) = self.max_atoms {
            l.max_atoms = n;
        }
        if let Some(n) = self.max_orders {
            l.max_orders = n;
        }
        l
    }

    fn check_level(&self, f: &Formula) -> Result<()> {
        match self.level {
            Some(max) if f.level() > max => Err(Error::Usage(format!("formula has level {}, above --level {max}", f.level()))),
            _ => Ok(()),
        }
    }

    fn sat_config(&self, sig: Option<Signature>) -> SatConfig {
        let mut cfg = SatConfig { signature: sig, limits: self.limits(), max_level: self.level, ..SatConfig::default() };
        cfg.search.seed = self.seed;
        if let Some(b) = self.budget {
            cfg.search.iterations = b;
            cfg.relax.max_nodes = b;
        }
        cfg
    }

    fn executor(&self) -> Result<Box<dyn Executor>> {
        match self.jobs {
            Some(n) if n > 1 => Ok(Box::new(Parallel::new(n).map_err(|e| Error::Usage(e.to_string()))?)),
            _ => Ok(Box::new(Sequential)),
        }
    }
}

/// Records the systems handed to it and leaves them undecided.
#[derive(Default)]
struct Recorder {
    systems: Mutex<Vec<String>>,
}

impl NraOracle for Recorder {
    fn decide(&self, s: &PolySystem) -> Verdict {
        self.systems.lock().expect("recorder lock").push(export_nra(s));
        Verdict::Unknown
    }
}

fn model(path: &Path) -> Result<Scm> {
    parse_scm(&read(path)?).map_err(|e| with_path(path, e))
}

fn program(path: &Path) -> Result<SimProgram> {
    parse_program(&read(path)?).map_err(|e| with_path(path, e))
}

fn graph(path: &Path) -> Result<Dag> {
    parse_graph(&read(path)?).map_err(|e| with_path(path, e))
}

fn with_path(path: &Path, e: Error) -> Error {
    Error::Usage(format!("{}: {e}", path.display()))
}

fn execute(cli: &Cli, out: &mut String) -> Result<i32> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Parse { formula } => {
            let sig = opts.signature()?;
            match parse(formula, sig.as_ref())? {
                Parsed::Formula(f) => {
                    opts.check_level(&f)?;
                    line(out, "kind", "formula");
                    line(out, "level", f.level());
                    line(out, "text", &f);
                    line(out, "desugared", desugar(&f));
                    line(out, "ast", format!("{f:?}"));
                }
                Parsed::Event(e) => {
                    line(out, "kind", "base");
                    line(out, "level", e.level());
                    line(out, "text", &e);
                    line(out, "ast", format!("{e:?}"));
                }
            }
            Ok(EXIT_YES)
        }
        Command::Check { model: path, formula } => {
            let m = model(path)?;
            let f = parse_formula(formula, Some(m.signature()))?;
            opts.check_level(&f)?;
            let holds = Evaluator::new(&m)?.check(&f)?;
            line(out, "holds", holds);
            Ok(if holds { EXIT_YES } else { EXIT_NO })
        }
        Command::Prob { model: path, expr } => {
            let m = model(path)?;
            let mut ev = Evaluator::new(&m)?;
            let value = match parse_term(expr, Some(m.signature())) {
                Ok(t) => ev.term(&t)?,
                Err(term_err) => match parse_event(expr, Some(m.signature())) {
                    Ok(e) => ev.prob(&e)?,
                    Err(_) => return Err(term_err.into()),
                },
            };
            line(out, "value", fmt_rat(&value));
            Ok(EXIT_YES)
        }
        Command::Sat { formula, export_nra, witness } => {
            let sig = opts.signature()?;
            let f = parse_formula(formula, sig.as_ref())?;
            let cfg = opts.sat_config(sig);
            let recorder = Recorder::default();
            let oracle: Option<&dyn NraOracle> = export_nra.as_ref().map(|_| &recorder as &dyn NraOracle);
            let r = decide_sat_with(&f, &cfg, opts.executor()?.as_ref(), oracle)?;
            if let Some(path) = export_nra {
                let mut systems = recorder.systems.into_inner().expect("recorder lock");
                systems.sort();
                systems.dedup();
                write_file(path, &systems.join("(reset)\n"))?;
                line(out, "nra_exported", systems.len());
            }
            let code = match &r.verdict {
                SatVerdict::Sat(_) => EXIT_YES,
                SatVerdict::Unsat => EXIT_NO,
                SatVerdict::Unknown(_) => EXIT_UNKNOWN,
            };
            let name = match &r.verdict {
                SatVerdict::Sat(_) => "SAT",
                SatVerdict::Unsat => "UNSAT",
                SatVerdict::Unknown(_) => "UNKNOWN",
            };
            line(out, "verdict", name);
            if let SatVerdict::Unknown(reason) = &r.verdict {
                line(out, "reason", reason);
            }
            stats(out, &r.stats);
            if let SatVerdict::Sat(w) = &r.verdict {
                emit_witness(out, w, witness.as_deref())?;
            }
            Ok(code)
        }
        Command::Valid { formula, witness } => {
            let sig = opts.signature()?;
            let f = parse_formula(formula, sig.as_ref())?;
            let cfg = opts.sat_config(sig);
            let r = decide_valid_with(&f, &cfg, opts.executor()?.as_ref(), None)?;
            let code = match &r.verdict {
                ValidVerdict::Valid => {
                    line(out, "verdict", "VALID");
                    EXIT_YES
                }
                ValidVerdict::Invalid(_) => {
                    line(out, "verdict", "INVALID");
                    EXIT_NO
                }
                ValidVerdict::Unknown(reason) => {
                    line(out, "verdict", "UNKNOWN");
                    line(out, "reason", reason);
                    EXIT_UNKNOWN
                }
            };
            stats(out, &r.stats);
            if let ValidVerdict::Invalid(w) = &r.verdict {
                emit_witness(out, w, witness.as_deref())?;
            }
            Ok(code)
        }
        Command::Dsep { graph: path, x, y, z, overline, underline } => {
            let g = graph(path)?.mutilate(&parse_names(overline), &parse_names(underline))?;
            let sep = g.d_separated(&parse_names(x), &parse_names(y), &parse_names(z))?;
            line(out, "dseparated", sep);
            Ok(if sep { EXIT_YES } else { EXIT_NO })
        }
        Command::Docalc { graph: path, rule, x, y, z, w, instances } => {
            let g = graph(path)?;
            let names = |s: &str| parse_names(s);
            let (xs, ys, zs, ws) = (names(x), names(y), names(z), names(w));
            let sets = DoSets::new(&refs(&xs), &refs(&ys), &refs(&zs), &refs(&ws));
            let holds = g.docalc_premise(*rule, &sets)?;
            line(out, "premise", holds);
            if holds && *instances {
                let sig = match opts.signature()? {
                    Some(s) => s,
                    None => Signature::binary(&g.names().iter().map(String::as_str).collect::<Vec<_>>()),
                };
                for f in g.docalc_instances(&sig, *rule, &sets)? {
                    line(out, "instance", f);
                }
            }
            Ok(if holds { EXIT_YES } else { EXIT_NO })
        }
        Command::Prove { proof, system } => {
            let p = parse_proof(&read(proof)?).map_err(|e| with_path(proof, e))?;
            let system = match system {
                Some(s) => System::from_name(s).ok_or_else(|| Error::Usage(format!("unknown system `{s}`")))?,
                None => p.system,
            };
            line(out, "system", system);
            line(out, "lines", p.lines.len());
            match check_proof(&p.lines, &p.assumptions, system, p.signature.as_ref(), &opts.limits())? {
                ProofVerdict::Accepted => {
                    line(out, "verdict", "ACCEPTED");
                    if let Some(last) = p.lines.last() {
                        line(out, "conclusion", &last.formula);
                    }
                    Ok(EXIT_YES)
                }
                ProofVerdict::Rejected { line: n, reason } => {
                    line(out, "verdict", "REJECTED");
                    line(out, "line", n);
                    line(out, "reason", reason);
                    Ok(EXIT_NO)
                }
            }
        }
        Command::Sim { command } => sim(command, out),
        Command::GenAxiom { name, params } => gen_axiom(opts, name, params, out),
    }
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn stats(out: &mut String, s: &SatStats) {
    line(out, "clauses", s.clauses);
    line(out, "branches", s.branches);
    line(out, "atoms", s.atoms);
    line(out, "max_groups", s.max_groups);
    line(out, "linear_systems", s.linear_systems);
    line(out, "nonlinear_systems", s.nonlinear_systems);
    line(out, "refuted_linear", s.refuted_linear);
    line(out, "refuted_relaxation", s.refuted_relaxation);
    line(out, "refuted_oracle", s.refuted_oracle);
    line(out, "unknown_branches", s.unknown_branches);
}

fn emit_witness(out: &mut String, w: &SatWitness, path: Option<&Path>) -> Result<()> {
    line(out, "order", w.order.join(" < "));
    line(out, "support", w.support.len());
    line(out, "support_bound", w.bound);
    for (e, p) in &w.support {
        line(out, "atom", format!("{} @ {}", fmt_rat(p), e));
    }
    let text = write_scm(&w.model);
    match path {
        Some(p) => {
            write_file(p, &text)?;
            line(out, "witness", p.display());
        }
        None => {
            out.push_str("witness:\n");
            out.push_str(&text);
        }
    }
    Ok(())
}

fn describe(sig: &Signature, inst: &[usize]) -> String {
    inst.iter().enumerate().map(|(v, &x)| format!("{}={}", sig.name(v), sig.domain(v)[x])).collect::<Vec<_>>().join(",")
}

fn sim(cmd: &SimCommand, out: &mut String) -> Result<i32> {
    match cmd {
        SimCommand::Run { program: path, bits, intervention } => {
            let p = program(path)?;
            let i = parse_assignment(intervention, Some(p.signature()))?;
            let tape: Vec<bool> = bits
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::Usage(format!("`{c}` is not a bit"))),
                })
                .collect::<Result<_>>()?;
            let inst = p.intervene(&i)?.run(&tape)?;
            for (v, &x) in inst.iter().enumerate() {
                line(out, p.signature().name(v), &p.signature().domain(v)[x]);
            }
            Ok(EXIT_YES)
        }
        SimCommand::Dist { program: path, intervention } => {
            let p = program(path)?;
            let i = parse_assignment(intervention, Some(p.signature()))?;
            for (inst, q) in p.distribution(&i, DEFAULT_BIT_CAP)? {
                line(out, &describe(p.signature(), &inst), fmt_rat(&q));
            }
            Ok(EXIT_YES)
        }
        SimCommand::Equiv { program: path, model: mpath, interventions } => {
            let p = program(path)?;
            let m = model(mpath)?;
            let list: Vec<Intervention> = if interventions.is_empty() {
                std::iter::once(Intervention::top()).chain(single_interventions(m.signature())).collect()
            } else {
                interventions.iter().map(|s| parse_assignment(s, Some(m.signature()))).collect::<causalog_core::Result<_>>()?
            };
            line(out, "interventions", list.len());
            match equiv_check(&p, &m, &list, DEFAULT_BIT_CAP)? {
                None => {
                    line(out, "equivalent", true);
                    Ok(EXIT_YES)
                }
                Some(d) => {
                    line(out, "equivalent", false);
                    line(out, "intervention", &d.intervention);
                    let inst: Vec<String> = d.instantiation.iter().map(|(v, x)| format!("{v}={x}")).collect();
                    line(out, "instantiation", inst.join(","));
                    line(out, "program", fmt_rat(&d.program));
                    line(out, "model", fmt_rat(&d.model));
                    Ok(EXIT_NO)
                }
            }
        }
        SimCommand::Compile { model: path, approx_bits } => {
            let m = model(path)?;
            let c = compile_scm(&m, *approx_bits, DEFAULT_BIT_CAP)?;
            line(out, "tv_bound", fmt_rat(&c.tv_bound));
            out.push_str("program:\n");
            out.push_str(&write_program(&c.program));
            Ok(EXIT_YES)
        }
        SimCommand::Tabulate { program: path } => {
            let m = program(path)?.tabulate(DEFAULT_BIT_CAP)?;
            out.push_str("model:\n");
            out.push_str(&write_scm(&m));
            Ok(EXIT_YES)
        }
    }
}

fn prop_of(text: &str, sig: Option<&Signature>) -> Result<Prop> {
    match parse_event(text, sig)? {
        Event::Cond(a, p) if a.is_top() => Ok(p),
        _ => Err(Error::Usage(format!("`{text}` is not a formula over the variables"))),
    }
}

/// Parameters are separated by `;`. See the README for each schema's
/// layout.
fn schema_params(schema: Schema, text: &str, sig: Option<&Signature>) -> Result<Params> {
    let parts: Vec<&str> = text.split(';').map(str::trim).collect();
    let usage = |what: &str| Error::Usage(format!("{schema} takes {what}"));
    Ok(match schema {
        Schema::Def => match parts.as_slice() {
            [var] => Params::Def { var: var.to_string(), alpha: Intervention::top() },
            [var, alpha] => Params::Def { var: var.to_string(), alpha: parse_assignment(alpha, sig)? },
            _ => return Err(usage("`X` or `X; A=a, ...`")),
        },
        Schema::NonNeg | Schema::Add | Schema::Dist => {
            Params::Events(parts.iter().map(|p| parse_event(p, sig)).collect::<causalog_core::Result<_>>()?)
        }
        Schema::Add2 => match parts.as_slice() {
            [alpha, beta, gamma] => Params::Add2 { alpha: parse_assignment(alpha, sig)?, beta: prop_of(beta, sig)?, gamma: prop_of(gamma, sig)? },
            _ => return Err(usage("`A=a, ...; beta; gamma`")),
        },
        Schema::ProbRec => {
            let mut chain = Vec::new();
            for part in parts {
                let (alpha, rest) = match part.strip_prefix('[') {
                    Some(s) => {
                        let (a, r) = s.split_once(']').ok_or_else(|| usage("links `[A=a] X from to next`"))?;
                        (parse_assignment(a, sig)?, r)
                    }
                    None => (Intervention::top(), part),
                };
                match rest.split_whitespace().collect::<Vec<_>>().as_slice() {
                    [var, from, to, next] => chain.push(Link {
                        alpha,
                        var: var.to_string(),
                        from: from.to_string(),
                        to: to.to_string(),
                        next_value: next.to_string(),
                    }),
                    _ => return Err(usage("links `[A=a] X from to next`")),
                }
            }
            Params::Chain(chain)
        }
        Schema::ProbRec2 => Params::Vars(parse_names(text)),
        Schema::IncExc => Params::Values(parse_assignment(text, sig)?),
        Schema::Bool => return Err(Error::Usage("Bool has no parameters to instantiate; any tautology is an instance".into())),
        _ => Params::Terms(parts.iter().map(|p| parse_term(p, sig)).collect::<causalog_core::Result<_>>()?),
    })
}

fn gen_axiom(opts: &Options, name: &str, params: &str, out: &mut String) -> Result<i32> {
    let schema = Schema::from_name(name).ok_or_else(|| Error::Usage(format!("unknown schema `{name}`")))?;
    let mut sig = opts.signature()?;
    let p = schema_params(schema, params, sig.as_ref())?;
    if sig.is_none() && matches!(schema, Schema::ProbRec2 | Schema::Def) {
        let vars: Vec<String> = match &p {
            Params::Vars(v) => v.clone(),
            Params::Def { var, .. } => vec![var.clone()],
            _ => unreachable!("matched above"),
        };
        sig = Some(Signature::binary(&vars.iter().map(String::as_str).collect::<Vec<_>>()));
    }
    line(out, "schema", schema);
    match generate_schema(schema, &p, sig.as_ref())? {
        Parsed::Formula(f) => {
            line(out, "level", f.level());
            line(out, "formula", f);
        }
        Parsed::Event(e) => {
            line(out, "level", e.level());
            line(out, "event", e);
        }
    }
    Ok(EXIT_YES)
}
