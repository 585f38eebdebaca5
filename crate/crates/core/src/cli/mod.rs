//! Command-line front end: TOML instances in, JSON reports out.
//!
//! Exit codes: 0 when every verdict is True (or the command has none), 1 when
//! some verdict is False or Unknown, 2 on input errors.

pub mod convergents;
pub mod input;
pub mod suite;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::arakelov::{plucker_report, ub_height_algebraic, ub_height_rational, HermitianStructure, DEFAULT_MAX_PLUCKER};
use crate::combinatorics::{
    big_r, count_points, mu, t_qn, vol_lower, vol_upper, zeta1_integral_lower, zeta1_integral_upper, MultiDegree, Side,
    DEFAULT_LATTICE_LIMIT,
};
use crate::exactnum::rational::format_rational;
use crate::exactnum::{embeddings, RealBall, Verdict};
use crate::git::{instab_kernel_closed_form, instab_subspace, ss_condition};
use crate::heights::{distance_v, height, proximity_v};
use crate::melb::{main_theorem_sides, melb_sides, param_pipeline};
use crate::sections::{dyson_check, index, kernel_conjugates, kernel_single, Weight};
use crate::wronskian::two_weight_dyson;
use crate::{Error, Result};

pub use convergents::{generate_convergents, ConvergentCorpus};
use input::*;

#[derive(Debug, Parser)]
#[command(name = "rothcheck", version, about = "Exact and ball-rigorous checks of effective Diophantine approximation inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Instance file (TOML).
    #[arg(long, global = true, env = "ROTHCHECK_INPUT")]
    pub input: Option<PathBuf>,
    /// Report file (JSON); stdout when absent.
    #[arg(long, global = true, env = "ROTHCHECK_OUTPUT")]
    pub output: Option<PathBuf>,
    /// Working precision in bits, at least 32.
    #[arg(long, global = true, default_value_t = 128, env = "ROTHCHECK_PRECISION")]
    pub precision: u32,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 0, env = "ROTHCHECK_SEED")]
    pub seed: u64,
    /// Cap on enumerated lattice points.
    #[arg(long, global = true, default_value_t = DEFAULT_LATTICE_LIMIT, env = "ROTHCHECK_MAX_LATTICE")]
    pub max_lattice: u128,
    /// Cap on enumerated Pluecker coordinates.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_PLUCKER, env = "ROTHCHECK_MAX_PLUCKER")]
    pub max_plucker: u128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Absolute logarithmic height of a point of P¹.
    Height,
    /// v-adic distance and proximity of two points.
    Distance,
    /// Volumes, μₙ and the thresholds t_{q,n}, R_{q,n}.
    Combi,
    /// Weighted index of a section at a point.
    Index,
    /// Kernel of sections vanishing to a given index.
    Kernel,
    /// Instability coefficient of a kernel under a one-parameter subgroup.
    Instab,
    /// Semi-stability condition for (t_a, t_x).
    SsCheck,
    /// Two-weight Dyson inequality on P¹ × P¹.
    Dyson2,
    /// Dyson inequality for several points.
    DysonN,
    /// Effective lower bound on an approximation instance.
    Melb,
    /// Comparison inequality on an approximation instance.
    MainThm,
    /// Pluecker height of a kernel against its upper bound.
    Plucker,
    /// Runs every acceptance criterion.
    Suite,
}

impl Command {
    pub const ALL: [Command; 13] = [
        Command::Height,
        Command::Distance,
        Command::Combi,
        Command::Index,
        Command::Kernel,
        Command::Instab,
        Command::SsCheck,
        Command::Dyson2,
        Command::DysonN,
        Command::Melb,
        Command::MainThm,
        Command::Plucker,
        Command::Suite,
    ];

    pub fn from_name(name: &str) -> Result<Command> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown command {name:?}")))
    }

    /// The subcommand as typed on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Command::Height => "height",
            Command::Distance => "distance",
            Command::Combi => "combi",
            Command::Index => "index",
            Command::Kernel => "kernel",
            Command::Instab => "instab",
            Command::SsCheck => "ss-check",
            Command::Dyson2 => "dyson2",
            Command::DysonN => "dyson-n",
            Command::Melb => "melb",
            Command::MainThm => "main-thm",
            Command::Plucker => "plucker",
            Command::Suite => "suite",
        }
    }
}

/// Settings shared by all commands.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub input: Option<PathBuf>,
    /// TOML text used instead of reading `input`.
    pub input_text: Option<String>,
    pub output: Option<PathBuf>,
    pub precision: u32,
    pub seed: u64,
    pub max_lattice: u128,
    pub max_plucker: u128,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<RunConfig> {
        if cli.precision < 32 {
            return Err(Error::InvalidInput(format!("precision {} is below 32 bits", cli.precision)));
        }
        let command = cli.command.name().to_string();
        Ok(RunConfig {
            command,
            input: cli.input.clone(),
            input_text: None,
            output: cli.output.clone(),
            precision: cli.precision,
            seed: cli.seed,
            max_lattice: cli.max_lattice,
            max_plucker: cli.max_plucker,
        })
    }
}

/// A report together with the verdicts it carries.
pub struct Outcome {
    pub report: Value,
    /// (check name, verdict) for every decided inequality.
    pub verdicts: Vec<(String, Verdict)>,
}

impl Outcome {
    fn plain(report: Value) -> Outcome {
        Outcome { report, verdicts: Vec::new() }
    }

    fn with(report: impl Serialize, verdicts: Vec<(String, Verdict)>) -> Outcome {
        Outcome { report: to_value(report), verdicts }
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(!self.verdicts.iter().all(|(_, v)| v.is_true()))
    }
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn read_input<T: serde::de::DeserializeOwned>(cfg: &RunConfig) -> Result<T> {
    if let Some(text) = &cfg.input_text {
        return toml::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()));
    }
    let path = cfg.input.as_ref().ok_or_else(|| Error::InvalidInput("--input is required for this command".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

/// Runs one command; errors are input or hypothesis errors (exit code 2).
pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outcome> {
    let prec = cfg.precision;
    match command {
        Command::Height => {
            let inp: HeightInput = read_input(cfg)?;
            let field = inp.field()?;
            let p = inp.point.to_point(field.as_ref())?;
            Ok(Outcome::plain(json!({ "check": "height", "point": p, "height": height(&p, prec)? })))
        }
        Command::Distance => {
            let inp: DistanceInput = read_input(cfg)?;
            let field = inp.field()?;
            let v = parse_place(&inp.place)?;
            let (x, y) = (inp.x.to_point(field.as_ref())?, inp.y.to_point(field.as_ref())?);
            let emb = match &field {
                Some(k) => {
                    let all = embeddings(k, &v, prec)?.embeddings;
                    let i = inp.embedding.unwrap_or(0);
                    Some(all.get(i).cloned().ok_or_else(|| Error::InvalidInput(format!("embedding {i} out of range")))?)
                }
                None => None,
            };
            let lx = x.localize(emb.as_ref(), &v, prec)?;
            let ly = y.localize(emb.as_ref(), &v, prec)?;
            let d = distance_v(&lx, &ly, &v, prec)?;
            let m = match proximity_v(&lx, &ly, &v, prec) {
                Ok(m) => to_value(m),
                Err(Error::DistanceZero) => json!("+inf"),
                Err(e) => return Err(e),
            };
            Ok(Outcome::plain(json!({
                "check": "distance", "place": v, "embedding": emb.map(|e| e.index()), "distance": d, "proximity": m
            })))
        }
        Command::Combi => {
            let inp: CombiInput = read_input(cfg)?;
            let t = inp.t.value()?;
            let n = inp.n;
            let mut rep = json!({
                "check": "cube-volumes",
                "n": n,
                "t": format_rational(&t),
                "vol_lower": format_rational(&vol_lower(n, &t)?),
                "vol_upper": format_rational(&vol_upper(n, &t)?),
                "mu": format_rational(&mu(n, &t)?),
                "zeta1_integral_lower": format_rational(&zeta1_integral_lower(n, &t)?),
                "zeta1_integral_upper": format_rational(&zeta1_integral_upper(n, &t)?),
            });
            if let (Some(q), Some(delta)) = (inp.q, &inp.delta) {
                let delta = delta.value()?;
                rep["t_qn"] = to_value(t_qn(q, n, &delta, prec)?);
                if q >= 2 && n >= 2 && delta > num_traits::Zero::zero() {
                    rep["big_r"] = to_value(big_r(q, n, &delta, prec)?);
                }
            }
            Ok(Outcome::plain(rep))
        }
        Command::Index => {
            let inp: IndexInput = read_input(cfg)?;
            let field = inp.field()?;
            let r = MultiDegree::new(inp.r.clone())?;
            let f = section(&r, &inp.terms)?;
            let z = points(&inp.points, field.as_ref())?;
            let b = match &inp.weight {
                Some(w) => Weight::new(rationals(w)?)?,
                None => Weight::reciprocal(&r),
            };
            let ind = index(&f, &z, &b)?;
            Ok(Outcome::plain(json!({ "check": "weighted-index", "section": f, "weight": b, "index": ind })))
        }
        Command::Kernel => {
            let inp: KernelInput = read_input(cfg)?;
            let field = inp.field()?;
            let r = MultiDegree::new(inp.r.clone())?;
            let t = inp.t.value()?;
            let z = points(&inp.points, field.as_ref())?;
            let w = if inp.conjugates { kernel_conjugates(&z, &r, &t)? } else { kernel_single(&z, &r, &t)? };
            let lower = count_points(&r, &t, Side::Lower, cfg.max_lattice)?;
            let upper = count_points(&r, &t, Side::Upper, cfg.max_lattice)?;
            let q = field.as_ref().map_or(1, |k| k.degree() as u128);
            let (expected, verdict) = if inp.conjugates {
                let bound = r.box_size() as i128 - (q * lower) as i128;
                (json!({ "at_least": bound.to_string() }), Verdict::from_bool(w.dim() as i128 >= bound))
            } else {
                (json!({ "exactly": upper.to_string() }), Verdict::from_bool(w.dim() as u128 == upper))
            };
            let rep = json!({
                "check": "kernel-dimension",
                "dim": w.dim(),
                "ambient_dim": w.ambient_dim(),
                "expected": expected,
                "basis": w.sections(),
                "verdict": verdict,
            });
            Ok(Outcome { report: rep, verdicts: vec![("kernel-dimension".into(), verdict)] })
        }
        Command::Instab => {
            let inp: InstabInput = read_input(cfg)?;
            let r = MultiDegree::new(inp.r.clone())?;
            let t = inp.t.value()?;
            let z = points(&inp.points, None)?;
            let lambda = inp.subgroup()?;
            let w = kernel_single(&z, &r, &t)?;
            let rep = instab_subspace(&lambda, &w)?;
            let closed = instab_kernel_closed_form(&lambda, &z, &r, &t)?;
            let agree = Verdict::from_bool(rep.mu == closed);
            let report = json!({
                "check": "kernel-instability-coefficient",
                "chi": lambda.chi(&z)?,
                "filtration": rep,
                "closed_form": closed.to_string(),
                "agree": agree,
                "nonnegative": rep.mu >= 0,
            });
            Ok(Outcome { report, verdicts: vec![("instability-routes-agree".into(), agree)] })
        }
        Command::SsCheck => {
            let inp: SsInput = read_input(cfg)?;
            let r = MultiDegree::new(inp.r.clone())?;
            let wp = prec + 16;
            let t_a = match (&inp.t_a, &inp.delta) {
                (Some(t), _) => RealBall::exact(t.value()?, wp),
                (None, Some(d)) => t_qn(inp.q, r.n(), &d.value()?, wp)?,
                (None, None) => return Err(Error::InvalidInput("give t_a or delta".into())),
            };
            let t_x = RealBall::exact(inp.t_x.value()?, wp);
            let verdict = ss_condition(inp.q, &r, &t_a, &t_x, wp)?;
            let report = json!({ "check": "semi-stability-condition", "q": inp.q, "r": r, "t_a": t_a, "t_x": t_x, "verdict": verdict });
            Ok(Outcome { report, verdicts: vec![("semi-stability-condition".into(), verdict)] })
        }
        Command::Dyson2 => {
            let inp: Dyson2Input = read_input(cfg)?;
            let field = inp.field()?;
            let r = MultiDegree::new(inp.r.clone())?;
            let f = section(&r, &inp.terms)?;
            let targets = inp.targets.iter().map(|z| points(z, field.as_ref())).collect::<Result<Vec<_>>>()?;
            let y = points(&inp.y, None)?;
            let b = Weight::new(rationals(&inp.weight)?)?;
            let rep = two_weight_dyson(&f, &targets, &y, &b)?;
            let v = rep.verdict;
            Ok(Outcome::with(&rep, vec![(rep.check.into(), v)]))
        }
        Command::DysonN => {
            let inp: DysonInput = read_input(cfg)?;
            let field = inp.field()?;
            let r = MultiDegree::new(inp.r.clone())?;
            let f = section(&r, &inp.terms)?;
            let pts = inp.points.iter().map(|z| points(z, field.as_ref())).collect::<Result<Vec<_>>>()?;
            let rep = dyson_check(&f, &pts, &r)?;
            let v = rep.verdict;
            Ok(Outcome::with(&rep, vec![(rep.check.into(), v)]))
        }
        Command::Melb => {
            let inp: InstanceInput = read_input(cfg)?;
            let inst = inp.instance()?;
            let delta = inp.delta.as_ref().ok_or_else(|| Error::InvalidInput("delta is required".into()))?.value()?;
            let rep = melb_sides(&inst, &delta, prec)?;
            let v = rep.verdict;
            Ok(Outcome::with(&rep, vec![(rep.check.into(), v)]))
        }
        Command::MainThm => {
            let inp: InstanceInput = read_input(cfg)?;
            let inst = inp.instance()?;
            let (t_a, t_x, params) = match (&inp.t_a, &inp.t_x, &inp.delta) {
                (Some(a), Some(x), _) => (RealBall::exact(a.value()?, prec), RealBall::exact(x.value()?, prec), None),
                (None, None, Some(d)) => {
                    let p = param_pipeline(inst.q(), inst.n(), &d.value()?, &inst.r, prec)?;
                    (p.t_a.clone(), RealBall::exact(p.t_x.clone(), prec), Some(p))
                }
                _ => return Err(Error::InvalidInput("give both t_a and t_x, or delta alone".into())),
            };
            let rep = main_theorem_sides(&inst, &t_a, &t_x, prec)?;
            let mut verdicts = vec![(rep.check.to_string(), rep.verdict)];
            if let Some(p) = &params {
                verdicts.push((p.check.into(), p.verdict));
            }
            Ok(Outcome { report: json!({ "parameters": params, "comparison": rep }), verdicts })
        }
        Command::Plucker => {
            let inp: KernelInput = read_input(cfg)?;
            let field = inp.field()?;
            let r = MultiDegree::new(inp.r.clone())?;
            let t = inp.t.value()?;
            let z = points(&inp.points, field.as_ref())?;
            let (w, bound) = if inp.conjugates {
                let w = kernel_conjugates(&z, &r, &t)?;
                let b = ub_height_algebraic(&z, &r, &t, Some(w.dim()), prec)?;
                (w, b)
            } else {
                (kernel_single(&z, &r, &t)?, ub_height_rational(&z, &r, &t, prec)?)
            };
            let h = HermitianStructure::new(&r);
            let rep = plucker_report(&w, &h, cfg.max_plucker, prec)?;
            let verdict = rep.height.le(&bound);
            let report = json!({ "check": "kernel-height-bound", "pluecker": rep, "bound": bound, "verdict": verdict });
            Ok(Outcome { report, verdicts: vec![("kernel-height-bound".into(), verdict)] })
        }
        Command::Suite => {
            let rep = suite::run_all(cfg.seed, prec);
            let verdicts = rep.criteria.iter().map(|c| (c.name.to_string(), Verdict::from_bool(c.passed))).collect();
            Ok(Outcome::with(&rep, verdicts))
        }
    }
}

fn write_report(cfg: &RunConfig, body: &Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(body).expect("json");
    text.push('\n');
    match &cfg.output {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    run(&cli)
}

pub fn run(cli: &Cli) -> i32 {
    let cfg = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match execute(cli.command, &cfg) {
        Ok(out) => {
            let verdict = match out.verdicts.is_empty() {
                true => Value::Null,
                false => to_value(Verdict::all(out.verdicts.iter().map(|(_, v)| *v))),
            };
            let body = json!({ "command": cfg.command, "precision": cfg.precision, "seed": cfg.seed, "verdict": verdict, "report": out.report });
            if let Err(e) = write_report(&cfg, &body) {
                eprintln!("error: cannot write report: {e}");
                return 2;
            }
            for (name, v) in &out.verdicts {
                if !v.is_true() {
                    eprintln!("{name}: {v}");
                }
            }
            out.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests;
