//! Command-line front end. Every command prints one JSON report (or an
//! indented text rendering with `--text`) and exits with 0 on success, 1
//! when a check fails and 2 on malformed input.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::copoint::{linear_rank_window, point_ext1_dim, Point, SkewContext};
use crate::error::{Error, Result};
use crate::grmod::{minimal_resolution_window, GradedMatrix, ModulePresentation};
use crate::nmf::{nmf_period, Nmf};
use crate::parse::{normal_element, AlgebraJson, ContextJson, Ext1Json, MatrixJson, ModuleJson, NmfJson, PointJson, RescaleJson, TwistJson};
use crate::ring::Ring;
use crate::twist::{eps_normalize, twist_nmf};

#[derive(Debug, Parser)]
#[command(name = "ncmf", version, about = "Exact graded matrix factorizations over presented algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Degree window for injectivity, exactness and resolutions.
    #[arg(long, global = true, default_value_t = 8)]
    pub window: usize,
    /// Largest index tried by the period search.
    #[arg(long, global = true, default_value_t = 8)]
    pub max: usize,
    /// Seed for randomized searches; NCMF_SEED takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random candidates per search.
    #[arg(long, global = true, default_value_t = 16)]
    pub trials: usize,
    /// Indented text instead of JSON.
    #[arg(long, global = true)]
    pub text: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check both product identities and injectivity on the window.
    Verify { nmf: PathBuf },
    /// Complete a pair and list components -2 through 3.
    Complete { nmf: PathBuf },
    /// Rescale components whose products are scalar multiples of f.
    Rescale { input: PathBuf },
    /// Twist a factorization by a graded automorphism fixing f.
    Twist {
        nmf: PathBuf,
        twist: PathBuf,
        /// Rescale the automorphism so that it fixes f first.
        #[arg(long)]
        normalize: bool,
    },
    /// Least index whose cokernel is a shift of the first one.
    Period { nmf: PathBuf },
    /// Minimal free resolution prefix of a presented module.
    Resolve {
        module: PathBuf,
        #[arg(long, default_value_t = 4)]
        steps: usize,
    },
    /// Factorization from a square presentation annihilated by f.
    FromModule { module: PathBuf },
    /// Rank-one factorization from a point in the skew exterior case.
    FromPoint { context: PathBuf, point: PathBuf },
    /// Block factorization extending the modules of several points.
    Extension {
        context: PathBuf,
        #[arg(required = true)]
        points: Vec<PathBuf>,
    },
    /// Hilbert windows of an algebra, its quotient by f, or a cokernel.
    Hilbert { input: PathBuf },
    /// Dual factorization over the opposite algebra.
    Dual { nmf: PathBuf },
    /// Split off trivial summands.
    Reduce { nmf: PathBuf },
    /// Ext^1 between two point modules over a polynomial ring.
    Ext1 { input: PathBuf },
}

/// Exit code and rendered report of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

enum Failure {
    Input(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input() {
            Failure::Input(e.to_string())
        } else {
            Failure::Check(e.to_string())
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Run<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn matrix_value(m: &GradedMatrix) -> Value {
    serde_json::to_value(MatrixJson::describe(m)).expect("plain data")
}

fn nmf_value(nmf: &Nmf) -> Value {
    serde_json::to_value(NmfJson::describe(nmf)).expect("plain data")
}

fn components(nmf: &Nmf, range: std::ops::RangeInclusive<i64>) -> Value {
    Value::Array(
        range
            .map(|i| {
                let mut v = matrix_value(&nmf.component(i));
                v["index"] = json!(i);
                v
            })
            .collect(),
    )
}

/// The stored pair, failing with exit code 1 when the pair is not a
/// factorization.
fn load_nmf(path: &Path, window: usize) -> Run<Nmf> {
    let parsed: NmfJson = read_json(path)?;
    Ok(parsed.build(window)?)
}

fn context(path: &Path, window: usize) -> Run<SkewContext> {
    let parsed: ContextJson = read_json(path)?;
    let (field, alpha) = parsed.alpha_matrix()?;
    Ok(SkewContext::new(field, alpha, window)?)
}

fn point(ctx: &SkewContext, path: &Path) -> Run<Point> {
    let parsed: PointJson = read_json(path)?;
    Ok(ctx.point(parsed.values(ctx.field())?)?)
}

fn coords(p: &Point) -> Value {
    json!(p.coords().iter().map(ToString::to_string).collect::<Vec<_>>())
}

fn execute(cli: &Cli, seed: u64) -> Run<(bool, Value)> {
    let n = cli.window;
    match &cli.command {
        Command::Verify { nmf } => {
            let parsed: NmfJson = read_json(nmf)?;
            let (f, phi0, phi1) = parsed.parts(n)?;
            let report = Nmf::from_parts(phi0, phi1, &f, n).verify(n);
            let mut v = serde_json::to_value(&report).expect("plain data");
            v["command"] = json!("verify");
            Ok((report.ok, v))
        }
        Command::Complete { nmf } => {
            let nmf = load_nmf(nmf, n)?;
            Ok((
                true,
                json!({
                    "command": "complete",
                    "ok": true,
                    "window": n,
                    "nu": NmfJson::describe(&nmf).nu,
                    "components": components(&nmf, -2..=3),
                    "coker_hilbert": nmf.coker_hilbert(n),
                }),
            ))
        }
        Command::Rescale { input } => {
            let parsed: RescaleJson = read_json(input)?;
            let alg = parsed.algebra.build()?;
            let f = normal_element(&alg, &parsed.f, None, None, n)?;
            let ring = Ring::new(&alg);
            let seq = parsed.components.iter().map(|m| m.build(&ring)).collect::<Result<Vec<_>>>()?;
            let lambdas = parsed
                .lambdas
                .as_ref()
                .map(|ls| ls.iter().map(|l| alg.field().parse(l)).collect::<Result<Vec<_>>>())
                .transpose()?;
            let nmf = Nmf::rescale(&seq, lambdas.as_deref(), &f, n)?;
            let prod = |a: &GradedMatrix, b: &GradedMatrix| a.compose(b).map(|p| matrix_value(&p));
            Ok((
                true,
                json!({
                    "command": "rescale",
                    "ok": true,
                    "window": n,
                    "phi0": matrix_value(nmf.phi0()),
                    "phi1": matrix_value(nmf.phi1()),
                    "products": [prod(nmf.phi0(), nmf.phi1())?, prod(nmf.phi1(), &nmf.component(2))?],
                }),
            ))
        }
        Command::Twist { nmf, twist, normalize } => {
            let nmf = load_nmf(nmf, n)?;
            let parsed: TwistJson = read_json(twist)?;
            let (raw, lambda) = parsed.build(nmf.f().algebra())?;
            let (sigma, found) = if *normalize {
                eps_normalize(&raw, &nmf.f().f)?
            } else {
                let l = raw.eigenvalue(&nmf.f().f).ok_or(Error::NotEigenvector)?;
                (raw, l)
            };
            if let Some(l) = lambda {
                if l != found {
                    return Err(Failure::Check(format!("sigma(f) = {found} f, not {l} f")));
                }
            }
            let t = twist_nmf(&nmf, &sigma, n)?;
            let comps: Vec<Value> = (-4..=4)
                .map(|i| {
                    let mut v = matrix_value(&t.component(i));
                    v["index"] = json!(i);
                    v
                })
                .collect();
            let rows: Vec<Vec<String>> = (0..sigma.matrix().rows())
                .map(|i| sigma.matrix().row(i).iter().map(ToString::to_string).collect())
                .collect();
            let verified = t.verify(-4..=4);
            Ok((
                verified,
                json!({
                    "command": "twist",
                    "window": n,
                    "lambda": found.to_string(),
                    "sigma": rows,
                    "components": comps,
                    "verified": verified,
                }),
            ))
        }
        Command::Period { nmf } => {
            let nmf = load_nmf(nmf, n)?;
            let res = nmf_period(&nmf, cli.max, n, seed, cli.trials)?;
            let cert = res.certificate.as_ref().map(|c| json!({"mu0": matrix_value(&c.mu0), "mu1": matrix_value(&c.mu1)}));
            Ok((
                true,
                json!({
                    "command": "period",
                    "period": res.period,
                    "shift": res.shift,
                    "certificate": cert,
                    "max": res.max,
                    "window": res.window,
                    "trials": res.trials,
                    "seed": seed,
                    "found": res.period.is_some(),
                }),
            ))
        }
        Command::Resolve { module, steps } => {
            let parsed: ModuleJson = read_json(module)?;
            let alg = parsed.algebra.build()?;
            let ring = match &parsed.f {
                Some(f) => Ring::quotient(&alg, &crate::parse::parse_poly(f, &alg)?)?,
                None => Ring::new(&alg),
            };
            let pres = ModulePresentation::new(parsed.matrix.build(&ring)?);
            let res = minimal_resolution_window(&pres, *steps, n)?;
            Ok((
                true,
                json!({
                    "command": "resolve",
                    "window": n,
                    "steps": steps,
                    "betti": res.betti,
                    "linear": res.is_linear(),
                    "truncated": res.truncated,
                    "hilbert": pres.hilbert_window(n).1,
                }),
            ))
        }
        Command::FromModule { module } => {
            let parsed: ModuleJson = read_json(module)?;
            let alg = parsed.algebra.build()?;
            let f = parsed.f.as_deref().ok_or_else(|| Failure::Input("module input needs \"f\"".into()))?;
            let f = normal_element(&alg, f, None, None, n)?;
            let pres = parsed.matrix.build(&Ring::new(&alg))?;
            let nmf = Nmf::from_module(&pres, &f, n)?;
            Ok((
                true,
                json!({
                    "command": "from-module",
                    "ok": true,
                    "window": n,
                    "nmf": nmf_value(&nmf),
                    "coker_hilbert": nmf.coker_hilbert(n),
                }),
            ))
        }
        Command::FromPoint { context: c, point: p } => {
            let ctx = context(c, n)?;
            let p = point(&ctx, p)?;
            let res = ctx.nmf_from_point(&p, cli.max, n)?;
            Ok((
                true,
                json!({
                    "command": "from-point",
                    "window": n,
                    "point": coords(&p),
                    "orbit": res.orbit.points.iter().map(coords).collect::<Vec<_>>(),
                    "scalars": res.orbit.scalars.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "period": res.period,
                    "nmf": nmf_value(&res.nmf),
                    "coker_hilbert": res.nmf.coker_hilbert(n),
                    "linear_ranks": linear_rank_window(&res.nmf, 5, n)?,
                }),
            ))
        }
        Command::Extension { context: c, points } => {
            let ctx = context(c, n)?;
            let pts = points.iter().map(|p| point(&ctx, p)).collect::<Run<Vec<_>>>()?;
            let ext = ctx.build_extension_nmf(&pts, n, seed)?;
            let report = ext.nmf.verify(n);
            Ok((
                report.ok,
                json!({
                    "command": "extension",
                    "window": n,
                    "seed": seed,
                    "rank": ext.nmf.rank(),
                    "split": ext.split,
                    "verified": report.ok,
                    "linear": ext.resolution.is_linear(),
                    "betti": ext.resolution.betti,
                    "truncated": ext.resolution.truncated,
                    "coker_hilbert": ext.nmf.coker_hilbert(n),
                    "nmf": nmf_value(&ext.nmf),
                }),
            ))
        }
        Command::Hilbert { input } => {
            let raw: Value = read_json(input)?;
            let (alg_value, f) = match raw.get("algebra") {
                Some(a) => (a.clone(), raw.get("f").and_then(Value::as_str).map(str::to_string)),
                None => (raw.clone(), None),
            };
            let alg = serde_json::from_value::<AlgebraJson>(alg_value).map_err(|e| Failure::Input(e.to_string()))?.build()?;
            let mut out = json!({"command": "hilbert", "window": n, "algebra": alg.hilbert_window(n)});
            if let Some(f) = f {
                let fe = crate::parse::parse_poly(&f, &alg)?;
                out["quotient"] = json!(Ring::quotient(&alg, &fe)?.hilbert_window(n));
            }
            if raw.get("phi0").is_some() {
                let parsed: NmfJson = serde_json::from_value(raw).map_err(|e| Failure::Input(e.to_string()))?;
                out["coker"] = json!(parsed.build(n)?.coker_hilbert(n));
            }
            Ok((true, out))
        }
        Command::Dual { nmf } => {
            let nmf = load_nmf(nmf, n)?;
            let dual = nmf.dual()?;
            let report = dual.verify(n);
            Ok((
                report.ok,
                json!({
                    "command": "dual",
                    "window": n,
                    "verified": report.ok,
                    "nmf": nmf_value(&dual),
                }),
            ))
        }
        Command::Reduce { nmf } => {
            let nmf = load_nmf(nmf, n)?;
            let (reduced, summands) = nmf.reduce();
            Ok((
                true,
                json!({
                    "command": "reduce",
                    "window": n,
                    "rank": reduced.rank(),
                    "summands": summands,
                    "nmf": nmf_value(&reduced),
                }),
            ))
        }
        Command::Ext1 { input } => {
            let parsed: Ext1Json = read_json(input)?;
            let field = parsed.field.validate()?;
            let parse = |c: &[String]| -> Result<Point> { Point::new(c.iter().map(|v| field.parse(v)).collect::<Result<Vec<_>>>()?) };
            let (p, q) = (parse(&parsed.p)?, parse(&parsed.q)?);
            let dim = point_ext1_dim(field, &p, &q, n)?;
            Ok((true, json!({"command": "ext1", "window": n, "dim": dim, "same_point": p == q})))
        }
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Object(_) | Value::Array(_) if !is_flat(x) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(x, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", flat(x))),
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if is_flat(x) {
                    out.push_str(&format!("{pad}- {}\n", flat(x)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render_text(x, indent + 1, out);
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", flat(v))),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|x| !matches!(x, Value::Array(_) | Value::Object(_))),
        Value::Object(_) => false,
        _ => true,
    }
}

fn flat(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("[{}]", items.iter().map(flat).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn render(v: &Value, text: bool) -> String {
    if text {
        let mut out = String::new();
        render_text(v, 0, &mut out);
        out
    } else {
        let mut s = serde_json::to_string_pretty(v).expect("plain data");
        s.push('\n');
        s
    }
}

/// Runs a parsed command; `env_seed` overrides `--seed` when set.
pub fn run(cli: &Cli, env_seed: Option<&str>) -> Outcome {
    let seed = match env_seed.map(str::parse::<u64>) {
        Some(Ok(s)) => s,
        Some(Err(_)) => {
            return Outcome {
                code: 2,
                stdout: render(&json!({"ok": false, "error": "NCMF_SEED is not an unsigned integer"}), cli.text),
            }
        }
        None => cli.seed,
    };
    match execute(cli, seed) {
        Ok((ok, v)) => Outcome {
            code: if ok { 0 } else { 1 },
            stdout: render(&v, cli.text),
        },
        Err(Failure::Check(msg)) => Outcome {
            code: 1,
            stdout: render(&json!({"ok": false, "error": msg}), cli.text),
        },
        Err(Failure::Input(msg)) => Outcome {
            code: 2,
            stdout: render(&json!({"ok": false, "error": msg}), cli.text),
        },
    }
}

/// Parses `args` (program name first) and runs them.
pub fn run_args<I, T>(args: I, env_seed: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, env_seed),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            Outcome { code, stdout: e.to_string() }
        }
    }
}
