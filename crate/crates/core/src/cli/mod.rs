//! Batch front-end: JSON configuration, dispatch, and deterministic artifacts.
//!
//! Every command writes `<command>.json` (carrying `schema_version`) and,
//! where a table makes sense, `<command>.csv` into the output directory; the
//! JSON report is also printed to stdout. Exit codes: 0 all checks pass,
//! 2 a check failed, 1 usage or configuration error.

mod expr;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

pub use expr::parse_polynomial;

use crate::asymptotics::{
    check_levels, commutator_scan, laplacian_sign_report, norm_scan, phi1_antisym_probe, star_defect_scan, DecayReport, PowerFit,
    DECAY_CONSTANT_TOL,
};
use crate::error::{Error, Result};
use crate::index::{beta_check, idempotent_by_name, index_check, smallest_liftable_level, theta_class, ClassicalIdempotent};
use crate::moyal::run_axiom_checks;
use crate::quantize::{quantize_auto, MapKind};
use crate::report::{csv_line, fmt_f64, round17};
use crate::section::make_space;
use crate::sphere::{poisson_bracket, sup_norm, SpherePoint, SpherePolynomial};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_LEVELS: [i64; 4] = [8, 16, 32, 64];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Gram,
    Toeplitz,
    CommutatorScan,
    StarDefect,
    Phi1Probe,
    NormScan,
    MoyalCheck,
    IndexCheck,
    BetaCheck,
    Theta,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Gram,
        Command::Toeplitz,
        Command::CommutatorScan,
        Command::StarDefect,
        Command::Phi1Probe,
        Command::NormScan,
        Command::MoyalCheck,
        Command::IndexCheck,
        Command::BetaCheck,
        Command::Theta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Gram => "gram",
            Command::Toeplitz => "toeplitz",
            Command::CommutatorScan => "commutator-scan",
            Command::StarDefect => "star-defect",
            Command::Phi1Probe => "phi1-probe",
            Command::NormScan => "norm-scan",
            Command::MoyalCheck => "moyal-check",
            Command::IndexCheck => "index-check",
            Command::BetaCheck => "beta-check",
            Command::Theta => "theta",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command {s:?}")))
    }
}

/// Named tolerances with their defaults.
const TOLERANCES: [(&str, f64); 6] = [
    ("trace", crate::index::TRACE_TOL),
    ("coeff", crate::index::COEFF_TOL),
    ("gap", crate::index::DEFAULT_GAP),
    ("decay_constant", DECAY_CONSTANT_TOL),
    ("phi1_relative", 0.05),
    ("gram", 1e-12),
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: String,
    levels: Option<Vec<i64>>,
    k0: Option<i64>,
    functions: Option<BTreeMap<String, String>>,
    truncation: Option<i32>,
    output_dir: Option<PathBuf>,
    tolerances: Option<BTreeMap<String, f64>>,
    seed: Option<u64>,
    trials: Option<usize>,
    map_kind: Option<String>,
    idempotents: Option<Vec<String>>,
    order: Option<usize>,
    phis: Option<Vec<String>>,
    points: Option<Vec<[f64; 3]>>,
}

/// Validated run configuration with defaults filled in.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub levels: Vec<i64>,
    pub k0: i64,
    /// Named polynomial expressions; commands read `f` and `g`.
    pub functions: BTreeMap<String, String>,
    pub truncation: i32,
    pub output_dir: Option<PathBuf>,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub trials: usize,
    pub map_kind: MapKind,
    pub idempotents: Vec<String>,
    /// Order `k` of the star-defect check.
    pub order: usize,
    /// `phi_0 .. phi_k` expressions; defaults to `[f*g]` for `k = 0`.
    pub phis: Vec<String>,
    /// Evaluation points for `phi1-probe`.
    pub points: Vec<[f64; 3]>,
}

impl RunConfig {
    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    fn function(&self, name: &str) -> Result<SpherePolynomial> {
        let src = self.functions.get(name).ok_or_else(|| Error::Config(format!("functions.{name} is missing")))?;
        parse_polynomial(src).map_err(|e| Error::Config(format!("functions.{name}: {e}")))
    }
}

fn default_functions(command: Command) -> BTreeMap<String, String> {
    let pairs: &[(&str, &str)] = match command {
        Command::Toeplitz | Command::NormScan => &[("f", "u")],
        Command::CommutatorScan | Command::StarDefect | Command::Phi1Probe => &[("f", "u"), ("g", "v")],
        _ => &[],
    };
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

/// Parses and validates a JSON configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
    let command: Command = raw.command.parse()?;
    let levels = raw.levels.unwrap_or_else(|| DEFAULT_LEVELS.to_vec());
    if levels.is_empty() {
        return Err(Error::Config("levels: empty".into()));
    }
    check_levels(&levels).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("levels: {m}")),
        other => other,
    })?;
    let truncation = raw.truncation.unwrap_or(crate::moyal::DEFAULT_TRUNCATION);
    if truncation < 0 {
        return Err(Error::Config(format!("truncation: must be >= 0 (got {truncation})")));
    }
    let mut tolerances: BTreeMap<String, f64> = TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in raw.tolerances.unwrap_or_default() {
        if !tolerances.contains_key(&k) {
            return Err(Error::Config(format!("tolerances: unknown key {k:?}")));
        }
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Config(format!("tolerances.{k}: must be a finite non-negative number")));
        }
        tolerances.insert(k, v);
    }
    let mut functions = default_functions(command);
    functions.extend(raw.functions.unwrap_or_default());
    for (name, src) in &functions {
        parse_polynomial(src).map_err(|e| Error::Config(format!("functions.{name}: {e}")))?;
    }
    let map_kind = match raw.map_kind {
        Some(s) => s.parse().map_err(|_| Error::Config(format!("map_kind: unknown value {s:?}")))?,
        None => MapKind::Toeplitz,
    };
    let idempotents = raw.idempotents.unwrap_or_else(|| match command {
        Command::BetaCheck => vec!["trivial".into(), "bott+1".into()],
        _ => vec!["trivial".into()],
    });
    for name in &idempotents {
        idempotent_by_name(name).map_err(|e| Error::Config(format!("idempotents: {e}")))?;
    }
    let order = raw.order.unwrap_or(0);
    let phis = raw.phis.unwrap_or_default();
    let points = raw.points.unwrap_or_else(|| vec![[0.0, 0.0, 1.0], [0.6, 0.0, 0.8], [0.0, 0.6, 0.8]]);
    for p in &points {
        SpherePoint::new(p[0], p[1], p[2]).map_err(|e| Error::Config(format!("points: {e}")))?;
    }
    Ok(RunConfig {
        command,
        levels,
        k0: raw.k0.unwrap_or(0),
        functions,
        truncation,
        output_dir: raw.output_dir,
        tolerances,
        seed: raw.seed.unwrap_or(0),
        trials: raw.trials.unwrap_or(100),
        map_kind,
        idempotents,
        order,
        phis,
        points,
    })
}

/// Report plus optional CSV tables, ready for emission.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    /// `(file name, contents)` in emission order.
    pub tables: Vec<(String, String)>,
    pub pass: bool,
}

fn complex_json(c: Complex64) -> Value {
    json!([round17(c.re), round17(c.im)])
}

fn fit_json(fit: &PowerFit) -> Value {
    json!({
        "order": fit.order,
        "coefficients": fit.coefficients.iter().map(|c| complex_json(*c)).collect::<Vec<_>>(),
        "max_residual": round17(fit.max_residual),
    })
}

fn decay_json(d: &DecayReport) -> Value {
    json!({
        "values": d.scan.real_values().iter().map(|v| round17(*v)).collect::<Vec<_>>(),
        "fit": fit_json(&d.fit),
        "strictly_decreasing": d.strictly_decreasing,
        "decays": d.decays,
    })
}

fn run_gram(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tolerance("gram");
    let mut csv = String::from("N,k0,j,gram_exact,gram_quadrature\n");
    let mut levels = Vec::new();
    let mut pass = true;
    for &n in &cfg.levels {
        let space = make_space(n, cfg.k0);
        let quad = space.gram_by_quadrature()?;
        let mut worst = 0.0f64;
        for (j, (a, b)) in space.gram_diag().iter().zip(&quad).enumerate() {
            worst = worst.max((a - b).abs() / a.abs());
            csv.push_str(&csv_line([n.to_string(), cfg.k0.to_string(), j.to_string(), fmt_f64(*a), fmt_f64(*b)]));
        }
        pass &= worst <= tol;
        levels.push(json!({"N": n, "dim": space.dim(), "max_relative_error": round17(worst)}));
    }
    Ok(Outcome { report: json!({"levels": levels, "pass": pass}), tables: vec![("gram.csv".into(), csv)], pass })
}

fn run_toeplitz(cfg: &RunConfig) -> Result<Outcome> {
    let f = cfg.function("f")?;
    let mut tables = Vec::new();
    let mut ops = Vec::new();
    for &n in &cfg.levels {
        let space = make_space(n, cfg.k0);
        let op = quantize_auto(&space, &f, cfg.map_kind)?;
        tables.push((format!("toeplitz_N{n}.csv"), op.to_csv()));
        ops.push(op.to_json());
    }
    Ok(Outcome { report: json!({"function": f.to_string(), "map_kind": cfg.map_kind, "operators": ops, "pass": true}), tables, pass: true })
}

fn run_commutator(cfg: &RunConfig) -> Result<Outcome> {
    let (f, g) = (cfg.function("f")?, cfg.function("g")?);
    let audit = commutator_scan(&f, &g, &cfg.levels, cfg.k0, cfg.map_kind)?;
    let tol = cfg.tolerance("decay_constant");
    let decays = |d: &DecayReport| d.strictly_decreasing && d.fit.constant().norm() <= tol;
    let pass = decays(&audit.configured) && !decays(&audit.opposite);
    let mut csv = String::from("N,defect_configured,defect_opposite\n");
    let (a, b) = (audit.configured.scan.real_values(), audit.opposite.scan.real_values());
    for (i, n) in cfg.levels.iter().enumerate() {
        csv.push_str(&csv_line([n.to_string(), fmt_f64(a[i]), fmt_f64(b[i])]));
    }
    Ok(Outcome {
        report: json!({
            "f": f.to_string(),
            "g": g.to_string(),
            "map_kind": cfg.map_kind,
            "configured_sign": crate::asymptotics::COMMUTATOR_SIGN,
            "configured": decay_json(&audit.configured),
            "opposite": decay_json(&audit.opposite),
            "pass": pass,
        }),
        tables: vec![("commutator-scan.csv".into(), csv)],
        pass,
    })
}

fn run_star_defect(cfg: &RunConfig) -> Result<Outcome> {
    let (f, g) = (cfg.function("f")?, cfg.function("g")?);
    let phis = if cfg.phis.is_empty() && cfg.order == 0 {
        vec![&f * &g]
    } else {
        cfg.phis.iter().map(|s| parse_polynomial(s).map_err(|e| Error::Config(format!("phis: {e}")))).collect::<Result<_>>()?
    };
    let r = star_defect_scan(&f, &g, &phis, cfg.order, &cfg.levels, cfg.k0, cfg.map_kind)?;
    let mut csv = String::from("N,defect\n");
    for (n, v) in cfg.levels.iter().zip(r.scan.real_values()) {
        csv.push_str(&csv_line([n.to_string(), fmt_f64(v)]));
    }
    // Leading coefficient of the 1/N fit is the reported constant C.
    let c = r.fit.coefficients.get(1).copied().unwrap_or_default();
    Ok(Outcome {
        report: json!({
            "f": f.to_string(),
            "g": g.to_string(),
            "k": cfg.order,
            "values": r.scan.real_values().iter().map(|v| round17(*v)).collect::<Vec<_>>(),
            "fit": fit_json(&r.fit),
            "C": round17(c.norm()),
            "strictly_decreasing": r.strictly_decreasing,
            "pass": r.strictly_decreasing,
        }),
        tables: vec![("star-defect.csv".into(), csv)],
        pass: r.strictly_decreasing,
    })
}

fn run_phi1(cfg: &RunConfig) -> Result<Outcome> {
    let (f, g) = (cfg.function("f")?, cfg.function("g")?);
    let bracket = poisson_bracket(&f, &g);
    let tol = cfg.tolerance("phi1_relative");
    let mut csv = String::from("point,u,v,w,fit_re,fit_im,expected_re,expected_im\n");
    let mut rows = Vec::new();
    let mut pass = true;
    for (i, p) in cfg.points.iter().enumerate() {
        let x = SpherePoint::new(p[0], p[1], p[2])?;
        let fit = phi1_antisym_probe(&f, &g, &x, &cfg.levels, cfg.k0)?;
        let expected = Complex64::new(0.0, -1.0) * bracket.eval(&x);
        let got = fit.constant();
        // Relative to |expected|, floored at 0.1 so vanishing brackets are judged absolutely.
        let err = (got - expected).norm() / expected.norm().max(0.1);
        pass &= err <= tol;
        csv.push_str(&csv_line([
            i.to_string(),
            fmt_f64(p[0]),
            fmt_f64(p[1]),
            fmt_f64(p[2]),
            fmt_f64(got.re),
            fmt_f64(got.im),
            fmt_f64(expected.re),
            fmt_f64(expected.im),
        ]));
        rows.push(json!({"point": p, "fit": fit_json(&fit), "expected": complex_json(expected), "relative_error": round17(err)}));
    }
    Ok(Outcome {
        report: json!({"f": f.to_string(), "g": g.to_string(), "points": rows, "pass": pass}),
        tables: vec![("phi1-probe.csv".into(), csv)],
        pass,
    })
}

fn run_norm_scan(cfg: &RunConfig) -> Result<Outcome> {
    let f = cfg.function("f")?;
    let scan = norm_scan(&f, &cfg.levels, cfg.k0, cfg.map_kind)?;
    let sup = sup_norm(&f, 2000)?;
    let lap = laplacian_sign_report(&cfg.levels, cfg.k0)?;
    let mut csv = String::from("N,norm,sup_norm\n");
    for (n, v) in cfg.levels.iter().zip(scan.real_values()) {
        csv.push_str(&csv_line([n.to_string(), fmt_f64(v), fmt_f64(sup)]));
    }
    let r = |v: &[f64]| v.iter().map(|x| round17(*x)).collect::<Vec<_>>();
    Ok(Outcome {
        report: json!({
            "f": f.to_string(),
            "map_kind": cfg.map_kind,
            "norms": r(&scan.real_values()),
            "sup_norm": round17(sup),
            "laplacian_sign_audit": {
                "function": "u",
                "nonnegative_sign": r(&lap.nonnegative_sign),
                "nonpositive_sign": r(&lap.nonpositive_sign),
            },
            "pass": true,
        }),
        tables: vec![("norm-scan.csv".into(), csv)],
        pass: true,
    })
}

fn run_moyal(cfg: &RunConfig) -> Result<Outcome> {
    let r = run_axiom_checks(cfg.seed, cfg.trials, cfg.truncation)?;
    let pass = r.passes();
    Ok(Outcome {
        report: json!({
            "seed": cfg.seed,
            "trials": r.trials,
            "truncation": r.truncation,
            "associator": format!("max |coeff| = {}", r.associator_max),
            "associator_zero": r.associator_zero,
            "unit": r.unit,
            "conjugation": r.conjugation,
            "hbar_linearity": r.hbar_linearity,
            "commutator_leading_order": r.commutator_leading_order,
            "pass": pass,
        }),
        tables: vec![],
        pass,
    })
}

fn idempotents(cfg: &RunConfig) -> Result<Vec<ClassicalIdempotent>> {
    cfg.idempotents.iter().map(|n| idempotent_by_name(n)).collect()
}

fn run_index(cfg: &RunConfig) -> Result<Outcome> {
    let ids = idempotents(cfg)?;
    let gap = cfg.tolerance("gap");
    let tol = cfg.tolerance("trace");
    let mut csv = String::from("label,N,k0,measured,predicted,residual,pass\n");
    let mut reports = Vec::new();
    let mut thresholds = serde_json::Map::new();
    let mut pass = true;
    let max_level = *cfg.levels.last().unwrap();
    for e in &ids {
        for &n in &cfg.levels {
            let r = index_check(n, cfg.k0, e, cfg.map_kind, gap)?;
            let ok = r.residual <= tol;
            pass &= ok;
            csv.push_str(&csv_line([
                r.label.clone(),
                n.to_string(),
                cfg.k0.to_string(),
                fmt_f64(r.measured_trace),
                r.predicted.to_string(),
                fmt_f64(r.residual),
                ok.to_string(),
            ]));
            let mut j = r.to_json();
            j["pass"] = json!(ok);
            reports.push(j);
        }
        let first = smallest_liftable_level(e, cfg.k0, cfg.map_kind, gap, max_level);
        thresholds.insert(e.label().to_string(), json!(first));
    }
    Ok(Outcome {
        report: json!({"k0": cfg.k0, "map_kind": cfg.map_kind, "checks": reports, "smallest_liftable_level": thresholds, "pass": pass}),
        tables: vec![("index-check.csv".into(), csv)],
        pass,
    })
}

fn run_beta(cfg: &RunConfig) -> Result<Outcome> {
    let ids = idempotents(cfg)?;
    let r = beta_check(&cfg.levels, cfg.k0, &ids, cfg.map_kind, cfg.tolerance("gap"))?;
    let tol = cfg.tolerance("coeff");
    let pass = r.pass && r.fits.iter().all(|f| f.max_coefficient_error <= tol);
    let mut report = r.to_json();
    report["pass"] = json!(pass);
    Ok(Outcome { report, tables: vec![("beta-check.csv".into(), r.traces_csv())], pass })
}

fn run_theta(cfg: &RunConfig) -> Result<Outcome> {
    let theta = theta_class(cfg.k0);
    Ok(Outcome {
        report: json!({"k0": cfg.k0, "theta_deg0": theta.deg0.to_json("hbar"), "theta_deg2": theta.deg2.to_json("hbar"), "pass": true}),
        tables: vec![],
        pass: true,
    })
}

/// Executes a command without touching the filesystem.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = match cfg.command {
        Command::Gram => run_gram(cfg),
        Command::Toeplitz => run_toeplitz(cfg),
        Command::CommutatorScan => run_commutator(cfg),
        Command::StarDefect => run_star_defect(cfg),
        Command::Phi1Probe => run_phi1(cfg),
        Command::NormScan => run_norm_scan(cfg),
        Command::MoyalCheck => run_moyal(cfg),
        Command::IndexCheck => run_index(cfg),
        Command::BetaCheck => run_beta(cfg),
        Command::Theta => run_theta(cfg),
    }?;
    if let Value::Object(m) = &mut out.report {
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        m.insert("command".into(), json!(cfg.command.name()));
    }
    Ok(out)
}

/// Writes the report and tables into `dir`.
pub fn emit(cfg: &RunConfig, out: &Outcome, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(&out.report).expect("report serializes");
    text.push('\n');
    std::fs::write(dir.join(format!("{}.json", cfg.command.name())), text)?;
    for (name, contents) in &out.tables {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

/// Exit code of a failed run: 2 when a check could not be carried out for
/// numerical reasons (for instance a refused lift), 1 for usage errors.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::SpectralGap { .. } | Error::LiftDiverged { .. } | Error::DegenerateFit(_) => 2,
        _ => 1,
    }
}

/// Runs a configuration end to end, printing the report to stdout and
/// writing files when an output directory is set. Returns the exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    let out = match execute(cfg) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("btq {}: {e}", cfg.command);
            return error_exit_code(&e);
        }
    };
    if let Some(dir) = &cfg.output_dir {
        if let Err(e) = emit(cfg, &out, dir) {
            eprintln!("btq {}: cannot write {}: {e}", cfg.command, dir.display());
            return 1;
        }
    }
    println!("{}", serde_json::to_string_pretty(&out.report).expect("report serializes"));
    if out.pass {
        0
    } else {
        2
    }
}

/// Sizes the global rayon pool from `BTQ_THREADS`, if set.
pub fn configure_threads() -> Result<()> {
    if let Ok(s) = std::env::var("BTQ_THREADS") {
        let n: usize = s.trim().parse().map_err(|_| Error::Config(format!("BTQ_THREADS: not a positive integer: {s:?}")))?;
        if n == 0 {
            return Err(Error::Config("BTQ_THREADS: must be positive".into()));
        }
        // A pool that already exists keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
