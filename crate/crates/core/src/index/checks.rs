use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::cohomology::{formal_index, gq_index_polynomial, theta_class, CharacterData, Laurent};
use super::idempotent::{lift_idempotent, ClassicalIdempotent, Lift};
use crate::asymptotics::check_levels;
use crate::error::{Error, Result};
use crate::quantize::{partial_trace, MapKind};
use crate::report::round17;
use crate::section::make_space;

/// `|measured - predicted|` allowed for an index check.
pub const TRACE_TOL: f64 = 1e-6;
/// Coefficientwise tolerance of the beta check.
pub const COEFF_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct IndexReport {
    pub label: String,
    pub level: i64,
    pub k0: i64,
    pub character: CharacterData,
    pub measured_trace: f64,
    pub predicted: i64,
    pub residual: f64,
    pub pass: bool,
    pub lift: Lift,
}

impl IndexReport {
    pub fn to_json(&self) -> Value {
        json!({
            "inputs": {"label": self.label, "N": self.level, "k0": self.k0, "ch": self.character},
            "measured": round17(self.measured_trace),
            "predicted": self.predicted,
            "residual": round17(self.residual),
            "pass": self.pass,
            "lift": {
                "gap": round17(self.lift.gap),
                "iterations": self.lift.iterations,
                "residuals": self.lift.residuals.iter().map(|r| round17(*r)).collect::<Vec<_>>(),
                "idempotency_defect": round17(self.lift.idempotency_defect),
                "distance_from_start": round17(self.lift.distance_from_start),
            },
        })
    }
}

fn evaluate_integer(p: &Laurent, level: i64) -> Result<i64> {
    let mut total = num_rational::Rational64::from_integer(0);
    for (power, c) in p.terms() {
        if power < 0 {
            return Err(Error::Config("index polynomial has negative powers of N".into()));
        }
        total += c * num_rational::Rational64::from_integer(level.pow(power as u32));
    }
    if !total.is_integer() {
        return Err(Error::Config(format!("index polynomial is not integral at N = {level}")));
    }
    Ok(total.to_integer())
}

/// Lifts `Q_N[e]` and compares its trace with the geometric index formula.
pub fn index_check(level: i64, k0: i64, e: &ClassicalIdempotent, kind: MapKind, min_gap: f64) -> Result<IndexReport> {
    let space = make_space(level, k0);
    space.require_nonempty()?;
    let lift = lift_idempotent(&space, e, kind, min_gap)?;
    let measured_trace = partial_trace(&lift.operator).re;
    let predicted = evaluate_integer(&gq_index_polynomial(&e.character(), k0), level)?;
    let residual = (measured_trace - predicted as f64).abs();
    Ok(IndexReport {
        label: e.label().to_string(),
        level,
        k0,
        character: e.character(),
        measured_trace,
        predicted,
        residual,
        pass: residual <= TRACE_TOL,
        lift,
    })
}

/// Smallest `N` in `1..=max_level` at which `e` lifts with the given gap, if any.
pub fn smallest_liftable_level(e: &ClassicalIdempotent, k0: i64, kind: MapKind, min_gap: f64, max_level: i64) -> Option<i64> {
    (1..=max_level).find(|&n| {
        let space = make_space(n, k0);
        !space.is_empty() && lift_idempotent(&space, e, kind, min_gap).is_ok()
    })
}

/// Least-squares polynomial `sum c_j N^j` of degree `degree` through `(N, y)`.
fn fit_polynomial(levels: &[i64], values: &[f64], degree: usize) -> Result<(Vec<f64>, f64)> {
    if levels.len() < degree + 1 {
        return Err(Error::DegenerateFit(format!("{} levels cannot fix a degree-{degree} polynomial", levels.len())));
    }
    let scale = *levels.iter().max().unwrap() as f64;
    let a = DMatrix::from_fn(levels.len(), degree + 1, |i, j| (levels[i] as f64 / scale).powi(j as i32));
    let b = DVector::from_column_slice(values);
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-12).map_err(|e| Error::DegenerateFit(e.to_string()))?;
    let residual = (&a * &x - &b).amax();
    let coeffs = x.iter().enumerate().map(|(j, c)| c / scale.powi(j as i32)).collect();
    Ok((coeffs, residual))
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceFit {
    pub label: String,
    pub character: CharacterData,
    pub levels: Vec<i64>,
    pub traces: Vec<f64>,
    /// `c_j` of `sum c_j N^j`.
    pub polynomial: Vec<f64>,
    pub fit_residual: f64,
    /// `c_j` attached to `hbar^{-j}` after `N = 1/hbar`, keyed by hbar power.
    pub fitted_laurent: Vec<(i32, f64)>,
    pub formal: Vec<(i32, f64)>,
    pub max_coefficient_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BetaReport {
    pub levels: Vec<i64>,
    pub k0: i64,
    pub fits: Vec<TraceFit>,
    /// Solution of `P_e = degree(e) * beta + rank(e) * beta * theta_2`, per hbar power.
    pub beta: Vec<(i32, f64)>,
    pub theta_deg2: Vec<(i32, f64)>,
    pub expected_theta_deg2: Vec<(i32, f64)>,
    pub pass: bool,
}

fn laurent_f64(p: &Laurent) -> Vec<(i32, f64)> {
    p.terms().map(|(k, c)| (k, c.to_f64().unwrap_or(f64::NAN))).collect()
}

fn lookup(p: &[(i32, f64)], power: i32) -> f64 {
    p.iter().find(|(k, _)| *k == power).map_or(0.0, |(_, c)| *c)
}

fn pairs_json(p: &[(i32, f64)]) -> Value {
    let mut m = serde_json::Map::new();
    for (k, c) in p {
        let key = match k {
            0 => "1".to_string(),
            1 => "hbar".to_string(),
            k => format!("hbar^{k}"),
        };
        m.insert(key, json!(round17(*c)));
    }
    Value::Object(m)
}

impl BetaReport {
    pub fn beta_constant(&self) -> f64 {
        lookup(&self.beta, 0)
    }

    pub fn to_json(&self) -> Value {
        let fits: Vec<Value> = self
            .fits
            .iter()
            .map(|f| {
                json!({
                    "label": f.label,
                    "ch": f.character,
                    "polynomial_in_N": f.polynomial.iter().map(|c| round17(*c)).collect::<Vec<_>>(),
                    "fit_residual": round17(f.fit_residual),
                    "measured": pairs_json(&f.fitted_laurent),
                    "predicted": pairs_json(&f.formal),
                    "residual": round17(f.max_coefficient_error),
                    "pass": f.pass,
                })
            })
            .collect();
        json!({
            "inputs": {"levels": self.levels, "k0": self.k0},
            "fits": fits,
            "beta": pairs_json(&self.beta),
            "theta_deg2": pairs_json(&self.theta_deg2),
            "expected_theta_deg2": pairs_json(&self.expected_theta_deg2),
            "pass": self.pass,
        })
    }

    /// `label,N,trace` rows.
    pub fn traces_csv(&self) -> String {
        let mut out = String::from("label,N,trace\n");
        for f in &self.fits {
            for (n, t) in f.levels.iter().zip(&f.traces) {
                out.push_str(&crate::report::csv_line(&[f.label.clone(), n.to_string(), crate::report::fmt_f64(*t)]));
            }
        }
        out
    }
}

/// Measures `tr_N` of lifted idempotents across `levels`, fits polynomials in
/// `N`, and compares them under `N = 1/hbar` with the formal index built from
/// `theta_class(k0)`. Also solves for `beta` and `theta` from the data alone.
pub fn beta_check(levels: &[i64], k0: i64, idempotents: &[ClassicalIdempotent], kind: MapKind, min_gap: f64) -> Result<BetaReport> {
    check_levels(levels)?;
    let mut chars: Vec<CharacterData> = idempotents.iter().map(|e| e.character()).collect();
    chars.sort_by_key(|c| (c.rank, c.degree));
    chars.dedup();
    let span = chars.iter().enumerate().any(|(i, a)| chars[i + 1..].iter().any(|b| a.rank * b.degree - a.degree * b.rank != 0));
    if !span {
        return Err(Error::InsufficientSpan(format!(
            "characters {chars:?} do not span H^0 + H^2; need two idempotents with independent (rank, degree)"
        )));
    }
    if levels.len() < 2 {
        return Err(Error::Config("beta_check needs at least 2 levels".into()));
    }
    let degree = (levels.len() - 1).min(2);
    let theta = theta_class(k0);

    let fits = idempotents
        .iter()
        .map(|e| {
            let traces = levels
                .par_iter()
                .map(|&n| {
                    let space = make_space(n, k0);
                    space.require_nonempty()?;
                    Ok(partial_trace(&lift_idempotent(&space, e, kind, min_gap)?.operator).re)
                })
                .collect::<Result<Vec<f64>>>()?;
            let (polynomial, fit_residual) = fit_polynomial(levels, &traces, degree)?;
            let fitted_laurent: Vec<(i32, f64)> = polynomial.iter().enumerate().map(|(j, c)| (-(j as i32), *c)).rev().collect();
            let formal = laurent_f64(&formal_index(&e.character(), &theta)?);
            let powers: std::collections::BTreeSet<i32> = fitted_laurent.iter().chain(&formal).map(|(k, _)| *k).collect();
            let max_coefficient_error =
                powers.iter().map(|&k| (lookup(&fitted_laurent, k) - lookup(&formal, k)).abs()).fold(0.0, f64::max);
            Ok(TraceFit {
                label: e.label().to_string(),
                character: e.character(),
                levels: levels.to_vec(),
                traces,
                polynomial,
                fit_residual,
                fitted_laurent,
                formal,
                max_coefficient_error,
                pass: max_coefficient_error <= COEFF_TOL,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // Per hbar power p: P_e[p] = degree(e) X[p] + rank(e) Y[p], X = beta, Y = beta * theta_2.
    let powers: std::collections::BTreeSet<i32> = fits.iter().flat_map(|f| f.fitted_laurent.iter().map(|(k, _)| *k)).collect();
    let a = DMatrix::from_fn(fits.len(), 2, |i, j| if j == 0 { fits[i].character.degree as f64 } else { fits[i].character.rank as f64 });
    let svd = a.svd(true, true);
    let mut beta = Vec::new();
    let mut y = Vec::new();
    for &p in &powers {
        let b = DVector::from_iterator(fits.len(), fits.iter().map(|f| lookup(&f.fitted_laurent, p)));
        let sol = svd.solve(&b, 1e-12).map_err(|e| Error::DegenerateFit(e.to_string()))?;
        beta.push((p, sol[0]));
        y.push((p, sol[1]));
    }
    let beta_const = lookup(&beta, 0);
    let beta_is_one = beta.iter().all(|&(p, c)| (c - if p == 0 { 1.0 } else { 0.0 }).abs() <= COEFF_TOL);
    let theta_deg2: Vec<(i32, f64)> = y.iter().map(|&(p, c)| (p, c / beta_const)).collect();
    let expected_theta_deg2 = laurent_f64(&theta.deg2);
    let all_powers: std::collections::BTreeSet<i32> = theta_deg2.iter().chain(&expected_theta_deg2).map(|(k, _)| *k).collect();
    let theta_ok = all_powers.iter().all(|&k| (lookup(&theta_deg2, k) - lookup(&expected_theta_deg2, k)).abs() <= COEFF_TOL);

    let pass = fits.iter().all(|f| f.pass) && beta_is_one && theta_ok;
    Ok(BetaReport { levels: levels.to_vec(), k0, fits, beta, theta_deg2, expected_theta_deg2, pass })
}
