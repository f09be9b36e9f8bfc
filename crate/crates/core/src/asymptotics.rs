//! Large-`N` behaviour of quantized observables: level scans, least-squares
//! fits in powers of `1/N` (with `hbar = 1/N`), and the norm-defect
//! functionals that pin down the star product.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::quantize::{geometric_symbol, operator_norm, quantize_auto, symbol, toeplitz, grid_for, MapKind};
use crate::report::{csv_line, fmt_f64, round17};
use crate::section::make_space;
use crate::sphere::{poisson_bracket, SpherePoint, SpherePolynomial};

/// Default level grid.
pub const DEFAULT_LEVELS: [i64; 4] = [8, 16, 32, 64];

/// Sign `s` in `N [Q f, Q g] + s i Q({f, g})` that makes the defect decay.
/// With `{u, v} = 2 w` this is `+1`, i.e. `[Q f, Q g] = -i hbar Q({f, g}) + ...`.
pub const COMMUTATOR_SIGN: f64 = 1.0;

/// Constant-term ceiling used to decide that a defect scan decays to zero.
pub const DECAY_CONSTANT_TOL: f64 = 0.02;

/// One measured quantity per level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelScan {
    pub levels: Vec<i64>,
    pub values: Vec<Complex64>,
    pub descriptor: String,
}

impl LevelScan {
    pub fn new(levels: Vec<i64>, values: Vec<Complex64>, descriptor: impl Into<String>) -> Result<Self> {
        if levels.len() != values.len() {
            return Err(Error::LengthMismatch { expected: levels.len(), found: values.len() });
        }
        check_levels(&levels)?;
        Ok(Self { levels, values, descriptor: descriptor.into() })
    }

    pub fn from_real(levels: Vec<i64>, values: Vec<f64>, descriptor: impl Into<String>) -> Result<Self> {
        Self::new(levels, values.into_iter().map(|x| Complex64::new(x, 0.0)).collect(), descriptor)
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|c| c.re).collect()
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1].re < w[0].re)
    }

    /// Nonincreasing up to a relative `jitter` allowance.
    pub fn is_nonincreasing_within(&self, jitter: f64) -> bool {
        self.values.windows(2).all(|w| w[1].re <= w[0].re * (1.0 + jitter))
    }

    /// CSV with columns `N,value_re,value_im`.
    pub fn to_csv(&self) -> String {
        let mut out = csv_line(["N", "value_re", "value_im"]);
        for (n, v) in self.levels.iter().zip(&self.values) {
            out.push_str(&csv_line([n.to_string(), fmt_f64(v.re), fmt_f64(v.im)]));
        }
        out
    }
}

/// Levels must be positive and strictly increasing.
pub fn check_levels(levels: &[i64]) -> Result<()> {
    if levels.iter().any(|&n| n < 1) {
        return Err(Error::Config("levels must be positive".into()));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("levels not increasing".into()));
    }
    Ok(())
}

/// `value(N) ~ sum_j coefficients[j] N^(-j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerFit {
    pub coefficients: Vec<Complex64>,
    pub max_residual: f64,
    pub order: usize,
    pub levels: Vec<i64>,
}

impl PowerFit {
    pub fn constant(&self) -> Complex64 {
        self.coefficients[0]
    }

    pub fn eval(&self, level: f64) -> Complex64 {
        self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc / level + c)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "coefficients": self.coefficients.iter().map(|c| [round17(c.re), round17(c.im)]).collect::<Vec<_>>(),
            "residual": round17(self.max_residual),
            "levels": self.levels,
            "order": self.order,
        })
    }
}

/// Least-squares fit of the scan in powers `1/N` up to `1/N^k`.
///
/// Columns are scaled by `N_min^j` before solving, which keeps the
/// Vandermonde system well conditioned on geometric level grids.
pub fn fit_inverse_powers(scan: &LevelScan, k: usize) -> Result<PowerFit> {
    let n = scan.levels.len();
    if n < k + 2 {
        return Err(Error::DegenerateFit(format!("{n} levels cannot support an order-{k} fit (need {})", k + 2)));
    }
    fit_unchecked(scan, k)
}

/// Interpolating/least-squares fit that only needs `k + 1` levels.
pub(crate) fn fit_unchecked(scan: &LevelScan, k: usize) -> Result<PowerFit> {
    let n = scan.levels.len();
    if n < k + 1 {
        return Err(Error::DegenerateFit(format!("{n} levels for {} unknowns", k + 1)));
    }
    let mut sorted = scan.levels.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DegenerateFit("duplicate levels make the system rank deficient".into()));
    }
    let base = *sorted.first().ok_or_else(|| Error::DegenerateFit("empty scan".into()))? as f64;
    if base <= 0.0 {
        return Err(Error::DegenerateFit("levels must be positive".into()));
    }
    let design = DMatrix::from_fn(n, k + 1, |r, c| (base / scan.levels[r] as f64).powi(c as i32));
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= smax * 1e-13 {
        return Err(Error::DegenerateFit(format!("singular Vandermonde system (condition {:.1e})", smax / smin)));
    }
    let re = DVector::from_iterator(n, scan.values.iter().map(|c| c.re));
    let im = DVector::from_iterator(n, scan.values.iter().map(|c| c.im));
    let sol_re = svd.solve(&re, 0.0).map_err(|e| Error::DegenerateFit(e.to_string()))?;
    let sol_im = svd.solve(&im, 0.0).map_err(|e| Error::DegenerateFit(e.to_string()))?;
    let coefficients: Vec<Complex64> = (0..=k)
        .map(|j| Complex64::new(sol_re[j], sol_im[j]) * base.powi(j as i32))
        .collect();
    let fit = PowerFit { coefficients, max_residual: 0.0, order: k, levels: scan.levels.clone() };
    let max_residual = scan
        .levels
        .iter()
        .zip(&scan.values)
        .map(|(&lvl, v)| (v - fit.eval(lvl as f64)).norm())
        .fold(0.0, f64::max);
    Ok(PowerFit { max_residual, ..fit })
}

/// Highest fit order a scan of `levels` supports (at most `cap`).
pub fn default_order(levels: usize, cap: usize) -> usize {
    levels.saturating_sub(2).min(cap)
}

fn map_levels<T, F>(levels: &[i64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(i64) -> Result<T> + Sync,
{
    levels.par_iter().map(|&n| f(n)).collect()
}

/// `|| N [Q f, Q g] + sign i Q({f, g}) ||` at a single level.
pub fn commutator_defect_signed(
    f: &SpherePolynomial,
    g: &SpherePolynomial,
    level: i64,
    k0: i64,
    kind: MapKind,
    sign: f64,
) -> Result<f64> {
    let space = make_space(level, k0);
    let bracket = poisson_bracket(f, g);
    let qf = quantize_auto(&space, f, kind)?;
    let qg = quantize_auto(&space, g, kind)?;
    let qb = quantize_auto(&space, &bracket, kind)?;
    let defect = &qf.commutator(&qg).scale(level as f64) + &qb.scale(Complex64::new(0.0, sign));
    Ok(operator_norm(&defect))
}

/// `|| N [Q f, Q g] + i Q({f, g}) ||` with the audited sign convention.
pub fn commutator_defect(f: &SpherePolynomial, g: &SpherePolynomial, level: i64, k0: i64, kind: MapKind) -> Result<f64> {
    commutator_defect_signed(f, g, level, k0, kind, COMMUTATOR_SIGN)
}

/// A defect scan with its decay verdict.
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub scan: LevelScan,
    pub fit: PowerFit,
    pub strictly_decreasing: bool,
    pub decays: bool,
}

impl DecayReport {
    fn from_scan(scan: LevelScan) -> Result<Self> {
        let fit = fit_unchecked(&scan, default_order(scan.levels.len(), 2).max(1))?;
        let strictly_decreasing = scan.is_strictly_decreasing();
        let decays = strictly_decreasing && fit.constant().norm() <= DECAY_CONSTANT_TOL;
        Ok(Self { scan, fit, strictly_decreasing, decays })
    }
}

/// Both sign choices of the commutator defect; exactly one should decay.
#[derive(Debug, Clone, Serialize)]
pub struct SignAudit {
    pub configured: DecayReport,
    pub opposite: DecayReport,
}

impl SignAudit {
    pub fn passes(&self) -> bool {
        self.configured.decays && !self.opposite.decays
    }

    /// Fails loudly when the configured convention is not the decaying one.
    pub fn verify(&self) -> Result<()> {
        if self.passes() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "commutator sign audit failed: configured decays = {}, opposite decays = {}",
                self.configured.decays, self.opposite.decays
            )))
        }
    }
}

pub fn commutator_scan(
    f: &SpherePolynomial,
    g: &SpherePolynomial,
    levels: &[i64],
    k0: i64,
    kind: MapKind,
) -> Result<SignAudit> {
    check_levels(levels)?;
    let scan_for = |sign: f64| -> Result<DecayReport> {
        let vals = map_levels(levels, |n| commutator_defect_signed(f, g, n, k0, kind, sign))?;
        DecayReport::from_scan(LevelScan::from_real(levels.to_vec(), vals, format!("commutator defect, sign {sign:+}"))?)
    };
    Ok(SignAudit { configured: scan_for(COMMUTATOR_SIGN)?, opposite: scan_for(-COMMUTATOR_SIGN)? })
}

/// `|| N^k Q(f) Q(g) - sum_{j<=k} (-i)^j N^(k-j) Q(phi_j) ||` at one level.
pub fn star_defect(
    f: &SpherePolynomial,
    g: &SpherePolynomial,
    phis: &[SpherePolynomial],
    k: usize,
    level: i64,
    k0: i64,
    kind: MapKind,
) -> Result<f64> {
    if phis.len() != k + 1 {
        return Err(Error::LengthMismatch { expected: k + 1, found: phis.len() });
    }
    if phis[0] != f * g {
        return Err(Error::Config("phi_0 must equal f g".into()));
    }
    let space = make_space(level, k0);
    let nf = level as f64;
    let qf = quantize_auto(&space, f, kind)?;
    let qg = quantize_auto(&space, g, kind)?;
    let mut acc = (&qf * &qg).scale(nf.powi(k as i32));
    let mut phase = Complex64::new(1.0, 0.0);
    for (j, phi) in phis.iter().enumerate() {
        let q = quantize_auto(&space, phi, kind)?;
        acc = &acc - &q.scale(phase * nf.powi((k - j) as i32));
        phase *= Complex64::new(0.0, -1.0);
    }
    Ok(operator_norm(&acc))
}

/// Star-defect scan; the fit is reported, decay is judged by monotonicity.
#[derive(Debug, Clone, Serialize)]
pub struct StarDefectReport {
    pub scan: LevelScan,
    pub fit: PowerFit,
    pub strictly_decreasing: bool,
}

pub fn star_defect_scan(
    f: &SpherePolynomial,
    g: &SpherePolynomial,
    phis: &[SpherePolynomial],
    k: usize,
    levels: &[i64],
    k0: i64,
    kind: MapKind,
) -> Result<StarDefectReport> {
    check_levels(levels)?;
    let vals = map_levels(levels, |n| star_defect(f, g, phis, k, n, k0, kind))?;
    let scan = LevelScan::from_real(levels.to_vec(), vals, format!("star defect k={k}"))?;
    let fit = fit_unchecked(&scan, default_order(levels.len(), 2).max(1))?;
    let strictly_decreasing = scan.is_strictly_decreasing();
    Ok(StarDefectReport { scan, fit, strictly_decreasing })
}

/// Fits `h_N(x) = N symbol(T f T g - T g T f, x)` in powers of `1/N`.
///
/// The coherent-symbol corrections of the two products cancel in the
/// commutator, so the constant term is the antisymmetric part of `phi_1`,
/// which must be `-i {f, g}(x)`.
pub fn phi1_antisym_probe(f: &SpherePolynomial, g: &SpherePolynomial, x: &SpherePoint, levels: &[i64], k0: i64) -> Result<PowerFit> {
    if levels.len() < 3 {
        return Err(Error::DegenerateFit(format!("phi1 probe needs >= 3 levels (got {})", levels.len())));
    }
    check_levels(levels)?;
    let vals = map_levels(levels, |n| {
        let space = make_space(n, k0);
        let tf = toeplitz(&space, f, &grid_for(&space, f)?)?;
        let tg = toeplitz(&space, g, &grid_for(&space, g)?)?;
        Ok(symbol(&tf.commutator(&tg), x)? * n as f64)
    })?;
    let scan = LevelScan::new(levels.to_vec(), vals, "N * symbol of commutator")?;
    fit_inverse_powers(&scan, levels.len() - 2)
}

/// Operator norms `||Q_N(f)||` per level.
pub fn norm_scan(f: &SpherePolynomial, levels: &[i64], k0: i64, kind: MapKind) -> Result<LevelScan> {
    check_levels(levels)?;
    let vals = map_levels(levels, |n| Ok(operator_norm(&quantize_auto(&make_space(n, k0), f, kind)?)))?;
    LevelScan::from_real(levels.to_vec(), vals, format!("operator norm ({kind:?})"))
}

/// Norms of `T_N(u + s Delta u / 2N)` for both Laplacian signs `s = +1, -1`,
/// against `||u||_sup = 1`. Reports which convention keeps the quantized
/// coordinate within the classical sup norm; nothing is asserted here.
#[derive(Debug, Clone, Serialize)]
pub struct LaplacianSignReport {
    pub levels: Vec<i64>,
    pub nonnegative_sign: Vec<f64>,
    pub nonpositive_sign: Vec<f64>,
}

pub fn laplacian_sign_report(levels: &[i64], k0: i64) -> Result<LaplacianSignReport> {
    check_levels(levels)?;
    let u = SpherePolynomial::u();
    let norms = |sign: f64| {
        map_levels(levels, |n| {
            let space = make_space(n, k0);
            let sym = geometric_symbol(n, &u, sign)?;
            Ok(operator_norm(&toeplitz(&space, &sym, &grid_for(&space, &sym)?)?))
        })
    };
    Ok(LaplacianSignReport { levels: levels.to_vec(), nonnegative_sign: norms(1.0)?, nonpositive_sign: norms(-1.0)? })
}
