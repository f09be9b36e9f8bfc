use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::cohomology::CharacterData;
use crate::error::{Error, Result};
use crate::quantize::{operator_norm, quantize_auto, MapKind, QuantOperator};
use crate::section::SectionSpace;
use crate::sphere::SpherePolynomial;

/// Degree carried by `bott_projector(+1)`.
///
/// Pinned against the geometric index formula: the lifted projector at level
/// `N` has trace `N + k0`, i.e. `ch = 1 - sigma`. See the
/// `bott_orientation_is_resolved` test.
pub const BOTT_DEGREE_SIGN: i64 = -1;

/// Spectral-gap threshold around `1/2` required before lifting.
pub const DEFAULT_GAP: f64 = 0.1;

/// Hermitian idempotent `m x m` matrix of sphere polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalIdempotent {
    entries: Vec<Vec<SpherePolynomial>>,
    character: CharacterData,
    label: String,
}

impl ClassicalIdempotent {
    /// Identity of size `rank` (the trivial bundle of that rank).
    pub fn trivial(rank: usize) -> Self {
        let entries = (0..rank)
            .map(|i| (0..rank).map(|j| if i == j { SpherePolynomial::one() } else { SpherePolynomial::zero() }).collect())
            .collect();
        Self { entries, character: CharacterData { rank: rank as i64, degree: 0 }, label: format!("trivial{rank}") }
    }

    /// The zero idempotent of size `m`.
    pub fn zero(m: usize) -> Self {
        Self {
            entries: vec![vec![SpherePolynomial::zero(); m]; m],
            character: CharacterData { rank: 0, degree: 0 },
            label: format!("zero{m}"),
        }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<SpherePolynomial>] {
        &self.entries
    }

    pub fn character(&self) -> CharacterData {
        self.character
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn product(&self, other: &Self) -> Vec<Vec<SpherePolynomial>> {
        let m = self.size();
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| (0..m).fold(SpherePolynomial::zero(), |acc, k| &acc + &(&self.entries[i][k] * &other.entries[k][j])))
                    .collect()
            })
            .collect()
    }

    /// `e^2 = e` exactly after canonicalization.
    pub fn is_idempotent(&self) -> bool {
        self.product(self) == self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        let m = self.size();
        (0..m).all(|i| (0..m).all(|j| self.entries[i][j] == self.entries[j][i].conj()))
    }

    /// Pointwise trace, a polynomial (constant for an idempotent on a connected space).
    pub fn trace(&self) -> SpherePolynomial {
        (0..self.size()).fold(SpherePolynomial::zero(), |acc, i| &acc + &self.entries[i][i])
    }
}

/// `(1 + k (u s3 + v s1 + w s2)) / 2` for `k = +1` or `-1`.
pub fn bott_projector(k: i64) -> Result<ClassicalIdempotent> {
    if k != 1 && k != -1 {
        return Err(Error::Config(format!("bott_projector supports k = +1 or -1 (got {k})")));
    }
    let kf = k as f64;
    let half = SpherePolynomial::constant(0.5);
    let (u, v, w) = (SpherePolynomial::u(), SpherePolynomial::v(), SpherePolynomial::w());
    let i = Complex64::new(0.0, 1.0);
    let entries = vec![
        vec![&half + &u.scale(0.5 * kf), &v.scale(0.5 * kf) - &w.scale(i * 0.5 * kf)],
        vec![&v.scale(0.5 * kf) + &w.scale(i * 0.5 * kf), &half - &u.scale(0.5 * kf)],
    ];
    let label = if k > 0 { "bott+1" } else { "bott-1" };
    Ok(ClassicalIdempotent {
        entries,
        character: CharacterData { rank: 1, degree: BOTT_DEGREE_SIGN * k },
        label: label.into(),
    })
}

/// Parses the labels used in configs: `trivial`, `trivial<r>`, `rank2`, `bott+1`, `bott-1`.
pub fn idempotent_by_name(name: &str) -> Result<ClassicalIdempotent> {
    match name {
        "trivial" => Ok(ClassicalIdempotent::trivial(1)),
        "rank2" => Ok(ClassicalIdempotent::trivial(2)),
        "bott+1" | "bott1" => bott_projector(1),
        "bott-1" => bott_projector(-1),
        other => {
            if let Some(r) = other.strip_prefix("trivial").and_then(|s| s.parse::<usize>().ok()) {
                if r >= 1 {
                    return Ok(ClassicalIdempotent::trivial(r));
                }
            }
            Err(Error::Config(format!("unknown idempotent {other:?}")))
        }
    }
}

/// Result of lifting an approximate idempotent to an exact one.
#[derive(Debug, Clone, Serialize)]
pub struct Lift {
    #[serde(skip)]
    pub operator: QuantOperator,
    /// Smallest distance of the spectrum of the starting point from `1/2`.
    pub gap: f64,
    pub iterations: usize,
    /// Frobenius norms of `x^2 - x`, starting with the unlifted matrix.
    pub residuals: Vec<f64>,
    /// Operator norm of `e~^2 - e~` for the returned matrix.
    pub idempotency_defect: f64,
    /// Operator norm of `e~ - a`.
    pub distance_from_start: f64,
}

const NEWTON_MAX_STEPS: usize = 30;
const NEWTON_TARGET: f64 = 1e-13;
const IDEMPOTENCY_TOL: f64 = 1e-12;

fn frobenius(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Quantizes `e` entrywise and projects to an exact idempotent with the
/// iteration `x <- 3 x^2 - 2 x^3`, which converges to the spectral projector
/// onto eigenvalues above `1/2` whenever the spectrum avoids `1/2`.
pub fn lift_idempotent(space: &SectionSpace, e: &ClassicalIdempotent, kind: MapKind, min_gap: f64) -> Result<Lift> {
    let entries: Vec<Vec<QuantOperator>> = e
        .entries
        .iter()
        .map(|row| row.iter().map(|f| quantize_auto(space, f, kind)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let start = QuantOperator::block(space, &entries)?;
    let ev = start.hermitian_eigenvalues();
    let gap = ev.iter().map(|l| (l - 0.5).abs()).fold(f64::INFINITY, f64::min);
    if gap < min_gap {
        return Err(Error::SpectralGap { gap, threshold: min_gap });
    }

    let a = start.matrix().clone();
    let mut x = a.clone();
    let residual = |x: &DMatrix<Complex64>| frobenius(&(x * x - x));
    let mut residuals = vec![residual(&x)];
    let mut iterations = 0;
    while *residuals.last().unwrap() > NEWTON_TARGET && iterations < NEWTON_MAX_STEPS {
        let x2 = &x * &x;
        let next = &x2 * Complex64::new(3.0, 0.0) - &x2 * &x * Complex64::new(2.0, 0.0);
        x = (&next + next.adjoint()) * Complex64::new(0.5, 0.0);
        iterations += 1;
        let r = residual(&x);
        let prev = *residuals.last().unwrap();
        residuals.push(r);
        // Roundoff floor: stop once an iteration no longer halves the residual.
        if r > 0.5 * prev && r < 1e-10 {
            break;
        }
    }
    let lifted = start.with_matrix(x);
    let idempotency_defect = operator_norm(&lifted.with_matrix(lifted.matrix() * lifted.matrix() - lifted.matrix()));
    if idempotency_defect > IDEMPOTENCY_TOL {
        return Err(Error::LiftDiverged { residual: idempotency_defect, iterations });
    }
    let distance_from_start = operator_norm(&lifted.with_matrix(lifted.matrix() - &a));
    Ok(Lift { operator: lifted, gap, iterations, residuals, idempotency_defect, distance_from_start })
}
