//! Holomorphic section spaces `H_N = Gamma_hol(O(M))`, `M = N + k0`.
//!
//! Sections are polynomials of degree `<= M` in the chart variable `z`, with
//! the Fubini-Study Hermitian metric `|s|^2 (1 + |z|^2)^(-M)`. The inner
//! product is scaled so that `<1, 1> = 1` at every level; the monomials `z^j`
//! are orthogonal with `<z^j, z^j> = 1 / binom(M, j)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{build_grid, SpherePoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "SectionSpaceRecord", into = "SectionSpaceRecord")]
pub struct SectionSpace {
    level: i64,
    k0: i64,
    total_degree: i64,
    gram_diag: Vec<f64>,
    ortho_scale: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SectionSpaceRecord {
    #[serde(rename = "N")]
    level: i64,
    k0: i64,
    #[serde(rename = "M")]
    total_degree: i64,
    gram_diag: Vec<f64>,
}

impl From<SectionSpaceRecord> for SectionSpace {
    fn from(r: SectionSpaceRecord) -> Self {
        let ortho_scale = r.gram_diag.iter().map(|g| g.powf(-0.5)).collect();
        Self { level: r.level, k0: r.k0, total_degree: r.total_degree, gram_diag: r.gram_diag, ortho_scale }
    }
}

impl From<SectionSpace> for SectionSpaceRecord {
    fn from(s: SectionSpace) -> Self {
        Self { level: s.level, k0: s.k0, total_degree: s.total_degree, gram_diag: s.gram_diag }
    }
}

/// `binom(m, j)` in floating point; exact for the sizes used here (`m <= 256`).
pub fn binomial(m: usize, j: usize) -> f64 {
    let j = j.min(m - j);
    (0..j).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

impl SectionSpace {
    /// Level `N` twisted by `O(k0)`. Negative total degree gives the zero space.
    pub fn new(level: i64, k0: i64) -> Self {
        let total_degree = level + k0;
        let gram_diag: Vec<f64> = if total_degree < 0 {
            Vec::new()
        } else {
            let m = total_degree as usize;
            (0..=m).map(|j| 1.0 / binomial(m, j)).collect()
        };
        let ortho_scale = gram_diag.iter().map(|g| g.powf(-0.5)).collect();
        Self { level, k0, total_degree, gram_diag, ortho_scale }
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn k0(&self) -> i64 {
        self.k0
    }

    /// `M = N + k0`.
    pub fn total_degree(&self) -> i64 {
        self.total_degree
    }

    pub fn dim(&self) -> usize {
        self.gram_diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gram_diag.is_empty()
    }

    pub fn gram_diag(&self) -> &[f64] {
        &self.gram_diag
    }

    pub fn ortho_scale(&self) -> &[f64] {
        &self.ortho_scale
    }

    pub fn gram_entry(&self, j: usize) -> Result<f64> {
        self.gram_diag.get(j).copied().ok_or(Error::IndexOutOfRange { index: j, dim: self.dim() })
    }

    pub(crate) fn require_nonempty(&self) -> Result<usize> {
        if self.is_empty() {
            return Err(Error::EmptySpace { level: self.level, k0: self.k0 });
        }
        Ok(self.total_degree as usize)
    }

    /// Pointwise values of the orthonormal basis `e_j` in a unitary frame,
    /// scaled so that `T_jk = integral conj(e_j) f e_k` against `omega / 2 pi`.
    ///
    /// `e_j = sqrt((M + 1) binom(M, j)) t^(j/2) (1 - t)^((M - j)/2) e^(i j phi)`
    /// with `t = (1 - u) / 2`.
    pub fn frame_values(&self, x: &SpherePoint) -> Vec<Complex64> {
        let m = self.dim().saturating_sub(1);
        let amps = self.frame_amplitudes(x.half_height());
        let rho = (x.v * x.v + x.w * x.w).sqrt();
        let phase = if rho > 0.0 { Complex64::new(x.v / rho, x.w / rho) } else { Complex64::new(1.0, 0.0) };
        debug_assert_eq!(amps.len(), m + 1);
        amps.into_iter().enumerate().map(|(j, a)| phase.powu(j as u32) * a).collect()
    }

    /// The real amplitudes `sqrt((M + 1) binom(M, j)) t^(j/2) (1 - t)^((M - j)/2)`.
    pub(crate) fn frame_amplitudes(&self, t: f64) -> Vec<f64> {
        if self.is_empty() {
            return Vec::new();
        }
        let m = self.total_degree as usize;
        let (st, sc) = (t.sqrt(), (1.0 - t).max(0.0).sqrt());
        let norm = ((m + 1) as f64).sqrt();
        (0..=m)
            .map(|j| norm * self.ortho_scale[j] * st.powi(j as i32) * sc.powi((m - j) as i32))
            .collect()
    }

    /// Recomputes the Gram diagonal by quadrature of
    /// `(M + 1) |z|^(2j) (1 + |z|^2)^(-M)` in the chart. The integrand is a
    /// sphere polynomial of degree `M`, so the rule is exact.
    pub fn gram_by_quadrature(&self) -> Result<Vec<f64>> {
        let m = self.require_nonempty()?;
        let grid = build_grid(m.max(1))?;
        let mut out = vec![0.0; m + 1];
        for (p, wgt) in grid.nodes() {
            let r2 = p.to_chart().map(|z| z.norm_sqr()).unwrap_or(f64::INFINITY);
            let log_den = (m as f64) * r2.ln_1p();
            for (j, slot) in out.iter_mut().enumerate() {
                let log_num = if j == 0 { 0.0 } else { j as f64 * r2.ln() };
                *slot += wgt * (log_num - log_den).exp();
            }
        }
        Ok(out.into_iter().map(|g| g * (m + 1) as f64).collect())
    }
}

pub fn make_space(level: i64, k0: i64) -> SectionSpace {
    SectionSpace::new(level, k0)
}
