//! The matrix algebras `A_N = End(H_N)` and the quantization maps into them.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::{csv_line, fmt_f64, round17};
use crate::section::SectionSpace;
use crate::sphere::{build_grid, laplacian, QuadratureGrid, SpherePoint, SpherePolynomial};

/// Which quantization map to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    #[default]
    Toeplitz,
    Geometric,
}

impl std::str::FromStr for MapKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "toeplitz" => Ok(Self::Toeplitz),
            "geometric" => Ok(Self::Geometric),
            other => Err(Error::Parse(format!("unknown map kind {other:?}"))),
        }
    }
}

/// A dense operator on `H_N` (or on `H_N^m` for `blocks = m`), written in the
/// orthonormal monomial basis with `j` ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantOperator {
    space: SectionSpace,
    blocks: usize,
    matrix: DMatrix<Complex64>,
}

impl QuantOperator {
    pub fn from_matrix(space: &SectionSpace, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != matrix.ncols() || d == 0 && matrix.nrows() != 0 || d > 0 && matrix.nrows() % d != 0 {
            return Err(Error::LengthMismatch { expected: d, found: matrix.nrows() });
        }
        let blocks = if d == 0 { 1 } else { matrix.nrows() / d };
        Ok(Self { space: space.clone(), blocks, matrix })
    }

    pub fn identity(space: &SectionSpace) -> Self {
        let d = space.dim();
        Self { space: space.clone(), blocks: 1, matrix: DMatrix::identity(d, d) }
    }

    pub fn zero(space: &SectionSpace, blocks: usize) -> Self {
        let d = space.dim() * blocks;
        Self { space: space.clone(), blocks, matrix: DMatrix::zeros(d, d) }
    }

    /// Assembles an `m x m` block operator over `H_N^m`.
    pub fn block(space: &SectionSpace, entries: &[Vec<QuantOperator>]) -> Result<Self> {
        let m = entries.len();
        let d = space.dim();
        let mut matrix = DMatrix::zeros(m * d, m * d);
        for (r, row) in entries.iter().enumerate() {
            if row.len() != m {
                return Err(Error::LengthMismatch { expected: m, found: row.len() });
            }
            for (c, op) in row.iter().enumerate() {
                if op.blocks != 1 || op.matrix.nrows() != d {
                    return Err(Error::LengthMismatch { expected: d, found: op.matrix.nrows() });
                }
                matrix.view_mut((r * d, c * d), (d, d)).copy_from(&op.matrix);
            }
        }
        Ok(Self { space: space.clone(), blocks: m, matrix })
    }

    pub fn space(&self) -> &SectionSpace {
        &self.space
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn with_matrix(&self, matrix: DMatrix<Complex64>) -> Self {
        Self { space: self.space.clone(), blocks: self.blocks, matrix }
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> Self {
        self.with_matrix(&self.matrix * s.into())
    }

    pub fn adjoint(&self) -> Self {
        self.with_matrix(self.matrix.adjoint())
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.with_matrix(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.matrix - self.matrix.adjoint()).iter().all(|c| c.norm() <= tol)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        if self.size() == 0 {
            return Vec::new();
        }
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<[f64; 2]> =
            self.row_major().map(|c| [round17(c.re), round17(c.im)]).collect();
        json!({
            "N": self.space.level(),
            "k0": self.space.k0(),
            "M": self.space.total_degree(),
            "basis": "ortho-monomial-asc",
            "blocks": self.blocks,
            "size": self.size(),
            "entries": entries,
        })
    }

    /// Flat CSV: a `#` header line, then `row,col,re,im` per entry in row-major order.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# N={},k0={},M={},basis=ortho-monomial-asc,blocks={}\n",
            self.space.level(),
            self.space.k0(),
            self.space.total_degree(),
            self.blocks
        );
        out.push_str(&csv_line(["row", "col", "re", "im"]));
        let n = self.size();
        for (idx, c) in self.row_major().enumerate() {
            out.push_str(&csv_line([(idx / n).to_string(), (idx % n).to_string(), fmt_f64(c.re), fmt_f64(c.im)]));
        }
        out
    }

    fn row_major(&self) -> impl Iterator<Item = Complex64> + '_ {
        let n = self.size();
        (0..n * n).map(move |idx| self.matrix[(idx / n, idx % n)])
    }
}

impl Add for &QuantOperator {
    type Output = QuantOperator;
    fn add(self, rhs: Self) -> QuantOperator {
        self.with_matrix(&self.matrix + &rhs.matrix)
    }
}

impl Sub for &QuantOperator {
    type Output = QuantOperator;
    fn sub(self, rhs: Self) -> QuantOperator {
        self.with_matrix(&self.matrix - &rhs.matrix)
    }
}

impl Mul for &QuantOperator {
    type Output = QuantOperator;
    fn mul(self, rhs: Self) -> QuantOperator {
        self.with_matrix(&self.matrix * &rhs.matrix)
    }
}

/// Smallest grid order that integrates every Toeplitz matrix element of `f` exactly.
///
/// `conj(e_j) e_k` is a sphere polynomial of degree `M`, so the integrands
/// have degree `M + deg f`.
pub fn required_order(space: &SectionSpace, f: &SpherePolynomial) -> usize {
    (space.total_degree().max(0) as usize + f.degree()).max(1)
}

/// Builds a grid sized for `toeplitz(space, f, _)`.
pub fn grid_for(space: &SectionSpace, f: &SpherePolynomial) -> Result<QuadratureGrid> {
    build_grid(required_order(space, f))
}

/// Toeplitz operator: multiply by `f`, project back onto `H_N`.
pub fn toeplitz(space: &SectionSpace, f: &SpherePolynomial, grid: &QuadratureGrid) -> Result<QuantOperator> {
    let m = space.require_nonempty()?;
    let required = required_order(space, f);
    if grid.exactness() < required {
        return Err(Error::InsufficientGrid { required, available: grid.exactness() });
    }
    let f = f.canonicalize();
    let dim = m + 1;
    let na = grid.azimuth_count();
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    let mut fourier = vec![Complex64::new(0.0, 0.0); 2 * m + 1];
    let phases: Vec<Complex64> = (0..na).map(|k| Complex64::from_polar(1.0, grid.azimuth(k))).collect();

    for (u, ring_weight) in grid.rings() {
        let s = (1.0 - u * u).max(0.0).sqrt();
        // fourier[d + m] = mean over azimuths of f e^{i d phi}
        fourier.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        for (k, ph) in phases.iter().enumerate() {
            let phi = grid.azimuth(k);
            let val = f.eval_coords(u, s * phi.cos(), s * phi.sin()) / na as f64;
            let mut e = ph.conj().powu(m as u32);
            for slot in fourier.iter_mut() {
                *slot += val * e;
                e *= ph;
            }
        }
        let amps = space.frame_amplitudes((1.0 - u) * 0.5);
        for j in 0..dim {
            let wj = ring_weight * amps[j];
            for k in 0..dim {
                matrix[(j, k)] += fourier[k + m - j] * (wj * amps[k]);
            }
        }
    }
    Ok(QuantOperator { space: space.clone(), blocks: 1, matrix })
}

/// `f + sign * Delta f / (2N)`; `sign = +1` is the nonnegative-Laplacian
/// convention used by `geometric`.
pub fn geometric_symbol(level: i64, f: &SpherePolynomial, sign: f64) -> Result<SpherePolynomial> {
    if level < 1 {
        return Err(Error::ZeroLevel(level));
    }
    Ok(f + &laplacian(f).scale(sign / (2.0 * level as f64)))
}

/// Geometric quantization `Q_N(f) = T_N(f + Delta f / 2N)`.
pub fn geometric(space: &SectionSpace, f: &SpherePolynomial, grid: &QuadratureGrid) -> Result<QuantOperator> {
    toeplitz(space, &geometric_symbol(space.level(), f, 1.0)?, grid)
}

pub fn quantize(space: &SectionSpace, f: &SpherePolynomial, grid: &QuadratureGrid, kind: MapKind) -> Result<QuantOperator> {
    match kind {
        MapKind::Toeplitz => toeplitz(space, f, grid),
        MapKind::Geometric => geometric(space, f, grid),
    }
}

/// Quantizes with a freshly sized grid.
pub fn quantize_auto(space: &SectionSpace, f: &SpherePolynomial, kind: MapKind) -> Result<QuantOperator> {
    quantize(space, f, &grid_for(space, f)?, kind)
}

/// Normalized reproducing-kernel vector at a point.
#[derive(Debug, Clone)]
pub struct CoherentState {
    pub point: SpherePoint,
    pub vector: DVector<Complex64>,
}

pub fn coherent_state(space: &SectionSpace, x: &SpherePoint) -> Result<CoherentState> {
    space.require_nonempty()?;
    let vals = space.frame_values(x);
    let norm = vals.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let vector = DVector::from_iterator(vals.len(), vals.into_iter().map(|c| c.conj() / norm));
    Ok(CoherentState { point: *x, vector })
}

/// Berezin symbol `<c_x, A c_x>`. For block operators the diagonal block
/// symbols are summed.
pub fn symbol(a: &QuantOperator, x: &SpherePoint) -> Result<Complex64> {
    let c = coherent_state(&a.space, x)?.vector;
    let d = c.len();
    let mut total = Complex64::new(0.0, 0.0);
    for b in 0..a.blocks {
        let blk = a.matrix.view((b * d, b * d), (d, d));
        total += c.dotc(&(blk * &c));
    }
    Ok(total)
}

/// Largest singular value.
pub fn operator_norm(a: &QuantOperator) -> f64 {
    if a.size() == 0 {
        return 0.0;
    }
    a.matrix.singular_values().iter().copied().fold(0.0, f64::max)
}

pub fn partial_trace(a: &QuantOperator) -> Complex64 {
    a.matrix.trace()
}
