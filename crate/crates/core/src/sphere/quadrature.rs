use std::f64::consts::PI;

use num_complex::Complex64;

use super::point::SpherePoint;
use super::polynomial::SpherePolynomial;
use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let wgt = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = wgt;
        weights[n - 1 - i] = wgt;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Product rule on the sphere: Gauss-Legendre in `u = cos(theta)` times a
/// uniform azimuthal rule. Weights are normalized to total mass 1, i.e. they
/// integrate against `omega / 2 pi`.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    heights: Vec<f64>,
    height_weights: Vec<f64>,
    azimuths: usize,
    exactness: usize,
}

impl QuadratureGrid {
    pub fn exactness(&self) -> usize {
        self.exactness
    }

    pub fn len(&self) -> usize {
        self.heights.len() * self.azimuths
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Heights `u_i` with their (normalized, azimuth-summed) weights.
    pub fn rings(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.heights.iter().copied().zip(self.height_weights.iter().copied())
    }

    pub fn azimuth_count(&self) -> usize {
        self.azimuths
    }

    pub fn azimuth(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.azimuths as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = (SpherePoint, f64)> + '_ {
        let na = self.azimuths;
        self.rings().flat_map(move |(u, wgt)| {
            let s = (1.0 - u * u).max(0.0).sqrt();
            (0..na).map(move |k| {
                let phi = 2.0 * PI * k as f64 / na as f64;
                (SpherePoint { u, v: s * phi.cos(), w: s * phi.sin() }, wgt / na as f64)
            })
        })
    }

    pub fn weights(&self) -> Vec<f64> {
        self.nodes().map(|(_, w)| w).collect()
    }
}

/// Builds a product grid exact for sphere polynomials of degree `<= order`.
pub fn build_grid(order: usize) -> Result<QuadratureGrid> {
    if order < 1 {
        return Err(Error::Config(format!("quadrature order must be >= 1 (got {order})")));
    }
    let n = (order + 2) / 2;
    let (heights, w) = gauss_legendre(n);
    let height_weights = w.into_iter().map(|x| 0.5 * x).collect();
    let azimuths = order + 1;
    Ok(QuadratureGrid { heights, height_weights, azimuths, exactness: (2 * n - 1).min(azimuths - 1) })
}

/// Integral of `f` against `omega / 2 pi`.
pub fn integrate(grid: &QuadratureGrid, f: &SpherePolynomial) -> Result<Complex64> {
    let degree = f.degree();
    if degree > grid.exactness {
        return Err(Error::DegreeOverflow { degree, exactness: grid.exactness });
    }
    Ok(grid.nodes().map(|(p, wgt)| f.eval(&p) * wgt).sum())
}
