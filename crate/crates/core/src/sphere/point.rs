use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ON_SPHERE_TOL: f64 = 1e-12;

/// A point of the sphere in embedding coordinates.
///
/// `u` is the height coordinate: the chart point `z = 0` sits at `u = 1`
/// (the north pole) and `z = infinity` at `u = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl SpherePoint {
    pub fn new(u: f64, v: f64, w: f64) -> Result<Self> {
        if ((u * u + v * v + w * w) - 1.0).abs() > ON_SPHERE_TOL {
            return Err(Error::NotOnSphere { u, v, w });
        }
        Ok(Self { u, v, w })
    }

    pub fn north_pole() -> Self {
        Self { u: 1.0, v: 0.0, w: 0.0 }
    }

    pub fn south_pole() -> Self {
        Self { u: -1.0, v: 0.0, w: 0.0 }
    }

    /// Polar angle measured from the north pole and azimuth in the (v, w) plane.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { u: c, v: s * phi.cos(), w: s * phi.sin() }
    }

    /// Inverse stereographic projection of the affine chart.
    pub fn from_chart(z: Complex64) -> Self {
        let r2 = z.norm_sqr();
        let d = 1.0 + r2;
        Self { u: (1.0 - r2) / d, v: 2.0 * z.re / d, w: 2.0 * z.im / d }
    }

    /// Chart coordinate `z = (v + i w) / (1 + u)`; `None` at the south pole.
    pub fn to_chart(&self) -> Option<Complex64> {
        let d = 1.0 + self.u;
        if d <= f64::EPSILON {
            return None;
        }
        Some(Complex64::new(self.v / d, self.w / d))
    }

    /// `t = (1 - u) / 2 = sin^2(theta / 2)`.
    pub fn half_height(&self) -> f64 {
        ((1.0 - self.u) * 0.5).clamp(0.0, 1.0)
    }

    pub fn azimuth(&self) -> f64 {
        self.w.atan2(self.v)
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.u, self.v, self.w]
    }

    /// Rotation by `angle` about the u-axis.
    pub fn rotate_about_u(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { u: self.u, v: c * self.v - s * self.w, w: s * self.v + c * self.w }
    }
}

/// Deterministic quasi-uniform points (Fibonacci lattice in `u`).
pub fn fibonacci_points(count: usize) -> Vec<SpherePoint> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let u = 1.0 - (2 * i + 1) as f64 / count as f64;
            let s = (1.0 - u * u).max(0.0).sqrt();
            let phi = golden * i as f64;
            SpherePoint { u, v: s * phi.cos(), w: s * phi.sin() }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_off_sphere() {
        assert!(SpherePoint::new(1.0, 0.1, 0.0).is_err());
        assert!(SpherePoint::new(0.6, 0.8, 0.0).is_ok());
    }

    #[test]
    fn chart_round_trip() {
        let z = Complex64::new(0.3, -1.7);
        let p = SpherePoint::from_chart(z);
        assert!((p.u * p.u + p.v * p.v + p.w * p.w - 1.0).abs() < 1e-14);
        assert!((p.to_chart().unwrap() - z).norm() < 1e-13);
        assert_eq!(SpherePoint::from_chart(Complex64::new(0.0, 0.0)), SpherePoint::north_pole());
        assert!(SpherePoint::south_pole().to_chart().is_none());
    }

    #[test]
    fn fibonacci_points_lie_on_sphere() {
        for p in fibonacci_points(257) {
            assert!((p.u * p.u + p.v * p.v + p.w * p.w - 1.0).abs() < 1e-12);
        }
    }
}
