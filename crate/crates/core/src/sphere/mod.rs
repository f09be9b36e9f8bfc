//! The classical side: points, observables, Poisson bracket, Laplacian and
//! exact quadrature on the sphere.

mod calculus;
mod chart;
mod point;
mod polynomial;
mod quadrature;

pub use calculus::{laplacian, poisson_bracket};
pub use chart::ChartForm;
pub use point::{fibonacci_points, SpherePoint};
pub use polynomial::{Exponents, SpherePolynomial};
pub use quadrature::{build_grid, gauss_legendre, integrate, QuadratureGrid};

use crate::error::{Error, Result};

/// Max of `|f|` over a deterministic Fibonacci sample set plus the poles,
/// with the best few samples polished by a local pattern search. Still a
/// lower bound on the true sup norm, but accurate to near roundoff for
/// smooth polynomials once `samples` resolves the extrema.
pub fn sup_norm(f: &SpherePolynomial, samples: usize) -> Result<f64> {
    if samples < 100 {
        return Err(Error::Config(format!("sup_norm needs >= 100 samples (got {samples})")));
    }
    let mut scored: Vec<(f64, SpherePoint)> = fibonacci_points(samples)
        .into_iter()
        .chain([SpherePoint::north_pole(), SpherePoint::south_pole()])
        .map(|p| (f.eval(&p).norm(), p))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let step = 2.0 * (4.0 / samples as f64).sqrt();
    Ok(scored.iter().take(8).map(|(v, p)| polish(f, *p, *v, step)).fold(0.0, f64::max))
}

/// Hill-climbs `|f|` from `start` along a tangent frame, halving the step on failure.
fn polish(f: &SpherePolynomial, start: SpherePoint, value: f64, mut step: f64) -> f64 {
    let (mut x, mut best) = (start.coords(), value);
    while step > 1e-9 {
        let helper = if x[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let t1 = normalize(cross(x, helper));
        let t2 = cross(x, t1);
        let mut improved = false;
        for (a, b) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let y = normalize([0, 1, 2].map(|i| x[i] + step * (a * t1[i] + b * t2[i])));
            let val = f.eval_coords(y[0], y[1], y[2]).norm();
            if val > best {
                (x, best, improved) = (y, val, true);
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    a.map(|x| x / n)
}
