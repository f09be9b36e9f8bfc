use std::collections::BTreeMap;

use num_complex::Complex64;

use super::polynomial::SpherePolynomial;

type ZPoly = BTreeMap<(u32, u32), Complex64>;

fn zmul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let mut out = ZPoly::new();
    for (&(p1, q1), &c1) in a {
        for (&(p2, q2), &c2) in b {
            *out.entry((p1 + p2, q1 + q2)).or_default() += c1 * c2;
        }
    }
    out.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    out
}

fn zpow(a: &ZPoly, k: u32) -> ZPoly {
    let mut out = ZPoly::from([((0, 0), Complex64::new(1.0, 0.0))]);
    for _ in 0..k {
        out = zmul(&out, a);
    }
    out
}

/// A sphere polynomial written in the affine chart as
/// `numerator(z, zbar) / (1 + |z|^2)^denominator_power`.
#[derive(Debug, Clone)]
pub struct ChartForm {
    numerator: ZPoly,
    denominator_power: u32,
}

impl ChartForm {
    pub fn from_polynomial(p: &SpherePolynomial) -> Self {
        let d = p.degree() as u32;
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        // u, v, w times (1 + z zbar).
        let u_num = ZPoly::from([((0, 0), one), ((1, 1), -one)]);
        let v_num = ZPoly::from([((1, 0), one), ((0, 1), one)]);
        let w_num = ZPoly::from([((1, 0), -i), ((0, 1), i)]);
        let denom = ZPoly::from([((0, 0), one), ((1, 1), one)]);

        let mut numerator = ZPoly::new();
        for (&[a, b, c], &coef) in p.terms() {
            let mut t = zmul(&zmul(&zpow(&u_num, a), &zpow(&v_num, b)), &zpow(&w_num, c));
            t = zmul(&t, &zpow(&denom, d - a - b - c));
            for (k, val) in t {
                *numerator.entry(k).or_default() += coef * val;
            }
        }
        numerator.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Self { numerator, denominator_power: d }
    }

    pub fn degree_bound(&self) -> u32 {
        self.denominator_power
    }

    /// `d/dz` (`conjugate = false`) or `d/dzbar` (`conjugate = true`), exactly.
    pub fn wirtinger(&self, conjugate: bool) -> Self {
        let d = self.denominator_power;
        let mut numerator = ZPoly::new();
        for (&(p, q), &c) in &self.numerator {
            let (e, other) = if conjugate { (q, p) } else { (p, q) };
            let shift = |k: u32, l: u32| if conjugate { (l, k) } else { (k, l) };
            // dP * (1 + z zbar)
            if e > 0 {
                let c1 = c * e as f64;
                *numerator.entry(shift(e - 1, other)).or_default() += c1;
                *numerator.entry(shift(e, other + 1)).or_default() += c1;
            }
            // - d * (conjugate variable) * P
            *numerator.entry(shift(e, other + 1)).or_default() -= c * d as f64;
        }
        numerator.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Self { numerator, denominator_power: d + 1 }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        let num: Complex64 = self
            .numerator
            .iter()
            .map(|(&(p, q), &c)| c * z.powu(p) * zb.powu(q))
            .sum();
        num / (1.0 + z.norm_sqr()).powi(self.denominator_power as i32)
    }
}
