use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::point::SpherePoint;

/// Exponents of `u^a v^b w^c`.
pub type Exponents = [u32; 3];

/// Polynomial in the embedding coordinates `(u, v, w)` modulo `u^2 + v^2 + w^2 = 1`.
///
/// Canonical form eliminates `u^2` through `u^2 = 1 - v^2 - w^2`, so every
/// canonical monomial has `u`-exponent 0 or 1. The reduced monomials form a
/// basis of the quotient ring, so canonical forms compare coefficient-wise.
#[derive(Clone, Default)]
pub struct SpherePolynomial {
    terms: BTreeMap<Exponents, Complex64>,
    canonical: bool,
}

fn add_term(terms: &mut BTreeMap<Exponents, Complex64>, e: Exponents, c: Complex64) {
    if c == Complex64::new(0.0, 0.0) {
        return;
    }
    let slot = terms.entry(e).or_insert(Complex64::new(0.0, 0.0));
    *slot += c;
    if *slot == Complex64::new(0.0, 0.0) {
        terms.remove(&e);
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

impl SpherePolynomial {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new(), canonical: true }
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::monomial([0, 0, 0], c)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn u() -> Self {
        Self::monomial([1, 0, 0], 1.0)
    }

    pub fn v() -> Self {
        Self::monomial([0, 1, 0], 1.0)
    }

    pub fn w() -> Self {
        Self::monomial([0, 0, 1], 1.0)
    }

    pub fn monomial(e: Exponents, c: impl Into<Complex64>) -> Self {
        Self::from_terms([(e, c.into())])
    }

    /// Builds a polynomial and reduces it to canonical form.
    pub fn from_terms(terms: impl IntoIterator<Item = (Exponents, Complex64)>) -> Self {
        Self::from_raw_terms(terms).canonicalize()
    }

    /// Builds a polynomial without reducing it; `is_canonical` reports false
    /// until `canonicalize` is applied.
    pub fn from_raw_terms(terms: impl IntoIterator<Item = (Exponents, Complex64)>) -> Self {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            add_term(&mut map, e, c);
        }
        Self { terms: map, canonical: false }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: Exponents) -> Complex64 {
        self.terms.get(&e).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree of the stored representative (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|e| (e[0] + e[1] + e[2]) as usize).max().unwrap_or(0)
    }

    /// Reduces modulo `u^2 + v^2 + w^2 - 1`. Idempotent.
    pub fn canonicalize(&self) -> Self {
        if self.canonical {
            return self.clone();
        }
        let mut out = BTreeMap::new();
        for (&[a, b, c], &coef) in &self.terms {
            if a < 2 {
                add_term(&mut out, [a, b, c], coef);
                continue;
            }
            // u^a = u^(a mod 2) (1 - v^2 - w^2)^m, expanded by the multinomial theorem.
            let m = a / 2;
            let fm = factorial(m);
            for i in 0..=m {
                for j in 0..=(m - i) {
                    let l = m - i - j;
                    let sign = if (j + l) % 2 == 0 { 1.0 } else { -1.0 };
                    let weight = sign * fm / (factorial(i) * factorial(j) * factorial(l));
                    add_term(&mut out, [a % 2, b + 2 * j, c + 2 * l], coef * weight);
                }
            }
        }
        Self { terms: out, canonical: true }
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        let mut terms = BTreeMap::new();
        for (&e, &c) in &self.terms {
            add_term(&mut terms, e, c * s);
        }
        Self { terms, canonical: self.canonical }
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&e, c)| (e, c.conj())).collect(),
            canonical: self.canonical,
        }
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    pub fn eval(&self, p: &SpherePoint) -> Complex64 {
        self.eval_coords(p.u, p.v, p.w)
    }

    /// Evaluates the stored representative at arbitrary ambient coordinates.
    pub fn eval_coords(&self, u: f64, v: f64, w: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&[a, b, c], &coef)| coef * (u.powi(a as i32) * v.powi(b as i32) * w.powi(c as i32)))
            .sum()
    }

    /// Formal partial derivative of the stored representative along an ambient
    /// coordinate (0 = u, 1 = v, 2 = w). The result is not canonicalized.
    pub fn ambient_partial(&self, axis: usize) -> Self {
        let mut terms = BTreeMap::new();
        for (&e, &c) in &self.terms {
            if e[axis] == 0 {
                continue;
            }
            let mut d = e;
            d[axis] -= 1;
            add_term(&mut terms, d, c * e[axis] as f64);
        }
        Self { terms, canonical: false }
    }

    fn raw_mul(&self, other: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                add_term(&mut terms, [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], ca * cb);
            }
        }
        Self { terms, canonical: false }
    }

    fn raw_add(&self, other: &Self, sign: f64) -> Self {
        let mut terms = self.terms.clone();
        for (&e, &c) in &other.terms {
            add_term(&mut terms, e, c * sign);
        }
        Self { terms, canonical: false }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Largest absolute coefficient; used for "exactly zero" diagnostics.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.canonicalize().terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops coefficients with modulus at or below `tol`.
    pub fn chop(&self, tol: f64) -> Self {
        Self {
            terms: self.terms.iter().filter(|(_, c)| c.norm() > tol).map(|(&e, &c)| (e, c)).collect(),
            canonical: self.canonical,
        }
    }
}

impl PartialEq for SpherePolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.canonicalize().terms == other.canonicalize().terms
    }
}

impl fmt::Debug for SpherePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SpherePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&[a, b, c], coef) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if coef.im == 0.0 {
                write!(f, "{}", coef.re)?;
            } else {
                write!(f, "({}{:+}i)", coef.re, coef.im)?;
            }
            for (name, k) in [("u", a), ("v", b), ("w", c)] {
                match k {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

impl Add for &SpherePolynomial {
    type Output = SpherePolynomial;
    fn add(self, rhs: Self) -> SpherePolynomial {
        self.raw_add(rhs, 1.0).canonicalize()
    }
}

impl Sub for &SpherePolynomial {
    type Output = SpherePolynomial;
    fn sub(self, rhs: Self) -> SpherePolynomial {
        self.raw_add(rhs, -1.0).canonicalize()
    }
}

impl Mul for &SpherePolynomial {
    type Output = SpherePolynomial;
    fn mul(self, rhs: Self) -> SpherePolynomial {
        self.raw_mul(rhs).canonicalize()
    }
}

impl Neg for &SpherePolynomial {
    type Output = SpherePolynomial;
    fn neg(self) -> SpherePolynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for SpherePolynomial {
            type Output = SpherePolynomial;
            fn $m(self, rhs: Self) -> SpherePolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for SpherePolynomial {
    type Output = SpherePolynomial;
    fn neg(self) -> SpherePolynomial {
        -&self
    }
}

impl Serialize for SpherePolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let canon = self.canonicalize();
        let map: BTreeMap<String, [f64; 2]> = canon
            .terms
            .iter()
            .map(|(e, c)| (format!("{},{},{}", e[0], e[1], e[2]), [c.re, c.im]))
            .collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SpherePolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let map = BTreeMap::<String, [f64; 2]>::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(map.len());
        for (key, [re, im]) in map {
            let parts: Vec<&str> = key.split(',').collect();
            if parts.len() != 3 {
                return Err(D::Error::custom(format!("bad exponent key {key:?}")));
            }
            let mut e = [0u32; 3];
            for (slot, part) in e.iter_mut().zip(parts) {
                *slot = part
                    .trim()
                    .parse()
                    .map_err(|_| D::Error::custom(format!("bad exponent key {key:?}")))?;
            }
            terms.push((e, Complex64::new(re, im)));
        }
        Ok(SpherePolynomial::from_terms(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::point::fibonacci_points;

    #[test]
    fn defining_relation_reduces_to_one() {
        let (u, v, w) = (SpherePolynomial::u(), SpherePolynomial::v(), SpherePolynomial::w());
        let s = &(&(&u * &u) + &(&v * &v)) + &(&w * &w);
        assert_eq!(s, SpherePolynomial::one());
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn zero_stays_zero() {
        let z = SpherePolynomial::zero().canonicalize();
        assert!(z.is_zero());
        assert_eq!(z.degree(), 0);
    }

    #[test]
    fn u_squared_w_agrees_pointwise() {
        let raw = SpherePolynomial::from_raw_terms([([2, 0, 1], Complex64::new(1.0, 0.0))]);
        assert!(!raw.is_canonical());
        let canon = raw.canonicalize();
        let expected = SpherePolynomial::from_raw_terms([
            ([0, 0, 1], Complex64::new(1.0, 0.0)),
            ([0, 2, 1], Complex64::new(-1.0, 0.0)),
            ([0, 0, 3], Complex64::new(-1.0, 0.0)),
        ]);
        assert_eq!(canon, expected);
        for p in fibonacci_points(20) {
            assert!((raw.eval(&p) - canon.eval(&p)).norm() < 1e-13);
        }
    }

    #[test]
    fn canonical_forms_have_low_u_degree() {
        let raw = SpherePolynomial::from_raw_terms([
            ([5, 1, 0], Complex64::new(2.0, 0.0)),
            ([4, 0, 2], Complex64::new(0.0, 1.0)),
        ]);
        let canon = raw.canonicalize();
        assert!(canon.terms().all(|(e, _)| e[0] < 2));
        assert_eq!(canon.canonicalize(), canon);
    }

    #[test]
    fn json_round_trip() {
        let p = &SpherePolynomial::u() * &SpherePolynomial::v().scale(Complex64::new(1.5, -2.0));
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"1,1,0":[1.5,-2.0]}"#);
        let back: SpherePolynomial = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<SpherePolynomial>(r#"{"1,1":[1,0]}"#).is_err());
    }
}
