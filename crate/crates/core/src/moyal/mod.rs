//! Truncated formal Weyl algebra over `R^{2n}` with the Moyal-Weyl product
//! `f * g = m o exp(-(i hbar / 2) pi) (f (x) g)`, in exact complex-rational
//! arithmetic.
//!
//! Coefficients are polynomials in the phase-space variables, ordered
//! `(x_1, p_1, ..., x_n, p_n)` with `{x_i, p_j} = delta_ij`. Since the
//! bidifferential expansion of a polynomial product terminates, truncation at
//! `hbar^K` discards higher `hbar` weight and never introduces error below it.

mod bidiff;
mod checks;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub use bidiff::{derivative, Bidifferential};
pub use checks::{random_series, run_axiom_checks, AxiomReport};

/// Exact complex rational.
pub type Coeff = Complex<BigRational>;
/// Exponents over the `2n` phase-space variables.
pub type Monomial = Vec<u32>;
/// Polynomial in the phase-space variables.
pub type Poly = BTreeMap<Monomial, Coeff>;

/// Default truncation order in `hbar`.
pub const DEFAULT_TRUNCATION: i32 = 6;

pub fn rational(num: i64, den: i64) -> Coeff {
    Coeff::new(BigRational::new(num.into(), den.into()), BigRational::zero())
}

pub fn imaginary(num: i64, den: i64) -> Coeff {
    Coeff::new(BigRational::zero(), BigRational::new(num.into(), den.into()))
}

/// Element of `hbar^(min_power) W[hbar]` truncated above `hbar^K`.
///
/// `min_power` is 0 for the Weyl algebra itself and -1 for the Lie algebra
/// `hbar^(-1) W` acting on it by commutators.
#[derive(Clone, PartialEq)]
pub struct FormalSeries {
    pairs: usize,
    truncation: i32,
    min_power: i32,
    terms: BTreeMap<(Monomial, i32), Coeff>,
}

impl FormalSeries {
    pub fn zero(pairs: usize, truncation: i32) -> Self {
        Self { pairs, truncation, min_power: 0, terms: BTreeMap::new() }
    }

    pub fn constant(pairs: usize, truncation: i32, c: Coeff) -> Self {
        let mut s = Self::zero(pairs, truncation);
        s.add_term(vec![0; 2 * pairs], 0, c);
        s
    }

    pub fn one(pairs: usize, truncation: i32) -> Self {
        Self::constant(pairs, truncation, Coeff::one())
    }

    /// Phase-space coordinate number `index` in the order `(x_1, p_1, ...)`.
    pub fn variable(pairs: usize, truncation: i32, index: usize) -> Self {
        let mut m = vec![0; 2 * pairs];
        m[index] = 1;
        let mut s = Self::zero(pairs, truncation);
        s.add_term(m, 0, Coeff::one());
        s
    }

    pub fn x(pairs: usize, truncation: i32, i: usize) -> Self {
        Self::variable(pairs, truncation, 2 * i)
    }

    pub fn p(pairs: usize, truncation: i32, i: usize) -> Self {
        Self::variable(pairs, truncation, 2 * i + 1)
    }

    pub fn hbar(pairs: usize, truncation: i32) -> Self {
        Self::constant(pairs, truncation, Coeff::one()).hbar_shift(1).expect("shift up is always valid")
    }

    /// Builds a series from `(exponents, hbar power, coefficient)` triples.
    pub fn from_terms(
        pairs: usize,
        truncation: i32,
        min_power: i32,
        terms: impl IntoIterator<Item = (Monomial, i32, Coeff)>,
    ) -> Result<Self> {
        if min_power < -1 {
            return Err(Error::HbarPower(min_power));
        }
        let mut s = Self { pairs, truncation, min_power, terms: BTreeMap::new() };
        for (m, h, c) in terms {
            if m.len() != 2 * pairs {
                return Err(Error::LengthMismatch { expected: 2 * pairs, found: m.len() });
            }
            if h < min_power {
                return Err(Error::HbarPower(h));
            }
            s.add_term(m, h, c);
        }
        Ok(s)
    }

    fn add_term(&mut self, m: Monomial, h: i32, c: Coeff) {
        if h > self.truncation || c.is_zero() {
            return;
        }
        let key = (m, h);
        let slot = self.terms.entry(key.clone()).or_insert_with(Coeff::zero);
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn truncation(&self) -> i32 {
        self.truncation
    }

    pub fn min_power(&self) -> i32 {
        self.min_power
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i32, &Coeff)> {
        self.terms.iter().map(|((m, h), c)| (m, *h, c))
    }

    pub fn coefficient(&self, m: &[u32], h: i32) -> Coeff {
        self.terms.get(&(m.to_vec(), h)).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Polynomial coefficient of `hbar^h`.
    pub fn hbar_part(&self, h: i32) -> Poly {
        self.terms.iter().filter(|((_, p), _)| *p == h).map(|((m, _), c)| (m.clone(), c.clone())).collect()
    }

    fn hbar_powers(&self) -> Vec<i32> {
        let mut hs: Vec<i32> = self.terms.keys().map(|(_, h)| *h).collect();
        hs.sort_unstable();
        hs.dedup();
        hs
    }

    /// Largest modulus bound `|re| + |im|` over stored coefficients.
    pub fn max_abs(&self) -> BigRational {
        self.terms.values().map(|c| c.re.abs() + c.im.abs()).max().unwrap_or_else(BigRational::zero)
    }

    /// Polynomial degree in the phase-space variables.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(m, _)| m.iter().sum()).max().unwrap_or(0)
    }

    /// Multiplies by `hbar^k`, keeping the truncation order.
    pub fn hbar_shift(&self, k: i32) -> Result<Self> {
        let min_power = (self.min_power + k).min(self.min_power).min(0);
        if min_power < -1 {
            return Err(Error::HbarPower(self.min_power + k));
        }
        let mut out = Self { pairs: self.pairs, truncation: self.truncation, min_power, terms: BTreeMap::new() };
        for ((m, h), c) in &self.terms {
            if h + k < -1 {
                return Err(Error::HbarPower(h + k));
            }
            out.add_term(m.clone(), h + k, c.clone());
        }
        Ok(out)
    }

    pub fn with_truncation(&self, truncation: i32) -> Self {
        let mut out = Self { truncation, terms: BTreeMap::new(), ..self.clone() };
        for ((m, h), c) in &self.terms {
            out.add_term(m.clone(), *h, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Coeff) -> Self {
        let mut out = Self { terms: BTreeMap::new(), ..self.clone() };
        for ((m, h), c) in &self.terms {
            out.add_term(m.clone(), *h, c * s);
        }
        out
    }

    fn check_pairs(&self, other: &Self) -> Result<()> {
        if self.pairs != other.pairs {
            return Err(Error::PhaseSpaceMismatch { left: self.pairs, right: other.pairs });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_pairs(other)?;
        let mut out = self.clone();
        out.truncation = self.truncation.min(other.truncation);
        out.min_power = self.min_power.min(other.min_power);
        out.terms.retain(|(_, h), _| *h <= out.truncation);
        for ((m, h), c) in &other.terms {
            out.add_term(m.clone(), *h, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Coeff::one()))
    }

    /// Flat Poisson bracket of the `hbar`-coefficients, `hbar`-bilinear.
    pub fn poisson_bracket(&self, other: &Self) -> Result<Self> {
        self.check_pairs(other)?;
        let pi = Bidifferential::poisson(self.pairs);
        let truncation = self.truncation.min(other.truncation);
        let mut out = Self { pairs: self.pairs, truncation, min_power: self.min_power + other.min_power, terms: BTreeMap::new() };
        out.min_power = out.min_power.min(0);
        for a in self.hbar_powers() {
            for b in other.hbar_powers() {
                for (m, c) in pi.apply(&self.hbar_part(a), &other.hbar_part(b)) {
                    out.add_term(m, a + b, c);
                }
            }
        }
        Ok(out)
    }

    /// Complex conjugation of every coefficient; `hbar` is real.
    pub fn star_conjugate(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.conj())).collect(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|((m, h), c)| {
                json!({
                    "exponents": m,
                    "hbar": h,
                    "coeff": [big_json(c.re.numer()), big_json(c.re.denom()), big_json(c.im.numer()), big_json(c.im.denom())],
                })
            })
            .collect();
        json!({ "n": self.pairs, "K": self.truncation, "terms": terms })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("formal series JSON: {what}"));
        let pairs = value["n"].as_u64().ok_or_else(|| bad("missing n"))? as usize;
        let truncation = value["K"].as_i64().ok_or_else(|| bad("missing K"))? as i32;
        let mut triples = Vec::new();
        for t in value["terms"].as_array().ok_or_else(|| bad("missing terms"))? {
            let m: Monomial = serde_json::from_value(t["exponents"].clone()).map_err(|e| bad(&e.to_string()))?;
            let h = t["hbar"].as_i64().ok_or_else(|| bad("missing hbar"))? as i32;
            let parts = t["coeff"].as_array().filter(|a| a.len() == 4).ok_or_else(|| bad("coeff must have 4 entries"))?;
            let nums: Vec<BigInt> = parts.iter().map(parse_big).collect::<Result<_>>()?;
            if nums[1].is_zero() || nums[3].is_zero() {
                return Err(bad("zero denominator"));
            }
            let c = Coeff::new(
                BigRational::new(nums[0].clone(), nums[1].clone()),
                BigRational::new(nums[2].clone(), nums[3].clone()),
            );
            triples.push((m, h, c));
        }
        let min_power = triples.iter().map(|(_, h, _)| *h).min().unwrap_or(0).min(0);
        Self::from_terms(pairs, truncation, min_power, triples)
    }
}

fn big_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn parse_big(v: &Value) -> Result<BigInt> {
    if let Some(i) = v.as_i64() {
        return Ok(BigInt::from(i));
    }
    v.as_str()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad integer {v}")))
}

impl fmt::Debug for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormalSeries(n={}, K={}) [", self.pairs, self.truncation)?;
        for ((m, h), c) in &self.terms {
            write!(f, " ({} + {}i) {m:?} hbar^{h};", c.re, c.im)?;
        }
        write!(f, " ]")
    }
}

/// `(-i/2)^j / j!`.
fn moyal_weight(j: usize) -> Coeff {
    let mut w = Coeff::one();
    for k in 1..=j {
        w = &w * &imaginary(-1, 2 * k as i64);
    }
    w
}

/// Moyal-Weyl product truncated at `hbar^K`.
pub fn moyal_product(f: &FormalSeries, g: &FormalSeries, truncation: i32) -> Result<FormalSeries> {
    f.check_pairs(g)?;
    let pi = Bidifferential::poisson(f.pairs);
    let max_j = f.degree().min(g.degree()) as usize;
    let powers: Vec<Bidifferential> =
        std::iter::successors(Some(Bidifferential::identity(2 * f.pairs)), |b| Some(b.compose(&pi))).take(max_j + 1).collect();
    let mut out = FormalSeries {
        pairs: f.pairs,
        truncation,
        min_power: (f.min_power + g.min_power).min(0),
        terms: BTreeMap::new(),
    };
    let parts_f: Vec<(i32, Poly)> = f.hbar_powers().into_iter().map(|h| (h, f.hbar_part(h))).collect();
    let parts_g: Vec<(i32, Poly)> = g.hbar_powers().into_iter().map(|h| (h, g.hbar_part(h))).collect();
    for (a, fa) in &parts_f {
        for (b, gb) in &parts_g {
            for (j, pij) in powers.iter().enumerate() {
                let h = a + b + j as i32;
                if h > truncation {
                    break;
                }
                let w = moyal_weight(j);
                for (m, c) in pij.apply(fa, gb) {
                    out.add_term(m, h, &c * &w);
                }
            }
        }
    }
    Ok(out)
}

/// `f * g - g * f`.
pub fn star_commutator(f: &FormalSeries, g: &FormalSeries, truncation: i32) -> Result<FormalSeries> {
    moyal_product(f, g, truncation)?.sub(&moyal_product(g, f, truncation)?)
}

/// `(f * g) * h - f * (g * h)`.
pub fn associator(f: &FormalSeries, g: &FormalSeries, h: &FormalSeries, truncation: i32) -> Result<FormalSeries> {
    let left = moyal_product(&moyal_product(f, g, truncation)?, h, truncation)?;
    let right = moyal_product(f, &moyal_product(g, h, truncation)?, truncation)?;
    left.sub(&right)
}

pub fn star_conjugate(f: &FormalSeries) -> FormalSeries {
    f.star_conjugate()
}

/// Action of `D in hbar^(-1) W` on `W` by the commutator `[D, f]`.
///
/// The `hbar^(-1)` parts commute pointwise, so the result lies back in `W`.
pub fn lie_action(d: &FormalSeries, f: &FormalSeries, truncation: i32) -> Result<FormalSeries> {
    if let Some(h) = d.terms().map(|(_, h, _)| h).min() {
        if h < -1 {
            return Err(Error::HbarPower(h));
        }
    }
    let mut out = star_commutator(d, f, truncation)?;
    if let Some(h) = out.terms().map(|(_, h, _)| h).find(|&h| h < 0) {
        return Err(Error::HbarPower(h));
    }
    out.min_power = 0;
    Ok(out)
}
