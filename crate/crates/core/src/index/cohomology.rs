use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Finite Laurent polynomial with exact rational coefficients.
///
/// The variable is `hbar` on the formal side and `N` on the geometric side;
/// `substitute_inverse` implements `hbar^(-1) -> N`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Laurent {
    coeffs: BTreeMap<i32, Rational64>,
}

impl Laurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Rational64>) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(power: i32, c: impl Into<Rational64>) -> Self {
        let mut coeffs = BTreeMap::new();
        let c = c.into();
        if !c.is_zero() {
            coeffs.insert(power, c);
        }
        Self { coeffs }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i32, Rational64)>) -> Self {
        pairs.into_iter().fold(Self::zero(), |acc, (p, c)| &acc + &Self::monomial(p, c))
    }

    pub fn coefficient(&self, power: i32) -> Rational64 {
        self.coeffs.get(&power).copied().unwrap_or_else(Rational64::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, Rational64)> + '_ {
        self.coeffs.iter().map(|(&p, &c)| (p, c))
    }

    pub fn powers(&self) -> impl Iterator<Item = i32> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Replaces the variable by its inverse: `x^p -> x^(-p)`.
    pub fn substitute_inverse(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|(&p, &c)| (-p, c)).collect() }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().map(|(&p, c)| *c.numer() as f64 / *c.denom() as f64 * x.powi(p)).sum()
    }

    /// JSON object keyed `"1"`, `"hbar^-1"` style by `var`, integer values
    /// when the coefficient is integral.
    pub fn to_json(&self, var: &str) -> Value {
        let mut map = serde_json::Map::new();
        for (&p, c) in self.coeffs.iter().rev() {
            let key = match p {
                0 => "1".to_string(),
                1 => var.to_string(),
                _ => format!("{var}^{p}"),
            };
            let value = if c.is_integer() { json!(c.to_integer()) } else { json!(*c.numer() as f64 / *c.denom() as f64) };
            map.insert(key, value);
        }
        Value::Object(map)
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(p, c)| format!("{c}*x^{p}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &Laurent {
    type Output = Laurent;
    fn add(self, rhs: &Laurent) -> Laurent {
        let mut coeffs = self.coeffs.clone();
        for (&p, &c) in &rhs.coeffs {
            let slot = coeffs.entry(p).or_insert_with(Rational64::zero);
            *slot += c;
            if slot.is_zero() {
                coeffs.remove(&p);
            }
        }
        Laurent { coeffs }
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent { coeffs: self.coeffs.iter().map(|(&p, &c)| (p, -c)).collect() }
    }
}

impl Sub for &Laurent {
    type Output = Laurent;
    fn sub(self, rhs: &Laurent) -> Laurent {
        self + &(-rhs)
    }
}

impl Mul for &Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (&p, &a) in &self.coeffs {
            for (&q, &b) in &rhs.coeffs {
                out = &out + &Laurent::monomial(p + q, a * b);
            }
        }
        out
    }
}

/// Cohomology class of the sphere: `deg0 * 1 + deg2 * sigma`, where
/// `sigma = [omega / 2 pi]` integrates to 1 and `sigma^2 = 0`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CohoClass {
    pub deg0: Laurent,
    pub deg2: Laurent,
}

impl CohoClass {
    pub fn new(deg0: Laurent, deg2: Laurent) -> Self {
        Self { deg0, deg2 }
    }

    pub fn from_ints(deg0: i64, deg2: i64) -> Self {
        Self::new(Laurent::constant(deg0), Laurent::constant(deg2))
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    /// `sigma`, the positive generator of `H^2`.
    pub fn sigma() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn scale(&self, c: &Laurent) -> Self {
        Self::new(c * &self.deg0, c * &self.deg2)
    }

    /// `exp` of a nilpotent class (zero degree-0 part): `1 + x`.
    pub fn exp(&self) -> Result<Self> {
        if !self.deg0.is_zero() {
            return Err(Error::Config("exp is only defined here for classes with vanishing degree-0 part".into()));
        }
        Ok(Self::new(Laurent::constant(1), self.deg2.clone()))
    }

    /// `integral over the sphere`: the `sigma` coefficient.
    pub fn integrate(&self) -> Laurent {
        self.deg2.clone()
    }

    /// Inverse of a class with invertible constant degree-0 part.
    pub fn inverse(&self) -> Result<Self> {
        let a0 = self.deg0.coefficient(0);
        if a0.is_zero() || self.deg0.powers().any(|p| p != 0) {
            return Err(Error::Config("class is not invertible over Q".into()));
        }
        let inv = Laurent::constant(Rational64::one() / a0);
        Ok(Self::new(inv.clone(), -&(&(&inv * &inv) * &self.deg2)))
    }
}

impl Add for &CohoClass {
    type Output = CohoClass;
    fn add(self, rhs: &CohoClass) -> CohoClass {
        CohoClass::new(&self.deg0 + &rhs.deg0, &self.deg2 + &rhs.deg2)
    }
}

impl Mul for &CohoClass {
    type Output = CohoClass;
    fn mul(self, rhs: &CohoClass) -> CohoClass {
        CohoClass::new(&self.deg0 * &rhs.deg0, &(&self.deg0 * &rhs.deg2) + &(&self.deg2 * &rhs.deg0))
    }
}

/// `(rank, degree)` of the bundle cut out by an idempotent: `ch e = rank + degree * sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct CharacterData {
    pub rank: i64,
    pub degree: i64,
}

impl CharacterData {
    pub fn class(&self) -> CohoClass {
        CohoClass::from_ints(self.rank, self.degree)
    }
}

/// `c_1(T CP^1) = 2 sigma` (Euler characteristic 2).
pub fn tangent_chern_class() -> CohoClass {
    CohoClass::from_ints(0, 2)
}

/// `Td(T CP^1) = 1 + c_1 / 2 = 1 + sigma`.
pub fn todd_cp1() -> CohoClass {
    &CohoClass::one() + &tangent_chern_class().scale(&Laurent::constant(Rational64::new(1, 2)))
}

/// `A-hat(T CP^1) = 1`: only the unit survives on a 2-manifold.
pub fn a_hat_cp1() -> CohoClass {
    CohoClass::one()
}

/// `theta = [omega] / (2 pi hbar) + c_1(L0) + c_1(TM) / 2` with `L0 = O(k0)`.
pub fn theta_class(k0: i64) -> CohoClass {
    let symplectic = CohoClass::sigma().scale(&Laurent::monomial(-1, 1));
    let twist = CohoClass::from_ints(0, k0);
    let half_tangent = tangent_chern_class().scale(&Laurent::constant(Rational64::new(1, 2)));
    &(&symplectic + &twist) + &half_tangent
}

/// `integral ch e ^ Td ^ exp(c_1(L0) + N sigma)` as a polynomial in `N`.
pub fn gq_index_polynomial(ch: &CharacterData, k0: i64) -> Laurent {
    let line = CohoClass::new(Laurent::zero(), &Laurent::constant(k0) + &Laurent::monomial(1, 1));
    let exp_line = line.exp().expect("line class is nilpotent");
    (&(&ch.class() * &todd_cp1()) * &exp_line).integrate()
}

/// `integral ch e ^ A-hat ^ exp(theta)` as a Laurent polynomial in `hbar`.
pub fn formal_index(ch: &CharacterData, theta: &CohoClass) -> Result<Laurent> {
    let exp_theta = theta.exp()?;
    Ok((&(&ch.class() * &a_hat_cp1()) * &exp_theta).integrate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_class() -> impl Strategy<Value = CohoClass> {
        (-5i64..5, -5i64..5, -5i64..5, -1i32..2).prop_map(|(a, b, c, p)| {
            CohoClass::new(Laurent::constant(a), &Laurent::monomial(p, b) + &Laurent::constant(c))
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_class(), b in small_class(), c in small_class()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &CohoClass::one(), a.clone());
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }
    }

    #[test]
    fn todd_and_a_hat() {
        let td = todd_cp1();
        assert_eq!(td, CohoClass::from_ints(1, 1));
        assert_eq!(a_hat_cp1(), CohoClass::from_ints(1, 0));
        let half_c1 = tangent_chern_class().scale(&Laurent::constant(Rational64::new(1, 2)));
        assert_eq!(td, &half_c1.exp().unwrap() * &a_hat_cp1());
        assert_eq!(a_hat_cp1().inverse().unwrap(), CohoClass::one());
    }

    #[test]
    fn theta_values() {
        let t0 = theta_class(0);
        assert!(t0.deg0.is_zero());
        assert_eq!(t0.deg2, Laurent::from_pairs([(-1, 1.into()), (0, 1.into())]));
        assert_eq!(theta_class(2).deg2, Laurent::from_pairs([(-1, 1.into()), (0, 3.into())]));
        assert_eq!(t0.deg2.coefficient(-1), Rational64::one());
    }

    #[test]
    fn gq_polynomials() {
        let trivial = CharacterData { rank: 1, degree: 0 };
        assert_eq!(gq_index_polynomial(&trivial, 0), Laurent::from_pairs([(1, 1.into()), (0, 1.into())]));
        for k in -2..=2 {
            for k0 in 0..3 {
                let p = gq_index_polynomial(&CharacterData { rank: 1, degree: k }, k0);
                assert_eq!(p, Laurent::from_pairs([(1, 1.into()), (0, (k0 + k + 1).into())]));
            }
        }
        let two = gq_index_polynomial(&CharacterData { rank: 2, degree: 0 }, 1);
        assert_eq!(two, Laurent::from_pairs([(1, 2.into()), (0, 4.into())]));
    }

    #[test]
    fn formal_index_and_substitution() {
        let theta = theta_class(0);
        let idx = formal_index(&CharacterData { rank: 1, degree: 0 }, &theta).unwrap();
        assert_eq!(idx, Laurent::from_pairs([(-1, 1.into()), (0, 1.into())]));
        for rank in 1..3 {
            for degree in -2..3 {
                for k0 in 0..3 {
                    let ch = CharacterData { rank, degree };
                    let formal = formal_index(&ch, &theta_class(k0)).unwrap();
                    assert_eq!(formal.substitute_inverse(), gq_index_polynomial(&ch, k0));
                }
            }
        }
        let bad = CohoClass::from_ints(1, 0);
        assert!(formal_index(&CharacterData { rank: 1, degree: 0 }, &bad).is_err());
    }

    #[test]
    fn laurent_json() {
        let t = theta_class(0).deg2.to_json("hbar");
        assert_eq!(t, json!({"hbar^-1": 1, "1": 1}));
    }
}
