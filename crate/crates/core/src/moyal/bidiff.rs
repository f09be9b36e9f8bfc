use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Coeff, Monomial, Poly};

/// A constant-coefficient bidifferential operator
/// `sum w * d^alpha (x) d^beta` acting on `f (x) g`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bidifferential {
    vars: usize,
    terms: BTreeMap<(Monomial, Monomial), BigRational>,
}

fn unit(vars: usize, i: usize) -> Monomial {
    let mut m = vec![0; vars];
    m[i] = 1;
    m
}

impl Bidifferential {
    /// Identity operator `1 (x) 1`.
    pub fn identity(vars: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((vec![0; vars], vec![0; vars]), BigRational::one());
        Self { vars, terms }
    }

    /// Flat Poisson bivector over `n` canonical pairs, variables ordered
    /// `(x_1, p_1, ..., x_n, p_n)`: `pi = sum_i d_{x_i} (x) d_{p_i} - d_{p_i} (x) d_{x_i}`.
    pub fn poisson(n: usize) -> Self {
        let vars = 2 * n;
        let mut terms = BTreeMap::new();
        for i in 0..n {
            let (x, p) = (unit(vars, 2 * i), unit(vars, 2 * i + 1));
            terms.insert((x.clone(), p.clone()), BigRational::one());
            terms.insert((p, x), -BigRational::one());
        }
        Self { vars, terms }
    }

    /// Composition; constant-coefficient operators commute.
    pub fn compose(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<(Monomial, Monomial), BigRational> = BTreeMap::new();
        for ((a1, b1), w1) in &self.terms {
            for ((a2, b2), w2) in &other.terms {
                let a: Monomial = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                let b: Monomial = b1.iter().zip(b2).map(|(x, y)| x + y).collect();
                let slot = terms.entry((a, b)).or_insert_with(BigRational::zero);
                *slot += w1 * w2;
            }
        }
        terms.retain(|_, w| !w.is_zero());
        Self { vars: self.vars, terms }
    }

    pub fn power(&self, j: usize) -> Self {
        (0..j).fold(Self::identity(self.vars), |acc, _| acc.compose(self))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Monomial, &BigRational)> {
        self.terms.iter().map(|((a, b), w)| (a, b, w))
    }

    /// `(order on f, order on g)` for every term.
    pub fn orders(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.terms.keys().map(|(a, b)| (a.iter().sum(), b.iter().sum()))
    }

    /// `m o B (f (x) g)` for polynomials.
    pub fn apply(&self, f: &Poly, g: &Poly) -> Poly {
        let mut out = Poly::new();
        for ((alpha, beta), w) in &self.terms {
            let df = derivative(f, alpha);
            if df.is_empty() {
                continue;
            }
            let dg = derivative(g, beta);
            for (mf, cf) in &df {
                for (mg, cg) in &dg {
                    let m: Monomial = mf.iter().zip(mg).map(|(x, y)| x + y).collect();
                    let c = cf * cg * Coeff::new(w.clone(), BigRational::zero());
                    let slot = out.entry(m).or_insert_with(Coeff::zero);
                    *slot = &*slot + &c;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
}

/// `d^alpha` of a polynomial.
pub fn derivative(f: &Poly, alpha: &[u32]) -> Poly {
    let mut out = Poly::new();
    for (m, c) in f {
        if m.iter().zip(alpha).any(|(e, a)| e < a) {
            continue;
        }
        let mut factor = BigInt::one();
        for (&e, &a) in m.iter().zip(alpha) {
            for t in 0..a {
                factor *= BigInt::from(e - t);
            }
        }
        let dm: Monomial = m.iter().zip(alpha).map(|(e, a)| e - a).collect();
        let scale = Coeff::new(BigRational::from_integer(factor), BigRational::zero());
        out.insert(dm, c * &scale);
    }
    out
}
