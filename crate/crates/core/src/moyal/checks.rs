use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{associator, imaginary, moyal_product, star_commutator, Coeff, FormalSeries};
use crate::error::Result;

/// Sparse random series: up to `max_terms` monomials of degree `<= max_degree`,
/// small complex-rational coefficients, `hbar` powers 0 or 1.
pub fn random_series<R: Rng>(rng: &mut R, pairs: usize, max_degree: u32, max_terms: usize, truncation: i32) -> FormalSeries {
    let vars = 2 * pairs;
    let count = rng.gen_range(1..=max_terms);
    let mut triples = Vec::with_capacity(count);
    for _ in 0..count {
        let degree = rng.gen_range(0..=max_degree);
        let mut m = vec![0u32; vars];
        for _ in 0..degree {
            m[rng.gen_range(0..vars)] += 1;
        }
        let h = if rng.gen_bool(0.25) { 1 } else { 0 };
        let den = rng.gen_range(1..=3i64);
        let c = Coeff::new(
            BigRational::new(rng.gen_range(-4..=4i64).into(), den.into()),
            BigRational::new(rng.gen_range(-2..=2i64).into(), 1.into()),
        );
        triples.push((m, h, c));
    }
    FormalSeries::from_terms(pairs, truncation, 0, triples).expect("generated terms are in range")
}

/// Outcome of the executable star-product axioms on random inputs.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub trials: usize,
    pub truncation: i32,
    /// Largest `|re| + |im|` of any associator coefficient, as an exact rational.
    pub associator_max: String,
    pub associator_zero: bool,
    pub unit: bool,
    pub conjugation: bool,
    pub hbar_linearity: bool,
    pub commutator_leading_order: bool,
}

impl AxiomReport {
    pub fn passes(&self) -> bool {
        self.associator_zero && self.unit && self.conjugation && self.hbar_linearity && self.commutator_leading_order
    }
}

/// Runs associativity, unit, conjugation, `C[[hbar]]`-linearity and the
/// leading-order commutator law on `trials` random triples (alternating
/// `n = 1, 2`; degree `<= 4`).
pub fn run_axiom_checks(seed: u64, trials: usize, truncation: i32) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assoc_max = BigRational::zero();
    let (mut unit, mut conjugation, mut linearity, mut commutator) = (true, true, true, true);
    for t in 0..trials {
        let pairs = 1 + t % 2;
        let f = random_series(&mut rng, pairs, 4, 4, truncation);
        let g = random_series(&mut rng, pairs, 4, 4, truncation);
        let h = random_series(&mut rng, pairs, 4, 4, truncation);

        let a = associator(&f, &g, &h, truncation)?;
        assoc_max = assoc_max.max(a.max_abs());

        let one = FormalSeries::one(pairs, truncation);
        unit &= moyal_product(&f, &one, truncation)? == f && moyal_product(&one, &f, truncation)? == f;

        let fg = moyal_product(&f, &g, truncation)?;
        let gf_conj = moyal_product(&g.star_conjugate(), &f.star_conjugate(), truncation)?;
        conjugation &= fg.star_conjugate() == gf_conj;

        let hf = f.hbar_shift(1)?;
        linearity &= moyal_product(&hf, &g, truncation)? == fg.hbar_shift(1)?;

        // hbar^0 parts commute pointwise; the hbar^1 part of [f, g] is -i {f_0, g_0}.
        let c = star_commutator(&f, &g, truncation)?;
        let f0 = FormalSeries::from_terms(pairs, truncation, 0, f.hbar_part(0).into_iter().map(|(m, c)| (m, 0, c)))?;
        let g0 = FormalSeries::from_terms(pairs, truncation, 0, g.hbar_part(0).into_iter().map(|(m, c)| (m, 0, c)))?;
        let bracket = f0.poisson_bracket(&g0)?.scale(&imaginary(-1, 1));
        commutator &= c.hbar_part(0).is_empty() && c.hbar_part(1) == bracket.hbar_part(0);
    }
    Ok(AxiomReport {
        trials,
        truncation,
        associator_max: assoc_max.to_string(),
        associator_zero: assoc_max.is_zero(),
        unit,
        conjugation,
        hbar_linearity: linearity,
        commutator_leading_order: commutator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axioms_hold_on_a_few_trials() {
        let report = run_axiom_checks(11, 6, 6).unwrap();
        assert!(report.passes(), "{report:?}");
        assert_eq!(report.associator_max, "0");
    }
}
