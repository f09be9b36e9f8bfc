//! Poisson bracket and Laplacian on the sphere.
//!
//! Conventions (area normalized so that the symplectic volume over `2 pi` is 1):
//!
//! | quantity            | value                                   |
//! |---------------------|-----------------------------------------|
//! | `{u, v}`            | `2 w` (and cyclic)                      |
//! | Laplacian sign      | nonnegative spectrum                    |
//! | `Delta Y_l`         | `2 l (l + 1) Y_l`, so `Delta u = 4 u`   |
//!
//! Both operators are computed from ambient derivatives of the stored
//! representative and are independent of the chosen extension off the sphere.

use num_complex::Complex64;

use super::polynomial::SpherePolynomial;

/// `{f, g} = 2 x . (grad f x grad g)` restricted to the sphere.
pub fn poisson_bracket(f: &SpherePolynomial, g: &SpherePolynomial) -> SpherePolynomial {
    let df = [f.ambient_partial(0), f.ambient_partial(1), f.ambient_partial(2)];
    let dg = [g.ambient_partial(0), g.ambient_partial(1), g.ambient_partial(2)];
    let coords = [SpherePolynomial::u(), SpherePolynomial::v(), SpherePolynomial::w()];
    let mut out = SpherePolynomial::zero();
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let cross = &(&df[i] * &dg[j]) - &(&df[j] * &dg[i]);
        out = &out + &(&coords[k] * &cross);
    }
    out.scale(2.0)
}

/// Nonnegative Laplacian `2 (E(E+1) - Delta_3)` where `E` is the Euler operator.
pub fn laplacian(f: &SpherePolynomial) -> SpherePolynomial {
    let mut raw: Vec<([u32; 3], Complex64)> = Vec::new();
    for (&[a, b, c], &coef) in f.terms() {
        let d = (a + b + c) as f64;
        raw.push(([a, b, c], coef * (2.0 * d * (d + 1.0))));
        for axis in 0..3 {
            let e = [a, b, c][axis];
            if e >= 2 {
                let mut m = [a, b, c];
                m[axis] -= 2;
                raw.push((m, coef * (-2.0 * (e * (e - 1)) as f64)));
            }
        }
    }
    SpherePolynomial::from_terms(raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> SpherePolynomial {
        SpherePolynomial::u()
    }
    fn v() -> SpherePolynomial {
        SpherePolynomial::v()
    }
    fn w() -> SpherePolynomial {
        SpherePolynomial::w()
    }

    #[test]
    fn generator_brackets() {
        assert_eq!(poisson_bracket(&u(), &v()), w().scale(2.0));
        assert_eq!(poisson_bracket(&v(), &w()), u().scale(2.0));
        assert_eq!(poisson_bracket(&w(), &u()), v().scale(2.0));
    }

    #[test]
    fn bracket_with_self_vanishes() {
        let f = &(&u() * &v()) + &w().pow(3);
        assert!(poisson_bracket(&f, &f).is_zero());
    }

    #[test]
    fn bracket_of_u_squared_with_v() {
        assert_eq!(poisson_bracket(&(&u() * &u()), &v()), (&u() * &w()).scale(4.0));
    }

    #[test]
    fn constants_are_central() {
        let c = SpherePolynomial::constant(3.0);
        assert!(poisson_bracket(&c, &(&u() * &w())).is_zero());
    }

    #[test]
    fn laplacian_of_constant_and_linear() {
        assert!(laplacian(&SpherePolynomial::one()).is_zero());
        assert_eq!(laplacian(&u()), u().scale(4.0));
        assert_eq!(laplacian(&v()), v().scale(4.0));
    }

    #[test]
    fn laplacian_of_quadratic_harmonic() {
        // u v is an l = 2 harmonic: eigenvalue 2 * 2 * 3 = 12.
        let uv = &u() * &v();
        assert_eq!(laplacian(&uv), uv.scale(12.0));
        // The defining relation is annihilated, as it must be on the sphere.
        let r2 = &(&(&u() * &u()) + &(&v() * &v())) + &(&w() * &w());
        assert!(laplacian(&r2).is_zero());
    }
}
