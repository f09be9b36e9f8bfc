//! Worked examples with independently known answers, one test per operation.

use btq_core::asymptotics::{
    commutator_defect, fit_inverse_powers, norm_scan, phi1_antisym_probe, star_defect, LevelScan,
};
use btq_core::cli::{execute, parse_config};
use btq_core::index::{
    a_hat_cp1, beta_check, bott_projector, formal_index, gq_index_polynomial, index_check, lift_idempotent, theta_class,
    todd_cp1, CharacterData, ClassicalIdempotent, CohoClass, Laurent, BOTT_DEGREE_SIGN, DEFAULT_GAP,
};
use btq_core::moyal::{
    associator, imaginary, lie_action, moyal_product, rational, star_commutator, FormalSeries,
};
use btq_core::quantize::{
    coherent_state, geometric, grid_for, operator_norm, partial_trace, quantize_auto, symbol, toeplitz, MapKind,
    QuantOperator,
};
use btq_core::section::make_space;
use btq_core::sphere::{
    build_grid, integrate, laplacian, poisson_bracket, sup_norm, ChartForm, SpherePoint, SpherePolynomial,
};
use btq_core::Error;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

fn u() -> SpherePolynomial {
    SpherePolynomial::u()
}
fn v() -> SpherePolynomial {
    SpherePolynomial::v()
}
fn w() -> SpherePolynomial {
    SpherePolynomial::w()
}
fn c(x: f64) -> SpherePolynomial {
    SpherePolynomial::constant(x)
}

fn random_points(seed: u64, n: usize) -> Vec<SpherePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| SpherePoint::from_angles(rng.gen_range(0.05..3.09), rng.gen_range(0.0..6.28))).collect()
}

// ---- sphere geometry ----

#[test]
fn canonicalize_examples() {
    let r = SpherePolynomial::from_raw_terms([([2, 0, 0], Complex64::from(1.0)), ([0, 2, 0], 1.0.into()), ([0, 0, 2], 1.0.into())]);
    assert_eq!(r.canonicalize(), SpherePolynomial::one());
    assert!(SpherePolynomial::zero().canonicalize().is_zero());
    let raw = SpherePolynomial::from_raw_terms([([2, 0, 1], Complex64::from(1.0))]);
    let expected = &(&c(1.0) - &(&(&v() * &v()) + &(&w() * &w()))) * &w();
    assert_eq!(raw.canonicalize(), expected);
    for p in random_points(1, 20) {
        assert!((raw.eval(&p) - expected.eval(&p)).norm() < 1e-12);
    }
}

#[test]
fn bracket_examples() {
    assert_eq!(poisson_bracket(&u(), &v()), w().scale(2.0));
    let f = &(&u() * &v()) + &w();
    assert!(poisson_bracket(&f, &f).is_zero());
    assert_eq!(poisson_bracket(&(&u() * &u()), &v()), (&u() * &w()).scale(4.0));
}

/// `{f, g}` and `Delta f` straight from the chart: `omega = 2i dz dzbar / (1 + |z|^2)^2`.
fn chart_bracket(f: &SpherePolynomial, g: &SpherePolynomial, z: Complex64) -> Complex64 {
    let (cf, cg) = (ChartForm::from_polynomial(f), ChartForm::from_polynomial(g));
    let s = (1.0 + z.norm_sqr()).powi(2);
    let wedge = cf.wirtinger(false).eval(z) * cg.wirtinger(true).eval(z) - cf.wirtinger(true).eval(z) * cg.wirtinger(false).eval(z);
    Complex64::new(0.0, -1.0) * s * wedge
}

fn chart_laplacian(f: &SpherePolynomial, z: Complex64) -> Complex64 {
    let s = (1.0 + z.norm_sqr()).powi(2);
    -2.0 * s * ChartForm::from_polynomial(f).wirtinger(false).wirtinger(true).eval(z)
}

#[test]
fn bracket_and_laplacian_match_the_chart() {
    let fs = [u(), v(), w(), &u() * &u(), &(&u() * &v()) + &w(), &(&v() * &w()) * &w()];
    for p in random_points(2, 20) {
        let z = p.to_chart().unwrap();
        for f in &fs {
            assert!((laplacian(f).eval(&p) - chart_laplacian(f, z)).norm() < 1e-9);
            for g in &fs {
                assert!((poisson_bracket(f, g).eval(&p) - chart_bracket(f, g, z)).norm() < 1e-9, "{f} {g}");
            }
        }
    }
}

#[test]
fn laplacian_examples() {
    assert!(laplacian(&c(1.0)).is_zero());
    assert_eq!(laplacian(&u()), u().scale(4.0));
    let g = build_grid(4).unwrap();
    assert!(integrate(&g, &laplacian(&(&u() * &u()))).unwrap().norm() < 1e-14);

    // Dirichlet form in the chart: (1/2pi) int |grad u|^2 dx dy, conformally invariant.
    // With s = r^2 = t / (1 - t) the radial integral lives on (0, 1).
    let cu = ChartForm::from_polynomial(&u());
    let du = cu.wirtinger(false);
    let (nodes, weights) = btq_core::sphere::gauss_legendre(60);
    let mut dirichlet = 0.0;
    for (x, wt) in nodes.iter().zip(&weights) {
        let t = 0.5 * (x + 1.0);
        let s = t / (1.0 - t);
        let z = Complex64::new(s.sqrt(), 0.0);
        // |grad f|^2 = 4 |df/dz|^2 for real f; dx dy = pi ds after the angular integral.
        let integrand = 4.0 * du.eval(z).norm_sqr() * 0.5 / (1.0 - t).powi(2);
        dirichlet += 0.5 * wt * integrand;
    }
    let weak = integrate(&g, &(&laplacian(&u()) * &u())).unwrap().re;
    assert!((dirichlet - 4.0 / 3.0).abs() < 1e-9, "{dirichlet}");
    assert!((weak - dirichlet).abs() < 1e-9);
}

#[test]
fn quadrature_examples() {
    let g = build_grid(2).unwrap();
    assert!((integrate(&g, &c(1.0)).unwrap() - 1.0).norm() < 1e-14);
    assert!(integrate(&g, &u()).unwrap().norm() < 1e-14);
    assert!((integrate(&g, &(&u() * &u())).unwrap() - 1.0 / 3.0).norm() < 1e-14);
    assert!(matches!(integrate(&build_grid(1).unwrap(), &(&u() * &u())), Err(Error::DegreeOverflow { .. })));
}

#[test]
fn sup_norm_examples() {
    assert!((sup_norm(&c(1.0), 200).unwrap() - 1.0).abs() < 1e-15);
    assert!((sup_norm(&u(), 10_000).unwrap() - 1.0).abs() < 1e-3);
    let r = &(&(&u() * &u()) + &(&v() * &v())) + &(&w() * &w());
    assert!((sup_norm(&r, 500).unwrap() - 1.0).abs() < 1e-14);
}

// ---- section spaces ----

#[test]
fn section_space_examples() {
    assert_eq!(make_space(3, 0).dim(), 4);
    assert_eq!(make_space(0, 0).dim(), 1);
    assert_eq!(make_space(1, -3).dim(), 0);
    let s = make_space(2, 0);
    assert!((s.gram_entry(1).unwrap() / s.gram_entry(0).unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(make_space(0, 0).gram_entry(0).unwrap(), 1.0);
    assert!(matches!(s.gram_entry(3), Err(Error::IndexOutOfRange { .. })));
}

// ---- quantization ----

#[test]
fn toeplitz_examples() {
    for m in [0i64, 1, 5, 12] {
        let s = make_space(m, 0);
        let one = quantize_auto(&s, &c(1.0), MapKind::Toeplitz).unwrap();
        assert!((one.matrix() - QuantOperator::identity(&s).matrix()).camax() < 1e-13);
        let tu = quantize_auto(&s, &u(), MapKind::Toeplitz).unwrap();
        let tv = quantize_auto(&s, &v(), MapKind::Toeplitz).unwrap();
        for j in 0..s.dim() {
            for k in 0..s.dim() {
                let expect_u = if j == k { (m - 2 * j as i64) as f64 / (m + 2) as f64 } else { 0.0 };
                assert!((tu.matrix()[(j, k)] - expect_u).norm() < 1e-13);
                if j.abs_diff(k) != 1 {
                    assert!(tv.matrix()[(j, k)].norm() < 1e-13);
                }
            }
        }
    }
}

#[test]
fn geometric_examples() {
    let s = make_space(6, 0);
    let q1 = geometric(&s, &c(1.0), &grid_for(&s, &c(1.0)).unwrap()).unwrap();
    assert!((q1.matrix() - QuantOperator::identity(&s).matrix()).camax() < 1e-13);
    let qu = geometric(&s, &u(), &grid_for(&s, &u()).unwrap()).unwrap();
    for j in 0..7 {
        let expect = (1.0 + 2.0 / 6.0) * (6.0 - 2.0 * j as f64) / 8.0;
        assert!((qu.matrix()[(j, j)].re - expect).abs() < 1e-13);
    }
}

#[test]
fn coherent_state_and_symbol_examples() {
    let s = make_space(5, 1);
    let cs = coherent_state(&s, &SpherePoint::north_pole()).unwrap();
    assert!((cs.vector[0].norm() - 1.0).abs() < 1e-14);
    assert!(cs.vector.iter().skip(1).all(|x| x.norm() < 1e-14));
    let id = QuantOperator::identity(&s);
    let tu = toeplitz(&s, &u(), &grid_for(&s, &u()).unwrap()).unwrap();
    let f = &(&u() * &v()) + &w();
    let tf = quantize_auto(&s, &f, MapKind::Toeplitz).unwrap();
    for p in random_points(3, 10) {
        assert!((coherent_state(&s, &p).unwrap().vector.norm() - 1.0).abs() < 1e-13);
        assert!((symbol(&id, &p).unwrap() - 1.0).norm() < 1e-13);
        assert!(symbol(&tf, &p).unwrap().im.abs() <= 1e-12);
    }
    assert!((symbol(&tu, &SpherePoint::north_pole()).unwrap() - 6.0 / 8.0).norm() < 1e-13);
}

#[test]
fn norm_and_trace_examples() {
    for (n, k0) in [(4, 0), (9, 2), (16, 1)] {
        let s = make_space(n, k0);
        let m = (n + k0) as f64;
        assert!((operator_norm(&QuantOperator::identity(&s)) - 1.0).abs() < 1e-13);
        assert_eq!(operator_norm(&QuantOperator::zero(&s, 1)), 0.0);
        let tu = quantize_auto(&s, &u(), MapKind::Toeplitz).unwrap();
        assert!((operator_norm(&tu) - m / (m + 2.0)).abs() < 1e-12);
        assert!((partial_trace(&QuantOperator::identity(&s)).re - (m + 1.0)).abs() < 1e-12);
        assert!(partial_trace(&tu).norm() < 1e-12);
        // The Bergman density is constant on the sphere, so tr T(f) = (M + 1) int f exactly.
        let f = &(&(&u() * &u()) + &v()) + &(&w() * &(&u() * &w()));
        let t = partial_trace(&quantize_auto(&s, &f, MapKind::Toeplitz).unwrap()).re;
        let exact = (m + 1.0) * integrate(&build_grid(4).unwrap(), &f).unwrap().re;
        assert!((t - exact).abs() < 1e-11, "{t} {exact}");
    }
}

// ---- asymptotics ----

#[test]
fn fit_examples() {
    let levels = vec![8, 16, 32, 64];
    for k0 in 0..3 {
        let vals = levels.iter().map(|&n| (n + k0 + 1) as f64 / n as f64).collect();
        let fit = fit_inverse_powers(&LevelScan::from_real(levels.clone(), vals, "tr/N").unwrap(), 1).unwrap();
        assert!((fit.coefficients[0].re - 1.0).abs() < 1e-9);
        assert!((fit.coefficients[1].re - (k0 + 1) as f64).abs() < 1e-9);
        assert!(fit.max_residual <= 1e-9);
    }
    let five = fit_inverse_powers(&LevelScan::from_real(levels.clone(), vec![5.0; 4], "5").unwrap(), 2).unwrap();
    assert!((five.coefficients[0].re - 5.0).abs() < 1e-9);
    assert!(five.coefficients[1..].iter().all(|c| c.norm() < 1e-9));
    let inv2 = levels.iter().map(|&n| 1.0 / (n * n) as f64).collect();
    let fit = fit_inverse_powers(&LevelScan::from_real(levels.clone(), inv2, "1/N^2").unwrap(), 2).unwrap();
    assert!((fit.coefficients[2].re - 1.0).abs() < 1e-9 && fit.coefficients[0].norm() < 1e-9);
}

#[test]
fn commutator_defect_examples() {
    assert_eq!(commutator_defect(&u(), &u(), 8, 0, MapKind::Toeplitz).unwrap(), 0.0);
    assert!(commutator_defect(&c(2.0), &c(3.0), 8, 0, MapKind::Toeplitz).unwrap() < 1e-13);
    let d: Vec<f64> = [8, 16, 32, 64].iter().map(|&n| commutator_defect(&u(), &v(), n, 0, MapKind::Toeplitz).unwrap()).collect();
    assert!(d.windows(2).all(|p| p[1] < p[0]));
    assert!((d[3] * 64.0 - 4.0).abs() < 0.5, "{d:?}");
}

#[test]
fn star_defect_examples() {
    let f = &(&u() * &v()) + &w();
    let d: Vec<f64> = [8, 16, 32, 64]
        .iter()
        .map(|&n| star_defect(&u(), &v(), &[&u() * &v()], 0, n, 0, MapKind::Toeplitz).unwrap())
        .collect();
    assert!(d.windows(2).all(|p| p[1] < p[0]));
    for n in [4, 8, 16] {
        assert!(star_defect(&c(1.0), &f, &[f.clone(), SpherePolynomial::zero()], 1, n, 0, MapKind::Toeplitz).unwrap() < 1e-12);
    }
    let wrong: Vec<f64> = [8, 16, 32, 64]
        .iter()
        .map(|&n| star_defect(&u(), &v(), &[&u() * &v(), SpherePolynomial::zero()], 1, n, 0, MapKind::Toeplitz).unwrap())
        .collect();
    assert!(wrong.iter().all(|&x| x > 0.5), "{wrong:?}");
}

#[test]
fn phi1_probe_examples() {
    let levels = [8, 16, 32, 64];
    let p = SpherePoint::from_angles(0.9, 2.1);
    assert!(phi1_antisym_probe(&u(), &u(), &p, &levels, 0).unwrap().constant().norm() < 1e-9);
    // {u, v} = 2w vanishes at the north pole; at the point with w = 1 it is 2.
    let pole = SpherePoint::north_pole();
    assert!(phi1_antisym_probe(&u(), &v(), &pole, &levels, 0).unwrap().constant().norm() < 1e-9);
    let wpole = SpherePoint::new(0.0, 0.0, 1.0).unwrap();
    let got = phi1_antisym_probe(&u(), &v(), &wpole, &levels, 0).unwrap().constant();
    assert!((got - Complex64::new(0.0, -2.0)).norm() / 2.0 < 0.02, "{got}");
    let uv = phi1_antisym_probe(&u(), &v(), &p, &levels, 0).unwrap().constant();
    let vu = phi1_antisym_probe(&v(), &u(), &p, &levels, 0).unwrap().constant();
    assert!((uv + vu).norm() < 1e-9);
}

#[test]
fn norm_scan_examples() {
    let levels = [8, 16, 32];
    assert!(norm_scan(&c(1.0), &levels, 0, MapKind::Toeplitz).unwrap().real_values().iter().all(|x| (x - 1.0).abs() < 1e-12));
    let nu = norm_scan(&u(), &levels, 0, MapKind::Toeplitz).unwrap().real_values();
    for (x, n) in nu.iter().zip(levels) {
        assert!((x - n as f64 / (n + 2) as f64).abs() < 1e-12);
    }
    assert!(nu.windows(2).all(|p| p[1] > p[0]));
    let n2u = norm_scan(&u().scale(2.0), &levels, 0, MapKind::Toeplitz).unwrap().real_values();
    assert!(n2u.iter().zip(&nu).all(|(a, b)| (a - 2.0 * b).abs() < 1e-12));
}

// ---- moyal ----

#[test]
fn moyal_examples() {
    let k = 6;
    let (x, p) = (FormalSeries::x(1, k, 0), FormalSeries::p(1, k, 0));
    let xp = FormalSeries::from_terms(1, k, 0, [(vec![1, 1], 0, rational(1, 1)), (vec![0, 0], 1, imaginary(-1, 2))]).unwrap();
    assert_eq!(moyal_product(&x, &p, k).unwrap(), xp);
    assert_eq!(moyal_product(&xp, &FormalSeries::one(1, k), k).unwrap(), xp);
    let minus_i_hbar = FormalSeries::from_terms(1, k, 0, [(vec![0, 0], 1, imaginary(-1, 1))]).unwrap();
    let diff = moyal_product(&x, &p, k).unwrap().sub(&moyal_product(&p, &x, k).unwrap()).unwrap();
    assert_eq!(diff, minus_i_hbar);
    assert_eq!(star_commutator(&x, &p, k).unwrap(), minus_i_hbar);
    assert!(star_commutator(&xp, &xp, k).unwrap().is_zero());

    // [x^2, p^2] = -i hbar 4xp + (no hbar^2 term survives antisymmetrization) ...
    let x2 = moyal_product(&x, &x, k).unwrap();
    let p2 = moyal_product(&p, &p, k).unwrap();
    let comm = star_commutator(&x2, &p2, k).unwrap();
    let bracket = x2.poisson_bracket(&p2).unwrap();
    assert_eq!(bracket, FormalSeries::from_terms(1, k, 0, [(vec![1, 1], 0, rational(4, 1))]).unwrap());
    assert_eq!(comm.hbar_part(1), bracket.scale(&imaginary(-1, 1)).hbar_part(0));

    assert!(associator(&x, &p, &x, k).unwrap().is_zero());
    assert!(associator(&x2, &FormalSeries::one(1, k), &p2, k).unwrap().is_zero());

    let ihx = x.hbar_shift(1).unwrap().scale(&imaginary(1, 1));
    assert_eq!(ihx.star_conjugate(), x.hbar_shift(1).unwrap().scale(&imaginary(-1, 1)));
    assert_eq!(x2.star_conjugate(), x2);
    let px = FormalSeries::from_terms(1, k, 0, [(vec![1, 1], 0, rational(1, 1)), (vec![0, 0], 1, imaginary(1, 2))]).unwrap();
    assert_eq!(xp.star_conjugate(), px);
    assert_eq!(moyal_product(&p, &x, k).unwrap(), px);

    let central = FormalSeries::constant(1, k, rational(3, 1)).hbar_shift(-1).unwrap();
    assert!(lie_action(&central, &xp, k).unwrap().is_zero());
    let d = x.hbar_shift(-1).unwrap();
    assert_eq!(lie_action(&d, &p, k).unwrap(), FormalSeries::constant(1, k, imaginary(-1, 1)));
}

// ---- index ----

#[test]
fn characteristic_class_examples() {
    assert_eq!(todd_cp1(), CohoClass::from_ints(1, 1));
    assert_eq!(a_hat_cp1(), CohoClass::from_ints(1, 0));
    assert_eq!(&CohoClass::from_ints(0, 1).exp().unwrap() * &a_hat_cp1(), todd_cp1());
    assert_eq!(a_hat_cp1().inverse().unwrap(), CohoClass::one());
    let hinv = Laurent::monomial(-1, 1);
    assert_eq!(theta_class(0).deg2, &hinv + &Laurent::constant(1));
    assert_eq!(theta_class(2).deg2, &hinv + &Laurent::constant(3));
    assert!(theta_class(5).deg0.is_zero());
}

#[test]
fn index_polynomial_examples() {
    let n = Laurent::monomial(1, 1);
    assert_eq!(gq_index_polynomial(&CharacterData { rank: 1, degree: 0 }, 0), &n + &Laurent::constant(1));
    for k0 in -1..3 {
        for k in -2..3 {
            let got = gq_index_polynomial(&CharacterData { rank: 1, degree: k }, k0);
            assert_eq!(got, &n + &Laurent::constant(k0 + k + 1));
            let formal = formal_index(&CharacterData { rank: 1, degree: k }, &theta_class(k0)).unwrap();
            assert_eq!(formal, &Laurent::monomial(-1, 1) + &Laurent::constant(k0 + k + 1));
            assert_eq!(formal.substitute_inverse(), got);
        }
        assert_eq!(gq_index_polynomial(&CharacterData { rank: 2, degree: 0 }, k0), &(&n * &Laurent::constant(2)) + &Laurent::constant(2 * (k0 + 1)));
    }
}

#[test]
fn bott_examples() {
    for k in [1, -1] {
        let e = bott_projector(k).unwrap();
        assert_eq!(e.trace(), SpherePolynomial::one());
        assert!(e.is_idempotent() && e.is_hermitian());
    }
    assert!(bott_projector(0).is_err());
}

#[test]
fn lift_examples() {
    let s = make_space(16, 0);
    let id = lift_idempotent(&s, &ClassicalIdempotent::trivial(1), MapKind::Toeplitz, DEFAULT_GAP).unwrap();
    assert_eq!(id.iterations, 0);
    assert!((id.operator.matrix() - QuantOperator::identity(&s).matrix()).camax() < 1e-13);
    let b = lift_idempotent(&s, &bott_projector(1).unwrap(), MapKind::Toeplitz, DEFAULT_GAP).unwrap();
    assert!(b.idempotency_defect <= 1e-12);
    let tr = partial_trace(&b.operator).re;
    assert!((tr - tr.round()).abs() < 1e-6);
    let z = lift_idempotent(&s, &ClassicalIdempotent::zero(1), MapKind::Toeplitz, DEFAULT_GAP).unwrap();
    assert_eq!(z.operator.matrix().camax(), 0.0);
}

#[test]
fn index_check_examples() {
    let r = index_check(16, 0, &ClassicalIdempotent::trivial(1), MapKind::Toeplitz, DEFAULT_GAP).unwrap();
    assert!((r.measured_trace - 17.0).abs() < 1e-9 && r.predicted == 17 && r.pass);
    let r = index_check(16, 1, &ClassicalIdempotent::trivial(2), MapKind::Toeplitz, DEFAULT_GAP).unwrap();
    assert!((r.measured_trace - 36.0).abs() < 1e-9 && r.predicted == 36 && r.pass);
    // Frozen regression value: bott(+1) at N = 16 has trace 16 (degree -1).
    let r = index_check(16, 0, &bott_projector(1).unwrap(), MapKind::Toeplitz, DEFAULT_GAP).unwrap();
    assert_eq!(BOTT_DEGREE_SIGN, -1);
    assert!((r.measured_trace - 16.0).abs() < 1e-6 && r.predicted == 16);
}

#[test]
fn beta_check_examples() {
    let ids = [ClassicalIdempotent::trivial(1), bott_projector(1).unwrap()];
    let r = beta_check(&[8, 16, 32], 0, &ids, MapKind::Toeplitz, DEFAULT_GAP).unwrap();
    assert!(r.pass);
    // Fitted polynomials N + 1 (trivial) and N (bott(+1), degree -1).
    let p0 = &r.fits[0].polynomial;
    let p1 = &r.fits[1].polynomial;
    assert!((p0[0] - 1.0).abs() < 1e-6 && (p0[1] - 1.0).abs() < 1e-6);
    assert!(p1[0].abs() < 1e-6 && (p1[1] - 1.0).abs() < 1e-6);
    let r1 = beta_check(&[8, 16, 32], 1, &ids, MapKind::Toeplitz, DEFAULT_GAP).unwrap();
    assert!(r1.pass);
    for (a, b) in r.fits.iter().zip(&r1.fits) {
        assert!((b.polynomial[0] - a.polynomial[0] - 1.0).abs() < 1e-6);
    }
    assert!(matches!(
        beta_check(&[8, 16, 32], 0, &ids[..1], MapKind::Toeplitz, DEFAULT_GAP),
        Err(Error::InsufficientSpan(_))
    ));
}

// ---- cli ----

#[test]
fn cli_examples() {
    let cfg = parse_config(r#"{"command":"theta","k0":2}"#).unwrap();
    assert_eq!((cfg.k0, cfg.levels.clone(), cfg.truncation), (2, vec![8, 16, 32, 64], 6));
    assert!(parse_config(r#"{"command":"bogus"}"#).unwrap_err().to_string().contains("unknown command"));
    assert!(parse_config(r#"{"command":"index-check","levels":[16,8]}"#).unwrap_err().to_string().contains("levels not increasing"));

    let theta = execute(&parse_config(r#"{"command":"theta","k0":0}"#).unwrap()).unwrap();
    assert_eq!(theta.report["theta_deg2"], json!({"hbar^-1": 1, "1": 1}));
    let idx = execute(&parse_config(r#"{"command":"index-check","levels":[16],"k0":0,"idempotents":["trivial"]}"#).unwrap()).unwrap();
    assert!(idx.pass);
    assert_eq!(idx.report["checks"][0]["predicted"], json!(17));
    let moyal = execute(&parse_config(r#"{"command":"moyal-check","seed":42,"trials":10}"#).unwrap()).unwrap();
    assert!(moyal.pass);
    assert_eq!(moyal.report["associator"], json!("max |coeff| = 0"));
}
