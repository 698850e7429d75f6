//! Worked examples for each module, checked against closed forms or
//! independent recomputation.

use std::f64::consts::{LN_2, TAU};

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use pshcert::calculus::{certify_psh, circle_mean_test, hermitian_min_eig, levi_sample, HermitianMatrix};
use pshcert::constructions::{lambda, Lemma21U, Lemma3Form, Thm1Scenario, Thm2Scenario, LOG10_WEIGHT};
use pshcert::geometry::{path_connected_probe, sample_scalars, theta_seq, Region, Sampler};
use pshcert::logpoles::{make_schedule, Variant};
use pshcert::{Point, Stencil};
use std::sync::OnceLock;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pt(z: Complex64, w: Complex64) -> Point {
    Point::new(z, vec![w]).unwrap()
}

fn thm2() -> &'static Thm2Scenario {
    static S: OnceLock<Thm2Scenario> = OnceLock::new();
    S.get_or_init(|| Thm2Scenario::build(2, 60, 42, 20_000).unwrap())
}

/// `2 pi frac(j g)` with `g = (sqrt 5 - 1) / 2`, via exact integer part.
fn theta_oracle(j: u32) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let x = j as f64 * g;
    TAU * (x - x.floor())
}

#[test]
fn golden_angles() {
    assert_abs_diff_eq!(theta_seq(1).unwrap(), 3.8832220775, epsilon = 1e-9);
    // frac(2g) = 0.2360679775 gives 1.4832588477.
    assert_abs_diff_eq!(theta_seq(2).unwrap(), 1.4832588477, epsilon = 1e-9);
    for j in 1..200 {
        assert_abs_diff_eq!(theta_seq(j as i64).unwrap(), theta_oracle(j), epsilon = 1e-9);
    }
    assert!(theta_seq(0).is_err() && theta_seq(-3).is_err());
}

#[test]
fn golden_angles_are_distinct() {
    let mut t: Vec<f64> = (1..=10_000).map(|j| theta_seq(j).unwrap()).collect();
    t.sort_by(f64::total_cmp);
    assert!(t.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn sampled_disk_and_annulus() {
    let pts = sample_scalars(&Region::disk(c(0.0, 0.0), 1.0).unwrap(), &Sampler::uniform(7, 3)).unwrap();
    assert_eq!(pts.len(), 3);
    assert!(pts.iter().all(|z| z.norm() < 1.0));
    let pts = sample_scalars(&Region::annulus(c(0.0, 0.0), 0.5, 1.0).unwrap(), &Sampler::uniform(1, 500)).unwrap();
    assert!(pts.iter().all(|z| z.norm() > 0.5 && z.norm() < 1.0));
    let pts = sample_scalars(&Region::disk(c(0.0, 0.0), 1.0).unwrap(), &Sampler::boundary_circle(8)).unwrap();
    for (k, z) in pts.iter().enumerate() {
        assert_abs_diff_eq!((z - Complex64::from_polar(1.0, TAU * k as f64 / 8.0)).norm(), 0.0, epsilon = 1e-15);
    }
}

#[test]
fn convex_sublevel_sets_are_connected() {
    let f = |p: &Point| p.norm_sqr();
    let path = [pt(c(0.0, 0.0), c(0.0, 0.0)), pt(c(1.0, 0.0), c(0.0, 0.0))];
    assert!(path_connected_probe(f, 4.0, &path, 32).unwrap().connected);
}

#[test]
fn slice_through_w0_connects_the_origin_to_a_pole() {
    let t = thm2();
    let path = [Point::new(c(0.0, 0.0), t.w0.clone()).unwrap(), Point::new(t.schedule().a(1), t.w0.clone()).unwrap()];
    assert!(path_connected_probe(|p: &Point| t.d2(p), 0.0, &path, 64).unwrap().connected);
}

#[test]
fn first_weight_and_series_bound() {
    let s = make_schedule(Variant::Thm1, 60, None).unwrap();
    // 2^-2 / log 6 = 0.13952766...
    assert_abs_diff_eq!(s.delta(1), 0.25 / 6f64.ln(), epsilon = 1e-16);
    assert_abs_diff_eq!(s.delta(1), 0.1395277, epsilon = 1e-7);
    let series: f64 = (1..=60).map(|j| s.delta(j) * (3.0 * j as f64).ln()).sum();
    assert!(series <= 0.5);
}

#[test]
fn disjoint_discs_for_a_thousand_poles() {
    let s = make_schedule(Variant::Thm1, 1000, None).unwrap();
    for j in 2..=1000 {
        for k in 1..j {
            assert!(s.r(j) + s.r(k) <= 0.5 * (s.a(j) - s.a(k)).norm(), "j={j} k={k}");
        }
    }
}

#[test]
fn sigma_values() {
    let s = make_schedule(Variant::Thm1, 60, None).unwrap();
    assert!(s.sigma_eval(s.a(1), 10).unwrap().is_pole());
    let v = s.sigma_eval(c(0.0, 0.0), 60).unwrap();
    let oracle: f64 =
        (1..=60).map(|j| 2f64.powi(-(j as i32) - 1) / (3.0 * j as f64 + 3.0).ln() * (1.0 + 1.0 / j as f64).ln()).sum();
    assert_abs_diff_eq!(v.value, oracle, epsilon = 1e-14);
    assert!(v.value > 0.0);
    assert!(v.error_radius < (-60.0 * LN_2).exp());
}

#[test]
fn lower_bounds_off_the_discs() {
    let t = thm2();
    let s = t.schedule();
    assert!(s.sigma_lower_bound_off_discs(c(0.0, 0.0)).unwrap().value > 0.0);
    assert!(s.sigma_lower_bound_off_discs(c(3.0, 0.0)).unwrap().value > -1.0);
    let lr = s.log_rho(5).unwrap();
    for k in 0..16 {
        let v = s.sigma_lower_bound_near_pole(5, lr, TAU * k as f64 / 16.0).unwrap();
        assert!(v.value >= -1.0);
    }
}

#[test]
fn levi_forms_of_quadratics() {
    let st = Stencil::new(1e-4).unwrap();
    let p = pt(c(0.4, -0.1), c(0.2, 0.7));
    let a = levi_sample(&|q: &Point| q.z.norm_sqr(), &p, &st).unwrap();
    assert_abs_diff_eq!(a.matrix.get(0, 0).re, 1.0, epsilon = 1e-6);
    assert_abs_diff_eq!(a.min_eig, 0.0, epsilon = 1e-6);
    let b = levi_sample(&|q: &Point| q.norm_sqr(), &p, &st).unwrap();
    assert_abs_diff_eq!(b.min_eig, 1.0, epsilon = 1e-6);
}

#[test]
fn small_hermitian_eigenvalues() {
    assert_eq!(hermitian_min_eig(&HermitianMatrix::<f64>::identity(2)).unwrap(), 1.0);
    assert_abs_diff_eq!(hermitian_min_eig(&HermitianMatrix::diagonal(&[50.0, 1.0])).unwrap(), 1.0, epsilon = 1e-14);
    let h = HermitianMatrix::from_rows(2, vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]).unwrap();
    // Characteristic polynomial (2 - x)^2 - 1.
    assert_abs_diff_eq!(hermitian_min_eig(&h).unwrap(), 1.0, epsilon = 1e-14);
}

#[test]
fn circle_means() {
    assert_abs_diff_eq!(circle_mean_test(&|z: Complex64| z.re, c(0.3, 0.2), 0.5, 64).unwrap(), 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(
        circle_mean_test(&|z: Complex64| z.norm_sqr(), c(0.0, 0.0), 1.0, 64).unwrap(),
        1.0,
        epsilon = 1e-14
    );
    assert_abs_diff_eq!(
        circle_mean_test(&|z: Complex64| z.norm().ln(), c(2.0, 0.0), 1.0, 64).unwrap(),
        0.0,
        epsilon = 1e-12
    );
}

#[test]
fn psh_certificates_for_quadratics() {
    let ball = Region::product(Region::disk(c(0.0, 0.0), 1.0).unwrap(), Region::ball(vec![c(0.0, 0.0)], 1.0).unwrap())
        .unwrap();
    let pts = pshcert::geometry::sample_points(&ball, &Sampler::uniform(3, 300)).unwrap();
    let st = Stencil::new(1e-4).unwrap();
    let good = certify_psh("q", &|p: &Point| p.norm_sqr(), &pts, &st, 0.5, 1e-6);
    assert!(good.passed());
    assert_abs_diff_eq!(good.worst_margin, 0.5, epsilon = 1e-6);
    let bad = certify_psh("n", &|p: &Point| -p.z.norm_sqr(), &pts, &st, 0.0, 1e-6);
    assert!(!bad.passed());
    assert_abs_diff_eq!(bad.metric("min_eig").unwrap(), -1.0, epsilon = 1e-6);
}

#[test]
fn lemma21_values() {
    let u = thm2().u();
    let s = u.schedule();
    assert_eq!(u.eval(c(0.0, 0.0)), 0.0);
    assert_eq!(u.eval(c(3.0, 0.0)), 9.0);
    for j in 1..=50 {
        assert_eq!(u.eval(s.a(j)), 1.0);
        assert_eq!(u.eval_local(j, s.log_rho(j).unwrap() - LN_2, 0.3), 1.0);
        // Max-branch bound at radius rho_j.
        assert!(2.25f64.powi(2) + s.eps(j).unwrap() * s.log_rho(j).unwrap() < 1.0);
        assert!(s.log_rho(j).unwrap() <= (0.25 * s.r(j)).ln());
    }
}

#[test]
fn lemma21_rebuilds_identically() {
    let a = Lemma21U::build(8).unwrap();
    let b = Lemma21U::build(8).unwrap();
    assert_eq!(a.schedule().export(), b.schedule().export());
}

#[test]
fn final_lemma_plateau() {
    let f = Lemma3Form::build(2.5, 2, 42, 5000).unwrap();
    let p = pt(c(0.3, 0.2), c(1.5, -0.4));
    let xi = [c(0.7, 0.1), c(-0.2, 0.9)];
    let want = f.c * xi[0].norm_sqr() + xi[1].norm_sqr();
    assert_abs_diff_eq!(f.hessian_analytic(&p, &xi).unwrap(), want, epsilon = 1e-9 * want);
    assert_abs_diff_eq!(f.hessian_analytic(&p, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(), f.c, epsilon = 1e-9 * f.c);
    // (lambda')^2 = 4 g'^2 lambda, so the ratio stays bounded by L.
    for k in 1..1000 {
        let t = k as f64 / 1000.0;
        let d = pshcert::constructions::lambda_d1(t);
        assert!(d * d <= f.l * lambda(t) + 1e-12, "t={t}");
    }
}

#[test]
fn thm1_points() {
    let t = Thm1Scenario::build(2, 60).unwrap();
    assert_eq!(t.d1(&pt(c(0.0, 0.0), c(0.0, 0.0))), f64::NEG_INFINITY);
    assert!(t.d1(&pt(c(0.9, 0.3), c(-0.5, 0.8))) < 0.0);
    // On the domain phi~ < 4 - |w|^2 / 2, so at |w| = 4.5 it is below -2.
    let far = pt(c(1e-300, 0.0), c(0.0, 4.5));
    assert!(t.contains(&far));
    assert!(t.phi_tilde(&far) < 4.0 - 0.5 * 4.5 * 4.5);
    assert_eq!(t.phi(&far), -2.0);
}

#[test]
fn thm2_points() {
    let t = thm2();
    let p = Point::new(c(0.0, 0.0), t.w0.clone()).unwrap();
    assert!(t.contains(&p) && t.in_e(&p));
    // |w - w0| <= 5 on the closed unit ball and log10 5 < 3/4.
    assert!(5f64.log10() < 0.75);
    assert_eq!(t.pole_weight, LOG10_WEIGHT);
    assert!(t.d2(&pt(c(1.0, 0.0), c(-1.0, 0.0))) < 0.0);
    let q = pt(c(0.5, 0.1), c(0.3, 0.2));
    assert_abs_diff_eq!(t.phi(&q), 0.26 + t.c_weight * lambda(0.26) * 0.13, epsilon = 1e-15);
}
