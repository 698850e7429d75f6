use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use pshcert::calculus::{hermitian_min_eig, HermitianMatrix};
use pshcert::certify::{run_suite, Suite, SuiteConfig};
use pshcert::constructions::{chi, lambda, Lemma21U, CHI};
use pshcert::geometry::{sample, theta_seq, Comparator, Coordinate, Region, Sampler};
use pshcert::logpoles::{make_schedule, PoleSchedule, Variant};
use rand::Rng;

fn thm1_schedule() -> &'static PoleSchedule {
    static S: OnceLock<PoleSchedule> = OnceLock::new();
    S.get_or_init(|| make_schedule(Variant::Thm1, 200, None).unwrap())
}

fn u() -> &'static Lemma21U {
    static U: OnceLock<Lemma21U> = OnceLock::new();
    U.get_or_init(|| Lemma21U::build(40).unwrap())
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn membership_matches_closed_forms_on_many_points() {
    let disk = Region::disk(c(0.3, -0.2), 1.3).unwrap();
    let annulus = Region::annulus(c(0.0, 0.0), 0.5, 2.0).unwrap();
    let ball = Region::ball(vec![c(0.0, 1.0), c(-1.0, 0.0)], 1.5).unwrap();
    let prod = Region::product(disk.clone(), ball.clone()).unwrap();
    let half = Region::intersection(vec![prod.clone(), Region::modulus_halfspace(Coordinate::W, Comparator::Ge, 0.7)])
        .unwrap();
    let mut rng = pshcert::geometry::seeded_rng(5, 0);
    let mut r = || c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
    for _ in 0..100_000 {
        let (a, b, d) = (r(), r(), r());
        assert_eq!(disk.contains(&[a]), (a - c(0.3, -0.2)).norm() < 1.3);
        assert_eq!(annulus.contains(&[a]), a.norm() > 0.5 && a.norm() < 2.0);
        let wn = ((b - c(0.0, 1.0)).norm_sqr() + (d - c(-1.0, 0.0)).norm_sqr()).sqrt();
        assert_eq!(ball.contains(&[b, d]), wn < 1.5);
        let in_prod = (a - c(0.3, -0.2)).norm() < 1.3 && wn < 1.5;
        assert_eq!(prod.contains(&[a, b, d]), in_prod);
        assert_eq!(half.contains(&[a, b, d]), in_prod && (b.norm_sqr() + d.norm_sqr()).sqrt() >= 0.7);
    }
}

#[test]
fn golden_angle_gaps() {
    for jj in [100usize, 377, 1000, 2500] {
        let mut t: Vec<f64> = (1..=jj).map(|j| theta_seq(j as i64).unwrap()).collect();
        t.sort_by(f64::total_cmp);
        let wrap = t[0] + TAU - t[jj - 1];
        let gap = t.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max);
        assert!(gap < 4.0 * PI / jj as f64, "J={jj} gap={gap}");
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let cfg = SuiteConfig { samples: 300, lemma3_samples: 2000, trunc: 20, ..SuiteConfig::default() };
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run_suite(Suite::All, &cfg).unwrap().to_json())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(7));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampling_is_a_function_of_seed_and_label(seed in any::<u64>(), count in 1usize..50) {
        let r = Region::product(
            Region::disk(c(0.0, 0.0), 1.0).unwrap(),
            Region::ball(vec![c(0.0, 0.0); 2], 2.0).unwrap(),
        ).unwrap();
        let a = sample(&r, &Sampler::uniform(seed, count).stream("x")).unwrap();
        let b = sample(&r, &Sampler::uniform(seed, count).stream("x")).unwrap();
        let other = sample(&r, &Sampler::uniform(seed, count).stream("y")).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_ne!(&a, &other);
        prop_assert!(a.iter().all(|p| r.contains(p)));
    }

    #[test]
    fn tail_bound_shrinks_with_truncation(re in -4.0f64..4.0, im in -4.0f64..4.0, j in 1usize..150) {
        let s = thm1_schedule();
        let z = c(re, im);
        prop_assert!(s.tail_bound(z, j + 1) <= s.tail_bound(z, j));
    }

    #[test]
    fn truncations_agree_within_the_tail_bound(re in -3.0f64..3.0, im in -3.0f64..3.0, j in 5usize..100) {
        let s = thm1_schedule();
        let z = c(re, im);
        prop_assume!(s.poles().iter().all(|a| (z - a).norm() > 1e-9));
        let short = s.sigma_eval(z, j).unwrap();
        let long = s.sigma_eval(z, 200).unwrap();
        prop_assert!((short.value - long.value).abs() <= short.error_radius + 1e-12);
    }

    #[test]
    fn u_is_at_least_one_outside_the_disc_and_quadratic_inside(r in 0.0f64..3.0, t in 0.0f64..TAU) {
        let z = Complex64::from_polar(r, t);
        let v = u().eval(z);
        if r <= 1.0 {
            prop_assert_eq!(v, z.norm_sqr());
        } else {
            prop_assert!(v >= 1.0 && v <= z.norm_sqr().max(1.0));
        }
    }

    #[test]
    fn cutoffs_are_monotone_and_bounded(a in 0.0f64..1.2, b in 0.0f64..1.2) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(chi(lo) >= chi(hi));
        prop_assert!((0.0..=1.0).contains(&chi(lo)));
        prop_assert!(lambda(lo) >= lambda(hi));
        prop_assert!(CHI.value(lo) >= 0.0 && CHI.value(lo) <= 1.0);
    }

    #[test]
    fn min_eig_bounds_the_quadratic_form(
        d in proptest::collection::vec(-5.0f64..5.0, 3),
        off in proptest::collection::vec(-2.0f64..2.0, 6),
        xi in proptest::collection::vec(-1.0f64..1.0, 6),
    ) {
        let mut h = HermitianMatrix::diagonal(&d);
        let pairs = [(0, 1), (0, 2), (1, 2)];
        for (k, (i, j)) in pairs.iter().enumerate() {
            let v = c(off[2 * k], off[2 * k + 1]);
            h.set(*i, *j, v);
            h.set(*j, *i, v.conj());
        }
        let x: Vec<Complex64> = (0..3).map(|k| c(xi[2 * k], xi[2 * k + 1])).collect();
        let norm: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let m = hermitian_min_eig(&h).unwrap();
        prop_assert!(h.form(&x).unwrap() >= m * norm - 1e-9);
    }

    #[test]
    fn error_radius_is_nonnegative_and_value_finite_off_poles(re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let s = thm1_schedule();
        let v = s.sigma_eval(c(re, im), 60).unwrap();
        prop_assert!(v.error_radius >= 0.0);
        prop_assert!(v.lower() <= v.value && v.value <= v.upper());
    }
}
