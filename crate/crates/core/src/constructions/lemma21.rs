use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::{chi, CheckConfig, ConstructionError};
use crate::calculus::circle_mean_test;
use crate::geometry::{sample_scalars, Region, Sampler};
use crate::logpoles::{disc_radius, make_schedule, DiscData, PoleSchedule, Variant};
use crate::Certificate;

/// Annulus samples per disc for the Laplacian supremum.
pub const ANNULUS_SAMPLES: usize = 1000;
/// Relative FD step (times `r_j`) for the Laplacian supremum.
const LAPLACIAN_STEP: f64 = 1e-3;
/// Fixed seed: the schedule must not depend on the run seed.
const EPS_SEED: u64 = 0x2121;
/// Poles checked individually.
const CHECKED_POLES: usize = 50;
const PROBES: usize = 1000;

/// `chi(|zeta| / r) log|zeta|` in local coordinates `zeta = z - a_j`.
pub fn perturbation(r: f64, zeta: Complex64) -> f64 {
    let d = zeta.norm();
    chi(d / r) * d.ln()
}

/// Five-point Laplacian.
pub fn laplacian_fd<F: Fn(Complex64) -> f64>(f: &F, z: Complex64, h: f64) -> f64 {
    let e = [Complex64::new(h, 0.0), Complex64::new(0.0, h)];
    (f(z + e[0]) + f(z - e[0]) + f(z + e[1]) + f(z - e[1]) - 4.0 * f(z)) / (h * h)
}

fn annulus_points(j: usize) -> Result<Vec<Complex64>, ConstructionError> {
    let r = disc_radius(j);
    let region = Region::annulus(Complex64::new(0.0, 0.0), 0.25 * r, 0.75 * r)?;
    let sampler = Sampler::uniform(EPS_SEED, ANNULUS_SAMPLES).stream(&format!("lemma21.eps.{j}"));
    Ok(sample_scalars(&region, &sampler)?)
}

fn perturbation_laplacians(j: usize) -> Result<Vec<(Complex64, f64)>, ConstructionError> {
    let r = disc_radius(j);
    let p = |zeta: Complex64| perturbation(r, zeta);
    annulus_points(j)?
        .into_iter()
        .map(|zeta| {
            let l = laplacian_fd(&p, zeta, r * LAPLACIAN_STEP);
            if l.is_finite() {
                Ok((zeta, l))
            } else {
                Err(ConstructionError::Failed(format!("non-finite Laplacian in disc {j} at {zeta}")))
            }
        })
        .collect()
}

/// `eps_j = 2 / K_j` with `K_j = max(1, 2 sup |Delta perturbation|)` over the transition annulus.
pub fn lemma21_eps(j: usize) -> Result<f64, ConstructionError> {
    if j == 0 {
        return Err(ConstructionError::InvalidArgument("disc index must be >= 1".into()));
    }
    let sup = perturbation_laplacians(j)?.iter().fold(0.0f64, |m, (_, l)| m.max(l.abs()));
    Ok(2.0 / (2.0 * sup).max(1.0))
}

/// `log rho_j = min(log(r_j / 4), -5 / eps_j)`.
pub fn lemma21_log_rho(j: usize, eps: f64) -> f64 {
    (disc_radius(j) / 4.0).ln().min(-5.0 / eps)
}

/// `eps_j` and `log rho_j` for `j = 1..=j_max`.
pub fn lemma21_discs(j_max: usize) -> Result<DiscData, ConstructionError> {
    let eps: Vec<f64> = (1..=j_max).into_par_iter().map(lemma21_eps).collect::<Result<_, _>>()?;
    let log_rho = eps.iter().enumerate().map(|(i, e)| lemma21_log_rho(i + 1, *e)).collect();
    Ok(DiscData { eps, log_rho })
}

/// The continuous subharmonic function `u` with `u(a_j) = 1` and `u = |z|^2` on the closed unit disc.
///
/// Discs beyond the schedule's `J_max` are not applied.
#[derive(Debug, Clone)]
pub struct Lemma21U {
    schedule: PoleSchedule,
}

impl Lemma21U {
    /// Builds disc data and the matching second-variant schedule.
    pub fn build(j_max: usize) -> Result<Self, ConstructionError> {
        let discs = lemma21_discs(j_max)?;
        Self::from_schedule(make_schedule(Variant::Thm2, j_max, Some(discs))?)
    }

    pub fn from_schedule(schedule: PoleSchedule) -> Result<Self, ConstructionError> {
        if schedule.eps(1).is_none() {
            return Err(ConstructionError::InvalidArgument("schedule carries no disc data".into()));
        }
        Ok(Self { schedule })
    }

    pub fn schedule(&self) -> &PoleSchedule {
        &self.schedule
    }

    fn eps(&self, j: usize) -> f64 {
        self.schedule.eps(j).expect("checked at construction")
    }

    fn log_rho(&self, j: usize) -> f64 {
        self.schedule.log_rho(j).expect("checked at construction")
    }

    /// `|z|^2 + eps_j chi(|z - a_j| / r_j) log|z - a_j|`, before the max with `1`.
    pub fn inner_branch(&self, j: usize, z: Complex64) -> f64 {
        let s = &self.schedule;
        z.norm_sqr() + self.eps(j) * perturbation(s.r(j), z - s.a(j))
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        match self.schedule.disc_index(z) {
            Some(j) => self.inner_branch(j, z).max(1.0),
            None => z.norm_sqr(),
        }
    }

    /// `u(a_j + e^{log_dist} e^{i alpha})`, valid below `f64` resolution.
    pub fn eval_local(&self, j: usize, log_dist: f64, alpha: f64) -> f64 {
        let s = &self.schedule;
        let z = s.a(j) + Complex64::from_polar(log_dist.exp(), alpha);
        if log_dist < (s.r(j) / 4.0).ln() {
            // Plateau of chi: the perturbation is exactly eps_j log_dist.
            (z.norm_sqr() + self.eps(j) * log_dist).max(1.0)
        } else {
            self.eval(z)
        }
    }

    /// Property checks of the construction.
    pub fn properties(&self, cfg: &CheckConfig) -> Result<Vec<Certificate>, ConstructionError> {
        let s = &self.schedule;
        let jj = CHECKED_POLES.min(s.j_max());
        let mut out = Vec::new();

        out.push(Certificate::from_margins(
            "lemma21.u_at_poles",
            0.0,
            (1..=jj).map(|j| (-(self.eval(s.a(j)) - 1.0).abs(), vec![(s.a(j).re, s.a(j).im)])),
        ));

        let mut rng = cfg.rng("lemma21.rho_discs");
        let mut rows = Vec::new();
        for j in 1..=jj {
            let lr = self.log_rho(j);
            // The midpoint a_j + rho_j / 2 and random points of D(a_j, rho_j).
            rows.push((-(self.eval_local(j, lr - std::f64::consts::LN_2, 0.0) - 1.0).abs(), vec![(j as f64, lr)]));
            for _ in 0..20 {
                let ld = lr - 50.0 * rng.random::<f64>();
                let alpha = std::f64::consts::TAU * rng.random::<f64>();
                rows.push((-(self.eval_local(j, ld, alpha) - 1.0).abs(), vec![(j as f64, ld)]));
            }
        }
        out.push(Certificate::from_margins("lemma21.u_on_rho_discs", 0.0, rows));

        let closed = Region::closed_disk(Complex64::new(0.0, 0.0), 1.0)?;
        let zs = sample_scalars(&closed, &cfg.sampler("lemma21.closed_disc", PROBES))?;
        out.push(Certificate::from_margins(
            "lemma21.u_on_closed_disc",
            0.0,
            zs.iter().map(|z| (-(self.eval(*z) - z.norm_sqr()).abs(), vec![(z.re, z.im)])),
        ));

        let mut rows = Vec::new();
        for j in 1..=jj {
            for k in 0..1000 {
                let z = s.a(j) + Complex64::from_polar(s.r(j), std::f64::consts::TAU * k as f64 / 1000.0);
                let diff = (self.inner_branch(j, z).max(1.0) - z.norm_sqr()).abs();
                rows.push((-diff, vec![(z.re, z.im)]));
            }
        }
        out.push(Certificate::from_margins("lemma21.branch_continuity", 1e-12, rows));

        out.push(self.sub_mean_value(cfg)?);
        out.push(self.laplacian_margin()?);

        out.push(Certificate::from_margins(
            "lemma21.rho_bound",
            0.0,
            (1..=s.j_max()).map(|j| {
                let lr = self.log_rho(j);
                let reach = s.a(j).norm() + lr.exp();
                // Both |a_j| + rho_j <= 9/4 and (9/4)^2 + eps_j log rho_j < 1, plus rho_j <= r_j / 4.
                let m = (2.25 - reach).min(1.0 - (2.25f64.powi(2) + self.eps(j) * lr)).min((s.r(j) / 4.0).ln() - lr);
                (m, vec![(j as f64, lr)])
            }),
        ));
        Ok(out)
    }

    fn sub_mean_value(&self, cfg: &CheckConfig) -> Result<Certificate, ConstructionError> {
        let s = &self.schedule;
        let jj = CHECKED_POLES.min(s.j_max());
        let mut rng = cfg.rng("lemma21.sub_mean_value");
        let mut probes = Vec::with_capacity(PROBES);
        // Circles inside a disc, keeping the pole at least r/2 away from the circle.
        while probes.len() < PROBES / 2 {
            let j = rng.random_range(1..=jj);
            let rj = s.r(j);
            let zeta = Complex64::from_polar(
                0.7 * rj * rng.random::<f64>().sqrt(),
                std::f64::consts::TAU * rng.random::<f64>(),
            );
            let radius = (0.05f64).min(rj / 8.0) * (0.05 + 0.95 * rng.random::<f64>());
            let d = zeta.norm();
            if d <= 0.5 * radius || d >= 1.5 * radius {
                probes.push((s.a(j) + zeta, radius));
            }
        }
        // Circles away from every disc, where u = |z|^2.
        while probes.len() < PROBES {
            let z0 =
                Complex64::from_polar(2.3 * rng.random::<f64>().sqrt(), std::f64::consts::TAU * rng.random::<f64>());
            let radius = 0.05 * (0.05 + 0.95 * rng.random::<f64>());
            if (1..=s.j_max()).all(|j| (z0 - s.a(j)).norm() >= radius + s.r(j)) {
                probes.push((z0, radius));
            }
        }
        let u = |z: Complex64| self.eval(z);
        let rows: Vec<_> = probes
            .par_iter()
            .map(|(z0, r)| {
                let m = circle_mean_test(&u, *z0, *r, 64).unwrap_or(f64::NEG_INFINITY);
                (m, vec![(z0.re, z0.im), (*r, 0.0)])
            })
            .collect();
        Ok(Certificate::from_margins("lemma21.sub_mean_value", 1e-6, rows))
    }

    /// `Delta(|z|^2 + eps_j p) - 2 >= 0` on the transition annuli, with `Delta |z|^2 = 4`.
    fn laplacian_margin(&self) -> Result<Certificate, ConstructionError> {
        let s = &self.schedule;
        let per_disc: Vec<Vec<(f64, Vec<(f64, f64)>)>> = (1..=s.j_max())
            .into_par_iter()
            .map(|j| {
                let eps = self.eps(j);
                Ok(perturbation_laplacians(j)?
                    .into_iter()
                    .map(|(zeta, l)| (4.0 + eps * l - 2.0, vec![(j as f64, 0.0), (zeta.re, zeta.im)]))
                    .collect())
            })
            .collect::<Result<_, ConstructionError>>()?;
        Ok(Certificate::from_margins("lemma21.laplacian_margin", 0.0, per_disc.into_iter().flatten()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::sync::OnceLock;

    fn u() -> &'static Lemma21U {
        static U: OnceLock<Lemma21U> = OnceLock::new();
        U.get_or_init(|| Lemma21U::build(60).unwrap())
    }

    #[test]
    fn laplacian_of_perturbation_vanishes_off_the_transition() {
        let r = disc_radius(3);
        let p = |z: Complex64| perturbation(r, z);
        // Plateau: log is harmonic; outside the support the function is zero.
        let inner = laplacian_fd(&p, Complex64::new(0.2 * r, 0.05 * r), 1e-5 * r);
        assert!(inner.abs() * r * r < 1e-4, "{inner}");
        assert_eq!(laplacian_fd(&p, Complex64::new(0.9 * r, 0.0), 1e-3 * r), 0.0);
        let total = |z: Complex64| z.norm_sqr() + p(z);
        assert_abs_diff_eq!(laplacian_fd(&total, Complex64::new(0.0, 0.9 * r), 1e-3 * r), 4.0, epsilon = 1e-6);
    }

    #[test]
    fn eps_and_rho() {
        let e1 = lemma21_eps(1).unwrap();
        assert!(e1 > 0.0 && e1 <= 2.0);
        let lr = lemma21_log_rho(1, e1);
        assert!(lr <= (disc_radius(1) / 4.0).ln());
        assert!(lr <= -5.0 / e1);
        assert!(lemma21_eps(0).is_err());
        // eps_j shrinks with the disc.
        assert!(lemma21_eps(10).unwrap() < e1);
    }

    #[test]
    fn u_values() {
        let u = u();
        assert_eq!(u.eval(Complex64::new(0.0, 0.0)), 0.0);
        assert_eq!(u.eval(Complex64::new(0.6, -0.3)), 0.6f64 * 0.6 + 0.3 * 0.3);
        assert_eq!(u.eval(Complex64::new(3.0, 0.0)), 9.0);
        for j in 1..=50 {
            assert_eq!(u.eval(u.schedule().a(j)), 1.0);
            let lr = u.schedule().log_rho(j).unwrap();
            assert_eq!(u.eval_local(j, lr - std::f64::consts::LN_2, 1.0), 1.0);
        }
    }

    #[test]
    fn u_between_one_and_modulus_squared_outside_the_disc() {
        let u = u();
        let mut rng = crate::geometry::seeded_rng(5, 0);
        for _ in 0..2000 {
            let j = rng.random_range(1..=60);
            let s = u.schedule();
            let z = s.a(j) + Complex64::from_polar(s.r(j) * rng.random::<f64>(), 6.3 * rng.random::<f64>());
            let v = u.eval(z);
            assert!((1.0..=z.norm_sqr()).contains(&v));
        }
    }

    #[test]
    fn all_properties_pass() {
        let cfg = CheckConfig::default();
        for c in u().properties(&cfg).unwrap() {
            assert!(c.passed(), "{} worst {}", c.name, c.worst_margin);
        }
    }

    #[test]
    fn rejects_first_variant_schedule() {
        let s = make_schedule(Variant::Thm1, 5, None).unwrap();
        assert!(Lemma21U::from_schedule(s).is_err());
    }
}
