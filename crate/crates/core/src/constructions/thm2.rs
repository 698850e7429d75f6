use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::lemma3::log_lambda;
use super::{check_dim, lambda, zero_w, CheckConfig, ConstructionError, Lemma21U, Lemma3Form};
use crate::calculus::certify_psh;
use crate::geometry::{path_connected_probe, sample, sample_points, sample_scalars, Comparator, Coordinate, Region};
use crate::logpoles::{LogpolesError, PoleSchedule};
use crate::{Certificate, Point, Stencil};

/// Weight of `log|w - w0|` in the defining function: base-10 logarithm.
pub const LOG10_WEIGHT: f64 = std::f64::consts::LOG10_E;
/// `theta` is supported in `|w| < 5/2`; also the radius `R` of the form `S`.
pub const THETA_RADIUS: f64 = 2.5;
/// Exclusion margin around piecewise interfaces.
const INTERFACE_MARGIN: f64 = 1e-3;
const CORE_RADIUS: f64 = 0.8;
const PROBE_PATHS: usize = 200;
const PROBE_STEPS: usize = 64;

/// Domain `{d_2 < 0}` with
/// `d_2 = sigma(z) + k log|w - w0| + |z|^2 + |w|^2 - 3`, `w0 = (4, 0, ..)`,
/// and the witness `phi = phi~ + theta / C`.
#[derive(Debug, Clone)]
pub struct Thm2Scenario {
    pub n: usize,
    pub trunc: usize,
    pub w0: Vec<Complex64>,
    /// `k` above.
    pub pole_weight: f64,
    /// `c = 1 / C`.
    pub c_weight: f64,
    u: Lemma21U,
    form: Lemma3Form,
}

impl Thm2Scenario {
    pub fn build(n: usize, trunc: usize, seed: u64, lemma3_samples: usize) -> Result<Self, ConstructionError> {
        check_dim(n)?;
        let u = Lemma21U::build(trunc)?;
        let form = Lemma3Form::build(THETA_RADIUS, n, seed, lemma3_samples)?;
        let mut w0 = zero_w(n);
        w0[0] = Complex64::new(4.0, 0.0);
        Ok(Self { n, trunc, w0, pole_weight: LOG10_WEIGHT, c_weight: 1.0 / form.c, u, form })
    }

    pub fn with_pole_weight(mut self, k: f64) -> Self {
        self.pole_weight = k;
        self
    }

    pub fn schedule(&self) -> &PoleSchedule {
        self.u.schedule()
    }

    pub fn u(&self) -> &Lemma21U {
        &self.u
    }

    pub fn form(&self) -> &Lemma3Form {
        &self.form
    }

    pub fn sigma(&self, z: Complex64) -> f64 {
        self.schedule().sigma_value(z, self.trunc)
    }

    fn w_dist(&self, w: &[Complex64]) -> f64 {
        w.iter().zip(&self.w0).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Everything in `d_2` except `sigma`.
    fn d2_rest(&self, z: Complex64, w: &[Complex64]) -> f64 {
        let w2: f64 = w.iter().map(|x| x.norm_sqr()).sum();
        self.pole_weight * self.w_dist(w).ln() + z.norm_sqr() + w2 - 3.0
    }

    pub fn d2_coords(&self, c: &[Complex64]) -> f64 {
        self.sigma(c[0]) + self.d2_rest(c[0], &c[1..])
    }

    pub fn d2(&self, p: &Point) -> f64 {
        self.d2_coords(&p.coords())
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.d2(p) < 0.0
    }

    /// `E = ({a_j} x C^{n-1}) u (C x {w0})`, poles up to the truncation.
    pub fn in_e(&self, p: &Point) -> bool {
        p.w == self.w0 || self.schedule().poles()[..self.trunc].contains(&p.z)
    }

    pub fn phi_tilde(&self, p: &Point) -> f64 {
        if p.w_norm() < THETA_RADIUS {
            self.u.eval(p.z)
        } else {
            1.0
        }
    }

    pub fn theta(&self, p: &Point) -> f64 {
        if p.w_norm() < THETA_RADIUS {
            lambda(p.z.norm_sqr()) * p.w_norm_sqr()
        } else {
            0.0
        }
    }

    pub fn phi(&self, p: &Point) -> f64 {
        self.phi_tilde(p) + self.c_weight * self.theta(p)
    }

    /// `D x B`.
    pub fn omega(&self) -> Result<Region<f64>, ConstructionError> {
        Ok(Region::product(Region::disk(Complex64::new(0.0, 0.0), 1.0)?, Region::ball(zero_w(self.n), 1.0)?)?
            .with_label("thm2.omega"))
    }

    /// `{|z| < 4/5} x B`, a compact part of `omega`.
    pub fn omega_core(&self) -> Result<Region<f64>, ConstructionError> {
        Ok(Region::product(Region::disk(Complex64::new(0.0, 0.0), CORE_RADIUS)?, Region::ball(zero_w(self.n), 1.0)?)?
            .with_label("thm2.omega_core"))
    }

    pub fn domain_in(&self, zr: f64, wr: f64) -> Result<Region<f64>, ConstructionError> {
        let me = self.clone();
        let envelope = Region::product(
            Region::closed_disk(Complex64::new(0.0, 0.0), zr)?,
            Region::closed_ball(zero_w(self.n), wr)?,
        )?;
        Ok(Region::sublevel("d2", Arc::new(move |c: &[Complex64]| me.d2_coords(c)), 0.0, envelope))
    }

    /// FD stencil whose step shrinks to `r_j / 100` inside the disc `D(a_j, r_j)`.
    pub fn stencil(&self, step: f64) -> Result<Stencil, ConstructionError> {
        let s = self.schedule().clone();
        Ok(Stencil::new(step)?.with_local_scale(move |p: &Point| match s.disc_index(p.z) {
            Some(j) => 1e-2 * s.r(j) / step,
            None => 1.0,
        }))
    }

    fn random_w<R: Rng>(&self, rng: &mut R, lo: f64, hi: f64) -> Vec<Complex64> {
        loop {
            let w: Vec<Complex64> =
                (0..self.n - 1).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-3 {
                let target = lo + (hi - lo) * rng.random::<f64>();
                return w.into_iter().map(|x| x * (target / norm)).collect();
            }
        }
    }

    pub fn properties(&self, cfg: &CheckConfig) -> Result<Vec<Certificate>, ConstructionError> {
        let s = self.schedule();
        let k = cfg.samples;
        let origin = Complex64::new(0.0, 0.0);
        let mut out = Vec::new();

        out.push(match s.check_invariants() {
            Ok(()) => Certificate::from_margins("thm2.schedule", 0.0, [(0.125 - s.weighted_sum(), vec![])]),
            Err(e) => Certificate::failed("thm2.schedule", 0.0, e.to_string()),
        });

        let zs = sample_scalars(&Region::closed_disk(origin, 1.0)?, &cfg.sampler("thm2.sigma_bound", k))?;
        out.push(Certificate::from_margins(
            "thm2.sigma_closed_disc",
            0.0,
            zs.iter().map(|z| {
                let v = s.sigma_eval(*z, self.trunc).map(|v| 0.25 - v.upper());
                (v.unwrap_or(f64::NEG_INFINITY), vec![(z.re, z.im)])
            }),
        ));

        out.push(self.sigma_off_discs(cfg)?);

        // Domain points with |w| <= 3 have |z| <= 3.
        // Sampled inside the envelope |z| <= 6, so a point with |z| > 3 would show up.
        let pts = sample_points(&self.domain_in(6.0, 3.0)?, &cfg.sampler("thm2.prop4", k))?;
        let sup = pts.iter().map(|p| p.z.norm()).fold(0.0, f64::max);
        out.push(
            Certificate::from_margins("thm2.prop4", 0.0, pts.iter().map(|p| (3.0 - p.z.norm(), p.to_pairs())))
                .with_metric("sup_abs_z", sup),
        );

        // Closed D x closed B lies in the domain.
        let closed = Region::product(Region::closed_disk(origin, 1.0)?, Region::closed_ball(zero_w(self.n), 1.0)?)?;
        let pts = sample_points(&closed, &cfg.sampler("thm2.prop5", k))?;
        out.push(Certificate::from_margins(
            "thm2.prop5",
            0.0,
            pts.iter().map(|p| (-(self.d2(p) + s.tail_bound(p.z, self.trunc)), p.to_pairs())),
        ));

        out.push(self.prop6(cfg)?);
        out.push(self.e_membership(cfg)?);
        out.push(self.branch_agreement(cfg)?);

        // theta is smooth: no domain point with z in closed D and |w| near 5/2.
        let band = Region::intersection(vec![
            Region::product(
                Region::closed_disk(origin, 1.0)?,
                Region::closed_ball(zero_w(self.n), THETA_RADIUS + 1e-2)?,
            )?,
            Region::modulus_halfspace(Coordinate::W, Comparator::Ge, THETA_RADIUS - 1e-2),
        ])?;
        let pts = sample_points(&band, &cfg.sampler("thm2.theta_band", k))?;
        out.push(Certificate::from_margins(
            "thm2.theta_smoothness",
            0.0,
            pts.iter().map(|p| (self.d2(p) - s.tail_bound(p.z, self.trunc), p.to_pairs())),
        ));

        // Plurisubharmonic on omega; the smallest eigenvalue over omega is reported.
        let stencil = self.stencil(cfg.fd_step)?;
        let f = |p: &Point| self.phi(p);
        let omega_pts = sample_points(&self.omega()?, &cfg.sampler("thm2.omega", k))?;
        // Scale of the w-directions of the Levi form; below about -709 it is not representable.
        let ln_lambda_min = omega_pts.iter().map(|p| log_lambda(p.z.norm_sqr())).fold(f64::INFINITY, f64::min);
        out.push(
            certify_psh("thm2.levi_omega", &f, &omega_pts, &stencil, 0.0, cfg.tol)
                .with_metric("c", self.c_weight)
                .with_metric("C", self.form.c)
                .with_metric("ln_lambda_min", ln_lambda_min),
        );
        // Strictly plurisubharmonic on a compact part of omega, floor above FD noise.
        let core_pts = sample_points(&self.omega_core()?, &cfg.sampler("thm2.omega_core", k))?;
        out.push(
            certify_psh("thm2.levi_omega_core", &f, &core_pts, &stencil, 2.0 * cfg.tol, cfg.tol)
                .with_metric("core_radius", CORE_RADIUS),
        );

        // 0 <= phi <= sup u + c (5/2)^2 on domain samples.
        let bound = 9.0 + self.c_weight * THETA_RADIUS * THETA_RADIUS;
        let dom = sample_points(&self.domain_in(3.0, 3.5)?, &cfg.sampler("thm2.phi_bounds", k))?;
        let vals: Vec<f64> = dom.par_iter().map(|p| self.phi(p)).collect();
        let sup = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        out.push(
            Certificate::from_margins(
                "thm2.phi_bounds",
                0.0,
                vals.iter().zip(&dom).map(|(v, p)| (v.min(bound - v), p.to_pairs())),
            )
            .with_metric("sup", sup)
            .with_metric("bound", bound),
        );

        out.push(self.global_psh(cfg, &stencil)?);
        out.push(self.connectivity(cfg)?);
        Ok(out)
    }

    /// Certified lower bound `>= -1` for `sigma` off the discs `D_j`.
    fn sigma_off_discs(&self, cfg: &CheckConfig) -> Result<Certificate, ConstructionError> {
        const POINTS: usize = 1000;
        let s = self.schedule();
        let mut rng = cfg.rng("thm2.sigma_off_discs");
        let mut rows = Vec::with_capacity(POINTS);
        while rows.len() < POINTS / 2 {
            let z = Complex64::from_polar(3.0 * rng.random::<f64>().sqrt(), TAU * rng.random::<f64>());
            match s.sigma_lower_bound_off_discs(z) {
                Ok(v) => rows.push((v.value + 1.0, vec![(z.re, z.im)])),
                Err(LogpolesError::Precondition(_)) => continue,
                Err(e) => return Err(e.into()),
            }
        }
        // Local chart: between the boundary of D_j and radius r_j, including the boundary itself.
        while rows.len() < POINTS {
            let j = rng.random_range(1..=self.trunc);
            let lr = s.log_rho(j).expect("disc data");
            let frac = if rows.len() % 5 == 0 { 0.0 } else { rng.random::<f64>() };
            let ld = lr + frac * (s.r(j).ln() - lr);
            let alpha = TAU * rng.random::<f64>();
            match s.sigma_lower_bound_near_pole(j, ld, alpha) {
                Ok(v) => rows.push((v.value + 1.0, vec![(j as f64, ld), (alpha, 0.0)])),
                Err(LogpolesError::Precondition(_)) => continue,
                Err(e) => return Err(e.into()),
            }
        }
        Ok(Certificate::from_margins("thm2.sigma_off_discs", 0.0, rows))
    }

    /// Points with `2 <= |w| <= 3` are either in some `D_j` or outside the domain.
    fn prop6(&self, cfg: &CheckConfig) -> Result<Certificate, ConstructionError> {
        let s = self.schedule();
        let mut rng = cfg.rng("thm2.prop6");
        let mut rows = Vec::with_capacity(cfg.samples);
        while rows.len() < cfg.samples {
            let w = self.random_w(&mut rng, 2.0, 3.0);
            let rest = |z: Complex64| self.d2_rest(z, &w);
            match rows.len() % 3 {
                // Poles: members, and inside D_j.
                0 => {
                    let j = rng.random_range(1..=self.trunc);
                    let p = Point::new(s.a(j), w.clone())?;
                    let ok = self.contains(&p) && s.disc_index(p.z) == Some(j);
                    rows.push((if ok { f64::INFINITY } else { f64::NEG_INFINITY }, p.to_pairs()));
                }
                // Generic z: certified non-members.
                1 => {
                    let z = Complex64::from_polar(6.0 * rng.random::<f64>().sqrt(), TAU * rng.random::<f64>());
                    match s.sigma_lower_bound_off_discs(z) {
                        Ok(v) => rows.push((v.value + rest(z), Point::new(z, w.clone())?.to_pairs())),
                        Err(LogpolesError::Precondition(_)) => continue,
                        Err(e) => return Err(e.into()),
                    }
                }
                // Just outside some D_j.
                _ => {
                    let j = rng.random_range(1..=self.trunc);
                    let lr = s.log_rho(j).expect("disc data");
                    let ld = lr + rng.random::<f64>() * (s.r(j).ln() - lr);
                    let alpha = TAU * rng.random::<f64>();
                    let z = s.a(j) + Complex64::from_polar(ld.exp(), alpha);
                    match s.sigma_lower_bound_near_pole(j, ld, alpha) {
                        Ok(v) => rows.push((v.value + rest(z), vec![(j as f64, ld), (alpha, 0.0)])),
                        Err(LogpolesError::Precondition(_)) => continue,
                        Err(e) => return Err(e.into()),
                    }
                }
            }
        }
        Ok(Certificate::from_margins("thm2.prop6", 0.0, rows))
    }

    fn e_membership(&self, cfg: &CheckConfig) -> Result<Certificate, ConstructionError> {
        let s = self.schedule();
        let mut rng = cfg.rng("thm2.e_membership");
        let ws = sample(&Region::closed_ball(zero_w(self.n), 10.0)?, &cfg.sampler("thm2.e.w", cfg.samples / 2))?;
        let zs = sample_scalars(
            &Region::closed_disk(Complex64::new(0.0, 0.0), 10.0)?,
            &cfg.sampler("thm2.e.z", cfg.samples - cfg.samples / 2),
        )?;
        let mut pts = Vec::with_capacity(cfg.samples);
        for w in ws {
            pts.push(Point::new(s.a(rng.random_range(1..=self.trunc)), w)?);
        }
        for z in zs {
            pts.push(Point::new(z, self.w0.clone())?);
        }
        Ok(Certificate::from_margins(
            "thm2.e_membership",
            0.0,
            pts.iter().map(|p| (if self.in_e(p) { -self.d2(p) } else { f64::NEG_INFINITY }, p.to_pairs())),
        ))
    }

    /// Domain points with `|w|` within `10^-2` of `5/2` lie over discs where `u = 1`,
    /// so both branches of `phi~` agree.
    fn branch_agreement(&self, cfg: &CheckConfig) -> Result<Certificate, ConstructionError> {
        let s = self.schedule();
        let mut rng = cfg.rng("thm2.branch_agreement");
        let rows: Vec<_> = (0..cfg.samples)
            .map(|i| {
                let w = self.random_w(&mut rng, THETA_RADIUS - 1e-2, THETA_RADIUS + 1e-2);
                let j = rng.random_range(1..=self.trunc);
                let alpha = TAU * rng.random::<f64>();
                let (u, sigma, z) = if i % 2 == 0 {
                    (self.u.eval(s.a(j)), f64::NEG_INFINITY, s.a(j))
                } else {
                    // Deep enough that delta_j log|z - a_j| <= -20.
                    let ld = -(20.0 / s.delta(j)) * (1.0 + rng.random::<f64>());
                    let sigma = s.sigma_near_pole(j, ld, alpha, self.trunc).map(|v| v.value).unwrap_or(f64::NAN);
                    (self.u.eval_local(j, ld, alpha), sigma, s.a(j) + Complex64::from_polar(ld.exp(), alpha))
                };
                let member = sigma + self.d2_rest(z, &w) < 0.0;
                let m = if member { -(u - 1.0).abs() } else { f64::NEG_INFINITY };
                (m, vec![(j as f64, 0.0), (w[0].re, w[0].im)])
            })
            .collect();
        Ok(Certificate::from_margins("thm2.branch_agreement", 0.0, rows))
    }

    /// FD Levi form of `phi` positive semidefinite on domain samples away from interfaces:
    /// the plateau discs `D(a_j, r_j / 4)` (where the max is taken) and `||w| - 5/2| < 10^-3`.
    fn global_psh(&self, cfg: &CheckConfig, stencil: &Stencil) -> Result<Certificate, ConstructionError> {
        let s = self.schedule();
        let dom = self.domain_in(2.5, 3.0)?;
        let mut pts = Vec::with_capacity(cfg.samples);
        let mut batch = 0;
        while pts.len() < cfg.samples {
            let sampler = cfg.sampler(&format!("thm2.global_psh.{batch}"), cfg.samples);
            for p in sample_points(&dom, &sampler)? {
                let near_plateau = s.disc_index(p.z).is_some_and(|j| (p.z - s.a(j)).norm() < 0.25 * s.r(j));
                let near_band = (p.w_norm() - THETA_RADIUS).abs() < INTERFACE_MARGIN;
                if !near_plateau && !near_band && pts.len() < cfg.samples {
                    pts.push(p);
                }
            }
            batch += 1;
        }
        let f = |p: &Point| self.phi(p);
        Ok(certify_psh("thm2.global_psh", &f, &pts, stencil, 0.0, cfg.tol))
    }

    /// Paths to `(0, w0)` through `C x {w0}` and a pole fibre `{a_20} x C^{n-1}`.
    fn connectivity(&self, cfg: &CheckConfig) -> Result<Certificate, ConstructionError> {
        let s = self.schedule();
        let hub = s.a(20.min(self.trunc));
        let base = Point::new(Complex64::new(0.0, 0.0), self.w0.clone())?;
        let closed = Region::product(
            Region::closed_disk(Complex64::new(0.0, 0.0), 1.0)?,
            Region::closed_ball(zero_w(self.n), 1.0)?,
        )?;
        let ends = sample_points(&closed, &cfg.sampler("thm2.connectivity", PROBE_PATHS))?;
        let mut paths: Vec<Vec<Point>> = Vec::new();
        for p in ends {
            paths.push(vec![base.clone(), Point::new(hub, self.w0.clone())?, Point::new(hub, p.w.clone())?, p]);
        }
        paths.push(vec![base.clone(), Point::new(s.a(1), self.w0.clone())?]);
        let d2 = |p: &Point| self.d2(p);
        let rows: Vec<_> = paths
            .par_iter()
            .map(|path| {
                let m = match path_connected_probe(d2, 0.0, path, PROBE_STEPS) {
                    Ok(probe) if probe.connected => 1.0,
                    Ok(probe) => -probe.first_violation.unwrap_or(0.0) - 1.0,
                    Err(_) => f64::NEG_INFINITY,
                };
                (m, path[path.len() - 1].to_pairs())
            })
            .collect();
        Ok(Certificate::from_margins("thm2.connectivity", 0.0, rows))
    }
}
