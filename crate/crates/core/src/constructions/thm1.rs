use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::{check_dim, zero_w, CheckConfig, ConstructionError};
use crate::calculus::{certify_psh, circle_mean_test};
use crate::geometry::{path_connected_probe, sample, sample_points, sample_scalars, Region};
use crate::logpoles::{make_schedule, PoleSchedule, Variant};
use crate::{Certificate, Point};

/// Domain `{d_1 < 0}` with
/// `d_1 = sigma(z) + log|z| + 1/2 log|w - w0| + |z|^2 + |w|^2 - 4`, `w0 = (2, 0, ..)`,
/// and the witness `phi = max(phi~, -2)`.
#[derive(Debug, Clone)]
pub struct Thm1Scenario {
    pub n: usize,
    pub trunc: usize,
    pub w0: Vec<Complex64>,
    schedule: PoleSchedule,
}

const PROBE_PATHS: usize = 200;
const PROBE_STEPS: usize = 64;

impl Thm1Scenario {
    pub fn build(n: usize, trunc: usize) -> Result<Self, ConstructionError> {
        check_dim(n)?;
        let schedule = make_schedule(Variant::Thm1, trunc, None)?;
        let mut w0 = zero_w(n);
        w0[0] = Complex64::new(2.0, 0.0);
        Ok(Self { n, trunc, w0, schedule })
    }

    pub fn schedule(&self) -> &PoleSchedule {
        &self.schedule
    }

    pub fn sigma(&self, z: Complex64) -> f64 {
        self.schedule.sigma_value(z, self.trunc)
    }

    fn w_dist(&self, w: &[Complex64]) -> f64 {
        w.iter().zip(&self.w0).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// `d_1` on a coordinate vector.
    pub fn d1_coords(&self, c: &[Complex64]) -> f64 {
        let (z, w) = (c[0], &c[1..]);
        let w2: f64 = w.iter().map(|x| x.norm_sqr()).sum();
        self.sigma(z) + z.norm().ln() + 0.5 * self.w_dist(w).ln() + z.norm_sqr() + w2 - 4.0
    }

    pub fn d1(&self, p: &Point) -> f64 {
        self.d1_coords(&p.coords())
    }

    pub fn phi_tilde(&self, p: &Point) -> f64 {
        self.sigma(p.z) + p.z.norm().ln() + 0.5 * self.w_dist(&p.w).ln() + p.z.norm_sqr() + 0.5 * p.w_norm_sqr()
    }

    pub fn phi(&self, p: &Point) -> f64 {
        self.phi_tilde(p).max(-2.0)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.d1(p) < 0.0
    }

    /// `{1/2 < |z| < 1} x B`.
    pub fn omega(&self) -> Result<Region<f64>, ConstructionError> {
        Ok(Region::product(Region::annulus(Complex64::new(0.0, 0.0), 0.5, 1.0)?, Region::ball(zero_w(self.n), 1.0)?)?
            .with_label("thm1.omega"))
    }

    /// The domain restricted to `|z| <= zr`, `|w| <= wr` for proposals.
    pub fn domain_in(&self, zr: f64, wr: f64) -> Result<Region<f64>, ConstructionError> {
        let me = self.clone();
        let envelope = Region::product(
            Region::closed_disk(Complex64::new(0.0, 0.0), zr)?,
            Region::closed_ball(zero_w(self.n), wr)?,
        )?;
        Ok(Region::sublevel("d1", Arc::new(move |c: &[Complex64]| me.d1_coords(c)), 0.0, envelope))
    }

    pub fn properties(&self, cfg: &CheckConfig) -> Result<Vec<Certificate>, ConstructionError> {
        let s = &self.schedule;
        let k = cfg.samples;
        let mut out = Vec::new();

        out.push(match s.check_invariants() {
            Ok(()) => Certificate::from_margins("thm1.schedule", 0.0, [(0.5 - s.weighted_sum(), vec![])]),
            Err(e) => Certificate::failed("thm1.schedule", 0.0, e.to_string()),
        });

        // |sigma| + tail < 1 on the closed disc.
        let zs =
            sample_scalars(&Region::closed_disk(Complex64::new(0.0, 0.0), 1.0)?, &cfg.sampler("thm1.sigma_bound", k))?;
        let rows: Vec<_> = zs
            .par_iter()
            .map(|z| {
                let v = s.sigma_eval(*z, self.trunc).map(|v| 1.0 - v.value.abs() - v.error_radius);
                (v.unwrap_or(f64::NEG_INFINITY), vec![(z.re, z.im)])
            })
            .collect();
        out.push(Certificate::from_margins("thm1.sigma_closed_disc", 0.0, rows));

        out.push(self.sigma_subharmonic(cfg)?);

        // (A u {0}) x C^{n-1} lies in the domain.
        let mut rng = cfg.rng("thm1.prop3");
        let ws = sample(&Region::closed_ball(zero_w(self.n), 10.0)?, &cfg.sampler("thm1.prop3.w", k))?;
        let rows: Vec<_> = ws
            .iter()
            .map(|w| {
                let j = rng.random_range(0..=self.trunc);
                let z = if j == 0 { Complex64::new(0.0, 0.0) } else { s.a(j) };
                let p = Point::new(z, w.clone()).expect("dimension");
                (-self.d1(&p), p.to_pairs())
            })
            .collect();
        out.push(Certificate::from_margins("thm1.prop3", 0.0, rows));

        // So does C x {w0}.
        let zs = sample_scalars(&Region::closed_disk(Complex64::new(0.0, 0.0), 10.0)?, &cfg.sampler("thm1.prop4", k))?;
        out.push(Certificate::from_margins(
            "thm1.prop4",
            0.0,
            zs.iter().map(|z| {
                let p = Point::new(*z, self.w0.clone()).expect("dimension");
                (-self.d1(&p), p.to_pairs())
            }),
        ));

        // So does closed D x closed B, with the tail bound added to sigma.
        let closed = Region::product(
            Region::closed_disk(Complex64::new(0.0, 0.0), 1.0)?,
            Region::closed_ball(zero_w(self.n), 1.0)?,
        )?;
        let pts = sample_points(&closed, &cfg.sampler("thm1.prop5", k))?;
        out.push(Certificate::from_margins(
            "thm1.prop5",
            0.0,
            pts.iter().map(|p| {
                let err = s.tail_bound(p.z, self.trunc);
                (-(self.d1(p) + err), p.to_pairs())
            }),
        ));

        // Strict plurisubharmonicity on omega; the floor 2 tol keeps it off the noise level.
        let omega_pts = sample_points(&self.omega()?, &cfg.sampler("thm1.omega", k))?;
        let f = |p: &Point| self.phi_tilde(p);
        out.push(certify_psh("thm1.levi_omega", &f, &omega_pts, &cfg.stencil()?, 2.0 * cfg.tol, cfg.tol));

        // phi~ > -2 on omega, so phi = phi~ there.
        out.push(Certificate::from_margins(
            "thm1.prop7",
            0.0,
            omega_pts.iter().map(|p| {
                let err = s.tail_bound(p.z, self.trunc);
                (self.phi_tilde(p) - err + 2.0, p.to_pairs())
            }),
        ));

        // phi in [-2, 4] on domain samples.
        let dom = sample_points(&self.domain_in(3.0, 4.0)?, &cfg.sampler("thm1.phi_bounds", 10 * k))?;
        let rows: Vec<_> = dom
            .par_iter()
            .map(|p| {
                let v = self.phi(p);
                ((v + 2.0).min(4.0 - v), p.to_pairs())
            })
            .collect();
        out.push(Certificate::from_margins("thm1.phi_bounds", 0.0, rows));

        out.push(self.prop8(cfg)?);
        out.push(self.connectivity(cfg)?);
        Ok(out)
    }

    /// Circle means of `sigma_J` at pole-avoiding circles (distance to poles >= 2r).
    fn sigma_subharmonic(&self, cfg: &CheckConfig) -> Result<Certificate, ConstructionError> {
        const PAIRS: usize = 1000;
        let s = &self.schedule;
        let mut rng = cfg.rng("thm1.sigma_subharmonic");
        let mut pairs = Vec::with_capacity(PAIRS);
        while pairs.len() < PAIRS {
            let z0 = Complex64::from_polar(3.0 * rng.random::<f64>().sqrt(), TAU * rng.random::<f64>());
            let r = 0.1 * (0.01 + 0.99 * rng.random::<f64>());
            if s.poles()[..self.trunc].iter().all(|a| (z0 - a).norm() >= 2.0 * r) {
                pairs.push((z0, r));
            }
        }
        let sigma = |z: Complex64| self.sigma(z);
        let rows: Vec<_> = pairs
            .par_iter()
            .map(|(z0, r)| {
                (circle_mean_test(&sigma, *z0, *r, 64).unwrap_or(f64::NEG_INFINITY), vec![(z0.re, z0.im), (*r, 0.0)])
            })
            .collect();
        Ok(Certificate::from_margins("thm1.sigma_subharmonic", 1e-9, rows))
    }

    /// On domain points with `4 < |w| <= 10`: `phi~ < -2` and the majorant `phi~ < 4 - |w|^2 / 2`.
    ///
    /// Such points need `log|z|` far below `-|w|^2`, so `z` is drawn at that scale.
    fn prop8(&self, cfg: &CheckConfig) -> Result<Certificate, ConstructionError> {
        let mut rng = cfg.rng("thm1.prop8");
        let mut rows = Vec::with_capacity(cfg.samples);
        let mut attempts = 0usize;
        while rows.len() < cfg.samples && attempts < 100 * cfg.samples {
            attempts += 1;
            let mut w: Vec<Complex64> =
                (0..self.n - 1).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let target = 4.0 + 6.0 * rng.random::<f64>();
            if norm == 0.0 || target <= 4.0 {
                continue;
            }
            w.iter_mut().for_each(|x| *x *= target / norm);
            let log_rho = -target * target - 10.0 - 5.0 * rng.random::<f64>();
            let z = Complex64::from_polar(log_rho.exp(), TAU * rng.random::<f64>());
            let p = Point::new(z, w).expect("dimension");
            if !self.contains(&p) {
                continue;
            }
            let v = self.phi_tilde(&p);
            let majorant = 4.0 - 0.5 * p.w_norm_sqr();
            rows.push(((-2.0 - v).min(majorant - v), p.to_pairs()));
        }
        if rows.len() < cfg.samples {
            return Ok(Certificate::failed("thm1.prop8", 0.0, "too few domain points with |w| > 4"));
        }
        Ok(Certificate::from_margins("thm1.prop8", 0.0, rows))
    }

    /// Polygonal paths from `(0, 0)` to sampled points of the sets above.
    fn connectivity(&self, cfg: &CheckConfig) -> Result<Certificate, ConstructionError> {
        let base = Point::origin(self.n)?;
        let via_w0 = Point::new(Complex64::new(0.0, 0.0), self.w0.clone())?;
        let closed = Region::product(
            Region::closed_disk(Complex64::new(0.0, 0.0), 1.0)?,
            Region::closed_ball(zero_w(self.n), 1.0)?,
        )?;
        let ends = sample_points(&closed, &cfg.sampler("thm1.connectivity", PROBE_PATHS))?;
        let ws = sample(&Region::closed_ball(zero_w(self.n), 10.0)?, &cfg.sampler("thm1.connectivity.w", PROBE_PATHS))?;
        let mut rng = cfg.rng("thm1.connectivity.j");
        let mut paths: Vec<Vec<Point>> = ends.into_iter().map(|p| vec![base.clone(), p]).collect();
        for w in ws {
            let j = rng.random_range(1..=self.trunc);
            let a = self.schedule.a(j);
            paths.push(vec![base.clone(), via_w0.clone(), Point::new(a, self.w0.clone())?, Point::new(a, w)?]);
        }
        let d1 = |p: &Point| self.d1(p);
        let rows: Vec<_> = paths
            .par_iter()
            .map(|path| {
                let m = match path_connected_probe(d1, 0.0, path, PROBE_STEPS) {
                    Ok(probe) if probe.connected => 1.0,
                    Ok(probe) => -probe.first_violation.unwrap_or(0.0) - 1.0,
                    Err(_) => f64::NEG_INFINITY,
                };
                (m, path[path.len() - 1].to_pairs())
            })
            .collect();
        Ok(Certificate::from_margins("thm1.connectivity", 0.0, rows))
    }
}
