use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{check_dim, zero_w, CheckConfig, ConstructionError, LAMBDA_STEP};
use crate::calculus::{hermitian_eigenvalues, hermitian_min_eig, wirtinger_hessian, CalculusError};
use crate::geometry::{sample_points, Region, Sampler};
use crate::{Certificate, Hermitian, Point};

/// Grid size for `L` and `B`.
pub const LAMBDA_GRID: usize = 10_000;
/// Default sample count for the measured lower-bound coefficient.
pub const LEMMA3_SAMPLES: usize = 100_000;
const L_SAFETY: f64 = 1.05;
const MAX_DOUBLINGS: u32 = 6;
const GRID_FD_STEP: f64 = 1e-6;

/// `lambda = g^2` with `g` the smooth step from `1` (at `1/2`) to `0` (at `1`).
pub fn lambda(t: f64) -> f64 {
    let g = LAMBDA_STEP.value(t);
    g * g
}

pub fn lambda_d1(t: f64) -> f64 {
    2.0 * LAMBDA_STEP.value(t) * LAMBDA_STEP.d1(t)
}

pub fn lambda_d2(t: f64) -> f64 {
    let (g, g1, g2) = (LAMBDA_STEP.value(t), LAMBDA_STEP.d1(t), LAMBDA_STEP.d2(t));
    2.0 * g1 * g1 + 2.0 * g * g2
}

/// `log lambda(t)`, finite exactly where `lambda > 0` even when `lambda` underflows.
pub(crate) fn log_lambda(t: f64) -> f64 {
    if t <= LAMBDA_STEP.lo {
        return 0.0;
    }
    if t >= LAMBDA_STEP.hi {
        return f64::NEG_INFINITY;
    }
    // g = 1 / (1 + B/A) with log(B/A) = 1/(1 - t) - 1/(t - 1/2).
    let log_ratio = 1.0 / (LAMBDA_STEP.hi - t) - 1.0 / (t - LAMBDA_STEP.lo);
    let log_g = if log_ratio > 0.0 { -log_ratio - (-log_ratio).exp().ln_1p() } else { -log_ratio.exp().ln_1p() };
    2.0 * log_g
}

/// `S(z_1, z') = lambda(|z_1|^2) |z'|^2 + C |z_1|^2` and its certified constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma3Form {
    pub radius: f64,
    pub dim: usize,
    /// `(lambda')^2 <= L lambda`.
    pub l: f64,
    /// `max |lambda''(t) t + lambda'(t)|` on `[0, 1]`.
    pub b: f64,
    pub c: f64,
    /// `min(C - R^2 B - 2 R^2 L, 1/2)`.
    pub epsilon_analytic: f64,
    /// Smallest sampled ratio `H_S / (|xi_1|^2 + lambda |xi'|^2)`.
    pub epsilon_measured: f64,
    pub epsilon_out: f64,
    pub doublings: u32,
}

fn grid(k: usize) -> f64 {
    k as f64 / LAMBDA_GRID as f64
}

impl Lemma3Form {
    /// Builds with `C = 2 R^2 (B + L) + 1`, doubling `C` while the coefficient is not positive.
    pub fn build(radius: f64, dim: usize, seed: u64, samples: usize) -> Result<Self, ConstructionError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(ConstructionError::InvalidArgument(format!("R = {radius} must be positive")));
        }
        check_dim(dim)?;
        let g1_max = (0..=LAMBDA_GRID)
            .map(|k| {
                let t = grid(k);
                let d =
                    (LAMBDA_STEP.value(t + GRID_FD_STEP) - LAMBDA_STEP.value(t - GRID_FD_STEP)) / (2.0 * GRID_FD_STEP);
                d * d
            })
            .fold(0.0, f64::max);
        let l = 4.0 * g1_max * L_SAFETY;
        let b = (0..=LAMBDA_GRID)
            .map(|k| {
                let t = grid(k);
                (lambda_d2(t) * t + lambda_d1(t)).abs()
            })
            .fold(0.0, f64::max);
        let r2 = radius * radius;
        let mut c = 2.0 * r2 * (b + l) + 1.0;
        for doublings in 0..=MAX_DOUBLINGS {
            let mut form = Self {
                radius,
                dim,
                l,
                b,
                c,
                epsilon_analytic: (c - r2 * b - 2.0 * r2 * l).min(0.5),
                epsilon_measured: f64::NAN,
                epsilon_out: f64::NAN,
                doublings,
            };
            form.epsilon_measured = form.measure(seed, samples)?;
            form.epsilon_out = form.epsilon_analytic.min(form.epsilon_measured);
            if form.epsilon_out > 0.0 {
                return Ok(form);
            }
            c *= 2.0;
        }
        Err(ConstructionError::Failed(format!(
            "no positive lower-bound coefficient after {MAX_DOUBLINGS} doublings of C"
        )))
    }

    /// `D x B(0, R)`.
    pub fn strict_region(&self) -> Result<Region<f64>, ConstructionError> {
        Ok(Region::product(Region::disk(Complex64::new(0.0, 0.0), 1.0)?, Region::ball(zero_w(self.dim), self.radius)?)?)
    }

    fn measure(&self, seed: u64, samples: usize) -> Result<f64, ConstructionError> {
        let pts = sample_points(&self.strict_region()?, &Sampler::uniform(seed, samples).stream("lemma3.measure"))?;
        let ratios: Vec<f64> = pts.par_iter().map(|p| self.min_ratio(p).unwrap_or(f64::NEG_INFINITY)).collect();
        Ok(ratios.into_iter().fold(f64::INFINITY, f64::min))
    }

    pub fn s(&self, p: &Point) -> f64 {
        let t = p.z.norm_sqr();
        lambda(t) * p.w_norm_sqr() + self.c * t
    }

    fn check(&self, p: &Point) -> Result<(), CalculusError> {
        if p.dim() != self.dim {
            return Err(CalculusError::DimensionMismatch { expected: self.dim, found: p.dim() });
        }
        Ok(())
    }

    /// Analytic complex Hessian of `S` at `p`.
    pub fn h_matrix(&self, p: &Point) -> Result<Hermitian, CalculusError> {
        self.check(p)?;
        let t = p.z.norm_sqr();
        let (l0, l1, l2) = (lambda(t), lambda_d1(t), lambda_d2(t));
        let mut h = Hermitian::zeros(self.dim);
        h.set(0, 0, Complex64::new((l2 * t + l1) * p.w_norm_sqr() + self.c, 0.0));
        for (k, wk) in p.w.iter().enumerate() {
            let e = p.z.conj() * wk * l1;
            h.set(0, k + 1, e);
            h.set(k + 1, 0, e.conj());
            h.set(k + 1, k + 1, Complex64::new(l0, 0.0));
        }
        Ok(h)
    }

    /// The displayed expansion of `H_S(z, xi)`, with `<z', xi'> = sum_j z_j conj(xi_j)`.
    pub fn hessian_analytic(&self, p: &Point, xi: &[Complex64]) -> Result<f64, CalculusError> {
        self.check(p)?;
        if xi.len() != self.dim {
            return Err(CalculusError::DimensionMismatch { expected: self.dim, found: xi.len() });
        }
        let t = p.z.norm_sqr();
        let (l0, l1, l2) = (lambda(t), lambda_d1(t), lambda_d2(t));
        let inner: Complex64 = p.w.iter().zip(&xi[1..]).map(|(z, x)| z * x.conj()).sum();
        let tail: f64 = xi[1..].iter().map(|x| x.norm_sqr()).sum();
        Ok(((l2 * t + l1) * p.w_norm_sqr() + self.c) * xi[0].norm_sqr()
            + 2.0 * (p.z.conj() * xi[0] * inner * l1).re
            + l0 * tail)
    }

    /// `min_xi H_S(z, xi) / (|xi_1|^2 + lambda |xi'|^2)`.
    ///
    /// With `eta' = g xi'` and `lambda' = 2 g g'` this is the smallest eigenvalue
    /// of `[[H_11, 2 g' conj(z_1) z'], [.., I]]`, which stays well scaled where `lambda` underflows.
    pub fn min_ratio(&self, p: &Point) -> Result<f64, CalculusError> {
        self.check(p)?;
        let t = p.z.norm_sqr();
        let h11 = (lambda_d2(t) * t + lambda_d1(t)) * p.w_norm_sqr() + self.c;
        if t >= LAMBDA_STEP.hi {
            return Ok(h11);
        }
        let g1 = LAMBDA_STEP.d1(t);
        let mut m = Hermitian::identity(self.dim);
        m.set(0, 0, Complex64::new(h11, 0.0));
        for (k, wk) in p.w.iter().enumerate() {
            let e = p.z.conj() * wk * (2.0 * g1);
            m.set(0, k + 1, e);
            m.set(k + 1, 0, e.conj());
        }
        hermitian_min_eig(&m)
    }

    pub fn properties(&self, cfg: &CheckConfig, samples: usize) -> Result<Vec<Certificate>, ConstructionError> {
        let metrics = |c: Certificate| {
            c.with_metric("R", self.radius).with_metric("L", self.l).with_metric("B", self.b).with_metric("C", self.c)
        };
        let mut out = Vec::new();

        let fine = |k: usize| 1.5 * k as f64 / LAMBDA_GRID as f64;
        out.push(Certificate::from_margins(
            "lemma3.lambda_profile",
            0.0,
            (0..=LAMBDA_GRID).map(|k| {
                let t = fine(k);
                let v = lambda(t);
                let mut m = v.min(1.0 - v);
                if t <= 0.25 {
                    m = m.min(-(v - 1.0).abs());
                }
                // Positivity is decided on log lambda, which does not underflow.
                let positive = log_lambda(t) > f64::NEG_INFINITY;
                if positive != (t < 1.0) {
                    m = f64::NEG_INFINITY;
                }
                (m, vec![(t, 0.0)])
            }),
        ));

        let h = 1e-4;
        out.push(Certificate::from_margins(
            "lemma3.lambda_smoothness",
            1e-6,
            [0.25, 0.5, 1.0].into_iter().flat_map(|t0| {
                let f = [lambda as fn(f64) -> f64, lambda_d1, lambda_d2];
                f.into_iter().map(move |f| {
                    let left = (f(t0) - f(t0 - h)) / h;
                    let right = (f(t0 + h) - f(t0)) / h;
                    let jump = (f(t0 + h) - f(t0 - h)).abs();
                    (-((left - right).abs().max(jump)), vec![(t0, 0.0)])
                })
            }),
        ));

        out.push(Certificate::from_margins(
            "lemma3.l_bound",
            1e-10,
            (0..=LAMBDA_GRID).map(|k| {
                let t = grid(k);
                (self.l * lambda(t) - lambda_d1(t).powi(2), vec![(t, 0.0)])
            }),
        ));

        let mut rng = cfg.rng("lemma3.completion");
        let r = self.radius;
        let rows: Vec<_> = (0..cfg.samples)
            .map(|_| {
                let t: f64 = rng.random::<f64>();
                let x1 = gaussian(&mut rng).norm();
                let xp = (0..self.dim - 1).map(|_| gaussian(&mut rng).norm_sqr()).sum::<f64>().sqrt();
                let (l0, l1) = (lambda(t), lambda_d1(t).abs());
                let mid = 0.5 * (r * self.l.sqrt() * x1 - l0.sqrt() * xp).powi(2);
                let rhs = 0.5 * r * r * self.l * x1 * x1 - r * l1 * x1 * xp + 0.5 * l0 * xp * xp;
                (mid.min(rhs - mid), vec![(t, 0.0), (x1, xp)])
            })
            .collect();
        out.push(Certificate::from_margins("lemma3.completion", 1e-10, rows));

        out.push(self.fd_oracle(cfg)?);

        let pts = sample_points(&self.strict_region()?, &cfg.sampler("lemma3.lower_bound", samples))?;
        let mut rng = cfg.rng("lemma3.lower_bound.xi");
        let xis: Vec<Vec<Complex64>> = pts.iter().map(|_| unit_vector(&mut rng, self.dim)).collect();
        let rows: Vec<_> = pts
            .par_iter()
            .zip(&xis)
            .map(|(p, xi)| {
                let hs = self.hessian_analytic(p, xi).unwrap_or(f64::NEG_INFINITY);
                let tail: f64 = xi[1..].iter().map(|x| x.norm_sqr()).sum();
                let weight = xi[0].norm_sqr() + lambda(p.z.norm_sqr()) * tail;
                (hs - self.epsilon_out * weight, p.to_pairs())
            })
            .collect();
        out.push(metrics(
            Certificate::from_margins("lemma3.form_lower_bound", cfg.tol, rows)
                .with_metric("epsilon_out", self.epsilon_out)
                .with_metric("epsilon_analytic", self.epsilon_analytic)
                .with_metric("epsilon_measured", self.epsilon_measured)
                .with_metric("doublings", f64::from(self.doublings)),
        ));
        Ok(out)
    }

    /// FD Levi contraction against the analytic expansion, normalised by `||H||_2 |xi|^2`.
    fn fd_oracle(&self, cfg: &CheckConfig) -> Result<Certificate, ConstructionError> {
        const POINTS: usize = 1000;
        let h = cfg.fd_step;
        let envelope = Region::product(
            Region::disk(Complex64::new(0.0, 0.0), 1.2)?,
            Region::ball(zero_w(self.dim), self.radius)?,
        )?;
        let mut pts = Vec::with_capacity(POINTS);
        let mut batch = 0;
        while pts.len() < POINTS {
            let sampler = cfg.sampler(&format!("lemma3.fd_oracle.{batch}"), POINTS);
            for p in sample_points(&envelope, &sampler)? {
                let t = p.z.norm_sqr();
                if (t - 0.5).abs() >= 10.0 * h && (t - 1.0).abs() >= 10.0 * h && pts.len() < POINTS {
                    pts.push(p);
                }
            }
            batch += 1;
        }
        let mut rng = cfg.rng("lemma3.fd_oracle.xi");
        let xis: Vec<Vec<Complex64>> = pts.iter().map(|_| unit_vector(&mut rng, self.dim)).collect();
        let stencil = cfg.stencil()?;
        let s = |p: &Point| self.s(p);
        let rows: Vec<_> = pts
            .par_iter()
            .zip(&xis)
            .map(|(p, xi)| {
                let rel = (|| -> Result<f64, CalculusError> {
                    let fd = wirtinger_hessian(&s, p, &stencil)?.form(xi)?;
                    let an = self.hessian_analytic(p, xi)?;
                    let ev = hermitian_eigenvalues(&self.h_matrix(p)?);
                    let norm = ev[0].abs().max(ev[ev.len() - 1].abs());
                    Ok((fd - an).abs() / norm)
                })()
                .unwrap_or(f64::INFINITY);
                (1e-5 - rel, p.to_pairs())
            })
            .collect();
        Ok(Certificate::from_margins("lemma3.fd_vs_analytic", 0.0, rows))
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn unit_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}
