//! Finite-difference Levi forms and sampled plurisubharmonicity checks.
//!
//! The complex Hessian of a real function `f` on `C^n` is assembled from its
//! real Hessian `R` in the coordinates `(x_1, y_1, ..., x_n, y_n)`:
//!
//! `H_jk = 1/4 [(R_xjxk + R_yjyk) + i (R_xjyk - R_yjxk)]`.
//!
//! `R` is built symmetric by construction, so `H` is Hermitian up to rounding.

mod certificate;
mod hermitian;

pub use certificate::{Certificate, Status, Witness, MAX_WITNESSES};
pub use hermitian::{
    hermitian_eigenvalues, hermitian_min_eig, min_eig_2x2, symmetric_eigenvalues, HermitianMatrix, MAX_DIM,
};

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use crate::geometry::CPoint;
use crate::Scalar;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CalculusError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("non-finite value {value} at stencil point {point:?}")]
    Stencil { point: Vec<(f64, f64)>, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdOrder {
    Second,
    Fourth,
}

/// Per-point step factor; see [`Stencil::step_at`].
pub type LocalScale<T> = Arc<dyn Fn(&CPoint<T>) -> T + Send + Sync>;

/// Central finite-difference stencil.
#[derive(Clone)]
pub struct Stencil<T> {
    pub step: T,
    pub order: FdOrder,
    /// Optional per-point factor; the effective step is `step * min(1, scale(p))`.
    pub local_scale: Option<LocalScale<T>>,
}

impl<T: fmt::Debug> fmt::Debug for Stencil<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Stencil")
            .field("step", &self.step)
            .field("order", &self.order)
            .field("local_scale", &self.local_scale.is_some())
            .finish()
    }
}

impl<T: Scalar> Stencil<T> {
    pub fn new(step: T) -> Result<Self, CalculusError> {
        if !(step > T::zero()) || !step.is_finite() {
            return Err(CalculusError::InvalidArgument(format!("stencil step {step} must be > 0")));
        }
        Ok(Self { step, order: FdOrder::Second, local_scale: None })
    }

    pub fn fourth_order(mut self) -> Self {
        self.order = FdOrder::Fourth;
        self
    }

    pub fn with_local_scale(mut self, scale: impl Fn(&CPoint<T>) -> T + Send + Sync + 'static) -> Self {
        self.local_scale = Some(Arc::new(scale));
        self
    }

    /// Step used at `p`.
    pub fn step_at(&self, p: &CPoint<T>) -> T {
        match &self.local_scale {
            Some(scale) => {
                let s = scale(p);
                if s > T::zero() && s < T::one() {
                    self.step * s
                } else {
                    self.step
                }
            }
            None => self.step,
        }
    }
}

/// A point together with its Levi matrix and smallest eigenvalue.
#[derive(Debug, Clone)]
pub struct HermitianSample<T> {
    pub point: CPoint<T>,
    pub matrix: HermitianMatrix<T>,
    pub min_eig: T,
    pub step: T,
}

fn eval_checked<T: Scalar, F: Fn(&CPoint<T>) -> T>(f: &F, p: &CPoint<T>) -> Result<T, CalculusError> {
    let v = f(p);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CalculusError::Stencil { point: p.to_pairs(), value: v.as_f64() })
    }
}

const FOURTH_WEIGHTS: [(i32, f64); 4] = [(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)];

/// Symmetric real Hessian of `f` at `p`, row-major `2n x 2n`.
pub fn real_hessian<T, F>(f: &F, p: &CPoint<T>, stencil: &Stencil<T>) -> Result<Vec<T>, CalculusError>
where
    T: Scalar,
    F: Fn(&CPoint<T>) -> T,
{
    let m = 2 * p.dim();
    let h = stencil.step_at(p);
    let h2 = h * h;
    let f0 = eval_checked(f, p)?;
    let at = |moves: &[(usize, i32)]| -> Result<T, CalculusError> {
        let mut q = p.clone();
        for &(axis, k) in moves {
            q.shift_in_place(axis, h * T::lit(f64::from(k)));
        }
        eval_checked(f, &q)
    };
    let mut r = vec![T::zero(); m * m];
    for a in 0..m {
        r[a * m + a] = match stencil.order {
            FdOrder::Second => (at(&[(a, 1)])? - f0 - f0 + at(&[(a, -1)])?) / h2,
            FdOrder::Fourth => {
                let s = -at(&[(a, 2)])? + T::lit(16.0) * at(&[(a, 1)])? - T::lit(30.0) * f0
                    + T::lit(16.0) * at(&[(a, -1)])?
                    - at(&[(a, -2)])?;
                s / (T::lit(12.0) * h2)
            }
        };
        for b in (a + 1)..m {
            let v = match stencil.order {
                FdOrder::Second => {
                    (at(&[(a, 1), (b, 1)])? - at(&[(a, 1), (b, -1)])? - at(&[(a, -1), (b, 1)])?
                        + at(&[(a, -1), (b, -1)])?)
                        / (T::lit(4.0) * h2)
                }
                FdOrder::Fourth => {
                    let mut s = T::zero();
                    for (i, ci) in FOURTH_WEIGHTS {
                        for (k, ck) in FOURTH_WEIGHTS {
                            s = s + T::lit(ci * ck) * at(&[(a, i), (b, k)])?;
                        }
                    }
                    s / h2
                }
            };
            r[a * m + b] = v;
            r[b * m + a] = v;
        }
    }
    Ok(r)
}

/// Complex Hessian `(d^2 f / dz_j dzbar_k)` from a real Hessian.
pub fn complex_hessian_from_real<T: Scalar>(r: &[T], n: usize) -> HermitianMatrix<T> {
    let m = 2 * n;
    let q = T::lit(0.25);
    let mut h = HermitianMatrix::zeros(n);
    for j in 0..n {
        for k in 0..n {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            let re = r[xj * m + xk] + r[yj * m + yk];
            let im = r[xj * m + yk] - r[yj * m + xk];
            h.set(j, k, Complex::new(re * q, im * q));
        }
    }
    h
}

/// Finite-difference Levi matrix of `f` at `p`.
pub fn wirtinger_hessian<T, F>(f: &F, p: &CPoint<T>, stencil: &Stencil<T>) -> Result<HermitianMatrix<T>, CalculusError>
where
    T: Scalar,
    F: Fn(&CPoint<T>) -> T,
{
    let r = real_hessian(f, p, stencil)?;
    Ok(complex_hessian_from_real(&r, p.dim()))
}

/// Levi matrix and its smallest eigenvalue at `p`.
pub fn levi_sample<T, F>(f: &F, p: &CPoint<T>, stencil: &Stencil<T>) -> Result<HermitianSample<T>, CalculusError>
where
    T: Scalar,
    F: Fn(&CPoint<T>) -> T,
{
    let matrix = wirtinger_hessian(f, p, stencil)?;
    let min_eig = hermitian_min_eig(&matrix)?;
    Ok(HermitianSample { point: p.clone(), matrix, min_eig, step: stencil.step_at(p) })
}

/// Sub-mean-value margin `mean_k f(z0 + r e^{2 pi i k/m}) - f(z0)` for `f` on `C`.
///
/// A pole at `z0` (`f(z0) = -inf`) passes vacuously with margin `+inf`.
pub fn circle_mean_test<T, F>(f: &F, z0: Complex<T>, radius: T, m: usize) -> Result<T, CalculusError>
where
    T: Scalar,
    F: Fn(Complex<T>) -> T,
{
    if m < 16 || !(radius > T::zero()) {
        return Err(CalculusError::InvalidArgument(format!(
            "circle test needs m >= 16 and radius > 0 (m = {m}, radius = {radius})"
        )));
    }
    let f0 = f(z0);
    if f0 == T::neg_infinity() {
        return Ok(T::infinity());
    }
    let mut acc = T::zero();
    for k in 0..m {
        let ang = T::lit(std::f64::consts::TAU * k as f64 / m as f64);
        acc = acc + f(z0 + Complex::new(ang.cos(), ang.sin()) * radius);
    }
    Ok(acc / T::lit(m as f64) - f0)
}

/// `mean_k f(p + r e^{i 2 pi k/m} v) - f(p)` along the complex line through `p` in direction `v`.
///
/// Nonnegative for subharmonic restrictions (up to quadrature error).
pub fn circle_mean_excess<T, F>(
    f: &F,
    p: &CPoint<T>,
    direction: &[Complex<T>],
    radius: T,
    m: usize,
) -> Result<T, CalculusError>
where
    T: Scalar,
    F: Fn(&CPoint<T>) -> T,
{
    if direction.len() != p.dim() {
        return Err(CalculusError::DimensionMismatch { expected: p.dim(), found: direction.len() });
    }
    if m == 0 || !(radius > T::zero()) {
        return Err(CalculusError::InvalidArgument("circle test needs m > 0 and radius > 0".into()));
    }
    let center = p.coords();
    let f0 = f(p);
    let mut acc = T::zero();
    for k in 0..m {
        let ang = T::lit(std::f64::consts::TAU * k as f64 / m as f64);
        let e = Complex::new(ang.cos(), ang.sin()) * radius;
        let coords: Vec<_> = center.iter().zip(direction).map(|(c, v)| *c + e * *v).collect();
        let q = CPoint::from_coords(&coords).map_err(|e| CalculusError::InvalidArgument(e.to_string()))?;
        acc = acc + f(&q);
    }
    Ok(acc / T::lit(m as f64) - f0)
}

/// Certifies `min_eig(Levi f) >= floor - tolerance` on every point.
///
/// Margins are `min_eig - floor`; stencil failures count as `-inf`. The
/// certificate records the observed floor under the metric `min_eig`.
pub fn certify_psh<F>(
    name: &str,
    f: &F,
    points: &[CPoint<f64>],
    stencil: &Stencil<f64>,
    floor: f64,
    tolerance: f64,
) -> Certificate
where
    F: Fn(&CPoint<f64>) -> f64 + Sync,
{
    let rows: Vec<(f64, Vec<(f64, f64)>)> = points
        .par_iter()
        .map(|p| {
            let eig = levi_sample(f, p, stencil).map(|s| s.min_eig).unwrap_or(f64::NEG_INFINITY);
            (eig - floor, p.to_pairs())
        })
        .collect();
    let observed = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min) + floor;
    Certificate::from_margins(name, tolerance, rows).with_metric("min_eig", observed).with_metric("floor", floor)
}

/// [`certify_psh`] on points drawn from `region`.
pub fn certify_psh_in<F>(
    name: &str,
    f: &F,
    region: &crate::Region,
    sampler: &crate::geometry::Sampler,
    stencil: &Stencil<f64>,
    floor: f64,
    tolerance: f64,
) -> Result<Certificate, crate::geometry::GeometryError>
where
    F: Fn(&CPoint<f64>) -> f64 + Sync,
{
    let points = crate::geometry::sample_points(region, sampler)?;
    Ok(certify_psh(name, f, &points, stencil, floor, tolerance))
}
