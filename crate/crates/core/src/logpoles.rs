//! Pole schedules and the logarithmic potential `sigma(z) = sum_j delta_j log|z - a_j|`.
//!
//! Poles sit at `a_j = (1 + 1/j) e^{i theta_j}` just outside the closed unit
//! disc. Every truncated evaluation carries a bound on the discarded tail.
//!
//! The radii `rho_j` of the discs where the cutoff potential is constant are
//! far below the smallest positive `f64` (`rho_1 ~ e^{-30000}`), so they are
//! stored and consumed as `log rho_j`. Points at such distances from a pole are
//! addressed in a local chart `z = a_j + e^{s} e^{i alpha}`.

use std::f64::consts::LN_2;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::geometry::{theta_seq, GeometryError};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum LogpolesError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("schedule invariant violated: {0}")]
    Invariant(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl From<GeometryError> for LogpolesError {
    fn from(e: GeometryError) -> Self {
        LogpolesError::InvalidArgument(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Thm1,
    Thm2,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Thm1 => "thm1",
            Variant::Thm2 => "thm2",
        }
    }

    /// `kappa` with `delta_j <= kappa 2^{-j} / log(3j + 3)`.
    pub fn kappa(self) -> f64 {
        match self {
            Variant::Thm1 => 0.5,
            Variant::Thm2 => 1.0 / 16.0,
        }
    }
}

/// A value with a bound on the series truncation error (rounding not included).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedValue {
    pub value: f64,
    pub error_radius: f64,
}

impl CertifiedValue {
    pub fn exact(value: f64) -> Self {
        Self { value, error_radius: 0.0 }
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error_radius
    }

    pub fn lower(&self) -> f64 {
        self.value - self.error_radius
    }

    /// True at a pole (the `-inf` sentinel).
    pub fn is_pole(&self) -> bool {
        self.value == f64::NEG_INFINITY
    }
}

/// `a_j = (1 + 1/j) e^{i theta_j}`.
pub fn pole(j: usize) -> Result<Complex64, LogpolesError> {
    let theta = theta_seq(j as i64)?;
    Ok(Complex64::from_polar(1.0 + 1.0 / j as f64, theta))
}

/// `r_j = 1 / (4 j (j + 1))`.
pub fn disc_radius(j: usize) -> f64 {
    let j = j as f64;
    1.0 / (4.0 * j * (j + 1.0))
}

/// Output of the local-disc construction consumed by the second schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscData {
    /// `eps_j` for `j = 1..=J_max`.
    pub eps: Vec<f64>,
    /// `log rho_j` for `j = 1..=J_max`.
    pub log_rho: Vec<f64>,
}

/// Poles, weights and disc data up to `J_max`. Index `j` is 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSchedule {
    variant: Variant,
    j_max: usize,
    theta: Vec<f64>,
    a: Vec<Complex64>,
    delta: Vec<f64>,
    r: Vec<f64>,
    discs: Option<DiscData>,
}

/// Builds a schedule; the second variant needs the disc data.
pub fn make_schedule(variant: Variant, j_max: usize, discs: Option<DiscData>) -> Result<PoleSchedule, LogpolesError> {
    if j_max == 0 {
        return Err(LogpolesError::InvalidArgument("J_max must be >= 1".into()));
    }
    let mut theta = Vec::with_capacity(j_max);
    let mut a = Vec::with_capacity(j_max);
    let mut r = Vec::with_capacity(j_max);
    for j in 1..=j_max {
        let t = theta_seq(j as i64)?;
        theta.push(t);
        a.push(Complex64::from_polar(1.0 + 1.0 / j as f64, t));
        r.push(disc_radius(j));
    }
    let delta = match variant {
        Variant::Thm1 => (1..=j_max).map(|j| (-(j as f64 + 1.0) * LN_2).exp() / (3.0 * j as f64 + 3.0).ln()).collect(),
        Variant::Thm2 => {
            let d = discs
                .as_ref()
                .ok_or_else(|| LogpolesError::InvalidArgument("the thm2 schedule needs rho input".into()))?;
            if d.eps.len() < j_max || d.log_rho.len() < j_max {
                return Err(LogpolesError::InvalidArgument(format!(
                    "rho input covers {} indices, need {j_max}",
                    d.log_rho.len().min(d.eps.len())
                )));
            }
            let mut out = Vec::with_capacity(j_max);
            for j in 1..=j_max {
                let (eps, lr) = (d.eps[j - 1], d.log_rho[j - 1]);
                if !(eps > 0.0) || !lr.is_finite() {
                    return Err(LogpolesError::Invariant(format!(
                        "rho_{j} must be positive (eps = {eps}, log rho = {lr})"
                    )));
                }
                if lr > (r[j - 1] / 4.0).ln() {
                    return Err(LogpolesError::Invariant(format!("rho_{j} exceeds r_{j}/4")));
                }
                let scale = (3.0 * j as f64 + 3.0).ln().max(lr.abs());
                out.push((-(j as f64 + 4.0) * LN_2).exp() / scale);
            }
            out
        }
    };
    let discs = match variant {
        Variant::Thm1 => None,
        Variant::Thm2 => discs.map(|d| DiscData { eps: d.eps[..j_max].to_vec(), log_rho: d.log_rho[..j_max].to_vec() }),
    };
    Ok(PoleSchedule { variant, j_max, theta, a, delta, r, discs })
}

impl PoleSchedule {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn theta(&self, j: usize) -> f64 {
        self.theta[j - 1]
    }

    pub fn a(&self, j: usize) -> Complex64 {
        self.a[j - 1]
    }

    pub fn delta(&self, j: usize) -> f64 {
        self.delta[j - 1]
    }

    pub fn r(&self, j: usize) -> f64 {
        self.r[j - 1]
    }

    pub fn eps(&self, j: usize) -> Option<f64> {
        self.discs.as_ref().map(|d| d.eps[j - 1])
    }

    pub fn log_rho(&self, j: usize) -> Option<f64> {
        self.discs.as_ref().map(|d| d.log_rho[j - 1])
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.a
    }

    fn check_trunc(&self, trunc: usize) -> Result<(), LogpolesError> {
        if trunc == 0 || trunc > self.j_max {
            return Err(LogpolesError::InvalidArgument(format!("truncation {trunc} outside 1..={}", self.j_max)));
        }
        Ok(())
    }

    /// Bound on `sum_{j > trunc} delta_j |log|z - a_j||`.
    pub fn tail_bound(&self, z: Complex64, trunc: usize) -> f64 {
        let kappa = self.variant.kappa();
        let geometric = kappa * (-(trunc as f64) * LN_2).exp();
        let m = z.norm();
        if m <= 1.0 {
            // 1/j <= |z - a_j| <= 3, and both logs are below log(3j + 3).
            return geometric;
        }
        let d = m - 1.0 - 1.0 / (trunc as f64 + 1.0);
        if d <= 0.0 {
            return f64::INFINITY;
        }
        let worst = (m + 2.0).ln().max(-d.ln()).max(0.0);
        geometric * worst / (3.0 * trunc as f64 + 6.0).ln()
    }

    /// `sigma_J(z)` with its tail bound. Exact poles give the `-inf` sentinel.
    pub fn sigma_eval(&self, z: Complex64, trunc: usize) -> Result<CertifiedValue, LogpolesError> {
        self.check_trunc(trunc)?;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(LogpolesError::InvalidArgument("z must be finite".into()));
        }
        Ok(CertifiedValue { value: self.sigma_value(z, trunc), error_radius: self.tail_bound(z, trunc) })
    }

    /// Truncated sum only.
    pub fn sigma_value(&self, z: Complex64, trunc: usize) -> f64 {
        let trunc = trunc.min(self.j_max);
        let mut acc = 0.0;
        for (d, a) in self.delta[..trunc].iter().zip(&self.a[..trunc]) {
            let dist = (z - a).norm();
            if dist == 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += d * dist.ln();
        }
        acc
    }

    /// `sigma_J` at `a_j + e^{log_dist} e^{i alpha}`, with term `j` taken as `delta_j log_dist`.
    pub fn sigma_near_pole(
        &self,
        j: usize,
        log_dist: f64,
        alpha: f64,
        trunc: usize,
    ) -> Result<CertifiedValue, LogpolesError> {
        self.check_trunc(trunc)?;
        if j == 0 || j > self.j_max {
            return Err(LogpolesError::InvalidArgument(format!("pole index {j} out of range")));
        }
        let z = self.a(j) + Complex64::from_polar(log_dist.exp(), alpha);
        let mut acc = 0.0;
        for k in 1..=trunc {
            acc += if k == j { self.delta(k) * log_dist } else { self.delta(k) * (z - self.a(k)).norm().ln() };
        }
        Ok(CertifiedValue { value: acc, error_radius: self.tail_bound(z, trunc) })
    }

    /// Index of the disc `D(a_j, r_j)` containing `z`, if any (discs are disjoint).
    pub fn disc_index(&self, z: Complex64) -> Option<usize> {
        let m = z.norm();
        if m <= 1.0 || m >= 2.0 + self.r[0] {
            return None;
        }
        (1..=self.j_max).find(|&j| (z - self.a(j)).norm() < self.r(j))
    }

    fn require_discs(&self) -> Result<&DiscData, LogpolesError> {
        self.discs.as_ref().ok_or_else(|| LogpolesError::InvalidArgument("schedule carries no disc data".into()))
    }

    /// Lower bound for `sigma(z)` at a point outside every `D(a_j, rho_j)`.
    ///
    /// Sums all `J_max` terms and subtracts `2^{-J_max-4}`, which dominates the
    /// tail because `delta_j |log rho_j| <= 2^{-j-4}`. Returned as an exact value.
    pub fn sigma_lower_bound_off_discs(&self, z: Complex64) -> Result<CertifiedValue, LogpolesError> {
        let d = self.require_discs()?;
        for j in 1..=self.j_max {
            if (z - self.a(j)).norm().ln() < d.log_rho[j - 1] {
                return Err(LogpolesError::Precondition(format!("z lies inside D_{j}")));
            }
        }
        let v = self.sigma_value(z, self.j_max) - self.off_disc_tail();
        Ok(CertifiedValue::exact(v))
    }

    /// [`Self::sigma_lower_bound_off_discs`] at `a_j + e^{log_dist} e^{i alpha}`.
    pub fn sigma_lower_bound_near_pole(
        &self,
        j: usize,
        log_dist: f64,
        alpha: f64,
    ) -> Result<CertifiedValue, LogpolesError> {
        let d = self.require_discs()?;
        if j == 0 || j > self.j_max {
            return Err(LogpolesError::InvalidArgument(format!("pole index {j} out of range")));
        }
        if log_dist < d.log_rho[j - 1] {
            return Err(LogpolesError::Precondition(format!("z lies inside D_{j}")));
        }
        let z = self.a(j) + Complex64::from_polar(log_dist.exp(), alpha);
        for k in (1..=self.j_max).filter(|&k| k != j) {
            if (z - self.a(k)).norm().ln() < d.log_rho[k - 1] {
                return Err(LogpolesError::Precondition(format!("z lies inside D_{k}")));
            }
        }
        let v = self.sigma_near_pole(j, log_dist, alpha, self.j_max)?.value - self.off_disc_tail();
        Ok(CertifiedValue::exact(v))
    }

    fn off_disc_tail(&self) -> f64 {
        (-(self.j_max as f64 + 4.0) * LN_2).exp()
    }

    /// Pairwise check `r_j + r_k <= |a_j - a_k| / 2` and `|a_j| - r_j > 1`.
    pub fn check_disjoint(&self) -> Result<(), LogpolesError> {
        for j in 1..=self.j_max {
            if self.a(j).norm() - self.r(j) <= 1.0 {
                return Err(LogpolesError::Invariant(format!("disc {j} meets the closed unit disc")));
            }
            for k in 1..j {
                if self.r(j) + self.r(k) > 0.5 * (self.a(j) - self.a(k)).norm() {
                    return Err(LogpolesError::Invariant(format!("discs {k} and {j} are too close")));
                }
            }
        }
        Ok(())
    }

    /// Weighted sum bounding `sup |sigma|` on the closed unit disc, tail included:
    /// `sum delta_j log(3j)` (first variant) or `sum delta_j max(log 3j, |log rho_j|)` (second).
    pub fn weighted_sum(&self) -> f64 {
        let head: f64 = (1..=self.j_max)
            .map(|j| {
                let l = (3.0 * j as f64).ln();
                let w = match &self.discs {
                    Some(d) => l.max(d.log_rho[j - 1].abs()),
                    None => l,
                };
                self.delta(j) * w
            })
            .sum();
        head + self.variant.kappa() * (-(self.j_max as f64) * LN_2).exp()
    }

    /// Checks the summability bound (`<= 1/2` or `<= 1/8`) and disc disjointness.
    pub fn check_invariants(&self) -> Result<(), LogpolesError> {
        self.check_disjoint()?;
        let limit = match self.variant {
            Variant::Thm1 => 0.5,
            Variant::Thm2 => 0.125,
        };
        let s = self.weighted_sum();
        if s > limit {
            return Err(LogpolesError::Invariant(format!("weighted sum {s} exceeds {limit}")));
        }
        Ok(())
    }

    /// Plain-text export: one line per index with full-precision constants.
    pub fn export(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "variant {}", self.variant.as_str());
        let _ = writeln!(out, "j_max {}", self.j_max);
        let _ = writeln!(out, "# j theta delta r eps log_rho");
        for j in 1..=self.j_max {
            let eps = self.eps(j).unwrap_or(f64::NAN);
            let lr = self.log_rho(j).unwrap_or(f64::NAN);
            let _ = writeln!(
                out,
                "{j} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e}",
                self.theta(j),
                self.delta(j),
                self.r(j),
                eps,
                lr
            );
        }
        out
    }
}
