//! The concrete domains, cutoffs and witness functions, with property checks.
//!
//! Each scenario is immutable once built. Property checks return
//! [`Certificate`](crate::Certificate)s and are deterministic in the seed.

mod cutoff;
mod example1;
mod lemma21;
mod lemma3;
mod thm1;
mod thm2;

pub use cutoff::{chi, exp_bump, Smoothstep, CHI, LAMBDA_STEP};
pub use example1::{example1_check, example1_psi, EXAMPLE1_LEVEL, EXAMPLE1_POLE_EXCLUSION};
pub use lemma21::{laplacian_fd, lemma21_discs, lemma21_eps, lemma21_log_rho, perturbation, Lemma21U, ANNULUS_SAMPLES};
pub use lemma3::{lambda, lambda_d1, lambda_d2, Lemma3Form, LAMBDA_GRID, LEMMA3_SAMPLES};
pub use thm1::Thm1Scenario;
pub use thm2::{Thm2Scenario, LOG10_WEIGHT, THETA_RADIUS};

use crate::calculus::CalculusError;
use crate::geometry::GeometryError;
use crate::logpoles::LogpolesError;

#[derive(Debug, thiserror::Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Logpoles(#[from] LogpolesError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("construction failed: {0}")]
    Failed(String),
}

/// Sampling and tolerance parameters shared by all property checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    pub seed: u64,
    /// Samples per certificate.
    pub samples: usize,
    pub tol: f64,
    pub fd_step: f64,
    /// Truncation order of the pole series.
    pub trunc: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { seed: 42, samples: 10_000, tol: 1e-6, fd_step: 1e-4, trunc: 60 }
    }
}

impl CheckConfig {
    pub(crate) fn sampler(&self, label: &str, count: usize) -> crate::geometry::Sampler {
        crate::geometry::Sampler::uniform(self.seed, count).stream(label)
    }

    pub(crate) fn rng(&self, label: &str) -> rand_chacha::ChaCha8Rng {
        crate::geometry::seeded_rng(self.seed, crate::geometry::fnv1a(label.as_bytes()))
    }

    pub(crate) fn stencil(&self) -> Result<crate::Stencil, ConstructionError> {
        Ok(crate::Stencil::new(self.fd_step)?)
    }
}

pub(crate) fn zero_w(n: usize) -> Vec<num_complex::Complex64> {
    vec![num_complex::Complex64::new(0.0, 0.0); n - 1]
}

pub(crate) fn check_dim(n: usize) -> Result<(), ConstructionError> {
    if !(2..=crate::calculus::MAX_DIM).contains(&n) {
        return Err(ConstructionError::InvalidArgument(format!(
            "dimension n = {n} outside 2..={}",
            crate::calculus::MAX_DIM
        )));
    }
    Ok(())
}
