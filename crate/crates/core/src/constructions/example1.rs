use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{check_dim, zero_w, CheckConfig, ConstructionError};
use crate::calculus::levi_sample;
use crate::geometry::{sample_points, Comparator, Coordinate, Region};
use crate::{Certificate, Point, Stencil};

pub const EXAMPLE1_LEVEL: f64 = 2.0;
/// Sampled points keep `|w| >= 10^-3`.
pub const EXAMPLE1_POLE_EXCLUSION: f64 = 1e-3;
/// Allowed distance of the Levi floor from 1.
const FLOOR_WINDOW: f64 = 1e-3;

/// `log|w| + |z|^2 + |w|^2 - level`.
pub fn example1_psi(c: &[Complex64], level: f64) -> f64 {
    let w2: f64 = c[1..].iter().map(|x| x.norm_sqr()).sum();
    0.5 * w2.ln() + c[0].norm_sqr() + w2 - level
}

/// Levi form of `psi` on pole-excluded points of `{psi < 0}`. Each margin is
/// `10^-3 - |min_eig - 1|`: the floor is 1 from the `|z|^2 + |w|^2` part and
/// the log term adds nothing in the `z` direction.
pub fn example1_check(level: f64, n: usize, cfg: &CheckConfig) -> Result<Certificate, ConstructionError> {
    const NAME: &str = "example1.levi_floor";
    check_dim(n)?;
    if !level.is_finite() {
        return Err(ConstructionError::InvalidArgument(format!("level {level} not finite")));
    }
    // On the sublevel set |w|^2 + log|w| < level and |z|^2 < level - log(10^-3).
    let wr = level.max(0.0).sqrt() + 1.0;
    let z2 = level - EXAMPLE1_POLE_EXCLUSION.ln();
    if z2 <= 0.0 {
        return Ok(Certificate::failed(NAME, FLOOR_WINDOW, "pole-excluded sublevel set is empty"));
    }
    let envelope = Region::product(
        Region::closed_disk(Complex64::new(0.0, 0.0), z2.sqrt() + 0.1)?,
        Region::closed_ball(zero_w(n), wr)?,
    )?;
    let region = Region::intersection(vec![
        Region::sublevel("example1", Arc::new(move |c: &[Complex64]| example1_psi(c, level)), 0.0, envelope),
        Region::modulus_halfspace(Coordinate::W, Comparator::Ge, EXAMPLE1_POLE_EXCLUSION),
    ])?;
    let points = sample_points(&region, &cfg.sampler("example1", cfg.samples))?;

    // Fourth order with the step shrinking towards the pole at w = 0.
    let h = cfg.fd_step;
    let stencil = Stencil::new(h)?.fourth_order().with_local_scale(|p: &Point| (40.0 * p.w_norm()).min(1.0));
    let f = |p: &Point| example1_psi(&p.coords(), level);
    let rows: Vec<_> = points
        .par_iter()
        .map(|p| {
            let m = levi_sample(&f, p, &stencil).map(|s| s.min_eig).unwrap_or(f64::NAN);
            (m, p.to_pairs())
        })
        .collect();
    let min_eig = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let max_eig = rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(Certificate::from_margins(NAME, 0.0, rows.into_iter().map(|(m, w)| (FLOOR_WINDOW - (m - 1.0).abs(), w)))
        .with_metric("min_eig", min_eig)
        .with_metric("max_min_eig", max_eig)
        .with_metric("level", level))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_term_is_harmonic_in_one_variable() {
        let f = |p: &Point| example1_psi(&p.coords(), 0.0) - p.norm_sqr();
        let p = Point::new(Complex64::new(0.2, 0.1), vec![Complex64::new(0.4, -0.3)]).unwrap();
        let s = levi_sample(&f, &p, &Stencil::new(1e-4).unwrap().fourth_order()).unwrap();
        assert!(s.matrix.row_norm() < 1e-6);
    }

    #[test]
    fn psi_values() {
        let c = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert_eq!(example1_psi(&c, 2.0), 0.0);
        assert_eq!(example1_psi(&[Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)], 2.0), f64::NEG_INFINITY);
    }

    #[test]
    fn floor_is_one() {
        let cfg = CheckConfig { samples: 2000, ..CheckConfig::default() };
        for n in [2, 3] {
            let c = example1_check(EXAMPLE1_LEVEL, n, &cfg).unwrap();
            assert!(c.passed(), "n={n} {c:?}");
            assert!((c.metric("min_eig").unwrap() - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn empty_sublevel_fails() {
        let c = example1_check(-10.0, 2, &CheckConfig::default()).unwrap();
        assert!(!c.passed());
    }
}
