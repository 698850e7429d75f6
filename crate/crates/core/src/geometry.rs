//! Points of `C^n = C x C^{n-1}`, sampleable regions and deterministic samplers.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::Scalar;

/// Fractional part of the golden ratio.
pub const GOLDEN_CONJUGATE: f64 = 0.6180339887498949;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("region `{0}` produced no admissible samples")]
    EmptyRegion(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A point `(z, w)` of `C x C^{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoint<T> {
    pub z: Complex<T>,
    pub w: Vec<Complex<T>>,
}

impl<T: Scalar> CPoint<T> {
    pub fn new(z: Complex<T>, w: Vec<Complex<T>>) -> Result<Self, GeometryError> {
        if w.is_empty() {
            return Err(GeometryError::InvalidArgument("ambient dimension must be at least 2".into()));
        }
        Ok(Self { z, w })
    }

    pub fn origin(n: usize) -> Result<Self, GeometryError> {
        if n < 2 {
            return Err(GeometryError::InvalidArgument(format!("ambient dimension {n} < 2")));
        }
        Ok(Self { z: Complex::new(T::zero(), T::zero()), w: vec![Complex::new(T::zero(), T::zero()); n - 1] })
    }

    pub fn from_coords(coords: &[Complex<T>]) -> Result<Self, GeometryError> {
        match coords.split_first() {
            Some((z, w)) if !w.is_empty() => Ok(Self { z: *z, w: w.to_vec() }),
            _ => Err(GeometryError::InvalidArgument(format!("need at least 2 coordinates, got {}", coords.len()))),
        }
    }

    /// Ambient complex dimension `n`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.w.len() + 1
    }

    #[inline]
    pub fn coord(&self, k: usize) -> Complex<T> {
        if k == 0 {
            self.z
        } else {
            self.w[k - 1]
        }
    }

    pub fn coords(&self) -> Vec<Complex<T>> {
        std::iter::once(self.z).chain(self.w.iter().copied()).collect()
    }

    #[inline]
    pub fn w_norm_sqr(&self) -> T {
        self.w.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    #[inline]
    pub fn w_norm(&self) -> T {
        self.w_norm_sqr().sqrt()
    }

    #[inline]
    pub fn norm_sqr(&self) -> T {
        self.z.norm_sqr() + self.w_norm_sqr()
    }

    /// Moves the point along real axis `axis` (`2k` is `Re`, `2k+1` is `Im` of coordinate `k`).
    pub fn shifted(&self, axis: usize, delta: T) -> Self {
        let mut p = self.clone();
        p.shift_in_place(axis, delta);
        p
    }

    pub(crate) fn shift_in_place(&mut self, axis: usize, delta: T) {
        let c = if axis / 2 == 0 { &mut self.z } else { &mut self.w[axis / 2 - 1] };
        if axis % 2 == 0 {
            c.re = c.re + delta;
        } else {
            c.im = c.im + delta;
        }
    }

    /// `self + t (other - self)`; exact at `t = 0` and wherever the coordinates agree.
    pub fn lerp(&self, other: &Self, t: T) -> Self {
        let mix = |a: Complex<T>, b: Complex<T>| a + (b - a) * t;
        Self { z: mix(self.z, other.z), w: self.w.iter().zip(&other.w).map(|(a, b)| mix(*a, *b)).collect() }
    }

    pub fn to_pairs(&self) -> Vec<(f64, f64)> {
        std::iter::once(&self.z).chain(self.w.iter()).map(|c| (c.re.as_f64(), c.im.as_f64())).collect()
    }
}

/// Which block of coordinates a modulus constraint refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    /// `|z|`, the first coordinate.
    Z,
    /// `|w|`, Euclidean norm of the remaining coordinates.
    W,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Comparator {
    fn holds<T: PartialOrd>(self, lhs: T, rhs: T) -> bool {
        match self {
            Comparator::Lt => lhs < rhs,
            Comparator::Le => lhs <= rhs,
            Comparator::Gt => lhs > rhs,
            Comparator::Ge => lhs >= rhs,
        }
    }
}

/// Defining function of a sublevel region, evaluated on the full coordinate vector.
pub type DefiningFn<T> = Arc<dyn Fn(&[Complex<T>]) -> T + Send + Sync>;

#[derive(Clone)]
pub enum RegionKind<T> {
    Disk {
        center: Complex<T>,
        radius: T,
        closed: bool,
    },
    Ball {
        center: Vec<Complex<T>>,
        radius: T,
        closed: bool,
    },
    /// Open annulus `inner < |p - center| < outer`.
    Annulus {
        center: Complex<T>,
        inner: T,
        outer: T,
    },
    Product(Box<Region<T>>, Box<Region<T>>),
    /// `{defining < level}` restricted to a bounded envelope used for proposals.
    Sublevel {
        id: String,
        defining: DefiningFn<T>,
        level: T,
        envelope: Box<Region<T>>,
    },
    ModulusHalfspace {
        coordinate: Coordinate,
        comparator: Comparator,
        bound: T,
    },
    Intersection(Vec<Region<T>>),
}

impl<T: fmt::Debug> fmt::Debug for RegionKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionKind::Disk { center, radius, closed } => {
                f.debug_struct("Disk").field("center", center).field("radius", radius).field("closed", closed).finish()
            }
            RegionKind::Ball { center, radius, closed } => {
                f.debug_struct("Ball").field("center", center).field("radius", radius).field("closed", closed).finish()
            }
            RegionKind::Annulus { center, inner, outer } => {
                f.debug_struct("Annulus").field("center", center).field("inner", inner).field("outer", outer).finish()
            }
            RegionKind::Product(a, b) => f.debug_tuple("Product").field(a).field(b).finish(),
            RegionKind::Sublevel { id, level, envelope, .. } => {
                f.debug_struct("Sublevel").field("id", id).field("level", level).field("envelope", envelope).finish()
            }
            RegionKind::ModulusHalfspace { coordinate, comparator, bound } => f
                .debug_struct("ModulusHalfspace")
                .field("coordinate", coordinate)
                .field("comparator", comparator)
                .field("bound", bound)
                .finish(),
            RegionKind::Intersection(parts) => f.debug_tuple("Intersection").field(parts).finish(),
        }
    }
}

/// A named subset of `C^k` with a deterministic membership predicate.
#[derive(Debug, Clone)]
pub struct Region<T> {
    pub label: String,
    pub kind: RegionKind<T>,
}

fn positive<T: Scalar>(what: &str, r: T) -> Result<(), GeometryError> {
    if r > T::zero() && r.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::InvalidArgument(format!("{what} must be positive and finite, got {r}")))
    }
}

impl<T: Scalar> Region<T> {
    /// Open disk in `C`.
    pub fn disk(center: Complex<T>, radius: T) -> Result<Self, GeometryError> {
        positive("disk radius", radius)?;
        Ok(Self {
            label: format!("disk({},{})", center, radius),
            kind: RegionKind::Disk { center, radius, closed: false },
        })
    }

    pub fn closed_disk(center: Complex<T>, radius: T) -> Result<Self, GeometryError> {
        positive("disk radius", radius)?;
        Ok(Self {
            label: format!("closed_disk({},{})", center, radius),
            kind: RegionKind::Disk { center, radius, closed: true },
        })
    }

    /// Open Euclidean ball in `C^k`, `k = center.len()`.
    pub fn ball(center: Vec<Complex<T>>, radius: T) -> Result<Self, GeometryError> {
        Self::ball_impl(center, radius, false)
    }

    pub fn closed_ball(center: Vec<Complex<T>>, radius: T) -> Result<Self, GeometryError> {
        Self::ball_impl(center, radius, true)
    }

    fn ball_impl(center: Vec<Complex<T>>, radius: T, closed: bool) -> Result<Self, GeometryError> {
        positive("ball radius", radius)?;
        if center.is_empty() {
            return Err(GeometryError::InvalidArgument("ball of dimension 0".into()));
        }
        Ok(Self {
            label: format!("{}ball(dim={},{})", if closed { "closed_" } else { "" }, center.len(), radius),
            kind: RegionKind::Ball { center, radius, closed },
        })
    }

    pub fn annulus(center: Complex<T>, inner: T, outer: T) -> Result<Self, GeometryError> {
        positive("annulus outer radius", outer)?;
        if !(inner >= T::zero() && inner < outer) {
            return Err(GeometryError::InvalidArgument(format!(
                "annulus needs 0 <= inner < outer, got {inner}, {outer}"
            )));
        }
        Ok(Self {
            label: format!("annulus({},{},{})", center, inner, outer),
            kind: RegionKind::Annulus { center, inner, outer },
        })
    }

    pub fn product(first: Region<T>, second: Region<T>) -> Result<Self, GeometryError> {
        if first.dim().is_none() || second.dim().is_none() {
            return Err(GeometryError::InvalidArgument("product factors need a fixed dimension".into()));
        }
        Ok(Self {
            label: format!("{}x{}", first.label, second.label),
            kind: RegionKind::Product(Box::new(first), Box::new(second)),
        })
    }

    pub fn sublevel(id: impl Into<String>, defining: DefiningFn<T>, level: T, envelope: Region<T>) -> Self {
        let id = id.into();
        Self {
            label: format!("{{{id}<{level}}}"),
            kind: RegionKind::Sublevel { id, defining, level, envelope: Box::new(envelope) },
        }
    }

    pub fn modulus_halfspace(coordinate: Coordinate, comparator: Comparator, bound: T) -> Self {
        Self {
            label: format!("{{|{:?}| {:?} {}}}", coordinate, comparator, bound),
            kind: RegionKind::ModulusHalfspace { coordinate, comparator, bound },
        }
    }

    pub fn intersection(parts: Vec<Region<T>>) -> Result<Self, GeometryError> {
        if parts.is_empty() {
            return Err(GeometryError::InvalidArgument("empty intersection".into()));
        }
        let label = parts.iter().map(|r| r.label.as_str()).collect::<Vec<_>>().join("&");
        Ok(Self { label, kind: RegionKind::Intersection(parts) })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Complex dimension, or `None` for constraints that adapt to any dimension.
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            RegionKind::Disk { .. } | RegionKind::Annulus { .. } => Some(1),
            RegionKind::Ball { center, .. } => Some(center.len()),
            RegionKind::Product(a, b) => Some(a.dim()? + b.dim()?),
            RegionKind::Sublevel { envelope, .. } => envelope.dim(),
            RegionKind::ModulusHalfspace { .. } => None,
            RegionKind::Intersection(parts) => parts.iter().find_map(|r| r.dim()),
        }
    }

    pub fn contains(&self, coords: &[Complex<T>]) -> bool {
        match &self.kind {
            RegionKind::Disk { center, radius, closed } => {
                if coords.len() != 1 {
                    return false;
                }
                let d = (coords[0] - center).norm();
                if *closed {
                    d <= *radius
                } else {
                    d < *radius
                }
            }
            RegionKind::Ball { center, radius, closed } => {
                if coords.len() != center.len() {
                    return false;
                }
                let d2 = coords.iter().zip(center).fold(T::zero(), |acc, (p, c)| acc + (p - c).norm_sqr());
                let r2 = *radius * *radius;
                if *closed {
                    d2 <= r2
                } else {
                    d2 < r2
                }
            }
            RegionKind::Annulus { center, inner, outer } => {
                coords.len() == 1 && {
                    let d = (coords[0] - center).norm();
                    *inner < d && d < *outer
                }
            }
            RegionKind::Product(a, b) => {
                let k = a.dim().unwrap_or(0);
                coords.len() == k + b.dim().unwrap_or(0) && a.contains(&coords[..k]) && b.contains(&coords[k..])
            }
            RegionKind::Sublevel { defining, level, envelope, .. } => {
                // NaN compares false, so undefined points are never members.
                envelope.dim().is_none_or(|d| d == coords.len()) && defining(coords) < *level
            }
            RegionKind::ModulusHalfspace { coordinate, comparator, bound } => {
                let m = match coordinate {
                    Coordinate::Z => match coords.first() {
                        Some(c) => c.norm(),
                        None => return false,
                    },
                    Coordinate::W => coords.iter().skip(1).fold(T::zero(), |acc, c| acc + c.norm_sqr()).sqrt(),
                };
                comparator.holds(m, *bound)
            }
            RegionKind::Intersection(parts) => parts.iter().all(|r| r.contains(coords)),
        }
    }

    pub fn contains_point(&self, p: &CPoint<T>) -> bool {
        self.contains(&p.coords())
    }

    /// Axis-aligned box over real coordinates, `None` when unbounded.
    fn bounding_box(&self) -> Option<Vec<(T, T)>> {
        match &self.kind {
            RegionKind::Disk { center, radius, .. } => {
                Some(vec![(center.re - *radius, center.re + *radius), (center.im - *radius, center.im + *radius)])
            }
            RegionKind::Annulus { center, outer, .. } => {
                Some(vec![(center.re - *outer, center.re + *outer), (center.im - *outer, center.im + *outer)])
            }
            RegionKind::Ball { center, radius, .. } => Some(
                center
                    .iter()
                    .flat_map(|c| [(c.re - *radius, c.re + *radius), (c.im - *radius, c.im + *radius)])
                    .collect(),
            ),
            RegionKind::Product(a, b) => {
                let mut bx = a.bounding_box()?;
                bx.extend(b.bounding_box()?);
                Some(bx)
            }
            RegionKind::Sublevel { envelope, .. } => envelope.bounding_box(),
            RegionKind::ModulusHalfspace { .. } => None,
            RegionKind::Intersection(parts) => parts.iter().find_map(|r| r.bounding_box()),
        }
    }

    /// Draws a candidate from a bounded superset; the caller filters by `contains`.
    fn propose(&self, rng: &mut ChaCha8Rng) -> Option<Vec<Complex<T>>> {
        match &self.kind {
            RegionKind::Disk { center, radius, .. } => {
                let r = *radius * T::lit(rng.random::<f64>().sqrt());
                Some(vec![center + polar(r, rng.random::<f64>() * TAU)])
            }
            RegionKind::Annulus { center, inner, outer } => {
                let (a2, b2) = (inner.as_f64().powi(2), outer.as_f64().powi(2));
                let r = (a2 + rng.random::<f64>() * (b2 - a2)).sqrt();
                Some(vec![center + polar(T::lit(r), rng.random::<f64>() * TAU)])
            }
            RegionKind::Ball { center, radius, .. } => {
                let k = center.len();
                let g: Vec<f64> = (0..2 * k).map(|_| rng.sample(StandardNormal)).collect();
                let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                let scale = rng.random::<f64>().powf(1.0 / (2 * k) as f64) / norm;
                Some(
                    center
                        .iter()
                        .enumerate()
                        .map(|(i, c)| {
                            c + Complex::new(*radius * T::lit(g[2 * i] * scale), *radius * T::lit(g[2 * i + 1] * scale))
                        })
                        .collect(),
                )
            }
            RegionKind::Product(a, b) => {
                let mut p = a.propose(rng)?;
                p.extend(b.propose(rng)?);
                Some(p)
            }
            RegionKind::Sublevel { envelope, .. } => envelope.propose(rng),
            RegionKind::ModulusHalfspace { .. } => None,
            RegionKind::Intersection(parts) => {
                let bounded = parts.iter().find(|r| r.bounding_box().is_some())?;
                bounded.propose(rng)
            }
        }
    }
}

fn polar<T: Scalar>(r: T, angle: f64) -> Complex<T> {
    Complex::new(r * T::lit(angle.cos()), r * T::lit(angle.sin()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    UniformRandom,
    /// Kronecker sequence in the bounding box, filtered by membership.
    LowDiscrepancy,
    /// `m` equally spaced points on the boundary circle of a disk.
    BoundaryCircle {
        m: usize,
    },
}

/// Deterministic sampling recipe: identical inputs give bit-identical outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampler {
    pub seed: u64,
    pub count: usize,
    pub strategy: Strategy,
    pub stream: u64,
}

impl Sampler {
    pub fn uniform(seed: u64, count: usize) -> Self {
        Self { seed, count, strategy: Strategy::UniformRandom, stream: 0 }
    }

    pub fn low_discrepancy(seed: u64, count: usize) -> Self {
        Self { seed, count, strategy: Strategy::LowDiscrepancy, stream: 0 }
    }

    pub fn boundary_circle(m: usize) -> Self {
        Self { seed: 0, count: m, strategy: Strategy::BoundaryCircle { m }, stream: 0 }
    }

    /// Selects an independent random stream named by `label`.
    pub fn stream(mut self, label: &str) -> Self {
        self.stream = fnv1a(label.as_bytes());
        self
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        if let Strategy::BoundaryCircle { .. } = self.strategy {
            self.strategy = Strategy::BoundaryCircle { m: count };
        }
        self
    }

    pub fn rng(&self) -> ChaCha8Rng {
        seeded_rng(self.seed, self.stream)
    }
}

/// Counter-based generator for `(seed, stream)`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stable 64-bit FNV-1a hash; used to derive stream ids from labels.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(*b)).wrapping_mul(0x0000_0100_0000_01b3))
}

const MAX_ATTEMPTS_PER_SAMPLE: usize = 20_000;

/// Samples raw coordinate vectors of `region`.
pub fn sample<T: Scalar>(region: &Region<T>, sampler: &Sampler) -> Result<Vec<Vec<Complex<T>>>, GeometryError> {
    let mut rng = seeded_rng(sampler.seed, sampler.stream ^ fnv1a(region.label.as_bytes()));
    match sampler.strategy {
        Strategy::BoundaryCircle { m } => boundary_circle(region, m),
        Strategy::UniformRandom => {
            let budget = sampler.count.max(1).saturating_mul(MAX_ATTEMPTS_PER_SAMPLE);
            let mut out = Vec::with_capacity(sampler.count);
            let mut attempts = 0usize;
            while out.len() < sampler.count {
                let p = region
                    .propose(&mut rng)
                    .ok_or_else(|| GeometryError::InvalidArgument(format!("region `{}` is unbounded", region.label)))?;
                if region.contains(&p) {
                    out.push(p);
                }
                attempts += 1;
                if attempts > budget {
                    return Err(GeometryError::EmptyRegion(region.label.clone()));
                }
            }
            Ok(out)
        }
        Strategy::LowDiscrepancy => {
            let bx = region
                .bounding_box()
                .ok_or_else(|| GeometryError::InvalidArgument(format!("region `{}` is unbounded", region.label)))?;
            let d = bx.len();
            let alpha = kronecker_alpha(d);
            let shift: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let budget = sampler.count.max(1).saturating_mul(MAX_ATTEMPTS_PER_SAMPLE);
            let mut out = Vec::with_capacity(sampler.count);
            let mut k = 0usize;
            while out.len() < sampler.count {
                k += 1;
                if k > budget {
                    return Err(GeometryError::EmptyRegion(region.label.clone()));
                }
                let coords: Vec<Complex<T>> = (0..d / 2)
                    .map(|c| {
                        let u = |i: usize| (shift[i] + k as f64 * alpha[i]).fract();
                        let (lx, hx) = bx[2 * c];
                        let (ly, hy) = bx[2 * c + 1];
                        Complex::new(lx + (hx - lx) * T::lit(u(2 * c)), ly + (hy - ly) * T::lit(u(2 * c + 1)))
                    })
                    .collect();
                if region.contains(&coords) {
                    out.push(coords);
                }
            }
            Ok(out)
        }
    }
}

fn boundary_circle<T: Scalar>(region: &Region<T>, m: usize) -> Result<Vec<Vec<Complex<T>>>, GeometryError> {
    if m == 0 {
        return Err(GeometryError::InvalidArgument("boundary circle with m = 0".into()));
    }
    let (center, radius) = match &region.kind {
        RegionKind::Disk { center, radius, .. } => (*center, *radius),
        RegionKind::Ball { center, radius, .. } if center.len() == 1 => (center[0], *radius),
        _ => {
            return Err(GeometryError::InvalidArgument(format!(
                "boundary-circle sampling needs a disk, got `{}`",
                region.label
            )))
        }
    };
    Ok((0..m).map(|k| vec![center + polar(radius, TAU * k as f64 / m as f64)]).collect())
}

/// Generalized golden-ratio increments for a `d`-dimensional Kronecker sequence.
fn kronecker_alpha(d: usize) -> Vec<f64> {
    // Positive root of x^(d+1) = x + 1 by fixed-point iteration.
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    (1..=d).map(|i| (1.0 / phi.powi(i as i32)).fract()).collect()
}

/// Samples points of an `n`-dimensional region as [`CPoint`]s.
pub fn sample_points<T: Scalar>(region: &Region<T>, sampler: &Sampler) -> Result<Vec<CPoint<T>>, GeometryError> {
    match region.dim() {
        Some(d) if d >= 2 => {}
        Some(d) => return Err(GeometryError::DimensionMismatch { expected: 2, found: d }),
        None => {
            return Err(GeometryError::InvalidArgument(format!("region `{}` has no fixed dimension", region.label)))
        }
    }
    sample(region, sampler)?.iter().map(|c| CPoint::from_coords(c)).collect()
}

/// Samples a one-dimensional region as complex scalars.
pub fn sample_scalars<T: Scalar>(region: &Region<T>, sampler: &Sampler) -> Result<Vec<Complex<T>>, GeometryError> {
    match region.dim() {
        Some(1) => Ok(sample(region, sampler)?.into_iter().map(|c| c[0]).collect()),
        Some(d) => Err(GeometryError::DimensionMismatch { expected: 1, found: d }),
        None => Err(GeometryError::InvalidArgument(format!("region `{}` has no fixed dimension", region.label))),
    }
}

/// `theta_j = 2 pi frac(j g)` with `g` the golden-ratio conjugate.
pub fn theta_seq(j: i64) -> Result<f64, GeometryError> {
    if j < 1 {
        return Err(GeometryError::InvalidArgument(format!("angle index must be >= 1, got {j}")));
    }
    Ok(TAU * (j as f64 * GOLDEN_CONJUGATE).fract())
}

/// Outcome of walking a polygonal path through a sublevel set.
#[derive(Debug, Clone, PartialEq)]
pub struct PathProbe<T> {
    pub connected: bool,
    /// Global path parameter in `[0, 1]` of the first sampled point outside.
    pub first_violation: Option<T>,
    /// Smallest `level - defining` seen along the path.
    pub worst_margin: T,
}

/// Checks `defining < level` at `steps` points per segment of the polygon `path`.
pub fn path_connected_probe<T, F>(
    defining: F,
    level: T,
    path: &[CPoint<T>],
    steps: usize,
) -> Result<PathProbe<T>, GeometryError>
where
    T: Scalar,
    F: Fn(&CPoint<T>) -> T,
{
    if path.len() < 2 || steps == 0 {
        return Err(GeometryError::InvalidArgument("path needs at least two vertices and one step".into()));
    }
    let n = path[0].dim();
    if let Some(bad) = path.iter().find(|p| p.dim() != n) {
        return Err(GeometryError::DimensionMismatch { expected: n, found: bad.dim() });
    }
    for end in [&path[0], &path[path.len() - 1]] {
        let v = defining(end);
        if !(v < level) {
            return Err(GeometryError::Precondition(format!(
                "path endpoint {:?} not in the sublevel set (value {v})",
                end.to_pairs()
            )));
        }
    }
    let segments = path.len() - 1;
    let mut worst = T::infinity();
    let mut first_violation = None;
    for (s, pair) in path.windows(2).enumerate() {
        for k in 0..=steps {
            let t = T::lit(k as f64 / steps as f64);
            let margin = level - defining(&pair[0].lerp(&pair[1], t));
            // NaN margins count as violations.
            let margin = if margin.is_nan() { T::neg_infinity() } else { margin };
            if margin < worst {
                worst = margin;
            }
            if margin <= T::zero() && first_violation.is_none() {
                first_violation = Some((T::lit(s as f64) + t) / T::lit(segments as f64));
            }
        }
    }
    Ok(PathProbe { connected: first_violation.is_none(), first_violation, worst_margin: worst })
}
