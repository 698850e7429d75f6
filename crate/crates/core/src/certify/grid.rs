use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{format_float, CertifyError, SuiteConfig};
use crate::calculus::levi_sample;
use crate::constructions::{Thm1Scenario, Thm2Scenario};
use crate::{Point, Stencil};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionId {
    D1,
    D2,
    Sigma,
    Sigma2,
    U,
    PhiThm1,
    PhiThm2,
    LeviMinEigThm1,
    LeviMinEigThm2,
}

impl FunctionId {
    pub const ALL: [FunctionId; 9] = [
        FunctionId::D1,
        FunctionId::D2,
        FunctionId::Sigma,
        FunctionId::Sigma2,
        FunctionId::U,
        FunctionId::PhiThm1,
        FunctionId::PhiThm2,
        FunctionId::LeviMinEigThm1,
        FunctionId::LeviMinEigThm2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FunctionId::D1 => "d1",
            FunctionId::D2 => "d2",
            FunctionId::Sigma => "sigma",
            FunctionId::Sigma2 => "sigma2",
            FunctionId::U => "u",
            FunctionId::PhiThm1 => "phi_thm1",
            FunctionId::PhiThm2 => "phi_thm2",
            FunctionId::LeviMinEigThm1 => "levi_min_eig_thm1",
            FunctionId::LeviMinEigThm2 => "levi_min_eig_thm2",
        }
    }

    fn uses_thm2(self) -> bool {
        matches!(
            self,
            FunctionId::D2 | FunctionId::Sigma2 | FunctionId::U | FunctionId::PhiThm2 | FunctionId::LeviMinEigThm2
        )
    }
}

impl FromStr for FunctionId {
    type Err = CertifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FunctionId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| CertifyError::Unknown { kind: "function id", value: s.to_string() })
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64, CertifyError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CertifyError::Config(format!("bad {what} '{s}'")))
}

/// A complex coordinate line `axis` varies over the plane; the others are
/// fixed. Written `z` or `wK` for the plane, then `,name=re:im` entries,
/// e.g. `z,w1=0.5:0`. Unlisted coordinates are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSpec {
    /// Index into the coordinates `(z, w1, .., w_{n-1})`.
    pub axis: usize,
    pub fixed: Vec<(usize, Complex64)>,
}

fn coord_index(name: &str) -> Result<usize, CertifyError> {
    let bad = || CertifyError::Config(format!("bad coordinate '{name}', expected z or wK"));
    match name.trim() {
        "z" => Ok(0),
        w => {
            let k: usize = w.strip_prefix('w').and_then(|k| k.parse().ok()).ok_or_else(bad)?;
            if k == 0 {
                return Err(bad());
            }
            Ok(k)
        }
    }
}

fn coord_name(k: usize) -> String {
    if k == 0 {
        "z".into()
    } else {
        format!("w{k}")
    }
}

impl SliceSpec {
    pub fn z_plane() -> Self {
        Self { axis: 0, fixed: Vec::new() }
    }

    /// Smallest dimension `n` the slice refers to.
    pub fn min_dim(&self) -> usize {
        self.fixed.iter().map(|f| f.0).chain([self.axis]).max().unwrap_or(0) + 1
    }

    /// The point at plane coordinate `x + iy` in `C^n`.
    pub fn point(&self, n: usize, x: f64, y: f64) -> Result<Point, CertifyError> {
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        for (k, v) in &self.fixed {
            c[*k] = *v;
        }
        c[self.axis] = Complex64::new(x, y);
        Point::from_coords(&c).map_err(|e| CertifyError::Config(e.to_string()))
    }
}

impl FromStr for SliceSpec {
    type Err = CertifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(',');
        let axis = coord_index(parts.next().unwrap_or(""))?;
        let mut fixed: Vec<(usize, Complex64)> = Vec::new();
        for part in parts {
            let (name, value) =
                part.split_once('=').ok_or_else(|| CertifyError::Config(format!("bad slice entry '{part}'")))?;
            let k = coord_index(name)?;
            let (re, im) = value.split_once(':').unwrap_or((value, "0"));
            if k == axis || fixed.iter().any(|f| f.0 == k) {
                return Err(CertifyError::Config(format!("coordinate '{name}' given twice")));
            }
            fixed.push((k, Complex64::new(parse_f64(re, "real part")?, parse_f64(im, "imaginary part")?)));
        }
        fixed.sort_by_key(|f| f.0);
        Ok(Self { axis, fixed })
    }
}

impl fmt::Display for SliceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&coord_name(self.axis))?;
        for (k, v) in &self.fixed {
            write!(f, ",{}={}:{}", coord_name(*k), v.re, v.im)?;
        }
        Ok(())
    }
}

/// Axis-aligned rectangle `x0:x1,y0:y1` in the slice plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneRect {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl FromStr for PlaneRect {
    type Err = CertifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CertifyError::Config(format!("bad region '{s}', expected x0:x1,y0:y1"));
        let (xs, ys) = s.split_once(',').ok_or_else(bad)?;
        let range = |r: &str| -> Result<(f64, f64), CertifyError> {
            let (a, b) = r.split_once(':').ok_or_else(bad)?;
            let (a, b) = (parse_f64(a, "bound")?, parse_f64(b, "bound")?);
            if a > b {
                return Err(bad());
            }
            Ok((a, b))
        };
        Ok(Self { x: range(xs)?, y: range(ys)? })
    }
}

fn axis_value(range: (f64, f64), i: usize, count: usize) -> f64 {
    if count == 1 {
        range.0
    } else {
        range.0 + (range.1 - range.0) * i as f64 / (count - 1) as f64
    }
}

/// Values of one function on a rectangular grid of a complex plane slice.
#[derive(Debug, Clone)]
pub struct GridExport {
    pub function_id: FunctionId,
    pub region: PlaneRect,
    pub resolution: (usize, usize),
    pub slice: SliceSpec,
    /// Row-major: `values[iy * nx + ix]`.
    pub values: Vec<f64>,
}

impl GridExport {
    pub fn point(&self, ix: usize, iy: usize) -> (f64, f64) {
        (axis_value(self.region.x, ix, self.resolution.0), axis_value(self.region.y, iy, self.resolution.1))
    }

    pub fn to_csv(&self) -> String {
        let axis = coord_name(self.slice.axis);
        let mut s = format!(
            "# axes={axis}.re,{axis}.im slice={} function={}\nx,y,value\n",
            self.slice,
            self.function_id.as_str()
        );
        let nx = self.resolution.0;
        for (i, v) in self.values.iter().enumerate() {
            let (x, y) = self.point(i % nx, i / nx);
            s.push_str(&format!("{},{},{}\n", format_float(x), format_float(y), format_float(*v)));
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CertifyError> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

enum Source {
    Thm1(Thm1Scenario),
    Thm2(Box<Thm2Scenario>, Stencil),
}

/// Evaluates `function_id` on the grid. Uses `cfg.n` (raised to what the slice
/// mentions), `cfg.trunc`, `cfg.seed`, `cfg.lemma3_samples` and `cfg.fd_step`.
pub fn emit_grid(
    function_id: FunctionId,
    slice: &SliceSpec,
    region: PlaneRect,
    resolution: (usize, usize),
    cfg: &SuiteConfig,
) -> Result<GridExport, CertifyError> {
    let n = cfg.n.max(slice.min_dim()).max(2);
    let cfg = SuiteConfig { n, ..*cfg };
    cfg.validate()?;
    let (nx, ny) = resolution;
    if nx == 0 || ny == 0 {
        return Err(CertifyError::Config("resolution must be positive".into()));
    }
    let source = if function_id.uses_thm2() {
        let t = Thm2Scenario::build(n, cfg.trunc, cfg.seed, cfg.lemma3_samples)?;
        let stencil = t.stencil(cfg.fd_step)?;
        Source::Thm2(Box::new(t), stencil)
    } else {
        Source::Thm1(Thm1Scenario::build(n, cfg.trunc)?)
    };
    let thm1_stencil = Stencil::new(cfg.fd_step).map_err(crate::constructions::ConstructionError::from)?;
    let points: Vec<Point> = (0..ny)
        .flat_map(|iy| (0..nx).map(move |ix| (ix, iy)))
        .map(|(ix, iy)| slice.point(n, axis_value(region.x, ix, nx), axis_value(region.y, iy, ny)))
        .collect::<Result<_, _>>()?;
    let values = points
        .par_iter()
        .map(|p| match (&source, function_id) {
            (Source::Thm1(t), FunctionId::D1) => t.d1(p),
            (Source::Thm1(t), FunctionId::Sigma) => t.sigma(p.z),
            (Source::Thm1(t), FunctionId::PhiThm1) => t.phi(p),
            (Source::Thm1(t), FunctionId::LeviMinEigThm1) => {
                levi_sample(&|q: &Point| t.phi(q), p, &thm1_stencil).map_or(f64::NAN, |s| s.min_eig)
            }
            (Source::Thm2(t, _), FunctionId::D2) => t.d2(p),
            (Source::Thm2(t, _), FunctionId::Sigma2) => t.sigma(p.z),
            (Source::Thm2(t, _), FunctionId::U) => t.u().eval(p.z),
            (Source::Thm2(t, _), FunctionId::PhiThm2) => t.phi(p),
            (Source::Thm2(t, s), FunctionId::LeviMinEigThm2) => {
                levi_sample(&|q: &Point| t.phi(q), p, s).map_or(f64::NAN, |s| s.min_eig)
            }
            _ => unreachable!("source chosen by function id"),
        })
        .collect();
    Ok(GridExport { function_id, region, resolution, slice: slice.clone(), values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_specs() {
        let s: SliceSpec = "z,w1=0.5:-1".parse().unwrap();
        assert_eq!(s.axis, 0);
        assert_eq!(s.fixed, vec![(1, Complex64::new(0.5, -1.0))]);
        assert_eq!(s.to_string(), "z,w1=0.5:-1");
        assert_eq!("w2,z=1".parse::<SliceSpec>().unwrap().min_dim(), 3);
        assert!("q".parse::<SliceSpec>().is_err());
        assert!("z,z=1:0".parse::<SliceSpec>().is_err());
        let r: PlaneRect = "-3:3,-2:2".parse().unwrap();
        assert_eq!(r, PlaneRect { x: (-3.0, 3.0), y: (-2.0, 2.0) });
        assert!("3:-3,0:1".parse::<PlaneRect>().is_err());
        assert!("sigmoid".parse::<FunctionId>().is_err());
    }

    #[test]
    fn sigma_grid_shape_and_pole_sentinel() {
        let region = PlaneRect { x: (-3.0, 3.0), y: (-3.0, 3.0) };
        let g = emit_grid(FunctionId::Sigma, &SliceSpec::z_plane(), region, (20, 10), &SuiteConfig::default()).unwrap();
        assert_eq!(g.values.len(), 200);
        let csv = g.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 202);
        assert_eq!(lines[0], "# axes=z.re,z.im slice=z function=sigma");
        assert_eq!(lines[1], "x,y,value");
        // d1 at the origin with w = w0 is a pole.
        let w0: SliceSpec = "z,w1=2:0".parse().unwrap();
        let g =
            emit_grid(FunctionId::D1, &w0, PlaneRect { x: (0.0, 0.0), y: (0.0, 0.0) }, (1, 1), &SuiteConfig::default())
                .unwrap();
        assert!(g.to_csv().ends_with(",-inf\n"));
    }
}
