//! Named suites, reports and grid exports.
//!
//! A suite builds the scenarios it needs, runs their property checks in a fixed
//! order and collects the certificates into a [`Report`]. Reports are
//! deterministic in the configuration: sampling streams are keyed by seed and
//! check label, and parallel work is collected in input order, so the thread
//! count never changes a margin.

mod grid;
mod report;

pub use grid::{emit_grid, FunctionId, GridExport, PlaneRect, SliceSpec};
pub use report::{format_float, Report};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::constructions::{
    example1_check, CheckConfig, ConstructionError, Lemma21U, Lemma3Form, Thm1Scenario, Thm2Scenario, EXAMPLE1_LEVEL,
    LEMMA3_SAMPLES, THETA_RADIUS,
};
use crate::Certificate;

/// Largest accepted truncation order.
pub const MAX_TRUNC: usize = 200;
/// Smallest accepted per-certificate sample count.
pub const MIN_SAMPLES: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum CertifyError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown {kind} '{value}'")]
    Unknown { kind: &'static str, value: String },
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Example1,
    Thm1,
    Lemma21,
    Lemma3,
    Thm2,
    All,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Example1, Suite::Thm1, Suite::Lemma21, Suite::Lemma3, Suite::Thm2, Suite::All];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Example1 => "example1",
            Suite::Thm1 => "thm1",
            Suite::Lemma21 => "lemma21",
            Suite::Lemma3 => "lemma3",
            Suite::Thm2 => "thm2",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = CertifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| CertifyError::Unknown { kind: "suite", value: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub n: usize,
    pub trunc: usize,
    pub samples: usize,
    /// Samples for the form bound of the final lemma.
    pub lemma3_samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub fd_step: f64,
    /// Record wall-clock time in the report.
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let c = CheckConfig::default();
        Self {
            n: 2,
            trunc: c.trunc,
            samples: c.samples,
            lemma3_samples: LEMMA3_SAMPLES,
            seed: c.seed,
            tol: c.tol,
            fd_step: c.fd_step,
            timing: false,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), CertifyError> {
        let bad = |m: String| Err(CertifyError::Config(m));
        if !(2..=crate::calculus::MAX_DIM).contains(&self.n) {
            return bad(format!("n = {} outside 2..={}", self.n, crate::calculus::MAX_DIM));
        }
        if !(1..=MAX_TRUNC).contains(&self.trunc) {
            return bad(format!("trunc = {} outside 1..={MAX_TRUNC}", self.trunc));
        }
        if self.samples < MIN_SAMPLES || self.lemma3_samples < MIN_SAMPLES {
            return bad(format!("sample counts must be at least {MIN_SAMPLES}"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol = {} must be positive", self.tol));
        }
        if !(self.fd_step > 0.0 && self.fd_step < 1.0) {
            return bad(format!("fd_step = {} outside (0, 1)", self.fd_step));
        }
        Ok(())
    }

    pub fn check_config(&self) -> CheckConfig {
        CheckConfig { seed: self.seed, samples: self.samples, tol: self.tol, fd_step: self.fd_step, trunc: self.trunc }
    }
}

/// Certificates of one suite plus the scenario dump.
struct Outcome {
    certificates: Vec<Certificate>,
    dump: String,
}

impl Outcome {
    fn new() -> Self {
        Self { certificates: Vec::new(), dump: String::new() }
    }

    /// Appends the certificates, or one failed certificate carrying the diagnostic.
    fn absorb(&mut self, name: &str, tol: f64, r: Result<Vec<Certificate>, ConstructionError>) {
        match r {
            Ok(c) => self.certificates.extend(c),
            Err(e) => self.certificates.push(Certificate::failed(format!("{name}.construction"), tol, e.to_string())),
        }
    }
}

fn lemma3_dump(f: &Lemma3Form) -> String {
    let mut s = String::from("# final lemma form\n");
    for (k, v) in [
        ("R", f.radius),
        ("L", f.l),
        ("B", f.b),
        ("C", f.c),
        ("epsilon_analytic", f.epsilon_analytic),
        ("epsilon_measured", f.epsilon_measured),
        ("epsilon_out", f.epsilon_out),
    ] {
        s.push_str(&format!("{k} {}\n", format_float(v)));
    }
    s
}

fn w0_line(w0: &[num_complex::Complex64]) -> String {
    let parts: Vec<String> = w0.iter().map(|c| format!("{}:{}", format_float(c.re), format_float(c.im))).collect();
    format!("w0 {}\n", parts.join(","))
}

fn run_thm1(cfg: &SuiteConfig, out: &mut Outcome) {
    let check = cfg.check_config();
    match Thm1Scenario::build(cfg.n, cfg.trunc) {
        Ok(t) => {
            out.dump.push_str("# thm1\n");
            out.dump.push_str(&w0_line(&t.w0));
            out.dump.push_str(&t.schedule().export());
            out.absorb("thm1", cfg.tol, t.properties(&check));
        }
        Err(e) => out.absorb("thm1", cfg.tol, Err(e)),
    }
}

fn run_thm2_family(cfg: &SuiteConfig, suites: &[Suite], out: &mut Outcome) {
    let check = cfg.check_config();
    let needs_scenario = suites.contains(&Suite::Thm2);
    // The scenario owns u and the form; build only what is needed.
    let thm2 = if needs_scenario {
        match Thm2Scenario::build(cfg.n, cfg.trunc, cfg.seed, cfg.lemma3_samples) {
            Ok(t) => Some(t),
            Err(e) => {
                out.absorb("thm2", cfg.tol, Err(e));
                return;
            }
        }
    } else {
        None
    };
    for suite in suites {
        match suite {
            Suite::Lemma21 => {
                let built;
                let u = match &thm2 {
                    Some(t) => t.u(),
                    None => match Lemma21U::build(cfg.trunc) {
                        Ok(u) => {
                            built = u;
                            &built
                        }
                        Err(e) => {
                            out.absorb("lemma21", cfg.tol, Err(e));
                            continue;
                        }
                    },
                };
                out.dump.push_str("# lemma21\n");
                out.dump.push_str(&u.schedule().export());
                out.absorb("lemma21", cfg.tol, u.properties(&check));
            }
            Suite::Lemma3 => {
                let built;
                let form = match &thm2 {
                    Some(t) => t.form(),
                    None => match Lemma3Form::build(THETA_RADIUS, cfg.n, cfg.seed, cfg.lemma3_samples) {
                        Ok(f) => {
                            built = f;
                            &built
                        }
                        Err(e) => {
                            out.absorb("lemma3", cfg.tol, Err(e));
                            continue;
                        }
                    },
                };
                out.dump.push_str(&lemma3_dump(form));
                out.absorb("lemma3", cfg.tol, form.properties(&check, cfg.lemma3_samples));
            }
            Suite::Thm2 => {
                let t = thm2.as_ref().expect("built above");
                out.dump.push_str("# thm2\n");
                out.dump.push_str(&w0_line(&t.w0));
                out.dump.push_str(&format!("c {}\n", format_float(t.c_weight)));
                out.dump.push_str(&format!("pole_weight {}\n", format_float(t.pole_weight)));
                if !suites.contains(&Suite::Lemma3) {
                    out.dump.push_str(&lemma3_dump(t.form()));
                }
                if !suites.contains(&Suite::Lemma21) {
                    out.dump.push_str(&t.schedule().export());
                }
                out.absorb("thm2", cfg.tol, t.properties(&check));
            }
            _ => {}
        }
    }
}

/// Runs a suite. Invalid configurations are errors; construction failures
/// become failed certificates in the report.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Report, CertifyError> {
    cfg.validate()?;
    let start = Instant::now();
    let mut out = Outcome::new();
    let parts: &[Suite] = match suite {
        Suite::All => &[Suite::Example1, Suite::Thm1, Suite::Lemma21, Suite::Lemma3, Suite::Thm2],
        _ => std::slice::from_ref(&suite),
    };
    if parts.contains(&Suite::Example1) {
        let r = example1_check(EXAMPLE1_LEVEL, cfg.n, &cfg.check_config()).map(|c| vec![c]);
        out.absorb("example1", cfg.tol, r);
    }
    if parts.contains(&Suite::Thm1) {
        run_thm1(cfg, &mut out);
    }
    let rest: Vec<Suite> =
        parts.iter().copied().filter(|s| matches!(s, Suite::Lemma21 | Suite::Lemma3 | Suite::Thm2)).collect();
    if !rest.is_empty() {
        run_thm2_family(cfg, &rest, &mut out);
    }
    let elapsed = cfg.timing.then(|| start.elapsed().as_millis() as u64);
    Ok(Report::new(suite, *cfg, out.certificates, out.dump, elapsed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert!("thm3".parse::<Suite>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SuiteConfig::default().validate().is_ok());
        for bad in [
            SuiteConfig { n: 1, ..SuiteConfig::default() },
            SuiteConfig { trunc: 0, ..SuiteConfig::default() },
            SuiteConfig { samples: 10, ..SuiteConfig::default() },
            SuiteConfig { tol: -1.0, ..SuiteConfig::default() },
            SuiteConfig { fd_step: f64::NAN, ..SuiteConfig::default() },
        ] {
            assert!(matches!(run_suite(Suite::Example1, &bad), Err(CertifyError::Config(_))));
        }
    }

    #[test]
    fn small_suites_are_deterministic() {
        let cfg = SuiteConfig { samples: 200, ..SuiteConfig::default() };
        let a = run_suite(Suite::Thm1, &cfg).unwrap();
        let b = run_suite(Suite::Thm1, &cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.passed());
        assert!(!a.schedule_dump().is_empty());
    }
}
