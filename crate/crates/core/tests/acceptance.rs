//! Acceptance criteria at the default configuration, one line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed; exits
//! nonzero if any criterion fails.

use std::process::{Command, ExitCode};

use pshcert::certify::{run_suite, Report, Suite, SuiteConfig};
use pshcert::Certificate;

struct Checks<'a> {
    report: &'a Report,
    problems: Vec<String>,
}

impl<'a> Checks<'a> {
    fn new(report: &'a Report) -> Self {
        Self { report, problems: Vec::new() }
    }

    fn cert(&mut self, name: &str) -> Option<&'a Certificate> {
        let c = self.report.certificate(name);
        if c.is_none() {
            self.problems.push(format!("{name} missing"));
        }
        c
    }

    /// Certificate present, with at least `samples` samples and worst margin `>= -slack`.
    fn margin(&mut self, name: &str, samples: usize, slack: f64) {
        let Some(c) = self.cert(name) else { return };
        if c.samples < samples {
            self.problems.push(format!("{name}: {} samples < {samples}", c.samples));
        }
        if !(c.worst_margin >= -slack) {
            self.problems.push(format!("{name}: worst margin {:e} < -{slack:e}", c.worst_margin));
        }
    }

    fn passes(&mut self, name: &str, samples: usize) {
        let Some(c) = self.cert(name) else { return };
        if !c.passed() || c.samples < samples {
            self.problems.push(format!(
                "{name}: {} with {} samples, worst {:e}",
                c.status.as_str(),
                c.samples,
                c.worst_margin
            ));
        }
    }

    fn metric(&mut self, name: &str, key: &str, ok: impl Fn(f64) -> bool, want: &str) -> Option<f64> {
        let v = self.cert(name)?.metric(key);
        match v {
            Some(x) if ok(x) => {}
            Some(x) => self.problems.push(format!("{name}.{key} = {x:e}, want {want}")),
            None => self.problems.push(format!("{name}.{key} missing")),
        }
        v
    }

    fn finish(self, id: usize, title: &str, detail: String, failed: &mut Vec<usize>) {
        if self.problems.is_empty() {
            println!("PASS criterion {id}: {title} ({detail})");
        } else {
            println!("FAIL criterion {id}: {title} ({detail}) :: {}", self.problems.join("; "));
            failed.push(id);
        }
    }
}

fn cli_report(path: &std::path::Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_pshcert"))
        .args(["certify", "all", "--seed", "42", "--report"])
        .arg(path)
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    if status.code() != Some(0) && status.code() != Some(1) {
        return Err(format!("cli exited with {status}"));
    }
    std::fs::read(path).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let report = run_suite(Suite::All, &cfg).expect("default configuration is valid");
    let mut failed = Vec::new();

    // 1. sigma for the first domain.
    let mut k = Checks::new(&report);
    k.margin("thm1.sigma_closed_disc", 10_000, 0.0);
    k.margin("thm1.sigma_subharmonic", 1_000, 1e-9);
    let w = report.certificate("thm1.sigma_subharmonic").map_or(f64::NAN, |c| c.worst_margin);
    k.finish(
        1,
        "|sigma| + error < 1 on the closed disc; circle-mean margin >= -1e-9",
        format!("circle-mean worst {w:.3e}"),
        &mut failed,
    );

    // 2. sigma for the second domain.
    let mut k = Checks::new(&report);
    k.margin("thm2.sigma_closed_disc", 10_000, 0.0);
    k.margin("thm2.sigma_off_discs", 1_000, 0.0);
    k.finish(
        2,
        "sigma + error < 1/4 on the closed disc; certified lower bound >= -1 off the discs",
        "J = 60".into(),
        &mut failed,
    );

    // 3. The subharmonic function u.
    let mut k = Checks::new(&report);
    k.margin("lemma21.u_at_poles", 50, 0.0);
    k.margin("lemma21.u_on_rho_discs", 50, 0.0);
    k.margin("lemma21.u_on_closed_disc", 1_000, 0.0);
    k.margin("lemma21.branch_continuity", 50, 1e-12);
    k.margin("lemma21.sub_mean_value", 1_000, 1e-6);
    k.finish(
        3,
        "u(a_j) = 1, u = 1 on rho-discs, u = |z|^2 on the closed disc, continuity <= 1e-12, sub-mean-value >= -1e-6",
        "j <= 50".into(),
        &mut failed,
    );

    // 4. The final lemma.
    let mut k = Checks::new(&report);
    k.margin("lemma3.fd_vs_analytic", 1_000, 0.0);
    k.margin("lemma3.l_bound", 10_000, 1e-10);
    k.margin("lemma3.completion", 10_000, 1e-10);
    k.passes("lemma3.form_lower_bound", 100_000);
    k.metric("lemma3.form_lower_bound", "R", |r| r == 2.5, "5/2");
    let eps = k.metric("lemma3.form_lower_bound", "epsilon_out", |e| e > 0.0, "> 0");
    k.finish(
        4,
        "H_S vs FD rel. error < 1e-5; (lambda')^2 <= L lambda; completion >= 0; epsilon_out > 0 at R = 5/2",
        format!("epsilon_out {:.3e}", eps.unwrap_or(f64::NAN)),
        &mut failed,
    );

    // 5. First domain, witness function.
    let mut k = Checks::new(&report);
    let e0 = k.metric("thm1.levi_omega", "min_eig", |e| e > 0.0, "> 0");
    k.passes("thm1.levi_omega", 10_000);
    k.passes("thm1.prop7", 10_000);
    k.passes("thm1.phi_bounds", 100_000);
    for name in ["thm1.prop3", "thm1.prop4", "thm1.prop5", "thm1.prop8"] {
        k.passes(name, 10_000);
    }
    k.finish(
        5,
        "strictly psh on omega; phi~ > -2 on omega; phi in [-2, 4]; prop3, prop4, prop5, prop8",
        format!("epsilon_0 {:.6e}", e0.unwrap_or(f64::NAN)),
        &mut failed,
    );

    // 6. Second domain, witness function.
    let mut k = Checks::new(&report);
    for name in ["thm2.prop4", "thm2.prop5", "thm2.prop6", "thm2.branch_agreement", "thm2.theta_smoothness"] {
        k.passes(name, 10_000);
    }
    k.passes("thm2.phi_bounds", 10_000);
    let sup = k.metric("thm2.phi_bounds", "sup", f64::is_finite, "finite");
    k.passes("thm2.levi_omega", 10_000);
    let e0 = k.metric("thm2.levi_omega", "min_eig", |e| e > 0.0, "> 0");
    let core = k.metric("thm2.levi_omega_core", "min_eig", |e| e > 0.0, "> 0");
    k.finish(
        6,
        "prop4, prop5, prop6; min Levi eigenvalue epsilon_0 > 0 on omega; phi bounded; branch agreement; theta smooth",
        format!(
            "epsilon_0 {:.6e}, core {:.6e}, sup phi {:.6e}",
            e0.unwrap_or(f64::NAN),
            core.unwrap_or(f64::NAN),
            sup.unwrap_or(f64::NAN)
        ),
        &mut failed,
    );

    // 7. The warm-up example.
    let mut k = Checks::new(&report);
    k.passes("example1.levi_floor", 10_000);
    let m = k.metric("example1.levi_floor", "min_eig", |e| (e - 1.0).abs() <= 1e-3, "within 1e-3 of 1");
    k.finish(
        7,
        "Levi floor within 1e-3 of 1 on pole-excluded sublevel samples",
        format!("floor {:.6e}", m.unwrap_or(f64::NAN)),
        &mut failed,
    );

    // 8. Byte-identical reports from two CLI runs.
    let dir = tempfile::tempdir().expect("temp dir");
    let a = cli_report(&dir.path().join("a.json"));
    let b = cli_report(&dir.path().join("b.json"));
    let detail;
    let ok = match (&a, &b) {
        (Ok(a), Ok(b)) => {
            detail = format!("{} bytes, same as in-process: {}", a.len(), a == report.to_json().as_bytes());
            a == b
        }
        (Err(e), _) | (_, Err(e)) => {
            detail = e.clone();
            false
        }
    };
    if ok {
        println!("PASS criterion 8: two runs of `certify all --seed 42` give byte-identical reports ({detail})");
    } else {
        println!("FAIL criterion 8: two runs of `certify all --seed 42` give byte-identical reports ({detail})");
        failed.push(8);
    }

    if failed.is_empty() {
        println!("acceptance: all 8 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
