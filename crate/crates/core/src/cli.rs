//! Command-line front end.
//!
//! Every command is a pure function of its flags, optional config file,
//! input files and seed. Output files and stdout are byte-reproducible; the
//! wallclock goes to stderr.
//!
//! Exit codes: 0 ok, 1 I/O, 2 validation, 3 size caps, 4 certification
//! refusal, 5 oracle violation.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{self, Curve, KrausExponent, RandomEnsemble};
use crate::certify::{self, LambdaMode, LocalExcitation};
use crate::classical::{self, ClassicalCode, Ensemble, TypicalityParams};
use crate::error::Error;
use crate::fock::{self, Partition, PartitionPolicy};
use crate::oracle;
use crate::simplex::{loss_patterns, SimplexShape, DEFAULT_ENUMERATION_CAP};

pub const EXIT_ORACLE: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "fockcodes", version, about = "Fock-state codes from l1 codes on the simplex")]
pub struct Cli {
    /// JSON file with default values for any flag; flags given on the
    /// command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a random classical code (uniform or multinomial ensemble).
    Sample(Flags),
    /// Greedy GV code over the typical set.
    Greedy(Flags),
    /// Partition a code, build the Fock code and certify it.
    Certify(Flags),
    /// Rate curves, Delta_alpha and zero crossings.
    Bounds(Flags),
    /// Dense oracle checks on small instances.
    Oracle(Flags),
}

/// Flags shared by all commands; each command reads the ones it needs.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<u32>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub len: Option<usize>,
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[arg(long)]
    pub t: Option<u32>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// uniform | multinomial
    #[arg(long)]
    pub ensemble: Option<String>,
    /// analytic_uniform | analytic_multinomial | empirical_code_mean
    #[arg(long = "lambda-mode")]
    pub lambda_mode: Option<String>,
    /// Output file (sample, greedy, certify) or directory (bounds, oracle).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "cap-patterns")]
    pub cap_patterns: Option<u64>,
    #[arg(long = "cap-enum")]
    pub cap_enum: Option<u64>,
    /// Oracle tolerance, or bisection width for bounds.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Input code file (certify, oracle).
    #[arg(long)]
    pub code: Option<PathBuf>,
    /// sequential | shuffled
    #[arg(long)]
    pub partition: Option<String>,
    /// Infinity-norm slack of the typical set.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Support-window exponent of the typical set.
    #[arg(long)]
    pub xi: Option<f64>,
    /// Greedy over the whole simplex.
    #[arg(long = "no-typicality", num_args = 0..=1, default_missing_value = "true")]
    pub no_typicality: Option<bool>,
    /// Greedy by sampling proposals instead of enumerating.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub sampled: Option<bool>,
    /// Target size for the sampled greedy.
    #[arg(long)]
    pub target: Option<usize>,
    /// Proposal budget for the sampled greedy.
    #[arg(long)]
    pub proposals: Option<u64>,
    #[arg(long = "delta-min")]
    pub delta_min: Option<f64>,
    #[arg(long = "delta-max")]
    pub delta_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Comma-separated: gv,u,m,quantum_uniform,quantum_multinomial,exact
    #[arg(long)]
    pub curves: Option<String>,
    /// Also locate zero crossings of the quantum rate bounds.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub crossing: Option<bool>,
    /// Comma-separated oracle checks: trace,completeness,closed_form,identify,fidelity
    #[arg(long)]
    pub checks: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Write the Fock code next to the certificate.
    #[arg(long = "fock-out")]
    pub fock_out: Option<PathBuf>,
    /// Write the permutation-invariant descriptor.
    #[arg(long = "pi-out")]
    pub pi_out: Option<PathBuf>,
    /// Deliberately corrupt one amplitude in the oracle (self-test).
    #[arg(long = "inject-fault", num_args = 0..=1, default_missing_value = "true")]
    pub inject_fault: Option<bool>,
}

macro_rules! merge_fields {
    ($a:ident, $b:ident; $($f:ident),*) => {
        Flags { $($f: $a.$f.or($b.$f)),* }
    };
}

impl Flags {
    /// Fills unset flags from `base`.
    pub fn or(self, base: Flags) -> Flags {
        let a = self;
        let b = base;
        merge_fields!(a, b; q, n, alpha, len, k, t, gamma, seed, ensemble, lambda_mode, out,
            cap_patterns, cap_enum, tol, code, partition, eps, xi, no_typicality, sampled,
            target, proposals, delta_min, delta_max, points, curves, crossing, checks, trials,
            fock_out, pi_out, inject_fault)
    }
}

/// Failure with an exit code and a message for stderr.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = match &e {
            Error::Orthogonality(w) => format!("certification refused: {e}\nwitness: {}", serde_json::to_string(w).unwrap_or_default()),
            _ => e.to_string(),
        };
        CliError { code: e.exit_code(), message }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError { code: 2, message: msg.into() }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn need<T>(v: Option<T>, name: &str) -> CliResult<T> {
    v.ok_or_else(|| invalid(format!("missing required flag --{name}")))
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn shape_of(f: &Flags) -> CliResult<SimplexShape> {
    let n = need(f.n, "N")?;
    let shape = match (f.q, f.alpha) {
        (Some(q), _) => SimplexShape::new(q, n)?,
        (None, Some(a)) => SimplexShape::from_alpha(a, n)?,
        (None, None) => return Err(invalid("give --q or --alpha")),
    };
    Ok(shape)
}

fn write_file(path: &Path, contents: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

/// Output of one command: stdout text plus written files.
struct Outcome {
    stdout: String,
    exit: i32,
}

fn cmd_sample(f: &Flags) -> CliResult<Outcome> {
    let shape = shape_of(f)?;
    let len = need(f.len, "L")?;
    let seed = f.seed.unwrap_or(0);
    let ensemble: Ensemble = f.ensemble.as_deref().unwrap_or("uniform").parse()?;
    let mut code = match ensemble {
        Ensemble::Uniform => classical::sample_uniform(shape, len, seed)?,
        Ensemble::Multinomial => classical::sample_multinomial(shape, len, seed)?,
        other => return Err(invalid(format!("sample supports uniform and multinomial, not {other}"))),
    };
    code.alpha = f.alpha;
    let out = need(f.out.clone(), "out")?;
    write_file(&out, code.to_json()?.as_bytes())?;
    let mut s = format!("wrote {} {} words on {} to {}\n", len, ensemble, shape, out.display());
    let pairs = (len as u64).saturating_mul(len as u64);
    let cap = f.cap_enum.unwrap_or(DEFAULT_ENUMERATION_CAP);
    if len >= 2 && pairs <= cap {
        s.push_str(&format!("min_distance {}\n", classical::min_distance(&code)?));
    } else if len >= 2 {
        s.push_str(&format!("min_distance skipped: L^2 = {pairs} above cap {cap}\n"));
    }
    Ok(Outcome { stdout: s, exit: 0 })
}

fn typicality_of(f: &Flags, shape: SimplexShape) -> CliResult<Option<TypicalityParams>> {
    if f.no_typicality.unwrap_or(false) {
        return Ok(None);
    }
    let alpha = f.alpha.unwrap_or(shape.q as f64 / shape.n.max(1) as f64);
    Ok(Some(TypicalityParams::new(alpha, f.eps.unwrap_or(1.0), f.xi.unwrap_or(0.25))?))
}

fn cmd_greedy(f: &Flags) -> CliResult<Outcome> {
    let shape = shape_of(f)?;
    let t = need(f.t, "t")?;
    let seed = f.seed.unwrap_or(0);
    let params = typicality_of(f, shape)?;
    let cap = f.cap_enum.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let outcome = if f.sampled.unwrap_or(false) {
        classical::greedy_sampled(
            shape,
            t,
            params.as_ref(),
            seed,
            f.target.unwrap_or(1000),
            f.proposals.unwrap_or(100_000),
            cap,
        )?
    } else {
        classical::greedy_gv(shape, t, params.as_ref(), seed, cap)?
    };
    let out = need(f.out.clone(), "out")?;
    write_file(&out, outcome.code.to_json()?.as_bytes())?;
    let mut s = format!("wrote greedy code of size {} (distance >= {t}) to {}\n", outcome.code.len(), out.display());
    match &params {
        Some(p) => s.push_str(&format!(
            "typicality: alpha {} eps {} xi {}; inf-norm cap {:.6}, support window {:.6}\n",
            p.alpha,
            p.eps,
            p.xi,
            p.inf_norm_cap(shape.n),
            p.support_window(shape.n)
        )),
        None => s.push_str("typicality: disabled\n"),
    }
    s.push_str(&format!("typical points considered {}\n", outcome.typical_count));
    if outcome.gv_counting_bound.is_finite() {
        s.push_str(&format!("GV counting bound {:.6}\n", outcome.gv_counting_bound));
    }
    if !outcome.distance_verified {
        s.push_str("distance unverified\n");
    }
    Ok(Outcome { stdout: s, exit: 0 })
}

fn cmd_certify(f: &Flags, digests: &mut BTreeMap<String, String>) -> CliResult<Outcome> {
    let path = need(f.code.clone(), "code")?;
    let bytes = fs::read(&path)?;
    digests.insert("code".into(), digest(&bytes));
    let code = ClassicalCode::from_json(std::str::from_utf8(&bytes).map_err(|e| invalid(e.to_string()))?)?;
    let k = need(f.k, "K")?;
    let t = need(f.t, "t")?;
    let gamma = need(f.gamma, "gamma")?;
    let mode = match &f.lambda_mode {
        Some(m) => m.parse()?,
        None => LambdaMode::default_for(code.ensemble),
    };
    let policy = match f.partition.as_deref().unwrap_or("sequential") {
        "sequential" => PartitionPolicy::Sequential,
        "shuffled" => PartitionPolicy::Shuffled(f.seed.unwrap_or(0)),
        other => return Err(invalid(format!("unknown partition policy {other:?}"))),
    };
    let shape = code.shape;
    let alpha = f.alpha.or(code.alpha).unwrap_or(shape.q as f64 / shape.n.max(1) as f64);
    let partition = Partition::new(code.len(), k, policy)?;
    let fc = fock::build_fock_code(code, partition, Some(t))?;
    let mut report = certify::certify(&fc, t, gamma, mode, f.cap_patterns.unwrap_or(certify::DEFAULT_PATTERN_CAP))?;
    let b = if shape.n >= 2 {
        ((1.0 + f.eps.unwrap_or(1.0)) * (shape.n as f64).ln() / (1.0 + alpha).ln()).floor() as u32
    } else {
        shape.n
    };
    report.quantum_rate = fock::quantum_rate(fc.k(), shape).ok();
    report.local_excitation = Some(LocalExcitation { b, overlap: fock::local_excitation_overlap(&fc, b) });
    report.input_digests = digests.clone();
    let out = need(f.out.clone(), "out")?;
    write_file(&out, report.to_json()?.as_bytes())?;
    if let Some(p) = &f.fock_out {
        write_file(p, fc.to_json()?.as_bytes())?;
    }
    if let Some(p) = &f.pi_out {
        write_file(p, fock::export_pi(&fc).to_json()?.as_bytes())?;
    }
    let mut s = format!("wrote certificate to {}\n", out.display());
    s.push_str(&format!("eps_max {:e}\neps_certified {:e}\n", report.eps_max, report.eps_certified));
    match report.eps_ad {
        Some(e) => s.push_str(&format!("eps_ad {e:e}\n")),
        None => s.push_str("eps_ad none (eps_certified > 1)\n"),
    }
    s.push_str(&format!("p_loss {:e}\n", report.p_loss));
    if let Some(r) = report.quantum_rate {
        s.push_str(&format!("quantum_rate {r:.6}\n"));
    }
    s.push_str(&format!("local_excitation_overlap(B={b}) {:.6}\n", fock::local_excitation_overlap(&fc, b)));
    if !report.discarded.is_empty() {
        s.push_str(&format!("note: K does not divide L; discarded {} word(s)\n", report.discarded.len()));
    }
    Ok(Outcome { stdout: s, exit: 0 })
}

fn curve_list(list: &str, alpha: f64) -> CliResult<Vec<Curve>> {
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match name {
            "gv" => out.push(Curve::Gv { alpha }),
            "u" => out.push(Curve::Uniform { alpha }),
            "m" => out.push(Curve::Multinomial { alpha }),
            "exact" => out.push(Curve::ExactQuantum { alpha }),
            "quantum_uniform" | "quantum_multinomial" => {
                let ensemble = if name == "quantum_uniform" {
                    RandomEnsemble::Uniform
                } else {
                    RandomEnsemble::Multinomial
                };
                for exponent in [KrausExponent::Printed, KrausExponent::Modes] {
                    out.push(Curve::QuantumBound { alpha, ensemble, exponent });
                }
            }
            other => return Err(invalid(format!("unknown curve {other:?}"))),
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct CrossingRow {
    curve: String,
    root: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct BoundsSummary {
    tool_version: String,
    alpha: f64,
    delta_alpha_quadrature: f64,
    delta_alpha_bessel: f64,
    files: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    crossings: Vec<CrossingRow>,
}

fn cmd_bounds(f: &Flags) -> CliResult<Outcome> {
    let alpha = f.alpha.unwrap_or(1.0);
    let grid = bounds::linear_grid(f.delta_min.unwrap_or(0.0), f.delta_max.unwrap_or(0.25), f.points.unwrap_or(26))?;
    let curves = curve_list(f.curves.as_deref().unwrap_or("gv,u"), alpha)?;
    let dir = f.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    for c in &curves {
        let mut buf = Vec::new();
        bounds::emit_curve(c, &grid, &mut buf)?;
        let name = format!("{}.csv", c.name());
        write_file(&dir.join(&name), &buf)?;
        files.push(name);
    }
    let mut crossings = Vec::new();
    if f.crossing.unwrap_or(false) {
        let tol = f.tol.unwrap_or(1e-10);
        for ensemble in [RandomEnsemble::Uniform, RandomEnsemble::Multinomial] {
            for exponent in [KrausExponent::Printed, KrausExponent::Modes] {
                let c = Curve::QuantumBound { alpha, ensemble, exponent };
                let r = bounds::zero_crossing(|d| c.eval(d), 1e-12, 0.99, tol);
                crossings.push(CrossingRow {
                    curve: c.name(),
                    root: r.as_ref().ok().copied(),
                    error: r.err().map(|e| e.to_string()),
                });
            }
        }
    }
    let summary = BoundsSummary {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        alpha,
        delta_alpha_quadrature: bounds::delta_alpha(alpha)?,
        delta_alpha_bessel: bounds::delta_alpha_bessel(alpha)?,
        files: files.clone(),
        crossings,
    };
    let mut json = serde_json::to_string_pretty(&summary).map_err(Error::from)?;
    json.push('\n');
    write_file(&dir.join("bounds_summary.json"), json.as_bytes())?;
    let mut s = format!(
        "Delta_alpha({alpha}) quadrature {} bessel {}\n",
        bounds::format_sig12(summary.delta_alpha_quadrature),
        bounds::format_sig12(summary.delta_alpha_bessel)
    );
    for name in &files {
        s.push_str(&format!("wrote {}\n", dir.join(name).display()));
    }
    for c in &summary.crossings {
        match c.root {
            Some(r) => s.push_str(&format!("zero crossing {}: {}\n", c.curve, bounds::format_sig12(r))),
            None => s.push_str(&format!("zero crossing {}: none\n", c.curve)),
        }
    }
    Ok(Outcome { stdout: s, exit: 0 })
}

#[derive(Serialize)]
struct CheckResult {
    check: String,
    passed: bool,
    detail: serde_json::Value,
}

#[derive(Serialize)]
struct OracleReport {
    tool_version: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    input_digests: BTreeMap<String, String>,
    fault_injected: bool,
    checks: Vec<CheckResult>,
    violations: usize,
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn cmd_oracle(f: &Flags, digests: &mut BTreeMap<String, String>) -> CliResult<Outcome> {
    let tol = f.tol.unwrap_or(1e-10);
    let gamma = f.gamma.unwrap_or(0.3);
    let seed = f.seed.unwrap_or(0);
    let fault = f.inject_fault.unwrap_or(false);
    let trials = f.trials.unwrap_or(100);
    let fc = match &f.code {
        Some(path) => {
            let bytes = fs::read(path)?;
            digests.insert("code".into(), digest(&bytes));
            let code = ClassicalCode::from_json(std::str::from_utf8(&bytes).map_err(|e| invalid(e.to_string()))?)?;
            let k = f.k.unwrap_or(2);
            let p = Partition::new(code.len(), k, PartitionPolicy::Sequential)?;
            Some(fock::build_fock_code(code, p, f.t)?)
        }
        None => None,
    };
    let shape = match &fc {
        Some(fc) => fc.shape(),
        None => shape_of(f)?,
    };
    let default_checks = if fc.is_some() { "closed_form,identify,fidelity" } else { "trace,completeness" };
    let checks = f.checks.clone().unwrap_or_else(|| default_checks.to_string());
    let need_code = |name: &str| {
        fc.as_ref().ok_or_else(|| invalid(format!("check {name} needs --code")))
    };
    let mut results = Vec::new();
    for check in checks.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match check {
            "trace" => {
                let ts: Vec<u32> = match f.t {
                    Some(t) => vec![t],
                    None => (0..=shape.n).collect(),
                };
                for t in ts {
                    let rep = oracle::check_trace_preserving_with(shape, t, gamma, trials as usize, seed, fault.then_some(1.05))?;
                    results.push(CheckResult {
                        check: format!("trace_preserving_t{t}"),
                        passed: rep.max_deviation <= tol,
                        detail: to_value(&rep),
                    });
                }
            }
            "completeness" => {
                let dev = oracle::check_completeness(shape, gamma)?;
                results.push(CheckResult {
                    check: "completeness".into(),
                    passed: dev <= tol,
                    detail: serde_json::json!({ "max_deviation": dev }),
                });
            }
            "closed_form" => {
                let fc = need_code(check)?;
                let t = f.t.unwrap_or(1).min(shape.n);
                let p = bounds::p_loss(&bounds::ChannelParams::new(gamma, shape.n, t)?);
                let mut o = oracle::CodeOracle::new(fc, gamma, t)?;
                if fault {
                    o.corrupt_amplitude(0, 1.05)?;
                }
                let mut worst_rel = 0.0f64;
                let mut worst_off = 0.0f64;
                let orth = certify::orthogonality_check(fc, t)?.holds();
                for r in loss_patterns(shape.q, t) {
                    for i in 0..fc.k() {
                        let closed = certify::diag_expectation(fc, i, &r, gamma, p)? * p;
                        let dense = o.inner(i, i, &r, &r)?.re;
                        worst_rel = worst_rel.max((closed - dense).abs() / dense.abs().max(1e-300));
                    }
                }
                if orth {
                    for r in o.patterns() {
                        for r2 in o.patterns() {
                            for i in 0..fc.k() {
                                for j in 0..fc.k() {
                                    if i != j || r != r2 {
                                        worst_off = worst_off.max(o.inner(i, j, r, r2)?.norm());
                                    }
                                }
                            }
                        }
                    }
                }
                results.push(CheckResult {
                    check: "closed_form_vs_dense".into(),
                    passed: worst_rel <= tol && worst_off <= 1e-12,
                    detail: serde_json::json!({
                        "t": t, "max_relative_diag_error": worst_rel,
                        "max_off_term": worst_off, "orthogonality_holds": orth
                    }),
                });
            }
            "identify" => {
                let fc = need_code(check)?;
                let t = f.t.unwrap_or(1).min(shape.n);
                let rep = oracle::identification_sim(fc, t, gamma, trials, seed)?;
                let within = (rep.empirical_leq_t_fraction - rep.p_loss).abs() <= 3.0 * rep.binomial_sigma.max(1e-15);
                results.push(CheckResult {
                    check: "identification".into(),
                    passed: rep.correct_id_rate_given_leq_t == 1.0 && within,
                    detail: to_value(&rep),
                });
            }
            "fidelity" => {
                let fc = need_code(check)?;
                let t = f.t.unwrap_or(1).min(shape.n);
                let rep = oracle::recovery_fidelity(fc, t, gamma)?;
                let cert = certify::deformation_bound(
                    fc,
                    t,
                    gamma,
                    LambdaMode::EmpiricalCodeMean,
                    f.cap_patterns.unwrap_or(certify::DEFAULT_PATTERN_CAP),
                )?;
                // Reported, not gated.
                results.push(CheckResult {
                    check: "recovery_fidelity".into(),
                    passed: true,
                    detail: serde_json::json!({
                        "fidelity": rep.fidelity, "eps_certified": cert.eps_certified,
                        "one_minus_2eps2": 1.0 - 2.0 * cert.eps_certified.powi(2),
                        "branches": rep.branches, "branches_omitted": rep.branches_omitted,
                        "proxy": "maximally entangled code state"
                    }),
                });
            }
            other => return Err(invalid(format!("unknown oracle check {other:?}"))),
        }
    }
    let violations = results.iter().filter(|r| !r.passed).count();
    let report = OracleReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        input_digests: digests.clone(),
        fault_injected: fault,
        checks: results,
        violations,
    };
    let dir = f.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut json = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    json.push('\n');
    write_file(&dir.join("oracle_report.json"), json.as_bytes())?;
    let mut s = String::new();
    for c in &report.checks {
        s.push_str(&format!("{} {}\n", if c.passed { "ok  " } else { "FAIL" }, c.check));
    }
    s.push_str(&format!("{violations} violation(s); report in {}\n", dir.join("oracle_report.json").display()));
    Ok(Outcome { stdout: s, exit: if violations > 0 { EXIT_ORACLE } else { 0 } })
}

fn load_config(path: &Path, digests: &mut BTreeMap<String, String>) -> CliResult<Flags> {
    let bytes = fs::read(path)?;
    digests.insert("config".into(), digest(&bytes));
    serde_json::from_slice(&bytes).map_err(|e| invalid(format!("config {}: {e}", path.display())))
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let start = Instant::now();
    let mut digests = BTreeMap::new();
    let result = (|| {
        let base = match &cli.config {
            Some(p) => load_config(p, &mut digests)?,
            None => Flags::default(),
        };
        match cli.command {
            Command::Sample(f) => cmd_sample(&f.or(base)),
            Command::Greedy(f) => cmd_greedy(&f.or(base)),
            Command::Certify(f) => cmd_certify(&f.or(base), &mut digests),
            Command::Bounds(f) => cmd_bounds(&f.or(base)),
            Command::Oracle(f) => cmd_oracle(&f.or(base), &mut digests),
        }
    })();
    let code = match result {
        Ok(out) => {
            print!("{}", out.stdout);
            out.exit
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    };
    eprintln!("wallclock {:.3}s", start.elapsed().as_secs_f64());
    code
}

/// Parses `args` (including the program name) and runs.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
