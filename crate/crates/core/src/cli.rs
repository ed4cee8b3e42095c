//! Command-line front end.
//!
//! Exit codes: 0 success or feasible, 2 infeasible or failed check, 3 invalid
//! input, 4 numerical failure.

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::automaton::{count_walks, sample_walk_with};
use crate::error::{Error, Result};
use crate::io::{certificate_to_json, parse_certificate, parse_system_unchecked, read_system, system_to_json, write_trace, Certificate};
use crate::l1cert::{certify_l1, certify_l1_stability, check_l1_certificate, check_l1_stability, L1Options, L1Outcome, StabilityOutcome};
use crate::l2cert::{certify_l2, certify_l2_stability, check_l2_certificate, check_l2_stability, L2Options, L2Outcome, L2StabilityOutcome};
use crate::models::{build_virus_example, validate_system, BShape, SystemDescription, SystemKind, VirusParams};
use crate::report::CheckReport;
use crate::simulate::{
    empirical_gain, impulse_input, lyapunov_decrease_check, random_input, simulate, worst_case_l1_lower_bound,
    worst_case_l2_lower_bound, CertificateRef, GainKind,
};
use crate::tolerances::WALK_CAP;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "conecert", version, about = "Gain certificates for switched linear systems")]
struct Cli {
    /// Worker threads for walk enumeration (default: all cores).
    #[arg(long, global = true, env = "CONECERT_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CertKind {
    L1,
    L2,
    Stability,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InputKind {
    Impulse,
    Random,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleKind {
    L1,
    L2,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a system file and list errors and warnings.
    Validate { path: PathBuf },
    /// Compute a certificate.
    Certify {
        kind: CertKind,
        path: PathBuf,
        /// Strictness margin of the certificate inequalities.
        #[arg(long)]
        margin: Option<f64>,
        /// Tolerance of the self-check run on the result (default: margin / 2).
        #[arg(long)]
        tol: Option<f64>,
        /// Upper end of the γ search (l2).
        #[arg(long)]
        gamma_max: Option<f64>,
        /// Relative width at which γ bisection stops (l2).
        #[arg(long)]
        gamma_tol: Option<f64>,
        /// Iteration cap per feasibility attempt (l2).
        #[arg(long)]
        max_iters: Option<usize>,
        /// Rescale inputs by this factor while solving (l2); defaults to the ratio of input to state column norms.
        #[arg(long)]
        input_scale: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a certificate against a system.
    Check {
        system: PathBuf,
        cert: PathBuf,
        /// Tolerance (default: the certificate's margin / 2).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Simulate along a random admissible walk.
    Simulate {
        system: PathBuf,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Start node name (default: the first node).
        #[arg(long)]
        start: Option<String>,
        #[arg(long, value_enum, default_value_t = InputKind::Impulse)]
        input: InputKind,
        /// Impulse channel, 1-based.
        #[arg(long, default_value_t = 1)]
        channel: usize,
        #[arg(long)]
        cert: Option<PathBuf>,
        /// CSV trace output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-horizon brute-force lower bound on the gain.
    Oracle {
        system: PathBuf,
        #[arg(long)]
        horizon: usize,
        #[arg(long, value_enum)]
        kind: OracleKind,
    },
    /// Write a built-in example system.
    Example {
        name: String,
        /// Country C quarantine level.
        #[arg(long)]
        kc: Option<f64>,
        /// Country B quarantine level.
        #[arg(long)]
        kb: Option<f64>,
        /// Shape of the input matrix: `column` (one shared input) or `diag`.
        #[arg(long)]
        b_shape: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INVALID
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// human-readable output to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_INVALID;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: thread pool: {e}");
            return EXIT_INVALID;
        }
    };
    // Output is buffered inside the pool and flushed afterwards.
    let mut buffer = Vec::new();
    let result = pool.install(|| dispatch(cli.command, &mut buffer));
    let _ = out.write_all(&buffer);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Validate { path } => cmd_validate(&path, out),
        Command::Certify { kind, path, margin, tol, gamma_max, gamma_tol, max_iters, input_scale, out: dest } => {
            cmd_certify(kind, &path, CertifyFlags { margin, tol, gamma_max, gamma_tol, max_iters, input_scale }, dest.as_deref(), out)
        }
        Command::Check { system, cert, tol } => cmd_check(&system, &cert, tol, out),
        Command::Simulate { system, steps, seed, start, input, channel, cert, out: dest } => {
            cmd_simulate(&system, steps, seed, start.as_deref(), input, channel, cert.as_deref(), dest.as_deref(), out)
        }
        Command::Oracle { system, horizon, kind } => cmd_oracle(&system, horizon, kind, out),
        Command::Example { name, kc, kb, b_shape, out: dest } => cmd_example(&name, kc, kb, b_shape.as_deref(), dest.as_deref(), out),
    }
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> Result<i32> {
    let s = parse_system_unchecked(&std::fs::read_to_string(path)?)?;
    let report = validate_system(&s);
    write!(out, "{report}")?;
    if report.is_valid() {
        writeln!(out, "valid {} system: n={} q={} r={}, {} modes, {} nodes, {} edges", s.kind, s.dims.n, s.dims.q, s.dims.r, s.modes.len(), s.graph.node_count(), s.graph.edges().len())?;
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_INVALID)
    }
}

struct CertifyFlags {
    margin: Option<f64>,
    tol: Option<f64>,
    gamma_max: Option<f64>,
    gamma_tol: Option<f64>,
    max_iters: Option<usize>,
    input_scale: Option<f64>,
}

fn l2_options(f: &CertifyFlags) -> L2Options {
    let mut o = L2Options { margin: f.margin, gamma_max: f.gamma_max, ..L2Options::default() };
    if let Some(t) = f.gamma_tol {
        o.gamma_tol = t;
    }
    if let Some(m) = f.max_iters {
        o.max_iterations = m;
    }
    o.input_scale = f.input_scale;
    o
}

fn check_against(s: &SystemDescription, cert: &Certificate, tol: f64) -> Result<CheckReport> {
    match cert {
        Certificate::L1(c) => check_l1_certificate(s, c, tol),
        Certificate::L2(c) => check_l2_certificate(s, c, tol),
        Certificate::L1Stability(c) => check_l1_stability(s, c, tol),
        Certificate::L2Stability(c) => check_l2_stability(s, c, tol),
    }
}

fn cmd_certify(kind: CertKind, path: &Path, flags: CertifyFlags, dest: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let s = read_system(path)?;
    let l1_opts = || {
        let mut o = L1Options::default();
        if let Some(m) = flags.margin {
            o.margin = m;
        }
        o
    };
    let cert = match (kind, s.kind) {
        (CertKind::L1, SystemKind::Pss) => match certify_l1(&s, l1_opts())? {
            L1Outcome::Certified(c) => Some(Certificate::L1(c)),
            L1Outcome::Infeasible => None,
        },
        (CertKind::L1, SystemKind::Gss) => return Err(Error::input("l1 certification requires a pss system")),
        (CertKind::L2, _) => match certify_l2(&s, &l2_options(&flags))? {
            L2Outcome::Certified(c) => Some(Certificate::L2(c)),
            L2Outcome::Infeasible => None,
        },
        (CertKind::Stability, SystemKind::Pss) => match certify_l1_stability(&s, l1_opts())? {
            StabilityOutcome::Stable(c) => Some(Certificate::L1Stability(c)),
            StabilityOutcome::Infeasible => None,
        },
        (CertKind::Stability, SystemKind::Gss) => match certify_l2_stability(&s, &l2_options(&flags))? {
            L2StabilityOutcome::Stable(c) => Some(Certificate::L2Stability(c)),
            L2StabilityOutcome::NotFound => None,
        },
    };
    let Some(cert) = cert else {
        match kind {
            CertKind::L1 | CertKind::Stability if s.kind == SystemKind::Pss => writeln!(out, "infeasible: the linear program has no solution")?,
            _ => writeln!(out, "infeasible: no certificate found (the projection search is one-sided; try --input-scale or --max-iters)")?,
        }
        return Ok(EXIT_INFEASIBLE);
    };
    match cert.gamma() {
        Some(g) => writeln!(out, "gamma = {g}")?,
        None => writeln!(out, "stable")?,
    }
    writeln!(out, "margin = {}", cert.margin())?;
    let tol = flags.tol.unwrap_or(cert.margin() / 2.0);
    let report = check_against(&s, &cert, tol)?;
    writeln!(out, "self-check at tol {tol}: {}", if report.passed() { "pass" } else { "FAIL" })?;
    if let Some(dest) = dest {
        std::fs::write(dest, certificate_to_json(&s, &cert))?;
        writeln!(out, "wrote {}", dest.display())?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_NUMERICAL })
}

fn cmd_check(system: &Path, cert_path: &Path, tol: Option<f64>, out: &mut dyn Write) -> Result<i32> {
    let s = read_system(system)?;
    let cert = parse_certificate(&s, &std::fs::read_to_string(cert_path)?)?;
    let compatible = match &cert {
        Certificate::L1(_) | Certificate::L1Stability(_) => s.kind == SystemKind::Pss,
        _ => true,
    };
    if !compatible {
        return Err(Error::input(format!("a {} certificate does not apply to a {} system", cert.kind(), s.kind)));
    }
    let tol = tol.unwrap_or(cert.margin() / 2.0);
    if !(tol > 0.0) {
        return Err(Error::input("check tolerance must be positive; pass --tol"));
    }
    let report = check_against(&s, &cert, tol)?;
    write!(out, "{report}")?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_INFEASIBLE })
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    system: &Path,
    steps: usize,
    seed: u64,
    start: Option<&str>,
    input: InputKind,
    channel: usize,
    cert_path: Option<&Path>,
    dest: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32> {
    let s = read_system(system)?;
    let start = match start {
        Some(name) => s.graph.node_index(name).ok_or_else(|| Error::input(format!("unknown start node '{name}'")))?,
        None => 0,
    };
    if channel == 0 || channel > s.dims.q {
        return Err(Error::input(format!("channel must be in 1..={}", s.dims.q)));
    }
    let cert = cert_path.map(|p| parse_certificate(&s, &std::fs::read_to_string(p)?)).transpose()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let walk = sample_walk_with(&s.graph, start, steps, &mut rng)?;
    let w = match input {
        InputKind::Impulse => impulse_input(s.dims.q, steps, channel - 1, 0),
        InputKind::Random => match s.kind {
            SystemKind::Pss => random_input(&mut rng, s.dims.q, steps, 0.0, 1.0),
            SystemKind::Gss => random_input(&mut rng, s.dims.q, steps, -1.0, 1.0),
        },
    };
    let traj = simulate(&s, &walk, &w, &vec![0.0; s.dims.n])?;
    writeln!(out, "walk: {}", walk.describe(&s.graph, &s.mode_names()))?;
    writeln!(out, "final state: {:?}", traj.x.last().unwrap())?;

    let gain_kind = match (&cert, s.kind) {
        (Some(Certificate::L2(_)), _) | (Some(Certificate::L2Stability(_)), _) | (None, SystemKind::Gss) => GainKind::L2,
        _ => GainKind::L1,
    };
    let gain = if steps > 0 { Some(empirical_gain(&traj, gain_kind)?) } else { None };
    if let Some(g) = gain {
        let label = match gain_kind {
            GainKind::L1 => "l1 ratio",
            GainKind::L2 => "l2 squared ratio",
        };
        writeln!(out, "empirical {label}: {g}")?;
    }

    let mut code = EXIT_OK;
    let mut values = None;
    if let Some(cert) = &cert {
        let cref = match cert {
            Certificate::L1(c) => CertificateRef::L1(c),
            Certificate::L2(c) => CertificateRef::L2(c),
            _ => return Err(Error::input("simulation needs a gain certificate (l1 or l2)")),
        };
        let report = lyapunov_decrease_check(&s, cref, &traj)?;
        match report.min_slack() {
            Some(m) => writeln!(out, "minimum Lyapunov slack: {m}")?,
            None => writeln!(out, "minimum Lyapunov slack: none (trajectory identically zero)")?,
        }
        let gamma = cert.gamma().unwrap();
        let within = gain.is_none_or(|g| g <= gamma);
        writeln!(out, "decrease check: {}; empirical gain {} gamma = {gamma}", if report.passed() { "pass" } else { "FAIL" }, if within { "<=" } else { ">" })?;
        if !report.passed() || !within {
            code = EXIT_INFEASIBLE;
        }
        values = Some(report.values);
    }
    if let Some(dest) = dest {
        let file = std::fs::File::create(dest)?;
        write_trace(file, &s, &traj, values.as_deref())?;
        writeln!(out, "wrote {}", dest.display())?;
    }
    Ok(code)
}

/// Longest horizon whose walk count from every start stays within the cap.
fn suggest_horizon(s: &SystemDescription) -> usize {
    let mut h = 0;
    loop {
        let total: u128 = (0..s.graph.node_count()).map(|v| count_walks(&s.graph, v, h + 1).unwrap_or(u128::MAX)).sum();
        if total > WALK_CAP as u128 || h > 10_000 {
            return h;
        }
        h += 1;
    }
}

fn cmd_oracle(system: &Path, horizon: usize, kind: OracleKind, out: &mut dyn Write) -> Result<i32> {
    let s = read_system(system)?;
    let result = match kind {
        OracleKind::L1 => worst_case_l1_lower_bound(&s, horizon),
        OracleKind::L2 => worst_case_l2_lower_bound(&s, horizon),
    };
    let r = match result {
        Err(Error::EnumerationCap { cap }) => {
            return Err(Error::Numerical(format!(
                "more than {cap} walks; retry with --horizon {} or less",
                suggest_horizon(&s)
            )))
        }
        other => other?,
    };
    match kind {
        OracleKind::L1 => writeln!(out, "l1 lower bound (L={horizon}): {}", r.value)?,
        OracleKind::L2 => writeln!(out, "l2 lower bound (L={horizon}): {} (squared {})", r.value, r.value * r.value)?,
    }
    writeln!(out, "walks evaluated: {}", r.walks)?;
    if let Some(wit) = &r.witness {
        writeln!(out, "maximizing walk: {}", wit.walk.describe(&s.graph, &s.mode_names()))?;
        if let (Some(k), Some(t)) = (wit.channel, wit.time) {
            writeln!(out, "impulse channel {} at t = {t}", k + 1)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_example(name: &str, kc: Option<f64>, kb: Option<f64>, b_shape: Option<&str>, dest: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    if name != "virus" {
        return Err(Error::input(format!("unknown example '{name}' (available: virus)")));
    }
    let mut params = VirusParams::default();
    if let Some(v) = kc {
        params.k_c_quarantine = v;
    }
    if let Some(v) = kb {
        params.k_b_quarantine = v;
    }
    if let Some(shape) = b_shape {
        params.b_shape = shape.parse::<BShape>()?;
    }
    let text = system_to_json(&build_virus_example(params)?);
    match dest {
        Some(dest) => {
            std::fs::write(dest, text)?;
            writeln!(out, "wrote {}", dest.display())?;
        }
        None => writeln!(out, "{text}")?,
    }
    Ok(EXIT_OK)
}
