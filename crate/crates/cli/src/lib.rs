//! Command line driver: each subcommand runs one stage of the pipeline and
//! writes its artifacts into `--out`.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 for numerical
//! failures. The error name is printed on standard error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sinetype::io::{self as sio, fmt_f64};
use sinetype::model::{MainPart, SampleGrid, ThetaFunction};
use sinetype::reconstruction::{build_moment_system, complete_zeros, invert_to_tail, product_eval_ratio};
use sinetype::stability::{empirical_lipschitz, parseval_l2, BallSpec};
use sinetype::sturm_liouville::{
    spectrum_from_zeros, spectral_stability_experiment, theta_from_series, Profile, Spectrum,
};
use sinetype::zeros::{localize_zeros, winding_count, ZeroSequence};
use sinetype::{Error, Rect, Result, C64};

#[derive(Parser, Debug)]
#[command(name = "sinetype", version, about = "Zeros, reconstruction and stability experiments for sine-type functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Localize z_n for n = 1−N..=nmax and write zeros.csv.
    Zeros {
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long, default_value_t = 200)]
        nmax: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Recover the tail from zeros.csv; writes tail_recovered.json and recon_report.csv.
    Reconstruct {
        /// Function JSON giving the main part. A nonzero tail in it is used
        /// as the reference for per-mode errors.
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long)]
        zeros: PathBuf,
        /// Mode cutoff M of the recovered tail.
        #[arg(long)]
        modes: usize,
        /// Number K of positive-index zeros used (all by default).
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Find the first N zeros from those with n ≥ 1; writes zeros_completed.csv and tail_recovered.json.
    Complete {
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long)]
        zeros: PathBuf,
        #[arg(long)]
        modes: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Empirical Lipschitz constants; writes stability_records.csv and c_r_summary.csv.
    Stability {
        /// Ball radii, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        modes: usize,
        #[arg(long, default_value_t = 128)]
        nmax: i64,
        #[arg(long, value_enum, default_value_t = ProfileArg::N1)]
        profile: ProfileArg,
        /// Envelope exponent of the sampled residuals.
        #[arg(long, default_value_t = 1.0)]
        decay: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Potential against spectral distance; writes sl_experiment.csv.
    SturmLiouville {
        /// Spectrum CSV (n, re, im) of the perturbed problem.
        #[arg(long, conflicts_with = "series")]
        spectrum_a: Option<PathBuf>,
        /// Spectrum CSV of the reference problem (λ_n = n² by default).
        #[arg(long, requires = "spectrum_a")]
        spectrum_b: Option<PathBuf>,
        /// Series JSON {"profile", "modes"}; the spectra are computed.
        #[arg(long)]
        series: Option<PathBuf>,
        /// Scale factors applied to the series, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        scale: Vec<f64>,
        #[arg(long, value_enum, default_value_t = ProfileArg::N1)]
        profile: ProfileArg,
        #[arg(long, default_value_t = 16)]
        modes: usize,
        /// Eigenvalues computed per generated spectrum.
        #[arg(long, default_value_t = 64)]
        len: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant suite on a function; nonzero exit on any failure.
    Verify {
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long, default_value_t = 100)]
        nmax: i64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProfileArg {
    #[value(name = "N1", alias = "1")]
    N1,
    #[value(name = "N0", alias = "0")]
    N0,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::N1 => Profile::N1,
            ProfileArg::N0 => Profile::N0,
        }
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match dispatch(cli.command) {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::ChecksFailed(names)) => {
            eprintln!("error: VerificationFailed: {}", names.join(", "));
            3
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            if e.is_validation() {
                2
            } else {
                3
            }
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("SINETYPE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a pool from an earlier call in the same process stays in place
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

enum Outcome {
    Done,
    ChecksFailed(Vec<String>),
}

fn out_dir(common: &Common) -> Result<&Path> {
    fs::create_dir_all(&common.out).map_err(|e| Error::InvalidInput(format!("{}: {e}", common.out.display())))?;
    Ok(&common.out)
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidInput(e.to_string())
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Zeros { function, nmax, common } => {
            let theta = sio::read_function(&function)?;
            let report = localize_zeros(&theta, nmax)?;
            sio::write_zeros_file(&out_dir(&common)?.join("zeros.csv"), &report.zeros)?;
            println!(
                "{} zeros, head count {}, residual norm {}",
                report.zeros.len(),
                report.head_count,
                fmt_f64(report.zeros.residuals().l2_norm)
            );
        }
        Command::Reconstruct { function, zeros, modes, k, common } => {
            let theta = sio::read_function(&function)?;
            let main = theta.main();
            let zs = sio::read_zeros_file(&zeros, main)?;
            let rec = invert_to_tail(&build_moment_system(&zs, main, modes, k)?)?;
            let dir = out_dir(&common)?;
            sio::write_tail(&dir.join("tail_recovered.json"), &rec.tail)?;
            let mut w = sio::csv_writer(create(&dir.join("recon_report.csv"))?, &["quantity", "mode", "value"])?;
            let mut row = |q: &str, mode: String, v: f64| w.write_record([q.to_string(), mode, fmt_f64(v)]).map_err(csv_err);
            row("residual_norm", String::new(), rec.residual_norm)?;
            row("rhs_norm", String::new(), rec.rhs_norm)?;
            row("m_est", String::new(), rec.frame.m_est)?;
            row("big_m_est", String::new(), rec.frame.big_m_est)?;
            if !theta.tail().is_zero() {
                let m = modes.max(theta.tail().cutoff()) as i64;
                let mut worst: f64 = 0.0;
                for j in -m..=m {
                    let err = (rec.tail.coeff(j) - theta.tail().coeff(j)).norm();
                    worst = worst.max(err);
                    row("mode_abs_error", j.to_string(), err)?;
                }
                row("max_mode_abs_error", String::new(), worst)?;
            }
            w.flush().map_err(csv_err)?;
            println!("residual norm {}, frame ratio {}", fmt_f64(rec.residual_norm), fmt_f64(rec.frame.ratio()));
        }
        Command::Complete { function, zeros, modes, common } => {
            let main = sio::read_function(&function)?.main().clone();
            let zs = sio::read_zeros_file(&zeros, &main)?;
            let partial = positive_part(&zs, &main)?;
            let done = complete_zeros(&partial, &main, modes)?;
            let dir = out_dir(&common)?;
            sio::write_zeros_file(&dir.join("zeros_completed.csv"), &done.zeros)?;
            sio::write_tail(&dir.join("tail_recovered.json"), &done.recovery.tail)?;
            for (i, z) in done.zeros.head().iter().enumerate() {
                println!("z_{} = {} {:+}i", i as i64 + main.first_index(), fmt_f64(z.re), fmt_f64(z.im));
            }
        }
        Command::Stability { r, trials, seed, modes, nmax, profile, decay, common } => {
            let main = Profile::from(profile).main();
            let dir = out_dir(&common)?;
            let mut rec_w = sio::csv_writer(
                create(&dir.join("stability_records.csv"))?,
                &["seed_a", "seed_b", "r", "numerator", "denominator", "ratio"],
            )?;
            let mut sum_w =
                sio::csv_writer(create(&dir.join("c_r_summary.csv"))?, &["r", "trials", "C_r_est", "mean", "stddev"])?;
            let mut fail_w =
                sio::csv_writer(create(&dir.join("stability_failures.csv"))?, &["seed_a", "seed_b", "r", "error"])?;
            for &radius in &r {
                let spec = BallSpec { r: radius, n_max: nmax, decay_exponent: decay };
                let est = empirical_lipschitz(&spec, trials, seed, &main, modes)?;
                for rec in &est.records {
                    let (a, b) = rec.seeds.expect("trial records carry seeds");
                    rec_w
                        .write_record([
                            a.to_string(),
                            b.to_string(),
                            fmt_f64(rec.r),
                            fmt_f64(rec.numerator),
                            fmt_f64(rec.denominator),
                            fmt_f64(rec.ratio),
                        ])
                        .map_err(csv_err)?;
                }
                for ((a, b), name) in &est.failures {
                    fail_w.write_record([a.to_string(), b.to_string(), fmt_f64(radius), name.to_string()]).map_err(csv_err)?;
                }
                sum_w
                    .write_record([
                        fmt_f64(radius),
                        trials.to_string(),
                        fmt_f64(est.c_r_est),
                        fmt_f64(est.mean),
                        fmt_f64(est.stddev),
                    ])
                    .map_err(csv_err)?;
                println!(
                    "r = {radius}: C_r ≈ {}, {} records, {} failures",
                    fmt_f64(est.c_r_est),
                    est.records.len(),
                    est.failures.len()
                );
            }
            for w in [&mut rec_w, &mut sum_w, &mut fail_w] {
                w.flush().map_err(csv_err)?;
            }
        }
        Command::SturmLiouville { spectrum_a, spectrum_b, series, scale, profile, modes, len, common } => {
            let dir = out_dir(&common)?;
            let mut w = sio::csv_writer(create(&dir.join("sl_experiment.csv"))?, &["r", "lhs", "rhs", "ratio", "profile"])?;
            let mut pairs: Vec<(Spectrum, Spectrum, Profile)> = Vec::new();
            if let Some(a) = spectrum_a {
                let a = sio::read_spectrum_file(&a)?;
                let b = match spectrum_b {
                    Some(b) => sio::read_spectrum_file(&b)?,
                    None => Spectrum::unperturbed(a.len()),
                };
                pairs.push((a, b, profile.into()));
            } else if let Some(path) = series {
                let s = sio::read_series(&path)?;
                for &f in &scale {
                    let scaled: Vec<(usize, f64)> = s.pairs().into_iter().map(|(k, a)| (k, a * f)).collect();
                    let theta = theta_from_series(s.profile, &scaled)?;
                    let zs = localize_zeros(&theta, 2 * len as i64 + 1)?.zeros;
                    let spec = spectrum_from_zeros(&zs);
                    sio::write_spectrum(create(&dir.join(format!("spectrum_scale_{f}.csv")))?, &spec)?;
                    pairs.push((spec, Spectrum::unperturbed(len), s.profile));
                }
            } else {
                return Err(Error::InvalidInput("give --spectrum-a or --series".into()));
            }
            for (a, b, p) in &pairs {
                let rep = spectral_stability_experiment(a, b, *p, modes)?;
                let za = sinetype::sturm_liouville::spectrum_to_zeros(a, *p)?;
                let zb = sinetype::sturm_liouville::spectrum_to_zeros(b, *p)?;
                let radius = za.residuals().l2_norm.max(zb.residuals().l2_norm);
                w.write_record([fmt_f64(radius), fmt_f64(rep.lhs), fmt_f64(rep.rhs), fmt_f64(rep.ratio), p.name().to_string()])
                    .map_err(csv_err)?;
                println!("r = {}: ratio {}", fmt_f64(radius), fmt_f64(rep.ratio));
            }
            w.flush().map_err(csv_err)?;
        }
        Command::Verify { function, nmax, common } => {
            let theta = sio::read_function(&function)?;
            let checks = verify_suite(&theta, nmax)?;
            let dir = out_dir(&common)?;
            let mut w = sio::csv_writer(create(&dir.join("verify_report.csv"))?, &["check", "passed", "value", "limit"])?;
            let mut failed = Vec::new();
            for c in &checks {
                w.write_record([c.name.to_string(), c.passed.to_string(), fmt_f64(c.value), fmt_f64(c.limit)])
                    .map_err(csv_err)?;
                println!("{} {}: {} (limit {})", if c.passed { "pass" } else { "FAIL" }, c.name, fmt_f64(c.value), fmt_f64(c.limit));
                if !c.passed {
                    failed.push(c.name.to_string());
                }
            }
            w.flush().map_err(csv_err)?;
            if !failed.is_empty() {
                return Ok(Outcome::ChecksFailed(failed));
            }
        }
    }
    Ok(Outcome::Done)
}

/// The entries with n ≥ 1 as a sequence of its own.
fn positive_part(zs: &ZeroSequence, main: &MainPart) -> Result<ZeroSequence> {
    if zs.first() > 1 {
        return Err(Error::InvalidInput(format!("zeros start at n = {}, need n = 1", zs.first())));
    }
    ZeroSequence::with_first(main, 1, zs.positive().to_vec())
}

struct Check {
    name: &'static str,
    passed: bool,
    value: f64,
    limit: f64,
}

impl Check {
    fn below(name: &'static str, value: f64, limit: f64) -> Self {
        Check { name, passed: value.is_finite() && value <= limit, value, limit }
    }
}

/// Invariants that must hold for every function of the class. Numerical
/// errors inside a check count as failures of that check.
fn verify_suite(theta: &ThetaFunction, nmax: i64) -> Result<Vec<Check>> {
    let main = theta.main();
    let tail = theta.tail();
    let mut checks = Vec::new();

    let est = main.base().verify_sine_type(1.0, SampleGrid::default())?;
    checks.push(Check { name: "sine_type_bounds", passed: !est.flagged, value: est.c_est / est.upper_est, limit: 1e-6 });

    let report = match localize_zeros(theta, nmax) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("localize_zeros: {}: {e}", e.name());
            checks.push(Check { name: "localize_zeros", passed: false, value: f64::NAN, limit: 0.0 });
            return Ok(checks);
        }
    };
    let zs = &report.zeros;
    checks.push(Check::below("localize_zeros", 0.0, 0.0));

    // argument principle on a box well inside the localized range
    let half = ((nmax / 4).max(1) as f64 + 0.5) * main.separation();
    let rect = Rect::centered(C64::new(0.0, 0.0), half, 2.0 * main.separation())?;
    let inside = zs.zeros().iter().filter(|z| rect.contains(**z)).count();
    match winding_count(|z| theta.value(z), &rect) {
        Ok(count) => checks.push(Check::below("winding_matches_zeros", (count as f64 - inside as f64).abs(), 0.0)),
        Err(e) => {
            eprintln!("winding_count: {}: {e}", e.name());
            checks.push(Check { name: "winding_matches_zeros", passed: false, value: f64::NAN, limit: 0.0 });
        }
    }

    let residual = zs
        .zeros()
        .iter()
        .map(|&z| theta.value(z).norm() / (1.0 + main.eval(z, 1).map(|d| d.norm()).unwrap_or(0.0)))
        .fold(0.0, f64::max);
    checks.push(Check::below("zero_residuals", residual, 1e-10));

    let mut worst: f64 = 0.0;
    for i in 0..8 {
        let z = C64::new(0.37 + 1.13 * i as f64, 0.5 - 0.21 * i as f64);
        let exact = theta.value(z);
        match product_eval_ratio(main, zs, z, 0.5, None) {
            Ok(p) => worst = worst.max(((p.value - exact).norm() / exact.norm() - p.tail_bound).max(0.0)),
            Err(e) => {
                eprintln!("product_eval_ratio: {}: {e}", e.name());
                worst = f64::INFINITY;
            }
        }
    }
    checks.push(Check::below("product_within_tail_bound", worst, 1e-8));

    let m = tail.cutoff();
    let recovery = build_moment_system(zs, main, m, None).and_then(|s| invert_to_tail(&s));
    match recovery {
        Ok(rec) => {
            let err = rec.tail.sub(tail).map(|d| d.norm()).unwrap_or(f64::INFINITY);
            checks.push(Check::below("tail_recovery", err, 1e-6 * tail.norm().max(1.0)));
        }
        Err(e) => {
            eprintln!("invert_to_tail: {}: {e}", e.name());
            checks.push(Check { name: "tail_recovery", passed: false, value: f64::NAN, limit: 0.0 });
        }
    }

    match parseval_l2(tail) {
        Ok(p) => checks.push(Check::below("parseval", p.relative_gap(), 1e-4)),
        Err(e) => {
            eprintln!("parseval_l2: {}: {e}", e.name());
            checks.push(Check { name: "parseval", passed: false, value: f64::NAN, limit: 0.0 });
        }
    }

    if main.degree() > 0 {
        let partial = positive_part(zs, main)?;
        match complete_zeros(&partial, main, m.max(1)) {
            Ok(done) => {
                let gap = done.zeros.head().iter().zip(zs.head()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                checks.push(Check::below("head_completion", gap, 1e-6));
            }
            Err(e) => {
                eprintln!("complete_zeros: {}: {e}", e.name());
                checks.push(Check { name: "head_completion", passed: false, value: f64::NAN, limit: 0.0 });
            }
        }
    }
    Ok(checks)
}
