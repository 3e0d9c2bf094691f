use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use metaplectic::classify::{self, cohen_class_test, shift_invertibility_test, spectrogram_test, TOL_CLASSIFY};
use metaplectic::engine::{self, DiscreteSignal, Grid1D, TfGrid};
use metaplectic::io;
use metaplectic::kernels::{fourier_of_chirp, tau_kernel, theta_m};
use metaplectic::linalg::BlockMatrix4d;
use metaplectic::program::MetaplecticProgram;
use metaplectic::quant::{dyadic_lambdas, lp_norm_probe, ratio_variation};
use metaplectic::{run_suite, Error};
use serde::Serialize;

/// Metaplectic time-frequency distributions: classification, transforms, kernels, checks.
#[derive(Parser)]
#[command(name = "metaplectic", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// number of samples (power of two in [8, 4096])
    #[arg(long = "N")]
    n: Option<usize>,
    /// period of the signal window
    #[arg(long = "T")]
    t: Option<f64>,
}

impl GridArgs {
    fn grid(&self) -> metaplectic::Result<Grid1D> {
        let d = Grid1D::default_grid();
        let n = self.n.unwrap_or(d.n);
        if n > 4096 {
            return Err(Error::InvalidParameter(format!("N = {n} exceeds 4096")));
        }
        Grid1D::new(n, self.t.unwrap_or(d.t))
    }

    /// Explicit overrides must agree with the grid a signal was stored on.
    fn check(&self, g: &Grid1D) -> metaplectic::Result<()> {
        if self.n.is_some_and(|n| n != g.n) || self.t.is_some_and(|t| t != g.t) {
            return Err(Error::GridMismatch(format!("signal grid is N = {}, T = {}", g.n, g.t)));
        }
        Ok(())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify a 4d x 4d symplectic matrix (Cohen class, shift-invertibility, spectrogram windows)
    Classify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compute a time-frequency representation of signal CSVs
    Transform(TransformArgs),
    /// Describe or sample a chirp/delta kernel
    Kernel {
        #[arg(value_enum)]
        kind: KernelKind,
        /// symmetric matrix JSON (chirp-ft, theta)
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        tau: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        ppm: bool,
    },
    /// Run a verification suite; exit 1 if any case fails
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the dilation probe for an Lp -> Lq bound
    Probe {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = -6, allow_hyphen_values = true)]
        lambda_min: i32,
        #[arg(long, default_value_t = 6, allow_hyphen_values = true)]
        lambda_max: i32,
        /// program JSON (default: the Wigner program)
        #[arg(long)]
        program: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Write a sampled Gaussian e^{-πa(x-c)²} e^{2πiωx} as a signal CSV
    Gaussian {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        omega: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Rep {
    Stft,
    Wigner,
    Tau,
    Ba,
    Metaplectic,
    Genspec,
    Metaspec,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelKind {
    ChirpFt,
    Theta,
    Tau,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(value_enum)]
    rep: Rep,
    /// signal f (CSV with a sidecar JSON)
    f: PathBuf,
    /// second signal g (default: f)
    g: Option<PathBuf>,
    /// analysis window; defaults to f
    #[arg(long)]
    window: Option<PathBuf>,
    /// second window ψ for genspec/metaspec; defaults to --window
    #[arg(long)]
    window2: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    /// 2d x 2d change of variables (ba)
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// program JSON (metaplectic, metaspec)
    #[arg(long)]
    program: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    ppm: bool,
}

/// Exit codes: 0 ok, 1 verification failure, 2 input error, 3 precondition failure.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(err) if err.is_precondition() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cmd: Command) -> anyhow::Result<u8> {
    match cmd {
        Command::Classify { matrix, tol, out } => classify_cmd(&matrix, tol.unwrap_or(TOL_CLASSIFY), &out),
        Command::Transform(args) => transform_cmd(&args),
        Command::Kernel { kind, matrix, tau, grid, out, ppm } => kernel_cmd(kind, matrix.as_deref(), tau, &grid, &out, ppm),
        Command::Verify { suite, seed, out } => verify_cmd(&suite, seed, out.as_deref()),
        Command::Probe { p, q, lambda_min, lambda_max, program, out } => {
            probe_cmd(p, q, lambda_min, lambda_max, program.as_deref(), &out)
        }
        Command::Gaussian { a, c, omega, grid, out } => {
            let s = engine::gaussian(&grid.grid()?, a, c, omega);
            io::write_signal(&out, &s)?;
            println!("wrote {}", out.display());
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct ClassificationReport {
    d: usize,
    cohen: classify::CohenReport,
    shift_invertibility: Option<classify::ShiftInvertibility>,
    spectrogram: Option<classify::SpectrogramReport>,
}

fn classify_cmd(path: &Path, tol: f64, out: &Path) -> anyhow::Result<u8> {
    let a = BlockMatrix4d::new(io::read_matrix(path)?)?;
    let cohen = cohen_class_test(&a, tol)?;
    let (shift, spec) = if cohen.is_cohen {
        (Some(shift_invertibility_test(&a, tol)?), Some(spectrogram_test(&a, tol)?))
    } else {
        (None, None)
    };
    let report = ClassificationReport { d: a.d(), cohen, shift_invertibility: shift, spectrogram: spec };
    std::fs::create_dir_all(out)?;
    let file = out.join("classification.json");
    io::write_json(&file, &report)?;
    println!("d = {}", report.d);
    println!("cohen: {}", report.cohen.is_cohen);
    for v in &report.cohen.violations {
        println!("  violated: {v}");
    }
    if let Some(s) = &report.shift_invertibility {
        println!("shift_invertible: {} (det E_A = {:.6})", s.is_shift_invertible, s.det);
    }
    if let Some(s) = &report.spectrogram {
        println!("spectrogram: {}", s.is_spectrogram);
        if let Some(r) = &s.failure_reason {
            println!("  reason: {r:?}");
        }
    }
    println!("report: {}", file.display());
    Ok(0)
}

fn load(path: &Path, grid: &GridArgs) -> anyhow::Result<DiscreteSignal> {
    let s = io::read_signal(path).with_context(|| format!("reading {}", path.display()))?;
    grid.check(&s.grid)?;
    Ok(s)
}

fn need<T>(v: Option<T>, flag: &str) -> anyhow::Result<T> {
    v.ok_or_else(|| anyhow!(Error::InvalidParameter(format!("{flag} is required for this representation"))))
}

fn transform_cmd(args: &TransformArgs) -> anyhow::Result<u8> {
    let f = load(&args.f, &args.grid)?;
    let g = match &args.g {
        Some(p) => load(p, &args.grid)?,
        None => f.clone(),
    };
    let phi = match &args.window {
        Some(p) => load(p, &args.grid)?,
        None => f.clone(),
    };
    let psi = match &args.window2 {
        Some(p) => load(p, &args.grid)?,
        None => phi.clone(),
    };
    let program = || -> anyhow::Result<MetaplecticProgram> { Ok(io::read_program(&need(args.program.clone(), "--program")?)?) };
    let (stem, grid): (&str, TfGrid) = match args.rep {
        Rep::Stft => ("stft", engine::stft(&f, &phi)?),
        Rep::Wigner => ("wigner", engine::wigner(&f, &g)?),
        Rep::Tau => {
            let tau = need(args.tau, "--tau")?;
            ("tau", engine::tau_wigner(&f, &g, tau)?.with_param("tau", tau))
        }
        Rep::Ba => {
            let m = io::read_matrix(&need(args.matrix.clone(), "--matrix")?)?;
            ("ba", engine::ba_distribution(&f, &g, &m)?)
        }
        Rep::Metaplectic => ("metaplectic", engine::metaplectic_wigner(&program()?, &f, &g)?),
        Rep::Genspec => ("genspec", engine::generalized_spectrogram(&f, &g, &phi, &psi)?),
        Rep::Metaspec => {
            let p = program()?;
            ("metaspec", engine::metaplectic_spectrogram(&f, &g, &phi, &psi, &p, &p)?)
        }
    };
    let files = io::write_tf_grid(&args.out, stem, &grid.labeled(stem))?;
    println!("wrote {} and {}", files.re.display(), files.im.display());
    if args.ppm {
        let p = args.out.join(format!("{stem}.ppm"));
        io::write_ppm(&p, &io::read_tf_grid(&args.out, stem)?)?;
        println!("wrote {}", p.display());
    }
    Ok(0)
}

fn kernel_cmd(
    kind: KernelKind,
    matrix: Option<&Path>,
    tau: Option<f64>,
    grid: &GridArgs,
    out: &Path,
    ppm: bool,
) -> anyhow::Result<u8> {
    std::fs::create_dir_all(out)?;
    match kind {
        KernelKind::ChirpFt | KernelKind::Theta => {
            let m = io::read_matrix(need(matrix, "--matrix")?)?;
            let (k, name) = match kind {
                KernelKind::ChirpFt => (fourier_of_chirp(&m)?, "chirp_ft"),
                _ => (theta_m(&m)?, "theta"),
            };
            let file = out.join(format!("{name}.json"));
            io::write_json(&file, &k)?;
            println!("{}", serde_json::to_string_pretty(&k)?);
            println!("wrote {}", file.display());
        }
        KernelKind::Tau => {
            let tau = need(tau, "--tau")?;
            let k = tau_kernel(tau, 1)?;
            let gr = grid.grid()?;
            let sampled = TfGrid::from_fn([gr.axis(), gr.freq_axis()], |x, xi| k.eval(&[x], &[xi]))
                .labeled("tau_kernel")
                .with_param("tau", tau);
            let files = io::write_tf_grid(out, "tau_kernel", &sampled)?;
            println!("wrote {}", files.re.display());
            if ppm {
                io::write_ppm(&out.join("tau_kernel.ppm"), &sampled)?;
            }
        }
    }
    Ok(0)
}

fn verify_cmd(suite: &str, seed: u64, out: Option<&Path>) -> anyhow::Result<u8> {
    let report = run_suite(suite, seed)?;
    match out {
        Some(p) => {
            std::fs::write(p, report.to_json() + "\n")?;
            eprint!("{}", report.summary());
        }
        None => print!("{}", report.to_json() + "\n"),
    }
    let failed = report.failures();
    if failed.is_empty() {
        return Ok(0);
    }
    eprintln!("failing cases:");
    for c in failed {
        eprintln!("  {} measured {:.3e} tolerance {:.3e}", c.id, c.measured, c.tolerance);
    }
    Ok(1)
}

fn probe_cmd(p: f64, q: f64, lo: i32, hi: i32, program: Option<&Path>, out: &Path) -> anyhow::Result<u8> {
    if lo > hi {
        bail!(Error::InvalidParameter(format!("empty lambda range 2^{lo}..2^{hi}")));
    }
    let prog = match program {
        Some(path) => io::read_program(path)?,
        None => MetaplecticProgram::wigner(1),
    };
    let rows = lp_norm_probe(&prog, p, q, &dyadic_lambdas(lo, hi))?;
    std::fs::create_dir_all(out)?;
    let file = out.join(format!("probe_p{p}_q{q}.csv"));
    let mut text = String::from("lambda,ratio,N,T\n");
    println!("{:>12} {:>14}", "lambda", "ratio");
    for r in &rows {
        text.push_str(&format!("{},{},{},{}\n", r.lambda, r.ratio, r.n, r.t));
        println!("{:>12.6} {:>14.6e}", r.lambda, r.ratio);
    }
    std::fs::write(&file, text)?;
    let var = ratio_variation(&rows);
    println!("variation max/min = {var:.4}");
    println!("wrote {}", file.display());
    // the bounded/unbounded predicate is stated for the Wigner distribution
    if program.is_none() {
        let bounded = classify::lp_wigner_bounded(p, q)?;
        let agrees = if bounded { var < 4.0 } else { var > 10.0 };
        println!(
            "predicted {}; sweep {}",
            if bounded { "bounded (variation < 4x)" } else { "unbounded (growth > 10x)" },
            if agrees { "agrees" } else { "disagrees" }
        );
        if !agrees {
            return Ok(1);
        }
    }
    Ok(0)
}
