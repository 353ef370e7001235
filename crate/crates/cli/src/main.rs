use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use qkahler_cli::criteria::{self, CRITERIA};
use qkahler_cli::{suites, volume, Report, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "qkahler", version, about = "Quaternionic Kahler cocycle: verification suites, volumes and sup search")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct Flags {
    /// Quaternionic dimension of H^n_H.
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Samples per property check.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Pass threshold of the command's main check.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Refinement iterations per refined start and radius stage.
    #[arg(long, global = true)]
    iters: Option<usize>,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a property suite.
    Verify {
        /// lemma-totreal, lemma-realproj, prop-projection, gram-signature, coboundary or complex
        suite: String,
    },
    /// Closed-form or quadrature volumes.
    #[command(subcommand)]
    Volume(VolumeCmd),
    /// Evaluate the cocycle on the five points of a point file.
    Cocycle { file: PathBuf },
    /// Search for the supremum of |c|.
    Search,
    /// Run the acceptance battery, or re-print a saved report.
    Report {
        /// Comma-separated criterion numbers (default: all).
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<usize>,
        /// Summarize this JSON report instead of running anything.
        #[arg(long)]
        from: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum VolumeCmd {
    /// The closed form of v4.
    V4,
    /// Regular simplex inscribed at Klein radius r, or `ideal`.
    Regular {
        #[arg(long)]
        r: String,
    },
    /// Simplex with Klein vertices from a JSON file `{"vertices": [...]}`.
    File { path: PathBuf },
}

fn config(flags: &Flags) -> anyhow::Result<RunConfig> {
    let mut cfg = match &flags.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = flags.n {
        cfg.n = n;
        cfg.search.n = n;
    }
    if let Some(s) = flags.seed {
        cfg.seed = s;
        cfg.search.seed = s;
    }
    if let Some(s) = flags.samples {
        cfg.samples = s;
    }
    if let Some(t) = flags.quad_tol {
        cfg.quad.tol = t;
        cfg.search.final_quad.tol = t;
    }
    if let Some(r) = flags.restarts {
        cfg.search.restarts = r;
    }
    if let Some(i) = flags.iters {
        cfg.search.iters = i;
    }
    if flags.out.is_some() {
        cfg.out = flags.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Points `--tol` at the threshold of the check the command is about.
fn apply_tol(cfg: &mut RunConfig, command: &Command, tol: f64) {
    let t = &mut cfg.tolerances;
    let slot = match command {
        Command::Verify { suite } => match suite.as_str() {
            "lemma-totreal" => &mut t.totreal,
            "lemma-realproj" => &mut t.realproj,
            "prop-projection" => &mut t.cross_line,
            "gram-signature" => &mut t.signature,
            "coboundary" => &mut t.coboundary,
            "complex" => &mut t.ideal_triangle,
            _ => return,
        },
        Command::Volume(_) => &mut t.ideal,
        Command::Cocycle { .. } | Command::Search | Command::Report { .. } => &mut t.bound,
    };
    *slot = tol;
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    let mut cfg = config(&cli.flags)?;
    if let Some(tol) = cli.flags.tol {
        apply_tol(&mut cfg, &cli.command, tol);
    }
    let start = Instant::now();
    let (suite, checks) = match &cli.command {
        Command::Verify { suite } => (suite.clone(), suites::verify(suite, &cfg)?),
        Command::Volume(VolumeCmd::V4) => ("volume".into(), vec![volume::v4()]),
        Command::Volume(VolumeCmd::Regular { r }) => {
            let check = if r == "ideal" {
                volume::ideal(&cfg.quad, cfg.tolerances.ideal)
            } else {
                let r: f64 = r.parse().map_err(|_| anyhow::anyhow!("--r expects a number or `ideal`"))?;
                volume::regular(r, &cfg.quad)?
            };
            ("volume".into(), vec![check])
        }
        Command::Volume(VolumeCmd::File { path }) => ("volume".into(), vec![volume::vertex_file(path, &cfg.quad)?]),
        Command::Cocycle { file } => ("cocycle".into(), vec![volume::cocycle_file(file, &cfg)?]),
        Command::Search => ("search".into(), vec![volume::search(&cfg.search, cfg.tolerances.bound)?]),
        Command::Report { from: Some(path), .. } => return Report::read(path),
        Command::Report { criteria: list, .. } => {
            let list: Vec<usize> = if list.is_empty() { (1..=CRITERIA.len()).collect() } else { list.clone() };
            let checks = list.iter().map(|&k| criteria::run(k, &cfg)).collect::<anyhow::Result<_>>()?;
            ("acceptance".into(), checks)
        }
    };
    Ok(Report::new(&suite, checks, &cfg, start.elapsed().as_secs_f64()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.flags.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    print!("{}", report.summary());
    if let Some(path) = &cli.flags.out {
        if let Err(e) = report.write(path) {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
