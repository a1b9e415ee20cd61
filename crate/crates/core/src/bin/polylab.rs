use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polylab::experiments::{gnuplot_script, run_cell_report, run_checks, run_trichotomy, ExperimentConfig};
use polylab::geometry::classify_stability;
use polylab::Error;

#[derive(Parser)]
#[command(name = "polylab", version, about = "Polyharmonic spectra on oscillating domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues on Ω_ε against the three candidate limits.
    Trichotomy(RunArgs),
    /// The strange constant K with identity residuals.
    CellK(RunArgs),
    /// Identity check suites: fdb, green, unfolding, heps, classify, cell or all.
    Checks {
        #[arg(default_value = "all")]
        selector: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stability regime for each α.
    Classify {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.5, 2.0])]
        alpha: Vec<f64>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Comma-separated, `0.25` or `1/4` form.
    #[arg(long, value_delimiter = ',', value_parser = parse_fraction)]
    eps_list: Option<Vec<f64>>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    degree: Option<usize>,
    /// `NX,NY` on the limit rectangle.
    #[arg(long, value_delimiter = ',')]
    elems: Option<Vec<usize>>,
    #[arg(long)]
    per_period: Option<usize>,
    #[arg(long)]
    n_eigs: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    /// CSV path; a `.gp` plot script and a `.json` report are written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            let d: f64 = d.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            Ok(n / d)
        }
        None => s.trim().parse().map_err(|e| format!("{s}: {e}")),
    }
}

impl RunArgs {
    fn config(&self) -> polylab::Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
            None => ExperimentConfig::default(),
        };
        if let Some(m) = self.m {
            c.m = m;
            c.k = m - 1;
        }
        if let Some(k) = self.k {
            c.k = k;
        }
        if let Some(a) = &self.alpha {
            c.alphas = a.clone();
        }
        if let Some(e) = &self.eps_list {
            c.epsilons = e.clone();
        }
        if let Some(b) = &self.b {
            c.b = b.clone();
        }
        if let Some(d) = self.degree {
            c.degree = d;
        }
        if let Some(e) = &self.elems {
            let [nx, ny] = e[..] else {
                return Err(Error::Usage(format!("--elems takes NX,NY, got {e:?}")));
            };
            c.elements = [nx, ny];
        }
        if let Some(p) = self.per_period {
            c.elements_per_period = p;
        }
        if let Some(n) = self.n_eigs {
            c.n_eigs = n;
        }
        if let Some(t) = self.threads {
            c.threads = t;
        }
        if let Some(o) = &self.out {
            c.output = Some(o.clone());
        }
        c.validate()?;
        Ok(c)
    }
}

fn sibling(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

fn trichotomy(args: &RunArgs) -> polylab::Result<ExitCode> {
    let config = args.config()?;
    let report = run_trichotomy(&config)?;
    let csv = report.to_csv();
    match &config.output {
        Some(path) => {
            std::fs::write(path, &csv)?;
            let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            std::fs::write(sibling(path, "gp"), gnuplot_script(&report, &name))?;
            std::fs::write(sibling(path, "json"), serde_json::to_string_pretty(&report)?)?;
        }
        None => print!("{csv}"),
    }
    eprint!("{}", report.gap_table());
    Ok(ExitCode::SUCCESS)
}

fn cell_k(args: &RunArgs) -> polylab::Result<ExitCode> {
    let config = args.config()?;
    let report = run_cell_report(config.m, &config.b)?;
    if let Some(path) = &config.output {
        std::fs::write(path, report.to_csv())?;
    }
    println!("{}", report.to_json()?);
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> polylab::Result<ExitCode> {
    match cli.command {
        Command::Trichotomy(a) => trichotomy(&a),
        Command::CellK(a) => cell_k(&a),
        Command::Checks { selector, out } => {
            let table = run_checks(&selector)?;
            let csv = table.to_csv();
            print!("{csv}");
            if let Some(p) = out {
                std::fs::write(p, &csv)?;
            }
            Ok(if table.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Classify { m, k, alpha } => {
            println!("m,k,alpha,threshold,regime");
            for a in alpha {
                let v = classify_stability(m, k, a)?;
                println!("{m},{k},{a},{},{:?}", v.threshold, v.regime);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("polylab: {e}");
            match e {
                Error::Usage(_) | Error::Configuration(_) | Error::Argument(_) | Error::Json(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
