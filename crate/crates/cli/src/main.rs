use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use eigenratio::report::{InequalityReport, Status};
use eigenratio::spectra::Method;
use eigenratio::verify::config::{ExperimentConfig, ModelConfig};
use eigenratio::verify::suite::{self, Prepared};

#[derive(Parser)]
#[command(name = "eigenratio", version, about = "Spectral and isoperimetric inequality checks on measured graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Graph eigenvalues against the continuum spectrum.
    Spectrum(Common),
    /// Cheeger constant bounds.
    Cheeger(Common),
    /// Sweep-cut certificates on the positive part of the first eigenfunction.
    ImprovedCheeger(Common),
    /// Multi-way isoperimetric constants.
    Multiway(Common),
    /// Observable-diameter estimates against diameter bounds.
    Obsdiam(Common),
    /// Eigenvalue ratio bound, over thin tori or on one model.
    RatioScan {
        #[command(flatten)]
        common: Common,
        /// Torus dimensions scanned when no model is given.
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3])]
        n: Vec<usize>,
        /// Torus parameters scanned when no model is given.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])]
        a: Vec<f64>,
    },
    /// Runs every check from a config file; exits nonzero if any check fails.
    VerifyAll {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// `circle:a=<len>:N=<points>`, `torus:n=<dim>:a=<a>:N=<c1>x<c2>...`
    /// (or `ppu=<points per unit>`) or `graph:<path>`.
    #[arg(long)]
    model: Vec<String>,
    /// Largest eigenvalue index used.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    kappa: Vec<f64>,
    #[arg(long)]
    method: Option<MethodArg>,
    /// Output file; for `verify-all`, the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Dense,
    Iterative,
    Auto,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Dense => Method::Dense,
            MethodArg::Iterative => Method::Iterative,
            MethodArg::Auto => Method::Auto,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Common {
    fn config(&self, base: ExperimentConfig) -> anyhow::Result<ExperimentConfig> {
        let mut c = base;
        if let Some(m) = self.method {
            c.method = m.into();
        }
        if let Some(k) = self.k {
            c.k_max = k;
        }
        if !self.kappa.is_empty() {
            c.kappas = self.kappa.clone();
        }
        for spec in &self.model {
            c.models.push(ModelConfig::parse_spec(spec).with_context(|| format!("model `{spec}`"))?);
        }
        c.validate()?;
        Ok(c)
    }

    fn single(&self) -> anyhow::Result<(ExperimentConfig, Prepared)> {
        if self.model.len() != 1 {
            bail!("exactly one --model is required");
        }
        let c = self.config(ExperimentConfig::default())?;
        let source = c.models[0].source()?;
        let p = Prepared::new(&source, c.k_max, &c)?;
        Ok((c, p))
    }

    fn emit(&self, reports: &[InequalityReport]) -> anyhow::Result<()> {
        let text = match self.format {
            Format::Csv => suite::to_csv(reports)?,
            Format::Json => suite::to_json(reports)? + "\n",
        };
        match &self.out {
            Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn status_code(reports: &[InequalityReport]) -> ExitCode {
    if reports.iter().any(|r| r.status == Status::Fail) {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let (common, reports) = match &cli.command {
        Command::Spectrum(c) => {
            let (cfg, p) = c.single()?;
            (c, suite::spectrum_reports(&p, cfg.k_max, cfg.tolerances.eigenvalue_rel))
        }
        Command::Cheeger(c) => {
            let (cfg, p) = c.single()?;
            (c, suite::cheeger_reports(&p, cfg.k_max))
        }
        Command::ImprovedCheeger(c) => {
            let (cfg, p) = c.single()?;
            (c, suite::improved_cheeger_reports(&p, cfg.k_max))
        }
        Command::Multiway(c) => {
            let (cfg, p) = c.single()?;
            (c, suite::multiway_reports(&p, cfg.k_max))
        }
        Command::Obsdiam(c) => {
            let (cfg, p) = c.single()?;
            (c, suite::obsdiam_reports(&p, cfg.k_max, &cfg.kappas))
        }
        Command::RatioScan { common, n, a } => {
            if common.model.is_empty() {
                let cfg = common.config(ExperimentConfig { k_max: 50, ..ExperimentConfig::default() })?;
                (common, suite::ratio_scan_reports(n, a, cfg.k_max, cfg.caps.enumeration as u128))
            } else {
                let (_, p) = common.single()?;
                (common, suite::ratio_reports(&p))
            }
        }
        Command::VerifyAll { common, config } => {
            let base = match config {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::default(),
            };
            let cfg = common.config(base)?;
            if cfg.models.is_empty() && cfg.optimality.is_none() {
                bail!("nothing to run: give --config or --model");
            }
            let outcome = suite::run_suite(&cfg)?;
            let dir = common
                .out
                .clone()
                .or_else(|| cfg.output.dir.clone())
                .unwrap_or_else(|| PathBuf::from("eigenratio-out"));
            suite::write_outputs(&outcome.reports, &dir, &cfg.output.csv)?;
            eprintln!(
                "{} pass, {} fail, {} reported, {} skipped, {} error; reports in {}",
                outcome.count(Status::Pass),
                outcome.count(Status::Fail),
                outcome.count(Status::Reported),
                outcome.count(Status::Skipped),
                outcome.count(Status::Error),
                dir.display()
            );
            if common.format == Format::Json {
                println!("{}", suite::to_json(&outcome.reports)?);
            }
            return Ok(status_code(&outcome.reports));
        }
    };
    common.emit(&reports)?;
    Ok(status_code(&reports))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
