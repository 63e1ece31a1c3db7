use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use swssb::holography::{verify_appendix, Appendix};
use swssb::runner::{output_dir, preset, run, write_artifacts, ExperimentConfig, RunReport};

#[derive(Parser)]
#[command(name = "swssb", version, about = "Strong-to-weak symmetry breaking experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a TOML config.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a named bundle of configs (fig4, fig6, appendices, fixed_point, depth, overlap, jw).
    Preset {
        name: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Check the stabilizer-flow claims for one construction.
    VerifyAppendix {
        /// A, D, E, F or subsystem
        which: Appendix,
        /// Print the JSON report instead of one line per check.
        #[arg(long)]
        json: bool,
    },
}

#[derive(clap::Args)]
struct Overrides {
    /// Output directory (per experiment under it for presets).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Verdict tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig, nested: bool) {
        if let Some(out) = &self.out {
            cfg.output_dir = Some(if nested { out.join(cfg.experiment.name()) } else { out.clone() });
        }
        if let Some(t) = self.threads {
            cfg.threads = Some(t);
        }
        if let Some(tol) = self.tol {
            cfg.tolerances.check = tol;
        }
    }
}

fn execute(cfg: &ExperimentConfig) -> Result<bool, Box<dyn std::error::Error>> {
    let report: RunReport = run(cfg)?;
    let dir = output_dir(cfg);
    write_artifacts(&report, &dir)?;
    for p in report.points.iter().filter(|p| !p.ok) {
        eprintln!("{} {}: {}", cfg.experiment.name(), p.label, p.error.as_deref().unwrap_or(""));
    }
    for v in &report.verdicts {
        println!("{} {} {}: {}", cfg.experiment.name(), v.criterion, if v.passed { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("{}: {} points in {:.1}s -> {}", cfg.experiment.name(), report.points.len(), report.wall_seconds, dir.display());
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: Result<bool, Box<dyn std::error::Error>> = (|| match cli.command {
        Command::Run { config, overrides } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = ExperimentConfig::from_toml(&text)?;
            overrides.apply(&mut cfg, false);
            cfg.validate()?;
            execute(&cfg)
        }
        Command::Preset { name, overrides } => {
            let mut all = true;
            for mut cfg in preset(&name)? {
                overrides.apply(&mut cfg, true);
                all &= execute(&cfg)?;
            }
            Ok(all)
        }
        Command::VerifyAppendix { which, json } => {
            let report = verify_appendix(which)?;
            if json {
                println!("{}", report.to_json());
            } else {
                for c in &report.checks {
                    println!("{which} {} {}: {}", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail);
                }
            }
            Ok(report.passed())
        }
    })();
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
