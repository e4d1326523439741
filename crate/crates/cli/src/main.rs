use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use modspace_core::classical::{trajectory, write_trajectory};
use modspace_core::harness::{configure_threads, run_norm_series, verify_all};
use modspace_core::schrod::{propagate, steps_for};
use modspace_core::transport::{leading_transport, picard_propagate, write_iteration_report, PhaseIntegralSpec};
use modspace_core::{wpt, ComplexField, ExperimentConfig, RawConfig};

mod plot;

#[derive(Parser)]
#[command(name = "modspace", version, about = "Wave packet transforms and modulation-space norms of Schrödinger evolutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Experiment settings: a config file plus `key=value` overrides.
#[derive(Args)]
struct Setup {
    /// Flat `key = value` config file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set grid.N=512`.
    #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Setup {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut raw = match &self.config {
            Some(path) => RawConfig::load(path).with_context(|| format!("reading {}", path.display()))?,
            None => RawConfig::parse("", ".")?,
        };
        for o in &self.overrides {
            let (k, v) = o.split_once('=').with_context(|| format!("override `{o}` is not KEY=VALUE"))?;
            raw.set(k, v)?;
        }
        let mut cases = raw.resolve()?;
        if cases.len() != 1 {
            bail!("config has {} cases; pick one with --set or split the file", cases.len());
        }
        Ok(cases.remove(0))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TransportMode {
    Leading,
    Picard,
}

#[derive(Subcommand)]
enum Command {
    /// Wave packet transform of the initial data or of a field file.
    Transform {
        #[command(flatten)]
        setup: Setup,
        /// Field in `index,re,im` text format; defaults to the configured initial data.
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Modulation-space norm series `t,p,q,norm,reference,ratio`.
    Norm {
        #[command(flatten)]
        setup: Setup,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Characteristic trajectory `s,f,g,detM` of the configured potential.
    Flow {
        #[command(flatten)]
        setup: Setup,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        xi: Vec<f64>,
        /// Time at which the trajectory passes through `(x, xi)`.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        /// Final time.
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        /// Keep every n-th step.
        #[arg(long, default_value_t = 10)]
        stride: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reference split-step solve of the configured initial data.
    Propagate {
        #[command(flatten)]
        setup: Setup,
        #[arg(long, allow_hyphen_values = true)]
        time: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Transform of the solution through characteristic transport.
    Transport {
        #[command(flatten)]
        setup: Setup,
        #[arg(long, allow_hyphen_values = true)]
        time: f64,
        #[arg(long, value_enum, default_value = "picard")]
        mode: TransportMode,
        /// Where to write `k,increment_l2,wall_seconds` in picard mode.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Runs every `*.cfg` experiment in a directory and prints the summary.
    Verify {
        #[arg(default_value = "suite")]
        dir: PathBuf,
        /// Directory for summary.txt, summary.csv and experiment CSVs.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Renders columns of a CSV file as an SVG line chart.
    Plot {
        input: PathBuf,
        #[arg(long, default_value = "t")]
        x: String,
        #[arg(long, default_value = "ratio")]
        y: String,
        /// Columns whose values split rows into separate series.
        #[arg(long, value_delimiter = ',', default_value = "p,q")]
        group: Vec<String>,
        #[arg(long)]
        log_y: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Transform { setup, input, output } => {
            let cfg = setup.resolve()?;
            let grid = cfg.grid()?;
            let f = match input {
                Some(p) => ComplexField::read_text(&grid, BufReader::new(File::open(&p)?))?,
                None => cfg.initial.build(&grid)?,
            };
            let w = wpt(&f, &cfg.window.build(&grid)?)?;
            w.write_text(sink(output.as_deref())?)?;
        }
        Command::Norm { setup, output } => {
            let series = run_norm_series(&setup.resolve()?)?;
            series.write_csv(sink(output.as_deref())?)?;
        }
        Command::Flow {
            setup,
            x,
            xi,
            t,
            s,
            stride,
            output,
        } => {
            let cfg = setup.resolve()?;
            let points = trajectory(&cfg.potential, t, &x, &xi, s, &cfg.flow, stride)?;
            write_trajectory(&points, sink(output.as_deref())?)?;
        }
        Command::Propagate { setup, time, output } => {
            let cfg = setup.resolve()?;
            let grid = cfg.grid()?;
            let u0 = cfg.initial.build(&grid)?;
            let u = if time == 0.0 {
                u0
            } else {
                propagate(&u0, &cfg.potential, time, steps_for(time, cfg.dt))?
            };
            u.write_text(sink(output.as_deref())?)?;
        }
        Command::Transport {
            setup,
            time,
            mode,
            report,
            output,
        } => {
            let cfg = setup.resolve()?;
            let grid = cfg.grid()?;
            let u0 = cfg.initial.build(&grid)?;
            let phi0 = cfg.window.build(&grid)?;
            let phase = PhaseIntegralSpec { flow: cfg.flow };
            let (field, outside) = match mode {
                TransportMode::Leading => {
                    let r = leading_transport(&u0, &phi0, &cfg.potential, time, &phase)?;
                    (r.field, r.outside_targets)
                }
                TransportMode::Picard => {
                    let r = picard_propagate(&u0, &phi0, &cfg.potential, time, &cfg.picard, &phase)?;
                    if let Some(p) = &report {
                        write_iteration_report(&r.iterations, File::create(p)?)?;
                    }
                    eprintln!("converged after {} iterations", r.converged_at());
                    (r.field, r.outside_targets)
                }
            };
            if outside > 0 {
                eprintln!("{outside} interpolation targets fell outside the grid");
            }
            field.write_text(sink(output.as_deref())?)?;
        }
        Command::Verify { dir, out } => {
            let summary = verify_all(&dir)?;
            print!("{}", summary.to_text());
            if let Some(out) = out {
                summary.write_outputs(&out)?;
            }
            return Ok(summary.all_passed());
        }
        Command::Plot {
            input,
            x,
            y,
            group,
            log_y,
            output,
        } => plot::render(&input, &x, &y, &group, log_y, &output)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
