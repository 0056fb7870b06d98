//! Argument parsing and subcommand dispatch.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hyqc_core::channels::{builtin_table, find_channel, ChannelConfig, Parent};
use hyqc_core::scan::{
    find_extremum, report, McOptions, Quantity, ScanSpec, Scenario, DEFAULT_RESAMPLES, DEFAULT_TOL,
};

use crate::config::{load_channels, serialize_channels};
use crate::output::{extremum_json, reports_json, write_events_csv, write_mc_csv, write_scan_csv};
use crate::{parallel, CliError};

/// Grid size of `mc` when `--steps` is absent; each J/ψ point draws its
/// own batch.
pub const MC_DEFAULT_STEPS: usize = 31;
pub const MC_DEFAULT_EVENTS: usize = 100_000;

#[derive(Debug, Parser)]
#[command(
    name = "hyqc",
    version,
    about = "Bell-type correlations of hyperon-antihyperon pairs"
)]
pub struct Cli {
    /// Channel table in TOML (defaults to the built-in table).
    #[arg(long, global = true, value_name = "PATH")]
    pub channels: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantum value and bounds on a grid, as CSV.
    Scan {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Location and value of the maximum, as JSON.
    Extremum {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Maxima of all quantities against their bounds, as JSON.
    Report {
        /// Channel id or alias; all channels when absent.
        #[arg(long)]
        channel: Option<String>,
        /// All parents when absent.
        #[arg(long, value_parser = parse_parent)]
        parent: Option<Parent>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimates next to the analytic values, as CSV.
    Mc {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = MC_DEFAULT_EVENTS)]
        events: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_RESAMPLES)]
        resamples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the events of the first grid point as CSV.
        #[arg(long, value_name = "PATH")]
        events_out: Option<PathBuf>,
    },
    /// Print the channel table as TOML after validating it.
    Channels,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub channel: String,
    #[arg(long, value_parser = parse_parent)]
    pub parent: Parent,
    #[arg(long, value_parser = parse_quantity, default_value = "ch_mean")]
    pub quantity: Quantity,
}

/// Radians. Giving `--from` or `--to` makes the grid closed.
#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

impl GridArgs {
    pub fn spec(&self, base: ScanSpec) -> Result<ScanSpec, CliError> {
        let mut s = base;
        if self.from.is_some() || self.to.is_some() {
            s.open = false;
        }
        s.start = self.from.unwrap_or(s.start);
        s.stop = self.to.unwrap_or(s.stop);
        s.steps = self.steps.unwrap_or(s.steps);
        s.validate()?;
        Ok(s)
    }
}

fn parse_parent(s: &str) -> Result<Parent, String> {
    Parent::parse(s).ok_or_else(|| format!("unknown parent `{s}` (eta_c, chi_c0, jpsi)"))
}

fn parse_quantity(s: &str) -> Result<Quantity, String> {
    Quantity::parse(s).ok_or_else(|| format!("unknown quantity `{s}` (ch_mean, kappa3, mu4)"))
}

fn table(path: Option<&Path>) -> Result<Vec<ChannelConfig>, CliError> {
    Ok(match path {
        Some(p) => load_channels(p)?,
        None => builtin_table(),
    })
}

fn channel<'a>(table: &'a [ChannelConfig], name: &str) -> Result<&'a ChannelConfig, CliError> {
    find_channel(table, name).ok_or_else(|| {
        let ids: Vec<&str> = table.iter().map(|c| c.channel_id.as_str()).collect();
        CliError::Usage(format!(
            "unknown channel `{name}`; known: {}",
            ids.join(", ")
        ))
    })
}

fn scenario(table: &[ChannelConfig], a: &ScenarioArgs) -> Result<Scenario, CliError> {
    Ok(Scenario::new(
        channel(table, &a.channel)?,
        a.parent,
        a.quantity,
    ))
}

fn write_to(
    out: Option<&Path>,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    let res = match out {
        Some(p) => File::create(p).and_then(|file| {
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush()
        }),
        None => {
            let mut w = io::stdout().lock();
            f(&mut w).and_then(|_| w.flush())
        }
    };
    res.map_err(|source| CliError::Io {
        path: out.map_or("<stdout>".into(), |p| p.display().to_string()),
        source,
    })
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let table = table(cli.channels.as_deref())?;
    match cli.command {
        Command::Scan {
            scenario: a,
            grid,
            out,
        } => {
            let sc = scenario(&table, &a)?;
            let spec = grid.spec(ScanSpec::default_for(sc.variable()))?;
            let rows = parallel::scan(&sc, &spec)?;
            write_to(out.as_deref(), |w| write_scan_csv(w, &rows))
        }
        Command::Extremum {
            scenario: a,
            grid,
            tol,
        } => {
            let sc = scenario(&table, &a)?;
            let spec = grid.spec(ScanSpec::extremum_default(sc.variable()))?;
            let ext = find_extremum(&sc, &spec, tol)?;
            write_to(None, |w| writeln!(w, "{}", extremum_json(&ext)))
        }
        Command::Report {
            channel: name,
            parent,
            out,
        } => {
            let chans = match &name {
                Some(n) => vec![channel(&table, n)?],
                None => table.iter().collect(),
            };
            let parents = parent.map_or(Parent::ALL.to_vec(), |p| vec![p]);
            let mut reports = Vec::new();
            for c in chans {
                for &p in &parents {
                    reports.extend(report(c, p)?);
                }
            }
            write_to(out.as_deref(), |w| {
                writeln!(w, "{}", reports_json(&reports))
            })
        }
        Command::Mc {
            scenario: a,
            grid,
            events,
            seed,
            resamples,
            out,
            events_out,
        } => {
            let sc = scenario(&table, &a)?;
            let mut base = ScanSpec::default_for(sc.variable());
            base.steps = MC_DEFAULT_STEPS;
            let spec = grid.spec(base)?;
            let opts = McOptions {
                n_events: events,
                seed,
                resamples,
            };
            let rows = parallel::mc_scan(&sc, &spec, &opts)?;
            if let Some(p) = events_out {
                let batch = parallel::batch_at(&sc, &spec, &opts, 0)?;
                write_to(Some(&p), |w| write_events_csv(w, &batch))?;
            }
            let flagged = rows.iter().filter(|r| r.flagged).count();
            eprintln!("{flagged} of {} points beyond 3 sigma", rows.len());
            write_to(out.as_deref(), |w| write_mc_csv(w, &rows))
        }
        Command::Channels => {
            let text = serialize_channels(&table);
            write_to(None, |w| w.write_all(text.as_bytes()))
        }
    }
}
