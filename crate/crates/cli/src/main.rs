//! `swim` — simulate SWIM mobility scenarios, analyze contact traces,
//! compare them, and calibrate alpha against a target trace.

mod report;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use swim_core::calibrate::{alpha_sweep, default_alpha_grid, mean_curve_csv, DEFAULT_REPLICATIONS};
use swim_core::contact::{detect_contacts, quantize_to_beacons};
use swim_core::metrics::{
    ccdf_csv, contact_count_matrix, contact_duration_ccdf, contacts_by_hour_of_day,
    contacts_per_hour_csv, contacts_per_hour_per_node, hour_of_day_csv, intercontact_ccdf,
    pair_curve_csv, pair_matrix_csv, pair_probability, sorted_pair_curve, MetricsError,
};
use swim_core::run_simulation;
use swim_core::scenario::load_scenario;
use swim_core::trace::{parse_contact_trace, write_contact_trace, ContactLog, ContactRecord};

#[derive(Parser)]
#[command(
    name = "swim",
    version,
    about = "SWIM mobility simulation and contact-trace analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write the resulting contact trace.
    Simulate {
        /// Scenario document (key=value lines).
        #[arg(long)]
        config: PathBuf,
        /// Override the scenario's rng_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output trace file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit geometric ground-truth contacts instead of beacon-sampled
        /// observations.
        #[arg(long)]
        ground_truth: bool,
        /// Also dump the movement timeline as CSV.
        #[arg(long)]
        movement: Option<PathBuf>,
    },
    /// Compute every metric of a contact trace as CSV files.
    Analyze {
        /// Contact trace to ingest.
        #[arg(long)]
        trace: PathBuf,
        /// Subtract this epoch from all timestamps at ingest.
        #[arg(long)]
        t0: Option<f64>,
        /// Hour of day at t = 0 for the hour-of-day profile.
        #[arg(long, default_value_t = 0.0)]
        hour_offset: f64,
        /// Output directory for the CSV bundle.
        #[arg(long, default_value = ".")]
        outdir: PathBuf,
    },
    /// Compare two traces metric by metric.
    Compare {
        #[arg(long)]
        trace_a: PathBuf,
        #[arg(long)]
        trace_b: PathBuf,
        #[arg(long, default_value = ".")]
        outdir: PathBuf,
    },
    /// Sweep alpha values against a target trace and recommend the best.
    Sweep {
        /// Scenario document providing everything but alpha.
        #[arg(long)]
        config: PathBuf,
        /// Target contact trace to match.
        #[arg(long)]
        target: PathBuf,
        /// Comma-separated alpha values (default 0.0,0.1,...,1.0).
        #[arg(long)]
        alphas: Option<String>,
        /// Replications per alpha.
        #[arg(long, default_value_t = DEFAULT_REPLICATIONS)]
        reps: usize,
        #[arg(long, default_value = ".")]
        outdir: PathBuf,
    },
}

fn main() {
    if let Err(err) = run(Cli::parse()) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            seed,
            out,
            ground_truth,
            movement,
        } => simulate(
            &config,
            seed,
            out.as_deref(),
            ground_truth,
            movement.as_deref(),
        ),
        Command::Analyze {
            trace,
            t0,
            hour_offset,
            outdir,
        } => analyze(&trace, t0, hour_offset, &outdir),
        Command::Compare {
            trace_a,
            trace_b,
            outdir,
        } => compare(&trace_a, &trace_b, &outdir),
        Command::Sweep {
            config,
            target,
            alphas,
            reps,
            outdir,
        } => sweep(&config, &target, alphas.as_deref(), reps, &outdir),
    }
}

fn load_config(path: &Path) -> Result<swim_core::scenario::ScenarioConfig> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    load_scenario(&text).with_context(|| format!("parsing config {}", path.display()))
}

fn load_trace(path: &Path) -> Result<ContactLog> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading trace {}", path.display()))?;
    parse_contact_trace(&text).with_context(|| format!("parsing trace {}", path.display()))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn simulate(
    config_path: &Path,
    seed: Option<u64>,
    out: Option<&Path>,
    ground_truth: bool,
    movement: Option<&Path>,
) -> Result<()> {
    let mut config = load_config(config_path)?;
    if let Some(seed) = seed {
        config.rng_seed = seed;
    }

    let (_, timeline) = run_simulation(&config);
    let truth = detect_contacts(&timeline, &config.radio_ranges());
    let log = if ground_truth {
        truth
    } else {
        quantize_to_beacons(&truth, &config.beacon_intervals(), config.sim_duration)
    };

    if let Some(path) = movement {
        let mut dump = String::from("node_id,x,y,t_start,t_end\n");
        for node_intervals in &timeline.intervals {
            for iv in node_intervals {
                dump.push_str(&format!(
                    "{},{:.3},{:.3},{:.3},{:.3}\n",
                    iv.node_id, iv.position.x, iv.position.y, iv.t_start, iv.t_end
                ));
            }
        }
        fs::write(path, dump).with_context(|| format!("writing {}", path.display()))?;
    }

    let text = write_contact_trace(&log);
    let (span_start, span_end) = log.span();
    let summary = format!(
        "nodes={} records={} span={:.3}..{:.3}",
        log.num_nodes(),
        log.records().len(),
        span_start,
        span_end
    );
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            println!("{summary}");
        }
        None => {
            print!("{text}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

/// Shift all record times by `-t0`; times must stay non-negative.
fn shift_log(log: &ContactLog, t0: f64) -> Result<ContactLog> {
    let (span_start, span_end) = log.span();
    if log.records().iter().any(|r| r.t_start - t0 < 0.0) {
        bail!("--t0 {t0} would make record times negative (trace starts at {span_start})");
    }
    let shifted: Vec<ContactRecord> = log
        .records()
        .iter()
        .map(|r| ContactRecord {
            a: r.a,
            b: r.b,
            t_start: r.t_start - t0,
            t_end: r.t_end - t0,
        })
        .collect();
    let span = ((span_start - t0).max(0.0), (span_end - t0).max(0.0));
    Ok(ContactLog::new(log.num_nodes(), Some(span), shifted))
}

fn analyze(trace: &Path, t0: Option<f64>, hour_offset: f64, outdir: &Path) -> Result<()> {
    let mut log = load_trace(trace)?;
    if let Some(t0) = t0 {
        log = shift_log(&log, t0)?;
    }
    if log.is_empty() {
        bail!("no contacts in {}", trace.display());
    }
    fs::create_dir_all(outdir)
        .with_context(|| format!("creating output directory {}", outdir.display()))?;

    let counts = contact_count_matrix(&log);
    let probabilities = pair_probability(&counts)?;
    let curve = sorted_pair_curve(&probabilities);
    write_file(outdir, "pair_curve.csv", &pair_curve_csv(&curve))?;
    write_file(outdir, "pair_matrix.csv", &pair_matrix_csv(&probabilities))?;
    write_file(
        outdir,
        "contact_duration_ccdf.csv",
        &ccdf_csv(&contact_duration_ccdf(&log)?),
    )?;
    match intercontact_ccdf(&log) {
        Ok(series) => write_file(outdir, "intercontact_ccdf.csv", &ccdf_csv(&series))?,
        Err(MetricsError::NoRepeatContacts) => {
            eprintln!("warning: no node pair met twice; intercontact_ccdf.csv is empty");
            write_file(outdir, "intercontact_ccdf.csv", "seconds,ccdf\n")?;
        }
        Err(other) => return Err(other.into()),
    }
    write_file(
        outdir,
        "contacts_per_hour_per_node.csv",
        &contacts_per_hour_csv(&contacts_per_hour_per_node(&log)),
    )?;
    write_file(
        outdir,
        "hour_of_day.csv",
        &hour_of_day_csv(&contacts_by_hour_of_day(&log, hour_offset)),
    )?;
    println!(
        "analyzed {}: nodes={} records={}, wrote 6 CSV files to {}",
        trace.display(),
        log.num_nodes(),
        log.records().len(),
        outdir.display()
    );
    Ok(())
}

fn compare(trace_a: &Path, trace_b: &Path, outdir: &Path) -> Result<()> {
    let log_a = load_trace(trace_a)?;
    let log_b = load_trace(trace_b)?;
    if log_a.is_empty() {
        bail!("no contacts in {}", trace_a.display());
    }
    if log_b.is_empty() {
        bail!("no contacts in {}", trace_b.display());
    }
    fs::create_dir_all(outdir)
        .with_context(|| format!("creating output directory {}", outdir.display()))?;
    report::write_comparison(&log_a, &log_b, outdir)?;
    println!("compared traces, wrote 6 CSV files to {}", outdir.display());
    Ok(())
}

fn sweep(
    config_path: &Path,
    target_path: &Path,
    alphas: Option<&str>,
    reps: usize,
    outdir: &Path,
) -> Result<()> {
    let config = load_config(config_path)?;
    let target_log = load_trace(target_path)?;
    if target_log.is_empty() {
        bail!("no contacts in {}", target_path.display());
    }
    let target = sorted_pair_curve(&pair_probability(&contact_count_matrix(&target_log))?);

    let alphas: Vec<f64> = match alphas {
        Some(list) => list
            .split(',')
            .map(|token| {
                token
                    .trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad alpha value `{token}`"))
            })
            .collect::<Result<_>>()?,
        None => default_alpha_grid(),
    };

    let result = alpha_sweep(&config, &target, &alphas, reps)?;
    fs::create_dir_all(outdir)
        .with_context(|| format!("creating output directory {}", outdir.display()))?;
    write_file(outdir, "sweep_report.csv", &result.report_csv())?;
    for alpha_result in &result.per_alpha {
        write_file(
            outdir,
            &format!("pair_curve_alpha_{}.csv", alpha_result.alpha),
            &mean_curve_csv(&alpha_result.mean_curve),
        )?;
    }
    println!("recommended alpha: {}", result.recommended_alpha);
    Ok(())
}
