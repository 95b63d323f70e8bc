use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use cswl_core::config::ModelParams;
use cswl_core::experiments::{
    builtin_objects, codebook_seed, experiment_designs, gen_schedule, run_designs,
    validate_schedule, ExperimentDesign,
};
use cswl_core::pipeline::{Dataset, Representations, DEFAULT_DATASET_SEED};
use cswl_core::representation::synthetic::{generate, SyntheticConfig};
use cswl_core::representation::write_descriptors;
use cswl_core::stats::{build_report, emit_report, render_text, Manifest, ReportFormat};
use cswl_core::Error;

#[derive(Parser)]
#[command(
    name = "cswl",
    version,
    about = "Cross-situational word learning simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the participants of an experiment and write a report.
    Run {
        /// exp1..exp6, a single design such as exp1_2x2, or a design file.
        #[arg(long)]
        experiment: String,
        /// Participants per design; defaults to the design's own count.
        #[arg(long)]
        participants: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// key = value file over the default parameters.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Extra `key=value` overrides, applied after --params.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Directory with descriptors.txt and optionally lexicon.txt;
        /// synthetic descriptors when absent.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Report directory; the text report goes to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "text")]
        format: ReportFormat,
    },
    /// Write a descriptor file.
    GenDescriptors {
        /// Draw descriptors from the synthetic part model (the only source).
        #[arg(long, required = true)]
        synthetic: bool,
        #[arg(long)]
        objects: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DATASET_SEED)]
        seed: u64,
        #[arg(long)]
        descriptors_per_object: Option<usize>,
    },
    /// Generate the schedules of an experiment and check their counts.
    ValidateSchedule {
        #[arg(long)]
        experiment: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn designs(id: &str) -> Result<Vec<ExperimentDesign>, Error> {
    let path = Path::new(id);
    if path.is_file() {
        Ok(vec![ExperimentDesign::load(path)?])
    } else {
        experiment_designs(id)
    }
}

fn object_names(n: usize) -> Vec<String> {
    let builtin = builtin_objects();
    (0..n)
        .map(|i| {
            builtin
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("object{i}"))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn run(
    experiment: &str,
    participants: Option<usize>,
    seed: u64,
    params: Option<&Path>,
    overrides: &[String],
    dataset: Option<&Path>,
    out: Option<&Path>,
    format: ReportFormat,
) -> Result<(), Error> {
    let mut p = match params {
        Some(path) => ModelParams::load(path)?,
        None => ModelParams::default(),
    };
    for kv in overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidParam(format!("`{kv}` is not key=value")))?;
        p.set(k.trim(), v.trim())
            .map_err(|e| Error::InvalidParam(format!("{}: {e}", k.trim())))?;
    }
    p.validate()?;
    let designs = designs(experiment)?;
    if participants == Some(0) {
        return Err(Error::InvalidParam("participants must be positive".into()));
    }
    let (data, label) = match dataset {
        Some(dir) => (Dataset::load(dir)?, dir.display().to_string()),
        None => (
            Dataset::synthetic(
                &builtin_objects(),
                &SyntheticConfig::default(),
                DEFAULT_DATASET_SEED,
            )?,
            format!("synthetic:{DEFAULT_DATASET_SEED}"),
        ),
    };
    let repr = Arc::new(Representations::build(data, &p, codebook_seed(seed))?);
    let runs = run_designs(&designs, Arc::clone(&repr), &p, seed, participants)?;
    let manifest = Manifest::new(seed, &p, &repr, label, &runs);
    let report = build_report(&runs, manifest)?;
    match out {
        Some(dir) => {
            for f in emit_report(&report, dir, format)? {
                eprintln!("wrote {}", f.display());
            }
        }
        None => print!("{}", render_text(&report)),
    }
    Ok(())
}

fn gen_descriptors(
    objects: usize,
    out: &Path,
    seed: u64,
    per_object: Option<usize>,
) -> Result<(), Error> {
    if objects == 0 {
        return Err(Error::InvalidParam("objects must be positive".into()));
    }
    let mut cfg = SyntheticConfig::default();
    if let Some(n) = per_object {
        cfg.descriptors_per_object = n;
    }
    let objs = generate(&object_names(objects), &cfg, seed)?;
    std::fs::write(out, write_descriptors(&objs)).map_err(|e| Error::Io {
        path: out.to_path_buf(),
        source: e,
    })
}

/// Returns the number of designs with violations.
fn validate(experiment: &str, seed: u64) -> Result<usize, Error> {
    let mut failed = 0;
    for d in designs(experiment)? {
        let s = gen_schedule(&d, seed)?;
        let problems = validate_schedule(&d, &s);
        if problems.is_empty() {
            println!(
                "ok {}: {} trials, {} test items, {} probes",
                d.id,
                s.trials.len(),
                s.tests.len(),
                s.probes.len()
            );
        } else {
            failed += 1;
            println!("FAIL {}", d.id);
            for p in problems {
                println!("  {p}");
            }
        }
    }
    Ok(failed)
}

fn exit_for(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_data_error() { 2 } else { 3 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match cli.command {
        Command::Run {
            experiment,
            participants,
            seed,
            params,
            overrides,
            dataset,
            out,
            format,
        } => run(
            &experiment,
            participants,
            seed,
            params.as_deref(),
            &overrides,
            dataset.as_deref(),
            out.as_deref(),
            format,
        ),
        Command::GenDescriptors {
            synthetic: _,
            objects,
            out,
            seed,
            descriptors_per_object,
        } => gen_descriptors(objects, &out, seed, descriptors_per_object),
        Command::ValidateSchedule { experiment, seed } => match validate(&experiment, seed) {
            Ok(0) => Ok(()),
            Ok(_) => return ExitCode::from(3),
            Err(e) => Err(e),
        },
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => exit_for(&e),
    }
}
