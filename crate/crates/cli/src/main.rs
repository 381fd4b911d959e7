//! Fingerprint toolkit command line: enroll, verify, identify, evaluate,
//! inspect.
//!
//! Exit codes: 0 success (or match), 1 no-match, 2 usage or data error.

mod commands;
mod index;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ridgekit", version, about = "Minutiae-based fingerprint recognition toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Config file (key = value lines); RIDGEKIT_CONFIG is used when unset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the ROI radius R.
    #[arg(long, global = true)]
    radius: Option<u32>,
    /// Override the descriptor count K.
    #[arg(long, global = true)]
    descriptors: Option<u16>,
    /// Override the match decision threshold.
    #[arg(long, global = true)]
    threshold: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract templates from fingerprint images into a database directory.
    ///
    /// Image files follow the FVC naming convention <finger>_<impression>.<ext>.
    Enroll {
        /// Template database directory (created if missing).
        #[arg(long)]
        db: PathBuf,
        /// Fingerprint images to enroll.
        #[arg(required = true)]
        images: Vec<PathBuf>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Compare a probe image against one stored template.
    Verify {
        /// Gallery template file.
        #[arg(long)]
        template: PathBuf,
        /// Probe fingerprint image.
        probe: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Search a template database for the closest match to a probe image.
    Identify {
        /// Template database directory (with db.tsv index).
        #[arg(long)]
        db: PathBuf,
        /// Probe fingerprint image.
        probe: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Enroll a corpus and sweep the (radius, descriptors) grid, reporting
    /// FAR/FRR curves, EER and accuracy per configuration.
    Evaluate {
        /// Corpus directory of <finger>_<impression>.<ext> images.
        #[arg(long)]
        data: PathBuf,
        /// Output directory for report.tsv and curve CSVs.
        #[arg(long)]
        out: PathBuf,
        /// ROI radii to evaluate.
        #[arg(long, value_delimiter = ',', default_value = "90,100,150")]
        grid_radius: Vec<u32>,
        /// Descriptor counts to evaluate.
        #[arg(long, value_delimiter = ',', default_value = "80,120")]
        grid_descriptors: Vec<u16>,
        /// Threshold sweep resolution.
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Write every pipeline stage of one image as files for inspection.
    Inspect {
        /// Output directory for stage dumps.
        #[arg(long)]
        out: PathBuf,
        /// Stop after this stage: enhance, orientation, strength, roi,
        /// binary, thin, morphology or minutiae (default: all stages).
        #[arg(long, default_value = "minutiae")]
        stage: String,
        /// Fingerprint image.
        image: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Enroll { db, images, cfg } => commands::enroll(&db, &images, &cfg),
        Command::Verify {
            template,
            probe,
            cfg,
        } => commands::verify(&template, &probe, &cfg),
        Command::Identify { db, probe, cfg } => commands::identify(&db, &probe, &cfg),
        Command::Evaluate {
            data,
            out,
            grid_radius,
            grid_descriptors,
            steps,
            cfg,
        } => commands::evaluate(&data, &out, &grid_radius, &grid_descriptors, steps, &cfg),
        Command::Inspect {
            out,
            stage,
            image,
            cfg,
        } => commands::inspect(&image, &out, &stage, &cfg),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
