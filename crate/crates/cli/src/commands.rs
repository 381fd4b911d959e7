//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};

use ridgekit_core::config::PipelineConfig;
use ridgekit_core::descriptor::{load_template, save_template};
use ridgekit_core::eval::{
    accuracy, collect_scores, equal_error_rate, error_curve, write_curve, EvalReport,
};
use ridgekit_core::imageio::{load_grayscale, save_pgm};
use ridgekit_core::matcher;
use ridgekit_core::minutiae::MinutiaeSet;
use ridgekit_core::pipeline::{extract_template, run_early, run_late, template_from_minutiae};
use ridgekit_core::{Error, MatchDecision, Template, TemplateMeta};

use crate::index;
use crate::render;
use crate::ConfigArgs;

const EXIT_MATCH: u8 = 0;
const EXIT_NO_MATCH: u8 = 1;

/// Config file < RIDGEKIT_CONFIG < command-line flags.
pub fn resolve_config(args: &ConfigArgs) -> Result<PipelineConfig> {
    let mut cfg = if let Some(path) = &args.config {
        PipelineConfig::load(path).with_context(|| format!("loading {}", path.display()))?
    } else if let Ok(path) = std::env::var("RIDGEKIT_CONFIG") {
        PipelineConfig::load(&path).with_context(|| format!("loading {path}"))?
    } else {
        PipelineConfig::default()
    };
    if let Some(r) = args.radius {
        cfg.roi_radius = r;
    }
    if let Some(k) = args.descriptors {
        cfg.descriptor_count = k;
    }
    if let Some(t) = args.threshold {
        cfg.match_threshold = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_decision(decision: &MatchDecision) {
    println!(
        "{}\t{}\t{:.6}\t{}",
        decision.probe,
        decision.gallery,
        decision.distance,
        if decision.matched { "match" } else { "no-match" }
    );
}

pub fn enroll(db_dir: &Path, images: &[PathBuf], cfg_args: &ConfigArgs) -> Result<ExitCode> {
    let cfg = resolve_config(cfg_args)?;
    fs::create_dir_all(db_dir)
        .with_context(|| format!("creating {}", db_dir.display()))?;
    let mut entries = index::load(db_dir)?;
    let mut enrolled = 0usize;
    for image in images {
        match enroll_one(db_dir, image, &cfg, &mut entries) {
            Ok(meta) => {
                enrolled += 1;
                eprintln!("enrolled {} from {}", meta, image.display());
            }
            Err(err) => eprintln!("skipping {}: {err:#}", image.display()),
        }
    }
    index::save(db_dir, &entries)?;
    println!("enrolled {enrolled} of {} images", images.len());
    if enrolled == 0 {
        bail!("no image could be enrolled");
    }
    Ok(ExitCode::from(EXIT_MATCH))
}

fn enroll_one(
    db_dir: &Path,
    image: &Path,
    cfg: &PipelineConfig,
    entries: &mut BTreeMap<TemplateMeta, String>,
) -> Result<TemplateMeta> {
    let meta = index::meta_from_stem(image).ok_or_else(|| {
        anyhow!("file name must look like <finger>_<impression>.<ext>")
    })?;
    let img = load_grayscale(image)?;
    let template = extract_template(&img, cfg, meta)?;
    let file = format!("{}_{}.fptl", meta.finger, meta.impression);
    save_template(&template, db_dir.join(&file))?;
    entries.insert(meta, file);
    Ok(meta)
}

pub fn verify(template_path: &Path, probe_path: &Path, cfg_args: &ConfigArgs) -> Result<ExitCode> {
    let cfg = resolve_config(cfg_args)?;
    let gallery = load_template(template_path)
        .with_context(|| format!("loading {}", template_path.display()))?;
    let probe_meta = index::meta_from_stem(probe_path).unwrap_or(TemplateMeta {
        finger: 0,
        impression: 0,
    });
    let img = load_grayscale(probe_path)?;
    let probe = extract_template(&img, &cfg, probe_meta)?;
    let decision = matcher::verify(&probe, &gallery, cfg.match_threshold)?;
    print_decision(&decision);
    Ok(ExitCode::from(if decision.matched {
        EXIT_MATCH
    } else {
        EXIT_NO_MATCH
    }))
}

pub fn identify(db_dir: &Path, probe_path: &Path, cfg_args: &ConfigArgs) -> Result<ExitCode> {
    let cfg = resolve_config(cfg_args)?;
    let entries = index::load(db_dir)?;
    if entries.is_empty() {
        return Err(Error::EmptyDatabase.into());
    }
    let mut db = Vec::with_capacity(entries.len());
    for (meta, file) in &entries {
        let template = load_template(db_dir.join(file))
            .with_context(|| format!("loading template {file} for {meta}"))?;
        db.push(template);
    }
    let probe_meta = index::meta_from_stem(probe_path).unwrap_or(TemplateMeta {
        finger: 0,
        impression: 0,
    });
    let img = load_grayscale(probe_path)?;
    let probe = extract_template(&img, &cfg, probe_meta)?;
    let (_, decision) = matcher::identify(&probe, &db, cfg.match_threshold)?;
    print_decision(&decision);
    Ok(ExitCode::from(if decision.matched {
        EXIT_MATCH
    } else {
        EXIT_NO_MATCH
    }))
}

const IMAGE_EXTENSIONS: [&str; 4] = ["pgm", "png", "tif", "tiff"];

/// Corpus files named <finger>_<impression>.<ext>, sorted by id.
fn corpus_files(data_dir: &Path) -> Result<Vec<(TemplateMeta, PathBuf)>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(data_dir)
        .with_context(|| format!("reading {}", data_dir.display()))?
    {
        let path = entry?.path();
        let ext_ok = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
            .unwrap_or(false);
        if !ext_ok {
            continue;
        }
        if let Some(meta) = index::meta_from_stem(&path) {
            files.push((meta, path));
        }
    }
    files.sort_by_key(|(meta, _)| *meta);
    if files.is_empty() {
        bail!("no <finger>_<impression>.<ext> images in {}", data_dir.display());
    }
    Ok(files)
}

pub fn evaluate(
    data_dir: &Path,
    out_dir: &Path,
    grid_radius: &[u32],
    grid_descriptors: &[u16],
    steps: usize,
    cfg_args: &ConfigArgs,
) -> Result<ExitCode> {
    let base_cfg = resolve_config(cfg_args)?;
    let files = corpus_files(data_dir)?;
    fs::create_dir_all(out_dir)?;

    let mut reports = Vec::new();
    for &radius in grid_radius {
        let cfg = PipelineConfig {
            roi_radius: radius,
            ..base_cfg.clone()
        };
        // The raster stages depend on the radius but not on the descriptor
        // count, so minutiae are extracted once per radius.
        let mut sets: Vec<(TemplateMeta, MinutiaeSet)> = Vec::new();
        for (meta, path) in &files {
            let outcome = load_grayscale(path)
                .map_err(anyhow::Error::from)
                .and_then(|img| {
                    let early = run_early(&img, &cfg)?;
                    Ok(run_late(&early, &cfg)?)
                });
            match outcome {
                Ok(late) => sets.push((*meta, late.minutiae)),
                Err(err) => eprintln!("R={radius}: skipping {}: {err:#}", path.display()),
            }
        }
        for &count in grid_descriptors {
            let cfg_k = PipelineConfig {
                descriptor_count: count,
                ..cfg.clone()
            };
            cfg_k.validate()?;
            let mut db: Vec<Template> = Vec::new();
            for (meta, set) in &sets {
                match template_from_minutiae(set, &cfg_k, *meta) {
                    Ok(t) => db.push(t),
                    Err(err) => eprintln!("R={radius} K={count}: skipping {meta}: {err:#}"),
                }
            }
            let scores = collect_scores(&db)?;
            let curve = error_curve(&scores, steps)?;
            let eer = equal_error_rate(&curve);
            write_curve(&curve, &out_dir.join(format!("curve_R{radius}_K{count}.csv")))?;
            reports.push(EvalReport {
                radius: radius as u16,
                descriptor_count: count,
                eer_percent: eer.eer_percent,
                threshold_at_eer: eer.threshold,
                dmin_at_eer: eer.threshold,
                accuracy_percent: accuracy(&curve),
                eer_degenerate: eer.degenerate,
            });
            println!(
                "R={radius} K={count}: {} templates, EER {:.2}%, accuracy {:.2}%",
                db.len(),
                eer.eer_percent,
                accuracy(&curve)
            );
        }
    }
    let report_path = ridgekit_core::eval::emit_report(&reports, out_dir)?;
    println!("wrote {}", report_path.display());
    Ok(ExitCode::from(EXIT_MATCH))
}

const STAGES: [&str; 8] = [
    "enhance",
    "orientation",
    "strength",
    "roi",
    "binary",
    "thin",
    "morphology",
    "minutiae",
];

pub fn inspect(image: &Path, out_dir: &Path, stage: &str, cfg_args: &ConfigArgs) -> Result<ExitCode> {
    let stop = STAGES
        .iter()
        .position(|&s| s == stage)
        .ok_or_else(|| anyhow!("unknown stage '{stage}'; expected one of {STAGES:?}"))?;
    let cfg = resolve_config(cfg_args)?;
    fs::create_dir_all(out_dir)?;
    let img = load_grayscale(image)?;

    let early = run_early(&img, &cfg)?;
    save_pgm(&early.enhanced, out_dir.join("01_enhanced.pgm"))?;
    if stop >= 1 {
        let overlay = render::orientation_overlay(&early.enhanced, &early.field);
        save_pgm(&overlay, out_dir.join("02_orientation.pgm"))?;
    }
    if stop >= 2 {
        let strength = render::strength_to_gray(
            &early.strength,
            early.enhanced.width(),
            early.enhanced.height(),
        );
        save_pgm(&strength, out_dir.join("03_strength.pgm"))?;
    }
    if stop < 3 {
        return Ok(ExitCode::from(EXIT_MATCH));
    }

    let late = run_late(&early, &cfg)?;
    save_pgm(&late.roi, out_dir.join("04_roi.pgm"))?;
    if stop >= 4 {
        save_pgm(&render::binary_to_gray(&late.binary), out_dir.join("05_binary.pgm"))?;
    }
    if stop >= 5 {
        save_pgm(&render::binary_to_gray(&late.thinned), out_dir.join("06_thinned.pgm"))?;
    }
    if stop >= 6 {
        save_pgm(
            &render::binary_to_gray(&late.morphed),
            out_dir.join("07_morphology.pgm"),
        )?;
    }
    if stop >= 7 {
        let overlay = render::minutiae_overlay(&late.morphed, &late.minutiae);
        save_pgm(&overlay, out_dir.join("08_minutiae.pgm"))?;
        let mut csv = String::from("x,y,kind,angle\n");
        for m in &late.minutiae.items {
            csv.push_str(&format!("{},{},{},{:.6}\n", m.x, m.y, m.kind.as_str(), m.angle));
        }
        fs::write(out_dir.join("minutiae.csv"), csv)?;
    }
    Ok(ExitCode::from(EXIT_MATCH))
}
