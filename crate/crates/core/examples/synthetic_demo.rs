//! Runs the pipeline over a small synthetic corpus and prints minutiae
//! counts, genuine/impostor distance ranges and the resulting error rates.
//! Useful as a smoke check when no fingerprint corpus is on disk.

use ridgekit_core::descriptor::TemplateMeta;
use ridgekit_core::eval::{collect_scores, equal_error_rate, error_curve};
use ridgekit_core::pipeline::{extract_template, run_early, run_late};
use ridgekit_core::synth::synthetic_fingerprint;
use ridgekit_core::PipelineConfig;

fn main() {
    let cfg = PipelineConfig::default();
    let fingers = 6u32;
    let impressions = 4u16;

    let mut templates = Vec::new();
    for finger in 1..=fingers {
        for impression in 1..=impressions {
            let img = synthetic_fingerprint(400, 400, finger as u64, impression);
            let early = run_early(&img, &cfg).expect("early stages");
            match run_late(&early, &cfg) {
                Ok(late) => {
                    println!(
                        "finger {finger} imp {impression}: core ({}, {}) strength {:.3}, {} minutiae",
                        late.core.x,
                        late.core.y,
                        late.core.strength,
                        late.minutiae.items.len()
                    );
                    let meta = TemplateMeta { finger, impression };
                    templates.push(extract_template(&img, &cfg, meta).expect("template"));
                }
                Err(e) => println!("finger {finger} imp {impression}: {e}"),
            }
        }
    }

    let scores = collect_scores(&templates).expect("scores");
    let stats = |name: &str, v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        println!("{name}: n={} min={lo:.2} mean={mean:.2} max={hi:.2}", v.len());
    };
    stats("genuine ", &scores.genuine);
    stats("impostor", &scores.impostor);

    let curve = error_curve(&scores, 200).expect("curve");
    let eer = equal_error_rate(&curve);
    println!(
        "EER {:.2}% at threshold {:.2} (degenerate: {})",
        eer.eer_percent, eer.threshold, eer.degenerate
    );
}
