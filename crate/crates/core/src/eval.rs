//! Verification error rates over a template database: FAR/FRR threshold
//! sweeps, equal error rate, best-half-total-error accuracy and report
//! emission.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::descriptor::Template;
use crate::error::{Error, Result};
use crate::matcher::template_distance;

/// Genuine (same finger) and impostor (different finger) distance scores.
#[derive(Debug, Clone)]
pub struct ScoreSet {
    pub genuine: Vec<f64>,
    pub impostor: Vec<f64>,
}

/// FAR/FRR sampled over an ascending threshold grid. With distance scores,
/// acceptance means distance <= threshold, so FAR is nondecreasing and FRR
/// nonincreasing in the threshold.
#[derive(Debug, Clone)]
pub struct ErrorCurve {
    pub thresholds: Vec<f64>,
    pub far: Vec<f64>,
    pub frr: Vec<f64>,
}

/// Equal-error-rate operating point. When the curves never cross,
/// `degenerate` is set and the value reported is the smallest max(FAR, FRR)
/// over the sampled thresholds.
#[derive(Debug, Clone, Copy)]
pub struct EerPoint {
    pub eer_percent: f64,
    pub threshold: f64,
    pub degenerate: bool,
}

/// One evaluated configuration, i.e. one row of the final report.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub radius: u16,
    pub descriptor_count: u16,
    pub eer_percent: f64,
    pub threshold_at_eer: f64,
    /// Distance value at the equal-error operating point. The sweep runs
    /// directly in distance space, so this coincides with the threshold.
    pub dmin_at_eer: f64,
    pub accuracy_percent: f64,
    pub eer_degenerate: bool,
}

/// Collects genuine and impostor distances under the FVC pairing protocol:
/// every within-finger impression pair once, and the first impression of
/// each finger against the first impression of every other finger.
pub fn collect_scores(db: &[Template]) -> Result<ScoreSet> {
    let mut by_finger: BTreeMap<u32, Vec<&Template>> = BTreeMap::new();
    for t in db {
        by_finger.entry(t.meta.finger).or_default().push(t);
    }
    for group in by_finger.values_mut() {
        group.sort_by_key(|t| t.meta.impression);
    }

    let mut genuine = Vec::new();
    for group in by_finger.values() {
        for i in 0..group.len() {
            for j in i + 1..group.len() {
                genuine.push(template_distance(group[i], group[j])?);
            }
        }
    }
    let firsts: Vec<&Template> = by_finger.values().map(|g| g[0]).collect();
    let mut impostor = Vec::new();
    for i in 0..firsts.len() {
        for j in i + 1..firsts.len() {
            impostor.push(template_distance(firsts[i], firsts[j])?);
        }
    }
    if genuine.is_empty() {
        return Err(Error::InsufficientData(
            "no finger has two or more impressions".into(),
        ));
    }
    if impostor.is_empty() {
        return Err(Error::InsufficientData(
            "need at least two distinct fingers".into(),
        ));
    }
    Ok(ScoreSet { genuine, impostor })
}

/// Sweeps `steps` evenly spaced thresholds across the observed score range.
/// FAR(t) is the impostor fraction at or below t; FRR(t) the genuine
/// fraction above t.
pub fn error_curve(scores: &ScoreSet, steps: usize) -> Result<ErrorCurve> {
    if scores.genuine.is_empty() || scores.impostor.is_empty() {
        return Err(Error::InsufficientData(
            "both genuine and impostor scores are required".into(),
        ));
    }
    if steps < 2 {
        return Err(Error::InsufficientData(
            "threshold sweep needs at least 2 steps".into(),
        ));
    }
    let all = scores.genuine.iter().chain(&scores.impostor);
    let lo = all.clone().fold(f64::INFINITY, |a, &b| a.min(b));
    let hi = all.fold(f64::NEG_INFINITY, |a, &b| a.max(b));

    let mut thresholds = Vec::with_capacity(steps);
    let mut far = Vec::with_capacity(steps);
    let mut frr = Vec::with_capacity(steps);
    for i in 0..steps {
        let t = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
        let fa = scores.impostor.iter().filter(|&&s| s <= t).count() as f64
            / scores.impostor.len() as f64;
        let fr =
            scores.genuine.iter().filter(|&&s| s > t).count() as f64 / scores.genuine.len() as f64;
        thresholds.push(t);
        far.push(fa);
        frr.push(fr);
    }
    Ok(ErrorCurve {
        thresholds,
        far,
        frr,
    })
}

/// Locates the FAR/FRR crossing. An exact FAR = FRR sample wins; otherwise
/// the first sign change is linearly interpolated. The lowest-threshold
/// crossing is reported when there are several.
pub fn equal_error_rate(curve: &ErrorCurve) -> EerPoint {
    let n = curve.thresholds.len();
    for i in 0..n {
        let d = curve.far[i] - curve.frr[i];
        if d == 0.0 {
            return EerPoint {
                eer_percent: 100.0 * curve.far[i],
                threshold: curve.thresholds[i],
                degenerate: false,
            };
        }
        if i + 1 < n {
            let d_next = curve.far[i + 1] - curve.frr[i + 1];
            if d * d_next < 0.0 {
                let alpha = d / (d - d_next);
                let rate = curve.far[i] + alpha * (curve.far[i + 1] - curve.far[i]);
                return EerPoint {
                    eer_percent: 100.0 * rate,
                    threshold: curve.thresholds[i]
                        + alpha * (curve.thresholds[i + 1] - curve.thresholds[i]),
                    degenerate: false,
                };
            }
        }
    }
    // No crossing: report the best max(FAR, FRR) over the sweep.
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let m = curve.far[i].max(curve.frr[i]);
        if m < best {
            best = m;
            best_i = i;
        }
    }
    EerPoint {
        eer_percent: 100.0 * best,
        threshold: curve.thresholds[best_i],
        degenerate: true,
    }
}

/// Best achievable half-total-error accuracy over the sweep:
/// `100 * (1 - min (FAR + FRR) / 2)`.
pub fn accuracy(curve: &ErrorCurve) -> f64 {
    let best = curve
        .far
        .iter()
        .zip(&curve.frr)
        .map(|(fa, fr)| (fa + fr) / 2.0)
        .fold(f64::INFINITY, f64::min);
    100.0 * (1.0 - best)
}

/// Writes `report.tsv`: one row per evaluated configuration. Alongside the
/// best-half-total-error accuracy, the 100-EER and 100-2*EER readings are
/// printed so all common accuracy conventions are visible.
pub fn emit_report(reports: &[EvalReport], out_dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let mut body = String::from(
        "radius\tdescriptors\teer\tdmin_at_eer\taccuracy\tthreshold\taccuracy_100_minus_eer\taccuracy_100_minus_2eer\teer_degenerate\n",
    );
    for r in reports {
        body.push_str(&format!(
            "{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{}\n",
            r.radius,
            r.descriptor_count,
            r.eer_percent,
            r.dmin_at_eer,
            r.accuracy_percent,
            r.threshold_at_eer,
            100.0 - r.eer_percent,
            100.0 - 2.0 * r.eer_percent,
            r.eer_degenerate,
        ));
    }
    let path = out_dir.join("report.tsv");
    fs::write(&path, body)?;
    Ok(path)
}

/// Writes a `(threshold, FAR, FRR)` curve as CSV for external plotting.
pub fn write_curve(curve: &ErrorCurve, path: &Path) -> Result<()> {
    let mut body = String::from("threshold,far,frr\n");
    for i in 0..curve.thresholds.len() {
        body.push_str(&format!(
            "{:.4},{:.4},{:.4}\n",
            curve.thresholds[i], curve.far[i], curve.frr[i]
        ));
    }
    fs::write(path, body)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::TemplateMeta;
    use proptest::prelude::*;

    fn template(finger: u32, impression: u16, descriptors: Vec<f64>) -> Template {
        Template {
            descriptors,
            signature_slots: 128,
            radius: 100,
            meta: TemplateMeta { finger, impression },
        }
    }

    #[test]
    fn fvc_pair_counts() {
        let mut db = Vec::new();
        for finger in 1..=10u32 {
            for imp in 1..=8u16 {
                db.push(template(finger, imp, vec![finger as f64, imp as f64]));
            }
        }
        let scores = collect_scores(&db).unwrap();
        assert_eq!(scores.genuine.len(), 10 * 28); // 10 * C(8,2)
        assert_eq!(scores.impostor.len(), 45); // C(10,2)
    }

    #[test]
    fn two_by_two_pair_counts() {
        let db = vec![
            template(1, 1, vec![0.0]),
            template(1, 2, vec![1.0]),
            template(2, 1, vec![5.0]),
            template(2, 2, vec![6.0]),
        ];
        let scores = collect_scores(&db).unwrap();
        assert_eq!(scores.genuine.len(), 2);
        assert_eq!(scores.impostor.len(), 1);
    }

    #[test]
    fn identical_templates_score_zero() {
        let db = vec![
            template(1, 1, vec![3.0, 3.0]),
            template(1, 2, vec![3.0, 3.0]),
            template(2, 1, vec![3.0, 3.0]),
        ];
        let scores = collect_scores(&db).unwrap();
        assert!(scores.genuine.iter().all(|&s| s == 0.0));
        assert!(scores.impostor.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn single_finger_is_insufficient() {
        let db = vec![template(1, 1, vec![0.0]), template(1, 2, vec![1.0])];
        assert!(matches!(
            collect_scores(&db),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn separable_scores_give_clean_midpoint() {
        let scores = ScoreSet {
            genuine: vec![1.0; 10],
            impostor: vec![3.0; 10],
        };
        let curve = error_curve(&scores, 3).unwrap();
        assert_eq!(curve.thresholds[1], 2.0);
        assert_eq!(curve.far[1], 0.0);
        assert_eq!(curve.frr[1], 0.0);
    }

    #[test]
    fn identical_distributions_sum_to_one() {
        let vals = vec![0.5, 1.0, 2.0, 2.5, 4.0];
        let scores = ScoreSet {
            genuine: vals.clone(),
            impostor: vals,
        };
        let curve = error_curve(&scores, 50).unwrap();
        for i in 0..curve.thresholds.len() {
            assert!((curve.far[i] + curve.frr[i] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn curve_endpoints_saturate() {
        let scores = ScoreSet {
            genuine: vec![1.0, 2.0, 3.0],
            impostor: vec![2.5, 4.0, 6.0],
        };
        let curve = error_curve(&scores, 100).unwrap();
        let last = curve.thresholds.len() - 1;
        assert_eq!(curve.far[last], 1.0);
        assert_eq!(curve.frr[last], 0.0);
        // First threshold equals the minimum score: everything at or below
        // it is accepted.
        assert_eq!(curve.frr[0], 2.0 / 3.0);
    }

    #[test]
    fn eer_of_separable_scores_is_zero() {
        let scores = ScoreSet {
            genuine: vec![0.5, 1.0, 1.5],
            impostor: vec![5.0, 6.0, 7.0],
        };
        let curve = error_curve(&scores, 200).unwrap();
        let eer = equal_error_rate(&curve);
        assert!(!eer.degenerate);
        assert!(eer.eer_percent.abs() < 1e-9);
        assert_eq!(accuracy(&curve), 100.0);
    }

    #[test]
    fn eer_of_identical_distributions_is_fifty() {
        let vals: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let scores = ScoreSet {
            genuine: vals.clone(),
            impostor: vals,
        };
        let curve = error_curve(&scores, 200).unwrap();
        let eer = equal_error_rate(&curve);
        assert!((eer.eer_percent - 50.0).abs() < 1.0);
        assert!((accuracy(&curve) - 50.0).abs() < 1.0);
    }

    #[test]
    fn eer_matches_analytic_uniform_overlap() {
        // Genuine uniform on [0, 1], impostor uniform on [0.5, 1.5]:
        // FAR(t) = t - 0.5, FRR(t) = 1 - t, crossing at t = 0.75, EER 25%.
        let n = 400;
        let genuine: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let impostor: Vec<f64> = (0..=n).map(|i| 0.5 + i as f64 / n as f64).collect();
        let scores = ScoreSet { genuine, impostor };
        let curve = error_curve(&scores, 200).unwrap();
        let eer = equal_error_rate(&curve);
        assert!(
            (eer.eer_percent - 25.0).abs() <= 0.5,
            "EER {} not within 0.5pp of 25",
            eer.eer_percent
        );
        assert!((eer.threshold - 0.75).abs() < 0.02);
    }

    #[test]
    fn degenerate_curve_reports_best_operating_point() {
        // FAR above FRR everywhere.
        let curve = ErrorCurve {
            thresholds: vec![0.0, 1.0, 2.0],
            far: vec![0.4, 0.6, 1.0],
            frr: vec![0.2, 0.1, 0.0],
        };
        let eer = equal_error_rate(&curve);
        assert!(eer.degenerate);
        assert!((eer.eer_percent - 40.0).abs() < 1e-9);
        assert_eq!(eer.threshold, 0.0);
    }

    #[test]
    fn report_and_curve_files_have_expected_shape() {
        let dir = tempfile::tempdir().unwrap();
        let reports = vec![EvalReport {
            radius: 100,
            descriptor_count: 80,
            eer_percent: 3.0,
            threshold_at_eer: 120.5,
            dmin_at_eer: 120.5,
            accuracy_percent: 97.0,
            eer_degenerate: false,
        }];
        let path = emit_report(&reports, dir.path()).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("radius\tdescriptors\teer"));
        assert!(lines[1].starts_with("100\t80\t3.0000\t120.5000\t97.0000\t120.5000\t97.0000\t94.0000"));

        let scores = ScoreSet {
            genuine: (0..50).map(|i| i as f64).collect(),
            impostor: (0..50).map(|i| i as f64 + 10.0).collect(),
        };
        let curve = error_curve(&scores, 100).unwrap();
        let cpath = dir.path().join("curve.csv");
        write_curve(&curve, &cpath).unwrap();
        let ctext = fs::read_to_string(&cpath).unwrap();
        assert_eq!(ctext.lines().count(), 101);
        assert_eq!(ctext.lines().next().unwrap(), "threshold,far,frr");
    }

    proptest! {
        #[test]
        fn rates_match_brute_force_and_are_monotone(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let genuine: Vec<f64> = (0..rng.random_range(1..60))
                .map(|_| rng.random_range(0.0..10.0)).collect();
            let impostor: Vec<f64> = (0..rng.random_range(1..60))
                .map(|_| rng.random_range(2.0..14.0)).collect();
            let scores = ScoreSet { genuine: genuine.clone(), impostor: impostor.clone() };
            let curve = error_curve(&scores, 64).unwrap();
            for i in 0..curve.thresholds.len() {
                let t = curve.thresholds[i];
                let fa = impostor.iter().filter(|&&s| s <= t).count() as f64 / impostor.len() as f64;
                let fr = genuine.iter().filter(|&&s| s > t).count() as f64 / genuine.len() as f64;
                prop_assert_eq!(curve.far[i], fa);
                prop_assert_eq!(curve.frr[i], fr);
                if i > 0 {
                    prop_assert!(curve.far[i] >= curve.far[i - 1]);
                    prop_assert!(curve.frr[i] <= curve.frr[i - 1]);
                }
                prop_assert!((0.0..=1.0).contains(&curve.far[i]));
                prop_assert!((0.0..=1.0).contains(&curve.frr[i]));
            }
        }

        #[test]
        fn pair_counts_match_combinatorics(fingers in 2u32..8, impressions in 2u16..6) {
            let mut db = Vec::new();
            for f in 1..=fingers {
                for imp in 1..=impressions {
                    db.push(template(f, imp, vec![f as f64 * 10.0 + imp as f64]));
                }
            }
            let scores = collect_scores(&db).unwrap();
            let g = fingers as usize * (impressions as usize * (impressions as usize - 1)) / 2;
            let i = fingers as usize * (fingers as usize - 1) / 2;
            prop_assert_eq!(scores.genuine.len(), g);
            prop_assert_eq!(scores.impostor.len(), i);
        }
    }
}
