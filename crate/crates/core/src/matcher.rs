//! Template comparison by Euclidean distance plus threshold decisions.

use crate::descriptor::{Template, TemplateMeta};
use crate::error::{Error, Result};

/// Outcome of comparing a probe template against a gallery template.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchDecision {
    pub distance: f64,
    pub threshold: f64,
    pub matched: bool,
    pub probe: TemplateMeta,
    pub gallery: TemplateMeta,
}

fn check_compatible(a: &Template, b: &Template) -> Result<()> {
    if a.descriptor_count() != b.descriptor_count() {
        return Err(Error::IncompatibleTemplates(format!(
            "descriptor counts differ: {} vs {}",
            a.descriptor_count(),
            b.descriptor_count()
        )));
    }
    if a.radius != b.radius {
        return Err(Error::IncompatibleTemplates(format!(
            "roi radii differ: {} vs {}",
            a.radius, b.radius
        )));
    }
    Ok(())
}

/// Euclidean distance between descriptor vectors. Templates must agree on
/// descriptor count and ROI radius.
pub fn template_distance(a: &Template, b: &Template) -> Result<f64> {
    check_compatible(a, b)?;
    let sum: f64 = a
        .descriptors
        .iter()
        .zip(&b.descriptors)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum.sqrt())
}

/// One-to-one comparison: matched when the distance does not exceed the
/// threshold (boundary inclusive, so a zero threshold accepts duplicates).
pub fn verify(probe: &Template, gallery: &Template, threshold: f64) -> Result<MatchDecision> {
    let distance = template_distance(probe, gallery)?;
    Ok(MatchDecision {
        distance,
        threshold,
        matched: distance <= threshold,
        probe: probe.meta,
        gallery: gallery.meta,
    })
}

/// One-to-many search: returns the gallery template at minimum distance,
/// ties broken by (finger, impression), with the decision rendered against
/// `threshold`.
pub fn identify<'a>(
    probe: &Template,
    db: &'a [Template],
    threshold: f64,
) -> Result<(&'a Template, MatchDecision)> {
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    let mut best: Option<(&Template, f64)> = None;
    for candidate in db {
        let d = template_distance(probe, candidate)?;
        best = match best {
            None => Some((candidate, d)),
            Some((cur, cur_d)) => {
                if d < cur_d || (d == cur_d && candidate.meta < cur.meta) {
                    Some((candidate, d))
                } else {
                    Some((cur, cur_d))
                }
            }
        };
    }
    let (winner, distance) = best.expect("nonempty database");
    Ok((
        winner,
        MatchDecision {
            distance,
            threshold,
            matched: distance <= threshold,
            probe: probe.meta,
            gallery: winner.meta,
        },
    ))
}
