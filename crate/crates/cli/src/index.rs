//! The db.tsv template index: finger id, impression id, filename.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use ridgekit_core::TemplateMeta;

pub const INDEX_FILE: &str = "db.tsv";

/// Parses `<finger>_<impression>` from a file stem.
pub fn meta_from_stem(path: &Path) -> Option<TemplateMeta> {
    let stem = path.file_stem()?.to_str()?;
    let (finger, impression) = stem.split_once('_')?;
    Some(TemplateMeta {
        finger: finger.parse().ok()?,
        impression: impression.parse().ok()?,
    })
}

/// Loads the index if present; keys are sorted by (finger, impression).
pub fn load(db_dir: &Path) -> Result<BTreeMap<TemplateMeta, String>> {
    let path = db_dir.join(INDEX_FILE);
    let mut entries = BTreeMap::new();
    if !path.exists() {
        return Ok(entries);
    }
    let text = fs::read_to_string(&path)
        .with_context(|| format!("reading {}", path.display()))?;
    for (i, line) in text.lines().enumerate().skip(1) {
        let mut parts = line.split('\t');
        let (Some(finger), Some(impression), Some(file)) =
            (parts.next(), parts.next(), parts.next())
        else {
            bail!("{}: malformed line {}", path.display(), i + 1);
        };
        let meta = TemplateMeta {
            finger: finger.parse().with_context(|| format!("line {}", i + 1))?,
            impression: impression
                .parse()
                .with_context(|| format!("line {}", i + 1))?,
        };
        entries.insert(meta, file.to_string());
    }
    Ok(entries)
}

/// Writes the index atomically, sorted by (finger, impression).
pub fn save(db_dir: &Path, entries: &BTreeMap<TemplateMeta, String>) -> Result<()> {
    let mut body = String::from("finger\timpression\tfile\n");
    for (meta, file) in entries {
        body.push_str(&format!("{}\t{}\t{}\n", meta.finger, meta.impression, file));
    }
    let path = db_dir.join(INDEX_FILE);
    let tmp = db_dir.join(format!("{INDEX_FILE}.tmp"));
    fs::write(&tmp, body).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, &path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}
