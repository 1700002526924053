//! On-disk cache of Kazhdan-Lusztig basis elements, one file per Cartan type.
//!
//! Entries are keyed `"<family>/<rank>/<w>"`, e.g. `"A/2/1,2,1"`, and the file
//! carries a SHA-256 checksum of its entries. A file that fails to parse, has
//! a bad checksum, or contains an element that is not the KL basis element it
//! claims to be is ignored and overwritten.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use mixflag::coxeter::{CartanType, CoxeterSystem, WeylElement};
use mixflag::hecke::{HeckeAlgebra, HeckeElement};
use mixflag::ring::LaurentPoly;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

type Entries = BTreeMap<String, BTreeMap<String, LaurentPoly>>;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    checksum: String,
    entries: Entries,
}

fn path(dir: &Path, ty: CartanType) -> PathBuf {
    dir.join(format!("kl-{ty}.json"))
}

fn prefix(ty: CartanType) -> String {
    format!("{:?}/{}/", ty.family(), ty.rank())
}

fn checksum(entries: &Entries) -> String {
    let bytes = serde_json::to_vec(entries).expect("cache serialization");
    hex::encode(Sha256::digest(bytes))
}

fn parse_label(sys: &CoxeterSystem, label: &str) -> Option<WeylElement> {
    if label == "e" {
        return Some(WeylElement::identity());
    }
    let word: Vec<usize> = label.split(',').map(str::parse).collect::<Result<_, _>>().ok()?;
    let w = sys.element_one_based(&word).ok()?;
    (w.label() == label).then_some(w)
}

fn decode(hecke: &HeckeAlgebra, file: &CacheFile) -> Option<Vec<(WeylElement, HeckeElement)>> {
    if checksum(&file.entries) != file.checksum {
        return None;
    }
    let sys = hecke.system();
    let prefix = prefix(sys.cartan_type());
    let mut out = Vec::new();
    for (key, terms) in &file.entries {
        let w = parse_label(sys, key.strip_prefix(&prefix)?)?;
        let mut b = HeckeElement::zero();
        for (y, c) in terms {
            b.add_term(parse_label(sys, y)?, c);
        }
        out.push((w, b));
    }
    Some(out)
}

/// Seeds `hecke` from the cache; returns the number of entries installed.
pub fn load(dir: &Path, hecke: &HeckeAlgebra) -> usize {
    let ty = hecke.system().cartan_type();
    let file = path(dir, ty);
    let Ok(text) = fs::read_to_string(&file) else { return 0 };
    let decoded = serde_json::from_str::<CacheFile>(&text)
        .ok()
        .and_then(|f| decode(hecke, &f));
    let Some(entries) = decoded else {
        eprintln!("warning: ignoring corrupted KL cache {}", file.display());
        return 0;
    };
    let mut installed = 0;
    for (w, b) in entries {
        if hecke.seed_kl(&w, b) {
            installed += 1;
        } else {
            eprintln!(
                "warning: KL cache {} has a wrong entry for {w}; recomputing it",
                file.display()
            );
        }
    }
    installed
}

pub fn save(dir: &Path, ty: CartanType, entries: &[(WeylElement, HeckeElement)]) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
    let prefix = prefix(ty);
    let entries: Entries = entries
        .iter()
        .map(|(w, b)| {
            let terms = b.terms().map(|(y, c)| (y.label(), c.clone())).collect();
            (format!("{prefix}{}", w.label()), terms)
        })
        .collect();
    let file = CacheFile {
        checksum: checksum(&entries),
        entries,
    };
    let target = path(dir, ty);
    let tmp = target.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_string(&file)?).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, &target).with_context(|| format!("writing {}", target.display()))?;
    Ok(())
}
