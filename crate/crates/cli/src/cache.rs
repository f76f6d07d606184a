//! On-disk cache of Groebner bases and generator preimages. Every write goes
//! to a temporary file in the cache directory and is renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chow_core::chowring::ProductEngine;
use chow_core::invariants::{fundamental_invariants, GroebnerBasis};
use chow_core::preimage::Variant;
use chow_core::{ChowRing, QPoly, RootSystem};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub struct Cache {
    dir: PathBuf,
}

pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Delta => "delta",
        Variant::Invariance => "invariance",
    }
}

fn invariants_hash(rs: &RootSystem, t: u32) -> Result<String> {
    let inv = fundamental_invariants(rs, Some(t))?;
    let mut h = Sha256::new();
    h.update(rs.spec.to_string());
    for g in &inv.generators {
        h.update(b"\n");
        h.update(g.to_string());
    }
    Ok(h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect())
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn groebner_prefix(rs: &RootSystem) -> String {
        format!("groebner-{}-grevlex-t", rs.spec)
    }

    /// The cached basis of smallest truncation `≥ degree` whose generators
    /// hash to the current invariants.
    pub fn load_groebner(&self, rs: &RootSystem, degree: u32) -> Result<Option<GroebnerBasis>> {
        let prefix = Self::groebner_prefix(rs);
        let mut found: Vec<(u32, String, PathBuf)> = Vec::new();
        let Ok(rd) = fs::read_dir(&self.dir) else {
            return Ok(None);
        };
        for e in rd.flatten() {
            let name = e.file_name().to_string_lossy().into_owned();
            let Some(rest) = name.strip_prefix(&prefix).and_then(|r| r.strip_suffix(".json")) else {
                continue;
            };
            let Some((t, hash)) = rest.split_once('-') else {
                continue;
            };
            if let Ok(t) = t.parse::<u32>() {
                if t >= degree {
                    found.push((t, hash.to_string(), e.path()));
                }
            }
        }
        found.sort();
        for (t, hash, path) in found {
            if invariants_hash(rs, t)? != hash {
                log::warn!("ignoring {}: generator hash mismatch", path.display());
                continue;
            }
            let text = fs::read_to_string(&path)?;
            let v: Value = serde_json::from_str(&text)?;
            match GroebnerBasis::from_json(&v) {
                Ok(gb) if gb.truncation() == Some(t) && gb.nvars() == rs.rank() => {
                    log::info!("loaded {}", path.display());
                    return Ok(Some(gb));
                }
                _ => log::warn!("ignoring malformed {}", path.display()),
            }
        }
        Ok(None)
    }

    pub fn store_groebner(&self, rs: &RootSystem, gb: &GroebnerBasis) -> Result<()> {
        let Some(t) = gb.truncation() else {
            return Ok(());
        };
        let hash = invariants_hash(rs, t)?;
        let path = self.dir.join(format!("{}{t}-{hash}.json", Self::groebner_prefix(rs)));
        if path.exists() {
            return Ok(());
        }
        let meta = json!({"type": rs.spec.to_string(), "generators": "orbit power sums"});
        write_atomic(&path, serde_json::to_string(&gb.to_json(meta))?.as_bytes())?;
        log::info!("wrote {}", path.display());
        Ok(())
    }

    fn preimage_path(&self, ring: &ChowRing, variant: Variant) -> PathBuf {
        let omitted: Vec<String> = ring.theta().omitted().iter().map(|i| (i + 1).to_string()).collect();
        self.dir.join(format!(
            "preimages-{}-P{}-{}.json",
            ring.spec(),
            omitted.join("_"),
            variant_name(variant)
        ))
    }

    /// Cached generator preimages, located by path word.
    pub fn load_preimages(&self, ring: &ChowRing, variant: Variant) -> Result<Vec<(usize, QPoly)>> {
        let path = self.preimage_path(ring, variant);
        let Ok(text) = fs::read_to_string(&path) else {
            return Ok(Vec::new());
        };
        let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let mut out = Vec::new();
        for g in v["generators"].as_array().into_iter().flatten() {
            let word: Vec<usize> = g["word"]
                .as_array()
                .into_iter()
                .flatten()
                .filter_map(|a| a.as_u64().map(|a| a as usize))
                .collect();
            let (Ok(u), Some(p)) = (ring.index_by_word(&word), g["polynomial"].as_str()) else {
                log::warn!("ignoring a malformed entry in {}", path.display());
                continue;
            };
            out.push((u, QPoly::parse(ring.root_system().rank(), p)?));
        }
        log::info!("loaded {} preimages from {}", out.len(), path.display());
        Ok(out)
    }

    pub fn store_preimages(&self, ring: &ChowRing, variant: Variant, engine: &ProductEngine) -> Result<()> {
        let gens: Vec<Value> = engine
            .generators
            .iter()
            .filter_map(|g| {
                g.preimage.as_ref().map(|p| {
                    json!({
                        "class": ring.label(g.class),
                        "codim": g.codim,
                        "word": ring.class(g.class).word,
                        "polynomial": p.to_string(),
                    })
                })
            })
            .collect();
        let omitted: Vec<usize> = ring.theta().omitted().iter().map(|i| i + 1).collect();
        let doc = json!({
            "type": ring.spec().to_string(),
            "parabolic": omitted,
            "variant": variant_name(variant),
            "generators": gens,
        });
        let text = serde_json::to_string_pretty(&doc)?;
        let path = self.preimage_path(ring, variant);
        if fs::read_to_string(&path).ok().as_deref() == Some(text.as_str()) {
            return Ok(());
        }
        write_atomic(&path, text.as_bytes())?;
        log::info!("wrote {}", path.display());
        Ok(())
    }

    /// Cache files with their sizes in bytes.
    pub fn entries(&self) -> Result<Vec<(String, u64)>> {
        let mut out = Vec::new();
        let Ok(rd) = fs::read_dir(&self.dir) else {
            return Ok(out);
        };
        for e in rd.flatten() {
            let name = e.file_name().to_string_lossy().into_owned();
            if Self::is_ours(&name) {
                out.push((name, e.metadata()?.len()));
            }
        }
        out.sort();
        Ok(out)
    }

    fn is_ours(name: &str) -> bool {
        (name.starts_with("groebner-") || name.starts_with("preimages-")) && name.ends_with(".json")
    }

    /// Removes the cache files; other files in the directory are left alone.
    pub fn clear(&self) -> Result<usize> {
        let entries = self.entries()?;
        for (name, _) in &entries {
            fs::remove_file(self.dir.join(name))?;
        }
        Ok(entries.len())
    }
}
