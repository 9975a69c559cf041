//! Fixture layout: `<root>/<molecule>/<bond_label>.json`, plus
//! `<root>/golden.json` with reference HF and FCI energies.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::hamio::{bond_label, load_integrals, IntegralSet};

pub const FIXTURES_ENV: &str = "ADAPTFORGE_FIXTURES";

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
pub struct GoldenEntry {
    pub hf: f64,
    pub fci: f64,
}

/// Fixture root: `$ADAPTFORGE_FIXTURES` when set, else `explicit`, else `fixtures`.
pub fn fixtures_root(explicit: Option<&Path>) -> PathBuf {
    if let Ok(env) = std::env::var(FIXTURES_ENV) {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    explicit.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("fixtures"))
}

pub fn fixture_path(root: &Path, molecule: &str, bond_length: f64) -> PathBuf {
    root.join(molecule.to_ascii_lowercase()).join(format!("{}.json", bond_label(bond_length)))
}

pub fn load_fixture(root: &Path, molecule: &str, bond_length: f64) -> Result<IntegralSet> {
    let path = fixture_path(root, molecule, bond_length);
    if !path.exists() {
        return Err(Error::Config(format!(
            "missing fixture for {molecule} at {bond_length} A: expected {}",
            path.display()
        )));
    }
    load_integrals(&path)
}

/// Bond lengths with a fixture file, ascending.
pub fn available_bonds(root: &Path, molecule: &str) -> Result<Vec<f64>> {
    let dir = root.join(molecule.to_ascii_lowercase());
    let entries = std::fs::read_dir(&dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
    let mut bonds: Vec<f64> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let name = e.file_name().into_string().ok()?;
            name.strip_suffix(".json")?.parse::<f64>().ok()
        })
        .collect();
    bonds.sort_by(f64::total_cmp);
    Ok(bonds)
}

pub fn load_golden(root: &Path) -> Result<BTreeMap<String, BTreeMap<String, GoldenEntry>>> {
    let path = root.join("golden.json");
    let text = std::fs::read_to_string(&path).map_err(|source| Error::Io { path: path.clone(), source })?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path,
        message: e.to_string(),
    })
}
