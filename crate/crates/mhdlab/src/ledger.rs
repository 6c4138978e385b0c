//! Persistent record of verification findings.
//!
//! When a check finds that a solution family (or one of its published
//! variants) misses a tolerance, the finding is appended to a small JSON
//! ledger on disk. Entries are keyed by family, variant and check name, so
//! re-running a verification pass updates the existing entry instead of
//! growing the file. The ledger is what turns a red test into an auditable
//! statement: which configuration, which check, how large the defect.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{MhdError, Result};

/// Default file name used by the command line tools.
pub const DEFAULT_LEDGER_PATH: &str = "discrepancy_ledger.json";

/// One recorded finding: a named check that a configuration failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    /// Family identifier, e.g. `"G3/case4"`.
    pub family: String,
    /// Published variant under test, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    /// Name of the check that failed, e.g. `"residual-suite"`.
    pub check: String,
    /// Human-readable explanation of what was observed.
    pub detail: String,
    /// Size of the defect, when a single number captures it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnitude: Option<f64>,
}

impl Discrepancy {
    fn key(&self) -> (String, String, String) {
        (
            self.family.clone(),
            self.variant.clone().unwrap_or_default(),
            self.check.clone(),
        )
    }
}

/// An ordered, deduplicated collection of findings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ledger {
    entries: BTreeMap<(String, String, String), Discrepancy>,
}

impl Ledger {
    /// Creates an empty ledger.
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads a ledger from disk. A missing file yields an empty ledger;
    /// a malformed file is an error.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Ok(Self::new());
        }
        let text = fs::read_to_string(path).map_err(|e| annotate(e, path))?;
        let list: Vec<Discrepancy> = serde_json::from_str(&text)?;
        let mut ledger = Self::new();
        for entry in list {
            ledger.record(entry);
        }
        Ok(ledger)
    }

    /// Inserts or replaces the entry with the same (family, variant, check)
    /// key. Returns `true` when the entry is new or changed.
    pub fn record(&mut self, entry: Discrepancy) -> bool {
        let key = entry.key();
        match self.entries.get(&key) {
            Some(existing) if *existing == entry => false,
            _ => {
                self.entries.insert(key, entry);
                true
            }
        }
    }

    /// Looks up an entry by its identifying triple.
    pub fn find(&self, family: &str, variant: Option<&str>, check: &str) -> Option<&Discrepancy> {
        let key = (
            family.to_string(),
            variant.unwrap_or_default().to_string(),
            check.to_string(),
        );
        self.entries.get(&key)
    }

    /// All entries in key order.
    pub fn entries(&self) -> impl Iterator<Item = &Discrepancy> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Writes the ledger as pretty-printed JSON, entries in key order.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let list: Vec<&Discrepancy> = self.entries.values().collect();
        let mut text = serde_json::to_string_pretty(&list)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| annotate(e, path))
    }
}

/// Attaches the file path to an I/O error before it is wrapped.
fn annotate(err: std::io::Error, path: &Path) -> MhdError {
    MhdError::Io(std::io::Error::new(
        err.kind(),
        format!("{}: {err}", path.display()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scratch_path(tag: &str) -> std::path::PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("mhdlab-ledger-{tag}-{}.json", std::process::id()));
        p
    }

    fn sample_entry() -> Discrepancy {
        Discrepancy {
            family: "G3/case4".into(),
            variant: None,
            check: "residual-suite".into(),
            detail: "induction residual stays finite".into(),
            magnitude: Some(3.2e-2),
        }
    }

    #[test]
    fn recording_is_idempotent() {
        let mut ledger = Ledger::new();
        assert!(ledger.record(sample_entry()));
        assert!(!ledger.record(sample_entry()));
        assert_eq!(ledger.len(), 1);

        let mut changed = sample_entry();
        changed.magnitude = Some(4.0e-2);
        assert!(ledger.record(changed));
        assert_eq!(ledger.len(), 1);
        let stored = ledger.find("G3/case4", None, "residual-suite").unwrap();
        assert_eq!(stored.magnitude, Some(4.0e-2));
    }

    #[test]
    fn variants_get_distinct_entries() {
        let mut ledger = Ledger::new();
        ledger.record(sample_entry());
        let mut other = sample_entry();
        other.variant = Some("printed-vz".into());
        ledger.record(other);
        assert_eq!(ledger.len(), 2);
        assert!(ledger.find("G3/case4", Some("printed-vz"), "residual-suite").is_some());
    }

    #[test]
    fn round_trips_through_disk() {
        let path = scratch_path("roundtrip");
        let mut ledger = Ledger::new();
        ledger.record(sample_entry());
        let mut other = sample_entry();
        other.family = "G6".into();
        other.variant = Some("printed-Bz".into());
        other.magnitude = None;
        ledger.record(other);
        ledger.save(&path).unwrap();

        let reloaded = Ledger::load(&path).unwrap();
        assert_eq!(reloaded, ledger);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.ends_with('\n'));
        assert!(!text.contains("\"magnitude\": null"));
        fs::remove_file(&path).ok();
    }

    #[test]
    fn missing_file_loads_empty() {
        let ledger = Ledger::load(scratch_path("does-not-exist")).unwrap();
        assert!(ledger.is_empty());
    }

    #[test]
    fn entries_come_back_sorted() {
        let mut ledger = Ledger::new();
        for family in ["G9", "G1/gamma=1", "G4"] {
            let mut e = sample_entry();
            e.family = family.into();
            ledger.record(e);
        }
        let order: Vec<&str> = ledger.entries().map(|e| e.family.as_str()).collect();
        assert_eq!(order, ["G1/gamma=1", "G4", "G9"]);
    }
}
