//! Result rows, content-addressed certificates, and their files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Result;

/// One measured value or verdict. `verdict` is empty on purely
/// informational rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub shape: String,
    pub metric: String,
    pub value: String,
    pub verdict: String,
    pub certificate: String,
    pub detail: String,
    pub wall_ms: u64,
}

impl ResultRow {
    pub fn is_failure(&self) -> bool {
        matches!(self.verdict.as_str(), "FAIL" | "VIOLATED")
    }
}

/// Certificates keyed by the SHA-256 of their canonical JSON.
#[derive(Clone, Debug, Default)]
pub struct CertStore {
    certs: BTreeMap<String, serde_json::Value>,
}

impl CertStore {
    pub fn put(&mut self, value: serde_json::Value) -> String {
        let hash = hash_json(&value);
        self.certs.entry(hash.clone()).or_insert(value);
        hash
    }

    pub fn get(&self, hash: &str) -> Option<&serde_json::Value> {
        self.certs.get(hash)
    }

    pub fn len(&self) -> usize {
        self.certs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.certs.is_empty()
    }

    pub fn merge(&mut self, other: CertStore) {
        for (k, v) in other.certs {
            self.certs.entry(k).or_insert(v);
        }
    }

    /// Writes `<dir>/<hash>.json` for every certificate.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (hash, v) in &self.certs {
            fs::write(dir.join(format!("{hash}.json")), serde_json::to_vec_pretty(v)?)?;
        }
        Ok(())
    }
}

/// Object keys are sorted by `serde_json`, so equal values hash equally.
pub fn hash_json(value: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(value).expect("JSON values serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn rows_to_csv(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(["experiment", "shape", "metric", "value", "verdict", "certificate", "detail", "wall_ms"])?;
    }
    let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
}

/// The CSV with the timing column removed, for reproducibility checks.
pub fn strip_timing(csv_text: &str) -> Result<String> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = r.headers()?.clone();
    let keep: Vec<usize> = (0..headers.len()).filter(|&i| &headers[i] != "wall_ms").collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(keep.iter().map(|&i| &headers[i]))?;
    for rec in r.records() {
        let rec = rec?;
        w.write_record(keep.iter().map(|&i| &rec[i]))?;
    }
    let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
}

/// Writes `results.csv`, `results.json` and `certs/` under `dir`.
pub fn write_outputs(dir: &Path, rows: &[ResultRow], certs: &CertStore) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("results.csv"), rows_to_csv(rows)?)?;
    fs::write(dir.join("results.json"), serde_json::to_vec_pretty(rows)?)?;
    certs.write(&dir.join("certs"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn row(ms: u64) -> ResultRow {
        ResultRow {
            experiment: "e".into(),
            shape: "weak-2-3".into(),
            metric: "m".into(),
            value: "92".into(),
            verdict: "PASS".into(),
            certificate: "ab".into(),
            detail: String::new(),
            wall_ms: ms,
        }
    }

    #[test]
    fn hash_ignores_key_order() {
        let a: serde_json::Value = serde_json::from_str(r#"{"b":1,"a":[2,3]}"#).unwrap();
        assert_eq!(hash_json(&a), hash_json(&json!({"a": [2, 3], "b": 1})));
        assert_eq!(hash_json(&a).len(), 64);
        assert_ne!(hash_json(&a), hash_json(&json!({"a": [3, 2], "b": 1})));
    }

    #[test]
    fn store_dedups() {
        let mut s = CertStore::default();
        let h = s.put(json!({"x": 1}));
        assert_eq!(s.put(json!({"x": 1})), h);
        assert_eq!(s.len(), 1);
        assert_eq!(s.get(&h), Some(&json!({"x": 1})));
    }

    #[test]
    fn timing_is_stripped() {
        let a = rows_to_csv(&[row(1)]).unwrap();
        let b = rows_to_csv(&[row(999)]).unwrap();
        assert_ne!(a, b);
        assert_eq!(strip_timing(&a).unwrap(), strip_timing(&b).unwrap());
        assert!(strip_timing(&a).unwrap().starts_with("experiment,shape,metric,value,verdict,certificate,detail\n"));
    }

    #[test]
    fn empty_csv_has_header() {
        assert!(rows_to_csv(&[]).unwrap().starts_with("experiment,"));
    }
}
