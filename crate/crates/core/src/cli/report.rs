//! Output files: one CSV per job and a consolidated JSON report, each written
//! through a temporary file and renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use super::run::{JobOutcome, Table};
use crate::error::{Error, Result};

pub const REPORT_FILE: &str = "report.json";

fn io(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| io(path, e))?;
    tmp.persist(path).map_err(|e| io(path, e.error))?;
    Ok(())
}

fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// CSV text of a table, optionally preceded by a `# generated-at-unix` line.
pub fn csv_text(table: &Table, timestamp: Option<u64>) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    if let Some(t) = timestamp {
        out.extend_from_slice(format!("# generated-at-unix {t}\n").as_bytes());
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(&table.header).map_err(err)?;
    for row in &table.rows {
        w.write_record(row).map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

pub fn report_json(hash: &str, command: &str, seed: u64, outcomes: &[JobOutcome], timestamp: Option<u64>) -> Value {
    let jobs: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            json!({
                "name": o.name,
                "kind": o.kind,
                "inputs": o.inputs,
                "status": o.status,
                "message": o.message,
                "results": o.results,
                "csv": o.table.as_ref().map(|_| format!("{}.csv", o.name)),
            })
        })
        .collect();
    let mut doc = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config-hash": hash,
        "command": command,
        "seed": seed,
        "jobs": jobs,
    });
    if let Some(t) = timestamp {
        doc["generated-at-unix"] = json!(t);
    }
    doc
}

/// Writes every table and the report into `out`, returning the paths written.
pub fn write_outputs(out: &Path, hash: &str, command: &str, seed: u64, outcomes: &[JobOutcome], timestamp: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out).map_err(|e| io(out, e))?;
    let stamp = timestamp.then(now_unix);
    let mut written = Vec::new();
    for o in outcomes {
        if let Some(t) = &o.table {
            let path = out.join(format!("{}.csv", o.name));
            write_atomic(&path, &csv_text(t, stamp)?)?;
            written.push(path);
        }
    }
    let path = out.join(REPORT_FILE);
    let mut text = serde_json::to_vec_pretty(&report_json(hash, command, seed, outcomes, stamp)).map_err(|e| io(&path, e))?;
    text.push(b'\n');
    write_atomic(&path, &text)?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_lf_and_optional_stamp() {
        let t = Table { header: vec!["a".into(), "b".into()], rows: vec![vec!["1".into(), "x,y".into()]] };
        assert_eq!(csv_text(&t, None).unwrap(), b"a,b\n1,\"x,y\"\n");
        let s = String::from_utf8(csv_text(&t, Some(12)).unwrap()).unwrap();
        assert!(s.starts_with("# generated-at-unix 12\na,b\n"));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
