//! Output sinks, CSV formatting and run manifests.

use serde::Serialize;
use serde_json::{json, Value};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const SCHEMA: u32 = 1;

/// Run record written next to every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema: u32,
    pub command: String,
    pub config: Value,
    pub version: String,
    pub wall_time_s: f64,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: Value, started: Instant) -> Self {
        let mut warnings = Vec::new();
        let clamps = parabolic_max::series::clamp_count();
        if clamps > 0 {
            let beyond = parabolic_max::series::clamp_violations();
            warnings.push(format!("{clamps} values clamped into range, {beyond} of them by more than 1e-12"));
        }
        Self {
            schema: SCHEMA,
            command: command.to_string(),
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: started.elapsed().as_secs_f64(),
            warnings,
        }
    }
}

/// Formats a value with 17 significant digits, independent of locale.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// CSV text with a header row.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> io::Result<String> {
    csv_records(header, rows.into_iter().map(|r| r.into_iter().map(num).collect()))
}

/// CSV text from preformatted fields.
pub fn csv_records(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
    String::from_utf8(bytes).map_err(io::Error::other)
}

/// JSON payload with the manifest embedded.
pub fn json_document(payload: Value, manifest: &RunManifest) -> String {
    let mut doc = json!({ "schema": SCHEMA });
    if let (Some(d), Value::Object(p)) = (doc.as_object_mut(), payload) {
        d.extend(p);
        d.insert("manifest".into(), serde_json::to_value(manifest).unwrap_or(Value::Null));
    }
    let mut s = serde_json::to_string_pretty(&doc).unwrap_or_default();
    s.push('\n');
    s
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `text` to stdout, or to `out` with the manifest alongside.
pub fn emit(text: &str, out: Option<&Path>, manifest: &RunManifest) -> io::Result<()> {
    match out {
        None => {
            let mut o = io::stdout().lock();
            o.write_all(text.as_bytes())?;
            o.flush()
        }
        Some(p) => {
            std::fs::write(p, text)?;
            let m = serde_json::to_string_pretty(manifest).map_err(io::Error::other)?;
            std::fs::write(manifest_path(p), m + "\n")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.338107410459767), "-2.3381074104597670e0");
        assert_eq!(num(0.0), "0");
        for x in [0.1, 1.0 / 3.0, -7.25e-300, 6.02e23] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let t = csv_table(&["x", "y"], vec![vec![0.0, 1.0], vec![0.5, 0.25]]).unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines, ["x,y", "0,1.0000000000000000e0", "5.0000000000000000e-1,2.5000000000000000e-1"]);
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(manifest_path(Path::new("/tmp/a.csv")), PathBuf::from("/tmp/a.csv.manifest.json"));
    }
}
