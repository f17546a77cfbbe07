//! Atomic file output with a provenance header.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use snewton::io::{FORMAT_VERSION, SOLVER_VERSION};

use crate::Failure;

/// Provenance written at the top of every output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format_version: u32,
    pub solver_version: String,
    pub command: String,
    /// Resolved parameters as `key=value`, in a fixed order.
    pub params: Vec<(String, String)>,
    /// Hash of command and parameters; identical configs give identical ids.
    pub run_id: String,
}

impl Header {
    pub fn new(command: &str, params: Vec<(String, String)>) -> Self {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        for (k, v) in &params {
            h.update(format!("\n{k}={v}").as_bytes());
        }
        let run_id = h.finalize().iter().take(6).fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        Self {
            format_version: FORMAT_VERSION,
            solver_version: SOLVER_VERSION.to_string(),
            command: command.to_string(),
            params,
            run_id,
        }
    }

    pub fn comment(&self) -> String {
        let mut s = format!(
            "# snewton {} format_version={} solver_version={} run_id={}\n",
            self.command, self.format_version, self.solver_version, self.run_id
        );
        if !self.params.is_empty() {
            let p: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(s, "# {}", p.join(" "));
        }
        s
    }
}

pub fn param(key: &str, value: impl ToString) -> (String, String) {
    (key.to_string(), value.to_string())
}

/// 17 significant digits.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &Header, notes: &[String], columns: &[&str]) -> Self {
        let mut text = header.comment();
        for n in notes {
            let _ = writeln!(text, "# {n}");
        }
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn write(&self, path: &Path) -> Result<(), Failure> {
        write_atomic(path, self.text.as_bytes())
    }
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Run(format!("cannot write {}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, bytes).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

/// JSON document carrying a header next to its payload.
#[derive(Serialize, Deserialize)]
pub struct Document<T> {
    pub header: Header,
    #[serde(flatten)]
    pub body: T,
}

pub fn write_json<T: Serialize>(path: &Path, header: &Header, body: &T) -> Result<(), Failure> {
    let doc = Document { header: header.clone(), body };
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Run(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
