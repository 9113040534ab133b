use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};
use std::{fs, io};

pub const TOOL: &str = "qfa";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl Provenance {
    pub fn new(command: &str, parameters: impl Serialize, seed: Option<u64>, stamp: bool) -> Self {
        let timestamp = stamp.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        });
        Provenance {
            tool: TOOL,
            version: VERSION,
            command: command.into(),
            parameters: serde_json::to_value(parameters).expect("parameters serialize"),
            seed,
            timestamp,
        }
    }

    /// The block as `# key: value` lines for CSV output.
    pub fn comment_lines(&self) -> String {
        let mut s = format!(
            "# tool: {} {}\n# command: {}\n",
            self.tool, self.version, self.command
        );
        s += &format!("# parameters: {}\n", self.parameters);
        if let Some(seed) = self.seed {
            s += &format!("# seed: {seed}\n");
        }
        if let Some(t) = self.timestamp {
            s += &format!("# timestamp: {t}\n");
        }
        s
    }
}

/// A `qsreport-1` document: the provenance block followed by `body`'s fields.
pub fn report(prov: &Provenance, body: impl Serialize) -> String {
    let mut doc = json!({ "format": qfa_core::engines::REPORT_FORMAT, "provenance": prov });
    match serde_json::to_value(body).expect("report serializes") {
        Value::Object(fields) => {
            for (k, v) in fields {
                if k != "format" {
                    doc[k] = v;
                }
            }
        }
        other => doc["result"] = other,
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, text: &str) -> io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::other("output path has no file name"))?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(text.as_bytes())?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

pub fn emit(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(p) => write_atomic(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}
