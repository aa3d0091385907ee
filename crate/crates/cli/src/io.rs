use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{json, Value};

/// Failure of a command: usage problems exit with 2, everything else with 1.
#[derive(Debug)]
pub enum CliError {
    Usage { flag: String, message: String },
    Domain(hyprig::Error),
}

impl CliError {
    pub fn usage(flag: &str, message: impl Into<String>) -> Self {
        CliError::Usage { flag: flag.to_string(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Domain(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::Usage { flag, message } => {
                json!({"error": {"kind": "Usage", "flag": flag, "message": message}})
            }
            CliError::Domain(e) => json!({"error": {"kind": e.kind(), "message": e.to_string()}}),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage { flag, message } => write!(f, "{flag}: {message}"),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<hyprig::Error> for CliError {
    fn from(e: hyprig::Error) -> Self {
        CliError::Domain(e)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| hyprig::Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| hyprig::Error::InvalidInput(format!("{}: {e}", path.display())).into())
}

/// Where results go.
pub enum Output {
    Json(Value),
    Csv(Vec<Vec<String>>),
}

pub fn emit(out: &Output, path: Option<&PathBuf>) -> Result<(), CliError> {
    let text = match out {
        Output::Json(v) => serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n",
        Output::Csv(rows) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.write_record(r).map_err(|e| hyprig::Error::Io(e.to_string()))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| hyprig::Error::Io(e.to_string()))?)
                .expect("CSV of UTF-8 fields")
        }
    };
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| hyprig::Error::Io(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}
