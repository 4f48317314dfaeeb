use lipext::Error;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fmt;
use std::fs;
use std::path::Path;

/// Failure carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(2, message)
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new(3, message)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence(_) => 4,
            Error::EnumerationGuard { .. } => 5,
            Error::BoxExhausted { .. } => 6,
            _ => 3,
        };
        Failure::new(code, e.to_string())
    }
}

pub fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

/// Rows of comma-separated floats; a first row that does not parse is taken as a header.
pub fn read_points(path: &Path, dim: usize) -> Result<Vec<Vec<f64>>, Failure> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 1;
        let rec = rec.map_err(|e| Failure::parse(format!("{}: line {line}: {e}", path.display())))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = rec.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(row) => {
                if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                    return Err(Failure::parse(format!("{}: line {line}, column {}: non-finite value", path.display(), j + 1)));
                }
                if row.len() != dim {
                    return Err(Failure::invalid(format!("{}: line {line}: expected {dim} values, found {}", path.display(), row.len())));
                }
                rows.push(row);
            }
            Err(_) if i == 0 => {}
            Err(_) => {
                let col = rec.iter().position(|f| f.parse::<f64>().is_err()).unwrap_or(0) + 1;
                return Err(Failure::parse(format!("{}: line {line}, column {col}: not a number", path.display())));
            }
        }
    }
    Ok(rows)
}

/// Shortest round-trip form; scientific notation for very small or large magnitudes.
pub fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v != 0.0 && !(1e-5..1e16).contains(&v.abs()) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn csv_line(fields: impl IntoIterator<Item = String>) -> String {
    let mut s = fields.into_iter().collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::new(2, e.to_string()))?;
    s.push('\n');
    write_text(path, &s)
}
