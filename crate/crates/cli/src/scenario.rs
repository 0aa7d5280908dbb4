//! Scenario CSV and JSON sidecar input, CSV output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ramp_dispatch::{ErrorModel, HourRecord, SampleMode};
use serde::Deserialize;

use crate::CliError;

pub const HEADER: [&str; 8] = ["hour", "a", "b", "c", "Qz", "Q0", "QT", "ET"];

/// Reads an hourly scenario file. Errors name the offending line.
pub fn read_scenario(path: &Path) -> Result<Vec<HourRecord>, CliError> {
    let display = path.display();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::validation(format!("{display}: {e}")))?;
    let header = reader
        .headers()
        .map_err(|e| CliError::validation(format!("{display}: line 1: {e}")))?
        .clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(CliError::validation(format!(
            "{display}: line 1: expected header `{}`, found `{}`",
            HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows: Vec<HourRecord> = Vec::new();
    for result in reader.deserialize::<HourRecord>() {
        let row = result.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CliError::validation(format!("{display}: line {line}: {}", describe_csv_error(&e)))
        })?;
        let line = rows.len() + 2;
        let fields = [row.a, row.b, row.c, row.qz, row.q0, row.qt, row.et];
        if let Some((name, value)) = HEADER[1..].iter().zip(fields).find(|(_, v)| !v.is_finite()) {
            return Err(CliError::validation(format!("{display}: line {line}: `{name}` = {value} is not finite")));
        }
        if let Some(prev) = rows.last() {
            if row.hour <= prev.hour {
                return Err(CliError::validation(format!(
                    "{display}: line {line}: hour {} does not follow hour {}",
                    row.hour, prev.hour
                )));
            }
        }
        row.prices()
            .and_then(|_| ramp_dispatch::HourSchedule::new(row.q0, row.qt, row.et))
            .map_err(|e| CliError::validation(format!("{display}: line {line}: {e}")))?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::validation(format!("{display}: no data rows")));
    }
    Ok(rows)
}

fn describe_csv_error(e: &csv::Error) -> String {
    match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => match err.field() {
            Some(i) => format!("field `{}`: {}", HEADER.get(i as usize).unwrap_or(&"?"), err.kind()),
            None => err.kind().to_string(),
        },
        _ => e.to_string(),
    }
}

/// Optional run settings stored next to a scenario file.
#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sidecar {
    pub error: Option<ErrorModel>,
    pub seed: Option<u64>,
    pub t_s: Option<f64>,
    pub mode: Option<SampleMode>,
    pub chaining: Option<bool>,
}

/// Reads `explicit` if given, else `<scenario>.json` when it exists.
pub fn read_sidecar(scenario: &Path, explicit: Option<&Path>) -> Result<Sidecar, CliError> {
    let path: PathBuf = match explicit {
        Some(p) => p.to_path_buf(),
        None => {
            let guess = scenario.with_extension("json");
            if !guess.exists() {
                return Ok(Sidecar::default());
            }
            guess
        }
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::validation(format!("{}: line {}: {e}", path.display(), e.line()))
    })
}

/// Fixed 17-significant-digit formatting so values survive a round trip.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a CSV with a header and pre-formatted rows.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::io(format!("{}: {e}", path.display()));
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(out, "{}", header.join(",")).map_err(io)?;
    for row in rows {
        writeln!(out, "{}", row.join(",")).map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn write_scenario(path: &Path, hours: &[HourRecord]) -> Result<(), CliError> {
    write_csv(
        path,
        &HEADER,
        hours.iter().map(|h| {
            let mut row = vec![h.hour.to_string()];
            row.extend([h.a, h.b, h.c, h.qz, h.q0, h.qt, h.et].map(num));
            row
        }),
    )
}
