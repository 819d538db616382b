//! Output plumbing: sink/format resolution and CSV/JSON writers.
//!
//! Pinned CSV headers (consumed by downstream tooling — do not change):
//! dip curves `delta_tau_s,rc_normalized`, term tables `species,term,value`,
//! event dumps `t1_s,t2_s`. Floats use Rust's shortest round-trip `Display`,
//! so re-ingesting an emitted CSV reproduces the values bit for bit.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use crate::config::{FormatKey, RunConfig};
use crate::run::CliError;
use crate::{Cli, Format};

/// Dip-curve CSV header. Pinned.
pub const DIP_HEADER: &str = "delta_tau_s,rc_normalized";
/// Term-table CSV header. Pinned.
pub const TERM_HEADER: &str = "species,term,value";
/// Event-dump CSV header. Pinned.
pub const EVENT_HEADER: &str = "t1_s,t2_s";

/// Where output goes: `--out`, then `[outputs] out`, then stdout.
pub fn resolve_out(cli: &Cli, config: Option<&RunConfig>) -> Option<PathBuf> {
    cli.out.clone().or_else(|| {
        config
            .and_then(|c| c.outputs.as_ref())
            .and_then(|o| o.out.clone())
    })
}

/// Which format applies: `--format`, then `[outputs] format`, then CSV.
pub fn resolve_format(cli: &Cli, config: Option<&RunConfig>) -> Format {
    cli.format.unwrap_or_else(|| {
        match config
            .and_then(|c| c.outputs.as_ref())
            .and_then(|o| o.format)
        {
            Some(FormatKey::Json) => Format::Json,
            Some(FormatKey::Csv) | None => Format::Csv,
        }
    })
}

/// Writes `text` to the resolved sink in one ordered write.
pub fn write_text(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
    }
}

/// Serializes `value` as pretty JSON (with a trailing newline).
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Validation(format!("JSON serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// A CSV field, quoted only when it contains a comma, quote, or newline.
pub fn csv_field(raw: &str) -> String {
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

/// `header` plus one `a,b` row per sample, shortest round-trip floats.
pub fn two_column_csv(header: &str, rows: &[(f64, f64)]) -> String {
    let mut s = String::with_capacity(rows.len() * 48 + header.len() + 1);
    s.push_str(header);
    s.push('\n');
    for &(a, b) in rows {
        let _ = writeln!(s, "{a},{b}");
    }
    s
}

/// Term-table CSV: `species,term,value` rows.
pub fn term_table_csv(rows: &[(String, String, f64)]) -> String {
    let mut s = String::with_capacity(rows.len() * 48 + TERM_HEADER.len() + 1);
    s.push_str(TERM_HEADER);
    s.push('\n');
    for (species, term, value) in rows {
        let _ = writeln!(s, "{},{},{value}", csv_field(species), csv_field(term));
    }
    s
}

/// Two-column name/value CSV with a `quantity,value` header.
pub fn quantity_csv(rows: &[(&str, f64)]) -> String {
    let mut s = String::from("quantity,value\n");
    for &(name, value) in rows {
        let _ = writeln!(s, "{},{value}", csv_field(name));
    }
    s
}
