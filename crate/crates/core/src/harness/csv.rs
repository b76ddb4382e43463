use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::experiment::MetricsRecord;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "x,mean_fidelity,stderr_fidelity,delivery_rate,n_delivered,adversary_mean_fidelity";

fn field(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.6}")).unwrap_or_default()
}

/// Renders records as CSV: fixed six-digit decimals, LF line endings,
/// empty fields for absent values.
pub fn format_csv(records: &[MetricsRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Config("no records to write".into()));
    }
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{:.6},{},{},{:.6},{},{}",
            r.x,
            field(r.mean_fidelity),
            field(r.stderr_fidelity),
            r.delivery_rate,
            r.n_delivered,
            field(r.adversary_mean_fidelity),
        )
        .expect("writing to a String");
    }
    Ok(out)
}

pub fn emit_csv<W: Write>(records: &[MetricsRecord], mut dest: W) -> Result<()> {
    dest.write_all(format_csv(records)?.as_bytes())?;
    dest.flush()?;
    Ok(())
}

pub fn write_csv(records: &[MetricsRecord], path: &Path) -> Result<()> {
    let text = format_csv(records)?;
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
