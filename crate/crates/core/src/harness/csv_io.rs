use std::path::Path;

use super::SweepRow;
use crate::error::Result;

pub const CSV_HEADER: &str =
    "ps_watts,n_elements,gamma_th2_db,mean_rate_user,mean_alpha1,feasible_fraction,mean_rate_mc,realizations_used";

/// Renders rows as CSV text, optionally preceded by one `#` comment line.
pub fn render_csv(rows: &[SweepRow], comment: Option<&str>) -> Result<String> {
    let mut out = Vec::new();
    if let Some(c) = comment {
        for line in c.lines() {
            out.extend_from_slice(format!("# {line}\n").as_bytes());
        }
    }
    {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        w.write_record(CSV_HEADER.split(','))?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    Ok(String::from_utf8(out).expect("csv output is ASCII"))
}

/// Writes the whole file in one call; nothing is created if the target
/// directory does not exist.
pub fn write_csv(rows: &[SweepRow], path: &Path, comment: Option<&str>) -> Result<()> {
    let text = render_csv(rows, comment)?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<SweepRow>, _>>()?;
    Ok(rows)
}
