//! State CSV format: header `t,v1,...,vJ`, one row per mesh point, full
//! double precision (17 significant digits) so a round trip reproduces
//! bit-identical values.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::seqspace::TruncatedState;

pub fn write_state_csv(path: &Path, state: &TruncatedState) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write!(out, "t")?;
    for j in 1..=state.components() {
        write!(out, ",v{j}")?;
    }
    writeln!(out)?;
    for (m, t) in state.mesh().iter().enumerate() {
        write!(out, "{t:.16e}")?;
        for row in state.rows() {
            write!(out, ",{:.16e}", row[m])?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_state_csv(path: &Path) -> Result<TruncatedState> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::StateFile(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::StateFile("empty file".into()))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.first() != Some(&"t") || columns.len() < 2 {
        return Err(Error::StateFile(format!("unexpected header '{header}'")));
    }
    for (i, name) in columns[1..].iter().enumerate() {
        if *name != format!("v{}", i + 1) {
            return Err(Error::StateFile(format!(
                "unexpected column '{name}' at position {}",
                i + 1
            )));
        }
    }
    let components = columns.len() - 1;
    let mut mesh = Vec::new();
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); components];
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(Error::StateFile(format!(
                "row {} has {} fields, expected {}",
                lineno + 2,
                fields.len(),
                columns.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::StateFile(format!("row {}: {e}", lineno + 2)))
        };
        mesh.push(parse(fields[0])?);
        for (row, field) in rows.iter_mut().zip(&fields[1..]) {
            row.push(parse(field)?);
        }
    }
    TruncatedState::new(mesh, rows)
}
