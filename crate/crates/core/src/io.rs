//! CSV serialization for functional samples and target vectors.
//!
//! A sample file carries the grid points in its single header row and one
//! curve per data row. Targets are a bare column of values, one per line.
//! Floats are written in shortest round-trip form, so write/read cycles are
//! bit-exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::sample::FunctionalSample;

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, message: String) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    }
}

fn parse_fields(path: &Path, line_no: usize, line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .enumerate()
        .map(|(col, tok)| {
            tok.trim().parse::<f64>().map_err(|_| {
                parse_err(
                    path,
                    line_no,
                    format!("column {}: invalid number {tok:?}", col + 1),
                )
            })
        })
        .collect()
}

pub fn write_sample_csv(path: &Path, sample: &FunctionalSample) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let header: Vec<String> = sample.grid().points().iter().map(|t| t.to_string()).collect();
    writeln!(w, "{}", header.join(",")).map_err(|e| io_err(path, e))?;
    for j in 0..sample.num_curves() {
        let row: Vec<String> = sample.values().row(j).iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", row.join(",")).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn read_sample_csv(path: &Path) -> Result<FunctionalSample> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file".into()))?;
    let header = header.map_err(|e| io_err(path, e))?;
    let grid = Grid::new(parse_fields(path, 1, &header)?)
        .map_err(|e| parse_err(path, 1, format!("bad grid header: {e}")))?;

    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row = parse_fields(path, idx + 1, &line)?;
        if row.len() != grid.len() {
            return Err(parse_err(
                path,
                idx + 1,
                format!("row has {} values, header has {}", row.len(), grid.len()),
            ));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(path, 2, "no curves in file".into()));
    }
    let values = DMatrix::from_fn(rows.len(), grid.len(), |r, c| rows[r][c]);
    FunctionalSample::new(grid, values).map_err(|e| parse_err(path, 2, e.to_string()))
}

pub fn write_targets_csv(path: &Path, values: &[f64]) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    for v in values {
        writeln!(w, "{v}").map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn read_targets_csv(path: &Path) -> Result<Vec<f64>> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let v: f64 = line.trim().parse().map_err(|_| {
            parse_err(path, idx + 1, format!("invalid number {:?}", line.trim()))
        })?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(parse_err(path, 1, "no targets in file".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::gen_brownian_trend;

    #[test]
    fn sample_round_trip_is_bit_exact() {
        let dir = std::env::temp_dir().join(format!("funshap-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let grid = Grid::uniform(0.0, 1.0, 51).unwrap();
        let sample = gen_brownian_trend(&grid, 7, 42).unwrap();
        let path = dir.join("sample.csv");
        write_sample_csv(&path, &sample).unwrap();
        let back = read_sample_csv(&path).unwrap();
        assert_eq!(sample.grid().points(), back.grid().points());
        assert_eq!(sample.values(), back.values());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn targets_round_trip() {
        let dir = std::env::temp_dir().join(format!("funshap-io-t-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("y.csv");
        let y = vec![0.1, -2.5, 3.00000000001, 4e-12];
        write_targets_csv(&path, &y).unwrap();
        assert_eq!(read_targets_csv(&path).unwrap(), y);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn parse_errors_carry_location() {
        let dir = std::env::temp_dir().join(format!("funshap-io-e-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        std::fs::write(&path, "0,0.5,1\n1,2,3\n4,x,6\n").unwrap();
        let err = read_sample_csv(&path).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
        std::fs::remove_dir_all(&dir).ok();
    }
}
