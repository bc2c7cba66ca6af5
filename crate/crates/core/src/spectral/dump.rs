//! Plain-text JSA dump.
//!
//! ```text
//! # n_i n_s dOmega_i dOmega_s
//! re im re im ...      (one line per idler detuning, n_s pairs)
//! ```
//!
//! Numbers use Rust's shortest round-trip float formatting, so reading a dump
//! back reproduces every value exactly. Both axes are symmetric about zero,
//! which makes the header enough to rebuild the grid.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Axis, Jsa, SpectralGrid};
use crate::error::{Error, Result};

pub fn write_dump<W: Write>(jsa: &Jsa, mut out: W) -> std::io::Result<()> {
    let (rows, cols) = jsa.grid.shape();
    writeln!(
        out,
        "# {rows} {cols} {:?} {:?}",
        jsa.grid.idler.step(),
        jsa.grid.signal.step()
    )?;
    let mut line = String::new();
    for i in 0..rows {
        line.clear();
        for s in 0..cols {
            let z = jsa.amplitude[(i, s)];
            if s > 0 {
                line.push(' ');
            }
            line.push_str(&format!("{:?} {:?}", z.re, z.im));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn dump_error(line: usize, reason: impl Into<String>) -> Error {
    Error::Dump {
        line,
        reason: reason.into(),
    }
}

pub fn read_dump<R: BufRead>(input: R) -> Result<Jsa> {
    let mut lines = input.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| dump_error(1, "empty file"))?;
    let header = header.map_err(|e| dump_error(1, e.to_string()))?;
    let fields: Vec<&str> = header
        .strip_prefix('#')
        .ok_or_else(|| dump_error(1, "header must start with '#'"))?
        .split_whitespace()
        .collect();
    if fields.len() != 4 {
        return Err(dump_error(1, "header needs n_i n_s dOmega_i dOmega_s"));
    }
    let count = |text: &str| text.parse::<usize>().map_err(|e| dump_error(1, e.to_string()));
    let step = |text: &str| text.parse::<f64>().map_err(|e| dump_error(1, e.to_string()));
    let (rows, cols) = (count(fields[0])?, count(fields[1])?);
    let idler = Axis::new(rows, step(fields[2])?).map_err(|e| dump_error(1, e.to_string()))?;
    let signal = Axis::new(cols, step(fields[3])?).map_err(|e| dump_error(1, e.to_string()))?;

    let mut amplitude = DMatrix::<Complex64>::zeros(rows, cols);
    let mut seen = 0;
    for (index, line) in lines {
        let number = index + 1;
        let line = line.map_err(|e| dump_error(number, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        if seen == rows {
            return Err(dump_error(number, format!("more than {rows} rows")));
        }
        let values = line
            .split_whitespace()
            .map(|token| token.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| dump_error(number, e.to_string()))?;
        if values.len() != 2 * cols {
            return Err(dump_error(
                number,
                format!("expected {} numbers, found {}", 2 * cols, values.len()),
            ));
        }
        for (s, pair) in values.chunks_exact(2).enumerate() {
            amplitude[(seen, s)] = Complex64::new(pair[0], pair[1]);
        }
        seen += 1;
    }
    if seen != rows {
        return Err(dump_error(seen + 2, format!("expected {rows} rows, found {seen}")));
    }
    Jsa::new(SpectralGrid::new(signal, idler), amplitude)
}

impl Jsa {
    pub fn save(&self, path: impl AsRef<std::path::Path>) -> std::io::Result<()> {
        let file = std::fs::File::create(path)?;
        let mut out = std::io::BufWriter::new(file);
        write_dump(self, &mut out)?;
        out.flush()
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Jsa> {
        let file = std::fs::File::open(path).map_err(|e| dump_error(0, e.to_string()))?;
        read_dump(std::io::BufReader::new(file))
    }
}
