use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use e8p_core::painleve::OrbitRecord;
use serde::Serialize;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Config(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn json_line<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn affine(p: Option<[f64; 2]>) -> [String; 2] {
    match p {
        Some([re, im]) => [num(re), num(im)],
        None => ["inf".into(), "inf".into()],
    }
}

pub fn orbit_columns() -> Vec<String> {
    let mut cols = vec!["step".to_string()];
    for i in 1..=8 {
        cols.push(format!("c{i}_re"));
        cols.push(format!("c{i}_im"));
    }
    for name in ["eta", "x", "y"] {
        cols.push(format!("{name}_re"));
        cols.push(format!("{name}_im"));
    }
    cols.extend(["residual", "lambda_re", "lambda_im"].map(String::from));
    cols
}

pub fn orbit_row(r: &OrbitRecord) -> Vec<String> {
    let mut row = vec![r.step.to_string()];
    for c in &r.c {
        row.push(num(c[0]));
        row.push(num(c[1]));
    }
    row.push(num(r.eta[0]));
    row.push(num(r.eta[1]));
    row.extend(affine(r.x.affine()));
    row.extend(affine(r.y.affine()));
    row.push(num(r.residual));
    row.push(num(r.lambda[0]));
    row.push(num(r.lambda[1]));
    row
}
