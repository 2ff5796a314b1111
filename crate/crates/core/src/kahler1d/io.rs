//! CSV import and export of potentials as `(t, u)` rows.

use std::io::{Read, Write};

use super::form::RadialPotential;
use super::grid::{Grid, Stencil};
use super::KahlerError;

fn csv_error(err: impl std::fmt::Display) -> KahlerError {
    KahlerError::Csv(err.to_string())
}

pub fn write_potential<W: Write>(phi: &RadialPotential, writer: W) -> Result<(), KahlerError> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["t", "u"]).map_err(csv_error)?;
    for (i, u) in phi.values.iter().enumerate() {
        out.write_record([format!("{:e}", phi.grid.point(i)), format!("{u:e}")])
            .map_err(csv_error)?;
    }
    out.flush().map_err(csv_error)
}

/// Reads a potential sampled on a symmetric uniform grid. Tail slopes are
/// taken from one-sided differences at the ends.
pub fn read_potential<R: Read>(reader: R) -> Result<RadialPotential, KahlerError> {
    let mut input = csv::Reader::from_reader(reader);
    let mut ts = Vec::new();
    let mut us = Vec::new();
    for row in input.deserialize::<(f64, f64)>() {
        let (t, u) = row.map_err(csv_error)?;
        ts.push(t);
        us.push(u);
    }
    if ts.len() < 2 {
        return Err(KahlerError::InvalidGrid("fewer than two rows".into()));
    }
    let half_width = -ts[0];
    let grid = Grid::new(half_width, ts.len() - 1)?;
    let tolerance = 1e-9 * half_width.max(1.0);
    if ts
        .iter()
        .enumerate()
        .any(|(i, t)| (t - grid.point(i)).abs() > tolerance)
    {
        return Err(KahlerError::InvalidGrid(
            "rows must be uniform on a symmetric window".into(),
        ));
    }
    let d1 = Stencil::Fourth.first_derivative(&us, grid.step());
    let n = us.len();
    RadialPotential::new(grid, us, [d1[0], d1[n - 1]])
}
