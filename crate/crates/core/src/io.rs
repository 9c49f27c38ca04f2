//! CSV and JSON formats for node sets, measures, solve reports and sweeps.
//!
//! Floats are written in Rust's shortest round-trip form, so identical
//! inputs give byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::analysis::{Classification, SweepRecord, ThinnessSeries};
use crate::error::{Result, RieszError};
use crate::geometry::{NodeSet, Point};
use crate::measures::{DiscreteMeasure, SignedMeasure};
use crate::solvers::SolveReport;

fn coord_header(dim: usize, last: &str) -> Vec<String> {
    (1..=dim)
        .map(|i| format!("x{i}"))
        .chain(std::iter::once(last.to_string()))
        .collect()
}

fn write_rows<W: Write>(out: W, nodes: &NodeSet, last: &str, values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(coord_header(nodes.dim(), last))?;
    for (x, v) in nodes.points().zip(values) {
        w.write_record(x.iter().chain(std::iter::once(v)).map(|c| c.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `x1,...,xd,<last>` rows; the dimension comes from the header.
fn read_rows<R: Read>(input: R, last: &str) -> Result<(usize, Vec<Point>, Vec<f64>)> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let dim = header.len().saturating_sub(1);
    let expected = coord_header(dim, last);
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(RieszError::Parse(format!(
            "expected header {}, found {}",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut points = Vec::new();
    let mut values = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let nums = record
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| RieszError::Parse(format!("row {}: {e}", line + 1)))?;
        values.push(nums[dim]);
        points.push(Point::new(nums[..dim].to_vec())?);
    }
    Ok((dim, points, values))
}

pub fn write_nodes<W: Write>(out: W, nodes: &NodeSet) -> Result<()> {
    write_rows(out, nodes, "spacing", nodes.spacing())
}

pub fn read_nodes<R: Read>(input: R) -> Result<NodeSet> {
    let (dim, points, spacing) = read_rows(input, "spacing")?;
    NodeSet::with_spacing(dim, points, spacing)
}

pub fn write_measure<W: Write>(out: W, mu: &DiscreteMeasure) -> Result<()> {
    write_rows(out, mu.nodes(), "weight", mu.weights())
}

/// Spacing of the atoms is recomputed from nearest neighbours.
pub fn read_measure<R: Read>(input: R) -> Result<DiscreteMeasure> {
    let (dim, points, weights) = read_rows(input, "weight")?;
    DiscreteMeasure::from_atoms(dim, points, weights)
}

/// One row per atom of either part, negative part with negative weight.
pub fn write_signed_measure<W: Write>(out: W, omega: &SignedMeasure) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(coord_header(omega.dim(), "weight_signed"))?;
    for (part, sign) in [(omega.plus(), 1.0), (omega.minus(), -1.0)] {
        for (x, m) in part.nodes().points().zip(part.weights()) {
            if *m != 0.0 {
                let v = sign * m;
                w.write_record(x.iter().chain(std::iter::once(&v)).map(|c| c.to_string()))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Splits signed weights into positive and negative parts.
pub fn read_signed_measure<R: Read>(input: R) -> Result<SignedMeasure> {
    let (dim, points, signed) = read_rows(input, "weight_signed")?;
    let nodes = Arc::new(NodeSet::from_points(dim, points)?);
    SignedMeasure::from_signed_weights(nodes, signed)
}

/// Solve report as pretty JSON with a trailing newline; the objective trace
/// is not written.
pub fn write_report<W: Write>(out: W, report: &SolveReport) -> Result<()> {
    write_json(out, report)
}

pub const SWEEP_HEADER: [&str; 7] = [
    "radius",
    "cone_mass",
    "cone_objective",
    "slice_objective",
    "equilibrium_constant",
    "support_radius",
    "converged",
];

pub fn write_sweep<W: Write>(out: W, records: &[SweepRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in records {
        w.write_record([
            r.truncation_radius.to_string(),
            r.cone_mass.to_string(),
            r.cone_objective.to_string(),
            r.slice_objective.to_string(),
            r.equilibrium_constant.to_string(),
            r.support_radius.to_string(),
            r.converged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_classification<W: Write>(out: W, c: &Classification) -> Result<()> {
    write_json(out, c)
}

/// `shell,capacity,term,partial_sum`, one row per piece.
pub fn write_thinness<W: Write>(out: W, capacities: &[f64], series: &ThinnessSeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["shell", "capacity", "term", "partial_sum"])?;
    let rows = capacities
        .iter()
        .zip(&series.terms)
        .zip(&series.partial_sums);
    for (j, ((c, t), s)) in rows.enumerate() {
        w.write_record([j.to_string(), c.to_string(), t.to_string(), s.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Any serializable value as pretty JSON with a trailing newline.
pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Creates `path` and hands a buffered writer to `f`.
pub fn to_file<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let mut out = BufWriter::new(File::create(path)?);
    f(&mut out)?;
    out.flush()?;
    Ok(())
}
