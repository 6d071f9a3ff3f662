//! Per-edge CSV snapshots: header `x,rho,q`, 17 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sim::{EdgeSnapshot, RunOutput, SolverKind};

pub const HEADER: &str = "x,rho,q";

/// `<run>_<solver>_edge<i>_t<time>.csv`
pub fn snapshot_file_name(run: &str, solver: SolverKind, edge: usize, time: f64) -> String {
    format!("{run}_{}_edge{edge}_t{time:.6}.csv", solver.name())
}

fn csv_err(origin: &str, message: String) -> Error {
    Error::Csv {
        path: origin.to_string(),
        message,
    }
}

pub fn format_edge_csv(edge: &EdgeSnapshot) -> String {
    let mut w = csv::Writer::from_writer(Vec::with_capacity(64 * edge.x.len() + 16));
    let rows = edge.x.iter().zip(&edge.rho).zip(&edge.q);
    std::iter::once(HEADER.split(',').map(String::from).collect::<Vec<_>>())
        .chain(rows.map(|((x, r), q)| vec![format!("{x:.16e}"), format!("{r:.16e}"), format!("{q:.16e}")]))
        .try_for_each(|rec| w.write_record(&rec))
        .expect("writing to memory");
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("ascii output")
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub fn write_edge_csv(path: &Path, edge: &EdgeSnapshot) -> Result<()> {
    fs::write(path, format_edge_csv(edge)).map_err(|e| io_err(path, e))
}

pub fn parse_edge_csv(text: &str, id: usize, origin: &str) -> Result<EdgeSnapshot> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| csv_err(origin, e.to_string()))?;
    if header.iter().collect::<Vec<_>>().join(",") != HEADER {
        return Err(csv_err(origin, format!("line 1: expected header {HEADER:?}, found {header:?}")));
    }
    let mut snap = EdgeSnapshot {
        id,
        x: Vec::new(),
        rho: Vec::new(),
        q: Vec::new(),
    };
    for rec in rdr.deserialize::<(f64, f64, f64)>() {
        let (x, r, q) = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            csv_err(origin, format!("line {line}: {e}"))
        })?;
        snap.x.push(x);
        snap.rho.push(r);
        snap.q.push(q);
    }
    Ok(snap)
}

pub fn read_edge_csv(path: &Path, id: usize) -> Result<EdgeSnapshot> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_edge_csv(&text, id, &path.display().to_string())
}

/// Write every snapshot of a run; returns the files written.
pub fn write_run(dir: &Path, run: &RunOutput) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();
    for snap in &run.snapshots {
        for edge in &snap.edges {
            let path = dir.join(snapshot_file_name(&run.scenario, run.solver, edge.id, snap.time));
            write_edge_csv(&path, edge)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Snapshot times available under `<dir>/<prefix>_edge1_t*.csv`.
pub fn snapshot_times(dir: &Path, prefix: &str) -> Result<Vec<f64>> {
    let lead = format!("{prefix}_edge1_t");
    let mut times: Vec<f64> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|entry| {
            let name = entry.ok()?.file_name().into_string().ok()?;
            name.strip_prefix(&lead)?.strip_suffix(".csv")?.parse().ok()
        })
        .collect();
    times.sort_by(f64::total_cmp);
    Ok(times)
}

/// The three edge files of `<dir>/<prefix>` at `time`.
pub fn read_snapshot(dir: &Path, prefix: &str, time: f64) -> Result<Vec<EdgeSnapshot>> {
    (1..=3)
        .map(|edge| read_edge_csv(&dir.join(format!("{prefix}_edge{edge}_t{time:.6}.csv")), edge))
        .collect()
}
