use std::io::Write;

use crate::error::{Error, Result};
use crate::lod::ErrorReport;
use crate::network::Network;

/// Least-squares slope of `log₂ y` against `log₂ x`. Pairs with a
/// non-positive or non-finite entry are skipped; fewer than two usable pairs
/// give `None`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite() && **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.log2(), b.log2()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidParameter(format!("CSV output: {other:?}")),
    }
}

fn number(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:e}")
    }
}

/// One row per node: index, position, then one displacement column per dof.
pub fn write_solution<W: Write>(net: &Network<f64>, u: &[f64], out: W) -> Result<()> {
    let d = net.dofs_per_node();
    if u.len() != net.dof_count() {
        return Err(Error::DimensionMismatch {
            expected: net.dof_count(),
            found: u.len(),
            context: "solution vector",
        });
    }
    let mut w = csv_writer(out);
    let mut header = vec!["node".to_string(), "x".into(), "y".into()];
    header.extend(["ux", "uy"].iter().take(d).map(|s| s.to_string()));
    if d == 1 {
        header[3] = "u".into();
    }
    w.write_record(&header).map_err(csv_error)?;
    for (node, p) in net.nodes().iter().enumerate() {
        let mut rec = vec![node.to_string(), number(p[0]), number(p[1])];
        rec.extend((0..d).map(|c| number(u[d * node + c])));
        w.write_record(&rec).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayTable {
    /// `(ρ, relative energy error)`; `ρ = ∞` for the unlocalized patch.
    pub rows: Vec<(f64, f64)>,
}

impl DecayTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["rho", "rel_energy_error"])
            .map_err(csv_error)?;
        for &(rho, err) in &self.rows {
            w.write_record([number(rho), number(err)])
                .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Slope of `ln(error)` against `ρ` over the finite radii.
    pub fn log_linear_slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|(rho, e)| rho.is_finite() && *e > 0.0)
            .map(|&(rho, e)| (rho, e.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok,
    Warning(String),
    Failed(String),
}

impl RowStatus {
    fn label(&self) -> String {
        match self {
            Self::Ok => "ok".into(),
            Self::Warning(m) => format!("warning: {m}"),
            Self::Failed(m) => format!("error: {m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub big_r: usize,
    pub h: f64,
    pub rho: f64,
    pub lod: Option<ErrorReport>,
    pub fem: Option<ErrorReport>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

pub const CONVERGENCE_HEADER: [&str; 12] = [
    "R",
    "H",
    "rho",
    "lod_abs_energy",
    "lod_rel_energy",
    "lod_abs_l2",
    "lod_rel_l2",
    "fem_abs_energy",
    "fem_rel_energy",
    "fem_abs_l2",
    "fem_rel_l2",
    "status",
];

impl ConvergenceTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(CONVERGENCE_HEADER).map_err(csv_error)?;
        let cells = |r: &Option<ErrorReport>| match r {
            Some(e) => [e.abs_energy, e.rel_energy, e.abs_l2, e.rel_l2].map(number),
            None => ["nan", "nan", "nan", "nan"].map(String::from),
        };
        for row in &self.rows {
            let mut rec = vec![row.big_r.to_string(), number(row.h), number(row.rho)];
            rec.extend(cells(&row.lod));
            rec.extend(cells(&row.fem));
            rec.push(row.status.label());
            w.write_record(&rec).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    fn series(&self, pick: impl Fn(&ConvergenceRow) -> Option<f64>) -> (Vec<f64>, Vec<f64>) {
        self.rows
            .iter()
            .filter_map(|r| pick(r).map(|v| (r.h, v)))
            .unzip()
    }

    /// Fitted rate of the relative LOD energy error in `H`.
    pub fn lod_energy_slope(&self) -> Option<f64> {
        let (h, e) = self.series(|r| r.lod.map(|x| x.rel_energy));
        fit_slope(&h, &e)
    }

    pub fn lod_l2_slope(&self) -> Option<f64> {
        let (h, e) = self.series(|r| r.lod.map(|x| x.rel_l2));
        fit_slope(&h, &e)
    }

    pub fn fem_energy_slope(&self) -> Option<f64> {
        let (h, e) = self.series(|r| r.fem.map(|x| x.rel_energy));
        fit_slope(&h, &e)
    }
}
