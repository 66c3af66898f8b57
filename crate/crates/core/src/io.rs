//! CSV tables for trajectories, spectra, sweeps and matrix dumps.
//!
//! Numbers use Rust's shortest round-trip formatting, so identical inputs
//! give byte-identical files.

use std::io::Write;

use num_complex::Complex64;

use crate::eigenstates::EigenstateReport;
use crate::linalg::CMatrix;
use crate::response::ResonatorTrajectory;
use crate::spectra::TrackedRates;
use crate::transient::{CorrelationSet, GeneratorSeries};
use crate::{Error, Result};

/// Column-named numeric table. Integer-valued columns are printed as integers.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Dimension(format!("row of {} values for {} columns", row.len(), self.columns.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Write as CSV. `comment` lines are prefixed with `# ` before the header.
    pub fn write_csv<W: Write>(&self, out: W, comment: Option<&str>, header: bool) -> Result<()> {
        let mut out = out;
        if let Some(c) = comment {
            for line in c.lines() {
                writeln!(out, "# {line}")?;
            }
        }
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        if header {
            w.write_record(&self.columns)?;
        }
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| fmt(x)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, header: bool) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, None, header)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Parse a headed CSV of numbers; `#` lines are skipped.
    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
        let columns = r.headers()?.iter().map(str::to_owned).collect();
        let mut table = Self { columns, rows: Vec::new() };
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| Error::Config(format!("bad number {s:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            table.push(row)?;
        }
        Ok(table)
    }
}

fn fmt(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

pub fn eta_table(traj: &ResonatorTrajectory) -> Table {
    let mut t = Table::new(["t_ns", "re_eta", "im_eta", "photon_number"]);
    for (&time, e) in traj.times.iter().zip(&traj.eta) {
        t.rows.push(vec![time, e.re, e.im, e.norm_sqr()]);
    }
    t
}

pub fn spectra_table(rates: &[TrackedRates]) -> Table {
    let mut t = Table::new(["omega_c_mhz", "n_c_photons", "re_E_mhz", "im_E_mhz", "stark_mhz", "gamma_phi_mhz", "overlap"]);
    for r in rates {
        t.rows.push(vec![r.omega, r.photon, r.value.re, r.value.im, r.stark, r.dephasing, r.overlap]);
    }
    t
}

/// One row of the detuning sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub delta_cd: f64,
    pub gamma_phi: f64,
    pub stark: f64,
    pub n_ground: f64,
    pub n_excited: f64,
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(["delta_cd_mhz", "gamma_phi_mhz", "stark_mhz", "n_ground", "n_excited"]);
    for r in rows {
        t.rows.push(vec![r.delta_cd, r.gamma_phi, r.stark, r.n_ground, r.n_excited]);
    }
    t
}

/// 3×3-style grid of E(n_al, n_ar).
pub fn level_grid_table(values: &[(usize, usize, Complex64)]) -> Table {
    let mut t = Table::new(["n_al", "n_ar", "re_E", "im_E"]);
    for &(m, n, e) in values {
        t.rows.push(vec![m as f64, n as f64, e.re, e.im]);
    }
    t
}

/// Correlations of one level pair together with E(t).
pub fn transient_table(corr: &CorrelationSet, gen: &GeneratorSeries) -> Result<Table> {
    let lv = corr
        .level(gen.n_al, gen.n_ar)
        .ok_or_else(|| Error::Dimension(format!("no correlations for ({}, {})", gen.n_al, gen.n_ar)))?;
    let mut t = Table::new([
        "t_ns", "photon", "re_a_ll", "im_a_ll", "re_a_rr", "im_a_rr", "re_b", "im_b", "re_c", "im_c", "re_E_mhz",
        "im_E_mhz",
    ]);
    for k in 0..corr.times.len() {
        t.rows.push(vec![
            corr.times[k],
            corr.photon[k],
            lv.a_ll[k].re,
            lv.a_ll[k].im,
            lv.a_rr[k].re,
            lv.a_rr[k].im,
            lv.b_lr[k].re,
            lv.b_lr[k].im,
            lv.c_lr[k].re,
            lv.c_lr[k].im,
            gen.values[k].re,
            gen.values[k].im,
        ]);
    }
    Ok(t)
}

pub fn eigenstate_table(reports: &[EigenstateReport]) -> Table {
    let mut t = Table::new(["omega_c_mhz", "order", "infidelity", "residual_norm"]);
    for r in reports {
        t.rows.push(vec![r.omega, r.order as f64, r.infidelity, r.residual_norm]);
    }
    t
}

/// Nonzero entries as (row, col, re, im), row-major.
pub fn matrix_dump_table(m: &CMatrix) -> Table {
    let mut t = Table::new(["row", "col", "re", "im"]);
    for ((i, j), z) in m.indexed_iter() {
        if *z != Complex64::default() {
            t.rows.push(vec![i as f64, j as f64, z.re, z.im]);
        }
    }
    t
}
