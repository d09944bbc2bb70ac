//! Data tables behind the published figures, with CSV rendering.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QcorrError, Result};
use crate::ising::{locate_peak, scan, ChainParams, FieldGrid, ScanSeries};
use crate::measure::{total_correlation_max, total_correlation_sequence, Variant};
use crate::zoo::{build, werner_ghz_reference_curves, StateSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig3,
    Fig5,
    Fig6a,
    Fig6b,
    Fig6c,
    Fig6d,
    WernerTable,
}

impl FigureId {
    pub const ALL: [FigureId; 9] = [
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3,
        FigureId::Fig5,
        FigureId::Fig6a,
        FigureId::Fig6b,
        FigureId::Fig6c,
        FigureId::Fig6d,
        FigureId::WernerTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3 => "fig3",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6a => "fig6a",
            FigureId::Fig6b => "fig6b",
            FigureId::Fig6c => "fig6c",
            FigureId::Fig6d => "fig6d",
            FigureId::WernerTable => "werner-table",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = QcorrError;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| QcorrError::Parse(format!("unknown figure '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureTable {
    pub figure: FigureId,
    pub columns: Vec<String>,
    /// `None` renders as an empty field.
    pub rows: Vec<Vec<Option<f64>>>,
    /// Rendered as trailing `# …` lines.
    pub notes: Vec<String>,
}

impl FigureTable {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|v| v.map(format_number).unwrap_or_default()).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        for note in &self.notes {
            out.push_str("# ");
            out.push_str(note);
            out.push('\n');
        }
        out
    }
}

/// Shortest decimal form of `x` rounded to 12 significant digits.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("scientific literal");
    if rounded == 0.0 {
        "0".into()
    } else {
        rounded.to_string()
    }
}

fn axis(lo: f64, step: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| lo + i as f64 * step).collect()
}

pub const FIG2_STEP: f64 = 0.05;
pub const FIG3_STEP: f64 = 0.02;
pub const FIG5_STEP: f64 = 0.001;
pub const FIG6_GRID: (f64, f64, f64) = (0.2, 1.8, 0.01);
pub const WERNER_STEP: f64 = 0.05;

/// Mixture of a Bell-diagonal and product state with `λ = 1/2`,
/// `t_i = (2x − 1)/3`, `r = (0, r₂, 0)`.
pub fn fig2_state(x: f64, r2: f64) -> StateSpec {
    let t = (2.0 * x - 1.0) / 3.0;
    StateSpec::BdProductMixture { lambda: 0.5, t: [t; 3], r: [0.0, r2, 0.0] }
}

fn fig2(figure: FigureId, variant: Variant) -> Result<FigureTable> {
    let grid = axis(0.0, FIG2_STEP, 21);
    let points: Vec<(f64, f64)> = grid.iter().flat_map(|&x| grid.iter().map(move |&r| (x, r))).collect();
    let rows = points
        .par_iter()
        .map(|&(x, r2)| {
            let rho = build(&fig2_state(x, r2))?;
            let ab = total_correlation_sequence(&rho, &[1, 2], variant)?.total();
            let ba = total_correlation_sequence(&rho, &[2, 1], variant)?.total();
            Ok(vec![Some(x), Some(r2), Some(ab), Some(ba)])
        })
        .collect::<Result<Vec<_>>>()?;
    let suffix = if variant == Variant::Mu { "_mu" } else { "" };
    Ok(FigureTable {
        figure,
        columns: vec!["x".into(), "r2".into(), format!("q_ab{suffix}"), format!("q_ba{suffix}")],
        rows,
        notes: vec![],
    })
}

fn fig3() -> Result<FigureTable> {
    let rows = axis(0.0, FIG3_STEP, 51)
        .into_iter()
        .map(|l| {
            let r = total_correlation_max(&build(&StateSpec::WernerGhz { lambda: l })?, Variant::Plain)?;
            let (ds, dgg) = werner_ghz_reference_curves(l);
            Ok(vec![Some(l), Some(r.total_plain), Some(r.total_mu), Some(ds), Some(dgg)])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FigureTable {
        figure: FigureId::Fig3,
        columns: ["lambda", "q_total", "q_mu_total", "d_s", "d_gg"].map(String::from).to_vec(),
        rows,
        notes: vec![],
    })
}

/// Index `i` of the largest `|q[i+1] − q[i]|` among pairs not touching the
/// ends of the series.
pub fn largest_interior_jump(q: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for i in 1..q.len().saturating_sub(2) {
        let jump = (q[i + 1] - q[i]).abs();
        if best.is_none_or(|b| jump > b.1) {
            best = Some((i, jump));
        }
    }
    best.map(|b| b.0)
}

fn fig5() -> Result<FigureTable> {
    let lambdas = axis(0.0, FIG5_STEP, 1001);
    let totals = lambdas
        .par_iter()
        .map(|&l| {
            let r = total_correlation_max(&build(&StateSpec::WGhz { lambda: l })?, Variant::Plain)?;
            Ok((r.total_plain, r.total_mu))
        })
        .collect::<Result<Vec<_>>>()?;
    let plain: Vec<f64> = totals.iter().map(|t| t.0).collect();
    let jump = largest_interior_jump(&plain);
    let rows = lambdas
        .iter()
        .zip(&totals)
        .enumerate()
        .map(|(i, (&l, t))| {
            let mark = if Some(i) == jump { 1.0 } else { 0.0 };
            vec![Some(l), Some(t.0), Some(t.1), Some(mark)]
        })
        .collect();
    let notes = jump
        .map(|i| {
            vec![format!(
                "discontinuity between lambda={} and lambda={}",
                format_number(lambdas[i]),
                format_number(lambdas[i + 1])
            )]
        })
        .unwrap_or_default();
    Ok(FigureTable {
        figure: FigureId::Fig5,
        columns: ["lambda", "q_total", "q_mu_total", "discontinuity"].map(String::from).to_vec(),
        rows,
        notes,
    })
}

pub fn fig6_spins(figure: FigureId) -> Option<usize> {
    match figure {
        FigureId::Fig6a => Some(16),
        FigureId::Fig6b => Some(64),
        FigureId::Fig6c => Some(256),
        FigureId::Fig6d => Some(1024),
        _ => None,
    }
}

fn peak_note(label: &str, s: &ScanSeries) -> String {
    match locate_peak(s) {
        Ok((h, m)) => format!("peak {label} h={} |dq_dh|={}", format_number(h), format_number(m)),
        Err(_) => format!("peak {label} none"),
    }
}

fn fig6(figure: FigureId, n: usize) -> Result<FigureTable> {
    let (lo, hi, step) = FIG6_GRID;
    let grid = FieldGrid::new(lo, hi, step)?;
    let params = ChainParams::ising(n, 0.0)?;
    let plain = scan(&params, &grid, Variant::Plain)?;
    let mu = scan(&params, &grid, Variant::Mu)?;
    let rows = (0..plain.h_grid.len())
        .map(|i| {
            vec![
                Some(plain.h_grid[i]),
                Some(plain.q_values[i]),
                plain.derivative_at(i),
                Some(mu.q_values[i]),
                mu.derivative_at(i),
            ]
        })
        .collect();
    Ok(FigureTable {
        figure,
        columns: ["h", "q_total", "dq_dh", "q_mu_total", "dq_mu_dh"].map(String::from).to_vec(),
        rows,
        notes: vec![format!("spins {n}"), peak_note("plain", &plain), peak_note("mu", &mu)],
    })
}

fn werner_table() -> Result<FigureTable> {
    let mut rows = Vec::new();
    for m in 2..=4usize {
        for x in axis(-1.0, WERNER_STEP, 41) {
            let r = total_correlation_max(&build(&StateSpec::Werner { m, x })?, Variant::Mu)?;
            rows.push(vec![Some(m as f64), Some(x), Some(r.total_plain), Some(r.total_mu)]);
        }
    }
    Ok(FigureTable {
        figure: FigureId::WernerTable,
        columns: ["m", "x", "q_total", "q_mu_total"].map(String::from).to_vec(),
        rows,
        notes: vec![],
    })
}

pub fn reproduce(figure: FigureId) -> Result<FigureTable> {
    match figure {
        FigureId::Fig2a => fig2(figure, Variant::Plain),
        FigureId::Fig2b => fig2(figure, Variant::Mu),
        FigureId::Fig3 => fig3(),
        FigureId::Fig5 => fig5(),
        FigureId::WernerTable => werner_table(),
        other => fig6(other, fig6_spins(other).expect("chain figure")),
    }
}
