use std::fmt::Write;

use qcorr::figures::format_number;
use qcorr::measure::{degenerate_spread, DegenerateSpread, MeasureReport, MeasureStep, Variant};
use qcorr::DensityMatrix;
use serde::Serialize;

use crate::error::CliResult;

pub const SCHEMA: &str = "qcorr-report/1";
pub const SPREAD_SAMPLES: usize = 64;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub source: String,
    pub dims: Vec<usize>,
    pub results: Vec<VariantResult>,
}

#[derive(Debug, Serialize)]
pub struct VariantResult {
    pub variant: Variant,
    pub permutation: Vec<usize>,
    pub total: f64,
    pub total_plain: f64,
    pub total_mu: f64,
    pub degenerate: bool,
    pub steps: Vec<MeasureStep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate_spread: Option<DegenerateSpread>,
}

impl VariantResult {
    pub fn new(variant: Variant, r: MeasureReport, rho: &DensityMatrix, seed: u64) -> CliResult<Self> {
        let degenerate_spread = if r.degenerate() {
            let c = rho.coefficient_tensor()?;
            Some(degenerate_spread(&c, &r.permutation, SPREAD_SAMPLES, seed)?)
        } else {
            None
        };
        Ok(VariantResult {
            variant,
            total: r.total_for(variant),
            total_plain: r.total_plain,
            total_mu: r.total_mu,
            degenerate: r.degenerate(),
            permutation: r.permutation,
            steps: r.steps,
            degenerate_spread,
        })
    }
}

impl Report {
    pub fn new(source: String, rho: &DensityMatrix, results: Vec<VariantResult>) -> Self {
        Report { schema: SCHEMA, source, dims: rho.dims().to_vec(), results }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "schema {}", self.schema);
        let _ = writeln!(out, "source {}", self.source);
        let _ = writeln!(out, "dims {}", join(self.dims.iter().map(|d| d.to_string()), "x"));
        for r in &self.results {
            write_result(&mut out, r);
        }
        out
    }
}

fn join<I: Iterator<Item = String>>(it: I, sep: &str) -> String {
    it.collect::<Vec<_>>().join(sep)
}

fn numbers(xs: &[f64]) -> String {
    join(xs.iter().map(|&x| format_number(x)), " ")
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Plain => "plain",
        Variant::Mu => "mu",
    }
}

fn write_result(out: &mut String, r: &VariantResult) {
    let _ = writeln!(out, "\nvariant {}", variant_name(r.variant));
    let _ = writeln!(out, "  permutation {}", join(r.permutation.iter().map(|p| p.to_string()), ","));
    let _ = writeln!(out, "  total {}", format_number(r.total));
    let _ = writeln!(out, "  total_plain {}", format_number(r.total_plain));
    let _ = writeln!(out, "  total_mu {}", format_number(r.total_mu));
    let _ = writeln!(out, "  degenerate {}", r.degenerate);
    for (k, s) in r.steps.iter().enumerate() {
        let _ = writeln!(out, "  step {} subsystem {}", k + 1, s.subsystem);
        let _ = writeln!(out, "    q_plain {}", format_number(s.value_plain));
        let _ = writeln!(out, "    q_mu {}", format_number(s.value_mu));
        let _ = writeln!(out, "    complement_purity {}", format_number(s.complement_purity));
        let _ = writeln!(out, "    degenerate {}", s.degenerate);
        let _ = writeln!(out, "    eigenvalues {}", numbers(&s.eigenvalues));
        let _ = writeln!(out, "    projector");
        for row in s.projector.matrix().row_iter() {
            let row: Vec<f64> = row.iter().cloned().collect();
            let _ = writeln!(out, "      {}", numbers(&row));
        }
    }
    if let Some(sp) = &r.degenerate_spread {
        let _ = writeln!(
            out,
            "  spread plain {} .. {} mu {} .. {}",
            format_number(sp.min_plain),
            format_number(sp.max_plain),
            format_number(sp.min_mu),
            format_number(sp.max_mu)
        );
    }
}
