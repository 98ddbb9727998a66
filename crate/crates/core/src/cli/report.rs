//! CSV and JSON renderings of bound, search and model reports.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use super::format::{ceiling, flag, num, opt_num, sci};
use crate::bounds::{BoundPoint, BoundReport};
use crate::models::ModelInstance;
use crate::quantum::Observable;
use crate::search::{SearchReport, Source, Verdict};

pub const CSV_COLUMNS: [&str; 10] =
    ["t", "q_mean", "delta_q", "dq", "fidelity", "beta", "ratio", "tan_ceiling", "franson_ok", "tan_ok"];

fn ratio_value(p: &BoundPoint) -> f64 {
    p.ratio.value().unwrap_or(f64::NAN)
}

pub fn bound_csv(report: &BoundReport) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for p in &report.points {
        let tan = p.tan_ceiling.map_or_else(|| "na".to_owned(), sci);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            sci(p.t),
            sci(p.q_mean),
            sci(p.delta_q),
            sci(p.dq),
            sci(p.fid),
            sci(p.beta),
            sci(ratio_value(p)),
            tan,
            flag(p.franson_ok),
            flag(p.tan_ok),
        );
    }
    out
}

fn opt_flag(x: Option<bool>) -> Value {
    x.map_or(Value::Null, Value::Bool)
}

pub fn bound_json(report: &BoundReport) -> Value {
    let points: Vec<Value> = report
        .points
        .iter()
        .map(|p| {
            json!({
                "t": num(p.t),
                "q_mean": num(p.q_mean),
                "delta_q": num(p.delta_q),
                "dq": num(p.dq),
                "fidelity": num(p.fid),
                "beta": num(p.beta),
                "ratio": opt_num(p.ratio.value()),
                "fid_floor": opt_num(p.fid_floor),
                "beta_ceiling": opt_num(p.beta_ceiling),
                "tan_ceiling": p.tan_ceiling.map_or(Value::Null, ceiling),
                "franson_ok": opt_flag(p.franson_ok),
                "fidelity_ok": opt_flag(p.fidelity_ok),
                "beta_ok": opt_flag(p.beta_ok),
                "tan_ok": opt_flag(p.tan_ok),
            })
        })
        .collect();
    let violation = report
        .first_violation()
        .map_or(Value::Null, |v| json!({"law": v.law.to_string(), "t": num(v.t)}));
    json!({
        "delta_e": num(report.delta_e),
        "eigenstate_start": report.eigenstate_start,
        "tau2": num(report.tau2),
        "validity_end": num(report.validity_end),
        "window_respected": report.window_respected,
        "first_violation": violation,
        "points": points,
    })
}

fn matrix_json(o: &Observable) -> Value {
    let m = o.matrix();
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols()).map(|j| json!({"re": num(m[(i, j)].re), "im": num(m[(i, j)].im)})).collect(),
                )
            })
            .collect(),
    )
}

pub fn instance_json(m: &ModelInstance) -> Value {
    json!({
        "label": m.label,
        "delta_e": num(m.delta_e),
        "hamiltonian": matrix_json(&m.hamiltonian),
        "observable": matrix_json(&m.observable_q),
        "state": m.initial_state.amplitudes().iter().map(|z| json!({"re": num(z.re), "im": num(z.im)})).collect::<Vec<_>>(),
    })
}

fn source_json(s: Source) -> Value {
    let (kind, index) = match s {
        Source::Trial(i) => ("trial", i),
        Source::Refined(i) => ("refined", i),
        Source::Candidate(i) => ("candidate", i),
    };
    json!({"kind": kind, "index": index})
}

/// Search settings echoed into the report header.
pub struct SearchEcho {
    pub window_end: f64,
    pub grid_points: usize,
    pub refine_tol: f64,
    pub candidate_labels: Vec<String>,
}

pub fn search_json(report: &SearchReport, echo: &SearchEcho) -> Value {
    let mut top = Map::new();
    top.insert("mode".into(), report.mode.name().into());
    top.insert("dim".into(), report.dim.into());
    top.insert("trials".into(), report.trials.into());
    top.insert("seed".into(), report.seed.into());
    top.insert("window".into(), json!([num(0.0), num(echo.window_end)]));
    top.insert("grid_points".into(), echo.grid_points.into());
    top.insert("refine_tol".into(), num(echo.refine_tol));
    top.insert("bound_compared".into(), num(report.bound_compared));
    top.insert("min_crossing".into(), opt_num(report.min_crossing));
    let (verdict, violation) = match &report.verdict {
        Verdict::NoViolation => ("no-violation", Value::Null),
        Verdict::Violation { source, crossing } => {
            ("violation", json!({"source": source_json(*source), "crossing": num(*crossing)}))
        }
    };
    top.insert("verdict".into(), verdict.into());
    top.insert("violation".into(), violation);
    top.insert("argmin".into(), report.argmin.map_or(Value::Null, source_json));
    top.insert(
        "argmin_instance".into(),
        report.argmin_instance.as_ref().map_or(Value::Null, instance_json),
    );
    top.insert(
        "refined".into(),
        report
            .refined
            .iter()
            .map(|r| {
                json!({
                    "trial_index": r.trial_index,
                    "sampled": num(r.sampled),
                    "refined": num(r.refined),
                    "iterations": r.iterations,
                })
            })
            .collect::<Vec<_>>()
            .into(),
    );
    top.insert(
        "candidates".into(),
        echo.candidate_labels
            .iter()
            .zip(&report.candidates)
            .map(|(label, t)| json!({"label": label, "crossing": opt_num(*t)}))
            .collect::<Vec<_>>()
            .into(),
    );
    top.insert("per_trial".into(), report.per_trial.iter().map(|t| opt_num(*t)).collect::<Vec<_>>().into());
    Value::Object(top)
}

/// One `quantity,measured,reference,abs_diff` line of a model summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub quantity: String,
    pub measured: f64,
    pub reference: Option<f64>,
}

impl SummaryRow {
    pub fn new(quantity: &str, measured: f64, reference: Option<f64>) -> Self {
        Self { quantity: quantity.to_owned(), measured, reference }
    }

    pub fn abs_diff(&self) -> Option<f64> {
        self.reference.map(|r| (self.measured - r).abs())
    }
}

/// Per-model trajectory table plus summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelReport {
    pub model: String,
    pub params: Vec<(String, f64)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub summary: Vec<SummaryRow>,
}

impl ModelReport {
    pub fn summary_value(&self, quantity: &str) -> Option<&SummaryRow> {
        self.summary.iter().find(|s| s.quantity == quantity)
    }

    pub fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(|&x| sci(x)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out.push_str("\nquantity,measured,reference,abs_diff\n");
        for s in &self.summary {
            let missing = || "na".to_owned();
            let _ = writeln!(
                out,
                "{},{},{},{}",
                s.quantity,
                sci(s.measured),
                s.reference.map_or_else(missing, sci),
                s.abs_diff().map_or_else(missing, sci)
            );
        }
        out
    }

    pub fn json(&self) -> Value {
        let params: Map<String, Value> = self.params.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
        let trajectory: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(self.columns.iter().zip(row).map(|(c, &x)| ((*c).to_owned(), num(x))).collect())
            })
            .collect();
        let summary: Vec<Value> = self
            .summary
            .iter()
            .map(|s| {
                json!({
                    "quantity": s.quantity,
                    "measured": num(s.measured),
                    "reference": opt_num(s.reference),
                    "abs_diff": opt_num(s.abs_diff()),
                })
            })
            .collect();
        json!({"model": self.model, "params": params, "trajectory": trajectory, "summary": summary})
    }
}
