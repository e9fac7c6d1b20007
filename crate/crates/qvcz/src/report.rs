//! Plot-ready serialization of run records: CSV (default) and JSON.
//!
//! All output is deterministic: fixed column order, scientific-notation
//! floats with shortest round-trip digits, JSON keys in sorted order.
//! Identical records serialize to identical bytes.
//!
//! Sweep CSV columns: `nu`, then per element in scenario order
//! `<elem>_num_re, <elem>_num_im, <elem>_cf_re, <elem>_cf_im,
//! <elem>_abs_err, <elem>_num_abs, <elem>_cf_abs`.

use serde_json::{json, Value};

use crate::closedform::{Resurrection, RevivalKind};
use crate::scenario::{CompareReport, StatsRecord, SweepRecord};

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

fn csv_from_rows(rows: Vec<Vec<String>>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.write_record(&row).expect("in-memory csv write");
    }
    let bytes = writer.into_inner().expect("in-memory csv flush");
    String::from_utf8(bytes).expect("csv output is ascii")
}

pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut rows = Vec::with_capacity(records.len() + 1);
    let mut header = vec!["nu".to_string()];
    if let Some(first) = records.first() {
        for entry in &first.entries {
            let e = entry.element;
            for suffix in ["num_re", "num_im", "cf_re", "cf_im", "abs_err", "num_abs", "cf_abs"] {
                header.push(format!("{e}_{suffix}"));
            }
        }
    }
    rows.push(header);
    for record in records {
        let mut row = vec![fmt(record.nu)];
        for entry in &record.entries {
            row.push(fmt(entry.numeric.re));
            row.push(fmt(entry.numeric.im));
            row.push(fmt(entry.closed_form.re));
            row.push(fmt(entry.closed_form.im));
            row.push(fmt(entry.abs_err()));
            row.push(fmt(entry.numeric.norm()));
            row.push(fmt(entry.closed_form.norm()));
        }
        rows.push(row);
    }
    csv_from_rows(rows)
}

pub fn sweep_json(records: &[SweepRecord]) -> String {
    let value: Value = records
        .iter()
        .map(|record| {
            json!({
                "nu": record.nu,
                "elements": record
                    .entries
                    .iter()
                    .map(|entry| {
                        json!({
                            "element": entry.element.to_string(),
                            "num_re": entry.numeric.re,
                            "num_im": entry.numeric.im,
                            "num_abs": entry.numeric.norm(),
                            "cf_re": entry.closed_form.re,
                            "cf_im": entry.closed_form.im,
                            "cf_abs": entry.closed_form.norm(),
                            "abs_err": entry.abs_err(),
                        })
                    })
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    serde_json::to_string_pretty(&value).expect("json serialization")
}

pub fn compare_csv(report: &CompareReport) -> String {
    let mut rows = vec![vec![
        "element".to_string(),
        "max_abs_err".to_string(),
        "worst_nu".to_string(),
        "pass".to_string(),
        "reconstructed".to_string(),
        "tolerance".to_string(),
        "nodes_used".to_string(),
        "nodes_recommended".to_string(),
    ]];
    for e in &report.elements {
        rows.push(vec![
            e.element.to_string(),
            fmt(e.max_abs_err),
            fmt(e.worst_nu),
            (e.max_abs_err <= report.tolerance).to_string(),
            e.reconstructed.to_string(),
            fmt(report.tolerance),
            report.nodes_used.to_string(),
            report.nodes_recommended.to_string(),
        ]);
    }
    csv_from_rows(rows)
}

pub fn compare_json(report: &CompareReport) -> String {
    let value = json!({
        "source": report.source.to_string(),
        "tolerance": report.tolerance,
        "grid_points": report.grid_points,
        "nodes_used": report.nodes_used,
        "nodes_recommended": report.nodes_recommended,
        "passed": report.passed(),
        "reconstructed_closed_forms": report.has_reconstructed(),
        "elements": report
            .elements
            .iter()
            .map(|e| {
                json!({
                    "element": e.element.to_string(),
                    "max_abs_err": e.max_abs_err,
                    "worst_nu": e.worst_nu,
                    "pass": e.max_abs_err <= report.tolerance,
                    "reconstructed": e.reconstructed,
                })
            })
            .collect::<Vec<_>>(),
    });
    serde_json::to_string_pretty(&value).expect("json serialization")
}

pub fn stats_csv(records: &[StatsRecord]) -> String {
    let head_len = records.iter().map(|r| r.pmf_head.len()).max().unwrap_or(0);
    let mut header = vec![
        "z_over_L".to_string(),
        "x_over_L".to_string(),
        "mean_h".to_string(),
        "mean_v".to_string(),
        "g2".to_string(),
        "total_mass".to_string(),
    ];
    for n in 0..head_len {
        header.push(format!("p{n}"));
    }
    let mut rows = vec![header];
    for r in records {
        let mut row = vec![
            fmt(r.z_over_l),
            fmt(r.x_over_l),
            fmt(r.mean_h),
            fmt(r.mean_v),
            fmt(r.g2),
            fmt(r.total_mass),
        ];
        for n in 0..head_len {
            // Beyond the stored head the distribution is identically zero.
            row.push(fmt(r.pmf_head.get(n).copied().unwrap_or(0.0)));
        }
        rows.push(row);
    }
    csv_from_rows(rows)
}

pub fn stats_json(records: &[StatsRecord]) -> String {
    let value: Value = records
        .iter()
        .map(|r| {
            json!({
                "z_over_L": r.z_over_l,
                "x_over_L": r.x_over_l,
                "mean_h": r.mean_h,
                "mean_v": r.mean_v,
                "g2": r.g2,
                "total_mass": r.total_mass,
                "pmf": r.pmf_head,
            })
        })
        .collect();
    serde_json::to_string_pretty(&value).expect("json serialization")
}

fn kind_name(kind: RevivalKind) -> &'static str {
    match kind {
        RevivalKind::Peak => "peak",
        RevivalKind::Onset => "onset",
    }
}

pub fn resurrection_csv(r: &Resurrection) -> String {
    csv_from_rows(vec![
        vec![
            "element".to_string(),
            "nu_star".to_string(),
            "kind".to_string(),
            "g2_re".to_string(),
            "g2_im".to_string(),
            "g2_abs".to_string(),
        ],
        vec![
            r.element.to_string(),
            fmt(r.nu_star),
            kind_name(r.kind).to_string(),
            fmt(r.value.re),
            fmt(r.value.im),
            fmt(r.value.norm()),
        ],
    ])
}

pub fn resurrection_json(r: &Resurrection) -> String {
    let value = json!({
        "element": r.element.to_string(),
        "nu_star": r.nu_star,
        "kind": kind_name(r.kind),
        "g2_re": r.value.re,
        "g2_im": r.value.im,
        "g2_abs": r.value.norm(),
    });
    serde_json::to_string_pretty(&value).expect("json serialization")
}
