use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::response::Phase;

use super::ComparisonReport;

/// One row of the long-format CSV export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub plan: String,
    pub t: usize,
    pub label: String,
    pub phase: Phase,
    pub actual: Option<f64>,
    pub predicted: f64,
    pub relative_error_percent: Option<f64>,
}

pub fn csv_rows(report: &ComparisonReport) -> Vec<CsvRow> {
    report
        .plans
        .iter()
        .flat_map(|p| {
            p.report.rows.iter().map(|r| CsvRow {
                plan: p.name.clone(),
                t: r.t,
                label: report.label(r.t),
                phase: r.phase,
                actual: r.actual,
                predicted: r.predicted,
                relative_error_percent: r.relative_error_percent,
            })
        })
        .collect()
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

pub fn write_csv(rows: &[CsvRow], out: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(input: impl Read) -> Result<Vec<CsvRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_error)
}

/// Fixed-width comparison table: a predicted value and signed relative error
/// per plan, phase means, then the resolved λ (`r`) and β.
pub fn render_table(report: &ComparisonReport, precision: usize) -> String {
    let p = precision;
    let blank = String::new();
    let fmt =
        |v: Option<f64>, digits: usize| v.map_or_else(String::new, |v| format!("{v:.digits$}"));

    // one cell matrix; column 0 is the label, 1 the observation, then pairs
    let mut header = vec!["t".to_string(), "actual".to_string()];
    let mut sub = vec![blank.clone(), blank.clone()];
    for plan in &report.plans {
        header.push(plan.name.clone());
        header.push(blank.clone());
        sub.push("predicted".into());
        sub.push("error %".into());
    }

    let mut body: Vec<Vec<String>> = Vec::new();
    let rows = report.plans.first().map_or(0, |p| p.report.rows.len());
    for i in 0..rows {
        let first = &report.plans[0].report.rows[i];
        let mut line = vec![report.label(first.t), fmt(first.actual, p)];
        for plan in &report.plans {
            let r = &plan.report.rows[i];
            line.push(fmt(Some(r.predicted), p));
            line.push(fmt(r.relative_error_percent, p));
        }
        body.push(line);
    }

    let mut footer: Vec<Vec<String>> = Vec::new();
    let mut mean_row = |name: &str, pick: &dyn Fn(&super::PlanReport) -> Option<f64>| {
        let mut line = vec![name.to_string(), blank.clone()];
        for plan in &report.plans {
            line.push(blank.clone());
            line.push(fmt(pick(plan), p + 1));
        }
        footer.push(line);
    };
    mean_row("mean fit", &|pl| Some(pl.report.fit_mean_error));
    if report.horizon > 0 {
        mean_row("mean forecast", &|pl| pl.report.forecast_mean_error);
    }
    mean_row("mean", &|pl| Some(pl.report.combined_mean_error));
    let mut param_row = |name: &str, pick: &dyn Fn(&super::PlanReport) -> f64| {
        let mut line = vec![name.to_string(), blank.clone()];
        for plan in &report.plans {
            line.push(fmt(Some(pick(plan)), p + 2));
            line.push(blank.clone());
        }
        footer.push(line);
    };
    param_row("r", &|pl| pl.report.model.lambda);
    param_row("β", &|pl| pl.report.model.beta);

    let ncols = header.len();
    let width = |s: &str| s.chars().count();
    let mut widths = vec![0usize; ncols];
    for line in std::iter::once(&sub).chain(&body).chain(&footer) {
        for (w, cell) in widths.iter_mut().zip(line) {
            *w = (*w).max(width(cell));
        }
    }
    widths[0] = widths[0].max(width(&header[0]));
    widths[1] = widths[1].max(width(&header[1]));
    // a plan name spans its two columns
    for j in (2..ncols).step_by(2) {
        let need = width(&header[j]);
        let have = widths[j] + 2 + widths[j + 1];
        if need > have {
            widths[j] += need - have;
        }
    }

    let pad_left = |s: &str, w: usize| format!("{}{s}", " ".repeat(w.saturating_sub(width(s))));
    let pad_right = |s: &str, w: usize| format!("{s}{}", " ".repeat(w.saturating_sub(width(s))));
    let mut out = String::new();

    let mut line = format!(
        "{}  {}",
        pad_right(&header[0], widths[0]),
        pad_left(&header[1], widths[1])
    );
    for j in (2..ncols).step_by(2) {
        line.push_str(" | ");
        line.push_str(&pad_right(&header[j], widths[j] + 2 + widths[j + 1]));
    }
    out.push_str(line.trim_end());
    out.push('\n');

    let render = |cells: &[String]| {
        let mut line = format!(
            "{}  {}",
            pad_right(&cells[0], widths[0]),
            pad_left(&cells[1], widths[1])
        );
        for j in (2..ncols).step_by(2) {
            line.push_str(" | ");
            line.push_str(&pad_left(&cells[j], widths[j]));
            line.push_str("  ");
            line.push_str(&pad_left(&cells[j + 1], widths[j + 1]));
        }
        let mut line = line.trim_end().to_string();
        line.push('\n');
        line
    };
    out.push_str(&render(&sub));
    let rule: usize = widths.iter().sum::<usize>() + 2 + (ncols - 2) / 2 * 5;
    out.push_str(&"-".repeat(rule));
    out.push('\n');
    for (i, cells) in body.iter().enumerate() {
        if i == report.fit_len && report.horizon > 0 {
            out.push_str(&"-".repeat(rule));
            out.push('\n');
        }
        out.push_str(&render(cells));
    }
    out.push_str(&"-".repeat(rule));
    out.push('\n');
    for cells in &footer {
        out.push_str(&render(cells));
    }
    out
}
