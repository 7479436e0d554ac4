//! Human-readable tables and machine rows for audit and regret reports.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::audit::{Axiom, AxiomReport};
use crate::distortion::DistortionReport;
use crate::error::{Error, Result};
use crate::harness::io::read_artifact;
use crate::harness::pipeline::artifacts;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Table,
    Rows,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "rows" => Ok(ReportFormat::Rows),
            other => Err(Error::input(format!("unknown report format `{other}` (expected table or rows)"))),
        }
    }
}

/// Anchor-level status in machine rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowStatus {
    Pass,
    Fail,
    Vacuous,
}

impl RowStatus {
    fn as_str(self) -> &'static str {
        match self {
            RowStatus::Pass => "PASS",
            RowStatus::Fail => "FAIL",
            RowStatus::Vacuous => "VACUOUS",
        }
    }
}

impl FromStr for RowStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "PASS" => Ok(RowStatus::Pass),
            "FAIL" => Ok(RowStatus::Fail),
            "VACUOUS" => Ok(RowStatus::Vacuous),
            other => Err(Error::input(format!("unknown status `{other}`"))),
        }
    }
}

/// One `(axiom, epsilon, anchor)` row.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub axiom: Axiom,
    pub epsilon: f64,
    pub anchor: usize,
    pub dominated: Vec<usize>,
    pub violations: Vec<usize>,
    pub min_margin: Option<f64>,
    pub status: RowStatus,
}

pub const ROW_HEADER: [&str; 7] = ["axiom", "epsilon", "anchor", "dominated", "violations", "min_margin", "status"];

pub fn rows_from_reports(reports: &[AxiomReport]) -> Vec<ReportRow> {
    reports
        .iter()
        .flat_map(|r| {
            r.anchors.iter().map(move |a| ReportRow {
                axiom: r.axiom,
                epsilon: r.epsilon,
                anchor: a.anchor,
                dominated: a.dominated.clone(),
                violations: a.violations.clone(),
                min_margin: a.min_margin,
                status: if !a.pass() {
                    RowStatus::Fail
                } else if a.vacuous() {
                    RowStatus::Vacuous
                } else {
                    RowStatus::Pass
                },
            })
        })
        .collect()
}

fn join(ix: &[usize]) -> String {
    ix.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
}

fn split(s: &str) -> Result<Vec<usize>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|t| t.parse().map_err(|e| Error::input(format!("bad index `{t}`: {e}"))))
        .collect()
}

/// Comma-separated rows with a header line. Index lists are `;`-separated;
/// an absent margin is an empty field.
pub fn format_rows(rows: &[ReportRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(ROW_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.axiom.name().to_string(),
            r.epsilon.to_string(),
            r.anchor.to_string(),
            join(&r.dominated),
            join(&r.violations),
            r.min_margin.map(|m| m.to_string()).unwrap_or_default(),
            r.status.as_str().to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn parse_rows(text: &str) -> Result<Vec<ReportRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            what: "report rows",
            line,
            message: e.to_string(),
        })?;
        if rec.len() != ROW_HEADER.len() {
            return Err(Error::Parse {
                what: "report rows",
                line,
                message: format!("expected {} fields", ROW_HEADER.len()),
            });
        }
        let wrap = |e: Error| Error::Parse {
            what: "report rows",
            line,
            message: e.to_string(),
        };
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::input(format!("bad number `{s}`: {e}")));
        out.push(ReportRow {
            axiom: rec[0].parse().map_err(wrap)?,
            epsilon: num(&rec[1]).map_err(wrap)?,
            anchor: rec[2].parse().map_err(|e| wrap(Error::input(format!("bad anchor: {e}"))))?,
            dominated: split(&rec[3]).map_err(wrap)?,
            violations: split(&rec[4]).map_err(wrap)?,
            min_margin: if rec[5].is_empty() { None } else { Some(num(&rec[5]).map_err(wrap)?) },
            status: rec[6].parse().map_err(wrap)?,
        });
    }
    Ok(out)
}

fn margin(m: Option<f64>) -> String {
    m.map_or_else(|| "-".to_string(), |m| format!("{m:.6}"))
}

/// Per-axiom summary table.
pub fn format_table(reports: &[AxiomReport], distortion: Option<&DistortionReport>) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:>8} {:<8} {:>9} {:>10} {:>12} {:>15}",
        "axiom", "epsilon", "verdict", "dominated", "violations", "min_margin", "vacuous_anchors"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<12} {:>8} {:<8} {:>9} {:>10} {:>12} {:>15}",
            r.axiom.name(),
            r.epsilon,
            r.verdict().to_string(),
            r.dominated_pairs(),
            r.violations.len(),
            margin(r.min_margin()),
            format!("{}/{}", r.vacuous_anchors().len(), r.slate_size),
        );
        if let (Some(done), Some(skipped)) = (r.metadata.partitions_evaluated, r.metadata.partitions_skipped) {
            let _ = writeln!(
                out,
                "{:<12} partitions evaluated={done} skipped={skipped} passed={}",
                "",
                r.metadata.partitions_passed.unwrap_or(0)
            );
        }
    }
    if let Some(d) = distortion {
        let regret = d.worst_case_regret.map_or_else(|| "undefined".to_string(), |x| format!("{x:.6}"));
        let _ = writeln!(
            out,
            "distortion   delta={} learned_winner={} worst_case_regret={} consistent={}/{}",
            d.delta, d.learned_winner, regret, d.consistent, d.candidates
        );
        if let Some(msg) = &d.diagnostic {
            let _ = writeln!(out, "             {msg}");
        }
    }
    out
}

pub fn render(reports: &[AxiomReport], distortion: Option<&DistortionReport>, format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => format_table(reports, distortion),
        ReportFormat::Rows => format_rows(&rows_from_reports(reports)),
    }
}

/// Renders the saved reports of a run directory.
pub fn emit_report(out_dir: &Path, format: ReportFormat) -> Result<String> {
    let audit_path = out_dir.join(artifacts::AUDIT);
    let reports: Vec<AxiomReport> = serde_json::from_str(&read_artifact(&audit_path)?)?;
    let distortion_path = out_dir.join(artifacts::DISTORTION);
    let distortion: Option<DistortionReport> = match read_artifact(&distortion_path) {
        Ok(text) => Some(serde_json::from_str(&text)?),
        Err(Error::MissingArtifact(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(render(&reports, distortion.as_ref(), format))
}
