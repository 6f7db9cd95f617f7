//! Serializable records for CLI output. JSON fields and CSV columns share
//! one fixed order; floats are written with 17 significant digits so records
//! round-trip exactly.

use serde::Serialize;

use crate::qseries::CorrectionId;
use crate::radial::{CaseTag, SweepRow, VerifyReport};

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str =
    "schema_version,params,cusp,case,correction,q_re,q_im,numeric_re,numeric_im,abs_diff,status";

/// One classification/limit/verification record.
#[derive(Clone, Debug, Serialize)]
pub struct LimitRecord {
    pub schema_version: u32,
    pub params: String,
    pub cusp: String,
    pub case: CaseTag,
    pub correction: CorrectionId,
    pub q_re: f64,
    pub q_im: f64,
    pub numeric_re: Option<f64>,
    pub numeric_im: Option<f64>,
    pub abs_diff: Option<f64>,
    pub status: String,
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt17_opt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

impl LimitRecord {
    pub fn from_verify(report: &VerifyReport) -> Self {
        LimitRecord {
            schema_version: SCHEMA_VERSION,
            params: report.params.to_string(),
            cusp: report.cusp.to_string(),
            case: report.closed.case,
            correction: report.closed.correction,
            q_re: report.closed.constant.re,
            q_im: report.closed.constant.im,
            numeric_re: Some(report.numeric.value.re),
            numeric_im: Some(report.numeric.value.im),
            abs_diff: Some(report.abs_diff),
            status: if report.pass { "pass" } else { "fail" }.to_string(),
        }
    }

    pub fn from_sweep_row(params: &str, row: &SweepRow) -> Self {
        LimitRecord {
            schema_version: SCHEMA_VERSION,
            params: params.to_string(),
            cusp: row.cusp.to_string(),
            case: row.case,
            correction: row.correction,
            q_re: row.constant.re,
            q_im: row.constant.im,
            numeric_re: row.numeric.map(|v| v.re),
            numeric_im: row.numeric.map(|v| v.im),
            abs_diff: row.abs_diff,
            status: match &row.error {
                Some(e) => format!("error: {e}"),
                None if row.pass => "pass".to_string(),
                None => "fail".to_string(),
            },
        }
    }

    /// CSV row in header order. The status field is quoted if it contains a
    /// comma (error messages may).
    pub fn to_csv_row(&self) -> String {
        let status = if self.status.contains(',') || self.status.contains('"') {
            format!("\"{}\"", self.status.replace('"', "\"\""))
        } else {
            self.status.clone()
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.schema_version,
            self.params,
            self.cusp,
            self.case,
            self.correction,
            fmt17(self.q_re),
            fmt17(self.q_im),
            fmt17_opt(self.numeric_re),
            fmt17_opt(self.numeric_im),
            fmt17_opt(self.abs_diff),
            status,
        )
    }
}
