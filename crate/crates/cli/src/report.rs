//! Result documents written by the subcommands.

use gauge_core::{LevelRecord, SpaceDescriptor, Status};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// The document written by `integrate`, `convergence` and `transfer`.
///
/// Non-finite numbers are written as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDoc {
    pub task: String,
    pub space: SpaceDescriptor,
    pub measure: String,
    pub integrand: String,
    pub epsilon: f64,
    pub seed: u64,
    pub value: Option<f64>,
    pub error_estimate: Option<f64>,
    pub status: Status,
    pub levels: Vec<LevelRecord>,
    pub runtime_ms: u64,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transfer: Option<TransferComparison>,
}

/// The interval-side value of a transfer run with `p0 = 1/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferComparison {
    pub interval_value: Option<f64>,
    pub interval_status: Status,
    pub difference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanEntry {
    /// 1-based index into the left valuation's atoms.
    pub i: usize,
    /// 1-based index into the right valuation's atoms.
    pub j: usize,
    pub t: f64,
}

/// The document written by `valuation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuationDoc {
    pub task: String,
    pub query: String,
    pub left: String,
    pub right: String,
    pub holds: bool,
    pub plan: Option<Vec<PlanEntry>>,
    pub reason: Option<String>,
    pub version: String,
}

pub fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl ResultDoc {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result documents serialize")
    }

    pub fn from_json(s: &str) -> Result<ResultDoc, CliError> {
        serde_json::from_str(s).map_err(|e| CliError::Config(format!("not a result document: {e}")))
    }

    /// The level table as CSV with header `gauge,cells,norm,sum,spread`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["gauge", "cells", "norm", "sum", "spread"]).expect("in-memory write");
        for l in &self.levels {
            w.write_record([
                l.gauge.clone(),
                l.cells.to_string(),
                format!("{:e}", l.norm),
                format!("{:.17e}", l.sum),
                format!("{:e}", l.spread),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }
}

impl ValuationDoc {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result documents serialize")
    }
}
