use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use transverse_blowup::ZeroReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Not applicable to the given parameters; never counts as a failure.
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, verdict: Status) -> Self {
        Check {
            name: name.into(),
            verdict,
            margin: None,
            residual: None,
            witness: None,
            detail: None,
        }
    }

    pub fn pass(name: impl Into<String>) -> Self {
        Check::new(name, Status::Pass)
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check::new(name, Status::Fail).with_detail(detail)
    }

    pub fn skipped(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check::new(name, Status::Skipped).with_detail(detail)
    }

    pub fn verdict(name: impl Into<String>, ok: bool) -> Self {
        Check::new(name, if ok { Status::Pass } else { Status::Fail })
    }

    /// Sampled zero test; the witness is kept only on failure.
    pub fn zero(name: impl Into<String>, rep: &ZeroReport) -> Self {
        Check::verdict(name, rep.is_zero)
            .with_residual(rep.worst_residual)
            .with_witness(rep.witness.clone())
    }

    pub fn with_margin(mut self, m: f64) -> Self {
        self.margin = Some(m);
        self
    }

    pub fn with_residual(mut self, r: f64) -> Self {
        self.residual = Some(r);
        self
    }

    pub fn with_witness(mut self, w: BTreeMap<String, f64>) -> Self {
        if self.verdict == Status::Fail {
            self.witness = Some(w);
        }
        self
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn failed(&self) -> bool {
        self.verdict == Status::Fail
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.verdict {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skip",
        };
        write!(f, "[{tag}] {}", self.name)?;
        if let Some(m) = self.margin {
            write!(f, " margin={m:e}")?;
        }
        if let Some(r) = self.residual {
            write!(f, " residual={r:e}")?;
        }
        if let Some(d) = &self.detail {
            write!(f, ": {d}")?;
        }
        if let Some(w) = &self.witness {
            write!(f, " at {w:?}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub data: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_only_on_failure() {
        let w: BTreeMap<String, f64> = [("r".to_string(), 0.5)].into();
        assert!(Check::pass("a").with_witness(w.clone()).witness.is_none());
        let failed = Check::fail("b", "broken").with_witness(w).with_margin(-1.0);
        assert!(failed.failed());
        assert_eq!(
            failed.to_string(),
            "[FAIL] b margin=-1e0: broken at {\"r\": 0.5}"
        );
        let json = serde_json::to_value(Check::skipped("c", "n/a")).unwrap();
        assert_eq!(json["verdict"], "skipped");
        assert!(json.get("margin").is_none());
    }
}
