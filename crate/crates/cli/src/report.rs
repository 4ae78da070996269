//! Report assembly: a human summary plus a machine block of one
//! key=value record per check, deterministic for a fixed config and seed.

use std::fmt::Write as _;

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Reported for information (documented discrepancies, exploratory
    /// scans); never fails the run.
    Info,
}

impl Status {
    fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        }
    }
}

/// One machine record. For residual checks lhs holds the observed value
/// and rhs the reference (0 for pure residuals); gap = lhs - rhs.
#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub status: Status,
}

impl CheckRecord {
    /// Residual-style check: passes when |value| <= tolerance.
    pub fn residual(id: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            id: id.into(),
            lhs: value,
            rhs: 0.0,
            gap: value,
            tolerance,
            status: if value.abs() <= tolerance {
                Status::Pass
            } else {
                Status::Fail
            },
        }
    }

    /// Match-style check: passes when |lhs - rhs| <= tolerance.
    pub fn matches(id: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            id: id.into(),
            lhs,
            rhs,
            gap: lhs - rhs,
            tolerance,
            status: if (lhs - rhs).abs() <= tolerance {
                Status::Pass
            } else {
                Status::Fail
            },
        }
    }

    /// Lower-bound check: passes when lhs >= rhs - tolerance.
    pub fn bounded_below(id: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            id: id.into(),
            lhs,
            rhs,
            gap: lhs - rhs,
            tolerance,
            status: if lhs >= rhs - tolerance {
                Status::Pass
            } else {
                Status::Fail
            },
        }
    }

    /// Condition check: records a boolean outcome.
    pub fn flag(id: impl Into<String>, ok: bool) -> Self {
        Self {
            id: id.into(),
            lhs: if ok { 1.0 } else { 0.0 },
            rhs: 1.0,
            gap: if ok { 0.0 } else { -1.0 },
            tolerance: 0.0,
            status: if ok { Status::Pass } else { Status::Fail },
        }
    }

    pub fn info(mut self) -> Self {
        self.status = Status::Info;
        self
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub human: Vec<String>,
    pub records: Vec<CheckRecord>,
    pub elapsed: Option<std::time::Duration>,
}

impl Report {
    pub fn push_line(&mut self, line: impl Into<String>) {
        self.human.push(line.into());
    }

    pub fn extend(&mut self, mut other: Report) {
        self.human.append(&mut other.human);
        self.records.append(&mut other.records);
    }

    pub fn failures(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.status == Status::Fail)
            .count()
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures() == 0 {
            0
        } else {
            1
        }
    }

    /// The deterministic machine block; byte-identical for identical
    /// config and seed.
    pub fn machine_block(&self) -> String {
        let mut s = String::from("[machine]\n");
        for r in &self.records {
            let _ = writeln!(
                s,
                "id={} lhs={:.12e} rhs={:.12e} gap={:.12e} tolerance={:.12e} status={}",
                r.id,
                r.lhs,
                r.rhs,
                r.gap,
                r.tolerance,
                r.status.as_str()
            );
        }
        s
    }

    pub fn render(&self, cfg: &RunConfig) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "capcone report");
        let _ = writeln!(s, "version = {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s);
        let _ = writeln!(s, "[config]");
        s.push_str(&cfg.echo());
        if !cfg.notices.is_empty() {
            let _ = writeln!(s);
            let _ = writeln!(s, "[notices]");
            for n in &cfg.notices {
                let _ = writeln!(s, "{n}");
            }
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "[summary]");
        for line in &self.human {
            let _ = writeln!(s, "{line}");
        }
        let pass = self
            .records
            .iter()
            .filter(|r| r.status == Status::Pass)
            .count();
        let info = self
            .records
            .iter()
            .filter(|r| r.status == Status::Info)
            .count();
        let _ = writeln!(
            s,
            "checks: {pass} passed, {} failed, {info} informational",
            self.failures()
        );
        if let Some(d) = self.elapsed {
            let _ = writeln!(s, "elapsed: {:.3} s", d.as_secs_f64());
        }
        let _ = writeln!(s);
        s.push_str(&self.machine_block());
        s
    }
}
