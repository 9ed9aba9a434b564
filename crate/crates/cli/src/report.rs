//! Report documents and their text rendering.

use std::fmt::Write;

use serde::Serialize;

use igklo_core::igklo::{Corruption, ImageError};
use igklo_core::oracle::{cross_check, OracleSummary};
use igklo_core::relcheck::{
    identity_suite, run_all_detailed, Bb1Convention, CheckOptions, CheckReport, RelationCase,
};

use crate::config::RunConfig;

pub const REPORT_SCHEMA: &str = "igklo-report/1";

/// Wraps any payload with the schema id and the verb that produced it.
#[derive(Debug, Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema: &'static str,
    pub verb: &'static str,
    pub body: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(verb: &'static str, body: T) -> Self {
        Envelope {
            schema: REPORT_SCHEMA,
            verb,
            body,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ImageDoc {
    pub instance: String,
    pub generator: String,
    pub image: String,
}

#[derive(Debug, Serialize)]
pub struct InstanceDoc {
    pub name: String,
    pub rank: usize,
    /// τ as a 1-based permutation.
    pub tau: Vec<usize>,
    pub lambda: Vec<i64>,
    pub mu: Vec<i64>,
    pub v: Vec<u32>,
    pub theta: Vec<u8>,
    pub orientation: Vec<[usize; 2]>,
    /// 2℘_i.
    pub wp2: Vec<i32>,
}

#[derive(Debug, Serialize)]
pub struct CatalogDoc {
    pub schema: &'static str,
    pub instances: Vec<InstanceDoc>,
}

impl CatalogDoc {
    pub fn text(&self) -> String {
        let mut s = String::new();
        let list = |xs: &[String]| xs.join(",");
        for i in &self.instances {
            let nums = |v: Vec<String>| list(&v);
            let _ = writeln!(
                s,
                "{:<18} rank {}  tau {}  v {}  theta {}  lambda {}  mu {}",
                i.name,
                i.rank,
                nums(i.tau.iter().map(|x| x.to_string()).collect()),
                nums(i.v.iter().map(|x| x.to_string()).collect()),
                nums(i.theta.iter().map(|x| x.to_string()).collect()),
                nums(i.lambda.iter().map(|x| x.to_string()).collect()),
                nums(i.mu.iter().map(|x| x.to_string()).collect()),
            );
        }
        s
    }
}

pub fn catalog(cfg: &RunConfig) -> CatalogDoc {
    let instances = cfg
        .instances
        .iter()
        .map(|x| InstanceDoc {
            name: x.name.clone(),
            rank: x.rank(),
            tau: (0..x.rank()).map(|i| x.tau(i) + 1).collect(),
            lambda: x.w.clone(),
            mu: x.ell.clone(),
            v: x.v.clone(),
            theta: x.theta.clone(),
            orientation: x
                .orientation
                .arrows()
                .map(|(a, b)| [a + 1, b + 1])
                .collect(),
            wp2: x.wp2.clone(),
        })
        .collect();
    CatalogDoc {
        schema: REPORT_SCHEMA,
        instances,
    }
}

#[derive(Debug, Serialize)]
pub struct InstanceRun {
    pub report: CheckReport,
    pub oracle: OracleSummary,
}

#[derive(Debug, Serialize)]
pub struct RunDoc {
    pub schema: &'static str,
    pub verb: &'static str,
    pub seed: u64,
    pub trials: usize,
    pub order: usize,
    pub bb1_convention: &'static str,
    pub corruption: Option<String>,
    pub instances: Vec<InstanceRun>,
    pub identities: Option<CheckReport>,
    pub failed_checks: usize,
    pub oracle_disagreements: usize,
    pub all_pass: bool,
}

pub fn report_text(r: &CheckReport) -> String {
    let failed = r.failures().count();
    let mut s = format!(
        "== {} ({} checks, {} failed, {} ms)\n",
        r.instance,
        r.entries.len(),
        failed,
        r.millis
    );
    for e in &r.entries {
        let _ = writeln!(s, "{e}");
    }
    s
}

impl RunDoc {
    pub fn text(&self) -> String {
        let mut s = String::new();
        for run in &self.instances {
            s.push_str(&report_text(&run.report));
            let o = &run.oracle;
            let _ = writeln!(
                s,
                "oracle: {} comparisons, {} disagreements (seed {}, {} trials); series {} checked at order {}, {} failed",
                o.checks.len(),
                o.disagreements().count(),
                o.seed,
                o.trials,
                o.series_checked,
                o.order,
                o.series_failed.len()
            );
            for d in o.disagreements() {
                let _ = writeln!(
                    s,
                    "  disagreement: {} (symbolic {}, numeric {})",
                    d.label, d.symbolic_pass, d.numeric_pass
                );
            }
            for f in &o.series_failed {
                let _ = writeln!(s, "  series mismatch: {f}");
            }
        }
        if let Some(ids) = &self.identities {
            s.push_str(&report_text(ids));
        }
        let _ = writeln!(
            s,
            "summary: {} ({} failed checks, {} oracle disagreements)",
            if self.all_pass { "PASS" } else { "FAIL" },
            self.failed_checks,
            self.oracle_disagreements
        );
        s
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Oracle(#[from] igklo_core::oracle::OracleError),
}

/// Runs every requested check, the oracle replay and, for unfiltered runs, the
/// identity suite.
pub fn run_report(cfg: &RunConfig, corruption: Option<Corruption>) -> Result<RunDoc, RunError> {
    let opts = CheckOptions {
        bb1: cfg.bb1,
        corruption,
    };
    let filter = cfg
        .relations
        .clone()
        .map(|fs| move |c: &RelationCase| fs.iter().any(|f| f.matches(c)));
    let mut instances = Vec::new();
    for inst in &cfg.instances {
        let run = match &filter {
            Some(f) => run_all_detailed(inst, &opts, Some(f))?,
            None => run_all_detailed(inst, &opts, None)?,
        };
        let oracle = cross_check(&run, cfg.trials, cfg.seed, cfg.order)?;
        instances.push(InstanceRun {
            report: run.report,
            oracle,
        });
    }
    let identities = cfg.relations.is_none().then(identity_suite);
    let failed_checks = instances
        .iter()
        .map(|r| r.report.failures().count())
        .sum::<usize>()
        + identities.as_ref().map_or(0, |r| r.failures().count());
    let oracle_disagreements = instances
        .iter()
        .map(|r| r.oracle.disagreements().count() + r.oracle.series_failed.len())
        .sum::<usize>();
    Ok(RunDoc {
        schema: REPORT_SCHEMA,
        verb: "check",
        seed: cfg.seed,
        trials: cfg.trials,
        order: cfg.order,
        bb1_convention: match cfg.bb1 {
            Bb1Convention::TauI => "taui",
            Bb1Convention::I => "i",
        },
        corruption: corruption.map(|c| format!("{c:?}")),
        instances,
        identities,
        failed_checks,
        oracle_disagreements,
        all_pass: failed_checks == 0 && oracle_disagreements == 0,
    })
}
