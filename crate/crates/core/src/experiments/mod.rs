//! Reproducible experiment pipelines producing CSV tables and JSON summaries.
//!
//! Every job gets a sub-seed from `(master seed, experiment, point,
//! replicate)`, and records are written in job order, so the bytes of the
//! output never depend on the number of worker threads.

mod config;
mod single;
mod sweeps;

use std::fmt::Write as _;

use rayon::prelude::*;

pub use config::{ExperimentConfig, ExperimentKind};
pub use single::{analyze_graph, simulate, AnalysisReport};
pub use sweeps::{families, sweep_n, sweep_p_er, sweep_q_sbm};

use crate::coalescence::{analyze_exact, SolverOptions};
use crate::error::{Error, Result};
use crate::ratio::CriticalRatio;

/// CSV table plus a JSON summary of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub csv: String,
    pub summary: serde_json::Value,
}

/// Runs `config` on a dedicated pool of `threads` workers (0 = rayon's default).
pub fn run(config: &ExperimentConfig, threads: usize) -> Result<ExperimentOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::param(format!("thread pool: {e}")))?;
    pool.install(|| match config.kind {
        ExperimentKind::SweepN => sweep_n(config),
        ExperimentKind::SweepPEr => sweep_p_er(config),
        ExperimentKind::SweepQSbm => sweep_q_sbm(config),
        ExperimentKind::Families => families(config),
        ExperimentKind::AnalyzeFile => single::analyze_file(config),
        ExperimentKind::Simulate => simulate(config),
    })
}

/// Applies `job` to every index in parallel, keeping index order.
pub(crate) fn par_jobs<T: Send>(count: usize, job: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..count).into_par_iter().map(job).collect()
}

pub(crate) struct Table {
    echo: String,
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub(crate) fn new(config: &ExperimentConfig, header: &[&str]) -> Self {
        let mut table = Self {
            echo: config.echo(),
            writer: csv::Writer::from_writer(Vec::new()),
        };
        table.write(header);
        table
    }

    pub(crate) fn row(&mut self, fields: &[String]) {
        self.write(fields);
    }

    fn write<T: AsRef<[u8]>>(&mut self, fields: &[T]) {
        // In-memory writes cannot fail.
        self.writer
            .write_record(fields)
            .expect("in-memory csv write");
    }

    pub(crate) fn finish(self) -> String {
        let bytes = self.writer.into_inner().expect("in-memory csv flush");
        self.echo + &String::from_utf8(bytes).expect("csv fields are utf-8")
    }
}

pub(crate) fn num(x: f64) -> String {
    format!("{x}")
}

pub(crate) fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// `1/b*` as plotted: zero at a pole, empty when `b*` itself is zero.
pub(crate) fn plotted_inverse(r: &CriticalRatio) -> Option<f64> {
    if r.pole {
        Some(0.0)
    } else {
        r.inverse()
    }
}

/// Numerator, denominator, value, plotted inverse and pole flag.
pub(crate) fn ratio_fields(r: Option<&CriticalRatio>) -> [String; 5] {
    match r {
        Some(r) => [
            num(r.numerator),
            num(r.denominator),
            opt(r.value()),
            opt(plotted_inverse(r)),
            (r.pole as u8).to_string(),
        ],
        None => Default::default(),
    }
}

pub(crate) fn mf_over_exact(mf: &CriticalRatio, exact: &CriticalRatio) -> Option<f64> {
    Some(mf.value()? / exact.value()?).filter(|r| r.is_finite())
}

pub(crate) fn exact_ratio(g: &crate::graph::Graph) -> Result<CriticalRatio> {
    analyze_exact(g, &SolverOptions::default()).map(|(_, _, r)| r)
}

pub(crate) fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

pub(crate) fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let h = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[h]
    } else {
        0.5 * (v[h - 1] + v[h])
    })
}

pub(crate) fn status(result: &Result<()>) -> String {
    match result {
        Ok(()) => "ok".into(),
        Err(e) => {
            let mut s = String::new();
            let _ = write!(s, "{e}");
            s.replace('\n', " ")
        }
    }
}

pub(crate) fn json_f(x: Option<f64>) -> serde_json::Value {
    x.filter(|v| v.is_finite())
        .map_or(serde_json::Value::Null, |v| v.into())
}
