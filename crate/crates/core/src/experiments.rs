//! Seeded Monte Carlo runs over random binary forms: real-rank and root-count
//! frequency tables, and bulk checks of the real-rootedness criteria.
//!
//! Sample `i` depends only on `(seed, i)`, so neither the worker count nor the
//! scheduling order can change a report.

use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::BinaryForm;
use crate::poly::Q;
use crate::rank::{real_rank, RankCertificate, SearchBudget};
use crate::roots::{count_projective_real_roots, resultant_gradient};
use crate::theorem::{verify_theorem1, TheoremReport};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const MAX_SAMPLE_RETRIES: usize = 64;
pub const DISCLAIMER: &str = "Empirical frequencies under the stated sampling distribution. \
They are evidence only and do not settle which real ranks are typical.";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientDistribution {
    /// Standard normal floats snapped to multiples of `2^-dyadic_bits`.
    GaussianRationalized,
    /// Integers uniform in `[-int_bound, int_bound]`.
    UniformInt,
}

impl std::str::FromStr for CoefficientDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian_rationalized" | "gaussian" => Ok(Self::GaussianRationalized),
            "uniform_int" | "uniform" => Ok(Self::UniformInt),
            other => Err(Error::Invalid(format!("unknown distribution {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub degree: usize,
    pub samples: usize,
    pub seed: u64,
    pub coefficient_distribution: CoefficientDistribution,
    pub dyadic_bits: u32,
    pub int_bound: i64,
    pub budget: SearchBudget,
    /// Worker threads; 0 uses all available cores.
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            degree: 3,
            samples: 100,
            seed: 0,
            coefficient_distribution: CoefficientDistribution::GaussianRationalized,
            dyadic_bits: 32,
            int_bound: 10,
            budget: SearchBudget::default(),
            workers: 0,
        }
    }
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.degree < 3 {
            return Err(Error::Invalid(format!("degree must be >= 3, got {}", self.degree)));
        }
        if self.samples == 0 {
            return Err(Error::Invalid("samples must be >= 1".into()));
        }
        if self.dyadic_bits > 52 {
            return Err(Error::Invalid("dyadicBits must be <= 52".into()));
        }
        if self.int_bound < 1 {
            return Err(Error::Invalid("intBound must be >= 1".into()));
        }
        Ok(())
    }
}

fn draw_coefficient(rng: &mut ChaCha8Rng, config: &ExperimentConfig) -> Q {
    match config.coefficient_distribution {
        CoefficientDistribution::GaussianRationalized => {
            let x: f64 = rng.sample(StandardNormal);
            let scale = (1u64 << config.dyadic_bits) as f64;
            let num = BigInt::from_f64((x * scale).round()).unwrap_or_default();
            Q::new(num, BigInt::one() << config.dyadic_bits)
        }
        CoefficientDistribution::UniformInt => {
            let b = config.int_bound;
            Q::from_integer(BigInt::from(rng.random_range(-b..=b)))
        }
    }
}

/// The `index`-th sample of a run; resampled from the same stream until the
/// gradient resultant is nonzero.
pub fn sample_form(config: &ExperimentConfig, index: u64) -> Result<BinaryForm> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index);
    for _ in 0..MAX_SAMPLE_RETRIES {
        let coeffs = (0..=config.degree).map(|_| draw_coefficient(&mut rng, config)).collect();
        let f = BinaryForm::new(coeffs)?;
        if !f.is_zero() && !resultant_gradient(&f)?.is_zero() {
            return Ok(f);
        }
    }
    Err(Error::SampleRetries(MAX_SAMPLE_RETRIES))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    TypicalRank,
    TheoremFuzz,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Counterexample {
    pub index: u64,
    pub expression: String,
    pub form: BinaryForm,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SampleFailure {
    pub index: u64,
    pub expression: Option<String>,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub basis: String,
    pub disclaimer: String,
    pub samples: usize,
    /// Named frequency tables; every table sums to `samples`.
    pub histograms: BTreeMap<String, BTreeMap<String, usize>>,
    pub duplicate_forms: usize,
    pub counterexamples: Vec<Counterexample>,
    pub failures: Vec<SampleFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl ExperimentReport {
    pub fn histogram(&self, name: &str) -> Option<&BTreeMap<String, usize>> {
        self.histograms.get(name)
    }

    /// JSON without the wall-time field; identical configs give identical bytes.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.wall_time_seconds = None;
        serde_json::to_string_pretty(&r).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `histogram,bucket,count` rows for every table.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["histogram", "bucket", "count"]).expect("in-memory write");
        for (name, table) in &self.histograms {
            for (bucket, count) in table {
                w.write_record([name.as_str(), bucket.as_str(), &count.to_string()])
                    .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

pub fn rank_bucket(cert: &RankCertificate) -> String {
    match cert.real_exact {
        Some(r) => r.to_string(),
        None => format!("undetermined[{},{}]", cert.real_lower, cert.real_upper),
    }
}

enum Outcome<T> {
    Done(BinaryForm, T),
    Failed(SampleFailure),
}

fn run_samples<T, F>(config: &ExperimentConfig, work: F) -> Result<Vec<Outcome<T>>>
where
    T: Send,
    F: Fn(&BinaryForm) -> Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Invalid(e.to_string()))?;
    let outcomes = pool.install(|| {
        (0..config.samples as u64)
            .into_par_iter()
            .map(|i| match sample_form(config, i) {
                Err(e) => Outcome::Failed(SampleFailure { index: i, expression: None, error: e.to_string() }),
                Ok(f) => match work(&f) {
                    Ok(t) => Outcome::Done(f, t),
                    Err(e) => Outcome::Failed(SampleFailure {
                        index: i,
                        expression: Some(f.to_string()),
                        error: e.to_string(),
                    }),
                },
            })
            .collect()
    });
    Ok(outcomes)
}

struct Tally {
    histograms: BTreeMap<String, BTreeMap<String, usize>>,
    seen: HashSet<Vec<Q>>,
    duplicates: usize,
    counterexamples: Vec<Counterexample>,
    failures: Vec<SampleFailure>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            histograms: BTreeMap::new(),
            seen: HashSet::new(),
            duplicates: 0,
            counterexamples: Vec::new(),
            failures: Vec::new(),
        }
    }

    fn bump(&mut self, table: &str, bucket: impl Into<String>) {
        *self
            .histograms
            .entry(table.to_string())
            .or_default()
            .entry(bucket.into())
            .or_default() += 1;
    }

    fn record_form(&mut self, f: &BinaryForm) {
        if !self.seen.insert(f.coeffs().to_vec()) {
            self.duplicates += 1;
        }
    }

    fn counterexample(&mut self, index: u64, f: &BinaryForm, reason: String) {
        self.counterexamples.push(Counterexample {
            index,
            expression: f.to_string(),
            form: f.clone(),
            reason,
        });
    }

    fn finish(self, kind: ExperimentKind, config: &ExperimentConfig, started: Instant) -> ExperimentReport {
        ExperimentReport {
            schema_version: REPORT_SCHEMA_VERSION,
            kind,
            config: config.clone(),
            basis: "monomial".into(),
            disclaimer: DISCLAIMER.into(),
            samples: config.samples,
            histograms: self.histograms,
            duplicate_forms: self.duplicates,
            counterexamples: self.counterexamples,
            failures: self.failures,
            wall_time_seconds: Some(started.elapsed().as_secs_f64()),
        }
    }
}

/// Real-rank certificates and real-root counts for every sample. A sample is
/// a counterexample when a determined rank disagrees with the top-rank rule
/// (`rank = n` exactly when all roots are real and distinct).
pub fn typical_rank_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let n = config.degree;
    let outcomes = run_samples(config, |f| {
        let roots = count_projective_real_roots(f)?.distinct_real_projective;
        Ok((roots, real_rank(f, &config.budget)?))
    })?;

    let mut tally = Tally::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let i = i as u64;
        match outcome {
            Outcome::Failed(fail) => {
                tally.bump("realRank", "error");
                tally.bump("realRoots", "error");
                tally.failures.push(fail);
            }
            Outcome::Done(f, (roots, cert)) => {
                tally.record_form(&f);
                tally.bump("realRank", rank_bucket(&cert));
                tally.bump("realRoots", roots.to_string());
                let all_real = roots == n;
                let consistent = match cert.real_exact {
                    Some(r) => (r == n) == all_real,
                    None => !all_real && cert.real_upper < n,
                };
                if !consistent {
                    tally.counterexample(
                        i,
                        &f,
                        format!("{roots} real roots but real rank {}", rank_bucket(&cert)),
                    );
                }
            }
        }
    }
    Ok(tally.finish(ExperimentKind::TypicalRank, config, started))
}

fn criteria_bucket(r: &TheoremReport) -> String {
    let bit = |b: bool| if b { '1' } else { '0' };
    format!("A{}B{}C{}", bit(r.criterion_a), bit(r.criterion_b), bit(r.criterion_c))
}

fn option_bucket(v: Option<i64>) -> String {
    v.map_or_else(|| "unavailable".into(), |w| w.to_string())
}

/// Runs the full criteria check on every sample; any report with `A != B`
/// or a failed implication is kept as a counterexample.
pub fn theorem_fuzz(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let outcomes = run_samples(config, verify_theorem1)?;

    let mut tally = Tally::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let i = i as u64;
        match outcome {
            Outcome::Failed(fail) => {
                for table in ["criteria", "windingPhi", "windingPsi"] {
                    tally.bump(table, "error");
                }
                tally.failures.push(fail);
            }
            Outcome::Done(f, report) => {
                tally.record_form(&f);
                tally.bump("criteria", criteria_bucket(&report));
                tally.bump("windingPhi", option_bucket(report.winding_phi));
                tally.bump("windingPsi", option_bucket(report.winding_psi));
                if !report.consistent {
                    tally.counterexample(i, &f, "criterion A and criterion B disagree".into());
                }
                for v in report.violations {
                    tally.counterexample(i, &f, v);
                }
            }
        }
    }
    Ok(tally.finish(ExperimentKind::TheoremFuzz, config, started))
}
