//! Configuration-driven experiments: each one runs a family of identities or
//! estimates over a list of node counts and reports CSV rows plus pass/fail
//! checks. [`acceptance_suite`] bundles the built-in configurations.

mod config;
pub mod oracle;
mod report;
mod runners;

use std::path::Path;
use std::time::Instant;

pub use config::{
    load_config, parse_config, CurveSpec, DensitySpec, ExperimentConfig, ExperimentKind, KernelChoice, LayerChoice,
    OperatorSpec, QuotientTarget,
};
pub use report::{Bound, Check, Report, Row};

use crate::error::Result;
use crate::schauder::ModulusSpec;

/// Runs one validated experiment.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    runners::run(config)
}

/// Runs `config` and writes its CSV and summary into `out`, or into the
/// directory named in the config when `out` is `None`.
pub fn run_to_dir(config: &ExperimentConfig, out: Option<&Path>) -> Result<Report> {
    let report = run(config)?;
    if let Some(dir) = out.or(config.output.as_deref()) {
        report.write(dir)?;
    }
    Ok(report)
}

/// A numbered acceptance criterion and the configurations that decide it.
#[derive(Debug, Clone)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub configs: Vec<ExperimentConfig>,
    /// Wall-clock budget for all configurations together, in seconds.
    pub time_limit: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub seconds: f64,
    pub reports: Vec<Report>,
    /// First failing check, error, or time overrun; empty on success.
    pub detail: String,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        let mut s = format!(
            "criterion {:>2} {}: {} ({:.2} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.seconds
        );
        if !self.detail.is_empty() {
            s.push_str(" -- ");
            s.push_str(&self.detail);
        }
        s
    }
}

fn kite() -> CurveSpec {
    CurveSpec::Kite {}
}

fn circle(radius: f64) -> CurveSpec {
    CurveSpec::Circle { radius }
}

fn ellipse() -> CurveSpec {
    CurveSpec::Ellipse { a: 2.0, b: 1.0 }
}

/// Built-in configurations for criteria 1 to 11. Criterion 12 is the run
/// time of the whole suite and is decided by [`selftest`].
pub fn acceptance_suite() -> Vec<Criterion> {
    use ExperimentKind::*;
    let lap = OperatorSpec::default;
    let ops = OperatorSpec::test_operators();
    let full = ops[4].clone();
    let each = |kind: ExperimentKind, curve: CurveSpec, n: &[usize]| -> Vec<ExperimentConfig> {
        ops.iter().map(|o| ExperimentConfig::new(kind, o.clone(), curve, n)).collect()
    };

    let mut jumps = each(JumpDouble, kite(), &[256]);
    jumps.extend(each(JumpSingle, kite(), &[256]));

    let mut wstar = each(WstarIdentity, ellipse(), &[128]);
    wstar.push(ExperimentConfig::new(WstarIdentity, lap(), circle(1.0), &[128]).with_density(DensitySpec::Constant));

    let regular_n = [64, 128, 256, 512];
    let regularity = vec![
        ExperimentConfig::new(Regularity, lap(), kite(), &regular_n)
            .with_density(DensitySpec::RoughSawtooth(3))
            .with_modulus(ModulusSpec::Power(0.9)),
        ExperimentConfig::new(Regularity, lap(), kite(), &regular_n)
            .with_density(DensitySpec::RoughSawtooth(5))
            .with_modulus(ModulusSpec::Power(0.9)),
        ExperimentConfig::new(Regularity, lap(), kite(), &regular_n)
            .with_density(DensitySpec::SinAbsSin)
            .with_modulus(ModulusSpec::LogPower(0.9))
            .with_target(QuotientTarget::Tangential),
    ];

    let budgets = [1 << 14, 1 << 16];
    let mut norms = Vec::new();
    for op in [lap(), full.clone()] {
        for k in [KernelChoice::Single, KernelChoice::Gradient, KernelChoice::Double] {
            norms.push(ExperimentConfig::new(KernelNorm, op.clone(), kite(), &[256]).with_kernel(k).with_budgets(&budgets));
        }
    }

    vec![
        Criterion {
            id: 1,
            title: "Gauss identity for the double layer of 1",
            configs: [circle(1.0), ellipse(), kite()]
                .into_iter()
                .map(|c| ExperimentConfig::new(GaussIdentity, lap(), c, &[128]))
                .collect(),
            time_limit: Some(1.0),
        },
        Criterion {
            id: 2,
            title: "closed-form single layer of 1 on circles",
            configs: [1.0, 2.0]
                .into_iter()
                .map(|r| ExperimentConfig::new(GaussIdentity, lap(), circle(r), &[64]).with_layer(LayerChoice::Single))
                .collect(),
            time_limit: None,
        },
        Criterion {
            id: 3,
            title: "jump relations of w and grad v, five operators",
            configs: jumps,
            time_limit: Some(30.0),
        },
        Criterion {
            id: 4,
            title: "gradient identity for the double layer at interior probes",
            configs: vec![
                ExperimentConfig::new(GradientIdentity, lap(), kite(), &[256]),
                ExperimentConfig::new(GradientIdentity, full.clone(), kite(), &[256]),
            ],
            time_limit: None,
        },
        Criterion {
            id: 5,
            title: "tangential derivative of Q, five operators",
            configs: each(Formula1, kite(), &[128, 256])
                .into_iter()
                .map(|c| c.with_indices(&[1, 2, 1]))
                .collect(),
            time_limit: None,
        },
        Criterion {
            id: 6,
            title: "tangential derivative of the double layer, five operators",
            configs: each(Wtg, kite(), &[128, 256]).into_iter().map(|c| c.with_indices(&[1, 2])).collect(),
            time_limit: None,
        },
        Criterion {
            id: 7,
            title: "w_* identity and w_*[1] on the unit circle",
            configs: wstar,
            time_limit: None,
        },
        Criterion {
            id: 8,
            title: "bounded Hoelder quotients of rough and C^1 data under refinement",
            configs: regularity,
            time_limit: None,
        },
        Criterion {
            id: 9,
            title: "sampled kernel-class norms stable under budget growth",
            configs: norms,
            time_limit: None,
        },
        Criterion {
            id: 10,
            title: "integration by parts and c_com on the unit circle",
            configs: vec![
                ExperimentConfig::new(Constants, lap(), circle(1.0), &[64, 128]),
                ExperimentConfig::new(Constants, lap(), ellipse(), &[128]),
                ExperimentConfig::new(Constants, lap(), kite(), &[128]),
            ],
            time_limit: None,
        },
        Criterion {
            id: 11,
            title: "Bessel functions and radial profile",
            configs: vec![ExperimentConfig::new(SpecfunCheck, lap(), kite(), &[])],
            time_limit: None,
        },
    ]
}

/// Total wall-clock budget of [`selftest`], in seconds.
pub const SELFTEST_LIMIT: f64 = 120.0;

fn decide(c: &Criterion, out: Option<&Path>) -> CriterionOutcome {
    let start = Instant::now();
    let mut reports = Vec::new();
    let mut detail = String::new();
    for (k, cfg) in c.configs.iter().enumerate() {
        let dir = out.map(|o| o.join(format!("criterion{:02}_{:02}_{}", c.id, k + 1, cfg.experiment)));
        match run_to_dir(cfg, dir.as_deref()) {
            Ok(r) => {
                if detail.is_empty() {
                    if let Some(f) = r.checks.iter().find(|ch| !ch.passed()) {
                        detail = format!("{} [{} on {:?}, {}]", f.describe(), cfg.experiment, cfg.curve, cfg.operator);
                    }
                }
                reports.push(r);
            }
            Err(e) => {
                if detail.is_empty() {
                    detail = format!("{} failed: {e}", cfg.experiment);
                }
            }
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    if let Some(limit) = c.time_limit {
        if seconds >= limit && detail.is_empty() {
            detail = format!("took {seconds:.2} s, limit {limit} s");
        }
    }
    CriterionOutcome {
        id: c.id,
        title: c.title,
        passed: detail.is_empty(),
        seconds,
        reports,
        detail,
    }
}

/// Runs the acceptance suite, writing each report under `out` when given.
/// The last outcome is criterion 12, the total run time.
pub fn selftest(out: Option<&Path>) -> Vec<CriterionOutcome> {
    let start = Instant::now();
    let mut outcomes: Vec<CriterionOutcome> = acceptance_suite().iter().map(|c| decide(c, out)).collect();
    let total = start.elapsed().as_secs_f64();
    let ok = total < SELFTEST_LIMIT;
    outcomes.push(CriterionOutcome {
        id: 12,
        title: "whole selftest within the time budget",
        passed: ok,
        seconds: total,
        reports: Vec::new(),
        detail: if ok {
            String::new()
        } else {
            format!("took {total:.1} s, limit {SELFTEST_LIMIT} s")
        },
    });
    outcomes
}
