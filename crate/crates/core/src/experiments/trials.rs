//! Monte-Carlo campaigns over random 2-lifts and shift lifts.

use std::time::{Duration, Instant};

use serde::Serialize;

use super::config::{ExperimentConfig, LiftMode};
use crate::error::Result;
use crate::graph::{adjacency_matrix, RegularGraph};
use crate::lift::{
    build_lift, random_shift_lift, random_signing, shift_to_assignment, signed_adjacency, signing_to_assignment,
};
use crate::par::{map_indexed, Execution};
use crate::rng::derive_seed;
use crate::shift::root_radii;
use crate::spectral::{
    eig_symmetric, lambda_nontrivial, spectral_radius, split_old_new, Spectrum, DEFAULT_TOL, MATCH_WINDOW,
};

/// Largest base for which 2-lift trials recompute `‖A_s‖` directly.
pub const CROSS_CHECK_LIMIT: usize = 200;
/// Allowed gap between the split-based and direct `λ_new`.
pub const CROSS_CHECK_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    #[serde(serialize_with = "crate::io::u64_as_string")]
    pub seed: u64,
    /// Nontrivial λ of the base.
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_new: Option<f64>,
    /// Largest new eigenvalue with its sign.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_new: Option<f64>,
    /// `‖A_s(ω^j)‖` for `j = 0..k`; shift mode only.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub root_radii: Vec<f64>,
    /// `|λ_new - direct value|` when a direct computation was made.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Kept out of reports so reruns are byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl TrialRecord {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }
}

/// Row layout for the per-trial CSV.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub lambda_new: Option<f64>,
    pub top_new: Option<f64>,
    pub status: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundFraction {
    pub c: f64,
    /// Fraction of completed trials with `λ_new <= λ + c√d`.
    pub additive: f64,
    /// Fraction of completed trials with `λ_new <= c·λ`.
    pub multiplicative: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Quantile {
    pub q: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub n: usize,
    pub d: usize,
    pub lambda: f64,
    pub ramanujan_bound: f64,
    /// `λ <= d / log2 d`.
    pub moderately_expanding: bool,
    pub completed: usize,
    pub failed: usize,
    pub cross_check_failures: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub quantiles: Vec<Quantile>,
    pub bounds: Vec<BoundFraction>,
    pub trials: Vec<TrialRecord>,
}

impl ExperimentReport {
    pub fn rows(&self) -> Vec<TrialRow> {
        self.trials
            .iter()
            .map(|t| TrialRow {
                trial: t.trial,
                seed: t.seed,
                lambda_new: t.lambda_new,
                top_new: t.top_new,
                status: if t.succeeded() { "ok" } else { "failed" },
            })
            .collect()
    }

    /// Completed trials whose value passes `pred`, as a fraction.
    pub fn fraction(&self, pred: impl Fn(&TrialRecord) -> bool) -> f64 {
        if self.completed == 0 {
            return f64::NAN;
        }
        let hits = self.trials.iter().filter(|t| t.succeeded() && pred(t)).count();
        hits as f64 / self.completed as f64
    }

    pub fn total_wall_time(&self) -> Duration {
        self.trials.iter().map(|t| t.wall_time).sum()
    }
}

/// Nontrivial λ of a base graph; `-d` counts as trivial for bipartite graphs.
pub fn base_lambda(g: &RegularGraph) -> Result<(Spectrum, f64)> {
    let s = eig_symmetric(&adjacency_matrix(g), DEFAULT_TOL)?;
    let lambda = lambda_nontrivial(&s, g.d(), g.is_bipartite())?;
    Ok((s, lambda))
}

/// Linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

struct Outcome {
    lambda_new: f64,
    top_new: f64,
    radii: Vec<f64>,
    cross_check: Option<f64>,
}

fn run_trial(g: &RegularGraph, base: &Spectrum, mode: LiftMode, k: usize, seed: u64) -> Result<Outcome> {
    match mode {
        LiftMode::TwoLift => {
            let signing = random_signing(g, seed);
            let lift = build_lift(g, &signing_to_assignment(&signing))?;
            let spec = eig_symmetric(&adjacency_matrix(&lift.graph), DEFAULT_TOL)?;
            let split = split_old_new(base, &spec, 2, MATCH_WINDOW)?;
            let cross_check = if g.n() <= CROSS_CHECK_LIMIT {
                let direct = spectral_radius(&signed_adjacency(g, &signing)?)?;
                Some((direct - split.lambda_new).abs())
            } else {
                None
            };
            Ok(Outcome {
                lambda_new: split.lambda_new,
                top_new: split.top_new(),
                radii: Vec::new(),
                cross_check,
            })
        }
        LiftMode::ShiftLift => {
            let sa = random_shift_lift(g, k, seed)?;
            let lift = build_lift(g, &shift_to_assignment(&sa))?;
            let spec = eig_symmetric(&adjacency_matrix(&lift.graph), DEFAULT_TOL)?;
            let split = split_old_new(base, &spec, k, MATCH_WINDOW)?;
            let radii = root_radii(g, &sa)?;
            let from_roots = radii[1..].iter().fold(0.0, |m: f64, &r| m.max(r));
            Ok(Outcome {
                lambda_new: split.lambda_new,
                top_new: split.top_new(),
                cross_check: Some((from_roots - split.lambda_new).abs()),
                radii,
            })
        }
    }
}

/// Runs every trial of `cfg` and aggregates. Trial `i` uses the seed
/// `derive_seed(base_seed, i)` and does not depend on any other trial, so
/// the report is identical under either execution path.
pub fn run_lift_trials(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentReport> {
    cfg.validate()?;
    let g = cfg.graph.build()?;
    let (base, lambda) = base_lambda(&g)?;
    let trials = map_indexed(exec, cfg.trials, |i| {
        let seed = derive_seed(cfg.base_seed, i as u64);
        let start = Instant::now();
        let outcome = run_trial(&g, &base, cfg.mode, cfg.k, seed);
        let mut rec = TrialRecord {
            trial: i,
            seed,
            lambda,
            lambda_new: None,
            top_new: None,
            root_radii: Vec::new(),
            cross_check: None,
            error: None,
            wall_time: Duration::ZERO,
        };
        match outcome {
            Ok(o) => {
                rec.lambda_new = Some(o.lambda_new);
                rec.top_new = Some(o.top_new);
                rec.root_radii = o.radii;
                rec.cross_check = o.cross_check;
            }
            Err(e) => rec.error = Some(e.to_string()),
        }
        rec.wall_time = start.elapsed();
        rec
    });
    Ok(summarize(cfg.clone(), &g, lambda, trials))
}

fn summarize(config: ExperimentConfig, g: &RegularGraph, lambda: f64, trials: Vec<TrialRecord>) -> ExperimentReport {
    let d = g.d() as f64;
    let mut values: Vec<f64> = trials.iter().filter_map(|t| t.lambda_new).collect();
    values.sort_by(f64::total_cmp);
    let completed = values.len();
    let frac = |pred: &dyn Fn(f64) -> bool| {
        if completed == 0 {
            f64::NAN
        } else {
            values.iter().filter(|&&v| pred(v)).count() as f64 / completed as f64
        }
    };
    let bounds = config
        .constants
        .iter()
        .map(|&c| BoundFraction {
            c,
            additive: frac(&|v| v <= lambda + c * d.sqrt()),
            multiplicative: frac(&|v| v <= c * lambda),
        })
        .collect();
    let quantiles = [0.05, 0.25, 0.5, 0.75, 0.95]
        .iter()
        .map(|&q| Quantile {
            q,
            value: quantile(&values, q),
        })
        .collect();
    let cross_check_failures = trials
        .iter()
        .filter(|t| t.cross_check.is_some_and(|c| c > CROSS_CHECK_TOL))
        .count();
    ExperimentReport {
        n: g.n(),
        d: g.d(),
        lambda,
        ramanujan_bound: 2.0 * (d - 1.0).max(0.0).sqrt(),
        moderately_expanding: d > 1.0 && lambda <= d / d.log2(),
        completed,
        failed: trials.len() - completed,
        cross_check_failures,
        min: values.first().copied().unwrap_or(f64::NAN),
        median: quantile(&values, 0.5),
        max: values.last().copied().unwrap_or(f64::NAN),
        quantiles,
        bounds,
        trials,
        config,
    }
}
