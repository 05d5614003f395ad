//! Replication protocol, run metrics and scenario aggregation.
//!
//! A scenario builds `landscapes` landscapes from the master seed and runs
//! `runsPerLandscape` organizations on each. Landscape and run seeds depend
//! only on their indices, so different strategies at the same `kEx` meet
//! the same landscapes and the same initial configurations, and results do
//! not depend on the number of workers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{invalid, Result};
use crate::landscape::{Configuration, InteractionStructure, Landscape};
use crate::organization::{ManagerState, OrgState, PeriodOutcome, View};
use crate::seed;
use crate::strategies::StrategyKind;

/// Two-sided standard normal quantile for 0.999 confidence.
pub const Z_999: f64 = 3.2905;

/// Value tolerance for counting a run as having found the global maximum.
pub const GLOBAL_MAX_TOLERANCE: f64 = 1e-9;

/// Period at which the early performance gain is measured.
pub const EARLY_PERIOD: usize = 10;

/// Builds landscape `index` of a scenario. Returns it with its seed.
pub fn build_landscape(scenario: &ScenarioConfig, index: usize) -> Result<(Landscape, u64)> {
    let landscape_seed = seed::landscape_seed(scenario.master_seed, index as u64);
    let mut rng = seed::rng_from_seed(landscape_seed);
    let structure = InteractionStructure::build(
        scenario.n,
        scenario.m,
        scenario.k_ex,
        scenario.pattern,
        &mut rng,
    )?;
    Ok((Landscape::generate(structure, &mut rng), landscape_seed))
}

/// Seed of run `run` on landscape `landscape_index`.
pub fn run_seed(scenario: &ScenarioConfig, landscape_index: usize, run: usize) -> u64 {
    let landscape_seed = seed::landscape_seed(scenario.master_seed, landscape_index as u64);
    seed::run_seed(landscape_seed, run as u64)
}

/// Outcome of one run, all performances normalized by the global optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub early_gain: f64,
    pub final_performance: f64,
    pub found_global_max: bool,
    pub alteration_ratio: f64,
    /// `V_t / V*` for `t = 0..=T`.
    pub performance_trace: Vec<f64>,
    /// Aspiration per period and manager, period-major, `t = 0..=T`.
    pub aspiration_trace: Vec<f64>,
    /// Maximum search space per period and manager, period-major.
    pub search_space_trace: Vec<usize>,
    pub managers: usize,
}

impl RunMetrics {
    pub fn aspiration(&self, t: usize, r: usize) -> f64 {
        self.aspiration_trace[t * self.managers + r]
    }

    pub fn search_space(&self, t: usize, r: usize) -> usize {
        self.search_space_trace[t * self.managers + r]
    }
}

/// Initial organization of a run: random configuration, fresh managers.
pub fn initial_state(
    scenario: &ScenarioConfig,
    landscape: &Landscape,
    run_seed: u64,
) -> Result<OrgState> {
    let initial = Configuration::random(scenario.n, &mut seed::init_rng(run_seed))?;
    let strategy = scenario.strategy.strategy();
    let (aspiration, max_search) = match strategy.fixed_option_count() {
        Some(count) => (0.0, count),
        None => (scenario.a0, scenario.s_max0),
    };
    let managers = landscape
        .structure()
        .blocks()
        .enumerate()
        .map(|(r, block)| {
            ManagerState::new(
                r,
                block,
                aspiration,
                max_search,
                scenario.alpha,
                scenario.beta,
                scenario.sigma,
            )
            .map(|mgr| {
                mgr.with_view(View {
                    model: scenario.noise_model,
                    persistence: scenario.noise_persistence,
                    key: seed::view_key(run_seed, r),
                })
            })
        })
        .collect::<Result<Vec<_>>>()?;
    OrgState::new(landscape, initial, managers)
}

/// Runs one organization for `scenario.periods` periods, handing every
/// period's outcome to `observe`.
pub fn run_with<F>(
    scenario: &ScenarioConfig,
    landscape: &Landscape,
    run_seed: u64,
    mut observe: F,
) -> Result<RunMetrics>
where
    F: FnMut(&OrgState, &PeriodOutcome),
{
    if landscape.n() != scenario.n || landscape.structure().m() != scenario.m {
        return Err(invalid(
            "landscape",
            "does not match the scenario's n and m",
        ));
    }
    let optimum = landscape.global_optimum().value;
    let strategies = vec![scenario.strategy.strategy(); scenario.m];
    let rules = scenario.rules();
    let mut org = initial_state(scenario, landscape, run_seed)?;

    let horizon = scenario.periods as usize;
    let m = scenario.m;
    let mut performance_trace = Vec::with_capacity(horizon + 1);
    let mut aspiration_trace = Vec::with_capacity((horizon + 1) * m);
    let mut search_space_trace = Vec::with_capacity((horizon + 1) * m);

    performance_trace.push(landscape.evaluate(&org.config)? / optimum);
    for mgr in &org.managers {
        aspiration_trace.push(mgr.aspiration);
        search_space_trace.push(mgr.max_search);
    }

    let mut altered = 0usize;
    let mut last_value = landscape.evaluate(&org.config)?;
    for _ in 0..horizon {
        let outcome = org.step(landscape, &strategies, &rules, run_seed)?;
        if outcome.altered {
            altered += 1;
        }
        last_value = outcome.performance;
        performance_trace.push(outcome.performance / optimum);
        for rec in &outcome.managers {
            aspiration_trace.push(rec.aspiration);
            search_space_trace.push(rec.max_search);
        }
        observe(&org, &outcome);
    }

    let early = performance_trace[EARLY_PERIOD.min(horizon)];
    Ok(RunMetrics {
        early_gain: early - performance_trace[0],
        final_performance: performance_trace[horizon],
        found_global_max: (last_value - optimum).abs() <= GLOBAL_MAX_TOLERANCE,
        alteration_ratio: if horizon == 0 {
            0.0
        } else {
            altered as f64 / horizon as f64
        },
        performance_trace,
        aspiration_trace,
        search_space_trace,
        managers: m,
    })
}

pub fn run_single(
    scenario: &ScenarioConfig,
    landscape: &Landscape,
    run_seed: u64,
) -> Result<RunMetrics> {
    run_with(scenario, landscape, run_seed, |_, _| {})
}

/// Runs one organization and keeps every period's outcome.
pub fn run_traced(
    scenario: &ScenarioConfig,
    landscape: &Landscape,
    run_seed: u64,
) -> Result<(RunMetrics, Vec<PeriodOutcome>)> {
    let mut periods = Vec::with_capacity(scenario.periods as usize);
    let metrics = run_with(scenario, landscape, run_seed, |_, p| {
        periods.push(p.clone())
    })?;
    Ok((metrics, periods))
}

/// Mean time series over all runs and managers, `t = 0..=T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Series {
    pub performance: Vec<f64>,
    pub aspiration: Vec<f64>,
    pub search_space: Vec<f64>,
}

/// Aggregated statistics of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioSummary {
    pub strategy: StrategyKind,
    pub k_ex: usize,
    pub runs: usize,
    pub early_gain: f64,
    pub final_performance: f64,
    /// Half-width of the 0.999 confidence interval; absent for one run.
    pub final_performance_ci: Option<f64>,
    pub global_max_frequency: f64,
    pub alteration_ratio: f64,
    pub series: Series,
}

impl ScenarioSummary {
    pub fn label(&self) -> String {
        format!("{}_kex{}", self.strategy, self.k_ex)
    }
}

/// Folds run metrics, in the given order, into a summary.
pub fn summarize(scenario: &ScenarioConfig, runs: &[RunMetrics]) -> Result<ScenarioSummary> {
    let count = runs.len();
    if count == 0 {
        return Err(invalid("runs", "cannot summarize zero runs"));
    }
    let n = count as f64;
    let mean = |f: &dyn Fn(&RunMetrics) -> f64| runs.iter().map(f).sum::<f64>() / n;

    let final_performance = mean(&|r| r.final_performance);
    let final_performance_ci = (count > 1).then(|| {
        let var = runs
            .iter()
            .map(|r| (r.final_performance - final_performance).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        Z_999 * var.sqrt() / n.sqrt()
    });

    let len = runs[0].performance_trace.len();
    let m = runs[0].managers;
    if runs
        .iter()
        .any(|r| r.performance_trace.len() != len || r.managers != m)
    {
        return Err(invalid(
            "runs",
            "runs have different horizons or manager counts",
        ));
    }
    let mut performance = vec![0.0; len];
    let mut aspiration = vec![0.0; len];
    let mut search_space = vec![0.0; len];
    for run in runs {
        for t in 0..len {
            performance[t] += run.performance_trace[t];
            for r in 0..m {
                aspiration[t] += run.aspiration(t, r);
                search_space[t] += run.search_space(t, r) as f64;
            }
        }
    }
    let per_manager = n * m as f64;
    performance.iter_mut().for_each(|v| *v /= n);
    aspiration.iter_mut().for_each(|v| *v /= per_manager);
    search_space.iter_mut().for_each(|v| *v /= per_manager);

    Ok(ScenarioSummary {
        strategy: scenario.strategy,
        k_ex: scenario.k_ex,
        runs: count,
        early_gain: mean(&|r| r.early_gain),
        final_performance,
        final_performance_ci,
        global_max_frequency: mean(&|r| if r.found_global_max { 1.0 } else { 0.0 }),
        alteration_ratio: mean(&|r| r.alteration_ratio),
        series: Series {
            performance,
            aspiration,
            search_space,
        },
    })
}

fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid("workers", e.to_string()))?;
    Ok(pool.install(job))
}

/// Builds all landscapes of a scenario.
pub fn build_landscapes(scenario: &ScenarioConfig, workers: usize) -> Result<Vec<Landscape>> {
    scenario.validate()?;
    with_workers(workers, || {
        (0..scenario.landscapes)
            .into_par_iter()
            .map(|i| build_landscape(scenario, i).map(|(l, _)| l))
            .collect::<Result<Vec<_>>>()
    })?
}

/// Runs every run of `scenario` on the given landscapes. `workers == 0`
/// uses one thread per core.
pub fn run_scenario_on(
    scenario: &ScenarioConfig,
    landscapes: &[Landscape],
    workers: usize,
) -> Result<ScenarioSummary> {
    scenario.validate()?;
    if landscapes.len() != scenario.landscapes {
        return Err(invalid(
            "landscapes",
            format!(
                "{} landscapes supplied, scenario needs {}",
                landscapes.len(),
                scenario.landscapes
            ),
        ));
    }
    let per = scenario.runs_per_landscape;
    let metrics = with_workers(workers, || {
        (0..scenario.run_count())
            .into_par_iter()
            .map(|idx| {
                let (li, run) = (idx / per, idx % per);
                run_single(scenario, &landscapes[li], run_seed(scenario, li, run))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    summarize(scenario, &metrics)
}

pub fn run_scenario(scenario: &ScenarioConfig, workers: usize) -> Result<ScenarioSummary> {
    let landscapes = build_landscapes(scenario, workers)?;
    run_scenario_on(scenario, &landscapes, workers)
}

/// Summaries of every (strategy, kEx) cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub cells: Vec<ScenarioSummary>,
}

impl Sweep {
    pub fn cell(&self, strategy: StrategyKind, k_ex: usize) -> Option<&ScenarioSummary> {
        self.cells
            .iter()
            .find(|c| c.strategy == strategy && c.k_ex == k_ex)
    }

    /// Max minus min mean final performance of `strategy` across `kEx`.
    pub fn spread(&self, strategy: StrategyKind) -> Option<f64> {
        let values: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.strategy == strategy)
            .map(|c| c.final_performance)
            .collect();
        let max = values.iter().cloned().reduce(f64::max)?;
        let min = values.iter().cloned().reduce(f64::min)?;
        Some(max - min)
    }
}

/// Runs every strategy at every `kEx`, sharing landscapes across
/// strategies at the same `kEx`. Cells are ordered by `kEx`, then strategy.
pub fn sensitivity_sweep(
    base: &ScenarioConfig,
    k_ex_values: &[usize],
    strategies: &[StrategyKind],
    workers: usize,
) -> Result<Sweep> {
    let mut cells = Vec::with_capacity(k_ex_values.len() * strategies.len());
    for &k_ex in k_ex_values {
        let at_k = ScenarioConfig {
            k_ex,
            ..base.clone()
        };
        let landscapes = build_landscapes(&at_k, workers)?;
        for &strategy in strategies {
            let scenario = ScenarioConfig {
                strategy,
                ..at_k.clone()
            };
            cells.push(run_scenario_on(&scenario, &landscapes, workers)?);
        }
    }
    Ok(Sweep { cells })
}
