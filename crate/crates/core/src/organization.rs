//! Managers and the period protocol.
//!
//! Within a period every manager searches against the same frozen
//! configuration of the previous period, assuming its fellow managers keep
//! their status quo. The chosen partial configurations are then composed,
//! actual performance is revealed, and managers update their state.

use std::ops::Range;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::landscape::{Configuration, Landscape};
use crate::seed::{derive, manager_rng, rng_from_seed};
use crate::strategies::{
    max_alternatives, update_aspiration, update_search_space, Probe, SearchEnd, SearchStrategy,
    SequencePolicy, SpaceUpdateRule,
};

/// Which performance change feeds the aspiration update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AspirationDelta {
    /// Actual change of the manager's performance after revelation.
    #[default]
    Realized,
    /// Perceived improvement of the option taken (zero if none was taken).
    Perceived,
}

/// How the evaluation error enters a perceived value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// `P + e`.
    Additive,
    /// `P (1 + e)`.
    #[default]
    Relative,
}

/// Whether a manager sees the same error each time it looks at a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoisePersistence {
    /// A new draw on every evaluation.
    Fresh,
    /// One draw per (manager, configuration), fixed for the whole run.
    #[default]
    Persistent,
}

/// A manager's private, distorted view of the landscape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct View {
    pub model: NoiseModel,
    pub persistence: NoisePersistence,
    /// Seeds the persistent errors; unused for fresh draws.
    pub key: u64,
}

impl View {
    /// Fresh additive errors, independent on every call.
    pub const FRESH_ADDITIVE: View = View {
        model: NoiseModel::Additive,
        persistence: NoisePersistence::Fresh,
        key: 0,
    };
}

/// Switches that select between alternative readings of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rules {
    pub space_update_rule: SpaceUpdateRule,
    pub aspiration_delta: AspirationDelta,
    pub sequence_policy: SequencePolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManagerState {
    pub id: usize,
    pub block: Range<usize>,
    pub aspiration: f64,
    pub max_search: usize,
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub view: View,
    /// Actual performance of the manager's block in the last period.
    pub last_own_performance: f64,
}

impl ManagerState {
    pub fn new(
        id: usize,
        block: Range<usize>,
        aspiration: f64,
        max_search: usize,
        alpha: f64,
        beta: f64,
        sigma: f64,
    ) -> Result<Self> {
        if block.is_empty() || block.len() >= 64 {
            return Err(invalid("block", format!("{block:?} is not a usable block")));
        }
        let upper = max_alternatives(block.len());
        if !(1..=upper).contains(&max_search) {
            return Err(invalid(
                "sMax0",
                format!("{max_search} outside [1, {upper}]"),
            ));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(invalid("alpha", format!("{alpha} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(invalid("beta", format!("{beta} outside [0, 1]")));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(invalid(
                "sigma",
                format!("{sigma} must be finite and non-negative"),
            ));
        }
        if !aspiration.is_finite() {
            return Err(invalid("a0", "must be finite"));
        }
        Ok(Self {
            id,
            block,
            aspiration,
            max_search,
            alpha,
            beta,
            sigma,
            view: View::FRESH_ADDITIVE,
            last_own_performance: 0.0,
        })
    }

    pub fn with_view(mut self, view: View) -> Self {
        self.view = view;
        self
    }

    /// The remembered, error-free performance of the status quo.
    pub fn status_quo_performance(&self) -> f64 {
        self.last_own_performance
    }
}

/// Noisy ex-ante value of `candidate` for `manager`, assuming every other
/// block stays as in `frozen`.
pub fn perceive<R: Rng + ?Sized>(
    manager: &ManagerState,
    landscape: &Landscape,
    candidate: &Configuration,
    frozen: &Configuration,
    rng: &mut R,
) -> f64 {
    let composed = frozen.with_slice(manager.block.clone(), candidate);
    let actual = landscape.block_performance_mask(composed.mask(), manager.block.clone());
    if manager.sigma == 0.0 {
        return actual;
    }
    let noise = Normal::new(0.0, manager.sigma).expect("sigma validated at construction");
    let error = match manager.view.persistence {
        NoisePersistence::Fresh => noise.sample(rng),
        NoisePersistence::Persistent => noise.sample(&mut rng_from_seed(derive(
            manager.view.key,
            &[composed.mask()],
        ))),
    };
    match manager.view.model {
        NoiseModel::Additive => actual + error,
        NoiseModel::Relative => actual * (1.0 + error),
    }
}

/// What one manager did in a period.
#[derive(Debug, Clone, PartialEq)]
pub struct ManagerRecord {
    pub chosen: Configuration,
    pub options_evaluated: usize,
    pub end: SearchEnd,
    pub realized_delta: f64,
    /// Aspiration after the update.
    pub aspiration: f64,
    /// Maximum search space after the update.
    pub max_search: usize,
    /// Search-time bounds, kept for auditing the stopping rule.
    pub aspiration_at_search: f64,
    pub max_search_at_search: usize,
    pub probes: Vec<Probe>,
}

impl ManagerRecord {
    pub fn satisfied(&self) -> bool {
        self.end == SearchEnd::Satisfied
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodOutcome {
    pub period: u64,
    pub config: Configuration,
    pub performance: f64,
    pub altered: bool,
    pub managers: Vec<ManagerRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrgState {
    pub period: u64,
    pub config: Configuration,
    pub managers: Vec<ManagerState>,
}

impl OrgState {
    /// Starts an organization at `initial`, giving every manager the exact
    /// performance of its block.
    pub fn new(
        landscape: &Landscape,
        initial: Configuration,
        mut managers: Vec<ManagerState>,
    ) -> Result<Self> {
        let structure = landscape.structure();
        if initial.len() != structure.n() {
            return Err(Error::LengthMismatch {
                expected: structure.n(),
                found: initial.len(),
            });
        }
        if managers.len() != structure.m() {
            return Err(invalid(
                "m",
                format!("{} managers for {} blocks", managers.len(), structure.m()),
            ));
        }
        for (r, manager) in managers.iter_mut().enumerate() {
            if manager.block != structure.block(r) {
                return Err(Error::MisalignedBlock {
                    start: manager.block.start,
                    end: manager.block.end,
                });
            }
            manager.last_own_performance =
                landscape.block_performance_mask(initial.mask(), manager.block.clone());
        }
        Ok(Self {
            period: 0,
            config: initial,
            managers,
        })
    }

    /// Advances one period with managers searching in index order.
    pub fn step(
        &mut self,
        landscape: &Landscape,
        strategies: &[SearchStrategy],
        rules: &Rules,
        run_seed: u64,
    ) -> Result<PeriodOutcome> {
        let order: Vec<usize> = (0..self.managers.len()).collect();
        self.step_in_order(landscape, strategies, rules, run_seed, &order)
    }

    /// Advances one period, running the searches in `order`. Every manager
    /// draws from its own stream keyed by run seed, manager and period, and
    /// sees only the previous configuration, so the order has no effect.
    pub fn step_in_order(
        &mut self,
        landscape: &Landscape,
        strategies: &[SearchStrategy],
        rules: &Rules,
        run_seed: u64,
        order: &[usize],
    ) -> Result<PeriodOutcome> {
        let m = self.managers.len();
        if strategies.len() != m {
            return Err(invalid(
                "strategy",
                format!("{} strategies for {m} managers", strategies.len()),
            ));
        }
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..m).collect::<Vec<_>>() {
            return Err(invalid(
                "order",
                format!("{order:?} is not a permutation of 0..{m}"),
            ));
        }

        let period = self.period + 1;
        let frozen = self.config;

        // (1) simultaneous searches on the frozen configuration
        let mut outcomes = vec![None; m];
        for &r in order {
            let mut rng = manager_rng(run_seed, r, period);
            let outcome = strategies[r].search(
                &self.managers[r],
                landscape,
                &frozen,
                rules.sequence_policy,
                &mut rng,
            )?;
            outcomes[r] = Some(outcome);
        }
        let outcomes: Vec<_> = outcomes
            .into_iter()
            .map(|o| o.expect("every manager searched"))
            .collect();

        // (2) compose
        let config = self
            .managers
            .iter()
            .zip(&outcomes)
            .fold(frozen, |c, (mgr, out)| {
                c.with_slice(mgr.block.clone(), &out.chosen)
            });

        // (3) reveal, (4)-(6) update
        let mut records = Vec::with_capacity(m);
        for ((manager, outcome), strategy) in self.managers.iter_mut().zip(outcomes).zip(strategies)
        {
            let actual = landscape.block_performance_mask(config.mask(), manager.block.clone());
            let realized_delta = actual - manager.last_own_performance;
            let aspiration_at_search = manager.aspiration;
            let max_search_at_search = manager.max_search;

            if strategy.is_satisficing() {
                let delta = match rules.aspiration_delta {
                    AspirationDelta::Realized => realized_delta,
                    AspirationDelta::Perceived => outcome.chosen_perceived_delta(),
                };
                manager.aspiration = update_aspiration(manager.aspiration, delta, manager.alpha);
                manager.max_search = update_search_space(
                    manager.max_search,
                    &outcome,
                    manager.beta,
                    rules.space_update_rule,
                    manager.block.len(),
                );
            }
            manager.last_own_performance = actual;

            records.push(ManagerRecord {
                chosen: outcome.chosen,
                options_evaluated: outcome.options_evaluated,
                end: outcome.end,
                realized_delta,
                aspiration: manager.aspiration,
                max_search: manager.max_search,
                aspiration_at_search,
                max_search_at_search,
                probes: outcome.probes,
            });
        }

        self.period = period;
        self.config = config;
        Ok(PeriodOutcome {
            period,
            config,
            performance: landscape.evaluate_mask(config.mask()),
            altered: config != frozen,
            managers: records,
        })
    }
}
