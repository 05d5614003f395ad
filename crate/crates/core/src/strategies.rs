//! Search strategies: satisficing with adaptive aspiration and search space,
//! and steepest-ascent hill-climbing over a fixed option set.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::{Configuration, Landscape};
use crate::organization::{perceive, ManagerState};

/// Order in which a satisficing manager discovers alternatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SequencePolicy {
    /// Ascending Hamming distance, random within each distance.
    #[default]
    ClosestFirst,
    /// Uniformly random order over all alternatives.
    Random,
}

/// Condition under which the maximum search space grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SpaceUpdateRule {
    /// Grow after `s_max` options were searched without a satisfactory one.
    #[default]
    Text,
    /// Grow when the last permitted option was the satisfactory one.
    Equation,
}

/// `count` alternatives at Hamming distance `distance` from the status quo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionClass {
    pub count: usize,
    pub distance: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchStrategy {
    Satisficing,
    HillClimbing { options: Vec<OptionClass> },
}

impl SearchStrategy {
    /// Two one-bit flips per period.
    pub fn hc2() -> Self {
        Self::HillClimbing {
            options: vec![OptionClass {
                count: 2,
                distance: 1,
            }],
        }
    }

    /// Three one-bit and three two-bit changes per period.
    pub fn hc6() -> Self {
        Self::HillClimbing {
            options: vec![
                OptionClass {
                    count: 3,
                    distance: 1,
                },
                OptionClass {
                    count: 3,
                    distance: 2,
                },
            ],
        }
    }

    pub fn is_satisficing(&self) -> bool {
        matches!(self, Self::Satisficing)
    }

    /// Number of options a hill-climber evaluates each period.
    pub fn fixed_option_count(&self) -> Option<usize> {
        match self {
            Self::Satisficing => None,
            Self::HillClimbing { options } => Some(options.iter().map(|c| c.count).sum()),
        }
    }

    /// Checks that every option class fits a block of `block_size` bits.
    pub fn validate(&self, block_size: usize) -> Result<()> {
        if let Self::HillClimbing { options } = self {
            for class in options {
                let available = binomial(block_size, class.distance);
                if class.distance == 0 || class.count > available {
                    return Err(Error::InfeasibleSpec {
                        count: class.count,
                        distance: class.distance,
                        available: if class.distance == 0 { 0 } else { available },
                    });
                }
            }
        }
        Ok(())
    }

    /// Runs one period's search for `manager` against the frozen
    /// configuration of the previous period.
    pub fn search<R: Rng + ?Sized>(
        &self,
        manager: &ManagerState,
        landscape: &Landscape,
        frozen: &Configuration,
        policy: SequencePolicy,
        rng: &mut R,
    ) -> Result<SearchOutcome> {
        match self {
            Self::Satisficing => Ok(satisficing_search(manager, landscape, frozen, policy, rng)),
            Self::HillClimbing { options } => {
                hill_climb_search(manager, landscape, frozen, options, rng)
            }
        }
    }
}

/// Named strategies of the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    #[default]
    Satisficing,
    Hc2,
    Hc6,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [Self::Satisficing, Self::Hc2, Self::Hc6];

    pub fn strategy(self) -> SearchStrategy {
        match self {
            Self::Satisficing => SearchStrategy::Satisficing,
            Self::Hc2 => SearchStrategy::hc2(),
            Self::Hc6 => SearchStrategy::hc6(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Satisficing => "satisficing",
            Self::Hc2 => "hc2",
            Self::Hc6 => "hc6",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "satisficing" => Ok(Self::Satisficing),
            "hc2" => Ok(Self::Hc2),
            "hc6" => Ok(Self::Hc6),
            other => Err(format!(
                "unknown strategy `{other}` (satisficing, hc2, hc6)"
            )),
        }
    }
}

/// How a search ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchEnd {
    /// Satisficing: an option met the aspiration level.
    Satisfied,
    /// Satisficing: `s_max` options searched, none satisfactory.
    Exhausted,
    /// Hill-climbing: all options compared, no stopping rule involved.
    Compared,
}

/// One perceived option, in discovery order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub option: Configuration,
    pub distance: usize,
    pub perceived: f64,
    /// Perceived value minus the remembered status-quo performance.
    pub perceived_delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    /// Chosen partial configuration (the status quo if nothing was taken).
    pub chosen: Configuration,
    pub options_evaluated: usize,
    pub end: SearchEnd,
    pub probes: Vec<Probe>,
}

impl SearchOutcome {
    pub fn satisfied(&self) -> bool {
        self.end == SearchEnd::Satisfied
    }

    pub fn exhausted(&self) -> bool {
        self.end == SearchEnd::Exhausted
    }

    /// Perceived delta of the option taken, zero when the status quo was kept.
    pub fn chosen_perceived_delta(&self) -> f64 {
        self.probes
            .iter()
            .find(|p| p.option == self.chosen)
            .map_or(0.0, |p| p.perceived_delta)
    }
}

/// Largest useful search space for a block of `block_size` bits.
pub fn max_alternatives(block_size: usize) -> usize {
    (1usize << block_size) - 1
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Flip masks of a `width`-bit block grouped by popcount; index `h` holds
/// the masks at distance `h`.
fn flip_classes(width: usize) -> Vec<Vec<u64>> {
    let mut classes = vec![Vec::new(); width + 1];
    for flip in 1..(1u64 << width) {
        classes[flip.count_ones() as usize].push(flip);
    }
    classes
}

/// Every alternative to `status_quo`, by ascending Hamming distance and in
/// random order within each distance.
pub fn closest_first_sequence<R: Rng + ?Sized>(
    status_quo: &Configuration,
    rng: &mut R,
) -> Vec<Configuration> {
    discovery_sequence(status_quo, SequencePolicy::ClosestFirst, rng)
}

pub fn discovery_sequence<R: Rng + ?Sized>(
    status_quo: &Configuration,
    policy: SequencePolicy,
    rng: &mut R,
) -> Vec<Configuration> {
    let width = status_quo.len();
    let flips: Vec<u64> = match policy {
        SequencePolicy::ClosestFirst => flip_classes(width)
            .into_iter()
            .flat_map(|mut class| {
                class.shuffle(rng);
                class
            })
            .collect(),
        SequencePolicy::Random => {
            let mut all: Vec<u64> = (1..(1u64 << width)).collect();
            all.shuffle(rng);
            all
        }
    };
    flips
        .into_iter()
        .map(|flip| {
            Configuration::from_mask(status_quo.mask() ^ flip, width)
                .expect("flip stays within block width")
        })
        .collect()
}

/// Sequential search stopping at the first option whose perceived
/// improvement over the status quo meets the aspiration level.
pub fn satisficing_search<R: Rng + ?Sized>(
    manager: &ManagerState,
    landscape: &Landscape,
    frozen: &Configuration,
    policy: SequencePolicy,
    rng: &mut R,
) -> SearchOutcome {
    let status_quo = frozen.slice(manager.block.clone());
    let baseline = manager.status_quo_performance();
    let sequence = discovery_sequence(&status_quo, policy, rng);

    let mut probes = Vec::with_capacity(manager.max_search);
    for option in sequence.into_iter().take(manager.max_search) {
        let perceived = perceive(manager, landscape, &option, frozen, rng);
        let probe = Probe {
            option,
            distance: option.hamming(&status_quo),
            perceived,
            perceived_delta: perceived - baseline,
        };
        probes.push(probe);
        if probe.perceived_delta >= manager.aspiration {
            return SearchOutcome {
                chosen: option,
                options_evaluated: probes.len(),
                end: SearchEnd::Satisfied,
                probes,
            };
        }
    }
    SearchOutcome {
        chosen: status_quo,
        options_evaluated: probes.len(),
        end: SearchEnd::Exhausted,
        probes,
    }
}

/// Discovers the configured option set, then moves to the option with the
/// highest perceived value if it strictly beats the status quo.
pub fn hill_climb_search<R: Rng + ?Sized>(
    manager: &ManagerState,
    landscape: &Landscape,
    frozen: &Configuration,
    options: &[OptionClass],
    rng: &mut R,
) -> Result<SearchOutcome> {
    let width = manager.block.len();
    SearchStrategy::HillClimbing {
        options: options.to_vec(),
    }
    .validate(width)?;

    let status_quo = frozen.slice(manager.block.clone());
    let baseline = manager.status_quo_performance();
    let mut classes = flip_classes(width);

    let mut probes = Vec::new();
    for class in options {
        let (picked, _) = classes[class.distance].partial_shuffle(rng, class.count);
        for &flip in picked.iter() {
            let option = Configuration::from_mask(status_quo.mask() ^ flip, width)?;
            let perceived = perceive(manager, landscape, &option, frozen, rng);
            probes.push(Probe {
                option,
                distance: class.distance,
                perceived,
                perceived_delta: perceived - baseline,
            });
        }
    }

    let best = probes.iter().fold(None::<&Probe>, |best, p| match best {
        Some(b) if p.perceived <= b.perceived => Some(b),
        _ => Some(p),
    });
    let chosen = match best {
        Some(b) if b.perceived > baseline => b.option,
        _ => status_quo,
    };
    Ok(SearchOutcome {
        chosen,
        options_evaluated: probes.len(),
        end: SearchEnd::Compared,
        probes,
    })
}

/// Exponentially weighted moving average of performance changes.
pub fn update_aspiration(aspiration: f64, delta: f64, alpha: f64) -> f64 {
    alpha * delta + (1.0 - alpha) * aspiration
}

/// Adapts the maximum search space after a satisficing search and rounds
/// it half-up to an integer within `[1, 2^block_size - 1]`.
pub fn update_search_space(
    s_max: usize,
    outcome: &SearchOutcome,
    beta: f64,
    rule: SpaceUpdateRule,
    block_size: usize,
) -> usize {
    let fires = match rule {
        SpaceUpdateRule::Text => outcome.exhausted(),
        SpaceUpdateRule::Equation => outcome.satisfied() && outcome.options_evaluated == s_max,
    };
    if !fires {
        return s_max;
    }
    let average = beta * (outcome.options_evaluated as f64 + 1.0) + (1.0 - beta) * s_max as f64;
    let rounded = (average + 0.5).floor() as usize;
    rounded.clamp(1, max_alternatives(block_size))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{InteractionStructure, Pattern};
    use crate::seed::rng_from_seed;
    use std::collections::HashMap;

    fn exhausted(s: usize) -> SearchOutcome {
        SearchOutcome {
            chosen: Configuration::zeros(3).unwrap(),
            options_evaluated: s,
            end: SearchEnd::Exhausted,
            probes: Vec::new(),
        }
    }

    #[test]
    fn three_bit_sequence_groups_by_distance() {
        let sq = Configuration::from_bits(&[1, 0, 1]).unwrap();
        let seq = closest_first_sequence(&sq, &mut rng_from_seed(4));
        let d: Vec<usize> = seq.iter().map(|c| c.hamming(&sq)).collect();
        assert_eq!(d, vec![1, 1, 1, 2, 2, 2, 3]);
        let mut masks: Vec<u64> = seq.iter().map(|c| c.mask()).collect();
        masks.sort_unstable();
        masks.dedup();
        assert_eq!(masks.len(), 7);
        assert!(!masks.contains(&sq.mask()));
    }

    #[test]
    fn one_bit_sequence_is_the_flip() {
        let sq = Configuration::from_bits(&[0]).unwrap();
        let seq = closest_first_sequence(&sq, &mut rng_from_seed(0));
        assert_eq!(seq, vec![Configuration::from_bits(&[1]).unwrap()]);
    }

    #[test]
    fn nearest_neighbour_orderings_are_uniform() {
        // frequency oracle: 10^4 draws, each of 3! orders expected 1/6
        let sq = Configuration::zeros(3).unwrap();
        let mut rng = rng_from_seed(2024);
        let mut counts: HashMap<Vec<u64>, usize> = HashMap::new();
        let draws = 10_000;
        for _ in 0..draws {
            let seq = closest_first_sequence(&sq, &mut rng);
            let head: Vec<u64> = seq[..3].iter().map(|c| c.mask()).collect();
            *counts.entry(head).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        for (order, count) in counts {
            let freq = count as f64 / draws as f64;
            assert!((freq - 1.0 / 6.0).abs() <= 0.02, "{order:?}: {freq}");
        }
    }

    #[test]
    fn random_policy_covers_all_alternatives() {
        let sq = Configuration::from_bits(&[1, 1, 0, 0]).unwrap();
        let seq = discovery_sequence(&sq, SequencePolicy::Random, &mut rng_from_seed(9));
        assert_eq!(seq.len(), 15);
        assert!(seq.iter().all(|c| *c != sq));
    }

    #[test]
    fn aspiration_arithmetic() {
        assert_eq!(update_aspiration(0.0, 0.2, 0.5), 0.1);
        assert!((update_aspiration(0.1, -0.3, 0.5) + 0.1).abs() < 1e-15);
        for delta in [-0.4, 0.0, 0.33] {
            assert_eq!(update_aspiration(0.07, delta, 0.0), 0.07);
        }
    }

    #[test]
    fn search_space_arithmetic() {
        let text = SpaceUpdateRule::Text;
        assert_eq!(update_search_space(2, &exhausted(2), 0.5, text, 3), 3);
        assert_eq!(update_search_space(7, &exhausted(7), 0.5, text, 3), 7);
        for s in 1..=7 {
            assert_eq!(update_search_space(s, &exhausted(s), 0.0, text, 3), s);
        }
        // 3 → 0.5·4 + 0.5·3 = 3.5 → 4
        assert_eq!(update_search_space(3, &exhausted(3), 0.5, text, 3), 4);
        let satisfied = SearchOutcome {
            end: SearchEnd::Satisfied,
            ..exhausted(2)
        };
        assert_eq!(update_search_space(2, &satisfied, 0.5, text, 3), 2);
        assert_eq!(
            update_search_space(2, &satisfied, 0.5, SpaceUpdateRule::Equation, 3),
            3
        );
        assert_eq!(
            update_search_space(2, &exhausted(2), 0.5, SpaceUpdateRule::Equation, 3),
            2
        );
    }

    #[test]
    fn hill_climbing_spec_feasibility() {
        assert!(SearchStrategy::hc6().validate(3).is_ok());
        assert!(SearchStrategy::hc2().validate(3).is_ok());
        let too_many = SearchStrategy::HillClimbing {
            options: vec![OptionClass {
                count: 4,
                distance: 1,
            }],
        };
        assert_eq!(
            too_many.validate(3),
            Err(Error::InfeasibleSpec {
                count: 4,
                distance: 1,
                available: 3
            })
        );
        assert_eq!(SearchStrategy::hc6().fixed_option_count(), Some(6));
        assert_eq!(binomial(3, 2), 3);
        assert_eq!(binomial(12, 5), 792);
    }

    fn manager_on(
        landscape: &Landscape,
        r: usize,
        aspiration: f64,
        s: usize,
        sigma: f64,
    ) -> ManagerState {
        let block = landscape.structure().block(r);
        ManagerState::new(r, block, aspiration, s, 0.5, 0.5, sigma).unwrap()
    }

    fn decomposable(seed: u64) -> Landscape {
        let s =
            InteractionStructure::build(12, 4, 0, Pattern::Cyclic, &mut rng_from_seed(0)).unwrap();
        Landscape::generate(s, &mut rng_from_seed(seed))
    }

    #[test]
    fn unreachable_aspiration_exhausts() {
        let l = decomposable(1);
        let frozen = Configuration::zeros(12).unwrap();
        let mut m = manager_on(&l, 1, 1.0, 4, 0.05);
        m.last_own_performance = l.manager_performance(&frozen, m.block.clone()).unwrap();
        let out = satisficing_search(
            &m,
            &l,
            &frozen,
            SequencePolicy::ClosestFirst,
            &mut rng_from_seed(3),
        );
        assert!(out.exhausted());
        assert_eq!(out.options_evaluated, 4);
        assert_eq!(out.chosen, frozen.slice(3..6));
    }

    #[test]
    fn trivial_aspiration_takes_first_option() {
        let l = decomposable(1);
        let frozen = Configuration::zeros(12).unwrap();
        let mut m = manager_on(&l, 0, -1.0, 7, 0.05);
        m.last_own_performance = l.manager_performance(&frozen, m.block.clone()).unwrap();
        let out = satisficing_search(
            &m,
            &l,
            &frozen,
            SequencePolicy::ClosestFirst,
            &mut rng_from_seed(3),
        );
        assert!(out.satisfied());
        assert_eq!(out.options_evaluated, 1);
        assert_eq!(out.chosen.hamming(&frozen.slice(0..3)), 1);
    }

    #[test]
    fn hill_climber_keeps_a_local_peak() {
        let l = decomposable(6);
        // the global optimum is a peak for every block under zero noise
        let frozen = l.global_optimum().config;
        for r in 0..4 {
            let mut m = manager_on(&l, r, 0.0, 6, 0.0);
            m.last_own_performance = l.manager_performance(&frozen, m.block.clone()).unwrap();
            let out = SearchStrategy::hc6()
                .search(
                    &m,
                    &l,
                    &frozen,
                    SequencePolicy::ClosestFirst,
                    &mut rng_from_seed(r as u64),
                )
                .unwrap();
            assert_eq!(out.chosen, frozen.slice(m.block.clone()));
            assert_eq!(out.options_evaluated, 6);
            assert_eq!(out.end, SearchEnd::Compared);
        }
    }

    #[test]
    fn hill_climber_ties_go_to_the_earliest_option() {
        let s =
            InteractionStructure::build(3, 1, 0, Pattern::Cyclic, &mut rng_from_seed(0)).unwrap();
        // every non-zero configuration scores the same
        let mut tables = vec![vec![0.5; 8]; 3];
        tables[0][0] = 0.0;
        let l = Landscape::from_tables(s, tables).unwrap();
        let frozen = Configuration::zeros(3).unwrap();
        let mut m = ManagerState::new(0, 0..3, 0.0, 6, 0.0, 0.0, 0.0).unwrap();
        m.last_own_performance = l.evaluate(&frozen).unwrap();
        let out = SearchStrategy::hc6()
            .search(
                &m,
                &l,
                &frozen,
                SequencePolicy::ClosestFirst,
                &mut rng_from_seed(12),
            )
            .unwrap();
        assert_eq!(out.chosen, out.probes[0].option);
    }
}
