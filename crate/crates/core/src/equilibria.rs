//! Exhaustive-enumeration equilibrium analysis: optima, pure Nash
//! equilibria, coarse (correlated-deviation) equilibria, best-response
//! dynamics and the pure price of anarchy.

use num::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{
    Choice, DefaultStrategyMap, FiniteGame, FiniteSupportDistribution, Orientation, Profile,
    DEFAULT_BUDGET,
};
use crate::rational::{format_q, Q};

/// A profitable unilateral deviation disproving equilibrium.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationWitness {
    pub player: usize,
    pub deviation: Choice,
    pub current_cost: Q,
    pub deviated_cost: Q,
}

/// Every candidate deviation for player `i` at `profile`: all strategy
/// indices plus the default when one is registered, excluding the current
/// choice.
fn deviations(
    game: &FiniteGame,
    defaults: Option<&DefaultStrategyMap>,
    i: usize,
    current: Choice,
) -> Vec<Choice> {
    let mut out: Vec<Choice> =
        (0..game.strategy_count(i)).map(Choice::Play).filter(|c| *c != current).collect();
    if defaults.is_some() && current != Choice::Default {
        out.push(Choice::Default);
    }
    out
}

fn resolved(
    game: &FiniteGame,
    defaults: Option<&DefaultStrategyMap>,
    profile: &Profile,
) -> Result<Profile> {
    match defaults {
        Some(map) => map.resolve(game, profile),
        None => {
            if profile.has_default() {
                return Err(Error::Evaluation(
                    "profile uses default strategies but none are registered".into(),
                ));
            }
            Ok(profile.clone())
        }
    }
}

/// Checks whether `profile` is a pure Nash equilibrium; returns the first
/// profitable deviation (players in order, then strategy index order,
/// default last) when it is not.
pub fn is_pure_nash(
    game: &FiniteGame,
    defaults: Option<&DefaultStrategyMap>,
    profile: &Profile,
) -> Result<Option<DeviationWitness>> {
    let base = resolved(game, defaults, profile)?;
    game.validate_profile(&base)?;
    let orientation = game.orientation();
    for i in 0..game.n_players() {
        let current = game.player_cost(i, &base)?;
        for dev in deviations(game, defaults, i, profile.0[i]) {
            let alt = resolved(game, defaults, &profile.with(i, dev))?;
            let cost = game.player_cost(i, &alt)?;
            if orientation.strictly_better(&cost, &current) {
                return Ok(Some(DeviationWitness {
                    player: i,
                    deviation: dev,
                    current_cost: current,
                    deviated_cost: cost,
                }));
            }
        }
    }
    Ok(None)
}

/// All pure Nash equilibria in lexicographic profile order.
pub fn enumerate_pure_nash(
    game: &FiniteGame,
    defaults: Option<&DefaultStrategyMap>,
    budget: u64,
) -> Result<Vec<Profile>> {
    // every profile is checked against every unilateral deviation
    let per_profile: u128 = game
        .strategy_counts()
        .iter()
        .map(|&k| k as u128 + if defaults.is_some() { 1 } else { 0 })
        .sum();
    let needed = game.profile_count().saturating_mul(per_profile.max(1));
    if needed > budget as u128 {
        return Err(Error::Budget { needed, budget });
    }
    let mut out = Vec::new();
    for profile in game.profiles() {
        if is_pure_nash(game, defaults, &profile)?.is_none() {
            out.push(profile);
        }
    }
    Ok(out)
}

/// The best social cost and the lexicographically-first profile attaining
/// it.
pub fn social_optimum(game: &FiniteGame, budget: u64) -> Result<(Profile, Q)> {
    game.check_budget(budget)?;
    let orientation = game.orientation();
    let mut best: Option<(Profile, Q)> = None;
    for profile in game.profiles() {
        let c = game.social_cost(&profile)?;
        match &best {
            Some((_, b)) if !orientation.strictly_better(&c, b) => {}
            _ => best = Some((profile, c)),
        }
    }
    best.ok_or_else(|| Error::Evaluation("game has no profiles".into()))
}

/// All profiles attaining the optimal social cost, lexicographic order.
pub fn social_optima(game: &FiniteGame, budget: u64) -> Result<(Vec<Profile>, Q)> {
    let (_, best) = social_optimum(game, budget)?;
    let mut out = Vec::new();
    for profile in game.profiles() {
        if game.social_cost(&profile)? == best {
            out.push(profile);
        }
    }
    Ok((out, best))
}

pub fn expected_social_cost(
    game: &FiniteGame,
    defaults: Option<&DefaultStrategyMap>,
    dist: &FiniteSupportDistribution,
) -> Result<Q> {
    let mut total = Q::zero();
    for (profile, p) in dist.atoms() {
        let base = resolved(game, defaults, profile)?;
        total += game.social_cost(&base)? * p;
    }
    Ok(total)
}

fn expected_player_cost(
    game: &FiniteGame,
    defaults: Option<&DefaultStrategyMap>,
    dist: &FiniteSupportDistribution,
    i: usize,
) -> Result<Q> {
    let mut total = Q::zero();
    for (profile, p) in dist.atoms() {
        let base = resolved(game, defaults, profile)?;
        total += game.player_cost(i, &base)? * p;
    }
    Ok(total)
}

/// Checks the coarse (correlated) equilibrium conditions: no player can
/// improve in expectation by committing to a fixed unilateral deviation.
/// Returns the first violating (player, deviation) pair otherwise.
pub fn is_coarse_equilibrium(
    game: &FiniteGame,
    defaults: Option<&DefaultStrategyMap>,
    dist: &FiniteSupportDistribution,
) -> Result<Option<(usize, Choice, Q, Q)>> {
    let orientation = game.orientation();
    for i in 0..game.n_players() {
        let current = expected_player_cost(game, defaults, dist, i)?;
        let mut candidates: Vec<Choice> = (0..game.strategy_count(i)).map(Choice::Play).collect();
        if defaults.is_some() {
            candidates.push(Choice::Default);
        }
        for dev in candidates {
            let mut cost = Q::zero();
            for (profile, p) in dist.atoms() {
                let alt = resolved(game, defaults, &profile.with(i, dev))?;
                cost += game.player_cost(i, &alt)? * p;
            }
            if orientation.strictly_better(&cost, &current) {
                return Ok(Some((i, dev, current, cost)));
            }
        }
    }
    Ok(None)
}

/// One step of best-response dynamics: at each round the lowest-indexed
/// player with a profitable deviation moves to their best deviation
/// (lexicographic tie-break). Returns the visited profiles including the
/// start; the last entry is a pure Nash equilibrium iff `converged`.
#[derive(Clone, Debug)]
pub struct DynamicsRun {
    pub trajectory: Vec<Profile>,
    pub converged: bool,
}

pub fn best_response_dynamics(
    game: &FiniteGame,
    defaults: Option<&DefaultStrategyMap>,
    start: &Profile,
    max_steps: usize,
) -> Result<DynamicsRun> {
    let orientation = game.orientation();
    let mut current = start.clone();
    let mut trajectory = vec![current.clone()];
    for _ in 0..max_steps {
        let mut move_found = false;
        'players: for i in 0..game.n_players() {
            let base = resolved(game, defaults, &current)?;
            let here = game.player_cost(i, &base)?;
            let mut best: Option<(Choice, Q)> = None;
            let mut candidates: Vec<Choice> =
                (0..game.strategy_count(i)).map(Choice::Play).collect();
            if defaults.is_some() {
                candidates.push(Choice::Default);
            }
            for dev in candidates {
                if dev == current.0[i] {
                    continue;
                }
                let alt = resolved(game, defaults, &current.with(i, dev))?;
                let cost = game.player_cost(i, &alt)?;
                let better_than_best = match &best {
                    Some((_, b)) => orientation.strictly_better(&cost, b),
                    None => true,
                };
                if orientation.strictly_better(&cost, &here) && better_than_best {
                    best = Some((dev, cost));
                }
            }
            if let Some((dev, _)) = best {
                current = current.with(i, dev);
                trajectory.push(current.clone());
                move_found = true;
                break 'players;
            }
        }
        if !move_found {
            return Ok(DynamicsRun { trajectory, converged: true });
        }
    }
    // allow the start itself to already be an equilibrium with max_steps = 0
    let converged = is_pure_nash(game, defaults, &current)?.is_none();
    Ok(DynamicsRun { trajectory, converged })
}

/// Outcome of an exact pure price-of-anarchy computation.
#[derive(Clone, Debug, PartialEq)]
pub enum PoaOutcome {
    /// worst equilibrium cost / optimum cost (or its reciprocal under
    /// maximization), with the witnessing profiles.
    Ratio { value: Q, worst_nash: Profile, optimum: Profile },
    /// Optimum is zero but some equilibrium has nonzero cost.
    Infinite { worst_nash: Profile, optimum: Profile },
    NoPureNash,
    /// Both the optimum and all equilibria have zero cost.
    DegenerateOptimum,
}

pub fn pure_poa(
    game: &FiniteGame,
    defaults: Option<&DefaultStrategyMap>,
    budget: u64,
) -> Result<PoaOutcome> {
    let nash = enumerate_pure_nash(game, defaults, budget)?;
    if nash.is_empty() {
        return Ok(PoaOutcome::NoPureNash);
    }
    let orientation = game.orientation();
    let (opt_profile, opt) = social_optimum(game, budget)?;
    // worst equilibrium = highest cost (min games) / lowest payoff (max games)
    let mut worst: Option<(Profile, Q)> = None;
    for p in nash {
        let c = game.social_cost(&p)?;
        let replace = match &worst {
            // "strictly worse" is "strictly better" with arguments flipped
            Some((_, w)) => orientation.strictly_better(w, &c),
            None => true,
        };
        if replace {
            worst = Some((p, c));
        }
    }
    let (worst_nash, worst_cost) = worst.unwrap();
    let (num, den) = match orientation {
        Orientation::Minimize => (worst_cost, opt),
        Orientation::Maximize => (opt, worst_cost),
    };
    if den.is_zero() {
        if num.is_zero() {
            return Ok(PoaOutcome::DegenerateOptimum);
        }
        return Ok(PoaOutcome::Infinite { worst_nash, optimum: opt_profile });
    }
    Ok(PoaOutcome::Ratio { value: num / den, worst_nash, optimum: opt_profile })
}

/// Summary of a full equilibrium analysis, serializable for CLI output.
#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumReport {
    pub n_players: usize,
    pub n_profiles: u128,
    pub optimum_profile: Vec<i64>,
    pub optimum_cost: String,
    pub pure_nash: Vec<Vec<i64>>,
    pub pure_nash_costs: Vec<String>,
    pub poa: PoaReport,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind")]
pub enum PoaReport {
    #[serde(rename = "ratio")]
    Ratio { value: String, worst_nash: Vec<i64> },
    #[serde(rename = "infinite")]
    Infinite { worst_nash: Vec<i64> },
    #[serde(rename = "no_pure_nash")]
    NoPureNash,
    #[serde(rename = "degenerate_optimum")]
    DegenerateOptimum,
}

pub fn equilibrium_report(
    game: &FiniteGame,
    defaults: Option<&DefaultStrategyMap>,
    budget: u64,
) -> Result<EquilibriumReport> {
    let (opt_profile, opt_cost) = social_optimum(game, budget)?;
    let nash = enumerate_pure_nash(game, defaults, budget)?;
    let nash_costs = nash
        .iter()
        .map(|p| Ok(format_q(&game.social_cost(p)?)))
        .collect::<Result<Vec<_>>>()?;
    let poa = match pure_poa(game, defaults, budget)? {
        PoaOutcome::Ratio { value, worst_nash, .. } => {
            PoaReport::Ratio { value: format_q(&value), worst_nash: worst_nash.to_wire() }
        }
        PoaOutcome::Infinite { worst_nash, .. } => {
            PoaReport::Infinite { worst_nash: worst_nash.to_wire() }
        }
        PoaOutcome::NoPureNash => PoaReport::NoPureNash,
        PoaOutcome::DegenerateOptimum => PoaReport::DegenerateOptimum,
    };
    Ok(EquilibriumReport {
        n_players: game.n_players(),
        n_profiles: game.profile_count(),
        optimum_profile: opt_profile.to_wire(),
        optimum_cost: format_q(&opt_cost),
        pure_nash: nash.iter().map(|p| p.to_wire()).collect(),
        pure_nash_costs: nash_costs,
        poa,
    })
}

/// Convenience wrapper with the default enumeration budget.
pub fn pure_poa_default(game: &FiniteGame) -> Result<PoaOutcome> {
    pure_poa(game, None, DEFAULT_BUDGET)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::table_game;
    use crate::rational::{q, qi};

    /// classic prisoner's dilemma as a cost game;
    /// profiles ordered (0,0) (0,1) (1,0) (1,1), strategy 1 = defect.
    fn dilemma() -> FiniteGame {
        table_game(
            vec![2, 2],
            Orientation::Minimize,
            vec![
                vec![qi(2), qi(5), qi(1), qi(4)],
                vec![qi(2), qi(1), qi(5), qi(4)],
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn dilemma_unique_nash_and_poa() {
        let game = dilemma();
        let nash = enumerate_pure_nash(&game, None, DEFAULT_BUDGET).unwrap();
        assert_eq!(nash, vec![Profile::pure(&[1, 1])]);
        let (opt, cost) = social_optimum(&game, DEFAULT_BUDGET).unwrap();
        assert_eq!(opt, Profile::pure(&[0, 0]));
        assert_eq!(cost, qi(4));
        match pure_poa(&game, None, DEFAULT_BUDGET).unwrap() {
            PoaOutcome::Ratio { value, .. } => assert_eq!(value, qi(2)),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn matching_pennies_has_no_pure_nash() {
        // zero-sum-ish cost version: player 0 wants to match, player 1 not
        let game = table_game(
            vec![2, 2],
            Orientation::Minimize,
            vec![
                vec![qi(0), qi(1), qi(1), qi(0)],
                vec![qi(1), qi(0), qi(0), qi(1)],
            ],
            None,
        )
        .unwrap();
        assert!(enumerate_pure_nash(&game, None, DEFAULT_BUDGET).unwrap().is_empty());
        assert_eq!(pure_poa(&game, None, DEFAULT_BUDGET).unwrap(), PoaOutcome::NoPureNash);
    }

    #[test]
    fn maximization_flips_comparisons() {
        // payoff game: (1,1) dominant with payoff 1 each, optimum (0,0) = 6
        let game = table_game(
            vec![2, 2],
            Orientation::Maximize,
            vec![
                vec![qi(3), qi(0), qi(4), qi(1)],
                vec![qi(3), qi(4), qi(0), qi(1)],
            ],
            None,
        )
        .unwrap();
        let nash = enumerate_pure_nash(&game, None, DEFAULT_BUDGET).unwrap();
        assert_eq!(nash, vec![Profile::pure(&[1, 1])]);
        match pure_poa(&game, None, DEFAULT_BUDGET).unwrap() {
            PoaOutcome::Ratio { value, .. } => assert_eq!(value, qi(3)),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn coarse_equilibrium_contains_pure_nash() {
        let game = dilemma();
        let pure = FiniteSupportDistribution::point_mass(Profile::pure(&[1, 1]));
        assert!(is_coarse_equilibrium(&game, None, &pure).unwrap().is_none());
        let not_eq = FiniteSupportDistribution::point_mass(Profile::pure(&[0, 0]));
        assert!(is_coarse_equilibrium(&game, None, &not_eq).unwrap().is_some());
    }

    #[test]
    fn mixed_coarse_equilibrium_expected_cost() {
        let game = dilemma();
        let dist = FiniteSupportDistribution::new(vec![
            (Profile::pure(&[1, 1]), q(1, 2)),
            (Profile::pure(&[0, 0]), q(1, 2)),
        ])
        .unwrap();
        assert_eq!(expected_social_cost(&game, None, &dist).unwrap(), qi(6));
    }

    #[test]
    fn dynamics_converge_to_nash() {
        let game = dilemma();
        let run =
            best_response_dynamics(&game, None, &Profile::pure(&[0, 0]), 100).unwrap();
        assert!(run.converged);
        assert_eq!(run.trajectory.last().unwrap(), &Profile::pure(&[1, 1]));
    }

    #[test]
    fn dynamics_cycle_detection_via_step_cap() {
        // matching pennies cycles forever
        let game = table_game(
            vec![2, 2],
            Orientation::Minimize,
            vec![
                vec![qi(0), qi(1), qi(1), qi(0)],
                vec![qi(1), qi(0), qi(0), qi(1)],
            ],
            None,
        )
        .unwrap();
        let run = best_response_dynamics(&game, None, &Profile::pure(&[0, 0]), 20).unwrap();
        assert!(!run.converged);
        assert_eq!(run.trajectory.len(), 21);
    }

    #[test]
    fn degenerate_and_infinite_poa() {
        // all-zero game: PoA degenerate
        let zero = table_game(
            vec![2],
            Orientation::Minimize,
            vec![vec![qi(0), qi(0)]],
            None,
        )
        .unwrap();
        assert_eq!(pure_poa(&zero, None, DEFAULT_BUDGET).unwrap(), PoaOutcome::DegenerateOptimum);
        // optimum zero, unique nash positive: infinite
        let inf = table_game(
            vec![2],
            Orientation::Minimize,
            vec![vec![qi(2), qi(3)]],
            Some(vec![qi(1), qi(0)]),
        )
        .unwrap();
        match pure_poa(&inf, None, DEFAULT_BUDGET).unwrap() {
            PoaOutcome::Infinite { .. } => {}
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn budget_enforced() {
        let game = dilemma();
        assert!(matches!(
            enumerate_pure_nash(&game, None, 3),
            Err(crate::error::Error::Budget { .. })
        ));
    }
}
