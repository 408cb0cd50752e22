//! Valid and basic utility games: submodular set functions over a small
//! ground set, welfare as the value of the union of the chosen subsets,
//! and the 2-robustness certificate for nondecreasing value functions.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::equilibria::social_optimum;
use crate::error::{Error, Result};
use crate::game::{
    Choice, DefaultStrategy, DefaultStrategyMap, Evaluator, FiniteGame, Orientation, Profile,
    DEFAULT_BUDGET,
};
use crate::rational::{Q, QStr};
use crate::smoothness::{
    check_smoothness_base, corresponding_scg, Flavor, SBar, SmoothnessCertificate,
};

pub const MAX_GROUND: usize = 16;

/// A set function as an explicit table indexed by subset bitmask.
#[derive(Clone, Debug, PartialEq)]
pub struct SetFunction {
    ground: usize,
    values: Vec<Q>,
}

impl SetFunction {
    pub fn new(ground: usize, values: Vec<Q>) -> Result<Self> {
        if ground > MAX_GROUND {
            return Err(Error::Parameter(format!("ground set larger than {MAX_GROUND}")));
        }
        if values.len() != 1 << ground {
            return Err(Error::Parameter("value table must cover every subset".into()));
        }
        if values.iter().any(|v| v.is_negative()) {
            return Err(Error::Parameter("set function must be nonnegative".into()));
        }
        Ok(SetFunction { ground, values })
    }

    pub fn cardinality(ground: usize) -> Result<Self> {
        let values = (0u32..1 << ground)
            .map(|mask| Q::from_integer(mask.count_ones().into()))
            .collect();
        SetFunction::new(ground, values)
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn value(&self, mask: u32) -> &Q {
        &self.values[mask as usize]
    }
}

/// Weighted coverage: each client has a value and a set of covering
/// ground elements; `V(S)` sums the values of clients touched by `S`.
/// Always nonnegative, nondecreasing and submodular.
pub fn coverage_function(ground: usize, clients: &[(Q, u32)]) -> Result<SetFunction> {
    if clients.iter().any(|(w, _)| w.is_negative()) {
        return Err(Error::Parameter("client values must be nonnegative".into()));
    }
    let values = (0u32..1 << ground)
        .map(|mask| {
            clients
                .iter()
                .filter(|(_, cover)| cover & mask != 0)
                .map(|(w, _)| w.clone())
                .sum()
        })
        .collect();
    SetFunction::new(ground, values)
}

/// Exhaustive submodularity check; a witness is `(A, B, x)` with
/// `A ⊆ B`, `x ∉ B` and `V(A∪x) − V(A) < V(B∪x) − V(B)`.
pub fn check_submodular(v: &SetFunction) -> Option<(u32, u32, u32)> {
    let full = (1u32 << v.ground) - 1;
    for b in 0..=full {
        // all subsets of b
        let mut a = b;
        loop {
            for x in 0..v.ground as u32 {
                let bit = 1 << x;
                if b & bit == 0
                    && v.value(a | bit) - v.value(a) < v.value(b | bit) - v.value(b)
                {
                    return Some((a, b, x));
                }
            }
            if a == 0 {
                break;
            }
            a = (a - 1) & b;
        }
    }
    None
}

/// A witness is `(A, B)` with `A ⊆ B` and `V(A) > V(B)`.
pub fn check_nondecreasing(v: &SetFunction) -> Option<(u32, u32)> {
    let full = (1u32 << v.ground) - 1;
    for b in 0..=full {
        for x in 0..v.ground as u32 {
            let bit = 1 << x;
            if b & bit == 0 && v.value(b) > v.value(b | bit) {
                return Some((b, b | bit));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payoffs {
    /// `Π_i(s) = Π(s) − Π(∅, s_{-i})`, the marginal bound with equality.
    Basic,
    /// Explicit payoffs, indexed by profile rank then player.
    Table(Vec<Vec<Q>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidUtilityGame {
    v: SetFunction,
    /// Per player, the strategy subsets as bitmasks.
    strategies: Vec<Vec<u32>>,
    payoffs: Payoffs,
}

impl ValidUtilityGame {
    pub fn new(v: SetFunction, strategies: Vec<Vec<u32>>, payoffs: Payoffs) -> Result<Self> {
        if strategies.is_empty() || strategies.iter().any(|s| s.is_empty()) {
            return Err(Error::Parameter("every player needs at least one strategy".into()));
        }
        let full = (1u32 << v.ground) - 1;
        if strategies.iter().flatten().any(|&m| m & !full != 0) {
            return Err(Error::Parameter("strategy subset leaves the ground set".into()));
        }
        if let Payoffs::Table(table) = &payoffs {
            let profiles: usize = strategies.iter().map(|s| s.len()).product();
            if table.len() != profiles || table.iter().any(|row| row.len() != strategies.len()) {
                return Err(Error::Parameter(
                    "payoff table must cover every profile and player".into(),
                ));
            }
        }
        Ok(ValidUtilityGame { v, strategies, payoffs })
    }

    pub fn value_function(&self) -> &SetFunction {
        &self.v
    }

    pub fn n_players(&self) -> usize {
        self.strategies.len()
    }

    pub fn strategies(&self, i: usize) -> &[u32] {
        &self.strategies[i]
    }

    fn union(&self, profile: &Profile) -> u32 {
        profile
            .0
            .iter()
            .enumerate()
            .map(|(i, choice)| match choice {
                Choice::Play(k) => self.strategies[i][*k],
                Choice::Default => 0,
            })
            .fold(0, |acc, m| acc | m)
    }

    pub fn welfare(&self, profile: &Profile) -> Q {
        self.v.value(self.union(profile)).clone()
    }

    fn rank(&self, profile: &Profile) -> usize {
        let mut r = 0usize;
        for (i, choice) in profile.0.iter().enumerate() {
            match choice {
                Choice::Play(k) => r = r * self.strategies[i].len() + k,
                Choice::Default => panic!("explicit payoffs are defined on pure profiles"),
            }
        }
        r
    }

    pub fn payoff(&self, i: usize, profile: &Profile) -> Q {
        match &self.payoffs {
            Payoffs::Basic => {
                let with = self.union(profile);
                let without = self.union(&profile.with(i, Choice::Default));
                self.v.value(with) - self.v.value(without)
            }
            Payoffs::Table(table) => {
                if profile.0[i] == Choice::Default {
                    return Q::zero();
                }
                table[self.rank(profile)][i].clone()
            }
        }
    }
}

struct UtilityEval {
    vug: ValidUtilityGame,
}

impl Evaluator for UtilityEval {
    fn n_players(&self) -> usize {
        self.vug.n_players()
    }

    fn player_cost(&self, i: usize, profile: &Profile) -> Q {
        self.vug.payoff(i, profile)
    }

    fn social_cost(&self, profile: &Profile) -> Q {
        self.vug.welfare(profile)
    }

    fn supports_default(&self, _i: usize) -> bool {
        true
    }
}

/// The utility game as a finite payoff-maximization game; the default
/// strategy plays the empty set.
pub fn utility_game(vug: &ValidUtilityGame) -> Result<(FiniteGame, DefaultStrategyMap)> {
    let counts: Vec<usize> = vug.strategies.iter().map(|s| s.len()).collect();
    let n = counts.len();
    let eval = Arc::new(UtilityEval { vug: vug.clone() });
    let game = FiniteGame::new(counts, Orientation::Maximize, eval)?.with_sum_bounded(true);
    Ok((game, DefaultStrategyMap::new(vec![DefaultStrategy::Native; n])))
}

/// The marginal-bound payoffs over a submodular nonnegative value
/// function; submodularity makes the result sum-bounded.
pub fn basic_utility_game(v: SetFunction, strategies: Vec<Vec<u32>>) -> Result<ValidUtilityGame> {
    if let Some((a, b, x)) = check_submodular(&v) {
        return Err(Error::Parameter(format!(
            "value function is not submodular at A={a:#b}, B={b:#b}, x={x}"
        )));
    }
    ValidUtilityGame::new(v, strategies, Payoffs::Basic)
}

#[derive(Clone, Debug)]
pub enum ValidityViolation {
    NotSubmodular { a: u32, b: u32, x: u32 },
    SumBound { profile: Profile },
    MarginalBound { player: usize, profile: Profile },
}

/// Verifies the defining inequalities over every profile: `V` submodular
/// and nonnegative, `Σ_i Π_i(s) <= Π(s)`, and
/// `Π_i(s) >= Π(s) − Π(∅, s_{-i})`.
pub fn check_valid_utility(
    game: &FiniteGame,
    defaults: &DefaultStrategyMap,
    value: Option<&SetFunction>,
    budget: u64,
) -> Result<Option<ValidityViolation>> {
    if let Some(v) = value {
        if let Some((a, b, x)) = check_submodular(v) {
            return Ok(Some(ValidityViolation::NotSubmodular { a, b, x }));
        }
    }
    game.check_budget(budget)?;
    for profile in game.profiles() {
        let total = game.social_cost(&profile)?;
        let payoffs = game.all_player_costs(&profile)?;
        if payoffs.iter().cloned().sum::<Q>() > total {
            return Ok(Some(ValidityViolation::SumBound { profile }));
        }
        for (i, payoff) in payoffs.iter().enumerate() {
            let rest = game.social_cost(&defaults.defaulted(game, &profile, i)?)?;
            if *payoff < &total - rest {
                return Ok(Some(ValidityViolation::MarginalBound { player: i, profile }));
            }
        }
    }
    Ok(None)
}

/// Builds and exhaustively verifies the `(1, −1)`-smoothness certificate
/// of the game's social-contribution counterpart with the optimum as the
/// deviation profile; requires a nondecreasing value function.
pub fn utility_poa2_certificate(vug: &ValidUtilityGame) -> Result<SmoothnessCertificate> {
    if let Some((a, b)) = check_nondecreasing(&vug.v) {
        return Err(Error::Unsupported(format!(
            "value function decreases from {a:#b} to {b:#b}"
        )));
    }
    let (game, defaults) = utility_game(vug)?;
    let scg = corresponding_scg(&game, &defaults)?;
    let (sstar, _) = social_optimum(&scg, DEFAULT_BUDGET)?;
    let cert = SmoothnessCertificate {
        lambda: Q::one(),
        mu: -Q::one(),
        sbar: SBar::Pure(sstar.clone()),
        sstar,
        flavor: Flavor::Base,
    };
    if let Some(witness) = check_smoothness_base(&scg, Some(&defaults), &cert, DEFAULT_BUDGET)? {
        return Err(Error::Evaluation(format!(
            "smoothness violated at profile {:?}",
            witness.to_wire()
        )));
    }
    Ok(cert)
}

/// A random weighted coverage game with marginal-bound payoffs.
pub fn random_coverage_game(
    rng: &mut impl Rng,
    max_ground: usize,
    max_players: usize,
) -> Result<ValidUtilityGame> {
    let ground = rng.gen_range(1..=max_ground.min(MAX_GROUND));
    let full = (1u32 << ground) - 1;
    let clients: Vec<(Q, u32)> = (0..rng.gen_range(1..=2 * ground))
        .map(|_| {
            let w = Q::new(rng.gen_range(0..8).into(), rng.gen_range(1..4).into());
            (w, rng.gen_range(1..=full))
        })
        .collect();
    let v = coverage_function(ground, &clients)?;
    let players = rng.gen_range(1..=max_players);
    let strategies: Vec<Vec<u32>> = (0..players)
        .map(|_| {
            (0..rng.gen_range(1..=3usize))
                .map(|_| rng.gen_range(0..=full))
                .collect()
        })
        .collect();
    basic_utility_game(v, strategies)
}

/// The two-player instance where the PoA bound of 2 is tight: a modular
/// value over two elements, player 1 may pick either element, player 2 is
/// stuck on the first, and the payoffs reward player 1 for doubling up.
pub fn tight_poa2_instance() -> Result<ValidUtilityGame> {
    let v = SetFunction::cardinality(2)?;
    // strategies: player 1 picks {0} or {1}, player 2 only {0};
    // profile ranks: ({0},{0}) -> 0, ({1},{0}) -> 1
    let table = vec![
        vec![Q::one(), Q::zero()],
        vec![Q::one(), Q::one()],
    ];
    ValidUtilityGame::new(v, vec![vec![0b01, 0b10], vec![0b01]], Payoffs::Table(table))
}

// --- JSON -------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct SetFunctionJson {
    pub ground: usize,
    pub values: BTreeMap<String, QStr>,
}

pub fn set_function_from_json(spec: &SetFunctionJson) -> Result<SetFunction> {
    let size = 1usize << spec.ground;
    let mut values = vec![None; size];
    for (key, value) in &spec.values {
        let mask: usize = key
            .parse()
            .map_err(|_| Error::Parse(format!("bad bitmask key '{key}'")))?;
        if mask >= size {
            return Err(Error::Parse(format!("bitmask {mask} exceeds the ground set")));
        }
        values[mask] = Some(value.0.clone());
    }
    let values: Vec<Q> = values
        .into_iter()
        .enumerate()
        .map(|(mask, v)| v.ok_or_else(|| Error::Parse(format!("missing value for subset {mask}"))))
        .collect::<Result<_>>()?;
    SetFunction::new(spec.ground, values)
}

pub fn set_function_to_json(v: &SetFunction) -> SetFunctionJson {
    SetFunctionJson {
        ground: v.ground,
        values: v
            .values
            .iter()
            .enumerate()
            .map(|(mask, value)| (mask.to_string(), QStr(value.clone())))
            .collect(),
    }
}
