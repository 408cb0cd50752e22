//! Social contribution games, SC-boundedness, smoothness certificates and
//! the robust price-of-anarchy optimizer.
//!
//! A social contribution game (SCG) ties each player's cost to their
//! marginal impact on the social cost: `C̄_i(s) = C(s) - C(∅_i, s_{-i})`,
//! where `∅_i` is player i's default (non-participation) strategy. The
//! reduction machinery in this module certifies smoothness parameters on
//! the corresponding SCG and transfers them to altruistic and friendship
//! extensions of the base game.

use std::sync::Arc;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::equilibria::social_optima;
use crate::error::{Error, Result};
use crate::game::{
    AltruismVector, Choice, DefaultStrategyMap, Evaluator, FiniteGame, FriendshipMatrix,
    Orientation, Profile,
};
use crate::lp::{optimize_smoothness_max, optimize_smoothness_min, SmoothnessLp};
use crate::rational::{format_q, parse_q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flavor {
    #[serde(rename = "base")]
    Base,
    #[serde(rename = "altruistic")]
    Altruistic,
    #[serde(rename = "friendship-weighted")]
    FriendshipWeighted,
}

/// The deviation profile of a certificate: pure, or an independent
/// per-player mixture over own strategies.
#[derive(Clone, Debug, PartialEq)]
pub enum SBar {
    Pure(Profile),
    Mixed(Vec<Vec<(Choice, Q)>>),
}

impl SBar {
    pub fn n_players(&self) -> usize {
        match self {
            SBar::Pure(p) => p.len(),
            SBar::Mixed(m) => m.len(),
        }
    }

    /// Player i's marginal as (choice, probability) atoms.
    pub fn marginal(&self, i: usize) -> Vec<(Choice, Q)> {
        match self {
            SBar::Pure(p) => vec![(p.0[i], Q::one())],
            SBar::Mixed(m) => m[i].clone(),
        }
    }

    pub fn validate(&self, game: &FiniteGame) -> Result<()> {
        if self.n_players() != game.n_players() {
            return Err(Error::Parameter("deviation profile length mismatch".into()));
        }
        if let SBar::Mixed(m) = self {
            for (i, atoms) in m.iter().enumerate() {
                if atoms.is_empty() {
                    return Err(Error::Parameter(format!("empty mixture for player {i}")));
                }
                let total: Q = atoms.iter().map(|(_, p)| p.clone()).sum();
                if !total.is_one() || atoms.iter().any(|(_, p)| !p.is_positive()) {
                    return Err(Error::Parameter(format!(
                        "mixture for player {i} is not a probability distribution"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothnessCertificate {
    pub lambda: Q,
    pub mu: Q,
    pub sbar: SBar,
    pub sstar: Profile,
    pub flavor: Flavor,
}

impl SmoothnessCertificate {
    pub fn validate(&self, game: &FiniteGame) -> Result<()> {
        if self.mu >= Q::one() {
            return Err(Error::Parameter("certificate needs mu < 1".into()));
        }
        if self.lambda.is_negative() {
            return Err(Error::Parameter("certificate needs lambda >= 0".into()));
        }
        self.sbar.validate(game)?;
        if self.sstar.len() != game.n_players() {
            return Err(Error::Parameter("optimum profile length mismatch".into()));
        }
        Ok(())
    }

    /// The price-of-anarchy bound this certificate implies.
    pub fn bound(&self, orientation: Orientation) -> Q {
        match orientation {
            Orientation::Minimize => &self.lambda / (Q::one() - &self.mu),
            Orientation::Maximize => (Q::one() - &self.mu) / &self.lambda,
        }
    }
}

// --- JSON form -------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SBarJson {
    Pure(Vec<i64>),
    Mixed(Vec<Vec<MixAtom>>),
}

#[derive(Serialize, Deserialize)]
struct MixAtom {
    strategy: i64,
    prob: String,
}

#[derive(Serialize, Deserialize)]
pub struct CertificateJson {
    lambda: String,
    mu: String,
    sbar: SBarJson,
    sstar: Vec<i64>,
    flavor: Flavor,
}

impl SmoothnessCertificate {
    pub fn to_json(&self) -> CertificateJson {
        let sbar = match &self.sbar {
            SBar::Pure(p) => SBarJson::Pure(p.to_wire()),
            SBar::Mixed(m) => SBarJson::Mixed(
                m.iter()
                    .map(|atoms| {
                        atoms
                            .iter()
                            .map(|(c, p)| MixAtom {
                                strategy: match c {
                                    Choice::Play(k) => *k as i64,
                                    Choice::Default => -1,
                                },
                                prob: format_q(p),
                            })
                            .collect()
                    })
                    .collect(),
            ),
        };
        CertificateJson {
            lambda: format_q(&self.lambda),
            mu: format_q(&self.mu),
            sbar,
            sstar: self.sstar.to_wire(),
            flavor: self.flavor,
        }
    }

    pub fn from_json(spec: &CertificateJson) -> Result<Self> {
        let sbar = match &spec.sbar {
            SBarJson::Pure(entries) => SBar::Pure(Profile::from_wire(entries)?),
            SBarJson::Mixed(rows) => SBar::Mixed(
                rows.iter()
                    .map(|atoms| {
                        atoms
                            .iter()
                            .map(|a| {
                                let choice = if a.strategy == -1 {
                                    Choice::Default
                                } else {
                                    Choice::Play(a.strategy as usize)
                                };
                                Ok((choice, parse_q(&a.prob)?))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(SmoothnessCertificate {
            lambda: parse_q(&spec.lambda)?,
            mu: parse_q(&spec.mu)?,
            sbar,
            sstar: Profile::from_wire(&spec.sstar)?,
            flavor: spec.flavor,
        })
    }
}

// --- SCG construction ------------------------------------------------------

fn resolve(
    game: &FiniteGame,
    defaults: &DefaultStrategyMap,
    profile: &Profile,
) -> Result<Profile> {
    defaults.resolve(game, profile)
}

/// Player i's social contribution: `C(s) - C(∅_i, s_{-i})`.
pub fn scg_cost(
    game: &FiniteGame,
    defaults: &DefaultStrategyMap,
    i: usize,
    profile: &Profile,
) -> Result<Q> {
    let here = resolve(game, defaults, profile)?;
    let gone = defaults.defaulted(game, profile, i)?;
    Ok(game.social_cost(&here)? - game.social_cost(&gone)?)
}

struct ScgEval {
    base: FiniteGame,
    defaults: DefaultStrategyMap,
}

impl Evaluator for ScgEval {
    fn n_players(&self) -> usize {
        self.base.n_players()
    }

    fn player_cost(&self, i: usize, profile: &Profile) -> Q {
        scg_cost(&self.base, &self.defaults, i, profile)
            .expect("scg evaluation on validated profile")
    }

    fn social_cost(&self, profile: &Profile) -> Q {
        let here = resolve(&self.base, &self.defaults, profile)
            .expect("scg evaluation on validated profile");
        self.base.evaluator().social_cost(&here)
    }

    fn all_player_costs(&self, profile: &Profile) -> Vec<Q> {
        let here = resolve(&self.base, &self.defaults, profile)
            .expect("scg evaluation on validated profile");
        let social = self.base.evaluator().social_cost(&here);
        (0..self.n_players())
            .map(|i| {
                let gone = self
                    .defaults
                    .defaulted(&self.base, profile, i)
                    .expect("scg evaluation on validated profile");
                &social - self.base.evaluator().social_cost(&gone)
            })
            .collect()
    }

    fn supports_default(&self, _i: usize) -> bool {
        // the default map always resolves sentinels for the base game
        true
    }
}

/// The corresponding social contribution game: same strategy sets, same
/// social cost, player costs replaced by social contributions.
pub fn corresponding_scg(game: &FiniteGame, defaults: &DefaultStrategyMap) -> Result<FiniteGame> {
    if defaults.len() != game.n_players() {
        return Err(Error::Parameter("defaults length mismatch".into()));
    }
    // sanity: every default must be evaluable
    for i in 0..game.n_players() {
        if let crate::game::DefaultStrategy::Native = defaults.entry(i) {
            if !game.evaluator().supports_default(i) {
                return Err(Error::Evaluation(format!(
                    "player {i} has no registered default strategy"
                )));
            }
        }
    }
    let eval = Arc::new(ScgEval { base: game.clone(), defaults: defaults.clone() });
    let scg = FiniteGame::new(game.strategy_counts().to_vec(), game.orientation(), eval)?
        .with_sum_bounded(game.is_sum_bounded());
    Ok(scg)
}

// --- Boundedness checks ----------------------------------------------------

/// SC-boundedness: `C_i(s) <= C̄_i(s)` for every player and profile
/// (`Π_i(s) >= Π̄_i(s)` under maximization). Returns the first violating
/// `(i, s)`.
pub fn check_sc_bounded(
    game: &FiniteGame,
    defaults: &DefaultStrategyMap,
    budget: u64,
) -> Result<Option<(usize, Profile)>> {
    let needed = game.profile_count().saturating_mul(game.n_players() as u128 + 1);
    if needed > budget as u128 {
        return Err(Error::Budget { needed, budget });
    }
    for profile in game.profiles() {
        let costs = game.all_player_costs(&profile)?;
        for i in 0..game.n_players() {
            let contribution = scg_cost(game, defaults, i, &profile)?;
            let ok = match game.orientation() {
                Orientation::Minimize => costs[i] <= contribution,
                Orientation::Maximize => costs[i] >= contribution,
            };
            if !ok {
                return Ok(Some((i, profile)));
            }
        }
    }
    Ok(None)
}

/// Exact-equality version: the game already is an SCG.
pub fn is_scg(
    game: &FiniteGame,
    defaults: &DefaultStrategyMap,
    budget: u64,
) -> Result<Option<(usize, Profile)>> {
    let needed = game.profile_count().saturating_mul(game.n_players() as u128 + 1);
    if needed > budget as u128 {
        return Err(Error::Budget { needed, budget });
    }
    for profile in game.profiles() {
        let costs = game.all_player_costs(&profile)?;
        for i in 0..game.n_players() {
            if costs[i] != scg_cost(game, defaults, i, &profile)? {
                return Ok(Some((i, profile)));
            }
        }
    }
    Ok(None)
}

/// A failed strong-SC-boundedness condition with its witness.
#[derive(Clone, Debug, PartialEq)]
pub struct StrongViolation {
    /// 1, 2 or 3 — the failing condition.
    pub condition: u8,
    pub player: usize,
    /// The other player for condition 2, unused otherwise.
    pub other: Option<usize>,
    pub profile: Profile,
}

/// Strong SC-boundedness with weights `w` (cost games):
///   1. `C_i(∅_i, s_{-i}) = 0`,
///   2. `C_j(∅_i, s_{-i}) <= C_j(s)` for all `j != i`,
///   3. `w_i Σ_j (C_j(s) - C_j(∅_i, s_{-i})) <= C(s) - C(∅_i, s_{-i})`.
/// For payoff games the inequalities mirror (others can only gain from a
/// player dropping out; the weighted total payoff shift dominates the
/// welfare shift).
pub fn check_strongly_sc_bounded(
    game: &FiniteGame,
    defaults: &DefaultStrategyMap,
    weights: &[Q],
    budget: u64,
) -> Result<Option<StrongViolation>> {
    if weights.len() != game.n_players() {
        return Err(Error::Parameter("weight vector length mismatch".into()));
    }
    if weights.iter().any(|w| !w.is_positive()) {
        return Err(Error::Parameter("weights must be positive".into()));
    }
    let needed = game.profile_count().saturating_mul(game.n_players() as u128 + 1);
    if needed > budget as u128 {
        return Err(Error::Budget { needed, budget });
    }
    let min = game.orientation() == Orientation::Minimize;
    for profile in game.profiles() {
        let costs = game.all_player_costs(&profile)?;
        let social = game.social_cost(&profile)?;
        for i in 0..game.n_players() {
            let gone = defaults.defaulted(game, &profile, i)?;
            let gone_costs = game.all_player_costs(&gone)?;
            let gone_social = game.social_cost(&gone)?;
            if !gone_costs[i].is_zero() {
                return Ok(Some(StrongViolation {
                    condition: 1,
                    player: i,
                    other: None,
                    profile,
                }));
            }
            for j in 0..game.n_players() {
                if j == i {
                    continue;
                }
                let ok = if min { gone_costs[j] <= costs[j] } else { gone_costs[j] >= costs[j] };
                if !ok {
                    return Ok(Some(StrongViolation {
                        condition: 2,
                        player: i,
                        other: Some(j),
                        profile,
                    }));
                }
            }
            let shift: Q = costs
                .iter()
                .zip(&gone_costs)
                .map(|(c, g)| c - g)
                .sum();
            let weighted = &weights[i] * shift;
            let contribution = &social - &gone_social;
            let ok = if min { weighted <= contribution } else { weighted >= contribution };
            if !ok {
                return Ok(Some(StrongViolation {
                    condition: 3,
                    player: i,
                    other: None,
                    profile,
                }));
            }
        }
    }
    Ok(None)
}

// --- Deviation sums and smoothness checks ----------------------------------

fn constraint_ok(orientation: Orientation, lhs: &Q, rhs: &Q) -> bool {
    match orientation {
        Orientation::Minimize => lhs <= rhs,
        Orientation::Maximize => lhs >= rhs,
    }
}

fn deviated(
    game: &FiniteGame,
    defaults: Option<&DefaultStrategyMap>,
    profile: &Profile,
    i: usize,
    choice: Choice,
) -> Result<Profile> {
    let dev = profile.with(i, choice);
    match defaults {
        Some(map) => map.resolve(game, &dev),
        None => {
            if dev.has_default() {
                return Err(Error::Evaluation(
                    "default deviation without a registered default map".into(),
                ));
            }
            Ok(dev)
        }
    }
}

/// `Σ_i E_{s̄_i}[ C_i(s̄_i, s_{-i}) ]`.
fn deviation_sum_base(
    game: &FiniteGame,
    defaults: Option<&DefaultStrategyMap>,
    sbar: &SBar,
    profile: &Profile,
) -> Result<Q> {
    let mut total = Q::zero();
    for i in 0..game.n_players() {
        for (choice, p) in sbar.marginal(i) {
            let dev = deviated(game, defaults, profile, i, choice)?;
            total += game.player_cost(i, &dev)? * p;
        }
    }
    Ok(total)
}

/// `Σ_i E[ C_i(dev) + α_i (C_{-i}(dev) - C_{-i}(s)) ]` where
/// `C_{-i} = C - C_i` and `dev = (s̄_i, s_{-i})`.
fn deviation_sum_altruistic(
    game: &FiniteGame,
    defaults: Option<&DefaultStrategyMap>,
    alpha: &AltruismVector,
    sbar: &SBar,
    profile: &Profile,
) -> Result<Q> {
    let here_social = game.social_cost(profile)?;
    let here_costs = game.all_player_costs(profile)?;
    let mut total = Q::zero();
    for i in 0..game.n_players() {
        let a = &alpha.values()[i];
        let here_rest = &here_social - &here_costs[i];
        for (choice, p) in sbar.marginal(i) {
            let dev = deviated(game, defaults, profile, i, choice)?;
            let dev_cost = game.player_cost(i, &dev)?;
            let dev_rest = game.social_cost(&dev)? - &dev_cost;
            total += (dev_cost + a * (dev_rest - &here_rest)) * p;
        }
    }
    Ok(total)
}

/// `Σ_i w_i E[ C_i(dev) + Σ_{j != i} α_ij (C_j(dev) - C_j(s)) ]`.
fn deviation_sum_friendship(
    game: &FiniteGame,
    defaults: Option<&DefaultStrategyMap>,
    alpha: &FriendshipMatrix,
    weights: &[Q],
    sbar: &SBar,
    profile: &Profile,
) -> Result<Q> {
    let here_costs = game.all_player_costs(profile)?;
    let mut total = Q::zero();
    for i in 0..game.n_players() {
        let mut term = Q::zero();
        for (choice, p) in sbar.marginal(i) {
            let dev = deviated(game, defaults, profile, i, choice)?;
            let dev_costs = game.all_player_costs(&dev)?;
            let mut inner = dev_costs[i].clone();
            for j in 0..game.n_players() {
                if j != i && !alpha.get(i, j).is_zero() {
                    inner += alpha.get(i, j) * (&dev_costs[j] - &here_costs[j]);
                }
            }
            term += inner * p;
        }
        total += &weights[i] * term;
    }
    Ok(total)
}

fn smoothness_budget(game: &FiniteGame, budget: u64) -> Result<()> {
    let needed = game.profile_count().saturating_mul(game.n_players() as u128 + 1);
    if needed > budget as u128 {
        return Err(Error::Budget { needed, budget });
    }
    Ok(())
}

/// Base smoothness: `Σ_i C_i(s̄_i, s_{-i}) <= λ C(s*) + μ C(s)` for every
/// profile s (reversed under maximization). Verifies that `cert.sstar`
/// really is optimal; returns the first violating profile.
pub fn check_smoothness_base(
    game: &FiniteGame,
    defaults: Option<&DefaultStrategyMap>,
    cert: &SmoothnessCertificate,
    budget: u64,
) -> Result<Option<Profile>> {
    cert.validate(game)?;
    smoothness_budget(game, budget)?;
    let (_, opt) = social_optima(game, budget)?;
    let sstar = match defaults {
        Some(map) => map.resolve(game, &cert.sstar)?,
        None => cert.sstar.clone(),
    };
    if game.social_cost(&sstar)? != opt {
        return Err(Error::Parameter("certificate optimum is not optimal".into()));
    }
    for profile in game.profiles() {
        let lhs = deviation_sum_base(game, defaults, &cert.sbar, &profile)?;
        let rhs = &cert.lambda * &opt + &cert.mu * game.social_cost(&profile)?;
        if !constraint_ok(game.orientation(), &lhs, &rhs) {
            return Ok(Some(profile));
        }
    }
    Ok(None)
}

/// Altruistic smoothness ("there exists an optimal s*"): tries every
/// social optimum as the common deviation profile; passes when any works.
/// Returns the witnessing optimum on success, or a violating profile for
/// the last optimum tried on failure.
pub fn check_smoothness_altruistic(
    game: &FiniteGame,
    alpha: &AltruismVector,
    cert: &SmoothnessCertificate,
    budget: u64,
) -> Result<std::result::Result<Profile, Option<Profile>>> {
    cert.validate(game)?;
    if alpha.len() != game.n_players() {
        return Err(Error::Parameter("altruism vector length mismatch".into()));
    }
    if !game.is_sum_bounded() {
        return Err(Error::Parameter("altruistic smoothness needs a sum-bounded game".into()));
    }
    smoothness_budget(game, budget)?;
    let (optima, opt) = social_optima(game, budget)?;
    let mut last_violation = None;
    for sstar in &optima {
        let sbar = SBar::Pure(sstar.clone());
        let mut violated = false;
        for profile in game.profiles() {
            let lhs = deviation_sum_altruistic(game, None, alpha, &sbar, &profile)?;
            let rhs = &cert.lambda * &opt + &cert.mu * game.social_cost(&profile)?;
            if !constraint_ok(game.orientation(), &lhs, &rhs) {
                last_violation = Some(profile);
                violated = true;
                break;
            }
        }
        if !violated {
            return Ok(Ok(sstar.clone()));
        }
    }
    Ok(Err(last_violation))
}

/// Friendship-weighted smoothness ("for all optima s*"): the weighted
/// deviation inequality must hold for every profile and every social
/// optimum. Returns the first violating profile.
pub fn check_smoothness_friendship(
    game: &FiniteGame,
    alpha: &FriendshipMatrix,
    weights: &[Q],
    cert: &SmoothnessCertificate,
    budget: u64,
) -> Result<Option<Profile>> {
    cert.validate(game)?;
    if alpha.n() != game.n_players() || weights.len() != game.n_players() {
        return Err(Error::Parameter("friendship parameter size mismatch".into()));
    }
    smoothness_budget(game, budget)?;
    let (optima, opt) = social_optima(game, budget)?;
    // C(s*) agrees across optima, so one pass over profiles suffices; the
    // quantification over optima is preserved by requiring cert.sstar to
    // be among them.
    if !optima.contains(&cert.sstar) {
        return Err(Error::Parameter("certificate optimum is not optimal".into()));
    }
    for profile in game.profiles() {
        let lhs =
            deviation_sum_friendship(game, None, alpha, weights, &cert.sbar, &profile)?;
        let rhs = &cert.lambda * &opt + &cert.mu * game.social_cost(&profile)?;
        if !constraint_ok(game.orientation(), &lhs, &rhs) {
            return Ok(Some(profile));
        }
    }
    Ok(None)
}

// --- Robust PoA optimization ------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum RobustPoa {
    Bound {
        value: Q,
        lambda: Q,
        mu: Q,
        /// False when the value is an infimum approached only in the limit
        /// (the reported parameters then certify a marginally larger
        /// bound).
        attained: bool,
        sbar_index: usize,
    },
    Infeasible,
    /// `C(s*) = 0`; no finite ratio is defined.
    Degenerate,
}

pub enum SmoothnessParams<'a> {
    Base,
    Altruistic(&'a AltruismVector),
    Friendship(&'a FriendshipMatrix, &'a [Q]),
}

/// Optimal smoothness parameters over the supplied deviation candidates:
/// builds one linear constraint per profile and candidate, and minimizes
/// `λ/(1-μ)` (min games) or `(1-μ)/λ` (max games) exactly.
pub fn robust_poa_bound(
    game: &FiniteGame,
    defaults: Option<&DefaultStrategyMap>,
    candidates: &[SBar],
    params: SmoothnessParams<'_>,
    budget: u64,
) -> Result<RobustPoa> {
    if candidates.is_empty() {
        return Err(Error::Parameter("need at least one deviation candidate".into()));
    }
    for sbar in candidates {
        sbar.validate(game)?;
    }
    smoothness_budget(game, budget)?;
    let (_, opt) = social_optima(game, budget)?;
    if opt.is_zero() {
        return Ok(RobustPoa::Degenerate);
    }
    let mut best: Option<RobustPoa> = None;
    for (idx, sbar) in candidates.iter().enumerate() {
        let mut rows = Vec::new();
        for profile in game.profiles() {
            let d = match &params {
                SmoothnessParams::Base => deviation_sum_base(game, defaults, sbar, &profile)?,
                SmoothnessParams::Altruistic(alpha) => {
                    deviation_sum_altruistic(game, defaults, alpha, sbar, &profile)?
                }
                SmoothnessParams::Friendship(alpha, w) => {
                    deviation_sum_friendship(game, defaults, alpha, w, sbar, &profile)?
                }
            };
            rows.push((game.social_cost(&profile)?, d));
        }
        let sol = match game.orientation() {
            Orientation::Minimize => optimize_smoothness_min(&opt, &rows)?,
            Orientation::Maximize => optimize_smoothness_max(&opt, &rows)?,
        };
        let candidate = match sol {
            SmoothnessLp::Attained { bound, lambda, mu } => RobustPoa::Bound {
                value: bound,
                lambda,
                mu,
                attained: true,
                sbar_index: idx,
            },
            SmoothnessLp::Asymptotic { bound } => {
                // report feasible parameters close to the infimum: the LP
                // guarantees feasibility of the value itself only in the
                // limit, so surface the bound with attained = false and
                // keep (λ, μ) at a safe representative
                RobustPoa::Bound {
                    value: bound.clone(),
                    lambda: bound,
                    mu: Q::zero(),
                    attained: false,
                    sbar_index: idx,
                }
            }
            SmoothnessLp::Infeasible => continue,
        };
        let replace = match (&best, &candidate) {
            (None, _) => true,
            (
                Some(RobustPoa::Bound { value: old, .. }),
                RobustPoa::Bound { value: new, .. },
            ) => new < old,
            _ => false,
        };
        if replace {
            best = Some(candidate);
        }
    }
    Ok(best.unwrap_or(RobustPoa::Infeasible))
}

// --- Altruism independence and reduction transfer ----------------------------

/// For a game that is an SCG, verifies the structural identity behind
/// altruism independence: `C_{-i}(s)` does not depend on `s_i`. Returns
/// the first violating `(i, s, s_i')`.
pub fn check_altruism_independence_identity(
    game: &FiniteGame,
    defaults: &DefaultStrategyMap,
    budget: u64,
) -> Result<Option<(usize, Profile, Choice)>> {
    if let Some((i, s)) = is_scg(game, defaults, budget)? {
        return Err(Error::Parameter(format!(
            "input is not an SCG: player {i} at profile {:?}",
            s.to_wire()
        )));
    }
    let per_profile: u128 = game.strategy_counts().iter().map(|&k| k as u128).sum();
    let needed = game.profile_count().saturating_mul(per_profile.max(1));
    if needed > budget as u128 {
        return Err(Error::Budget { needed, budget });
    }
    for profile in game.profiles() {
        for i in 0..game.n_players() {
            let here = game.social_cost(&profile)? - game.player_cost(i, &profile)?;
            for k in 0..game.strategy_count(i) {
                let choice = Choice::Play(k);
                if choice == profile.0[i] {
                    continue;
                }
                let other = profile.with(i, choice);
                let there = game.social_cost(&other)? - game.player_cost(i, &other)?;
                if here != there {
                    return Ok(Some((i, profile, choice)));
                }
            }
        }
    }
    Ok(None)
}

/// Instance-level confirmation of the reduction theorems: a certificate
/// verified on the corresponding SCG must transfer to the altruistic or
/// friendship extension of an (strongly) SC-bounded base game with the
/// same parameters.
pub fn reduction_transfer_check(
    game: &FiniteGame,
    defaults: &DefaultStrategyMap,
    params: SmoothnessParams<'_>,
    cert: &SmoothnessCertificate,
    budget: u64,
) -> Result<bool> {
    // precondition on the base game
    match &params {
        SmoothnessParams::Base => {
            return Err(Error::Parameter("transfer check needs an extension flavor".into()));
        }
        SmoothnessParams::Altruistic(_) => {
            if let Some((i, s)) = check_sc_bounded(game, defaults, budget)? {
                return Err(Error::Parameter(format!(
                    "base game is not SC-bounded: player {i} at {:?}",
                    s.to_wire()
                )));
            }
        }
        SmoothnessParams::Friendship(_, w) => {
            if let Some(v) = check_strongly_sc_bounded(game, defaults, w, budget)? {
                return Err(Error::Parameter(format!(
                    "base game is not strongly SC-bounded: condition {} fails for player {} at {:?}",
                    v.condition,
                    v.player,
                    v.profile.to_wire()
                )));
            }
        }
    }
    // the certificate must hold on the corresponding SCG
    let scg = corresponding_scg(game, defaults)?;
    let base_cert = SmoothnessCertificate { flavor: Flavor::Base, ..cert.clone() };
    if check_smoothness_base(&scg, Some(defaults), &base_cert, budget)?.is_some() {
        return Ok(false);
    }
    // ... and then transfer to the extension
    match &params {
        SmoothnessParams::Base => unreachable!(),
        SmoothnessParams::Altruistic(alpha) => {
            let ext_cert =
                SmoothnessCertificate { flavor: Flavor::Altruistic, ..cert.clone() };
            Ok(check_smoothness_altruistic(game, alpha, &ext_cert, budget)?.is_ok())
        }
        SmoothnessParams::Friendship(alpha, w) => {
            let ext_cert =
                SmoothnessCertificate { flavor: Flavor::FriendshipWeighted, ..cert.clone() };
            Ok(check_smoothness_friendship(game, alpha, w, &ext_cert, budget)?.is_none())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{table_game, DefaultStrategy, DEFAULT_BUDGET};
    use crate::rational::{q, qi};

    /// Two players, a "stay home" strategy 0 (cost 0, no externality) and
    /// an "act" strategy 1. Acting costs the actor 2 and adds 1 to the
    /// other acting player. Social cost = sum.
    fn externality_game() -> (FiniteGame, DefaultStrategyMap) {
        // profiles (0,0) (0,1) (1,0) (1,1)
        let game = table_game(
            vec![2, 2],
            Orientation::Minimize,
            vec![
                vec![qi(0), qi(0), qi(2), qi(3)],
                vec![qi(0), qi(2), qi(0), qi(3)],
            ],
            None,
        )
        .unwrap();
        let defaults = DefaultStrategyMap::new(vec![
            DefaultStrategy::Existing(0),
            DefaultStrategy::Existing(0),
        ]);
        (game, defaults)
    }

    #[test]
    fn scg_cost_matches_definition() {
        let (game, defaults) = externality_game();
        let s = Profile::pure(&[1, 1]);
        // C(1,1) = 6, C(0,1) = 2 -> contribution of player 0 is 4
        assert_eq!(scg_cost(&game, &defaults, 0, &s).unwrap(), qi(4));
        let scg = corresponding_scg(&game, &defaults).unwrap();
        assert_eq!(scg.player_cost(0, &s).unwrap(), qi(4));
        assert_eq!(scg.social_cost(&s).unwrap(), game.social_cost(&s).unwrap());
    }

    #[test]
    fn scg_is_idempotent() {
        let (game, defaults) = externality_game();
        let scg = corresponding_scg(&game, &defaults).unwrap();
        let scg2 = corresponding_scg(&scg, &defaults).unwrap();
        for p in game.profiles() {
            assert_eq!(
                scg.all_player_costs(&p).unwrap(),
                scg2.all_player_costs(&p).unwrap()
            );
        }
        assert!(is_scg(&scg, &defaults, DEFAULT_BUDGET).unwrap().is_none());
    }

    #[test]
    fn sc_boundedness_verdicts() {
        let (game, defaults) = externality_game();
        // C_1(1,1) = 3 <= contribution 4: SC-bounded
        assert!(check_sc_bounded(&game, &defaults, DEFAULT_BUDGET).unwrap().is_none());
        // a selfish variant where acting costs only the actor 2 and the
        // contribution is smaller than the private cost fails:
        let selfish = table_game(
            vec![2, 2],
            Orientation::Minimize,
            vec![
                vec![qi(0), qi(0), qi(5), qi(5)],
                vec![qi(0), qi(5), qi(0), qi(5)],
            ],
            // social cost caps at 6 so contributions understate
            Some(vec![qi(0), qi(3), qi(3), qi(6)]),
        )
        .unwrap();
        let v = check_sc_bounded(&selfish, &defaults, DEFAULT_BUDGET).unwrap();
        assert!(v.is_some());
    }

    #[test]
    fn strong_sc_boundedness() {
        let (game, defaults) = externality_game();
        let w = vec![Q::one(), Q::one()];
        assert!(check_strongly_sc_bounded(&game, &defaults, &w, DEFAULT_BUDGET)
            .unwrap()
            .is_none());
        // negative externality on dropout violates condition 2: player 1's
        // cost goes *up* when player 0 leaves
        let bad = table_game(
            vec![2, 2],
            Orientation::Minimize,
            vec![
                vec![qi(0), qi(0), qi(2), qi(2)],
                vec![qi(0), qi(5), qi(0), qi(3)],
            ],
            None,
        )
        .unwrap();
        let v = check_strongly_sc_bounded(&bad, &defaults, &w, DEFAULT_BUDGET)
            .unwrap()
            .unwrap();
        assert_eq!(v.condition, 2);
    }

    #[test]
    fn altruism_independence_on_scg() {
        let (game, defaults) = externality_game();
        let scg = corresponding_scg(&game, &defaults).unwrap();
        assert!(
            check_altruism_independence_identity(&scg, &defaults, DEFAULT_BUDGET)
                .unwrap()
                .is_none()
        );
        // the base game itself is not an SCG here
        assert!(check_altruism_independence_identity(&game, &defaults, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn base_smoothness_and_certificate_bound() {
        let (game, defaults) = externality_game();
        let scg = corresponding_scg(&game, &defaults).unwrap();
        let sstar = Profile::pure(&[0, 0]);
        // the SCG optimum is 0 here, so shift to a certificate on the
        // base game with sstar = (0,0) and C(s*) = 0 -> need a game with
        // positive optimum; use profile costs directly
        let _ = scg;
        let game2 = table_game(
            vec![2, 2],
            Orientation::Minimize,
            vec![
                vec![qi(1), qi(1), qi(2), qi(3)],
                vec![qi(1), qi(2), qi(1), qi(3)],
            ],
            None,
        )
        .unwrap();
        let cert = SmoothnessCertificate {
            lambda: qi(1),
            mu: q(1, 2),
            sbar: SBar::Pure(sstar.clone()),
            sstar,
            flavor: Flavor::Base,
        };
        // constraint at worst profile (1,1): deviations to 0 give
        // C_0(0,1) + C_1(1,0) = 1 + 1 = 2 <= 1*2 + 1/2*6 = 5
        assert!(check_smoothness_base(&game2, None, &cert, DEFAULT_BUDGET)
            .unwrap()
            .is_none());
        assert_eq!(cert.bound(Orientation::Minimize), qi(2));
    }

    #[test]
    fn altruistic_check_at_zero_matches_base() {
        let game = table_game(
            vec![2, 2],
            Orientation::Minimize,
            vec![
                vec![qi(1), qi(1), qi(2), qi(3)],
                vec![qi(1), qi(2), qi(1), qi(3)],
            ],
            None,
        )
        .unwrap();
        let sstar = Profile::pure(&[0, 0]);
        let cert = SmoothnessCertificate {
            lambda: qi(1),
            mu: q(1, 2),
            sbar: SBar::Pure(sstar.clone()),
            sstar,
            flavor: Flavor::Altruistic,
        };
        let zero = AltruismVector::uniform(2, Q::zero()).unwrap();
        let res = check_smoothness_altruistic(&game, &zero, &cert, DEFAULT_BUDGET).unwrap();
        assert!(res.is_ok());
    }

    #[test]
    fn friendship_identity_matches_base() {
        let game = table_game(
            vec![2, 2],
            Orientation::Minimize,
            vec![
                vec![qi(1), qi(1), qi(2), qi(3)],
                vec![qi(1), qi(2), qi(1), qi(3)],
            ],
            None,
        )
        .unwrap();
        let sstar = Profile::pure(&[0, 0]);
        let cert = SmoothnessCertificate {
            lambda: qi(1),
            mu: q(1, 2),
            sbar: SBar::Pure(sstar.clone()),
            sstar,
            flavor: Flavor::FriendshipWeighted,
        };
        let id = FriendshipMatrix::identity(2);
        let w = vec![Q::one(), Q::one()];
        assert!(
            check_smoothness_friendship(&game, &id, &w, &cert, DEFAULT_BUDGET)
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn transfer_check_on_externality_game() {
        let (game, defaults) = externality_game();
        // optimum of the base game is (0,0) with cost 0, degenerate for
        // ratios but fine for the pointwise transfer: use lambda large
        // enough that the SCG constraints hold.
        // SCG deviation sums with sbar = (0,0): at s=(1,1):
        // C̄_0(0,1)=0? C(0,1)=2, C(0,1 with 0 default)=2 -> 0. Sum 0.
        // rhs = lambda*0 + mu*C(s) >= 0 for mu >= 0. Holds.
        let sstar = Profile::pure(&[0, 0]);
        let cert = SmoothnessCertificate {
            lambda: qi(1),
            mu: q(1, 2),
            sbar: SBar::Pure(sstar.clone()),
            sstar,
            flavor: Flavor::Altruistic,
        };
        let alpha = AltruismVector::uniform(2, q(1, 2)).unwrap();
        let ok = reduction_transfer_check(
            &game,
            &defaults,
            SmoothnessParams::Altruistic(&alpha),
            &cert,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(ok);
        let fm = FriendshipMatrix::uniform(2, q(1, 3)).unwrap();
        let w = vec![Q::one(), Q::one()];
        let fcert = SmoothnessCertificate { flavor: Flavor::FriendshipWeighted, ..cert };
        let ok = reduction_transfer_check(
            &game,
            &defaults,
            SmoothnessParams::Friendship(&fm, &w),
            &fcert,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn robust_bound_single_profile_game() {
        let game = table_game(
            vec![1, 1],
            Orientation::Minimize,
            vec![vec![qi(2)], vec![qi(3)]],
            None,
        )
        .unwrap();
        let sbar = SBar::Pure(Profile::pure(&[0, 0]));
        let res = robust_poa_bound(
            &game,
            None,
            &[sbar],
            SmoothnessParams::Base,
            DEFAULT_BUDGET,
        )
        .unwrap();
        match res {
            RobustPoa::Bound { value, .. } => assert_eq!(value, qi(1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn robust_bound_monotone_in_candidates() {
        let game = table_game(
            vec![2, 2],
            Orientation::Minimize,
            vec![
                vec![qi(1), qi(1), qi(2), qi(4)],
                vec![qi(1), qi(2), qi(1), qi(4)],
            ],
            None,
        )
        .unwrap();
        let c1 = vec![SBar::Pure(Profile::pure(&[0, 0]))];
        let c2 = vec![
            SBar::Pure(Profile::pure(&[0, 0])),
            SBar::Pure(Profile::pure(&[0, 1])),
            SBar::Pure(Profile::pure(&[1, 0])),
        ];
        let v1 = match robust_poa_bound(&game, None, &c1, SmoothnessParams::Base, DEFAULT_BUDGET)
            .unwrap()
        {
            RobustPoa::Bound { value, .. } => value,
            other => panic!("unexpected {other:?}"),
        };
        let v2 = match robust_poa_bound(&game, None, &c2, SmoothnessParams::Base, DEFAULT_BUDGET)
            .unwrap()
        {
            RobustPoa::Bound { value, .. } => value,
            other => panic!("unexpected {other:?}"),
        };
        assert!(v2 <= v1);
    }

    #[test]
    fn certificate_json_round_trip() {
        let cert = SmoothnessCertificate {
            lambda: q(17, 5),
            mu: q(2, 5),
            sbar: SBar::Mixed(vec![
                vec![(Choice::Play(0), q(1, 2)), (Choice::Play(1), q(1, 2))],
                vec![(Choice::Play(1), qi(1))],
            ]),
            sstar: Profile::pure(&[0, 1]),
            flavor: Flavor::Base,
        };
        let text = serde_json::to_string(&cert.to_json()).unwrap();
        let parsed: CertificateJson = serde_json::from_str(&text).unwrap();
        assert_eq!(SmoothnessCertificate::from_json(&parsed).unwrap(), cert);
    }
}
