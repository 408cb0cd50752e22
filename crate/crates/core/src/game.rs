//! Finite strategic games with exact rational costs.
//!
//! A [`FiniteGame`] bundles per-player strategy counts, an orientation
//! (cost minimization or payoff maximization), optional player weights and
//! an [`Evaluator`] that produces exact player costs and a social cost for
//! every strategy profile. Evaluators must be pure: re-evaluating a profile
//! always yields bit-identical rationals, which makes games safe to share
//! across threads.

use std::collections::HashSet;
use std::sync::Arc;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{is_nonnegative, Q, QStr};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    #[serde(rename = "min")]
    Minimize,
    #[serde(rename = "max")]
    Maximize,
}

impl Orientation {
    /// True iff `a` is strictly better than `b` for a player.
    pub fn strictly_better(&self, a: &Q, b: &Q) -> bool {
        match self {
            Orientation::Minimize => a < b,
            Orientation::Maximize => a > b,
        }
    }

    /// True iff `a` is at least as good as `b`.
    pub fn at_least_as_good(&self, a: &Q, b: &Q) -> bool {
        match self {
            Orientation::Minimize => a <= b,
            Orientation::Maximize => a >= b,
        }
    }
}

/// One player's entry in a strategy profile. `Default` is the sentinel
/// non-participation strategy, which need not be an element of the
/// player's strategy set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Choice {
    Play(usize),
    Default,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Profile(pub Vec<Choice>);

impl Profile {
    pub fn pure(indices: &[usize]) -> Self {
        Profile(indices.iter().map(|&k| Choice::Play(k)).collect())
    }

    /// Parses the wire form: strategy indices with `-1` for the default.
    pub fn from_wire(entries: &[i64]) -> Result<Self> {
        let mut choices = Vec::with_capacity(entries.len());
        for &e in entries {
            if e == -1 {
                choices.push(Choice::Default);
            } else if e >= 0 {
                choices.push(Choice::Play(e as usize));
            } else {
                return Err(Error::Parse(format!("invalid profile entry {e}")));
            }
        }
        Ok(Profile(choices))
    }

    pub fn to_wire(&self) -> Vec<i64> {
        self.0
            .iter()
            .map(|c| match c {
                Choice::Play(k) => *k as i64,
                Choice::Default => -1,
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_default(&self) -> bool {
        self.0.iter().any(|c| *c == Choice::Default)
    }

    /// The profile with player `i`'s entry replaced.
    pub fn with(&self, i: usize, choice: Choice) -> Self {
        let mut next = self.clone();
        next.0[i] = choice;
        next
    }
}

/// Pure, thread-safe cost oracle behind a game.
pub trait Evaluator: Send + Sync {
    fn n_players(&self) -> usize;

    fn player_cost(&self, i: usize, profile: &Profile) -> Q;

    fn social_cost(&self, profile: &Profile) -> Q;

    /// All player costs at once. Structured evaluators override this when a
    /// single pass over the profile is cheaper than n separate calls.
    fn all_player_costs(&self, profile: &Profile) -> Vec<Q> {
        (0..self.n_players()).map(|i| self.player_cost(i, profile)).collect()
    }

    /// Whether the evaluator natively understands `Choice::Default` for
    /// player `i` (structured families do; cost tables do not).
    fn supports_default(&self, _i: usize) -> bool {
        false
    }
}

#[derive(Clone)]
pub struct FiniteGame {
    strategy_counts: Vec<usize>,
    orientation: Orientation,
    weights: Option<Vec<Q>>,
    sum_bounded: bool,
    eval: Arc<dyn Evaluator>,
}

impl FiniteGame {
    pub fn new(
        strategy_counts: Vec<usize>,
        orientation: Orientation,
        eval: Arc<dyn Evaluator>,
    ) -> Result<Self> {
        if strategy_counts.is_empty() {
            return Err(Error::Parameter("a game needs at least one player".into()));
        }
        if strategy_counts.iter().any(|&k| k == 0) {
            return Err(Error::Parameter("every player needs at least one strategy".into()));
        }
        if eval.n_players() != strategy_counts.len() {
            return Err(Error::Parameter(format!(
                "evaluator covers {} players, strategy counts cover {}",
                eval.n_players(),
                strategy_counts.len()
            )));
        }
        Ok(FiniteGame {
            strategy_counts,
            orientation,
            weights: None,
            sum_bounded: false,
            eval,
        })
    }

    pub fn with_sum_bounded(mut self, declared: bool) -> Self {
        self.sum_bounded = declared;
        self
    }

    pub fn with_weights(mut self, weights: Vec<Q>) -> Result<Self> {
        if weights.len() != self.n_players() {
            return Err(Error::Parameter("weight vector length mismatch".into()));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::Parameter("player weights must be positive".into()));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn n_players(&self) -> usize {
        self.strategy_counts.len()
    }

    pub fn strategy_count(&self, i: usize) -> usize {
        self.strategy_counts[i]
    }

    pub fn strategy_counts(&self) -> &[usize] {
        &self.strategy_counts
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn weights(&self) -> Option<&[Q]> {
        self.weights.as_deref()
    }

    pub fn is_sum_bounded(&self) -> bool {
        self.sum_bounded
    }

    pub fn evaluator(&self) -> &Arc<dyn Evaluator> {
        &self.eval
    }

    pub fn profile_count(&self) -> u128 {
        self.strategy_counts.iter().fold(1u128, |acc, &k| acc.saturating_mul(k as u128))
    }

    pub fn check_budget(&self, budget: u64) -> Result<()> {
        let needed = self.profile_count();
        if needed > budget as u128 {
            return Err(Error::Budget { needed, budget });
        }
        Ok(())
    }

    pub fn validate_profile(&self, profile: &Profile) -> Result<()> {
        if profile.len() != self.n_players() {
            return Err(Error::Parameter(format!(
                "profile has {} entries, game has {} players",
                profile.len(),
                self.n_players()
            )));
        }
        for (i, choice) in profile.0.iter().enumerate() {
            match choice {
                Choice::Play(k) if *k >= self.strategy_counts[i] => {
                    return Err(Error::Parameter(format!(
                        "strategy index {k} out of bounds for player {i}"
                    )));
                }
                Choice::Default if !self.eval.supports_default(i) => {
                    return Err(Error::Evaluation(format!(
                        "player {i} has no registered default strategy"
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn player_cost(&self, i: usize, profile: &Profile) -> Result<Q> {
        self.validate_profile(profile)?;
        Ok(self.eval.player_cost(i, profile))
    }

    pub fn social_cost(&self, profile: &Profile) -> Result<Q> {
        self.validate_profile(profile)?;
        Ok(self.eval.social_cost(profile))
    }

    pub fn all_player_costs(&self, profile: &Profile) -> Result<Vec<Q>> {
        self.validate_profile(profile)?;
        Ok(self.eval.all_player_costs(profile))
    }

    /// Iterates every pure profile in lexicographic order
    /// (player 0 most significant).
    pub fn profiles(&self) -> ProfileIter {
        ProfileIter::new(self.strategy_counts.clone())
    }

    /// Exhaustively checks the declared sum-boundedness:
    /// `C(s) <= sum_i C_i(s)` for minimization, `>=` for maximization.
    pub fn verify_sum_bounded(&self, budget: u64) -> Result<Option<Profile>> {
        self.check_budget(budget)?;
        for profile in self.profiles() {
            let total: Q = self.eval.all_player_costs(&profile).into_iter().sum();
            let social = self.eval.social_cost(&profile);
            let ok = match self.orientation {
                Orientation::Minimize => social <= total,
                Orientation::Maximize => social >= total,
            };
            if !ok {
                return Ok(Some(profile));
            }
        }
        Ok(None)
    }

    /// Exhaustively checks `C(s) <= sum_i w_i C_i(s)` (reversed for
    /// maximization) for the given weights.
    pub fn verify_weight_bounded(&self, weights: &[Q], budget: u64) -> Result<Option<Profile>> {
        self.check_budget(budget)?;
        if weights.len() != self.n_players() {
            return Err(Error::Parameter("weight vector length mismatch".into()));
        }
        for profile in self.profiles() {
            let costs = self.eval.all_player_costs(&profile);
            let total: Q = costs.iter().zip(weights).map(|(c, w)| c * w).sum();
            let social = self.eval.social_cost(&profile);
            let ok = match self.orientation {
                Orientation::Minimize => social <= total,
                Orientation::Maximize => social >= total,
            };
            if !ok {
                return Ok(Some(profile));
            }
        }
        Ok(None)
    }
}

pub struct ProfileIter {
    counts: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl ProfileIter {
    pub fn new(counts: Vec<usize>) -> Self {
        let current = if counts.iter().all(|&k| k > 0) {
            Some(vec![0; counts.len()])
        } else {
            None
        };
        ProfileIter { counts, current }
    }
}

impl Iterator for ProfileIter {
    type Item = Profile;

    fn next(&mut self) -> Option<Profile> {
        let current = self.current.as_mut()?;
        let item = Profile::pure(current);
        // increment with the last player fastest
        let mut pos = current.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < self.counts[pos] {
                break;
            }
            current[pos] = 0;
        }
        Some(item)
    }
}

// ---------------------------------------------------------------------------
// Altruism and friendship extensions
// ---------------------------------------------------------------------------

/// Per-player altruism levels. In standard mode every level lies in [0, 1];
/// the extended mode admits arbitrary rationals (including spiteful,
/// negative levels).
#[derive(Clone, Debug, PartialEq)]
pub struct AltruismVector {
    values: Vec<Q>,
    extended: bool,
}

impl AltruismVector {
    pub fn new(values: Vec<Q>) -> Result<Self> {
        for (i, a) in values.iter().enumerate() {
            if a.is_negative() || *a > Q::one() {
                return Err(Error::Parameter(format!(
                    "altruism level for player {i} is outside [0, 1]; use extended mode for that"
                )));
            }
        }
        Ok(AltruismVector { values, extended: false })
    }

    /// Opt-in mode allowing any rational levels.
    pub fn new_extended(values: Vec<Q>) -> Self {
        AltruismVector { values, extended: true }
    }

    pub fn uniform(n: usize, level: Q) -> Result<Self> {
        AltruismVector::new(vec![level; n])
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The n-by-n affection matrix of the friendship model; `alpha[i][i] = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FriendshipMatrix {
    rows: Vec<Vec<Q>>,
}

impl FriendshipMatrix {
    pub fn new(rows: Vec<Vec<Q>>) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Parameter("friendship matrix must be square".into()));
            }
            if !row[i].is_one() {
                return Err(Error::Parameter(format!(
                    "friendship matrix diagonal entry ({i},{i}) must be 1"
                )));
            }
            for (j, a) in row.iter().enumerate() {
                if a.is_negative() || *a > Q::one() {
                    return Err(Error::Parameter(format!(
                        "friendship level ({i},{j}) is outside [0, 1]"
                    )));
                }
            }
        }
        Ok(FriendshipMatrix { rows })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
            .collect();
        FriendshipMatrix { rows }
    }

    /// Off-diagonal entries all equal to `level`.
    pub fn uniform(n: usize, level: Q) -> Result<Self> {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Q::one() } else { level.clone() }).collect())
            .collect();
        FriendshipMatrix::new(rows)
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.rows[i][j]
    }
}

struct AltruisticEval {
    base: FiniteGame,
    alpha: Vec<Q>,
}

impl Evaluator for AltruisticEval {
    fn n_players(&self) -> usize {
        self.base.n_players()
    }

    fn player_cost(&self, i: usize, profile: &Profile) -> Q {
        let own = self.base.evaluator().player_cost(i, profile);
        let social = self.base.evaluator().social_cost(profile);
        (Q::one() - &self.alpha[i]) * own + &self.alpha[i] * social
    }

    fn social_cost(&self, profile: &Profile) -> Q {
        self.base.evaluator().social_cost(profile)
    }

    fn all_player_costs(&self, profile: &Profile) -> Vec<Q> {
        let base = self.base.evaluator().all_player_costs(profile);
        let social = self.base.evaluator().social_cost(profile);
        base.into_iter()
            .zip(&self.alpha)
            .map(|(own, a)| (Q::one() - a) * own + a * &social)
            .collect()
    }

    fn supports_default(&self, i: usize) -> bool {
        self.base.evaluator().supports_default(i)
    }
}

/// Builds the altruistic extension: perceived cost
/// `(1 - alpha_i) C_i + alpha_i C`, social cost unchanged.
pub fn altruistic_extension(game: &FiniteGame, alpha: &AltruismVector) -> Result<FiniteGame> {
    if alpha.len() != game.n_players() {
        return Err(Error::Parameter("altruism vector length mismatch".into()));
    }
    if !game.is_sum_bounded() {
        return Err(Error::Parameter(
            "altruistic extension requires a game declared sum-bounded".into(),
        ));
    }
    let eval = Arc::new(AltruisticEval { base: game.clone(), alpha: alpha.values().to_vec() });
    let mut ext = FiniteGame::new(game.strategy_counts.clone(), game.orientation, eval)?
        .with_sum_bounded(game.sum_bounded);
    ext.weights = game.weights.clone();
    Ok(ext)
}

struct FriendshipEval {
    base: FiniteGame,
    alpha: FriendshipMatrix,
}

impl Evaluator for FriendshipEval {
    fn n_players(&self) -> usize {
        self.base.n_players()
    }

    fn player_cost(&self, i: usize, profile: &Profile) -> Q {
        let costs = self.base.evaluator().all_player_costs(profile);
        self.alpha
            .row(i)
            .iter()
            .zip(&costs)
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, c)| a * c)
            .sum()
    }

    fn social_cost(&self, profile: &Profile) -> Q {
        self.base.evaluator().social_cost(profile)
    }

    fn all_player_costs(&self, profile: &Profile) -> Vec<Q> {
        let costs = self.base.evaluator().all_player_costs(profile);
        (0..self.n_players())
            .map(|i| {
                self.alpha
                    .row(i)
                    .iter()
                    .zip(&costs)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, c)| a * c)
                    .sum()
            })
            .collect()
    }

    fn supports_default(&self, i: usize) -> bool {
        self.base.evaluator().supports_default(i)
    }
}

/// Builds the friendship extension: perceived cost
/// `sum_j alpha_ij C_j`, social cost unchanged.
pub fn friendship_extension(game: &FiniteGame, alpha: &FriendshipMatrix) -> Result<FiniteGame> {
    if alpha.n() != game.n_players() {
        return Err(Error::Parameter("friendship matrix size mismatch".into()));
    }
    let eval = Arc::new(FriendshipEval { base: game.clone(), alpha: alpha.clone() });
    let mut ext = FiniteGame::new(game.strategy_counts.clone(), game.orientation, eval)?
        .with_sum_bounded(game.sum_bounded);
    ext.weights = game.weights.clone();
    Ok(ext)
}

// ---------------------------------------------------------------------------
// Default strategies
// ---------------------------------------------------------------------------

/// How a player's default strategy is realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefaultStrategy {
    /// The default coincides with an existing strategy index.
    Existing(usize),
    /// The evaluator natively extends the cost function to the sentinel.
    Native,
}

/// Per-player default strategies, with the extended cost evaluator hook:
/// substituting existing strategies where registered and passing the
/// sentinel through where the evaluator understands it.
#[derive(Clone, Debug)]
pub struct DefaultStrategyMap {
    entries: Vec<DefaultStrategy>,
}

impl DefaultStrategyMap {
    pub fn new(entries: Vec<DefaultStrategy>) -> Self {
        DefaultStrategyMap { entries }
    }

    pub fn all_native(n: usize) -> Self {
        DefaultStrategyMap { entries: vec![DefaultStrategy::Native; n] }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, i: usize) -> DefaultStrategy {
        self.entries[i]
    }

    /// Rewrites sentinel entries to something the game can evaluate.
    pub fn resolve(&self, game: &FiniteGame, profile: &Profile) -> Result<Profile> {
        if profile.len() != self.entries.len() || profile.len() != game.n_players() {
            return Err(Error::Parameter("profile/defaults length mismatch".into()));
        }
        let mut out = profile.clone();
        for (i, choice) in profile.0.iter().enumerate() {
            if *choice == Choice::Default {
                match self.entries[i] {
                    DefaultStrategy::Existing(k) => out.0[i] = Choice::Play(k),
                    DefaultStrategy::Native => {
                        if !game.evaluator().supports_default(i) {
                            return Err(Error::Evaluation(format!(
                                "player {i} has no registered default strategy"
                            )));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// The profile with player `i` switched to its default.
    pub fn defaulted(&self, game: &FiniteGame, profile: &Profile, i: usize) -> Result<Profile> {
        self.resolve(game, &profile.with(i, Choice::Default))
    }
}

/// Evaluates a profile that may contain default sentinels under the
/// extended cost function; restricted to plain profiles this is ordinary
/// evaluation.
pub fn evaluate_with_defaults(
    game: &FiniteGame,
    defaults: &DefaultStrategyMap,
    profile: &Profile,
) -> Result<(Vec<Q>, Q)> {
    let resolved = defaults.resolve(game, profile)?;
    game.validate_profile(&resolved)?;
    let costs = game.evaluator().all_player_costs(&resolved);
    let social = game.evaluator().social_cost(&resolved);
    Ok((costs, social))
}

// ---------------------------------------------------------------------------
// Finite-support distributions
// ---------------------------------------------------------------------------

/// A probability distribution over strategy profiles with finite support
/// and exactly rational probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSupportDistribution {
    atoms: Vec<(Profile, Q)>,
}

impl FiniteSupportDistribution {
    pub fn new(atoms: Vec<(Profile, Q)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Parameter("distribution needs at least one atom".into()));
        }
        let mut seen = HashSet::new();
        let mut total = Q::zero();
        for (profile, p) in &atoms {
            if !p.is_positive() {
                return Err(Error::Parameter("probabilities must be positive".into()));
            }
            if !seen.insert(profile.clone()) {
                return Err(Error::Parameter("duplicate profile in distribution".into()));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::Parameter("probabilities must sum to exactly 1".into()));
        }
        Ok(FiniteSupportDistribution { atoms })
    }

    pub fn point_mass(profile: Profile) -> Self {
        FiniteSupportDistribution { atoms: vec![(profile, Q::one())] }
    }

    pub fn uniform(profiles: Vec<Profile>) -> Result<Self> {
        let n = profiles.len();
        if n == 0 {
            return Err(Error::Parameter("distribution needs at least one atom".into()));
        }
        let p = Q::new(1.into(), (n as i64).into());
        FiniteSupportDistribution::new(profiles.into_iter().map(|s| (s, p.clone())).collect())
    }

    pub fn atoms(&self) -> &[(Profile, Q)] {
        &self.atoms
    }
}

// ---------------------------------------------------------------------------
// Explicit cost tables and the JSON game-description format
// ---------------------------------------------------------------------------

/// Normal-form game backed by explicit cost tables, profile-ranked with the
/// last player's index moving fastest (lexicographic profile order).
pub struct TableGame {
    strategy_counts: Vec<usize>,
    costs: Vec<Vec<Q>>,
    social: Vec<Q>,
}

impl TableGame {
    pub fn rank(counts: &[usize], profile: &Profile) -> usize {
        let mut rank = 0usize;
        for (i, choice) in profile.0.iter().enumerate() {
            let k = match choice {
                Choice::Play(k) => *k,
                Choice::Default => panic!("table games have no native default strategies"),
            };
            rank = rank * counts[i] + k;
        }
        rank
    }
}

impl Evaluator for TableGame {
    fn n_players(&self) -> usize {
        self.strategy_counts.len()
    }

    fn player_cost(&self, i: usize, profile: &Profile) -> Q {
        self.costs[i][TableGame::rank(&self.strategy_counts, profile)].clone()
    }

    fn social_cost(&self, profile: &Profile) -> Q {
        self.social[TableGame::rank(&self.strategy_counts, profile)].clone()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SocialSpec {
    Sum(String),
    Table(Vec<QStr>),
}

/// JSON game description for table games.
#[derive(Serialize, Deserialize)]
pub struct TableGameJson {
    pub players: usize,
    pub strategies: Vec<usize>,
    pub costs: Vec<Vec<QStr>>,
    social: SocialSpec,
    pub orientation: Orientation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<QStr>>,
    /// Optional per-player default strategy indices (for SCG constructions).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defaults: Option<Vec<usize>>,
}

/// Builds a table game (and its default map, when given) from the JSON
/// description, validating table sizes against the enumeration budget.
pub fn table_game_from_json(
    spec: &TableGameJson,
    budget: u64,
) -> Result<(FiniteGame, Option<DefaultStrategyMap>)> {
    if spec.strategies.len() != spec.players {
        return Err(Error::Parse("strategy count list length != players".into()));
    }
    let n_profiles = spec.strategies.iter().fold(1u128, |acc, &k| acc.saturating_mul(k as u128));
    if n_profiles > budget as u128 {
        return Err(Error::Budget { needed: n_profiles, budget });
    }
    let n_profiles = n_profiles as usize;
    if spec.costs.len() != spec.players {
        return Err(Error::Parse("cost table count != players".into()));
    }
    let costs: Vec<Vec<Q>> = spec
        .costs
        .iter()
        .map(|row| {
            if row.len() != n_profiles {
                return Err(Error::Parse("cost table size != profile count".into()));
            }
            Ok(row.iter().map(|v| v.0.clone()).collect())
        })
        .collect::<Result<_>>()?;
    let (social, declared_sum): (Vec<Q>, bool) = match &spec.social {
        SocialSpec::Sum(tag) if tag == "sum" => {
            let mut social = vec![Q::zero(); n_profiles];
            for row in &costs {
                for (acc, v) in social.iter_mut().zip(row) {
                    *acc += v;
                }
            }
            (social, true)
        }
        SocialSpec::Sum(tag) => {
            return Err(Error::Parse(format!("unknown social specifier {tag:?}")));
        }
        SocialSpec::Table(values) => {
            if values.len() != n_profiles {
                return Err(Error::Parse("social table size != profile count".into()));
            }
            (values.iter().map(|v| v.0.clone()).collect(), false)
        }
    };
    let table = TableGame { strategy_counts: spec.strategies.clone(), costs, social };
    let mut game = FiniteGame::new(spec.strategies.clone(), spec.orientation, Arc::new(table))?
        .with_sum_bounded(declared_sum);
    if let Some(weights) = &spec.weights {
        if weights.iter().any(|w| !is_nonnegative(&w.0)) {
            return Err(Error::Parse("weights must be nonnegative".into()));
        }
        game = game.with_weights(weights.iter().map(|w| w.0.clone()).collect())?;
    }
    let defaults = match &spec.defaults {
        Some(idx) => {
            if idx.len() != spec.players {
                return Err(Error::Parse("defaults list length != players".into()));
            }
            for (i, &k) in idx.iter().enumerate() {
                if k >= spec.strategies[i] {
                    return Err(Error::Parse(format!("default index {k} out of range for player {i}")));
                }
            }
            Some(DefaultStrategyMap::new(
                idx.iter().map(|&k| DefaultStrategy::Existing(k)).collect(),
            ))
        }
        None => None,
    };
    Ok((game, defaults))
}

/// Builds a table game directly from in-memory tables (used by tests and
/// generators). `social = None` means the sum of player costs.
pub fn table_game(
    strategy_counts: Vec<usize>,
    orientation: Orientation,
    costs: Vec<Vec<Q>>,
    social: Option<Vec<Q>>,
) -> Result<FiniteGame> {
    let n_profiles: usize = strategy_counts.iter().product();
    if costs.len() != strategy_counts.len() || costs.iter().any(|r| r.len() != n_profiles) {
        return Err(Error::Parameter("cost table shape mismatch".into()));
    }
    let declared_sum = social.is_none();
    let social = social.unwrap_or_else(|| {
        let mut acc = vec![Q::zero(); n_profiles];
        for row in &costs {
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
        acc
    });
    if social.len() != n_profiles {
        return Err(Error::Parameter("social table shape mismatch".into()));
    }
    let table = TableGame { strategy_counts: strategy_counts.clone(), costs, social };
    Ok(FiniteGame::new(strategy_counts, orientation, Arc::new(table))?
        .with_sum_bounded(declared_sum))
}
