//! Atomic congestion games with linear delays: identity-latency
//! normalization, the deviation inequalities behind the 17/3 bound, the
//! Rosenthal potential, the 17/3-tight friendship lower-bound family, and
//! an integer fast-path sweep over all small identity-latency games.

use std::sync::Arc;

use num::integer::lcm;
use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{
    Choice, DefaultStrategy, DefaultStrategyMap, Evaluator, FiniteGame, FriendshipMatrix,
    Orientation, Profile,
};
use crate::rational::{qu, Q, QStr};
#[cfg(test)]
use crate::rational::{q, qi};

#[derive(Clone, Debug, PartialEq)]
pub struct CongestionGame {
    resources: usize,
    /// `d_e(x) = a_e x + b_e`.
    delays: Vec<(Q, Q)>,
    /// Per player, the list of strategies; each strategy is a sorted set
    /// of resource indices.
    strategies: Vec<Vec<Vec<usize>>>,
}

impl CongestionGame {
    pub fn new(
        resources: usize,
        delays: Vec<(Q, Q)>,
        strategies: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if delays.len() != resources {
            return Err(Error::Parameter("need one delay function per resource".into()));
        }
        if delays.iter().any(|(a, b)| a.is_negative() || b.is_negative()) {
            return Err(Error::Parameter("delay coefficients must be nonnegative".into()));
        }
        if strategies.is_empty() || strategies.iter().any(|s| s.is_empty()) {
            return Err(Error::Parameter("every player needs at least one strategy".into()));
        }
        let mut strategies = strategies;
        for per_player in &mut strategies {
            for subset in per_player.iter_mut() {
                subset.sort_unstable();
                subset.dedup();
                if subset.is_empty() {
                    return Err(Error::Parameter(
                        "strategy subsets must be nonempty (the default plays the empty set)"
                            .into(),
                    ));
                }
                if subset.iter().any(|&e| e >= resources) {
                    return Err(Error::Parameter("resource index out of range".into()));
                }
            }
        }
        Ok(CongestionGame { resources, delays, strategies })
    }

    /// All-identity delays.
    pub fn identity(resources: usize, strategies: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let delays = vec![(Q::one(), Q::zero()); resources];
        CongestionGame::new(resources, delays, strategies)
    }

    pub fn is_identity(&self) -> bool {
        self.delays.iter().all(|(a, b)| a.is_one() && b.is_zero())
    }

    pub fn n_players(&self) -> usize {
        self.strategies.len()
    }

    pub fn resources(&self) -> usize {
        self.resources
    }

    pub fn strategies(&self, i: usize) -> &[Vec<usize>] {
        &self.strategies[i]
    }

    pub fn delay(&self, e: usize, load: usize) -> Q {
        let (a, b) = &self.delays[e];
        a * qu(load) + b
    }

    fn subset(&self, i: usize, choice: Choice) -> &[usize] {
        match choice {
            Choice::Play(k) => &self.strategies[i][k],
            Choice::Default => &[],
        }
    }

    /// Resource loads under a profile (default = empty set).
    pub fn loads(&self, profile: &Profile) -> Vec<usize> {
        let mut x = vec![0usize; self.resources];
        for (i, choice) in profile.0.iter().enumerate() {
            for &e in self.subset(i, *choice) {
                x[e] += 1;
            }
        }
        x
    }
}

struct CongestionEval {
    cg: CongestionGame,
}

impl Evaluator for CongestionEval {
    fn n_players(&self) -> usize {
        self.cg.n_players()
    }

    fn player_cost(&self, i: usize, profile: &Profile) -> Q {
        let x = self.cg.loads(profile);
        self.cg
            .subset(i, profile.0[i])
            .iter()
            .map(|&e| self.cg.delay(e, x[e]))
            .sum()
    }

    fn social_cost(&self, profile: &Profile) -> Q {
        let x = self.cg.loads(profile);
        // Σ_i C_i = Σ_e x_e d_e(x_e)
        x.iter()
            .enumerate()
            .filter(|(_, &load)| load > 0)
            .map(|(e, &load)| qu(load) * self.cg.delay(e, load))
            .sum()
    }

    fn all_player_costs(&self, profile: &Profile) -> Vec<Q> {
        let x = self.cg.loads(profile);
        (0..self.cg.n_players())
            .map(|i| {
                self.cg
                    .subset(i, profile.0[i])
                    .iter()
                    .map(|&e| self.cg.delay(e, x[e]))
                    .sum()
            })
            .collect()
    }

    fn supports_default(&self, _i: usize) -> bool {
        true
    }
}

/// The congestion game as a finite cost game with native empty-set
/// defaults. The social cost is the sum of player costs, exactly.
pub fn congestion_game(cg: &CongestionGame) -> Result<(FiniteGame, DefaultStrategyMap)> {
    let counts: Vec<usize> = cg.strategies.iter().map(|s| s.len()).collect();
    let n = counts.len();
    let eval = Arc::new(CongestionEval { cg: cg.clone() });
    let game =
        FiniteGame::new(counts, Orientation::Minimize, eval)?.with_sum_bounded(true);
    Ok((game, DefaultStrategyMap::new(vec![DefaultStrategy::Native; n])))
}

/// Rewrites arbitrary nonnegative linear delays into identity latencies:
/// coefficients are scaled to integers by the common denominator, each
/// resource becomes `a_e` shared identity copies plus `b_e` fresh private
/// identity resources per using player. All costs in the result equal
/// `scale` times the original costs, profile for profile.
pub fn normalize_to_identity(cg: &CongestionGame) -> Result<(CongestionGame, Q)> {
    let mut denom = BigInt::one();
    for (a, b) in &cg.delays {
        denom = lcm(denom, a.denom().clone());
        denom = lcm(denom, b.denom().clone());
    }
    let scale = Q::from_integer(denom);
    let ints: Vec<(usize, usize)> = cg
        .delays
        .iter()
        .map(|(a, b)| {
            let ai = (a * &scale).to_integer();
            let bi = (b * &scale).to_integer();
            // nonnegative by construction; sizes stay practical
            (usize::try_from(ai).unwrap_or(usize::MAX), usize::try_from(bi).unwrap_or(usize::MAX))
        })
        .collect();
    let n = cg.n_players();
    // shared copies for each original resource
    let mut next = 0usize;
    let mut shared: Vec<Vec<usize>> = Vec::with_capacity(cg.resources);
    for &(a, _) in &ints {
        shared.push((0..a).map(|c| next + c).collect());
        next += a;
    }
    // private copies, per (player, resource) where the player ever uses e
    let mut private: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); cg.resources]; n];
    for (i, per_player) in cg.strategies.iter().enumerate() {
        let mut uses = vec![false; cg.resources];
        for subset in per_player {
            for &e in subset {
                uses[e] = true;
            }
        }
        for e in 0..cg.resources {
            let b = ints[e].1;
            if uses[e] && b > 0 {
                private[i][e] = (0..b).map(|c| next + c).collect();
                next += b;
            }
        }
    }
    let strategies: Vec<Vec<Vec<usize>>> = cg
        .strategies
        .iter()
        .enumerate()
        .map(|(i, per_player)| {
            per_player
                .iter()
                .map(|subset| {
                    let mut out = Vec::new();
                    for &e in subset {
                        out.extend_from_slice(&shared[e]);
                        out.extend_from_slice(&private[i][e]);
                    }
                    out
                })
                .collect()
        })
        .collect();
    Ok((CongestionGame::identity(next, strategies)?, scale))
}

/// `Σ_i C_i(s_i^*, s_{-i}) <= Σ_e x_e(s^*) (x_e(s) + 1)` for identity
/// latencies.
pub fn christodoulou_inequality_check(
    cg: &CongestionGame,
    s: &Profile,
    sstar: &Profile,
) -> Result<bool> {
    if !cg.is_identity() {
        return Err(Error::Unsupported("inequality needs identity latencies".into()));
    }
    let (game, _) = congestion_game(cg)?;
    let mut lhs = Q::zero();
    for i in 0..cg.n_players() {
        lhs += game.player_cost(i, &s.with(i, sstar.0[i]))?;
    }
    let x = cg.loads(s);
    let xstar = cg.loads(sstar);
    let rhs: Q = (0..cg.resources)
        .map(|e| qu(xstar[e]) * qu(x[e] + 1))
        .sum();
    Ok(lhs <= rhs)
}

/// `(2/5) a^3 + (17/5) b^2 >= b (a + 1)` for naturals.
pub fn bilo_inequality(a: u64, b: u64) -> bool {
    let (a, b) = (a as u128, b as u128);
    2 * a * a * a + 17 * b * b >= 5 * b * (a + 1)
}

/// `Φ(s) = Σ_e Σ_{k=1..x_e} d_e(k)`; decreases strictly under every
/// improving unilateral deviation.
pub fn rosenthal_potential(cg: &CongestionGame, profile: &Profile) -> Q {
    let x = cg.loads(profile);
    let mut total = Q::zero();
    for (e, &load) in x.iter().enumerate() {
        for k in 1..=load {
            total += cg.delay(e, k);
        }
    }
    total
}

// --- The 17/3 lower-bound family ------------------------------------------

pub struct LowerBoundFamily {
    pub game: CongestionGame,
    /// Every player on their first strategy; a pure Nash of the friendship
    /// extension.
    pub equilibrium: Profile,
    /// The social optimum returned by the generator: interior blocks on
    /// their alternate strategy, the last six players on the best of their
    /// 64 joint configurations.
    pub optimum: Profile,
    pub alpha: FriendshipMatrix,
}

/// Builds the (n+3)-block family: per block k the three players use
/// overlapping chains of identity resources in equilibrium and (for
/// k <= n) private downstream singletons otherwise; the final two blocks
/// get fresh resource sets sized to their equilibrium costs. The caring
/// matrix has `α_ij = 1` exactly when player i's alternate strategy meets
/// player j's equilibrium strategy. `C(s)/C(s*) -> 17/3`.
pub fn lower_bound_family(n: usize) -> Result<LowerBoundFamily> {
    let blocks = n + 3;
    let n_players = 3 * blocks;
    // equilibrium strategies over structural resources 0..=3(n+2)+4
    let structural = 3 * (n + 2) + 5;
    let mut equilibrium_sets: Vec<Vec<usize>> = Vec::with_capacity(n_players);
    for k in 0..blocks {
        equilibrium_sets.push(vec![3 * k, 3 * k + 1, 3 * k + 2]); // a_k
        equilibrium_sets.push(vec![3 * k + 2, 3 * k + 3]); // b_k
        equilibrium_sets.push(vec![3 * k + 3, 3 * k + 4]); // c_k
    }
    // equilibrium loads and player costs
    let mut load = vec![0usize; structural];
    for set in &equilibrium_sets {
        for &e in set {
            load[e] += 1;
        }
    }
    let eq_cost: Vec<usize> = equilibrium_sets
        .iter()
        .map(|set| set.iter().map(|&e| load[e]).sum())
        .collect();
    // alternate strategies
    let mut next = structural;
    let mut alt_sets: Vec<Vec<usize>> = Vec::with_capacity(n_players);
    for k in 0..blocks {
        for role in 0..3 {
            let i = 3 * k + role;
            if k <= n {
                alt_sets.push(vec![3 * k + 6 + role]);
            } else {
                let size = eq_cost[i];
                alt_sets.push((0..size).map(|c| next + c).collect());
                next += size;
            }
        }
    }
    let strategies: Vec<Vec<Vec<usize>>> = (0..n_players)
        .map(|i| vec![equilibrium_sets[i].clone(), alt_sets[i].clone()])
        .collect();
    let game = CongestionGame::identity(next, strategies)?;
    // α_ij = 1 iff the alternate of i meets the equilibrium set of j
    let rows: Vec<Vec<Q>> = (0..n_players)
        .map(|i| {
            (0..n_players)
                .map(|j| {
                    if i == j {
                        Q::one()
                    } else if alt_sets[i].iter().any(|e| equilibrium_sets[j].contains(e)) {
                        Q::one()
                    } else {
                        Q::zero()
                    }
                })
                .collect()
        })
        .collect();
    let alpha = FriendshipMatrix::new(rows)?;
    let equilibrium = Profile::pure(&vec![0; n_players]);
    // the optimum: everyone on the alternate, except the last six players
    // take the best of their joint configurations
    let (finite, _) = congestion_game(&game)?;
    let mut best: Option<(Vec<usize>, Q)> = None;
    let tail = n_players - 6;
    for bits in 0..64u32 {
        let mut idx = vec![1usize; n_players];
        for t in 0..6 {
            idx[tail + t] = ((bits >> t) & 1) as usize;
        }
        let cost = finite.social_cost(&Profile::pure(&idx))?;
        match &best {
            Some((_, b)) if *b <= cost => {}
            _ => best = Some((idx, cost)),
        }
    }
    let optimum = Profile::pure(&best.unwrap().0);
    Ok(LowerBoundFamily { game, equilibrium, optimum, alpha })
}

// --- JSON -------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct DelayJson {
    pub a: QStr,
    pub b: QStr,
}

#[derive(Serialize, Deserialize)]
pub struct CongestionJson {
    pub resources: usize,
    pub delays: Vec<DelayJson>,
    pub strategies: Vec<Vec<Vec<usize>>>,
}

pub fn congestion_from_json(spec: &CongestionJson) -> Result<CongestionGame> {
    CongestionGame::new(
        spec.resources,
        spec.delays.iter().map(|d| (d.a.0.clone(), d.b.0.clone())).collect(),
        spec.strategies.clone(),
    )
}

pub fn congestion_to_json(cg: &CongestionGame) -> CongestionJson {
    CongestionJson {
        resources: cg.resources,
        delays: cg
            .delays
            .iter()
            .map(|(a, b)| DelayJson { a: QStr(a.clone()), b: QStr(b.clone()) })
            .collect(),
        strategies: cg.strategies.clone(),
    }
}

// --- Integer fast-path sweep over all small identity games ------------------

/// Exhaustive sweep over every identity-latency game with up to 3 players,
/// 1 or 2 strategies each, over 4 resources. Strategy sets are encoded as
/// one of 120 codes per player: 15 single nonempty subsets, then the 105
/// unordered pairs of distinct nonempty subsets.
pub mod sweep {
    use super::*;
    use rayon::prelude::*;

    pub const CODES: usize = 120;
    pub const RESOURCES: usize = 4;

    /// Strategy masks for a player code: one or two bitmasks over 4
    /// resources.
    pub fn decode_player(code: usize) -> (u8, Option<u8>) {
        debug_assert!(code < CODES);
        if code < 15 {
            return ((code + 1) as u8, None);
        }
        let mut rest = code - 15;
        for first in 1..15u8 {
            let span = 15 - first as usize;
            if rest < span {
                return (first, Some(first + 1 + rest as u8));
            }
            rest -= span;
        }
        unreachable!("pair codes cover 105 values");
    }

    pub fn total_games() -> u64 {
        let c = CODES as u64;
        c + c * c + c * c * c
    }

    /// Player codes of the game at a flat index (1-, 2- then 3-player
    /// games in lexicographic code order).
    pub fn decode_game(index: u64) -> Vec<usize> {
        let c = CODES as u64;
        if index < c {
            return vec![index as usize];
        }
        let index = index - c;
        if index < c * c {
            return vec![(index / c) as usize, (index % c) as usize];
        }
        let index = index - c * c;
        vec![
            (index / (c * c)) as usize,
            ((index / c) % c) as usize,
            (index % c) as usize,
        ]
    }

    /// The same game in the generic representation.
    pub fn game_at(index: u64) -> Result<CongestionGame> {
        let codes = decode_game(index);
        let strategies = codes
            .iter()
            .map(|&code| {
                let (first, second) = decode_player(code);
                let mut out = vec![mask_to_set(first)];
                if let Some(second) = second {
                    out.push(mask_to_set(second));
                }
                out
            })
            .collect();
        CongestionGame::identity(RESOURCES, strategies)
    }

    fn mask_to_set(mask: u8) -> Vec<usize> {
        (0..RESOURCES).filter(|&e| mask >> e & 1 == 1).collect()
    }

    /// Exact minimum of `λ/(1-μ)` over `λ a + μ b_k >= d_k`, `μ < 1`, via
    /// the substituted 2-variable LP in integers. Returns `(num, den)`.
    fn min_bound(a: i64, rows: &[(i64, i64)]) -> (i128, i128) {
        // minimize x subject to a x + (b-d) t >= b, x >= 0, t >= 0
        let mut lines: Vec<(i128, i128, i128)> = rows
            .iter()
            .map(|&(b, d)| (a as i128, (b - d) as i128, b as i128))
            .collect();
        lines.push((1, 0, 0));
        lines.push((0, 1, 0));
        let feasible = |xn: i128, tn: i128, den: i128| {
            lines
                .iter()
                .all(|&(p, qq, r)| p * xn + qq * tn >= r * den)
        };
        let mut best: Option<(i128, i128)> = None;
        for i in 0..lines.len() {
            for j in (i + 1)..lines.len() {
                let (p1, q1, r1) = lines[i];
                let (p2, q2, r2) = lines[j];
                let mut det = p1 * q2 - p2 * q1;
                if det == 0 {
                    continue;
                }
                let mut xn = r1 * q2 - r2 * q1;
                let mut tn = p1 * r2 - p2 * r1;
                if det < 0 {
                    det = -det;
                    xn = -xn;
                    tn = -tn;
                }
                if xn < 0 || tn < 0 || !feasible(xn, tn, det) {
                    continue;
                }
                let better = match best {
                    Some((bn, bd)) => xn * bd < bn * det,
                    None => true,
                };
                if better {
                    best = Some((xn, det));
                }
            }
        }
        best.expect("feasible for a > 0")
    }

    /// Per-game verdicts of the sweep checks.
    #[derive(Clone, Copy, Debug, Default)]
    pub struct GameVerdict {
        /// `(17/5, 2/5)` certificate with the deviation s* on the SCG.
        pub certificate_ok: bool,
        /// exact robust bound <= 17/3
        pub bound_ok: bool,
        /// SCG rest-cost independence of own strategy
        pub independence_ok: bool,
        /// SC-boundedness of the base game
        pub sc_bounded_ok: bool,
        /// optimal `λ/(1-μ)` as an exact fraction
        pub bound: (i128, i128),
    }

    /// Integer fast-path evaluation of one game.
    pub fn evaluate_game(index: u64) -> GameVerdict {
        let codes = decode_game(index);
        let n = codes.len();
        let mut masks: Vec<[u8; 2]> = Vec::with_capacity(n);
        let mut counts: Vec<usize> = Vec::with_capacity(n);
        for &code in &codes {
            let (first, second) = decode_player(code);
            masks.push([first, second.unwrap_or(0)]);
            counts.push(if second.is_some() { 2 } else { 1 });
        }
        let n_profiles: usize = counts.iter().product();
        // per profile: player costs, scg costs, social cost
        let mut social = vec![0i64; n_profiles];
        let mut scg = vec![[0i64; 3]; n_profiles];
        let mut sizes = vec![[0i64; 3]; n_profiles];
        let rank_of = |choice: &[usize]| -> usize {
            let mut r = 0;
            for (i, &k) in choice.iter().enumerate() {
                r = r * counts[i] + k;
            }
            r
        };
        let mut choice = vec![0usize; n];
        loop {
            let r = rank_of(&choice);
            let mut x = [0i64; RESOURCES];
            for i in 0..n {
                let m = masks[i][choice[i]];
                for e in 0..RESOURCES {
                    if m >> e & 1 == 1 {
                        x[e] += 1;
                    }
                }
            }
            let c: i64 = x.iter().map(|&v| v * v).sum();
            social[r] = c;
            for i in 0..n {
                let m = masks[i][choice[i]];
                let mut own = 0i64;
                let mut size = 0i64;
                for e in 0..RESOURCES {
                    if m >> e & 1 == 1 {
                        own += x[e];
                        size += 1;
                    }
                }
                // identity SCG: C̄_i = C - C(∅_i, s_-i) = 2 C_i - |s_i|
                scg[r][i] = 2 * own - size;
                sizes[r][i] = size;
            }
            // lexicographic increment, last player fastest
            let mut pos = n;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] < counts[pos] {
                    break;
                }
                choice[pos] = 0;
            }
            if choice.iter().all(|&k| k == 0) {
                break;
            }
        }
        // optimum: lexicographically-first minimizer
        let mut opt_rank = 0usize;
        for r in 1..n_profiles {
            if social[r] < social[opt_rank] {
                opt_rank = r;
            }
        }
        let opt = social[opt_rank];
        // decode the optimum profile
        let mut opt_choice = vec![0usize; n];
        {
            let mut r = opt_rank;
            for i in (0..n).rev() {
                opt_choice[i] = r % counts[i];
                r /= counts[i];
            }
        }
        // deviation sums and checks
        let mut certificate_ok = true;
        let mut independence_ok = true;
        let mut sc_bounded_ok = true;
        let mut rows: Vec<(i64, i64)> = Vec::with_capacity(n_profiles);
        let mut choice = vec![0usize; n];
        loop {
            let r = rank_of(&choice);
            let mut dev_sum = 0i64;
            for i in 0..n {
                let mut dev = choice.clone();
                dev[i] = opt_choice[i];
                let dr = rank_of(&dev);
                dev_sum += scg[dr][i];
                // SC-bounded: C_i <= C̄_i, i.e. (scg + size)/2 <= scg
                let own = (scg[r][i] + sizes[r][i]) / 2;
                if own > scg[r][i] {
                    sc_bounded_ok = false;
                }
                // independence: C - C̄_i must not depend on own strategy
                if counts[i] == 2 {
                    let mut other = choice.clone();
                    other[i] = 1 - choice[i];
                    let or = rank_of(&other);
                    if social[r] - scg[r][i] != social[or] - scg[or][i] {
                        independence_ok = false;
                    }
                }
            }
            if 5 * dev_sum > 17 * opt + 2 * social[r] {
                certificate_ok = false;
            }
            rows.push((social[r], dev_sum));
            let mut pos = n;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] < counts[pos] {
                    break;
                }
                choice[pos] = 0;
            }
            if choice.iter().all(|&k| k == 0) {
                break;
            }
        }
        let bound = min_bound(opt, &rows);
        let bound_ok = 3 * bound.0 <= 17 * bound.1;
        GameVerdict { certificate_ok, bound_ok, independence_ok, sc_bounded_ok, bound }
    }

    #[derive(Clone, Copy, Debug, Default)]
    pub struct SweepStats {
        pub games: u64,
        pub certificate_failures: u64,
        pub bound_failures: u64,
        pub independence_failures: u64,
        pub sc_bounded_failures: u64,
        /// max over games of the exact robust bound
        pub max_bound: (i128, i128),
    }

    impl SweepStats {
        fn merge(mut self, other: SweepStats) -> SweepStats {
            self.games += other.games;
            self.certificate_failures += other.certificate_failures;
            self.bound_failures += other.bound_failures;
            self.independence_failures += other.independence_failures;
            self.sc_bounded_failures += other.sc_bounded_failures;
            if other.max_bound.0 * self.max_bound.1 > self.max_bound.0 * other.max_bound.1 {
                self.max_bound = other.max_bound;
            }
            self
        }

        fn from_verdict(v: GameVerdict) -> SweepStats {
            SweepStats {
                games: 1,
                certificate_failures: (!v.certificate_ok) as u64,
                bound_failures: (!v.bound_ok) as u64,
                independence_failures: (!v.independence_ok) as u64,
                sc_bounded_failures: (!v.sc_bounded_ok) as u64,
                max_bound: v.bound,
            }
        }
    }

    /// Runs the full 1.74M-game sweep in parallel.
    pub fn run() -> SweepStats {
        (0..total_games())
            .into_par_iter()
            .map(|idx| SweepStats::from_verdict(evaluate_game(idx)))
            .reduce(
                || SweepStats { max_bound: (0, 1), ..SweepStats::default() },
                SweepStats::merge,
            )
    }
}
