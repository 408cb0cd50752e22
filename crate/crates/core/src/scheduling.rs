//! Min-sum machine scheduling games: Smith's rule, weighted completion
//! times, the weight condition, mean-flow-time scheduling and the
//! weight-0 price-of-anarchy counterexample family.
//!
//! Machines process their jobs in nondecreasing order of the Smith ratio
//! `ρ_ij = p_ij / w_j` (jobs of weight 0 get `ρ = +inf` and run last),
//! ties broken by job index. The social cost is `Σ_j w_j C_j`.

use std::cmp::Ordering;
use std::sync::Arc;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{
    Choice, DefaultStrategy, DefaultStrategyMap, Evaluator, FiniteGame, Orientation, Profile,
};
use crate::rational::{parse_q, Q, QStr};
use crate::smoothness::{Flavor, SBar, SmoothnessCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Environment {
    /// Unrelated machines: arbitrary `p_ij`.
    R,
    /// Uniformly related machines: `p_ij = p_j / s_i`.
    Q,
    /// Identical machines: `p_ij = p_j`.
    P,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchedulingInstance {
    env: Environment,
    m: usize,
    n: usize,
    /// `p[i][j]`: processing time of job j on machine i.
    p: Vec<Vec<Q>>,
    weights: Vec<Q>,
    speeds: Option<Vec<Q>>,
    /// Job sizes for Q/P environments (machine-independent part).
    sizes: Option<Vec<Q>>,
}

impl SchedulingInstance {
    /// Unrelated machines from an m-by-n processing-time matrix.
    pub fn unrelated(p: Vec<Vec<Q>>, weights: Vec<Q>) -> Result<Self> {
        let m = p.len();
        if m == 0 {
            return Err(Error::Parameter("need at least one machine".into()));
        }
        let n = p[0].len();
        if n == 0 || p.iter().any(|row| row.len() != n) {
            return Err(Error::Parameter("processing-time matrix must be rectangular".into()));
        }
        if p.iter().flatten().any(|v| !v.is_positive()) {
            return Err(Error::Parameter("processing times must be positive".into()));
        }
        if weights.len() != n || weights.iter().any(|w| w.is_negative()) {
            return Err(Error::Parameter("need one nonnegative weight per job".into()));
        }
        Ok(SchedulingInstance { env: Environment::R, m, n, p, weights, speeds: None, sizes: None })
    }

    /// Uniformly related machines: job sizes plus machine speeds.
    pub fn related(sizes: Vec<Q>, speeds: Vec<Q>, weights: Vec<Q>) -> Result<Self> {
        if speeds.iter().any(|s| !s.is_positive()) {
            return Err(Error::Parameter("speeds must be positive".into()));
        }
        let p: Vec<Vec<Q>> = speeds.iter().map(|s| sizes.iter().map(|pj| pj / s).collect()).collect();
        let mut inst = SchedulingInstance::unrelated(p, weights)?;
        inst.env = Environment::Q;
        inst.speeds = Some(speeds);
        inst.sizes = Some(sizes);
        Ok(inst)
    }

    /// Identical machines: every machine runs job j in `sizes[j]`.
    pub fn identical(m: usize, sizes: Vec<Q>, weights: Vec<Q>) -> Result<Self> {
        let p: Vec<Vec<Q>> = (0..m).map(|_| sizes.clone()).collect();
        let mut inst = SchedulingInstance::unrelated(p, weights)?;
        inst.env = Environment::P;
        inst.speeds = Some(vec![Q::one(); m]);
        inst.sizes = Some(sizes);
        Ok(inst)
    }

    pub fn env(&self) -> Environment {
        self.env
    }

    pub fn machines(&self) -> usize {
        self.m
    }

    pub fn jobs(&self) -> usize {
        self.n
    }

    pub fn processing(&self, machine: usize, job: usize) -> &Q {
        &self.p[machine][job]
    }

    pub fn weight(&self, job: usize) -> &Q {
        &self.weights[job]
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn sizes(&self) -> Option<&[Q]> {
        self.sizes.as_deref()
    }

    /// Smith-order comparison of jobs `j`, `k` on `machine`: by
    /// `ρ = p/w` ascending with `ρ = +inf` for weight 0, ties by index.
    pub fn smith_cmp(&self, machine: usize, j: usize, k: usize) -> Ordering {
        let wj_zero = self.weights[j].is_zero();
        let wk_zero = self.weights[k].is_zero();
        let by_rho = match (wj_zero, wk_zero) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => {
                // p_j/w_j vs p_k/w_k by cross-multiplication
                (&self.p[machine][j] * &self.weights[k])
                    .cmp(&(&self.p[machine][k] * &self.weights[j]))
            }
        };
        by_rho.then(j.cmp(&k))
    }

    /// Plain `ρ` comparison with no index tie-break (weight-0 infinities
    /// compare equal).
    fn rho_cmp(&self, machine: usize, j: usize, k: usize) -> Ordering {
        let wj_zero = self.weights[j].is_zero();
        let wk_zero = self.weights[k].is_zero();
        match (wj_zero, wk_zero) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (&self.p[machine][j] * &self.weights[k])
                .cmp(&(&self.p[machine][k] * &self.weights[j])),
        }
    }

    /// Restricted machine sets via the big-M encoding: forbidden entries
    /// get processing time `1 + Σ_k max_i p_ik`, which exceeds any
    /// achievable completion time, so no job ever gains by using a
    /// forbidden machine.
    pub fn with_restrictions(&self, allowed: &[Vec<bool>]) -> Result<SchedulingInstance> {
        if allowed.len() != self.n || allowed.iter().any(|row| row.len() != self.m) {
            return Err(Error::Parameter("restriction matrix must be n-by-m".into()));
        }
        if allowed.iter().any(|row| row.iter().all(|&a| !a)) {
            return Err(Error::Parameter("every job needs at least one allowed machine".into()));
        }
        let big_m = self.big_m();
        let mut p = self.p.clone();
        for (j, row) in allowed.iter().enumerate() {
            for (i, &ok) in row.iter().enumerate() {
                if !ok {
                    p[i][j] = big_m.clone();
                }
            }
        }
        SchedulingInstance::unrelated(p, self.weights.clone())
    }

    /// The forbidden-machine processing time: `1 + Σ_k max_i p_ik`.
    pub fn big_m(&self) -> Q {
        let mut total = Q::one();
        for j in 0..self.n {
            let max = (0..self.m).map(|i| self.p[i][j].clone()).max().unwrap();
            total += max;
        }
        total
    }
}

/// Per-job machine assignment; `None` = the job is not scheduled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule(pub Vec<Option<usize>>);

impl Schedule {
    pub fn from_wire(entries: &[i64]) -> Result<Self> {
        entries
            .iter()
            .map(|&e| match e {
                -1 => Ok(None),
                e if e >= 0 => Ok(Some(e as usize)),
                e => Err(Error::Parse(format!("invalid machine index {e}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Schedule)
    }

    pub fn to_wire(&self) -> Vec<i64> {
        self.0.iter().map(|e| e.map_or(-1, |i| i as i64)).collect()
    }

    pub fn to_profile(&self) -> Profile {
        Profile(
            self.0
                .iter()
                .map(|e| e.map_or(Choice::Default, Choice::Play))
                .collect(),
        )
    }

    pub fn from_profile(profile: &Profile) -> Self {
        Schedule(
            profile
                .0
                .iter()
                .map(|c| match c {
                    Choice::Play(i) => Some(*i),
                    Choice::Default => None,
                })
                .collect(),
        )
    }
}

/// The jobs of `jobset` in the order `machine` processes them.
pub fn machine_order(inst: &SchedulingInstance, machine: usize, jobset: &[usize]) -> Vec<usize> {
    let mut jobs = jobset.to_vec();
    jobs.sort_by(|&j, &k| inst.smith_cmp(machine, j, k));
    jobs
}

/// Completion time of every job; unscheduled jobs complete at 0.
pub fn completion_times(inst: &SchedulingInstance, x: &Schedule) -> Result<Vec<Q>> {
    if x.0.len() != inst.n {
        return Err(Error::Parameter("schedule length != job count".into()));
    }
    if x.0.iter().flatten().any(|&i| i >= inst.m) {
        return Err(Error::Parameter("machine index out of range".into()));
    }
    let mut out = vec![Q::zero(); inst.n];
    for machine in 0..inst.m {
        let jobs: Vec<usize> =
            (0..inst.n).filter(|&j| x.0[j] == Some(machine)).collect();
        let order = machine_order(inst, machine, &jobs);
        let mut clock = Q::zero();
        for j in order {
            clock += &inst.p[machine][j];
            out[j] = clock.clone();
        }
    }
    Ok(out)
}

/// `C(x) = Σ_j w_j C_j(x)`.
pub fn weighted_social_cost(inst: &SchedulingInstance, x: &Schedule) -> Result<Q> {
    let times = completion_times(inst, x)?;
    Ok(times.iter().zip(&inst.weights).map(|(c, w)| c * w).sum())
}

/// Checks `ρ_ij <= ρ_ik  =>  w_j <= w_k` over all machines and job pairs;
/// returns the first violating `(machine, j, k)`.
pub fn check_weight_condition(inst: &SchedulingInstance) -> Option<(usize, usize, usize)> {
    for i in 0..inst.m {
        for j in 0..inst.n {
            for k in 0..inst.n {
                if j == k {
                    continue;
                }
                if inst.rho_cmp(i, j, k) != Ordering::Greater
                    && inst.weights[j] > inst.weights[k]
                {
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

struct SchedulingEval {
    inst: SchedulingInstance,
}

impl SchedulingEval {
    fn schedule(profile: &Profile) -> Schedule {
        Schedule::from_profile(profile)
    }
}

impl Evaluator for SchedulingEval {
    fn n_players(&self) -> usize {
        self.inst.n
    }

    fn player_cost(&self, j: usize, profile: &Profile) -> Q {
        let x = SchedulingEval::schedule(profile);
        let Some(machine) = x.0[j] else { return Q::zero() };
        // only j's machine matters
        let jobs: Vec<usize> =
            (0..self.inst.n).filter(|&k| x.0[k] == Some(machine)).collect();
        let order = machine_order(&self.inst, machine, &jobs);
        let mut clock = Q::zero();
        for k in order {
            clock += &self.inst.p[machine][k];
            if k == j {
                return clock;
            }
        }
        unreachable!("job is on its own machine");
    }

    fn social_cost(&self, profile: &Profile) -> Q {
        weighted_social_cost(&self.inst, &SchedulingEval::schedule(profile))
            .expect("profile validated by the game")
    }

    fn all_player_costs(&self, profile: &Profile) -> Vec<Q> {
        completion_times(&self.inst, &SchedulingEval::schedule(profile))
            .expect("profile validated by the game")
    }

    fn supports_default(&self, _j: usize) -> bool {
        true
    }
}

/// The scheduling game: jobs are players, strategies are machines, player
/// cost is the completion time, social cost is `Σ_j w_j C_j`; the default
/// strategy leaves the job unscheduled.
pub fn scheduling_game(inst: &SchedulingInstance) -> Result<(FiniteGame, DefaultStrategyMap)> {
    let n = inst.n;
    let counts = vec![inst.m; n];
    let unit_weights = inst.weights.iter().all(|w| w.is_one());
    let eval = Arc::new(SchedulingEval { inst: inst.clone() });
    let mut game =
        FiniteGame::new(counts, Orientation::Minimize, eval)?.with_sum_bounded(unit_weights);
    // zero job weights are valid here but not as game weights
    if inst.weights.iter().all(|w| w.is_positive()) {
        game = game.with_weights(inst.weights.clone())?;
    }
    Ok((game, DefaultStrategyMap::new(vec![DefaultStrategy::Native; n])))
}

/// The two-relaxation inequality used by the weight-condition theorem:
/// `Σ_i Σ_{j∈X*_i} w_j p_ij + Σ_i Σ_{j∈X*_i} Σ_{k∈X_i} w_j w_k min{ρ_ij, ρ_ik}
///  <= 2 C(x*) + ½ C(x)`.
pub fn cole_inequality_check(
    inst: &SchedulingInstance,
    x: &Schedule,
    xstar: &Schedule,
) -> Result<bool> {
    let mut lhs = Q::zero();
    for i in 0..inst.m {
        let star_jobs: Vec<usize> =
            (0..inst.n).filter(|&j| xstar.0[j] == Some(i)).collect();
        let x_jobs: Vec<usize> = (0..inst.n).filter(|&k| x.0[k] == Some(i)).collect();
        for &j in &star_jobs {
            lhs += &inst.weights[j] * &inst.p[i][j];
            if inst.weights[j].is_zero() {
                continue;
            }
            for &k in &x_jobs {
                if inst.weights[k].is_zero() {
                    continue;
                }
                // w_j w_k min{p_ij/w_j, p_ik/w_k} = min{p_ij w_k, p_ik w_j}
                let a = &inst.p[i][j] * &inst.weights[k];
                let b = &inst.p[i][k] * &inst.weights[j];
                lhs += a.min(b);
            }
        }
    }
    let rhs = crate::rational::qi(2) * weighted_social_cost(inst, xstar)?
        + crate::rational::q(1, 2) * weighted_social_cost(inst, x)?;
    Ok(lhs <= rhs)
}

/// Mean-flow-time list scheduling for identical or uniformly related
/// machines: repeatedly place the longest remaining job on the machine
/// minimizing `(h_i + 1)/s_i` (ties: lowest machine index).
pub fn mft_schedule(inst: &SchedulingInstance) -> Result<Schedule> {
    let sizes = match inst.env {
        Environment::R => {
            return Err(Error::Unsupported(
                "mean-flow-time scheduling needs identical or related machines".into(),
            ));
        }
        _ => inst.sizes.as_ref().expect("Q/P instances carry sizes"),
    };
    let speeds = inst.speeds.as_ref().expect("Q/P instances carry speeds");
    // longest first; ties by job index for determinism
    let mut jobs: Vec<usize> = (0..inst.n).collect();
    jobs.sort_by(|&j, &k| sizes[k].cmp(&sizes[j]).then(j.cmp(&k)));
    let mut counts = vec![0usize; inst.m];
    let mut assignment = vec![None; inst.n];
    for j in jobs {
        let mut best = 0usize;
        for i in 1..inst.m {
            // (h_i + 1)/s_i < (h_best + 1)/s_best by cross-multiplication
            let lhs = crate::rational::qu(counts[i] + 1) * &speeds[best];
            let rhs = crate::rational::qu(counts[best] + 1) * &speeds[i];
            if lhs < rhs {
                best = i;
            }
        }
        counts[best] += 1;
        assignment[j] = Some(best);
    }
    Ok(Schedule(assignment))
}

/// The closed-form optimum for unit-weight identical machines with sizes
/// sorted nondecreasing: `Σ_j p_j (1 + ⌊(n-j)/m⌋)` (1-based j).
pub fn optimal_cost_closed_form(sorted_sizes: &[Q], m: usize) -> Result<Q> {
    if sorted_sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Parameter("sizes must be sorted nondecreasing".into()));
    }
    let n = sorted_sizes.len();
    let mut total = Q::zero();
    for (idx, pj) in sorted_sizes.iter().enumerate() {
        let j = idx + 1;
        total += pj * crate::rational::qu(1 + (n - j) / m);
    }
    Ok(total)
}

/// `Σ_j E[C_j(x̄_j, x_{-j})]` for the uniformly random single-machine
/// deviation `x̄`, by the closed form `(1/m) Σ_j p_j (m + n - j)`
/// (identical machines, sizes sorted nondecreasing; independent of `x`).
pub fn uniform_mixed_cost(inst: &SchedulingInstance) -> Result<Q> {
    if inst.env != Environment::P {
        return Err(Error::Unsupported("uniform mixed cost needs identical machines".into()));
    }
    let sizes = inst.sizes.as_ref().unwrap();
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Parameter("sizes must be sorted nondecreasing".into()));
    }
    if !inst.weights.iter().all(|w| w.is_one()) {
        return Err(Error::Unsupported("uniform mixed cost needs unit weights".into()));
    }
    let n = inst.n;
    let mut total = Q::zero();
    for (idx, pj) in sizes.iter().enumerate() {
        let j = idx + 1;
        total += pj * crate::rational::qu(inst.m + n - j);
    }
    Ok(total / crate::rational::qu(inst.m))
}

/// The same expectation evaluated directly:
/// `Σ_j (1/m) Σ_i C_j((i, x_{-j}))`.
pub fn uniform_mixed_cost_direct(inst: &SchedulingInstance, x: &Schedule) -> Result<Q> {
    let mut total = Q::zero();
    for j in 0..inst.n {
        for i in 0..inst.m {
            let mut dev = x.clone();
            dev.0[j] = Some(i);
            total += &completion_times(inst, &dev)?[j];
        }
    }
    Ok(total / crate::rational::qu(inst.m))
}

/// `(1/2 - 1/(2m)) Σ p_j >= Σ_{j=1..m} ((m-j)/m) p_j` for sorted input of
/// length m.
pub fn linear_weights_inequality(sorted_sizes: &[Q], m: usize) -> Result<bool> {
    if sorted_sizes.len() != m {
        return Err(Error::Parameter("need exactly m sizes".into()));
    }
    if sorted_sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Parameter("sizes must be sorted nondecreasing".into()));
    }
    let sum: Q = sorted_sizes.iter().cloned().sum();
    let lhs = (crate::rational::q(1, 2) - Q::new(1.into(), (2 * m as i64).into())) * sum;
    let mut rhs = Q::zero();
    for (idx, pj) in sorted_sizes.iter().enumerate() {
        let j = idx + 1;
        rhs += pj * Q::new(((m - j) as i64).into(), (m as i64).into());
    }
    Ok(lhs >= rhs)
}

/// Mixed-deviation smoothness certificate for unit-weight identical
/// machines: the uniform deviation `x̄` satisfies
/// `Σ_j E[C_j(x̄_j, x_{-j})] <= C(x*) + (1/2 - 1/(2m)) Σ p_j` for every x,
/// and `Σ p_j <= C(x*)` folds the constant term, giving the
/// `(3/2 - 1/(2m), 0)` certificate with robust PoA `3/2 - 1/(2m)`.
pub fn rpoa_p_certificate(inst: &SchedulingInstance) -> Result<SmoothnessCertificate> {
    if inst.env != Environment::P {
        return Err(Error::Unsupported("certificate needs identical machines".into()));
    }
    let sizes = inst.sizes.as_ref().unwrap();
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Parameter("sizes must be sorted nondecreasing".into()));
    }
    if !inst.weights.iter().all(|w| w.is_one()) {
        return Err(Error::Unsupported("certificate needs unit weights".into()));
    }
    let m = inst.m;
    let opt_schedule = mft_schedule(inst)?;
    let opt = weighted_social_cost(inst, &opt_schedule)?;
    let closed = optimal_cost_closed_form(sizes, m)?;
    if opt != closed {
        return Err(Error::Evaluation(
            "mean-flow-time cost disagrees with the closed form".into(),
        ));
    }
    let sum: Q = sizes.iter().cloned().sum();
    let mixed = uniform_mixed_cost(inst)?;
    let slack = (crate::rational::q(1, 2) - Q::new(1.into(), (2 * m as i64).into())) * &sum;
    if mixed > &opt + &slack {
        return Err(Error::Evaluation("mixed deviation bound violated".into()));
    }
    if sum > opt {
        return Err(Error::Evaluation("total size exceeds the optimum cost".into()));
    }
    let lambda =
        crate::rational::q(3, 2) - Q::new(1.into(), (2 * m as i64).into());
    let uniform: Vec<(Choice, Q)> = (0..m)
        .map(|i| (Choice::Play(i), Q::new(1.into(), (m as i64).into())))
        .collect();
    Ok(SmoothnessCertificate {
        lambda,
        mu: Q::zero(),
        sbar: SBar::Mixed(vec![uniform; inst.n]),
        sstar: opt_schedule.to_profile(),
        flavor: Flavor::Base,
    })
}

/// The weight-0 lower-bound family: m unit-size weight-1 jobs, m(m-1)
/// unit-size weight-0 jobs on m identical machines. The caring matrix has
/// every weight-1 job fully caring about every weight-0 job. `x` piles
/// the weight-1 jobs on machine 0 with the weight-0 jobs dealt
/// round-robin across machines 1..m; `x*` spreads the weight-1 jobs one
/// per machine. `C(x)/C(x*) = (m+1)/2`.
pub fn weight_counterexample(
    m: usize,
) -> Result<(SchedulingInstance, crate::game::FriendshipMatrix, Schedule, Schedule)> {
    if m < 2 {
        return Err(Error::Parameter("need at least two machines".into()));
    }
    let n = m + m * (m - 1);
    let sizes = vec![Q::one(); n];
    let weights: Vec<Q> = (0..n).map(|j| if j < m { Q::one() } else { Q::zero() }).collect();
    let inst = SchedulingInstance::identical(m, sizes, weights)?;
    let rows: Vec<Vec<Q>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    if j == k || (j < m && k >= m) {
                        Q::one()
                    } else {
                        Q::zero()
                    }
                })
                .collect()
        })
        .collect();
    let alpha = crate::game::FriendshipMatrix::new(rows)?;
    let mut x = vec![None; n];
    let mut xstar = vec![None; n];
    for j in 0..m {
        x[j] = Some(0);
        xstar[j] = Some(j);
    }
    for k in m..n {
        let t = k - m;
        let machine = 1 + t % (m - 1);
        x[k] = Some(machine);
        xstar[k] = Some(machine);
    }
    Ok((inst, alpha, Schedule(x), Schedule(xstar)))
}

/// Random unrelated-machines instance whose weight order agrees with every
/// machine's processing-time-per-weight order: strictly increasing weights
/// paired with strictly increasing per-machine ratios.
pub fn random_weight_condition_instance<R: rand::Rng>(rng: &mut R) -> SchedulingInstance {
    let m = rng.gen_range(2..=3usize);
    let n = rng.gen_range(2..=4usize);
    let mut w = Q::zero();
    let weights: Vec<Q> = (0..n)
        .map(|_| {
            w += crate::rational::q(rng.gen_range(1..4), rng.gen_range(1..3));
            w.clone()
        })
        .collect();
    let p: Vec<Vec<Q>> = (0..m)
        .map(|_| {
            let mut rho = Q::zero();
            weights
                .iter()
                .map(|w| {
                    rho += crate::rational::q(rng.gen_range(1..4), rng.gen_range(1..3));
                    &rho * w
                })
                .collect()
        })
        .collect();
    SchedulingInstance::unrelated(p, weights).expect("positive data")
}

// --- JSON ---------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ProcessingJson {
    Matrix(Vec<Vec<String>>),
    Sizes(Vec<String>),
}

#[derive(Serialize, Deserialize)]
pub struct SchedulingJson {
    pub env: Environment,
    pub m: usize,
    pub n: usize,
    p: ProcessingJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speeds: Option<Vec<QStr>>,
    pub weights: Vec<QStr>,
}

pub fn instance_from_json(spec: &SchedulingJson) -> Result<SchedulingInstance> {
    let weights: Vec<Q> = spec.weights.iter().map(|w| w.0.clone()).collect();
    let inst = match (&spec.p, spec.env) {
        (ProcessingJson::Matrix(rows), Environment::R) => {
            let p = rows
                .iter()
                .map(|row| row.iter().map(|v| parse_q(v)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            SchedulingInstance::unrelated(p, weights)?
        }
        (ProcessingJson::Sizes(sizes), Environment::Q) => {
            let sizes = sizes.iter().map(|v| parse_q(v)).collect::<Result<Vec<_>>>()?;
            let speeds = spec
                .speeds
                .as_ref()
                .ok_or_else(|| Error::Parse("related machines need speeds".into()))?
                .iter()
                .map(|s| s.0.clone())
                .collect();
            SchedulingInstance::related(sizes, speeds, weights)?
        }
        (ProcessingJson::Sizes(sizes), Environment::P) => {
            let sizes = sizes.iter().map(|v| parse_q(v)).collect::<Result<Vec<_>>>()?;
            SchedulingInstance::identical(spec.m, sizes, weights)?
        }
        _ => {
            return Err(Error::Parse(
                "R needs a p matrix; Q/P need a size list".into(),
            ));
        }
    };
    if inst.machines() != spec.m || inst.jobs() != spec.n {
        return Err(Error::Parse("declared m/n disagree with the data".into()));
    }
    Ok(inst)
}

pub fn instance_to_json(inst: &SchedulingInstance) -> SchedulingJson {
    let p = match inst.env {
        Environment::R => ProcessingJson::Matrix(
            inst.p
                .iter()
                .map(|row| row.iter().map(crate::rational::format_q).collect())
                .collect(),
        ),
        _ => ProcessingJson::Sizes(
            inst.sizes
                .as_ref()
                .unwrap()
                .iter()
                .map(crate::rational::format_q)
                .collect(),
        ),
    };
    SchedulingJson {
        env: inst.env,
        m: inst.m,
        n: inst.n,
        p,
        speeds: match inst.env {
            Environment::Q => {
                inst.speeds.as_ref().map(|s| s.iter().map(|v| QStr(v.clone())).collect())
            }
            _ => None,
        },
        weights: inst.weights.iter().map(|w| QStr(w.clone())).collect(),
    }
}
