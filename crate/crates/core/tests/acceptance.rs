//! End-to-end acceptance checks. Each test prints one `criterion N:
//! PASS/FAIL` line (visible with `--nocapture`) before asserting, so a red
//! run still reports every verdict it reached.

use std::time::{Duration, Instant};

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scg::auction::{
    altruism_poa2_certificate, auction_game, friendship_coarse_poa_check, tight_example, Auction,
    Pricing,
};
use scg::congestion::{bilo_inequality, congestion_game, lower_bound_family, sweep};
use scg::equilibria::{
    enumerate_pure_nash, expected_social_cost, is_coarse_equilibrium, is_pure_nash, pure_poa,
    social_optimum, PoaOutcome,
};
use scg::game::{
    altruistic_extension, friendship_extension, AltruismVector, FiniteSupportDistribution,
    FriendshipMatrix, DEFAULT_BUDGET,
};
use scg::rational::{q, qi, Q};
use scg::scheduling::{
    check_weight_condition, cole_inequality_check, mft_schedule, optimal_cost_closed_form,
    random_weight_condition_instance, scheduling_game, uniform_mixed_cost,
    uniform_mixed_cost_direct, weight_counterexample, weighted_social_cost, Schedule,
    SchedulingInstance,
};
use scg::smoothness::{
    check_altruism_independence_identity, check_smoothness_altruistic, check_strongly_sc_bounded,
    corresponding_scg, reduction_transfer_check, Flavor, SBar, SmoothnessCertificate,
    SmoothnessParams,
};
use scg::utility::{check_valid_utility, random_coverage_game, utility_poa2_certificate};
use scg::{FiniteGame, Profile};

fn verdict(n: usize, pass: bool) {
    println!("criterion {n}: {}", if pass { "PASS" } else { "FAIL" });
}

fn seed(n: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xacce_0000 + n)
}

fn rq(rng: &mut ChaCha8Rng) -> Q {
    q(rng.gen_range(1..9), rng.gen_range(1..4))
}

/// All complete m-machine assignments of n jobs.
fn all_schedules(m: usize, n: usize) -> Vec<Schedule> {
    let mut out = Vec::with_capacity(m.pow(n as u32));
    let mut asg = vec![0usize; n];
    loop {
        out.push(Schedule(asg.iter().map(|&i| Some(i)).collect()));
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            asg[k] += 1;
            if asg[k] < m {
                break;
            }
            asg[k] = 0;
            k += 1;
        }
    }
}

fn brute_force_opt(inst: &SchedulingInstance) -> Q {
    all_schedules(inst.machines(), inst.jobs())
        .iter()
        .map(|x| weighted_social_cost(inst, x).unwrap())
        .min()
        .unwrap()
}

fn random_friendship(rng: &mut ChaCha8Rng, n: usize) -> FriendshipMatrix {
    let rows: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Q::one() } else { q(rng.gen_range(0..4), 3) })
                .collect()
        })
        .collect();
    FriendshipMatrix::new(rows).unwrap()
}

fn random_altruism(rng: &mut ChaCha8Rng, n: usize, extended: bool) -> AltruismVector {
    let hi = if extended { 8 } else { 3 };
    let values: Vec<Q> = (0..n).map(|_| q(rng.gen_range(0..=hi), 3)).collect();
    if extended {
        AltruismVector::new_extended(values)
    } else {
        AltruismVector::new(values).unwrap()
    }
}

#[test]
fn criterion_01_congestion_lower_bound_family() {
    let t = Instant::now();
    let mut pass = true;
    let mut ratio_at_50 = Q::zero();
    for &n in &[0usize, 5, 20, 50] {
        let fam = lower_bound_family(n).unwrap();
        let (game, _) = congestion_game(&fam.game).unwrap();
        let ext = friendship_extension(&game, &fam.alpha).unwrap();
        pass &= is_pure_nash(&ext, None, &fam.equilibrium).unwrap().is_none();
        let cx = game.social_cost(&fam.equilibrium).unwrap();
        pass &= cx == qi(17 * n as i64 + 45);
        let copt = game.social_cost(&fam.optimum).unwrap();
        let expect = if n == 0 { qi(29) } else { qi(3 * n as i64 + 33) };
        pass &= copt == expect;
        if n <= 2 {
            let (_, opt) = social_optimum(&game, DEFAULT_BUDGET).unwrap();
            pass &= opt == copt;
        }
        if n == 50 {
            ratio_at_50 = &cx / &copt;
        }
    }
    let exceeds = ratio_at_50 > q(27, 5);
    verdict(1, pass && exceeds);
    assert!(pass, "family invariants failed");
    assert!(
        exceeds,
        "ratio at n = 50 is {ratio_at_50}, not above 27/5; the family needs n ≈ 174 to cross it"
    );
    assert!(t.elapsed() < Duration::from_secs(10));
}

#[test]
fn criterion_02_cubic_inequality() {
    let t = Instant::now();
    let pass = (0..=100u64).all(|a| (0..=100u64).all(|b| bilo_inequality(a, b)));
    verdict(2, pass);
    assert!(pass);
    assert!(t.elapsed() < Duration::from_secs(1));
}

#[test]
fn criterion_03_congestion_smoothness_sweep() {
    let t = Instant::now();
    let stats = sweep::run();
    let (num, den) = stats.max_bound;
    let pass = stats.games == sweep::total_games()
        && stats.certificate_failures == 0
        && stats.bound_failures == 0
        && 3 * num <= 17 * den;
    verdict(3, pass);
    assert!(pass, "sweep stats: {stats:?}");
    assert!(t.elapsed() < Duration::from_secs(60));
}

#[test]
fn criterion_04_weighted_scheduling_chain() {
    let t = Instant::now();
    let mut rng = seed(4);
    let mut pass = true;
    for _ in 0..200 {
        let inst = random_weight_condition_instance(&mut rng);
        pass &= check_weight_condition(&inst).is_none();
        let schedules = all_schedules(inst.machines(), inst.jobs());
        for x in &schedules {
            for xstar in &schedules {
                pass &= cole_inequality_check(&inst, x, xstar).unwrap();
            }
        }
        let (game, defaults) = scheduling_game(&inst).unwrap();
        pass &= check_strongly_sc_bounded(&game, &defaults, inst.weights(), DEFAULT_BUDGET)
            .unwrap()
            .is_none();
    }
    verdict(4, pass);
    assert!(pass);
    assert!(t.elapsed() < Duration::from_secs(120));
}

#[test]
fn criterion_05_mft_optimality() {
    let t = Instant::now();
    let mut rng = seed(5);
    let mut pass = true;
    for trial in 0..500 {
        let m = rng.gen_range(2..=3usize);
        let n = rng.gen_range(2..=6usize);
        let mut sizes: Vec<Q> = (0..n).map(|_| rq(&mut rng)).collect();
        sizes.sort();
        let weights = vec![Q::one(); n];
        let inst = if trial % 2 == 0 {
            SchedulingInstance::identical(m, sizes.clone(), weights).unwrap()
        } else {
            let speeds: Vec<Q> = (0..m).map(|_| rq(&mut rng)).collect();
            SchedulingInstance::related(sizes.clone(), speeds, weights).unwrap()
        };
        let mft = mft_schedule(&inst).unwrap();
        let cost = weighted_social_cost(&inst, &mft).unwrap();
        pass &= cost == brute_force_opt(&inst);
        if trial % 2 == 0 {
            pass &= cost == optimal_cost_closed_form(&sizes, m).unwrap();
        }
    }
    verdict(5, pass);
    assert!(pass);
    assert!(t.elapsed() < Duration::from_secs(60));
}

#[test]
fn criterion_06_mixed_deviation_independence() {
    let t = Instant::now();
    let mut rng = seed(6);
    let mut pass = true;
    for _ in 0..100 {
        let m = rng.gen_range(2..=3usize);
        let n = rng.gen_range(2..=6usize);
        let mut sizes: Vec<Q> = (0..n).map(|_| rq(&mut rng)).collect();
        sizes.sort();
        let inst = SchedulingInstance::identical(m, sizes, vec![Q::one(); n]).unwrap();
        let closed = uniform_mixed_cost(&inst).unwrap();
        for _ in 0..5 {
            let x = Schedule((0..n).map(|_| Some(rng.gen_range(0..m))).collect());
            pass &= uniform_mixed_cost_direct(&inst, &x).unwrap() == closed;
        }
    }
    verdict(6, pass);
    assert!(pass);
    assert!(t.elapsed() < Duration::from_secs(30));
}

#[test]
fn criterion_07_mixed_lower_bound() {
    let t = Instant::now();
    let mut pass = true;
    for &m in &[2usize, 4, 8] {
        let ones = vec![Q::one(); m];
        let inst = SchedulingInstance::identical(m, ones.clone(), ones.clone()).unwrap();
        let mixed = uniform_mixed_cost(&inst).unwrap();
        pass &= mixed == q(3 * m as i64 - 1, 2);
        let opt = optimal_cost_closed_form(&ones, m).unwrap();
        pass &= opt == qi(m as i64);
        pass &= &mixed / &opt == q(3, 2) - q(1, 2 * m as i64);
    }
    // exhaustive additive bound on the instances small enough to enumerate
    for &m in &[2usize, 3] {
        let ones = vec![Q::one(); m];
        let inst = SchedulingInstance::identical(m, ones, vec![Q::one(); m]).unwrap();
        let opt = brute_force_opt(&inst);
        let slack = (q(1, 2) - q(1, 2 * m as i64)) * qi(m as i64);
        let bound = &opt + &slack;
        for x in all_schedules(m, m) {
            pass &= uniform_mixed_cost_direct(&inst, &x).unwrap() <= bound;
        }
    }
    verdict(7, pass);
    assert!(pass);
    assert!(t.elapsed() < Duration::from_secs(60));
}

/// Nondecreasing size vectors over a small value grid.
fn size_multisets(n: usize, values: &[i64]) -> Vec<Vec<Q>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        if idx.windows(2).all(|w| w[0] <= w[1]) {
            out.push(idx.iter().map(|&v| qi(values[v])).collect());
        }
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            idx[k] += 1;
            if idx[k] < values.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[test]
fn criterion_08_friendship_factor_two() {
    let t = Instant::now();
    let mut rng = seed(8);
    let mut pass = true;
    for m in 2..=3usize {
        for n in 2..=4usize {
            let grids = if n < 4 { size_multisets(n, &[1, 2, 3]) } else { size_multisets(n, &[1, 2]) };
            for sizes in grids {
                let inst =
                    SchedulingInstance::identical(m, sizes, vec![Q::one(); n]).unwrap();
                let (game, _) = scheduling_game(&inst).unwrap();
                let (_, opt) = social_optimum(&game, DEFAULT_BUDGET).unwrap();
                let bound = qi(2) * &opt;
                for _ in 0..20 {
                    let alpha = random_friendship(&mut rng, n);
                    let ext = friendship_extension(&game, &alpha).unwrap();
                    for nash in enumerate_pure_nash(&ext, None, DEFAULT_BUDGET).unwrap() {
                        pass &= game.social_cost(&nash).unwrap() <= bound;
                    }
                }
            }
        }
    }
    verdict(8, pass);
    assert!(pass);
    assert!(t.elapsed() < Duration::from_secs(120));
}

#[test]
fn criterion_09_zero_weight_counterexample() {
    let t = Instant::now();
    let mut pass = true;
    let mut prev = Q::zero();
    for m in 2..=6usize {
        let (inst, alpha, x, xstar) = weight_counterexample(m).unwrap();
        let (game, _) = scheduling_game(&inst).unwrap();
        let ext = friendship_extension(&game, &alpha).unwrap();
        pass &= is_pure_nash(&ext, None, &x.to_profile()).unwrap().is_none();
        let ratio = weighted_social_cost(&inst, &x).unwrap()
            / weighted_social_cost(&inst, &xstar).unwrap();
        pass &= ratio == q(m as i64 + 1, 2);
        pass &= ratio > prev;
        prev = ratio;
    }
    verdict(9, pass);
    assert!(pass);
    assert!(t.elapsed() < Duration::from_secs(10));
}

#[test]
fn criterion_10_weight_condition_necessity() {
    let mut pass = true;
    for m in 2..=6usize {
        let (inst, _, _, _) = weight_counterexample(m).unwrap();
        pass &= check_weight_condition(&inst).is_some();
    }
    let mut rng = seed(4);
    for _ in 0..200 {
        let inst = random_weight_condition_instance(&mut rng);
        pass &= check_weight_condition(&inst).is_none();
    }
    verdict(10, pass);
    assert!(pass);
}

#[test]
fn criterion_11_auction_factor_two() {
    let t = Instant::now();
    let mut rng = seed(11);
    let mut pass = true;
    // (a) the (1, -1) certificate verifies on random valuation grids
    for _ in 0..100 {
        let n = rng.gen_range(1..=4usize);
        let vals: Vec<Q> = (0..n).map(|_| rq(&mut rng)).collect();
        let auction = Auction::new(vals, None, Pricing::SecondPrice).unwrap();
        pass &= altruism_poa2_certificate(&auction).is_ok();
    }
    // (b) the two-bidder tight example
    {
        let (auction, alpha, nash) = tight_example().unwrap();
        let (game, defaults) = auction_game(&auction).unwrap();
        let ext = friendship_extension(&game, &alpha).unwrap();
        pass &= is_pure_nash(&ext, Some(&defaults), &nash).unwrap().is_none();
        let (_, opt) = social_optimum(&game, DEFAULT_BUDGET).unwrap();
        pass &= &opt / game.social_cost(&nash).unwrap() == qi(2);
    }
    // (c) tested coarse equilibria of friendship extensions stay within 2
    for _ in 0..10 {
        let n = rng.gen_range(2..=3usize);
        let vals: Vec<Q> = (0..n).map(|_| qi(rng.gen_range(1..5))).collect();
        let auction = Auction::new(vals, None, Pricing::SecondPrice).unwrap();
        let alpha = random_friendship(&mut rng, n);
        let (game, defaults) = auction_game(&auction).unwrap();
        let ext = friendship_extension(&game, &alpha).unwrap();
        let nash = enumerate_pure_nash(&ext, Some(&defaults), DEFAULT_BUDGET).unwrap();
        let mut candidates: Vec<FiniteSupportDistribution> = nash
            .iter()
            .cloned()
            .map(FiniteSupportDistribution::point_mass)
            .collect();
        if nash.len() > 1 {
            let mix = FiniteSupportDistribution::uniform(nash).unwrap();
            if is_coarse_equilibrium(&ext, Some(&defaults), &mix).unwrap().is_none() {
                candidates.push(mix);
            }
        }
        if !candidates.is_empty() {
            pass &= friendship_coarse_poa_check(&auction, &alpha, &candidates)
                .map(|worst| worst <= qi(2))
                .unwrap_or(false);
        }
    }
    verdict(11, pass);
    assert!(pass);
    assert!(t.elapsed() < Duration::from_secs(60));
}

/// Small games, each its own social-contribution game, reused by the
/// independence criteria.
fn sample_scgs(rng: &mut ChaCha8Rng) -> Vec<FiniteGame> {
    let mut out = Vec::new();
    for idx in [130u64, 3000, 7777, 14000, 20000, 500000] {
        let cg = sweep::game_at(idx).unwrap();
        let (game, defaults) = congestion_game(&cg).unwrap();
        out.push(corresponding_scg(&game, &defaults).unwrap());
    }
    for _ in 0..3 {
        let n = rng.gen_range(2..=3usize);
        let mut sizes: Vec<Q> = (0..n).map(|_| rq(rng)).collect();
        sizes.sort();
        let inst = SchedulingInstance::identical(2, sizes, vec![Q::one(); n]).unwrap();
        let (game, defaults) = scheduling_game(&inst).unwrap();
        out.push(corresponding_scg(&game, &defaults).unwrap());
    }
    for _ in 0..3 {
        let vug = random_coverage_game(rng, 4, 2).unwrap();
        let (game, _) = scg::utility::utility_game(&vug).unwrap();
        out.push(game);
    }
    out
}

#[test]
fn criterion_12_altruism_independence() {
    let t = Instant::now();
    let mut rng = seed(12);
    let mut pass = true;
    // exhaustive small congestion games, via the sweep's identity flags
    let stats = sweep::run();
    pass &= stats.independence_failures == 0 && stats.games == sweep::total_games();
    // scheduling instances, weighted and unit-weight
    for k in 0..40 {
        let inst = if k < 20 {
            random_weight_condition_instance(&mut rng)
        } else {
            let m = rng.gen_range(2..=3usize);
            let n = rng.gen_range(2..=4usize);
            let sizes: Vec<Q> = (0..n).map(|_| rq(&mut rng)).collect();
            SchedulingInstance::identical(m, sizes, vec![Q::one(); n]).unwrap()
        };
        let (game, defaults) = scheduling_game(&inst).unwrap();
        let scg_game = corresponding_scg(&game, &defaults).unwrap();
        pass &= check_altruism_independence_identity(&scg_game, &defaults, DEFAULT_BUDGET)
            .unwrap()
            .is_none();
    }
    // basic utility games are their own social-contribution games
    for _ in 0..100 {
        let vug = random_coverage_game(&mut rng, 6, 3).unwrap();
        let (game, defaults) = scg::utility::utility_game(&vug).unwrap();
        pass &= check_altruism_independence_identity(&game, &defaults, DEFAULT_BUDGET)
            .unwrap()
            .is_none();
    }
    // altruistic smoothness verdicts match the selfish ones on such games
    for game in sample_scgs(&mut rng) {
        let n = game.n_players();
        let zeros = AltruismVector::uniform(n, Q::zero()).unwrap();
        for a in 0..10 {
            let alpha = random_altruism(&mut rng, n, a >= 5);
            for _ in 0..20 {
                let cert = SmoothnessCertificate {
                    lambda: q(rng.gen_range(0..9), rng.gen_range(1..4)),
                    mu: q(rng.gen_range(-8..3), 4),
                    sbar: SBar::Pure(Profile::pure(&vec![0; n])),
                    sstar: Profile::pure(&vec![0; n]),
                    flavor: Flavor::Altruistic,
                };
                let with_alpha =
                    check_smoothness_altruistic(&game, &alpha, &cert, DEFAULT_BUDGET)
                        .unwrap()
                        .is_ok();
                let selfish =
                    check_smoothness_altruistic(&game, &zeros, &cert, DEFAULT_BUDGET)
                        .unwrap()
                        .is_ok();
                pass &= with_alpha == selfish;
            }
        }
    }
    verdict(12, pass);
    assert!(pass);
    assert!(t.elapsed() < Duration::from_secs(120));
}

#[test]
fn criterion_13_coverage_games_factor_two() {
    let t = Instant::now();
    let mut rng = seed(13);
    let mut pass = true;
    for _ in 0..200 {
        let vug = random_coverage_game(&mut rng, 8, 3).unwrap();
        let (game, defaults) = scg::utility::utility_game(&vug).unwrap();
        let scg_game = corresponding_scg(&game, &defaults).unwrap();
        pass &= check_valid_utility(&scg_game, &defaults, Some(vug.value_function()), DEFAULT_BUDGET)
            .unwrap()
            .is_none();
        let mut check_poa = |g: &FiniteGame| match pure_poa(g, None, DEFAULT_BUDGET).unwrap() {
            PoaOutcome::Ratio { value, .. } => pass &= value <= qi(2),
            PoaOutcome::Infinite { .. } => pass = false,
            PoaOutcome::NoPureNash | PoaOutcome::DegenerateOptimum => {}
        };
        check_poa(&game);
        for _ in 0..3 {
            let alpha = random_altruism(&mut rng, game.n_players(), false);
            check_poa(&altruistic_extension(&game, &alpha).unwrap());
        }
    }
    verdict(13, pass);
    assert!(pass);
    assert!(t.elapsed() < Duration::from_secs(120));
}

#[test]
fn criterion_14_reduction_transfer() {
    let t = Instant::now();
    let mut rng = seed(14);
    let mut pass = true;
    // congestion subsample with altruistic extensions
    for k in 0..25u64 {
        let idx = (k * 69_700 + 7) % sweep::total_games();
        let cg = sweep::game_at(idx).unwrap();
        let (game, defaults) = congestion_game(&cg).unwrap();
        let (sstar, _) = social_optimum(&game, DEFAULT_BUDGET).unwrap();
        let cert = SmoothnessCertificate {
            lambda: q(17, 5),
            mu: q(2, 5),
            sbar: SBar::Pure(sstar.clone()),
            sstar,
            flavor: Flavor::Base,
        };
        let alpha = random_altruism(&mut rng, game.n_players(), false);
        pass &= reduction_transfer_check(
            &game,
            &defaults,
            SmoothnessParams::Altruistic(&alpha),
            &cert,
            DEFAULT_BUDGET,
        )
        .unwrap();
    }
    // weighted scheduling with friendship extensions
    for _ in 0..20 {
        let inst = random_weight_condition_instance(&mut rng);
        let (game, defaults) = scheduling_game(&inst).unwrap();
        let (sstar, _) = social_optimum(&game, DEFAULT_BUDGET).unwrap();
        let cert = SmoothnessCertificate {
            lambda: qi(2),
            mu: q(1, 2),
            sbar: SBar::Pure(sstar.clone()),
            sstar,
            flavor: Flavor::Base,
        };
        let alpha = random_friendship(&mut rng, inst.jobs());
        pass &= reduction_transfer_check(
            &game,
            &defaults,
            SmoothnessParams::Friendship(&alpha, inst.weights()),
            &cert,
            DEFAULT_BUDGET,
        )
        .unwrap();
    }
    // coverage games with altruistic extensions
    for _ in 0..20 {
        let vug = random_coverage_game(&mut rng, 6, 3).unwrap();
        let (game, defaults) = scg::utility::utility_game(&vug).unwrap();
        let cert = utility_poa2_certificate(&vug).unwrap();
        let alpha = random_altruism(&mut rng, game.n_players(), false);
        pass &= reduction_transfer_check(
            &game,
            &defaults,
            SmoothnessParams::Altruistic(&alpha),
            &cert,
            DEFAULT_BUDGET,
        )
        .unwrap();
    }
    verdict(14, pass);
    assert!(pass);
    assert!(t.elapsed() < Duration::from_secs(120));
}

#[test]
fn criterion_15_coarse_transfer() {
    let mut rng = seed(15);
    let mut pass = true;
    // congestion: every pure Nash, as a point mass, stays within 17/3
    for k in 0..15u64 {
        let idx = (k * 116_168 + 3) % sweep::total_games();
        let cg = sweep::game_at(idx).unwrap();
        let (game, _) = congestion_game(&cg).unwrap();
        let (_, opt) = social_optimum(&game, DEFAULT_BUDGET).unwrap();
        let bound = q(17, 3) * &opt;
        for nash in enumerate_pure_nash(&game, None, DEFAULT_BUDGET).unwrap() {
            let point = FiniteSupportDistribution::point_mass(nash);
            pass &= expected_social_cost(&game, None, &point).unwrap() <= bound;
        }
    }
    // scheduling: verified friendship certificates bound extension equilibria by 4
    for _ in 0..20 {
        let inst = random_weight_condition_instance(&mut rng);
        let (game, defaults) = scheduling_game(&inst).unwrap();
        let (sstar, opt) = social_optimum(&game, DEFAULT_BUDGET).unwrap();
        let cert = SmoothnessCertificate {
            lambda: qi(2),
            mu: q(1, 2),
            sbar: SBar::Pure(sstar.clone()),
            sstar,
            flavor: Flavor::Base,
        };
        let alpha = random_friendship(&mut rng, inst.jobs());
        pass &= reduction_transfer_check(
            &game,
            &defaults,
            SmoothnessParams::Friendship(&alpha, inst.weights()),
            &cert,
            DEFAULT_BUDGET,
        )
        .unwrap();
        let ext = friendship_extension(&game, &alpha).unwrap();
        let bound = qi(4) * &opt;
        for nash in enumerate_pure_nash(&ext, None, DEFAULT_BUDGET).unwrap() {
            let point = FiniteSupportDistribution::point_mass(nash);
            pass &= expected_social_cost(&game, None, &point).unwrap() <= bound;
        }
    }
    verdict(15, pass);
    assert!(pass);
}

#[test]
fn criterion_16_summary_table() {
    let t = Instant::now();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_scg"))
        .args(["table1", "--scale", "small"])
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8_lossy(&out.stdout);
    let pass = out.status.success() && !stdout.contains("FAIL");
    verdict(16, pass);
    assert!(pass, "table1 output:\n{stdout}");
    assert!(t.elapsed() < Duration::from_secs(300));
}
