//! Single-item auctions with second-price-style payments: finite bid
//! grids, welfare, the winner's marginal-contribution payoff, the
//! 2-robustness certificate, and the tight friendship example.

use std::sync::Arc;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::equilibria::{expected_social_cost, is_coarse_equilibrium, social_optimum};
use crate::error::{Error, Result};
use crate::game::{
    Choice, DefaultStrategy, DefaultStrategyMap, Evaluator, FiniteGame,
    FiniteSupportDistribution, FriendshipMatrix, Orientation, Profile, DEFAULT_BUDGET,
};
use crate::rational::{Q, QStr};
use crate::smoothness::{
    check_smoothness_base, corresponding_scg, Flavor, SBar, SmoothnessCertificate,
};

#[derive(Clone, Debug, PartialEq)]
pub enum Pricing {
    /// The winner pays the second-highest bid; everyone else pays nothing.
    SecondPrice,
    /// Arbitrary payments indexed by profile rank and player, validated to
    /// stay between zero and the second-price payment on every profile.
    Custom(Vec<Vec<Q>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Auction {
    valuations: Vec<Q>,
    /// Sorted bid grids; every grid contains 0 and stays below the
    /// bidder's valuation (overbidding is dominated and excluded).
    grids: Vec<Vec<Q>>,
    pricing: Pricing,
}

impl Auction {
    pub fn new(valuations: Vec<Q>, grids: Option<Vec<Vec<Q>>>, pricing: Pricing) -> Result<Self> {
        if valuations.is_empty() {
            return Err(Error::Parameter("need at least one bidder".into()));
        }
        if valuations.iter().any(|v| v.is_negative()) {
            return Err(Error::Parameter("valuations must be nonnegative".into()));
        }
        let grids = match grids {
            Some(grids) => {
                if grids.len() != valuations.len() {
                    return Err(Error::Parameter("need one bid grid per bidder".into()));
                }
                let mut grids = grids;
                for (i, grid) in grids.iter_mut().enumerate() {
                    grid.sort();
                    grid.dedup();
                    if grid.first() != Some(&Q::zero()) {
                        return Err(Error::Parameter(format!(
                            "grid of bidder {i} must contain 0 and no negative bids"
                        )));
                    }
                    if grid.last().unwrap() > &valuations[i] {
                        return Err(Error::Parameter(format!(
                            "grid of bidder {i} overbids the valuation"
                        )));
                    }
                }
                grids
            }
            None => default_grids(&valuations),
        };
        let auction = Auction { valuations, grids, pricing: Pricing::SecondPrice };
        if let Pricing::Custom(table) = &pricing {
            auction.validate_custom(table)?;
        }
        Ok(Auction { pricing, ..auction })
    }

    fn validate_custom(&self, table: &[Vec<Q>]) -> Result<()> {
        let n = self.n_bidders();
        let profiles: usize = self.grids.iter().map(|g| g.len()).product();
        if table.len() != profiles || table.iter().any(|row| row.len() != n) {
            return Err(Error::Parameter(
                "custom pricing table must cover every profile and bidder".into(),
            ));
        }
        let mut rank = 0usize;
        let mut result = Ok(());
        self.for_each_profile(|profile| {
            let bids = self.bids(profile);
            let w = winner(&bids);
            for i in 0..n {
                let cap = if i == w { second_highest(&bids) } else { Q::zero() };
                let p = &table[rank][i];
                if p.is_negative() || *p > cap {
                    result = Err(Error::Parameter(format!(
                        "custom payment of bidder {i} at profile rank {rank} leaves [0, second price]"
                    )));
                }
            }
            rank += 1;
        });
        result
    }

    pub fn n_bidders(&self) -> usize {
        self.valuations.len()
    }

    pub fn valuations(&self) -> &[Q] {
        &self.valuations
    }

    pub fn grids(&self) -> &[Vec<Q>] {
        &self.grids
    }

    /// Bids of a profile; the default choice bids 0.
    pub fn bids(&self, profile: &Profile) -> Vec<Q> {
        profile
            .0
            .iter()
            .enumerate()
            .map(|(i, choice)| match choice {
                Choice::Play(k) => self.grids[i][*k].clone(),
                Choice::Default => Q::zero(),
            })
            .collect()
    }

    /// Welfare: the winner keeps the item, so Π(b) = v_{winner}.
    pub fn welfare(&self, profile: &Profile) -> Q {
        self.valuations[winner(&self.bids(profile))].clone()
    }

    pub fn payment(&self, i: usize, profile: &Profile) -> Q {
        let bids = self.bids(profile);
        match &self.pricing {
            Pricing::SecondPrice => {
                if winner(&bids) == i {
                    second_highest(&bids)
                } else {
                    Q::zero()
                }
            }
            Pricing::Custom(table) => table[self.rank(profile)][i].clone(),
        }
    }

    fn rank(&self, profile: &Profile) -> usize {
        let mut r = 0usize;
        for (i, choice) in profile.0.iter().enumerate() {
            let k = match choice {
                Choice::Play(k) => *k,
                Choice::Default => 0,
            };
            r = r * self.grids[i].len() + k;
        }
        r
    }

    fn for_each_profile(&self, mut f: impl FnMut(&Profile)) {
        let counts: Vec<usize> = self.grids.iter().map(|g| g.len()).collect();
        let mut idx = vec![0usize; counts.len()];
        loop {
            f(&Profile::pure(&idx));
            let mut pos = counts.len();
            loop {
                if pos == 0 {
                    return;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < counts[pos] {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
}

/// `{0, v_1, …, v_n} ∩ [0, v_i]` per bidder.
pub fn default_grids(valuations: &[Q]) -> Vec<Vec<Q>> {
    let mut points: Vec<Q> = valuations.to_vec();
    points.push(Q::zero());
    points.sort();
    points.dedup();
    valuations
        .iter()
        .map(|v| points.iter().filter(|p| *p <= v).cloned().collect())
        .collect()
}

/// Winner: highest bid, ties broken by lowest index. A bid of 0 wins if
/// nothing beats it — the item is always allocated.
pub fn winner(bids: &[Q]) -> usize {
    let mut best = 0usize;
    for (i, b) in bids.iter().enumerate().skip(1) {
        if b > &bids[best] {
            best = i;
        }
    }
    best
}

fn second_highest(bids: &[Q]) -> Q {
    if bids.len() < 2 {
        return Q::zero();
    }
    let w = winner(bids);
    bids.iter()
        .enumerate()
        .filter(|(i, _)| *i != w)
        .map(|(_, b)| b.clone())
        .max()
        .unwrap()
}

struct AuctionEval {
    auction: Auction,
}

impl Evaluator for AuctionEval {
    fn n_players(&self) -> usize {
        self.auction.n_bidders()
    }

    fn player_cost(&self, i: usize, profile: &Profile) -> Q {
        let bids = self.auction.bids(profile);
        let p = self.auction.payment(i, profile);
        if winner(&bids) == i {
            &self.auction.valuations[i] - p
        } else {
            -p
        }
    }

    fn social_cost(&self, profile: &Profile) -> Q {
        self.auction.welfare(profile)
    }
}

/// The auction as a finite payoff-maximization game; the social value is
/// the welfare. Defaults map to the 0 bid.
pub fn auction_game(auction: &Auction) -> Result<(FiniteGame, DefaultStrategyMap)> {
    let counts: Vec<usize> = auction.grids.iter().map(|g| g.len()).collect();
    let n = counts.len();
    let eval = Arc::new(AuctionEval { auction: auction.clone() });
    // Σ_i Π_i(b) = v_winner − Σ payments <= Π(b)
    let game = FiniteGame::new(counts, Orientation::Maximize, eval)?.with_sum_bounded(true);
    // every grid contains 0 at index 0
    let defaults = DefaultStrategyMap::new(vec![DefaultStrategy::Existing(0); n]);
    Ok((game, defaults))
}

/// The closed form of the social-contribution payoff: the winner earns the
/// gap between the two highest-bidding players' valuations, everyone else
/// earns 0. With a single bidder the empty auction has no winner and the
/// payoff is the full valuation.
pub fn scg_payoff(auction: &Auction, i: usize, profile: &Profile) -> Q {
    let bids = auction.bids(profile);
    let w = winner(&bids);
    if w != i {
        return Q::zero();
    }
    if bids.len() < 2 {
        return auction.valuations[i].clone();
    }
    let runner_up = bids
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != w)
        .max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i)))
        .map(|(j, _)| j)
        .unwrap();
    &auction.valuations[w] - &auction.valuations[runner_up]
}

/// Builds and exhaustively verifies the `(1, −1)`-smoothness certificate
/// of the auction's social-contribution game: the highest-valuation bidder
/// bids their valuation, everyone else bids 0, and
/// `Σ_i Π̄_i(b*_i, b_{-i}) >= Π(b*) − Π(b)` holds on the whole grid.
pub fn altruism_poa2_certificate(auction: &Auction) -> Result<SmoothnessCertificate> {
    let n = auction.n_bidders();
    let top = auction
        .valuations
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i)))
        .map(|(i, _)| i)
        .unwrap();
    let vmax = &auction.valuations[top];
    let bid_index = auction.grids[top]
        .iter()
        .position(|b| b == vmax)
        .ok_or_else(|| {
            Error::Parameter("top bidder's grid must contain the valuation".into())
        })?;
    let mut idx = vec![0usize; n];
    idx[top] = bid_index;
    let bstar = Profile::pure(&idx);
    let cert = SmoothnessCertificate {
        lambda: Q::one(),
        mu: -Q::one(),
        sbar: SBar::Pure(bstar.clone()),
        sstar: bstar,
        flavor: Flavor::Base,
    };
    let (game, defaults) = auction_game(auction)?;
    let scg = corresponding_scg(&game, &defaults)?;
    if let Some(witness) = check_smoothness_base(&scg, Some(&defaults), &cert, DEFAULT_BUDGET)? {
        return Err(Error::Evaluation(format!(
            "smoothness violated at profile {:?}",
            witness.to_wire()
        )));
    }
    Ok(cert)
}

/// Verifies each candidate mixture as a coarse equilibrium of the
/// friendship extension and returns the largest welfare ratio
/// `Π(b*)/E[Π(σ)]` observed; errors if any candidate fails the coarse
/// check or the ratio leaves the proven bound of 2.
pub fn friendship_coarse_poa_check(
    auction: &Auction,
    alpha: &FriendshipMatrix,
    candidates: &[FiniteSupportDistribution],
) -> Result<Q> {
    let (game, defaults) = auction_game(auction)?;
    let ext = crate::game::friendship_extension(&game, alpha)?;
    let (_, opt) = social_optimum(&game, DEFAULT_BUDGET)?;
    let mut worst = Q::zero();
    for (k, sigma) in candidates.iter().enumerate() {
        if let Some((i, dev, cur, better)) = is_coarse_equilibrium(&ext, Some(&defaults), sigma)? {
            return Err(Error::Evaluation(format!(
                "candidate {k} is not a coarse equilibrium: bidder {i} improves {cur} -> {better} via {dev:?}"
            )));
        }
        let expected = expected_social_cost(&game, Some(&defaults), sigma)?;
        if expected.is_zero() {
            return Err(Error::Evaluation(format!("candidate {k} has zero expected welfare")));
        }
        let ratio = &opt / expected;
        if ratio > Q::from_integer(2.into()) {
            return Err(Error::Evaluation(format!(
                "candidate {k} has welfare ratio {ratio} > 2"
            )));
        }
        if ratio > worst {
            worst = ratio;
        }
    }
    Ok(worst)
}

/// The two-bidder example where the friendship bound of 2 is tight:
/// v = (1, 2), all-ones caring, and the low-value bidder wins with bid 1.
pub fn tight_example() -> Result<(Auction, FriendshipMatrix, Profile)> {
    let one = Q::one();
    let two = &one + &one;
    let auction = Auction::new(vec![one, two], None, Pricing::SecondPrice)?;
    let alpha = FriendshipMatrix::uniform(2, Q::one())?;
    // grids are {0,1} and {0,1,2}; bidder 1 bids 1, bidder 2 bids 0
    let nash = Profile::pure(&[1, 0]);
    Ok((auction, alpha, nash))
}

// --- JSON -------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct AuctionJson {
    pub valuations: Vec<QStr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grids: Option<Vec<Vec<QStr>>>,
    pub pricing: String,
}

pub fn auction_from_json(spec: &AuctionJson) -> Result<Auction> {
    if spec.pricing != "second-price" {
        return Err(Error::Parameter(format!("unsupported pricing '{}'", spec.pricing)));
    }
    Auction::new(
        spec.valuations.iter().map(|v| v.0.clone()).collect(),
        spec.grids
            .as_ref()
            .map(|gs| gs.iter().map(|g| g.iter().map(|b| b.0.clone()).collect()).collect()),
        Pricing::SecondPrice,
    )
}

pub fn auction_to_json(auction: &Auction) -> AuctionJson {
    AuctionJson {
        valuations: auction.valuations.iter().map(|v| QStr(v.clone())).collect(),
        grids: Some(
            auction
                .grids
                .iter()
                .map(|g| g.iter().map(|b| QStr(b.clone())).collect())
                .collect(),
        ),
        pricing: "second-price".into(),
    }
}
