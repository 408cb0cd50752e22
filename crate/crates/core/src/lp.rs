//! Exact two-variable linear programs for smoothness parameter
//! optimization.
//!
//! Both orientations reduce, via the standard linear-fractional
//! substitution, to minimizing one coordinate over a polyhedron
//! `{ (u, y) : p_k u + q_k y >= r_k, u >= 0, y >= 0 }`. With the axis
//! constraints included the feasible region is pointed, so the minimum is
//! attained at a vertex and exact vertex enumeration suffices.

use std::collections::HashMap;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;

/// Outcome of optimizing smoothness parameters against a constraint set.
#[derive(Clone, Debug, PartialEq)]
pub enum SmoothnessLp {
    /// The best bound together with parameters achieving it exactly.
    Attained { bound: Q, lambda: Q, mu: Q },
    /// The infimum over all valid parameter pairs; not attained by any
    /// finite pair (approached as `mu -> -inf` or `lambda -> inf`).
    Asymptotic { bound: Q },
    /// No parameter pair satisfies every constraint.
    Infeasible,
}

impl SmoothnessLp {
    pub fn bound(&self) -> Option<&Q> {
        match self {
            SmoothnessLp::Attained { bound, .. } | SmoothnessLp::Asymptotic { bound } => {
                Some(bound)
            }
            SmoothnessLp::Infeasible => None,
        }
    }
}

/// Minimizes `y` over `{ p u + q y >= r (all rows), u >= 0, y >= 0 }`.
/// Returns the optimal `(y, u)` or `None` when infeasible. The reported
/// `u` is the smallest one attaining the optimum among candidate vertices.
pub fn minimize_y(rows: &[(Q, Q, Q)]) -> Option<(Q, Q)> {
    // deduplicate parallel rows: for a fixed normal keep the largest r
    let mut strongest: HashMap<(Q, Q), Q> = HashMap::new();
    for (p, q, r) in rows {
        strongest
            .entry((p.clone(), q.clone()))
            .and_modify(|best| {
                if r > best {
                    *best = r.clone();
                }
            })
            .or_insert_with(|| r.clone());
    }
    let mut cons: Vec<(Q, Q, Q)> =
        strongest.into_iter().map(|((p, q), r)| (p, q, r)).collect();
    cons.push((Q::one(), Q::zero(), Q::zero())); // u >= 0
    cons.push((Q::zero(), Q::one(), Q::zero())); // y >= 0

    let feasible = |u: &Q, y: &Q| cons.iter().all(|(p, q, r)| &(p * u + q * y) >= r);

    let mut best: Option<(Q, Q)> = None;
    for i in 0..cons.len() {
        for j in (i + 1)..cons.len() {
            let (pi, qi, ri) = &cons[i];
            let (pj, qj, rj) = &cons[j];
            let det = pi * qj - pj * qi;
            if det.is_zero() {
                continue;
            }
            let u = (ri * qj - rj * qi) / &det;
            let y = (pi * rj - pj * ri) / &det;
            if u.is_negative() || y.is_negative() || !feasible(&u, &y) {
                continue;
            }
            let replace = match &best {
                Some((by, bu)) => y < *by || (y == *by && u < *bu),
                None => true,
            };
            if replace {
                best = Some((y, u));
            }
        }
    }
    best
}

/// Returns the interval of `v >= 0` satisfying `coef_k v >= rhs_k` for all
/// rows, as `Some((lo, hi))` with `hi = None` meaning unbounded; `None`
/// when empty.
fn one_var_interval(rows: &[(Q, Q)]) -> Option<(Q, Option<Q>)> {
    let mut lo = Q::zero();
    let mut hi: Option<Q> = None;
    for (coef, rhs) in rows {
        if coef.is_zero() {
            if rhs.is_positive() {
                return None;
            }
        } else if coef.is_positive() {
            let bound = rhs / coef;
            if bound > lo {
                lo = bound;
            }
        } else {
            let bound = rhs / coef;
            hi = Some(match hi {
                Some(h) if h < bound => h,
                _ => bound,
            });
        }
    }
    match &hi {
        Some(h) if *h < lo => None,
        _ => Some((lo, hi)),
    }
}

/// Best smoothness bound for a minimization game.
///
/// Constraints have the form `lambda * a + mu * b_k >= d_k` with
/// `a = C(s*) > 0`, and the bound `lambda / (1 - mu)` is minimized over
/// `lambda >= 0`, `mu < 1`. Substituting `t = 1/(1-mu)`, `x = lambda t`
/// turns this into minimizing `x` subject to
/// `a x + (b_k - d_k) t >= b_k`, `x, t >= 0`; `t = 0` corresponds to the
/// unattained limit `mu -> -inf`.
pub fn optimize_smoothness_min(a: &Q, rows: &[(Q, Q)]) -> Result<SmoothnessLp> {
    if !a.is_positive() {
        return Err(Error::Evaluation(
            "smoothness optimization needs a strictly positive optimum cost".into(),
        ));
    }
    let lp_rows: Vec<(Q, Q, Q)> = rows
        .iter()
        .map(|(b, d)| (b - d, a.clone(), b.clone()))
        .collect();
    // variables: u = t, y = x
    let Some((x, _)) = minimize_y(&lp_rows) else {
        return Ok(SmoothnessLp::Infeasible);
    };
    // recover a witnessing t > 0 for the optimal x, if one exists
    let t_rows: Vec<(Q, Q)> =
        rows.iter().map(|(b, d)| (b - d, b - a * &x)).collect();
    match one_var_interval(&t_rows) {
        Some((lo, hi)) => {
            let t = if lo.is_positive() {
                lo
            } else {
                // any positive t in the interval will do
                match hi {
                    Some(h) if h.is_positive() => {
                        if h >= Q::one() {
                            Q::one()
                        } else {
                            h
                        }
                    }
                    Some(_) => return Ok(SmoothnessLp::Asymptotic { bound: x }),
                    None => Q::one(),
                }
            };
            if t.is_zero() {
                return Ok(SmoothnessLp::Asymptotic { bound: x });
            }
            let mu = Q::one() - t.recip();
            let lambda = &x / &t;
            Ok(SmoothnessLp::Attained { bound: x, lambda, mu })
        }
        None => Ok(SmoothnessLp::Asymptotic { bound: x }),
    }
}

/// Best smoothness bound for a maximization game.
///
/// Constraints have the form `lambda * a + mu * b_k <= d_k` with
/// `a = Pi(s*) > 0`, and the bound `(1 - mu) / lambda` is minimized over
/// `lambda > 0`, `mu < 1`. Substituting `u = 1/lambda`, `y = (1-mu)/lambda`
/// gives: minimize `y` subject to `(d_k - b_k) u + b_k y >= a`,
/// `u, y >= 0`; `u = 0` corresponds to the unattained limit
/// `lambda -> inf`.
pub fn optimize_smoothness_max(a: &Q, rows: &[(Q, Q)]) -> Result<SmoothnessLp> {
    if !a.is_positive() {
        return Err(Error::Evaluation(
            "smoothness optimization needs a strictly positive optimum payoff".into(),
        ));
    }
    let lp_rows: Vec<(Q, Q, Q)> = rows
        .iter()
        .map(|(b, d)| (d - b, b.clone(), a.clone()))
        .collect();
    let Some((y, _)) = minimize_y(&lp_rows) else {
        return Ok(SmoothnessLp::Infeasible);
    };
    if y.is_zero() {
        // only possible with vacuous constraints; no game produces this
        return Ok(SmoothnessLp::Asymptotic { bound: y });
    }
    // recover a witnessing u > 0 for the optimal y, if one exists
    let u_rows: Vec<(Q, Q)> =
        rows.iter().map(|(b, d)| (d - b, a - b * &y)).collect();
    match one_var_interval(&u_rows) {
        Some((lo, hi)) => {
            let u = if lo.is_positive() {
                lo
            } else {
                match hi {
                    Some(h) if h.is_positive() => {
                        if h >= Q::one() {
                            Q::one()
                        } else {
                            h
                        }
                    }
                    Some(_) => return Ok(SmoothnessLp::Asymptotic { bound: y }),
                    None => Q::one(),
                }
            };
            if u.is_zero() {
                return Ok(SmoothnessLp::Asymptotic { bound: y });
            }
            let lambda = u.recip();
            let mu = Q::one() - &y * &lambda;
            Ok(SmoothnessLp::Attained { bound: y, lambda, mu })
        }
        None => Ok(SmoothnessLp::Asymptotic { bound: y }),
    }
}
