//! Exhaustive ground truth for small games.
//!
//! Agents with the same beta and the same strategy list are interchangeable,
//! so states are enumerated as one multiset of strategies per such group.
//! The budget bounds the number of these canonical states; nothing partial is
//! ever returned.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::model::{
    congestions_unchecked, first_deviation, social_cost_of_load, telescoped_delta,
    CongestionVector, Game, State,
};
use crate::rational::Rational;
use crate::singleton::Levels;

pub const DEFAULT_BUDGET: u128 = 2_000_000;

/// Interchangeable agents and the multisets of strategies they can form.
struct Canonical {
    groups: Vec<Vec<usize>>,
    /// Per group, every non-decreasing strategy-index tuple.
    multisets: Vec<Vec<Vec<usize>>>,
    total: u64,
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn multisets(slots: usize, kinds: usize) -> Vec<Vec<usize>> {
    fn rec(
        slots: usize,
        kinds: usize,
        from: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == slots {
            out.push(cur.clone());
            return;
        }
        for s in from..kinds {
            cur.push(s);
            rec(slots, kinds, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(slots, kinds, 0, &mut Vec::with_capacity(slots), &mut out);
    out
}

impl Canonical {
    fn new(game: &Game, budget: u128) -> Result<Self> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, a) in game.agents().iter().enumerate() {
            match groups.iter_mut().find(|g| {
                let r = &game.agents()[g[0]];
                r.beta == a.beta && r.strategies == a.strategies
            }) {
                Some(g) => g.push(i),
                None => groups.push(vec![i]),
            }
        }
        let total = groups.iter().fold(1u128, |acc, g| {
            let s = game.agents()[g[0]].strategies.len() as u128;
            acc.saturating_mul(binomial(g.len() as u128 + s - 1, s - 1))
        });
        if total > budget {
            return Err(Error::Budget {
                required: total,
                budget,
            });
        }
        let multisets = groups
            .iter()
            .map(|g| multisets(g.len(), game.agents()[g[0]].strategies.len()))
            .collect();
        Ok(Canonical {
            groups,
            multisets,
            total: total as u64,
        })
    }

    fn state(&self, mut index: u64, n_agents: usize) -> State {
        let mut choice = vec![0; n_agents];
        for (g, ms) in self.groups.iter().zip(&self.multisets).rev() {
            let k = ms.len() as u64;
            let pick = &ms[(index % k) as usize];
            index /= k;
            for (&agent, &s) in g.iter().zip(pick) {
                choice[agent] = s;
            }
        }
        State(choice)
    }

    /// Number of raw states represented by a canonical one.
    fn multiplicity(&self, state: &State) -> u128 {
        self.groups
            .iter()
            .map(|g| {
                let mut runs: BTreeMap<usize, u128> = BTreeMap::new();
                for &i in g {
                    *runs.entry(state.0[i]).or_default() += 1;
                }
                let mut left = g.len() as u128;
                runs.values().fold(1u128, |acc, &r| {
                    let c = binomial(left, r);
                    left -= r;
                    acc.saturating_mul(c)
                })
            })
            .product()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extremal {
    pub state: State,
    pub cost: Rational,
    /// Resource id to per-level counts, levels by ascending beta.
    pub counts: BTreeMap<String, Vec<usize>>,
}

fn extremal(game: &Game, levels: &Levels, state: State, cost: Rational) -> Extremal {
    let mut counts: BTreeMap<String, Vec<usize>> = game
        .resources()
        .iter()
        .map(|r| (r.id.clone(), vec![0; levels.len()]))
        .collect();
    for i in 0..game.n_agents() {
        for &e in game.strategy_of(&state, i) {
            counts.get_mut(&game.resources()[e].id).expect("known id")[levels.of_agent[i]] += 1;
        }
    }
    Extremal {
        state,
        cost,
        counts,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NashEnumeration {
    pub exists: bool,
    /// `prod_i |S_i|`
    pub state_count: u128,
    /// States actually visited, one per class of interchangeable agents.
    pub canonical_count: u64,
    /// Equilibria, one representative per class, ascending.
    pub equilibria: Vec<State>,
    /// Equilibria counted over the raw state space.
    pub raw_equilibrium_count: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best: Option<Extremal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<Extremal>,
}

fn evaluate(game: &Game, canon: &Canonical, k: u64) -> (State, CongestionVector) {
    let s = canon.state(k, game.n_agents());
    let load = congestions_unchecked(game, &s);
    (s, load)
}

pub fn enumerate_nash(game: &Game, budget: u128) -> Result<NashEnumeration> {
    let canon = Canonical::new(game, budget)?;
    let mut found: Vec<(State, Rational)> = (0..canon.total)
        .into_par_iter()
        .filter_map(|k| {
            let (s, load) = evaluate(game, &canon, k);
            first_deviation(game, &s, &load)
                .is_none()
                .then(|| (s, social_cost_of_load(game, &load)))
        })
        .collect();
    found.sort();
    let levels = Levels::of(game);
    let best = found
        .iter()
        .min_by(|a, b| (&a.1, &a.0).cmp(&(&b.1, &b.0)))
        .cloned();
    let worst = found
        .iter()
        .min_by(|a, b| (&b.1, &a.0).cmp(&(&a.1, &b.0)))
        .cloned();
    Ok(NashEnumeration {
        exists: !found.is_empty(),
        state_count: game.state_space_size(),
        canonical_count: canon.total,
        raw_equilibrium_count: found.iter().map(|(s, _)| canon.multiplicity(s)).sum(),
        equilibria: found.into_iter().map(|(s, _)| s).collect(),
        best: best.map(|(s, c)| extremal(game, &levels, s, c)),
        worst: worst.map(|(s, c)| extremal(game, &levels, s, c)),
    })
}

/// Existence only, stopping at the first equilibrium in enumeration order.
pub fn exists_nash(game: &Game, budget: u128) -> Result<Option<State>> {
    let canon = Canonical::new(game, budget)?;
    Ok((0..canon.total)
        .into_par_iter()
        .find_first(|&k| {
            let (s, load) = evaluate(game, &canon, k);
            first_deviation(game, &s, &load).is_none()
        })
        .map(|k| canon.state(k, game.n_agents())))
}

/// Minimum social cost over all states; ties go to the smallest state.
pub fn brute_force_optimum(game: &Game, budget: u128) -> Result<(State, Rational)> {
    let canon = Canonical::new(game, budget)?;
    (0..canon.total)
        .into_par_iter()
        .map(|k| {
            let (s, load) = evaluate(game, &canon, k);
            (social_cost_of_load(game, &load), s)
        })
        .min()
        .map(|(c, s)| (s, c))
        .ok_or_else(|| invalid("game has no states"))
}

/// Smallest set `T` (then lexicographically smallest) such that making `T`
/// pure altruists and everyone else an egoist admits an equilibrium whose
/// congestion vector is exactly `target`.
pub fn min_altruist_subset_bruteforce(
    game: &Game,
    target: &CongestionVector,
    budget: u128,
) -> Result<Option<Vec<usize>>> {
    if target.0.len() != game.n_resources() {
        return Err(invalid("target length differs from resource count"));
    }
    let n = game.n_agents();
    if n > 20 {
        return Err(Error::Budget {
            required: 1 << n,
            budget,
        });
    }
    let raw = game.state_space_size();
    if raw > budget {
        return Err(Error::Budget {
            required: raw,
            budget,
        });
    }
    let radix: Vec<u64> = game
        .agents()
        .iter()
        .map(|a| a.strategies.len() as u64)
        .collect();
    let zero = Rational::zero();
    let one = Rational::one();
    // per matching state: bit i set if agent i is content as an egoist,
    // and separately as an altruist
    let content: Vec<(u32, u32)> = (0..raw as u64)
        .into_par_iter()
        .filter_map(|mut k| {
            let mut choice = vec![0; n];
            for i in (0..n).rev() {
                choice[i] = (k % radix[i]) as usize;
                k /= radix[i];
            }
            let s = State(choice);
            let load = congestions_unchecked(game, &s);
            if load != *target {
                return None;
            }
            let mut ego = 0u32;
            let mut alt = 0u32;
            for (i, a) in game.agents().iter().enumerate() {
                let from = &a.strategies[s.0[i]];
                let mut ego_ok = true;
                let mut alt_ok = true;
                for (j, to) in a.strategies.iter().enumerate() {
                    if j == s.0[i] {
                        continue;
                    }
                    let d = telescoped_delta(game, &load, from, to);
                    ego_ok &= !d.cost_decrease(&zero).is_positive();
                    alt_ok &= !d.cost_decrease(&one).is_positive();
                }
                ego |= u32::from(ego_ok) << i;
                alt |= u32::from(alt_ok) << i;
            }
            Some((ego, alt))
        })
        .collect();
    if content.is_empty() {
        return Ok(None);
    }
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    for size in 0..=n {
        for subset in combinations(n, size) {
            let t: u32 = subset.iter().map(|&i| 1u32 << i).sum();
            if content
                .iter()
                .any(|&(ego, alt)| (alt & t) | (ego & !t & all) == all)
            {
                return Ok(Some(subset));
            }
        }
    }
    Ok(None)
}

/// `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, &mut Vec::new(), &mut out);
    out
}
