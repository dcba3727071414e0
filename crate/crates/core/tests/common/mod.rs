//! Random instances shared by the integration tests. Everything is driven by
//! a seeded ChaCha generator so failures reproduce from the printed seed.

#![allow(dead_code)]

use altruism_core::generators::CnfFormula;
use altruism_core::{AgentSpec, CongestionVector, DelayFunction, Game, Rational, Resource, State};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(p, d)
}

/// Non-decreasing table of length `n` with entries in `1..=12`.
pub fn monotone_table(r: &mut impl Rng, n: usize) -> DelayFunction {
    let mut v: Vec<i64> = (0..n).map(|_| r.gen_range(1..=12)).collect();
    v.sort_unstable();
    DelayFunction::table(v)
}

/// Non-decreasing table in `1..=12` built from flat runs and sharp jumps,
/// which makes the marginal social delay non-monotone.
pub fn lumpy_table(r: &mut impl Rng, n: usize) -> DelayFunction {
    let mut cur: i64 = r.gen_range(1..=5);
    let mut v = Vec::with_capacity(n);
    for _ in 0..n {
        v.push(cur);
        cur = (cur + [0, 0, 1, 3, 4, 5][r.gen_range(0..6)]).min(12);
    }
    DelayFunction::table(v)
}

/// Convex table: non-decreasing increments starting from `d(1) >= 1`.
pub fn convex_table(r: &mut impl Rng, n: usize) -> DelayFunction {
    let mut v = Vec::with_capacity(n);
    let mut cur = q(r.gen_range(1..=12), 1);
    let mut step = q(r.gen_range(0..=3), r.gen_range(1..=2));
    for _ in 0..n {
        v.push(cur.clone());
        step += q(r.gen_range(0..=2), r.gen_range(1..=2));
        cur += &step;
    }
    DelayFunction::table(v)
}

fn resource_names(m: usize) -> Vec<String> {
    (0..m).map(|e| format!("r{e}")).collect()
}

/// Symmetric singleton game over `m` resources; every agent may use all of
/// them, betas drawn from `levels`.
pub fn symmetric_singleton(
    n: usize,
    tables: Vec<DelayFunction>,
    r: &mut impl Rng,
    levels: &[Rational],
) -> Game {
    let names = resource_names(tables.len());
    let resources = names
        .iter()
        .zip(tables)
        .map(|(id, d)| Resource::new(id.clone(), d))
        .collect();
    let strategies: Vec<Vec<&str>> = names.iter().map(|s| vec![s.as_str()]).collect();
    let agents = (0..n)
        .map(|i| {
            AgentSpec::new(
                format!("a{i}"),
                levels.choose(r).unwrap().clone(),
                strategies.clone(),
            )
        })
        .collect();
    Game::new(resources, agents).unwrap()
}

pub fn random_symmetric_singleton(r: &mut impl Rng, levels: &[Rational]) -> Game {
    let n = r.gen_range(1..=6);
    let m = r.gen_range(1..=4);
    let tables = (0..m).map(|_| monotone_table(r, n)).collect();
    symmetric_singleton(n, tables, r, levels)
}

/// Singleton game where each agent gets a random nonempty subset of the
/// resources.
pub fn random_singleton(r: &mut impl Rng, n: usize, m: usize) -> Game {
    let names = resource_names(m);
    let resources = names
        .iter()
        .map(|id| Resource::new(id.clone(), monotone_table(r, n)))
        .collect();
    let agents = (0..n)
        .map(|i| {
            let mut s: Vec<Vec<&str>> = names
                .iter()
                .filter(|_| r.gen_bool(0.6))
                .map(|id| vec![id.as_str()])
                .collect();
            if s.is_empty() {
                s.push(vec![names.choose(r).unwrap().as_str()]);
            }
            AgentSpec::new(format!("a{i}"), Rational::zero(), s)
        })
        .collect();
    Game::new(resources, agents).unwrap()
}

/// General congestion game: random resource subsets as strategies, delays
/// built by `delay`.
pub fn random_general(
    r: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    betas: &[Rational],
    mut delay: impl FnMut(&mut ChaCha8Rng) -> DelayFunction,
) -> Game {
    let names = resource_names(m);
    let resources = names
        .iter()
        .map(|id| Resource::new(id.clone(), delay(r)))
        .collect();
    let agents = (0..n)
        .map(|i| {
            let k = r.gen_range(1..=3);
            let strategies: Vec<Vec<&str>> = (0..k)
                .map(|_| {
                    let mut s: Vec<&str> = names
                        .iter()
                        .filter(|_| r.gen_bool(0.4))
                        .map(String::as_str)
                        .collect();
                    if s.is_empty() {
                        s.push(names.choose(r).unwrap().as_str());
                    }
                    s
                })
                .collect();
            AgentSpec::new(
                format!("a{i}"),
                betas.choose(r).unwrap().clone(),
                strategies,
            )
        })
        .collect();
    Game::new(resources, agents).unwrap()
}

pub fn random_linear_game(
    r: &mut ChaCha8Rng,
    n_max: usize,
    m_max: usize,
    betas: &[Rational],
) -> Game {
    let n = r.gen_range(1..=n_max);
    let m = r.gen_range(1..=m_max);
    random_general(r, n, m, betas, |r| {
        DelayFunction::linear(q(r.gen_range(1..=6), r.gen_range(1..=3)))
    })
}

pub fn random_state(r: &mut impl Rng, game: &Game) -> State {
    State(
        game.agents()
            .iter()
            .map(|a| r.gen_range(0..a.strategies.len()))
            .collect(),
    )
}

pub fn load_of(game: &Game, state: &State) -> CongestionVector {
    altruism_core::congestions(game, state).unwrap()
}

/// Every formula over `n` variables with `m` clauses that satisfies the
/// occurrence bound, one per isomorphism class (variable renaming, polarity
/// flips, clause order).
pub fn cnf_classes(n: usize, m: usize) -> Vec<CnfFormula> {
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    for mask in 1u32..(1 << n) {
        let vars: Vec<i32> = (0..n as i32)
            .filter(|v| mask >> v & 1 == 1)
            .map(|v| v + 1)
            .collect();
        for signs in 0u32..(1 << vars.len()) {
            clauses.push(
                vars.iter()
                    .enumerate()
                    .map(|(k, &v)| if signs >> k & 1 == 1 { -v } else { v })
                    .collect(),
            );
        }
    }
    let perms = permutations(n);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let mut pick = vec![0usize; m];
    loop {
        let formula: Vec<Vec<i32>> = pick.iter().map(|&c| clauses[c].clone()).collect();
        if let Ok(f) = CnfFormula::new(n, formula.clone()) {
            let key = canonical_key(&formula, n, &perms);
            if seen.insert(key) {
                out.push(f);
            }
        }
        // non-decreasing clause index tuples
        let mut k = m;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if pick[k] + 1 < clauses.len() {
                pick[k] += 1;
                for j in k + 1..m {
                    pick[j] = pick[k];
                }
                break;
            }
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn canonical_key(formula: &[Vec<i32>], n: usize, perms: &[Vec<usize>]) -> Vec<Vec<i32>> {
    let mut best: Option<Vec<Vec<i32>>> = None;
    for p in perms {
        for flips in 0u32..(1 << n) {
            let mut f: Vec<Vec<i32>> = formula
                .iter()
                .map(|c| {
                    let mut c: Vec<i32> = c
                        .iter()
                        .map(|&l| {
                            let v = l.unsigned_abs() as usize - 1;
                            let nv = p[v] as i32 + 1;
                            let neg = (l < 0) ^ (flips >> v & 1 == 1);
                            if neg {
                                -nv
                            } else {
                                nv
                            }
                        })
                        .collect();
                    c.sort_unstable();
                    c
                })
                .collect();
            f.sort();
            if best.as_ref().is_none_or(|b| f < *b) {
                best = Some(f);
            }
        }
    }
    best.unwrap()
}

/// Multisets of `k` values from `1..=max` with an even sum.
pub fn partition_lists(k: usize, max: u64) -> Vec<Vec<u64>> {
    fn rec(k: usize, from: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == k {
            if cur.iter().sum::<u64>() % 2 == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for v in from..=max {
            cur.push(v);
            rec(k, v, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, 1, max, &mut Vec::new(), &mut out);
    out
}
