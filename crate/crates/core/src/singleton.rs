//! Equilibria of symmetric singleton games with a few altruism levels.
//!
//! Agents sharing a beta form a level. In a symmetric singleton game an
//! assignment is described by per-resource, per-level counts, and a level-`l`
//! agent on `e` is content iff its perceived cost there is at most the
//! perceived cost of joining any other resource. Bounding the first quantity
//! from above and the second from below by one value per level decouples the
//! resources, so a DP over resources with "agents still to place" as state
//! decides existence and finds the cheapest and the dearest equilibrium.
//!
//! A level whose most expensive host `e*` is also the only resource where
//! joining is cheaper than staying would be rejected by a plain threshold;
//! such levels are handled with an exemption for `(e*, n_e*)`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::model::{DelayFunction, Game, State};
use crate::rational::{Bound, Rational};

pub const DEFAULT_MAX_LEVELS: usize = 4;

/// `(occupy, enter)` for a level-`beta` agent: the perceived cost of being
/// one of `n` users and of becoming the `(n+1)`-th.
pub fn perceived_delays(
    d: &DelayFunction,
    beta: &Rational,
    n: usize,
) -> Result<(Rational, Rational)> {
    let occupy = perceived(d, beta, n)?;
    let enter = perceived(d, beta, n + 1)?;
    Ok((occupy, enter))
}

fn perceived(d: &DelayFunction, beta: &Rational, n: usize) -> Result<Rational> {
    let own = d.eval(n)?;
    let marginal = crate::model::altruistic_delay(d, n)?;
    Ok(crate::model::weighted_gain(beta, &own, &marginal))
}

/// The resource stands in for the level's most expensive host.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exemption {
    pub resource: usize,
    pub load: usize,
}

/// Gates for one level. Hosting requires `occupy <= d_max`; every resource
/// that can still be joined requires `enter >= d_min_plus` (`+inf` switches
/// this off). With an exemption, the exempt resource must carry exactly
/// `load` agents including one of this level, and is not probed for
/// `enter`; any other host must not cost more than joining it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelBound {
    pub d_max: Bound,
    pub d_min_plus: Bound,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exemption: Option<Exemption>,
}

impl LevelBound {
    pub fn vacuous() -> Self {
        LevelBound {
            d_max: Bound::NegInf,
            d_min_plus: Bound::PosInf,
            exemption: None,
        }
    }

    pub fn threshold(d: Rational) -> Self {
        LevelBound {
            d_max: Bound::Finite(d.clone()),
            d_min_plus: Bound::Finite(d),
            exemption: None,
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.d_max <= self.d_min_plus
    }
}

/// Distinct altruism levels of a game, ascending, with agent counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Levels {
    pub betas: Vec<Rational>,
    pub counts: Vec<usize>,
    /// Level of each agent.
    #[serde(skip)]
    pub of_agent: Vec<usize>,
}

impl Levels {
    pub fn of(game: &Game) -> Levels {
        let mut betas: Vec<Rational> = game.agents().iter().map(|a| a.beta.clone()).collect();
        betas.sort();
        betas.dedup();
        let of_agent: Vec<usize> = game
            .agents()
            .iter()
            .map(|a| betas.binary_search(&a.beta).expect("beta listed"))
            .collect();
        let mut counts = vec![0; betas.len()];
        for &l in &of_agent {
            counts[l] += 1;
        }
        Levels {
            betas,
            counts,
            of_agent,
        }
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// All per-level count tuples `(k_1..k_L)` with `k_l <= caps[l]`, in
/// lexicographic order.
fn all_combos(caps: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &c in caps {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=c).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out
}

/// Whether resource `e` may carry `combo` under `bounds`.
fn combo_admissible(
    game: &Game,
    levels: &Levels,
    e: usize,
    combo: &[usize],
    bounds: &[LevelBound],
) -> Result<bool> {
    let n = levels.total();
    let t: usize = combo.iter().sum();
    let d = &game.resources()[e].delay;
    for (l, b) in bounds.iter().enumerate() {
        if levels.counts[l] == 0 {
            continue;
        }
        let beta = &levels.betas[l];
        let hosts = combo[l] > 0;
        if let Some(x) = &b.exemption {
            if x.resource == e {
                if t != x.load || !hosts || Bound::from(perceived(d, beta, t)?) > b.d_max {
                    return Ok(false);
                }
                continue;
            }
        }
        if hosts {
            let occ = perceived(d, beta, t)?;
            if Bound::Finite(occ.clone()) > b.d_max {
                return Ok(false);
            }
            if let Some(x) = &b.exemption {
                let star = &game.resources()[x.resource].delay;
                if occ > perceived(star, beta, x.load + 1)? {
                    return Ok(false);
                }
            }
        }
        if t < n
            && b.d_min_plus != Bound::PosInf
            && Bound::from(perceived(d, beta, t + 1)?) < b.d_min_plus
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Admissible per-level count tuples for resource `e`, capped by the level
/// sizes of `game`.
pub fn resource_combos(game: &Game, e: usize, bounds: &[LevelBound]) -> Result<Vec<Vec<usize>>> {
    let levels = Levels::of(game);
    if bounds.len() != levels.len() {
        return Err(invalid(format!(
            "{} level bounds for {} levels",
            bounds.len(),
            levels.len()
        )));
    }
    if e >= game.n_resources() {
        return Err(invalid(format!("resource index {e} out of range")));
    }
    let mut out = Vec::new();
    for combo in all_combos(&levels.counts) {
        if combo_admissible(game, &levels, e, &combo, bounds)? {
            out.push(combo);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equilibrium {
    /// Resource id to per-level counts.
    pub counts: BTreeMap<String, Vec<usize>>,
    pub cost: Rational,
    /// One concrete state realizing the counts.
    pub state: State,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub exists: bool,
    pub levels: Vec<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best: Option<Equilibrium>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<Equilibrium>,
    /// Bounds under which the best equilibrium was found.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_bounds: Option<Vec<LevelBound>>,
    /// Distinct admissibility patterns the DP was run on.
    pub dp_runs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveConfig {
    pub max_levels: usize,
    pub parallel: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            max_levels: DEFAULT_MAX_LEVELS,
            parallel: true,
        }
    }
}

/// Candidate gate of a single level, before it is turned into a bound.
#[derive(Clone, Debug)]
enum Gate {
    Vacuous,
    Threshold(Rational),
    Exempt { pos: usize, load: usize },
}

struct Instance<'g> {
    game: &'g Game,
    levels: Levels,
    /// Resources of the common strategy set, ascending.
    support: Vec<usize>,
    combos: Vec<Vec<usize>>,
    combo_cost: Vec<Vec<Rational>>,
    words: usize,
}

/// Result of one DP run: per-resource combo indices and the cost.
type Extreme = (Rational, Vec<usize>);

impl<'g> Instance<'g> {
    fn new(game: &'g Game, config: &SolveConfig) -> Result<Self> {
        if !game.is_singleton() || !game.is_symmetric() {
            return Err(Error::Unsupported(
                "the DP needs a symmetric singleton game".into(),
            ));
        }
        let levels = Levels::of(game);
        if levels.len() > config.max_levels {
            return Err(Error::Unsupported(format!(
                "{} altruism levels exceed the configured maximum {}",
                levels.len(),
                config.max_levels
            )));
        }
        let mut support: Vec<usize> = game
            .agents()
            .first()
            .map(|a| a.strategies.iter().map(|s| s[0]).collect())
            .unwrap_or_default();
        support.sort_unstable();
        let combos = all_combos(&levels.counts);
        let combo_cost = support
            .iter()
            .map(|&e| {
                combos
                    .iter()
                    .map(|c| {
                        let t: usize = c.iter().sum();
                        game.delay(e, t).mul_int(t)
                    })
                    .collect()
            })
            .collect();
        let words = combos.len().div_ceil(64);
        Ok(Instance {
            game,
            levels,
            support,
            combos,
            combo_cost,
            words,
        })
    }

    fn n(&self) -> usize {
        self.levels.total()
    }

    /// Perceived cost of level `l` on support position `pos` at load `t`.
    fn perceived(&self, l: usize, pos: usize, t: usize) -> Rational {
        let e = self.support[pos];
        let beta = &self.levels.betas[l];
        crate::model::weighted_gain(beta, self.game.delay(e, t), self.game.marginal(e, t))
    }

    /// Thresholds over attained perceived values, then exemptions.
    fn gates(&self, l: usize) -> Vec<Gate> {
        if self.levels.counts[l] == 0 {
            return vec![Gate::Vacuous];
        }
        let n = self.n();
        let mut values: Vec<Rational> = (0..self.support.len())
            .flat_map(|pos| (1..=n).map(move |t| (pos, t)))
            .map(|(pos, t)| self.perceived(l, pos, t))
            .collect();
        values.sort();
        values.dedup();
        let mut gates: Vec<Gate> = values.into_iter().map(Gate::Threshold).collect();
        for pos in 0..self.support.len() {
            for load in 1..n {
                if self.perceived(l, pos, load + 1) < self.perceived(l, pos, load) {
                    gates.push(Gate::Exempt { pos, load });
                }
            }
        }
        gates
    }

    fn bound(&self, l: usize, gate: &Gate) -> LevelBound {
        match gate {
            Gate::Vacuous => LevelBound::vacuous(),
            Gate::Threshold(d) => LevelBound::threshold(d.clone()),
            Gate::Exempt { pos, load } => LevelBound {
                d_max: Bound::Finite(self.perceived(l, *pos, *load)),
                d_min_plus: Bound::Finite(self.perceived(l, *pos, *load)),
                exemption: Some(Exemption {
                    resource: self.support[*pos],
                    load: *load,
                }),
            },
        }
    }

    /// Bitset over (support position, combo) of what level `l` allows.
    fn level_mask(&self, l: usize, gate: &Gate) -> Vec<u64> {
        let mut mask = vec![0u64; self.support.len() * self.words];
        let n = self.n();
        for pos in 0..self.support.len() {
            for (ci, combo) in self.combos.iter().enumerate() {
                let t: usize = combo.iter().sum();
                let hosts = combo[l] > 0;
                let ok = match gate {
                    Gate::Vacuous => true,
                    Gate::Threshold(d) => {
                        (!hosts || self.perceived(l, pos, t) <= *d)
                            && (t >= n || self.perceived(l, pos, t + 1) >= *d)
                    }
                    Gate::Exempt { pos: star, load } => {
                        if pos == *star {
                            t == *load && hosts
                        } else {
                            let d = self.perceived(l, *star, *load);
                            let join_star = self.perceived(l, *star, *load + 1);
                            (!hosts || self.perceived(l, pos, t) <= join_star)
                                && (t >= n || self.perceived(l, pos, t + 1) >= d)
                        }
                    }
                };
                if ok {
                    mask[pos * self.words + ci / 64] |= 1 << (ci % 64);
                }
            }
        }
        mask
    }

    /// Distinct joint masks, each with the first gate tuple producing it.
    fn candidates(&self) -> Vec<(Vec<u64>, Vec<LevelBound>)> {
        let per_level: Vec<Vec<(Vec<u64>, LevelBound)>> = (0..self.levels.len())
            .map(|l| {
                let mut seen: HashMap<Vec<u64>, ()> = HashMap::new();
                self.gates(l)
                    .into_iter()
                    .filter_map(|g| {
                        let m = self.level_mask(l, &g);
                        seen.insert(m.clone(), ())
                            .is_none()
                            .then(|| (m, self.bound(l, &g)))
                    })
                    .collect()
            })
            .collect();

        let full = vec![u64::MAX; self.support.len() * self.words];
        let mut joint: Vec<(Vec<u64>, Vec<LevelBound>)> = vec![(full, Vec::new())];
        for options in &per_level {
            let mut next = Vec::new();
            let mut seen: HashMap<Vec<u64>, ()> = HashMap::new();
            for (mask, bounds) in &joint {
                for (m, b) in options {
                    let and: Vec<u64> = mask.iter().zip(m).map(|(x, y)| x & y).collect();
                    let dead = (0..self.support.len()).any(|p| {
                        and[p * self.words..(p + 1) * self.words]
                            .iter()
                            .all(|&w| w == 0)
                    });
                    if dead || seen.insert(and.clone(), ()).is_some() {
                        continue;
                    }
                    let mut bs = bounds.clone();
                    bs.push(b.clone());
                    next.push((and, bs));
                }
            }
            joint = next;
        }
        joint
    }

    fn allowed(&self, mask: &[u64], pos: usize, ci: usize) -> bool {
        mask[pos * self.words + ci / 64] >> (ci % 64) & 1 == 1
    }

    /// Min- and max-cost placements of all agents under `mask`.
    fn run_dp(&self, mask: &[u64]) -> Option<(Extreme, Extreme)> {
        let caps = &self.levels.counts;
        let radix: Vec<usize> = caps.iter().map(|c| c + 1).collect();
        let size: usize = radix.iter().product();
        let encode = |v: &[usize]| v.iter().zip(&radix).fold(0, |acc, (x, r)| acc * r + x);
        let combo_codes: Vec<usize> = self.combos.iter().map(|c| encode(c)).collect();
        // combos are enumerated in the same mixed radix, so code == index
        debug_assert!(combo_codes.iter().enumerate().all(|(i, &c)| i == c));
        let fits = |used: usize, ci: usize| {
            let mut u = used;
            let mut c = ci;
            for r in radix.iter().rev() {
                if u % r + c % r >= *r {
                    return false;
                }
                u /= r;
                c /= r;
            }
            true
        };

        type Cell = Option<(Rational, usize)>;
        let mut lo: Vec<Cell> = vec![None; size];
        let mut hi: Vec<Cell> = vec![None; size];
        lo[0] = Some((Rational::zero(), usize::MAX));
        hi[0] = Some((Rational::zero(), usize::MAX));
        let mut back_lo: Vec<Vec<usize>> = Vec::with_capacity(self.support.len());
        let mut back_hi: Vec<Vec<usize>> = Vec::with_capacity(self.support.len());
        for pos in 0..self.support.len() {
            let mut nlo: Vec<Cell> = vec![None; size];
            let mut nhi: Vec<Cell> = vec![None; size];
            for ci in 0..self.combos.len() {
                if !self.allowed(mask, pos, ci) {
                    continue;
                }
                let c = &self.combo_cost[pos][ci];
                for used in 0..size {
                    if lo[used].is_none() || !fits(used, ci) {
                        continue;
                    }
                    let to = used + ci;
                    if let Some((v, _)) = &lo[used] {
                        let cand = v + c;
                        if nlo[to].as_ref().is_none_or(|(best, _)| cand < *best) {
                            nlo[to] = Some((cand, ci));
                        }
                    }
                    if let Some((v, _)) = &hi[used] {
                        let cand = v + c;
                        if nhi[to].as_ref().is_none_or(|(best, _)| cand > *best) {
                            nhi[to] = Some((cand, ci));
                        }
                    }
                }
            }
            back_lo.push(
                nlo.iter()
                    .map(|x| x.as_ref().map_or(usize::MAX, |p| p.1))
                    .collect(),
            );
            back_hi.push(
                nhi.iter()
                    .map(|x| x.as_ref().map_or(usize::MAX, |p| p.1))
                    .collect(),
            );
            lo = nlo;
            hi = nhi;
        }
        let goal = size - 1;
        let trace = |back: &[Vec<usize>]| {
            let mut at = goal;
            let mut picks = vec![0; self.support.len()];
            for pos in (0..self.support.len()).rev() {
                let ci = back[pos][at];
                picks[pos] = ci;
                at -= ci;
            }
            debug_assert_eq!(at, 0);
            picks
        };
        let min_cost = lo[goal].as_ref()?.0.clone();
        let max_cost = hi[goal].as_ref()?.0.clone();
        Some(((min_cost, trace(&back_lo)), (max_cost, trace(&back_hi))))
    }

    /// Full per-resource count matrix in resource order, for tie-breaks.
    fn count_matrix(&self, picks: &[usize]) -> Vec<Vec<usize>> {
        let mut m = vec![vec![0; self.levels.len()]; self.game.n_resources()];
        for (pos, &ci) in picks.iter().enumerate() {
            m[self.support[pos]] = self.combos[ci].clone();
        }
        m
    }

    fn equilibrium(&self, cost: Rational, matrix: &[Vec<usize>]) -> Equilibrium {
        let counts = self
            .game
            .resources()
            .iter()
            .zip(matrix)
            .map(|(r, c)| (r.id.clone(), c.clone()))
            .collect();
        // hand out resources to agents level by level, in agent order
        let mut left: Vec<Vec<usize>> = matrix.to_vec();
        let choice = self
            .game
            .agents()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let l = self.levels.of_agent[i];
                let e = (0..left.len())
                    .find(|&e| left[e][l] > 0)
                    .expect("counts cover every agent");
                left[e][l] -= 1;
                a.strategies
                    .iter()
                    .position(|s| s[0] == e)
                    .expect("support resource is a strategy")
            })
            .collect();
        Equilibrium {
            counts,
            cost,
            state: State(choice),
        }
    }
}

pub fn solve_symmetric_singleton(game: &Game) -> Result<SolveReport> {
    solve_symmetric_singleton_with(game, &SolveConfig::default())
}

pub fn solve_symmetric_singleton_with(game: &Game, config: &SolveConfig) -> Result<SolveReport> {
    let inst = Instance::new(game, config)?;
    let candidates = inst.candidates();
    let run = |(mask, _): &(Vec<u64>, Vec<LevelBound>)| inst.run_dp(mask);
    let results: Vec<Option<(Extreme, Extreme)>> = if config.parallel {
        candidates.par_iter().map(run).collect()
    } else {
        candidates.iter().map(run).collect()
    };

    type Pick = (Rational, Vec<Vec<usize>>, usize);
    let mut best: Option<Pick> = None;
    let mut worst: Option<Pick> = None;
    for (k, r) in results.into_iter().enumerate() {
        let Some(((lo, lo_picks), (hi, hi_picks))) = r else {
            continue;
        };
        let lo_m = inst.count_matrix(&lo_picks);
        let hi_m = inst.count_matrix(&hi_picks);
        if best.as_ref().is_none_or(|(c, m, _)| (&lo, &lo_m) < (c, m)) {
            best = Some((lo, lo_m, k));
        }
        if worst
            .as_ref()
            .is_none_or(|(c, m, _)| hi > *c || (hi == *c && hi_m < *m))
        {
            worst = Some((hi, hi_m, k));
        }
    }

    let report = SolveReport {
        exists: best.is_some(),
        levels: inst.levels.betas.clone(),
        witness_bounds: best.as_ref().map(|(_, _, k)| candidates[*k].1.clone()),
        best: best.map(|(c, m, _)| inst.equilibrium(c, &m)),
        worst: worst.map(|(c, m, _)| inst.equilibrium(c, &m)),
        dp_runs: candidates.len(),
    };
    #[cfg(debug_assertions)]
    for eq in report.best.iter().chain(&report.worst) {
        debug_assert!(crate::model::is_nash(game, &eq.state).unwrap_or(false));
    }
    Ok(report)
}

/// Cheapest state overall: with every agent a pure altruist, equilibria are
/// the local optima of the social cost, so the best one is the optimum.
pub fn social_optimum_symmetric(game: &Game) -> Result<Equilibrium> {
    let altruists = game.with_betas(&vec![Rational::one(); game.n_agents()])?;
    let report = solve_symmetric_singleton(&altruists)?;
    let mut opt = report
        .best
        .ok_or_else(|| Error::Infeasible("no local optimum found".into()))?;
    // report counts for the caller's own levels: all in one column
    for v in opt.counts.values_mut() {
        *v = vec![v.iter().sum()];
    }
    Ok(opt)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AltruistCount {
    pub altruists: usize,
    pub exists: bool,
    pub best_cost: Option<Rational>,
    pub worst_cost: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdReport {
    pub optimum: Rational,
    pub n1_plus: Option<usize>,
    pub n1_minus: Option<usize>,
    pub sweep: Vec<AltruistCount>,
}

/// Sweeps the number `k` of pure altruists (the rest egoists) and reports
/// the first `k` for which some equilibrium, respectively every
/// equilibrium, is socially optimal.
pub fn thresholds(game: &Game) -> Result<ThresholdReport> {
    let n = game.n_agents();
    let optimum = social_optimum_symmetric(game)?.cost;
    let sweep = (0..=n)
        .into_par_iter()
        .map(|k| {
            let betas: Vec<Rational> = (0..n)
                .map(|i| {
                    if i < k {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            let r = solve_symmetric_singleton(&game.with_betas(&betas)?)?;
            Ok(AltruistCount {
                altruists: k,
                exists: r.exists,
                best_cost: r.best.map(|b| b.cost),
                worst_cost: r.worst.map(|w| w.cost),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let first =
        |f: &dyn Fn(&AltruistCount) -> bool| sweep.iter().find(|s| f(s)).map(|s| s.altruists);
    let n1_plus = first(&|s| s.best_cost.as_ref() == Some(&optimum));
    let n1_minus = first(&|s| s.worst_cost.as_ref() == Some(&optimum));
    Ok(ThresholdReport {
        optimum,
        n1_plus,
        n1_minus,
        sweep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::canned;
    use crate::model::{AgentSpec, Resource};

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d)
    }

    fn two_resource(d1: DelayFunction, d2: DelayFunction, betas: &[Rational]) -> Game {
        Game::new(
            vec![Resource::new("r1", d1), Resource::new("r2", d2)],
            betas
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    AgentSpec::new(format!("a{i}"), b.clone(), vec![vec!["r1"], vec!["r2"]])
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn perceived_values() {
        let d = DelayFunction::table([4, 8, 9, 11]);
        assert_eq!(
            perceived_delays(&d, &Rational::one(), 2).unwrap(),
            (Rational::from(12), Rational::from(11))
        );
        assert_eq!(
            perceived_delays(&d, &Rational::zero(), 2).unwrap(),
            (Rational::from(8), Rational::from(9))
        );
        assert!(perceived_delays(&d, &Rational::zero(), 4).is_err());
    }

    #[test]
    fn example1_combo_admissibility() {
        let g = canned::example1();
        let bounds = vec![
            LevelBound {
                d_max: Bound::Finite(Rational::from(8)),
                d_min_plus: Bound::Finite(Rational::from(9)),
                exemption: None,
            },
            LevelBound {
                d_max: Bound::Finite(Rational::from(11)),
                d_min_plus: Bound::Finite(Rational::from(11)),
                exemption: None,
            },
        ];
        let combos = resource_combos(&g, 0, &bounds).unwrap();
        assert!(combos.contains(&vec![2, 0]));
    }

    #[test]
    fn enter_probe_skipped_at_full_load() {
        let g = Game::new(
            vec![Resource::new("r", DelayFunction::table([5]))],
            vec![AgentSpec::new("a", Rational::zero(), vec![vec!["r"]])],
        )
        .unwrap();
        let bounds = vec![LevelBound {
            d_max: Bound::Finite(Rational::from(5)),
            d_min_plus: Bound::PosInf,
            exemption: None,
        }];
        assert_eq!(
            resource_combos(&g, 0, &bounds).unwrap(),
            vec![vec![0], vec![1]]
        );
    }

    #[test]
    fn example1_has_no_equilibrium() {
        let r = solve_symmetric_singleton(&canned::example1()).unwrap();
        assert!(!r.exists);
        assert!(r.best.is_none() && r.worst.is_none());
    }

    #[test]
    fn footnote_best_and_worst() {
        let r = solve_symmetric_singleton(&canned::footnote_symmetric()).unwrap();
        assert!(r.exists);
        assert_eq!(r.best.unwrap().cost, Rational::from(106));
        let worst = r.worst.unwrap();
        assert_eq!(worst.cost, Rational::from(108));
        assert_eq!(worst.counts["r1"], vec![3]);
    }

    #[test]
    fn lone_egoist_takes_the_cheaper_resource() {
        let g = two_resource(
            DelayFunction::table([5]),
            DelayFunction::table([3]),
            &[Rational::zero()],
        );
        let r = solve_symmetric_singleton(&g).unwrap();
        assert_eq!(r.best.as_ref().unwrap().cost, Rational::from(3));
        assert_eq!(r.worst.unwrap().cost, Rational::from(3));
        assert_eq!(
            social_optimum_symmetric(&g).unwrap().cost,
            Rational::from(3)
        );
    }

    #[test]
    fn optima() {
        assert_eq!(
            social_optimum_symmetric(&canned::footnote_symmetric())
                .unwrap()
                .cost,
            Rational::from(106)
        );
        assert_eq!(
            social_optimum_symmetric(&canned::example1()).unwrap().cost,
            Rational::from(31)
        );
    }

    #[test]
    fn threshold_examples() {
        let g = two_resource(
            DelayFunction::table([1, 2, 3]),
            DelayFunction::table([q(5, 2), q(5, 2), q(5, 2)]),
            &[Rational::zero(), Rational::zero(), Rational::zero()],
        );
        let t = thresholds(&g).unwrap();
        assert_eq!(t.optimum, Rational::from(6));
        assert_eq!(t.n1_plus, Some(2));

        let t = thresholds(&canned::footnote_symmetric()).unwrap();
        assert_eq!(t.n1_minus, None);
        assert_eq!(t.optimum, Rational::from(106));

        let g = two_resource(
            DelayFunction::linear(1),
            DelayFunction::linear(1),
            &[Rational::zero(), Rational::zero()],
        );
        let t = thresholds(&g).unwrap();
        assert_eq!((t.n1_plus, t.n1_minus), (Some(0), Some(0)));
    }

    #[test]
    fn unsupported_inputs() {
        assert!(matches!(
            solve_symmetric_singleton(&canned::footnote_asymmetric()),
            Err(Error::Unsupported(_))
        ));
        let g = two_resource(
            DelayFunction::linear(1),
            DelayFunction::linear(2),
            &[q(0, 1), q(1, 4), q(1, 2), q(3, 4), q(1, 1)],
        );
        assert!(matches!(
            solve_symmetric_singleton(&g),
            Err(Error::Unsupported(_))
        ));
        let relaxed = SolveConfig {
            max_levels: 5,
            parallel: false,
        };
        assert!(solve_symmetric_singleton_with(&g, &relaxed).unwrap().exists);
    }

    #[test]
    fn serial_and_parallel_agree() {
        let g = two_resource(
            DelayFunction::table([1, 5, 6, 9]),
            DelayFunction::table([2, 3, 8, 8]),
            &[q(0, 1), q(1, 2), q(1, 2), q(1, 1)],
        );
        let a = solve_symmetric_singleton_with(
            &g,
            &SolveConfig {
                max_levels: 4,
                parallel: true,
            },
        )
        .unwrap();
        let b = solve_symmetric_singleton_with(
            &g,
            &SolveConfig {
                max_levels: 4,
                parallel: false,
            },
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
