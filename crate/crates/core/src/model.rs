//! Congestion games with altruists.
//!
//! A [`Game`] owns its resources and agents and caches, for every resource,
//! the delay `d_e(k)` and the marginal social delay
//! `d'_e(k) = k d_e(k) - (k-1) d_e(k-1)` for all congestions `0..=n`. Every
//! later computation (costs, move deltas, equilibrium checks, the DP, the
//! oracle) reads those tables, so nothing is re-evaluated in inner loops.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rational::Rational;

/// Non-decreasing delay function of a resource.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DelayFunction {
    /// Explicit values for congestion `1..=values.len()`.
    Table { values: Vec<Rational> },
    /// `a x`
    Linear { a: Rational },
    /// `a x + b`
    Affine { a: Rational, b: Rational },
    /// `a x^2`
    Quadratic { a: Rational },
}

impl DelayFunction {
    pub fn table<I, R>(values: I) -> Self
    where
        I: IntoIterator<Item = R>,
        R: Into<Rational>,
    {
        DelayFunction::Table {
            values: values.into_iter().map(Into::into).collect(),
        }
    }

    pub fn linear(a: impl Into<Rational>) -> Self {
        DelayFunction::Linear { a: a.into() }
    }

    pub fn affine(a: impl Into<Rational>, b: impl Into<Rational>) -> Self {
        DelayFunction::Affine {
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn constant(b: impl Into<Rational>) -> Self {
        DelayFunction::affine(Rational::zero(), b)
    }

    pub fn quadratic(a: impl Into<Rational>) -> Self {
        DelayFunction::Quadratic { a: a.into() }
    }

    /// `d(n)`. A table has no value at `n = 0`; zero is returned there since
    /// the only use of `d(0)` is the vanishing term `0 * d(0)` inside `d'(1)`.
    pub fn eval(&self, n: usize) -> Result<Rational> {
        Ok(match self {
            DelayFunction::Table { values } => {
                if n == 0 {
                    Rational::zero()
                } else {
                    values.get(n - 1).cloned().ok_or_else(|| {
                        invalid(format!(
                            "congestion {n} exceeds delay table length {}",
                            values.len()
                        ))
                    })?
                }
            }
            DelayFunction::Linear { a } => a.mul_int(n),
            DelayFunction::Affine { a, b } => a.mul_int(n) + b,
            DelayFunction::Quadratic { a } => a.mul_int(n * n),
        })
    }

    /// Largest congestion the function is defined for, if bounded.
    pub fn max_congestion(&self) -> Option<usize> {
        match self {
            DelayFunction::Table { values } => Some(values.len()),
            _ => None,
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, DelayFunction::Linear { .. })
    }

    /// Constant delay `b > 0` written as an affine function with `a = 0`.
    pub fn constant_value(&self) -> Option<&Rational> {
        match self {
            DelayFunction::Affine { a, b } if a.is_zero() && b.is_positive() => Some(b),
            _ => None,
        }
    }

    /// Checks non-negativity and monotonicity and that the function is
    /// defined up to `n_agents`.
    pub fn validate(&self, n_agents: usize) -> Result<()> {
        match self {
            DelayFunction::Table { values } => {
                if values.len() < n_agents {
                    return Err(invalid(format!(
                        "delay table has {} entries but the game has {n_agents} agents",
                        values.len()
                    )));
                }
                if values.iter().any(Rational::is_negative) {
                    return Err(invalid("delay table contains a negative value"));
                }
                if values.windows(2).any(|w| w[1] < w[0]) {
                    return Err(invalid("delay table is decreasing somewhere"));
                }
            }
            DelayFunction::Linear { a } | DelayFunction::Quadratic { a } => {
                if a.is_negative() {
                    return Err(invalid("negative delay coefficient"));
                }
            }
            DelayFunction::Affine { a, b } => {
                if a.is_negative() || b.is_negative() {
                    return Err(invalid("negative delay coefficient"));
                }
            }
        }
        Ok(())
    }
}

/// `d'(n) = n d(n) - (n-1) d(n-1)`, with `d'(0) = 0`.
pub fn altruistic_delay(d: &DelayFunction, n: usize) -> Result<Rational> {
    if n == 0 {
        return Ok(Rational::zero());
    }
    let here = d.eval(n)?.mul_int(n);
    let before = d.eval(n - 1)?.mul_int(n - 1);
    Ok(here - before)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resource {
    pub id: String,
    pub delay: DelayFunction,
}

impl Resource {
    pub fn new(id: impl Into<String>, delay: DelayFunction) -> Self {
        Resource {
            id: id.into(),
            delay,
        }
    }
}

/// Agent as written in a game file: strategies name resources by id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub id: String,
    pub beta: Rational,
    pub strategies: Vec<Vec<String>>,
}

impl AgentSpec {
    pub fn new<S: Into<String>>(id: S, beta: Rational, strategies: Vec<Vec<&str>>) -> Self {
        AgentSpec {
            id: id.into(),
            beta,
            strategies: strategies
                .into_iter()
                .map(|s| s.into_iter().map(str::to_string).collect())
                .collect(),
        }
    }
}

/// The on-disk game document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSpec {
    pub resources: Vec<Resource>,
    pub agents: Vec<AgentSpec>,
}

/// Validated agent: strategies are sorted, deduplicated resource indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent {
    pub id: String,
    pub beta: Rational,
    pub strategies: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct Game {
    resources: Vec<Resource>,
    agents: Vec<Agent>,
    resource_index: HashMap<String, usize>,
    agent_index: HashMap<String, usize>,
    singleton: bool,
    symmetric: bool,
    delay_cache: Vec<Vec<Rational>>,
    marginal_cache: Vec<Vec<Rational>>,
}

impl PartialEq for Game {
    fn eq(&self, other: &Self) -> bool {
        self.resources == other.resources && self.agents == other.agents
    }
}

impl Game {
    pub fn new(resources: Vec<Resource>, agents: Vec<AgentSpec>) -> Result<Game> {
        Game::from_spec(GameSpec { resources, agents })
    }

    pub fn from_spec(spec: GameSpec) -> Result<Game> {
        let n = spec.agents.len();
        let mut resource_index = HashMap::new();
        for (i, r) in spec.resources.iter().enumerate() {
            if resource_index.insert(r.id.clone(), i).is_some() {
                return Err(invalid(format!("duplicate resource id {:?}", r.id)));
            }
            r.delay
                .validate(n)
                .map_err(|e| invalid(format!("resource {:?}: {e}", r.id)))?;
        }
        let mut agent_index = HashMap::new();
        let mut agents = Vec::with_capacity(n);
        for (i, a) in spec.agents.into_iter().enumerate() {
            if agent_index.insert(a.id.clone(), i).is_some() {
                return Err(invalid(format!("duplicate agent id {:?}", a.id)));
            }
            if a.beta.is_negative() || a.beta > Rational::one() {
                return Err(invalid(format!(
                    "agent {:?}: beta {} not in [0,1]",
                    a.id, a.beta
                )));
            }
            if a.strategies.is_empty() {
                return Err(invalid(format!("agent {:?} has no strategies", a.id)));
            }
            let mut strategies: Vec<Vec<usize>> = Vec::with_capacity(a.strategies.len());
            for s in &a.strategies {
                if s.is_empty() {
                    return Err(invalid(format!("agent {:?} has an empty strategy", a.id)));
                }
                let mut idx = s
                    .iter()
                    .map(|rid| {
                        resource_index.get(rid).copied().ok_or_else(|| {
                            invalid(format!(
                                "agent {:?} references unknown resource {rid:?}",
                                a.id
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                idx.sort_unstable();
                idx.dedup();
                if !strategies.contains(&idx) {
                    strategies.push(idx);
                }
            }
            agents.push(Agent {
                id: a.id,
                beta: a.beta,
                strategies,
            });
        }

        let singleton = agents
            .iter()
            .all(|a| a.strategies.iter().all(|s| s.len() == 1));
        let symmetric = match agents.first() {
            None => true,
            Some(first) => {
                let mut reference = first.strategies.clone();
                reference.sort();
                agents.iter().all(|a| {
                    let mut s = a.strategies.clone();
                    s.sort();
                    s == reference
                })
            }
        };

        let mut delay_cache = Vec::with_capacity(spec.resources.len());
        let mut marginal_cache = Vec::with_capacity(spec.resources.len());
        for r in &spec.resources {
            let d: Vec<Rational> = (0..=n).map(|k| r.delay.eval(k)).collect::<Result<_>>()?;
            let dm: Vec<Rational> = (0..=n)
                .map(|k| {
                    if k == 0 {
                        Rational::zero()
                    } else {
                        d[k].mul_int(k) - d[k - 1].mul_int(k - 1)
                    }
                })
                .collect();
            delay_cache.push(d);
            marginal_cache.push(dm);
        }

        Ok(Game {
            resources: spec.resources,
            agents,
            resource_index,
            agent_index,
            singleton,
            symmetric,
            delay_cache,
            marginal_cache,
        })
    }

    pub fn to_spec(&self) -> GameSpec {
        GameSpec {
            resources: self.resources.clone(),
            agents: self
                .agents
                .iter()
                .map(|a| AgentSpec {
                    id: a.id.clone(),
                    beta: a.beta.clone(),
                    strategies: a
                        .strategies
                        .iter()
                        .map(|s| s.iter().map(|&e| self.resources[e].id.clone()).collect())
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn resources(&self) -> &[Resource] {
        &self.resources
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn n_resources(&self) -> usize {
        self.resources.len()
    }

    pub fn is_singleton(&self) -> bool {
        self.singleton
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn resource_index(&self, id: &str) -> Option<usize> {
        self.resource_index.get(id).copied()
    }

    pub fn agent_index(&self, id: &str) -> Option<usize> {
        self.agent_index.get(id).copied()
    }

    pub fn agent_by_id(&self, id: &str) -> Result<usize> {
        self.agent_index(id)
            .ok_or_else(|| invalid(format!("unknown agent {id:?}")))
    }

    /// Cached `d_e(k)` for `k <= n`.
    pub fn delay(&self, e: usize, k: usize) -> &Rational {
        &self.delay_cache[e][k]
    }

    /// Cached `d'_e(k)` for `k <= n`.
    pub fn marginal(&self, e: usize, k: usize) -> &Rational {
        &self.marginal_cache[e][k]
    }

    /// Number of states `prod_i |S_i|`, saturating.
    pub fn state_space_size(&self) -> u128 {
        self.agents.iter().fold(1u128, |acc, a| {
            acc.saturating_mul(a.strategies.len() as u128)
        })
    }

    /// Copy of the game with every agent's altruism level replaced.
    pub fn with_betas(&self, betas: &[Rational]) -> Result<Game> {
        if betas.len() != self.agents.len() {
            return Err(invalid("beta vector length differs from agent count"));
        }
        let mut spec = self.to_spec();
        for (a, b) in spec.agents.iter_mut().zip(betas) {
            a.beta = b.clone();
        }
        Game::from_spec(spec)
    }

    pub fn check_state(&self, state: &State) -> Result<()> {
        if state.0.len() != self.agents.len() {
            return Err(invalid(format!(
                "state has {} entries for {} agents",
                state.0.len(),
                self.agents.len()
            )));
        }
        for (i, (&c, a)) in state.0.iter().zip(&self.agents).enumerate() {
            if c >= a.strategies.len() {
                return Err(invalid(format!(
                    "agent {i} ({:?}) strategy index {c} out of range",
                    a.id
                )));
            }
        }
        Ok(())
    }

    pub fn strategy_of(&self, state: &State, agent: usize) -> &[usize] {
        &self.agents[agent].strategies[state.0[agent]]
    }

    /// Builds a state from per-agent resource-id lists.
    pub fn state_from_ids(&self, choice: &[Vec<String>]) -> Result<State> {
        if choice.len() != self.agents.len() {
            return Err(invalid("state length differs from agent count"));
        }
        let mut out = Vec::with_capacity(choice.len());
        for (a, ids) in self.agents.iter().zip(choice) {
            let mut idx = ids
                .iter()
                .map(|id| {
                    self.resource_index(id)
                        .ok_or_else(|| invalid(format!("unknown resource {id:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            idx.sort_unstable();
            idx.dedup();
            let pos = a
                .strategies
                .iter()
                .position(|s| *s == idx)
                .ok_or_else(|| invalid(format!("agent {:?} has no strategy {ids:?}", a.id)))?;
            out.push(pos);
        }
        Ok(State(out))
    }
}

/// A strategy index per agent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct State(pub Vec<usize>);

impl State {
    pub fn new(choice: Vec<usize>) -> Self {
        State(choice)
    }
}

/// Per-resource load `n_e`, indexed like `Game::resources`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CongestionVector(pub Vec<usize>);

impl CongestionVector {
    pub fn load(&self, e: usize) -> usize {
        self.0[e]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn to_map(&self, game: &Game) -> BTreeMap<String, usize> {
        game.resources()
            .iter()
            .zip(&self.0)
            .map(|(r, &n)| (r.id.clone(), n))
            .collect()
    }

    /// Builds a vector from a resource-id map; resources not mentioned get 0.
    pub fn from_map(game: &Game, map: &BTreeMap<String, usize>) -> Result<Self> {
        let mut load = vec![0; game.n_resources()];
        for (id, &n) in map {
            let e = game
                .resource_index(id)
                .ok_or_else(|| invalid(format!("unknown resource {id:?} in congestion vector")))?;
            load[e] = n;
        }
        Ok(CongestionVector(load))
    }
}

pub fn congestions(game: &Game, state: &State) -> Result<CongestionVector> {
    game.check_state(state)?;
    Ok(congestions_unchecked(game, state))
}

pub(crate) fn congestions_unchecked(game: &Game, state: &State) -> CongestionVector {
    let mut load = vec![0usize; game.n_resources()];
    for i in 0..game.n_agents() {
        for &e in game.strategy_of(state, i) {
            load[e] += 1;
        }
    }
    CongestionVector(load)
}

/// `sum_e n_e d_e(n_e)`.
pub fn social_cost(game: &Game, state: &State) -> Result<Rational> {
    let load = congestions(game, state)?;
    let cost = social_cost_of_load(game, &load);
    debug_assert_eq!(
        cost,
        (0..game.n_agents())
            .map(|i| agent_delay_with(game, state, &load, i))
            .sum::<Rational>(),
        "resource-wise and agent-wise social cost disagree"
    );
    Ok(cost)
}

pub fn social_cost_of_load(game: &Game, load: &CongestionVector) -> Rational {
    load.0
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(e, &n)| game.delay(e, n).mul_int(n))
        .sum()
}

fn agent_delay_with(game: &Game, state: &State, load: &CongestionVector, agent: usize) -> Rational {
    game.strategy_of(state, agent)
        .iter()
        .map(|&e| game.delay(e, load.0[e]).clone())
        .sum()
}

/// `d_i(S)`: the agent's own delay.
pub fn agent_delay(game: &Game, state: &State, agent: usize) -> Result<Rational> {
    let load = congestions(game, state)?;
    check_agent(game, agent)?;
    Ok(agent_delay_with(game, state, &load, agent))
}

/// `c_i(S) = beta_i c(S) + (1 - beta_i) d_i(S)`.
pub fn individual_cost(game: &Game, state: &State, agent: usize) -> Result<Rational> {
    check_agent(game, agent)?;
    individual_cost_with_beta(game, state, agent, &game.agents()[agent].beta)
}

/// Individual cost the agent would perceive with altruism level `beta`.
pub fn individual_cost_with_beta(
    game: &Game,
    state: &State,
    agent: usize,
    beta: &Rational,
) -> Result<Rational> {
    check_agent(game, agent)?;
    let social = social_cost(game, state)?;
    let own = agent_delay(game, state, agent)?;
    Ok(beta * &social + (Rational::one() - beta) * &own)
}

fn check_agent(game: &Game, agent: usize) -> Result<()> {
    if agent >= game.n_agents() {
        return Err(invalid(format!("agent index {agent} out of range")));
    }
    Ok(())
}

/// Effect of one agent's unilateral switch, measured as "before minus after".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveDelta {
    /// `d_i(S) - d_i(S')`
    pub delta_private: Rational,
    /// `c(S) - c(S')`
    pub delta_social: Rational,
}

impl MoveDelta {
    /// `c_i(S) - c_i(S')` for an agent with altruism level `beta`.
    pub fn cost_decrease(&self, beta: &Rational) -> Rational {
        weighted_gain(beta, &self.delta_private, &self.delta_social)
    }
}

pub(crate) fn weighted_gain(beta: &Rational, private: &Rational, social: &Rational) -> Rational {
    if beta.is_zero() {
        private.clone()
    } else if *beta == Rational::one() {
        social.clone()
    } else {
        (Rational::one() - beta) * private + beta * social
    }
}

/// Telescoped deltas: only resources in the symmetric difference of the two
/// strategies contribute, so shared resources cancel exactly.
pub(crate) fn telescoped_delta(
    game: &Game,
    load: &CongestionVector,
    from: &[usize],
    to: &[usize],
) -> MoveDelta {
    let mut private = Rational::zero();
    let mut social = Rational::zero();
    for &e in from {
        if to.binary_search(&e).is_err() {
            let n = load.0[e];
            private += game.delay(e, n);
            social += game.marginal(e, n);
        }
    }
    for &e in to {
        if from.binary_search(&e).is_err() {
            let n = load.0[e] + 1;
            private -= game.delay(e, n);
            social -= game.marginal(e, n);
        }
    }
    MoveDelta {
        delta_private: private,
        delta_social: social,
    }
}

pub fn move_delta(
    game: &Game,
    state: &State,
    agent: usize,
    new_strategy: usize,
) -> Result<MoveDelta> {
    game.check_state(state)?;
    check_agent(game, agent)?;
    let strategies = &game.agents()[agent].strategies;
    if new_strategy >= strategies.len() {
        return Err(invalid(format!(
            "strategy index {new_strategy} out of range"
        )));
    }
    let load = congestions_unchecked(game, state);
    let from = &strategies[state.0[agent]];
    let to = &strategies[new_strategy];
    let delta = telescoped_delta(game, &load, from, to);

    #[cfg(debug_assertions)]
    {
        let mut after = state.clone();
        after.0[agent] = new_strategy;
        let after_load = congestions_unchecked(game, &after);
        let social = social_cost_of_load(game, &load) - social_cost_of_load(game, &after_load);
        let private = agent_delay_with(game, state, &load, agent)
            - agent_delay_with(game, &after, &after_load, agent);
        debug_assert_eq!(delta.delta_social, social);
        debug_assert_eq!(delta.delta_private, private);
    }
    Ok(delta)
}

/// A strictly improving unilateral switch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Deviation {
    pub agent: usize,
    pub strategy: usize,
    /// `c_i(S) - c_i(S') > 0`
    pub gain: Rational,
}

/// First agent (in index order) with a strictly improving switch, together
/// with that agent's lowest-index improving strategy. `None` means `state` is
/// a pure Nash equilibrium.
pub fn nash_witness(game: &Game, state: &State) -> Result<Option<Deviation>> {
    game.check_state(state)?;
    let load = congestions_unchecked(game, state);
    Ok(first_deviation(game, state, &load))
}

pub fn is_nash(game: &Game, state: &State) -> Result<bool> {
    Ok(nash_witness(game, state)?.is_none())
}

pub(crate) fn first_deviation(
    game: &Game,
    state: &State,
    load: &CongestionVector,
) -> Option<Deviation> {
    for (i, agent) in game.agents().iter().enumerate() {
        let cur = state.0[i];
        let from = &agent.strategies[cur];
        for (j, to) in agent.strategies.iter().enumerate() {
            if j == cur {
                continue;
            }
            let d = telescoped_delta(game, load, from, to);
            let gain = d.cost_decrease(&agent.beta);
            if gain.is_positive() {
                return Some(Deviation {
                    agent: i,
                    strategy: j,
                    gain,
                });
            }
        }
    }
    None
}
