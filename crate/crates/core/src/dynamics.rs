//! Sequential better-response dynamics and the potential functions that
//! certify their convergence.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::model::{
    congestions, congestions_unchecked, individual_cost, telescoped_delta, CongestionVector,
    DelayFunction, Deviation, Game, State,
};
use crate::rational::Rational;

pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;
pub const DEFAULT_CYCLE_STATE_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    /// `sum_e sum_{x <= n_e} d_e(x)`
    Rosenthal,
    /// `(1 - beta) Rosenthal + beta c`, exact when every agent has this beta.
    BetaUniform { beta: Rational },
    /// Weighted potential for `d_e(x) = a_e x` with arbitrary betas.
    LinearWeighted,
}

impl PotentialKind {
    /// The potential whose decrease tracks every improving move of `game`,
    /// if one is known: the weighted one for all-linear games, otherwise the
    /// uniform one when all agents share a beta.
    pub fn for_game(game: &Game) -> Option<PotentialKind> {
        if game.resources().iter().all(|r| r.delay.is_linear()) {
            return Some(PotentialKind::LinearWeighted);
        }
        let first = game.agents().first()?;
        if game.agents().iter().all(|a| a.beta == first.beta) {
            if first.beta.is_zero() {
                Some(PotentialKind::Rosenthal)
            } else {
                Some(PotentialKind::BetaUniform {
                    beta: first.beta.clone(),
                })
            }
        } else {
            None
        }
    }
}

pub fn potential(game: &Game, state: &State, kind: &PotentialKind) -> Result<Rational> {
    let load = congestions(game, state)?;
    check_potential(game, kind)?;
    Ok(potential_of(game, state, &load, kind))
}

fn check_potential(game: &Game, kind: &PotentialKind) -> Result<()> {
    match kind {
        PotentialKind::Rosenthal => Ok(()),
        PotentialKind::BetaUniform { beta } => {
            if let Some(a) = game.agents().iter().find(|a| a.beta != *beta) {
                return Err(Error::Unsupported(format!(
                    "beta-uniform potential with beta {beta}, but agent {:?} has beta {}",
                    a.id, a.beta
                )));
            }
            Ok(())
        }
        PotentialKind::LinearWeighted => {
            if let Some(r) = game.resources().iter().find(|r| !r.delay.is_linear()) {
                return Err(Error::Unsupported(format!(
                    "linear-weighted potential needs linear delays; resource {:?} is not linear",
                    r.id
                )));
            }
            Ok(())
        }
    }
}

fn rosenthal(game: &Game, load: &CongestionVector) -> Rational {
    let mut phi = Rational::zero();
    for (e, &n) in load.0.iter().enumerate() {
        for x in 1..=n {
            phi += game.delay(e, x);
        }
    }
    phi
}

fn potential_of(
    game: &Game,
    state: &State,
    load: &CongestionVector,
    kind: &PotentialKind,
) -> Rational {
    match kind {
        PotentialKind::Rosenthal => rosenthal(game, load),
        PotentialKind::BetaUniform { beta } => {
            let social = crate::model::social_cost_of_load(game, load);
            (Rational::one() - beta) * rosenthal(game, load) + beta * social
        }
        PotentialKind::LinearWeighted => {
            let slope = |e: usize| match &game.resources()[e].delay {
                DelayFunction::Linear { a } => a.clone(),
                _ => unreachable!("checked by check_potential"),
            };
            let mut phi = Rational::zero();
            for (e, &n) in load.0.iter().enumerate() {
                // sum_{j<=n} j + n^2
                phi += slope(e).mul_int(n * (n + 1) / 2 + n * n);
            }
            for (i, agent) in game.agents().iter().enumerate() {
                let b = &agent.beta;
                let w = (b.mul_int(2) - Rational::one()) / (b + Rational::one());
                for &e in game.strategy_of(state, i) {
                    phi -= &w * slope(e);
                }
            }
            phi
        }
    }
}

/// Move-selection rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Policy {
    /// Agents are scanned cyclically from a cursor; the first agent with an
    /// improving move plays its best one and the cursor moves past it.
    RoundRobin,
    /// Uniform choice among all improving moves, from a seeded generator.
    Random(u64),
    /// The move with the largest gain; ties go to the lowest agent, then
    /// the lowest strategy index.
    MaxGain,
}

impl Policy {
    pub fn parse(name: &str, seed: u64) -> Result<Policy> {
        match name {
            "round_robin" | "round-robin" => Ok(Policy::RoundRobin),
            "random" => Ok(Policy::Random(seed)),
            "max_gain" | "max-gain" => Ok(Policy::MaxGain),
            other => Err(invalid(format!("unknown policy {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Policy::RoundRobin => "round_robin",
            Policy::Random(_) => "random",
            Policy::MaxGain => "max_gain",
        }
    }
}

/// Uniformly random strategy profile from a seeded generator.
pub fn random_start(game: &Game, seed: u64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    State(
        game.agents()
            .iter()
            .map(|a| rng.gen_range(0..a.strategies.len()))
            .collect(),
    )
}

/// Mutable part of a policy across steps.
struct Mover {
    policy: Policy,
    cursor: usize,
    rng: ChaCha8Rng,
}

impl Mover {
    fn new(policy: &Policy) -> Self {
        let seed = match policy {
            Policy::Random(s) => *s,
            _ => 0,
        };
        Mover {
            policy: policy.clone(),
            cursor: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn next(&mut self, game: &Game, state: &State, load: &CongestionVector) -> Option<Deviation> {
        let n = game.n_agents();
        match self.policy {
            Policy::RoundRobin => {
                for k in 0..n {
                    let i = (self.cursor + k) % n;
                    if let Some(best) = agent_moves(game, state, load, i)
                        .into_iter()
                        .reduce(|best, d| if d.gain > best.gain { d } else { best })
                    {
                        self.cursor = (i + 1) % n;
                        return Some(best);
                    }
                }
                None
            }
            Policy::Random(_) => {
                let all: Vec<Deviation> = (0..n)
                    .flat_map(|i| agent_moves(game, state, load, i))
                    .collect();
                if all.is_empty() {
                    None
                } else {
                    let k = self.rng.gen_range(0..all.len());
                    all.into_iter().nth(k)
                }
            }
            Policy::MaxGain => (0..n)
                .flat_map(|i| agent_moves(game, state, load, i))
                .reduce(|best, d| if d.gain > best.gain { d } else { best }),
        }
    }
}

/// All strictly improving switches of one agent, in strategy order.
fn agent_moves(game: &Game, state: &State, load: &CongestionVector, i: usize) -> Vec<Deviation> {
    let agent = &game.agents()[i];
    let cur = state.0[i];
    let from = &agent.strategies[cur];
    agent
        .strategies
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != cur)
        .filter_map(|(j, to)| {
            let gain = telescoped_delta(game, load, from, to).cost_decrease(&agent.beta);
            gain.is_positive().then_some(Deviation {
                agent: i,
                strategy: j,
                gain,
            })
        })
        .collect()
}

/// One improving move under `policy`, evaluated from a fresh policy state
/// (round robin starts at agent 0). `None` means `state` is a Nash
/// equilibrium.
pub fn find_improving_move(
    game: &Game,
    state: &State,
    policy: &Policy,
) -> Result<Option<Deviation>> {
    let load = congestions(game, state)?;
    Ok(Mover::new(policy).next(game, state, &load))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub step: u64,
    pub agent: usize,
    pub from: usize,
    pub to: usize,
    /// Mover's individual cost before and after the switch.
    pub cost_before: Rational,
    pub cost_after: Rational,
    /// Tracked potential after the switch, when one applies.
    pub potential: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DynamicsReport {
    pub final_state: State,
    pub converged: bool,
    pub steps: u64,
    pub cycle_detected: bool,
    /// True when the state set outgrew its budget and cycle checks stopped.
    pub cycle_check_disabled: bool,
    pub potential_kind: Option<PotentialKind>,
    pub trajectory: Option<Vec<Step>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicsConfig {
    pub max_steps: u64,
    /// Visited states kept for cycle detection; 0 disables it.
    pub cycle_state_budget: usize,
    pub record_trajectory: bool,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            max_steps: DEFAULT_MAX_STEPS,
            cycle_state_budget: DEFAULT_CYCLE_STATE_BUDGET,
            record_trajectory: false,
        }
    }
}

pub fn run_dynamics(
    game: &Game,
    start: &State,
    policy: &Policy,
    max_steps: u64,
) -> Result<DynamicsReport> {
    run_dynamics_with(
        game,
        start,
        policy,
        &DynamicsConfig {
            max_steps,
            ..DynamicsConfig::default()
        },
    )
}

pub fn run_dynamics_with(
    game: &Game,
    start: &State,
    policy: &Policy,
    config: &DynamicsConfig,
) -> Result<DynamicsReport> {
    game.check_state(start)?;
    let kind = PotentialKind::for_game(game);
    let mut state = start.clone();
    let mut load = congestions_unchecked(game, &state);
    let mut mover = Mover::new(policy);
    let mut visited: HashSet<State> = HashSet::new();
    let mut hashing = config.cycle_state_budget > 0;
    let mut cycle_check_disabled = false;
    let mut trajectory = config.record_trajectory.then(Vec::new);
    let mut phi = kind.as_ref().map(|k| potential_of(game, &state, &load, k));
    if hashing {
        visited.insert(state.clone());
    }

    let mut steps = 0u64;
    let mut converged = false;
    let mut cycle_detected = false;
    loop {
        let Some(dev) = mover.next(game, &state, &load) else {
            converged = true;
            break;
        };
        if steps == config.max_steps {
            break;
        }
        let i = dev.agent;
        let from = state.0[i];
        let cost_before = trajectory
            .as_ref()
            .map(|_| individual_cost(game, &state, i))
            .transpose()?;

        let strategies = &game.agents()[i].strategies;
        for &e in &strategies[from] {
            load.0[e] -= 1;
        }
        for &e in &strategies[dev.strategy] {
            load.0[e] += 1;
        }
        state.0[i] = dev.strategy;
        steps += 1;

        if let Some(k) = &kind {
            let next = potential_of(game, &state, &load, k);
            debug_assert!(
                phi.as_ref().is_some_and(|p| next < *p),
                "potential did not decrease on an improving move"
            );
            phi = Some(next);
        }
        if let Some(t) = trajectory.as_mut() {
            t.push(Step {
                step: steps,
                agent: i,
                from,
                to: dev.strategy,
                cost_before: cost_before.expect("computed with trajectory"),
                cost_after: individual_cost(game, &state, i)?,
                potential: phi.clone(),
            });
        }
        if hashing {
            if !visited.insert(state.clone()) {
                cycle_detected = true;
                break;
            }
            if visited.len() > config.cycle_state_budget {
                hashing = false;
                cycle_check_disabled = true;
                visited = HashSet::new();
            }
        }
    }
    debug_assert!(!converged || crate::model::first_deviation(game, &state, &load).is_none());
    Ok(DynamicsReport {
        final_state: state,
        converged,
        steps,
        cycle_detected,
        cycle_check_disabled,
        potential_kind: kind,
        trajectory,
    })
}

/// One line per move: `step agent from→to cost_before cost_after potential`,
/// with `-` for an untracked potential.
pub fn format_trajectory(game: &Game, steps: &[Step]) -> String {
    let mut out = String::new();
    for s in steps {
        let phi = s
            .potential
            .as_ref()
            .map_or_else(|| "-".to_string(), Rational::to_string);
        let _ = writeln!(
            out,
            "{} {} {}→{} {} {} {}",
            s.step,
            game.agents()[s.agent].id,
            s.from,
            s.to,
            s.cost_before,
            s.cost_after,
            phi
        );
    }
    out
}
