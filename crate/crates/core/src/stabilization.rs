//! Turning a target congestion vector into an equilibrium by making as few
//! agents as possible altruistic, or by paying agents to accept slots.
//!
//! Every resource `e` of the target contributes `n_e` slots; agents are
//! matched to slots in a bipartite graph whose weights say what it costs to
//! keep that agent there.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::matching::{audit, solve_assignment, Assignment, CostMatrix};
use crate::model::{CongestionVector, Game, State};
use crate::rational::Rational;

/// Agents on the left, one slot per unit of target load on the right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotGraph {
    /// Resource of each slot, grouped by resource in index order.
    pub slots: Vec<usize>,
    /// `weights[agent][slot]`, `None` when the edge is forbidden.
    pub weights: CostMatrix,
}

impl SlotGraph {
    pub fn new(
        game: &Game,
        target: &CongestionVector,
        weight: impl Fn(usize, usize) -> Option<Rational>,
    ) -> Result<SlotGraph> {
        check_target(game, target)?;
        let slots: Vec<usize> = target
            .0
            .iter()
            .enumerate()
            .flat_map(|(e, &k)| std::iter::repeat_n(e, k))
            .collect();
        let weights = (0..game.n_agents())
            .map(|i| {
                let per_resource: Vec<Option<Rational>> =
                    (0..game.n_resources()).map(|e| weight(i, e)).collect();
                slots.iter().map(|&e| per_resource[e].clone()).collect()
            })
            .collect();
        Ok(SlotGraph { slots, weights })
    }
}

fn check_target(game: &Game, target: &CongestionVector) -> Result<()> {
    if !game.is_singleton() {
        return Err(Error::Unsupported(
            "stabilization needs a singleton game".into(),
        ));
    }
    if target.0.len() != game.n_resources() {
        return Err(invalid(format!(
            "target has {} entries for {} resources",
            target.0.len(),
            game.n_resources()
        )));
    }
    if target.total() != game.n_agents() {
        return Err(invalid(format!(
            "target places {} agents but the game has {}",
            target.total(),
            game.n_agents()
        )));
    }
    Ok(())
}

fn in_strategies(game: &Game, i: usize, e: usize) -> bool {
    game.agents()[i].strategies.iter().any(|s| s[0] == e)
}

/// Minimum-weight perfect matching, made unique by fixing agents one at a
/// time (in agent order) to the smallest resource id that keeps the
/// optimum. Returns the resource of each agent and the final assignment.
fn lex_min_matching(game: &Game, graph: &SlotGraph) -> Option<(Vec<usize>, Assignment)> {
    let mut weights = graph.weights.clone();
    let optimum = solve_assignment(&weights)?.total;
    let mut by_id: Vec<usize> = (0..game.n_resources()).collect();
    by_id.sort_by(|&a, &b| game.resources()[a].id.cmp(&game.resources()[b].id));
    for i in 0..game.n_agents() {
        for &e in &by_id {
            if !graph
                .slots
                .iter()
                .zip(&weights[i])
                .any(|(&s, w)| s == e && w.is_some())
            {
                continue;
            }
            let restricted: Vec<Option<Rational>> = graph
                .slots
                .iter()
                .zip(&weights[i])
                .map(|(&s, w)| if s == e { w.clone() } else { None })
                .collect();
            let saved = std::mem::replace(&mut weights[i], restricted);
            if solve_assignment(&weights).is_some_and(|a| a.total == optimum) {
                break;
            }
            weights[i] = saved;
        }
    }
    let a = solve_assignment(&weights)?;
    debug_assert_eq!(a.total, optimum);
    debug_assert_eq!(audit(&weights, &a), Ok(()));
    let resources = a.row_to_col.iter().map(|&j| graph.slots[j]).collect();
    Some((resources, a))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AltruistSet {
    /// Agents that must be pure altruists, ascending.
    pub altruists: Vec<usize>,
    /// Resource of each agent.
    pub allocation: Vec<usize>,
}

impl AltruistSet {
    pub fn size(&self) -> usize {
        self.altruists.len()
    }
}

/// The game with `set.altruists` as pure altruists and everyone else as
/// egoists, together with the allocation as a state.
pub fn stabilized_game(game: &Game, set: &AltruistSet) -> Result<(Game, State)> {
    let betas: Vec<Rational> = (0..game.n_agents())
        .map(|i| {
            if set.altruists.binary_search(&i).is_ok() {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    let g = game.with_betas(&betas)?;
    let state = allocation_state(game, &set.allocation);
    Ok((g, state))
}

fn allocation_state(game: &Game, allocation: &[usize]) -> State {
    State(
        allocation
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                game.agents()[i]
                    .strategies
                    .iter()
                    .position(|s| s[0] == e)
                    .expect("matched to an own strategy")
            })
            .collect(),
    )
}

/// Fewest pure altruists (everyone else selfish) under which `target` is
/// the congestion vector of an equilibrium; `None` if no choice works.
/// Betas in `game` are ignored.
pub fn min_altruist_set(game: &Game, target: &CongestionVector) -> Result<Option<AltruistSet>> {
    check_target(game, target)?;
    let n = &target.0;
    let graph = SlotGraph::new(game, target, |i, e| {
        if n[e] == 0 || !in_strategies(game, i, e) {
            return None;
        }
        let others = game.agents()[i]
            .strategies
            .iter()
            .map(|s| s[0])
            .filter(|&f| f != e);
        let mut selfish = true;
        let mut altruistic = true;
        for f in others {
            selfish &= game.delay(e, n[e]) <= game.delay(f, n[f] + 1);
            altruistic &= game.marginal(e, n[e]) <= game.marginal(f, n[f] + 1);
        }
        if selfish {
            Some(Rational::zero())
        } else if altruistic {
            Some(Rational::one())
        } else {
            None
        }
    })?;
    let Some((allocation, a)) = lex_min_matching(game, &graph) else {
        return Ok(None);
    };
    let altruists = a
        .row_to_col
        .iter()
        .enumerate()
        .filter(|&(i, &j)| {
            graph.weights[i][j]
                .as_ref()
                .is_some_and(Rational::is_positive)
        })
        .map(|(i, _)| i)
        .collect();
    Ok(Some(AltruistSet {
        altruists,
        allocation,
    }))
}

/// Non-negative cost `c_ie` of keeping agent `i` on resource `e`, given for
/// exactly the resources in the agent's strategy list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityCostMatrix {
    costs: Vec<Vec<Option<Rational>>>,
}

impl StabilityCostMatrix {
    /// `costs[agent][resource]`.
    pub fn new(game: &Game, costs: Vec<Vec<Option<Rational>>>) -> Result<Self> {
        if costs.len() != game.n_agents() {
            return Err(invalid("cost matrix row count differs from agent count"));
        }
        for (i, row) in costs.iter().enumerate() {
            let id = &game.agents()[i].id;
            if row.len() != game.n_resources() {
                return Err(invalid(format!(
                    "cost row of agent {id:?} has wrong length"
                )));
            }
            for (e, c) in row.iter().enumerate() {
                let rid = &game.resources()[e].id;
                match (c, in_strategies(game, i, e)) {
                    (None, true) => {
                        return Err(invalid(format!("no cost for agent {id:?} on {rid:?}")))
                    }
                    (Some(_), false) => {
                        return Err(invalid(format!(
                            "cost for agent {id:?} on {rid:?}, which it cannot use"
                        )))
                    }
                    (Some(c), true) if c.is_negative() => {
                        return Err(invalid(format!(
                            "negative cost for agent {id:?} on {rid:?}"
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(StabilityCostMatrix { costs })
    }

    /// From `{agent id: {resource id: cost}}`.
    pub fn from_ids(
        game: &Game,
        map: &BTreeMap<String, BTreeMap<String, Rational>>,
    ) -> Result<Self> {
        let mut costs = vec![vec![None; game.n_resources()]; game.n_agents()];
        for (aid, row) in map {
            let i = game.agent_by_id(aid)?;
            for (rid, c) in row {
                let e = game
                    .resource_index(rid)
                    .ok_or_else(|| invalid(format!("unknown resource {rid:?}")))?;
                costs[i][e] = Some(c.clone());
            }
        }
        StabilityCostMatrix::new(game, costs)
    }

    pub fn get(&self, agent: usize, resource: usize) -> Option<&Rational> {
        self.costs[agent][resource].as_ref()
    }

    pub fn rows(&self) -> &[Vec<Option<Rational>>] {
        &self.costs
    }

    /// Copy with one agent's row replaced, e.g. by a misreport.
    pub fn with_row(&self, game: &Game, agent: usize, row: Vec<Option<Rational>>) -> Result<Self> {
        let mut costs = self.costs.clone();
        costs[agent] = row;
        StabilityCostMatrix::new(game, costs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Allocation {
    /// Resource of each agent.
    pub allocation: Vec<usize>,
    pub total: Rational,
}

fn cost_graph(
    game: &Game,
    target: &CongestionVector,
    costs: &StabilityCostMatrix,
) -> Result<SlotGraph> {
    if costs.costs.len() != game.n_agents() {
        return Err(invalid("cost matrix does not fit the game"));
    }
    SlotGraph::new(game, target, |i, e| costs.costs[i][e].clone())
}

/// Cheapest way to place the agents on the target slots under `costs`.
pub fn min_stability_cost_allocation(
    game: &Game,
    target: &CongestionVector,
    costs: &StabilityCostMatrix,
) -> Result<Allocation> {
    let graph = cost_graph(game, target, costs)?;
    let (allocation, a) = lex_min_matching(game, &graph)
        .ok_or_else(|| Error::Infeasible("no perfect matching for the target".into()))?;
    Ok(Allocation {
        allocation,
        total: a.total,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VcgOutcome {
    pub allocation: Vec<usize>,
    pub total: Rational,
    /// Amount charged to each agent.
    pub payments: Vec<Rational>,
    /// `-c_i - p_i` under the reported costs.
    pub utilities: Vec<Rational>,
}

/// VCG with the Clarke pivot: agent `i` pays the others' cost in the chosen
/// allocation minus the least cost the others could reach without `i`
/// (all slots kept, one left empty).
pub fn vcg_mechanism(
    game: &Game,
    target: &CongestionVector,
    reported: &StabilityCostMatrix,
) -> Result<VcgOutcome> {
    let graph = cost_graph(game, target, reported)?;
    let alloc = min_stability_cost_allocation(game, target, reported)?;
    let own: Vec<Rational> = alloc
        .allocation
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            reported.costs[i][e]
                .clone()
                .expect("allocated on a priced resource")
        })
        .collect();
    let pivots = (0..game.n_agents())
        .into_par_iter()
        .map(|i| {
            let mut rest = graph.weights.clone();
            rest.remove(i);
            solve_assignment(&rest).map(|a| a.total).ok_or_else(|| {
                Error::Infeasible(format!(
                    "without agent {:?} the others cannot be placed",
                    game.agents()[i].id
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let payments: Vec<Rational> = own
        .iter()
        .zip(&pivots)
        .map(|(c, h)| &alloc.total - c - h)
        .collect();
    let utilities = own.iter().zip(&payments).map(|(c, p)| -(c + p)).collect();
    Ok(VcgOutcome {
        allocation: alloc.allocation,
        total: alloc.total,
        payments,
        utilities,
    })
}

/// True utility of `agent` when the mechanism runs on `reported` costs.
pub fn utility_under_report(
    game: &Game,
    target: &CongestionVector,
    truth: &StabilityCostMatrix,
    reported: &StabilityCostMatrix,
    agent: usize,
) -> Result<Rational> {
    let out = vcg_mechanism(game, target, reported)?;
    let e = out.allocation[agent];
    let c = truth.costs[agent][e]
        .clone()
        .expect("allocated on a priced resource");
    Ok(-(c + &out.payments[agent]))
}
