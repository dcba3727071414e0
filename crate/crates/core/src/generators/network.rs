//! Network congestion games and their expansion into explicit path
//! strategies.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{AgentSpec, DelayFunction, Game, Resource};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub from: String,
    pub to: String,
    pub delay: DelayFunction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Player {
    pub id: String,
    pub source: String,
    pub target: String,
    pub beta: Rational,
}

/// Directed network whose players choose simple source-target paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkGame {
    pub graph: Graph,
    pub players: Vec<Player>,
}

impl NetworkGame {
    pub fn new() -> Self {
        NetworkGame {
            graph: Graph {
                nodes: Vec::new(),
                edges: Vec::new(),
            },
            players: Vec::new(),
        }
    }

    /// Adds the node if it is not present yet.
    pub fn node(&mut self, name: &str) -> &mut Self {
        if !self.graph.nodes.iter().any(|n| n == name) {
            self.graph.nodes.push(name.to_string());
        }
        self
    }

    /// Adds an edge, creating both end nodes on demand.
    pub fn edge(&mut self, id: &str, from: &str, to: &str, delay: DelayFunction) -> &mut Self {
        self.node(from).node(to);
        self.graph.edges.push(Edge {
            id: id.to_string(),
            from: from.to_string(),
            to: to.to_string(),
            delay,
        });
        self
    }

    pub fn player(&mut self, id: &str, source: &str, target: &str, beta: Rational) -> &mut Self {
        self.players.push(Player {
            id: id.to_string(),
            source: source.to_string(),
            target: target.to_string(),
            beta,
        });
        self
    }

    pub fn edge_by_id(&self, id: &str) -> Option<&Edge> {
        self.graph.edges.iter().find(|e| e.id == id)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashMap::new();
        for (i, n) in self.graph.nodes.iter().enumerate() {
            if seen.insert(n.as_str(), i).is_some() {
                return Err(invalid(format!("duplicate node {n:?}")));
            }
        }
        let mut edge_ids = HashMap::new();
        for e in &self.graph.edges {
            if edge_ids.insert(e.id.as_str(), ()).is_some() {
                return Err(invalid(format!("duplicate edge id {:?}", e.id)));
            }
            for end in [&e.from, &e.to] {
                if !seen.contains_key(end.as_str()) {
                    return Err(invalid(format!(
                        "edge {:?} uses unknown node {end:?}",
                        e.id
                    )));
                }
            }
            e.delay
                .validate(self.players.len())
                .map_err(|err| invalid(format!("edge {:?}: {err}", e.id)))?;
        }
        for p in &self.players {
            for end in [&p.source, &p.target] {
                if !seen.contains_key(end.as_str()) {
                    return Err(invalid(format!(
                        "player {:?} uses unknown node {end:?}",
                        p.id
                    )));
                }
            }
        }
        Ok(())
    }

    /// All simple paths from `source` to `target` as edge-index lists, in
    /// lexicographic order of (node sequence, edge sequence). Refuses with
    /// [`Error::Budget`] once more than `cap` paths exist.
    pub fn simple_paths(&self, source: &str, target: &str, cap: usize) -> Result<Vec<Vec<usize>>> {
        let index: HashMap<&str, usize> = self
            .graph
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let node = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| invalid(format!("unknown node {name:?}")))
        };
        let s = node(source)?;
        let t = node(target)?;
        let mut out_edges = vec![Vec::new(); self.graph.nodes.len()];
        for (k, e) in self.graph.edges.iter().enumerate() {
            out_edges[node(&e.from)?].push((k, node(&e.to)?));
        }

        let mut found: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        let mut on_path = vec![false; self.graph.nodes.len()];
        let mut nodes = vec![s];
        let mut edges = Vec::new();
        on_path[s] = true;
        // (node, next outgoing edge position)
        let mut stack = vec![(s, 0usize)];
        while let Some(top) = stack.last_mut() {
            let (v, pos) = *top;
            if v == t {
                if found.len() == cap {
                    return Err(Error::Budget {
                        required: cap as u128 + 1,
                        budget: cap as u128,
                    });
                }
                found.push((nodes.clone(), edges.clone()));
                stack.pop();
                on_path[v] = false;
                nodes.pop();
                edges.pop();
                continue;
            }
            if let Some(&(k, w)) = out_edges[v].get(pos) {
                top.1 += 1;
                if !on_path[w] {
                    on_path[w] = true;
                    nodes.push(w);
                    edges.push(k);
                    stack.push((w, 0));
                }
            } else {
                stack.pop();
                on_path[v] = false;
                nodes.pop();
                edges.pop();
            }
        }
        found.sort();
        Ok(found.into_iter().map(|(_, e)| e).collect())
    }
}

impl Default for NetworkGame {
    fn default() -> Self {
        NetworkGame::new()
    }
}

/// Materializes path strategies: resources are the edges, each player's
/// strategy list is its simple paths in deterministic order.
pub fn expand_paths(net: &NetworkGame, cap: usize) -> Result<Game> {
    net.validate()?;
    let resources: Vec<Resource> = net
        .graph
        .edges
        .iter()
        .map(|e| Resource::new(e.id.clone(), e.delay.clone()))
        .collect();
    let mut agents = Vec::with_capacity(net.players.len());
    for p in &net.players {
        let paths = net.simple_paths(&p.source, &p.target, cap)?;
        if paths.is_empty() {
            return Err(invalid(format!(
                "player {:?}: no path from {:?} to {:?}",
                p.id, p.source, p.target
            )));
        }
        agents.push(AgentSpec {
            id: p.id.clone(),
            beta: p.beta.clone(),
            strategies: paths
                .into_iter()
                .map(|path| {
                    path.into_iter()
                        .map(|k| net.graph.edges[k].id.clone())
                        .collect()
                })
                .collect(),
        });
    }
    Game::new(resources, agents)
}

/// Replaces every constant-delay edge `b` by one parallel edge of delay `b x`
/// per player.
pub fn affine_to_parallel(net: &NetworkGame) -> NetworkGame {
    let copies = net.players.len().max(1);
    let mut out = NetworkGame {
        graph: Graph {
            nodes: net.graph.nodes.clone(),
            edges: Vec::new(),
        },
        players: net.players.clone(),
    };
    for e in &net.graph.edges {
        match e.delay.constant_value() {
            Some(b) => {
                for k in 1..=copies {
                    out.graph.edges.push(Edge {
                        id: format!("{}#{k}", e.id),
                        from: e.from.clone(),
                        to: e.to.clone(),
                        delay: DelayFunction::linear(b.clone()),
                    });
                }
            }
            None => out.graph.edges.push(e.clone()),
        }
    }
    out
}

/// Same transformation on an explicit game: each constant resource becomes
/// `n` linear copies and every strategy through it branches over the copies.
pub fn affine_to_parallel_game(game: &Game) -> Result<Game> {
    let n = game.n_agents().max(1);
    let mut resources = Vec::new();
    // ids replacing each original resource
    let mut replacement: Vec<Vec<String>> = Vec::with_capacity(game.n_resources());
    for r in game.resources() {
        match r.delay.constant_value() {
            Some(b) => {
                let ids: Vec<String> = (1..=n).map(|k| format!("{}#{k}", r.id)).collect();
                for id in &ids {
                    resources.push(Resource::new(id.clone(), DelayFunction::linear(b.clone())));
                }
                replacement.push(ids);
            }
            None => {
                resources.push(r.clone());
                replacement.push(vec![r.id.clone()]);
            }
        }
    }
    let agents = game
        .agents()
        .iter()
        .map(|a| {
            let mut strategies: Vec<Vec<String>> = Vec::new();
            for s in &a.strategies {
                let mut partial: Vec<Vec<String>> = vec![Vec::new()];
                for &e in s {
                    partial = partial
                        .into_iter()
                        .flat_map(|p| {
                            replacement[e].iter().map(move |id| {
                                let mut q = p.clone();
                                q.push(id.clone());
                                q
                            })
                        })
                        .collect();
                }
                strategies.extend(partial);
            }
            AgentSpec {
                id: a.id.clone(),
                beta: a.beta.clone(),
                strategies,
            }
        })
        .collect();
    Game::new(resources, agents)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parallel_pair() -> NetworkGame {
        let mut net = NetworkGame::new();
        net.edge("top", "s", "t", DelayFunction::linear(1))
            .edge("bottom", "s", "t", DelayFunction::linear(2))
            .player("p", "s", "t", Rational::zero());
        net
    }

    #[test]
    fn parallel_edges_give_two_strategies() {
        let g = expand_paths(&parallel_pair(), 10).unwrap();
        assert_eq!(g.agents()[0].strategies, vec![vec![0], vec![1]]);
    }

    #[test]
    fn cap_is_a_refusal() {
        assert!(matches!(
            expand_paths(&parallel_pair(), 1),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn cycles_are_not_followed() {
        let mut net = NetworkGame::new();
        net.edge("ab", "a", "b", DelayFunction::linear(1))
            .edge("ba", "b", "a", DelayFunction::linear(1))
            .edge("bt", "b", "t", DelayFunction::linear(1))
            .edge("at", "a", "t", DelayFunction::linear(1))
            .player("p", "a", "t", Rational::zero());
        let paths = net.simple_paths("a", "t", 10).unwrap();
        // a-b-t sorts before a-t by node sequence
        assert_eq!(paths, vec![vec![0, 2], vec![3]]);
    }

    #[test]
    fn unreachable_target_is_rejected() {
        let mut net = NetworkGame::new();
        net.edge("ab", "a", "b", DelayFunction::linear(1))
            .node("t")
            .player("p", "a", "t", Rational::zero());
        assert!(expand_paths(&net, 10).is_err());
    }

    #[test]
    fn constant_edge_splits_into_copies() {
        let mut net = NetworkGame::new();
        net.edge("c", "s", "t", DelayFunction::constant(3))
            .player("p", "s", "t", Rational::zero())
            .player("q", "s", "t", Rational::zero());
        let par = affine_to_parallel(&net);
        assert_eq!(par.graph.edges.len(), 2);
        assert!(par
            .graph
            .edges
            .iter()
            .all(|e| e.delay == DelayFunction::linear(3)));
        let g = expand_paths(&par, 10).unwrap();
        let split = crate::model::State(vec![0, 1]);
        assert_eq!(
            crate::model::agent_delay(&g, &split, 0).unwrap(),
            Rational::from(3)
        );
        assert_eq!(
            crate::model::agent_delay(&g, &split, 1).unwrap(),
            Rational::from(3)
        );
    }

    #[test]
    fn network_json_shape() {
        let v = serde_json::to_value(parallel_pair()).unwrap();
        assert!(v["graph"]["nodes"].is_array());
        assert_eq!(v["graph"]["edges"][0]["from"], "s");
        assert_eq!(v["players"][0]["target"], "t");
        let back: NetworkGame = serde_json::from_value(v).unwrap();
        assert_eq!(back, parallel_pair());
    }
}
