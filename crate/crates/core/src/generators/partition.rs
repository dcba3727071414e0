//! Series-parallel gadget deciding Partition through optimal-congestion
//! equilibria.

use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::generators::network::NetworkGame;
use crate::model::DelayFunction;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionInstance {
    values: Vec<u64>,
}

impl PartitionInstance {
    /// Positive integers with an even sum.
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("partition instance is empty"));
        }
        if values.contains(&0) {
            return Err(invalid("partition values must be positive"));
        }
        if values.iter().sum::<u64>() % 2 != 0 {
            return Err(invalid("partition values must have an even sum"));
        }
        Ok(PartitionInstance { values })
    }

    /// Integers separated by whitespace or commas; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let values = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(|l| l.split(|c: char| c.is_whitespace() || c == ','))
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|_| invalid(format!("bad partition value {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        PartitionInstance::new(values)
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }

    /// Subset-sum check by bitmask enumeration.
    pub fn has_equal_bipartition(&self) -> bool {
        let half = self.total() / 2;
        let k = self.values.len();
        (0u64..1 << k).any(|mask| {
            (0..k)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| self.values[i])
                .sum::<u64>()
                == half
        })
    }

    /// Social optimum of the gadget, `15 a / 4`.
    pub fn optimal_cost(&self) -> Rational {
        Rational::new(15 * self.total() as i64, 4)
    }
}

/// Chain of `k` two-edge gadgets from `n0` to `nk` (edges `2 a_i x` and
/// `a_i x`) plus a direct edge `f` of delay `3a/4 x`, and three egoists from
/// `n0` to `nk`. Also returns the optimal congestion vector: every edge
/// carries exactly one player.
pub fn partition_to_network(inst: &PartitionInstance) -> (NetworkGame, BTreeMap<String, usize>) {
    let k = inst.values.len();
    let mut net = NetworkGame::new();
    let node = |i: usize| format!("n{i}");
    for i in 0..=k {
        net.node(&node(i));
    }
    for (i, &a) in inst.values.iter().enumerate() {
        let a = Rational::from(a as i64);
        net.edge(
            &format!("g{}_1", i + 1),
            &node(i),
            &node(i + 1),
            DelayFunction::linear(Rational::from(2) * &a),
        )
        .edge(
            &format!("g{}_2", i + 1),
            &node(i),
            &node(i + 1),
            DelayFunction::linear(a),
        );
    }
    net.edge(
        "f",
        &node(0),
        &node(k),
        DelayFunction::linear(Rational::new(3 * inst.total() as i64, 4)),
    );
    for p in 1..=3 {
        net.player(&format!("p{p}"), &node(0), &node(k), Rational::zero());
    }
    let optimum = net.graph.edges.iter().map(|e| (e.id.clone(), 1)).collect();
    (net, optimum)
}
