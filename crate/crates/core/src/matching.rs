//! Rectangular assignment (rows <= columns) over exact rationals, with dual
//! potentials kept as an optimality certificate.

use crate::rational::Rational;

/// `None` marks a forbidden edge.
pub type CostMatrix = Vec<Vec<Option<Rational>>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    /// Column matched to each row.
    pub row_to_col: Vec<usize>,
    pub total: Rational,
    /// Row potentials.
    pub u: Vec<Rational>,
    /// Column potentials, all `<= 0`.
    pub v: Vec<Rational>,
}

/// Minimum-cost assignment saturating every row, by shortest augmenting
/// paths with potentials. `None` if no such assignment exists.
pub fn solve_assignment(costs: &CostMatrix) -> Option<Assignment> {
    let n = costs.len();
    let m = costs.first().map_or(0, Vec::len);
    debug_assert!(costs.iter().all(|r| r.len() == m));
    if n == 0 {
        return Some(Assignment {
            row_to_col: Vec::new(),
            total: Rational::zero(),
            u: Vec::new(),
            v: vec![Rational::zero(); m],
        });
    }
    if n > m {
        return None;
    }
    // 1-based rows and columns; column 0 is the virtual root
    let mut u = vec![Rational::zero(); n + 1];
    let mut v = vec![Rational::zero(); m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv: Vec<Option<Rational>> = vec![None; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<Rational> = None;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                if let Some(c) = &costs[i0 - 1][j - 1] {
                    let cur = c - &u[i0] - &v[j];
                    if minv[j].as_ref().is_none_or(|x| cur < *x) {
                        minv[j] = Some(cur);
                        way[j] = j0;
                    }
                }
                if let Some(x) = &minv[j] {
                    if delta.as_ref().is_none_or(|d| x < d) {
                        delta = Some(x.clone());
                        j1 = j;
                    }
                }
            }
            let delta = delta?;
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += &delta;
                    v[j] -= &delta;
                } else if let Some(x) = minv[j].as_mut() {
                    *x -= &delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=m {
        if p[j] != 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    let total = row_to_col
        .iter()
        .enumerate()
        .map(|(i, &j)| costs[i][j].clone().expect("matched edges are allowed"))
        .sum();
    let out = Assignment {
        row_to_col,
        total,
        u: u[1..].to_vec(),
        v: v[1..].to_vec(),
    };
    debug_assert_eq!(audit(costs, &out), Ok(()));
    Some(out)
}

/// Checks the assignment against its potentials: dual feasibility
/// `u_i + v_j <= c_ij`, tightness on matched edges, `v_j <= 0` and `v_j = 0`
/// on unmatched columns, hence optimality.
pub fn audit(costs: &CostMatrix, a: &Assignment) -> Result<(), String> {
    let m = a.v.len();
    let mut matched = vec![false; m];
    for (i, &j) in a.row_to_col.iter().enumerate() {
        if std::mem::replace(&mut matched[j], true) {
            return Err(format!("column {j} matched twice"));
        }
        match &costs[i][j] {
            None => return Err(format!("row {i} uses forbidden column {j}")),
            Some(c) if &a.u[i] + &a.v[j] != *c => {
                return Err(format!("matched edge ({i},{j}) is not tight"))
            }
            _ => {}
        }
    }
    for (i, row) in costs.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            if let Some(c) = c {
                if &a.u[i] + &a.v[j] > *c {
                    return Err(format!("edge ({i},{j}) violates dual feasibility"));
                }
            }
        }
    }
    for (j, vj) in a.v.iter().enumerate() {
        if vj.is_positive() || (!matched[j] && !vj.is_zero()) {
            return Err(format!("column potential {j} breaks slackness"));
        }
    }
    let dual: Rational = a.u.iter().chain(&a.v).sum();
    if dual != a.total {
        return Err(format!("dual value {dual} differs from primal {}", a.total));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(x: i64) -> Option<Rational> {
        Some(Rational::from(x))
    }

    #[test]
    fn square_identity() {
        let a = solve_assignment(&vec![vec![r(0), r(1)], vec![r(1), r(0)]]).unwrap();
        assert_eq!(a.row_to_col, vec![0, 1]);
        assert_eq!(a.total, Rational::zero());
    }

    #[test]
    fn forbidden_edges_and_infeasibility() {
        let a = solve_assignment(&vec![vec![None, r(5)], vec![r(1), r(1)]]).unwrap();
        assert_eq!(a.row_to_col, vec![1, 0]);
        assert_eq!(a.total, Rational::from(6));
        assert!(solve_assignment(&vec![vec![None, r(5)], vec![None, r(1)]]).is_none());
        assert!(solve_assignment(&vec![vec![r(1)], vec![r(1)]]).is_none());
    }

    #[test]
    fn rectangular_leaves_a_column_free() {
        let a = solve_assignment(&vec![vec![r(3), r(1), r(2)]]).unwrap();
        assert_eq!(a.row_to_col, vec![1]);
        assert_eq!(a.total, Rational::from(1));
    }

    fn brute(costs: &CostMatrix) -> Option<Rational> {
        fn rec(costs: &CostMatrix, i: usize, used: &mut Vec<bool>) -> Option<Rational> {
            if i == costs.len() {
                return Some(Rational::zero());
            }
            let mut best: Option<Rational> = None;
            for j in 0..used.len() {
                if used[j] {
                    continue;
                }
                if let Some(c) = &costs[i][j] {
                    used[j] = true;
                    if let Some(rest) = rec(costs, i + 1, used) {
                        let t = c + &rest;
                        if best.as_ref().is_none_or(|b| t < *b) {
                            best = Some(t);
                        }
                    }
                    used[j] = false;
                }
            }
            best
        }
        rec(
            costs,
            0,
            &mut vec![false; costs.first().map_or(0, Vec::len)],
        )
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            rows in 1usize..5,
            extra in 0usize..3,
            cells in prop::collection::vec(prop::option::weighted(0.8, (0i64..20, 1i64..4)), 49),
        ) {
            let cols = rows + extra;
            let costs: CostMatrix = (0..rows)
                .map(|i| (0..cols).map(|j| cells[i * cols + j].map(|(p, q)| Rational::new(p, q))).collect())
                .collect();
            let got = solve_assignment(&costs);
            prop_assert_eq!(got.as_ref().map(|a| a.total.clone()), brute(&costs));
            if let Some(a) = got {
                prop_assert_eq!(audit(&costs, &a), Ok(()));
            }
        }
    }
}
