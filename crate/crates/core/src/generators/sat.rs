//! Games that have a pure Nash equilibrium exactly when a CNF formula is
//! satisfiable: an asymmetric singleton game and a network game, with an
//! optional symmetric wrapper for the latter.

use crate::generators::cnf::CnfFormula;
use crate::generators::network::NetworkGame;
use crate::model::{AgentSpec, DelayFunction, Game, Resource};
use crate::rational::Rational;

/// Resource id of the "variable `v` is `value`" resource.
pub fn variable_resource(v: usize, value: bool) -> String {
    format!("x{v}_{}", u8::from(value))
}

/// The resource a clause agent uses to satisfy literal `lit`: a positive
/// literal points at `x_v = 0`, a negative one at `x_v = 1`.
fn literal_resource(lit: i32) -> String {
    variable_resource(lit.unsigned_abs() as usize, lit < 0)
}

/// Singleton gadget with `2n + 3` resources and `n + m + 4` agents.
///
/// Variable agents pick `x_i = 1`, `x_i = 0` or the shared `e0`. Clause
/// agents sit on the resource of one of their literals. Three egoists and
/// one altruist share `e1`, `e2`; the altruist may also take `e0`.
pub fn sat_to_singleton(phi: &CnfFormula) -> Game {
    let n = phi.n_vars();
    let n_agents = n + phi.n_clauses() + 4;
    // 4 for one user, 8 for two, 9 from three on
    let pair_table = || {
        DelayFunction::table(
            (1..=n_agents.max(3)).map(|k| Rational::from([4i64, 8, 9][k.min(3) - 1])),
        )
    };
    let mut resources = vec![
        Resource::new("e0", DelayFunction::affine(7, 3)),
        Resource::new("e1", pair_table()),
        Resource::new("e2", pair_table()),
    ];
    for v in 1..=n {
        resources.push(Resource::new(
            variable_resource(v, true),
            DelayFunction::linear(9),
        ));
        resources.push(Resource::new(
            variable_resource(v, false),
            DelayFunction::linear(9),
        ));
    }

    let egoist = Rational::zero;
    let mut agents = Vec::with_capacity(n_agents);
    for v in 1..=n {
        agents.push(AgentSpec {
            id: format!("X{v}"),
            beta: egoist(),
            strategies: vec![
                vec![variable_resource(v, true)],
                vec![variable_resource(v, false)],
                vec!["e0".to_string()],
            ],
        });
    }
    for (j, clause) in phi.clauses().iter().enumerate() {
        agents.push(AgentSpec {
            id: format!("C{}", j + 1),
            beta: egoist(),
            strategies: clause.iter().map(|&l| vec![literal_resource(l)]).collect(),
        });
    }
    for k in 1..=3 {
        agents.push(AgentSpec::new(
            format!("u{k}"),
            egoist(),
            vec![vec!["e1"], vec!["e2"]],
        ));
    }
    agents.push(AgentSpec::new(
        "u0",
        Rational::one(),
        vec![vec!["e1"], vec!["e2"], vec!["e0"]],
    ));
    Game::new(resources, agents).expect("singleton gadget is valid")
}

/// Network gadget. Edge names `e0..e10` follow the delay table of the
/// construction; unnamed connectors carry delay 0.
///
/// With `symmetric` set, every player instead travels from a common source
/// `s` to a common sink `t` through entry edges of delay `M x` and the
/// expensive bypass `(s, s0)`, `(t0, t)`. The altruist can still enter at
/// `s1` and reach `t0` via `e4, e2`, so this variant is not equivalence
/// checked.
pub fn sat_to_network(phi: &CnfFormula, symmetric: bool) -> NetworkGame {
    let n = phi.n_vars();
    let m = phi.n_clauses();
    let zero = || DelayFunction::linear(0);
    let mut net = NetworkGame::new();

    for name in ["s0", "t0", "s1", "s2", "tp", "a", "b", "c", "d", "o1", "o2"] {
        net.node(name);
    }
    net.edge("e0", "o1", "o2", DelayFunction::affine(7, 3))
        .edge("e1", "s1", "o1", DelayFunction::constant(2))
        .edge("e2", "b", "t0", DelayFunction::constant(17))
        .edge("e3", "d", "t0", zero())
        .edge(
            "e4",
            "a",
            "b",
            DelayFunction::quadratic(Rational::new(12, 5)),
        )
        .edge("e5", "b", "c", zero())
        .edge("e6", "c", "d", DelayFunction::quadratic(1))
        .edge("e7", "s0", "a", zero())
        .edge("e8", "s0", "c", zero())
        .edge(
            "e10",
            "s1",
            "tp",
            DelayFunction::constant(Rational::new(37, 2)),
        )
        .edge("z_s1_a", "s1", "a", zero())
        .edge("z_s2_c", "s2", "c", zero())
        .edge("z_d_tp", "d", "tp", zero())
        .edge("z_o2_tp", "o2", "tp", zero());

    for v in 1..=n {
        let sx = format!("sx{v}");
        net.node(&sx);
        for value in [false, true] {
            let hub = format!("v{v}_{}", u8::from(value));
            net.edge(&format!("z_{sx}_{hub}"), &sx, &hub, zero()).edge(
                &variable_resource(v, value),
                &hub,
                "tp",
                DelayFunction::linear(9),
            );
        }
        net.edge(&format!("z_{sx}_o1"), &sx, "o1", zero());
    }
    for (j, clause) in phi.clauses().iter().enumerate() {
        let sc = format!("sc{}", j + 1);
        net.node(&sc);
        for &lit in clause {
            let v = lit.unsigned_abs();
            let hub = format!("v{v}_{}", u8::from(lit < 0));
            net.edge(&format!("z_{sc}_{hub}"), &sc, &hub, zero());
        }
    }

    let egoist = Rational::zero;
    let mut players: Vec<(String, &str, Rational)> = Vec::new();
    let sx_names: Vec<String> = (1..=n).map(|v| format!("sx{v}")).collect();
    let sc_names: Vec<String> = (1..=m).map(|j| format!("sc{j}")).collect();
    for (v, sx) in sx_names.iter().enumerate() {
        players.push((format!("X{}", v + 1), sx, egoist()));
    }
    for (j, sc) in sc_names.iter().enumerate() {
        players.push((format!("C{}", j + 1), sc, egoist()));
    }
    players.push(("u1".into(), "s1", egoist()));
    players.push(("u2".into(), "s2", egoist()));
    players.push(("u3".into(), "s2", egoist()));
    players.push(("u0".into(), "s0", Rational::one()));

    if !symmetric {
        for (id, source, beta) in players {
            let target = if id == "u0" { "t0" } else { "tp" };
            net.player(&id, source, target, beta);
        }
        return net;
    }

    let big_m = wrapper_m(&net, n + m + 4);
    let entry = || DelayFunction::linear(big_m.clone());
    let bypass = DelayFunction::constant(Rational::from((n + m + 5) as i64) * &big_m);
    for sx in &sx_names {
        net.edge(&format!("w_s_{sx}"), "s", sx, entry());
    }
    for sc in &sc_names {
        net.edge(&format!("w_s_{sc}"), "s", sc, entry());
    }
    net.edge("w_s_s1", "s", "s1", entry())
        .edge("w_s_s2", "s", "s2", entry())
        .edge("w_s_sp", "s", "sp", entry())
        .edge("w_sp_s2", "sp", "s2", zero())
        .edge("w_tp_t", "tp", "t", entry())
        .edge("w_s_s0", "s", "s0", bypass.clone())
        .edge("w_t0_t", "t0", "t", bypass);
    for (id, _, beta) in players {
        net.player(&id, "s", "t", beta);
    }
    net
}

/// `M = floor(sum of all edge delays at congestion N) + 1` over the inner
/// network.
pub fn wrapper_m(inner: &NetworkGame, n_players: usize) -> Rational {
    let total: Rational = inner
        .graph
        .edges
        .iter()
        .map(|e| {
            e.delay
                .eval(n_players)
                .expect("coefficient delays are total")
        })
        .sum();
    total.floor() + Rational::one()
}
