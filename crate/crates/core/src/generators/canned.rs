//! Small named games used throughout the tests and the CLI.

use std::collections::BTreeMap;

use crate::model::{AgentSpec, DelayFunction, Game, Resource};
use crate::rational::Rational;

/// Two resources with `d = [4, 8, 9, 11]`, three egoists and one pure
/// altruist. Has no pure Nash equilibrium.
pub fn example1() -> Game {
    let both = || vec![vec!["e"], vec!["f"]];
    Game::new(
        vec![
            Resource::new("e", DelayFunction::table([4, 8, 9, 11])),
            Resource::new("f", DelayFunction::table([4, 8, 9, 11])),
        ],
        vec![
            AgentSpec::new("egoist1", Rational::zero(), both()),
            AgentSpec::new("egoist2", Rational::zero(), both()),
            AgentSpec::new("egoist3", Rational::zero(), both()),
            AgentSpec::new("altruist", Rational::one(), both()),
        ],
    )
    .expect("example1 is valid")
}

/// Three pure altruists on `d1 = [16, 32, 36]` and constant `d2 = 45`.
/// Everyone on `r1` is a suboptimal local optimum (108 against 106).
pub fn footnote_symmetric() -> Game {
    let both = || vec![vec!["r1"], vec!["r2"]];
    Game::new(
        vec![
            Resource::new("r1", DelayFunction::table([16, 32, 36])),
            Resource::new("r2", DelayFunction::table([45, 45, 45])),
        ],
        (1..=3)
            .map(|i| AgentSpec::new(format!("a{i}"), Rational::one(), both()))
            .collect(),
    )
    .expect("footnote_symmetric is valid")
}

/// Three pure altruists, `d1 = d2 = 8x`, `d3 = 4x`; agent 1 uses `{r1, r2}`,
/// agents 2 and 3 use `{r2, r3}`.
pub fn footnote_asymmetric() -> Game {
    Game::new(
        vec![
            Resource::new("r1", DelayFunction::linear(8)),
            Resource::new("r2", DelayFunction::linear(8)),
            Resource::new("r3", DelayFunction::linear(4)),
        ],
        vec![
            AgentSpec::new("a1", Rational::one(), vec![vec!["r1"], vec!["r2"]]),
            AgentSpec::new("a2", Rational::one(), vec![vec!["r2"], vec!["r3"]]),
            AgentSpec::new("a3", Rational::one(), vec![vec!["r2"], vec!["r3"]]),
        ],
    )
    .expect("footnote_asymmetric is valid")
}

pub fn canned_games() -> BTreeMap<&'static str, Game> {
    BTreeMap::from([
        ("example1", example1()),
        ("footnote_symmetric", footnote_symmetric()),
        ("footnote_asymmetric", footnote_asymmetric()),
    ])
}
