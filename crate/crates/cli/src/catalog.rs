//! Built-in instances and the bundled configs that run them.

use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Bundled {
    pub name: &'static str,
    pub text: &'static str,
}

/// Bundled configs, in the order `reproduce-paper` runs them.
pub const BUNDLED: &[Bundled] = &[
    Bundled {
        name: "counterexample",
        text: include_str!("../configs/counterexample.cfg"),
    },
    Bundled {
        name: "dense_sets",
        text: include_str!("../configs/dense_sets.cfg"),
    },
    Bundled {
        name: "compact",
        text: include_str!("../configs/compact.cfg"),
    },
    Bundled {
        name: "coercive",
        text: include_str!("../configs/coercive.cfg"),
    },
    Bundled {
        name: "dgn_skew",
        text: include_str!("../configs/dgn_skew.cfg"),
    },
    Bundled {
        name: "nash",
        text: include_str!("../configs/nash.cfg"),
    },
];

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Entry {
    pub name: &'static str,
    pub kind: &'static str,
    /// What the instance reproduces.
    pub anchor: &'static str,
    /// Bundled config holding the scenario.
    pub config: &'static str,
}

pub const ENTRIES: &[Entry] = &[
    Entry {
        name: "counterexample-ball",
        kind: "counterexample",
        anchor: "dense but not self segment-dense: phi(x,y) = <x,y> - 1 on the 3-ball with D the unit sphere has no solution",
        config: "counterexample",
    },
    Entry {
        name: "ssd-rational-grid",
        kind: "dense_check",
        anchor: "rational points of the square are self segment-dense (Q^2 grid, denominators up to 1000)",
        config: "dense_sets",
    },
    Entry {
        name: "punctured-ball",
        kind: "dense_check",
        anchor: "the 3-ball minus a planar square is dense but not self segment-dense",
        config: "dense_sets",
    },
    Entry {
        name: "compact-potential",
        kind: "equilibrium",
        anchor: "strong problem on a compact square: F(x,y) = [|y|^2 - |x|^2, +inf) solved at the origin with a KKM certificate",
        config: "compact",
    },
    Entry {
        name: "coercive-orthant",
        kind: "coercive",
        anchor: "noncompact strong problem on the nonnegative orthant with a zero witness at the origin",
        config: "coercive",
    },
    Entry {
        name: "coercive-misplaced-witness",
        kind: "coercive",
        anchor: "the same orthant problem with a witness where F does not contain zero fails the extension",
        config: "coercive",
    },
    Entry {
        name: "dgn-skew",
        kind: "dgn",
        anchor: "two-good economy with skew linear excess demand; equilibrium price (0,1) with excess demand (1,0)",
        config: "dgn_skew",
    },
    Entry {
        name: "dgn-negative",
        kind: "dgn",
        anchor: "constant negative excess demand violates Walras' law and has no equilibrium price",
        config: "dgn_skew",
    },
    Entry {
        name: "nash-matching-pennies",
        kind: "nash",
        anchor: "mixed extension of matching pennies; unique equilibrium at uniform play",
        config: "nash",
    },
    Entry {
        name: "nash-prisoners-dilemma",
        kind: "nash",
        anchor: "prisoner's dilemma; both players defect",
        config: "nash",
    },
    Entry {
        name: "nash-singleton",
        kind: "nash",
        anchor: "one-point strategy sets; every hypothesis holds vacuously",
        config: "nash",
    },
];

pub fn bundled(name: &str) -> Option<&'static Bundled> {
    let name = name.strip_suffix(".cfg").unwrap_or(name);
    BUNDLED.iter().find(|b| b.name == name)
}

pub fn entry(name: &str) -> Option<&'static Entry> {
    ENTRIES.iter().find(|e| e.name == name)
}

/// Config text running only the scenarios of catalog entry `name`.
pub fn entry_config(name: &str) -> Option<String> {
    let e = entry(name)?;
    let mut doc: toml::Table = bundled(e.config)?.text.parse().ok()?;
    let scenarios = doc.get_mut("scenario")?.as_array_mut()?;
    scenarios.retain(|s| s.get("builtin").and_then(|b| b.as_str()) == Some(name));
    toml::to_string(&doc).ok()
}

/// One line per entry: `name (kind) -> anchor`.
pub fn listing() -> String {
    let width = ENTRIES.iter().map(|e| e.name.len()).max().unwrap_or(0);
    ENTRIES
        .iter()
        .map(|e| format!("{:width$}  {:14}  {}\n", e.name, e.kind, e.anchor))
        .collect()
}
