//! The worked example graphs used throughout the tests, benches and CLI demos.
//!
//! `fig1_dag` is the ten-node ground truth. `fig2_skeleton` through `fig6_pdag`
//! are the successive stages of recovering it, `fig7_pdag` is `fig6_pdag` with
//! X3, X8 and X9 removed, and `fig8_pdag` is the seven-node graph used to
//! illustrate p-trails.

use crate::graph::{Dag, Pdag, UGraph};

const FIG1_NODES: [&str; 10] = ["X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8", "X9", "X10"];

const FIG1_EDGES: [(&str, &str); 14] = [
    ("X1", "X2"),
    ("X2", "X6"),
    ("X7", "X6"),
    ("X7", "X8"),
    ("X7", "X5"),
    ("X5", "X6"),
    ("X5", "X8"),
    ("X5", "X9"),
    ("X5", "X10"),
    ("X6", "X8"),
    ("X4", "X3"),
    ("X4", "X9"),
    ("X10", "X4"),
    ("X10", "X9"),
];

const COLLIDER_ARROWS: [(&str, &str); 5] = [
    ("X2", "X6"),
    ("X7", "X6"),
    ("X5", "X6"),
    ("X4", "X9"),
    ("X5", "X9"),
];

/// Partially oriented stage of fig1 with the given arrows; every other
/// fig1 adjacency stays undirected.
fn fig1_stage(arrows: &[(&str, &str)]) -> Pdag {
    let undirected: Vec<(&str, &str)> = FIG1_EDGES
        .iter()
        .copied()
        .filter(|&(a, b)| {
            !arrows
                .iter()
                .any(|&(t, h)| (t, h) == (a, b) || (t, h) == (b, a))
        })
        .collect();
    Pdag::from_labeled_edges(&FIG1_NODES, arrows, &undirected).expect("fixture is valid")
}

pub fn fig1_dag() -> Dag {
    Dag::from_labeled_edges(&FIG1_NODES, &FIG1_EDGES).expect("fixture is valid")
}

pub fn fig2_skeleton() -> UGraph {
    UGraph::from_labeled_edges(&FIG1_NODES, &FIG1_EDGES).expect("fixture is valid")
}

pub fn fig3_pdag() -> Pdag {
    fig1_stage(&COLLIDER_ARROWS)
}

pub fn fig4_pdag() -> Pdag {
    let mut arrows = COLLIDER_ARROWS.to_vec();
    arrows.push(("X6", "X8"));
    fig1_stage(&arrows)
}

pub fn fig5_pdag() -> Pdag {
    let mut arrows = COLLIDER_ARROWS.to_vec();
    arrows.extend([("X6", "X8"), ("X7", "X8"), ("X5", "X8")]);
    fig1_stage(&arrows)
}

pub fn fig6_pdag() -> Pdag {
    let mut arrows = COLLIDER_ARROWS.to_vec();
    arrows.extend([("X6", "X8"), ("X7", "X8"), ("X5", "X8"), ("X10", "X9")]);
    fig1_stage(&arrows)
}

pub fn fig7_pdag() -> Pdag {
    Pdag::from_labeled_edges(
        &["X1", "X2", "X4", "X5", "X6", "X7", "X10"],
        &[("X2", "X6"), ("X7", "X6"), ("X5", "X6")],
        &[("X1", "X2"), ("X4", "X10"), ("X5", "X10"), ("X5", "X7")],
    )
    .expect("fixture is valid")
}

pub fn fig8_pdag() -> Pdag {
    Pdag::from_labeled_edges(
        &["X11", "X12", "X13", "X14", "X15", "X16", "X17"],
        &[
            ("X11", "X13"),
            ("X11", "X14"),
            ("X11", "X15"),
            ("X12", "X13"),
            ("X12", "X14"),
            ("X12", "X15"),
            ("X13", "X17"),
            ("X15", "X16"),
        ],
        &[("X13", "X14"), ("X14", "X15")],
    )
    .expect("fixture is valid")
}
