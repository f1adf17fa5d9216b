use serde::Serialize;

use super::Subproblem;

/// Role of a node in a solved subproblem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeState {
    /// `|h| = c r^p`.
    Active,
    /// Not active but next to an active node; its dual cell holds the free boundary.
    Interface,
    Free,
}

/// Minimizer-structure diagnostics, all absolute.
#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    /// `max |h − ḡ|` over free nodes, `ḡ` the node average of `g`.
    pub free_h_gap: f64,
    /// `max |φ|` over free and interface nodes.
    pub free_phi: f64,
    /// `min φ` over active nodes where `h = +c r^p`.
    pub active_phi_min: f64,
    /// `max |h| / (c r^p)` over nodes with a positive bound.
    pub bound_ratio: f64,
    /// `|∫ (g − h) dx|`.
    pub mass_balance_err: f64,
    pub active_nodes: usize,
}

pub fn classify(sub: &Subproblem) -> Vec<NodeState> {
    let h = sub.h.values();
    let u = &sub.bounds;
    let active: Vec<bool> = (0..u.len()).map(|j| u[j] == 0.0 || h[j].abs() >= u[j]).collect();
    (0..u.len())
        .map(|j| {
            if active[j] {
                NodeState::Active
            } else if (j > 0 && active[j - 1]) || (j + 1 < u.len() && active[j + 1]) {
                NodeState::Interface
            } else {
                NodeState::Free
            }
        })
        .collect()
}

pub fn structure_report(sub: &Subproblem) -> StructureReport {
    let states = classify(sub);
    let h = sub.h.values();
    let phi = sub.phi.values();
    let u = &sub.bounds;
    let mut rep = StructureReport {
        free_h_gap: 0.0,
        free_phi: 0.0,
        active_phi_min: f64::INFINITY,
        bound_ratio: 0.0,
        mass_balance_err: sub.mass_balance_err,
        active_nodes: 0,
    };
    for (j, s) in states.iter().enumerate() {
        if u[j] > 0.0 {
            rep.bound_ratio = rep.bound_ratio.max(h[j].abs() / u[j]);
        }
        match s {
            NodeState::Active => {
                rep.active_nodes += 1;
                if u[j] > 0.0 && h[j] > 0.0 {
                    rep.active_phi_min = rep.active_phi_min.min(phi[j]);
                }
            }
            NodeState::Interface => rep.free_phi = rep.free_phi.max(phi[j].abs()),
            NodeState::Free => {
                rep.free_phi = rep.free_phi.max(phi[j].abs());
                rep.free_h_gap = rep.free_h_gap.max((h[j] - sub.g_avg[j]).abs());
            }
        }
    }
    if !rep.active_phi_min.is_finite() {
        rep.active_phi_min = 0.0;
    }
    rep
}
