//! Kutzbach mobility and the structural validity criteria: joint locking
//! inside loops, actuation counting, prismatic-only limits, end-effector
//! suspension and uncontrollable spherical-cut parts.

use std::collections::BTreeSet;

use crate::model::JointKind;
use crate::topology::{CycleBasis, LinkGraph};

/// Spatial Kutzbach mobility: M = 6(n−1) − Σ over joints of (6 − fᵢ).
pub fn kutzbach_dof(g: &LinkGraph) -> i32 {
    let fixed: i32 = g
        .edges()
        .iter()
        .map(|e| 6 - e.kind.freedoms() as i32)
        .sum();
    6 * (g.n() as i32 - 1) - fixed
}

/// Links that merely spin in place: degree exactly 2 with both joints
/// spherical. Each contributes one degree of freedom that moves nothing else,
/// so mobility comparisons subtract them.
pub fn superfluous_spin_count(g: &LinkGraph) -> usize {
    (0..g.n())
        .filter(|&v| {
            g.degree(v) == 2
                && g.adjacent(v)
                    .iter()
                    .all(|&(_, e)| g.edge(e).kind == JointKind::Spherical)
        })
        .count()
}

/// Kutzbach mobility with superfluous spins removed — the gross DOF the
/// actuators must account for.
pub fn effective_kutzbach_dof(g: &LinkGraph) -> i32 {
    kutzbach_dof(g) - superfluous_spin_count(g) as i32
}

/// Total angular freedoms around one loop, by joint type (R and C carry one
/// rotation each, S three, P none).
pub fn loop_angular_freedom(g: &LinkGraph, lp: &[(usize, i8)]) -> usize {
    lp.iter()
        .map(|&(e, _)| g.edge(e).kind.angular_freedoms())
        .sum()
}

/// Which joints a loop closure freezes. `locked_joints` have no remaining
/// freedom; `demoted_cylindricals` lost their rotation but still translate.
/// The two sets are disjoint: fully locking a demoted cylindrical moves it
/// to `locked_joints`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LockReport {
    pub locked_joints: BTreeSet<usize>,
    pub demoted_cylindricals: BTreeSet<usize>,
}

impl LockReport {
    pub fn is_locked(&self, edge_id: usize) -> bool {
        self.locked_joints.contains(&edge_id)
    }

    pub fn is_demoted(&self, edge_id: usize) -> bool {
        self.demoted_cylindricals.contains(&edge_id)
    }

    pub fn is_empty(&self) -> bool {
        self.locked_joints.is_empty() && self.demoted_cylindricals.is_empty()
    }

    /// Freedoms the joint retains under this report.
    pub fn live_freedoms(&self, edge_id: usize, kind: JointKind) -> usize {
        if self.is_locked(edge_id) {
            0
        } else if kind == JointKind::Cylindrical && self.is_demoted(edge_id) {
            1
        } else {
            kind.freedoms()
        }
    }

    /// Angular freedoms the joint retains under this report.
    pub fn live_angular(&self, edge_id: usize, kind: JointKind) -> usize {
        if self.is_locked(edge_id) || self.is_demoted(edge_id) {
            0
        } else {
            kind.angular_freedoms()
        }
    }

    fn lock(&mut self, edge_id: usize) -> bool {
        self.demoted_cylindricals.remove(&edge_id);
        self.locked_joints.insert(edge_id)
    }

    fn demote(&mut self, edge_id: usize) -> bool {
        !self.is_locked(edge_id) && self.demoted_cylindricals.insert(edge_id)
    }
}

/// Propagate loop-closure locking to a fixpoint over the cycle basis.
///
/// Three rules fire per loop, on the freedoms still live:
///
/// 1. *Angular shortage* — a closed spatial loop needs at least four
///    independent angular freedoms for any rotation to be possible. With 1–3
///    live angular freedoms, the angular closure equations force all of them
///    to zero: revolutes and sphericals lock, cylindricals keep only their
///    translation.
/// 2. *Closure rank* — with no live angular freedom the loop closes through
///    three translational equations, so up to three live (translational)
///    freedoms are fully constrained; with angular motion possible the loop
///    closes through all six equations, so a loop with at most six live
///    freedoms in total is generically rigid.
/// 3. *Spherical-pair span* — two spherical joints span only five of the six
///    closure directions (no translation along the line of their centers), so
///    if at most one other live freedom accompanies an S pair in a loop, that
///    remainder is locked too.
pub fn compute_locks(g: &LinkGraph, basis: &CycleBasis) -> LockReport {
    let mut report = LockReport::default();
    loop {
        let mut changed = false;
        for lp in &basis.loops {
            let kinds: Vec<(usize, JointKind)> =
                lp.iter().map(|&(e, _)| (e, g.edge(e).kind)).collect();
            let live_total: usize = kinds
                .iter()
                .map(|&(e, k)| report.live_freedoms(e, k))
                .sum();
            let live_ang: usize = kinds.iter().map(|&(e, k)| report.live_angular(e, k)).sum();
            let live_trans = live_total - live_ang;

            if (1..=3).contains(&live_ang) {
                for &(e, kind) in &kinds {
                    changed |= match kind {
                        JointKind::Revolute | JointKind::Spherical => {
                            !report.is_locked(e) && report.lock(e)
                        }
                        JointKind::Cylindrical => report.demote(e),
                        _ => false,
                    };
                }
            }

            let translational_rigid = live_ang == 0 && (1..=3).contains(&live_trans);
            // Six freedoms normally saturate the six closure constraints,
            // but a lone pair of spherical joints keeps one motion: the
            // shared rotation about the line through their centers.
            let live_joints = kinds
                .iter()
                .filter(|&&(e, k)| report.live_freedoms(e, k) > 0)
                .count();
            let spherical_pair_only = live_joints == 2
                && kinds
                    .iter()
                    .all(|&(e, k)| report.live_freedoms(e, k) == 0 || k == JointKind::Spherical);
            let spatial_rigid = live_ang >= 4 && live_total <= 6 && !spherical_pair_only;
            if translational_rigid || spatial_rigid {
                for &(e, _) in &kinds {
                    if !report.is_locked(e) {
                        report.lock(e);
                        changed = true;
                    }
                }
            }

            let live_spherical: Vec<usize> = kinds
                .iter()
                .filter(|&&(e, k)| k == JointKind::Spherical && !report.is_locked(e))
                .map(|&(e, _)| e)
                .collect();
            for (i, &sa) in live_spherical.iter().enumerate() {
                for &sb in &live_spherical[i + 1..] {
                    let rest: usize = kinds
                        .iter()
                        .filter(|&&(e, _)| e != sa && e != sb)
                        .map(|&(e, k)| report.live_freedoms(e, k))
                        .sum();
                    if rest <= 1 {
                        for &(e, _) in &kinds {
                            if e != sa && e != sb && !report.is_locked(e) {
                                report.lock(e);
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            return report;
        }
    }
}

/// True iff some basis loop has every joint fully locked — a rigid sub-loop
/// welded into the structure.
pub fn has_rigid_loop(basis: &CycleBasis, locks: &LockReport) -> bool {
    basis
        .loops
        .iter()
        .any(|lp| !lp.is_empty() && lp.iter().all(|&(e, _)| locks.is_locked(e)))
}

/// Actuatable joints (R or P) that escaped locking.
pub fn unlocked_actuatable_count(g: &LinkGraph, locks: &LockReport) -> usize {
    g.edges()
        .iter()
        .enumerate()
        .filter(|(e, edge)| edge.kind.actuatable() && !locks.is_locked(*e))
        .count()
}

/// True iff no actuatable joint is locked and enough remain to drive the
/// target DOF. A locked revolute or prismatic joint is dead weight that can
/// never be an actuator, so its presence alone disqualifies the candidate.
pub fn locked_actuation_ok(g: &LinkGraph, locks: &LockReport, target_dof: i32) -> bool {
    let any_locked_actuatable = g
        .edges()
        .iter()
        .enumerate()
        .any(|(e, edge)| edge.kind.actuatable() && locks.is_locked(e));
    !any_locked_actuatable && unlocked_actuatable_count(g, locks) >= target_dof as usize
}

/// Combined actuation test: at least one R/P joint exists, enough exist to
/// cover the target, and enough stay unlocked.
pub fn actuation_criteria_ok(g: &LinkGraph, locks: &LockReport, target_dof: i32) -> bool {
    let actuatable = g.edges().iter().filter(|e| e.kind.actuatable()).count();
    actuatable >= 1
        && actuatable >= target_dof as usize
        && locked_actuation_ok(g, locks, target_dof)
}

/// A manipulator with only prismatic joints translates only, so it cannot
/// reach more than 3 DOF.
pub fn prismatic_only_ok(g: &LinkGraph, target_dof: i32) -> bool {
    let all_prismatic = !g.edges().is_empty()
        && g.edges().iter().all(|e| e.kind == JointKind::Prismatic);
    !(all_prismatic && target_dof > 3)
}

/// The end-effector must not hang on exactly two spherical joints: that
/// suspension leaves its twist uncontrollable.
pub fn ee_spherical_ok(g: &LinkGraph) -> bool {
    let ee = g.n() - 1;
    !(g.degree(ee) == 2
        && g.adjacent(ee)
            .iter()
            .all(|&(_, e)| g.edge(e).kind == JointKind::Spherical))
}

/// Check every spherical 2-cut: a part hanging on two spherical joints alone
/// is uncontrollable by the actuators, tolerated only when it is one link
/// spinning in place. Cuts that sever the base from the end-effector are
/// always fatal.
pub fn uncontrollable_parts_ok(g: &LinkGraph) -> bool {
    let ee = g.n() - 1;
    for cut in g.spherical_two_cuts() {
        let comps = g.components_without(&[cut.0, cut.1]);
        for comp in &comps {
            let has_base = comp.contains(&0);
            if has_base && !comp.contains(&ee) {
                return false;
            }
            if !has_base && comp.len() > 1 {
                return false;
            }
        }
    }
    // The single-link tolerance is narrower at the chain ends. A spin link
    // hung directly on the base or the end-effector is accepted only when
    // every cycle through it runs terminal to terminal; if some cycle reaches
    // just the one terminal, the spin is an uncontrolled appendage riding on
    // that terminal and the arrangement is rejected.
    for v in 1..ee {
        let adj = g.adjacent(v);
        let is_spin = adj.len() == 2
            && adj
                .iter()
                .all(|&(_, e)| g.edge(e).kind == JointKind::Spherical);
        if !is_spin {
            continue;
        }
        let (a, b) = (adj[0].0, adj[1].0);
        for (t, o) in [(0, ee), (ee, 0)] {
            if (a == t || b == t) && a != o && b != o {
                // A cycle through v that avoids the other terminal o exists
                // iff v's anchors stay connected once v and o are removed.
                if connected_avoiding(g, a, b, &[v, o]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Breadth-first reachability from `from` to `to` that never enters the
/// `banned` links.
fn connected_avoiding(g: &LinkGraph, from: usize, to: usize, banned: &[usize]) -> bool {
    let mut seen = vec![false; g.n()];
    for &v in banned {
        seen[v] = true;
    }
    let mut queue = vec![from];
    seen[from] = true;
    while let Some(v) = queue.pop() {
        if v == to {
            return true;
        }
        for &(u, _) in g.adjacent(v) {
            if !seen[u] {
                seen[u] = true;
                queue.push(u);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AdjacencyMatrix;
    use JointKind::{Cylindrical as C, Prismatic as P, Revolute as R, Spherical as S};

    fn graph(n: usize, edges: &[(usize, usize, JointKind)]) -> LinkGraph {
        LinkGraph::from_matrix(&AdjacencyMatrix::from_edges(n, edges).unwrap())
    }

    fn locks_of(g: &LinkGraph) -> LockReport {
        compute_locks(g, &g.cycle_basis())
    }

    #[test]
    fn kutzbach_of_serial_chains_sums_joint_freedoms() {
        let rrr = graph(4, &[(0, 1, R), (1, 2, R), (2, 3, R)]);
        assert_eq!(kutzbach_dof(&rrr), 3);
        let rps = graph(4, &[(0, 1, R), (1, 2, P), (2, 3, S)]);
        assert_eq!(kutzbach_dof(&rps), 5);
    }

    #[test]
    fn kutzbach_of_single_loops() {
        let rrcs = graph(4, &[(0, 1, R), (1, 2, R), (2, 3, C), (0, 3, S)]);
        assert_eq!(kutzbach_dof(&rrcs), 1);
        let rrrr = graph(4, &[(0, 1, R), (1, 2, R), (2, 3, R), (0, 3, R)]);
        assert_eq!(kutzbach_dof(&rrrr), -2);
    }

    #[test]
    fn kutzbach_is_invariant_under_relabeling() {
        let m = AdjacencyMatrix::from_edges(
            5,
            &[(0, 1, R), (1, 2, S), (2, 3, C), (3, 4, P), (0, 4, S)],
        )
        .unwrap();
        let permuted = m.permute_links(&[0, 2, 3, 1, 4]);
        assert_eq!(
            kutzbach_dof(&LinkGraph::from_matrix(&m)),
            kutzbach_dof(&LinkGraph::from_matrix(&permuted))
        );
    }

    #[test]
    fn spin_links_are_counted_and_subtracted() {
        let cycle = graph(
            5,
            &[(0, 1, R), (1, 2, S), (2, 3, S), (3, 4, R), (0, 4, R)],
        );
        assert_eq!(superfluous_spin_count(&cycle), 1);
        assert_eq!(kutzbach_dof(&cycle), 24 - 15 - 6);
        assert_eq!(effective_kutzbach_dof(&cycle), 2);

        let no_spin = graph(4, &[(0, 1, R), (1, 2, S), (2, 3, R), (0, 3, S)]);
        assert_eq!(superfluous_spin_count(&no_spin), 0);
    }

    #[test]
    fn loop_angular_freedom_sums_rotational_capacity() {
        let fig4 = graph(
            5,
            &[(0, 1, P), (1, 2, P), (2, 3, C), (3, 4, C), (0, 4, C)],
        );
        let basis = fig4.cycle_basis();
        assert_eq!(basis.loops.len(), 1);
        assert_eq!(loop_angular_freedom(&fig4, &basis.loops[0]), 3);

        let rrcs = graph(4, &[(0, 1, R), (1, 2, R), (2, 3, C), (0, 3, S)]);
        let basis = rrcs.cycle_basis();
        assert_eq!(loop_angular_freedom(&rrcs, &basis.loops[0]), 6);
    }

    #[test]
    fn angular_shortage_demotes_cylindricals_but_keeps_translation() {
        // Two prismatics and three cylindricals in one loop: only three
        // angular freedoms, so every cylindrical loses its rotation; the
        // five remaining translations keep the loop mobile.
        let fig4 = graph(
            5,
            &[(0, 1, P), (1, 2, P), (2, 3, C), (3, 4, C), (0, 4, C)],
        );
        let report = locks_of(&fig4);
        assert!(report.locked_joints.is_empty());
        let demoted: Vec<usize> = report.demoted_cylindricals.iter().copied().collect();
        let cylindricals: Vec<usize> = fig4
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.kind == C)
            .map(|(id, _)| id)
            .collect();
        assert_eq!(demoted, cylindricals);
        assert!(!has_rigid_loop(&fig4.cycle_basis(), &report));
    }

    #[test]
    fn loop_with_ample_freedom_is_untouched() {
        let rrcs = graph(4, &[(0, 1, R), (1, 2, R), (2, 3, C), (0, 3, S)]);
        assert!(locks_of(&rrcs).is_empty());
    }

    #[test]
    fn serial_chains_have_no_locks() {
        let g = graph(4, &[(0, 1, R), (1, 2, P), (2, 3, C)]);
        assert!(locks_of(&g).is_empty());
    }

    #[test]
    fn all_revolute_square_is_rigid() {
        let g = graph(4, &[(0, 1, R), (1, 2, R), (2, 3, R), (0, 3, R)]);
        let report = locks_of(&g);
        assert_eq!(report.locked_joints.len(), 4);
        assert!(has_rigid_loop(&g.cycle_basis(), &report));
    }

    #[test]
    fn all_prismatic_square_stays_mobile() {
        let g = graph(4, &[(0, 1, P), (1, 2, P), (2, 3, P), (0, 3, P)]);
        assert!(locks_of(&g).is_empty());
        assert!(!has_rigid_loop(&g.cycle_basis(), &locks_of(&g)));
    }

    #[test]
    fn one_revolute_among_prismatics_locks_the_loop() {
        // The lone R is the only angular freedom: it locks first, and the
        // three remaining translations then fail the translational closure.
        let g = graph(4, &[(0, 1, R), (1, 2, P), (2, 3, P), (0, 3, P)]);
        let report = locks_of(&g);
        assert_eq!(report.locked_joints.len(), 4);
        assert!(has_rigid_loop(&g.cycle_basis(), &report));
    }

    #[test]
    fn dead_cylindrical_triangle_locks_in_two_stages() {
        // Triangle C,C,C with a revolute pendant to the end-effector. First
        // pass demotes all three cylindricals (angular shortage); second pass
        // locks their translations (only three left in the loop).
        let g = graph(4, &[(0, 1, C), (0, 2, C), (1, 2, C), (2, 3, R)]);
        let report = locks_of(&g);
        assert_eq!(report.locked_joints.len(), 3);
        assert!(report.demoted_cylindricals.is_empty());
        assert!(!report.is_locked(3), "the pendant revolute stays live");
        assert!(has_rigid_loop(&g.cycle_basis(), &report));
    }

    #[test]
    fn spherical_pair_with_one_companion_locks_the_companion() {
        // Triangle S,S,R: the spherical pair spans five closure directions,
        // leaving no room for the revolute to move.
        let g = graph(4, &[(0, 1, S), (0, 2, S), (1, 2, R), (2, 3, R)]);
        let report = locks_of(&g);
        let triangle_r = 2; // edge ids: 0=(0,1)S, 1=(0,2)S, 2=(1,2)R, 3=(2,3)R
        assert!(report.is_locked(triangle_r));
        assert_eq!(report.locked_joints.len(), 1);
        assert!(
            !has_rigid_loop(&g.cycle_basis(), &report),
            "the spherical pair itself stays live (spin)"
        );
    }

    #[test]
    fn spherical_pair_with_two_companions_locks_nothing() {
        let g = graph(4, &[(0, 1, R), (1, 2, S), (2, 3, S), (0, 3, R)]);
        assert!(locks_of(&g).is_empty());
    }

    #[test]
    fn lock_computation_is_idempotent() {
        for edges in [
            vec![(0usize, 1usize, C), (0, 2, C), (1, 2, C), (2, 3, R)],
            vec![(0, 1, R), (1, 2, P), (2, 3, P), (0, 3, P)],
            vec![(0, 1, S), (0, 2, S), (1, 2, R), (2, 3, R)],
        ] {
            let g = graph(4, &edges);
            assert_eq!(locks_of(&g), locks_of(&g));
        }
    }

    #[test]
    fn actuation_requires_enough_unlocked_joints() {
        let cccs = graph(4, &[(0, 1, C), (1, 2, C), (2, 3, C), (0, 3, S)]);
        let locks = locks_of(&cccs);
        assert!(!actuation_criteria_ok(&cccs, &locks, 1), "no R or P at all");

        let rrcs = graph(4, &[(0, 1, R), (1, 2, R), (2, 3, C), (0, 3, S)]);
        assert!(actuation_criteria_ok(&rrcs, &locks_of(&rrcs), 1));

        let fig4 = graph(
            5,
            &[(0, 1, P), (1, 2, P), (2, 3, C), (3, 4, C), (0, 4, C)],
        );
        let locks = locks_of(&fig4);
        assert!(!actuation_criteria_ok(&fig4, &locks, 3), "two P cannot drive 3 DOF");
        assert!(actuation_criteria_ok(&fig4, &locks, 2));
    }

    #[test]
    fn locked_actuator_disqualifies_even_when_count_suffices() {
        // Triangle S,S,R plus a revolute pendant: one revolute is locked,
        // one stays free. The count (1 >= 1) would pass, the locked joint
        // must not.
        let g = graph(4, &[(0, 1, S), (0, 2, S), (1, 2, R), (2, 3, R)]);
        let locks = locks_of(&g);
        assert_eq!(unlocked_actuatable_count(&g, &locks), 1);
        assert!(!locked_actuation_ok(&g, &locks, 1));
    }

    #[test]
    fn prismatic_only_mechanisms_cap_at_three_dof() {
        let all_p = graph(4, &[(0, 1, P), (1, 2, P), (2, 3, P)]);
        assert!(!prismatic_only_ok(&all_p, 4));
        assert!(prismatic_only_ok(&all_p, 3));
        let mixed = graph(4, &[(0, 1, R), (1, 2, P), (2, 3, P)]);
        assert!(prismatic_only_ok(&mixed, 4));
    }

    #[test]
    fn ee_on_two_sphericals_is_rejected() {
        let two_s = graph(4, &[(0, 1, R), (1, 3, S), (2, 3, S), (1, 2, R)]);
        assert!(!ee_spherical_ok(&two_s));

        let s_and_r = graph(4, &[(0, 1, R), (1, 3, S), (2, 3, R), (1, 2, R)]);
        assert!(ee_spherical_ok(&s_and_r));
    }

    #[test]
    fn ee_with_three_joints_passes_even_with_two_sphericals() {
        let g = graph(
            4,
            &[(0, 3, C), (1, 3, S), (2, 3, S), (0, 1, R), (1, 2, R)],
        );
        assert_eq!(g.degree(3), 3);
        assert!(ee_spherical_ok(&g));
    }

    #[test]
    fn spherical_cut_separating_base_from_ee_is_fatal() {
        let fig7 = graph(4, &[(0, 1, R), (1, 2, S), (1, 3, S), (2, 3, R)]);
        assert!(!uncontrollable_parts_ok(&fig7));
    }

    #[test]
    fn multi_link_part_on_a_spherical_cut_is_fatal() {
        let fig8 = graph(
            5,
            &[(0, 1, S), (0, 3, R), (1, 2, R), (2, 3, S), (3, 4, R)],
        );
        assert!(!uncontrollable_parts_ok(&fig8));
    }

    #[test]
    fn single_spinning_link_is_tolerated() {
        let cycle = graph(
            5,
            &[(0, 1, R), (1, 2, S), (2, 3, S), (3, 4, R), (0, 4, R)],
        );
        assert!(uncontrollable_parts_ok(&cycle));
    }

    #[test]
    fn no_spherical_joints_means_no_cut_objections() {
        let g = graph(4, &[(0, 1, R), (1, 2, P), (2, 3, C)]);
        assert!(uncontrollable_parts_ok(&g));
    }

    #[test]
    fn terminal_anchored_spin_on_a_one_terminal_cycle_is_fatal() {
        // Square 0-2-1-3-0 with spin link 2 anchored on the base; the
        // end-effector hangs off link 1, outside the cycle.
        let base_anchored = graph(
            5,
            &[(0, 2, S), (1, 2, S), (0, 3, R), (1, 3, R), (1, 4, R)],
        );
        assert!(!uncontrollable_parts_ok(&base_anchored));
        // Mirror image: square 3-1-4-2-3 with spin link 1 anchored on the
        // end-effector; the base hangs off link 3.
        let ee_anchored = graph(
            5,
            &[(0, 3, R), (1, 3, S), (1, 4, S), (2, 3, R), (2, 4, R)],
        );
        assert!(!uncontrollable_parts_ok(&ee_anchored));
    }

    #[test]
    fn terminal_anchored_spin_on_a_terminal_to_terminal_cycle_is_tolerated() {
        // Pentagon through both terminals with the spin link right next to
        // the base: every cycle through the spin reaches both ends.
        let pentagon = graph(
            5,
            &[(0, 1, S), (1, 2, S), (2, 3, R), (3, 4, R), (0, 4, R)],
        );
        assert!(uncontrollable_parts_ok(&pentagon));
    }

    #[test]
    fn interior_spin_on_a_one_terminal_cycle_is_tolerated() {
        // Square 0-1-2-3-0 with the spin link 2 anchored on intermediate
        // links only; the end-effector hangs off link 1.
        let interior = graph(
            5,
            &[(0, 1, R), (0, 3, R), (1, 2, S), (2, 3, S), (1, 4, R)],
        );
        assert!(uncontrollable_parts_ok(&interior));
    }
}
