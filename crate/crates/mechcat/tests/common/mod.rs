//! Shared helpers for the integration suites: brute-force oracles and a
//! random-structure generator, kept deliberately naive so they can serve as
//! independent references for the optimized library routines.

use mechcat::canon;
use mechcat::model::{index_space, AdjacencyMatrix, JointKind};
use mechcat::topology::LinkGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ALL_KINDS: [JointKind; 4] = [
    JointKind::Revolute,
    JointKind::Prismatic,
    JointKind::Cylindrical,
    JointKind::Spherical,
];

/// Marks every link lying on at least one simple base→end-effector path by
/// exhaustively enumerating all simple paths with a depth-first search.
pub fn brute_force_covered(g: &LinkGraph) -> Vec<bool> {
    let n = g.n();
    let target = n - 1;
    let mut covered = vec![false; n];
    let mut visited = vec![false; n];
    let mut path = vec![0usize];
    visited[0] = true;
    explore(g, 0, target, &mut visited, &mut path, &mut covered);
    covered
}

fn explore(
    g: &LinkGraph,
    at: usize,
    target: usize,
    visited: &mut Vec<bool>,
    path: &mut Vec<usize>,
    covered: &mut Vec<bool>,
) {
    if at == target {
        for &v in path.iter() {
            covered[v] = true;
        }
        return;
    }
    for &(next, _) in g.adjacent(at) {
        if !visited[next] {
            visited[next] = true;
            path.push(next);
            explore(g, next, target, visited, path, covered);
            path.pop();
            visited[next] = false;
        }
    }
}

/// Random connected structure on `n` links with at most `max_edges` joints:
/// a random spanning tree plus a random sprinkling of extra edges, each
/// carrying a random joint kind.
pub fn random_connected_matrix<R: Rng>(rng: &mut R, n: usize, max_edges: usize) -> AdjacencyMatrix {
    let mut edges: Vec<(usize, usize, JointKind)> = Vec::new();
    // Random spanning tree: attach each new link to a uniformly chosen
    // earlier link.
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v, ALL_KINDS[rng.gen_range(0..4)]));
    }
    let mut spare: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if !edges.iter().any(|&(a, b, _)| (a, b) == (i, j)) {
                spare.push((i, j));
            }
        }
    }
    let cap = max_edges.min(n * (n - 1) / 2);
    let extra = rng.gen_range(0..=cap.saturating_sub(edges.len()));
    for _ in 0..extra {
        let pick = rng.gen_range(0..spare.len());
        let (i, j) = spare.swap_remove(pick);
        edges.push((i, j, ALL_KINDS[rng.gen_range(0..4)]));
    }
    AdjacencyMatrix::from_edges(n, &edges).expect("generated structure is well-formed")
}

/// Suite: every three-link index decodes to a distinct matrix that encodes
/// back to itself, and ten thousand random four-/five-link indices
/// round-trip both ways. Panics on the first mismatch.
pub fn check_encode_decode_bijection() {
    let space = index_space(3);
    assert_eq!(space, 125);
    let mut seen = vec![false; space as usize];
    for index in 0..space {
        let m = AdjacencyMatrix::from_index(3, index).unwrap();
        assert_eq!(m.index(), index, "decode/encode must round-trip");
        assert!(!seen[index as usize], "indices must decode distinctly");
        seen[index as usize] = true;
    }
    assert!(seen.iter().all(|&s| s));

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for _ in 0..10_000 {
        let n = if rng.gen_bool(0.5) { 4 } else { 5 };
        let index = rng.gen_range(0..index_space(n));
        let m = AdjacencyMatrix::from_index(n, index).unwrap();
        assert_eq!(m.index(), index);
        let again = AdjacencyMatrix::from_index(n, m.index()).unwrap();
        assert_eq!(again.cells(), m.cells(), "matrix→index→matrix is identity");
    }
}

/// Suite: exhaustive four-link check that the canonical form is constant on
/// every relabeling orbit of the intermediate links and is the orbit's
/// minimal index, with `is_canonical` accepting exactly the minima.
pub fn check_orbit_collapse_exhaustive() {
    // The only nontrivial relabeling of intermediate links {1, 2}.
    let swap = [0usize, 2, 1, 3];
    for index in 0..index_space(4) {
        let m = AdjacencyMatrix::from_index(4, index).unwrap();
        let relabeled = m.permute_links(&swap);
        let orbit_min = m.index().min(relabeled.index());
        assert_eq!(
            canon::canonical_index(&m),
            orbit_min,
            "canonical index must be the orbit minimum for index {index}"
        );
        assert_eq!(
            canon::canonical_index(&relabeled),
            orbit_min,
            "canonical index must be invariant across the orbit of {index}"
        );
        assert_eq!(canon::is_canonical(&m), m.index() == orbit_min);
    }
}

/// Suite: path coverage agrees with brute-force simple-path enumeration on
/// ten thousand random connected structures with up to eight joints.
pub fn check_path_coverage_against_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for round in 0..10_000 {
        let n = rng.gen_range(3..=5);
        let m = random_connected_matrix(&mut rng, n, 8);
        let g = LinkGraph::from_matrix(&m);
        let fast = g.covered_links();
        let slow = brute_force_covered(&g);
        assert_eq!(
            fast, slow,
            "coverage mismatch in round {round} on:\n{}",
            m.render_text()
        );
    }
}
