//! Isomorph rejection: canonical representatives under intermediate-link
//! relabeling.
//!
//! Link 0 (base) and link n−1 (end-effector) are distinguished and never
//! relabeled — a chain driven from the base differs from the same chain
//! driven from its tip. The intermediate links carry no identity, so two
//! matrices that differ only by a permutation of links 1..n−2 describe the
//! same candidate. The canonical representative of an orbit is the member
//! with the smallest matrix index; enumeration keeps exactly that member.

use itertools::Itertools;

use crate::model::{AdjacencyMatrix, MatrixIndex};

/// All relabelings that fix base and end-effector, as full permutation
/// vectors (`perm[v]` = new label of link `v`). At most (n−2)! = 24 entries.
fn intermediate_permutations(n: usize) -> Vec<Vec<usize>> {
    let intermediates: Vec<usize> = (1..n - 1).collect();
    intermediates
        .iter()
        .copied()
        .permutations(intermediates.len())
        .map(|images| {
            let mut perm = vec![0; n];
            perm[n - 1] = n - 1;
            for (slot, image) in intermediates.iter().zip(images) {
                perm[*slot] = image;
            }
            perm
        })
        .collect()
}

/// Compare two matrices by index without decoding: cell (0,1) is the least
/// significant digit, so the comparison walks the cells from last to first.
fn compare_by_index(a: &AdjacencyMatrix, b: &AdjacencyMatrix) -> std::cmp::Ordering {
    for (x, y) in a.cells().iter().rev().zip(b.cells().iter().rev()) {
        match x.digit().cmp(&y.digit()) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

/// The orbit member with the smallest matrix index.
pub fn canonical_form(m: &AdjacencyMatrix) -> AdjacencyMatrix {
    let mut best = m.clone();
    for perm in intermediate_permutations(m.n()) {
        let candidate = m.permute_links(&perm);
        if compare_by_index(&candidate, &best) == std::cmp::Ordering::Less {
            best = candidate;
        }
    }
    best
}

/// Index of the canonical orbit member.
pub fn canonical_index(m: &AdjacencyMatrix) -> MatrixIndex {
    canonical_form(m).index()
}

/// True iff no relabeling yields a smaller index. Compares cell-by-cell from
/// the most significant digit down, without materializing permuted matrices,
/// and exits on the first decisive cell.
pub fn is_canonical(m: &AdjacencyMatrix) -> bool {
    let n = m.n();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    'perms: for perm in intermediate_permutations(n) {
        if perm.iter().enumerate().all(|(v, &image)| v == image) {
            continue;
        }
        let mut inverse = vec![0; n];
        for (v, &image) in perm.iter().enumerate() {
            inverse[image] = v;
        }
        for &(a, b) in pairs.iter().rev() {
            let (mut i, mut j) = (inverse[a], inverse[b]);
            if i > j {
                std::mem::swap(&mut i, &mut j);
            }
            let permuted = m.get(i, j).digit();
            let original = m.get(a, b).digit();
            if permuted < original {
                return false;
            }
            if permuted > original {
                continue 'perms;
            }
        }
    }
    true
}
