//! Numerical screw-theory oracle: random joint geometry, loop-closure
//! constraint assembly, numerical mobility, and end-effector twist rank.
//!
//! Kutzbach counting assumes every loop removes six freedoms; special joint
//! arrangements (an all-prismatic loop, for instance) remove fewer. This
//! module instantiates each candidate with random positions and axes, builds
//! the loop-closure screw equations, and measures mobility and end-effector
//! velocity rank numerically. A generic sample realizes the maximum rank, so
//! results aggregate by maximum over independent trials.

use nalgebra::{DMatrix, DVector, Vector3, Vector6};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::MatrixIndex;
use crate::topology::{CycleBasis, LinkGraph};

/// Knobs of the numerical oracle, exposed as CLI flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScrewConfig {
    /// Independent geometry samples; ranks aggregate by maximum.
    pub trials: usize,
    /// Singular values below `rank_tol`·σ_max count as zero.
    pub rank_tol: f64,
}

impl Default for ScrewConfig {
    fn default() -> ScrewConfig {
        ScrewConfig {
            trials: 4,
            rank_tol: 1e-8,
        }
    }
}

/// Mix a candidate's index and a trial number into an RNG seed, so every
/// candidate gets its own reproducible geometry stream independent of shard
/// layout or thread schedule.
pub fn trial_seed(matrix_index: MatrixIndex, trial: usize) -> u64 {
    // splitmix64 finalizer over a simple injective combination.
    let mut z = matrix_index
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((trial as u64).wrapping_mul(0xA24B_AED4_963E_E407));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One random embedding of a link graph: a position and a unit axis per
/// joint. Spherical joints use only the position.
#[derive(Debug, Clone)]
pub struct GeometrySample {
    pub seed: u64,
    pub positions: Vec<Vector3<f64>>,
    pub axes: Vec<Vector3<f64>>,
}

/// Sample joint positions in [−1, 1]³ and unit axes, deterministically from
/// the seed.
pub fn sample_geometry(g: &LinkGraph, seed: u64) -> GeometrySample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions = Vec::with_capacity(g.edges().len());
    let mut axes = Vec::with_capacity(g.edges().len());
    for _ in g.edges() {
        positions.push(Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ));
        axes.push(random_unit_vector(&mut rng));
    }
    GeometrySample {
        seed,
        positions,
        axes,
    }
}

/// Uniform direction via rejection sampling from the unit ball (avoiding the
/// degenerate center), then normalization.
fn random_unit_vector(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.gen_range(-1.0_f64..1.0),
            rng.gen_range(-1.0_f64..1.0),
            rng.gen_range(-1.0_f64..1.0),
        );
        let norm = v.norm();
        if norm > 1e-3 && norm <= 1.0 {
            return v / norm;
        }
    }
}

/// Unit twists of every joint under a geometry sample, in edge-id order.
/// Column offsets give each joint's slice of the freedom coordinates.
#[derive(Debug, Clone)]
pub struct TwistSystem {
    screws: Vec<Vec<Vector6<f64>>>,
    offsets: Vec<usize>,
    total_freedoms: usize,
}

impl TwistSystem {
    pub fn screws_of(&self, edge_id: usize) -> &[Vector6<f64>] {
        &self.screws[edge_id]
    }

    pub fn offset_of(&self, edge_id: usize) -> usize {
        self.offsets[edge_id]
    }

    pub fn total_freedoms(&self) -> usize {
        self.total_freedoms
    }
}

/// Build each joint's unit twists: a revolute turns about its axis, a
/// prismatic slides along it, a cylindrical does both, a spherical turns
/// about three independent axes through its center.
pub fn twist_system(g: &LinkGraph, geom: &GeometrySample) -> TwistSystem {
    use crate::model::JointKind::*;
    let mut screws = Vec::with_capacity(g.edges().len());
    let mut offsets = Vec::with_capacity(g.edges().len());
    let mut total = 0;
    for (e, edge) in g.edges().iter().enumerate() {
        let p = geom.positions[e];
        let a = geom.axes[e];
        let list: Vec<Vector6<f64>> = match edge.kind {
            Empty => Vec::new(),
            Revolute => vec![rotation_screw(p, a)],
            Prismatic => vec![translation_screw(a)],
            Cylindrical => vec![rotation_screw(p, a), translation_screw(a)],
            Spherical => [Vector3::x(), Vector3::y(), Vector3::z()]
                .into_iter()
                .map(|axis| rotation_screw(p, axis))
                .collect(),
        };
        offsets.push(total);
        total += list.len();
        screws.push(list);
    }
    TwistSystem {
        screws,
        offsets,
        total_freedoms: total,
    }
}

fn rotation_screw(p: Vector3<f64>, axis: Vector3<f64>) -> Vector6<f64> {
    let v = p.cross(&axis);
    Vector6::new(axis.x, axis.y, axis.z, v.x, v.y, v.z)
}

fn translation_screw(axis: Vector3<f64>) -> Vector6<f64> {
    Vector6::new(0.0, 0.0, 0.0, axis.x, axis.y, axis.z)
}

/// Loop-closure constraint matrix, (6·loops) × freedoms: row block ℓ sums the
/// twists around loop ℓ (each times its traversal direction) to zero.
pub fn constraint_matrix(basis: &CycleBasis, twists: &TwistSystem) -> DMatrix<f64> {
    let rows = 6 * basis.loops.len();
    let cols = twists.total_freedoms();
    let mut matrix = DMatrix::zeros(rows, cols);
    for (l, lp) in basis.loops.iter().enumerate() {
        for &(e, dir) in lp {
            let offset = twists.offset_of(e);
            for (s, screw) in twists.screws_of(e).iter().enumerate() {
                for r in 0..6 {
                    matrix[(6 * l + r, offset + s)] = dir as f64 * screw[r];
                }
            }
        }
    }
    matrix
}

/// Numerical rank and an orthonormal null-space basis. The matrix is padded
/// with zero rows to a square so the decomposition exposes every right
/// singular vector, including those of a wide system.
fn rank_and_nullspace(matrix: &DMatrix<f64>, tol: f64) -> (usize, Vec<DVector<f64>>) {
    let (rows, cols) = matrix.shape();
    if cols == 0 {
        return (0, Vec::new());
    }
    let size = rows.max(cols);
    let mut padded = DMatrix::zeros(size, cols);
    padded.view_mut((0, 0), (rows, cols)).copy_from(matrix);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.max();
    // Every matrix ranked here is assembled from unit-direction screws and
    // unit-norm motion samples, so genuine singular values are O(1). Anchoring
    // the cutoff at scale 1 keeps an all-noise matrix (entries ~1e-16, as when
    // no sampled motion reaches the end-effector) from registering as rank 1.
    let threshold = tol * sigma_max.max(1.0);
    let mut rank = 0;
    let mut nullspace = Vec::new();
    for (i, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma > threshold {
            rank += 1;
        } else {
            nullspace.push(v_t.row(i).transpose());
        }
    }
    (rank, nullspace)
}

/// Outcome of the numerical analysis of one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MobilityResult {
    /// Freedoms minus constraint rank, maximized over trials.
    pub numeric_dof: i32,
    /// Rank of the end-effector twists over the motion space, maximized over
    /// trials; 0 when base and end-effector are disconnected.
    pub ee_rank: usize,
    pub trials_used: usize,
}

/// Numerical mobility alone; see [`mobility_analysis`].
pub fn numeric_mobility(
    g: &LinkGraph,
    basis: &CycleBasis,
    matrix_index: MatrixIndex,
    config: &ScrewConfig,
) -> i32 {
    mobility_analysis(g, basis, matrix_index, config).numeric_dof
}

/// Run the configured number of geometry trials and keep the maximum
/// mobility and end-effector rank (degeneracy only ever lowers rank).
pub fn mobility_analysis(
    g: &LinkGraph,
    basis: &CycleBasis,
    matrix_index: MatrixIndex,
    config: &ScrewConfig,
) -> MobilityResult {
    let forest = g.spanning_forest();
    let ee_path = forest.tree_path(g, 0, g.n() - 1);
    let mut best_dof = i32::MIN;
    let mut best_rank = 0usize;
    for trial in 0..config.trials.max(1) {
        let geom = sample_geometry(g, trial_seed(matrix_index, trial));
        let twists = twist_system(g, &geom);
        let matrix = constraint_matrix(basis, &twists);
        let (rank, nullspace) = rank_and_nullspace(&matrix, config.rank_tol);
        best_dof = best_dof.max(twists.total_freedoms() as i32 - rank as i32);
        if let Some(path) = &ee_path {
            let rank = ee_twist_rank(&twists, path, &nullspace, config.rank_tol);
            best_rank = best_rank.max(rank);
        }
    }
    MobilityResult {
        numeric_dof: best_dof,
        ee_rank: best_rank,
        trials_used: config.trials.max(1),
    }
}

/// Rank of the end-effector twist map over a motion-space basis: each null
/// vector of the closure constraints yields one end-effector twist, summed
/// along the deterministic base→EE tree path. Loop closure makes the value
/// path-independent, and rank does not depend on the basis choice.
pub fn ee_twist_rank(
    twists: &TwistSystem,
    ee_path: &[(usize, i8)],
    nullspace: &[DVector<f64>],
    tol: f64,
) -> usize {
    if nullspace.is_empty() {
        return 0;
    }
    let mut ee_matrix = DMatrix::zeros(6, nullspace.len());
    for (col, rates) in nullspace.iter().enumerate() {
        let mut twist = Vector6::zeros();
        for &(e, dir) in ee_path {
            let offset = twists.offset_of(e);
            for (s, screw) in twists.screws_of(e).iter().enumerate() {
                twist += screw * (dir as f64 * rates[offset + s]);
            }
        }
        ee_matrix.set_column(col, &twist);
    }
    let (rank, _) = rank_and_nullspace(&ee_matrix, tol);
    rank
}

/// The end-effector must have exactly as many independent velocity
/// directions as there are independent actuations — the target DOF.
pub fn jacobian_criterion_ok(
    g: &LinkGraph,
    basis: &CycleBasis,
    matrix_index: MatrixIndex,
    target_dof: i32,
    config: &ScrewConfig,
) -> bool {
    if target_dof < 0 {
        return false;
    }
    mobility_analysis(g, basis, matrix_index, config).ee_rank == target_dof as usize
}
