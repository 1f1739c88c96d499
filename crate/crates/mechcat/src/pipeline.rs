//! The enumeration pipeline: stream every adjacency matrix of the requested
//! sizes, apply the validity criteria in a fixed order with short-circuit
//! attribution, and collect the canonical survivors into catalog entries.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::canon;
use crate::generate::{enumerate_stream, Shard};
use crate::mobility;
use crate::model::{
    AdjacencyMatrix, CatalogEntry, ClassSignature, CriterionId, FilterTrace, ModelError,
    MAX_LINKS, MIN_LINKS,
};
use crate::screw::{self, ScrewConfig};
use crate::topology::LinkGraph;
use crate::ENGINE_VERSION;

/// How the degree-of-freedom filter counts mobility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DofMode {
    /// Closed-form joint counting, with superfluous spins subtracted.
    /// Matches the published catalogs.
    #[default]
    Kutzbach,
    /// Numerical rank of the loop-closure system, with superfluous spins
    /// subtracted. Admits over-constrained special cases (e.g. the
    /// all-prismatic four-bar) that counting rejects, so catalogs differ.
    Numeric,
}

impl DofMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DofMode::Kutzbach => "kutzbach",
            DofMode::Numeric => "numeric",
        }
    }

    pub fn from_str_id(s: &str) -> Option<DofMode> {
        match s {
            "kutzbach" => Some(DofMode::Kutzbach),
            "numeric" => Some(DofMode::Numeric),
            _ => None,
        }
    }
}

impl std::fmt::Display for DofMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything a run needs to be reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Link counts to enumerate, each in 3..=6.
    pub links: Vec<usize>,
    /// Required degrees of freedom (equality, after spin subtraction).
    pub target_dof: i32,
    pub dof_mode: DofMode,
    /// Trials and rank tolerance of the numerical oracle.
    pub screw: ScrewConfig,
    /// Evaluate every criterion instead of stopping at the first failure.
    pub collect_traces: bool,
    /// Residue-class slice of the enumeration space handled by this run.
    pub shard_index: u64,
    pub shard_count: u64,
}

impl PipelineConfig {
    pub fn new(links: Vec<usize>, target_dof: i32) -> PipelineConfig {
        PipelineConfig {
            links,
            target_dof,
            dof_mode: DofMode::default(),
            screw: ScrewConfig::default(),
            collect_traces: false,
            shard_index: 0,
            shard_count: 1,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.links.is_empty() {
            return Err(ModelError::Config("no link counts requested".into()));
        }
        for &n in &self.links {
            if !(MIN_LINKS..=MAX_LINKS).contains(&n) {
                return Err(ModelError::LinkCount(n));
            }
        }
        if !(1..=6).contains(&self.target_dof) {
            return Err(ModelError::Config(format!(
                "target DOF {} out of range 1..6",
                self.target_dof
            )));
        }
        if self.screw.trials == 0 {
            return Err(ModelError::Config("at least one trial required".into()));
        }
        if !(self.screw.rank_tol > 0.0 && self.screw.rank_tol < 1.0) {
            return Err(ModelError::Config(format!(
                "rank tolerance {} out of range (0, 1)",
                self.screw.rank_tol
            )));
        }
        self.shard()?;
        Ok(())
    }

    pub fn shard(&self) -> Result<Shard, ModelError> {
        Shard::new(self.shard_index, self.shard_count)
    }

    /// Fingerprint of the settings that decide acceptance. Shard layout and
    /// link selection are excluded on purpose: merging shards or link sizes
    /// must yield entries with one consistent hash.
    pub fn criteria_config_hash(&self) -> String {
        let canonical = format!(
            "target_dof={};dof_mode={};trials={};rank_tol={:e}",
            self.target_dof, self.dof_mode, self.screw.trials, self.screw.rank_tol
        );
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(16);
        for byte in digest.iter().take(8) {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }
}

/// Counters of one enumeration run. `generated` always equals `accepted`
/// plus the sum over `rejected_by`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    pub generated: u64,
    pub accepted: u64,
    pub rejected_by: BTreeMap<CriterionId, u64>,
    pub wall_time: Duration,
}

impl RunStats {
    pub fn merge(&mut self, other: &RunStats) {
        self.generated += other.generated;
        self.accepted += other.accepted;
        for (&id, &count) in &other.rejected_by {
            *self.rejected_by.entry(id).or_insert(0) += count;
        }
    }

    /// Conservation check: every generated matrix is either accepted or
    /// attributed to exactly one criterion.
    pub fn consistent(&self) -> bool {
        self.generated == self.accepted + self.rejected_by.values().sum::<u64>()
    }
}

/// Apply the validity criteria to one matrix. Evaluation order is fixed;
/// the first failure is attributed and, unless `collect_traces` is set,
/// evaluation stops there. The redundancy check (`noncontrib`) is implied
/// by path coverage and only evaluated in trace mode.
pub fn apply_filters(m: &AdjacencyMatrix, config: &PipelineConfig) -> FilterTrace {
    let mut trace = FilterTrace::new(m.index());
    let g = LinkGraph::from_matrix(m);

    macro_rules! check {
        ($id:expr, $pass:expr) => {
            trace.record($id, $pass);
            if !config.collect_traces && !trace.passed() {
                return trace;
            }
        };
    }

    check!(CriterionId::IsolatedLink, !g.has_isolated_link());

    let [n_r, n_p, _, _] = m.joint_counts();
    check!(CriterionId::HasRp, n_r + n_p >= 1);

    let effective_dof = match config.dof_mode {
        DofMode::Kutzbach => mobility::effective_kutzbach_dof(&g),
        DofMode::Numeric => {
            let basis = g.cycle_basis();
            screw::numeric_mobility(&g, &basis, m.index(), &config.screw)
                - mobility::superfluous_spin_count(&g) as i32
        }
    };
    check!(CriterionId::DofRange, effective_dof == config.target_dof);

    check!(
        CriterionId::RpCount,
        (n_r + n_p) as i32 >= config.target_dof
    );

    check!(CriterionId::PathCoverage, g.all_links_contribute());
    if config.collect_traces {
        trace.record(CriterionId::Noncontrib, g.no_noncontributing_loops());
    }

    check!(CriterionId::EeTwoS, mobility::ee_spherical_ok(&g));
    check!(
        CriterionId::PrismaticOnly,
        mobility::prismatic_only_ok(&g, config.target_dof)
    );
    check!(CriterionId::SsCut, mobility::uncontrollable_parts_ok(&g));

    let basis = g.cycle_basis();
    let locks = mobility::compute_locks(&g, &basis);
    check!(
        CriterionId::LoopAngular,
        !mobility::has_rigid_loop(&basis, &locks)
    );
    check!(
        CriterionId::LockedActuation,
        mobility::locked_actuation_ok(&g, &locks, config.target_dof)
    );

    check!(CriterionId::IsoCanonical, canon::is_canonical(m));

    check!(
        CriterionId::JacobianRank,
        screw::jacobian_criterion_ok(&g, &basis, m.index(), config.target_dof, &config.screw)
    );

    trace
}

fn make_entry(m: &AdjacencyMatrix, config: &PipelineConfig) -> CatalogEntry {
    CatalogEntry {
        links: m.n(),
        dof: config.target_dof,
        class: m.classify(),
        canonical_index: m.index(),
        matrix: m.clone(),
        engine_version: ENGINE_VERSION.to_string(),
        criteria_config_hash: config.criteria_config_hash(),
    }
}

/// Run the pipeline over every requested link count, honoring the
/// `MECHCAT_THREADS` environment variable for worker-pool sizing. Results
/// are sorted by (links, canonical index), so the output is deterministic
/// regardless of thread count, and shards of one logical run concatenate
/// and re-sort to the exact same entry sequence.
pub fn run(config: &PipelineConfig) -> Result<(Vec<CatalogEntry>, RunStats), ModelError> {
    config.validate()?;
    let start = Instant::now();
    let (mut entries, mut stats) = match configured_threads() {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| ModelError::Config(format!("worker pool: {e}")))?
            .install(|| run_sharded(config)),
        None => run_sharded(config),
    }?;
    entries.sort_by_key(|e| (e.links, e.canonical_index));
    stats.wall_time = start.elapsed();
    Ok((entries, stats))
}

fn configured_threads() -> Option<usize> {
    std::env::var("MECHCAT_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&k| k >= 1)
}

fn run_sharded(config: &PipelineConfig) -> Result<(Vec<CatalogEntry>, RunStats), ModelError> {
    let shard = config.shard()?;
    // Refine this run's residue class into independent work units: the
    // classes k ≡ index + j·count (mod count·splits) for j in 0..splits
    // partition exactly the classes k ≡ index (mod count).
    let splits = (rayon::current_num_threads() * 8).max(1) as u64;
    let mut tasks = Vec::new();
    for &n in &config.links {
        for j in 0..splits {
            let sub = Shard::new(shard.index() + j * shard.count(), shard.count() * splits)?;
            tasks.push((n, sub));
        }
    }
    let partials: Result<Vec<(Vec<CatalogEntry>, RunStats)>, ModelError> = tasks
        .par_iter()
        .map(|&(n, sub)| {
            let mut stats = RunStats::default();
            let mut entries = Vec::new();
            for (_, m) in enumerate_stream(n, sub)? {
                stats.generated += 1;
                let trace = apply_filters(&m, config);
                match trace.first_failure {
                    None => {
                        stats.accepted += 1;
                        entries.push(make_entry(&m, config));
                    }
                    Some(id) => *stats.rejected_by.entry(id).or_insert(0) += 1,
                }
            }
            Ok((entries, stats))
        })
        .collect();
    let mut entries = Vec::new();
    let mut stats = RunStats::default();
    for (partial_entries, partial_stats) in partials? {
        entries.extend(partial_entries);
        stats.merge(&partial_stats);
    }
    Ok((entries, stats))
}

/// Survivor counts per joint-type class, iterated in catalog-table order.
pub fn class_table(entries: &[CatalogEntry]) -> BTreeMap<ClassSignature, u64> {
    let mut table = BTreeMap::new();
    for entry in entries {
        *table.entry(entry.class).or_insert(0u64) += 1;
    }
    table
}
