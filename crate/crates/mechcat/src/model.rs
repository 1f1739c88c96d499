//! Domain types shared by every stage of the engine: the joint alphabet, the
//! upper-triangle adjacency matrix with its base-5 integer encoding, class
//! signatures, criterion identifiers and catalog records.

use std::fmt;

use thiserror::Error;

/// Smallest supported link count.
pub const MIN_LINKS: usize = 3;
/// Largest supported link count (5^15 cells already stretches a desk run).
pub const MAX_LINKS: usize = 6;

/// Integer index of a matrix inside the base-5 enumeration space for a fixed
/// link count. Cell (0,1) is the least-significant digit.
pub type MatrixIndex = u64;

/// Errors from constructing or parsing the core types.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("link count must be in {MIN_LINKS}..{MAX_LINKS}, got {0}")]
    LinkCount(usize),
    #[error("matrix index {index} out of range for {n} links (space size {space})")]
    IndexOutOfRange { n: usize, index: u64, space: u64 },
    #[error("cell vector has length {got}, expected {expected}")]
    CellCount { got: usize, expected: usize },
    #[error("invalid link pair ({0}, {1})")]
    LinkPair(usize, usize),
    #[error("invalid matrix text: {0}")]
    MatrixText(String),
    #[error("shard index {index} must be below shard count {count} (count >= 1)")]
    ShardSpec { index: u64, count: u64 },
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// The five-valued edge alphabet: absence of a joint, or one of the four
/// admissible joint types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JointKind {
    Empty = 0,
    Revolute = 1,
    Prismatic = 2,
    Cylindrical = 3,
    Spherical = 4,
}

impl JointKind {
    /// All five values in digit order.
    pub const ALL: [JointKind; 5] = [
        JointKind::Empty,
        JointKind::Revolute,
        JointKind::Prismatic,
        JointKind::Cylindrical,
        JointKind::Spherical,
    ];

    /// Base-5 digit of this kind.
    pub fn digit(self) -> u8 {
        self as u8
    }

    /// Inverse of [`JointKind::digit`].
    pub fn from_digit(d: u8) -> Option<JointKind> {
        Self::ALL.get(d as usize).copied()
    }

    /// One-letter rendering used in matrix text ('O' marks an empty cell).
    pub fn letter(self) -> char {
        match self {
            JointKind::Empty => 'O',
            JointKind::Revolute => 'R',
            JointKind::Prismatic => 'P',
            JointKind::Cylindrical => 'C',
            JointKind::Spherical => 'S',
        }
    }

    /// Inverse of [`JointKind::letter`].
    pub fn from_letter(c: char) -> Option<JointKind> {
        match c {
            'O' => Some(JointKind::Empty),
            'R' => Some(JointKind::Revolute),
            'P' => Some(JointKind::Prismatic),
            'C' => Some(JointKind::Cylindrical),
            'S' => Some(JointKind::Spherical),
            _ => None,
        }
    }

    /// Relative degrees of freedom the joint permits between its two links.
    pub fn freedoms(self) -> usize {
        match self {
            JointKind::Empty => 0,
            JointKind::Revolute | JointKind::Prismatic => 1,
            JointKind::Cylindrical => 2,
            JointKind::Spherical => 3,
        }
    }

    /// How many of those freedoms are rotational.
    pub fn angular_freedoms(self) -> usize {
        match self {
            JointKind::Empty | JointKind::Prismatic => 0,
            JointKind::Revolute | JointKind::Cylindrical => 1,
            JointKind::Spherical => 3,
        }
    }

    /// Only revolute and prismatic joints can carry an actuator.
    pub fn actuatable(self) -> bool {
        matches!(self, JointKind::Revolute | JointKind::Prismatic)
    }
}

impl fmt::Display for JointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Number of strict-upper-triangle cells for `n` links.
pub fn cell_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Size of the enumeration space for `n` links: 5^(n(n−1)/2).
pub fn index_space(n: usize) -> u64 {
    5u64.pow(cell_count(n) as u32)
}

fn check_links(n: usize) -> Result<(), ModelError> {
    if (MIN_LINKS..=MAX_LINKS).contains(&n) {
        Ok(())
    } else {
        Err(ModelError::LinkCount(n))
    }
}

/// Symmetric n×n link-joint matrix, storing only the strict upper triangle in
/// row-major order. Link 0 is the base, link n−1 the end-effector. At most one
/// joint connects any link pair — one cell per pair makes that structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdjacencyMatrix {
    n: usize,
    cells: Vec<JointKind>,
}

impl AdjacencyMatrix {
    /// Matrix with every cell empty.
    pub fn empty(n: usize) -> Result<AdjacencyMatrix, ModelError> {
        check_links(n)?;
        Ok(AdjacencyMatrix {
            n,
            cells: vec![JointKind::Empty; cell_count(n)],
        })
    }

    /// Build from an explicit cell vector (storage order).
    pub fn from_cells(n: usize, cells: Vec<JointKind>) -> Result<AdjacencyMatrix, ModelError> {
        check_links(n)?;
        if cells.len() != cell_count(n) {
            return Err(ModelError::CellCount {
                got: cells.len(),
                expected: cell_count(n),
            });
        }
        Ok(AdjacencyMatrix { n, cells })
    }

    /// Build from a joint list; convenient for fixtures. Pairs may be given in
    /// either order but must be distinct links and not repeat.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize, JointKind)],
    ) -> Result<AdjacencyMatrix, ModelError> {
        let mut m = AdjacencyMatrix::empty(n)?;
        for &(i, j, kind) in edges {
            if i == j || i >= n || j >= n {
                return Err(ModelError::LinkPair(i, j));
            }
            if m.get(i, j) != JointKind::Empty {
                return Err(ModelError::LinkPair(i, j));
            }
            m.set(i, j, kind);
        }
        Ok(m)
    }

    /// Decode a base-5 index into a matrix: digit i of `index` (least
    /// significant first) populates cell i in storage order.
    pub fn from_index(n: usize, index: MatrixIndex) -> Result<AdjacencyMatrix, ModelError> {
        check_links(n)?;
        let space = index_space(n);
        if index >= space {
            return Err(ModelError::IndexOutOfRange { n, index, space });
        }
        let mut cells = Vec::with_capacity(cell_count(n));
        let mut rest = index;
        for _ in 0..cell_count(n) {
            cells.push(JointKind::from_digit((rest % 5) as u8).unwrap());
            rest /= 5;
        }
        Ok(AdjacencyMatrix { n, cells })
    }

    /// Inverse of [`AdjacencyMatrix::from_index`].
    pub fn index(&self) -> MatrixIndex {
        let mut k = 0u64;
        for &cell in self.cells.iter().rev() {
            k = k * 5 + cell.digit() as u64;
        }
        k
    }

    /// Link count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Upper-triangle cells in storage order.
    pub fn cells(&self) -> &[JointKind] {
        &self.cells
    }

    /// Position of cell (i, j), i < j, within the storage vector: full rows
    /// above row i hold Σ_{r<i}(n−1−r) = i(2n−1−i)/2 cells.
    pub fn cell_position(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        i * (2 * self.n - 1 - i) / 2 + (j - i - 1)
    }

    /// Joint between two distinct links (symmetric).
    pub fn get(&self, a: usize, b: usize) -> JointKind {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        self.cells[self.cell_position(i, j)]
    }

    /// Set the joint between two distinct links (symmetric).
    pub fn set(&mut self, a: usize, b: usize, kind: JointKind) {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        let pos = self.cell_position(i, j);
        self.cells[pos] = kind;
    }

    /// Non-empty cells as (i, j, kind) with i < j, in storage order.
    pub fn joints(&self) -> impl Iterator<Item = (usize, usize, JointKind)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .zip(self.cells.iter())
            .filter(|(_, &kind)| kind != JointKind::Empty)
            .map(|((i, j), &kind)| (i, j, kind))
    }

    /// Links joined to `v`, with the connecting joint kind.
    pub fn incident(&self, v: usize) -> impl Iterator<Item = (usize, JointKind)> + '_ {
        (0..self.n).filter_map(move |u| {
            if u == v {
                return None;
            }
            match self.get(v, u) {
                JointKind::Empty => None,
                kind => Some((u, kind)),
            }
        })
    }

    /// Number of joints incident to `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.incident(v).count()
    }

    /// Joint-type counts in the order R, P, C, S.
    pub fn joint_counts(&self) -> [usize; 4] {
        let mut counts = [0usize; 4];
        for &cell in &self.cells {
            if cell != JointKind::Empty {
                counts[cell.digit() as usize - 1] += 1;
            }
        }
        counts
    }

    /// Classify by joint-type multiset.
    pub fn classify(&self) -> ClassSignature {
        ClassSignature {
            counts: self.joint_counts(),
        }
    }

    /// Relabel links: `perm[v]` is the new label of link `v`. The joint
    /// between old links (i, j) connects new links (perm[i], perm[j]).
    pub fn permute_links(&self, perm: &[usize]) -> AdjacencyMatrix {
        debug_assert_eq!(perm.len(), self.n);
        let mut out = AdjacencyMatrix {
            n: self.n,
            cells: vec![JointKind::Empty; self.cells.len()],
        };
        for (i, j, kind) in self.joints() {
            out.set(perm[i], perm[j], kind);
        }
        out
    }

    /// One-line text form: rows separated by "; ", cells by spaces, 'O' for
    /// empty cells and "L1".."Ln" on the diagonal.
    pub fn render_text(&self) -> String {
        let mut rows = Vec::with_capacity(self.n);
        for r in 0..self.n {
            let mut row = Vec::with_capacity(self.n);
            for c in 0..self.n {
                if r == c {
                    row.push(format!("L{}", r + 1));
                } else {
                    row.push(self.get(r, c).letter().to_string());
                }
            }
            rows.push(row.join(" "));
        }
        rows.join("; ")
    }

    /// Parse the [`AdjacencyMatrix::render_text`] form. The full square is
    /// required and must be symmetric with correct diagonal labels.
    pub fn parse_text(text: &str) -> Result<AdjacencyMatrix, ModelError> {
        let rows: Vec<Vec<&str>> = text
            .split(';')
            .map(|row| row.split_whitespace().collect())
            .collect();
        let n = rows.len();
        check_links(n).map_err(|_| {
            ModelError::MatrixText(format!(
                "{n} rows, expected between {MIN_LINKS} and {MAX_LINKS}"
            ))
        })?;
        let mut m = AdjacencyMatrix::empty(n)?;
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(ModelError::MatrixText(format!(
                    "row {} has {} entries, expected {n}",
                    r + 1,
                    row.len()
                )));
            }
            for (c, token) in row.iter().enumerate() {
                if r == c {
                    let expected = format!("L{}", r + 1);
                    if *token != expected {
                        return Err(ModelError::MatrixText(format!(
                            "diagonal entry {} of row {} should be {expected}",
                            token,
                            r + 1
                        )));
                    }
                    continue;
                }
                let kind = match token.chars().collect::<Vec<_>>()[..] {
                    [ch] => JointKind::from_letter(ch),
                    _ => None,
                }
                .ok_or_else(|| {
                    ModelError::MatrixText(format!("unknown cell {token} in row {}", r + 1))
                })?;
                if r < c {
                    m.set(r, c, kind);
                } else if m.get(c, r) != kind {
                    return Err(ModelError::MatrixText(format!(
                        "cell ({}, {}) disagrees with cell ({}, {})",
                        r + 1,
                        c + 1,
                        c + 1,
                        r + 1
                    )));
                }
            }
        }
        Ok(m)
    }
}

impl fmt::Display for AdjacencyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_text())
    }
}

/// Joint-type multiset of a manipulator, the unit of classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassSignature {
    /// Counts in the order R, P, C, S.
    pub counts: [usize; 4],
}

impl ClassSignature {
    pub fn new(n_r: usize, n_p: usize, n_c: usize, n_s: usize) -> ClassSignature {
        ClassSignature {
            counts: [n_r, n_p, n_c, n_s],
        }
    }

    /// Total joint count.
    pub fn joint_count(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Exponent label in the fixed order R, P, C, S, omitting zero counts and
    /// exponent 1: counts (2,0,1,1) render as "R^2CS".
    pub fn label(&self) -> String {
        let mut out = String::new();
        for (letter, &count) in ['R', 'P', 'C', 'S'].iter().zip(&self.counts) {
            match count {
                0 => {}
                1 => out.push(*letter),
                k => {
                    out.push(*letter);
                    out.push('^');
                    out.push_str(&k.to_string());
                }
            }
        }
        out
    }
}

/// Catalog tables list classes by descending R count, then P, C, S — the
/// richest-in-actuatable-joints classes first.
impl Ord for ClassSignature {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.counts.cmp(&self.counts)
    }
}

impl PartialOrd for ClassSignature {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ClassSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Stable identifiers for the validity criteria, used in rejection
/// statistics, trace output and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CriterionId {
    /// Some link is entirely unconnected from all the others.
    IsolatedLink,
    /// No revolute or prismatic joint anywhere, so nothing can be actuated.
    HasRp,
    /// Degrees of freedom differ from the requested target.
    DofRange,
    /// Fewer revolute+prismatic joints than the target DOF.
    RpCount,
    /// Some link lies on no simple base-to-end-effector path.
    PathCoverage,
    /// A loop hangs off the structure without contributing to any
    /// base-to-end-effector path (the loop-shaped special case of
    /// [`CriterionId::PathCoverage`]).
    Noncontrib,
    /// End-effector held by exactly two spherical joints and nothing else.
    EeTwoS,
    /// Only prismatic joints but a target DOF above 3.
    PrismaticOnly,
    /// Two spherical joints alone separate a multi-link part from the rest.
    SsCut,
    /// A loop's angular freedoms are fully locked, freezing the loop.
    LoopAngular,
    /// An actuatable joint is locked, or too few unlocked ones remain.
    LockedActuation,
    /// Matrix is an isomorph of a lower-indexed matrix (same base and
    /// end-effector, intermediate links relabeled).
    IsoCanonical,
    /// End-effector twist rank differs from the number of actuations.
    JacobianRank,
}

impl CriterionId {
    /// Every criterion, in pipeline evaluation order.
    pub const ALL: [CriterionId; 13] = [
        CriterionId::IsolatedLink,
        CriterionId::HasRp,
        CriterionId::DofRange,
        CriterionId::RpCount,
        CriterionId::PathCoverage,
        CriterionId::Noncontrib,
        CriterionId::EeTwoS,
        CriterionId::PrismaticOnly,
        CriterionId::SsCut,
        CriterionId::LoopAngular,
        CriterionId::LockedActuation,
        CriterionId::IsoCanonical,
        CriterionId::JacobianRank,
    ];

    /// Stable string id.
    pub fn as_str(self) -> &'static str {
        match self {
            CriterionId::IsolatedLink => "isolated-link",
            CriterionId::HasRp => "has-rp",
            CriterionId::DofRange => "dof-range",
            CriterionId::RpCount => "rp-count",
            CriterionId::PathCoverage => "path-coverage",
            CriterionId::Noncontrib => "noncontrib",
            CriterionId::EeTwoS => "ee-two-s",
            CriterionId::PrismaticOnly => "prismatic-only",
            CriterionId::SsCut => "s-s-cut",
            CriterionId::LoopAngular => "loop-angular",
            CriterionId::LockedActuation => "locked-actuation",
            CriterionId::IsoCanonical => "iso-canonical",
            CriterionId::JacobianRank => "jacobian-rank",
        }
    }

    /// Inverse of [`CriterionId::as_str`].
    pub fn from_str_id(s: &str) -> Option<CriterionId> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-criterion verdicts for one candidate. Under short-circuit evaluation
/// the verdict list stops at the first failure; trace mode records all.
#[derive(Debug, Clone)]
pub struct FilterTrace {
    pub matrix_index: MatrixIndex,
    pub verdicts: Vec<(CriterionId, bool)>,
    pub first_failure: Option<CriterionId>,
}

impl FilterTrace {
    pub fn new(matrix_index: MatrixIndex) -> FilterTrace {
        FilterTrace {
            matrix_index,
            verdicts: Vec::new(),
            first_failure: None,
        }
    }

    /// Record one verdict, keeping track of the first failure.
    pub fn record(&mut self, id: CriterionId, pass: bool) {
        self.verdicts.push((id, pass));
        if !pass && self.first_failure.is_none() {
            self.first_failure = Some(id);
        }
    }

    /// True when no recorded criterion failed.
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// One accepted manipulator as stored in a catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub links: usize,
    pub dof: i32,
    pub class: ClassSignature,
    pub canonical_index: MatrixIndex,
    pub matrix: AdjacencyMatrix,
    pub engine_version: String,
    pub criteria_config_hash: String,
}
