//! Graph analyses on the link graph: connectivity, base-to-end-effector path
//! coverage, a deterministic cycle basis, and spherical 2-edge-cut detection.
//!
//! Path coverage is computed through the biconnected-block decomposition: a
//! vertex lies on some simple base→EE path exactly when it belongs to a block
//! on the chain of blocks between base and end-effector in the block-cut
//! tree. A brute-force path enumerator exists in the test suites as an
//! independent oracle; it is never used by the engine itself.

use thiserror::Error;

use crate::model::{AdjacencyMatrix, JointKind};

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("edge pair ({0}, {1}) does not disconnect the graph")]
    NotACut(usize, usize),
}

/// One joint as an edge of the link graph; `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphEdge {
    pub i: usize,
    pub j: usize,
    pub kind: JointKind,
}

/// Links as vertices, joints as edges. Edge ids are 0..E−1 in matrix cell
/// order, which keeps every downstream analysis reproducible.
#[derive(Debug, Clone)]
pub struct LinkGraph {
    n: usize,
    edges: Vec<GraphEdge>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl LinkGraph {
    pub fn from_matrix(m: &AdjacencyMatrix) -> LinkGraph {
        let edges = m
            .joints()
            .map(|(i, j, kind)| GraphEdge { i, j, kind })
            .collect();
        Self::from_edge_list(m.n(), edges)
    }

    /// Build directly from an edge list (test harnesses and oracles).
    pub fn from_edge_list(n: usize, edges: Vec<GraphEdge>) -> LinkGraph {
        let mut adj = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            debug_assert!(e.i < e.j && e.j < n);
            adj[e.i].push((e.j, id));
            adj[e.j].push((e.i, id));
        }
        LinkGraph { n, edges, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> GraphEdge {
        self.edges[id]
    }

    /// Neighbors of `v` as (vertex, edge id), ascending edge id.
    pub fn adjacent(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// True iff some link has no joint at all.
    pub fn has_isolated_link(&self) -> bool {
        (0..self.n).any(|v| self.adj[v].is_empty())
    }

    /// Component label per vertex, ignoring the given edge ids. Labels are
    /// assigned in order of each component's lowest vertex.
    fn component_labels_without(&self, skipped: &[usize]) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &(u, e) in &self.adj[v] {
                    if skipped.contains(&e) || label[u] != usize::MAX {
                        continue;
                    }
                    label[u] = next;
                    stack.push(u);
                }
            }
            next += 1;
        }
        label
    }

    fn component_count_without(&self, skipped: &[usize]) -> usize {
        *self.component_labels_without(skipped).iter().max().unwrap() + 1
    }

    /// True iff base (vertex 0) and end-effector (vertex n−1) share a
    /// component.
    pub fn base_ee_connected(&self) -> bool {
        let labels = self.component_labels_without(&[]);
        labels[0] == labels[self.n - 1]
    }

    /// Connected components (vertex sets, each ascending) after ignoring the
    /// given edge ids, ordered by lowest contained vertex.
    pub fn components_without(&self, skipped: &[usize]) -> Vec<Vec<usize>> {
        let labels = self.component_labels_without(skipped);
        let count = labels.iter().max().unwrap() + 1;
        let mut comps = vec![Vec::new(); count];
        for (v, &label) in labels.iter().enumerate() {
            comps[label].push(v);
        }
        comps
    }

    /// Biconnected blocks and cut vertices (Hopcroft–Tarjan).
    fn block_decomposition(&self) -> BlockDecomposition {
        let mut state = BlockState {
            graph: self,
            disc: vec![0; self.n],
            low: vec![0; self.n],
            time: 0,
            stack: Vec::new(),
            blocks: Vec::new(),
            is_cut: vec![false; self.n],
        };
        for v in 0..self.n {
            if state.disc[v] == 0 {
                state.visit(v, None);
            }
        }
        let blocks = state
            .blocks
            .into_iter()
            .map(|edge_ids| {
                let mut vertices: Vec<usize> = edge_ids
                    .iter()
                    .flat_map(|&e| [self.edges[e].i, self.edges[e].j])
                    .collect();
                vertices.sort_unstable();
                vertices.dedup();
                Block {
                    edges: edge_ids,
                    vertices,
                }
            })
            .collect();
        BlockDecomposition {
            blocks,
            is_cut: state.is_cut,
        }
    }

    /// Which links lie on at least one simple base→EE path: the union of the
    /// blocks along the base–EE chain of the block-cut tree. All-false when
    /// base and end-effector are disconnected (no such path exists).
    pub fn covered_links(&self) -> Vec<bool> {
        let (s, t) = (0, self.n - 1);
        let mut covered = vec![false; self.n];
        if self.adj[s].is_empty() || self.adj[t].is_empty() {
            return covered;
        }
        let bd = self.block_decomposition();
        let nblocks = bd.blocks.len();

        // Tree nodes: 0..nblocks are blocks, nblocks + v is cut vertex v. A
        // non-cut vertex of positive degree lies in exactly one block.
        let mut node_of = vec![None; self.n];
        for v in 0..self.n {
            if bd.is_cut[v] {
                node_of[v] = Some(nblocks + v);
            }
        }
        let mut tree_adj = vec![Vec::new(); nblocks + self.n];
        for (bi, block) in bd.blocks.iter().enumerate() {
            for &v in &block.vertices {
                if bd.is_cut[v] {
                    tree_adj[bi].push(nblocks + v);
                    tree_adj[nblocks + v].push(bi);
                } else {
                    node_of[v] = Some(bi);
                }
            }
        }
        let (Some(ns), Some(nt)) = (node_of[s], node_of[t]) else {
            return covered;
        };

        // BFS path ns → nt in the block-cut tree.
        let mut prev = vec![usize::MAX; nblocks + self.n];
        prev[ns] = ns;
        let mut queue = std::collections::VecDeque::from([ns]);
        while let Some(node) = queue.pop_front() {
            if node == nt {
                break;
            }
            for &next in &tree_adj[node] {
                if prev[next] == usize::MAX {
                    prev[next] = node;
                    queue.push_back(next);
                }
            }
        }
        if prev[nt] == usize::MAX {
            return covered; // different components: no path, nothing covered
        }
        let mut node = nt;
        loop {
            if node < nblocks {
                for &v in &bd.blocks[node].vertices {
                    covered[v] = true;
                }
            } else {
                covered[node - nblocks] = true;
            }
            if node == ns {
                break;
            }
            node = prev[node];
        }
        covered
    }

    /// True iff every link lies on some simple base→EE path. Rejects both
    /// dangling open chains and loops hung off the main structure.
    pub fn all_links_contribute(&self) -> bool {
        self.covered_links().iter().all(|&c| c)
    }

    /// True iff no cycle runs through a link that contributes to no base→EE
    /// path — the loop-shaped special case of the coverage test, kept
    /// separate for diagnostic traces.
    pub fn no_noncontributing_loops(&self) -> bool {
        let covered = self.covered_links();
        let bd = self.block_decomposition();
        bd.blocks
            .iter()
            .filter(|b| b.edges.len() >= 2)
            .all(|b| b.vertices.iter().all(|&v| covered[v]))
    }

    /// Deterministic spanning forest: grow from vertex 0 always taking the
    /// lowest-id edge that reaches a new vertex; further components start at
    /// their lowest vertex.
    pub fn spanning_forest(&self) -> SpanningForest {
        let mut visited = vec![false; self.n];
        let mut parent = vec![None; self.n];
        let mut depth = vec![0usize; self.n];
        let mut is_tree_edge = vec![false; self.edges.len()];
        for root in 0..self.n {
            if visited[root] {
                continue;
            }
            visited[root] = true;
            loop {
                let grow = self.edges.iter().enumerate().find_map(|(e, edge)| {
                    match (visited[edge.i], visited[edge.j]) {
                        (true, false) => Some((e, edge.i, edge.j)),
                        (false, true) => Some((e, edge.j, edge.i)),
                        _ => None,
                    }
                });
                let Some((e, from, to)) = grow else {
                    break;
                };
                visited[to] = true;
                parent[to] = Some((from, e));
                depth[to] = depth[from] + 1;
                is_tree_edge[e] = true;
            }
        }
        SpanningForest {
            parent,
            depth,
            is_tree_edge,
        }
    }

    /// Fundamental cycles of the deterministic spanning forest, one per
    /// non-tree edge in ascending edge-id order.
    pub fn cycle_basis(&self) -> CycleBasis {
        let forest = self.spanning_forest();
        let loops = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(e, _)| !forest.is_tree_edge(e))
            .map(|(e, edge)| {
                let mut walk = vec![(e, 1i8)];
                let back = forest
                    .tree_path(self, edge.j, edge.i)
                    .expect("non-tree edge endpoints share a forest component");
                walk.extend(back);
                walk
            })
            .collect();
        CycleBasis { loops }
    }

    /// All unordered pairs of spherical edges whose joint removal increases
    /// the number of connected components.
    pub fn spherical_two_cuts(&self) -> Vec<(usize, usize)> {
        let spherical: Vec<usize> = (0..self.edges.len())
            .filter(|&e| self.edges[e].kind == JointKind::Spherical)
            .collect();
        let before = self.component_count_without(&[]);
        let mut cuts = Vec::new();
        for (a, &ea) in spherical.iter().enumerate() {
            for &eb in &spherical[a + 1..] {
                if self.component_count_without(&[ea, eb]) > before {
                    cuts.push((ea, eb));
                }
            }
        }
        cuts
    }

    /// Vertex sets of the two sides after removing a 2-edge cut; the first
    /// contains the base. When the removal splits off several pieces, the
    /// second set is everything outside the base's component.
    pub fn cut_sides(
        &self,
        cut: (usize, usize),
    ) -> Result<(Vec<usize>, Vec<usize>), TopologyError> {
        let before = self.component_count_without(&[]);
        let labels = self.component_labels_without(&[cut.0, cut.1]);
        let after = *labels.iter().max().unwrap() + 1;
        if after <= before {
            return Err(TopologyError::NotACut(cut.0, cut.1));
        }
        let base_label = labels[0];
        let (base_side, other_side) = (0..self.n).partition(|&v| labels[v] == base_label);
        Ok((base_side, other_side))
    }
}

struct BlockState<'g> {
    graph: &'g LinkGraph,
    disc: Vec<usize>,
    low: Vec<usize>,
    time: usize,
    stack: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    is_cut: Vec<bool>,
}

impl BlockState<'_> {
    fn visit(&mut self, v: usize, parent_edge: Option<usize>) {
        self.time += 1;
        self.disc[v] = self.time;
        self.low[v] = self.time;
        let mut children = 0;
        for idx in 0..self.graph.adj[v].len() {
            let (u, e) = self.graph.adj[v][idx];
            if Some(e) == parent_edge {
                continue;
            }
            if self.disc[u] == 0 {
                self.stack.push(e);
                children += 1;
                self.visit(u, Some(e));
                self.low[v] = self.low[v].min(self.low[u]);
                if self.low[u] >= self.disc[v] {
                    if parent_edge.is_some() || children > 1 {
                        self.is_cut[v] = true;
                    }
                    let mut block = Vec::new();
                    while let Some(top) = self.stack.pop() {
                        block.push(top);
                        if top == e {
                            break;
                        }
                    }
                    self.blocks.push(block);
                }
            } else if self.disc[u] < self.disc[v] {
                self.stack.push(e);
                self.low[v] = self.low[v].min(self.disc[u]);
            }
        }
    }
}

/// One biconnected block: its edge ids and vertex set.
#[derive(Debug, Clone)]
struct Block {
    edges: Vec<usize>,
    vertices: Vec<usize>,
}

#[derive(Debug, Clone)]
struct BlockDecomposition {
    blocks: Vec<Block>,
    is_cut: Vec<bool>,
}

/// Rooted spanning forest with parent pointers; see
/// [`LinkGraph::spanning_forest`].
#[derive(Debug, Clone)]
pub struct SpanningForest {
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
    is_tree_edge: Vec<bool>,
}

impl SpanningForest {
    pub fn is_tree_edge(&self, edge_id: usize) -> bool {
        self.is_tree_edge[edge_id]
    }

    /// The unique tree walk `from` → `to` as (edge id, direction), where
    /// direction +1 traverses the edge from its lower to its higher vertex.
    /// `None` when the endpoints sit in different forest components.
    pub fn tree_path(
        &self,
        g: &LinkGraph,
        from: usize,
        to: usize,
    ) -> Option<Vec<(usize, i8)>> {
        let step = |v: usize| -> Option<(usize, usize, i8)> {
            let (p, e) = self.parent[v]?;
            let dir = if g.edge(e).i == v { 1 } else { -1 };
            Some((p, e, dir))
        };
        let (mut a, mut b) = (from, to);
        let mut up_a = Vec::new();
        let mut down_b = Vec::new();
        while a != b {
            if self.depth[a] >= self.depth[b] {
                let (p, e, dir) = step(a)?;
                up_a.push((e, dir));
                a = p;
            } else {
                let (p, e, dir) = step(b)?;
                down_b.push((e, -dir));
                b = p;
            }
        }
        up_a.extend(down_b.into_iter().rev());
        Some(up_a)
    }
}

/// Fundamental cycles as closed walks of (edge id, direction).
#[derive(Debug, Clone)]
pub struct CycleBasis {
    pub loops: Vec<Vec<(usize, i8)>>,
}
