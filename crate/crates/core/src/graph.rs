//! Simple undirected graphs with stable integer edge identifiers, plus the
//! path / linear forest / cycle / edge-colouring value types used throughout.
//!
//! Vertices are `0..n`. An edge id is the position of the edge in the
//! construction order; all file formats and systems reference edges by id.

use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::VertexSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    VertexOutOfRange { v: usize, n: usize },
    Loop { v: usize },
    DuplicateEdge { u: usize, v: usize },
    EdgeOutOfRange { e: usize, m: usize },
    NotAdjacent { u: usize, v: usize },
    RepeatedVertex { v: usize },
    EmptyPath,
    CycleTooShort { len: usize },
    NotDisjoint { v: usize },
}

impl core::fmt::Display for GraphError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GraphError::VertexOutOfRange { v, n } => write!(f, "vertex {v} out of range (n={n})"),
            GraphError::Loop { v } => write!(f, "loop at vertex {v}"),
            GraphError::DuplicateEdge { u, v } => write!(f, "duplicate edge {u}-{v}"),
            GraphError::EdgeOutOfRange { e, m } => write!(f, "edge id {e} out of range (m={m})"),
            GraphError::NotAdjacent { u, v } => write!(f, "vertices {u} and {v} are not adjacent"),
            GraphError::RepeatedVertex { v } => write!(f, "vertex {v} repeated"),
            GraphError::EmptyPath => write!(f, "empty vertex sequence"),
            GraphError::CycleTooShort { len } => write!(f, "cycle of length {len} < 3"),
            GraphError::NotDisjoint { v } => write!(f, "vertex {v} appears in two components"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GraphError {}

/// Simple undirected graph. Immutable after construction.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<[u32; 2]>,
    adj: Vec<Vec<(u32, u32)>>,
    adj_words: Vec<u64>,
    stride: usize,
}

impl Graph {
    pub fn new(n: usize, edge_list: &[(usize, usize)]) -> Result<Self, GraphError> {
        let stride = n.div_ceil(64);
        let mut g = Graph {
            n,
            edges: Vec::with_capacity(edge_list.len()),
            adj: vec![Vec::new(); n],
            adj_words: vec![0; n * stride],
            stride,
        };
        for &(u, v) in edge_list {
            g.push_edge(u, v)?;
        }
        for row in g.adj.iter_mut() {
            row.sort_unstable();
        }
        Ok(g)
    }

    fn push_edge(&mut self, u: usize, v: usize) -> Result<usize, GraphError> {
        if u >= self.n {
            return Err(GraphError::VertexOutOfRange { v: u, n: self.n });
        }
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange { v, n: self.n });
        }
        if u == v {
            return Err(GraphError::Loop { v });
        }
        if self.has_edge(u, v) {
            return Err(GraphError::DuplicateEdge { u, v });
        }
        let id = self.edges.len() as u32;
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges.push([a as u32, b as u32]);
        self.adj[u].push((v as u32, id));
        self.adj[v].push((u as u32, id));
        self.adj_words[u * self.stride + (v >> 6)] |= 1 << (v & 63);
        self.adj_words[v * self.stride + (u >> 6)] |= 1 << (u & 63);
        Ok(id as usize)
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Graph::new(n, &edges).expect("complete graph is simple")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Endpoints of edge `e` as `(u, v)` with `u < v`.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let [a, b] = self.edges[e];
        (a as usize, b as usize)
    }

    pub fn is_endpoint(&self, e: usize, v: usize) -> bool {
        let [a, b] = self.edges[e];
        a as usize == v || b as usize == v
    }

    /// The endpoint of `e` other than `v`. Panics if `v` is not on `e`.
    pub fn other_endpoint(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.endpoints(e);
        if v == a {
            b
        } else {
            debug_assert_eq!(v, b);
            a
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Neighbours of `v` as `(neighbour, edge id)`, ascending by neighbour.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj[v].iter().map(|&(w, e)| (w as usize, e as usize))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u >= self.n || v >= self.n {
            return false;
        }
        self.adj_words[u * self.stride + (v >> 6)] & (1 << (v & 63)) != 0
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        if !self.has_edge(u, v) {
            return None;
        }
        let row = &self.adj[u];
        let i = row.partition_point(|&(w, _)| (w as usize) < v);
        debug_assert!(row[i].0 as usize == v);
        Some(row[i].1 as usize)
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn is_regular(&self) -> Option<usize> {
        let d = self.degree(0);
        if self.n == 0 || (0..self.n).all(|v| self.degree(v) == d) {
            Some(d)
        } else {
            None
        }
    }

    /// `d_G(v, X)`: number of neighbours of `v` inside `X`.
    pub fn degree_in(&self, v: usize, x: &VertexSet) -> usize {
        debug_assert_eq!(x.capacity(), self.n);
        let row = &self.adj_words[v * self.stride..(v + 1) * self.stride];
        x.intersection_count_words(row)
    }

    /// `d_G(v, S)` for a small vertex slice (cheaper than building a set).
    pub fn degree_in_slice(&self, v: usize, s: &[u32]) -> usize {
        s.iter().filter(|&&w| self.has_edge(v, w as usize)).count()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = VertexSet::new(self.n);
        let mut stack = vec![0];
        seen.insert(0);
        while let Some(v) = stack.pop() {
            for (w, _) in self.neighbors(v) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.n
    }

    /// Checks internal consistency; used by tests and after deserialization.
    pub fn validate(&self) -> Result<(), GraphError> {
        let mut seen = alloc::collections::BTreeSet::new();
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            let (a, b) = (a as usize, b as usize);
            if a >= self.n || b >= self.n {
                return Err(GraphError::VertexOutOfRange {
                    v: a.max(b),
                    n: self.n,
                });
            }
            if a == b {
                return Err(GraphError::Loop { v: a });
            }
            if !seen.insert((a, b)) {
                return Err(GraphError::DuplicateEdge { u: a, v: b });
            }
            if self.edge_between(a, b) != Some(e) {
                return Err(GraphError::NotAdjacent { u: a, v: b });
            }
        }
        let total: usize = (0..self.n).map(|v| self.degree(v)).sum();
        debug_assert_eq!(total, 2 * self.edges.len());
        Ok(())
    }

    /// Induced subgraph `G[X]` with vertex and edge id remap tables.
    pub fn induced(&self, x: &VertexSet) -> InducedGraph {
        let old_of_new: Vec<u32> = x.iter().map(|v| v as u32).collect();
        let mut new_of_old = vec![u32::MAX; self.n];
        for (nv, &ov) in old_of_new.iter().enumerate() {
            new_of_old[ov as usize] = nv as u32;
        }
        let mut edges = Vec::new();
        let mut old_of_new_edge = Vec::new();
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            let (na, nb) = (new_of_old[a as usize], new_of_old[b as usize]);
            if na != u32::MAX && nb != u32::MAX {
                edges.push((na as usize, nb as usize));
                old_of_new_edge.push(e as u32);
            }
        }
        let graph = Graph::new(old_of_new.len(), &edges).expect("induced subgraph is simple");
        let mut new_of_old_edge = vec![u32::MAX; self.edges.len()];
        for (ne, &oe) in old_of_new_edge.iter().enumerate() {
            new_of_old_edge[oe as usize] = ne as u32;
        }
        InducedGraph {
            graph,
            old_of_new,
            new_of_old,
            old_of_new_edge,
            new_of_old_edge,
        }
    }

    /// Subgraph on the same vertex set keeping only `keep` edges, with maps.
    pub fn edge_subgraph(&self, keep: &[usize]) -> EdgeSubgraph {
        let mut edges = Vec::with_capacity(keep.len());
        let mut old_of_new_edge = Vec::with_capacity(keep.len());
        for &e in keep {
            let (a, b) = self.endpoints(e);
            edges.push((a, b));
            old_of_new_edge.push(e as u32);
        }
        let graph = Graph::new(self.n, &edges).expect("edge subset of a simple graph is simple");
        let mut new_of_old_edge = vec![u32::MAX; self.edges.len()];
        for (ne, &oe) in old_of_new_edge.iter().enumerate() {
            new_of_old_edge[oe as usize] = ne as u32;
        }
        EdgeSubgraph {
            graph,
            old_of_new_edge,
            new_of_old_edge,
        }
    }
}

/// Result of [`Graph::induced`]: the subgraph plus id translation tables
/// (`u32::MAX` marks vertices/edges with no image).
pub struct InducedGraph {
    pub graph: Graph,
    pub old_of_new: Vec<u32>,
    pub new_of_old: Vec<u32>,
    pub old_of_new_edge: Vec<u32>,
    pub new_of_old_edge: Vec<u32>,
}

pub struct EdgeSubgraph {
    pub graph: Graph,
    pub old_of_new_edge: Vec<u32>,
    pub new_of_old_edge: Vec<u32>,
}

/// An oriented edge `(endpoint, second)`: the first two vertices of a path
/// read from one of its ends. `P = v1 v2 ...` has oriented end-edges
/// `(v1, v2)` and `(vl, v(l-1))`.
pub type OrientedEdge = (usize, usize);

/// A simple path as an ordered vertex sequence with its edge ids.
/// A single vertex is a path of length 0. `P` and its reversal are distinct
/// values with swapped end-edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSeq {
    verts: Vec<u32>,
    edges: Vec<u32>,
}

impl PathSeq {
    pub fn singleton(v: usize) -> Self {
        PathSeq {
            verts: vec![v as u32],
            edges: Vec::new(),
        }
    }

    pub fn from_vertices(g: &Graph, verts: &[usize]) -> Result<Self, GraphError> {
        if verts.is_empty() {
            return Err(GraphError::EmptyPath);
        }
        let mut seen = VertexSet::new(g.n());
        for &v in verts {
            if v >= g.n() {
                return Err(GraphError::VertexOutOfRange { v, n: g.n() });
            }
            if !seen.insert(v) {
                return Err(GraphError::RepeatedVertex { v });
            }
        }
        let mut edges = Vec::with_capacity(verts.len().saturating_sub(1));
        for w in verts.windows(2) {
            match g.edge_between(w[0], w[1]) {
                Some(e) => edges.push(e as u32),
                None => return Err(GraphError::NotAdjacent { u: w[0], v: w[1] }),
            }
        }
        Ok(PathSeq {
            verts: verts.iter().map(|&v| v as u32).collect(),
            edges,
        })
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a path always has at least one vertex
    }

    pub fn order(&self) -> usize {
        self.verts.len()
    }

    pub fn verts(&self) -> impl Iterator<Item = usize> + '_ {
        self.verts.iter().map(|&v| v as usize)
    }

    pub fn vert(&self, i: usize) -> usize {
        self.verts[i] as usize
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().map(|&e| e as usize)
    }

    pub fn edge(&self, i: usize) -> usize {
        self.edges[i] as usize
    }

    pub fn first(&self) -> usize {
        self.verts[0] as usize
    }

    pub fn last(&self) -> usize {
        *self.verts.last().unwrap() as usize
    }

    /// Oriented end-edges `((v1,v2), (vl,v(l-1)))`; `None` for singletons.
    pub fn end_edges(&self) -> Option<(OrientedEdge, OrientedEdge)> {
        if self.len() == 0 {
            return None;
        }
        let k = self.verts.len();
        Some((
            (self.verts[0] as usize, self.verts[1] as usize),
            (self.verts[k - 1] as usize, self.verts[k - 2] as usize),
        ))
    }

    pub fn reversed(&self) -> PathSeq {
        let mut verts = self.verts.clone();
        let mut edges = self.edges.clone();
        verts.reverse();
        edges.reverse();
        PathSeq { verts, edges }
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.verts.contains(&(v as u32))
    }

    /// Consecutive edge pairs with their shared vertex: `(e_i, v_{i+1}, e_{i+1})`.
    pub fn consecutive_pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.edges.len().saturating_sub(1)).map(move |i| {
            (
                self.edges[i] as usize,
                self.verts[i + 1] as usize,
                self.edges[i + 1] as usize,
            )
        })
    }

    /// Concatenates two paths whose traversals overlap in exactly their last
    /// two / first two vertices (the shared oriented edge is kept once).
    /// Panics if the overlap does not match; the caller checks disjointness.
    pub fn splice_shared_edge(&self, next: &PathSeq) -> PathSeq {
        let k = self.verts.len();
        assert!(k >= 2 && next.verts.len() >= 2, "splice needs real edges");
        assert_eq!(self.verts[k - 2], next.verts[0], "splice overlap mismatch");
        assert_eq!(self.verts[k - 1], next.verts[1], "splice overlap mismatch");
        let mut verts = self.verts.clone();
        verts.extend_from_slice(&next.verts[2..]);
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&next.edges[1..]);
        PathSeq { verts, edges }
    }
}

/// A vertex-disjoint union of paths; singleton components are allowed.
#[derive(Clone, Debug, Default)]
pub struct LinearForest {
    paths: Vec<PathSeq>,
}

impl LinearForest {
    pub fn new(n: usize, paths: Vec<PathSeq>) -> Result<Self, GraphError> {
        let mut seen = VertexSet::new(n);
        for p in &paths {
            for v in p.verts() {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { v, n });
                }
                if !seen.insert(v) {
                    return Err(GraphError::NotDisjoint { v });
                }
            }
        }
        Ok(LinearForest { paths })
    }

    pub fn empty() -> Self {
        LinearForest { paths: Vec::new() }
    }

    pub fn paths(&self) -> &[PathSeq] {
        &self.paths
    }

    pub fn component_count(&self) -> usize {
        self.paths.len()
    }

    pub fn edge_count(&self) -> usize {
        self.paths.iter().map(|p| p.len()).sum()
    }

    pub fn vertex_count(&self) -> usize {
        self.paths.iter().map(|p| p.order()).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.paths.iter().flat_map(|p| p.verts())
    }

    pub fn vertex_set(&self, n: usize) -> VertexSet {
        VertexSet::from_iter(n, self.vertices())
    }
}

/// A simple cycle (length >= 3) as an ordered vertex sequence; `edges[i]`
/// joins `verts[i]` and `verts[(i+1) % len]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSeq {
    verts: Vec<u32>,
    edges: Vec<u32>,
}

impl CycleSeq {
    pub fn from_vertices(g: &Graph, verts: &[usize]) -> Result<Self, GraphError> {
        if verts.len() < 3 {
            return Err(GraphError::CycleTooShort { len: verts.len() });
        }
        let mut seen = VertexSet::new(g.n());
        for &v in verts {
            if v >= g.n() {
                return Err(GraphError::VertexOutOfRange { v, n: g.n() });
            }
            if !seen.insert(v) {
                return Err(GraphError::RepeatedVertex { v });
            }
        }
        let k = verts.len();
        let mut edges = Vec::with_capacity(k);
        for i in 0..k {
            let (u, v) = (verts[i], verts[(i + 1) % k]);
            match g.edge_between(u, v) {
                Some(e) => edges.push(e as u32),
                None => return Err(GraphError::NotAdjacent { u, v }),
            }
        }
        Ok(CycleSeq {
            verts: verts.iter().map(|&v| v as u32).collect(),
            edges,
        })
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn verts(&self) -> impl Iterator<Item = usize> + '_ {
        self.verts.iter().map(|&v| v as usize)
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().map(|&e| e as usize)
    }

    /// Consecutive edge pairs including the two wrap-around pairs.
    pub fn consecutive_pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let k = self.verts.len();
        (0..k).map(move |i| {
            (
                self.edges[i] as usize,
                self.verts[(i + 1) % k] as usize,
                self.edges[(i + 1) % k] as usize,
            )
        })
    }

    pub fn vertex_set(&self, n: usize) -> VertexSet {
        VertexSet::from_iter(n, self.verts())
    }
}

/// A total edge colouring (colour per edge id).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColouring {
    colours: Vec<u32>,
}

impl EdgeColouring {
    pub fn new(colours: Vec<u32>) -> Self {
        EdgeColouring { colours }
    }

    /// All edges distinct colours.
    pub fn rainbow(edge_count: usize) -> Self {
        EdgeColouring {
            colours: (0..edge_count as u32).collect(),
        }
    }

    pub fn monochromatic(edge_count: usize, colour: u32) -> Self {
        EdgeColouring {
            colours: vec![colour; edge_count],
        }
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    pub fn of(&self, e: usize) -> u32 {
        self.colours[e]
    }

    pub fn colours(&self) -> &[u32] {
        &self.colours
    }

    /// Maximum number of equally-coloured edges at any vertex.
    pub fn delta_mono(&self, g: &Graph) -> usize {
        assert_eq!(
            self.colours.len(),
            g.edge_count(),
            "colouring must be total"
        );
        let mut best = 0;
        let mut counts = alloc::collections::BTreeMap::new();
        for v in 0..g.n() {
            counts.clear();
            for (_, e) in g.neighbors(v) {
                *counts.entry(self.colours[e]).or_insert(0usize) += 1;
            }
            best = best.max(counts.values().copied().max().unwrap_or(0));
        }
        best
    }
}
