//! Incompatibility systems: per-vertex symmetric forbidden-pair relations on
//! incident edges, compatibility predicates, restriction and the bridge from
//! edge colourings.
//!
//! A pair `{e, e'}` with `e ∩ e' = {v}` may be forbidden *at* `v`. A subgraph
//! is compatible when none of its edge pairs is forbidden; since every
//! forbidden pair shares a vertex, paths and cycles only need their
//! consecutive pairs checked.

use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::VertexSet;
use crate::graph::{CycleSeq, EdgeColouring, Graph, InducedGraph, LinearForest, PathSeq};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemError {
    EdgeOutOfRange { e: usize },
    NotIncident { v: usize, e: usize },
    NotIntersecting { e1: usize, e2: usize },
    SamePair { e: usize },
    DuplicatePair { v: usize, e1: usize, e2: usize },
    VertexNotOnEdge { v: usize, e: usize },
}

impl core::fmt::Display for SystemError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SystemError::EdgeOutOfRange { e } => write!(f, "edge id {e} out of range"),
            SystemError::NotIncident { v, e } => write!(f, "edge {e} does not contain vertex {v}"),
            SystemError::NotIntersecting { e1, e2 } => {
                write!(f, "edges {e1} and {e2} do not meet at the stated vertex")
            }
            SystemError::SamePair { e } => write!(f, "pair {{{e},{e}}} is not a pair"),
            SystemError::DuplicatePair { v, e1, e2 } => {
                write!(f, "pair {{{e1},{e2}}} at vertex {v} listed twice")
            }
            SystemError::VertexNotOnEdge { v, e } => {
                write!(f, "vertex {v} is not an endpoint of edge {e}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SystemError {}

/// Read-only queries every incompatibility system answers. Implemented by the
/// explicit [`IncompatibilitySystem`], the vacuous [`EmptySystem`] and the
/// synthetic exactly-regular system used for large-scale runs.
pub trait System {
    /// Is pair `{e1, e2}` forbidden at `v`? Callers guarantee `v ∈ e1 ∩ e2`.
    fn forbids(&self, g: &Graph, v: usize, e1: usize, e2: usize) -> bool;

    /// `|F_v(e)|`: number of forbidden partners of `e` at `v` (`v ∈ e`).
    fn partner_count(&self, g: &Graph, v: usize, e: usize) -> usize;

    /// Calls `f` with every forbidden partner edge of `e` at `v`.
    fn for_each_partner(&self, g: &Graph, v: usize, e: usize, f: &mut dyn FnMut(usize));

    /// Max over all `(v, e)` with `v ∈ e` of `|F_v(e)|`; 0 for the empty system.
    fn boundedness(&self, g: &Graph) -> usize {
        let mut best = 0;
        for e in 0..g.edge_count() {
            let (a, b) = g.endpoints(e);
            best = best.max(self.partner_count(g, a, e));
            best = best.max(self.partner_count(g, b, e));
        }
        best
    }

    /// `Some(d)` if `|F_v(e)| = d` for every incident `(v, e)`. The empty
    /// system on an edgeless graph is 0-regular by convention.
    fn regularity(&self, g: &Graph) -> Option<usize> {
        let mut d = None;
        for e in 0..g.edge_count() {
            let (a, b) = g.endpoints(e);
            for v in [a, b] {
                let c = self.partner_count(g, v, e);
                match d {
                    None => d = Some(c),
                    Some(x) if x != c => return None,
                    _ => {}
                }
            }
        }
        d.or(Some(0))
    }
}

/// The system with no forbidden pairs.
#[derive(Clone, Copy, Debug, Default)]
pub struct EmptySystem;

impl System for EmptySystem {
    fn forbids(&self, _: &Graph, _: usize, _: usize, _: usize) -> bool {
        false
    }
    fn partner_count(&self, _: &Graph, _: usize, _: usize) -> usize {
        0
    }
    fn for_each_partner(&self, _: &Graph, _: usize, _: usize, _: &mut dyn FnMut(usize)) {}
}

/// Explicit incompatibility system with O(log) pair membership.
///
/// Each pair `{e, e'}` meeting at `v` is stored twice: in the partner list of
/// `(v, e)` and of `(v, e')`. Lists are keyed by (edge, endpoint side) and
/// kept sorted. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncompatibilitySystem {
    /// `partners[e][s]` = sorted forbidden partners of `e` at its endpoint
    /// `s` (0 = smaller endpoint, 1 = larger).
    partners: Vec<[Vec<u32>; 2]>,
}

impl IncompatibilitySystem {
    pub fn empty(edge_count: usize) -> Self {
        IncompatibilitySystem {
            partners: vec![[Vec::new(), Vec::new()]; edge_count],
        }
    }

    /// Builds from triples `(v, e1, e2)`, validating locality and rejecting
    /// duplicates. Symmetric storage is handled internally.
    pub fn from_pairs<I>(g: &Graph, pairs: I) -> Result<Self, SystemError>
    where
        I: IntoIterator<Item = (usize, usize, usize)>,
    {
        let mut sys = Self::empty(g.edge_count());
        for (v, e1, e2) in pairs {
            sys.insert_pair(g, v, e1, e2)?;
        }
        sys.sort_lists();
        sys.check_duplicates(g)?;
        Ok(sys)
    }

    /// Unchecked bulk constructor for pairs already known to be local and
    /// duplicate-free (used by generators; lists are sorted afterwards).
    pub(crate) fn from_pairs_unchecked<I>(edge_count: usize, g: &Graph, pairs: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, usize)>,
    {
        let mut sys = Self::empty(edge_count);
        for (v, e1, e2) in pairs {
            let s1 = side(g, e1, v);
            let s2 = side(g, e2, v);
            sys.partners[e1][s1].push(e2 as u32);
            sys.partners[e2][s2].push(e1 as u32);
        }
        sys.sort_lists();
        sys
    }

    fn insert_pair(
        &mut self,
        g: &Graph,
        v: usize,
        e1: usize,
        e2: usize,
    ) -> Result<(), SystemError> {
        let m = g.edge_count();
        if e1 >= m {
            return Err(SystemError::EdgeOutOfRange { e: e1 });
        }
        if e2 >= m {
            return Err(SystemError::EdgeOutOfRange { e: e2 });
        }
        if e1 == e2 {
            return Err(SystemError::SamePair { e: e1 });
        }
        if !g.is_endpoint(e1, v) {
            return Err(SystemError::NotIncident { v, e: e1 });
        }
        if !g.is_endpoint(e2, v) {
            return Err(SystemError::NotIncident { v, e: e2 });
        }
        // simple graphs: distinct incident edges meet exactly in {v}
        let s1 = side(g, e1, v);
        let s2 = side(g, e2, v);
        self.partners[e1][s1].push(e2 as u32);
        self.partners[e2][s2].push(e1 as u32);
        Ok(())
    }

    fn sort_lists(&mut self) {
        for slot in self.partners.iter_mut() {
            slot[0].sort_unstable();
            slot[1].sort_unstable();
        }
    }

    fn check_duplicates(&self, g: &Graph) -> Result<(), SystemError> {
        for (e, slot) in self.partners.iter().enumerate() {
            for s in 0..2 {
                if let Some(w) = slot[s].windows(2).find(|w| w[0] == w[1]) {
                    let (a, b) = g.endpoints(e);
                    let v = if s == 0 { a } else { b };
                    return Err(SystemError::DuplicatePair {
                        v,
                        e1: e.min(w[0] as usize),
                        e2: e.max(w[0] as usize),
                    });
                }
            }
        }
        Ok(())
    }

    /// Sorted forbidden partners of `e` at endpoint `v`.
    pub fn partners_at<'a>(&'a self, g: &Graph, e: usize, v: usize) -> &'a [u32] {
        &self.partners[e][side(g, e, v)]
    }

    /// Total number of stored pairs.
    pub fn pair_count(&self) -> usize {
        let doubled: usize = self.partners.iter().map(|s| s[0].len() + s[1].len()).sum();
        doubled / 2
    }

    /// Canonical pair list `(v, e1, e2)` with `e1 < e2`, sorted.
    pub fn iter_pairs<'a>(
        &'a self,
        g: &'a Graph,
    ) -> impl Iterator<Item = (usize, usize, usize)> + 'a {
        let mut out: Vec<(usize, usize, usize)> = Vec::with_capacity(self.pair_count());
        for (e, slot) in self.partners.iter().enumerate() {
            let (a, b) = g.endpoints(e);
            for (s, v) in [(0, a), (1, b)] {
                for &p in &slot[s] {
                    let p = p as usize;
                    if e < p {
                        out.push((v, e, p));
                    }
                }
            }
        }
        out.sort_unstable();
        out.into_iter()
    }

    /// Checks locality and symmetry of the stored representation.
    pub fn validate(&self, g: &Graph) -> Result<(), SystemError> {
        if self.partners.len() != g.edge_count() {
            return Err(SystemError::EdgeOutOfRange {
                e: self.partners.len(),
            });
        }
        for (e, slot) in self.partners.iter().enumerate() {
            let (a, b) = g.endpoints(e);
            for (s, v) in [(0usize, a), (1, b)] {
                for &p in &slot[s] {
                    let p = p as usize;
                    if p >= g.edge_count() {
                        return Err(SystemError::EdgeOutOfRange { e: p });
                    }
                    if !g.is_endpoint(p, v) {
                        return Err(SystemError::NotIncident { v, e: p });
                    }
                    // symmetry: e must appear in p's list at v
                    if !contains(&self.partners[p][side(g, p, v)], e as u32) {
                        return Err(SystemError::NotIntersecting { e1: e, e2: p });
                    }
                }
            }
        }
        self.check_duplicates(g)
    }
}

fn side(g: &Graph, e: usize, v: usize) -> usize {
    let (a, b) = g.endpoints(e);
    if v == a {
        0
    } else {
        debug_assert_eq!(v, b, "vertex {v} not on edge {e}");
        1
    }
}

fn contains(sorted: &[u32], x: u32) -> bool {
    sorted.binary_search(&x).is_ok()
}

impl System for IncompatibilitySystem {
    fn forbids(&self, g: &Graph, v: usize, e1: usize, e2: usize) -> bool {
        contains(&self.partners[e1][side(g, e1, v)], e2 as u32)
    }

    fn partner_count(&self, g: &Graph, v: usize, e: usize) -> usize {
        self.partners[e][side(g, e, v)].len()
    }

    fn for_each_partner(&self, g: &Graph, v: usize, e: usize, f: &mut dyn FnMut(usize)) {
        for &p in &self.partners[e][side(g, e, v)] {
            f(p as usize);
        }
    }
}

/// `d_F(e, v, S)`: the number of incompatible edges (at `v`) that `e` sends
/// to `S`, i.e. `|{u ∈ S : vu ∈ E(G), {e, vu} ∈ F}|`.
pub fn incompat_degree<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    e: usize,
    v: usize,
    s: &VertexSet,
) -> Result<usize, SystemError> {
    if !g.is_endpoint(e, v) {
        return Err(SystemError::VertexNotOnEdge { v, e });
    }
    let mut count = 0;
    f.for_each_partner(g, v, e, &mut |p| {
        if s.contains(g.other_endpoint(p, v)) {
            count += 1;
        }
    });
    Ok(count)
}

/// A structure whose compatibility can be decided by consecutive-pair checks.
#[derive(Clone, Copy)]
pub enum SubgraphRef<'a> {
    Path(&'a PathSeq),
    Forest(&'a LinearForest),
    Cycle(&'a CycleSeq),
}

impl<'a> From<&'a PathSeq> for SubgraphRef<'a> {
    fn from(p: &'a PathSeq) -> Self {
        SubgraphRef::Path(p)
    }
}
impl<'a> From<&'a LinearForest> for SubgraphRef<'a> {
    fn from(h: &'a LinearForest) -> Self {
        SubgraphRef::Forest(h)
    }
}
impl<'a> From<&'a CycleSeq> for SubgraphRef<'a> {
    fn from(c: &'a CycleSeq) -> Self {
        SubgraphRef::Cycle(c)
    }
}

/// True iff no two edges of `h` form a forbidden pair. For locality-valid
/// systems it suffices to check consecutive edge pairs at shared vertices
/// (including the wrap-around pairs of a cycle); edges in different
/// components or non-consecutive positions never intersect.
pub fn is_compatible<'a, S: System + ?Sized>(
    g: &Graph,
    f: &S,
    h: impl Into<SubgraphRef<'a>>,
) -> bool {
    match h.into() {
        SubgraphRef::Path(p) => p
            .consecutive_pairs()
            .all(|(e1, v, e2)| !f.forbids(g, v, e1, e2)),
        SubgraphRef::Cycle(c) => c
            .consecutive_pairs()
            .all(|(e1, v, e2)| !f.forbids(g, v, e1, e2)),
        SubgraphRef::Forest(h) => h
            .paths()
            .iter()
            .all(|p| is_compatible(g, f, SubgraphRef::Path(p))),
    }
}

/// An induced instance `(G[X], F[X])` with its id remap tables.
pub struct InducedSystem {
    pub induced: InducedGraph,
    pub system: IncompatibilitySystem,
}

/// `F[X]`: the pairs of `F` whose edges lie entirely inside `X`, over the
/// induced subgraph `G[X]`, with edge ids remapped consistently.
pub fn induced_system<S: System + ?Sized>(g: &Graph, f: &S, x: &VertexSet) -> InducedSystem {
    let ind = g.induced(x);
    let mut pairs = Vec::new();
    for ne in 0..ind.graph.edge_count() {
        let oe = ind.old_of_new_edge[ne] as usize;
        let (oa, ob) = g.endpoints(oe);
        for ov in [oa, ob] {
            let nv = ind.new_of_old[ov] as usize;
            f.for_each_partner(g, ov, oe, &mut |op| {
                // count each pair once, from its smaller old id
                if oe < op {
                    let np = ind.new_of_old_edge[op];
                    if np != u32::MAX {
                        pairs.push((nv, ne, np as usize));
                    }
                }
            });
        }
    }
    let system =
        IncompatibilitySystem::from_pairs_unchecked(ind.graph.edge_count(), &ind.graph, pairs);
    InducedSystem {
        induced: ind,
        system,
    }
}

/// `F_mono`: all pairs of intersecting edges of the same colour. A properly
/// coloured subgraph is exactly an `F_mono`-compatible one, and
/// `boundedness(F_mono) = delta_mono - 1` whenever some colour repeats at a
/// vertex.
pub fn colouring_to_system(g: &Graph, c: &EdgeColouring) -> IncompatibilitySystem {
    assert_eq!(c.len(), g.edge_count(), "colouring must be total");
    let mut pairs = Vec::new();
    for v in 0..g.n() {
        let inc: Vec<(usize, usize)> = g.neighbors(v).collect();
        for i in 0..inc.len() {
            for j in (i + 1)..inc.len() {
                let (e1, e2) = (inc[i].1, inc[j].1);
                if c.of(e1) == c.of(e2) {
                    pairs.push((v, e1.min(e2), e1.max(e2)));
                }
            }
        }
    }
    IncompatibilitySystem::from_pairs_unchecked(g.edge_count(), g, pairs)
}
