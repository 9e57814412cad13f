//! Absorbing-path gadgets and the absorber.
//!
//! An absorbing path `P` for a pair of oriented target edges carries witness
//! paths `P1`, `P2` that re-cover `V(P)` plus the four target vertices with
//! the same outer end-edges; splicing a target path between the witnesses
//! swallows it without disturbing anything outside `P` (the vertex variant
//! carries a single witness `Q` covering `V(P) + {x}`).
//!
//! The absorber reserves a random vertex pool `A`, certifies it with a
//! spanning compatible cycle, and removes it from the host's view. When a
//! linear forest on the rest arrives, components are first merged end-to-end
//! where direct compatible joins exist, each surviving component gets a
//! gadget built on demand *inside the pool* targeted at its actual end-edges,
//! and one closing sweep strings the absorbed paths through every remaining
//! pool vertex into a single compatible cycle on exactly `A ∪ V(H)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::VertexSet;
use crate::connect::{connect, ConnectError};
use crate::graph::{CycleSeq, Graph, LinearForest, OrientedEdge, PathSeq};
use crate::math;
use crate::rng::{self, DetRng};
use crate::system::{induced_system, is_compatible, System};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Preconditions,
    PickY,
    Frame,
    Guards,
    ConnectQ1,
    ConnectQ2,
    ExtendQ3,
    LengthBudget,
    PoolDensity,
    PoolCycle,
    Closure,
}

impl core::fmt::Display for Stage {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let name = match self {
            Stage::Preconditions => "preconditions",
            Stage::PickY => "pick-y",
            Stage::Frame => "frame",
            Stage::Guards => "guards",
            Stage::ConnectQ1 => "connect-q1",
            Stage::ConnectQ2 => "connect-q2",
            Stage::ExtendQ3 => "extend-q3",
            Stage::LengthBudget => "length-budget",
            Stage::PoolDensity => "pool-density",
            Stage::PoolCycle => "pool-cycle",
            Stage::Closure => "closure",
        };
        write!(f, "{name}")
    }
}

#[derive(Clone, Debug)]
pub enum AbsorbError {
    GadgetStuck {
        stage: Stage,
        component: Option<usize>,
    },
    Connect(ConnectError),
    AnchorMismatch,
    VertexOverlap {
        v: usize,
    },
    CapacityExceeded {
        components: usize,
        capacity: usize,
    },
    StockExhausted {
        built: usize,
        needed: usize,
    },
    ForestTouchesPool {
        v: usize,
    },
    ForestIncompatible,
}

impl From<ConnectError> for AbsorbError {
    fn from(e: ConnectError) -> Self {
        AbsorbError::Connect(e)
    }
}

impl core::fmt::Display for AbsorbError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AbsorbError::GadgetStuck { stage, component } => match component {
                Some(c) => write!(f, "gadget construction stuck at {stage} (component {c})"),
                None => write!(f, "gadget construction stuck at {stage}"),
            },
            AbsorbError::Connect(e) => write!(f, "connecting failed: {e}"),
            AbsorbError::AnchorMismatch => write!(f, "target end-edges do not match the gadget"),
            AbsorbError::VertexOverlap { v } => {
                write!(f, "target shares vertex {v} with the gadget")
            }
            AbsorbError::CapacityExceeded {
                components,
                capacity,
            } => write!(
                f,
                "{components} components exceed absorber capacity {capacity}"
            ),
            AbsorbError::StockExhausted { built, needed } => {
                write!(f, "gadget stock exhausted: built {built}, needed {needed}")
            }
            AbsorbError::ForestTouchesPool { v } => {
                write!(f, "forest vertex {v} lies inside the absorber pool")
            }
            AbsorbError::ForestIncompatible => write!(f, "forest is not compatible"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for AbsorbError {}

/// What a gadget absorbs: a path with the given oriented end-edges, or a
/// single vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GadgetKind {
    /// Absorbs a path that starts with `head` and ends with `tail`, both
    /// written in traversal order (`head = (first, second)`,
    /// `tail = (last, second to last)`).
    EdgePair {
        head: OrientedEdge,
        tail: OrientedEdge,
    },
    Vertex {
        x: usize,
    },
}

#[derive(Clone, Debug)]
pub enum Witnesses {
    EdgePair { p1: PathSeq, p2: PathSeq },
    Vertex { q: PathSeq },
}

/// A compatible path plus the witness decomposition certifying that it
/// absorbs its target.
#[derive(Clone, Debug)]
pub struct AbsorbingPath {
    pub kind: GadgetKind,
    pub path: PathSeq,
    pub witnesses: Witnesses,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GadgetViolation {
    PathIncompatible,
    WitnessIncompatible,
    WrongLength { len: usize, expected: usize },
    TargetOnPath { v: usize },
    CoverMismatch,
    IntersectionMismatch,
    EndEdgeMismatch,
}

impl core::fmt::Display for GadgetViolation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GadgetViolation::PathIncompatible => write!(f, "gadget path incompatible"),
            GadgetViolation::WitnessIncompatible => write!(f, "witness path incompatible"),
            GadgetViolation::WrongLength { len, expected } => {
                write!(f, "gadget length {len}, expected {expected}")
            }
            GadgetViolation::TargetOnPath { v } => write!(f, "target vertex {v} lies on the path"),
            GadgetViolation::CoverMismatch => write!(f, "witness cover mismatch"),
            GadgetViolation::IntersectionMismatch => write!(f, "witness intersection mismatch"),
            GadgetViolation::EndEdgeMismatch => write!(f, "witness end-edges mismatch"),
        }
    }
}

/// Re-checks every defining invariant of an absorbing path against the host
/// instance. Used on construction and by the test suites.
pub fn validate_gadget<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    gadget: &AbsorbingPath,
    expected_len: Option<usize>,
) -> Result<(), GadgetViolation> {
    let p = &gadget.path;
    if !is_compatible(g, f, p) {
        return Err(GadgetViolation::PathIncompatible);
    }
    if let Some(expected) = expected_len {
        if p.len() != expected {
            return Err(GadgetViolation::WrongLength {
                len: p.len(),
                expected,
            });
        }
    }
    let pv = VertexSet::from_iter(g.n(), p.verts());
    let (pe_head, pe_tail) = p.end_edges().expect("gadget paths have length >= 1");
    match (&gadget.kind, &gadget.witnesses) {
        (GadgetKind::EdgePair { head, tail }, Witnesses::EdgePair { p1, p2 }) => {
            for &t in &[head.0, head.1, tail.0, tail.1] {
                if pv.contains(t) {
                    return Err(GadgetViolation::TargetOnPath { v: t });
                }
            }
            for w in [p1, p2] {
                if !is_compatible(g, f, w) {
                    return Err(GadgetViolation::WitnessIncompatible);
                }
            }
            // covers: V(P1) u V(P2) = V(P) u targets
            let mut cover = VertexSet::from_iter(g.n(), p1.verts());
            for v in p2.verts() {
                cover.insert(v);
            }
            let mut expected_cover = pv.clone();
            for &t in &[head.0, head.1, tail.0, tail.1] {
                expected_cover.insert(t);
            }
            if cover != expected_cover {
                return Err(GadgetViolation::CoverMismatch);
            }
            // intersection: exactly the shared target vertices
            let v1 = VertexSet::from_iter(g.n(), p1.verts());
            let targets1 = VertexSet::from_iter(g.n(), [head.0, head.1]);
            let targets2 = VertexSet::from_iter(g.n(), [tail.0, tail.1]);
            let mut expected_meet = targets1.clone();
            let mut keep = VertexSet::new(g.n());
            for v in targets2.iter() {
                if expected_meet.contains(v) {
                    keep.insert(v);
                }
            }
            expected_meet = keep;
            let mut meet = VertexSet::new(g.n());
            for v in p2.verts() {
                if v1.contains(v) {
                    meet.insert(v);
                }
            }
            if meet != expected_meet {
                return Err(GadgetViolation::IntersectionMismatch);
            }
            // end-edges: P1 starts like P's head and ends with the head
            // target in reading order; P2 starts like P's tail and ends with
            // the tail target
            let p1v: Vec<usize> = p1.verts().collect();
            let p2v: Vec<usize> = p2.verts().collect();
            let ok = p1v[0] == pe_head.0
                && p1v[1] == pe_head.1
                && p1v[p1v.len() - 2] == head.0
                && p1v[p1v.len() - 1] == head.1
                && p2v[0] == pe_tail.0
                && p2v[1] == pe_tail.1
                && p2v[p2v.len() - 2] == tail.0
                && p2v[p2v.len() - 1] == tail.1;
            if !ok {
                return Err(GadgetViolation::EndEdgeMismatch);
            }
            Ok(())
        }
        (GadgetKind::Vertex { x }, Witnesses::Vertex { q }) => {
            if pv.contains(*x) {
                return Err(GadgetViolation::TargetOnPath { v: *x });
            }
            if !is_compatible(g, f, q) {
                return Err(GadgetViolation::WitnessIncompatible);
            }
            let mut expected_cover = pv.clone();
            expected_cover.insert(*x);
            let qv = VertexSet::from_iter(g.n(), q.verts());
            if qv != expected_cover {
                return Err(GadgetViolation::CoverMismatch);
            }
            let (qh, qt) = q.end_edges().expect("witness has edges");
            if qh != pe_head || qt != pe_tail {
                return Err(GadgetViolation::EndEdgeMismatch);
            }
            Ok(())
        }
        _ => Err(GadgetViolation::EndEdgeMismatch),
    }
}

/// Shared frame of both gadget variants: `y1 z1 w1 w2 z2 y2` plus the primed
/// guards and the three connecting paths.
struct Frame {
    y: [usize; 2],
    yp: [usize; 2],
    q1: PathSeq, // z2 z2' ... z1' z1
    q2: PathSeq, // w2 w2' ... y2' y2
    q3: PathSeq, // w1 w1' ... u' u
}

impl Frame {
    /// `P = y1' y1 [rev q1] y2 y2' ... -- the common absorbing path.
    fn path(&self, g: &Graph) -> PathSeq {
        let mut verts: Vec<usize> = vec![self.yp[0], self.y[0]];
        verts.extend(self.q1.reversed().verts()); // z1 ... z2
        verts.extend(self.q2.reversed().verts()); // y2 ... w2
        verts.extend(self.q3.verts()); // w1 ... u
        PathSeq::from_vertices(g, &verts).expect("frame path is simple")
    }

    /// `P2` minus its final two target vertices: `u u' [rev q3 tail] w1 z1
    /// [rev q1 tail] z2 w2 [q2 tail] y2`.
    fn p2_stem(&self) -> Vec<usize> {
        let mut verts: Vec<usize> = self.q3.reversed().verts().collect(); // u ... w1
        verts.extend(self.q1.reversed().verts()); // z1 ... z2
        verts.extend(self.q2.verts()); // w2 ... y2
        verts
    }

    /// Vertex-variant witness stem: `y1' y1 [x] y2 [rev q2 from y2] w2 z2
    /// [q1] z1 w1 [q3] u`.
    fn vertex_witness(&self, g: &Graph, x: usize) -> PathSeq {
        let mut verts: Vec<usize> = vec![self.yp[0], self.y[0], x];
        verts.extend(self.q2.reversed().verts()); // y2 ... w2
        verts.extend(self.q1.verts()); // z2 ... z1
        verts.extend(self.q3.verts()); // w1 ... u
        PathSeq::from_vertices(g, &verts).expect("vertex witness is simple")
    }
}

struct GadgetCtx<'a, S: ?Sized> {
    g: &'a Graph,
    f: &'a S,
    taken: VertexSet,
    rng: DetRng,
    eta: f64,
}

impl<'a, S: System + ?Sized> GadgetCtx<'a, S> {
    /// Random neighbour of `of` passing `pred`, outside everything taken.
    fn pick_neighbor(
        &mut self,
        of: usize,
        pred: impl Fn(&Self, usize, usize) -> bool,
    ) -> Option<(usize, usize)> {
        let mut cands: Vec<(usize, usize)> = self
            .g
            .neighbors(of)
            .filter(|&(w, e)| !self.taken.contains(w) && pred(self, w, e))
            .collect();
        if cands.is_empty() {
            return None;
        }
        let i = rng::below(&mut self.rng, cands.len());
        Some(cands.swap_remove(i))
    }

    fn take(&mut self, v: usize) {
        let fresh = self.taken.insert(v);
        debug_assert!(fresh, "vertex {v} taken twice");
    }
}

fn edge(g: &Graph, u: usize, v: usize) -> usize {
    g.edge_between(u, v).expect("frame edges exist")
}

/// Builds the shared frame given the two attachment conditions: `attach[i]`
/// is the vertex the pick `y_i` must neighbour, and `attach_edge[i]` the edge
/// `y_i`'s new edge must be compatible with at that vertex.
fn build_frame<S: System + ?Sized>(
    ctx: &mut GadgetCtx<S>,
    attach: [usize; 2],
    attach_edge: [usize; 2],
    ell: usize,
) -> Result<Frame, AbsorbError> {
    let g = ctx.g;
    // y_i adjacent to the attachment, compatible there
    let mut y = [0usize; 2];
    for i in 0..2 {
        let (yi, _) = ctx
            .pick_neighbor(attach[i], |c, _, e| {
                !c.f.forbids(c.g, attach[i], attach_edge[i], e)
            })
            .ok_or(AbsorbError::GadgetStuck {
                stage: Stage::PickY,
                component: None,
            })?;
        y[i] = yi;
        ctx.take(yi);
    }
    // frame path y1 z1 w1 w2 z2 y2 (no compatibility needed yet)
    let (z1, _) = ctx
        .pick_neighbor(y[0], |_, _, _| true)
        .ok_or(AbsorbError::GadgetStuck {
            stage: Stage::Frame,
            component: None,
        })?;
    ctx.take(z1);
    let (w1, _) = ctx
        .pick_neighbor(z1, |_, _, _| true)
        .ok_or(AbsorbError::GadgetStuck {
            stage: Stage::Frame,
            component: None,
        })?;
    ctx.take(w1);
    let (w2, _) = ctx
        .pick_neighbor(w1, |_, _, _| true)
        .ok_or(AbsorbError::GadgetStuck {
            stage: Stage::Frame,
            component: None,
        })?;
    ctx.take(w2);
    let (z2, _) = ctx
        .pick_neighbor(w2, |c, w, _| c.g.has_edge(w, y[1]))
        .ok_or(AbsorbError::GadgetStuck {
            stage: Stage::Frame,
            component: None,
        })?;
    ctx.take(z2);
    let z = [z1, z2];
    let w = [w1, w2];
    // guards: for each i, the primed vertex must be compatible with both
    // listed partners of its base vertex
    let mut yp = [0usize; 2];
    let mut zp = [0usize; 2];
    let mut wp = [0usize; 2];
    for i in 0..2 {
        let e_yz = edge(g, y[i], z[i]);
        let e_yx = edge(g, y[i], attach[i]);
        let (v, _) = ctx
            .pick_neighbor(y[i], |c, _, e| {
                !c.f.forbids(c.g, y[i], e, e_yz) && !c.f.forbids(c.g, y[i], e, e_yx)
            })
            .ok_or(AbsorbError::GadgetStuck {
                stage: Stage::Guards,
                component: None,
            })?;
        yp[i] = v;
        ctx.take(v);
        let e_zy = e_yz;
        let e_zw = edge(g, z[i], w[i]);
        let (v, _) = ctx
            .pick_neighbor(z[i], |c, _, e| {
                !c.f.forbids(c.g, z[i], e, e_zy) && !c.f.forbids(c.g, z[i], e, e_zw)
            })
            .ok_or(AbsorbError::GadgetStuck {
                stage: Stage::Guards,
                component: None,
            })?;
        zp[i] = v;
        ctx.take(v);
        let e_wz = e_zw;
        let e_ww = edge(g, w[0], w[1]);
        let (v, _) = ctx
            .pick_neighbor(w[i], |c, _, e| {
                !c.f.forbids(c.g, w[i], e, e_wz) && !c.f.forbids(c.g, w[i], e, e_ww)
            })
            .ok_or(AbsorbError::GadgetStuck {
                stage: Stage::Guards,
                component: None,
            })?;
        wp[i] = v;
        ctx.take(v);
    }
    // connect z2 z2' ... z1' z1 avoiding everything taken so far
    let q1 = connect(g, ctx.f, &ctx.taken, (z[1], zp[1]), (z[0], zp[0]), ctx.eta)?.path;
    for v in q1.verts() {
        if !ctx.taken.contains(v) {
            ctx.take(v);
        }
    }
    // connect w2 w2' ... y2' y2 avoiding Q1 as well
    let q2 = connect(g, ctx.f, &ctx.taken, (w[1], wp[1]), (y[1], yp[1]), ctx.eta)?.path;
    for v in q2.verts() {
        if !ctx.taken.contains(v) {
            ctx.take(v);
        }
    }
    // greedy-extend w1 w1' to pad the total length to exactly 3*ell
    let q3_len =
        (3 * ell)
            .checked_sub(4 + q1.len() + q2.len())
            .ok_or(AbsorbError::GadgetStuck {
                stage: Stage::LengthBudget,
                component: None,
            })?;
    if q3_len < 3 {
        return Err(AbsorbError::GadgetStuck {
            stage: Stage::LengthBudget,
            component: None,
        });
    }
    let mut q3_verts = vec![w[0], wp[0]];
    let mut prev_edge = edge(g, w[0], wp[0]);
    for _ in 1..q3_len {
        let cur = *q3_verts.last().unwrap();
        let (next, e) = ctx
            .pick_neighbor(cur, |c, _, e| !c.f.forbids(c.g, cur, prev_edge, e))
            .ok_or(AbsorbError::GadgetStuck {
                stage: Stage::ExtendQ3,
                component: None,
            })?;
        ctx.take(next);
        q3_verts.push(next);
        prev_edge = e;
    }
    let q3 = PathSeq::from_vertices(g, &q3_verts).expect("greedy extension is simple");
    Ok(Frame { y, yp, q1, q2, q3 })
}

/// Common slack check: the host must leave room for picks and connects.
fn gadget_preconditions<S: System + ?Sized>(g: &Graph, f: &S) -> Result<(), AbsorbError> {
    let n = g.n();
    let mu_n = f.boundedness(g);
    let delta = g.min_degree();
    if 4 * (delta.saturating_sub(mu_n)) <= n || delta < 2 * mu_n + 2 {
        return Err(AbsorbError::GadgetStuck {
            stage: Stage::Preconditions,
            component: None,
        });
    }
    Ok(())
}

/// Builds an absorbing path of length `3*ell` for a target path with oriented
/// end-edges `head` and `tail`, avoiding `avoid`. Retries with fresh
/// randomness before reporting the failing stage.
pub fn build_gadget_edges<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    avoid: &VertexSet,
    head: OrientedEdge,
    tail: OrientedEdge,
    ell: usize,
    seed: u64,
) -> Result<AbsorbingPath, AbsorbError> {
    gadget_preconditions(g, f)?;
    gadget_edges_unchecked(g, f, avoid, head, tail, ell, seed)
}

/// The same construction without the global slack check; the absorber calls
/// this on its density-certified pool, whose four external anchor vertices
/// would otherwise drag the minimum degree below the lemma-level threshold.
fn gadget_edges_unchecked<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    avoid: &VertexSet,
    head: OrientedEdge,
    tail: OrientedEdge,
    ell: usize,
    seed: u64,
) -> Result<AbsorbingPath, AbsorbError> {
    let (q1v, q2v) = head;
    let (qkv, qk1v) = tail;
    let e_head = g
        .edge_between(q1v, q2v)
        .ok_or(AbsorbError::AnchorMismatch)?;
    let e_tail = g
        .edge_between(qkv, qk1v)
        .ok_or(AbsorbError::AnchorMismatch)?;
    let mut last = AbsorbError::GadgetStuck {
        stage: Stage::PickY,
        component: None,
    };
    for attempt in 0..20u64 {
        let mut taken = avoid.clone();
        for v in [q1v, q2v, qkv, qk1v] {
            if !taken.contains(v) {
                taken.insert(v);
            }
        }
        let mut ctx = GadgetCtx {
            g,
            f,
            taken,
            rng: rng::seeded(rng::derive_seed(seed, &[0xed6e, attempt])),
            eta: default_eta(g.n()),
        };
        match build_frame(&mut ctx, [q1v, qkv], [e_head, e_tail], ell) {
            Err(e) => last = e,
            Ok(frame) => {
                let path = frame.path(g);
                let p1 = PathSeq::from_vertices(g, &[frame.yp[0], frame.y[0], q1v, q2v])
                    .expect("p1 is simple");
                let mut p2v = frame.p2_stem();
                p2v.push(qkv);
                p2v.push(qk1v);
                let p2 = PathSeq::from_vertices(g, &p2v).expect("p2 is simple");
                let gadget = AbsorbingPath {
                    kind: GadgetKind::EdgePair { head, tail },
                    path,
                    witnesses: Witnesses::EdgePair { p1, p2 },
                };
                validate_gadget(g, f, &gadget, Some(3 * ell))
                    .unwrap_or_else(|v| panic!("construction violates gadget invariant: {v}"));
                return Ok(gadget);
            }
        }
    }
    Err(last)
}

/// Builds an absorbing path of length `3*ell` for a single vertex `x`.
pub fn build_gadget_vertex<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    avoid: &VertexSet,
    x: usize,
    ell: usize,
    seed: u64,
) -> Result<AbsorbingPath, AbsorbError> {
    gadget_preconditions(g, f)?;
    gadget_vertex_unchecked(g, f, avoid, x, ell, seed)
}

fn gadget_vertex_unchecked<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    avoid: &VertexSet,
    x: usize,
    ell: usize,
    seed: u64,
) -> Result<AbsorbingPath, AbsorbError> {
    let mut last = AbsorbError::GadgetStuck {
        stage: Stage::PickY,
        component: None,
    };
    for attempt in 0..20u64 {
        let mut taken = avoid.clone();
        if !taken.contains(x) {
            taken.insert(x);
        }
        let mut ctx = GadgetCtx {
            g,
            f,
            taken,
            rng: rng::seeded(rng::derive_seed(seed, &[0xe7, attempt])),
            eta: default_eta(g.n()),
        };
        // y1, y2 adjacent to x with y1 x y2 compatible; then the usual frame
        // with x in both attachment roles
        let y1 = match ctx.pick_neighbor(x, |_, _, _| true) {
            Some((v, _)) => v,
            None => {
                last = AbsorbError::GadgetStuck {
                    stage: Stage::PickY,
                    component: None,
                };
                continue;
            }
        };
        ctx.take(y1);
        let e_y1x = edge(g, x, y1);
        // fake the attach edges: both picks must be compatible with the pair
        // through x
        let y2 = match ctx.pick_neighbor(x, |c, _, e| !c.f.forbids(c.g, x, e_y1x, e)) {
            Some((v, _)) => v,
            None => {
                last = AbsorbError::GadgetStuck {
                    stage: Stage::PickY,
                    component: None,
                };
                continue;
            }
        };
        ctx.take(y2);
        let e_y2x = edge(g, x, y2);
        match build_frame_with_y(&mut ctx, [y1, y2], [x, x], [e_y1x, e_y2x], ell) {
            Err(e) => last = e,
            Ok(frame) => {
                let path = frame.path(g);
                let q = frame.vertex_witness(g, x);
                let gadget = AbsorbingPath {
                    kind: GadgetKind::Vertex { x },
                    path,
                    witnesses: Witnesses::Vertex { q },
                };
                validate_gadget(g, f, &gadget, Some(3 * ell))
                    .unwrap_or_else(|v| panic!("construction violates gadget invariant: {v}"));
                return Ok(gadget);
            }
        }
    }
    Err(last)
}

/// Frame construction with the `y` pair already chosen (vertex variant).
fn build_frame_with_y<S: System + ?Sized>(
    ctx: &mut GadgetCtx<S>,
    y: [usize; 2],
    attach: [usize; 2],
    attach_edge: [usize; 2],
    ell: usize,
) -> Result<Frame, AbsorbError> {
    // replicate build_frame after the y picks
    let g = ctx.g;
    let (z1, _) = ctx
        .pick_neighbor(y[0], |_, _, _| true)
        .ok_or(AbsorbError::GadgetStuck {
            stage: Stage::Frame,
            component: None,
        })?;
    ctx.take(z1);
    let (w1, _) = ctx
        .pick_neighbor(z1, |_, _, _| true)
        .ok_or(AbsorbError::GadgetStuck {
            stage: Stage::Frame,
            component: None,
        })?;
    ctx.take(w1);
    let (w2, _) = ctx
        .pick_neighbor(w1, |_, _, _| true)
        .ok_or(AbsorbError::GadgetStuck {
            stage: Stage::Frame,
            component: None,
        })?;
    ctx.take(w2);
    let (z2, _) = ctx
        .pick_neighbor(w2, |c, w, _| c.g.has_edge(w, y[1]))
        .ok_or(AbsorbError::GadgetStuck {
            stage: Stage::Frame,
            component: None,
        })?;
    ctx.take(z2);
    let z = [z1, z2];
    let w = [w1, w2];
    let mut yp = [0usize; 2];
    let mut zp = [0usize; 2];
    let mut wp = [0usize; 2];
    for i in 0..2 {
        let e_yz = edge(g, y[i], z[i]);
        let e_yx = attach_edge[i];
        let _ = attach;
        let (v, _) = ctx
            .pick_neighbor(y[i], |c, _, e| {
                !c.f.forbids(c.g, y[i], e, e_yz) && !c.f.forbids(c.g, y[i], e, e_yx)
            })
            .ok_or(AbsorbError::GadgetStuck {
                stage: Stage::Guards,
                component: None,
            })?;
        yp[i] = v;
        ctx.take(v);
        let e_zw = edge(g, z[i], w[i]);
        let (v, _) = ctx
            .pick_neighbor(z[i], |c, _, e| {
                !c.f.forbids(c.g, z[i], e, e_yz) && !c.f.forbids(c.g, z[i], e, e_zw)
            })
            .ok_or(AbsorbError::GadgetStuck {
                stage: Stage::Guards,
                component: None,
            })?;
        zp[i] = v;
        ctx.take(v);
        let e_ww = edge(g, w[0], w[1]);
        let (v, _) = ctx
            .pick_neighbor(w[i], |c, _, e| {
                !c.f.forbids(c.g, w[i], e, e_zw) && !c.f.forbids(c.g, w[i], e, e_ww)
            })
            .ok_or(AbsorbError::GadgetStuck {
                stage: Stage::Guards,
                component: None,
            })?;
        wp[i] = v;
        ctx.take(v);
    }
    let q1 = connect(g, ctx.f, &ctx.taken, (z[1], zp[1]), (z[0], zp[0]), ctx.eta)?.path;
    for v in q1.verts() {
        if !ctx.taken.contains(v) {
            ctx.take(v);
        }
    }
    let q2 = connect(g, ctx.f, &ctx.taken, (w[1], wp[1]), (y[1], yp[1]), ctx.eta)?.path;
    for v in q2.verts() {
        if !ctx.taken.contains(v) {
            ctx.take(v);
        }
    }
    let q3_len =
        (3 * ell)
            .checked_sub(4 + q1.len() + q2.len())
            .ok_or(AbsorbError::GadgetStuck {
                stage: Stage::LengthBudget,
                component: None,
            })?;
    if q3_len < 3 {
        return Err(AbsorbError::GadgetStuck {
            stage: Stage::LengthBudget,
            component: None,
        });
    }
    let mut q3_verts = vec![w[0], wp[0]];
    let mut prev_edge = edge(g, w[0], wp[0]);
    for _ in 1..q3_len {
        let cur = *q3_verts.last().unwrap();
        let (next, e) = ctx
            .pick_neighbor(cur, |c, _, e| !c.f.forbids(c.g, cur, prev_edge, e))
            .ok_or(AbsorbError::GadgetStuck {
                stage: Stage::ExtendQ3,
                component: None,
            })?;
        ctx.take(next);
        q3_verts.push(next);
        prev_edge = e;
    }
    let q3 = PathSeq::from_vertices(g, &q3_verts).expect("greedy extension is simple");
    Ok(Frame { y, yp, q1, q2, q3 })
}

fn default_eta(n: usize) -> f64 {
    // small hosts need coarser thresholds than the asymptotic default
    if n <= 120 {
        0.1
    } else {
        0.05
    }
}

/// Fact-level absorption: rewires the gadget around its target, producing a
/// compatible path on `V(P) ∪ V(target)` with the gadget's end-edges.
pub fn absorb_into<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    gadget: &AbsorbingPath,
    target: &PathSeq,
) -> Result<PathSeq, AbsorbError> {
    for v in target.verts() {
        if gadget.path.contains_vertex(v) {
            return Err(AbsorbError::VertexOverlap { v });
        }
    }
    let result = match (&gadget.kind, &gadget.witnesses) {
        (GadgetKind::Vertex { x }, Witnesses::Vertex { q }) => {
            if target.len() != 0 || target.first() != *x {
                return Err(AbsorbError::AnchorMismatch);
            }
            q.clone()
        }
        (GadgetKind::EdgePair { head, tail }, Witnesses::EdgePair { p1, p2 }) => {
            let (th, tt) = target.end_edges().ok_or(AbsorbError::AnchorMismatch)?;
            let oriented = if (th, tt) == (*head, *tail) {
                target.clone()
            } else if (tt, th) == (*head, *tail) {
                target.reversed()
            } else {
                return Err(AbsorbError::AnchorMismatch);
            };
            // P* = P1 (target) P2^-1, overlapping on the shared target edges
            p1.splice_shared_edge(&oriented)
                .splice_shared_edge(&p2.reversed())
        }
        _ => return Err(AbsorbError::AnchorMismatch),
    };
    // hard contract: compatible, same end-edges, exact cover
    let verts: Vec<usize> = result.verts().collect();
    let rebuilt = PathSeq::from_vertices(g, &verts).expect("absorption yields a simple path");
    assert!(
        is_compatible(g, f, &rebuilt),
        "absorbed path must be compatible"
    );
    assert_eq!(
        rebuilt.end_edges(),
        gadget.path.end_edges(),
        "absorption must preserve end-edges"
    );
    debug_assert_eq!(
        rebuilt.order(),
        gadget.path.order() + target.order(),
        "absorption must cover exactly the union"
    );
    Ok(rebuilt)
}

/// The reserved structure: pool `A`, its certifying compatible cycle, and the
/// gadget capacity the pool supports.
#[derive(Clone, Debug)]
pub struct Absorber {
    pub pool: VertexSet,
    pub cycle: CycleSeq,
    pub capacity: usize,
    pub ell: usize,
    pub seed: u64,
}

/// Reserves a random pool of about `alpha * n` vertices whose density mirrors
/// the host's, and certifies it with a spanning compatible cycle. Capacity is
/// the number of length-`3*ell` gadgets the pool can hold.
pub fn build_absorber<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    alpha: f64,
    beta: f64,
    ell: usize,
    seed: u64,
) -> Result<Absorber, AbsorbError> {
    let n = g.n();
    let pool_size = math::floor_usize(alpha * n as f64).min(n);
    let gadget_size = 3 * ell + 1;
    let capacity = pool_size.saturating_sub(4) / gadget_size;
    let needed = math::ceil_usize(beta * n as f64).max(1);
    if capacity == 0 {
        return Err(AbsorbError::StockExhausted { built: 0, needed });
    }
    let delta_frac = g.min_degree() as f64 / n as f64;
    // mean pool degree minus three standard deviations of the hypergeometric
    let mean = delta_frac * pool_size as f64;
    let sd = math::sqrt(pool_size as f64 * delta_frac * (1.0 - delta_frac));
    let density_floor = math::floor_usize(mean - 3.0 * sd - 1.0).max(2);
    let mut last = AbsorbError::GadgetStuck {
        stage: Stage::PoolDensity,
        component: None,
    };
    for attempt in 0..20u64 {
        let mut rng = rng::seeded(rng::derive_seed(seed, &[0xab50, attempt]));
        let pool = VertexSet::from_iter(n, rng::sample_distinct(&mut rng, n, pool_size));
        // every vertex (inside or outside) must see enough of the pool:
        // outside vertices anchor future gadgets, inside ones thread cycles
        if (0..n).any(|v| g.degree_in(v, &pool) < density_floor.min(pool_size - 1)) {
            last = AbsorbError::GadgetStuck {
                stage: Stage::PoolDensity,
                component: None,
            };
            continue;
        }
        match spanning_cycle_through(g, f, &[], &pool, &mut rng) {
            Some(cycle) => {
                assert!(is_compatible(g, f, &cycle));
                assert!(cycle.len() <= math::ceil_usize(alpha * n as f64).max(3));
                return Ok(Absorber {
                    pool,
                    cycle,
                    capacity,
                    ell,
                    seed,
                });
            }
            None => {
                last = AbsorbError::GadgetStuck {
                    stage: Stage::PoolCycle,
                    component: None,
                };
            }
        }
    }
    Err(last)
}

/// Report of one absorption run.
#[derive(Clone, Debug)]
pub struct AbsorbRun {
    pub cycle: CycleSeq,
    pub gadgets_built: usize,
    pub glued_from: usize,
    pub components_absorbed: usize,
}

/// Turns a compatible linear forest in `G - A` into a compatible cycle on
/// exactly `A ∪ V(H)`: merge components by direct compatible end-joins while
/// they exceed capacity, absorb each survivor into a pool-built gadget
/// targeted at its actual end-edges, and close one cycle through the absorbed
/// paths and every remaining pool vertex.
pub fn absorb_forest<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    absorber: &Absorber,
    forest: &LinearForest,
) -> Result<AbsorbRun, AbsorbError> {
    for v in forest.vertices() {
        if absorber.pool.contains(v) {
            return Err(AbsorbError::ForestTouchesPool { v });
        }
    }
    if !is_compatible(g, f, forest) {
        return Err(AbsorbError::ForestIncompatible);
    }
    if forest.component_count() == 0 {
        return Ok(AbsorbRun {
            cycle: absorber.cycle.clone(),
            gadgets_built: 0,
            glued_from: 0,
            components_absorbed: 0,
        });
    }
    let mut rng = rng::seeded(rng::derive_seed(absorber.seed, &[0xf0e5]));
    let glued_from = forest.component_count();
    let components = glue_components(g, f, forest.paths().to_vec(), absorber.capacity, &mut rng);
    if components.len() > absorber.capacity {
        return Err(AbsorbError::CapacityExceeded {
            components: components.len(),
            capacity: absorber.capacity,
        });
    }

    // build one targeted gadget per component inside the pool
    let mut used = VertexSet::new(g.n());
    let mut absorbed: Vec<PathSeq> = Vec::new();
    let mut built = 0usize;
    for (ci, comp) in components.iter().enumerate() {
        let gadget = build_gadget_in_pool(
            g,
            f,
            &absorber.pool,
            &used,
            comp,
            absorber.ell,
            rng::derive_seed(absorber.seed, &[0x9ad, ci as u64]),
        )
        .map_err(|e| match e {
            AbsorbError::GadgetStuck { stage, .. } => AbsorbError::GadgetStuck {
                stage,
                component: Some(ci),
            },
            other => other,
        })?;
        built += 1;
        for v in gadget.path.verts() {
            used.insert(v);
        }
        absorbed.push(absorb_into(g, f, &gadget, comp)?);
    }

    // close the cycle through all absorbed paths and the leftover pool
    let mut leftover = absorber.pool.clone();
    leftover.difference_with(&used);
    let cycle = spanning_cycle_through(g, f, &absorbed, &leftover, &mut rng).ok_or(
        AbsorbError::GadgetStuck {
            stage: Stage::Closure,
            component: None,
        },
    )?;
    assert!(is_compatible(g, f, &cycle), "closure must stay compatible");
    let mut expected = absorber.pool.clone();
    for v in forest.vertices() {
        expected.insert(v);
    }
    assert_eq!(
        cycle.vertex_set(g.n()),
        expected,
        "absorbed cycle must cover exactly A and V(H)"
    );
    Ok(AbsorbRun {
        cycle,
        gadgets_built: built,
        glued_from,
        components_absorbed: components.len(),
    })
}

/// Builds a gadget for one component with all its machinery confined to the
/// available pool vertices. Runs on the induced instance
/// `G[avail ∪ anchors]` so the connecting thresholds match the small scale.
fn build_gadget_in_pool<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    pool: &VertexSet,
    used: &VertexSet,
    comp: &PathSeq,
    ell: usize,
    seed: u64,
) -> Result<AbsorbingPath, AbsorbError> {
    let mut members = pool.clone();
    members.difference_with(used);
    let anchors: Vec<usize> = if comp.len() == 0 {
        vec![comp.first()]
    } else {
        let (h, t) = comp.end_edges().unwrap();
        let mut a = vec![h.0, h.1, t.0, t.1];
        a.sort_unstable();
        a.dedup();
        a
    };
    for &a in &anchors {
        members.insert(a);
    }
    let ind = induced_system(g, f, &members);
    let sub = &ind.induced;
    let map = |v: usize| ind.induced.new_of_old[v] as usize;
    let unmap = |v: usize| sub.old_of_new[v] as usize;
    let gadget = if comp.len() == 0 {
        gadget_vertex_unchecked(
            &sub.graph,
            &ind.system,
            &VertexSet::new(sub.graph.n()),
            map(comp.first()),
            ell,
            seed,
        )?
    } else {
        let (h, t) = comp.end_edges().unwrap();
        gadget_edges_unchecked(
            &sub.graph,
            &ind.system,
            &VertexSet::new(sub.graph.n()),
            (map(h.0), map(h.1)),
            (map(t.0), map(t.1)),
            ell,
            seed,
        )?
    };
    // map the gadget back into host coordinates and re-validate there
    let back = |p: &PathSeq| {
        let verts: Vec<usize> = p.verts().map(unmap).collect();
        PathSeq::from_vertices(g, &verts).expect("induced paths exist in the host")
    };
    let host_gadget = AbsorbingPath {
        kind: match &gadget.kind {
            GadgetKind::Vertex { x } => GadgetKind::Vertex { x: unmap(*x) },
            GadgetKind::EdgePair { head, tail } => GadgetKind::EdgePair {
                head: (unmap(head.0), unmap(head.1)),
                tail: (unmap(tail.0), unmap(tail.1)),
            },
        },
        path: back(&gadget.path),
        witnesses: match &gadget.witnesses {
            Witnesses::Vertex { q } => Witnesses::Vertex { q: back(q) },
            Witnesses::EdgePair { p1, p2 } => Witnesses::EdgePair {
                p1: back(p1),
                p2: back(p2),
            },
        },
    };
    validate_gadget(g, f, &host_gadget, Some(3 * ell))
        .unwrap_or_else(|v| panic!("pool gadget fails host validation: {v}"));
    Ok(host_gadget)
}

/// Greedy end-to-end merging of components by direct compatible edges, while
/// the count exceeds `target`.
fn glue_components<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    mut comps: Vec<PathSeq>,
    target: usize,
    rng: &mut DetRng,
) -> Vec<PathSeq> {
    loop {
        if comps.len() <= target.max(1) {
            return comps;
        }
        let mut merged = None;
        'outer: for i in 0..comps.len() {
            for j in 0..comps.len() {
                if i == j {
                    continue;
                }
                let (a, b) = (&comps[i], &comps[j]);
                for (a_rev, b_rev) in [(false, false), (false, true), (true, false), (true, true)] {
                    if let Some(joined) = try_join(g, f, a, b, a_rev, b_rev) {
                        merged = Some((i, j, joined));
                        break 'outer;
                    }
                }
            }
        }
        match merged {
            None => return comps,
            Some((i, j, joined)) => {
                let (hi, lo) = (i.max(j), i.min(j));
                comps.swap_remove(hi);
                comps.swap_remove(lo);
                comps.push(joined);
                // randomize order so repeated merges do not always chain the
                // same component
                let k = comps.len();
                let swap_with = rng::below(rng, k);
                comps.swap(k - 1, swap_with);
            }
        }
    }
}

/// Joins `a` (optionally reversed) to `b` (optionally reversed) when the tail
/// of `a` and the head of `b` are adjacent and both junction pairs are
/// allowed.
fn try_join<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    a: &PathSeq,
    b: &PathSeq,
    a_rev: bool,
    b_rev: bool,
) -> Option<PathSeq> {
    let av: Vec<usize> = if a_rev {
        a.reversed().verts().collect()
    } else {
        a.verts().collect()
    };
    let bv: Vec<usize> = if b_rev {
        b.reversed().verts().collect()
    } else {
        b.verts().collect()
    };
    let tail = *av.last().unwrap();
    let head = bv[0];
    let e = g.edge_between(tail, head)?;
    if av.len() >= 2 {
        let ea = g.edge_between(av[av.len() - 2], tail).unwrap();
        if f.forbids(g, tail, ea, e) {
            return None;
        }
    }
    if bv.len() >= 2 {
        let eb = g.edge_between(head, bv[1]).unwrap();
        if f.forbids(g, head, e, eb) {
            return None;
        }
    }
    let mut verts = av;
    verts.extend(bv);
    PathSeq::from_vertices(g, &verts).ok()
}

/// Randomized backtracking search for one compatible cycle that traverses
/// every given segment intact (in either direction) and visits every vertex
/// of `must_cover` exactly once. Node-budgeted with restarts.
pub fn spanning_cycle_through<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    segments: &[PathSeq],
    must_cover: &VertexSet,
    rng: &mut DetRng,
) -> Option<CycleSeq> {
    let singles: Vec<usize> = must_cover.iter().collect();
    let total_vertices = segments.iter().map(|s| s.order()).sum::<usize>() + singles.len();
    if total_vertices < 3 {
        return None;
    }
    for _restart in 0..30 {
        let mut budget = 300_000usize;
        let mut search = CycleSearch {
            g,
            f,
            segments,
            singles: &singles,
            used_seg: vec![false; segments.len()],
            used_single: vec![false; singles.len()],
            order: Vec::new(),
            rng,
        };
        if let Some(verts) = search.run(&mut budget) {
            return Some(CycleSeq::from_vertices(g, &verts).expect("search builds a cycle"));
        }
    }
    None
}

struct CycleSearch<'a, S: ?Sized> {
    g: &'a Graph,
    f: &'a S,
    segments: &'a [PathSeq],
    singles: &'a [usize],
    used_seg: Vec<bool>,
    used_single: Vec<bool>,
    /// Placed items: (vertices in traversal order).
    order: Vec<Vec<usize>>,
    rng: &'a mut DetRng,
}

#[derive(Clone, Copy)]
enum Item {
    Seg(usize, bool),
    Single(usize),
}

impl<S: System + ?Sized> CycleSearch<'_, S> {
    fn run(&mut self, budget: &mut usize) -> Option<Vec<usize>> {
        // fix the first item to break rotation/reflection symmetry
        let first: Vec<usize> = if !self.segments.is_empty() {
            self.used_seg[0] = true;
            self.segments[0].verts().collect()
        } else {
            self.used_single[0] = true;
            vec![self.singles[0]]
        };
        self.order.push(first);
        let ok = self.extend(budget);
        let result = if ok {
            Some(self.order.iter().flatten().copied().collect())
        } else {
            None
        };
        self.order.clear();
        self.used_seg.fill(false);
        self.used_single.fill(false);
        result
    }

    fn placed_all(&self) -> bool {
        self.used_seg.iter().all(|&u| u) && self.used_single.iter().all(|&u| u)
    }

    fn cur_end(&self) -> (usize, Option<usize>) {
        let last = self.order.last().unwrap();
        let end = *last.last().unwrap();
        let prev_edge = if last.len() >= 2 {
            Some(self.g.edge_between(last[last.len() - 2], end).unwrap())
        } else if self.order.len() >= 2 {
            let before = &self.order[self.order.len() - 2];
            Some(self.g.edge_between(*before.last().unwrap(), end).unwrap())
        } else {
            None
        };
        (end, prev_edge)
    }

    fn extend(&mut self, budget: &mut usize) -> bool {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let (end, prev_edge) = self.cur_end();
        if self.placed_all() {
            // close the cycle
            let start = self.order[0][0];
            if let Some(e) = self.g.edge_between(end, start) {
                let head_ok = match self.first_edge() {
                    Some(fe) => !self.f.forbids(self.g, start, e, fe),
                    None => true,
                };
                let tail_ok = match prev_edge {
                    Some(pe) => !self.f.forbids(self.g, end, pe, e),
                    None => true,
                };
                if head_ok && tail_ok {
                    return true;
                }
            }
            return false;
        }
        let mut items: Vec<Item> = Vec::new();
        for (i, &u) in self.used_seg.iter().enumerate() {
            if !u {
                items.push(Item::Seg(i, false));
                items.push(Item::Seg(i, true));
            }
        }
        for (i, &u) in self.used_single.iter().enumerate() {
            if !u {
                items.push(Item::Single(i));
            }
        }
        rng::shuffle(self.rng, &mut items);
        for item in items {
            let (head, join_check): (usize, Option<usize>) = match item {
                Item::Single(i) => (self.singles[i], None),
                Item::Seg(i, rev) => {
                    let s = &self.segments[i];
                    let head = if rev { s.last() } else { s.first() };
                    let second = if rev {
                        s.vert(s.order() - 2)
                    } else {
                        s.vert(1)
                    };
                    (head, Some(self.g.edge_between(head, second).unwrap()))
                }
            };
            let e = match self.g.edge_between(end, head) {
                None => continue,
                Some(e) => e,
            };
            if let Some(pe) = prev_edge {
                if self.f.forbids(self.g, end, pe, e) {
                    continue;
                }
            }
            if let Some(fe) = join_check {
                if self.f.forbids(self.g, head, e, fe) {
                    continue;
                }
            }
            // place
            let verts: Vec<usize> = match item {
                Item::Single(i) => {
                    self.used_single[i] = true;
                    vec![self.singles[i]]
                }
                Item::Seg(i, rev) => {
                    self.used_seg[i] = true;
                    if rev {
                        self.segments[i].reversed().verts().collect()
                    } else {
                        self.segments[i].verts().collect()
                    }
                }
            };
            self.order.push(verts);
            if self.extend(budget) {
                return true;
            }
            self.order.pop();
            match item {
                Item::Single(i) => self.used_single[i] = false,
                Item::Seg(i, _) => self.used_seg[i] = false,
            }
            if *budget == 0 {
                return false;
            }
        }
        false
    }

    fn first_edge(&self) -> Option<usize> {
        let first = &self.order[0];
        if first.len() >= 2 {
            Some(self.g.edge_between(first[0], first[1]).unwrap())
        } else if self.order.len() >= 2 {
            Some(self.g.edge_between(first[0], self.order[1][0]).unwrap())
        } else {
            None
        }
    }
}
