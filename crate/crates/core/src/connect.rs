//! Connecting: short compatible paths between two prescribed disjoint edges,
//! avoiding a forbidden vertex set, via a layered digraph expansion.
//!
//! Every undirected edge is replaced by both orientations. Starting from an
//! anchor edge `uv`, level 1 keeps the out-edges reachable compatibly through
//! `v`; each later level admits an edge `yz` once `y` has enough compatible
//! in-edges in the previous level, and a vertex joins `V_i` once its in-degree
//! passes `(mu + eta) n` — from there every out-edge is usable. A vertex in
//! both anchors' top sets pins the meeting point, and a backwards greedy over
//! levels extracts each half of the path.

use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::VertexSet;
use crate::graph::{Graph, PathSeq};
use crate::math;
use crate::system::{is_compatible, System};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConnectError {
    AnchorsNotDisjoint,
    NotAnEdge {
        u: usize,
        v: usize,
    },
    /// The two top-level sets share no admissible meeting vertex.
    NoMeetingVertex {
        eta_milli: usize,
    },
    /// The backwards greedy found no admissible predecessor.
    Stuck {
        at: usize,
        level: usize,
    },
}

impl core::fmt::Display for ConnectError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ConnectError::AnchorsNotDisjoint => write!(f, "anchor edges share a vertex"),
            ConnectError::NotAnEdge { u, v } => write!(f, "{u}-{v} is not an edge"),
            ConnectError::NoMeetingVertex { eta_milli } => {
                write!(f, "expansions do not meet (eta = {}/1000)", eta_milli)
            }
            ConnectError::Stuck { at, level } => {
                write!(
                    f,
                    "no admissible predecessor at vertex {at} (level {level})"
                )
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ConnectError {}

/// Level sizes recorded per expansion step, for inspection and growth checks.
#[derive(Clone, Debug, Default)]
pub struct LevelSizes {
    pub u_size: usize,
    pub v_size: usize,
    pub edge_count: usize,
}

/// The layered expansion from one directed anchor edge.
pub struct Expansion {
    /// Level at which each directed edge (2*edge + direction) entered, 0 = never.
    edge_level: Vec<u16>,
    /// Level at which each vertex entered U (u16::MAX = never).
    u_level: Vec<u16>,
    /// Level at which each vertex entered V (u16::MAX = never).
    v_level: Vec<u16>,
    pub t: usize,
    pub eta: f64,
    pub sizes: Vec<LevelSizes>,
    /// Level after which nothing changed (levels beyond are identical).
    pub fixpoint: Option<usize>,
}

impl Expansion {
    pub fn in_u(&self, v: usize, level: usize) -> bool {
        (self.u_level[v] as usize) <= level
    }

    pub fn in_v(&self, v: usize, level: usize) -> bool {
        (self.v_level[v] as usize) <= level
    }

    pub fn top_v(&self) -> impl Iterator<Item = usize> + '_ {
        self.v_level
            .iter()
            .enumerate()
            .filter(|&(_, &l)| (l as usize) <= self.t)
            .map(|(v, _)| v)
    }

    fn edge_level_dir(&self, g: &Graph, e: usize, tail: usize) -> usize {
        self.edge_level[directed_id(g, e, tail)] as usize
    }
}

fn directed_id(g: &Graph, e: usize, tail: usize) -> usize {
    let (a, _) = g.endpoints(e);
    2 * e + usize::from(tail != a)
}

/// Builds the layered expansion for the directed anchor edge `uv` with level
/// cap `t = ceil(3/eta)`, stopping early at a fixed point. Thresholds are
/// `ceil(eta n)` for U, `mu n + ceil(eta n)` for V and `ceil(eta^2 n)` for
/// edge support, with `mu n` the boundedness of the system.
pub fn expand<S: System + ?Sized>(g: &Graph, f: &S, uv: (usize, usize), eta: f64) -> Expansion {
    let mu_n = f.boundedness(g);
    expand_with(g, f, uv, eta, mu_n)
}

pub fn expand_with<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    (u, v): (usize, usize),
    eta: f64,
    mu_n: usize,
) -> Expansion {
    let n = g.n();
    let anchor = g.edge_between(u, v).expect("anchor must be an edge");
    let t = math::ceil_usize(3.0 / eta).max(1);
    let thr_u = math::ceil_usize(eta * n as f64).max(1);
    let thr_v = (mu_n + math::ceil_usize(eta * n as f64)).max(1);
    let thr_e = math::ceil_usize(eta * eta * n as f64).max(1);

    let mut exp = Expansion {
        edge_level: vec![0; 2 * g.edge_count()],
        u_level: vec![u16::MAX; n],
        v_level: vec![u16::MAX; n],
        t,
        eta,
        sizes: Vec::new(),
        fixpoint: None,
    };
    let mut indeg = vec![0u32; n];
    let mut edge_total = 0usize;

    // U_1: compatible out-neighbours of v; D_1: their compatible out-edges
    for (w, e_vw) in g.neighbors(v) {
        if w == u || f.forbids(g, v, anchor, e_vw) {
            continue;
        }
        exp.u_level[w] = 1;
        for (z, e_wz) in g.neighbors(w) {
            if f.forbids(g, w, e_vw, e_wz) {
                continue;
            }
            let de = directed_id(g, e_wz, w);
            if exp.edge_level[de] == 0 {
                exp.edge_level[de] = 1;
                indeg[z] += 1;
                edge_total += 1;
            }
        }
    }
    exp.sizes.push(LevelSizes {
        u_size: (0..n).filter(|&w| exp.u_level[w] == 1).count(),
        v_size: 0,
        edge_count: edge_total,
    });

    for level in 2..=t {
        let lv = level as u16;
        let mut changed = false;
        for w in 0..n {
            if (indeg[w] as usize) >= thr_u && exp.u_level[w] > lv {
                exp.u_level[w] = lv;
                changed = true;
            }
            if (indeg[w] as usize) >= thr_v && exp.v_level[w] > lv {
                exp.v_level[w] = lv;
                changed = true;
            }
        }
        // admit new edges yz: y in U_level with enough compatible in-support
        let mut added: Vec<(usize, usize)> = Vec::new();
        for y in 0..n {
            if (exp.u_level[y] as usize) > level {
                continue;
            }
            let in_y = indeg[y] as usize;
            if in_y == 0 {
                continue;
            }
            for (z, e_yz) in g.neighbors(y) {
                let de = directed_id(g, e_yz, y);
                if exp.edge_level[de] != 0 {
                    continue;
                }
                // compatible in-support = indeg(y) minus forbidden partners
                // of yz currently among the in-edges at y
                let support = if in_y >= thr_e + f.partner_count(g, y, e_yz) {
                    in_y // enough even if every forbidden partner is an in-edge
                } else {
                    let mut forbidden_in = 0usize;
                    f.for_each_partner(g, y, e_yz, &mut |p| {
                        let x = g.other_endpoint(p, y);
                        if exp.edge_level[directed_id(g, p, x)] != 0 {
                            forbidden_in += 1;
                        }
                    });
                    in_y - forbidden_in
                };
                if support >= thr_e {
                    added.push((z, de));
                }
            }
        }
        if !added.is_empty() {
            changed = true;
            for (z, de) in added {
                exp.edge_level[de] = lv;
                indeg[z] += 1;
                edge_total += 1;
            }
        }
        exp.sizes.push(LevelSizes {
            u_size: (0..n)
                .filter(|&w| (exp.u_level[w] as usize) <= level)
                .count(),
            v_size: (0..n)
                .filter(|&w| (exp.v_level[w] as usize) <= level)
                .count(),
            edge_count: edge_total,
        });
        if !changed {
            exp.fixpoint = Some(level);
            break;
        }
    }
    exp
}

/// Backwards greedy of the extraction claim: from `v0 -> w` (with `v0` in the
/// top V set), repeatedly prepend a strictly-lower-level compatible
/// predecessor outside `avoid` until a level-1 edge is reached, then prepend
/// the anchor. Returns the full path `u v ... v0 w`. Ties break to the
/// smallest vertex id.
pub fn extract_path<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    exp: &Expansion,
    (u, v): (usize, usize),
    (v0, w): (usize, usize),
    avoid: &VertexSet,
) -> Result<PathSeq, ConnectError> {
    let mut rev: Vec<usize> = vec![w, v0]; // built back-to-front
    let mut on_path = VertexSet::new(g.n());
    on_path.insert(w);
    on_path.insert(v0);
    let e0 = g
        .edge_between(v0, w)
        .ok_or(ConnectError::NotAnEdge { u: v0, v: w })?;
    let mut head_edge = e0;
    let mut head = v0;
    let mut level = exp.edge_level_dir(g, e0, v0);
    if level == 0 {
        // every out-edge of a top-V vertex is usable at the top level
        level = exp.t;
    }
    while level > 1 {
        // pick p -> head in a strictly lower level, compatible with head_edge
        let mut best: Option<(usize, usize, usize)> = None;
        for (p, e_ph) in g.neighbors(head) {
            if p == u || p == v || on_path.contains(p) || avoid.contains(p) {
                continue;
            }
            let lv = exp.edge_level_dir(g, e_ph, p);
            if lv == 0 || lv >= level {
                continue;
            }
            if f.forbids(g, head, e_ph, head_edge) {
                continue;
            }
            if best.map(|(bp, _, _)| p < bp).unwrap_or(true) {
                best = Some((p, e_ph, lv));
            }
        }
        match best {
            None => return Err(ConnectError::Stuck { at: head, level }),
            Some((p, e_ph, lv)) => {
                rev.push(p);
                on_path.insert(p);
                head = p;
                head_edge = e_ph;
                level = lv;
            }
        }
    }
    // level-1 head edge: its tail lies in U_1, so the anchor attaches
    debug_assert!(exp.in_u(head, 1));
    let e_vh = g
        .edge_between(v, head)
        .ok_or(ConnectError::NotAnEdge { u: v, v: head })?;
    let anchor = g.edge_between(u, v).unwrap();
    if f.forbids(g, head, e_vh, head_edge) || f.forbids(g, v, anchor, e_vh) {
        return Err(ConnectError::Stuck { at: head, level: 1 });
    }
    if on_path.contains(v) || on_path.contains(u) {
        return Err(ConnectError::Stuck { at: head, level: 1 });
    }
    rev.push(v);
    rev.push(u);
    rev.reverse();
    let path = PathSeq::from_vertices(g, &rev).expect("greedy builds a simple path");
    debug_assert!(is_compatible(g, f, &path));
    Ok(path)
}

/// A connecting run: the path plus the statistics the demos print.
pub struct ConnectRun {
    pub path: PathSeq,
    pub eta_used: f64,
    pub sizes_a: Vec<LevelSizes>,
    pub sizes_b: Vec<LevelSizes>,
    pub meeting: usize,
}

/// Finds a compatible path `x1 x1' ... x2' x2` of length at most `2t + 2`
/// whose interior avoids `s`. Halves `eta` once before giving up.
pub fn connect<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    s: &VertexSet,
    a1: (usize, usize),
    a2: (usize, usize),
    eta: f64,
) -> Result<ConnectRun, ConnectError> {
    let mu_n = f.boundedness(g);
    let mut last = ConnectError::NoMeetingVertex {
        eta_milli: (eta * 1000.0) as usize,
    };
    let mut try_eta = eta;
    for _ in 0..2 {
        match connect_at_eta(g, f, s, a1, a2, try_eta, mu_n) {
            Ok(run) => return Ok(run),
            Err(e) => last = e,
        }
        try_eta /= 2.0;
    }
    Err(last)
}

fn connect_at_eta<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    s: &VertexSet,
    a1: (usize, usize),
    a2: (usize, usize),
    eta: f64,
    mu_n: usize,
) -> Result<ConnectRun, ConnectError> {
    let (x1, x1p) = a1;
    let (x2, x2p) = a2;
    if x1 == x2 || x1 == x2p || x1p == x2 || x1p == x2p {
        return Err(ConnectError::AnchorsNotDisjoint);
    }
    for (a, b) in [a1, a2] {
        if g.edge_between(a, b).is_none() {
            return Err(ConnectError::NotAnEdge { u: a, v: b });
        }
    }
    let exp1 = expand_with(g, f, a1, eta, mu_n);
    let exp2 = expand_with(g, f, a2, eta, mu_n);
    let mut anchors = VertexSet::new(g.n());
    for a in [x1, x1p, x2, x2p] {
        anchors.insert(a);
    }
    // smallest admissible meeting vertex
    let v0 = exp1
        .top_v()
        .find(|&w| exp2.in_v(w, exp2.t) && !s.contains(w) && !anchors.contains(w))
        .ok_or(ConnectError::NoMeetingVertex {
            eta_milli: (eta * 1000.0) as usize,
        })?;
    // first half: x1 x1' ... v1 v0 (drop the arbitrary closing edge v0-w)
    let mut avoid1 = s.clone();
    avoid1.insert(x2);
    avoid1.insert(x2p);
    let w = g
        .neighbors(v0)
        .map(|(nb, _)| nb)
        .find(|&nb| !avoid1.contains(nb) && nb != x1 && nb != x1p)
        .ok_or(ConnectError::Stuck { at: v0, level: 0 })?;
    let full1 = extract_path(g, f, &exp1, a1, (v0, w), &avoid1)?;
    let p1_verts: Vec<usize> = full1.verts().take(full1.order() - 1).collect();
    let p1 = PathSeq::from_vertices(g, &p1_verts).expect("prefix of a path");
    let v1 = p1.vert(p1.order() - 2);

    // second half: x2 x2' ... v0 v1, avoiding the first half
    let mut avoid2 = s.clone();
    for x in p1.verts() {
        avoid2.insert(x);
    }
    avoid2.remove(v0);
    avoid2.remove(v1);
    let full2 = extract_path(g, f, &exp2, a2, (v0, v1), &avoid2)?;

    // splice: p1 ends (v1, v0); the reverse of full2 starts (v1, v0)
    let spliced = p1.splice_shared_edge(&full2.reversed());
    assert!(
        is_compatible(g, f, &spliced),
        "spliced path must be compatible"
    );
    debug_assert_eq!(spliced.first(), x1);
    debug_assert_eq!(spliced.last(), x2);
    debug_assert!(spliced.len() <= 2 * exp1.t + 2);
    Ok(ConnectRun {
        path: spliced,
        eta_used: eta,
        sizes_a: exp1.sizes,
        sizes_b: exp2.sizes,
        meeting: v0,
    })
}

/// Exhaustive shortest compatible path between the anchors avoiding `s`
/// (iterative deepening; exact up to `maxlen`). The reference the connect
/// machinery is audited against on small instances.
pub fn connect_oracle<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    s: &VertexSet,
    a1: (usize, usize),
    a2: (usize, usize),
    maxlen: usize,
) -> Option<PathSeq> {
    let (x1, x1p) = a1;
    let (x2, x2p) = a2;
    let e1 = g.edge_between(x1, x1p)?;
    let e2 = g.edge_between(x2, x2p)?;
    if x1 == x2 || x1 == x2p || x1p == x2 || x1p == x2p {
        return None;
    }
    for len in 3..=maxlen {
        let mut verts = vec![x1, x1p];
        let mut on = VertexSet::new(g.n());
        on.insert(x1);
        on.insert(x1p);
        if dfs_path(g, f, s, &mut verts, &mut on, e1, (x2p, x2), e2, len) {
            return Some(PathSeq::from_vertices(g, &verts).expect("dfs builds a path"));
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn dfs_path<S: System + ?Sized>(
    g: &Graph,
    f: &S,
    s: &VertexSet,
    verts: &mut Vec<usize>,
    on: &mut VertexSet,
    last_edge: usize,
    (x2p, x2): (usize, usize),
    e2: usize,
    len: usize,
) -> bool {
    let cur = *verts.last().unwrap();
    let remaining = len - (verts.len() - 1);
    if remaining == 2 {
        // close via x2' then x2
        if let Some(e) = g.edge_between(cur, x2p) {
            if !f.forbids(g, cur, last_edge, e) && !f.forbids(g, x2p, e, e2) {
                verts.push(x2p);
                verts.push(x2);
                return true;
            }
        }
        return false;
    }
    for (w, e) in g.neighbors(cur) {
        if on.contains(w) || s.contains(w) || w == x2 || w == x2p {
            continue;
        }
        if f.forbids(g, cur, last_edge, e) {
            continue;
        }
        verts.push(w);
        on.insert(w);
        if dfs_path(g, f, s, verts, on, e, (x2p, x2), e2, len) {
            return true;
        }
        on.remove(w);
        verts.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_random_circulant, gen_random_system};
    use crate::rng;
    use crate::system::{EmptySystem, IncompatibilitySystem};

    #[test]
    fn complete_graph_meets_everywhere() {
        let g = Graph::complete(12);
        let f = EmptySystem;
        let exp = expand(&g, &f, (0, 1), 0.1);
        // U_1 is everything except the anchor pair
        assert_eq!(exp.sizes[0].u_size, 10);
        // V fills up quickly since every in-degree is ~n
        assert!(exp.top_v().count() >= 10);
    }

    #[test]
    fn monotone_levels_on_random_instances() {
        for seed in 0..10u64 {
            let g = gen_random_circulant(40, 24, seed).unwrap();
            let f = gen_random_system(&g, 4, seed);
            let exp = expand(&g, &f, g.endpoints(0), 0.08);
            let mut prev = (0usize, 0usize, 0usize);
            for s in &exp.sizes {
                assert!(s.u_size >= prev.0, "U must grow");
                assert!(s.v_size >= prev.1, "V must grow");
                assert!(s.edge_count >= prev.2, "D must grow");
                prev = (s.u_size, s.v_size, s.edge_count);
            }
        }
    }

    #[test]
    fn connect_on_k8() {
        let g = Graph::complete(8);
        let run = connect(&g, &EmptySystem, &VertexSet::new(8), (0, 1), (2, 3), 0.1).unwrap();
        assert_eq!(run.path.first(), 0);
        assert_eq!(run.path.vert(1), 1);
        assert_eq!(run.path.last(), 2);
        assert_eq!(run.path.vert(run.path.order() - 2), 3);
        assert!(run.path.len() <= 2 * 30 + 2);
    }

    #[test]
    fn connect_respects_avoid_set() {
        let g = Graph::complete(20);
        let f = EmptySystem;
        let s = VertexSet::from_iter(20, [4, 5, 6, 7, 8]);
        let run = connect(&g, &f, &s, (0, 1), (2, 3), 0.1).unwrap();
        for v in run.path.verts() {
            assert!(!s.contains(v), "interior hit the avoid set");
        }
    }

    #[test]
    fn connect_random_instances_audited() {
        let mut ok = 0;
        for seed in 0..30u64 {
            let g = gen_random_circulant(60, 40, seed).unwrap();
            let f = gen_random_system(&g, 5, seed);
            let mut r = rng::seeded(seed ^ 77);
            let e1 = rng::below(&mut r, g.edge_count());
            let (x1, x1p) = g.endpoints(e1);
            let e2 = (0..g.edge_count())
                .find(|&e| {
                    let (a, b) = g.endpoints(e);
                    a != x1 && a != x1p && b != x1 && b != x1p && e != e1
                })
                .unwrap();
            let (x2, x2p) = g.endpoints(e2);
            let s = VertexSet::from_iter(
                60,
                rng::sample_distinct(&mut r, 60, 3)
                    .into_iter()
                    .filter(|&v| ![x1, x1p, x2, x2p].contains(&v)),
            );
            match connect(&g, &f, &s, (x1, x1p), (x2, x2p), 0.05) {
                Ok(run) => {
                    ok += 1;
                    assert!(is_compatible(&g, &f, &run.path));
                    assert_eq!(run.path.first(), x1);
                    assert_eq!(run.path.last(), x2);
                    for v in run.path.verts() {
                        assert!(!s.contains(v));
                    }
                }
                Err(e) => panic!("connect failed on seed {seed}: {e}"),
            }
        }
        assert_eq!(ok, 30);
    }

    #[test]
    fn oracle_finds_short_witness_on_complete() {
        let g = Graph::complete(8);
        let p = connect_oracle(&g, &EmptySystem, &VertexSet::new(8), (0, 1), (2, 3), 6).unwrap();
        assert_eq!(p.len(), 3); // 0 1 3 2
        assert_eq!(p.verts().collect::<Vec<_>>(), vec![0, 1, 3, 2]);
    }

    #[test]
    fn oracle_absent_on_blocked_square() {
        // 4-cycle: the only candidate witness 0-1-2-3 needs the pair {12, 23}
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let e12 = g.edge_between(1, 2).unwrap();
        let e23 = g.edge_between(2, 3).unwrap();
        let f = IncompatibilitySystem::from_pairs(&g, [(2, e12.min(e23), e12.max(e23))]).unwrap();
        assert!(connect_oracle(&g, &f, &VertexSet::new(4), (0, 1), (3, 2), 8).is_none());
        assert!(connect_oracle(&g, &EmptySystem, &VertexSet::new(4), (0, 1), (3, 2), 8).is_some());
    }

    #[test]
    fn oracle_agrees_when_connect_succeeds() {
        for seed in 0..20u64 {
            let g = gen_random_circulant(18, 12, seed).unwrap();
            let f = gen_random_system(&g, 2, seed);
            let s = VertexSet::new(18);
            let a1 = g.endpoints(0);
            let a2 = (0..g.edge_count())
                .map(|e| g.endpoints(e))
                .find(|&(a, b)| a != a1.0 && a != a1.1 && b != a1.0 && b != a1.1)
                .unwrap();
            if let Ok(run) = connect(&g, &f, &s, a1, a2, 0.1) {
                let witness = connect_oracle(&g, &f, &s, a1, a2, run.path.len().max(8));
                assert!(witness.is_some(), "oracle refutes connect on seed {seed}");
            }
        }
    }
}
