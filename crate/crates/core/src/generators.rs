//! Instance generators: the extremal constructions (two-coloured circulant
//! unions, source orientations of regular graphs, clique blowups) plus random
//! regular graphs and random bounded/regular incompatibility systems.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{EdgeColouring, Graph};
use crate::matching::perfect_matching_small;
use crate::rng::{self, DetRng};
use crate::system::{colouring_to_system, IncompatibilitySystem, System};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenError {
    InfeasibleParameters(String),
    NotRegular { v: usize, degree: usize },
    NoPerfectMatching,
    RetriesExhausted { attempts: usize },
}

impl core::fmt::Display for GenError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GenError::InfeasibleParameters(msg) => write!(f, "infeasible parameters: {msg}"),
            GenError::NotRegular { v, degree } => {
                write!(f, "graph is not regular (vertex {v} has degree {degree})")
            }
            GenError::NoPerfectMatching => {
                write!(f, "no perfect matching (odd-degree orientation)")
            }
            GenError::RetriesExhausted { attempts } => {
                write!(
                    f,
                    "pairing model retries exhausted after {attempts} attempts"
                )
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GenError {}

/// A generated problem instance: graph, forbidden-pair system, and the
/// colouring it came from when one exists.
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: Graph,
    pub system: IncompatibilitySystem,
    pub colouring: Option<EdgeColouring>,
}

/// Parameters of a generator family; the CLI's `gen` flags serialize this.
#[derive(Clone, Debug, PartialEq)]
pub enum GenSpec {
    BollobasErdos {
        k: usize,
    },
    /// Applied to a base graph supplied separately.
    SourceOrient {
        source: usize,
    },
    CliqueBlowup {
        n: usize,
        delta_num: usize,
        delta_den: usize,
    },
    Circulant {
        n: usize,
        connection: Vec<usize>,
    },
    RandomRegular {
        n: usize,
        d: usize,
    },
    /// Applied to a base graph supplied separately.
    RandomSystem {
        bound: usize,
    },
}

impl GenSpec {
    /// Runs the family. `base` is required by the families that decorate an
    /// existing graph (source orientation, random systems).
    pub fn generate(
        &self,
        seed: u64,
        base: Option<&Graph>,
    ) -> Result<(Graph, Option<EdgeColouring>, IncompatibilitySystem), GenError> {
        match self {
            GenSpec::BollobasErdos { k } => {
                let (g, c, f) = gen_bollobas_erdos(*k)?;
                Ok((g, Some(c), f))
            }
            GenSpec::SourceOrient { source } => {
                let g = base.ok_or_else(|| {
                    GenError::InfeasibleParameters("source-orient needs a base graph".into())
                })?;
                let so = gen_source_orient(g, *source, seed)?;
                Ok((g.clone(), Some(so.colouring), so.system))
            }
            GenSpec::CliqueBlowup {
                n,
                delta_num,
                delta_den,
            } => {
                let (g, c, f) = gen_clique_blowup(*n, *delta_num, *delta_den)?;
                Ok((g, Some(c), f))
            }
            GenSpec::Circulant { n, connection } => {
                let g = gen_circulant(*n, connection)?;
                let m = g.edge_count();
                Ok((g, None, IncompatibilitySystem::empty(m)))
            }
            GenSpec::RandomRegular { n, d } => {
                let g = gen_random_regular(*n, *d, seed)?;
                let m = g.edge_count();
                Ok((g, None, IncompatibilitySystem::empty(m)))
            }
            GenSpec::RandomSystem { bound } => {
                let g = base.ok_or_else(|| {
                    GenError::InfeasibleParameters("random-system needs a base graph".into())
                })?;
                let f = gen_random_system(g, *bound, seed);
                Ok((g.clone(), None, f))
            }
        }
    }
}

/// Circulant graph on `n` vertices: `i ~ i + s (mod n)` for `s` in the
/// connection set, which must lie in `1..=n/2` (with `n/2` allowed only for
/// even `n`).
pub fn gen_circulant(n: usize, connection: &[usize]) -> Result<Graph, GenError> {
    if n == 0 {
        return Err(GenError::InfeasibleParameters("n = 0".into()));
    }
    let mut seen = vec![false; n / 2 + 1];
    for &s in connection {
        if s == 0 || s > n / 2 {
            return Err(GenError::InfeasibleParameters(format!(
                "offset {s} outside 1..={}",
                n / 2
            )));
        }
        if 2 * s == n && n % 2 == 1 {
            return Err(GenError::InfeasibleParameters(format!(
                "offset {s} = n/2 needs even n"
            )));
        }
        if seen[s] {
            return Err(GenError::InfeasibleParameters(format!(
                "offset {s} repeated"
            )));
        }
        seen[s] = true;
    }
    let mut edges = Vec::new();
    for &s in connection {
        for i in 0..n {
            let j = (i + s) % n;
            if i < j || 2 * s == n && i < j + 0 {
                // for s = n/2, i and i+s pair up once
            }
            if i < j {
                edges.push((i, j));
            } else if 2 * s != n {
                // wrap-around edge (j, i) with j < i; emitted when i > j
                edges.push((j, i));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Graph::new(n, &edges)
        .map_err(|e| GenError::InfeasibleParameters(format!("circulant build failed: {e}")))
}

/// The union of two edge-disjoint spanning 2k-regular circulants on
/// `n = 8k - 1` vertices, red with offsets `1..=k` and blue with offsets
/// `k+1..=2k`, together with the 2-colouring and its induced system. The
/// system is (2k-1)-bounded and, since `n` is odd and there are two colours,
/// no compatible Hamilton cycle exists.
pub fn gen_bollobas_erdos(
    k: usize,
) -> Result<(Graph, EdgeColouring, IncompatibilitySystem), GenError> {
    if k == 0 {
        return Err(GenError::InfeasibleParameters("k must be >= 1".into()));
    }
    let n = 8 * k - 1;
    let red: Vec<usize> = (1..=k).collect();
    let blue: Vec<usize> = (k + 1..=2 * k).collect();
    let all: Vec<usize> = (1..=2 * k).collect();
    let g = gen_circulant(n, &all)?;
    let mut colours = vec![0u32; g.edge_count()];
    for e in 0..g.edge_count() {
        let (u, v) = g.endpoints(e);
        let diff = (v - u).min(n - (v - u));
        colours[e] = if red.contains(&diff) {
            0
        } else {
            debug_assert!(blue.contains(&diff));
            1
        };
    }
    let colouring = EdgeColouring::new(colours);
    let system = colouring_to_system(&g, &colouring);
    Ok((g, colouring, system))
}

/// Output of [`gen_source_orient`]: the system, the orientation that induced
/// it (as directed vertex pairs per edge id) and the "moreover" colouring.
#[derive(Clone, Debug)]
pub struct SourceOrient {
    pub system: IncompatibilitySystem,
    /// `orientation[e] = (tail, head)` of edge `e`.
    pub orientation: Vec<(usize, usize)>,
    /// Edge colouring with colour = head vertex; properly coloured cycles are
    /// exactly the directed cycles of the orientation.
    pub colouring: EdgeColouring,
    pub source: usize,
}

/// Orients a d-regular graph near-balanced (in/out degrees within
/// `{floor(d/2), ceil(d/2)}`), re-orients all edges at `x` outward, and
/// forbids every in-in / out-out pair at vertices other than `x`. Compatible
/// cycles are then directed cycles, none of which passes through the source,
/// so no compatible Hamilton cycle exists. The system is ceil(d/2)-bounded.
pub fn gen_source_orient(g: &Graph, x: usize, seed: u64) -> Result<SourceOrient, GenError> {
    let d = match g.is_regular() {
        Some(d) => d,
        None => {
            let v = (0..g.n()).max_by_key(|&v| g.degree(v)).unwrap_or(0);
            return Err(GenError::NotRegular {
                v,
                degree: g.degree(v),
            });
        }
    };
    if x >= g.n() {
        return Err(GenError::InfeasibleParameters(format!(
            "source {x} out of range"
        )));
    }
    // The bound ceil(d/2) is always achieved for even d; for odd d it depends
    // on the matching orientation, so retry a few seeds until it is exact.
    let mut last = None;
    for attempt in 0..50 {
        let so = source_orient_once(g, x, d, rng::derive_seed(seed, &[attempt]))?;
        let exact = so.system.boundedness(g) == d.div_ceil(2);
        if exact {
            return Ok(so);
        }
        last = Some(so);
    }
    Ok(last.expect("at least one attempt"))
}

fn source_orient_once(g: &Graph, x: usize, d: usize, seed: u64) -> Result<SourceOrient, GenError> {
    let mut rng = rng::seeded(seed);
    let n = g.n();
    // Direction per edge: oriented[e] = (tail, head).
    let mut orientation: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX); g.edge_count()];
    if d % 2 == 0 {
        orient_eulerian(
            g,
            &(0..g.edge_count()).collect::<Vec<_>>(),
            &mut orientation,
            &mut rng,
        );
    } else {
        if n % 2 == 1 {
            return Err(GenError::NoPerfectMatching);
        }
        let matching = perfect_matching_small(g, rng::derive_seed(seed, &[1]))
            .ok_or(GenError::NoPerfectMatching)?;
        let mut in_matching = vec![false; g.edge_count()];
        for &e in &matching {
            in_matching[e] = true;
        }
        let rest: Vec<usize> = (0..g.edge_count()).filter(|&e| !in_matching[e]).collect();
        orient_eulerian(g, &rest, &mut orientation, &mut rng);
        for &e in &matching {
            let (u, v) = g.endpoints(e);
            orientation[e] = if rng::below(&mut rng, 2) == 0 {
                (u, v)
            } else {
                (v, u)
            };
        }
    }
    // check balance before the re-orientation
    debug_assert!({
        let mut outdeg = vec![0usize; n];
        for &(t, _) in &orientation {
            outdeg[t] += 1;
        }
        (0..n).all(|v| outdeg[v] >= d / 2 && outdeg[v] <= d.div_ceil(2))
    });
    // re-orient all edges at x outward
    for (_, e) in g.neighbors(x) {
        let (t, h) = orientation[e];
        if h == x {
            orientation[e] = (x, t);
        }
    }
    // forbid in-in and out-out pairs at every vertex except x
    let mut pairs = Vec::new();
    for v in 0..n {
        if v == x {
            continue;
        }
        let mut ins = Vec::new();
        let mut outs = Vec::new();
        for (_, e) in g.neighbors(v) {
            if orientation[e].1 == v {
                ins.push(e);
            } else {
                outs.push(e);
            }
        }
        for group in [&ins, &outs] {
            for i in 0..group.len() {
                for j in (i + 1)..group.len() {
                    pairs.push((v, group[i].min(group[j]), group[i].max(group[j])));
                }
            }
        }
    }
    let system = IncompatibilitySystem::from_pairs_unchecked(g.edge_count(), g, pairs);
    let colours: Vec<u32> = orientation.iter().map(|&(_, h)| h as u32).collect();
    Ok(SourceOrient {
        system,
        orientation,
        colouring: EdgeColouring::new(colours),
        source: x,
    })
}

/// Orients the given edges along Euler circuits so that every vertex has
/// |out - in| <= 1 within them. Odd-degree vertices are paired through a
/// virtual vertex first.
fn orient_eulerian(
    g: &Graph,
    edge_ids: &[usize],
    orientation: &mut [(usize, usize)],
    rng: &mut DetRng,
) {
    let n = g.n();
    // adjacency of the multigraph: (other endpoint, slot id); slot ids >=
    // edge_ids.len() are virtual
    let mut deg = vec![0usize; n];
    for &e in edge_ids {
        let (u, v) = g.endpoints(e);
        deg[u] += 1;
        deg[v] += 1;
    }
    let odd: Vec<usize> = (0..n).filter(|&v| deg[v] % 2 == 1).collect();
    debug_assert_eq!(odd.len() % 2, 0);
    let virt = n;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n + 1];
    for (slot, &e) in edge_ids.iter().enumerate() {
        let (u, v) = g.endpoints(e);
        adj[u].push((v, slot));
        adj[v].push((u, slot));
    }
    for (i, &v) in odd.iter().enumerate() {
        let slot = edge_ids.len() + i;
        adj[v].push((virt, slot));
        adj[virt].push((v, slot));
    }
    for row in adj.iter_mut() {
        rng::shuffle(rng, row);
    }
    // Hierholzer over every component
    let mut used = vec![false; edge_ids.len() + odd.len()];
    let mut next = vec![0usize; n + 1];
    for start in 0..=n {
        loop {
            // find an unused slot at start
            while next[start] < adj[start].len() && used[adj[start][next[start]].1] {
                next[start] += 1;
            }
            if next[start] >= adj[start].len() {
                break;
            }
            // walk a closed circuit from start, orienting along the way
            let mut cur = start;
            loop {
                while next[cur] < adj[cur].len() && used[adj[cur][next[cur]].1] {
                    next[cur] += 1;
                }
                if next[cur] >= adj[cur].len() {
                    debug_assert_eq!(cur, start, "euler walk must close");
                    break;
                }
                let (to, slot) = adj[cur][next[cur]];
                used[slot] = true;
                if slot < edge_ids.len() {
                    orientation[edge_ids[slot]] = (cur, to);
                }
                cur = to;
            }
        }
    }
}

/// Blowup construction: an even set `A` with `2n/3 < |A| <= 2n/3 + 2`, a set
/// `B` joined to everything, `G[A]` a (delta*n - |B|)-regular circulant, and
/// all intersecting pairs inside `G[A]` forbidden. Any Hamilton cycle must
/// take two consecutive `A`-edges, so none is compatible. Returns the
/// "moreover" colouring (red on `G[A]`, rainbow elsewhere) alongside.
pub fn gen_clique_blowup(
    n: usize,
    delta_num: usize,
    delta_den: usize,
) -> Result<(Graph, EdgeColouring, IncompatibilitySystem), GenError> {
    if delta_den == 0 || 2 * delta_num < delta_den || delta_num >= delta_den {
        return Err(GenError::InfeasibleParameters(
            "need 1/2 <= delta < 1".into(),
        ));
    }
    if (n * delta_num) % delta_den != 0 {
        return Err(GenError::InfeasibleParameters(format!(
            "delta*n = {n}*{delta_num}/{delta_den} is not an integer"
        )));
    }
    let delta_n = n * delta_num / delta_den;
    // unique even a with 2n/3 < a <= 2n/3 + 2
    let mut a = 2 * n / 3 + 1;
    if a % 2 == 1 {
        a += 1;
    }
    debug_assert!(3 * a > 2 * n && a <= 2 * n / 3 + 2 && a % 2 == 0);
    let b = n - a;
    if delta_n <= b || delta_n - b >= a {
        return Err(GenError::InfeasibleParameters(format!(
            "G[A] degree delta*n - |B| = {} not in (0, {a})",
            delta_n as isize - b as isize
        )));
    }
    let inner_degree = delta_n - b;
    // circulant inside A
    let mut conn: Vec<usize> = Vec::new();
    let mut need = inner_degree;
    let mut s = 1;
    while need >= 2 {
        conn.push(s);
        s += 1;
        need -= 2;
    }
    if need == 1 {
        conn.push(a / 2);
    }
    let inner = gen_circulant(a, &conn)?;
    debug_assert_eq!(inner.is_regular(), Some(inner_degree));
    // assemble: vertices 0..a are A, a..n are B
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for e in 0..inner.edge_count() {
        let (u, v) = inner.endpoints(e);
        edges.push((u, v));
    }
    let a_edges = edges.len();
    for w in a..n {
        for u in 0..n {
            if u < w && u >= a {
                edges.push((u, w));
            } else if u < a {
                edges.push((u, w));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let g = Graph::new(n, &edges).map_err(|e| GenError::InfeasibleParameters(format!("{e}")))?;
    debug_assert!(g.min_degree() >= delta_n);
    // red on A-edges, unique colours elsewhere
    let mut colours = vec![0u32; g.edge_count()];
    let mut fresh = 1u32;
    let mut in_a_count = 0;
    for e in 0..g.edge_count() {
        let (u, v) = g.endpoints(e);
        if u < a && v < a {
            colours[e] = 0;
            in_a_count += 1;
        } else {
            colours[e] = fresh;
            fresh += 1;
        }
    }
    debug_assert_eq!(in_a_count, a_edges);
    let colouring = EdgeColouring::new(colours);
    let system = colouring_to_system(&g, &colouring);
    Ok((g, colouring, system))
}

/// Random exactly d-regular graph via the pairing model: d copies of every
/// vertex, matched uniformly, with incremental rejection of loops and
/// repeated edges and restart on dead ends (up to 1000 restarts).
pub fn gen_random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GenError> {
    if d >= n || n * d % 2 == 1 {
        return Err(GenError::InfeasibleParameters(format!(
            "no {d}-regular graph on {n} vertices"
        )));
    }
    if d == 0 {
        return Graph::new(n, &[]).map_err(|e| GenError::InfeasibleParameters(format!("{e}")));
    }
    let attempts = 1000;
    let mut rng = rng::seeded(seed);
    'restart: for _ in 0..attempts {
        let mut points: Vec<usize> = (0..n * d).collect();
        rng::shuffle(&mut rng, &mut points);
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n * d / 2);
        let mut adj = alloc::collections::BTreeSet::new();
        // greedy pass over the shuffled points; swap forward on conflicts
        while let Some(p) = points.pop() {
            let u = p / d;
            // find a partner that keeps the graph simple
            let mut found = None;
            for (i, &q) in points.iter().enumerate().rev() {
                let v = q / d;
                if v != u && !adj.contains(&(u.min(v), u.max(v))) {
                    found = Some(i);
                    break;
                }
            }
            match found {
                None => continue 'restart,
                Some(i) => {
                    let q = points.remove(i);
                    let v = q / d;
                    adj.insert((u.min(v), u.max(v)));
                    edges.push((u.min(v), u.max(v)));
                }
            }
        }
        let g = Graph::new(n, &edges).expect("pairing produced a simple graph");
        debug_assert_eq!(g.is_regular(), Some(d));
        return Ok(g);
    }
    Err(GenError::RetriesExhausted { attempts })
}

/// Random circulant with an exactly `d`-regular connection set; the cheap way
/// to get dense regular graphs at sizes where the pairing model is hopeless.
pub fn gen_random_circulant(n: usize, d: usize, seed: u64) -> Result<Graph, GenError> {
    if d >= n || n * d % 2 == 1 {
        return Err(GenError::InfeasibleParameters(format!(
            "no {d}-regular graph on {n} vertices"
        )));
    }
    let mut rng = rng::seeded(seed);
    let half = if n % 2 == 0 { n / 2 } else { 0 };
    let mut offsets: Vec<usize> = (1..n.div_ceil(2)).collect();
    rng::shuffle(&mut rng, &mut offsets);
    let mut conn = Vec::new();
    let mut need = d;
    if need % 2 == 1 {
        debug_assert!(half > 0, "odd degree needs even n");
        conn.push(half);
        need -= 1;
    }
    conn.extend(offsets.into_iter().take(need / 2));
    gen_circulant(n, &conn)
}

/// Random incompatibility system with boundedness at most `bound`: per
/// incident `(v, e)` a few partners are proposed and a pair is accepted only
/// while both of its sides stay under the bound.
pub fn gen_random_system(g: &Graph, bound: usize, seed: u64) -> IncompatibilitySystem {
    if bound == 0 {
        return IncompatibilitySystem::empty(g.edge_count());
    }
    let mut rng = rng::seeded(seed);
    let mut count = vec![[0usize; 2]; g.edge_count()];
    let side = |g: &Graph, e: usize, v: usize| -> usize {
        let (a, _) = g.endpoints(e);
        usize::from(v != a)
    };
    let mut pairs = Vec::new();
    for v in 0..g.n() {
        let inc: Vec<usize> = g.neighbors(v).map(|(_, e)| e).collect();
        if inc.len() < 2 {
            continue;
        }
        for &e in &inc {
            let proposals = bound.div_ceil(2);
            for _ in 0..proposals {
                let p = inc[rng::below(&mut rng, inc.len())];
                if p == e {
                    continue;
                }
                let (se, sp) = (side(g, e, v), side(g, p, v));
                if count[e][se] < bound && count[p][sp] < bound {
                    pairs.push((v, e.min(p), e.max(p)));
                    count[e][se] += 1;
                    count[p][sp] += 1;
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    // dedup may drop duplicates that were double counted; rebuild counts honestly
    let mut sys_pairs = Vec::with_capacity(pairs.len());
    let mut count = vec![[0usize; 2]; g.edge_count()];
    for (v, e1, e2) in pairs {
        let (s1, s2) = (side(g, e1, v), side(g, e2, v));
        if count[e1][s1] < bound && count[e2][s2] < bound {
            count[e1][s1] += 1;
            count[e2][s2] += 1;
            sys_pairs.push((v, e1, e2));
        }
    }
    IncompatibilitySystem::from_pairs_unchecked(g.edge_count(), g, sys_pairs)
}

/// Exactly `reg`-regular synthetic incompatibility system with O(1) pair
/// membership and no per-pair storage; usable at sizes where explicit
/// storage (Theta(n * dn * reg) entries) is impossible.
///
/// At each vertex the incident edges are placed on a seeded random circle;
/// an edge's forbidden partners are the `reg` nearest positions (reg/2 on
/// each side, plus the antipode when `reg` is odd). The relation is symmetric
/// and local by construction.
#[derive(Clone, Debug)]
pub struct SyntheticRegularSystem {
    reg: usize,
    /// circular position of edge `e` at each endpoint side
    pos: Vec<[u32; 2]>,
    /// per vertex: degree and edge-by-position table offset
    ring_offset: Vec<usize>,
    ring: Vec<u32>,
    degrees: Vec<u32>,
}

impl SyntheticRegularSystem {
    /// Requires a regular host graph with degree > `reg`, and `reg` even or
    /// degree even (so that "reg nearest" is symmetric).
    pub fn new(g: &Graph, reg: usize, seed: u64) -> Result<Self, GenError> {
        let d = g
            .is_regular()
            .ok_or(GenError::NotRegular { v: 0, degree: 0 })?;
        if reg >= d {
            return Err(GenError::InfeasibleParameters(format!(
                "regularity {reg} must be below degree {d}"
            )));
        }
        if reg % 2 == 1 && d % 2 == 1 {
            return Err(GenError::InfeasibleParameters(
                "odd regularity needs an even host degree (antipode pairing)".into(),
            ));
        }
        let mut pos = vec![[u32::MAX; 2]; g.edge_count()];
        let mut ring_offset = Vec::with_capacity(g.n() + 1);
        let mut ring = Vec::with_capacity(2 * g.edge_count());
        let mut degrees = Vec::with_capacity(g.n());
        let mut rng = rng::seeded(seed);
        for v in 0..g.n() {
            ring_offset.push(ring.len());
            degrees.push(g.degree(v) as u32);
            let mut inc: Vec<usize> = g.neighbors(v).map(|(_, e)| e).collect();
            rng::shuffle(&mut rng, &mut inc);
            for (p, &e) in inc.iter().enumerate() {
                let (a, _) = g.endpoints(e);
                let s = usize::from(v != a);
                pos[e][s] = p as u32;
                ring.push(e as u32);
            }
        }
        ring_offset.push(ring.len());
        Ok(SyntheticRegularSystem {
            reg,
            pos,
            ring_offset,
            ring,
            degrees,
        })
    }

    fn position(&self, g: &Graph, v: usize, e: usize) -> usize {
        let (a, _) = g.endpoints(e);
        self.pos[e][usize::from(v != a)] as usize
    }

    /// Circular distance between positions at a vertex of degree `d`.
    fn forbidden_offset(&self, d: usize, p1: usize, p2: usize) -> bool {
        let diff = if p1 > p2 { p1 - p2 } else { p2 - p1 };
        let dist = diff.min(d - diff);
        if dist == 0 {
            return false;
        }
        if dist <= self.reg / 2 {
            return true;
        }
        // odd regularity: also forbid the antipode d/2 (d even in that case)
        self.reg % 2 == 1 && 2 * dist == d
    }
}

impl System for SyntheticRegularSystem {
    fn forbids(&self, g: &Graph, v: usize, e1: usize, e2: usize) -> bool {
        let d = self.degrees[v] as usize;
        self.forbidden_offset(d, self.position(g, v, e1), self.position(g, v, e2))
    }

    fn partner_count(&self, _: &Graph, _: usize, _: usize) -> usize {
        self.reg
    }

    fn for_each_partner(&self, g: &Graph, v: usize, e: usize, f: &mut dyn FnMut(usize)) {
        let d = self.degrees[v] as usize;
        let base = self.ring_offset[v];
        let p = self.position(g, v, e);
        for k in 1..=self.reg / 2 {
            f(self.ring[base + (p + k) % d] as usize);
            f(self.ring[base + (p + d - k) % d] as usize);
        }
        if self.reg % 2 == 1 {
            f(self.ring[base + (p + d / 2) % d] as usize);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{incompat_degree, induced_system};
    use crate::VertexSet;

    #[test]
    fn circulant_families() {
        let c7 = gen_circulant(7, &[1]).unwrap();
        assert_eq!(c7.n(), 7);
        assert_eq!(c7.edge_count(), 7);
        assert_eq!(c7.is_regular(), Some(2));

        let g = gen_circulant(10, &[1, 2, 5]).unwrap();
        assert_eq!(g.is_regular(), Some(5));
        assert_eq!(g.edge_count(), 25);

        assert!(gen_circulant(7, &[0]).is_err());
        assert!(gen_circulant(7, &[4]).is_err()); // > n/2
        assert!(gen_circulant(9, &[1, 1]).is_err());
    }

    #[test]
    fn bollobas_erdos_k1() {
        let (g, c, f) = gen_bollobas_erdos(1).unwrap();
        assert_eq!(g.n(), 7);
        assert_eq!(g.is_regular(), Some(4));
        f.validate(&g).unwrap();
        // two edge-disjoint spanning 2-regular colour classes
        for colour in 0..2u32 {
            let class: Vec<usize> = (0..g.edge_count()).filter(|&e| c.of(e) == colour).collect();
            assert_eq!(class.len(), 7);
            let mut deg = vec![0usize; 7];
            for &e in &class {
                let (u, v) = g.endpoints(e);
                deg[u] += 1;
                deg[v] += 1;
            }
            assert!(
                deg.iter().all(|&d| d == 2),
                "colour class must be 2-regular"
            );
        }
        assert_eq!(f.boundedness(&g), 1);
        assert_eq!(c.delta_mono(&g), 2);
    }

    #[test]
    fn bollobas_erdos_k2() {
        let (g, c, f) = gen_bollobas_erdos(2).unwrap();
        assert_eq!(g.n(), 15);
        assert_eq!(g.is_regular(), Some(8));
        assert_eq!(c.delta_mono(&g), 4);
        assert_eq!(f.boundedness(&g), 3);
    }

    #[test]
    fn source_orient_k4() {
        let g = Graph::complete(4);
        let so = gen_source_orient(&g, 0, 7).unwrap();
        so.system.validate(&g).unwrap();
        assert_eq!(so.system.boundedness(&g), 2);
        // source has out-degree d, in-degree 0
        assert!(so.orientation.iter().all(|&(t, h)| h != 0 || t != 0));
        let out_at_source = so.orientation.iter().filter(|&&(t, _)| t == 0).count();
        assert_eq!(out_at_source, 3);
        // moreover colouring: delta_mono <= ceil(d/2) + 1
        assert!(so.colouring.delta_mono(&g) <= 2 + 1);
        // no pair forbidden at the source: incompat degree 0 for x-edges at x
        let all = VertexSet::full(4);
        for (_, e) in g.neighbors(0) {
            assert_eq!(incompat_degree(&g, &so.system, e, 0, &all).unwrap(), 0);
        }
    }

    #[test]
    fn source_orient_balance_invariant() {
        // before re-orientation both in/out within {floor(d/2), ceil(d/2)};
        // after it, only x's neighbours can exceed by one
        for (n, d, seed) in [(6, 5, 3u64), (8, 3, 5), (10, 2, 9)] {
            let g = if d == 2 {
                gen_circulant(n, &[1]).unwrap()
            } else {
                gen_random_regular(n, d, seed).unwrap()
            };
            let so = gen_source_orient(&g, 1, seed).unwrap();
            let mut indeg = vec![0usize; n];
            for &(_, h) in &so.orientation {
                indeg[h] += 1;
            }
            assert_eq!(indeg[1], 0);
            for v in 0..n {
                if v != 1 {
                    assert!(indeg[v] <= d.div_ceil(2) + 1);
                    assert!(indeg[v] + 1 >= d / 2, "vertex {v} in-degree {}", indeg[v]);
                }
            }
            assert_eq!(so.system.boundedness(&g), d.div_ceil(2));
        }
    }

    #[test]
    fn source_orient_odd_degree_needs_matching() {
        // K4 minus an edge is not regular -> NotRegular
        let g = Graph::new(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        assert!(matches!(
            gen_source_orient(&g, 0, 1),
            Err(GenError::NotRegular { .. })
        ));
        // Petersen-like odd n with odd d cannot happen (nd even); odd d with
        // no perfect matching: two disjoint triangles joined... use K4 on an
        // odd component instead: C5 has even d, so craft 3-regular without PM
        // is awkward at tiny sizes; the parity error is exercised via odd n.
    }

    #[test]
    fn clique_blowup_12() {
        let (g, c, f) = gen_clique_blowup(12, 7, 12).unwrap();
        assert_eq!(g.n(), 12);
        f.validate(&g).unwrap();
        // a = 10, B = 2, G[A] 5-regular
        let delta_n = 7;
        assert!(g.min_degree() >= delta_n);
        assert_eq!(f.boundedness(&g), 4); // delta n - n + a - 1 = 7-12+10-1
        assert!(4 <= delta_n - 12 / 3 + 1);
        // delta_mono is the red degree inside A, which meets the extremal
        // bound delta*n - n/3 + 2 = 5 with equality here
        assert_eq!(c.delta_mono(&g), 5);
        assert_eq!(c.delta_mono(&g), f.boundedness(&g) + 1);
        // induced system on A is the complete intersecting-pair system there
        let a_set = VertexSet::from_iter(12, 0..10);
        let ind = induced_system(&g, &f, &a_set);
        let inner = &ind.induced.graph;
        let mut expected = 0usize;
        for v in 0..inner.n() {
            let dv = inner.degree(v);
            expected += dv * (dv - 1) / 2;
        }
        assert_eq!(ind.system.pair_count(), expected);
    }

    #[test]
    fn clique_blowup_rejects() {
        assert!(gen_clique_blowup(12, 1, 3).is_err()); // delta < 1/2
        assert!(gen_clique_blowup(13, 7, 12).is_err()); // delta n not integral
    }

    #[test]
    fn random_regular_degrees() {
        for seed in 0..5u64 {
            let g = gen_random_regular(20, 6, seed).unwrap();
            assert_eq!(g.is_regular(), Some(6));
            g.validate().unwrap();
        }
        assert!(gen_random_regular(5, 3, 0).is_err()); // nd odd
        let g = gen_random_circulant(40, 25, 3).unwrap();
        assert_eq!(g.is_regular(), Some(25));
    }

    #[test]
    fn random_system_bound_sweep() {
        // contract: boundedness(result) <= bound over many (G, seed) trials
        for seed in 0..100u64 {
            let n = 6 + (seed as usize % 6);
            let g = Graph::complete(n);
            let bound = (seed as usize % 4) + (seed as usize % 2);
            let f = gen_random_system(&g, bound, seed);
            f.validate(&g).unwrap();
            assert!(f.boundedness(&g) <= bound, "seed {seed}");
        }
        let g = Graph::complete(6);
        assert_eq!(gen_random_system(&g, 0, 1).pair_count(), 0);
    }

    #[test]
    fn synthetic_regular_system_is_regular() {
        let g = gen_circulant(24, &[1, 2, 3, 4, 5, 6]).unwrap(); // 12-regular
        for reg in [2, 4, 6, 3] {
            let f = SyntheticRegularSystem::new(&g, reg, 5).unwrap();
            assert_eq!(f.regularity(&g), Some(reg), "reg {reg}");
            assert_eq!(f.boundedness(&g), reg);
            // symmetry spot-check through the System interface
            for v in 0..g.n() {
                let inc: Vec<usize> = g.neighbors(v).map(|(_, e)| e).collect();
                for &e1 in &inc {
                    for &e2 in &inc {
                        if e1 != e2 {
                            assert_eq!(f.forbids(&g, v, e1, e2), f.forbids(&g, v, e2, e1));
                        }
                    }
                }
            }
            // partner iteration agrees with forbids
            let v = 3;
            let e = g.neighbors(v).next().unwrap().1;
            let mut listed = Vec::new();
            f.for_each_partner(&g, v, e, &mut |p| listed.push(p));
            assert_eq!(listed.len(), reg);
            for p in listed {
                assert!(f.forbids(&g, v, e, p));
            }
        }
    }
}
