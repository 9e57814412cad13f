//! Spanning even-regular subgraph extraction and incompatibility-system
//! regularization.
//!
//! The extraction orients the graph near-balanced along Euler circuits and
//! asks a max-flow for an exact r/2-out, r/2-in sub-orientation; un-orienting
//! gives an exactly r-regular spanning subgraph. Fresh random orientations
//! are retried before reporting the residual deficit. Connectivity is
//! repaired by degree-preserving 2-swaps when possible and otherwise only
//! flagged, since the downstream forest construction never needs it.
//!
//! Regularization turns a bounded system into an exactly regular one: at each
//! vertex the *compatibility graph* on its neighbourhood (edges = allowed
//! pairs) contains a spanning even-regular subgraph; forbidding exactly the
//! pairs outside it leaves every incident edge with the same number of
//! forbidden partners.

use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::VertexSet;
use crate::flow::Dinic;
use crate::graph::Graph;
use crate::rng::{self, DetRng};
use crate::system::{IncompatibilitySystem, System};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegularTarget {
    /// Exactly this degree (must be even and positive).
    Exact(usize),
    /// Largest even degree reachable by descending search within the retry
    /// budget (budget-relative, not certified maximal).
    Maximize,
}

#[derive(Clone, Debug)]
pub struct RegularSubgraph {
    /// Edge ids of the host graph forming the subgraph.
    pub edge_ids: Vec<usize>,
    pub degree: usize,
    pub connected: bool,
    /// True when 2-swap repair was applied to reconnect components.
    pub repaired: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegularizeError {
    BadTarget { r: usize },
    Infeasible { r: usize, deficit: usize },
    NotRegularGraph { v: usize, degree: usize },
    SlackTooSmall { dn: usize, mu_n: usize },
    SubgraphInfeasible { v: usize, deficit: usize },
}

impl core::fmt::Display for RegularizeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RegularizeError::BadTarget { r } => {
                write!(f, "target degree {r} must be even and nonzero")
            }
            RegularizeError::Infeasible { r, deficit } => {
                write!(
                    f,
                    "no {r}-regular spanning subgraph found (last flow deficit {deficit})"
                )
            }
            RegularizeError::NotRegularGraph { v, degree } => {
                write!(f, "host graph not regular (vertex {v} has degree {degree})")
            }
            RegularizeError::SlackTooSmall { dn, mu_n } => {
                write!(f, "boundedness {mu_n} leaves no slack below degree {dn}")
            }
            RegularizeError::SubgraphInfeasible { v, deficit } => {
                write!(
                    f,
                    "compatibility graph at vertex {v} has no target subgraph (deficit {deficit})"
                )
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RegularizeError {}

/// Extracts a spanning subgraph with every degree exactly `r` (`r` even), or
/// the largest even degree found in maximize mode.
pub fn spanning_regular_subgraph(
    g: &Graph,
    target: RegularTarget,
    seed: u64,
) -> Result<RegularSubgraph, RegularizeError> {
    match target {
        RegularTarget::Exact(r) => {
            if r == 0 || r % 2 == 1 {
                return Err(RegularizeError::BadTarget { r });
            }
            extract_exact(g, r, seed, 5)
        }
        RegularTarget::Maximize => {
            let mut r = g.min_degree();
            if r % 2 == 1 {
                r -= 1;
            }
            while r >= 2 {
                if let Ok(sub) = extract_exact(g, r, seed, 3) {
                    return Ok(sub);
                }
                r -= 2;
            }
            Err(RegularizeError::Infeasible {
                r: 2,
                deficit: g.n(),
            })
        }
    }
}

fn extract_exact(
    g: &Graph,
    r: usize,
    seed: u64,
    orientations: usize,
) -> Result<RegularSubgraph, RegularizeError> {
    let n = g.n();
    if g.min_degree() < r {
        return Err(RegularizeError::Infeasible {
            r,
            deficit: n * r / 2,
        });
    }
    let mut best_deficit = usize::MAX;
    for attempt in 0..orientations {
        let mut rng = rng::seeded(rng::derive_seed(seed, &[r as u64, attempt as u64]));
        let orientation = orient_balanced(g, &mut rng);
        // nodes: 0..n out-copies, n..2n in-copies, source, sink
        let (s, t) = (2 * n, 2 * n + 1);
        let mut net = Dinic::new(2 * n + 2);
        for v in 0..n {
            net.add_arc(s, v, (r / 2) as u32);
            net.add_arc(n + v, t, (r / 2) as u32);
        }
        let mut arc_of_edge = Vec::with_capacity(g.edge_count());
        for e in 0..g.edge_count() {
            let (tail, head) = orientation[e];
            arc_of_edge.push(net.add_arc(tail, n + head, 1));
        }
        let want = (n * r / 2) as u64;
        let flow = net.max_flow(s, t);
        if flow == want {
            let edge_ids: Vec<usize> = (0..g.edge_count())
                .filter(|&e| net.flow_on(arc_of_edge[e]) == 1)
                .collect();
            let sub = g.edge_subgraph(&edge_ids);
            debug_assert_eq!(sub.graph.is_regular(), Some(r));
            let (edge_ids, connected, repaired) = repair_connectivity(g, edge_ids);
            return Ok(RegularSubgraph {
                edge_ids,
                degree: r,
                connected,
                repaired,
            });
        }
        best_deficit = best_deficit.min((want - flow) as usize);
    }
    Err(RegularizeError::Infeasible {
        r,
        deficit: best_deficit,
    })
}

/// Orientation with every |out - in| <= 1, via Euler circuits after pairing
/// odd-degree vertices through a virtual vertex. Randomized by adjacency
/// shuffling.
fn orient_balanced(g: &Graph, rng: &mut DetRng) -> Vec<(usize, usize)> {
    let n = g.n();
    let virt = n;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n + 1];
    for e in 0..g.edge_count() {
        let (u, v) = g.endpoints(e);
        adj[u].push((v, e));
        adj[v].push((u, e));
    }
    let odd: Vec<usize> = (0..n).filter(|&v| g.degree(v) % 2 == 1).collect();
    for (i, &v) in odd.iter().enumerate() {
        let slot = g.edge_count() + i;
        adj[v].push((virt, slot));
        adj[virt].push((v, slot));
    }
    for row in adj.iter_mut() {
        rng::shuffle(rng, row);
    }
    let mut orientation = vec![(usize::MAX, usize::MAX); g.edge_count()];
    let mut used = vec![false; g.edge_count() + odd.len()];
    let mut next = vec![0usize; n + 1];
    for start in 0..=n {
        loop {
            while next[start] < adj[start].len() && used[adj[start][next[start]].1] {
                next[start] += 1;
            }
            if next[start] >= adj[start].len() {
                break;
            }
            let mut cur = start;
            loop {
                while next[cur] < adj[cur].len() && used[adj[cur][next[cur]].1] {
                    next[cur] += 1;
                }
                if next[cur] >= adj[cur].len() {
                    break;
                }
                let (to, slot) = adj[cur][next[cur]];
                used[slot] = true;
                if slot < g.edge_count() {
                    orientation[slot] = (cur, to);
                }
                cur = to;
            }
        }
    }
    orientation
}

/// When the subgraph is disconnected, looks for a crossing 4-cycle exchange
/// (replace in-component edges u1v1, u2v2 by crossing edges u1u2, v1v2) and
/// applies it; returns (edges, connected, repaired).
fn repair_connectivity(g: &Graph, mut edge_ids: Vec<usize>) -> (Vec<usize>, bool, bool) {
    let mut repaired = false;
    for _round in 0..g.n() {
        let comp = components(g, &edge_ids);
        if comp.count <= 1 {
            edge_ids.sort_unstable();
            return (edge_ids, true, repaired);
        }
        let mut chosen = VertexSet::new(g.edge_count());
        for &e in &edge_ids {
            chosen.insert(e);
        }
        let mut swap = None;
        'search: for (i, &e1) in edge_ids.iter().enumerate() {
            let (u1, v1) = g.endpoints(e1);
            for (j, &e2) in edge_ids.iter().enumerate().skip(i + 1) {
                let (u2, v2) = g.endpoints(e2);
                if comp.id[u1] == comp.id[u2] {
                    continue;
                }
                // two ways to rewire the 4-cycle
                for (a, b, c, d) in [(u1, u2, v1, v2), (u1, v2, v1, u2)] {
                    if let (Some(f1), Some(f2)) = (g.edge_between(a, b), g.edge_between(c, d)) {
                        if !chosen.contains(f1) && !chosen.contains(f2) && f1 != f2 {
                            swap = Some((i, j, f1, f2));
                            break 'search;
                        }
                    }
                }
            }
        }
        match swap {
            None => {
                edge_ids.sort_unstable();
                return (edge_ids, false, repaired);
            }
            Some((i, j, f1, f2)) => {
                edge_ids[i] = f1;
                edge_ids[j] = f2;
                repaired = true;
            }
        }
    }
    let comp = components(g, &edge_ids);
    edge_ids.sort_unstable();
    let connected = comp.count <= 1;
    (edge_ids, connected, repaired)
}

struct Components {
    id: Vec<u32>,
    count: usize,
}

fn components(g: &Graph, edge_ids: &[usize]) -> Components {
    let mut id = vec![u32::MAX; g.n()];
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); g.n()];
    for &e in edge_ids {
        let (u, v) = g.endpoints(e);
        adj[u].push(v as u32);
        adj[v].push(u as u32);
    }
    let mut count = 0;
    for v in 0..g.n() {
        if id[v] == u32::MAX {
            let c = count as u32;
            count += 1;
            let mut stack = vec![v];
            id[v] = c;
            while let Some(u) = stack.pop() {
                for &w in &adj[u] {
                    if id[w as usize] == u32::MAX {
                        id[w as usize] = c;
                        stack.push(w as usize);
                    }
                }
            }
        }
    }
    Components { id, count }
}

/// A regularized system together with its exact per-(vertex, edge) count.
#[derive(Clone, Debug)]
pub struct Regularized {
    pub system: IncompatibilitySystem,
    /// Every incident `(v, e)` has exactly this many forbidden partners.
    pub regularity: usize,
    /// Even degree kept in each vertex's compatibility graph.
    pub kept_degree: usize,
    /// True when the primary target `2*floor(dn/8)` had to be lowered.
    pub fallback: bool,
}

/// Embeds a bounded system `F` of a dn-regular graph into an exactly
/// (dn - 2*floor(dn/8) - 1)-regular system `F' ⊇ F`, by keeping a spanning
/// even-regular subgraph of each per-vertex compatibility graph and
/// forbidding everything else. When the primary target is infeasible at some
/// vertex, the largest even degree feasible at *every* vertex is used
/// instead, keeping the output exactly regular.
pub fn regularize_system(
    g: &Graph,
    f: &IncompatibilitySystem,
    seed: u64,
) -> Result<Regularized, RegularizeError> {
    let dn = g.is_regular().ok_or_else(|| {
        let v = (0..g.n()).max_by_key(|&v| g.degree(v)).unwrap_or(0);
        RegularizeError::NotRegularGraph {
            v,
            degree: g.degree(v),
        }
    })?;
    let mu_n = f.boundedness(g);
    // need min degree of every compatibility graph above half its order
    if dn == 0 || mu_n >= dn - 1 || 2 * (dn - 1 - mu_n) <= dn {
        return Err(RegularizeError::SlackTooSmall { dn, mu_n });
    }
    let primary = dn / 8;
    let mut target = primary.max(1);
    // compatibility graphs, one per vertex, with local ids into N(v)
    let comp_graphs: Vec<(Vec<usize>, Graph)> = (0..g.n())
        .map(|v| {
            let edge_of: Vec<usize> = g.neighbors(v).map(|(_, e)| e).collect();
            let mut edges = Vec::new();
            for i in 0..edge_of.len() {
                for j in (i + 1)..edge_of.len() {
                    if !f.forbids(g, v, edge_of[i], edge_of[j]) {
                        edges.push((i, j));
                    }
                }
            }
            (edge_of, Graph::new(dn, &edges).expect("simple"))
        })
        .collect();
    let mut fallback = false;
    let mut kept: Vec<Vec<usize>> = Vec::new();
    'levels: loop {
        kept.clear();
        for (v, (_, h)) in comp_graphs.iter().enumerate() {
            match spanning_regular_subgraph(
                h,
                RegularTarget::Exact(2 * target),
                rng::derive_seed(seed, &[v as u64]),
            ) {
                Ok(sub) => kept.push(sub.edge_ids),
                Err(_) => {
                    // lower the common degree and start over
                    if target == 1 {
                        return Err(RegularizeError::SubgraphInfeasible { v, deficit: 2 });
                    }
                    target -= 1;
                    fallback = true;
                    continue 'levels;
                }
            }
        }
        break;
    }
    // forbid exactly the pairs outside each kept subgraph
    let mut pairs = Vec::new();
    for (v, (edge_of, h)) in comp_graphs.iter().enumerate() {
        let mut keep = VertexSet::new(h.edge_count());
        for &le in &kept[v] {
            keep.insert(le);
        }
        for i in 0..edge_of.len() {
            for j in (i + 1)..edge_of.len() {
                let kept_pair = h
                    .edge_between(i, j)
                    .map(|le| keep.contains(le))
                    .unwrap_or(false);
                if !kept_pair {
                    let (e1, e2) = (edge_of[i], edge_of[j]);
                    pairs.push((v, e1.min(e2), e1.max(e2)));
                }
            }
        }
    }
    let system = IncompatibilitySystem::from_pairs_unchecked(g.edge_count(), g, pairs);
    let regularity = dn - 1 - 2 * target;
    debug_assert_eq!(system.regularity(g), Some(regularity));
    Ok(Regularized {
        system,
        regularity,
        kept_degree: 2 * target,
        fallback,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_circulant, gen_random_system};
    use crate::system::is_compatible;
    use crate::EmptySystem;

    fn check_regular(g: &Graph, sub: &RegularSubgraph, r: usize) {
        let mut deg = vec![0usize; g.n()];
        for &e in &sub.edge_ids {
            let (u, v) = g.endpoints(e);
            deg[u] += 1;
            deg[v] += 1;
        }
        assert!(deg.iter().all(|&d| d == r), "degrees {deg:?} != {r}");
        assert_eq!(sub.degree, r);
    }

    #[test]
    fn k5_two_regular_is_hamilton_cycle() {
        let g = Graph::complete(5);
        let sub = spanning_regular_subgraph(&g, RegularTarget::Exact(2), 1).unwrap();
        check_regular(&g, &sub, 2);
        // a 2-regular simple spanning subgraph of K5 must be one 5-cycle
        assert!(sub.connected);
        let verts = trace_cycle(&g, &sub.edge_ids);
        let c = crate::graph::CycleSeq::from_vertices(&g, &verts).unwrap();
        assert!(is_compatible(&g, &EmptySystem, &c));
    }

    fn trace_cycle(g: &Graph, edges: &[usize]) -> Vec<usize> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
        for &e in edges {
            let (u, v) = g.endpoints(e);
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut verts = vec![0usize];
        let mut prev = usize::MAX;
        loop {
            let cur = *verts.last().unwrap();
            let next = adj[cur].iter().copied().find(|&w| w != prev).unwrap();
            if next == 0 {
                return verts;
            }
            verts.push(next);
            prev = cur;
        }
    }

    #[test]
    fn k7_four_regular() {
        let g = Graph::complete(7);
        let sub = spanning_regular_subgraph(&g, RegularTarget::Exact(4), 3).unwrap();
        check_regular(&g, &sub, 4);
    }

    #[test]
    fn maximize_on_complete_graph() {
        // K8: min degree 7, largest even regular degree is 6
        let g = Graph::complete(8);
        let sub = spanning_regular_subgraph(&g, RegularTarget::Maximize, 5).unwrap();
        assert_eq!(sub.degree, 6);
        check_regular(&g, &sub, 6);
    }

    #[test]
    fn odd_target_rejected() {
        let g = Graph::complete(5);
        assert!(matches!(
            spanning_regular_subgraph(&g, RegularTarget::Exact(3), 0),
            Err(RegularizeError::BadTarget { .. })
        ));
        assert!(matches!(
            spanning_regular_subgraph(&g, RegularTarget::Exact(6), 0),
            Err(RegularizeError::Infeasible { .. })
        ));
    }

    #[test]
    fn regularize_empty_system_on_circulant() {
        // dn = 12: F' must be (12 - 2*1 - 1) = 9-regular and contain F = {}
        let g = gen_circulant(24, &[1, 2, 3, 4, 5, 6]).unwrap();
        let f = IncompatibilitySystem::empty(g.edge_count());
        let reg = regularize_system(&g, &f, 7).unwrap();
        assert_eq!(reg.regularity, 9);
        assert!(!reg.fallback);
        assert_eq!(reg.system.regularity(&g), Some(9));
    }

    #[test]
    fn regularize_contains_original() {
        for seed in 0..6u64 {
            let g = gen_circulant(20, &[1, 2, 3, 4, 5]).unwrap(); // 10-regular
            let f = gen_random_system(&g, 2, seed);
            let reg = regularize_system(&g, &f, seed).unwrap();
            reg.system.validate(&g).unwrap();
            assert_eq!(reg.system.regularity(&g), Some(reg.regularity));
            for (v, e1, e2) in f.iter_pairs(&g) {
                assert!(
                    reg.system.forbids(&g, v, e1, e2),
                    "pair ({v},{e1},{e2}) lost in seed {seed}"
                );
            }
        }
    }

    #[test]
    fn regularize_rejects_tight_bounds() {
        let g = gen_circulant(12, &[1, 2]).unwrap(); // 4-regular
                                                     // forbid every intersecting pair: no slack at all
        let mut pairs = Vec::new();
        for v in 0..g.n() {
            let inc: Vec<usize> = g.neighbors(v).map(|(_, e)| e).collect();
            for i in 0..inc.len() {
                for j in (i + 1)..inc.len() {
                    pairs.push((v, inc[i].min(inc[j]), inc[i].max(inc[j])));
                }
            }
        }
        let f = IncompatibilitySystem::from_pairs(&g, pairs).unwrap();
        assert!(matches!(
            regularize_system(&g, &f, 0),
            Err(RegularizeError::SlackTooSmall { .. })
        ));
        let h = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(
            regularize_system(&h, &IncompatibilitySystem::empty(2), 0),
            Err(RegularizeError::NotRegularGraph { .. })
        ));
    }

    #[test]
    fn prop_arithmetic_for_dn40() {
        // dn = 40 -> mu'n = 40 - 2*floor(40/8) - 1 = 29
        let g = gen_circulant(50, &(1..=20).collect::<Vec<_>>()).unwrap();
        assert_eq!(g.is_regular(), Some(40));
        let f = gen_random_system(&g, 5, 9);
        let reg = regularize_system(&g, &f, 9).unwrap();
        assert_eq!(reg.regularity, 40 - 2 * 5 - 1);
        assert!(!reg.fallback);
    }
}
