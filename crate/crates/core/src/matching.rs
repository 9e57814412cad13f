//! Bipartite matching machinery: Hopcroft–Karp maximum matching, balanced
//! König edge-colouring decompositions, the almost-regular large-matching
//! bound, and a small exact perfect-matching search on general graphs.

use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::VertexSet;
use crate::graph::Graph;
use crate::rng::{self, DetRng};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchingError {
    NotBipartition {
        v: usize,
    },
    NotCrossing {
        e: usize,
    },
    WidthTooSmall {
        d: usize,
        max_degree: usize,
    },
    NotBalanced {
        left: usize,
        right: usize,
    },
    DegreeOutOfRange {
        v: usize,
        degree: usize,
    },
    /// Internal assertion: the proven size bound failed, which signals a bug.
    BoundViolated {
        size: usize,
        bound: usize,
    },
}

impl core::fmt::Display for MatchingError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MatchingError::NotBipartition { v } => {
                write!(f, "vertex {v} is in neither (or both) sides")
            }
            MatchingError::NotCrossing { e } => {
                write!(f, "edge {e} does not cross the bipartition")
            }
            MatchingError::WidthTooSmall { d, max_degree } => {
                write!(f, "decomposition width {d} below max degree {max_degree}")
            }
            MatchingError::NotBalanced { left, right } => {
                write!(f, "sides have sizes {left} and {right}")
            }
            MatchingError::DegreeOutOfRange { v, degree } => {
                write!(f, "degree {degree} of vertex {v} outside [d-r, d+r]")
            }
            MatchingError::BoundViolated { size, bound } => {
                write!(f, "matching of size {size} below proven bound {bound}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MatchingError {}

/// A verified two-sided split of a graph's vertices with all edges crossing.
#[derive(Clone, Debug)]
pub struct Bipartition {
    pub left: VertexSet,
    pub right: VertexSet,
}

impl Bipartition {
    pub fn new(g: &Graph, left: VertexSet, right: VertexSet) -> Result<Self, MatchingError> {
        for v in 0..g.n() {
            if left.contains(v) == right.contains(v) {
                return Err(MatchingError::NotBipartition { v });
            }
        }
        for e in 0..g.edge_count() {
            let (a, b) = g.endpoints(e);
            if left.contains(a) == left.contains(b) {
                return Err(MatchingError::NotCrossing { e });
            }
        }
        Ok(Bipartition { left, right })
    }

    /// Split `0..k` left, `k..n` right.
    pub fn split_at(g: &Graph, k: usize) -> Result<Self, MatchingError> {
        Self::new(
            g,
            VertexSet::from_iter(g.n(), 0..k),
            VertexSet::from_iter(g.n(), k..g.n()),
        )
    }
}

/// Maximum-cardinality matching (Hopcroft–Karp), returned as edge ids.
/// No augmenting path remains on return, which certifies maximality.
pub fn max_matching(g: &Graph, bip: &Bipartition) -> Vec<usize> {
    let lefts: Vec<usize> = bip.left.iter().collect();
    let n = g.n();
    let mut lidx = vec![usize::MAX; n];
    for (i, &v) in lefts.iter().enumerate() {
        lidx[v] = i;
    }
    // match_edge[v] = edge id matching v, or MAX
    let mut mate = vec![u32::MAX; n];
    let mut mate_edge = vec![u32::MAX; n];
    let inf = u32::MAX;
    let mut dist = vec![inf; lefts.len()];
    loop {
        // BFS from free left vertices
        let mut queue = alloc::collections::VecDeque::new();
        for (i, &v) in lefts.iter().enumerate() {
            if mate[v] == u32::MAX {
                dist[i] = 0;
                queue.push_back(v);
            } else {
                dist[i] = inf;
            }
        }
        let mut found = false;
        while let Some(v) = queue.pop_front() {
            for (w, _) in g.neighbors(v) {
                let m = mate[w];
                if m == u32::MAX {
                    found = true;
                } else if dist[lidx[m as usize]] == inf {
                    dist[lidx[m as usize]] = dist[lidx[v]] + 1;
                    queue.push_back(m as usize);
                }
            }
        }
        if !found {
            break;
        }
        // DFS augmentation along level graph
        fn try_augment(
            g: &Graph,
            v: usize,
            lidx: &[usize],
            dist: &mut [u32],
            mate: &mut [u32],
            mate_edge: &mut [u32],
        ) -> bool {
            for (w, e) in g.neighbors(v) {
                let m = mate[w];
                let ok = if m == u32::MAX {
                    true
                } else if dist[lidx[m as usize]] == dist[lidx[v]] + 1 {
                    try_augment(g, m as usize, lidx, dist, mate, mate_edge)
                } else {
                    false
                };
                if ok {
                    mate[w] = v as u32;
                    mate[v] = w as u32;
                    mate_edge[w] = e as u32;
                    mate_edge[v] = e as u32;
                    return true;
                }
            }
            dist[lidx[v]] = u32::MAX;
            false
        }
        for &v in &lefts {
            if mate[v] == u32::MAX {
                try_augment(g, v, &lidx, &mut dist, &mut mate, &mut mate_edge);
            }
        }
    }
    let mut out: Vec<usize> = lefts
        .iter()
        .filter(|&&v| mate[v] != u32::MAX)
        .map(|&v| mate_edge[v] as usize)
        .collect();
    out.sort_unstable();
    out
}

/// Decomposes a bipartite graph into exactly `d` pairwise-disjoint matchings
/// covering every edge, balanced so that sizes differ by at most one. `d`
/// defaults to the maximum degree and must not be below it.
pub fn konig_decomposition(
    g: &Graph,
    bip: &Bipartition,
    d: Option<usize>,
) -> Result<Vec<Vec<usize>>, MatchingError> {
    let delta = g.max_degree();
    let d = d.unwrap_or(delta);
    if d < delta {
        return Err(MatchingError::WidthTooSmall {
            d,
            max_degree: delta,
        });
    }
    debug_assert!(Bipartition::new(g, bip.left.clone(), bip.right.clone()).is_ok());
    if d == 0 {
        return Ok(Vec::new());
    }
    // colour_at[v][c] = edge of colour c at v, or MAX
    let mut colour_at = vec![vec![u32::MAX; d]; g.n()];
    let mut colour_of = vec![u32::MAX; g.edge_count()];
    for e in 0..g.edge_count() {
        let (u, v) = g.endpoints(e);
        let free = |tab: &Vec<u32>| tab.iter().position(|&x| x == u32::MAX).unwrap();
        let a = free(&colour_at[u]);
        let b = free(&colour_at[v]);
        let c = if a == b || colour_at[v][a] == u32::MAX {
            a
        } else if colour_at[u][b] == u32::MAX {
            b
        } else {
            // flip the maximal (a,b)-alternating path from v; parity keeps it
            // away from u. Collect first, then repaint atomically.
            let mut path = Vec::new();
            let (mut cur, mut want) = (v, a);
            while colour_at[cur][want] != u32::MAX {
                let fe = colour_at[cur][want] as usize;
                path.push(fe);
                cur = g.other_endpoint(fe, cur);
                want = if want == a { b } else { a };
            }
            for &fe in &path {
                let old = colour_of[fe] as usize;
                let (x, y) = g.endpoints(fe);
                colour_at[x][old] = u32::MAX;
                colour_at[y][old] = u32::MAX;
            }
            for &fe in &path {
                let old = colour_of[fe] as usize;
                let new = if old == a { b } else { a };
                colour_of[fe] = new as u32;
                let (x, y) = g.endpoints(fe);
                colour_at[x][new] = fe as u32;
                colour_at[y][new] = fe as u32;
            }
            a
        };
        colour_of[e] = c as u32;
        colour_at[u][c] = e as u32;
        colour_at[v][c] = e as u32;
    }
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); d];
    for e in 0..g.edge_count() {
        classes[colour_of[e] as usize].push(e);
    }
    rebalance(g, &mut classes);
    for class in classes.iter_mut() {
        class.sort_unstable();
    }
    Ok(classes)
}

/// Moves alternating path components from the largest to the smallest class
/// until sizes differ by at most one. Each move shrinks the spread potential,
/// so this terminates.
fn rebalance(g: &Graph, classes: &mut [Vec<usize>]) {
    loop {
        let (mut li, mut si) = (0, 0);
        for (i, c) in classes.iter().enumerate() {
            if c.len() > classes[li].len() {
                li = i;
            }
            if c.len() < classes[si].len() {
                si = i;
            }
        }
        if classes[li].len() <= classes[si].len() + 1 {
            return;
        }
        // symmetric difference of the two classes: paths and even cycles
        let mut owner = alloc::collections::BTreeMap::new();
        for &e in &classes[li] {
            owner.insert(e, true);
        }
        for &e in &classes[si] {
            owner.insert(e, false);
        }
        let mut at: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
        for (&e, _) in owner.iter() {
            let (u, v) = g.endpoints(e);
            at[u].push(e);
            at[v].push(e);
        }
        // A surplus component exists: cycles alternate evenly, and the class
        // sizes differ, so some path has one more large-class edge, i.e. both
        // of its end-edges belong to the large class. Scan candidate ends.
        let mut swapped = None;
        for v in 0..g.n() {
            if at[v].len() != 1 || !owner[&at[v][0]] {
                continue;
            }
            let mut walk = Vec::new();
            let (mut cur, mut prev_edge) = (v, usize::MAX);
            loop {
                let next = at[cur].iter().copied().find(|&e| e != prev_edge);
                match next {
                    None => break,
                    Some(e) => {
                        walk.push(e);
                        cur = g.other_endpoint(e, cur);
                        prev_edge = e;
                    }
                }
            }
            if owner[walk.last().expect("walk starts with an edge")] {
                swapped = Some(walk);
                break;
            }
        }
        for e in swapped.expect("a surplus path component exists") {
            if owner[&e] {
                classes[li].retain(|&x| x != e);
                classes[si].push(e);
            } else {
                classes[si].retain(|&x| x != e);
                classes[li].push(e);
            }
        }
    }
}

/// Almost-regular balanced bipartite graphs contain a large matching: with
/// `n` vertices per side and all degrees in `[d-r, d+r]` (and `d+r <= n`)
/// there is a matching of at least `ceil(n - 2rn/(d+r))` edges. Computed via
/// [`max_matching`] and asserted against the bound.
pub fn large_matching_almost_regular(
    g: &Graph,
    bip: &Bipartition,
    d: usize,
    r: usize,
) -> Result<Vec<usize>, MatchingError> {
    let (nl, nr) = (bip.left.len(), bip.right.len());
    if nl != nr {
        return Err(MatchingError::NotBalanced {
            left: nl,
            right: nr,
        });
    }
    for v in 0..g.n() {
        let deg = g.degree(v);
        if deg + r < d || deg > d + r {
            return Err(MatchingError::DegreeOutOfRange { v, degree: deg });
        }
    }
    let m = max_matching(g, bip);
    let bound = matching_bound(nl, d, r);
    if m.len() < bound {
        return Err(MatchingError::BoundViolated {
            size: m.len(),
            bound,
        });
    }
    Ok(m)
}

/// `ceil(n - 2rn/(d+r))` in integer arithmetic.
pub fn matching_bound(n: usize, d: usize, r: usize) -> usize {
    if d + r == 0 {
        return 0;
    }
    n.saturating_sub(2 * r * n / (d + r))
}

/// Exact perfect matching on a general graph by backtracking over the lowest
/// unmatched vertex. Meant for small instances (the generators use it for
/// odd-degree orientations); `None` when no perfect matching exists.
pub fn perfect_matching_small(g: &Graph, seed: u64) -> Option<Vec<usize>> {
    if g.n() % 2 == 1 {
        return None;
    }
    let mut rng = rng::seeded(seed);
    let mut matched = VertexSet::new(g.n());
    let mut chosen = Vec::new();
    if backtrack_pm(g, &mut matched, &mut chosen, &mut rng) {
        chosen.sort_unstable();
        Some(chosen)
    } else {
        None
    }
}

fn backtrack_pm(
    g: &Graph,
    matched: &mut VertexSet,
    chosen: &mut Vec<usize>,
    rng: &mut DetRng,
) -> bool {
    let v = (0..g.n()).find(|&v| !matched.contains(v));
    let v = match v {
        None => return true,
        Some(v) => v,
    };
    let mut nbrs: Vec<(usize, usize)> = g
        .neighbors(v)
        .filter(|&(w, _)| !matched.contains(w))
        .collect();
    rng::shuffle(rng, &mut nbrs);
    for (w, e) in nbrs {
        matched.insert(v);
        matched.insert(w);
        chosen.push(e);
        if backtrack_pm(g, matched, chosen, rng) {
            return true;
        }
        chosen.pop();
        matched.remove(v);
        matched.remove(w);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn complete_bipartite(a: usize, b: usize) -> (Graph, Bipartition) {
        let mut edges = Vec::new();
        for u in 0..a {
            for v in a..a + b {
                edges.push((u, v));
            }
        }
        let g = Graph::new(a + b, &edges).unwrap();
        let bip = Bipartition::split_at(&g, a).unwrap();
        (g, bip)
    }

    #[test]
    fn k33_and_star_and_empty() {
        let (g, bip) = complete_bipartite(3, 3);
        assert_eq!(max_matching(&g, &bip).len(), 3);
        let (g, bip) = complete_bipartite(1, 5);
        assert_eq!(max_matching(&g, &bip).len(), 1);
        let g = Graph::new(4, &[]).unwrap();
        let bip = Bipartition::split_at(&g, 2).unwrap();
        assert_eq!(max_matching(&g, &bip).len(), 0);
    }

    #[test]
    fn konig_k33() {
        let (g, bip) = complete_bipartite(3, 3);
        let classes = konig_decomposition(&g, &bip, Some(3)).unwrap();
        assert_eq!(classes.len(), 3);
        for c in &classes {
            assert_eq!(c.len(), 3);
        }
        check_decomposition(&g, &classes, 3);
    }

    #[test]
    fn konig_path4() {
        // path on 4 vertices: bipartition {0,2} vs {1,3}, 3 edges, max degree 2
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let bip = Bipartition::new(
            &g,
            VertexSet::from_iter(4, [0, 2]),
            VertexSet::from_iter(4, [1, 3]),
        )
        .unwrap();
        let classes = konig_decomposition(&g, &bip, None).unwrap();
        assert_eq!(classes.len(), 2);
        let mut sizes: Vec<usize> = classes.iter().map(|c| c.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2]);
        check_decomposition(&g, &classes, 2);
    }

    #[test]
    fn konig_rejects_small_width() {
        let (g, bip) = complete_bipartite(3, 3);
        assert!(matches!(
            konig_decomposition(&g, &bip, Some(2)),
            Err(MatchingError::WidthTooSmall { .. })
        ));
    }

    fn check_decomposition(g: &Graph, classes: &[Vec<usize>], d: usize) {
        assert_eq!(classes.len(), d);
        let mut covered = vec![false; g.edge_count()];
        let (mut lo, mut hi) = (usize::MAX, 0);
        for class in classes {
            lo = lo.min(class.len());
            hi = hi.max(class.len());
            let mut used = VertexSet::new(g.n());
            for &e in class {
                assert!(!covered[e], "edge {e} in two classes");
                covered[e] = true;
                let (u, v) = g.endpoints(e);
                assert!(used.insert(u), "class not a matching at {u}");
                assert!(used.insert(v), "class not a matching at {v}");
            }
        }
        assert!(covered.iter().all(|&c| c), "not an exact cover");
        assert!(hi - lo <= 1, "unbalanced: sizes in [{lo}, {hi}]");
    }

    fn random_bipartite(seed: u64, max_side: usize) -> (Graph, Bipartition) {
        let mut r = rng::seeded(seed);
        let a = 1 + rng::below(&mut r, max_side);
        let b = 1 + rng::below(&mut r, max_side);
        let mut edges = Vec::new();
        for u in 0..a {
            for v in a..a + b {
                if rng::below(&mut r, 100) < 40 {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::new(a + b, &edges).unwrap();
        let bip = Bipartition::split_at(&g, a).unwrap();
        (g, bip)
    }

    /// Spec property: disjointness, exact cover, matching classes and spread
    /// at most one, on a sweep of random bipartite graphs.
    #[test]
    fn konig_random_sweep() {
        for seed in 0..120u64 {
            let (g, bip) = random_bipartite(seed, 20);
            let width = g.max_degree() + (seed % 3) as usize;
            if width == 0 {
                continue;
            }
            let classes = konig_decomposition(&g, &bip, Some(width)).unwrap();
            check_decomposition(&g, &classes, width);
        }
    }

    /// Brute-force maximum matching by subset search (reference oracle).
    fn exhaustive_max_matching(g: &Graph) -> usize {
        let m = g.edge_count();
        assert!(m <= 14);
        let mut best = 0;
        for mask in 0u32..(1 << m) {
            let mut used = VertexSet::new(g.n());
            let mut ok = true;
            let mut size = 0;
            for e in 0..m {
                if mask & (1 << e) != 0 {
                    let (u, v) = g.endpoints(e);
                    if !used.insert(u) || !used.insert(v) {
                        ok = false;
                        break;
                    }
                    size += 1;
                }
            }
            if ok {
                best = best.max(size);
            }
        }
        best
    }

    #[test]
    fn hopcroft_karp_matches_exhaustive() {
        let mut checked = 0;
        for seed in 0..200u64 {
            let (g, bip) = random_bipartite(seed, 5);
            if g.edge_count() > 12 {
                continue;
            }
            checked += 1;
            assert_eq!(max_matching(&g, &bip).len(), exhaustive_max_matching(&g));
        }
        assert!(checked > 50);
    }

    #[test]
    fn regular_gives_perfect_matching() {
        // d-regular balanced bipartite with r = 0: bound equals n
        let (g, bip) = complete_bipartite(4, 4);
        let m = large_matching_almost_regular(&g, &bip, 4, 0).unwrap();
        assert_eq!(m.len(), 4);
    }

    #[test]
    fn almost_regular_bound_example() {
        // n = 10 per side, degrees 6 +- 1 -> bound ceil(10 - 20/7) = 8
        assert_eq!(matching_bound(10, 6, 1), 8);
        assert_eq!(matching_bound(5, 3, 0), 5);
    }

    #[test]
    fn perfect_matching_small_cases() {
        let g = Graph::complete(6);
        let m = perfect_matching_small(&g, 1).unwrap();
        assert_eq!(m.len(), 3);
        // odd cycle has no perfect matching
        let c5 = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        assert!(perfect_matching_small(&c5, 1).is_none());
        // even cycle does
        let c6 = Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]).unwrap();
        assert_eq!(perfect_matching_small(&c6, 3).unwrap().len(), 3);
    }
}
