//! Dinic max-flow on unit-ish capacities; used for exact degree-constrained
//! subgraph extraction.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug)]
struct Arc {
    to: u32,
    cap: u32,
}

/// Max-flow network. Arcs are added in pairs (forward + residual).
pub struct Dinic {
    arcs: Vec<Arc>,
    head: Vec<Vec<u32>>,
    level: Vec<i32>,
    iter: Vec<u32>,
}

impl Dinic {
    pub fn new(nodes: usize) -> Self {
        Dinic {
            arcs: Vec::new(),
            head: vec![Vec::new(); nodes],
            level: vec![0; nodes],
            iter: vec![0; nodes],
        }
    }

    /// Adds a directed arc and returns its index (flow is read back from it).
    pub fn add_arc(&mut self, from: usize, to: usize, cap: u32) -> usize {
        let idx = self.arcs.len();
        self.head[from].push(idx as u32);
        self.arcs.push(Arc { to: to as u32, cap });
        self.head[to].push(idx as u32 + 1);
        self.arcs.push(Arc {
            to: from as u32,
            cap: 0,
        });
        idx
    }

    /// Flow pushed through the arc returned by [`Self::add_arc`].
    pub fn flow_on(&self, arc: usize) -> u32 {
        self.arcs[arc + 1].cap
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut flow = 0u64;
        while self.bfs(s, t) {
            self.iter.fill(0);
            loop {
                let pushed = self.dfs(s, t, u32::MAX);
                if pushed == 0 {
                    break;
                }
                flow += pushed as u64;
            }
        }
        flow
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(-1);
        self.level[s] = 0;
        let mut queue = alloc::collections::VecDeque::new();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &ai in &self.head[v] {
                let a = &self.arcs[ai as usize];
                if a.cap > 0 && self.level[a.to as usize] < 0 {
                    self.level[a.to as usize] = self.level[v] + 1;
                    queue.push_back(a.to as usize);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, v: usize, t: usize, limit: u32) -> u32 {
        if v == t {
            return limit;
        }
        while (self.iter[v] as usize) < self.head[v].len() {
            let ai = self.head[v][self.iter[v] as usize] as usize;
            let (to, cap) = (self.arcs[ai].to as usize, self.arcs[ai].cap);
            if cap > 0 && self.level[to] == self.level[v] + 1 {
                let pushed = self.dfs(to, t, limit.min(cap));
                if pushed > 0 {
                    self.arcs[ai].cap -= pushed;
                    self.arcs[ai ^ 1].cap += pushed;
                    return pushed;
                }
            }
            self.iter[v] += 1;
        }
        self.level[v] = -2; // dead end for this phase
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_network() {
        // s -> a -> t and s -> b -> t, plus a cross arc
        let mut d = Dinic::new(4);
        let sa = d.add_arc(0, 1, 2);
        d.add_arc(0, 2, 1);
        d.add_arc(1, 2, 1);
        let at = d.add_arc(1, 3, 1);
        d.add_arc(2, 3, 2);
        assert_eq!(d.max_flow(0, 3), 3);
        assert_eq!(d.flow_on(sa), 2);
        assert_eq!(d.flow_on(at), 1);
    }

    #[test]
    fn disconnected_t() {
        let mut d = Dinic::new(3);
        d.add_arc(0, 1, 5);
        assert_eq!(d.max_flow(0, 2), 0);
    }
}
