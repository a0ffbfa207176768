//! Min-cost flow by successive shortest paths (Dijkstra with node
//! potentials) on a real-capacity residual graph.
//!
//! Every augmentation either exhausts the remaining demand or saturates an
//! edge exactly (the bottleneck is subtracted from itself), so termination
//! does not depend on floating-point leftovers. Residual capacities at or
//! below `cap_eps` count as saturated.

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: f64,
    cost: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct MinCostFlow {
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

impl MinCostFlow {
    pub fn new(nodes: usize) -> Self {
        MinCostFlow { adj: vec![Vec::new(); nodes], edges: Vec::new() }
    }

    /// Adds `u -> v` with capacity `cap` (may be infinite) and cost `cost >= 0`.
    /// Returns the edge id for [`MinCostFlow::flow`].
    pub fn add_edge(&mut self, u: usize, v: usize, cap: f64, cost: f64) -> usize {
        debug_assert!(cost >= 0.0);
        let id = self.edges.len();
        self.edges.push(Edge { to: v, cap, cost });
        self.edges.push(Edge { to: u, cap: 0.0, cost: -cost });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    /// Flow currently on edge `id`.
    pub fn flow(&self, id: usize) -> f64 {
        self.edges[id ^ 1].cap
    }

    /// Sends up to `demand` units from `s` to `t` at minimum cost. Returns the
    /// amount sent.
    pub fn run(&mut self, s: usize, t: usize, demand: f64, cap_eps: f64) -> f64 {
        let n = self.adj.len();
        let mut potential = vec![0.0f64; n];
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![usize::MAX; n];
        let mut done = vec![false; n];
        let mut sent = 0.0;
        while demand - sent > cap_eps {
            dist.fill(f64::INFINITY);
            prev.fill(usize::MAX);
            done.fill(false);
            dist[s] = 0.0;
            // dense Dijkstra: graphs here are small and nearly complete
            loop {
                let mut u = usize::MAX;
                let mut best = f64::INFINITY;
                for v in 0..n {
                    if !done[v] && dist[v] < best {
                        best = dist[v];
                        u = v;
                    }
                }
                if u == usize::MAX {
                    break;
                }
                done[u] = true;
                for &e in &self.adj[u] {
                    let edge = &self.edges[e];
                    if edge.cap <= cap_eps || done[edge.to] {
                        continue;
                    }
                    let reduced = (edge.cost + potential[u] - potential[edge.to]).max(0.0);
                    let cand = best + reduced;
                    if cand < dist[edge.to] {
                        dist[edge.to] = cand;
                        prev[edge.to] = e;
                    }
                }
            }
            if !dist[t].is_finite() {
                break;
            }
            for v in 0..n {
                if dist[v].is_finite() {
                    potential[v] += dist[v];
                }
            }
            let mut push = demand - sent;
            let mut v = t;
            while v != s {
                let e = prev[v];
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let e = prev[v];
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                v = self.edges[e ^ 1].to;
            }
            sent += push;
        }
        sent
    }
}
