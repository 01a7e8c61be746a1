//! Max-flow on a small dense graph (Edmonds-Karp). Node counts here are
//! at most a dozen or so, so an adjacency matrix is fine.

use std::collections::VecDeque;

pub(crate) struct FlowNetwork {
    n: usize,
    cap: Vec<f64>,
    flow: Vec<f64>,
}

const EPS: f64 = 1e-15;

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork {
            n,
            cap: vec![0.0; n * n],
            flow: vec![0.0; n * n],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, capacity: f64) {
        self.cap[from * self.n + to] += capacity;
    }

    pub fn flow(&self, from: usize, to: usize) -> f64 {
        self.flow[from * self.n + to]
    }

    fn residual(&self, u: usize, v: usize) -> f64 {
        self.cap[u * self.n + v] - self.flow[u * self.n + v]
    }

    pub fn max_flow(&mut self, source: usize, sink: usize) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        loop {
            let mut parent = vec![usize::MAX; n];
            parent[source] = source;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for v in 0..n {
                    if parent[v] == usize::MAX && self.residual(u, v) > EPS {
                        parent[v] = u;
                        queue.push_back(v);
                    }
                }
            }
            if parent[sink] == usize::MAX {
                return total;
            }
            let mut push = f64::INFINITY;
            let mut v = sink;
            while v != source {
                let u = parent[v];
                push = push.min(self.residual(u, v));
                v = u;
            }
            let mut v = sink;
            while v != source {
                let u = parent[v];
                self.flow[u * n + v] += push;
                self.flow[v * n + u] -= push;
                v = u;
            }
            total += push;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bipartite_transport() {
        // source 0, agents 1-2, goods 3-4, sink 5
        let mut g = FlowNetwork::new(6);
        g.add_edge(0, 1, 0.5);
        g.add_edge(0, 2, 0.5);
        g.add_edge(1, 3, f64::INFINITY);
        g.add_edge(2, 3, f64::INFINITY);
        g.add_edge(2, 4, f64::INFINITY);
        g.add_edge(3, 5, 0.3);
        g.add_edge(4, 5, 0.7);
        let f = g.max_flow(0, 5);
        assert!((f - 0.8).abs() < 1e-15);
        assert!((g.flow(2, 4) - 0.5).abs() < 1e-15);
    }
}
