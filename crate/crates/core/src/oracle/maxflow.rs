use std::collections::VecDeque;

/// Edmonds-Karp on an adjacency matrix of residual capacities.
pub(crate) struct FlowNetwork {
    cap: Vec<Vec<u64>>,
}

impl FlowNetwork {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            cap: vec![vec![0; n]; n],
        }
    }

    pub(crate) fn add_edge(&mut self, from: usize, to: usize, c: u64) {
        self.cap[from][to] += c;
    }

    pub(crate) fn max_flow(mut self, source: usize, sink: usize) -> u64 {
        let n = self.cap.len();
        let mut total = 0u64;
        loop {
            let mut prev = vec![usize::MAX; n];
            prev[source] = source;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                for v in 0..n {
                    if prev[v] == usize::MAX && self.cap[u][v] > 0 {
                        prev[v] = u;
                        queue.push_back(v);
                    }
                }
            }
            if prev[sink] == usize::MAX {
                return total;
            }
            let mut push = u64::MAX;
            let mut v = sink;
            while v != source {
                push = push.min(self.cap[prev[v]][v]);
                v = prev[v];
            }
            let mut v = sink;
            while v != source {
                let u = prev[v];
                self.cap[u][v] -= push;
                self.cap[v][u] += push;
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
    fn textbook_network() {
        // 0 -> {1, 2} -> 3 with a cross edge 1 -> 2
        let mut f = FlowNetwork::new(4);
        f.add_edge(0, 1, 3);
        f.add_edge(0, 2, 2);
        f.add_edge(1, 2, 1);
        f.add_edge(1, 3, 2);
        f.add_edge(2, 3, 3);
        assert_eq!(f.max_flow(0, 3), 5);
    }
}
