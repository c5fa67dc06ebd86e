//! Union-find over graph vertices.

pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Connected components of an undirected adjacency matrix.
///
/// Each component is sorted; components are ordered by smallest vertex.
pub fn connected_components(adjacency: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = adjacency.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if adjacency[i][j] {
                uf.union(i, j);
            }
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let r = uf.find(v);
        if slot[r] == usize::MAX {
            slot[r] = out.len();
            out.push(Vec::new());
        }
        out[slot[r]].push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reachable(adj: &[Vec<bool>], from: usize) -> Vec<bool> {
        let mut seen = vec![false; adj.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for w in 0..adj.len() {
                if adj[v][w] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    #[test]
    fn isolated_and_joined() {
        let adj = vec![vec![false, false, true], vec![false, false, false], vec![true, false, false]];
        assert_eq!(connected_components(&adj), vec![vec![0, 2], vec![1]]);
        assert!(connected_components(&[]).is_empty());
    }

    proptest! {
        #[test]
        fn matches_graph_search(n in 1usize..9, bits in proptest::collection::vec(any::<bool>(), 64)) {
            let mut adj = vec![vec![false; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    adj[i][j] = bits[i * 8 + j];
                    adj[j][i] = adj[i][j];
                }
            }
            let comps = connected_components(&adj);
            for c in &comps {
                let seen = reachable(&adj, c[0]);
                let expected: Vec<usize> = (0..n).filter(|&v| seen[v]).collect();
                prop_assert_eq!(c, &expected);
            }
            prop_assert_eq!(comps.iter().map(Vec::len).sum::<usize>(), n);
        }
    }
}
