use std::collections::VecDeque;

use super::BucketInput;
use crate::hashing::cell_of;

const NIL: u32 = u32::MAX;

/// Bipartite graph in compressed adjacency form: left vertices are keys,
/// right vertices are table cells.
#[derive(Debug, Clone, Default)]
pub struct BipartiteGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    right: usize,
}

impl BipartiteGraph {
    pub fn new(right: usize) -> Self {
        Self {
            offsets: vec![0],
            targets: Vec::new(),
            right,
        }
    }

    /// Adds a left vertex with the given neighbours.
    pub fn push_left<I: IntoIterator<Item = u32>>(&mut self, neighbours: I) {
        for t in neighbours {
            debug_assert!((t as usize) < self.right);
            self.targets.push(t);
        }
        self.offsets.push(self.targets.len());
    }

    pub fn left(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn right(&self) -> usize {
        self.right
    }

    #[inline]
    fn neighbours(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }
}

/// Maximum matching by Hopcroft-Karp. Returns the matched right vertex of
/// every left vertex (`None` when unmatched).
pub fn hopcroft_karp(g: &BipartiteGraph) -> Vec<Option<u32>> {
    let nl = g.left();
    let mut match_left = vec![NIL; nl];
    let mut match_right = vec![NIL; g.right()];
    let mut dist = vec![u32::MAX; nl];
    let mut queue = VecDeque::new();
    let mut next_edge = vec![0usize; nl];
    let mut stack: Vec<u32> = Vec::new();

    // greedy start
    for u in 0..nl {
        if let Some(&v) = g
            .neighbours(u)
            .iter()
            .find(|&&v| match_right[v as usize] == NIL)
        {
            match_left[u] = v;
            match_right[v as usize] = u as u32;
        }
    }

    loop {
        // layered BFS from free left vertices
        queue.clear();
        for u in 0..nl {
            if match_left[u] == NIL {
                dist[u] = 0;
                queue.push_back(u as u32);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbours(u as usize) {
                let w = match_right[v as usize];
                if w == NIL {
                    found = true;
                } else if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }

        // vertex-disjoint augmenting paths along the layers, iterative DFS
        next_edge
            .iter_mut()
            .enumerate()
            .for_each(|(u, e)| *e = g.offsets[u]);
        for root in 0..nl {
            if match_left[root] != NIL {
                continue;
            }
            stack.clear();
            stack.push(root as u32);
            while let Some(&u) = stack.last() {
                let u = u as usize;
                let end = g.offsets[u + 1];
                let mut advanced = false;
                while next_edge[u] < end {
                    let v = g.targets[next_edge[u]];
                    let w = match_right[v as usize];
                    if w == NIL {
                        // augment along the stack
                        let mut v = v;
                        for &x in stack.iter().rev() {
                            let prev = match_left[x as usize];
                            match_left[x as usize] = v;
                            match_right[v as usize] = x;
                            v = prev;
                        }
                        stack.clear();
                        advanced = true;
                        break;
                    }
                    if dist[w as usize] == dist[u] + 1 {
                        next_edge[u] += 1;
                        stack.push(w);
                        advanced = true;
                        break;
                    }
                    next_edge[u] += 1;
                }
                if !advanced {
                    dist[u] = u32::MAX;
                    stack.pop();
                }
            }
        }
    }
    match_left
        .into_iter()
        .map(|v| (v != NIL).then_some(v))
        .collect()
}

/// Static feasibility check of a bucket at a fixed seed. Returns one valid
/// assignment of function indices when all entries can be placed.
pub fn matching_oracle(input: &BucketInput, seed: u64) -> Option<Vec<u8>> {
    let mut g = BipartiteGraph::new(input.m as usize);
    for &(h, class) in input.entries {
        g.push_left((0..class.degree()).map(|f| cell_of(h, seed, f, input.m) as u32));
    }
    let matching = hopcroft_karp(&g);
    input
        .entries
        .iter()
        .zip(matching)
        .map(|(&(h, class), cell)| {
            let cell = cell? as u64;
            (0..class.degree())
                .find(|&f| cell_of(h, seed, f, input.m) == cell)
                .map(|f| f as u8)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuckoo::placement_is_valid;
    use crate::hashing::{KeyClass, MasterHash};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Exhaustive maximum matching size for tiny graphs.
    fn brute_force_max(adj: &[Vec<u32>], right: usize) -> usize {
        fn go(u: usize, adj: &[Vec<u32>], used: &mut Vec<bool>) -> usize {
            if u == adj.len() {
                return 0;
            }
            let mut best = go(u + 1, adj, used);
            for &v in &adj[u] {
                if !used[v as usize] {
                    used[v as usize] = true;
                    best = best.max(1 + go(u + 1, adj, used));
                    used[v as usize] = false;
                }
            }
            best
        }
        go(0, adj, &mut vec![false; right])
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let left = rng.gen_range(0..8);
            let right = rng.gen_range(1..8);
            let adj: Vec<Vec<u32>> = (0..left)
                .map(|_| {
                    (0..rng.gen_range(0..4))
                        .map(|_| rng.gen_range(0..right as u32))
                        .collect()
                })
                .collect();
            let mut g = BipartiteGraph::new(right);
            for a in &adj {
                g.push_left(a.iter().copied());
            }
            let m = hopcroft_karp(&g);
            let size = m.iter().flatten().count();
            assert_eq!(size, brute_force_max(&adj, right));
            let mut used = vec![false; right];
            for (u, v) in m.iter().enumerate() {
                if let Some(v) = v {
                    assert!(adj[u].contains(v));
                    assert!(!std::mem::replace(&mut used[*v as usize], true));
                }
            }
        }
    }

    #[test]
    fn oracle_small_cases() {
        let one = [(MasterHash::new(1, 2), KeyClass::C2)];
        assert_eq!(
            matching_oracle(
                &BucketInput {
                    entries: &one,
                    m: 1
                },
                0
            ),
            Some(vec![0])
        );
        let two = [
            (MasterHash::new(1, 2), KeyClass::C2),
            (MasterHash::new(3, 4), KeyClass::C8),
        ];
        assert_eq!(
            matching_oracle(
                &BucketInput {
                    entries: &two,
                    m: 1
                },
                0
            ),
            None
        );
    }

    #[test]
    fn oracle_assignments_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let entries: Vec<_> = (0..100)
                .map(|_| (MasterHash::new(rng.gen(), rng.gen()), KeyClass::C4))
                .collect();
            let input = BucketInput {
                entries: &entries,
                m: 102,
            };
            if let Some(a) = matching_oracle(&input, 0) {
                assert!(placement_is_valid(&input, 0, &a));
            }
        }
    }
}
