//! Maximum bipartite matching by shortest augmenting paths in phases
//! (Hopcroft–Karp).

use std::collections::VecDeque;

const NONE: usize = usize::MAX;
const INF: usize = usize::MAX;

/// Maximum matching between `0..left` and `0..right`, where `adj[l]` lists
/// the right neighbours of `l`. Returns the partner of every left vertex.
pub fn maximum_matching(left: usize, right: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let mut mate_l = vec![NONE; left];
    let mut mate_r = vec![NONE; right];
    let mut dist = vec![INF; left];
    loop {
        // Layer the graph from free left vertices.
        let mut queue = VecDeque::new();
        for l in 0..left {
            if mate_l[l] == NONE {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = INF;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let m = mate_r[r];
                if m == NONE {
                    found = true;
                } else if dist[m] == INF {
                    dist[m] = dist[l] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            break;
        }
        // Vertex-disjoint augmenting paths along the layers, iteratively.
        let mut next = vec![0usize; left];
        for start in 0..left {
            if mate_l[start] != NONE {
                continue;
            }
            let mut stack = vec![start];
            while let Some(&l) = stack.last() {
                if next[l] == adj[l].len() {
                    dist[l] = INF;
                    stack.pop();
                    continue;
                }
                let r = adj[l][next[l]];
                next[l] += 1;
                let m = mate_r[r];
                if m == NONE {
                    // Flip the path held on the stack.
                    let mut r = r;
                    while let Some(l) = stack.pop() {
                        let prev = mate_l[l];
                        mate_l[l] = r;
                        mate_r[r] = l;
                        r = prev;
                    }
                    break;
                } else if dist[m] == dist[l] + 1 {
                    stack.push(m);
                }
            }
        }
    }
    mate_l.into_iter().map(|r| (r != NONE).then_some(r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive maximum matching size for tiny graphs.
    fn brute(left: usize, right: usize, adj: &[Vec<usize>]) -> usize {
        fn go(l: usize, used: &mut Vec<bool>, adj: &[Vec<usize>]) -> usize {
            if l == adj.len() {
                return 0;
            }
            let mut best = go(l + 1, used, adj);
            for &r in &adj[l] {
                if !used[r] {
                    used[r] = true;
                    best = best.max(1 + go(l + 1, used, adj));
                    used[r] = false;
                }
            }
            best
        }
        let _ = left;
        go(0, &mut vec![false; right], adj)
    }

    fn check(left: usize, right: usize, adj: &[Vec<usize>]) -> usize {
        let m = maximum_matching(left, right, adj);
        let mut used = vec![false; right];
        for (l, r) in m.iter().enumerate() {
            if let Some(r) = *r {
                assert!(adj[l].contains(&r));
                assert!(!used[r]);
                used[r] = true;
            }
        }
        m.iter().flatten().count()
    }

    #[test]
    fn forced_augmentation() {
        let adj = vec![vec![0, 1], vec![0]];
        let m = maximum_matching(2, 2, &adj);
        assert_eq!(m, vec![Some(1), Some(0)]);
    }

    #[test]
    fn empty_graph() {
        assert!(maximum_matching(0, 0, &[]).is_empty());
        assert_eq!(maximum_matching(2, 1, &[vec![], vec![]]), vec![None, None]);
    }

    #[test]
    fn agrees_with_exhaustive_search() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let left = rng.gen_range(0..7);
            let right = rng.gen_range(0..7);
            let adj: Vec<Vec<usize>> = (0..left)
                .map(|_| (0..right).filter(|_| rng.gen_bool(0.35)).collect())
                .collect();
            assert_eq!(check(left, right, &adj), brute(left, right, &adj));
        }
    }
}
