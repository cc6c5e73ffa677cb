//! Maximal clique enumeration (Bron–Kerbosch with Tomita pivoting).
//!
//! Vertices are dense indices `0..n`; adjacency lists must be sorted,
//! symmetric and free of self-loops.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CliqueCapExceeded {
    pub cap: usize,
}

/// Every maximal clique with at least `min_size` vertices. Each clique is
/// sorted; the list is sorted lexicographically.
pub fn maximal_cliques(adjacency: &[Vec<usize>], min_size: usize) -> Vec<Vec<usize>> {
    maximal_cliques_capped(adjacency, min_size, usize::MAX).expect("uncapped")
}

/// As [`maximal_cliques`], failing once more than `cap` qualifying cliques
/// have been found.
pub fn maximal_cliques_capped(
    adjacency: &[Vec<usize>],
    min_size: usize,
    cap: usize,
) -> Result<Vec<Vec<usize>>, CliqueCapExceeded> {
    let found = AtomicUsize::new(0);
    let aborted = AtomicBool::new(false);

    // Outer level: each vertex v with its later neighbours as candidates and
    // its earlier neighbours as exclusions. Every maximal clique is reported
    // exactly once, from its smallest vertex.
    let per_vertex: Vec<Vec<Vec<usize>>> = (0..adjacency.len())
        .into_par_iter()
        .map(|v| {
            if aborted.load(Ordering::Relaxed) {
                return Vec::new();
            }
            let neighbours = &adjacency[v];
            let split = neighbours.partition_point(|&u| u < v);
            let x = neighbours[..split].to_vec();
            let p = neighbours[split..].to_vec();
            let mut search = Search {
                adjacency,
                min_size,
                cap,
                found: &found,
                aborted: &aborted,
                out: Vec::new(),
            };
            let mut r = vec![v];
            search.expand(&mut r, p, x);
            search.out
        })
        .collect();

    if aborted.load(Ordering::Relaxed) {
        return Err(CliqueCapExceeded { cap });
    }
    let mut cliques: Vec<Vec<usize>> = per_vertex.into_iter().flatten().collect();
    cliques.sort_unstable();
    Ok(cliques)
}

struct Search<'a> {
    adjacency: &'a [Vec<usize>],
    min_size: usize,
    cap: usize,
    found: &'a AtomicUsize,
    aborted: &'a AtomicBool,
    out: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn expand(&mut self, r: &mut Vec<usize>, mut p: Vec<usize>, mut x: Vec<usize>) {
        if self.aborted.load(Ordering::Relaxed) {
            return;
        }
        if p.is_empty() {
            if x.is_empty() && r.len() >= self.min_size {
                if self.found.fetch_add(1, Ordering::Relaxed) >= self.cap {
                    self.aborted.store(true, Ordering::Relaxed);
                    return;
                }
                let mut clique = r.clone();
                clique.sort_unstable();
                self.out.push(clique);
            }
            return;
        }
        // Cannot reach min_size along this branch.
        if r.len() + p.len() < self.min_size {
            return;
        }

        let pivot = p
            .iter()
            .chain(x.iter())
            .copied()
            .max_by_key(|&u| (intersection_len(&p, &self.adjacency[u]), std::cmp::Reverse(u)))
            .expect("p is non-empty");
        let branches: Vec<usize> = difference(&p, &self.adjacency[pivot]);

        for v in branches {
            let nv = &self.adjacency[v];
            let next_p = intersection(&p, nv);
            let next_x = intersection(&x, nv);
            r.push(v);
            self.expand(r, next_p, next_x);
            r.pop();
            remove_sorted(&mut p, v);
            insert_sorted(&mut x, v);
        }
    }
}

fn intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|v| b.binary_search(v).is_err()).collect()
}

fn remove_sorted(v: &mut Vec<usize>, x: usize) {
    if let Ok(i) = v.binary_search(&x) {
        v.remove(i);
    }
}

fn insert_sorted(v: &mut Vec<usize>, x: usize) {
    if let Err(i) = v.binary_search(&x) {
        v.insert(i, x);
    }
}


#[cfg(test)]
mod tests {
    use super::oracle::brute_force_maximal_cliques;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn from_edges(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    #[test]
    fn small_example() {
        // 0 - 2 - 3, 0 - 1 - 2, 4 isolated
        let adj = from_edges(5, &[(0, 1), (0, 2), (1, 2), (2, 3)]);
        assert_eq!(maximal_cliques(&adj, 1), vec![vec![0, 1, 2], vec![2, 3], vec![4]]);
        assert_eq!(maximal_cliques(&adj, 2), vec![vec![0, 1, 2], vec![2, 3]]);
        assert_eq!(maximal_cliques(&adj, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn empty_graph() {
        assert!(maximal_cliques(&[], 1).is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        // A perfect matching on 20 vertices has 10 maximal cliques.
        let edges: Vec<_> = (0..10).map(|i| (2 * i, 2 * i + 1)).collect();
        let adj = from_edges(20, &edges);
        assert_eq!(maximal_cliques_capped(&adj, 2, 10).unwrap().len(), 10);
        assert_eq!(maximal_cliques_capped(&adj, 2, 9), Err(CliqueCapExceeded { cap: 9 }));
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let n = rng.gen_range(1..=12);
            let density: f64 = rng.gen_range(0.1..0.9);
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(density) {
                        edges.push((a, b));
                    }
                }
            }
            let adj = from_edges(n, &edges);
            for min_size in [1, 2, 3] {
                assert_eq!(
                    maximal_cliques(&adj, min_size),
                    brute_force_maximal_cliques(&adj, min_size),
                    "n={n} edges={edges:?}"
                );
            }
        }
    }
}
