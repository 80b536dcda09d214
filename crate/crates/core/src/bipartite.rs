//! Augmenting-path bipartite matching on small incidence graphs.
//!
//! Left vertices are items (edges to be colored), right vertices are colors.

#[derive(Clone, Debug)]
pub struct BipartiteMatcher {
    /// adj[l] = right vertices adjacent to left vertex l
    adj: Vec<Vec<usize>>,
    /// match_right[r] = left vertex matched to r, if any
    match_right: Vec<Option<usize>>,
    /// match_left[l] = right vertex matched to l, if any
    match_left: Vec<Option<usize>>,
    num_right: usize,
}

impl BipartiteMatcher {
    pub fn new(num_right: usize) -> Self {
        BipartiteMatcher {
            adj: Vec::new(),
            match_right: vec![None; num_right],
            match_left: Vec::new(),
            num_right,
        }
    }

    /// Add a left vertex with the given neighborhood and try to match it.
    /// Returns true if the matching grew to cover the new vertex.
    pub fn push_left(&mut self, neighbors: Vec<usize>) -> bool {
        debug_assert!(neighbors.iter().all(|&r| r < self.num_right));
        let l = self.adj.len();
        self.adj.push(neighbors);
        self.match_left.push(None);
        let mut seen = vec![false; self.num_right];
        self.try_augment(l, &mut seen)
    }

    /// Remove the most recently added left vertex, releasing its match.
    pub fn pop_left(&mut self) {
        let l = self.adj.len() - 1;
        if let Some(r) = self.match_left[l] {
            self.match_right[r] = None;
        }
        self.adj.pop();
        self.match_left.pop();
    }

    /// Number of matched left vertices.
    pub fn size(&self) -> usize {
        self.match_left.iter().filter(|m| m.is_some()).count()
    }

    pub fn is_perfect(&self) -> bool {
        self.match_left.iter().all(|m| m.is_some())
    }

    pub fn assignment(&self) -> Vec<Option<usize>> {
        self.match_left.clone()
    }

    fn try_augment(&mut self, l: usize, seen: &mut [bool]) -> bool {
        for i in 0..self.adj[l].len() {
            let r = self.adj[l][i];
            if seen[r] {
                continue;
            }
            seen[r] = true;
            let occupant = self.match_right[r];
            let free = match occupant {
                None => true,
                Some(l2) => self.try_augment(l2, seen),
            };
            if free {
                self.match_right[r] = Some(l);
                self.match_left[l] = Some(r);
                return true;
            }
        }
        false
    }
}

/// Maximum matching size of the bipartite graph `adj` (left adjacency lists),
/// by exhaustive augmenting from every left vertex.
pub fn maximum_matching(adj: &[Vec<usize>], num_right: usize) -> Vec<Option<usize>> {
    let mut m = BipartiteMatcher::new(num_right);
    for nb in adj {
        m.push_left(nb.clone());
    }
    m.assignment()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force maximum matching by trying all assignments.
    fn brute_max(adj: &[Vec<usize>], num_right: usize) -> usize {
        fn go(adj: &[Vec<usize>], l: usize, used: &mut Vec<bool>) -> usize {
            if l == adj.len() {
                return 0;
            }
            let mut best = go(adj, l + 1, used);
            for &r in &adj[l] {
                if !used[r] {
                    used[r] = true;
                    best = best.max(1 + go(adj, l + 1, used));
                    used[r] = false;
                }
            }
            best
        }
        go(adj, 0, &mut vec![false; num_right])
    }

    #[test]
    fn incremental_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let nl = rng.gen_range(0..=8);
            let nr = rng.gen_range(1..=8);
            let adj: Vec<Vec<usize>> = (0..nl)
                .map(|_| (0..nr).filter(|_| rng.gen_bool(0.3)).collect())
                .collect();
            let got = maximum_matching(&adj, nr)
                .iter()
                .filter(|m| m.is_some())
                .count();
            assert_eq!(got, brute_max(&adj, nr));
        }
    }

    #[test]
    fn pop_left_restores_state() {
        let mut m = BipartiteMatcher::new(2);
        assert!(m.push_left(vec![0]));
        assert!(m.push_left(vec![0, 1]));
        assert!(!m.push_left(vec![0, 1]));
        m.pop_left();
        assert!(m.is_perfect());
        assert_eq!(m.size(), 2);
    }
}
