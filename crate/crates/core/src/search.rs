//! Ground-truth exhaustive search: rainbow-matching search, the strong
//! property check, and exact small-parameter value search.
//!
//! The rainbow search runs over the deduplicated edge pool and keeps an
//! incremental edge-to-color bipartite matching, so identical matchings never
//! get distinguished (color symmetry) and a partial selection is abandoned as
//! soon as no system of distinct colors can cover it. On perfect families
//! (`s * r` equal to the vertex count) the DFS branches on the lowest
//! uncovered vertex instead of scanning edges lexicographically.

use std::time::Instant;

use serde::Serialize;

use crate::bipartite::BipartiteMatcher;
use crate::instance::{validate_instance, Edge, Instance, RainbowCertificate};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    /// DFS node cap.
    pub max_nodes: u64,
    /// Wall-clock cap in milliseconds.
    pub max_millis: u64,
    /// Worker count; results are deterministic single-threaded.
    pub threads: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 500_000_000,
            max_millis: 600_000,
            threads: 1,
        }
    }
}

impl SearchBudget {
    pub fn with_nodes(max_nodes: u64) -> Self {
        SearchBudget {
            max_nodes,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub enum SearchStatus {
    Found(RainbowCertificate),
    NoneExists,
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub nodes_visited: u64,
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&RainbowCertificate> {
        match &self.status {
            SearchStatus::Found(c) => Some(c),
            _ => None,
        }
    }

    pub fn none_exists(&self) -> bool {
        matches!(self.status, SearchStatus::NoneExists)
    }
}

#[derive(Clone, Debug)]
pub enum StrongOutcome {
    Holds,
    /// Violating picks: pairwise disjoint edges from not-all-equal colors.
    Fails(Vec<(usize, Edge)>),
    Indeterminate,
}

impl StrongOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, StrongOutcome::Holds)
    }
}

/// Arbitrary-width bitset over vertex indices.
#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn zero(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn intersects(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }

    fn xor_with(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    fn from_edge(e: &Edge, n: usize) -> Self {
        let mut b = Bits::zero(n);
        for &v in e.verts() {
            b.set(v as usize);
        }
        b
    }
}

struct PoolEdge {
    edge: Edge,
    colors: Vec<usize>,
    bits: Bits,
}

struct Ticker {
    start: Instant,
    nodes: u64,
    max_nodes: u64,
    max_millis: u64,
    over: bool,
}

impl Ticker {
    fn new(budget: &SearchBudget) -> Self {
        Ticker {
            start: Instant::now(),
            nodes: 0,
            max_nodes: budget.max_nodes,
            max_millis: budget.max_millis,
            over: false,
        }
    }

    /// Count a node; returns false once the budget is exhausted.
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.over = true;
        } else if self.nodes % 4096 == 0
            && self.start.elapsed().as_millis() as u64 > self.max_millis
        {
            self.over = true;
        }
        !self.over
    }
}

fn build_pool(inst: &Instance) -> Vec<PoolEdge> {
    let n = inst.num_vertices as usize;
    inst.edge_pool()
        .into_iter()
        .map(|(edge, colors)| {
            let bits = Bits::from_edge(&edge, n);
            PoolEdge { edge, colors, bits }
        })
        .collect()
}

struct RainbowDfs<'a> {
    pool: &'a [PoolEdge],
    edges_by_vertex: Vec<Vec<usize>>,
    s: usize,
    ticker: Ticker,
}

impl RainbowDfs<'_> {
    /// Returns pool indices of a valid selection, or None.
    fn run(
        &mut self,
        perfect: bool,
        num_vertices: usize,
        matcher: &mut BipartiteMatcher,
    ) -> Option<Vec<usize>> {
        let mut chosen = Vec::new();
        let mut covered = Bits::zero(num_vertices);
        if perfect {
            self.vertex_dfs(&mut chosen, &mut covered, matcher)
        } else {
            self.edge_dfs(0, &mut chosen, &mut covered, matcher)
        }
    }

    fn try_edge(
        &mut self,
        i: usize,
        chosen: &mut Vec<usize>,
        covered: &mut Bits,
        matcher: &mut BipartiteMatcher,
        recurse: impl FnOnce(&mut Self, &mut Vec<usize>, &mut Bits, &mut BipartiteMatcher) -> Option<Vec<usize>>,
    ) -> Option<Vec<usize>> {
        if covered.intersects(&self.pool[i].bits) {
            return None;
        }
        // a selection unservable by distinct colors now stays unservable
        if !matcher.push_left(self.pool[i].colors.clone()) {
            matcher.pop_left();
            return None;
        }
        covered.xor_with(&self.pool[i].bits);
        chosen.push(i);
        let res = recurse(self, chosen, covered, matcher);
        if res.is_none() {
            chosen.pop();
            covered.xor_with(&self.pool[i].bits);
            matcher.pop_left();
        }
        res
    }

    fn edge_dfs(
        &mut self,
        start: usize,
        chosen: &mut Vec<usize>,
        covered: &mut Bits,
        matcher: &mut BipartiteMatcher,
    ) -> Option<Vec<usize>> {
        if chosen.len() == self.s {
            return Some(chosen.clone());
        }
        let need = self.s - chosen.len();
        for i in start..self.pool.len() {
            if self.pool.len() - i < need {
                break;
            }
            if !self.ticker.tick() {
                return None;
            }
            let res = self.try_edge(i, chosen, covered, matcher, |me, c, cov, m| {
                me.edge_dfs(i + 1, c, cov, m)
            });
            if res.is_some() {
                return res;
            }
        }
        None
    }

    fn vertex_dfs(
        &mut self,
        chosen: &mut Vec<usize>,
        covered: &mut Bits,
        matcher: &mut BipartiteMatcher,
    ) -> Option<Vec<usize>> {
        if chosen.len() == self.s {
            return Some(chosen.clone());
        }
        let v = (0..self.edges_by_vertex.len()).find(|&v| !covered.get(v))?;
        for idx in 0..self.edges_by_vertex[v].len() {
            let i = self.edges_by_vertex[v][idx];
            if !self.ticker.tick() {
                return None;
            }
            let res = self.try_edge(i, chosen, covered, matcher, |me, c, cov, m| {
                me.vertex_dfs(c, cov, m)
            });
            if res.is_some() {
                return res;
            }
        }
        None
    }
}

/// Exhaustive search for a rainbow matching of size `s`.
///
/// `Found` certificates always verify; `NoneExists` means the search space
/// was exhausted within budget.
pub fn find_rainbow(inst: &Instance, s: usize, budget: &SearchBudget) -> Result<SearchOutcome> {
    let report = validate_instance(inst);
    if !report.ok() {
        return Err(Error::InvalidInstance(report.violations[0].to_string()));
    }
    if s < 1 || s > inst.t as usize {
        return Err(Error::Param(format!("s={s} not in 1..=t={}", inst.t)));
    }
    let mut ticker = Ticker::new(budget);
    ticker.tick();
    if inst.num_colors() < s {
        return Ok(SearchOutcome {
            status: SearchStatus::NoneExists,
            nodes_visited: ticker.nodes,
        });
    }
    let pool = build_pool(inst);
    let n = inst.num_vertices as usize;
    let mut edges_by_vertex = vec![Vec::new(); n];
    for (i, pe) in pool.iter().enumerate() {
        for &v in pe.edge.verts() {
            edges_by_vertex[v as usize].push(i);
        }
    }
    let perfect = s * inst.r as usize == n;
    let mut matcher = BipartiteMatcher::new(inst.num_colors());
    let mut dfs = RainbowDfs {
        pool: &pool,
        edges_by_vertex,
        s,
        ticker,
    };
    let found = dfs.run(perfect, n, &mut matcher);
    let nodes_visited = dfs.ticker.nodes;
    match found {
        Some(chosen) => {
            let assignment = matcher.assignment();
            let picks = chosen
                .iter()
                .enumerate()
                .map(|(slot, &i)| {
                    let color = assignment[slot].expect("matcher covered every chosen edge");
                    (color, pool[i].edge.clone())
                })
                .collect();
            let cert = RainbowCertificate { picks };
            debug_assert!(crate::instance::check_certificate(inst, &cert));
            Ok(SearchOutcome {
                status: SearchStatus::Found(cert),
                nodes_visited,
            })
        }
        None if dfs.ticker.over => Ok(SearchOutcome {
            status: SearchStatus::Indeterminate,
            nodes_visited,
        }),
        None => Ok(SearchOutcome {
            status: SearchStatus::NoneExists,
            nodes_visited,
        }),
    }
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
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

struct StrongDfs<'a> {
    pool: &'a [PoolEdge],
    edges_by_vertex: Vec<Vec<usize>>,
    t: usize,
    ticker: Ticker,
}

impl StrongDfs<'_> {
    /// Looks for `t` pairwise disjoint edges with no common color.
    fn dfs(
        &mut self,
        start: usize,
        perfect: bool,
        chosen: &mut Vec<usize>,
        covered: &mut Bits,
        common: &[usize],
    ) -> Option<Vec<usize>> {
        if chosen.len() == self.t {
            return if common.is_empty() {
                Some(chosen.clone())
            } else {
                None
            };
        }
        let candidates: Vec<usize> = if perfect {
            let v = (0..self.edges_by_vertex.len()).find(|&v| !covered.get(v))?;
            self.edges_by_vertex[v].clone()
        } else {
            (start..self.pool.len()).collect()
        };
        for i in candidates {
            if !self.ticker.tick() {
                return None;
            }
            if covered.intersects(&self.pool[i].bits) {
                continue;
            }
            let next_common = if chosen.is_empty() {
                self.pool[i].colors.clone()
            } else {
                intersect_sorted(common, &self.pool[i].colors)
            };
            covered.xor_with(&self.pool[i].bits);
            chosen.push(i);
            let res = self.dfs(i + 1, perfect, chosen, covered, &next_common);
            if res.is_some() {
                return res;
            }
            chosen.pop();
            covered.xor_with(&self.pool[i].bits);
        }
        None
    }
}

/// Check the strong property: any `t` pairwise-disjoint edges drawn from
/// matchings j_1..j_t force j_1 = ... = j_t. Equivalently, every set of `t`
/// pairwise-disjoint pool edges shares a common color.
pub fn check_strong_property(inst: &Instance, budget: &SearchBudget) -> Result<StrongOutcome> {
    let report = validate_instance(inst);
    if !report.ok() {
        return Err(Error::InvalidInstance(report.violations[0].to_string()));
    }
    if inst.num_colors() <= 1 {
        return Ok(StrongOutcome::Holds);
    }
    let pool = build_pool(inst);
    let n = inst.num_vertices as usize;
    let mut edges_by_vertex = vec![Vec::new(); n];
    for (i, pe) in pool.iter().enumerate() {
        for &v in pe.edge.verts() {
            edges_by_vertex[v as usize].push(i);
        }
    }
    let t = inst.t as usize;
    let perfect = t * inst.r as usize == n;
    let mut dfs = StrongDfs {
        pool: &pool,
        edges_by_vertex,
        t,
        ticker: Ticker::new(budget),
    };
    let found = dfs.dfs(0, perfect, &mut Vec::new(), &mut Bits::zero(n), &[]);
    match found {
        Some(chosen) => {
            // no common color, so smallest-color picks cannot be all equal
            let witness = chosen
                .iter()
                .map(|&i| (pool[i].colors[0], pool[i].edge.clone()))
                .collect();
            Ok(StrongOutcome::Fails(witness))
        }
        None if dfs.ticker.over => Ok(StrongOutcome::Indeterminate),
        None => Ok(StrongOutcome::Holds),
    }
}

#[derive(Clone, Debug)]
pub struct ExactValueResult {
    pub n_max: usize,
    pub witness: Instance,
    /// False when the budget ran out; `n_max` is then only a lower bound.
    pub complete: bool,
}

/// Enumerate all size-`t` matchings on the given universe, canonicalized and
/// in lexicographic order.
pub fn enumerate_matchings(
    r: u32,
    t: u32,
    universe: u32,
    partite: bool,
) -> Result<Vec<crate::instance::Matching>> {
    use crate::instance::Matching;
    if partite && universe % r != 0 {
        return Err(Error::Param(format!(
            "partite universe {universe} not divisible by r={r}"
        )));
    }
    let part_size = if partite { universe / r } else { 0 };
    let part_of = |v: u32| v / part_size.max(1);

    // all r-subsets (transversal when partite), sorted lexicographically
    let mut edges: Vec<Edge> = Vec::new();
    let mut cur: Vec<u32> = Vec::new();
    fn gen_edges(
        next: u32,
        universe: u32,
        r: usize,
        partite: bool,
        part_of: &dyn Fn(u32) -> u32,
        cur: &mut Vec<u32>,
        out: &mut Vec<Edge>,
    ) {
        if cur.len() == r {
            out.push(crate::instance::edge(cur));
            return;
        }
        for v in next..universe {
            if partite {
                let p = part_of(v);
                if cur.iter().any(|&u| part_of(u) == p) {
                    continue;
                }
            }
            cur.push(v);
            gen_edges(v + 1, universe, r, partite, part_of, cur, out);
            cur.pop();
        }
    }
    gen_edges(0, universe, r as usize, partite, &part_of, &mut cur, &mut edges);
    edges.sort();

    let mut out: Vec<Matching> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn gen_matchings(
        start: usize,
        t: usize,
        edges: &[Edge],
        stack: &mut Vec<usize>,
        out: &mut Vec<crate::instance::Matching>,
    ) {
        if stack.len() == t {
            out.push(crate::instance::Matching::new(
                stack.iter().map(|&i| edges[i].clone()).collect(),
            ));
            return;
        }
        for i in start..edges.len() {
            if stack.iter().any(|&j| !edges[j].is_disjoint(&edges[i])) {
                continue;
            }
            stack.push(i);
            gen_matchings(i + 1, t, edges, stack, out);
            stack.pop();
        }
    }
    gen_matchings(0, t as usize, &edges, &mut stack, &mut out);
    Ok(out)
}

/// Maximum multiset of size-`t` matchings on a fixed universe with no rainbow
/// matching of size `t`, by lexicographic branch-and-bound over the candidate
/// pool.
pub fn exact_value_search(
    r: u32,
    t: u32,
    universe: u32,
    partite: bool,
    multiplicity_cap: usize,
    budget: &SearchBudget,
) -> Result<ExactValueResult> {
    if universe < r * t {
        return Err(Error::Param(format!(
            "universe {universe} smaller than rt={}",
            r * t
        )));
    }
    if multiplicity_cap == 0 || multiplicity_cap > (t as usize).saturating_sub(1).max(1) {
        return Err(Error::Param(format!(
            "multiplicity_cap {multiplicity_cap} not in 1..=t-1"
        )));
    }
    let candidates = enumerate_matchings(r, t, universe, partite)?;
    let partition = partite.then(|| {
        crate::instance::Partition::consecutive(r as usize, (universe / r) as usize)
    });
    let assemble = |chosen: &[usize]| {
        Instance::new(
            r,
            t,
            universe,
            partition.clone(),
            chosen.iter().map(|&i| candidates[i].clone()).collect(),
        )
    };

    let mut best: Vec<usize> = Vec::new();
    let mut complete = true;
    let mut ticker = Ticker::new(budget);
    // chosen holds candidate indices, non-decreasing; each index at most cap times
    fn go(
        next: usize,
        chosen: &mut Vec<usize>,
        candidates_len: usize,
        cap: usize,
        best: &mut Vec<usize>,
        complete: &mut bool,
        ticker: &mut Ticker,
        budget: &SearchBudget,
        assemble: &dyn Fn(&[usize]) -> Instance,
        t: usize,
    ) {
        if chosen.len() > best.len() {
            *best = chosen.clone();
        }
        for i in next..candidates_len {
            if chosen.len() + (candidates_len - i) * cap <= best.len() {
                break;
            }
            if !ticker.tick() {
                *complete = false;
                return;
            }
            let copies = chosen.iter().rev().take_while(|&&j| j == i).count();
            if copies >= cap {
                continue;
            }
            chosen.push(i);
            let inst = assemble(chosen);
            match find_rainbow(&inst, t, budget) {
                Ok(out) => match out.status {
                    SearchStatus::NoneExists => {
                        go(
                            i, chosen, candidates_len, cap, best, complete, ticker, budget,
                            assemble, t,
                        );
                    }
                    SearchStatus::Found(_) => {}
                    SearchStatus::Indeterminate => *complete = false,
                },
                Err(_) => *complete = false,
            }
            chosen.pop();
        }
    }
    go(
        0,
        &mut Vec::new(),
        candidates.len(),
        multiplicity_cap,
        &mut best,
        &mut complete,
        &mut ticker,
        budget,
        &assemble,
        t as usize,
    );
    let witness = assemble(&best);
    Ok(ExactValueResult {
        n_max: best.len(),
        witness,
        complete,
    })
}

/// Naive reference enumerator, independent of the DFS above: try every
/// increasing color combination and every choice of one edge per color.
pub mod reference {
    use super::*;

    pub fn find_rainbow_naive(inst: &Instance, s: usize) -> Option<RainbowCertificate> {
        let mut picks: Vec<(usize, Edge)> = Vec::new();
        go(inst, s, 0, &mut picks)
    }

    fn go(
        inst: &Instance,
        s: usize,
        from_color: usize,
        picks: &mut Vec<(usize, Edge)>,
    ) -> Option<RainbowCertificate> {
        if picks.len() == s {
            return Some(RainbowCertificate { picks: picks.clone() });
        }
        for j in from_color..inst.num_colors() {
            for e in inst.matchings[j].edges() {
                if picks.iter().all(|(_, f)| f.is_disjoint(e)) {
                    picks.push((j, e.clone()));
                    if let Some(c) = go(inst, s, j + 1, picks) {
                        return Some(c);
                    }
                    picks.pop();
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{edge, Matching, Partition};

    fn k4() -> Instance {
        let m = |a: &[u32], b: &[u32]| Matching::new(vec![edge(a), edge(b)]);
        Instance::new(
            2,
            2,
            4,
            None,
            vec![
                m(&[0, 1], &[2, 3]),
                m(&[0, 2], &[1, 3]),
                m(&[0, 3], &[1, 2]),
            ],
        )
    }

    fn k22_pair() -> Instance {
        // the two perfect matchings of K_{2,2}: parts {0,1} and {2,3}
        let m = |a: &[u32], b: &[u32]| Matching::new(vec![edge(a), edge(b)]);
        Instance::new(
            2,
            2,
            4,
            Some(Partition::consecutive(2, 2)),
            vec![m(&[0, 2], &[1, 3]), m(&[0, 3], &[1, 2])],
        )
    }

    #[test]
    fn k22_extremal_pair_has_no_rainbow() {
        let out = find_rainbow(&k22_pair(), 2, &SearchBudget::default()).unwrap();
        assert!(out.none_exists());
    }

    #[test]
    fn k4_disjoint_pairs_are_monochromatic() {
        // every disjoint edge pair of K_4 is one of the three perfect
        // matchings, so no size-2 rainbow exists and the strong property holds
        let inst = k4();
        let out = find_rainbow(&inst, 2, &SearchBudget::default()).unwrap();
        assert!(out.none_exists());
        assert!(reference::find_rainbow_naive(&inst, 2).is_none());
        assert!(check_strong_property(&inst, &SearchBudget::default())
            .unwrap()
            .holds());
    }

    #[test]
    fn size_one_always_found() {
        let out = find_rainbow(&k4(), 1, &SearchBudget::default()).unwrap();
        let cert = out.found().expect("one edge of one color");
        assert!(crate::instance::check_certificate(&k4(), cert));
    }

    #[test]
    fn single_matching_strong_holds() {
        let inst = Instance::new(
            2,
            2,
            4,
            None,
            vec![Matching::new(vec![edge(&[0, 1]), edge(&[2, 3])])],
        );
        assert!(check_strong_property(&inst, &SearchBudget::default())
            .unwrap()
            .holds());
    }

    #[test]
    fn budget_exhaustion_is_indeterminate() {
        let inst = k22_pair();
        let out = find_rainbow(&inst, 2, &SearchBudget::with_nodes(1)).unwrap();
        assert!(matches!(out.status, SearchStatus::Indeterminate));
    }

    #[test]
    fn exact_value_k22_universe() {
        let res =
            exact_value_search(2, 2, 4, true, 1, &SearchBudget::default()).unwrap();
        assert!(res.complete);
        assert_eq!(res.n_max, 2);
        // the witness is the two perfect matchings of K_{2,2}
        assert_eq!(res.witness.num_colors(), 2);
        assert!(find_rainbow(&res.witness, 2, &SearchBudget::default())
            .unwrap()
            .none_exists());
    }

    #[test]
    fn exact_value_nonpartite_universe_4() {
        // all three perfect matchings of K_4 have no rainbow pair
        let res =
            exact_value_search(2, 2, 4, false, 1, &SearchBudget::default()).unwrap();
        assert!(res.complete);
        assert_eq!(res.n_max, 3);
    }

    #[test]
    fn monotonicity_in_s() {
        let inst = k22_pair();
        for s in [1usize, 2] {
            let out = find_rainbow(&inst, s, &SearchBudget::default()).unwrap();
            if s == 1 {
                assert!(out.found().is_some());
            } else {
                assert!(out.none_exists());
            }
        }
    }
}
