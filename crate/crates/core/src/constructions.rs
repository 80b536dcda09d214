//! Deterministic generators for the explicit lower-bound families: the
//! fixed-uniformity shift construction, the mirror-pair families, the t=2
//! complement pairings, the sum-tuple reduction, and the parity lift.
//!
//! Every family lives on exactly `t*r` vertices, so its matchings are perfect
//! and any rainbow matching of size `t` would have to cover every vertex.

use std::collections::BTreeMap;

use crate::instance::{edge, Edge, Instance, Matching, Partition, VertexId};
use crate::search::SearchBudget;
use crate::{Error, Result};

fn meta(inst: &mut Instance, generator: &str, params: &[(&str, String)]) {
    let mut m = BTreeMap::new();
    m.insert("generator".to_string(), generator.to_string());
    for (k, v) in params {
        m.insert((*k).to_string(), v.clone());
    }
    inst.metadata = m;
}

/// An r-tuple over the symbol alphabet {1..t-r} (codes 0..t-r-1) followed by
/// a_1..a_r (codes t-r..t-1), one symbol per part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftTuple {
    pub entries: Vec<u32>,
}

impl ShiftTuple {
    /// Cyclic forward-shift applied j times: (x_1,..,x_r) -> (x_{j+1},..,x_j).
    pub fn shifted(&self, j: usize) -> ShiftTuple {
        let r = self.entries.len();
        let entries = (0..r).map(|p| self.entries[(p + j) % r]).collect();
        ShiftTuple { entries }
    }

    /// Edge of the r-partite hypergraph with parts of size t: position p
    /// holding symbol code c maps to vertex p*t + c.
    pub fn to_edge(&self, t: u32) -> Edge {
        let verts: Vec<VertexId> = self
            .entries
            .iter()
            .enumerate()
            .map(|(p, &c)| p as u32 * t + c)
            .collect();
        edge(&verts)
    }
}

/// Lower-bound family on tr vertices with N = (floor(t/r)-1)^r matchings,
/// one per tuple in X_1 x .. x X_r (all kept, which is at least N).
///
/// Symbols per part: labels 1..t-r plus the special a_1..a_r. Matching rules:
/// the all-a diagonal, one x_j spliced into the a_j row per position, the
/// r-1 cyclic shifts of (x_1..x_r), and a constant row per unused label.
pub fn fixed_r_construction(r: u32, t: u32) -> Result<Instance> {
    if r < 3 {
        return Err(Error::Param(format!("fixed-r requires r >= 3, got {r}")));
    }
    if t < 2 * r {
        return Err(Error::Param(format!(
            "fixed-r requires t >= 2r, got t={t}, r={r}"
        )));
    }
    let labels = t - r;
    // consecutive blocks of floor((t-r)/r) labels, remainder to the last
    let base = (labels / r) as usize;
    let mut parts_x: Vec<Vec<u32>> = Vec::new();
    for p in 0..r as usize {
        let lo = p * base;
        let hi = if p + 1 == r as usize {
            labels as usize
        } else {
            (p + 1) * base
        };
        // label codes are 0-based: label i has code i-1
        parts_x.push((lo as u32..hi as u32).collect());
    }
    let a_code = |j: u32| labels + j; // a_{j+1}, 0-based j

    let mut matchings = Vec::new();
    let mut idx = vec![0usize; r as usize];
    loop {
        let xs: Vec<u32> = (0..r as usize).map(|p| parts_x[p][idx[p]]).collect();
        let mut tuples: Vec<ShiftTuple> = Vec::new();
        // (i) the all-a diagonal
        tuples.push(ShiftTuple {
            entries: (0..r).map(a_code).collect(),
        });
        // (ii) x_j in position j, a_j elsewhere
        for j in 0..r as usize {
            let mut e: Vec<u32> = vec![a_code(j as u32); r as usize];
            e[j] = xs[j];
            tuples.push(ShiftTuple { entries: e });
        }
        // (iii) cyclic shifts of (x_1..x_r)
        let base_tuple = ShiftTuple {
            entries: xs.clone(),
        };
        for j in 1..r as usize {
            tuples.push(base_tuple.shifted(j));
        }
        // (iv) constant rows for unused labels
        for c in 0..labels {
            if !xs.contains(&c) {
                tuples.push(ShiftTuple {
                    entries: vec![c; r as usize],
                });
            }
        }
        debug_assert_eq!(tuples.len(), t as usize);
        matchings.push(Matching::new(
            tuples.iter().map(|s| s.to_edge(t)).collect(),
        ));

        // lexicographic advance over X_1 x .. x X_r
        let mut p = r as usize;
        loop {
            if p == 0 {
                break;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < parts_x[p].len() {
                break;
            }
            idx[p] = 0;
            if p == 0 {
                p = usize::MAX;
                break;
            }
        }
        if p == usize::MAX {
            break;
        }
    }

    let partition = Partition::consecutive(r as usize, t as usize);
    let mut inst = Instance::new(r, t, t * r, Some(partition), matchings);
    meta(
        &mut inst,
        "fixed-r",
        &[("r", r.to_string()), ("t", t.to_string())],
    );
    Ok(inst)
}

/// Mirror-pair family for the general (non-partite) problem.
///
/// Even r: tr vertices labeled 1..tr-2, a, a'; one matching per (r-1)-subset
/// X of the labels hitting each pair {x, tr-1-x} at most once, giving
/// N = C((tr-2)/2, r-1) * 2^(r-1). Odd r: the even (r-1) family lifted.
pub fn simple_f_upper_family(r: u32, t: u32) -> Result<Instance> {
    if r < 2 {
        return Err(Error::Param(format!("requires r >= 2, got {r}")));
    }
    if t < 2 {
        return Err(Error::Param(format!("requires t >= 2, got {t}")));
    }
    if r % 2 == 1 {
        let base = simple_f_upper_family(r - 1, t)?;
        let mut inst = lift_uniformity(&base, r)?;
        meta(
            &mut inst,
            "simple-F",
            &[
                ("r", r.to_string()),
                ("t", t.to_string()),
                ("lifted_from", (r - 1).to_string()),
            ],
        );
        return Ok(inst);
    }
    let n = t * r;
    // labels 1..n-2 are vertices 0..n-3; a = n-2, a' = n-1
    let vert = |label: u32| label - 1;
    let a = n - 2;
    let a_prime = n - 1;
    let num_pairs = ((n - 2) / 2) as usize; // pairs {x, n-1-x}, 1 <= x <= (n-2)/2

    // all (r-1)-subsets of pair representatives with a sign choice per pair,
    // enumerated lexicographically by the sorted label set X
    let mut subsets: Vec<Vec<u32>> = Vec::new();
    let mut cur: Vec<u32> = Vec::new();
    fn pick(
        next: usize,
        need: usize,
        num_pairs: usize,
        n: u32,
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if need == 0 {
            out.push(cur.clone());
            return;
        }
        for p in next..num_pairs {
            for label in [p as u32 + 1, n - 1 - (p as u32 + 1)] {
                cur.push(label);
                pick(p + 1, need - 1, num_pairs, n, cur, out);
                cur.pop();
            }
        }
    }
    pick(0, r as usize - 1, num_pairs, n, &mut cur, &mut subsets);
    for x in &mut subsets {
        x.sort_unstable();
    }
    subsets.sort();

    let mut matchings = Vec::new();
    for x_set in &subsets {
        let mut edges: Vec<Edge> = Vec::new();
        let mut e1: Vec<VertexId> = x_set.iter().map(|&x| vert(x)).collect();
        e1.push(a);
        edges.push(edge(&e1));
        let mut e2: Vec<VertexId> = x_set.iter().map(|&x| vert(n - 1 - x)).collect();
        e2.push(a_prime);
        edges.push(edge(&e2));
        // remaining pairs ascending by representative, blocks of r/2 pairs
        let used: Vec<u32> = e1
            .iter()
            .chain(e2.iter())
            .copied()
            .collect();
        let free: Vec<u32> = (1..=num_pairs as u32)
            .filter(|&x| !used.contains(&vert(x)) && !used.contains(&vert(n - 1 - x)))
            .collect();
        debug_assert_eq!(free.len(), (r * (t - 2) / 2) as usize);
        for group in free.chunks(r as usize / 2) {
            let verts: Vec<VertexId> = group
                .iter()
                .flat_map(|&x| [vert(x), vert(n - 1 - x)])
                .collect();
            edges.push(edge(&verts));
        }
        matchings.push(Matching::new(edges));
    }
    let mut inst = Instance::new(r, t, n, None, matchings);
    meta(
        &mut inst,
        "simple-F",
        &[("r", r.to_string()), ("t", t.to_string())],
    );
    Ok(inst)
}

/// Swapped-pair partite family with N = (t(t-1))^((r-1)/2) for odd r;
/// even r >= 4 lifts the odd (r-1) family.
///
/// Odd r: r parts of size t; the first r-1 parts carry labels 1..t, the last
/// part a_1, a_2, b_1..b_{t-2}. One matching per tuple (x_1..x_{r-1}) with
/// consecutive pairs distinct: the a_1 row, the pair-swapped a_2 row, and one
/// b_i row per leftover label rank (ascending unused labels per pair block).
pub fn simple_f_partite_family(r: u32, t: u32) -> Result<Instance> {
    if r < 3 {
        return Err(Error::Param(format!("requires r >= 3, got {r}")));
    }
    if t < 2 {
        return Err(Error::Param(format!("requires t >= 2, got {t}")));
    }
    if r % 2 == 0 {
        let base = simple_f_partite_family(r - 1, t)?;
        let mut inst = lift_uniformity(&base, r)?;
        meta(
            &mut inst,
            "simple-f",
            &[
                ("r", r.to_string()),
                ("t", t.to_string()),
                ("lifted_from", (r - 1).to_string()),
            ],
        );
        return Ok(inst);
    }
    let n = t * r;
    // part p < r-1: label x (1..t) is vertex p*t + x - 1
    let vert = |p: u32, x: u32| p * t + x - 1;
    let last = (r - 1) * t;
    let a1 = last;
    let a2 = last + 1;
    let b = |i: u32| last + 1 + i; // b_i, 1 <= i <= t-2

    // tuples with x_1 != x_2, x_3 != x_4, ..., lexicographic
    let blocks = ((r - 1) / 2) as usize;
    let mut tuples: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..blocks {
        let mut next = Vec::new();
        for tu in &tuples {
            for x in 1..=t {
                for y in 1..=t {
                    if x != y {
                        let mut v = tu.clone();
                        v.push(x);
                        v.push(y);
                        next.push(v);
                    }
                }
            }
        }
        tuples = next;
    }

    let mut matchings = Vec::new();
    for xs in &tuples {
        let mut edges: Vec<Edge> = Vec::new();
        let mut e1: Vec<VertexId> = xs
            .iter()
            .enumerate()
            .map(|(p, &x)| vert(p as u32, x))
            .collect();
        e1.push(a1);
        edges.push(edge(&e1));
        // pairwise swap: (x_2, x_1, x_4, x_3, ...)
        let mut e2: Vec<VertexId> = Vec::new();
        for k in 0..blocks {
            e2.push(vert(2 * k as u32, xs[2 * k + 1]));
            e2.push(vert(2 * k as u32 + 1, xs[2 * k]));
        }
        e2.push(a2);
        edges.push(edge(&e2));
        // b rows: in each pair block the uncovered labels agree; the i-th row
        // takes the i-th smallest
        let unused: Vec<Vec<u32>> = (0..blocks)
            .map(|k| {
                (1..=t)
                    .filter(|&x| x != xs[2 * k] && x != xs[2 * k + 1])
                    .collect()
            })
            .collect();
        for i in 1..=t - 2 {
            let mut e: Vec<VertexId> = Vec::new();
            for (k, labels) in unused.iter().enumerate() {
                let y = labels[(i - 1) as usize];
                e.push(vert(2 * k as u32, y));
                e.push(vert(2 * k as u32 + 1, y));
            }
            e.push(b(i));
            edges.push(edge(&e));
        }
        matchings.push(Matching::new(edges));
    }
    let partition = Partition::consecutive(r as usize, t as usize);
    let mut inst = Instance::new(r, t, n, Some(partition), matchings);
    meta(
        &mut inst,
        "simple-f",
        &[("r", r.to_string()), ("t", t.to_string())],
    );
    Ok(inst)
}

/// Raise uniformity by one: append t fresh vertices (a new part when
/// partite); edge i of every matching, in canonical order, gains vertex i.
/// A rainbow matching of size t exists in the output iff one exists in the
/// input, because the new vertices project away.
pub fn lift_uniformity(inst: &Instance, target_r: u32) -> Result<Instance> {
    if target_r != inst.r + 1 {
        return Err(Error::Param(format!(
            "lift target {target_r} is not r+1 = {}",
            inst.r + 1
        )));
    }
    if inst.num_vertices != inst.t * inst.r {
        return Err(Error::Param(format!(
            "lift requires perfect matchings on tr = {} vertices, got {}",
            inst.t * inst.r,
            inst.num_vertices
        )));
    }
    for (j, m) in inst.matchings.iter().enumerate() {
        if m.len() != inst.t as usize {
            return Err(Error::Param(format!(
                "matching {j} has {} edges, expected {}",
                m.len(),
                inst.t
            )));
        }
    }
    let old_n = inst.num_vertices;
    let matchings = inst
        .matchings
        .iter()
        .map(|m| {
            Matching::new(
                m.edges()
                    .iter()
                    .enumerate()
                    .map(|(i, e)| {
                        let mut verts = e.verts().to_vec();
                        verts.push(old_n + i as u32);
                        edge(&verts)
                    })
                    .collect(),
            )
        })
        .collect();
    let partition = inst.partition.as_ref().map(|p| {
        let mut parts = p.parts().to_vec();
        parts.push((old_n..old_n + inst.t).collect());
        Partition::new(parts)
    });
    let mut out = Instance::new(target_r, inst.t, old_n + inst.t, partition, matchings);
    out.metadata = inst.metadata.clone();
    out.metadata
        .insert("lifted_to_r".to_string(), target_r.to_string());
    Ok(out)
}

/// All complementary r-subset pairs of a 2r-vertex set: N = C(2r,r)/2
/// matchings of size 2. Two disjoint r-edges on 2r vertices are complements,
/// so the strong property holds.
pub fn t2_complete_construction(r: u32) -> Result<Instance> {
    if r < 2 {
        return Err(Error::Param(format!("requires r >= 2, got {r}")));
    }
    let n = 2 * r;
    let mut matchings = Vec::new();
    // subsets containing vertex 0, lexicographic: each pair listed once
    let mut cur: Vec<u32> = vec![0];
    fn gen(next: u32, n: u32, r: usize, cur: &mut Vec<u32>, out: &mut Vec<Matching>) {
        if cur.len() == r {
            let comp: Vec<u32> = (0..n).filter(|v| !cur.contains(v)).collect();
            out.push(Matching::new(vec![edge(cur), edge(&comp)]));
            return;
        }
        for v in next..n {
            cur.push(v);
            gen(v + 1, n, r, cur, out);
            cur.pop();
        }
    }
    gen(1, n, r as usize, &mut cur, &mut matchings);
    let mut inst = Instance::new(r, 2, n, None, matchings);
    meta(&mut inst, "t2-complete", &[("r", r.to_string())]);
    Ok(inst)
}

/// Partite version: parts {2p, 2p+1}; all 2^r transversal edges split into
/// N = 2^(r-1) edge/complement matchings of size 2.
pub fn t2_partite_construction(r: u32) -> Result<Instance> {
    if r < 2 {
        return Err(Error::Param(format!("requires r >= 2, got {r}")));
    }
    let n = 2 * r;
    let mut matchings = Vec::new();
    // transversal edges containing vertex 0, lexicographic in the choice bits
    for bits in 0..(1u32 << (r - 1)) {
        let mut e: Vec<u32> = vec![0];
        let mut comp: Vec<u32> = vec![1];
        for p in 1..r {
            let pick = (bits >> (r - 1 - p)) & 1;
            e.push(2 * p + pick);
            comp.push(2 * p + (1 - pick));
        }
        matchings.push(Matching::new(vec![edge(&e), edge(&comp)]));
    }
    let parts = (0..r).map(|p| vec![2 * p, 2 * p + 1]).collect();
    let mut inst = Instance::new(r, 2, n, Some(Partition::new(parts)), matchings);
    meta(&mut inst, "t2-partite", &[("r", r.to_string())]);
    Ok(inst)
}

/// A system of t-tuples of 0/1 vectors x_{i,j} over dimension n (t | n), each
/// with exactly n/t ones, such that x_{1,j_1} + .. + x_{t,j_t} equals the
/// all-ones vector iff j_1 = .. = j_t. Vectors are stored as bitmasks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumTupleSystem {
    pub n: u32,
    pub t: u32,
    /// tuples[j][i] = mask of x_{i+1, j+1}
    pub tuples: Vec<Vec<u64>>,
}

impl SumTupleSystem {
    /// Exhaustive invariant check over all mixed index combinations.
    pub fn verify(&self) -> Result<()> {
        if self.n == 0 || self.t < 2 || self.n % self.t != 0 || self.n > 64 {
            return Err(Error::Param(format!(
                "bad dimensions n={}, t={}",
                self.n, self.t
            )));
        }
        let full: u64 = if self.n == 64 { !0 } else { (1 << self.n) - 1 };
        let block = self.n / self.t;
        for (j, tu) in self.tuples.iter().enumerate() {
            if tu.len() != self.t as usize {
                return Err(Error::Param(format!("tuple {j} has {} rows", tu.len())));
            }
            for (i, &m) in tu.iter().enumerate() {
                if m & !full != 0 || m.count_ones() != block {
                    return Err(Error::Param(format!(
                        "tuple {j} row {i} is not a {block}-subset of the dimension"
                    )));
                }
            }
        }
        let nn = self.tuples.len();
        let t = self.t as usize;
        let mut js = vec![0usize; t];
        loop {
            let mut union = 0u64;
            let mut total = 0u32;
            for (i, &j) in js.iter().enumerate() {
                union |= self.tuples[j][i];
                total += self.tuples[j][i].count_ones();
            }
            let all_equal = js.iter().all(|&j| j == js[0]);
            let partitions = union == full && total == self.n;
            if partitions != all_equal {
                return Err(Error::Param(format!(
                    "mixed sum condition violated at indices {js:?}"
                )));
            }
            let mut p = t;
            loop {
                if p == 0 {
                    return Ok(());
                }
                p -= 1;
                js[p] += 1;
                if js[p] < nn {
                    break;
                }
                js[p] = 0;
            }
        }
    }
}

/// Reduce a verified sum-tuple system to a size-t matching family on n+t
/// vertices: matching j consists of the edges {a_i} u supp(x_{i,j}), so the
/// strong property holds by the iff condition on mixed sums.
pub fn tuples_to_matchings_f_general(sys: &SumTupleSystem) -> Result<Instance> {
    sys.verify()?;
    let n = sys.n;
    let t = sys.t;
    let r = n / t + 1;
    let matchings = sys
        .tuples
        .iter()
        .map(|tu| {
            Matching::new(
                tu.iter()
                    .enumerate()
                    .map(|(i, &mask)| {
                        let mut verts: Vec<u32> =
                            (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                        verts.push(n + i as u32);
                        edge(&verts)
                    })
                    .collect(),
            )
        })
        .collect();
    let mut inst = Instance::new(r, t, n + t, None, matchings);
    meta(
        &mut inst,
        "sum-tuple-F",
        &[("n", n.to_string()), ("t", t.to_string())],
    );
    Ok(inst)
}

/// Greedy maximal sum-tuple system: scan ordered partitions of [n] into t
/// equal blocks lexicographically, keeping each tuple whose addition leaves
/// the mixed-sum condition intact; the final system is re-verified in full.
pub fn generate_sum_tuples(t: u32, n: u32, budget: &SearchBudget) -> Result<SumTupleSystem> {
    if t < 3 {
        return Err(Error::Param(format!("requires t >= 3, got {t}")));
    }
    if n == 0 || n % t != 0 || n > 32 {
        return Err(Error::Param(format!("n={n} must be a positive multiple of t={t} (and <= 32)")));
    }
    let block = n / t;
    let full: u64 = (1 << n) - 1;

    // ordered partitions of [n] into t blocks of equal size, lexicographic
    let mut candidates: Vec<Vec<u64>> = Vec::new();
    fn split(remaining: u64, blocks_left: u32, block: u32, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if blocks_left == 0 {
            out.push(cur.clone());
            return;
        }
        // the lowest remaining element anchors the block only for unordered
        // partitions; blocks here are ordered, so enumerate all subsets
        let elems: Vec<u32> = (0..64).filter(|&v| remaining >> v & 1 == 1).collect();
        let mut pick: Vec<u32> = Vec::new();
        fn combos(
            elems: &[u32],
            from: usize,
            need: u32,
            pick: &mut Vec<u32>,
            remaining: u64,
            blocks_left: u32,
            block: u32,
            cur: &mut Vec<u64>,
            out: &mut Vec<Vec<u64>>,
        ) {
            if need == 0 {
                let mask = pick.iter().fold(0u64, |m, &v| m | 1 << v);
                cur.push(mask);
                split(remaining & !mask, blocks_left - 1, block, cur, out);
                cur.pop();
                return;
            }
            for k in from..elems.len() {
                pick.push(elems[k]);
                combos(elems, k + 1, need - 1, pick, remaining, blocks_left, block, cur, out);
                pick.pop();
            }
        }
        combos(&elems, 0, block, &mut pick, remaining, blocks_left, block, cur, out);
    }
    split(full, t, block, &mut Vec::new(), &mut candidates);

    let mut sys = SumTupleSystem {
        n,
        t,
        tuples: Vec::new(),
    };
    let mut checks: u64 = 0;
    'cand: for cand in &candidates {
        // mixed combinations involving the new tuple; older combinations are
        // already verified
        let nn = sys.tuples.len() + 1;
        let t_us = t as usize;
        let mut js = vec![0usize; t_us];
        loop {
            if js.contains(&(nn - 1)) {
                checks += 1;
                if checks > budget.max_nodes {
                    break 'cand;
                }
                let row = |i: usize, j: usize| -> u64 {
                    if j == nn - 1 {
                        cand[i]
                    } else {
                        sys.tuples[j][i]
                    }
                };
                let mut union = 0u64;
                let mut total = 0u32;
                for (i, &j) in js.iter().enumerate() {
                    union |= row(i, j);
                    total += row(i, j).count_ones();
                }
                let all_equal = js.iter().all(|&j| j == js[0]);
                if (union == full && total == n) != all_equal {
                    // adding this candidate breaks the condition
                    continue 'cand;
                }
            }
            let mut p = t_us;
            let mut done = false;
            loop {
                if p == 0 {
                    done = true;
                    break;
                }
                p -= 1;
                js[p] += 1;
                if js[p] < nn {
                    break;
                }
                js[p] = 0;
            }
            if done {
                break;
            }
        }
        sys.tuples.push(cand.clone());
    }
    sys.verify()?;
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::validate_instance;
    use crate::search::{check_strong_property, find_rainbow, SearchBudget};

    fn assert_perfect(inst: &Instance) {
        assert!(validate_instance(inst).ok());
        for m in &inst.matchings {
            let mut covered = vec![false; inst.num_vertices as usize];
            for e in m.edges() {
                for &v in e.verts() {
                    assert!(!covered[v as usize], "vertex {v} covered twice");
                    covered[v as usize] = true;
                }
            }
            assert!(covered.iter().all(|&c| c), "matching not perfect");
        }
    }

    fn assert_no_rainbow(inst: &Instance) {
        let out = find_rainbow(inst, inst.t as usize, &SearchBudget::default()).unwrap();
        assert!(out.none_exists(), "rainbow found in a lower-bound family");
    }

    #[test]
    fn fixed_r_counts() {
        let inst = fixed_r_construction(3, 12).unwrap();
        assert_eq!(inst.num_colors(), 27);
        assert_eq!(inst.num_vertices, 36);
        assert_perfect(&inst);
        let inst = fixed_r_construction(4, 8).unwrap();
        assert_eq!(inst.num_colors(), 1);
        assert_perfect(&inst);
    }

    #[test]
    fn fixed_r_domain() {
        assert!(fixed_r_construction(2, 10).is_err());
        assert!(fixed_r_construction(3, 5).is_err());
    }

    #[test]
    fn fixed_r_distinct_matchings() {
        let inst = fixed_r_construction(3, 6).unwrap();
        assert_eq!(inst.num_colors(), 1);
        let inst = fixed_r_construction(3, 9).unwrap();
        assert_eq!(inst.num_colors(), 8);
        for a in 0..inst.matchings.len() {
            for b in a + 1..inst.matchings.len() {
                assert_ne!(inst.matchings[a], inst.matchings[b]);
            }
        }
        assert_perfect(&inst);
    }

    #[test]
    fn simple_big_f_counts_and_no_rainbow() {
        let inst = simple_f_upper_family(2, 3).unwrap();
        assert_eq!(inst.num_colors(), 4);
        assert_eq!(inst.num_vertices, 6);
        assert_perfect(&inst);
        assert_no_rainbow(&inst);

        let inst = simple_f_upper_family(4, 2).unwrap();
        assert_eq!(inst.num_colors(), 8);
        assert_eq!(inst.num_vertices, 8);
        assert_perfect(&inst);
        assert_no_rainbow(&inst);
    }

    #[test]
    fn simple_big_f_odd_r_lifts() {
        // odd-r count C((tr-t-2)/2, r-2) * 2^(r-2): r=3, t=3 gives C(2,1)*2 = 4
        let inst = simple_f_upper_family(3, 3).unwrap();
        assert_eq!(inst.num_colors(), 4);
        assert_eq!(inst.num_vertices, 9);
        assert_perfect(&inst);
        assert_no_rainbow(&inst);
    }

    #[test]
    fn simple_small_f_counts_and_no_rainbow() {
        let inst = simple_f_partite_family(3, 3).unwrap();
        assert_eq!(inst.num_colors(), 6);
        assert_eq!(inst.num_vertices, 9);
        assert!(inst.partition.is_some());
        assert_perfect(&inst);
        assert_no_rainbow(&inst);

        let inst = simple_f_partite_family(3, 2).unwrap();
        assert_eq!(inst.num_colors(), 2);
        assert_perfect(&inst);
        assert_no_rainbow(&inst);
    }

    #[test]
    fn simple_small_f_even_r_lifts() {
        let inst = simple_f_partite_family(4, 3).unwrap();
        assert_eq!(inst.num_colors(), 6);
        assert_eq!(inst.num_vertices, 12);
        assert_eq!(inst.partition.as_ref().unwrap().parts().len(), 4);
        assert_perfect(&inst);
    }

    #[test]
    fn lift_preserves_rainbow_existence_both_ways() {
        let base = simple_f_upper_family(2, 3).unwrap();
        let lifted = lift_uniformity(&base, 3).unwrap();
        assert_perfect(&lifted);
        let b = SearchBudget::default();
        let before = find_rainbow(&base, 3, &b).unwrap().none_exists();
        let after = find_rainbow(&lifted, 3, &b).unwrap().none_exists();
        assert_eq!(before, after);
        // single matching lifts to a single valid matching
        let one = Instance::new(
            2,
            2,
            4,
            None,
            vec![Matching::new(vec![edge(&[0, 1]), edge(&[2, 3])])],
        );
        let lifted = lift_uniformity(&one, 3).unwrap();
        assert_eq!(lifted.num_colors(), 1);
        assert_perfect(&lifted);
    }

    #[test]
    fn lift_rejects_imperfect_input() {
        let bad = Instance::new(
            2,
            2,
            5,
            None,
            vec![Matching::new(vec![edge(&[0, 1]), edge(&[2, 3])])],
        );
        assert!(lift_uniformity(&bad, 3).is_err());
    }

    #[test]
    fn t2_families() {
        let inst = t2_complete_construction(2).unwrap();
        assert_eq!(inst.num_colors(), 3);
        let inst = t2_complete_construction(3).unwrap();
        assert_eq!(inst.num_colors(), 10);
        assert_perfect(&inst);
        assert!(check_strong_property(&inst, &SearchBudget::default())
            .unwrap()
            .holds());

        let inst = t2_partite_construction(3).unwrap();
        assert_eq!(inst.num_colors(), 4);
        assert_perfect(&inst);
        assert!(check_strong_property(&inst, &SearchBudget::default())
            .unwrap()
            .holds());
        let inst = t2_partite_construction(2).unwrap();
        assert_eq!(inst.num_colors(), 2);
    }

    #[test]
    fn sum_tuples_trivial_and_small() {
        // n = t: single tuple of singleton blocks
        let sys = generate_sum_tuples(3, 3, &SearchBudget::default()).unwrap();
        assert!(!sys.tuples.is_empty());
        let sys6 = generate_sum_tuples(3, 6, &SearchBudget::default()).unwrap();
        assert!(!sys6.tuples.is_empty());
        let inst = tuples_to_matchings_f_general(&sys6).unwrap();
        assert!(validate_instance(&inst).ok());
        assert!(check_strong_property(&inst, &SearchBudget::default())
            .unwrap()
            .holds());
    }

    #[test]
    fn sum_tuples_rejects_bad_input() {
        assert!(generate_sum_tuples(3, 5, &SearchBudget::default()).is_err());
        // a row with too many ones
        let bad = SumTupleSystem {
            n: 6,
            t: 3,
            tuples: vec![vec![0b111, 0b011000, 0b100000]],
        };
        assert!(tuples_to_matchings_f_general(&bad).is_err());
    }

    #[test]
    fn metadata_records_generator() {
        let inst = t2_partite_construction(3).unwrap();
        assert_eq!(inst.metadata.get("generator").unwrap(), "t2-partite");
        assert_eq!(inst.metadata.get("r").unwrap(), "3");
    }
}
