//! Linear-algebraic rainbow finder. A multilinear form phi and a family of
//! t-tuples of vectors with phi nonzero on each tuple admit a system of
//! distinct representatives with phi nonzero whenever N > (t-1)*dim V. The
//! engine follows the inductive proof directly: keep a selection minimizing
//! repetitions of the top tuple, rewrite a repeated slot through linearity
//! when possible, otherwise recurse on the unused prefix.
//!
//! The hypergraph adapter maps edges to wedge products of general-position
//! vertex vectors, so phi is nonzero exactly on vertex-disjoint selections.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

use crate::instance::{
    check_certificate, validate_instance, Edge, Instance, RainbowCertificate,
};
use crate::search::{SearchBudget, SearchOutcome, SearchStatus};
use crate::{Error, Result};

/// Mersenne prime 2^61 - 1.
pub const Q: u64 = (1u64 << 61) - 1;

fn addm(a: u64, b: u64, q: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % q as u128) as u64
}

fn subm(a: u64, b: u64, q: u64) -> u64 {
    (a as u128 + q as u128 - b as u128) as u64 % q
}

fn mulm(a: u64, b: u64, q: u64) -> u64 {
    (a as u128 * b as u128 % q as u128) as u64
}

fn powm(mut a: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1u64 % q;
    a %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulm(acc, a, q);
        }
        a = mulm(a, a, q);
        e >>= 1;
    }
    acc
}

fn invm(a: u64, q: u64) -> u64 {
    powm(a, q - 2, q)
}

/// Determinant mod a prime by Gaussian elimination.
pub fn det_mod(mat: &[Vec<u64>], q: u64) -> u64 {
    let n = mat.len();
    let mut m: Vec<Vec<u64>> = mat.iter().map(|row| row.iter().map(|&x| x % q).collect()).collect();
    let mut det = 1u64 % q;
    for col in 0..n {
        let pivot = (col..n).find(|&r| m[r][col] != 0);
        let pivot = match pivot {
            Some(p) => p,
            None => return 0,
        };
        if pivot != col {
            m.swap(pivot, col);
            det = subm(0, det, q);
        }
        let inv = invm(m[col][col], q);
        det = mulm(det, m[col][col], q);
        for r in col + 1..n {
            if m[r][col] == 0 {
                continue;
            }
            let factor = mulm(m[r][col], inv, q);
            for c in col..n {
                let sub = mulm(factor, m[col][c], q);
                m[r][c] = subm(m[r][c], sub, q);
            }
        }
    }
    det
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldVector {
    /// Coordinates reduced mod Q.
    pub coords: Vec<u64>,
}

impl FieldVector {
    pub fn new(coords: Vec<u64>) -> Self {
        FieldVector {
            coords: coords.into_iter().map(|c| c % Q).collect(),
        }
    }

    pub fn basis(dim: usize, s: usize) -> Self {
        let mut coords = vec![0; dim];
        coords[s] = 1;
        FieldVector { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn add(&self, other: &FieldVector) -> FieldVector {
        FieldVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| addm(a, b, Q))
                .collect(),
        }
    }

    pub fn scale(&self, c: u64) -> FieldVector {
        FieldVector {
            coords: self.coords.iter().map(|&a| mulm(a, c, Q)).collect(),
        }
    }
}

enum PhiKind {
    /// phi(x_1..x_t) = sum_s prod_i x_i^(s).
    Diagonal,
    /// Wedge product in coordinates indexed by sorted r-subsets of 0..rt:
    /// sum over ordered tuples of disjoint subsets covering all indices,
    /// signed by the concatenation permutation.
    Wedge {
        subsets: Vec<Vec<usize>>,
        masks: Vec<u64>,
        full_mask: u64,
    },
}

pub struct PhiOracle {
    t: usize,
    coord_dim: usize,
    kind: PhiKind,
}

fn subsets_of(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

fn perm_sign(indices: &[usize]) -> u64 {
    let mut inversions = 0usize;
    for i in 0..indices.len() {
        for j in i + 1..indices.len() {
            if indices[i] > indices[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        Q - 1
    }
}

impl PhiOracle {
    pub fn diagonal(t: usize, dim: usize) -> Self {
        PhiOracle {
            t,
            coord_dim: dim,
            kind: PhiKind::Diagonal,
        }
    }

    pub fn wedge(t: usize, r: usize) -> Self {
        let n = t * r;
        let subsets = subsets_of(n, r);
        let masks: Vec<u64> = subsets
            .iter()
            .map(|s| s.iter().fold(0u64, |m, &v| m | (1 << v)))
            .collect();
        let coord_dim = subsets.len();
        PhiOracle {
            t,
            coord_dim,
            kind: PhiKind::Wedge {
                subsets,
                masks,
                full_mask: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
            },
        }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn coord_dim(&self) -> usize {
        self.coord_dim
    }

    pub fn eval(&self, xs: &[&FieldVector]) -> u64 {
        assert_eq!(xs.len(), self.t);
        match &self.kind {
            PhiKind::Diagonal => {
                let mut total = 0u64;
                for s in 0..self.coord_dim {
                    let mut prod = 1u64;
                    for x in xs {
                        prod = mulm(prod, x.coords[s], Q);
                        if prod == 0 {
                            break;
                        }
                    }
                    total = addm(total, prod, Q);
                }
                total
            }
            PhiKind::Wedge {
                subsets,
                masks,
                full_mask,
            } => {
                let mut total = 0u64;
                let mut chosen: Vec<usize> = Vec::with_capacity(self.t);
                self.wedge_rec(xs, subsets, masks, *full_mask, 0, 0, 1, &mut chosen, &mut total);
                total
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn wedge_rec(
        &self,
        xs: &[&FieldVector],
        subsets: &[Vec<usize>],
        masks: &[u64],
        full_mask: u64,
        slot: usize,
        used: u64,
        prod: u64,
        chosen: &mut Vec<usize>,
        total: &mut u64,
    ) {
        if slot == self.t {
            debug_assert_eq!(used, full_mask);
            let concat: Vec<usize> = chosen
                .iter()
                .flat_map(|&si| subsets[si].iter().copied())
                .collect();
            let term = mulm(prod, perm_sign(&concat), Q);
            *total = addm(*total, term, Q);
            return;
        }
        for (si, &mask) in masks.iter().enumerate() {
            if used & mask != 0 {
                continue;
            }
            let c = xs[slot].coords[si];
            if c == 0 {
                continue;
            }
            chosen.push(si);
            self.wedge_rec(
                xs,
                subsets,
                masks,
                full_mask,
                slot + 1,
                used | mask,
                mulm(prod, c, Q),
                chosen,
                total,
            );
            chosen.pop();
        }
    }

    /// Random probes of phi(.., au+bv, ..) = a*phi(..,u,..) + b*phi(..,v,..).
    pub fn spot_check_linearity(&self, seed: u64, probes: usize) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rand_vec = |rng: &mut ChaCha8Rng| {
            FieldVector::new((0..self.coord_dim).map(|_| rng.gen_range(0..Q)).collect())
        };
        for _ in 0..probes {
            let slot = rng.gen_range(0..self.t);
            let base: Vec<FieldVector> = (0..self.t).map(|_| rand_vec(&mut rng)).collect();
            let u = rand_vec(&mut rng);
            let v = rand_vec(&mut rng);
            let a = rng.gen_range(0..Q);
            let b = rng.gen_range(0..Q);
            let combo = u.scale(a).add(&v.scale(b));
            let eval_with = |w: &FieldVector| {
                let refs: Vec<&FieldVector> = base
                    .iter()
                    .enumerate()
                    .map(|(i, x)| if i == slot { w } else { x })
                    .collect();
                self.eval(&refs)
            };
            let lhs = eval_with(&combo);
            let rhs = addm(mulm(a, eval_with(&u), Q), mulm(b, eval_with(&v), Q), Q);
            if lhs != rhs {
                return false;
            }
        }
        true
    }
}

pub struct TupleFamily {
    pub t: usize,
    /// Logical dimension of the span's ambient space, for the N > (t-1)*dim
    /// guarantee. May be smaller than the coordinate length.
    pub dim_v: usize,
    pub tuples: Vec<Vec<FieldVector>>,
}

impl TupleFamily {
    /// Checks phi nonzero on every tuple.
    pub fn new(
        t: usize,
        dim_v: usize,
        tuples: Vec<Vec<FieldVector>>,
        phi: &PhiOracle,
    ) -> Result<Self> {
        for (j, tup) in tuples.iter().enumerate() {
            if tup.len() != t {
                return Err(Error::Param(format!("tuple {j} has length {}", tup.len())));
            }
            let refs: Vec<&FieldVector> = tup.iter().collect();
            if phi.eval(&refs) == 0 {
                return Err(Error::Param(format!("phi vanishes on tuple {j}")));
            }
        }
        Ok(TupleFamily { t, dim_v, tuples })
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn guarantee_threshold(&self) -> usize {
        (self.t - 1) * self.dim_v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MlOutcome {
    /// Distinct tuple indices with one chosen slot each; phi nonzero on the
    /// chosen vectors.
    Found { picks: Vec<(usize, usize)> },
    Exhausted,
}

#[derive(Clone, Debug)]
pub struct MlReport {
    pub outcome: MlOutcome,
    pub phi_evals: u64,
}

fn solve(
    indices: &[usize],
    fam: &TupleFamily,
    phi: &PhiOracle,
    evals: &mut u64,
) -> Result<Option<Vec<(usize, usize)>>> {
    let n = indices.len();
    if n == 0 {
        return Ok(None);
    }
    let t = fam.t;
    let top = indices[n - 1];
    let mut state: Vec<(usize, usize)> = (0..t).map(|i| (top, i)).collect();
    let eval_state = |state: &[(usize, usize)], evals: &mut u64| {
        *evals += 1;
        let refs: Vec<&FieldVector> = state.iter().map(|&(j, k)| &fam.tuples[j][k]).collect();
        phi.eval(&refs)
    };
    if eval_state(&state, evals) == 0 {
        return Err(Error::Internal(
            "phi vanishes on a family tuple; construction invariant broken".into(),
        ));
    }
    loop {
        let reps = state.iter().filter(|&&(j, _)| j == top).count();
        if reps <= 1 {
            return Ok(Some(state));
        }
        let used: Vec<usize> = state
            .iter()
            .map(|&(j, _)| j)
            .filter(|&j| j != top)
            .collect();
        let free: Vec<usize> = indices[..n - 1]
            .iter()
            .copied()
            .filter(|j| !used.contains(j))
            .collect();
        let mut improved = false;
        'slots: for i in 0..t {
            if state[i].0 != top {
                continue;
            }
            for &j in &free {
                for k in 0..t {
                    let saved = state[i];
                    state[i] = (j, k);
                    if eval_state(&state, evals) != 0 {
                        improved = true;
                        break 'slots;
                    }
                    state[i] = saved;
                }
            }
        }
        if !improved {
            // the repeated slot's vector avoids the span of the free tuples,
            // so the free family lives in a strictly smaller subspace
            return solve(&free, fam, phi, evals);
        }
    }
}

/// The inductive engine. Guaranteed Found when N > (t-1)*dim V; below that it
/// may return Exhausted. Found picks are re-verified before return.
pub fn multilinear_rainbow_find(fam: &TupleFamily, phi: &PhiOracle) -> Result<MlReport> {
    if phi.t() != fam.t {
        return Err(Error::Param("phi arity differs from tuple length".into()));
    }
    let indices: Vec<usize> = (0..fam.len()).collect();
    let mut evals = 0u64;
    match solve(&indices, fam, phi, &mut evals)? {
        None => Ok(MlReport {
            outcome: MlOutcome::Exhausted,
            phi_evals: evals,
        }),
        Some(picks) => {
            let mut js: Vec<usize> = picks.iter().map(|&(j, _)| j).collect();
            js.sort_unstable();
            js.dedup();
            let refs: Vec<&FieldVector> = picks.iter().map(|&(j, k)| &fam.tuples[j][k]).collect();
            if js.len() != fam.t || phi.eval(&refs) == 0 {
                return Err(Error::Internal("selection failed verification".into()));
            }
            Ok(MlReport {
                outcome: MlOutcome::Found { picks },
                phi_evals: evals,
            })
        }
    }
}

/// The matching bound is tight: t-1 copies of (e_s,..,e_s) per coordinate
/// direction with the diagonal form give N = (t-1)*dim with no valid
/// selection.
pub fn tightness_family(t: usize, dim: usize) -> Result<(TupleFamily, PhiOracle)> {
    if t < 2 || dim < 1 {
        return Err(Error::Param("need t >= 2 and dim >= 1".into()));
    }
    let phi = PhiOracle::diagonal(t, dim);
    let mut tuples = Vec::new();
    for s in 0..dim {
        for _ in 0..t - 1 {
            tuples.push(vec![FieldVector::basis(dim, s); t]);
        }
    }
    let fam = TupleFamily::new(t, dim, tuples, &phi)?;
    Ok((fam, phi))
}

/// Uniform random vectors. General position is not checked here; callers
/// reseed on a contradicting zero determinant.
pub fn general_position_vectors(count: usize, dim: usize, seed: u64) -> Result<Vec<FieldVector>> {
    general_position_vectors_mod(Q, count, dim, seed)
}

pub fn general_position_vectors_mod(
    q: u64,
    count: usize,
    dim: usize,
    seed: u64,
) -> Result<Vec<FieldVector>> {
    if count < dim {
        return Err(Error::Param("need at least dim vectors".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| FieldVector {
            coords: (0..dim).map(|_| rng.gen_range(0..q)).collect(),
        })
        .collect())
}

pub const GP_RETRIES: u32 = 16;

pub struct WedgeSystem {
    pub phi: PhiOracle,
    pub family: TupleFamily,
    /// Same shape as family.tuples: the edge behind each vector.
    pub edges: Vec<Vec<Edge>>,
    pub attempts: u32,
}

/// Vertex vectors in general position, edges as wedge coordinates (r-minors
/// over sorted r-subsets of the tr columns), tuples from the matchings. In
/// partite mode each vertex vector is supported on its part's t columns, so
/// the logical dimension drops to t^r; otherwise it is C(tr, r).
pub fn wedge_phi_matching(inst: &Instance, seed: u64) -> Result<WedgeSystem> {
    let report = validate_instance(inst);
    if !report.ok() {
        return Err(Error::InvalidInstance(report.violations[0].to_string()));
    }
    let t = inst.t as usize;
    let r = inst.r as usize;
    if t < 2 {
        return Err(Error::Param("need t >= 2".into()));
    }
    let n_cols = t * r;
    if n_cols > 20 {
        return Err(Error::Param(format!(
            "tr = {n_cols} too large for wedge coordinates"
        )));
    }
    let phi = PhiOracle::wedge(t, r);
    let subsets = subsets_of(n_cols, r);
    let subset_index: HashMap<Vec<usize>, usize> = subsets
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    let dim_v = match &inst.partition {
        Some(_) => t.pow(r as u32),
        None => subsets.len(),
    };
    'attempt: for attempt in 0..GP_RETRIES {
        // vertex vectors z_v of length tr; partite vectors live in their
        // part's block of t columns
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let z: Vec<Vec<u64>> = (0..inst.num_vertices)
            .map(|v| match &inst.partition {
                None => (0..n_cols).map(|_| rng.gen_range(0..Q)).collect(),
                Some(p) => {
                    let part = p.part_of(v).expect("validated vertex");
                    let mut row = vec![0u64; n_cols];
                    for c in part * t..(part + 1) * t {
                        row[c] = rng.gen_range(0..Q);
                    }
                    row
                }
            })
            .collect();
        let x_of_edge = |e: &Edge| -> FieldVector {
            let rows: Vec<&Vec<u64>> = e.verts().iter().map(|&v| &z[v as usize]).collect();
            let coords: Vec<u64> = subsets
                .iter()
                .map(|cols| {
                    let minor: Vec<Vec<u64>> = rows
                        .iter()
                        .map(|row| cols.iter().map(|&c| row[c]).collect())
                        .collect();
                    det_mod(&minor, Q)
                })
                .collect();
            FieldVector { coords }
        };
        let mut tuples = Vec::with_capacity(inst.num_colors());
        let mut edge_map = Vec::with_capacity(inst.num_colors());
        for m in &inst.matchings {
            let tup: Vec<FieldVector> = m.edges().iter().map(&x_of_edge).collect();
            let refs: Vec<&FieldVector> = tup.iter().collect();
            if phi.eval(&refs) == 0 {
                // zero wedge on disjoint edges contradicts general position
                continue 'attempt;
            }
            tuples.push(tup);
            edge_map.push(m.edges().to_vec());
        }
        let family = TupleFamily::new(t, dim_v, tuples, &phi)?;
        let _ = &subset_index;
        return Ok(WedgeSystem {
            phi,
            family,
            edges: edge_map,
            attempts: attempt + 1,
        });
    }
    Err(Error::Budget(format!(
        "general position retries exhausted after {GP_RETRIES} attempts"
    )))
}

/// Algebraic search path. Found is converted back to a verified certificate;
/// Exhausted proves nothing and maps to Indeterminate.
pub fn rainbow_via_multilinear(
    inst: &Instance,
    _budget: &SearchBudget,
    seed: u64,
) -> Result<SearchOutcome> {
    let report = validate_instance(inst);
    if !report.ok() {
        return Err(Error::InvalidInstance(report.violations[0].to_string()));
    }
    if inst.num_colors() == 0 {
        return Ok(SearchOutcome {
            status: SearchStatus::Indeterminate,
            nodes_visited: 0,
        });
    }
    let sys = wedge_phi_matching(inst, seed)?;
    let ml = multilinear_rainbow_find(&sys.family, &sys.phi)?;
    match ml.outcome {
        MlOutcome::Exhausted => Ok(SearchOutcome {
            status: SearchStatus::Indeterminate,
            nodes_visited: ml.phi_evals,
        }),
        MlOutcome::Found { picks } => {
            let cert = RainbowCertificate {
                picks: picks
                    .iter()
                    .map(|&(j, k)| (j, sys.edges[j][k].clone()))
                    .collect(),
            };
            if !check_certificate(inst, &cert) {
                return Err(Error::Internal(
                    "algebraic selection is not a rainbow matching".into(),
                ));
            }
            Ok(SearchOutcome {
                status: SearchStatus::Found(cert),
                nodes_visited: ml.phi_evals,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::t2_partite_construction;
    use crate::gen::random_instance;
    use crate::instance::{edge, Matching, Partition};
    use crate::search::find_rainbow;

    fn random_family(t: usize, dim: usize, n: usize, seed: u64) -> (TupleFamily, PhiOracle) {
        let phi = PhiOracle::diagonal(t, dim);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tuples = Vec::new();
        while tuples.len() < n {
            let tup: Vec<FieldVector> = (0..t)
                .map(|_| FieldVector::new((0..dim).map(|_| rng.gen_range(0..Q)).collect()))
                .collect();
            let refs: Vec<&FieldVector> = tup.iter().collect();
            if phi.eval(&refs) != 0 {
                tuples.push(tup);
            }
        }
        let fam = TupleFamily::new(t, dim, tuples, &phi).unwrap();
        (fam, phi)
    }

    #[test]
    fn diagonal_form_is_multilinear() {
        assert!(PhiOracle::diagonal(3, 4).spot_check_linearity(1, 20));
        assert!(PhiOracle::wedge(2, 2).spot_check_linearity(2, 10));
    }

    #[test]
    fn tightness_families_exhaust_at_bound() {
        for t in [2usize, 3] {
            for dim in [2usize, 3, 4] {
                let (fam, phi) = tightness_family(t, dim).unwrap();
                assert_eq!(fam.len(), (t - 1) * dim);
                let rep = multilinear_rainbow_find(&fam, &phi).unwrap();
                assert_eq!(rep.outcome, MlOutcome::Exhausted, "t={t} dim={dim}");
            }
        }
    }

    #[test]
    fn tightness_plus_one_diagonal_tuple_is_found() {
        // add (e_1 + e_2, e_1 + e_2) to the dim=2, t=2 family
        let (fam, phi) = tightness_family(2, 2).unwrap();
        let mut tuples = fam.tuples;
        let diag = FieldVector::new(vec![1, 1]);
        tuples.push(vec![diag.clone(), diag]);
        let fam = TupleFamily::new(2, 2, tuples, &phi).unwrap();
        let rep = multilinear_rainbow_find(&fam, &phi).unwrap();
        assert!(matches!(rep.outcome, MlOutcome::Found { .. }));
    }

    #[test]
    fn single_tuple_exhausts() {
        let (fam, phi) = random_family(2, 3, 1, 7);
        let rep = multilinear_rainbow_find(&fam, &phi).unwrap();
        assert_eq!(rep.outcome, MlOutcome::Exhausted);
    }

    #[test]
    fn random_families_above_threshold_always_found() {
        for t in [2usize, 3] {
            for dim in [2usize, 4, 8] {
                for seed in 0..5 {
                    let n = (t - 1) * dim + 1;
                    let (fam, phi) = random_family(t, dim, n, seed * 100 + dim as u64);
                    let rep = multilinear_rainbow_find(&fam, &phi).unwrap();
                    assert!(
                        matches!(rep.outcome, MlOutcome::Found { .. }),
                        "t={t} dim={dim} seed={seed}"
                    );
                }
            }
        }
    }

    #[test]
    fn general_position_all_minors_nonzero() {
        let vecs = general_position_vectors(8, 4, 42).unwrap();
        for s in subsets_of(8, 4) {
            let mat: Vec<Vec<u64>> = s.iter().map(|&i| vecs[i].coords.clone()).collect();
            assert_ne!(det_mod(&mat, Q), 0);
        }
    }

    #[test]
    fn tiny_field_cannot_hold_general_position() {
        // over F_2 any 5 vectors in dim 2 repeat, so some pair is dependent
        let vecs = general_position_vectors_mod(2, 8, 2, 0).unwrap();
        let mut some_zero = false;
        for s in subsets_of(8, 2) {
            let mat: Vec<Vec<u64>> = s.iter().map(|&i| vecs[i].coords.clone()).collect();
            if det_mod(&mat, 2) == 0 {
                some_zero = true;
            }
        }
        assert!(some_zero);
    }

    #[test]
    fn wedge_phi_detects_matchings_exactly() {
        let inst = random_instance(2, 2, 8, 6, true, 9).unwrap();
        let sys = wedge_phi_matching(&inst, 1).unwrap();
        // collect all vectors with their edges and test every pair
        let flat: Vec<(&FieldVector, &Edge)> = sys
            .family
            .tuples
            .iter()
            .zip(&sys.edges)
            .flat_map(|(tup, es)| tup.iter().zip(es.iter()))
            .collect();
        for (xa, ea) in &flat {
            for (xb, eb) in &flat {
                let v = sys.phi.eval(&[xa, xb]);
                assert_eq!(v != 0, ea.is_disjoint(eb), "{ea:?} {eb:?}");
            }
        }
    }

    #[test]
    fn partite_instance_above_threshold_is_found() {
        // threshold (t-1)*t^r = 4; N = 9 distinct partite matchings
        let partition = Partition::consecutive(2, 3);
        let mut matchings = Vec::new();
        for a in 0..3u32 {
            for b in 0..3u32 {
                matchings.push(Matching::new(vec![
                    edge(&[a, 3 + b]),
                    edge(&[(a + 1) % 3, 3 + (b + 1) % 3]),
                ]));
            }
        }
        let inst = Instance::new(2, 2, 6, Some(partition), matchings);
        let out = rainbow_via_multilinear(&inst, &SearchBudget::default(), 5).unwrap();
        assert!(out.found().is_some());
    }

    #[test]
    fn extremal_pair_is_indeterminate_here_but_none_exists_by_search() {
        let partition = Partition::consecutive(2, 2);
        let matchings = vec![
            Matching::new(vec![edge(&[0, 2]), edge(&[1, 3])]),
            Matching::new(vec![edge(&[0, 3]), edge(&[1, 2])]),
        ];
        let inst = Instance::new(2, 2, 4, Some(partition), matchings);
        let out = rainbow_via_multilinear(&inst, &SearchBudget::default(), 0).unwrap();
        assert!(matches!(out.status, SearchStatus::Indeterminate));
        assert!(find_rainbow(&inst, 2, &SearchBudget::default())
            .unwrap()
            .none_exists());
    }

    #[test]
    fn agreement_with_oracle_on_t2_partite() {
        let inst = t2_partite_construction(3).unwrap();
        let out = rainbow_via_multilinear(&inst, &SearchBudget::default(), 3).unwrap();
        assert!(matches!(out.status, SearchStatus::Indeterminate));
        assert!(find_rainbow(&inst, 2, &SearchBudget::default())
            .unwrap()
            .none_exists());
    }

    #[test]
    fn empty_instance_is_indeterminate() {
        let inst = Instance::new(2, 2, 4, None, vec![]);
        let out = rainbow_via_multilinear(&inst, &SearchBudget::default(), 0).unwrap();
        assert!(matches!(out.status, SearchStatus::Indeterminate));
    }
}
