//! Probabilistic r-partite construction over a prime field: prime selection,
//! centroid-free base sets with diagonal sum tuples, random hyperplane
//! functionals, candidate/isolated filtering, and exact combinatorial probes
//! of the underlying counting argument at toy scale.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::instance::{Instance, Matching, Partition};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    DerivedRange,
    UserSupplied,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeModulus {
    pub p: u64,
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug)]
pub enum PrimeMode {
    /// Smallest prime at or above the exact integer lower bound
    /// 2t^(t+1) * (t-1)!^((r-1)/(t-2)).
    Derived,
    /// Caller-supplied prime, only required to be prime and >= t.
    Relaxed(u64),
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn factorial(n: u64) -> BigUint {
    (1..=n).map(BigUint::from).product::<BigUint>().max(BigUint::one())
}

const PRIME_CAP: u64 = 1 << 31;

pub fn choose_prime(r: u32, t: u32, mode: PrimeMode) -> Result<PrimeModulus> {
    match mode {
        PrimeMode::Relaxed(p) => {
            if !is_prime_u64(p) {
                return Err(Error::Param(format!("{p} is not prime")));
            }
            if p < t as u64 {
                return Err(Error::Param(format!("prime {p} smaller than t={t}")));
            }
            Ok(PrimeModulus {
                p,
                provenance: Provenance::UserSupplied,
            })
        }
        PrimeMode::Derived => {
            if t < 3 {
                return Err(Error::Param(format!("derived prime range needs t >= 3, got {t}")));
            }
            // lower bound has a rational exponent; compare via the (t-2)-th
            // power: p^(t-2) >= (2t^(t+1))^(t-2) * (t-1)!^(r-1)
            let e = t - 2;
            let base = BigUint::from(2u32) * BigUint::from(t).pow(t + 1);
            let target = base.pow(e) * factorial(t as u64 - 1).pow(r - 1);
            let mut lower = target.nth_root(e);
            if lower.pow(e) < target {
                lower += 1u32;
            }
            let lower: u64 = lower
                .try_into()
                .map_err(|_| Error::Param("prime lower bound exceeds the cap".into()))?;
            if lower > PRIME_CAP {
                return Err(Error::Param(format!(
                    "prime lower bound {lower} exceeds cap {PRIME_CAP}"
                )));
            }
            let mut p = lower.max(t as u64);
            while !is_prime_u64(p) {
                p += 1;
            }
            Ok(PrimeModulus {
                p,
                provenance: Provenance::DerivedRange,
            })
        }
    }
}

/// Base set A plus the derived diagonal tuples y_{i,h} = a_h for i < t and
/// y_{t,h} = -(t-1) a_h mod P. The mixed sums y_{1,h_1} + .. + y_{t,h_t}
/// vanish mod P iff h_1 = .. = h_t, because A is centroid-free for
/// x_1 + .. + x_{t-1} = (t-1) x_t and (t-1) * max(A) < P keeps the integer
/// sums from wrapping.
#[derive(Clone, Debug, Serialize)]
pub struct BehrendSystem {
    pub modulus: PrimeModulus,
    pub t: u32,
    pub base_set: Vec<u64>,
}

impl BehrendSystem {
    pub fn r_size(&self) -> usize {
        self.base_set.len()
    }

    /// y_{i+1, h+1} in F_P (0-based arguments).
    pub fn y(&self, i: usize, h: usize) -> u64 {
        let p = self.modulus.p;
        let a = self.base_set[h] % p;
        if i + 1 < self.t as usize {
            a
        } else {
            (p - mulmod(self.t as u64 - 1, a, p)) % p
        }
    }

    /// Y_i = {y_{i,h} : h}, one sorted set per row.
    pub fn y_sets(&self) -> Vec<Vec<u64>> {
        (0..self.t as usize)
            .map(|i| {
                let mut ys: Vec<u64> = (0..self.r_size()).map(|h| self.y(i, h)).collect();
                ys.sort_unstable();
                ys
            })
            .collect()
    }

    /// Exhaustive R^t check of the diagonal sum property (R <= 60), falling
    /// back to the no-wraparound guard plus centroid-freeness above.
    pub fn verify(&self) -> Result<()> {
        let p = self.modulus.p;
        let t = self.t as usize;
        let r = self.r_size();
        if r == 0 {
            return Err(Error::Param("empty base set".into()));
        }
        let mut sorted = self.base_set.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != r {
            return Err(Error::Param("base set has repeats".into()));
        }
        let max = *self.base_set.iter().max().unwrap();
        if (self.t as u64 - 1) * max >= p {
            return Err(Error::Param(format!(
                "no-wraparound guard failed: (t-1)*max(A) = {} >= P = {p}",
                (self.t as u64 - 1) * max
            )));
        }
        if r <= 60 {
            let mut hs = vec![0usize; t];
            loop {
                let sum = hs
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (i, &h)| (acc + self.y(i, h)) % p);
                let all_equal = hs.iter().all(|&h| h == hs[0]);
                if (sum == 0) != all_equal {
                    return Err(Error::Param(format!(
                        "diagonal sum property violated at indices {hs:?}"
                    )));
                }
                let mut i = t;
                loop {
                    if i == 0 {
                        return Ok(());
                    }
                    i -= 1;
                    hs[i] += 1;
                    if hs[i] < r {
                        break;
                    }
                    hs[i] = 0;
                }
            }
        }
        if !is_centroid_free(&self.base_set, self.t) {
            return Err(Error::Param("base set is not centroid-free".into()));
        }
        Ok(())
    }
}

/// No solution of x_1 + .. + x_{t-1} = (t-1) x_t in A besides all-equal.
fn is_centroid_free(a: &[u64], t: u32) -> bool {
    let t = t as usize;
    let n = a.len();
    let mut idx = vec![0usize; t];
    loop {
        let lhs: u64 = idx[..t - 1].iter().map(|&i| a[i]).sum();
        let rhs = (t as u64 - 1) * a[idx[t - 1]];
        let all_equal = idx.iter().all(|&i| i == idx[0]);
        if lhs == rhs && !all_equal {
            return false;
        }
        let mut i = t;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < n {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// Can `x` join `a` and keep it centroid-free? Only combinations involving
/// `x` need rechecking.
fn extends_centroid_free(a: &[u64], x: u64, t: u32) -> bool {
    let mut s = a.to_vec();
    s.push(x);
    // desk scale: |A| stays small, a full recheck is cheap and obviously right
    is_centroid_free(&s, t)
}

#[derive(Clone, Copy, Debug)]
pub enum BehrendMethod {
    /// Branch-and-bound maximum centroid-free subset of the admissible range,
    /// lexicographically first among maximums. Small P only.
    Exhaustive,
    /// Ascending greedy scan, capped at 60 elements.
    Greedy,
    /// Behrend digit construction: densest norm shell in the no-carry digit
    /// box, then greedy augmentation. `base` is the digit base, `digits` the
    /// number of digit positions.
    Sphere { base: u64, digits: u32 },
}

pub fn behrend_system(
    modulus: &PrimeModulus,
    t: u32,
    method: BehrendMethod,
) -> Result<BehrendSystem> {
    if t < 3 {
        return Err(Error::Param(format!("behrend system needs t >= 3, got {t}")));
    }
    let p = modulus.p;
    let dmax = (p - 1) / (t as u64 - 1); // keeps (t-1)*max(A) < P
    let base_set = match method {
        BehrendMethod::Exhaustive => {
            if dmax > 200 {
                return Err(Error::Param(format!(
                    "exhaustive method limited to small ranges, got 0..={dmax}"
                )));
            }
            let domain: Vec<u64> = (0..=dmax).collect();
            let mut best: Vec<u64> = Vec::new();
            // include-first DFS; the first maximum found is lexicographically
            // least
            fn dfs(domain: &[u64], idx: usize, cur: &mut Vec<u64>, best: &mut Vec<u64>, t: u32) {
                if cur.len() + (domain.len() - idx) <= best.len() {
                    return;
                }
                if idx == domain.len() {
                    if cur.len() > best.len() {
                        *best = cur.clone();
                    }
                    return;
                }
                if extends_centroid_free(cur, domain[idx], t) {
                    cur.push(domain[idx]);
                    dfs(domain, idx + 1, cur, best, t);
                    cur.pop();
                }
                dfs(domain, idx + 1, cur, best, t);
            }
            dfs(&domain, 0, &mut Vec::new(), &mut best, t);
            best
        }
        BehrendMethod::Greedy => {
            let mut a: Vec<u64> = Vec::new();
            for x in 0..=dmax {
                if a.len() >= 60 {
                    break;
                }
                if extends_centroid_free(&a, x, t) {
                    a.push(x);
                }
            }
            a
        }
        BehrendMethod::Sphere { base, digits } => {
            let digit_max = (base - 1) / (t as u64 - 1);
            if digit_max == 0 || digits == 0 {
                return Err(Error::Param(format!(
                    "sphere box empty for base {base}, t {t}"
                )));
            }
            // enumerate the no-carry box, bucket by squared norm
            let mut shells: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
            let mut ds = vec![0u64; digits as usize];
            loop {
                let value = ds.iter().rev().fold(0u64, |acc, &d| acc * base + d);
                if value <= dmax {
                    let norm: u64 = ds.iter().map(|&d| d * d).sum();
                    shells.entry(norm).or_default().push(value);
                }
                let mut i = digits as usize;
                let mut done = false;
                loop {
                    if i == 0 {
                        done = true;
                        break;
                    }
                    i -= 1;
                    ds[i] += 1;
                    if ds[i] <= digit_max {
                        break;
                    }
                    ds[i] = 0;
                }
                if done {
                    break;
                }
            }
            let mut a = shells
                .into_iter()
                .max_by_key(|(norm, vals)| (vals.len(), u64::MAX - norm))
                .map(|(_, vals)| vals)
                .unwrap_or_default();
            a.sort_unstable();
            // shells alone are thin at small P; grow greedily inside the range
            for x in 0..=dmax {
                if a.len() >= 60 {
                    break;
                }
                if !a.contains(&x) && extends_centroid_free(&a, x, t) {
                    a.push(x);
                }
            }
            a.sort_unstable();
            a
        }
    };
    let sys = BehrendSystem {
        modulus: *modulus,
        t,
        base_set,
    };
    sys.verify()?;
    Ok(sys)
}

/// Asymptotic comparison floor P * exp(-12 sqrt(ln P ln t)), reported as an
/// integer alongside achieved R; never asserted.
pub fn asymptotic_r_floor(p: u64, t: u32) -> u64 {
    let lp = (p as f64).ln();
    let lt = (t as f64).ln();
    (p as f64 * (-12.0 * (lp * lt).sqrt()).exp()).floor() as u64
}

/// Linear functional on F_P^{tr} restricted to the hyperplane sum(c) = 0.
#[derive(Clone, Debug, Serialize)]
pub struct Functional {
    pub p: u64,
    pub coeffs: Vec<u64>,
    pub seed: Option<u64>,
}

impl Functional {
    /// f applied to a 0/1 vector given by its support mask.
    pub fn eval_mask(&self, mask: u128) -> u64 {
        let mut acc = 0u64;
        for (s, &c) in self.coeffs.iter().enumerate() {
            if mask >> s & 1 == 1 {
                acc = (acc + c) % self.p;
            }
        }
        acc
    }
}

/// Uniform over the hyperplane: tr-1 free coordinates, last one balances the
/// sum to zero.
pub fn sample_functional(p: u64, tr: usize, seed: u64) -> Functional {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs: Vec<u64> = (0..tr - 1).map(|_| rng.gen_range(0..p)).collect();
    let sum = coeffs.iter().fold(0u64, |a, &c| (a + c) % p);
    coeffs.push((p - sum) % p);
    Functional {
        p,
        coeffs,
        seed: Some(seed),
    }
}

/// All t-tuples (z_1..z_t), z_i the indicator of an edge through vertex i of
/// the first part, summing to the all-ones vector: one permutation of the
/// part per part beyond the first, t!^(r-1) tuples in total.
#[derive(Clone, Debug)]
pub struct TupleLattice {
    pub r: u32,
    pub t: u32,
    /// tuples[k][i] = support mask of z_{i+1} over the tr coordinates
    pub tuples: Vec<Vec<u128>>,
}

const LATTICE_CAP: u64 = 10_000_000;

fn permutations(t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    let mut used = vec![false; t];
    fn go(t: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for v in 0..t {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                go(t, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    go(t, &mut cur, &mut used, &mut out);
    out
}

pub fn tuple_lattice(r: u32, t: u32) -> Result<TupleLattice> {
    if r < 2 || t < 2 {
        return Err(Error::Param(format!("lattice needs r, t >= 2, got r={r}, t={t}")));
    }
    if t as usize * r as usize > 128 {
        return Err(Error::Param("tr exceeds 128 coordinates".into()));
    }
    let tf: u64 = (1..=t as u64).product();
    let size = tf.checked_pow(r - 1).filter(|&s| s <= LATTICE_CAP);
    if size.is_none() {
        return Err(Error::Budget(format!(
            "lattice size t!^(r-1) exceeds cap {LATTICE_CAP}"
        )));
    }
    let perms = permutations(t as usize);
    let mut tuples: Vec<Vec<u128>> = Vec::new();
    let mut idx = vec![0usize; r as usize - 1];
    loop {
        let mut tuple = Vec::with_capacity(t as usize);
        for i in 0..t as usize {
            let mut mask: u128 = 1 << i;
            for (p, &pi) in idx.iter().enumerate() {
                let part_base = (p + 1) * t as usize;
                mask |= 1 << (part_base + perms[pi][i]);
            }
            tuple.push(mask);
        }
        tuples.push(tuple);
        let mut p = idx.len();
        let mut done = false;
        loop {
            if p == 0 {
                done = true;
                break;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < perms.len() {
                break;
            }
            idx[p] = 0;
        }
        if done {
            break;
        }
    }
    Ok(TupleLattice { r, t, tuples })
}

/// The identity-permutation tuple: edge i takes element i of every part.
pub fn canonical_tuple(r: u32, t: u32) -> Vec<u128> {
    (0..t as usize)
        .map(|i| {
            (0..r as usize).fold(0u128, |m, p| m | 1 << (p * t as usize + i))
        })
        .collect()
}

fn tuple_to_matching(tuple: &[u128], tr: usize) -> Matching {
    Matching::new(
        tuple
            .iter()
            .map(|&mask| {
                let verts: Vec<u32> = (0..tr as u32).filter(|&v| mask >> v & 1 == 1).collect();
                crate::instance::edge(&verts)
            })
            .collect(),
    )
}

/// Candidate test per the direct definition: f(z_i) in Y_i for every i.
fn is_candidate(tuple: &[u128], f: &Functional, y_sets: &[Vec<u64>]) -> bool {
    tuple
        .iter()
        .zip(y_sets)
        .all(|(&z, ys)| ys.binary_search(&f.eval_mask(z)).is_ok())
}

/// Candidate test per the row characterization: some h with
/// (f(z_1)..f(z_t)) = (y_{1,h}..y_{t,h}).
fn is_candidate_by_row(tuple: &[u128], f: &Functional, sys: &BehrendSystem) -> bool {
    (0..sys.r_size()).any(|h| {
        tuple
            .iter()
            .enumerate()
            .all(|(i, &z)| f.eval_mask(z) == sys.y(i, h))
    })
}

/// Emit the matchings of the isolated candidate tuples. The strong property
/// holds for every functional: t pairwise-disjoint edges from isolated
/// candidates assemble into a candidate tuple sharing a slot with each of
/// them, forcing all of them equal.
pub fn build_partite_family(
    r: u32,
    t: u32,
    sys: &BehrendSystem,
    f: &Functional,
) -> Result<Instance> {
    if t < 3 {
        return Err(Error::Param(format!("family needs t >= 3, got {t}")));
    }
    if sys.modulus.p != f.p {
        return Err(Error::Param(format!(
            "system modulus {} and functional modulus {} differ",
            sys.modulus.p, f.p
        )));
    }
    let tr = (t * r) as usize;
    if f.coeffs.len() != tr {
        return Err(Error::Param(format!(
            "functional has {} coefficients, expected {tr}",
            f.coeffs.len()
        )));
    }
    sys.verify()?;
    let lattice = tuple_lattice(r, t)?;
    let y_sets = sys.y_sets();
    let mut candidates: Vec<usize> = Vec::new();
    for (k, tuple) in lattice.tuples.iter().enumerate() {
        let direct = is_candidate(tuple, f, &y_sets);
        let by_row = is_candidate_by_row(tuple, f, sys);
        if direct != by_row {
            return Err(Error::Internal(
                "candidate characterizations disagree".into(),
            ));
        }
        if direct {
            candidates.push(k);
        }
    }
    // slot occupancy counts among candidates decide isolation
    let mut slot_counts: BTreeMap<(usize, u128), u32> = BTreeMap::new();
    for &k in &candidates {
        for (i, &z) in lattice.tuples[k].iter().enumerate() {
            *slot_counts.entry((i, z)).or_default() += 1;
        }
    }
    let isolated: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&k| {
            lattice.tuples[k]
                .iter()
                .enumerate()
                .all(|(i, &z)| slot_counts[&(i, z)] == 1)
        })
        .collect();
    let matchings = isolated
        .iter()
        .map(|&k| tuple_to_matching(&lattice.tuples[k], tr))
        .collect();
    let partition = Partition::consecutive(r as usize, t as usize);
    let mut inst = Instance::new(r, t, t * r, Some(partition), matchings);
    let mut meta = BTreeMap::new();
    meta.insert("generator".to_string(), "prob-f".to_string());
    meta.insert("r".to_string(), r.to_string());
    meta.insert("t".to_string(), t.to_string());
    meta.insert("prime".to_string(), sys.modulus.p.to_string());
    meta.insert("behrend_r".to_string(), sys.r_size().to_string());
    meta.insert("n".to_string(), isolated.len().to_string());
    if let Some(seed) = f.seed {
        meta.insert("seed".to_string(), seed.to_string());
    }
    inst.metadata = meta;
    Ok(inst)
}

/// Expected isolated-count floor t!^(r-1) * R / (2 P^(t-1)), reported as an
/// exact rational string.
pub fn expected_isolated_floor(r: u32, t: u32, sys: &BehrendSystem) -> String {
    use num_rational::Ratio;
    let tf: BigUint = factorial(t as u64);
    let num = tf.pow(r - 1) * BigUint::from(sys.r_size());
    let den = BigUint::from(2u32) * BigUint::from(sys.modulus.p).pow(t - 1);
    let ratio = Ratio::new(
        num_bigint::BigInt::from(num),
        num_bigint::BigInt::from(den),
    );
    format!("{}/{}", ratio.numer(), ratio.denom())
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub p: u64,
    pub r_size: usize,
    pub hyperplane_size: u64,
    pub candidate_count: u64,
    pub isolated_count: u64,
    /// hyperplane_size * R / P^(t-1), an exact integer
    pub expected_candidates: u64,
}

const PROBE_CAP: u64 = 30_000_000;

/// Exhaustively enumerate every functional on the zero-sum hyperplane and
/// count how often the canonical tuple is a candidate / isolated candidate.
/// The candidate frequency is exactly R / P^(t-1).
pub fn probability_probe(r: u32, t: u32, sys: &BehrendSystem) -> Result<ProbeReport> {
    sys.verify()?;
    let p = sys.modulus.p;
    let tr = (t * r) as usize;
    let free = tr - 1;
    let hyperplane = p
        .checked_pow(free as u32)
        .filter(|&h| h <= PROBE_CAP)
        .ok_or_else(|| Error::Budget(format!("P^(tr-1) exceeds probe cap {PROBE_CAP}")))?;
    let lattice = tuple_lattice(r, t)?;
    let fixed = canonical_tuple(r, t);
    let fixed_index = lattice
        .tuples
        .iter()
        .position(|tu| *tu == fixed)
        .ok_or_else(|| Error::Internal("canonical tuple missing from lattice".into()))?;
    let y_sets = sys.y_sets();

    let mut candidate_count = 0u64;
    let mut isolated_count = 0u64;
    let mut coeffs = vec![0u64; tr];
    let mut f = Functional {
        p,
        coeffs: coeffs.clone(),
        seed: None,
    };
    for _ in 0..hyperplane {
        let sum = coeffs[..free].iter().fold(0u64, |a, &c| (a + c) % p);
        coeffs[tr - 1] = (p - sum) % p;
        f.coeffs.copy_from_slice(&coeffs);
        if is_candidate(&fixed, &f, &y_sets) {
            candidate_count += 1;
            let lonely = lattice.tuples.iter().enumerate().all(|(k, tuple)| {
                k == fixed_index
                    || !is_candidate(tuple, &f, &y_sets)
                    || tuple.iter().zip(&fixed).all(|(a, b)| a != b)
            });
            if lonely {
                isolated_count += 1;
            }
        }
        // odometer over the free coordinates
        let mut i = 0;
        while i < free {
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
    }
    // hyperplane * R / P^(t-1) = R * P^(tr-t)
    let expected_candidates = (sys.r_size() as u64) * p.pow(t * r - t);
    Ok(ProbeReport {
        p,
        r_size: sys.r_size(),
        hyperplane_size: hyperplane,
        candidate_count,
        isolated_count,
        expected_candidates,
    })
}

/// Rank of the 2t x tr matrix of both tuples' 0/1 vectors over F_P.
pub fn span_dimension(a: &[u128], b: &[u128], tr: usize, p: u64) -> usize {
    let mut rows: Vec<Vec<u64>> = a
        .iter()
        .chain(b.iter())
        .map(|&mask| (0..tr).map(|s| (mask >> s & 1) as u64).collect())
        .collect();
    let mut rank = 0;
    for col in 0..tr {
        let pivot = (rank..rows.len()).find(|&i| rows[i][col] % p != 0);
        let Some(pivot) = pivot else { continue };
        rows.swap(rank, pivot);
        let inv = powmod(rows[rank][col], p - 2, p);
        for s in col..tr {
            rows[rank][s] = mulmod(rows[rank][s], inv, p);
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][col] % p != 0 {
                let factor = rows[i][col] % p;
                for s in col..tr {
                    let sub = mulmod(factor, rows[rank][s], p);
                    rows[i][s] = (rows[i][s] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Intersection graph of the two tuples' supports, summarized as the induced
/// partition of {1..t}: left i and right i always meet, so each component is
/// a diagonal-symmetric index set.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentGraph {
    pub components: Vec<Vec<usize>>,
}

impl ComponentGraph {
    pub fn num_components(&self) -> usize {
        self.components.len()
    }
}

pub fn component_graph(a: &[u128], b: &[u128]) -> ComponentGraph {
    let t = a.len();
    let mut parent: Vec<usize> = (0..t).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for i in 0..t {
        for j in 0..t {
            if a[i] & b[j] != 0 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..t {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    ComponentGraph {
        components: groups.into_values().collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DimCount {
    pub d: usize,
    pub count: u64,
    /// count^(t-2) <= (t^t)^(t-2) * (t-1)!^((r-1)(d-t)), compared exactly
    pub within_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountingReport {
    pub per_d: Vec<DimCount>,
    pub factorial_inequality_ok: bool,
}

/// Integer-power form of the factorial inequality a! <= b!^((a-1)/(b-1)):
/// a!^(b-1) <= b!^(a-1), for 1 <= a <= b <= 12.
pub fn factorial_inequality_holds() -> bool {
    for b in 2u64..=12 {
        for a in 1..=b {
            if factorial(a).pow(b as u32 - 1) > factorial(b).pow(a as u32 - 1) {
                return false;
            }
        }
    }
    true
}

/// Count, per span dimension d, the lattice tuples sharing a slot with the
/// canonical tuple, and compare against the exact counting bound.
pub fn counting_probe(r: u32, t: u32, p: u64) -> Result<CountingReport> {
    if t < 3 {
        return Err(Error::Param(format!("counting probe needs t >= 3, got {t}")));
    }
    if !is_prime_u64(p) {
        return Err(Error::Param(format!("{p} is not prime")));
    }
    let lattice = tuple_lattice(r, t)?;
    let fixed = canonical_tuple(r, t);
    let tr = (t * r) as usize;
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for tuple in &lattice.tuples {
        if *tuple == fixed {
            continue;
        }
        if tuple.iter().zip(&fixed).any(|(a, b)| a == b) {
            let d = span_dimension(&fixed, tuple, tr, p);
            *counts.entry(d).or_default() += 1;
        }
    }
    let per_d = counts
        .into_iter()
        .map(|(d, count)| {
            // both sides raised to the (t-2)-th power to clear the rational
            // exponent
            let lhs = BigUint::from(count).pow(t - 2);
            let rhs = BigUint::from(t).pow(t * (t - 2))
                * factorial(t as u64 - 1).pow((r - 1) * (d as u32 - t));
            DimCount {
                d,
                count,
                within_bound: lhs <= rhs,
            }
        })
        .collect();
    Ok(CountingReport {
        per_d,
        factorial_inequality_ok: factorial_inequality_holds(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::validate_instance;
    use crate::search::{check_strong_property, SearchBudget};

    fn p7() -> PrimeModulus {
        choose_prime(3, 3, PrimeMode::Relaxed(7)).unwrap()
    }

    #[test]
    fn derived_prime_small_case() {
        // t=3, r=5: bound 2 * 81 * 2^4 = 2592, next prime 2593
        let m = choose_prime(5, 3, PrimeMode::Derived).unwrap();
        assert_eq!(m.p, 2593);
        assert_eq!(m.provenance, Provenance::DerivedRange);
    }

    #[test]
    fn derived_prime_cap() {
        assert!(choose_prime(40, 3, PrimeMode::Derived).is_err());
    }

    #[test]
    fn relaxed_prime_checks() {
        assert!(choose_prime(3, 3, PrimeMode::Relaxed(6)).is_err());
        assert!(choose_prime(3, 5, PrimeMode::Relaxed(3)).is_err());
        assert_eq!(choose_prime(3, 3, PrimeMode::Relaxed(7)).unwrap().p, 7);
    }

    #[test]
    fn primality_spot_checks() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(2593));
        assert!(is_prime_u64((1 << 61) - 1));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(2595));
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn exhaustive_base_set_at_p7() {
        let sys = behrend_system(&p7(), 3, BehrendMethod::Exhaustive).unwrap();
        assert_eq!(sys.base_set, vec![0, 1, 3]);
        assert_eq!(sys.r_size(), 3);
    }

    #[test]
    fn singleton_base_set_is_valid() {
        let sys = BehrendSystem {
            modulus: p7(),
            t: 3,
            base_set: vec![0],
        };
        sys.verify().unwrap();
    }

    #[test]
    fn sphere_reaches_three_at_p101() {
        let m = choose_prime(3, 3, PrimeMode::Relaxed(101)).unwrap();
        let sys = behrend_system(&m, 3, BehrendMethod::Sphere { base: 10, digits: 2 }).unwrap();
        assert!(sys.r_size() >= 3, "got R = {}", sys.r_size());
    }

    #[test]
    fn verify_rejects_wraparound_and_centroids() {
        let bad = BehrendSystem {
            modulus: p7(),
            t: 3,
            base_set: vec![0, 1, 2], // 0 + 2 = 2 * 1
        };
        assert!(bad.verify().is_err());
        let bad = BehrendSystem {
            modulus: p7(),
            t: 3,
            base_set: vec![0, 6], // 2 * 6 >= 7 wraps
        };
        assert!(bad.verify().is_err());
    }

    #[test]
    fn functional_hyperplane_and_determinism() {
        let f = sample_functional(7, 6, 42);
        assert_eq!(f.coeffs.iter().fold(0, |a, &c| (a + c) % 7), 0);
        assert_eq!(f.coeffs, sample_functional(7, 6, 42).coeffs);
        assert_ne!(f.coeffs, sample_functional(7, 6, 43).coeffs);
    }

    #[test]
    fn lattice_counts() {
        let lat = tuple_lattice(3, 3).unwrap();
        assert_eq!(lat.tuples.len(), 36); // 3!^2
        let lat = tuple_lattice(2, 3).unwrap();
        assert_eq!(lat.tuples.len(), 6);
        // every tuple sums to the all-ones vector with disjoint supports
        for tuple in &lat.tuples {
            let mut acc: u128 = 0;
            for &z in tuple {
                assert_eq!(acc & z, 0);
                acc |= z;
            }
            assert_eq!(acc, (1u128 << 6) - 1);
        }
    }

    #[test]
    fn family_strong_property_over_seeds() {
        let sys = behrend_system(&p7(), 3, BehrendMethod::Exhaustive).unwrap();
        for seed in 0..10 {
            let f = sample_functional(7, 9, seed);
            let inst = build_partite_family(3, 3, &sys, &f).unwrap();
            assert!(validate_instance(&inst).ok());
            assert!(check_strong_property(&inst, &SearchBudget::default())
                .unwrap()
                .holds());
        }
    }

    #[test]
    fn probe_exact_probability() {
        // t=3, r=2, P=7, R=2: 16807 functionals, 686 candidates, >= 343 isolated
        let modulus = p7();
        let sys = BehrendSystem {
            modulus,
            t: 3,
            base_set: vec![0, 1],
        };
        sys.verify().unwrap();
        let report = probability_probe(2, 3, &sys).unwrap();
        assert_eq!(report.hyperplane_size, 16807);
        assert_eq!(report.expected_candidates, 686);
        assert_eq!(report.candidate_count, 686);
        assert!(report.isolated_count >= 343);
    }

    #[test]
    fn probe_trivial_system() {
        let sys = BehrendSystem {
            modulus: p7(),
            t: 3,
            base_set: vec![0],
        };
        let report = probability_probe(2, 3, &sys).unwrap();
        assert_eq!(report.candidate_count, 343);
        assert_eq!(report.expected_candidates, 343);
    }

    #[test]
    fn identical_tuples_span_t() {
        let z = canonical_tuple(3, 3);
        assert_eq!(span_dimension(&z, &z, 9, 7), 3);
        let g = component_graph(&z, &z);
        assert_eq!(g.num_components(), 3);
    }

    #[test]
    fn span_and_components_at_t3_r3() {
        let lat = tuple_lattice(3, 3).unwrap();
        let fixed = canonical_tuple(3, 3);
        let mut equality_everywhere = true;
        for tuple in &lat.tuples {
            if *tuple == fixed {
                continue;
            }
            if tuple.iter().zip(&fixed).any(|(a, b)| a == b) {
                let d = span_dimension(&fixed, tuple, 9, 7);
                assert!(d == 4 || d == 5, "d = {d}");
                let l = component_graph(&fixed, tuple).num_components();
                assert!(l >= 6 - d);
                if l != 6 - d {
                    equality_everywhere = false;
                }
            }
        }
        assert!(equality_everywhere, "component count should match 2t - d here");
    }

    #[test]
    fn counting_bounds_hold() {
        let report = counting_probe(3, 3, 7).unwrap();
        assert!(!report.per_d.is_empty());
        for dc in &report.per_d {
            assert!(dc.within_bound, "bound violated at d = {}", dc.d);
        }
        assert!(report.factorial_inequality_ok);
    }

    #[test]
    fn factorial_inequality_edge_cases() {
        // a = 1: both sides are 1; a = 2, b = 3: 4 <= 6
        assert!(factorial_inequality_holds());
        assert!(factorial(2).pow(2) <= factorial(3).pow(1));
    }
}
