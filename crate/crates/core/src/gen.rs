//! Seeded random instance generation for tests, fuzzing and batch runs.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::instance::{edge, Instance, Matching};
use crate::{Error, Result};

/// Random family of `n` size-`t` matchings on `num_vertices` vertices: each
/// matching covers `t*r` vertices of a fresh random shuffle. With `distinct`,
/// duplicate matchings (after canonicalization) are rejected and resampled.
pub fn random_instance(
    r: u32,
    t: u32,
    num_vertices: u32,
    n: usize,
    distinct: bool,
    seed: u64,
) -> Result<Instance> {
    if num_vertices < r * t {
        return Err(Error::Param(format!(
            "need at least rt = {} vertices, got {num_vertices}",
            r * t
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let verts: Vec<u32> = (0..num_vertices).collect();
    let mut matchings: Vec<Matching> = Vec::new();
    let mut attempts = 0usize;
    while matchings.len() < n {
        attempts += 1;
        if attempts > 1000 * n + 1000 {
            return Err(Error::Param(format!(
                "could not sample {n} distinct matchings on {num_vertices} vertices"
            )));
        }
        let mut pool = verts.clone();
        pool.shuffle(&mut rng);
        let mut edges = Vec::with_capacity(t as usize);
        for i in 0..t as usize {
            let lo = i * r as usize;
            edges.push(edge(&pool[lo..lo + r as usize]));
        }
        let mut m = Matching::new(edges);
        // canonical edge order so duplicate detection is structural
        let tmp = Instance::new(r, t, num_vertices, None, vec![m]);
        m = tmp.matchings.into_iter().next().unwrap();
        if distinct && matchings.contains(&m) {
            continue;
        }
        matchings.push(m);
    }
    let mut inst = Instance::new(r, t, num_vertices, None, matchings);
    inst.metadata.insert("generator".into(), "random".into());
    inst.metadata.insert("seed".into(), seed.to_string());
    Ok(inst)
}
