//! Constructive rainbow-matching finder: spread decomposition of the edge
//! family, the dollar argument selecting a lightly-shared matching, Hall
//! assignment of its residual edges, and greedy augmentation of the rest.
//! Guaranteed to succeed when N >= (tr+t)^r; below that it runs best-effort
//! and falls back to exhaustive search.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::bipartite::BipartiteMatcher;
use crate::instance::{
    check_certificate, validate_instance, Edge, Instance, RainbowCertificate, VertexId,
};
use crate::search::{find_rainbow, SearchBudget, SearchOutcome, SearchStatus};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct SpreadStep {
    /// Core S_k, at most r-1 vertices.
    pub core: Vec<VertexId>,
    /// Petal family F_k(S_k): the edges containing the core at extraction.
    pub petals: Vec<Edge>,
}

#[derive(Clone, Debug)]
pub struct SpreadDecomposition {
    pub steps: Vec<SpreadStep>,
    /// Residual family F_ell with |F_ell| <= (tr+t)^r.
    pub residual: Vec<Edge>,
    pub threshold_base: u64,
}

impl SpreadDecomposition {
    pub fn threshold(&self, r: u32) -> BigUint {
        BigUint::from(self.threshold_base).pow(r)
    }
}

/// |F(S)| * (tr+t)^|S| >= |F| in exact integers.
fn spread_ok(petal_count: usize, core_size: usize, family_size: usize, base: u64) -> bool {
    BigUint::from(petal_count) * BigUint::from(base).pow(core_size as u32)
        >= BigUint::from(family_size)
}

/// Iteratively extract maximal-core petal families until the family is small.
/// Cores grow greedily from the empty set: among the vertices keeping the
/// spread inequality true, take the one with the largest petal family, ties
/// to the lowest index.
pub fn spread_decompose(inst: &Instance) -> Result<SpreadDecomposition> {
    let report = validate_instance(inst);
    if !report.ok() {
        return Err(Error::InvalidInstance(report.violations[0].to_string()));
    }
    let base = (inst.t * inst.r + inst.t) as u64;
    let threshold = BigUint::from(base).pow(inst.r);
    let mut family: Vec<Edge> = inst.edge_pool().into_iter().map(|(e, _)| e).collect();
    let mut steps = Vec::new();
    while BigUint::from(family.len()) > threshold {
        let family_size = family.len();
        let mut core: Vec<VertexId> = Vec::new();
        let mut petals: Vec<Edge> = family.clone();
        loop {
            // candidate vertices live in the supports of the current petals
            let mut candidates: Vec<VertexId> = petals
                .iter()
                .flat_map(|e| e.verts().iter().copied())
                .filter(|v| !core.contains(v))
                .collect();
            candidates.sort_unstable();
            candidates.dedup();
            let mut best: Option<(usize, VertexId)> = None;
            for &v in &candidates {
                let count = petals.iter().filter(|e| e.contains(v)).count();
                if spread_ok(count, core.len() + 1, family_size, base) {
                    let better = match best {
                        None => true,
                        Some((bc, _)) => count > bc,
                    };
                    if better {
                        best = Some((count, v));
                    }
                }
            }
            match best {
                None => break,
                Some((_, v)) => {
                    petals.retain(|e| e.contains(v));
                    core.push(v);
                }
            }
        }
        debug_assert!(spread_ok(petals.len(), core.len(), family_size, base));
        debug_assert!(core.len() < inst.r as usize || family_size <= 1);
        family.retain(|e| !petals.contains(e));
        steps.push(SpreadStep { core, petals });
    }
    Ok(SpreadDecomposition {
        steps,
        residual: family,
        threshold_base: base,
    })
}

#[derive(Clone, Debug)]
pub struct DollarReport {
    /// Exact money per color; total equals the residual size.
    pub money: Vec<BigRational>,
    /// Smallest-index color with minimum money (at most one dollar whenever
    /// the residual fits into the color count).
    pub chosen: usize,
    /// Number of residual edges of the chosen matching.
    pub m: usize,
    /// The chosen matching's edges, residual members first.
    pub ordered: Vec<Edge>,
}

/// Distribute one dollar per residual edge in equal shares among its colors
/// and pick the poorest color.
pub fn dollar_select(decomp: &SpreadDecomposition, inst: &Instance) -> Result<DollarReport> {
    if inst.num_colors() == 0 {
        return Err(Error::Param("no matchings to select from".into()));
    }
    let pool = inst.edge_pool();
    let mut money = vec![BigRational::zero(); inst.num_colors()];
    for e in &decomp.residual {
        let colors = &pool[pool.binary_search_by(|(pe, _)| pe.cmp(e)).map_err(|_| {
            Error::Internal("residual edge missing from pool".into())
        })?]
            .1;
        let share = BigRational::new(BigInt::one(), BigInt::from(colors.len()));
        for &j in colors {
            money[j] += &share;
        }
    }
    let total: BigRational = money.iter().cloned().sum();
    debug_assert_eq!(total, BigRational::from(BigInt::from(decomp.residual.len())));
    let chosen = money
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.cmp(b))
        .map(|(j, _)| j)
        .unwrap();
    let matching = &inst.matchings[chosen];
    let mut ordered: Vec<Edge> = Vec::new();
    let mut tail: Vec<Edge> = Vec::new();
    for e in matching.edges() {
        if decomp.residual.contains(e) {
            ordered.push(e.clone());
        } else {
            tail.push(e.clone());
        }
    }
    let m = ordered.len();
    ordered.extend(tail);
    Ok(DollarReport {
        money,
        chosen,
        m,
        ordered,
    })
}

/// Assign the m residual edges of the chosen matching to distinct colors by
/// augmenting-path matching. Infeasibility while the one-dollar guarantee
/// held is an internal invariant failure.
pub fn hall_assign(report: &DollarReport, inst: &Instance) -> Result<Vec<usize>> {
    let pool = inst.edge_pool();
    let colors_of = |e: &Edge| -> Vec<usize> {
        pool.binary_search_by(|(pe, _)| pe.cmp(e))
            .map(|i| pool[i].1.clone())
            .unwrap_or_default()
    };
    let mut matcher = BipartiteMatcher::new(inst.num_colors());
    let mut guarantee = BigRational::zero();
    for e in &report.ordered[..report.m] {
        let colors = colors_of(e);
        guarantee += BigRational::new(BigInt::one(), BigInt::from(colors.len().max(1)));
        if !matcher.push_left(colors) {
            if guarantee <= BigRational::one() {
                return Err(Error::Internal(
                    "distinct-color assignment infeasible despite the one-dollar bound".into(),
                ));
            }
            return Err(Error::Budget("residual assignment infeasible".into()));
        }
    }
    Ok(matcher
        .assignment()
        .into_iter()
        .map(|c| c.expect("pushed left vertices are matched"))
        .collect())
}

/// Replace the chosen matching's non-residual edges one by one with petal
/// edges of unused colors, first-fit over stored petal order and ascending
/// colors. Err(Budget) signals best-effort failure below the threshold.
pub fn augment(
    assigned: &[usize],
    report: &DollarReport,
    decomp: &SpreadDecomposition,
    inst: &Instance,
) -> Result<RainbowCertificate> {
    let pool = inst.edge_pool();
    let colors_of = |e: &Edge| -> Vec<usize> {
        pool.binary_search_by(|(pe, _)| pe.cmp(e))
            .map(|i| pool[i].1.clone())
            .unwrap_or_default()
    };
    let t = inst.t as usize;
    let mut picks: Vec<(usize, Edge)> = assigned
        .iter()
        .zip(&report.ordered[..report.m])
        .map(|(&c, e)| (c, e.clone()))
        .collect();
    for h in report.m..t {
        let target = &report.ordered[h];
        let tail = &report.ordered[h + 1..];
        let step = decomp
            .steps
            .iter()
            .find(|s| s.petals.contains(target))
            .ok_or_else(|| {
                Error::Budget(format!("edge {target:?} has no petal family"))
            })?;
        let mut replaced = false;
        'petals: for cand in &step.petals {
            if picks.iter().any(|(_, e)| !e.is_disjoint(cand)) {
                continue;
            }
            if tail.iter().any(|e| !e.is_disjoint(cand)) {
                continue;
            }
            for color in colors_of(cand) {
                if !picks.iter().any(|(c, _)| *c == color) {
                    picks.push((color, cand.clone()));
                    replaced = true;
                    break 'petals;
                }
            }
        }
        if !replaced {
            return Err(Error::Budget(format!(
                "no replacement edge with an unused color at position {h}"
            )));
        }
    }
    let cert = RainbowCertificate { picks };
    if !check_certificate(inst, &cert) {
        return Err(Error::Internal("constructed certificate failed verification".into()));
    }
    Ok(cert)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FinderPath {
    Constructive,
    Fallback,
}

#[derive(Clone, Debug, Serialize)]
pub struct FinderReport {
    pub outcome: SearchOutcome,
    pub path: FinderPath,
    pub num_steps: usize,
    pub core_sizes: Vec<usize>,
    pub residual_size: usize,
}

/// Full pipeline with exhaustive-search fallback. With N >= (tr+t)^r the
/// constructive path must succeed; a failure there is reported as an internal
/// error instead of being hidden.
pub fn find_rainbow_constructive(inst: &Instance, budget: &SearchBudget) -> Result<FinderReport> {
    let report = validate_instance(inst);
    if !report.ok() {
        return Err(Error::InvalidInstance(report.violations[0].to_string()));
    }
    let t = inst.t as usize;
    let decomp = spread_decompose(inst)?;
    let num_steps = decomp.steps.len();
    let core_sizes: Vec<usize> = decomp.steps.iter().map(|s| s.core.len()).collect();
    let residual_size = decomp.residual.len();
    let guaranteed = BigUint::from(inst.num_colors()) >= decomp.threshold(inst.r);

    let constructive = if inst.num_colors() >= t {
        dollar_select(&decomp, inst)
            .and_then(|sel| hall_assign(&sel, inst).map(|a| (sel, a)))
            .and_then(|(sel, assigned)| augment(&assigned, &sel, &decomp, inst))
    } else {
        Err(Error::Budget("fewer colors than the target size".into()))
    };
    match constructive {
        Ok(cert) => Ok(FinderReport {
            outcome: SearchOutcome {
                status: SearchStatus::Found(cert),
                nodes_visited: 0,
            },
            path: FinderPath::Constructive,
            num_steps,
            core_sizes,
            residual_size,
        }),
        Err(Error::Budget(msg)) if !guaranteed => {
            let _ = msg;
            let outcome = find_rainbow(inst, t, budget)?;
            Ok(FinderReport {
                outcome,
                path: FinderPath::Fallback,
                num_steps,
                core_sizes,
                residual_size,
            })
        }
        Err(Error::Budget(msg)) => Err(Error::Internal(format!(
            "constructive path failed despite N >= (tr+t)^r: {msg}"
        ))),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::simple_f_upper_family;
    use crate::gen::random_instance;
    use crate::instance::{edge, Matching};

    #[test]
    fn small_family_has_trivial_decomposition() {
        let inst = simple_f_upper_family(2, 3).unwrap();
        let d = spread_decompose(&inst).unwrap();
        // pool well under the threshold (tr+t)^r = 81
        assert!(d.steps.is_empty());
        assert_eq!(d.residual.len(), inst.edge_pool().len());
    }

    #[test]
    fn large_family_extracts_steps_with_small_cores() {
        // r=2, t=2: threshold 36; 60 distinct matchings exceed it
        let inst = random_instance(2, 2, 14, 60, true, 11).unwrap();
        let d = spread_decompose(&inst).unwrap();
        let distinct = inst.edge_pool().len();
        if distinct > 36 {
            assert!(!d.steps.is_empty());
        }
        for s in &d.steps {
            assert!(s.core.len() <= 1); // r - 1
            assert!(!s.petals.is_empty());
        }
        // petals plus residual partition the pool
        let total: usize = d.steps.iter().map(|s| s.petals.len()).sum::<usize>() + d.residual.len();
        assert_eq!(total, distinct);
    }

    #[test]
    fn dollar_money_is_conserved() {
        let inst = simple_f_upper_family(2, 3).unwrap();
        let d = spread_decompose(&inst).unwrap();
        let rep = dollar_select(&d, &inst).unwrap();
        let total: BigRational = rep.money.iter().cloned().sum();
        assert_eq!(total, BigRational::from(BigInt::from(d.residual.len())));
        // the poorest color holds at most the average share
        let avg = BigRational::new(
            BigInt::from(d.residual.len()),
            BigInt::from(inst.num_colors()),
        );
        assert!(rep.money[rep.chosen] <= avg);
        assert_eq!(rep.ordered.len(), inst.t as usize);
    }

    #[test]
    fn hall_assignment_is_distinct_and_member_correct() {
        let inst = random_instance(2, 2, 8, 36, true, 3).unwrap();
        let d = spread_decompose(&inst).unwrap();
        let rep = dollar_select(&d, &inst).unwrap();
        let assigned = hall_assign(&rep, &inst).unwrap();
        assert_eq!(assigned.len(), rep.m);
        for (h, &c) in assigned.iter().enumerate() {
            assert!(inst.matchings[c].edges().contains(&rep.ordered[h]));
        }
        let mut sorted = assigned.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), assigned.len());
    }

    #[test]
    fn guarantee_at_threshold() {
        for seed in 0..25 {
            let inst = random_instance(2, 2, 8, 36, true, seed).unwrap();
            let rep = find_rainbow_constructive(&inst, &SearchBudget::default()).unwrap();
            assert_eq!(rep.path, FinderPath::Constructive, "seed {seed}");
            let cert = rep.outcome.found().expect("guaranteed Found");
            assert!(check_certificate(&inst, cert));
        }
    }

    #[test]
    fn no_rainbow_family_falls_back_to_none_exists() {
        let inst = simple_f_upper_family(2, 3).unwrap();
        let rep = find_rainbow_constructive(&inst, &SearchBudget::default()).unwrap();
        assert_eq!(rep.path, FinderPath::Fallback);
        assert!(rep.outcome.none_exists());
    }

    #[test]
    fn single_matching_short_circuits() {
        let inst = Instance::new(
            2,
            2,
            4,
            None,
            vec![Matching::new(vec![edge(&[0, 1]), edge(&[2, 3])])],
        );
        let rep = find_rainbow_constructive(&inst, &SearchBudget::default()).unwrap();
        assert_eq!(rep.path, FinderPath::Fallback);
        assert!(rep.outcome.none_exists());
    }
}
