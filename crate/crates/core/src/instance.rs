//! Canonical data model for rainbow-matching instances: edges, matchings,
//! certificates, validation and bit-exact JSON I/O.
//!
//! Colors are positional: matching `j` in an [`Instance`] is color `j`.
//! Matchings form a multiset (repeats are legal), so canonicalization sorts
//! vertices inside edges and edges inside matchings, but never reorders the
//! matchings themselves.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type VertexId = u32;

/// Vertex count above which the `u128` bitmask fast path is unavailable and
/// edge operations fall back to merge scans over sorted vertex lists.
pub const MASK_CAP: u32 = 128;

/// An edge: a set of `r` distinct vertices, stored sorted ascending.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Edge {
    verts: Vec<VertexId>,
}

impl Edge {
    pub fn new(mut verts: Vec<VertexId>) -> Result<Self> {
        verts.sort_unstable();
        let before = verts.len();
        verts.dedup();
        if verts.len() != before {
            return Err(Error::Param("edge has a repeated vertex".into()));
        }
        Ok(Edge { verts })
    }

    pub fn arity(&self) -> usize {
        self.verts.len()
    }

    pub fn verts(&self) -> &[VertexId] {
        &self.verts
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.verts.binary_search(&v).is_ok()
    }

    /// Bitmask over vertex indices; `None` when a vertex exceeds [`MASK_CAP`].
    pub fn mask128(&self) -> Option<u128> {
        let mut m = 0u128;
        for &v in &self.verts {
            if v >= MASK_CAP {
                return None;
            }
            m |= 1u128 << v;
        }
        Some(m)
    }

    pub fn is_disjoint(&self, other: &Edge) -> bool {
        match (self.mask128(), other.mask128()) {
            (Some(a), Some(b)) => a & b == 0,
            _ => {
                // merge scan over the sorted vertex lists
                let (mut i, mut j) = (0, 0);
                while i < self.verts.len() && j < other.verts.len() {
                    match self.verts[i].cmp(&other.verts[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => return false,
                    }
                }
                true
            }
        }
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.verts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// A matching: `t` pairwise-disjoint edges.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matching {
    edges: Vec<Edge>,
}

impl Matching {
    pub fn new(edges: Vec<Edge>) -> Self {
        Matching { edges }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    fn canonicalize(&mut self) {
        self.edges.sort();
    }
}

/// An r-partition of (a subset of) the vertex set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<Vec<VertexId>>,
}

impl Partition {
    pub fn new(parts: Vec<Vec<VertexId>>) -> Self {
        Partition { parts }
    }

    /// Consecutive blocks `[0..s), [s..2s), ...` of equal size.
    pub fn consecutive(num_parts: usize, part_size: usize) -> Self {
        let parts = (0..num_parts)
            .map(|p| ((p * part_size) as u32..((p + 1) * part_size) as u32).collect())
            .collect();
        Partition { parts }
    }

    pub fn parts(&self) -> &[Vec<VertexId>] {
        &self.parts
    }

    /// Part index of `v`, if covered.
    pub fn part_of(&self, v: VertexId) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(&v))
    }

    fn canonicalize(&mut self) {
        for p in &mut self.parts {
            p.sort_unstable();
        }
    }
}

/// The universal object: matchings of size `t` in an `r`-uniform hypergraph,
/// each matching a color.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub r: u32,
    pub t: u32,
    pub num_vertices: u32,
    pub partition: Option<Partition>,
    pub matchings: Vec<Matching>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl Instance {
    pub fn new(
        r: u32,
        t: u32,
        num_vertices: u32,
        partition: Option<Partition>,
        matchings: Vec<Matching>,
    ) -> Self {
        let mut inst = Instance {
            r,
            t,
            num_vertices,
            partition,
            matchings,
            metadata: BTreeMap::new(),
        };
        inst.canonicalize();
        inst
    }

    pub fn num_colors(&self) -> usize {
        self.matchings.len()
    }

    /// Sort vertices within edges (by construction of [`Edge`]) and edges
    /// within matchings; matchings keep their given order.
    pub fn canonicalize(&mut self) {
        for m in &mut self.matchings {
            m.canonicalize();
        }
        if let Some(p) = &mut self.partition {
            p.canonicalize();
        }
    }

    /// All distinct edges appearing in any matching, sorted, with the sorted
    /// list of colors containing each.
    pub fn edge_pool(&self) -> Vec<(Edge, Vec<usize>)> {
        let mut map: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
        for (j, m) in self.matchings.iter().enumerate() {
            for e in m.edges() {
                let colors = map.entry(e.clone()).or_default();
                if colors.last() != Some(&j) {
                    colors.push(j);
                }
            }
        }
        map.into_iter().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Matching index, if the violation is tied to one.
    pub matching: Option<usize>,
    /// Edge index within the matching, if tied to one.
    pub edge: Option<usize>,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.matching, self.edge) {
            (Some(m), Some(e)) => write!(f, "matching {m}, edge {e}: {}", self.rule),
            (Some(m), None) => write!(f, "matching {m}: {}", self.rule),
            _ => write!(f, "{}", self.rule),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check every instance invariant; violations are data, not failures.
pub fn validate_instance(inst: &Instance) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut push = |matching, edge, rule: String| {
        report.violations.push(Violation {
            matching,
            edge,
            rule,
        });
    };

    if let Some(p) = &inst.partition {
        if p.parts().len() != inst.r as usize {
            push(None, None, format!("partition has {} parts, expected r={}", p.parts().len(), inst.r));
        }
        let mut seen: BTreeMap<VertexId, usize> = BTreeMap::new();
        for (k, part) in p.parts().iter().enumerate() {
            for &v in part {
                if v >= inst.num_vertices {
                    push(None, None, format!("partition part {k} vertex {v} out of range"));
                }
                if let Some(prev) = seen.insert(v, k) {
                    push(None, None, format!("vertex {v} in parts {prev} and {k}"));
                }
            }
        }
    }

    for (j, m) in inst.matchings.iter().enumerate() {
        if m.len() != inst.t as usize {
            push(Some(j), None, format!("matching has {} edges, expected t={}", m.len(), inst.t));
        }
        for (k, e) in m.edges().iter().enumerate() {
            if e.arity() != inst.r as usize {
                push(Some(j), Some(k), format!("edge has {} vertices, expected r={}", e.arity(), inst.r));
            }
            for &v in e.verts() {
                if v >= inst.num_vertices {
                    push(Some(j), Some(k), format!("vertex index {v} out of range"));
                }
            }
            if let Some(p) = &inst.partition {
                let mut hits = vec![0usize; p.parts().len()];
                for &v in e.verts() {
                    if let Some(pi) = p.part_of(v) {
                        hits[pi] += 1;
                    }
                }
                if hits.iter().any(|&h| h != 1) {
                    push(Some(j), Some(k), "edge not transversal".into());
                }
            }
        }
        for a in 0..m.len() {
            for b in a + 1..m.len() {
                if !m.edges()[a].is_disjoint(&m.edges()[b]) {
                    push(Some(j), Some(b), format!("edges {a} and {b} not disjoint"));
                }
            }
        }
    }
    report
}

/// A rainbow certificate: (color, edge) picks with distinct colors,
/// membership in the picked matchings, and pairwise-disjoint edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RainbowCertificate {
    pub picks: Vec<(usize, Edge)>,
}

impl RainbowCertificate {
    pub fn size(&self) -> usize {
        self.picks.len()
    }
}

/// True iff `cert` is a valid rainbow certificate for `inst`.
pub fn check_certificate(inst: &Instance, cert: &RainbowCertificate) -> bool {
    let mut colors: Vec<usize> = cert.picks.iter().map(|(j, _)| *j).collect();
    colors.sort_unstable();
    let distinct = colors.windows(2).all(|w| w[0] != w[1]);
    if !distinct {
        return false;
    }
    for (j, e) in &cert.picks {
        match inst.matchings.get(*j) {
            None => return false,
            Some(m) => {
                if !m.edges().contains(e) {
                    return false;
                }
            }
        }
    }
    for a in 0..cert.picks.len() {
        for b in a + 1..cert.picks.len() {
            if !cert.picks[a].1.is_disjoint(&cert.picks[b].1) {
                return false;
            }
        }
    }
    true
}

/// Encode to the canonical JSON document (UTF-8, fixed key order, no floats).
pub fn encode(inst: &Instance) -> String {
    let mut canon = inst.clone();
    canon.canonicalize();
    serde_json::to_string_pretty(&canon).expect("instance serializes")
}

/// Decode and canonicalize; malformed documents and out-of-range indices are
/// rejected with diagnostics.
pub fn decode(text: &str) -> Result<Instance> {
    let mut inst: Instance =
        serde_json::from_str(text).map_err(|e| Error::Decode(e.to_string()))?;
    inst.canonicalize();
    for (j, m) in inst.matchings.iter().enumerate() {
        for (k, e) in m.edges().iter().enumerate() {
            for &v in e.verts() {
                if v >= inst.num_vertices {
                    return Err(Error::Decode(format!(
                        "matching {j}, edge {k}: index out of range ({v} >= {})",
                        inst.num_vertices
                    )));
                }
            }
        }
    }
    if let Some(p) = &inst.partition {
        for (k, part) in p.parts().iter().enumerate() {
            for &v in part {
                if v >= inst.num_vertices {
                    return Err(Error::Decode(format!(
                        "partition part {k}: index out of range ({v} >= {})",
                        inst.num_vertices
                    )));
                }
            }
        }
    }
    Ok(inst)
}

/// Convenience: build an edge from a slice, panicking on duplicates.
/// Intended for construction code where the input is trusted.
pub fn edge(verts: &[VertexId]) -> Edge {
    Edge::new(verts.to_vec()).expect("distinct vertices")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn k4_instance() -> Instance {
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

    #[test]
    fn k4_is_valid() {
        assert!(validate_instance(&k4_instance()).ok());
    }

    #[test]
    fn repeated_edge_in_matching_is_flagged() {
        let mut inst = k4_instance();
        inst.matchings[0] = Matching::new(vec![edge(&[0, 1]), edge(&[0, 1])]);
        let report = validate_instance(&inst);
        assert!(!report.ok());
        assert!(report.violations.iter().any(|v| v.rule.contains("not disjoint")));
    }

    #[test]
    fn non_transversal_edge_is_flagged() {
        let inst = Instance::new(
            2,
            2,
            4,
            Some(Partition::consecutive(2, 2)),
            vec![Matching::new(vec![edge(&[0, 1]), edge(&[2, 3])])],
        );
        let report = validate_instance(&inst);
        assert!(report
            .violations
            .iter()
            .any(|v| v.rule.contains("not transversal")));
    }

    #[test]
    fn certificate_membership_and_color_rules() {
        let inst = k4_instance();
        // {2,3} is in matching 0, not matching 2
        let bad = RainbowCertificate {
            picks: vec![(0, edge(&[0, 1])), (2, edge(&[2, 3]))],
        };
        assert!(!check_certificate(&inst, &bad));
        // repeated color
        let bad = RainbowCertificate {
            picks: vec![(0, edge(&[0, 1])), (0, edge(&[2, 3]))],
        };
        assert!(!check_certificate(&inst, &bad));
        // single valid pick
        let ok = RainbowCertificate {
            picks: vec![(1, edge(&[0, 2]))],
        };
        assert!(check_certificate(&inst, &ok));
    }

    #[test]
    fn round_trip_k4() {
        let inst = k4_instance();
        let text = encode(&inst);
        let back = decode(&text).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn decode_rejects_out_of_range() {
        let inst = Instance::new(
            2,
            2,
            3,
            None,
            vec![Matching::new(vec![edge(&[0, 1]), edge(&[2, 3])])],
        );
        let text = serde_json::to_string(&inst).unwrap();
        let err = decode(&text).unwrap_err();
        assert!(err.to_string().contains("index out of range"));
    }

    #[test]
    fn matching_order_is_color_identity() {
        let inst = k4_instance();
        let mut swapped = inst.clone();
        swapped.matchings.swap(0, 1);
        assert_ne!(inst, swapped);
    }

    #[test]
    fn mask_popcount_and_disjointness() {
        let e = edge(&[0, 5, 17]);
        assert_eq!(e.mask128().unwrap().count_ones(), 3);
        assert!(e.is_disjoint(&edge(&[1, 2, 3])));
        assert!(!e.is_disjoint(&edge(&[5, 9])));
    }

    #[test]
    fn fallback_representation_beyond_mask_cap() {
        let e = Edge::new(vec![1, 200]).unwrap();
        assert!(e.mask128().is_none());
        assert!(e.is_disjoint(&Edge::new(vec![2, 199]).unwrap()));
        assert!(!e.is_disjoint(&Edge::new(vec![200, 300]).unwrap()));
    }
}
