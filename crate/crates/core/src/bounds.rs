//! Exact bound formulas for the maximum number of size-t matchings in an
//! r-uniform hypergraph without a rainbow matching of size t. All arithmetic
//! is big-integer or big-rational; no floating point.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde_json::json;
use std::fmt;

use crate::{Error, Result};

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Setting {
    /// Partite families; also valid lower bounds for the general problem.
    Partite,
    General,
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Setting::Partite => write!(f, "partite"),
            Setting::General => write!(f, "general"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LowerBound {
    pub name: String,
    pub setting: Setting,
    pub value: BigUint,
}

#[derive(Clone, Debug)]
pub struct BoundsReport {
    pub r: u32,
    pub t: u32,
    /// (t-1) * C(tr, r), general setting.
    pub upper_general: BigUint,
    /// (t-1) * t^r, partite setting.
    pub upper_partite: BigUint,
    /// (tr+t)^r, above which the constructive finder is guaranteed.
    pub finder_threshold: BigUint,
    /// C_r = (r+1)^r in the sandwich C_r * t^r.
    pub c_upper: BigUint,
    /// c_r = (3r)^{-r} in the sandwich c_r * t^r, exact rational.
    pub c_lower: BigRational,
    /// f(2,t) = 2t - 2, exact, only at r = 2.
    pub exact_partite: Option<BigUint>,
    pub lower_bounds: Vec<LowerBound>,
    pub best_lower: Option<LowerBound>,
}

/// Lower bounds from each applicable construction formula, largest first.
fn lower_bound_rows(r: u64, t: u64) -> Vec<LowerBound> {
    let mut rows = Vec::new();
    if r >= 3 && t / r >= 2 {
        rows.push(LowerBound {
            name: "fixed-r".into(),
            setting: Setting::Partite,
            value: BigUint::from(t / r - 1).pow(r as u32),
        });
    }
    if r >= 2 && r % 2 == 0 {
        rows.push(LowerBound {
            name: "simple-F".into(),
            setting: Setting::General,
            value: binomial((t * r - 2) / 2, r - 1) * BigUint::from(2u32).pow(r as u32 - 1),
        });
    }
    if r >= 3 && r % 2 == 1 {
        rows.push(LowerBound {
            name: "simple-F".into(),
            setting: Setting::General,
            value: binomial((t * r - t - 2) / 2, r - 2) * BigUint::from(2u32).pow(r as u32 - 2),
        });
    }
    if r >= 3 && r % 2 == 1 {
        // (t(t-1))^((r-1)/2)
        rows.push(LowerBound {
            name: "simple-f".into(),
            setting: Setting::Partite,
            value: BigUint::from(t * (t - 1)).pow(((r - 1) / 2) as u32),
        });
    }
    if r >= 4 && r % 2 == 0 {
        rows.push(LowerBound {
            name: "simple-f".into(),
            setting: Setting::Partite,
            value: BigUint::from(t * (t - 1)).pow(((r - 2) / 2) as u32),
        });
    }
    if t == 2 {
        rows.push(LowerBound {
            name: "t2-complete".into(),
            setting: Setting::General,
            value: binomial(2 * r, r) / BigUint::from(2u32),
        });
        rows.push(LowerBound {
            name: "t2-partite".into(),
            setting: Setting::Partite,
            value: BigUint::from(2u32).pow(r as u32 - 1),
        });
    }
    if r == 2 {
        rows.push(LowerBound {
            name: "exact-f(2,t)".into(),
            setting: Setting::Partite,
            value: BigUint::from(2 * t - 2),
        });
    }
    rows.sort_by(|a, b| b.value.cmp(&a.value));
    rows
}

pub fn bounds_report(r: u32, t: u32) -> Result<BoundsReport> {
    if r < 2 || t < 2 {
        return Err(Error::Param(format!("need r >= 2 and t >= 2, got r={r} t={t}")));
    }
    let (ru, tu) = (r as u64, t as u64);
    let lower_bounds = lower_bound_rows(ru, tu);
    let best_lower = lower_bounds.first().cloned();
    Ok(BoundsReport {
        r,
        t,
        upper_general: BigUint::from(tu - 1) * binomial(tu * ru, ru),
        upper_partite: BigUint::from(tu - 1) * BigUint::from(tu).pow(r),
        finder_threshold: BigUint::from(tu * ru + tu).pow(r),
        c_upper: BigUint::from(ru + 1).pow(r),
        c_lower: BigRational::new(BigInt::one(), BigInt::from(3 * ru).pow(r)),
        exact_partite: if r == 2 {
            Some(BigUint::from(2 * tu - 2))
        } else {
            None
        },
        lower_bounds,
        best_lower,
    })
}

impl BoundsReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "r": self.r,
            "t": self.t,
            "upper_general": self.upper_general.to_string(),
            "upper_partite": self.upper_partite.to_string(),
            "finder_threshold": self.finder_threshold.to_string(),
            "c_upper": self.c_upper.to_string(),
            "c_lower": self.c_lower.to_string(),
            "exact_partite": self.exact_partite.as_ref().map(|v| v.to_string()),
            "lower_bounds": self.lower_bounds.iter().map(|lb| json!({
                "name": lb.name,
                "setting": lb.setting.to_string(),
                "value": lb.value.to_string(),
            })).collect::<Vec<_>>(),
            "best_lower": self.best_lower.as_ref().map(|lb| json!({
                "name": lb.name,
                "setting": lb.setting.to_string(),
                "value": lb.value.to_string(),
            })),
        })
    }
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bounds for r={} t={}", self.r, self.t)?;
        writeln!(f, "  upper (general, (t-1)*C(tr,r)): {}", self.upper_general)?;
        writeln!(f, "  upper (partite, (t-1)*t^r):     {}", self.upper_partite)?;
        writeln!(f, "  finder threshold ((tr+t)^r):    {}", self.finder_threshold)?;
        writeln!(f, "  sandwich constants: C_r = {}, c_r = {}", self.c_upper, self.c_lower)?;
        if let Some(v) = &self.exact_partite {
            writeln!(f, "  exact partite value (r=2): {v}")?;
        }
        for lb in &self.lower_bounds {
            writeln!(f, "  lower [{}] ({}): {}", lb.name, lb.setting, lb.value)?;
        }
        match &self.best_lower {
            Some(lb) => writeln!(f, "  best lower: {} via {}", lb.value, lb.name),
            None => writeln!(f, "  best lower: none applicable"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_matches_pascal() {
        let mut row = vec![BigUint::one()];
        for n in 1..=30u64 {
            let mut next = vec![BigUint::one()];
            for k in 1..n as usize {
                next.push(&row[k - 1] + &row[k]);
            }
            next.push(BigUint::one());
            row = next;
            for (k, v) in row.iter().enumerate() {
                assert_eq!(&binomial(n, k as u64), v);
            }
        }
    }

    #[test]
    fn r2_t3_table() {
        let rep = bounds_report(2, 3).unwrap();
        assert_eq!(rep.upper_general, BigUint::from(30u32));
        assert_eq!(rep.upper_partite, BigUint::from(18u32));
        let best = rep.best_lower.unwrap();
        assert_eq!(best.value, BigUint::from(4u32));
        assert_eq!(best.name, "simple-F");
        assert_eq!(rep.exact_partite, Some(BigUint::from(4u32)));
    }

    #[test]
    fn fixed_r_row_at_3_12() {
        let rep = bounds_report(3, 12).unwrap();
        let row = rep.lower_bounds.iter().find(|lb| lb.name == "fixed-r").unwrap();
        assert_eq!(row.value, BigUint::from(27u32));
    }

    #[test]
    fn r2_t2_exact() {
        let rep = bounds_report(2, 2).unwrap();
        assert_eq!(rep.exact_partite, Some(BigUint::from(2u32)));
        // t = 2 rows present
        assert!(rep.lower_bounds.iter().any(|lb| lb.name == "t2-complete"));
    }

    #[test]
    fn big_values_no_overflow() {
        let rep = bounds_report(10, 10).unwrap();
        // independent C(100,10) via Pascal recursion
        let mut row: Vec<BigUint> = vec![BigUint::one()];
        for _ in 0..100u32 {
            let mut next = vec![BigUint::one()];
            for k in 1..row.len() {
                next.push(&row[k - 1] + &row[k]);
            }
            next.push(BigUint::one());
            row = next;
        }
        let c100_10 = row[10].clone();
        assert_eq!(rep.upper_general, BigUint::from(9u32) * &c100_10);
        assert_eq!(c100_10.to_string(), "17310309456440");
    }

    #[test]
    fn json_round_trips() {
        let rep = bounds_report(3, 4).unwrap();
        let v = rep.to_json();
        let s = serde_json::to_string(&v).unwrap();
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v, back);
    }

    #[test]
    fn rejects_degenerate_params() {
        assert!(bounds_report(1, 3).is_err());
        assert!(bounds_report(2, 1).is_err());
    }
}
