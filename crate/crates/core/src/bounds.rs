//! Closed-form bounds: Castelnuovo's genus bound for a curve with two maps,
//! gonality of simple covers with large ramification, the resulting Clifford
//! index bound, the counterexample parameter budget, and the genus formulas of
//! the n-gonal construction.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("degree {0} is below 2")]
    DegreeTooSmall(u64),
    #[error("ramification degree {delta} is below the threshold {required} (deficit {deficit})")]
    HypothesisFails {
        delta: u64,
        required: u64,
        deficit: u64,
    },
    #[error("inconsistent parameters: {0}")]
    Inconsistent(String),
}

/// Parameters shared by the bound calculators.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BoundQuery {
    pub n1: u64,
    pub n2: u64,
    pub g_y1: u64,
    pub g_y2: u64,
    pub delta: u64,
    pub gon_y: u64,
    pub target: u64,
}

impl BoundQuery {
    pub fn castelnuovo(&self) -> Result<u64, BoundsError> {
        castelnuovo_max_genus(self.n1, self.n2, self.g_y1, self.g_y2)
    }

    pub fn gonality(&self) -> GonalityVerdict {
        gonality_of_simple_cover(self.n1, self.gon_y, self.delta)
    }
}

/// `(n1 - 1)(n2 - 1) + n1 g1 + n2 g2`, the largest genus of a curve with
/// maps of degrees `n1`, `n2` to curves of genera `g1`, `g2` that do not
/// factor through a common map.
pub fn castelnuovo_max_genus(n1: u64, n2: u64, g1: u64, g2: u64) -> Result<u64, BoundsError> {
    for n in [n1, n2] {
        if n < 2 {
            return Err(BoundsError::DegreeTooSmall(n));
        }
    }
    Ok((n1 - 1) * (n2 - 1) + n1 * g1 + n2 * g2)
}

/// Ramification needed for a simple degree-`n` cover to have gonality `n gon_Y`.
pub fn gonality_threshold(n: u64, gon_y: u64) -> u64 {
    2 * n.saturating_sub(1) * n * gon_y
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum GonalityVerdict {
    Equals { gonality: u64 },
    HypothesisFails { deficit: u64 },
}

/// `gon X = n gon Y` for a simple cover whose ramification degree reaches
/// `2(n-1) n gon Y`; simplicity is the caller's assertion.
pub fn gonality_of_simple_cover(n: u64, gon_y: u64, delta: u64) -> GonalityVerdict {
    let required = gonality_threshold(n, gon_y);
    if delta >= required {
        GonalityVerdict::Equals {
            gonality: n * gon_y,
        }
    } else {
        GonalityVerdict::HypothesisFails {
            deficit: required - delta,
        }
    }
}

/// Gonality of a general curve of genus `g`: `floor((g + 3) / 2)`.
pub fn general_gonality(g: u64) -> u64 {
    (g + 3) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CliffordBound {
    pub g_y: u64,
    pub gon_y: u64,
    pub delta: u64,
    /// `gon X = 4 gon Y`.
    pub gonality_x: u64,
    /// `gon X - 3`, from `cliff + 2 <= gon <= cliff + 3`.
    pub from_gonality: u64,
    /// The weaker `2 g_Y - 1`.
    pub stated: i64,
    pub bound: i64,
}

/// Clifford index bound for a simple tetragonal cover of a general curve of
/// genus `g_y` with ramification degree `delta`.
pub fn clifford_lower_bound(g_y: u64, delta: u64) -> Result<CliffordBound, BoundsError> {
    let gon_y = general_gonality(g_y);
    let gonality_x = match gonality_of_simple_cover(4, gon_y, delta) {
        GonalityVerdict::Equals { gonality } => gonality,
        GonalityVerdict::HypothesisFails { deficit } => {
            return Err(BoundsError::HypothesisFails {
                delta,
                required: gonality_threshold(4, gon_y),
                deficit,
            })
        }
    };
    let from_gonality = gonality_x - 3;
    let stated = 2 * g_y as i64 - 1;
    Ok(CliffordBound {
        g_y,
        gon_y,
        delta,
        gonality_x,
        from_gonality,
        stated,
        bound: stated.max(from_gonality as i64),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CounterexamplePlan {
    pub target: u64,
    pub g_y: u64,
    pub gon_y: u64,
    pub delta_min: u64,
    /// Genus of the tetragonal cover by Riemann-Hurwitz.
    pub g_x: u64,
}

/// Smallest base genus with `2 g_Y - 1 >= target` and the ramification and
/// genus of the tetragonal cover it forces.
pub fn plan_counterexample(target: u64) -> Result<CounterexamplePlan, BoundsError> {
    if target == 0 {
        return Err(BoundsError::Inconsistent(
            "target Clifford index must be at least 1".into(),
        ));
    }
    let g_y = (target + 2) / 2;
    let gon_y = general_gonality(g_y);
    let delta_min = gonality_threshold(4, gon_y);
    Ok(CounterexamplePlan {
        target,
        g_y,
        gon_y,
        delta_min,
        g_x: 4 * (g_y - 1) + 1 + delta_min / 2,
    })
}

/// `C(m, k)` for any integer `m` and `k >= 0`.
pub fn binomial(m: i64, k: u64) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(m) - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// `sum_{a=0}^{n-1} C(n-1-g, a) C(g, n-1-a)`, which equals `C(n-1, n-1) = 1`.
pub fn vandermonde_check(n: u64, g_x: u64) -> BigInt {
    let mut total = BigInt::zero();
    if n == 0 {
        return total;
    }
    let top = n as i64 - 1 - g_x as i64;
    for a in 0..n {
        total += binomial(top, a) * binomial(g_x as i64, n - 1 - a);
    }
    total
}

fn serialize_big<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenusFormulas {
    pub n: u64,
    pub g_x: u64,
    pub g_y: u64,
    pub ramification_degree: u64,
    /// Genus of each component of the lift cover.
    pub lift_component_genus: i64,
    /// Genus of each quotient component, for even `n`.
    pub quotient_component_genus: Option<i64>,
    pub dim_prym: i64,
    /// Dimension of the Prym of `C~1 -> C1`, for even `n`.
    pub dim_prym_first: Option<i64>,
    #[serde(serialize_with = "serialize_big")]
    pub class_coefficient: BigInt,
}

pub fn genus_formulas(n: u64, g_x: u64, g_y: u64) -> Result<GenusFormulas, BoundsError> {
    if n < 3 {
        return Err(BoundsError::Inconsistent(format!("n = {n} is below 3")));
    }
    let (ni, gx, gy) = (n as i64, g_x as i64, g_y as i64);
    let deg_r = 2 * gx - 2 - ni * (2 * gy - 2);
    if deg_r < 0 {
        return Err(BoundsError::Inconsistent(format!(
            "ramification degree {deg_r} is negative"
        )));
    }
    let inner = gx - 1 - (ni - 4) * (gy - 1);
    let lift = (1i64 << (n - 3)) * inner + 1;
    let quotient = n.is_multiple_of(2).then(|| {
        if n == 4 {
            inner + 1
        } else {
            (1i64 << (n - 4)) * inner + 1
        }
    });
    Ok(GenusFormulas {
        n,
        g_x,
        g_y,
        ramification_degree: deg_r as u64,
        lift_component_genus: lift,
        quotient_component_genus: quotient,
        dim_prym: gx - 1,
        dim_prym_first: quotient.map(|q| lift - q),
        class_coefficient: BigInt::one() << (n - 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn castelnuovo_examples() {
        assert_eq!(castelnuovo_max_genus(2, 2, 0, 0), Ok(1));
        assert_eq!(castelnuovo_max_genus(3, 3, 1, 1), Ok(10));
        assert_eq!(castelnuovo_max_genus(4, 5, 2, 0), Ok(20));
        assert_eq!(
            castelnuovo_max_genus(1, 5, 2, 0),
            Err(BoundsError::DegreeTooSmall(1))
        );
        for m in 2..10 {
            for g in 0..5 {
                assert_eq!(castelnuovo_max_genus(4, m, g, 0), Ok(3 * (m - 1) + 4 * g));
            }
        }
    }

    #[test]
    fn gonality_examples() {
        assert_eq!(
            gonality_of_simple_cover(4, 2, 48),
            GonalityVerdict::Equals { gonality: 8 }
        );
        assert_eq!(
            gonality_of_simple_cover(4, 2, 47),
            GonalityVerdict::HypothesisFails { deficit: 1 }
        );
        assert_eq!(
            gonality_of_simple_cover(3, 1, 12),
            GonalityVerdict::Equals { gonality: 3 }
        );
    }

    #[test]
    fn clifford_examples() {
        let b = clifford_lower_bound(2, 48).unwrap();
        assert_eq!((b.from_gonality, b.stated, b.bound), (5, 3, 5));
        assert_eq!(clifford_lower_bound(0, 24).unwrap().from_gonality, 1);
        assert_eq!(clifford_lower_bound(7, 120).unwrap().bound, 17);
        assert!(matches!(
            clifford_lower_bound(2, 47),
            Err(BoundsError::HypothesisFails { deficit: 1, .. })
        ));
    }

    #[test]
    fn plan_examples() {
        let p = plan_counterexample(3).unwrap();
        assert_eq!((p.g_y, p.delta_min, p.g_x), (2, 48, 29));
        assert_eq!(plan_counterexample(1).unwrap().g_y, 1);
        let p = plan_counterexample(10).unwrap();
        assert_eq!((p.g_y, p.delta_min, p.g_x), (6, 96, 69));
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde_check(4, 3), BigInt::one());
        for g in 0..30 {
            assert_eq!(vandermonde_check(1, g), BigInt::one());
        }
        assert_eq!(binomial(-3, 2), BigInt::from(6));
        assert_eq!(binomial(-1, 5), BigInt::from(-1));
        assert_eq!(binomial(2, 5), BigInt::zero());
    }

    #[test]
    fn genus_formula_examples() {
        let f = genus_formulas(4, 2, 0).unwrap();
        assert_eq!(f.lift_component_genus, 3);
        assert_eq!(f.quotient_component_genus, Some(2));
        assert_eq!(f.ramification_degree, 10);
        assert_eq!((f.dim_prym, f.dim_prym_first), (1, Some(1)));
        assert_eq!(f.class_coefficient, BigInt::from(8));
        assert_eq!(genus_formulas(5, 6, 1).unwrap().lift_component_genus, 21);
        for gx in 1..10 {
            for gy in 0..3 {
                if let Ok(f) = genus_formulas(3, gx, gy) {
                    assert_eq!(f.lift_component_genus, (gx + gy) as i64 - 1);
                }
            }
        }
        assert!(genus_formulas(4, 0, 1).is_err());
    }

    proptest! {
        #[test]
        fn castelnuovo_is_monotone(n1 in 2u64..20, n2 in 2u64..20, g1 in 0u64..20, g2 in 0u64..20) {
            let base = castelnuovo_max_genus(n1, n2, g1, g2).unwrap();
            prop_assert!(castelnuovo_max_genus(n1 + 1, n2, g1, g2).unwrap() >= base);
            prop_assert!(castelnuovo_max_genus(n1, n2 + 1, g1, g2).unwrap() >= base);
            prop_assert!(castelnuovo_max_genus(n1, n2, g1 + 1, g2).unwrap() >= base);
            prop_assert!(castelnuovo_max_genus(n1, n2, g1, g2 + 1).unwrap() >= base);
        }

        #[test]
        fn plan_meets_its_target(target in 1u64..200) {
            let plan = plan_counterexample(target).unwrap();
            let bound = clifford_lower_bound(plan.g_y, plan.delta_min).unwrap();
            prop_assert!(bound.bound >= target as i64);
            prop_assert!(plan.delta_min % 2 == 0);
        }

        #[test]
        fn vandermonde_is_one(n in 1u64..16, g in 0u64..30) {
            prop_assert_eq!(vandermonde_check(n, g), BigInt::one());
        }
    }
}
