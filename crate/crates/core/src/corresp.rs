//! The correspondences `S`, `S^t` and the distance operators `d_j` on lifts,
//! both as divisor maps on the base fiber and as covers of `Y`.
//!
//! Divisor identities are checked over the fiber above the basepoint, which
//! is unramified. By equivariance they then hold over every unramified fiber.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cover::{CoverAction, CoverError, MonodromyRep};
use crate::ngonal::{lift_action, Lift, LiftAction, NgonalError};
use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorrespError {
    #[error("d_j needs an even j in 0..=n, got j = {j} for n = {n}")]
    OddDistance { j: usize, n: usize },
    #[error("the lift cover does not split; identity requires two components")]
    NotSplit,
    #[error(transparent)]
    Ngonal(#[from] NgonalError),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// Finite formal sum of fiber points with non-negative multiplicities.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Divisor(BTreeMap<usize, u64>);

impl Divisor {
    pub fn new() -> Self {
        Divisor::default()
    }

    pub fn add_point(&mut self, point: usize, multiplicity: u64) {
        if multiplicity > 0 {
            *self.0.entry(point).or_insert(0) += multiplicity;
        }
    }

    pub fn add(&mut self, other: &Divisor, scale: u64) {
        for (&p, &m) in &other.0 {
            self.add_point(p, m * scale);
        }
    }

    pub fn degree(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn multiplicity(&self, point: usize) -> u64 {
        self.0.get(&point).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.0.iter().map(|(&p, &m)| (p, m))
    }

    /// Image under a point map, multiplicities carried along.
    pub fn map(&self, f: impl Fn(usize) -> usize) -> Divisor {
        let mut out = Divisor::new();
        for (p, m) in self.iter() {
            out.add_point(f(p), m);
        }
        out
    }
}

impl FromIterator<usize> for Divisor {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut d = Divisor::new();
        for p in iter {
            d.add_point(p, 1);
        }
        d
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .iter()
            .map(|(p, m)| {
                if m == 1 {
                    format!("[{p}]")
                } else {
                    format!("{m}[{p}]")
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// `S(L)`: the chosen sheets of a lift, as a divisor on the `X~` fiber.
pub fn apply_s(lift: Lift, n: usize) -> Divisor {
    lift.sheets(n).collect()
}

/// `S^t(x)`: every lift of `C~1` that chooses sheet `x`, on lift indices.
pub fn apply_st(sheet: usize, lifts: &LiftAction) -> Divisor {
    let n = lifts.n();
    lifts
        .first_component()
        .iter()
        .copied()
        .filter(|&l| Lift(l as u32).contains(sheet, n))
        .collect()
}

/// `d_j(L)`: every lift differing from `L` on exactly `j` pairs.
pub fn d_operator(j: usize, lift: Lift, n: usize) -> Result<Divisor, CorrespError> {
    if j % 2 == 1 || j > n {
        return Err(CorrespError::OddDistance { j, n });
    }
    Ok((0..1u32 << n)
        .filter(|&l| lift.distance(Lift(l)) as usize == j)
        .map(|l| l as usize)
        .collect())
}

/// A correspondence realized as a cover of `Y` with two equivariant projections.
#[derive(Debug, Clone)]
pub struct Correspondence {
    pub incidence: CoverAction,
    /// Projection to the left cover, on point indices.
    pub left: Vec<usize>,
    /// Projection to the right cover, on point indices.
    pub right: Vec<usize>,
}

impl Correspondence {
    pub fn new(
        incidence: CoverAction,
        left: Vec<usize>,
        left_target: &CoverAction,
        right: Vec<usize>,
        right_target: &CoverAction,
    ) -> Result<Self, CorrespError> {
        incidence.check_equivariant_map(left_target, &left)?;
        incidence.check_equivariant_map(right_target, &right)?;
        Ok(Correspondence {
            incidence,
            left,
            right,
        })
    }

    pub fn transpose(&self) -> Correspondence {
        Correspondence {
            incidence: self.incidence.clone(),
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    /// Fiber-level action: sum of right images of the left preimages.
    pub fn apply(&self, left_point: usize) -> Divisor {
        self.left
            .iter()
            .zip(&self.right)
            .filter(|(&l, _)| l == left_point)
            .map(|(_, &r)| r)
            .collect()
    }

    pub fn left_degree(&self, left_points: usize) -> usize {
        self.incidence.point_count() / left_points.max(1)
    }
}

/// `S` with its endpoints: `C~1` re-indexed locally, and the sheets of `X~`.
#[derive(Debug, Clone)]
pub struct SCorrespondence {
    pub n: usize,
    pub lifts: LiftAction,
    /// Lift index of each local point of `C~1`.
    pub first_component_lifts: Vec<usize>,
    pub first_component: CoverAction,
    pub sheets: CoverAction,
    pub correspondence: Correspondence,
    /// Set when `C~` is connected and `S` was built over the whole of it.
    pub non_split: bool,
}

impl SCorrespondence {
    pub fn local_index(&self, lift: Lift) -> Option<usize> {
        self.first_component_lifts.binary_search(&lift.index()).ok()
    }
}

/// Builds `S` over `C~1`: incidence points `(L, i)` with `i` chosen by `L`.
pub fn build_s(rep: &MonodromyRep) -> Result<SCorrespondence, CorrespError> {
    let lifts = lift_action(rep)?;
    let n = rep.degree_n();
    let first_component_lifts = lifts.first_component().to_vec();
    let first_component = lifts.action().restrict(&first_component_lifts);
    let sheets = rep.sheet_action();
    let local = |l: usize| {
        first_component_lifts
            .binary_search(&l)
            .expect("C~1 is invariant")
    };
    let count = first_component_lifts.len() * n;
    let generators = lifts
        .action()
        .generators()
        .iter()
        .zip(sheets.generators())
        .map(|(on_lifts, on_sheets)| {
            let images = (0..count)
                .map(|point| {
                    let (l, k) = (point / n, point % n);
                    let lift = first_component_lifts[l];
                    let sheet = Lift(lift as u32).chosen(k, n);
                    let image_sheet = on_sheets.apply(sheet);
                    local(on_lifts.apply(lift)) * n + image_sheet % n
                })
                .collect();
            Permutation::from_images(images).expect("diagonal action is a bijection")
        })
        .collect();
    let incidence = CoverAction::new(count, rep.base_genus(), generators)?;
    let left = (0..count).map(|point| point / n).collect();
    let right = (0..count)
        .map(|point| Lift(first_component_lifts[point / n] as u32).chosen(point % n, n))
        .collect();
    let correspondence = Correspondence::new(incidence, left, &first_component, right, &sheets)?;
    Ok(SCorrespondence {
        n,
        non_split: !lifts.is_split(),
        lifts,
        first_component_lifts,
        first_component,
        sheets,
        correspondence,
    })
}

/// `d_j` restricted to `C~1` as a self-correspondence, on local indices.
pub fn build_d(s: &SCorrespondence, j: usize) -> Result<Correspondence, CorrespError> {
    let n = s.n;
    if j % 2 == 1 || j > n {
        return Err(CorrespError::OddDistance { j, n });
    }
    let lifts = &s.first_component_lifts;
    let mut pairs = Vec::new();
    for (a, &la) in lifts.iter().enumerate() {
        for (b, &lb) in lifts.iter().enumerate() {
            if Lift(la as u32).distance(Lift(lb as u32)) as usize == j {
                pairs.push((a, b));
            }
        }
    }
    let index: BTreeMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(k, &ab)| (ab, k)).collect();
    let generators = s
        .first_component
        .generators()
        .iter()
        .map(|g| {
            Permutation::from_images(
                pairs
                    .iter()
                    .map(|&(a, b)| index[&(g.apply(a), g.apply(b))])
                    .collect(),
            )
            .expect("monodromy preserves lift distance")
        })
        .collect();
    let incidence = CoverAction::new(pairs.len(), s.first_component.base_genus(), generators)?;
    let left = pairs.iter().map(|&(a, _)| a).collect();
    let right = pairs.iter().map(|&(_, b)| b).collect();
    Correspondence::new(
        incidence,
        left,
        &s.first_component,
        right,
        &s.first_component,
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCounterexample {
    pub witness: usize,
    pub lhs: Divisor,
    pub rhs: Divisor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub name: &'static str,
    pub checked_points: usize,
    pub holds: bool,
    pub counterexample: Option<IdentityCounterexample>,
}

pub const STS_NAME: &str = "S^t S = sum (n-2i) d_(2i)";
pub const SST_NAME: &str = "S S^t = 2^(n-2) x + 2^(n-3) (other pairs)";

/// `S^t S(L) = sum_{i <= (n-1)/2} (n - 2i) d_{2i}(L)` for every `L` in `C~1`.
pub fn verify_sts(lifts: &LiftAction) -> Result<IdentityReport, CorrespError> {
    if !lifts.is_split() {
        return Err(CorrespError::NotSplit);
    }
    let n = lifts.n();
    let mut counterexample = None;
    for &l in lifts.first_component() {
        let lift = Lift(l as u32);
        let mut lhs = Divisor::new();
        for x in apply_s(lift, n).support() {
            lhs.add(&apply_st(x, lifts), 1);
        }
        let mut rhs = Divisor::new();
        for i in 0..=(n - 1) / 2 {
            rhs.add(&d_operator(2 * i, lift, n)?, (n - 2 * i) as u64);
        }
        if lhs != rhs {
            counterexample = Some(IdentityCounterexample {
                witness: l,
                lhs,
                rhs,
            });
            break;
        }
    }
    Ok(IdentityReport {
        name: STS_NAME,
        checked_points: lifts.first_component().len(),
        holds: counterexample.is_none(),
        counterexample,
    })
}

/// `S(S^t(x)) = 2^(n-2) x + 2^(n-3) sum over the other pairs of both sheets`.
pub fn verify_sst(lifts: &LiftAction) -> Result<IdentityReport, CorrespError> {
    if !lifts.is_split() {
        return Err(CorrespError::NotSplit);
    }
    let n = lifts.n();
    let mut counterexample = None;
    for x in 0..2 * n {
        let mut lhs = Divisor::new();
        for (l, m) in apply_st(x, lifts).iter() {
            lhs.add(&apply_s(Lift(l as u32), n), m);
        }
        let mut rhs = Divisor::new();
        rhs.add_point(x, 1 << (n - 2));
        for y in (0..2 * n).filter(|&y| y % n != x % n) {
            rhs.add_point(y, 1 << (n - 3));
        }
        if lhs != rhs {
            counterexample = Some(IdentityCounterexample {
                witness: x,
                lhs,
                rhs,
            });
            break;
        }
    }
    Ok(IdentityReport {
        name: SST_NAME,
        checked_points: 2 * n,
        holds: counterexample.is_none(),
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_of_reference_and_complement() {
        let n = 5;
        assert_eq!(apply_s(Lift::REFERENCE, n), (0..n).collect());
        let c = Lift::REFERENCE.complement(n);
        assert_eq!(apply_s(c, n), (n..2 * n).collect());
        for l in 0..32u32 {
            assert_eq!(apply_s(Lift(l), n).degree(), n as u64);
        }
    }

    #[test]
    fn d_operator_examples() {
        let lift = Lift(0b0110);
        assert_eq!(
            d_operator(0, lift, 4).unwrap(),
            [lift.index()].into_iter().collect()
        );
        assert_eq!(
            d_operator(4, lift, 4).unwrap(),
            [lift.complement(4).index()].into_iter().collect()
        );
        assert_eq!(d_operator(2, lift, 4).unwrap().degree(), 6);
        assert_eq!(
            d_operator(1, lift, 4),
            Err(CorrespError::OddDistance { j: 1, n: 4 })
        );
    }

    #[test]
    fn divisor_arithmetic() {
        let mut d: Divisor = [1, 2, 2].into_iter().collect();
        assert_eq!(d.multiplicity(2), 2);
        d.add(&[1].into_iter().collect(), 3);
        assert_eq!(d.multiplicity(1), 4);
        assert_eq!(d.degree(), 6);
        assert_eq!(d.to_string(), "4[1] + 2[2]");
        assert_eq!(Divisor::new().to_string(), "0");
    }
}
