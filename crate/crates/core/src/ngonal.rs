//! The n-gonal construction on monodromy data.
//!
//! A point of `C~` over the base fiber is a [`Lift`]: one sheet chosen from
//! each of the `n` pairs. Monodromy acts on lifts through its signed action on
//! pairs, and `C~1` is by convention the orbit of the all-unprimed lift.

use serde::Serialize;
use thiserror::Error;

use crate::cover::{analyze, pair_action, CoverAction, CoverAnalysis, CoverError, MonodromyRep};
use crate::perm::Permutation;

/// Largest `n` for which the `2^n` lifts are materialized.
pub const MAX_LIFT_DEGREE: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NgonalError {
    #[error("n = {0} exceeds the supported maximum of {MAX_LIFT_DEGREE}")]
    TooLarge(usize),
    #[error("singular lift count needs n >= 4, got {0}")]
    DegreeTooSmall(usize),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// A choice of one sheet per pair: bit `p` set means the primed sheet `p + n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Lift(pub u32);

impl Lift {
    pub const REFERENCE: Lift = Lift(0);

    /// Sheet chosen over pair `p`.
    #[inline]
    pub fn chosen(self, pair: usize, n: usize) -> usize {
        pair + n * ((self.0 >> pair) & 1) as usize
    }

    #[inline]
    pub fn contains(self, sheet: usize, n: usize) -> bool {
        let pair = sheet % n;
        self.chosen(pair, n) == sheet
    }

    pub fn sheets(self, n: usize) -> impl Iterator<Item = usize> {
        (0..n).map(move |p| self.chosen(p, n))
    }

    #[inline]
    pub fn complement(self, n: usize) -> Lift {
        Lift(!self.0 & mask(n))
    }

    /// Number of pairs on which the two lifts choose different sheets.
    #[inline]
    pub fn distance(self, other: Lift) -> u32 {
        (self.0 ^ other.0).count_ones()
    }

    #[inline]
    pub fn parity(self) -> u32 {
        self.0.count_ones() % 2
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[inline]
fn mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Signed action of one sheet permutation: pair image and crossing bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPairAction {
    pub pairs: Vec<usize>,
    /// Bit `p` set when the unprimed sheet `p` is sent to a primed sheet.
    pub flips: u32,
}

impl SignedPairAction {
    pub fn of(g: &Permutation, n: usize) -> Self {
        let mut flips = 0u32;
        let pairs = (0..n)
            .map(|p| {
                let image = g.apply(p);
                if image >= n {
                    flips |= 1 << p;
                }
                image % n
            })
            .collect();
        SignedPairAction { pairs, flips }
    }

    pub fn apply(&self, lift: Lift) -> Lift {
        let bits = lift.0 ^ self.flips;
        let mut out = 0u32;
        for (p, &q) in self.pairs.iter().enumerate() {
            out |= ((bits >> p) & 1) << q;
        }
        Lift(out)
    }

    pub fn sign(&self) -> u8 {
        (self.flips.count_ones() % 2) as u8
    }
}

/// Parity of the number of unprimed sheets sent to primed sheets, per generator.
pub fn sign_character(rep: &MonodromyRep) -> Vec<u8> {
    rep.generators()
        .iter()
        .map(|g| SignedPairAction::of(g, rep.degree_n()).sign())
        .collect()
}

/// The cover `C~ -> Y` on all `2^n` lifts with its component structure.
#[derive(Debug, Clone)]
pub struct LiftAction {
    n: usize,
    action: CoverAction,
    sign_character: Vec<u8>,
    components: Vec<Vec<usize>>,
    component_of: Vec<usize>,
    pair_genus: i64,
}

impl LiftAction {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn action(&self) -> &CoverAction {
        &self.action
    }

    pub fn lift_count(&self) -> usize {
        1 << self.n
    }

    pub fn sign_character(&self) -> &[u8] {
        &self.sign_character
    }

    /// Components as sorted lift indices; index 0 is `C~1`.
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_of(&self, lift: Lift) -> usize {
        self.component_of[lift.index()]
    }

    pub fn first_component(&self) -> &[usize] {
        &self.components[0]
    }

    pub fn in_first_component(&self, lift: Lift) -> bool {
        self.component_of(lift) == 0
    }

    pub fn is_split(&self) -> bool {
        self.components.len() == 2
    }

    /// Genus of `X`, carried along for the closed-form cross checks.
    pub fn pair_genus(&self) -> i64 {
        self.pair_genus
    }

    pub fn base_genus(&self) -> usize {
        self.action.base_genus()
    }

    /// The complement involution on lift indices.
    pub fn sigma(&self) -> Permutation {
        Permutation::from_images(
            (0..self.lift_count())
                .map(|l| Lift(l as u32).complement(self.n).index())
                .collect(),
        )
        .expect("complement is a bijection")
    }
}

/// Builds the action on lifts from a pairing-equivariant representation.
pub fn lift_action(rep: &MonodromyRep) -> Result<LiftAction, NgonalError> {
    let n = rep.degree_n();
    if n > MAX_LIFT_DEGREE {
        return Err(NgonalError::TooLarge(n));
    }
    let pairs = pair_action(rep)?;
    let pair_genus = analyze(&pairs)?
        .components
        .first()
        .map(|c| c.genus)
        .unwrap_or(0);
    let signed: Vec<SignedPairAction> = rep
        .generators()
        .iter()
        .map(|g| SignedPairAction::of(g, n))
        .collect();
    let count = 1usize << n;
    let generators = signed
        .iter()
        .map(|s| {
            Permutation::from_images(
                (0..count)
                    .map(|l| s.apply(Lift(l as u32)).index())
                    .collect(),
            )
            .expect("signed action is a bijection on lifts")
        })
        .collect();
    let action = CoverAction::new(count, rep.base_genus(), generators)?;
    let mut components = action.orbits();
    // orbits() orders by least element, so the orbit of lift 0 is already first.
    debug_assert!(components[0].contains(&0));
    components.sort_by_key(|c| c[0]);
    let mut component_of = vec![0; count];
    for (k, comp) in components.iter().enumerate() {
        for &l in comp {
            component_of[l] = k;
        }
    }
    Ok(LiftAction {
        n,
        action,
        sign_character: signed.iter().map(SignedPairAction::sign).collect(),
        components,
        component_of,
        pair_genus,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftComponent {
    pub degree: usize,
    pub genus: i64,
    /// Number of ramification points (2-cycles) of each branch loop.
    pub ramification_points: Vec<usize>,
    /// Total ramification degree including any longer cycles.
    pub ramification_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitReport {
    pub n: usize,
    pub total_degree: usize,
    pub component_count: usize,
    pub split: bool,
    pub sign_character: Vec<u8>,
    pub components: Vec<LiftComponent>,
    /// Ramification points of `C~` over each branch point, all components together.
    pub ramification_points_per_branch: Vec<usize>,
    pub pair_genus: i64,
    pub base_genus: usize,
}

/// Components, degrees, genera and branch-fiber ramification of `C~`.
pub fn split(lifts: &LiftAction) -> SplitReport {
    let analysis = analyze(lifts.action()).expect("lift action satisfies the relation");
    let mut components: Vec<LiftComponent> = Vec::new();
    for comp in lifts.components() {
        let a = analysis
            .components
            .iter()
            .find(|c| c.points == *comp)
            .expect("same orbit partition");
        components.push(LiftComponent {
            degree: a.degree,
            genus: a.genus,
            ramification_points: a
                .branch_profiles
                .iter()
                .map(|t| t.parts().iter().filter(|&&l| l == 2).count())
                .collect(),
            ramification_degree: a.ramification_degree,
        });
    }
    let branch_count = lifts.action().branch_count();
    let ramification_points_per_branch = (0..branch_count)
        .map(|j| components.iter().map(|c| c.ramification_points[j]).sum())
        .collect();
    SplitReport {
        n: lifts.n(),
        total_degree: lifts.lift_count(),
        component_count: components.len(),
        split: lifts.is_split(),
        sign_character: lifts.sign_character().to_vec(),
        components,
        ramification_points_per_branch,
        pair_genus: lifts.pair_genus(),
        base_genus: lifts.base_genus(),
    }
}

/// Closed-form genus of each `C~i`.
pub fn expected_lift_genus(n: usize, g_x: i64, g_y: i64) -> i64 {
    let core = g_x - 1 - (n as i64 - 4) * (g_y - 1);
    if n >= 3 {
        (core << (n - 3)) + 1
    } else {
        // 2^(n-3) is fractional; the formula is only meaningful for n >= 3.
        core / (1 << (3 - n)) + 1
    }
}

/// Closed-form genus of each `Ci` for even `n >= 4`.
pub fn expected_quotient_genus(n: usize, g_x: i64, g_y: i64) -> i64 {
    let core = g_x - 1 - (n as i64 - 4) * (g_y - 1);
    (core << (n - 4)) + 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Compares a split report with the closed forms for degrees, ramification
/// counts and genera. Empty when `C~` does not split.
pub fn split_checks(report: &SplitReport) -> Vec<SplitCheck> {
    if !report.split {
        return Vec::new();
    }
    let n = report.n;
    let half = 1usize << (n - 1);
    let mut out = Vec::new();
    out.push(SplitCheck {
        name: "component degree 2^(n-1)",
        passed: report.components.iter().all(|c| c.degree == half),
        detail: format!(
            "degrees {:?}",
            report
                .components
                .iter()
                .map(|c| c.degree)
                .collect::<Vec<_>>()
        ),
    });
    let quarter = 1usize << (n - 2);
    let per_fiber_ok = report
        .ramification_points_per_branch
        .iter()
        .all(|&r| r == quarter)
        && report
            .components
            .iter()
            .all(|c| c.ramification_points.iter().all(|&r| 2 * r == quarter));
    out.push(SplitCheck {
        name: "2^(n-2) ramification points per branch fiber, half per component",
        passed: per_fiber_ok,
        detail: format!("per fiber {:?}", report.ramification_points_per_branch),
    });
    let expected = expected_lift_genus(n, report.pair_genus, report.base_genus as i64);
    out.push(SplitCheck {
        name: "genus of C~i matches closed form",
        passed: report.components.iter().all(|c| c.genus == expected),
        detail: format!(
            "expected {expected}, found {:?}",
            report
                .components
                .iter()
                .map(|c| c.genus)
                .collect::<Vec<_>>()
        ),
    });
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaQuotient {
    #[serde(skip)]
    pub sigma: Permutation,
    /// True when the complement swaps `C~1` and `C~2`.
    pub swaps_components: bool,
    /// No fixed lift and no branch cycle mapped to itself.
    pub fixed_point_free: bool,
    #[serde(skip)]
    pub quotient: CoverAction,
    /// Quotient point of each lift.
    #[serde(skip)]
    pub quotient_point: Vec<usize>,
    pub quotient_analysis: CoverAnalysis,
}

/// The complement involution and the quotient cover `C = C~ / sigma`.
pub fn sigma_quotient(lifts: &LiftAction) -> SigmaQuotient {
    let n = lifts.n();
    let sigma = lifts.sigma();
    let top = 1u32 << (n - 1);
    let quotient_point: Vec<usize> = (0..lifts.lift_count())
        .map(|l| {
            let lift = Lift(l as u32);
            let rep = if lift.0 & top == 0 {
                lift
            } else {
                lift.complement(n)
            };
            rep.index()
        })
        .collect();
    let generators = lifts
        .action()
        .generators()
        .iter()
        .map(|g| {
            Permutation::from_images(
                (0..lifts.lift_count() / 2)
                    .map(|q| quotient_point[g.apply(q)])
                    .collect(),
            )
            .expect("sigma commutes with the monodromy")
        })
        .collect();
    let quotient = CoverAction::new(lifts.lift_count() / 2, lifts.base_genus(), generators)
        .expect("quotient inherits the relation");
    let quotient_analysis = analyze(&quotient).expect("relation holds");
    let no_fixed_lift = (0..lifts.lift_count()).all(|l| sigma.apply(l) != l);
    let no_stable_cycle = lifts.action().branches().iter().all(|c| {
        c.cycles()
            .iter()
            .all(|cyc| !cyc.contains(&sigma.apply(cyc[0])))
    });
    let swaps_components = lifts.component_of(Lift::REFERENCE.complement(n)) != 0;
    SigmaQuotient {
        sigma,
        swaps_components,
        fixed_point_free: no_fixed_lift && no_stable_cycle,
        quotient,
        quotient_point,
        quotient_analysis,
    }
}

/// Multiplicities on the sheets over one pair in the degenerate fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PairMultiplicity {
    pub unprimed: u8,
    pub primed: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingularLifts {
    pub n: usize,
    pub count: usize,
    /// Every point of `C~` over the fiber with two index-one ramification points.
    pub fiber_points: usize,
    pub configurations: Vec<Vec<PairMultiplicity>>,
    /// The singular set is mapped to itself by the complement involution.
    pub sigma_stable: bool,
    /// Each singular point is individually fixed (true exactly when `n = 4`).
    pub sigma_fixed: bool,
}

/// Counts the points `x1 + x1' + x2 + x2' + x3 + .. + x_{n-2}` of `C~` over a
/// fiber of `X -> Y` containing two ramification points of index one.
///
/// The fiber has `n - 2` distinct points, the first two of multiplicity two.
/// Points of `C~` are divisors on the `2(n-2)` sheets pushing forward to that
/// fiber; the singular ones take both sheets over each doubled point.
pub fn singular_lift_count(n: usize) -> Result<SingularLifts, NgonalError> {
    if n < 4 {
        return Err(NgonalError::DegreeTooSmall(n));
    }
    let distinct = n - 2;
    let options = |k: usize| -> Vec<PairMultiplicity> {
        let total = if k < 2 { 2 } else { 1 };
        (0..=total)
            .map(|u| PairMultiplicity {
                unprimed: u,
                primed: total - u,
            })
            .collect()
    };
    let mut all: Vec<Vec<PairMultiplicity>> = vec![Vec::new()];
    for k in 0..distinct {
        all = all
            .into_iter()
            .flat_map(|prefix| {
                options(k).into_iter().map(move |m| {
                    let mut next = prefix.clone();
                    next.push(m);
                    next
                })
            })
            .collect();
    }
    let fiber_points = all.len();
    let reduced_double = PairMultiplicity {
        unprimed: 1,
        primed: 1,
    };
    let singular: Vec<Vec<PairMultiplicity>> = all
        .into_iter()
        .filter(|c| c[0] == reduced_double && c[1] == reduced_double)
        .collect();
    let swap = |c: &Vec<PairMultiplicity>| -> Vec<PairMultiplicity> {
        c.iter()
            .map(|m| PairMultiplicity {
                unprimed: m.primed,
                primed: m.unprimed,
            })
            .collect()
    };
    let sigma_stable = singular.iter().all(|c| singular.contains(&swap(c)));
    let sigma_fixed = singular.iter().all(|c| swap(c) == *c);
    Ok(SingularLifts {
        n,
        count: singular.len(),
        fiber_points,
        configurations: singular,
        sigma_stable,
        sigma_fixed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: usize, s: &str) -> Permutation {
        Permutation::parse_cycles(s, d).unwrap()
    }

    #[test]
    fn pair_flip_toggles_one_bit() {
        let flip0 = SignedPairAction::of(&p(8, "(0 4)"), 4);
        assert_eq!(flip0.sign(), 1);
        for l in 0..16u32 {
            assert_eq!(flip0.apply(Lift(l)), Lift(l ^ 1));
        }
        let id = SignedPairAction::of(&Permutation::identity(8), 4);
        assert!((0..16u32).all(|l| id.apply(Lift(l)) == Lift(l)));
        assert_eq!(id.sign(), 0);
    }

    #[test]
    fn unprimed_preserving_generators_have_trivial_sign() {
        let g = p(8, "(0 1 2)(4 5 6)");
        assert_eq!(SignedPairAction::of(&g, 4).sign(), 0);
    }

    #[test]
    fn lift_transport_moves_chosen_sheets() {
        // Pair 0 -> pair 1 crossing over, pair 1 -> pair 0 crossing over.
        let g = p(6, "(0 4)(1 3)");
        let s = SignedPairAction::of(&g, 3);
        let lift = Lift(0b100);
        let image = s.apply(lift);
        let moved: Vec<usize> = lift.sheets(3).map(|x| g.apply(x)).collect();
        for x in moved {
            assert!(image.contains(x, 3));
        }
    }

    #[test]
    fn singular_counts() {
        assert_eq!(singular_lift_count(4).unwrap().count, 1);
        assert!(singular_lift_count(4).unwrap().sigma_fixed);
        assert_eq!(singular_lift_count(5).unwrap().count, 2);
        let six = singular_lift_count(6).unwrap();
        // Enumerate sign choices on the n - 4 free pairs directly.
        let brute = (0..(1u32 << 2)).count();
        assert_eq!(six.count, brute);
        assert!(six.sigma_stable);
        assert!(!six.sigma_fixed);
        assert_eq!(six.fiber_points, 9 * 4);
        assert_eq!(singular_lift_count(3), Err(NgonalError::DegreeTooSmall(3)));
    }

    #[test]
    fn closed_forms() {
        assert_eq!(expected_lift_genus(4, 2, 0), 3);
        assert_eq!(expected_quotient_genus(4, 2, 0), 2);
        assert_eq!(expected_lift_genus(3, 5, 2), 6);
        assert_eq!(expected_lift_genus(5, 6, 1), 21);
    }
}
