//! Finite permutations on dense point sets `0..d`.
//!
//! Composition is left to right throughout the crate: `p.then(&q)` sends a
//! point `i` to `q(p(i))`. Words in the generators are read the same way, so
//! the product-one relation `[a1,b1]...c1...cb = 1` is the permutation obtained
//! by applying `a1` first.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("point {point} out of range for degree {degree}")]
    OutOfRange { point: usize, degree: usize },
    #[error("point {point} appears more than once")]
    Repeated { point: usize },
    #[error("malformed cycle notation at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
}

/// A bijection of `{0, .., d-1}` stored as its image table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = PermError;

    fn try_from(images: Vec<usize>) -> Result<Self, PermError> {
        Permutation::from_images(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let degree = images.len();
        let mut seen = vec![false; degree];
        for &x in &images {
            if x >= degree {
                return Err(PermError::OutOfRange { point: x, degree });
            }
            if seen[x] {
                return Err(PermError::Repeated { point: x });
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from disjoint cycles. Points not mentioned are fixed.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut seen = vec![false; degree];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x >= degree {
                    return Err(PermError::OutOfRange { point: x, degree });
                }
                if seen[x] {
                    return Err(PermError::Repeated { point: x });
                }
                seen[x] = true;
                images[x] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// The transposition `(a b)` on `degree` points.
    pub fn transposition(degree: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..degree).collect();
        images.swap(a, b);
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(Permutation {
            images: self.images.iter().map(|&x| other.images[x]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Permutation { images }
    }

    /// `h^-1 . self . h`, i.e. the permutation relabeled by `h`.
    pub fn conjugate_by(&self, h: &Permutation) -> Result<Permutation, PermError> {
        h.inverse().then(self)?.then(h)
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.degree() == other.degree()
            && self
                .images
                .iter()
                .enumerate()
                .all(|(i, &x)| other.images[x] == self.images[other.images[i]])
    }

    /// All cycles including fixed points, each starting at its least point,
    /// ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::new(self.cycles().iter().map(Vec::len).collect())
    }

    /// Parses cycle notation such as `"(0 1)(2 3)"` or `"()"`.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation, PermError> {
        let bytes = text.as_bytes();
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut pos = 0;
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        skip_ws(&mut pos);
        while pos < bytes.len() {
            if bytes[pos] != b'(' {
                return Err(PermError::Syntax {
                    offset: pos,
                    message: "expected '('".into(),
                });
            }
            pos += 1;
            let mut cycle = Vec::new();
            loop {
                skip_ws(&mut pos);
                if pos >= bytes.len() {
                    return Err(PermError::Syntax {
                        offset: pos,
                        message: "unterminated cycle".into(),
                    });
                }
                if bytes[pos] == b')' {
                    pos += 1;
                    break;
                }
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    return Err(PermError::Syntax {
                        offset: pos,
                        message: "expected a point index".into(),
                    });
                }
                let point: usize = text[start..pos].parse().map_err(|_| PermError::Syntax {
                    offset: start,
                    message: "point index too large".into(),
                })?;
                cycle.push(point);
            }
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            skip_ws(&mut pos);
        }
        Permutation::from_cycles(degree, &cycles)
    }
}

impl fmt::Display for Permutation {
    /// Canonical cycle notation: fixed points omitted, identity as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            write!(f, "(")?;
            for (k, x) in cycle.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// `p` first, then `q`.
pub fn compose(p: &Permutation, q: &Permutation) -> Result<Permutation, PermError> {
    p.then(q)
}

/// Multiset of cycle lengths, sorted descending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        CycleType(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    /// Sum of `(length - 1)` over the cycles; the local ramification contribution.
    pub fn ramification(&self) -> usize {
        self.0.iter().map(|l| l - 1).sum()
    }

    pub fn is_transposition(&self) -> bool {
        self.0.first() == Some(&2) && self.0.iter().skip(1).all(|&l| l == 1)
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Orbit partition of `0..degree` under the group generated by `gens`.
/// Orbits are sorted internally and ordered by least element.
pub fn orbits(degree: usize, gens: &[Permutation]) -> Vec<Vec<usize>> {
    let mut label = vec![usize::MAX; degree];
    let mut out = Vec::new();
    for start in 0..degree {
        if label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut orbit = vec![start];
        label[start] = id;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = g.apply(x);
                if label[y] == usize::MAX {
                    label[y] = id;
                    orbit.push(y);
                    queue.push_back(y);
                }
            }
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn perm(d: usize, s: &str) -> Permutation {
        Permutation::parse_cycles(s, d).unwrap()
    }

    #[test]
    fn involution_squares_to_identity() {
        let t = perm(2, "(0 1)");
        assert!(compose(&t, &t).unwrap().is_identity());
    }

    #[test]
    fn identity_is_left_neutral() {
        let q = perm(5, "(0 3 4)(1 2)");
        assert_eq!(compose(&Permutation::identity(5), &q).unwrap(), q);
    }

    /// Every product in S_3 checked against a table built from explicit
    /// function composition on image tuples.
    #[test]
    fn s3_table_left_to_right() {
        let all: Vec<Vec<usize>> = vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ];
        for p in &all {
            for q in &all {
                let expected: Vec<usize> = (0..3).map(|i| q[p[i]]).collect();
                let pp = Permutation::from_images(p.clone()).unwrap();
                let qq = Permutation::from_images(q.clone()).unwrap();
                assert_eq!(compose(&pp, &qq).unwrap().images(), &expected[..]);
            }
        }
        // (0 1 2) then (0 1): 0 -> 1 -> 0, 1 -> 2 -> 2, 2 -> 0 -> 1
        let prod = compose(&perm(3, "(0 1 2)"), &perm(3, "(0 1)")).unwrap();
        assert_eq!(prod.images(), &[0, 2, 1]);
        assert_eq!(prod.to_string(), "(1 2)");
    }

    #[test]
    fn degree_mismatch_is_an_error() {
        let err = compose(&Permutation::identity(2), &Permutation::identity(3)).unwrap_err();
        assert_eq!(err, PermError::DegreeMismatch { left: 2, right: 3 });
    }

    #[test]
    fn cycle_types() {
        assert_eq!(Permutation::identity(4).cycle_type().parts(), &[1, 1, 1, 1]);
        let t = perm(4, "(0 1)").cycle_type();
        assert_eq!(t.parts(), &[2, 1, 1]);
        assert!(t.is_transposition());
        assert_eq!(t.ramification(), 1);
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(orbits(3, &[]), vec![vec![0], vec![1], vec![2]]);
        let gens = [perm(3, "(0 1)"), perm(3, "(1 2)")];
        assert_eq!(orbits(3, &gens), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn parse_and_print() {
        let p = perm(6, " (3 1)(5 0 2) ");
        assert_eq!(p.to_string(), "(0 2 5)(1 3)");
        assert_eq!(Permutation::identity(4).to_string(), "()");
        assert_eq!(perm(4, "()"), Permutation::identity(4));
        assert!(matches!(
            Permutation::parse_cycles("(0 1)(1 2)", 3),
            Err(PermError::Repeated { point: 1 })
        ));
        assert!(matches!(
            Permutation::parse_cycles("(0 7)", 3),
            Err(PermError::OutOfRange { point: 7, .. })
        ));
        assert!(matches!(
            Permutation::parse_cycles("(0 1", 3),
            Err(PermError::Syntax { .. })
        ));
        assert!(matches!(
            Permutation::parse_cycles("0 1)", 3),
            Err(PermError::Syntax { offset: 0, .. })
        ));
    }

    fn arb_perm(max_degree: usize) -> impl Strategy<Value = Permutation> {
        (1..=max_degree)
            .prop_flat_map(|d| Just((0..d).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    fn arb_triple(
        max_degree: usize,
    ) -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
        (1..=max_degree).prop_flat_map(|d| {
            let one = || Just((0..d).collect::<Vec<_>>()).prop_shuffle();
            (one(), one(), one()).prop_map(|(a, b, c)| {
                (
                    Permutation::from_images(a).unwrap(),
                    Permutation::from_images(b).unwrap(),
                    Permutation::from_images(c).unwrap(),
                )
            })
        })
    }

    /// Orbit membership by brute-force closure on a boolean reachability matrix.
    fn orbit_oracle(p: &Permutation) -> Vec<usize> {
        let d = p.degree();
        let mut lengths = Vec::new();
        let mut done = vec![false; d];
        for s in 0..d {
            if done[s] {
                continue;
            }
            let mut reach = vec![false; d];
            reach[s] = true;
            let mut changed = true;
            while changed {
                changed = false;
                for x in 0..d {
                    if reach[x] && !reach[p.apply(x)] {
                        reach[p.apply(x)] = true;
                        changed = true;
                    }
                }
            }
            let members: Vec<usize> = (0..d).filter(|&x| reach[x]).collect();
            for &m in &members {
                done[m] = true;
            }
            lengths.push(members.len());
        }
        lengths
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn group_laws((p, q, r) in arb_triple(32)) {
            let pq_r = p.then(&q).unwrap().then(&r).unwrap();
            let p_qr = p.then(&q.then(&r).unwrap()).unwrap();
            prop_assert_eq!(pq_r, p_qr);
            prop_assert!(p.then(&p.inverse()).unwrap().is_identity());
            prop_assert_eq!(Permutation::identity(p.degree()).then(&p).unwrap(), p.clone());
        }

        #[test]
        fn cycle_type_is_conjugation_invariant((p, q, _r) in arb_triple(32)) {
            prop_assert_eq!(p.conjugate_by(&q).unwrap().cycle_type(), p.cycle_type());
        }

        #[test]
        fn cycle_type_matches_orbit_oracle(p in arb_perm(8)) {
            let t = p.cycle_type();
            prop_assert_eq!(t.degree(), p.degree());
            prop_assert_eq!(t, CycleType::new(orbit_oracle(&p)));
        }

        #[test]
        fn orbits_refine_under_subsets((p, q, r) in arb_triple(16)) {
            let d = p.degree();
            let coarse = orbits(d, &[p.clone(), q.clone(), r.clone()]);
            let fine = orbits(d, &[p, q]);
            for orbit in &fine {
                prop_assert!(coarse.iter().any(|c| orbit.iter().all(|x| c.contains(x))));
            }
        }

        #[test]
        fn print_parse_round_trip(p in arb_perm(20)) {
            let text = p.to_string();
            prop_assert_eq!(Permutation::parse_cycles(&text, p.degree()).unwrap(), p);
        }
    }
}
