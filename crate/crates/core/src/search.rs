//! Seeded random search for admissible representations.
//!
//! Candidate `i` draws its generators from a ChaCha stream selected by `i`,
//! so results depend only on the parameters and not on scheduling. Branch
//! generators are pairing-compatible lifts of random transpositions of pairs
//! that keep the double cover unramified. The last two branches are solved
//! from the product relation; a candidate is kept when every admissibility
//! check passes, its sign character has the requested shape and the pair
//! action is primitive. A primitive group containing a transposition is the
//! full symmetric group, which rules out the extra lift components that
//! imprimitive handle monodromy can produce over a base of positive genus.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::cover::{is_primitive, pair_action, relation_product, validate, MonodromyRep};
use crate::ngonal::{sign_character, MAX_LIFT_DEGREE};
use crate::perm::Permutation;

/// Environment variable overriding the attempt budget.
pub const ATTEMPTS_ENV: &str = "PRYM_FORGE_ATTEMPTS";
pub const DEFAULT_ATTEMPTS: u64 = 200_000;
const BATCH: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("branch count {0} is odd, so the ramification degree is odd")]
    OddBranchCount(usize),
    #[error("degree n = {0} outside the supported range 3..={MAX_LIFT_DEGREE}")]
    Degree(usize),
    #[error("a non-split cover needs base genus at least 1")]
    NonSplitNeedsHandles,
    #[error("found {found} of {wanted} seeds after {attempts} attempts")]
    Exhausted {
        found: usize,
        wanted: usize,
        attempts: u64,
    },
}

/// Which sign characters to accept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignMode {
    /// All signs zero, so the lift cover splits.
    Split,
    /// At least one odd sign, so the lift cover is connected.
    NonSplit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchParams {
    pub n: usize,
    pub base_genus: usize,
    pub branch_count: usize,
    pub count: usize,
    pub seed: u64,
    pub attempts: u64,
    pub sign: SignMode,
}

impl SearchParams {
    pub fn new(n: usize, base_genus: usize, branch_count: usize, count: usize, seed: u64) -> Self {
        SearchParams {
            n,
            base_genus,
            branch_count,
            count,
            seed,
            attempts: DEFAULT_ATTEMPTS,
            sign: SignMode::Split,
        }
    }

    /// Budget from [`ATTEMPTS_ENV`] when set and valid.
    pub fn with_env_budget(mut self) -> Self {
        if let Some(v) = std::env::var(ATTEMPTS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
        {
            self.attempts = v;
        }
        self
    }

    pub fn check(&self) -> Result<(), SearchError> {
        if self.branch_count % 2 == 1 {
            return Err(SearchError::OddBranchCount(self.branch_count));
        }
        if !(3..=MAX_LIFT_DEGREE).contains(&self.n) {
            return Err(SearchError::Degree(self.n));
        }
        if self.sign == SignMode::NonSplit && self.base_genus == 0 {
            return Err(SearchError::NonSplitNeedsHandles);
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub seeds: Vec<MonodromyRep>,
    /// Candidate indices consumed, up to and including the last kept one.
    pub attempts: u64,
}

/// Sheet permutation acting on pairs by `pairs` with crossings `flips`.
pub fn signed_permutation(pairs: &[usize], flips: u32) -> Permutation {
    let n = pairs.len();
    let mut images = vec![0; 2 * n];
    for (p, &q) in pairs.iter().enumerate() {
        let f = (flips >> p) & 1 == 1;
        images[p] = if f { q + n } else { q };
        images[p + n] = if f { q } else { q + n };
    }
    Permutation::from_images(images).expect("signed pair map is a bijection")
}

/// Unramified lift of the pair transposition `(p q)`; `twisted` crosses sheets.
pub fn branch_lift(n: usize, p: usize, q: usize, twisted: bool) -> Permutation {
    let mut pairs: Vec<usize> = (0..n).collect();
    pairs.swap(p, q);
    let flips = if twisted { (1 << p) | (1 << q) } else { 0 };
    signed_permutation(&pairs, flips)
}

/// Every unramified lift of a pair transposition.
pub fn all_branch_lifts(n: usize) -> Vec<Permutation> {
    let mut out = Vec::with_capacity(n * (n - 1));
    for p in 0..n {
        for q in p + 1..n {
            out.push(branch_lift(n, p, q, false));
            out.push(branch_lift(n, p, q, true));
        }
    }
    out
}

fn random_signed(rng: &mut ChaCha8Rng, n: usize, even: bool) -> Permutation {
    let mut pairs: Vec<usize> = (0..n).collect();
    pairs.shuffle(rng);
    let mut flips: u32 = rng.gen::<u32>() & ((1u32 << n) - 1);
    if even && flips.count_ones() % 2 == 1 {
        flips ^= 1 << rng.gen_range(0..n);
    }
    signed_permutation(&pairs, flips)
}

/// Candidate `index`, or `None` when it fails a requirement.
pub fn candidate(params: &SearchParams, lifts: &[Permutation], index: u64) -> Option<MonodromyRep> {
    let n = params.n;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(index);
    let even = params.sign == SignMode::Split;
    let handles: Vec<(Permutation, Permutation)> = (0..params.base_genus)
        .map(|_| {
            (
                random_signed(&mut rng, n, even),
                random_signed(&mut rng, n, even),
            )
        })
        .collect();
    let b = params.branch_count;
    let mut branches: Vec<Permutation> = (0..b.saturating_sub(2))
        .map(|_| lifts.choose(&mut rng).expect("n >= 2").clone())
        .collect();
    if b >= 2 {
        let mut gens: Vec<Permutation> = handles
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect();
        gens.extend(branches.iter().cloned());
        let prefix = relation_product(2 * n, params.base_genus, &gens).ok()?;
        let rest = prefix.inverse();
        // c_{b-1} c_b = rest, with c_{b-1} an involution.
        let options: Vec<(Permutation, Permutation)> = lifts
            .iter()
            .filter_map(|c| {
                let last = c.then(&rest).ok()?;
                lifts.contains(&last).then(|| (c.clone(), last))
            })
            .collect();
        let (c1, c2) = options.choose(&mut rng)?.clone();
        branches.push(c1);
        branches.push(c2);
    }
    let rep = MonodromyRep::new(n, params.base_genus, handles, branches).ok()?;
    let signs = sign_character(&rep);
    let sign_ok = match params.sign {
        SignMode::Split => signs.iter().all(|&s| s == 0),
        SignMode::NonSplit => signs.contains(&1),
    };
    let primitive = pair_action(&rep).is_ok_and(|a| is_primitive(&a));
    (sign_ok && primitive && validate(&rep).is_admissible()).then_some(rep)
}

/// Searches candidates in index order until `count` seeds are kept or the
/// budget runs out.
pub fn search(params: &SearchParams) -> Result<SearchOutcome, SearchError> {
    params.check()?;
    let lifts = all_branch_lifts(params.n);
    let mut seeds = Vec::with_capacity(params.count);
    let mut next = 0u64;
    let mut last_kept = 0u64;
    while seeds.len() < params.count && next < params.attempts {
        let end = (next + BATCH).min(params.attempts);
        let batch: Vec<(u64, Option<MonodromyRep>)> = (next..end)
            .into_par_iter()
            .map(|i| (i, candidate(params, &lifts, i)))
            .collect();
        for (i, rep) in batch {
            if seeds.len() == params.count {
                break;
            }
            if let Some(rep) = rep {
                seeds.push(rep);
                last_kept = i + 1;
            }
        }
        next = end;
    }
    if seeds.len() < params.count {
        return Err(SearchError::Exhausted {
            found: seeds.len(),
            wanted: params.count,
            attempts: params.attempts,
        });
    }
    Ok(SearchOutcome {
        seeds,
        attempts: last_kept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::CHECK_ETALE;

    #[test]
    fn branch_lifts_are_unramified_transpositions() {
        for c in all_branch_lifts(4) {
            assert_eq!(c.cycle_type().parts(), &[2, 2, 1, 1, 1, 1]);
            assert!(c.commutes_with(&crate::cover::pairing(4)));
            assert!(c.then(&c).unwrap().is_identity());
        }
        assert_eq!(all_branch_lifts(5).len(), 20);
    }

    #[test]
    fn search_is_deterministic_and_admissible() {
        let params = SearchParams::new(4, 0, 10, 2, 42);
        let a = search(&params).unwrap();
        let b = search(&params).unwrap();
        assert_eq!(a.seeds, b.seeds);
        assert_eq!(a.attempts, b.attempts);
        for rep in &a.seeds {
            let v = validate(rep);
            assert!(v.is_admissible(), "{v:?}");
            assert!(v.get(CHECK_ETALE).is_some());
            assert!(sign_character(rep).iter().all(|&s| s == 0));
        }
    }

    #[test]
    fn odd_branch_count_is_rejected() {
        let params = SearchParams::new(4, 0, 3, 1, 1);
        assert_eq!(search(&params).unwrap_err(), SearchError::OddBranchCount(3));
    }

    #[test]
    fn non_split_search() {
        let mut params = SearchParams::new(3, 1, 2, 1, 5);
        params.sign = SignMode::NonSplit;
        let out = search(&params).unwrap();
        assert!(sign_character(&out.seeds[0]).contains(&1));
    }

    #[test]
    fn tiny_budget_exhausts() {
        let mut params = SearchParams::new(4, 0, 10, 5, 3);
        params.attempts = 1;
        assert!(matches!(
            search(&params),
            Err(SearchError::Exhausted { .. })
        ));
    }
}
