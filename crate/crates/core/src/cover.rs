//! Monodromy data for the tower `X~ -> X -> Y` and finite covers of `Y`.
//!
//! Sheets of `X~` are labeled `0..2n`; sheet `i < n` is the unprimed point over
//! pair `i` and `i + n` its primed partner, so the pairing involution is
//! `i -> (i + n) mod 2n`. Generators are always listed as
//! `a1, b1, .., ag, bg, c1, .., cb` and the product-one relation is the
//! left-to-right word `a1 b1 a1^-1 b1^-1 ... c1 ... cb`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::perm::{orbits, CycleType, PermError, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("expected {expected} handle pairs for base genus, found {found}")]
    HandleCount { expected: usize, found: usize },
    #[error("generator {name} acts on {found} points, expected {expected}")]
    GeneratorDegree {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("degree n must be at least 1")]
    ZeroDegree,
    #[error("product-one relation fails")]
    RelationViolated,
    #[error("generator count {found} does not match 2g + b = {expected}")]
    GeneratorCount { expected: usize, found: usize },
    #[error("the pairing is not preserved by {0}")]
    NotEquivariant(String),
    #[error("point map is not equivariant at point {point} under {generator}")]
    MapNotEquivariant { point: usize, generator: String },
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Name of generator `k` in the standard order for base genus `genus`.
pub fn generator_name(genus: usize, k: usize) -> String {
    if k < 2 * genus {
        let letter = if k.is_multiple_of(2) { 'a' } else { 'b' };
        format!("{letter}{}", k / 2 + 1)
    } else {
        format!("c{}", k - 2 * genus + 1)
    }
}

/// The product `[a1,b1]...[ag,bg] c1...cb` for generators in standard order.
pub fn relation_product(
    degree: usize,
    genus: usize,
    generators: &[Permutation],
) -> Result<Permutation, PermError> {
    let mut acc = Permutation::identity(degree);
    for h in 0..genus {
        let a = &generators[2 * h];
        let b = &generators[2 * h + 1];
        acc = acc
            .then(a)?
            .then(b)?
            .then(&a.inverse())?
            .then(&b.inverse())?;
    }
    for c in &generators[2 * genus..] {
        acc = acc.then(c)?;
    }
    Ok(acc)
}

/// A finite cover of a genus-`g` base punctured at `b` branch points: one
/// permutation of the fiber per generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverAction {
    point_count: usize,
    generators: Vec<Permutation>,
    base_genus: usize,
    branch_count: usize,
}

impl CoverAction {
    /// Checks generator count and degrees, and the product relation.
    pub fn new(
        point_count: usize,
        base_genus: usize,
        generators: Vec<Permutation>,
    ) -> Result<Self, CoverError> {
        let action = Self::new_unchecked_relation(point_count, base_genus, generators)?;
        if !action.relation_holds() {
            return Err(CoverError::RelationViolated);
        }
        Ok(action)
    }

    pub(crate) fn new_unchecked_relation(
        point_count: usize,
        base_genus: usize,
        generators: Vec<Permutation>,
    ) -> Result<Self, CoverError> {
        if generators.len() < 2 * base_genus {
            return Err(CoverError::GeneratorCount {
                expected: 2 * base_genus,
                found: generators.len(),
            });
        }
        for (k, g) in generators.iter().enumerate() {
            if g.degree() != point_count {
                return Err(CoverError::GeneratorDegree {
                    name: generator_name(base_genus, k),
                    expected: point_count,
                    found: g.degree(),
                });
            }
        }
        let branch_count = generators.len() - 2 * base_genus;
        Ok(CoverAction {
            point_count,
            generators,
            base_genus,
            branch_count,
        })
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn base_genus(&self) -> usize {
        self.base_genus
    }

    pub fn branch_count(&self) -> usize {
        self.branch_count
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn branch(&self, j: usize) -> &Permutation {
        &self.generators[2 * self.base_genus + j]
    }

    pub fn branches(&self) -> &[Permutation] {
        &self.generators[2 * self.base_genus..]
    }

    pub fn generator_name(&self, k: usize) -> String {
        generator_name(self.base_genus, k)
    }

    pub fn relation_holds(&self) -> bool {
        relation_product(self.point_count, self.base_genus, &self.generators)
            .map(|p| p.is_identity())
            .unwrap_or(false)
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        orbits(self.point_count, &self.generators)
    }

    pub fn is_transitive(&self) -> bool {
        self.point_count > 0 && self.orbits().len() == 1
    }

    /// The action restricted to an invariant subset, re-indexed by position in
    /// `points` (which must be sorted and closed under every generator).
    pub fn restrict(&self, points: &[usize]) -> CoverAction {
        let mut local = vec![usize::MAX; self.point_count];
        for (i, &p) in points.iter().enumerate() {
            local[p] = i;
        }
        let generators = self
            .generators
            .iter()
            .map(|g| {
                let images = points.iter().map(|&p| local[g.apply(p)]).collect();
                Permutation::from_images(images).expect("restriction to a non-invariant subset")
            })
            .collect();
        CoverAction {
            point_count: points.len(),
            generators,
            base_genus: self.base_genus,
            branch_count: self.branch_count,
        }
    }

    /// Checks that `map: self -> target` commutes with every generator.
    pub fn check_equivariant_map(
        &self,
        target: &CoverAction,
        map: &[usize],
    ) -> Result<(), CoverError> {
        for (k, (g, h)) in self.generators.iter().zip(target.generators()).enumerate() {
            for p in 0..self.point_count {
                if map[g.apply(p)] != h.apply(map[p]) {
                    return Err(CoverError::MapNotEquivariant {
                        point: p,
                        generator: self.generator_name(k),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Genus, degree and branch profile of one connected component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentAnalysis {
    pub points: Vec<usize>,
    pub degree: usize,
    pub euler_characteristic: i64,
    pub genus: i64,
    pub ramification_degree: usize,
    pub branch_profiles: Vec<CycleType>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverAnalysis {
    pub base_genus: usize,
    pub components: Vec<ComponentAnalysis>,
}

impl CoverAnalysis {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn total_ramification(&self) -> usize {
        self.components.iter().map(|c| c.ramification_degree).sum()
    }

    pub fn total_euler_characteristic(&self) -> i64 {
        self.components.iter().map(|c| c.euler_characteristic).sum()
    }
}

/// Orbits and per-component genera by Riemann-Hurwitz.
pub fn analyze(action: &CoverAction) -> Result<CoverAnalysis, CoverError> {
    if !action.relation_holds() {
        return Err(CoverError::RelationViolated);
    }
    let base_chi = 2 - 2 * action.base_genus() as i64;
    let components = action
        .orbits()
        .into_iter()
        .map(|points| {
            let mut member = vec![false; action.point_count()];
            for &p in &points {
                member[p] = true;
            }
            let branch_profiles: Vec<CycleType> = action
                .branches()
                .iter()
                .map(|c| {
                    CycleType::new(
                        c.cycles()
                            .iter()
                            .filter(|cyc| member[cyc[0]])
                            .map(Vec::len)
                            .collect(),
                    )
                })
                .collect();
            let ramification_degree: usize =
                branch_profiles.iter().map(CycleType::ramification).sum();
            let degree = points.len();
            let euler_characteristic = degree as i64 * base_chi - ramification_degree as i64;
            ComponentAnalysis {
                points,
                degree,
                euler_characteristic,
                genus: (2 - euler_characteristic) / 2,
                ramification_degree,
                branch_profiles,
            }
        })
        .collect();
    Ok(CoverAnalysis {
        base_genus: action.base_genus(),
        components,
    })
}

/// The pairing involution on `2n` sheets.
pub fn pairing(n: usize) -> Permutation {
    Permutation::from_images((0..2 * n).map(|i| (i + n) % (2 * n)).collect())
        .expect("pairing is a bijection")
}

/// Monodromy of `X~ -> Y` with its pairing structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonodromyRep {
    degree_n: usize,
    base_genus: usize,
    handles: Vec<(Permutation, Permutation)>,
    branches: Vec<Permutation>,
}

impl MonodromyRep {
    /// Structural checks only (counts and degrees); see [`validate`] for the
    /// admissibility hypotheses.
    pub fn new(
        degree_n: usize,
        base_genus: usize,
        handles: Vec<(Permutation, Permutation)>,
        branches: Vec<Permutation>,
    ) -> Result<Self, CoverError> {
        if degree_n == 0 {
            return Err(CoverError::ZeroDegree);
        }
        if handles.len() != base_genus {
            return Err(CoverError::HandleCount {
                expected: base_genus,
                found: handles.len(),
            });
        }
        let rep = MonodromyRep {
            degree_n,
            base_genus,
            handles,
            branches,
        };
        for (k, g) in rep.generators().iter().enumerate() {
            if g.degree() != 2 * degree_n {
                return Err(CoverError::GeneratorDegree {
                    name: generator_name(base_genus, k),
                    expected: 2 * degree_n,
                    found: g.degree(),
                });
            }
        }
        Ok(rep)
    }

    pub fn degree_n(&self) -> usize {
        self.degree_n
    }

    pub fn base_genus(&self) -> usize {
        self.base_genus
    }

    pub fn handles(&self) -> &[(Permutation, Permutation)] {
        &self.handles
    }

    pub fn branches(&self) -> &[Permutation] {
        &self.branches
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn sheet_count(&self) -> usize {
        2 * self.degree_n
    }

    /// Generators in standard order `a1, b1, .., c1, ..`.
    pub fn generators(&self) -> Vec<Permutation> {
        self.handles
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .chain(self.branches.iter().cloned())
            .collect()
    }

    pub fn generator_name(&self, k: usize) -> String {
        generator_name(self.base_genus, k)
    }

    pub fn pairing(&self) -> Permutation {
        pairing(self.degree_n)
    }

    /// The `2n`-sheet action of `X~` (relation not checked).
    pub fn sheet_action(&self) -> CoverAction {
        CoverAction::new_unchecked_relation(2 * self.degree_n, self.base_genus, self.generators())
            .expect("degrees checked at construction")
    }

    /// Relabels sheets by an ι-commuting permutation `h` (conjugating every
    /// generator), which moves the basepoint labeling without changing the cover.
    pub fn relabel(&self, h: &Permutation) -> Result<MonodromyRep, CoverError> {
        if !h.commutes_with(&self.pairing()) {
            return Err(CoverError::NotEquivariant("relabeling".into()));
        }
        let conj = |p: &Permutation| p.conjugate_by(h);
        MonodromyRep::new(
            self.degree_n,
            self.base_genus,
            self.handles
                .iter()
                .map(|(a, b)| Ok((conj(a)?, conj(b)?)))
                .collect::<Result<_, PermError>>()?,
            self.branches
                .iter()
                .map(conj)
                .collect::<Result<_, PermError>>()?,
        )
    }
}

/// Image of a sheet permutation on the `n` pairs, if it respects the pairing.
pub fn pair_image(g: &Permutation, n: usize) -> Option<Permutation> {
    if !g.commutes_with(&pairing(n)) {
        return None;
    }
    Permutation::from_images((0..n).map(|p| g.apply(p) % n).collect()).ok()
}

/// The degree-`n` action of `X` on pairs `{i, i + n}`.
pub fn pair_action(rep: &MonodromyRep) -> Result<CoverAction, CoverError> {
    let n = rep.degree_n();
    let generators = rep
        .generators()
        .iter()
        .enumerate()
        .map(|(k, g)| {
            pair_image(g, n).ok_or_else(|| CoverError::NotEquivariant(rep.generator_name(k)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    CoverAction::new_unchecked_relation(n, rep.base_genus(), generators)
}

/// Searches for a bijection `phi: a -> b` with `phi(g_a x) = g_b phi(x)` for
/// every generator, restricted to pairs accepted by `allowed`. Backtracks over
/// the image of one basepoint per orbit of `a`.
pub fn find_isomorphism(
    a: &CoverAction,
    b: &CoverAction,
    allowed: impl Fn(usize, usize) -> bool,
) -> Option<Permutation> {
    if a.point_count() != b.point_count() || a.generator_count() != b.generator_count() {
        return None;
    }
    let d = a.point_count();
    let reps: Vec<usize> = a.orbits().iter().map(|o| o[0]).collect();
    let mut map = vec![usize::MAX; d];
    let mut used = vec![false; d];

    fn propagate(
        a: &CoverAction,
        b: &CoverAction,
        allowed: &dyn Fn(usize, usize) -> bool,
        map: &mut [usize],
        used: &mut [bool],
        x: usize,
        y: usize,
    ) -> Option<Vec<usize>> {
        let mut assigned = vec![x];
        map[x] = y;
        used[y] = true;
        let mut head = 0;
        while head < assigned.len() {
            let u = assigned[head];
            head += 1;
            for (ga, gb) in a.generators().iter().zip(b.generators()) {
                let (u2, v2) = (ga.apply(u), gb.apply(map[u]));
                if map[u2] != usize::MAX {
                    if map[u2] != v2 {
                        undo(map, used, &assigned);
                        return None;
                    }
                } else if used[v2] || !allowed(u2, v2) {
                    undo(map, used, &assigned);
                    return None;
                } else {
                    map[u2] = v2;
                    used[v2] = true;
                    assigned.push(u2);
                }
            }
        }
        Some(assigned)
    }

    fn undo(map: &mut [usize], used: &mut [bool], assigned: &[usize]) {
        for &u in assigned {
            used[map[u]] = false;
            map[u] = usize::MAX;
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        a: &CoverAction,
        b: &CoverAction,
        allowed: &dyn Fn(usize, usize) -> bool,
        reps: &[usize],
        k: usize,
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let Some(&x) = reps.get(k) else {
            return true;
        };
        for y in 0..map.len() {
            if used[y] || !allowed(x, y) {
                continue;
            }
            if let Some(assigned) = propagate(a, b, allowed, map, used, x, y) {
                if search(a, b, allowed, reps, k + 1, map, used) {
                    return true;
                }
                undo(map, used, &assigned);
            }
        }
        false
    }

    if search(a, b, &allowed, &reps, 0, &mut map, &mut used) {
        Some(Permutation::from_images(map).expect("isomorphism is a bijection"))
    } else {
        None
    }
}

/// Pullback of the double cover of `Y` given by `chi` (one bit per handle
/// generator) along the pair action, labeled like `X~`.
pub fn fiber_product_with_character(pairs: &CoverAction, chi: &[u8]) -> CoverAction {
    let n = pairs.point_count();
    let generators = pairs
        .generators()
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let flip = chi.get(k).copied().unwrap_or(0) as usize;
            let images = (0..2 * n)
                .map(|x| {
                    let (p, e) = (x % n, x / n);
                    g.apply(p) + n * (e ^ flip)
                })
                .collect();
            Permutation::from_images(images).expect("fiber product action is a bijection")
        })
        .collect();
    CoverAction::new_unchecked_relation(2 * n, pairs.base_genus(), generators)
        .expect("degrees consistent")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaseChangeVerdict {
    pub is_base_change: bool,
    /// Values of the character on `a1, b1, .., ag, bg` when one exists.
    pub witness: Option<Vec<u8>>,
}

/// Tries every character of `H1(Y, Z/2)` (zero on branch loops) and tests
/// whether `X~` is isomorphic over `X` to the pulled-back double cover.
pub fn is_base_change(rep: &MonodromyRep) -> Result<BaseChangeVerdict, CoverError> {
    let pairs = pair_action(rep)?;
    let sheets = rep.sheet_action();
    let n = rep.degree_n();
    let handle_gens = 2 * rep.base_genus();
    for mask in 0u64..(1u64 << handle_gens) {
        let chi: Vec<u8> = (0..handle_gens).map(|k| ((mask >> k) & 1) as u8).collect();
        let candidate = fiber_product_with_character(&pairs, &chi);
        if find_isomorphism(&sheets, &candidate, |x, y| x % n == y % n).is_some() {
            return Ok(BaseChangeVerdict {
                is_base_change: true,
                witness: Some(chi),
            });
        }
    }
    Ok(BaseChangeVerdict {
        is_base_change: false,
        witness: None,
    })
}

/// True when the action admits no block system other than the trivial ones.
pub fn is_primitive(action: &CoverAction) -> bool {
    let d = action.point_count();
    if d <= 2 {
        return true;
    }
    // Finest block system containing {0, j}, by union-find closure.
    for j in 1..d {
        let mut parent: Vec<usize> = (0..d).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut pending = vec![(0usize, j)];
        while let Some((u, v)) = pending.pop() {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                continue;
            }
            parent[ru] = rv;
            for g in action.generators() {
                pending.push((g.apply(u), g.apply(v)));
            }
        }
        let root = find(&mut parent, 0);
        if (0..d).any(|x| find(&mut parent, x) != root) {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub name: &'static str,
    pub status: CheckStatus,
    /// Informational checks do not affect admissibility.
    pub required: bool,
    pub detail: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIP",
        };
        write!(f, "[{tag}] {}", self.name)?;
        if !self.required {
            write!(f, " (informational)")?;
        }
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub diagnostics: Vec<Diagnostic>,
}

impl Validation {
    pub fn is_admissible(&self) -> bool {
        self.diagnostics
            .iter()
            .all(|d| !d.required || d.status == CheckStatus::Pass)
    }

    pub fn failures(&self) -> Vec<&Diagnostic> {
        self.diagnostics
            .iter()
            .filter(|d| d.required && d.status != CheckStatus::Pass)
            .collect()
    }

    pub fn get(&self, name: &str) -> Option<&Diagnostic> {
        self.diagnostics.iter().find(|d| d.name == name)
    }
}

pub const CHECK_DEGREE: &str = "degree at least 3";
pub const CHECK_RELATION: &str = "product relation";
pub const CHECK_EQUIVARIANCE: &str = "pairing equivariance";
pub const CHECK_SHEETS_TRANSITIVE: &str = "sheet transitivity";
pub const CHECK_PAIRS_TRANSITIVE: &str = "pair transitivity";
pub const CHECK_SIMPLE: &str = "simple ramification";
pub const CHECK_ETALE: &str = "etale double cover";
pub const CHECK_BASE_CHANGE: &str = "not a base change";
pub const CHECK_PRIMITIVE: &str = "primitive pair action";

fn diag(name: &'static str, ok: bool, detail: String) -> Diagnostic {
    Diagnostic {
        name,
        status: if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        required: true,
        detail,
    }
}

fn skipped(name: &'static str, reason: &str) -> Diagnostic {
    Diagnostic {
        name,
        status: CheckStatus::Skipped,
        required: true,
        detail: reason.to_string(),
    }
}

/// Runs every admissibility check; never fails on structurally valid input.
pub fn validate(rep: &MonodromyRep) -> Validation {
    let n = rep.degree_n();
    let iota = rep.pairing();
    let gens = rep.generators();
    let names: Vec<String> = (0..gens.len()).map(|k| rep.generator_name(k)).collect();
    let mut out = Vec::new();

    out.push(diag(CHECK_DEGREE, n >= 3, format!("n = {n}")));

    let relation_ok = rep.sheet_action().relation_holds();
    out.push(diag(CHECK_RELATION, relation_ok, String::new()));

    let bad_equivariance: Vec<&str> = gens
        .iter()
        .zip(&names)
        .filter(|(g, _)| !g.commutes_with(&iota))
        .map(|(_, name)| name.as_str())
        .collect();
    let equivariant = bad_equivariance.is_empty();
    out.push(diag(
        CHECK_EQUIVARIANCE,
        equivariant,
        if equivariant {
            String::new()
        } else {
            format!("broken by {}", bad_equivariance.join(", "))
        },
    ));

    let sheet_orbits = orbits(2 * n, &gens).len();
    out.push(diag(
        CHECK_SHEETS_TRANSITIVE,
        sheet_orbits == 1,
        format!("{sheet_orbits} orbit(s) on {} sheets", 2 * n),
    ));

    if !equivariant {
        for name in [
            CHECK_PAIRS_TRANSITIVE,
            CHECK_SIMPLE,
            CHECK_ETALE,
            CHECK_BASE_CHANGE,
        ] {
            out.push(skipped(name, "requires pairing equivariance"));
        }
        return Validation { diagnostics: out };
    }

    let pairs = pair_action(rep).expect("equivariance checked");
    let pair_orbits = pairs.orbits().len();
    out.push(diag(
        CHECK_PAIRS_TRANSITIVE,
        pair_orbits == 1,
        format!("{pair_orbits} orbit(s) on {n} pairs"),
    ));

    let not_simple: Vec<String> = pairs
        .branches()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.cycle_type().is_transposition())
        .map(|(j, c)| format!("c{} has pair type {}", j + 1, c.cycle_type()))
        .collect();
    out.push(diag(
        CHECK_SIMPLE,
        not_simple.is_empty(),
        not_simple.join("; "),
    ));

    let ramified: Vec<String> = rep
        .branches()
        .iter()
        .enumerate()
        .filter_map(|(j, c)| {
            c.cycles()
                .into_iter()
                .find(|cyc| cyc.contains(&iota.apply(cyc[0])))
                .map(|cyc| {
                    format!(
                        "c{} has a pairing-stable cycle through sheet {}",
                        j + 1,
                        cyc[0]
                    )
                })
        })
        .collect();
    out.push(diag(CHECK_ETALE, ramified.is_empty(), ramified.join("; ")));

    if relation_ok && sheet_orbits == 1 {
        let verdict = is_base_change(rep).expect("equivariance checked");
        out.push(diag(
            CHECK_BASE_CHANGE,
            !verdict.is_base_change,
            match verdict.witness {
                Some(chi) => format!("pulled back from character {chi:?} on a1, b1, ..."),
                None => String::new(),
            },
        ));
    } else {
        out.push(skipped(
            CHECK_BASE_CHANGE,
            "requires the product relation and a connected double cover",
        ));
    }

    out.push(Diagnostic {
        name: CHECK_PRIMITIVE,
        status: if is_primitive(&pairs) {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        required: false,
        detail: String::new(),
    });

    Validation { diagnostics: out }
}
