//! Maps on `H1` induced by covering maps and correspondences, the Prym
//! lattices of the two double covers, and the isogeny checks between them.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Serialize, Serializer};

use super::complex::{h1_with_form, H1Lattice, SurfaceComplex};
use super::lattice::{determinant, elementary_divisors, kernel_basis, solve};
use super::matrix::IntMatrix;
use super::HomologyError;
use crate::corresp::{build_d, build_s, CorrespError, Correspondence, SCorrespondence};
use crate::cover::{pair_action, CoverAction, MonodromyRep};
use crate::ngonal::{sigma_quotient, Lift};
use crate::perm::Permutation;

fn check_generators(a: &CoverAction, b: &CoverAction) -> Result<usize, HomologyError> {
    if a.generator_count() != b.generator_count() {
        return Err(HomologyError::GeneratorMismatch);
    }
    Ok(a.generator_count())
}

fn preimages(map: &[usize], target_points: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); target_points];
    for (p, &q) in map.iter().enumerate() {
        out[q].push(p);
    }
    out
}

/// `f_*` for an equivariant point map `f: source -> target`.
pub fn pushforward_matrix(
    source: &H1Lattice,
    target: &H1Lattice,
    map: &[usize],
) -> Result<IntMatrix, HomologyError> {
    let (sa, ta) = (source.complex().action(), target.complex().action());
    let m = check_generators(sa, ta)?;
    sa.check_equivariant_map(ta, map)?;
    source.induced_map(target, |e| vec![(map[e / m] * m + e % m, 1)])
}

/// `f^!` for an equivariant covering map `f: up -> down`: each edge goes to
/// the sum of its lifts.
pub fn transfer_matrix(
    down: &H1Lattice,
    up: &H1Lattice,
    map: &[usize],
) -> Result<IntMatrix, HomologyError> {
    let (da, ua) = (down.complex().action(), up.complex().action());
    let m = check_generators(da, ua)?;
    ua.check_equivariant_map(da, map)?;
    let fibers = preimages(map, da.point_count());
    down.induced_map(up, |e| {
        fibers[e / m].iter().map(|&p| (p * m + e % m, 1)).collect()
    })
}

/// Transfer along the left projection followed by pushforward along the right.
pub fn correspondence_matrix(
    corr: &Correspondence,
    left: &H1Lattice,
    right: &H1Lattice,
) -> Result<IntMatrix, HomologyError> {
    let (la, ra) = (left.complex().action(), right.complex().action());
    let m = check_generators(&corr.incidence, la)?;
    check_generators(&corr.incidence, ra)?;
    corr.incidence.check_equivariant_map(la, &corr.left)?;
    corr.incidence.check_equivariant_map(ra, &corr.right)?;
    let fibers = preimages(&corr.left, la.point_count());
    left.induced_map(right, |e| {
        fibers[e / m]
            .iter()
            .map(|&p| (corr.right[p] * m + e % m, 1))
            .collect()
    })
}

/// `sigma_*` for an equivariant involution of the fiber.
pub fn involution_matrix(h1: &H1Lattice, sigma: &Permutation) -> Result<IntMatrix, HomologyError> {
    if !sigma.then(sigma)?.is_identity() {
        return Err(HomologyError::NotAnInvolution);
    }
    let m = pushforward_matrix(h1, h1, sigma.images())?;
    if !is_symplectic(&m, h1.form()) {
        return Err(HomologyError::NotSymplectic);
    }
    Ok(m)
}

fn is_symplectic(m: &IntMatrix, form: &IntMatrix) -> bool {
    m.transpose().mul(form).mul(m) == *form
}

fn serialize_big<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn serialize_big_opt<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}

fn serialize_bigs<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// The anti-invariant sublattice `ker(1 + sigma_*)` with its forms.
#[derive(Debug, Clone, Serialize)]
pub struct PrymLattice {
    /// Basis as columns in the coordinates of `H1`.
    pub basis: IntMatrix,
    pub rank: usize,
    pub restricted_form: IntMatrix,
    /// Half the restricted form, when every entry is even.
    pub halved_form: Option<IntMatrix>,
    #[serde(serialize_with = "serialize_bigs")]
    pub elementary_divisors: Vec<BigInt>,
    /// Index of `im(1 - sigma_*)` in the lattice (0 if not of full rank).
    #[serde(serialize_with = "serialize_big")]
    pub image_index: BigInt,
}

impl PrymLattice {
    /// Restricted form is exactly twice a unimodular form.
    pub fn is_twice_principal(&self) -> bool {
        self.elementary_divisors.len() == self.rank
            && self
                .elementary_divisors
                .iter()
                .all(|d| *d == BigInt::from(2))
            && self.halved_form.is_some()
    }
}

/// Saturated anti-invariant lattice of `sigma_star` in `h1`.
pub fn prym_lattice(h1: &H1Lattice, sigma_star: &IntMatrix) -> Result<PrymLattice, HomologyError> {
    let r = h1.rank();
    if sigma_star.rows() != r || !sigma_star.mul(sigma_star).is_scalar(1) {
        return Err(HomologyError::NotAnInvolution);
    }
    let id = IntMatrix::identity(r);
    let basis = kernel_basis(&id.add(sigma_star));
    let restricted_form = basis.transpose().mul(h1.form()).mul(&basis);
    let halved_form = restricted_form.divide_exact(2).or_else(|| {
        // Rank zero divides trivially.
        restricted_form.is_zero().then(|| restricted_form.clone())
    });
    let divisors = elementary_divisors(&restricted_form);
    let image = id.sub(sigma_star);
    let image_index = match solve(&basis, &image) {
        Some(coords) => {
            let d = elementary_divisors(&coords);
            if d.len() == basis.cols() {
                d.iter().product()
            } else {
                BigInt::from(0)
            }
        }
        None => {
            return Err(HomologyError::Inconsistent(
                "image of 1 - sigma escapes the kernel".into(),
            ))
        }
    };
    Ok(PrymLattice {
        rank: basis.cols(),
        basis,
        restricted_form,
        halved_form,
        elementary_divisors: divisors,
        image_index,
    })
}

/// Matrix of `map` between two sublattices, when it maps one into the other.
pub fn restrict_map(map: &IntMatrix, from: &PrymLattice, to: &PrymLattice) -> Option<IntMatrix> {
    solve(&to.basis, &map.mul(&from.basis))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            name,
            passed,
            detail: detail.into(),
        }
    }
}

pub const ADJOINT: &str = "E_X~ s = (s^t)^T E_C~1";
pub const STS_DESCENT: &str = "s^t s = sum (n-2i) d_(2i) on H1(C~1)";
pub const EQUIVARIANT: &str = "s sigma = iota s";
pub const DEGREE_KAPPA: &str = "degree law X~ -> X";
pub const DEGREE_TAU: &str = "degree law C~1 -> C1";
pub const DEGREE_S_LEFT: &str = "degree law S -> C~1";
pub const DEGREE_S_RIGHT: &str = "degree law S -> X~";
pub const PRYM_RANK: &str = "rank of both Prym lattices = 2(g_X - 1)";
pub const TYPE_X: &str = "form on Lambda^- is twice unimodular";
pub const TYPE_C: &str = "form on Lambda_1^- is twice unimodular";
pub const SST: &str = "s s^t = 2^(n-2) on Lambda^-";
pub const STS: &str = "s^t s = 4 on Lambda_1^-";
pub const DET: &str = "|det s| = 2^(2(g_X - 1))";
pub const DIVISIBLE: &str = "s(Lambda_1^-) in 2 Lambda^-";
pub const PSI_UNIMODULAR: &str = "psi = s/2 unimodular";
pub const PSI_FORM: &str = "psi preserves the halved forms";
pub const D2_KILLS: &str = "d_2 vanishes on Lambda_1^-";

/// Homology summary of one closed connected cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverHomology {
    pub name: &'static str,
    pub points: usize,
    pub genus: usize,
    pub euler_characteristic: i64,
    pub rank: usize,
    pub form_unimodular: bool,
}

fn summarize(name: &'static str, h1: &H1Lattice) -> CoverHomology {
    let cx = h1.complex();
    CoverHomology {
        name,
        points: cx.vertex_count(),
        genus: cx.genus(),
        euler_characteristic: cx.euler_characteristic(),
        rank: h1.rank(),
        form_unimodular: determinant(h1.form()).abs().is_one() || h1.rank() == 0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PrymPackage {
    pub n: usize,
    pub pair_genus: usize,
    pub covers: Vec<CoverHomology>,
    /// `s_*: H1(C~1) -> H1(X~)` and its transpose correspondence.
    pub s_full: IntMatrix,
    pub st_full: IntMatrix,
    /// Anti-invariant lattice of `X~ -> X`.
    pub prym: Option<PrymLattice>,
    /// Anti-invariant lattice of `C~1 -> C1`.
    pub prym_first: Option<PrymLattice>,
    /// `s_*` and `s^t_*` between the Prym lattices.
    pub s: Option<IntMatrix>,
    pub st: Option<IntMatrix>,
    pub psi: Option<IntMatrix>,
    #[serde(serialize_with = "serialize_big_opt")]
    pub det_s: Option<BigInt>,
    pub verdicts: Vec<Verdict>,
}

impl PrymPackage {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

/// `pi_* pi^! = degree` on `H1(down)` for an equivariant map from a possibly
/// disconnected cover, summed over its components.
pub fn degree_law(
    up: &CoverAction,
    map: &[usize],
    down: &H1Lattice,
    degree: i64,
) -> Result<bool, HomologyError> {
    Ok(degree_laws(up, &[(map, down, degree)])?[0])
}

/// [`degree_law`] for several maps out of the same cover, sharing its homology.
pub fn degree_laws(
    up: &CoverAction,
    maps: &[(&[usize], &H1Lattice, i64)],
) -> Result<Vec<bool>, HomologyError> {
    let mut totals: Vec<IntMatrix> = maps
        .iter()
        .map(|(_, down, _)| IntMatrix::zeros(down.rank(), down.rank()))
        .collect();
    for orbit in up.orbits() {
        let h1 = h1_with_form(&SurfaceComplex::component(up, &orbit)?)?;
        for ((map, down, _), total) in maps.iter().zip(totals.iter_mut()) {
            let local: Vec<usize> = orbit.iter().map(|&p| map[p]).collect();
            let push = pushforward_matrix(&h1, down, &local)?;
            let transfer = transfer_matrix(down, &h1, &local)?;
            *total = total.add(&push.mul(&transfer));
        }
    }
    Ok(totals
        .iter()
        .zip(maps)
        .map(|(total, (_, _, degree))| total.is_scalar(*degree))
        .collect())
}

/// All lattice-level identities for an admissible representation whose lift
/// cover splits. Prym verdicts need even `n`; the isogeny verdicts need
/// `n = 4` and `g_X >= 2`.
pub fn verify_isogeny_package(rep: &MonodromyRep) -> Result<PrymPackage, HomologyError> {
    let s = build_s(rep)?;
    if !s.lifts.is_split() {
        return Err(CorrespError::NotSplit.into());
    }
    let n = s.n;
    let hx = h1_with_form(&SurfaceComplex::new(&s.sheets)?)?;
    let hc = h1_with_form(&SurfaceComplex::new(&s.first_component)?)?;
    let pairs = pair_action(rep)?;
    let hp = h1_with_form(&SurfaceComplex::new(&pairs)?)?;
    let pair_genus = hp.complex().genus();
    let mut covers = vec![
        summarize("X~", &hx),
        summarize("C~1", &hc),
        summarize("X", &hp),
    ];
    let mut verdicts = Vec::new();

    let s_full = correspondence_matrix(&s.correspondence, &hc, &hx)?;
    let st_full = correspondence_matrix(&s.correspondence.transpose(), &hx, &hc)?;
    let adjoint = hx.form().mul(&s_full) == st_full.transpose().mul(hc.form());
    verdicts.push(Verdict::new(ADJOINT, adjoint, "all basis pairs"));

    let mut d_matrices = Vec::new();
    let mut sum = IntMatrix::zeros(hc.rank(), hc.rank());
    for i in 0..=(n - 1) / 2 {
        let d = correspondence_matrix(&build_d(&s, 2 * i)?, &hc, &hc)?;
        sum = sum.add(&d.scale((n - 2 * i) as i64));
        d_matrices.push(d);
    }
    verdicts.push(Verdict::new(
        STS_DESCENT,
        st_full.mul(&s_full) == sum,
        format!("rank {}", hc.rank()),
    ));

    let kappa: Vec<usize> = (0..2 * n).map(|i| i % n).collect();
    verdicts.push(Verdict::new(
        DEGREE_KAPPA,
        degree_law(&s.sheets, &kappa, &hp, 2)?,
        "degree 2",
    ));
    let incidence = &s.correspondence.incidence;
    let laws = degree_laws(
        incidence,
        &[
            (&s.correspondence.left, &hc, n as i64),
            (&s.correspondence.right, &hx, 1 << (n - 2)),
        ],
    )?;
    verdicts.push(Verdict::new(DEGREE_S_LEFT, laws[0], format!("degree {n}")));
    verdicts.push(Verdict::new(
        DEGREE_S_RIGHT,
        laws[1],
        format!("degree {}", 1u64 << (n - 2)),
    ));

    let mut package = PrymPackage {
        n,
        pair_genus,
        covers: Vec::new(),
        s_full,
        st_full,
        prym: None,
        prym_first: None,
        s: None,
        st: None,
        psi: None,
        det_s: None,
        verdicts: Vec::new(),
    };
    if n % 2 == 0 {
        let (c1_summary, more) = even_degree_checks(rep, &s, &hx, &hc, &d_matrices, &mut package)?;
        covers.push(c1_summary);
        verdicts.extend(more);
    }
    package.covers = covers;
    package.verdicts = verdicts;
    Ok(package)
}

fn even_degree_checks(
    rep: &MonodromyRep,
    s: &SCorrespondence,
    hx: &H1Lattice,
    hc: &H1Lattice,
    d_matrices: &[IntMatrix],
    package: &mut PrymPackage,
) -> Result<(CoverHomology, Vec<Verdict>), HomologyError> {
    let n = s.n;
    let mut verdicts = Vec::new();

    // C1 = C~1 / sigma: the quotient orbit containing the image of lift 0.
    let quotient = sigma_quotient(&s.lifts);
    let orbit = quotient
        .quotient
        .orbits()
        .into_iter()
        .find(|o| o.contains(&quotient.quotient_point[0]))
        .expect("every point lies in an orbit");
    let c1 = quotient.quotient.restrict(&orbit);
    let hq = h1_with_form(&SurfaceComplex::new(&c1)?)?;
    let tau: Vec<usize> = s
        .first_component_lifts
        .iter()
        .map(|&l| {
            orbit
                .binary_search(&quotient.quotient_point[l])
                .expect("C~1 maps onto C1")
        })
        .collect();
    verdicts.push(Verdict::new(
        DEGREE_TAU,
        degree_law(&s.first_component, &tau, &hq, 2)?,
        "degree 2",
    ));

    let iota = involution_matrix(hx, &rep.pairing())?;
    let sigma_local = Permutation::from_images(
        s.first_component_lifts
            .iter()
            .map(|&l| {
                s.local_index(Lift(l as u32).complement(n))
                    .expect("complement preserves C~1 for even n")
            })
            .collect(),
    )?;
    let sigma = involution_matrix(hc, &sigma_local)?;
    verdicts.push(Verdict::new(
        EQUIVARIANT,
        package.s_full.mul(&sigma) == iota.mul(&package.s_full),
        "",
    ));

    let lambda = prym_lattice(hx, &iota)?;
    let lambda1 = prym_lattice(hc, &sigma)?;
    verdicts.push(Verdict::new(
        TYPE_X,
        lambda.is_twice_principal(),
        format!(
            "elementary divisors {:?}",
            strings(&lambda.elementary_divisors)
        ),
    ));
    verdicts.push(Verdict::new(
        TYPE_C,
        lambda1.is_twice_principal(),
        format!(
            "elementary divisors {:?}",
            strings(&lambda1.elementary_divisors)
        ),
    ));

    let s_r = restrict_map(&package.s_full, &lambda1, &lambda);
    let st_r = restrict_map(&package.st_full, &lambda, &lambda1);
    let sst = match (&s_r, &st_r) {
        (Some(a), Some(b)) => a.mul(b).is_scalar(1 << (n - 2)),
        _ => false,
    };
    verdicts.push(Verdict::new(
        SST,
        sst,
        if s_r.is_some() && st_r.is_some() {
            String::new()
        } else {
            "maps do not restrict to the Prym lattices".to_string()
        },
    ));

    let g_x = package.pair_genus;
    if n == 4 && g_x >= 2 {
        let expected = 2 * (g_x - 1);
        verdicts.push(Verdict::new(
            PRYM_RANK,
            lambda.rank == expected && lambda1.rank == expected,
            format!(
                "ranks {} and {}, expected {expected}",
                lambda.rank, lambda1.rank
            ),
        ));
        let sts = match (&s_r, &st_r) {
            (Some(a), Some(b)) => b.mul(a).is_scalar(4),
            _ => false,
        };
        verdicts.push(Verdict::new(STS, sts, ""));
        let det_s = s_r.as_ref().filter(|m| m.is_square()).map(determinant);
        let det_target = BigInt::one() << (2 * (g_x - 1));
        verdicts.push(Verdict::new(
            DET,
            det_s
                .as_ref()
                .map(|d| d.abs() == det_target)
                .unwrap_or(false),
            format!(
                "det {}, expected +-{det_target}",
                det_s
                    .as_ref()
                    .map(|d| d.to_string())
                    .unwrap_or_else(|| "n/a".into())
            ),
        ));
        let psi = s_r.as_ref().and_then(|m| m.divide_exact(2));
        let odd_columns = s_r.as_ref().map_or(0, |m| {
            (0..m.cols())
                .filter(|&j| m.column(j).iter().any(|x| x % 2 != 0))
                .count()
        });
        verdicts.push(Verdict::new(
            DIVISIBLE,
            psi.is_some(),
            format!("{odd_columns} basis image(s) not divisible by 2"),
        ));
        let psi_det = psi.as_ref().filter(|m| m.is_square()).map(determinant);
        verdicts.push(Verdict::new(
            PSI_UNIMODULAR,
            psi_det.as_ref().map(|d| d.abs().is_one()).unwrap_or(false),
            psi_det
                .map(|d| format!("det {d}"))
                .unwrap_or_else(|| "psi is not integral".into()),
        ));
        let preserves = match (&psi, &lambda.halved_form, &lambda1.halved_form) {
            (Some(p), Some(ex), Some(ec)) => p.transpose().mul(ex).mul(p) == *ec,
            _ => false,
        };
        let form_detail = if psi.is_some() {
            ""
        } else {
            "psi is not integral"
        };
        verdicts.push(Verdict::new(PSI_FORM, preserves, form_detail));
        let d2 = &d_matrices[1];
        verdicts.push(Verdict::new(D2_KILLS, d2.mul(&lambda1.basis).is_zero(), ""));
        package.det_s = det_s;
        package.psi = psi;
    }

    package.s = s_r;
    package.st = st_r;
    package.prym = Some(lambda);
    package.prym_first = Some(lambda1);
    Ok((summarize("C1", &hq), verdicts))
}

fn strings(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: usize, s: &str) -> Permutation {
        Permutation::parse_cycles(s, d).unwrap()
    }

    fn elliptic_double() -> H1Lattice {
        let t = p(2, "(0 1)");
        let action = CoverAction::new(2, 0, vec![t; 4]).unwrap();
        h1_with_form(&SurfaceComplex::new(&action).unwrap()).unwrap()
    }

    #[test]
    fn identity_involution_is_identity() {
        let h1 = elliptic_double();
        let m = involution_matrix(&h1, &Permutation::identity(2)).unwrap();
        assert!(m.is_scalar(1));
        let prym = prym_lattice(&h1, &m).unwrap();
        assert_eq!(prym.rank, 0);
    }

    #[test]
    fn deck_involution_of_elliptic_double() {
        let h1 = elliptic_double();
        let m = involution_matrix(&h1, &p(2, "(0 1)")).unwrap();
        assert!(m.is_scalar(-1));
        let prym = prym_lattice(&h1, &m).unwrap();
        assert_eq!(prym.rank, 2);
        // The whole lattice is anti-invariant, so the form is unimodular, not even.
        assert!(!prym.is_twice_principal());
        assert_eq!(prym.image_index, BigInt::from(4));
    }

    #[test]
    fn elliptic_double_of_elliptic_base() {
        // Etale double cover of a torus: a1 swaps the sheets.
        let a = p(2, "(0 1)");
        let b = Permutation::identity(2);
        let action = CoverAction::new(2, 1, vec![a.clone(), b]).unwrap();
        let h1 = h1_with_form(&SurfaceComplex::new(&action).unwrap()).unwrap();
        assert_eq!(h1.rank(), 2);
        let m = involution_matrix(&h1, &a).unwrap();
        let prym = prym_lattice(&h1, &m).unwrap();
        assert_eq!(prym.rank, 0);
    }

    #[test]
    fn non_involution_is_rejected() {
        let t = p(3, "(0 1 2)");
        let action = CoverAction::new(3, 0, vec![t.clone(), t.clone(), t]).unwrap();
        let h1 = h1_with_form(&SurfaceComplex::new(&action).unwrap()).unwrap();
        assert_eq!(
            involution_matrix(&h1, &p(3, "(0 1 2)")),
            Err(HomologyError::NotAnInvolution)
        );
    }

    #[test]
    fn degree_law_for_double_cover_of_torus() {
        let a = p(2, "(0 1)");
        let id = Permutation::identity(2);
        let up = CoverAction::new(2, 1, vec![a, id]).unwrap();
        let down_action = CoverAction::new(1, 1, vec![Permutation::identity(1); 2]).unwrap();
        let down = h1_with_form(&SurfaceComplex::new(&down_action).unwrap()).unwrap();
        assert!(degree_law(&up, &[0, 0], &down, 2).unwrap());
        // Trivial (disconnected) double cover: two copies of the torus.
        let trivial = CoverAction::new(2, 1, vec![Permutation::identity(2); 2]).unwrap();
        assert!(degree_law(&trivial, &[0, 0], &down, 2).unwrap());
        assert!(!degree_law(&trivial, &[0, 0], &down, 1).unwrap());
    }
}
