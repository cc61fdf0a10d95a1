//! Ribbon-graph CW model of a closed branched cover and its first homology.
//!
//! The base `Y` is built from one vertex, one loop per generator, one polygon
//! with boundary `a1 b1 a1^-1 b1^-1 ... c1 ... cb` and one disk glued along each
//! `cj` loop. A cover with fiber `F` lifts this to vertices `F`, edges
//! `(p, generator)` running from `p` to `g(p)`, one polygon per fiber point
//! and one disk per cycle of each `cj`. Every edge is traversed once in each
//! direction by the face boundaries, which fixes the orientation.
//!
//! Edge `e` has darts `2e` (tail to head) and `2e + 1` (head to tail).

use std::collections::VecDeque;

use super::lattice::{determinant, inverse_unimodular_fast};
use super::matrix::{dot, IntMatrix};
use super::HomologyError;
use crate::cover::{analyze, CoverAction};

#[derive(Debug, Clone)]
pub struct SurfaceComplex {
    action: CoverAction,
    /// Face boundaries as cyclic dart sequences (polygons first, then disks).
    faces: Vec<Vec<usize>>,
    face_of_dart: Vec<usize>,
    /// Counter-clockwise successor among darts leaving the same vertex.
    rotation: Vec<usize>,
    genus: usize,
}

impl SurfaceComplex {
    /// Builds the complex of a connected cover.
    pub fn new(action: &CoverAction) -> Result<Self, HomologyError> {
        if !action.is_transitive() {
            return Err(HomologyError::Disconnected(action.orbits().len()));
        }
        let analysis = analyze(action)?;
        let genus = analysis.components[0].genus as usize;
        let d = action.point_count();
        let m = action.generator_count();
        let g = action.base_genus();
        let gens = action.generators();
        let inverses: Vec<_> = gens.iter().map(|p| p.inverse()).collect();
        let edge = |p: usize, k: usize| p * m + k;

        let mut faces = Vec::with_capacity(d);
        for start in 0..d {
            let mut x = start;
            let mut darts = Vec::with_capacity(4 * g + action.branch_count());
            let forward = |x: &mut usize, k: usize, darts: &mut Vec<usize>| {
                darts.push(2 * edge(*x, k));
                *x = gens[k].apply(*x);
            };
            let backward = |x: &mut usize, k: usize, darts: &mut Vec<usize>| {
                let y = inverses[k].apply(*x);
                darts.push(2 * edge(y, k) + 1);
                *x = y;
            };
            for h in 0..g {
                forward(&mut x, 2 * h, &mut darts);
                forward(&mut x, 2 * h + 1, &mut darts);
                backward(&mut x, 2 * h, &mut darts);
                backward(&mut x, 2 * h + 1, &mut darts);
            }
            for k in 2 * g..m {
                forward(&mut x, k, &mut darts);
            }
            debug_assert_eq!(x, start, "relation checked by analyze");
            faces.push(darts);
        }
        for k in 2 * g..m {
            for cycle in gens[k].cycles() {
                // Disk boundary runs against the loop: p0 -> c^-1(p0) -> ...
                let darts = cycle
                    .iter()
                    .rev()
                    .map(|&p| 2 * edge(p, k) + 1)
                    .collect::<Vec<_>>();
                faces.push(darts);
            }
        }

        let dart_count = 2 * d * m;
        let mut face_of_dart = vec![usize::MAX; dart_count];
        let mut prev_in_face = vec![usize::MAX; dart_count];
        for (f, darts) in faces.iter().enumerate() {
            for (i, &dart) in darts.iter().enumerate() {
                if face_of_dart[dart] != usize::MAX {
                    return Err(HomologyError::Inconsistent(format!(
                        "dart {dart} lies on two faces"
                    )));
                }
                face_of_dart[dart] = f;
                prev_in_face[dart] = darts[(i + darts.len() - 1) % darts.len()];
            }
        }
        if face_of_dart.contains(&usize::MAX) {
            return Err(HomologyError::Inconsistent("a dart lies on no face".into()));
        }
        let rotation = prev_in_face.iter().map(|&d| d ^ 1).collect();

        let complex = SurfaceComplex {
            action: action.clone(),
            faces,
            face_of_dart,
            rotation,
            genus,
        };
        let chi = complex.euler_characteristic();
        if chi != 2 - 2 * genus as i64 {
            return Err(HomologyError::Inconsistent(format!(
                "Euler characteristic {chi} disagrees with Riemann-Hurwitz genus {genus}"
            )));
        }
        Ok(complex)
    }

    /// Complex of the component spanned by `points` (sorted, invariant).
    pub fn component(action: &CoverAction, points: &[usize]) -> Result<Self, HomologyError> {
        Self::new(&action.restrict(points))
    }

    pub fn action(&self) -> &CoverAction {
        &self.action
    }

    pub fn vertex_count(&self) -> usize {
        self.action.point_count()
    }

    pub fn edge_count(&self) -> usize {
        self.action.point_count() * self.action.generator_count()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// Index of edge `(point, generator)`.
    pub fn edge(&self, point: usize, generator: usize) -> usize {
        point * self.action.generator_count() + generator
    }

    pub fn tail(&self, dart: usize) -> usize {
        let e = dart / 2;
        let m = self.action.generator_count();
        let (p, k) = (e / m, e % m);
        if dart.is_multiple_of(2) {
            p
        } else {
            self.action.generators()[k].apply(p)
        }
    }

    pub fn head(&self, dart: usize) -> usize {
        self.tail(dart ^ 1)
    }

    /// `d1`: columns are edges, rows vertices.
    pub fn boundary_1(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.vertex_count(), self.edge_count());
        for e in 0..self.edge_count() {
            m[(self.head(2 * e), e)] += 1;
            m[(self.tail(2 * e), e)] -= 1;
        }
        m
    }

    /// `d2`: columns are faces, rows edges.
    pub fn boundary_2(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.edge_count(), self.face_count());
        for (f, darts) in self.faces.iter().enumerate() {
            for &dart in darts {
                m[(dart / 2, f)] += dart_sign(dart);
            }
        }
        m
    }

    /// Boundary of a 1-chain.
    pub fn chain_boundary(&self, chain: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.vertex_count()];
        for (e, &c) in chain.iter().enumerate() {
            if c != 0 {
                out[self.head(2 * e)] += c;
                out[self.tail(2 * e)] -= c;
            }
        }
        out
    }

    /// Darts leaving `v` in counter-clockwise order starting at `dart`.
    pub fn rotation_from(&self, dart: usize) -> Vec<usize> {
        let mut out = vec![dart];
        let mut x = self.rotation[dart];
        while x != dart {
            out.push(x);
            x = self.rotation[x];
        }
        out
    }

    /// Crossing cochain of a closed walk pushed off to its left.
    ///
    /// Around each vertex the pushed curve sweeps over the darts strictly
    /// between the outgoing dart and the reversed incoming dart (counter-
    /// clockwise from the outgoing one). Crossing a dart that leaves the
    /// vertex along its edge orientation counts `-1`, against it `+1`, so that
    /// `cochain(a) = a . walk` with `a . b = +1` when `(a, b)` is a positive frame.
    pub fn push_off_cochain(&self, walk: &[usize]) -> Vec<i64> {
        let mut cochain = vec![0i64; self.edge_count()];
        let len = walk.len();
        for i in 0..len {
            let incoming = walk[i];
            let outgoing = walk[(i + 1) % len];
            debug_assert_eq!(
                self.head(incoming),
                self.tail(outgoing),
                "walk is not closed"
            );
            let stop = incoming ^ 1;
            let mut x = self.rotation[outgoing];
            while x != stop {
                cochain[x / 2] += if x.is_multiple_of(2) { -1 } else { 1 };
                x = self.rotation[x];
            }
        }
        cochain
    }

    /// Tree-cotree generators: closed walks through vertex 0, one per edge
    /// outside a spanning tree and outside a spanning tree of the dual graph.
    pub fn generator_walks(&self) -> Vec<Vec<usize>> {
        let v_count = self.vertex_count();
        let e_count = self.edge_count();
        if e_count == 0 {
            return Vec::new();
        }
        // Spanning tree by BFS from vertex 0; parent_dart[v] arrives at v.
        let mut parent_dart = vec![usize::MAX; v_count];
        let mut depth = vec![usize::MAX; v_count];
        let mut in_tree = vec![false; e_count];
        depth[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for dart in self.rotation_from(self.first_dart_at(v)) {
                let w = self.head(dart);
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent_dart[w] = dart;
                    in_tree[dart / 2] = true;
                    queue.push_back(w);
                }
            }
        }
        // Dual spanning tree over edges not in the primal tree.
        let f_count = self.face_count();
        let mut face_seen = vec![false; f_count];
        let mut in_cotree = vec![false; e_count];
        let mut faces_at: Vec<Vec<usize>> = vec![Vec::new(); f_count];
        for e in (0..e_count).filter(|&e| !in_tree[e]) {
            faces_at[self.face_of_dart[2 * e]].push(e);
            faces_at[self.face_of_dart[2 * e + 1]].push(e);
        }
        face_seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(f) = queue.pop_front() {
            for &e in &faces_at[f] {
                let (f1, f2) = (self.face_of_dart[2 * e], self.face_of_dart[2 * e + 1]);
                let other = if f1 == f { f2 } else { f1 };
                if !face_seen[other] {
                    face_seen[other] = true;
                    in_cotree[e] = true;
                    queue.push_back(other);
                }
            }
        }
        let path_from_root = |v: usize| -> Vec<usize> {
            let mut darts = Vec::new();
            let mut x = v;
            while x != 0 {
                let d = parent_dart[x];
                darts.push(d);
                x = self.tail(d);
            }
            darts.reverse();
            darts
        };
        (0..e_count)
            .filter(|&e| !in_tree[e] && !in_cotree[e])
            .map(|e| {
                let dart = 2 * e;
                let mut walk = path_from_root(self.tail(dart));
                walk.push(dart);
                let back: Vec<usize> = path_from_root(self.head(dart))
                    .into_iter()
                    .rev()
                    .map(|d| d ^ 1)
                    .collect();
                walk.extend(back);
                walk
            })
            .collect()
    }

    fn first_dart_at(&self, v: usize) -> usize {
        // Edge (v, 0) leaves v forwards whenever a generator exists.
        2 * self.edge(v, 0)
    }

    /// Signed edge chain of a walk.
    pub fn walk_chain(&self, walk: &[usize]) -> Vec<i64> {
        let mut chain = vec![0i64; self.edge_count()];
        for &dart in walk {
            chain[dart / 2] += dart_sign(dart);
        }
        chain
    }
}

fn nonzero(chain: &[i64]) -> Vec<(usize, i64)> {
    chain
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(e, &c)| (e, c))
        .collect()
}

fn sparse_dot(entries: &[(usize, i64)], dense: &[i64]) -> i64 {
    entries.iter().fold(0i64, |acc, &(e, c)| {
        acc.checked_add(c.checked_mul(dense[e]).expect("intersection overflow"))
            .expect("intersection overflow")
    })
}

#[inline]
fn dart_sign(dart: usize) -> i64 {
    if dart.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `H1` of a closed connected surface with a chosen basis of 1-cycles and its
/// intersection matrix.
#[derive(Debug, Clone)]
pub struct H1Lattice {
    complex: SurfaceComplex,
    /// Basis cycles as edge chains.
    basis: Vec<Vec<i64>>,
    /// Nonzero entries of each basis chain.
    support: Vec<Vec<(usize, i64)>>,
    /// `cochains[l](z) = z . basis[l]` for every cycle `z`.
    cochains: Vec<Vec<i64>>,
    form: IntMatrix,
    /// `(form^T)^-1`, turning intersection numbers into coordinates.
    coordinate_map: IntMatrix,
}

/// Homology with intersection form from the ribbon structure.
pub fn h1_with_form(complex: &SurfaceComplex) -> Result<H1Lattice, HomologyError> {
    let walks = complex.generator_walks();
    let rank = walks.len();
    if rank != 2 * complex.genus() {
        return Err(HomologyError::RankMismatch {
            expected: 2 * complex.genus(),
            found: rank,
        });
    }
    if complex.edge_count() == 0 {
        return Ok(H1Lattice {
            complex: complex.clone(),
            basis: Vec::new(),
            support: Vec::new(),
            cochains: Vec::new(),
            form: IntMatrix::zeros(0, 0),
            coordinate_map: IntMatrix::zeros(0, 0),
        });
    }
    let basis: Vec<Vec<i64>> = walks.iter().map(|w| complex.walk_chain(w)).collect();
    let support: Vec<Vec<(usize, i64)>> = basis.iter().map(|c| nonzero(c)).collect();
    let cochains: Vec<Vec<i64>> = walks.iter().map(|w| complex.push_off_cochain(w)).collect();
    let mut form = IntMatrix::zeros(rank, rank);
    for k in 0..rank {
        for l in 0..rank {
            form[(k, l)] = sparse_dot(&support[k], &cochains[l]);
        }
    }
    if !form.is_skew() {
        return Err(HomologyError::Inconsistent(
            "intersection form is not skew".into(),
        ));
    }
    // An integral inverse exists exactly when the form is unimodular.
    let coordinate_map = inverse_unimodular_fast(&form.transpose())
        .ok_or_else(|| HomologyError::NotUnimodular(determinant(&form).to_string()))?;
    Ok(H1Lattice {
        complex: complex.clone(),
        basis,
        support,
        cochains,
        form,
        coordinate_map,
    })
}

impl H1Lattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn complex(&self) -> &SurfaceComplex {
        &self.complex
    }

    /// Intersection matrix `E[k][l] = basis_k . basis_l`.
    pub fn form(&self) -> &IntMatrix {
        &self.form
    }

    pub fn basis_chain(&self, k: usize) -> &[i64] {
        &self.basis[k]
    }

    /// Intersection number of a cycle with basis element `l`.
    pub fn intersect_with_basis(&self, cycle: &[i64], l: usize) -> i64 {
        dot(cycle, &self.cochains[l])
    }

    /// Coordinates of a 1-cycle in the chosen basis.
    pub fn coordinates(&self, cycle: &[i64]) -> Result<Vec<i64>, HomologyError> {
        if cycle.len() != self.complex.edge_count() {
            return Err(HomologyError::Inconsistent("chain length".into()));
        }
        if self.complex.chain_boundary(cycle).iter().any(|&c| c != 0) {
            return Err(HomologyError::NotACycle);
        }
        let entries = nonzero(cycle);
        let numbers: Vec<i64> = self
            .cochains
            .iter()
            .map(|cochain| sparse_dot(&entries, cochain))
            .collect();
        Ok(self.coordinate_map.mul_vec(&numbers))
    }

    /// Matrix of the map on `H1` induced by a chain map given on edges.
    pub fn induced_map(
        &self,
        target: &H1Lattice,
        chain_map: impl Fn(usize) -> Vec<(usize, i64)>,
    ) -> Result<IntMatrix, HomologyError> {
        let cached: Vec<Vec<(usize, i64)>> =
            (0..self.complex.edge_count()).map(&chain_map).collect();
        let mut columns = Vec::with_capacity(self.rank());
        for k in 0..self.rank() {
            let mut image = vec![0i64; target.complex.edge_count()];
            for &(e, c) in &self.support[k] {
                for &(f, w) in &cached[e] {
                    image[f] += c * w;
                }
            }
            columns.push(target.coordinates(&image)?);
        }
        Ok(IntMatrix::from_columns(target.rank(), &columns))
    }
}
