//! Integer normal forms and lattice operations on arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

type BigMatrix = Vec<Vec<BigInt>>;

/// `left * A * right = diag(diagonal)` with `left`, `right` unimodular and
/// `d_1 | d_2 | ... | d_rank`, all positive.
#[derive(Debug, Clone)]
pub struct Smith {
    pub left: BigMatrix,
    pub right: BigMatrix,
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
    rows: usize,
    cols: usize,
}

fn identity(n: usize) -> BigMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// `row_i -= q * row_k` on a matrix with any number of columns.
fn row_axpy(m: &mut BigMatrix, i: usize, k: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (src, dst) = if i < k {
        let (lo, hi) = m.split_at_mut(k);
        (&hi[0], &mut lo[i])
    } else {
        let (lo, hi) = m.split_at_mut(i);
        (&lo[k], &mut hi[0])
    };
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

/// `col_j -= q * col_k`.
fn col_axpy(m: &mut BigMatrix, j: usize, k: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        if !row[k].is_zero() {
            let delta = q * &row[k];
            row[j] -= delta;
        }
    }
}

fn swap_cols(m: &mut BigMatrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// Smith normal form with transforms.
pub fn smith(a: &IntMatrix) -> Smith {
    smith_big(a.to_big(), a.rows(), a.cols())
}

fn smith_big(mut a: BigMatrix, m: usize, n: usize) -> Smith {
    let mut left = identity(m);
    let mut right = identity(n);
    let mut t = 0;
    while t < m.min(n) {
        // Pivot: smallest nonzero entry of the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        left.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut right, t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..m {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    row_axpy(&mut a, i, t, &q);
                    row_axpy(&mut left, i, t, &q);
                    if !a[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    col_axpy(&mut a, j, t, &q);
                    col_axpy(&mut right, j, t, &q);
                    if !a[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                // A remainder is smaller than the pivot; move it into place.
                let mut best = (t, t);
                for i in t + 1..m {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..n {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    a.swap(t, best.0);
                    left.swap(t, best.0);
                } else if best.1 != t {
                    swap_cols(&mut a, t, best.1);
                    swap_cols(&mut right, t, best.1);
                }
                continue;
            }
            let offender = (t + 1..m).find(|&i| {
                (t + 1..n).any(|j| !a[i][j].is_zero() && !(&a[i][j] % &a[t][t]).is_zero())
            });
            match offender {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut a, t, i, &minus_one);
                    row_axpy(&mut left, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for v in a[t].iter_mut() {
                *v = -&*v;
            }
            for v in left[t].iter_mut() {
                *v = -&*v;
            }
        }
        t += 1;
    }
    let diagonal = (0..t).map(|i| a[i][i].clone()).collect();
    Smith {
        left,
        right,
        diagonal,
        rank: t,
        rows: m,
        cols: n,
    }
}

impl Smith {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }
}

/// Nonzero invariant factors.
pub fn elementary_divisors(a: &IntMatrix) -> Vec<BigInt> {
    smith(a).diagonal
}

pub fn rank(a: &IntMatrix) -> usize {
    smith(a).rank
}

/// Fraction-free (Bareiss) determinant.
pub fn determinant(a: &IntMatrix) -> BigInt {
    assert!(a.is_square(), "determinant of a non-square matrix");
    let n = a.rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.to_big();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// A basis of `{x : A x = 0}` as the columns of the result. The kernel of an
/// integer matrix is saturated, and so is this basis.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let s = smith(a);
    let n = a.cols();
    let cols: Vec<Vec<i64>> = (s.rank..n)
        .map(|j| {
            (0..n)
                .map(|i| i64::try_from(&s.right[i][j]).expect("kernel entry fits in i64"))
                .collect()
        })
        .collect();
    IntMatrix::from_columns(n, &cols)
}

/// Solves `K X = B` over the integers for `K` of full column rank.
/// `None` when some column of `B` is not in the lattice spanned by `K`.
pub fn solve(k: &IntMatrix, b: &IntMatrix) -> Option<IntMatrix> {
    assert_eq!(k.rows(), b.rows(), "solve shape");
    let s = smith(k);
    assert_eq!(s.rank, k.cols(), "solve needs full column rank");
    let r = s.rank;
    let big_b = b.to_big();
    let mut x = vec![vec![BigInt::zero(); b.cols()]; k.cols()];
    for col in 0..b.cols() {
        // y = left * b
        let y: Vec<BigInt> = (0..k.rows())
            .map(|i| {
                s.left[i]
                    .iter()
                    .zip(&big_b)
                    .filter(|(l, _)| !l.is_zero())
                    .map(|(l, row)| l * &row[col])
                    .sum()
            })
            .collect();
        if y[r..].iter().any(|v| !v.is_zero()) {
            return None;
        }
        let mut z = Vec::with_capacity(r);
        for i in 0..r {
            let (q, rem) = y[i].div_rem(&s.diagonal[i]);
            if !rem.is_zero() {
                return None;
            }
            z.push(q);
        }
        for (i, row) in x.iter_mut().enumerate() {
            row[col] = (0..r).map(|j| &s.right[i][j] * &z[j]).sum();
        }
    }
    IntMatrix::from_big(k.cols(), b.cols(), &x)
}

/// Inverse of a unimodular matrix; `None` if `|det| != 1`.
pub fn inverse_unimodular(a: &IntMatrix) -> Option<IntMatrix> {
    if !a.is_square() {
        return None;
    }
    let n = a.rows();
    let s = smith(a);
    if s.rank != n || s.diagonal.iter().any(|d| !d.is_one()) {
        return None;
    }
    // A = left^-1 right^-1, so A^-1 = right * left.
    let prod: BigMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| &s.right[i][k] * &s.left[k][j]).sum())
                .collect()
        })
        .collect();
    IntMatrix::from_big(n, n, &prod)
}

/// Inverse of a unimodular matrix by elimination modulo a 61-bit prime,
/// lifted to symmetric residues and confirmed by an exact product. Falls back
/// to [`inverse_unimodular`] when the lift is not the true inverse.
pub fn inverse_unimodular_fast(a: &IntMatrix) -> Option<IntMatrix> {
    if !a.is_square() {
        return None;
    }
    modular_inverse(a)
        .filter(|x| exact_product_is_identity(a, x))
        .or_else(|| inverse_unimodular(a))
}

const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    // Mersenne reduction: 2^61 = 1 (mod PRIME).
    let t = a as u128 * b as u128;
    let r = (t as u64 & PRIME) + (t >> 61) as u64;
    let r = (r & PRIME) + (r >> 61);
    if r >= PRIME {
        r - PRIME
    } else {
        r
    }
}

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

fn modular_inverse(a: &IntMatrix) -> Option<IntMatrix> {
    let n = a.rows();
    let to_mod = |v: i64| v.rem_euclid(PRIME as i64) as u64;
    // Augmented rows [A | I] reduced to [I | A^-1].
    let mut rows: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut row: Vec<u64> = a.row(i).iter().map(|&v| to_mod(v)).collect();
            row.extend((0..n).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| rows[r][col] != 0)?;
        rows.swap(col, pivot);
        let inv = pow_mod(rows[col][col], PRIME - 2);
        for v in rows[col].iter_mut() {
            *v = mul_mod(*v, inv);
        }
        let pivot_row = rows[col].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            let f = row[col];
            if r == col || f == 0 {
                continue;
            }
            for (v, &p) in row.iter_mut().zip(&pivot_row).skip(col) {
                if p != 0 {
                    let d = mul_mod(f, p);
                    *v = if *v >= d { *v - d } else { *v + PRIME - d };
                }
            }
        }
    }
    let half = PRIME / 2;
    let mut out = IntMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for j in 0..n {
            let v = row[n + j];
            out[(i, j)] = if v > half {
                v as i64 - PRIME as i64
            } else {
                v as i64
            };
        }
    }
    Some(out)
}

fn exact_product_is_identity(a: &IntMatrix, x: &IntMatrix) -> bool {
    let n = a.rows();
    for i in 0..n {
        for j in 0..n {
            let mut acc: i128 = 0;
            for k in 0..n {
                let (p, q) = (a[(i, k)], x[(k, j)]);
                if p != 0 && q != 0 {
                    acc = match acc.checked_add(p as i128 * q as i128) {
                        Some(v) => v,
                        None => return false,
                    };
                }
            }
            if acc != i128::from(i == j) {
                return false;
            }
        }
    }
    true
}
