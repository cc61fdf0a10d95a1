use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

/// Dense integer matrix, row-major. Arithmetic is overflow-checked and panics
/// on overflow; normal forms run on big integers in [`super::lattice`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1)
    }

    pub fn scalar(n: usize, k: i64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = k;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Builds a `rows x columns.len()` matrix from column vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other[(k, j)];
                    if b != 0 {
                        let cell = &mut out.data[i * other.cols + j];
                        *cell = checked(cell.checked_add(checked(a.checked_mul(b))));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        self.zip_with(other, |a, b| checked(a.checked_add(b)))
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        self.zip_with(other, |a, b| checked(a.checked_sub(b)))
    }

    pub fn scale(&self, k: i64) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|&a| checked(a.checked_mul(k)))
                .collect(),
        }
    }

    /// Exact division of every entry, or `None` if some entry is not divisible.
    pub fn divide_exact(&self, k: i64) -> Option<IntMatrix> {
        if k == 0 || self.data.iter().any(|a| a % k != 0) {
            return None;
        }
        Some(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a / k).collect(),
        })
    }

    pub fn neg(&self) -> IntMatrix {
        self.scale(-1)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&a| a == 0)
    }

    /// True when the matrix is `k` times the identity.
    pub fn is_scalar(&self, k: i64) -> bool {
        self.is_square() && *self == Self::scalar(self.rows, k)
    }

    pub fn is_skew(&self) -> bool {
        self.is_square() && self.transpose() == self.neg()
    }

    pub fn entries(&self) -> &[i64] {
        &self.data
    }

    pub fn to_big(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&a| BigInt::from(a)).collect())
            .collect()
    }

    /// Converts back from big integers; `None` if an entry exceeds `i64`.
    pub fn from_big(rows: usize, cols: usize, big: &[Vec<BigInt>]) -> Option<IntMatrix> {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = big[i][j].to_i64()?;
            }
        }
        Some(m)
    }

    fn zip_with(&self, other: &IntMatrix, f: impl Fn(i64, i64) -> i64) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape");
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).fold(0i64, |acc, (&x, &y)| {
        if x == 0 || y == 0 {
            acc
        } else {
            checked(acc.checked_add(checked(x.checked_mul(y))))
        }
    })
}

#[inline]
fn checked(v: Option<i64>) -> i64 {
    v.expect("integer overflow in exact matrix arithmetic")
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;

    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let a = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]);
        let b = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(a.mul(&b), IntMatrix::from_rows(&[vec![2, 1], vec![4, 3]]));
        assert_eq!(a.transpose().row(0), &[1, 3]);
        assert!(IntMatrix::scalar(3, 4).is_scalar(4));
        assert!(IntMatrix::from_rows(&[vec![0, 1], vec![-1, 0]]).is_skew());
        assert_eq!(a.divide_exact(2), None);
        assert_eq!(a.scale(2).divide_exact(2), Some(a.clone()));
        assert_eq!(serde_json::to_string(&a).unwrap(), "[[1,2],[3,4]]");
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn overflow_is_loud() {
        let a = IntMatrix::from_rows(&[vec![i64::MAX]]);
        let _ = a.mul(&IntMatrix::from_rows(&[vec![2]]));
    }
}
