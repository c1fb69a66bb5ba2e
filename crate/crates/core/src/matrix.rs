//! Square matrices over a [`Field`], entries stored as field codes, row-major.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::Field;

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matrix {
    n: usize,
    entries: Vec<u32>,
}

/// `out = a · b` for row-major `n × n` slices.
#[inline]
pub fn mul_into(field: &Field, n: usize, a: &[u32], b: &[u32], out: &mut [u32]) {
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0;
            for k in 0..n {
                acc = field.add(acc, field.mul(a[i * n + k], b[k * n + j]));
            }
            out[i * n + j] = acc;
        }
    }
}

impl Matrix {
    pub fn new(n: usize, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: entries.len() });
        }
        Ok(Matrix { n, entries })
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
            entries.extend_from_slice(r);
        }
        Ok(Matrix { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1)
    }

    pub fn scalar(n: usize, c: u32) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = c;
        }
        Matrix { n, entries }
    }

    pub fn diag(d: &[u32]) -> Self {
        let n = d.len();
        let mut entries = vec![0; n * n];
        for (i, &c) in d.iter().enumerate() {
            entries[i * n + i] = c;
        }
        Matrix { n, entries }
    }

    /// Block-diagonal assembly.
    pub fn block_diag(blocks: &[Matrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.n).sum();
        let mut entries = vec![0; n * n];
        let mut off = 0;
        for b in blocks {
            for i in 0..b.n {
                for j in 0..b.n {
                    entries[(off + i) * n + off + j] = b.get(i, j);
                }
            }
            off += b.n;
        }
        Matrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.entries[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, other: &Matrix, field: &Field) -> Matrix {
        assert_eq!(self.n, other.n, "matrix dimensions differ");
        let mut out = vec![0; self.n * self.n];
        mul_into(field, self.n, &self.entries, &other.entries, &mut out);
        Matrix { n: self.n, entries: out }
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j];
            }
        }
        Matrix { n, entries }
    }

    /// Entrywise map, e.g. a field automorphism.
    pub fn map(&self, f: impl Fn(u32) -> u32) -> Matrix {
        Matrix { n: self.n, entries: self.entries.iter().map(|&x| f(x)).collect() }
    }

    pub fn trace(&self, field: &Field) -> u32 {
        (0..self.n).fold(0, |acc, i| field.add(acc, self.get(i, i)))
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar() == Some(1)
    }

    /// `Some(c)` when the matrix is `c·I`.
    pub fn is_scalar(&self) -> Option<u32> {
        let c = if self.n == 0 { 1 } else { self.get(0, 0) };
        for i in 0..self.n {
            for j in 0..self.n {
                let want = if i == j { c } else { 0 };
                if self.get(i, j) != want {
                    return None;
                }
            }
        }
        Some(c)
    }

    /// Row reduction returning `(determinant, inverse if invertible)`.
    fn eliminate(&self, field: &Field) -> (u32, Option<Matrix>) {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut inv = Matrix::identity(n).entries;
        let mut det = 1u32;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return (0, None);
            };
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                    inv.swap(piv * n + j, col * n + j);
                }
                det = field.neg(det);
            }
            let pv = a[col * n + col];
            det = field.mul(det, pv);
            let pinv = field.inv(pv).expect("pivot is nonzero");
            for j in 0..n {
                a[col * n + j] = field.mul(a[col * n + j], pinv);
                inv[col * n + j] = field.mul(inv[col * n + j], pinv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col];
                if factor == 0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] = field.sub(a[r * n + j], field.mul(factor, a[col * n + j]));
                    inv[r * n + j] = field.sub(inv[r * n + j], field.mul(factor, inv[col * n + j]));
                }
            }
        }
        (det, Some(Matrix { n, entries: inv }))
    }

    pub fn det(&self, field: &Field) -> u32 {
        self.eliminate(field).0
    }

    pub fn inverse(&self, field: &Field) -> Option<Matrix> {
        self.eliminate(field).1
    }

    /// `self^e`; negative exponents invert first.
    pub fn pow(&self, e: i64, field: &Field) -> Result<Matrix> {
        let mut base = if e < 0 {
            self.inverse(field).ok_or(Error::NotInvertible(0))?
        } else {
            self.clone()
        };
        let mut k = e.unsigned_abs();
        let mut acc = Matrix::identity(self.n);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, field);
            }
            base = base.mul(&base, field);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Multiplicative order by successive multiplication, `None` past `cap`.
    pub fn order(&self, field: &Field, cap: u64) -> Option<u64> {
        let mut x = self.clone();
        let mut k = 1;
        while !x.is_identity() {
            if k >= cap {
                return None;
            }
            x = x.mul(self, field);
            k += 1;
        }
        Some(k)
    }
}
