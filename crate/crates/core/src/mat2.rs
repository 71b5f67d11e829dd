//! Bit-packed square matrices over GF(2), up to 64x64.
//!
//! Row `r` is one machine word; bit `c` of that word is entry `(r, c)`.
//! Matrices act on column vectors packed the same way: `(M v)_r` is the
//! parity of `row_r & v`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::poly2::PolyF2;

pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatF2 {
    dim: usize,
    rows: Vec<u64>,
}

fn dim_mask(dim: usize) -> u64 {
    if dim == 64 {
        u64::MAX
    } else {
        (1u64 << dim) - 1
    }
}

impl MatF2 {
    /// Builds a `dim x dim` matrix from packed rows.
    pub fn from_rows(dim: usize, rows: Vec<u64>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::TooLarge(format!(
                "matrix dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        if rows.len() != dim {
            return Err(Error::InvalidParameter(format!(
                "expected {dim} rows, got {}",
                rows.len()
            )));
        }
        if rows.iter().any(|&r| r & !dim_mask(dim) != 0) {
            return Err(Error::InvalidParameter(
                "row has bits beyond the matrix dimension".into(),
            ));
        }
        Ok(Self { dim, rows })
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1 && dim <= MAX_DIM, "dimension {dim} out of range");
        Self {
            dim,
            rows: (0..dim).map(|r| 1u64 << r).collect(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1 && dim <= MAX_DIM, "dimension {dim} out of range");
        Self {
            dim,
            rows: vec![0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn entry(&self, r: usize, c: usize) -> bool {
        (self.rows[r] >> c) & 1 == 1
    }

    /// Matrix-vector product over GF(2). Panics if `v` has bits beyond the
    /// dimension.
    pub fn apply(&self, v: u64) -> u64 {
        assert!(
            v & !dim_mask(self.dim) == 0,
            "vector has bits beyond dimension {}",
            self.dim
        );
        let mut out = 0u64;
        for (r, &row) in self.rows.iter().enumerate() {
            out |= (((row & v).count_ones() & 1) as u64) << r;
        }
        out
    }

    /// `transpose(self) * v`, computed as the xor of the rows selected by the
    /// bits of `v`.
    pub fn apply_transpose(&self, v: u64) -> u64 {
        assert!(
            v & !dim_mask(self.dim) == 0,
            "vector has bits beyond dimension {}",
            self.dim
        );
        let mut out = 0u64;
        let mut v = v;
        while v != 0 {
            let c = v.trailing_zeros() as usize;
            out ^= self.rows[c];
            v &= v - 1;
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![0u64; self.dim];
        for r in 0..self.dim {
            for c in 0..self.dim {
                if self.entry(r, c) {
                    rows[c] |= 1 << r;
                }
            }
        }
        Self {
            dim: self.dim,
            rows,
        }
    }

    /// Matrix product. Panics on dimension mismatch.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let rows = self
            .rows
            .iter()
            .map(|&row| {
                let mut acc = 0u64;
                let mut bits = row;
                while bits != 0 {
                    let k = bits.trailing_zeros() as usize;
                    acc ^= other.rows[k];
                    bits &= bits - 1;
                }
                acc
            })
            .collect();
        Self {
            dim: self.dim,
            rows,
        }
    }

    /// Determinant over GF(2).
    pub fn det(&self) -> bool {
        let mut rows = self.rows.clone();
        for col in 0..self.dim {
            let mask = 1u64 << col;
            let Some(pivot) = (col..self.dim).find(|&r| rows[r] & mask != 0) else {
                return false;
            };
            rows.swap(col, pivot);
            let prow = rows[col];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != col && *row & mask != 0 {
                    *row ^= prow;
                }
            }
        }
        true
    }

    /// Inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Option<Self> {
        let mut mat = self.rows.clone();
        let mut inv: Vec<u64> = (0..self.dim).map(|r| 1u64 << r).collect();
        for col in 0..self.dim {
            let mask = 1u64 << col;
            let pivot = (col..self.dim).find(|&r| mat[r] & mask != 0)?;
            mat.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..self.dim {
                if r != col && mat[r] & mask != 0 {
                    mat[r] ^= mat[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Some(Self {
            dim: self.dim,
            rows: inv,
        })
    }

    /// `P * self * P^-1`. Errors if `P` is singular.
    pub fn conjugate(&self, p: &MatF2) -> Result<Self> {
        assert_eq!(self.dim, p.dim, "dimension mismatch");
        let p_inv = p.inverse().ok_or(Error::Singular)?;
        Ok(p.matmul(self).matmul(&p_inv))
    }

    /// Companion matrix of a monic polynomial: identity superdiagonal and the
    /// coefficients along the bottom row, so its characteristic polynomial is
    /// `f`.
    pub fn companion(f: &PolyF2) -> Result<Self> {
        let m = match f.finite_degree() {
            Some(m) if m >= 1 => m,
            _ => return Err(Error::ConstantPolynomial),
        };
        if m > MAX_DIM {
            return Err(Error::TooLarge(format!(
                "companion matrix of degree {m} exceeds {MAX_DIM}"
            )));
        }
        let mut rows = vec![0u64; m];
        for (r, row) in rows.iter_mut().enumerate().take(m - 1) {
            *row = 1u64 << (r + 1);
        }
        for c in 0..m {
            if f.bit(c) {
                rows[m - 1] |= 1 << c;
            }
        }
        Ok(Self { dim: m, rows })
    }

    /// Characteristic polynomial `det(xI - M)`, computed by Bareiss
    /// fraction-free elimination over GF(2)[x]. Exact at any size this type
    /// supports; intended as a small-size oracle.
    pub fn charpoly(&self) -> PolyF2 {
        let d = self.dim;
        let mut m: Vec<Vec<PolyF2>> = (0..d)
            .map(|r| {
                (0..d)
                    .map(|c| {
                        let mut e = if self.entry(r, c) {
                            PolyF2::one()
                        } else {
                            PolyF2::zero()
                        };
                        if r == c {
                            e.add_assign(&PolyF2::x());
                        }
                        e
                    })
                    .collect()
            })
            .collect();
        let mut prev = PolyF2::one();
        for k in 0..d {
            if m[k][k].is_zero() {
                match (k + 1..d).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => m.swap(k, r),
                    None => return PolyF2::zero(),
                }
            }
            if k + 1 == d {
                break;
            }
            let row_k: Vec<PolyF2> = m[k].clone();
            let pivot = row_k[k].clone();
            for i in k + 1..d {
                let lead = m[i][k].clone();
                for j in k + 1..d {
                    let mut t = m[i][j].mul(&pivot);
                    if !lead.is_zero() && !row_k[j].is_zero() {
                        t.add_assign(&lead.mul(&row_k[j]));
                    }
                    let (q, r) = t.divrem(&prev).expect("prev pivot nonzero");
                    debug_assert!(r.is_zero(), "Bareiss division must be exact");
                    m[i][j] = q;
                }
                m[i][k] = PolyF2::zero();
            }
            prev = pivot;
        }
        m[d - 1][d - 1].clone()
    }

    /// Uniformly random matrix.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        assert!(dim >= 1 && dim <= MAX_DIM, "dimension {dim} out of range");
        let mask = dim_mask(dim);
        Self {
            dim,
            rows: (0..dim).map(|_| rng.gen::<u64>() & mask).collect(),
        }
    }

    /// Uniformly random invertible matrix, by rejection on the determinant.
    pub fn random_invertible<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        loop {
            let m = Self::random(dim, rng);
            if m.det() {
                return m;
            }
        }
    }
}

/// The `nm x nm` transition matrix of a TSR step: identity blocks on the
/// superdiagonal and `(a_0 T, a_1 T, ..., a_(n-1) T)` along the bottom block
/// row. Bit `i*m + r` of a flattened state is bit `r` of word `i`.
pub fn block_tsr_matrix(t: &MatF2, taps: &PolyF2, n: usize) -> Result<MatF2> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let m = t.dim();
    let dim = m
        .checked_mul(n)
        .filter(|&d| d <= MAX_DIM)
        .ok_or_else(|| Error::TooLarge(format!("block matrix needs n*m <= {MAX_DIM}")))?;
    if taps.bits() > n {
        return Err(Error::InvalidParameter(format!(
            "tap vector has bits beyond n = {n}"
        )));
    }
    let mut rows = vec![0u64; dim];
    for i in 0..n - 1 {
        for r in 0..m {
            rows[i * m + r] = 1u64 << ((i + 1) * m + r);
        }
    }
    for r in 0..m {
        let mut word = 0u64;
        for j in 0..n {
            if taps.bit(j) {
                word |= t.rows[r] << (j * m);
            }
        }
        rows[(n - 1) * m + r] = word;
    }
    Ok(MatF2 { dim, rows })
}
