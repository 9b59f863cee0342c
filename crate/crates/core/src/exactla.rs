//! Dense exact linear algebra over prime fields.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("NotPrime: {0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("FieldMismatch: F_{0} vs F_{1}")]
    FieldMismatch(u32, u32),
    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),
    #[error("NoSolution")]
    NoSolution,
    #[error("AmbientMismatch: ambient dimensions {0} and {1}")]
    AmbientMismatch(usize, usize),
    #[error("NotInvertible")]
    NotInvertible,
}

/// The prime field F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec {
    p: u32,
}

impl FieldSpec {
    pub fn new(p: u64) -> Result<Self, LinalgError> {
        if !(2..(1u64 << 31)).contains(&p) {
            return Err(LinalgError::NotPrime(p));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p.is_multiple_of(d) {
                return Err(LinalgError::NotPrime(p));
            }
            d += 1;
        }
        Ok(FieldSpec { p: p as u32 })
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1u32 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

/// A dense matrix over F_p, row-major.
///
/// Arithmetic helpers panic on shape or field mismatch; those are
/// programming errors, not data errors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Reduced row-echelon form with its pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl Matrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Build from integer rows, reducing mod p. Every row must have `cols` entries.
    pub fn from_rows(field: FieldSpec, rows: usize, cols: usize, entries: &[Vec<i64>]) -> Result<Self, LinalgError> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::ShapeMismatch(format!("expected {rows}x{cols} entries")));
        }
        let data = entries.iter().flatten().map(|&x| field.reduce(x)).collect();
        Ok(Matrix { field, rows, cols, data })
    }

    /// Shorthand for small literal matrices; the shape is taken from the rows.
    pub fn from_slice_rows(field: FieldSpec, entries: &[&[i64]]) -> Self {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        let owned: Vec<Vec<i64>> = entries.iter().map(|r| r.to_vec()).collect();
        Self::from_rows(field, rows, cols, &owned).expect("ragged literal matrix")
    }

    pub fn from_fn(field: FieldSpec, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c) % field.p);
            }
        }
        Matrix { field, rows, cols, data }
    }

    /// Column vector.
    pub fn column(field: FieldSpec, entries: &[u32]) -> Self {
        Self::from_fn(field, entries.len(), 1, |r, _| entries[r])
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.p;
    }

    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.field, self.rows)
    }

    fn same_field(&self, other: &Matrix) {
        assert_eq!(self.field, other.field, "field mismatch");
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.same_field(other);
        assert_eq!(self.cols, other.rows, "product of {:?} and {:?}", self.shape(), other.shape());
        let p = self.field.p as u64;
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let idx = r * other.cols + c;
                    out.data[idx] = ((out.data[idx] as u64 + a * other.data[k * other.cols + c] as u64) % p) as u32;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.same_field(other);
        assert_eq!(self.shape(), other.shape(), "sum of different shapes");
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Matrix {
        self.scale(self.field.p - 1)
    }

    pub fn scale(&self, s: u32) -> Matrix {
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, s % f.p)).collect(),
        }
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &Matrix) -> Matrix {
        self.same_field(other);
        assert_eq!(self.rows, other.rows, "hcat row mismatch");
        Matrix::from_fn(self.field, self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.get(r, c)
            } else {
                other.get(r, c - self.cols)
            }
        })
    }

    /// `self` stacked above `other`.
    pub fn vcat(&self, other: &Matrix) -> Matrix {
        self.same_field(other);
        assert_eq!(self.cols, other.cols, "vcat column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Block-diagonal matrix `diag(self, other)`.
    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        self.same_field(other);
        Matrix::from_fn(self.field, self.rows + other.rows, self.cols + other.cols, |r, c| {
            if r < self.rows && c < self.cols {
                self.get(r, c)
            } else if r >= self.rows && c >= self.cols {
                other.get(r - self.rows, c - self.cols)
            } else {
                0
            }
        })
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, rows.len(), self.cols, |r, c| self.get(rows[r], c))
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, self.rows, cols.len(), |r, c| self.get(r, cols[c]))
    }

    /// Rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        Matrix::from_fn(self.field, r1 - r0, c1 - c0, |r, c| self.get(r0 + r, c0 + c))
    }

    pub fn rref(&self) -> Rref {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for c in 0..m.cols {
                    m.data.swap(pr * m.cols + c, row * m.cols + c);
                }
            }
            let inv = f.inv(m.get(row, col));
            for c in col..m.cols {
                let v = f.mul(m.get(row, c), inv);
                m.data[row * m.cols + c] = v;
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                    m.data[r * m.cols + c] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref {
            reduced: m,
            rank: pivots.len(),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of the right null space, one column per free variable in
    /// increasing index order, that variable set to 1 and the others to 0.
    pub fn kernel_basis(&self) -> Matrix {
        let f = self.field;
        let Rref { reduced, pivots, .. } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(f, self.cols, free.len());
        for (idx, &fc) in free.iter().enumerate() {
            k.set(fc, idx, 1);
            for (r, &pc) in pivots.iter().enumerate() {
                k.set(pc, idx, f.neg(reduced.get(r, fc)));
            }
        }
        k
    }

    /// Particular solution of `self * X = b` with all free variables zero.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix, LinalgError> {
        self.same_field(b);
        if self.rows != b.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "solve: A has {} rows, B has {}",
                self.rows, b.rows
            )));
        }
        let aug = self.hcat(b).rref();
        if aug.pivots.iter().any(|&c| c >= self.cols) {
            return Err(LinalgError::NoSolution);
        }
        let mut x = Matrix::zeros(self.field, self.cols, b.cols);
        for (r, &pc) in aug.pivots.iter().enumerate() {
            for c in 0..b.cols {
                x.set(pc, c, aug.reduced.get(r, self.cols + c));
            }
        }
        Ok(x)
    }

    /// Two-sided inverse of a square matrix.
    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotInvertible);
        }
        let x = self.solve(&Matrix::identity(self.field, self.rows)).map_err(|_| LinalgError::NotInvertible)?;
        if self.rank() != self.rows {
            return Err(LinalgError::NotInvertible);
        }
        Ok(x)
    }

    /// Canonical basis of the column space: the transposed nonzero rows of
    /// the RREF of the transpose. Equal subspaces give equal matrices.
    pub fn column_basis(&self) -> Matrix {
        let r = self.transpose().rref();
        r.reduced.block(0, r.rank, 0, self.rows).transpose()
    }

    /// Rows at which the canonical column basis has its unit entries.
    pub fn column_basis_pivots(&self) -> Vec<usize> {
        self.transpose().rref().pivots
    }

    pub fn has_full_column_rank(&self) -> bool {
        self.rank() == self.cols
    }

    pub fn has_full_row_rank(&self) -> bool {
        self.rank() == self.rows
    }
}

/// Canonical bases of `U ∩ V` and `U + V` for column-spanned subspaces.
pub fn subspace_meet_join(u: &Matrix, v: &Matrix) -> Result<(Matrix, Matrix), LinalgError> {
    if u.rows() != v.rows() {
        return Err(LinalgError::AmbientMismatch(u.rows(), v.rows()));
    }
    if u.field() != v.field() {
        return Err(LinalgError::FieldMismatch(u.field().modulus(), v.field().modulus()));
    }
    let join = u.hcat(v).column_basis();
    let k = u.hcat(&v.neg()).kernel_basis();
    let meet = u.mul(&k.block(0, u.cols(), 0, k.cols())).column_basis();
    Ok((meet, join))
}

/// True when every column of `u` lies in the column span of `v`.
pub fn column_span_contains(v: &Matrix, u: &Matrix) -> bool {
    v.solve(u).is_ok()
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}
