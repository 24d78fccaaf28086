//! Dense exact linear algebra over cyclotomic numbers: products, Gram
//! matrices, and incremental row reduction for kernels, solves, and
//! inverses. Entries may carry mixed conductors; arithmetic embeds into the
//! least common one as it goes.

use crate::error::{Error, Result};
use crate::exactnum::{CycNumber, Rat};
use num::{BigInt, Integer, One, Signed, Zero};

#[derive(Clone, Debug)]
pub struct CycMatrix {
    rows: usize,
    cols: usize,
    data: Vec<CycNumber>,
}

impl CycMatrix {
    pub fn zeros(rows: usize, cols: usize, m: u32) -> CycMatrix {
        CycMatrix { rows, cols, data: vec![CycNumber::zero(m); rows * cols] }
    }

    pub fn identity(n: usize, m: u32) -> CycMatrix {
        let mut a = CycMatrix::zeros(n, n, m);
        for i in 0..n {
            a.set(i, i, CycNumber::one(m));
        }
        a
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> CycNumber,
    ) -> CycMatrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CycMatrix { rows, cols, data }
    }

    /// Builds the matrix whose j-th column is `cols[j]`.
    pub fn from_columns(columns: &[Vec<CycNumber>]) -> Result<CycMatrix> {
        let rows = columns
            .first()
            .map(|c| c.len())
            .ok_or_else(|| Error::invalid("matrix needs at least one column"))?;
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::invalid("columns must share a length"));
        }
        Ok(CycMatrix::from_fn(rows, columns.len(), |i, j| columns[j][i].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &CycNumber {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycNumber) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<CycNumber> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<CycNumber> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    /// Matrix product, skipping zero entries of `self`; useful when the left
    /// factor is sparse, as basis-vector columns are.
    pub fn mul(&self, other: &CycMatrix) -> CycMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = CycMatrix::zeros(self.rows, other.cols, 1);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let acc = out.at(i, j).add(&a.mul(b));
                    out.set(i, j, acc);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[CycNumber]) -> Vec<CycNumber> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = CycNumber::zero(1);
                for k in 0..self.cols {
                    let a = self.at(i, k);
                    if !a.is_zero() && !v[k].is_zero() {
                        acc = acc.add(&a.mul(&v[k]));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn conj_transpose(&self) -> CycMatrix {
        CycMatrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    /// `self* · self`.
    pub fn gram(&self) -> CycMatrix {
        self.conj_transpose().mul(self)
    }

    pub fn add(&self, other: &CycMatrix) -> CycMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CycMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j).add(other.at(i, j)))
    }

    pub fn sub(&self, other: &CycMatrix) -> CycMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CycMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j).sub(other.at(i, j)))
    }

    pub fn scale(&self, c: &CycNumber) -> CycMatrix {
        CycMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j).mul(c))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.at(i, j) == &CycNumber::one(1)
                    } else {
                        self.at(i, j).is_zero()
                    }
                })
            })
    }

    /// Every entry is an algebraic integer.
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|v| v.is_integral())
    }

    pub fn rank(&self) -> usize {
        let mut red = RowReducer::new(self.cols);
        for i in 0..self.rows {
            red.push(self.row(i));
        }
        red.rank()
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<CycNumber>> {
        let mut red = RowReducer::new(self.cols);
        for i in 0..self.rows {
            red.push(self.row(i));
        }
        red.kernel_basis()
    }

    /// Unique solution of `self · x = rhs` for a square nonsingular matrix.
    pub fn solve(&self, rhs: &[CycNumber]) -> Result<Vec<CycNumber>> {
        if self.rows != self.cols || rhs.len() != self.rows {
            return Err(Error::invalid("solve requires a square system"));
        }
        let mut red = RowReducer::new(self.cols + 1);
        for i in 0..self.rows {
            let mut row = self.row(i);
            row.push(rhs[i].clone());
            red.push(row);
        }
        if red.rows.iter().any(|(p, _)| *p == self.cols) {
            return Err(Error::invalid("inconsistent linear system"));
        }
        if red.rank() < self.cols {
            return Err(Error::invalid("singular matrix"));
        }
        let mut x = vec![CycNumber::zero(1); self.cols];
        for (p, row) in &red.rows {
            x[*p] = row[self.cols].clone();
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CycMatrix> {
        if self.rows != self.cols {
            return Err(Error::invalid("inverse requires a square matrix"));
        }
        let n = self.rows;
        let mut red = RowReducer::new(2 * n);
        for i in 0..n {
            let mut row = self.row(i);
            row.extend((0..n).map(|j| {
                if i == j {
                    CycNumber::one(1)
                } else {
                    CycNumber::zero(1)
                }
            }));
            red.push(row);
        }
        if red.rank() < n || red.rows.iter().any(|(p, _)| *p >= n) {
            return Err(Error::invalid("singular matrix"));
        }
        let mut inv = CycMatrix::zeros(n, n, 1);
        for (p, row) in &red.rows {
            for j in 0..n {
                inv.set(*p, j, row[n + j].clone());
            }
        }
        Ok(inv)
    }
}

impl PartialEq for CycMatrix {
    fn eq(&self, other: &Self) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols) && self.data == other.data
    }
}

/// Hermitian inner product `Σ uᵢ · conj(vᵢ)`.
pub fn inner(u: &[CycNumber], v: &[CycNumber]) -> CycNumber {
    assert_eq!(u.len(), v.len(), "dimension mismatch");
    let mut acc = CycNumber::zero(1);
    for (a, b) in u.iter().zip(v) {
        if !a.is_zero() && !b.is_zero() {
            acc = acc.add(&a.mul(&b.conj()));
        }
    }
    acc
}

/// Incremental reduced row echelon accumulator over the cyclotomic field.
/// Rows are kept normalized with leading entry 1 and pivot columns cleared
/// everywhere else, so the stored rows form a canonical basis of the row
/// space seen so far.
pub struct RowReducer {
    cols: usize,
    rows: Vec<(usize, Vec<CycNumber>)>,
}

impl RowReducer {
    pub fn new(cols: usize) -> RowReducer {
        RowReducer { cols, rows: Vec::new() }
    }

    /// Feeds one row; returns whether the rank grew.
    pub fn push(&mut self, mut row: Vec<CycNumber>) -> bool {
        assert_eq!(row.len(), self.cols, "row width mismatch");
        for (p, r) in &self.rows {
            let c = row[*p].clone();
            if c.is_zero() {
                continue;
            }
            // Reduce eagerly: unreduced representatives mod x^M - 1 grow
            // multiplicatively across elimination levels.
            for (j, rj) in r.iter().enumerate() {
                if !rj.is_zero() {
                    row[j] = row[j].sub(&c.mul(rj)).canonical_reduce();
                }
            }
        }
        let pivot = match row.iter().position(|v| !v.is_zero()) {
            Some(p) => p,
            None => return false,
        };
        let inv = row[pivot].inv().expect("nonzero field element");
        for v in row.iter_mut() {
            if !v.is_zero() {
                *v = v.mul(&inv).canonical_reduce();
            }
        }
        row[pivot] = CycNumber::one(1);
        for (_, r) in self.rows.iter_mut() {
            let c = r[pivot].clone();
            if c.is_zero() {
                continue;
            }
            for (j, vj) in row.iter().enumerate() {
                if !vj.is_zero() {
                    r[j] = r[j].sub(&c.mul(vj)).canonical_reduce();
                }
            }
        }
        let at = self.rows.partition_point(|(p, _)| *p < pivot);
        self.rows.insert(at, (pivot, row));
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    /// Kernel basis of the accumulated rows, one vector per free column, in
    /// column order. Canonical given the column order.
    pub fn kernel_basis(&self) -> Vec<Vec<CycNumber>> {
        let pivots: Vec<usize> = self.pivots();
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if pivots.binary_search(&f).is_ok() {
                continue;
            }
            let mut v = vec![CycNumber::zero(1); self.cols];
            v[f] = CycNumber::one(1);
            for (p, r) in &self.rows {
                v[*p] = r[f].neg();
            }
            basis.push(v);
        }
        basis
    }
}

/// Clears denominators of a rational vector: returns the primitive integer
/// vector with positive leading entry spanning the same line, or `None` if
/// some entry is irrational.
pub fn integerize(v: &[CycNumber]) -> Option<Vec<BigInt>> {
    let rats: Option<Vec<Rat>> = v.iter().map(|c| c.to_rat()).collect();
    let rats = rats?;
    let mut denom = BigInt::one();
    for r in &rats {
        denom = denom.lcm(r.denom());
    }
    let mut ints: Vec<BigInt> = rats.iter().map(|r| (r * &denom).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if !g.is_zero() {
        for x in ints.iter_mut() {
            *x = &*x / &g;
        }
    }
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in ints.iter_mut() {
                *x = -&*x;
            }
        }
    }
    Some(ints)
}
