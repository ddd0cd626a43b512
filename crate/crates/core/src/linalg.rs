//! Dense exact linear algebra over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest matrix accepted by [`principal_minor_scan`].
pub const MAX_MINOR_SCAN_DIM: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from integer rows; panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        RatMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect())
                .collect(),
        )
        .expect("rectangular rows")
    }

    /// The matrix whose columns are `vectors`, each of length `n`.
    pub fn from_columns(n: usize, vectors: &[Vec<Scalar>]) -> Result<Self> {
        let mut m = RatMatrix::zeros(n, vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            if v.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has length {}, expected {n}",
                    v.len()
                )));
            }
            for (i, x) in v.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
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

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn sub(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix shapes differ".into()));
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Rows `rows` and columns `cols` (in the given orders).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> RatMatrix {
        let mut m = RatMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Appends a zero column on the right.
    pub fn with_zero_column(&self) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Appends a zero row at the bottom.
    pub fn with_zero_row(&self) -> RatMatrix {
        let mut data = self.data.clone();
        data.extend(std::iter::repeat_n(Scalar::zero(), self.cols));
        RatMatrix {
            rows: self.rows + 1,
            cols: self.cols,
            data,
        }
    }

    /// Entries rendered as rational strings, row by row.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(Scalar::to_string).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatMatrix{:?}", self.to_strings())
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub rank: usize,
    pub form: RatMatrix,
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination; the pivot in each column is the first nonzero
/// entry at or below the current row.
pub fn rank_and_rref(m: &RatMatrix) -> Rref {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&i| !a[(i, col)].is_zero()) else {
            continue;
        };
        if p != row {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, row * a.cols + j);
            }
        }
        let inv = a[(row, col)].recip().expect("nonzero pivot");
        for j in col..a.cols {
            let v = &a[(row, j)] * &inv;
            a[(row, j)] = v;
        }
        for i in 0..a.rows {
            if i == row || a[(i, col)].is_zero() {
                continue;
            }
            let factor = a[(i, col)].clone();
            for j in col..a.cols {
                if a[(row, j)].is_zero() {
                    continue;
                }
                let v = &a[(i, j)] - &(&factor * &a[(row, j)]);
                a[(i, j)] = v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    Rref {
        rank: pivots.len(),
        form: a,
        pivots,
    }
}

pub fn rank(m: &RatMatrix) -> usize {
    rank_and_rref(m).rank
}

/// Basis of the right null space, one vector per free column in increasing
/// column order.
pub fn kernel_basis(m: &RatMatrix) -> Vec<Vec<Scalar>> {
    let r = rank_and_rref(m);
    let mut basis = Vec::new();
    for free in 0..m.cols {
        if r.pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Scalar::zero(); m.cols];
        v[free] = Scalar::one();
        for (row, &pc) in r.pivots.iter().enumerate() {
            v[pc] = -&r.form[(row, free)];
        }
        basis.push(v);
    }
    basis
}

/// Determinant by fraction-free (Bareiss) elimination. Each row is first
/// scaled to integers; the scale factors are divided out at the end.
pub fn determinant(m: &RatMatrix) -> Result<Scalar> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Scalar::one());
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let l = Scalar::common_denominator(m.row(i));
        scale *= &l;
        let lq = Scalar::from_bigint(l);
        a.push(
            m.row(i)
                .iter()
                .map(|v| {
                    let w = v * &lq;
                    debug_assert!(w.is_integer());
                    w.numer().clone()
                })
                .collect(),
        );
    }
    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return Ok(Scalar::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = &a[n - 1][n - 1] * BigInt::from(sign);
    Scalar::new(det, scale)
}

/// `C` with `B C = I`: the inverse of `B` restricted to its RREF pivot
/// columns is placed in the pivot rows of `C`, all other rows are zero.
pub fn right_inverse(b: &RatMatrix) -> Result<RatMatrix> {
    let r = rank_and_rref(b);
    if r.rank != b.rows {
        return Err(Error::RankDeficient {
            rank: r.rank,
            required: b.rows,
        });
    }
    let square = b.submatrix(&(0..b.rows).collect::<Vec<_>>(), &r.pivots);
    let inv = inverse(&square)?;
    let mut c = RatMatrix::zeros(b.cols, b.rows);
    for (k, &pc) in r.pivots.iter().enumerate() {
        for j in 0..b.rows {
            c[(pc, j)] = inv[(k, j)].clone();
        }
    }
    Ok(c)
}

pub fn inverse(m: &RatMatrix) -> Result<RatMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let mut aug = RatMatrix::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, n + i)] = Scalar::one();
    }
    let r = rank_and_rref(&aug);
    if r.pivots.iter().take_while(|&&p| p < n).count() < n {
        return Err(Error::RankDeficient {
            rank: r.pivots.iter().filter(|&&p| p < n).count(),
            required: n,
        });
    }
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (n..2 * n).collect();
    Ok(r.form.submatrix(&rows, &cols))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinorWitness {
    /// 0-based principal index set.
    pub indices: Vec<usize>,
    pub value: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinorSizeReport {
    pub size: usize,
    pub all_vanish: bool,
    pub witness: Option<MinorWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinorScanReport {
    pub lo: usize,
    pub hi: usize,
    pub sizes: Vec<MinorSizeReport>,
}

impl MinorScanReport {
    pub fn all_vanish(&self) -> bool {
        self.sizes.iter().all(|s| s.all_vanish)
    }
}

/// For every size in `lo..=hi`, checks whether all principal minors of that
/// size vanish, reporting the first non-vanishing index set (lexicographic
/// order) otherwise.
pub fn principal_minor_scan(a: &RatMatrix, lo: usize, hi: usize) -> Result<MinorScanReport> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    if n > MAX_MINOR_SCAN_DIM {
        return Err(Error::BadRange(format!(
            "principal minor scan supports n <= {MAX_MINOR_SCAN_DIM}, got {n}"
        )));
    }
    if lo < 2 || lo > hi || hi > n {
        return Err(Error::BadRange(format!(
            "need 2 <= lo <= hi <= n, got lo={lo}, hi={hi}, n={n}"
        )));
    }
    let mut sizes = Vec::new();
    for size in lo..=hi {
        let mut witness = None;
        for subset in Combinations::new(n, size) {
            let det = determinant(&a.submatrix(&subset, &subset))?;
            if !det.is_zero() {
                witness = Some(MinorWitness {
                    indices: subset,
                    value: det,
                });
                break;
            }
        }
        sizes.push(MinorSizeReport {
            size,
            all_vanish: witness.is_none(),
            witness,
        });
    }
    Ok(MinorScanReport { lo, hi, sizes })
}

/// `B` with `ker B = span(vectors)` and `rank B = n - s`: the rows of `B` are
/// the kernel basis of the matrix whose rows are `vectors`.
pub fn matrix_with_kernel(n: usize, vectors: &[Vec<Scalar>]) -> Result<RatMatrix> {
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch(format!("vectors must have length {n}")));
    }
    let s = vectors.len();
    if s >= n {
        return Err(Error::InvalidInput(format!(
            "need fewer than {n} vectors, got {s}"
        )));
    }
    if s == 0 {
        return Ok(RatMatrix::identity(n));
    }
    let stacked = RatMatrix::from_rows(vectors.to_vec())?;
    if rank(&stacked) < s {
        return Err(Error::DependentVectors);
    }
    RatMatrix::from_rows(kernel_basis(&stacked))
}

/// Whether `v` lies in the column span of `basis` (vectors of equal length).
pub fn in_span(basis: &[Vec<Scalar>], v: &[Scalar]) -> bool {
    if basis.is_empty() {
        return v.iter().all(Scalar::is_zero);
    }
    let n = v.len();
    let base = RatMatrix::from_columns(n, basis).expect("consistent lengths");
    let mut with = basis.to_vec();
    with.push(v.to_vec());
    let ext = RatMatrix::from_columns(n, &with).expect("consistent lengths");
    rank(&base) == rank(&ext)
}

/// Whether two families of vectors span the same subspace.
pub fn same_span(a: &[Vec<Scalar>], b: &[Vec<Scalar>], n: usize) -> bool {
    let ra = if a.is_empty() { 0 } else { rank(&RatMatrix::from_columns(n, a).unwrap()) };
    let rb = if b.is_empty() { 0 } else { rank(&RatMatrix::from_columns(n, b).unwrap()) };
    ra == rb && b.iter().all(|v| in_span(a, v))
}

/// Index subsets of `0..n` of a fixed size in lexicographic order.
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: if k <= n { Some((0..k).collect()) } else { None },
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.take()?;
        let out = cur.clone();
        let k = cur.len();
        let mut next = cur;
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                return Some(out);
            }
        }
        Some(out)
    }
}
