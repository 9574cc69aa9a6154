use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::LinError;

/// Sparse integer matrix, optionally tagged as an F_p matrix.
///
/// Storage is column-major; each column keeps its row indices strictly
/// increasing and never stores a zero.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    modulus: Option<u64>,
    data: Vec<Vec<(usize, BigInt)>>,
}

fn normalize(v: BigInt, modulus: Option<u64>) -> BigInt {
    match modulus {
        Some(p) => v.mod_floor(&BigInt::from(p)),
        None => v,
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, modulus: None, data: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1)
    }

    pub fn scalar(n: usize, k: i64) -> Self {
        let mut m = Self::zeros(n, n);
        if k != 0 {
            for c in 0..n {
                m.data[c].push((c, BigInt::from(k)));
            }
        }
        m
    }

    /// Builds a matrix from triplets; duplicate coordinates are summed.
    pub fn from_triplets<I>(rows: usize, cols: usize, entries: I) -> Result<Self, LinError>
    where
        I: IntoIterator<Item = (usize, usize, BigInt)>,
    {
        let mut data: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); cols];
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(LinError::OutOfRange { row: r, col: c, rows, cols });
            }
            data[c].push((r, v));
        }
        let data = data.into_iter().map(|col| merge_column(col, None)).collect();
        Ok(IntMatrix { rows, cols, modulus: None, data })
    }

    /// Builds a matrix from per-column sparse vectors (rows may repeat, zeros are dropped).
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, BigInt)>>) -> Result<Self, LinError> {
        let cols = columns.len();
        let mut data = Vec::with_capacity(cols);
        for (c, col) in columns.into_iter().enumerate() {
            if let Some(&(r, _)) = col.iter().find(|(r, _)| *r >= rows) {
                return Err(LinError::OutOfRange { row: r, col: c, rows, cols });
            }
            data.push(merge_column(col, None));
        }
        Ok(IntMatrix { rows, cols, modulus: None, data })
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        let mut data = vec![Vec::new(); nc];
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), nc, "ragged dense matrix");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    data[j].push((i, BigInt::from(v)));
                }
            }
        }
        IntMatrix { rows: nr, cols: nc, modulus: None, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn column(&self, c: usize) -> &[(usize, BigInt)] {
        &self.data[c]
    }

    pub fn columns(&self) -> &[Vec<(usize, BigInt)>] {
        &self.data
    }

    /// All stored entries in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        match self.data[c].binary_search_by_key(&r, |(i, _)| *i) {
            Ok(k) => self.data[c][k].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    /// Reduces all entries into [0, p) and tags the matrix as an F_p matrix.
    pub fn reduce_mod(&self, p: u64) -> IntMatrix {
        let data = self
            .data
            .iter()
            .map(|col| merge_column(col.clone(), Some(p)))
            .collect();
        IntMatrix { rows: self.rows, cols: self.cols, modulus: Some(p), data }
    }

    /// Forgets the modulus, keeping representatives in [0, p).
    pub fn lift(&self) -> IntMatrix {
        IntMatrix { modulus: None, ..self.clone() }
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut data = vec![Vec::new(); self.rows];
        for (c, col) in self.data.iter().enumerate() {
            for (r, v) in col {
                data[*r].push((c, v.clone()));
            }
        }
        IntMatrix { rows: self.cols, cols: self.rows, modulus: self.modulus, data }
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, LinError> {
        if self.cols != rhs.rows {
            return Err(LinError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let modulus = self.modulus.or(rhs.modulus);
        let mut acc: Vec<BigInt> = vec![BigInt::zero(); self.rows];
        let mut touched: Vec<usize> = Vec::new();
        let mut data = Vec::with_capacity(rhs.cols);
        for rcol in &rhs.data {
            for (k, b) in rcol {
                for (i, a) in &self.data[*k] {
                    if acc[*i].is_zero() {
                        touched.push(*i);
                    }
                    acc[*i] += a * b;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let mut col = Vec::with_capacity(touched.len());
            for &i in &touched {
                let v = normalize(std::mem::take(&mut acc[i]), modulus);
                if !v.is_zero() {
                    col.push((i, v));
                }
            }
            touched.clear();
            data.push(col);
        }
        Ok(IntMatrix { rows: self.rows, cols: rhs.cols, modulus, data })
    }

    pub fn add(&self, rhs: &IntMatrix) -> Result<IntMatrix, LinError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(LinError::Shape(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let modulus = self.modulus.or(rhs.modulus);
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| {
                let mut col = a.clone();
                col.extend(b.iter().cloned());
                merge_column(col, modulus)
            })
            .collect();
        Ok(IntMatrix { rows: self.rows, cols: self.cols, modulus, data })
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        let data = self
            .data
            .iter()
            .map(|col| merge_column(col.iter().map(|(r, v)| (*r, v * k)).collect(), self.modulus))
            .collect();
        IntMatrix { data, ..self.clone() }
    }

    /// Kronecker product; row/column index of (i, j) is i * other.dim + j.
    pub fn kron(&self, other: &IntMatrix) -> IntMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = Vec::with_capacity(cols);
        for acol in &self.data {
            for bcol in &other.data {
                let mut col = Vec::with_capacity(acol.len() * bcol.len());
                for (i, a) in acol {
                    for (k, b) in bcol {
                        col.push((i * other.rows + k, a * b));
                    }
                }
                data.push(col);
            }
        }
        IntMatrix { rows, cols, modulus: self.modulus.or(other.modulus), data }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &IntMatrix) -> IntMatrix {
        let mut data = self.data.clone();
        for col in &other.data {
            data.push(col.iter().map(|(r, v)| (r + self.rows, v.clone())).collect());
        }
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols + other.cols,
            modulus: self.modulus.or(other.modulus),
            data,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            out[r][c] = v.clone();
        }
        out
    }

    /// Dense copy with machine-word entries, if they all fit.
    pub fn to_dense_i64(&self) -> Option<Vec<Vec<i64>>> {
        let mut out = vec![vec![0i64; self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            out[r][c] = v.to_i64()?;
        }
        Some(out)
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.entries().map(|(_, _, v)| v.abs()).max().unwrap_or_else(BigInt::zero)
    }

    /// Selects the given columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> IntMatrix {
        let data = cols.iter().map(|&c| self.data[c].clone()).collect();
        IntMatrix { rows: self.rows, cols: cols.len(), modulus: self.modulus, data }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && self
                .data
                .iter()
                .enumerate()
                .all(|(c, col)| col.len() == 1 && col[0].0 == c && col[0].1.is_one())
    }
}

/// Sorts by row, merges duplicates, reduces mod p if asked and drops zeros.
fn merge_column(mut col: Vec<(usize, BigInt)>, modulus: Option<u64>) -> Vec<(usize, BigInt)> {
    col.sort_by_key(|(r, _)| *r);
    let mut out: Vec<(usize, BigInt)> = Vec::with_capacity(col.len());
    for (r, v) in col {
        match out.last_mut() {
            Some((lr, lv)) if *lr == r => *lv += v,
            _ => out.push((r, v)),
        }
    }
    out.into_iter()
        .map(|(r, v)| (r, normalize(v, modulus)))
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        if let Some(p) = self.modulus {
            write!(f, " mod {p}")?;
        }
        if self.rows * self.cols <= 144 {
            for row in self.to_dense() {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                write!(f, "\n  [{}]", cells.join(", "))?;
            }
        } else {
            write!(f, " ({} nonzeros)", self.nnz())?;
        }
        Ok(())
    }
}
