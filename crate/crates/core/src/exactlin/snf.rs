use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::group::invariant_factors;
use super::{AbGroupType, IntMatrix, LinError};
use crate::exec::Exec;

/// Coefficient arithmetic used by the elimination engines. `None` from an
/// operation means machine-word overflow.
pub(crate) trait Arith: Sync {
    type E: Clone + Debug + Send + Sync;
    fn zero(&self) -> Self::E;
    fn from_big(&self, v: &BigInt) -> Option<Self::E>;
    fn to_big(&self, v: &Self::E) -> BigInt;
    fn is_zero(&self, v: &Self::E) -> bool;
    fn is_unit(&self, v: &Self::E) -> bool;
    fn size(&self, v: &Self::E) -> u64;
    /// Exact comparison of absolute values.
    fn cmp_size(&self, a: &Self::E, b: &Self::E) -> Ordering;
    /// Whether elements are honest integers (not residues).
    fn exact(&self) -> bool {
        true
    }
    /// `a - q * b`
    fn sub_mul(&self, a: &Self::E, q: &Self::E, b: &Self::E) -> Option<Self::E>;
    /// `Some(q)` with `b = q * a`, or `None` when `a` does not divide `b`.
    fn div_exact(&self, b: &Self::E, a: &Self::E) -> Option<Self::E>;
    /// Euclidean quotient of `b` by `a`.
    fn quot(&self, b: &Self::E, a: &Self::E) -> Self::E;
}

pub(crate) struct I64Arith;
pub(crate) struct BigArith;
pub(crate) struct FpArith {
    pub p: u64,
}

impl Arith for I64Arith {
    type E = i64;
    fn zero(&self) -> i64 {
        0
    }
    fn from_big(&self, v: &BigInt) -> Option<i64> {
        // keep headroom so that negation never overflows
        v.to_i64().filter(|x| *x != i64::MIN)
    }
    fn to_big(&self, v: &i64) -> BigInt {
        BigInt::from(*v)
    }
    fn is_zero(&self, v: &i64) -> bool {
        *v == 0
    }
    fn is_unit(&self, v: &i64) -> bool {
        *v == 1 || *v == -1
    }
    fn size(&self, v: &i64) -> u64 {
        v.unsigned_abs()
    }
    fn cmp_size(&self, a: &i64, b: &i64) -> Ordering {
        a.unsigned_abs().cmp(&b.unsigned_abs())
    }
    fn sub_mul(&self, a: &i64, q: &i64, b: &i64) -> Option<i64> {
        q.checked_mul(*b).and_then(|t| a.checked_sub(t)).filter(|x| *x != i64::MIN)
    }
    fn div_exact(&self, b: &i64, a: &i64) -> Option<i64> {
        if b % a == 0 {
            Some(b / a)
        } else {
            None
        }
    }
    fn quot(&self, b: &i64, a: &i64) -> i64 {
        b.div_floor(a)
    }
}

impl Arith for BigArith {
    type E = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn from_big(&self, v: &BigInt) -> Option<BigInt> {
        Some(v.clone())
    }
    fn to_big(&self, v: &BigInt) -> BigInt {
        v.clone()
    }
    fn is_zero(&self, v: &BigInt) -> bool {
        v.is_zero()
    }
    fn is_unit(&self, v: &BigInt) -> bool {
        v.abs().is_one()
    }
    fn size(&self, v: &BigInt) -> u64 {
        v.abs().to_u64().unwrap_or(u64::MAX)
    }
    fn cmp_size(&self, a: &BigInt, b: &BigInt) -> Ordering {
        a.magnitude().cmp(b.magnitude())
    }
    fn sub_mul(&self, a: &BigInt, q: &BigInt, b: &BigInt) -> Option<BigInt> {
        Some(a - q * b)
    }
    fn div_exact(&self, b: &BigInt, a: &BigInt) -> Option<BigInt> {
        let (q, r) = b.div_rem(a);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }
    fn quot(&self, b: &BigInt, a: &BigInt) -> BigInt {
        b.div_floor(a)
    }
}

impl FpArith {
    fn inv(&self, a: u64) -> u64 {
        let mut result = 1u64;
        let mut base = a % self.p;
        let mut e = self.p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        result
    }
}

impl Arith for FpArith {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn from_big(&self, v: &BigInt) -> Option<u64> {
        v.mod_floor(&BigInt::from(self.p)).to_u64()
    }
    fn to_big(&self, v: &u64) -> BigInt {
        BigInt::from(*v)
    }
    fn is_zero(&self, v: &u64) -> bool {
        *v == 0
    }
    fn is_unit(&self, v: &u64) -> bool {
        *v != 0
    }
    fn size(&self, _v: &u64) -> u64 {
        1
    }
    fn cmp_size(&self, _a: &u64, _b: &u64) -> Ordering {
        Ordering::Equal
    }
    fn exact(&self) -> bool {
        false
    }
    fn sub_mul(&self, a: &u64, q: &u64, b: &u64) -> Option<u64> {
        let t = (*q as u128 * *b as u128 % self.p as u128) as u64;
        Some((a + self.p - t) % self.p)
    }
    fn div_exact(&self, b: &u64, a: &u64) -> Option<u64> {
        Some((*b as u128 * self.inv(*a) as u128 % self.p as u128) as u64)
    }
    fn quot(&self, b: &u64, a: &u64) -> u64 {
        (*b as u128 * self.inv(*a) as u128 % self.p as u128) as u64
    }
}

/// Arithmetic on representatives in [0, d).
struct ModArith {
    d: BigInt,
}

impl Arith for ModArith {
    type E = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn from_big(&self, v: &BigInt) -> Option<BigInt> {
        Some(v.mod_floor(&self.d))
    }
    fn to_big(&self, v: &BigInt) -> BigInt {
        v.clone()
    }
    fn is_zero(&self, v: &BigInt) -> bool {
        v.is_zero()
    }
    fn is_unit(&self, v: &BigInt) -> bool {
        v.gcd(&self.d).is_one()
    }
    fn size(&self, v: &BigInt) -> u64 {
        v.bits()
    }
    fn cmp_size(&self, a: &BigInt, b: &BigInt) -> Ordering {
        a.cmp(b)
    }
    fn sub_mul(&self, a: &BigInt, q: &BigInt, b: &BigInt) -> Option<BigInt> {
        Some((a - q * b).mod_floor(&self.d))
    }
    fn div_exact(&self, b: &BigInt, a: &BigInt) -> Option<BigInt> {
        let (q, r) = b.div_rem(a);
        r.is_zero().then_some(q)
    }
    fn quot(&self, b: &BigInt, a: &BigInt) -> BigInt {
        b.div_floor(a)
    }
}

/// Residual blocks with both sides at least this long are diagonalized
/// modulo a nonzero maximal minor, which keeps the entries bounded.
const MODULAR_RESIDUAL: usize = 16;

/// Rank and |a nonzero maximal minor| of a dense matrix, by fraction-free
/// elimination with full pivoting.
fn rank_and_minor(mut a: Vec<Vec<BigInt>>) -> (usize, BigInt) {
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut k = 0;
    while k < n.min(m) {
        let Some((pi, pj)) = (k..n).find_map(|i| (k..m).find(|&j| !a[i][j].is_zero()).map(|j| (i, j))) else {
            break;
        };
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            let lead = std::mem::take(&mut row[k]);
            for j in k + 1..m {
                let v = &row[j] * &pivot_row[k] - &lead * &pivot_row[j];
                row[j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
        k += 1;
    }
    (k, prev.abs())
}

/// Nonzero diagonal of a dense block: the invariant factors s_i all divide a
/// nonzero maximal minor d, so the Smith form over Z/d recovers them as
/// gcd(·, d), with d standing in for the factors that vanish mod d.
fn modular_diagonal(a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let (rank, d) = rank_and_minor(a.clone());
    if rank == 0 {
        return Vec::new();
    }
    if d.is_one() {
        return vec![BigInt::one(); rank];
    }
    let ar = ModArith { d };
    let reduced: Vec<Vec<BigInt>> =
        a.into_iter().map(|row| row.into_iter().map(|v| v.mod_floor(&ar.d)).collect()).collect();
    let diag = dense_diagonal(&ar, reduced).expect("modular arithmetic cannot overflow");
    debug_assert!(diag.len() <= rank);
    let mut out: Vec<BigInt> = diag.iter().map(|v| v.gcd(&ar.d)).collect();
    out.resize(rank, ar.d.clone());
    out
}

#[derive(Debug)]
pub(crate) struct Overflow;

/// Sparse elimination state. Rows are sorted by column; `col_rows` may hold
/// stale row ids, `col_count` is exact over live rows.
struct Sparse<'a, A: Arith> {
    ar: &'a A,
    rows: Vec<Vec<(u32, A::E)>>,
    row_alive: Vec<bool>,
    col_rows: Vec<Vec<u32>>,
    col_count: Vec<u32>,
    col_alive: Vec<bool>,
    deferred: Vec<bool>,
    heap: BinaryHeap<Reverse<(u32, u32)>>,
    divisors: Vec<A::E>,
}

impl<'a, A: Arith> Sparse<'a, A> {
    fn new(ar: &'a A, m: &IntMatrix) -> Result<Self, Overflow> {
        let mut rows: Vec<Vec<(u32, A::E)>> = vec![Vec::new(); m.rows()];
        let mut col_rows = vec![Vec::new(); m.cols()];
        let mut col_count = vec![0u32; m.cols()];
        for (c, col) in m.columns().iter().enumerate() {
            for (r, v) in col {
                let e = ar.from_big(v).ok_or(Overflow)?;
                if ar.is_zero(&e) {
                    continue;
                }
                rows[*r].push((c as u32, e));
                col_rows[c].push(*r as u32);
                col_count[c] += 1;
            }
        }
        let mut heap = BinaryHeap::with_capacity(m.cols());
        for (c, &k) in col_count.iter().enumerate() {
            heap.push(Reverse((k, c as u32)));
        }
        Ok(Sparse {
            ar,
            row_alive: vec![true; m.rows()],
            rows,
            col_rows,
            col_count,
            col_alive: vec![true; m.cols()],
            deferred: vec![false; m.cols()],
            heap,
            divisors: Vec::new(),
        })
    }

    fn entry(&self, r: u32, c: u32) -> Option<&A::E> {
        let row = &self.rows[r as usize];
        row.binary_search_by_key(&c, |(k, _)| *k).ok().map(|k| &row[k].1)
    }

    /// Live entries of column c; compacts the stale row list as a side effect.
    fn column_entries(&mut self, c: u32) -> Vec<(u32, A::E)> {
        let mut list = std::mem::take(&mut self.col_rows[c as usize]);
        list.sort_unstable();
        list.dedup();
        let mut live = Vec::with_capacity(list.len());
        let mut out = Vec::with_capacity(list.len());
        for r in list {
            if !self.row_alive[r as usize] {
                continue;
            }
            if let Some(v) = self.entry(r, c) {
                out.push((r, v.clone()));
                live.push(r);
            }
        }
        self.col_rows[c as usize] = live;
        out
    }

    fn choose_pivot(&self, c: u32, entries: &[(u32, A::E)]) -> Option<(u32, A::E)> {
        let ar = self.ar;
        let unit = entries
            .iter()
            .filter(|(_, v)| ar.is_unit(v))
            .min_by_key(|(r, _)| (self.rows[*r as usize].len(), *r));
        if let Some((r, v)) = unit {
            return Some((*r, v.clone()));
        }
        // a non-unit pivot is usable when it divides its whole column and row
        let mut cands: Vec<&(u32, A::E)> = entries.iter().collect();
        cands.sort_by_key(|(r, v)| (ar.size(v), self.rows[*r as usize].len(), *r));
        let smallest = ar.size(&cands[0].1);
        for (r, v) in cands {
            if ar.size(v) != smallest {
                break;
            }
            let col_ok = entries.iter().all(|(_, w)| ar.div_exact(w, v).is_some());
            let row_ok = col_ok
                && self.rows[*r as usize]
                    .iter()
                    .all(|(k, w)| *k == c || ar.div_exact(w, v).is_some());
            if row_ok {
                return Some((*r, v.clone()));
            }
        }
        None
    }

    /// `row[r] -= q * row[p]`, maintaining column counts.
    fn row_update(&mut self, r: u32, q: &A::E, p: u32) -> Result<(), Overflow> {
        let ar = self.ar;
        let old = std::mem::take(&mut self.rows[r as usize]);
        let piv = &self.rows[p as usize];
        let mut new = Vec::with_capacity(old.len() + piv.len());
        let (mut i, mut j) = (0, 0);
        let zero = ar.zero();
        while i < old.len() || j < piv.len() {
            let take_old = j >= piv.len() || (i < old.len() && old[i].0 < piv[j].0);
            let take_piv = i >= old.len() || (j < piv.len() && piv[j].0 < old[i].0);
            if take_old {
                new.push(old[i].clone());
                i += 1;
            } else if take_piv {
                let c = piv[j].0;
                let v = ar.sub_mul(&zero, q, &piv[j].1).ok_or(Overflow)?;
                if !ar.is_zero(&v) {
                    new.push((c, v));
                    self.col_count[c as usize] += 1;
                    self.col_rows[c as usize].push(r);
                }
                j += 1;
            } else {
                let c = old[i].0;
                let v = ar.sub_mul(&old[i].1, q, &piv[j].1).ok_or(Overflow)?;
                if ar.is_zero(&v) {
                    self.col_count[c as usize] -= 1;
                } else {
                    new.push((c, v));
                }
                i += 1;
                j += 1;
            }
        }
        self.rows[r as usize] = new;
        Ok(())
    }

    fn touch(&mut self, c: u32) {
        if self.col_alive[c as usize] {
            self.deferred[c as usize] = false;
            self.heap.push(Reverse((self.col_count[c as usize], c)));
        }
    }

    fn run(&mut self) -> Result<(), Overflow> {
        while let Some(Reverse((count, c))) = self.heap.pop() {
            let ci = c as usize;
            if !self.col_alive[ci] || self.deferred[ci] || self.col_count[ci] != count {
                continue;
            }
            if count == 0 {
                self.col_alive[ci] = false;
                continue;
            }
            let entries = self.column_entries(c);
            let Some((p, u)) = self.choose_pivot(c, &entries) else {
                self.deferred[ci] = true;
                continue;
            };
            for (r, v) in &entries {
                if *r == p {
                    continue;
                }
                let q = self.ar.div_exact(v, &u).expect("pivot divides its column");
                self.row_update(*r, &q, p)?;
            }
            let prow = std::mem::take(&mut self.rows[p as usize]);
            self.row_alive[p as usize] = false;
            self.col_alive[ci] = false;
            for (k, _) in &prow {
                if *k != c {
                    self.col_count[*k as usize] -= 1;
                    self.touch(*k);
                }
            }
            self.divisors.push(u);
        }
        Ok(())
    }

    /// Remaining live submatrix as dense rows.
    fn residual(&self) -> Vec<Vec<A::E>> {
        let cols: Vec<u32> = (0..self.col_alive.len() as u32)
            .filter(|&c| self.col_alive[c as usize] && self.col_count[c as usize] > 0)
            .collect();
        if cols.is_empty() {
            return Vec::new();
        }
        let mut index = vec![u32::MAX; self.col_alive.len()];
        for (k, &c) in cols.iter().enumerate() {
            index[c as usize] = k as u32;
        }
        let zero = self.ar.zero();
        let mut out = Vec::new();
        for (r, row) in self.rows.iter().enumerate() {
            if !self.row_alive[r] || row.is_empty() {
                continue;
            }
            let mut dense = vec![zero.clone(); cols.len()];
            for (c, v) in row {
                dense[index[*c as usize] as usize] = v.clone();
            }
            out.push(dense);
        }
        out
    }
}

/// Diagonalizes a dense matrix by Euclidean row/column steps; returns the nonzero diagonal.
fn dense_diagonal<A: Arith>(ar: &A, mut a: Vec<Vec<A::E>>) -> Result<Vec<A::E>, Overflow> {
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..n.min(m) {
        // global minimal pivot in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, v) in row.iter().enumerate().skip(t) {
                if !ar.is_zero(v) && best.is_none_or(|(bi, bj)| ar.cmp_size(v, &a[bi][bj]) == Ordering::Less) {
                    best = Some((i, j));
                }
            }
        }
        let Some((i0, j0)) = best else { break };
        a.swap(t, i0);
        for row in a.iter_mut() {
            row.swap(t, j0);
        }
        loop {
            let mut clean = true;
            for i in t + 1..n {
                if ar.is_zero(&a[i][t]) {
                    continue;
                }
                let q = ar.quot(&a[i][t], &a[t][t]);
                for j in t..m {
                    let v = ar.sub_mul(&a[i][j], &q, &a[t][j]).ok_or(Overflow)?;
                    a[i][j] = v;
                }
                if !ar.is_zero(&a[i][t]) {
                    clean = false;
                }
            }
            for j in t + 1..m {
                if ar.is_zero(&a[t][j]) {
                    continue;
                }
                let q = ar.quot(&a[t][j], &a[t][t]);
                for i in t..n {
                    let v = ar.sub_mul(&a[i][j], &q, &a[i][t]).ok_or(Overflow)?;
                    a[i][j] = v;
                }
                if !ar.is_zero(&a[t][j]) {
                    clean = false;
                }
            }
            if clean {
                break;
            }
            // bring the smallest remainder of row/column t to the corner
            let (mut bi, mut bj) = (t, t);
            for i in t + 1..n {
                if !ar.is_zero(&a[i][t]) && ar.cmp_size(&a[i][t], &a[bi][bj]) == Ordering::Less {
                    (bi, bj) = (i, t);
                }
            }
            for j in t + 1..m {
                if !ar.is_zero(&a[t][j]) && ar.cmp_size(&a[t][j], &a[bi][bj]) == Ordering::Less {
                    (bi, bj) = (t, j);
                }
            }
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
        }
        diag.push(a[t][t].clone());
    }
    Ok(diag)
}

/// Nonzero diagonal (unsorted, unnormalized) of some diagonal form of `m`.
pub(crate) fn raw_diagonal<A: Arith>(ar: &A, m: &IntMatrix) -> Result<Vec<BigInt>, Overflow> {
    let mut sp = Sparse::new(ar, m)?;
    sp.run()?;
    let dense = sp.residual();
    let mut out: Vec<BigInt> = sp.divisors.iter().map(|v| ar.to_big(v)).collect();
    if dense.len().min(dense.first().map_or(0, Vec::len)) >= MODULAR_RESIDUAL && ar.exact() {
        let big = dense.iter().map(|row| row.iter().map(|v| ar.to_big(v)).collect()).collect();
        out.extend(modular_diagonal(big));
    } else if !dense.is_empty() {
        out.extend(dense_diagonal(ar, dense)?.iter().map(|v| ar.to_big(v)));
    }
    Ok(out)
}

/// Smith normal form data of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    rank: usize,
    nontrivial: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The full nonzero diagonal, each entry dividing the next.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let ones = self.rank - self.nontrivial.len();
        std::iter::repeat(BigInt::one()).take(ones).chain(self.nontrivial.iter().cloned()).collect()
    }

    /// Invariant factors different from 1.
    pub fn torsion(&self) -> &[BigInt] {
        &self.nontrivial
    }

    /// Cokernel of a matrix with `rows` rows and this Smith form.
    pub fn cokernel(&self, rows: usize) -> Result<AbGroupType, LinError> {
        let tors = self
            .nontrivial
            .iter()
            .map(|t| t.to_u64().ok_or(LinError::TorsionTooLarge(t.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AbGroupType { free_rank: rows - self.rank, torsion: tors })
    }
}

fn canonical_chain(diag: Vec<BigInt>) -> SmithForm {
    let rank = diag.len();
    let nonunit: Vec<BigInt> = diag.into_iter().map(|v| v.abs()).filter(|v| !v.is_one()).collect();
    let small: Option<Vec<u64>> = nonunit.iter().map(|v| v.to_u64()).collect();
    let nontrivial = match small {
        Some(vals) => invariant_factors(vals).into_iter().map(BigInt::from).collect(),
        None => {
            let mut v = nonunit;
            v.sort();
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    let g = v[i].gcd(&v[j]);
                    if g != v[i] {
                        let l = &v[i] / &g * &v[j];
                        v[i] = g;
                        v[j] = l;
                    }
                }
            }
            v.retain(|x| !x.is_one());
            v
        }
    };
    SmithForm { rank, nontrivial }
}

/// Primes used for the modular rank cross-check (largest primes below 2^30).
pub const CHECK_PRIMES: [u64; 2] = [1_073_741_789, 1_073_741_783];

/// Smith normal form over Z. Machine-word arithmetic is tried first and the
/// computation is redone with big integers on overflow.
pub fn smith_normal_form(m: &IntMatrix) -> Result<SmithForm, LinError> {
    smith_normal_form_with(m, Exec::default())
}

pub fn smith_normal_form_with(m: &IntMatrix, exec: Exec) -> Result<SmithForm, LinError> {
    if m.modulus().is_some() {
        return Err(LinError::ModulusSet);
    }
    if m.is_zero() {
        return Ok(SmithForm { rank: 0, nontrivial: Vec::new() });
    }
    let (snf, modular) = exec.join(
        || {
            let diag = match raw_diagonal(&I64Arith, m) {
                Ok(d) => d,
                Err(Overflow) => raw_diagonal(&BigArith, m).expect("big integers do not overflow"),
            };
            canonical_chain(diag)
        },
        || CHECK_PRIMES.iter().map(|&p| fp_rank_unchecked(m, p)).max().unwrap_or(0),
    );
    if snf.rank != modular {
        return Err(LinError::Internal(format!(
            "integer rank {} disagrees with modular rank {}",
            snf.rank, modular
        )));
    }
    Ok(snf)
}

pub(crate) fn fp_rank_unchecked(m: &IntMatrix, p: u64) -> usize {
    let ar = FpArith { p };
    let mut sp = Sparse::new(&ar, m).expect("reduction mod p cannot overflow");
    sp.run().expect("field arithmetic cannot overflow");
    debug_assert!(sp.residual().is_empty());
    sp.divisors.len()
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2u64;
    while q.saturating_mul(q) <= p {
        if p % q == 0 {
            return false;
        }
        q += 1;
    }
    true
}

/// Rank of `m` reduced mod p.
pub fn fp_rank(m: &IntMatrix, p: u64) -> Result<usize, LinError> {
    if !is_prime(p) {
        return Err(LinError::NotPrime(p));
    }
    if p >= 1 << 32 {
        return Err(LinError::PrimeTooLarge(p));
    }
    Ok(fp_rank_unchecked(m, p))
}
