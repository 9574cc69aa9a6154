use super::snf::{fp_rank_unchecked, smith_normal_form_with, SmithForm};
use super::{AbGroupType, GradedGroup, IntMatrix, LinError};
use crate::exec::Exec;

/// Bounded chain complex of free modules. `diffs[k]` is the differential
/// out of degree `lo + k`; the differential out of `lo` has zero rows.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    lo: i64,
    ranks: Vec<usize>,
    diffs: Vec<IntMatrix>,
    modulus: Option<u64>,
}

impl ChainComplex {
    /// Builds a complex from term ranks starting at degree `lo` and the
    /// differentials out of each degree. Shapes and d∘d = 0 are checked.
    pub fn new(lo: i64, ranks: Vec<usize>, diffs: Vec<IntMatrix>) -> Result<Self, LinError> {
        let c = Self::new_unchecked(lo, ranks, diffs)?;
        c.check_square_zero()?;
        Ok(c)
    }

    /// Shape checks only; callers must run [`ChainComplex::check_square_zero`].
    pub(crate) fn new_unchecked(
        lo: i64,
        ranks: Vec<usize>,
        diffs: Vec<IntMatrix>,
    ) -> Result<Self, LinError> {
        if ranks.len() != diffs.len() {
            return Err(LinError::Shape(format!(
                "{} terms but {} differentials",
                ranks.len(),
                diffs.len()
            )));
        }
        let modulus = diffs.iter().find_map(IntMatrix::modulus);
        for (k, d) in diffs.iter().enumerate() {
            let below = if k == 0 { 0 } else { ranks[k - 1] };
            if d.cols() != ranks[k] || d.rows() != below {
                return Err(LinError::Shape(format!(
                    "differential out of degree {} is {}x{}, expected {}x{}",
                    lo + k as i64,
                    d.rows(),
                    d.cols(),
                    below,
                    ranks[k]
                )));
            }
            if d.modulus() != modulus && !d.is_zero() {
                return Err(LinError::ModulusMismatch);
            }
        }
        Ok(ChainComplex { lo, ranks, diffs, modulus })
    }

    /// Complex whose differentials all vanish.
    pub fn zero(lo: i64, ranks: Vec<usize>) -> Self {
        let diffs = ranks
            .iter()
            .enumerate()
            .map(|(k, &r)| IntMatrix::zeros(if k == 0 { 0 } else { ranks[k - 1] }, r))
            .collect();
        ChainComplex { lo, ranks, diffs, modulus: None }
    }

    pub fn check_square_zero(&self) -> Result<(), LinError> {
        for k in 1..self.diffs.len() {
            let dd = self.diffs[k - 1].mul(&self.diffs[k])?;
            let dd = match self.modulus {
                Some(p) => dd.reduce_mod(p),
                None => dd,
            };
            if !dd.is_zero() {
                return Err(LinError::NotAComplex(self.lo + k as i64));
            }
        }
        Ok(())
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }

    pub fn rank(&self, i: i64) -> usize {
        self.index(i).map_or(0, |k| self.ranks[k])
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    fn index(&self, i: i64) -> Option<usize> {
        if i < self.lo || i > self.hi() {
            None
        } else {
            Some((i - self.lo) as usize)
        }
    }

    /// Differential out of degree i (a zero matrix outside the stored range).
    pub fn differential(&self, i: i64) -> IntMatrix {
        match self.index(i) {
            Some(k) => self.diffs[k].clone(),
            None => IntMatrix::zeros(self.rank(i - 1), self.rank(i)),
        }
    }

    pub fn differential_ref(&self, i: i64) -> Option<&IntMatrix> {
        self.index(i).map(|k| &self.diffs[k])
    }

    fn diff_rank(&self, i: i64) -> Result<usize, LinError> {
        let Some(d) = self.differential_ref(i) else { return Ok(0) };
        match self.modulus {
            Some(p) => Ok(fp_rank_unchecked(d, p)),
            None => Ok(smith_normal_form_with(d, Exec::Sequential)?.rank()),
        }
    }

    fn diff_snf(&self, i: i64, exec: Exec) -> Result<Option<SmithForm>, LinError> {
        match self.differential_ref(i) {
            Some(d) => Ok(Some(smith_normal_form_with(d, exec)?)),
            None => Ok(None),
        }
    }

    /// Dimension of the cycles in degree i.
    pub fn cycles_dim(&self, i: i64) -> Result<usize, LinError> {
        Ok(self.rank(i) - self.diff_rank(i)?)
    }

    /// Dimension of the boundaries in degree i.
    pub fn boundaries_dim(&self, i: i64) -> Result<usize, LinError> {
        self.diff_rank(i + 1)
    }

    /// Homology in degree i. Over F_p this is `(Z/p)^dim`.
    pub fn homology_at(&self, i: i64) -> Result<AbGroupType, LinError> {
        if self.index(i).is_none() {
            return Err(LinError::Shape(format!(
                "degree {i} outside [{}, {}]",
                self.lo,
                self.hi()
            )));
        }
        self.homology_at_with(i, Exec::default())
    }

    fn homology_at_with(&self, i: i64, exec: Exec) -> Result<AbGroupType, LinError> {
        if let Some(p) = self.modulus {
            let dim = self.rank(i) - self.diff_rank(i)? - self.diff_rank(i + 1)?;
            return Ok(AbGroupType::elementary(p, dim));
        }
        let (out, inc) = exec.join(|| self.diff_rank(i), || self.diff_snf(i + 1, exec));
        let out = out?;
        let free_and_tors = match inc? {
            Some(s) => {
                let coker = s.cokernel(self.rank(i))?;
                AbGroupType { free_rank: coker.free_rank - out, torsion: coker.torsion }
            }
            None => AbGroupType::free(self.rank(i) - out),
        };
        Ok(free_and_tors)
    }

    /// Homology in every degree; one SNF per differential.
    pub fn homology(&self) -> Result<GradedGroup, LinError> {
        self.homology_with(Exec::default())
    }

    pub fn homology_with(&self, exec: Exec) -> Result<GradedGroup, LinError> {
        let degrees: Vec<i64> = (self.lo..=self.hi() + 1).collect();
        if let Some(p) = self.modulus {
            let ranks = exec.map(degrees, |i| self.diff_rank(i));
            let ranks = ranks.into_iter().collect::<Result<Vec<_>, _>>()?;
            let mut g = GradedGroup::new();
            for (k, &r) in self.ranks.iter().enumerate() {
                let dim = r - ranks[k] - ranks[k + 1];
                g.add(self.lo + k as i64, &AbGroupType::elementary(p, dim));
            }
            return Ok(g);
        }
        let snfs = exec.map(degrees, |i| self.diff_snf(i, Exec::Sequential));
        let snfs = snfs.into_iter().collect::<Result<Vec<_>, _>>()?;
        let mut g = GradedGroup::new();
        for (k, &r) in self.ranks.iter().enumerate() {
            let out = snfs[k].as_ref().map_or(0, SmithForm::rank);
            let h = match &snfs[k + 1] {
                Some(s) => {
                    let coker = s.cokernel(r)?;
                    AbGroupType { free_rank: coker.free_rank - out, torsion: coker.torsion }
                }
                None => AbGroupType::free(r - out),
            };
            g.add(self.lo + k as i64, &h);
        }
        Ok(g)
    }

    /// Dimensions of homology over F_p of this (integral) complex, via ranks mod p.
    pub fn homology_dims_mod(&self, p: u64) -> Result<Vec<(i64, usize)>, LinError> {
        let mut out = Vec::new();
        for (k, &r) in self.ranks.iter().enumerate() {
            let i = self.lo + k as i64;
            let a = self.differential_ref(i).map_or(0, |d| fp_rank_unchecked(d, p));
            let b = self.differential_ref(i + 1).map_or(0, |d| fp_rank_unchecked(d, p));
            out.push((i, r - a - b));
        }
        Ok(out)
    }

    /// Tensor product of complexes with the Koszul sign `(-1)^{deg x}` on `x ⊗ dy`.
    /// Basis of the degree-n term: pairs (x, y) ordered by deg x, then x, then y.
    pub fn tensor(&self, other: &ChainComplex, signed: bool) -> Result<ChainComplex, LinError> {
        let lo = self.lo + other.lo;
        let hi = self.hi() + other.hi();
        // offsets[n][a] = position of block (a, n - a) in degree n
        let block_offset = |n: i64, a: i64| -> usize {
            (self.lo..a).map(|a2| self.rank(a2) * other.rank(n - a2)).sum()
        };
        let mut ranks = Vec::new();
        let mut diffs = Vec::new();
        for n in lo..=hi {
            let rank_n: usize = (self.lo..=self.hi()).map(|a| self.rank(a) * other.rank(n - a)).sum();
            let rank_below: usize = if n == lo {
                0
            } else {
                (self.lo..=self.hi()).map(|a| self.rank(a) * other.rank(n - 1 - a)).sum()
            };
            let mut trip = Vec::new();
            if n > lo {
                for a in self.lo..=self.hi() {
                    let b = n - a;
                    let (ra, rb) = (self.rank(a), other.rank(b));
                    if ra == 0 || rb == 0 {
                        continue;
                    }
                    let src = block_offset(n, a);
                    // d x ⊗ y
                    if a > self.lo {
                        let dst = block_offset(n - 1, a - 1);
                        let rb_dst = other.rank(b);
                        let d = self.differential(a);
                        for (r, c, v) in d.entries() {
                            for y in 0..rb {
                                trip.push((dst + r * rb_dst + y, src + c * rb + y, v.clone()));
                            }
                        }
                    }
                    // ± x ⊗ d y
                    if b > other.lo {
                        let dst = block_offset(n - 1, a);
                        let rb_dst = other.rank(b - 1);
                        let d = other.differential(b);
                        let neg = signed && a.rem_euclid(2) == 1;
                        for (r, c, v) in d.entries() {
                            let v = if neg { -v.clone() } else { v.clone() };
                            for x in 0..ra {
                                trip.push((dst + x * rb_dst + r, src + x * rb + c, v.clone()));
                            }
                        }
                    }
                }
            }
            let mut m = IntMatrix::from_triplets(rank_below, rank_n, trip)?;
            if let Some(p) = self.modulus.or(other.modulus) {
                m = m.reduce_mod(p);
            }
            ranks.push(rank_n);
            diffs.push(m);
        }
        ChainComplex::new(lo, ranks, diffs)
    }

    pub fn shift(&self, by: i64) -> ChainComplex {
        ChainComplex { lo: self.lo + by, ..self.clone() }
    }

    pub fn total_nnz(&self) -> usize {
        self.diffs.iter().map(IntMatrix::nnz).sum()
    }
}
