//! Derived functors through the Dold-Kan construction.
//!
//! A monotone surjection σ: [m] ↠ [k] is stored as its jump set: bit t
//! (1 ≤ t ≤ m) is set when σ(t) = σ(t-1) + 1. K(C)_m is free on pairs
//! (σ, generator of C_k). A face whose coface composite misses the top
//! value of [k] applies the differential of C; all other non-surjective
//! composites vanish.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combi::binom;
use crate::exactlin::{AbGroupType, ChainComplex, GradedGroup, IntMatrix, LinError};
use crate::exec::Exec;
use crate::polyfunc::{apply_core, core_basis, core_count, Basis, Core, Elem, FuncError, FunctorExpr};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DkError {
    #[error(
        "instance refused: predicted chain ranks {predicted:?} (cap {rank_cap}), \
         predicted nonzeros {nnz} (cap {nnz_cap})"
    )]
    Budget { predicted: Vec<(i64, u128)>, rank_cap: usize, nnz: u128, nnz_cap: u128 },
    #[error("simplicial identity fails: {0}")]
    Simplicial(String),
    #[error("basis certification failed in degree {degree}: enumerated {found}, predicted {predicted}")]
    Certification { degree: usize, found: usize, predicted: u128 },
    #[error("truncation degree {0} exceeds the supported maximum of 62")]
    TooDeep(usize),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// Chain model used to compute homotopy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainMode {
    /// Quotient by the degenerate subcomplex.
    #[default]
    Normalized,
    /// Alternating face sum on the full terms.
    Moore,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub rank_cap: usize,
    pub nnz_cap: u128,
    pub mode: ChainMode,
    /// Truncation degree; `None` means one above the vanishing bound.
    pub truncation: Option<usize>,
    pub exec: Exec,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            rank_cap: 50_000,
            nnz_cap: 10_000_000,
            mode: ChainMode::Normalized,
            truncation: None,
            exec: Exec::default(),
        }
    }
}

/// Generator of K(C)_m: a jump set and a generator of C_k, where k is the
/// size of the jump set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub mask: u64,
    pub top: bool,
    pub index: usize,
}

/// Truncated simplicial free module with explicit face and degeneracy matrices.
#[derive(Clone, Debug)]
pub struct SimplicialModule {
    truncation: usize,
    gens: Vec<Vec<Generator>>,
    /// faces[m][i]: degree m → m−1 (empty for m = 0)
    faces: Vec<Vec<IntMatrix>>,
    /// degens[m][i]: degree m → m+1, for m < truncation
    degens: Vec<Vec<IntMatrix>>,
    /// (n, a, b, max column count of the differential) of the source complex
    shape: (usize, usize, usize, usize),
}

enum FaceImage {
    Same(u64),
    MissTop(u64),
    Zero,
}

fn face_mask(j: u64, m: usize, i: usize) -> FaceImage {
    let bit = |t: usize| (j >> t) & 1;
    if i == 0 {
        if bit(1) == 1 {
            return FaceImage::Zero;
        }
        return FaceImage::Same(j >> 1);
    }
    if i == m {
        let low = j & !(1u64 << m);
        return if bit(m) == 1 { FaceImage::MissTop(low) } else { FaceImage::Same(low) };
    }
    if bit(i) + bit(i + 1) == 2 {
        return FaceImage::Zero;
    }
    let below = j & ((1u64 << i) - 1);
    let merged = (bit(i) | bit(i + 1)) << i;
    let above = (j >> (i + 2)) << (i + 1);
    FaceImage::Same(below | merged | above)
}

fn degeneracy_mask(j: u64, i: usize) -> u64 {
    let low_bits = (1u64 << (i + 1)) - 1;
    (j & low_bits) | ((j & !low_bits) << 1)
}

/// Bitmasks of k-subsets of {1..m}, in lexicographic order of the subsets.
fn masks(m: usize, k: usize) -> Vec<u64> {
    crate::combi::subsets(m, k)
        .into_iter()
        .map(|s| s.into_iter().fold(0u64, |acc, t| acc | (1u64 << (t + 1))))
        .collect()
}

impl SimplicialModule {
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn rank(&self, m: usize) -> usize {
        self.gens[m].len()
    }

    pub fn generators(&self, m: usize) -> &[Generator] {
        &self.gens[m]
    }

    /// Face ∂_i out of degree m ≥ 1.
    pub fn face(&self, m: usize, i: usize) -> &IntMatrix {
        &self.faces[m][i]
    }

    /// Degeneracy s_i out of degree m < truncation.
    pub fn degeneracy(&self, m: usize, i: usize) -> &IntMatrix {
        &self.degens[m][i]
    }

    /// Checks all simplicial identities as matrix equations up to the truncation.
    pub fn check_identities(&self) -> Result<(), DkError> {
        let eq = |a: &IntMatrix, b: &IntMatrix, what: String| -> Result<(), DkError> {
            if a == b {
                Ok(())
            } else {
                Err(DkError::Simplicial(what))
            }
        };
        let top = self.truncation;
        for m in 2..=top {
            for j in 1..=m {
                for i in 0..j {
                    let lhs = self.face(m - 1, i).mul(self.face(m, j))?;
                    let rhs = self.face(m - 1, j - 1).mul(self.face(m, i))?;
                    eq(&lhs, &rhs, format!("d{i} d{j} = d{} d{i} in degree {m}", j - 1))?;
                }
            }
        }
        for m in 0..top {
            let id = IntMatrix::identity(self.rank(m));
            for j in 0..=m {
                let s = self.degeneracy(m, j);
                // ∂_i s_j for i ∈ [0, m+1]
                for i in 0..=m + 1 {
                    let lhs = self.face(m + 1, i).mul(s)?;
                    let what = format!("d{i} s{j} in degree {m}");
                    if i == j || i == j + 1 {
                        eq(&lhs, &id, what)?;
                    } else if i < j {
                        let rhs = self.degeneracy(m - 1, j - 1).mul(self.face(m, i))?;
                        eq(&lhs, &rhs, what)?;
                    } else {
                        let rhs = self.degeneracy(m - 1, j).mul(self.face(m, i - 1))?;
                        eq(&lhs, &rhs, what)?;
                    }
                }
                if m + 1 < top {
                    for i in 0..=j {
                        let lhs = self.degeneracy(m + 1, i).mul(s)?;
                        let rhs = self.degeneracy(m + 1, j + 1).mul(self.degeneracy(m, i))?;
                        eq(&lhs, &rhs, format!("s{i} s{j} in degree {m}"))?;
                    }
                }
            }
        }
        Ok(())
    }

    fn gen_index(&self, m: usize) -> HashMap<(bool, u64), usize> {
        let mut out = HashMap::new();
        for (k, g) in self.gens[m].iter().enumerate() {
            if g.index == 0 {
                out.insert((g.top, g.mask), k);
            }
        }
        out
    }

    fn full_mask(m: usize) -> u64 {
        ((1u64 << (m + 1)) - 1) & !1
    }

    /// Number of generators whose jump set lies in a fixed k-subset of {1..m}.
    fn count_within(&self, k: usize) -> u128 {
        let (n, a, b, _) = self.shape;
        a as u128 * binom(k as u64, n as u64 + 1) + b as u128 * binom(k as u64, n as u64)
    }
}

/// K(Z^r[n]) truncated at degree `truncation`.
pub fn kan_of_shift(r: usize, n: usize, truncation: usize) -> Result<SimplicialModule, DkError> {
    kan_of_two_term(&IntMatrix::zeros(r, 0), n, truncation)
}

/// K of the complex f: Z^a → Z^b placed in degrees n+1 and n.
pub fn kan_of_two_term(f: &IntMatrix, n: usize, truncation: usize) -> Result<SimplicialModule, DkError> {
    if truncation > 62 {
        return Err(DkError::TooDeep(truncation));
    }
    let (a, b) = (f.cols(), f.rows());
    let gens: Vec<Vec<Generator>> = (0..=truncation)
        .map(|m| {
            let mut g = Vec::new();
            for mask in masks(m, n + 1) {
                g.extend((0..a).map(|index| Generator { mask, top: true, index }));
            }
            for mask in masks(m, n) {
                g.extend((0..b).map(|index| Generator { mask, top: false, index }));
            }
            g
        })
        .collect();
    let col_nnz = (0..a).map(|c| f.column(c).len()).max().unwrap_or(0);
    let mut sm = SimplicialModule {
        truncation,
        gens,
        faces: Vec::new(),
        degens: Vec::new(),
        shape: (n, a, b, col_nnz.max(1)),
    };
    let index: Vec<_> = (0..=truncation).map(|m| sm.gen_index(m)).collect();
    let lookup = |m: usize, top: bool, mask: u64, k: usize| index[m][&(top, mask)] + k;
    let mut faces = vec![Vec::new()];
    for m in 1..=truncation {
        let mut fm = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let mut cols = Vec::with_capacity(sm.gens[m].len());
            for g in &sm.gens[m] {
                let col = match face_mask(g.mask, m, i) {
                    FaceImage::Same(j) => vec![(lookup(m - 1, g.top, j, g.index), BigInt::one())],
                    FaceImage::MissTop(j) if g.top => f
                        .column(g.index)
                        .iter()
                        .map(|(k, v)| (lookup(m - 1, false, j, *k), v.clone()))
                        .collect(),
                    _ => Vec::new(),
                };
                cols.push(col);
            }
            fm.push(IntMatrix::from_columns(sm.gens[m - 1].len(), cols)?);
        }
        faces.push(fm);
    }
    let mut degens = Vec::new();
    for m in 0..truncation {
        let mut sm_m = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let cols = sm.gens[m]
                .iter()
                .map(|g| vec![(lookup(m + 1, g.top, degeneracy_mask(g.mask, i), g.index), BigInt::one())])
                .collect();
            sm_m.push(IntMatrix::from_columns(sm.gens[m + 1].len(), cols)?);
        }
        degens.push(sm_m);
    }
    sm.faces = faces;
    sm.degens = degens;
    Ok(sm)
}

/// Predicted term ranks of F applied to `sm` in the given degrees.
/// Normalized ranks follow by inclusion-exclusion over the jump positions.
fn predicted_ranks(sm: &SimplicialModule, core: &Core, degrees: &[usize], mode: ChainMode) -> Vec<(i64, u128)> {
    degrees
        .iter()
        .map(|&m| {
            let r = match mode {
                ChainMode::Moore => core_count(core, sm.count_within(m)),
                ChainMode::Normalized => {
                    let mut acc: i128 = 0;
                    for k in 0..=m {
                        let term = (binom(m as u64, k as u64) as i128)
                            .saturating_mul(core_count(core, sm.count_within(k)).min(i128::MAX as u128) as i128);
                        acc = if (m - k) % 2 == 0 { acc.saturating_add(term) } else { acc.saturating_sub(term) };
                    }
                    acc.max(0) as u128
                }
            };
            (m as i64, r)
        })
        .collect()
}

fn core_weight(core: &Core) -> u32 {
    match core {
        Core::Gamma(d) | Core::Lambda(d) | Core::Sym(d) | Core::Trunc(d, _) => *d,
        Core::Tensor(fs) => fs.iter().map(core_weight).sum(),
        Core::Sum(fs) => fs.iter().map(core_weight).max().unwrap_or(0),
    }
}

/// Per-degree generator data used while enumerating and differentiating.
struct Level<'a> {
    sm: &'a SimplicialModule,
    m: usize,
    full: u64,
    /// most jump positions a single generator covers
    width: u32,
}

impl Level<'_> {
    fn mask(&self, g: u32) -> u64 {
        self.sm.gens[self.m][g as usize].mask
    }

    fn elem_mask(&self, e: &Elem) -> u64 {
        match e {
            Elem::Mono(m) => m.iter().fold(0, |acc, &(g, _)| acc | self.mask(g)),
            Elem::Tensor(parts) => parts.iter().fold(0, |acc, x| acc | self.elem_mask(x)),
            Elem::Sum(_, x) => self.elem_mask(x),
        }
    }

    fn reachable(&self, mask: u64, weight_left: u32) -> bool {
        (self.full & !mask).count_ones() <= weight_left * self.width
    }
}

/// Basis monomials of F(K_m) whose jump sets jointly cover {1..m}; these
/// span a complement of the degenerate subcomplex.
fn nondegenerate_basis(core: &Core, lvl: &Level) -> Vec<Elem> {
    let mut out = Vec::new();
    enum_cover(core, lvl, 0, 0, &mut |e, _| out.push(e));
    out
}

fn enum_cover(core: &Core, lvl: &Level, start: u64, later: u32, emit: &mut dyn FnMut(Elem, u64)) {
    match core {
        Core::Gamma(d) | Core::Sym(d) => enum_leaf(lvl, *d, *d, start, later, emit),
        Core::Lambda(d) => enum_leaf(lvl, *d, 1, start, later, emit),
        Core::Trunc(d, p) => enum_leaf(lvl, *d, (*p - 1).min(*d as u64) as u32, start, later, emit),
        Core::Sum(fs) => {
            for (k, f) in fs.iter().enumerate() {
                enum_cover(f, lvl, start, later, &mut |e, m| emit(Elem::Sum(k, Box::new(e)), m));
            }
        }
        Core::Tensor(fs) => {
            let mut prefix = Vec::with_capacity(fs.len());
            enum_tensor(fs, lvl, start, later, &mut prefix, emit);
        }
    }
}

fn enum_tensor(
    fs: &[Core],
    lvl: &Level,
    mask: u64,
    later: u32,
    prefix: &mut Vec<Elem>,
    emit: &mut dyn FnMut(Elem, u64),
) {
    let Some((first, rest)) = fs.split_first() else {
        if lvl.reachable(mask, later) {
            emit(Elem::Tensor(prefix.clone()), mask);
        }
        return;
    };
    let rest_weight: u32 = rest.iter().map(core_weight).sum::<u32>() + later;
    let mut items = Vec::new();
    enum_cover(first, lvl, mask, rest_weight, &mut |e, m| items.push((e, m)));
    for (e, m) in items {
        prefix.push(e);
        enum_tensor(rest, lvl, m, later, prefix, emit);
        prefix.pop();
    }
}

/// Monomials of weight d with exponents ≤ cap that, together with `start`,
/// leave at most `later · width` positions uncovered.
fn enum_leaf(lvl: &Level, d: u32, cap: u32, start: u64, later: u32, emit: &mut dyn FnMut(Elem, u64)) {
    let ngen = lvl.sm.gens[lvl.m].len() as u32;
    let mut cur: Vec<(u32, u32)> = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        lvl: &Level,
        g0: u32,
        ngen: u32,
        left: u32,
        cap: u32,
        mask: u64,
        later: u32,
        cur: &mut Vec<(u32, u32)>,
        emit: &mut dyn FnMut(Elem, u64),
    ) {
        if left == 0 {
            if lvl.reachable(mask, later) {
                emit(Elem::Mono(cur.clone()), mask);
            }
            return;
        }
        if !lvl.reachable(mask, left + later) {
            return;
        }
        for g in g0..ngen {
            let gm = mask | lvl.mask(g);
            for e in 1..=left.min(cap) {
                cur.push((g, e));
                rec(lvl, g + 1, ngen, left - e, cap, gm, later, cur, emit);
                cur.pop();
            }
        }
    }
    rec(lvl, 0, ngen, d, cap, start, later, &mut cur, emit);
}

fn check_budget(predicted: Vec<(i64, u128)>, sm: &SimplicialModule, core: &Core, cfg: &EngineConfig) -> Result<(), DkError> {
    let w = core_weight(core);
    let fanout = (sm.shape.3 as u128).saturating_pow(w);
    let nnz: u128 = predicted
        .iter()
        .map(|&(m, r)| r.saturating_mul(m as u128 + 1).saturating_mul(fanout))
        .fold(0, u128::saturating_add);
    let too_big = predicted.iter().any(|&(_, r)| r > cfg.rank_cap as u128);
    if too_big || nnz > cfg.nnz_cap {
        return Err(DkError::Budget { predicted, rank_cap: cfg.rank_cap, nnz, nnz_cap: cfg.nnz_cap });
    }
    Ok(())
}

/// Chain complex of F applied to `sm` on degrees lo..=hi. The differential
/// out of `lo` is not represented, so homology is valid on lo+1..=hi
/// (and at lo when lo = 0).
pub fn chains(
    sm: &SimplicialModule,
    f: &FunctorExpr,
    lo: usize,
    hi: usize,
    cfg: &EngineConfig,
) -> Result<ChainComplex, DkError> {
    let (core, p) = f.compile()?;
    let hi = hi.min(sm.truncation);
    let degrees: Vec<usize> = (lo..=hi).collect();
    check_budget(predicted_ranks(sm, &core, &degrees, cfg.mode), sm, &core, cfg)?;
    let width = (sm.shape.0 + usize::from(sm.shape.1 > 0)) as u32;
    let bases: Vec<Basis> = degrees
        .iter()
        .map(|&m| {
            let elems = match cfg.mode {
                ChainMode::Moore => core_basis(&core, sm.rank(m)),
                ChainMode::Normalized => {
                    let lvl = Level { sm, m, full: SimplicialModule::full_mask(m), width };
                    nondegenerate_basis(&core, &lvl)
                }
            };
            Basis::new(elems)
        })
        .collect();
    if cfg.mode == ChainMode::Normalized {
        let pred = predicted_ranks(sm, &core, &degrees, ChainMode::Normalized);
        for (b, (m, r)) in bases.iter().zip(pred) {
            if b.len() as u128 != r {
                return Err(DkError::Certification { degree: m as usize, found: b.len(), predicted: r });
            }
        }
    }
    let mut diffs = vec![IntMatrix::zeros(0, bases[0].len())];
    for k in 1..bases.len() {
        let m = lo + k;
        let src = &bases[k];
        let dst = &bases[k - 1];
        let images: Vec<&[Vec<(usize, BigInt)>]> = (0..=m).map(|i| sm.face(m, i).columns()).collect();
        let lvl = Level { sm, m: m - 1, full: SimplicialModule::full_mask(m - 1), width };
        let modulus = p.map(BigInt::from);
        let cols = cfg.exec.map(src.elems.clone(), |e| {
            let mut acc: HashMap<usize, BigInt> = HashMap::new();
            for (i, img) in images.iter().enumerate() {
                for (y, c) in apply_core(&core, &e, img) {
                    if cfg.mode == ChainMode::Normalized && lvl.elem_mask(&y) != lvl.full {
                        continue;
                    }
                    let row = dst.index_of(&y).expect("face image outside the chain basis");
                    let v = acc.entry(row).or_insert_with(BigInt::zero);
                    if i % 2 == 0 {
                        *v += c;
                    } else {
                        *v -= c;
                    }
                }
            }
            let mut col: Vec<(usize, BigInt)> = acc
                .into_iter()
                .map(|(r, v)| match &modulus {
                    Some(q) => (r, v.mod_floor(q)),
                    None => (r, v),
                })
                .filter(|(_, v)| !v.is_zero())
                .collect();
            col.sort_by_key(|(r, _)| *r);
            col
        });
        let mut d = IntMatrix::from_columns(dst.len(), cols)?;
        if let Some(q) = p {
            d = d.reduce_mod(q);
        }
        diffs.push(d);
    }
    if let Some(q) = p {
        diffs[0] = diffs[0].reduce_mod(q);
    }
    let ranks = bases.iter().map(Basis::len).collect();
    Ok(ChainComplex::new(lo as i64, ranks, diffs)?)
}

/// Chain complex of F applied degreewise to `sm`, on all degrees up to the truncation.
pub fn moore_or_normalized(sm: &SimplicialModule, f: &FunctorExpr, mode: ChainMode) -> Result<ChainComplex, DkError> {
    let cfg = EngineConfig { mode, ..EngineConfig::default() };
    chains(sm, f, 0, sm.truncation, &cfg)
}

fn default_truncation(f: &FunctorExpr, top_degree: usize, cfg: &EngineConfig) -> Result<usize, DkError> {
    let w = f.max_weight()? as usize;
    Ok(cfg.truncation.unwrap_or(top_degree * w + 1))
}

/// L_iF(Z^r, n).
pub fn derived_functor(f: &FunctorExpr, r: usize, n: usize, i: usize) -> Result<AbGroupType, DkError> {
    derived_functor_with(f, r, n, i, &EngineConfig::default())
}

pub fn derived_functor_with(
    f: &FunctorExpr,
    r: usize,
    n: usize,
    i: usize,
    cfg: &EngineConfig,
) -> Result<AbGroupType, DkError> {
    let top = default_truncation(f, n, cfg)?;
    if i > top {
        return Ok(AbGroupType::zero());
    }
    let sm = kan_of_shift(r, n, (i + 1).min(top))?;
    homology_window(&sm, f, i, cfg)
}

fn homology_window(sm: &SimplicialModule, f: &FunctorExpr, i: usize, cfg: &EngineConfig) -> Result<AbGroupType, DkError> {
    let lo = i.saturating_sub(1);
    let c = chains(sm, f, lo, i + 1, cfg)?;
    Ok(c.homology_at(i as i64)?)
}

/// L_*F(Z^r, n) in every degree.
pub fn derived_functor_graded(f: &FunctorExpr, r: usize, n: usize, cfg: &EngineConfig) -> Result<GradedGroup, DkError> {
    let top = default_truncation(f, n, cfg)?;
    let sm = kan_of_shift(r, n, top)?;
    let c = chains(&sm, f, 0, top, cfg)?;
    let mut h = c.homology_with(cfg.exec)?;
    // the top term only feeds the differential into degree top-1
    h.set(top as i64, AbGroupType::zero());
    Ok(h)
}

/// L_iF of the complex f: Z^a → Z^b in degrees n+1, n.
pub fn derived_of_complex(f: &FunctorExpr, m: &IntMatrix, n: usize, i: usize) -> Result<AbGroupType, DkError> {
    derived_of_complex_with(f, m, n, i, &EngineConfig::default())
}

pub fn derived_of_complex_with(
    f: &FunctorExpr,
    m: &IntMatrix,
    n: usize,
    i: usize,
    cfg: &EngineConfig,
) -> Result<AbGroupType, DkError> {
    let top = default_truncation(f, n + 1, cfg)?;
    if i > top {
        return Ok(AbGroupType::zero());
    }
    let sm = kan_of_two_term(m, n, (i + 1).min(top))?;
    homology_window(&sm, f, i, cfg)
}

/// L_*F of a two-term complex in every degree.
pub fn derived_of_complex_graded(
    f: &FunctorExpr,
    m: &IntMatrix,
    n: usize,
    cfg: &EngineConfig,
) -> Result<GradedGroup, DkError> {
    let top = default_truncation(f, n + 1, cfg)?;
    let sm = kan_of_two_term(m, n, top)?;
    let c = chains(&sm, f, 0, top, cfg)?;
    let mut h = c.homology_with(cfg.exec)?;
    h.set(top as i64, AbGroupType::zero());
    Ok(h)
}

/// F_p-dimensions of H_i(F(K(Z^r[n])) ⊗ F_p), labelled as such.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModPDims {
    pub p: u64,
    pub dims: Vec<(i64, usize)>,
}

/// Mod-p mode: ranks of the integral differentials mod p only.
pub fn derived_dims_mod_p(f: &FunctorExpr, r: usize, n: usize, p: u64, cfg: &EngineConfig) -> Result<ModPDims, DkError> {
    let top = default_truncation(f, n, cfg)?;
    let sm = kan_of_shift(r, n, top)?;
    let c = chains(&sm, f, 0, top, cfg)?;
    let mut dims = c.homology_dims_mod(p)?;
    dims.retain(|&(i, d)| d > 0 && (i as usize) < top);
    Ok(ModPDims { p, dims })
}

/// Predicted normalized (or Moore) term ranks of F on K(Z^r[n]) up to `truncation`.
pub fn predict_ranks(f: &FunctorExpr, r: usize, n: usize, truncation: usize, mode: ChainMode) -> Result<Vec<(i64, u128)>, DkError> {
    let (core, _) = f.compile()?;
    let sm = SimplicialModule {
        truncation,
        gens: Vec::new(),
        faces: Vec::new(),
        degens: Vec::new(),
        shape: (n, 0, r, 1),
    };
    let degrees: Vec<usize> = (0..=truncation).collect();
    Ok(predicted_ranks(&sm, &core, &degrees, mode))
}
