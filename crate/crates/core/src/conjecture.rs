//! The conjectured description of gr L_*Γ^d(A, n) for free A as a sum of
//! derived exterior or divided powers of A ⊗^L (Z/p)^{⊗o}, evaluated as graded
//! orders and compared with the closed forms.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combi::{binom, compositions, ipow, primes_up_to};
use crate::closedform::{integral_gamma, integral_n1, ClosedFormError};
use crate::doldkan::{derived_of_complex_graded, DkError, EngineConfig};
use crate::exactlin::{is_prime, AbGroupType, ChainComplex, GradedGroup, IntMatrix, LinError};
use crate::polyfunc::{nat_map, FuncError, FunctorExpr, NatContext};

pub use crate::cartan::derived_tensor_homology;

#[derive(Debug, Error)]
pub enum ConjError {
    #[error("invalid parameters: {0}")]
    BadArgs(String),
    #[error(transparent)]
    Engine(#[from] DkError),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
}

type Result<T> = std::result::Result<T, ConjError>;

/// Exterior powers for odd n, divided powers for even n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Odd,
    Even,
}

/// How the d_0 coefficient of the shift is read for odd n = 2m+1.
///
/// `Consistent` uses n·d_0, which puts LΛ^{d_0}(A) in the same place as the
/// diagonal term. `Literal` evaluates ℓ(d_0, (d_α), m+1; p) as written, giving
/// (2m+3)·d_0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftReading {
    #[default]
    Consistent,
    Literal,
}

/// One summand E(d_0, (d_α), M; p)[shift] or D(d_0, (d_α), M; p)[shift].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjTerm {
    pub p: u64,
    /// length of the padded sequences in the family
    pub len: usize,
    pub d0: u32,
    /// (t_1 ≥ ... ≥ t_len ≥ 0 with t_1 > 0, d_α)
    pub family: Vec<(Vec<u32>, u32)>,
    pub parity: Parity,
    pub shift: i64,
}

impl ConjTerm {
    pub fn weight(&self) -> u64 {
        self.d0 as u64 + self.family.iter().map(|(a, k)| *k as u64 * ipow(self.p, a[0])).sum::<u64>()
    }
}

/// number of distinct positive entries
fn o_of(alpha: &[u32]) -> usize {
    let mut v: Vec<u32> = alpha.iter().copied().filter(|&t| t > 0).collect();
    v.dedup();
    v.len()
}

fn ell_alpha(alpha: &[u32], p: u64) -> i64 {
    if alpha.len() == 1 {
        1
    } else {
        1 + 2 * alpha[1..].iter().map(|&t| ipow(p, t) as i64).sum::<i64>()
    }
}

/// Padded sequences of length `len` with p^{t_1} ≤ d.
fn padded_sequences(p: u64, len: usize, d: u64) -> Vec<Vec<u32>> {
    fn rec(len: usize, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for t in (0..=cap).rev() {
            cur.push(t);
            rec(len, t, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut t1 = 1u32;
    while ipow(p, t1) <= d {
        let mut cur = vec![t1];
        rec(len, t1, &mut cur, &mut out);
        t1 += 1;
    }
    out
}

/// All summands of weight d for L_*Γ^d(A, n), n ≥ 1.
pub fn conjecture_terms(d: u32, n: usize, reading: ShiftReading) -> Vec<ConjTerm> {
    let (parity, len) = if n % 2 == 1 { (Parity::Odd, n / 2 + 1) } else { (Parity::Even, n / 2) };
    let mut out = Vec::new();
    for p in primes_up_to(d as u64) {
        let seqs = padded_sequences(p, len, d as u64);
        let weights: Vec<u64> = seqs.iter().map(|a| ipow(p, a[0])).collect();
        let mut counts = vec![0u32; seqs.len()];
        fn rec(
            idx: usize,
            left: u64,
            weights: &[u64],
            counts: &mut Vec<u32>,
            emit: &mut dyn FnMut(&[u32], u64),
        ) {
            if idx == weights.len() {
                emit(counts, left);
                return;
            }
            let mut k = 0;
            while k as u64 * weights[idx] <= left {
                counts[idx] = k;
                rec(idx + 1, left - k as u64 * weights[idx], weights, counts, emit);
                k += 1;
            }
            counts[idx] = 0;
        }
        let mut emit = |counts: &[u32], d0: u64| {
            if counts.iter().all(|&k| k == 0) {
                return;
            }
            let family: Vec<(Vec<u32>, u32)> =
                seqs.iter().zip(counts).filter(|(_, &k)| k > 0).map(|(a, &k)| (a.clone(), k)).collect();
            let d0 = d0 as u32;
            let tail: i64 = family.iter().map(|(a, k)| ell_alpha(a, p) * *k as i64).sum();
            let shift = match parity {
                Parity::Odd => {
                    let c0 = match reading {
                        ShiftReading::Consistent => n as i64,
                        ShiftReading::Literal => 2 * len as i64 + 1,
                    };
                    c0 * d0 as i64 + tail
                }
                Parity::Even => {
                    let e = family.iter().map(|(_, k)| *k as i64).sum::<i64>() - d0 as i64;
                    (2 * len as i64 + 1) * d0 as i64 + tail + e
                }
            };
            out.push(ConjTerm { p, len, d0, family, parity, shift });
        };
        rec(0, d as u64, &weights, &mut counts, &mut emit);
    }
    out
}

/// C^k(A)[−k] for A = Z^r: Γ^i(A) ⊗ Λ^{k−i}(A) in degree i, differential p·∂_Kos.
pub fn small_model_complex(k: u32, p: u64, r: usize) -> Result<ChainComplex> {
    if k == 0 {
        return Ok(ChainComplex::zero(0, vec![1]));
    }
    let pk = BigInt::from(p);
    let mut diffs = Vec::with_capacity(k as usize + 1);
    let mut ranks = Vec::with_capacity(k as usize + 1);
    for i in 1..=k {
        let ctx = NatContext { r, p: None, a: i, b: k - i, s: 0 };
        let m = nat_map("koszul_step", &ctx)?.scale(&pk);
        if i == 1 {
            ranks.push(m.rows());
            diffs.push(IntMatrix::zeros(0, m.rows()));
        }
        ranks.push(m.cols());
        diffs.push(m);
    }
    Ok(ChainComplex::new(0, ranks, diffs)?)
}

/// π_* LΛ^k(A/p) for A = Z^r, from the small model.
pub fn lambda_of_modp(k: u32, p: u64, r: usize) -> Result<GradedGroup> {
    check_prime(p)?;
    Ok(small_model_complex(k, p, r)?.homology()?)
}

/// π_* LΓ^k(A/p) for A = Z^r, by Dold-Kan on Z^r --p--> Z^r.
pub fn gamma_of_modp(k: u32, p: u64, r: usize) -> Result<GradedGroup> {
    check_prime(p)?;
    piece(Parity::Even, k, p, r, 0)
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(ConjError::BadArgs(format!("{p} is not a prime")))
    }
}

fn unit() -> GradedGroup {
    [(0, AbGroupType::free(1))].into_iter().collect()
}

type PieceKey = (Parity, u32, u64, usize, usize);

fn piece_cache() -> &'static Mutex<HashMap<PieceKey, GradedGroup>> {
    static CACHE: OnceLock<Mutex<HashMap<PieceKey, GradedGroup>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// LΛ^k or LΓ^k of (Z^rank / p)[shift].
fn piece(parity: Parity, k: u32, p: u64, rank: usize, shift: usize) -> Result<GradedGroup> {
    if k == 0 {
        return Ok(unit());
    }
    if k == 1 {
        return Ok([(shift as i64, AbGroupType::elementary(p, rank))].into_iter().collect());
    }
    let key = (parity, k, p, rank, shift);
    if let Some(g) = piece_cache().lock().expect("cache lock").get(&key) {
        return Ok(g.clone());
    }
    let g = match (parity, shift) {
        (Parity::Odd, 0) => small_model_complex(k, p, rank)?.homology()?,
        _ => {
            let f = match parity {
                Parity::Odd => FunctorExpr::lambda(k),
                Parity::Even => FunctorExpr::gamma(k),
            };
            let m = IntMatrix::scalar(rank, p as i64);
            derived_of_complex_graded(&f, &m, shift, &EngineConfig::default())?
        }
    };
    piece_cache().lock().expect("cache lock").insert(key, g.clone());
    Ok(g)
}

/// LΛ^k or LΓ^k of A ⊗^L (Z/p)^{⊗o}, using A ⊗^L (Z/p)^{⊗o} ≃ ⊕_i (A/p)^{C(o−1,i)}[i]
/// for free A and the exponential property.
fn power_of_tensor(parity: Parity, k: u32, p: u64, r: usize, o: usize) -> Result<GradedGroup> {
    let mut total = GradedGroup::new();
    for parts in compositions(k, o) {
        let mut g = unit();
        for (i, &a) in parts.iter().enumerate() {
            let rank = r * binom(o as u64 - 1, i as u64) as usize;
            g = g.derived_tensor(&piece(parity, a, p, rank, i)?);
        }
        total = total.direct_sum(&g);
    }
    Ok(total)
}

/// Homology of one summand, including its shift.
pub fn term_homology(t: &ConjTerm, r: usize) -> Result<GradedGroup> {
    let base = match t.parity {
        Parity::Odd => binom(r as u64, t.d0 as u64),
        Parity::Even => gamma_rank(r, t.d0),
    };
    let mut g: GradedGroup = [(0, AbGroupType::free(base as usize))].into_iter().collect();
    for (alpha, k) in &t.family {
        g = g.derived_tensor(&power_of_tensor(t.parity, *k, t.p, r, o_of(alpha))?);
    }
    Ok(g.shift(t.shift))
}

fn gamma_rank(r: usize, k: u32) -> u128 {
    if k == 0 {
        1
    } else {
        binom(r as u64 + k as u64 - 1, k as u64)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Prediction {
    pub d: u32,
    pub n: usize,
    pub r: usize,
    pub terms: Vec<(ConjTerm, GradedGroup)>,
    /// LΛ^d(A)[nd] or LΓ^d(A)[nd]
    pub diagonal: GradedGroup,
    pub total: GradedGroup,
}

impl Prediction {
    pub fn free_rank(&self, s: i64) -> usize {
        self.total.get(s).free_rank
    }

    /// log_p of the order of the p-primary part in degree s
    pub fn p_log_order(&self, p: u64, s: i64) -> u32 {
        p_log_order(&self.total.get(s), p)
    }
}

/// log_p of the order of the p-primary part of g.
pub fn p_log_order(g: &AbGroupType, p: u64) -> u32 {
    g.torsion
        .iter()
        .map(|&t| {
            let (mut t, mut e) = (t, 0);
            while t % p == 0 {
                t /= p;
                e += 1;
            }
            e
        })
        .sum()
}

pub fn conjecture_rhs(d: u32, n: usize, r: usize) -> Result<Prediction> {
    conjecture_rhs_with(d, n, r, ShiftReading::Consistent)
}

pub fn conjecture_rhs_with(d: u32, n: usize, r: usize, reading: ShiftReading) -> Result<Prediction> {
    if d == 0 || d > 6 || n == 0 {
        return Err(ConjError::BadArgs(format!("need 1 ≤ d ≤ 6 and n ≥ 1, got d={d}, n={n}")));
    }
    let top = (n * d as usize) as i64;
    let diag_rank = if n % 2 == 1 { binom(r as u64, d as u64) } else { gamma_rank(r, d) };
    let diagonal: GradedGroup = [(top, AbGroupType::free(diag_rank as usize))].into_iter().collect();
    let mut total = diagonal.clone();
    let mut terms = Vec::new();
    for t in conjecture_terms(d, n, reading) {
        debug_assert_eq!(t.weight(), d as u64);
        let h = term_homology(&t, r)?;
        total = total.direct_sum(&h);
        terms.push((t, h));
    }
    Ok(Prediction { d, n, r, terms, diagonal, total })
}

/// One compared quantity: the free rank (p = None) or log_p of a p-primary order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCheck {
    pub n: usize,
    pub s: i64,
    pub p: Option<u64>,
    pub predicted: u32,
    pub actual: u32,
}

impl CellCheck {
    pub fn pass(&self) -> bool {
        self.predicted == self.actual
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConjReport {
    pub d: u32,
    pub r: usize,
    pub n_max: usize,
    pub cells: Vec<CellCheck>,
}

impl ConjReport {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(CellCheck::pass)
    }

    pub fn mismatches(&self) -> Vec<&CellCheck> {
        self.cells.iter().filter(|c| !c.pass()).collect()
    }
}

fn compare(n: usize, predicted: &GradedGroup, actual: &GradedGroup, cells: &mut Vec<CellCheck>) {
    let lo = predicted.min_degree().into_iter().chain(actual.min_degree()).min().unwrap_or(0);
    let hi = predicted.max_degree().into_iter().chain(actual.max_degree()).max().unwrap_or(0);
    for s in lo..=hi {
        let (a, b) = (predicted.get(s), actual.get(s));
        cells.push(CellCheck { n, s, p: None, predicted: a.free_rank as u32, actual: b.free_rank as u32 });
        let mut primes = a.primes();
        primes.extend(b.primes());
        primes.sort_unstable();
        primes.dedup();
        for p in primes {
            cells.push(CellCheck { n, s, p: Some(p), predicted: p_log_order(&a, p), actual: p_log_order(&b, p) });
        }
    }
}

/// Orders of the conjectured graded pieces against the closed forms, n = 1..=n_max.
pub fn conjecture_check(d: u32, n_max: usize, r: usize) -> Result<ConjReport> {
    conjecture_check_with(d, n_max, r, ShiftReading::Consistent)
}

pub fn conjecture_check_with(d: u32, n_max: usize, r: usize, reading: ShiftReading) -> Result<ConjReport> {
    if d == 0 || d > 4 {
        return Err(ConjError::BadArgs(format!("closed forms exist for 1 ≤ d ≤ 4, got {d}")));
    }
    let mut cells = Vec::new();
    for n in 1..=n_max {
        let pred = conjecture_rhs_with(d, n, r, reading)?;
        compare(n, &pred.total, &integral_gamma(d, n, r)?, &mut cells);
    }
    Ok(ConjReport { d, r, n_max, cells })
}

/// The n = 1 complex ⊕ (Λ^{k_0}(A)[k_0], 0) ⊗ C^{k_1}(A) ⊗ ... over Σ k_i p^i = d,
/// returned as its list of summands.
pub fn n1_lemma_complexes(d: u32, p: u64, r: usize) -> Result<Vec<(Vec<u32>, ChainComplex)>> {
    check_prime(p)?;
    let mut levels = 0u32;
    while ipow(p, levels + 1) <= d as u64 {
        levels += 1;
    }
    let mut out = Vec::new();
    fn rec(i: u32, levels: u32, p: u64, left: u64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i > levels {
            let mut k = vec![left as u32];
            k.extend(cur.iter());
            out.push(k);
            return;
        }
        let w = ipow(p, i);
        for k in 0..=left / w {
            cur.push(k as u32);
            rec(i + 1, levels, p, left - k * w, cur, out);
            cur.pop();
        }
    }
    let mut seqs = Vec::new();
    rec(1, levels, p, d as u64, &mut Vec::new(), &mut seqs);
    for ks in seqs {
        let lam = binom(r as u64, ks[0] as u64) as usize;
        if lam == 0 {
            continue;
        }
        let mut c = ChainComplex::zero(ks[0] as i64, vec![lam]);
        for &k in &ks[1..] {
            if k > 0 {
                let ck = small_model_complex(k, p, r)?.shift(k as i64);
                c = c.tensor(&ck, true)?;
            }
        }
        out.push((ks, c));
    }
    Ok(out)
}

/// Homology of the n = 1 complex at the prime p.
pub fn n1_lemma_homology(d: u32, p: u64, r: usize) -> Result<GradedGroup> {
    let mut g = GradedGroup::new();
    for (_, c) in n1_lemma_complexes(d, p, r)? {
        g = g.direct_sum(&c.homology()?);
    }
    Ok(g)
}

/// For every prime p ≤ d and every degree: log_p orders from the conjecture,
/// the n = 1 complex and the closed form integral_n1.
pub fn n1_orders(d: u32, r: usize) -> Result<BTreeMap<(u64, i64), [u32; 3]>> {
    let pred = conjecture_rhs(d, 1, r)?;
    let closed = integral_n1(d, r)?;
    let mut out = BTreeMap::new();
    for p in primes_up_to(d as u64) {
        let lemma = n1_lemma_homology(d, p, r)?;
        for s in 0..=(2 * d as i64 + 1) {
            let row = [pred.p_log_order(p, s), p_log_order(&lemma.get(s), p), p_log_order(&closed.get(s), p)];
            if row != [0, 0, 0] {
                out.insert((p, s), row);
            }
        }
    }
    Ok(out)
}
