//! Explicit complexes over F_p: the Koszul and skew-Koszul weight complexes,
//! their cycles, Φ^d, hook Weyl functors, σ_(1,n), the resolution of the
//! truncated polynomial algebra, and the maximal and principal filtrations of Γ.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combi::{binom, binom_i, ipow, prime_power, primes_up_to};
use crate::exactlin::{
    fp_rank, is_prime, kernel_mod_p, smith_normal_form, AbGroupType, ChainComplex, IntMatrix, LinError,
};
use crate::polyfunc::{
    core_basis, eval_dim, exponent_monos, koszul_image, mono, mono_mul, nat_map, skew_koszul_image,
    Basis, Core, Elem, FuncError, FunctorExpr, Mono, NatContext,
};

#[derive(Debug, Error)]
pub enum KoszulError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid parameters: {0}")]
    BadArgs(String),
    #[error("descriptions of {what} disagree: {values:?}")]
    Inconsistent { what: String, values: Vec<String> },
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// Which differential graded algebra a weight complex was cut from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Origin {
    /// Λ(V[1]) ⊗ ⊗_{s≥1} Γ(V^(s)[2]) ⊗ Λ(V^(s)[1]); generators listed as
    /// `[a, k_1, l_1, k_2, l_2, ..]`.
    Koszul,
    /// ⊗_{s≥0} Γ(V^(s)[1]) in characteristic 2; generators `[k_0, k_1, ..]`.
    SkewKoszul,
    /// S(V) ⊗ Λ(V^(1)[1]); generators `[c, e]`.
    QResolution,
}

/// One direct summand of a weight complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub degree: i64,
    pub generators: Vec<u32>,
    pub label: FunctorExpr,
    pub dim: usize,
}

/// Weight-d component of one of the algebras above, as an F_p complex.
#[derive(Clone, Debug)]
pub struct WeightComplex {
    pub complex: ChainComplex,
    pub weight: u32,
    pub p: u64,
    pub r: usize,
    pub origin: Origin,
    pub terms: Vec<Term>,
}

impl WeightComplex {
    pub fn terms_in_degree(&self, i: i64) -> impl Iterator<Item = &Term> + '_ {
        self.terms.iter().filter(move |t| t.degree == i)
    }

    /// F_p-dimension of the homology in each degree.
    pub fn homology_dims(&self) -> Result<Vec<(i64, usize)>, KoszulError> {
        Ok(self.complex.homology_dims_mod(self.p)?)
    }
}

struct Piece {
    key: Vec<u32>,
    degree: i64,
    core: Core,
    label: FunctorExpr,
}

type Image = Vec<(Vec<u32>, Elem, BigInt)>;

fn label_of(p: u64, factors: Vec<FunctorExpr>) -> FunctorExpr {
    let inner = if factors.len() == 1 {
        factors.into_iter().next().expect("one factor")
    } else {
        FunctorExpr::tensor(factors)
    };
    FunctorExpr::mod_p(p, inner)
}

fn twisted(s: u32, f: FunctorExpr) -> FunctorExpr {
    if s == 0 {
        f
    } else {
        FunctorExpr::twist(s, f)
    }
}

/// Lays out the pieces degree by degree and fills in the differential.
fn assemble(
    p: u64,
    r: usize,
    hi: i64,
    mut pieces: Vec<Piece>,
    diff: impl Fn(&[u32], &[Elem]) -> Image,
) -> Result<(ChainComplex, Vec<Term>), KoszulError> {
    pieces.sort_by(|a, b| (a.degree, &a.key).cmp(&(b.degree, &b.key)));
    let mut ranks = vec![0usize; hi as usize + 1];
    let mut place: HashMap<Vec<u32>, (i64, usize, Basis)> = HashMap::new();
    let mut terms = Vec::with_capacity(pieces.len());
    for pc in &pieces {
        let basis = Basis::new(core_basis(&pc.core, r));
        let off = ranks[pc.degree as usize];
        ranks[pc.degree as usize] += basis.len();
        terms.push(Term { degree: pc.degree, generators: pc.key.clone(), label: pc.label.clone(), dim: basis.len() });
        place.insert(pc.key.clone(), (pc.degree, off, basis));
    }
    let mut cols: Vec<Vec<Vec<(usize, BigInt)>>> = vec![Vec::new(); hi as usize + 1];
    for pc in &pieces {
        let (deg, _, basis) = &place[&pc.key];
        for e in &basis.elems {
            let Elem::Tensor(parts) = e else { unreachable!("weight complex terms are tensors") };
            let mut col = Vec::new();
            for (k2, e2, c) in diff(&pc.key, parts) {
                let (d2, off2, b2) = place.get(&k2).expect("target summand exists");
                debug_assert_eq!(*d2, deg - 1);
                col.push((off2 + b2.index_of(&e2).expect("image inside target basis"), c));
            }
            cols[*deg as usize].push(col);
        }
    }
    let diffs = cols
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            let rows = if k == 0 { 0 } else { ranks[k - 1] };
            let m = if k == 0 { IntMatrix::zeros(0, ranks[0]) } else { IntMatrix::from_columns(rows, c)? };
            Ok(m.reduce_mod(p))
        })
        .collect::<Result<Vec<_>, LinError>>()?;
    Ok((ChainComplex::new(0, ranks, diffs)?, terms))
}

/// Highest twist s with p^s ≤ d.
fn max_twist(p: u64, d: u32) -> u32 {
    let mut s = 0;
    while ipow(p, s + 1) <= d as u64 {
        s += 1;
    }
    s
}

fn check_prime(p: u64) -> Result<(), KoszulError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(KoszulError::NotPrime(p))
    }
}

fn check_positive(d: u32, r: usize) -> Result<(), KoszulError> {
    if d == 0 || r == 0 {
        return Err(KoszulError::BadArgs(format!("weight {d} and rank {r} must be positive")));
    }
    Ok(())
}

/// Weight-d component of the Koszul algebra ℒ(F_p^r) with ∂_Kos.
pub fn koszul_weight_complex(p: u64, d: u32, r: usize) -> Result<WeightComplex, KoszulError> {
    check_prime(p)?;
    check_positive(d, r)?;
    let top = max_twist(p, d) as usize;
    let mut keys = Vec::new();
    fn rec(level: usize, top: usize, p: u64, left: u64, key: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if level > top {
            // the untwisted exterior factor takes what is left
            let mut k = key.clone();
            k[0] = left as u32;
            out.push(k);
            return;
        }
        let w = ipow(p, level as u32);
        for k in 0..=left / w {
            for l in 0..=(left - k * w) / w {
                key.push(k as u32);
                key.push(l as u32);
                rec(level + 1, top, p, left - (k + l) * w, key, out);
                key.pop();
                key.pop();
            }
        }
    }
    rec(1, top, p, d as u64, &mut vec![0], &mut keys);
    let pieces = keys
        .into_iter()
        .map(|key| {
            let mut core = vec![Core::Lambda(key[0])];
            let mut factors = Vec::new();
            if key[0] > 0 {
                factors.push(FunctorExpr::Lambda(key[0]));
            }
            let mut degree = key[0] as i64;
            for s in 1..=top {
                let (k, l) = (key[2 * s - 1], key[2 * s]);
                core.push(Core::Gamma(k));
                core.push(Core::Lambda(l));
                if k > 0 {
                    factors.push(twisted(s as u32, FunctorExpr::Gamma(k)));
                }
                if l > 0 {
                    factors.push(twisted(s as u32, FunctorExpr::Lambda(l)));
                }
                degree += 2 * k as i64 + l as i64;
            }
            Piece { key, degree, core: Core::Tensor(core), label: label_of(p, factors) }
        })
        .collect();
    let (complex, terms) = assemble(p, r, d as i64, pieces, |key, parts| {
        let mut out = Vec::new();
        // Γ factors have even degree, so the sign only sees exterior degrees
        let mut before = key[0];
        for s in 1..=top {
            let (gi, li) = (2 * s - 1, 2 * s);
            if key[gi] > 0 {
                let pair = Elem::Tensor(vec![parts[gi].clone(), parts[li].clone()]);
                for (img, c) in koszul_image(&pair) {
                    let Elem::Tensor(new) = img else { unreachable!() };
                    let mut np = parts.to_vec();
                    np[gi] = new[0].clone();
                    np[li] = new[1].clone();
                    let mut nk = key.to_vec();
                    nk[gi] -= 1;
                    nk[li] += 1;
                    let c = if before % 2 == 1 { -c } else { c };
                    out.push((nk, Elem::Tensor(np), c));
                }
            }
            before += key[li];
        }
        out
    })?;
    Ok(WeightComplex { complex, weight: d, p, r, origin: Origin::Koszul, terms })
}

/// Weight-d component of ⊗_{s≥0} Γ(V^(s)[1]) over F_2 with ∂_SKos.
pub fn skew_koszul_weight_complex(d: u32, r: usize) -> Result<WeightComplex, KoszulError> {
    check_positive(d, r)?;
    let top = max_twist(2, d) as usize;
    let mut keys = Vec::new();
    fn rec(level: usize, left: u64, key: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if level == 0 {
            let mut k = key.clone();
            k.push(left as u32);
            k.reverse();
            out.push(k);
            return;
        }
        let w = 1u64 << level;
        for k in 0..=left / w {
            key.push(k as u32);
            rec(level - 1, left - k * w, key, out);
            key.pop();
        }
    }
    rec(top, d as u64, &mut Vec::new(), &mut keys);
    let pieces = keys
        .into_iter()
        .map(|key| {
            let core = Core::Tensor(key.iter().map(|&k| Core::Gamma(k)).collect());
            let factors = key
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(s, &k)| twisted(s as u32, FunctorExpr::Gamma(k)))
                .collect();
            let degree = key.iter().map(|&k| k as i64).sum();
            Piece { key, degree, core, label: label_of(2, factors) }
        })
        .collect();
    let (complex, terms) = assemble(2, r, d as i64, pieces, |key, parts| {
        let mut out = Vec::new();
        for s in 0..top {
            if key[s] < 2 {
                continue;
            }
            let pair = Elem::Tensor(vec![parts[s].clone(), parts[s + 1].clone()]);
            for (img, c) in skew_koszul_image(&pair) {
                let Elem::Tensor(new) = img else { unreachable!() };
                let mut np = parts.to_vec();
                np[s] = new[0].clone();
                np[s + 1] = new[1].clone();
                let mut nk = key.to_vec();
                nk[s] -= 2;
                nk[s + 1] += 1;
                out.push((nk, Elem::Tensor(np), c));
            }
        }
        out
    })?;
    Ok(WeightComplex { complex, weight: d, p: 2, r, origin: Origin::SkewKoszul, terms })
}

/// Weight-d component of (S(V) ⊗ Λ(V^(1)[1]), ∂) over F_p, with
/// ∂(s ⊗ y_1∧..∧y_e) = Σ_j (−1)^(j−1) s·y_j^p ⊗ (omit y_j).
pub fn q_resolution_complex(p: u64, d: u32, r: usize) -> Result<WeightComplex, KoszulError> {
    check_prime(p)?;
    check_positive(d, r)?;
    let pieces = (0..=d as u64 / p)
        .map(|e| {
            let c = d - (e * p) as u32;
            let e = e as u32;
            let mut factors = Vec::new();
            if c > 0 {
                factors.push(FunctorExpr::Sym(c));
            }
            if e > 0 {
                factors.push(FunctorExpr::twist(1, FunctorExpr::Lambda(e)));
            }
            Piece {
                key: vec![c, e],
                degree: e as i64,
                core: Core::Tensor(vec![Core::Sym(c), Core::Lambda(e)]),
                label: label_of(p, factors),
            }
        })
        .collect();
    let pu = p as u32;
    let hi = (d as u64 / p) as i64;
    let (complex, terms) = assemble(p, r, hi, pieces, |key, parts| {
        let (s, w) = (mono(&parts[0]), mono(&parts[1]));
        let mut out = Vec::new();
        for (j, &(y, _)) in w.iter().enumerate() {
            let (ns, _) = mono_mul(s, &[(y, pu)], false);
            let mut nw = w.to_vec();
            nw.remove(j);
            let c = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            out.push((vec![key[0] + pu, key[1] - 1], Elem::Tensor(vec![Elem::Mono(ns), Elem::Mono(nw)]), c));
        }
        out
    })?;
    Ok(WeightComplex { complex, weight: d, p, r, origin: Origin::QResolution, terms })
}

/// Kernel of the differential out of one degree.
#[derive(Clone, Debug)]
pub struct Cycles {
    pub dim: usize,
    /// Columns span the kernel, in the basis of the degree-i term.
    pub basis: IntMatrix,
}

pub fn cycles(w: &WeightComplex, i: i64) -> Result<Cycles, KoszulError> {
    let d = w.complex.differential(i);
    let basis = kernel_mod_p(&d, w.p)?;
    let dim = basis.cols();
    debug_assert_eq!(dim, w.complex.cycles_dim(i)?);
    Ok(Cycles { dim, basis })
}

/// Rank of the differential out of degree i.
fn diff_rank(w: &WeightComplex, i: i64) -> Result<usize, KoszulError> {
    Ok(fp_rank(&w.complex.differential(i), w.p)?)
}

/// Cycles at degree i computed as a kernel, as the image from i+1 and as the
/// cokernel of the map into i+1. Valid where the complex is exact at i and i+1.
pub fn three_descriptions(w: &WeightComplex, i: i64) -> Result<[usize; 3], KoszulError> {
    let ker = cycles(w, i)?.dim;
    let img = diff_rank(w, i + 1)?;
    let coker = w.complex.rank(i + 1) - diff_rank(w, i + 2)?;
    Ok([ker, img, coker])
}

fn nat2(name: &str, r: usize, a: u32, b: u32) -> Result<IntMatrix, KoszulError> {
    Ok(nat_map(name, &NatContext { r, p: Some(2), a, b, s: 0 })?)
}

fn kernel_dim(m: &IntMatrix, p: u64) -> Result<usize, KoszulError> {
    Ok(m.cols() - fp_rank(m, p)?)
}

/// dim Φ^d(F_2^r), the degree d−1 cycles of the skew-Koszul complex.
///
/// Computed as the kernel of Γ^{d−2} ⊗ V^(1) → Γ^{d−4} ⊗ Γ²(V^(1)), as the
/// image of Γ^d → Γ^{d−2} ⊗ V^(1), as the cokernel of Λ^d → Γ^d, and as the
/// cycles of the assembled complex. Any disagreement is an error.
pub fn phi(d: u32, r: usize) -> Result<usize, KoszulError> {
    check_positive(d, r)?;
    let gamma_dim = binom(r as u64 + d as u64 - 1, d as u64) as usize;
    let kernel = match d {
        1 => 0,
        // nothing leaves degree d−1 below weight 4
        2 | 3 => r.pow(d - 1),
        _ => kernel_dim(&nat2("skew_koszul_step", r, d - 2, 1)?, 2)?,
    };
    let image = if d >= 2 { fp_rank(&nat2("skew_koszul_step", r, d, 0)?, 2)? } else { 0 };
    let coker = gamma_dim - fp_rank(&nat2("lambda_to_gamma", r, d, 0)?, 2)?;
    let sk = skew_koszul_weight_complex(d, r)?;
    let from_complex = cycles(&sk, d as i64 - 1)?.dim;
    let values = [kernel, image, coker, from_complex];
    if values.iter().any(|&v| v != kernel) {
        return Err(KoszulError::Inconsistent {
            what: format!("Φ^{d} at rank {r}"),
            values: values.iter().map(|v| v.to_string()).collect(),
        });
    }
    Ok(kernel)
}

/// W^d_k(F_p^r): kernel of Γ^k ⊗ Λ^{d−k} → Γ^{k−1} ⊗ Λ^{d−k+1}.
#[derive(Clone, Debug)]
pub struct Hook {
    pub dim: usize,
    pub kernel: IntMatrix,
}

pub fn weyl_hook(d: u32, k: i64, p: u64, r: usize) -> Result<Hook, KoszulError> {
    check_prime(p)?;
    if k < 0 || k > d as i64 {
        return Ok(Hook { dim: 0, kernel: IntMatrix::zeros(0, 0) });
    }
    let k = k as u32;
    if k == 0 {
        let n = binom(r as u64, d as u64) as usize;
        return Ok(Hook { dim: n, kernel: IntMatrix::identity(n).reduce_mod(p) });
    }
    let m = nat_map("koszul_step", &NatContext { r, p: Some(p), a: k, b: d - k, s: 0 })?;
    let kernel = kernel_mod_p(&m, p)?;
    Ok(Hook { dim: kernel.cols(), kernel })
}

/// σ_(1,n)(F_2^r) as the cokernel of u: Λ²(V^(1)) ⊗ S^{n−2} → V^(1) ⊗ S^n,
/// (x∧y) ⊗ z ↦ x ⊗ y²z − y ⊗ x²z.
#[derive(Clone, Debug)]
pub struct Sigma {
    pub dim: usize,
    /// The matrix of u; σ_(1,n) is its cokernel.
    pub presentation: IntMatrix,
}

pub fn sigma_one_n(n: u32, r: usize) -> Result<Sigma, KoszulError> {
    if n < 2 || r == 0 {
        return Err(KoszulError::BadArgs(format!("σ_(1,n) needs n ≥ 2 and r ≥ 1, got n={n}, r={r}")));
    }
    let src = Core::Tensor(vec![Core::Lambda(2), Core::Sym(n - 2)]);
    let dst = Basis::new(core_basis(&Core::Tensor(vec![Core::Gamma(1), Core::Sym(n)]), r));
    let cols = core_basis(&src, r)
        .iter()
        .map(|e| {
            let Elem::Tensor(parts) = e else { unreachable!() };
            let (xy, z) = (mono(&parts[0]), mono(&parts[1]));
            let (x, y) = (xy[0].0, xy[1].0);
            let t = |a: u32, b: u32| {
                let (s, _) = mono_mul(z, &[(b, 2)], false);
                dst.index_of(&Elem::Tensor(vec![Elem::Mono(vec![(a, 1)]), Elem::Mono(s)])).expect("in basis")
            };
            vec![(t(x, y), BigInt::one()), (t(y, x), -BigInt::one())]
        })
        .collect();
    let u = IntMatrix::from_columns(dst.len(), cols)?.reduce_mod(2);
    let dim = dst.len() - fp_rank(&u, 2)?;
    let expected = binom(r as u64 + n as u64 + 1, n as u64 + 2) as usize - binom(r as u64, n as u64 + 2) as usize;
    if dim != expected {
        return Err(KoszulError::Inconsistent {
            what: format!("σ_(1,{n}) at rank {r}"),
            values: vec![dim.to_string(), expected.to_string()],
        });
    }
    Ok(Sigma { dim, presentation: u })
}

/// Checks that the weight-d resolution of Q^d(F_p^r) is exact above degree 0
/// and has Q^d in degree 0.
pub fn q_resolution_check(d: u32, r: usize, p: u64) -> Result<bool, KoszulError> {
    let w = q_resolution_complex(p, d, r)?;
    let q = eval_dim(&FunctorExpr::mod_p(p, FunctorExpr::TruncatedQ(d)), r)?;
    let dims = w.homology_dims()?;
    Ok(dims.iter().all(|&(i, h)| if i == 0 { h == q } else { h == 0 }))
}

// ---------------------------------------------------------------------------
// maximal filtration

fn gamma_monos(r: usize, d: u32) -> Vec<Mono> {
    exponent_monos(r, d, d)
}

/// g_i(e): the gcd of the coefficients of γ_e in i-fold products of
/// elements of positive weight. F_{−i}Γ^d is spanned by g_i(e)·γ_e.
struct ProductGcd {
    memo: HashMap<(Mono, u32), BigInt>,
}

impl ProductGcd {
    fn new() -> Self {
        ProductGcd { memo: HashMap::new() }
    }

    fn get(&mut self, e: &Mono, i: u32) -> BigInt {
        let weight: u32 = e.iter().map(|&(_, k)| k).sum();
        if i == 0 || i > weight {
            return BigInt::zero();
        }
        if i == 1 {
            return BigInt::one();
        }
        if let Some(g) = self.memo.get(&(e.clone(), i)) {
            return g.clone();
        }
        let mut g = BigInt::zero();
        for a in sub_monos(e) {
            let wa: u32 = a.iter().map(|&(_, k)| k).sum();
            if wa == 0 || weight - wa < i - 1 {
                continue;
            }
            let b = mono_sub(e, &a);
            let (_, c) = mono_mul(&a, &b, true);
            g = g.gcd(&(c * self.get(&b, i - 1)));
        }
        self.memo.insert((e.clone(), i), g.clone());
        g
    }
}

fn sub_monos(e: &Mono) -> Vec<Mono> {
    let mut out = vec![Vec::new()];
    for &(g, k) in e {
        let mut next = Vec::new();
        for m in &out {
            for t in 0..=k {
                let mut n = m.clone();
                if t > 0 {
                    n.push((g, t));
                }
                next.push(n);
            }
        }
        out = next;
    }
    out
}

fn mono_sub(e: &Mono, a: &Mono) -> Mono {
    e.iter()
        .filter_map(|&(g, k)| {
            let t = a.iter().find(|&&(h, _)| h == g).map_or(0, |&(_, t)| t);
            (k > t).then_some((g, k - t))
        })
        .collect()
}

fn partitions_into(d: u32, parts: u32, max: u32) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if d == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in (1..=max.min(d)).rev() {
        if d - first < parts - 1 {
            continue;
        }
        for mut rest in partitions_into(d - first, parts - 1, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Matrix of ⊕ Γ^{k_1} ⊗ .. ⊗ Γ^{k_i} → Γ^d over partitions of d into i parts.
fn filtration_mult_matrix(d: u32, i: u32, r: usize) -> Result<IntMatrix, KoszulError> {
    let target = Basis::new(gamma_monos(r, d).into_iter().map(Elem::Mono).collect());
    let mut cols = Vec::new();
    for parts in partitions_into(d, i, d) {
        let core = Core::Tensor(parts.iter().map(|&k| Core::Gamma(k)).collect());
        for e in core_basis(&core, r) {
            let Elem::Tensor(fs) = e else { unreachable!() };
            let mut acc: Mono = Vec::new();
            let mut coef = BigInt::one();
            for f in &fs {
                let (z, c) = mono_mul(&acc, mono(f), true);
                acc = z;
                coef *= c;
            }
            cols.push(vec![(target.index_of(&Elem::Mono(acc)).expect("in basis"), coef)]);
        }
    }
    Ok(IntMatrix::from_columns(target.len(), cols)?)
}

fn closed_gr(d: u32, i: u32, r: usize) -> Option<AbGroupType> {
    let sym = |k: u32| binom(r as u64 + k as u64 - 1, k as u64) as usize;
    if i == d {
        return Some(AbGroupType::free(sym(d)));
    }
    if d == 1 {
        return Some(AbGroupType::free(r));
    }
    if i == 1 {
        return Some(match prime_power(d as u64) {
            Some((p, _)) => AbGroupType::elementary(p, r),
            None => AbGroupType::zero(),
        });
    }
    if i == 2 {
        let mut g = AbGroupType::zero();
        for p in primes_up_to(d as u64) {
            let is_power = |x: u64| x == 1 || matches!(prime_power(x), Some((q, _)) if q == p);
            let mut a = 1u64;
            while a < d as u64 {
                let rest = d as u64 - a;
                if is_power(rest) {
                    let n = if rest == a { sym(2) } else { r * r };
                    g = g.direct_sum(&AbGroupType::elementary(p, n));
                    break;
                }
                a *= p;
            }
        }
        return Some(g);
    }
    if d >= 4 && i == d - 1 {
        return Some(AbGroupType::elementary(2, sym(d) - binom(r as u64, d as u64) as usize));
    }
    None
}

/// gr_{−i}Γ^d(Z^r) for the maximal (augmentation-ideal-adic) filtration.
///
/// The filtration is computed from the product coefficients, cross-checked
/// against the Smith form of the multiplication map, and compared with the
/// closed descriptions where one exists.
pub fn maximal_filtration_gr(d: u32, i: u32, r: usize) -> Result<AbGroupType, KoszulError> {
    if i == 0 || i > d || r == 0 {
        return Err(KoszulError::BadArgs(format!("need 1 ≤ i ≤ d and r ≥ 1, got d={d}, i={i}, r={r}")));
    }
    let mut gcds = ProductGcd::new();
    let monos = gamma_monos(r, d);
    let mut quotients = Vec::new();
    let mut free = 0;
    let mut layer = Vec::new();
    for e in &monos {
        let (gi, gj) = (gcds.get(e, i), gcds.get(e, i + 1));
        layer.push(gi.clone());
        if gj.is_zero() {
            free += 1;
        } else {
            let q = (gj / gi).to_u64().expect("small quotient");
            quotients.push(q);
        }
    }
    let computed = AbGroupType::new(free, quotients);
    let snf = smith_normal_form(&filtration_mult_matrix(d, i, r)?)?.cokernel(monos.len())?;
    let diag = AbGroupType::new(0, layer.iter().map(|g| g.to_u64().expect("small gcd")));
    if snf != diag {
        return Err(KoszulError::Inconsistent {
            what: format!("Γ^{d}/F_-{i} at rank {r}"),
            values: vec![snf.to_string(), diag.to_string()],
        });
    }
    if let Some(closed) = closed_gr(d, i, r) {
        if closed != computed {
            return Err(KoszulError::Inconsistent {
                what: format!("gr_-{i}Γ^{d} at rank {r}"),
                values: vec![computed.to_string(), closed.to_string()],
            });
        }
    }
    Ok(computed)
}

// ---------------------------------------------------------------------------
// principal filtration

/// One weight/level entry of the principal filtration table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipalRow {
    pub weight: u32,
    pub level: u32,
    /// dim I^n_w − dim I^{n+1}_w, from ranks of multiplication matrices.
    pub gr_dim: usize,
    /// dim Q^n ⊗ Γ^{(w−n)/p}(V^(1)).
    pub predicted: usize,
}

/// Matrix of S^n ⊗ Γ^{w−n} → Γ^w, (x^a, γ_e) ↦ x^a·γ_e computed in Γ.
fn ideal_power_matrix(w: u32, n: u32, r: usize) -> Result<IntMatrix, KoszulError> {
    let target = Basis::new(gamma_monos(r, w).into_iter().map(Elem::Mono).collect());
    let mut cols = Vec::new();
    for a in exponent_monos(r, n, n) {
        // x^a = Π a_i! γ_a in Γ
        let mut fac = BigInt::one();
        for &(_, k) in &a {
            for t in 2..=k {
                fac *= t;
            }
        }
        for e in gamma_monos(r, w - n) {
            let (z, c) = mono_mul(&a, &e, true);
            cols.push(vec![(target.index_of(&Elem::Mono(z)).expect("in basis"), c * &fac)]);
        }
    }
    Ok(IntMatrix::from_columns(target.len(), cols)?)
}

/// Dimension of Γ^w(F_p^r) predicted by the iterated filtration, Σ Π dim Q^{a_s}
/// over a_0 + p a_1 + p² a_2 + .. = w.
pub fn iterated_q_dim(w: u32, p: u64, r: usize) -> Result<usize, KoszulError> {
    fn rec(left: u64, scale: u64, p: u64, q: &dyn Fn(u32) -> usize) -> usize {
        if left == 0 {
            return 1;
        }
        if scale > left {
            return 0;
        }
        (0..=left / scale).map(|a| q(a as u32) * rec(left - a * scale, scale * p, p, q)).sum()
    }
    let mut dims = Vec::new();
    for a in 0..=w {
        dims.push(eval_dim(&FunctorExpr::mod_p(p, FunctorExpr::TruncatedQ(a)), r)?);
    }
    Ok(rec(w as u64, 1, p, &|a| dims[a as usize]))
}

pub fn principal_filtration_dims(weight_bound: u32, p: u64, r: usize) -> Result<Vec<PrincipalRow>, KoszulError> {
    check_prime(p)?;
    let mut rows = Vec::new();
    for w in 1..=weight_bound {
        let mut ideal = Vec::new();
        for n in 0..=w + 1 {
            ideal.push(if n > w { 0 } else { fp_rank(&ideal_power_matrix(w, n, r)?, p)? });
        }
        let mut total = 0;
        for n in 0..=w {
            let gr_dim = ideal[n as usize] - ideal[n as usize + 1];
            let predicted = if (w - n) as u64 % p == 0 {
                let q = eval_dim(&FunctorExpr::mod_p(p, FunctorExpr::TruncatedQ(n)), r)?;
                q * binom(r as u64 + (w - n) as u64 / p - 1, (w - n) as u64 / p) as usize
            } else {
                0
            };
            if gr_dim != predicted {
                return Err(KoszulError::Inconsistent {
                    what: format!("gr^{n}Γ^{w} over F_{p} at rank {r}"),
                    values: vec![gr_dim.to_string(), predicted.to_string()],
                });
            }
            total += gr_dim;
            rows.push(PrincipalRow { weight: w, level: n, gr_dim, predicted });
        }
        let iterated = iterated_q_dim(w, p, r)?;
        if total != iterated {
            return Err(KoszulError::Inconsistent {
                what: format!("Γ^{w} over F_{p} at rank {r}"),
                values: vec![total.to_string(), iterated.to_string()],
            });
        }
    }
    Ok(rows)
}

/// Predicted cycle dimensions of a tensor product of finite exact complexes,
/// from the cycle dimensions of the factors (`kernels[c][i]` = dim ker at
/// degree i of complex c):
/// Σ_j C(n−1, j) Σ_{i_1+..+i_n = k−j} Π dim Ker_{i_ℓ}.
pub fn tensor_cycles_predictor(kernels: &[Vec<usize>], k: i64) -> usize {
    let n = kernels.len();
    if n == 0 {
        return usize::from(k == 0);
    }
    // convolution of the kernel sequences
    let mut conv = vec![1usize];
    for ker in kernels {
        let mut next = vec![0usize; conv.len() + ker.len().saturating_sub(1)];
        for (a, &x) in conv.iter().enumerate() {
            for (b, &y) in ker.iter().enumerate() {
                next[a + b] += x * y;
            }
        }
        conv = next;
    }
    (0..n)
        .map(|j| {
            let t = k - j as i64;
            if t < 0 || t as usize >= conv.len() {
                0
            } else {
                binom_i(n as i64 - 1, j as i64) as usize * conv[t as usize]
            }
        })
        .sum()
}
