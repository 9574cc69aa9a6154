//! Polynomial functors on free modules: bases, dimensions, induced matrices
//! and a handful of named natural transformations.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combi::{binom, binom_big, ipow, multinomial};
use crate::exactlin::{fp_rank, is_prime, IntMatrix, LinError};
use crate::exec::Exec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuncError {
    #[error("{0} is only defined inside a mod-p context")]
    NeedsModP(&'static str),
    #[error("conflicting moduli {0} and {1}")]
    ConflictingModulus(u64, u64),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("direct sum of functors of different weights {0} and {1}")]
    Inhomogeneous(u64, u64),
    #[error("morphism has modulus {found:?}, functor is evaluated over {expected:?}")]
    MorphismModulus { expected: Option<u64>, found: Option<u64> },
    #[error("unknown natural map `{0}`")]
    UnknownMap(String),
    #[error("natural map `{name}`: {reason}")]
    BadContext { name: String, reason: String },
    #[error("cannot parse functor expression `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// Expression tree for a polynomial functor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FunctorExpr {
    Gamma(u32),
    Lambda(u32),
    Sym(u32),
    Tensor(Vec<FunctorExpr>),
    DirectSum(Vec<FunctorExpr>),
    /// Truncated polynomial functor Q^d: image of V^{⊗d} → Γ^d over F_p.
    TruncatedQ(u32),
    /// Evaluate the inner functor over F_p.
    ModP(u64, Box<FunctorExpr>),
    /// Frobenius twist precomposed r times; identity on matrices over F_p.
    Twist(u32, Box<FunctorExpr>),
}

/// Functor with mod-p and twist wrappers removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Core {
    Gamma(u32),
    Lambda(u32),
    Sym(u32),
    Trunc(u32, u64),
    Tensor(Vec<Core>),
    Sum(Vec<Core>),
}

/// Basis element of F(Z^r). Monomials are sparse `(generator, exponent)`
/// lists sorted by generator; exterior monomials have all exponents 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Mono(Vec<(u32, u32)>),
    Tensor(Vec<Elem>),
    Sum(usize, Box<Elem>),
}

pub(crate) type Mono = Vec<(u32, u32)>;
/// Sparse linear combination of basis elements.
pub type Combo = Vec<(Elem, BigInt)>;

impl FunctorExpr {
    pub fn gamma(d: u32) -> Self {
        FunctorExpr::Gamma(d)
    }

    pub fn lambda(d: u32) -> Self {
        FunctorExpr::Lambda(d)
    }

    pub fn sym(d: u32) -> Self {
        FunctorExpr::Sym(d)
    }

    pub fn tensor(parts: Vec<FunctorExpr>) -> Self {
        FunctorExpr::Tensor(parts)
    }

    pub fn sum(parts: Vec<FunctorExpr>) -> Self {
        FunctorExpr::DirectSum(parts)
    }

    pub fn mod_p(p: u64, inner: FunctorExpr) -> Self {
        FunctorExpr::ModP(p, Box::new(inner))
    }

    pub fn twist(r: u32, inner: FunctorExpr) -> Self {
        FunctorExpr::Twist(r, Box::new(inner))
    }

    /// The prime of the outermost mod-p context, after validating the tree.
    pub fn modulus(&self) -> Result<Option<u64>, FuncError> {
        Ok(self.compile()?.1)
    }

    /// Polynomial weight. Direct sums must be homogeneous.
    pub fn weight(&self) -> Result<u64, FuncError> {
        let p = self.modulus()?;
        self.weight_in(p)
    }

    fn weight_in(&self, p: Option<u64>) -> Result<u64, FuncError> {
        Ok(match self {
            FunctorExpr::Gamma(d)
            | FunctorExpr::Lambda(d)
            | FunctorExpr::Sym(d)
            | FunctorExpr::TruncatedQ(d) => *d as u64,
            FunctorExpr::Tensor(fs) => {
                let mut w = 0;
                for f in fs {
                    w += f.weight_in(p)?;
                }
                w
            }
            FunctorExpr::DirectSum(fs) => {
                let mut w: Option<u64> = None;
                for f in fs {
                    let v = f.weight_in(p)?;
                    match w {
                        Some(u) if u != v => return Err(FuncError::Inhomogeneous(u, v)),
                        _ => w = Some(v),
                    }
                }
                w.unwrap_or(0)
            }
            FunctorExpr::ModP(q, f) => f.weight_in(Some(*q))?,
            FunctorExpr::Twist(r, f) => {
                let p = p.ok_or(FuncError::NeedsModP("Frobenius twist"))?;
                ipow(p, *r) * f.weight_in(Some(p))?
            }
        })
    }

    /// Largest weight among summands; the vanishing bound uses this.
    pub fn max_weight(&self) -> Result<u64, FuncError> {
        let p = self.modulus()?;
        self.max_weight_in(p)
    }

    fn max_weight_in(&self, p: Option<u64>) -> Result<u64, FuncError> {
        match self {
            FunctorExpr::DirectSum(fs) => {
                let mut w = 0;
                for f in fs {
                    w = w.max(f.max_weight_in(p)?);
                }
                Ok(w)
            }
            FunctorExpr::Tensor(fs) => {
                let mut w = 0;
                for f in fs {
                    w += f.max_weight_in(p)?;
                }
                Ok(w)
            }
            FunctorExpr::ModP(q, f) => f.max_weight_in(Some(*q)),
            FunctorExpr::Twist(r, f) => {
                let p = p.ok_or(FuncError::NeedsModP("Frobenius twist"))?;
                Ok(ipow(p, *r) * f.max_weight_in(Some(p))?)
            }
            _ => self.weight_in(p),
        }
    }

    /// Validates the tree and strips the mod-p and twist wrappers.
    pub(crate) fn compile(&self) -> Result<(Core, Option<u64>), FuncError> {
        let mut modulus = None;
        let core = compile_rec(self, None, &mut modulus)?;
        Ok((core, modulus))
    }

    /// True when no mod-p, twist or truncation node occurs.
    pub fn is_integral(&self) -> bool {
        match self {
            FunctorExpr::Gamma(_) | FunctorExpr::Lambda(_) | FunctorExpr::Sym(_) => true,
            FunctorExpr::Tensor(fs) | FunctorExpr::DirectSum(fs) => fs.iter().all(Self::is_integral),
            _ => false,
        }
    }
}

fn compile_rec(
    f: &FunctorExpr,
    ctx: Option<u64>,
    seen: &mut Option<u64>,
) -> Result<Core, FuncError> {
    Ok(match f {
        FunctorExpr::Gamma(d) => Core::Gamma(*d),
        FunctorExpr::Lambda(d) => Core::Lambda(*d),
        FunctorExpr::Sym(d) => Core::Sym(*d),
        FunctorExpr::TruncatedQ(d) => {
            Core::Trunc(*d, ctx.ok_or(FuncError::NeedsModP("truncated power"))?)
        }
        FunctorExpr::Tensor(fs) => {
            Core::Tensor(fs.iter().map(|g| compile_rec(g, ctx, seen)).collect::<Result<_, _>>()?)
        }
        FunctorExpr::DirectSum(fs) => {
            Core::Sum(fs.iter().map(|g| compile_rec(g, ctx, seen)).collect::<Result<_, _>>()?)
        }
        FunctorExpr::ModP(p, inner) => {
            if !is_prime(*p) {
                return Err(FuncError::NotPrime(*p));
            }
            match *seen {
                Some(q) if q != *p => return Err(FuncError::ConflictingModulus(q, *p)),
                _ => *seen = Some(*p),
            }
            compile_rec(inner, Some(*p), seen)?
        }
        FunctorExpr::Twist(_, inner) => {
            if ctx.is_none() {
                return Err(FuncError::NeedsModP("Frobenius twist"));
            }
            compile_rec(inner, ctx, seen)?
        }
    })
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorExpr::Gamma(d) => write!(f, "G{d}"),
            FunctorExpr::Lambda(d) => write!(f, "L{d}"),
            FunctorExpr::Sym(d) => write!(f, "S{d}"),
            FunctorExpr::TruncatedQ(d) => write!(f, "Q{d}"),
            FunctorExpr::Tensor(fs) | FunctorExpr::DirectSum(fs) => {
                let sep = if matches!(self, FunctorExpr::Tensor(_)) { "*" } else { "+" };
                let parts: Vec<String> = fs.iter().map(|g| g.to_string()).collect();
                write!(f, "({})", parts.join(sep))
            }
            FunctorExpr::ModP(p, g) => write!(f, "mod{p}({g})"),
            FunctorExpr::Twist(r, g) => write!(f, "tw{r}({g})"),
        }
    }
}

/// Grammar: `sum := prod ('+' prod)*`, `prod := atom ('*' atom)*`,
/// `atom := (G|L|S|Q|Gamma|Lambda|Sym)<d> | mod<p>(sum) | tw<r>(sum) | (sum)`.
/// Unicode Γ, Λ, ⊗ and ⊕ are accepted too.
impl FromStr for FunctorExpr {
    type Err = FuncError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let toks: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Parser { toks: &toks, pos: 0, input: s };
        let e = p.sum()?;
        if p.pos != toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    toks: &'a [char],
    pos: usize,
    input: &'a str,
}

impl Parser<'_> {
    fn err(&self, reason: &str) -> FuncError {
        FuncError::Parse { input: self.input.to_string(), reason: format!("{reason} at {}", self.pos) }
    }

    fn peek(&self) -> Option<char> {
        self.toks.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<FunctorExpr, FuncError> {
        let mut parts = vec![self.prod()?];
        while matches!(self.peek(), Some('+') | Some('⊕')) {
            self.pos += 1;
            parts.push(self.prod()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { FunctorExpr::DirectSum(parts) })
    }

    fn prod(&mut self) -> Result<FunctorExpr, FuncError> {
        let mut parts = vec![self.atom()?];
        while matches!(self.peek(), Some('*') | Some('⊗')) {
            self.pos += 1;
            parts.push(self.atom()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { FunctorExpr::Tensor(parts) })
    }

    fn word(&mut self) -> String {
        let mut w = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphabetic() {
                w.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        w
    }

    fn number(&mut self) -> Result<u64, FuncError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let s: String = self.toks[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("number out of range"))
    }

    fn small(&mut self) -> Result<u32, FuncError> {
        let n = self.number()?;
        u32::try_from(n).map_err(|_| self.err("number out of range"))
    }

    fn parenthesized(&mut self) -> Result<FunctorExpr, FuncError> {
        if self.peek() != Some('(') {
            return Err(self.err("expected `(`"));
        }
        self.pos += 1;
        let e = self.sum()?;
        if self.peek() != Some(')') {
            return Err(self.err("expected `)`"));
        }
        self.pos += 1;
        Ok(e)
    }

    fn atom(&mut self) -> Result<FunctorExpr, FuncError> {
        if self.peek() == Some('(') {
            return self.parenthesized();
        }
        let w = self.word();
        match w.as_str() {
            "G" | "Gamma" | "Γ" => Ok(FunctorExpr::Gamma(self.small()?)),
            "L" | "Lambda" | "Λ" => Ok(FunctorExpr::Lambda(self.small()?)),
            "S" | "Sym" => Ok(FunctorExpr::Sym(self.small()?)),
            "Q" => Ok(FunctorExpr::TruncatedQ(self.small()?)),
            "mod" => {
                let p = self.number()?;
                Ok(FunctorExpr::mod_p(p, self.parenthesized()?))
            }
            "tw" => {
                let r = self.small()?;
                Ok(FunctorExpr::twist(r, self.parenthesized()?))
            }
            "" => Err(self.err("expected a functor")),
            other => Err(self.err(&format!("unknown functor `{other}`"))),
        }
    }
}

/// Enumerated basis of F(Z^r) with its inverse index.
#[derive(Clone, Debug)]
pub struct Basis {
    pub elems: Vec<Elem>,
    index: HashMap<Elem, usize>,
}

impl Basis {
    pub(crate) fn new(elems: Vec<Elem>) -> Self {
        let index = elems.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        Basis { elems, index }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn index_of(&self, e: &Elem) -> Option<usize> {
        self.index.get(e).copied()
    }
}

/// Exponent vectors of total degree d in r variables, lexicographic, each
/// exponent at most `cap`.
pub(crate) fn exponent_monos(r: usize, d: u32, cap: u32) -> Vec<Mono> {
    fn rec(pos: usize, r: usize, left: u32, cap: u32, cur: &mut Mono, out: &mut Vec<Mono>) {
        if pos + 1 == r {
            if left <= cap {
                if left > 0 {
                    cur.push((pos as u32, left));
                }
                out.push(cur.clone());
                if left > 0 {
                    cur.pop();
                }
            }
            return;
        }
        for e in 0..=left.min(cap) {
            if e > 0 {
                cur.push((pos as u32, e));
            }
            rec(pos + 1, r, left - e, cap, cur, out);
            if e > 0 {
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if r == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, r, d, cap, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn exterior_monos(r: usize, d: u32) -> Vec<Mono> {
    crate::combi::subsets(r, d as usize)
        .into_iter()
        .map(|s| s.into_iter().map(|g| (g as u32, 1)).collect())
        .collect()
}

pub(crate) fn core_basis(core: &Core, r: usize) -> Vec<Elem> {
    match core {
        Core::Gamma(d) | Core::Sym(d) => {
            exponent_monos(r, *d, *d).into_iter().map(Elem::Mono).collect()
        }
        Core::Lambda(d) => exterior_monos(r, *d).into_iter().map(Elem::Mono).collect(),
        Core::Trunc(d, p) => {
            let cap = (*p - 1).min(*d as u64) as u32;
            exponent_monos(r, *d, cap).into_iter().map(Elem::Mono).collect()
        }
        Core::Tensor(fs) => {
            let mut acc: Vec<Vec<Elem>> = vec![Vec::new()];
            for f in fs {
                let b = core_basis(f, r);
                let mut next = Vec::with_capacity(acc.len() * b.len());
                for prefix in &acc {
                    for e in &b {
                        let mut t = prefix.clone();
                        t.push(e.clone());
                        next.push(t);
                    }
                }
                acc = next;
            }
            acc.into_iter().map(Elem::Tensor).collect()
        }
        Core::Sum(fs) => fs
            .iter()
            .enumerate()
            .flat_map(|(k, f)| core_basis(f, r).into_iter().map(move |e| Elem::Sum(k, Box::new(e))))
            .collect(),
    }
}

/// Canonical basis of F(Z^r) (or F(F_p^r) under a mod-p context).
pub fn basis(f: &FunctorExpr, r: usize) -> Result<Basis, FuncError> {
    let (core, _) = f.compile()?;
    Ok(Basis::new(core_basis(&core, r)))
}

fn core_dim(core: &Core, r: usize) -> Result<usize, FuncError> {
    let r64 = r as u64;
    Ok(match core {
        Core::Gamma(d) | Core::Sym(d) => {
            if r == 0 {
                usize::from(*d == 0)
            } else {
                binom(r64 + *d as u64 - 1, *d as u64) as usize
            }
        }
        Core::Lambda(d) => binom(r64, *d as u64) as usize,
        Core::Trunc(d, p) => truncated_dim(*d, *p, r)?,
        Core::Tensor(fs) => {
            let mut n = 1;
            for f in fs {
                n *= core_dim(f, r)?;
            }
            n
        }
        Core::Sum(fs) => {
            let mut n = 0;
            for f in fs {
                n += core_dim(f, r)?;
            }
            n
        }
    })
}

/// Size of the enumerated basis of F(Z^r), counted without enumerating.
/// Saturates at `u128::MAX`.
pub(crate) fn core_count(core: &Core, r: u128) -> u128 {
    match core {
        Core::Gamma(d) | Core::Sym(d) => bounded_count(r, *d, *d),
        Core::Lambda(d) => bounded_count(r, *d, 1),
        Core::Trunc(d, p) => bounded_count(r, *d, (*p - 1).min(*d as u64) as u32),
        Core::Tensor(fs) => fs.iter().fold(1u128, |acc, f| acc.saturating_mul(core_count(f, r))),
        Core::Sum(fs) => fs.iter().fold(0u128, |acc, f| acc.saturating_add(core_count(f, r))),
    }
}

/// Number of exponent vectors of length r, total d, entries ≤ cap:
/// Σ_j (-1)^j C(r, j) C(r + d - j(cap+1) - 1, r - 1).
fn bounded_count(r: u128, d: u32, cap: u32) -> u128 {
    if r == 0 {
        return u128::from(d == 0);
    }
    let big = |n: u128, k: u128| -> i128 {
        if k > n {
            return 0;
        }
        let k = k.min(n - k);
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc.saturating_mul(n - i) / (i + 1);
        }
        acc.min(i128::MAX as u128) as i128
    };
    let step = cap as u128 + 1;
    let mut total: i128 = 0;
    let mut j: u128 = 0;
    while j <= r && j * step <= d as u128 {
        let t = big(r, j).saturating_mul(big(r + d as u128 - j * step - 1, r - 1));
        total = if j % 2 == 0 { total.saturating_add(t) } else { total.saturating_sub(t) };
        j += 1;
    }
    total.max(0) as u128
}

/// dim Q^d(F_p^r) as the rank of the multiplication V^{⊗d} → Γ^d.
/// Symmetric tensors x_{i1}⊗…⊗x_{id} with i1 ≤ … ≤ id already span the image.
fn truncated_dim(d: u32, p: u64, r: usize) -> Result<usize, FuncError> {
    let target = Basis::new(core_basis(&Core::Gamma(d), r));
    let mut cols = Vec::with_capacity(target.len());
    for e in &target.elems {
        let Elem::Mono(m) = e else { unreachable!() };
        // x_{i1}⋯x_{id} = Π e_i! γ_e
        let coef: BigInt = m.iter().map(|&(_, k)| factorial(k)).product();
        cols.push(vec![(target.index_of(e).unwrap(), coef)]);
    }
    let m = IntMatrix::from_columns(target.len(), cols)?;
    Ok(fp_rank(&m, p)?)
}

fn factorial(k: u32) -> BigInt {
    (1..=k as u64).fold(BigInt::one(), |a, i| a * i)
}

/// Dimension of F(Z^r), or of F(F_p^r) under a mod-p context.
pub fn eval_dim(f: &FunctorExpr, r: usize) -> Result<usize, FuncError> {
    let (core, _) = f.compile()?;
    core_dim(&core, r)
}

/// Product γ_a·γ_b = Π C(a_i + b_i, a_i) γ_{a+b} in the divided power algebra;
/// with `divided = false` the symmetric product (coefficient 1).
pub(crate) fn mono_mul(a: &[(u32, u32)], b: &[(u32, u32)], divided: bool) -> (Mono, BigInt) {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut coef = BigInt::one();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            let (g, x, y) = (a[i].0, a[i].1, b[j].1);
            if divided {
                coef *= binom_big((x + y) as u64, x as u64);
            }
            out.push((g, x + y));
            i += 1;
            j += 1;
        }
    }
    (out, coef)
}

/// Wedge of two exterior monomials; `None` when they share a generator.
pub(crate) fn wedge(a: &[(u32, u32)], b: &[(u32, u32)]) -> Option<(Mono, i32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut sign = 1;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            // b[j] moves past the remaining a's
            if (a.len() - i) % 2 == 1 {
                sign = -sign;
            }
            out.push(b[j]);
            j += 1;
        } else {
            return None;
        }
    }
    Some((out, sign))
}

type Poly = HashMap<Mono, BigInt>;

fn poly_add(p: &mut Poly, m: Mono, c: BigInt) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(m).or_insert_with(BigInt::zero);
    *e += c;
}

fn pow_big(a: &BigInt, e: u32) -> BigInt {
    num_traits::pow(a.clone(), e as usize)
}

/// γ_e(Σ a_k y_k) or (Σ a_k y_k)^e, both expanded in monomials of the y's.
fn power_of_sum(image: &[(usize, BigInt)], e: u32, divided: bool) -> Poly {
    let mut out = Poly::new();
    for alpha in crate::combi::compositions(e, image.len()) {
        let mut coef = BigInt::one();
        let mut mono: Mono = Vec::new();
        for (k, &a) in alpha.iter().enumerate() {
            if a > 0 {
                coef *= pow_big(&image[k].1, a);
                mono.push((image[k].0 as u32, a));
            }
        }
        if !divided {
            coef *= multinomial(&alpha);
        }
        mono.sort_unstable();
        poly_add(&mut out, mono, coef);
    }
    out
}

fn apply_power_mono(m: &[(u32, u32)], images: &[Vec<(usize, BigInt)>], divided: bool) -> Poly {
    let mut acc = Poly::new();
    acc.insert(Vec::new(), BigInt::one());
    for &(g, e) in m {
        let factor = power_of_sum(&images[g as usize], e, divided);
        let mut next = Poly::new();
        for (am, ac) in &acc {
            for (fm, fc) in &factor {
                let (pm, pc) = mono_mul(am, fm, divided);
                poly_add(&mut next, pm, pc * ac * fc);
            }
        }
        next.retain(|_, c| !c.is_zero());
        acc = next;
    }
    acc
}

fn apply_exterior_mono(m: &[(u32, u32)], images: &[Vec<(usize, BigInt)>]) -> Poly {
    let mut acc = Poly::new();
    acc.insert(Vec::new(), BigInt::one());
    for &(g, _) in m {
        let mut next = Poly::new();
        for (am, ac) in &acc {
            for (h, c) in &images[g as usize] {
                let single = [(*h as u32, 1)];
                if let Some((w, s)) = wedge(am, &single) {
                    poly_add(&mut next, w, ac * c * s);
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        acc = next;
    }
    acc
}

/// Image of one basis element under F(m), where `images[g]` is the sparse
/// column of m for generator g. Coefficients are not reduced.
pub(crate) fn apply_core(core: &Core, e: &Elem, images: &[Vec<(usize, BigInt)>]) -> Combo {
    match (core, e) {
        (Core::Gamma(_), Elem::Mono(m)) => {
            apply_power_mono(m, images, true).into_iter().map(|(m, c)| (Elem::Mono(m), c)).collect()
        }
        (Core::Trunc(_, p), Elem::Mono(m)) => {
            // Q is a subfunctor of Γ: terms with an exponent ≥ p vanish mod p
            let bp = BigInt::from(*p);
            apply_power_mono(m, images, true)
                .into_iter()
                .filter(|(m, c)| {
                    let inside = m.iter().all(|&(_, k)| (k as u64) < *p);
                    debug_assert!(inside || c.mod_floor(&bp).is_zero());
                    inside
                })
                .map(|(m, c)| (Elem::Mono(m), c))
                .collect()
        }
        (Core::Sym(_), Elem::Mono(m)) => {
            apply_power_mono(m, images, false).into_iter().map(|(m, c)| (Elem::Mono(m), c)).collect()
        }
        (Core::Lambda(_), Elem::Mono(m)) => {
            apply_exterior_mono(m, images).into_iter().map(|(m, c)| (Elem::Mono(m), c)).collect()
        }
        (Core::Tensor(fs), Elem::Tensor(parts)) => {
            let mut acc: Vec<(Vec<Elem>, BigInt)> = vec![(Vec::new(), BigInt::one())];
            for (f, x) in fs.iter().zip(parts) {
                let img = apply_core(f, x, images);
                let mut next = Vec::with_capacity(acc.len() * img.len());
                for (prefix, c) in &acc {
                    for (y, d) in &img {
                        let mut t = prefix.clone();
                        t.push(y.clone());
                        next.push((t, c * d));
                    }
                }
                acc = next;
            }
            acc.into_iter().map(|(t, c)| (Elem::Tensor(t), c)).collect()
        }
        (Core::Sum(fs), Elem::Sum(k, x)) => apply_core(&fs[*k], x, images)
            .into_iter()
            .map(|(y, c)| (Elem::Sum(*k, Box::new(y)), c))
            .collect(),
        _ => panic!("basis element {e:?} does not belong to {core:?}"),
    }
}

/// Image of a basis element of F(Z^a) under F(m).
pub fn apply(f: &FunctorExpr, e: &Elem, m: &IntMatrix) -> Result<Combo, FuncError> {
    let (core, p) = f.compile()?;
    let images = images_of(m, p)?;
    let mut out = apply_core(&core, e, &images);
    if let Some(p) = p {
        let p = BigInt::from(p);
        for (_, c) in out.iter_mut() {
            *c = c.mod_floor(&p);
        }
        out.retain(|(_, c)| !c.is_zero());
    }
    Ok(out)
}

fn images_of(m: &IntMatrix, p: Option<u64>) -> Result<Vec<Vec<(usize, BigInt)>>, FuncError> {
    match (p, m.modulus()) {
        (_, None) => {}
        (Some(q), Some(r)) if q == r => {}
        (expected, found) => return Err(FuncError::MorphismModulus { expected, found }),
    }
    let m = match p {
        Some(q) if m.modulus().is_none() => m.reduce_mod(q),
        _ => m.clone(),
    };
    Ok(m.columns().to_vec())
}

/// Matrix of F(m) in the canonical bases.
pub fn eval_morphism(f: &FunctorExpr, m: &IntMatrix) -> Result<IntMatrix, FuncError> {
    eval_morphism_with(f, m, Exec::default())
}

pub fn eval_morphism_with(f: &FunctorExpr, m: &IntMatrix, exec: Exec) -> Result<IntMatrix, FuncError> {
    let (core, p) = f.compile()?;
    let images = images_of(m, p)?;
    let src = core_basis(&core, m.cols());
    let dst = Basis::new(core_basis(&core, m.rows()));
    let cols = exec.map(src, |e| {
        apply_core(&core, &e, &images)
            .into_iter()
            .map(|(y, c)| {
                let i = dst.index_of(&y).expect("image outside the target basis");
                (i, c)
            })
            .collect::<Vec<_>>()
    });
    let mat = IntMatrix::from_columns(dst.len(), cols)?;
    Ok(match p {
        Some(p) => mat.reduce_mod(p),
        None => mat,
    })
}

/// Parameters for [`nat_map`]: rank r, optional prime p, weights a and b,
/// twist count s.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NatContext {
    pub r: usize,
    pub p: Option<u64>,
    pub a: u32,
    pub b: u32,
    pub s: u32,
}

/// Names accepted by [`nat_map`].
pub const NAT_MAPS: &[&str] = &[
    "mult",
    "comult",
    "verschiebung",
    "frobenius",
    "lambda_to_gamma",
    "koszul_step",
    "skew_koszul_step",
    "q_res_d1",
    "q_res_d0",
    "q_res_f4",
    "tensor_to_gamma",
    "principal_mult",
    "gamma_to_twist",
];

/// Matrix of a named natural transformation at rank `ctx.r`.
///
/// | name | map |
/// |---|---|
/// | mult | Γ^a ⊗ Γ^b → Γ^{a+b} |
/// | comult | Γ^{a+b} → Γ^a ⊗ Γ^b |
/// | verschiebung | Γ^{p^s} → V^{(s)} |
/// | frobenius | V^{(s)} → S^{p^s} |
/// | lambda_to_gamma | Λ^a → Γ^a, p = 2 |
/// | koszul_step | Γ^a ⊗ Λ^b → Γ^{a-1} ⊗ Λ^{b+1} |
/// | skew_koszul_step | Γ^a ⊗ Γ^b(V^{(1)}) → Γ^{a-2} ⊗ Γ^{b+1}(V^{(1)}), p = 2 |
/// | q_res_d1 | Λ²(V^{(1)}) → S² ⊗ V^{(1)}, p = 2 |
/// | q_res_d0 | S² ⊗ V^{(1)} → S⁴, p = 2 |
/// | q_res_f4 | S⁴ → Λ⁴, p = 2 |
/// | tensor_to_gamma | V^{⊗a} → Γ^a |
/// | principal_mult | V ⊗ Γ^{a-1} → Γ^a |
/// | gamma_to_twist | Γ^a → Γ^{a/p}(V^{(1)}) |
pub fn nat_map(name: &str, ctx: &NatContext) -> Result<IntMatrix, FuncError> {
    let bad = |reason: &str| FuncError::BadContext { name: name.to_string(), reason: reason.to_string() };
    let need_p = || -> Result<u64, FuncError> {
        let p = ctx.p.ok_or_else(|| bad("a prime p is required"))?;
        if !is_prime(p) {
            return Err(FuncError::NotPrime(p));
        }
        Ok(p)
    };
    let need_two = || -> Result<u64, FuncError> {
        match ctx.p {
            Some(2) => Ok(2),
            _ => Err(bad("only defined in characteristic 2")),
        }
    };
    let r = ctx.r;
    let (a, b) = (ctx.a, ctx.b);
    let g = |d| Core::Gamma(d);
    let v = || Core::Gamma(1);
    let (m, p) = match name {
        "mult" => {
            let src = Core::Tensor(vec![g(a), g(b)]);
            let m = build(&src, &g(a + b), r, |e| {
                let [x, y] = tensor2(e);
                let (z, c) = mono_mul(x, y, true);
                vec![(Elem::Mono(z), c)]
            })?;
            (m, ctx.p)
        }
        "comult" => {
            let dst = Core::Tensor(vec![g(a), g(b)]);
            let m = build(&g(a + b), &dst, r, |e| {
                let z = mono(e);
                split_mono(z, a)
                    .into_iter()
                    .map(|(x, y)| (Elem::Tensor(vec![Elem::Mono(x), Elem::Mono(y)]), BigInt::one()))
                    .collect()
            })?;
            (m, ctx.p)
        }
        "verschiebung" => {
            let p = need_p()?;
            let q = ipow(p, ctx.s) as u32;
            let m = build(&g(q), &v(), r, |e| match mono(e) {
                [(i, k)] if *k == q => vec![(Elem::Mono(vec![(*i, 1)]), BigInt::one())],
                _ => Vec::new(),
            })?;
            (m, Some(p))
        }
        "frobenius" => {
            let p = need_p()?;
            let q = ipow(p, ctx.s) as u32;
            let m = build(&v(), &Core::Sym(q), r, |e| {
                let [(i, _)] = mono(e) else { unreachable!() };
                vec![(Elem::Mono(vec![(*i, q)]), BigInt::one())]
            })?;
            (m, Some(p))
        }
        "lambda_to_gamma" => {
            let p = need_two()?;
            let m = build(&Core::Lambda(a), &g(a), r, |e| vec![(e.clone(), BigInt::one())])?;
            (m, Some(p))
        }
        "koszul_step" => {
            if a == 0 {
                return Err(bad("Γ-weight a must be positive"));
            }
            let src = Core::Tensor(vec![g(a), Core::Lambda(b)]);
            let dst = Core::Tensor(vec![g(a - 1), Core::Lambda(b + 1)]);
            let m = build(&src, &dst, r, koszul_image)?;
            (m, ctx.p)
        }
        "skew_koszul_step" => {
            let p = need_two()?;
            if a < 2 {
                return Err(bad("Γ-weight a must be at least 2"));
            }
            let src = Core::Tensor(vec![g(a), g(b)]);
            let dst = Core::Tensor(vec![g(a - 2), g(b + 1)]);
            let m = build(&src, &dst, r, skew_koszul_image)?;
            (m, Some(p))
        }
        "q_res_d1" => {
            let p = need_two()?;
            let dst = Core::Tensor(vec![Core::Sym(2), v()]);
            let m = build(&Core::Lambda(2), &dst, r, |e| {
                let [(x, _), (y, _)] = mono(e) else { unreachable!() };
                let t = |sq: u32, z: u32| Elem::Tensor(vec![Elem::Mono(vec![(sq, 2)]), Elem::Mono(vec![(z, 1)])]);
                vec![(t(*x, *y), BigInt::one()), (t(*y, *x), -BigInt::one())]
            })?;
            (m, Some(p))
        }
        "q_res_d0" => {
            let p = need_two()?;
            let src = Core::Tensor(vec![Core::Sym(2), v()]);
            let m = build(&src, &Core::Sym(4), r, |e| {
                let [s, z] = tensor2(e);
                let (prod, _) = mono_mul(s, &[(z[0].0, 2)], false);
                vec![(Elem::Mono(prod), BigInt::one())]
            })?;
            (m, Some(p))
        }
        "q_res_f4" => {
            let p = need_two()?;
            let m = build(&Core::Sym(4), &Core::Lambda(4), r, |e| {
                if mono(e).iter().all(|&(_, k)| k == 1) {
                    vec![(e.clone(), BigInt::one())]
                } else {
                    Vec::new()
                }
            })?;
            (m, Some(p))
        }
        "tensor_to_gamma" => {
            let src = Core::Tensor(vec![v(); a as usize]);
            let m = build(&src, &g(a), r, |e| {
                let Elem::Tensor(parts) = e else { unreachable!() };
                let mut acc: Mono = Vec::new();
                let mut coef = BigInt::one();
                for x in parts {
                    let (z, c) = mono_mul(&acc, mono(x), true);
                    acc = z;
                    coef *= c;
                }
                vec![(Elem::Mono(acc), coef)]
            })?;
            (m, ctx.p)
        }
        "principal_mult" => {
            if a == 0 {
                return Err(bad("weight a must be positive"));
            }
            let src = Core::Tensor(vec![v(), g(a - 1)]);
            let m = build(&src, &g(a), r, |e| {
                let [x, y] = tensor2(e);
                let (z, c) = mono_mul(x, y, true);
                vec![(Elem::Mono(z), c)]
            })?;
            (m, ctx.p)
        }
        "gamma_to_twist" => {
            let p = need_p()?;
            if a as u64 % p != 0 {
                return Err(bad("weight a must be divisible by p"));
            }
            let m = build(&g(a), &g(a / p as u32), r, |e| {
                let z = mono(e);
                if z.iter().all(|&(_, k)| k as u64 % p == 0) {
                    let y = z.iter().map(|&(i, k)| (i, k / p as u32)).collect();
                    vec![(Elem::Mono(y), BigInt::one())]
                } else {
                    Vec::new()
                }
            })?;
            (m, Some(p))
        }
        other => return Err(FuncError::UnknownMap(other.to_string())),
    };
    Ok(match p {
        Some(p) => m.reduce_mod(p),
        None => m,
    })
}

pub(crate) fn mono(e: &Elem) -> &[(u32, u32)] {
    match e {
        Elem::Mono(m) => m,
        _ => panic!("expected a monomial, got {e:?}"),
    }
}

fn tensor2(e: &Elem) -> [&[(u32, u32)]; 2] {
    match e {
        Elem::Tensor(parts) if parts.len() == 2 => [mono(&parts[0]), mono(&parts[1])],
        _ => panic!("expected a binary tensor, got {e:?}"),
    }
}

/// All ways to write γ_z = γ_x γ_y with |x| = a (comultiplication summands).
pub(crate) fn split_mono(z: &[(u32, u32)], a: u32) -> Vec<(Mono, Mono)> {
    let mut out = Vec::new();
    fn rec(z: &[(u32, u32)], k: usize, left: u32, x: &mut Mono, y: &mut Mono, out: &mut Vec<(Mono, Mono)>) {
        if k == z.len() {
            if left == 0 {
                out.push((x.clone(), y.clone()));
            }
            return;
        }
        let (g, e) = z[k];
        let rest: u32 = z[k + 1..].iter().map(|&(_, e)| e).sum();
        for t in 0..=e.min(left) {
            if left - t > rest {
                continue;
            }
            if t > 0 {
                x.push((g, t));
            }
            if t < e {
                y.push((g, e - t));
            }
            rec(z, k + 1, left - t, x, y, out);
            if t > 0 {
                x.pop();
            }
            if t < e {
                y.pop();
            }
        }
    }
    rec(z, 0, a, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

/// γ_e ⊗ ω ↦ Σ_i γ_{e-ε_i} ⊗ x_i ∧ ω.
pub(crate) fn koszul_image(e: &Elem) -> Combo {
    let [x, w] = tensor2(e);
    let mut out = Vec::new();
    for (k, &(i, ei)) in x.iter().enumerate() {
        let Some((nw, s)) = wedge(&[(i, 1)], w) else { continue };
        let mut nx = x.to_vec();
        if ei == 1 {
            nx.remove(k);
        } else {
            nx[k].1 -= 1;
        }
        out.push((Elem::Tensor(vec![Elem::Mono(nx), Elem::Mono(nw)]), BigInt::from(s)));
    }
    out
}

/// γ_e ⊗ y ↦ Σ_{e_i ≥ 2} γ_{e-2ε_i} ⊗ b_i·y, the product taken in Γ(V^{(1)}).
pub(crate) fn skew_koszul_image(e: &Elem) -> Combo {
    let [x, y] = tensor2(e);
    let mut out = Vec::new();
    for (k, &(i, ei)) in x.iter().enumerate() {
        if ei < 2 {
            continue;
        }
        let mut nx = x.to_vec();
        if ei == 2 {
            nx.remove(k);
        } else {
            nx[k].1 -= 2;
        }
        let (ny, c) = mono_mul(y, &[(i, 1)], true);
        out.push((Elem::Tensor(vec![Elem::Mono(nx), Elem::Mono(ny)]), c));
    }
    out
}

fn build(src: &Core, dst: &Core, r: usize, f: impl Fn(&Elem) -> Combo) -> Result<IntMatrix, FuncError> {
    let s = core_basis(src, r);
    let t = Basis::new(core_basis(dst, r));
    let cols = s
        .iter()
        .map(|e| {
            f(e).into_iter()
                .map(|(y, c)| (t.index_of(&y).expect("image outside the target basis"), c))
                .collect()
        })
        .collect();
    Ok(IntMatrix::from_columns(t.len(), cols)?)
}

/// Family for [`exponential_map`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Gamma,
    Lambda,
    Sym,
}

impl Family {
    fn core(self, d: u32) -> Core {
        match self {
            Family::Gamma => Core::Gamma(d),
            Family::Lambda => Core::Lambda(d),
            Family::Sym => Core::Sym(d),
        }
    }

    fn expr(self, d: u32) -> FunctorExpr {
        match self {
            Family::Gamma => FunctorExpr::Gamma(d),
            Family::Lambda => FunctorExpr::Lambda(d),
            Family::Sym => FunctorExpr::Sym(d),
        }
    }
}

/// The map ⊕_{a+b=d} F^a(Z^{r1}) ⊗ F^b(Z^{r2}) → F^d(Z^{r1+r2}) induced by the
/// two inclusions followed by the algebra product.
pub fn exponential_map(family: Family, d: u32, r1: usize, r2: usize) -> Result<IntMatrix, FuncError> {
    let n = r1 + r2;
    let inc1 = IntMatrix::from_triplets(n, r1, (0..r1).map(|i| (i, i, BigInt::one())))?;
    let inc2 = IntMatrix::from_triplets(n, r2, (0..r2).map(|i| (r1 + i, i, BigInt::one())))?;
    let dst = Basis::new(core_basis(&family.core(d), n));
    let mut cols = Vec::new();
    for a in 0..=d {
        let fa = eval_morphism_with(&family.expr(a), &inc1, Exec::Sequential)?;
        let fb = eval_morphism_with(&family.expr(d - a), &inc2, Exec::Sequential)?;
        let ba = core_basis(&family.core(a), n);
        let bb = core_basis(&family.core(d - a), n);
        for ca in fa.columns() {
            for cb in fb.columns() {
                let mut col = Vec::new();
                for (i, x) in ca {
                    for (j, y) in cb {
                        let (ma, mb) = (mono(&ba[*i]), mono(&bb[*j]));
                        let (z, c) = match family {
                            Family::Gamma => mono_mul(ma, mb, true),
                            Family::Sym => mono_mul(ma, mb, false),
                            Family::Lambda => match wedge(ma, mb) {
                                Some((z, s)) => (z, BigInt::from(s)),
                                None => continue,
                            },
                        };
                        col.push((dst.index_of(&Elem::Mono(z)).unwrap(), c * x * y));
                    }
                }
                cols.push(col);
            }
        }
    }
    Ok(IntMatrix::from_columns(dst.len(), cols)?)
}

/// Compares F over Z reduced mod p with F evaluated over F_p on 20 seeded
/// random r×r matrices.
pub fn base_change_check(f: &FunctorExpr, r: usize, p: u64) -> Result<bool, FuncError> {
    base_change_check_with(f, r, p, 20, 0x5eed)
}

pub fn base_change_check_with(
    f: &FunctorExpr,
    r: usize,
    p: u64,
    trials: usize,
    seed: u64,
) -> Result<bool, FuncError> {
    if !f.is_integral() {
        return Err(FuncError::BadContext {
            name: "base_change_check".into(),
            reason: "expression must be built from Γ, Λ, S, ⊗ and ⊕".into(),
        });
    }
    let fp = FunctorExpr::mod_p(p, f.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let trip = (0..r)
            .flat_map(|i| (0..r).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, BigInt::from(rng.gen_range(-3i64..=3))))
            .collect::<Vec<_>>();
        let m = IntMatrix::from_triplets(r, r, trip)?;
        let over_z = eval_morphism(f, &m)?.reduce_mod(p);
        let over_fp = eval_morphism(&fp, &m.reduce_mod(p))?;
        if over_z != over_fp {
            return Ok(false);
        }
    }
    Ok(true)
}
