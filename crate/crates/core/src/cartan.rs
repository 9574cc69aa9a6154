//! Admissible words over {σ, γ_p, φ_p} and the stable homology of K(A, n)
//! for free A, computed from the word enumeration and from the sequence
//! reformulation St(A).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combi::{binom, ipow, prime_power, primes_up_to};
use crate::exactlin::{is_prime, AbGroupType, GradedGroup};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CartanError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid admissible word {word}: {reason}")]
    InvalidWord { word: String, reason: String },
    #[error("invalid sequence {0:?}: must be nonempty, nonincreasing and positive")]
    InvalidSequence(Vec<u32>),
    #[error("word {0} is not restricted")]
    NotRestricted(String),
    #[error("word {0} is not of the expected type")]
    WrongType(String),
    #[error("stable homology disagrees in degree {degree}: words give {words}, sequences give {sequences}")]
    Mismatch { degree: i64, words: String, sequences: String },
}

type Result<T> = std::result::Result<T, CartanError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    Sigma,
    Gamma,
    Phi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WordType {
    /// ends with σ
    First,
    /// ends with φ_p
    Second,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdmissibleWord {
    p: u64,
    letters: Vec<Letter>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordStats {
    pub degree: u64,
    pub height: u64,
    pub weight: u64,
}

impl WordStats {
    pub fn stable_degree(&self) -> i64 {
        self.degree as i64 - self.height as i64
    }
}

impl AdmissibleWord {
    pub fn new(p: u64, letters: Vec<Letter>) -> Result<Self> {
        if !is_prime(p) {
            return Err(CartanError::NotPrime(p));
        }
        let w = AdmissibleWord { p, letters };
        w.validate()?;
        Ok(w)
    }

    fn validate(&self) -> Result<()> {
        let bad = |reason: &str| {
            Err(CartanError::InvalidWord { word: self.to_string(), reason: reason.to_string() })
        };
        match (self.letters.first(), self.letters.last()) {
            (None, _) => return bad("empty"),
            (Some(Letter::Gamma), _) => return bad("starts with γ"),
            (_, Some(Letter::Gamma)) => return bad("ends with γ"),
            _ => {}
        }
        let mut sigmas = 0usize;
        for l in self.letters.iter().rev() {
            match l {
                Letter::Sigma => sigmas += 1,
                _ if sigmas % 2 == 1 => return bad("odd number of σ to the right of γ or φ"),
                _ => {}
            }
        }
        Ok(())
    }

    /// Parses a word written with `s`, `g`, `f` (for σ, γ_p, φ_p); `s2` abbreviates `ss`.
    pub fn parse(p: u64, text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        let mut chars = text.chars().filter(|c| !c.is_whitespace()).peekable();
        while let Some(c) = chars.next() {
            let l = match c {
                's' | 'σ' => Letter::Sigma,
                'g' | 'γ' => Letter::Gamma,
                'f' | 'φ' => Letter::Phi,
                _ => {
                    return Err(CartanError::InvalidWord {
                        word: text.to_string(),
                        reason: format!("unknown letter {c}"),
                    })
                }
            };
            let mut count = 0usize;
            while let Some(d) = chars.peek().and_then(|d| d.to_digit(10)) {
                count = count * 10 + d as usize;
                chars.next();
            }
            letters.extend(std::iter::repeat(l).take(count.max(1)));
        }
        AdmissibleWord::new(p, letters)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn word_type(&self) -> WordType {
        match self.letters.last() {
            Some(Letter::Phi) => WordType::Second,
            _ => WordType::First,
        }
    }

    pub fn is_restricted(&self) -> bool {
        !self.letters.contains(&Letter::Phi)
    }

    /// Words indexing the stable groups begin with σγ_p.
    pub fn starts_sigma_gamma(&self) -> bool {
        self.letters.starts_with(&[Letter::Sigma, Letter::Gamma])
    }

    pub fn count(&self, l: Letter) -> usize {
        self.letters.iter().filter(|&&x| x == l).count()
    }
}

impl fmt::Display for AdmissibleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == l {
                j += 1;
            }
            let sym = match l {
                Letter::Sigma => "σ".to_string(),
                Letter::Gamma => format!("γ{}", self.p),
                Letter::Phi => format!("φ{}", self.p),
            };
            if j - i == 1 {
                write!(f, "{sym}")?;
            } else {
                write!(f, "{sym}^{}", j - i)?;
            }
            i = j;
        }
        Ok(())
    }
}

/// deg(σβ) = 1 + deg β, deg(γβ) = p·deg β, deg(φβ) = 2 + p·deg β, read right to left.
pub fn word_stats(w: &AdmissibleWord) -> WordStats {
    let mut degree = 0u64;
    let mut height = 0u64;
    for l in w.letters.iter().rev() {
        match l {
            Letter::Sigma => {
                degree += 1;
                height += 1;
            }
            Letter::Gamma => degree *= w.p,
            Letter::Phi => {
                degree = 2 + w.p * degree;
                height += 1;
            }
        }
    }
    let r = (w.count(Letter::Gamma) + w.count(Letter::Phi)) as u32;
    let weight = match w.word_type() {
        WordType::First => ipow(w.p, r),
        WordType::Second => ipow(w.p, r - 1),
    };
    WordStats { degree, height, weight }
}

/// All admissible words beginning with σγ_p of degree at most `max_degree`,
/// sorted. With `restricted` only φ_p-free words are returned.
pub fn enumerate_words(p: u64, max_degree: u64, restricted: bool) -> Vec<AdmissibleWord> {
    assert!(is_prime(p), "enumerate_words needs a prime");
    let mut out = Vec::new();
    // suffixes are built right to left: (reversed letters, degree, σ count)
    let mut stack: Vec<(Vec<Letter>, u64, usize)> = Vec::new();
    if max_degree >= 1 {
        stack.push((vec![Letter::Sigma], 1, 1));
    }
    if !restricted && max_degree >= 2 {
        stack.push((vec![Letter::Phi], 2, 0));
    }
    while let Some((rev, deg, sigmas)) = stack.pop() {
        let n = rev.len();
        if n >= 2 && rev[n - 1] == Letter::Sigma && rev[n - 2] == Letter::Gamma {
            let letters: Vec<Letter> = rev.iter().rev().copied().collect();
            out.push(AdmissibleWord { p, letters });
        }
        if deg < max_degree {
            let mut next = rev.clone();
            next.push(Letter::Sigma);
            stack.push((next, deg + 1, sigmas + 1));
        }
        if sigmas % 2 == 0 {
            if deg * p <= max_degree {
                let mut next = rev.clone();
                next.push(Letter::Gamma);
                stack.push((next, deg * p, sigmas));
            }
            if !restricted && 2 + deg * p <= max_degree {
                let mut next = rev;
                next.push(Letter::Phi);
                stack.push((next, 2 + deg * p, sigmas));
            }
        }
    }
    out.sort();
    out
}

/// Replaces the final σ² of a first-type word by φ_p.
pub fn xi(w: &AdmissibleWord) -> Result<AdmissibleWord> {
    let n = w.letters.len();
    if w.word_type() != WordType::First || n < 2 || w.letters[n - 2] != Letter::Sigma {
        return Err(CartanError::WrongType(w.to_string()));
    }
    let mut letters = w.letters[..n - 2].to_vec();
    letters.push(Letter::Phi);
    AdmissibleWord::new(w.p, letters)
}

pub fn xi_inverse(w: &AdmissibleWord) -> Result<AdmissibleWord> {
    if w.word_type() != WordType::Second {
        return Err(CartanError::WrongType(w.to_string()));
    }
    let mut letters = w.letters[..w.letters.len() - 1].to_vec();
    letters.extend([Letter::Sigma, Letter::Sigma]);
    AdmissibleWord::new(w.p, letters)
}

/// Replaces every φ_p by σ²γ_p. Two first-type words are equivalent when
/// their substitutions agree.
pub fn sigma2gamma_substitution(w: &AdmissibleWord) -> AdmissibleWord {
    let mut letters = Vec::with_capacity(w.letters.len() + 2 * w.count(Letter::Phi));
    for &l in &w.letters {
        if l == Letter::Phi {
            letters.extend([Letter::Sigma, Letter::Sigma, Letter::Gamma]);
        } else {
            letters.push(l);
        }
    }
    AdmissibleWord { p: w.p, letters }
}

/// A nonincreasing sequence t_1 ≥ ... ≥ t_m > 0 attached to a prime.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AlphaSeq {
    p: u64,
    t: Vec<u32>,
}

impl AlphaSeq {
    pub fn new(p: u64, t: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(CartanError::NotPrime(p));
        }
        if t.is_empty() || t.contains(&0) || t.windows(2).any(|w| w[0] < w[1]) {
            return Err(CartanError::InvalidSequence(t));
        }
        Ok(AlphaSeq { p, t })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn terms(&self) -> &[u32] {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// number of distinct values
    pub fn o(&self) -> usize {
        1 + self.t.windows(2).filter(|w| w[0] != w[1]).count()
    }

    pub fn degree(&self) -> u64 {
        2 * self.t.iter().map(|&t| ipow(self.p, t)).sum::<u64>()
    }

    pub fn height(&self) -> u64 {
        2 * self.t.len() as u64
    }

    /// degree − height = 2Σ(p^{t_j} − 1)
    pub fn stable_degree(&self) -> i64 {
        self.degree() as i64 - self.height() as i64
    }

    pub fn weight(&self) -> u64 {
        ipow(self.p, self.t[0])
    }
}

impl fmt::Display for AlphaSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.t.iter().map(u32::to_string).collect();
        write!(f, "{{{};{}}}", t.join(","), self.p)
    }
}

/// Sequences for the prime p with 2Σ(p^{t_j} − 1) ≤ max_stable, sorted.
pub fn alpha_sequences(p: u64, max_stable: i64) -> Vec<AlphaSeq> {
    fn rec(p: u64, budget: i64, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<AlphaSeq>) {
        for t in 1..=cap {
            let cost = 2 * (ipow(p, t) as i64 - 1);
            if cost > budget {
                break;
            }
            cur.push(t);
            out.push(AlphaSeq { p, t: cur.clone() });
            rec(p, budget - cost, t, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if max_stable >= 2 * (p as i64 - 1) {
        rec(p, max_stable, 64, &mut Vec::new(), &mut out);
    }
    out.sort();
    out
}

/// Reads the block counts k_1..k_s of a restricted word σγ(σ²)^{k_1}γ...γ(σ²)^{k_s}.
fn block_counts(w: &AdmissibleWord) -> Result<Vec<usize>> {
    if !w.is_restricted() {
        return Err(CartanError::NotRestricted(w.to_string()));
    }
    if !w.starts_sigma_gamma() || w.word_type() != WordType::First {
        return Err(CartanError::WrongType(w.to_string()));
    }
    let mut ks = Vec::new();
    let mut run = 0usize;
    for &l in &w.letters[2..] {
        if l == Letter::Gamma {
            ks.push(run / 2);
            run = 0;
        } else {
            run += 1;
        }
    }
    ks.push(run / 2);
    Ok(ks)
}

pub fn chi(w: &AdmissibleWord) -> Result<AlphaSeq> {
    let ks = block_counts(w)?;
    let mut t = Vec::new();
    for (i, &k) in ks.iter().enumerate().rev() {
        t.extend(std::iter::repeat(i as u32 + 1).take(k));
    }
    AlphaSeq::new(w.p, t)
}

pub fn chi_inverse(a: &AlphaSeq) -> AdmissibleWord {
    let s = a.t[0] as usize;
    let mut letters = vec![Letter::Sigma, Letter::Gamma];
    for j in 1..=s {
        if j > 1 {
            letters.push(Letter::Gamma);
        }
        let k = a.t.iter().filter(|&&t| t as usize == j).count();
        letters.extend(std::iter::repeat(Letter::Sigma).take(2 * k));
    }
    AdmissibleWord { p: a.p, letters }
}

/// H_*(A ⊗^L Z/p ⊗^L ... ⊗^L Z/p) for A = Z^r, by iterated Künneth.
pub fn derived_tensor_homology(r: usize, p: u64, n_fold: usize) -> GradedGroup {
    let zp: GradedGroup = [(0, AbGroupType::cyclic(p))].into_iter().collect();
    let mut h: GradedGroup = [(0, AbGroupType::free(r))].into_iter().collect();
    for _ in 0..n_fold {
        h = h.derived_tensor(&zp);
    }
    h
}

/// Largest stable degree reached by σγ_p-words of degree ≤ 2·i_max + 1 is
/// at least i_max, because h ≤ 1 + (deg − h) for such words.
fn word_degree_bound(i_max: i64) -> u64 {
    (2 * i_max.max(0) + 1) as u64
}

fn relevant_primes(i_max: i64) -> Vec<u64> {
    if i_max < 2 {
        return Vec::new();
    }
    primes_up_to((i_max / 2 + 1) as u64)
}

/// First-type σγ_p-words with stable degree ≤ i_max, over all relevant primes.
pub fn stable_words(i_max: i64) -> Vec<(AdmissibleWord, WordStats)> {
    let mut out = Vec::new();
    for p in relevant_primes(i_max) {
        for w in enumerate_words(p, word_degree_bound(i_max), false) {
            let st = word_stats(&w);
            if w.word_type() == WordType::First && st.stable_degree() <= i_max {
                out.push((w, st));
            }
        }
    }
    out
}

/// Stable homology from admissible words: A in degree 0 plus A/p in degree
/// deg − h for every first-type word (the _pA terms vanish for free A).
pub fn stable_homology_words(r: usize, i_max: i64) -> GradedGroup {
    let mut g = GradedGroup::new();
    if i_max >= 0 {
        g.add(0, &AbGroupType::free(r));
    }
    for (w, st) in stable_words(i_max) {
        g.add(st.stable_degree(), &AbGroupType::elementary(w.p, r));
    }
    g
}

/// Stable homology from St(A) = ⊕_α A ⊗^L (Z/p)^{⊗o(α)} [2Σ(p^{t_j} − 1)].
pub fn stable_homology_st(r: usize, i_max: i64) -> GradedGroup {
    let mut g = GradedGroup::new();
    if i_max >= 0 {
        g.add(0, &AbGroupType::free(r));
    }
    for p in relevant_primes(i_max) {
        for a in alpha_sequences(p, i_max) {
            let h = derived_tensor_homology(r, p, a.o()).shift(a.stable_degree());
            for (d, grp) in h.iter() {
                if d <= i_max {
                    g.add(d, grp);
                }
            }
        }
    }
    g
}

/// H^st_i(Z^r) for i ≤ i_max, computed both ways.
pub fn stable_homology(r: usize, i_max: i64) -> Result<GradedGroup> {
    let words = stable_homology_words(r, i_max);
    let seqs = stable_homology_st(r, i_max);
    for i in 0..=i_max {
        if words.get(i) != seqs.get(i) {
            return Err(CartanError::Mismatch {
                degree: i,
                words: words.get(i).to_string(),
                sequences: seqs.get(i).to_string(),
            });
        }
    }
    Ok(words)
}

/// L^st_i Γ^{p^e}(Z^r) for i ≤ i_max. Each α with t_1 = e contributes
/// A ⊗^L (Z/p)^{⊗o(α)} shifted by 2Σ_{j≥2}(p^{t_j} − 1).
pub fn stable_gamma(p: u64, e: u32, r: usize, i_max: i64) -> Result<GradedGroup> {
    if !is_prime(p) {
        return Err(CartanError::NotPrime(p));
    }
    let mut g = GradedGroup::new();
    if e == 0 {
        if i_max >= 0 {
            g.add(0, &AbGroupType::free(r));
        }
        return Ok(g);
    }
    let lead = 2 * (ipow(p, e) as i64 - 1);
    for a in alpha_sequences(p, i_max + lead) {
        if a.t[0] != e {
            continue;
        }
        let h = derived_tensor_homology(r, p, a.o()).shift(a.stable_degree() - lead);
        for (d, grp) in h.iter() {
            if d <= i_max {
                g.add(d, grp);
            }
        }
    }
    Ok(g)
}

/// L^st_i Γ^d(Z^r); zero unless d is a prime power.
pub fn stable_gamma_d(d: u64, r: usize, i_max: i64) -> GradedGroup {
    match prime_power(d) {
        Some((p, e)) => stable_gamma(p, e, r, i_max).expect("prime_power returns a prime"),
        None if d == 1 => stable_gamma(2, 0, r, i_max).expect("2 is prime"),
        None => GradedGroup::new(),
    }
}

/// Size of the σ²γ-class of a restricted word, split by the number of φ
/// substitutions: entry i is C(o−1, i).
pub fn class_profile(a: &AlphaSeq) -> BTreeMap<usize, u128> {
    let o = a.o() as u64;
    (0..o).map(|i| (i as usize, binom(o - 1, i))).collect()
}
