//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

pub mod tables;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Textbook dense Smith form: pivot on the smallest entry, clear its row and
/// column, then enforce divisibility of the remaining block by adding rows.
pub fn dense_smith(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let n = a.len();
    let m = if n == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < n.min(m) {
        let mut best: Option<(BigInt, usize, usize)> = None;
        for i in t..n {
            for j in t..m {
                if !a[i][j].is_zero() && best.as_ref().map_or(true, |(b, _, _)| a[i][j].abs() < *b) {
                    best = Some((a[i][j].abs(), i, j));
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut dirty = false;
        for i in t + 1..n {
            let q = a[i][t].div_floor(&a[t][t]);
            for j in t..m {
                let v = &a[i][j] - &q * &a[t][j];
                a[i][j] = v;
            }
            dirty |= !a[i][t].is_zero();
        }
        for j in t + 1..m {
            let q = a[t][j].div_floor(&a[t][t]);
            for i in t..n {
                let v = &a[i][j] - &q * &a[i][t];
                a[i][j] = v;
            }
            dirty |= !a[t][j].is_zero();
        }
        if dirty {
            continue;
        }
        // divisibility: if some entry is not a multiple of the pivot, fold its row in
        let piv = a[t][t].clone();
        let bad = (t + 1..n).find(|&i| (t + 1..m).any(|j| !(&a[i][j] % &piv).is_zero()));
        if let Some(i) = bad {
            for j in t..m {
                let v = &a[t][j] + &a[i][j];
                a[t][j] = v;
            }
            continue;
        }
        diag.push(piv.abs());
        t += 1;
    }
    diag
}

/// Rank over Q by fraction-free (Bareiss) elimination.
pub fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let n = a.len();
    let m = if n == 0 { 0 } else { a[0].len() };
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..m {
        let Some(pr) = (rank..n).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, pr);
        for r in rank + 1..n {
            for k in c + 1..m {
                let v = (&a[rank][c] * &a[r][k] - &a[r][c] * &a[rank][k]) / &prev;
                a[r][k] = v;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
        if rank == n {
            break;
        }
    }
    rank
}

pub fn to_big(a: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    a.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

/// Homology ker(d_out)/im(d_in) at a term of dimension `dim`, as (free rank, sorted torsion).
pub fn dense_homology(dim: usize, d_out: &[Vec<i64>], d_in: &[Vec<i64>]) -> (usize, Vec<u64>) {
    let r_out = if d_out.is_empty() { 0 } else { bareiss_rank(to_big(d_out)) };
    let smith = if d_in.is_empty() || d_in[0].is_empty() { vec![] } else { dense_smith(to_big(d_in)) };
    let r_in = smith.len();
    let tors: Vec<u64> = smith.iter().filter(|v| !v.is_one()).map(|v| v.to_u64().unwrap()).collect();
    (dim - r_out - r_in, tors)
}

pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k as u128 {
        r = r * (n as u128 - i) / (i + 1);
    }
    r as u64
}

/// `n` choose `k` with the convention that negative `n` or `k` gives 0.
pub fn binom_i(n: i64, k: i64) -> u64 {
    if n < 0 || k < 0 {
        0
    } else {
        binom(n as u64, k as u64)
    }
}

/// Exponent vectors of total degree d in r variables, ascending lexicographic.
pub fn exponent_vectors(r: usize, d: u32) -> Vec<Vec<u32>> {
    if r == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=d {
        for mut rest in exponent_vectors(r - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn sorted_rep(e: &[u32]) -> Vec<usize> {
    e.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat(i).take(k as usize)).collect()
}

fn distinct_permutations(v: &[usize]) -> Vec<Vec<usize>> {
    if v.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut seen = Vec::new();
    for k in 0..v.len() {
        if seen.contains(&v[k]) {
            continue;
        }
        seen.push(v[k]);
        let mut rest = v.to_vec();
        let x = rest.remove(k);
        for mut p in distinct_permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Γ^d(f) computed on symmetric invariant tensors: γ_e is the orbit sum of
/// the sorted tensor of e, and the coefficient of γ_g in the image is read
/// off at the sorted tensor of g.
pub fn gamma_by_invariant_tensors(f: &[Vec<i64>], cols: usize, d: u32) -> Vec<Vec<BigInt>> {
    let rows = f.len();
    let src = exponent_vectors(cols, d);
    let dst = exponent_vectors(rows, d);
    let mut out = vec![vec![BigInt::zero(); src.len()]; dst.len()];
    for (c, e) in src.iter().enumerate() {
        let orbit = distinct_permutations(&sorted_rep(e));
        for (r, g) in dst.iter().enumerate() {
            let j = sorted_rep(g);
            let mut acc = BigInt::zero();
            for t in &orbit {
                let mut prod = BigInt::one();
                for k in 0..d as usize {
                    prod *= f[j[k]][t[k]];
                }
                acc += prod;
            }
            out[r][c] = acc;
        }
    }
    out
}

/// Coefficient of t^d in ((1 - t^p)/(1 - t))^r.
pub fn truncated_count(p: u64, d: u32, r: usize) -> i64 {
    let mut poly = vec![0i64; d as usize + 1];
    poly[0] = 1;
    for _ in 0..r {
        let mut next = vec![0i64; d as usize + 1];
        for (i, &c) in poly.iter().enumerate() {
            for k in 0..p as usize {
                if i + k <= d as usize {
                    next[i + k] += c;
                }
            }
        }
        poly = next;
    }
    poly[d as usize]
}
