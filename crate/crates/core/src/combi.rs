//! Small combinatorial helpers shared by the evaluators.

use num_bigint::BigInt;
use num_traits::One;

pub(crate) fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k as u128 {
        r = r * (n as u128 - i) / (i + 1);
    }
    r
}

/// Binomial with the convention C(n, k) = 0 when n < 0 or k < 0.
pub(crate) fn binom_i(n: i64, k: i64) -> u128 {
    if n < 0 || k < 0 {
        0
    } else {
        binom(n as u64, k as u64)
    }
}

pub(crate) fn binom_big(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Multinomial coefficient (Σ parts)! / Π parts!.
pub(crate) fn multinomial(parts: &[u32]) -> BigInt {
    let mut total = 0u64;
    let mut r = BigInt::one();
    for &a in parts {
        total += a as u64;
        r *= binom_big(total, a as u64);
    }
    r
}

/// All vectors of `len` nonnegative integers summing to `total`, in lexicographic order.
pub(crate) fn compositions(total: u32, len: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; len];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for a in (0..=left).rev() {
            cur[pos] = a;
            rec(pos + 1, left - a, cur, out);
        }
    }
    if len == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, total, &mut cur, &mut out);
    out.reverse();
    out
}

/// Strictly increasing index tuples of length k from 0..n, lexicographic.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub(crate) fn ipow(p: u64, e: u32) -> u64 {
    p.checked_pow(e).expect("prime power overflow")
}

/// If d = p^k for a prime p, returns (p, k).
pub(crate) fn prime_power(d: u64) -> Option<(u64, u32)> {
    if d < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= d && d % p != 0 {
        p += 1;
    }
    if d % p != 0 {
        p = d;
    }
    let mut k = 0;
    let mut x = d;
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    if x == 1 {
        Some((p, k))
    } else {
        None
    }
}

pub(crate) fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&q| (2..q).take_while(|k| k * k <= q).all(|k| q % k != 0)).collect()
}
