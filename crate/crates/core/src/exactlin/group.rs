use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// Finitely generated abelian group `Z^free_rank ⊕ Z/t1 ⊕ ... ⊕ Z/tk` with t1 | t2 | ... | tk.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbGroupType {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

/// Rewrites a multiset of cyclic orders as an invariant-factor chain.
/// Zeros and ones are dropped.
pub fn invariant_factors(values: impl IntoIterator<Item = u64>) -> Vec<u64> {
    let v: Vec<u64> = values.into_iter().filter(|&t| t > 1).collect();
    if v.iter().any(|&t| t > SMALL_FACTOR_LIMIT) {
        return gcd_lcm_chain(v);
    }
    // prime -> exponents of that prime over all summands
    let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for t in v {
        for (q, e) in factor_small(t) {
            by_prime.entry(q).or_default().push(e);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for (q, mut exps) in by_prime {
        exps.sort_unstable_by(|a, b| b.cmp(a));
        for (k, e) in exps.into_iter().enumerate() {
            let slot = len - 1 - k;
            out[slot] = out[slot]
                .checked_mul(q.checked_pow(e).expect("torsion order overflows u64"))
                .expect("torsion order overflows u64");
        }
    }
    out
}

const SMALL_FACTOR_LIMIT: u64 = 1 << 40;

fn factor_small(mut t: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= t {
        if t % q == 0 {
            let mut e = 0;
            while t % q == 0 {
                t /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if t > 1 {
        out.push((t, 1));
    }
    out
}

fn gcd_lcm_chain(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let g = v[i].gcd(&v[j]);
            if g != v[i] {
                let l = (v[i] as u128 / g as u128) * v[j] as u128;
                v[i] = g;
                v[j] = u64::try_from(l).expect("torsion order overflows u64");
            }
        }
    }
    v.retain(|&t| t > 1);
    v
}

impl AbGroupType {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        AbGroupType { free_rank: rank, torsion: Vec::new() }
    }

    pub fn cyclic(n: u64) -> Self {
        if n == 0 {
            Self::free(1)
        } else {
            Self::new(0, [n])
        }
    }

    /// `(Z/p)^k`.
    pub fn elementary(p: u64, k: usize) -> Self {
        Self::new(0, std::iter::repeat(p).take(k))
    }

    /// Canonicalizes an arbitrary list of cyclic orders (0 counts as a free summand).
    pub fn new(free_rank: usize, cyclic: impl IntoIterator<Item = u64>) -> Self {
        let mut free = free_rank;
        let mut tors = Vec::new();
        for t in cyclic {
            if t == 0 {
                free += 1;
            } else {
                tors.push(t);
            }
        }
        AbGroupType { free_rank: free, torsion: invariant_factors(tors) }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.torsion.iter().all(|&t| t > 1) && self.torsion.windows(2).all(|w| w[1] % w[0] == 0)
    }

    pub fn direct_sum(&self, other: &AbGroupType) -> AbGroupType {
        AbGroupType::new(
            self.free_rank + other.free_rank,
            self.torsion.iter().chain(&other.torsion).copied(),
        )
    }

    pub fn times(&self, k: usize) -> AbGroupType {
        AbGroupType::new(
            self.free_rank * k,
            self.torsion.iter().flat_map(|&t| std::iter::repeat(t).take(k)),
        )
    }

    pub fn tensor(&self, other: &AbGroupType) -> AbGroupType {
        let mut cyc = Vec::new();
        for &t in &self.torsion {
            cyc.extend(std::iter::repeat(t).take(other.free_rank));
        }
        for &u in &other.torsion {
            cyc.extend(std::iter::repeat(u).take(self.free_rank));
        }
        for &t in &self.torsion {
            for &u in &other.torsion {
                cyc.push(t.gcd(&u));
            }
        }
        AbGroupType::new(self.free_rank * other.free_rank, cyc)
    }

    pub fn tor(&self, other: &AbGroupType) -> AbGroupType {
        let mut cyc = Vec::new();
        for &t in &self.torsion {
            for &u in &other.torsion {
                cyc.push(t.gcd(&u));
            }
        }
        AbGroupType::new(0, cyc)
    }

    /// Exponent of p in the order of the torsion subgroup.
    pub fn p_exponent(&self, p: u64) -> u32 {
        self.torsion
            .iter()
            .map(|&t| {
                let mut t = t;
                let mut e = 0;
                while t % p == 0 {
                    t /= p;
                    e += 1;
                }
                e
            })
            .sum()
    }

    /// Number of cyclic summands of order divisible by p (the F_p-dimension of A ⊗ F_p, torsion part).
    pub fn p_rank(&self, p: u64) -> usize {
        self.torsion.iter().filter(|&&t| t % p == 0).count()
    }

    /// Primes dividing the torsion order.
    pub fn primes(&self) -> Vec<u64> {
        let mut out: Vec<u64> =
            self.torsion.iter().flat_map(|&t| factor_small(t).into_iter().map(|(q, _)| q)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Orders of the primary cyclic summands, sorted by prime and then by exponent.
    pub fn primary_parts(&self) -> Vec<u64> {
        let mut parts: Vec<(u64, u64)> = self
            .torsion
            .iter()
            .flat_map(|&t| factor_small(t).into_iter().map(|(q, e)| (q, q.pow(e))))
            .collect();
        parts.sort_unstable();
        parts.into_iter().map(|(_, pe)| pe).collect()
    }

    pub fn torsion_order(&self) -> u128 {
        self.torsion.iter().map(|&t| t as u128).product()
    }
}

impl fmt::Display for AbGroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            k => parts.push(format!("Z^{k}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Degree-indexed family of groups; zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedGroup {
    entries: BTreeMap<i64, AbGroupType>,
}

impl GradedGroup {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, degree: i64) -> AbGroupType {
        self.entries.get(&degree).cloned().unwrap_or_default()
    }

    /// Adds `g` as a direct summand in the given degree.
    pub fn add(&mut self, degree: i64, g: &AbGroupType) {
        if g.is_zero() {
            return;
        }
        let cur = self.get(degree);
        self.entries.insert(degree, cur.direct_sum(g));
    }

    pub fn set(&mut self, degree: i64, g: AbGroupType) {
        if g.is_zero() {
            self.entries.remove(&degree);
        } else {
            self.entries.insert(degree, g);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &AbGroupType)> + '_ {
        self.entries.iter().map(|(d, g)| (*d, g))
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.entries.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn shift(&self, by: i64) -> GradedGroup {
        GradedGroup { entries: self.entries.iter().map(|(d, g)| (d + by, g.clone())).collect() }
    }

    pub fn direct_sum(&self, other: &GradedGroup) -> GradedGroup {
        let mut out = self.clone();
        for (d, g) in other.iter() {
            out.add(d, g);
        }
        out
    }

    /// Homology of the derived tensor product of two complexes of free groups
    /// with the given homology (Künneth).
    pub fn derived_tensor(&self, other: &GradedGroup) -> GradedGroup {
        let mut out = GradedGroup::new();
        for (a, g) in self.iter() {
            for (b, h) in other.iter() {
                out.add(a + b, &g.tensor(h));
                out.add(a + b + 1, &g.tor(h));
            }
        }
        out
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.entries.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.entries.keys().next_back().copied()
    }
}

impl FromIterator<(i64, AbGroupType)> for GradedGroup {
    fn from_iter<T: IntoIterator<Item = (i64, AbGroupType)>>(iter: T) -> Self {
        let mut g = GradedGroup::new();
        for (d, a) in iter {
            g.add(d, &a);
        }
        g
    }
}

impl fmt::Display for GradedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.iter().map(|(d, g)| format!("[{d}] {g}")).collect();
        write!(f, "{}", parts.join("; "))
    }
}
