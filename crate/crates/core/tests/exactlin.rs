mod common;

use common::{bareiss_rank, dense_homology, dense_smith, to_big};
use dpow_core::exactlin::{
    fp_rank, group_of_two_term, invariant_factors, kernel_mod_p, smith_normal_form, AbGroupType,
    ChainComplex, IntMatrix, LinError,
};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn factors(m: &IntMatrix) -> Vec<i64> {
    smith_normal_form(m).unwrap().invariant_factors().iter().map(|v| v.to_i64().unwrap()).collect()
}

#[test]
fn smith_small_examples() {
    assert_eq!(factors(&IntMatrix::from_dense(&[vec![2, 0], vec![0, 4]])), vec![2, 4]);
    assert_eq!(factors(&IntMatrix::from_dense(&[vec![2, 0], vec![0, 3]])), vec![1, 6]);
    assert_eq!(smith_normal_form(&IntMatrix::zeros(0, 0)).unwrap().rank(), 0);
    assert_eq!(factors(&IntMatrix::from_dense(&[vec![4, 6], vec![6, 9]])), vec![1]);
}

#[test]
fn smith_refuses_modular_input() {
    let m = IntMatrix::identity(2).reduce_mod(3);
    assert_eq!(smith_normal_form(&m), Err(LinError::ModulusSet));
}

#[test]
fn fp_rank_examples() {
    assert_eq!(fp_rank(&IntMatrix::identity(4), 3).unwrap(), 4);
    assert_eq!(fp_rank(&IntMatrix::from_dense(&[vec![2]]), 2).unwrap(), 0);
    assert_eq!(fp_rank(&IntMatrix::from_dense(&[vec![4]]), 2).unwrap(), 0);
    assert!(matches!(fp_rank(&IntMatrix::identity(2), 4), Err(LinError::NotPrime(4))));
}

#[test]
fn two_term_groups() {
    assert_eq!(group_of_two_term(&IntMatrix::from_dense(&[vec![2]])).unwrap(), AbGroupType::cyclic(2));
    assert_eq!(
        group_of_two_term(&IntMatrix::from_dense(&[vec![1, 0], vec![0, 6]])).unwrap(),
        AbGroupType::cyclic(6)
    );
    assert_eq!(group_of_two_term(&IntMatrix::zeros(3, 2)).unwrap(), AbGroupType::free(3));
}

#[test]
fn homology_examples() {
    // 0 -> Z --2--> Z -> 0 in degrees 1, 0
    let c = ChainComplex::new(
        0,
        vec![1, 1],
        vec![IntMatrix::zeros(0, 1), IntMatrix::from_dense(&[vec![2]])],
    )
    .unwrap();
    assert_eq!(c.homology_at(0).unwrap(), AbGroupType::cyclic(2));
    assert_eq!(c.homology_at(1).unwrap(), AbGroupType::zero());
    let z = ChainComplex::zero(5, vec![3]);
    assert_eq!(z.homology_at(5).unwrap(), AbGroupType::free(3));
    assert!(z.homology_at(4).is_err());
}

#[test]
fn square_zero_is_enforced() {
    let d = IntMatrix::from_dense(&[vec![1]]);
    let err = ChainComplex::new(0, vec![1, 1, 1], vec![IntMatrix::zeros(0, 1), d.clone(), d]);
    assert_eq!(err.unwrap_err(), LinError::NotAComplex(2));
}

#[test]
fn invariant_factor_canonical_form() {
    assert_eq!(invariant_factors([2, 3]), vec![6]);
    assert_eq!(invariant_factors([4, 2, 3, 1]), vec![2, 12]);
    assert_eq!(AbGroupType::new(1, [0, 4, 6]).to_string(), "Z^2 ⊕ Z/2 ⊕ Z/12");
    assert_eq!(AbGroupType::zero().to_string(), "0");
    assert_eq!(AbGroupType::new(1, [0, 4, 6, 5]).primary_parts(), vec![2, 4, 3, 5]);
    assert!(AbGroupType::free(2).primary_parts().is_empty());
    let json = serde_json::to_string(&AbGroupType::new(3, [2])).unwrap();
    assert_eq!(json, r#"{"free_rank":3,"torsion":[2]}"#);
}

#[test]
fn kernel_mod_p_spans_kernel() {
    let m = IntMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]);
    let k = kernel_mod_p(&m, 2).unwrap();
    assert_eq!(k.cols(), 1);
    assert!(m.mul(&k.lift()).unwrap().reduce_mod(2).is_zero());
}

fn random_sparse(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64, bound: i64) -> Vec<Vec<i64>> {
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| if rng.gen_bool(density) { rng.gen_range(-bound..=bound) } else { 0 })
                .collect()
        })
        .collect()
}

#[test]
fn smith_matches_dense_oracle_on_sparse_20x20() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..40 {
        let a = random_sparse(&mut rng, 20, 20, 0.15, 6);
        let expect = dense_smith(to_big(&a));
        let got = smith_normal_form(&IntMatrix::from_dense(&a)).unwrap().invariant_factors();
        assert_eq!(got, expect, "matrix {a:?}");
    }
}

#[test]
fn large_dense_residual_matches_dense_oracle() {
    // dense blocks past the modular threshold, including rank-deficient and
    // structured torsion cases
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for (rows, cols, density) in [(24, 24, 0.6), (30, 22, 0.5), (22, 34, 0.7), (28, 28, 0.25)] {
        let a = random_sparse(&mut rng, rows, cols, density, 5);
        let expect = dense_smith(to_big(&a));
        let got = smith_normal_form(&IntMatrix::from_dense(&a)).unwrap().invariant_factors();
        assert_eq!(got, expect, "{rows}x{cols}");
    }
    let n = 24;
    let d: Vec<i64> = (0..n).map(|i| [2, 4, 12, 1, 0, 3, 6][i % 7]).collect();
    let u = IntMatrix::from_dense(&unimodular(&mut rng, n));
    let v = IntMatrix::from_dense(&unimodular(&mut rng, n));
    let diag: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| if i == j { d[i] } else { 0 }).collect()).collect();
    let m = u.mul(&IntMatrix::from_dense(&diag)).unwrap().mul(&v).unwrap();
    let expect = dense_smith(to_big(&diag));
    assert_eq!(smith_normal_form(&m).unwrap().invariant_factors(), expect);
}

#[test]
fn big_entries_promote_to_bigint() {
    let huge = i64::MAX / 3;
    let a = vec![vec![huge, huge - 1], vec![huge - 7, huge + 5]];
    let expect = dense_smith(to_big(&a));
    let got = smith_normal_form(&IntMatrix::from_dense(&a)).unwrap().invariant_factors();
    assert_eq!(got, expect);
    let mut m = IntMatrix::from_dense(&[vec![3]]);
    m = m.scale(&BigInt::from(10).pow(40));
    assert_eq!(smith_normal_form(&m).unwrap().invariant_factors(), vec![BigInt::from(3) * BigInt::from(10).pow(40)]);
}

fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let k = rng.gen_range(-2..=2);
        for c in 0..n {
            u[i][c] += k * u[j][c];
        }
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_is_invariant_under_unimodular_change(seed in any::<u64>(), rows in 1usize..8, cols in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_sparse(&mut rng, rows, cols, 0.5, 4);
        let u = IntMatrix::from_dense(&unimodular(&mut rng, rows));
        let v = IntMatrix::from_dense(&unimodular(&mut rng, cols));
        let m = IntMatrix::from_dense(&a);
        let uav = u.mul(&m).unwrap().mul(&v).unwrap();
        prop_assert_eq!(
            smith_normal_form(&m).unwrap().invariant_factors(),
            smith_normal_form(&uav).unwrap().invariant_factors()
        );
    }

    #[test]
    fn fp_rank_counts_factors_not_divisible_by_p(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_sparse(&mut rng, 7, 9, 0.4, 6);
        let m = IntMatrix::from_dense(&a);
        let s = smith_normal_form(&m).unwrap();
        let divisible = s.invariant_factors().iter().filter(|f| (*f % p as i64) == BigInt::from(0)).count();
        prop_assert_eq!(fp_rank(&m, p).unwrap(), s.rank() - divisible);
        prop_assert_eq!(s.rank(), bareiss_rank(to_big(&a)));
    }
}

/// 500 random two-step complexes built as d1 = A, d2 = B with A·B = 0 by
/// choosing B inside the kernel; compared against the dense oracle.
#[test]
fn homology_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for case in 0..500 {
        let n0 = rng.gen_range(1..=12);
        let n1 = rng.gen_range(1..=12);
        let n2 = rng.gen_range(1..=12);
        // d1: C1 -> C0 of low rank, d2 = K·R with columns of K in ker d1
        let a = random_sparse(&mut rng, n0, n1, 0.35, 4);
        let d1 = IntMatrix::from_dense(&a);
        let kernel: Vec<Vec<i64>> = integer_kernel(&a);
        let d2 = if kernel.is_empty() {
            vec![vec![0i64; n2]; n1]
        } else {
            let kcols = kernel.len();
            let r = random_sparse(&mut rng, kcols, n2, 0.5, 3);
            (0..n1)
                .map(|i| (0..n2).map(|j| (0..kcols).map(|k| kernel[k][i] * r[k][j]).sum()).collect())
                .collect()
        };
        let c = ChainComplex::new(
            0,
            vec![n0, n1, n2],
            vec![IntMatrix::zeros(0, n0), d1, IntMatrix::from_dense(&d2)],
        )
        .unwrap();
        let (free, mut tors) = dense_homology(n1, &a, &d2);
        tors = invariant_factors(tors);
        let h = c.homology_at(1).unwrap();
        assert_eq!((h.free_rank, h.torsion.clone()), (free, tors), "case {case}");
        let (free0, tors0) = dense_homology(n0, &[], &a);
        assert_eq!(c.homology_at(0).unwrap(), AbGroupType::new(free0, tors0), "case {case}");
    }
}

/// Integer kernel basis vectors (as rows) by dense column-style elimination.
fn integer_kernel(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let m = a[0].len();
    // augmented [A^T | I], row-reduce over Z on the left block
    let mut rows: Vec<(Vec<i64>, Vec<i64>)> = (0..m)
        .map(|j| ((0..n).map(|i| a[i][j]).collect(), (0..m).map(|k| i64::from(k == j)).collect()))
        .collect();
    let mut r0 = 0;
    for c in 0..n {
        loop {
            let nz: Vec<usize> = (r0..m).filter(|&r| rows[r].0[c] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&r) = nz.first() {
                    rows.swap(r0, r);
                    r0 += 1;
                }
                break;
            }
            let piv = *nz.iter().min_by_key(|&&r| rows[r].0[c].abs()).unwrap();
            rows.swap(r0, piv);
            for &r in &nz {
                let r = if r == piv { r0 } else if r == r0 { piv } else { r };
                if r == r0 {
                    continue;
                }
                let q = rows[r].0[c] / rows[r0].0[c];
                let (pl, pr) = rows[r0].clone();
                for k in 0..n {
                    rows[r].0[k] -= q * pl[k];
                }
                for k in 0..m {
                    rows[r].1[k] -= q * pr[k];
                }
            }
        }
    }
    rows.into_iter().skip(r0).filter(|(l, _)| l.iter().all(|&v| v == 0)).map(|(_, r)| r).collect()
}
