mod common;

use common::{binom, binom_i, gamma_by_invariant_tensors, truncated_count};
use dpow_core::exactlin::{fp_rank, smith_normal_form, IntMatrix};
use dpow_core::polyfunc::{
    base_change_check, base_change_check_with, eval_dim, eval_morphism, exponential_map, nat_map,
    Family, FuncError, FunctorExpr, NatContext,
};
use proptest::prelude::*;

fn g(d: u32) -> FunctorExpr {
    FunctorExpr::Gamma(d)
}

fn ctx(r: usize, p: Option<u64>, a: u32, b: u32, s: u32) -> NatContext {
    NatContext { r, p, a, b, s }
}

#[test]
fn dimension_examples() {
    assert_eq!(eval_dim(&g(4), 2).unwrap(), 5);
    assert_eq!(eval_dim(&FunctorExpr::Lambda(4), 3).unwrap(), 0);
    let e: FunctorExpr = "G2*L1".parse().unwrap();
    assert_eq!(eval_dim(&e, 2).unwrap(), 6);
    assert_eq!(eval_dim(&"G3+S2".parse().unwrap(), 2).unwrap(), 7);
}

#[test]
fn dimensions_match_binomials() {
    for r in 0..5usize {
        for d in 0..7u32 {
            let sym_dim = binom_i(r as i64 + d as i64 - 1, d as i64);
            let sym_dim = if r == 0 { (d == 0) as u64 } else { sym_dim };
            assert_eq!(eval_dim(&g(d), r).unwrap() as u64, sym_dim);
            assert_eq!(eval_dim(&FunctorExpr::Sym(d), r).unwrap() as u64, sym_dim);
            assert_eq!(eval_dim(&FunctorExpr::Lambda(d), r).unwrap() as u64, binom(r as u64, d as u64));
        }
    }
}

#[test]
fn truncated_dimension_is_a_rank() {
    for p in [2u64, 3, 5] {
        for d in 0..9u32 {
            for r in 1..4usize {
                let q = FunctorExpr::mod_p(p, FunctorExpr::TruncatedQ(d));
                assert_eq!(eval_dim(&q, r).unwrap() as i64, truncated_count(p, d, r), "p={p} d={d} r={r}");
            }
        }
    }
}

#[test]
fn truncated_needs_prime_context() {
    assert!(matches!(eval_dim(&FunctorExpr::TruncatedQ(2), 1), Err(FuncError::NeedsModP(_))));
    assert!(matches!(
        eval_dim(&FunctorExpr::mod_p(4, g(2)), 1),
        Err(FuncError::NotPrime(4))
    ));
}

#[test]
fn morphism_examples() {
    let two = IntMatrix::from_dense(&[vec![2]]);
    assert_eq!(eval_morphism(&g(2), &two).unwrap(), IntMatrix::from_dense(&[vec![4]]));
    let id = IntMatrix::identity(3);
    assert!(eval_morphism(&FunctorExpr::Lambda(2), &id).unwrap().is_identity());
    // Γ²(×2) over F_2 vanishes
    let m = eval_morphism(&FunctorExpr::mod_p(2, g(2)), &two).unwrap();
    assert_eq!(fp_rank(&m, 2).unwrap(), 0);
    // Λ² of a 2×2 matrix is its determinant
    let f = IntMatrix::from_dense(&[vec![1, 2], vec![3, 4]]);
    assert_eq!(eval_morphism(&FunctorExpr::Lambda(2), &f).unwrap(), IntMatrix::from_dense(&[vec![-2]]));
    // S²(diag(1,2)) = diag(1,2,4) on x², xy, y² in ascending exponent order
    let dg = IntMatrix::from_dense(&[vec![1, 0], vec![0, 2]]);
    assert_eq!(
        eval_morphism(&FunctorExpr::Sym(2), &dg).unwrap(),
        IntMatrix::from_dense(&[vec![4, 0, 0], vec![0, 2, 0], vec![0, 0, 1]])
    );
}

#[test]
fn gamma_matches_invariant_tensor_oracle() {
    let mats: Vec<Vec<Vec<i64>>> = vec![
        vec![vec![1, 2], vec![3, -1]],
        vec![vec![2, 0, -1], vec![1, 1, 3]],
        vec![vec![0, 1], vec![-2, 2], vec![3, 1]],
    ];
    for f in &mats {
        let m = IntMatrix::from_dense(f);
        for d in 0..5 {
            let got = eval_morphism(&g(d), &m).unwrap().to_dense();
            assert_eq!(got, gamma_by_invariant_tensors(f, m.cols(), d), "d={d} f={f:?}");
        }
    }
}

fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, cols), rows)
        .prop_map(|rs| IntMatrix::from_dense(&rs))
}

fn functorial(f: &FunctorExpr, a: &IntMatrix, b: &IntMatrix) -> bool {
    let lhs = eval_morphism(f, &b.mul(a).unwrap()).unwrap();
    let rhs = eval_morphism(f, b).unwrap().mul(&eval_morphism(f, a).unwrap()).unwrap();
    match lhs.modulus() {
        Some(p) => lhs == rhs.reduce_mod(p),
        None => lhs == rhs,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gamma3_is_functorial(a in small_matrix(2, 2), b in small_matrix(2, 2)) {
        prop_assert!(functorial(&g(3), &a, &b));
    }

    #[test]
    fn lambda2_is_functorial(a in small_matrix(3, 2), b in small_matrix(2, 3)) {
        prop_assert!(functorial(&FunctorExpr::Lambda(2), &a, &b));
    }

    #[test]
    fn sym3_is_functorial(a in small_matrix(2, 3), b in small_matrix(2, 2)) {
        prop_assert!(functorial(&FunctorExpr::Sym(3), &a, &b));
    }

    #[test]
    fn tensor_sum_is_functorial(a in small_matrix(2, 2), b in small_matrix(3, 2)) {
        let f: FunctorExpr = "G2*L1+S2".parse().unwrap();
        prop_assert!(functorial(&f, &a, &b));
    }

    #[test]
    fn mod_p_twisted_is_functorial(a in small_matrix(2, 2), b in small_matrix(2, 2)) {
        let f: FunctorExpr = "mod3(Q4*tw1(G1))".parse().unwrap();
        prop_assert!(functorial(&f, &a, &b));
    }

    #[test]
    fn gamma_is_dual_to_sym(f in (1usize..4, 1usize..4).prop_flat_map(|(r, c)| small_matrix(r, c)), d in 0u32..5) {
        let lhs = eval_morphism(&g(d), &f).unwrap();
        let rhs = eval_morphism(&FunctorExpr::Sym(d), &f.transpose()).unwrap().transpose();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn named_map_examples() {
    let v = nat_map("verschiebung", &ctx(1, Some(2), 0, 0, 1)).unwrap();
    assert_eq!(v.lift(), IntMatrix::from_dense(&[vec![1]]));
    let m = nat_map("mult", &ctx(1, None, 1, 1, 0)).unwrap();
    assert_eq!(m, IntMatrix::from_dense(&[vec![2]]));
    let c = nat_map("comult", &ctx(1, None, 1, 1, 0)).unwrap();
    assert_eq!(m.mul(&c).unwrap(), IntMatrix::from_dense(&[vec![2]]));
    assert!(matches!(
        nat_map("lambda_to_gamma", &ctx(2, Some(3), 2, 0, 0)),
        Err(FuncError::BadContext { .. })
    ));
    assert!(matches!(nat_map("nope", &ctx(1, None, 1, 1, 0)), Err(FuncError::UnknownMap(_))));
}

#[test]
fn mult_after_comult_is_binomial() {
    for r in 1..4 {
        for a in 0..4u32 {
            for b in 0..4u32 {
                let m = nat_map("mult", &ctx(r, None, a, b, 0)).unwrap();
                let c = nat_map("comult", &ctx(r, None, a, b, 0)).unwrap();
                let k = binom((a + b) as u64, a as u64) as i64;
                assert_eq!(m.mul(&c).unwrap(), IntMatrix::scalar(m.rows(), k), "r={r} a={a} b={b}");
            }
        }
    }
}

#[test]
fn named_maps_are_natural() {
    // F(f) ∘ η = η ∘ G(f) for a fixed non-trivial f, checked mod the map's prime
    let f = IntMatrix::from_dense(&[vec![1, 2, 0], vec![-1, 1, 3], vec![2, 0, 1]]);
    let cases: Vec<(&str, NatContext, &str, &str)> = vec![
        ("mult", ctx(3, None, 2, 1, 0), "G2*G1", "G3"),
        ("comult", ctx(3, None, 2, 2, 0), "G4", "G2*G2"),
        ("verschiebung", ctx(3, Some(2), 0, 0, 2), "mod2(G4)", "mod2(G1)"),
        ("frobenius", ctx(3, Some(3), 0, 0, 1), "mod3(G1)", "mod3(S3)"),
        ("lambda_to_gamma", ctx(3, Some(2), 2, 0, 0), "mod2(L2)", "mod2(G2)"),
        ("koszul_step", ctx(3, None, 2, 1, 0), "G2*L1", "G1*L2"),
        ("skew_koszul_step", ctx(3, Some(2), 3, 1, 0), "mod2(G3*G1)", "mod2(G1*G2)"),
        ("q_res_d1", ctx(3, Some(2), 0, 0, 0), "mod2(L2)", "mod2(S2*G1)"),
        ("q_res_d0", ctx(3, Some(2), 0, 0, 0), "mod2(S2*G1)", "mod2(S4)"),
        ("q_res_f4", ctx(3, Some(2), 0, 0, 0), "mod2(S4)", "mod2(L4)"),
        ("tensor_to_gamma", ctx(3, None, 3, 0, 0), "G1*G1*G1", "G3"),
        ("principal_mult", ctx(3, None, 3, 0, 0), "G1*G2", "G3"),
        ("gamma_to_twist", ctx(3, Some(2), 4, 0, 0), "mod2(G4)", "mod2(G2)"),
    ];
    for (name, c, src, dst) in cases {
        let eta = nat_map(name, &c).unwrap();
        let src: FunctorExpr = src.parse().unwrap();
        let dst: FunctorExpr = dst.parse().unwrap();
        let lhs = eval_morphism(&dst, &f).unwrap().mul(&eta).unwrap();
        let rhs = eta.mul(&eval_morphism(&src, &f).unwrap()).unwrap();
        let (lhs, rhs) = match c.p {
            Some(p) => (lhs.reduce_mod(p), rhs.reduce_mod(p)),
            None => (lhs, rhs),
        };
        assert_eq!(lhs, rhs, "{name} is not natural");
    }
}

#[test]
fn base_change_examples() {
    assert!(base_change_check(&g(3), 2, 3).unwrap());
    assert!(base_change_check(&FunctorExpr::Lambda(2), 2, 2).unwrap());
    assert!(base_change_check_with(&g(4), 2, 2, 50, 7).unwrap());
    assert!(base_change_check(&"G2*L2+S3".parse().unwrap(), 3, 5).unwrap());
    assert!(base_change_check(&FunctorExpr::mod_p(2, g(2)), 2, 2).is_err());
}

#[test]
fn exponential_map_is_invertible() {
    for family in [Family::Gamma, Family::Lambda, Family::Sym] {
        for d in 0..=6 {
            for r1 in 1..=3 {
                for r2 in 1..=3 {
                    let m = exponential_map(family, d, r1, r2).unwrap();
                    assert_eq!(m.rows(), m.cols(), "{family:?} d={d}");
                    let s = smith_normal_form(&m).unwrap();
                    assert_eq!(s.rank(), m.rows());
                    assert!(s.torsion().is_empty(), "{family:?} d={d} r1={r1} r2={r2}");
                }
            }
        }
    }
}

#[test]
fn verschiebung_kills_products_of_tensors() {
    for (p, s) in [(2u64, 1u32), (2, 2), (3, 1)] {
        let q = p.pow(s) as u32;
        for r in 1..=3 {
            let mult = nat_map("tensor_to_gamma", &ctx(r, Some(p), q, 0, 0)).unwrap();
            let v = nat_map("verschiebung", &ctx(r, Some(p), 0, 0, s)).unwrap();
            let comp = v.mul(&mult).unwrap();
            for c in 0..comp.cols() {
                // column c is the tensor with digits of c in base r
                let digits: Vec<usize> = (0..q).scan(c, |x, _| {
                    let dgt = *x % r;
                    *x /= r;
                    Some(dgt)
                }).collect();
                if digits.iter().any(|&x| x != digits[0]) {
                    assert!(comp.column(c).is_empty(), "p={p} s={s} r={r} column {c}");
                }
            }
        }
    }
}

#[test]
fn principal_sequence_is_exact() {
    for p in [2u64, 3] {
        for d in (p as u32..=8).step_by(p as usize) {
            for r in 1..=3 {
                let mult = nat_map("principal_mult", &ctx(r, Some(p), d, 0, 0)).unwrap();
                let quot = nat_map("gamma_to_twist", &ctx(r, Some(p), d, 0, 0)).unwrap();
                assert!(quot.mul(&mult).unwrap().is_zero(), "p={p} d={d} r={r}");
                let rq = fp_rank(&quot, p).unwrap();
                assert_eq!(rq, quot.rows(), "surjective, p={p} d={d} r={r}");
                assert_eq!(fp_rank(&mult, p).unwrap() + rq, quot.cols(), "p={p} d={d} r={r}");
            }
        }
    }
}

#[test]
fn lambda_to_gamma_is_injective_in_char_two() {
    for d in 0..5u32 {
        for r in 1..5 {
            let m = nat_map("lambda_to_gamma", &ctx(r, Some(2), d, 0, 0)).unwrap();
            assert_eq!(fp_rank(&m, 2).unwrap(), m.cols());
        }
    }
}

#[test]
fn q_resolution_maps_compose_to_zero() {
    for r in 1..=3 {
        let c = ctx(r, Some(2), 0, 0, 0);
        let d1 = nat_map("q_res_d1", &c).unwrap();
        let d0 = nat_map("q_res_d0", &c).unwrap();
        let f4 = nat_map("q_res_f4", &c).unwrap();
        assert!(d0.mul(&d1).unwrap().is_zero());
        assert!(f4.mul(&d0).unwrap().is_zero());
    }
}
