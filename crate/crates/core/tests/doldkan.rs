use dpow_core::doldkan::{
    chains, derived_dims_mod_p, derived_functor, derived_functor_graded, derived_functor_with,
    derived_of_complex, derived_of_complex_graded, kan_of_shift, kan_of_two_term, moore_or_normalized,
    predict_ranks, ChainMode, DkError, EngineConfig,
};
use dpow_core::exactlin::{AbGroupType, GradedGroup, IntMatrix};
use dpow_core::exec::Exec;
use dpow_core::polyfunc::{eval_dim, FunctorExpr};

fn g(d: u32) -> FunctorExpr {
    FunctorExpr::Gamma(d)
}

fn z2(k: usize) -> AbGroupType {
    AbGroupType::elementary(2, k)
}

#[test]
fn kan_ranks_are_binomial() {
    let k = kan_of_shift(1, 2, 5).unwrap();
    assert_eq!(k.rank(3), 3);
    let k = kan_of_shift(1, 1, 6).unwrap();
    for m in 0..=6 {
        assert_eq!(k.rank(m), m);
    }
    let k = kan_of_shift(3, 2, 5).unwrap();
    assert_eq!(k.rank(4), 18);
}

#[test]
fn simplicial_identities_hold() {
    for r in 1..=2 {
        for n in 0..=3 {
            kan_of_shift(r, n, 6).unwrap().check_identities().unwrap();
        }
    }
    for f in [
        IntMatrix::from_dense(&[vec![2]]),
        IntMatrix::from_dense(&[vec![1, 2], vec![0, 3], vec![-1, 1]]),
        IntMatrix::zeros(0, 1),
    ] {
        for n in 0..=2 {
            kan_of_two_term(&f, n, 6).unwrap().check_identities().unwrap();
        }
    }
}

#[test]
fn normalized_chains_of_k_are_the_shift() {
    for r in 1..=3 {
        for n in 0..=3 {
            let k = kan_of_shift(r, n, n + 3).unwrap();
            let c = moore_or_normalized(&k, &g(1), ChainMode::Normalized).unwrap();
            for m in 0..=(n + 3) as i64 {
                assert_eq!(c.rank(m), if m == n as i64 { r } else { 0 });
            }
            let h = moore_or_normalized(&k, &g(1), ChainMode::Moore).unwrap().homology().unwrap();
            for m in 0..(n + 3) as i64 {
                let want = if m == n as i64 { AbGroupType::free(r) } else { AbGroupType::zero() };
                assert_eq!(h.get(m), want, "r={r} n={n} m={m}");
            }
        }
    }
}

fn same_module(a: &dpow_core::doldkan::SimplicialModule, b: &dpow_core::doldkan::SimplicialModule) {
    for m in 0..=a.truncation() {
        assert_eq!(a.rank(m), b.rank(m));
        for i in 0..=m {
            if m < a.truncation() {
                assert_eq!(a.degeneracy(m, i), b.degeneracy(m, i));
            }
            if m > 0 {
                assert_eq!(a.face(m, i), b.face(m, i));
            }
        }
    }
}

#[test]
fn two_term_with_zero_map_is_a_shift() {
    // Z → 0 sits in degree n+1, 0 → Z in degree n
    same_module(&kan_of_two_term(&IntMatrix::zeros(0, 1), 0, 4).unwrap(), &kan_of_shift(1, 1, 4).unwrap());
    same_module(&kan_of_two_term(&IntMatrix::zeros(1, 0), 0, 4).unwrap(), &kan_of_shift(1, 0, 4).unwrap());
    same_module(&kan_of_two_term(&IntMatrix::zeros(2, 0), 2, 5).unwrap(), &kan_of_shift(2, 2, 5).unwrap());
}

#[test]
fn derived_functor_examples() {
    assert_eq!(derived_functor(&g(2), 1, 1, 1).unwrap(), z2(1));
    assert_eq!(derived_functor(&g(2), 2, 1, 2).unwrap(), AbGroupType::free(1));
    assert_eq!(derived_functor(&g(4), 2, 1, 3).unwrap(), z2(5));
    for r in 1..=3 {
        for n in 0..=3 {
            for i in 0..=4 {
                let want = if i == n { AbGroupType::free(r) } else { AbGroupType::zero() };
                assert_eq!(derived_functor(&g(1), r, n, i).unwrap(), want);
            }
        }
    }
}

#[test]
fn derived_of_complex_examples() {
    let two = IntMatrix::from_dense(&[vec![2]]);
    let three = IntMatrix::from_dense(&[vec![3]]);
    let two_id = IntMatrix::scalar(2, 2);
    // π₀ of the identity functor on Z --2--> Z
    assert_eq!(derived_of_complex(&g(1), &two, 0, 0).unwrap(), AbGroupType::cyclic(2));
    assert_eq!(derived_of_complex(&g(1), &three, 0, 0).unwrap(), AbGroupType::cyclic(3));
    assert_eq!(derived_of_complex(&g(1), &three, 0, 1).unwrap(), AbGroupType::zero());
    // Γ²(Z/2) = Z/4
    assert_eq!(derived_of_complex(&g(2), &two, 0, 0).unwrap(), AbGroupType::cyclic(4));
    let l2 = FunctorExpr::Lambda(2);
    assert_eq!(derived_of_complex(&l2, &two_id, 0, 0).unwrap(), z2(1));
    assert_eq!(derived_of_complex(&l2, &two_id, 0, 1).unwrap(), z2(3));
    assert_eq!(derived_of_complex(&l2, &two, 0, 0).unwrap(), AbGroupType::zero());
    assert_eq!(derived_of_complex(&l2, &two, 0, 1).unwrap(), z2(1));
}

#[test]
fn gamma_two_of_elementary_two_group() {
    // Γ²(Z/2 ⊕ Z/2) = (Z/4)² ⊕ Z/2
    let h = derived_of_complex(&g(2), &IntMatrix::scalar(2, 2), 0, 0).unwrap();
    assert_eq!(h, AbGroupType::new(0, [4, 4, 2]));
}

#[test]
fn moore_and_normalized_agree() {
    for (f, r, n) in [(g(2), 1, 1), (g(2), 2, 1), (FunctorExpr::Lambda(2), 2, 1), (g(3), 1, 1), (g(2), 1, 2)] {
        let k = kan_of_shift(r, n, 4).unwrap();
        let a = moore_or_normalized(&k, &f, ChainMode::Moore).unwrap();
        let b = moore_or_normalized(&k, &f, ChainMode::Normalized).unwrap();
        for m in 0..=4 {
            assert!(b.rank(m) <= a.rank(m));
        }
        for m in 0..4 {
            assert_eq!(a.homology_at(m).unwrap(), b.homology_at(m).unwrap(), "{f} r={r} n={n} m={m}");
        }
    }
}

#[test]
fn normalized_ranks_match_prediction() {
    let f = g(3);
    let k = kan_of_shift(2, 2, 7).unwrap();
    let c = moore_or_normalized(&k, &f, ChainMode::Normalized).unwrap();
    let pred = predict_ranks(&f, 2, 2, 7, ChainMode::Normalized).unwrap();
    for (m, r) in pred {
        assert_eq!(c.rank(m) as u128, r);
    }
    let moore = predict_ranks(&f, 2, 2, 7, ChainMode::Moore).unwrap();
    for (m, r) in moore {
        assert_eq!(r, eval_dim(&f, k.rank(m as usize)).unwrap() as u128);
    }
}

fn graded(f: &FunctorExpr, r: usize, n: usize) -> GradedGroup {
    derived_functor_graded(f, r, n, &EngineConfig::default()).unwrap()
}

#[test]
fn vanishing_window_and_top_degree() {
    for (d, n_max) in [(2u32, 3usize), (3, 2), (4, 1)] {
        for r in 1..=2 {
            for n in 1..=n_max {
                let h = graded(&g(d), r, n);
                let nd = n as i64 * d as i64;
                for (i, _) in h.iter() {
                    assert!(i >= n as i64 && i <= nd, "Γ{d} r={r} n={n} has degree {i}");
                }
                let top_fn = if n % 2 == 1 { FunctorExpr::Lambda(d) } else { g(d) };
                let want = AbGroupType::free(eval_dim(&top_fn, r).unwrap());
                assert_eq!(h.get(nd), want, "top degree of Γ{d} r={r} n={n}");
            }
        }
    }
}

#[test]
fn decalage_at_desk_scale() {
    for r in 1..=2 {
        let a = graded(&g(2), r, 1);
        let b = graded(&FunctorExpr::Lambda(2), r, 2);
        let c = graded(&FunctorExpr::Sym(2), r, 3);
        assert_eq!(a.shift(2), b, "r={r}");
        assert_eq!(a.shift(4), c, "r={r}");
    }
}

#[test]
fn truncation_does_not_matter_above_the_bound() {
    for (d, n) in [(2u32, 2usize), (3, 1)] {
        let base = graded(&g(d), 2, n);
        let cfg = EngineConfig { truncation: Some(n * d as usize + 3), ..EngineConfig::default() };
        let wide = derived_functor_graded(&g(d), 2, n, &cfg).unwrap();
        assert_eq!(base, wide);
    }
}

#[test]
fn oversized_instances_are_refused() {
    let err = derived_functor(&g(4), 3, 3, 9).unwrap_err();
    match err {
        DkError::Budget { predicted, rank_cap, .. } => {
            assert!(predicted.iter().any(|&(_, r)| r > rank_cap as u128));
        }
        other => panic!("expected a refusal, got {other}"),
    }
    let small = EngineConfig { rank_cap: 3, ..EngineConfig::default() };
    assert!(matches!(derived_functor_with(&g(3), 2, 2, 4, &small), Err(DkError::Budget { .. })));
}

#[test]
fn mod_p_mode_counts_dimensions() {
    // L_*Γ²(Z, 1) = Z/2[1], so mod 2 dims are 1 in degrees 1 and 2
    let dims = derived_dims_mod_p(&g(2), 1, 1, 2, &EngineConfig::default()).unwrap();
    assert_eq!(dims.p, 2);
    assert_eq!(dims.dims, vec![(1, 1), (2, 1)]);
    // over F_2 coefficients the functor itself is reduced
    let f = FunctorExpr::mod_p(2, g(2));
    let h = graded(&f, 1, 1);
    assert_eq!(h.get(1), z2(1));
    assert_eq!(h.get(2), z2(1));
}

#[test]
fn sequential_and_parallel_agree() {
    let seq = EngineConfig { exec: Exec::Sequential, ..EngineConfig::default() };
    let par = EngineConfig { exec: Exec::Parallel, ..EngineConfig::default() };
    let k = kan_of_shift(2, 2, 7).unwrap();
    let a = chains(&k, &g(3), 0, 7, &seq).unwrap();
    let b = chains(&k, &g(3), 0, 7, &par).unwrap();
    for m in 1..=7 {
        assert_eq!(a.differential(m), b.differential(m));
    }
    assert_eq!(
        derived_functor_graded(&g(3), 2, 1, &seq).unwrap(),
        derived_functor_graded(&g(3), 2, 1, &par).unwrap()
    );
}

#[test]
fn two_term_graded_matches_single_degrees() {
    let f = IntMatrix::from_dense(&[vec![2, 0], vec![0, 6]]);
    let h = derived_of_complex_graded(&g(2), &f, 0, &EngineConfig::default()).unwrap();
    for i in 0..4 {
        assert_eq!(h.get(i), derived_of_complex(&g(2), &f, 0, i as usize).unwrap());
    }
}
