use std::collections::{BTreeMap, BTreeSet};

use dpow_core::cartan::{
    alpha_sequences, chi, chi_inverse, class_profile, derived_tensor_homology, enumerate_words, sigma2gamma_substitution,
    stable_gamma, stable_gamma_d, stable_homology, stable_homology_st, stable_homology_words, stable_words,
    word_stats, xi, xi_inverse, AdmissibleWord, AlphaSeq, CartanError, WordType,
};
use dpow_core::closedform::{integral_gamma2, integral_gamma3, integral_gamma4};
use dpow_core::{AbGroupType, GradedGroup};
use proptest::prelude::*;

mod common;

fn w(p: u64, s: &str) -> AdmissibleWord {
    AdmissibleWord::parse(p, s).unwrap()
}

/// Stable columns of the K(A,n) table, read off the "adm" row: for each
/// degree the primes of the A/p summands.
fn table_stable_row() -> BTreeMap<i64, Vec<u64>> {
    BTreeMap::from([
        (2, vec![2]),
        (4, vec![2, 3]),
        (6, vec![2, 2]),
        (8, vec![2, 3, 5, 2]),
        (9, vec![2]),
        (10, vec![2, 2]),
    ])
}

#[test]
fn word_stats_examples() {
    let a = w(2, "sgss");
    assert_eq!(a.to_string(), "σγ2σ^2");
    let st = word_stats(&a);
    assert_eq!((st.degree, st.height, st.weight), (5, 3, 2));
    let b = w(2, "sgf");
    assert_eq!(b.word_type(), WordType::Second);
    let st = word_stats(&b);
    assert_eq!((st.degree, st.height, st.weight), (5, 2, 2));
    let c = w(3, "s");
    let st = word_stats(&c);
    assert_eq!((st.degree, st.height, st.weight), (1, 1, 1));
}

#[test]
fn invalid_words_are_refused() {
    assert!(matches!(AdmissibleWord::parse(2, "sgs"), Err(CartanError::InvalidWord { .. })));
    assert!(matches!(AdmissibleWord::parse(2, "gss"), Err(CartanError::InvalidWord { .. })));
    assert!(matches!(AdmissibleWord::parse(2, "sg"), Err(CartanError::InvalidWord { .. })));
    assert!(matches!(AdmissibleWord::parse(2, ""), Err(CartanError::InvalidWord { .. })));
    assert!(matches!(AdmissibleWord::parse(2, "sfs"), Err(CartanError::InvalidWord { .. })));
    assert_eq!(AdmissibleWord::parse(4, "sgss"), Err(CartanError::NotPrime(4)));
    assert!(AdmissibleWord::parse(2, "fss").is_ok());
}

#[test]
fn enumeration_examples() {
    assert_eq!(enumerate_words(2, 5, true), vec![w(2, "sgs2")]);
    assert!(enumerate_words(3, 6, true).is_empty());
    let all = enumerate_words(2, 5, false);
    assert_eq!(all, vec![w(2, "sgs2"), w(2, "sgf")]);
}

#[test]
fn enumeration_is_complete_against_brute_force() {
    // every string over {σ,γ,φ} of length ≤ 9, filtered by validity and degree
    for p in [2u64, 3] {
        let max_degree = 13;
        let mut expect = BTreeSet::new();
        let alphabet = ['s', 'g', 'f'];
        for len in 2..=9usize {
            for code in 0..3usize.pow(len as u32) {
                let mut c = code;
                let text: String = (0..len)
                    .map(|_| {
                        let ch = alphabet[c % 3];
                        c /= 3;
                        ch
                    })
                    .collect();
                if let Ok(word) = AdmissibleWord::parse(p, &text) {
                    if word.starts_sigma_gamma() && word_stats(&word).degree <= max_degree {
                        expect.insert(word);
                    }
                }
            }
        }
        let got: BTreeSet<_> = enumerate_words(p, max_degree, false).into_iter().collect();
        // degree ≥ length - 1 for σγ-words, so length 9 covers degree 8 fully
        let short: BTreeSet<_> = got.iter().filter(|x| x.letters().len() <= 9).cloned().collect();
        assert_eq!(short, expect, "p={p}");
    }
}

#[test]
fn xi_is_a_bijection_to_degree_24() {
    for p in [2u64, 3, 5] {
        let words = enumerate_words(p, 24, false);
        let first: Vec<_> = words.iter().filter(|x| x.word_type() == WordType::First).collect();
        let second: BTreeSet<_> = words.iter().filter(|x| x.word_type() == WordType::Second).cloned().collect();
        let mut image = BTreeSet::new();
        for a in &first {
            let b = xi(a).unwrap();
            let (sa, sb) = (word_stats(a), word_stats(&b));
            assert_eq!(sa.degree, sb.degree);
            assert_eq!(sa.height, sb.height + 1);
            assert_eq!(sa.weight, sb.weight);
            assert_eq!(&xi_inverse(&b).unwrap(), *a);
            image.insert(b);
        }
        assert_eq!(image.len(), first.len());
        assert_eq!(image, second, "p={p}");
        assert!(xi(second.iter().next().unwrap()).is_err());
    }
}

#[test]
fn chi_examples() {
    let a = chi(&w(2, "sgs2")).unwrap();
    assert_eq!(a.terms(), &[1]);
    let b = chi(&w(2, "sgs2gs2")).unwrap();
    assert_eq!(b.terms(), &[2, 1]);
    let c = chi(&w(3, "sggs4")).unwrap();
    assert_eq!(c.terms(), &[2, 2]);
    assert_eq!(c.o(), 1);
    assert!(matches!(chi(&w(2, "sgf")), Err(CartanError::NotRestricted(_))));
    assert_eq!(AlphaSeq::new(2, vec![1, 2]), Err(CartanError::InvalidSequence(vec![1, 2])));
    assert_eq!(AlphaSeq::new(2, vec![]), Err(CartanError::InvalidSequence(vec![])));
}

#[test]
fn chi_round_trip_and_dictionary_to_degree_30() {
    for p in [2u64, 3, 5] {
        for word in enumerate_words(p, 30, true) {
            if word.word_type() != WordType::First {
                continue;
            }
            let a = chi(&word).unwrap();
            assert_eq!(chi_inverse(&a), word);
            let st = word_stats(&word);
            // the leading σ accounts for one degree and one height
            assert_eq!(st.degree, a.degree() + 1, "{word}");
            assert_eq!(st.height, a.height() + 1, "{word}");
            assert_eq!(st.weight, a.weight());
        }
        for a in alpha_sequences(p, 40) {
            assert_eq!(chi(&chi_inverse(&a)).unwrap(), a);
        }
    }
}

#[test]
fn substitution_classes_to_degree_24() {
    for p in [2u64, 3] {
        let words = enumerate_words(p, 24, false);
        let mut classes: BTreeMap<AdmissibleWord, Vec<AdmissibleWord>> = BTreeMap::new();
        for x in words.iter().filter(|x| x.word_type() == WordType::First) {
            classes.entry(sigma2gamma_substitution(x)).or_default().push(x.clone());
        }
        let restricted: BTreeSet<_> =
            enumerate_words(p, 24, true).into_iter().filter(|x| x.word_type() == WordType::First).collect();
        assert_eq!(classes.keys().cloned().collect::<BTreeSet<_>>(), restricted);
        for (rep, members) in &classes {
            let a = chi(rep).unwrap();
            assert_eq!(members.len(), 1usize << (a.o() - 1), "{rep}");
            assert_eq!(members.iter().filter(|m| m.is_restricted()).count(), 1);
            let rs = word_stats(rep);
            let mut by_subs: BTreeMap<usize, u128> = BTreeMap::new();
            for m in members {
                let i = m.count(dpow_core::cartan::Letter::Phi);
                let ms = word_stats(m);
                assert_eq!(ms.degree, rs.degree);
                assert_eq!(ms.height, rs.height - i as u64);
                assert_eq!(ms.weight, rs.weight);
                *by_subs.entry(i).or_default() += 1;
            }
            assert_eq!(by_subs, class_profile(&a), "{rep}");
        }
    }
}

#[test]
fn derived_tensor_examples() {
    let h = derived_tensor_homology(1, 2, 2);
    assert_eq!(h.get(0), AbGroupType::cyclic(2));
    assert_eq!(h.get(1), AbGroupType::cyclic(2));
    assert_eq!(derived_tensor_homology(2, 3, 1), [(0, AbGroupType::elementary(3, 2))].into_iter().collect());
    let h = derived_tensor_homology(1, 2, 3);
    assert_eq!(
        (h.get(0).p_rank(2), h.get(1).p_rank(2), h.get(2).p_rank(2)),
        (1, 2, 1)
    );
    assert!(h.get(3).is_zero());
}

proptest! {
    #[test]
    fn derived_tensor_is_binomial(r in 1usize..4, pi in 0usize..3, n in 1usize..7) {
        let p = [2u64, 3, 5][pi];
        let h = derived_tensor_homology(r, p, n);
        for i in 0..n + 2 {
            let expect = if i < n { r * common::binom(n as u64 - 1, i as u64) as usize } else { 0 };
            prop_assert_eq!(h.get(i as i64), AbGroupType::elementary(p, expect));
        }
    }
}

#[test]
fn stable_homology_examples() {
    let h = stable_homology(1, 10).unwrap();
    assert_eq!(h.get(0), AbGroupType::free(1));
    assert_eq!(h.get(1), AbGroupType::zero());
    assert_eq!(h.get(2), AbGroupType::cyclic(2));
    assert_eq!(h.get(4), AbGroupType::cyclic(6));
    for r in 1..=3 {
        assert!(stable_homology(r, 10).unwrap().get(1).is_zero());
    }
}

#[test]
fn stable_homology_matches_table_row() {
    let row = table_stable_row();
    for r in 1..=3usize {
        let h = stable_homology(r, 10).unwrap();
        for i in 0..=10i64 {
            let expect = if i == 0 {
                AbGroupType::free(r)
            } else {
                let primes = row.get(&i).cloned().unwrap_or_default();
                AbGroupType::new(0, primes.iter().flat_map(|&p| std::iter::repeat(p).take(r)))
            };
            assert_eq!(h.get(i), expect, "i={i} r={r}");
        }
    }
}

#[test]
fn words_and_sequences_agree_to_degree_30() {
    for r in 1..=2 {
        assert_eq!(stable_homology_words(r, 30), stable_homology_st(r, 30));
    }
}

#[test]
fn stable_gamma_examples() {
    for r in 1..=2 {
        assert!(stable_gamma_d(6, r, 20).is_zero());
        assert!(stable_gamma_d(10, r, 20).is_zero());
    }
    let g2 = stable_gamma(2, 1, 1, 8).unwrap();
    let expect: GradedGroup = (0..=4).map(|k| (2 * k, AbGroupType::cyclic(2))).collect();
    assert_eq!(g2, expect);
    let g4 = stable_gamma(2, 2, 1, 7).unwrap();
    let dims: Vec<usize> = (0..=7).map(|i| g4.get(i).p_rank(2)).collect();
    assert_eq!(dims, vec![1, 0, 1, 1, 1, 1, 2, 1]);
    assert_eq!(stable_gamma(4, 1, 1, 5), Err(CartanError::NotPrime(4)));
}

#[test]
fn stable_gamma_sums_to_stable_homology() {
    // H^st_i = ⊕_d L^st_{i+2-2d} Γ^d
    for r in 1..=3 {
        let i_max = 24;
        let mut total = GradedGroup::new();
        for d in 1..=(i_max as u64 / 2 + 1) {
            let g = stable_gamma_d(d, r, i_max);
            total = total.direct_sum(&g.shift(2 * d as i64 - 2));
        }
        let h = stable_homology(r, i_max).unwrap();
        for i in 0..=i_max {
            assert_eq!(total.get(i), h.get(i), "i={i} r={r}");
        }
    }
}

#[test]
fn stable_gamma_by_word_weight() {
    // first-type words of weight d land in L^st Γ^d at stable degree − 2(d−1)
    let i_max = 20;
    let mut by_weight: BTreeMap<u64, GradedGroup> = BTreeMap::new();
    for (word, st) in stable_words(i_max) {
        by_weight.entry(st.weight).or_default().add(st.stable_degree() - 2 * (st.weight as i64 - 1), &AbGroupType::cyclic(word.p()));
    }
    for (d, g) in by_weight {
        let lead = 2 * (d as i64 - 1);
        let expect = stable_gamma_d(d, 1, i_max - lead);
        assert_eq!(g, expect, "d={d}");
    }
}

#[test]
fn stable_gamma_is_the_limit_of_closed_forms() {
    // L_{n+i}Γ^d(A,n) for i well below n
    let n = 9usize;
    for r in 1..=2usize {
        let cases: [(u64, u32, GradedGroup); 3] = [
            (2, 1, integral_gamma2(n, r)),
            (3, 1, integral_gamma3(n, r)),
            (2, 2, integral_gamma4(n, r).unwrap()),
        ];
        for (p, e, unstable) in cases {
            let st = stable_gamma(p, e, r, n as i64 - 2).unwrap();
            for i in 0..=(n as i64 - 2) {
                assert_eq!(st.get(i), unstable.get(n as i64 + i), "p={p} e={e} r={r} i={i}");
            }
        }
    }
}
