use num_bigint::BigUint;

use super::*;
use crate::growthfn::{Family, GrowthFunction};
use crate::numeric::Ratio;

fn toy() -> GrowthFunction {
    GrowthFunction::new(Family::dyadic_table(&[2, 4, 8, 16])).unwrap()
}

fn poly() -> GrowthFunction {
    GrowthFunction::new(Family::poly_geometric(Ratio::new(1, 10))).unwrap()
}

fn rendered(sys: &LevelSystem, level: u32) -> Vec<String> {
    sys.cset(level)
        .strings()
        .iter()
        .map(|s| sys.alphabet().render(s))
        .collect()
}

#[test]
fn alphabet_from_first_value() {
    let b = init_system(
        GrowthFunction::new(Family::geometric(Ratio::integer(1))).unwrap(),
        Chooser::Lex,
        3,
    )
    .unwrap();
    assert_eq!(b.system().alphabet().names(), &['a', 'b']);
    let b = init_system(
        GrowthFunction::new(Family::dyadic_table(&[5, 25])).unwrap(),
        Chooser::Lex,
        1,
    )
    .unwrap();
    assert_eq!(b.system().alphabet().size(), 5);
    assert_eq!(b.defined(), 0);
}

#[test]
fn toy_plain_lex() {
    let sys = build_plain(toy(), Chooser::Lex, 3).unwrap();
    assert_eq!(rendered(&sys, 0), ["a", "b"]);
    assert_eq!(rendered(&sys, 1), ["aa", "ab"]);
    assert_eq!(rendered(&sys, 2), ["aaaa", "aaab"]);
}

#[test]
fn fixed_suffix_restricts_to_matching_tails() {
    let mut b = init_system(toy(), Chooser::Lex, 3).unwrap();
    b.fill_to(1).unwrap();
    b.choose_cset(1, &Constraint::FixedSuffix(WordRef::letter(0))).unwrap();
    assert_eq!(rendered(b.system(), 1), ["aa", "ba"]);
}

#[test]
fn insufficient_words_reported_with_deficit() {
    let g = GrowthFunction::new(Family::dyadic_table(&[2, 8])).unwrap();
    let err = build_plain(g, Chooser::Lex, 1).unwrap_err();
    assert_eq!(
        err,
        BuildError::InsufficientWords {
            level: 0,
            required: BigUint::from(4u32),
            available: BigUint::from(2u32),
        }
    );
}

#[test]
fn depth_one_is_a_letter_subset() {
    let sys = build_plain(poly(), Chooser::Lex, 1).unwrap();
    assert_eq!(sys.depth(), 1);
    assert_eq!(rendered(&sys, 0), ["a", "b"]);
}

#[test]
fn expand_and_window() {
    let sys = build_plain(toy(), Chooser::Lex, 3).unwrap();
    let r = WordRef::new(vec![1, 0, 1]);
    assert_eq!(sys.alphabet().render(&sys.expand(&r).unwrap()), "abab");
    assert_eq!(sys.alphabet().render(&sys.expand_window(&r, 1, 2).unwrap()), "ba");
    assert_eq!(sys.expand(&WordRef::letter(0)).unwrap(), vec![0]);
    assert!(matches!(
        sys.expand_window(&r, 3, 2),
        Err(BuildError::OutOfRange { .. })
    ));
    assert!(sys.expand(&WordRef::new(vec![2, 0, 0])).is_err());
}

#[test]
fn windows_agree_with_full_expansion() {
    let sys = build_plain(poly(), Chooser::Lex, 5).unwrap();
    for r in sys.sample_elements(5, 50, 7) {
        let full = sys.expand(&r).unwrap();
        for from in [0, 1, 5, 16, 31] {
            for len in [0, 1, 3, 32 - from] {
                if from + len > 32 {
                    continue;
                }
                assert_eq!(sys.expand_window(&r, from, len).unwrap(), &full[from..from + len]);
            }
        }
    }
}

#[test]
fn poly_sizes_match_ratios() {
    let sys = build_plain(poly(), Chooser::Lex, 7).unwrap();
    let sizes: Vec<usize> = sys.csets().iter().map(|c| c.len()).collect();
    assert_eq!(sizes, [2, 2, 3, 5, 10, 43, 892]);
}

#[test]
fn locate_inverts_expand() {
    let sys = build_plain(poly(), Chooser::Seeded { seed: 11 }, 5).unwrap();
    for level in 0..=5 {
        for r in sys.sample_elements(level, 40, 3) {
            let w = sys.expand(&r).unwrap();
            assert_eq!(sys.locate(&w), Some(r));
        }
    }
    assert_eq!(sys.locate(&[0, 0, 0]), None);
}

#[test]
fn element_at_is_lex_rank() {
    let sys = build_plain(toy(), Chooser::Lex, 3).unwrap();
    let all: Vec<WordRef> = sys.elements(2).collect();
    assert_eq!(all.len(), 8);
    for (i, r) in all.iter().enumerate() {
        assert_eq!(&sys.element_at(2, &BigUint::from(i)).unwrap(), r);
    }
    let mut sorted = all.clone();
    sorted.sort();
    assert_eq!(sorted, all);
    assert!(sys.element_at(2, &BigUint::from(8u32)).is_err());
}

#[test]
fn sampling() {
    let sys = build_plain(toy(), Chooser::Lex, 3).unwrap();
    let all = sys.sample_elements(2, 99, 1);
    assert_eq!(all, sys.elements(2).collect::<Vec<_>>());
    assert_eq!(sys.sample_elements(2, 1, 5), sys.sample_elements(2, 1, 5));
    let two = sys.sample_elements(0, 2, 0);
    assert_eq!(two.len(), 2);
    assert_ne!(two[0], two[1]);
}

#[test]
fn seeded_chooser_is_deterministic_and_valid() {
    let a = build_plain(poly(), Chooser::Seeded { seed: 42 }, 6).unwrap();
    let b = build_plain(poly(), Chooser::Seeded { seed: 42 }, 6).unwrap();
    let c = build_plain(poly(), Chooser::Seeded { seed: 43 }, 6).unwrap();
    for i in 0..6 {
        assert_eq!(a.cset(i).members(), b.cset(i).members());
    }
    assert!((0..6).any(|i| a.cset(i).members() != c.cset(i).members()));
    for cs in a.csets() {
        assert_eq!(cs.len(), poly().ratio(cs.level()).unwrap().try_into().unwrap_or(0usize));
    }
}

#[test]
fn capture_trace_first_targets() {
    let sys = build_uniformly_recurrent(poly(), 7, 2, 0, 12, Chooser::Lex).unwrap();
    let log = &sys.capture_log().entries;
    assert_eq!(log.len(), 2);
    assert_eq!(log[0].target_word, "a");
    assert_eq!(log[0].capture_level, 1);
    assert_eq!(log[0].gap_bound, 4);
    assert_eq!(log[1].target_word, "b");
    assert_eq!(log[1].capture_level, 2);
    assert_eq!(log[1].gap_bound, 8);
    assert_eq!(rendered(&sys, 1), ["aa", "ba"]);
    assert_eq!(rendered(&sys, 2), ["aaab", "aabb", "baab"]);
}

#[test]
fn captured_members_contain_target() {
    let sys = build_uniformly_recurrent(poly(), 7, 6, 0, 12, Chooser::Lex).unwrap();
    let log = &sys.capture_log().entries;
    assert!(log.len() >= 2);
    let mut last = None;
    for e in log {
        assert_eq!(e.gap_bound, 1u64 << (e.capture_level + 1));
        assert!(last.is_none_or(|l| e.capture_level > l));
        last = Some(e.capture_level);
        let target = sys.expand(&e.target).unwrap();
        for s in sys.cset(e.capture_level).strings() {
            assert!(s.ends_with(&target));
        }
    }
}

#[test]
fn capture_level_respects_mu() {
    // After three levels are defined, an element of W(4) is captured at
    // max(mu(2), 3) = 4, with 15 free prefixes for 10 members.
    let mut b = init_system(poly(), Chooser::Lex, 7).unwrap();
    b.fill_to(3).unwrap();
    let target = b.system().element_at(2, &BigUint::from(0u32)).unwrap();
    let e = b.capture_target(&target, 0, 12).unwrap();
    assert_eq!(e.capture_level, 4);
    assert_eq!(e.gap_bound, 32);
    assert_eq!(b.system().cset(4).len(), 10);
}

#[test]
fn capture_fails_without_mu() {
    let g = GrowthFunction::new(Family::geometric(Ratio::integer(1))).unwrap();
    let mut b = init_system(g, Chooser::Lex, 5).unwrap();
    let err = b.capture_target(&WordRef::letter(0), 0, 12).unwrap_err();
    assert!(matches!(
        err,
        BuildError::Growth(crate::growthfn::GrowthError::HorizonTooSmall { .. })
    ));
}

#[test]
fn zero_budget_equals_plain() {
    let a = build_uniformly_recurrent(poly(), 6, 0, 0, 12, Chooser::Lex).unwrap();
    let b = build_plain(poly(), Chooser::Lex, 6).unwrap();
    for i in 0..6 {
        assert_eq!(a.cset(i).members(), b.cset(i).members());
    }
    assert!(a.capture_log().is_empty());
}

#[test]
fn free_system_boundary_case() {
    let (sys, params) = build_free_power_system(Ratio::integer(1), 4).unwrap();
    assert_eq!(params.t, 1);
    assert!(!params.warnings.is_empty());
    assert_eq!(sys.alphabet().names(), &['x', 'y']);
    let c2 = rendered(&sys, 1);
    assert!(c2.contains(&"xx".to_string()) && c2.contains(&"yy".to_string()));
    // f = 2^n gives |C(4)| = f(8)/f(4) = 16, so every word of W(4) is kept.
    assert_eq!(sys.cset(2).len(), 16);
    for w in ["xxxx", "xxyy", "yyxx", "yyyy"] {
        assert!(rendered(&sys, 2).contains(&w.to_string()));
    }
    assert_eq!(sys.cset(3).len(), 256);
}

#[test]
fn free_system_capacity_failure() {
    // f(2)/f(1) = 1 leaves no room for both x and y.
    let err = build_free_power_system(Ratio::new(1, 10), 5).unwrap_err();
    assert!(matches!(err, BuildError::CapacityExceeded { level: 0, .. }));
}

#[test]
fn truncation_keeps_prefix_levels() {
    let sys = build_uniformly_recurrent(poly(), 7, 4, 0, 12, Chooser::Lex).unwrap();
    let t = sys.truncated(3);
    assert_eq!(t.depth(), 3);
    assert!(t.capture_log().entries.iter().all(|e| e.capture_level < 3));
    assert_eq!(t.cset(2).members(), sys.cset(2).members());
}
