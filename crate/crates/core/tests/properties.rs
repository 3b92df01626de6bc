use std::collections::HashSet;

use growthforge_core::analyzer::invariants::{chunk_property, factorial_closedness, submultiplicativity};
use growthforge_core::analyzer::{dims_up_to, factor_set_bruteforce, factor_set_structural, scan_gaps};
use growthforge_core::construction::{build_plain, Chooser, LevelSystem};
use growthforge_core::{Family, GrowthFunction};
use num_bigint::BigUint;
use proptest::prelude::*;

/// A feasible dyadic table: alphabet size `d` and ratios clamped to the
/// number of available words at each level.
fn table_system(d: u64, ratios: &[u64], seed: Option<u64>) -> LevelSystem {
    let mut values = vec![d];
    let mut words = d;
    for &r in ratios {
        let r = r.min(words);
        values.push(values.last().unwrap() * r);
        words *= r;
    }
    let g = GrowthFunction::new(Family::dyadic_table(&values)).unwrap();
    let chooser = seed.map_or(Chooser::Lex, |seed| Chooser::Seeded { seed });
    build_plain(g, chooser, ratios.len() as u32).unwrap()
}

fn system_strategy() -> impl Strategy<Value = LevelSystem> {
    (
        1u64..=3,
        prop::collection::vec(1u64..=4, 1..=4),
        prop::option::of(any::<u64>()),
    )
        .prop_map(|(d, ratios, seed)| table_system(d, &ratios, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn level_counts_and_distinct_expansions(sys in system_strategy()) {
        for level in 0..=sys.depth() {
            let expected: u64 = sys.csets()[..level as usize]
                .iter()
                .fold(sys.alphabet().size() as u64, |acc, c| acc * c.len() as u64);
            prop_assert_eq!(sys.level_word_count(level), expected.into());
            let words: HashSet<Vec<u8>> = sys.elements(level).map(|r| sys.expand(&r).unwrap()).collect();
            prop_assert_eq!(words.len() as u64, expected);
            prop_assert!(words.iter().all(|w| w.len() == 1 << level));
        }
    }

    #[test]
    fn cset_sizes_follow_ratios(sys in system_strategy()) {
        for c in sys.csets() {
            prop_assert_eq!(sys.growth().ratio(c.level()).unwrap(), BigUint::from(c.len()));
            for (m, s) in c.members().iter().zip(c.strings()) {
                prop_assert_eq!(&sys.expand(m).unwrap(), s);
                let found = sys.locate(s);
                prop_assert_eq!(found.as_ref(), Some(m));
            }
        }
    }

    #[test]
    fn structural_equals_bruteforce(sys in system_strategy()) {
        for n in 1..=1usize << (sys.depth() - 1) {
            let a = factor_set_structural(&sys, n).unwrap();
            let b = factor_set_bruteforce(&sys, n).unwrap();
            prop_assert!(a.same_words(&b), "n={}", n);
        }
    }

    #[test]
    fn factor_language_properties(sys in system_strategy()) {
        let n_max = 1usize << (sys.depth() - 1);
        prop_assert!(factorial_closedness(&sys, n_max).unwrap().ok());
        let dims = dims_up_to(&sys, n_max).unwrap();
        prop_assert!(submultiplicativity(&dims).ok());
        prop_assert!(chunk_property(&sys, 4).unwrap().ok());
        if sys.depth() >= 2 {
            let shallow = sys.truncated(sys.depth() - 1);
            for n in 1..=n_max / 2 {
                let small = factor_set_structural(&shallow, n).unwrap();
                let large = factor_set_structural(&sys, n).unwrap();
                prop_assert!(small.is_subset(&large));
            }
        }
    }

    #[test]
    fn windows_are_slices(sys in system_strategy(), from in 0usize..16, len in 0usize..16) {
        let level = sys.depth();
        for r in sys.sample_elements(level, 8, 1) {
            let full = sys.expand(&r).unwrap();
            let got = sys.expand_window(&r, from, len);
            if from + len <= full.len() {
                prop_assert_eq!(got.unwrap(), full[from..from + len].to_vec());
            } else {
                prop_assert!(got.is_err());
            }
        }
    }

    #[test]
    fn gap_scan_matches_naive(word in prop::collection::vec(0u8..2, 0..40), pat in prop::collection::vec(0u8..2, 1..4)) {
        let starts: Vec<usize> = (0..word.len().saturating_sub(pat.len() - 1))
            .filter(|&i| word[i..].starts_with(&pat))
            .collect();
        let s = scan_gaps(&word, &pat);
        prop_assert_eq!(s.occurrences, starts.len());
        prop_assert_eq!(s.first, starts.first().copied());
        let gap = starts.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
        prop_assert_eq!(s.max_gap, gap);
    }

    #[test]
    fn sampling_is_sorted_distinct_and_stable(sys in system_strategy(), count in 1usize..20, seed in any::<u64>()) {
        let level = sys.depth();
        let a = sys.sample_elements(level, count, seed);
        prop_assert_eq!(&a, &sys.sample_elements(level, count, seed));
        prop_assert!(a.windows(2).all(|w| w[0] < w[1]));
        let total: u64 = sys.level_word_count(level).try_into().unwrap();
        prop_assert_eq!(a.len() as u64, total.min(count as u64));
    }
}
