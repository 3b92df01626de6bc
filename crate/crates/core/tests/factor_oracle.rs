use growthforge_core::analyzer::invariants::{chunk_property, depth_monotonicity, factorial_closedness};
use growthforge_core::analyzer::{
    check_growth_sandwich, check_nonperiodicity, dim_series, entropy_bands, factor_set_bruteforce,
    factor_set_bruteforce_with_budget, factor_set_structural, minimal_forbidden_words, verify_recurrence_gaps,
    AnalyzeError,
};
use growthforge_core::construction::{
    build_free_power_system, build_plain, build_uniformly_recurrent, Chooser, LevelSystem,
};
use growthforge_core::{Family, GrowthFunction, Ratio};

fn toy(depth: u32) -> LevelSystem {
    let g = GrowthFunction::new(Family::dyadic_table(&[2, 4, 8, 16])).unwrap();
    build_plain(g, Chooser::Lex, depth).unwrap()
}

fn poly() -> GrowthFunction {
    GrowthFunction::new(Family::poly_geometric(Ratio::new(1, 10))).unwrap()
}

fn words(sys: &LevelSystem, n: usize) -> Vec<String> {
    factor_set_bruteforce(sys, n)
        .unwrap()
        .iter()
        .map(|w| sys.alphabet().render(&w))
        .collect()
}

fn assert_oracle(sys: &LevelSystem) {
    for n in 1..=1usize << (sys.depth() - 1) {
        let brute = factor_set_bruteforce(sys, n).unwrap();
        let fast = factor_set_structural(sys, n).unwrap();
        assert!(fast.same_words(&brute), "n={n}: {} vs {}", fast.len(), brute.len());
    }
}

#[test]
fn toy_depth_two_factors() {
    let sys = toy(2);
    assert_eq!(words(&sys, 2), ["aa", "ab", "ba", "bb"]);
    assert_eq!(words(&sys, 3).len(), 8);
    assert_eq!(words(&sys, 1), ["a", "b"]);
}

#[test]
fn structural_matches_bruteforce() {
    assert_oracle(&toy(3));
    assert_oracle(&build_plain(poly(), Chooser::Lex, 5).unwrap());
    assert_oracle(&build_plain(poly(), Chooser::Seeded { seed: 9 }, 5).unwrap());
    assert_oracle(&build_uniformly_recurrent(poly(), 5, 4, 0, 12, Chooser::Lex).unwrap());
    assert_oracle(&build_free_power_system(Ratio::integer(1), 4).unwrap().0);
}

#[test]
fn structural_rejects_long_words() {
    let sys = toy(3);
    assert!(matches!(
        factor_set_structural(&sys, 5),
        Err(AnalyzeError::DepthTooShallow { n: 5, depth: 3 })
    ));
}

#[test]
fn bruteforce_budget() {
    let sys = toy(3);
    assert!(matches!(
        factor_set_bruteforce_with_budget(&sys, 2, 10),
        Err(AnalyzeError::BudgetExceeded { .. })
    ));
}

#[test]
fn toy_dimensions_and_csv() {
    let report = dim_series(&toy(3), 3).unwrap();
    assert_eq!(report.dims(), [2, 4, 8]);
    let csv = report.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,dim,cumulative,entropy_partial,depth");
    assert_eq!(lines[1], "1,2,2,2.0,3");
    assert!(lines[2].starts_with("2,4,6,2.44948"));
    assert!(lines[3].starts_with("3,8,14,2.41014"));
    assert!(report.submultiplicative);
}

#[test]
fn toy_sandwich() {
    let s = check_growth_sandwich(&toy(3), 1).unwrap();
    assert_eq!(s.dim, 4);
    assert_eq!(s.hard_lower, 2u32.into());
    assert_eq!(s.hard_upper, (32u32 * 8).into());
    assert!(s.hard_ok());
    assert!(check_growth_sandwich(&toy(3), 3).is_err());
}

#[test]
fn poly_sandwich_bounds() {
    let sys = build_plain(poly(), Chooser::Lex, 7).unwrap();
    let s = check_growth_sandwich(&sys, 5).unwrap();
    assert_eq!(s.hard_lower, 600u32.into());
    assert_eq!(s.hard_upper, (8192u64 * 28531).into());
    assert!(s.hard_ok());
}

#[test]
fn toy_nonperiodicity() {
    let r = check_nonperiodicity(&toy(3), 3).unwrap();
    assert_eq!(r.complexity, [2, 4, 8]);
    assert!(r.verdict.passed());
    let constant = build_plain(
        GrowthFunction::new(Family::dyadic_table(&[1, 1, 1, 1])).unwrap(),
        Chooser::Lex,
        3,
    )
    .unwrap();
    let r = check_nonperiodicity(&constant, 2).unwrap();
    assert_eq!(r.first_failure, Some(1));
    assert!(!r.verdict.passed());
}

#[test]
fn toy_forbidden_words() {
    let sys = toy(3);
    let f = minimal_forbidden_words(&sys, 4).unwrap();
    assert!(f.words.contains(&"bbbb".to_string()));
    assert_eq!(f.label, "forbidden at depth 3");
    assert!(minimal_forbidden_words(&sys, 1).unwrap().words.is_empty());
    for w in &f.words {
        let letters = sys.alphabet().parse(w).unwrap();
        let n = letters.len();
        assert!(!factor_set_bruteforce(&sys, n).unwrap().contains(&letters));
        if n > 1 {
            let shorter = factor_set_bruteforce(&sys, n - 1).unwrap();
            assert!(shorter.contains(&letters[1..]) && shorter.contains(&letters[..n - 1]));
        }
    }
}

#[test]
fn forbidden_words_stay_absent_one_level_down() {
    let deep = build_plain(poly(), Chooser::Lex, 5).unwrap();
    let shallow = deep.truncated(4);
    for w in minimal_forbidden_words(&deep, 8).unwrap().words {
        let letters = deep.alphabet().parse(&w).unwrap();
        assert!(!factor_set_structural(&shallow, letters.len())
            .unwrap()
            .contains(&letters));
    }
}

#[test]
fn toy_recurrence_without_captures() {
    let r = verify_recurrence_gaps(&toy(3), 100, 0).unwrap();
    assert!(r.entries.is_empty());
    assert!(r.verdict.passed());
}

#[test]
fn captured_letter_recurs() {
    let sys = build_uniformly_recurrent(poly(), 6, 1, 0, 12, Chooser::Lex).unwrap();
    let r = verify_recurrence_gaps(&sys, 500, 3).unwrap();
    assert_eq!(r.entries.len(), 1);
    assert_eq!(r.entries[0].target, "a");
    assert_eq!(r.entries[0].gap_bound, 4);
    assert!(r.entries[0].max_gap <= 4);
    assert!(r.verdict.passed());
}

#[test]
fn bands_for_unit_epsilon() {
    let bands = entropy_bands(&Family::geometric(Ratio::integer(1)));
    assert_eq!(bands[0].lower, "1.414213");
    assert_eq!(bands[0].upper, "4.0");
    assert_eq!(bands[1].lower, "1.333333");
    assert_eq!(bands[1].upper, "4.0");
    assert!(entropy_bands(&Family::exp_power(Ratio::new(1, 2))).is_empty());
}

#[test]
fn invariant_suite_on_fixtures() {
    for sys in [
        toy(3),
        build_uniformly_recurrent(poly(), 5, 4, 0, 12, Chooser::Lex).unwrap(),
    ] {
        assert!(factorial_closedness(&sys, 1 << (sys.depth() - 1)).unwrap().ok());
        assert!(depth_monotonicity(&sys, 8).unwrap().ok());
        let chunk = chunk_property(&sys, 4).unwrap();
        assert!(chunk.ok(), "{:?}", chunk.counterexample);
        assert!(chunk.checked > 0);
    }
}
