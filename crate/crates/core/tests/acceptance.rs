//! Acceptance gate: one test per criterion, each printing a pass/fail
//! line. Every threshold is pinned here; a single violating tuple fails
//! the build.

use std::collections::BTreeMap;
use std::time::Instant;

use nonhalt_core::algebra::{check_congruence, from_model, quotient, validate, ClosureOps};
use nonhalt_core::calg::{self, Tri};
use nonhalt_core::context::{full_model_context, ConcreteModel};
use nonhalt_core::filters::{
    agreenor_violation, build_representation, lemma_star_violation, maxagree_violation, minb_check,
    verify_representation, while_unroll,
};
use nonhalt_core::fixtures;
use nonhalt_core::laws::{self, AnyContext, CheckMode, LawStatus};
use nonhalt_core::pfun::{ext_while, TestSet};
use nonhalt_core::{EvalContext, FiniteAlgebra};

const SAMPLE_SEED: u64 = 1729;
const SAMPLE_COUNT: u64 = 1_000_000;
const WORKERS: usize = 4;

const SUITES_UNDER_TEST: [&str; 7] = [
    "restriction-with-tests",
    "eite",
    "twisted-agreeable",
    "disagreeable",
    "weak-comparison",
    "kleenean-w",
    "order",
];

fn assert_all_pass(ctx: &ConcreteModel, mode: CheckMode, what: &str) {
    for name in SUITES_UNDER_TEST {
        let suite = laws::suite(name).unwrap();
        let report = laws::check_suite(ctx, &suite, mode, WORKERS).unwrap();
        assert!(report.passed(), "{what}, suite {name}:\n{}", report.render_text());
    }
}

/// Criterion 1: the full models satisfy every suite; the two-point model
/// exhaustively, the three-point model exhaustively up to the sample
/// budget and with one million seeded samples beyond it; total under five
/// minutes.
#[test]
fn criterion_1_full_models_are_sound() {
    let started = Instant::now();
    let m2 = full_model_context(2).unwrap();
    assert_eq!((m2.element_count(), m2.test_elements().len()), (9, 4));
    assert_all_pass(&m2, CheckMode::Exhaustive, "full_model(2)");
    // the table algebra built from it agrees
    let tm2 = from_model(&m2, ClosureOps::all(), 0).unwrap();
    assert!(validate(&tm2.algebra).is_valid());
    for name in SUITES_UNDER_TEST {
        let suite = laws::suite(name).unwrap();
        let report =
            laws::check_suite(&tm2.algebra, &suite, CheckMode::Exhaustive, WORKERS).unwrap();
        assert!(report.passed(), "full_model(2) tables, suite {name}:\n{}", report.render_text());
    }

    let m3 = full_model_context(3).unwrap();
    assert_eq!((m3.element_count(), m3.test_elements().len()), (64, 8));
    // unary/binary/ternary spaces on 64 elements stay within the budget,
    // so Auto runs them exhaustively and samples every larger law
    let mode = CheckMode::Auto { count: SAMPLE_COUNT, seed: SAMPLE_SEED };
    assert_all_pass(&m3, mode, "full_model(3)");

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 300, "criterion 1 exceeded five minutes: {elapsed:?}");
    println!("criterion 1: PASS (full models sound, {elapsed:?})");
}

/// Criterion 2: the eight-point system is twisted agreeable, its built-in
/// partition is a congruence, and the quotient fails DT2 with evaluations
/// matching the narrative: D(sb)e = D(sb), D(sb')e = D(sb'), D(s)e != D(s).
#[test]
fn criterion_2_eight_point_reproduction() {
    let model = fixtures::quasiv_model();
    let suite = laws::suite("twisted-agreeable").unwrap();
    let report = laws::check_suite(&model, &suite, CheckMode::Exhaustive, WORKERS).unwrap();
    assert!(report.passed(), "{}", report.render_text());

    let tm = fixtures::quasiv_table_model();
    let partition = fixtures::quasiv_partition(&tm);
    let congruence = check_congruence(&tm.algebra, &partition).unwrap();
    assert!(congruence.is_congruence(), "{:?}", congruence.violation);
    assert!(congruence.mixed_blocks.is_empty());

    let (q, block) = quotient(&tm.algebra, &partition).unwrap();
    let suite = laws::suite("restriction-with-tests").unwrap();
    let report = laws::check_suite(&q, &suite, CheckMode::Exhaustive, WORKERS).unwrap();
    let failed: Vec<_> = report.results.iter().filter(|r| !r.passed()).collect();
    assert_eq!(failed.len(), 1, "exactly DT2 must fail:\n{}", report.render_text());
    assert_eq!(failed[0].law, "DT2");
    let LawStatus::Fail { witness, .. } = &failed[0].status else { unreachable!() };
    // any reported witness replays to a violation
    assert_eq!(laws::replay(&q, &laws::law("DT2").unwrap(), witness).unwrap(), Some(0));

    // the narrative instance: s, beta, t = e, u = 1
    let idx = |pairs: &[(usize, usize)]| {
        let mut image = vec![None; 8];
        for &(x, y) in pairs {
            image[x] = Some(y);
        }
        block[tm
            .index_of(&nonhalt_core::PartialMap::from_entries(image).unwrap())
            .expect("fixture element")]
    };
    let s = idx(&[(0, 4), (1, 5), (2, 6), (3, 7)]);
    let beta = idx(&[(0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (5, 5)]);
    let e = idx(&[(0, 0), (1, 1), (2, 2)]);
    let one = q.one_elem();
    let narrative: BTreeMap<String, usize> = [
        ("s".to_string(), s),
        ("b".to_string(), beta),
        ("t".to_string(), e),
        ("u".to_string(), one),
    ]
    .into();
    assert_eq!(laws::replay(&q, &laws::law("DT2").unwrap(), &narrative).unwrap(), Some(0));
    // premise and conclusion evaluations match the narrative
    let d_sb = q.d(q.m(s, beta)).unwrap();
    let d_sb1 = q.d(q.m(s, q.comp_test(beta).unwrap())).unwrap();
    let d_s = q.d(s).unwrap();
    assert_eq!(q.m(d_sb, e), d_sb, "D(sb)e = D(sb)");
    assert_eq!(q.m(d_sb1, e), d_sb1, "D(sb')e = D(sb')");
    assert_ne!(q.m(d_s, e), d_s, "D(s)e != D(s)");
    println!("criterion 2: PASS (eight-point system and its DT2-breaking quotient)");
}

/// Criterion 3: the ten-point system is disagreeable, its partition is a
/// congruence, and the quotient fails inimp with witness (s, t, e).
#[test]
fn criterion_3_ten_point_reproduction() {
    let model = fixtures::ten_point_model();
    let suite = laws::suite("disagreeable").unwrap();
    let report = laws::check_suite(&model, &suite, CheckMode::Exhaustive, WORKERS).unwrap();
    assert!(report.passed(), "{}", report.render_text());

    let tm = fixtures::ten_point_table_model();
    let partition = fixtures::ten_point_partition(&tm);
    let congruence = check_congruence(&tm.algebra, &partition).unwrap();
    assert!(congruence.is_congruence(), "{:?}", congruence.violation);
    assert!(congruence.mixed_blocks.is_empty());

    let (q, block) = quotient(&tm.algebra, &partition).unwrap();
    let report = laws::check_suite(&q, &suite, CheckMode::Exhaustive, WORKERS).unwrap();
    let failed: Vec<_> = report.results.iter().filter(|r| !r.passed()).collect();
    assert_eq!(failed.len(), 1, "exactly inimp must fail:\n{}", report.render_text());
    assert_eq!(failed[0].law, "inimp");

    let s = block[tm.index_of(&fixtures::ten_point_map_s()).unwrap()];
    let t = block[tm.index_of(&fixtures::ten_point_map_t()).unwrap()];
    let e_map = nonhalt_core::PartialMap::from_entries(vec![
        Some(0),
        Some(1),
        Some(2),
        None,
        None,
        None,
        None,
        None,
        None,
        None,
    ])
    .unwrap();
    let e = block[tm.index_of(&e_map).unwrap()];
    let expected: BTreeMap<String, usize> =
        [("s".to_string(), s), ("t".to_string(), t), ("e".to_string(), e)].into();
    let LawStatus::Fail { witness, .. } = &failed[0].status else { unreachable!() };
    assert_eq!(*witness, expected, "the reported witness is exactly (s, t, e)");
    assert_eq!(laws::replay(&q, &laws::law("inimp").unwrap(), &expected).unwrap(), Some(0));
    println!("criterion 3: PASS (ten-point system and its inimp-breaking quotient)");
}

fn representation_corpus() -> Vec<(String, FiniteAlgebra)> {
    let mut corpus: Vec<(String, FiniteAlgebra)> = vec![
        ("three-chain".into(), fixtures::three_element_algebra()),
        ("eight-point".into(), fixtures::quasiv_table_model().algebra),
        ("eight-point+wc".into(), fixtures::quasiv_table_model_wc().algebra),
        ("ten-point".into(), fixtures::ten_point_table_model().algebra),
    ];
    for n in 0..=2 {
        let model = full_model_context(n).unwrap();
        let tm = from_model(&model, ClosureOps::all(), 0).unwrap();
        corpus.push((format!("full({n})"), tm.algebra));
    }
    for (seed, tm) in fixtures::random_corpus(1000, 20, 40) {
        assert!(validate(&tm.algebra).is_valid(), "seed {seed}");
        corpus.push((format!("random({seed})"), tm.algebra));
    }
    // a smaller batch carrying disagreement tables as well
    for (seed, tm) in fixtures::random_corpus_disagreeable(3000, 6, 40) {
        assert!(validate(&tm.algebra).is_valid(), "seed {seed}");
        corpus.push((format!("random-neq({seed})"), tm.algebra));
    }
    corpus
}

/// Criterion 4: the representation is faithful on the whole corpus, and
/// the eight-point quotient fails complement coverage.
#[test]
fn criterion_4_representation_faithfulness() {
    let corpus = representation_corpus();
    assert!(corpus.len() >= 25);
    assert!(corpus.iter().any(|(_, a)| a.has_neq()));
    assert!(corpus.iter().any(|(_, a)| a.has_wc()));
    for (name, alg) in &corpus {
        let rep = build_representation(alg).unwrap();
        let report = verify_representation(alg, &rep);
        assert!(
            report.passed(),
            "{name}: {} failures, first {:?}",
            report.failures.len(),
            report.failures.first()
        );
    }
    let tm = fixtures::quasiv_table_model();
    let (q, _) = quotient(&tm.algebra, &fixtures::quasiv_partition(&tm)).unwrap();
    let rep = build_representation(&q).unwrap();
    let report = verify_representation(&q, &rep);
    assert!(
        report.failures.iter().any(|f| f.check == "complement-coverage"),
        "quotient must fail complement coverage, got {:?}",
        report.failures
    );
    println!(
        "criterion 4: PASS (faithful on {} algebras; quotient fails complement coverage)",
        corpus.len()
    );
}

/// Criterion 5: the agreement lemmas hold exhaustively across the corpus.
#[test]
fn criterion_5_lemma_oracles() {
    let mut checked = 0;
    for (name, alg) in representation_corpus() {
        if alg.star_of(0, 0).is_none() {
            continue;
        }
        assert_eq!(agreenor_violation(&alg).unwrap(), None, "{name}: agreenor");
        assert_eq!(lemma_star_violation(&alg).unwrap(), None, "{name}: filter agreement");
        assert_eq!(maxagree_violation(&alg).unwrap(), None, "{name}: maximal agreement");
        checked += 1;
    }
    assert!(checked >= 25);
    println!("criterion 5: PASS (three lemmas, {checked} algebras, zero violations)");
}

/// Criterion 6: each quasi-equation agrees in truth with its equational
/// counterpart on every corpus algebra carrying the needed operations.
#[test]
fn criterion_6_equivalence_propositions() {
    let mut corpus: Vec<(String, AnyContext)> = representation_corpus()
        .into_iter()
        .map(|(name, alg)| (name, AnyContext::Algebra(Box::new(alg))))
        .collect();
    let tm = fixtures::quasiv_table_model();
    let (q, _) = quotient(&tm.algebra, &fixtures::quasiv_partition(&tm)).unwrap();
    corpus.push(("eight-point-quotient".into(), AnyContext::Algebra(Box::new(q))));

    let mode = CheckMode::Auto { count: SAMPLE_COUNT, seed: SAMPLE_SEED };
    let outcomes = laws::check_equivalences(&corpus, mode, WORKERS).unwrap();
    let mut agreements = 0;
    for o in &outcomes {
        match &o.status {
            laws::EquivStatus::Disagree { left, right } => {
                panic!("{} / {}: sides disagree (left {left}, right {right})", o.algebra, o.pair)
            }
            laws::EquivStatus::Agree { .. } => agreements += 1,
            _ => {}
        }
    }
    // the broken quotient exercises the false/false case, the eight-point
    // system itself the true/true case of the agreement form
    assert!(outcomes.iter().any(|o| o.algebra == "eight-point-quotient"
        && matches!(o.status, laws::EquivStatus::Agree { holds: false })));
    assert!(outcomes.iter().any(|o| o.algebra == "eight-point"
        && o.pair == "DT2<=>DT2A"
        && matches!(o.status, laws::EquivStatus::Agree { holds: true })));
    assert!(agreements > 0);
    println!(
        "criterion 6: PASS ({} evaluations, {agreements} agreements, zero disagreements)",
        outcomes.len()
    );
}

/// Criterion 7: the loop laws hold on the two-point full model and on ten
/// random four-point models; the loop is minimal; the unrolling matches
/// the loop on every triple; all under two minutes.
#[test]
fn criterion_7_while_do() {
    let started = Instant::now();
    let mut models = vec![("full(2)".to_string(), full_model_context(2).unwrap())];
    for seed in 0..10u64 {
        models.push((format!("random4({seed})"), fixtures::random_model(seed, 4, 3, 2)));
    }
    let loop_laws = ["W12", "W1", "W2", "Kleenean-1", "Kleenean-2"];
    for (name, model) in &models {
        for law_name in loop_laws {
            let law = laws::law(law_name).unwrap();
            let r = laws::check_law(model, &law, CheckMode::Exhaustive, WORKERS).unwrap();
            assert!(r.passed(), "{name}: {law_name} failed");
        }
        for t in model.maps() {
            for a in model.test_elements() {
                let guard = TestSet::from_map(&model.element(*a)).unwrap();
                for s in model.maps() {
                    let direct = ext_while(t, &guard, s);
                    let un = while_unroll(model, t, &model.element(*a), s).unwrap();
                    assert_eq!(un.result, direct, "{name}: unrolling mismatch");
                    assert!(un.powers_below_result, "{name}: power not below loop");
                    let r = minb_check(model, t, &guard, s);
                    assert!(r.holds, "{name}: loop not minimal");
                }
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 120, "criterion 7 exceeded two minutes: {elapsed:?}");
    println!(
        "criterion 7: PASS (loop laws, minimality and unrolling on {} models, {elapsed:?})",
        models.len()
    );
}

/// Criterion 8: three-valued semantics on every full model with at most
/// three points, with the asymmetric cases exercised; negation is an
/// involution and the test sort embeds injectively.
#[test]
fn criterion_8_three_valued_predicates() {
    let mut asymmetric_and_fu = 0;
    let mut asymmetric_or_ut = 0;
    for n in 0..=3 {
        let model = full_model_context(n).unwrap();
        let preds = calg::generate_bstar(&model, 256).unwrap();
        let report = calg::three_valued_check(&model, &preds).unwrap();
        assert!(report.passed(), "full({n}): {:?}", report.violations.first());
        let traces: Vec<Vec<Tri>> = preds.iter().map(|p| calg::trace(&model, p).unwrap()).collect();
        for p in &traces {
            for q in &traces {
                for st in 0..model.points() {
                    if p[st] == Tri::F && q[st] == Tri::U {
                        asymmetric_and_fu += 1; // and must come out F here
                    }
                    if p[st] == Tri::U && q[st] == Tri::T {
                        asymmetric_or_ut += 1; // or must stay U here
                    }
                }
            }
        }
        // negation is an involution on the closure
        for p in &preds {
            let np = calg::connective(&model, calg::Connective::Not, p, None).unwrap();
            let nnp = calg::connective(&model, calg::Connective::Not, &np, None).unwrap();
            assert_eq!(nnp.table, p.table);
        }
        // the test sort embeds injectively via alpha -> (1, alpha)[x, y]
        let mut tables = Vec::new();
        for &alpha in model.test_elements() {
            let alphav = model.element(alpha);
            let mut table = Vec::new();
            for x in 0..model.element_count() {
                for y in 0..model.element_count() {
                    table.push(
                        model
                            .eite(&model.one(), &alphav, &model.element(x), &model.element(y))
                            .unwrap(),
                    );
                }
            }
            assert!(!tables.contains(&table), "full({n}): test embedding not injective");
            assert!(preds.iter().any(|p| p.table == table), "full({n}): test not in closure");
            tables.push(table);
        }
    }
    assert!(asymmetric_and_fu > 0, "no F/U conjunction case exercised");
    assert!(asymmetric_or_ut > 0, "no U/T disjunction case exercised");
    println!(
        "criterion 8: PASS (three-valued traces exact; {asymmetric_and_fu} F∧U and {asymmetric_or_ut} U∨T cases covered)"
    );
}

/// Criterion 9: sampled reports are byte-identical across repeated runs
/// and worker counts.
#[test]
fn criterion_9_determinism() {
    let m2 = full_model_context(2).unwrap();
    let m3 = full_model_context(3).unwrap();
    let mode = CheckMode::Sampled { count: 50_000, seed: 42 };
    for (name, model) in [("full(2)", &m2), ("full(3)", &m3)] {
        for suite_name in ["eite", "weak-comparison"] {
            let suite = laws::suite(suite_name).unwrap();
            let baseline =
                serde_json::to_string(&laws::check_suite(model, &suite, mode, 1).unwrap()).unwrap();
            for workers in [2, 3, 8] {
                let again = serde_json::to_string(
                    &laws::check_suite(model, &suite, mode, workers).unwrap(),
                )
                .unwrap();
                assert_eq!(baseline, again, "{name}/{suite_name}: workers={workers}");
            }
            let rerun =
                serde_json::to_string(&laws::check_suite(model, &suite, mode, 1).unwrap()).unwrap();
            assert_eq!(baseline, rerun, "{name}/{suite_name}: rerun");
        }
    }
    println!("criterion 9: PASS (byte-identical sampled reports across runs and worker counts)");
}
