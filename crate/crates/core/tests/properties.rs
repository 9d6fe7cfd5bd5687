mod common;

use mwelex::classify::{classify_fig1, classify_fig2, BlockReason};
use mwelex::interop::{
    cell_diff, export_extended_list, export_feature_list, import_extended_list,
    import_feature_list, loss_report,
};
use mwelex::registry::*;
use mwelex::stats::{cohen_kappa, pearson_columns, Estimate, JudgedColumn, Thresholds, Verdict};
use mwelex::variant::{compile_variants, match_corpus, MatchConfig, Token};
use mwelex::{parse_table, serialize_table, standard_registry, FeatureValue, LanguageConfig, Table};
use proptest::prelude::*;

use FeatureValue::{Minus, Plus, Unknown};

fn arb_cell() -> impl Strategy<Value = FeatureValue> {
    prop_oneof![
        Just(Plus),
        Just(Minus),
        Just(Unknown),
        "[a-z][a-z' ]{0,6}[a-z]".prop_map(|s| FeatureValue::literal(s).unwrap()),
        proptest::collection::btree_set("[a-z]{1,5}", 2..4)
            .prop_map(|s| FeatureValue::literals(s).unwrap()),
    ]
}

fn and(a: &FeatureValue, b: &FeatureValue) -> FeatureValue {
    kleene_and([a, b]).unwrap()
}

fn or(a: &FeatureValue, b: &FeatureValue) -> FeatureValue {
    kleene_or([a, b]).unwrap()
}

fn not(a: &FeatureValue) -> FeatureValue {
    match a {
        Plus => Minus,
        Minus => Plus,
        _ => Unknown,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn cell_text_round_trips(v in arb_cell()) {
        let text = v.to_cell();
        prop_assert_eq!(text.parse::<FeatureValue>().unwrap(), v.clone());
        let json = serde_json::to_string(&v).unwrap();
        prop_assert_eq!(serde_json::from_str::<FeatureValue>(&json).unwrap(), v);
    }

    #[test]
    fn kleene_laws(a in common::arb_binary(), b in common::arb_binary(), c in common::arb_binary()) {
        prop_assert_eq!(and(&a, &b), and(&b, &a));
        prop_assert_eq!(or(&a, &b), or(&b, &a));
        prop_assert_eq!(and(&and(&a, &b), &c), and(&a, &and(&b, &c)));
        prop_assert_eq!(and(&a, &Plus), a.clone());
        prop_assert_eq!(and(&a, &Minus), Minus);
        prop_assert_eq!(or(&a, &Plus), Plus);
        prop_assert_eq!(not(&and(&a, &b)), or(&not(&a), &not(&b)));
    }

    #[test]
    fn table_text_round_trips(t in common::arb_table(6)) {
        let reg = standard_registry();
        let text = serialize_table(&t);
        let back = parse_table(&text, &reg).unwrap();
        prop_assert_eq!(serialize_table(&back), text);
        prop_assert_eq!(back, t);
    }

    #[test]
    fn list_loss_matches_report(t in common::arb_table(5)) {
        let reg = standard_registry();
        let back = import_feature_list(&export_feature_list(&t, &reg), &t.id, &reg).unwrap();
        let diff = cell_diff(&t, &back);
        prop_assert!(diff.iter().all(|c| c.before == Minus && c.after == Unknown));
        prop_assert_eq!(diff.len(), loss_report(&t).minus_lost);
    }

    #[test]
    fn extended_list_is_lossless(t in common::arb_table(5)) {
        let reg = standard_registry();
        let back = import_extended_list(&export_extended_list(&t, &reg), &t.id, &reg).unwrap();
        prop_assert_eq!(back, t.materialized(&reg));
    }

    #[test]
    fn export_only_grows_with_judgments(t in common::arb_table(4), pick in any::<prop::sample::Index>()) {
        // Turning an Unknown cell into Plus adds exactly one list token.
        let reg = standard_registry();
        let before = export_feature_list(&t, &reg);
        let unknowns: Vec<(usize, String)> = t.entries.iter().enumerate()
            .flat_map(|(i, e)| e.features.iter()
                .filter(|(f, v)| **v == Unknown && reg.lookup(f).is_some_and(|d| d.kind == FeatureKind::Binary))
                .map(move |(f, _)| (i, f.clone())))
            .collect();
        prop_assume!(!unknowns.is_empty());
        let (i, f) = pick.get(&unknowns).clone();
        let mut t2 = t.clone();
        t2.entries[i].features.insert(f, Plus);
        let after = export_feature_list(&t2, &reg);
        for (j, (a, b)) in before.iter().zip(&after).enumerate() {
            prop_assert!(a.present_features.iter().all(|x| b.present_features.contains(x)));
            let grow = b.present_features.len() - a.present_features.len();
            prop_assert_eq!(grow, usize::from(i == j));
        }
    }

    #[test]
    fn pearson_properties(
        cols in (2usize..10).prop_flat_map(|n| (
            proptest::collection::vec(common::arb_binary(), n),
            proptest::collection::vec(common::arb_binary(), n),
        ))
    ) {
        let (f, g) = cols;
        let (n1, r1) = pearson_columns(&f, &g);
        let (n2, r2) = pearson_columns(&g, &f);
        prop_assert_eq!(n1, n2);
        prop_assert_eq!(r1, r2);
        let (_, rn) = pearson_columns(&f.iter().map(not).collect::<Vec<_>>(), &g);
        match (r1, rn) {
            (Estimate::Value(a), Estimate::Value(b)) => {
                prop_assert!(a.abs() <= 1.0);
                prop_assert!((a + b).abs() < 1e-12);
            }
            (a, b) => prop_assert_eq!(a, b),
        }
    }

    #[test]
    fn kappa_bounds(
        cols in (1usize..15).prop_flat_map(|n| (
            proptest::collection::vec(common::arb_binary(), n),
            proptest::collection::vec(common::arb_binary(), n),
        ))
    ) {
        let col = |v: &[FeatureValue]| -> JudgedColumn {
            v.iter().enumerate().map(|(i, x)| (format!("e{i:02}"), x.clone())).collect()
        };
        let k = cohen_kappa(&col(&cols.0), &col(&cols.1)).unwrap();
        if let (Estimate::Value(kappa), Some(po), Some(pe)) = (k.kappa, k.raw_agreement, k.expected_agreement) {
            prop_assert!(kappa <= 1.0 + 1e-12);
            prop_assert_eq!((kappa - 1.0).abs() < 1e-12, po == 1.0);
            if po <= pe {
                prop_assert!(kappa <= 1e-12);
            }
        }
    }

    #[test]
    fn verdicts_are_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let t = Thresholds::new(a.min(b), a.max(b)).unwrap();
        let rank = |v: Verdict| match v { Verdict::Abandon => 0, Verdict::Review => 1, Verdict::Keep => 2 };
        let (lo, hi) = (x.min(y), x.max(y));
        prop_assert!(rank(t.verdict(lo)) <= rank(t.verdict(hi)));
    }

    #[test]
    fn causative_without_be_is_one_r1_error(e in common::arb_entry("x".into(), &standard_registry())) {
        let reg = standard_registry();
        let e = e
            .with(CAUSATIVE_VERBS, FeatureValue::literals(["get"]).unwrap())
            .with(BE_COMPATIBLE, Minus);
        let r1: Vec<_> = check_implications(&e, &reg, LanguageConfig::default())
            .into_iter()
            .filter(|v| v.rule_id() == Some("R1"))
            .collect();
        prop_assert_eq!(r1.len(), 1);
        prop_assert!(r1[0].is_error());
    }

    #[test]
    fn unknown_blocks_name_an_unknown_feature(e in common::arb_entry("x".into(), &standard_registry()), copula in any::<bool>()) {
        let lang = LanguageConfig { has_copula: copula };
        for out in [classify_fig1(&e), classify_fig2(&e, lang)] {
            if let Err(u) = out {
                if u.reason == BlockReason::Unknown {
                    prop_assert_eq!(e.value(&u.blocking_feature), &Unknown);
                }
            }
        }
    }
}

const OPERATIONS: [&str; 6] = [
    PASSIVIZATION,
    DATIVE_SHIFT,
    FIXED_CONSTITUENT_OPTIONAL,
    FREE_SLOT_OPTIONAL,
    VERB_REMOVABLE,
    ADJUNCT_INSERTION,
];

fn demo() -> Table {
    common::load_fixture("demo.tsv")
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn minus_removes_exactly_the_licensed_variants(
        pick in any::<prop::sample::Index>(),
        feature in prop::sample::select(OPERATIONS.to_vec()),
        others in proptest::collection::vec(common::arb_binary(), OPERATIONS.len()),
    ) {
        prop_assume!(feature != ADJUNCT_INSERTION);
        let t = demo();
        let mut e = t.materialize(pick.get(&t.entries));
        for (f, v) in OPERATIONS.iter().zip(others) {
            e = e.with(f, v);
        }
        let on = compile_variants(&e.clone().with(feature, Plus)).unwrap().variants;
        let off = compile_variants(&e.with(feature, Minus)).unwrap().variants;
        let kept: Vec<_> = on
            .into_iter()
            .filter(|v| v.licensing_feature.as_deref() != Some(feature))
            .collect();
        prop_assert_eq!(kept, off);
    }

    #[test]
    fn matching_is_deterministic(words in proptest::collection::vec(
        prop::sample::select(vec!["max", "dealt", "deal", "a", "blow", "to", "the", "project", "bear", "comparison"]),
        0..12,
    )) {
        let t = demo();
        let patterns: Vec<_> = t
            .materialized_entries()
            .iter()
            .flat_map(|e| compile_variants(e).unwrap().variants)
            .collect();
        let doc: Vec<Token> = words.iter().map(|w| Token::new(w, w)).collect();
        let cfg = MatchConfig::default();
        let a = match_corpus(&patterns, &doc, &cfg);
        prop_assert_eq!(&a, &match_corpus(&patterns, &doc, &cfg));
        for w in a.windows(2) {
            prop_assert!(w[0].token_start <= w[1].token_start);
        }
    }
}

#[test]
fn stray_r1_breach_in_fixture_is_found() {
    let reg = standard_registry();
    let mut t = demo();
    let e = t.entries.iter_mut().find(|e| e.id == "in-a-jam").unwrap();
    e.features.insert(BE_COMPATIBLE.into(), Minus);
    let v = mwelex::validate_table(&t, &reg, LanguageConfig::default());
    let r1: Vec<_> = v.iter().filter(|v| v.rule_id() == Some("R1")).collect();
    assert_eq!(r1.len(), 1);
    assert_eq!(r1[0].entry_id.as_deref(), Some("in-a-jam"));
}
