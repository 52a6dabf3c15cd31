//! Scenario documents survive print/parse unchanged.

use std::path::PathBuf;

use dnumbers::scenario::{
    parse_scenario, print_scenario, DNumberSpec, MassEntry, NonExclusivitySpec, OverrideDegree, PairDegree,
    ScenarioDocument,
};
use proptest::prelude::*;

fn shipped() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut files: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
}

#[test]
fn shipped_scenarios_round_trip() {
    let files = shipped();
    assert!(files.len() >= 4);
    for path in files {
        let text = std::fs::read_to_string(&path).unwrap();
        let doc = parse_scenario(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        doc.resolve().unwrap();
        let printed = print_scenario(&doc);
        assert_eq!(parse_scenario(&printed).unwrap(), doc, "{}", path.display());
        assert_eq!(print_scenario(&parse_scenario(&printed).unwrap()), printed);
    }
}

/// A decimal in [0, 1] with at most 12 fractional digits, as text.
fn decimal() -> impl Strategy<Value = String> {
    (0usize..=12).prop_flat_map(|digits| {
        let scale = 10u64.pow(digits as u32);
        let small = 0..=scale.min(1000);
        prop_oneof![0..=scale, small].prop_map(move |k| {
            if digits == 0 {
                format!("{k}.0")
            } else {
                format!("{}.{:0width$}", k / scale, k % scale, width = digits)
            }
        })
    })
}

fn document() -> impl Strategy<Value = (ScenarioDocument, Vec<String>)> {
    let labels = ["a", "b", "c", "d"].map(String::from).to_vec();
    let subset = prop::sample::subsequence(labels.clone(), 1..=4);
    let masses = prop::collection::vec((subset, decimal()), 0..4);
    let dnumbers = prop::collection::vec(masses, 0..3);
    let pair_degrees = prop::collection::vec(prop::option::of(decimal()), 6);
    let override_degree = prop::option::of(decimal());
    (dnumbers, pair_degrees, override_degree).prop_map(move |(dnumbers, pairs, ov)| {
        let mut texts = Vec::new();
        let dnumbers = dnumbers
            .into_iter()
            .enumerate()
            .map(|(i, masses)| DNumberSpec {
                name: format!("D{i}"),
                masses: masses
                    .into_iter()
                    .map(|(subset, w)| {
                        let weight = w.parse().unwrap();
                        texts.push(w);
                        MassEntry { subset, weight }
                    })
                    .collect(),
            })
            .collect();
        let all_pairs = [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")];
        let pairs = all_pairs
            .iter()
            .zip(pairs)
            .filter_map(|(&(x, y), p)| {
                p.map(|p| {
                    let degree = p.parse().unwrap();
                    texts.push(p);
                    PairDegree { elements: [x.into(), y.into()], degree }
                })
            })
            .collect();
        let overrides = ov
            .map(|p| {
                let degree = p.parse().unwrap();
                texts.push(p);
                vec![OverrideDegree { subsets: [vec!["a".into()], vec!["c".into(), "d".into()]], degree }]
            })
            .unwrap_or_default();
        let doc = ScenarioDocument {
            frame: labels.clone(),
            dnumbers,
            nonexclusivity: NonExclusivitySpec { pairs, overrides },
        };
        (doc, texts)
    })
}

proptest! {
    #[test]
    fn print_then_parse_is_identity((doc, decimals) in document()) {
        let printed = print_scenario(&doc);
        let back = parse_scenario(&printed).unwrap();
        prop_assert_eq!(&back, &doc);
        // Each decimal reappears verbatim, up to trailing zeros, in the output.
        for text in decimals {
            let trimmed = text.trim_end_matches('0');
            let canonical = if trimmed.ends_with('.') { format!("{trimmed}0") } else { trimmed.to_string() };
            let v: f64 = text.parse().unwrap();
            prop_assert_eq!(toml::Value::Float(v).to_string(), canonical.clone());
            prop_assert!(printed.contains(&canonical), "{} missing from\n{}", canonical, printed);
        }
    }
}
