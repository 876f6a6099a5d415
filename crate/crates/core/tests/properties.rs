mod common;

use std::collections::BTreeSet;

use common::{canonical_graph, count_feat_tags};
use gmt_core::ag::{ag_to_gmt, gmt_to_ag, TypeMap};
use gmt_core::merge::{anchor_key, merge, MergePolicy, ParallelPolicy};
use gmt_core::synth::{self, DocShape};
use gmt_core::{parse_gmt, serialize_gmt, validate_structure, FeatureValue, GmtDocument};
use proptest::prelude::*;

fn feature_set(doc: &GmtDocument) -> BTreeSet<(String, String)> {
    doc.walk()
        .iter()
        .flat_map(|(_, n)| n.all_features())
        .filter_map(|f| match &f.value {
            FeatureValue::Text(v) => Some((f.cat_type.clone(), v.clone())),
            _ => None,
        })
        .collect()
}

fn shape_of(doc: &GmtDocument) -> Vec<(Option<String>, Option<String>, usize)> {
    let mut out: Vec<_> = doc
        .walk()
        .iter()
        .map(|(_, n)| (anchor_key(n), n.node_type.clone(), n.all_features().len()))
        .collect();
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn documents_round_trip(seed: u64, roots in 0usize..6, depth in 0usize..4, items in 0usize..7) {
        let mut rng = synth::rng(seed);
        let shape = DocShape { max_roots: roots, max_children: 3, max_depth: depth, max_items: items };
        let doc = synth::document(&mut rng, shape);
        let text = serialize_gmt(&doc).unwrap();
        let (back, diags) = parse_gmt(&text).unwrap();
        prop_assert!(diags.is_empty());
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(serialize_gmt(&back).unwrap(), text);
    }

    #[test]
    fn graphs_round_trip(seed: u64) {
        let mut rng = synth::rng(seed);
        let graph = synth::graph(&mut rng, &["P", "W"]);
        let map = TypeMap::default();
        let docs = ag_to_gmt(&graph, &map).unwrap();
        let back = gmt_to_ag(&docs[0], &docs[1..], &map).unwrap();
        prop_assert_eq!(canonical_graph(&back), canonical_graph(&graph));
    }

    #[test]
    fn fold_keeps_every_reading(seed: u64) {
        let mut rng = synth::rng(seed);
        let a = synth::document(&mut rng, DocShape::default());
        let b = synth::perturb(&mut rng, &a);
        let out = merge(&[a.clone(), b.clone()], MergePolicy::of(ParallelPolicy::FoldToAlt)).unwrap();
        let report = validate_structure(&out.doc);
        prop_assert!(report.is_empty(), "{}", report.render());
        let merged = feature_set(&out.doc);
        let inputs: BTreeSet<_> = feature_set(&a).union(&feature_set(&b)).cloned().collect();
        prop_assert!(inputs.is_subset(&merged));
    }

    #[test]
    fn keep_all_ignores_input_order(seed: u64) {
        let mut rng = synth::rng(seed);
        let a = synth::document(&mut rng, DocShape::default());
        let b = synth::perturb(&mut rng, &a);
        let policy = MergePolicy::of(ParallelPolicy::KeepAll);
        let ab = merge(&[a.clone(), b.clone()], policy).unwrap().doc;
        let ba = merge(&[b, a], policy).unwrap().doc;
        prop_assert_eq!(shape_of(&ab), shape_of(&ba));
        prop_assert_eq!(
            count_feat_tags(&serialize_gmt(&ab).unwrap()),
            count_feat_tags(&serialize_gmt(&ba).unwrap())
        );
    }
}
