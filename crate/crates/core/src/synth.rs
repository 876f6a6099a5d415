//! Seeded random inputs for property tests and benchmarks.
//!
//! Every generator takes an explicit RNG so runs are reproducible; use
//! [`rng`] to build one from a seed.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ag::{AnnotationGraph, GraphArc, TYPE_ATTR, VALUE_ATTR};
use crate::anchoring::{LandmarkTable, TokenEntry, TokenIndex};
use crate::model::{
    AltSet, Alternative, Bracket, Feature, FeatureValue, GmtDocument, NodeItem, Relation, SegmentRef, StructNode,
    CONFIDENCE,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const CATEGORIES: &[&str] = &["lemma", "pos", "tense", "person", "number", "gender", "synCat", "note"];
const POS: &[&str] = &["PNOUN", "VERB", "DET", "NOUN", "PREP"];
const NODE_TYPES: &[&str] = &["W-level", "Phrase", "S", "morph", "chunk"];
const PIECES: &[&str] = &[
    "aime",
    "croissant",
    "de",
    "pomme",
    "terre",
    "bouche",
    "h#",
    "a&b",
    "<x>",
    "\"q\"",
    "l'",
    "é",
    "日本",
    "x y",
    "tab\there",
    "two\nlines",
];

/// Knobs for [`document`].
#[derive(Debug, Clone, Copy)]
pub struct DocShape {
    pub max_roots: usize,
    pub max_children: usize,
    pub max_depth: usize,
    pub max_items: usize,
}

impl Default for DocShape {
    fn default() -> Self {
        DocShape {
            max_roots: 4,
            max_children: 3,
            max_depth: 3,
            max_items: 5,
        }
    }
}

fn text_value<R: Rng>(rng: &mut R) -> String {
    match rng.gen_range(0..8) {
        0 => String::new(),
        1 => POS.choose(rng).unwrap().to_string(),
        _ => {
            let n = rng.gen_range(1..=3);
            let words: Vec<&str> = (0..n).map(|_| *PIECES.choose(rng).unwrap()).collect();
            words.join(" ")
        }
    }
}

fn confidence<R: Rng>(rng: &mut R) -> String {
    match rng.gen_range(0..4) {
        0 => "1".into(),
        1 => "0".into(),
        _ => format!("0.{}", rng.gen_range(0..100)),
    }
}

struct DocGen<'a, R> {
    rng: &'a mut R,
    shape: DocShape,
    next_id: usize,
    ids: Vec<String>,
    tokens: usize,
    landmarks: usize,
}

impl<R: Rng> DocGen<'_, R> {
    fn fresh_id(&mut self) -> String {
        self.next_id += 1;
        let id = format!("n{}", self.next_id);
        self.ids.push(id.clone());
        id
    }

    fn some_id(&mut self) -> String {
        if self.ids.is_empty() || self.rng.gen_bool(0.3) {
            format!("ext{}", self.rng.gen_range(0..5))
        } else {
            self.ids.choose(self.rng).unwrap().clone()
        }
    }

    fn feature(&mut self, depth: usize) -> Feature {
        let cat = CATEGORIES.choose(self.rng).unwrap().to_string();
        match self.rng.gen_range(0..10) {
            0 if depth < 2 => {
                let n = self.rng.gen_range(1..=3);
                Feature::nested(cat, (0..n).map(|_| self.feature(depth + 1)).collect())
            }
            1 => {
                let id = self.some_id();
                Feature::target(cat, id)
            }
            _ => Feature::text(cat, text_value(self.rng)),
        }
    }

    fn seg(&mut self) -> SegmentRef {
        match self.rng.gen_range(0..3) {
            0 => {
                let n = self.rng.gen_range(1..=3).min(self.tokens);
                let mut ids: Vec<String> = (1..=self.tokens).map(|i| format!("w{i}")).collect();
                ids.shuffle(self.rng);
                ids.truncate(n);
                SegmentRef::IdTargets(ids)
            }
            1 => {
                let a = self.rng.gen_range(0..10_000u64);
                let b = self.rng.gen_range(0..10_000u64);
                SegmentRef::PositionalSpan {
                    start: a.min(b),
                    end: a.max(b),
                }
            }
            _ => {
                let a = self.rng.gen_range(0..self.landmarks);
                let b = self.rng.gen_range(0..self.landmarks);
                SegmentRef::LandmarkEndpoints {
                    start: a.min(b).to_string(),
                    end: a.max(b).to_string(),
                }
            }
        }
    }

    fn alt_set(&mut self, depth: usize) -> AltSet {
        let n = self.rng.gen_range(2..=3);
        let alternatives = (0..n)
            .map(|_| {
                let mut features: Vec<Feature> = (0..self.rng.gen_range(0..3)).map(|_| self.feature(1)).collect();
                if self.rng.gen_bool(0.7) {
                    features.push(Feature::text(CONFIDENCE, confidence(self.rng)));
                }
                let nodes = if depth < self.shape.max_depth && self.rng.gen_bool(0.15) {
                    vec![self.node(depth + 1)]
                } else {
                    Vec::new()
                };
                Alternative { features, nodes }
            })
            .collect();
        AltSet { alternatives }
    }

    fn items(&mut self, depth: usize, in_bracket: bool) -> Vec<NodeItem> {
        let n = self.rng.gen_range(0..=self.shape.max_items);
        let mut items = Vec::with_capacity(n);
        for _ in 0..n {
            let last_alt = matches!(items.last(), Some(NodeItem::AltSet(_)));
            let item = match self.rng.gen_range(0..12) {
                0..=4 => NodeItem::Feature(self.feature(0)),
                5 | 6 => NodeItem::Seg(self.seg()),
                7 if !last_alt => NodeItem::AltSet(self.alt_set(depth)),
                8 => {
                    let target = self.some_id();
                    let rel_type = self.rng.gen_bool(0.5).then(|| "head".to_string());
                    NodeItem::Relation(Relation { rel_type, target })
                }
                9 if !in_bracket => NodeItem::Bracket(Bracket {
                    members: self.items(depth, true),
                }),
                _ => NodeItem::Feature(Feature::text("pos", *POS.choose(self.rng).unwrap())),
            };
            items.push(item);
        }
        items
    }

    fn node(&mut self, depth: usize) -> StructNode {
        let mut node = StructNode {
            node_type: self
                .rng
                .gen_bool(0.9)
                .then(|| NODE_TYPES.choose(self.rng).unwrap().to_string()),
            ..Default::default()
        };
        if self.rng.gen_bool(0.5) {
            node.id = Some(self.fresh_id());
        }
        if self.rng.gen_bool(0.1) {
            node.ref_target = Some(self.some_id());
        }
        node.items = self.items(depth, false);
        if depth < self.shape.max_depth {
            let n = self.rng.gen_range(0..=self.shape.max_children);
            node.children = (0..n).map(|_| self.node(depth + 1)).collect();
        }
        node
    }
}

/// A structurally valid document exercising every item kind, with segments
/// over tokens `w1`..`w8` and landmarks `0`..`5`.
pub fn document<R: Rng>(rng: &mut R, shape: DocShape) -> GmtDocument {
    let mut g = DocGen {
        rng,
        shape,
        next_id: 0,
        ids: Vec::new(),
        tokens: 8,
        landmarks: 6,
    };
    let doc_type = ["MSAnnot", "morphAnnot", "syntax"].choose(g.rng).unwrap().to_string();
    let n = g.rng.gen_range(0..=shape.max_roots);
    let roots = (0..n).map(|_| g.node(0)).collect();
    GmtDocument { doc_type, roots }
}

/// A flat word-level layer: one node per anchor with lemma and pos.
pub fn word_layer<R: Rng>(rng: &mut R, doc_type: &str, words: usize) -> GmtDocument {
    let mut roots = Vec::new();
    for i in 1..=words {
        if rng.gen_bool(0.8) {
            roots.push(
                StructNode::new("W-level")
                    .with_seg(SegmentRef::single(format!("w{i}")))
                    .with_feature("lemma", PIECES.choose(rng).unwrap())
                    .with_feature("pos", POS.choose(rng).unwrap()),
            );
        }
    }
    GmtDocument {
        doc_type: doc_type.into(),
        roots,
    }
}

/// Copy of `doc` with a few random feature values changed and roots removed
/// or appended.
pub fn perturb<R: Rng>(rng: &mut R, doc: &GmtDocument) -> GmtDocument {
    fn edit<R: Rng>(rng: &mut R, node: &mut StructNode) {
        for item in &mut node.items {
            if let NodeItem::Feature(Feature {
                value: FeatureValue::Text(v),
                ..
            }) = item
            {
                if rng.gen_bool(0.2) {
                    *v = POS.choose(rng).unwrap().to_string();
                }
            }
        }
        node.children.iter_mut().for_each(|c| edit(rng, c));
    }
    let mut out = doc.clone();
    out.roots.iter_mut().for_each(|r| edit(rng, r));
    if !out.roots.is_empty() && rng.gen_bool(0.3) {
        let i = rng.gen_range(0..out.roots.len());
        out.roots.remove(i);
    }
    if rng.gen_bool(0.3) {
        out.roots.push(
            StructNode::new("W-level")
                .with_seg(SegmentRef::single(format!("w{}", rng.gen_range(1..=8))))
                .with_feature("pos", POS.choose(rng).unwrap()),
        );
    }
    out
}

/// A graph whose arcs never run backwards and whose nodes all lie on some
/// arc. Arc types are drawn from `types`.
pub fn graph<R: Rng>(rng: &mut R, types: &[&str]) -> AnnotationGraph {
    let mut g = AnnotationGraph::default();
    let n = rng.gen_range(0..12);
    let mut offset = 0u64;
    let ids: Vec<String> = (0..n).map(|i| format!("{}", i * 3 + rng.gen_range(0..3))).collect();
    for id in &ids {
        g.nodes.insert(id.clone(), offset);
        offset += rng.gen_range(0..2000);
    }
    if n == 0 {
        return g;
    }
    let arcs = rng.gen_range(1..=2 * n);
    let mut used = vec![false; n];
    let pick_arc = |rng: &mut R, used: &mut Vec<bool>, s: usize, t: usize| {
        let (s, t) = (s.min(t), s.max(t));
        used[s] = true;
        used[t] = true;
        let mut label = vec![(TYPE_ATTR.to_string(), types.choose(rng).unwrap().to_string())];
        if rng.gen_bool(0.9) {
            label.push((VALUE_ATTR.to_string(), PIECES.choose(rng).unwrap().to_string()));
        }
        if rng.gen_bool(0.2) {
            label.push(("att_3".to_string(), POS.choose(rng).unwrap().to_string()));
        }
        GraphArc {
            source: ids[s].clone(),
            target: ids[t].clone(),
            label,
        }
    };
    for _ in 0..arcs {
        let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let arc = pick_arc(rng, &mut used, s, t);
        g.arcs.push(arc);
    }
    for i in 0..n {
        if !used[i] {
            let j = rng.gen_range(0..n);
            let arc = pick_arc(rng, &mut used, i, j);
            g.arcs.push(arc);
        }
    }
    g
}

/// A random token index together with a landmark table.
pub fn context<R: Rng>(rng: &mut R, tokens: usize, landmarks: usize) -> (TokenIndex, LandmarkTable) {
    let entries = (1..=tokens)
        .map(|i| {
            let start = rng.gen_range(0..500u64);
            TokenEntry {
                id: format!("w{i}"),
                start,
                end: start + rng.gen_range(0..20),
            }
        })
        .collect();
    let index = TokenIndex::new(entries).expect("ids are distinct");
    let mut offsets: Vec<u64> = (0..landmarks).map(|_| rng.gen_range(0..1000)).collect();
    offsets.sort_unstable();
    let table = offsets
        .into_iter()
        .enumerate()
        .map(|(i, o)| (i.to_string(), o))
        .collect();
    (index, table)
}

/// A tree whose segments all resolve against a [`context`] of the same
/// sizes. Landmark pairs are ordered so they never invert.
pub fn anchored_tree<R: Rng>(rng: &mut R, tokens: usize, landmarks: usize, depth: usize) -> StructNode {
    let mut node = StructNode::new(*NODE_TYPES.choose(rng).unwrap());
    for _ in 0..rng.gen_range(0..3) {
        let seg = match rng.gen_range(0..3) {
            0 => {
                let n = rng.gen_range(1..=3).min(tokens);
                let mut ids: Vec<String> = (1..=tokens).map(|i| format!("w{i}")).collect();
                ids.shuffle(rng);
                ids.truncate(n);
                SegmentRef::IdTargets(ids)
            }
            1 => {
                let a = rng.gen_range(0..1000u64);
                SegmentRef::PositionalSpan {
                    start: a,
                    end: a + rng.gen_range(0..100),
                }
            }
            _ => {
                let a = rng.gen_range(0..landmarks);
                let b = rng.gen_range(a..landmarks);
                SegmentRef::LandmarkEndpoints {
                    start: a.to_string(),
                    end: b.to_string(),
                }
            }
        };
        node.items.push(NodeItem::Seg(seg));
    }
    if depth > 0 {
        for _ in 0..rng.gen_range(0..4) {
            node.children.push(anchored_tree(rng, tokens, landmarks, depth - 1));
        }
    }
    node
}

/// Registry text for up to `max` categories together with the parent of
/// each category. Lines are shuffled so parents may be declared after
/// their children.
pub fn registry<R: Rng>(rng: &mut R, max: usize) -> (String, BTreeMap<String, Option<String>>) {
    let n = rng.gen_range(1..=max);
    let mut parents = BTreeMap::new();
    let mut lines = Vec::new();
    for i in 0..n {
        let name = format!("c{i}");
        let parent = (i > 0 && rng.gen_bool(0.7)).then(|| format!("c{}", rng.gen_range(0..i)));
        let mut line = name.clone();
        if let Some(p) = &parent {
            line.push_str(&format!(" parent={p}"));
        }
        if parent.is_none() || rng.gen_bool(0.3) {
            line.push_str(match rng.gen_range(0..4) {
                0 => " kind=open",
                1 => " kind=set:a,b,c",
                2 => " kind=range:0..10",
                _ => " kind=ref",
            });
        }
        if rng.gen_bool(0.2) {
            line.push_str(&format!(" alias=a{i}"));
        }
        lines.push(line);
        parents.insert(name, parent);
    }
    lines.shuffle(rng);
    (lines.join("\n") + "\n", parents)
}

/// Registry text containing a parent cycle among up to `max` categories.
pub fn cyclic_registry<R: Rng>(rng: &mut R, max: usize) -> String {
    let n = rng.gen_range(1..=max);
    let cycle = rng.gen_range(1..=n);
    let mut lines: Vec<String> = (0..n)
        .map(|i| {
            if i < cycle {
                format!("c{i} parent=c{}", (i + 1) % cycle)
            } else {
                format!("c{i} parent=c{} kind=open", rng.gen_range(0..i))
            }
        })
        .collect();
    lines.shuffle(rng);
    lines.join("\n") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::Registry;
    use crate::validate::validate_structure;

    #[test]
    fn generated_documents_are_valid() {
        let mut r = rng(7);
        for _ in 0..200 {
            let d = document(&mut r, DocShape::default());
            let report = validate_structure(&d);
            assert!(report.is_empty(), "{}", report.render());
        }
    }

    #[test]
    fn generated_graphs_check() {
        let mut r = rng(8);
        for _ in 0..100 {
            graph(&mut r, &["P", "W"]).check().unwrap();
        }
    }

    #[test]
    fn registries_load_or_reject() {
        let mut r = rng(9);
        for _ in 0..100 {
            let (text, parents) = registry(&mut r, 20);
            assert_eq!(Registry::parse(&text).unwrap().len(), parents.len());
            assert!(Registry::parse(&cyclic_registry(&mut r, 20)).is_err());
        }
    }
}
