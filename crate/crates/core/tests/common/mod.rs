//! Reference implementations used to check the library. They take the
//! slow, obvious route on purpose and share no code with it.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use gmt_core::ag::AnnotationGraph;
use gmt_core::anchoring::{LandmarkTable, Span, TokenIndex};
use gmt_core::{NodeItem, SegmentRef, StructNode};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Token offsets for whitespace-separated words, counted in characters
/// with an exclusive end.
pub fn whitespace_offsets(text: &str) -> Vec<(u64, u64)> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        out.push((start as u64, i as u64));
    }
    out
}

/// Graph reduced to something order-free: the nodes that some arc touches,
/// and the sorted list of arcs.
pub type CanonicalGraph = (BTreeMap<String, u64>, Vec<(String, String, Vec<(String, String)>)>);

pub fn canonical_graph(g: &AnnotationGraph) -> CanonicalGraph {
    let mut nodes = BTreeMap::new();
    let mut arcs = Vec::new();
    for a in &g.arcs {
        nodes.insert(a.source.clone(), g.nodes[&a.source]);
        nodes.insert(a.target.clone(), g.nodes[&a.target]);
        arcs.push((a.source.clone(), a.target.clone(), a.label.clone()));
    }
    arcs.sort();
    (nodes, arcs)
}

/// Counts `name="value"` occurrences in raw text.
pub fn count_attr(text: &str, name: &str, value: &str) -> usize {
    text.matches(&format!("{name}=\"{value}\"")).count()
}

/// Distinct `offset="n"` values in raw AG text.
pub fn raw_offsets(text: &str) -> BTreeSet<u64> {
    text.split("offset=\"")
        .skip(1)
        .map(|rest| rest[..rest.find('"').unwrap()].parse().unwrap())
        .collect()
}

/// Number of `<feat` elements in serialized GMT.
pub fn count_feat_tags(xml: &str) -> usize {
    xml.matches("<feat ").count() + xml.matches("<feat>").count()
}

fn node_segs(node: &StructNode) -> Vec<&SegmentRef> {
    fn from_items<'a>(items: &'a [NodeItem], out: &mut Vec<&'a SegmentRef>) {
        for i in items {
            match i {
                NodeItem::Seg(s) => out.push(s),
                NodeItem::Bracket(b) => from_items(&b.members, out),
                _ => {}
            }
        }
    }
    let mut out = Vec::new();
    from_items(&node.items, &mut out);
    out
}

/// Covering span by exhaustive search: every descendant segment is turned
/// into offsets by scanning the token list, then min and max are taken.
pub fn brute_extent(node: &StructNode, tokens: &TokenIndex, landmarks: &LandmarkTable) -> Option<Span> {
    let mut starts = Vec::new();
    let mut ends = Vec::new();
    let mut stack = vec![node];
    while let Some(n) = stack.pop() {
        for seg in node_segs(n) {
            match seg {
                SegmentRef::IdTargets(ids) => {
                    for id in ids {
                        let e = tokens
                            .entries()
                            .iter()
                            .find(|e| &e.id == id)
                            .expect("generated ids exist");
                        starts.push(e.start);
                        ends.push(e.end);
                    }
                }
                SegmentRef::PositionalSpan { start, end } => {
                    starts.push(*start);
                    ends.push(*end);
                }
                SegmentRef::LandmarkEndpoints { start, end } => {
                    starts.push(landmarks.iter().find(|(k, _)| *k == start).map(|(_, v)| *v).unwrap());
                    ends.push(landmarks.iter().find(|(k, _)| *k == end).map(|(_, v)| *v).unwrap());
                }
            }
        }
        stack.extend(n.children.iter());
    }
    Some(Span::new(*starts.iter().min()?, *ends.iter().max()?))
}

/// Follows parent links from `child` and reports whether `ancestor` is met.
pub fn chain_contains(parents: &BTreeMap<String, Option<String>>, child: &str, ancestor: &str) -> bool {
    let mut cur = Some(child.to_string());
    let mut steps = 0;
    while let Some(c) = cur {
        if c == ancestor {
            return true;
        }
        steps += 1;
        assert!(steps <= parents.len() + 1, "oracle input has a cycle");
        cur = parents[&c].clone();
    }
    false
}

/// Nodes that carry a segment, counted over the whole tree including nodes
/// inside alternatives, bracketed or not.
pub fn anchored_node_count(roots: &[StructNode]) -> usize {
    let mut count = 0;
    let mut stack: Vec<&StructNode> = roots.iter().collect();
    while let Some(n) = stack.pop() {
        if !node_segs(n).is_empty() {
            count += 1;
        }
        stack.extend(n.children.iter());
        let mut items: Vec<&NodeItem> = n.items.iter().collect();
        while let Some(item) = items.pop() {
            match item {
                NodeItem::AltSet(s) => {
                    for a in &s.alternatives {
                        stack.extend(a.nodes.iter());
                    }
                }
                NodeItem::Bracket(b) => items.extend(b.members.iter()),
                _ => {}
            }
        }
    }
    count
}
