//! Merging and comparing annotation layers.
//!
//! Nodes from different layers are aligned on their anchor key, the
//! canonical text of their segment addressing:
//!
//! * id targets: sorted and space-joined (`w3.2 w4`);
//! * positional span: `start-end`;
//! * landmark endpoints: `startId-endId`.
//!
//! The n-th node with a given key in one sibling list pairs with the n-th
//! node with that key in every other list. Nodes without segments are
//! containers; they pair on their type plus the keys of their children.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use rust_decimal::Decimal;
use thiserror::Error;

use crate::exec::Exec;
use crate::model::{
    AddressingMode, AltSet, Alternative, Bracket, Feature, FeatureValue, GmtDocument, NodeItem, SegmentRef, StructNode,
    CONFIDENCE,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("nothing to merge")]
    NoDocuments,
    #[error("document types differ: {first:?} and {other:?}")]
    MixedDocTypes { first: String, other: String },
    #[error("anchor key {key:?} is used with different addressing modes")]
    MixedAddressing { key: String },
    #[error("confidence fill {0} is outside 0..1")]
    BadFill(Decimal),
}

/// How same-anchor nodes from different inputs are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParallelPolicy {
    /// Every node is kept, roots in input order.
    #[default]
    KeepAll,
    /// Structurally equal nodes collapse to one.
    DedupIdentical,
    /// Distinct feature bundles become alternatives of a single node.
    FoldToAlt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MergePolicy {
    pub on_parallel: ParallelPolicy,
    /// Confidence given to folded bundles that carry none.
    pub alt_confidence_fill: Decimal,
}

impl MergePolicy {
    pub fn new(on_parallel: ParallelPolicy, alt_confidence_fill: Decimal) -> Result<Self, MergeError> {
        if alt_confidence_fill < Decimal::ZERO || alt_confidence_fill > Decimal::ONE {
            return Err(MergeError::BadFill(alt_confidence_fill));
        }
        Ok(MergePolicy {
            on_parallel,
            alt_confidence_fill,
        })
    }

    pub fn of(on_parallel: ParallelPolicy) -> Self {
        MergePolicy {
            on_parallel,
            alt_confidence_fill: Decimal::ZERO,
        }
    }
}

fn seg_key(seg: &SegmentRef) -> String {
    match seg {
        SegmentRef::IdTargets(ids) => {
            let mut ids: Vec<&str> = ids.iter().map(String::as_str).collect();
            ids.sort_unstable();
            ids.join(" ")
        }
        SegmentRef::PositionalSpan { start, end } => format!("{start}-{end}"),
        SegmentRef::LandmarkEndpoints { start, end } => format!("{start}-{end}"),
    }
}

/// Anchor key of a node, or `None` when it has no segment. Several segments
/// are joined with `|`.
pub fn anchor_key(node: &StructNode) -> Option<String> {
    let segs = node.segs();
    if segs.is_empty() {
        return None;
    }
    Some(segs.iter().map(|s| seg_key(s)).collect::<Vec<_>>().join("|"))
}

fn modes(node: &StructNode) -> Vec<AddressingMode> {
    node.segs().iter().map(|s| s.mode()).collect()
}

fn container_key(node: &StructNode) -> String {
    let mut keys: Vec<String> = node
        .children
        .iter()
        .map(|c| anchor_key(c).unwrap_or_else(|| format!("{{{}}}", container_key(c))))
        .collect();
    keys.sort_unstable();
    format!("{}:{}", node.node_type.as_deref().unwrap_or(""), keys.join(","))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum GroupKey {
    Anchored(String, usize),
    Container(String, usize),
}

fn check_addressing(docs: &[GmtDocument]) -> Result<(), MergeError> {
    let mut seen: HashMap<String, Vec<AddressingMode>> = HashMap::new();
    for doc in docs {
        for (_, node) in doc.walk() {
            if let Some(key) = anchor_key(node) {
                let m = modes(node);
                match seen.get(&key) {
                    Some(prev) if *prev != m => return Err(MergeError::MixedAddressing { key }),
                    Some(_) => {}
                    None => {
                        seen.insert(key, m);
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeOutcome {
    pub doc: GmtDocument,
    pub warnings: Vec<String>,
}

pub fn merge(docs: &[GmtDocument], policy: MergePolicy) -> Result<MergeOutcome, MergeError> {
    merge_with(docs, policy, Exec::default())
}

/// Merges layers that share a document type. Top-level groups are
/// processed independently under `exec`; output order is fixed by first
/// appearance.
pub fn merge_with(docs: &[GmtDocument], policy: MergePolicy, exec: Exec) -> Result<MergeOutcome, MergeError> {
    let first = docs.first().ok_or(MergeError::NoDocuments)?;
    if let Some(other) = docs.iter().find(|d| d.doc_type != first.doc_type) {
        return Err(MergeError::MixedDocTypes {
            first: first.doc_type.clone(),
            other: other.doc_type.clone(),
        });
    }
    check_addressing(docs)?;

    let mut warnings = Vec::new();
    let roots = match policy.on_parallel {
        ParallelPolicy::KeepAll => docs.iter().flat_map(|d| d.roots.iter().cloned()).collect(),
        _ => {
            let lists: Vec<&[StructNode]> = docs.iter().map(|d| d.roots.as_slice()).collect();
            let groups = group_siblings(&lists);
            let merged = exec.map(&groups, |(_, members)| {
                let mut w = Vec::new();
                let nodes = merge_group(members, &policy, &mut w);
                (nodes, w)
            });
            let mut roots = Vec::new();
            for (nodes, w) in merged {
                roots.extend(nodes);
                warnings.extend(w);
            }
            roots
        }
    };
    let mut doc = GmtDocument {
        doc_type: first.doc_type.clone(),
        roots,
    };
    rename_duplicate_ids(&mut doc, &mut warnings);
    Ok(MergeOutcome { doc, warnings })
}

fn group_siblings<'a>(lists: &[&'a [StructNode]]) -> Vec<(GroupKey, Vec<&'a StructNode>)> {
    let mut groups: Vec<(GroupKey, Vec<&'a StructNode>)> = Vec::new();
    let mut slot: HashMap<GroupKey, usize> = HashMap::new();
    for list in lists {
        let mut occurrences: HashMap<(bool, String), usize> = HashMap::new();
        for node in list.iter() {
            let (anchored, key) = match anchor_key(node) {
                Some(k) => (true, k),
                None => (false, container_key(node)),
            };
            let n = occurrences.entry((anchored, key.clone())).or_insert(0);
            *n += 1;
            let gk = if anchored {
                GroupKey::Anchored(key, *n)
            } else {
                GroupKey::Container(key, *n)
            };
            match slot.get(&gk) {
                Some(&i) => groups[i].1.push(node),
                None => {
                    slot.insert(gk.clone(), groups.len());
                    groups.push((gk, vec![node]));
                }
            }
        }
    }
    groups
}

fn distinct<'a>(members: &[&'a StructNode]) -> Vec<&'a StructNode> {
    let mut out: Vec<&StructNode> = Vec::new();
    for m in members {
        if !out.contains(m) {
            out.push(m);
        }
    }
    out
}

fn merge_children(members: &[&StructNode], policy: &MergePolicy, warnings: &mut Vec<String>) -> Vec<StructNode> {
    let lists: Vec<&[StructNode]> = members.iter().map(|m| m.children.as_slice()).collect();
    group_siblings(&lists)
        .iter()
        .flat_map(|(_, g)| merge_group(g, policy, warnings))
        .collect()
}

fn merge_group(members: &[&StructNode], policy: &MergePolicy, warnings: &mut Vec<String>) -> Vec<StructNode> {
    let unique = distinct(members);
    if unique.len() == 1 {
        return vec![unique[0].clone()];
    }
    if anchor_key(unique[0]).is_none() {
        let head = unique[0];
        let same_shell = unique.iter().all(|m| {
            m.id == head.id && m.node_type == head.node_type && m.ref_target == head.ref_target && m.items == head.items
        });
        if !same_shell {
            warnings.push(format!(
                "{} unanchored {} nodes could not be aligned; kept side by side",
                unique.len(),
                head.node_type.as_deref().unwrap_or("untyped")
            ));
            return unique.into_iter().cloned().collect();
        }
        let mut node = StructNode {
            children: Vec::new(),
            ..head.clone()
        };
        node.children = merge_children(&unique, policy, warnings);
        return vec![node];
    }
    match policy.on_parallel {
        ParallelPolicy::FoldToAlt => vec![fold(&unique, policy, warnings)],
        _ => unique.into_iter().cloned().collect(),
    }
}

fn bundles_of(node: &StructNode) -> Vec<Alternative> {
    let plain: Vec<Feature> = node
        .items
        .iter()
        .filter_map(|i| match i {
            NodeItem::Feature(f) => Some(f.clone()),
            _ => None,
        })
        .collect();
    let mut out: Vec<Alternative> = node
        .items
        .iter()
        .filter_map(|i| match i {
            NodeItem::AltSet(s) => Some(s.alternatives.iter().cloned()),
            _ => None,
        })
        .flatten()
        .collect();
    if out.is_empty() || !plain.is_empty() {
        out.insert(
            0,
            Alternative {
                features: plain,
                nodes: Vec::new(),
            },
        );
    }
    out
}

/// Items that are neither features, alternatives nor segments.
fn other_items(node: &StructNode) -> Vec<NodeItem> {
    node.items
        .iter()
        .filter(|i| matches!(i, NodeItem::Relation(_) | NodeItem::Bracket(_)))
        .cloned()
        .collect()
}

fn fold(members: &[&StructNode], policy: &MergePolicy, warnings: &mut Vec<String>) -> StructNode {
    let head = members[0];
    let mut bundles: Vec<Alternative> = Vec::new();
    for m in members {
        for mut b in bundles_of(m) {
            if !b.features.iter().any(|f| f.cat_type == CONFIDENCE) {
                b.features.push(Feature::text(
                    CONFIDENCE,
                    policy.alt_confidence_fill.normalize().to_string(),
                ));
            }
            if !bundles.contains(&b) {
                bundles.push(b);
            }
        }
    }
    let mut items: Vec<NodeItem> = head
        .items
        .iter()
        .filter(|i| matches!(i, NodeItem::Seg(_)))
        .cloned()
        .collect();
    if bundles.len() == 1 {
        let only = bundles.pop().expect("one bundle");
        items.extend(only.features.into_iter().map(NodeItem::Feature));
    } else {
        items.push(NodeItem::AltSet(AltSet { alternatives: bundles }));
    }
    let others: Vec<Vec<NodeItem>> = members.iter().map(|m| other_items(m)).collect();
    if others.iter().all(|o| *o == others[0]) {
        items.extend(others[0].iter().cloned());
    } else {
        items.extend(
            others
                .into_iter()
                .filter(|o| !o.is_empty())
                .map(|members| NodeItem::Bracket(Bracket { members })),
        );
    }
    let dropped: Vec<&str> = members[1..]
        .iter()
        .filter_map(|m| m.id.as_deref())
        .filter(|id| head.id.as_deref() != Some(*id))
        .collect();
    if !dropped.is_empty() {
        warnings.push(format!(
            "ids {} folded into {}",
            dropped.join(", "),
            head.id.as_deref().unwrap_or("an unnamed node")
        ));
    }
    StructNode {
        id: head.id.clone(),
        node_type: head.node_type.clone(),
        ref_target: head.ref_target.clone(),
        items,
        children: merge_children(members, policy, warnings),
    }
}

fn rename_duplicate_ids(doc: &mut GmtDocument, warnings: &mut Vec<String>) {
    fn item_nodes_mut<'a>(items: &'a mut [NodeItem], out: &mut Vec<&'a mut StructNode>) {
        for item in items {
            match item {
                NodeItem::AltSet(s) => out.extend(s.alternatives.iter_mut().flat_map(|a| &mut a.nodes)),
                NodeItem::Bracket(b) => item_nodes_mut(&mut b.members, out),
                _ => {}
            }
        }
    }
    fn visit(
        node: &mut StructNode,
        seen: &mut HashSet<String>,
        taken: &mut HashSet<String>,
        warnings: &mut Vec<String>,
    ) {
        if let Some(id) = node.id.clone() {
            if !seen.insert(id.clone()) {
                let fresh = (2..)
                    .map(|n| format!("{id}~{n}"))
                    .find(|c| !taken.contains(c))
                    .expect("unbounded");
                taken.insert(fresh.clone());
                seen.insert(fresh.clone());
                warnings.push(format!("duplicate id {id} renamed to {fresh}"));
                node.id = Some(fresh);
            }
        }
        let mut nested = Vec::new();
        item_nodes_mut(&mut node.items, &mut nested);
        for n in nested {
            visit(n, seen, taken, warnings);
        }
        for c in &mut node.children {
            visit(c, seen, taken, warnings);
        }
    }
    let mut taken: HashSet<String> = doc.walk().into_iter().filter_map(|(_, n)| n.id.clone()).collect();
    let mut seen = HashSet::new();
    for r in &mut doc.roots {
        visit(r, &mut seen, &mut taken, warnings);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiffStatus {
    OnlyLeft,
    OnlyRight,
    BothEqual,
    BothDiffer,
}

impl DiffStatus {
    pub fn mirrored(self) -> Self {
        match self {
            DiffStatus::OnlyLeft => DiffStatus::OnlyRight,
            DiffStatus::OnlyRight => DiffStatus::OnlyLeft,
            s => s,
        }
    }
}

impl fmt::Display for DiffStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiffStatus::OnlyLeft => "onlyLeft",
            DiffStatus::OnlyRight => "onlyRight",
            DiffStatus::BothEqual => "bothEqual",
            DiffStatus::BothDiffer => "bothDiffer",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffEntry {
    /// Anchor key, suffixed `@n` for the n-th repeat (n ≥ 2) within a document.
    pub anchor_key: String,
    pub status: DiffStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiffReport {
    pub entries: Vec<DiffEntry>,
}

impl DiffReport {
    pub fn all_equal(&self) -> bool {
        self.entries.iter().all(|e| e.status == DiffStatus::BothEqual)
    }

    /// `STATUS<TAB>anchorKey<TAB>detail`, one line per entry.
    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("{}\t{}\t{}\n", e.status, e.anchor_key, e.detail))
            .collect()
    }
}

type Bag = BTreeMap<(String, String), usize>;

fn value_text(f: &Feature) -> String {
    match &f.value {
        FeatureValue::Text(s) => s.clone(),
        FeatureValue::Target(t) => format!("#{t}"),
        FeatureValue::Nested(inner) => format!("[{} nested]", inner.len()),
    }
}

/// Features of the node plus those of descendants that have no segment of
/// their own, with the node type as a pseudo-feature.
fn content_bag(node: &StructNode) -> Bag {
    fn add(node: &StructNode, bag: &mut Bag) {
        for f in node.all_features() {
            *bag.entry((f.cat_type.clone(), value_text(f))).or_insert(0) += 1;
        }
        for c in node.children.iter().filter(|c| anchor_key(c).is_none()) {
            add(c, bag);
        }
    }
    let mut bag = Bag::new();
    if let Some(t) = &node.node_type {
        bag.insert(("nodeType".into(), t.clone()), 1);
    }
    add(node, &mut bag);
    bag
}

fn anchored_nodes(doc: &GmtDocument) -> BTreeMap<(String, usize), &StructNode> {
    let mut out = BTreeMap::new();
    let mut counts: HashMap<String, usize> = HashMap::new();
    for (_, node) in doc.walk() {
        if let Some(key) = anchor_key(node) {
            let n = counts.entry(key.clone()).or_insert(0);
            *n += 1;
            out.insert((key, *n), node);
        }
    }
    out
}

fn bag_detail(left: &Bag, right: &Bag) -> String {
    let mut per_cat: BTreeMap<&str, (Vec<&str>, Vec<&str>)> = BTreeMap::new();
    let keys: std::collections::BTreeSet<&(String, String)> = left.keys().chain(right.keys()).collect();
    for k in keys {
        let (l, r) = (left.get(k).copied().unwrap_or(0), right.get(k).copied().unwrap_or(0));
        let entry = per_cat.entry(k.0.as_str()).or_default();
        for _ in r..l {
            entry.0.push(&k.1);
        }
        for _ in l..r {
            entry.1.push(&k.1);
        }
    }
    per_cat
        .into_iter()
        .filter(|(_, (rm, add))| !rm.is_empty() || !add.is_empty())
        .map(|(cat, (rm, add))| {
            let mut parts = vec![format!("{cat}:")];
            parts.extend(rm.iter().map(|v| format!("-{v}")));
            parts.extend(add.iter().map(|v| format!("+{v}")));
            parts.join(" ")
        })
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn diff(left: &GmtDocument, right: &GmtDocument) -> DiffReport {
    diff_with(left, right, Exec::default())
}

/// Aligns every anchored node of both documents by anchor key and compares
/// their feature multisets. Entries are sorted by anchor key.
pub fn diff_with(left: &GmtDocument, right: &GmtDocument, exec: Exec) -> DiffReport {
    let l = anchored_nodes(left);
    let r = anchored_nodes(right);
    let keys: Vec<&(String, usize)> = l
        .keys()
        .chain(r.keys())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let entries = exec.map(&keys, |key| {
        let anchor_key = if key.1 == 1 {
            key.0.clone()
        } else {
            format!("{}@{}", key.0, key.1)
        };
        let (status, detail) = match (l.get(*key), r.get(*key)) {
            (Some(a), Some(b)) => {
                let (ba, bb) = (content_bag(a), content_bag(b));
                if ba == bb {
                    (DiffStatus::BothEqual, String::new())
                } else {
                    (DiffStatus::BothDiffer, bag_detail(&ba, &bb))
                }
            }
            (Some(a), None) => (DiffStatus::OnlyLeft, format!("{} features", a.all_features().len())),
            (None, Some(b)) => (DiffStatus::OnlyRight, format!("{} features", b.all_features().len())),
            (None, None) => unreachable!("key comes from one side"),
        };
        DiffEntry {
            anchor_key,
            status,
            detail,
        }
    });
    DiffReport { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::select_preferred_alternative;
    use crate::validate::validate_structure;

    fn word(seg: &str, lemma: &str, pos: &str) -> StructNode {
        StructNode::new("W-level")
            .with_seg(SegmentRef::single(seg))
            .with_feature("lemma", lemma)
            .with_feature("pos", pos)
    }

    fn doc(nodes: Vec<StructNode>) -> GmtDocument {
        GmtDocument {
            doc_type: "MSAnnot".into(),
            roots: nodes,
        }
    }

    #[test]
    fn anchor_keys() {
        let n = StructNode::new("x").with_seg(SegmentRef::IdTargets(vec!["w4".into(), "w3.2".into()]));
        assert_eq!(anchor_key(&n).as_deref(), Some("w3.2 w4"));
        let n = StructNode::new("x").with_seg(SegmentRef::PositionalSpan { start: 2300, end: 3200 });
        assert_eq!(anchor_key(&n).as_deref(), Some("2300-3200"));
        let n = StructNode::new("x").with_seg(SegmentRef::LandmarkEndpoints {
            start: "0".into(),
            end: "1".into(),
        });
        assert_eq!(anchor_key(&n).as_deref(), Some("0-1"));
        assert_eq!(anchor_key(&StructNode::new("x")), None);
    }

    #[test]
    fn fold_to_alt_builds_bouche_shape() {
        let verb = doc(vec![word("w1", "boucher", "VERB").with_feature("confidence", "0.4")]);
        let noun = doc(vec![word("w1", "bouche", "NOUN").with_feature("confidence", "0.6")]);
        let out = merge(&[verb, noun], MergePolicy::of(ParallelPolicy::FoldToAlt)).unwrap();
        assert!(out.warnings.is_empty());
        assert_eq!(out.doc.roots.len(), 1);
        let node = &out.doc.roots[0];
        assert_eq!(node.items[0], NodeItem::Seg(SegmentRef::single("w1")));
        let NodeItem::AltSet(set) = &node.items[1] else {
            panic!("{node:?}")
        };
        assert_eq!(set.alternatives.len(), 2);
        let best = select_preferred_alternative(set).unwrap();
        assert_eq!(best.features[1].as_text(), Some("NOUN"));
        assert!(validate_structure(&out.doc).is_empty());
    }

    #[test]
    fn fold_fills_missing_confidence() {
        let a = doc(vec![word("w1", "a", "VERB")]);
        let b = doc(vec![word("w1", "b", "NOUN")]);
        let policy = MergePolicy::new(ParallelPolicy::FoldToAlt, Decimal::new(25, 2)).unwrap();
        let out = merge(&[a, b], policy).unwrap();
        let NodeItem::AltSet(set) = &out.doc.roots[0].items[1] else {
            panic!()
        };
        for alt in &set.alternatives {
            assert_eq!(alt.features.last(), Some(&Feature::text("confidence", "0.25")));
        }
        assert!(MergePolicy::new(ParallelPolicy::FoldToAlt, Decimal::TWO).is_err());
    }

    #[test]
    fn dedup_is_idempotent_even_with_repeated_keys() {
        let d = doc(vec![
            word("w1", "a", "NOUN"),
            word("w2", "b", "VERB"),
            word("w1", "a", "NOUN"),
            StructNode::new("S").with_child(word("w3", "c", "DET")),
        ]);
        for policy in [ParallelPolicy::DedupIdentical, ParallelPolicy::FoldToAlt] {
            let out = merge(&[d.clone(), d.clone()], MergePolicy::of(policy)).unwrap();
            assert_eq!(out.doc, d, "{policy:?}");
        }
    }

    #[test]
    fn keep_all_concatenates_and_renames_ids() {
        let d = doc(vec![word("w1", "a", "NOUN").with_id("n1")]);
        let out = merge(&[d.clone(), d.clone()], MergePolicy::of(ParallelPolicy::KeepAll)).unwrap();
        assert_eq!(out.doc.roots.len(), 2);
        assert_eq!(out.doc.roots[1].id.as_deref(), Some("n1~2"));
        assert_eq!(out.warnings.len(), 1);
        assert!(validate_structure(&out.doc).is_empty());
    }

    #[test]
    fn merge_errors() {
        assert_eq!(merge(&[], MergePolicy::default()), Err(MergeError::NoDocuments));
        let a = doc(vec![]);
        let b = GmtDocument::new("other");
        assert!(matches!(
            merge(&[a, b], MergePolicy::default()),
            Err(MergeError::MixedDocTypes { .. })
        ));
        let pos = doc(vec![
            StructNode::new("x").with_seg(SegmentRef::PositionalSpan { start: 0, end: 1 })
        ]);
        let lm = doc(vec![StructNode::new("x").with_seg(SegmentRef::LandmarkEndpoints {
            start: "0".into(),
            end: "1".into(),
        })]);
        assert_eq!(
            merge(&[pos, lm], MergePolicy::default()),
            Err(MergeError::MixedAddressing { key: "0-1".into() })
        );
    }

    #[test]
    fn containers_merge_recursively() {
        let a = doc(vec![StructNode::new("MSAnnot").with_child(word("w1", "a", "NOUN"))]);
        let b = doc(vec![StructNode::new("MSAnnot").with_child(word("w1", "a", "NOUN"))]);
        let out = merge(&[a.clone(), b], MergePolicy::of(ParallelPolicy::DedupIdentical)).unwrap();
        assert_eq!(out.doc, a);
    }

    #[test]
    fn diff_single_edit() {
        let left = doc(vec![word("w1", "a", "NOUN"), word("w2", "b", "VERB")]);
        let mut right = left.clone();
        right.roots[1] = word("w2", "b", "NOUN");
        let report = diff(&left, &right);
        assert_eq!(report.render(), "bothEqual\tw1\t\nbothDiffer\tw2\tpos: -VERB +NOUN\n");
        let mirror = diff(&right, &left);
        assert_eq!(mirror.entries[1].detail, "pos: -NOUN +VERB");
    }

    #[test]
    fn diff_against_empty() {
        let left = doc(vec![word("w1", "a", "NOUN"), word("w1", "b", "VERB")]);
        let report = diff(&left, &doc(vec![]));
        let keys: Vec<_> = report
            .entries
            .iter()
            .map(|e| (e.status, e.anchor_key.as_str()))
            .collect();
        assert_eq!(keys, [(DiffStatus::OnlyLeft, "w1"), (DiffStatus::OnlyLeft, "w1@2")]);
        assert!(!report.all_equal());
        assert!(diff(&left, &left).all_equal());
    }
}
