//! In-memory model of a GMT stand-off annotation layer.
//!
//! A [`GmtDocument`] is a forest of [`StructNode`]s. Each node carries an
//! ordered list of [`NodeItem`]s (features, alternative sets, relations,
//! segment references and brackets) followed by its child nodes.
//!
//! Values are plain data: construct them directly, then run
//! [`validate_structure`](crate::validate::validate_structure) before
//! serializing.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::str::FromStr;

use rust_decimal::Decimal;

/// Category name of the feature that weights an alternative bundle.
pub const CONFIDENCE: &str = "confidence";

/// One stand-off annotation layer.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GmtDocument {
    pub doc_type: String,
    pub roots: Vec<StructNode>,
}

/// A `<struct>` element: a structural node of the annotation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StructNode {
    pub id: Option<String>,
    pub node_type: Option<String>,
    /// The node this one stands for (`ref` attribute). Stored, never resolved here.
    pub ref_target: Option<String>,
    pub items: Vec<NodeItem>,
    pub children: Vec<StructNode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeItem {
    Feature(Feature),
    AltSet(AltSet),
    Relation(Relation),
    Seg(SegmentRef),
    Bracket(Bracket),
}

/// A `<feat>` element: one information unit attached to a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feature {
    pub cat_type: String,
    pub value: FeatureValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeatureValue {
    Text(String),
    Nested(Vec<Feature>),
    /// Value provided by an object elsewhere, addressed by identifier.
    Target(String),
}

/// Mutually exclusive readings of one node, one `<alt>` element each.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AltSet {
    pub alternatives: Vec<Alternative>,
}

/// Content of one `<alt>`. Only `features` take part in preference
/// selection; `nodes` holds structural alternatives carried through as-is.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Alternative {
    pub features: Vec<Feature>,
    pub nodes: Vec<StructNode>,
}

/// Directed link from the enclosing node to another node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub rel_type: Option<String>,
    pub target: String,
}

/// A `<seg>`: what part of the primary data (or another layer) a node covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentRef {
    IdTargets(Vec<String>),
    PositionalSpan { start: u64, end: u64 },
    LandmarkEndpoints { start: String, end: String },
}

/// Items grouped as a unit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bracket {
    pub members: Vec<NodeItem>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AddressingMode {
    Ids,
    Positional,
    Landmarks,
}

impl SegmentRef {
    pub fn mode(&self) -> AddressingMode {
        match self {
            SegmentRef::IdTargets(_) => AddressingMode::Ids,
            SegmentRef::PositionalSpan { .. } => AddressingMode::Positional,
            SegmentRef::LandmarkEndpoints { .. } => AddressingMode::Landmarks,
        }
    }

    pub fn single(id: impl Into<String>) -> Self {
        SegmentRef::IdTargets(vec![id.into()])
    }
}

impl Feature {
    pub fn text(cat_type: impl Into<String>, value: impl Into<String>) -> Self {
        Feature {
            cat_type: cat_type.into(),
            value: FeatureValue::Text(value.into()),
        }
    }

    pub fn nested(cat_type: impl Into<String>, features: Vec<Feature>) -> Self {
        Feature {
            cat_type: cat_type.into(),
            value: FeatureValue::Nested(features),
        }
    }

    pub fn target(cat_type: impl Into<String>, id: impl Into<String>) -> Self {
        Feature {
            cat_type: cat_type.into(),
            value: FeatureValue::Target(id.into()),
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match &self.value {
            FeatureValue::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl StructNode {
    pub fn new(node_type: impl Into<String>) -> Self {
        StructNode {
            node_type: Some(node_type.into()),
            ..Default::default()
        }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn with_item(mut self, item: NodeItem) -> Self {
        self.items.push(item);
        self
    }

    pub fn with_feature(self, cat_type: &str, value: &str) -> Self {
        self.with_item(NodeItem::Feature(Feature::text(cat_type, value)))
    }

    pub fn with_seg(self, seg: SegmentRef) -> Self {
        self.with_item(NodeItem::Seg(seg))
    }

    pub fn with_child(mut self, child: StructNode) -> Self {
        self.children.push(child);
        self
    }

    /// Segment references directly on this node (brackets included).
    pub fn segs(&self) -> Vec<&SegmentRef> {
        let mut out = Vec::new();
        collect_segs(&self.items, &mut out);
        out
    }

    /// Top-level text value of the first feature of `cat_type`.
    pub fn feature_text(&self, cat_type: &str) -> Option<&str> {
        self.items.iter().find_map(|item| match item {
            NodeItem::Feature(f) if f.cat_type == cat_type => f.as_text(),
            _ => None,
        })
    }

    /// All features reachable from this node's items, including those inside
    /// nested values, alternatives and brackets. Child nodes are not visited.
    pub fn all_features(&self) -> Vec<&Feature> {
        let mut out = Vec::new();
        for item in &self.items {
            item_features(item, &mut out);
        }
        out
    }
}

fn collect_segs<'a>(items: &'a [NodeItem], out: &mut Vec<&'a SegmentRef>) {
    for item in items {
        match item {
            NodeItem::Seg(s) => out.push(s),
            NodeItem::Bracket(b) => collect_segs(&b.members, out),
            _ => {}
        }
    }
}

fn feature_and_nested<'a>(f: &'a Feature, out: &mut Vec<&'a Feature>) {
    out.push(f);
    if let FeatureValue::Nested(inner) = &f.value {
        for g in inner {
            feature_and_nested(g, out);
        }
    }
}

fn item_features<'a>(item: &'a NodeItem, out: &mut Vec<&'a Feature>) {
    match item {
        NodeItem::Feature(f) => feature_and_nested(f, out),
        NodeItem::AltSet(alts) => {
            for alt in &alts.alternatives {
                for f in &alt.features {
                    feature_and_nested(f, out);
                }
            }
        }
        NodeItem::Bracket(b) => {
            for m in &b.members {
                item_features(m, out);
            }
        }
        NodeItem::Relation(_) | NodeItem::Seg(_) => {}
    }
}

impl GmtDocument {
    pub fn new(doc_type: impl Into<String>) -> Self {
        GmtDocument {
            doc_type: doc_type.into(),
            roots: Vec::new(),
        }
    }

    pub fn with_root(mut self, root: StructNode) -> Self {
        self.roots.push(root);
        self
    }

    /// Preorder walk over every node, including nodes held inside
    /// alternatives, together with its path.
    pub fn walk(&self) -> Vec<(NodePath, &StructNode)> {
        let mut out = Vec::new();
        let mut path = NodePath::root();
        for (i, root) in self.roots.iter().enumerate() {
            path.push("struct", i + 1);
            walk_node(root, &mut path, &mut out);
            path.pop();
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.walk().len()
    }

    pub fn feature_count(&self) -> usize {
        self.walk().iter().map(|(_, n)| n.all_features().len()).sum()
    }
}

fn walk_node<'a>(node: &'a StructNode, path: &mut NodePath, out: &mut Vec<(NodePath, &'a StructNode)>) {
    out.push((path.clone(), node));
    let mut alt_no = 0;
    walk_items(&node.items, path, &mut alt_no, out);
    for (i, child) in node.children.iter().enumerate() {
        path.push("struct", i + 1);
        walk_node(child, path, out);
        path.pop();
    }
}

/// Nodes held in alternatives, numbered the way validation paths are.
fn walk_items<'a>(
    items: &'a [NodeItem],
    path: &mut NodePath,
    alt_no: &mut usize,
    out: &mut Vec<(NodePath, &'a StructNode)>,
) {
    let mut brack_no = 0;
    for item in items {
        match item {
            NodeItem::AltSet(set) => {
                for alt in &set.alternatives {
                    *alt_no += 1;
                    path.push("alt", *alt_no);
                    for (j, n) in alt.nodes.iter().enumerate() {
                        path.push("struct", j + 1);
                        walk_node(n, path, out);
                        path.pop();
                    }
                    path.pop();
                }
            }
            NodeItem::Bracket(b) => {
                brack_no += 1;
                path.push("brack", brack_no);
                walk_items(&b.members, path, alt_no, out);
                path.pop();
            }
            _ => {}
        }
    }
}

/// XPath-like location of a node, e.g. `/struct[1]/struct[2]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodePath(Vec<(&'static str, usize)>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn push(&mut self, step: &'static str, index: usize) {
        self.0.push((step, index));
    }

    pub fn pop(&mut self) {
        self.0.pop();
    }

    pub fn child(&self, step: &'static str, index: usize) -> NodePath {
        let mut p = self.clone();
        p.push(step, index);
        p
    }
}

impl std::fmt::Display for NodePath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for (step, i) in &self.0 {
            write!(f, "/{step}[{i}]")?;
        }
        Ok(())
    }
}

/// Returns the first node (preorder) carrying `id`.
pub fn find_node<'a>(doc: &'a GmtDocument, id: &str) -> Option<&'a StructNode> {
    fn go<'a>(node: &'a StructNode, id: &str) -> Option<&'a StructNode> {
        if node.id.as_deref() == Some(id) {
            return Some(node);
        }
        for item in &node.items {
            if let NodeItem::AltSet(set) = item {
                for n in set.alternatives.iter().flat_map(|a| &a.nodes) {
                    if let Some(hit) = go(n, id) {
                        return Some(hit);
                    }
                }
            }
        }
        node.children.iter().find_map(|c| go(c, id))
    }
    doc.roots.iter().find_map(|r| go(r, id))
}

/// Every identifier the document points at: segment targets, relation and
/// feature targets, `ref` attributes and landmark endpoints.
pub fn collect_referenced_ids(doc: &GmtDocument) -> BTreeSet<String> {
    let mut ids = BTreeSet::new();
    for (_, node) in doc.walk() {
        if let Some(r) = &node.ref_target {
            ids.insert(r.clone());
        }
        for item in &node.items {
            item_refs(item, &mut ids);
        }
    }
    ids
}

fn feature_refs(f: &Feature, ids: &mut BTreeSet<String>) {
    match &f.value {
        FeatureValue::Target(t) => {
            ids.insert(t.clone());
        }
        FeatureValue::Nested(inner) => inner.iter().for_each(|g| feature_refs(g, ids)),
        FeatureValue::Text(_) => {}
    }
}

fn item_refs(item: &NodeItem, ids: &mut BTreeSet<String>) {
    match item {
        NodeItem::Feature(f) => feature_refs(f, ids),
        NodeItem::AltSet(set) => {
            for alt in &set.alternatives {
                alt.features.iter().for_each(|f| feature_refs(f, ids));
            }
        }
        NodeItem::Relation(r) => {
            ids.insert(r.target.clone());
        }
        NodeItem::Seg(SegmentRef::IdTargets(t)) => ids.extend(t.iter().cloned()),
        NodeItem::Seg(SegmentRef::LandmarkEndpoints { start, end }) => {
            ids.insert(start.clone());
            ids.insert(end.clone());
        }
        NodeItem::Seg(SegmentRef::PositionalSpan { .. }) => {}
        NodeItem::Bracket(b) => b.members.iter().for_each(|m| item_refs(m, ids)),
    }
}

/// Parses a confidence-style decimal (`0.4`, `1`, `.25`). Exponents and
/// surrounding whitespace are rejected.
pub fn parse_decimal(s: &str) -> Option<Decimal> {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits_ok = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if (int.is_empty() && frac.is_empty()) || !digits_ok(int) || !digits_ok(frac) {
        return None;
    }
    Decimal::from_str(s).ok()
}

impl Alternative {
    /// Confidence of this bundle; absent or unparsable values count as zero.
    pub fn confidence(&self) -> Decimal {
        self.features
            .iter()
            .find(|f| f.cat_type == CONFIDENCE)
            .and_then(|f| f.as_text())
            .and_then(parse_decimal)
            .unwrap_or(Decimal::ZERO)
    }
}

/// Picks the bundle with the highest confidence; the earliest bundle wins ties.
///
/// Returns `None` only for an empty set, which validation rejects.
pub fn select_preferred_alternative(alts: &AltSet) -> Option<&Alternative> {
    let mut best: Option<(&Alternative, Decimal)> = None;
    for alt in &alts.alternatives {
        let c = alt.confidence();
        match &best {
            Some((_, b)) if c.cmp(b) != Ordering::Greater => {}
            _ => best = Some((alt, c)),
        }
    }
    best.map(|(a, _)| a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundle(pairs: &[(&str, &str)]) -> Alternative {
        Alternative {
            features: pairs.iter().map(|(k, v)| Feature::text(*k, *v)).collect(),
            nodes: vec![],
        }
    }

    #[test]
    fn bouche_prefers_noun() {
        let set = AltSet {
            alternatives: vec![
                bundle(&[
                    ("lemma", "boucher"),
                    ("pos", "VERB"),
                    ("tense", "present"),
                    ("confidence", "0.4"),
                ]),
                bundle(&[("lemma", "bouche"), ("pos", "NOUN"), ("confidence", "0.6")]),
            ],
        };
        let best = select_preferred_alternative(&set).unwrap();
        assert_eq!(best, &set.alternatives[1]);
    }

    #[test]
    fn ties_and_missing_confidence_take_first() {
        let tied = AltSet {
            alternatives: vec![
                bundle(&[("pos", "A"), ("confidence", "0.5")]),
                bundle(&[("pos", "B"), ("confidence", "0.50")]),
            ],
        };
        assert_eq!(
            select_preferred_alternative(&tied).unwrap().features[0].as_text(),
            Some("A")
        );
        let none = AltSet {
            alternatives: vec![bundle(&[("pos", "A")]), bundle(&[("pos", "B")])],
        };
        assert_eq!(
            select_preferred_alternative(&none).unwrap().features[0].as_text(),
            Some("A")
        );
    }

    #[test]
    fn decimal_compare_is_exact() {
        let a = parse_decimal("0.30000000000000001").unwrap();
        let b = parse_decimal("0.3").unwrap();
        assert!(a > b);
        assert!(parse_decimal("1e-3").is_none());
        assert!(parse_decimal(" 0.5").is_none());
        assert!(parse_decimal(".").is_none());
        assert_eq!(parse_decimal(".25"), parse_decimal("0.25"));
    }

    #[test]
    fn paths_render_one_based() {
        let p = NodePath::root().child("struct", 1).child("struct", 3);
        assert_eq!(p.to_string(), "/struct[1]/struct[3]");
        assert_eq!(NodePath::root().to_string(), "/");
    }

    #[test]
    fn referenced_ids_cover_every_pointer_kind() {
        let node = StructNode::new("x")
            .with_seg(SegmentRef::IdTargets(vec!["w3.2".into(), "w4".into()]))
            .with_item(NodeItem::Relation(Relation {
                rel_type: None,
                target: "h".into(),
            }))
            .with_item(NodeItem::Feature(Feature::target("lex", "e1")))
            .with_item(NodeItem::Bracket(Bracket {
                members: vec![NodeItem::Seg(SegmentRef::LandmarkEndpoints {
                    start: "0".into(),
                    end: "1".into(),
                })],
            }));
        let mut node = node;
        node.ref_target = Some("r".into());
        let doc = GmtDocument::new("x").with_root(node);
        let ids: Vec<_> = collect_referenced_ids(&doc).into_iter().collect();
        assert_eq!(ids, ["0", "1", "e1", "h", "r", "w3.2", "w4"]);
        assert!(collect_referenced_ids(&GmtDocument::new("x")).is_empty());
    }
}
