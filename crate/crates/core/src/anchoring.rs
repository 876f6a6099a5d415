//! Resolution of segment references to spans of primary data.
//!
//! Three mechanisms are supported:
//!
//! * temporal anchoring: a positional span is taken verbatim;
//! * event anchoring: landmark endpoints are looked up in a [`LandmarkTable`];
//! * object anchoring: id targets name nodes of another annotation layer.
//!
//! Id targets that name tokens of a [`TokenIndex`] resolve to the covering
//! span of those tokens. Offsets are opaque integers in whatever unit the
//! primary data uses.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::exec::Exec;
use crate::model::{GmtDocument, NodeItem, NodePath, SegmentRef, StructNode};

pub const LANDMARK: &str = "landmark";
pub const POSITION: &str = "position";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnchorError {
    #[error("unresolved target {id:?}")]
    UnresolvedTarget { id: String },
    #[error("inverted span: start {start} is after end {end}")]
    InvertedSpan { start: u64, end: u64 },
    #[error("no {needed} supplied")]
    MissingContext { needed: &'static str },
    #[error("landmark at {path}: {message}")]
    BadLandmark { path: String, message: String },
    #[error("token index line {line}: {message}")]
    BadTokenIndex { line: usize, message: String },
}

impl AnchorError {
    pub fn code(&self) -> &'static str {
        match self {
            AnchorError::UnresolvedTarget { .. } => "UNRESOLVED_TARGET",
            AnchorError::InvertedSpan { .. } => "INVERTED_SPAN",
            AnchorError::MissingContext { .. } => "MISSING_CONTEXT",
            AnchorError::BadLandmark { .. } => "BAD_LANDMARK",
            AnchorError::BadTokenIndex { .. } => "BAD_TOKEN_INDEX",
        }
    }
}

/// Half-open interval of offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: u64,
    pub end: u64,
}

impl Span {
    pub fn new(start: u64, end: u64) -> Self {
        Span { start, end }
    }

    pub fn cover(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenEntry {
    pub id: String,
    pub start: u64,
    pub end: u64,
}

/// Sidecar token index: where each token of the primary data lies.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenIndex {
    entries: Vec<TokenEntry>,
    by_id: HashMap<String, usize>,
    source_text: Option<String>,
}

impl TokenIndex {
    pub fn new(entries: Vec<TokenEntry>) -> Result<Self, AnchorError> {
        let mut by_id = HashMap::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            if e.start > e.end {
                return Err(AnchorError::BadTokenIndex {
                    line: i + 1,
                    message: format!("token {} starts after it ends", e.id),
                });
            }
            if by_id.insert(e.id.clone(), i).is_some() {
                return Err(AnchorError::BadTokenIndex {
                    line: i + 1,
                    message: format!("token id {} repeated", e.id),
                });
            }
        }
        Ok(TokenIndex {
            entries,
            by_id,
            source_text: None,
        })
    }

    /// Splits `text` on whitespace and numbers the tokens `w1`, `w2`, ...
    /// Offsets count characters; `end` is exclusive.
    pub fn from_whitespace(text: &str) -> Self {
        let mut entries = Vec::new();
        let mut start: Option<u64> = None;
        let mut pos = 0u64;
        for c in text.chars() {
            match (c.is_whitespace(), start) {
                (true, Some(s)) => {
                    entries.push(TokenEntry {
                        id: format!("w{}", entries.len() + 1),
                        start: s,
                        end: pos,
                    });
                    start = None;
                }
                (false, None) => start = Some(pos),
                _ => {}
            }
            pos += 1;
        }
        if let Some(s) = start {
            entries.push(TokenEntry {
                id: format!("w{}", entries.len() + 1),
                start: s,
                end: pos,
            });
        }
        let mut index = TokenIndex::new(entries).expect("generated ids are unique and ordered");
        index.source_text = Some(text.to_string());
        index
    }

    /// Reads `tokenId<TAB>start<TAB>end` lines; blank lines and `#` comments
    /// are skipped.
    pub fn parse(text: &str) -> Result<Self, AnchorError> {
        let mut entries = Vec::new();
        let mut lines = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let bad = |message: String| AnchorError::BadTokenIndex { line: line_no, message };
            let fields: Vec<&str> = line.split('\t').collect();
            let [id, start, end] = fields[..] else {
                return Err(bad(format!("expected 3 tab-separated fields, found {}", fields.len())));
            };
            let num = |s: &str| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| bad(format!("{s:?} is not a non-negative integer")))
            };
            let id = id.trim();
            if id.is_empty() {
                return Err(bad("empty token id".into()));
            }
            entries.push(TokenEntry {
                id: id.to_string(),
                start: num(start)?,
                end: num(end)?,
            });
            lines.push(line_no);
        }
        TokenIndex::new(entries).map_err(|e| match e {
            AnchorError::BadTokenIndex { line, message } => AnchorError::BadTokenIndex {
                line: lines[line - 1],
                message,
            },
            other => other,
        })
    }

    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("{}\t{}\t{}\n", e.id, e.start, e.end))
            .collect()
    }

    pub fn entries(&self) -> &[TokenEntry] {
        &self.entries
    }

    pub fn get(&self, id: &str) -> Option<&TokenEntry> {
        self.by_id.get(id).map(|&i| &self.entries[i])
    }

    pub fn source_text(&self) -> Option<&str> {
        self.source_text.as_deref()
    }

    /// The characters a span covers, when the source text is known.
    pub fn slice(&self, span: Span) -> Option<String> {
        let text = self.source_text.as_deref()?;
        Some(
            text.chars()
                .skip(span.start as usize)
                .take(span.end.saturating_sub(span.start) as usize)
                .collect(),
        )
    }
}

/// Landmark id → position.
pub type LandmarkTable = BTreeMap<String, u64>;

/// Collects every `landmark` node of `doc` with its `position` feature.
pub fn build_landmark_table(doc: &GmtDocument) -> Result<LandmarkTable, AnchorError> {
    let mut table = LandmarkTable::new();
    for (path, node) in doc.walk() {
        if node.node_type.as_deref() != Some(LANDMARK) {
            continue;
        }
        let bad = |message: String| AnchorError::BadLandmark {
            path: path.to_string(),
            message,
        };
        let id = node.id.as_deref().ok_or_else(|| bad("landmark has no id".into()))?;
        let raw = node
            .feature_text(POSITION)
            .ok_or_else(|| bad(format!("landmark {id} has no position")))?;
        let pos = raw.parse::<u64>().map_err(|_| {
            bad(format!(
                "position {raw:?} of landmark {id} is not a non-negative integer"
            ))
        })?;
        if table.insert(id.to_string(), pos).is_some() {
            return Err(bad(format!("landmark id {id} repeated")));
        }
    }
    Ok(table)
}

/// A node of another layer that an id target resolved to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetNode {
    pub path: NodePath,
    pub id: Option<String>,
}

impl fmt::Display for TargetNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.id {
            Some(id) => f.write_str(id),
            None => write!(f, "{}", self.path),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResolvedSpan {
    /// Offsets in the primary data.
    Span(Span),
    /// Nodes of the named layer document.
    Nodes { layer: String, nodes: Vec<TargetNode> },
}

/// An annotation layer that id targets may point into. A target matches a
/// node carrying that id or, failing that, the first node whose segment
/// targets exactly that id.
#[derive(Debug, Clone)]
pub struct Layer {
    name: String,
    index: HashMap<String, TargetNode>,
}

impl Layer {
    pub fn new(name: impl Into<String>, doc: &GmtDocument) -> Self {
        let mut by_id = HashMap::new();
        let mut by_seg = HashMap::new();
        for (path, node) in doc.walk() {
            let target = TargetNode {
                path: path.clone(),
                id: node.id.clone(),
            };
            if let Some(id) = &node.id {
                by_id.entry(id.clone()).or_insert_with(|| target.clone());
            }
            for seg in node.segs() {
                if let SegmentRef::IdTargets(ids) = seg {
                    if let [one] = ids.as_slice() {
                        by_seg.entry(one.clone()).or_insert_with(|| target.clone());
                    }
                }
            }
        }
        for (k, v) in by_seg {
            by_id.entry(k).or_insert(v);
        }
        Layer {
            name: name.into(),
            index: by_id,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lookup(&self, id: &str) -> Option<&TargetNode> {
        self.index.get(id)
    }
}

/// What a segment may be resolved against.
#[derive(Debug, Clone, Copy, Default)]
pub struct ResolveContext<'a> {
    pub tokens: Option<&'a TokenIndex>,
    pub landmarks: Option<&'a LandmarkTable>,
    pub layers: &'a [Layer],
}

pub fn resolve_seg(seg: &SegmentRef, ctx: &ResolveContext<'_>) -> Result<ResolvedSpan, AnchorError> {
    match seg {
        SegmentRef::PositionalSpan { start, end } => {
            if start > end {
                return Err(AnchorError::InvertedSpan {
                    start: *start,
                    end: *end,
                });
            }
            Ok(ResolvedSpan::Span(Span::new(*start, *end)))
        }
        SegmentRef::LandmarkEndpoints { start, end } => {
            let table = ctx.landmarks.ok_or(AnchorError::MissingContext {
                needed: "landmark table",
            })?;
            let look = |id: &String| {
                table
                    .get(id)
                    .copied()
                    .ok_or_else(|| AnchorError::UnresolvedTarget { id: id.clone() })
            };
            let (s, e) = (look(start)?, look(end)?);
            if s > e {
                return Err(AnchorError::InvertedSpan { start: s, end: e });
            }
            Ok(ResolvedSpan::Span(Span::new(s, e)))
        }
        SegmentRef::IdTargets(ids) => resolve_ids(ids, ctx),
    }
}

fn resolve_ids(ids: &[String], ctx: &ResolveContext<'_>) -> Result<ResolvedSpan, AnchorError> {
    let Some(first) = ids.first() else {
        return Err(AnchorError::UnresolvedTarget { id: String::new() });
    };
    if let Some(tokens) = ctx.tokens.filter(|t| t.get(first).is_some()) {
        let mut span: Option<Span> = None;
        for id in ids {
            let e = tokens
                .get(id)
                .ok_or_else(|| AnchorError::UnresolvedTarget { id: id.clone() })?;
            let s = Span::new(e.start, e.end);
            span = Some(span.map_or(s, |acc| acc.cover(s)));
        }
        return Ok(ResolvedSpan::Span(span.expect("ids is non-empty")));
    }
    let layer = ctx
        .layers
        .iter()
        .find(|l| l.lookup(first).is_some())
        .ok_or_else(|| AnchorError::UnresolvedTarget { id: first.clone() })?;
    let nodes = ids
        .iter()
        .map(|id| {
            layer
                .lookup(id)
                .cloned()
                .ok_or_else(|| AnchorError::UnresolvedTarget { id: id.clone() })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ResolvedSpan::Nodes {
        layer: layer.name.clone(),
        nodes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Extent {
    pub span: Option<Span>,
    /// Failures skipped in lenient mode.
    pub skipped: Vec<AnchorError>,
}

/// Covering span of every resolvable segment on `node` and its descendants.
/// Segments that resolve to layer nodes carry no offsets and are ignored.
pub fn derived_extent(
    node: &StructNode,
    tokens: &TokenIndex,
    landmarks: Option<&LandmarkTable>,
    strictness: Strictness,
) -> Result<Extent, AnchorError> {
    let ctx = ResolveContext {
        tokens: Some(tokens),
        landmarks,
        layers: &[],
    };
    let mut extent = Extent::default();
    accumulate(node, &ctx, strictness, &mut extent)?;
    Ok(extent)
}

fn accumulate(
    node: &StructNode,
    ctx: &ResolveContext<'_>,
    strictness: Strictness,
    acc: &mut Extent,
) -> Result<(), AnchorError> {
    for seg in node.segs() {
        match resolve_seg(seg, ctx) {
            Ok(ResolvedSpan::Span(s)) => acc.span = Some(acc.span.map_or(s, |a| a.cover(s))),
            Ok(ResolvedSpan::Nodes { .. }) => {}
            Err(e) if strictness == Strictness::Lenient => acc.skipped.push(e),
            Err(e) => return Err(e),
        }
    }
    for child in &node.children {
        accumulate(child, ctx, strictness, acc)?;
    }
    Ok(())
}

/// One segment of a document with its resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegResolution {
    pub path: NodePath,
    pub result: Result<ResolvedSpan, AnchorError>,
}

impl SegResolution {
    /// `nodePath<TAB>start<TAB>end` or `nodePath<TAB>nodes:<ids>`; `None` for failures.
    pub fn render(&self) -> Option<String> {
        match &self.result {
            Ok(ResolvedSpan::Span(s)) => Some(format!("{}\t{}\t{}", self.path, s.start, s.end)),
            Ok(ResolvedSpan::Nodes { nodes, .. }) => {
                let ids: Vec<String> = nodes.iter().map(|n| n.to_string()).collect();
                Some(format!("{}\tnodes:{}", self.path, ids.join(",")))
            }
            Err(_) => None,
        }
    }
}

/// Resolves every segment of `doc` in document order.
pub fn resolve_document(doc: &GmtDocument, ctx: &ResolveContext<'_>, exec: Exec) -> Vec<SegResolution> {
    let mut segs: Vec<(NodePath, &SegmentRef)> = Vec::new();
    for (path, node) in doc.walk() {
        collect_paths(&node.items, &path, &mut segs);
    }
    exec.map(&segs, |(path, seg)| SegResolution {
        path: path.clone(),
        result: resolve_seg(seg, ctx),
    })
}

fn collect_paths<'a>(items: &'a [NodeItem], node_path: &NodePath, out: &mut Vec<(NodePath, &'a SegmentRef)>) {
    for item in items {
        match item {
            NodeItem::Seg(s) => out.push((node_path.clone(), s)),
            NodeItem::Bracket(b) => collect_paths(&b.members, node_path, out),
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StructNode;
    use proptest::prelude::*;

    const PAUL: &str = "Paul aime les croissants";

    #[test]
    fn whitespace_tokens_of_paul() {
        let idx = TokenIndex::from_whitespace(PAUL);
        let spans: Vec<(u64, u64)> = idx.entries().iter().map(|e| (e.start, e.end)).collect();
        assert_eq!(spans, [(0, 4), (5, 9), (10, 13), (14, 24)]);
        assert_eq!(idx.slice(Span::new(5, 9)).as_deref(), Some("aime"));
    }

    #[test]
    fn id_target_resolves_to_token_span() {
        let idx = TokenIndex::from_whitespace(PAUL);
        let ctx = ResolveContext {
            tokens: Some(&idx),
            ..Default::default()
        };
        assert_eq!(
            resolve_seg(&SegmentRef::single("w2"), &ctx),
            Ok(ResolvedSpan::Span(Span::new(5, 9)))
        );
        let many = SegmentRef::IdTargets(vec!["w4".into(), "w1".into()]);
        assert_eq!(resolve_seg(&many, &ctx), Ok(ResolvedSpan::Span(Span::new(0, 24))));
        let bad = SegmentRef::IdTargets(vec!["w1".into(), "w9".into()]);
        assert_eq!(
            resolve_seg(&bad, &ctx),
            Err(AnchorError::UnresolvedTarget { id: "w9".into() })
        );
    }

    #[test]
    fn positional_and_landmarks() {
        let ctx = ResolveContext::default();
        let seg = SegmentRef::PositionalSpan { start: 2300, end: 3200 };
        assert_eq!(resolve_seg(&seg, &ctx), Ok(ResolvedSpan::Span(Span::new(2300, 3200))));
        let lm = SegmentRef::LandmarkEndpoints {
            start: "1".into(),
            end: "0".into(),
        };
        assert_eq!(resolve_seg(&lm, &ctx).unwrap_err().code(), "MISSING_CONTEXT");
        let table: LandmarkTable = [("0".to_string(), 0), ("1".to_string(), 2360)].into();
        let ctx = ResolveContext {
            landmarks: Some(&table),
            ..Default::default()
        };
        assert_eq!(
            resolve_seg(&lm, &ctx),
            Err(AnchorError::InvertedSpan { start: 2360, end: 0 })
        );
        let ok = SegmentRef::LandmarkEndpoints {
            start: "0".into(),
            end: "1".into(),
        };
        assert_eq!(resolve_seg(&ok, &ctx), Ok(ResolvedSpan::Span(Span::new(0, 2360))));
    }

    #[test]
    fn token_index_file_format() {
        let idx = TokenIndex::parse("# Paul aime les croissants\nw1\t0\t4\n\nw2\t5\t9\n").unwrap();
        assert_eq!(idx.get("w2").map(|e| (e.start, e.end)), Some((5, 9)));
        assert_eq!(TokenIndex::parse(&idx.to_text()).unwrap(), idx);
        let err = TokenIndex::parse("w1\t0\t4\n#c\nw1\t5\t9\n").unwrap_err();
        assert_eq!(
            err,
            AnchorError::BadTokenIndex {
                line: 3,
                message: "token id w1 repeated".into()
            }
        );
        assert!(TokenIndex::parse("w1 0 4").is_err());
        assert!(TokenIndex::parse("w1\t5\t4").is_err());
    }

    #[test]
    fn landmark_table_errors_name_the_node() {
        let doc = GmtDocument::new("landmarkDesc").with_root(
            StructNode::new("landmarkDesc")
                .with_child(StructNode::new(LANDMARK).with_id("0").with_feature(POSITION, "0"))
                .with_child(StructNode::new(LANDMARK).with_feature(POSITION, "5")),
        );
        let err = build_landmark_table(&doc).unwrap_err();
        assert!(matches!(err, AnchorError::BadLandmark { ref path, .. } if path == "/struct[1]/struct[2]"));
        let doc = GmtDocument::new("landmarkDesc")
            .with_root(StructNode::new(LANDMARK).with_id("0").with_feature(POSITION, "2.5"));
        assert!(build_landmark_table(&doc).is_err());
        assert!(build_landmark_table(&GmtDocument::new("x")).unwrap().is_empty());
    }

    #[test]
    fn lenient_extent_skips_and_records() {
        let idx = TokenIndex::from_whitespace(PAUL);
        let node = StructNode::new("x")
            .with_child(StructNode::new("w").with_seg(SegmentRef::single("w2")))
            .with_child(StructNode::new("w").with_seg(SegmentRef::single("w7")));
        assert!(derived_extent(&node, &idx, None, Strictness::Strict).is_err());
        let ext = derived_extent(&node, &idx, None, Strictness::Lenient).unwrap();
        assert_eq!(ext.span, Some(Span::new(5, 9)));
        assert_eq!(ext.skipped.len(), 1);
        assert_eq!(
            derived_extent(&StructNode::new("leaf"), &idx, None, Strictness::Strict)
                .unwrap()
                .span,
            None
        );
    }

    proptest! {
        #[test]
        fn whitespace_tokens_are_ordered_and_disjoint(text in "[a-z \t\n]{0,60}") {
            let idx = TokenIndex::from_whitespace(&text);
            for e in idx.entries() {
                prop_assert!(e.start < e.end);
                let covered = idx.slice(Span::new(e.start, e.end)).unwrap();
                prop_assert!(!covered.contains(char::is_whitespace));
            }
            for pair in idx.entries().windows(2) {
                prop_assert!(pair[0].end < pair[1].start);
            }
        }

        #[test]
        fn positional_resolution_is_identity(a in 0u64..1_000_000, b in 0u64..1_000_000) {
            let (start, end) = (a.min(b), a.max(b));
            let seg = SegmentRef::PositionalSpan { start, end };
            prop_assert_eq!(resolve_seg(&seg, &ResolveContext::default()), Ok(ResolvedSpan::Span(Span::new(start, end))));
        }
    }
}
