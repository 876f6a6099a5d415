//! Annotation graphs and their GMT landmark representation.
//!
//! An annotation graph is a set of timeline nodes (id → offset) and labeled
//! arcs between them. In GMT the nodes become `landmark` structs of a
//! `landmarkDesc` document and each arc becomes a struct in a per-type
//! layer, anchored by landmark endpoints and carrying the arc label as
//! features. The arc's `att_1` selects the layer through a [`TypeMap`].

use std::collections::BTreeMap;
use std::fmt::Write;

use thiserror::Error;

use crate::anchoring::{build_landmark_table, AnchorError, LANDMARK, POSITION};
use crate::model::{Feature, FeatureValue, GmtDocument, NodeItem, SegmentRef, StructNode};
use crate::xml::tree::{parse_tree, LineIndex, XmlError, XmlNode};
use crate::xml::{escape_attr, DECLARATION};

pub const LANDMARK_DESC: &str = "landmarkDesc";
pub const TYPE_ATTR: &str = "att_1";
pub const VALUE_ATTR: &str = "att_2";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgError {
    #[error(transparent)]
    Xml(#[from] XmlError),
    #[error("{line}:{column}: {message}")]
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("node {id:?} has offsets {first} and {second}")]
    ConflictingOffset { id: String, first: u64, second: u64 },
    #[error("arc {index} refers to undeclared node {id:?}")]
    MissingNode { index: usize, id: String },
    #[error("arc {index} runs backwards ({from} at {from_offset} → {to} at {to_offset})")]
    InvertedArc {
        index: usize,
        from: String,
        from_offset: u64,
        to: String,
        to_offset: u64,
    },
    #[error("arc {index} has no {TYPE_ATTR}")]
    UntypedArc { index: usize },
    #[error("no mapping for {TYPE_ATTR} value {value:?}")]
    UnmappedType { value: String },
    #[error("no mapping for document type {doc_type:?}")]
    UnknownDocType { doc_type: String },
    #[error("label attribute {name:?} clashes with the payload category")]
    LabelClash { name: String },
    #[error("{name:?} is not a valid XML attribute name")]
    InvalidName { name: String },
    #[error("type map line {line}: {message}")]
    BadMap { line: usize, message: String },
    #[error(transparent)]
    Anchor(#[from] AnchorError),
}

impl AgError {
    pub fn code(&self) -> &'static str {
        match self {
            AgError::Xml(_) | AgError::Malformed { .. } => "MALFORMED_GRAPH",
            AgError::ConflictingOffset { .. } => "CONFLICTING_OFFSET",
            AgError::MissingNode { .. } => "MISSING_NODE",
            AgError::InvertedArc { .. } => "INVERTED_ARC",
            AgError::UntypedArc { .. } => "UNTYPED_ARC",
            AgError::UnmappedType { .. } => "UNMAPPED_TYPE",
            AgError::UnknownDocType { .. } => "UNKNOWN_DOC_TYPE",
            AgError::LabelClash { .. } => "LABEL_CLASH",
            AgError::InvalidName { .. } => "INVALID_NAME",
            AgError::BadMap { .. } => "BAD_TYPE_MAP",
            AgError::Anchor(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphArc {
    pub source: String,
    pub target: String,
    /// Label attributes in document order (`att_1`, `att_2`, ...).
    pub label: Vec<(String, String)>,
}

impl GraphArc {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.label.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnnotationGraph {
    pub nodes: BTreeMap<String, u64>,
    pub arcs: Vec<GraphArc>,
}

impl AnnotationGraph {
    /// Every arc joins declared nodes and never runs backwards in time.
    pub fn check(&self) -> Result<(), AgError> {
        for (index, arc) in self.arcs.iter().enumerate() {
            let offset = |id: &String| {
                self.nodes
                    .get(id)
                    .copied()
                    .ok_or_else(|| AgError::MissingNode { index, id: id.clone() })
            };
            let (s, t) = (offset(&arc.source)?, offset(&arc.target)?);
            if s > t {
                return Err(AgError::InvertedArc {
                    index,
                    from: arc.source.clone(),
                    from_offset: s,
                    to: arc.target.clone(),
                    to_offset: t,
                });
            }
        }
        Ok(())
    }
}

/// Reads the `<annotation><arc><source/><label/><target/></arc>...` format.
pub fn parse_ag(text: &str) -> Result<AnnotationGraph, AgError> {
    let root = parse_tree(text)?;
    let lines = LineIndex::new(text);
    let malformed = |offset: usize, message: String| {
        let (line, column) = lines.locate(offset);
        AgError::Malformed { line, column, message }
    };
    if root.name != "annotation" {
        return Err(malformed(
            root.offset,
            format!("expected <annotation> root, found <{}>", root.name),
        ));
    }
    let mut graph = AnnotationGraph::default();
    for child in &root.children {
        let arc = match child {
            XmlNode::Text(t, off) if !t.trim().is_empty() => {
                return Err(malformed(*off, "text directly inside <annotation>".into()))
            }
            XmlNode::Text(..) => continue,
            XmlNode::Element(e) if e.name == "arc" => e,
            XmlNode::Element(e) => return Err(malformed(e.offset, format!("unexpected <{}> in <annotation>", e.name))),
        };
        let part = |name: &str| {
            let mut found = arc.elements().filter(|e| e.name == name);
            match (found.next(), found.next()) {
                (Some(e), None) => Ok(e),
                (None, _) => Err(malformed(arc.offset, format!("<arc> without <{name}>"))),
                (Some(_), Some(e)) => Err(malformed(e.offset, format!("<arc> with more than one <{name}>"))),
            }
        };
        if let Some(e) = arc
            .elements()
            .find(|e| !matches!(e.name.as_str(), "source" | "label" | "target"))
        {
            return Err(malformed(e.offset, format!("unexpected <{}> in <arc>", e.name)));
        }
        let mut ends = Vec::with_capacity(2);
        for name in ["source", "target"] {
            let e = part(name)?;
            let id = e
                .attr("id")
                .ok_or_else(|| malformed(e.offset, format!("<{name}> without id")))?;
            let raw = e
                .attr("offset")
                .ok_or_else(|| malformed(e.offset, format!("<{name}> without offset")))?;
            let offset = raw
                .trim()
                .parse::<u64>()
                .map_err(|_| malformed(e.offset, format!("offset {raw:?} is not a non-negative integer")))?;
            match graph.nodes.get(id) {
                Some(&prev) if prev != offset => {
                    return Err(AgError::ConflictingOffset {
                        id: id.to_string(),
                        first: prev,
                        second: offset,
                    })
                }
                _ => {
                    graph.nodes.insert(id.to_string(), offset);
                }
            }
            ends.push(id.to_string());
        }
        let label = part("label")?.attrs.clone();
        let target = ends.pop().expect("two ends");
        let source = ends.pop().expect("two ends");
        graph.arcs.push(GraphArc { source, target, label });
    }
    graph.check()?;
    Ok(graph)
}

fn is_xml_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_' || c == ':')
        && chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | ':' | '-' | '.'))
}

/// Writes the graph in the same one-arc-per-line layout it is read from.
/// Nodes that no arc touches have no representation and are dropped.
pub fn write_ag(graph: &AnnotationGraph) -> Result<String, AgError> {
    graph.check()?;
    let mut out = String::from(DECLARATION);
    if graph.arcs.is_empty() {
        out.push_str("<annotation/>\n");
        return Ok(out);
    }
    out.push_str("<annotation>\n");
    for arc in &graph.arcs {
        let end = |id: &str| format!("id=\"{}\" offset=\"{}\"", escape_attr(id), graph.nodes[id]);
        let _ = write!(out, "  <arc><source {}/><label", end(&arc.source));
        for (k, v) in &arc.label {
            if !is_xml_name(k) {
                return Err(AgError::InvalidName { name: k.clone() });
            }
            let _ = write!(out, " {k}=\"{}\"", escape_attr(v));
        }
        let _ = writeln!(out, "/><target {}/></arc>", end(&arc.target));
    }
    out.push_str("</annotation>\n");
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeMapping {
    pub type_value: String,
    pub doc_type: String,
    pub payload: String,
}

/// `att_1` value ↔ (layer document type, payload category).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeMap {
    entries: Vec<TypeMapping>,
}

impl Default for TypeMap {
    fn default() -> Self {
        let entry = |t: &str, d: &str, p: &str| TypeMapping {
            type_value: t.into(),
            doc_type: d.into(),
            payload: p.into(),
        };
        TypeMap {
            entries: vec![entry("P", "phoneticAnnot", "phone"), entry("W", "morphAnnot", "source")],
        }
    }
}

impl TypeMap {
    pub fn new(entries: Vec<TypeMapping>) -> Result<Self, AgError> {
        for (i, e) in entries.iter().enumerate() {
            let line = i + 1;
            if e.doc_type == LANDMARK_DESC {
                return Err(AgError::BadMap {
                    line,
                    message: format!("{LANDMARK_DESC} is reserved"),
                });
            }
            if entries[..i]
                .iter()
                .any(|p| p.type_value == e.type_value || p.doc_type == e.doc_type)
            {
                return Err(AgError::BadMap {
                    line,
                    message: format!("{} or {} mapped twice", e.type_value, e.doc_type),
                });
            }
        }
        Ok(TypeMap { entries })
    }

    /// Reads `att1Value<TAB>docType<TAB>payloadCat` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, AgError> {
        let mut entries = Vec::new();
        let mut line_nos = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            match fields[..] {
                [t, d, p] if !t.is_empty() && !d.is_empty() && !p.is_empty() => entries.push(TypeMapping {
                    type_value: t.into(),
                    doc_type: d.into(),
                    payload: p.into(),
                }),
                _ => {
                    return Err(AgError::BadMap {
                        line: n + 1,
                        message: "expected att1Value<TAB>docType<TAB>payloadCat".into(),
                    })
                }
            }
            line_nos.push(n + 1);
        }
        TypeMap::new(entries).map_err(|e| match e {
            AgError::BadMap { line, message } => AgError::BadMap {
                line: line_nos[line - 1],
                message,
            },
            other => other,
        })
    }

    pub fn entries(&self) -> &[TypeMapping] {
        &self.entries
    }

    pub fn by_type(&self, value: &str) -> Option<&TypeMapping> {
        self.entries.iter().find(|e| e.type_value == value)
    }

    pub fn by_doc_type(&self, doc_type: &str) -> Option<&TypeMapping> {
        self.entries.iter().find(|e| e.doc_type == doc_type)
    }
}

fn landmark_document(graph: &AnnotationGraph) -> GmtDocument {
    let mut nodes: Vec<(&String, &u64)> = graph.nodes.iter().collect();
    nodes.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
    let mut root = StructNode::new(LANDMARK_DESC);
    for (id, offset) in nodes {
        root.children.push(
            StructNode::new(LANDMARK)
                .with_id(id.clone())
                .with_feature(POSITION, &offset.to_string()),
        );
    }
    GmtDocument::new(LANDMARK_DESC).with_root(root)
}

/// Splits a graph into a `landmarkDesc` document followed by one layer per
/// distinct `att_1` value, in order of first appearance.
pub fn ag_to_gmt(graph: &AnnotationGraph, map: &TypeMap) -> Result<Vec<GmtDocument>, AgError> {
    graph.check()?;
    let mut layers: Vec<(&TypeMapping, StructNode)> = Vec::new();
    for (index, arc) in graph.arcs.iter().enumerate() {
        let value = arc.attr(TYPE_ATTR).ok_or(AgError::UntypedArc { index })?;
        let mapping = map.by_type(value).ok_or_else(|| AgError::UnmappedType {
            value: value.to_string(),
        })?;
        let mut node = StructNode::new(mapping.payload.clone()).with_seg(SegmentRef::LandmarkEndpoints {
            start: arc.source.clone(),
            end: arc.target.clone(),
        });
        for (k, v) in &arc.label {
            match k.as_str() {
                TYPE_ATTR => {}
                VALUE_ATTR => node
                    .items
                    .push(NodeItem::Feature(Feature::text(mapping.payload.clone(), v.clone()))),
                _ if *k == mapping.payload => return Err(AgError::LabelClash { name: k.clone() }),
                _ => node.items.push(NodeItem::Feature(Feature::text(k.clone(), v.clone()))),
            }
        }
        match layers.iter_mut().find(|(m, _)| m.type_value == mapping.type_value) {
            Some((_, root)) => root.children.push(node),
            None => layers.push((mapping, StructNode::new(mapping.doc_type.clone()).with_child(node))),
        }
    }
    let mut docs = vec![landmark_document(graph)];
    docs.extend(
        layers
            .into_iter()
            .map(|(m, root)| GmtDocument::new(m.doc_type.clone()).with_root(root)),
    );
    Ok(docs)
}

/// Rebuilds a graph from a landmark document and layers produced by
/// [`ag_to_gmt`] (or written by hand in the same shape).
pub fn gmt_to_ag(landmarks: &GmtDocument, layers: &[GmtDocument], map: &TypeMap) -> Result<AnnotationGraph, AgError> {
    let table = build_landmark_table(landmarks)?;
    let mut graph = AnnotationGraph {
        nodes: table.clone(),
        arcs: Vec::new(),
    };
    for layer in layers {
        let mapping = map
            .by_doc_type(&layer.doc_type)
            .ok_or_else(|| AgError::UnknownDocType {
                doc_type: layer.doc_type.clone(),
            })?;
        for (_, node) in layer.walk() {
            let Some((start, end)) = node.segs().into_iter().find_map(|s| match s {
                SegmentRef::LandmarkEndpoints { start, end } => Some((start, end)),
                _ => None,
            }) else {
                continue;
            };
            let position = |id: &String| {
                table
                    .get(id)
                    .copied()
                    .ok_or_else(|| AnchorError::UnresolvedTarget { id: id.clone() })
            };
            let (s, e) = (position(start)?, position(end)?);
            if s > e {
                return Err(AnchorError::InvertedSpan { start: s, end: e }.into());
            }
            let mut label = vec![(TYPE_ATTR.to_string(), mapping.type_value.clone())];
            let mut payload_seen = false;
            let mut extras = Vec::new();
            for item in &node.items {
                let NodeItem::Feature(Feature {
                    cat_type,
                    value: FeatureValue::Text(v),
                }) = item
                else {
                    continue;
                };
                if *cat_type == mapping.payload && !payload_seen {
                    payload_seen = true;
                    label.push((VALUE_ATTR.to_string(), v.clone()));
                } else {
                    extras.push((cat_type.clone(), v.clone()));
                }
            }
            label.extend(extras);
            graph.arcs.push(GraphArc {
                source: start.clone(),
                target: end.clone(),
                label,
            });
        }
    }
    Ok(graph)
}
