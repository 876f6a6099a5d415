//! GMT XML → model.

use std::fmt;

use super::tree::{parse_tree, Element, LineIndex, XmlError, XmlNode};
use super::CONTAINER;
use crate::model::{
    AltSet, Alternative, Bracket, Feature, FeatureValue, GmtDocument, NodeItem, Relation, SegmentRef, StructNode,
};

/// A soft problem found while reading; the offending markup was skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParseDiagnostics {
    pub warnings: Vec<Diagnostic>,
}

impl ParseDiagnostics {
    pub fn is_empty(&self) -> bool {
        self.warnings.is_empty()
    }
}

pub type GmtParseError = XmlError;

/// Reads a GMT document.
///
/// A `<struct>` root becomes the single root node and lends its type to the
/// document. A `<gmt type="...">` root is a container whose `<struct>`
/// children are the roots.
pub fn parse_gmt(text: &str) -> Result<(GmtDocument, ParseDiagnostics), GmtParseError> {
    let root = parse_tree(text)?;
    let mut reader = Mapper {
        lines: LineIndex::new(text),
        diagnostics: ParseDiagnostics::default(),
    };
    let doc = match root.name.as_str() {
        "struct" => {
            let node = reader.structure(&root)?;
            GmtDocument {
                doc_type: node.node_type.clone().unwrap_or_default(),
                roots: vec![node],
            }
        }
        CONTAINER => {
            reader.check_attrs(&root, &["type"]);
            let mut roots = Vec::new();
            for child in &root.children {
                match child {
                    XmlNode::Element(e) if e.name == "struct" => roots.push(reader.structure(e)?),
                    XmlNode::Element(e) => reader.warn(
                        e.offset,
                        format!("unexpected <{}> in document container skipped", e.name),
                    ),
                    XmlNode::Text(t, off) => reader.stray_text(t, *off),
                }
            }
            GmtDocument {
                doc_type: root.attr("type").unwrap_or_default().to_string(),
                roots,
            }
        }
        other => {
            return Err(reader.lines.error(
                root.offset,
                format!("expected <struct> or <{CONTAINER}> root, found <{other}>"),
            ))
        }
    };
    Ok((doc, reader.diagnostics))
}

fn strip_fragment(s: &str) -> String {
    s.strip_prefix('#').unwrap_or(s).to_string()
}

struct Mapper<'a> {
    lines: LineIndex<'a>,
    diagnostics: ParseDiagnostics,
}

/// Accumulates node items, pairing `<startsAt>`/`<endsAt>` landmark elements.
#[derive(Default)]
struct Items {
    items: Vec<NodeItem>,
    pending: Option<PendingEndpoint>,
}

struct PendingEndpoint {
    is_start: bool,
    id: String,
    index: usize,
    offset: usize,
}

impl Items {
    fn push(&mut self, item: NodeItem) {
        self.items.push(item);
    }

    fn push_alt(&mut self, alt: Alternative) {
        match self.items.last_mut() {
            Some(NodeItem::AltSet(set)) => set.alternatives.push(alt),
            _ => self.items.push(NodeItem::AltSet(AltSet {
                alternatives: vec![alt],
            })),
        }
    }
}

impl<'a> Mapper<'a> {
    fn warn(&mut self, offset: usize, message: impl Into<String>) {
        let (line, column) = self.lines.locate(offset);
        self.diagnostics.warnings.push(Diagnostic {
            line,
            column,
            message: message.into(),
        });
    }

    fn fail<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, XmlError> {
        Err(self.lines.error(offset, message))
    }

    fn stray_text(&mut self, text: &str, offset: usize) {
        if !text.trim().is_empty() {
            self.warn(offset, format!("text {:?} outside a feature ignored", text.trim()));
        }
    }

    fn check_attrs(&mut self, el: &Element, known: &[&str]) {
        for (k, _) in &el.attrs {
            if !known.contains(&k.as_str()) && !k.starts_with("xmlns") {
                self.warn(el.offset, format!("unknown attribute {k:?} on <{}> ignored", el.name));
            }
        }
    }

    fn structure(&mut self, el: &Element) -> Result<StructNode, XmlError> {
        self.check_attrs(el, &["type", "id", "ID", "xml:id", "ref"]);
        let ids: Vec<&str> = ["id", "ID", "xml:id"].iter().filter_map(|k| el.attr(k)).collect();
        if ids.len() > 1 {
            return self.fail(el.offset, "struct carries more than one id attribute");
        }
        let mut node = StructNode {
            id: ids.first().map(|s| s.to_string()),
            node_type: el.attr("type").map(str::to_string),
            ref_target: el.attr("ref").map(strip_fragment),
            ..Default::default()
        };
        let mut items = Items::default();
        self.node_content(el, &mut items, &mut node.children)?;
        node.items = self.finish(items, el)?;
        Ok(node)
    }

    fn finish(&mut self, items: Items, el: &Element) -> Result<Vec<NodeItem>, XmlError> {
        if let Some(p) = items.pending {
            let (have, missing) = if p.is_start {
                ("startsAt", "endsAt")
            } else {
                ("endsAt", "startsAt")
            };
            return self.fail(
                p.offset,
                format!("<{have}> in <{}> has no matching <{missing}>", el.name),
            );
        }
        Ok(items.items)
    }

    /// Content of a `<struct>` (or of a `<seg>` used as a container).
    fn node_content(
        &mut self,
        el: &Element,
        items: &mut Items,
        children: &mut Vec<StructNode>,
    ) -> Result<(), XmlError> {
        for child in &el.children {
            let e = match child {
                XmlNode::Text(t, off) => {
                    self.stray_text(t, *off);
                    continue;
                }
                XmlNode::Element(e) => e,
            };
            match e.name.as_str() {
                "struct" => children.push(self.structure(e)?),
                "seg" => {
                    items.push(NodeItem::Seg(self.seg(e)?));
                    if e.has_element_children() {
                        self.warn(
                            e.offset,
                            "<seg> with element content read as an empty seg followed by its content",
                        );
                        self.node_content(e, items, children)?;
                    } else {
                        self.stray_text(&e.text(), e.offset);
                    }
                }
                _ => self.item(e, items)?,
            }
        }
        Ok(())
    }

    /// Items allowed both in `<struct>` and in `<brack>`.
    fn item(&mut self, e: &Element, items: &mut Items) -> Result<(), XmlError> {
        match e.name.as_str() {
            "feat" => items.push(NodeItem::Feature(self.feature(e)?)),
            "alt" => {
                let alt = self.alternative(e)?;
                items.push_alt(alt);
            }
            "rel" => {
                self.check_attrs(e, &["type", "target"]);
                let Some(target) = e.attr("target") else {
                    return self.fail(e.offset, "<rel> without target");
                };
                items.push(NodeItem::Relation(Relation {
                    rel_type: e.attr("type").map(str::to_string),
                    target: strip_fragment(target),
                }));
            }
            "seg" => {
                items.push(NodeItem::Seg(self.seg(e)?));
                if e.has_element_children() {
                    self.warn(e.offset, "element content of <seg> inside <brack> skipped");
                }
            }
            "brack" => {
                let mut inner = Items::default();
                for c in &e.children {
                    match c {
                        XmlNode::Text(t, off) => self.stray_text(t, *off),
                        XmlNode::Element(m) if m.name == "struct" => {
                            self.warn(m.offset, "<struct> inside <brack> skipped")
                        }
                        XmlNode::Element(m) => self.item(m, &mut inner)?,
                    }
                }
                let members = self.finish(inner, e)?;
                items.push(NodeItem::Bracket(Bracket { members }));
            }
            "startsAt" | "endsAt" => self.endpoint(e, items)?,
            _ => {
                if let Some(f) = self.leaf_feature(e) {
                    items.push(NodeItem::Feature(f));
                }
            }
        }
        Ok(())
    }

    /// `<position>0</position>`-style leaves become features named after the
    /// element; anything else unknown is skipped.
    fn leaf_feature(&mut self, e: &Element) -> Option<Feature> {
        let text = e.text();
        if e.has_element_children() || text.trim().is_empty() {
            self.warn(e.offset, format!("unknown element <{}> skipped", e.name));
            return None;
        }
        if !e.attrs.is_empty() {
            self.warn(e.offset, format!("attributes on <{}> ignored", e.name));
        }
        Some(Feature::text(e.name.clone(), text.trim()))
    }

    fn endpoint(&mut self, e: &Element, items: &mut Items) -> Result<(), XmlError> {
        self.check_attrs(e, &["target"]);
        let is_start = e.name == "startsAt";
        let Some(target) = e.attr("target") else {
            return self.fail(e.offset, format!("<{}> without target", e.name));
        };
        let id = strip_fragment(target);
        match items.pending.take() {
            None => {
                items.pending = Some(PendingEndpoint {
                    is_start,
                    id,
                    index: items.items.len(),
                    offset: e.offset,
                })
            }
            Some(p) if p.is_start != is_start => {
                let (start, end) = if is_start { (id, p.id) } else { (p.id, id) };
                items
                    .items
                    .insert(p.index, NodeItem::Seg(SegmentRef::LandmarkEndpoints { start, end }));
            }
            Some(_) => return self.fail(e.offset, format!("repeated <{}> before its counterpart", e.name)),
        }
        Ok(())
    }

    fn feature(&mut self, e: &Element) -> Result<Feature, XmlError> {
        self.check_attrs(e, &["type", "target"]);
        let Some(cat) = e.attr("type") else {
            return self.fail(e.offset, "<feat> without type");
        };
        let text = e.text();
        let value = if let Some(target) = e.attr("target") {
            if e.has_element_children() || !text.trim().is_empty() {
                return self.fail(e.offset, "<feat> has both a target and content");
            }
            FeatureValue::Target(strip_fragment(target))
        } else if e.has_element_children() {
            if !text.trim().is_empty() {
                return self.fail(e.offset, "<feat> mixes text with nested features");
            }
            let mut nested = Vec::new();
            for c in e.elements() {
                if c.name == "feat" {
                    nested.push(self.feature(c)?);
                } else {
                    self.warn(c.offset, format!("<{}> inside <feat> skipped", c.name));
                }
            }
            if nested.is_empty() {
                FeatureValue::Text(String::new())
            } else {
                FeatureValue::Nested(nested)
            }
        } else {
            FeatureValue::Text(text.trim().to_string())
        };
        Ok(Feature {
            cat_type: cat.to_string(),
            value,
        })
    }

    fn alternative(&mut self, e: &Element) -> Result<Alternative, XmlError> {
        self.check_attrs(e, &[]);
        let mut alt = Alternative::default();
        for c in &e.children {
            match c {
                XmlNode::Text(t, off) => self.stray_text(t, *off),
                XmlNode::Element(m) => match m.name.as_str() {
                    "feat" => alt.features.push(self.feature(m)?),
                    "struct" => alt.nodes.push(self.structure(m)?),
                    "alt" | "rel" | "seg" | "brack" | "startsAt" | "endsAt" => {
                        self.warn(m.offset, format!("<{}> inside <alt> skipped", m.name))
                    }
                    _ => {
                        if let Some(f) = self.leaf_feature(m) {
                            alt.features.push(f);
                        }
                    }
                },
            }
        }
        Ok(alt)
    }

    fn seg(&mut self, e: &Element) -> Result<SegmentRef, XmlError> {
        self.check_attrs(
            e,
            &[
                "target",
                "targets",
                "startsAt",
                "endsAt",
                "startPosition",
                "endPosition",
            ],
        );
        let mut ids: Vec<String> = Vec::new();
        for key in ["target", "targets"] {
            if let Some(v) = e.attr(key) {
                ids.extend(v.split_whitespace().map(strip_fragment));
            }
        }
        let start = self.offset_attr(e, "startsAt", "startPosition")?;
        let end = self.offset_attr(e, "endsAt", "endPosition")?;
        let has_ids = e.attr("target").is_some() || e.attr("targets").is_some();
        match (has_ids, start, end) {
            (true, None, None) => Ok(SegmentRef::IdTargets(ids)),
            (true, _, _) => self.fail(e.offset, "<seg> mixes id targets with positional addressing"),
            (false, Some(start), Some(end)) => Ok(SegmentRef::PositionalSpan { start, end }),
            (false, None, None) => self.fail(e.offset, "<seg> has no addressing attributes"),
            (false, _, _) => self.fail(e.offset, "<seg> positional span needs both a start and an end"),
        }
    }

    fn offset_attr(&mut self, e: &Element, name: &str, synonym: &str) -> Result<Option<u64>, XmlError> {
        let raw = match (e.attr(name), e.attr(synonym)) {
            (Some(_), Some(_)) => return self.fail(e.offset, format!("<seg> has both {name} and {synonym}")),
            (Some(v), None) | (None, Some(v)) => v,
            (None, None) => return Ok(None),
        };
        match raw.trim().parse::<u64>() {
            Ok(v) => Ok(Some(v)),
            Err(_) => self.fail(e.offset, format!("{raw:?} is not a non-negative integer offset")),
        }
    }
}
