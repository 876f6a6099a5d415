//! Model → canonical GMT XML.

use std::fmt::Write;

use thiserror::Error;

use super::CONTAINER;
use crate::model::{Alternative, Feature, FeatureValue, GmtDocument, NodeItem, SegmentRef, StructNode};
use crate::validate::{validate_structure, Finding};

pub(crate) const DECLARATION: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("document is not serializable: {0}")]
pub struct SerializeError(pub Finding);

pub(crate) fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            _ => out.push(c),
        }
    }
    out
}

pub(crate) fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\t' => out.push_str("&#9;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            _ => out.push(c),
        }
    }
    out
}

/// Serializes a structurally valid document in canonical form: UTF-8 with
/// declaration, two-space indentation, fixed attribute order, a node's items
/// before its child nodes.
pub fn serialize_gmt(doc: &GmtDocument) -> Result<String, SerializeError> {
    if let Some(err) = validate_structure(doc).first_error() {
        return Err(SerializeError(err.clone()));
    }
    Ok(write_document(doc))
}

pub(crate) fn write_document(doc: &GmtDocument) -> String {
    let mut w = Writer {
        out: String::from(DECLARATION),
    };
    match doc.roots.as_slice() {
        [root] if root.node_type.as_deref().unwrap_or("") == doc.doc_type => w.node(root, 0),
        roots => {
            let attrs = if doc.doc_type.is_empty() {
                vec![]
            } else {
                vec![("type", doc.doc_type.as_str())]
            };
            w.open(CONTAINER, &attrs, 0, roots.is_empty());
            for r in roots {
                w.node(r, 1);
            }
            if !roots.is_empty() {
                w.close(CONTAINER, 0);
            }
        }
    }
    w.out
}

struct Writer {
    out: String,
}

impl Writer {
    fn indent(&mut self, depth: usize) {
        for _ in 0..depth {
            self.out.push_str("  ");
        }
    }

    fn start_tag(&mut self, name: &str, attrs: &[(&str, &str)], depth: usize) {
        self.indent(depth);
        self.out.push('<');
        self.out.push_str(name);
        for (k, v) in attrs {
            let _ = write!(self.out, " {k}=\"{}\"", escape_attr(v));
        }
    }

    fn open(&mut self, name: &str, attrs: &[(&str, &str)], depth: usize, empty: bool) {
        self.start_tag(name, attrs, depth);
        self.out.push_str(if empty { "/>\n" } else { ">\n" });
    }

    fn close(&mut self, name: &str, depth: usize) {
        self.indent(depth);
        let _ = writeln!(self.out, "</{name}>");
    }

    fn node(&mut self, node: &StructNode, depth: usize) {
        let mut attrs = Vec::new();
        if let Some(t) = &node.node_type {
            attrs.push(("type", t.as_str()));
        }
        if let Some(id) = &node.id {
            attrs.push(("id", id.as_str()));
        }
        let fragment;
        if let Some(r) = &node.ref_target {
            fragment = format!("#{r}");
            attrs.push(("ref", fragment.as_str()));
        }
        let empty = node.items.is_empty() && node.children.is_empty();
        self.open("struct", &attrs, depth, empty);
        if empty {
            return;
        }
        self.items(&node.items, depth + 1);
        for child in &node.children {
            self.node(child, depth + 1);
        }
        self.close("struct", depth);
    }

    fn items(&mut self, items: &[NodeItem], depth: usize) {
        for item in items {
            match item {
                NodeItem::Feature(f) => self.feature(f, depth),
                NodeItem::AltSet(set) => set.alternatives.iter().for_each(|a| self.alternative(a, depth)),
                NodeItem::Relation(r) => {
                    let target = format!("#{}", r.target);
                    let mut attrs = Vec::new();
                    if let Some(t) = &r.rel_type {
                        attrs.push(("type", t.as_str()));
                    }
                    attrs.push(("target", target.as_str()));
                    self.open("rel", &attrs, depth, true);
                }
                NodeItem::Seg(seg) => self.seg(seg, depth),
                NodeItem::Bracket(b) => {
                    self.open("brack", &[], depth, b.members.is_empty());
                    if !b.members.is_empty() {
                        self.items(&b.members, depth + 1);
                        self.close("brack", depth);
                    }
                }
            }
        }
    }

    fn feature(&mut self, f: &Feature, depth: usize) {
        match &f.value {
            FeatureValue::Text(s) if s.is_empty() => self.open("feat", &[("type", &f.cat_type)], depth, true),
            FeatureValue::Text(s) => {
                self.start_tag("feat", &[("type", &f.cat_type)], depth);
                let _ = writeln!(self.out, ">{}</feat>", escape_text(s));
            }
            FeatureValue::Target(t) => {
                let target = format!("#{t}");
                self.open("feat", &[("type", &f.cat_type), ("target", &target)], depth, true);
            }
            FeatureValue::Nested(inner) => {
                self.open("feat", &[("type", &f.cat_type)], depth, inner.is_empty());
                if !inner.is_empty() {
                    inner.iter().for_each(|g| self.feature(g, depth + 1));
                    self.close("feat", depth);
                }
            }
        }
    }

    fn alternative(&mut self, alt: &Alternative, depth: usize) {
        let empty = alt.features.is_empty() && alt.nodes.is_empty();
        self.open("alt", &[], depth, empty);
        if empty {
            return;
        }
        alt.features.iter().for_each(|f| self.feature(f, depth + 1));
        alt.nodes.iter().for_each(|n| self.node(n, depth + 1));
        self.close("alt", depth);
    }

    fn seg(&mut self, seg: &SegmentRef, depth: usize) {
        match seg {
            SegmentRef::IdTargets(ids) if ids.len() == 1 => {
                let target = format!("#{}", ids[0]);
                self.open("seg", &[("target", &target)], depth, true);
            }
            SegmentRef::IdTargets(ids) => {
                let joined = ids.join(" ");
                self.open("seg", &[("targets", &joined)], depth, true);
            }
            SegmentRef::PositionalSpan { start, end } => {
                let (s, e) = (start.to_string(), end.to_string());
                self.open("seg", &[("startsAt", &s), ("endsAt", &e)], depth, true);
            }
            SegmentRef::LandmarkEndpoints { start, end } => {
                let (s, e) = (format!("#{start}"), format!("#{end}"));
                self.open("startsAt", &[("target", &s)], depth, true);
                self.open("endsAt", &[("target", &e)], depth, true);
            }
        }
    }
}
