//! Structural validation of a [`GmtDocument`].

use std::collections::HashSet;
use std::fmt;

use rust_decimal::Decimal;

use crate::exec::Exec;
use crate::model::{
    parse_decimal, AltSet, Feature, FeatureValue, GmtDocument, NodeItem, NodePath, SegmentRef, StructNode, CONFIDENCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "WARNING",
            Severity::Error => "ERROR",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    pub code: &'static str,
    pub path: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}\t{}", self.severity, self.code, self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn first_error(&self) -> Option<&Finding> {
        self.errors().next()
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.findings.extend(other.findings);
    }

    pub(crate) fn push(
        &mut self,
        severity: Severity,
        code: &'static str,
        path: impl ToString,
        message: impl Into<String>,
    ) {
        self.findings.push(Finding {
            severity,
            code,
            path: path.to_string(),
            message: message.into(),
        });
    }

    pub(crate) fn error(&mut self, code: &'static str, path: impl ToString, message: impl Into<String>) {
        self.push(Severity::Error, code, path, message)
    }

    /// One line per finding, `SEVERITY<TAB>CODE<TAB>path<TAB>message`.
    pub fn render(&self) -> String {
        self.findings.iter().map(|f| format!("{f}\n")).collect()
    }
}

/// An identifier usable as a pointer target: non-empty, no whitespace, no
/// leading `#` (which the XML surface reserves for fragment syntax).
pub fn is_valid_identifier(id: &str) -> bool {
    !id.is_empty() && !id.starts_with('#') && !id.chars().any(char::is_whitespace) && is_xml_text(id)
}

/// Characters allowed in XML 1.0 character data.
pub fn is_xml_text(s: &str) -> bool {
    s.chars()
        .all(|c| matches!(c, '\t' | '\n' | '\r' | '\u{20}'..='\u{D7FF}' | '\u{E000}'..='\u{FFFD}' | '\u{10000}'..))
}

/// Checks every model invariant and reports one finding per violation,
/// in document order.
/// [`validate_structure`] over many documents, reports in input order.
pub fn validate_all(docs: &[GmtDocument], exec: Exec) -> Vec<ValidationReport> {
    exec.map(docs, validate_structure)
}

pub fn validate_structure(doc: &GmtDocument) -> ValidationReport {
    let mut v = Validator {
        report: ValidationReport::default(),
        seen_ids: HashSet::new(),
    };
    if !is_xml_text(&doc.doc_type) {
        v.report.error(
            "INVALID_CHARACTER",
            "/",
            "document type contains characters not allowed in XML",
        );
    }
    for (i, root) in doc.roots.iter().enumerate() {
        v.node(root, &NodePath::root().child("struct", i + 1));
    }
    v.report
}

struct Validator<'a> {
    report: ValidationReport,
    seen_ids: HashSet<&'a str>,
}

impl<'a> Validator<'a> {
    fn identifier(&mut self, id: &str, path: &NodePath, what: &str) {
        if !is_valid_identifier(id) {
            self.report.error(
                "INVALID_IDENTIFIER",
                path,
                format!("{what} {id:?} is not a valid identifier"),
            );
        }
    }

    fn text(&mut self, s: &str, path: &NodePath, what: &str) {
        if !is_xml_text(s) {
            self.report.error(
                "INVALID_CHARACTER",
                path,
                format!("{what} contains characters not allowed in XML"),
            );
        }
    }

    fn node(&mut self, node: &'a StructNode, path: &NodePath) {
        if let Some(id) = node.id.as_deref() {
            if id.is_empty() {
                self.report.error("EMPTY_ID", path, "node id is empty");
            } else {
                self.identifier(id, path, "node id");
                if !self.seen_ids.insert(id) {
                    self.report
                        .error("DUPLICATE_ID", path, format!("id {id:?} is already used"));
                }
            }
        }
        if let Some(t) = &node.node_type {
            self.text(t, path, "node type");
        }
        if let Some(r) = &node.ref_target {
            self.identifier(r, path, "ref");
        }
        let mut alt_no = 0;
        self.items(&node.items, path, &mut alt_no);
        for (i, child) in node.children.iter().enumerate() {
            self.node(child, &path.child("struct", i + 1));
        }
    }

    fn items(&mut self, items: &'a [NodeItem], path: &NodePath, alt_no: &mut usize) {
        let mut counts = [0usize; 4];
        let mut prev_alt = false;
        for item in items {
            let is_alt = matches!(item, NodeItem::AltSet(_));
            if is_alt && prev_alt {
                self.report.error(
                    "ADJACENT_ALTSETS",
                    path,
                    "two alternative sets directly follow each other and would read back as one",
                );
            }
            prev_alt = is_alt;
            match item {
                NodeItem::Feature(f) => {
                    counts[0] += 1;
                    self.feature(f, &path.child("feat", counts[0]));
                }
                NodeItem::AltSet(set) => self.alt_set(set, path, alt_no),
                NodeItem::Relation(r) => {
                    counts[1] += 1;
                    let p = path.child("rel", counts[1]);
                    self.identifier(&r.target, &p, "relation target");
                    if let Some(t) = &r.rel_type {
                        self.text(t, &p, "relation type");
                    }
                }
                NodeItem::Seg(seg) => {
                    counts[2] += 1;
                    self.seg(seg, &path.child("seg", counts[2]));
                }
                NodeItem::Bracket(b) => {
                    counts[3] += 1;
                    self.items(&b.members, &path.child("brack", counts[3]), alt_no);
                }
            }
        }
    }

    fn feature(&mut self, f: &Feature, path: &NodePath) {
        self.text(&f.cat_type, path, "category");
        match &f.value {
            FeatureValue::Text(s) => {
                self.text(s, path, "value");
                if s.trim() != s {
                    self.report.error(
                        "UNTRIMMED_VALUE",
                        path,
                        format!("value of {} has surrounding whitespace", f.cat_type),
                    );
                }
            }
            FeatureValue::Target(t) => self.identifier(t, path, "feature target"),
            FeatureValue::Nested(inner) => {
                if inner.is_empty() {
                    self.report.error(
                        "EMPTY_NESTED_FEATURE",
                        path,
                        format!("{} has a nested value with no features", f.cat_type),
                    );
                }
                for (i, g) in inner.iter().enumerate() {
                    self.feature(g, &path.child("feat", i + 1));
                }
            }
        }
    }

    fn alt_set(&mut self, set: &'a AltSet, path: &NodePath, alt_no: &mut usize) {
        if set.alternatives.len() < 2 {
            self.report.error(
                "ALT_SINGLETON",
                path.child("alt", *alt_no + 1),
                format!(
                    "alternative set has {} alternative(s), at least 2 required",
                    set.alternatives.len()
                ),
            );
        }
        for alt in &set.alternatives {
            *alt_no += 1;
            let alt_path = path.child("alt", *alt_no);
            for (i, f) in alt.features.iter().enumerate() {
                let fp = alt_path.child("feat", i + 1);
                self.feature(f, &fp);
                if f.cat_type == CONFIDENCE {
                    let ok = f
                        .as_text()
                        .and_then(parse_decimal)
                        .is_some_and(|d| d >= Decimal::ZERO && d <= Decimal::ONE);
                    if !ok {
                        self.report
                            .error("BAD_CONFIDENCE", &fp, "confidence must be a decimal between 0 and 1");
                    }
                }
            }
            for (j, n) in alt.nodes.iter().enumerate() {
                self.node(n, &alt_path.child("struct", j + 1));
            }
        }
    }

    fn seg(&mut self, seg: &SegmentRef, path: &NodePath) {
        match seg {
            SegmentRef::IdTargets(ids) => {
                if ids.is_empty() {
                    self.report.error("EMPTY_TARGETS", path, "segment has no targets");
                }
                let mut seen = HashSet::new();
                for id in ids {
                    self.identifier(id, path, "segment target");
                    if !seen.insert(id) {
                        self.report
                            .error("DUPLICATE_TARGET", path, format!("target {id:?} listed more than once"));
                    }
                }
            }
            SegmentRef::PositionalSpan { start, end } => {
                if start > end {
                    self.report
                        .error("INVERTED_SPAN", path, format!("start {start} is after end {end}"));
                }
            }
            SegmentRef::LandmarkEndpoints { start, end } => {
                self.identifier(start, path, "start landmark");
                self.identifier(end, path, "end landmark");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Alternative, Relation};

    fn w(id: &str) -> StructNode {
        StructNode::new("W-level").with_id(id).with_feature("pos", "NOUN")
    }

    #[test]
    fn empty_document_is_valid() {
        assert!(validate_structure(&GmtDocument::new("MSAnnot")).is_empty());
    }

    #[test]
    fn duplicate_id_reported_once_at_second_use() {
        let doc =
            GmtDocument::new("MSAnnot").with_root(StructNode::new("MSAnnot").with_child(w("w1")).with_child(w("w1")));
        let r = validate_structure(&doc);
        assert_eq!(r.findings.len(), 1);
        assert_eq!(r.findings[0].code, "DUPLICATE_ID");
        assert_eq!(r.findings[0].path, "/struct[1]/struct[2]");
    }

    #[test]
    fn segment_invariants() {
        let node = StructNode::new("x")
            .with_seg(SegmentRef::IdTargets(vec![]))
            .with_seg(SegmentRef::IdTargets(vec!["a".into(), "a".into()]))
            .with_seg(SegmentRef::PositionalSpan { start: 9, end: 3 })
            .with_seg(SegmentRef::single("has space"));
        let codes: Vec<_> = validate_structure(&GmtDocument::new("x").with_root(node))
            .findings
            .iter()
            .map(|f| f.code)
            .collect();
        assert_eq!(
            codes,
            [
                "EMPTY_TARGETS",
                "DUPLICATE_TARGET",
                "INVERTED_SPAN",
                "INVALID_IDENTIFIER"
            ]
        );
    }

    #[test]
    fn alternative_invariants() {
        let one = AltSet {
            alternatives: vec![Alternative::default()],
        };
        let bad_conf = AltSet {
            alternatives: vec![
                Alternative {
                    features: vec![Feature::text("confidence", "1.4")],
                    nodes: vec![],
                },
                Alternative {
                    features: vec![Feature::text("confidence", "high")],
                    nodes: vec![],
                },
            ],
        };
        let node = StructNode::new("x")
            .with_item(NodeItem::AltSet(one))
            .with_item(NodeItem::Relation(Relation {
                rel_type: None,
                target: "t".into(),
            }))
            .with_item(NodeItem::AltSet(bad_conf));
        let r = validate_structure(&GmtDocument::new("x").with_root(node));
        let codes: Vec<_> = r.findings.iter().map(|f| f.code).collect();
        assert_eq!(codes, ["ALT_SINGLETON", "BAD_CONFIDENCE", "BAD_CONFIDENCE"]);
        assert_eq!(r.findings[1].path, "/struct[1]/alt[2]/feat[1]");
    }

    #[test]
    fn adjacent_alt_sets_flagged() {
        let two = || {
            NodeItem::AltSet(AltSet {
                alternatives: vec![Alternative::default(), Alternative::default()],
            })
        };
        let node = StructNode::new("x").with_item(two()).with_item(two());
        let r = validate_structure(&GmtDocument::new("x").with_root(node));
        assert_eq!(
            r.findings.iter().map(|f| f.code).collect::<Vec<_>>(),
            ["ADJACENT_ALTSETS"]
        );
    }

    #[test]
    fn feature_value_shape() {
        let node = StructNode::new("x")
            .with_item(NodeItem::Feature(Feature::nested("agr", vec![])))
            .with_item(NodeItem::Feature(Feature::text("lemma", " padded ")));
        let codes: Vec<_> = validate_structure(&GmtDocument::new("x").with_root(node))
            .findings
            .iter()
            .map(|f| f.code)
            .collect();
        assert_eq!(codes, ["EMPTY_NESTED_FEATURE", "UNTRIMMED_VALUE"]);
    }

    #[test]
    fn render_is_tab_separated() {
        let mut r = ValidationReport::default();
        r.error("DUPLICATE_ID", "/struct[1]", "id \"w1\" is already used");
        assert_eq!(
            r.render(),
            "ERROR\tDUPLICATE_ID\t/struct[1]\tid \"w1\" is already used\n"
        );
    }
}
