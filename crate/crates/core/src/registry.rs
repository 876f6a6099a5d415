//! Data category registry.
//!
//! Categories are declared one per line:
//!
//! ```text
//! name [parent=<name>] kind=<open|set:a,b,c|range:lo..hi|ref> [alias=x,y]
//! ```
//!
//! Each category has at most one parent. A category declared without
//! `kind=` inherits the value constraint of its nearest ancestor that has
//! one. Aliases map scheme-specific names onto the canonical category.

use std::collections::{BTreeMap, HashMap};

use rust_decimal::Decimal;
use thiserror::Error;

use crate::model::{parse_decimal, Feature, FeatureValue, GmtDocument, NodeItem, NodePath};
use crate::validate::ValidationReport;

/// Registry shipped with the crate.
pub const DEFAULT_REGISTRY: &str = include_str!("../data/default.registry");

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueKind {
    OpenText,
    ClosedSet(Vec<String>),
    DecimalRange(Decimal, Decimal),
    Reference,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryDef {
    pub name: String,
    pub parent: Option<String>,
    /// Declared constraint; `None` means inherited.
    pub kind: Option<ValueKind>,
    pub aliases: Vec<String>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: category {name:?} already defined")]
    DuplicateName { line: usize, name: String },
    #[error("line {line}: alias {alias:?} already names a category")]
    DuplicateAlias { line: usize, alias: String },
    #[error("line {line}: parent {parent:?} of {name:?} is not defined")]
    UnknownParent { line: usize, name: String, parent: String },
    #[error("line {line}: inheritance cycle through {name:?}")]
    Cycle { line: usize, name: String },
    #[error("unknown category {0:?}")]
    UnknownCategory(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Registry {
    defs: BTreeMap<String, CategoryDef>,
    aliases: HashMap<String, String>,
}

fn parse_kind(raw: &str) -> Option<ValueKind> {
    match raw {
        "open" => return Some(ValueKind::OpenText),
        "ref" => return Some(ValueKind::Reference),
        _ => {}
    }
    if let Some(list) = raw.strip_prefix("set:") {
        let values: Vec<String> = list.split(',').map(str::to_string).collect();
        if values.iter().any(String::is_empty) {
            return None;
        }
        return Some(ValueKind::ClosedSet(values));
    }
    let (lo, hi) = raw.strip_prefix("range:")?.split_once("..")?;
    let (lo, hi) = (parse_decimal(lo)?, parse_decimal(hi)?);
    (lo <= hi).then_some(ValueKind::DecimalRange(lo, hi))
}

fn parse_line(line: &str, line_no: usize) -> Result<CategoryDef, RegistryError> {
    let malformed = |message: String| RegistryError::Malformed { line: line_no, message };
    let mut tokens = line.split_whitespace();
    let name = tokens.next().expect("caller skips blank lines");
    if name.contains('=') {
        return Err(malformed(format!("expected a category name, found {name:?}")));
    }
    let mut def = CategoryDef {
        name: name.to_string(),
        parent: None,
        kind: None,
        aliases: Vec::new(),
        line: line_no,
    };
    let mut seen_alias = false;
    for tok in tokens {
        let Some((key, value)) = tok.split_once('=') else {
            return Err(malformed(format!("expected key=value, found {tok:?}")));
        };
        match key {
            "parent" if def.parent.is_none() && !value.is_empty() => def.parent = Some(value.to_string()),
            "kind" if def.kind.is_none() => {
                def.kind = Some(parse_kind(value).ok_or_else(|| malformed(format!("bad kind {value:?}")))?)
            }
            "alias" if !seen_alias => {
                seen_alias = true;
                def.aliases = value.split(',').map(str::to_string).collect();
                if def.aliases.iter().any(String::is_empty) {
                    return Err(malformed("empty alias".into()));
                }
            }
            "parent" | "kind" | "alias" => return Err(malformed(format!("{key}= repeated or empty"))),
            _ => return Err(malformed(format!("unknown key {key:?}"))),
        }
    }
    if def.kind.is_none() && def.parent.is_none() {
        return Err(malformed(format!(
            "{name} needs a kind or a parent to inherit one from"
        )));
    }
    Ok(def)
}

impl Registry {
    /// Parses a registry file and checks names, aliases, parents and
    /// acyclicity.
    pub fn parse(text: &str) -> Result<Self, RegistryError> {
        let mut defs: BTreeMap<String, CategoryDef> = BTreeMap::new();
        let mut order = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let def = parse_line(line, n + 1)?;
            if defs.contains_key(&def.name) {
                return Err(RegistryError::DuplicateName {
                    line: def.line,
                    name: def.name,
                });
            }
            order.push(def.name.clone());
            defs.insert(def.name.clone(), def);
        }

        let mut aliases = HashMap::new();
        for name in &order {
            let def = &defs[name];
            for alias in &def.aliases {
                if defs.contains_key(alias) || aliases.insert(alias.clone(), name.clone()).is_some() {
                    return Err(RegistryError::DuplicateAlias {
                        line: def.line,
                        alias: alias.clone(),
                    });
                }
            }
        }

        for name in &order {
            let def = &defs[name];
            if let Some(p) = &def.parent {
                if !defs.contains_key(p) {
                    return Err(RegistryError::UnknownParent {
                        line: def.line,
                        name: name.clone(),
                        parent: p.clone(),
                    });
                }
            }
        }

        // Every chain must reach a root within |defs| steps.
        for name in &order {
            let mut cur = &defs[name];
            for _ in 0..=defs.len() {
                match &cur.parent {
                    Some(p) => cur = &defs[p],
                    None => break,
                }
            }
            if cur.parent.is_some() {
                return Err(RegistryError::Cycle {
                    line: defs[name].line,
                    name: name.clone(),
                });
            }
        }

        Ok(Registry { defs, aliases })
    }

    pub fn default_registry() -> Self {
        Registry::parse(DEFAULT_REGISTRY).expect("bundled registry is valid")
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn categories(&self) -> impl Iterator<Item = &CategoryDef> {
        self.defs.values()
    }

    /// Canonical name for a category name or alias.
    pub fn canonical<'a>(&'a self, name: &'a str) -> Option<&'a str> {
        if self.defs.contains_key(name) {
            Some(name)
        } else {
            self.aliases.get(name).map(String::as_str)
        }
    }

    pub fn get(&self, name: &str) -> Option<&CategoryDef> {
        self.canonical(name).and_then(|c| self.defs.get(c))
    }

    /// The category followed by its ancestors, nearest first.
    pub fn lineage(&self, name: &str) -> Vec<&CategoryDef> {
        let mut out = Vec::new();
        let mut cur = self.get(name);
        while let Some(def) = cur {
            out.push(def);
            cur = def.parent.as_deref().and_then(|p| self.defs.get(p));
        }
        out
    }

    /// Declared or inherited value constraint.
    pub fn value_kind(&self, name: &str) -> Option<&ValueKind> {
        self.lineage(name).into_iter().find_map(|d| d.kind.as_ref())
    }

    /// Whether `ancestor` is `child` or one of its ancestors.
    pub fn is_subcategory(&self, child: &str, ancestor: &str) -> Result<bool, RegistryError> {
        let target = self
            .canonical(ancestor)
            .ok_or_else(|| RegistryError::UnknownCategory(ancestor.to_string()))?;
        if self.get(child).is_none() {
            return Err(RegistryError::UnknownCategory(child.to_string()));
        }
        Ok(self.lineage(child).iter().any(|d| d.name == target))
    }
}

pub fn load_registry(text: &str) -> Result<Registry, RegistryError> {
    Registry::parse(text)
}

pub fn is_subcategory(registry: &Registry, child: &str, ancestor: &str) -> Result<bool, RegistryError> {
    registry.is_subcategory(child, ancestor)
}

/// Checks every feature's category and value against the registry. Node
/// types are not checked.
pub fn validate_categories(doc: &GmtDocument, registry: &Registry) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (path, node) in doc.walk() {
        let mut feat_no = 0;
        let mut alt_no = 0;
        check_items(&node.items, &path, registry, &mut report, &mut feat_no, &mut alt_no);
    }
    report
}

fn check_items(
    items: &[NodeItem],
    path: &NodePath,
    registry: &Registry,
    report: &mut ValidationReport,
    feat_no: &mut usize,
    alt_no: &mut usize,
) {
    let mut brack_no = 0;
    for item in items {
        match item {
            NodeItem::Feature(f) => {
                *feat_no += 1;
                check_feature(f, &path.child("feat", *feat_no), registry, report);
            }
            NodeItem::AltSet(set) => {
                for alt in &set.alternatives {
                    *alt_no += 1;
                    let alt_path = path.child("alt", *alt_no);
                    for (i, f) in alt.features.iter().enumerate() {
                        check_feature(f, &alt_path.child("feat", i + 1), registry, report);
                    }
                }
            }
            NodeItem::Bracket(b) => {
                brack_no += 1;
                let mut f = 0;
                check_items(
                    &b.members,
                    &path.child("brack", brack_no),
                    registry,
                    report,
                    &mut f,
                    alt_no,
                );
            }
            NodeItem::Relation(_) | NodeItem::Seg(_) => {}
        }
    }
}

fn check_feature(f: &Feature, path: &NodePath, registry: &Registry, report: &mut ValidationReport) {
    let Some(def) = registry.get(&f.cat_type) else {
        report.error(
            "UNKNOWN_CATEGORY",
            path,
            format!("category {:?} is not registered", f.cat_type),
        );
        if let FeatureValue::Nested(inner) = &f.value {
            for (i, g) in inner.iter().enumerate() {
                check_feature(g, &path.child("feat", i + 1), registry, report);
            }
        }
        return;
    };
    let name = &def.name;
    let kind = registry.value_kind(name).expect("roots always declare a kind");
    match (&f.value, kind) {
        (FeatureValue::Target(_), _) => {}
        (FeatureValue::Text(_), ValueKind::OpenText) => {}
        (FeatureValue::Text(v), ValueKind::ClosedSet(allowed)) => {
            if !allowed.contains(v) {
                report.error(
                    "VALUE_NOT_ALLOWED",
                    path,
                    format!("{v:?} is not an allowed value of {name}"),
                );
            }
        }
        (FeatureValue::Text(v), ValueKind::DecimalRange(lo, hi)) => match parse_decimal(v) {
            Some(d) if d >= *lo && d <= *hi => {}
            Some(_) => report.error(
                "VALUE_OUT_OF_RANGE",
                path,
                format!("{v} is outside {lo}..{hi} for {name}"),
            ),
            None => report.error("VALUE_KIND_MISMATCH", path, format!("{v:?} is not a decimal ({name})")),
        },
        (FeatureValue::Text(_), ValueKind::Reference) => report.error(
            "VALUE_KIND_MISMATCH",
            path,
            format!("{name} takes a target reference, not text"),
        ),
        (FeatureValue::Nested(_), ValueKind::OpenText | ValueKind::Reference) => {}
        (FeatureValue::Nested(_), _) => report.error(
            "VALUE_KIND_MISMATCH",
            path,
            format!("{name} takes a single value, not nested features"),
        ),
    }
    if let FeatureValue::Nested(inner) = &f.value {
        for (i, g) in inner.iter().enumerate() {
            check_feature(g, &path.child("feat", i + 1), registry, report);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StructNode;

    #[test]
    fn default_registry_loads() {
        let r = Registry::default_registry();
        assert!(r.len() >= 7);
        for name in ["lemma", "pos", "confidence", "gender", "number", "tense", "person"] {
            assert!(r.get(name).is_some(), "{name}");
        }
        assert_eq!(
            r.value_kind("pos"),
            Some(&ValueKind::ClosedSet(
                ["PNOUN", "VERB", "DET", "NOUN", "PREP"].map(String::from).to_vec()
            ))
        );
    }

    #[test]
    fn empty_file_is_empty_registry() {
        assert!(Registry::parse("").unwrap().is_empty());
        assert!(Registry::parse("# only a comment\n\n").unwrap().is_empty());
        let r = Registry::parse("phone kind=set:h#,sh").unwrap();
        assert_eq!(
            r.value_kind("phone"),
            Some(&ValueKind::ClosedSet(vec!["h#".into(), "sh".into()]))
        );
    }

    #[test]
    fn load_errors_carry_line_numbers() {
        let cases = [
            (
                "a parent=b\nb parent=a\n",
                RegistryError::Cycle {
                    line: 1,
                    name: "a".into(),
                },
            ),
            (
                "a kind=open\na kind=open",
                RegistryError::DuplicateName {
                    line: 2,
                    name: "a".into(),
                },
            ),
            (
                "a parent=zz",
                RegistryError::UnknownParent {
                    line: 1,
                    name: "a".into(),
                    parent: "zz".into(),
                },
            ),
            (
                "a kind=open alias=x\nb kind=open alias=x",
                RegistryError::DuplicateAlias {
                    line: 2,
                    alias: "x".into(),
                },
            ),
            (
                "a kind=open alias=b\nb kind=open",
                RegistryError::DuplicateAlias {
                    line: 1,
                    alias: "b".into(),
                },
            ),
        ];
        for (text, expected) in cases {
            assert_eq!(Registry::parse(text).unwrap_err(), expected, "{text}");
        }
        for bad in [
            "a",
            "a kind=set:",
            "a kind=range:2..1",
            "a kind=open colour=red",
            "a kind=open kind=ref",
            "kind=open",
        ] {
            assert!(
                matches!(Registry::parse(bad), Err(RegistryError::Malformed { line: 1, .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn subcategory_walks_parents_and_aliases() {
        let r = Registry::parse("pos kind=set:NOUN alias=POS\nproperNoun parent=pos\nlemma kind=open").unwrap();
        assert!(r.is_subcategory("pos", "pos").unwrap());
        assert!(r.is_subcategory("properNoun", "pos").unwrap());
        assert!(!r.is_subcategory("pos", "properNoun").unwrap());
        assert!(r.is_subcategory("POS", "pos").unwrap());
        assert!(!r.is_subcategory("lemma", "pos").unwrap());
        assert_eq!(
            r.is_subcategory("nope", "pos"),
            Err(RegistryError::UnknownCategory("nope".into()))
        );
        assert_eq!(r.value_kind("properNoun"), r.value_kind("pos"));
    }

    #[test]
    fn category_findings() {
        let r = Registry::default_registry();
        let node = StructNode::new("W-level")
            .with_feature("colour", "red")
            .with_feature("pos", "ADJ")
            .with_feature("POS", "NOUN")
            .with_item(NodeItem::AltSet(crate::model::AltSet {
                alternatives: vec![
                    crate::model::Alternative {
                        features: vec![Feature::text("confidence", "1.4")],
                        nodes: vec![],
                    },
                    crate::model::Alternative {
                        features: vec![Feature::text("confidence", "x")],
                        nodes: vec![],
                    },
                ],
            }));
        let report = validate_categories(&GmtDocument::new("x").with_root(node), &r);
        let codes: Vec<_> = report.findings.iter().map(|f| f.code).collect();
        assert_eq!(
            codes,
            [
                "UNKNOWN_CATEGORY",
                "VALUE_NOT_ALLOWED",
                "VALUE_OUT_OF_RANGE",
                "VALUE_KIND_MISMATCH"
            ]
        );
        assert_eq!(report.findings[2].path, "/struct[1]/alt[1]/feat[1]");
    }

    #[test]
    fn node_types_are_not_checked() {
        let doc = GmtDocument::new("anything").with_root(StructNode::new("not-a-category"));
        assert!(validate_categories(&doc, &Registry::default()).is_empty());
    }
}
