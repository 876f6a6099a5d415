//! Minimal element tree over quick-xml events, with source positions.

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct XmlError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub(crate) struct Element {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<XmlNode>,
    /// Byte offset of the opening `<`.
    pub offset: usize,
}

#[derive(Debug, Clone)]
pub(crate) enum XmlNode {
    Element(Element),
    Text(String, usize),
}

impl Element {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|c| match c {
            XmlNode::Element(e) => Some(e),
            XmlNode::Text(..) => None,
        })
    }

    pub fn has_element_children(&self) -> bool {
        self.elements().next().is_some()
    }

    /// Concatenated character data of direct text children.
    pub fn text(&self) -> String {
        self.children
            .iter()
            .filter_map(|c| match c {
                XmlNode::Text(t, _) => Some(t.as_str()),
                XmlNode::Element(_) => None,
            })
            .collect()
    }
}

/// Maps byte offsets to 1-based line and column (in characters).
pub(crate) struct LineIndex<'a> {
    text: &'a str,
    starts: Vec<usize>,
}

impl<'a> LineIndex<'a> {
    pub fn new(text: &'a str) -> Self {
        let mut starts = vec![0];
        starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex { text, starts }
    }

    pub fn locate(&self, offset: usize) -> (usize, usize) {
        let offset = offset.min(self.text.len());
        let line = self.starts.partition_point(|&s| s <= offset);
        let start = self.starts[line - 1];
        let column = self
            .text
            .get(start..offset)
            .map_or(offset - start, |s| s.chars().count())
            + 1;
        (line, column)
    }

    pub fn error(&self, offset: usize, message: impl Into<String>) -> XmlError {
        let (line, column) = self.locate(offset);
        XmlError {
            line,
            column,
            message: message.into(),
        }
    }
}

fn utf8(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn open(start: &BytesStart<'_>, offset: usize, lines: &LineIndex<'_>) -> Result<Element, XmlError> {
    let mut attrs = Vec::new();
    for attr in start.attributes() {
        let attr = attr.map_err(|e| lines.error(offset, format!("bad attribute: {e}")))?;
        let value = attr
            .unescape_value()
            .map_err(|e| lines.error(offset, format!("bad attribute value: {e}")))?;
        attrs.push((utf8(attr.key.as_ref()), value.into_owned()));
    }
    Ok(Element {
        name: utf8(start.name().as_ref()),
        attrs,
        children: Vec::new(),
        offset,
    })
}

/// Parses well-formed XML into its root element. Comments, processing
/// instructions and the declaration are dropped.
pub(crate) fn parse_tree(text: &str) -> Result<Element, XmlError> {
    let lines = LineIndex::new(text);
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(false);
    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;

    loop {
        let offset = reader.buffer_position() as usize;
        let event = reader
            .read_event()
            .map_err(|e| lines.error(reader.error_position() as usize, e.to_string()))?;
        match event {
            Event::Start(s) => {
                if root.is_some() && stack.is_empty() {
                    return Err(lines.error(offset, "content after the root element"));
                }
                stack.push(open(&s, offset, &lines)?);
            }
            Event::Empty(s) => {
                let el = open(&s, offset, &lines)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(XmlNode::Element(el)),
                    None if root.is_none() => root = Some(el),
                    None => return Err(lines.error(offset, "content after the root element")),
                }
            }
            Event::End(_) => {
                let el = stack.pop().expect("quick-xml checks end tags");
                match stack.last_mut() {
                    Some(parent) => parent.children.push(XmlNode::Element(el)),
                    None => root = Some(el),
                }
            }
            Event::Text(t) => {
                let s = t.unescape().map_err(|e| lines.error(offset, e.to_string()))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(XmlNode::Text(s.into_owned(), offset)),
                    None if s.trim().is_empty() => {}
                    None => return Err(lines.error(offset, "text outside the root element")),
                }
            }
            Event::CData(c) => {
                let s = utf8(&c.into_inner());
                match stack.last_mut() {
                    Some(parent) => parent.children.push(XmlNode::Text(s, offset)),
                    None => return Err(lines.error(offset, "text outside the root element")),
                }
            }
            Event::Eof => break,
            Event::Comment(_) | Event::Decl(_) | Event::PI(_) | Event::DocType(_) => {}
        }
    }
    if let Some(open) = stack.last() {
        return Err(lines.error(text.len(), format!("unclosed element <{}>", open.name)));
    }
    root.ok_or_else(|| lines.error(text.len(), "no root element"))
}
