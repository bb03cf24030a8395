//! Concept-map serialization: DOT, GraphML, and CXL.
//!
//! All exporters are pure functions of `(map, options, registry)` and emit
//! nodes in canonical order and edges in `(subject, label, object)` order,
//! so repeated runs are byte-identical. GraphML is the only format read
//! back; its key schema (and the CXL subset) is documented in
//! `docs/formats.md`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use quick_xml::events::Event;
use quick_xml::Reader;
use thiserror::Error;

use crate::graph::{ConceptMap, Edge, GraphError, MAX_LEVEL};
use crate::registry::RelationRegistry;
use crate::triples::{Concept, PredicateLabel};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ExportFormat {
    #[default]
    Dot,
    GraphML,
    Cxl,
}

impl ExportFormat {
    pub fn parse(name: &str) -> Option<ExportFormat> {
        match name.to_lowercase().as_str() {
            "dot" => Some(ExportFormat::Dot),
            "graphml" => Some(ExportFormat::GraphML),
            "cxl" => Some(ExportFormat::Cxl),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Dot => "dot",
            ExportFormat::GraphML => "graphml",
            ExportFormat::Cxl => "cxl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExportOptions {
    pub format: ExportFormat,
    pub include_provenance: bool,
    pub include_categories: bool,
}

impl ExportOptions {
    pub fn new(format: ExportFormat) -> ExportOptions {
        ExportOptions {
            format,
            include_provenance: false,
            include_categories: false,
        }
    }

    pub fn with_provenance(mut self) -> ExportOptions {
        self.include_provenance = true;
        self
    }

    pub fn with_categories(mut self) -> ExportOptions {
        self.include_categories = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExportError {
    #[error("exporting categories requires a loaded registry")]
    MissingRegistry,
    #[error("not well-formed XML: {0}")]
    Xml(String),
    #[error("graph is missing the required `d_level` attribute")]
    MissingLevel,
    #[error("`d_level` value `{value}` is not a level in 0..={MAX_LEVEL}")]
    InvalidLevel { value: String },
    #[error("node `{id}` is missing its `d_label` value")]
    MissingNodeLabel { id: String },
    #[error("edge references undeclared node `{id}`")]
    DanglingEdgeRef { id: String },
    #[error("edge is missing its `d_elabel` value")]
    MissingEdgeLabel,
    #[error("empty or invalid label `{label}`")]
    BadLabel { label: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Serialize a map. Categories require a registry regardless of format.
pub fn export_map(
    map: &ConceptMap,
    options: &ExportOptions,
    registry: Option<&RelationRegistry>,
) -> Result<String, ExportError> {
    if options.include_categories && registry.is_none() {
        return Err(ExportError::MissingRegistry);
    }
    let categories = |label: &PredicateLabel| -> String {
        registry
            .map(|r| {
                r.classify(label.canonical())
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            })
            .unwrap_or_default()
    };
    match options.format {
        ExportFormat::Dot => Ok(dot_string(map, options, categories)),
        ExportFormat::GraphML => Ok(graphml_string(map, options, categories)),
        ExportFormat::Cxl => Ok(cxl_string(map, options, categories)),
    }
}

fn provenance_field(edge: &Edge) -> String {
    edge.provenance.iter().cloned().collect::<Vec<_>>().join(",")
}

// ---------------------------------------------------------------------------
// DOT
// ---------------------------------------------------------------------------

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn dot_string(
    map: &ConceptMap,
    options: &ExportOptions,
    categories: impl Fn(&PredicateLabel) -> String,
) -> String {
    let mut out = format!("digraph level{} {{\n", map.level());
    for node in map.nodes() {
        let _ = writeln!(out, "  \"{}\";", dot_escape(node.canonical()));
    }
    for edge in map.edges() {
        let mut attrs = format!("label=\"{}\"", dot_escape(edge.label.canonical()));
        if options.include_provenance {
            let _ = write!(attrs, ", prov=\"{}\"", dot_escape(&provenance_field(&edge)));
        }
        if options.include_categories {
            let _ = write!(attrs, ", cat=\"{}\"", dot_escape(&categories(&edge.label)));
        }
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [{}];",
            dot_escape(edge.subject.canonical()),
            dot_escape(edge.object.canonical()),
            attrs
        );
    }
    out.push_str("}\n");
    out
}

// ---------------------------------------------------------------------------
// GraphML
// ---------------------------------------------------------------------------

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            other => out.push(other),
        }
    }
    out
}

fn graphml_string(
    map: &ConceptMap,
    options: &ExportOptions,
    categories: impl Fn(&PredicateLabel) -> String,
) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    for (id, domain, name) in [
        ("d_level", "graph", "level"),
        ("d_label", "node", "label"),
        ("d_display", "node", "display"),
        ("d_elabel", "edge", "label"),
        ("d_prov", "edge", "provenance"),
        ("d_cat", "edge", "categories"),
    ] {
        let ty = if id == "d_level" { "int" } else { "string" };
        let _ = writeln!(
            out,
            "  <key id=\"{id}\" for=\"{domain}\" attr.name=\"{name}\" attr.type=\"{ty}\"/>"
        );
    }
    let _ = writeln!(
        out,
        "  <graph id=\"level{}\" edgedefault=\"directed\">",
        map.level()
    );
    let _ = writeln!(out, "    <data key=\"d_level\">{}</data>", map.level());

    let ids: BTreeMap<&Concept, String> = map
        .nodes()
        .enumerate()
        .map(|(i, n)| (n, format!("n{i}")))
        .collect();
    for node in map.nodes() {
        let _ = writeln!(out, "    <node id=\"{}\">", ids[node]);
        let _ = writeln!(
            out,
            "      <data key=\"d_label\">{}</data>",
            xml_escape(node.canonical())
        );
        if node.display() != node.canonical() {
            let _ = writeln!(
                out,
                "      <data key=\"d_display\">{}</data>",
                xml_escape(node.display())
            );
        }
        out.push_str("    </node>\n");
    }
    for (i, edge) in map.edges().enumerate() {
        let _ = writeln!(
            out,
            "    <edge id=\"e{i}\" source=\"{}\" target=\"{}\">",
            ids[&edge.subject], ids[&edge.object]
        );
        let _ = writeln!(
            out,
            "      <data key=\"d_elabel\">{}</data>",
            xml_escape(edge.label.canonical())
        );
        if options.include_provenance && !edge.provenance.is_empty() {
            let _ = writeln!(
                out,
                "      <data key=\"d_prov\">{}</data>",
                xml_escape(&provenance_field(&edge))
            );
        }
        if options.include_categories {
            let cats = categories(&edge.label);
            if !cats.is_empty() {
                let _ = writeln!(out, "      <data key=\"d_cat\">{}</data>", xml_escape(&cats));
            }
        }
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

/// Read a GraphML document produced by [`export_map`] (or structurally
/// equivalent) back into a [`ConceptMap`].
pub fn import_graphml(input: &str) -> Result<ConceptMap, ExportError> {
    #[derive(Default)]
    struct PendingNode {
        id: String,
        label: Option<String>,
        display: Option<String>,
    }
    #[derive(Default)]
    struct PendingEdge {
        source: String,
        target: String,
        label: Option<String>,
        provenance: BTreeSet<String>,
    }

    let mut reader = Reader::from_str(input);
    reader.trim_text(true);

    let mut level: Option<u8> = None;
    let mut nodes: Vec<PendingNode> = Vec::new();
    let mut edges: Vec<PendingEdge> = Vec::new();

    let mut current_node: Option<PendingNode> = None;
    let mut current_edge: Option<PendingEdge> = None;
    let mut current_key: Option<String> = None;
    let mut buf = Vec::new();

    let xml_err = |e: quick_xml::Error| ExportError::Xml(e.to_string());

    loop {
        match reader.read_event_into(&mut buf).map_err(xml_err)? {
            Event::Eof => break,
            Event::Start(start) | Event::Empty(start) => {
                let name = start.local_name();
                let attr = |key: &str| -> Result<Option<String>, ExportError> {
                    for a in start.attributes() {
                        let a = a.map_err(|e| ExportError::Xml(e.to_string()))?;
                        if a.key.local_name().as_ref() == key.as_bytes() {
                            let value = a
                                .decode_and_unescape_value(&reader)
                                .map_err(|e| ExportError::Xml(e.to_string()))?;
                            return Ok(Some(value.into_owned()));
                        }
                    }
                    Ok(None)
                };
                match name.as_ref() {
                    b"node" => {
                        current_node = Some(PendingNode {
                            id: attr("id")?.unwrap_or_default(),
                            ..Default::default()
                        });
                    }
                    b"edge" => {
                        current_edge = Some(PendingEdge {
                            source: attr("source")?.unwrap_or_default(),
                            target: attr("target")?.unwrap_or_default(),
                            ..Default::default()
                        });
                    }
                    b"data" => {
                        current_key = attr("key")?;
                    }
                    _ => {}
                }
            }
            Event::Text(text) => {
                let value = text
                    .unescape()
                    .map_err(|e| ExportError::Xml(e.to_string()))?
                    .into_owned();
                match current_key.as_deref() {
                    Some("d_level") => {
                        let parsed: u8 = value
                            .trim()
                            .parse()
                            .map_err(|_| ExportError::InvalidLevel { value: value.clone() })?;
                        if parsed > MAX_LEVEL {
                            return Err(ExportError::InvalidLevel { value });
                        }
                        level = Some(parsed);
                    }
                    Some("d_label") => {
                        if let Some(node) = current_node.as_mut() {
                            node.label = Some(value);
                        }
                    }
                    Some("d_display") => {
                        if let Some(node) = current_node.as_mut() {
                            node.display = Some(value);
                        }
                    }
                    Some("d_elabel") => {
                        if let Some(edge) = current_edge.as_mut() {
                            edge.label = Some(value);
                        }
                    }
                    Some("d_prov") => {
                        if let Some(edge) = current_edge.as_mut() {
                            edge.provenance = value
                                .split(',')
                                .map(str::trim)
                                .filter(|s| !s.is_empty())
                                .map(str::to_string)
                                .collect();
                        }
                    }
                    _ => {}
                }
            }
            Event::End(end) => match end.local_name().as_ref() {
                b"node" => {
                    if let Some(node) = current_node.take() {
                        nodes.push(node);
                    }
                }
                b"edge" => {
                    if let Some(edge) = current_edge.take() {
                        edges.push(edge);
                    }
                }
                b"data" => current_key = None,
                _ => {}
            },
            _ => {}
        }
        buf.clear();
    }

    let level = level.ok_or(ExportError::MissingLevel)?;

    let mut by_id: BTreeMap<String, Concept> = BTreeMap::new();
    let mut node_set: BTreeSet<Concept> = BTreeSet::new();
    for node in nodes {
        let label = node.label.ok_or_else(|| ExportError::MissingNodeLabel {
            id: node.id.clone(),
        })?;
        let concept = match &node.display {
            Some(display) => Concept::with_display(&label, None, display),
            None => Concept::from_canonical(&label),
        }
        .map_err(|_| ExportError::BadLabel { label })?;
        node_set.insert(concept.clone());
        by_id.insert(node.id, concept);
    }

    let mut edge_list = Vec::with_capacity(edges.len());
    for edge in edges {
        let subject = by_id
            .get(&edge.source)
            .ok_or_else(|| ExportError::DanglingEdgeRef {
                id: edge.source.clone(),
            })?
            .clone();
        let object = by_id
            .get(&edge.target)
            .ok_or_else(|| ExportError::DanglingEdgeRef {
                id: edge.target.clone(),
            })?
            .clone();
        let label = edge.label.ok_or(ExportError::MissingEdgeLabel)?;
        let label = PredicateLabel::from_canonical(&label)
            .map_err(|_| ExportError::BadLabel { label })?;
        edge_list.push(Edge {
            subject,
            label,
            object,
            provenance: edge.provenance,
        });
    }

    Ok(ConceptMap::from_parts(level, node_set, edge_list)?)
}

// ---------------------------------------------------------------------------
// CXL (concept-map interchange subset)
// ---------------------------------------------------------------------------

// Layout constants for the deterministic appearance grid.
const GRID_X0: usize = 60;
const GRID_Y0: usize = 60;
const GRID_DX: usize = 180;
const GRID_DY: usize = 120;

fn grid_position(index: usize, columns: usize) -> (usize, usize) {
    let col = index % columns;
    let row = index / columns;
    (GRID_X0 + col * GRID_DX, GRID_Y0 + row * GRID_DY)
}

fn cxl_string(
    map: &ConceptMap,
    options: &ExportOptions,
    categories: impl Fn(&PredicateLabel) -> String,
) -> String {
    let node_count = map.node_count().max(1);
    let columns = (node_count as f64).sqrt().ceil() as usize;
    let columns = columns.max(1);

    let ids: BTreeMap<&Concept, String> = map
        .nodes()
        .enumerate()
        .map(|(i, n)| (n, format!("c{}", i + 1)))
        .collect();

    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<cmap xmlns=\"http://cmap.ihmc.us/xml/cmap/\">\n");
    out.push_str("  <map>\n");

    out.push_str("    <concept-list>\n");
    for node in map.nodes() {
        let _ = writeln!(
            out,
            "      <concept id=\"{}\" label=\"{}\"/>",
            ids[node],
            xml_escape(node.canonical())
        );
    }
    out.push_str("    </concept-list>\n");

    // One linking phrase per edge, labeled by the edge's predicate.
    out.push_str("    <linking-phrase-list>\n");
    for (i, edge) in map.edges().enumerate() {
        let _ = write!(
            out,
            "      <linking-phrase id=\"l{}\" label=\"{}\"",
            i + 1,
            xml_escape(edge.label.canonical())
        );
        if options.include_categories {
            let cats = categories(&edge.label);
            let _ = write!(out, " categories=\"{}\"", xml_escape(&cats));
        }
        if options.include_provenance && !edge.provenance.is_empty() {
            let _ = write!(out, " provenance=\"{}\"", xml_escape(&provenance_field(&edge)));
        }
        out.push_str("/>\n");
    }
    out.push_str("    </linking-phrase-list>\n");

    out.push_str("    <connection-list>\n");
    for (i, edge) in map.edges().enumerate() {
        let lp = format!("l{}", i + 1);
        let _ = writeln!(
            out,
            "      <connection id=\"cn{}\" from-id=\"{}\" to-id=\"{}\"/>",
            2 * i + 1,
            ids[&edge.subject],
            lp
        );
        let _ = writeln!(
            out,
            "      <connection id=\"cn{}\" from-id=\"{}\" to-id=\"{}\"/>",
            2 * i + 2,
            lp,
            ids[&edge.object]
        );
    }
    out.push_str("    </connection-list>\n");

    out.push_str("    <concept-appearance-list>\n");
    for (i, node) in map.nodes().enumerate() {
        let (x, y) = grid_position(i, columns);
        let _ = writeln!(
            out,
            "      <concept-appearance id=\"{}\" x=\"{x}\" y=\"{y}\"/>",
            ids[node]
        );
    }
    out.push_str("    </concept-appearance-list>\n");

    // Linking phrases occupy a band below the concept grid.
    let concept_rows = map.node_count().div_ceil(columns);
    out.push_str("    <linking-phrase-appearance-list>\n");
    for (i, _) in map.edges().enumerate() {
        let (x, y) = grid_position(i, columns);
        let y = y + concept_rows * GRID_DY;
        let _ = writeln!(
            out,
            "      <linking-phrase-appearance id=\"l{}\" x=\"{x}\" y=\"{y}\"/>",
            i + 1
        );
    }
    out.push_str("    </linking-phrase-appearance-list>\n");

    out.push_str("  </map>\n</cmap>\n");
    out
}
