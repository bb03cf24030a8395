//! Concept maps and the operations that move them between levels.
//!
//! A [`ConceptMap`] is a directed labeled graph at one level of the
//! conceptual structure. Level 0 is built straight from triples; levels 1–3
//! come from contracting the previous level through a [`GroupAssignment`]:
//! every concept of the source map is assigned to a group, each group
//! becomes one node of the next level, and only relations that cross group
//! boundaries survive.
//!
//! Maps are immutable values — every operation returns a new map. Edges are
//! keyed by `(subject, label, object)`, so parallel edges with different
//! labels coexist, and duplicate propositions merge their provenance sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::registry::{RegistryError, RelationRegistry};
use crate::taxonomy::SemanticCategory;
use crate::triples::{Concept, PredicateLabel, Triple, TripleError};

/// Highest level of a conceptual structure: the single context concept.
pub const MAX_LEVEL: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("cannot build a level-0 map from an empty triple sequence")]
    EmptyTriples,
    #[error("self-loop edge `{label}` on `{concept}`")]
    SelfLoop { concept: String, label: String },
    #[error("edge endpoint `{concept}` is not a node of the map")]
    DanglingEndpoint { concept: String },
    #[error("assignment does not cover: {}", nodes.join(", "))]
    UnassignedNodes { nodes: Vec<String> },
    #[error("map is already at level {MAX_LEVEL}; cannot contract further")]
    LevelOverflow,
    #[error("unregistered edge labels: {}", labels.join(", "))]
    UnknownLabels { labels: Vec<String> },
    #[error("line {line}: expected `concept => group` or `groupA -> groupB :: label`")]
    AssignmentMalformed { line: usize },
    #[error("line {line}: concept `{concept}` assigned twice")]
    DuplicateAssignment { line: usize, concept: String },
    #[error("line {line}: duplicate relation for group pair `{from}` -> `{to}`")]
    DuplicateRelationPair { line: usize, from: String, to: String },
    #[error(transparent)]
    Label(#[from] TripleError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

/// One directed labeled edge with its provenance set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub subject: Concept,
    pub label: PredicateLabel,
    pub object: Concept,
    pub provenance: BTreeSet<String>,
}

impl Edge {
    /// The edge as a readable proposition, `subject [label] object`.
    pub fn proposition(&self) -> String {
        format!(
            "{} [{}] {}",
            self.subject.canonical(),
            self.label.canonical(),
            self.object.canonical()
        )
    }
}

/// A directed labeled graph at one level (0–3) of the conceptual structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptMap {
    level: u8,
    nodes: BTreeSet<Concept>,
    edges: BTreeMap<(Concept, PredicateLabel, Concept), BTreeSet<String>>,
}

impl ConceptMap {
    pub(crate) fn empty(level: u8) -> ConceptMap {
        ConceptMap {
            level,
            nodes: BTreeSet::new(),
            edges: BTreeMap::new(),
        }
    }

    /// Assemble a map from parts, enforcing the structural invariants:
    /// no self-loops, every edge endpoint a node.
    pub fn from_parts(
        level: u8,
        nodes: BTreeSet<Concept>,
        edges: Vec<Edge>,
    ) -> Result<ConceptMap, GraphError> {
        let mut map = ConceptMap {
            level,
            nodes,
            edges: BTreeMap::new(),
        };
        for edge in edges {
            if !map.nodes.contains(&edge.subject) {
                return Err(GraphError::DanglingEndpoint {
                    concept: edge.subject.canonical().to_string(),
                });
            }
            if !map.nodes.contains(&edge.object) {
                return Err(GraphError::DanglingEndpoint {
                    concept: edge.object.canonical().to_string(),
                });
            }
            if edge.subject == edge.object {
                return Err(GraphError::SelfLoop {
                    concept: edge.subject.canonical().to_string(),
                    label: edge.label.canonical().to_string(),
                });
            }
            map.edges
                .entry((edge.subject, edge.label, edge.object))
                .or_default()
                .extend(edge.provenance);
        }
        Ok(map)
    }

    fn insert_edge(
        &mut self,
        subject: Concept,
        label: PredicateLabel,
        object: Concept,
        provenance: impl IntoIterator<Item = String>,
    ) {
        debug_assert_ne!(subject, object);
        self.nodes.insert(subject.clone());
        self.nodes.insert(object.clone());
        self.edges
            .entry((subject, label, object))
            .or_default()
            .extend(provenance);
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    /// Nodes in canonical order.
    pub fn nodes(&self) -> impl Iterator<Item = &Concept> {
        self.nodes.iter()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in `(subject, label, object)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().map(|((s, l, o), prov)| Edge {
            subject: s.clone(),
            label: l.clone(),
            object: o.clone(),
            provenance: prov.clone(),
        })
    }

    pub fn contains_node(&self, canonical: &str) -> bool {
        Concept::from_canonical(canonical)
            .map(|c| self.nodes.contains(&c))
            .unwrap_or(false)
    }

    pub fn provenance_of(&self, subject: &str, label: &str, object: &str) -> Option<&BTreeSet<String>> {
        let key = (
            Concept::from_canonical(subject).ok()?,
            PredicateLabel::from_canonical(label).ok()?,
            Concept::from_canonical(object).ok()?,
        );
        self.edges.get(&key)
    }

    /// Distinct predicate labels used by the edges, canonical order.
    pub fn labels(&self) -> Vec<&PredicateLabel> {
        let mut labels: Vec<&PredicateLabel> = self
            .edges
            .keys()
            .map(|(_, l, _)| l)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        labels.dedup();
        labels
    }
}

/// Build the level-0 concept map from triples: one node per distinct
/// concept, one edge per distinct proposition, provenance merged across
/// duplicates.
pub fn build_level0(triples: &[Triple]) -> Result<ConceptMap, GraphError> {
    if triples.is_empty() {
        return Err(GraphError::EmptyTriples);
    }
    let mut map = ConceptMap::empty(0);
    for t in triples {
        map.insert_edge(
            t.subject.clone(),
            t.predicate.clone(),
            t.object.clone(),
            t.provenance.iter().cloned(),
        );
    }
    Ok(map)
}

/// A total assignment of a map's concepts to named groups, plus the labels
/// chosen for relations between groups.
///
/// File format:
///
/// ```text
/// dc circuit => circuit
/// voltage source => circuit component
/// [relations]
/// circuit -> circuit component :: is made of
/// ```
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupAssignment {
    mapping: BTreeMap<String, Concept>,
    intergroup_labels: BTreeMap<(String, String), PredicateLabel>,
}

impl GroupAssignment {
    pub fn parse(input: &str) -> Result<GroupAssignment, GraphError> {
        let mut assignment = GroupAssignment::default();
        let mut in_relations = false;
        for (idx, raw) in input.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "[relations]" {
                in_relations = true;
                continue;
            }
            if !in_relations {
                let Some((concept, group)) = line.split_once("=>") else {
                    return Err(GraphError::AssignmentMalformed { line: line_no });
                };
                let concept = Concept::new(concept.trim(), None)?;
                let group = Concept::new(group.trim(), None)?;
                let key = concept.canonical().to_string();
                if assignment.mapping.insert(key.clone(), group).is_some() {
                    return Err(GraphError::DuplicateAssignment {
                        line: line_no,
                        concept: key,
                    });
                }
            } else {
                let Some((pair, label)) = line.split_once("::") else {
                    return Err(GraphError::AssignmentMalformed { line: line_no });
                };
                let Some((from, to)) = pair.split_once("->") else {
                    return Err(GraphError::AssignmentMalformed { line: line_no });
                };
                let from = Concept::new(from.trim(), None)?;
                let to = Concept::new(to.trim(), None)?;
                let label = PredicateLabel::new(label.trim(), None)?;
                let key = (from.canonical().to_string(), to.canonical().to_string());
                if assignment.intergroup_labels.insert(key, label).is_some() {
                    return Err(GraphError::DuplicateRelationPair {
                        line: line_no,
                        from: from.canonical().to_string(),
                        to: to.canonical().to_string(),
                    });
                }
            }
        }
        Ok(assignment)
    }

    /// Build from `(concept, group)` pairs and `(from, to, label)` triples.
    pub fn from_pairs(
        groups: &[(&str, &str)],
        relations: &[(&str, &str, &str)],
    ) -> Result<GroupAssignment, GraphError> {
        let mut assignment = GroupAssignment::default();
        for (concept, group) in groups {
            let concept = Concept::new(concept, None)?;
            let group = Concept::new(group, None)?;
            assignment
                .mapping
                .insert(concept.canonical().to_string(), group);
        }
        for (from, to, label) in relations {
            let from = Concept::new(from, None)?;
            let to = Concept::new(to, None)?;
            assignment.intergroup_labels.insert(
                (from.canonical().to_string(), to.canonical().to_string()),
                PredicateLabel::new(label, None)?,
            );
        }
        Ok(assignment)
    }

    pub fn group_of(&self, concept: &Concept) -> Option<&Concept> {
        self.mapping.get(concept.canonical())
    }

    pub fn label_for(&self, from: &Concept, to: &Concept) -> Option<&PredicateLabel> {
        self.intergroup_labels
            .get(&(from.canonical().to_string(), to.canonical().to_string()))
    }

    /// Group names in canonical order.
    pub fn groups(&self) -> BTreeSet<&Concept> {
        self.mapping.values().collect()
    }

    pub fn assignments(&self) -> impl Iterator<Item = (&String, &Concept)> {
        self.mapping.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    /// Serialize in the assignment file format; `parse` of the output
    /// reproduces this assignment.
    pub fn write(&self) -> String {
        let mut out = String::new();
        for (concept, group) in &self.mapping {
            let _ = writeln!(out, "{} => {}", concept, group.canonical());
        }
        if !self.intergroup_labels.is_empty() {
            out.push_str("[relations]\n");
            for ((from, to), label) in &self.intergroup_labels {
                let _ = writeln!(out, "{} -> {} :: {}", from, to, label.canonical());
            }
        }
        out
    }
}

/// Contract a map one level up: one node per group, inter-group edges
/// relabeled by the assignment (fallback `related to`), intra-group edges
/// dropped, provenance carried through.
pub fn contract(map: &ConceptMap, assignment: &GroupAssignment) -> Result<ConceptMap, GraphError> {
    if map.level() >= MAX_LEVEL {
        return Err(GraphError::LevelOverflow);
    }
    let unassigned: Vec<String> = map
        .nodes()
        .filter(|n| assignment.group_of(n).is_none())
        .map(|n| n.canonical().to_string())
        .collect();
    if !unassigned.is_empty() {
        return Err(GraphError::UnassignedNodes { nodes: unassigned });
    }

    let mut contracted = ConceptMap::empty(map.level + 1);
    for node in map.nodes() {
        let group = assignment.group_of(node).expect("totality checked above");
        contracted.nodes.insert(group.clone());
    }
    let fallback = PredicateLabel::from_canonical("related to").expect("static label");
    for edge in map.edges() {
        let from = assignment.group_of(&edge.subject).expect("total");
        let to = assignment.group_of(&edge.object).expect("total");
        if from == to {
            continue; // intra-group relations vanish at the next level
        }
        let label = assignment
            .label_for(from, to)
            .cloned()
            .unwrap_or_else(|| fallback.clone());
        contracted.insert_edge(from.clone(), label, to.clone(), edge.provenance);
    }
    Ok(contracted)
}

/// Add the mirror edge for every relation with a registered inverse, and for
/// every symmetric relation. Idempotent; fails if any edge label is not
/// registered.
pub fn infer_inverse_edges(
    map: &ConceptMap,
    registry: &RelationRegistry,
) -> Result<ConceptMap, GraphError> {
    let unknown: Vec<String> = map
        .labels()
        .iter()
        .filter(|l| !registry.contains(l.canonical()))
        .map(|l| l.canonical().to_string())
        .collect();
    if !unknown.is_empty() {
        return Err(GraphError::UnknownLabels { labels: unknown });
    }

    let mut out = map.clone();
    for edge in map.edges() {
        if let Some(inverse) = registry.inverse_of(edge.label.canonical())? {
            out.insert_edge(
                edge.object.clone(),
                inverse.clone(),
                edge.subject.clone(),
                edge.provenance.iter().cloned(),
            );
        } else if registry.is_symmetric(edge.label.canonical()) {
            out.insert_edge(
                edge.object.clone(),
                edge.label.clone(),
                edge.subject.clone(),
                edge.provenance.iter().cloned(),
            );
        }
    }
    Ok(out)
}

/// Edges whose label is classified at or below `category`, in
/// `(subject, label, object)` order. Labels the registry does not know
/// never match.
pub fn query_by_category(
    map: &ConceptMap,
    registry: &RelationRegistry,
    category: &SemanticCategory,
) -> Vec<Edge> {
    map.edges()
        .filter(|edge| {
            registry
                .classify(edge.label.canonical())
                .iter()
                .any(|c| c.is_within(category))
        })
        .collect()
}
