//! The four-level conceptual structure and its validation.
//!
//! Level 0 maps sentences directly; levels 1 and 2 group concepts; level 3
//! holds only the domain context concept. A [`ConceptualStructure`] bundles
//! the four maps with the three assignments that produced them, and
//! [`validate_structure`] re-derives each level to confirm nothing was
//! hand-edited out of agreement.
//!
//! Validation never raises: violations are entries in the returned report.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::export::{export_map, import_graphml, ExportError, ExportFormat, ExportOptions};
use crate::graph::{contract, ConceptMap, GraphError, GroupAssignment};

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Map {
        path: String,
        source: ExportError,
    },
    #[error("{path}: {source}")]
    Assignment {
        path: String,
        source: GraphError,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The stack of levels 0–3 plus the assignments between them.
///
/// Construction does not validate; broken structures (wrong level count,
/// hand-edited maps) are representable so that [`validate_structure`] can
/// report on them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptualStructure {
    levels: Vec<ConceptMap>,
    assignments: Vec<GroupAssignment>,
}

impl ConceptualStructure {
    pub fn from_parts(
        levels: Vec<ConceptMap>,
        assignments: Vec<GroupAssignment>,
    ) -> ConceptualStructure {
        ConceptualStructure {
            levels,
            assignments,
        }
    }

    /// Contract `level0` through the three assignments, yielding a
    /// constructed-valid structure.
    pub fn build(
        level0: ConceptMap,
        assignments: [GroupAssignment; 3],
    ) -> Result<ConceptualStructure, GraphError> {
        let mut levels = vec![level0];
        for assignment in &assignments {
            let next = contract(levels.last().expect("non-empty"), assignment)?;
            levels.push(next);
        }
        Ok(ConceptualStructure {
            levels,
            assignments: assignments.into(),
        })
    }

    pub fn levels(&self) -> &[ConceptMap] {
        &self.levels
    }

    pub fn level(&self, index: usize) -> Option<&ConceptMap> {
        self.levels.get(index)
    }

    pub fn assignments(&self) -> &[GroupAssignment] {
        &self.assignments
    }

    pub fn levels_mut(&mut self) -> &mut Vec<ConceptMap> {
        &mut self.levels
    }

    pub fn assignments_mut(&mut self) -> &mut Vec<GroupAssignment> {
        &mut self.assignments
    }

    /// Load `level0.graphml`..`level3.graphml` and
    /// `level1.assign`..`level3.assign` from a directory.
    pub fn load_dir(dir: &Path) -> Result<ConceptualStructure, StructureError> {
        let mut levels = Vec::new();
        for k in 0..=3 {
            let path = dir.join(format!("level{k}.graphml"));
            if k > 0 && !path.exists() {
                break;
            }
            let text = fs::read_to_string(&path).map_err(|source| StructureError::Read {
                path: path.display().to_string(),
                source,
            })?;
            levels.push(import_graphml(&text).map_err(|source| StructureError::Map {
                path: path.display().to_string(),
                source,
            })?);
        }
        let mut assignments = Vec::new();
        for k in 1..=3 {
            let path = dir.join(format!("level{k}.assign"));
            if !path.exists() {
                break;
            }
            let text = fs::read_to_string(&path).map_err(|source| StructureError::Read {
                path: path.display().to_string(),
                source,
            })?;
            assignments.push(GroupAssignment::parse(&text).map_err(|source| {
                StructureError::Assignment {
                    path: path.display().to_string(),
                    source,
                }
            })?);
        }
        Ok(ConceptualStructure {
            levels,
            assignments,
        })
    }

    /// Write the structure as GraphML maps and assignment files.
    pub fn save_dir(&self, dir: &Path) -> Result<(), StructureError> {
        fs::create_dir_all(dir).map_err(|source| StructureError::Write {
            path: dir.display().to_string(),
            source,
        })?;
        let options = ExportOptions::new(ExportFormat::GraphML).with_provenance();
        for (k, map) in self.levels.iter().enumerate() {
            let path = dir.join(format!("level{k}.graphml"));
            let text = export_map(map, &options, None).map_err(|source| StructureError::Map {
                path: path.display().to_string(),
                source,
            })?;
            fs::write(&path, text).map_err(|source| StructureError::Write {
                path: path.display().to_string(),
                source,
            })?;
        }
        for (i, assignment) in self.assignments.iter().enumerate() {
            let path = dir.join(format!("level{}.assign", i + 1));
            fs::write(&path, assignment.write()).map_err(|source| StructureError::Write {
                path: path.display().to_string(),
                source,
            })?;
        }
        Ok(())
    }
}

/// One validation check with its outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationCheck {
    pub name: &'static str,
    pub passed: bool,
    pub message: String,
}

/// The outcome of [`validate_structure`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn checks(&self) -> &[ValidationCheck] {
        &self.checks
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Human-readable report, one line per check.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for check in &self.checks {
            let status = if check.passed { "ok" } else { "FAIL" };
            let _ = writeln!(out, "[{status}] {}: {}", check.name, check.message);
        }
        out
    }
}

/// Check the structural contract of a four-level conceptual structure:
/// levels present, node counts monotone, a single context concept at level
/// 3, total assignments, and every level equal to the contraction of the
/// one below it.
pub fn validate_structure(structure: &ConceptualStructure) -> ValidationReport {
    let mut checks = Vec::new();
    let levels = structure.levels();
    let assignments = structure.assignments();

    // Four levels tagged 0..=3.
    let tags_ok = levels.iter().enumerate().all(|(k, m)| m.level() as usize == k);
    checks.push(ValidationCheck {
        name: "levels-present",
        passed: levels.len() == 4 && tags_ok,
        message: if levels.len() != 4 {
            format!("expected 4 levels, found {}", levels.len())
        } else if !tags_ok {
            let tags: Vec<String> = levels.iter().map(|m| m.level().to_string()).collect();
            format!("level tags out of order: [{}]", tags.join(", "))
        } else {
            "levels 0..=3 present".to_string()
        },
    });

    // Node counts never increase with level.
    let counts: Vec<usize> = levels.iter().map(ConceptMap::node_count).collect();
    let violation = counts.windows(2).position(|w| w[1] > w[0]);
    checks.push(ValidationCheck {
        name: "monotone-node-counts",
        passed: violation.is_none(),
        message: match violation {
            Some(k) => format!(
                "level {} has {} nodes but level {} has {}",
                k,
                counts[k],
                k + 1,
                counts[k + 1]
            ),
            None => format!(
                "node counts non-increasing: [{}]",
                counts
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        },
    });

    // Level 3 is the context concept alone.
    if let Some(top) = levels.get(3) {
        let singleton = top.node_count() == 1 && top.edge_count() == 0;
        let nodes: Vec<String> = top.nodes().map(|n| n.canonical().to_string()).collect();
        checks.push(ValidationCheck {
            name: "context-singleton",
            passed: singleton,
            message: if singleton {
                format!("context level holds only `{}`", nodes[0])
            } else {
                format!(
                    "context level must hold exactly one concept and no relations; found {} node(s) [{}] and {} edge(s)",
                    top.node_count(),
                    nodes.join(", "),
                    top.edge_count()
                )
            },
        });
    } else {
        checks.push(ValidationCheck {
            name: "context-singleton",
            passed: false,
            message: "no level 3 to check".to_string(),
        });
    }

    // Assignment totality at each step.
    for (k, assignment) in assignments.iter().enumerate() {
        let Some(source) = levels.get(k) else { break };
        let unassigned: Vec<String> = source
            .nodes()
            .filter(|n| assignment.group_of(n).is_none())
            .map(|n| n.canonical().to_string())
            .collect();
        checks.push(ValidationCheck {
            name: "assignment-totality",
            passed: unassigned.is_empty(),
            message: if unassigned.is_empty() {
                format!("assignment to level {} covers all level-{k} concepts", k + 1)
            } else {
                format!(
                    "assignment to level {} leaves level-{k} concepts unassigned: {}",
                    k + 1,
                    unassigned.join(", ")
                )
            },
        });
    }
    if assignments.len() < 3 {
        checks.push(ValidationCheck {
            name: "assignment-totality",
            passed: false,
            message: format!("expected 3 assignments, found {}", assignments.len()),
        });
    }

    // Each stored level must equal the recontraction of the level below.
    for (k, assignment) in assignments.iter().enumerate() {
        let (Some(source), Some(stored)) = (levels.get(k), levels.get(k + 1)) else {
            break;
        };
        match contract(source, assignment) {
            Ok(derived) if &derived == stored => checks.push(ValidationCheck {
                name: "contraction-equality",
                passed: true,
                message: format!("level {} equals contract(level {k})", k + 1),
            }),
            Ok(derived) => {
                let stored_edges: std::collections::BTreeSet<String> =
                    stored.edges().map(|e| e.proposition()).collect();
                let derived_edges: std::collections::BTreeSet<String> =
                    derived.edges().map(|e| e.proposition()).collect();
                let unexpected: Vec<String> =
                    stored_edges.difference(&derived_edges).cloned().collect();
                let missing: Vec<String> =
                    derived_edges.difference(&stored_edges).cloned().collect();
                let mut detail = String::new();
                if !unexpected.is_empty() {
                    let _ = write!(detail, "; not derivable: {}", unexpected.join(" ; "));
                }
                if !missing.is_empty() {
                    let _ = write!(detail, "; missing: {}", missing.join(" ; "));
                }
                if detail.is_empty() {
                    detail = "; node sets or provenance differ".to_string();
                }
                checks.push(ValidationCheck {
                    name: "contraction-equality",
                    passed: false,
                    message: format!(
                        "level {} differs from contract(level {k}){detail}",
                        k + 1
                    ),
                });
            }
            Err(err) => checks.push(ValidationCheck {
                name: "contraction-equality",
                passed: false,
                message: format!("level {} could not be re-derived: {err}", k + 1),
            }),
        }
    }

    ValidationReport { checks }
}
