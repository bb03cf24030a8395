//! The fixed two-tier framework of semantic relations.
//!
//! The framework is a tree with five top-level relation kinds. Under
//! *Predicate Relations* sit Tier 1 categories such as *Physically Related*
//! or *Spatial Relations*, some of which refine further into Tier 2
//! categories (*Parts*, *Location of Objects*, ...). The tree is the
//! classification schema: registries carry relation labels as data, but a
//! label may only ever point at a path that exists here.
//!
//! Path strings use ` / ` (slash with surrounding spaces) as the separator,
//! because several category names contain a bare slash of their own
//! (`Hierarchy/Class Inclusion`, `Effect/Partial Cause`).

use std::fmt;

use thiserror::Error;

/// Top-level relation kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationKind {
    Predicate,
    Similarity,
    Quantitative,
    Instantiation,
    Extension,
}

impl RelationKind {
    pub const ALL: [RelationKind; 5] = [
        RelationKind::Predicate,
        RelationKind::Similarity,
        RelationKind::Quantitative,
        RelationKind::Instantiation,
        RelationKind::Extension,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Predicate => "Predicate Relations",
            RelationKind::Similarity => "Similarity",
            RelationKind::Quantitative => "Quantitative Relations",
            RelationKind::Instantiation => "Instantiation",
            RelationKind::Extension => "Extension",
        }
    }

    fn from_name(name: &str) -> Option<RelationKind> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Tier 1 categories under this kind, each with its Tier 2 children.
    pub fn tier1_categories(self) -> &'static [(&'static str, &'static [&'static str])] {
        match self {
            RelationKind::Predicate => &[
                ("Hierarchy/Class Inclusion", &[]),
                ("Physically Related", &["Parts", "Constituent Material"]),
                (
                    "Spatial Relations",
                    &["Location of Objects", "Location of Activities"],
                ),
                (
                    "Causally/Functionally Related",
                    &[
                        "Effect/Partial Cause",
                        "Production/Generation",
                        "Destruction",
                        "Manifestation",
                    ],
                ),
                ("Instrumental Function/Usage", &["Functions", "Use"]),
                ("Human Role", &[]),
                ("Conceptually Related", &["Topic", "Representation", "Property"]),
            ],
            RelationKind::Similarity => &[("Synonymy", &[]), ("Hyponymy", &[])],
            RelationKind::Quantitative => &[("Numerical Relations", &[])],
            RelationKind::Instantiation => &[],
            RelationKind::Extension => &[],
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated path into the framework tree.
///
/// Paths may stop at any depth: `Similarity`, `Predicate Relations /
/// Physically Related`, or `Predicate Relations / Physically Related /
/// Parts` are all valid categories. A Tier 2 name is only present when a
/// Tier 1 name is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SemanticCategory {
    kind: RelationKind,
    tier1: Option<&'static str>,
    tier2: Option<&'static str>,
}

/// A category path that does not exist in the framework tree.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown category path `{path}`")]
pub struct TaxonomyError {
    pub path: String,
}

impl SemanticCategory {
    /// Validate `(kind, tier1, tier2)` against the tree.
    pub fn new(
        kind: RelationKind,
        tier1: Option<&str>,
        tier2: Option<&str>,
    ) -> Result<SemanticCategory, TaxonomyError> {
        let err = || TaxonomyError {
            path: join_path(kind.name(), tier1, tier2),
        };
        let tier1 = match tier1 {
            None => {
                if tier2.is_some() {
                    return Err(err());
                }
                return Ok(SemanticCategory {
                    kind,
                    tier1: None,
                    tier2: None,
                });
            }
            Some(t1) => t1,
        };
        let (t1_name, t2_children) = kind
            .tier1_categories()
            .iter()
            .find(|(name, _)| *name == tier1)
            .ok_or_else(err)?;
        let tier2 = match tier2 {
            None => None,
            Some(t2) => Some(
                t2_children
                    .iter()
                    .copied()
                    .find(|name| *name == t2)
                    .ok_or_else(err)?,
            ),
        };
        Ok(SemanticCategory {
            kind,
            tier1: Some(t1_name),
            tier2,
        })
    }

    /// Parse a ` / `-separated path string, e.g.
    /// `Predicate Relations / Spatial Relations / Location of Objects`.
    pub fn parse(path: &str) -> Result<SemanticCategory, TaxonomyError> {
        let err = || TaxonomyError {
            path: path.trim().to_string(),
        };
        let mut parts = path.split(" / ").map(str::trim);
        let kind = parts.next().and_then(RelationKind::from_name).ok_or_else(err)?;
        let tier1 = parts.next();
        let tier2 = parts.next();
        if parts.next().is_some() {
            return Err(err());
        }
        SemanticCategory::new(kind, tier1, tier2)
    }

    pub fn kind(&self) -> RelationKind {
        self.kind
    }

    pub fn tier1(&self) -> Option<&'static str> {
        self.tier1
    }

    pub fn tier2(&self) -> Option<&'static str> {
        self.tier2
    }

    /// Path depth: 1 for a bare kind, 2 with a Tier 1 name, 3 with Tier 2.
    pub fn depth(&self) -> usize {
        1 + self.tier1.iter().count() + self.tier2.iter().count()
    }

    /// Whether `self` equals `ancestor` or sits below it in the tree.
    pub fn is_within(&self, ancestor: &SemanticCategory) -> bool {
        if self.kind != ancestor.kind {
            return false;
        }
        match (ancestor.tier1, self.tier1) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(s)) => {
                a == s
                    && match (ancestor.tier2, self.tier2) {
                        (None, _) => true,
                        (Some(_), None) => false,
                        (Some(a2), Some(s2)) => a2 == s2,
                    }
            }
        }
    }

    /// Every valid path in the tree, at every depth, in display order.
    pub fn all_paths() -> Vec<SemanticCategory> {
        let mut out = Vec::new();
        for kind in RelationKind::ALL {
            out.push(SemanticCategory {
                kind,
                tier1: None,
                tier2: None,
            });
            for (tier1, children) in kind.tier1_categories() {
                out.push(SemanticCategory {
                    kind,
                    tier1: Some(tier1),
                    tier2: None,
                });
                for tier2 in *children {
                    out.push(SemanticCategory {
                        kind,
                        tier1: Some(tier1),
                        tier2: Some(tier2),
                    });
                }
            }
        }
        out
    }
}

impl fmt::Display for SemanticCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_path(self.kind.name(), self.tier1, self.tier2))
    }
}

fn join_path(kind: &str, tier1: Option<&str>, tier2: Option<&str>) -> String {
    let mut s = kind.to_string();
    if let Some(t1) = tier1 {
        s.push_str(" / ");
        s.push_str(t1);
    }
    if let Some(t2) = tier2 {
        s.push_str(" / ");
        s.push_str(t2);
    }
    s
}
