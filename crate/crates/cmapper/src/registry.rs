//! The relation registry: predicate labels mapped onto the framework.
//!
//! Relations are data, categories are contract: a registry file may assign
//! any label to any *existing* framework path, but it can never extend the
//! tree. Unknown predicates are never auto-classified — they surface through
//! [`RelationRegistry::coverage`] so a human can grow the registry the same
//! way the framework itself grew.
//!
//! Registry file format, one entry per line:
//!
//! ```text
//! have component :: Predicate Relations / Physically Related / Parts :: inverse=component of
//! type of :: Predicate Relations / Hierarchy/Class Inclusion ; Similarity / Hyponymy :: inverse=have type
//! connected to :: Predicate Relations / Spatial Relations / Location of Objects :: inverse=none :: symmetric
//! ```
//!
//! `#` starts a comment line. Category paths use ` / ` as the separator and
//! `;` between multiple paths. A symmetric relation has no distinct inverse;
//! edge inference mirrors it under its own label.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::taxonomy::{SemanticCategory, TaxonomyError};
use crate::triples::{normalize_label, PredicateLabel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("line {line}: expected `label :: categories :: inverse=...`, found {parts} part(s)")]
    Malformed { line: usize, parts: usize },
    #[error("line {line}: {source}")]
    Taxonomy {
        line: usize,
        source: TaxonomyError,
    },
    #[error("line {line}: duplicate label `{label}`")]
    DuplicateLabel { line: usize, label: String },
    #[error("line {line}: entry `{label}` has no categories")]
    EmptyCategories { line: usize, label: String },
    #[error("line {line}: label normalizes to nothing")]
    EmptyLabel { line: usize },
    #[error("line {line}: unrecognized trailing part `{part}` (expected `symmetric`)")]
    UnknownFlag { line: usize, part: String },
    #[error("`{label}` cannot be its own inverse")]
    SelfInverse { label: String },
    #[error("`{label}` is symmetric and cannot also carry inverse `{inverse}`")]
    SymmetricWithInverse { label: String, inverse: String },
    #[error("`{label}` names inverse `{inverse}` which is not registered")]
    UnknownInverse { label: String, inverse: String },
    #[error("inverse conflict: `{label}` pairs with `{inverse}` but `{inverse}` pairs with `{conflicting}`")]
    InverseConflict {
        label: String,
        inverse: String,
        conflicting: String,
    },
    #[error("label `{label}` is not registered")]
    UnknownLabel { label: String },
}

/// A registered relation: label, its semantic categories, optional inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationEntry {
    pub label: PredicateLabel,
    pub categories: BTreeSet<SemanticCategory>,
    pub inverse: Option<PredicateLabel>,
    pub symmetric: bool,
}

/// Summary counts over a registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegistryCounts {
    /// Number of registered relations.
    pub relations: usize,
    /// Number of relations that participate in an inverse pair.
    pub inverse_pair_members: usize,
    /// Distinct Tier 1 categories referenced by at least one entry.
    pub tier1_in_use: usize,
    /// Distinct Tier 2 categories referenced by at least one entry.
    pub tier2_in_use: usize,
}

/// Immutable mapping from canonical predicate labels to [`RelationEntry`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelationRegistry {
    entries: BTreeMap<String, RelationEntry>,
}

impl RelationRegistry {
    /// Parse and validate a registry file.
    ///
    /// A one-way inverse (`a` names `b`, `b` names nothing) is repaired by
    /// inserting the reverse pairing; conflicting inverses are an error.
    pub fn load(input: &str) -> Result<RelationRegistry, RegistryError> {
        let mut entries: BTreeMap<String, RelationEntry> = BTreeMap::new();

        for (idx, raw) in input.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split("::").map(str::trim).collect();
            if parts.len() < 3 || parts.len() > 4 {
                return Err(RegistryError::Malformed {
                    line: line_no,
                    parts: parts.len(),
                });
            }
            let label = PredicateLabel::new(parts[0], None)
                .map_err(|_| RegistryError::EmptyLabel { line: line_no })?;

            let mut categories = BTreeSet::new();
            for path in parts[1].split(';').map(str::trim).filter(|p| !p.is_empty()) {
                let category = SemanticCategory::parse(path)
                    .map_err(|source| RegistryError::Taxonomy { line: line_no, source })?;
                categories.insert(category);
            }
            if categories.is_empty() {
                return Err(RegistryError::EmptyCategories {
                    line: line_no,
                    label: label.canonical().to_string(),
                });
            }

            let inverse_part = parts[2];
            let inverse = match inverse_part.strip_prefix("inverse=") {
                Some("none") => None,
                Some(name) => Some(PredicateLabel::new(name, None).map_err(|_| {
                    RegistryError::EmptyLabel { line: line_no }
                })?),
                None => {
                    return Err(RegistryError::Malformed {
                        line: line_no,
                        parts: parts.len(),
                    })
                }
            };

            let symmetric = match parts.get(3) {
                None => false,
                Some(&"symmetric") => true,
                Some(other) => {
                    return Err(RegistryError::UnknownFlag {
                        line: line_no,
                        part: other.to_string(),
                    })
                }
            };

            if let Some(inv) = &inverse {
                if inv == &label {
                    return Err(RegistryError::SelfInverse {
                        label: label.canonical().to_string(),
                    });
                }
                if symmetric {
                    return Err(RegistryError::SymmetricWithInverse {
                        label: label.canonical().to_string(),
                        inverse: inv.canonical().to_string(),
                    });
                }
            }

            let key = label.canonical().to_string();
            let entry = RelationEntry {
                label,
                categories,
                inverse,
                symmetric,
            };
            if entries.insert(key.clone(), entry).is_some() {
                return Err(RegistryError::DuplicateLabel {
                    line: line_no,
                    label: key,
                });
            }
        }

        let registry = RelationRegistry { entries };
        registry.validated()
    }

    /// Check inverse symmetry, repairing missing back-pointers.
    fn validated(mut self) -> Result<RelationRegistry, RegistryError> {
        let pairs: Vec<(String, String)> = self
            .entries
            .iter()
            .filter_map(|(k, e)| {
                e.inverse
                    .as_ref()
                    .map(|inv| (k.clone(), inv.canonical().to_string()))
            })
            .collect();
        for (label, inverse) in pairs {
            let Some(target) = self.entries.get(&inverse) else {
                return Err(RegistryError::UnknownInverse { label, inverse });
            };
            match &target.inverse {
                Some(back) if back.canonical() == label => {}
                Some(back) => {
                    return Err(RegistryError::InverseConflict {
                        label,
                        inverse,
                        conflicting: back.canonical().to_string(),
                    });
                }
                None => {
                    if target.symmetric {
                        return Err(RegistryError::SymmetricWithInverse {
                            label: inverse,
                            inverse: label,
                        });
                    }
                    let back = self.entries[&label].label.clone();
                    self.entries
                        .get_mut(&inverse)
                        .expect("target just looked up")
                        .inverse = Some(back);
                }
            }
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &RelationEntry> {
        self.entries.values()
    }

    pub fn get(&self, label: &str) -> Option<&RelationEntry> {
        let canonical = normalize_label(label, None).ok()?;
        self.entries.get(&canonical)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.get(label).is_some()
    }

    /// The registered category set for a label; the empty set signals an
    /// unknown label. Lookup is canonical: case and determiners are ignored.
    pub fn classify(&self, label: &str) -> BTreeSet<SemanticCategory> {
        self.get(label)
            .map(|e| e.categories.clone())
            .unwrap_or_default()
    }

    /// The paired inverse label, or `None` for symmetric / unpaired
    /// relations. Unlike [`classify`](Self::classify), asking about an
    /// unregistered label is an error.
    pub fn inverse_of(&self, label: &str) -> Result<Option<&PredicateLabel>, RegistryError> {
        match self.get(label) {
            Some(entry) => Ok(entry.inverse.as_ref()),
            None => Err(RegistryError::UnknownLabel {
                label: label.to_string(),
            }),
        }
    }

    pub fn is_symmetric(&self, label: &str) -> bool {
        self.get(label).map(|e| e.symmetric).unwrap_or(false)
    }

    /// Distinct canonical labels from `labels` that are not registered,
    /// sorted. The coverage report for growing the registry.
    pub fn coverage<'a>(&self, labels: impl IntoIterator<Item = &'a str>) -> Vec<String> {
        let mut missing = BTreeSet::new();
        for label in labels {
            if let Ok(canonical) = normalize_label(label, None) {
                if !self.entries.contains_key(&canonical) {
                    missing.insert(canonical);
                }
            }
        }
        missing.into_iter().collect()
    }

    pub fn counts(&self) -> RegistryCounts {
        let mut tier1 = BTreeSet::new();
        let mut tier2 = BTreeSet::new();
        for entry in self.entries.values() {
            for category in &entry.categories {
                if let Some(t1) = category.tier1() {
                    tier1.insert((category.kind(), t1));
                }
                if let Some(t2) = category.tier2() {
                    tier2.insert((category.kind(), category.tier1(), t2));
                }
            }
        }
        RegistryCounts {
            relations: self.entries.len(),
            inverse_pair_members: self
                .entries
                .values()
                .filter(|e| e.inverse.is_some())
                .count(),
            tier1_in_use: tier1.len(),
            tier2_in_use: tier2.len(),
        }
    }

    /// Serialize back to the registry file format. Loading the output
    /// reproduces this registry exactly.
    pub fn write(&self) -> String {
        let mut out = String::new();
        for entry in self.entries.values() {
            let paths: Vec<String> = entry.categories.iter().map(|c| c.to_string()).collect();
            let _ = write!(
                out,
                "{} :: {} :: inverse={}",
                entry.label.canonical(),
                paths.join(" ; "),
                entry
                    .inverse
                    .as_ref()
                    .map(|i| i.canonical().to_string())
                    .unwrap_or_else(|| "none".to_string())
            );
            if entry.symmetric {
                out.push_str(" :: symmetric");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE_REGISTRY: &str = "\
# predicates of the worked example
have component :: Predicate Relations / Physically Related / Parts :: inverse=none
type of :: Predicate Relations / Hierarchy/Class Inclusion ; Similarity / Hyponymy :: inverse=have type
have type :: Predicate Relations / Hierarchy/Class Inclusion :: inverse=type of
is :: Similarity / Synonymy :: inverse=none
connected to :: Predicate Relations / Spatial Relations / Location of Objects :: inverse=none :: symmetric
";

    #[test]
    fn load_and_classify() {
        let registry = RelationRegistry::load(EXAMPLE_REGISTRY).unwrap();
        assert_eq!(
            registry
                .classify("have component")
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>(),
            vec!["Predicate Relations / Physically Related / Parts"]
        );
        assert_eq!(
            registry
                .classify("type of")
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>(),
            vec![
                "Predicate Relations / Hierarchy/Class Inclusion",
                "Similarity / Hyponymy"
            ]
        );
        assert_eq!(
            registry
                .classify("connected to")
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>(),
            vec!["Predicate Relations / Spatial Relations / Location of Objects"]
        );
        assert_eq!(
            registry
                .classify("is")
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>(),
            vec!["Similarity / Synonymy"]
        );
    }

    #[test]
    fn classify_is_canonical() {
        let registry = RelationRegistry::load(EXAMPLE_REGISTRY).unwrap();
        assert_eq!(registry.classify("Type Of"), registry.classify("type of"));
        assert!(registry.classify("powers").is_empty());
    }

    #[test]
    fn inverse_round_trips() {
        let registry = RelationRegistry::load(EXAMPLE_REGISTRY).unwrap();
        let inv = registry.inverse_of("have type").unwrap().unwrap();
        assert_eq!(inv.canonical(), "type of");
        let back = registry.inverse_of("type of").unwrap().unwrap();
        assert_eq!(back.canonical(), "have type");
        assert_eq!(registry.inverse_of("connected to").unwrap(), None);
        assert!(matches!(
            registry.inverse_of("powers"),
            Err(RegistryError::UnknownLabel { .. })
        ));
    }

    #[test]
    fn one_way_inverse_is_repaired() {
        let input = "\
type of :: Similarity / Hyponymy :: inverse=have type
have type :: Predicate Relations / Hierarchy/Class Inclusion :: inverse=none
";
        let registry = RelationRegistry::load(input).unwrap();
        assert_eq!(
            registry.inverse_of("have type").unwrap().unwrap().canonical(),
            "type of"
        );
    }

    #[test]
    fn conflicting_inverses_rejected() {
        let input = "\
alpha :: Similarity / Synonymy :: inverse=beta
beta :: Similarity / Synonymy :: inverse=gamma
gamma :: Similarity / Synonymy :: inverse=beta
";
        assert!(matches!(
            RelationRegistry::load(input).unwrap_err(),
            RegistryError::InverseConflict { .. }
        ));
    }

    #[test]
    fn invalid_tree_path_rejected() {
        let input = "x :: Predicate Relations / Spatial Relations / Parts :: inverse=none\n";
        let err = RelationRegistry::load(input).unwrap_err();
        assert!(matches!(err, RegistryError::Taxonomy { line: 1, .. }));
    }

    #[test]
    fn duplicate_label_rejected() {
        let input = "is :: Similarity / Synonymy :: inverse=none\nIs :: Similarity / Synonymy :: inverse=none\n";
        assert!(matches!(
            RelationRegistry::load(input).unwrap_err(),
            RegistryError::DuplicateLabel { line: 2, .. }
        ));
    }

    #[test]
    fn self_inverse_rejected() {
        let input = "is :: Similarity / Synonymy :: inverse=is\n";
        assert!(matches!(
            RelationRegistry::load(input).unwrap_err(),
            RegistryError::SelfInverse { .. }
        ));
    }

    #[test]
    fn unknown_inverse_target_rejected() {
        let input = "type of :: Similarity / Hyponymy :: inverse=have type\n";
        assert!(matches!(
            RelationRegistry::load(input).unwrap_err(),
            RegistryError::UnknownInverse { .. }
        ));
    }

    #[test]
    fn counts_for_worked_example_registry() {
        // 5 entries, one inverse pair. Tier 1 names in use: Physically
        // Related, Hierarchy/Class Inclusion, Hyponymy, Synonymy, Spatial
        // Relations. Tier 2 names in use: Parts, Location of Objects.
        let registry = RelationRegistry::load(EXAMPLE_REGISTRY).unwrap();
        let counts = registry.counts();
        assert_eq!(counts.relations, 5);
        assert_eq!(counts.inverse_pair_members, 2);
        assert_eq!(counts.tier1_in_use, 5);
        assert_eq!(counts.tier2_in_use, 2);
    }

    #[test]
    fn counts_for_empty_registry() {
        let registry = RelationRegistry::load("").unwrap();
        assert_eq!(
            registry.counts(),
            RegistryCounts {
                relations: 0,
                inverse_pair_members: 0,
                tier1_in_use: 0,
                tier2_in_use: 0
            }
        );
    }

    #[test]
    fn reserialized_registry_reloads_identically() {
        let registry = RelationRegistry::load(EXAMPLE_REGISTRY).unwrap();
        let written = registry.write();
        let reloaded = RelationRegistry::load(&written).unwrap();
        assert_eq!(registry, reloaded);
        assert_eq!(written, reloaded.write());
    }
}
