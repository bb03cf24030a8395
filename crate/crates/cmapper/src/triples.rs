//! Predicate triples: the unit of level-0 conceptualization.
//!
//! A [`Triple`] reads as a proposition — `(dc circuit, consist of, voltage
//! source)` — and carries the id of the sentence it came from. Concepts and
//! predicate labels compare by their canonical form, so `Battery` and
//! `battery` are the same concept no matter how a source file spelled them.

use std::fmt;

use thiserror::Error;

/// Determiners dropped during label normalization.
const DETERMINERS: [&str; 3] = ["a", "an", "the"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripleError {
    #[error("line {line}: expected `subject | predicate | object`, found {fields} field(s)")]
    MissingField { line: usize, fields: usize },
    #[error("line {line}: rejected self-relation `{label}` relating a concept to itself")]
    SelfRelation { line: usize, label: String },
    #[error("line {line}: {which} normalizes to an empty label")]
    EmptyField { line: usize, which: String },
    #[error("label `{surface}` contains only determiners")]
    EmptyLabel { surface: String },
    #[error("subject and object are the same concept `{canonical}`")]
    SelfRelationConcept { canonical: String },
}

/// Lowercase, stem-substituted, determiner-free form of a label.
///
/// The `stems` slice, when given, must align one-to-one with the
/// whitespace-split tokens of `surface`; mismatched lengths fall back to the
/// surface tokens. Idempotent: normalizing a canonical form returns it
/// unchanged.
pub fn normalize_label(surface: &str, stems: Option<&[String]>) -> Result<String, TripleError> {
    let tokens: Vec<&str> = surface.split_whitespace().collect();
    let stems = match stems {
        Some(s) if s.len() == tokens.len() => Some(s),
        _ => None,
    };
    let mut terms = Vec::with_capacity(tokens.len());
    for (i, token) in tokens.iter().enumerate() {
        let lowered = token.to_lowercase();
        if DETERMINERS.contains(&lowered.as_str()) {
            continue;
        }
        match stems {
            Some(s) => terms.push(s[i].to_lowercase()),
            None => terms.push(lowered),
        }
    }
    if terms.is_empty() {
        return Err(TripleError::EmptyLabel {
            surface: surface.to_string(),
        });
    }
    Ok(terms.join(" "))
}

/// A node of a concept map. Equality, ordering, and hashing use only the
/// canonical label.
#[derive(Debug, Clone)]
pub struct Concept {
    canonical: String,
    display: String,
}

impl Concept {
    pub fn new(surface: &str, stems: Option<&[String]>) -> Result<Concept, TripleError> {
        Ok(Concept {
            canonical: normalize_label(surface, stems)?,
            display: surface.trim().to_string(),
        })
    }

    /// Build from an already-canonical label, keeping it as the display form.
    pub fn from_canonical(canonical: &str) -> Result<Concept, TripleError> {
        let canonical = normalize_label(canonical, None)?;
        Ok(Concept {
            display: canonical.clone(),
            canonical,
        })
    }

    /// Like [`Concept::new`] but with an explicit display form, used when a
    /// chunk's context words belong in the display but not the label.
    pub fn with_display(
        surface: &str,
        stems: Option<&[String]>,
        display: &str,
    ) -> Result<Concept, TripleError> {
        Ok(Concept {
            canonical: normalize_label(surface, stems)?,
            display: display.trim().to_string(),
        })
    }

    pub fn canonical(&self) -> &str {
        &self.canonical
    }

    pub fn display(&self) -> &str {
        &self.display
    }
}

impl PartialEq for Concept {
    fn eq(&self, other: &Self) -> bool {
        self.canonical == other.canonical
    }
}
impl Eq for Concept {}
impl PartialOrd for Concept {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Concept {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical.cmp(&other.canonical)
    }
}
impl std::hash::Hash for Concept {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.canonical.hash(state);
    }
}
impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical)
    }
}

/// The label on a concept-map edge. Same canonical-equality rules as
/// [`Concept`].
#[derive(Debug, Clone)]
pub struct PredicateLabel {
    canonical: String,
    display: String,
}

impl PredicateLabel {
    pub fn new(surface: &str, stems: Option<&[String]>) -> Result<PredicateLabel, TripleError> {
        Ok(PredicateLabel {
            canonical: normalize_label(surface, stems)?,
            display: surface.trim().to_string(),
        })
    }

    pub fn from_canonical(canonical: &str) -> Result<PredicateLabel, TripleError> {
        let canonical = normalize_label(canonical, None)?;
        Ok(PredicateLabel {
            display: canonical.clone(),
            canonical,
        })
    }

    /// Fixed canonical form with a display taken from elsewhere (copula
    /// rewrites keep the sentence surface as the display).
    pub fn with_display(canonical: &str, display: &str) -> Result<PredicateLabel, TripleError> {
        Ok(PredicateLabel {
            canonical: normalize_label(canonical, None)?,
            display: display.trim().to_string(),
        })
    }

    pub fn canonical(&self) -> &str {
        &self.canonical
    }

    pub fn display(&self) -> &str {
        &self.display
    }
}

impl PartialEq for PredicateLabel {
    fn eq(&self, other: &Self) -> bool {
        self.canonical == other.canonical
    }
}
impl Eq for PredicateLabel {}
impl PartialOrd for PredicateLabel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PredicateLabel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical.cmp(&other.canonical)
    }
}
impl std::hash::Hash for PredicateLabel {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.canonical.hash(state);
    }
}
impl fmt::Display for PredicateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical)
    }
}

/// Where a triple came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TripleOrigin {
    RuleExtracted,
    Manual,
}

/// One `(subject, predicate, object)` proposition with provenance.
///
/// Self-relations are rejected at construction: a level-0 triple never
/// relates a concept to itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub subject: Concept,
    pub predicate: PredicateLabel,
    pub object: Concept,
    /// Sentence id the triple was conceptualized from, when known.
    pub provenance: Option<String>,
    pub origin: TripleOrigin,
}

impl Triple {
    pub fn new(
        subject: Concept,
        predicate: PredicateLabel,
        object: Concept,
        provenance: Option<String>,
        origin: TripleOrigin,
    ) -> Result<Triple, TripleError> {
        if subject == object {
            return Err(TripleError::SelfRelationConcept {
                canonical: subject.canonical().to_string(),
            });
        }
        Ok(Triple {
            subject,
            predicate,
            object,
            provenance,
            origin,
        })
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} | {} | {}",
            self.subject.canonical(),
            self.predicate.canonical(),
            self.object.canonical()
        )?;
        if let Some(prov) = &self.provenance {
            write!(f, " @ {prov}")?;
        }
        Ok(())
    }
}

/// Parse a triples file: one `subject | predicate | object` per line,
/// optional ` @ <sentence-id>` suffix, `#` comment lines. Labels are
/// normalized on load; the loaded triples carry [`TripleOrigin::Manual`].
pub fn load_manual_triples(input: &str) -> Result<Vec<Triple>, TripleError> {
    let mut out = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (body, provenance) = match line.rsplit_once(" @ ") {
            Some((body, prov)) => (body, Some(prov.trim().to_string())),
            None => (line, None),
        };
        let fields: Vec<&str> = body.split('|').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(TripleError::MissingField {
                line: line_no,
                fields: fields.len(),
            });
        }
        let named = |which: &str, e: TripleError| match e {
            TripleError::EmptyLabel { .. } => TripleError::EmptyField {
                line: line_no,
                which: which.to_string(),
            },
            other => other,
        };
        let subject = Concept::new(fields[0], None).map_err(|e| named("subject", e))?;
        let predicate = PredicateLabel::new(fields[1], None).map_err(|e| named("predicate", e))?;
        let object = Concept::new(fields[2], None).map_err(|e| named("object", e))?;
        if subject == object {
            return Err(TripleError::SelfRelation {
                line: line_no,
                label: format!("{} | {} | {}", subject, predicate, object),
            });
        }
        out.push(Triple {
            subject,
            predicate,
            object,
            provenance,
            origin: TripleOrigin::Manual,
        });
    }
    Ok(out)
}

/// Serialize triples in the same file format, canonical labels, one per
/// line. [`load_manual_triples`] of the output reproduces the canonical
/// content exactly.
pub fn write_triples(triples: &[Triple]) -> String {
    let mut out = String::new();
    for t in triples {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_lowercases() {
        // The source framework itself mixes `Type Of` and `Type of`.
        assert_eq!(normalize_label("Type of", None).unwrap(), "type of");
        assert_eq!(normalize_label("Type Of", None).unwrap(), "type of");
    }

    #[test]
    fn normalize_drops_determiners() {
        assert_eq!(normalize_label("a voltage source", None).unwrap(), "voltage source");
        assert_eq!(normalize_label("The  Battery", None).unwrap(), "battery");
    }

    #[test]
    fn normalize_substitutes_stems() {
        let stems = vec!["resistor".to_string()];
        assert_eq!(normalize_label("Resistors", Some(&stems)).unwrap(), "resistor");
    }

    #[test]
    fn normalize_rejects_all_determiners() {
        assert!(matches!(
            normalize_label("the a an", None),
            Err(TripleError::EmptyLabel { .. })
        ));
    }

    #[test]
    fn normalize_is_idempotent() {
        let once = normalize_label("The Voltage  Sources", None).unwrap();
        let twice = normalize_label(&once, None).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn concept_equality_ignores_case_and_display() {
        let a = Concept::new("Battery", None).unwrap();
        let b = Concept::new("battery", None).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.display(), b.display());
    }

    #[test]
    fn triple_rejects_self_relation() {
        let s = Concept::new("battery", None).unwrap();
        let o = Concept::new("Battery", None).unwrap();
        let p = PredicateLabel::new("is", None).unwrap();
        assert!(Triple::new(s, p, o, None, TripleOrigin::Manual).is_err());
    }

    #[test]
    fn load_single_line() {
        let triples = load_manual_triples("Battery | Is | Voltaic Cell\n").unwrap();
        assert_eq!(triples.len(), 1);
        assert_eq!(triples[0].subject.canonical(), "battery");
        assert_eq!(triples[0].predicate.canonical(), "is");
        assert_eq!(triples[0].object.canonical(), "voltaic cell");
        assert_eq!(triples[0].origin, TripleOrigin::Manual);
    }

    #[test]
    fn load_with_provenance_and_comments() {
        let input = "# header\nbattery | connected to | resistor @ web01-004\n";
        let triples = load_manual_triples(input).unwrap();
        assert_eq!(triples[0].provenance.as_deref(), Some("web01-004"));
    }

    #[test]
    fn load_rejects_missing_field() {
        let err = load_manual_triples("battery | is\n").unwrap_err();
        assert_eq!(err, TripleError::MissingField { line: 1, fields: 2 });
    }

    #[test]
    fn load_rejects_self_relation_after_normalization() {
        let err = load_manual_triples("battery | is | The Battery\n").unwrap_err();
        assert!(matches!(err, TripleError::SelfRelation { line: 1, .. }));
    }

    #[test]
    fn nine_relation_fixture_counts() {
        // The worked single-sentence example: nine relations over six
        // concepts and four distinct predicate labels.
        let input = "\
DC Circuit | Have Component | Voltage Source
Battery | Type Of | Voltage Source
Voltaic Cell | Type Of | Voltage Source
Battery | Is | Voltaic Cell
Voltage Source | Connected To | Resistor
Battery | Connected To | Resistor
Voltaic Cell | Connected To | Resistor
DC Circuit | Have Component | Resistor
DC Circuit | Type of | Circuit
";
        let triples = load_manual_triples(input).unwrap();
        assert_eq!(triples.len(), 9);
        let concepts: std::collections::BTreeSet<_> = triples
            .iter()
            .flat_map(|t| [t.subject.canonical(), t.object.canonical()])
            .collect();
        assert_eq!(concepts.len(), 6);
        let predicates: std::collections::BTreeSet<_> =
            triples.iter().map(|t| t.predicate.canonical()).collect();
        assert_eq!(
            predicates.into_iter().collect::<Vec<_>>(),
            vec!["connected to", "have component", "is", "type of"]
        );
    }

    #[test]
    fn write_then_load_round_trips() {
        let input = "DC Circuit | Type of | Circuit @ web01-001\nbattery | is | voltaic cell\n";
        let triples = load_manual_triples(input).unwrap();
        let written = write_triples(&triples);
        let reloaded = load_manual_triples(&written).unwrap();
        assert_eq!(triples, reloaded);
        assert_eq!(written, write_triples(&reloaded));
    }
}
