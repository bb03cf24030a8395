//! Shallow rule-based triple extraction over POS tags.
//!
//! Conceptualizing a sentence is a human judgment; these rules automate only
//! the surface-recoverable part of it. Recall is deliberately not a goal —
//! anything the rules miss enters through the manual triples path
//! ([`crate::triples::load_manual_triples`]).
//!
//! The rules, applied left to right over the verbs of a sentence:
//!
//! * **Noun chunks** — a maximal run of `JJ*`/`NN*`/`CD` tokens containing a
//!   noun forms one concept candidate. The trailing noun run is the core:
//!   its stems name the concept, the full chunk is the display form
//!   (`One simple DC circuit` → concept `dc circuit`).
//! * **Coordination** — chunks joined by `and`/`or` form one group; a triple
//!   is emitted per member when the group serves as subject or object.
//! * **Prepositional attachment** — `chunk + IN + chunk` (no verb between)
//!   merges into one group; the head chunk names the concept and the display
//!   keeps the context (`Resistors in the diagram` → `resistor`).
//! * **Verb predicates** — a main verb plus any immediately following
//!   `RP`/`IN`/`TO` tokens forms the predicate; subject is the nearest
//!   preceding group, object the nearest following one.
//! * **Copulas** — `be` + indefinite determiner + chunk yields `type of`;
//!   `be` + preposition + chunk yields `be <prep>`; other copula shapes
//!   yield nothing.
//!
//! Parenthesized chunks are never picked as subject or object (they are
//! almost always appositions), and verbs inside parentheses are skipped.
//! A sentence matching no rule yields the empty sequence.

use crate::corpus::{Corpus, TaggedSentence, TaggedToken};
use crate::triples::{Concept, PredicateLabel, Triple, TripleOrigin};

fn is_noun(pos: &str) -> bool {
    pos.starts_with("NN")
}

fn is_chunkable(pos: &str) -> bool {
    is_noun(pos) || pos.starts_with("JJ") || pos == "CD"
}

fn is_verb(pos: &str) -> bool {
    pos.starts_with("VB")
}

fn is_predicate_tail(pos: &str) -> bool {
    pos == "RP" || pos == "IN" || pos == "TO"
}

fn is_open_paren(token: &TaggedToken) -> bool {
    token.pos == "-LRB-" || token.surface == "("
}

fn is_close_paren(token: &TaggedToken) -> bool {
    token.pos == "-RRB-" || token.surface == ")"
}

fn is_coordinator(token: &TaggedToken) -> bool {
    token.pos == "CC" && matches!(token.surface.to_lowercase().as_str(), "and" | "or")
}

/// An atomic noun chunk: token span plus the trailing noun core that names
/// the concept.
#[derive(Debug, Clone)]
struct Chunk {
    start: usize,
    end: usize,
    core_start: usize,
    core_end: usize,
}

/// A chunk or coordination of chunks, optionally extended by attached
/// prepositional phrases (display only).
#[derive(Debug, Clone)]
struct NounGroup {
    members: Vec<Chunk>,
    start: usize,
    end: usize,
    display_end: usize,
    parenthetical: bool,
}

fn surface_span(tokens: &[TaggedToken], start: usize, end: usize) -> String {
    tokens[start..=end]
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

fn chunk_concept(tokens: &[TaggedToken], chunk: &Chunk, display_end: usize) -> Option<Concept> {
    let core_surface = surface_span(tokens, chunk.core_start, chunk.core_end);
    let stems: Vec<String> = tokens[chunk.core_start..=chunk.core_end]
        .iter()
        .map(|t| t.stem.clone())
        .collect();
    let display = surface_span(tokens, chunk.start, display_end.max(chunk.end));
    Concept::with_display(&core_surface, Some(&stems), &display).ok()
}

fn find_chunks(tokens: &[TaggedToken]) -> Vec<Chunk> {
    let mut chunks = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if !is_chunkable(&tokens[i].pos) {
            i += 1;
            continue;
        }
        let start = i;
        while i < tokens.len() && is_chunkable(&tokens[i].pos) {
            i += 1;
        }
        let end = i - 1;
        // Core: the contiguous noun run ending at the rightmost noun.
        let Some(core_end) = (start..=end).rev().find(|&j| is_noun(&tokens[j].pos)) else {
            continue; // no noun head, not a concept candidate
        };
        let mut core_start = core_end;
        while core_start > start && is_noun(&tokens[core_start - 1].pos) {
            core_start -= 1;
        }
        chunks.push(Chunk {
            start,
            end,
            core_start,
            core_end,
        });
    }
    chunks
}

fn group_chunks(tokens: &[TaggedToken], chunks: Vec<Chunk>) -> Vec<NounGroup> {
    let paren_depth = paren_depths(tokens);

    // Coordination: chunk (CC [DT]? chunk)+ merges into one group.
    let mut groups: Vec<NounGroup> = Vec::new();
    let mut i = 0;
    while i < chunks.len() {
        let mut members = vec![chunks[i].clone()];
        let mut j = i;
        while j + 1 < chunks.len() {
            let gap = (chunks[j].end + 1)..chunks[j + 1].start;
            let gap_tokens: Vec<&TaggedToken> = gap.map(|k| &tokens[k]).collect();
            let joined = match gap_tokens.as_slice() {
                [cc] => is_coordinator(cc),
                [cc, dt] => is_coordinator(cc) && dt.pos == "DT",
                _ => false,
            };
            if !joined {
                break;
            }
            members.push(chunks[j + 1].clone());
            j += 1;
        }
        let start = members[0].start;
        let end = members[members.len() - 1].end;
        groups.push(NounGroup {
            members,
            start,
            end,
            display_end: end,
            parenthetical: paren_depth[start] > 0,
        });
        i = j + 1;
    }

    // Prepositional attachment: group IN [DT]? group, with the preposition
    // directly after the left group (a preposition after a verb belongs to
    // the predicate instead).
    let mut attached: Vec<NounGroup> = Vec::new();
    let mut k = 0;
    while k < groups.len() {
        let mut group = groups[k].clone();
        while k + 1 < groups.len() && !groups[k + 1].parenthetical {
            let next = &groups[k + 1];
            let gap: Vec<&TaggedToken> =
                ((group.display_end + 1)..next.start).map(|t| &tokens[t]).collect();
            let attaches = match gap.as_slice() {
                [prep] => prep.pos == "IN",
                [prep, dt] => prep.pos == "IN" && dt.pos == "DT",
                _ => false,
            };
            if !attaches {
                break;
            }
            group.display_end = next.end;
            k += 1;
        }
        attached.push(group);
        k += 1;
    }
    attached
}

fn paren_depths(tokens: &[TaggedToken]) -> Vec<usize> {
    let mut depth = 0usize;
    tokens
        .iter()
        .map(|t| {
            if is_open_paren(t) {
                depth += 1;
                depth
            } else if is_close_paren(t) {
                let d = depth;
                depth = depth.saturating_sub(1);
                d
            } else {
                depth
            }
        })
        .collect()
}

fn group_concepts(tokens: &[TaggedToken], group: &NounGroup) -> Vec<(usize, Concept)> {
    if group.members.len() == 1 {
        let chunk = &group.members[0];
        chunk_concept(tokens, chunk, group.display_end)
            .map(|c| vec![(chunk.start, c)])
            .unwrap_or_default()
    } else {
        group
            .members
            .iter()
            .filter_map(|chunk| chunk_concept(tokens, chunk, chunk.end).map(|c| (chunk.start, c)))
            .collect()
    }
}

/// Extract level-0 triples from one tagged sentence. Deterministic: output
/// is ordered by subject position, then object position.
pub fn extract_triples(sentence: &TaggedSentence) -> Vec<Triple> {
    let tokens = &sentence.tokens;
    let groups = group_chunks(tokens, find_chunks(tokens));
    let depths = paren_depths(tokens);

    let in_group = |idx: usize| {
        groups
            .iter()
            .any(|g| g.members.iter().any(|m| idx >= m.start && idx <= m.end))
    };
    let preceding_group = |idx: usize| {
        groups
            .iter()
            .rev()
            .find(|g| !g.parenthetical && g.end < idx)
    };
    let following_group = |idx: usize| {
        groups
            .iter()
            .find(|g| !g.parenthetical && g.start > idx)
    };

    let mut emitted: Vec<(usize, usize, Triple)> = Vec::new();
    for (v, token) in tokens.iter().enumerate() {
        if !is_verb(&token.pos) || in_group(v) || depths[v] > 0 {
            continue;
        }

        let (predicate, object_from) = if token.stem == "be" {
            match tokens.get(v + 1) {
                Some(next) if next.pos == "DT" => {
                    // `be` + indefinite determiner + chunk reads as class
                    // membership.
                    let indefinite = matches!(next.surface.to_lowercase().as_str(), "a" | "an");
                    let object_starts_here =
                        following_group(v + 1).is_some_and(|g| g.start == v + 2);
                    if !indefinite || !object_starts_here {
                        continue;
                    }
                    let display = format!("{} {}", token.surface, next.surface);
                    let Ok(label) = PredicateLabel::with_display("type of", &display) else {
                        continue;
                    };
                    (label, v + 1)
                }
                Some(next) if next.pos == "IN" => {
                    let surface = format!("{} {}", token.surface, next.surface);
                    let stems = vec![token.stem.clone(), next.stem.clone()];
                    let Ok(label) = PredicateLabel::new(&surface, Some(&stems)) else {
                        continue;
                    };
                    (label, v + 1)
                }
                _ => continue,
            }
        } else {
            let mut end = v;
            while end + 1 < tokens.len() && is_predicate_tail(&tokens[end + 1].pos) {
                end += 1;
            }
            let surface = surface_span(tokens, v, end);
            let stems: Vec<String> = tokens[v..=end].iter().map(|t| t.stem.clone()).collect();
            let Ok(label) = PredicateLabel::new(&surface, Some(&stems)) else {
                continue;
            };
            (label, end)
        };

        let Some(subject_group) = preceding_group(v) else {
            continue;
        };
        let Some(object_group) = following_group(object_from) else {
            continue;
        };

        for (s_pos, subject) in group_concepts(tokens, subject_group) {
            for (o_pos, object) in group_concepts(tokens, object_group) {
                if subject == object {
                    continue;
                }
                if let Ok(triple) = Triple::new(
                    subject.clone(),
                    predicate.clone(),
                    object,
                    Some(sentence.id.clone()),
                    TripleOrigin::RuleExtracted,
                ) {
                    emitted.push((s_pos, o_pos, triple));
                }
            }
        }
    }

    emitted.sort_by_key(|(s, o, _)| (*s, *o));
    emitted.into_iter().map(|(_, _, t)| t).collect()
}

/// Extract triples for every sentence, concatenated in corpus order.
pub fn extract_corpus_triples(corpus: &Corpus) -> Vec<Triple> {
    corpus
        .sentences()
        .iter()
        .flat_map(extract_triples)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_corpus;

    fn sentence(block: &str) -> TaggedSentence {
        parse_corpus(block).unwrap().sentences()[0].clone()
    }

    const SENTENCE_A: &str = "\
#S web01-001
#T One simple DC circuit consists of a voltage source (battery or voltaic cell) connected to a resistor
One\tCD\tN/N\tone
simple\tJJ\tN/N\tsimple
DC\tNNP\tN/N\tdc
circuit\tNN\tN\tcircuit
consists\tVBZ\t(S\\NP)/PP\tconsist
of\tIN\tPP/NP\tof
a\tDT\tNP/N\ta
voltage\tNN\tN/N\tvoltage
source\tNN\tN\tsource
(\t-LRB-\t\t(
battery\tNN\tN\tbattery
or\tCC\tconj\tor
voltaic\tJJ\tN/N\tvoltaic
cell\tNN\tN\tcell
)\t-RRB-\t\t)
connected\tVBN\t(S\\NP)/PP\tconnect
to\tTO\tPP/NP\tto
a\tDT\tNP/N\ta
resistor\tNN\tN\tresistor
.\t.\t\t.
";

    const SENTENCE_B: &str = "\
#S web01-002
#T Resistors in the diagram are in parallel
Resistors\tNNS\tN\tresistor
in\tIN\t(N\\N)/NP\tin
the\tDT\tNP/N\tthe
diagram\tNN\tN\tdiagram
are\tVBP\t(S\\NP)/PP\tbe
in\tIN\tPP/NP\tin
parallel\tNN\tN\tparallel
.\t.\t\t.
";

    #[test]
    fn dc_circuit_sentence() {
        let triples = extract_triples(&sentence(SENTENCE_A));
        let flat: Vec<String> = triples
            .iter()
            .map(|t| format!("{} / {} / {}", t.subject, t.predicate, t.object))
            .collect();
        assert!(flat.contains(&"dc circuit / consist of / voltage source".to_string()), "{flat:?}");
        assert!(flat.contains(&"voltage source / connect to / resistor".to_string()), "{flat:?}");
        for t in &triples {
            assert_eq!(t.origin, TripleOrigin::RuleExtracted);
            assert_eq!(t.provenance.as_deref(), Some("web01-001"));
        }
    }

    #[test]
    fn copula_preposition_keeps_context_in_display() {
        let triples = extract_triples(&sentence(SENTENCE_B));
        assert_eq!(triples.len(), 1);
        let t = &triples[0];
        assert_eq!(t.subject.canonical(), "resistor");
        assert_eq!(t.predicate.canonical(), "be in");
        assert_eq!(t.object.canonical(), "parallel");
        assert_eq!(t.subject.display(), "Resistors in the diagram");
    }

    #[test]
    fn single_noun_yields_nothing() {
        let triples = extract_triples(&sentence("#S s-1\nResistor\tNN\tN\tresistor\n"));
        assert!(triples.is_empty());
    }

    #[test]
    fn copula_indefinite_is_type_of() {
        let block = "\
#S s-1
A\tDT\tNP/N\ta
battery\tNN\tN\tbattery
is\tVBZ\t(S\\NP)/NP\tbe
a\tDT\tNP/N\ta
voltage\tNN\tN/N\tvoltage
source\tNN\tN\tsource
";
        let triples = extract_triples(&sentence(block));
        assert_eq!(triples.len(), 1);
        assert_eq!(triples[0].subject.canonical(), "battery");
        assert_eq!(triples[0].predicate.canonical(), "type of");
        assert_eq!(triples[0].predicate.display(), "is a");
        assert_eq!(triples[0].object.canonical(), "voltage source");
    }

    #[test]
    fn coordination_fans_out() {
        let block = "\
#S s-1
The\tDT\tNP/N\tthe
battery\tNN\tN\tbattery
and\tCC\tconj\tand
the\tDT\tNP/N\tthe
capacitor\tNN\tN\tcapacitor
are\tVBP\t(S\\NP)/NP\tbe
connected\tVBN\t(S\\NP)/PP\tconnect
to\tTO\tPP/NP\tto
the\tDT\tNP/N\tthe
resistor\tNN\tN\tresistor
";
        let triples = extract_triples(&sentence(block));
        let flat: Vec<String> = triples.iter().map(|t| t.to_string()).collect();
        assert_eq!(
            flat,
            vec![
                "battery | connect to | resistor @ s-1",
                "capacitor | connect to | resistor @ s-1"
            ]
        );
    }

    #[test]
    fn extraction_is_deterministic() {
        let s = sentence(SENTENCE_A);
        let a = extract_triples(&s);
        let b = extract_triples(&s);
        assert_eq!(a, b);
    }

    #[test]
    fn definite_copula_yields_nothing() {
        // `be` + definite NP is not surface-recoverable as a relation.
        let block = "\
#S s-1
The\tDT\tNP/N\tthe
battery\tNN\tN\tbattery
is\tVBZ\t(S\\NP)/NP\tbe
the\tDT\tNP/N\tthe
source\tNN\tN\tsource
";
        assert!(extract_triples(&sentence(block)).is_empty());
    }
}
