//! Tagged-corpus ingest and segmentation.
//!
//! The corpus file format is line-oriented UTF-8 text:
//!
//! ```text
//! ## comment lines start with two hashes
//! #S web01-001
//! #T One simple DC circuit consists of a voltage source
//! One<TAB>CD<TAB>N/N<TAB>one
//! simple<TAB>JJ<TAB>N/N<TAB>simple
//! ...
//!
//! #S web01-002
//! ...
//! ```
//!
//! A sentence block opens with `#S <sentence-id>`, optionally followed by
//! `#T <raw text>`, then one line per token with exactly four TAB-separated
//! fields `surface<TAB>pos<TAB>ccg<TAB>stem`. The CCG field may be empty
//! (supertagger coverage gaps are normal); POS and stem are required.
//! Blocks are separated by a blank line.
//!
//! Sentence order is preserved exactly as read — segmentation for the
//! saturation analysis depends on it.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("line {line}: expected 4 tab-separated fields `surface\\tpos\\tccg\\tstem`, found {found}")]
    MalformedTokenLine { line: usize, found: usize },
    #[error("line {line}: {what} must not be empty")]
    EmptyField { line: usize, what: &'static str },
    #[error("line {line}: token line outside a sentence block (missing `#S` header)")]
    TokenOutsideBlock { line: usize },
    #[error("line {line}: `#S` header without a sentence id")]
    MissingSentenceId { line: usize },
    #[error("line {line}: duplicate sentence id `{id}`")]
    DuplicateSentenceId { line: usize, id: String },
    #[error("sentence `{id}` has no tokens")]
    EmptySentence { id: String },
    #[error("input contains no sentence blocks")]
    EmptyCorpus,
    #[error("segment size must be at least 1")]
    ZeroSegmentSize,
    #[error("non-final segment holds {found} sentences, expected {expected}")]
    RaggedSegment { expected: usize, found: usize },
    #[error("sentence `{id}` appears in more than one segment")]
    RepeatedSentence { id: String },
}

/// One token with its annotations. The stem is stored lowercase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedToken {
    pub surface: String,
    pub pos: String,
    pub ccg: String,
    pub stem: String,
}

/// A sentence as an ordered token sequence with a stable id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedSentence {
    pub id: String,
    pub tokens: Vec<TaggedToken>,
    pub raw_text: String,
}

impl TaggedSentence {
    /// Source identifier: everything before the last `-` of the id, or the
    /// whole id when there is none.
    pub fn source(&self) -> &str {
        match self.id.rsplit_once('-') {
            Some((source, _)) => source,
            None => &self.id,
        }
    }
}

/// An ordered collection of tagged sentences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    sentences: Vec<TaggedSentence>,
    source_count: usize,
}

impl Corpus {
    pub fn sentences(&self) -> &[TaggedSentence] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Number of distinct source identifiers among the sentence ids.
    pub fn source_count(&self) -> usize {
        self.source_count
    }

    pub fn sentence(&self, id: &str) -> Option<&TaggedSentence> {
        self.sentences.iter().find(|s| s.id == id)
    }
}

/// Contiguous, ordered, non-overlapping windows of sentence ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    segment_size: usize,
    segments: Vec<Vec<String>>,
}

impl Segmentation {
    /// Assemble a segmentation directly. All segments except possibly the
    /// last must hold exactly `segment_size` ids, and no id may appear in
    /// two segments.
    pub fn new(segment_size: usize, segments: Vec<Vec<String>>) -> Result<Segmentation, CorpusError> {
        if segment_size == 0 {
            return Err(CorpusError::ZeroSegmentSize);
        }
        for segment in segments.iter().rev().skip(1) {
            if segment.len() != segment_size {
                return Err(CorpusError::RaggedSegment {
                    expected: segment_size,
                    found: segment.len(),
                });
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for id in segments.iter().flatten() {
            if !seen.insert(id) {
                return Err(CorpusError::RepeatedSentence { id: id.clone() });
            }
        }
        Ok(Segmentation {
            segment_size,
            segments,
        })
    }

    pub fn segment_size(&self) -> usize {
        self.segment_size
    }

    pub fn segments(&self) -> &[Vec<String>] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

/// Parse the corpus file format. Sentence ids must be unique; order is
/// preserved.
pub fn parse_corpus(input: &str) -> Result<Corpus, CorpusError> {
    let mut sentences: Vec<TaggedSentence> = Vec::new();
    let mut seen_ids = std::collections::BTreeSet::new();

    let mut current: Option<(TaggedSentence, usize)> = None;

    let finish = |current: &mut Option<(TaggedSentence, usize)>,
                      sentences: &mut Vec<TaggedSentence>|
     -> Result<(), CorpusError> {
        if let Some((mut sentence, _)) = current.take() {
            if sentence.tokens.is_empty() {
                return Err(CorpusError::EmptySentence { id: sentence.id });
            }
            if sentence.raw_text.is_empty() {
                sentence.raw_text = sentence
                    .tokens
                    .iter()
                    .map(|t| t.surface.as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
            }
            sentences.push(sentence);
        }
        Ok(())
    };

    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        if raw.starts_with("##") {
            continue;
        }
        if raw.trim().is_empty() {
            finish(&mut current, &mut sentences)?;
            continue;
        }
        if let Some(rest) = raw.strip_prefix("#S") {
            finish(&mut current, &mut sentences)?;
            let id = rest.trim();
            if id.is_empty() {
                return Err(CorpusError::MissingSentenceId { line: line_no });
            }
            if !seen_ids.insert(id.to_string()) {
                return Err(CorpusError::DuplicateSentenceId {
                    line: line_no,
                    id: id.to_string(),
                });
            }
            current = Some((
                TaggedSentence {
                    id: id.to_string(),
                    tokens: Vec::new(),
                    raw_text: String::new(),
                },
                line_no,
            ));
            continue;
        }
        if let Some(rest) = raw.strip_prefix("#T") {
            if let Some((sentence, _)) = current.as_mut() {
                sentence.raw_text = rest.trim().to_string();
            }
            continue;
        }
        let Some((sentence, _)) = current.as_mut() else {
            return Err(CorpusError::TokenOutsideBlock { line: line_no });
        };
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 4 {
            return Err(CorpusError::MalformedTokenLine {
                line: line_no,
                found: fields.len(),
            });
        }
        let (surface, pos, ccg, stem) = (fields[0], fields[1], fields[2], fields[3]);
        if surface.is_empty() {
            return Err(CorpusError::EmptyField { line: line_no, what: "surface" });
        }
        if pos.is_empty() {
            return Err(CorpusError::EmptyField { line: line_no, what: "pos" });
        }
        if stem.is_empty() {
            return Err(CorpusError::EmptyField { line: line_no, what: "stem" });
        }
        sentence.tokens.push(TaggedToken {
            surface: surface.to_string(),
            pos: pos.to_string(),
            ccg: ccg.to_string(),
            stem: stem.to_lowercase(),
        });
    }
    finish(&mut current, &mut sentences)?;

    if sentences.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let source_count = sentences
        .iter()
        .map(|s| s.source())
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    Ok(Corpus {
        sentences,
        source_count,
    })
}

/// Serialize a corpus back to the file format. Parsing the output yields an
/// identical [`Corpus`].
pub fn write_corpus(corpus: &Corpus) -> String {
    let mut out = String::new();
    for (i, sentence) in corpus.sentences.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "#S {}", sentence.id);
        let _ = writeln!(out, "#T {}", sentence.raw_text);
        for t in &sentence.tokens {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", t.surface, t.pos, t.ccg, t.stem);
        }
    }
    out
}

/// Split a corpus into contiguous segments of `segment_size` sentences; the
/// last segment may be short.
pub fn segment_corpus(corpus: &Corpus, segment_size: usize) -> Result<Segmentation, CorpusError> {
    if segment_size == 0 {
        return Err(CorpusError::ZeroSegmentSize);
    }
    let segments = corpus
        .sentences
        .chunks(segment_size)
        .map(|chunk| chunk.iter().map(|s| s.id.clone()).collect())
        .collect();
    Ok(Segmentation {
        segment_size,
        segments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_BLOCK: &str = "#S src1-001\nOne\tCD\tN/N\tone\nsimple\tJJ\tN/N\tsimple\nDC\tNNP\tN/N\tdc\nresistor\tNN\tN\tresistor\n";

    #[test]
    fn parse_single_block() {
        let corpus = parse_corpus(ONE_BLOCK).unwrap();
        assert_eq!(corpus.len(), 1);
        assert_eq!(corpus.sentences()[0].id, "src1-001");
        assert_eq!(corpus.sentences()[0].tokens.len(), 4);
        assert_eq!(corpus.source_count(), 1);
    }

    #[test]
    fn parse_two_blocks_in_order() {
        let input = format!("{ONE_BLOCK}\n#S src2-001\nBattery\tNN\tN\tbattery\n");
        let corpus = parse_corpus(&input).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.sentences()[0].id, "src1-001");
        assert_eq!(corpus.sentences()[1].id, "src2-001");
        assert_eq!(corpus.source_count(), 2);
    }

    #[test]
    fn parse_rejects_wrong_field_count() {
        let input = "#S s-1\na\tNN\ta\n";
        let err = parse_corpus(input).unwrap_err();
        assert_eq!(err, CorpusError::MalformedTokenLine { line: 2, found: 3 });
    }

    #[test]
    fn parse_rejects_duplicate_id() {
        let input = "#S s-1\na\tNN\t\ta\n\n#S s-1\nb\tNN\t\tb\n";
        let err = parse_corpus(input).unwrap_err();
        assert_eq!(
            err,
            CorpusError::DuplicateSentenceId {
                line: 4,
                id: "s-1".to_string()
            }
        );
    }

    #[test]
    fn parse_rejects_empty_input() {
        assert_eq!(parse_corpus("").unwrap_err(), CorpusError::EmptyCorpus);
        assert_eq!(parse_corpus("## only comments\n").unwrap_err(), CorpusError::EmptyCorpus);
    }

    #[test]
    fn parse_allows_empty_ccg_only() {
        let ok = "#S s-1\na\tNN\t\ta\n";
        assert!(parse_corpus(ok).is_ok());
        let bad = "#S s-1\na\t\tN\ta\n";
        assert_eq!(
            parse_corpus(bad).unwrap_err(),
            CorpusError::EmptyField { line: 2, what: "pos" }
        );
    }

    #[test]
    fn parse_lowercases_stems() {
        let corpus = parse_corpus("#S s-1\nDC\tNNP\t\tDC\n").unwrap();
        assert_eq!(corpus.sentences()[0].tokens[0].stem, "dc");
    }

    #[test]
    fn raw_text_defaults_to_joined_surfaces() {
        let corpus = parse_corpus("#S s-1\nBattery\tNN\t\tbattery\nstores\tVBZ\t\tstore\n").unwrap();
        assert_eq!(corpus.sentences()[0].raw_text, "Battery stores");
    }

    #[test]
    fn roundtrip_is_stable() {
        let input = format!("{ONE_BLOCK}\n#S src2-001\n#T Battery text\nBattery\tNN\tN\tbattery\n");
        let corpus = parse_corpus(&input).unwrap();
        let written = write_corpus(&corpus);
        let reparsed = parse_corpus(&written).unwrap();
        assert_eq!(corpus, reparsed);
        assert_eq!(written, write_corpus(&reparsed));
    }

    fn corpus_of(n: usize) -> Corpus {
        let blocks: Vec<String> = (0..n)
            .map(|i| format!("#S s-{:03}\nword\tNN\t\tword\n", i + 1))
            .collect();
        parse_corpus(&blocks.join("\n")).unwrap()
    }

    #[test]
    fn segments_of_ten_by_three() {
        let seg = segment_corpus(&corpus_of(10), 3).unwrap();
        let sizes: Vec<usize> = seg.segments().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![3, 3, 3, 1]);
    }

    #[test]
    fn segments_of_sample_size() {
        // 308 sentences at 31 per segment: nine full segments and one of 29.
        let seg = segment_corpus(&corpus_of(308), 31).unwrap();
        assert_eq!(seg.len(), 10);
        let sizes: Vec<usize> = seg.segments().iter().map(Vec::len).collect();
        assert_eq!(&sizes[..9], &[31; 9]);
        assert_eq!(sizes[9], 29);
    }

    #[test]
    fn segment_exact_fit() {
        let seg = segment_corpus(&corpus_of(5), 5).unwrap();
        assert_eq!(seg.len(), 1);
        assert_eq!(seg.segments()[0].len(), 5);
    }

    #[test]
    fn segment_size_zero_rejected() {
        assert_eq!(
            segment_corpus(&corpus_of(3), 0).unwrap_err(),
            CorpusError::ZeroSegmentSize
        );
    }

    #[test]
    fn segmentation_rejects_repeated_ids() {
        let err = Segmentation::new(
            1,
            vec![vec!["s-1".to_string()], vec!["s-1".to_string()]],
        )
        .unwrap_err();
        assert_eq!(err, CorpusError::RepeatedSentence { id: "s-1".to_string() });
    }

    #[test]
    fn segments_concatenate_to_corpus_order() {
        let corpus = corpus_of(17);
        let seg = segment_corpus(&corpus, 4).unwrap();
        let concat: Vec<&String> = seg.segments().iter().flatten().collect();
        let ids: Vec<&String> = corpus.sentences().iter().map(|s| &s.id).collect();
        assert_eq!(concat, ids);
    }
}
