//! Segment-wise saturation of the concept/relation vocabulary.
//!
//! Processing a corpus segment by segment, the number of *new* distinct
//! concepts and relation labels per segment dwindles as the domain
//! vocabulary saturates. Once the new counts stay at or below a small
//! epsilon for a run of consecutive segments, the relation framework can be
//! considered stable enough to build on. Counting is over distinct
//! canonical labels, not occurrences.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::corpus::Segmentation;
use crate::triples::Triple;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SaturationError {
    #[error("cannot compute saturation over an empty segmentation")]
    EmptySegmentation,
    #[error("plateau window must be at least 1")]
    ZeroWindow,
}

/// Per-segment new and cumulative distinct counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentStats {
    /// 1-based segment index.
    pub segment_index: usize,
    pub new_concepts: usize,
    pub new_relations: usize,
    pub cum_concepts: usize,
    pub cum_relations: usize,
}

impl SegmentStats {
    pub fn new_total(&self) -> usize {
        self.new_concepts + self.new_relations
    }
}

/// When to declare the vocabulary stationary: at most `epsilon` new items
/// per segment, sustained for `window` consecutive segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlateauCriterion {
    pub epsilon: usize,
    pub window: usize,
}

impl PlateauCriterion {
    pub fn new(epsilon: usize, window: usize) -> Result<PlateauCriterion, SaturationError> {
        if window == 0 {
            return Err(SaturationError::ZeroWindow);
        }
        Ok(PlateauCriterion { epsilon, window })
    }
}

impl Default for PlateauCriterion {
    fn default() -> Self {
        PlateauCriterion {
            epsilon: 2,
            window: 2,
        }
    }
}

/// The full per-segment series, with the plateau index once detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationSeries {
    stats: Vec<SegmentStats>,
    plateau_at: Option<usize>,
}

impl SaturationSeries {
    /// Build a series from per-segment `(new_concepts, new_relations)`
    /// counts, deriving the cumulative columns.
    pub fn from_new_counts(counts: &[(usize, usize)]) -> SaturationSeries {
        let mut stats = Vec::with_capacity(counts.len());
        let (mut cc, mut cr) = (0, 0);
        for (i, (nc, nr)) in counts.iter().enumerate() {
            cc += nc;
            cr += nr;
            stats.push(SegmentStats {
                segment_index: i + 1,
                new_concepts: *nc,
                new_relations: *nr,
                cum_concepts: cc,
                cum_relations: cr,
            });
        }
        SaturationSeries {
            stats,
            plateau_at: None,
        }
    }

    pub fn stats(&self) -> &[SegmentStats] {
        &self.stats
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    pub fn plateau_at(&self) -> Option<usize> {
        self.plateau_at
    }

    /// Final cumulative `(concepts, relations)` totals.
    pub fn final_totals(&self) -> (usize, usize) {
        self.stats
            .last()
            .map(|s| (s.cum_concepts, s.cum_relations))
            .unwrap_or((0, 0))
    }

    /// Detect and record the plateau under `criterion`.
    pub fn with_plateau(mut self, criterion: &PlateauCriterion) -> SaturationSeries {
        self.plateau_at = detect_plateau(&self, criterion);
        self
    }
}

/// Fold segments in order, counting distinct canonical concepts and
/// relation labels never seen in an earlier segment. `triple_source` maps a
/// sentence id to that sentence's triples and must be deterministic.
pub fn compute_saturation<F>(
    segments: &Segmentation,
    mut triple_source: F,
) -> Result<SaturationSeries, SaturationError>
where
    F: FnMut(&str) -> Vec<Triple>,
{
    if segments.is_empty() {
        return Err(SaturationError::EmptySegmentation);
    }
    let mut seen_concepts: BTreeSet<String> = BTreeSet::new();
    let mut seen_relations: BTreeSet<String> = BTreeSet::new();
    let mut counts = Vec::with_capacity(segments.len());
    for segment in segments.segments() {
        let (mut new_c, mut new_r) = (0, 0);
        for sentence_id in segment {
            for triple in triple_source(sentence_id) {
                for concept in [&triple.subject, &triple.object] {
                    if seen_concepts.insert(concept.canonical().to_string()) {
                        new_c += 1;
                    }
                }
                if seen_relations.insert(triple.predicate.canonical().to_string()) {
                    new_r += 1;
                }
            }
        }
        counts.push((new_c, new_r));
    }
    Ok(SaturationSeries::from_new_counts(&counts))
}

/// The smallest segment index `k` such that every segment in
/// `[k, k + window - 1]` introduces at most `epsilon` new items. `None` when
/// no such run completes inside the series.
pub fn detect_plateau(series: &SaturationSeries, criterion: &PlateauCriterion) -> Option<usize> {
    series
        .stats
        .windows(criterion.window)
        .position(|run| run.iter().all(|s| s.new_total() <= criterion.epsilon))
        .map(|k| k + 1)
}

/// Wide CSV: one row per segment, exact integer formatting, trailing
/// newline.
pub fn export_stats(series: &SaturationSeries) -> String {
    let mut out = String::from("segment,new_concepts,new_relations,cum_concepts,cum_relations\n");
    for s in &series.stats {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.segment_index, s.new_concepts, s.new_relations, s.cum_concepts, s.cum_relations
        );
    }
    out
}

/// Long (plot-friendly) CSV: one `segment,series,value` row per measurement.
pub fn export_stats_long(series: &SaturationSeries) -> String {
    let mut out = String::from("segment,series,value\n");
    for s in &series.stats {
        for (name, value) in [
            ("new_concepts", s.new_concepts),
            ("new_relations", s.new_relations),
            ("cum_concepts", s.cum_concepts),
            ("cum_relations", s.cum_relations),
        ] {
            let _ = writeln!(out, "{},{},{}", s.segment_index, name, value);
        }
    }
    out
}
