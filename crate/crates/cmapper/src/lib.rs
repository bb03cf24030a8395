//! Build conceptual structures from tagged domain corpora.
//!
//! The pipeline runs in four stages:
//!
//! 1. **Ingest** ([`corpus`]) — parse a POS/CCG-tagged corpus file and split
//!    it into ordered segments.
//! 2. **Conceptualize** ([`triples`], [`extract`]) — turn each sentence into
//!    predicate triples, either with shallow rules over the POS tags or by
//!    loading hand-authored triples files.
//! 3. **Classify** ([`taxonomy`], [`registry`]) — map predicate labels onto a
//!    fixed two-tier framework of semantic relations, including inverse
//!    pairings.
//! 4. **Structure** ([`graph`], [`structure`], [`saturation`]) — assemble the
//!    level-0 concept map, contract it through group assignments up to the
//!    single context concept at level 3, and track per-segment saturation of
//!    the concept/relation vocabulary.
//!
//! Maps serialize to DOT, GraphML, and CXL through [`export`].

pub mod corpus;
pub mod export;
pub mod extract;
pub mod graph;
pub mod registry;
pub mod saturation;
pub mod structure;
pub mod taxonomy;
pub mod triples;

pub use corpus::{Corpus, Segmentation, TaggedSentence, TaggedToken};
pub use graph::{ConceptMap, GroupAssignment};
pub use registry::{RelationEntry, RelationRegistry};
pub use saturation::{PlateauCriterion, SaturationSeries, SegmentStats};
pub use structure::ConceptualStructure;
pub use taxonomy::{RelationKind, SemanticCategory};
pub use triples::{Concept, PredicateLabel, Triple, TripleOrigin};

// Book chapters double as doc-tests so the guide can never drift from the
// library surface. `cargo test --doc` compiles and runs every fenced snippet.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/corpus.md")]
    pub struct CorpusChapter;
    #[doc = include_str!("../../../book/src/extraction.md")]
    pub struct ExtractionChapter;
    #[doc = include_str!("../../../book/src/framework.md")]
    pub struct FrameworkChapter;
    #[doc = include_str!("../../../book/src/levels.md")]
    pub struct LevelsChapter;
    #[doc = include_str!("../../../book/src/saturation.md")]
    pub struct SaturationChapter;
    #[doc = include_str!("../../../book/src/formats.md")]
    pub struct FormatsChapter;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct CliChapter;
}
