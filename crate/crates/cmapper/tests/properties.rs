//! Property tests for the library invariants.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use cmapper::corpus::{parse_corpus, write_corpus};
use cmapper::export::{export_map, import_graphml, ExportFormat, ExportOptions};
use cmapper::graph::{build_level0, contract, infer_inverse_edges, ConceptMap, Edge, GroupAssignment};
use cmapper::registry::RelationRegistry;
use cmapper::taxonomy::{RelationKind, SemanticCategory};
use cmapper::triples::{load_manual_triples, normalize_label, write_triples, Concept, PredicateLabel, Triple, TripleOrigin};

fn term() -> impl Strategy<Value = String> {
    "[a-z&<>'\"]{1,6}".prop_filter("determiners vanish under normalization", |t| {
        !matches!(t.as_str(), "a" | "an" | "the")
    })
}

fn label() -> impl Strategy<Value = String> {
    prop::collection::vec(term(), 1..3).prop_map(|terms| terms.join(" "))
}

fn concept_labels(max: usize) -> impl Strategy<Value = Vec<String>> {
    prop::collection::btree_set(label(), 2..=max)
        .prop_map(|set| set.into_iter().collect::<Vec<_>>())
}

/// A random map: node labels, edges between distinct node indices, level.
fn concept_map(max_nodes: usize) -> impl Strategy<Value = ConceptMap> {
    (concept_labels(max_nodes), 0u8..=3).prop_flat_map(|(labels, level)| {
        let n = labels.len();
        let edges = prop::collection::vec(
            (0..n, 0..n, label(), prop::collection::btree_set("s-[0-9]{1,2}", 0..3)),
            0..(2 * n),
        );
        (Just(labels), Just(level), edges).prop_map(|(labels, level, raw_edges)| {
            let nodes: BTreeSet<Concept> = labels
                .iter()
                .map(|l| Concept::from_canonical(l).unwrap())
                .collect();
            let mut edges = Vec::new();
            for (i, j, edge_label, provenance) in raw_edges {
                if i == j {
                    continue;
                }
                let subject = Concept::from_canonical(&labels[i]).unwrap();
                let object = Concept::from_canonical(&labels[j]).unwrap();
                if subject == object {
                    continue;
                }
                edges.push(Edge {
                    subject,
                    label: PredicateLabel::from_canonical(&edge_label).unwrap(),
                    object,
                    provenance,
                });
            }
            ConceptMap::from_parts(level, nodes, edges).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn normalization_is_idempotent(surface in "[A-Za-z' ]{1,24}") {
        if let Ok(once) = normalize_label(&surface, None) {
            let twice = normalize_label(&once, None).unwrap();
            prop_assert_eq!(once, twice);
        }
    }

    #[test]
    fn differently_cased_triples_are_equal(s in label(), p in label(), o in label()) {
        prop_assume!(normalize_label(&s, None).unwrap() != normalize_label(&o, None).unwrap());
        let lower = Triple::new(
            Concept::new(&s, None).unwrap(),
            PredicateLabel::new(&p, None).unwrap(),
            Concept::new(&o, None).unwrap(),
            Some("s-1".to_string()),
            TripleOrigin::Manual,
        )
        .unwrap();
        let upper = Triple::new(
            Concept::new(&s.to_uppercase(), None).unwrap(),
            PredicateLabel::new(&p.to_uppercase(), None).unwrap(),
            Concept::new(&o.to_uppercase(), None).unwrap(),
            Some("s-1".to_string()),
            TripleOrigin::Manual,
        )
        .unwrap();
        prop_assert_eq!(lower, upper);
    }

    #[test]
    fn triples_file_round_trips(
        rows in prop::collection::vec((label(), label(), label(), prop::option::of("s-[0-9]{1,2}")), 1..12)
    ) {
        let mut triples = Vec::new();
        for (s, p, o, prov) in rows {
            let subject = Concept::new(&s, None).unwrap();
            let object = Concept::new(&o, None).unwrap();
            if subject == object {
                continue;
            }
            triples.push(
                Triple::new(
                    subject,
                    PredicateLabel::new(&p, None).unwrap(),
                    object,
                    prov,
                    TripleOrigin::Manual,
                )
                .unwrap(),
            );
        }
        let written = write_triples(&triples);
        let reloaded = load_manual_triples(&written).unwrap();
        prop_assert_eq!(&triples, &reloaded);
        prop_assert_eq!(written, write_triples(&reloaded));
    }

    #[test]
    fn graphml_round_trip_identity(map in concept_map(12)) {
        let options = ExportOptions::new(ExportFormat::GraphML).with_provenance();
        let xml = export_map(&map, &options, None).unwrap();
        let back = import_graphml(&xml).unwrap();
        prop_assert_eq!(map, back);
    }

    /// Contraction agrees with a naive quotient-graph construction and
    /// never increases the node count.
    #[test]
    fn contraction_matches_naive_quotient(
        map in concept_map(8),
        group_picks in prop::collection::vec(0usize..4, 8),
        pair_labels in prop::collection::vec(((0usize..4, 0usize..4), label()), 0..6),
    ) {
        prop_assume!(map.level() < 3);
        let group_names = ["alpha group", "beta group", "gamma group", "delta group"];
        let nodes: Vec<Concept> = map.nodes().cloned().collect();
        let mapping: BTreeMap<String, String> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                (n.canonical().to_string(), group_names[group_picks[i % group_picks.len()]].to_string())
            })
            .collect();
        let labels: BTreeMap<(String, String), String> = pair_labels
            .into_iter()
            .map(|((i, j), l)| ((group_names[i].to_string(), group_names[j].to_string()), l))
            .collect();

        let group_pairs: Vec<(&str, &str)> = mapping
            .iter()
            .map(|(c, g)| (c.as_str(), g.as_str()))
            .collect();
        let relation_triples: Vec<(&str, &str, &str)> = labels
            .iter()
            .map(|((f, t), l)| (f.as_str(), t.as_str(), l.as_str()))
            .collect();
        let assignment = GroupAssignment::from_pairs(&group_pairs, &relation_triples).unwrap();

        let contracted = contract(&map, &assignment).unwrap();
        prop_assert!(contracted.node_count() <= map.node_count());
        prop_assert_eq!(contracted.level(), map.level() + 1);

        // Node count is preserved exactly when the assignment is injective
        // over the map's nodes.
        let distinct_groups: BTreeSet<&String> =
            nodes.iter().map(|n| &mapping[n.canonical()]).collect();
        let injective = distinct_groups.len() == nodes.len();
        prop_assert_eq!(contracted.node_count() == map.node_count(), injective);

        // Naive quotient: enumerate ordered group pairs and collect the
        // source edges that fall across them.
        let group_of = |c: &Concept| mapping[c.canonical()].clone();
        let mut expected_nodes: BTreeSet<String> = BTreeSet::new();
        for node in map.nodes() {
            expected_nodes.insert(group_of(node));
        }
        let mut expected_edges: BTreeMap<(String, String), (String, BTreeSet<String>)> = BTreeMap::new();
        for ga in &expected_nodes {
            for gb in &expected_nodes {
                if ga == gb {
                    continue;
                }
                let mut provenance = BTreeSet::new();
                let mut any = false;
                for edge in map.edges() {
                    if &group_of(&edge.subject) == ga && &group_of(&edge.object) == gb {
                        any = true;
                        provenance.extend(edge.provenance.clone());
                    }
                }
                if any {
                    let label = labels
                        .get(&(ga.clone(), gb.clone()))
                        .cloned()
                        .unwrap_or_else(|| "related to".to_string());
                    let label = normalize_label(&label, None).unwrap();
                    expected_edges.insert((ga.clone(), gb.clone()), (label, provenance));
                }
            }
        }
        let actual_nodes: BTreeSet<String> =
            contracted.nodes().map(|n| n.canonical().to_string()).collect();
        prop_assert_eq!(expected_nodes, actual_nodes);
        let actual_edges: BTreeMap<(String, String), (String, BTreeSet<String>)> = contracted
            .edges()
            .map(|e| {
                (
                    (e.subject.canonical().to_string(), e.object.canonical().to_string()),
                    (e.label.canonical().to_string(), e.provenance),
                )
            })
            .collect();
        prop_assert_eq!(expected_edges.len(), contracted.edge_count());
        prop_assert_eq!(expected_edges, actual_edges);
    }

    /// Total provenance is conserved across contraction for the edges that
    /// survive (inter-group ones).
    #[test]
    fn contraction_conserves_intergroup_provenance(
        map in concept_map(8),
        group_picks in prop::collection::vec(0usize..3, 8),
    ) {
        prop_assume!(map.level() < 3);
        let group_names = ["alpha group", "beta group", "gamma group"];
        let nodes: Vec<Concept> = map.nodes().cloned().collect();
        let pairs: Vec<(String, String)> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                (n.canonical().to_string(), group_names[group_picks[i % group_picks.len()]].to_string())
            })
            .collect();
        let pair_refs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let assignment = GroupAssignment::from_pairs(&pair_refs, &[]).unwrap();
        let group_of = |c: &Concept| {
            pairs.iter().find(|(n, _)| n == c.canonical()).unwrap().1.clone()
        };

        let expected: BTreeSet<String> = map
            .edges()
            .filter(|e| group_of(&e.subject) != group_of(&e.object))
            .flat_map(|e| e.provenance)
            .collect();
        let contracted = contract(&map, &assignment).unwrap();
        let actual: BTreeSet<String> = contracted.edges().flat_map(|e| e.provenance).collect();
        prop_assert_eq!(expected, actual);
    }

    /// Inverse inference is idempotent and at most doubles the edge count,
    /// over maps labeled from the seed registry.
    #[test]
    fn inverse_inference_idempotent_on_random_maps(
        rows in prop::collection::vec((0usize..6, 0usize..6, 0usize..6), 1..14)
    ) {
        let registry = seed_registry();
        let concepts = ["battery", "resistor", "switch", "wire", "bulb", "capacitor"];
        let labels = ["have component", "type of", "connected to", "is", "store", "flow through"];
        let mut triples = Vec::new();
        for (i, j, l) in rows {
            if i == j {
                continue;
            }
            triples.push(
                Triple::new(
                    Concept::from_canonical(concepts[i]).unwrap(),
                    PredicateLabel::from_canonical(labels[l]).unwrap(),
                    Concept::from_canonical(concepts[j]).unwrap(),
                    Some(format!("s-{i}{j}")),
                    TripleOrigin::Manual,
                )
                .unwrap(),
            );
        }
        prop_assume!(!triples.is_empty());
        let map = build_level0(&triples).unwrap();
        let once = infer_inverse_edges(&map, &registry).unwrap();
        let twice = infer_inverse_edges(&once, &registry).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert!(once.edge_count() <= 2 * map.edge_count());
        prop_assert!(once.edge_count() >= map.edge_count());
    }

    #[test]
    fn corpus_round_trip(
        sentences in prop::collection::vec(
            prop::collection::vec(("[A-Za-z]{1,8}", "(NN|NNS|VBZ|JJ|DT|IN)", "[a-z]{1,8}"), 1..6),
            1..6,
        )
    ) {
        let mut blocks = Vec::new();
        for (i, tokens) in sentences.iter().enumerate() {
            let mut block = format!("#S gen-{:03}\n", i + 1);
            for (surface, pos, stem) in tokens {
                block.push_str(&format!("{surface}\t{pos}\t\t{stem}\n"));
            }
            blocks.push(block);
        }
        let input = blocks.join("\n");
        let corpus = parse_corpus(&input).unwrap();
        prop_assert_eq!(corpus.len(), sentences.len());
        let written = write_corpus(&corpus);
        let reparsed = parse_corpus(&written).unwrap();
        prop_assert_eq!(&corpus, &reparsed);
        prop_assert_eq!(written, write_corpus(&reparsed));
    }
}

fn seed_registry() -> RelationRegistry {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../registry/dc-circuit.rel");
    RelationRegistry::load(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Every 2-step path made of valid names from the wrong place in the tree
/// must be rejected.
#[test]
fn taxonomy_rejects_all_misplaced_paths() {
    let all = SemanticCategory::all_paths();
    let tier1_names: BTreeSet<&str> = all.iter().filter_map(|c| c.tier1()).collect();
    let tier2_names: BTreeSet<&str> = all.iter().filter_map(|c| c.tier2()).collect();

    let mut checked = 0;
    for kind in RelationKind::ALL {
        let valid_t1: BTreeSet<&str> =
            kind.tier1_categories().iter().map(|(n, _)| *n).collect();
        // Tier 1 names under the wrong kind.
        for name in &tier1_names {
            if !valid_t1.contains(name) {
                assert!(
                    SemanticCategory::new(kind, Some(name), None).is_err(),
                    "{kind} / {name} should be invalid"
                );
                checked += 1;
            }
        }
        // Tier 2 names under the wrong tier 1 (or a tier-1-only name).
        for (t1, children) in kind.tier1_categories() {
            let valid_t2: BTreeSet<&str> = children.iter().copied().collect();
            for name in &tier2_names {
                if !valid_t2.contains(name) {
                    assert!(
                        SemanticCategory::new(kind, Some(t1), Some(name)).is_err(),
                        "{kind} / {t1} / {name} should be invalid"
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100, "expected to enumerate many invalid paths, got {checked}");
}

/// Classification is canonical in the label.
#[test]
fn classification_is_label_canonical() {
    let registry = seed_registry();
    for entry in registry.entries() {
        let canonical = entry.label.canonical();
        let shouty = canonical.to_uppercase();
        assert_eq!(registry.classify(canonical), registry.classify(&shouty));
        assert_eq!(
            registry.classify(canonical),
            registry.classify(&normalize_label(&shouty, None).unwrap())
        );
    }
}

/// A loaded registry survives re-serialization unchanged.
#[test]
fn seed_registry_reserializes_identically() {
    let registry = seed_registry();
    let written = registry.write();
    let reloaded = RelationRegistry::load(&written).unwrap();
    assert_eq!(registry, reloaded);
}
