//! `cmapper` — build conceptual structures from tagged corpora.
//!
//! Pipeline state between subcommands is plain files in the documented
//! formats; composability via the shell is the integration story. Exit
//! codes: 0 success, 1 validation failure, 2 input/format error, 3 usage
//! error.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use cmapper::corpus::{parse_corpus, segment_corpus, Corpus};
use cmapper::export::{export_map, import_graphml, ExportFormat, ExportOptions};
use cmapper::extract::extract_corpus_triples;
use cmapper::graph::{build_level0, contract, ConceptMap, GroupAssignment};
use cmapper::registry::RelationRegistry;
use cmapper::saturation::{compute_saturation, export_stats, export_stats_long, PlateauCriterion};
use cmapper::structure::{validate_structure, ConceptualStructure};
use cmapper::triples::{load_manual_triples, write_triples, Triple};

/// Flag or config mistakes that are the caller's to fix (exit 3).
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

#[derive(Parser)]
#[command(name = "cmapper", version, about = "Concept maps and conceptual structures from tagged corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract triples from a tagged corpus into a triples file
    Extract {
        /// Corpus file (`#S`-delimited sentence blocks)
        #[arg(long)]
        corpus: PathBuf,
        /// Output triples file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report triple labels the registry cannot classify
    Classify {
        /// Triples file(s)
        #[arg(long, required = true, num_args = 1..)]
        triples: Vec<PathBuf>,
        /// Relation registry file
        #[arg(long)]
        registry: PathBuf,
    },
    /// Build the level-0 concept map from triples and/or a corpus
    Build {
        /// Triples file(s)
        #[arg(long, num_args = 1..)]
        triples: Vec<PathBuf>,
        /// Relation registry file (unclassified labels are reported)
        #[arg(long)]
        registry: PathBuf,
        /// Corpus file; its rule-extracted triples are added, and triple
        /// provenance is checked against its sentence ids
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Output GraphML file
        #[arg(long, default_value = "level0.graphml")]
        out: PathBuf,
    },
    /// Contract a map one level up through a group assignment
    Level {
        /// Source map (GraphML)
        #[arg(long)]
        map: PathBuf,
        /// Group assignment file
        #[arg(long)]
        assignment: PathBuf,
        /// Output GraphML file (default `level<k+1>.graphml`)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-segment saturation statistics and the plateau verdict
    Saturate(SaturateArgs),
    /// Validate a conceptual-structure directory
    Validate {
        /// Directory holding level0..level3.graphml and level1..3.assign
        #[arg(long)]
        structure: PathBuf,
    },
    /// Serialize a map to DOT, GraphML, or CXL
    Export {
        /// Source map (GraphML)
        #[arg(long)]
        map: PathBuf,
        /// Output format: dot, graphml, or cxl
        #[arg(long)]
        format: String,
        /// Registry file (required with --categories)
        #[arg(long)]
        registry: Option<PathBuf>,
        /// Include provenance data
        #[arg(long)]
        provenance: bool,
        /// Include semantic category data
        #[arg(long)]
        categories: bool,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Registry summary counts
    Stats {
        /// Relation registry file
        #[arg(long)]
        registry: PathBuf,
    },
    /// Run build -> level x3 -> validate -> export from a config file
    Pipeline {
        /// Config file, `key = value` lines
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct SaturateArgs {
    /// Corpus file (defines sentence order and segmentation)
    #[arg(long)]
    corpus: PathBuf,
    /// Manual triples file(s); omit to use rule extraction
    #[arg(long, num_args = 1..)]
    triples: Vec<PathBuf>,
    /// Sentences per segment
    #[arg(long, default_value_t = 31)]
    segment_size: usize,
    /// Max new items per segment for the plateau
    #[arg(long, default_value_t = 2)]
    epsilon: usize,
    /// Consecutive qualifying segments required
    #[arg(long, default_value_t = 2)]
    window: usize,
    /// CSV layout: wide or long
    #[arg(long, default_value = "wide")]
    format: String,
    /// CSV output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = if err.downcast_ref::<UsageError>().is_some() { 3 } else { 2 };
            std::process::exit(code);
        }
    }
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Extract { corpus, out } => cmd_extract(&corpus, out.as_deref()),
        Command::Classify { triples, registry } => cmd_classify(&triples, &registry),
        Command::Build {
            triples,
            registry,
            corpus,
            out,
        } => cmd_build(&triples, &registry, corpus.as_deref(), &out),
        Command::Level { map, assignment, out } => cmd_level(&map, &assignment, out.as_deref()),
        Command::Saturate(args) => cmd_saturate(&args),
        Command::Validate { structure } => cmd_validate(&structure),
        Command::Export {
            map,
            format,
            registry,
            provenance,
            categories,
            out,
        } => cmd_export(&map, &format, registry.as_deref(), provenance, categories, out.as_deref()),
        Command::Stats { registry } => cmd_stats(&registry),
        Command::Pipeline { config } => cmd_pipeline(&config),
    }
}

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("{}", path.display()))
}

/// Write via a temp file + rename so a failed run never leaves partial
/// output behind.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir).with_context(|| format!("{}", dir.display()))?;
    }
    let tmp = path.with_extension(format!(
        "{}.tmp{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or(""),
        std::process::id()
    ));
    {
        let mut file =
            fs::File::create(&tmp).with_context(|| format!("{}", tmp.display()))?;
        file.write_all(contents.as_bytes())
            .with_context(|| format!("{}", tmp.display()))?;
        file.sync_all().ok();
    }
    fs::rename(&tmp, path).with_context(|| format!("{}", path.display()))?;
    Ok(())
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    parse_corpus(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn load_registry(path: &Path) -> Result<RelationRegistry> {
    RelationRegistry::load(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn load_triples_files(paths: &[PathBuf]) -> Result<Vec<Triple>> {
    let mut triples = Vec::new();
    for path in paths {
        let mut loaded =
            load_manual_triples(&read(path)?).with_context(|| format!("{}", path.display()))?;
        triples.append(&mut loaded);
    }
    Ok(triples)
}

fn load_map(path: &Path) -> Result<ConceptMap> {
    import_graphml(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn check_provenance(triples: &[Triple], corpus: &Corpus) -> Result<()> {
    let mut dangling: Vec<&str> = triples
        .iter()
        .filter_map(|t| t.provenance.as_deref())
        .filter(|id| corpus.sentence(id).is_none())
        .collect();
    dangling.sort_unstable();
    dangling.dedup();
    if dangling.is_empty() {
        Ok(())
    } else {
        Err(anyhow!(
            "triple provenance names sentence ids missing from the corpus: {}",
            dangling.join(", ")
        ))
    }
}

fn report_coverage(triples: &[Triple], registry: &RelationRegistry) {
    let labels: Vec<&str> = triples.iter().map(|t| t.predicate.canonical()).collect();
    let missing = registry.coverage(labels.iter().copied());
    if !missing.is_empty() {
        eprintln!(
            "note: {} label(s) not in the registry: {}",
            missing.len(),
            missing.join(", ")
        );
    }
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

fn cmd_extract(corpus_path: &Path, out: Option<&Path>) -> Result<i32> {
    let corpus = load_corpus(corpus_path)?;
    let triples = extract_corpus_triples(&corpus);
    emit(out, &write_triples(&triples))?;
    Ok(0)
}

fn cmd_classify(triples_paths: &[PathBuf], registry_path: &Path) -> Result<i32> {
    let registry = load_registry(registry_path)?;
    let triples = load_triples_files(triples_paths)?;
    let labels: std::collections::BTreeSet<&str> =
        triples.iter().map(|t| t.predicate.canonical()).collect();
    let missing = registry.coverage(labels.iter().copied());
    for label in &missing {
        println!("unclassified: {label}");
    }
    println!(
        "{} of {} distinct labels unclassified",
        missing.len(),
        labels.len()
    );
    Ok(0)
}

fn cmd_build(
    triples_paths: &[PathBuf],
    registry_path: &Path,
    corpus_path: Option<&Path>,
    out: &Path,
) -> Result<i32> {
    if triples_paths.is_empty() && corpus_path.is_none() {
        return Err(usage("build needs --triples and/or --corpus"));
    }
    let registry = load_registry(registry_path)?;
    let corpus = corpus_path.map(load_corpus).transpose()?;
    let mut triples = load_triples_files(triples_paths)?;
    if let Some(corpus) = &corpus {
        check_provenance(&triples, corpus)?;
        triples.extend(extract_corpus_triples(corpus));
    }
    let map = build_level0(&triples)?;
    report_coverage(&triples, &registry);
    let options = ExportOptions::new(ExportFormat::GraphML).with_provenance();
    write_atomic(out, &export_map(&map, &options, Some(&registry))?)?;
    println!(
        "level 0: {} concepts, {} relations -> {}",
        map.node_count(),
        map.edge_count(),
        out.display()
    );
    Ok(0)
}

fn cmd_level(map_path: &Path, assignment_path: &Path, out: Option<&Path>) -> Result<i32> {
    let map = load_map(map_path)?;
    let assignment = GroupAssignment::parse(&read(assignment_path)?)
        .with_context(|| format!("{}", assignment_path.display()))?;
    let next = contract(&map, &assignment)?;
    let default_out = PathBuf::from(format!("level{}.graphml", next.level()));
    let out = out.unwrap_or(&default_out);
    let options = ExportOptions::new(ExportFormat::GraphML).with_provenance();
    write_atomic(out, &export_map(&next, &options, None)?)?;
    println!(
        "level {}: {} concepts, {} relations -> {}",
        next.level(),
        next.node_count(),
        next.edge_count(),
        out.display()
    );
    Ok(0)
}

fn cmd_saturate(args: &SaturateArgs) -> Result<i32> {
    let corpus = load_corpus(&args.corpus)?;
    let criterion = PlateauCriterion::new(args.epsilon, args.window)?;
    let segments = segment_corpus(&corpus, args.segment_size)?;

    let series = if args.triples.is_empty() {
        compute_saturation(&segments, |id| {
            corpus
                .sentence(id)
                .map(cmapper::extract::extract_triples)
                .unwrap_or_default()
        })?
    } else {
        let triples = load_triples_files(&args.triples)?;
        check_provenance(&triples, &corpus)?;
        let unattributed = triples.iter().filter(|t| t.provenance.is_none()).count();
        if unattributed > 0 {
            eprintln!("note: {unattributed} triple(s) without provenance are not counted");
        }
        let mut by_sentence: BTreeMap<String, Vec<Triple>> = BTreeMap::new();
        for t in triples {
            if let Some(id) = t.provenance.clone() {
                by_sentence.entry(id).or_default().push(t);
            }
        }
        compute_saturation(&segments, |id| {
            by_sentence.get(id).cloned().unwrap_or_default()
        })?
    };
    let series = series.with_plateau(&criterion);

    let csv = match args.format.as_str() {
        "wide" => export_stats(&series),
        "long" => export_stats_long(&series),
        other => return Err(usage(format!("unknown CSV format `{other}` (wide|long)"))),
    };
    emit(args.out.as_deref(), &csv)?;
    match series.plateau_at() {
        Some(k) => println!("plateau: segment {k}"),
        None => println!("plateau: none"),
    }
    Ok(0)
}

fn cmd_validate(dir: &Path) -> Result<i32> {
    let structure = ConceptualStructure::load_dir(dir)?;
    let report = validate_structure(&structure);
    print!("{}", report.render());
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_export(
    map_path: &Path,
    format: &str,
    registry_path: Option<&Path>,
    provenance: bool,
    categories: bool,
    out: Option<&Path>,
) -> Result<i32> {
    let format = ExportFormat::parse(format)
        .ok_or_else(|| usage(format!("unknown format `{format}` (dot|graphml|cxl)")))?;
    let map = load_map(map_path)?;
    let registry = registry_path.map(load_registry).transpose()?;
    let mut options = ExportOptions::new(format);
    options.include_provenance = provenance;
    options.include_categories = categories;
    emit(out, &export_map(&map, &options, registry.as_ref())?)?;
    Ok(0)
}

fn cmd_stats(registry_path: &Path) -> Result<i32> {
    let registry = load_registry(registry_path)?;
    let counts = registry.counts();
    println!("relations: {}", counts.relations);
    println!("inverse pair members: {}", counts.inverse_pair_members);
    println!("tier1 categories in use: {}", counts.tier1_in_use);
    println!("tier2 categories in use: {}", counts.tier2_in_use);
    Ok(0)
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

#[derive(Debug, Default)]
struct PipelineConfig {
    corpus: Option<PathBuf>,
    triples: Vec<PathBuf>,
    registry: Option<PathBuf>,
    assignments: [Option<PathBuf>; 3],
    segment_size: usize,
    epsilon: usize,
    window: usize,
    out_dir: PathBuf,
    export_format: ExportFormat,
    include_provenance: bool,
    include_categories: bool,
}

impl PipelineConfig {
    /// `key = value` lines. Relative paths resolve against the working
    /// directory, not the config file.
    fn parse(input: &str) -> Result<PipelineConfig> {
        let mut config = PipelineConfig {
            segment_size: 31,
            epsilon: 2,
            window: 2,
            out_dir: PathBuf::from("."),
            export_format: ExportFormat::Dot,
            ..Default::default()
        };
        let rel = |value: &str| -> PathBuf { PathBuf::from(value) };
        for (idx, raw) in input.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key = value", idx + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "corpus" => config.corpus = Some(rel(value)),
                "triples" => {
                    config.triples = value.split(',').map(|v| rel(v.trim())).collect();
                }
                "registry" => config.registry = Some(rel(value)),
                "assignment1" => config.assignments[0] = Some(rel(value)),
                "assignment2" => config.assignments[1] = Some(rel(value)),
                "assignment3" => config.assignments[2] = Some(rel(value)),
                "segment_size" => config.segment_size = parse_number(key, value)?,
                "epsilon" => config.epsilon = parse_number(key, value)?,
                "window" => config.window = parse_number(key, value)?,
                "out_dir" => config.out_dir = rel(value),
                "export_format" => {
                    config.export_format = ExportFormat::parse(value)
                        .ok_or_else(|| usage(format!("unknown export_format `{value}`")))?;
                }
                "include_provenance" => config.include_provenance = parse_bool(key, value)?,
                "include_categories" => config.include_categories = parse_bool(key, value)?,
                other => return Err(usage(format!("unknown config key `{other}`"))),
            }
        }
        if config.registry.is_none() {
            return Err(usage("config is missing `registry`"));
        }
        if config.corpus.is_none() && config.triples.is_empty() {
            return Err(usage("config needs `corpus` and/or `triples`"));
        }
        if config.assignments.iter().any(Option::is_none) {
            return Err(usage("config needs assignment1, assignment2, and assignment3"));
        }
        Ok(config)
    }
}

fn parse_number(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| usage(format!("`{key}` must be a non-negative integer, got `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(usage(format!("`{key}` must be true or false, got `{value}`"))),
    }
}

fn cmd_pipeline(config_path: &Path) -> Result<i32> {
    let config = PipelineConfig::parse(&read(config_path)?)?;
    let registry = load_registry(config.registry.as_ref().expect("checked"))?;
    let corpus = config.corpus.as_deref().map(load_corpus).transpose()?;

    let mut triples = load_triples_files(&config.triples)?;
    if let Some(corpus) = &corpus {
        check_provenance(&triples, corpus)?;
        let mut extracted = extract_corpus_triples(corpus);
        triples.append(&mut extracted);
    }
    report_coverage(&triples, &registry);

    // Build the four levels, persisting each stage as it completes.
    let graphml = ExportOptions::new(ExportFormat::GraphML).with_provenance();
    let level0 = build_level0(&triples)?;
    write_atomic(
        &config.out_dir.join("level0.graphml"),
        &export_map(&level0, &graphml, None)?,
    )?;
    let mut assignments = Vec::new();
    for path in config.assignments.iter().flatten() {
        assignments
            .push(GroupAssignment::parse(&read(path)?).with_context(|| format!("{}", path.display()))?);
    }
    let mut levels = vec![level0];
    for (i, assignment) in assignments.iter().enumerate() {
        let next = contract(levels.last().expect("non-empty"), assignment)?;
        write_atomic(
            &config.out_dir.join(format!("level{}.graphml", next.level())),
            &export_map(&next, &graphml, None)?,
        )?;
        write_atomic(
            &config.out_dir.join(format!("level{}.assign", i + 1)),
            &assignment.write(),
        )?;
        levels.push(next);
    }

    // Requested export format per level.
    let mut options = ExportOptions::new(config.export_format);
    options.include_provenance = config.include_provenance;
    options.include_categories = config.include_categories;
    for map in &levels {
        let path = config.out_dir.join(format!(
            "level{}.{}",
            map.level(),
            config.export_format.extension()
        ));
        write_atomic(&path, &export_map(map, &options, Some(&registry))?)?;
    }

    // Saturation series when a corpus is configured.
    if let Some(corpus) = &corpus {
        let segments = segment_corpus(corpus, config.segment_size)?;
        let criterion = PlateauCriterion::new(config.epsilon, config.window)?;
        let series = compute_saturation(&segments, |id| {
            corpus
                .sentence(id)
                .map(cmapper::extract::extract_triples)
                .unwrap_or_default()
        })?
        .with_plateau(&criterion);
        write_atomic(&config.out_dir.join("saturation.csv"), &export_stats(&series))?;
        match series.plateau_at() {
            Some(k) => println!("plateau: segment {k}"),
            None => println!("plateau: none"),
        }
    }

    // Validate what was just built.
    let structure = ConceptualStructure::from_parts(levels, assignments);
    let report = validate_structure(&structure);
    print!("{}", report.render());
    Ok(if report.passed() { 0 } else { 1 })
}
