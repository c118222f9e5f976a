//! Implementations of the four subcommands.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::time::Duration;

use mugie::diag::render_all;
use mugie::genloop::{
    self, derive_campaign_seed, generate_mutants, parse_lineage_header, write_pool_files,
    BatchSpec,
};
use mugie::harness::{self, check_batch, ProgramRun, ResultRow, ToolSpec, SEED_MARKER};
use mugie::metrics::{
    batch_label_from_path, compute_measures, from_result_rows, parse_group_map, render_report,
    CampaignRow, ReportFormat,
};
use mugie::mutops::{OperatorKind, ALL_OPERATORS};
use mugie::typecheck::ValidatedProgram;
use regex::Regex;

use crate::config::{self, CampaignConfig};
use crate::{CheckArgs, CliError, MutateArgs, ReportArgs};

type CliResult = Result<(), CliError>;

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn load_seed(path: &Path) -> Result<(ValidatedProgram, String, String), CliError> {
    let source = read_file(path)?;
    let basename = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let stem = basename.strip_suffix(".bpl").unwrap_or(&basename).to_string();
    let program = mugie::load_program(&source, &basename)
        .map_err(|diags| CliError::Malformed(render_all(&diags)))?;
    Ok((program, basename, stem))
}

// ---------------------------------------------------------------------------
// mutate
// ---------------------------------------------------------------------------

pub fn cmd_mutate(args: &MutateArgs) -> CliResult {
    let (seed, basename, stem) = load_seed(&args.seed)?;
    let spec = build_batch_spec(args)?;

    let pool = generate_mutants(&seed, &basename, &spec)
        .map_err(|e| CliError::Malformed(e.to_string()))?;
    let generated = pool.len() - 1;

    if spec.num_mutants > 0 {
        let written = write_pool_files(&pool, &args.out, &stem)
            .map_err(|e| CliError::Io(format!("cannot write mutants: {e}")))?;
        let files: usize = written.mutants.iter().map(|m| m.paths.len()).sum();
        println!(
            "seed {basename}: requested {}, generated {generated}, attempts used {}; wrote {} mutant files (+ seed copy) to {}",
            spec.num_mutants,
            pool.attempts_used(),
            files,
            args.out.display()
        );
    } else {
        println!(
            "seed {basename}: requested 0, generated 0, attempts used {}; nothing written",
            pool.attempts_used()
        );
    }
    Ok(())
}

fn build_batch_spec(args: &MutateArgs) -> Result<BatchSpec, CliError> {
    let mut spec = match (&args.only, &args.weights) {
        (Some(_), Some(_)) => {
            return Err(CliError::Malformed("--only and --weights are exclusive".into()))
        }
        (Some(op), None) => {
            let kind: OperatorKind = op.parse().map_err(CliError::Malformed)?;
            BatchSpec::single_operator(kind, args.rng_seed)
        }
        (None, Some(list)) => {
            let mut spec = BatchSpec::all_operators(args.rng_seed);
            for kind in ALL_OPERATORS {
                spec.weights.insert(kind, 0.0);
            }
            for pair in list.split(',') {
                let (name, value) = pair
                    .split_once('=')
                    .ok_or_else(|| CliError::Malformed(format!("bad weight `{pair}`, expected OP=W")))?;
                let kind: OperatorKind = name.trim().parse().map_err(CliError::Malformed)?;
                let weight: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Malformed(format!("bad weight value `{value}`")))?;
                spec.weights.insert(kind, weight);
            }
            spec
        }
        (None, None) => BatchSpec::all_operators(args.rng_seed),
    };
    spec.rng_seed = args.rng_seed;
    spec.allow_trigger_mutation |= args.allow_trigger_mutation;
    if let Some(num) = args.num {
        spec = spec.with_num_mutants(num);
    }
    if let Some(max) = args.max_attempts {
        spec = spec.with_max_attempts(max);
    }
    spec.validate().map_err(|e| CliError::Malformed(e.to_string()))?;
    Ok(spec)
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

#[derive(Debug, Default)]
struct Family {
    seed: Option<PathBuf>,
    mutants: BTreeMap<usize, (Option<PathBuf>, Option<PathBuf>)>, // k -> (primary, part2)
}

enum FileRole {
    Seed(String),
    MutantPrimary(String, usize),
    MutantCompanion(String, usize),
    BareSeed(String),
}

fn classify_bpl(base: &str) -> FileRole {
    if let Some(stem) = base.strip_suffix(".seed") {
        return FileRole::Seed(stem.to_string());
    }
    let (trimmed, companion) = match base.strip_suffix(".part2") {
        Some(rest) => (rest, true),
        None => (base, false),
    };
    if let Some((stem, id)) = trimmed.rsplit_once(".m") {
        if let Ok(k) = id.parse::<usize>() {
            return if companion {
                FileRole::MutantCompanion(stem.to_string(), k)
            } else {
                FileRole::MutantPrimary(stem.to_string(), k)
            };
        }
    }
    // Anything else is a seed of its own family, full base name included.
    FileRole::BareSeed(base.to_string())
}

fn scan_mutant_dir(dir: &Path) -> Result<BTreeMap<String, Family>, CliError> {
    let mut families: BTreeMap<String, Family> = BTreeMap::new();
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "bpl"))
        .collect();
    paths.sort();
    for path in paths {
        let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let base = name.strip_suffix(".bpl").unwrap_or(&name);
        match classify_bpl(base) {
            FileRole::Seed(stem) | FileRole::BareSeed(stem) => {
                families.entry(stem).or_default().seed = Some(path);
            }
            FileRole::MutantPrimary(stem, k) => {
                families.entry(stem).or_default().mutants.entry(k).or_default().0 = Some(path);
            }
            FileRole::MutantCompanion(stem, k) => {
                families.entry(stem).or_default().mutants.entry(k).or_default().1 = Some(path);
            }
        }
    }
    Ok(families)
}

fn header_of(path: &Path) -> Option<genloop::LineageHeader> {
    let text = std::fs::read_to_string(path).ok()?;
    let first = text.lines().next()?;
    match parse_lineage_header(first) {
        Ok(header) => header,
        Err(e) => {
            eprintln!("mugie: warning: {}: bad lineage header: {e}", path.display());
            None
        }
    }
}

fn runs_from_families(families: BTreeMap<String, Family>) -> Vec<ProgramRun> {
    let mut runs = Vec::new();
    for (stem, family) in families {
        let Some(seed_path) = family.seed else {
            eprintln!("mugie: warning: mutants of `{stem}` have no seed file; skipping");
            continue;
        };
        let seed_name = header_of(&seed_path)
            .map(|h| h.seed_name)
            .unwrap_or_else(|| format!("{stem}.bpl"));
        runs.push(ProgramRun {
            seed: seed_name.clone(),
            mutant_id: SEED_MARKER.to_string(),
            lineage: String::new(),
            files: vec![seed_path],
        });
        for (k, (primary, companion)) in family.mutants {
            let Some(primary) = primary else {
                eprintln!("mugie: warning: `{stem}.m{k}` has only a companion file; skipping");
                continue;
            };
            let lineage = header_of(&primary)
                .map(|h| genloop::render_ops(&h.ops))
                .unwrap_or_default();
            let mut files = vec![primary];
            files.extend(companion);
            runs.push(ProgramRun {
                seed: seed_name.clone(),
                mutant_id: format!("m{k}"),
                lineage,
                files,
            });
        }
    }
    runs
}

fn tool_spec_from_flags(
    name: Option<&str>,
    template: &str,
    timeout: f64,
    confirm: u32,
    success: Option<&str>,
    failure: Option<&str>,
) -> Result<ToolSpec, CliError> {
    if !timeout.is_finite() || timeout <= 0.0 {
        return Err(CliError::Malformed("--timeout must be positive".into()));
    }
    let default_name = template
        .split_whitespace()
        .next()
        .map(|t| {
            Path::new(t)
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| t.to_string())
        })
        .unwrap_or_else(|| "tool".to_string());
    let mut spec = ToolSpec::new(name.unwrap_or(&default_name), template)
        .map_err(|e| CliError::Malformed(e.to_string()))?;
    spec = spec.with_timeout(Duration::from_secs_f64(timeout)).with_confirm_runs(confirm);
    let success = match success {
        Some(p) => Regex::new(p).map_err(|e| CliError::Malformed(format!("bad success pattern: {e}")))?,
        None => spec.success_pattern.clone(),
    };
    let failure = match failure {
        Some(p) => Regex::new(p).map_err(|e| CliError::Malformed(format!("bad failure pattern: {e}")))?,
        None => spec.failure_pattern.clone(),
    };
    Ok(spec.with_patterns(success, failure))
}

pub fn cmd_check(args: &CheckArgs) -> CliResult {
    let tool = tool_spec_from_flags(
        args.tool_name.as_deref(),
        &args.tool,
        args.timeout,
        args.confirm,
        args.success_pattern.as_deref(),
        args.failure_pattern.as_deref(),
    )?;
    let families = scan_mutant_dir(&args.dir)?;
    let runs = runs_from_families(families);
    if runs.is_empty() {
        return Err(CliError::NothingToDo(format!(
            "no seed or mutant files found in {}",
            args.dir.display()
        )));
    }

    let outcome = check_batch(&tool, &runs, args.workers);
    let out_path = args.out.clone().unwrap_or_else(|| args.dir.join("results.ndjson"));
    harness::write_results(&out_path, &outcome.rows)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out_path.display())))?;

    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for row in &outcome.rows {
        *counts.entry(row.kind.to_string()).or_default() += 1;
    }
    let summary = counts
        .iter()
        .map(|(k, v)| format!("{v} {k}"))
        .collect::<Vec<_>>()
        .join(", ");
    println!("checked {} programs with {}: {summary}; results in {}", outcome.rows.len(), tool.name, out_path.display());

    if !outcome.launch_failures.is_empty() {
        for (id, err) in &outcome.launch_failures {
            eprintln!("mugie: {id}: {err}");
        }
        return Err(CliError::Launch(format!(
            "{} run(s) failed to launch the tool",
            outcome.launch_failures.len()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

pub fn cmd_report(args: &ReportArgs) -> CliResult {
    let groups = match &args.group_map {
        Some(path) => parse_group_map(&read_file(path)?),
        None => HashMap::new(),
    };
    let mut rows: Vec<CampaignRow> = Vec::new();
    for path in &args.results {
        let result_rows = harness::read_results(path).map_err(|e| match e {
            harness::HarnessError::Io(io) => {
                CliError::Io(format!("cannot read {}: {io}", path.display()))
            }
            other => CliError::Malformed(other.to_string()),
        })?;
        let batch = batch_label_from_path(path);
        rows.extend(from_result_rows(&result_rows, &batch, &groups));
    }
    let summaries = compute_measures(&rows).map_err(|e| CliError::Malformed(e.to_string()))?;
    let rendered = render_report(&summaries, args.format);
    match &args.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{rendered}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// campaign
// ---------------------------------------------------------------------------

pub fn cmd_campaign(config_path: &Path) -> CliResult {
    let config = config::parse_config(&read_file(config_path)?).map_err(CliError::Malformed)?;
    run_campaign(&config, config_path)
}

fn run_campaign(config: &CampaignConfig, config_path: &Path) -> CliResult {
    if config.seeds.is_empty() {
        return Err(CliError::NothingToDo("config lists no seeds".into()));
    }
    if config.tools.is_empty() {
        return Err(CliError::NothingToDo("config lists no tools".into()));
    }
    let tools: Vec<ToolSpec> = config
        .tools
        .iter()
        .map(|t| t.to_tool_spec())
        .collect::<Result<_, _>>()
        .map_err(CliError::Malformed)?;
    let batches: Vec<(String, BatchSpec)> = if config.batches.is_empty() {
        config::default_batches()
    } else {
        config
            .batches
            .iter()
            .map(|b| Ok((b.name.clone(), b.to_batch_spec()?)))
            .collect::<Result<_, String>>()
            .map_err(CliError::Malformed)?
    };
    let mut batch_names = std::collections::HashSet::new();
    for (name, _) in &batches {
        if !batch_names.insert(name.clone()) {
            return Err(CliError::Malformed(format!("duplicate batch name `{name}`")));
        }
    }
    let mut seed_names = std::collections::HashSet::new();
    for entry in &config.seeds {
        let basename = entry
            .path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        if !seed_names.insert(basename.clone()) {
            return Err(CliError::Malformed(format!(
                "duplicate seed file name `{basename}` (seed identities are file names)"
            )));
        }
    }

    let out_dir = &config.campaign.out_dir;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_dir.display())))?;
    // Seed paths are relative to the config file's directory.
    let base_dir = config_path.parent().unwrap_or(Path::new("."));

    let mut groups: HashMap<String, String> = HashMap::new();
    let mut loaded: Vec<(ValidatedProgram, String, String)> = Vec::new();
    for entry in &config.seeds {
        let path =
            if entry.path.is_absolute() { entry.path.clone() } else { base_dir.join(&entry.path) };
        match load_seed(&path) {
            Ok(seed) => {
                if let Some(group) = &entry.group {
                    groups.insert(seed.1.clone(), group.clone());
                }
                loaded.push(seed);
            }
            Err(e) => eprintln!("mugie: skipping seed {}: {e}", path.display()),
        }
    }
    if loaded.is_empty() {
        return Err(CliError::NothingToDo("no seed could be loaded".into()));
    }

    // Phase 1: generate every (seed, batch) pool.
    let mut batch_runs: BTreeMap<String, Vec<ProgramRun>> = BTreeMap::new();
    for (seed, basename, stem) in &loaded {
        for (batch_name, batch_spec) in &batches {
            let mut spec = batch_spec.clone();
            spec.rng_seed = derive_campaign_seed(config.campaign.rng_seed, stem, batch_name);
            let pool = match generate_mutants(seed, basename, &spec) {
                Ok(pool) => pool,
                Err(e) => {
                    eprintln!("mugie: skipping {basename} batch {batch_name}: {e}");
                    continue;
                }
            };
            let dir = out_dir.join(stem).join(batch_name);
            let written = write_pool_files(&pool, &dir, stem)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", dir.display())))?;
            let runs = batch_runs.entry(batch_name.clone()).or_default();
            runs.push(ProgramRun {
                seed: basename.clone(),
                mutant_id: SEED_MARKER.to_string(),
                lineage: String::new(),
                files: vec![written.seed_path.clone()],
            });
            for mutant in &written.mutants {
                runs.push(ProgramRun {
                    seed: basename.clone(),
                    mutant_id: mutant.id.clone(),
                    lineage: mutant.lineage.clone(),
                    files: mutant.paths.clone(),
                });
            }
        }
    }

    // Phase 2: verification, one results file per batch.
    let mut all_rows: Vec<CampaignRow> = Vec::new();
    let mut launch_failures = 0usize;
    let mut completed_rows = 0usize;
    for (batch_name, runs) in &batch_runs {
        let mut rows: Vec<ResultRow> = Vec::new();
        for tool in &tools {
            let outcome = check_batch(tool, runs, config.campaign.workers);
            for (id, err) in &outcome.launch_failures {
                eprintln!("mugie: batch {batch_name}, {id}: {err}");
                launch_failures += 1;
            }
            rows.extend(outcome.rows);
        }
        completed_rows += rows.len();
        let results_path = out_dir.join(format!("results.{batch_name}.ndjson"));
        harness::write_results(&results_path, &rows)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", results_path.display())))?;
        all_rows.extend(from_result_rows(&rows, batch_name, &groups));
    }

    // Group map and consolidated report.
    let map_text: String =
        groups.iter().map(|(seed, group)| format!("{seed} {group}\n")).collect();
    std::fs::write(out_dir.join("groups.map"), map_text)
        .map_err(|e| CliError::Io(format!("cannot write group map: {e}")))?;
    let summaries = compute_measures(&all_rows).map_err(|e| CliError::Malformed(e.to_string()))?;
    let csv = render_report(&summaries, ReportFormat::Csv);
    std::fs::write(out_dir.join("report.csv"), csv)
        .map_err(|e| CliError::Io(format!("cannot write report: {e}")))?;
    print!("{}", render_report(&summaries, ReportFormat::Text));

    if completed_rows == 0 {
        if launch_failures > 0 {
            return Err(CliError::Launch("no verification run could launch the tool".into()));
        }
        return Err(CliError::NothingToDo("no verification runs were executed".into()));
    }
    Ok(())
}
