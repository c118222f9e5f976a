//! The acceptance suite. Each test is one criterion and prints a single
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture`
//! to see the lines for passing criteria too).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use mugie::ast::{program_fingerprint, ClauseKind, Declaration, Expression, Program, Statement};
use mugie::fixtures::{self, write_corpus_file, write_mock_script, MockBehavior};
use mugie::genloop::draw::{uniform_index, ChaCha8Rng, SeedableRng};
use mugie::genloop::{generate_mutants, BatchSpec};
use mugie::harness::{self, run_confirmed, run_one, ToolSpec, VerdictKind, SEED_MARKER};
use mugie::metrics::{compute_measures, from_result_rows, render_pct, CampaignRow};
use mugie::mutops::{apply, enumerate_sites, total_trigger_count, OperatorKind, Site, ALL_OPERATORS};
use mugie::printer::{print, print_expr};
use mugie::typecheck::{check, typecheck};

fn criterion(number: u32, name: &str, body: impl FnOnce() + std::panic::UnwindSafe) {
    match std::panic::catch_unwind(body) {
        Ok(()) => println!("ACCEPTANCE {number:02} {name}: PASS"),
        Err(cause) => {
            println!("ACCEPTANCE {number:02} {name}: FAIL");
            std::panic::resume_unwind(cause);
        }
    }
}

fn mugie_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mugie"))
}

fn run_bin(args: &[&str], cwd: &Path) -> Output {
    mugie_bin().args(args).current_dir(cwd).output().expect("binary runs")
}

fn assert_ok(output: &Output) {
    assert!(
        output.status.success(),
        "command failed\nstdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

// ---------------------------------------------------------------------------
// 1. Round-trip.
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_round_trip() {
    criterion(1, "round-trip parse/print/parse over the corpus", || {
        let start = Instant::now();
        for (name, program) in fixtures::corpus() {
            let reparsed = mugie::parser::parse_or_panic(&print(&program), &name);
            assert_eq!(reparsed, mugie::normalize(&program), "{name} round-trip");
        }
        let elapsed = start.elapsed();
        assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}, budget 5 s");
    });
}

// ---------------------------------------------------------------------------
// 2. Operator well-formedness, exhaustive.
// ---------------------------------------------------------------------------

#[test]
fn criterion_02_operator_well_formedness() {
    criterion(2, "every mutant of every site typechecks", || {
        let start = Instant::now();
        let mut applied = 0usize;
        for (name, program) in fixtures::corpus() {
            for kind in ALL_OPERATORS {
                for site in enumerate_sites(&program, kind) {
                    let result = apply(&program, kind, &site)
                        .unwrap_or_else(|e| panic!("{name}: {kind} {site:?}: {e}"));
                    let unit = match &result.companion {
                        Some(companion) => result.primary.concat(companion),
                        None => result.primary.clone(),
                    };
                    let diags = check(&unit, &name);
                    assert!(diags.is_empty(), "{name}: {kind} {site:?}: {diags:#?}");
                    applied += 1;
                }
            }
        }
        assert!(applied >= 400, "suspiciously few sites: {applied}");
        let elapsed = start.elapsed();
        assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}, budget 60 s");
    });
}

// ---------------------------------------------------------------------------
// 3. Operator shape invariants over >= 1000 random draws.
// ---------------------------------------------------------------------------

fn sorted_debug<T: std::fmt::Debug>(items: &[T]) -> Vec<String> {
    let mut out: Vec<String> = items.iter().map(|d| format!("{d:?}")).collect();
    out.sort();
    out
}

fn flatten_conjuncts(exprs: &[Expression]) -> Vec<String> {
    fn split(e: &Expression, out: &mut Vec<String>) {
        match e {
            Expression::Binary { op: mugie::ast::BinaryOp::And, left, right } => {
                split(left, out);
                split(right, out);
            }
            other => out.push(print_expr(other)),
        }
    }
    let mut out = Vec::new();
    for e in exprs {
        split(e, &mut out);
    }
    out.sort();
    out
}

fn requires_of(program: &Program, name: &str) -> Vec<Expression> {
    clause_list(program, name, ClauseKind::Requires)
}

fn ensures_of(program: &Program, name: &str) -> Vec<Expression> {
    clause_list(program, name, ClauseKind::Ensures)
}

fn clause_list(program: &Program, name: &str, kind: ClauseKind) -> Vec<Expression> {
    for decl in &program.declarations {
        if let Declaration::Procedure(p) = decl {
            if p.name == name {
                let list =
                    if kind == ClauseKind::Requires { &p.spec.requires } else { &p.spec.ensures };
                return list.iter().map(|c| c.expr.clone()).collect();
            }
        }
    }
    panic!("no procedure {name}")
}

#[test]
fn criterion_03_operator_shape_invariants() {
    criterion(3, "shape invariants over 1000+ random (program, operator, site) draws", || {
        let corpus = fixtures::corpus();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut draws = 0usize;
        let mut per_op: BTreeMap<OperatorKind, usize> = BTreeMap::new();

        while draws < 1200 {
            let (name, program) = &corpus[uniform_index(&mut rng, corpus.len())];
            let applicable: Vec<(OperatorKind, Vec<Site>)> = ALL_OPERATORS
                .iter()
                .map(|&k| (k, enumerate_sites(program, k)))
                .filter(|(_, sites)| !sites.is_empty())
                .collect();
            assert!(!applicable.is_empty(), "{name} has no applicable operator");
            let (kind, sites) = &applicable[uniform_index(&mut rng, applicable.len())];
            let site = &sites[uniform_index(&mut rng, sites.len())];
            let result = apply(program, *kind, site).expect("enumerated site applies");
            let mutant = &result.primary;
            draws += 1;
            *per_op.entry(*kind).or_default() += 1;

            match (kind, site) {
                (OperatorKind::S1, _) => {
                    assert_eq!(
                        sorted_debug(&program.declarations),
                        sorted_debug(&mutant.declarations),
                        "{name}: S1 multiset"
                    );
                }
                (OperatorKind::L1, Site::LocalPair { owner, .. }) => {
                    let body = |p: &Program| -> Vec<Statement> {
                        match &p.declarations[*owner] {
                            Declaration::Procedure(d) => d.body.as_ref().unwrap().statements.clone(),
                            Declaration::Implementation(d) => d.body.statements.clone(),
                            _ => panic!(),
                        }
                    };
                    assert_eq!(
                        sorted_debug(&body(program)),
                        sorted_debug(&body(mutant)),
                        "{name}: L1 multiset"
                    );
                }
                (OperatorKind::L6, Site::ClauseSwap { elem, kind: clause_kind, .. }) => {
                    // The swapped list keeps its multiset of clauses.
                    let list = |p: &Program| -> Vec<String> {
                        match clause_kind {
                            ClauseKind::Requires | ClauseKind::Ensures => {
                                let Declaration::Procedure(d) = &p.declarations[elem.decl] else {
                                    panic!()
                                };
                                let clauses = if *clause_kind == ClauseKind::Requires {
                                    &d.spec.requires
                                } else {
                                    &d.spec.ensures
                                };
                                sorted_debug(clauses)
                            }
                            ClauseKind::Invariant => {
                                let Statement::While(w) =
                                    mugie::mutops::statement_at(p, elem).unwrap()
                                else {
                                    panic!()
                                };
                                sorted_debug(&w.invariants)
                            }
                            ClauseKind::Assert => {
                                let block = mugie::mutops::block_at(p, elem).unwrap();
                                sorted_debug(&block.statements)
                            }
                        }
                    };
                    assert_eq!(list(program), list(mutant), "{name}: L6 multiset");
                }
                (OperatorKind::L4, Site::ClausePair { procedure, .. }) => {
                    let before = requires_of(program, procedure);
                    let after = requires_of(mutant, procedure);
                    assert_eq!(after.len() + 1, before.len(), "{name}: L4 count");
                    assert_eq!(
                        flatten_conjuncts(&before),
                        flatten_conjuncts(&after),
                        "{name}: L4 conjunction"
                    );
                }
                (OperatorKind::L5, Site::ClausePair { procedure, .. }) => {
                    let before = ensures_of(program, procedure);
                    let after = ensures_of(mutant, procedure);
                    assert_eq!(after.len() + 1, before.len(), "{name}: L5 count");
                    assert_eq!(
                        flatten_conjuncts(&before),
                        flatten_conjuncts(&after),
                        "{name}: L5 conjunction"
                    );
                }
                (OperatorKind::L8, Site::IfAt { path }) => {
                    let Statement::If(before) = mugie::mutops::statement_at(program, path).unwrap()
                    else {
                        panic!()
                    };
                    let Statement::If(after) = mugie::mutops::statement_at(mutant, path).unwrap()
                    else {
                        panic!()
                    };
                    assert_eq!(
                        after.condition,
                        Expression::not(before.condition.clone()),
                        "{name}: L8 negation"
                    );
                    assert_eq!(&after.then_branch, before.else_branch.as_ref().unwrap());
                    assert_eq!(after.else_branch.as_ref().unwrap(), &before.then_branch);
                }
                (OperatorKind::G1, Site::ClauseInsert { elem, kind: clause_kind, pos }) => {
                    // Conservativity: deleting the inserted true clause
                    // restores the original fingerprint.
                    let restored =
                        mugie::mutops::remove_true_clause(mutant, elem, *clause_kind, *pos)
                            .expect("the inserted clause is removable");
                    assert_eq!(
                        program_fingerprint(&restored),
                        program_fingerprint(program),
                        "{name}: G1 insert+delete does not restore the fingerprint"
                    );
                }
                (OperatorKind::G2, _) => {
                    assert_eq!(
                        total_trigger_count(mutant) + 1,
                        total_trigger_count(program),
                        "{name}: G2 trigger count"
                    );
                }
                (OperatorKind::S5, Site::ProcedureName { name: proc }) => {
                    assert_eq!(mutant.declarations.len(), program.declarations.len() + 1);
                    let Declaration::Procedure(split) = mutant
                        .declarations
                        .iter()
                        .find(|d| matches!(d, Declaration::Procedure(p) if &p.name == proc))
                        .unwrap()
                    else {
                        panic!()
                    };
                    assert!(split.body.is_none(), "{name}: S5 leaves the body in place");
                }
                (OperatorKind::S6, _) => {
                    let companion = result.companion.as_ref().expect("S6 yields a companion");
                    let mut all = mutant.declarations.clone();
                    all.extend(companion.declarations.iter().cloned());
                    assert_eq!(
                        sorted_debug(&program.declarations),
                        sorted_debug(&all),
                        "{name}: S6 multiset over both files"
                    );
                }
                (OperatorKind::L2, _) => {
                    // Splitting never loses a variable.
                    assert_eq!(
                        count_local_names(program),
                        count_local_names(mutant),
                        "{name}: L2 variable multiset"
                    );
                }
                (kind, site) => panic!("unexpected combination {kind} {site:?}"),
            }
        }
        assert!(draws >= 1000, "only {draws} draws");
        // Every operator with corpus coverage was actually exercised.
        for kind in ALL_OPERATORS {
            assert!(per_op.get(&kind).copied().unwrap_or(0) > 0, "{kind} never drawn");
        }
    });
}

fn count_local_names(program: &Program) -> usize {
    let mut count = 0;
    for decl in &program.declarations {
        let body = match decl {
            Declaration::Procedure(p) => p.body.as_ref(),
            Declaration::Implementation(i) => Some(&i.body),
            _ => None,
        };
        if let Some(body) = body {
            for stmt in &body.statements {
                if let Statement::LocalVarDecl { names, .. } = stmt {
                    count += names.len();
                }
            }
        }
    }
    count
}

// ---------------------------------------------------------------------------
// 4. Permutation closure against the brute-force oracle.
// ---------------------------------------------------------------------------

/// Independent oracle: all 5! = 120 permutations of the declarations,
/// fingerprinted via exhaustive enumeration.
fn permutation_oracle(program: &Program) -> BTreeSet<mugie::Fingerprint> {
    fn heap_permutations(
        items: &mut Vec<Declaration>,
        k: usize,
        out: &mut BTreeSet<mugie::Fingerprint>,
    ) {
        if k <= 1 {
            out.insert(program_fingerprint(&Program::new(items.clone())));
            return;
        }
        for i in 0..k {
            heap_permutations(items, k - 1, out);
            if k.is_multiple_of(2) {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    let mut items = program.declarations.clone();
    let mut out = BTreeSet::new();
    let n = items.len();
    heap_permutations(&mut items, n, &mut out);
    out
}

#[test]
fn criterion_04_permutation_closure() {
    criterion(4, "S1 closure on the motivating example equals all 120 permutations", || {
        let start = Instant::now();
        let program = fixtures::build_listing1();
        let oracle = permutation_oracle(&program);
        assert_eq!(oracle.len(), 120, "oracle must see 5! distinct texts");

        let seed = typecheck(program, "listing1.bpl").unwrap();
        let spec = BatchSpec::single_operator(OperatorKind::S1, 2024)
            .with_num_mutants(119)
            .with_max_attempts(100_000);
        let pool = generate_mutants(&seed, "listing1.bpl", &spec).unwrap();
        let pool_fps: BTreeSet<mugie::Fingerprint> =
            pool.entries().iter().map(|e| e.record.fingerprint).collect();
        assert_eq!(pool.len(), 120, "pool holds the seed plus 119 mutants");
        assert_eq!(pool_fps, oracle, "pool is exactly the permutation closure");

        // Asking for more than exists stops via max_attempts at capacity.
        let spec = BatchSpec::single_operator(OperatorKind::S1, 2024)
            .with_num_mutants(200)
            .with_max_attempts(100_000);
        let pool = generate_mutants(&seed, "listing1.bpl", &spec).unwrap();
        assert_eq!(pool.len(), 120, "capacity exhausted at 120 members");
        assert_eq!(pool.attempts_used(), 100_000, "loop stopped via max_attempts");

        let elapsed = start.elapsed();
        assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}, budget 30 s");
    });
}

// ---------------------------------------------------------------------------
// 5. S5 capacity: 2^D reachable programs for D inline definitions.
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_s5_capacity() {
    criterion(5, "S5-only pool on a 3-definition seed has exactly 2^3 members", || {
        let (_, program) =
            fixtures::corpus().into_iter().find(|(n, _)| n == "split3.bpl").unwrap();
        assert_eq!(enumerate_sites(&program, OperatorKind::S5).len(), 3);

        // Oracle: exhaustive closure under S5 applications.
        let mut seen = BTreeSet::new();
        let mut frontier = vec![program.clone()];
        seen.insert(program_fingerprint(&program));
        while let Some(current) = frontier.pop() {
            for site in enumerate_sites(&current, OperatorKind::S5) {
                let next = apply(&current, OperatorKind::S5, &site).unwrap().primary;
                if seen.insert(program_fingerprint(&next)) {
                    frontier.push(next);
                }
            }
        }
        assert_eq!(seen.len(), 8, "closure is 2^3 programs");

        // The generation loop reaches exactly the same capacity.
        let seed = typecheck(program, "split3.bpl").unwrap();
        let spec = BatchSpec::single_operator(OperatorKind::S5, 5)
            .with_num_mutants(50)
            .with_max_attempts(5_000);
        let pool = generate_mutants(&seed, "split3.bpl", &spec).unwrap();
        assert_eq!(pool.len(), 8);
        let pool_fps: BTreeSet<_> = pool.entries().iter().map(|e| e.record.fingerprint).collect();
        assert_eq!(pool_fps, seen);
    });
}

// ---------------------------------------------------------------------------
// 6. Generation determinism at the file level.
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_generation_determinism() {
    criterion(6, "identical flags give byte-identical files; new rng seed changes them", || {
        let dir = tempfile::tempdir().unwrap();
        write_corpus_file(dir.path(), "listing1.bpl").unwrap();
        let snapshot = |out: &str| -> BTreeMap<String, Vec<u8>> {
            let mut map = BTreeMap::new();
            for entry in std::fs::read_dir(dir.path().join(out)).unwrap() {
                let path = entry.unwrap().path();
                map.insert(
                    path.file_name().unwrap().to_string_lossy().into_owned(),
                    std::fs::read(&path).unwrap(),
                );
            }
            map
        };
        for (out, rng) in [("a", "11"), ("b", "11"), ("c", "12")] {
            let output = run_bin(
                &[
                    "mutate", "--seed", "listing1.bpl", "--num", "25", "--rng-seed", rng,
                    "--out", out,
                ],
                dir.path(),
            );
            assert_ok(&output);
        }
        let a = snapshot("a");
        let b = snapshot("b");
        let c = snapshot("c");
        assert_eq!(a, b, "same flags and rng seed must give byte-identical trees");
        assert_ne!(a, c, "a different rng seed must change at least one file");
    });
}

// ---------------------------------------------------------------------------
// 7. Harness classification against the five mocks.
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_harness_classification() {
    criterion(7, "the five mock verifiers produce exactly the expected verdicts", || {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.bpl");
        std::fs::write(&input, "const c: int;\n").unwrap();
        let tool = |script: &Path| -> ToolSpec {
            ToolSpec::new("mock", format!("{} {{files}}", script.display()))
                .unwrap()
                .with_timeout(Duration::from_secs(1))
                .with_confirm_runs(10)
        };

        let mut verdicts = BTreeSet::new();

        let verify = dir.path().join("verify.sh");
        write_mock_script(&verify, &MockBehavior::AlwaysVerify).unwrap();
        let v = run_one(&tool(&verify), std::slice::from_ref(&input)).unwrap();
        assert_eq!(v.kind, VerdictKind::Verified);
        verdicts.insert("Verified");

        let fail = dir.path().join("fail.sh");
        write_mock_script(&fail, &MockBehavior::AlwaysFail).unwrap();
        let v = run_one(&tool(&fail), std::slice::from_ref(&input)).unwrap();
        assert_eq!(v.kind, VerdictKind::VerificationFailure);
        verdicts.insert("VerificationFailure");

        let marker = dir.path().join("marker.sh");
        write_mock_script(&marker, &MockBehavior::FailOnMarker { marker: "const c".into() })
            .unwrap();
        let v = run_one(&tool(&marker), std::slice::from_ref(&input)).unwrap();
        assert_eq!(v.kind, VerdictKind::ToolError);
        verdicts.insert("ToolError");

        // sleep-then-verify(5 s) under a 1 s timeout: Timeout with a wall
        // time in [1.0, 2.5].
        let sleepy = dir.path().join("sleep.sh");
        write_mock_script(&sleepy, &MockBehavior::SleepThenVerify { seconds: 5.0 }).unwrap();
        let v = run_one(&tool(&sleepy), std::slice::from_ref(&input)).unwrap();
        assert_eq!(v.kind, VerdictKind::Timeout);
        assert!(
            (1.0..=2.5).contains(&v.wall_time_seconds),
            "timeout wall time {} outside [1.0, 2.5]",
            v.wall_time_seconds
        );
        verdicts.insert("Timeout");

        // flaky-timeout succeeding on run 4 < 10 confirmation runs: the
        // non-timeout verdict wins.
        let counter = dir.path().join("counter");
        let flaky = dir.path().join("flaky.sh");
        write_mock_script(
            &flaky,
            &MockBehavior::FlakyTimeout {
                counter_file: counter.clone(),
                succeed_on_run: 4,
                sleep_seconds: 5.0,
            },
        )
        .unwrap();
        let v = run_confirmed(&tool(&flaky), std::slice::from_ref(&input)).unwrap();
        assert_eq!(v.kind, VerdictKind::Verified);
        let runs: u32 = std::fs::read_to_string(&counter).unwrap().trim().parse().unwrap();
        assert_eq!(runs, 4);
        verdicts.insert("Verified-after-flake");

        assert_eq!(
            verdicts,
            BTreeSet::from([
                "Verified",
                "VerificationFailure",
                "ToolError",
                "Timeout",
                "Verified-after-flake"
            ])
        );
    });
}

// ---------------------------------------------------------------------------
// 8. Metrics oracle.
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_metrics_oracle() {
    criterion(8, "hand-computed measures match; timeout mean never exceeds fail mean", || {
        // 4 seeds, 3 verified; one verified seed fails 2 of 10 mutants.
        let mut rows = Vec::new();
        let mk = |seed: &str, id: &str, kind: VerdictKind| CampaignRow {
            seed: seed.into(),
            group: "all".into(),
            batch: "Mstar".into(),
            tool: "mock".into(),
            mutant_id: id.into(),
            kind,
        };
        for (seed, seed_kind, failing) in [
            ("s1.bpl", VerdictKind::Verified, 2usize),
            ("s2.bpl", VerdictKind::Verified, 0),
            ("s3.bpl", VerdictKind::Verified, 0),
            ("s4.bpl", VerdictKind::ToolError, 5),
        ] {
            rows.push(mk(seed, SEED_MARKER, seed_kind));
            for k in 1..=10 {
                let kind = if k <= failing {
                    VerdictKind::VerificationFailure
                } else {
                    VerdictKind::Verified
                };
                rows.push(mk(seed, &format!("m{k}"), kind));
            }
        }
        let summaries = compute_measures(&rows).unwrap();
        assert_eq!(summaries.len(), 1);
        let s = &summaries[0];
        assert_eq!(s.num_pass, 3);
        assert_eq!(s.num_exists_fail, 1);
        assert_eq!(render_pct(s.pct_exists_fail.as_ref()), "33.33");
        assert_eq!(render_pct(s.mean_pct_fail.as_ref()), "6.67");
        assert_eq!(render_pct(s.mean_pct_fail_given_exists.as_ref()), "20.00");

        // Randomized fixtures: timeouts are a subset of failures, so the
        // timeout mean never exceeds the fail mean.
        let mut rng = ChaCha8Rng::seed_from_u64(88);
        for round in 0..60 {
            let mut rows = Vec::new();
            let seeds = 1 + uniform_index(&mut rng, 5);
            for s in 0..seeds {
                let seed = format!("s{s}.bpl");
                let seed_kind = match uniform_index(&mut rng, 4) {
                    0 => VerdictKind::VerificationFailure,
                    _ => VerdictKind::Verified,
                };
                rows.push(mk(&seed, SEED_MARKER, seed_kind));
                let mutants = uniform_index(&mut rng, 12);
                for k in 0..mutants {
                    let kind = match uniform_index(&mut rng, 4) {
                        0 => VerdictKind::Timeout,
                        1 => VerdictKind::VerificationFailure,
                        2 => VerdictKind::ToolError,
                        _ => VerdictKind::Verified,
                    };
                    rows.push(mk(&seed, &format!("m{k}"), kind));
                }
            }
            for summary in compute_measures(&rows).unwrap() {
                match (&summary.mean_pct_timeout, &summary.mean_pct_fail) {
                    (Some(timeout), Some(fail)) => {
                        assert!(timeout <= fail, "round {round}: timeout mean exceeds fail mean")
                    }
                    (None, None) => {}
                    other => panic!("round {round}: inconsistent means {other:?}"),
                }
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 9. End-to-end brittleness detection campaign.
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_end_to_end_campaign() {
    criterion(9, "scripted brittleness detection flags exactly the marked seed", || {
        let start = Instant::now();
        let dir = tempfile::tempdir().unwrap();
        write_corpus_file(dir.path(), "guard_first.bpl").unwrap();
        write_corpus_file(dir.path(), "plain4.bpl").unwrap();

        // The mock fails exactly when the designated declaration no longer
        // opens the file: printed declarations are separated by blank
        // lines, so a preceding declaration puts "\n\nconst guard0..." in
        // the text.
        let marker = "\n\nconst guard0: int;";
        let mock = dir.path().join("mock.sh");
        write_mock_script(&mock, &MockBehavior::FailOnMarker { marker: marker.into() }).unwrap();

        let config = format!(
            r#"
[campaign]
out_dir = "camp"
workers = 2
rng_seed = 1234

[[seeds]]
path = "guard_first.bpl"
group = "marked"

[[seeds]]
path = "plain4.bpl"
group = "clean"

[[tools]]
name = "mock"
command = "{mock} {{files}}"
timeout_seconds = 5.0
confirm_runs = 2

[[batches]]
name = "S1"
only = "S1"
num_mutants = 20
"#,
            mock = mock.display()
        );
        std::fs::write(dir.path().join("c.toml"), config).unwrap();
        let output = run_bin(&["campaign", "--config", "c.toml"], dir.path());
        assert_ok(&output);

        let report = std::fs::read_to_string(dir.path().join("camp/report.csv")).unwrap();
        let mut by_group = HashMap::new();
        for line in report.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            by_group.insert(fields[0].to_string(), fields[4].parse::<usize>().unwrap());
        }
        assert_eq!(by_group.get("marked"), Some(&1), "marked seed must show one ∃fail seed");
        assert_eq!(by_group.get("clean"), Some(&0), "clean seed must stay robust");

        // Exactly the mutants that displaced the designated declaration
        // failed.
        let rows = harness::read_results(&dir.path().join("camp/results.S1.ndjson")).unwrap();
        let mut checked = 0;
        for row in rows.iter().filter(|r| r.seed == "guard_first.bpl" && r.mutant_id != SEED_MARKER)
        {
            let path = dir.path().join(format!("camp/guard_first/S1/guard_first.{}.bpl", row.mutant_id));
            let text = std::fs::read_to_string(&path).unwrap();
            let displaced = text.contains(marker);
            let failed = row.kind != VerdictKind::Verified;
            assert_eq!(
                displaced, failed,
                "{}: displacement={displaced} but verdict={:?}",
                row.mutant_id, row.kind
            );
            checked += 1;
        }
        assert!(checked >= 10, "expected a real batch, saw {checked} mutants");
        // Both kinds occur: some mutants keep the declaration first.
        let kinds: BTreeSet<VerdictKind> = rows
            .iter()
            .filter(|r| r.seed == "guard_first.bpl" && r.mutant_id != SEED_MARKER)
            .map(|r| r.kind)
            .collect();
        assert!(kinds.contains(&VerdictKind::Verified));
        assert!(kinds.contains(&VerdictKind::ToolError));

        let elapsed = start.elapsed();
        assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}, budget 2 min");
    });
}

// ---------------------------------------------------------------------------
// 10. Optional real-verifier integration (skipped when absent).
// ---------------------------------------------------------------------------

fn find_on_path(binary: &str) -> Option<std::path::PathBuf> {
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path)
        .map(|p| p.join(binary))
        .find(|candidate| candidate.is_file())
}

#[test]
fn criterion_10_real_verifier_integration() {
    let Some(boogie) = find_on_path("boogie") else {
        println!("ACCEPTANCE 10 real verifier integration: SKIPPED (boogie not on PATH)");
        return;
    };
    criterion(10, "all 120 permutations run through a real verifier", || {
        let dir = tempfile::tempdir().unwrap();
        write_corpus_file(dir.path(), "listing1.bpl").unwrap();
        let output = run_bin(
            &[
                "mutate", "--seed", "listing1.bpl", "--only", "S1", "--num", "119",
                "--max-attempts", "100000", "--rng-seed", "2024", "--out", "perms",
            ],
            dir.path(),
        );
        assert_ok(&output);
        let tool = format!("{} {{files}}", boogie.display());
        let output = run_bin(
            &[
                "check", "--dir", "perms", "--tool", &tool, "--tool-name", "boogie",
                "--timeout", "20", "--confirm", "2", "--workers", "4",
            ],
            dir.path(),
        );
        assert_ok(&output);
        let rows = harness::read_results(&dir.path().join("perms/results.ndjson")).unwrap();
        assert_eq!(rows.len(), 120, "seed plus 119 permutations");
        let verified = rows.iter().filter(|r| r.kind == VerdictKind::Verified).count();
        // The exact split is version-dependent; log it, never assert it.
        println!(
            "ACCEPTANCE 10 note: boogie verified {verified}/120 permutations (version-dependent)"
        );
        let summaries =
            compute_measures(&from_result_rows(&rows, "S1", &HashMap::new())).unwrap();
        assert_eq!(summaries.len(), 1);
    });
}

