//! Built-in corpus and mock verifiers used by the test and acceptance suites.
//!
//! The corpus programs are small, hand-written, and collectively give every
//! mutation operator at least one applicable site. The mock verifiers are
//! plain POSIX shell scripts that speak the Boogie-style output conventions
//! the harness classifier expects, so the harness code path is identical for
//! mocks and real tools.

use std::io;
use std::path::{Path, PathBuf};

use crate::ast::Program;
use crate::parser::parse_or_panic;

/// The motivating five-declaration program: a function with an axiom, a
/// sorted constant map with an axiom, and a procedure whose proof needs both.
pub const LISTING1: &str = include_str!("../fixtures/corpus/listing1.bpl");

/// Sources of the whole corpus, by file name.
pub const CORPUS_SOURCES: [(&str, &str); 23] = [
    ("listing1.bpl", LISTING1),
    ("guarded_spec.bpl", include_str!("../fixtures/corpus/guarded_spec.bpl")),
    ("locals.bpl", include_str!("../fixtures/corpus/locals.bpl")),
    ("branches.bpl", include_str!("../fixtures/corpus/branches.bpl")),
    ("loops.bpl", include_str!("../fixtures/corpus/loops.bpl")),
    ("asserts.bpl", include_str!("../fixtures/corpus/asserts.bpl")),
    ("triggers.bpl", include_str!("../fixtures/corpus/triggers.bpl")),
    ("split3.bpl", include_str!("../fixtures/corpus/split3.bpl")),
    ("implementations.bpl", include_str!("../fixtures/corpus/implementations.bpl")),
    ("calls.bpl", include_str!("../fixtures/corpus/calls.bpl")),
    ("globals.bpl", include_str!("../fixtures/corpus/globals.bpl")),
    ("functions.bpl", include_str!("../fixtures/corpus/functions.bpl")),
    ("axioms.bpl", include_str!("../fixtures/corpus/axioms.bpl")),
    ("maps.bpl", include_str!("../fixtures/corpus/maps.bpl")),
    ("quantifiers.bpl", include_str!("../fixtures/corpus/quantifiers.bpl")),
    ("typedecls.bpl", include_str!("../fixtures/corpus/typedecls.bpl")),
    ("free_clauses.bpl", include_str!("../fixtures/corpus/free_clauses.bpl")),
    ("attributes.bpl", include_str!("../fixtures/corpus/attributes.bpl")),
    ("mixed_big.bpl", include_str!("../fixtures/corpus/mixed_big.bpl")),
    ("blocks.bpl", include_str!("../fixtures/corpus/blocks.bpl")),
    ("guard_first.bpl", include_str!("../fixtures/corpus/guard_first.bpl")),
    ("plain4.bpl", include_str!("../fixtures/corpus/plain4.bpl")),
    ("unnamed_params.bpl", include_str!("../fixtures/corpus/unnamed_params.bpl")),
];

/// Parses the motivating example.
pub fn build_listing1() -> Program {
    parse_or_panic(LISTING1, "listing1.bpl")
}

/// Parses the whole corpus. Every program typechecks (a test pins that).
pub fn corpus() -> Vec<(String, Program)> {
    CORPUS_SOURCES
        .iter()
        .map(|(name, source)| (name.to_string(), parse_or_panic(source, name)))
        .collect()
}

/// Writes `source` into `dir` so CLI-level tests can mutate corpus files
/// from disk.
pub fn write_corpus_file(dir: &Path, name: &str) -> io::Result<PathBuf> {
    let source = CORPUS_SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| io::Error::new(io::ErrorKind::NotFound, format!("no corpus file {name}")))?;
    let path = dir.join(name);
    std::fs::write(&path, source)?;
    Ok(path)
}

/// What a mock verifier does with its input files.
#[derive(Debug, Clone, PartialEq)]
pub enum MockBehavior {
    /// Prints a verified summary and exits 0.
    AlwaysVerify,
    /// Prints a postcondition complaint plus a one-error summary; exit 0
    /// (some verifier versions exit 0 on verification failures).
    AlwaysFail,
    /// Exits 1 with a type-error message exactly when any input file
    /// contains `marker` (which may span lines); verifies otherwise.
    FailOnMarker { marker: String },
    /// Sleeps, then verifies. Under a shorter harness timeout this is a
    /// reliable timeout.
    SleepThenVerify { seconds: f64 },
    /// Sleeps (forcing timeouts) until the `succeed_on_run`-th invocation,
    /// counted in `counter_file`, then verifies quickly.
    FlakyTimeout { counter_file: PathBuf, succeed_on_run: u32, sleep_seconds: f64 },
}

const VERIFIED_LINE: &str = "Boogie program verifier finished with 1 verified, 0 errors";

/// Renders the POSIX shell script implementing `behavior`.
pub fn mock_script(behavior: &MockBehavior) -> String {
    match behavior {
        MockBehavior::AlwaysVerify => format!("#!/bin/sh\necho \"{VERIFIED_LINE}\"\nexit 0\n"),
        MockBehavior::AlwaysFail => "#!/bin/sh\n\
             echo \"input.bpl(1,1): Error BP5003: A postcondition might not hold on this return path.\"\n\
             echo \"Boogie program verifier finished with 0 verified, 1 error\"\n\
             exit 0\n"
            .to_string(),
        MockBehavior::FailOnMarker { marker } => format!(
            "#!/bin/sh\n\
             marker={marker}\n\
             for f in \"$@\"; do\n\
             \x20 contents=$(cat \"$f\")\n\
             \x20 case \"$contents\" in\n\
             \x20   *\"$marker\"*)\n\
             \x20     echo \"$f(1,1): Error: type error triggered by declaration order\"\n\
             \x20     exit 1\n\
             \x20     ;;\n\
             \x20 esac\n\
             done\n\
             echo \"{VERIFIED_LINE}\"\n\
             exit 0\n",
            marker = shell_single_quote(marker),
        ),
        MockBehavior::SleepThenVerify { seconds } => format!(
            "#!/bin/sh\nsleep {seconds}\necho \"{VERIFIED_LINE}\"\nexit 0\n"
        ),
        MockBehavior::FlakyTimeout { counter_file, succeed_on_run, sleep_seconds } => format!(
            "#!/bin/sh\n\
             counter={counter}\n\
             count=$(cat \"$counter\" 2>/dev/null || echo 0)\n\
             count=$((count + 1))\n\
             echo \"$count\" > \"$counter\"\n\
             if [ \"$count\" -ge {succeed_on_run} ]; then\n\
             \x20 echo \"{VERIFIED_LINE}\"\n\
             \x20 exit 0\n\
             fi\n\
             sleep {sleep_seconds}\n\
             echo \"{VERIFIED_LINE}\"\n\
             exit 0\n",
            counter = shell_single_quote(&counter_file.display().to_string()),
        ),
    }
}

/// Single-quotes a string for POSIX shell, handling embedded quotes and
/// newlines (single-quoted strings pass newlines through verbatim).
fn shell_single_quote(s: &str) -> String {
    let mut out = String::from("'");
    for c in s.chars() {
        if c == '\'' {
            out.push_str("'\\''");
        } else {
            out.push(c);
        }
    }
    out.push('\'');
    out
}

/// Writes an executable mock script at `path`.
pub fn write_mock_script(path: &Path, behavior: &MockBehavior) -> io::Result<()> {
    std::fs::write(path, mock_script(behavior))?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        let mut perms = std::fs::metadata(path)?.permissions();
        perms.set_mode(0o755);
        std::fs::set_permissions(path, perms)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mutops::{enumerate_sites, OperatorKind, ALL_OPERATORS};
    use crate::typecheck::check;

    #[test]
    fn listing1_has_five_declarations() {
        assert_eq!(build_listing1().declarations.len(), 5);
    }

    #[test]
    fn independently_parsed_copies_share_a_fingerprint() {
        let first = crate::ast::program_fingerprint(&parse_or_panic(LISTING1, "a.bpl"));
        let second = crate::ast::program_fingerprint(&parse_or_panic(LISTING1, "b.bpl"));
        assert_eq!(first, second);
    }

    #[test]
    fn every_corpus_program_typechecks() {
        for (name, program) in corpus() {
            let diags = check(&program, &name);
            assert!(diags.is_empty(), "{name} has diagnostics: {diags:#?}");
        }
    }

    #[test]
    fn every_operator_has_a_site_somewhere_in_the_corpus() {
        let corpus = corpus();
        for kind in ALL_OPERATORS {
            let covered = corpus.iter().any(|(_, p)| !enumerate_sites(p, kind).is_empty());
            assert!(covered, "operator {kind} has no applicable site in the corpus");
        }
    }

    #[test]
    fn split3_has_exactly_three_inline_definitions() {
        let program = parse_or_panic(
            CORPUS_SOURCES.iter().find(|(n, _)| *n == "split3.bpl").unwrap().1,
            "split3.bpl",
        );
        assert_eq!(enumerate_sites(&program, OperatorKind::S5).len(), 3);
    }

    #[test]
    fn listing1_typechecks_under_every_permutation() {
        let program = build_listing1();
        let decls = program.declarations;
        let mut indices = [0usize, 1, 2, 3, 4];
        let mut count = 0usize;
        permute(&mut indices, 0, &mut |perm| {
            let permuted =
                Program::new(perm.iter().map(|&i| decls[i].clone()).collect::<Vec<_>>());
            assert!(check(&permuted, "perm.bpl").is_empty(), "permutation {perm:?} failed");
            count += 1;
        });
        assert_eq!(count, 120);
    }

    fn permute(items: &mut [usize; 5], k: usize, visit: &mut impl FnMut(&[usize; 5])) {
        if k == items.len() {
            visit(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permute(items, k + 1, visit);
            items.swap(k, i);
        }
    }

    #[test]
    fn mock_scripts_are_deterministic_and_quote_markers() {
        let behavior = MockBehavior::FailOnMarker { marker: "\n\nconst guard0: int;".into() };
        let a = mock_script(&behavior);
        assert_eq!(a, mock_script(&behavior));
        assert!(a.contains("marker='\n\nconst guard0: int;'"), "got: {a}");

        let tricky = MockBehavior::FailOnMarker { marker: "it's".into() };
        assert!(mock_script(&tricky).contains(r"marker='it'\''s'"));
    }
}
