//! Robustness measures over campaign rows and report rendering.
//!
//! For each (group, tool, batch) cell, over the seeds whose own run
//! verified:
//!
//! * `n_pass` — number of verified seeds;
//! * `n_exists_fail` — verified seeds with at least one non-verified mutant;
//! * `pct_exists_fail` — `100 * n_exists_fail / n_pass`;
//! * `mean_pct_fail` — mean over verified seeds of the percentage of their
//!   mutants that fail (any non-Verified verdict);
//! * `mean_pct_timeout` — same with timeouts only (timeouts are a subset of
//!   failures, so this never exceeds `mean_pct_fail`);
//! * `mean_pct_fail_given_exists` — the failing-mutant percentage averaged
//!   over the seeds that have at least one failing mutant.
//!
//! Percentages are exact rationals internally and are rounded to two
//! decimals only when rendered. An empty denominator set renders as the
//! literal `n/a`, never as 0. Verified seeds that produced no mutants are
//! excluded from the means and counted separately.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::harness::{ResultRow, VerdictKind, SEED_MARKER};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("mutant rows for seed `{seed}` (tool `{tool}`, batch `{batch}`) have no SEED row")]
    MissingSeedRow { seed: String, tool: String, batch: String },
    #[error("duplicate SEED row for seed `{seed}` (tool `{tool}`, batch `{batch}`)")]
    DuplicateSeedRow { seed: String, tool: String, batch: String },
}

/// One verdict with its aggregation coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignRow {
    pub seed: String,
    pub group: String,
    pub batch: String,
    pub tool: String,
    pub mutant_id: String,
    pub kind: VerdictKind,
}

/// Attaches group and batch labels to harness result rows. Seeds missing
/// from the group map fall into group `all`.
pub fn from_result_rows(
    rows: &[ResultRow],
    batch: &str,
    groups: &HashMap<String, String>,
) -> Vec<CampaignRow> {
    rows.iter()
        .map(|row| CampaignRow {
            seed: row.seed.clone(),
            group: group_of(&row.seed, groups),
            batch: batch.to_string(),
            tool: row.tool.clone(),
            mutant_id: row.mutant_id.clone(),
            kind: row.kind,
        })
        .collect()
}

fn group_of(seed: &str, groups: &HashMap<String, String>) -> String {
    if let Some(g) = groups.get(seed) {
        return g.clone();
    }
    let stem = seed.strip_suffix(".bpl").unwrap_or(seed);
    groups.get(stem).cloned().unwrap_or_else(|| "all".to_string())
}

/// Parses a seed-to-group map: one `<seed> <group>` pair per line, `#`
/// comments allowed.
pub fn parse_group_map(text: &str) -> HashMap<String, String> {
    let mut map = HashMap::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        if let (Some(seed), Some(group)) = (parts.next(), parts.next()) {
            map.insert(seed.to_string(), group.to_string());
        }
    }
    map
}

/// Batch label for a results file: the file stem, minus a `results.` prefix
/// when present (the campaign writes `results.<batch>.ndjson`). A bare
/// `results.ndjson` gets the label `default`.
pub fn batch_label_from_path(path: &Path) -> String {
    let stem = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let stem = stem.strip_suffix(".ndjson").unwrap_or(&stem);
    let stem = stem.strip_suffix(".json").unwrap_or(stem);
    let label = stem.strip_prefix("results.").unwrap_or(stem);
    if label == "results" || label.is_empty() {
        "default".to_string()
    } else {
        label.to_string()
    }
}

/// The measures of one (group, tool, batch) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSummary {
    pub group: String,
    pub tool: String,
    pub batch: String,
    pub num_pass: usize,
    pub num_exists_fail: usize,
    pub pct_exists_fail: Option<BigRational>,
    pub mean_pct_fail: Option<BigRational>,
    pub mean_pct_timeout: Option<BigRational>,
    pub mean_pct_fail_given_exists: Option<BigRational>,
    /// Verified seeds with zero generated mutants; excluded from the means.
    pub seeds_without_mutants: usize,
}

#[derive(Debug, Default, Clone)]
struct SeedStats {
    seed_verdict: Option<VerdictKind>,
    mutants: u64,
    failing: u64,
    timeouts: u64,
}

/// Computes one summary per (group, tool, batch) cell, sorted by those keys.
pub fn compute_measures(rows: &[CampaignRow]) -> Result<Vec<MeasureSummary>, MetricsError> {
    // cell key -> seed name -> stats
    let mut cells: BTreeMap<(String, String, String), BTreeMap<String, SeedStats>> =
        BTreeMap::new();
    for row in rows {
        let cell = cells
            .entry((row.group.clone(), row.tool.clone(), row.batch.clone()))
            .or_default();
        let stats = cell.entry(row.seed.clone()).or_default();
        if row.mutant_id == SEED_MARKER {
            if stats.seed_verdict.is_some() {
                return Err(MetricsError::DuplicateSeedRow {
                    seed: row.seed.clone(),
                    tool: row.tool.clone(),
                    batch: row.batch.clone(),
                });
            }
            stats.seed_verdict = Some(row.kind);
        } else {
            stats.mutants += 1;
            if row.kind != VerdictKind::Verified {
                stats.failing += 1;
            }
            if row.kind == VerdictKind::Timeout {
                stats.timeouts += 1;
            }
        }
    }

    let mut summaries = Vec::new();
    for ((group, tool, batch), seeds) in cells {
        let mut num_pass = 0usize;
        let mut num_exists_fail = 0usize;
        let mut seeds_without_mutants = 0usize;
        let mut fail_fractions: Vec<BigRational> = Vec::new();
        let mut timeout_fractions: Vec<BigRational> = Vec::new();
        let mut exists_fail_fractions: Vec<BigRational> = Vec::new();

        for (seed, stats) in &seeds {
            let Some(verdict) = stats.seed_verdict else {
                return Err(MetricsError::MissingSeedRow {
                    seed: seed.clone(),
                    tool: tool.clone(),
                    batch: batch.clone(),
                });
            };
            if verdict != VerdictKind::Verified {
                continue;
            }
            num_pass += 1;
            if stats.mutants == 0 {
                seeds_without_mutants += 1;
                continue;
            }
            let total = BigInt::from(stats.mutants);
            let fail = BigRational::new(BigInt::from(stats.failing), total.clone());
            let timeout = BigRational::new(BigInt::from(stats.timeouts), total);
            if stats.failing > 0 {
                num_exists_fail += 1;
                exists_fail_fractions.push(fail.clone());
            }
            fail_fractions.push(fail);
            timeout_fractions.push(timeout);
        }

        let pct_exists_fail = if num_pass > 0 {
            Some(BigRational::new(
                BigInt::from(100 * num_exists_fail as u64),
                BigInt::from(num_pass as u64),
            ))
        } else {
            None
        };

        summaries.push(MeasureSummary {
            group,
            tool,
            batch,
            num_pass,
            num_exists_fail,
            pct_exists_fail,
            mean_pct_fail: mean_pct(&fail_fractions),
            mean_pct_timeout: mean_pct(&timeout_fractions),
            mean_pct_fail_given_exists: mean_pct(&exists_fail_fractions),
            seeds_without_mutants,
        });
    }
    Ok(summaries)
}

fn mean_pct(fractions: &[BigRational]) -> Option<BigRational> {
    if fractions.is_empty() {
        return None;
    }
    let sum: BigRational = fractions.iter().fold(BigRational::zero(), |acc, f| acc + f);
    Some(sum * BigRational::from_integer(BigInt::from(100)) / BigRational::from_integer(BigInt::from(fractions.len() as u64)))
}

/// Renders an exact percentage with two decimals, rounding half away from
/// zero; `None` renders as `n/a`.
pub fn render_pct(value: Option<&BigRational>) -> String {
    match value {
        None => "n/a".to_string(),
        Some(r) => {
            let hundredths = r * BigRational::from_integer(BigInt::from(100));
            let rounded =
                (hundredths + BigRational::new(BigInt::from(1), BigInt::from(2))).floor();
            let n = rounded.to_integer();
            let whole = &n / BigInt::from(100);
            let frac = (&n % BigInt::from(100)).to_i64().unwrap_or(0).unsigned_abs();
            format!("{whole}.{frac:02}")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            other => Err(format!("unknown report format `{other}` (expected csv, json, or text)")),
        }
    }
}

pub const REPORT_COLUMNS: [&str; 9] = [
    "group",
    "tool",
    "batch",
    "n_pass",
    "n_exists_fail",
    "pct_exists_fail",
    "mean_pct_fail",
    "mean_pct_timeout",
    "mean_pct_fail_given_exists",
];

fn summary_fields(summary: &MeasureSummary) -> [String; 9] {
    [
        summary.group.clone(),
        summary.tool.clone(),
        summary.batch.clone(),
        summary.num_pass.to_string(),
        summary.num_exists_fail.to_string(),
        render_pct(summary.pct_exists_fail.as_ref()),
        render_pct(summary.mean_pct_fail.as_ref()),
        render_pct(summary.mean_pct_timeout.as_ref()),
        render_pct(summary.mean_pct_fail_given_exists.as_ref()),
    ]
}

/// Renders summaries in the requested format. CSV and text share the same
/// column order; JSON is an array of objects with the same field names.
pub fn render_report(summaries: &[MeasureSummary], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => {
            let mut out = REPORT_COLUMNS.join(",");
            out.push('\n');
            for summary in summaries {
                out.push_str(&summary_fields(summary).join(","));
                out.push('\n');
            }
            out
        }
        ReportFormat::Json => {
            let values: Vec<serde_json::Value> = summaries
                .iter()
                .map(|summary| {
                    let fields = summary_fields(summary);
                    let mut object = serde_json::Map::new();
                    for (column, value) in REPORT_COLUMNS.iter().zip(fields.iter()) {
                        let json_value = match *column {
                            "n_pass" | "n_exists_fail" => {
                                serde_json::Value::from(value.parse::<u64>().unwrap_or(0))
                            }
                            "group" | "tool" | "batch" => serde_json::Value::from(value.clone()),
                            _ => {
                                if value == "n/a" {
                                    serde_json::Value::from("n/a")
                                } else {
                                    serde_json::Number::from_f64(value.parse::<f64>().unwrap_or(0.0))
                                        .map(serde_json::Value::Number)
                                        .unwrap_or_else(|| serde_json::Value::from(value.clone()))
                                }
                            }
                        };
                        object.insert(column.to_string(), json_value);
                    }
                    serde_json::Value::Object(object)
                })
                .collect();
            let mut out = serde_json::to_string_pretty(&values).expect("summaries serialize");
            out.push('\n');
            out
        }
        ReportFormat::Text => {
            let mut widths: Vec<usize> = REPORT_COLUMNS.iter().map(|c| c.len()).collect();
            let rows: Vec<[String; 9]> = summaries.iter().map(summary_fields).collect();
            for row in &rows {
                for (w, field) in widths.iter_mut().zip(row.iter()) {
                    *w = (*w).max(field.len());
                }
            }
            let mut out = String::new();
            let mut push_row = |fields: &[String]| {
                let line = fields
                    .iter()
                    .zip(widths.iter())
                    .map(|(f, w)| format!("{f:>w$}", w = w))
                    .collect::<Vec<_>>()
                    .join("  ");
                out.push_str(line.trim_end());
                out.push('\n');
            };
            push_row(&REPORT_COLUMNS.iter().map(|c| c.to_string()).collect::<Vec<_>>());
            for row in &rows {
                push_row(row.as_slice());
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(seed: &str, mutant: &str, kind: VerdictKind) -> CampaignRow {
        CampaignRow {
            seed: seed.into(),
            group: "all".into(),
            batch: "Mstar".into(),
            tool: "mock".into(),
            mutant_id: mutant.into(),
            kind,
        }
    }

    /// The hand-computed fixture: 4 seeds of which 3 verify; one verified
    /// seed has 2 of 10 mutants failing, the others 0 of 10.
    fn oracle_rows() -> Vec<CampaignRow> {
        let mut rows = Vec::new();
        for (seed, seed_kind, failing) in [
            ("s1.bpl", VerdictKind::Verified, 2usize),
            ("s2.bpl", VerdictKind::Verified, 0),
            ("s3.bpl", VerdictKind::Verified, 0),
            ("s4.bpl", VerdictKind::VerificationFailure, 3),
        ] {
            rows.push(row(seed, SEED_MARKER, seed_kind));
            for k in 1..=10 {
                let kind = if k <= failing {
                    VerdictKind::VerificationFailure
                } else {
                    VerdictKind::Verified
                };
                rows.push(row(seed, &format!("m{k}"), kind));
            }
        }
        rows
    }

    #[test]
    fn hand_computed_fixture_matches() {
        let summaries = compute_measures(&oracle_rows()).unwrap();
        assert_eq!(summaries.len(), 1);
        let s = &summaries[0];
        assert_eq!(s.num_pass, 3);
        assert_eq!(s.num_exists_fail, 1);
        assert_eq!(render_pct(s.pct_exists_fail.as_ref()), "33.33");
        assert_eq!(render_pct(s.mean_pct_fail.as_ref()), "6.67");
        assert_eq!(render_pct(s.mean_pct_timeout.as_ref()), "0.00");
        assert_eq!(render_pct(s.mean_pct_fail_given_exists.as_ref()), "20.00");
        assert_eq!(s.seeds_without_mutants, 0);
    }

    #[test]
    fn zero_passing_seeds_yields_na_means() {
        let rows = vec![
            row("s1.bpl", SEED_MARKER, VerdictKind::VerificationFailure),
            row("s1.bpl", "m1", VerdictKind::Verified),
        ];
        let summaries = compute_measures(&rows).unwrap();
        let s = &summaries[0];
        assert_eq!(s.num_pass, 0);
        assert_eq!(render_pct(s.pct_exists_fail.as_ref()), "n/a");
        assert_eq!(render_pct(s.mean_pct_fail.as_ref()), "n/a");
        assert_eq!(render_pct(s.mean_pct_fail_given_exists.as_ref()), "n/a");
    }

    #[test]
    fn all_mutants_verified_gives_zero_fail_measures() {
        let rows = vec![
            row("s1.bpl", SEED_MARKER, VerdictKind::Verified),
            row("s1.bpl", "m1", VerdictKind::Verified),
            row("s1.bpl", "m2", VerdictKind::Verified),
        ];
        let s = &compute_measures(&rows).unwrap()[0];
        assert_eq!(s.num_exists_fail, 0);
        assert_eq!(render_pct(s.mean_pct_fail.as_ref()), "0.00");
        assert_eq!(render_pct(s.mean_pct_fail_given_exists.as_ref()), "n/a");
    }

    #[test]
    fn mutant_rows_without_seed_row_are_an_error() {
        let rows = vec![row("s1.bpl", "m1", VerdictKind::Verified)];
        assert!(matches!(compute_measures(&rows), Err(MetricsError::MissingSeedRow { .. })));
    }

    #[test]
    fn measures_are_invariant_under_row_permutation() {
        let mut rows = oracle_rows();
        let forward = compute_measures(&rows).unwrap();
        rows.reverse();
        let backward = compute_measures(&rows).unwrap();
        assert_eq!(forward, backward);
    }

    #[test]
    fn seeds_without_mutants_are_excluded_from_means() {
        let rows = vec![
            row("s1.bpl", SEED_MARKER, VerdictKind::Verified),
            row("s2.bpl", SEED_MARKER, VerdictKind::Verified),
            row("s2.bpl", "m1", VerdictKind::VerificationFailure),
        ];
        let s = &compute_measures(&rows).unwrap()[0];
        assert_eq!(s.num_pass, 2);
        assert_eq!(s.seeds_without_mutants, 1);
        // Mean over the single seed that has mutants: 100%.
        assert_eq!(render_pct(s.mean_pct_fail.as_ref()), "100.00");
    }

    #[test]
    fn csv_report_has_exactly_the_fixed_columns() {
        let summaries = compute_measures(&oracle_rows()).unwrap();
        let csv = render_report(&summaries, ReportFormat::Csv);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "group,tool,batch,n_pass,n_exists_fail,pct_exists_fail,mean_pct_fail,mean_pct_timeout,mean_pct_fail_given_exists"
        );
        assert_eq!(lines.next().unwrap(), "all,mock,Mstar,3,1,33.33,6.67,0.00,20.00");
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn empty_summaries_render_header_only_csv() {
        let csv = render_report(&[], ReportFormat::Csv);
        assert_eq!(csv.lines().count(), 1);
    }

    #[test]
    fn json_report_mirrors_the_columns() {
        let summaries = compute_measures(&oracle_rows()).unwrap();
        let json = render_report(&summaries, ReportFormat::Json);
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        let first = &parsed.as_array().unwrap()[0];
        assert_eq!(first["group"], "all");
        assert_eq!(first["n_pass"], 3);
        assert_eq!(first["pct_exists_fail"], 33.33);
    }

    #[test]
    fn text_report_aligns_columns() {
        let summaries = compute_measures(&oracle_rows()).unwrap();
        let text = render_report(&summaries, ReportFormat::Text);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].contains("n_pass"));
        assert!(lines[1].contains("33.33"));
    }

    #[test]
    fn group_map_parsing_and_lookup() {
        let map = parse_group_map("# comment\nex.bpl A\nother T  # trailing\n");
        assert_eq!(map.len(), 2);
        assert_eq!(group_of("ex.bpl", &map), "A");
        assert_eq!(group_of("other.bpl", &map), "T"); // stem fallback
        assert_eq!(group_of("unknown.bpl", &map), "all");
    }

    #[test]
    fn batch_labels_come_from_file_names() {
        assert_eq!(batch_label_from_path(Path::new("/x/results.Mstar.ndjson")), "Mstar");
        assert_eq!(batch_label_from_path(Path::new("results.S1.ndjson")), "S1");
        assert_eq!(batch_label_from_path(Path::new("myrun.ndjson")), "myrun");
        assert_eq!(batch_label_from_path(Path::new("results.ndjson")), "default");
    }

    #[test]
    fn recomputing_from_a_results_file_matches_in_memory_computation() {
        use crate::harness::{parse_results, render_results, ResultRow};
        let result_rows = vec![
            ResultRow {
                seed: "a.bpl".into(),
                mutant_id: SEED_MARKER.into(),
                lineage: String::new(),
                tool: "mock".into(),
                kind: VerdictKind::Verified,
                wall_time_seconds: 0.5,
                raw_exit: Some(0),
            },
            ResultRow {
                seed: "a.bpl".into(),
                mutant_id: "m1".into(),
                lineage: "S1(0,1)".into(),
                tool: "mock".into(),
                kind: VerdictKind::Timeout,
                wall_time_seconds: 20.1,
                raw_exit: None,
            },
            ResultRow {
                seed: "a.bpl".into(),
                mutant_id: "m2".into(),
                lineage: "L4(p,0,1)".into(),
                tool: "mock".into(),
                kind: VerdictKind::Verified,
                wall_time_seconds: 0.4,
                raw_exit: Some(0),
            },
        ];
        let groups = HashMap::new();
        let direct = compute_measures(&from_result_rows(&result_rows, "S1", &groups)).unwrap();
        let text = render_results(&result_rows);
        let reread = parse_results(&text, Path::new("results.S1.ndjson")).unwrap();
        let via_file = compute_measures(&from_result_rows(&reread, "S1", &groups)).unwrap();
        assert_eq!(direct, via_file);
    }

    #[test]
    fn rounding_is_half_away_from_zero_at_two_decimals() {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(render_pct(Some(&r(100, 3))), "33.33");
        assert_eq!(render_pct(Some(&r(20, 3))), "6.67");
        assert_eq!(render_pct(Some(&r(1, 800))), "0.00");
        assert_eq!(render_pct(Some(&r(1, 8))), "0.13"); // 0.125 rounds up
        assert_eq!(render_pct(Some(&r(100, 1))), "100.00");
    }
}
