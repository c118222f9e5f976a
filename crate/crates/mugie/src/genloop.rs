//! Random mutant generation: a pool seeded with the original program grows
//! by repeatedly (1) picking a pool member uniformly, (2) picking an operator
//! with probability proportional to its weight, (3) picking an applicable
//! site uniformly, and (4) pooling the result unless its fingerprint is
//! already present. Every loop iteration consumes one attempt, whether or not
//! it grew the pool; generation stops when `num_mutants` distinct mutants
//! exist or `max_attempts` iterations have run.
//!
//! All randomness comes from a seeded ChaCha8 stream, so a (seed, batch
//! specification) pair reproduces the pool bit for bit on any platform.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashSet};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ast::{program_fingerprint, Fingerprint, Program};
use crate::mutops::{self, AppliedOp, MutationError, OperatorKind, ALL_OPERATORS};
use crate::typecheck::ValidatedProgram;

pub mod draw {
    //! Deterministic draw primitives on top of the ChaCha8 stream.

    use rand_chacha::rand_core::Rng;
    pub use rand_chacha::rand_core::SeedableRng;
    pub use rand_chacha::ChaCha8Rng;

    /// Unbiased uniform index in `0..n` via rejection sampling.
    pub fn uniform_index(rng: &mut ChaCha8Rng, n: usize) -> usize {
        assert!(n > 0, "uniform_index needs a non-empty range");
        let n = n as u64;
        let threshold = n.wrapping_neg() % n; // 2^64 mod n
        loop {
            let r = rng.next_u64();
            if r >= threshold {
                return (r % n) as usize;
            }
        }
    }

    /// Uniform float in `[0, 1)` using the top 53 bits of one draw.
    pub fn uniform_f64(rng: &mut ChaCha8Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid batch specification: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("invalid lineage: {0}")]
    InvalidLineage(#[from] MutationError),
    #[error("replayed program fingerprint {actual} does not match the record's {expected}")]
    FingerprintMismatch { expected: Fingerprint, actual: Fingerprint },
}

/// Configuration of one generation batch.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSpec {
    /// Weight per operator; operators with weight zero are never drawn.
    pub weights: BTreeMap<OperatorKind, f64>,
    /// Number of distinct mutants to aim for (the pool additionally holds
    /// the seed).
    pub num_mutants: usize,
    /// Hard bound on generation-loop iterations.
    pub max_attempts: u64,
    pub rng_seed: u64,
    /// G2 gets a positive weight only when this is set.
    pub allow_trigger_mutation: bool,
}

impl BatchSpec {
    pub fn default_max_attempts(num_mutants: usize) -> u64 {
        10 * num_mutants.max(1) as u64
    }

    /// The general batch: every operator at equal weight except G2, which is
    /// excluded; 100 mutants.
    pub fn all_operators(rng_seed: u64) -> Self {
        let mut weights = BTreeMap::new();
        for kind in ALL_OPERATORS {
            weights.insert(kind, if kind == OperatorKind::G2 { 0.0 } else { 1.0 });
        }
        BatchSpec {
            weights,
            num_mutants: 100,
            max_attempts: Self::default_max_attempts(100),
            rng_seed,
            allow_trigger_mutation: false,
        }
    }

    /// A single-operator batch: 50 mutants from one operator. Choosing G2
    /// implies trigger mutation.
    pub fn single_operator(kind: OperatorKind, rng_seed: u64) -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(kind, 1.0);
        BatchSpec {
            weights,
            num_mutants: 50,
            max_attempts: Self::default_max_attempts(50),
            rng_seed,
            allow_trigger_mutation: kind == OperatorKind::G2,
        }
    }

    pub fn with_num_mutants(mut self, num_mutants: usize) -> Self {
        self.num_mutants = num_mutants;
        self.max_attempts = Self::default_max_attempts(num_mutants);
        self
    }

    pub fn with_max_attempts(mut self, max_attempts: u64) -> Self {
        self.max_attempts = max_attempts;
        self
    }

    pub fn validate(&self) -> Result<(), GenError> {
        for (kind, weight) in &self.weights {
            if !weight.is_finite() || *weight < 0.0 {
                return Err(GenError::InvalidSpec(format!(
                    "weight of {kind} must be a finite non-negative number, got {weight}"
                )));
            }
        }
        let total: f64 = self.weights.values().filter(|w| **w > 0.0).sum();
        if self.num_mutants > 0 && total <= 0.0 {
            return Err(GenError::InvalidSpec(
                "at least one operator weight must be positive".to_string(),
            ));
        }
        if !self.allow_trigger_mutation
            && self.weights.get(&OperatorKind::G2).copied().unwrap_or(0.0) > 0.0
        {
            return Err(GenError::InvalidSpec(
                "G2 mutates triggers and needs the trigger-mutation flag".to_string(),
            ));
        }
        Ok(())
    }

    fn pick_operator(&self, rng: &mut ChaCha8Rng) -> OperatorKind {
        let total: f64 = ALL_OPERATORS
            .iter()
            .filter_map(|k| self.weights.get(k))
            .filter(|w| **w > 0.0)
            .sum();
        let target = draw::uniform_f64(rng) * total;
        let mut cumulative = 0.0;
        let mut last = None;
        for kind in ALL_OPERATORS {
            let weight = self.weights.get(&kind).copied().unwrap_or(0.0);
            if weight <= 0.0 {
                continue;
            }
            cumulative += weight;
            last = Some(kind);
            if target < cumulative {
                return kind;
            }
        }
        last.expect("validate() guarantees a positive weight")
    }
}

/// The on-disk shape of one pool member: a primary file and, when the last
/// applied operator was S6, a companion file. For further mutation the two
/// files are treated as their concatenation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutantFiles {
    pub primary: Program,
    pub companion: Option<Program>,
}

impl MutantFiles {
    pub fn single(primary: Program) -> Self {
        MutantFiles { primary, companion: None }
    }

    /// The member as one compilation unit (multiple input files are
    /// processed as if they were one).
    pub fn logical(&self) -> Cow<'_, Program> {
        match &self.companion {
            None => Cow::Borrowed(&self.primary),
            Some(companion) => Cow::Owned(self.primary.concat(companion)),
        }
    }

    /// Pool identity. A split member hashes the file boundary too, so a
    /// two-file mutant never collides with the equivalent one-file program.
    pub fn fingerprint(&self) -> Fingerprint {
        match &self.companion {
            None => program_fingerprint(&self.primary),
            Some(companion) => {
                let mut hasher = Sha256::new();
                hasher.update(crate::printer::print(&self.primary).as_bytes());
                hasher.update([0u8]);
                hasher.update(crate::printer::print(companion).as_bytes());
                Fingerprint(hasher.finalize().into())
            }
        }
    }
}

/// A mutant's identity: where it came from and how to rebuild it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutantRecord {
    pub seed_name: String,
    pub lineage: Vec<AppliedOp>,
    pub rng_seed: u64,
    pub fingerprint: Fingerprint,
}

impl MutantRecord {
    /// The lineage header emitted as the first line of every mutant file.
    pub fn header_line(&self) -> String {
        format!(
            "// mugie-lineage seed={} rng={} ops={}",
            self.seed_name,
            self.rng_seed,
            render_ops(&self.lineage)
        )
    }
}

pub fn render_ops(ops: &[AppliedOp]) -> String {
    ops.iter().map(|op| op.to_string()).collect::<Vec<_>>().join(",")
}

/// A parsed lineage header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineageHeader {
    pub seed_name: String,
    pub rng_seed: u64,
    pub ops: Vec<AppliedOp>,
}

const HEADER_PREFIX: &str = "// mugie-lineage ";

/// Parses the first line of a mutant file. `Ok(None)` means the line is not
/// a lineage header at all; `Err` means it is one but malformed.
pub fn parse_lineage_header(line: &str) -> Result<Option<LineageHeader>, String> {
    let Some(rest) = line.trim_end().strip_prefix(HEADER_PREFIX) else {
        return Ok(None);
    };
    let (head, ops_text) =
        rest.rsplit_once(" ops=").ok_or_else(|| "missing ops= field".to_string())?;
    let (seed_part, rng_part) =
        head.rsplit_once(" rng=").ok_or_else(|| "missing rng= field".to_string())?;
    let seed_name = seed_part
        .strip_prefix("seed=")
        .ok_or_else(|| "missing seed= field".to_string())?
        .to_string();
    let rng_seed = rng_part.parse::<u64>().map_err(|_| format!("bad rng value `{rng_part}`"))?;
    let mut ops = Vec::new();
    for chunk in split_ops(ops_text) {
        ops.push(chunk.parse::<AppliedOp>()?);
    }
    Ok(Some(LineageHeader { seed_name, rng_seed, ops }))
}

/// Splits an ops list at commas outside parentheses.
fn split_ops(s: &str) -> Vec<&str> {
    let mut chunks = Vec::new();
    if s.is_empty() {
        return chunks;
    }
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                chunks.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    chunks.push(&s[start..]);
    chunks
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolEntry {
    pub files: MutantFiles,
    pub record: MutantRecord,
}

/// The deduplicated mutant pool. The first entry is always the seed itself.
#[derive(Debug, Clone)]
pub struct MutantPool {
    entries: Vec<PoolEntry>,
    fingerprints: HashSet<Fingerprint>,
    attempts_used: u64,
}

impl MutantPool {
    fn new(seed_entry: PoolEntry) -> Self {
        let mut fingerprints = HashSet::new();
        fingerprints.insert(seed_entry.record.fingerprint);
        MutantPool { entries: vec![seed_entry], fingerprints, attempts_used: 0 }
    }

    pub fn seed_entry(&self) -> &PoolEntry {
        &self.entries[0]
    }

    /// Pool members other than the seed, in generation order. The `k`-th
    /// element (1-based) is the mutant written as `<stem>.m<k>.bpl`.
    pub fn mutants(&self) -> &[PoolEntry] {
        &self.entries[1..]
    }

    pub fn entries(&self) -> &[PoolEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the seed is always present
    }

    pub fn attempts_used(&self) -> u64 {
        self.attempts_used
    }

    pub fn contains_fingerprint(&self, fp: &Fingerprint) -> bool {
        self.fingerprints.contains(fp)
    }

    fn insert(&mut self, entry: PoolEntry) -> bool {
        if self.fingerprints.insert(entry.record.fingerprint) {
            self.entries.push(entry);
            true
        } else {
            false
        }
    }
}

/// Runs the generation loop. Identical (seed, seed_name, spec) inputs produce
/// a bit-identical pool.
pub fn generate_mutants(
    seed: &ValidatedProgram,
    seed_name: &str,
    spec: &BatchSpec,
) -> Result<MutantPool, GenError> {
    spec.validate()?;
    let seed_files = MutantFiles::single(seed.program().clone());
    let seed_record = MutantRecord {
        seed_name: seed_name.to_string(),
        lineage: Vec::new(),
        rng_seed: spec.rng_seed,
        fingerprint: seed_files.fingerprint(),
    };
    let mut pool = MutantPool::new(PoolEntry { files: seed_files, record: seed_record });
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);

    while pool.len() - 1 < spec.num_mutants && pool.attempts_used < spec.max_attempts {
        pool.attempts_used += 1;

        // Draw order is fixed: pool member, then operator, then site.
        let base_index = draw::uniform_index(&mut rng, pool.len());
        let operator = spec.pick_operator(&mut rng);
        let base = pool.entries[base_index].files.logical();
        let sites = mutops::enumerate_sites(&base, operator);
        if sites.is_empty() {
            // Inapplicable draw: the attempt is consumed, the pool unchanged.
            continue;
        }
        let site = &sites[draw::uniform_index(&mut rng, sites.len())];
        let result = mutops::apply(&base, operator, site)
            .expect("enumerated sites are valid for the program they came from");

        let files = MutantFiles { primary: result.primary, companion: result.companion };
        let fingerprint = files.fingerprint();
        if pool.contains_fingerprint(&fingerprint) {
            continue;
        }
        let mut lineage = pool.entries[base_index].record.lineage.clone();
        lineage.push(result.applied);
        let record = MutantRecord {
            seed_name: seed_name.to_string(),
            lineage,
            rng_seed: spec.rng_seed,
            fingerprint,
        };
        pool.insert(PoolEntry { files, record });
    }
    Ok(pool)
}

/// Rebuilds a mutant from its record by applying the lineage to the seed.
/// Fails on stale or invalid sites and on fingerprint mismatch (a corrupted
/// record).
pub fn replay(seed: &ValidatedProgram, record: &MutantRecord) -> Result<MutantFiles, ReplayError> {
    let mut files = MutantFiles::single(seed.program().clone());
    for op in &record.lineage {
        let base = files.logical().into_owned();
        let result = mutops::apply(&base, op.kind, &op.site)?;
        files = MutantFiles { primary: result.primary, companion: result.companion };
    }
    let actual = files.fingerprint();
    if actual != record.fingerprint {
        return Err(ReplayError::FingerprintMismatch { expected: record.fingerprint, actual });
    }
    Ok(files)
}

/// Files of one mutant as written to disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WrittenMutant {
    /// `m<k>` with `k` the 1-based generation index.
    pub id: String,
    /// Primary path, then the companion path for split mutants.
    pub paths: Vec<std::path::PathBuf>,
    /// The serialized operator lineage, as in the header.
    pub lineage: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WrittenPool {
    /// The normalized seed copy (`<stem>.seed.bpl`), with an empty-ops
    /// lineage header.
    pub seed_path: std::path::PathBuf,
    pub seed_name: String,
    pub mutants: Vec<WrittenMutant>,
}

/// Writes the pool to `dir`: the seed copy as `<stem>.seed.bpl` and each
/// mutant as `<stem>.m<k>.bpl` (plus `<stem>.m<k>.part2.bpl` for split
/// mutants), every file carrying its lineage header.
pub fn write_pool_files(
    pool: &MutantPool,
    dir: &std::path::Path,
    stem: &str,
) -> std::io::Result<WrittenPool> {
    std::fs::create_dir_all(dir)?;
    let seed_entry = pool.seed_entry();
    let seed_path = dir.join(format!("{stem}.seed.bpl"));
    std::fs::write(
        &seed_path,
        crate::printer::print_with_lineage(&seed_entry.files.primary, &seed_entry.record),
    )?;

    let mut mutants = Vec::new();
    for (k, entry) in pool.mutants().iter().enumerate() {
        let id = format!("m{}", k + 1);
        let primary_path = dir.join(format!("{stem}.{id}.bpl"));
        std::fs::write(
            &primary_path,
            crate::printer::print_with_lineage(&entry.files.primary, &entry.record),
        )?;
        let mut paths = vec![primary_path];
        if let Some(companion) = &entry.files.companion {
            let companion_path = dir.join(format!("{stem}.{id}.part2.bpl"));
            std::fs::write(
                &companion_path,
                crate::printer::print_with_lineage(companion, &entry.record),
            )?;
            paths.push(companion_path);
        }
        mutants.push(WrittenMutant { id, paths, lineage: render_ops(&entry.record.lineage) });
    }
    Ok(WrittenPool {
        seed_path,
        seed_name: seed_entry.record.seed_name.clone(),
        mutants,
    })
}

/// Derives the per-(seed, batch) generator seed a campaign uses, so a
/// campaign run can be reproduced by standalone `mutate` invocations.
pub fn derive_campaign_seed(base: u64, seed_stem: &str, batch: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(base.to_le_bytes());
    hasher.update([0u8]);
    hasher.update(seed_stem.as_bytes());
    hasher.update([0u8]);
    hasher.update(batch.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 yields at least 8 bytes"))
}
