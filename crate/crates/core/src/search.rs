//! Sharded, resumable enumeration of exponent tuples, and store verification.
//!
//! A store is a line-delimited JSON file: a header line, then one
//! certificate per tuple in canonical order. Progress lives in a sidecar
//! checkpoint `<store>.ckpt` that is replaced atomically after every batch
//! and records how many store bytes belong to completed batches.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::heights::{solution_consistency, ConsistencyReport};
use crate::lattice::{degree_bound, minkowski_check, orthogonal_lattice};
use crate::oracle::{agreement, root_scan, IncidenceScan};
use crate::polyarith::{gcd, DensePolynomial};
use crate::ranktest::{decide, Classification, ExponentTuple, RankCertificate};

pub const FORMAT_VERSION: u32 = 1;
pub const BATCH_SIZE: usize = 1000;
pub const DEFAULT_ORACLE_RATE: f64 = 0.01;
const SAMPLING_SEED: u64 = 0x6e70_6c65_745f_7361;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub max_last_exponent: u64,
    pub shard_count: u64,
    pub shard_index: u64,
    pub output: PathBuf,
    pub resume: bool,
    pub oracle_cross_check_rate: f64,
    pub workers: usize,
    /// Return after this many batches without finishing, as if killed.
    pub stop_after_batches: Option<u64>,
}

impl SearchConfig {
    pub fn new(n: usize, max_last_exponent: u64, output: impl Into<PathBuf>) -> Self {
        SearchConfig {
            n,
            max_last_exponent,
            shard_count: 1,
            shard_index: 0,
            output: output.into(),
            resume: false,
            oracle_cross_check_rate: DEFAULT_ORACLE_RATE,
            workers: 1,
            stop_after_batches: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n < 3 {
            return bad(format!("n must be at least 3, got {}", self.n));
        }
        if self.max_last_exponent < self.n as u64 {
            return bad(format!(
                "max last exponent {} is below n = {}",
                self.max_last_exponent, self.n
            ));
        }
        if self.shard_count == 0 || self.shard_index >= self.shard_count {
            return bad(format!(
                "shard index {} outside 0..{}",
                self.shard_index, self.shard_count
            ));
        }
        if !(0.0..=1.0).contains(&self.oracle_cross_check_rate) {
            return bad(format!(
                "oracle rate {} outside [0, 1]",
                self.oracle_cross_check_rate
            ));
        }
        if self.workers == 0 {
            return bad("worker count must be positive".into());
        }
        Ok(())
    }

    fn header(&self) -> StoreHeader {
        StoreHeader {
            format_version: FORMAT_VERSION,
            n: self.n,
            max_last_exponent: self.max_last_exponent,
            shard_count: self.shard_count,
            shard_index: self.shard_index,
            oracle_cross_check_rate: self.oracle_cross_check_rate,
        }
    }
}

/// First line of every store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreHeader {
    pub format_version: u32,
    pub n: usize,
    pub max_last_exponent: u64,
    pub shard_count: u64,
    pub shard_index: u64,
    pub oracle_cross_check_rate: f64,
}

impl StoreHeader {
    pub fn single(tuple: &ExponentTuple) -> Self {
        StoreHeader {
            format_version: FORMAT_VERSION,
            n: tuple.n(),
            max_last_exponent: tuple.last(),
            shard_count: 1,
            shard_index: 0,
            oracle_cross_check_rate: 0.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub tuples_examined: u64,
    pub anomalous_found: u64,
    pub oracle_checked: u64,
    pub elapsed_ms: f64,
    /// Count of certificates per `one_multiplicity`.
    pub multiplicity_histogram: BTreeMap<u32, u64>,
    /// Last completed tuple of this shard, in canonical order.
    pub cursor: Option<Vec<u64>>,
    /// Canonical index of that tuple.
    pub cursor_index: Option<u64>,
    pub discoveries: Vec<Vec<u64>>,
    pub completed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Checkpoint {
    header: StoreHeader,
    store_bytes: u64,
    summary: SearchSummary,
}

/// Coprime strictly increasing tuples with `a_n <= max_last`, in canonical
/// order, paired with their canonical index.
#[derive(Debug, Clone)]
pub struct CanonicalTuples {
    max_last: u64,
    current: Option<Vec<u64>>,
    next_index: u64,
}

impl CanonicalTuples {
    pub fn new(n: usize, max_last: u64) -> Self {
        let first: Vec<u64> = (1..=n as u64).collect();
        CanonicalTuples {
            max_last,
            current: (n >= 1 && max_last >= n as u64).then_some(first),
            next_index: 0,
        }
    }

    /// Continues after `tuple`, whose canonical index is `index`.
    pub fn after(tuple: &[u64], index: u64, max_last: u64) -> Self {
        let mut it = CanonicalTuples {
            max_last,
            current: Some(tuple.to_vec()),
            next_index: index + 1,
        };
        it.advance();
        it
    }

    /// Next strictly increasing tuple, ignoring coprimality.
    fn advance(&mut self) {
        let Some(a) = self.current.as_mut() else { return };
        let n = a.len();
        for i in 0..n {
            let limit = if i + 1 < n { a[i + 1] - 1 } else { self.max_last };
            if a[i] < limit {
                a[i] += 1;
                for (j, x) in a.iter_mut().enumerate().take(i) {
                    *x = j as u64 + 1;
                }
                return;
            }
        }
        self.current = None;
    }
}

impl Iterator for CanonicalTuples {
    type Item = (u64, ExponentTuple);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let a = self.current.clone()?;
            self.advance();
            if a.iter().fold(0u64, |g, &x| g.gcd(&x)) == 1 {
                let i = self.next_index;
                self.next_index += 1;
                return Some((i, ExponentTuple::new(a).expect("coprime by construction")));
            }
        }
    }
}

/// The tuples of one shard: canonical index congruent to `shard_index`.
pub fn enumerate(n: usize, max_last: u64, shard_count: u64, shard_index: u64) -> impl Iterator<Item = ExponentTuple> {
    CanonicalTuples::new(n, max_last)
        .filter(move |(i, _)| i % shard_count == shard_index)
        .map(|(_, t)| t)
}

fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn checkpoint_path(out: &Path) -> PathBuf {
    sidecar(out, ".ckpt")
}

pub fn disagreement_path(out: &Path) -> PathBuf {
    sidecar(out, ".disagreement.json")
}

fn store_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Store {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn write_checkpoint(out: &Path, ckpt: &Checkpoint) -> Result<()> {
    let path = checkpoint_path(out);
    let tmp = sidecar(out, ".ckpt.tmp");
    {
        let mut f = File::create(&tmp)?;
        serde_json::to_writer_pretty(&mut f, ckpt)?;
        f.write_all(b"\n")?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(())
}

fn read_checkpoint(out: &Path) -> Result<Option<Checkpoint>> {
    let path = checkpoint_path(out);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path)?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| store_err(&path, format!("unreadable checkpoint: {e}")))
}

/// Everything a worker produces for one tuple.
struct Outcome {
    index: u64,
    line: String,
    cert: RankCertificate,
    oracle_checked: bool,
    disagreement: Option<(IncidenceScan, String)>,
    violation: Option<(String, Option<ConsistencyReport>)>,
}

fn sampled(index: u64, rate: f64) -> bool {
    rate > 0.0 && ChaCha8Rng::seed_from_u64(index ^ SAMPLING_SEED).random::<f64>() < rate
}

fn process(index: u64, tuple: &ExponentTuple, rate: f64) -> Result<Outcome> {
    let cert = decide(tuple)?;
    let mut violation = None;
    if cert.anomalous {
        let bound = degree_bound(tuple.last());
        let report = solution_consistency(&cert, bound)?;
        if !report.is_consistent() {
            violation = Some(("solution consistency failed".to_string(), Some(report)));
        } else if tuple.n() == 4 {
            if let Err(e) = orthogonal_lattice(tuple).and_then(|b| minkowski_check(&b)) {
                violation = Some((e.to_string(), Some(report)));
            }
        }
    }
    let oracle_checked = cert.anomalous || sampled(index, rate);
    let mut disagreement = None;
    if oracle_checked {
        let scan = root_scan(tuple)?;
        let a = agreement(&cert, &scan);
        if !a.holds() {
            let detail = format!(
                "exact anomalous={} but oracle found {} candidate(s), {} unmatched",
                a.exact_anomalous, a.candidates, a.unmatched
            );
            disagreement = Some((scan, detail));
        }
    }
    Ok(Outcome {
        index,
        line: serde_json::to_string(&cert)?,
        cert,
        oracle_checked,
        disagreement,
        violation,
    })
}

/// Runs (or resumes) one shard and returns its summary.
pub fn run(config: &SearchConfig) -> Result<SearchSummary> {
    config.validate()?;
    let start = Instant::now();
    let out = &config.output;
    let header = config.header();

    let resumed = if config.resume { read_checkpoint(out)? } else { None };
    let (mut summary, mut store_bytes) = match resumed {
        Some(ck) => {
            if ck.header != header {
                return Err(store_err(out, "checkpoint belongs to a different configuration"));
            }
            let f = OpenOptions::new().write(true).open(out)?;
            if f.metadata()?.len() < ck.store_bytes {
                return Err(store_err(out, "store is shorter than its checkpoint"));
            }
            f.set_len(ck.store_bytes)?;
            (ck.summary, ck.store_bytes)
        }
        None => {
            let mut f = File::create(out)?;
            let line = serde_json::to_string(&header)? + "\n";
            f.write_all(line.as_bytes())?;
            f.sync_all()?;
            let _ = fs::remove_file(checkpoint_path(out));
            (SearchSummary::default(), line.len() as u64)
        }
    };
    if summary.completed {
        return Ok(summary);
    }

    let mut store = OpenOptions::new().append(true).open(out)?;
    let tuples = match (&summary.cursor, summary.cursor_index) {
        (Some(t), Some(i)) => CanonicalTuples::after(t, i, config.max_last_exponent),
        _ => CanonicalTuples::new(config.n, config.max_last_exponent),
    };
    let mut shard = tuples.filter(|(i, _)| i % config.shard_count == config.shard_index);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start workers: {e}")))?;
    let previous_ms = summary.elapsed_ms;
    let mut batches = 0u64;

    loop {
        let batch: Vec<(u64, ExponentTuple)> = shard.by_ref().take(BATCH_SIZE).collect();
        if batch.is_empty() {
            break;
        }
        let rate = config.oracle_cross_check_rate;
        let outcomes: Vec<Outcome> = pool.install(|| {
            batch
                .par_iter()
                .map(|(i, t)| process(*i, t, rate))
                .collect::<Result<Vec<_>>>()
        })?;

        for o in &outcomes {
            if let Some((scan, detail)) = &o.disagreement {
                let dump = serde_json::json!({ "certificate": o.cert, "scan": scan, "detail": detail });
                fs::write(disagreement_path(out), serde_json::to_string_pretty(&dump)? + "\n")?;
                return Err(Error::OracleDisagreement {
                    exponents: o.cert.exponents.clone(),
                    detail: detail.clone(),
                });
            }
            if let Some((detail, report)) = &o.violation {
                let dump = serde_json::json!({ "certificate": o.cert, "consistency": report, "detail": detail });
                fs::write(sidecar(out, ".violation.json"), serde_json::to_string_pretty(&dump)? + "\n")?;
                return Err(Error::BoundViolation {
                    exponents: o.cert.exponents.clone(),
                    detail: detail.clone(),
                });
            }
        }

        let mut text = String::new();
        for o in &outcomes {
            text.push_str(&o.line);
            text.push('\n');
            summary.tuples_examined += 1;
            *summary.multiplicity_histogram.entry(o.cert.one_multiplicity).or_default() += 1;
            if o.oracle_checked {
                summary.oracle_checked += 1;
            }
            if o.cert.anomalous {
                summary.anomalous_found += 1;
                summary.discoveries.push(o.cert.exponents.clone());
            }
        }
        store.write_all(text.as_bytes())?;
        store.sync_data()?;
        store_bytes += text.len() as u64;
        let last = outcomes.last().unwrap();
        summary.cursor = Some(last.cert.exponents.clone());
        summary.cursor_index = Some(last.index);
        summary.elapsed_ms = previous_ms + start.elapsed().as_secs_f64() * 1e3;
        write_checkpoint(
            out,
            &Checkpoint {
                header: header.clone(),
                store_bytes,
                summary: summary.clone(),
            },
        )?;
        batches += 1;
        if config.stop_after_batches.is_some_and(|b| batches >= b) {
            return Ok(summary);
        }
    }

    summary.completed = true;
    summary.elapsed_ms = previous_ms + start.elapsed().as_secs_f64() * 1e3;
    write_checkpoint(
        out,
        &Checkpoint {
            header,
            store_bytes,
            summary: summary.clone(),
        },
    )?;
    Ok(summary)
}

/// SHA-256 over the header and every certificate with timing removed.
pub fn canonical_hash(store: &Path) -> Result<String> {
    let f = File::open(store)?;
    let mut h = Sha256::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let canon = if i == 0 {
            let header: StoreHeader = serde_json::from_str(&line)?;
            serde_json::to_string(&header)?
        } else {
            let cert: RankCertificate = serde_json::from_str(&line)?;
            cert.canonical_json()?
        };
        h.update(canon.as_bytes());
        h.update(b"\n");
    }
    Ok(hex::encode(h.finalize()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyFailure {
    /// 1-based line number in the store.
    pub line: usize,
    pub exponents: Option<Vec<u64>>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub records: u64,
    pub anomalous: u64,
    pub failures: Vec<VerifyFailure>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-checks every certificate in a store from its exponents alone.
pub fn verify(store: &Path) -> Result<VerifyReport> {
    let f = File::open(store)?;
    let mut report = VerifyReport::default();
    let mut header: Option<StoreHeader> = None;
    let mut previous: Option<Vec<u64>> = None;
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 1;
        if header.is_none() {
            match serde_json::from_str::<StoreHeader>(&line) {
                Ok(h) if h.format_version == FORMAT_VERSION => header = Some(h),
                Ok(h) => {
                    return Err(store_err(store, format!("unsupported format version {}", h.format_version)));
                }
                Err(e) => return Err(store_err(store, format!("missing header: {e}"))),
            }
            continue;
        }
        report.records += 1;
        let cert: RankCertificate = match serde_json::from_str(&line) {
            Ok(c) => c,
            Err(e) => {
                let exponents = serde_json::from_str::<serde_json::Value>(&line)
                    .ok()
                    .and_then(|v| serde_json::from_value(v["exponents"].clone()).ok());
                report.failures.push(VerifyFailure {
                    line: lineno,
                    exponents,
                    reason: format!("unparseable record: {e}"),
                });
                continue;
            }
        };
        if cert.anomalous {
            report.anomalous += 1;
        }
        let mut fail = |reason: String| {
            report.failures.push(VerifyFailure {
                line: lineno,
                exponents: Some(cert.exponents.clone()),
                reason,
            })
        };
        let h = header.as_ref().unwrap();
        if cert.n != h.n || cert.exponents.len() != h.n {
            fail(format!("record has n = {} in a store for n = {}", cert.n, h.n));
            continue;
        }
        let key: Vec<u64> = cert.exponents.iter().rev().copied().collect();
        if previous.as_ref().is_some_and(|p| *p >= key) {
            fail("records out of canonical order".into());
        }
        previous = Some(key);
        if let Err(reason) = check_certificate(&cert) {
            fail(reason);
        }
    }
    Ok(report)
}

/// Independent re-derivation of one certificate; `Err` carries the reason.
pub fn check_certificate(cert: &RankCertificate) -> std::result::Result<(), String> {
    let tuple = ExponentTuple::new(cert.exponents.clone()).map_err(|e| e.to_string())?;
    let n = tuple.n();
    let mut rows = vec![0u64];
    rows.extend_from_slice(tuple.exponents());
    let minors: Vec<DensePolynomial> = (0..rows.len())
        .map(|omit| {
            let kept: Vec<u64> = rows.iter().enumerate().filter(|&(i, _)| i != omit).map(|(_, &m)| m).collect();
            minor_by_elimination(&kept)
        })
        .collect();
    let degrees: Vec<u64> = minors.iter().map(|m| m.degree().unwrap_or(0) as u64).collect();
    if degrees != cert.minor_degrees {
        return Err(format!("minor degrees {:?} differ from recomputed {:?}", cert.minor_degrees, degrees));
    }
    if cert.gcd.is_zero() {
        return Err("gcd is zero".into());
    }
    let mut cofactors = Vec::with_capacity(minors.len());
    for (i, m) in minors.iter().enumerate() {
        match m.div_exact(&cert.gcd).map_err(|e| e.to_string())? {
            Some(q) => cofactors.push(q),
            None => return Err(format!("gcd does not divide minor {i}")),
        }
    }
    if !cofactors_coprime(&cofactors)? {
        return Err("gcd is not the greatest common divisor: cofactors share a factor".into());
    }
    let mut rebuilt = cert.residual.clone();
    for _ in 0..cert.one_multiplicity {
        rebuilt = &rebuilt * &DensePolynomial::z_minus_one();
    }
    if rebuilt != cert.gcd {
        return Err("gcd differs from (z-1)^multiplicity * residual".into());
    }
    if cert.residual.eval_at_one().is_zero() {
        return Err("residual still vanishes at z = 1".into());
    }
    if (cert.one_multiplicity as usize) < n - 1 {
        return Err(format!("(z-1)-multiplicity {} below n-1", cert.one_multiplicity));
    }
    let nonconstant = !cert.residual.is_constant();
    if cert.anomalous != nonconstant {
        return Err(format!("anomalous flag {} but residual constant = {}", cert.anomalous, !nonconstant));
    }
    if (cert.classification == Classification::Trivial) == nonconstant {
        return Err(format!("classification {:?} inconsistent with residual", cert.classification));
    }
    if nonconstant && cert.witness_minpoly.as_ref() != Some(&cert.residual) {
        return Err("witness differs from residual".into());
    }
    Ok(())
}

/// Minor of the rows `(1, m, ..., m^{k-2}, z^m)` by cofactor expansion along
/// the last column, each cofactor a fraction-free integer determinant.
fn minor_by_elimination(rows: &[u64]) -> DensePolynomial {
    let k = rows.len();
    let top = *rows.iter().max().unwrap() as usize;
    let mut coeffs = vec![BigInt::zero(); top + 1];
    for j in 0..k {
        let m: Vec<Vec<BigInt>> = rows
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, &r)| (0..k - 1).map(|p| BigInt::from(r).pow(p as u32)).collect())
            .collect();
        let d = bareiss_big(m);
        if (j + k - 1).is_multiple_of(2) {
            coeffs[rows[j] as usize] += d;
        } else {
            coeffs[rows[j] as usize] -= d;
        }
    }
    DensePolynomial::new(coeffs)
}

fn bareiss_big(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let k = m.len();
    if k == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for p in 0..k - 1 {
        if m[p][p].is_zero() {
            match (p + 1..k).find(|&r| !m[r][p].is_zero()) {
                Some(r) => {
                    m.swap(p, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in p + 1..k {
            for j in p + 1..k {
                let v = (&m[i][j] * &m[p][p] - &m[i][p] * &m[p][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[p][p].clone();
    }
    sign * &m[k - 1][k - 1]
}

const PRIMES: [u64; 4] = [(1 << 61) - 1, 4_611_686_018_427_387_847, 2_305_843_009_213_693_921, 1_000_000_007];

/// Proves the cofactors coprime through a gcd over `F_p`; falls back to the
/// integer remainder sequence when every prime is unlucky.
fn cofactors_coprime(cofactors: &[DensePolynomial]) -> std::result::Result<bool, String> {
    for &p in &PRIMES {
        let lucky = cofactors
            .iter()
            .any(|c| c.leading().is_some_and(|l| !(l % BigInt::from(p)).is_zero()));
        if !lucky {
            continue;
        }
        let mut g: Option<Vec<u64>> = None;
        for c in cofactors {
            let r = reduce_mod(c, p);
            g = Some(match g {
                None => r,
                Some(g) => gcd_mod(g, r, p),
            });
            if g.as_ref().is_some_and(|g| g.len() == 1) {
                return Ok(true);
            }
        }
        if g.as_ref().is_some_and(|g| g.len() <= 1) {
            return Ok(true);
        }
    }
    let mut g = cofactors[0].clone();
    for c in &cofactors[1..] {
        g = gcd(&g, c).map_err(|e| e.to_string())?;
    }
    Ok(g.is_constant())
}

fn reduce_mod(c: &DensePolynomial, p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut v: Vec<u64> = c
        .coeffs()
        .iter()
        .map(|x| {
            let r = x.mod_floor(&pb);
            r.to_u64().unwrap()
        })
        .collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Euclid over `F_p`; polynomials are trimmed coefficient vectors.
fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    while !b.is_empty() {
        let inv = pow_mod(*b.last().unwrap(), p - 2, p);
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let q = mul_mod(*a.last().unwrap(), inv, p);
            for (i, &bi) in b.iter().enumerate() {
                let t = mul_mod(q, bi, p);
                a[i + shift] = (a[i + shift] + p - t) % p;
            }
            while a.last() == Some(&0) {
                a.pop();
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

/// Reads the certificates of a store, skipping the header.
pub fn read_certificates(store: &Path) -> Result<(StoreHeader, Vec<RankCertificate>)> {
    let f = File::open(store)?;
    let mut lines = BufReader::new(f).lines();
    let first = lines.next().ok_or_else(|| store_err(store, "empty store"))??;
    let header: StoreHeader = serde_json::from_str(&first)?;
    let mut certs = Vec::new();
    for line in lines {
        let line = line?;
        if !line.trim().is_empty() {
            certs.push(serde_json::from_str(&line)?);
        }
    }
    Ok((header, certs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_examples() {
        let v: Vec<Vec<u64>> = enumerate(3, 4, 1, 0).map(|t| t.exponents().to_vec()).collect();
        assert_eq!(v, vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]]);
        let v: Vec<Vec<u64>> = enumerate(4, 4, 1, 0).map(|t| t.exponents().to_vec()).collect();
        assert_eq!(v, vec![vec![1, 2, 3, 4]]);
        assert!(enumerate(3, 30, 1, 0).all(|t| t.exponents() != [2, 4, 6]));
    }

    #[test]
    fn resume_iterator_continues() {
        let all: Vec<(u64, ExponentTuple)> = CanonicalTuples::new(3, 12).collect();
        for k in 0..all.len() {
            let rest: Vec<(u64, ExponentTuple)> =
                CanonicalTuples::after(all[k].1.exponents(), all[k].0, 12).collect();
            assert_eq!(rest, all[k + 1..].to_vec());
        }
    }

    #[test]
    fn elimination_matches_product_formula() {
        use crate::ranktest::MinorSystem;
        let t = ExponentTuple::new(vec![2, 3, 7, 11]).unwrap();
        let sys = MinorSystem::build(&t);
        let mut rows = vec![0];
        rows.extend_from_slice(t.exponents());
        for omit in 0..rows.len() {
            let kept: Vec<u64> = rows.iter().enumerate().filter(|&(i, _)| i != omit).map(|(_, &m)| m).collect();
            assert_eq!(minor_by_elimination(&kept), sys.minors[omit].to_dense().unwrap());
        }
    }

    #[test]
    fn modular_gcd_detects_common_factor() {
        let p = DensePolynomial::from_i64(&[-1, 0, 1]); // z^2 - 1
        let q = DensePolynomial::from_i64(&[1, 1]); // z + 1
        let r = DensePolynomial::from_i64(&[2, 0, 1]); // z^2 + 2
        assert!(!cofactors_coprime(&[p.clone(), q.clone()]).unwrap());
        assert!(cofactors_coprime(&[p, r]).unwrap());
    }

    #[test]
    fn sampling_is_deterministic() {
        let a: Vec<bool> = (0..500).map(|i| sampled(i, 0.1)).collect();
        let b: Vec<bool> = (0..500).map(|i| sampled(i, 0.1)).collect();
        assert_eq!(a, b);
        let hits = a.iter().filter(|&&x| x).count();
        assert!((20..=80).contains(&hits));
        assert!(!sampled(3, 0.0));
    }

    #[test]
    fn config_validation() {
        let mut c = SearchConfig::new(3, 2, "/tmp/x");
        assert!(c.validate().is_err());
        c.max_last_exponent = 10;
        assert!(c.validate().is_ok());
        c.shard_index = 1;
        assert!(c.validate().is_err());
    }
}
