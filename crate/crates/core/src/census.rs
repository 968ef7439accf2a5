//! Closed-form counts and their brute-force verifiers.
//!
//! The tuple sets live in `(F_q^*)^6`: `S` is the set of
//! `(a11, a22, a33, d1, d2, d3)` whose sums `s12`, `s13`, `s23`, `s` are all
//! nonzero, and `S1..S5` split `S` by which diagonal entries coincide
//! (all distinct; all equal; `a11 = a22`; `a11 = a33`; `a22 = a33`).
//!
//! All counts are exact integers. Work is split into contiguous index ranges
//! and partial counts are added, so results do not depend on the worker count.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::build_raw;
use crate::error::{Error, ErrorKind, Result};
use crate::field::{Elem, Field};
use crate::mat3::{self, Mat3};
use crate::si::{cross_condition, is_nowhere_zero_si, nowhere_zero_clause};

/// Largest order for the `(q-1)^6` tuple scans and the parametrized enumeration.
pub const MAX_TUPLE_ORDER: u32 = 16;
/// Largest order for the `(q-1)^9` matrix scans.
pub const MAX_EXHAUSTIVE_ORDER: u32 = 8;
/// Orders at or above this need `long_run` for the parametrized enumeration.
pub const LONG_RUN_ORDER: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SetName {
    S,
    S1,
    S2,
    S3,
    S4,
    S5,
    #[serde(rename = "SI_MDS")]
    SiMds,
    #[serde(rename = "INV_MDS")]
    InvMds,
}

impl SetName {
    pub const ALL: [SetName; 8] =
        [SetName::S, SetName::S1, SetName::S2, SetName::S3, SetName::S4, SetName::S5, SetName::SiMds, SetName::InvMds];
    pub const S_FAMILY: [SetName; 6] = [SetName::S, SetName::S1, SetName::S2, SetName::S3, SetName::S4, SetName::S5];

    pub fn as_str(self) -> &'static str {
        match self {
            SetName::S => "S",
            SetName::S1 => "S1",
            SetName::S2 => "S2",
            SetName::S3 => "S3",
            SetName::S4 => "S4",
            SetName::S5 => "S5",
            SetName::SiMds => "SI_MDS",
            SetName::InvMds => "INV_MDS",
        }
    }

    pub fn is_tuple_set(self) -> bool {
        !matches!(self, SetName::SiMds | SetName::InvMds)
    }
}

impl fmt::Display for SetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SetName::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown set {s:?}; expected one of S, S1..S5, SI_MDS, INV_MDS")))
    }
}

fn order_of(m: u32) -> Result<i128> {
    if m < 2 {
        return Err(Error::invalid(format!("counting formulas need m >= 2, got {m}")));
    }
    if m > 60 {
        return Err(Error::invalid(format!("m = {m} is out of range")));
    }
    Ok(1i128 << m)
}

/// The closed form for `set` over GF(2^m).
pub fn formula_count(set: SetName, m: u32) -> Result<u128> {
    let q = order_of(m)?;
    let v = match set {
        SetName::S1 => (q - 1).pow(2) * (q - 2).pow(2) * (q - 3) * (q - 4),
        SetName::S2 | SetName::InvMds => (q - 1).pow(2) * (q - 2) * (q - 4),
        SetName::S3 | SetName::S4 | SetName::S5 => (q - 1).pow(2) * (q - 2) * (q * q - 6 * q + 8),
        SetName::S => (q - 1).pow(3) * (q - 2) * (q - 4),
        SetName::SiMds => (q - 1).pow(5) * (q - 2) * (q - 4),
    };
    Ok(u128::try_from(v).expect("nonnegative for q >= 4"))
}

/// Sum of the closed forms of `S1..S5`, which partition `S`.
pub fn partition_formula_sum(m: u32) -> Result<u128> {
    SetName::S_FAMILY[1..].iter().map(|&s| formula_count(s, m)).sum()
}

/// Options shared by the brute-force paths.
#[derive(Clone, Default)]
pub struct CensusOptions {
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Allows the GF(16) parametrized enumeration.
    pub long_run: bool,
    /// Called with `(label, fraction done)` at fixed work fractions.
    pub progress: Option<Arc<dyn Fn(&str, f64) + Send + Sync>>,
}

impl fmt::Debug for CensusOptions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CensusOptions")
            .field("jobs", &self.jobs)
            .field("long_run", &self.long_run)
            .field("progress", &self.progress.is_some())
            .finish()
    }
}

impl CensusOptions {
    pub fn with_jobs(jobs: usize) -> Self {
        CensusOptions { jobs: Some(jobs), ..Default::default() }
    }

    /// Runs `chunk(i)` for `i in 0..n` on the configured pool and sums the results.
    fn sum_chunks<T, F>(&self, label: &str, n: usize, chunk: F) -> Result<T>
    where
        T: Send + std::iter::Sum<T> + Default,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        let done = std::sync::atomic::AtomicUsize::new(0);
        let step = (n / 10).max(1);
        let run = || {
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let r = chunk(i);
                    let k = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
                    if let Some(p) = &self.progress {
                        if k % step == 0 || k == n {
                            p(label, k as f64 / n as f64);
                        }
                    }
                    r
                })
                .collect::<Result<Vec<T>>>()
                .map(|v| v.into_iter().sum())
        };
        match self.jobs {
            Some(j) => rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::invalid(format!("cannot start {j} workers: {e}")))?
                .install(run),
            None => run(),
        }
    }
}

fn require_binary(f: &Field, max_order: u32, what: &str) -> Result<()> {
    if !f.is_char2() || f.spec().m() < 2 {
        return Err(Error::invalid(format!("{what} needs GF(2^m) with m >= 2, got {}", f.spec())));
    }
    if f.order() > max_order {
        return Err(Error::Budget(format!("{what} is limited to q <= {max_order}, got q = {}", f.order())));
    }
    Ok(())
}

/// Brute-force sizes of `S, S1, ..., S5`, in that order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TupleCounts(pub [u128; 6]);

impl std::iter::Sum for TupleCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(TupleCounts::default(), |mut acc, c| {
            for (a, b) in acc.0.iter_mut().zip(c.0) {
                *a += b;
            }
            acc
        })
    }
}

impl TupleCounts {
    pub fn get(&self, set: SetName) -> Option<u128> {
        SetName::S_FAMILY.iter().position(|&s| s == set).map(|i| self.0[i])
    }
}

/// Which of `S1..S5` a diagonal triple belongs to (index into [`TupleCounts`]).
#[inline]
fn diagonal_class(a: [Elem; 3]) -> Option<usize> {
    let (e12, e13, e23) = (a[0] == a[1], a[0] == a[2], a[1] == a[2]);
    match (e12, e13, e23) {
        (false, false, false) => Some(1),
        (true, true, true) => Some(2),
        (true, false, false) => Some(3),
        (false, true, false) => Some(4),
        (false, false, true) => Some(5),
        _ => None,
    }
}

#[inline]
fn sums_nonzero(f: &Field, a: &[Elem; 3], d: &[Elem; 3]) -> bool {
    let t = [f.mul(a[0], d[0]), f.mul(a[1], d[1]), f.mul(a[2], d[2])];
    t[0] != t[1] && t[0] != t[2] && t[1] != t[2] && !f.add(f.add(t[0], t[1]), t[2]).is_zero()
}

/// Literal enumeration of `(F_q^*)^6`, counting `S` and each of `S1..S5`.
pub fn tuple_counts(f: &Field, opts: &CensusOptions) -> Result<TupleCounts> {
    require_binary(f, MAX_TUPLE_ORDER, "tuple enumeration")?;
    let nz = f.elements(true);
    let k = nz.len();
    opts.sum_chunks("tuples", k * k * k, |i| {
        let a = [nz[i / (k * k)], nz[i / k % k], nz[i % k]];
        let mut n = 0u128;
        for &d1 in &nz {
            for &d2 in &nz {
                for &d3 in &nz {
                    n += u128::from(sums_nonzero(f, &a, &[d1, d2, d3]));
                }
            }
        }
        let mut c = TupleCounts::default();
        c.0[0] = n;
        c.0[diagonal_class(a).expect("every triple has a class")] = n;
        Ok(c)
    })
}

/// Brute-force size of one tuple set.
pub fn brute_force_s(f: &Field, set: SetName) -> Result<u128> {
    if !set.is_tuple_set() {
        return Err(Error::invalid(format!("{set} is not one of S, S1..S5")));
    }
    Ok(tuple_counts(f, &CensusOptions::default())?.get(set).expect("tuple set"))
}

/// Number of pairwise distinct `(d1, d2, d3) ∈ (F_q^*)^3` with all four sums
/// nonzero, for a fixed diagonal triple.
pub fn distinct_d_count(f: &Field, a: [Elem; 3]) -> u128 {
    let nz = f.elements(true);
    let mut n = 0;
    for &d1 in &nz {
        for &d2 in &nz {
            for &d3 in &nz {
                if d1 != d2 && d1 != d3 && d2 != d3 && sums_nonzero(f, &a, &[d1, d2, d3]) {
                    n += 1;
                }
            }
        }
    }
    n
}

/// Closed form for [`distinct_d_count`] when the `a_ii` are distinct.
pub fn distinct_d_formula(m: u32, a11_plus_a22_is_a33: bool) -> Result<u128> {
    let q = order_of(m)?;
    let c = if a11_plus_a22_is_a33 { 20 } else { 22 };
    Ok(u128::try_from((q - 1) * (q * q - 9 * q + c)).expect("nonnegative"))
}

/// Result of the parametrized enumeration.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Enumeration {
    /// Parameter tuples visited: `|S|·(q-1)^2`.
    pub raw_tuples: u128,
    /// Distinct matrices (equal to `raw_tuples` without dedup).
    pub distinct: u128,
    /// The distinct matrices in ascending key order, when requested.
    pub matrices: Option<Vec<Mat3>>,
}

impl std::iter::Sum for Enumeration {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Enumeration::default(), |mut acc, e| {
            acc.raw_tuples += e.raw_tuples;
            acc.distinct += e.distinct;
            if let Some(ms) = e.matrices {
                acc.matrices.get_or_insert_with(Vec::new).extend(ms);
            }
            acc
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerateMode {
    pub dedup: bool,
    pub emit: bool,
}

impl Default for EnumerateMode {
    fn default() -> Self {
        EnumerateMode { dedup: true, emit: false }
    }
}

fn unpack_key(key: u64, bits: u32) -> Mat3 {
    let mask = (1u64 << bits) - 1;
    let mut m = [Elem::ZERO; 9];
    for (i, e) in m.iter_mut().enumerate() {
        *e = Elem(((key >> (bits * (8 - i as u32))) & mask) as u16);
    }
    m
}

fn verify_si_mds(f: &Field, m: &Mat3) -> Result<()> {
    if is_nowhere_zero_si(f, m) && mat3::is_mds3(f, m) {
        Ok(())
    } else {
        Err(Error::Inconsistent(format!("constructed matrix {:?} is not SI and MDS", m.map(|e| e.0))))
    }
}

/// Builds every matrix from `S × (F_q^*)^2` and counts them.
///
/// Partitioned by the diagonal triple: diagonal entries are matrix entries,
/// so matrices from different partitions never coincide and per-partition
/// distinct counts add up. Every distinct matrix is checked to be SI and MDS.
pub fn enumerate_si_mds(f: &Field, mode: EnumerateMode, opts: &CensusOptions) -> Result<Enumeration> {
    require_binary(f, MAX_TUPLE_ORDER, "parametrized enumeration")?;
    if f.order() >= LONG_RUN_ORDER && !opts.long_run {
        return Err(Error::Budget(format!(
            "parametrized enumeration over q = {} needs the long-run flag",
            f.order()
        )));
    }
    let bits = f.spec().m();
    let nz = f.elements(true);
    let k = nz.len();
    let mut result = opts.sum_chunks("enumerate", k * k * k, |i| {
        let a = [nz[i / (k * k)], nz[i / k % k], nz[i % k]];
        let mut keys = Vec::new();
        let mut raw = 0u128;
        for &d1 in &nz {
            for &d2 in &nz {
                for &d3 in &nz {
                    let d = [d1, d2, d3];
                    if !sums_nonzero(f, &a, &d) {
                        continue;
                    }
                    for &x in &nz {
                        for &y in &nz {
                            let m = build_raw(f, &a, &d, x, y).expect("nonzero parameters");
                            raw += 1;
                            if mode.dedup {
                                keys.push(mat3::pack_key(&m, bits));
                            } else {
                                verify_si_mds(f, &m)?;
                                if mode.emit {
                                    keys.push(mat3::pack_key(&m, bits));
                                }
                            }
                        }
                    }
                }
            }
        }
        keys.sort_unstable();
        if mode.dedup {
            keys.dedup();
            for &key in &keys {
                verify_si_mds(f, &unpack_key(key, bits))?;
            }
        }
        Ok(Enumeration {
            raw_tuples: raw,
            distinct: if mode.dedup { keys.len() as u128 } else { raw },
            matrices: mode.emit.then(|| keys.iter().map(|&key| unpack_key(key, bits)).collect()),
        })
    })?;
    if let Some(ms) = result.matrices.as_mut() {
        ms.sort_unstable_by_key(|m| mat3::pack_key(m, bits));
    }
    Ok(result)
}

/// Targets of the exhaustive matrix scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixTarget {
    SiMds,
    InvMds,
}

/// Scans every nowhere-zero 3×3 matrix and counts SI-MDS or involutory MDS ones.
///
/// Off-diagonal entries form the outer loops so that conditions on them alone
/// (the cross condition; the off-diagonal part of `A^2`) are evaluated once
/// per off-diagonal choice, not once per matrix.
pub fn exhaustive_matrix_census(f: &Field, target: MatrixTarget, opts: &CensusOptions) -> Result<u128> {
    require_binary(f, MAX_EXHAUSTIVE_ORDER, "exhaustive matrix scan")?;
    let nz = f.elements(true);
    let k = nz.len();
    opts.sum_chunks("scan", k * k, |i| {
        let (a12, a13) = (nz[i / k], nz[i % k]);
        let mut n = 0u128;
        for &a21 in &nz {
            for &a23 in &nz {
                for &a31 in &nz {
                    for &a32 in &nz {
                        let off = [a12, a13, a21, a23, a31, a32];
                        n += match target {
                            MatrixTarget::SiMds => scan_si_diagonals(f, &nz, off),
                            MatrixTarget::InvMds => scan_involutory_diagonals(f, &nz, off),
                        };
                    }
                }
            }
        }
        Ok(n)
    })
}

#[inline]
fn assemble(off: [Elem; 6], a11: Elem, a22: Elem, a33: Elem) -> Mat3 {
    let [a12, a13, a21, a23, a31, a32] = off;
    [a11, a12, a13, a21, a22, a23, a31, a32, a33]
}

fn scan_si_diagonals(f: &Field, nz: &[Elem], off: [Elem; 6]) -> u128 {
    let probe = assemble(off, Elem::ONE, Elem::ONE, Elem::ONE);
    if !cross_condition(f, &probe) {
        return 0;
    }
    let mut n = 0;
    for &a11 in nz {
        for &a22 in nz {
            for &a33 in nz {
                let m = assemble(off, a11, a22, a33);
                if nowhere_zero_clause(f, &m) && mat3::is_mds3(f, &m) && is_nowhere_zero_si(f, &m) {
                    n += 1;
                }
            }
        }
    }
    n
}

fn scan_involutory_diagonals(f: &Field, nz: &[Elem], off: [Elem; 6]) -> u128 {
    let [a12, a13, a21, a23, a31, a32] = off;
    // diagonal of A^2 is a_ii^2 + (off-diagonal part); it must be 1
    let r0 = f.add(f.mul(a12, a21), f.mul(a13, a31));
    let r1 = f.add(f.mul(a21, a12), f.mul(a23, a32));
    let r2 = f.add(f.mul(a31, a13), f.mul(a32, a23));
    let unit = |a: Elem, r: Elem| f.add(f.mul(a, a), r) == Elem::ONE;
    let mut n = 0;
    for &a11 in nz.iter().filter(|&&a| unit(a, r0)) {
        for &a22 in nz.iter().filter(|&&a| unit(a, r1)) {
            for &a33 in nz.iter().filter(|&&a| unit(a, r2)) {
                let m = assemble(off, a11, a22, a33);
                if mat3::is_involutory3(f, &m) && mat3::is_mds3(f, &m) {
                    n += 1;
                }
            }
        }
    }
    n
}

/// Whether brute force runs alongside the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    Formula,
    Both,
}

impl FromStr for CountMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "formula" => Ok(CountMode::Formula),
            "both" | "brute" => Ok(CountMode::Both),
            _ => Err(Error::invalid(format!("unknown mode {s:?}; expected formula or both"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub set: SetName,
    pub q: u32,
    pub formula: Option<u128>,
    /// Primary brute-force value: tuple enumeration for the `S` family,
    /// deduplicated parametrized enumeration for `SI_MDS`, matrix scan for `INV_MDS`.
    pub brute_force: Option<u128>,
    /// Independent matrix-scan count for `SI_MDS` (q <= 8).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustive: Option<u128>,
    /// Parameter tuples visited by the `SI_MDS` enumeration.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw_tuples: Option<u128>,
    /// All available values agree; absent when nothing was compared.
    #[serde(rename = "match")]
    pub matches: Option<bool>,
    #[serde(skip)]
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub error_kind: Option<ErrorKind>,
}

impl CensusReport {
    fn new(set: SetName, q: u32) -> Self {
        CensusReport {
            set,
            q,
            formula: None,
            brute_force: None,
            exhaustive: None,
            raw_tuples: None,
            matches: None,
            seconds: 0.0,
            error: None,
            error_kind: None,
        }
    }

    fn record(&mut self, e: Error) {
        if self.error.is_none() {
            self.error_kind = Some(e.kind());
            self.error = Some(e.to_string());
        }
    }

    fn settle(&mut self) {
        let values: Vec<u128> = [self.brute_force, self.exhaustive].into_iter().flatten().collect();
        self.matches = match (self.formula, values.is_empty()) {
            (Some(fv), false) => Some(values.iter().all(|&v| v == fv)),
            (None, false) => Some(values.windows(2).all(|w| w[0] == w[1])).filter(|_| values.len() > 1),
            _ => None,
        };
    }
}

/// Evaluates each requested set; per-set failures are recorded in its report.
pub fn run_census(f: &Field, sets: &[SetName], mode: CountMode, opts: &CensusOptions) -> Vec<CensusReport> {
    let mut sets = sets.to_vec();
    sets.sort();
    sets.dedup();
    let mut tuples: Option<Result<TupleCounts>> = None;
    let mut reports = Vec::with_capacity(sets.len());
    for set in sets {
        let start = Instant::now();
        let mut r = CensusReport::new(set, f.order());
        match (f.is_char2(), formula_count(set, f.spec().m())) {
            (true, Ok(v)) => r.formula = Some(v),
            (false, _) => r.record(Error::invalid(format!("census needs GF(2^m), got {}", f.spec()))),
            (_, Err(e)) => r.record(e),
        }
        if mode == CountMode::Both && r.error.is_none() {
            match set {
                _ if set.is_tuple_set() => {
                    let counts = tuples.get_or_insert_with(|| tuple_counts(f, opts));
                    match counts {
                        Ok(c) => r.brute_force = c.get(set),
                        Err(e) => r.record(e.clone()),
                    }
                }
                SetName::SiMds => {
                    match enumerate_si_mds(f, EnumerateMode::default(), opts) {
                        Ok(e) => {
                            r.brute_force = Some(e.distinct);
                            r.raw_tuples = Some(e.raw_tuples);
                        }
                        Err(e) => r.record(e),
                    }
                    if f.order() <= MAX_EXHAUSTIVE_ORDER {
                        match exhaustive_matrix_census(f, MatrixTarget::SiMds, opts) {
                            Ok(v) => r.exhaustive = Some(v),
                            Err(e) => r.record(e),
                        }
                    }
                }
                _ => match exhaustive_matrix_census(f, MatrixTarget::InvMds, opts) {
                    Ok(v) => r.brute_force = Some(v),
                    Err(e) => r.record(e),
                },
            }
        }
        r.settle();
        r.seconds = start.elapsed().as_secs_f64();
        reports.push(r);
    }
    reports
}
