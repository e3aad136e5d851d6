//! Height-ordered parameter sweeps.
//!
//! Rows are computed in parallel chunks and consumed strictly in enumeration
//! order, so every aggregate and every exported byte is independent of the
//! worker count.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{enumerate_rationals, format_rational, rat, rational_height, rational_square_root, Rational};
use crate::engine::{compute_preper, EngineConfig, Method, Portrait};
use crate::error::{Error, Result};
use crate::family::{FamilyLift, FamilyShape};

const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PoonenClass {
    E0,
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
}

impl PoonenClass {
    pub const ALL: [PoonenClass; 7] = [
        PoonenClass::E0,
        PoonenClass::E1,
        PoonenClass::E2,
        PoonenClass::E3,
        PoonenClass::E4,
        PoonenClass::E5,
        PoonenClass::E6,
    ];
}

impl fmt::Display for PoonenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The five sporadic parameters with their preperiodic counts.
pub fn e0_members() -> [(Rational, usize); 5] {
    [(rat(0, 1), 4), (rat(-1, 1), 4), (rat(-2, 1), 6), (rat(1, 4), 3), (rat(-29, 16), 9)]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub labels: Vec<PoonenClass>,
    /// Excess points that no class accounts for.
    pub unclassified: bool,
}

fn square_root_outside(q: &Rational, excluded: &[Rational]) -> bool {
    match rational_square_root(q) {
        Some(r) => !r.is_zero() && !excluded.contains(&r.abs()),
        None => false,
    }
}

/// Labels a quadratic-family parameter `z² + t` from `t` and its portrait,
/// and checks the portrait against the excess each class predicts.
pub fn poonen_classify(t: &Rational, portrait: &Portrait) -> Classification {
    use PoonenClass::*;
    let excess = portrait.len() - 1;
    if let Some((_, n)) = e0_members().iter().find(|(s, _)| s == t) {
        return Classification {
            labels: vec![E0],
            unclassified: portrait.len() != *n,
        };
    }
    let e1 = square_root_outside(&(rat(1, 4) - t), &[rat(1, 2), rat(3, 2)]);
    let e2 = square_root_outside(&(rat(-3, 4) - t), &[rat(1, 2)]);
    let e3 = portrait.types.iter().any(|&(l, _)| l == 3);
    let e4 = portrait.has_type(1, 2);
    let e5 = portrait.has_type(2, 2);
    let mut labels = Vec::new();
    for (on, class) in [(e1, E1), (e2, E2), (e3, E3), (e4, E4), (e5, E5), (e1 && e2, E6)] {
        if on {
            labels.push(class);
        }
    }
    let expected = if e3 {
        (!e1 && !e2).then_some(6)
    } else {
        match (e1, e2) {
            (true, true) => (!e4 && !e5).then_some(8),
            (true, false) => (!e5).then_some(if e4 { 6 } else { 4 }),
            (false, true) => (!e4).then_some(if e5 { 6 } else { 4 }),
            (false, false) => (!e4 && !e5).then_some(0),
        }
    };
    let unclassified = expected != Some(excess) || portrait.max_cycle() > 3;
    Classification { labels, unclassified }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusRow {
    #[serde(serialize_with = "ser_rational")]
    pub t: Rational,
    pub height: u64,
    pub count: usize,
    pub excess: i64,
    pub portrait_hash: String,
    pub poonen_labels: Vec<PoonenClass>,
    pub unclassified: bool,
    pub max_cycle: u32,
    pub bad_primes: Vec<u64>,
    pub method: Method,
}

fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

fn ser_rationals<S: serde::Serializer>(qs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(qs.iter().map(format_rational))
}

fn ser_rational_map<S: serde::Serializer>(m: &BTreeMap<u32, Vec<Rational>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(l, ts)| (l, ts.iter().map(format_rational).collect::<Vec<_>>())))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassTallies {
    pub e0: u64,
    pub e1: u64,
    pub e2: u64,
    pub e3: u64,
    pub e4: u64,
    pub e5: u64,
    pub e6: u64,
}

impl ClassTallies {
    fn bump(&mut self, c: PoonenClass) {
        let slot = match c {
            PoonenClass::E0 => &mut self.e0,
            PoonenClass::E1 => &mut self.e1,
            PoonenClass::E2 => &mut self.e2,
            PoonenClass::E3 => &mut self.e3,
            PoonenClass::E4 => &mut self.e4,
            PoonenClass::E5 => &mut self.e5,
            PoonenClass::E6 => &mut self.e6,
        };
        *slot += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub direct: i64,
    pub reconstructed: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub applicable: bool,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.applicable && self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusSummary {
    pub family: String,
    #[serde(rename = "X")]
    pub x: u64,
    pub generic_count: usize,
    /// `N(U, X)`: parameters of height at most `X` with a defined specialization.
    pub parameters: u64,
    #[serde(serialize_with = "ser_rationals")]
    pub degenerate: Vec<Rational>,
    #[serde(rename = "A")]
    pub a: i64,
    #[serde(rename = "R")]
    pub r: i64,
    #[serde(rename = "NE")]
    pub ne: u64,
    /// `l ↦ N(Z_l, X)` for `l = 1..=4`.
    #[serde(rename = "NZ")]
    pub nz: BTreeMap<u32, u64>,
    pub filter_decided: u64,
    pub class_tallies: Option<ClassTallies>,
    #[serde(serialize_with = "ser_rationals")]
    pub unclassified: Vec<Rational>,
    /// Parameters with a cycle longer than `l`, for `l = 1, 2, 3`.
    #[serde(serialize_with = "ser_rational_map")]
    pub long_cycles: BTreeMap<u32, Vec<Rational>>,
    pub identity_checks: Option<IdentityReport>,
}

impl CensusSummary {
    fn new(lift: &FamilyLift, x: u64) -> Self {
        let quadratic = matches!(lift.shape(), FamilyShape::Quadratic);
        CensusSummary {
            family: lift.name().to_string(),
            x,
            generic_count: lift.gamma().len(),
            parameters: 0,
            degenerate: Vec::new(),
            a: 0,
            r: 0,
            ne: 0,
            nz: (1..=4).map(|l| (l, 0)).collect(),
            filter_decided: 0,
            class_tallies: quadratic.then(ClassTallies::default),
            unclassified: Vec::new(),
            long_cycles: (1..=3).map(|l| (l, Vec::new())).collect(),
            identity_checks: None,
        }
    }

    fn add(&mut self, row: &CensusRow) {
        self.parameters += 1;
        self.a += row.count as i64;
        self.r += row.excess;
        if row.excess > 0 {
            self.ne += 1;
        }
        for (l, n) in self.nz.iter_mut() {
            if row.max_cycle > *l {
                *n += 1;
            }
        }
        for (l, ts) in self.long_cycles.iter_mut() {
            if row.max_cycle > *l {
                ts.push(row.t.clone());
            }
        }
        if row.method == Method::TropicalFilter {
            self.filter_decided += 1;
        }
        if let Some(tallies) = &mut self.class_tallies {
            for &c in &row.poonen_labels {
                tallies.bump(c);
            }
        }
        if row.unclassified {
            self.unclassified.push(row.t.clone());
        }
    }

    fn finish(&mut self) {
        if self.class_tallies.is_some() {
            self.identity_checks = Some(identity_check(self));
        }
    }
}

/// Computes one row; `None` for a degenerate parameter.
pub fn census_row(lift: &FamilyLift, t: &Rational, cfg: &EngineConfig) -> Result<Option<CensusRow>> {
    let m = match lift.specialize(t) {
        Ok(m) => m,
        Err(Error::DegenerateParameter { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let res = compute_preper(&m, Some(lift), cfg)?;
    let portrait = &res.portrait;
    let (poonen_labels, unclassified) = if matches!(lift.shape(), FamilyShape::Quadratic) {
        let c = poonen_classify(t, portrait);
        (c.labels, c.unclassified)
    } else {
        (Vec::new(), false)
    };
    let height = rational_height(t).to_u64().ok_or(Error::Overflow("height"))?;
    Ok(Some(CensusRow {
        t: t.clone(),
        height,
        count: res.count,
        excess: res.count as i64 - lift.gamma().len() as i64,
        portrait_hash: portrait.shape_key(),
        poonen_labels,
        unclassified,
        max_cycle: portrait.max_cycle(),
        bad_primes: m.bad_primes()?,
        method: res.method,
    }))
}

#[derive(Clone, Debug)]
pub struct CensusConfig {
    pub workers: usize,
    pub engine: EngineConfig,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            workers: 1,
            engine: EngineConfig::default(),
        }
    }
}

/// Sweeps all `t` with `H(t) ≤ X`, handing rows to `sink` in enumeration order.
pub fn run_census(
    lift: &FamilyLift,
    x: u64,
    workers: usize,
    sink: impl FnMut(&CensusRow) -> Result<()>,
) -> Result<CensusSummary> {
    let cfg = CensusConfig {
        workers,
        ..CensusConfig::default()
    };
    Ok(run_census_checkpoints(lift, &[x], &cfg, sink)?.pop().expect("one checkpoint"))
}

/// One sweep up to the largest checkpoint, summarized at every checkpoint.
/// Rows reach `sink` for every parameter up to the largest checkpoint.
pub fn run_census_checkpoints(
    lift: &FamilyLift,
    checkpoints: &[u64],
    cfg: &CensusConfig,
    mut sink: impl FnMut(&CensusRow) -> Result<()>,
) -> Result<Vec<CensusSummary>> {
    if checkpoints.is_empty() || checkpoints.contains(&0) {
        return Err(Error::InvalidArgument("height bounds must be positive".into()));
    }
    if cfg.workers == 0 {
        return Err(Error::InvalidArgument("need at least one worker".into()));
    }
    let x = *checkpoints.iter().max().expect("nonempty");
    let mut summaries: Vec<CensusSummary> = checkpoints.iter().map(|&c| CensusSummary::new(lift, c)).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let mut params = enumerate_rationals(x);
    let total = crate::arith::count_rationals(x);
    let mut done = 0u64;
    loop {
        let chunk: Vec<Rational> = params.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let rows: Vec<Result<Option<CensusRow>>> =
            pool.install(|| chunk.par_iter().map(|t| census_row(lift, t, &cfg.engine)).collect());
        for (t, row) in chunk.iter().zip(rows) {
            match row? {
                Some(row) => {
                    for s in summaries.iter_mut().filter(|s| row.height <= s.x) {
                        s.add(&row);
                    }
                    sink(&row)?;
                }
                None => {
                    log::warn!("{}: t = {} is degenerate and excluded", lift.name(), format_rational(t));
                    let h = rational_height(t);
                    for s in summaries.iter_mut().filter(|s| h <= s.x.into()) {
                        s.degenerate.push(t.clone());
                    }
                }
            }
        }
        done += chunk.len() as u64;
        log::info!("{}: {done}/{total} parameters", lift.name());
    }
    for s in &mut summaries {
        s.finish();
        debug_assert_eq!(s.a - s.generic_count as i64 * s.parameters as i64, s.r);
    }
    Ok(summaries)
}

/// Recomputes `N(E, X)` and `ℛ(X)` from the class tallies.
pub fn identity_check(summary: &CensusSummary) -> IdentityReport {
    let Some(n) = summary.class_tallies.as_ref().filter(|_| summary.x >= 29) else {
        return IdentityReport {
            applicable: false,
            checks: Vec::new(),
        };
    };
    let c = |v: u64| v as i64;
    let ne = 5 + c(n.e1) + c(n.e2) - c(n.e6) + c(n.e3);
    let r = 21 + 4 * (c(n.e1) + c(n.e2)) + 6 * c(n.e3) + 2 * (c(n.e4) + c(n.e5));
    let check = |name: &str, direct: i64, reconstructed: i64| IdentityCheck {
        name: name.to_string(),
        direct,
        reconstructed,
        pass: direct == reconstructed,
    };
    IdentityReport {
        applicable: true,
        checks: vec![
            check("N(E,X) = 5 + n(E1) + n(E2) - n(E6) + n(E3)", c(summary.ne), ne),
            check("R(X) = 21 + 4(n(E1) + n(E2)) + 6n(E3) + 2(n(E4) + n(E5))", summary.r, r),
        ],
    }
}

/// `l ↦ {t : f_t has a rational cycle longer than l}` for `l = 1, 2, 3`.
pub fn large_cycle_scan(summary: &CensusSummary) -> &BTreeMap<u32, Vec<Rational>> {
    &summary.long_cycles
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

#[derive(Serialize)]
struct CsvRecord<'a> {
    t_num: String,
    t_den: String,
    height: u64,
    count: usize,
    excess: i64,
    labels: String,
    max_cycle: u32,
    bad_primes: String,
    method: &'a Method,
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

/// Streams rows as CSV with columns
/// `t_num,t_den,height,count,excess,labels,max_cycle,bad_primes,method`.
pub struct CsvRowWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> CsvRowWriter<W> {
    pub fn new(w: W) -> Self {
        CsvRowWriter {
            inner: csv::Writer::from_writer(w),
        }
    }

    pub fn write(&mut self, row: &CensusRow) -> Result<()> {
        self.inner
            .serialize(CsvRecord {
                t_num: row.t.numer().to_string(),
                t_den: row.t.denom().to_string(),
                height: row.height,
                count: row.count,
                excess: row.excess,
                labels: join(&row.poonen_labels),
                max_cycle: row.max_cycle,
                bad_primes: join(&row.bad_primes),
                method: &row.method,
            })
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        self.inner.flush()?;
        self.inner.into_inner().map_err(|e| e.into_error())
    }
}

#[derive(Serialize)]
struct JsonExport<'a> {
    summary: &'a CensusSummary,
    rows: &'a [CensusRow],
}

/// Writes rows as CSV, or summary and rows as one JSON document.
pub fn export(summary: &CensusSummary, rows: &[CensusRow], format: ExportFormat, path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = BufWriter::new(File::create(path).map_err(io)?);
    match format {
        ExportFormat::Csv => {
            let mut w = CsvRowWriter::new(file);
            for row in rows {
                w.write(row)?;
            }
            w.finish().map_err(io)?;
        }
        ExportFormat::Json => {
            let mut file = file;
            serde_json::to_writer_pretty(&mut file, &JsonExport { summary, rows })?;
            file.write_all(b"\n").map_err(io)?;
            file.flush().map_err(io)?;
        }
    }
    Ok(())
}
