//! End-to-end drivers: candidates → decompression, and the reproduction
//! checks against the published reference values in `data/`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::candgen::{candidates_d5, candidates_general, CandidatePair, GenerationProfile};
use crate::decompress::{uncompress_search, FoundPair, SearchConfig};
use crate::diophantine::{admits_unit_sum, odd_five_squares};
use crate::error::{Error, Result};
use crate::golden;
use crate::grouptools::{
    binomial, block_from_codes, block_listing, codes_from_block, orbits, sequence_from_block,
    LexRankCode, OrbitCodes, OrbitTable,
};
use crate::seqcore::{compress_entries, psd, verify_legendre_pair, PmOneSequence};

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Search nodes per candidate.
    pub budget_nodes: u64,
    pub seed: u64,
    pub jobs: usize,
    pub x_filter: Option<BTreeSet<i64>>,
    /// Stop after the batch in which this many pairs have been found.
    pub max_pairs: Option<usize>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { budget_nodes: 1 << 26, seed: 0, jobs: 1, x_filter: None, max_pairs: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub ell: usize,
    pub m: usize,
    pub candidates: usize,
    pub candidates_searched: usize,
    pub pairs: Vec<FoundPair>,
    /// `|x|` over the found pairs (each pair oriented so that `x ≥ 0`).
    pub x_values: BTreeSet<i64>,
    pub nodes_visited: u64,
    /// Every candidate was searched to exhaustion.
    pub exhausted: bool,
}

/// The conjecture pipeline for `ℓ = 5m`: five-square candidates, then
/// decompression of each.
pub fn run_pipeline(ell: usize, opts: &PipelineOptions) -> Result<PipelineReport> {
    if ell % 5 != 0 || ell % 2 == 0 {
        return Err(Error::Domain(format!("ℓ = {ell} must be an odd multiple of 5")));
    }
    let m = ell / 5;
    let cands = candidates_d5(m, opts.x_filter.as_ref())?;
    decompress_all(ell, m, &cands, opts)
}

/// The general pipeline: profile-driven candidates, then decompression.
pub fn run_profile_pipeline(profile: &GenerationProfile, opts: &PipelineOptions) -> Result<PipelineReport> {
    let cands: Vec<CandidatePair> = candidates_general(profile)?.collect();
    decompress_all(profile.ell, profile.m, &cands, opts)
}

/// Decompresses candidates in batches of `opts.jobs`, in parallel within a
/// batch; output order follows candidate order.
pub fn decompress_all(
    ell: usize,
    m: usize,
    cands: &[CandidatePair],
    opts: &PipelineOptions,
) -> Result<PipelineReport> {
    let jobs = opts.jobs.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    let mut report = PipelineReport {
        ell,
        m,
        candidates: cands.len(),
        candidates_searched: 0,
        pairs: Vec::new(),
        x_values: BTreeSet::new(),
        nodes_visited: 0,
        exhausted: true,
    };
    for batch in cands.chunks(jobs) {
        let results: Vec<Result<_>> = pool.install(|| {
            use rayon::prelude::*;
            batch
                .par_iter()
                .map(|c| uncompress_search(ell, c, &SearchConfig::backtrack(opts.budget_nodes, opts.seed)))
                .collect()
        });
        for r in results {
            let r = r?;
            report.candidates_searched += 1;
            report.nodes_visited += r.nodes_visited;
            report.exhausted &= r.exhausted;
            for p in r.pairs {
                let oriented = orient(p);
                if let Some(x) = oriented.x {
                    report.x_values.insert(x);
                }
                report.pairs.push(oriented);
            }
        }
        if opts.max_pairs.is_some_and(|n| report.pairs.len() >= n) {
            report.exhausted = report.exhausted && report.candidates_searched == cands.len();
            break;
        }
    }
    Ok(report)
}

/// Swaps the pair when its `x` is negative.
fn orient(p: FoundPair) -> FoundPair {
    match p.x {
        Some(x) if x < 0 => FoundPair {
            x: Some(-x),
            a: p.b,
            b: p.a,
            codes: p.codes.map(|(ca, cb)| (cb, ca)),
        },
        _ => p,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Section {
    Table1Small,
    DiophAll,
    Ell85Decode,
    Ell87Verify,
}

impl Section {
    pub const ALL: [Section; 4] =
        [Section::Table1Small, Section::DiophAll, Section::Ell85Decode, Section::Ell87Verify];
}

impl FromStr for Section {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1-small" => Ok(Section::Table1Small),
            "dioph-all" => Ok(Section::DiophAll),
            "ell85-decode" => Ok(Section::Ell85Decode),
            "ell87-verify" => Ok(Section::Ell87Verify),
            other => Err(Error::Parse(format!("unknown section {other:?}"))),
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Section::Table1Small => "table1-small",
            Section::DiophAll => "dioph-all",
            Section::Ell85Decode => "ell85-decode",
            Section::Ell87Verify => "ell87-verify",
        })
    }
}

/// Outcome of a reproduction run: `mismatches` is the diff against the
/// reference data, `notes` the values that were checked.
#[derive(Debug, Clone, Serialize)]
pub struct ReproReport {
    pub section: Section,
    pub mismatches: Vec<String>,
    pub notes: Vec<String>,
}

impl ReproReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn check(&mut self, label: &str, expected: impl fmt::Debug, got: impl fmt::Debug, equal: bool) {
        if equal {
            self.notes.push(format!("{label}: {got:?}"));
        } else {
            self.mismatches.push(format!("{label}: expected {expected:?}, got {got:?}"));
        }
    }
}

pub fn reproduce(section: Section) -> Result<ReproReport> {
    let mut r = ReproReport { section, mismatches: Vec::new(), notes: Vec::new() };
    match section {
        Section::DiophAll => reproduce_dioph(&mut r)?,
        Section::Ell85Decode => reproduce_ell85(&mut r)?,
        Section::Ell87Verify => reproduce_ell87(&mut r)?,
        Section::Table1Small => reproduce_table1_small(&mut r)?,
    }
    Ok(r)
}

fn reproduce_dioph(r: &mut ReproReport) -> Result<()> {
    for row in golden::dioph() {
        let sols = odd_five_squares(row.m)?;
        let got: Vec<[i32; 5]> = sols.iter().map(|s| s.values).collect();
        r.check(&format!("m={} solutions of {}", row.m, row.target), &row.solutions, &got, got == row.solutions);
        let ruled: Vec<[i32; 5]> = sols.iter().filter(|s| !admits_unit_sum(s)).map(|s| s.values).collect();
        r.check(&format!("m={} ruled out", row.m), &row.ruled_out, &ruled, ruled == row.ruled_out);
    }
    Ok(())
}

/// Orbit codes for a `[ones rank, twos rank]` entry of the ℓ = 85 fixture.
pub fn ell85_codes(table: &OrbitTable, counts: &BTreeMap<usize, usize>, ranks: [u64; 2]) -> OrbitCodes {
    [(1usize, ranks[0]), (2usize, ranks[1])]
        .into_iter()
        .map(|(size, rank)| {
            let code = LexRankCode::new(table.class(size).len() as u64, counts[&size] as u64, rank);
            (size, code)
        })
        .collect()
}

pub fn decode_codes(table: &OrbitTable, codes: &OrbitCodes) -> Result<PmOneSequence> {
    Ok(sequence_from_block(&block_from_codes(table, codes)?))
}

fn reproduce_ell85(r: &mut ReproReport) -> Result<()> {
    let g = golden::ell85();
    let table = orbits(g.ell as u64, &g.generators)?;
    r.check("size-1 orbits", g.size_one_orbits, table.class(1).len(), table.class(1).len() == g.size_one_orbits);
    r.check("size-2 orbits", g.size_two_orbits, table.class(2).len(), table.class(2).len() == g.size_two_orbits);
    let c1 = binomial(table.class(1).len() as u64, g.orbit_counts[&1] as u64);
    let c2 = binomial(table.class(2).len() as u64, g.orbit_counts[&2] as u64);
    let space = &c1 * &c2;
    r.check("C(16,12)", g.binomials.ones, &c1, c1 == g.binomials.ones.into());
    r.check("C(34,15)", g.binomials.twos, &c2, c2 == g.binomials.twos.into());
    r.check("search space", g.search_space, &space, space == g.search_space.into());

    for (i, [ra, rb]) in g.code_pairs.iter().enumerate() {
        let ca = ell85_codes(&table, &g.orbit_counts, *ra);
        let cb = ell85_codes(&table, &g.orbit_counts, *rb);
        let a = decode_codes(&table, &ca)?;
        let b = decode_codes(&table, &cb)?;
        let rep = verify_legendre_pair(&a, &b)?;
        r.check(&format!("pair {} {:?}/{:?} is a Legendre pair", i + 1, ra, rb), true, rep.is_legendre_pair, rep.is_legendre_pair);
        let back = (
            codes_from_block(&table, &crate::grouptools::block_from_sequence(&a))?,
            codes_from_block(&table, &crate::grouptools::block_from_sequence(&b))?,
        );
        r.check(&format!("pair {} re-encodes", i + 1), true, back == (Some(ca.clone()), Some(cb.clone())), back == (Some(ca), Some(cb)));
    }

    let f = &g.first_pair;
    let [ra, rb] = g.code_pairs[0];
    let ca = ell85_codes(&table, &g.orbit_counts, ra);
    let cb = ell85_codes(&table, &g.orbit_counts, rb);
    let subsets = |codes: &OrbitCodes, size| codes[&size].decode();
    let (a1, a2, b1, b2) = (subsets(&ca, 1)?, subsets(&ca, 2)?, subsets(&cb, 1)?, subsets(&cb, 2)?);
    r.check("A ones", &f.a_ones, &a1, a1 == f.a_ones);
    r.check("A twos", &f.a_twos, &a2, a2 == f.a_twos);
    r.check("B ones", &f.b_ones, &b1, b1 == f.b_ones);
    r.check("B twos", &f.b_twos, &b2, b2 == f.b_twos);
    let la = block_listing(&table, &ca)?;
    let lb = block_listing(&table, &cb)?;
    r.check("A block", &f.a_block, &la, la == f.a_block);
    r.check("B block", &f.b_block, &lb, lb == f.b_block);

    let a = decode_codes(&table, &ca)?;
    let b = decode_codes(&table, &cb)?;
    let m = g.ell / 5;
    let comp_a = compress_entries(a.as_slice(), m)?;
    let comp_b = compress_entries(b.as_slice(), m)?;
    r.check("A compression", &f.a_compression, &comp_a, comp_a == f.a_compression);
    r.check("B compression", &f.b_compression, &comp_b, comp_b == f.b_compression);
    let rep = verify_legendre_pair(&a, &b)?;
    r.check("x", f.x, rep.x_value, rep.x_value == Some(f.x));
    r.check("(n1, n2)", (f.n, f.n), rep.n1_n2, rep.n1_n2 == Some((f.n, f.n)));
    let (pa, pb) = (psd(a.as_slice(), m), psd(b.as_slice(), m));
    r.check("PSD_A(17)", f.psd_a, pa, (pa - f.psd_a).abs() <= 1e-6);
    r.check("PSD_B(17)", f.psd_b, pb, (pb - f.psd_b).abs() <= 1e-6);
    if let Some((ea, eb)) = &rep.psd_at_m {
        r.check("exact PSD_A(17)", f.psd_a, ea.to_string(), (ea.to_f64() - f.psd_a).abs() <= 1e-6);
        r.check("exact PSD_B(17)", f.psd_b, eb.to_string(), (eb.to_f64() - f.psd_b).abs() <= 1e-6);
    }
    Ok(())
}

fn reproduce_ell87(r: &mut ReproReport) -> Result<()> {
    let g = golden::ell87();
    for (i, p) in g.pairs.iter().enumerate() {
        let a = PmOneSequence::new(p.a.clone())?;
        let b = PmOneSequence::new(p.b.clone())?;
        r.check(&format!("pair {} lengths", i + 1), (g.ell, g.ell), (a.len(), b.len()), a.len() == g.ell && b.len() == g.ell);
        let rep = verify_legendre_pair(&a, &b)?;
        r.check(&format!("pair {} is a Legendre pair", i + 1), true, rep.is_legendre_pair, rep.is_legendre_pair);
        let ca = compress_entries(a.as_slice(), g.m)?;
        let cb = compress_entries(b.as_slice(), g.m)?;
        r.check(&format!("pair {} A compression", i + 1), &g.a_compression, &ca, ca == g.a_compression);
        r.check(&format!("pair {} B compression", i + 1), &g.b_compression, &cb, cb == g.b_compression);
    }
    Ok(())
}

fn reproduce_table1_small(r: &mut ReproReport) -> Result<()> {
    let rows = golden::table1();
    for ell in [5usize, 15] {
        let row = rows
            .iter()
            .find(|row| row.ell == ell)
            .ok_or_else(|| Error::Validation(format!("no reference row for ℓ = {ell}")))?;
        let report = run_pipeline(ell, &PipelineOptions { budget_nodes: u64::MAX / 4, ..Default::default() })?;
        r.check(&format!("ℓ={ell} exhaustive"), true, report.exhausted, report.exhausted);
        r.check(&format!("ℓ={ell} pairs found"), "≥ 1", report.pairs.len(), !report.pairs.is_empty());
        let want: BTreeSet<i64> = row.x.iter().copied().collect();
        r.check(&format!("ℓ={ell} x-set"), &want, &report.x_values, report.x_values == want);
        let unbalanced = report
            .pairs
            .iter()
            .filter(|p| {
                let rep = verify_legendre_pair(&p.a, &p.b).expect("found pairs are well formed");
                rep.n1_n2 != Some((ell as i64 + 1, ell as i64 + 1))
            })
            .count();
        r.check(&format!("ℓ={ell} pairs with n1 ≠ ℓ+1 or n2 ≠ ℓ+1"), 0, unbalanced, unbalanced == 0);
    }
    Ok(())
}
