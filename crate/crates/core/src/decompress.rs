//! Decompression: recovering `±1` pairs from a candidate compressed pair,
//! and the orbit-restricted search over unions of multiplier orbits.
//!
//! Both searches generate single sequences, discard those with some
//! `PSD(k) > 2ℓ + 2` (impossible since the partner's PSD is non-negative),
//! and join the survivors on their PAF vectors: `B` pairs with `A` exactly
//! when `PAF_B(s) = −2 − PAF_A(s)` for `1 ≤ s ≤ (ℓ−1)/2`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::candgen::{CandidatePair, PSD_TOLERANCE};
use crate::error::{Error, Result};
use crate::grouptools::{
    binomial, block_from_codes, orbits, sequence_from_block, LexRankCode, OrbitCodes, OrbitTable,
};
use crate::seqcore::{compress_entries, p2, paf_unchecked, psd, PmOneSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Backtrack,
    OrbitRestricted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub budget_nodes: u64,
    pub max_solutions: usize,
    pub seed: u64,
    pub strategy: Strategy,
    pub psd_prune: bool,
    /// Orbit search: generators of the multiplier subgroup.
    pub subgroup_generators: Option<Vec<u64>>,
    /// Orbit search: orbit size → number of orbits of that size to select.
    pub orbit_counts: Option<BTreeMap<usize, usize>>,
    /// Orbit search, `5 | ℓ`: keep only sequences whose 5-entry compression
    /// has `PAF(0) = 4m + 1`.
    pub conjecture_prefilter: bool,
    /// Orbit search: selections visited before any sampling.
    pub include_codes: Vec<OrbitCodes>,
    /// Sampling shards; each uses its own stream of the seeded generator.
    pub jobs: usize,
}

impl SearchConfig {
    pub fn backtrack(budget_nodes: u64, seed: u64) -> Self {
        Self {
            budget_nodes,
            max_solutions: usize::MAX,
            seed,
            strategy: Strategy::Backtrack,
            psd_prune: true,
            subgroup_generators: None,
            orbit_counts: None,
            conjecture_prefilter: false,
            include_codes: Vec::new(),
            jobs: 1,
        }
    }

    /// Orbit search selecting `ones` orbits of size 1 and `twos` of size 2.
    pub fn orbit_restricted(generators: Vec<u64>, ones: usize, twos: usize, budget_nodes: u64, seed: u64) -> Self {
        let mut counts = BTreeMap::new();
        counts.insert(1, ones);
        counts.insert(2, twos);
        Self::orbit_with_counts(generators, counts, budget_nodes, seed)
    }

    pub fn orbit_with_counts(
        generators: Vec<u64>,
        counts: BTreeMap<usize, usize>,
        budget_nodes: u64,
        seed: u64,
    ) -> Self {
        Self {
            strategy: Strategy::OrbitRestricted,
            subgroup_generators: Some(generators),
            orbit_counts: Some(counts),
            conjecture_prefilter: true,
            ..Self::backtrack(budget_nodes, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget_nodes == 0 {
            return Err(Error::Validation("budget_nodes must be positive".into()));
        }
        let orbit_fields = self.subgroup_generators.is_some() && self.orbit_counts.is_some();
        match self.strategy {
            Strategy::Backtrack if self.subgroup_generators.is_some() || self.orbit_counts.is_some() => {
                Err(Error::Validation("orbit fields set for backtrack strategy".into()))
            }
            Strategy::OrbitRestricted if !orbit_fields => Err(Error::Validation(
                "orbit search needs subgroup generators and orbit counts".into(),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoundPair {
    pub a: PmOneSequence,
    pub b: PmOneSequence,
    /// `PAF_𝒜(1) − PAF_𝒜(2)` of the 5-entry compression of `a`, when `5 | ℓ`.
    pub x: Option<i64>,
    /// Orbit selections of `a` and `b` (orbit search only).
    pub codes: Option<(OrbitCodes, OrbitCodes)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub pairs: Vec<FoundPair>,
    pub nodes_visited: u64,
    pub exhausted: bool,
}

fn x_of(seq: &[i32]) -> Option<i64> {
    (seq.len() % 5 == 0).then(|| {
        let c = compress_entries(seq, seq.len() / 5).expect("5 divides the length");
        paf_unchecked(&c, 1) - paf_unchecked(&c, 2)
    })
}

fn paf_key(seq: &[i32]) -> Vec<i32> {
    (1..=seq.len() / 2).map(|s| paf_unchecked(seq, s) as i32).collect()
}

fn complement_key(key: &[i32]) -> Vec<i32> {
    key.iter().map(|v| -2 - v).collect()
}

fn passes_psd(seq: &[i32]) -> bool {
    let bound = (2 * seq.len() + 2) as f64 + PSD_TOLERANCE;
    (1..=seq.len() / 2).all(|k| psd(seq, k) <= bound)
}

/// Depth-first decompression of one side, residue class by residue class.
struct SideSearch {
    ell: usize,
    d: usize,
    /// Classes in visiting order with their shuffled choices (sets of
    /// within-class offsets that carry −1).
    classes: Vec<(usize, Vec<Vec<usize>>)>,
    freqs: Vec<usize>,
    /// twiddle[p][f] for position p and frequency index f
    twiddle: Vec<Vec<(f64, f64)>>,
    prune: bool,
    radius: f64,
    budget: u64,
    nodes: u64,
    aborted: bool,
    seq: Vec<i32>,
    leaves: Vec<Vec<i32>>,
}

impl SideSearch {
    fn new(ell: usize, m: usize, comp: &[i32], budget: u64, seed: u64, salt: u64, prune: bool) -> Self {
        let d = comp.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(salt);
        let mut classes: Vec<(usize, Vec<Vec<usize>>)> = comp
            .iter()
            .enumerate()
            .map(|(j, &row)| {
                let negs = ((m as i32 - row) / 2) as usize;
                (j, subsets(m, negs))
            })
            .collect();
        // fewest choices first
        classes.sort_by_key(|(j, c)| (c.len(), *j));
        for (_, choices) in classes.iter_mut() {
            choices.shuffle(&mut rng);
        }
        let freqs: Vec<usize> = (1..=ell / 2).filter(|k| k % m != 0).collect();
        let twiddle = if prune {
            (0..ell)
                .map(|p| {
                    freqs
                        .iter()
                        .map(|&k| {
                            let t = 2.0 * PI * ((p * k) % ell) as f64 / ell as f64;
                            (t.cos(), t.sin())
                        })
                        .collect()
                })
                .collect()
        } else {
            Vec::new()
        };
        Self {
            ell,
            d,
            classes,
            radius: ((2 * ell + 2) as f64 + PSD_TOLERANCE).sqrt(),
            freqs,
            twiddle,
            prune,
            budget,
            nodes: 0,
            aborted: false,
            seq: vec![1; ell],
            leaves: Vec::new(),
        }
    }

    fn run(mut self) -> (Vec<Vec<i32>>, u64, bool) {
        let partial = vec![(0.0, 0.0); self.freqs.len()];
        self.descend(0, &partial);
        (self.leaves, self.nodes, !self.aborted)
    }

    fn descend(&mut self, depth: usize, partial: &[(f64, f64)]) {
        if depth == self.classes.len() {
            if !self.prune || partial.iter().all(|&(re, im)| (re * re + im * im).sqrt() <= self.radius) {
                self.leaves.push(self.seq.clone());
            }
            return;
        }
        let m = self.ell / self.d;
        let remaining = (m * (self.classes.len() - depth - 1)) as f64;
        let (class, n_choices) = (self.classes[depth].0, self.classes[depth].1.len());
        let mut next = partial.to_vec();
        for c in 0..n_choices {
            if self.nodes >= self.budget {
                self.aborted = true;
                return;
            }
            self.nodes += 1;
            let choice = std::mem::take(&mut self.classes[depth].1[c]);
            for i in 0..m {
                self.seq[class + i * self.d] = 1;
            }
            for &i in &choice {
                self.seq[class + i * self.d] = -1;
            }
            let mut feasible = true;
            if self.prune {
                next.copy_from_slice(partial);
                for i in 0..m {
                    let p = class + i * self.d;
                    let v = self.seq[p] as f64;
                    for (acc, tw) in next.iter_mut().zip(&self.twiddle[p]) {
                        acc.0 += v * tw.0;
                        acc.1 += v * tw.1;
                    }
                }
                // each unassigned entry moves the DFT value by at most 1
                feasible = next
                    .iter()
                    .all(|&(re, im)| (re * re + im * im).sqrt() - remaining <= self.radius);
            }
            self.classes[depth].1[c] = choice;
            if feasible {
                self.descend(depth + 1, &next);
                if self.aborted {
                    return;
                }
            }
        }
    }
}

/// All `k`-subsets of `0..n`, lexicographic.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn validate_candidate(ell: usize, cand: &CandidatePair) -> Result<()> {
    let d = cand.d();
    if cand.b.len() != d || d * cand.m != ell || cand.ell != ell {
        return Err(Error::Validation(format!(
            "candidate of length {d} with factor {} does not fit ℓ = {ell}",
            cand.m
        )));
    }
    let m = cand.m as i32;
    for (side, c) in [("𝒜", &cand.a), ("ℬ", &cand.b)] {
        if let Some((j, &v)) = c.entries.iter().enumerate().find(|(_, &v)| v.abs() > m || (m - v) % 2 != 0) {
            return Err(Error::Validation(format!(
                "{side}[{j}] = {v}: (m − entry)/2 is not a count in 0..={m}"
            )));
        }
    }
    Ok(())
}

/// All `±1` pairs compressing to `cand`, within `cfg.budget_nodes` search
/// nodes (half per side). With the same seed a larger budget explores a
/// superset of the tree, so found pairs are never lost.
pub fn uncompress_search(ell: usize, cand: &CandidatePair, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    if cfg.strategy != Strategy::Backtrack {
        return Err(Error::Validation("uncompress_search needs the backtrack strategy".into()));
    }
    validate_candidate(ell, cand)?;
    let m = cand.m;
    let budget_a = cfg.budget_nodes.div_ceil(2);
    let budget_b = cfg.budget_nodes / 2;
    let side_a = SideSearch::new(ell, m, cand.a.as_slice(), budget_a, cfg.seed, 0, cfg.psd_prune);
    let side_b = SideSearch::new(ell, m, cand.b.as_slice(), budget_b, cfg.seed, 1, cfg.psd_prune);
    let ((leaves_a, nodes_a, done_a), (leaves_b, nodes_b, done_b)) =
        rayon::join(|| side_a.run(), || side_b.run());

    let keys_a: Vec<Vec<i32>> = leaves_a.par_iter().map(|s| paf_key(s)).collect();
    let mut index: HashMap<&[i32], Vec<usize>> = HashMap::new();
    for (i, k) in keys_a.iter().enumerate() {
        index.entry(k.as_slice()).or_default().push(i);
    }
    let mut pairs: Vec<(Vec<i32>, Vec<i32>)> = leaves_b
        .par_iter()
        .flat_map_iter(|b| {
            let want = complement_key(&paf_key(b));
            index
                .get(want.as_slice())
                .into_iter()
                .flatten()
                .map(|&i| (leaves_a[i].clone(), b.clone()))
                .collect::<Vec<_>>()
        })
        .collect();
    pairs.sort();
    pairs.truncate(cfg.max_solutions);

    let pairs = pairs
        .into_iter()
        .map(|(a, b)| {
            let x = x_of(&a);
            Ok(FoundPair { a: PmOneSequence::new(a)?, b: PmOneSequence::new(b)?, x, codes: None })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SearchResult { pairs, nodes_visited: nodes_a + nodes_b, exhausted: done_a && done_b })
}

/// One orbit selection: for each size class, ascending 1-based orbit indices.
type Selection = Vec<(usize, Vec<u64>)>;

fn selection_codes(table: &OrbitTable, sel: &Selection) -> Result<OrbitCodes> {
    sel.iter()
        .map(|(size, idx)| Ok((*size, LexRankCode::encode(table.class(*size).len() as u64, idx)?)))
        .collect()
}

fn codes_selection(codes: &OrbitCodes) -> Result<Selection> {
    codes.iter().map(|(&size, code)| Ok((size, code.decode()?))).collect()
}

/// Searches pairs whose `−1` positions are unions of orbits of the
/// multiplier subgroup, selecting `orbit_counts[size]` orbits per size class.
/// Scans every selection when the space fits in the budget; otherwise
/// samples `budget_nodes` selections (after `include_codes`).
pub fn orbit_search(ell: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    if cfg.strategy != Strategy::OrbitRestricted {
        return Err(Error::Validation("orbit_search needs the orbit_restricted strategy".into()));
    }
    let gens = cfg.subgroup_generators.as_ref().expect("validated");
    let table = orbits(ell as u64, gens)?;
    let counts = cfg.orbit_counts.as_ref().expect("validated");
    for size in counts.keys() {
        if !table.orbits_by_size.contains_key(size) && counts[size] > 0 {
            return Err(Error::Validation(format!("there are no orbits of size {size}")));
        }
    }
    let plan: Vec<(usize, u64, u64)> = table
        .orbits_by_size
        .iter()
        .map(|(&size, class)| (size, class.len() as u64, counts.get(&size).copied().unwrap_or(0) as u64))
        .collect();
    let weight: u64 = plan.iter().map(|&(size, _, k)| size as u64 * k).sum();
    if weight != (ell as u64 - 1) / 2 {
        return Err(Error::Validation(format!(
            "selected orbits cover {weight} positions, a block needs (ℓ−1)/2 = {}",
            (ell - 1) / 2
        )));
    }
    if let Some(&(size, n, k)) = plan.iter().find(|&&(_, n, k)| k > n) {
        return Err(Error::Validation(format!("cannot choose {k} of {n} orbits of size {size}")));
    }

    let space: BigUint = plan.iter().map(|&(_, n, k)| binomial(n, k)).product();
    let mut selections: Vec<Selection> = Vec::new();
    let mut seen: HashSet<Selection> = HashSet::new();
    for codes in &cfg.include_codes {
        let sel = codes_selection(codes)?;
        if seen.insert(sel.clone()) {
            selections.push(sel);
        }
    }
    let exhaustive = space <= BigUint::from(cfg.budget_nodes);
    if exhaustive {
        let mut cur: Selection = plan.iter().map(|&(size, _, k)| (size, (1..=k).collect())).collect();
        loop {
            if seen.insert(cur.clone()) {
                selections.push(cur.clone());
            }
            if !advance_selection(&plan, &mut cur) {
                break;
            }
        }
    } else {
        let shards = cfg.jobs.max(1) as u64;
        let per_shard = cfg.budget_nodes / shards;
        let sampled: Vec<Vec<Selection>> = (0..shards)
            .into_par_iter()
            .map(|shard| {
                let quota = per_shard + u64::from(shard < cfg.budget_nodes % shards);
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(shard);
                (0..quota).map(|_| random_selection(&plan, &mut rng)).collect()
            })
            .collect();
        for sel in sampled.into_iter().flatten() {
            if seen.insert(sel.clone()) {
                selections.push(sel);
            }
        }
    }
    let nodes_visited = selections.len() as u64;

    let m5 = (ell % 5 == 0).then_some(ell / 5);
    let survivors: Vec<(Selection, Vec<i32>, Vec<i32>)> = selections
        .into_par_iter()
        .filter_map(|sel| {
            let codes = selection_codes(&table, &sel).ok()?;
            let block = block_from_codes(&table, &codes).ok()?;
            let seq = sequence_from_block(&block).into_inner();
            if cfg.conjecture_prefilter {
                if let Some(m) = m5 {
                    let c = compress_entries(&seq, m).ok()?;
                    if p2(&c) != 4 * m as i64 + 1 {
                        return None;
                    }
                }
            }
            if cfg.psd_prune && !passes_psd(&seq) {
                return None;
            }
            let key = paf_key(&seq);
            Some((sel, seq, key))
        })
        .collect();

    let mut index: HashMap<&[i32], Vec<usize>> = HashMap::new();
    let mut found = Vec::new();
    for (i, (_, _, key)) in survivors.iter().enumerate() {
        index.entry(key.as_slice()).or_default().push(i);
        let want = complement_key(key);
        for &j in index.get(want.as_slice()).into_iter().flatten() {
            found.push((j, i));
        }
        if found.len() >= cfg.max_solutions {
            found.truncate(cfg.max_solutions);
            break;
        }
    }

    let pairs = found
        .into_iter()
        .map(|(j, i)| {
            let (sel_a, a, _) = &survivors[j];
            let (sel_b, b, _) = &survivors[i];
            Ok(FoundPair {
                a: PmOneSequence::new(a.clone())?,
                b: PmOneSequence::new(b.clone())?,
                x: x_of(a),
                codes: Some((selection_codes(&table, sel_a)?, selection_codes(&table, sel_b)?)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let exhausted = exhaustive && cfg.max_solutions > pairs.len();
    Ok(SearchResult { pairs, nodes_visited, exhausted })
}

/// Size of the orbit search space, `Π C(N_size, k_size)`.
pub fn orbit_space_size(table: &OrbitTable, counts: &BTreeMap<usize, usize>) -> BigUint {
    table
        .orbits_by_size
        .iter()
        .map(|(size, class)| binomial(class.len() as u64, counts.get(size).copied().unwrap_or(0) as u64))
        .product()
}

/// Lexicographic successor over the concatenated per-class subsets.
fn advance_selection(plan: &[(usize, u64, u64)], sel: &mut Selection) -> bool {
    for c in (0..plan.len()).rev() {
        let (_, n, k) = plan[c];
        if next_subset(n, k, &mut sel[c].1) {
            return true;
        }
        sel[c].1 = (1..=k).collect();
    }
    false
}

fn next_subset(n: u64, k: u64, cur: &mut [u64]) -> bool {
    let k = k as usize;
    let mut i = k;
    while i > 0 && cur[i - 1] == n - (k - i) as u64 {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    cur[i - 1] += 1;
    for j in i..k {
        cur[j] = cur[j - 1] + 1;
    }
    true
}

fn random_selection(plan: &[(usize, u64, u64)], rng: &mut ChaCha8Rng) -> Selection {
    plan.iter()
        .map(|&(size, n, k)| {
            let mut idx: Vec<u64> = rand::seq::index::sample(rng, n as usize, k as usize)
                .into_iter()
                .map(|i| i as u64 + 1)
                .collect();
            idx.sort_unstable();
            (size, idx)
        })
        .collect()
}

/// Orbit search space for the given selection sizes, as `u128` when it fits.
pub fn space_size_u128(table: &OrbitTable, counts: &BTreeMap<usize, usize>) -> Option<u128> {
    orbit_space_size(table, counts).to_u128()
}
