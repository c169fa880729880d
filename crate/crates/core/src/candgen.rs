//! Candidate compressed pairs `(𝒜, ℬ)`.
//!
//! Two generators:
//!
//! * [`candidates_d5`] for `ℓ = 5m`, driven by the five-square prefilter: both
//!   sides have `PAF(0) = 4m + 1`, entry sum 1, and the pair satisfies the
//!   compressed PAF condition `PAF_𝒜(s) + PAF_ℬ(s) = −2m`.
//! * [`candidates_general`] for any `ℓ = d·m`, driven by a
//!   [`GenerationProfile`] that fixes how many entries of each magnitude the
//!   pair holds. Single sequences are enumerated (or sampled when the space is
//!   larger than the budget), filtered by `PSD ≤ 2ℓ + 2`, and matched through
//!   a hash of their PAF vectors.
//!
//! Pairs are deduplicated up to independent cyclic shifts and reversals of
//! each side, and swapping the sides.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diophantine::{admits_unit_sum, odd_five_squares, signed_orderings};
use crate::error::{Error, Result};
use crate::seqcore::{p2, paf_unchecked, psd, CompressedSequence};

/// Slack added to `2ℓ + 2` in floating-point PSD tests.
pub const PSD_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidatePair {
    pub a: CompressedSequence,
    pub b: CompressedSequence,
    pub ell: usize,
    pub m: usize,
    /// `PAF_𝒜(1) − PAF_𝒜(2)`; recorded for length-5 compressions.
    pub x: Option<i64>,
}

impl CandidatePair {
    pub fn new(a: Vec<i32>, b: Vec<i32>, ell: usize, m: usize) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch(a.len(), b.len()));
        }
        if a.len() * m != ell {
            return Err(Error::Validation(format!(
                "{} entries of an {m}-compression cannot come from length {ell}",
                a.len()
            )));
        }
        let x = (a.len() == 5).then(|| paf_unchecked(&a, 1) - paf_unchecked(&a, 2));
        Ok(Self {
            a: CompressedSequence::new(a, m)?,
            b: CompressedSequence::new(b, m)?,
            ell,
            m,
            x,
        })
    }

    pub fn d(&self) -> usize {
        self.a.len()
    }

    /// Checks the invariants every candidate must satisfy: unit sums and
    /// `PAF_𝒜(s) + PAF_ℬ(s) = −2m` for `1 ≤ s < d`, plus the recorded `x`.
    pub fn check(&self) -> Result<()> {
        let (a, b) = (self.a.as_slice(), self.b.as_slice());
        if self.a.sum() != 1 || self.b.sum() != 1 {
            return Err(Error::Validation(format!(
                "entry sums are {} and {}, expected 1",
                self.a.sum(),
                self.b.sum()
            )));
        }
        let target = -2 * self.m as i64;
        for s in 1..a.len() {
            let total = paf_unchecked(a, s) + paf_unchecked(b, s);
            if total != target {
                return Err(Error::Validation(format!(
                    "PAF sum at shift {s} is {total}, expected {target}"
                )));
            }
        }
        if let Some(x) = self.x {
            let xa = paf_unchecked(a, 1) - paf_unchecked(a, 2);
            let xb = paf_unchecked(b, 1) - paf_unchecked(b, 2);
            if x != xa || xb != -xa {
                return Err(Error::Validation(format!(
                    "x = {x} inconsistent with PAF differences {xa} and {xb}"
                )));
            }
        }
        Ok(())
    }

    /// Conjecture-form check for length-5 compressions: `PAF(0) = 4m + 1` on both sides.
    pub fn check_conjecture_form(&self) -> Result<()> {
        let want = 4 * self.m as i64 + 1;
        for (side, c) in [("𝒜", &self.a), ("ℬ", &self.b)] {
            let got = p2(c.as_slice());
            if c.len() != 5 || got != want {
                return Err(Error::Validation(format!(
                    "{side} has PAF(0) = {got} over {} entries, expected {want} over 5",
                    c.len()
                )));
            }
        }
        Ok(())
    }
}

/// Smallest rotation or reflected rotation of a sequence.
fn min_dihedral(v: &[i32]) -> Vec<i32> {
    let n = v.len();
    let mut best = v.to_vec();
    let mut buf = vec![0; n];
    for rev in [false, true] {
        for shift in 0..n {
            for (i, slot) in buf.iter_mut().enumerate() {
                let j = (i + shift) % n;
                *slot = if rev { v[(n - j) % n] } else { v[j] };
            }
            if buf < best {
                best.copy_from_slice(&buf);
            }
        }
    }
    best
}

/// Representative of the pair's class under shifts and reversals of each
/// side and swapping the sides. When `x` is recorded the orientation with
/// `x ≥ 0` wins; ties are broken lexicographically on `(𝒜, ℬ)`.
pub fn canonicalize(pair: &CandidatePair) -> CandidatePair {
    let a = min_dihedral(pair.a.as_slice());
    let b = min_dihedral(pair.b.as_slice());
    let x_of = |v: &[i32]| (v.len() == 5).then(|| paf_unchecked(v, 1) - paf_unchecked(v, 2));
    let key = |first: &Vec<i32>, second: &Vec<i32>| {
        let negative = x_of(first).is_some_and(|x| x < 0);
        (negative, first.clone(), second.clone())
    };
    let (first, second) = if key(&a, &b) <= key(&b, &a) { (a, b) } else { (b, a) };
    let x = x_of(&first);
    CandidatePair {
        a: CompressedSequence { entries: first, factor: pair.m },
        b: CompressedSequence { entries: second, factor: pair.m },
        ell: pair.ell,
        m: pair.m,
        x,
    }
}

/// Conjecture-driven candidates for `ℓ = 5m`, one per equivalence class,
/// sorted. `x_filter` keeps only classes whose canonical `x` (≥ 0) is listed.
pub fn candidates_d5(m: usize, x_filter: Option<&BTreeSet<i64>>) -> Result<Vec<CandidatePair>> {
    let tuples: Vec<[i32; 5]> = odd_five_squares(m as i64)?
        .iter()
        .filter(|s| admits_unit_sum(s))
        .flat_map(signed_orderings)
        .map(|t| t.values)
        .collect();

    let mut by_paf: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, t) in tuples.iter().enumerate() {
        by_paf.entry((paf_unchecked(t, 1), paf_unchecked(t, 2))).or_default().push(i);
    }

    let target = -2 * m as i64;
    let mut found = BTreeSet::new();
    for a in &tuples {
        let want = (target - paf_unchecked(a, 1), target - paf_unchecked(a, 2));
        for &j in by_paf.get(&want).into_iter().flatten() {
            let pair = CandidatePair::new(a.to_vec(), tuples[j].to_vec(), 5 * m, m)?;
            let canon = canonicalize(&pair);
            if x_filter.is_none_or(|f| canon.x.is_some_and(|x| f.contains(&x))) {
                found.insert(canon);
            }
        }
    }
    Ok(found.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationProfile {
    pub ell: usize,
    pub m: usize,
    pub d: usize,
    /// Magnitude → number of entries of that magnitude across both sequences.
    pub abs_value_counts: BTreeMap<u32, usize>,
    /// Require each sequence to hold exactly half of every count.
    pub balanced: bool,
    #[serde(default)]
    pub x_filter: Option<BTreeSet<i64>>,
    /// Maximum number of single sequences generated (accepted or not).
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub seed: u64,
}

impl GenerationProfile {
    pub fn new(ell: usize, m: usize, counts: &[(u32, usize)], balanced: bool) -> Self {
        Self {
            ell,
            m,
            d: if m == 0 { 0 } else { ell / m },
            abs_value_counts: counts.iter().copied().collect(),
            balanced,
            x_filter: None,
            budget: None,
            seed: 0,
        }
    }

    /// `p₂(𝒜) + p₂(ℬ)` forced by `PSD_𝒜 + PSD_ℬ = 2ℓ + 2` at every nonzero
    /// index together with unit sums (Parseval).
    pub fn required_energy(&self) -> Option<u64> {
        let num = 2 + (self.d as u64).checked_sub(1)? * (2 * self.ell as u64 + 2);
        (num % self.d as u64 == 0).then(|| num / self.d as u64)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        if self.m == 0 || self.d == 0 || self.d * self.m != self.ell {
            return fail(format!("ℓ = {} ≠ d·m = {}·{}", self.ell, self.d, self.m));
        }
        if self.ell % 2 == 0 {
            return fail(format!("ℓ = {} is even", self.ell));
        }
        for &mag in self.abs_value_counts.keys() {
            if mag as usize > self.m || (self.m - mag as usize) % 2 != 0 {
                return fail(format!("magnitude {mag} is not reachable by an {}-compression", self.m));
            }
        }
        let total: usize = self.abs_value_counts.values().sum();
        if total != 2 * self.d {
            return fail(format!("magnitude counts total {total}, expected 2d = {}", 2 * self.d));
        }
        let energy: u64 = self
            .abs_value_counts
            .iter()
            .map(|(&mag, &c)| (mag as u64).pow(2) * c as u64)
            .sum();
        match self.required_energy() {
            Some(e) if e == energy => {}
            Some(e) => {
                return fail(format!(
                    "Σ count·magnitude² = {energy}, but p₂(𝒜) + p₂(ℬ) must equal {e}"
                ))
            }
            None => return fail("no integer energy satisfies the PSD identity".into()),
        }
        if self.balanced {
            if let Some((mag, c)) = self.abs_value_counts.iter().find(|(_, &c)| c % 2 != 0) {
                return fail(format!("balanced split needs an even count of magnitude {mag}, got {c}"));
            }
        }
        if self.x_filter.is_some() && self.d != 5 {
            return fail("an x filter only applies to length-5 compressions".into());
        }
        Ok(())
    }

    /// Per-sequence magnitude counts a sequence of the pair may take.
    fn splits(&self) -> Vec<Vec<(u32, usize)>> {
        let mags: Vec<(u32, usize)> = self.abs_value_counts.iter().map(|(&k, &v)| (k, v)).collect();
        if self.balanced {
            return vec![mags.iter().map(|&(k, c)| (k, c / 2)).collect()];
        }
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(
            mags: &[(u32, usize)],
            left: usize,
            cur: &mut Vec<(u32, usize)>,
            out: &mut Vec<Vec<(u32, usize)>>,
        ) {
            match mags.split_first() {
                None => {
                    if left == 0 {
                        out.push(cur.clone());
                    }
                }
                Some((&(mag, count), rest)) => {
                    for k in 0..=count.min(left) {
                        cur.push((mag, k));
                        rec(rest, left - k, cur, out);
                        cur.pop();
                    }
                }
            }
        }
        rec(&mags, self.d, &mut cur, &mut out);
        out
    }

    fn complement(&self, split: &[(u32, usize)]) -> Vec<(u32, usize)> {
        split
            .iter()
            .map(|&(mag, k)| (mag, self.abs_value_counts[&mag] - k))
            .collect()
    }

    /// Whether `pair` satisfies this profile and the candidate invariants.
    pub fn check_pair(&self, pair: &CandidatePair) -> Result<()> {
        self.validate()?;
        if pair.ell != self.ell || pair.m != self.m || pair.d() != self.d {
            return Err(Error::Validation("pair shape differs from profile".into()));
        }
        pair.check()?;
        let count = |v: &[i32]| {
            let mut c: BTreeMap<u32, usize> = BTreeMap::new();
            for &e in v {
                *c.entry(e.unsigned_abs()).or_default() += 1;
            }
            c
        };
        let ca = count(pair.a.as_slice());
        let cb = count(pair.b.as_slice());
        let mut joint = ca.clone();
        for (&k, &v) in &cb {
            *joint.entry(k).or_default() += v;
        }
        if joint != self.abs_value_counts {
            return Err(Error::Validation(format!(
                "magnitude counts {joint:?} differ from profile {:?}",
                self.abs_value_counts
            )));
        }
        if self.balanced && ca != cb {
            return Err(Error::Validation(format!("unbalanced split {ca:?} / {cb:?}")));
        }
        if let (Some(filter), Some(x)) = (&self.x_filter, pair.x) {
            if !filter.contains(&x) && !filter.contains(&-x) {
                return Err(Error::Validation(format!("x = {x} not in filter")));
            }
        }
        for k in 1..self.d {
            let s = psd(pair.a.as_slice(), k) + psd(pair.b.as_slice(), k);
            if (s - (2 * self.ell + 2) as f64).abs() > PSD_TOLERANCE {
                return Err(Error::Validation(format!("PSD sum {s} at index {k}")));
            }
        }
        Ok(())
    }

    pub fn admits(&self, pair: &CandidatePair) -> bool {
        self.check_pair(pair).is_ok()
    }

    /// Upper bound on the number of single sequences over all splits.
    fn space_size(&self, splits: &[Vec<(u32, usize)>]) -> f64 {
        let lg = |n: usize| (1..=n).map(|i| (i as f64).ln()).sum::<f64>();
        splits
            .iter()
            .map(|s| {
                let ln = lg(self.d) - s.iter().map(|&(_, k)| lg(k)).sum::<f64>()
                    + self.d as f64 * 2f64.ln();
                ln.exp()
            })
            .sum()
    }
}

/// Lazily generated candidates for a profile.
pub struct CandidateStream {
    profile: GenerationProfile,
    splits: Vec<Vec<(u32, usize)>>,
    split_weights: Vec<f64>,
    source: Source,
    pool: HashMap<(usize, Vec<i64>), Vec<Vec<i32>>>,
    emitted: HashSet<CandidatePair>,
    queue: VecDeque<CandidatePair>,
    nodes: u64,
    done: bool,
}

enum Source {
    Exhaustive { items: Vec<(usize, Vec<i32>)>, next: usize },
    Sampled { rng: ChaCha8Rng, seen: HashSet<Vec<i32>> },
}

/// Candidates satisfying the profile, deduplicated up to the pair
/// equivalence. Exhaustive (and seed-independent) when the single-sequence
/// space fits in the budget, seeded sampling otherwise.
pub fn candidates_general(profile: &GenerationProfile) -> Result<CandidateStream> {
    profile.validate()?;
    let splits = profile.splits();
    let size = profile.space_size(&splits);
    let exhaustive = match profile.budget {
        Some(b) => size <= b as f64,
        None => size <= 5e6,
    };
    let source = if exhaustive {
        let mut items = Vec::new();
        for (i, split) in splits.iter().enumerate() {
            for seq in enumerate_sequences(profile.d, split) {
                items.push((i, seq));
            }
        }
        Source::Exhaustive { items, next: 0 }
    } else {
        Source::Sampled { rng: ChaCha8Rng::seed_from_u64(profile.seed), seen: HashSet::new() }
    };
    let split_weights = splits
        .iter()
        .map(|s| profile.space_size(std::slice::from_ref(s)))
        .collect();
    Ok(CandidateStream {
        profile: profile.clone(),
        splits,
        split_weights,
        source,
        pool: HashMap::new(),
        emitted: HashSet::new(),
        queue: VecDeque::new(),
        nodes: 0,
        done: false,
    })
}

impl CandidateStream {
    pub fn nodes_visited(&self) -> u64 {
        self.nodes
    }

    /// True once the single-sequence space has been fully enumerated.
    pub fn exhausted(&self) -> bool {
        matches!(&self.source, Source::Exhaustive { items, next } if *next >= items.len())
    }

    fn next_sequence(&mut self) -> Option<(usize, Vec<i32>)> {
        if self.profile.budget.is_some_and(|b| self.nodes >= b) {
            return None;
        }
        match &mut self.source {
            Source::Exhaustive { items, next } => {
                let item = items.get(*next)?.clone();
                *next += 1;
                self.nodes += 1;
                Some(item)
            }
            Source::Sampled { rng, seen } => loop {
                if self.profile.budget.is_some_and(|b| self.nodes >= b) {
                    return None;
                }
                self.nodes += 1;
                let total: f64 = self.split_weights.iter().sum();
                let mut pick = rng.gen::<f64>() * total;
                let mut which = self.splits.len() - 1;
                for (i, w) in self.split_weights.iter().enumerate() {
                    if pick < *w {
                        which = i;
                        break;
                    }
                    pick -= w;
                }
                let mut v: Vec<i32> = self.splits[which]
                    .iter()
                    .flat_map(|&(mag, k)| std::iter::repeat_n(mag as i32, k))
                    .collect();
                v.shuffle(rng);
                for e in v.iter_mut() {
                    if rng.gen::<bool>() {
                        *e = -*e;
                    }
                }
                if v.iter().sum::<i32>() != 1 || !seen.insert(v.clone()) {
                    continue;
                }
                return Some((which, v));
            },
        }
    }

    fn absorb(&mut self, split_idx: usize, seq: Vec<i32>) {
        let p = &self.profile;
        let bound = (2 * p.ell + 2) as f64 + PSD_TOLERANCE;
        if (1..=p.d / 2).any(|k| psd(&seq, k) > bound) {
            return;
        }
        let target = -2 * p.m as i64;
        let key: Vec<i64> = (1..=p.d / 2).map(|s| paf_unchecked(&seq, s)).collect();
        let want: Vec<i64> = key.iter().map(|v| target - v).collect();
        let comp_split = p.complement(&self.splits[split_idx]);
        let comp_idx = self.splits.iter().position(|s| *s == comp_split);
        let entry = self.pool.entry((split_idx, key)).or_default();
        entry.push(seq.clone());
        let Some(comp_idx) = comp_idx else { return };
        let partners = self.pool.get(&(comp_idx, want)).cloned().unwrap_or_default();
        for other in partners {
            let Ok(pair) = CandidatePair::new(other, seq.clone(), p.ell, p.m) else { continue };
            let canon = canonicalize(&pair);
            if let (Some(filter), Some(x)) = (&p.x_filter, canon.x) {
                if !filter.contains(&x) {
                    continue;
                }
            }
            if self.emitted.insert(canon.clone()) {
                self.queue.push_back(canon);
            }
        }
    }
}

impl Iterator for CandidateStream {
    type Item = CandidatePair;

    fn next(&mut self) -> Option<CandidatePair> {
        loop {
            if let Some(c) = self.queue.pop_front() {
                return Some(c);
            }
            if self.done {
                return None;
            }
            match self.next_sequence() {
                Some((i, seq)) => self.absorb(i, seq),
                None => self.done = true,
            }
        }
    }
}

/// Every sequence of length `d` with the given magnitude counts and entry sum 1,
/// in lexicographic order.
fn enumerate_sequences(d: usize, split: &[(u32, usize)]) -> Vec<Vec<i32>> {
    let mut values: Vec<i32> = split
        .iter()
        .flat_map(|&(mag, _)| if mag == 0 { vec![0] } else { vec![-(mag as i32), mag as i32] })
        .collect();
    values.sort_unstable();
    values.dedup();
    let mut left: BTreeMap<u32, usize> = split.iter().copied().collect();
    let mut remaining_mass: i64 = split.iter().map(|&(mag, k)| mag as i64 * k as i64).sum();
    let mut cur = Vec::with_capacity(d);
    let mut out = Vec::new();
    fn rec(
        d: usize,
        values: &[i32],
        left: &mut BTreeMap<u32, usize>,
        remaining_mass: &mut i64,
        sum: i64,
        cur: &mut Vec<i32>,
        out: &mut Vec<Vec<i32>>,
    ) {
        if cur.len() == d {
            if sum == 1 {
                out.push(cur.clone());
            }
            return;
        }
        if (1 - sum).abs() > *remaining_mass {
            return;
        }
        for &v in values {
            let mag = v.unsigned_abs();
            let slot = left.get_mut(&mag).expect("magnitude present");
            if *slot == 0 {
                continue;
            }
            *slot -= 1;
            *remaining_mass -= mag as i64;
            cur.push(v);
            rec(d, values, left, remaining_mass, sum + v as i64, cur, out);
            cur.pop();
            *remaining_mass += mag as i64;
            *left.get_mut(&mag).expect("magnitude present") += 1;
        }
    }
    rec(d, &values, &mut left, &mut remaining_mass, 0, &mut cur, &mut out);
    out
}

/// On-disk candidate list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateFile {
    pub ell: usize,
    pub m: usize,
    pub pairs: Vec<CandidateEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateEntry {
    pub a: Vec<i32>,
    pub b: Vec<i32>,
    pub x: Option<i64>,
}

impl CandidateFile {
    pub fn from_pairs(ell: usize, m: usize, pairs: &[CandidatePair]) -> Self {
        Self {
            ell,
            m,
            pairs: pairs
                .iter()
                .map(|p| CandidateEntry { a: p.a.entries.clone(), b: p.b.entries.clone(), x: p.x })
                .collect(),
        }
    }

    pub fn into_pairs(self) -> Result<Vec<CandidatePair>> {
        self.pairs
            .into_iter()
            .map(|e| {
                let pair = CandidatePair::new(e.a, e.b, self.ell, self.m)?;
                if e.x.is_some() && e.x != pair.x {
                    return Err(Error::Validation(format!(
                        "recorded x {:?} differs from computed {:?}",
                        e.x, pair.x
                    )));
                }
                Ok(pair)
            })
            .collect()
    }
}
