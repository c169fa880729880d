//! Multiplier orbits on `Z_ℓ \ {0}`, the lexicographic subset codec used to
//! name orbit selections, and the conversion from selected orbits to `±1`
//! sequences.
//!
//! Sequence positions are 1-based in the usual presentation of these
//! constructions: residue `p ∈ {1, …, ℓ−1}` lives at array index `p − 1` and
//! residue `0` (position `ℓ`) at index `ℓ − 1`. With that layout the
//! stride-`d` compression of [`crate::seqcore::compress`] reproduces the
//! published compressions of orbit-built pairs.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::seqcore::PmOneSequence;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitTable {
    pub ell: u64,
    pub generators: Vec<u64>,
    /// Orbit size → orbits of that size, each ascending, ordered by first element.
    pub orbits_by_size: BTreeMap<usize, Vec<Vec<u64>>>,
}

impl OrbitTable {
    pub fn class(&self, size: usize) -> &[Vec<u64>] {
        self.orbits_by_size.get(&size).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn orbit_count(&self) -> usize {
        self.orbits_by_size.values().map(Vec::len).sum()
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Orbits of the subgroup of `Z_ℓ^*` generated by `generators`.
pub fn orbits(ell: u64, generators: &[u64]) -> Result<OrbitTable> {
    if ell < 2 {
        return Err(Error::Domain(format!("ℓ = {ell} is too small")));
    }
    let gens: Vec<u64> = generators.iter().map(|g| g % ell).collect();
    if let Some(&g) = gens.iter().find(|&&g| gcd(g, ell) != 1) {
        return Err(Error::Domain(format!("{g} is not a unit modulo {ell}")));
    }
    let mut seen = vec![false; ell as usize];
    let mut orbits_by_size: BTreeMap<usize, Vec<Vec<u64>>> = BTreeMap::new();
    for r in 1..ell {
        if seen[r as usize] {
            continue;
        }
        let mut orbit = vec![r];
        seen[r as usize] = true;
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            for &g in &gens {
                let y = x * g % ell;
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    orbit.push(y);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        orbits_by_size.entry(orbit.len()).or_default().push(orbit);
    }
    // r ascends, so each class is already ordered by first element
    Ok(OrbitTable { ell, generators: generators.to_vec(), orbits_by_size })
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// The `rank`-th (0-based) ascending `k`-subset of `{1, …, n}` in
/// lexicographic order.
pub fn lex_unrank(n: u64, k: u64, rank: &BigUint) -> Result<Vec<u64>> {
    let total = binomial(n, k);
    if k > n || rank >= &total {
        return Err(Error::Range(format!(
            "rank {rank} out of range for C({n}, {k}) = {total}"
        )));
    }
    let mut rank = rank.clone();
    let mut out = Vec::with_capacity(k as usize);
    let mut next = 1u64;
    for slot in 0..k {
        loop {
            // subsets whose element at this slot is `next`
            let block = binomial(n - next, k - slot - 1);
            if rank < block {
                out.push(next);
                next += 1;
                break;
            }
            rank -= block;
            next += 1;
        }
    }
    Ok(out)
}

/// Inverse of [`lex_unrank`].
pub fn lex_rank(n: u64, subset: &[u64]) -> Result<BigUint> {
    if let Some(&bad) = subset.iter().find(|&&v| v < 1 || v > n) {
        return Err(Error::Domain(format!("{bad} is outside {{1..{n}}}")));
    }
    if subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("subset must be strictly ascending".into()));
    }
    let k = subset.len() as u64;
    let mut rank = BigUint::zero();
    let mut prev = 0u64;
    for (slot, &v) in subset.iter().enumerate() {
        for skipped in prev + 1..v {
            rank += binomial(n - skipped, k - slot as u64 - 1);
        }
        prev = v;
    }
    Ok(rank)
}

/// A LexRank code: the `rank`-th `k`-subset of `{1, …, N}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LexRankCode {
    pub universe: u64,
    pub size: u64,
    #[serde(serialize_with = "ser_big", deserialize_with = "de_big")]
    pub rank: BigUint,
}

impl LexRankCode {
    pub fn new(universe: u64, size: u64, rank: impl Into<BigUint>) -> Self {
        Self { universe, size, rank: rank.into() }
    }

    pub fn decode(&self) -> Result<Vec<u64>> {
        lex_unrank(self.universe, self.size, &self.rank)
    }

    pub fn encode(universe: u64, subset: &[u64]) -> Result<Self> {
        Ok(Self {
            universe,
            size: subset.len() as u64,
            rank: lex_rank(universe, subset)?,
        })
    }

    pub fn rank_u64(&self) -> Option<u64> {
        self.rank.to_u64()
    }
}

fn ser_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_u64() {
        Some(x) => s.serialize_u64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

fn de_big<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(u64),
        Str(String),
    }
    match Repr::deserialize(d)? {
        Repr::Num(n) => Ok(BigUint::from(n)),
        Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
    }
}

/// Codes naming one orbit selection: orbit size → subset code of that class.
pub type OrbitCodes = BTreeMap<usize, LexRankCode>;

/// Positions of the `-1` entries of a sequence, as residues mod ℓ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub ell: u64,
    pub positions: BTreeSet<u64>,
}

/// Selected orbits listed in selection order: size classes ascending, orbits
/// in class order, elements ascending within an orbit.
pub fn block_listing(table: &OrbitTable, codes: &OrbitCodes) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for (&size, code) in codes {
        let class = table.class(size);
        if code.universe != class.len() as u64 {
            return Err(Error::Validation(format!(
                "size-{size} code has universe {} but there are {} orbits of that size",
                code.universe,
                class.len()
            )));
        }
        for idx in code.decode()? {
            out.extend_from_slice(&class[idx as usize - 1]);
        }
    }
    Ok(out)
}

/// Union of the orbits selected by `codes`.
pub fn block_from_codes(table: &OrbitTable, codes: &OrbitCodes) -> Result<Block> {
    let positions = block_listing(table, codes)?.into_iter().collect();
    Ok(Block { ell: table.ell, positions })
}

/// Codes of a block that is a union of whole orbits; `None` when it is not.
pub fn codes_from_block(table: &OrbitTable, block: &Block) -> Result<Option<OrbitCodes>> {
    let mut codes = OrbitCodes::new();
    let mut covered = 0usize;
    for (&size, class) in &table.orbits_by_size {
        let mut chosen = Vec::new();
        for (i, orbit) in class.iter().enumerate() {
            let inside = orbit.iter().filter(|p| block.positions.contains(p)).count();
            if inside == orbit.len() {
                chosen.push(i as u64 + 1);
                covered += inside;
            } else if inside != 0 {
                return Ok(None);
            }
        }
        codes.insert(size, LexRankCode::encode(class.len() as u64, &chosen)?);
    }
    Ok((covered == block.positions.len()).then_some(codes))
}

/// The `±1` sequence with `-1` exactly at the block's residues.
pub fn sequence_from_block(block: &Block) -> PmOneSequence {
    let n = block.ell as usize;
    let mut v = vec![1i32; n];
    for &p in &block.positions {
        v[residue_index(n, p)] = -1;
    }
    PmOneSequence::new(v).expect("entries are ±1")
}

pub fn block_from_sequence(seq: &PmOneSequence) -> Block {
    let n = seq.len();
    let positions = (0..n as u64)
        .filter(|&r| seq.as_slice()[residue_index(n, r)] == -1)
        .collect();
    Block { ell: n as u64, positions }
}

/// Array index holding residue `r`.
pub fn residue_index(ell: usize, r: u64) -> usize {
    ((r as usize % ell) + ell - 1) % ell
}
