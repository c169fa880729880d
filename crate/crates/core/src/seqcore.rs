//! Exact sequence algebra: periodic autocorrelation (PAF), power spectral
//! density (PSD), compression, Legendre pair verification and the closed form
//! of `PSD_A(ℓ/5)` in `Q(√5)`.
//!
//! Sequences are plain `i32` slices so the same routines serve `±1`
//! sequences and their compressions. Indices run `0..ℓ`.
//!
//! Text format, shared by every tool in the crate: one sequence per line,
//! comma-separated integers, with an optional `ℓ=<n>;` header
//! (`l=<n>;` is accepted as an ASCII spelling).

use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sequence over `{-1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i32>", into = "Vec<i32>")]
pub struct PmOneSequence(Vec<i32>);

impl PmOneSequence {
    pub fn new(entries: Vec<i32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, v)| v.abs() != 1) {
            return Err(Error::BadEntry { index, value: value as i64 });
        }
        Ok(Self(entries))
    }

    /// Checks Legendre-pair shape (odd length, sum ±1) and negates the
    /// sequence if its sum is -1.
    pub fn normalized(self) -> Result<Self> {
        let len = self.len();
        if len % 2 == 0 {
            return Err(Error::EvenLength(len));
        }
        match self.sum() {
            1 => Ok(self),
            -1 => Ok(Self(self.0.into_iter().map(|v| -v).collect())),
            s => Err(Error::BadSum(s)),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().map(|&v| v as i64).sum()
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i32> {
        self.0
    }
}

impl TryFrom<Vec<i32>> for PmOneSequence {
    type Error = Error;

    fn try_from(v: Vec<i32>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PmOneSequence> for Vec<i32> {
    fn from(s: PmOneSequence) -> Self {
        s.0
    }
}

/// The `m`-compression of a sequence of length `d·m`: a length-`d` integer
/// sequence whose entry `j` sums the original entries with index `≡ j (mod d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CompressedSequence {
    pub entries: Vec<i32>,
    pub factor: usize,
}

impl CompressedSequence {
    pub fn new(entries: Vec<i32>, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::Domain("compression factor must be at least 1".into()));
        }
        let m = factor as i32;
        if let Some(&bad) = entries
            .iter()
            .find(|&&v| v.abs() > m || (v - m).rem_euclid(2) != 0)
        {
            return Err(Error::Validation(format!(
                "entry {bad} is not in the alphabet of an {factor}-compression"
            )));
        }
        Ok(Self { entries, factor })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn original_len(&self) -> usize {
        self.entries.len() * self.factor
    }

    pub fn sum(&self) -> i64 {
        self.entries.iter().map(|&v| v as i64).sum()
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.entries
    }
}

/// `values[s] = PAF(s)` for `s = 0..ℓ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PafVector(pub Vec<i64>);

impl PafVector {
    pub fn values(&self) -> &[i64] {
        &self.0
    }
}

/// Periodic autocorrelation at shift `s`.
pub fn paf(seq: &[i32], s: usize) -> Result<i64> {
    let n = seq.len();
    if s >= n {
        return Err(Error::ShiftOutOfRange { shift: s, len: n });
    }
    Ok(paf_unchecked(seq, s))
}

#[inline]
pub(crate) fn paf_unchecked(seq: &[i32], s: usize) -> i64 {
    let n = seq.len();
    (0..n)
        .map(|i| seq[i] as i64 * seq[(i + s) % n] as i64)
        .sum()
}

pub fn paf_vector(seq: &[i32]) -> PafVector {
    PafVector((0..seq.len()).map(|s| paf_unchecked(seq, s)).collect())
}

/// `|Σ_j a_j e^{2πijk/ℓ}|²`, evaluated in floating point. `k` is taken mod ℓ.
pub fn psd(seq: &[i32], k: usize) -> f64 {
    let n = seq.len();
    if n == 0 {
        return 0.0;
    }
    let (re, im) = dft_at(seq, k % n);
    re * re + im * im
}

pub(crate) fn dft_at(seq: &[i32], k: usize) -> (f64, f64) {
    let n = seq.len();
    let mut re = 0.0;
    let mut im = 0.0;
    for (j, &a) in seq.iter().enumerate() {
        // reduce the phase exactly before going to floating point
        let theta = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
        re += a as f64 * theta.cos();
        im += a as f64 * theta.sin();
    }
    (re, im)
}

/// `m`-compression of an arbitrary integer sequence.
pub fn compress_entries(seq: &[i32], m: usize) -> Result<Vec<i32>> {
    let len = seq.len();
    if m == 0 || len % m != 0 {
        return Err(Error::NotDivisible { m, len });
    }
    let d = len / m;
    Ok((0..d)
        .map(|j| (0..m).map(|i| seq[j + i * d]).sum())
        .collect())
}

pub fn compress(seq: &PmOneSequence, m: usize) -> Result<CompressedSequence> {
    let entries = compress_entries(seq.as_slice(), m)?;
    Ok(CompressedSequence { entries, factor: m })
}

/// An element `rat + coef·√5` of `Q(√5)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsdExact {
    pub rat: BigRational,
    pub coef: BigRational,
}

impl PsdExact {
    pub fn to_f64(&self) -> f64 {
        let r = self.rat.to_f64().unwrap_or(f64::NAN);
        let c = self.coef.to_f64().unwrap_or(f64::NAN);
        r + c * 5f64.sqrt()
    }

    /// The coefficient of `√5/2`, when it is an integer.
    pub fn x(&self) -> Option<i64> {
        let two_coef = &self.coef * BigRational::from_integer(BigInt::from(2));
        two_coef.is_integer().then(|| two_coef.to_integer().to_i64()).flatten()
    }

    /// The rational part, when it is an integer.
    pub fn rational_integer(&self) -> Option<i64> {
        self.rat.is_integer().then(|| self.rat.to_integer().to_i64()).flatten()
    }
}

impl fmt::Display for PsdExact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let two_coef = &self.coef * BigRational::from_integer(BigInt::from(2));
        if two_coef.is_zero() {
            write!(f, "{}", self.rat)
        } else if two_coef < BigRational::zero() {
            write!(f, "{} - (√5/2)·{}", self.rat, -two_coef)
        } else {
            write!(f, "{} + (√5/2)·{}", self.rat, two_coef)
        }
    }
}

impl Serialize for PsdExact {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            rat: String,
            coef_sqrt5: String,
            value: f64,
        }
        Repr {
            rat: self.rat.to_string(),
            coef_sqrt5: self.coef.to_string(),
            value: self.to_f64(),
        }
        .serialize(serializer)
    }
}

/// Power sum of squares.
pub fn p2(c: &[i32]) -> i64 {
    c.iter().map(|&v| (v as i64) * (v as i64)).sum()
}

/// Elementary symmetric polynomial of degree 2.
pub fn e2(c: &[i32]) -> i64 {
    let mut acc = 0i64;
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            acc += c[i] as i64 * c[j] as i64;
        }
    }
    acc
}

/// Exact `PSD` of a length-5 sequence at index 1, which equals `PSD_A(m)`
/// for the sequence `A` it was compressed from:
/// `(p₂ − e₂/2) + (√5/2)·(PAF(1) − PAF(2))`.
pub fn psd_at_m_exact(c: &[i32]) -> Result<PsdExact> {
    if c.len() != 5 {
        return Err(Error::Shape { expected: 5, actual: c.len() });
    }
    let two = BigInt::from(2);
    let rat = BigRational::new(BigInt::from(2 * p2(c) - e2(c)), two.clone());
    let coef = BigRational::new(
        BigInt::from(paf_unchecked(c, 1) - paf_unchecked(c, 2)),
        two,
    );
    Ok(PsdExact { rat, coef })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub is_legendre_pair: bool,
    pub failing_shift: Option<usize>,
    pub x_value: Option<i64>,
    pub psd_at_m: Option<(PsdExact, PsdExact)>,
    pub n1_n2: Option<(i64, i64)>,
}

/// Exact Legendre pair test: `PAF_A(s) + PAF_B(s) = -2` for all `s ≠ 0`.
///
/// Inputs with sum -1 are negated first. When `5 | ℓ` the report also
/// carries the exact `PSD_A(ℓ/5)`, `PSD_B(ℓ/5)`, the split `(n₁, n₂)` of
/// their rational parts and `x = PAF_𝒜(1) − PAF_𝒜(2)`.
pub fn verify_legendre_pair(a: &PmOneSequence, b: &PmOneSequence) -> Result<VerificationReport> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let a = a.clone().normalized()?;
    let b = b.clone().normalized()?;
    let n = a.len();
    let (sa, sb) = (a.as_slice(), b.as_slice());

    let failing_shift = (1..n).find(|&s| paf_unchecked(sa, s) + paf_unchecked(sb, s) != -2);

    let (mut x_value, mut psd_at_m, mut n1_n2) = (None, None, None);
    if n % 5 == 0 {
        let m = n / 5;
        let ca = compress_entries(sa, m)?;
        let cb = compress_entries(sb, m)?;
        let pa = psd_at_m_exact(&ca)?;
        let pb = psd_at_m_exact(&cb)?;
        x_value = pa.x();
        if let (Some(n1), Some(n2)) = (pa.rational_integer(), pb.rational_integer()) {
            n1_n2 = Some((n1, n2));
        }
        psd_at_m = Some((pa, pb));
    }

    Ok(VerificationReport {
        is_legendre_pair: failing_shift.is_none(),
        failing_shift,
        x_value,
        psd_at_m,
        n1_n2,
    })
}

/// Parses one line of the sequence text format.
pub fn parse_sequence(line: &str) -> Result<Vec<i32>> {
    let line = line.trim();
    let (declared, body) = match line.split_once(';') {
        Some((head, rest)) => {
            let head = head.trim();
            let value = head
                .strip_prefix("ℓ=")
                .or_else(|| head.strip_prefix("l="))
                .ok_or_else(|| Error::Parse(format!("unrecognised header {head:?}")))?;
            let n: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad length in header {head:?}")))?;
            (Some(n), rest)
        }
        None => (None, line),
    };
    let entries = body
        .split(',')
        .map(|t| {
            let t = t.trim().replace('−', "-");
            t.parse::<i32>()
                .map_err(|_| Error::Parse(format!("bad entry {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(n) = declared {
        if n != entries.len() {
            return Err(Error::Parse(format!(
                "header declares length {n} but line has {} entries",
                entries.len()
            )));
        }
    }
    Ok(entries)
}

/// Parses every non-empty, non-`#` line.
pub fn parse_sequences(text: &str) -> Result<Vec<Vec<i32>>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(parse_sequence)
        .collect()
}

pub fn format_sequence(entries: &[i32], with_header: bool) -> String {
    let body = entries
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",");
    if with_header {
        format!("ℓ={};{body}", entries.len())
    } else {
        body
    }
}
