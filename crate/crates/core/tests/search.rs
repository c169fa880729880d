use std::collections::{BTreeMap, BTreeSet, HashMap};

use legendre_core::candgen::candidates_d5;
use legendre_core::decompress::{orbit_search, uncompress_search, SearchConfig};
use legendre_core::seqcore::{compress_entries, paf, verify_legendre_pair};

const ELL: usize = 15;

/// All ±1 sequences of length 15 with sum 1 and `+1` at the last index
/// (residue 0), by direct bit enumeration.
fn block_sequences() -> Vec<Vec<i32>> {
    (0u32..1 << (ELL - 1))
        .filter(|mask| mask.count_ones() as usize == (ELL - 1) / 2)
        .map(|mask| {
            let mut v: Vec<i32> = (0..ELL - 1).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            v.push(1);
            v
        })
        .collect()
}

fn p2_of_compression(v: &[i32]) -> i64 {
    compress_entries(v, ELL / 5).unwrap().iter().map(|&c| (c * c) as i64).sum()
}

/// Unordered pairs `{a, b}` (a = b allowed) with `PAF_A + PAF_B = −2`.
fn oracle_pairs(seqs: &[Vec<i32>]) -> BTreeSet<(Vec<i32>, Vec<i32>)> {
    let key = |v: &[i32]| -> Vec<i64> { (1..ELL).map(|s| paf(v, s).unwrap()).collect() };
    let mut by_key: HashMap<Vec<i64>, Vec<&Vec<i32>>> = HashMap::new();
    for s in seqs {
        by_key.entry(key(s)).or_default().push(s);
    }
    let mut out = BTreeSet::new();
    for s in seqs {
        let want: Vec<i64> = key(s).iter().map(|v| -2 - v).collect();
        for t in by_key.get(&want).into_iter().flatten() {
            let (x, y) = if s <= *t { (s.clone(), (*t).clone()) } else { ((*t).clone(), s.clone()) };
            out.insert((x, y));
        }
    }
    out
}

fn trivial_config(prefilter: bool) -> SearchConfig {
    let mut cfg = SearchConfig::orbit_with_counts(vec![1], BTreeMap::from([(1, 7)]), 1 << 20, 0);
    cfg.max_solutions = usize::MAX;
    cfg.conjecture_prefilter = prefilter;
    cfg
}

fn unordered(result: &legendre_core::decompress::SearchResult) -> BTreeSet<(Vec<i32>, Vec<i32>)> {
    result
        .pairs
        .iter()
        .map(|p| {
            let (a, b) = (p.a.as_slice().to_vec(), p.b.as_slice().to_vec());
            if a <= b { (a, b) } else { (b, a) }
        })
        .collect()
}

#[test]
fn trivial_subgroup_orbit_search_matches_exhaustive_oracle() {
    let seqs: Vec<Vec<i32>> = block_sequences()
        .into_iter()
        .filter(|v| p2_of_compression(v) == 4 * (ELL / 5) as i64 + 1)
        .collect();
    let expected = oracle_pairs(&seqs);
    let result = orbit_search(ELL, &trivial_config(true)).unwrap();
    assert!(result.exhausted);
    let got = unordered(&result);
    assert_eq!(got.len(), result.pairs.len(), "duplicate pairs emitted");
    assert_eq!(got, expected);
    assert_eq!(expected.len(), 3464);
}

#[test]
fn prefilter_never_drops_a_conjecture_form_pair() {
    let with = unordered(&orbit_search(ELL, &trivial_config(true)).unwrap());
    let without = orbit_search(ELL, &trivial_config(false)).unwrap();
    let restricted: BTreeSet<_> = unordered(&without)
        .into_iter()
        .filter(|(a, b)| p2_of_compression(a) == 13 && p2_of_compression(b) == 13)
        .collect();
    assert_eq!(with, restricted);
    assert!(unordered(&without).len() > restricted.len());
    assert_eq!(unordered(&without), oracle_pairs(&block_sequences()));
}

#[test]
fn every_ell15_decompression_is_sound() {
    let cands = candidates_d5(ELL / 5, None).unwrap();
    assert!(!cands.is_empty());
    let mut total = 0;
    for cand in &cands {
        let mut cfg = SearchConfig::backtrack(1 << 30, 7);
        cfg.max_solutions = usize::MAX;
        let r = uncompress_search(ELL, cand, &cfg).unwrap();
        assert!(r.exhausted);
        for p in &r.pairs {
            assert!(verify_legendre_pair(&p.a, &p.b).unwrap().is_legendre_pair);
            assert_eq!(compress_entries(p.a.as_slice(), ELL / 5).unwrap(), cand.a.as_slice());
            assert_eq!(compress_entries(p.b.as_slice(), ELL / 5).unwrap(), cand.b.as_slice());
        }
        total += r.pairs.len();
    }
    assert!(total > 0);
}

#[test]
fn decompression_is_complete_per_candidate_at_ell15() {
    // every ordered sum-1 pair, bucketed by its compression
    let all: Vec<Vec<i32>> = (0u32..1 << ELL)
        .filter(|m| m.count_ones() as usize == (ELL - 1) / 2)
        .map(|m| (0..ELL).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect())
        .collect();
    let key = |v: &[i32]| -> Vec<i64> { (1..ELL).map(|s| paf(v, s).unwrap()).collect() };
    let mut by_key: HashMap<Vec<i64>, Vec<&Vec<i32>>> = HashMap::new();
    for s in &all {
        by_key.entry(key(s)).or_default().push(s);
    }
    for cand in candidates_d5(ELL / 5, None).unwrap() {
        let mut expected = BTreeSet::new();
        for a in all.iter().filter(|a| compress_entries(a, 3).unwrap() == cand.a.as_slice()) {
            let want: Vec<i64> = key(a).iter().map(|v| -2 - v).collect();
            for b in by_key.get(&want).into_iter().flatten() {
                if compress_entries(b, 3).unwrap() == cand.b.as_slice() {
                    expected.insert((a.clone(), (*b).clone()));
                }
            }
        }
        let mut cfg = SearchConfig::backtrack(1 << 30, 0);
        cfg.max_solutions = usize::MAX;
        let got: BTreeSet<_> = uncompress_search(ELL, &cand, &cfg)
            .unwrap()
            .pairs
            .into_iter()
            .map(|p| (p.a.into_inner(), p.b.into_inner()))
            .collect();
        assert_eq!(got, expected, "candidate {:?} / {:?}", cand.a.as_slice(), cand.b.as_slice());
    }
}

#[test]
fn seeded_ell85_search_recovers_published_pair() {
    let g = legendre_core::golden::ell85();
    let table = legendre_core::grouptools::orbits(85, &g.generators).unwrap();
    let [ra, rb] = g.code_pairs[0];
    let ca = legendre_core::pipeline::ell85_codes(&table, &g.orbit_counts, ra);
    let cb = legendre_core::pipeline::ell85_codes(&table, &g.orbit_counts, rb);
    let mut cfg = SearchConfig::orbit_restricted(g.generators.clone(), 12, 15, 64, 3);
    cfg.include_codes = vec![ca.clone(), cb.clone()];
    let r = orbit_search(85, &cfg).unwrap();
    assert!(!r.exhausted);
    let hit = r
        .pairs
        .iter()
        .find(|p| {
            let codes = p.codes.as_ref().unwrap();
            (codes.0 == ca && codes.1 == cb) || (codes.0 == cb && codes.1 == ca)
        })
        .expect("published pair found");
    assert!(verify_legendre_pair(&hit.a, &hit.b).unwrap().is_legendre_pair);
}
