//! Published reference values, shipped as JSON under `data/`.

use std::collections::BTreeMap;

use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
pub struct DiophGolden {
    pub m: i64,
    pub target: i64,
    pub solutions: Vec<[i32; 5]>,
    pub ruled_out: Vec<[i32; 5]>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Table1Row {
    pub m: usize,
    pub ell: usize,
    pub x: Vec<i64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Binomials {
    pub ones: u64,
    pub twos: u64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct FirstPair85 {
    pub a_ones: Vec<u64>,
    pub b_ones: Vec<u64>,
    pub a_twos: Vec<u64>,
    pub b_twos: Vec<u64>,
    pub a_block: Vec<u64>,
    pub b_block: Vec<u64>,
    pub a_compression: Vec<i32>,
    pub b_compression: Vec<i32>,
    pub x: i64,
    pub n: i64,
    pub psd_a: f64,
    pub psd_b: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Ell85 {
    pub ell: usize,
    pub generators: Vec<u64>,
    pub orbit_counts: BTreeMap<usize, usize>,
    pub size_one_orbits: usize,
    pub size_two_orbits: usize,
    pub binomials: Binomials,
    pub search_space: u64,
    /// `[[ones rank, twos rank] of A, [ones rank, twos rank] of B]`
    pub code_pairs: Vec<[[u64; 2]; 2]>,
    pub first_pair: FirstPair85,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SeqPair {
    pub a: Vec<i32>,
    pub b: Vec<i32>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Ell87 {
    pub ell: usize,
    pub m: usize,
    pub abs_value_counts: BTreeMap<u32, usize>,
    pub pairs: Vec<SeqPair>,
    pub a_compression: Vec<i32>,
    pub b_compression: Vec<i32>,
}

fn load<T: for<'de> Deserialize<'de>>(name: &str, text: &str) -> T {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("embedded {name} is malformed: {e}"))
}

pub fn dioph() -> Vec<DiophGolden> {
    load("dioph_golden.json", include_str!("../data/dioph_golden.json"))
}

pub fn table1() -> Vec<Table1Row> {
    load("table1.json", include_str!("../data/table1.json"))
}

pub fn ell85() -> Ell85 {
    load("ell85.json", include_str!("../data/ell85.json"))
}

pub fn ell87() -> Ell87 {
    load("ell87.json", include_str!("../data/ell87.json"))
}
