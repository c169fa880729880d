//! `lp`: command-line driver for compression-based Legendre pair search.
//!
//! Exit codes: 0 success or verified, 1 negative result, 2 usage, parse or
//! input error.

mod manifest;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use legendre_core::candgen::{candidates_d5, candidates_general, CandidateFile, CandidatePair, GenerationProfile};
use legendre_core::decompress::{orbit_search, FoundPair, SearchConfig};
use legendre_core::diophantine::{admits_unit_sum, odd_five_squares};
use legendre_core::grouptools::{
    block_from_codes, lex_rank, lex_unrank, orbits, sequence_from_block, LexRankCode, OrbitCodes,
};
use legendre_core::pipeline::{decompress_all, ell85_codes, reproduce, PipelineOptions, Section};
use legendre_core::seqcore::{
    compress_entries, format_sequence, parse_sequences, psd, verify_legendre_pair, PmOneSequence,
};
use num_bigint::BigUint;
use serde::Serialize;

use crate::manifest::RunManifest;

#[derive(Parser)]
#[command(name = "lp", version, about = "Legendre pair search via compression")]
struct Cli {
    /// Write a run manifest (command line, seed, digests, wall time) here.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether two ±1 sequences form a Legendre pair.
    Verify {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// m-compress a ±1 sequence.
    Compress {
        file: PathBuf,
        #[arg(short)]
        m: usize,
    },
    /// Power spectral density of a sequence, at the given indices or all.
    Psd {
        file: PathBuf,
        #[arg(short, value_delimiter = ',')]
        k: Vec<usize>,
    },
    /// Odd five-square representations of 4m + 1.
    Dioph {
        #[arg(short)]
        m: i64,
        #[arg(long)]
        json: bool,
    },
    /// Generate candidate compressed pairs.
    Candidates(CandidatesArgs),
    /// Recover full pairs from a candidate file.
    Decompress {
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        candidates: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search sequences built from multiplier orbits.
    SearchOrbit {
        #[arg(long)]
        ell: usize,
        #[arg(long, value_delimiter = ',')]
        gen: Vec<u64>,
        #[arg(long)]
        ones: usize,
        #[arg(long)]
        twos: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// JSON list of `[ones rank, twos rank]` selections to try first.
        #[arg(long)]
        include: Option<String>,
        #[arg(long, default_value_t = 100)]
        max_solutions: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the orbits of a multiplier subgroup acting on {1, …, ℓ−1}.
    Orbits {
        #[arg(long)]
        ell: u64,
        #[arg(long, value_delimiter = ',')]
        gen: Vec<u64>,
    },
    /// Lexicographic rank of an ascending subset of {1..N}.
    Rank {
        #[arg(short = 'N')]
        n: u64,
        #[arg(long, value_delimiter = ',')]
        set: Vec<u64>,
    },
    /// Subset of {1..N} of size k at the given rank.
    Unrank {
        #[arg(short = 'N')]
        n: u64,
        #[arg(short)]
        k: u64,
        #[arg(short)]
        r: String,
    },
    /// Decode two orbit-code selections into a pair of sequences.
    DecodePair {
        #[arg(long)]
        ell: u64,
        #[arg(long, value_delimiter = ',')]
        gen: Vec<u64>,
        /// `[[ones rank, twos rank], [ones rank, twos rank]]`, or a list of
        /// two code maps keyed by orbit size.
        #[arg(long)]
        codes: String,
        #[arg(long)]
        ones: Option<usize>,
        #[arg(long)]
        twos: Option<usize>,
    },
    /// Check computed results against the reference data.
    Reproduce {
        /// table1-small, dioph-all, ell85-decode, ell87-verify or all
        section: String,
    },
    /// Candidates followed by decompression for ℓ = 5m, or for a profile.
    Pipeline {
        #[arg(long)]
        ell: Option<usize>,
        /// Generation profile JSON for the general pipeline.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        x: Option<Vec<i64>>,
        #[command(flatten)]
        search: SearchArgs,
        /// Stop after this many pairs.
        #[arg(long)]
        max_pairs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SearchArgs {
    /// Search nodes per candidate.
    #[arg(long, default_value_t = 1 << 26)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct CandidatesArgs {
    #[arg(long)]
    ell: usize,
    #[arg(long)]
    m: usize,
    /// Each sequence takes half of every magnitude count.
    #[arg(long)]
    balanced: bool,
    /// Keep only these x values (length-5 compressions).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x: Option<Vec<i64>>,
    /// Magnitude counts across both sequences, e.g. `1:44,3:14`; required
    /// unless ℓ = 5m.
    #[arg(long)]
    counts: Option<String>,
    /// Generation profile JSON, instead of `--counts`.
    #[arg(long, conflicts_with = "counts")]
    profile: Option<PathBuf>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// An error that maps to a specific exit code.
#[derive(Debug)]
enum Failure {
    /// A well-formed run with a negative answer.
    Negative(String),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<legendre_core::Error> for Failure {
    fn from(e: legendre_core::Error) -> Self {
        Failure::Usage(e.into())
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Output collected by a command before it is written.
#[derive(Default)]
struct Outputs {
    stdout: String,
    files: Vec<(PathBuf, String)>,
    seed: Option<u64>,
    inputs: Vec<PathBuf>,
}

impl Outputs {
    fn emit(&mut self, target: Option<&Path>, text: String) {
        match target {
            Some(p) => self.files.push((p.to_path_buf(), text)),
            None => self.stdout.push_str(&text),
        }
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.stdout.push_str(text.as_ref());
        self.stdout.push('\n');
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = thread_cap() {
        // a second global init is impossible here; ignore the error
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let start = Instant::now();
    let mut out = Outputs::default();
    let result = run(cli.command, &mut out);

    for (path, text) in &out.files {
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if let Err(e) = std::io::stdout().write_all(out.stdout.as_bytes()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: writing output: {e}");
            return ExitCode::from(2);
        }
    }

    if let Some(path) = &cli.manifest {
        let mut m = RunManifest::new(std::env::args().collect());
        m.seed = out.seed;
        for input in &out.inputs {
            if let Err(e) = m.add_input(input) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        }
        m.add_result("stdout", out.stdout.as_bytes());
        for (p, text) in &out.files {
            m.add_result(&p.display().to_string(), text.as_bytes());
        }
        m.finish(start.elapsed());
        if let Err(e) = m.write(path) {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    }

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative(msg)) => {
            if !msg.is_empty() {
                eprintln!("{msg}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn thread_cap() -> Option<usize> {
    std::env::var("LP_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

fn capped_jobs(jobs: usize) -> usize {
    thread_cap().map_or(jobs, |cap| jobs.min(cap)).max(1)
}

fn run(cmd: Command, out: &mut Outputs) -> CmdResult {
    match cmd {
        Command::Verify { a, b, json } => cmd_verify(&a, &b, json, out),
        Command::Compress { file, m } => {
            let seq = read_one(&file, out)?;
            let c = compress_entries(&seq, m)?;
            out.line(format_sequence(&c, false));
            Ok(())
        }
        Command::Psd { file, k } => {
            let seq = read_one(&file, out)?;
            let ks: Vec<usize> = if k.is_empty() { (0..seq.len()).collect() } else { k };
            for k in ks {
                out.line(format!("{k}\t{:.10}", psd(&seq, k)));
            }
            Ok(())
        }
        Command::Dioph { m, json } => cmd_dioph(m, json, out),
        Command::Candidates(args) => cmd_candidates(args, out),
        Command::Decompress { ell, candidates, search, out: target } => {
            out.inputs.push(candidates.clone());
            out.seed = Some(search.seed);
            let text = std::fs::read_to_string(&candidates)
                .with_context(|| format!("reading {}", candidates.display()))?;
            let file: CandidateFile = serde_json::from_str(&text).context("parsing candidate file")?;
            if file.ell != ell {
                return Err(anyhow!("candidate file is for ℓ = {}, not {ell}", file.ell).into());
            }
            let m = file.m;
            let cands = file.into_pairs()?;
            run_decompression(ell, m, &cands, &search, None, target.as_deref(), out)
        }
        Command::SearchOrbit { ell, gen, ones, twos, seed, budget, jobs, include, max_solutions, out: target } => {
            out.seed = Some(seed);
            let mut cfg = SearchConfig::orbit_restricted(gen.clone(), ones, twos, budget, seed);
            cfg.jobs = capped_jobs(jobs);
            cfg.max_solutions = max_solutions;
            if let Some(text) = include {
                let table = orbits(ell as u64, &gen)?;
                let counts = BTreeMap::from([(1, ones), (2, twos)]);
                let ranks: Vec<[u64; 2]> = serde_json::from_str(&text).context("parsing --include")?;
                cfg.include_codes = ranks.into_iter().map(|r| ell85_codes(&table, &counts, r)).collect();
            }
            let r = orbit_search(ell, &cfg)?;
            let sidecar = Sidecar::new(&r.pairs, r.nodes_visited, r.exhausted);
            write_pairs(&r.pairs, &sidecar, target.as_deref(), out)?;
            if r.pairs.is_empty() {
                return Err(Failure::Negative(format!("no pairs after {} selections", r.nodes_visited)));
            }
            Ok(())
        }
        Command::Orbits { ell, gen } => {
            let table = orbits(ell, &gen)?;
            for (size, class) in &table.orbits_by_size {
                out.line(format!("size {size}: {} orbits", class.len()));
                for (i, orbit) in class.iter().enumerate() {
                    out.line(format!("  {}: {}", i + 1, join(orbit)));
                }
            }
            Ok(())
        }
        Command::Rank { n, set } => {
            out.line(lex_rank(n, &set)?.to_string());
            Ok(())
        }
        Command::Unrank { n, k, r } => {
            let rank: BigUint = r.parse().map_err(|_| anyhow!("bad rank {r:?}"))?;
            out.line(join(&lex_unrank(n, k, &rank)?));
            Ok(())
        }
        Command::DecodePair { ell, gen, codes, ones, twos } => cmd_decode_pair(ell, &gen, &codes, ones, twos, out),
        Command::Reproduce { section } => cmd_reproduce(&section, out),
        Command::Pipeline { ell, profile, x, search, max_pairs, out: target } => {
            cmd_pipeline(ell, profile, x, search, max_pairs, target, out)
        }
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn read_all(path: &Path, out: &mut Outputs) -> Result<Vec<Vec<i32>>> {
    out.inputs.push(path.to_path_buf());
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_sequences(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_one(path: &Path, out: &mut Outputs) -> Result<Vec<i32>> {
    let mut seqs = read_all(path, out)?;
    match seqs.len() {
        1 => Ok(seqs.remove(0)),
        n => bail!("{} holds {n} sequences, expected 1", path.display()),
    }
}

#[derive(Serialize)]
struct VerifyJson {
    is_legendre_pair: bool,
    failing_shift: Option<usize>,
    x: Option<i64>,
    n1_n2: Option<(i64, i64)>,
    psd_at_m: Option<[PsdJson; 2]>,
}

#[derive(Serialize)]
struct PsdJson {
    exact: String,
    value: f64,
    dft: f64,
}

fn cmd_verify(a: &Path, b: &Path, json: bool, out: &mut Outputs) -> CmdResult {
    let a = PmOneSequence::new(read_one(a, out)?)?;
    let b = PmOneSequence::new(read_one(b, out)?)?;
    let rep = verify_legendre_pair(&a, &b)?;
    let (a, b) = (a.normalized()?, b.normalized()?);
    let ell = a.len();
    let psd_at_m = rep.psd_at_m.as_ref().map(|(ea, eb)| {
        let m = ell / 5;
        [
            PsdJson { exact: ea.to_string(), value: ea.to_f64(), dft: psd(a.as_slice(), m) },
            PsdJson { exact: eb.to_string(), value: eb.to_f64(), dft: psd(b.as_slice(), m) },
        ]
    });
    if json {
        let v = VerifyJson {
            is_legendre_pair: rep.is_legendre_pair,
            failing_shift: rep.failing_shift,
            x: rep.x_value,
            n1_n2: rep.n1_n2,
            psd_at_m,
        };
        out.line(serde_json::to_string_pretty(&v).map_err(anyhow::Error::from)?);
    } else {
        out.line(format!("ℓ = {ell}"));
        match rep.failing_shift {
            None => out.line("Legendre pair: yes"),
            Some(s) => out.line(format!("Legendre pair: no (PAF_A + PAF_B ≠ −2 at shift {s})")),
        }
        if let Some(x) = rep.x_value {
            out.line(format!("x = {x}"));
        }
        if let Some((n1, n2)) = rep.n1_n2 {
            out.line(format!("(n1, n2) = ({n1}, {n2})"));
        }
        if let Some([pa, pb]) = &psd_at_m {
            let m = ell / 5;
            out.line(format!("PSD_A({m}) = {} = {:.8} (DFT {:.8})", pa.exact, pa.value, pa.dft));
            out.line(format!("PSD_B({m}) = {} = {:.8} (DFT {:.8})", pb.exact, pb.value, pb.dft));
        } else if ell > 1 {
            out.line(format!("PSD_A(1) = {:.8}", psd(a.as_slice(), 1)));
            out.line(format!("PSD_B(1) = {:.8}", psd(b.as_slice(), 1)));
        }
    }
    if rep.is_legendre_pair {
        Ok(())
    } else {
        Err(Failure::Negative(String::new()))
    }
}

#[derive(Serialize)]
struct DiophJson {
    values: [i32; 5],
    target: i64,
    admits_unit_sum: bool,
}

fn cmd_dioph(m: i64, json: bool, out: &mut Outputs) -> CmdResult {
    let sols = odd_five_squares(m)?;
    if json {
        let rows: Vec<DiophJson> = sols
            .iter()
            .map(|s| DiophJson { values: s.values, target: s.target, admits_unit_sum: admits_unit_sum(s) })
            .collect();
        out.line(serde_json::to_string_pretty(&rows).map_err(anyhow::Error::from)?);
    } else {
        for s in &sols {
            out.line(format!("{}\tadmits_unit_sum={}", join(&s.values), admits_unit_sum(s)));
        }
    }
    Ok(())
}

fn parse_counts(text: &str) -> Result<Vec<(u32, usize)>> {
    text.split(',')
        .map(|part| {
            let (mag, count) = part
                .split_once(':')
                .ok_or_else(|| anyhow!("count {part:?} is not of the form magnitude:count"))?;
            Ok((mag.trim().parse()?, count.trim().parse()?))
        })
        .collect()
}

fn cmd_candidates(args: CandidatesArgs, out: &mut Outputs) -> CmdResult {
    out.seed = Some(args.seed);
    let x_filter: Option<BTreeSet<i64>> = args.x.map(|v| v.into_iter().collect());
    let pairs: Vec<CandidatePair> = if args.counts.is_none() && args.profile.is_none() {
        if args.m == 0 || args.ell != 5 * args.m {
            return Err(anyhow!("without --counts or --profile, ℓ must equal 5m").into());
        }
        candidates_d5(args.m, x_filter.as_ref())?
    } else {
        let mut profile = match &args.profile {
            Some(p) => {
                out.inputs.push(p.clone());
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str(&text).context("parsing profile")?
            }
            None => {
                let counts = parse_counts(args.counts.as_deref().expect("checked"))?;
                let mut p = GenerationProfile::new(args.ell, args.m, &counts, args.balanced);
                p.seed = args.seed;
                p
            }
        };
        if x_filter.is_some() {
            profile.x_filter = x_filter;
        }
        if args.budget.is_some() {
            profile.budget = args.budget;
        }
        candidates_general(&profile)?.collect()
    };
    let file = CandidateFile::from_pairs(args.ell, args.m, &pairs);
    let text = serde_json::to_string_pretty(&file).map_err(anyhow::Error::from)? + "\n";
    out.emit(args.out.as_deref(), text);
    if args.out.is_some() {
        out.line(format!("{} candidates", pairs.len()));
    }
    if pairs.is_empty() {
        return Err(Failure::Negative("no candidates".into()));
    }
    Ok(())
}

/// JSON sidecar written next to a pair listing.
#[derive(Serialize)]
struct Sidecar {
    pairs: Vec<SidecarPair>,
    nodes_visited: u64,
    exhausted: bool,
}

#[derive(Serialize)]
struct SidecarPair {
    codes: Option<[OrbitCodes; 2]>,
    x: Option<i64>,
}

impl Sidecar {
    fn new(pairs: &[FoundPair], nodes_visited: u64, exhausted: bool) -> Self {
        let pairs = pairs
            .iter()
            .map(|p| SidecarPair { codes: p.codes.clone().map(|(a, b)| [a, b]), x: p.x })
            .collect();
        Self { pairs, nodes_visited, exhausted }
    }
}

fn pair_lines(pairs: &[FoundPair]) -> String {
    let mut text = String::new();
    for p in pairs {
        let _ = writeln!(text, "{}", format_sequence(p.a.as_slice(), true));
        let _ = writeln!(text, "{}", format_sequence(p.b.as_slice(), true));
        text.push('\n');
    }
    text
}

fn sidecar_path(target: &Path) -> PathBuf {
    let mut s = target.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_pairs(pairs: &[FoundPair], sidecar: &Sidecar, target: Option<&Path>, out: &mut Outputs) -> Result<()> {
    let json = serde_json::to_string_pretty(sidecar)? + "\n";
    match target {
        Some(p) => {
            out.emit(Some(p), pair_lines(pairs));
            out.emit(Some(&sidecar_path(p)), json);
            out.line(format!(
                "{} pairs, {} nodes, exhausted = {}",
                pairs.len(),
                sidecar.nodes_visited,
                sidecar.exhausted
            ));
        }
        None => {
            out.stdout.push_str(&pair_lines(pairs));
            out.stdout.push_str(&json);
        }
    }
    Ok(())
}

fn run_decompression(
    ell: usize,
    m: usize,
    cands: &[CandidatePair],
    search: &SearchArgs,
    max_pairs: Option<usize>,
    target: Option<&Path>,
    out: &mut Outputs,
) -> CmdResult {
    let opts = PipelineOptions {
        budget_nodes: search.budget,
        seed: search.seed,
        jobs: capped_jobs(search.jobs),
        x_filter: None,
        max_pairs,
    };
    let r = decompress_all(ell, m, cands, &opts)?;
    let sidecar = Sidecar::new(&r.pairs, r.nodes_visited, r.exhausted);
    write_pairs(&r.pairs, &sidecar, target, out)?;
    if r.pairs.is_empty() {
        return Err(Failure::Negative(format!(
            "no pairs from {} candidates ({} nodes, exhausted = {})",
            r.candidates_searched, r.nodes_visited, r.exhausted
        )));
    }
    Ok(())
}

fn cmd_pipeline(
    ell: Option<usize>,
    profile: Option<PathBuf>,
    x: Option<Vec<i64>>,
    search: SearchArgs,
    max_pairs: Option<usize>,
    target: Option<PathBuf>,
    out: &mut Outputs,
) -> CmdResult {
    out.seed = Some(search.seed);
    let x_filter: Option<BTreeSet<i64>> = x.map(|v| v.into_iter().collect());
    let (ell, m, cands) = match (ell, profile) {
        (_, Some(path)) => {
            out.inputs.push(path.clone());
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let mut p: GenerationProfile = serde_json::from_str(&text).context("parsing profile")?;
            if x_filter.is_some() {
                p.x_filter = x_filter;
            }
            let cands: Vec<CandidatePair> = candidates_general(&p)?.collect();
            (p.ell, p.m, cands)
        }
        (Some(ell), None) => {
            if ell % 5 != 0 || ell % 2 == 0 {
                return Err(anyhow!("ℓ = {ell} must be an odd multiple of 5, or pass --profile").into());
            }
            // candidates are stored with x ≥ 0, so filter on |x|
            let filter = x_filter.map(|s| s.into_iter().flat_map(|x| [x, -x]).collect::<BTreeSet<_>>());
            (ell, ell / 5, candidates_d5(ell / 5, filter.as_ref())?)
        }
        (None, None) => return Err(anyhow!("pass --ell or --profile").into()),
    };
    eprintln!("ℓ = {ell}: {} candidates", cands.len());
    run_decompression(ell, m, &cands, &search, max_pairs, target.as_deref(), out)
}

fn cmd_decode_pair(
    ell: u64,
    gen: &[u64],
    codes: &str,
    ones: Option<usize>,
    twos: Option<usize>,
    out: &mut Outputs,
) -> CmdResult {
    let table = orbits(ell, gen)?;
    let value: serde_json::Value = serde_json::from_str(codes).context("parsing --codes")?;
    let pair: [OrbitCodes; 2] = if let Ok(ranks) = serde_json::from_value::<[[u64; 2]; 2]>(value.clone()) {
        let (Some(ones), Some(twos)) = (ones, twos) else {
            return Err(anyhow!("rank-pair codes need --ones and --twos").into());
        };
        let counts = BTreeMap::from([(1, ones), (2, twos)]);
        ranks.map(|r| ell85_codes(&table, &counts, r))
    } else {
        serde_json::from_value::<[BTreeMap<usize, LexRankCode>; 2]>(value)
            .context("--codes is neither [[r1, r2], [r1, r2]] nor a list of two code maps")?
    };
    for codes in &pair {
        let seq = sequence_from_block(&block_from_codes(&table, codes)?);
        out.line(format_sequence(seq.as_slice(), true));
    }
    Ok(())
}

fn cmd_reproduce(section: &str, out: &mut Outputs) -> CmdResult {
    let sections: Vec<Section> =
        if section == "all" { Section::ALL.to_vec() } else { vec![section.parse()?] };
    let mut failed = false;
    for s in sections {
        let r = reproduce(s)?;
        out.line(format!("[{s}] {}", if r.ok() { "ok" } else { "MISMATCH" }));
        for n in &r.notes {
            out.line(format!("  = {n}"));
        }
        for d in &r.mismatches {
            out.line(format!("  ! {d}"));
        }
        failed |= !r.ok();
    }
    if failed {
        Err(Failure::Negative("reference mismatch".into()))
    } else {
        Ok(())
    }
}
