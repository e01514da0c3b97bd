//! delta-kit: measures, grammars, block trees, generators, and benchmark
//! sweeps over one binary.
//!
//! Exit codes: 0 on success, 1 when a verification command finds
//! violations, 2 on usage, I/O, or input format errors. All randomized
//! commands take `--seed` (falling back to `DELTA_KIT_SEED`, then to an
//! auto-generated value) and echo the seed they used; given the same
//! inputs and seed, output bytes are identical across runs.

mod textio;

use clap::{Args, Parser, Subcommand, ValueEnum};
use deltakit::blocktree::{BlockTree, BlockTreeConfig};
use deltakit::families::{FamilyKind, FamilySpec};
use deltakit::recompression::{build_grammar_with_stats, DEFAULT_ATTEMPT_CAP};
use deltakit::rlslp::{Rlslp, DEFAULT_PERIOD_CHECK_CAP};
use deltakit::textcore::{
    brute_smallest_attractor, lz_factorize, substring_complexity, BRUTE_ATTRACTOR_MAX_LEN,
};
use deltakit::{derive_seed, Text};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(name = "delta-kit", version, about = "Substring-complexity toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure a text: substring complexity, delta, and the LZ phrase count
    Measure(MeasureArgs),
    /// Generate a family string and its JSON sidecar
    Gen(GenArgs),
    /// Run-length grammar commands
    Grammar {
        #[command(subcommand)]
        cmd: GrammarCmd,
    },
    /// Block tree commands
    Bt {
        #[command(subcommand)]
        cmd: BtCmd,
    },
    /// Sweep families and sizes, reporting measures and structure sizes
    Bench(BenchArgs),
}

#[derive(Args)]
struct MeasureArgs {
    /// Input text file
    #[arg(long)]
    input: PathBuf,
    /// Bytes per symbol in the input file (1, 2, or 4)
    #[arg(long, default_value_t = 1)]
    width: u8,
    /// Also report a smallest attractor (exhaustive; length capped)
    #[arg(long)]
    brute: bool,
    /// Include the full distinct-substring count vector
    #[arg(long)]
    with_d: bool,
    /// Report wall-clock times instead of zeros
    #[arg(long)]
    timings: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    /// b at power-of-two positions
    S,
    /// perturbed placements
    Sp,
    /// recolored placements
    Sr,
    /// delimiter composite over relabeled base parts
    Gamma,
    /// delimiter composite over perturbed parts
    Entropy,
    /// recolored composite with delimiter padding
    SrComp,
    /// permutation head with a constant tail
    Perm,
}

impl FamilyArg {
    fn kind(self) -> FamilyKind {
        match self {
            FamilyArg::S => FamilyKind::S,
            FamilyArg::Sp => FamilyKind::Sp,
            FamilyArg::Sr => FamilyKind::Sr,
            FamilyArg::Gamma => FamilyKind::CompositeGamma,
            FamilyArg::Entropy => FamilyKind::CompositeEntropy,
            FamilyArg::SrComp => FamilyKind::CompositeSr,
            FamilyArg::Perm => FamilyKind::PermTail,
        }
    }

    fn name(self) -> &'static str {
        match self {
            FamilyArg::S => "s",
            FamilyArg::Sp => "sp",
            FamilyArg::Sr => "sr",
            FamilyArg::Gamma => "gamma",
            FamilyArg::Entropy => "entropy",
            FamilyArg::SrComp => "sr-comp",
            FamilyArg::Perm => "perm",
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Output length
    #[arg(long)]
    n: usize,
    /// Target measure (composite and permutation families)
    #[arg(long)]
    delta: Option<u64>,
    /// Color count (recolored family)
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; a JSON sidecar is written next to it
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum GrammarCmd {
    /// Build a run-length grammar from a text
    Build(GrammarBuildArgs),
    /// Check structural invariants and the run-rule period law
    Verify(GrammarVerifyArgs),
    /// Extract a substring without expanding the whole text
    Extract(GrammarExtractArgs),
    /// Report size, depth, and rule counts
    Stats {
        #[arg(long)]
        grammar: PathBuf,
    },
}

#[derive(Args)]
struct GrammarBuildArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    width: u8,
    #[arg(long)]
    seed: Option<u64>,
    /// Symbol-count budget; derived from the measured delta when absent
    #[arg(long)]
    budget: Option<u64>,
    /// Seeded attempts before giving up
    #[arg(long, default_value_t = DEFAULT_ATTEMPT_CAP)]
    attempts: u32,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct GrammarVerifyArgs {
    #[arg(long)]
    grammar: PathBuf,
    /// Reference text the expansion must match
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    width: u8,
    /// Expansion cap for the per-run-rule period check
    #[arg(long, default_value_t = DEFAULT_PERIOD_CHECK_CAP)]
    period_cap: u64,
}

#[derive(Args)]
struct GrammarExtractArgs {
    #[arg(long)]
    grammar: PathBuf,
    #[arg(long)]
    pos: u64,
    #[arg(long)]
    len: u64,
    /// Write raw symbols here instead of printing them as JSON
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BtCmd {
    /// Build a block tree from a text
    Build(BtBuildArgs),
    /// Read one symbol
    Access {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        pos: u64,
    },
    /// Extract a substring
    Extract {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        pos: u64,
        #[arg(long)]
        len: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Substring fingerprint over the half-open range [from, to)
    Fp {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
    /// Per-level block counts and a space estimate
    Stats {
        #[arg(long)]
        tree: PathBuf,
    },
}

#[derive(Args)]
struct BtBuildArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    width: u8,
    /// Children per kept block
    #[arg(long)]
    tau: Option<u32>,
    /// Top-level block count; defaults to the measured ceil(delta)
    #[arg(long)]
    s: Option<u64>,
    /// Leaf block length; defaults to about log_sigma(n)
    #[arg(long)]
    leaf_len: Option<u64>,
    /// Single-symbol leaves (fingerprint-optimized shape)
    #[arg(long)]
    fp: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    timings: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Comma-separated lengths, e.g. 1024,4096,16384
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    /// Seeds per length (seed, seed+1, ...)
    #[arg(long, default_value_t = 1)]
    seeds: u32,
    /// Target measure for composite and permutation families
    #[arg(long)]
    delta: Option<u64>,
    /// Color count for the recolored family
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[arg(long)]
    timings: bool,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Measure(args) => cmd_measure(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Grammar { cmd } => match cmd {
            GrammarCmd::Build(args) => cmd_grammar_build(args),
            GrammarCmd::Verify(args) => cmd_grammar_verify(args),
            GrammarCmd::Extract(args) => cmd_grammar_extract(args),
            GrammarCmd::Stats { grammar } => cmd_grammar_stats(&grammar),
        },
        Command::Bt { cmd } => match cmd {
            BtCmd::Build(args) => cmd_bt_build(args),
            BtCmd::Access { tree, pos } => cmd_bt_access(&tree, pos),
            BtCmd::Extract {
                tree,
                pos,
                len,
                out,
            } => cmd_bt_extract(&tree, pos, len, out.as_deref()),
            BtCmd::Fp { tree, from, to } => cmd_bt_fp(&tree, from, to),
            BtCmd::Stats { tree } => cmd_bt_stats(&tree),
        },
        Command::Bench(args) => cmd_bench(args),
    }
}

/// `--seed` flag, then `DELTA_KIT_SEED`, then a fresh value; always echoed
/// in the command output.
fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Ok(v) = std::env::var("DELTA_KIT_SEED") {
        return v
            .parse::<u64>()
            .map_err(|_| format!("DELTA_KIT_SEED is not a number: {v}"));
    }
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    Ok(derive_seed(nanos, u64::from(std::process::id())))
}

fn elapsed_ms(started: Instant, timings: bool) -> u64 {
    if timings {
        started.elapsed().as_millis() as u64
    } else {
        0
    }
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), String> {
    std::fs::write(path, bytes).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_grammar(path: &Path) -> Result<Rlslp, String> {
    Rlslp::deserialize(&read_bytes(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_tree(path: &Path) -> Result<BlockTree, String> {
    BlockTree::deserialize(&read_bytes(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_measure(args: MeasureArgs) -> Result<i32, String> {
    let started = Instant::now();
    let text = textio::read_text(&args.input, args.width)?;
    let profile = substring_complexity(&text).map_err(|e| e.to_string())?;
    let parse = lz_factorize(&text).map_err(|e| e.to_string())?;
    let gamma = if args.brute {
        if text.len() > BRUTE_ATTRACTOR_MAX_LEN {
            return Err(format!(
                "--brute requires n <= {BRUTE_ATTRACTOR_MAX_LEN} (got {})",
                text.len()
            ));
        }
        Some(
            brute_smallest_attractor(&text)
                .map_err(|e| e.to_string())?
                .gamma,
        )
    } else {
        None
    };
    let mut out = json!({
        "n": text.len(),
        "sigma": text.sigma(),
        "delta_num": profile.delta_num,
        "delta_den": profile.delta_den,
        "delta": profile.delta_real(),
        "z": parse.z(),
        "gamma": gamma,
        "runtime_ms": elapsed_ms(started, args.timings),
    });
    if args.with_d {
        out["d"] = json!(profile.d);
    }
    println!("{out}");
    Ok(0)
}

fn cmd_gen(args: GenArgs) -> Result<i32, String> {
    let seed = resolve_seed(args.seed)?;
    let spec = FamilySpec {
        kind: args.family.kind(),
        n: args.n,
        delta_target: args.delta,
        m: args.m,
        seed: Some(seed),
    };
    let text = spec.generate().map_err(|e| e.to_string())?;
    let width = textio::write_text(&args.out, &text)?;
    let profile = substring_complexity(&text).map_err(|e| e.to_string())?;
    let sidecar = json!({
        "family": args.family.name(),
        "n": text.len(),
        "sigma": text.sigma(),
        "measured_delta_num": profile.delta_num,
        "measured_delta_den": profile.delta_den,
        "symbol_width": width,
        "out": args.out.display().to_string(),
        "params": {
            "delta": args.delta,
            "m": args.m,
            "seed": seed,
        },
    });
    let sidecar_path = args.out.with_extension(format!(
        "{}json",
        args.out
            .extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    write_bytes(&sidecar_path, format!("{sidecar}\n").as_bytes())?;
    println!("{sidecar}");
    Ok(0)
}

fn cmd_grammar_build(args: GrammarBuildArgs) -> Result<i32, String> {
    let started = Instant::now();
    let text = textio::read_text(&args.input, args.width)?;
    let seed = resolve_seed(args.seed)?;
    let (grammar, stats) = build_grammar_with_stats(&text, seed, args.budget, args.attempts)
        .map_err(|e| e.to_string())?;
    write_bytes(&args.out, &grammar.serialize())?;
    let out = json!({
        "n": grammar.source_len(),
        "sigma": grammar.sigma(),
        "symbols": grammar.symbol_count(),
        "size": grammar.grammar_size(),
        "depth": grammar.depth(),
        "rounds": grammar.rounds(),
        "attempts": stats.attempts,
        "budget": stats.budget,
        "seed": seed,
        "out": args.out.display().to_string(),
        "runtime_ms": elapsed_ms(started, args.timings),
    });
    println!("{out}");
    Ok(0)
}

fn cmd_grammar_verify(args: GrammarVerifyArgs) -> Result<i32, String> {
    let grammar = load_grammar(&args.grammar)?;
    let reference = match &args.reference {
        Some(path) => Some(textio::read_text(path, args.width)?),
        None => None,
    };
    let report = grammar.verify(reference.as_ref(), args.period_cap);
    let out = json!({
        "ok": report.is_ok(),
        "violations": report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "run_rules_checked": report.run_rules_checked,
        "run_rules_skipped": report.run_rules_skipped,
    });
    println!("{out}");
    Ok(if report.is_ok() { 0 } else { 1 })
}

fn cmd_grammar_extract(args: GrammarExtractArgs) -> Result<i32, String> {
    let grammar = load_grammar(&args.grammar)?;
    let piece = grammar
        .extract(args.pos, args.len)
        .map_err(|e| e.to_string())?;
    emit_extracted(&piece, args.pos, args.out.as_deref())
}

fn emit_extracted(piece: &Text, pos: u64, out: Option<&Path>) -> Result<i32, String> {
    match out {
        Some(path) => {
            let width = textio::write_text(path, piece)?;
            println!(
                "{}",
                json!({
                    "pos": pos,
                    "len": piece.len(),
                    "symbol_width": width,
                    "out": path.display().to_string(),
                })
            );
        }
        None => {
            println!(
                "{}",
                json!({ "pos": pos, "len": piece.len(), "symbols": piece.symbols() })
            );
        }
    }
    Ok(0)
}

fn cmd_grammar_stats(path: &Path) -> Result<i32, String> {
    let grammar = load_grammar(path)?;
    let out = json!({
        "n": grammar.source_len(),
        "sigma": grammar.sigma(),
        "symbols": grammar.symbol_count(),
        "size": grammar.grammar_size(),
        "depth": grammar.depth(),
        "rounds": grammar.rounds(),
        "run_rules": grammar.run_rule_count(),
        "pair_rules": grammar.pair_rule_count(),
        "terminals": grammar.terminal_count(),
    });
    println!("{out}");
    Ok(0)
}

fn cmd_bt_build(args: BtBuildArgs) -> Result<i32, String> {
    let started = Instant::now();
    let text = textio::read_text(&args.input, args.width)?;
    let seed = resolve_seed(args.seed)?;
    let defaults = || -> Result<u64, String> {
        let profile = substring_complexity(&text).map_err(|e| e.to_string())?;
        Ok(profile.delta_ceil())
    };
    let mut config = if args.s.is_none() || args.leaf_len.is_none() {
        BlockTreeConfig::for_text(&text, defaults()?, args.fp)
    } else {
        BlockTreeConfig::for_text(&text, 1, args.fp)
    };
    config.fp_seed = seed;
    if let Some(tau) = args.tau {
        config.tau = tau;
    }
    if let Some(s) = args.s {
        config.s = s;
    }
    if let Some(leaf) = args.leaf_len {
        config.leaf_len = leaf;
    }
    let tree = BlockTree::build(&text, config).map_err(|e| e.to_string())?;
    write_bytes(&args.out, &tree.serialize())?;
    let stats = tree.stats();
    let out = json!({
        "n": tree.n(),
        "sigma": tree.sigma(),
        "tau": tree.tau(),
        "s": tree.s(),
        "leaf_len": tree.leaf_len(),
        "padded_len": tree.padded_len(),
        "height": tree.height(),
        "total_blocks": stats.total_blocks,
        "space_words": stats.space_words,
        "fp_base": tree.fp_base(),
        "seed": seed,
        "out": args.out.display().to_string(),
        "runtime_ms": elapsed_ms(started, args.timings),
    });
    println!("{out}");
    Ok(0)
}

fn cmd_bt_access(path: &Path, pos: u64) -> Result<i32, String> {
    let tree = load_tree(path)?;
    let symbol = tree.access(pos).map_err(|e| e.to_string())?;
    println!("{}", json!({ "pos": pos, "symbol": symbol }));
    Ok(0)
}

fn cmd_bt_extract(path: &Path, pos: u64, len: u64, out: Option<&Path>) -> Result<i32, String> {
    let tree = load_tree(path)?;
    let piece = tree.extract(pos, len).map_err(|e| e.to_string())?;
    emit_extracted(&piece, pos, out)
}

fn cmd_bt_fp(path: &Path, from: u64, to: u64) -> Result<i32, String> {
    let tree = load_tree(path)?;
    if to < from {
        return Err(format!("empty-range bounds reversed: {from} > {to}"));
    }
    let fp = tree
        .fingerprint(from, to - from)
        .map_err(|e| e.to_string())?;
    println!(
        "{}",
        json!({
            "from": from,
            "to": to,
            "value": fp.value,
            "shift": fp.shift,
            "base": tree.fp_base(),
        })
    );
    Ok(0)
}

fn cmd_bt_stats(path: &Path) -> Result<i32, String> {
    let tree = load_tree(path)?;
    let stats = tree.stats();
    let levels: Vec<_> = stats
        .levels
        .iter()
        .map(|l| {
            json!({
                "block_len": l.block_len,
                "marked": l.marked,
                "retained": l.retained,
                "unmarked": l.unmarked,
                "leaves": l.leaves,
            })
        })
        .collect();
    let out = json!({
        "n": tree.n(),
        "tau": tree.tau(),
        "s": tree.s(),
        "leaf_len": tree.leaf_len(),
        "padded_len": tree.padded_len(),
        "height": tree.height(),
        "has_fingerprints": tree.has_fingerprints(),
        "total_blocks": stats.total_blocks,
        "space_words": stats.space_words,
        "levels": levels,
    });
    println!("{out}");
    Ok(0)
}

struct BenchRow {
    family: &'static str,
    n: usize,
    delta: f64,
    z: usize,
    grammar_size: u64,
    bt_total_blocks: usize,
    rounds: u32,
    wall_ms: u64,
    seed: u64,
}

fn cmd_bench(args: BenchArgs) -> Result<i32, String> {
    let base_seed = resolve_seed(args.seed)?;
    let mut rows = Vec::new();
    for &n in &args.n_list {
        for rep in 0..args.seeds {
            let seed = derive_seed(base_seed, u64::from(rep));
            let started = Instant::now();
            let spec = FamilySpec {
                kind: args.family.kind(),
                n,
                delta_target: args.delta,
                m: args.m,
                seed: Some(seed),
            };
            let text = spec.generate().map_err(|e| e.to_string())?;
            let profile = substring_complexity(&text).map_err(|e| e.to_string())?;
            let parse = lz_factorize(&text).map_err(|e| e.to_string())?;
            let (grammar, _) = build_grammar_with_stats(&text, seed, None, DEFAULT_ATTEMPT_CAP)
                .map_err(|e| e.to_string())?;
            let mut config = BlockTreeConfig::for_text(&text, profile.delta_ceil(), false);
            config.fp_seed = seed;
            let tree = BlockTree::build(&text, config).map_err(|e| e.to_string())?;
            rows.push(BenchRow {
                family: args.family.name(),
                n,
                delta: profile.delta_real(),
                z: parse.z(),
                grammar_size: grammar.grammar_size(),
                bt_total_blocks: tree.stats().total_blocks,
                rounds: grammar.rounds().unwrap_or(0),
                wall_ms: elapsed_ms(started, args.timings),
                seed,
            });
        }
    }
    match args.format {
        OutputFormat::Csv => {
            println!("family,n,delta,z,grammar_size,bt_total_blocks,rounds,wall_ms,seed");
            for r in rows {
                println!(
                    "{},{},{},{},{},{},{},{},{}",
                    r.family,
                    r.n,
                    r.delta,
                    r.z,
                    r.grammar_size,
                    r.bt_total_blocks,
                    r.rounds,
                    r.wall_ms,
                    r.seed
                );
            }
        }
        OutputFormat::Json => {
            let arr: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "family": r.family,
                        "n": r.n,
                        "delta": r.delta,
                        "z": r.z,
                        "grammar_size": r.grammar_size,
                        "bt_total_blocks": r.bt_total_blocks,
                        "rounds": r.rounds,
                        "wall_ms": r.wall_ms,
                        "seed": r.seed,
                    })
                })
                .collect();
            println!("{}", json!(arr));
        }
    }
    Ok(0)
}
