//! Restricted recompression.
//!
//! Starting from the input text as a symbol string, rounds alternate between
//! run-length encoding (odd rounds) and randomized pair compression (even
//! rounds). Round `k` only compresses symbols whose expansion length is at
//! most `(8/7)^(ceil(k/2) - 1)`; longer symbols are forced into length-1
//! blocks and survive unchanged. The rounds shrink the string to a single
//! symbol, whose derivation is the run-length grammar.
//!
//! Threshold membership is decided exactly as `len * 7^m <= 8^m` in
//! wide-integer arithmetic; floating point would misclassify lengths at
//! large `m` and break the construction's structural invariants.

use crate::error::{Error, Result};
use crate::rlslp::{Rlslp, SymbolDef, SymbolId, SymbolTable};
use crate::textcore::Text;
use crate::util::{derive_seed, mix64};

/// Default retry budget constant `c0` in the size bound
/// `c0 * ceil(delta) * (log2(n / ceil(delta)) + 2)`.
pub const DEFAULT_BUDGET_C0: u64 = 64;

/// Default number of seeded attempts in [`build_grammar`].
pub const DEFAULT_ATTEMPT_CAP: u32 = 16;

/// Which rewriting a round applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundKind {
    /// Round 0: the input string itself.
    Initial,
    /// Odd rounds: restricted run-length encoding.
    RunLength,
    /// Even rounds: restricted pair compression.
    PairCompress,
}

/// Partition class of a symbol during pair compression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionClass {
    Left,
    Right,
    /// Over the expansion-length threshold; never part of a pair block.
    Excluded,
}

/// Metadata (and optionally the full symbol string) of one round.
#[derive(Debug, Clone)]
pub struct RoundInfo {
    pub k: u32,
    pub kind: RoundKind,
    /// Exponent `m = ceil(k/2) - 1` of the threshold `(8/7)^m`.
    pub threshold_m: u32,
    /// Seed of the left/right partition (even rounds only).
    pub partition_seed: Option<u64>,
    /// `|S_k|`.
    pub len: usize,
    /// The symbol string `S_k`; empty unless trace retention was requested.
    pub string: Vec<SymbolId>,
}

/// The sequence of intermediate strings produced by one build, used by
/// invariant checks and statistics. Retaining the strings costs memory
/// proportional to the sum of round lengths, so it is opt-in.
#[derive(Debug, Clone)]
pub struct RecompressionTrace {
    pub rounds: Vec<RoundInfo>,
    pub final_len: usize,
    pub strings_retained: bool,
}

impl RecompressionTrace {
    /// `(k, |S_k|)` per round.
    pub fn round_lens(&self) -> Vec<(u32, usize)> {
        self.rounds.iter().map(|r| (r.k, r.len)).collect()
    }

    /// Number of rewriting rounds executed (excludes round 0).
    pub fn round_count(&self) -> u32 {
        self.rounds.last().map_or(0, |r| r.k)
    }
}

// --- exact threshold arithmetic -------------------------------------------

/// Any 64-bit length satisfies `len <= (8/7)^m` once `m` reaches this bound
/// (`333 * log2(8/7) > 64`).
const THRESHOLD_M_SATURATION: u32 = 334;

fn mul_small(limbs: &[u64], factor: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(limbs.len() + 1);
    let mut carry: u128 = 0;
    for &l in limbs {
        let v = u128::from(l) * u128::from(factor) + carry;
        out.push(v as u64);
        carry = v >> 64;
    }
    while carry > 0 {
        out.push(carry as u64);
        carry >>= 64;
    }
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    out
}

fn cmp_limbs(a: &[u64], b: &[u64]) -> std::cmp::Ordering {
    if a.len() != b.len() {
        return a.len().cmp(&b.len());
    }
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        if x != y {
            return x.cmp(y);
        }
    }
    std::cmp::Ordering::Equal
}

fn pow_limbs(base: u64, exp: u32) -> Vec<u64> {
    let mut out = vec![1u64];
    for _ in 0..exp {
        out = mul_small(&out, base);
    }
    out
}

/// Whether a symbol of expansion length `len` is compressible at round
/// `round_k`, i.e. `len <= (8/7)^(ceil(round_k / 2) - 1)`, decided exactly
/// as `len * 7^m <= 8^m`.
pub fn threshold_test(len: u64, round_k: u32) -> bool {
    assert!(len >= 1 && round_k >= 1);
    let m = round_k.div_ceil(2) - 1;
    if m >= THRESHOLD_M_SATURATION {
        return true;
    }
    let pow7 = pow_limbs(7, m);
    let pow8 = pow_limbs(8, m);
    cmp_limbs(&mul_small(&pow7, len), &pow8) != std::cmp::Ordering::Greater
}

/// Per-round threshold as a plain integer cutoff: the largest length in
/// `[1..=n]` passing [`threshold_test`], or `u64::MAX` when every length up
/// to `n` passes.
fn threshold_floor(m: u32, n: u64) -> u64 {
    if m == 0 {
        return 1;
    }
    if m >= THRESHOLD_M_SATURATION {
        return u64::MAX;
    }
    let pow7 = pow_limbs(7, m);
    let pow8 = pow_limbs(8, m);
    let passes = |len: u64| cmp_limbs(&mul_small(&pow7, len), &pow8) != std::cmp::Ordering::Greater;
    if passes(n) {
        return u64::MAX;
    }
    // largest passing length; passes(1) always holds
    let (mut lo, mut hi) = (1u64, n);
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if passes(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `(8/7)^(ceil(k/2) - 1)` as a float, for statistical bounds.
pub fn ell(round_k: u32) -> f64 {
    let m = round_k.div_ceil(2) - 1;
    (8.0f64 / 7.0).powi(m as i32)
}

// --- rewriting passes ------------------------------------------------------

/// Restricted run-length encoding: block boundaries everywhere except
/// between equal adjacent symbols that are both compressible at `round_k`;
/// maximal blocks of length `>= 2` collapse to run symbols.
pub fn rle_restricted(
    seq: &[SymbolId],
    round_k: u32,
    table: &mut SymbolTable,
) -> Result<Vec<SymbolId>> {
    debug_assert!(round_k % 2 == 1);
    let thr = threshold_floor(round_k.div_ceil(2) - 1, seq_max_exp(seq, table));
    rle_with_threshold(seq, thr, table)
}

fn seq_max_exp(seq: &[SymbolId], table: &SymbolTable) -> u64 {
    seq.iter().map(|&s| table.exp_len(s)).max().unwrap_or(1)
}

fn rle_with_threshold(
    seq: &[SymbolId],
    thr: u64,
    table: &mut SymbolTable,
) -> Result<Vec<SymbolId>> {
    let mut out = Vec::with_capacity(seq.len());
    let mut i = 0;
    while i < seq.len() {
        let sym = seq[i];
        if table.exp_len(sym) <= thr {
            let mut j = i + 1;
            while j < seq.len() && seq[j] == sym {
                j += 1;
            }
            let run = (j - i) as u64;
            if run >= 2 {
                out.push(table.intern(SymbolDef::Run(sym, run))?);
            } else {
                out.push(sym);
            }
            i = j;
        } else {
            out.push(sym);
            i += 1;
        }
    }
    Ok(out)
}

/// Restricted pair compression: block boundaries everywhere except between
/// a `Left` symbol followed by a `Right` symbol; the length-2 blocks
/// collapse to pair symbols.
pub fn pc_restricted(
    seq: &[SymbolId],
    round_k: u32,
    table: &mut SymbolTable,
    partition: impl Fn(SymbolId) -> PartitionClass,
) -> Result<Vec<SymbolId>> {
    debug_assert!(round_k.is_multiple_of(2) && round_k > 0);
    let mut out = Vec::with_capacity(seq.len());
    let mut i = 0;
    while i < seq.len() {
        if i + 1 < seq.len()
            && partition(seq[i]) == PartitionClass::Left
            && partition(seq[i + 1]) == PartitionClass::Right
        {
            out.push(table.intern(SymbolDef::Pair(seq[i], seq[i + 1]))?);
            i += 2;
        } else {
            out.push(seq[i]);
            i += 1;
        }
    }
    Ok(out)
}

/// One fair coin per symbol id, keyed so the draw is independent of
/// iteration order.
fn partition_bit(round_seed: u64, id: SymbolId) -> PartitionClass {
    if mix64(round_seed ^ mix64(u64::from(id))) & 1 == 0 {
        PartitionClass::Left
    } else {
        PartitionClass::Right
    }
}

// --- grammar construction --------------------------------------------------

/// Defensive cap on round count. Termination is driven by the geometric
/// threshold growth, but pair compression makes random progress, so very
/// short strings can stall for many rounds; the floor keeps the cap far in
/// the tail of that distribution.
fn round_cap(n: usize) -> u32 {
    let log_8_7 = (n.max(2) as f64).ln() / (8.0f64 / 7.0).ln();
    ((8.0 * log_8_7).ceil() as u32 + 16).max(128)
}

/// Runs rounds until the string collapses to one symbol; returns the
/// grammar rooted there and the per-round trace.
///
/// With `retain_trace` the trace carries every intermediate symbol string;
/// otherwise only round metadata and lengths.
pub fn build_grammar_once(
    text: &Text,
    seed: u64,
    retain_trace: bool,
) -> Result<(Rlslp, RecompressionTrace)> {
    text.check_measurable()?;
    let n = text.len();
    let cap = round_cap(n);

    let mut table = SymbolTable::new();
    let mut terminal_ids = std::collections::HashMap::new();
    let mut distinct: Vec<u32> = text.symbols().to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    for sym in distinct {
        terminal_ids.insert(sym, table.intern(SymbolDef::Terminal(sym))?);
    }
    let mut cur: Vec<SymbolId> = text.symbols().iter().map(|s| terminal_ids[s]).collect();

    let mut rounds = vec![RoundInfo {
        k: 0,
        kind: RoundKind::Initial,
        threshold_m: 0,
        partition_seed: None,
        len: cur.len(),
        string: if retain_trace {
            cur.clone()
        } else {
            Vec::new()
        },
    }];

    let mut k = 0u32;
    while cur.len() > 1 {
        k += 1;
        if k > cap {
            return Err(Error::Internal(format!(
                "round cap {cap} hit at length {} (n = {n})",
                cur.len()
            )));
        }
        let m = k.div_ceil(2) - 1;
        let thr = threshold_floor(m, n as u64);
        let (kind, partition_seed);
        if k % 2 == 1 {
            cur = rle_with_threshold(&cur, thr, &mut table)?;
            kind = RoundKind::RunLength;
            partition_seed = None;
        } else {
            let round_seed = derive_seed(seed, u64::from(k));
            // one coin per distinct symbol present in the current string
            let mut classes = std::collections::HashMap::new();
            for &id in &cur {
                classes.entry(id).or_insert_with(|| {
                    if table.exp_len(id) <= thr {
                        partition_bit(round_seed, id)
                    } else {
                        PartitionClass::Excluded
                    }
                });
            }
            cur = pc_restricted(&cur, k, &mut table, move |id| classes[&id])?;
            kind = RoundKind::PairCompress;
            partition_seed = Some(round_seed);
        }
        rounds.push(RoundInfo {
            k,
            kind,
            threshold_m: m,
            partition_seed,
            len: cur.len(),
            string: if retain_trace {
                cur.clone()
            } else {
                Vec::new()
            },
        });
    }

    let trace = RecompressionTrace {
        final_len: cur.len(),
        rounds,
        strings_retained: retain_trace,
    };
    let grammar = Rlslp::new(table, cur[0], text.sigma(), Some(k))?;
    debug_assert_eq!(grammar.source_len(), n as u64);
    Ok((grammar, trace))
}

/// Size budget used when [`build_grammar`] is not given one:
/// `4 * c0 * ceil(delta) * (log2_ceil(n / ceil(delta)) + 2)`.
pub fn default_size_budget(n: u64, delta_ceil: u64, c0: u64) -> u64 {
    let dc = delta_ceil.max(1);
    let ratio = (n.div_ceil(dc)).max(2);
    let log2_ceil = u64::from(64 - (ratio - 1).leading_zeros());
    4 * c0 * dc * (log2_ceil + 2)
}

/// Attempt statistics from [`build_grammar_with_stats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildStats {
    /// 1-based index of the accepted attempt.
    pub attempts: u32,
    pub budget: u64,
}

/// Repeatedly runs [`build_grammar_once`] with derived seeds, rejecting
/// grammars whose symbol count exceeds the budget; the first accepted
/// grammar wins.
///
/// A `None` budget derives one from the measured `delta` of the text. A
/// run over budget (or over the defensive round cap) counts as a failed
/// attempt; exhausting `attempt_cap` reports `BudgetExceeded`, which
/// signals a miscalibrated budget rather than algorithmic failure.
pub fn build_grammar(
    text: &Text,
    seed: u64,
    size_budget: Option<u64>,
    attempt_cap: u32,
) -> Result<Rlslp> {
    build_grammar_with_stats(text, seed, size_budget, attempt_cap).map(|(g, _)| g)
}

/// [`build_grammar`] plus how many attempts were needed.
pub fn build_grammar_with_stats(
    text: &Text,
    seed: u64,
    size_budget: Option<u64>,
    attempt_cap: u32,
) -> Result<(Rlslp, BuildStats)> {
    if attempt_cap == 0 {
        return Err(Error::invalid("attempt_cap must be at least 1"));
    }
    let budget = match size_budget {
        Some(b) => b,
        None => {
            let profile = crate::textcore::substring_complexity(text)?;
            default_size_budget(text.len() as u64, profile.delta_ceil(), DEFAULT_BUDGET_C0)
        }
    };
    for attempt in 0..attempt_cap {
        // attempt 0 uses the caller's seed verbatim, so with an unlimited
        // budget the wrapper reproduces build_grammar_once exactly
        let attempt_seed = if attempt == 0 {
            seed
        } else {
            derive_seed(seed, u64::from(attempt))
        };
        match build_grammar_once(text, attempt_seed, false) {
            Ok((g, _)) if g.symbol_count() as u64 <= budget => {
                return Ok((
                    g,
                    BuildStats {
                        attempts: attempt + 1,
                        budget,
                    },
                ));
            }
            Ok(_) => {}
            Err(Error::Internal(_)) => {} // round-cap stall: try the next seed
            Err(e) => return Err(e),
        }
    }
    Err(Error::BudgetExceeded {
        budget,
        attempts: attempt_cap,
    })
}
