//! Run-length straight-line programs (RLSLPs).
//!
//! A grammar over an append-only symbol table whose entries are terminals,
//! binary pair rules `A -> B C`, and run rules `A -> B^t` with `t >= 2`.
//! Entries are topologically ordered (children precede parents), deduplicated
//! (distinct ids have distinct definitions), and annotated with expansion
//! lengths, which drive `O(depth)` random access without any auxiliary
//! index.

mod serial;

pub use serial::RLSLP_MAGIC;

use crate::error::{Error, Result};
use crate::textcore::{period_of_slice, Text};
use std::collections::HashMap;

pub type SymbolId = u32;

/// A symbol table entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolDef {
    /// A terminal holding one alphabet symbol.
    Terminal(u32),
    /// `A -> B C`.
    Pair(SymbolId, SymbolId),
    /// `A -> B^t`, `t >= 2`.
    Run(SymbolId, u64),
}

/// Append-only, deduplicated symbol table with expansion lengths.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    defs: Vec<SymbolDef>,
    exp_len: Vec<u64>,
    dedup: HashMap<SymbolDef, SymbolId>,
}

impl SymbolTable {
    pub fn new() -> Self {
        SymbolTable::default()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn def(&self, id: SymbolId) -> SymbolDef {
        self.defs[id as usize]
    }

    pub fn exp_len(&self, id: SymbolId) -> u64 {
        self.exp_len[id as usize]
    }

    /// Returns the id for `def`, creating an entry if this definition has
    /// not been seen before. Referenced ids must already exist.
    pub fn intern(&mut self, def: SymbolDef) -> Result<SymbolId> {
        if let Some(&id) = self.dedup.get(&def) {
            return Ok(id);
        }
        let next = self.defs.len();
        if next > u32::MAX as usize {
            return Err(Error::Internal("symbol table overflow".into()));
        }
        let len = match def {
            SymbolDef::Terminal(sym) => {
                if sym == 0 {
                    return Err(Error::invalid("terminal symbol 0"));
                }
                1
            }
            SymbolDef::Pair(a, b) => {
                let (a, b) = (a as usize, b as usize);
                if a >= next || b >= next {
                    return Err(Error::Internal("pair references undefined symbol".into()));
                }
                self.exp_len[a]
                    .checked_add(self.exp_len[b])
                    .ok_or_else(|| Error::invalid("expansion length overflow"))?
            }
            SymbolDef::Run(base, exp) => {
                if (base as usize) >= next {
                    return Err(Error::Internal("run references undefined symbol".into()));
                }
                if exp < 2 {
                    return Err(Error::invalid("run exponent must be at least 2"));
                }
                self.exp_len[base as usize]
                    .checked_mul(exp)
                    .ok_or_else(|| Error::invalid("expansion length overflow"))?
            }
        };
        self.defs.push(def);
        self.exp_len.push(len);
        self.dedup.insert(def, next as SymbolId);
        Ok(next as SymbolId)
    }

    pub fn defs(&self) -> &[SymbolDef] {
        &self.defs
    }

    /// Emits `exp(sym)[lo..hi)` into `out`, visiting only overlapping
    /// subtrees.
    fn emit_range(&self, sym: SymbolId, lo: u64, hi: u64, out: &mut Vec<u32>) {
        debug_assert!(lo < hi && hi <= self.exp_len(sym));
        match self.def(sym) {
            SymbolDef::Terminal(c) => out.push(c),
            SymbolDef::Pair(a, b) => {
                let la = self.exp_len(a);
                if lo < la {
                    self.emit_range(a, lo, hi.min(la), out);
                }
                if hi > la {
                    self.emit_range(b, lo.max(la) - la, hi - la, out);
                }
            }
            SymbolDef::Run(b, _) => {
                let lb = self.exp_len(b);
                let first = lo / lb;
                let last = (hi - 1) / lb;
                for r in first..=last {
                    let base = r * lb;
                    self.emit_range(b, lo.max(base) - base, (hi.min(base + lb)) - base, out);
                }
            }
        }
    }

    /// Concatenated expansion of a symbol sequence.
    pub fn expand_seq(&self, seq: &[SymbolId]) -> Vec<u32> {
        let total: u64 = seq.iter().map(|&s| self.exp_len(s)).sum();
        let mut out = Vec::with_capacity(total as usize);
        for &s in seq {
            self.emit_range(s, 0, self.exp_len(s), &mut out);
        }
        out
    }
}

/// A run-length grammar generating exactly one text.
#[derive(Debug, Clone)]
pub struct Rlslp {
    table: SymbolTable,
    start: SymbolId,
    source_len: u64,
    sigma: u32,
    /// Number of rewriting rounds used by the builder, when known
    /// (not preserved across serialization).
    rounds: Option<u32>,
}

/// Default cap on materialized expansions in [`Rlslp::verify`].
pub const DEFAULT_PERIOD_CHECK_CAP: u64 = 100_000;

impl Rlslp {
    pub fn new(
        table: SymbolTable,
        start: SymbolId,
        sigma: u32,
        rounds: Option<u32>,
    ) -> Result<Self> {
        if (start as usize) >= table.len() {
            return Err(Error::Internal("start symbol out of range".into()));
        }
        let source_len = table.exp_len(start);
        Ok(Rlslp {
            table,
            start,
            source_len,
            sigma,
            rounds,
        })
    }

    pub fn table(&self) -> &SymbolTable {
        &self.table
    }

    pub fn start(&self) -> SymbolId {
        self.start
    }

    /// Length of the generated text.
    pub fn source_len(&self) -> u64 {
        self.source_len
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn rounds(&self) -> Option<u32> {
        self.rounds
    }

    /// Number of table entries (terminals and rules).
    pub fn symbol_count(&self) -> usize {
        self.table.len()
    }

    /// Grammar size: 1 per terminal, 2 per pair rule, 2 per run rule
    /// (base plus exponent slot).
    pub fn grammar_size(&self) -> u64 {
        self.table
            .defs()
            .iter()
            .map(|d| match d {
                SymbolDef::Terminal(_) => 1u64,
                SymbolDef::Pair(..) | SymbolDef::Run(..) => 2u64,
            })
            .sum()
    }

    pub fn run_rule_count(&self) -> usize {
        self.table
            .defs()
            .iter()
            .filter(|d| matches!(d, SymbolDef::Run(..)))
            .count()
    }

    pub fn pair_rule_count(&self) -> usize {
        self.table
            .defs()
            .iter()
            .filter(|d| matches!(d, SymbolDef::Pair(..)))
            .count()
    }

    pub fn terminal_count(&self) -> usize {
        self.table
            .defs()
            .iter()
            .filter(|d| matches!(d, SymbolDef::Terminal(_)))
            .count()
    }

    /// Longest root-to-terminal chain, counting a run rule as one edge.
    pub fn depth(&self) -> u32 {
        let mut depth = vec![0u32; self.table.len()];
        for id in 0..self.table.len() {
            depth[id] = match self.table.def(id as SymbolId) {
                SymbolDef::Terminal(_) => 0,
                SymbolDef::Pair(a, b) => 1 + depth[a as usize].max(depth[b as usize]),
                SymbolDef::Run(b, _) => 1 + depth[b as usize],
            };
        }
        depth[self.start as usize]
    }

    /// Full expansion of the start symbol.
    pub fn expand(&self) -> Text {
        let mut out = Vec::with_capacity(self.source_len as usize);
        self.emit(self.start, 0, self.source_len, &mut out);
        Text::new(out, self.sigma).expect("grammar expansion is a valid text")
    }

    /// The symbol at position `i` (0-based), by length-guided descent.
    pub fn access(&self, i: u64) -> Result<u32> {
        if i >= self.source_len {
            return Err(Error::invalid(format!(
                "position {i} out of range for length {}",
                self.source_len
            )));
        }
        let mut sym = self.start;
        let mut off = i;
        loop {
            match self.table.def(sym) {
                SymbolDef::Terminal(c) => return Ok(c),
                SymbolDef::Pair(a, b) => {
                    let la = self.table.exp_len(a);
                    if off < la {
                        sym = a;
                    } else {
                        off -= la;
                        sym = b;
                    }
                }
                SymbolDef::Run(b, _) => {
                    let lb = self.table.exp_len(b);
                    off %= lb;
                    sym = b;
                }
            }
        }
    }

    /// The substring `[start, start + len)` of the generated text,
    /// in `O(len + depth)` time.
    pub fn extract(&self, start: u64, len: u64) -> Result<Text> {
        let end = start
            .checked_add(len)
            .ok_or_else(|| Error::invalid("range overflow"))?;
        if end > self.source_len {
            return Err(Error::invalid(format!(
                "range [{start}, {end}) out of bounds for length {}",
                self.source_len
            )));
        }
        let mut out = Vec::with_capacity(len as usize);
        if len > 0 {
            self.emit(self.start, start, end, &mut out);
        }
        Text::new(out, self.sigma)
    }

    /// Emits `exp(sym)[lo..hi)` into `out`. Only subtrees overlapping the
    /// range are visited.
    fn emit(&self, sym: SymbolId, lo: u64, hi: u64, out: &mut Vec<u32>) {
        self.table.emit_range(sym, lo, hi, out);
    }

    /// Materializes `exp(id)` if its length is at most `cap`.
    pub fn expand_symbol(&self, id: SymbolId, cap: u64) -> Option<Vec<u32>> {
        let len = self.table.exp_len(id);
        if len > cap {
            return None;
        }
        let mut out = Vec::with_capacity(len as usize);
        self.emit(id, 0, len, &mut out);
        Some(out)
    }

    /// Structural and semantic validation; failures are reported, not
    /// thrown.
    ///
    /// Checks expansion-length bookkeeping, topological order, run-rule
    /// exponents, reachability, and the period law `per(exp(A)) = |exp(B)|`
    /// for every run rule `A -> B^t` whose expansion is at most
    /// `period_cap` long (longer ones are counted as skipped). With a
    /// reference text, also checks the full expansion.
    pub fn verify(&self, reference: Option<&Text>, period_cap: u64) -> VerificationReport {
        let mut report = VerificationReport::default();
        let count = self.table.len();

        // Recompute expansion lengths bottom-up, independent of the stored
        // values.
        let mut computed = vec![0u64; count];
        for id in 0..count {
            let c = match self.table.def(id as SymbolId) {
                SymbolDef::Terminal(_) => Some(1u64),
                SymbolDef::Pair(a, b) => {
                    if a as usize >= id || b as usize >= id {
                        report
                            .violations
                            .push(Violation::ForwardReference { id: id as SymbolId });
                        None
                    } else {
                        computed[a as usize].checked_add(computed[b as usize])
                    }
                }
                SymbolDef::Run(b, exp) => {
                    if b as usize >= id {
                        report
                            .violations
                            .push(Violation::ForwardReference { id: id as SymbolId });
                        None
                    } else {
                        if exp < 2 {
                            report.violations.push(Violation::RunExponent {
                                id: id as SymbolId,
                                exponent: exp,
                            });
                        }
                        computed[b as usize].checked_mul(exp)
                    }
                }
            };
            match c {
                Some(len) => {
                    computed[id] = len;
                    if len != self.table.exp_len(id as SymbolId) {
                        report.violations.push(Violation::ExpansionLength {
                            id: id as SymbolId,
                            stored: self.table.exp_len(id as SymbolId),
                            computed: len,
                        });
                    }
                }
                None => computed[id] = 0,
            }
        }
        if computed[self.start as usize] != self.source_len {
            report.violations.push(Violation::StartLength {
                stored: self.source_len,
                computed: computed[self.start as usize],
            });
        }

        // Reachability from the start symbol.
        let mut reachable = vec![false; count];
        let mut stack = vec![self.start];
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut reachable[id as usize], true) {
                continue;
            }
            match self.table.def(id) {
                SymbolDef::Terminal(_) => {}
                SymbolDef::Pair(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                SymbolDef::Run(b, _) => stack.push(b),
            }
        }
        for (id, &r) in reachable.iter().enumerate() {
            if !r {
                report
                    .violations
                    .push(Violation::Unreachable { id: id as SymbolId });
            }
        }

        // Period law on run rules.
        for id in 0..count {
            if let SymbolDef::Run(base, _) = self.table.def(id as SymbolId) {
                match self.expand_symbol(id as SymbolId, period_cap) {
                    Some(expansion) => {
                        report.run_rules_checked += 1;
                        let per = period_of_slice(&expansion) as u64;
                        let base_len = self.table.exp_len(base);
                        if per != base_len {
                            report.violations.push(Violation::RunPeriod {
                                id: id as SymbolId,
                                period: per,
                                base_len,
                            });
                        }
                    }
                    None => report.run_rules_skipped += 1,
                }
            }
        }

        if let Some(reference) = reference {
            let expanded = self.expand();
            if expanded.symbols() != reference.symbols() {
                let first_diff = expanded
                    .symbols()
                    .iter()
                    .zip(reference.symbols())
                    .position(|(a, b)| a != b)
                    .unwrap_or_else(|| expanded.len().min(reference.len()));
                report
                    .violations
                    .push(Violation::ReferenceMismatch { first_diff });
            }
        }
        report
    }

    pub fn serialize(&self) -> Vec<u8> {
        serial::serialize(self)
    }

    pub fn deserialize(bytes: &[u8]) -> Result<Rlslp> {
        serial::deserialize(bytes)
    }
}

/// One verification failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ExpansionLength {
        id: SymbolId,
        stored: u64,
        computed: u64,
    },
    ForwardReference {
        id: SymbolId,
    },
    RunExponent {
        id: SymbolId,
        exponent: u64,
    },
    Unreachable {
        id: SymbolId,
    },
    StartLength {
        stored: u64,
        computed: u64,
    },
    /// `per(exp(A)) != |exp(B)|` for a run rule `A -> B^t`.
    RunPeriod {
        id: SymbolId,
        period: u64,
        base_len: u64,
    },
    ReferenceMismatch {
        first_diff: usize,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::ExpansionLength {
                id,
                stored,
                computed,
            } => write!(
                f,
                "symbol {id}: stored length {stored}, computed {computed}"
            ),
            Violation::ForwardReference { id } => {
                write!(f, "symbol {id} references a later symbol")
            }
            Violation::RunExponent { id, exponent } => {
                write!(f, "run rule {id} has exponent {exponent} < 2")
            }
            Violation::Unreachable { id } => write!(f, "symbol {id} unreachable from start"),
            Violation::StartLength { stored, computed } => {
                write!(f, "start expands to {computed}, recorded length {stored}")
            }
            Violation::RunPeriod {
                id,
                period,
                base_len,
            } => write!(
                f,
                "run rule {id}: expansion period {period} != base length {base_len}"
            ),
            Violation::ReferenceMismatch { first_diff } => {
                write!(
                    f,
                    "expansion differs from reference at position {first_diff}"
                )
            }
        }
    }
}

/// Outcome of [`Rlslp::verify`].
#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub violations: Vec<Violation>,
    /// Run rules whose period law was checked by materializing the
    /// expansion.
    pub run_rules_checked: usize,
    /// Run rules skipped because their expansion exceeds the cap.
    pub run_rules_skipped: usize,
}

impl VerificationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}
