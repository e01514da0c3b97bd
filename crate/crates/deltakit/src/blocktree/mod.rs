//! Block trees: hierarchical partitions of a text where a block pair is
//! kept expanded exactly when it is the leftmost occurrence of its own
//! content, and every other block is a pointer into such a pair.
//!
//! The top level splits the (virtually padded) text into `s` blocks; each
//! kept block splits into `tau` children per level down to a leaf length,
//! where content is stored verbatim. Queries walk one block per level with
//! at most one pointer redirection each, so access costs one table lookup
//! per level and substring fingerprints cost O(1) group operations per
//! level. Per-level statistics expose the marked-block counts that the
//! measure-parameterized sizing is based on.
//!
//! Padding is virtual: blocks lying entirely past the text are absent, a
//! trailing partially-padded block is kept expanded without joining any
//! pair, and queries past the text are rejected.

mod fingerprint;
mod serial;

pub use fingerprint::{FpElem, FpPrefix, KarpRabin, FP_MOD};
pub use serial::BTREE_MAGIC;

use crate::error::{Error, Result};
use crate::textcore::Text;
use crate::util::derive_seed;
use std::collections::HashMap;

/// Build parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockTreeConfig {
    /// Children per kept block; at least 2.
    pub tau: u32,
    /// Top-level block count; at least 1.
    pub s: u64,
    /// Block length at which recursion stops and content is stored
    /// verbatim; at least 1.
    pub leaf_len: u64,
    /// Seed for the fingerprint base (and the internal occurrence
    /// dictionaries).
    pub fp_seed: u64,
}

impl BlockTreeConfig {
    /// Conventional parameters: `tau = 2`, `s = ceil(delta)`, and leaf
    /// blocks of about `log_sigma n` symbols — or single symbols in
    /// fingerprint-optimized shape.
    pub fn for_text(text: &Text, delta_ceil: u64, single_symbol_leaves: bool) -> Self {
        let leaf_len = if single_symbol_leaves {
            1
        } else {
            let sigma = u64::from(text.sigma()).max(2);
            let n = text.len() as u64;
            let mut l = 0u64;
            let mut p = 1u64;
            while p.saturating_mul(sigma) <= n {
                p *= sigma;
                l += 1;
            }
            l.max(1)
        };
        BlockTreeConfig {
            tau: 2,
            s: delta_ceil.max(1),
            leaf_len,
            fp_seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.tau < 2 {
            return Err(Error::invalid("tau must be at least 2"));
        }
        if self.s < 1 || self.leaf_len < 1 {
            return Err(Error::invalid("s and leaf_len must be at least 1"));
        }
        Ok(())
    }
}

/// One block. `start` is its text offset; blocks overlapping the end of
/// the text are truncated to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub start: u64,
    pub kind: BlockKind,
    /// Fingerprint of the (present) content.
    pub phi: FpElem,
    /// Fingerprint of the text from the parent's start to this block's
    /// start (for top blocks: from the beginning of the text).
    pub prefix: FpElem,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockKind {
    /// Kept expanded; children live at the next level.
    Internal {
        children_start: u32,
        children_len: u32,
        /// Whether the block was marked by the leftmost-pair rule, as
        /// opposed to retained by the truncation/no-pair conventions.
        pair_marked: bool,
    },
    /// Replaced by its leftmost occurrence, which starts at `offset`
    /// inside the block at index `target` of the same level (spilling
    /// into the following block when `offset > 0`).
    Pointer {
        target: u32,
        offset: u64,
        /// Fingerprint of the target block's suffix from `offset`.
        tail: FpElem,
    },
    /// Verbatim content.
    Leaf { payload: Vec<u32> },
}

#[derive(Debug, Clone)]
pub struct Level {
    pub block_len: u64,
    pub blocks: Vec<Block>,
}

/// An immutable block tree over one text.
#[derive(Debug, Clone)]
pub struct BlockTree {
    n: u64,
    sigma: u32,
    tau: u32,
    s: u64,
    leaf_len: u64,
    fp_base: u64,
    has_fp: bool,
    levels: Vec<Level>,
}

/// Per-level block counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStats {
    pub block_len: u64,
    /// Blocks marked by the leftmost-pair rule.
    pub marked: usize,
    /// Blocks kept expanded by convention (trailing truncated block, or a
    /// block with no adjacent full partner).
    pub retained: usize,
    /// Pointer blocks.
    pub unmarked: usize,
    pub leaves: usize,
}

#[derive(Debug, Clone)]
pub struct BlockTreeStats {
    pub levels: Vec<LevelStats>,
    pub total_blocks: usize,
    /// Rough size in machine words: 4 per internal block, 8 per pointer,
    /// 2 plus one word per stored symbol for leaves, plus 4 per block for
    /// fingerprint annotations when present.
    pub space_words: u64,
}

impl BlockTree {
    pub fn build(text: &Text, config: BlockTreeConfig) -> Result<BlockTree> {
        config.validate()?;
        if text.is_empty() {
            return Err(Error::invalid("empty text"));
        }
        Builder::new(text, config)?.run()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn tau(&self) -> u32 {
        self.tau
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn leaf_len(&self) -> u64 {
        self.leaf_len
    }

    pub fn fp_base(&self) -> u64 {
        self.fp_base
    }

    pub fn has_fingerprints(&self) -> bool {
        self.has_fp
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Smallest `s * leaf_len * tau^t` covering the text.
    pub fn padded_len(&self) -> u64 {
        self.s * self.levels[0].block_len
    }

    fn present_len(&self, li: usize, b: &Block) -> u64 {
        self.levels[li].block_len.min(self.n - b.start)
    }

    /// The symbol at position `i`: one block per level, at most one
    /// pointer redirection each.
    pub fn access(&self, i: u64) -> Result<u32> {
        if i >= self.n {
            return Err(Error::invalid(format!(
                "position {i} out of range for length {}",
                self.n
            )));
        }
        let mut li = 0usize;
        let mut bi = (i / self.levels[0].block_len) as usize;
        let mut off = i % self.levels[0].block_len;
        loop {
            match &self.levels[li].blocks[bi].kind {
                BlockKind::Leaf { payload } => return Ok(payload[off as usize]),
                BlockKind::Internal { children_start, .. } => {
                    let child_len = self.levels[li + 1].block_len;
                    let c = off / child_len;
                    bi = *children_start as usize + c as usize;
                    off %= child_len;
                    li += 1;
                }
                BlockKind::Pointer { target, offset, .. } => {
                    let len = self.levels[li].block_len;
                    let o = offset + off;
                    if o < len {
                        bi = *target as usize;
                        off = o;
                    } else {
                        bi = *target as usize + 1;
                        off = o - len;
                    }
                }
            }
        }
    }

    /// The substring `[start, start + len)`.
    pub fn extract(&self, start: u64, len: u64) -> Result<Text> {
        let end = start
            .checked_add(len)
            .ok_or_else(|| Error::invalid("range overflow"))?;
        if end > self.n {
            return Err(Error::invalid(format!(
                "range [{start}, {end}) out of bounds for length {}",
                self.n
            )));
        }
        let syms: Result<Vec<u32>> = (start..end).map(|i| self.access(i)).collect();
        Text::new(syms?, self.sigma)
    }

    fn require_fp(&self) -> Result<KarpRabin> {
        if !self.has_fp {
            return Err(Error::invalid(
                "tree was decoded without fingerprint annotations",
            ));
        }
        KarpRabin::new(self.fp_base)
    }

    /// Fingerprint of the prefix `[0, i)`; `i = 0` gives the identity.
    pub fn fingerprint_prefix(&self, i: u64) -> Result<FpElem> {
        if i > self.n {
            return Err(Error::invalid(format!(
                "prefix end {i} out of range for length {}",
                self.n
            )));
        }
        let scheme = self.require_fp()?;
        if i == 0 {
            return Ok(FpElem::IDENTITY);
        }
        let top_len = self.levels[0].block_len;
        let bi = ((i - 1) / top_len) as usize;
        let block = &self.levels[0].blocks[bi];
        let l = i - block.start;
        Ok(block
            .prefix
            .compose(self.prefix_in_block(&scheme, 0, bi, l)))
    }

    /// Fingerprint of the first `l` symbols of a block's present content,
    /// `1 <= l <= present_len`.
    fn prefix_in_block(&self, scheme: &KarpRabin, li: usize, bi: usize, l: u64) -> FpElem {
        let block = &self.levels[li].blocks[bi];
        debug_assert!(l >= 1 && l <= self.present_len(li, block));
        if l == self.present_len(li, block) {
            return block.phi;
        }
        match &block.kind {
            BlockKind::Leaf { payload } => scheme.fold(&payload[..l as usize]),
            BlockKind::Internal { children_start, .. } => {
                let child_len = self.levels[li + 1].block_len;
                let c = (l - 1) / child_len;
                let ci = *children_start as usize + c as usize;
                let rest = l - c * child_len;
                let child = &self.levels[li + 1].blocks[ci];
                child
                    .prefix
                    .compose(self.prefix_in_block(scheme, li + 1, ci, rest))
            }
            BlockKind::Pointer {
                target,
                offset,
                tail,
            } => {
                let ti = *target as usize;
                if *offset == 0 {
                    // the occurrence is the target block itself
                    return self.prefix_in_block(scheme, li, ti, l);
                }
                let len = self.levels[li].block_len;
                let tail_len = len - offset;
                match l.cmp(&tail_len) {
                    std::cmp::Ordering::Equal => *tail,
                    std::cmp::Ordering::Greater => {
                        // spills into the block after the target
                        tail.compose(self.prefix_in_block(scheme, li, ti + 1, l - tail_len))
                    }
                    std::cmp::Ordering::Less => {
                        // an inner fragment of the target block:
                        // phi(X[off .. off+l)) = phi(X[off..]) . phi(X[off+l..])^-1
                        // with phi(X[off+l..]) = phi(X[..off+l])^-1 . phi(X)
                        let x_phi = self.levels[li].blocks[ti].phi;
                        tail.compose(x_phi.inverse()).compose(self.prefix_in_block(
                            scheme,
                            li,
                            ti,
                            offset + l,
                        ))
                    }
                }
            }
        }
    }

    /// Fingerprint of the substring `[start, start + len)`, assembled from
    /// two prefix fingerprints.
    pub fn fingerprint(&self, start: u64, len: u64) -> Result<FpElem> {
        let end = start
            .checked_add(len)
            .ok_or_else(|| Error::invalid("range overflow"))?;
        if end > self.n {
            return Err(Error::invalid(format!(
                "range [{start}, {end}) out of bounds for length {}",
                self.n
            )));
        }
        let a = self.fingerprint_prefix(start)?;
        let b = self.fingerprint_prefix(end)?;
        Ok(a.inverse().compose(b))
    }

    pub fn stats(&self) -> BlockTreeStats {
        let mut out = Vec::with_capacity(self.levels.len());
        let mut total = 0usize;
        let mut words = 0u64;
        for level in &self.levels {
            let mut st = LevelStats {
                block_len: level.block_len,
                marked: 0,
                retained: 0,
                unmarked: 0,
                leaves: 0,
            };
            for b in &level.blocks {
                match &b.kind {
                    BlockKind::Internal { pair_marked, .. } => {
                        if *pair_marked {
                            st.marked += 1;
                        } else {
                            st.retained += 1;
                        }
                        words += 4;
                    }
                    BlockKind::Pointer { .. } => {
                        st.unmarked += 1;
                        words += 8;
                    }
                    BlockKind::Leaf { payload } => {
                        st.leaves += 1;
                        words += 2 + payload.len() as u64;
                    }
                }
                if self.has_fp {
                    words += 4;
                }
            }
            total += level.blocks.len();
            out.push(st);
        }
        BlockTreeStats {
            levels: out,
            total_blocks: total,
            space_words: words,
        }
    }

    pub fn serialize(&self) -> Vec<u8> {
        serial::serialize(self)
    }

    pub fn deserialize(bytes: &[u8]) -> Result<BlockTree> {
        serial::deserialize(bytes)
    }
}

// --- construction ------------------------------------------------------------

struct Builder<'a> {
    text: &'a Text,
    n: u64,
    config: BlockTreeConfig,
    level_lens: Vec<u64>,
    user_fp: FpPrefix,
    dict1: FpPrefix,
    dict2: FpPrefix,
}

impl<'a> Builder<'a> {
    fn new(text: &'a Text, config: BlockTreeConfig) -> Result<Self> {
        let n = text.len() as u64;
        // top block length: smallest leaf_len * tau^t with s * it >= n
        let mut top = config.leaf_len;
        while config.s.saturating_mul(top) < n {
            top = top
                .checked_mul(u64::from(config.tau))
                .ok_or_else(|| Error::invalid("padded length overflows"))?;
        }
        let mut level_lens = Vec::new();
        let mut l = top;
        loop {
            level_lens.push(l);
            if l == config.leaf_len {
                break;
            }
            l /= u64::from(config.tau);
        }
        let scheme = KarpRabin::from_seed(config.fp_seed);
        let dict1 = FpPrefix::new(
            KarpRabin::from_seed(derive_seed(config.fp_seed, 0xD1C7_0001)),
            text.symbols(),
        );
        let dict2 = FpPrefix::new(
            KarpRabin::from_seed(derive_seed(config.fp_seed, 0xD1C7_0002)),
            text.symbols(),
        );
        Ok(Builder {
            text,
            n,
            config,
            level_lens,
            user_fp: FpPrefix::new(scheme, text.symbols()),
            dict1,
            dict2,
        })
    }

    fn window_key(&self, at: u64, w: u64) -> (u64, u64) {
        let (a, b) = (at as usize, (at + w) as usize);
        (self.dict1.range(a, b).value, self.dict2.range(a, b).value)
    }

    /// First occurrence of the length-`w` window starting at `at`,
    /// verified by direct comparison so a hash collision aborts instead of
    /// corrupting the structure.
    fn leftmost_occurrence(
        &self,
        first_pos: &HashMap<(u64, u64), u64>,
        at: u64,
        w: u64,
    ) -> Result<u64> {
        let p = *first_pos
            .get(&self.window_key(at, w))
            .expect("window was inserted during the scan");
        if p < at {
            let s = self.text.symbols();
            let (a, b) = (p as usize, at as usize);
            if s[a..a + w as usize] != s[b..b + w as usize] {
                return Err(Error::Internal(
                    "fingerprint collision in occurrence dictionary".into(),
                ));
            }
        }
        Ok(p)
    }

    fn first_occurrence_dict(&self, w: u64) -> HashMap<(u64, u64), u64> {
        let mut map: HashMap<(u64, u64), u64> = HashMap::with_capacity((self.n - w + 1) as usize);
        for at in 0..=(self.n - w) {
            map.entry(self.window_key(at, w)).or_insert(at);
        }
        map
    }

    fn run(self) -> Result<BlockTree> {
        let n = self.n;
        let cfg = self.config;
        let mut levels: Vec<Level> = Vec::with_capacity(self.level_lens.len());

        // (start, parent_start) per block of the level being built
        let top_len = self.level_lens[0];
        let mut cur: Vec<(u64, u64)> = (0..cfg.s)
            .map(|i| (i * top_len, 0))
            .filter(|&(start, _)| start < n)
            .collect();

        for (li, &len) in self.level_lens.iter().enumerate() {
            let is_leaf_level = li + 1 == self.level_lens.len();
            let mut blocks: Vec<Block> = Vec::with_capacity(cur.len());
            let mut next: Vec<(u64, u64)> = Vec::new();

            let annotate = |start: u64, parent: u64| -> (FpElem, FpElem) {
                let end = (start + len).min(n);
                (
                    self.user_fp.range(start as usize, end as usize),
                    self.user_fp.range(parent as usize, start as usize),
                )
            };

            if is_leaf_level {
                for &(start, parent) in &cur {
                    let (phi, prefix) = annotate(start, parent);
                    let end = (start + len).min(n) as usize;
                    blocks.push(Block {
                        start,
                        kind: BlockKind::Leaf {
                            payload: self.text.symbols()[start as usize..end].to_vec(),
                        },
                        phi,
                        prefix,
                    });
                }
                levels.push(Level {
                    block_len: len,
                    blocks,
                });
                break;
            }

            let full = |start: u64| start + len <= n;
            // candidate pairs: text-contiguous full blocks
            let paired: Vec<bool> = {
                let mut has_pair = vec![false; cur.len()];
                for i in 0..cur.len().saturating_sub(1) {
                    if full(cur[i].0) && full(cur[i + 1].0) && cur[i + 1].0 == cur[i].0 + len {
                        has_pair[i] = true;
                        // flag on the right member too
                        has_pair[i + 1] = true;
                    }
                }
                has_pair
            };

            // leftmost-pair marking
            let mut marked = vec![false; cur.len()];
            if 2 * len <= n {
                let dict_pair = self.first_occurrence_dict(2 * len);
                for i in 0..cur.len().saturating_sub(1) {
                    let (start, _) = cur[i];
                    if full(start) && full(cur[i + 1].0) && cur[i + 1].0 == start + len {
                        let p = self.leftmost_occurrence(&dict_pair, start, 2 * len)?;
                        if p == start {
                            marked[i] = true;
                            marked[i + 1] = true;
                        }
                    }
                }
            }

            // retention conventions: truncated trailing block, and full
            // blocks with no candidate pair at all
            let keep: Vec<bool> = (0..cur.len())
                .map(|i| marked[i] || !full(cur[i].0) || !paired[i])
                .collect();

            let dict_block = if keep.iter().any(|&k| !k) {
                Some(self.first_occurrence_dict(len))
            } else {
                None
            };

            let starts: Vec<u64> = cur.iter().map(|c| c.0).collect();
            let child_len = self.level_lens[li + 1];
            for (i, &(start, parent)) in cur.iter().enumerate() {
                let (phi, prefix) = annotate(start, parent);
                let kind = if keep[i] {
                    let present = (start + len).min(n) - start;
                    let children_len = present.div_ceil(child_len) as u32;
                    let children_start = next.len() as u32;
                    for c in 0..children_len {
                        next.push((start + u64::from(c) * child_len, start));
                    }
                    BlockKind::Internal {
                        children_start,
                        children_len,
                        pair_marked: marked[i],
                    }
                } else {
                    let dict = dict_block.as_ref().expect("dictionary built above");
                    let p = self.leftmost_occurrence(dict, start, len)?;
                    if p >= start {
                        return Err(Error::Internal(format!(
                            "unmarked block at {start} has no earlier occurrence"
                        )));
                    }
                    let target_start = (p / len) * len;
                    let offset = p - target_start;
                    let ti = starts
                        .binary_search(&target_start)
                        .map_err(|_| Error::Internal("pointer target block absent".into()))?;
                    if !keep[ti] {
                        return Err(Error::Internal("pointer target not kept expanded".into()));
                    }
                    if offset > 0 {
                        let ok = ti + 1 < cur.len()
                            && starts[ti + 1] == target_start + len
                            && keep[ti + 1];
                        if !ok {
                            return Err(Error::Internal(
                                "pointer spill target not kept expanded".into(),
                            ));
                        }
                    }
                    let tail = self
                        .user_fp
                        .range(p as usize, (target_start + len) as usize);
                    BlockKind::Pointer {
                        target: ti as u32,
                        offset,
                        tail,
                    }
                };
                blocks.push(Block {
                    start,
                    kind,
                    phi,
                    prefix,
                });
            }
            levels.push(Level {
                block_len: len,
                blocks,
            });
            cur = next;
        }

        Ok(BlockTree {
            n,
            sigma: self.text.sigma(),
            tau: cfg.tau,
            s: cfg.s,
            leaf_len: cfg.leaf_len,
            fp_base: self.user_fp.scheme().base(),
            has_fp: true,
            levels,
        })
    }
}
