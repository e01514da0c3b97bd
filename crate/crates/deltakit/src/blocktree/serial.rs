//! Binary block tree format.
//!
//! Layout: the magic `BTREE1`, varints `n`, `sigma`, `tau`, `s`,
//! `leaf_len`, a fingerprint flag byte (with the base varint when set),
//! the level count, then per level its block length, block count, and one
//! record per block: tag `M` (kept expanded) with a pair-marked flag and
//! the child count, `U` with target index and offset, or `L` with the
//! verbatim payload. When the fingerprint flag is set, a trailing section
//! carries `(value, shift)` pairs for every block's content and prefix
//! fingerprints plus the tail fingerprint of every pointer.
//!
//! Decoding is strict: level shapes, block starts, child counts, pointer
//! targets, payload lengths and symbols, and fingerprint ranges are all
//! re-derived or checked, and trailing bytes are rejected. A decoded tree
//! answers queries exactly like the one that was encoded.

use super::fingerprint::{FpElem, FP_MOD};
use super::{Block, BlockKind, BlockTree, Level};
use crate::error::{Error, Result};
use crate::util::{read_varint, write_varint};

pub const BTREE_MAGIC: &[u8; 6] = b"BTREE1";

pub(super) fn serialize(bt: &BlockTree) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(BTREE_MAGIC);
    write_varint(&mut out, bt.n());
    write_varint(&mut out, u64::from(bt.sigma()));
    write_varint(&mut out, u64::from(bt.tau()));
    write_varint(&mut out, bt.s());
    write_varint(&mut out, bt.leaf_len());
    out.push(u8::from(bt.has_fingerprints()));
    if bt.has_fingerprints() {
        write_varint(&mut out, bt.fp_base());
    }
    write_varint(&mut out, bt.levels().len() as u64);
    for level in bt.levels() {
        write_varint(&mut out, level.block_len);
        write_varint(&mut out, level.blocks.len() as u64);
        for b in &level.blocks {
            match &b.kind {
                BlockKind::Internal {
                    children_len,
                    pair_marked,
                    ..
                } => {
                    out.push(b'M');
                    write_varint(&mut out, u64::from(*pair_marked));
                    write_varint(&mut out, u64::from(*children_len));
                }
                BlockKind::Pointer { target, offset, .. } => {
                    out.push(b'U');
                    write_varint(&mut out, u64::from(*target));
                    write_varint(&mut out, *offset);
                }
                BlockKind::Leaf { payload } => {
                    out.push(b'L');
                    write_varint(&mut out, payload.len() as u64);
                    for &s in payload {
                        write_varint(&mut out, u64::from(s));
                    }
                }
            }
        }
    }
    if bt.has_fingerprints() {
        for level in bt.levels() {
            for b in &level.blocks {
                write_varint(&mut out, b.phi.value);
                write_varint(&mut out, b.phi.shift);
                write_varint(&mut out, b.prefix.value);
                write_varint(&mut out, b.prefix.shift);
                if let BlockKind::Pointer { tail, .. } = &b.kind {
                    write_varint(&mut out, tail.value);
                    write_varint(&mut out, tail.shift);
                }
            }
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn varint(&mut self, what: &str) -> Result<u64> {
        match read_varint(self.bytes, self.pos) {
            Some((v, next)) => {
                self.pos = next;
                Ok(v)
            }
            None => Err(Error::parse(self.pos, format!("truncated varint ({what})"))),
        }
    }

    fn byte(&mut self, what: &str) -> Result<u8> {
        match self.bytes.get(self.pos) {
            Some(&b) => {
                self.pos += 1;
                Ok(b)
            }
            None => Err(Error::parse(self.pos, format!("unexpected end ({what})"))),
        }
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn fp_elem(&mut self, what: &str) -> Result<FpElem> {
        let at = self.pos;
        let value = self.varint(what)?;
        let shift = self.varint(what)?;
        if value >= FP_MOD || shift == 0 || shift >= FP_MOD {
            return Err(Error::parse(
                at,
                format!("fingerprint out of range ({what})"),
            ));
        }
        Ok(FpElem { value, shift })
    }
}

pub(super) fn deserialize(bytes: &[u8]) -> Result<BlockTree> {
    if bytes.len() < BTREE_MAGIC.len() || &bytes[..BTREE_MAGIC.len()] != BTREE_MAGIC {
        return Err(Error::parse(0, "bad magic, expected BTREE1"));
    }
    let mut r = Reader {
        bytes,
        pos: BTREE_MAGIC.len(),
    };
    let n = r.varint("text length")?;
    if n == 0 {
        return Err(Error::parse(r.pos, "empty text"));
    }
    let sigma = r.varint("alphabet size")?;
    if sigma == 0 || sigma > u64::from(u32::MAX) {
        return Err(Error::parse(r.pos, "alphabet size out of range"));
    }
    let tau = r.varint("tau")?;
    if !(2..=u64::from(u32::MAX)).contains(&tau) {
        return Err(Error::parse(r.pos, "tau out of range"));
    }
    let s = r.varint("s")?;
    let leaf_len = r.varint("leaf length")?;
    if s == 0 || leaf_len == 0 {
        return Err(Error::parse(r.pos, "s and leaf length must be positive"));
    }
    let has_fp = match r.byte("fingerprint flag")? {
        0 => false,
        1 => true,
        _ => return Err(Error::parse(r.pos - 1, "fingerprint flag must be 0 or 1")),
    };
    let fp_base = if has_fp {
        let base = r.varint("fingerprint base")?;
        if !(2..=FP_MOD - 2).contains(&base) {
            return Err(Error::parse(r.pos, "fingerprint base out of range"));
        }
        base
    } else {
        0
    };
    let level_count = r.varint("level count")? as usize;
    if level_count == 0 || level_count > 96 {
        return Err(Error::parse(r.pos, "level count out of range"));
    }

    // expected block length per level: leaf_len * tau^(levels-1-li), with
    // the top level minimal such that s * top >= n
    let mut expect_len = vec![0u64; level_count];
    expect_len[level_count - 1] = leaf_len;
    for li in (0..level_count - 1).rev() {
        expect_len[li] = expect_len[li + 1]
            .checked_mul(tau)
            .ok_or_else(|| Error::parse(r.pos, "block length overflows"))?;
    }
    let top_len = expect_len[0];
    if s.checked_mul(top_len).is_none_or(|pad| pad < n) {
        return Err(Error::parse(r.pos, "top level does not cover the text"));
    }
    if level_count > 1 && s.saturating_mul(top_len / tau) >= n {
        return Err(Error::parse(r.pos, "top level is not minimal"));
    }

    let mut levels: Vec<Level> = Vec::with_capacity(level_count);
    // starts of the level being decoded
    let mut starts: Vec<u64> = (0..s).map(|i| i * top_len).filter(|&st| st < n).collect();

    for li in 0..level_count {
        let len = expect_len[li];
        let at = r.pos;
        let got_len = r.varint("block length")?;
        if got_len != len {
            return Err(Error::parse(
                at,
                format!("level {li}: block length {got_len}, expected {len}"),
            ));
        }
        let count = r.varint("block count")? as usize;
        if count != starts.len() {
            return Err(Error::parse(
                r.pos,
                format!("level {li}: {count} blocks, expected {}", starts.len()),
            ));
        }
        if count > r.remaining() {
            return Err(Error::parse(r.pos, "block count exceeds input size"));
        }
        let is_leaf_level = li + 1 == level_count;
        let child_len = if is_leaf_level { 0 } else { expect_len[li + 1] };
        let mut next: Vec<u64> = Vec::new();
        let mut blocks: Vec<Block> = Vec::with_capacity(count);
        for bi in 0..count {
            let start = starts[bi];
            let present = (start + len).min(n) - start;
            let at = r.pos;
            let tag = r.byte("block tag")?;
            let kind = match tag {
                b'M' => {
                    if is_leaf_level {
                        return Err(Error::parse(at, "internal block at leaf level"));
                    }
                    let pair_marked = match r.varint("pair-marked flag")? {
                        0 => false,
                        1 => true,
                        other => {
                            return Err(Error::parse(
                                at,
                                format!("pair-marked flag must be 0 or 1, got {other}"),
                            ))
                        }
                    };
                    let children_len = r.varint("child count")?;
                    let expected = present.div_ceil(child_len);
                    if children_len != expected {
                        return Err(Error::parse(
                            at,
                            format!("block has {children_len} children, expected {expected}"),
                        ));
                    }
                    let children_start = next.len() as u32;
                    for c in 0..children_len {
                        next.push(start + c * child_len);
                    }
                    BlockKind::Internal {
                        children_start,
                        children_len: children_len as u32,
                        pair_marked,
                    }
                }
                b'U' => {
                    if is_leaf_level {
                        return Err(Error::parse(at, "pointer block at leaf level"));
                    }
                    let target = r.varint("pointer target")? as usize;
                    let offset = r.varint("pointer offset")?;
                    if target >= bi {
                        return Err(Error::parse(at, "pointer target not strictly earlier"));
                    }
                    if offset >= len {
                        return Err(Error::parse(at, "pointer offset outside target block"));
                    }
                    if start + len > n {
                        return Err(Error::parse(at, "pointer block is truncated"));
                    }
                    let t_start = starts[target];
                    if t_start + offset + len > n || t_start + offset >= start {
                        return Err(Error::parse(at, "pointer occurrence out of bounds"));
                    }
                    if !matches!(blocks[target].kind, BlockKind::Internal { .. }) {
                        return Err(Error::parse(at, "pointer target is not kept expanded"));
                    }
                    if offset > 0 {
                        let ok = target + 1 < bi
                            && starts[target + 1] == t_start + len
                            && matches!(blocks[target + 1].kind, BlockKind::Internal { .. });
                        if !ok {
                            return Err(Error::parse(at, "pointer spill target invalid"));
                        }
                    }
                    BlockKind::Pointer {
                        target: target as u32,
                        offset,
                        tail: FpElem::IDENTITY,
                    }
                }
                b'L' => {
                    if !is_leaf_level {
                        return Err(Error::parse(at, "leaf block above leaf level"));
                    }
                    let plen = r.varint("payload length")?;
                    if plen != present {
                        return Err(Error::parse(
                            at,
                            format!("payload length {plen}, expected {present}"),
                        ));
                    }
                    if plen as usize > r.remaining() + 1 {
                        return Err(Error::parse(at, "payload exceeds input size"));
                    }
                    let mut payload = Vec::with_capacity(plen as usize);
                    for _ in 0..plen {
                        let sym = r.varint("payload symbol")?;
                        if sym == 0 || sym > sigma {
                            return Err(Error::parse(at, "payload symbol outside alphabet"));
                        }
                        payload.push(sym as u32);
                    }
                    BlockKind::Leaf { payload }
                }
                other => return Err(Error::parse(at, format!("unknown block tag 0x{other:02x}"))),
            };
            blocks.push(Block {
                start,
                kind,
                phi: FpElem::IDENTITY,
                prefix: FpElem::IDENTITY,
            });
        }
        levels.push(Level {
            block_len: len,
            blocks,
        });
        starts = next;
    }
    if !starts.is_empty() {
        return Err(Error::parse(r.pos, "leaf level still announces children"));
    }

    if has_fp {
        for level in &mut levels {
            for b in &mut level.blocks {
                b.phi = r.fp_elem("block fingerprint")?;
                b.prefix = r.fp_elem("prefix fingerprint")?;
                if let BlockKind::Pointer { tail, .. } = &mut b.kind {
                    *tail = r.fp_elem("tail fingerprint")?;
                }
            }
        }
    }
    if r.pos != bytes.len() {
        return Err(Error::parse(r.pos, "trailing data after tree"));
    }

    Ok(BlockTree {
        n,
        sigma: sigma as u32,
        tau: tau as u32,
        s,
        leaf_len,
        fp_base,
        has_fp,
        levels,
    })
}
