//! Binary grammar format.
//!
//! Layout: the magic `RLSLP1`, then varints `n`, `sigma`, `symbol count`,
//! `start id`, then one record per symbol in table order. Each record is a
//! tag byte `T`/`P`/`R` followed by varint payload: terminal symbol value,
//! pair child ids, or run base id and exponent. All varints are
//! little-endian LEB128. Decoding is strict: topological order, dedup,
//! exponent and alphabet ranges, and the start length are all enforced, and
//! trailing bytes are rejected.

use super::{Rlslp, SymbolDef, SymbolTable};
use crate::error::{Error, Result};
use crate::util::{read_varint, write_varint};

pub const RLSLP_MAGIC: &[u8; 6] = b"RLSLP1";

pub(super) fn serialize(g: &Rlslp) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(RLSLP_MAGIC);
    write_varint(&mut out, g.source_len());
    write_varint(&mut out, u64::from(g.sigma()));
    write_varint(&mut out, g.symbol_count() as u64);
    write_varint(&mut out, u64::from(g.start()));
    for def in g.table().defs() {
        match *def {
            SymbolDef::Terminal(sym) => {
                out.push(b'T');
                write_varint(&mut out, u64::from(sym));
            }
            SymbolDef::Pair(a, b) => {
                out.push(b'P');
                write_varint(&mut out, u64::from(a));
                write_varint(&mut out, u64::from(b));
            }
            SymbolDef::Run(base, exp) => {
                out.push(b'R');
                write_varint(&mut out, u64::from(base));
                write_varint(&mut out, exp);
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
}

pub(super) fn deserialize(bytes: &[u8]) -> Result<Rlslp> {
    if bytes.len() < RLSLP_MAGIC.len() || &bytes[..RLSLP_MAGIC.len()] != RLSLP_MAGIC {
        return Err(Error::parse(0, "bad magic, expected RLSLP1"));
    }
    let mut r = Reader {
        bytes,
        pos: RLSLP_MAGIC.len(),
    };
    let n = r.varint("text length")?;
    let sigma = r.varint("alphabet size")?;
    if sigma == 0 || sigma > u64::from(u32::MAX) {
        return Err(Error::parse(
            r.pos,
            format!("alphabet size {sigma} out of range"),
        ));
    }
    let sigma = sigma as u32;
    let count = r.varint("symbol count")?;
    if count == 0 {
        return Err(Error::parse(r.pos, "empty symbol table"));
    }
    if count > u64::from(u32::MAX) || count > bytes.len() as u64 {
        // each record takes at least 2 bytes, so `count` can never
        // legitimately exceed the input size
        return Err(Error::parse(
            r.pos,
            format!("implausible symbol count {count}"),
        ));
    }
    let start = r.varint("start id")?;
    if start >= count {
        return Err(Error::parse(
            r.pos,
            format!("start id {start} out of range (count {count})"),
        ));
    }

    let mut table = SymbolTable::new();
    for id in 0..count {
        let record_at = r.pos;
        let tag = r.byte("record tag")?;
        let def = match tag {
            b'T' => {
                let sym = r.varint("terminal symbol")?;
                if sym == 0 || sym > u64::from(sigma) {
                    return Err(Error::parse(
                        record_at,
                        format!("terminal symbol {sym} outside alphabet [1..={sigma}]"),
                    ));
                }
                SymbolDef::Terminal(sym as u32)
            }
            b'P' => {
                let a = r.varint("pair left")?;
                let b = r.varint("pair right")?;
                if a >= id || b >= id {
                    return Err(Error::parse(
                        record_at,
                        format!("pair {id} references non-preceding symbol"),
                    ));
                }
                SymbolDef::Pair(a as u32, b as u32)
            }
            b'R' => {
                let base = r.varint("run base")?;
                let exp = r.varint("run exponent")?;
                if base >= id {
                    return Err(Error::parse(
                        record_at,
                        format!("run {id} references non-preceding symbol"),
                    ));
                }
                if exp < 2 {
                    return Err(Error::parse(record_at, format!("run exponent {exp} < 2")));
                }
                SymbolDef::Run(base as u32, exp)
            }
            other => {
                return Err(Error::parse(
                    record_at,
                    format!("unknown record tag 0x{other:02x}"),
                ));
            }
        };
        let before = table.len();
        let interned = table
            .intern(def)
            .map_err(|e| Error::parse(record_at, e.to_string()))?;
        if table.len() == before {
            return Err(Error::parse(
                record_at,
                format!("duplicate definition (symbols {interned} and {id})"),
            ));
        }
    }
    if r.pos != bytes.len() {
        return Err(Error::parse(r.pos, "trailing data after symbol records"));
    }

    let start = start as u32;
    if table.exp_len(start) != n {
        return Err(Error::parse(
            r.pos,
            format!(
                "start symbol expands to {} symbols, header says {n}",
                table.exp_len(start)
            ),
        ));
    }
    // no dead symbols: everything must be reachable from the start
    let mut reachable = vec![false; table.len()];
    let mut stack = vec![start];
    while let Some(id) = stack.pop() {
        if std::mem::replace(&mut reachable[id as usize], true) {
            continue;
        }
        match table.def(id) {
            SymbolDef::Terminal(_) => {}
            SymbolDef::Pair(a, b) => {
                stack.push(a);
                stack.push(b);
            }
            SymbolDef::Run(b, _) => stack.push(b),
        }
    }
    if let Some(dead) = reachable.iter().position(|&x| !x) {
        return Err(Error::parse(
            r.pos,
            format!("symbol {dead} unreachable from start"),
        ));
    }
    Rlslp::new(table, start, sigma, None)
}
