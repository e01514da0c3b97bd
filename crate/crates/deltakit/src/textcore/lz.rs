//! Self-referential Lempel-Ziv factorization via suffix array neighbors.

use super::sa::suffix_array;
use super::Text;
use crate::error::{Error, Result};

/// One phrase of the greedy left-to-right parse.
///
/// A phrase with a `source` is the longest prefix of the remaining suffix
/// that also occurs starting at some strictly earlier position (the
/// occurrence may overlap the phrase itself). A phrase without a source is a
/// single symbol seen for the first time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LzPhrase {
    pub start: usize,
    pub len: usize,
    pub source: Option<usize>,
}

/// Greedy LZ parse; `z` is the number of phrases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LzParse {
    pub phrases: Vec<LzPhrase>,
}

impl LzParse {
    pub fn z(&self) -> usize {
        self.phrases.len()
    }

    /// Re-derives the text from the parse, copying sourced phrases symbol by
    /// symbol so self-overlapping sources resolve. Fresh-symbol phrases take
    /// their literal from `text`. Errors if the parse does not tile the text
    /// or a copy diverges from it.
    pub fn reconstruct(&self, text: &Text) -> Result<Vec<u32>> {
        let mut out: Vec<u32> = Vec::with_capacity(text.len());
        for p in &self.phrases {
            if p.start != out.len() {
                return Err(Error::Internal(format!(
                    "phrase start {} does not continue the tiling at {}",
                    p.start,
                    out.len()
                )));
            }
            match p.source {
                None => {
                    if p.len != 1 {
                        return Err(Error::Internal("sourceless phrase of length != 1".into()));
                    }
                    out.push(text.symbols()[p.start]);
                }
                Some(src) => {
                    if src >= p.start {
                        return Err(Error::Internal("source does not precede phrase".into()));
                    }
                    for j in 0..p.len {
                        let sym = out[src + j];
                        out.push(sym);
                    }
                }
            }
        }
        if out != text.symbols() {
            return Err(Error::Internal("reconstruction mismatch".into()));
        }
        Ok(out)
    }
}

/// Computes the greedy parse: each phrase is the longest prefix of the
/// remaining suffix with an occurrence starting strictly earlier.
///
/// Uses the suffix array with previous/next-smaller-value tables: the best
/// earlier occurrence of a suffix is one of its two lexicographic neighbors
/// among earlier positions, and the naive prefix comparisons amortize to
/// `O(n)` over the whole parse.
pub fn lz_factorize(text: &Text) -> Result<LzParse> {
    text.check_measurable()?;
    let s = text.symbols();
    let n = s.len();
    let sa = suffix_array(s);

    let mut rank = vec![0u32; n];
    for (r, &p) in sa.iter().enumerate() {
        rank[p as usize] = r as u32;
    }

    // psv[r] / nsv[r]: text position of nearest suffix before/after rank r
    // (in SA order) that starts strictly earlier in the text.
    const NONE: u32 = u32::MAX;
    let mut psv = vec![NONE; n];
    let mut nsv = vec![NONE; n];
    let mut stack: Vec<u32> = Vec::new();
    for r in 0..n {
        while let Some(&top) = stack.last() {
            if top > sa[r] {
                stack.pop();
            } else {
                break;
            }
        }
        psv[r] = stack.last().copied().unwrap_or(NONE);
        stack.push(sa[r]);
    }
    stack.clear();
    for r in (0..n).rev() {
        while let Some(&top) = stack.last() {
            if top > sa[r] {
                stack.pop();
            } else {
                break;
            }
        }
        nsv[r] = stack.last().copied().unwrap_or(NONE);
        stack.push(sa[r]);
    }

    let match_len = |src: usize, pos: usize| -> usize {
        let mut l = 0;
        while pos + l < n && s[src + l] == s[pos + l] {
            l += 1;
        }
        l
    };

    let mut phrases = Vec::new();
    let mut pos = 0usize;
    while pos < n {
        let r = rank[pos] as usize;
        let mut best_len = 0usize;
        let mut best_src = None;
        for cand in [psv[r], nsv[r]] {
            if cand == NONE {
                continue;
            }
            let l = match_len(cand as usize, pos);
            if l > best_len {
                best_len = l;
                best_src = Some(cand as usize);
            }
        }
        if best_len == 0 {
            phrases.push(LzPhrase {
                start: pos,
                len: 1,
                source: None,
            });
            pos += 1;
        } else {
            phrases.push(LzPhrase {
                start: pos,
                len: best_len,
                source: best_src,
            });
            pos += best_len;
        }
    }
    Ok(LzParse { phrases })
}
