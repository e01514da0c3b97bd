//! Attractor checking and exhaustive smallest-attractor search.
//!
//! A set of positions is an attractor if every distinct substring has at
//! least one occurrence whose span contains a position from the set.
//! Finding a smallest attractor is NP-complete, so the search here is a
//! guarded brute force over subsets by increasing cardinality.

use super::Text;
use crate::error::{Error, Result};
use std::collections::HashMap;

/// Maximum input length accepted by [`brute_smallest_attractor`].
pub const BRUTE_ATTRACTOR_MAX_LEN: usize = 16;

/// A smallest attractor: its size `gamma` and one witness position set
/// (0-based, sorted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttractorResult {
    pub gamma: usize,
    pub witness: Vec<usize>,
}

/// For every distinct substring, the set of positions covered by at least
/// one of its occurrences, as a bitmask. A position set is an attractor iff
/// it intersects every mask.
fn coverage_masks(text: &Text) -> Vec<u128> {
    let s = text.symbols();
    let n = s.len();
    assert!(n <= 128);
    let mut masks = Vec::new();
    let mut groups: HashMap<&[u32], u128> = HashMap::new();
    for len in 1..=n {
        groups.clear();
        for start in 0..=n - len {
            let span: u128 = ((1u128 << len) - 1) << start;
            *groups.entry(&s[start..start + len]).or_insert(0) |= span;
        }
        masks.extend(groups.values().copied());
    }
    masks
}

/// Whether `positions` (0-based) is an attractor of `text`.
pub fn is_attractor(text: &Text, positions: &[usize]) -> Result<bool> {
    if text.is_empty() {
        return Err(Error::invalid("empty text"));
    }
    let n = text.len();
    if let Some(&bad) = positions.iter().find(|&&p| p >= n) {
        return Err(Error::invalid(format!(
            "position {bad} out of range for length {n}"
        )));
    }
    if n <= 128 {
        let mut set: u128 = 0;
        for &p in positions {
            set |= 1u128 << p;
        }
        return Ok(coverage_masks(text).iter().all(|&m| m & set != 0));
    }
    // Large texts: same check without bitmasks. Positions sorted for a
    // binary-search range probe per occurrence.
    let mut sorted = positions.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let covers = |start: usize, len: usize| -> bool {
        let i = sorted.partition_point(|&p| p < start);
        i < sorted.len() && sorted[i] < start + len
    };
    let s = text.symbols();
    let mut groups: HashMap<&[u32], bool> = HashMap::new();
    for len in 1..=n {
        groups.clear();
        for start in 0..=n - len {
            let e = groups.entry(&s[start..start + len]).or_insert(false);
            *e = *e || covers(start, len);
        }
        if groups.values().any(|&ok| !ok) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exhaustive smallest attractor, iterating subsets by increasing
/// cardinality. Guarded to `n <= 16`.
pub fn brute_smallest_attractor(text: &Text) -> Result<AttractorResult> {
    if text.is_empty() {
        return Err(Error::invalid("empty text"));
    }
    let n = text.len();
    if n > BRUTE_ATTRACTOR_MAX_LEN {
        return Err(Error::OracleLimitExceeded(format!(
            "brute_smallest_attractor requires n <= {BRUTE_ATTRACTOR_MAX_LEN}, got {n}"
        )));
    }
    let masks: Vec<u32> = coverage_masks(text).iter().map(|&m| m as u32).collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    for card in 1..=n {
        // Gosper's hack: enumerate all n-bit subsets of the given popcount
        // in increasing numeric order.
        let mut set: u32 = (1u32 << card) - 1;
        loop {
            if masks.iter().all(|&m| m & set != 0) {
                let witness = (0..n).filter(|&p| set & (1 << p) != 0).collect();
                return Ok(AttractorResult {
                    gamma: card,
                    witness,
                });
            }
            // next subset with the same popcount
            let c = set & set.wrapping_neg();
            let r = set + c;
            set = (((r ^ set) >> 2) / c) | r;
            if set > full {
                break;
            }
        }
    }
    unreachable!("the full position set is always an attractor");
}
