//! Text representation and repetitiveness measures: substring complexity and
//! the measure delta, Lempel-Ziv factorization, smallest period, and
//! brute-force oracles (distinct-substring counts, smallest attractor).
//!
//! All positions and ranges in this API are 0-based and half-open.

mod attractor;
mod lz;
mod sa;

pub use attractor::{
    brute_smallest_attractor, is_attractor, AttractorResult, BRUTE_ATTRACTOR_MAX_LEN,
};
pub use lz::{lz_factorize, LzParse, LzPhrase};
pub use sa::{lcp_array, suffix_array};

use crate::error::{Error, Result};
use std::collections::HashSet;

/// Maximum input length accepted by [`brute_distinct_count`].
pub const BRUTE_DISTINCT_MAX_LEN: usize = 5000;

/// An immutable sequence of symbols over the alphabet `[1..=sigma]`.
///
/// Symbol value 0 is reserved as invalid, so raw byte inputs map one byte to
/// one symbol with no shifting. Alphabets larger than 255 (used by the
/// generated string families) are represented directly as `u32` code points.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Text {
    syms: Vec<u32>,
    sigma: u32,
}

impl Text {
    /// Wraps a symbol sequence with a declared alphabet size.
    pub fn new(syms: Vec<u32>, sigma: u32) -> Result<Self> {
        if sigma == 0 {
            return Err(Error::invalid("alphabet size must be at least 1"));
        }
        if let Some(&bad) = syms.iter().find(|&&s| s == 0 || s > sigma) {
            return Err(Error::invalid(format!(
                "symbol {bad} outside alphabet [1..={sigma}]"
            )));
        }
        Ok(Text { syms, sigma })
    }

    /// Interprets each byte as one symbol; the alphabet size is the largest
    /// byte value present. Zero bytes are rejected.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.contains(&0) {
            return Err(Error::invalid("byte 0 is not a valid symbol"));
        }
        let sigma = u32::from(bytes.iter().copied().max().unwrap_or(1));
        let syms = bytes.iter().map(|&b| u32::from(b)).collect();
        Ok(Text { syms, sigma })
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    /// Declared alphabet size (symbols range over `[1..=sigma]`).
    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn symbols(&self) -> &[u32] {
        &self.syms
    }

    /// Number of distinct symbols actually present.
    pub fn distinct_symbols(&self) -> usize {
        self.syms.iter().collect::<HashSet<_>>().len()
    }

    pub(crate) fn check_measurable(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::invalid("empty text"));
        }
        // The linear-time measures assume a polynomially bounded alphabet;
        // byte alphabets are always fine, larger ones must not exceed n.
        if u64::from(self.sigma) > (self.len() as u64).max(255) {
            return Err(Error::invalid(format!(
                "alphabet size {} exceeds text length {}",
                self.sigma,
                self.len()
            )));
        }
        Ok(())
    }
}

/// Distinct-substring counts `d[k]` for every length `k`, together with the
/// maximizing ratio `delta = max_k d_k / k`.
///
/// `d` is indexed so that `d[k - 1]` is the number of distinct length-`k`
/// substrings. Among maximizing `k`, the smallest is reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstringComplexityProfile {
    pub d: Vec<u64>,
    pub delta_num: u64,
    pub delta_den: u64,
}

impl SubstringComplexityProfile {
    /// `delta` as a floating-point value.
    pub fn delta_real(&self) -> f64 {
        self.delta_num as f64 / self.delta_den as f64
    }

    /// Smallest integer at least `delta`.
    pub fn delta_ceil(&self) -> u64 {
        self.delta_num.div_ceil(self.delta_den)
    }

    /// Distinct substring count for length `k` (1-based length).
    pub fn d_at(&self, k: usize) -> u64 {
        self.d[k - 1]
    }
}

/// Computes the full substring-complexity profile of `text`.
///
/// Uses the suffix array and LCP table: for each `k` there are `n - k + 1`
/// substrings of length `k`, of which one per LCP entry `>= k` is a repeat,
/// so `d_k = (n - k + 1) - #{r : lcp[r] >= k}`, evaluated with a histogram
/// and a suffix sum.
pub fn substring_complexity(text: &Text) -> Result<SubstringComplexityProfile> {
    text.check_measurable()?;
    let n = text.len();
    let sa = suffix_array(text.symbols());
    let lcp = lcp_array(text.symbols(), &sa);

    let mut lcp_hist = vec![0u64; n + 1];
    for &l in lcp.iter().skip(1) {
        lcp_hist[(l as usize).min(n)] += 1;
    }
    // lcp_ge[k] = number of LCP entries >= k
    let mut lcp_ge = 0u64;
    let mut d = vec![0u64; n];
    for k in (1..=n).rev() {
        lcp_ge += lcp_hist[k];
        d[k - 1] = (n - k + 1) as u64 - lcp_ge;
    }

    let (mut num, mut den) = (0u64, 1u64);
    for k in 1..=n {
        // d[k-1]/k > num/den, exact integer comparison
        if d[k - 1] as u128 * den as u128 > num as u128 * k as u128 {
            num = d[k - 1];
            den = k as u64;
        }
    }
    Ok(SubstringComplexityProfile {
        d,
        delta_num: num,
        delta_den: den,
    })
}

/// The measure `delta` as an exact rational `(d_k, k)`, smallest `k` among
/// maximizers.
pub fn delta(text: &Text) -> Result<(u64, u64)> {
    let p = substring_complexity(text)?;
    Ok((p.delta_num, p.delta_den))
}

/// Exact number of distinct length-`k` substrings by direct enumeration.
///
/// Independent of the suffix-array path; guarded to `n <= 5000`.
pub fn brute_distinct_count(text: &Text, k: usize) -> Result<u64> {
    text.check_measurable()?;
    let n = text.len();
    if n > BRUTE_DISTINCT_MAX_LEN {
        return Err(Error::OracleLimitExceeded(format!(
            "brute_distinct_count requires n <= {BRUTE_DISTINCT_MAX_LEN}, got {n}"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!("length {k} outside [1..={n}]")));
    }
    let mut seen: HashSet<&[u32]> = HashSet::new();
    for w in text.symbols().windows(k) {
        seen.insert(w);
    }
    Ok(seen.len() as u64)
}

/// Smallest period of `text`: the least `p >= 1` such that
/// `text[p..] == text[..n-p]`. Computed from the KMP failure function.
pub fn smallest_period(text: &Text) -> Result<usize> {
    text.check_measurable()?;
    Ok(period_of_slice(text.symbols()))
}

/// [`smallest_period`] on a raw non-empty symbol slice.
pub(crate) fn period_of_slice(s: &[u32]) -> usize {
    let n = s.len();
    debug_assert!(n > 0);
    let mut fail = vec![0usize; n];
    let mut k = 0usize;
    for i in 1..n {
        while k > 0 && s[i] != s[k] {
            k = fail[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        fail[i] = k;
    }
    n - fail[n - 1]
}
