//! Suffix array (prefix-doubling) and LCP table (Kasai).

/// Suffix array of `s` by prefix doubling, `O(n log^2 n)`.
///
/// Works over arbitrary `u32` symbols; ranks are re-densified each round so
/// the alphabet size never matters.
pub fn suffix_array(s: &[u32]) -> Vec<u32> {
    let n = s.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![0];
    }

    // initial ranks = dense symbol codes
    let mut rank: Vec<u32> = {
        let mut sorted: Vec<u32> = s.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        s.iter()
            .map(|sym| sorted.binary_search(sym).unwrap() as u32)
            .collect()
    };

    let mut sa: Vec<u32> = (0..n as u32).collect();
    let mut tmp = vec![0u32; n];
    let mut k = 1usize;
    loop {
        let key = |i: u32| -> u64 {
            let i = i as usize;
            let hi = rank[i] as u64;
            let lo = if i + k < n { rank[i + k] as u64 + 1 } else { 0 };
            (hi << 32) | lo
        };
        sa.sort_unstable_by_key(|&i| key(i));

        tmp[sa[0] as usize] = 0;
        for r in 1..n {
            let inc = u32::from(key(sa[r]) != key(sa[r - 1]));
            tmp[sa[r] as usize] = tmp[sa[r - 1] as usize] + inc;
        }
        rank.copy_from_slice(&tmp);
        if rank[sa[n - 1] as usize] as usize == n - 1 {
            return sa;
        }
        k *= 2;
    }
}

/// LCP table for `s` and its suffix array: `lcp[r]` is the length of the
/// longest common prefix of the suffixes at ranks `r - 1` and `r`
/// (`lcp[0] = 0`). Kasai's algorithm, `O(n)`.
pub fn lcp_array(s: &[u32], sa: &[u32]) -> Vec<u32> {
    let n = s.len();
    let mut rank = vec![0u32; n];
    for (r, &p) in sa.iter().enumerate() {
        rank[p as usize] = r as u32;
    }
    let mut lcp = vec![0u32; n];
    let mut k = 0usize;
    for i in 0..n {
        let r = rank[i] as usize;
        if r == 0 {
            k = 0;
            continue;
        }
        let j = sa[r - 1] as usize;
        while i + k < n && j + k < n && s[i + k] == s[j + k] {
            k += 1;
        }
        lcp[r] = k as u32;
        k = k.saturating_sub(1);
    }
    lcp
}
