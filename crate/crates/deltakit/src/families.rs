//! Generators for the string families used as corpora and oracles.
//!
//! The base family places `b` at power-of-two positions in an `a` stream;
//! variants perturb the placements within geometric windows, recolor the
//! `b`s, or join relabeled copies with fresh delimiters to hit a prescribed
//! measure exactly. Every composite generator measures its own output and
//! fails loudly if the target is missed, so family texts double as oracles.
//!
//! Construction parameters (choice positions, colors, permutations) follow
//! the 1-based conventions of the family definitions; generated `Text`
//! values are queried through the usual 0-based API.

use crate::error::{Error, Result};
use crate::textcore::{substring_complexity, Text};
use crate::util::{derive_seed, SplitMix64};

const A: u32 = 1;
const B: u32 = 2;

/// Positions of `b` in the base family: powers of two up to `n`, 1-based.
fn power_positions(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 1usize;
    while p <= n {
        out.push(p);
        match p.checked_mul(2) {
            Some(next) => p = next,
            None => break,
        }
    }
    out
}

/// Number of `b`s in the length-`n` base string: `floor(log2 n) + 1`.
pub fn b_count(n: usize) -> usize {
    power_positions(n).len()
}

/// The length-`n` prefix of the infinite string with `b` exactly at
/// power-of-two positions and `a` elsewhere.
pub fn gen_s(n: usize) -> Result<Text> {
    if n == 0 {
        return Err(Error::invalid("family strings must be non-empty"));
    }
    let mut syms = vec![A; n];
    for p in power_positions(n) {
        syms[p - 1] = B;
    }
    Text::new(syms, 2)
}

/// Placement windows of the perturbed family: the `j`th `b` (for `j >= 2`)
/// goes anywhere in `[2 * 4^(j-2) + 1, 4^(j-1)]`, clamped to `n`. Returns
/// the clamped windows as inclusive 1-based `(lo, hi)` pairs along with
/// whether each window is full (unclamped).
pub fn sp_windows(n: usize) -> Vec<(u64, u64, bool)> {
    let n = n as u64;
    let mut out = Vec::new();
    let mut width = 2u64; // 2 * 4^(j-2), starting at j = 2
    let mut hi = 4u64; // 4^(j-1)
    loop {
        let lo = hi - width + 1;
        if lo > n {
            break;
        }
        out.push((lo, hi.min(n), hi <= n));
        match (width.checked_mul(4), hi.checked_mul(4)) {
            (Some(w), Some(h)) => {
                width = w;
                hi = h;
            }
            _ => break,
        }
    }
    out
}

/// How the perturbed placements are chosen.
#[derive(Debug, Clone)]
pub enum SpChoice {
    /// Explicit 1-based positions, one per window of [`sp_windows`].
    Positions(Vec<u64>),
    /// Uniform draw per window.
    Seeded(u64),
}

/// A member of the perturbed family: first `b` at position 1, the `j`th
/// `b` within its window (windows cut by `n` are clamped; empty ones are
/// skipped).
pub fn gen_sp(n: usize, choice: &SpChoice) -> Result<Text> {
    if n == 0 {
        return Err(Error::invalid("family strings must be non-empty"));
    }
    let windows = sp_windows(n);
    let mut syms = vec![A; n];
    syms[0] = B;
    match choice {
        SpChoice::Positions(ps) => {
            if ps.len() != windows.len() {
                return Err(Error::invalid(format!(
                    "expected {} placement positions, got {}",
                    windows.len(),
                    ps.len()
                )));
            }
            for (&p, &(lo, hi, _)) in ps.iter().zip(&windows) {
                if p < lo || p > hi {
                    return Err(Error::invalid(format!(
                        "placement {p} outside window [{lo}, {hi}]"
                    )));
                }
                syms[(p - 1) as usize] = B;
            }
        }
        SpChoice::Seeded(seed) => {
            let mut rng = SplitMix64::new(derive_seed(*seed, 0x5350)); // "SP"
            for &(lo, hi, _) in &windows {
                let p = rng.next_in_range(lo, hi);
                syms[(p - 1) as usize] = B;
            }
        }
    }
    Text::new(syms, 2)
}

/// Exact `log2` of the number of distinct family members with all windows
/// full: each full window of width `2 * 4^(j-2)` contributes `2j - 3` bits.
pub fn sp_log2_family_size(n: usize) -> u64 {
    sp_windows(n)
        .iter()
        .enumerate()
        .filter(|(_, w)| w.2)
        .map(|(i, _)| 2 * (i as u64 + 2) - 3)
        .sum()
}

/// How recoloring is chosen.
#[derive(Debug, Clone)]
pub enum SrChoice {
    /// One color in `[1..=m]` per `b`, in position order.
    Colors(Vec<u32>),
    Seeded(u64),
}

/// The base string with its `j`th `b` replaced by the colored symbol
/// `b_{color[j]}`; alphabet `{a, b_1, ..., b_m}` coded as `a = 1`,
/// `b_r = 1 + r`.
pub fn gen_sr(n: usize, m: u32, choice: &SrChoice) -> Result<Text> {
    if n == 0 {
        return Err(Error::invalid("family strings must be non-empty"));
    }
    if m == 0 {
        return Err(Error::invalid("color count must be at least 1"));
    }
    let positions = power_positions(n);
    let colors: Vec<u32> = match choice {
        SrChoice::Colors(cs) => {
            if cs.len() != positions.len() {
                return Err(Error::invalid(format!(
                    "expected {} colors, got {}",
                    positions.len(),
                    cs.len()
                )));
            }
            if let Some(&bad) = cs.iter().find(|&&c| c == 0 || c > m) {
                return Err(Error::invalid(format!("color {bad} outside [1..={m}]")));
            }
            cs.clone()
        }
        SrChoice::Seeded(seed) => {
            let mut rng = SplitMix64::new(derive_seed(*seed, 0x5352)); // "SR"
            positions
                .iter()
                .map(|_| 1 + rng.next_below(u64::from(m)) as u32)
                .collect()
        }
    };
    let mut syms = vec![A; n];
    for (&p, &c) in positions.iter().zip(&colors) {
        syms[p - 1] = 1 + c;
    }
    Text::new(syms, m + 1)
}

// --- composites -------------------------------------------------------------

fn ceil_3n4(n: usize) -> u64 {
    (3 * n as u64).div_ceil(4)
}

/// `total` split into `m` near-equal parts (remainder distributed from the
/// left), each at least 3.
fn split_parts(total: usize, m: usize) -> Result<Vec<usize>> {
    if m == 0 || total < 3 * m {
        return Err(Error::invalid(format!(
            "cannot split {total} symbols into {m} parts of length >= 3"
        )));
    }
    let base = total / m;
    let rem = total % m;
    Ok((0..m).map(|i| base + usize::from(i < rem)).collect())
}

/// Decomposition used by the delimiter composites for a given target:
/// `(m, r, part_lengths)` where the target equals `3m - 1 + r`.
pub fn composite_parts(n: usize, delta_target: u64) -> Result<(usize, u32, Vec<usize>)> {
    let m = ((delta_target + 1) / 3) as usize;
    let r = ((delta_target + 1) % 3) as u32;
    let base_n = n
        .checked_sub(r as usize)
        .ok_or_else(|| Error::invalid("target exceeds text length"))?;
    let parts_total = base_n
        .checked_sub(m - 1)
        .ok_or_else(|| Error::invalid("text too short for this target"))?;
    let lens = split_parts(parts_total, m)?;
    Ok((m, r, lens))
}

fn measure_equals(text: &Text, target: u64, what: &str) -> Result<()> {
    let (num, den) = crate::textcore::delta(text)?;
    if (num, den) != (target, 1) {
        return Err(Error::Internal(format!(
            "{what}: measured delta {num}/{den}, target {target}"
        )));
    }
    Ok(())
}

/// Concatenates relabeled two-letter parts with fresh delimiters and `r`
/// appended delimiters. `make_part(i, len)` emits part `i` over `{1, 2}`;
/// parts are relabeled onto disjoint alphabets.
fn compose_disjoint(
    n: usize,
    m: usize,
    r: u32,
    lens: &[usize],
    mut make_part: impl FnMut(usize, usize) -> Result<Text>,
) -> Result<Text> {
    let m32 = m as u32;
    let mut syms = Vec::with_capacity(n);
    for (i, &len) in lens.iter().enumerate() {
        if i > 0 {
            syms.push(2 * m32 + i as u32); // delimiter between parts i-1 and i
        }
        let part = make_part(i, len)?;
        let (a_i, b_i) = (2 * i as u32 + 1, 2 * i as u32 + 2);
        syms.extend(
            part.symbols()
                .iter()
                .map(|&s| if s == A { a_i } else { b_i }),
        );
    }
    for j in 1..=r {
        syms.push(3 * m32 - 1 + j); // appended fresh delimiters
    }
    debug_assert_eq!(syms.len(), n);
    let sigma = 3 * m32 - 1 + r;
    Text::new(syms, sigma)
}

/// A length-`n` string with measure exactly `delta_target`, built from
/// relabeled base-family parts joined by fresh delimiters. These are the
/// witnesses separating the smallest attractor from the measure by a
/// logarithmic factor.
///
/// For targets of at least `ceil(3n/4)` the delimiter construction does
/// not apply and the permutation-tail family is produced instead.
pub fn gen_composite_gamma(n: usize, delta_target: u64) -> Result<Text> {
    if delta_target < 2 || delta_target > n as u64 {
        return Err(Error::invalid(format!(
            "target {delta_target} outside [2..={n}]"
        )));
    }
    if delta_target >= ceil_3n4(n) {
        return gen_perm_tail(n, delta_target, None);
    }
    let (m, r, lens) = composite_parts(n, delta_target)?;
    let text = compose_disjoint(n, m, r, &lens, |_, len| gen_s(len))?;
    measure_equals(&text, delta_target, "composite gamma")?;
    Ok(text)
}

/// Like [`gen_composite_gamma`] but with seeded perturbed-family parts, so
/// distinct seeds give distinct strings of identical length and measure.
pub fn gen_composite_entropy(n: usize, delta_target: u64, seed: u64) -> Result<Text> {
    if delta_target < 2 || delta_target > n as u64 {
        return Err(Error::invalid(format!(
            "target {delta_target} outside [2..={n}]"
        )));
    }
    if delta_target >= ceil_3n4(n) {
        return gen_perm_tail(n, delta_target, None);
    }
    let (m, r, lens) = composite_parts(n, delta_target)?;
    let text = compose_disjoint(n, m, r, &lens, |i, len| {
        gen_sp(len, &SpChoice::Seeded(derive_seed(seed, i as u64)))
    })?;
    measure_equals(&text, delta_target, "composite entropy")?;
    Ok(text)
}

/// A recolored composite of measure exactly `delta_target`: colored parts
/// over a shared alphabet joined by delimiters, an `a^(2m)` tail, and a
/// delimiter-padding pass that replaces tail symbols (last first) with
/// fresh delimiters until the measure reaches `3m - 1`.
pub fn gen_composite_sr(n: usize, delta_target: u64, choice: &SrChoice) -> Result<Text> {
    if delta_target < 2 || delta_target >= ceil_3n4(n) {
        return Err(Error::invalid(format!(
            "target {delta_target} outside [2, ceil(3n/4)) for n = {n}"
        )));
    }
    let m = ((delta_target + 1) / 3) as usize;
    let r = ((delta_target + 1) % 3) as u32;
    let m32 = m as u32;
    let base_n = n - r as usize;
    let parts_total = base_n
        .checked_sub((m - 1) + 2 * m)
        .ok_or_else(|| Error::invalid("text too short for this target"))?;
    let lens = split_parts(parts_total, m)?;

    // shared alphabet: a = 1, colored symbols 2..=m+1, separators m+1+j
    let mut explicit = match choice {
        SrChoice::Colors(cs) => {
            let want: usize = lens.iter().map(|&l| b_count(l)).sum();
            if cs.len() != want {
                return Err(Error::invalid(format!(
                    "expected {want} colors, got {}",
                    cs.len()
                )));
            }
            Some(cs.iter().copied())
        }
        SrChoice::Seeded(_) => None,
    };
    let mut syms = Vec::with_capacity(n);
    for (i, &len) in lens.iter().enumerate() {
        if i > 0 {
            syms.push(m32 + 1 + i as u32);
        }
        let part_choice = match (&mut explicit, choice) {
            (Some(iter), _) => SrChoice::Colors(iter.by_ref().take(b_count(len)).collect()),
            (None, SrChoice::Seeded(seed)) => SrChoice::Seeded(derive_seed(*seed, i as u64)),
            _ => unreachable!(),
        };
        let part = gen_sr(len, m32, &part_choice)?;
        syms.extend_from_slice(part.symbols());
    }
    syms.extend(std::iter::repeat_n(A, 2 * m));
    debug_assert_eq!(syms.len(), base_n);

    // Replace tail symbols with fresh delimiters, last position first,
    // until some length witnesses the target ratio. Terminates within
    // 2m - 2 replacements.
    let inner_target = 3 * m as u64 - 1;
    let mut next_fresh = 2 * m32 + 1;
    let mut steps = 0usize;
    loop {
        let sigma = syms.iter().copied().max().unwrap_or(1);
        let text = Text::new(syms.clone(), sigma)?;
        let profile = substring_complexity(&text)?;
        let reached = (1..=text.len()).any(|k| profile.d_at(k) >= inner_target * k as u64);
        if reached {
            measure_equals(&text, inner_target, "recolored composite (padding pass)")?;
            break;
        }
        if steps >= 2 * m - 1 {
            return Err(Error::Internal(
                "delimiter padding did not reach the target".into(),
            ));
        }
        syms[base_n - 1 - steps] = next_fresh;
        next_fresh += 1;
        steps += 1;
    }
    for j in 0..r {
        syms.push(next_fresh + j);
    }
    let sigma = syms.iter().copied().max().unwrap_or(1);
    let text = Text::new(syms, sigma)?;
    measure_equals(&text, delta_target, "recolored composite")?;
    Ok(text)
}

/// The permutation-tail family for large targets:
/// `$_{pi(1)} ... $_{pi(delta)}` followed by `n - delta` copies of
/// `$_{pi(delta)}`. Every length `k` has exactly `min(delta, n - k + 1)`
/// distinct substrings.
pub fn gen_perm_tail(n: usize, delta_target: u64, pi: Option<&[u32]>) -> Result<Text> {
    let d = delta_target;
    if n == 0 || d < 1 || d > n as u64 {
        return Err(Error::invalid(format!("target {d} outside [1..={n}]")));
    }
    if d < ceil_3n4(n) {
        return Err(Error::invalid(format!(
            "permutation-tail family needs a target of at least ceil(3n/4) = {}",
            ceil_3n4(n)
        )));
    }
    let perm: Vec<u32> = match pi {
        None => (1..=d as u32).collect(),
        Some(p) => {
            if p.len() != d as usize {
                return Err(Error::invalid(format!(
                    "permutation length {} != target {d}",
                    p.len()
                )));
            }
            let mut seen = vec![false; d as usize + 1];
            for &v in p {
                if v == 0 || u64::from(v) > d || std::mem::replace(&mut seen[v as usize], true) {
                    return Err(Error::invalid(format!("not a permutation of [1..={d}]")));
                }
            }
            p.to_vec()
        }
    };
    let mut syms = perm.clone();
    syms.extend(std::iter::repeat_n(perm[d as usize - 1], n - d as usize));
    let text = Text::new(syms, d as u32)?;
    let profile = substring_complexity(&text)?;
    for k in 1..=n {
        let want = d.min((n - k + 1) as u64);
        if profile.d_at(k) != want {
            return Err(Error::Internal(format!(
                "permutation tail: d_{k} = {}, expected {want}",
                profile.d_at(k)
            )));
        }
    }
    Ok(text)
}

// --- parameter bundle --------------------------------------------------------

/// Which family to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    S,
    Sp,
    Sr,
    CompositeGamma,
    CompositeEntropy,
    CompositeSr,
    PermTail,
}

/// Bundled generator parameters, as accepted by command-line front ends.
/// Explicit choice vectors are available through the per-family functions.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub n: usize,
    pub delta_target: Option<u64>,
    /// Color count for the recolored family.
    pub m: Option<u32>,
    pub seed: Option<u64>,
}

impl FamilySpec {
    pub fn generate(&self) -> Result<Text> {
        let need_delta = || {
            self.delta_target
                .ok_or_else(|| Error::invalid("this family requires a target measure"))
        };
        let seed = self.seed.unwrap_or(0);
        match self.kind {
            FamilyKind::S => gen_s(self.n),
            FamilyKind::Sp => gen_sp(self.n, &SpChoice::Seeded(seed)),
            FamilyKind::Sr => {
                let m = self.m.unwrap_or(2);
                gen_sr(self.n, m, &SrChoice::Seeded(seed))
            }
            FamilyKind::CompositeGamma => gen_composite_gamma(self.n, need_delta()?),
            FamilyKind::CompositeEntropy => gen_composite_entropy(self.n, need_delta()?, seed),
            FamilyKind::CompositeSr => {
                gen_composite_sr(self.n, need_delta()?, &SrChoice::Seeded(seed))
            }
            FamilyKind::PermTail => {
                let d = need_delta()?;
                if self.seed.is_some() {
                    let mut perm: Vec<u32> = (1..=d as u32).collect();
                    let mut rng = SplitMix64::new(derive_seed(seed, 0x5045)); // "PE"
                    for i in (1..perm.len()).rev() {
                        let j = rng.next_below(i as u64 + 1) as usize;
                        perm.swap(i, j);
                    }
                    gen_perm_tail(self.n, d, Some(&perm))
                } else {
                    gen_perm_tail(self.n, d, None)
                }
            }
        }
    }
}
