//! Shared helpers for the integration suites.
#![allow(dead_code)]

use deltakit::{SplitMix64, Text};

/// Maps 'a'..='z' to symbols 1..=26.
pub fn text_of(s: &str) -> Text {
    let syms: Vec<u32> = s
        .bytes()
        .map(|b| {
            assert!(b.is_ascii_lowercase());
            u32::from(b - b'a') + 1
        })
        .collect();
    Text::new(syms, 26).unwrap()
}

pub fn random_text(rng: &mut SplitMix64, n: usize, sigma: u32) -> Text {
    let syms: Vec<u32> = (0..n)
        .map(|_| 1 + rng.next_below(u64::from(sigma)) as u32)
        .collect();
    Text::new(syms, sigma).unwrap()
}

/// Every binary string of each length in `1..=max_n`.
pub fn exhaustive_binary_upto(max_n: usize) -> Vec<Text> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for bits in 0..(1u64 << n) {
            let syms: Vec<u32> = (0..n).map(|i| 1 + ((bits >> i) & 1) as u32).collect();
            out.push(Text::new(syms, 2).unwrap());
        }
    }
    out
}

/// Every binary string of exactly length `n`.
pub fn exhaustive_binary_exact(n: usize) -> Vec<Text> {
    (0..(1u64 << n))
        .map(|bits| {
            let syms: Vec<u32> = (0..n).map(|i| 1 + ((bits >> i) & 1) as u32).collect();
            Text::new(syms, 2).unwrap()
        })
        .collect()
}

/// A mixed corpus of family, random, and structured texts, used by the
/// round-trip and verification suites. `scale` is the largest text length.
pub fn mixed_corpus(scale: usize) -> Vec<(String, Text)> {
    use deltakit::families::*;
    let mut rng = SplitMix64::new(0xC0FFEE);
    let mut out: Vec<(String, Text)> = Vec::new();

    for n in [5usize, 64, 1000, 1 << 14] {
        if n <= scale {
            out.push((format!("s-{n}"), gen_s(n).unwrap()));
        }
    }
    if scale >= 4096 {
        out.push((
            "sp-4096".into(),
            gen_sp(4096, &SpChoice::Seeded(1)).unwrap(),
        ));
        out.push((
            "sr-4096".into(),
            gen_sr(4096, 3, &SrChoice::Seeded(2)).unwrap(),
        ));
    }
    for (n, d) in [(60usize, 5u64), (500, 8), (4096, 11)] {
        if n <= scale {
            out.push((format!("gamma-{n}-{d}"), gen_composite_gamma(n, d).unwrap()));
            out.push((
                format!("entropy-{n}-{d}"),
                gen_composite_entropy(n, d, 7).unwrap(),
            ));
            out.push((
                format!("srcomp-{n}-{d}"),
                gen_composite_sr(n, d, &SrChoice::Seeded(5)).unwrap(),
            ));
        }
    }
    if scale >= 64 {
        out.push(("perm-64".into(), gen_perm_tail(64, 50, None).unwrap()));
    }

    for (n, sigma) in [(10usize, 2u32), (100, 2), (1000, 4), (10_000, 8)] {
        if n <= scale {
            out.push((
                format!("random-{n}-{sigma}"),
                random_text(&mut rng, n, sigma),
            ));
        }
    }
    if scale >= 100_000 {
        out.push(("random-100000-2".into(), random_text(&mut rng, 100_000, 2)));
    }
    if scale >= 1_000_000 {
        out.push((
            "random-1000000-2".into(),
            random_text(&mut rng, 1_000_000, 2),
        ));
        out.push(("s-1000000".into(), gen_s(1_000_000).unwrap()));
    }

    if scale >= 1000 {
        out.push(("unary-1000".into(), Text::new(vec![1; 1000], 1).unwrap()));
        out.push((
            "periodic-1000".into(),
            Text::new((0..1000).map(|i| 1 + (i % 2) as u32).collect(), 2).unwrap(),
        ));
        out.push((
            "distinct-1000".into(),
            Text::new((1..=1000).collect(), 1000).unwrap(),
        ));
    }
    out
}

/// The proof-backed phrase-count bound: `z <= 4 (delta log2(n/delta) + delta)`.
pub fn z_bound(n: usize, delta_num: u64, delta_den: u64) -> f64 {
    let delta = delta_num as f64 / delta_den as f64;
    let ratio = (n as f64 / delta).max(1.0);
    4.0 * (delta * ratio.log2() + delta)
}

/// Checks that fragments of a round string with equal expansions are equal
/// symbol sequences. Returns a description of the first violation.
pub fn fragment_consistency_violation(
    grammar: &deltakit::rlslp::Rlslp,
    string: &[deltakit::rlslp::SymbolId],
    round: u32,
) -> Option<String> {
    use std::collections::HashMap;
    let mut expansions: HashMap<u32, Vec<u32>> = HashMap::new();
    for &id in string {
        expansions
            .entry(id)
            .or_insert_with(|| grammar.table().expand_seq(&[id]));
    }
    let mut groups: HashMap<Vec<u32>, &[u32]> = HashMap::new();
    for i in 0..string.len() {
        let mut acc: Vec<u32> = Vec::new();
        for j in i..string.len() {
            acc.extend_from_slice(&expansions[&string[j]]);
            match groups.entry(acc.clone()) {
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(&string[i..=j]);
                }
                std::collections::hash_map::Entry::Occupied(e) => {
                    if *e.get() != &string[i..=j] {
                        return Some(format!(
                            "round {round}: fragments {:?} and {:?} share expansion {acc:?}",
                            e.get(),
                            &string[i..=j]
                        ));
                    }
                }
            }
        }
    }
    None
}

/// Prints the per-criterion verdict line and panics on failure.
pub fn conclude(criterion: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("{criterion}: PASS");
    } else {
        println!("{criterion}: FAIL ({} problem(s))", failures.len());
        for f in failures.iter().take(10) {
            println!("  - {f}");
        }
        panic!("{criterion} failed");
    }
}
