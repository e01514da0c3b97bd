//! Acceptance suite. Each test pins one shipping criterion at its stated
//! tolerance and prints a PASS/FAIL line (visible with `--nocapture`):
//!
//! ```text
//! cargo test -p deltakit --test acceptance -- --nocapture
//! ```
//!
//! The criteria cover: profile/oracle equivalence, the attractor lower
//! bound, family measure values, the phrase-count bound, grammar
//! round-trips, per-round structural and statistical invariants, the
//! run-rule period law, grammar size scaling, the retry wrapper, block
//! tree access and marked-block bounds, fingerprints, and serialization.

mod common;

use common::{
    conclude, exhaustive_binary_exact, exhaustive_binary_upto, fragment_consistency_violation,
    mixed_corpus, random_text, z_bound,
};
use deltakit::blocktree::{BlockTree, BlockTreeConfig, FpElem, FpPrefix, KarpRabin, FP_MOD};
use deltakit::families::*;
use deltakit::recompression::{
    build_grammar_once, build_grammar_with_stats, default_size_budget, ell, threshold_test,
    RoundKind, DEFAULT_BUDGET_C0,
};
use deltakit::rlslp::Rlslp;
use deltakit::textcore::{
    brute_distinct_count, brute_smallest_attractor, lz_factorize, substring_complexity,
};
use deltakit::{SplitMix64, Text};

/// Family strings used by several criteria, capped at `max_n`.
fn family_fixtures(max_n: usize) -> Vec<(String, Text)> {
    let mut out: Vec<(String, Text)> = Vec::new();
    for n in 1..=max_n.min(15) {
        out.push((format!("s-{n}"), gen_s(n).unwrap()));
        for seed in [1u64, 2] {
            out.push((
                format!("sp-{n}-{seed}"),
                gen_sp(n, &SpChoice::Seeded(seed)).unwrap(),
            ));
        }
        for m in [1u32, 2, 3] {
            out.push((
                format!("sr-{n}-{m}"),
                gen_sr(n, m, &SrChoice::Seeded(9)).unwrap(),
            ));
        }
        for d in 2..=n as u64 {
            if let Ok(t) = gen_composite_gamma(n, d) {
                out.push((format!("gamma-{n}-{d}"), t));
            }
            if let Ok(t) = gen_composite_entropy(n, d, 5) {
                out.push((format!("entropy-{n}-{d}"), t));
            }
            if let Ok(t) = gen_composite_sr(n, d, &SrChoice::Seeded(5)) {
                out.push((format!("srcomp-{n}-{d}"), t));
            }
            if let Ok(t) = gen_perm_tail(n, d, None) {
                out.push((format!("perm-{n}-{d}"), t));
            }
        }
    }
    out
}

#[test]
fn criterion_01_profile_matches_brute_oracle() {
    let mut failures = Vec::new();
    for t in exhaustive_binary_exact(12) {
        let p = substring_complexity(&t).unwrap();
        for k in 1..=12 {
            if p.d_at(k) != brute_distinct_count(&t, k).unwrap() {
                failures.push(format!("binary {:?} at k={k}", t.symbols()));
            }
        }
    }
    let mut rng = SplitMix64::new(0xACC01);
    for trial in 0..200 {
        let n = 1 + rng.next_below(200) as usize;
        let sigma = 1 + rng.next_below(8) as u32;
        let t = random_text(&mut rng, n, sigma);
        let p = substring_complexity(&t).unwrap();
        for k in 1..=n {
            if p.d_at(k) != brute_distinct_count(&t, k).unwrap() {
                failures.push(format!("random trial {trial} n={n} k={k}"));
            }
        }
    }
    conclude("criterion 01 (profile vs brute oracle)", failures);
}

#[test]
fn criterion_02_measure_bounded_by_attractor() {
    let mut failures = Vec::new();
    let mut check = |name: String, t: &Text| {
        if t.len() > 16 {
            return;
        }
        let p = substring_complexity(t).unwrap();
        let gamma = brute_smallest_attractor(t).unwrap().gamma as u64;
        if p.delta_ceil() > gamma {
            failures.push(format!(
                "{name}: ceil(delta) {} > gamma {gamma}",
                p.delta_ceil()
            ));
        }
    };
    for (i, t) in exhaustive_binary_upto(10).into_iter().enumerate() {
        check(format!("binary #{i}"), &t);
    }
    for (name, t) in family_fixtures(15) {
        check(name, &t);
    }
    conclude("criterion 02 (measure <= smallest attractor)", failures);
}

#[test]
fn criterion_03_family_measure_values() {
    let mut failures = Vec::new();
    // 20 sample points of the base family across [3, 2^16]
    let points: Vec<usize> = (0..20).map(|i| 3 + i * ((1 << 16) - 3) / 19).collect();
    for n in points {
        let t = gen_s(n).unwrap();
        let p = substring_complexity(&t).unwrap();
        if (p.delta_num, p.delta_den) != (2, 1) {
            failures.push(format!(
                "base family n={n}: {}/{}",
                p.delta_num, p.delta_den
            ));
        }
    }
    for n in [4usize, 8, 12, 15, 16] {
        let t = gen_s(n).unwrap();
        let gamma = brute_smallest_attractor(&t).unwrap().gamma as u32;
        if 2 * gamma < n.ilog2() {
            failures.push(format!(
                "base family n={n}: gamma {gamma} < {}/2",
                n.ilog2()
            ));
        }
    }
    // 30 (n, target) pairs per composite generator; the generators verify
    // their own measure, so any miss surfaces as an error
    let pairs: Vec<(usize, u64)> = vec![
        (20, 2),
        (20, 3),
        (20, 4),
        (25, 5),
        (30, 6),
        (31, 5),
        (40, 7),
        (40, 8),
        (50, 9),
        (60, 10),
        (64, 2),
        (64, 11),
        (100, 12),
        (100, 3),
        (128, 14),
        (200, 17),
        (256, 20),
        (300, 23),
        (400, 26),
        (500, 29),
        (512, 2),
        (600, 32),
        (700, 35),
        (800, 38),
        (900, 41),
        (1000, 44),
        (1024, 47),
        (2000, 50),
        (3000, 53),
        (4096, 56),
    ];
    assert_eq!(pairs.len(), 30);
    for &(n, d) in &pairs {
        for (name, result) in [
            ("gamma", gen_composite_gamma(n, d)),
            ("entropy", gen_composite_entropy(n, d, 7)),
        ] {
            match result {
                Ok(t) => {
                    let p = substring_complexity(&t).unwrap();
                    if (p.delta_num, p.delta_den) != (d, 1) {
                        failures.push(format!("{name} n={n} d={d}: wrong measure"));
                    }
                }
                Err(e) => failures.push(format!("{name} n={n} d={d}: {e}")),
            }
        }
        // the recolored composite needs room for its tail
        match gen_composite_sr(n, d, &SrChoice::Seeded(3)) {
            Ok(t) => {
                let p = substring_complexity(&t).unwrap();
                if (p.delta_num, p.delta_den) != (d, 1) {
                    failures.push(format!("sr-comp n={n} d={d}: wrong measure"));
                }
            }
            Err(deltakit::Error::InvalidInput(_)) => {}
            Err(e) => failures.push(format!("sr-comp n={n} d={d}: {e}")),
        }
    }
    conclude("criterion 03 (family measure values)", failures);
}

#[test]
fn criterion_04_phrase_count_bound() {
    let mut failures = Vec::new();
    for (name, t) in mixed_corpus(1_000_000) {
        let p = substring_complexity(&t).unwrap();
        let parse = lz_factorize(&t).unwrap();
        let bound = z_bound(t.len(), p.delta_num, p.delta_den);
        if (parse.z() as f64) > bound {
            failures.push(format!("{name}: z={} > {bound:.2}", parse.z()));
        }
    }
    conclude("criterion 04 (phrase-count bound)", failures);
}

#[test]
fn criterion_05_grammar_roundtrip() {
    let mut failures = Vec::new();
    let mut check = |name: &str, t: &Text| {
        for seed in [1u64, 2, 3] {
            match build_grammar_once(t, seed, false) {
                Ok((g, _)) => {
                    if g.expand().symbols() != t.symbols() {
                        failures.push(format!("{name} seed {seed}: expansion differs"));
                    }
                }
                Err(e) => failures.push(format!("{name} seed {seed}: {e}")),
            }
        }
    };
    for (i, t) in exhaustive_binary_upto(12).into_iter().enumerate() {
        check(&format!("binary #{i}"), &t);
    }
    let mut rng = SplitMix64::new(0xACC05);
    for trial in 0..50 {
        // log-uniform lengths up to 10^6
        let exp = rng.next_below(20) as i32;
        let n = ((1u64 << exp) + rng.next_below(1 << exp)) as usize;
        let t = random_text(&mut rng, n.min(1_000_000), 2);
        check(&format!("random trial {trial} n={n}"), &t);
    }
    for (name, t) in mixed_corpus(100_000) {
        check(&name, &t);
    }
    conclude("criterion 05 (grammar round-trip)", failures);
}

#[test]
fn criterion_06_round_structure_invariants() {
    let mut failures = Vec::new();
    let mut texts: Vec<(String, Text)> = exhaustive_binary_upto(10)
        .into_iter()
        .enumerate()
        .map(|(i, t)| (format!("binary #{i}"), t))
        .collect();
    let mut rng = SplitMix64::new(0xACC06);
    for trial in 0..200 {
        let n = 1 + rng.next_below(64) as usize;
        let sigma = 1 + rng.next_below(4) as u32;
        texts.push((
            format!("random trial {trial} n={n}"),
            random_text(&mut rng, n, sigma),
        ));
    }
    for (name, t) in &texts {
        let (g, trace) = build_grammar_once(t, 0xFEED, true).unwrap();
        for round in &trace.rounds {
            if let Some(v) = fragment_consistency_violation(&g, &round.string, round.k) {
                failures.push(format!("{name}: {v}"));
            }
            if round.kind == RoundKind::RunLength {
                let s = &round.string;
                for j in 0..s.len().saturating_sub(1) {
                    if s[j] == s[j + 1] && threshold_test(g.table().exp_len(s[j]), round.k + 1) {
                        failures.push(format!(
                            "{name}: adjacent equal compressible symbols after round {}",
                            round.k
                        ));
                    }
                }
            }
        }
    }
    conclude("criterion 06 (round structure invariants)", failures);
}

#[test]
fn criterion_07_expected_round_lengths() {
    let mut failures = Vec::new();
    let trials = 30usize;
    for n in [1_000usize, 10_000, 100_000] {
        let mut rng = SplitMix64::new(0xACC07 + n as u64);
        let text = random_text(&mut rng, n, 2);
        let lens: Vec<Vec<usize>> = (0..trials)
            .map(|i| {
                let (_, trace) = build_grammar_once(&text, 1000 + i as u64, false).unwrap();
                trace.round_lens().into_iter().map(|(_, l)| l).collect()
            })
            .collect();
        let rounds = lens.iter().map(|l| l.len()).max().unwrap();
        for k in 0..rounds {
            // runs that already collapsed stay at length 1
            let samples: Vec<f64> = lens
                .iter()
                .map(|l| *l.get(k).unwrap_or(&1) as f64)
                .collect();
            let mean = samples.iter().sum::<f64>() / trials as f64;
            let var =
                samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0);
            let stderr = (var / trials as f64).sqrt();
            let bound = 1.0 + 4.0 * n as f64 / ell(k as u32 + 1) + 3.0 * stderr;
            if mean > bound {
                failures.push(format!(
                    "n={n} round {k}: mean {mean:.2} > bound {bound:.2}"
                ));
            }
        }
    }
    conclude("criterion 07 (expected round lengths)", failures);
}

#[test]
fn criterion_08_run_rule_period_law() {
    let mut failures = Vec::new();
    // strict pass: nothing skipped
    for (name, t) in mixed_corpus(10_000) {
        let (g, _) = build_grammar_once(&t, 5, false).unwrap();
        let report = g.verify(Some(&t), t.len() as u64);
        if report.run_rules_skipped != 0 {
            failures.push(format!("{name}: {} skipped", report.run_rules_skipped));
        }
        if !report.is_ok() {
            failures.push(format!("{name}: {:?}", report.violations));
        }
    }
    // large corpus: skips allowed, still zero violations
    for (name, t) in mixed_corpus(1_000_000) {
        if t.len() <= 10_000 {
            continue;
        }
        let (g, _) = build_grammar_once(&t, 5, false).unwrap();
        let report = g.verify(None, 100_000);
        if !report.is_ok() {
            failures.push(format!("{name}: {:?}", report.violations));
        }
    }
    conclude("criterion 08 (run-rule period law)", failures);
}

#[test]
fn criterion_09_grammar_size_scaling() {
    let mut failures = Vec::new();
    let mut ratios = Vec::new();
    for e in 10..=20u32 {
        let n = 1usize << e;
        let t = gen_s(n).unwrap();
        let budget = default_size_budget(n as u64, 2, DEFAULT_BUDGET_C0);
        let mut sizes: Vec<u64> = (0..5)
            .map(|i| {
                let (g, _) = build_grammar_with_stats(&t, 900 + i, Some(budget), 16).unwrap();
                g.grammar_size()
            })
            .collect();
        sizes.sort_unstable();
        let median = sizes[2] as f64;
        ratios.push(median / f64::from(e));
    }
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    if max / min >= 4.0 {
        failures.push(format!(
            "size/log2(n) varies {:.2}x across the sweep (ratios {ratios:?})",
            max / min
        ));
    }
    conclude("criterion 09 (grammar size scaling)", failures);
}

#[test]
fn criterion_10_retry_wrapper() {
    let mut failures = Vec::new();
    let mut rng = SplitMix64::new(0xACC10);
    let mut first_attempt = 0usize;
    for trial in 0..50u64 {
        let text = random_text(&mut rng, 100_000, 2);
        match build_grammar_with_stats(&text, trial, None, 16) {
            Ok((_, stats)) => {
                if stats.attempts == 1 {
                    first_attempt += 1;
                }
                if stats.attempts > 5 {
                    failures.push(format!("trial {trial}: {} attempts", stats.attempts));
                }
            }
            Err(e) => failures.push(format!("trial {trial}: {e}")),
        }
    }
    if first_attempt < 40 {
        failures.push(format!(
            "only {first_attempt}/50 builds accepted on attempt 1"
        ));
    }
    conclude("criterion 10 (retry wrapper)", failures);
}

#[test]
fn criterion_11_and_12_blocktree_access_and_marked_bound() {
    let mut access_failures = Vec::new();
    let mut marked_failures = Vec::new();
    let mut rng = SplitMix64::new(0xACC11);
    let mut corpus = mixed_corpus(4096);
    corpus.push(("s-65536".into(), gen_s(1 << 16).unwrap()));
    corpus.push(("s-1000000".into(), gen_s(1_000_000).unwrap()));
    corpus.push(("random-100000".into(), random_text(&mut rng, 100_000, 2)));
    corpus.push(("random-1000000".into(), random_text(&mut rng, 1_000_000, 4)));

    for (name, t) in &corpus {
        let profile = substring_complexity(t).unwrap();
        let mut config = BlockTreeConfig::for_text(t, profile.delta_ceil(), false);
        config.fp_seed = 77;
        let bt = BlockTree::build(t, config).unwrap();
        if t.len() <= 4096 {
            for i in 0..t.len() {
                if bt.access(i as u64).unwrap() != t.symbols()[i] {
                    access_failures.push(format!("{name}@{i}"));
                    break;
                }
            }
        } else {
            for _ in 0..10_000 {
                let i = rng.next_below(t.len() as u64);
                if bt.access(i).unwrap() != t.symbols()[i as usize] {
                    access_failures.push(format!("{name}@{i}"));
                    break;
                }
            }
        }
        let bound = 4 * profile.delta_ceil() as usize + 4;
        for (li, level) in bt.stats().levels.iter().enumerate() {
            if level.marked > bound {
                marked_failures.push(format!(
                    "{name} level {li}: {} marked > {bound}",
                    level.marked
                ));
            }
        }
    }
    conclude("criterion 11 (block tree access)", access_failures);
    conclude("criterion 12 (marked-block bound)", marked_failures);
}

#[test]
fn criterion_13_fingerprints() {
    let mut failures = Vec::new();
    let mut rng = SplitMix64::new(0xACC13);
    let texts = vec![
        ("s-16384".to_string(), gen_s(1 << 14).unwrap()),
        ("random-10000".to_string(), random_text(&mut rng, 10_000, 4)),
        (
            "entropy-4096-11".to_string(),
            gen_composite_entropy(4096, 11, 3).unwrap(),
        ),
    ];
    for fp_seed in [100u64, 200, 300] {
        for (name, t) in &texts {
            let mut config = BlockTreeConfig::for_text(t, 4, true);
            config.fp_seed = fp_seed;
            let bt = BlockTree::build(t, config).unwrap();
            let kr = KarpRabin::new(bt.fp_base()).unwrap();
            // linear-scan oracle over the same base
            let oracle = FpPrefix::new(kr, t.symbols());
            for q in 0..10_000 {
                let a = rng.next_below(t.len() as u64 + 1);
                let b = rng.next_below(t.len() as u64 + 1);
                let (a, b) = (a.min(b), a.max(b));
                let got = bt.fingerprint(a, b - a).unwrap();
                let want = oracle.range(a as usize, b as usize);
                if got != want {
                    failures.push(format!("{name} base-seed {fp_seed} query {q} [{a},{b})"));
                    break;
                }
            }
            // spot-check the prefix-table oracle against plain folds
            for _ in 0..20 {
                let a = rng.next_below(t.len() as u64);
                let b = (a + rng.next_below(50).min(t.len() as u64 - a)).min(t.len() as u64);
                if oracle.range(a as usize, b as usize)
                    != kr.fold(&t.symbols()[a as usize..b as usize])
                {
                    failures.push(format!("{name}: oracle disagrees with direct fold"));
                }
            }
        }
    }
    let elem = |rng: &mut SplitMix64| FpElem {
        value: rng.next_below(FP_MOD),
        shift: 1 + rng.next_below(FP_MOD - 1),
    };
    for _ in 0..10_000 {
        let (a, b, c) = (elem(&mut rng), elem(&mut rng), elem(&mut rng));
        if a.compose(b).compose(c) != a.compose(b.compose(c))
            || a.compose(a.inverse()) != FpElem::IDENTITY
            || a.compose(FpElem::IDENTITY) != a
        {
            failures.push("group axiom violation".into());
            break;
        }
    }
    conclude("criterion 13 (fingerprints)", failures);
}

#[test]
fn criterion_14_serialization_roundtrip() {
    let mut failures = Vec::new();
    let mut rng = SplitMix64::new(0xACC14);
    for (name, t) in mixed_corpus(10_000) {
        let (g, _) = build_grammar_once(&t, 3, false).unwrap();
        let g2 = match Rlslp::deserialize(&g.serialize()) {
            Ok(g2) => g2,
            Err(e) => {
                failures.push(format!("{name}: grammar decode {e}"));
                continue;
            }
        };
        if g2.expand().symbols() != t.symbols() || g2.serialize() != g.serialize() {
            failures.push(format!("{name}: grammar round-trip differs"));
        }

        let profile = substring_complexity(&t).unwrap();
        let mut config = BlockTreeConfig::for_text(&t, profile.delta_ceil(), false);
        config.fp_seed = 13;
        let bt = BlockTree::build(&t, config).unwrap();
        let bt2 = match BlockTree::deserialize(&bt.serialize()) {
            Ok(b) => b,
            Err(e) => {
                failures.push(format!("{name}: tree decode {e}"));
                continue;
            }
        };
        for _ in 0..200 {
            let i = rng.next_below(t.len() as u64);
            if bt2.access(i).unwrap() != t.symbols()[i as usize] {
                failures.push(format!("{name}: tree access differs after round-trip"));
                break;
            }
        }
        let i = rng.next_below(t.len() as u64 + 1);
        if bt2.fingerprint_prefix(i).unwrap() != bt.fingerprint_prefix(i).unwrap()
            || bt2.serialize() != bt.serialize()
        {
            failures.push(format!("{name}: tree round-trip differs"));
        }
    }
    conclude("criterion 14 (serialization round-trip)", failures);
}
