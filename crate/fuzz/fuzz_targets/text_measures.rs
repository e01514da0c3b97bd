//! Text ingestion and the full measurement pipeline on arbitrary bytes:
//! the profile, parse, period, grammar, and block tree must agree with
//! their definitions on any accepted input.

#![no_main]

use deltakit::blocktree::{BlockTree, BlockTreeConfig};
use deltakit::recompression::build_grammar_once;
use deltakit::textcore::{lz_factorize, smallest_period, substring_complexity};
use deltakit::Text;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let data = &data[..data.len().min(2048)];
    let Ok(text) = Text::from_bytes(data) else {
        return; // zero bytes are rejected
    };
    if text.is_empty() {
        assert!(substring_complexity(&text).is_err());
        return;
    }
    let n = text.len();

    let profile = substring_complexity(&text).unwrap();
    assert_eq!(profile.d_at(1), text.distinct_symbols() as u64);
    assert_eq!(profile.d_at(n), 1);
    for k in 1..=n {
        assert!(profile.d_at(k) <= (n - k + 1) as u64);
    }

    let parse = lz_factorize(&text).unwrap();
    parse.reconstruct(&text).unwrap();
    let delta = profile.delta_num as f64 / profile.delta_den as f64;
    let bound = 4.0 * (delta * (n as f64 / delta).max(1.0).log2() + delta);
    assert!(parse.z() as f64 <= bound);

    let period = smallest_period(&text).unwrap();
    assert!(period >= 1 && period <= n);
    assert_eq!(&text.symbols()[period..], &text.symbols()[..n - period]);

    let (grammar, _) = build_grammar_once(&text, 0x5eed, false).unwrap();
    assert_eq!(grammar.expand().symbols(), text.symbols());

    let tree = BlockTree::build(
        &text,
        BlockTreeConfig {
            tau: 2,
            s: 2,
            leaf_len: 1,
            fp_seed: 1,
        },
    )
    .unwrap();
    for i in [0, n / 2, n - 1] {
        assert_eq!(tree.access(i as u64).unwrap(), text.symbols()[i]);
    }
});
