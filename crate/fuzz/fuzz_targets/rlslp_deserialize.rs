//! Grammar decoder fuzzing: arbitrary bytes must either fail with a parse
//! error or produce a grammar whose structural invariants hold and whose
//! re-encoding round-trips. The run-rule period law is a property of
//! grammars built by recompression, not of the file format, so it is the
//! one violation a crafted input may legitimately trigger.

#![no_main]

use deltakit::rlslp::{Rlslp, Violation};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(grammar) = Rlslp::deserialize(data) else {
        return;
    };
    let report = grammar.verify(None, 4096);
    for violation in &report.violations {
        assert!(
            matches!(violation, Violation::RunPeriod { .. }),
            "decoder admitted a structurally broken grammar: {violation}"
        );
    }

    let n = grammar.source_len();
    let _ = grammar.access(0);
    let _ = grammar.access(n - 1);
    let probe = n.min(64);
    let piece = grammar.extract(0, probe).unwrap();
    assert_eq!(piece.len() as u64, probe);

    if n <= 1 << 16 {
        let text = grammar.expand();
        assert_eq!(text.len() as u64, n);
        let bytes = grammar.serialize();
        let again = Rlslp::deserialize(&bytes).expect("re-encoding stays decodable");
        assert_eq!(again.expand().symbols(), text.symbols());
        assert_eq!(again.serialize(), bytes);
    }
});
