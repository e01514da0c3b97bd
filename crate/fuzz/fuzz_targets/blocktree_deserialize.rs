//! Block tree decoder fuzzing: arbitrary bytes must either fail with a
//! parse error or produce a tree whose queries stay in bounds and whose
//! re-encoding round-trips byte for byte.

#![no_main]

use deltakit::blocktree::BlockTree;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(tree) = BlockTree::deserialize(data) else {
        return;
    };
    let n = tree.n();
    let _ = tree.access(0).unwrap();
    let _ = tree.access(n - 1).unwrap();
    let _ = tree.access(n / 2).unwrap();
    assert!(tree.access(n).is_err());

    // fingerprint queries must stay total whether or not annotations were
    // present in the file
    let _ = tree.fingerprint_prefix(n.min(1024));
    let _ = tree.fingerprint(0, n.min(64));
    let _ = tree.extract(n - 1, 1);

    let stats = tree.stats();
    assert!(stats.total_blocks > 0);

    let bytes = tree.serialize();
    let again = BlockTree::deserialize(&bytes).expect("re-encoding stays decodable");
    assert_eq!(again.serialize(), bytes);
    assert_eq!(again.access(n - 1).unwrap(), tree.access(n - 1).unwrap());
});
