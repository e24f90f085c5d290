#![no_main]

use libfuzzer_sys::fuzz_target;
use maxcover::harness::InstanceFile;
use maxcover::BackendKind;

// Keeps each input's materialization cheap.
const MAX_MEMBERS: u64 = 4096;

fuzz_target!(|data: &[u8]| {
    let Ok(file) = InstanceFile::parse_bytes(data) else {
        return;
    };
    if file.total_cardinality() > MAX_MEMBERS {
        return;
    }
    for kind in [
        file.natural_backend(),
        BackendKind::Sorted,
        BackendKind::Unsorted,
        BackendKind::BTree,
        BackendKind::Hash,
    ] {
        if let Ok(instance) = file.build(kind) {
            let sets = instance.materialize();
            assert_eq!(sets.len(), file.n());
            for (set, spec) in sets.iter().zip(&file.sets) {
                assert_eq!(set.len() as u64, spec.cardinality().unwrap());
            }
        }
    }
});
