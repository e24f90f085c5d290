#![no_main]

use libfuzzer_sys::fuzz_target;
use maxcover::harness::InstanceFile;

fuzz_target!(|data: &[u8]| {
    let _ = InstanceFile::parse_bytes(data);
});
