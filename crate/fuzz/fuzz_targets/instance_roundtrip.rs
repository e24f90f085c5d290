#![no_main]

use libfuzzer_sys::fuzz_target;
use maxcover::harness::InstanceFile;

fuzz_target!(|data: &[u8]| {
    if let Ok(file) = InstanceFile::parse_bytes(data) {
        let text = file.emit();
        let again = InstanceFile::parse(&text).expect("emitted files parse");
        assert_eq!(again, file);
        assert_eq!(again.emit(), text);
    }
});
