#![no_main]

use libfuzzer_sys::fuzz_target;
use maxcover::harness::verify::Suite;
use maxcover::Strategy;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(strategy) = s.parse::<Strategy>() {
        assert_eq!(strategy.name().parse::<Strategy>().unwrap(), strategy);
    }
    if let Ok(suite) = s.parse::<Suite>() {
        assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
    }
});
