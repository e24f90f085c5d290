#![no_main]

use libfuzzer_sys::fuzz_target;
use maxcover::backends::LatticePacking;
use maxcover::Element;

// Input: one byte of dimension, then eight-byte little-endian words giving
// the offsets followed by the elements to decode.
fuzz_target!(|data: &[u8]| {
    let Some((&dim, rest)) = data.split_first() else {
        return;
    };
    let dim = usize::from(dim % 8) + 1;
    let mut words = rest.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap()));
    let offsets: Vec<i64> = words.by_ref().take(dim).map(|w| w as i64).collect();
    if offsets.len() < dim {
        return;
    }
    let Ok(packing) = LatticePacking::new(offsets) else {
        return;
    };
    for w in words {
        if let Some(point) = packing.unpack(Element(w)) {
            assert_eq!(point.len(), dim);
            assert_eq!(packing.pack(&point).unwrap(), Element(w));
        }
    }
});
