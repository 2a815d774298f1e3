#![no_main]

use latticeborell::Scalar;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = Scalar::parse(text) {
        let back = Scalar::parse(&s.to_literal()).expect("literal round-trips");
        assert_eq!(back.exact(), s.exact());
    }
});
