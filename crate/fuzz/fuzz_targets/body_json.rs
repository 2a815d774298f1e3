#![no_main]

use latticeborell::bodies::json::{body_to_json, parse_body};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(body) = parse_body(text) else { return };
    // Serialized bodies must parse back to the same body.
    let again = parse_body(&body_to_json(&body).to_string()).expect("serialized body parses");
    assert_eq!(again.fingerprint(), body.fingerprint());
});
