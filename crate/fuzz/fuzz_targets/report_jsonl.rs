#![no_main]

use latticeborell::harness::{parse_json_lines, render, ReportFormat};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(rows) = parse_json_lines(text) else { return };
    let first = render(&rows, ReportFormat::JsonLines).unwrap();
    // Rendering rounds floats once; a second pass must be a fixed point.
    let second = render(&parse_json_lines(&first).unwrap(), ReportFormat::JsonLines).unwrap();
    assert_eq!(first, second);
    let _ = render(&rows, ReportFormat::Csv);
});
