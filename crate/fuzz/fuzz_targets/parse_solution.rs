#![no_main]

use discflux::solution_file::{from_text, to_text};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(sol) = from_text(text) else { return };
    let canon = to_text(&sol);
    let again = from_text(&canon).expect("canonical form parses");
    assert_eq!(to_text(&again), canon);
});
