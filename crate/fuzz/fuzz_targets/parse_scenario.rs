#![no_main]

use discflux::scenario::ScenarioFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = ScenarioFile::from_toml(text) else { return };
    let canon = file.to_toml();
    let again = ScenarioFile::from_toml(&canon).expect("canonical form parses");
    assert_eq!(again.to_toml(), canon);
    assert_eq!(again.fingerprint(), file.fingerprint());
    if let Ok(s) = file.build() {
        assert_eq!(s.initial_state().len(), s.cells);
    }
});
