//! The specs behind the acceptance suite, embedded at build time and keyed `ac1`..`ac10`.

use crate::error::{Error, Result};
use crate::triplet::ProcessSpec;

pub const PRESETS: [(&str, &str); 10] = [
    ("ac1", include_str!("../presets/ac1.json")),
    ("ac2", include_str!("../presets/ac2.json")),
    ("ac3", include_str!("../presets/ac3.json")),
    ("ac4", include_str!("../presets/ac4.json")),
    ("ac5", include_str!("../presets/ac5.json")),
    ("ac6", include_str!("../presets/ac6.json")),
    ("ac7", include_str!("../presets/ac7.json")),
    ("ac8", include_str!("../presets/ac8.json")),
    ("ac9", include_str!("../presets/ac9.json")),
    ("ac10", include_str!("../presets/ac10.json")),
];

/// Raw JSON of a preset; the key is case-insensitive.
pub fn preset_json(key: &str) -> Result<&'static str> {
    let key = key.trim().to_ascii_lowercase();
    PRESETS.iter().find(|(k, _)| *k == key).map(|(_, j)| *j).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
        Error::InvalidSpec(format!("unknown preset `{key}`; known: {}", names.join(", ")))
    })
}

pub fn preset(key: &str) -> Result<ProcessSpec> {
    ProcessSpec::from_json_str(preset_json(key)?)
}
