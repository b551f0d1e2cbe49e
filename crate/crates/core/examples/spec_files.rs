//! JSON specs: parsing, validation, canonical hashing and the shipped presets.

use levy_moments::cli::{spec_hash, RunManifest};
use levy_moments::presets::{preset, PRESETS};
use levy_moments::triplet::ProcessSpec;

fn main() -> levy_moments::Result<()> {
    let text = r#"{
        "name": "jump-diffusion",
        "drift": { "type": "constant", "value": 0.1 },
        "diffusion": { "type": "constant", "value": 0.5 },
        "kernel": {
            "family": "tempered_stable",
            "params": { "alpha": 0.8, "scale": 1.0, "lambda": 1.0 }
        }
    }"#;
    let spec = ProcessSpec::from_json_str(text)?;
    println!("{}\nhash {}", spec.canonical_json(), spec_hash(&spec));

    match ProcessSpec::from_json_str(&text.replace("0.8", "2.5")) {
        Ok(_) => println!("unexpectedly valid"),
        Err(e) => println!("rejected: {e}"),
    }

    for (key, _) in PRESETS {
        let p = preset(key)?;
        println!("{key}: {}", p.name.as_deref().unwrap_or("-"));
    }

    let m = RunManifest::new("example", &spec, serde_json::json!({}), 0, None);
    println!("{}", m.header_lines().join("\n"));
    Ok(())
}
