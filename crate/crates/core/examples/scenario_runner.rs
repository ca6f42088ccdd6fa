//! Run a JSON scenario and list the reports it wrote.
//!
//! Run with `cargo run --example scenario_runner [output-dir]`.

use colombeau::scenario::{exit_code, parse_scenario, run};
use colombeau::Result;

const SCENARIO: &str = r#"{
  "schema_version": 1,
  "grid": {"base": 0.5, "k": [4, 24]},
  "items": ["delta_radial_2d", "bump_asym_2d", "xi_12_rotation",
            {"name": "q", "expr": "x1^2 + x2^2 + eps^6 * x1"}],
  "tasks": [
    {"classify": {"item": "delta_radial_2d", "box": [[-1, 1], [-1, 1]], "expect": "Moderate(2)"}},
    {"invariance": {"item": "q", "method": "infinitesimal", "field": "xi_12_rotation", "box": [[-1, 1], [-1, 1]]}},
    {"invariance": {"item": "bump_asym_2d", "method": "standard_rotations", "box": [[-1, 1], [-1, 1]],
                    "angles": [1.5707963267948966]}},
    {"reduce": {"item": "q", "box": [[-1, 1], [-1, 1]]}}
  ]
}"#;

fn main() -> Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("colombeau-scenario-example"));
    let scenario = parse_scenario(SCENARIO)?.with_output(&out);
    let result = run(&scenario);
    if let Ok(outcome) = &result {
        for t in &outcome.tasks {
            println!("task {:02} {:<10} {}", t.index, t.kind, if t.passed { "pass" } else { "FAIL" });
            for f in &t.files {
                println!("    {}", f.display());
            }
        }
    }
    // the rotation task is expected to fail: the bump is not rotation invariant
    println!("exit status {}", exit_code(&result));
    Ok(())
}
