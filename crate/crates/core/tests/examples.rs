use std::path::PathBuf;
use std::process::Command;

const EXAMPLES: [&str; 8] = [
    "spectral_map",
    "exceptional_points",
    "winding",
    "reference_models",
    "stabilization",
    "modulated_synthesis",
    "eigenenergy_extraction",
    "concurrence",
];

/// Uses the example binaries built alongside the tests when present, and
/// falls back to `cargo run` otherwise.
#[test]
fn examples_run() {
    let deps_dir = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let examples_dir: PathBuf = deps_dir.parent().unwrap().join("examples");
    for name in EXAMPLES {
        let built = examples_dir.join(format!("{name}{}", std::env::consts::EXE_SUFFIX));
        let output = if built.is_file() {
            Command::new(&built).output()
        } else {
            Command::new(env!("CARGO"))
                .args(["run", "--quiet", "--release", "--example", name])
                .current_dir(env!("CARGO_MANIFEST_DIR"))
                .output()
        }
        .unwrap();
        assert!(
            output.status.success(),
            "{name} failed:\n{}",
            String::from_utf8_lossy(&output.stderr)
        );
        assert!(!output.stdout.is_empty(), "{name} printed nothing");
    }
}
