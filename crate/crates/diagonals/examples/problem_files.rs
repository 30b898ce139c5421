//! The command layer used by the `diagonals` binary, driven from the JSON
//! problem files in `examples/problems`.

use std::error::Error;
use std::path::Path;

use diagonals::cli::{cmd_build, cmd_check, Format, Overrides};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/problems");
    let text = Overrides { format: Some(Format::Text), ..Default::default() };
    let mut names: Vec<_> = std::fs::read_dir(&dir)?.filter_map(|e| e.ok()).map(|e| e.path()).collect();
    names.sort();
    for path in names {
        let spec = std::fs::read_to_string(&path)?;
        let out = cmd_check(&spec, &text);
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("?");
        println!("{name}: check exit {}", out.code);
        print!("{}", out.report.lines().next().map(|l| format!("  {l}\n")).unwrap_or_default());
    }
    let spec = std::fs::read_to_string(dir.join("finite_two_by_two.json"))?;
    let built = cmd_build(&spec, &Overrides::default());
    assert_eq!(built.code, 0);
    print!("{}", built.artifact.unwrap_or_default());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
