//! Loads a config with overrides, regenerates one figure into a temporary
//! directory and reloads the resolved parameters from the manifest.

use sswm::config::{parse_config, ConfigError};
use sswm::reproduce::{reproduce, Figure, OutputOptions};

const CONFIG: &str = r#"
base = "fig3"

[fields]
unit = "gamma_21"
omega_c2 = 8.0

[medium]
unit = "ns"
transit_time = 2.5
"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = parse_config(CONFIG)?;
    println!("omega_c2 = {:.4e} rad/s", cfg.params.omega_c2);

    match parse_config("base = \"fig3\"\n[fields]\nomega_p = 1\n") {
        Err(ConfigError::UnitMissing { section }) => println!("rejected: [{section}] has no unit"),
        other => println!("unexpected: {other:?}"),
    }

    let dir = std::env::temp_dir().join(format!("sswm-example-{}", std::process::id()));
    let opts = OutputOptions {
        out_dir: dir.clone(),
        svg: true,
        ..Default::default()
    };
    let m = reproduce(Figure::Fig3b, &cfg, &opts)?;
    for f in &m.outputs {
        println!("wrote {}", dir.join(f).display());
    }
    let again = parse_config(&m.config_toml())?;
    println!("resolved config reloads identically: {}", again.params == cfg.params);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
