use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sswm::config::{load_config, RunConfig};
use sswm::correlation::Pair;
use sswm::manifest::RunManifest;
use sswm::reproduce::{self, Figure, OutputOptions};
use sswm::validate::{validate, ValidationOptions};

#[derive(Parser)]
#[command(name = "sswm", version, about = "Six-wave mixing triphoton simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named parameter set: fig2 or fig3.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    svg: bool,
    #[arg(long = "grid-n2", global = true)]
    grid_n2: Option<usize>,
    #[arg(long = "grid-n3", global = true)]
    grid_n3: Option<usize>,
    /// omega_c2 values in units of gamma_21, comma separated.
    #[arg(long = "omega-c2-list", global = true, value_delimiter = ',')]
    omega_c2_list: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// |chi5| over (delta2, delta3).
    Chi5,
    /// Normalized threefold coincidence map.
    Threefold {
        /// Compare against the 2D transform of the spectral kernel.
        #[arg(long)]
        transform: bool,
    },
    /// Two-photon conditional rate for one pair.
    Conditional {
        #[arg(long, default_value = "12")]
        pair: Pair,
    },
    /// Temporal and spectral widths and S for every pair.
    Criterion,
    /// S against omega_c2.
    Sweep,
    /// Full acceptance suite.
    Validate,
    /// Data for one figure: fig2, fig3a, fig3b, fig3c or fig4.
    Reproduce { figure: Figure },
}

fn threads() {
    if let Some(n) = std::env::var("SSWM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn load(common: &Common, default_preset: &str) -> Result<RunConfig, ExitCode> {
    let r = match (&common.config, &common.preset) {
        (Some(path), _) => sswm::config::load_file(path),
        (None, Some(name)) => load_config(name),
        (None, None) => load_config(default_preset),
    };
    match r {
        Ok(cfg) => {
            for w in &cfg.warnings {
                eprintln!("warning: {w}");
            }
            Ok(cfg)
        }
        Err(e) => {
            eprintln!("config error: {e}");
            Err(ExitCode::from(2))
        }
    }
}

fn report(m: sswm::Result<RunManifest>) -> ExitCode {
    match m {
        Ok(m) => {
            for c in &m.checks {
                println!("{c}");
            }
            for f in &m.outputs {
                println!("wrote {f}");
            }
            if m.all_checks_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    threads();
    let c = &cli.common;
    let default_preset = match &cli.command {
        Command::Reproduce { figure } => figure.default_preset(),
        Command::Chi5 => "fig2",
        _ => "fig3",
    };
    let cfg = match load(c, default_preset) {
        Ok(cfg) => cfg,
        Err(code) => return code,
    };
    let g21 = cfg.params.gamma21();
    let opts = OutputOptions {
        out_dir: c.out.clone(),
        svg: c.svg,
        n2: c.grid_n2,
        n3: c.grid_n3,
        omega_c2_list: c.omega_c2_list.as_ref().map(|v| v.iter().map(|m| m * g21).collect()),
    };
    match cli.command {
        Command::Chi5 => report(reproduce::run_chi5(&cfg, &opts, "chi5", "")),
        Command::Threefold { transform } => report(reproduce::run_threefold(&cfg, &opts, "threefold", "", transform)),
        Command::Conditional { pair } => report(reproduce::run_conditional(&cfg, &opts, pair, "conditional", "")),
        Command::Criterion => report(reproduce::run_criterion(&cfg, &opts, "criterion")),
        Command::Sweep => report(reproduce::run_sweep(&cfg, &opts, "sweep", "")),
        Command::Reproduce { figure } => report(reproduce::reproduce(figure, &cfg, &opts)),
        Command::Validate => {
            let vopts = ValidationOptions {
                sign: cfg.params.denominator_sign,
                rho54: cfg.rho54,
                ..ValidationOptions::default()
            };
            let mut m = RunManifest::new("validate", &cfg);
            let r = m.timed("acceptance suite", || validate(&vopts));
            print!("{}", r.render());
            for crit in &r.criteria {
                for k in &crit.checks {
                    let mut k = k.clone();
                    k.name = format!("criterion {}: {}", crit.number, k.name);
                    m.check(k);
                }
            }
            let written = m.write(&c.out).and_then(|_| {
                let json = serde_json::to_string_pretty(&r).expect("report serializes");
                std::fs::write(c.out.join("validation.json"), json + "\n").map_err(sswm::Error::from)
            });
            if let Err(e) = written {
                eprintln!("error: {e}");
            }
            if r.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
