//! Command pipelines and figure reproduction: compute, export, record.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::correlation::{
    conditional_trace, entanglement_report, first_minimum_after_origin, linspace, sweep_omega_c2, CorrelationTrace, Pair,
};
use crate::error::Result;
use crate::export::{self, CsvTable};
use crate::grid::{next_power_of_two_at_least, UniformAxis};
use crate::manifest::RunManifest;
use crate::params::{derived_rates, to_mhz_cyclic, Coherence, SystemParams};
use crate::susceptibility::{gamma_min, grid_eval, SpectralFunction};
use crate::validate::Check;
use crate::waveform::{compare_transform_to_analytic, threefold_grid, TransformGrid};

pub const CHI5_MAP_N2: usize = 1024;
pub const CHI5_MAP_N3: usize = 128;
pub const THREEFOLD_MAP_N: usize = 256;

/// Coupling strengths of the fringe figures, in units of gamma_21.
pub const FRINGE_COUPLINGS: [f64; 3] = [5.0, 10.0, 20.0];
/// Expected first fringe zeros at those couplings, ns, with tolerances.
pub const FRINGE_ZEROS_NS: [(f64, f64); 3] = [(33.4, 0.5), (16.7, 0.3), (8.35, 0.15)];

pub const SWEEP_RANGE: (f64, f64) = (2.0, 30.0);
pub const SWEEP_POINTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputOptions {
    pub out_dir: PathBuf,
    pub svg: bool,
    /// Explicit point counts; otherwise the config's, otherwise the defaults.
    pub n2: Option<usize>,
    pub n3: Option<usize>,
    /// omega_c2 values in rad/s.
    pub omega_c2_list: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Figure {
    Fig2,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig4,
}

impl Figure {
    pub const ALL: [Figure; 5] = [Figure::Fig2, Figure::Fig3a, Figure::Fig3b, Figure::Fig3c, Figure::Fig4];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig3c => "fig3c",
            Figure::Fig4 => "fig4",
        }
    }

    /// Preset a figure is drawn from when no config is given.
    pub fn default_preset(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            _ => "fig3",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| format!("unknown figure `{s}` (fig2, fig3a, fig3b, fig3c, fig4)"))
    }
}

fn write_csv(m: &mut RunManifest, opts: &OutputOptions, name: &str, t: &CsvTable) -> Result<()> {
    t.write_file(&opts.out_dir.join(name))?;
    m.output(name);
    Ok(())
}

fn write_svg(m: &mut RunManifest, opts: &OutputOptions, name: &str, text: impl FnOnce() -> String) -> Result<()> {
    if opts.svg {
        export::write_text(&opts.out_dir.join(name), &text())?;
        m.output(name);
    }
    Ok(())
}

fn finish(m: RunManifest, opts: &OutputOptions) -> Result<RunManifest> {
    m.write(&opts.out_dir)?;
    Ok(m)
}

fn ns(t: f64) -> f64 {
    t * 1e9
}

/// `|chi5|` map axes: delta2 over ±omega_e and delta3 over ±4 gamma_61.  Default point
/// counts grow to a power of two when needed to resolve the narrowest linewidth.
pub fn chi5_map_axes(p: &SystemParams, n2: Option<usize>, n3: Option<usize>) -> Result<(UniformAxis, UniformAxis)> {
    let d = derived_rates(p)?;
    let w2 = d.omega_e;
    let w3 = 4.0 * p.gamma(Coherence::R61);
    let limit = gamma_min(p) / 4.0;
    let n2 = n2.unwrap_or_else(|| CHI5_MAP_N2.max(next_power_of_two_at_least(2.0 * w2 / limit)));
    let n3 = n3.unwrap_or_else(|| CHI5_MAP_N3.max(next_power_of_two_at_least(2.0 * w3 / limit)));
    Ok((UniformAxis::symmetric(w2, n2)?, UniformAxis::symmetric(w3, n3)?))
}

/// `|chi5|` map with its two resonance checks.
pub fn run_chi5(cfg: &RunConfig, opts: &OutputOptions, command: &str, prefix: &str) -> Result<RunManifest> {
    let p = &cfg.params;
    let mut m = RunManifest::new(command, cfg);
    let (a2, a3) = chi5_map_axes(p, opts.n2.or(cfg.grids.n2), opts.n3.or(cfg.grids.n3))?;
    m.grid("delta2", "rad_per_s", &a2);
    m.grid("delta3", "rad_per_s", &a3);
    let g = m.timed("chi5 grid", || grid_eval(p, SpectralFunction::Chi5, &a2, &a3))?;
    let d = derived_rates(p)?;
    m.tolerance("argmax distance from (±omega_e/2, 0), grid cells", 1.0);
    for sign in [-1.0, 1.0] {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for ((i3, i2), z) in g.values.indexed_iter() {
            if a2.value(i2) * sign > 0.0 && z.norm() > best.2 {
                best = (i3, i2, z.norm());
            }
        }
        let x = a2.value(best.1);
        let label = if sign > 0.0 { "+" } else { "-" };
        m.check(
            Check::within(
                &format!("argmax delta2 ({label}) from omega_e/2, cells"),
                (x - sign * 0.5 * d.omega_e) / a2.step,
                0.0,
                1.0,
                "cells",
            )
            .note(format!("{:.3} MHz", to_mhz_cyclic(x))),
        );
        m.check(Check::within(&format!("argmax delta3 ({label}), cells"), a3.value(best.0) / a3.step, 0.0, 1.0, "cells"));
    }
    let t = Instant::now();
    write_csv(&mut m, opts, &format!("{prefix}chi5.csv"), &export::spectral_grid_csv(&g))?;
    write_svg(&mut m, opts, &format!("{prefix}chi5.svg"), || {
        export::svg_heatmap(
            &g.values.mapv(|z| z.norm()),
            (to_mhz_cyclic(a2.start), to_mhz_cyclic(a2.last())),
            (to_mhz_cyclic(a3.start), to_mhz_cyclic(a3.last())),
            "|chi5|",
            "delta2 / 2pi (MHz)",
            "delta3 / 2pi (MHz)",
        )
    })?;
    m.since("export", t);
    finish(m, opts)
}

/// Delay window of the threefold map: five tau13 decay times or three fringes, whichever is longer.
pub fn threefold_window(p: &SystemParams) -> Result<f64> {
    let d = derived_rates(p)?;
    Ok((5.0 / (2.0 * p.gamma(Coherence::R61))).max(3.0 * std::f64::consts::TAU / d.omega_e))
}

/// Peak-normalized analytic threefold map; optionally checked against the 2D transform.
pub fn run_threefold(cfg: &RunConfig, opts: &OutputOptions, command: &str, prefix: &str, transform: bool) -> Result<RunManifest> {
    let p = &cfg.params;
    let mut m = RunManifest::new(command, cfg);
    let t_end = threefold_window(p)?;
    let a12 = UniformAxis::closed(t_end, opts.n2.or(cfg.grids.n2).unwrap_or(THREEFOLD_MAP_N))?;
    let a13 = UniformAxis::closed(t_end, opts.n3.or(cfg.grids.n3).unwrap_or(THREEFOLD_MAP_N))?;
    m.grid("tau12", "s", &a12);
    m.grid("tau13", "s", &a13);
    let g = m.timed("threefold grid", || threefold_grid(p, &a12, &a13))?;
    if transform {
        let tg = TransformGrid::for_params(p)?;
        m.grid("transform delta2", "rad_per_s", &tg.axis2);
        m.grid("transform delta3", "rad_per_s", &tg.axis3);
        m.tolerance("transform interior relative L2", 0.02);
        let c = m.timed("2D transform", || compare_transform_to_analytic(p, &tg))?;
        m.check(Check::below("transform interior relative L2", c.relative_l2, 0.02, ""));
    }
    let t = Instant::now();
    write_csv(&mut m, opts, &format!("{prefix}threefold.csv"), &export::waveform_grid_csv(&g))?;
    write_svg(&mut m, opts, &format!("{prefix}threefold.svg"), || {
        export::svg_heatmap(
            &g.rates,
            (0.0, ns(a12.last())),
            (0.0, ns(a13.last())),
            "normalized threefold coincidence rate",
            "tau12 (ns)",
            "tau13 (ns)",
        )
    })?;
    m.since("export", t);
    finish(m, opts)
}

fn coupling_label(p: &SystemParams) -> String {
    format!("omega_c2={}gamma21", short(p.omega_c2 / p.gamma21()))
}

fn short(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    format!("{r}")
}

/// Closed-form traces of one pair, one per omega_c2 (the config's value if no list).
pub fn run_conditional(
    cfg: &RunConfig,
    opts: &OutputOptions,
    pair: Pair,
    command: &str,
    prefix: &str,
) -> Result<RunManifest> {
    let p = &cfg.params;
    let mut m = RunManifest::new(command, cfg);
    let couplings = opts.omega_c2_list.clone().unwrap_or_else(|| vec![p.omega_c2]);
    let params: Vec<SystemParams> = couplings.iter().map(|&w| p.with_omega_c2(w)).collect();
    let traces = m.timed("traces", || params.iter().map(|q| conditional_trace(q, pair)).collect::<Result<Vec<_>>>())?;
    let tau = &traces[0].tau;
    m.grid("tau", "s", &UniformAxis::new(tau[0], tau[1] - tau[0], tau.len())?);
    fringe_checks(&mut m, pair, &params, &traces)?;
    let labels: Vec<String> = params.iter().map(coupling_label).collect();
    let t = Instant::now();
    write_csv(&mut m, opts, &format!("{prefix}conditional_{}.csv", pair.label()), &export::traces_csv(&labels, &traces))?;
    write_svg(&mut m, opts, &format!("{prefix}conditional_{}.svg", pair.label()), || {
        let series: Vec<(String, Vec<f64>, Vec<f64>)> = labels
            .iter()
            .zip(&traces)
            .map(|(l, tr)| {
                let peak = tr.rate.iter().cloned().fold(0.0, f64::max);
                // first third of the window holds the structure
                let keep = tr.tau.len() / 3;
                (
                    l.clone(),
                    tr.tau[..keep].iter().map(|&x| ns(x)).collect(),
                    tr.rate[..keep].iter().map(|r| r / peak).collect(),
                )
            })
            .collect();
        export::svg_lines(&series, &format!("conditional rate, pair {pair}"), "tau (ns)", "normalized rate")
    })?;
    m.since("export", t);
    finish(m, opts)
}

fn fringe_checks(m: &mut RunManifest, pair: Pair, params: &[SystemParams], traces: &[CorrelationTrace]) -> Result<()> {
    for (q, tr) in params.iter().zip(traces) {
        let d = derived_rates(q)?;
        let step = tr.tau[1] - tr.tau[0];
        let label = coupling_label(q);
        let Some(first) = first_minimum_after_origin(tr) else {
            m.check(Check::info(&format!("first minimum, {label}"), "none in window"));
            continue;
        };
        if pair == Pair::P12 {
            m.tolerance("first fringe zero vs 2pi/omega_e, samples", 1.0);
            m.check(
                Check::within(
                    &format!("first fringe zero vs 2pi/omega_e, {label}, samples"),
                    (first - std::f64::consts::TAU / d.omega_e) / step,
                    0.0,
                    1.0,
                    "samples",
                )
                .note(format!("{:.3} ns", ns(first))),
            );
            let g21 = q.gamma21();
            for (mult, (target, tol)) in FRINGE_COUPLINGS.iter().zip(FRINGE_ZEROS_NS) {
                if q.omega_c2 == mult * g21 {
                    m.check(Check::within(&format!("first fringe zero, {label}"), ns(first), target, tol, "ns"));
                }
            }
        } else {
            m.check(Check::info(&format!("first minimum, {label}"), format!("{:.3} ns", ns(first))));
        }
    }
    Ok(())
}

/// `delta_tau`, `delta_nu` and `S` for all three pairs.
pub fn run_criterion(cfg: &RunConfig, opts: &OutputOptions, command: &str) -> Result<RunManifest> {
    let p = &cfg.params;
    let mut m = RunManifest::new(command, cfg);
    let r = m.timed("criterion", || entanglement_report(p))?;
    let mut t = CsvTable::new(&["pair", "delta_tau_ns", "delta_nu_MHz", "S", "S_angular"]);
    t.comments.push("pair column: 12, 13, 23; delta_nu is the Gaussian sigma of the power spectrum, cyclic".into());
    for c in &r.pairs {
        let code = match c.pair {
            Pair::P12 => 12.0,
            Pair::P13 => 13.0,
            Pair::P23 => 23.0,
        };
        t.push(vec![code, ns(c.delta_tau), c.delta_nu / 1e6, c.s_value, c.s_value_angular]);
        m.check(Check::below(&format!("S {}", c.pair), c.s_value, 1.0, ""));
    }
    write_csv(&mut m, opts, "criterion.csv", &t)?;
    finish(m, opts)
}

/// Default sweep: 20 points over omega_c2 ∈ [2, 30] gamma_21.
pub fn default_sweep(p: &SystemParams) -> Vec<f64> {
    linspace(SWEEP_RANGE.0, SWEEP_RANGE.1, SWEEP_POINTS).iter().map(|m| m * p.gamma21()).collect()
}

pub fn run_sweep(cfg: &RunConfig, opts: &OutputOptions, command: &str, prefix: &str) -> Result<RunManifest> {
    let p = &cfg.params;
    let mut m = RunManifest::new(command, cfg);
    let values = opts.omega_c2_list.clone().unwrap_or_else(|| default_sweep(p));
    let rows = m.timed("sweep", || sweep_omega_c2(p, &values));
    for r in &rows {
        if let Err(e) = &r.outcome {
            m.check(Check::errored(&format!("sweep point {}", coupling_label(&p.with_omega_c2(r.omega_c2))), e));
        }
    }
    let worst = rows
        .iter()
        .flat_map(|r| Pair::ALL.map(|pair| r.s(pair).unwrap_or(f64::NAN)))
        .fold(f64::NEG_INFINITY, f64::max);
    m.check(Check::below("largest S over the sweep", worst, 1.0, ""));
    let t = Instant::now();
    let g21 = p.gamma21();
    write_csv(&mut m, opts, &format!("{prefix}sweep.csv"), &export::sweep_csv(&rows, g21))?;
    write_svg(&mut m, opts, &format!("{prefix}sweep.svg"), || {
        let x: Vec<f64> = rows.iter().map(|r| r.omega_c2 / g21).collect();
        let series: Vec<(String, Vec<f64>, Vec<f64>)> = Pair::ALL
            .iter()
            .map(|&pair| (format!("S{}", pair.label()), x.clone(), rows.iter().map(|r| r.s(pair).unwrap_or(f64::NAN)).collect()))
            .collect();
        export::svg_lines(&series, "energy-time criterion", "omega_c2 / gamma_21", "S")
    })?;
    m.since("export", t);
    finish(m, opts)
}

/// Regenerates one figure's data from `cfg`.
pub fn reproduce(fig: Figure, cfg: &RunConfig, opts: &OutputOptions) -> Result<RunManifest> {
    let command = format!("reproduce {fig}");
    let prefix = format!("{fig}_");
    match fig {
        Figure::Fig2 => run_chi5(cfg, opts, &command, &prefix),
        Figure::Fig3a => run_threefold(cfg, opts, &command, &prefix, true),
        Figure::Fig3b | Figure::Fig3c => {
            let mut o = opts.clone();
            if o.omega_c2_list.is_none() {
                let g21 = cfg.params.gamma21();
                o.omega_c2_list = Some(FRINGE_COUPLINGS.iter().map(|m| m * g21).collect());
            }
            let pair = if fig == Figure::Fig3b { Pair::P12 } else { Pair::P13 };
            run_conditional(cfg, &o, pair, &command, &prefix)
        }
        Figure::Fig4 => run_sweep(cfg, opts, &command, &prefix),
    }
}
