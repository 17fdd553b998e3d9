//! Browser bindings: evolve a density or a wave packet on a fixed 2048-point
//! grid and hand the frames to JavaScript as flat `Float64Array`s.
//!
//! Build for the web with `wasm-pack build --target web crates/levypacket-wasm`
//! (or `cargo build --target wasm32-unknown-unknown` plus `wasm-bindgen`);
//! the static page in `www/` loads the generated module.  The crate also
//! compiles natively so its logic is covered by the ordinary test suite.

use wasm_bindgen::prelude::*;

use levypacket::analysis::{density_modes, wave_modes};
use levypacket::evolution::{
    evolve_process, evolve_wavepacket, EvolutionMode, InitialState, NoiseModel, Scenario,
    StateKind, Tolerances,
};
use levypacket::laws::parse_law;
use levypacket::solutions::RateParams;
use levypacket::spectral::GridPair;
use levypacket::Result;

/// Grid size used by every browser call: large enough for smooth curves,
/// small enough for interactive latency.
pub const BROWSER_GRID: usize = 2048;

fn parse_initial(kind: &str, scale: f64, phase: f64) -> Result<InitialState> {
    let state = match kind {
        "normal" => StateKind::Normal,
        "cauchy" => StateKind::Cauchy,
        "student3" => StateKind::Student3,
        "laplace" => StateKind::Laplace,
        "vg" => StateKind::VarianceGamma { nu: 1.75 },
        "relativistic" => StateKind::Relativistic { nu: 1.0 },
        other => {
            return Err(levypacket::Error::Config(format!(
                "unknown initial state `{other}`"
            )))
        }
    };
    InitialState::new(state, scale, phase)
}

fn scenario(
    noise: &str,
    tau: f64,
    initial: &str,
    scale: f64,
    phase: f64,
    t: f64,
    half_width: f64,
    mode: EvolutionMode,
) -> Result<Scenario> {
    let times = if t > 0.0 { vec![0.0, t] } else { vec![0.0, 1.0] };
    Scenario::new(
        NoiseModel::Law(parse_law(noise)?),
        RateParams::new(tau)?,
        parse_initial(initial, scale, phase)?,
        GridPair::new(BROWSER_GRID, half_width)?,
        times,
        Tolerances::default(),
        mode,
    )
}

/// Density at time `t`: returns `[x0, rho0, x1, rho1, ...]`.
pub fn density_frame_impl(
    noise: &str,
    tau: f64,
    initial: &str,
    scale: f64,
    t: f64,
    half_width: f64,
) -> Result<Vec<f64>> {
    let sc = scenario(
        noise,
        tau,
        initial,
        scale,
        0.0,
        t,
        half_width,
        EvolutionMode::Process,
    )?;
    let field = evolve_process(&sc)?;
    let slice = if t > 0.0 { &field.slices[1] } else { &field.slices[0] };
    let mut out = Vec::with_capacity(2 * BROWSER_GRID);
    for (j, &v) in slice.iter().enumerate() {
        out.push(field.grid.x(j));
        out.push(v);
    }
    Ok(out)
}

/// Wave packet at time `t`: returns `[x0, re0, im0, abs2_0, x1, ...]`.
pub fn wave_frame_impl(
    noise: &str,
    tau: f64,
    initial: &str,
    scale: f64,
    phase: f64,
    t: f64,
    half_width: f64,
) -> Result<Vec<f64>> {
    let sc = scenario(
        noise,
        tau,
        initial,
        scale,
        phase,
        t,
        half_width,
        EvolutionMode::Schrodinger,
    )?;
    let field = evolve_wavepacket(&sc)?;
    let slice = if t > 0.0 { &field.slices[1] } else { &field.slices[0] };
    let mut out = Vec::with_capacity(4 * BROWSER_GRID);
    for (j, &z) in slice.iter().enumerate() {
        out.push(field.grid.x(j));
        out.push(z.re);
        out.push(z.im);
        out.push(z.norm_sqr());
    }
    Ok(out)
}

/// Mode positions of the evolved profile (density for `"process"`, `|psi|^2`
/// otherwise): returns `[m0, m1, ...]`, empty when unimodal is `false`.
pub fn mode_positions_impl(
    noise: &str,
    tau: f64,
    initial: &str,
    scale: f64,
    phase: f64,
    t: f64,
    half_width: f64,
    side: &str,
) -> Result<Vec<f64>> {
    if side == "process" {
        let sc = scenario(
            noise,
            tau,
            initial,
            scale,
            0.0,
            t,
            half_width,
            EvolutionMode::Process,
        )?;
        let field = evolve_process(&sc)?;
        let reports = density_modes(&field, None);
        let idx = if t > 0.0 { 1 } else { 0 };
        Ok(reports[idx].positions.clone())
    } else {
        let sc = scenario(
            noise,
            tau,
            initial,
            scale,
            phase,
            t,
            half_width,
            EvolutionMode::Schrodinger,
        )?;
        let field = evolve_wavepacket(&sc)?;
        let reports = wave_modes(&field, None);
        let idx = if t > 0.0 { 1 } else { 0 };
        Ok(reports[idx].positions.clone())
    }
}

fn to_js<T>(res: Result<T>) -> std::result::Result<T, JsValue> {
    res.map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Browser entry point for a density frame.
#[wasm_bindgen]
pub fn density_frame(
    noise: &str,
    tau: f64,
    initial: &str,
    scale: f64,
    t: f64,
    half_width: f64,
) -> std::result::Result<Vec<f64>, JsValue> {
    to_js(density_frame_impl(noise, tau, initial, scale, t, half_width))
}

/// Browser entry point for a wave frame.
#[wasm_bindgen]
pub fn wave_frame(
    noise: &str,
    tau: f64,
    initial: &str,
    scale: f64,
    phase: f64,
    t: f64,
    half_width: f64,
) -> std::result::Result<Vec<f64>, JsValue> {
    to_js(wave_frame_impl(
        noise, tau, initial, scale, phase, t, half_width,
    ))
}

/// Browser entry point for mode positions.
#[wasm_bindgen]
pub fn mode_positions(
    noise: &str,
    tau: f64,
    initial: &str,
    scale: f64,
    phase: f64,
    t: f64,
    half_width: f64,
    side: &str,
) -> std::result::Result<Vec<f64>, JsValue> {
    to_js(mode_positions_impl(
        noise, tau, initial, scale, phase, t, half_width, side,
    ))
}
