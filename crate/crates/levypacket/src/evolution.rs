//! The evolution engine: composes a noise model, an initial state, and a time
//! grid into evolved density fields (process side) and wave fields
//! (Schrödinger side), and computes evolution-equation residuals.
//!
//! Everything evolves in frequency space, where the dynamics is an exact
//! multiplication:
//!
//! * process side: `chi(u, t) = e^{t eta(u)} chi_0(u)` inverted by
//!   [`chf_to_pdf`],
//! * wave side:    `psihat(u, t) = e^{i t eta(u)} psihat_0(u)` inverted by
//!   [`wfhat_to_wf`],
//!
//! with `eta` the per-unit-time symbol of the noise (its logarithmic
//! characteristic function over the scenario's time scale `tau`).  Pointwise
//! propagator kernels are never evaluated in position space (their closed
//! forms have real-axis singularities); the spectral route avoids them
//! entirely.
//!
//! The singular Cauchy initial spectrum (a log-divergent Bessel `K_0` at
//! `u = 0`) is sampled by exact cell averages over a band of central
//! frequency cells, so the rectangle inversion sum reproduces the continuum
//! integral; the induced discrete-norm drift is corrected once at `t = 0` and
//! reported in the field's `renorm` factor, never per-slice.
//!
//! Time slices are independent given the initial spectrum and the symbol, so
//! they are computed by a scoped thread pool capped by the
//! `LEVYPACKET_THREADS` environment variable.

use num_complex::Complex64;
use std::f64::consts::{LN_2, PI};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::laws::{Family, LawSpec, LevyDensity, LevyTriplet};
use crate::poisson::{compound_lch, compound_triplet, CompoundSpec};
use crate::solutions::RateParams;
use crate::specfun::{bessel_k0, bessel_k1, gamma_real};
use crate::spectral::{
    adaptive_integrate, chf_to_pdf, pv_generator_apply, wfhat_to_wf, ComplexSpline, GridPair,
};

const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// Number of frequency cells on each side of `u = 0` that are sampled by
/// exact cell averages when the initial spectrum is singular there.
const SINGULAR_BAND: i64 = 64;

// ---------------------------------------------------------------------------
// tail bookkeeping
// ---------------------------------------------------------------------------

/// Declared decay class of a field's profile (density, or `|psi|^2`), used by
/// the diagnostics layer for tail estimates and variance finiteness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailClass {
    /// Decays at least exponentially.
    Exponential,
    /// Decays like `C |x|^{-power}`.
    Algebraic { power: f64 },
}

impl TailClass {
    /// The slower-decaying of two classes (the tail of a convolution).
    pub fn heavier(self, other: TailClass) -> TailClass {
        match (self, other) {
            (TailClass::Exponential, o) => o,
            (s, TailClass::Exponential) => s,
            (TailClass::Algebraic { power: p }, TailClass::Algebraic { power: q }) => {
                TailClass::Algebraic { power: p.min(q) }
            }
        }
    }

    /// Whether a profile with this tail has a finite second moment
    /// (`integral x^2 |x|^{-power}` converges iff `power > 3`).
    pub fn variance_is_finite(&self) -> bool {
        match self {
            TailClass::Exponential => true,
            TailClass::Algebraic { power } => *power > 3.0,
        }
    }
}

/// Tail class of a catalog law's density.
fn law_density_tail(spec: &LawSpec) -> TailClass {
    match &spec.family {
        Family::Cauchy => TailClass::Algebraic { power: 2.0 },
        Family::Stable { alpha } if *alpha < 2.0 => TailClass::Algebraic { power: alpha + 1.0 },
        Family::Student { alpha } => TailClass::Algebraic { power: alpha + 1.0 },
        Family::CompoundPoisson { component, .. } => law_density_tail(component),
        _ => TailClass::Exponential,
    }
}

/// Tail class the noise multiplier imprints on `|psi|^2`: a `|u|^s` kink of
/// the symbol at the origin produces `psi ~ |x|^{-1-s}`, hence the power
/// `2 + 2s`.
fn law_wave_tail(spec: &LawSpec) -> TailClass {
    match &spec.family {
        Family::Cauchy => TailClass::Algebraic { power: 4.0 },
        Family::Stable { alpha } if *alpha < 2.0 => TailClass::Algebraic {
            power: 2.0 + 2.0 * alpha,
        },
        Family::Student { alpha } => TailClass::Algebraic {
            power: 2.0 + 2.0 * alpha,
        },
        _ => TailClass::Exponential,
    }
}

// ---------------------------------------------------------------------------
// noise model
// ---------------------------------------------------------------------------

/// The noise driving an evolution: either one catalog law per time `tau`, or
/// an independent Gaussian component plus compound-Poisson jumps (the
/// jump-diffusion pair) per time `tau`.
#[derive(Clone, Debug)]
pub enum NoiseModel {
    Law(LawSpec),
    /// Gaussian part of width `spec.background_width()` plus Poisson jumps of
    /// rate `spec.rate`, both per catalog time.
    WienerPoisson(CompoundSpec),
}

impl NoiseModel {
    /// Jump-diffusion builder: Gaussian part of width `gamma >= 0` (0 for
    /// pure jumps) plus compound-Poisson jumps, per catalog time.
    pub fn wiener_poisson(gamma: f64, rate: f64, jump: LawSpec, series_tol: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!(
                "Gaussian part must be nonnegative and finite, got {gamma}"
            )));
        }
        let background = if gamma > 0.0 {
            Some(LawSpec::new(Family::Normal, gamma)?)
        } else {
            None
        };
        Ok(NoiseModel::WienerPoisson(CompoundSpec::new(
            rate, jump, background, series_tol,
        )?))
    }

    /// Logarithmic characteristic function per catalog time.
    pub fn lch(&self, u: f64) -> Result<f64> {
        match self {
            NoiseModel::Law(spec) => spec.lch(u),
            NoiseModel::WienerPoisson(spec) => compound_lch(spec, u),
        }
    }

    /// Per-unit-time symbol `eta(u) = lch(u) / tau`.
    pub fn symbol(&self, rates: &RateParams, u: f64) -> Result<f64> {
        Ok(self.lch(u)? / rates.tau)
    }

    pub fn is_infinitely_divisible(&self) -> bool {
        match self {
            NoiseModel::Law(spec) => spec.is_infinitely_divisible(),
            NoiseModel::WienerPoisson(_) => true,
        }
    }

    /// Levy triplet per catalog time.
    pub fn triplet(&self) -> Result<LevyTriplet> {
        match self {
            NoiseModel::Law(spec) => spec.triplet(),
            NoiseModel::WienerPoisson(spec) => compound_triplet(spec),
        }
    }

    /// Levy triplet of the per-unit-time generator: Gaussian width scales by
    /// `1/sqrt(tau)`, jump intensities by `1/tau`.
    pub fn rate_triplet(&self, rates: &RateParams) -> Result<LevyTriplet> {
        let t = self.triplet()?;
        let tau = rates.tau;
        let density = t.density.map(|d| {
            Arc::new(move |y: f64| d(y) / tau) as LevyDensity
        });
        Ok(LevyTriplet {
            drift: t.drift / tau,
            gamma: t.gamma / tau.sqrt(),
            density,
            atoms: t.atoms.iter().map(|&(p, w)| (p, w / tau)).collect(),
            singularity_order: t.singularity_order,
            scale: t.scale,
        })
    }

    fn density_tail(&self) -> TailClass {
        match self {
            NoiseModel::Law(spec) => law_density_tail(spec),
            NoiseModel::WienerPoisson(spec) => law_density_tail(&spec.component),
        }
    }

    fn wave_tail(&self) -> TailClass {
        match self {
            NoiseModel::Law(spec) => law_wave_tail(spec),
            NoiseModel::WienerPoisson(_) => TailClass::Exponential,
        }
    }
}

// ---------------------------------------------------------------------------
// initial state
// ---------------------------------------------------------------------------

/// Shape of the initial state; scale and optional plane-wave phase live on
/// [`InitialState`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateKind {
    Normal,
    Cauchy,
    Student3,
    Laplace,
    VarianceGamma { nu: f64 },
    Relativistic { nu: f64 },
}

/// Initial condition of a scenario.  On the process side it is the unit-mass
/// density of the matching catalog law; on the wave side it is the
/// unit-`L^2` packet whose square modulus reproduces that density — except
/// for the variance-gamma kind, whose packet is the self-reproducing
/// spectral power law instead (its `|psi_0|^2` is intentionally not the VG
/// density).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialState {
    pub kind: StateKind,
    /// Length scale `b > 0`.
    pub scale: f64,
    /// Optional plane-wave momentum `k_0`: multiplies the packet by
    /// `e^{i k_0 x}`, i.e. shifts the spectrum to `psihat_0(u - k_0)`.
    pub phase: f64,
}

impl InitialState {
    pub fn new(kind: StateKind, scale: f64, phase: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Domain(format!(
                "initial scale must be positive and finite, got {scale}"
            )));
        }
        if !phase.is_finite() {
            return Err(Error::Domain(format!(
                "plane-wave phase must be finite, got {phase}"
            )));
        }
        match kind {
            StateKind::VarianceGamma { nu } | StateKind::Relativistic { nu } => {
                if !(nu > 0.0) || !nu.is_finite() {
                    return Err(Error::Domain(format!(
                        "initial shape must be positive and finite, got {nu}"
                    )));
                }
            }
            _ => {}
        }
        Ok(InitialState { kind, scale, phase })
    }

    /// The catalog law whose density is the process-side initial condition.
    pub fn law(&self) -> Result<LawSpec> {
        let family = match self.kind {
            StateKind::Normal => Family::Normal,
            StateKind::Cauchy => Family::Cauchy,
            StateKind::Student3 => Family::Student { alpha: 3.0 },
            StateKind::Laplace => Family::Laplace,
            StateKind::VarianceGamma { nu } => Family::VarianceGamma { nu },
            StateKind::Relativistic { nu } => Family::Relativistic { nu },
        };
        LawSpec::new(family, self.scale)
    }

    fn density_tail(&self) -> TailClass {
        self.law().map_or(TailClass::Exponential, |l| law_density_tail(&l))
    }

    fn wave_tail(&self) -> TailClass {
        match self.kind {
            StateKind::Cauchy => TailClass::Algebraic { power: 2.0 },
            StateKind::Student3 => TailClass::Algebraic { power: 4.0 },
            _ => TailClass::Exponential,
        }
    }

    /// Base spectrum `psihat_0(w)` before the plane-wave shift; real and
    /// positive.  Diverges logarithmically at `w = 0` for the Cauchy kind,
    /// which [`spectrum_on_grid`](Self::spectrum_on_grid) handles by cell
    /// averaging; direct calls there are rejected.
    pub fn base_spectrum(&self, w: f64) -> Result<f64> {
        let b = self.scale;
        match self.kind {
            StateKind::Normal => Ok((2.0 * b * b / PI).powf(0.25) * (-b * b * w * w).exp()),
            StateKind::Cauchy => {
                let z = b * w.abs();
                if z == 0.0 {
                    return Err(Error::Singularity(
                        "the Cauchy packet spectrum diverges logarithmically at u = 0; \
                         sample it through cell averages"
                            .into(),
                    ));
                }
                if z > 700.0 {
                    return Ok(0.0);
                }
                Ok((2.0 * b).sqrt() / PI * bessel_k0(z)?)
            }
            StateKind::Student3 => Ok(b.sqrt() * (-b * w.abs()).exp()),
            StateKind::Laplace => Ok(2.0 * (b / PI).sqrt() / (1.0 + 4.0 * b * b * w * w)),
            StateKind::VarianceGamma { nu } => {
                if nu <= 0.25 {
                    return Err(Error::Domain(format!(
                        "the variance-gamma packet needs nu > 1/4, got {nu}"
                    )));
                }
                let amp = (b * gamma_real(2.0 * nu)?
                    / (PI.sqrt() * gamma_real(2.0 * nu - 0.5)?))
                .sqrt();
                Ok(amp * (1.0 + b * b * w * w).powf(-nu))
            }
            StateKind::Relativistic { nu } => {
                // amp^2 integrates e^{-2 nu sqrt(1+b^2 w^2)} to exactly 1
                // (substitute b w = sinh): no extra e^{nu} factor here.
                let amp = (b / (2.0 * bessel_k1(2.0 * nu)?)).sqrt();
                Ok(amp * (-nu * (1.0 + b * b * w * w).sqrt()).exp())
            }
        }
    }

    /// The initial wave packet `psi_0(x) e^{i k_0 x}` in position space.
    pub fn initial_wave(&self, x: f64) -> Result<Complex64> {
        let b = self.scale;
        let base: Complex64 = match self.kind {
            StateKind::Normal => {
                Complex64::new((2.0 * PI * b * b).powf(-0.25) * (-x * x / (4.0 * b * b)).exp(), 0.0)
            }
            StateKind::Cauchy => Complex64::new(
                1.0 / ((PI * b).sqrt() * (1.0 + x * x / (b * b)).sqrt()),
                0.0,
            ),
            StateKind::Student3 => Complex64::new((2.0 * b / PI).sqrt() * b / (b * b + x * x), 0.0),
            StateKind::Laplace => {
                Complex64::new((-x.abs() / (2.0 * b)).exp() / (2.0 * b).sqrt(), 0.0)
            }
            StateKind::VarianceGamma { nu } => crate::solutions::vg_wf(x, 0.0, 0.0, nu, b)?,
            StateKind::Relativistic { nu } => crate::solutions::rqm_wf(x, 0.0, 0.0, nu, b)?,
        };
        Ok(base * Complex64::new(0.0, self.phase * x).exp())
    }

    /// Sample the packet spectrum on the grid, applying the plane-wave shift
    /// `u -> u - k_0`.  For the Cauchy kind the [`SINGULAR_BAND`] central
    /// cells are exact cell averages of the `K_0` spectrum, which keeps the
    /// rectangle inversion sum faithful to the continuum integral through the
    /// logarithmic singularity.
    pub fn spectrum_on_grid(&self, grid: &GridPair) -> Result<Vec<Complex64>> {
        let n = grid.n();
        let du = grid.du();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        let singular = matches!(self.kind, StateKind::Cauchy);
        // the base spectrum is even, so with no phase shift the two grid
        // halves mirror each other: u_{N-k} = -u_k
        let mirror = self.phase == 0.0;
        for k in 0..n {
            if mirror && k > grid.center() {
                out[k] = out[n - k];
                continue;
            }
            let w = grid.u(k) - self.phase;
            let value = if singular && w.abs() < (SINGULAR_BAND as f64 + 0.5) * du {
                self.k0_cell_average(w - 0.5 * du, w + 0.5 * du)?
            } else {
                self.base_spectrum(w)?
            };
            out[k] = Complex64::new(value, 0.0);
        }
        Ok(out)
    }

    /// Mean of the Cauchy packet spectrum over the frequency cell
    /// `[lo, hi]`, exact through the `K_0` log singularity: the singular part
    /// integrates in closed form and the smooth remainder
    /// `K_0(z) + ln(z/2) + gamma_E` by quadrature.
    fn k0_cell_average(&self, lo: f64, hi: f64) -> Result<f64> {
        let b = self.scale;
        let primitive = |z: f64| -> Result<f64> {
            // integral of K_0(b v) dv over [0, z]
            if z <= 0.0 {
                return Ok(0.0);
            }
            let zz = b * z;
            let smooth = adaptive_integrate(
                |v| bessel_k0(v).expect("K_0 is defined on the open positive axis")
                    + (v / 2.0).ln()
                    + EULER_MASCHERONI,
                0.0,
                zz,
                1e-13,
            )?;
            Ok((zz * (1.0 - EULER_MASCHERONI + LN_2 - zz.ln()) + smooth.value) / b)
        };
        let integral = if lo >= 0.0 {
            primitive(hi)? - primitive(lo)?
        } else if hi <= 0.0 {
            primitive(-lo)? - primitive(-hi)?
        } else {
            primitive(-lo)? + primitive(hi)?
        };
        Ok((2.0 * b).sqrt() / PI * integral / (hi - lo))
    }
}

// ---------------------------------------------------------------------------
// scenario
// ---------------------------------------------------------------------------

/// Numerical tolerances of a scenario.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Admissible relative spectrum magnitude at the frequency boundary.
    pub aliasing: f64,
    /// Target for mass/norm accounting including tail estimates.
    pub truncation: f64,
    /// Tolerance of series evaluations (compound-Poisson components).
    pub series: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            aliasing: 1e-8,
            truncation: 1e-6,
            series: 1e-12,
        }
    }
}

/// Which side(s) of the evolution a run should produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvolutionMode {
    Process,
    Schrodinger,
    Both,
}

/// A complete evolution problem: noise, time scale, initial state, grids,
/// output times, and tolerances.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub noise: NoiseModel,
    pub rates: RateParams,
    pub initial: InitialState,
    pub grid: GridPair,
    pub times: Vec<f64>,
    pub tolerances: Tolerances,
    pub mode: EvolutionMode,
}

impl Scenario {
    pub fn new(
        noise: NoiseModel,
        rates: RateParams,
        initial: InitialState,
        grid: GridPair,
        times: Vec<f64>,
        tolerances: Tolerances,
        mode: EvolutionMode,
    ) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::Config(format!(
                "a scenario needs at least two output times, got {}",
                times.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::Config(format!(
                "the first output time must be 0, got {}",
                times[0]
            )));
        }
        for pair in times.windows(2) {
            if !pair[1].is_finite() || pair[1] <= pair[0] {
                return Err(Error::Config(format!(
                    "output times must be finite and strictly increasing, got {} after {}",
                    pair[1], pair[0]
                )));
            }
        }
        for (name, t) in [
            ("aliasing", tolerances.aliasing),
            ("truncation", tolerances.truncation),
            ("series", tolerances.series),
        ] {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::Config(format!(
                    "{name} tolerance must be positive and finite, got {t}"
                )));
            }
        }
        Ok(Scenario {
            noise,
            rates,
            initial,
            grid,
            times,
            tolerances,
            mode,
        })
    }

    /// Per-unit-time symbol `eta(u)` sampled on the frequency grid.
    pub fn symbol_samples(&self) -> Result<Vec<f64>> {
        self.grid
            .us()
            .iter()
            .map(|&u| self.noise.symbol(&self.rates, u))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// fields
// ---------------------------------------------------------------------------

/// Evolved process densities: one nonnegative slice per time.
#[derive(Clone, Debug)]
pub struct DensityField {
    pub grid: GridPair,
    pub times: Vec<f64>,
    /// `slices[i][j]` is the density at `(x_j, times[i])`.
    pub slices: Vec<Vec<f64>>,
    /// Largest `|imaginary part|` discarded during inversion.
    pub max_imag: f64,
    pub tail: TailClass,
    /// True when each slice is the spectral periodization of the line
    /// density, i.e. mass beyond the window is folded back into it.  Engine
    /// output always is; closed-form-sampled fields are not.
    pub periodic: bool,
}

/// Evolved wave packets: one complex slice per time.
#[derive(Clone, Debug)]
pub struct WaveField {
    pub grid: GridPair,
    pub times: Vec<f64>,
    /// `slices[i][j]` is `psi(x_j, times[i])`.
    pub slices: Vec<Vec<Complex64>>,
    /// One-time factor applied to the initial spectrum so its discrete
    /// `L^2`-norm is exactly 1 (1.0 when the discretization drift was within
    /// 1e-10 already).  Logged, never reapplied per slice.
    pub renorm: f64,
    /// Declared decay class of `|psi|^2`.
    pub tail: TailClass,
    /// True when each slice is a spectral periodization (see
    /// [`DensityField::periodic`]).
    pub periodic: bool,
}

// ---------------------------------------------------------------------------
// parallel slice evaluation
// ---------------------------------------------------------------------------

/// Worker-thread cap: `LEVYPACKET_THREADS` when set to a positive integer,
/// otherwise the machine's available parallelism.
pub fn thread_budget() -> usize {
    if let Ok(raw) = std::env::var("LEVYPACKET_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n >= 1 {
                return n.min(64);
            }
        }
    }
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Evaluate `f(0..count)` on scoped worker threads (work-stealing by atomic
/// counter) and collect the results in index order, propagating the first
/// error.  Results are identical regardless of the thread count.
pub(crate) fn par_map<T, F>(count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    if count == 0 {
        return Ok(Vec::new());
    }
    let workers = thread_budget().min(count);
    if workers <= 1 {
        return (0..count).map(f).collect();
    }
    let slots: Mutex<Vec<Option<Result<T>>>> = Mutex::new((0..count).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let value = f(i);
                slots.lock().expect("result mutex poisoned")[i] = Some(value);
            });
        }
    });
    slots
        .into_inner()
        .expect("result mutex poisoned")
        .into_iter()
        .map(|slot| slot.expect("worker filled every slot"))
        .collect()
}

// ---------------------------------------------------------------------------
// slice-level spectral steps
// ---------------------------------------------------------------------------

/// One process slice: multiply the spectrum by `e^{t eta}` and invert.
/// Returns the density and the largest discarded imaginary part.
pub fn propagate_chf(
    grid: &GridPair,
    chf0: &[Complex64],
    eta: &[f64],
    t: f64,
    aliasing_tol: f64,
) -> Result<(Vec<f64>, f64)> {
    if chf0.len() != eta.len() {
        return Err(Error::Domain(format!(
            "spectrum and symbol lengths differ: {} vs {}",
            chf0.len(),
            eta.len()
        )));
    }
    let phi: Vec<Complex64> = chf0
        .iter()
        .zip(eta)
        .map(|(&c, &e)| c * (t * e).exp())
        .collect();
    chf_to_pdf(grid, &phi, aliasing_tol)
}

/// One wave slice: multiply the spectrum by the unimodular `e^{i t eta}` and
/// invert.
pub fn propagate_wf(
    grid: &GridPair,
    psihat0: &[Complex64],
    eta: &[f64],
    t: f64,
    aliasing_tol: f64,
) -> Result<Vec<Complex64>> {
    if psihat0.len() != eta.len() {
        return Err(Error::Domain(format!(
            "spectrum and symbol lengths differ: {} vs {}",
            psihat0.len(),
            eta.len()
        )));
    }
    let psihat: Vec<Complex64> = psihat0
        .iter()
        .zip(eta)
        .map(|(&p, &e)| p * Complex64::new(0.0, t * e).exp())
        .collect();
    wfhat_to_wf(grid, &psihat, aliasing_tol)
}

// ---------------------------------------------------------------------------
// engine entry points
// ---------------------------------------------------------------------------

/// Evolve the process density: `chi(u,t) = e^{t eta(u)} chi_0(u)`, inverted
/// per time slice.
pub fn evolve_process(scenario: &Scenario) -> Result<DensityField> {
    if !scenario.noise.is_infinitely_divisible() {
        return Err(Error::NotInfinitelyDivisible(
            "the noise law cannot drive a continuous-time evolution".into(),
        ));
    }
    let grid = scenario.grid;
    let law0 = scenario.initial.law()?;
    let chf0: Vec<Complex64> = grid
        .us()
        .iter()
        .map(|&u| law0.chf(u).map(|c| Complex64::new(c, 0.0)))
        .collect::<Result<_>>()?;
    let eta = scenario.symbol_samples()?;
    let results = par_map(scenario.times.len(), |i| {
        propagate_chf(
            &grid,
            &chf0,
            &eta,
            scenario.times[i],
            scenario.tolerances.aliasing,
        )
    })?;
    let mut slices = Vec::with_capacity(results.len());
    let mut max_imag = 0.0_f64;
    for (slice, imag) in results {
        slices.push(slice);
        max_imag = max_imag.max(imag);
    }
    Ok(DensityField {
        grid,
        times: scenario.times.clone(),
        slices,
        max_imag,
        tail: scenario
            .initial
            .density_tail()
            .heavier(scenario.noise.density_tail()),
        periodic: true,
    })
}

/// Evolve the wave packet: `psihat(u,t) = e^{i t eta(u)} psihat_0(u)`,
/// inverted per time slice.  The initial spectrum is renormalized once if its
/// discrete `L^2`-norm drifts from 1 by more than 1e-10; the factor is
/// reported on the field.
pub fn evolve_wavepacket(scenario: &Scenario) -> Result<WaveField> {
    if !scenario.noise.is_infinitely_divisible() {
        return Err(Error::NotInfinitelyDivisible(
            "the noise law cannot drive a continuous-time evolution".into(),
        ));
    }
    let grid = scenario.grid;
    let mut psihat0 = scenario.initial.spectrum_on_grid(&grid)?;
    let norm = (grid.du() * psihat0.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Domain(format!(
            "initial packet spectrum has unusable discrete norm {norm}"
        )));
    }
    let renorm = if (norm - 1.0).abs() > 1e-10 {
        1.0 / norm
    } else {
        1.0
    };
    if renorm != 1.0 {
        for v in psihat0.iter_mut() {
            *v *= renorm;
        }
    }
    let eta = scenario.symbol_samples()?;
    let slices = par_map(scenario.times.len(), |i| {
        propagate_wf(
            &grid,
            &psihat0,
            &eta,
            scenario.times[i],
            scenario.tolerances.aliasing,
        )
    })?;
    Ok(WaveField {
        grid,
        times: scenario.times.clone(),
        slices,
        renorm,
        tail: scenario
            .initial
            .wave_tail()
            .heavier(scenario.noise.wave_tail()),
        periodic: true,
    })
}

// ---------------------------------------------------------------------------
// residuals
// ---------------------------------------------------------------------------

/// Evolution-equation residual over probe points and interior times.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    /// Interior times at which the central time difference was formed.
    pub times: Vec<f64>,
    pub probes: Vec<f64>,
    /// `magnitudes[i][j]` is `|residual|` at `(times[i], probes[j])`.
    pub magnitudes: Vec<Vec<f64>>,
    pub max_residual: f64,
    /// Largest `|time derivative|` over the same points.
    pub max_rate: f64,
    /// `max_residual / max_rate` (0 when both vanish).
    pub relative: f64,
}

fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 3 {
        return Err(Error::Domain(format!(
            "residuals need at least three time slices, got {}",
            times.len()
        )));
    }
    let dt = times[1] - times[0];
    for pair in times.windows(2) {
        if ((pair[1] - pair[0]) - dt).abs() > 1e-9 * dt.abs().max(1e-12) {
            return Err(Error::Domain(format!(
                "residuals need uniform time spacing; found steps {} and {}",
                dt,
                pair[1] - pair[0]
            )));
        }
    }
    Ok(dt)
}

/// Default probe positions: 65 evenly spaced points spanning the symmetric
/// interval that carries 99.5% of the middle slice's weight.
fn default_probes(grid: &GridPair, weight: &[f64]) -> Vec<f64> {
    let c = grid.center();
    let total: f64 = weight.iter().sum();
    let mut radius = grid.half_width() / 4.0;
    if total > 0.0 {
        let mut cum = weight[c];
        for k in 1..c {
            cum += weight[c + k] + weight[c - k];
            if cum >= 0.995 * total {
                radius = grid.x(c + k);
                break;
            }
        }
    }
    let radius = radius.max(8.0 * grid.dx());
    let count = 65usize;
    (0..count)
        .map(|i| -radius + 2.0 * radius * i as f64 / (count - 1) as f64)
        .collect()
}

fn residual_core(
    times: &[f64],
    splines: &[ComplexSpline],
    schrodinger: bool,
    triplet: &LevyTriplet,
    probes: Vec<f64>,
    tol: f64,
) -> Result<ResidualReport> {
    let dt = uniform_step(times)?;
    let interior: Vec<usize> = (1..times.len() - 1).collect();
    let np = probes.len();
    let flat = par_map(interior.len() * np, |idx| {
        let i = interior[idx / np];
        let x = probes[idx % np];
        let ddt = (splines[i + 1].value(x) - splines[i - 1].value(x)) / (2.0 * dt);
        let generator = pv_generator_apply(&splines[i], triplet, x, tol)?;
        let residual = if schrodinger {
            Complex64::new(0.0, 1.0) * ddt + generator
        } else {
            ddt - generator
        };
        Ok((residual.norm(), ddt.norm()))
    })?;
    let mut magnitudes = Vec::with_capacity(interior.len());
    let mut max_residual = 0.0_f64;
    let mut max_rate = 0.0_f64;
    for chunk in flat.chunks(np) {
        let mut row = Vec::with_capacity(np);
        for &(r, d) in chunk {
            max_residual = max_residual.max(r);
            max_rate = max_rate.max(d);
            row.push(r);
        }
        magnitudes.push(row);
    }
    let relative = if max_rate > 0.0 {
        max_residual / max_rate
    } else if max_residual > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(ResidualReport {
        times: interior.iter().map(|&i| times[i]).collect(),
        probes,
        magnitudes,
        max_residual,
        max_rate,
        relative,
    })
}

/// Residual of the process evolution equation
/// `d rho/dt = (gamma^2/2) rho'' + PV integral [rho(x+y) - rho(x)] l(y) dy`
/// on spline-interpolated slices: central time difference minus the
/// per-unit-time generator.  `probes` defaults to a 65-point span of the
/// middle slice's mass.
pub fn process_residual(
    field: &DensityField,
    noise: &NoiseModel,
    rates: &RateParams,
    probes: Option<Vec<f64>>,
    tol: f64,
) -> Result<ResidualReport> {
    let triplet = noise.rate_triplet(rates)?;
    let splines: Vec<ComplexSpline> = field
        .slices
        .iter()
        .map(|s| ComplexSpline::from_real(field.grid.x(0), field.grid.dx(), s))
        .collect::<Result<_>>()?;
    let probes =
        probes.unwrap_or_else(|| default_probes(&field.grid, &field.slices[field.slices.len() / 2]));
    residual_core(&field.times, &splines, false, &triplet, probes, tol)
}

/// Residual of the wave evolution equation
/// `i d psi/dt = -(gamma^2/2) psi'' - PV integral [psi(x+y) - psi(x)] l(y) dy`:
/// `i` times the central time difference plus the per-unit-time generator.
pub fn schrodinger_residual(
    field: &WaveField,
    noise: &NoiseModel,
    rates: &RateParams,
    probes: Option<Vec<f64>>,
    tol: f64,
) -> Result<ResidualReport> {
    let triplet = noise.rate_triplet(rates)?;
    let splines: Vec<ComplexSpline> = field
        .slices
        .iter()
        .map(|s| ComplexSpline::new(field.grid.x(0), field.grid.dx(), s))
        .collect::<Result<_>>()?;
    let probes = probes.unwrap_or_else(|| {
        let mid: Vec<f64> = field.slices[field.slices.len() / 2]
            .iter()
            .map(|v| v.norm_sqr())
            .collect();
        default_probes(&field.grid, &mid)
    });
    residual_core(&field.times, &splines, true, &triplet, probes, tol)
}
