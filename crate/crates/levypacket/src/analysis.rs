//! Diagnostics over evolved fields: mass/norm accounting with analytic tail
//! estimates, variances with infinite-variance detection, mode structure and
//! the onset of bimodality, and the second-kind-Beta square-root identities
//! that decompose the Cauchy-evolved Student density into a two-component
//! mixture.
//!
//! Tail estimates fit the declared decay class of a field through two
//! right-edge samples: algebraic classes use the inverse-power model
//! `C (x^2 + c^2)^{-p/2}` (exact for every algebraic-tailed profile in the
//! catalog), exponential classes a pure exponential.  For spectrally
//! periodized slices the window already holds the folded tail mass, so the
//! reported grid part is unfolded by the same estimate and the total stays an
//! honest account of the full-line mass.

use crate::error::{Error, Result};
use crate::evolution::{
    evolve_wavepacket, propagate_wf, DensityField, Scenario, TailClass, WaveField,
};
use crate::solutions::cauchy_student_pdf;
use crate::specfun::{bessel_k0, beta_fn};
use crate::spectral::{adaptive_integrate, GridPair};

/// Default mode prominence threshold as a fraction of the global maximum.
/// Chosen to suppress near-origin micro-oscillations of heavy-shape packets
/// (visible ripples of relative size well below a percent) without hiding
/// genuine satellite maxima.
pub const DEFAULT_PROMINENCE: f64 = 0.01;

// ---------------------------------------------------------------------------
// tail models
// ---------------------------------------------------------------------------

/// Fitted one-sided tail continuation of a profile beyond the window edge.
#[derive(Clone, Copy, Debug)]
enum TailModel {
    /// Nothing measurable beyond the edge.
    Zero,
    /// `C (x^2 + c^2)^{-p/2}` through both samples.
    InversePower { c: f64, csq: f64, p: f64 },
    /// `fb e^{-lam (x - xb)}`, anchored at the outer sample so that extreme
    /// decay rates never overflow an absolute amplitude.
    Exponential { fb: f64, xb: f64, lam: f64 },
}

impl TailModel {
    /// Fit the declared class through samples `(xa, fa)` and `(xb, fb)` with
    /// `0 < xa < xb`; degenerate or non-decaying samples give `Zero`.
    fn fit(xa: f64, fa: f64, xb: f64, fb: f64, class: TailClass) -> TailModel {
        if !(fb > 1e-300) || !(fa > fb) || !fa.is_finite() {
            return TailModel::Zero;
        }
        match class {
            TailClass::Exponential => {
                let lam = (fa / fb).ln() / (xb - xa);
                if lam > 0.0 && lam.is_finite() {
                    TailModel::Exponential { fb, xb, lam }
                } else {
                    TailModel::Zero
                }
            }
            TailClass::Algebraic { power: p } => {
                // (fa/fb)^(2/p) = (xb^2 + c^2)/(xa^2 + c^2)
                let r = (fa / fb).powf(2.0 / p);
                let csq = (xb * xb - r * xa * xa) / (r - 1.0);
                if csq.is_finite() && csq > 0.0 {
                    TailModel::InversePower {
                        c: fb * (xb * xb + csq).powf(p / 2.0),
                        csq,
                        p,
                    }
                } else {
                    // fall back to the pure power law pinned at the outer
                    // sample
                    TailModel::InversePower {
                        c: fb * xb.powf(p),
                        csq: 0.0,
                        p,
                    }
                }
            }
        }
    }

    /// `integral_x0^inf  x^k model(x) dx` for `k` in {0, 2}.
    fn moment_beyond(&self, x0: f64, k: u32) -> Result<f64> {
        match *self {
            TailModel::Zero => Ok(0.0),
            TailModel::Exponential { fb, xb, lam } => {
                // closed forms: int e^{-lam x} and int x^2 e^{-lam x}; the
                // exponent stays small because x0 sits near the anchor
                let e = fb * (-lam * (x0 - xb)).exp();
                Ok(match k {
                    0 => e / lam,
                    _ => e * (x0 * x0 / lam + 2.0 * x0 / (lam * lam) + 2.0 / (lam * lam * lam)),
                })
            }
            TailModel::InversePower { c, csq, p } => {
                if (k as f64) + 1.0 >= p {
                    return Err(Error::Domain(format!(
                        "moment of order {k} diverges for tail power {p}"
                    )));
                }
                let q = adaptive_integrate(
                    |x| x.powi(k as i32) * (x * x + csq).powf(-p / 2.0),
                    x0,
                    f64::INFINITY,
                    1e-13,
                )?;
                Ok(c * q.value)
            }
        }
    }
}

/// Fit left and right tail continuations of an even-dominated profile from
/// samples at the window edges and at three quarters of the way out.
fn edge_models(grid: &GridPair, profile: &[f64], class: TailClass) -> (TailModel, TailModel) {
    let n = profile.len();
    let jb = n - 1;
    let ja = n / 2 + (3 * (n / 2 - 1)) / 4;
    let right = TailModel::fit(grid.x(ja), profile[ja], grid.x(jb), profile[jb], class);
    let ja_l = n - 1 - ja;
    let left = TailModel::fit(
        -grid.x(ja_l),
        profile[ja_l],
        -grid.x(0),
        profile[0],
        class,
    );
    (left, right)
}

// ---------------------------------------------------------------------------
// norms
// ---------------------------------------------------------------------------

/// Mass accounting of one slice: the windowed grid integral, the analytic
/// estimate of the mass beyond the window, and their sum.
#[derive(Clone, Copy, Debug)]
pub struct NormReport {
    pub time: f64,
    /// Estimated mass inside the window.  For periodized slices the raw
    /// window integral minus the folded-in tail estimate.
    pub grid_part: f64,
    /// Estimated mass beyond the window, from the declared tail class.
    pub tail_estimate: f64,
    /// `grid_part + tail_estimate`; the full-line mass.
    pub total: f64,
}

fn profile_report(
    grid: &GridPair,
    profile: &[f64],
    time: f64,
    class: TailClass,
    periodic: bool,
) -> Result<NormReport> {
    let dx = grid.dx();
    let trapz = dx
        * (profile.iter().sum::<f64>() - 0.5 * (profile[0] + profile[profile.len() - 1]));
    let (left, right) = edge_models(grid, profile, class);
    // the trapezoid covers [x_0, x_{n-1}]; each tail starts at its own edge
    let tail = left.moment_beyond(-grid.x(0), 0)?
        + right.moment_beyond(grid.x(profile.len() - 1), 0)?;
    let grid_part = if periodic { trapz - tail } else { trapz };
    Ok(NormReport {
        time,
        grid_part,
        tail_estimate: tail,
        total: grid_part + tail,
    })
}

/// Per-slice mass accounting of a density field (the L^1 norm).
pub fn density_norms(field: &DensityField) -> Result<Vec<NormReport>> {
    field
        .times
        .iter()
        .zip(&field.slices)
        .map(|(&t, slice)| profile_report(&field.grid, slice, t, field.tail, field.periodic))
        .collect()
}

/// Per-slice mass accounting of `|psi|^2` for a wave field (the squared L^2
/// norm; a total of 1 means the packet is normalized).
pub fn wave_norms(field: &WaveField) -> Result<Vec<NormReport>> {
    field
        .times
        .iter()
        .zip(&field.slices)
        .map(|(&t, slice)| {
            let profile: Vec<f64> = slice.iter().map(|v| v.norm_sqr()).collect();
            profile_report(&field.grid, &profile, t, field.tail, field.periodic)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// variance
// ---------------------------------------------------------------------------

/// Second central moment of a slice, or the infinite-variance flag when the
/// declared tail class rules a finite value out.  Window moments of such
/// slices are finite numbers with no meaning, hence the flag is decided by
/// the class, never numerically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Variance {
    Finite(f64),
    Infinite,
}

/// Variance of a nonnegative profile with the given declared tail: windowed
/// trapezoid moments plus the fitted-model `x^2` tail correction, normalized
/// by the same account of the mass.  The tail correction treats the profile
/// as even (all catalog scenarios are, up to a plane-wave drift that moves
/// the center well inside the window).
pub fn variance_of(grid: &GridPair, profile: &[f64], class: TailClass) -> Result<Variance> {
    if !class.variance_is_finite() {
        return Ok(Variance::Infinite);
    }
    let dx = grid.dx();
    let n = profile.len();
    let mut mass = 0.0;
    let mut first = 0.0;
    let mut second = 0.0;
    for (j, &f) in profile.iter().enumerate() {
        let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        let x = grid.x(j);
        mass += w * f;
        first += w * f * x;
        second += w * f * x * x;
    }
    mass *= dx;
    first *= dx;
    second *= dx;
    let (left, right) = edge_models(grid, profile, class);
    let x_left = -grid.x(0);
    let x_right = grid.x(n - 1);
    let tail_mass = left.moment_beyond(x_left, 0)? + right.moment_beyond(x_right, 0)?;
    let tail_second = left.moment_beyond(x_left, 2)? + right.moment_beyond(x_right, 2)?;
    let mass = mass + tail_mass;
    let second = second + tail_second;
    if !(mass > 0.0) {
        return Err(Error::Domain("profile carries no mass".into()));
    }
    let mean = first / mass;
    Ok(Variance::Finite(second / mass - mean * mean))
}

/// Per-slice variances of a density field.
pub fn density_variances(field: &DensityField) -> Result<Vec<Variance>> {
    field
        .slices
        .iter()
        .map(|s| variance_of(&field.grid, s, field.tail))
        .collect()
}

/// Per-slice variances of `|psi|^2` for a wave field.
pub fn wave_variances(field: &WaveField) -> Result<Vec<Variance>> {
    field
        .slices
        .iter()
        .map(|s| {
            let profile: Vec<f64> = s.iter().map(|v| v.norm_sqr()).collect();
            variance_of(&field.grid, &profile, field.tail)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// modes
// ---------------------------------------------------------------------------

/// Local maxima of one slice after prominence filtering.
#[derive(Clone, Debug)]
pub struct ModeReport {
    pub time: f64,
    /// Mode positions, ascending.
    pub positions: Vec<f64>,
    /// Topographic prominence of each mode (same order).
    pub prominences: Vec<f64>,
    pub count: usize,
}

/// Find the local maxima of a nonnegative profile whose topographic
/// prominence is at least `prominence` (a fraction of the global maximum;
/// [`DEFAULT_PROMINENCE`] when `None`).  Plateaus count once, positioned at
/// their center; window boundaries never count.
///
/// The default threshold is a display choice: profiles on the verge of
/// bimodality grow maxima of arbitrarily small prominence, so onset scans
/// should pass an explicit threshold just above roundoff instead.
pub fn find_modes(
    grid: &GridPair,
    profile: &[f64],
    time: f64,
    prominence: Option<f64>,
) -> ModeReport {
    let n = profile.len();
    let global = profile.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let threshold = prominence.unwrap_or(DEFAULT_PROMINENCE) * global;
    let mut positions = Vec::new();
    let mut prominences = Vec::new();
    if !(global > 0.0) || n < 3 {
        return ModeReport {
            time,
            positions,
            prominences,
            count: 0,
        };
    }
    let mut j = 1;
    while j < n - 1 {
        // maximal run of equal values starting at j
        let start = j;
        let mut end = j;
        while end + 1 < n && profile[end + 1] == profile[start] {
            end += 1;
        }
        let h = profile[start];
        let is_peak = profile[start - 1] < h && end < n - 1 && profile[end + 1] < h;
        // peaks lower than the threshold cannot clear it in prominence
        if is_peak && h >= threshold {
            let base = |mut i: isize, step: isize| -> f64 {
                let mut low = h;
                while i >= 0 && (i as usize) < n {
                    let v = profile[i as usize];
                    if v > h {
                        return low;
                    }
                    low = low.min(v);
                    i += step;
                }
                low
            };
            let left = base(start as isize - 1, -1);
            let right = base(end as isize + 1, 1);
            let prom = h - left.max(right);
            if prom >= threshold {
                positions.push(0.5 * (grid.x(start) + grid.x(end)));
                prominences.push(prom);
            }
        }
        j = end + 1;
    }
    let count = positions.len();
    ModeReport {
        time,
        positions,
        prominences,
        count,
    }
}

/// Modes of each slice of a density field.
pub fn density_modes(field: &DensityField, prominence: Option<f64>) -> Vec<ModeReport> {
    field
        .times
        .iter()
        .zip(&field.slices)
        .map(|(&t, s)| find_modes(&field.grid, s, t, prominence))
        .collect()
}

/// Modes of `|psi|^2` for each slice of a wave field.
pub fn wave_modes(field: &WaveField, prominence: Option<f64>) -> Vec<ModeReport> {
    field
        .times
        .iter()
        .zip(&field.slices)
        .map(|(&t, s)| {
            let profile: Vec<f64> = s.iter().map(|v| v.norm_sqr()).collect();
            find_modes(&field.grid, &profile, t, prominence)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// bimodality onset
// ---------------------------------------------------------------------------

/// Refined first time at which `|psi|^2` turns bimodal.
#[derive(Clone, Copy, Debug)]
pub struct BimodalityOnset {
    /// Midpoint of the final bracket.
    pub time: f64,
    /// Last time observed unimodal.
    pub lower: f64,
    /// First time observed bimodal.
    pub upper: f64,
}

/// Locate the onset of bimodality of the scenario's wave packet: evolve the
/// scenario, require the per-slice mode counts to step monotonically from 1
/// to at least 2, and refine the stepping interval by bisection with
/// `refinements` extra single-slice evolutions.  Returns `None` when every
/// slice stays unimodal.
pub fn bimodality_onset(
    scenario: &Scenario,
    prominence: Option<f64>,
    refinements: usize,
) -> Result<Option<BimodalityOnset>> {
    let field = evolve_wavepacket(scenario)?;
    let reports = wave_modes(&field, prominence);
    let counts: Vec<usize> = reports.iter().map(|r| r.count).collect();
    if counts[0] != 1 {
        return Err(Error::Domain(format!(
            "bimodality onset expects a unimodal initial slice, found {} modes",
            counts[0]
        )));
    }
    for pair in counts.windows(2) {
        if pair[1] < pair[0] {
            return Err(Error::Domain(format!(
                "mode counts must be monotone over the time range, found {:?}",
                counts
            )));
        }
    }
    let step = match counts.iter().position(|&c| c >= 2) {
        Some(i) => i,
        None => return Ok(None),
    };
    let mut lower = field.times[step - 1];
    let mut upper = field.times[step];
    // single-slice re-evolutions reuse the (renormalized) initial spectrum
    let mut psihat0 = scenario.initial.spectrum_on_grid(&scenario.grid)?;
    if field.renorm != 1.0 {
        for v in psihat0.iter_mut() {
            *v *= field.renorm;
        }
    }
    let eta = scenario.symbol_samples()?;
    for _ in 0..refinements {
        let mid = 0.5 * (lower + upper);
        let slice = propagate_wf(
            &scenario.grid,
            &psihat0,
            &eta,
            mid,
            scenario.tolerances.aliasing,
        )?;
        let profile: Vec<f64> = slice.iter().map(|v| v.norm_sqr()).collect();
        let count = find_modes(&scenario.grid, &profile, mid, prominence).count;
        if count >= 2 {
            upper = mid;
        } else {
            lower = mid;
        }
    }
    Ok(Some(BimodalityOnset {
        time: 0.5 * (lower + upper),
        lower,
        upper,
    }))
}

// ---------------------------------------------------------------------------
// second-kind-Beta square-root identities
// ---------------------------------------------------------------------------

/// Density of the signed square root of a second-kind Beta variable with
/// shape `(alpha, beta_p)` and length scale `a`:
/// `|x|^{2 alpha - 1} / (B(alpha, beta_p) (1 + x^2)^{alpha + beta_p})` in
/// the unit-scale variable `x/a`.  Shape `(1/2, nu/2)` reproduces the
/// Student law of `nu` degrees.
pub fn beta_sqrt_pdf(alpha: f64, beta_p: f64, a: f64, x: f64) -> Result<f64> {
    for (name, v) in [("alpha", alpha), ("beta", beta_p), ("scale", a)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    let y = x / a;
    let b = beta_fn(alpha, beta_p)?;
    Ok((y * y).powf(alpha - 0.5) / (b * (1.0 + y * y).powf(alpha + beta_p)) / a)
}

/// Characteristic function of the `(3/2, 1/2)` square-root Beta law at scale
/// `a`: `(1 - a|u|) e^{-a|u|}`.
pub fn beta_sqrt_chf(a: f64, u: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!(
            "scale must be positive and finite, got {a}"
        )));
    }
    let z = a * u.abs();
    Ok((1.0 - z) * (-z).exp())
}

/// Verify the two-component mixture decomposition of the law with
/// characteristic function `(1 + b|u|) e^{-(a+b)|u|}` into the square-root
/// Beta pair at scale `a + b`,
///
/// ```text
/// (1 + b|u|) e^{-s|u|} = P (1 - s|u|) e^{-s|u|} + Q (1 + s|u|) e^{-s|u|},
/// s = a + b,   P = a / (2(a+b)),   Q = (a + 2b) / (2(a+b)),
/// ```
///
/// together with the matching density identity and the weight normalization
/// `P + Q = 1`.  Returns the largest absolute discrepancy over the grid's
/// frequency nodes (characteristic-function identity) and position nodes
/// (density identity); both are algebraic, so the result sits at rounding
/// level.
pub fn beta_decomposition_check(a: f64, b: f64, grid: &GridPair) -> Result<f64> {
    for (name, v) in [("a", a), ("b", b)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    let s = a + b;
    let p = a / (2.0 * s);
    let q = (a + 2.0 * b) / (2.0 * s);
    let mut worst = (p + q - 1.0).abs();
    for u in grid.us() {
        let damp = (-s * u.abs()).exp();
        let lhs = (1.0 + b * u.abs()) * damp;
        let rhs = p * beta_sqrt_chf(s, u)? + q * (1.0 + s * u.abs()) * damp;
        worst = worst.max((lhs - rhs).abs());
    }
    for x in grid.xs() {
        // the law is the Cauchy-evolved Student density with width pieces
        // b (initial) and a (accumulated drift)
        let lhs = cauchy_student_pdf(x, a, 1.0, b)?;
        let rhs = p * beta_sqrt_pdf(1.5, 0.5, s, x)? + q * beta_sqrt_pdf(0.5, 1.5, s, x)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// K_0 cross-checks
// ---------------------------------------------------------------------------

/// `integral_0^inf K_0(v)^2 dv`; equal to `pi^2 / 4`.
pub fn k0_square_integral() -> Result<f64> {
    // split off the log-singular corner for a well-behaved first panel
    let near = adaptive_integrate(|v| bessel_k0(v).unwrap().powi(2), 0.0, 1.0, 1e-12)?;
    let far = adaptive_integrate(|v| bessel_k0(v).unwrap().powi(2), 1.0, f64::INFINITY, 1e-12)?;
    Ok(near.value + far.value)
}

/// Self-convolution `integral K_0(|v|) K_0(|u - v|) dv`; equal to
/// `(pi^2 / 2) e^{-|u|}`.
pub fn k0_self_convolution(u: f64) -> Result<f64> {
    let u = u.abs();
    let k0 = |v: f64| bessel_k0(v).unwrap();
    // the two half-lines outside [0, u] fold onto one decaying integral;
    // keep the log-singular corner on a finite panel — the semi-infinite
    // change of variables may otherwise land exactly on the endpoint
    let corner = adaptive_integrate(|w| k0(w) * k0(w + u), 0.0, 1.0, 1e-12)?;
    let far = adaptive_integrate(|w| k0(w) * k0(w + u), 1.0, f64::INFINITY, 1e-12)?;
    let outer = corner.value + far.value;
    if u == 0.0 {
        return Ok(2.0 * outer);
    }
    // inside [0, u] both endpoints are log-singular; fold at the midpoint
    let inner = adaptive_integrate(|v| k0(v) * k0(u - v), 0.0, u / 2.0, 1e-12)?;
    Ok(2.0 * outer + 2.0 * inner.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{
        EvolutionMode, InitialState, NoiseModel, StateKind, Tolerances,
    };
    use std::f64::consts::PI;
    use crate::laws::{Family, LawSpec};
    use crate::solutions::{self, RateParams};

    fn gaussian_density_field(times: &[f64], d: f64, b: f64, n: usize, l: f64) -> DensityField {
        let grid = GridPair::new(n, l).unwrap();
        let slices = times
            .iter()
            .map(|&t| {
                grid.xs()
                    .iter()
                    .map(|&x| solutions::gauss_process_pdf(x, t, d, b).unwrap())
                    .collect()
            })
            .collect();
        DensityField {
            grid,
            times: times.to_vec(),
            slices,
            max_imag: 0.0,
            tail: TailClass::Exponential,
            periodic: false,
        }
    }

    fn student_wave_scenario(n: usize, l: f64, times: &[f64]) -> Scenario {
        Scenario::new(
            NoiseModel::Law(LawSpec::new(Family::Cauchy, 1.0).unwrap()),
            RateParams::new(1.0).unwrap(),
            InitialState::new(StateKind::Student3, 1.0, 0.0).unwrap(),
            GridPair::new(n, l).unwrap(),
            times.to_vec(),
            Tolerances::default(),
            EvolutionMode::Schrodinger,
        )
        .unwrap()
    }

    #[test]
    fn gaussian_density_has_unit_mass() {
        let field = gaussian_density_field(&[0.0, 1.0], 1.0, 1.0, 2048, 30.0);
        for report in density_norms(&field).unwrap() {
            assert!((report.total - 1.0).abs() < 1e-12, "total {}", report.total);
            assert!(report.tail_estimate < 1e-12);
        }
    }

    #[test]
    fn cauchy_mass_splits_into_window_and_arctan_tail() {
        // closed-form Cauchy slice on a deliberately small window: the grid
        // part misses the arctan tail and the fitted inverse-power model
        // recovers it exactly
        let grid = GridPair::new(4096, 40.0).unwrap();
        let law = LawSpec::new(Family::Cauchy, 1.0).unwrap();
        let slice: Vec<f64> = grid.xs().iter().map(|&x| law.pdf(x).unwrap()).collect();
        let field = DensityField {
            grid,
            times: vec![0.0],
            slices: vec![slice],
            max_imag: 0.0,
            tail: TailClass::Algebraic { power: 2.0 },
            periodic: false,
        };
        let report = &density_norms(&field).unwrap()[0];
        // the true out-of-window mass (window edge is L - dx on the right)
        assert!(report.tail_estimate > 0.01);
        assert!(
            (report.total - 1.0).abs() < 1e-8,
            "total {} tail {}",
            report.total,
            report.tail_estimate
        );
    }

    #[test]
    fn periodized_fields_account_for_folded_mass() {
        // engine-evolved Cauchy-noise field: the window integral already
        // contains the folded tail, so grid + tail must still report 1
        let sc = Scenario::new(
            NoiseModel::Law(LawSpec::new(Family::Cauchy, 1.0).unwrap()),
            RateParams::new(1.0).unwrap(),
            InitialState::new(StateKind::Student3, 1.0, 0.0).unwrap(),
            GridPair::new(8192, 500.0).unwrap(),
            vec![0.0, 1.0, 2.0],
            Tolerances::default(),
            EvolutionMode::Process,
        )
        .unwrap();
        let field = crate::evolution::evolve_process(&sc).unwrap();
        for report in density_norms(&field).unwrap() {
            assert!(
                (report.total - 1.0).abs() < 1e-6,
                "t = {}: total {} (grid {} tail {})",
                report.time,
                report.total,
                report.grid_part,
                report.tail_estimate
            );
            assert!(report.tail_estimate > 0.0);
        }
    }

    #[test]
    fn student_packet_l2_mass_is_one() {
        let sc = student_wave_scenario(16384, 1200.0, &[0.0, 0.5, 2.0]);
        let field = evolve_wavepacket(&sc).unwrap();
        for report in wave_norms(&field).unwrap() {
            assert!(
                (report.total - 1.0).abs() < 1e-6,
                "t = {}: total {}",
                report.time,
                report.total
            );
        }
    }

    #[test]
    fn gaussian_variances_follow_the_spreading_laws() {
        let field = gaussian_density_field(&[0.0, 0.7, 1.5], 1.0, 1.0, 4096, 40.0);
        for (&t, v) in field.times.iter().zip(density_variances(&field).unwrap()) {
            match v {
                Variance::Finite(var) => {
                    assert!((var - (2.0 * t + 1.0)).abs() < 1e-8, "t = {t}: {var}")
                }
                Variance::Infinite => panic!("finite variance expected"),
            }
        }
        // packet dispersion: b^2 + D^2 t^2 / b^2
        let grid = GridPair::new(4096, 40.0).unwrap();
        let (d, b) = (1.0, 1.0);
        for t in [0.0, 1.0, 2.5] {
            let profile: Vec<f64> = grid
                .xs()
                .iter()
                .map(|&x| solutions::gauss_wf(x, t, d, b).unwrap().norm_sqr())
                .collect();
            match variance_of(&grid, &profile, TailClass::Exponential).unwrap() {
                Variance::Finite(var) => {
                    let want = b * b + d * d * t * t / (b * b);
                    assert!((var - want).abs() < 1e-8, "t = {t}: {var} vs {want}");
                }
                Variance::Infinite => panic!("finite variance expected"),
            }
        }
    }

    #[test]
    fn heavy_tails_flag_infinite_variance_and_student_stays_finite() {
        let grid = GridPair::new(2048, 60.0).unwrap();
        let law = LawSpec::new(Family::Cauchy, 1.0).unwrap();
        let slice: Vec<f64> = grid.xs().iter().map(|&x| law.pdf(x).unwrap()).collect();
        assert_eq!(
            variance_of(&grid, &slice, TailClass::Algebraic { power: 2.0 }).unwrap(),
            Variance::Infinite
        );
        // Student(3) has variance b^2 exactly; the x^2 tail correction is
        // essential at this window size
        let grid = GridPair::new(8192, 600.0).unwrap();
        let law = LawSpec::new(Family::Student { alpha: 3.0 }, 1.0).unwrap();
        let slice: Vec<f64> = grid.xs().iter().map(|&x| law.pdf(x).unwrap()).collect();
        match variance_of(&grid, &slice, TailClass::Algebraic { power: 4.0 }).unwrap() {
            Variance::Finite(var) => assert!((var - 1.0).abs() < 1e-6, "var {var}"),
            Variance::Infinite => panic!("Student(3) variance is finite"),
        }
    }

    #[test]
    fn modes_of_the_student_packet_split_as_predicted() {
        let grid = GridPair::new(8192, 200.0).unwrap();
        let (v, b) = (1.0, 1.0);
        // vt = 2b: modes at +- sqrt(3) b
        let profile: Vec<f64> = grid
            .xs()
            .iter()
            .map(|&x| solutions::cauchy_student_wf(x, 2.0, v, b).unwrap().norm_sqr())
            .collect();
        let report = find_modes(&grid, &profile, 2.0, None);
        assert_eq!(report.count, 2);
        assert!((report.positions[0] + 3.0_f64.sqrt()).abs() <= grid.dx());
        assert!((report.positions[1] - 3.0_f64.sqrt()).abs() <= grid.dx());
        assert!(report.positions[0] < report.positions[1]);
        // even profile: positions close under negation
        assert!((report.positions[0] + report.positions[1]).abs() <= grid.dx());
        // vt = b/2: still a single central mode
        let profile: Vec<f64> = grid
            .xs()
            .iter()
            .map(|&x| solutions::cauchy_student_wf(x, 0.5, v, b).unwrap().norm_sqr())
            .collect();
        let report = find_modes(&grid, &profile, 0.5, None);
        assert_eq!(report.count, 1);
        assert!(report.positions[0].abs() <= grid.dx());
        // the evolved density, by contrast, never splits
        for t in [0.5, 1.0, 2.0, 4.0] {
            let profile: Vec<f64> = grid
                .xs()
                .iter()
                .map(|&x| solutions::cauchy_student_pdf(x, t, v, b).unwrap())
                .collect();
            assert_eq!(find_modes(&grid, &profile, t, None).count, 1, "t = {t}");
        }
    }

    #[test]
    fn prominence_threshold_suppresses_shallow_structure() {
        // satellite ripples of prominence ~0.4% of the peak: visible to a
        // tight threshold, suppressed by the default; the ripple must be
        // fast enough to beat the envelope slope near the center
        let grid = GridPair::new(2048, 20.0).unwrap();
        let profile: Vec<f64> = grid
            .xs()
            .iter()
            .map(|&x| (-x * x / 8.0).exp() * (1.0 + 0.002 * (40.0 * x).cos()))
            .collect();
        assert_eq!(find_modes(&grid, &profile, 0.0, None).count, 1);
        assert!(find_modes(&grid, &profile, 0.0, Some(1e-5)).count > 1);
    }

    #[test]
    fn bimodality_onset_refines_to_the_exact_threshold() {
        // onset of the Cauchy-noise Student packet is t = b/v = 1; near the
        // threshold the new maxima have vanishing prominence, so the scan
        // must use a near-roundoff threshold
        let sc = student_wave_scenario(4096, 200.0, &[0.0, 0.6, 1.4, 2.0]);
        let onset = bimodality_onset(&sc, Some(1e-6), 12).unwrap().unwrap();
        assert!(onset.lower < onset.time && onset.time < onset.upper);
        assert!(
            (onset.time - 1.0).abs() < 5e-3,
            "onset {} bracket [{}, {}]",
            onset.time,
            onset.lower,
            onset.upper
        );
        // a Gaussian packet under Gaussian noise never splits
        let sc = Scenario::new(
            NoiseModel::Law(LawSpec::new(Family::Normal, 1.0).unwrap()),
            RateParams::new(0.5).unwrap(),
            InitialState::new(StateKind::Normal, 1.0, 0.0).unwrap(),
            GridPair::new(1024, 40.0).unwrap(),
            vec![0.0, 1.0, 2.0, 4.0],
            Tolerances::default(),
            EvolutionMode::Schrodinger,
        )
        .unwrap();
        assert!(bimodality_onset(&sc, Some(1e-6), 4).unwrap().is_none());
    }

    #[test]
    fn square_root_beta_laws_match_their_closed_forms() {
        // (1/2, 3/2) is the Student(3) law
        let student = LawSpec::new(Family::Student { alpha: 3.0 }, 1.0).unwrap();
        for x in [0.0, 0.3, 1.0, 2.7, 9.0] {
            let got = beta_sqrt_pdf(0.5, 1.5, 1.0, x).unwrap();
            assert!((got - student.pdf(x).unwrap()).abs() < 1e-14, "x = {x}");
            let scaled = beta_sqrt_pdf(0.5, 1.5, 2.0, x).unwrap();
            assert!((scaled - student.pdf(x / 2.0).unwrap() / 2.0).abs() < 1e-14);
        }
        // (3/2, 1/2) has the explicit bimodal density
        for x in [0.0, 0.4, 1.0, 3.0] {
            let got = beta_sqrt_pdf(1.5, 0.5, 1.0, x).unwrap();
            let want = (2.0 / PI) * x * x / (1.0 + x * x).powi(2);
            assert!((got - want).abs() < 1e-14, "x = {x}");
        }
        assert!((beta_sqrt_chf(1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(beta_sqrt_pdf(0.0, 1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn beta_mixture_decomposition_is_exact_for_random_scales() {
        let grid = GridPair::new(512, 25.0).unwrap();
        // fixed-seed linear congruential stream over [0.1, 10]^2
        let mut state: u64 = 987654321;
        let mut unit = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / (1u64 << 53) as f64
        };
        for trial in 0..50 {
            let a = 0.1 + 9.9 * unit();
            let b = 0.1 + 9.9 * unit();
            let err = beta_decomposition_check(a, b, &grid).unwrap();
            assert!(err < 1e-12, "trial {trial}: a={a} b={b} err={err}");
        }
    }

    #[test]
    fn k0_identities_hold() {
        assert!((k0_square_integral().unwrap() - PI * PI / 4.0).abs() < 1e-8);
        for u in [0.0_f64, 0.3, 1.0, 2.0, 5.0] {
            let want = PI * PI / 2.0 * (-u.abs()).exp();
            let got = k0_self_convolution(u).unwrap();
            assert!((got - want).abs() < 1e-5, "u = {u}: {got} vs {want}");
        }
    }

    #[test]
    fn process_variance_is_affine_in_time() {
        // finite-variance noise: variance of the evolved density is affine
        // in t; check by least-squares fit over several slices
        let sc = Scenario::new(
            NoiseModel::Law(LawSpec::new(Family::VarianceGamma { nu: 1.5 }, 1.0).unwrap()),
            RateParams::new(1.0).unwrap(),
            InitialState::new(StateKind::Normal, 1.0, 0.0).unwrap(),
            GridPair::new(4096, 60.0).unwrap(),
            vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
            Tolerances::default(),
            EvolutionMode::Process,
        )
        .unwrap();
        let field = crate::evolution::evolve_process(&sc).unwrap();
        let vars: Vec<f64> = density_variances(&field)
            .unwrap()
            .into_iter()
            .map(|v| match v {
                Variance::Finite(x) => x,
                Variance::Infinite => panic!("finite variance expected"),
            })
            .collect();
        let n = vars.len() as f64;
        let tbar = field.times.iter().sum::<f64>() / n;
        let vbar = vars.iter().sum::<f64>() / n;
        let slope: f64 = field
            .times
            .iter()
            .zip(&vars)
            .map(|(&t, &v)| (t - tbar) * (v - vbar))
            .sum::<f64>()
            / field
                .times
                .iter()
                .map(|&t| (t - tbar) * (t - tbar))
                .sum::<f64>();
        let icept = vbar - slope * tbar;
        for (&t, &v) in field.times.iter().zip(&vars) {
            let fit = icept + slope * t;
            assert!(
                (v - fit).abs() <= 1e-4 * v.abs().max(1.0),
                "t = {t}: {v} vs fit {fit}"
            );
        }
        // slope is the noise's variance production rate 2 nu a^2 per unit
        // time; intercept is the initial variance b^2
        assert!((slope - 3.0).abs() < 1e-3, "slope {slope}");
        assert!((icept - 1.0).abs() < 1e-3, "intercept {icept}");
    }
}
