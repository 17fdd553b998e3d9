//! Named invariant suites for `levypacket check`.  Each suite recomputes an
//! identity the library must satisfy — characteristic-exponent
//! reconstruction from the jump triplet, Bessel integrals, mixture
//! decompositions, unitarity, equation residuals, the semigroup property and
//! convolution closure — and reports the observed error against a pinned
//! tolerance.

use serde::Serialize;

use levypacket::analysis::{beta_decomposition_check, k0_self_convolution, k0_square_integral};
use levypacket::evolution::{
    evolve_process, evolve_wavepacket, process_residual, propagate_chf, DensityField,
    EvolutionMode, InitialState, NoiseModel, Scenario, StateKind, TailClass, Tolerances,
};
use levypacket::laws::{convolve_family, lkh_reconstruct, parse_law, Convolution, LawSpec};
use levypacket::solutions::{cauchy_process_pdf, gauss_process_pdf, RateParams};
use levypacket::spectral::{pdf_to_chf, GridPair};
use levypacket::{Error, Result};

/// Report line for one executed check.
#[derive(Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub status: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    fn new(check: &str, max_error: f64, tolerance: f64) -> Self {
        CheckOutcome {
            check: check.to_string(),
            status: if max_error.is_finite() && max_error <= tolerance {
                "pass"
            } else {
                "fail"
            },
            max_error,
            tolerance,
        }
    }
}

/// Registered suite names, in execution order for `all`.
pub const SUITES: &[&str] = &[
    "lkh:cauchy",
    "lkh:laplace",
    "lkh:student3",
    "lkh:relativistic",
    "beta-identity",
    "k0-identities",
    "unitarity:gauss",
    "unitarity:student",
    "unitarity:cauchy",
    "unitarity:rqm",
    "residual:gauss",
    "residual:cauchy",
    "semigroup:gauss",
    "semigroup:vg",
    "semigroup:cauchy",
    "closure:cauchy",
    "closure:stable",
    "closure:vg",
    "closure:relativistic",
    "closure:student",
];

// -- characteristic exponent from the jump triplet --------------------------

fn lkh_suite(name: &str, law_text: &str, tolerance: f64) -> Result<CheckOutcome> {
    let law = parse_law(law_text)?;
    let triplet = law.triplet()?;
    let mut max_error = 0.0f64;
    for k in 0..=80 {
        let u = -10.0 + 0.25 * k as f64;
        let rebuilt = lkh_reconstruct(&triplet, u, 1e-8)?;
        max_error = max_error.max((rebuilt - law.lch(u)?).abs());
    }
    Ok(CheckOutcome::new(
        &format!("lkh:{name}"),
        max_error,
        tolerance,
    ))
}

// -- square-root Beta mixture ----------------------------------------------

fn beta_identity_suite() -> Result<CheckOutcome> {
    let grid = GridPair::new(512, 25.0)?;
    let mut state = 987654321u64;
    let mut draw = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        0.1 + 9.9 * ((state >> 11) as f64 / (1u64 << 53) as f64)
    };
    let mut max_error = 0.0f64;
    for _ in 0..50 {
        let a = draw();
        let b = draw();
        max_error = max_error.max(beta_decomposition_check(a, b, &grid)?);
    }
    Ok(CheckOutcome::new("beta-identity", max_error, 1e-12))
}

// -- Bessel-K identities ----------------------------------------------------

fn k0_suite() -> Result<Vec<CheckOutcome>> {
    let square = (k0_square_integral()? - std::f64::consts::PI.powi(2) / 4.0).abs();
    let mut conv = 0.0f64;
    for u in [0.0_f64, 0.3, 1.0, 2.0, 5.0] {
        let target = std::f64::consts::PI.powi(2) / 2.0 * (-u).exp();
        conv = conv.max((k0_self_convolution(u)? - target).abs());
    }
    Ok(vec![
        CheckOutcome::new("k0-identities:square", square, 1e-8),
        CheckOutcome::new("k0-identities:selfconv", conv, 1e-5),
    ])
}

// -- unitarity of the wave propagator ---------------------------------------

fn wave_scenario(
    noise_text: &str,
    tau: f64,
    kind: StateKind,
    n: usize,
    half_width: f64,
) -> Result<Scenario> {
    Scenario::new(
        NoiseModel::Law(parse_law(noise_text)?),
        RateParams::new(tau)?,
        InitialState::new(kind, 1.0, 0.0)?,
        GridPair::new(n, half_width)?,
        vec![0.0, 1.0, 2.0, 4.0],
        Tolerances::default(),
        EvolutionMode::Schrodinger,
    )
}

fn unitarity_suite(name: &str, scenario: &Scenario) -> Result<CheckOutcome> {
    let field = evolve_wavepacket(scenario)?;
    let dx = field.grid.dx();
    let norms: Vec<f64> = field
        .slices
        .iter()
        .map(|s| dx * s.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .collect();
    let base = norms[0];
    let drift = norms
        .iter()
        .map(|n| (n - base).abs() / base)
        .fold(0.0f64, f64::max);
    Ok(CheckOutcome::new(
        &format!("unitarity:{name}"),
        drift,
        1e-6,
    ))
}

// -- equation residuals on closed-form densities ----------------------------

fn closed_form_field(
    grid: GridPair,
    times: Vec<f64>,
    tail: TailClass,
    pdf: impl Fn(f64, f64) -> Result<f64>,
) -> Result<DensityField> {
    let mut slices = Vec::with_capacity(times.len());
    for &t in &times {
        let mut slice = Vec::with_capacity(grid.n());
        for x in grid.xs() {
            slice.push(pdf(x, t)?);
        }
        slices.push(slice);
    }
    Ok(DensityField {
        grid,
        times,
        slices,
        max_imag: 0.0,
        tail,
        periodic: false,
    })
}

fn residual_gauss_suite() -> Result<CheckOutcome> {
    let grid = GridPair::new(32768, 30.0)?;
    let field = closed_form_field(
        grid,
        vec![0.4995, 0.5, 0.5005],
        TailClass::Exponential,
        |x, t| gauss_process_pdf(x, t, 1.0, 1.0),
    )?;
    let noise = NoiseModel::Law(parse_law("normal")?);
    let report = process_residual(&field, &noise, &RateParams::new(0.5)?, None, 1e-10)?;
    Ok(CheckOutcome::new("residual:gauss", report.relative, 1e-6))
}

fn residual_cauchy_suite() -> Result<CheckOutcome> {
    let grid = GridPair::new(4096, 400.0)?;
    let field = closed_form_field(
        grid,
        vec![0.999, 1.0, 1.001],
        TailClass::Algebraic { power: 2.0 },
        |x, t| cauchy_process_pdf(x, t, 1.0, 1.0),
    )?;
    let noise = NoiseModel::Law(parse_law("cauchy")?);
    let report = process_residual(&field, &noise, &RateParams::new(1.0)?, None, 1e-8)?;
    Ok(CheckOutcome::new("residual:cauchy", report.relative, 1e-3))
}

// -- semigroup property -----------------------------------------------------

fn semigroup_suite(
    name: &str,
    noise_text: &str,
    tau: f64,
    kind: StateKind,
    n: usize,
    half_width: f64,
) -> Result<CheckOutcome> {
    let scenario = Scenario::new(
        NoiseModel::Law(parse_law(noise_text)?),
        RateParams::new(tau)?,
        InitialState::new(kind, 1.0, 0.0)?,
        GridPair::new(n, half_width)?,
        vec![0.0, 0.6, 1.4],
        Tolerances::default(),
        EvolutionMode::Process,
    )?;
    let field = evolve_process(&scenario)?;
    let eta = scenario.symbol_samples()?;
    let chf_mid = pdf_to_chf(&scenario.grid, &field.slices[1])?;
    let (two_step, _) = propagate_chf(
        &scenario.grid,
        &chf_mid,
        &eta,
        0.8,
        scenario.tolerances.aliasing,
    )?;
    let max_error = two_step
        .iter()
        .zip(&field.slices[2])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    Ok(CheckOutcome::new(
        &format!("semigroup:{name}"),
        max_error,
        1e-8,
    ))
}

// -- convolution closure ----------------------------------------------------

fn chf_product_error(lhs: &LawSpec, rhs: &LawSpec, target: &LawSpec) -> Result<f64> {
    let mut max_error = 0.0f64;
    for k in 0..=200 {
        let u = -10.0 + 0.1 * k as f64;
        let product = lhs.chf(u)? * rhs.chf(u)?;
        max_error = max_error.max((product - target.chf(u)?).abs());
    }
    Ok(max_error)
}

fn closure_suite(name: &str, lhs_text: &str, rhs_text: &str) -> Result<CheckOutcome> {
    let lhs = parse_law(lhs_text)?;
    let rhs = parse_law(rhs_text)?;
    let check = format!("closure:{name}");
    match convolve_family(&lhs, &rhs)? {
        Convolution::Closed(target) => Ok(CheckOutcome::new(
            &check,
            chf_product_error(&lhs, &rhs, &target)?,
            1e-10,
        )),
        Convolution::Unclosed => {
            // Only the Student pair is allowed to leave the catalog.
            let expected_open = name == "student";
            Ok(CheckOutcome {
                check,
                status: if expected_open { "pass" } else { "fail" },
                max_error: if expected_open { 0.0 } else { f64::INFINITY },
                tolerance: 0.0,
            })
        }
    }
}

fn closure_student_suite() -> Result<CheckOutcome> {
    let student = parse_law("student(alpha=3)")?;
    let open = matches!(convolve_family(&student, &student)?, Convolution::Unclosed);
    Ok(CheckOutcome {
        check: "closure:student".to_string(),
        status: if open { "pass" } else { "fail" },
        max_error: if open { 0.0 } else { f64::INFINITY },
        tolerance: 0.0,
    })
}

// -- dispatch ---------------------------------------------------------------

fn run_one(name: &str, out: &mut Vec<CheckOutcome>) -> Result<()> {
    match name {
        "lkh:cauchy" => out.push(lkh_suite("cauchy", "cauchy", 1e-6)?),
        "lkh:laplace" => out.push(lkh_suite("laplace", "laplace", 1e-5)?),
        "lkh:student3" => out.push(lkh_suite("student3", "student(alpha=3)", 1e-5)?),
        "lkh:relativistic" => out.push(lkh_suite("relativistic", "relativistic(nu=1)", 1e-5)?),
        "beta-identity" => out.push(beta_identity_suite()?),
        "k0-identities" => out.extend(k0_suite()?),
        "unitarity:gauss" => out.push(unitarity_suite(
            "gauss",
            &wave_scenario("normal", 0.5, StateKind::Normal, 4096, 60.0)?,
        )?),
        "unitarity:student" => out.push(unitarity_suite(
            "student",
            &wave_scenario("cauchy", 1.0, StateKind::Student3, 32768, 2000.0)?,
        )?),
        "unitarity:cauchy" => out.push(unitarity_suite(
            "cauchy",
            &wave_scenario("cauchy", 1.0, StateKind::Cauchy, 1 << 19, 30000.0)?,
        )?),
        "unitarity:rqm" => out.push(unitarity_suite(
            "rqm",
            &wave_scenario(
                "relativistic(nu=1)",
                1.0,
                StateKind::Relativistic { nu: 1.0 },
                4096,
                40.0,
            )?,
        )?),
        "residual:gauss" => out.push(residual_gauss_suite()?),
        "residual:cauchy" => out.push(residual_cauchy_suite()?),
        "semigroup:gauss" => out.push(semigroup_suite(
            "gauss",
            "normal",
            0.5,
            StateKind::Normal,
            2048,
            40.0,
        )?),
        "semigroup:vg" => out.push(semigroup_suite(
            "vg",
            "vg(nu=0.7)",
            1.0,
            StateKind::Normal,
            2048,
            40.0,
        )?),
        "semigroup:cauchy" => out.push(semigroup_suite(
            "cauchy",
            "cauchy",
            1.0,
            StateKind::Student3,
            16384,
            1000.0,
        )?),
        "closure:cauchy" => out.push(closure_suite("cauchy", "cauchy", "cauchy(a=0.7)")?),
        "closure:stable" => out.push(closure_suite(
            "stable",
            "stable(alpha=1.5)",
            "stable(alpha=1.5,a=0.8)",
        )?),
        "closure:vg" => out.push(closure_suite("vg", "vg(nu=0.6)", "vg(nu=1.1)")?),
        "closure:relativistic" => out.push(closure_suite(
            "relativistic",
            "relativistic(nu=0.5)",
            "relativistic(nu=1.2)",
        )?),
        "closure:student" => out.push(closure_student_suite()?),
        other => {
            return Err(Error::Config(format!(
                "unknown check suite `{other}`; run `levypacket list` for the registered names"
            )))
        }
    }
    Ok(())
}

/// Run the comma-separated suite list (or `all`) and return the outcomes.
pub fn run_suites(spec: &str) -> Result<Vec<CheckOutcome>> {
    let mut names: Vec<&str> = Vec::new();
    for piece in spec.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        if piece == "all" {
            names.extend(SUITES);
        } else {
            names.push(piece);
        }
    }
    if names.is_empty() {
        return Err(Error::Config("no check suites requested".into()));
    }
    let mut out = Vec::new();
    for name in names {
        run_one(name, &mut out)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suites_pass() {
        let outcomes = run_suites("beta-identity,k0-identities,closure:cauchy,closure:student")
            .unwrap();
        assert_eq!(outcomes.len(), 5);
        for o in &outcomes {
            assert_eq!(o.status, "pass", "{} at {:.3e}", o.check, o.max_error);
        }
    }

    #[test]
    fn unknown_suite_is_a_config_error() {
        assert!(matches!(run_suites("nope"), Err(Error::Config(_))));
    }
}
