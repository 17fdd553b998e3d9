//! Acceptance gate: twelve end-to-end criteria covering closed-form oracle
//! equivalence, unitarity, mass conservation, evolution-equation residuals,
//! exponent reconstruction, bimodality, variance laws, Bessel and Beta
//! identities, convolution closure, complex-special-function cross-checks
//! and the semigroup property.  Each criterion prints exactly one
//! `ACCEPT Cnn` line with its measured worst error and the pinned tolerance;
//! run with `cargo test --test acceptance -- --nocapture` to see all lines.

use num_complex::Complex64;

use levypacket::analysis::{
    beta_decomposition_check, bimodality_onset, density_modes, density_norms, density_variances,
    k0_self_convolution, k0_square_integral, wave_modes, wave_variances, Variance,
};
use levypacket::evolution::{
    evolve_process, evolve_wavepacket, process_residual, propagate_chf, schrodinger_residual,
    DensityField, EvolutionMode, InitialState, NoiseModel, Scenario, StateKind, TailClass,
    Tolerances, WaveField,
};
use levypacket::laws::{convolve_family, lkh_reconstruct, parse_law, Convolution};
use levypacket::solutions::{
    cauchy_cauchy_wf, cauchy_process_pdf, cauchy_student_pdf, cauchy_student_wf,
    cauchy_student_wf_rhs, gauss_process_pdf, poisson_process_pdf, poisson_wf,
    rqm_process_pdf, rqm_wf, vg_process_pdf, vg_wf, JumpKind, RateParams,
};
use levypacket::spectral::{pdf_to_chf, pv_generator_apply, ClosurePair, GridPair};

const TIMES: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 4.0];

/// One sub-result of a criterion: label, measured error, pinned tolerance.
struct Part {
    label: &'static str,
    err: f64,
    tol: f64,
}

fn part(label: &'static str, err: f64, tol: f64) -> Part {
    Part { label, err, tol }
}

/// Print the single line for a criterion and assert every part.
fn criterion(code: &str, name: &str, parts: &[Part]) {
    let pass = parts.iter().all(|p| p.err.is_finite() && p.err <= p.tol);
    let detail: Vec<String> = parts
        .iter()
        .map(|p| format!("{} {:.3e} <= {:.1e}", p.label, p.err, p.tol))
        .collect();
    println!(
        "ACCEPT {code} {name}: {} ({})",
        if pass { "PASS" } else { "FAIL" },
        detail.join("; ")
    );
    for p in parts {
        assert!(
            p.err.is_finite() && p.err <= p.tol,
            "{code} {name} [{}]: {:.6e} exceeds {:.1e}",
            p.label,
            p.err,
            p.tol
        );
    }
}

fn scenario(
    noise: &str,
    tau: f64,
    kind: StateKind,
    n: usize,
    half_width: f64,
    mode: EvolutionMode,
) -> Scenario {
    Scenario::new(
        NoiseModel::Law(parse_law(noise).unwrap()),
        RateParams::new(tau).unwrap(),
        InitialState::new(kind, 1.0, 0.0).unwrap(),
        GridPair::new(n, half_width).unwrap(),
        TIMES.to_vec(),
        Tolerances::default(),
        mode,
    )
    .unwrap()
}

fn wiener_poisson_scenario(jump: &str, n: usize, half_width: f64, mode: EvolutionMode) -> Scenario {
    // Gaussian part sqrt(2) per unit time gives diffusion constant D = 1;
    // unit jump rate, unit jump scale, unit initial width.
    Scenario::new(
        NoiseModel::wiener_poisson(2.0f64.sqrt(), 1.0, parse_law(jump).unwrap(), 1e-12).unwrap(),
        RateParams::new(1.0).unwrap(),
        InitialState::new(StateKind::Normal, 1.0, 0.0).unwrap(),
        GridPair::new(n, half_width).unwrap(),
        TIMES.to_vec(),
        Tolerances::default(),
        mode,
    )
    .unwrap()
}

/// Sup-norm deviation of the evolved density from a closed form on |x| <= 20.
fn density_sup_err(field: &DensityField, closed: impl Fn(f64, f64) -> f64) -> f64 {
    let mut worst = 0.0f64;
    for (i, &t) in field.times.iter().enumerate() {
        for (j, x) in field.grid.xs().into_iter().enumerate() {
            if x.abs() <= 20.0 {
                worst = worst.max((field.slices[i][j] - closed(x, t)).abs());
            }
        }
    }
    worst
}

/// Sup-norm deviation of the evolved packet from a closed form on |x| <= 20,
/// after removing the engine's spectral renormalization factor.
fn wave_sup_err(field: &WaveField, closed: impl Fn(f64, f64) -> Complex64) -> f64 {
    let mut worst = 0.0f64;
    for (i, &t) in field.times.iter().enumerate() {
        for (j, x) in field.grid.xs().into_iter().enumerate() {
            if x.abs() <= 20.0 {
                worst = worst.max((field.slices[i][j] / field.renorm - closed(x, t)).norm());
            }
        }
    }
    worst
}

// The twelve closed-form scenarios with b = a = 1 and unit rates.  Bessel
// comparisons carry the 1e-4 budget, rational/Gaussian ones 1e-6.

fn cauchy_on_cauchy_process() -> DensityField {
    evolve_process(&scenario(
        "cauchy",
        1.0,
        StateKind::Cauchy,
        32768,
        2000.0,
        EvolutionMode::Process,
    ))
    .unwrap()
}

fn cauchy_on_student_process() -> DensityField {
    evolve_process(&scenario(
        "cauchy",
        1.0,
        StateKind::Student3,
        32768,
        2000.0,
        EvolutionMode::Process,
    ))
    .unwrap()
}

fn vg_process() -> DensityField {
    evolve_process(&scenario(
        "vg(nu=1)",
        1.0,
        StateKind::VarianceGamma { nu: 2.0 },
        4096,
        40.0,
        EvolutionMode::Process,
    ))
    .unwrap()
}

fn rqm_process() -> DensityField {
    evolve_process(&scenario(
        "relativistic(nu=1)",
        1.0,
        StateKind::Relativistic { nu: 1.0 },
        4096,
        30.0,
        EvolutionMode::Process,
    ))
    .unwrap()
}

fn student_packet() -> WaveField {
    evolve_wavepacket(&scenario(
        "cauchy",
        1.0,
        StateKind::Student3,
        131072,
        2400.0,
        EvolutionMode::Schrodinger,
    ))
    .unwrap()
}

fn cauchy_packet() -> WaveField {
    evolve_wavepacket(&scenario(
        "cauchy",
        1.0,
        StateKind::Cauchy,
        1 << 19,
        30000.0,
        EvolutionMode::Schrodinger,
    ))
    .unwrap()
}

fn vg_packet() -> WaveField {
    evolve_wavepacket(&scenario(
        "vg(nu=1)",
        1.0,
        StateKind::VarianceGamma { nu: 1.75 },
        8192,
        45.0,
        EvolutionMode::Schrodinger,
    ))
    .unwrap()
}

fn rqm_packet() -> WaveField {
    evolve_wavepacket(&scenario(
        "relativistic(nu=1)",
        1.0,
        StateKind::Relativistic { nu: 1.0 },
        4096,
        30.0,
        EvolutionMode::Schrodinger,
    ))
    .unwrap()
}

#[test]
fn c01_closed_forms_match_the_spectral_engine() {
    let mut parts = Vec::new();

    parts.push(part(
        "cauchy-cauchy pdf",
        density_sup_err(&cauchy_on_cauchy_process(), |x, t| {
            cauchy_process_pdf(x, t, 1.0, 1.0).unwrap()
        }),
        1e-6,
    ));
    parts.push(part(
        "cauchy-student pdf",
        density_sup_err(&cauchy_on_student_process(), |x, t| {
            cauchy_student_pdf(x, t, 1.0, 1.0).unwrap()
        }),
        1e-6,
    ));
    parts.push(part(
        "vg pdf",
        density_sup_err(&vg_process(), |x, t| {
            vg_process_pdf(x, t, 1.0, 2.0, 1.0).unwrap()
        }),
        1e-4,
    ));
    parts.push(part(
        "jump-normal pdf",
        density_sup_err(
            &evolve_process(&wiener_poisson_scenario(
                "normal",
                4096,
                30.0,
                EvolutionMode::Process,
            ))
            .unwrap(),
            |x, t| poisson_process_pdf(JumpKind::Normal, x, t, 1.0, 1.0, 1.0, 1.0, 1e-12).unwrap(),
        ),
        1e-6,
    ));
    parts.push(part(
        "jump-dirac pdf",
        density_sup_err(
            &evolve_process(&wiener_poisson_scenario(
                "bernoulli",
                4096,
                30.0,
                EvolutionMode::Process,
            ))
            .unwrap(),
            |x, t| poisson_process_pdf(JumpKind::Dirac, x, t, 1.0, 1.0, 1.0, 1.0, 1e-12).unwrap(),
        ),
        1e-6,
    ));
    parts.push(part(
        "relativistic pdf",
        density_sup_err(&rqm_process(), |x, t| {
            rqm_process_pdf(x, t, 1.0, 1.0, 1.0).unwrap()
        }),
        1e-4,
    ));

    parts.push(part(
        "student wf",
        wave_sup_err(&student_packet(), |x, t| {
            cauchy_student_wf(x, t, 1.0, 1.0).unwrap()
        }),
        1e-6,
    ));
    parts.push(part(
        "cauchy wf",
        wave_sup_err(&cauchy_packet(), |x, t| {
            cauchy_cauchy_wf(x, t, 1.0, 1.0).unwrap()
        }),
        1e-4,
    ));
    parts.push(part(
        "vg wf",
        wave_sup_err(&vg_packet(), |x, t| vg_wf(x, t, 1.0, 1.75, 1.0).unwrap()),
        1e-4,
    ));
    parts.push(part(
        "jump-normal wf",
        wave_sup_err(
            &evolve_wavepacket(&wiener_poisson_scenario(
                "normal",
                4096,
                30.0,
                EvolutionMode::Schrodinger,
            ))
            .unwrap(),
            |x, t| poisson_wf(JumpKind::Normal, x, t, 1.0, 1.0, 1.0, 1.0, 1e-12).unwrap(),
        ),
        1e-6,
    ));
    parts.push(part(
        "jump-dirac wf",
        wave_sup_err(
            &evolve_wavepacket(&wiener_poisson_scenario(
                "bernoulli",
                4096,
                30.0,
                EvolutionMode::Schrodinger,
            ))
            .unwrap(),
            |x, t| poisson_wf(JumpKind::Dirac, x, t, 1.0, 1.0, 1.0, 1.0, 1e-12).unwrap(),
        ),
        1e-6,
    ));
    parts.push(part(
        "relativistic wf",
        wave_sup_err(&rqm_packet(), |x, t| rqm_wf(x, t, 1.0, 1.0, 1.0).unwrap()),
        1e-4,
    ));

    criterion("C01", "closed-form oracle equivalence", &parts);
}

#[test]
fn c02_unitary_norm_drift() {
    let drift = |field: &WaveField| {
        let dx = field.grid.dx();
        let norms: Vec<f64> = field
            .slices
            .iter()
            .map(|s| dx * s.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .collect();
        norms
            .iter()
            .map(|n| (n - norms[0]).abs() / norms[0])
            .fold(0.0f64, f64::max)
    };
    let parts = vec![
        part("student", drift(&student_packet()), 1e-6),
        part("cauchy", drift(&cauchy_packet()), 1e-6),
        part("vg", drift(&vg_packet()), 1e-6),
        part("relativistic", drift(&rqm_packet()), 1e-6),
        part(
            "jump-normal",
            drift(
                &evolve_wavepacket(&wiener_poisson_scenario(
                    "normal",
                    4096,
                    30.0,
                    EvolutionMode::Schrodinger,
                ))
                .unwrap(),
            ),
            1e-6,
        ),
        part(
            "jump-dirac",
            drift(
                &evolve_wavepacket(&wiener_poisson_scenario(
                    "bernoulli",
                    4096,
                    30.0,
                    EvolutionMode::Schrodinger,
                ))
                .unwrap(),
            ),
            1e-6,
        ),
    ];
    criterion("C02", "unitarity of wave evolution", &parts);
}

#[test]
fn c03_process_mass_conservation() {
    let mass_err = |field: &DensityField| {
        density_norms(field)
            .unwrap()
            .iter()
            .map(|r| (r.total - 1.0).abs())
            .fold(0.0f64, f64::max)
    };
    let parts = vec![
        part("cauchy-cauchy", mass_err(&cauchy_on_cauchy_process()), 1e-6),
        part("cauchy-student", mass_err(&cauchy_on_student_process()), 1e-6),
        part("vg", mass_err(&vg_process()), 1e-6),
        part("relativistic", mass_err(&rqm_process()), 1e-6),
        part(
            "jump-normal",
            mass_err(
                &evolve_process(&wiener_poisson_scenario(
                    "normal",
                    4096,
                    30.0,
                    EvolutionMode::Process,
                ))
                .unwrap(),
            ),
            1e-6,
        ),
        part(
            "jump-dirac",
            mass_err(
                &evolve_process(&wiener_poisson_scenario(
                    "bernoulli",
                    4096,
                    30.0,
                    EvolutionMode::Process,
                ))
                .unwrap(),
            ),
            1e-6,
        ),
    ];
    criterion("C03", "unit mass of process densities", &parts);
}

#[test]
fn c04_evolution_equation_residuals() {
    // Closed-form slices on a fine symmetric time triple; the central time
    // difference then isolates the generator error.
    let gauss_field = {
        let grid = GridPair::new(32768, 30.0).unwrap();
        let times = vec![0.4995, 0.5, 0.5005];
        let slices = times
            .iter()
            .map(|&t| {
                grid.xs()
                    .into_iter()
                    .map(|x| gauss_process_pdf(x, t, 1.0, 1.0).unwrap())
                    .collect()
            })
            .collect();
        DensityField {
            grid,
            times,
            slices,
            max_imag: 0.0,
            tail: TailClass::Exponential,
            periodic: false,
        }
    };
    let gauss_report = process_residual(
        &gauss_field,
        &NoiseModel::Law(parse_law("normal").unwrap()),
        &RateParams::new(0.5).unwrap(),
        None,
        1e-10,
    )
    .unwrap();

    let student_field = {
        let grid = GridPair::new(4096, 400.0).unwrap();
        let times = vec![0.999, 1.0, 1.001];
        let slices = times
            .iter()
            .map(|&t| {
                grid.xs()
                    .into_iter()
                    .map(|x| cauchy_student_pdf(x, t, 1.0, 1.0).unwrap())
                    .collect()
            })
            .collect();
        DensityField {
            grid,
            times,
            slices,
            max_imag: 0.0,
            tail: TailClass::Algebraic { power: 2.0 },
            periodic: false,
        }
    };
    let student_report = process_residual(
        &student_field,
        &NoiseModel::Law(parse_law("cauchy").unwrap()),
        &RateParams::new(1.0).unwrap(),
        None,
        1e-8,
    )
    .unwrap();

    let packet_field = {
        let grid = GridPair::new(8192, 400.0).unwrap();
        let times = vec![0.799, 0.8, 0.801];
        let slices = times
            .iter()
            .map(|&t| {
                grid.xs()
                    .into_iter()
                    .map(|x| cauchy_student_wf(x, t, 1.0, 1.0).unwrap())
                    .collect()
            })
            .collect();
        WaveField {
            grid,
            times,
            slices,
            renorm: 1.0,
            tail: TailClass::Algebraic { power: 4.0 },
            periodic: false,
        }
    };
    let packet_report = schrodinger_residual(
        &packet_field,
        &NoiseModel::Law(parse_law("cauchy").unwrap()),
        &RateParams::new(1.0).unwrap(),
        None,
        1e-8,
    )
    .unwrap();

    // Principal-value triangle: the jump generator applied to the packet
    // (adaptive PV quadrature against the analytic second derivative) must
    // reproduce the analytic right-hand side display.
    let (v, b, t) = (1.0f64, 1.0f64, 0.8f64);
    let w = Complex64::new(b, v * t);
    let amp = (2.0 * b / std::f64::consts::PI).sqrt();
    let packet = ClosurePair {
        value: move |x: f64| amp * w / (w * w + x * x),
        second: move |x: f64| {
            let den = w * w + x * x;
            amp * w * (6.0 * x * x - 2.0 * w * w) / (den * den * den)
        },
    };
    let triplet = parse_law("cauchy").unwrap().triplet().unwrap();
    let mut triangle = 0.0f64;
    for &x in &[0.0, 0.5, -0.5, 1.2, -1.2, 3.0, -3.0, 8.0, -8.0] {
        let gen = pv_generator_apply(&packet, &triplet, x, 1e-9).unwrap();
        let rhs = cauchy_student_wf_rhs(x, t, v, b).unwrap();
        triangle = triangle.max((rhs + gen).norm());
    }

    criterion(
        "C04",
        "evolution-equation residuals",
        &[
            part("gaussian density", gauss_report.relative, 1e-6),
            part("cauchy-student density", student_report.relative, 1e-3),
            part("student packet", packet_report.relative, 1e-3),
            part("pv triangle", triangle, 1e-6),
        ],
    );
}

#[test]
fn c05_characteristic_exponent_reconstruction() {
    let mut parts = Vec::new();
    for (label, text) in [
        ("cauchy", "cauchy"),
        ("laplace", "laplace"),
        ("student3", "student(alpha=3)"),
        ("relativistic", "relativistic(nu=1)"),
    ] {
        let law = parse_law(text).unwrap();
        let triplet = law.triplet().unwrap();
        let mut worst = 0.0f64;
        for k in 0..=80 {
            let u = -10.0 + 0.25 * k as f64;
            let rebuilt = lkh_reconstruct(&triplet, u, 1e-8).unwrap();
            worst = worst.max((rebuilt - law.lch(u).unwrap()).abs());
        }
        parts.push(part(label, worst, 1e-5));
    }
    criterion("C05", "exponent rebuilt from the jump triplet", &parts);
}

#[test]
fn c06_bimodality_of_the_student_packet() {
    // Onset detection: the packet splits at t = b/v = 1.  A prominence
    // threshold of 1e-6 detects the emerging maxima once their relative
    // height reaches that threshold, which happens ~sqrt(1e-6) past the
    // onset; the pinned tolerance covers that detector floor, not the
    // bisection resolution (0.8 / 2^12 ~ 2e-4).
    let sc = scenario(
        "cauchy",
        1.0,
        StateKind::Student3,
        4096,
        200.0,
        EvolutionMode::Schrodinger,
    );
    let sc = Scenario::new(
        sc.noise.clone(),
        RateParams::new(1.0).unwrap(),
        sc.initial,
        sc.grid,
        vec![0.0, 0.6, 1.4, 2.0],
        Tolerances::default(),
        EvolutionMode::Schrodinger,
    )
    .unwrap();
    let onset = bimodality_onset(&sc, Some(1e-6), 12)
        .unwrap()
        .expect("the packet must turn bimodal");
    let t_star = 0.5 * (onset.lower + onset.upper);
    let onset_err = (t_star - 1.0).abs();

    // Mode positions at v t = 2 b: +-sqrt(3) within one grid cell.
    let field = student_packet();
    let reports = wave_modes(&field, None);
    let idx = TIMES.iter().position(|&t| t == 2.0).unwrap();
    let report = &reports[idx];
    let dx = field.grid.dx();
    let pos_err = if report.count == 2 {
        report
            .positions
            .iter()
            .map(|p| (p.abs() - 3.0f64.sqrt()).abs())
            .fold(0.0f64, f64::max)
    } else {
        f64::INFINITY
    };

    // The matching density stays unimodal at every tested time.
    let density = cauchy_on_student_process();
    let unimodal = density_modes(&density, None)
        .iter()
        .all(|r| r.count == 1);

    criterion(
        "C06",
        "bimodal splitting of the packet",
        &[
            part("onset |t*-1|", onset_err, 5e-3),
            part("positions vs sqrt(3)", pos_err, dx),
            part(
                "density stays unimodal",
                if unimodal { 0.0 } else { f64::INFINITY },
                0.5,
            ),
        ],
    );
}

#[test]
fn c07_variance_growth_laws() {
    let finite = |v: &Variance| match v {
        Variance::Finite(x) => *x,
        Variance::Infinite => f64::NAN,
    };

    // Gaussian density: b^2 + 2 D t with D = 1; Gaussian packet:
    // b^2 + D^2 t^2 / b^2.
    let gauss = scenario(
        "normal",
        0.5,
        StateKind::Normal,
        4096,
        60.0,
        EvolutionMode::Both,
    );
    let gauss_density = evolve_process(&gauss).unwrap();
    let gauss_wave = evolve_wavepacket(&gauss).unwrap();
    let mut gauss_pdf_err = 0.0f64;
    for (i, v) in density_variances(&gauss_density).unwrap().iter().enumerate() {
        gauss_pdf_err = gauss_pdf_err.max((finite(v) - (1.0 + 2.0 * TIMES[i])).abs());
    }
    let mut gauss_wf_err = 0.0f64;
    for (i, v) in wave_variances(&gauss_wave).unwrap().iter().enumerate() {
        gauss_wf_err = gauss_wf_err.max((finite(v) - (1.0 + TIMES[i] * TIMES[i])).abs());
    }

    // VG density with initial shape 2 and unit shape rate: 2 a^2 (nu + w t).
    let mut vg_err = 0.0f64;
    for (i, v) in density_variances(&vg_process()).unwrap().iter().enumerate() {
        let want = 2.0 * (2.0 + TIMES[i]);
        vg_err = vg_err.max((finite(v) - want).abs() / want);
    }

    // Relativistic density: a^2 (nu + w t).
    let mut rqm_err = 0.0f64;
    for (i, v) in density_variances(&rqm_process()).unwrap().iter().enumerate() {
        let want = 1.0 + TIMES[i];
        rqm_err = rqm_err.max((finite(v) - want).abs() / want);
    }

    // Jump diffusion with two-point jumps: b^2 + 2 D t + w t a^2 = 1 + 3 t.
    let comb = evolve_process(&wiener_poisson_scenario(
        "bernoulli",
        4096,
        30.0,
        EvolutionMode::Process,
    ))
    .unwrap();
    let mut comb_err = 0.0f64;
    for (i, v) in density_variances(&comb).unwrap().iter().enumerate() {
        let want = 1.0 + 3.0 * TIMES[i];
        comb_err = comb_err.max((finite(v) - want).abs() / want);
    }

    criterion(
        "C07",
        "variance growth laws",
        &[
            part("gauss density", gauss_pdf_err, 1e-8),
            part("gauss packet", gauss_wf_err, 1e-8),
            part("vg density rel", vg_err, 1e-4),
            part("relativistic density rel", rqm_err, 1e-4),
            part("jump-dirac density rel", comb_err, 1e-4),
        ],
    );
}

#[test]
fn c08_bessel_k0_identities() {
    let square = (k0_square_integral().unwrap() - std::f64::consts::PI.powi(2) / 4.0).abs();
    let mut conv = 0.0f64;
    for u in [0.0f64, 0.3, 1.0, 2.0, 5.0] {
        let target = std::f64::consts::PI.powi(2) / 2.0 * (-u).exp();
        conv = conv.max((k0_self_convolution(u).unwrap() - target).abs());
    }
    criterion(
        "C08",
        "squared-K0 integral and self-convolution",
        &[
            part("integral vs pi^2/4", square, 1e-8),
            part("self-convolution", conv, 1e-5),
        ],
    );
}

#[test]
fn c09_beta_mixture_decomposition() {
    let grid = GridPair::new(512, 25.0).unwrap();
    let mut state = 987654321u64;
    let mut draw = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        0.1 + 9.9 * ((state >> 11) as f64 / (1u64 << 53) as f64)
    };
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = draw();
        let b = draw();
        worst = worst.max(beta_decomposition_check(a, b, &grid).unwrap());
    }
    criterion(
        "C09",
        "square-root Beta mixture identities",
        &[part("50 random scale pairs", worst, 1e-12)],
    );
}

#[test]
fn c10_convolution_closure() {
    let mut parts = Vec::new();
    for (label, lhs, rhs) in [
        ("cauchy", "cauchy", "cauchy(a=0.7)"),
        ("stable", "stable(alpha=1.5)", "stable(alpha=1.5,a=0.8)"),
        ("vg", "vg(nu=0.6)", "vg(nu=1.1)"),
        ("relativistic", "relativistic(nu=0.5)", "relativistic(nu=1.2)"),
    ] {
        let l = parse_law(lhs).unwrap();
        let r = parse_law(rhs).unwrap();
        let err = match convolve_family(&l, &r).unwrap() {
            Convolution::Closed(target) => {
                let mut worst = 0.0f64;
                for k in 0..=200 {
                    let u = -10.0 + 0.1 * k as f64;
                    let product = l.chf(u).unwrap() * r.chf(u).unwrap();
                    worst = worst.max((product - target.chf(u).unwrap()).abs());
                }
                worst
            }
            Convolution::Unclosed => f64::INFINITY,
        };
        parts.push(part(label, err, 1e-10));
    }
    let student = parse_law("student(alpha=3)").unwrap();
    let open = matches!(
        convolve_family(&student, &student).unwrap(),
        Convolution::Unclosed
    );
    parts.push(part(
        "student flagged open",
        if open { 0.0 } else { f64::INFINITY },
        0.5,
    ));
    criterion("C10", "convolution closure rules", &parts);
}

#[test]
fn c11_complex_bessel_cross_checks() {
    // The same two spectral evolutions as the oracle criterion, but checked
    // against the independent complex-special-function routes: the VG packet
    // through complex-order K and Gamma, the relativistic packet through
    // complex-argument K1.
    let vg_err = wave_sup_err(&vg_packet(), |x, t| vg_wf(x, t, 1.0, 1.75, 1.0).unwrap());
    let rqm_err = wave_sup_err(&rqm_packet(), |x, t| rqm_wf(x, t, 1.0, 1.0, 1.0).unwrap());
    criterion(
        "C11",
        "complex-special-function routes",
        &[
            part("vg packet", vg_err, 1e-4),
            part("relativistic packet", rqm_err, 1e-4),
        ],
    );
}

#[test]
fn c12_semigroup_property() {
    let two_step = |noise: &str, tau: f64, kind: StateKind, n: usize, l: f64| -> f64 {
        let sc = Scenario::new(
            NoiseModel::Law(parse_law(noise).unwrap()),
            RateParams::new(tau).unwrap(),
            InitialState::new(kind, 1.0, 0.0).unwrap(),
            GridPair::new(n, l).unwrap(),
            vec![0.0, 0.6, 1.4],
            Tolerances::default(),
            EvolutionMode::Process,
        )
        .unwrap();
        let field = evolve_process(&sc).unwrap();
        let eta = sc.symbol_samples().unwrap();
        let chf_mid = pdf_to_chf(&sc.grid, &field.slices[1]).unwrap();
        let (direct, _) = propagate_chf(&sc.grid, &chf_mid, &eta, 0.8, 1e-8).unwrap();
        direct
            .iter()
            .zip(&field.slices[2])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
    };
    criterion(
        "C12",
        "two-step equals one-step evolution",
        &[
            part(
                "gauss",
                two_step("normal", 0.5, StateKind::Normal, 2048, 40.0),
                1e-8,
            ),
            part(
                "vg",
                two_step("vg(nu=0.7)", 1.0, StateKind::Normal, 2048, 40.0),
                1e-8,
            ),
            part(
                "cauchy",
                two_step("cauchy", 1.0, StateKind::Student3, 16384, 1000.0),
                1e-8,
            ),
        ],
    );
}
