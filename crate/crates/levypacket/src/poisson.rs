//! Symmetrized compound Poisson (Wiener-Poisson) laws.
//!
//! A compound Poisson process with symmetric jump law and an independent
//! Brownian background has characteristic function
//!
//! ```text
//! chi(u) = chi_0(u) * exp(lambda * (chi_c(u) - 1))
//! ```
//!
//! where `chi_c` is the jump-component CHF and `chi_0` the background CHF.
//! Two component families admit fully closed k-fold convolutions and hence an
//! explicit Poisson-mixture density:
//!
//! * Normal jumps `N(c^2)` on a Normal background `N(b0^2)`: the k-jump
//!   conditional law is `N(k c^2 + b0^2)`, so the density is a Poisson
//!   mixture of centered Gaussians of growing variance.
//! * Two-point jumps `+-a` (fair Bernoulli) on a Normal background: the
//!   k-jump conditional law is a binomial lattice smeared by the background,
//!   giving a binomial-weighted Gaussian comb centered at `(k - 2j) a`.
//!
//! Without the background the k = 0 term is a unit atom at the origin (and
//! the Bernoulli case is purely atomic), so the law is not absolutely
//! continuous; pointwise-density requests are rejected rather than smoothed.

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::laws::{Family, LawSpec, LevyTriplet};
use crate::spectral::{pv_generator_apply, SmoothFn};

/// Largest supported Poisson intensity: keeps `exp(lambda)` and the term
/// recurrences inside f64 range with margin.
const MAX_RATE: f64 = 500.0;

/// A symmetrized compound Poisson law with optional Gaussian background.
#[derive(Clone, Debug)]
pub struct CompoundSpec {
    /// Expected number of jumps (dimensionless intensity).
    pub rate: f64,
    /// Jump component: `Normal` (scale c) or `BernoulliPm` (atom position a).
    pub component: LawSpec,
    /// Optional independent `Normal` background (scale b0 > 0).
    pub background: Option<LawSpec>,
    /// Absolute truncation tolerance for the Poisson series.
    pub tol: f64,
}

impl CompoundSpec {
    pub fn new(
        rate: f64,
        component: LawSpec,
        background: Option<LawSpec>,
        tol: f64,
    ) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::Domain(format!(
                "compound Poisson intensity must be positive and finite, got {rate}"
            )));
        }
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::Domain(format!(
                "series truncation tolerance must be positive, got {tol}"
            )));
        }
        match component.family {
            Family::Normal | Family::BernoulliPm => {}
            _ => {
                return Err(Error::Config(format!(
                    "compound component must be normal or bernoulli, got {component}"
                )))
            }
        }
        if let Some(bg) = &background {
            if bg.family != Family::Normal {
                return Err(Error::Config(format!(
                    "compound background must be a centered normal, got {bg}"
                )));
            }
        }
        Ok(CompoundSpec {
            rate,
            component,
            background,
            tol,
        })
    }

    /// Background standard deviation (0 when no background is present).
    pub fn background_width(&self) -> f64 {
        self.background.as_ref().map_or(0.0, |b| b.scale)
    }

    /// True when the law has a density: the Gaussian background smooths the
    /// zero-jump atom (and, for two-point jumps, the whole lattice).
    pub fn is_absolutely_continuous(&self) -> bool {
        self.background.is_some()
    }
}

/// Characteristic function `chi(u) = chi_0(u) e^{lambda (chi_c(u) - 1)}`.
/// Real by symmetry; equals 1 at `u = 0`.
pub fn compound_chf(spec: &CompoundSpec, u: f64) -> Result<f64> {
    Ok(compound_lch(spec, u)?.exp())
}

/// Logarithmic characteristic function
/// `lambda (chi_c(u) - 1) - b0^2 u^2 / 2`.
pub fn compound_lch(spec: &CompoundSpec, u: f64) -> Result<f64> {
    let comp = spec.component.chf(u)?;
    let b0 = spec.background_width();
    Ok(spec.rate * (comp - 1.0) - 0.5 * b0 * b0 * u * u)
}

/// Poisson weights e^{-lambda} lambda^k / k! alongside the truncation index:
/// the series is carried at least to `lambda + 10 sqrt(lambda) + 20` and then
/// until the relative term `lambda^k / k!` drops below `tol`.  Also valid for
/// the complex wave-packet series, whose terms have modulus lambda^k / k!.
pub(crate) fn truncation_index(lambda: f64, tol: f64) -> usize {
    let floor = (lambda + 10.0 * lambda.sqrt() + 20.0).ceil() as usize;
    let mut term = 1.0_f64; // lambda^k / k! at k = 0
    let mut k = 0usize;
    loop {
        if k >= floor && term < tol {
            return k;
        }
        k += 1;
        term *= lambda / k as f64;
        if k > 100_000 {
            return k;
        }
    }
}

fn gaussian_pdf(x: f64, variance: f64) -> f64 {
    (-(x * x) / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
}

/// Pointwise density of the compound law by the closed Poisson mixture.
///
/// `time_scale`, when given, multiplies the intensity (`lambda -> lambda t`),
/// which is exactly how the marginal law of the process at time t arises from
/// the unit-time spec.  Requires the Gaussian background; without it the law
/// keeps an atom at the origin and has no density.
pub fn compound_pdf_series(spec: &CompoundSpec, x: f64, time_scale: Option<f64>) -> Result<f64> {
    let Some(background) = &spec.background else {
        return Err(Error::NotAbsolutelyContinuous(
            "compound Poisson law without a Gaussian background keeps an atom at the origin"
                .into(),
        ));
    };
    let b0 = background.scale;
    let lambda = match time_scale {
        Some(t) if !(t > 0.0) || !t.is_finite() => {
            return Err(Error::Domain(format!(
                "time scaling of the intensity must be positive and finite, got {t}"
            )))
        }
        Some(t) => spec.rate * t,
        None => spec.rate,
    };
    if lambda > MAX_RATE {
        return Err(Error::Convergence(format!(
            "effective intensity {lambda} exceeds the supported series range {MAX_RATE}"
        )));
    }
    // the density is even in x by construction; evaluating at |x| makes the
    // symmetry bit-exact
    let x = x.abs();
    let kmax = truncation_index(lambda, spec.tol);
    let mut weight = (-lambda).exp(); // e^{-lambda} lambda^k / k!
    let mut sum = 0.0;
    match spec.component.family {
        Family::Normal => {
            let c2 = spec.component.scale * spec.component.scale;
            for k in 0..=kmax {
                sum += weight * gaussian_pdf(x, k as f64 * c2 + b0 * b0);
                weight *= lambda / (k + 1) as f64;
            }
        }
        Family::BernoulliPm => {
            let a = spec.component.scale;
            for k in 0..=kmax {
                // fair binomial masses C(k, j) / 2^k by upward recurrence
                let mut mass = 0.5_f64.powi(k as i32);
                let mut inner = 0.0;
                for j in 0..=k {
                    let center = (k as f64 - 2.0 * j as f64) * a;
                    inner += mass * gaussian_pdf(x - center, b0 * b0);
                    mass *= (k - j) as f64 / (j + 1) as f64;
                }
                sum += weight * inner;
                weight *= lambda / (k + 1) as f64;
            }
        }
        _ => unreachable!("constructor restricts the component family"),
    }
    Ok(sum)
}

/// Generating triplet: Gaussian part `b0`, jump measure `lambda` times the
/// component law (a smooth density for Normal jumps, a symmetric atom pair
/// for two-point jumps).
pub fn compound_triplet(spec: &CompoundSpec) -> Result<LevyTriplet> {
    let b0 = spec.background_width();
    let triplet = match spec.component.family {
        Family::Normal => {
            let c = spec.component.scale;
            let lambda = spec.rate;
            LevyTriplet {
                drift: 0.0,
                gamma: b0,
                density: Some(Arc::new(move |y: f64| {
                    lambda * gaussian_pdf(y, c * c)
                })),
                atoms: vec![],
                singularity_order: -1.0,
                scale: c,
            }
        }
        Family::BernoulliPm => {
            let a = spec.component.scale;
            LevyTriplet {
                drift: 0.0,
                gamma: b0,
                density: None,
                atoms: vec![(-a, 0.5 * spec.rate), (a, 0.5 * spec.rate)],
                singularity_order: 0.0,
                scale: a,
            }
        }
        _ => unreachable!("constructor restricts the component family"),
    };
    triplet.validate()?;
    Ok(triplet)
}

/// Apply the generator of the compound law to `f` at `x`.
///
/// Two-point jumps reduce to exact finite differences (no quadrature at
/// all); Normal jumps go through the principal-value machinery with the
/// smooth jump density.  `tol` bounds the quadrature error in the latter
/// case and is ignored in the former.
pub fn generator_apply_compound(
    spec: &CompoundSpec,
    f: &dyn SmoothFn,
    x: f64,
    tol: f64,
) -> Result<Complex64> {
    let triplet = compound_triplet(spec)?;
    pv_generator_apply(f, &triplet, x, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::lkh_reconstruct;
    use crate::spectral::{adaptive_integrate, ClosurePair};

    fn normal_comp(lambda: f64, c: f64, b0: f64) -> CompoundSpec {
        CompoundSpec::new(
            lambda,
            LawSpec::new(Family::Normal, c).unwrap(),
            Some(LawSpec::new(Family::Normal, b0).unwrap()),
            1e-12,
        )
        .unwrap()
    }

    fn bernoulli_comp(lambda: f64, a: f64, b0: f64) -> CompoundSpec {
        CompoundSpec::new(
            lambda,
            LawSpec::new(Family::BernoulliPm, a).unwrap(),
            Some(LawSpec::new(Family::Normal, b0).unwrap()),
            1e-12,
        )
        .unwrap()
    }

    #[test]
    fn chf_closed_forms() {
        let bern = bernoulli_comp(2.0, 1.5, 0.8);
        let norm = normal_comp(1.0, 1.0, 1.0);
        for &u in &[0.0f64, 0.3, 1.0, 4.2] {
            let want = (2.0 * ((1.5 * u).cos() - 1.0) - 0.5 * 0.64 * u * u).exp();
            assert!((compound_chf(&bern, u).unwrap() - want).abs() < 1e-15);
            let want = ((-0.5 * u * u).exp() - 1.0 - 0.5 * u * u).exp();
            assert!((compound_chf(&norm, u).unwrap() - want).abs() < 1e-15);
        }
        assert_eq!(compound_chf(&bern, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn vanishing_intensity_recovers_the_background() {
        let spec = normal_comp(1e-14, 1.0, 1.3);
        let bg = LawSpec::new(Family::Normal, 1.3).unwrap();
        for &u in &[0.5, 2.0] {
            assert!((compound_chf(&spec, u).unwrap() - bg.chf(u).unwrap()).abs() < 1e-13);
        }
        for &x in &[0.0, 1.1] {
            let got = compound_pdf_series(&spec, x, None).unwrap();
            assert!((got - bg.pdf(x).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn density_matches_frozen_partial_sums() {
        // independent 40-digit evaluations of the mixture series
        let norm = normal_comp(1.0, 1.0, 1.0);
        let got = compound_pdf_series(&norm, 0.0, None).unwrap();
        assert!((got - 0.308_459_241_525_593_695_2).abs() < 1e-14, "{got}");
        let got = compound_pdf_series(&norm, 1.3, None).unwrap();
        assert!((got - 0.175_749_015_971_272_322_3).abs() < 1e-14, "{got}");

        // two-point jumps, cross-checked against direct CHF inversion
        let bern = bernoulli_comp(2.0, 1.5, 0.8);
        let got = compound_pdf_series(&bern, 0.7, None).unwrap();
        assert!((got - 0.173_219_004_657_273_198_7).abs() < 1e-14, "{got}");
    }

    #[test]
    fn time_scaling_multiplies_the_intensity() {
        let spec = bernoulli_comp(0.8, 1.0, 0.6);
        let scaled = bernoulli_comp(2.0, 1.0, 0.6);
        let a = compound_pdf_series(&spec, 0.4, Some(2.5)).unwrap();
        let b = compound_pdf_series(&scaled, 0.4, None).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn density_is_symmetric_normalized_and_positive() {
        for spec in [normal_comp(1.7, 0.9, 1.1), bernoulli_comp(2.4, 1.3, 0.7)] {
            for &x in &[0.3, 1.9, 5.5] {
                let p = compound_pdf_series(&spec, x, None).unwrap();
                let m = compound_pdf_series(&spec, -x, None).unwrap();
                assert_eq!(p, m, "evenness must be bit-exact");
                assert!(p > 0.0);
            }
            let mass = adaptive_integrate(
                |x| compound_pdf_series(&spec, x, None).unwrap(),
                0.0,
                60.0,
                1e-10,
            )
            .unwrap();
            assert!((2.0 * mass.value - 1.0).abs() < 1e-9, "mass {}", mass.value);
        }
    }

    #[test]
    fn chf_is_the_transform_of_the_series_density() {
        for spec in [normal_comp(1.0, 1.0, 1.0), bernoulli_comp(2.0, 1.5, 0.8)] {
            for &u in &[0.5, 2.0, 10.0] {
                let quad = adaptive_integrate(
                    |x| compound_pdf_series(&spec, x, None).unwrap() * (u * x).cos(),
                    0.0,
                    60.0,
                    1e-9,
                )
                .unwrap();
                let got = 2.0 * quad.value;
                let want = compound_chf(&spec, u).unwrap();
                assert!((got - want).abs() < 1e-6, "u = {u}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn triplet_forms() {
        let norm = normal_comp(3.0, 0.5, 1.2);
        let t = compound_triplet(&norm).unwrap();
        assert_eq!(t.gamma, 1.2);
        let l = t.density.as_ref().unwrap();
        assert!((l(0.4) - 3.0 * gaussian_pdf(0.4, 0.25)).abs() < 1e-15);
        assert!(t.atoms.is_empty());

        let bern = bernoulli_comp(2.0, 1.5, 0.8);
        let t = compound_triplet(&bern).unwrap();
        assert_eq!(t.gamma, 0.8);
        assert!(t.density.is_none());
        assert_eq!(t.atoms, vec![(-1.5, 1.0), (1.5, 1.0)]);

        let faint = normal_comp(1e-12, 1.0, 0.9);
        let t = compound_triplet(&faint).unwrap();
        assert_eq!(t.gamma, 0.9);
        assert!(t.density.as_ref().unwrap()(0.3) < 1e-12);
    }

    #[test]
    fn exponent_reconstruction_round_trip() {
        for spec in [normal_comp(1.0, 1.0, 1.0), bernoulli_comp(2.0, 1.5, 0.8)] {
            let t = compound_triplet(&spec).unwrap();
            for &u in &[0.5, 2.5] {
                let got = lkh_reconstruct(&t, u, 1e-8).unwrap();
                let want = compound_lch(&spec, u).unwrap();
                assert!((got - want).abs() < 1e-6, "u = {u}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn generator_two_point_jumps_are_exact() {
        let spec = bernoulli_comp(2.0, 1.5, 0.8);
        for &u in &[0.7, 2.0] {
            let f = ClosurePair {
                value: move |x: f64| Complex64::new(0.0, u * x).exp(),
                second: move |x: f64| -u * u * Complex64::new(0.0, u * x).exp(),
            };
            let x = 0.3;
            let g = generator_apply_compound(&spec, &f, x, 1e-12).unwrap();
            let symbol = g / Complex64::new(0.0, u * x).exp();
            let want = 2.0 * ((1.5 * u).cos() - 1.0) - 0.5 * 0.64 * u * u;
            assert!((symbol - want).norm() < 1e-10, "u = {u}: {symbol}");
        }

        // quadratic test function, no background: the finite difference gives
        // exactly lambda a^2
        let bare = CompoundSpec::new(
            2.0,
            LawSpec::new(Family::BernoulliPm, 1.5).unwrap(),
            None,
            1e-12,
        )
        .unwrap();
        let f = ClosurePair {
            value: |x: f64| Complex64::new(x * x, 0.0),
            second: |_: f64| Complex64::new(2.0, 0.0),
        };
        let g = generator_apply_compound(&bare, &f, 0.9, 1e-12).unwrap();
        assert!((g.re - 2.0 * 1.5 * 1.5).abs() < 1e-12);
        assert_eq!(g.im, 0.0);
    }

    #[test]
    fn generator_normal_jumps_match_the_exponent() {
        let spec = normal_comp(1.0, 1.0, 1.0);
        for &u in &[0.6, 1.8] {
            let f = ClosurePair {
                value: move |x: f64| Complex64::new(0.0, u * x).exp(),
                second: move |x: f64| -u * u * Complex64::new(0.0, u * x).exp(),
            };
            let g = generator_apply_compound(&spec, &f, -0.4, 1e-9).unwrap();
            let symbol = g / Complex64::new(0.0, u * -0.4).exp();
            let want = compound_lch(&spec, u).unwrap();
            assert!((symbol - want).norm() < 1e-6, "u = {u}: {symbol} vs {want}");
        }
    }

    #[test]
    fn constant_functions_are_annihilated() {
        let f = ClosurePair {
            value: |_: f64| Complex64::new(3.25, 0.0),
            second: |_: f64| Complex64::new(0.0, 0.0),
        };
        for spec in [normal_comp(1.0, 1.0, 1.0), bernoulli_comp(2.0, 1.5, 0.8)] {
            let g = generator_apply_compound(&spec, &f, 1.1, 1e-10).unwrap();
            assert!(g.norm() < 1e-12);
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let normal = LawSpec::new(Family::Normal, 1.0).unwrap();
        let cauchy = LawSpec::new(Family::Cauchy, 1.0).unwrap();
        assert!(CompoundSpec::new(0.0, normal.clone(), None, 1e-10).is_err());
        assert!(CompoundSpec::new(-1.0, normal.clone(), None, 1e-10).is_err());
        assert!(CompoundSpec::new(1.0, cauchy.clone(), None, 1e-10).is_err());
        assert!(CompoundSpec::new(1.0, normal.clone(), Some(cauchy), 1e-10).is_err());
        assert!(CompoundSpec::new(1.0, normal.clone(), None, 0.0).is_err());

        let bare = CompoundSpec::new(1.0, normal, None, 1e-10).unwrap();
        assert!(!bare.is_absolutely_continuous());
        assert!(matches!(
            compound_pdf_series(&bare, 0.0, None),
            Err(Error::NotAbsolutelyContinuous(_))
        ));

        let spec = normal_comp(1.0, 1.0, 1.0);
        assert!(compound_pdf_series(&spec, 0.0, Some(-1.0)).is_err());
        assert!(compound_pdf_series(&spec, 0.0, Some(1e6)).is_err());
    }
}
