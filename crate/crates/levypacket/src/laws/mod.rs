//! Catalog of symmetric laws: densities, characteristic functions,
//! characteristic exponents, Levy triplets and convolution algebra.
//!
//! Every law is stored as a *dimensionless* canonical family member plus a
//! positive length scale `a`.  The scale enters exactly once, at the API
//! boundary:
//!
//! ```text
//! pdf_a(x) = pdf_1(x / a) / a          chf_a(u) = chf_1(a u)
//! ```
//!
//! so the canonical formulas below never mention `a`.  All laws are symmetric
//! about 0, which keeps characteristic functions real-valued; that symmetry is
//! encoded in the return types (`f64`, not complex).
//!
//! Canonical families (`a = 1`):
//!
//! | family          | pdf                                   | chf                       |
//! |-----------------|---------------------------------------|---------------------------|
//! | `Degenerate`    | point mass at 0                       | `1`                       |
//! | `Normal`        | `e^{-x^2/2}/sqrt(2 pi)`               | `e^{-u^2/2}`              |
//! | `Uniform`       | `1/2` on `[-1, 1]`                    | `sin u / u`               |
//! | `BernoulliPm`   | atoms `1/2` at `+-1`                  | `cos u`                   |
//! | `Laplace`       | `e^{-|x|}/2`                          | `1/(1+u^2)`               |
//! | `Cauchy`        | `1/(pi (1+x^2))`                      | `e^{-|u|}`                |
//! | `Stable(al)`    | closed only for `al = 1, 2`           | `e^{-|u|^al / al}`        |
//! | `VG(nu)`        | `(|x|/2)^{nu-1/2} K_{nu-1/2}(|x|) / (sqrt(pi) Gamma(nu))` | `(1+u^2)^{-nu}` |
//! | `Student(al)`   | `(1+x^2)^{-(al+1)/2} / B(al/2, 1/2)`  | `2 (|u|/2)^{al/2} K_{al/2}(|u|) / Gamma(al/2)` |
//! | `Relativistic(nu)` | `nu e^nu K_1(sqrt(nu^2+x^2)) / (pi sqrt(nu^2+x^2))` | `e^{nu (1 - sqrt(1+u^2))}` |
//! | `CompoundPoisson(lam, comp)` | not absolutely continuous  | `e^{lam (chf_comp(u) - 1)}` |
//!
//! `Uniform` and `BernoulliPm` are *not* infinitely divisible; they are kept
//! in the catalog as building blocks (e.g. as compound-Poisson components)
//! and reject exponent/triplet queries.
//!
//! The Levy triplet of the relativistic family is
//! `l(y) = nu K_1(|y|/a) / (pi |y|)` *including* the factor `nu`: that
//! normalization is the one that reproduces the characteristic exponent
//! `nu (1 - sqrt(1 + a^2 u^2))`, which [`lkh_reconstruct`] verifies
//! numerically (see the module tests).

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::specfun::{
    bessel_k, bessel_k1, beta_fn, gamma_real, reverse_bessel_theta, sin_cos_integrals,
};
use crate::spectral::adaptive_integrate;

mod parse;

pub use parse::parse_law;

/// Density of a symmetric Levy measure, evaluated at jump sizes `y > 0`.
pub type LevyDensity = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Symmetric Levy triplet: Gaussian part, absolutely continuous jump density
/// and discrete jump atoms.
///
/// The jump measure is `density(|y|) dy + sum_j weight_j delta_{pos_j}`; the
/// density callable is only ever queried at `y > 0` and is implicitly even.
#[derive(Clone)]
pub struct LevyTriplet {
    /// Drift coefficient.  Always `0` for the symmetric catalog; kept so the
    /// type states its own restriction rather than hiding it.
    pub drift: f64,
    /// Gaussian standard-deviation coefficient (`gamma >= 0`).
    pub gamma: f64,
    /// Absolutely continuous part of the jump measure, if any.
    pub density: Option<LevyDensity>,
    /// Discrete jump atoms as `(position, weight)` pairs, `weight > 0`.
    pub atoms: Vec<(f64, f64)>,
    /// Small-`y` exponent `s` such that `density(y) ~ |y|^{-1-s}` as `y -> 0`
    /// (`s < 2`; `-1` for densities bounded near the origin).
    pub singularity_order: f64,
    /// Characteristic length of the measure; used to pick the width of the
    /// small-jump core in principal-value integrations.
    pub scale: f64,
}

impl std::fmt::Debug for LevyTriplet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LevyTriplet")
            .field("drift", &self.drift)
            .field("gamma", &self.gamma)
            .field("density", &self.density.is_some())
            .field("atoms", &self.atoms)
            .field("singularity_order", &self.singularity_order)
            .field("scale", &self.scale)
            .finish()
    }
}

impl LevyTriplet {
    /// The triplet of the degenerate law: no diffusion, no jumps.
    pub fn zero(scale: f64) -> Self {
        LevyTriplet {
            drift: 0.0,
            gamma: 0.0,
            density: None,
            atoms: vec![],
            singularity_order: 0.0,
            scale,
        }
    }

    pub fn has_atoms(&self) -> bool {
        !self.atoms.is_empty()
    }

    /// Check the structural requirements: no drift, `gamma >= 0`,
    /// `singularity_order < 2`, positive atom weights, and numerically finite
    /// `int_0^scale y^2 l(y) dy` and `int_scale^inf l(y) dy`.
    pub fn validate(&self) -> Result<()> {
        if self.drift != 0.0 {
            return Err(Error::NonSymmetric(
                "triplet has a drift term; the catalog is symmetric".into(),
            ));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::Domain(format!(
                "Gaussian coefficient must be finite and nonnegative, got {}",
                self.gamma
            )));
        }
        if self.singularity_order >= 2.0 {
            return Err(Error::Domain(format!(
                "jump density with singularity order {} is not integrable against y^2",
                self.singularity_order
            )));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(Error::Domain(format!("bad triplet scale {}", self.scale)));
        }
        for &(pos, w) in &self.atoms {
            if !pos.is_finite() || !w.is_finite() || w <= 0.0 {
                return Err(Error::Domain(format!(
                    "bad jump atom ({pos}, {w}): weights must be positive and finite"
                )));
            }
        }
        if let Some(density) = &self.density {
            let core = adaptive_integrate(|y| y * y * density(y), 0.0, self.scale, 1e-4)?;
            let tail = adaptive_integrate(|y| density(y), self.scale, f64::INFINITY, 1e-4)?;
            if !core.value.is_finite() || !tail.value.is_finite() {
                return Err(Error::Domain(
                    "jump density fails the min(1, y^2) integrability check".into(),
                ));
            }
        }
        Ok(())
    }
}

/// How the jump structure of a law is parameterized.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// Point mass at the origin.
    Degenerate,
    Normal,
    /// Uniform on `[-a, a]`; not infinitely divisible.
    Uniform,
    /// Atoms `1/2` at `+-a`; not infinitely divisible.
    BernoulliPm,
    Laplace,
    Cauchy,
    /// Symmetric stable with exponent `0 < alpha <= 2` and
    /// `chf(u) = exp(-a^alpha |u|^alpha / alpha)`.
    Stable { alpha: f64 },
    /// Variance-gamma with shape `nu > 0`; `VG(1)` is Laplace.
    VarianceGamma { nu: f64 },
    /// Student with tail exponent `alpha > 0`; `Student(1)` is Cauchy.
    Student { alpha: f64 },
    /// Relativistic square-root family with shape `nu > 0`.
    Relativistic { nu: f64 },
    /// Compound Poisson with jump rate `lambda > 0` and the given jump-size
    /// component law.
    CompoundPoisson { lambda: f64, component: Box<LawSpec> },
}

/// A law of the catalog: a canonical family member plus a length scale.
#[derive(Clone, Debug, PartialEq)]
pub struct LawSpec {
    pub family: Family,
    /// Length scale `a > 0` of the law.
    pub scale: f64,
}

/// Whether the mean of a law exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    /// The mean exists and equals zero.
    Zero,
    /// The mean diverges; the law is centered on its median instead.
    MedianCentered,
    /// No centering statement available.
    Undefined,
}

/// Second moment of a law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Variance {
    Finite(f64),
    Infinite,
}

/// Result of a convolution inside the catalog.
#[derive(Clone, Debug, PartialEq)]
pub enum Convolution {
    /// The convolution stays in the catalog.
    Closed(LawSpec),
    /// The convolution is a perfectly good law, but not a cataloged one.
    Unclosed,
}

impl LawSpec {
    /// Build a validated law.
    pub fn new(family: Family, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Domain(format!("law scale must be positive, got {scale}")));
        }
        match &family {
            Family::Stable { alpha } => {
                if !(*alpha > 0.0 && *alpha <= 2.0) {
                    return Err(Error::Domain(format!(
                        "stable exponent must satisfy 0 < alpha <= 2, got {alpha}"
                    )));
                }
            }
            Family::Student { alpha } => {
                if !(*alpha > 0.0) || !alpha.is_finite() {
                    return Err(Error::Domain(format!(
                        "Student exponent must be positive, got {alpha}"
                    )));
                }
            }
            Family::VarianceGamma { nu } | Family::Relativistic { nu } => {
                if !(*nu > 0.0) || !nu.is_finite() {
                    return Err(Error::Domain(format!("shape must be positive, got {nu}")));
                }
            }
            Family::CompoundPoisson { lambda, component } => {
                if !(*lambda > 0.0) || !lambda.is_finite() {
                    return Err(Error::Domain(format!(
                        "Poisson rate must be positive, got {lambda}"
                    )));
                }
                // re-validate the component so invalid nests cannot sneak in
                LawSpec::new(component.family.clone(), component.scale)?;
            }
            _ => {}
        }
        Ok(LawSpec { family, scale })
    }

    /// Canonical family member (`scale = 1`).
    pub fn dimensionless(family: Family) -> Result<Self> {
        LawSpec::new(family, 1.0)
    }

    pub fn is_infinitely_divisible(&self) -> bool {
        !matches!(self.family, Family::Uniform | Family::BernoulliPm)
    }

    /// Whether the law has a density (no atoms anywhere).
    pub fn is_absolutely_continuous(&self) -> bool {
        !matches!(
            self.family,
            Family::Degenerate | Family::BernoulliPm | Family::CompoundPoisson { .. }
        )
    }

    /// Probability density at `x`.
    ///
    /// Densities diverging at the origin (variance-gamma with `nu <= 1/2`)
    /// return `+inf` at `x = 0`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        let a = self.scale;
        canonical_pdf(&self.family, x / a).map(|p| p / a)
    }

    /// Characteristic function at `u`; real because the law is symmetric.
    pub fn chf(&self, u: f64) -> Result<f64> {
        canonical_chf(&self.family, self.scale * u)
    }

    /// Characteristic exponent `eta(u) = ln chf(u)`; real and `<= 0`.
    pub fn lch(&self, u: f64) -> Result<f64> {
        canonical_lch(&self.family, self.scale * u)
    }

    /// The Levy triplet of the law.
    pub fn triplet(&self) -> Result<LevyTriplet> {
        let t = self.build_triplet()?;
        t.validate()?;
        Ok(t)
    }

    pub fn expectation(&self) -> Expectation {
        match &self.family {
            Family::Cauchy => Expectation::MedianCentered,
            Family::Stable { alpha } | Family::Student { alpha } if *alpha <= 1.0 => {
                Expectation::MedianCentered
            }
            Family::CompoundPoisson { component, .. } => component.expectation(),
            _ => Expectation::Zero,
        }
    }

    pub fn variance(&self) -> Variance {
        let a2 = self.scale * self.scale;
        match &self.family {
            Family::Degenerate => Variance::Finite(0.0),
            Family::Normal => Variance::Finite(a2),
            Family::Uniform => Variance::Finite(a2 / 3.0),
            Family::BernoulliPm => Variance::Finite(a2),
            Family::Laplace => Variance::Finite(2.0 * a2),
            Family::Cauchy => Variance::Infinite,
            Family::Stable { alpha } => {
                if *alpha == 2.0 {
                    Variance::Finite(a2)
                } else {
                    Variance::Infinite
                }
            }
            Family::VarianceGamma { nu } => Variance::Finite(2.0 * nu * a2),
            Family::Student { alpha } => {
                if *alpha > 2.0 {
                    Variance::Finite(a2 / (alpha - 2.0))
                } else {
                    Variance::Infinite
                }
            }
            Family::Relativistic { nu } => Variance::Finite(nu * a2),
            Family::CompoundPoisson { lambda, component } => match component.variance() {
                // symmetric component: E[Y^2] is its variance
                Variance::Finite(v) => Variance::Finite(lambda * v * a2),
                Variance::Infinite => Variance::Infinite,
            },
        }
    }

    fn build_triplet(&self) -> Result<LevyTriplet> {
        let a = self.scale;
        match &self.family {
            Family::Degenerate => Ok(LevyTriplet::zero(a)),
            Family::Normal => Ok(LevyTriplet {
                gamma: a,
                ..LevyTriplet::zero(a)
            }),
            Family::Cauchy => Ok(LevyTriplet {
                density: Some(Arc::new(move |y: f64| a / (PI * y * y))),
                singularity_order: 1.0,
                ..LevyTriplet::zero(a)
            }),
            Family::Laplace => Ok(LevyTriplet {
                density: Some(Arc::new(move |y: f64| (-(y / a).abs()).exp() / y.abs())),
                singularity_order: 0.0,
                ..LevyTriplet::zero(a)
            }),
            Family::Stable { alpha } => {
                let alpha = *alpha;
                if alpha == 2.0 {
                    return Ok(LevyTriplet {
                        gamma: a,
                        ..LevyTriplet::zero(a)
                    });
                }
                // |y|^{-1-alpha} / (-2 alpha Gamma(-alpha) cos(alpha pi/2))
                // simplifies by reflection to sin(alpha pi/2) Gamma(alpha)/pi.
                let c = (alpha * PI / 2.0).sin() * gamma_real(alpha)? / PI * a.powf(alpha);
                Ok(LevyTriplet {
                    density: Some(Arc::new(move |y: f64| c * y.abs().powf(-1.0 - alpha))),
                    singularity_order: alpha,
                    ..LevyTriplet::zero(a)
                })
            }
            Family::VarianceGamma { nu } => {
                let nu = *nu;
                Ok(LevyTriplet {
                    density: Some(Arc::new(move |y: f64| {
                        nu * (-(y / a).abs()).exp() / y.abs()
                    })),
                    singularity_order: 0.0,
                    ..LevyTriplet::zero(a)
                })
            }
            Family::Student { alpha } => {
                if (alpha - 3.0).abs() > 1e-12 {
                    return Err(Error::UnknownLevyMeasure(format!(
                        "the Student jump density is only known in closed form \
                         for tail exponent 3, got {alpha}"
                    )));
                }
                Ok(LevyTriplet {
                    density: Some(Arc::new(move |y: f64| student3_levy_density(y.abs() / a) / a)),
                    singularity_order: 1.0,
                    ..LevyTriplet::zero(a)
                })
            }
            Family::Relativistic { nu } => {
                let nu = *nu;
                Ok(LevyTriplet {
                    density: Some(Arc::new(move |y: f64| {
                        let y = y.abs();
                        match bessel_k1(y / a) {
                            Ok(k1) => nu * k1 / (PI * y),
                            Err(_) => f64::NAN,
                        }
                    })),
                    singularity_order: 1.0,
                    ..LevyTriplet::zero(a)
                })
            }
            Family::Uniform | Family::BernoulliPm => Err(Error::NotInfinitelyDivisible(
                "uniform and two-point laws have no Levy triplet".into(),
            )),
            Family::CompoundPoisson { lambda, component } => {
                let lambda = *lambda;
                // jump-size law = component scaled by the outer scale
                let eff = LawSpec::new(component.family.clone(), component.scale * a)?;
                match &eff.family {
                    Family::Degenerate => Ok(LevyTriplet::zero(a)),
                    Family::BernoulliPm => Ok(LevyTriplet {
                        atoms: vec![(-eff.scale, lambda / 2.0), (eff.scale, lambda / 2.0)],
                        ..LevyTriplet::zero(a)
                    }),
                    Family::CompoundPoisson { .. } => Err(Error::UnknownLevyMeasure(
                        "nested compound-Poisson jump laws are not absolutely continuous".into(),
                    )),
                    _ => {
                        // absolutely continuous jumps: l(y) = lambda * pdf(y)
                        eff.pdf(1.0).map_err(|_| {
                            Error::UnknownLevyMeasure(format!(
                                "component {eff} has no closed-form density",
                            ))
                        })?;
                        let scale = eff.scale;
                        Ok(LevyTriplet {
                            density: Some(Arc::new(move |y: f64| {
                                lambda * eff.pdf(y.abs()).unwrap_or(f64::NAN)
                            })),
                            singularity_order: -1.0,
                            ..LevyTriplet::zero(scale)
                        })
                    }
                }
            }
        }
    }
}

fn canonical_pdf(family: &Family, x: f64) -> Result<f64> {
    match family {
        Family::Normal => Ok((-x * x / 2.0).exp() / (2.0 * PI).sqrt()),
        Family::Uniform => Ok(if x.abs() <= 1.0 { 0.5 } else { 0.0 }),
        Family::Laplace => Ok((-x.abs()).exp() / 2.0),
        Family::Cauchy => Ok(1.0 / (PI * (1.0 + x * x))),
        Family::Stable { alpha } => {
            if *alpha == 2.0 {
                canonical_pdf(&Family::Normal, x)
            } else if *alpha == 1.0 {
                canonical_pdf(&Family::Cauchy, x)
            } else {
                Err(Error::UnsupportedClosedForm(format!(
                    "stable densities are closed-form only for exponents 1 and 2, \
                     got {alpha}; use spectral inversion of the chf instead"
                )))
            }
        }
        Family::VarianceGamma { nu } => vg_pdf_canonical(*nu, x),
        Family::Student { alpha } => {
            let b = beta_fn(alpha / 2.0, 0.5)?;
            Ok((1.0 + x * x).powf(-(alpha + 1.0) / 2.0) / b)
        }
        Family::Relativistic { nu } => {
            let r = (nu * nu + x * x).sqrt();
            Ok(nu * nu.exp() * bessel_k1(r)? / (PI * r))
        }
        Family::Degenerate | Family::BernoulliPm | Family::CompoundPoisson { .. } => {
            Err(Error::NotAbsolutelyContinuous(format!(
                "{} has atoms and no density",
                parse::family_name(family)
            )))
        }
    }
}

/// Canonical variance-gamma density
/// `(|x|/2)^{nu-1/2} K_{nu-1/2}(|x|) / (sqrt(pi) Gamma(nu))`.
///
/// For integer `nu` the half-integer Bessel order reduces to
/// `e^{-|x|}` times a polynomial, which `bessel_k` exploits automatically.
fn vg_pdf_canonical(nu: f64, x: f64) -> Result<f64> {
    let w = x.abs();
    if w == 0.0 {
        return Ok(if nu > 0.5 {
            gamma_real(nu - 0.5)? / (2.0 * PI.sqrt() * gamma_real(nu)?)
        } else {
            // integrable divergence at the origin
            f64::INFINITY
        });
    }
    let k = bessel_k(nu - 0.5, w)?;
    Ok((w / 2.0).powf(nu - 0.5) * k / (PI.sqrt() * gamma_real(nu)?))
}

fn canonical_chf(family: &Family, w: f64) -> Result<f64> {
    match family {
        Family::Degenerate => Ok(1.0),
        Family::Normal => Ok((-w * w / 2.0).exp()),
        Family::Uniform => {
            if w.abs() < 1e-6 {
                let w2 = w * w;
                Ok(1.0 - w2 / 6.0 + w2 * w2 / 120.0)
            } else {
                Ok(w.sin() / w)
            }
        }
        Family::BernoulliPm => Ok(w.cos()),
        Family::Laplace => Ok(1.0 / (1.0 + w * w)),
        Family::Cauchy => Ok((-w.abs()).exp()),
        Family::Stable { alpha } => Ok((-w.abs().powf(*alpha) / alpha).exp()),
        Family::VarianceGamma { nu } => Ok((1.0 + w * w).powf(-nu)),
        Family::Student { alpha } => student_chf_canonical(*alpha, w.abs()),
        Family::Relativistic { nu } => Ok((nu * sqrt1p_minus(w)).exp()),
        Family::CompoundPoisson { lambda, component } => {
            Ok((lambda * (component.chf(w)? - 1.0)).exp())
        }
    }
}

fn canonical_lch(family: &Family, w: f64) -> Result<f64> {
    match family {
        Family::Degenerate => Ok(0.0),
        Family::Normal => Ok(-w * w / 2.0),
        Family::Laplace => Ok(-(w * w).ln_1p()),
        Family::Cauchy => Ok(-w.abs()),
        Family::Stable { alpha } => Ok(-w.abs().powf(*alpha) / alpha),
        Family::VarianceGamma { nu } => Ok(-nu * (w * w).ln_1p()),
        Family::Student { alpha } => student_lch_canonical(*alpha, w.abs()),
        Family::Relativistic { nu } => Ok(nu * sqrt1p_minus(w)),
        Family::CompoundPoisson { lambda, component } => Ok(lambda * (component.chf(w)? - 1.0)),
        Family::Uniform | Family::BernoulliPm => Err(Error::NotInfinitelyDivisible(format!(
            "{} is not infinitely divisible and has no characteristic exponent",
            parse::family_name(family)
        ))),
    }
}

/// `1 - sqrt(1 + w^2)` without cancellation for small `w`.
fn sqrt1p_minus(w: f64) -> f64 {
    let w2 = w * w;
    -w2 / (1.0 + (1.0 + w2).sqrt())
}

/// Odd integer `n` back from a Student tail exponent `alpha = 2n + 1`, if any.
fn student_odd_half(alpha: f64) -> Option<usize> {
    let n = (alpha - 1.0) / 2.0;
    let rounded = n.round();
    if (n - rounded).abs() < 1e-12 && (0.0..=30.0).contains(&rounded) {
        Some(rounded as usize)
    } else {
        None
    }
}

/// `n! 2^n / (2n)!` — the normalization of the odd-exponent Student chf.
fn student_theta_coefficient(n: usize) -> f64 {
    // (2n)!/n! = prod_{k=1}^{n} (n + k), so the coefficient is
    // prod 2/(n + k); safe from overflow for the supported n <= 30
    let mut c = 1.0;
    for k in 1..=n {
        c *= 2.0 / (n + k) as f64;
    }
    c
}

/// Canonical Student chf at `w = |u| >= 0`.
///
/// Odd tail exponents `alpha = 2n+1` use the exact polynomial form
/// `n! 2^n e^{-w} theta_n(w) / (2n)!`; other exponents use the Bessel form
/// `2 (w/2)^{alpha/2} K_{alpha/2}(w) / Gamma(alpha/2)`.
fn student_chf_canonical(alpha: f64, w: f64) -> Result<f64> {
    if w == 0.0 {
        return Ok(1.0);
    }
    if let Some(n) = student_odd_half(alpha) {
        return Ok(student_theta_coefficient(n) * (-w).exp() * reverse_bessel_theta(n, w));
    }
    // Guard only against absurdly small arguments where the split into
    // (w/2)^{alpha/2} and K would overflow before the factors recombine.
    let w = w.max(1e-20);
    let order = alpha / 2.0;
    let k = bessel_k(order, w)?;
    Ok(2.0 * (w / 2.0).powf(order) * k / gamma_real(order)?)
}

fn student_lch_canonical(alpha: f64, w: f64) -> Result<f64> {
    if w == 0.0 {
        return Ok(0.0);
    }
    if let Some(n) = student_odd_half(alpha) {
        // ln of the polynomial form stays finite for large w
        let theta = reverse_bessel_theta(n, w);
        return Ok((student_theta_coefficient(n) * theta).ln() - w);
    }
    let chf = student_chf_canonical(alpha, w)?;
    if chf > 0.0 && chf.is_finite() {
        Ok(chf.ln())
    } else {
        // chf underflowed: switch to the logarithmic Bessel asymptotics
        let order = alpha / 2.0;
        let mu2 = 4.0 * order * order;
        Ok((2.0 / gamma_real(order)?).ln() + order * (w / 2.0).ln()
            + 0.5 * (PI / (2.0 * w)).ln()
            - w
            + ((mu2 - 1.0) / (8.0 * w)).ln_1p())
    }
}

/// Jump density of the Student law with tail exponent 3, canonical scale:
/// `[1 - w (sin w ci(w) - cos w si(w))] / (pi w^2)` at `w = |y|`.
fn student3_levy_density(w: f64) -> f64 {
    match sin_cos_integrals(w) {
        Ok((si, ci)) => (1.0 - w * (w.sin() * ci - w.cos() * si)) / (PI * w * w),
        Err(_) => f64::NAN,
    }
}

/// Numerically rebuild the characteristic exponent of a symmetric triplet:
///
/// ```text
/// eta(u) = -gamma^2 u^2 / 2
///        + sum_j w_j (cos(u pos_j) - 1)
///        - u^2 int_0^eps y^2 l(y) dy                 (small-jump core)
///        + 2 int_eps^Y (cos(u y) - 1) l(y) dy
///        - 2 int_Y^inf l(y) dy
/// ```
///
/// `Y` grows by doubling until the neglected oscillatory tail
/// `|2 int_Y^inf cos(u y) l(y) dy| <= 2 l(Y)/|u|` (integration by parts for a
/// monotone tail) is below `tol/4`.  The absolute error is at most `tol`.
pub fn lkh_reconstruct(triplet: &LevyTriplet, u: f64, tol: f64) -> Result<f64> {
    if triplet.drift != 0.0 {
        return Err(Error::NonSymmetric(
            "characteristic-exponent reconstruction assumes a driftless triplet".into(),
        ));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let mut eta = -0.5 * triplet.gamma * triplet.gamma * u * u;
    for &(pos, w) in &triplet.atoms {
        eta += w * ((u * pos).cos() - 1.0);
    }
    if let Some(density) = &triplet.density {
        let eps = crate::spectral::pv::EPS_CORE_FACTOR * triplet.scale;
        let core = adaptive_integrate(|y| y * y * density(y), 0.0, eps, tol * 1e-2)?;
        eta -= u * u * core.value;

        let freq = u.abs().max(0.1);
        let mut y_cut = 8.0 * triplet.scale;
        while 2.0 * density(y_cut) / freq > tol / 4.0 {
            y_cut *= 2.0;
            if y_cut > 1e9 * triplet.scale {
                return Err(Error::Convergence(
                    "jump density tail decays too slowly to truncate".into(),
                ));
            }
        }
        let mid = adaptive_integrate(
            |y| 2.0 * ((u * y).cos() - 1.0) * density(y),
            eps,
            y_cut,
            tol / 4.0,
        )?;
        let tail = adaptive_integrate(|y| density(y), y_cut, f64::INFINITY, tol / 8.0)?;
        eta += mid.value - 2.0 * tail.value;
    }
    Ok(eta)
}

/// Convolution inside the catalog.
///
/// Stable laws (with Normal, Cauchy and Student(1) as aliases) combine scales
/// as `(a1^alpha + a2^alpha)^{1/alpha}`; variance-gamma (with Laplace as
/// `VG(1)`) and relativistic laws add shapes at equal scale and report
/// [`Error::ScaleMismatch`] otherwise; compound Poisson laws with identical
/// components add rates; degenerate laws are the identity.  Everything else
/// leaves the catalog and returns [`Convolution::Unclosed`].
pub fn convolve_family(lhs: &LawSpec, rhs: &LawSpec) -> Result<Convolution> {
    if matches!(lhs.family, Family::Degenerate) {
        return Ok(Convolution::Closed(rhs.clone()));
    }
    if matches!(rhs.family, Family::Degenerate) {
        return Ok(Convolution::Closed(lhs.clone()));
    }

    if let (Some((al, a1)), Some((ar, a2))) = (stable_alias(lhs), stable_alias(rhs)) {
        if al == ar {
            let a = (a1.powf(al) + a2.powf(al)).powf(1.0 / al);
            let family = if al == 2.0 {
                Family::Normal
            } else if al == 1.0 {
                Family::Cauchy
            } else {
                Family::Stable { alpha: al }
            };
            return Ok(Convolution::Closed(LawSpec::new(family, a)?));
        }
        return Ok(Convolution::Unclosed);
    }

    if let (Some(n1), Some(n2)) = (vg_alias(lhs), vg_alias(rhs)) {
        if lhs.scale != rhs.scale {
            return Err(Error::ScaleMismatch(format!(
                "variance-gamma convolution needs equal scales, got {} and {}",
                lhs.scale, rhs.scale
            )));
        }
        let nu = n1 + n2;
        let family = if nu == 1.0 {
            Family::Laplace
        } else {
            Family::VarianceGamma { nu }
        };
        return Ok(Convolution::Closed(LawSpec::new(family, lhs.scale)?));
    }

    if let (Family::Relativistic { nu: n1 }, Family::Relativistic { nu: n2 }) =
        (&lhs.family, &rhs.family)
    {
        if lhs.scale != rhs.scale {
            return Err(Error::ScaleMismatch(format!(
                "relativistic convolution needs equal scales, got {} and {}",
                lhs.scale, rhs.scale
            )));
        }
        return Ok(Convolution::Closed(LawSpec::new(
            Family::Relativistic { nu: n1 + n2 },
            lhs.scale,
        )?));
    }

    if let (
        Family::CompoundPoisson { lambda: l1, component: c1 },
        Family::CompoundPoisson { lambda: l2, component: c2 },
    ) = (&lhs.family, &rhs.family)
    {
        if c1 == c2 && lhs.scale == rhs.scale {
            return Ok(Convolution::Closed(LawSpec::new(
                Family::CompoundPoisson {
                    lambda: l1 + l2,
                    component: c1.clone(),
                },
                lhs.scale,
            )?));
        }
        return Ok(Convolution::Unclosed);
    }

    Ok(Convolution::Unclosed)
}

/// View Normal, Cauchy, Stable and Student(1) as `(alpha, scale)` stable laws.
fn stable_alias(law: &LawSpec) -> Option<(f64, f64)> {
    match &law.family {
        Family::Normal => Some((2.0, law.scale)),
        Family::Cauchy => Some((1.0, law.scale)),
        Family::Stable { alpha } => Some((*alpha, law.scale)),
        Family::Student { alpha } if *alpha == 1.0 => Some((1.0, law.scale)),
        _ => None,
    }
}

/// View Laplace and VG as variance-gamma shapes.
fn vg_alias(law: &LawSpec) -> Option<f64> {
    match &law.family {
        Family::Laplace => Some(1.0),
        Family::VarianceGamma { nu } => Some(*nu),
        _ => None,
    }
}
