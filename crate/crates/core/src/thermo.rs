//! Matsubara summation, the zero-temperature frequency integral, and the
//! free-energy and work observables built on them.
//!
//! For an integrand `g(ξ, k∥)` the spectral sum is
//! `T Σ′_ℓ ∫d²k∥/(2π)² g(ξ_ℓ, k∥)` with `ξ_ℓ = 2πTℓ` and half weight at
//! `ℓ = 0`; at `T = 0` the sum becomes `∫₀^∞ dξ/2π`. Transverse momenta are
//! integrated as `(1/2π)∫k∥ dk∥` after rescaling `k∥ = u/L`, where `L` is
//! twice the smallest interior width, so the slowest gap factor decays like
//! `e^{−u}`. At `T = 0` the quarter plane is integrated in polar form with
//! the radius rescaled the same way.
//!
//! The `ℓ = 0` term uses the static limit of each material as is. For Drude
//! metals that removes the TE zero mode, which makes finite-temperature
//! results differ from the plasma model at large `Ta`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::Basis;
use crate::quad::{integrate_half_line, integrate_interval, CompensatedSum, Integral, Options, Sample};
use crate::spectral::{char_deviation, checked_ln_1p, ln_tilde, Triple};
use crate::stack::{LayerStack, StackEval};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalSpec {
    /// Temperature in inverse length units; zero selects the frequency integral.
    pub temperature: f64,
}

impl ThermalSpec {
    pub fn zero() -> Self {
        ThermalSpec { temperature: 0.0 }
    }

    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "temperature {temperature} must be finite and non-negative"
            )));
        }
        Ok(ThermalSpec { temperature })
    }

    pub fn matsubara(&self, l: usize) -> f64 {
        2.0 * PI * self.temperature * l as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Evaluation budget of each one-dimensional quadrature, outer and
    /// inner alike; an outer sample counts its whole inner integral.
    pub max_evaluations: u64,
    /// Number of consecutive negligible Matsubara terms that ends the sum.
    pub matsubara_patience: usize,
    pub max_matsubara_terms: usize,
    /// Add a geometric estimate of the truncated Matsubara tail.
    pub richardson: bool,
    /// Use the rayon pool for spectral points.
    pub parallel: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 0.0,
            max_evaluations: 50_000_000,
            matsubara_patience: 3,
            max_matsubara_terms: 1_000_000,
            richardson: false,
            parallel: true,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(rel_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) || !(self.abs_tol >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerances out of range: rel {} abs {}",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.matsubara_patience == 0 || self.max_matsubara_terms == 0 || self.max_evaluations == 0 {
            return Err(Error::InvalidArgument(
                "Matsubara patience, term limit and evaluation budget must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
    /// Matsubara terms summed (zero for the T = 0 integral).
    pub terms: usize,
    /// |Im| / |Re| of the accumulated complex integral.
    pub imag_residual: f64,
}

impl ObservableResult {
    fn from_complex(z: Complex64, error: f64, evaluations: u64, terms: usize) -> Self {
        let imag_residual = if z.re == 0.0 {
            z.im.abs()
        } else {
            z.im.abs() / z.re.abs()
        };
        ObservableResult {
            value: z.re,
            error_estimate: error,
            evaluations,
            terms,
            imag_residual,
        }
    }

    /// `self − other` with errors added.
    pub fn minus(&self, other: &ObservableResult) -> ObservableResult {
        ObservableResult {
            value: self.value - other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
            terms: self.terms.max(other.terms),
            imag_residual: self.imag_residual.max(other.imag_residual),
        }
    }
}

fn inner_options(quad: &QuadratureSpec, rel_tol: f64, abs_tol: f64, parallel: bool) -> Options {
    Options {
        rel_tol,
        abs_tol,
        max_evaluations: quad.max_evaluations,
        upper: 40.0,
        parallel,
    }
}

fn non_convergence(what: &str, z: Complex64, error: f64, evals: u64, terms: usize) -> Error {
    Error::NonConvergence {
        message: format!("{what} did not reach the requested tolerance"),
        partial: Box::new(ObservableResult::from_complex(z, error, evals, terms)),
    }
}

/// `(1/2π)∫k∥ dk∥ g(ξ, k∥)` with `k∥ = u/scale`.
fn kpar_integral<G>(g: &G, xi: f64, scale: f64, opts: &Options) -> Result<Integral>
where
    G: Fn(f64, f64) -> Result<Complex64> + Sync,
{
    let pref = 1.0 / (2.0 * PI * scale * scale);
    let r = integrate_half_line(
        |u| {
            let k = u / scale;
            Ok(Sample::from(g(xi, k)? * u * pref))
        },
        opts,
    )?;
    Ok(r)
}

/// `T Σ′_ℓ ∫d²k∥/(2π)² g(ξ_ℓ, k∥)`, or `∫dξ/2π ∫d²k∥/(2π)² g` at `T = 0`.
///
/// `scale` is the length used to rescale both ξ and k∥; it should be
/// comparable to the gap that controls the decay of `g`.
pub fn matsubara_sum<G>(
    g: G,
    scale: f64,
    thermal: &ThermalSpec,
    quad: &QuadratureSpec,
) -> Result<ObservableResult>
where
    G: Fn(f64, f64) -> Result<Complex64> + Sync,
{
    quad.validate()?;
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidArgument(format!("length scale {scale} must be positive")));
    }
    if thermal.temperature == 0.0 {
        zero_temperature(&g, scale, quad)
    } else {
        finite_temperature(&g, scale, thermal, quad)
    }
}

// At T = 0 the (ξ, k∥) quarter plane is covered in polar coordinates,
// ξ = ρ sin θ, k∥ = ρ cos θ, which keeps the logarithmic behaviour of
// ln f at the origin away from the corner of the domain. A coarse pass sizes
// the integral so that the angular integrals far out, which contribute
// little, are only resolved to an absolute accuracy.
fn zero_temperature<G>(g: &G, scale: f64, quad: &QuadratureSpec) -> Result<ObservableResult>
where
    G: Fn(f64, f64) -> Result<Complex64> + Sync,
{
    const COARSE: f64 = 1e-4;
    let mut inner_abs = 0.1 * quad.abs_tol;
    let mut spent = 0;
    if quad.rel_tol < COARSE {
        let coarse = QuadratureSpec {
            rel_tol: COARSE,
            ..*quad
        };
        let r = polar_integral(g, scale, &coarse, inner_abs)?;
        spent = r.evaluations;
        // the outer rule weights sum to roughly the initial domain length
        inner_abs = inner_abs.max(0.1 * quad.rel_tol * r.value.abs() / 40.0);
    }
    let mut r = polar_integral(g, scale, quad, inner_abs)?;
    r.evaluations += spent;
    Ok(r)
}

fn polar_integral<G>(g: &G, scale: f64, quad: &QuadratureSpec, inner_abs: f64) -> Result<ObservableResult>
where
    G: Fn(f64, f64) -> Result<Complex64> + Sync,
{
    let inner = inner_options(quad, 0.1 * quad.rel_tol, inner_abs, false);
    let outer = Options {
        rel_tol: quad.rel_tol,
        abs_tol: quad.abs_tol,
        max_evaluations: quad.max_evaluations,
        upper: 40.0,
        parallel: quad.parallel,
    };
    let pref = 1.0 / (4.0 * PI * PI * scale.powi(3));
    let r = integrate_half_line(
        |v| {
            let rho = v / scale;
            let w = pref * v * v;
            let i = integrate_interval(
                |th| {
                    let (s, c) = th.sin_cos();
                    Ok(Sample::from(g(rho * s, rho * c)? * c))
                },
                0.0,
                FRAC_PI_2,
                &Options {
                    abs_tol: inner.abs_tol / w.max(f64::MIN_POSITIVE),
                    ..inner
                },
            )?;
            if !i.converged {
                return Err(non_convergence("angular integral", i.value * w, i.error * w, i.evaluations, 0));
            }
            Ok(Sample {
                value: i.value * w,
                error: i.error * w,
                evaluations: i.evaluations,
            })
        },
        &outer,
    )?;
    if !r.converged {
        return Err(non_convergence("frequency integral", r.value, r.error, r.evaluations, 0));
    }
    Ok(ObservableResult::from_complex(r.value, r.error, r.evaluations, 0))
}

fn finite_temperature<G>(
    g: &G,
    scale: f64,
    thermal: &ThermalSpec,
    quad: &QuadratureSpec,
) -> Result<ObservableResult>
where
    G: Fn(f64, f64) -> Result<Complex64> + Sync,
{
    const BATCH: usize = 8;
    let t = thermal.temperature;
    // a tenth of the absolute budget spread over ten leading terms
    let inner = inner_options(quad, 0.1 * quad.rel_tol, 0.01 * quad.abs_tol / t, false);
    let term = |l: usize| -> Result<(Complex64, f64, u64)> {
        let w = if l == 0 { 0.5 * t } else { t };
        let i = kpar_integral(g, thermal.matsubara(l), scale, &inner)?;
        if !i.converged {
            return Err(non_convergence("transverse momentum integral", i.value, i.error, i.evaluations, l));
        }
        Ok((i.value * w, i.error * w, i.evaluations))
    };
    let mut sum = CompensatedSum::default();
    let mut error = 0.0;
    let mut evaluations = 0u64;
    let mut terms: Vec<Complex64> = Vec::new();
    let mut quiet = 0usize;
    let mut l0 = 0usize;
    loop {
        let batch: Vec<usize> = (l0..l0 + BATCH).collect();
        let values: Vec<(Complex64, f64, u64)> = if quad.parallel {
            batch.par_iter().map(|&l| term(l)).collect::<Result<_>>()?
        } else {
            batch.iter().map(|&l| term(l)).collect::<Result<_>>()?
        };
        for (v, e, n) in values {
            sum.add(v);
            error += e;
            evaluations += n;
            terms.push(v);
            let total = sum.value().norm();
            if v.norm() <= quad.rel_tol * total || v.norm() <= quad.abs_tol {
                quiet += 1;
            } else {
                quiet = 0;
            }
        }
        l0 += BATCH;
        if quiet >= quad.matsubara_patience {
            break;
        }
        if l0 >= quad.max_matsubara_terms || evaluations >= quad.max_evaluations {
            return Err(non_convergence("Matsubara sum", sum.value(), error, evaluations, l0));
        }
    }
    let mut value = sum.value();
    let n = terms.len();
    let tail = if n >= 2 && terms[n - 2].norm() > 0.0 {
        let q = terms[n - 1].norm() / terms[n - 2].norm();
        if q < 1.0 {
            terms[n - 1] * (q / (1.0 - q))
        } else {
            terms[n - 1] * (n as f64)
        }
    } else {
        Complex64::new(0.0, 0.0)
    };
    if quad.richardson {
        value += tail;
    }
    error += tail.norm();
    Ok(ObservableResult::from_complex(value, error, evaluations, n))
}

/// Length used to rescale the spectral variables.
pub fn spectral_scale(stack: &LayerStack) -> Result<f64> {
    stack
        .min_positive_width()
        .map(|w| 2.0 * w)
        .ok_or_else(|| Error::InvalidStack("stack has no interior layer of positive width".into()))
}

pub(crate) fn check_boundaries(stack: &LayerStack) -> Result<()> {
    if stack.n_interior() == 0 {
        return Err(Error::InvalidStack("stack has no interior region".into()));
    }
    if !stack.has_conductor_boundaries() && !stack.open_boundaries() {
        return Err(Error::InvalidStack(
            "energies and forces need perfect-conductor boundaries; pad the outer layers \
             or opt into open boundaries"
                .into(),
        ));
    }
    Ok(())
}

/// Spectral sum of a stack observable whose integrand is computed from the
/// evaluated stack at each point.
pub fn stack_observable<F>(
    stack: &LayerStack,
    thermal: &ThermalSpec,
    quad: &QuadratureSpec,
    basis: Basis,
    integrand: F,
) -> Result<ObservableResult>
where
    F: Fn(&StackEval<'_>) -> Result<Complex64> + Sync,
{
    let scale = spectral_scale(stack)?;
    matsubara_sum(
        |xi, k| {
            let ev = StackEval::new(stack, xi, k, basis)?;
            integrand(&ev)
        },
        scale,
        thermal,
        quad,
    )
}

/// Renormalized Casimir free energy per unit area, `T Σ′ ∫ ln f̃`.
pub fn casimir_energy(
    stack: &LayerStack,
    thermal: &ThermalSpec,
    quad: &QuadratureSpec,
    basis: Basis,
) -> Result<ObservableResult> {
    casimir_energy_split(stack, 1, thermal, quad, basis)
}

/// As [`casimir_energy`], factorizing `f̃` around split region `j`.
pub fn casimir_energy_split(
    stack: &LayerStack,
    j: usize,
    thermal: &ThermalSpec,
    quad: &QuadratureSpec,
    basis: Basis,
) -> Result<ObservableResult> {
    check_boundaries(stack)?;
    stack_observable(stack, thermal, quad, basis, |ev| ln_tilde(ev, j))
}

/// Work `T Σ′ ∫ ln f^{(i|k|j)}` needed to bring the stacks `(i|k)` and
/// `(k|j)` together from infinite separation of gap `k`.
pub fn work(
    stack: &LayerStack,
    triple: Triple,
    thermal: &ThermalSpec,
    quad: &QuadratureSpec,
    basis: Basis,
) -> Result<ObservableResult> {
    check_boundaries(stack)?;
    let (i, k, j) = triple;
    if !((i < k && k < j) || (j < k && k < i)) || i.max(j) > stack.last() {
        return Err(Error::InvalidArgument(format!(
            "work triple ({i}|{k}|{j}) needs k strictly between i and j"
        )));
    }
    stack_observable(stack, thermal, quad, basis, |ev| {
        let d = char_deviation(ev, triple)?;
        checked_ln_1p(d, triple, ev.xi, ev.kpar)
    })
}
