//! Casimir force per unit area on an interior gap, `F = −∂𝓕/∂Δz_j`.
//!
//! Negative values mean attraction: the free energy drops as the gap closes.

use num_complex::Complex64;

use crate::cxmat::{mat_inv, CMat};
use crate::error::{Error, Result};
use crate::materials::Basis;
use crate::stack::{LayerStack, StackEval};
use crate::thermo::{check_boundaries, stack_observable, ObservableResult, QuadratureSpec, ThermalSpec};

/// Off-diagonal magnitude above which [`force_diagonal`] refuses a stack.
pub const DIAGONAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct ForceQuery<'a> {
    pub stack: &'a LayerStack,
    /// Interior region whose width is differentiated.
    pub gap: usize,
    pub thermal: ThermalSpec,
    pub quad: QuadratureSpec,
    pub basis: Basis,
}

fn check_gap(stack: &LayerStack, j: usize) -> Result<()> {
    check_boundaries(stack)?;
    if j == 0 || j >= stack.last() {
        return Err(Error::InvalidArgument(format!("gap region {j} is not interior")));
    }
    Ok(())
}

/// Force integrand
/// `−tr[E{K, R_N}E R_0 (1 − E R_N E R_0)⁻¹]` with `R_N = R^{(N+1|j)}`,
/// `R_0 = R^{(0|j)}`, `K = diag(k̂_z^{(j)})`.
pub fn force_integrand(ev: &StackEval<'_>, j: usize) -> Result<Complex64> {
    let last = ev.stack().last();
    let r0 = ev.reflection(0, j)?;
    let rn = ev.reflection(last, j)?;
    let e = ev.decay(j);
    let k = ev.wavenumbers(j).matrix();
    let anti = &(&k * &rn) + &(&rn * &k);
    let ere = &(e * &rn) * e;
    let d = &CMat::identity(2) - &(&ere * &r0);
    let dinv = mat_inv(&d).map_err(|source| Error::Singular { index: j, source })?;
    let m = &(&(&(e * &anti) * e) * &r0) * &dinv;
    Ok(-m.trace())
}

/// Per-polarization Lifshitz integrand
/// `−Σ_λ 2k̂_λ x_λ/(1 − x_λ)`, `x_λ = e^{−2k̂_λΔz}R_{N,λ}R_{0,λ}`.
pub fn force_integrand_diagonal(ev: &StackEval<'_>, j: usize) -> Result<Complex64> {
    let last = ev.stack().last();
    let r0 = ev.reflection(0, j)?;
    let rn = ev.reflection(last, j)?;
    for (name, r) in [("R^(0|j)", &r0), ("R^(N+1|j)", &rn)] {
        let off = r.max_off_diag();
        if off > DIAGONAL_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "{name} is not diagonal (off-diagonal {off:e}) at (ξ={}, k∥={})",
                ev.xi, ev.kpar
            )));
        }
    }
    let e = ev.decay(j);
    let kz = ev.wavenumbers(j).kz;
    let mut s = Complex64::new(0.0, 0.0);
    for l in 0..2 {
        let x = e[(l, l)] * e[(l, l)] * rn[(l, l)] * r0[(l, l)];
        s += 2.0 * kz[l] * x / (1.0 - x);
    }
    Ok(-s)
}

/// Matrix trace formula; valid for any basis and any stack.
pub fn force_general(q: &ForceQuery<'_>) -> Result<ObservableResult> {
    check_gap(q.stack, q.gap)?;
    stack_observable(q.stack, &q.thermal, &q.quad, q.basis, |ev| force_integrand(ev, q.gap))
}

/// Scalar Lifshitz form; refuses stacks that are not diagonal in `q.basis`.
pub fn force_diagonal(q: &ForceQuery<'_>) -> Result<ObservableResult> {
    check_gap(q.stack, q.gap)?;
    if q.stack.working_basis(q.basis) != q.basis {
        return Err(Error::InvalidArgument(format!(
            "stack is not diagonal in the {:?} basis",
            q.basis
        )));
    }
    stack_observable(q.stack, &q.thermal, &q.quad, q.basis, |ev| {
        force_integrand_diagonal(ev, q.gap)
    })
}

/// Net force on the rigid body between gaps `k` and `j`, `F_j − F_k`:
/// the generalized force conjugate to `Δz_j` with `Δz_j + Δz_k` fixed.
/// The difference is integrated pointwise, to an absolute accuracy set by
/// the size of the two gap forces (the net force may vanish).
pub fn force_on_body(
    stack: &LayerStack,
    (k, j): (usize, usize),
    thermal: &ThermalSpec,
    quad: &QuadratureSpec,
    basis: Basis,
) -> Result<ObservableResult> {
    check_gap(stack, k)?;
    check_gap(stack, j)?;
    if k == j {
        return Err(Error::InvalidArgument("body needs two distinct gaps".into()));
    }
    let coarse = QuadratureSpec {
        rel_tol: quad.rel_tol.max(1e-4),
        ..*quad
    };
    let size = stack_observable(stack, thermal, &coarse, basis, |ev| {
        Ok(Complex64::from(force_integrand(ev, j)?.norm() + force_integrand(ev, k)?.norm()))
    })?;
    let fine = QuadratureSpec {
        abs_tol: quad.abs_tol.max(0.1 * quad.rel_tol * size.value.abs()),
        ..*quad
    };
    let mut r = stack_observable(stack, thermal, &fine, basis, |ev| {
        Ok(force_integrand(ev, j)? - force_integrand(ev, k)?)
    })?;
    r.evaluations += size.evaluations;
    Ok(r)
}
