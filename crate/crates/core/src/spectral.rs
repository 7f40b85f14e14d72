//! Characteristic functions of a stack and the pole-free product built from
//! them, plus residual checks of the identities relating them.
//!
//! `f^{(l|k|j)} = det[1 − E_k R^{(j|k)} E_k R^{(l|k)}]` vanishes at the cavity
//! modes of gap `k` between the stacks `(l|k)` and `(k|j)`.

use num_complex::Complex64;

use crate::cxmat::{mat_det, CMat};
use crate::error::{Error, Result};
use crate::materials::Basis;
use crate::stack::{LayerStack, StackEval};

pub type Triple = (usize, usize, usize);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharValue {
    pub value: Complex64,
    pub triple: Triple,
    pub xi: f64,
    pub kpar: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TildeCharValue {
    pub value: Complex64,
    /// Sum of the principal logarithms of the factors.
    pub log_value: Complex64,
    pub factors: Vec<CharValue>,
}

impl TildeCharValue {
    pub fn factorization(&self) -> Vec<Triple> {
        self.factors.iter().map(|f| f.triple).collect()
    }
}

/// `det[1 − E R_a E R_b] − 1`, formed without the cancellation of `1 − …`
/// so that small deviations keep their relative precision.
fn det_one_minus_deviation(e: &CMat, ra: &CMat, rb: &CMat) -> Complex64 {
    let a = &(&(e * ra) * e) * rb;
    match a.dim() {
        1 => -a[(0, 0)],
        2 => mat_det(&a) - a.trace(),
        n => mat_det(&(&CMat::identity(n) - &a)) - 1.0,
    }
}

fn check_triple(stack: &LayerStack, (l, k, j): Triple) -> Result<()> {
    let ordered = (l < k && k < j) || (j < k && k < l);
    if !ordered || l.max(j) > stack.last() {
        return Err(Error::InvalidArgument(format!(
            "triple ({l}|{k}|{j}) needs k strictly between l and j within 0..={}",
            stack.last()
        )));
    }
    Ok(())
}

/// `f^{(l|k|j)}` from an evaluated stack.
pub fn char_value(ev: &StackEval<'_>, triple: Triple) -> Result<Complex64> {
    Ok(1.0 + char_deviation(ev, triple)?)
}

/// `f^{(l|k|j)} − 1`, accurate when the gap is wide.
pub fn char_deviation(ev: &StackEval<'_>, triple: Triple) -> Result<Complex64> {
    check_triple(ev.stack(), triple)?;
    let (l, k, j) = triple;
    let rj = ev.reflection(j, k)?;
    let rl = ev.reflection(l, k)?;
    Ok(det_one_minus_deviation(ev.decay(k), &rj, &rl))
}

pub fn char_fn(
    stack: &LayerStack,
    triple: Triple,
    xi: f64,
    kpar: f64,
    basis: Basis,
) -> Result<CharValue> {
    let ev = StackEval::new(stack, xi, kpar, basis)?;
    Ok(CharValue {
        value: char_value(&ev, triple)?,
        triple,
        xi,
        kpar,
    })
}

/// The factors of `f̃` for split region `j`: the main gap term followed by
/// the left ladder `f^{(0|m|m+1)}`, `m = j−1…1`, and the right ladder
/// `f^{(m−1|m|N+1)}`, `m = j+1…N`.
pub fn ladder(ev: &StackEval<'_>, j: usize) -> Result<Vec<(Triple, Complex64)>> {
    Ok(ladder_deviations(ev, j)?.into_iter().map(|(t, d)| (t, 1.0 + d)).collect())
}

/// As [`ladder`], with each factor reported as `f − 1`.
pub fn ladder_deviations(ev: &StackEval<'_>, j: usize) -> Result<Vec<(Triple, Complex64)>> {
    let stack = ev.stack();
    let last = stack.last();
    if j == 0 || j >= last {
        return Err(Error::InvalidArgument(format!("split region {j} is not interior")));
    }
    // left[m-1] = R^{(0|m)}, m = 1..=j ; right[last-1-m] = R^{(N+1|m)}, m = N..=j
    let left = ev.reflections_from_left(0, j)?;
    let right = ev.reflections_from_right(last, j)?;
    let r0 = |m: usize| &left[m - 1];
    let rn = |m: usize| &right[last - 1 - m];
    let mut out = Vec::with_capacity(stack.n_interior());
    out.push(((0, j, last), det_one_minus_deviation(ev.decay(j), rn(j), r0(j))));
    for m in (1..j).rev() {
        let f = det_one_minus_deviation(ev.decay(m), &ev.interface(m).r, r0(m));
        out.push(((0, m, m + 1), f));
    }
    for m in j + 1..last {
        let f = det_one_minus_deviation(ev.decay(m), rn(m), &ev.interface(m - 1).r_rev);
        out.push(((m - 1, m, last), f));
    }
    Ok(out)
}

/// Principal logarithm of a characteristic value, refusing values whose
/// real part is not positive.
pub fn checked_ln(f: Complex64, triple: Triple, xi: f64, kpar: f64) -> Result<Complex64> {
    if !(f.re > 0.0) || !f.im.is_finite() {
        return Err(Error::Numeric(format!(
            "characteristic function f{triple:?} = {f} at (ξ={xi}, k∥={kpar}) has non-positive real part"
        )));
    }
    Ok(f.ln())
}

/// [`checked_ln`] of `1 + d`, keeping full relative precision for small `d`.
pub fn checked_ln_1p(d: Complex64, triple: Triple, xi: f64, kpar: f64) -> Result<Complex64> {
    let f = 1.0 + d;
    checked_ln(f, triple, xi, kpar)?;
    Ok(ln_1p(d))
}

/// Principal `ln(1 + d)`.
fn ln_1p(d: Complex64) -> Complex64 {
    if d.norm() > 0.5 {
        return (1.0 + d).ln();
    }
    // |1 + d|² − 1 = 2 Re d + |d|²
    let re = 0.5 * (2.0 * d.re + d.norm_sqr()).ln_1p();
    Complex64::new(re, d.im.atan2(1.0 + d.re))
}

/// Sum of `ln f` over the ladder for split `j`.
pub fn ln_tilde(ev: &StackEval<'_>, j: usize) -> Result<Complex64> {
    let mut s = Complex64::new(0.0, 0.0);
    for (t, d) in ladder_deviations(ev, j)? {
        s += checked_ln_1p(d, t, ev.xi, ev.kpar)?;
    }
    Ok(s)
}

pub fn tilde_char_fn(
    stack: &LayerStack,
    xi: f64,
    kpar: f64,
    basis: Basis,
    split: usize,
) -> Result<TildeCharValue> {
    let ev = StackEval::new(stack, xi, kpar, basis)?;
    tilde_from_eval(&ev, split)
}

fn tilde_from_eval(ev: &StackEval<'_>, split: usize) -> Result<TildeCharValue> {
    let deviations = ladder_deviations(ev, split)?;
    let log_value = deviations.iter().map(|(_, d)| ln_1p(*d)).sum();
    let factors: Vec<CharValue> = deviations
        .into_iter()
        .map(|(triple, d)| CharValue {
            value: 1.0 + d,
            triple,
            xi: ev.xi,
            kpar: ev.kpar,
        })
        .collect();
    let value = factors.iter().map(|f| f.value).product();
    Ok(TildeCharValue {
        value,
        log_value,
        factors,
    })
}

/// `|lhs − rhs| / |lhs|` for `f^{(i|k|j)} f^{(i|l|k)} = f^{(i|l|j)} f^{(l|k|j)}`.
pub fn verify_swap_identity(
    stack: &LayerStack,
    [i, l, k, j]: [usize; 4],
    xi: f64,
    kpar: f64,
    basis: Basis,
) -> Result<f64> {
    if !(i < l && l < k && k < j) {
        return Err(Error::InvalidArgument(format!(
            "swap identity needs i < l < k < j, got {i}, {l}, {k}, {j}"
        )));
    }
    let ev = StackEval::new(stack, xi, kpar, basis)?;
    let lhs = char_value(&ev, (i, k, j))? * char_value(&ev, (i, l, k))?;
    let rhs = char_value(&ev, (i, l, j))? * char_value(&ev, (l, k, j))?;
    Ok((lhs - rhs).norm() / lhs.norm())
}

/// Compares `f̃` on the growing branch (every `e^{−k̂Δz}` replaced by
/// `e^{+k̂Δz}`) with `f̃ · det ∏_k e^{2k̂_kΔz_k}`; returns the relative
/// residual.
///
/// Only reciprocal stacks between conductors qualify.
pub fn verify_uv_factorization(
    stack: &LayerStack,
    xi: f64,
    kpar: f64,
    split: usize,
) -> Result<f64> {
    if !stack.is_reciprocal() {
        return Err(Error::InvalidArgument(
            "ultraviolet factorization check needs reciprocal media".into(),
        ));
    }
    if !stack.has_conductor_boundaries() {
        return Err(Error::InvalidArgument(
            "ultraviolet factorization check needs conductor boundaries".into(),
        ));
    }
    let ev = StackEval::new(stack, xi, kpar, Basis::TmTe)?;
    let grown = ev.growing_branch()?;
    let f = tilde_from_eval(&ev, split)?.value;
    let g = tilde_from_eval(&grown, split)?.value;
    let mut exponent = 0.0;
    for m in 1..stack.last() {
        let kz = ev.wavenumbers(m).kz;
        exponent += 2.0 * (kz[0].re + kz[1].re) * stack.width(m);
    }
    let rhs = f * exponent.exp();
    Ok((g - rhs).norm() / rhs.norm())
}
