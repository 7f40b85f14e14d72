//! Layer stacks and effective reflection/transmission of stack segments.
//!
//! Regions are numbered `0..=N+1`; regions `0` and `N+1` are semi-infinite.
//! All evaluations happen at imaginary frequency, where propagation across
//! region `m` is the decaying factor `E_m = diag(e^{−k̂_z Δz_m})`. The
//! segment recursion is arranged so that only `E_m` (never its inverse)
//! appears.
//!
//! Reflection `R^{(a|b)}` is the reflection of a wave inside region `b`
//! travelling toward region `a`, referenced at the edge of `b` facing `a`.
//! Transmission `T^{(a|b)}` carries a wave from `b` into `a`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cxmat::{diag_exp_capped, mat_inv, CMat, MatError, DEFAULT_EXPONENT_CAP};
use crate::error::{Error, Result};
use crate::materials::{
    change_basis, change_basis_reflection, interface_coeffs, wavenumbers, Basis, CoeffPair,
    Incidence, Material, WaveNumbers,
};

/// Ratio of a padded outer layer to the total thickness of the interior
/// layers it encloses (see [`LayerStack::enclose_in_conductors`]).
pub const DEFAULT_PAD_FACTOR: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub material: Material,
    /// `f64::INFINITY` for the two boundary regions.
    pub width: f64,
}

impl Region {
    pub fn new(material: Material, width: f64) -> Self {
        Region { material, width }
    }

    pub fn boundary(material: Material) -> Self {
        Region {
            material,
            width: f64::INFINITY,
        }
    }
}

/// Ordered regions between two semi-infinite boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    regions: Vec<Region>,
    open_boundaries: bool,
}

/// The stack `(i|j)` of regions strictly between `i` and `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub i: usize,
    pub j: usize,
}

impl Segment {
    pub fn new(i: usize, j: usize) -> Self {
        Segment { i, j }
    }
}

impl LayerStack {
    pub fn new(regions: Vec<Region>) -> Result<Self> {
        let s = LayerStack {
            regions,
            open_boundaries: false,
        };
        s.validate()?;
        Ok(s)
    }

    /// Builds `left | interior… | right` with semi-infinite outer regions.
    pub fn from_layers(left: Material, interior: &[(Material, f64)], right: Material) -> Result<Self> {
        let mut regions = vec![Region::boundary(left)];
        regions.extend(interior.iter().map(|&(m, w)| Region::new(m, w)));
        regions.push(Region::boundary(right));
        Self::new(regions)
    }

    /// Allows energy and force evaluations without conductor boundaries.
    pub fn with_open_boundaries(mut self, open: bool) -> Self {
        self.open_boundaries = open;
        self
    }

    pub fn open_boundaries(&self) -> bool {
        self.open_boundaries
    }

    fn validate(&self) -> Result<()> {
        let n = self.regions.len();
        if n < 2 {
            return Err(Error::InvalidStack("a stack needs at least two regions".into()));
        }
        for (j, r) in self.regions.iter().enumerate() {
            r.material.validate()?;
            let boundary = j == 0 || j == n - 1;
            if boundary {
                if r.width != f64::INFINITY {
                    return Err(Error::InvalidStack(format!(
                        "boundary region {j} must have infinite width"
                    )));
                }
            } else {
                if !(r.width.is_finite() && r.width >= 0.0) {
                    return Err(Error::InvalidStack(format!(
                        "region {j} width {} must be finite and non-negative",
                        r.width
                    )));
                }
                if r.material.is_perfect_conductor() {
                    return Err(Error::InvalidStack(format!(
                        "perfect conductor in interior region {j}; conductors may only bound the stack"
                    )));
                }
            }
        }
        for j in 0..n - 1 {
            interface_coeffs(
                &self.regions[j].material,
                &self.regions[j + 1].material,
                1.0,
                1.0,
                Basis::TmTe,
            )
            .map_err(|e| match e {
                Error::UnsupportedPairing(m) => {
                    Error::UnsupportedPairing(format!("interface {j}|{}: {m}", j + 1))
                }
                other => other,
            })?;
        }
        Ok(())
    }

    /// Number of interior regions N.
    pub fn n_interior(&self) -> usize {
        self.regions.len() - 2
    }

    /// Index of the right boundary region, N+1.
    pub fn last(&self) -> usize {
        self.regions.len() - 1
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn material(&self, j: usize) -> &Material {
        &self.regions[j].material
    }

    pub fn width(&self, j: usize) -> f64 {
        self.regions[j].width
    }

    /// Copy with interior region `j` resized.
    pub fn with_width(&self, j: usize, width: f64) -> Result<Self> {
        if j == 0 || j >= self.last() {
            return Err(Error::InvalidArgument(format!("region {j} is not interior")));
        }
        let mut s = self.clone();
        s.regions[j].width = width;
        s.validate()?;
        Ok(s)
    }

    /// Interface positions z_{j|j+1}, j = 0..=N, with z_{0|1} = 0.
    pub fn interface_positions(&self) -> Vec<f64> {
        let mut z = vec![0.0];
        for r in &self.regions[1..self.last()] {
            let prev = *z.last().unwrap_or(&0.0);
            z.push(prev + r.width);
        }
        z
    }

    pub fn has_conductor_boundaries(&self) -> bool {
        self.regions[0].material.is_perfect_conductor()
            && self.regions[self.last()].material.is_perfect_conductor()
    }

    pub fn is_reciprocal(&self) -> bool {
        self.regions.iter().all(|r| r.material.is_reciprocal())
    }

    pub fn has_weyl(&self) -> bool {
        self.regions.iter().any(|r| r.material.is_weyl())
    }

    /// Basis the recursion runs in: propagation must be diagonal, so any
    /// Weyl layer forces the helicity basis.
    pub fn working_basis(&self, requested: Basis) -> Basis {
        if self.has_weyl() {
            Basis::Helicity
        } else {
            requested
        }
    }

    /// Smallest positive interior width.
    pub fn min_positive_width(&self) -> Option<f64> {
        self.regions[1..self.last()]
            .iter()
            .map(|r| r.width)
            .filter(|w| *w > 0.0)
            .min_by(f64::total_cmp)
    }

    /// Wraps the stack in perfect conductors for open-geometry emulation.
    ///
    /// The outer media become padding layers of width `pad`
    /// (default: [`DEFAULT_PAD_FACTOR`] times the interior thickness).
    pub fn enclose_in_conductors(&self, pad: Option<f64>) -> Result<Self> {
        if self.regions[0].material.is_perfect_conductor()
            || self.regions[self.last()].material.is_perfect_conductor()
        {
            return Err(Error::InvalidStack(
                "stack already has a conductor boundary".into(),
            ));
        }
        let inner: f64 = self.regions[1..self.last()].iter().map(|r| r.width).sum();
        let pad = pad.unwrap_or(DEFAULT_PAD_FACTOR * inner);
        if !(pad.is_finite() && pad > 0.0) {
            return Err(Error::InvalidArgument(format!("padding width {pad} must be positive")));
        }
        let mut regions = vec![Region::boundary(Material::PerfectConductor)];
        regions.push(Region::new(self.regions[0].material, pad));
        regions.extend_from_slice(&self.regions[1..self.last()]);
        regions.push(Region::new(self.regions[self.last()].material, pad));
        regions.push(Region::boundary(Material::PerfectConductor));
        LayerStack::new(regions)
    }

    /// Widens regions 1 and N to at least `DEFAULT_PAD_FACTOR` times the
    /// thickness of the regions between them.
    pub fn pad_outer_layers(&self) -> Result<Self> {
        let n = self.n_interior();
        if n < 3 {
            return Err(Error::InvalidStack(
                "padding needs at least three interior regions".into(),
            ));
        }
        let inner: f64 = self.regions[2..n].iter().map(|r| r.width).sum();
        let pad = DEFAULT_PAD_FACTOR * inner;
        let mut s = self.clone();
        for j in [1, n] {
            s.regions[j].width = s.regions[j].width.max(pad);
        }
        s.validate()?;
        Ok(s)
    }
}

/// Everything the recursion needs at one spectral point.
#[derive(Debug, Clone)]
pub struct StackEval<'a> {
    stack: &'a LayerStack,
    pub xi: f64,
    pub kpar: f64,
    basis: Basis,
    kz: Vec<WaveNumbers>,
    decay: Vec<CMat>,
    iface: Vec<CoeffPair>,
}

impl<'a> StackEval<'a> {
    /// Evaluates the stack in its working basis for `requested`.
    pub fn new(stack: &'a LayerStack, xi: f64, kpar: f64, requested: Basis) -> Result<Self> {
        let basis = stack.working_basis(requested);
        let n = stack.regions.len();
        let mut kz = Vec::with_capacity(n);
        let mut decay = Vec::with_capacity(n);
        for (j, r) in stack.regions.iter().enumerate() {
            let w = wavenumbers(&r.material, xi, kpar)?;
            let boundary = j == 0 || j == n - 1;
            decay.push(if boundary {
                CMat::zeros(2)
            } else {
                decay_matrix(&w, r.width)
            });
            kz.push(w);
        }
        let iface = (0..n - 1)
            .map(|j| {
                interface_coeffs(
                    &stack.regions[j].material,
                    &stack.regions[j + 1].material,
                    xi,
                    kpar,
                    basis,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StackEval {
            stack,
            xi,
            kpar,
            basis,
            kz,
            decay,
            iface,
        })
    }

    pub fn stack(&self) -> &LayerStack {
        self.stack
    }

    /// Copy with every interior `e^{−k̂Δz}` replaced by `e^{+k̂Δz}`, the
    /// other sign of the continuation. Interface coefficients of reciprocal
    /// media are even in k̂ and stay as they are.
    pub fn growing_branch(&self) -> Result<Self> {
        let mut g = self.clone();
        for m in 1..self.stack.last() {
            let w = self.stack.width(m);
            let v: Vec<Complex64> = self.kz[m].kz.iter().map(|k| k * w).collect();
            g.decay[m] = diag_exp_capped(&v, DEFAULT_EXPONENT_CAP)?;
        }
        Ok(g)
    }

    /// Basis of every matrix this evaluation returns.
    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn wavenumbers(&self, j: usize) -> &WaveNumbers {
        &self.kz[j]
    }

    /// `diag(e^{−k̂Δz_j})`; zero for the boundaries and for opaque layers.
    pub fn decay(&self, j: usize) -> &CMat {
        &self.decay[j]
    }

    /// Coefficients of interface `j|j+1`, incidence from the left.
    pub fn interface(&self, j: usize) -> &CoeffPair {
        &self.iface[j]
    }

    /// Coefficients of segment `(i|j)`; `r`, `t` describe incidence from `i`.
    pub fn segment(&self, i: usize, j: usize) -> Result<CoeffPair> {
        check_segment(self.stack, i, j)?;
        if i < j {
            self.fold(i, j)
        } else {
            Ok(self.fold(j, i)?.reversed())
        }
    }

    /// Segment `(i|j)` assembled from `(i|k)` and `(k|j)`.
    pub fn segment_split(&self, i: usize, j: usize, k: usize) -> Result<CoeffPair> {
        check_segment(self.stack, i, j)?;
        let (lo, hi) = (i.min(j), i.max(j));
        if !(lo < k && k < hi) {
            return Err(Error::InvalidArgument(format!(
                "split {k} is not strictly inside ({i}|{j})"
            )));
        }
        let c = combine(&self.fold(lo, k)?, &self.fold(k, hi)?, &self.decay[k], k)?;
        Ok(if i < j { c } else { c.reversed() })
    }

    fn fold(&self, i: usize, j: usize) -> Result<CoeffPair> {
        let mut acc = self.iface[i].clone();
        for m in i + 1..j {
            acc = combine(&acc, &self.iface[m], &self.decay[m], m)?;
        }
        Ok(acc)
    }

    /// Reflection `R^{(a|m)}` of a wave in region `m` heading toward `a`.
    pub fn reflection(&self, a: usize, m: usize) -> Result<CMat> {
        check_segment(self.stack, a, m)?;
        let mut v = if a < m {
            self.reflections_from_left(a, m)?
        } else {
            self.reflections_from_right(a, m)?
        };
        Ok(v.pop().expect("at least one reflection"))
    }

    /// `R^{(a|m)}` for `m = a+1..=to` (in that order).
    pub fn reflections_from_left(&self, a: usize, to: usize) -> Result<Vec<CMat>> {
        let mut out = Vec::with_capacity(to - a);
        let mut r = self.iface[a].r_rev.clone();
        out.push(r.clone());
        for m in a + 1..to {
            let c = &self.iface[m];
            let e = &self.decay[m];
            let er = e * &r;
            let d = &CMat::identity(2) - &(&(e * &c.r) * &er);
            let dinv = mat_inv(&d).map_err(|source| Error::Singular { index: m, source })?;
            r = &c.r_rev + &(&(&(&c.t * &er) * &dinv) * &(e * &c.t_rev));
            out.push(r.clone());
        }
        Ok(out)
    }

    /// `R^{(a|m)}` for `m = a−1` down to `to` (in that order).
    pub fn reflections_from_right(&self, a: usize, to: usize) -> Result<Vec<CMat>> {
        let mut out = Vec::with_capacity(a - to);
        let mut r = self.iface[a - 1].r.clone();
        out.push(r.clone());
        for m in (to + 1..a).rev() {
            // extend from region m to m−1 across interface m−1|m
            let c = &self.iface[m - 1];
            let e = &self.decay[m];
            let er = e * &r;
            let d = &CMat::identity(2) - &(&(e * &c.r_rev) * &er);
            let dinv = mat_inv(&d).map_err(|source| Error::Singular { index: m, source })?;
            r = &c.r + &(&(&(&c.t_rev * &er) * &dinv) * &(e * &c.t));
            out.push(r.clone());
        }
        Ok(out)
    }
}

fn check_segment(stack: &LayerStack, i: usize, j: usize) -> Result<()> {
    if i == j || i.max(j) > stack.last() {
        return Err(Error::InvalidArgument(format!(
            "segment ({i}|{j}) is not valid for a stack with regions 0..={}",
            stack.last()
        )));
    }
    Ok(())
}

fn decay_matrix(w: &WaveNumbers, width: f64) -> CMat {
    if width == 0.0 {
        return CMat::identity(2);
    }
    let v: Vec<Complex64> = w
        .kz
        .iter()
        .map(|k| {
            let x = k * width;
            if x.re > DEFAULT_EXPONENT_CAP || !x.re.is_finite() {
                Complex64::new(0.0, 0.0)
            } else {
                (-x).exp()
            }
        })
        .collect();
    CMat::from_diag(&v)
}

/// Joins `(i|k)` and `(k|j)` (both with incidence from the left) through
/// region `k` with decay `e`.
fn combine(a: &CoeffPair, b: &CoeffPair, e: &CMat, k: usize) -> Result<CoeffPair> {
    let one = CMat::identity(2);
    let singular = |source: MatError| Error::Singular { index: k, source };
    let ea = e * &a.r_rev; // E R^{(i|k)}
    let eb = e * &b.r; // E R^{(j|k)}
    let d = &one - &(&eb * &ea);
    let dp = &one - &(&ea * &eb);
    let dinv = mat_inv(&d).map_err(singular)?;
    let dpinv = mat_inv(&dp).map_err(singular)?;
    let in_from_right = e * &b.t_rev; // E T^{(k|j)}
    let in_from_left = e * &a.t; // E T^{(k|i)}
    let t_rev = &(&a.t_rev * &dinv) * &in_from_right;
    let r_rev = &b.r_rev + &(&(&(&b.t * &ea) * &dinv) * &in_from_right);
    let t = &(&b.t * &dpinv) * &in_from_left;
    let r = &a.r + &(&(&(&a.t_rev * &eb) * &dpinv) * &in_from_left);
    Ok(CoeffPair {
        r,
        t,
        r_rev,
        t_rev,
        basis: a.basis,
        incidence: Incidence::FromLeft,
    })
}

/// Effective coefficients of segment `(i|j)` in `basis`.
///
/// `r`, `t` describe a wave entering from region `i`; `r_rev`, `t_rev` one
/// entering from `j`. Adjacent regions return the interface coefficients.
pub fn segment_coeffs(
    stack: &LayerStack,
    seg: Segment,
    xi: f64,
    kpar: f64,
    basis: Basis,
) -> Result<CoeffPair> {
    let ev = StackEval::new(stack, xi, kpar, basis)?;
    let c = ev.segment(seg.i, seg.j)?;
    Ok(change_basis(&c, basis))
}

/// As [`segment_coeffs`], but assembled from the sub-segments `(i|k)` and
/// `(k|j)`.
pub fn segment_coeffs_split(
    stack: &LayerStack,
    seg: Segment,
    k: usize,
    xi: f64,
    kpar: f64,
    basis: Basis,
) -> Result<CoeffPair> {
    let ev = StackEval::new(stack, xi, kpar, basis)?;
    let c = ev.segment_split(seg.i, seg.j, k)?;
    Ok(change_basis(&c, basis))
}

/// Which boundary region a reflection looks toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// `R^{(0|j)}` (left) or `R^{(N+1|j)}` (right) built by induction over
/// interfaces from the boundary. For the left side
///
/// `R^{(0|m)} = T⁻¹[−R′(1 − R′ E R₀ E)⁻¹ + E R₀ (1 − E R′ E R₀)⁻¹ E] T`
///
/// with `T = T^{(m−1|m)}`, `R′ = R^{(m|m−1)}`, `E = E_{m−1}` and
/// `R₀ = R^{(0|m−1)}`; the right side is the mirror image. This route is
/// independent of the segment recursion and needs every interface
/// transmission on the way to be invertible.
pub fn boundary_reflection(
    stack: &LayerStack,
    j: usize,
    side: Side,
    xi: f64,
    kpar: f64,
    basis: Basis,
) -> Result<CMat> {
    let last = stack.last();
    if j == 0 || j >= last {
        return Err(Error::InvalidArgument(format!("region {j} is not interior")));
    }
    let ev = StackEval::new(stack, xi, kpar, basis)?;
    // (T, R′, E) for each step, starting next to the boundary
    let (mut r0, steps, incidence): (CMat, Vec<(CMat, CMat, usize, usize)>, Incidence) = match side {
        Side::Left => (
            ev.iface[0].r_rev.clone(),
            (2..=j)
                .map(|m| (ev.iface[m - 1].t_rev.clone(), ev.iface[m - 1].r.clone(), m - 1, m - 1))
                .collect(),
            Incidence::FromRight,
        ),
        Side::Right => (
            ev.iface[last - 1].r.clone(),
            (j..last - 1)
                .rev()
                .map(|m| (ev.iface[m].t.clone(), ev.iface[m].r_rev.clone(), m + 1, m))
                .collect(),
            Incidence::FromLeft,
        ),
    };
    let one = CMat::identity(2);
    for (t, rp, region, iface) in steps {
        let singular = |source: MatError| Error::Singular { index: iface, source };
        let e = &ev.decay[region];
        let tinv = mat_inv(&t).map_err(singular)?;
        let x = &(e * &r0) * e;
        let a = mat_inv(&(&one - &(&rp * &x))).map_err(singular)?;
        let erp = e * &rp;
        let b = mat_inv(&(&one - &(&erp * &(e * &r0)))).map_err(singular)?;
        let inner = &(-&(&rp * &a)) + &(&(&(e * &r0) * &b) * e);
        r0 = &(&tinv * &inner) * &t;
    }
    Ok(change_basis_reflection(&r0, ev.basis, basis, incidence))
}

/// Block transfer matrix `[[A, B], [C, D]]` acting on (right-moving,
/// left-moving) amplitude pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub a: CMat,
    pub b: CMat,
    pub c: CMat,
    pub d: CMat,
}

impl TransferMatrix {
    pub fn identity() -> Self {
        TransferMatrix {
            a: CMat::identity(2),
            b: CMat::zeros(2),
            c: CMat::zeros(2),
            d: CMat::identity(2),
        }
    }

    pub fn mul(&self, o: &TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            a: &(&self.a * &o.a) + &(&self.b * &o.c),
            b: &(&self.a * &o.b) + &(&self.b * &o.d),
            c: &(&self.c * &o.a) + &(&self.d * &o.c),
            d: &(&self.c * &o.b) + &(&self.d * &o.d),
        }
    }

    pub fn max_abs_diff(&self, o: &TransferMatrix) -> f64 {
        self.a
            .max_abs_diff(&o.a)
            .max(self.b.max_abs_diff(&o.b))
            .max(self.c.max_abs_diff(&o.c))
            .max(self.d.max_abs_diff(&o.d))
    }

    /// Reflection and transmission `(R, T)` for a wave entering from the
    /// input side, read off from the condition that nothing enters from the
    /// output side.
    pub fn scattering(&self) -> Result<(CMat, CMat)> {
        let dinv = mat_inv(&self.d)?;
        let r = -&(&dinv * &self.c);
        let t = &self.a + &(&self.b * &r);
        Ok((r, t))
    }
}

/// Interface part of the transfer matrix across `j|j+1`, mapping amplitudes
/// at the interface on the `j` side to those on the `j+1` side.
fn interface_transfer(c: &CoeffPair) -> Result<TransferMatrix> {
    let tpinv = mat_inv(&c.t_rev)?;
    Ok(TransferMatrix {
        a: &c.t - &(&(&c.r_rev * &tpinv) * &c.r),
        b: &c.r_rev * &tpinv,
        c: -&(&tpinv * &c.r),
        d: tpinv,
    })
}

fn interface_transfer_inverse(c: &CoeffPair) -> Result<TransferMatrix> {
    let tinv = mat_inv(&c.t)?;
    Ok(TransferMatrix {
        a: tinv.clone(),
        b: -&(&tinv * &c.r_rev),
        c: &c.r * &tinv,
        d: &c.t_rev - &(&(&c.r * &tinv) * &c.r_rev),
    })
}

fn propagation(ev: &StackEval<'_>, j: usize, inverse: bool) -> Result<TransferMatrix> {
    if j == 0 {
        return Ok(TransferMatrix::identity());
    }
    let w = ev.stack.width(j);
    let k = &ev.kz[j].kz;
    let minus: Vec<Complex64> = k.iter().map(|x| -x * w).collect();
    let plus: Vec<Complex64> = k.iter().map(|x| x * w).collect();
    let (fwd, back) = if inverse { (plus, minus) } else { (minus, plus) };
    Ok(TransferMatrix {
        a: diag_exp_capped(&fwd, DEFAULT_EXPONENT_CAP)?,
        b: CMat::zeros(2),
        c: CMat::zeros(2),
        d: diag_exp_capped(&back, DEFAULT_EXPONENT_CAP)?,
    })
}

/// Transfer matrix `𝕄_{j+1|j}` in the working basis.
///
/// Amplitudes in region `j ≥ 1` are referenced at its left edge, region `0`
/// at `z_{0|1}`; the result maps them to region `j+1` amplitudes at
/// `z_{j|j+1}`. Includes the growing factor `e^{+k̂Δz_j}`, so it is meant for
/// moderate widths.
pub fn transfer_matrix(
    stack: &LayerStack,
    j: usize,
    xi: f64,
    kpar: f64,
    basis: Basis,
) -> Result<TransferMatrix> {
    if j > stack.n_interior() {
        return Err(Error::InvalidArgument(format!("no interface {j}|{}", j + 1)));
    }
    let ev = StackEval::new(stack, xi, kpar, basis)?;
    Ok(interface_transfer(&ev.iface[j])?.mul(&propagation(&ev, j, false)?))
}

/// `𝕄_{j|j+1}`, assembled independently from the reversed coefficients.
pub fn transfer_matrix_inverse(
    stack: &LayerStack,
    j: usize,
    xi: f64,
    kpar: f64,
    basis: Basis,
) -> Result<TransferMatrix> {
    if j > stack.n_interior() {
        return Err(Error::InvalidArgument(format!("no interface {j}|{}", j + 1)));
    }
    let ev = StackEval::new(stack, xi, kpar, basis)?;
    Ok(propagation(&ev, j, true)?.mul(&interface_transfer_inverse(&ev.iface[j])?))
}
