//! Material models and single-interface reflection/transmission matrices on
//! the imaginary frequency axis ω = iξ.
//!
//! Reciprocal media are handled in the TM/TE basis, where every interface
//! matrix is diagonal. The Weyl semimetal (node separation `b` along the
//! stacking axis) is handled in the helicity basis, where its vacuum
//! interface is diagonal. Coefficients are converted on request.
//!
//! Helicity ordering follows the convention in which the `+` mode occupies the
//! first slot for both propagation directions. Some references instead keep
//! the same circular polarization in the first slot for both directions; the
//! two conventions differ by a swap of the left-moving components.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cxmat::CMat;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Permittivity model evaluated at imaginary frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EpsModel {
    Constant { eps: f64 },
    Plasma { omega_p: f64 },
    Drude { omega_p: f64, gamma: f64 },
}

impl EpsModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            EpsModel::Constant { eps } => eps.is_finite() && eps >= 1.0,
            EpsModel::Plasma { omega_p } => omega_p.is_finite() && omega_p >= 0.0,
            EpsModel::Drude { omega_p, gamma } => {
                omega_p.is_finite() && omega_p >= 0.0 && gamma.is_finite() && gamma >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "permittivity parameters out of range: {self:?}"
            )))
        }
    }

    /// ε(iξ). Infinite at ξ = 0 for the metallic models.
    pub fn eps(&self, xi: f64) -> f64 {
        match *self {
            EpsModel::Constant { eps } => eps,
            EpsModel::Plasma { omega_p } => 1.0 + omega_p * omega_p / (xi * xi),
            EpsModel::Drude { omega_p, gamma } => 1.0 + omega_p * omega_p / (xi * (xi + gamma)),
        }
    }

    /// ε(iξ)·ξ², finite everywhere.
    pub fn eps_xi2(&self, xi: f64) -> f64 {
        match *self {
            EpsModel::Constant { eps } => eps * xi * xi,
            EpsModel::Plasma { omega_p } => xi * xi + omega_p * omega_p,
            EpsModel::Drude { omega_p, gamma } => {
                if xi == 0.0 {
                    if gamma == 0.0 {
                        omega_p * omega_p
                    } else {
                        0.0
                    }
                } else {
                    xi * xi + omega_p * omega_p * xi / (xi + gamma)
                }
            }
        }
    }

    /// Leading behaviour ε(iξ) ≈ c/ξ^p as ξ → 0, returned as (p, c).
    fn divergence(&self) -> (u32, f64) {
        match *self {
            EpsModel::Constant { eps } => (0, eps),
            EpsModel::Plasma { omega_p } if omega_p > 0.0 => (2, omega_p * omega_p),
            EpsModel::Drude { omega_p, gamma } if omega_p > 0.0 => {
                if gamma == 0.0 {
                    (2, omega_p * omega_p)
                } else {
                    (1, omega_p * omega_p / gamma)
                }
            }
            _ => (0, 1.0),
        }
    }
}

/// Material filling one region of a stack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "MaterialRepr", into = "MaterialRepr")]
pub enum Material {
    Vacuum,
    PerfectConductor,
    Dielectric { eps: EpsModel },
    Weyl { b: f64 },
}

// Unit variants of an internally tagged enum ignore stray fields; empty
// struct variants reject them.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum MaterialRepr {
    Vacuum {},
    PerfectConductor {},
    Dielectric { eps: EpsModel },
    Weyl { b: f64 },
}

impl From<MaterialRepr> for Material {
    fn from(m: MaterialRepr) -> Self {
        match m {
            MaterialRepr::Vacuum {} => Material::Vacuum,
            MaterialRepr::PerfectConductor {} => Material::PerfectConductor,
            MaterialRepr::Dielectric { eps } => Material::Dielectric { eps },
            MaterialRepr::Weyl { b } => Material::Weyl { b },
        }
    }
}

impl From<Material> for MaterialRepr {
    fn from(m: Material) -> Self {
        match m {
            Material::Vacuum => MaterialRepr::Vacuum {},
            Material::PerfectConductor => MaterialRepr::PerfectConductor {},
            Material::Dielectric { eps } => MaterialRepr::Dielectric { eps },
            Material::Weyl { b } => MaterialRepr::Weyl { b },
        }
    }
}

impl Material {
    pub fn validate(&self) -> Result<()> {
        match self {
            Material::Dielectric { eps } => eps.validate(),
            Material::Weyl { b } if !b.is_finite() => Err(Error::InvalidArgument(
                "Weyl node separation must be finite".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn is_perfect_conductor(&self) -> bool {
        matches!(self, Material::PerfectConductor)
    }

    pub fn is_weyl(&self) -> bool {
        matches!(self, Material::Weyl { .. })
    }

    /// True when reflection is symmetric under parity (everything but Weyl).
    pub fn is_reciprocal(&self) -> bool {
        !self.is_weyl()
    }

    fn eps_xi2(&self, xi: f64) -> f64 {
        match self {
            Material::Dielectric { eps } => eps.eps_xi2(xi),
            _ => xi * xi,
        }
    }

    fn divergence(&self) -> (u32, f64) {
        match self {
            Material::Dielectric { eps } => eps.divergence(),
            _ => (0, 1.0),
        }
    }
}

/// Polarization basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    #[serde(rename = "tmte")]
    TmTe,
    Helicity,
}

impl Basis {
    /// Parity matrix relating the two imaginary-axis continuations.
    pub fn parity_matrix(&self) -> CMat {
        match self {
            Basis::TmTe => CMat::identity(2),
            Basis::Helicity => CMat::new2(ZERO, ONE, ONE, ZERO),
        }
    }
}

/// Which side the incident wave of a [`CoeffPair`] comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Incidence {
    /// `r`, `t` act on right-moving waves arriving from the left.
    FromLeft,
    /// `r`, `t` act on left-moving waves arriving from the right.
    FromRight,
}

impl Incidence {
    pub fn reversed(self) -> Self {
        match self {
            Incidence::FromLeft => Incidence::FromRight,
            Incidence::FromRight => Incidence::FromLeft,
        }
    }
}

/// Imaginary-axis longitudinal wavenumbers k̂_z per polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveNumbers {
    pub kz: [Complex64; 2],
}

impl WaveNumbers {
    pub fn matrix(&self) -> CMat {
        CMat::from_diag(&self.kz)
    }
}

/// Reflection and transmission for both directions across an interface or a
/// stack segment, together with the basis they are expressed in.
///
/// For `Incidence::FromLeft` across `left|right`: `r` reflects a right-moving
/// wave back into `left`, `t` carries it into `right`, and `r_rev`, `t_rev`
/// are the same for a wave arriving from `right`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffPair {
    pub r: CMat,
    pub t: CMat,
    pub r_rev: CMat,
    pub t_rev: CMat,
    pub basis: Basis,
    pub incidence: Incidence,
}

impl CoeffPair {
    pub fn transparent(basis: Basis, incidence: Incidence) -> Self {
        CoeffPair {
            r: CMat::zeros(2),
            t: CMat::identity(2),
            r_rev: CMat::zeros(2),
            t_rev: CMat::identity(2),
            basis,
            incidence,
        }
    }

    /// Same physical coefficients viewed from the other side.
    pub fn reversed(&self) -> Self {
        CoeffPair {
            r: self.r_rev.clone(),
            t: self.t_rev.clone(),
            r_rev: self.r.clone(),
            t_rev: self.t.clone(),
            basis: self.basis,
            incidence: self.incidence.reversed(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.r.is_finite() && self.t.is_finite() && self.r_rev.is_finite() && self.t_rev.is_finite()
    }
}

/// Imaginary-axis wavenumbers of `m` at (ξ, k∥).
///
/// A perfect conductor admits no field and reports infinite wavenumbers.
pub fn wavenumbers(m: &Material, xi: f64, kpar: f64) -> Result<WaveNumbers> {
    check_point(xi, kpar)?;
    let kz = match *m {
        Material::Vacuum => {
            let k = kpar.hypot(xi);
            [re(k), re(k)]
        }
        Material::Dielectric { eps } => {
            let k = (kpar * kpar + eps.eps_xi2(xi)).sqrt();
            [re(k), re(k)]
        }
        Material::PerfectConductor => [re(f64::INFINITY), re(f64::INFINITY)],
        Material::Weyl { b } => weyl_wavenumbers(b, kpar.hypot(xi)),
    };
    Ok(WaveNumbers { kz })
}

fn check_point(xi: f64, kpar: f64) -> Result<()> {
    if !(xi >= 0.0 && kpar >= 0.0 && xi.is_finite() && kpar.is_finite()) {
        return Err(Error::Domain(format!(
            "spectral point (ξ={xi}, k∥={kpar}) must be finite and non-negative"
        )));
    }
    if xi == 0.0 && kpar == 0.0 {
        return Err(Error::Domain("spectral origin ξ = k∥ = 0 is excluded".into()));
    }
    Ok(())
}

/// k̂_{z±} = √(κ̂(κ̂ ∓ ib)), principal branch.
fn weyl_wavenumbers(b: f64, kappa: f64) -> [Complex64; 2] {
    if b == 0.0 {
        return [re(kappa), re(kappa)];
    }
    let plus = (re(kappa) * Complex64::new(kappa, -b)).sqrt();
    [plus, plus.conj()]
}

/// TM/TE reflection and transmission for incidence from medium `a` into `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelScalars {
    pub r_tm: Complex64,
    pub r_te: Complex64,
    pub t_tm: Complex64,
    pub t_te: Complex64,
    /// Transmission for incidence from `b` into `a`.
    pub t_rev_tm: Complex64,
    pub t_rev_te: Complex64,
}

/// Fresnel amplitudes in terms of permittivities and longitudinal wavenumbers.
///
/// Valid for complex arguments, so the same kernel serves real frequencies
/// (`kz = √(εω² − k∥²)`) and the imaginary axis (pass k̂ directly; the
/// expressions are homogeneous of degree zero in the wavenumbers).
pub fn dielectric_kernel(
    eps_a: Complex64,
    eps_b: Complex64,
    kz_a: Complex64,
    kz_b: Complex64,
) -> FresnelScalars {
    let den_tm = eps_b * kz_a + eps_a * kz_b;
    let den_te = kz_a + kz_b;
    let root = (eps_a * eps_b).sqrt();
    FresnelScalars {
        r_tm: (eps_b * kz_a - eps_a * kz_b) / den_tm,
        r_te: (kz_a - kz_b) / den_te,
        t_tm: 2.0 * root * kz_a / den_tm,
        t_te: 2.0 * kz_a / den_te,
        t_rev_tm: 2.0 * root * kz_b / den_tm,
        t_rev_te: 2.0 * kz_b / den_te,
    }
}

/// Weyl polarization normalization N_λ = √((κ⁴ + ω²κ² + k∥²k_λ²)/2), principal branch.
pub fn weyl_norm(omega: Complex64, kappa: Complex64, kz: Complex64, kpar: f64) -> Complex64 {
    let k2 = re(kpar * kpar);
    ((kappa.powi(4) + omega * omega * kappa * kappa + k2 * kz * kz) / 2.0).sqrt()
}

/// Vacuum→Weyl coefficients for one helicity mode, returned as (R, T, T′).
///
/// `kappa` is the vacuum longitudinal wavenumber, `kz` the Weyl one, `norm`
/// the mode normalization. Reflection from the Weyl side is −R.
pub fn weyl_kernel(
    omega: Complex64,
    kappa: Complex64,
    kz: Complex64,
    norm: Complex64,
) -> (Complex64, Complex64, Complex64) {
    let s = kz + kappa;
    ((kz - kappa) / s, 2.0 * norm / (omega * s), 2.0 * omega * kz * kappa / (norm * s))
}

enum Ratio {
    Finite(f64),
    Zero,
    Infinite,
}

/// ε_b/ε_a at imaginary frequency, resolving the ξ → 0 divergences.
fn eps_ratio(a: &Material, b: &Material, xi: f64) -> Ratio {
    let x2 = xi * xi;
    if x2 >= f64::MIN_POSITIVE {
        return Ratio::Finite(b.eps_xi2(xi) / a.eps_xi2(xi));
    }
    let (pa, ca) = a.divergence();
    let (pb, cb) = b.divergence();
    match pa.cmp(&pb) {
        std::cmp::Ordering::Less => Ratio::Infinite,
        std::cmp::Ordering::Greater => Ratio::Zero,
        std::cmp::Ordering::Equal => Ratio::Finite(cb / ca),
    }
}

fn dielectric_pair(
    left: &Material,
    right: &Material,
    xi: f64,
    kpar: f64,
) -> Result<CoeffPair> {
    let ka = wavenumbers(left, xi, kpar)?.kz[0];
    let kb = wavenumbers(right, xi, kpar)?.kz[0];
    let te = dielectric_kernel(ONE, ONE, ka, kb);
    let (r_tm, t_tm, t_rev_tm) = match eps_ratio(left, right, xi) {
        Ratio::Finite(rho) => {
            let s = dielectric_kernel(ONE, re(rho), ka, kb);
            (s.r_tm, s.t_tm, s.t_rev_tm)
        }
        Ratio::Infinite => (ONE, ZERO, ZERO),
        Ratio::Zero => (-ONE, ZERO, ZERO),
    };
    Ok(CoeffPair {
        r: CMat::from_diag(&[r_tm, te.r_te]),
        t: CMat::from_diag(&[t_tm, te.t_te]),
        r_rev: CMat::from_diag(&[-r_tm, -te.r_te]),
        t_rev: CMat::from_diag(&[t_rev_tm, te.t_rev_te]),
        basis: Basis::TmTe,
        incidence: Incidence::FromLeft,
    })
}

/// Vacuum/Weyl interface in the helicity basis; `weyl_on_right` picks the
/// orientation. Returns coefficients for incidence from the left.
fn weyl_pair(b: f64, weyl_on_right: bool, xi: f64, kpar: f64) -> Result<CoeffPair> {
    let kappa = kpar.hypot(xi);
    let kz = weyl_wavenumbers(b, kappa);
    let mut r = [ZERO; 2];
    let mut t = [ZERO; 2];
    let mut tp = [ZERO; 2];
    for l in 0..2 {
        r[l] = (kz[l] - kappa) / (kz[l] + kappa);
        if xi == 0.0 {
            // The normalization is singular at ξ = 0; only the product
            // T·T′ = 1 − R² is physical, so split it symmetrically.
            let s = 2.0 * (kz[l] * kappa).sqrt() / (kz[l] + kappa);
            t[l] = s;
            tp[l] = s;
        } else {
            let omega = Complex64::new(0.0, xi);
            let kap = Complex64::new(0.0, kappa);
            let k = Complex64::i() * kz[l];
            let norm = -weyl_norm(omega, kap, k, kpar);
            let (_, tt, ttp) = weyl_kernel(omega, kap, k, norm);
            t[l] = tt;
            tp[l] = ttp;
        }
    }
    let vac_side = CMat::from_diag(&r);
    let weyl_side = -&vac_side;
    let into_weyl = CMat::from_diag(&t);
    let out_of_weyl = CMat::from_diag(&tp);
    let (r, t, r_rev, t_rev) = if weyl_on_right {
        (vac_side, into_weyl, weyl_side, out_of_weyl)
    } else {
        (weyl_side, out_of_weyl, vac_side, into_weyl)
    };
    Ok(CoeffPair {
        r,
        t,
        r_rev,
        t_rev,
        basis: Basis::Helicity,
        incidence: Incidence::FromLeft,
    })
}

fn conductor_pair(basis: Basis) -> CoeffPair {
    let r = match basis {
        Basis::TmTe => CMat::from_diag(&[ONE, -ONE]),
        Basis::Helicity => CMat::identity(2),
    };
    CoeffPair {
        r: r.clone(),
        t: CMat::zeros(2),
        r_rev: r,
        t_rev: CMat::zeros(2),
        basis,
        incidence: Incidence::FromLeft,
    }
}

/// Basis in which the `left|right` interface is diagonal.
pub fn native_basis(left: &Material, right: &Material) -> Basis {
    if left.is_weyl() || right.is_weyl() {
        Basis::Helicity
    } else {
        Basis::TmTe
    }
}

/// Interface coefficients for incidence from `left` into `right`.
pub fn interface_coeffs(
    left: &Material,
    right: &Material,
    xi: f64,
    kpar: f64,
    basis: Basis,
) -> Result<CoeffPair> {
    check_point(xi, kpar)?;
    left.validate()?;
    right.validate()?;
    use Material::*;
    let native = match (left, right) {
        (PerfectConductor, PerfectConductor) => {
            return Err(Error::UnsupportedPairing(
                "two perfect conductors cannot share an interface".into(),
            ))
        }
        _ if left == right => return Ok(CoeffPair::transparent(basis, Incidence::FromLeft)),
        (PerfectConductor, _) | (_, PerfectConductor) => {
            if left.is_weyl() || right.is_weyl() {
                return Err(Error::UnsupportedPairing(
                    "Weyl semimetal is only supported against vacuum".into(),
                ));
            }
            return Ok(conductor_pair(basis));
        }
        (Vacuum, Weyl { b }) => weyl_pair(*b, true, xi, kpar)?,
        (Weyl { b }, Vacuum) => weyl_pair(*b, false, xi, kpar)?,
        (Weyl { .. }, _) | (_, Weyl { .. }) => {
            return Err(Error::UnsupportedPairing(format!(
                "Weyl semimetal is only supported against vacuum, got {left:?} | {right:?}"
            )))
        }
        _ => dielectric_pair(left, right, xi, kpar)?,
    };
    Ok(change_basis(&native, basis))
}

#[derive(Clone, Copy)]
enum Dir {
    Right,
    Left,
}

fn io(c: &CoeffPair) -> [(Dir, Dir); 4] {
    // (input direction, output direction) for r, t, r_rev, t_rev
    match c.incidence {
        Incidence::FromLeft => [
            (Dir::Right, Dir::Left),
            (Dir::Right, Dir::Right),
            (Dir::Left, Dir::Right),
            (Dir::Left, Dir::Left),
        ],
        Incidence::FromRight => [
            (Dir::Left, Dir::Right),
            (Dir::Left, Dir::Left),
            (Dir::Right, Dir::Left),
            (Dir::Right, Dir::Right),
        ],
    }
}

/// Maps TM/TE amplitudes to helicity amplitudes for waves moving in `d`.
fn to_helicity(d: Dir) -> CMat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ph = match d {
        Dir::Right => -Complex64::i(),
        Dir::Left => Complex64::i(),
    };
    CMat::new2(re(h), re(h) * ph, re(h), -re(h) * ph)
}

fn from_helicity(d: Dir) -> CMat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ph = match d {
        Dir::Right => Complex64::i(),
        Dir::Left => -Complex64::i(),
    };
    CMat::new2(re(h), re(h), re(h) * ph, -re(h) * ph)
}

/// Re-expresses a single matrix acting from direction `din` to `dout`.
fn convert(m: &CMat, din: Dir, dout: Dir, target: Basis) -> CMat {
    match target {
        Basis::Helicity => &(&to_helicity(dout) * m) * &from_helicity(din),
        Basis::TmTe => &(&from_helicity(dout) * m) * &to_helicity(din),
    }
}

/// Re-expresses all four matrices of `c` in `target`.
pub fn change_basis(c: &CoeffPair, target: Basis) -> CoeffPair {
    if c.basis == target {
        return c.clone();
    }
    let [ir, it, irr, itr] = io(c);
    CoeffPair {
        r: convert(&c.r, ir.0, ir.1, target),
        t: convert(&c.t, it.0, it.1, target),
        r_rev: convert(&c.r_rev, irr.0, irr.1, target),
        t_rev: convert(&c.t_rev, itr.0, itr.1, target),
        basis: target,
        incidence: c.incidence,
    }
}

/// Re-expresses a bare reflection matrix acting on waves incident from the
/// given side.
pub fn change_basis_reflection(r: &CMat, from: Basis, to: Basis, incidence: Incidence) -> CMat {
    if from == to {
        return r.clone();
    }
    let (din, dout) = match incidence {
        Incidence::FromLeft => (Dir::Right, Dir::Left),
        Incidence::FromRight => (Dir::Left, Dir::Right),
    };
    convert(r, din, dout, to)
}

/// Largest violation of the contractibility relations of an interface,
/// relative to the largest entry entering them (floored at one).
///
/// Fails when the forward transmission is not invertible (conductors).
pub fn contractibility_residual(c: &CoeffPair) -> Result<f64> {
    let tinv = c.t.inv()?;
    let rtr = &(&c.r * &tinv) * &c.r_rev;
    let lhs1 = tinv.clone();
    let rhs1 = &c.t_rev - &rtr;
    let lhs2 = &c.r * &tinv;
    let rhs2 = -&(&tinv * &c.r_rev);
    let scale = 1f64
        .max(tinv.max_abs())
        .max(rtr.max_abs())
        .max(c.t_rev.max_abs())
        .max(lhs2.max_abs());
    Ok(lhs1.max_abs_diff(&rhs1).max(lhs2.max_abs_diff(&rhs2)) / scale)
}
