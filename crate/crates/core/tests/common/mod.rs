//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use casimir_core::cxmat::{mat_inv, CMat};
use casimir_core::materials::{dielectric_kernel, Basis, CoeffPair, EpsModel, Incidence, Material};
use casimir_core::stack::{transfer_matrix, LayerStack};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn det2(m: &CMat) -> C {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

pub fn random_dielectric(r: &mut ChaCha8Rng) -> Material {
    let eps = match r.gen_range(0..3) {
        0 => EpsModel::Constant { eps: r.gen_range(1.5..10.0) },
        1 => EpsModel::Plasma { omega_p: r.gen_range(0.5..5.0) },
        _ => EpsModel::Drude {
            omega_p: r.gen_range(0.5..5.0),
            gamma: r.gen_range(0.01..1.0),
        },
    };
    Material::Dielectric { eps }
}

/// Interior layer list with vacuum next to every Weyl layer.
pub fn random_layers(r: &mut ChaCha8Rng, n: usize, weyl: bool, widths: (f64, f64)) -> Vec<(Material, f64)> {
    let mut out: Vec<(Material, f64)> = Vec::new();
    while out.len() < n {
        let w = r.gen_range(widths.0..widths.1);
        let pick = r.gen_range(0..if weyl { 4 } else { 3 });
        let m = match pick {
            0 => Material::Vacuum,
            3 => Material::Weyl { b: r.gen_range(-2.0..2.0) },
            _ => random_dielectric(r),
        };
        if m.is_weyl() {
            if out.len() + 3 > n {
                out.push((Material::Vacuum, w));
                continue;
            }
            if !matches!(out.last(), None | Some((Material::Vacuum, _))) {
                out.push((Material::Vacuum, r.gen_range(widths.0..widths.1)));
            }
            out.push((m, w));
            out.push((Material::Vacuum, r.gen_range(widths.0..widths.1)));
        } else {
            out.push((m, w));
        }
    }
    out.truncate(n);
    out
}

/// Stack between conductors with `n` interior layers; Weyl layers (if
/// allowed) are always wrapped in vacuum.
pub fn random_pc_stack(r: &mut ChaCha8Rng, n: usize, weyl: bool) -> LayerStack {
    loop {
        let layers = random_layers(r, n, weyl, (0.2, 1.5));
        if let Ok(s) = LayerStack::from_layers(Material::PerfectConductor, &layers, Material::PerfectConductor) {
            return s;
        }
    }
}

/// Stack with vacuum or dielectric boundaries (invertible transmissions).
pub fn random_open_stack(r: &mut ChaCha8Rng, n: usize, weyl: bool) -> LayerStack {
    loop {
        let layers = random_layers(r, n, weyl, (0.1, 1.0));
        let left = if r.gen_bool(0.5) { Material::Vacuum } else { random_dielectric(r) };
        let right = if r.gen_bool(0.5) { Material::Vacuum } else { random_dielectric(r) };
        if let Ok(s) = LayerStack::from_layers(left, &layers, right) {
            return s;
        }
    }
}

pub fn random_point(r: &mut ChaCha8Rng) -> (f64, f64) {
    (r.gen_range(0.01..3.0), r.gen_range(0.0..3.0))
}

// ---------------------------------------------------------------------------
// Boundary-condition oracle: plane waves on both sides of z = 0, continuity of
// the tangential E and B, solved as a dense linear system.

/// A plane-wave mode: longitudinal wavenumber, electric polarization and
/// magnetic field.
#[derive(Clone, Copy, Debug)]
pub struct Mode {
    pub kz: C,
    pub e: [C; 3],
    pub b: [C; 3],
}

impl Mode {
    /// B from Faraday's law, `B = k × E / ω` with `k = (kx, 0, kz)`.
    pub fn new(kz: C, e: [C; 3], omega: C, kx: C) -> Mode {
        let [ex, ey, ez] = e;
        let b = [-kz * ey / omega, (kz * ex - kx * ez) / omega, kx * ey / omega];
        Mode { kz, e, b }
    }
}

/// Right- and left-moving modes of one medium, two of each, in slot order.
#[derive(Clone, Copy, Debug)]
pub struct Medium {
    pub right: [Mode; 2],
    pub left: [Mode; 2],
}

fn tangential(m: &Mode) -> [C; 4] {
    [m.e[0], m.e[1], m.b[0], m.b[1]]
}

/// Dielectric modes in the TM/TE basis (slot 0 = TM). `kz` is the forward
/// longitudinal wavenumber, `n` the refractive index.
pub fn dielectric_tmte(n: C, omega: C, kx: C, kz: C) -> Medium {
    let nw = n * omega;
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let tm_r = [kz / nw, zero, -kx / nw];
    let tm_l = [-kz / nw, zero, -kx / nw];
    let te = [zero, one, zero];
    // k × E / ω for TM reduces to n ŷ once kx² + kz² = n²ω² is used; writing
    // it out avoids the cancellation when kx ≫ |nω|
    let tm_b = [zero, n, zero];
    Medium {
        right: [Mode { kz, e: tm_r, b: tm_b }, Mode::new(kz, te, omega, kx)],
        left: [Mode { kz: -kz, e: tm_l, b: tm_b }, Mode::new(-kz, te, omega, kx)],
    }
}

/// Circular modes built from the TM/TE ones: right movers `(TM ± iTE)/√2`,
/// left movers `(TM ∓ iTE)/√2`, so slot 0 is the `+` mode both ways.
pub fn dielectric_helicity(n: C, omega: C, kx: C, kz: C) -> Medium {
    let m = dielectric_tmte(n, omega, kx, kz);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mix3 = |a: [C; 3], b: [C; 3], s: C| [0, 1, 2].map(|i| (a[i] + s * b[i]) * h);
    let mix = |a: Mode, b: Mode, s: C| Mode { kz: a.kz, e: mix3(a.e, b.e, s), b: mix3(a.b, b.b, s) };
    let i = c(0.0, 1.0);
    Medium {
        right: [mix(m.right[0], m.right[1], i), mix(m.right[0], m.right[1], -i)],
        left: [mix(m.left[0], m.left[1], -i), mix(m.left[0], m.left[1], i)],
    }
}

/// Weyl semimetal modes at real frequency, `+` in slot 0, with
/// `k_±² = κ(κ ± b)` and polarization `(κ², ±iωκ, −k_x k_±)` (right movers),
/// `(−κ², ∓iωκ, −k_x k_±)` (left movers), each normalized to unit length.
pub fn weyl_real(b: f64, omega: f64, kx: f64) -> Medium {
    let kappa = (omega * omega - kx * kx).sqrt();
    let zero = [c(0.0, 0.0); 3];
    let mut right = [Mode { kz: c(0.0, 0.0), e: zero, b: zero }; 2];
    let mut left = right;
    for (slot, s) in [(0usize, 1.0), (1, -1.0)] {
        let k = (kappa * (kappa + s * b)).sqrt();
        let v = [kappa * kappa, s * omega * kappa, -kx * k];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let (w, kx) = (c(omega, 0.0), c(kx, 0.0));
        right[slot] = Mode::new(c(k, 0.0), [c(v[0] / norm, 0.0), c(0.0, v[1] / norm), c(v[2] / norm, 0.0)], w, kx);
        left[slot] = Mode::new(c(-k, 0.0), [c(-v[0] / norm, 0.0), c(0.0, -v[1] / norm), c(v[2] / norm, 0.0)], w, kx);
    }
    Medium { right, left }
}

/// Unit norm of the Weyl polarization vector before normalization, i.e. the
/// `N` that makes `(κ², ±iωκ, −k_x k)/(√2N)` a unit vector.
pub fn weyl_real_norm(omega: f64, kappa: f64, k: f64, kx: f64) -> f64 {
    ((kappa.powi(4) + omega * omega * kappa * kappa + kx * kx * k * k) / 2.0).sqrt()
}

/// Reflection and transmission matrices at the interface `left | right`
/// for incidence from the left (`from_left`) or from the right.
pub fn solve_interface(left: &Medium, right: &Medium, from_left: bool) -> (CMat, CMat) {
    let (incident, reflected, transmitted) = if from_left {
        (left.right, left.left, right.right)
    } else {
        (right.left, right.right, left.left)
    };
    // incident + Σ r·reflected = Σ t·transmitted on either side
    let mut a = CMat::zeros(4);
    for q in 0..2 {
        let rv = tangential(&reflected[q]);
        let tv = tangential(&transmitted[q]);
        for row in 0..4 {
            a[(row, q)] = rv[row];
            a[(row, 2 + q)] = -tv[row];
        }
    }
    // equilibrate rows: the field components can differ by orders of
    // magnitude when k∥ ≫ ξ
    let mut row_scale = [0.0; 4];
    for (row, s) in row_scale.iter_mut().enumerate() {
        *s = (0..4).map(|col| a[(row, col)].norm()).fold(0.0, f64::max).recip();
        for col in 0..4 {
            a[(row, col)] *= *s;
        }
    }
    let ainv = mat_inv(&a).expect("boundary system is regular");
    let mut r = CMat::zeros(2);
    let mut t = CMat::zeros(2);
    for p in 0..2 {
        let iv = tangential(&incident[p]);
        let rhs: Vec<C> = iv.iter().zip(row_scale).map(|(x, s)| -x * s).collect();
        let mut sol = [c(0.0, 0.0); 4];
        for (row, s) in sol.iter_mut().enumerate() {
            for (col, b) in rhs.iter().enumerate() {
                *s += ainv[(row, col)] * b;
            }
        }
        r[(0, p)] = sol[0];
        r[(1, p)] = sol[1];
        t[(0, p)] = sol[2];
        t[(1, p)] = sol[3];
    }
    (r, t)
}

/// Largest deviation of `p` from the boundary-condition solution, relative
/// to the largest oracle entry (floored at one).
pub fn oracle_residual(p: &CoeffPair, left: &Medium, right: &Medium) -> f64 {
    let (r, t) = solve_interface(left, right, true);
    let (rr, tr) = solve_interface(left, right, false);
    [(&p.r, &r), (&p.t, &t), (&p.r_rev, &rr), (&p.t_rev, &tr)]
        .iter()
        .map(|(got, want)| got.max_abs_diff(want) / 1f64.max(want.max_abs()))
        .fold(0.0, f64::max)
}

/// Library closed form for a dielectric interface at arbitrary complex
/// permittivities and longitudinal wavenumbers (TM/TE, from the left).
pub fn dielectric_pair(eps1: C, eps2: C, k1: C, k2: C) -> CoeffPair {
    let f = dielectric_kernel(eps1, eps2, k1, k2);
    CoeffPair {
        r: CMat::from_diag(&[f.r_tm, f.r_te]),
        t: CMat::from_diag(&[f.t_tm, f.t_te]),
        r_rev: CMat::from_diag(&[-f.r_tm, -f.r_te]),
        t_rev: CMat::from_diag(&[f.t_rev_tm, f.t_rev_te]),
        basis: Basis::TmTe,
        incidence: Incidence::FromLeft,
    }
}

/// Largest entrywise difference of two coefficient sets, relative to the
/// largest entry of `a` (floored at one).
pub fn pair_diff(a: &CoeffPair, b: &CoeffPair) -> f64 {
    let scale = 1f64.max(a.r.max_abs()).max(a.t.max_abs()).max(a.r_rev.max_abs()).max(a.t_rev.max_abs());
    a.r.max_abs_diff(&b.r)
        .max(a.t.max_abs_diff(&b.t))
        .max(a.r_rev.max_abs_diff(&b.r_rev))
        .max(a.t_rev.max_abs_diff(&b.t_rev))
        / scale
}

// ---------------------------------------------------------------------------
// Transfer-matrix oracle for reflections, independent of the fold.

/// `R^{(0|m)}` read off the product `𝕄_{m|m−1}⋯𝕄_{1|0}` (amplitudes of
/// region `m` at its left edge) from the condition that nothing enters from
/// region 0.
pub fn left_reflection_via_transfer(stack: &LayerStack, m: usize, xi: f64, kpar: f64, basis: Basis) -> CMat {
    let mut q = transfer_matrix(stack, 0, xi, kpar, basis).unwrap();
    for j in 1..m {
        q = transfer_matrix(stack, j, xi, kpar, basis).unwrap().mul(&q);
    }
    &q.b * &mat_inv(&q.d).unwrap()
}

/// `E_m R^{(m+1|m)} E_m`, the interface reflection seen from the left edge
/// of region `m`, read off `𝕄_{m+1|m}` alone.
pub fn right_interface_reflection_via_transfer(stack: &LayerStack, m: usize, xi: f64, kpar: f64, basis: Basis) -> CMat {
    let q = transfer_matrix(stack, m, xi, kpar, basis).unwrap();
    -&(&mat_inv(&q.d).unwrap() * &q.c)
}

/// The chain `f^{(0|1|2)} f^{(0|2|3)} ⋯ f^{(0|N|N+1)}` from transfer matrices.
pub fn chain_product(stack: &LayerStack, xi: f64, kpar: f64, basis: Basis) -> C {
    let mut p = c(1.0, 0.0);
    for m in 1..stack.last() {
        let r0 = left_reflection_via_transfer(stack, m, xi, kpar, basis);
        let rr = right_interface_reflection_via_transfer(stack, m, xi, kpar, basis);
        p *= det2(&(&CMat::identity(2) - &(&rr * &r0)));
    }
    p
}

/// Vacuum-side reflection of a dielectric slab of thickness `d` (TM, TE),
/// summed as a geometric series of internal reflections.
pub fn slab_reflection(eps: f64, d: f64, xi: f64, k: f64) -> [f64; 2] {
    let k0 = xi.hypot(k);
    let k2 = (k * k + eps * xi * xi).sqrt();
    let r_tm = (eps * k0 - k2) / (eps * k0 + k2);
    let r_te = (k0 - k2) / (k0 + k2);
    let x = (-2.0 * k2 * d).exp();
    [r_tm, r_te].map(|r| r * (1.0 - x) / (1.0 - r * r * x))
}

/// Riemann ζ(3).
pub const ZETA3: f64 = 1.202_056_903_159_594_2;
