//! Independent references and the verification suite.
//!
//! Nothing here calls the kernel engine of [`crate::wigner`] to produce a
//! reference value: the direct oracle interpolates the sampled states with the
//! periodic Dirichlet kernel and sums the printed integrals on its own
//! half-offset nodes; the star-product oracle evaluates the printed 4×4
//! quadratic forms literally.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, Grid1D, Grid2D, Representation};
use crate::group::{group_multiply, uir_apply, uir_apply_ft, GroupElement, ShiftMode};
use crate::orbit::{
    make_orbit_label, nc_jacobian, nc_params_from_label, nc_to_orbit, CoadjointPoint,
    DimensionalConstants, NCCoords, NCParams, OrbitLabel, Sector,
};
use crate::report::VerificationReport;
use crate::starprod::{
    marginal_momentum, marginal_position, marginal_prefactor, momentum_marginal_canonical,
    position_marginal_canonical, star_b, star_general, star_hbar, star_vartheta, Kernel4,
};
use crate::wigner::{
    cross_wigner_standard, qm_convention_map, qm_limit_check, to_momentum, wigner_nc,
    wigner_nc_position, wigner_orbit, wigner_qm_orbit, Chart, Method, Probes, RankOneOperator,
    WignerField,
};

// ---------------------------------------------------------------------------
// test states

/// Normalized Hermite function `h_n(x) = (2^n n! √π)^{-1/2} H_n(x) e^{-x²/2}`,
/// by the stable three-term recurrence.
pub fn hermite_function(n: u32, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let k = k as f64;
        let next = (2.0 / (k + 1.0)).sqrt() * x * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `Π_i w_i^{-1/2} h_{n_i}((x_i − q0_i)/w_i) · e^{i p0·x}` with
/// `center = (q0_1, q0_2, p0_1, p0_2)`; unit L² norm analytically.
/// The field is tagged as a position state.
pub fn gaussian_state(
    grid: Grid2D,
    widths: [f64; 2],
    center: [f64; 4],
    hermite: [u32; 2],
) -> Result<ComplexField2D> {
    if !widths.iter().all(|w| *w > 0.0 && w.is_finite()) {
        return Err(Error::InvalidGrid(format!("widths must be positive, got {widths:?}")));
    }
    if !center.iter().all(|c| c.is_finite()) {
        return Err(Error::NonFinite("state centre"));
    }
    let [w0, w1] = widths;
    let norm = 1.0 / (w0 * w1).sqrt();
    Ok(ComplexField2D::from_fn(grid, Representation::Position, |x, y| {
        let amp = hermite_function(hermite[0], (x - center[0]) / w0)
            * hermite_function(hermite[1], (y - center[1]) / w1)
            * norm;
        Complex64::from_polar(amp, center[2] * x + center[3] * y)
    }))
}

/// A seeded normalized combination `Σ c_{mn} h_m(x) h_n(y)` over `m + n ≤ 2`
/// with complex coefficients and a small random displacement.
pub fn random_state(grid: Grid2D, rng: &mut impl Rng, rep: Representation) -> ComplexField2D {
    let mut terms = Vec::new();
    for m in 0..=2u32 {
        for n in 0..=(2 - m) {
            terms.push((m, n, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
        }
    }
    let shift = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
    let scale = terms.iter().map(|t| t.2.norm_sqr()).sum::<f64>().sqrt();
    let mut f = ComplexField2D::from_fn(grid, rep, |x, y| {
        let (x, y) = (x - shift[0], y - shift[1]);
        terms
            .iter()
            .map(|&(m, n, c)| c * hermite_function(m, x) * hermite_function(n, y))
            .sum::<Complex64>()
            / scale
    });
    f.representation = rep;
    f
}

/// Independent ket and bra from [`random_state`].
pub fn random_operator(grid: Grid2D, rng: &mut impl Rng, rep: Representation) -> RankOneOperator {
    let ket = random_state(grid, rng, rep);
    let bra = random_state(grid, rng, rep);
    RankOneOperator { ket, bra }
}

// ---------------------------------------------------------------------------
// direct oracle

/// Periodic band-limited interpolation weights at `x` for an even-length axis:
/// `D(τ) = sin(πτ) / (N tan(πτ/N))`, `τ = (x − x_j)/h`. Points outside the
/// sampled interval get no weights.
fn dirichlet_weights(ax: &Grid1D, x: f64) -> Option<Vec<f64>> {
    let last = ax.coord(ax.n - 1);
    if x < ax.origin - 1e-12 * ax.step || x > last + 1e-12 * ax.step {
        return None;
    }
    let n = ax.n as f64;
    Some(
        (0..ax.n)
            .map(|j| {
                let t = (x - ax.coord(j)) / ax.step;
                let r = t - (t / n).round() * n;
                if r.abs() < 1e-13 {
                    1.0
                } else if ax.n % 2 == 0 {
                    (PI * r).sin() / (n * (PI * r / n).tan())
                } else {
                    (PI * r).sin() / (n * (PI * r / n).sin())
                }
            })
            .collect(),
    )
}

/// `f` at the tensor points `(xs[a], ys[b])`, row `a` fastest; zero off the grid.
fn interpolate_tensor(f: &ComplexField2D, xs: &[f64], ys: &[f64]) -> Vec<Complex64> {
    let g = f.grid();
    let (n0, n1) = (g.axis0.n, g.axis1.n);
    let wx: Vec<Option<Vec<f64>>> = xs.iter().map(|&x| dirichlet_weights(&g.axis0, x)).collect();
    let wy: Vec<Option<Vec<f64>>> = ys.iter().map(|&y| dirichlet_weights(&g.axis1, y)).collect();
    // axis 0 first: t[a][k1]
    let vals = f.values();
    let t: Vec<Vec<Complex64>> = wx
        .iter()
        .map(|w| match w {
            None => Vec::new(),
            Some(w) => (0..n1)
                .map(|k1| {
                    let row = &vals[n0 * k1..n0 * (k1 + 1)];
                    row.iter().zip(w).map(|(v, c)| v * c).sum()
                })
                .collect(),
        })
        .collect();
    let mut out = vec![Complex64::default(); xs.len() * ys.len()];
    for (b, w) in wy.iter().enumerate() {
        let Some(w) = w else { continue };
        for (a, row) in t.iter().enumerate() {
            if row.is_empty() {
                continue;
            }
            out[a + xs.len() * b] = row.iter().zip(w).map(|(v, c)| v * c).sum();
        }
    }
    out
}

/// Half-offset nodes `u_m = (m + 1/2) h` with `c ± u` inside the sampled interval.
fn half_nodes(ax: &Grid1D, c: f64, h: f64) -> Vec<f64> {
    let (lo, hi) = (ax.origin, ax.coord(ax.n - 1));
    let reach = (hi - c).min(c - lo);
    if reach < 0.0 {
        return Vec::new();
    }
    let m = (reach / h - 0.5).floor() as i64;
    (-m - 1..=m).map(|k| (k as f64 + 0.5) * h).collect()
}

/// `pref ∫ e^{i a·s} conj λ(s/2 + c) χ(−s/2 + c) ds` by the midpoint rule in
/// `u = s/2` with step `h / 2^refine`.
fn oracle_integral(op: &RankOneOperator, a: [f64; 2], c: [f64; 2], pref: f64, refine: u32) -> Complex64 {
    let g = op.grid();
    let f = 0.5f64.powi(refine as i32);
    let u0 = half_nodes(&g.axis0, c[0], g.axis0.step * f);
    let u1 = half_nodes(&g.axis1, c[1], g.axis1.step * f);
    if u0.is_empty() || u1.is_empty() {
        return Complex64::default();
    }
    let plus = |u: &[f64], c: f64| u.iter().map(|x| c + x).collect::<Vec<f64>>();
    let minus = |u: &[f64], c: f64| u.iter().map(|x| c - x).collect::<Vec<f64>>();
    let lam = interpolate_tensor(&op.bra, &plus(&u0, c[0]), &plus(&u1, c[1]));
    let chi = interpolate_tensor(&op.ket, &minus(&u0, c[0]), &minus(&u1, c[1]));
    let mut total = Complex64::default();
    for (j, y) in u1.iter().enumerate() {
        let mut row = Complex64::default();
        for (i, x) in u0.iter().enumerate() {
            let k = i + u0.len() * j;
            row += lam[k].conj() * chi[k] * Complex64::from_polar(1.0, 2.0 * a[0] * x);
        }
        total += row * Complex64::from_polar(1.0, 2.0 * a[1] * y);
    }
    let ds = 4.0 * g.axis0.step * g.axis1.step * f * f;
    total * pref * ds
}

/// The orbit Wigner function at one point, written out from the closed forms
/// for each sector and integrated by [`oracle_integral`]. `op` is in the
/// momentum representation.
pub fn direct_wigner_oracle(op: &RankOneOperator, pt: &CoadjointPoint, label: &OrbitLabel) -> Complex64 {
    direct_wigner_oracle_refined(op, pt, label, 0)
}

/// [`direct_wigner_oracle`] with the quadrature step divided by `2^refine`.
pub fn direct_wigner_oracle_refined(
    op: &RankOneOperator,
    pt: &CoadjointPoint,
    label: &OrbitLabel,
    refine: u32,
) -> Complex64 {
    let (k1, k2, k3) = (label.k1(), label.k2(), label.k3());
    let DimensionalConstants { alpha: al, beta: be, gamma: ga } = label.consts();
    let [x1, x2, x3, x4] = pt.to_array();
    let (a, c, pref) = match label.sector() {
        Sector::Generic => {
            let d = k1 * k1 * al * al - k2 * k3 * be * ga;
            (
                [al * (x1 * k1 * k1 * al * al - x4 * k1 * k2 * al * be) / d, al * x2],
                [x3 / k1, (k1 * x4 * al * al - x1 * k3 * al * ga) / d],
                al.abs() / (2.0 * PI * d.abs().sqrt()),
            )
        }
        Sector::TauZero => (
            [al * (x1 - x4 * k2 * be / (k1 * al)), al * x2],
            [x3 / k1, x4 / k1],
            1.0 / ((2.0 * PI).powf(1.5) * k1.abs()),
        ),
        Sector::SigmaTauZero => (
            [al * x1, al * x2],
            [x3 / k1, x4 / k1],
            1.0 / (4.0 * PI * PI * k1.abs()),
        ),
    };
    oracle_integral(op, a, c, pref, refine)
}

// ---------------------------------------------------------------------------
// star-product oracle

/// The 4D products evaluated literally: for every output node the printed
/// quadratic form `v^T M w` is formed per integration node and the reflected
/// factor is looked up by coordinate.
pub fn star_oracle(
    w1: &WignerField,
    w2: &WignerField,
    p: &NCParams,
    kernel: Kernel4,
) -> Result<Vec<Complex64>> {
    let Probes::Full(axes) = w1.probes else {
        return Err(Error::InvalidGrid("a full 4D field is required".into()));
    };
    let (h, t, b) = (p.hbar, p.vartheta, p.bfield);
    let delta = h * h - b * t;
    let (m, scale): ([[f64; 4]; 4], f64) = match kernel {
        Kernel4::Hbar => (
            [[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0], [-1.0, 0.0, 0.0, 0.0], [0.0, -1.0, 0.0, 0.0]],
            1.0 / h,
        ),
        Kernel4::General => (
            [[0.0, b, -h, 0.0], [-b, 0.0, 0.0, -h], [h, 0.0, 0.0, t], [0.0, h, -t, 0.0]],
            1.0 / delta,
        ),
    };
    let pref = delta.abs().sqrt() / (PI * h.abs());
    let n = [axes[0].n, axes[1].n, axes[2].n, axes[3].n];
    let total: usize = n.iter().product();
    let idx = |i: [usize; 4]| i[0] + n[0] * (i[1] + n[1] * (i[2] + n[2] * i[3]));
    let unflat = |mut f: usize| {
        let mut i = [0; 4];
        for k in 0..4 {
            i[k] = f % n[k];
            f /= n[k];
        }
        i
    };
    let weight = |k: usize, i: usize| if i == 0 || i + 1 == n[k] { 0.5 * axes[k].step } else { axes[k].step };
    let (v1, v2) = (w1.values(), w2.values());
    Ok((0..total)
        .into_par_iter()
        .map(|o| {
            let ko = unflat(o);
            let k: Vec<f64> = (0..4).map(|j| axes[j].coord(ko[j])).collect();
            let mut acc = Complex64::default();
            for s in 0..total {
                let si = unflat(s);
                let x: Vec<f64> = (0..4).map(|j| axes[j].coord(si[j])).collect();
                let r1 = axes[1].node_index(2.0 * k[1] - x[1], 1e-9);
                let r2 = axes[2].node_index(2.0 * k[2] - x[2], 1e-9);
                let (Some(r1), Some(r2)) = (r1, r2) else { continue };
                let v = [k[0] - x[0], k[1] - x[1], k[2] - x[2], k[3] - x[3]];
                let w = [x[0] - k[0], k[1] - x[1], k[2] - x[2], x[3] - k[3]];
                let mut form = 0.0;
                for (i, row) in m.iter().enumerate() {
                    for (j, mij) in row.iter().enumerate() {
                        form += v[i] * mij * w[j];
                    }
                }
                let wt = weight(0, si[0]) * weight(1, si[1]) * weight(2, si[2]) * weight(3, si[3]);
                acc += Complex64::from_polar(wt, scale * form) * v1[s] * v2[idx([si[0], r1, r2, si[3]])];
            }
            acc * pref
        })
        .collect())
}

// ---------------------------------------------------------------------------
// isometry

/// `∫|W|² dk* / (‖χ‖²‖λ‖²)` for each sector: `1/α²`, `1/(2πα²)`, `1/(4π²α²)`.
pub fn isometry_constant(sector: Sector, consts: DimensionalConstants) -> f64 {
    let a2 = consts.alpha * consts.alpha;
    match sector {
        Sector::Generic => 1.0 / a2,
        Sector::TauZero => 1.0 / (2.0 * PI * a2),
        Sector::SigmaTauZero => 1.0 / (4.0 * PI * PI * a2),
    }
}

/// Orbit prefactor and the density `dk* / (dq^nc dc)` with `c = p^nc/k1`.
fn sector_factors(label: &OrbitLabel) -> (f64, f64) {
    let a = label.consts().alpha;
    let k1 = label.k1();
    match label.sector() {
        Sector::Generic => {
            let d = label.discriminant().abs();
            (a.abs() / (2.0 * PI * d.sqrt()), d / (a * a))
        }
        Sector::TauZero => (1.0 / ((2.0 * PI).powf(1.5) * k1.abs()), k1 * k1),
        Sector::SigmaTauZero => (1.0 / (4.0 * PI * PI * k1.abs()), k1 * k1),
    }
}

/// The isometry ratio with the frequency integral done by Parseval:
/// `∫|W|² dq = pref² (2π/|α|)² ∫ |conj λ(c + s/2) χ(c − s/2)|² ds`,
/// leaving a sum over centres `c` (every `stride`-th state node) and
/// half-separations `s/2` on the state lattice.
pub fn isometry_ratio_reduced(op: &RankOneOperator, label: &OrbitLabel, stride: usize) -> f64 {
    let (pref, jac) = sector_factors(label);
    let a = label.consts().alpha;
    let g = *op.grid();
    let (n0, n1) = (g.axis0.n, g.axis1.n);
    let p: Vec<f64> = op.bra.values().iter().map(|v| v.norm_sqr()).collect();
    let q: Vec<f64> = op.ket.values().iter().map(|v| v.norm_sqr()).collect();
    let stride = stride.max(1);
    let centres: Vec<(usize, usize)> = (0..n1)
        .step_by(stride)
        .flat_map(|i1| (0..n0).step_by(stride).map(move |i0| (i0, i1)))
        .collect();
    let sum: f64 = centres
        .par_iter()
        .map(|&(i0, i1)| {
            let r0 = i0.min(n0 - 1 - i0) as i64;
            let r1 = i1.min(n1 - 1 - i1) as i64;
            let mut s = 0.0;
            for m1 in -r1..=r1 {
                let (a1, b1) = ((i1 as i64 + m1) as usize, (i1 as i64 - m1) as usize);
                for m0 in -r0..=r0 {
                    let (a0, b0) = ((i0 as i64 + m0) as usize, (i0 as i64 - m0) as usize);
                    s += p[a0 + n0 * a1] * q[b0 + n0 * b1];
                }
            }
            s
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    let cells = (2.0 * g.axis0.step * g.axis1.step).powi(2) * (stride * stride) as f64;
    let norms = op.ket.norm().powi(2) * op.bra.norm().powi(2);
    jac * pref * pref * (2.0 * PI / a).powi(2) * sum * cells / norms
}

/// The isometry ratio by plain 4D trapezoid quadrature of `|W|²` over an
/// `n⁴` lattice in `(q^nc, p^nc)` with half-widths `q_ext`, `p_ext`.
pub fn isometry_ratio_raw(
    op: &RankOneOperator,
    label: &OrbitLabel,
    n: usize,
    q_ext: f64,
    p_ext: f64,
) -> Result<f64> {
    let qa = Grid1D::symmetric(n, q_ext)?;
    let pa = Grid1D::symmetric(n, p_ext)?;
    let lattice = Probes::full_capped([qa, qa, pa, pa], n)?;
    let pts: Vec<[f64; 4]> = lattice
        .points()
        .into_iter()
        .map(|x| nc_to_orbit(&NCCoords::from_array(x), label).to_array())
        .collect();
    let w = wigner_orbit(op, &Probes::Points(pts), label, Method::Fft)?;
    let sum: f64 = w.values().iter().map(|v| v.norm_sqr()).sum();
    let cell = (qa.step * pa.step).powi(2) / nc_jacobian(label);
    let norms = op.ket.norm().powi(2) * op.bra.norm().powi(2);
    Ok(sum * cell / norms)
}

/// Spread `(max − min)/mean` of the reduced ratios; passes below 1e-4.
pub fn isometry_ratio(ops: &[RankOneOperator], label: &OrbitLabel) -> VerificationReport {
    let name = format!("isometry:{}", label.sector().name());
    if ops.len() < 2 {
        return VerificationReport::failed(name, "at least two operators are required");
    }
    let r: Vec<f64> = ops.iter().map(|op| isometry_ratio_reduced(op, label, 1)).collect();
    let mean = r.iter().sum::<f64>() / r.len() as f64;
    let (lo, hi) = r.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    VerificationReport::check(name, (hi - lo) / mean.abs(), 1e-4)
        .with("mean", format!("{mean:.16e}"))
        .with("expected", format!("{:.16e}", isometry_constant(label.sector(), label.consts())))
        .with("operators", r.len())
}

// ---------------------------------------------------------------------------
// suite

/// One group of acceptance checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    QmEquivalence,
    Marginals,
    StarMarginals,
    Isometry,
    QmLimit,
    Oracle,
    Structure,
    Determinism,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::QmEquivalence,
        Suite::Marginals,
        Suite::StarMarginals,
        Suite::Isometry,
        Suite::QmLimit,
        Suite::Oracle,
        Suite::Structure,
        Suite::Determinism,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::QmEquivalence => "qm-equivalence",
            Suite::Marginals => "marginals",
            Suite::StarMarginals => "star-marginals",
            Suite::Isometry => "isometry",
            Suite::QmLimit => "qm-limit",
            Suite::Oracle => "oracle",
            Suite::Structure => "structure",
            Suite::Determinism => "determinism",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

/// Parses `all` or a comma-separated list of suite names; empty input gives no suites.
pub fn parse_suites(s: &str) -> Result<Vec<Suite>> {
    if s.trim() == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    let mut v: Vec<Suite> = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(Suite::from_str)
        .collect::<Result<_>>()?;
    v.sort();
    v.dedup();
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub suites: Vec<Suite>,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { suites: Suite::ALL.to_vec(), seed: 7 }
    }
}

/// Runs the selected suites (concurrently) and returns their reports in
/// suite order. Failures are reported, never returned as errors.
pub fn run_verification_suite(config: &SuiteConfig) -> Vec<VerificationReport> {
    let mut suites = config.suites.clone();
    suites.sort();
    suites.dedup();
    let parts: Vec<Vec<VerificationReport>> =
        suites.par_iter().map(|s| run_suite(*s, config.seed)).collect();
    parts.into_iter().flatten().collect()
}

fn run_suite(s: Suite, seed: u64) -> Vec<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(s as u64);
    let out = match s {
        Suite::QmEquivalence => suite_qm_equivalence(),
        Suite::Marginals => suite_marginals(),
        Suite::StarMarginals => suite_star_marginals(),
        Suite::Isometry => suite_isometry(&mut rng),
        Suite::QmLimit => suite_qm_limit(),
        Suite::Oracle => suite_oracle(&mut rng),
        Suite::Structure => suite_structure(&mut rng),
        Suite::Determinism => suite_determinism(seed),
    };
    out.unwrap_or_else(|e| vec![VerificationReport::failed(s.name(), e)])
}

/// `max|a − b| / max|b|`.
pub fn relative_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn unit() -> DimensionalConstants {
    DimensionalConstants::unit()
}

fn momentum(mut f: ComplexField2D) -> ComplexField2D {
    f.representation = Representation::Momentum;
    f
}

fn suite_qm_equivalence() -> Result<Vec<VerificationReport>> {
    let grid = Grid2D::square_symmetric(128, 10.0)?;
    let label = make_orbit_label(1.0, 0.0, 0.0, unit())?;
    let g00 = gaussian_state(grid, [1.0, 1.0], [0.0; 4], [0, 0])?;
    let g10 = gaussian_state(grid, [1.0, 1.0], [0.0; 4], [1, 0])?;
    let ops = [
        ("gaussian", RankOneOperator::diagonal(g00.clone())),
        ("hermite10", RankOneOperator::diagonal(g10.clone())),
        ("cross", RankOneOperator::new(g00, g10)?),
    ];
    let pg = Grid2D::square_symmetric(32, 3.0)?;
    let slices = [
        Probes::slice(pg, [0, 2], [0.0, 0.3, 0.0, -0.2])?,
        Probes::slice(pg, [1, 3], [0.25, 0.0, -0.4, 0.0])?,
    ];
    let mut worst: f64 = 0.0;
    for (_, op) in &ops {
        let mop = RankOneOperator::new(to_momentum(&op.ket, &label)?, to_momentum(&op.bra, &label)?)?;
        for pr in &slices {
            let w = wigner_qm_orbit(&mop, pr, &label, Method::Fft)?;
            let mut h = 0.0;
            let mut scale = 0.0;
            let mapped: Vec<[f64; 4]> = pr
                .points()
                .into_iter()
                .map(|k| {
                    let (x, hh, s) = qm_convention_map(&label, k).expect("k1 alpha > 0");
                    h = hh;
                    scale = s;
                    x
                })
                .collect();
            let std = cross_wigner_standard(op, &Probes::Points(mapped), h, Method::Fft)?;
            let want: Vec<Complex64> = std.values().iter().map(|v| v * scale).collect();
            worst = worst.max(relative_error(w.values(), &want));
        }
    }
    Ok(vec![VerificationReport::check("qm-equivalence", worst, 1e-6)
        .with("states", "gaussian,hermite10,cross")
        .with("probes", "2x32^2")])
}

/// `ψ` sampled at the nodes of `sub` (which must be state nodes).
fn sample_nodes(psi: &ComplexField2D, sub: &Grid2D) -> Result<Vec<f64>> {
    let g = psi.grid();
    let mut out = Vec::with_capacity(sub.len());
    for i1 in 0..sub.axis1.n {
        for i0 in 0..sub.axis0.n {
            let (x, y) = sub.coord(i0, i1);
            let (Some(j0), Some(j1)) = (g.axis0.node_index(x, 1e-9), g.axis1.node_index(y, 1e-9)) else {
                return Err(Error::InvalidGrid("marginal nodes must be state nodes".into()));
            };
            out.push(psi.at(j0, j1).norm_sqr());
        }
    }
    Ok(out)
}

fn suite_marginals() -> Result<Vec<VerificationReport>> {
    let grid = Grid2D::square_symmetric(128, 10.0)?;
    let h = grid.axis0.step;
    let sub_axis = Grid1D::new(32, -32.0 * h, 2.0 * h)?;
    let sub = Grid2D::new(sub_axis, sub_axis);
    let free = Grid1D::symmetric(32, 5.0)?;
    let psi = gaussian_state(grid, [1.0, 0.8], [0.3, -0.2, 0.5, 0.1], [1, 0])?;
    let labels = [(1.0, -1.0, 1.0), (2.0, 1.0, -1.0), (1.0, 2.0, 1.0)];
    let (mut em, mut ep, mut ef) = (0.0f64, 0.0f64, 0.0f64);
    for &(k1, k2, k3) in &labels {
        let label = make_orbit_label(k1, k2, k3, unit())?;
        let literal = (k1 * 1.0f64).abs() / (k1 * k1 - k2 * k3).abs().sqrt();
        let pref = marginal_prefactor(&label);
        ef = ef.max((pref / literal - 1.0).abs());
        let want = sample_nodes(&psi, &sub)?;
        let peak = want.iter().fold(0.0f64, |a, &b| a.max(b)) * literal;

        let op = RankOneOperator::diagonal(momentum(psi.clone()));
        let w = wigner_nc(&op, &Probes::full([free, free, sub_axis, sub_axis])?, &label, Method::Fft)?;
        let m = marginal_momentum(&w)?;
        let err = m.values().iter().zip(&want).map(|(a, b)| (a - b * literal).norm()).fold(0.0, f64::max);
        em = em.max(err / peak);
        let total: f64 = m.values().iter().map(|v| v.re).sum::<f64>() / want.iter().sum::<f64>();
        ef = ef.max((total / literal - 1.0).abs());

        let op = RankOneOperator::diagonal(psi.clone());
        let w = wigner_nc_position(&op, &Probes::full([sub_axis, sub_axis, free, free])?, &label, Method::Fft)?;
        let m = marginal_position(&w)?;
        let err = m.values().iter().zip(&want).map(|(a, b)| (a - b * literal).norm()).fold(0.0, f64::max);
        ep = ep.max(err / peak);
        let total: f64 = m.values().iter().map(|v| v.re).sum::<f64>() / want.iter().sum::<f64>();
        ef = ef.max((total / literal - 1.0).abs());
    }
    let labels = "(1,-1,1);(2,1,-1);(1,2,1)";
    Ok(vec![
        VerificationReport::check("marginals:momentum", em, 1e-6).with("labels", labels),
        VerificationReport::check("marginals:position", ep, 1e-6).with("labels", labels),
        VerificationReport::check("marginals:prefactor", ef, 1e-6).with("labels", labels),
    ])
}

/// Grid and labels shared by the star-product marginal checks.
pub fn star_marginals_setup() -> Result<(Grid2D, Grid2D, Vec<OrbitLabel>)> {
    let grid = Grid2D::square_symmetric(256, 8.0)?;
    let out = Grid2D::square_symmetric(32, 3.0)?;
    let labels = vec![make_orbit_label(1.0, -1.0, 1.0, unit())?, make_orbit_label(1.0, -2.0, 1.0, unit())?];
    Ok((grid, out, labels))
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn suite_star_marginals() -> Result<Vec<VerificationReport>> {
    let (grid, out, labels) = star_marginals_setup()?;
    let psi = gaussian_state(grid, [1.0, 0.9], [0.2, -0.1, 0.4, -0.3], [0, 0])?;
    let psi_hat = momentum(gaussian_state(grid, [0.9, 1.0], [-0.1, 0.2, -0.3, 0.5], [0, 0])?);
    let (mut ex, mut ep) = (0.0f64, 0.0f64);
    for label in &labels {
        let p = nc_params_from_label(label);
        let lhs = position_marginal_canonical(&psi, &p, &out)?;
        let rhs = star_vartheta(&psi.conj(), &psi, &p, &out)?;
        ex = ex.max(max_abs_diff(lhs.values(), rhs.values()));
        let lhs = momentum_marginal_canonical(&psi_hat, &p, &out)?;
        let rhs = star_b(&psi_hat.conj(), &psi_hat, &p, &out)?;
        ep = ep.max(max_abs_diff(lhs.values(), rhs.values()));
    }
    let names = "(1,-1,1);(1,-2,1)";
    Ok(vec![
        VerificationReport::check("star-marginals:position", ex, 1e-4).with("labels", names).with("grid", "256^2"),
        VerificationReport::check("star-marginals:momentum", ep, 1e-4).with("labels", names).with("grid", "256^2"),
    ])
}

fn suite_isometry(rng: &mut ChaCha8Rng) -> Result<Vec<VerificationReport>> {
    let coarse = Grid2D::square_symmetric(64, 9.0)?;
    let fine = Grid2D::square_symmetric(128, 9.0)?;
    let labels = [
        make_orbit_label(1.0, -1.0, 1.0, unit())?,
        make_orbit_label(1.0, 0.5, 0.0, unit())?,
        make_orbit_label(1.0, 0.0, 0.0, unit())?,
    ];
    let mut reports = Vec::new();
    for label in &labels {
        let seeds: Vec<u64> = (0..5).map(|_| rng.gen()).collect();
        let make = |g: Grid2D| -> Vec<RankOneOperator> {
            seeds
                .iter()
                .map(|&s| random_operator(g, &mut ChaCha8Rng::seed_from_u64(s), Representation::Momentum))
                .collect()
        };
        let ops = make(coarse);
        let spread = isometry_ratio(&ops, label);
        let mean_c = ops.iter().map(|op| isometry_ratio_reduced(op, label, 1)).sum::<f64>() / 5.0;
        let mean_f = make(fine).iter().map(|op| isometry_ratio_reduced(op, label, 2)).sum::<f64>() / 5.0;
        let expected = isometry_constant(label.sector(), label.consts());
        let raw = isometry_ratio_raw(&ops[0], label, 16, 4.0, 4.0)?;
        let sector = label.sector().name();
        reports.push(spread);
        reports.push(
            VerificationReport::check(format!("isometry:{sector}:doubling"), (mean_f / mean_c - 1.0).abs(), 1e-3)
                .with("coarse", format!("{mean_c:.16e}"))
                .with("fine", format!("{mean_f:.16e}")),
        );
        reports.push(
            VerificationReport::check(format!("isometry:{sector}:constant"), (mean_c / expected - 1.0).abs(), 1e-3)
                .with("expected", format!("{expected:.16e}")),
        );
        reports.push(
            VerificationReport::check(format!("isometry:{sector}:raw16"), (raw / expected - 1.0).abs(), 1e-3)
                .with("raw", format!("{raw:.16e}")),
        );
    }
    Ok(reports)
}

/// Probe slice and state of the QM-limit study.
pub fn qm_limit_setup() -> Result<(RankOneOperator, Probes, DimensionalConstants)> {
    let grid = Grid2D::square_symmetric(128, 10.0)?;
    let a = gaussian_state(grid, [1.0, 1.0], [0.0; 4], [0, 0])?;
    let b = gaussian_state(grid, [1.0, 1.0], [0.0; 4], [1, 0])?;
    let psi = momentum(a.axpby(Complex64::new(0.8, 0.0), &b, Complex64::new(0.0, 0.6))?);
    let probes = Probes::slice(Grid2D::square_symmetric(16, 2.0)?, [0, 3], [0.0, 0.25, -0.3, 0.0])?;
    Ok((RankOneOperator::diagonal(psi), probes, DimensionalConstants::new(1.0, 1.0, -1.0)?))
}

fn suite_qm_limit() -> Result<Vec<VerificationReport>> {
    let (op, probes, consts) = qm_limit_setup()?;
    let d = qm_limit_check(&op, 1.0, consts, 1.0, 4.0, 4, &probes, Method::Fft)?;
    let increases = d.windows(2).filter(|w| !(w[1] < w[0])).count();
    let list = d.iter().map(|x| format!("{x:.6e}")).collect::<Vec<_>>().join(";");
    Ok(vec![
        VerificationReport::check("qm-limit:monotone", increases as f64, 0.0).with("distances", &list),
        VerificationReport::check("qm-limit:final", *d.last().unwrap_or(&f64::NAN), 1e-3)
            .with("k2=k3", "4^-m, m=0..4")
            .with("gamma", -1),
    ])
}

fn suite_oracle(rng: &mut ChaCha8Rng) -> Result<Vec<VerificationReport>> {
    let grid = Grid2D::square_symmetric(128, 10.0)?;
    let labels = [
        make_orbit_label(1.0, -1.0, 1.0, unit())?,
        make_orbit_label(1.0, 0.5, 0.0, unit())?,
        make_orbit_label(1.0, 0.0, 0.0, unit())?,
    ];
    let mut reports = Vec::new();
    for label in &labels {
        let op = random_operator(grid, rng, Representation::Momentum);
        let pts: Vec<[f64; 4]> = (0..100).map(|_| [(); 4].map(|_| rng.gen_range(-2.5..2.5))).collect();
        let fast = wigner_orbit(&op, &Probes::Points(pts.clone()), label, Method::Fft)?;
        let slow: Vec<Complex64> =
            pts.par_iter().map(|k| direct_wigner_oracle(&op, &CoadjointPoint::from_array(*k), label)).collect();
        reports.push(
            VerificationReport::check(format!("oracle:{}", label.sector().name()), relative_error(fast.values(), &slow), 1e-8)
                .with("points", 100),
        );
    }
    let ax = Grid1D::symmetric(8, 2.0)?;
    let probes = Probes::full([ax; 4])?;
    let mut field = || {
        let mu = [(); 4].map(|_| rng.gen_range(-0.5..0.5));
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let k = [(); 4].map(|_| rng.gen_range(-1.0..1.0));
        WignerField::from_fn(Chart::Orbit, probes.clone(), |x| {
            let r2: f64 = (0..4).map(|i| (x[i] - mu[i]).powi(2)).sum();
            c * Complex64::from_polar((-0.5 * r2).exp(), (0..4).map(|i| k[i] * x[i]).sum())
        })
    };
    let (w1, w2) = (field(), field());
    for (name, kernel, p) in [
        ("oracle:star-hbar", Kernel4::Hbar, NCParams::new(4.0, 0.0, 0.0)?),
        ("oracle:star-general", Kernel4::General, NCParams::new(4.0, 0.5, -0.7)?),
    ] {
        let fast = match kernel {
            Kernel4::Hbar => star_hbar(&w1, &w2, &p)?,
            Kernel4::General => star_general(&w1, &w2, &p)?,
        };
        let slow = star_oracle(&w1, &w2, &p, kernel)?;
        reports.push(VerificationReport::check(name, relative_error(fast.values(), &slow), 1e-6).with("grid", "8^4"));
    }
    Ok(reports)
}

fn random_element(rng: &mut impl Rng, r: f64) -> GroupElement {
    let mut x = || rng.gen_range(-r..r);
    GroupElement::new(x(), x(), x(), [x(), x()], [x(), x()])
}

fn field_distance(a: &ComplexField2D, b: &ComplexField2D) -> f64 {
    relative_error(a.values(), b.values())
}

fn suite_structure(rng: &mut ChaCha8Rng) -> Result<Vec<VerificationReport>> {
    let mut reports = Vec::new();

    let consts = DimensionalConstants::new(1.3, -0.7, 2.1)?;
    let mut assoc: f64 = 0.0;
    for _ in 0..1000 {
        let (a, b, c) = (random_element(rng, 2.0), random_element(rng, 2.0), random_element(rng, 2.0));
        let l = group_multiply(&group_multiply(&a, &b, &consts), &c, &consts).to_array();
        let r = group_multiply(&a, &group_multiply(&b, &c, &consts), &consts).to_array();
        let scale = l.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        assoc = assoc.max(l.iter().zip(&r).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale);
    }
    reports.push(VerificationReport::check("structure:associativity", assoc, 1e-12).with("triples", 1000));

    let grid = Grid2D::square_symmetric(64, 9.0)?;
    let h = grid.axis0.step;
    let label = make_orbit_label(1.5, -1.0, 0.5, consts)?;
    let f = random_state(grid, rng, Representation::Position);
    let fhat = random_state(grid, rng, Representation::Momentum);
    let (mut hom, mut uni) = (0.0f64, 0.0f64);
    let (k1, k3) = (label.k1(), label.k3());
    let lattice = |rng: &mut ChaCha8Rng| {
        let mut e = random_element(rng, 1.0);
        e.q[0] = rng.gen_range(-4i32..=4) as f64 * h;
        e.p[1] = rng.gen_range(-4i32..=4) as f64 * h;
        // keeps the Fourier-form shift −p1 − τγ q2/(ρα) on the lattice
        e.p[0] = rng.gen_range(-4i32..=4) as f64 * h - k3 * consts.gamma * e.q[1] / (k1 * consts.alpha);
        e
    };
    for _ in 0..10 {
        let (g1, g2) = (lattice(rng), lattice(rng));
        let g12 = group_multiply(&g1, &g2, &consts);
        let two = uir_apply(&g1, &uir_apply(&g2, &f, &label, ShiftMode::Fractional)?, &label, ShiftMode::Fractional)?;
        let one = uir_apply(&g12, &f, &label, ShiftMode::Fractional)?;
        hom = hom.max(field_distance(&two, &one));
        let two = uir_apply_ft(&g1, &uir_apply_ft(&g2, &fhat, &label, ShiftMode::Fractional)?, &label, ShiftMode::Fractional)?;
        let one = uir_apply_ft(&g12, &fhat, &label, ShiftMode::Fractional)?;
        hom = hom.max(field_distance(&two, &one));
        uni = uni.max((one.norm() / fhat.norm() - 1.0).abs());
        uni = uni.max((uir_apply(&g1, &f, &label, ShiftMode::Fractional)?.norm() / f.norm() - 1.0).abs());
    }
    reports.push(VerificationReport::check("structure:homomorphism", hom, 1e-10));
    reports.push(VerificationReport::check("structure:unitarity", uni, 1e-10));

    let grid = Grid2D::square_symmetric(64, 9.0)?;
    let label = make_orbit_label(1.0, -1.0, 1.0, unit())?;
    let probes = Probes::slice(Grid2D::square_symmetric(16, 2.0)?, [0, 2], [0.0, 0.3, 0.0, -0.4])?;
    let chi = random_state(grid, rng, Representation::Momentum);
    let chi2 = random_state(grid, rng, Representation::Momentum);
    let lam = random_state(grid, rng, Representation::Momentum);
    let w = |k: &ComplexField2D, b: &ComplexField2D| -> Result<WignerField> {
        wigner_orbit(&RankOneOperator::new(k.clone(), b.clone())?, &probes, &label, Method::Fft)
    };
    let diag = w(&chi, &chi)?;
    let reality = diag.max_abs_imag() / diag.max_abs();
    reports.push(VerificationReport::check("structure:reality", reality, 1e-10));
    let fwd = w(&chi, &lam)?;
    let adj = w(&lam, &chi)?;
    let conj: Vec<Complex64> = fwd.values().iter().map(|v| v.conj()).collect();
    reports.push(VerificationReport::check("structure:hermiticity", relative_error(adj.values(), &conj), 1e-10));
    let (a, b) = (Complex64::new(0.7, -1.2), Complex64::new(-0.3, 0.4));
    let mix = chi.axpby(a, &chi2, b)?;
    let lhs_ket = w(&mix, &lam)?;
    let w2 = w(&chi2, &lam)?;
    let rhs_ket: Vec<Complex64> = fwd.values().iter().zip(w2.values()).map(|(x, y)| a * x + b * y).collect();
    let lhs_bra = w(&lam, &mix)?;
    let w3 = w(&lam, &chi2)?;
    let rhs_bra: Vec<Complex64> =
        adj.values().iter().zip(w3.values()).map(|(x, y)| a.conj() * x + b.conj() * y).collect();
    let ses = relative_error(lhs_ket.values(), &rhs_ket).max(relative_error(lhs_bra.values(), &rhs_bra));
    reports.push(VerificationReport::check("structure:sesquilinearity", ses, 1e-10));
    Ok(reports)
}

fn suite_determinism(seed: u64) -> Result<Vec<VerificationReport>> {
    let run = || {
        [Suite::QmEquivalence, Suite::Structure]
            .iter()
            .flat_map(|s| run_suite(*s, seed))
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
    };
    let (a, b) = (run(), run());
    let differing = a.iter().zip(&b).filter(|(x, y)| x != y).count() + a.len().abs_diff(b.len());
    Ok(vec![VerificationReport::check("determinism:in-process", differing as f64, 0.0).with("reports", a.len())])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_2d, Rule};

    #[test]
    fn hermite_recurrence_matches_closed_forms() {
        for &x in &[-1.3f64, 0.0, 0.4, 2.2] {
            let h0 = PI.powf(-0.25) * (-x * x / 2.0).exp();
            assert!((hermite_function(0, x) - h0).abs() < 1e-15);
            assert!((hermite_function(1, x) - 2.0f64.sqrt() * x * h0).abs() < 1e-15);
            assert!((hermite_function(2, x) - (2.0 * x * x - 1.0) / 2.0f64.sqrt() * h0).abs() < 1e-14);
        }
    }

    #[test]
    fn gaussian_states() {
        let g = Grid2D::square_symmetric(128, 10.0).unwrap();
        let s = gaussian_state(g, [1.0, 1.0], [0.0; 4], [0, 0]).unwrap();
        let (x, y) = g.coord(70, 50);
        let want = (-(x * x + y * y) / 2.0).exp() / PI.sqrt();
        assert!((s.at(70, 50).re - want).abs() < 1e-15);
        for (w, c, n) in [([1.0, 1.0], [0.0; 4], [0, 0]), ([0.7, 1.4], [0.5, -1.0, 2.0, 0.3], [2, 1])] {
            let s = gaussian_state(g, w, c, n).unwrap();
            let m = s.map(|v| Complex64::new(v.norm_sqr(), 0.0));
            assert!((integrate_2d(&m, Rule::Simpson).re - 1.0).abs() < 1e-10);
        }
        let a = gaussian_state(g, [1.0, 1.0], [0.0; 4], [1, 0]).unwrap();
        let b = gaussian_state(g, [1.0, 1.0], [0.0; 4], [0, 0]).unwrap();
        assert!(a.inner(&b).unwrap().norm() < 1e-10);
        assert!(gaussian_state(g, [0.0, 1.0], [0.0; 4], [0, 0]).is_err());
    }

    #[test]
    fn random_states_are_normalized_and_seeded() {
        let g = Grid2D::square_symmetric(64, 9.0).unwrap();
        let a = random_state(g, &mut ChaCha8Rng::seed_from_u64(3), Representation::Momentum);
        let b = random_state(g, &mut ChaCha8Rng::seed_from_u64(3), Representation::Momentum);
        assert_eq!(a.values(), b.values());
        assert!((a.norm() - 1.0).abs() < 1e-10);
        assert_eq!(a.representation, Representation::Momentum);
    }

    #[test]
    fn dirichlet_interpolation_is_exact_on_nodes_and_trig_polynomials() {
        let ax = Grid1D::symmetric(16, 4.0).unwrap();
        let w = dirichlet_weights(&ax, ax.coord(5)).unwrap();
        assert!(w.iter().enumerate().all(|(j, v)| (v - if j == 5 { 1.0 } else { 0.0 }).abs() < 1e-14));
        let k = 2.0 * PI / (16.0 * ax.step) * 3.0;
        let x = 0.123;
        let w = dirichlet_weights(&ax, x).unwrap();
        let v: f64 = (0..16).map(|j| w[j] * (k * ax.coord(j)).cos()).sum();
        assert!((v - (k * x).cos()).abs() < 1e-13);
        assert!(dirichlet_weights(&ax, 4.5).is_none());
    }

    #[test]
    fn oracle_of_zero_state_is_zero() {
        let g = Grid2D::square_symmetric(32, 8.0).unwrap();
        let z = ComplexField2D::zeros(g, Representation::Momentum);
        let l = make_orbit_label(1.0, -1.0, 1.0, unit()).unwrap();
        let v = direct_wigner_oracle(&RankOneOperator::diagonal(z), &CoadjointPoint::new(0.1, 0.2, 0.3, 0.4), &l);
        assert_eq!(v, Complex64::default());
    }

    #[test]
    fn isometry_is_homogeneous() {
        let g = Grid2D::square_symmetric(32, 8.0).unwrap();
        let l = make_orbit_label(1.0, -1.0, 1.0, unit()).unwrap();
        let op = random_operator(g, &mut ChaCha8Rng::seed_from_u64(1), Representation::Momentum);
        let r = isometry_ratio_reduced(&op, &l, 1);
        let scaled = RankOneOperator::new(op.ket.scale(Complex64::new(2.0, 0.0)), op.bra.clone()).unwrap();
        assert!((isometry_ratio_reduced(&scaled, &l, 1) / r - 1.0).abs() < 1e-12);
        let rep = isometry_ratio(&[op.clone(), op], &l);
        assert_eq!(rep.metric, 0.0);
        assert!(rep.passed);
    }

    #[test]
    fn suite_names() {
        assert_eq!(parse_suites("all").unwrap().len(), 8);
        assert_eq!(parse_suites("oracle,structure").unwrap(), vec![Suite::Oracle, Suite::Structure]);
        assert!(parse_suites("").unwrap().is_empty());
        assert!(parse_suites("nope").is_err());
        let empty = SuiteConfig { suites: vec![], seed: 1 };
        assert!(run_verification_suite(&empty).is_empty());
    }
}
