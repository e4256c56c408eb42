//! Wigner transforms of rank-one operators `|χ⟩⟨λ|`.
//!
//! Every transform in this module has the shape
//!
//! ```text
//! W(x) = P · ∫ e^{i a(x)·s} · conj λ(c(x) + s/2) · χ(c(x) − s/2) ds
//! ```
//!
//! for a point-dependent frequency `a`, centre `c` and a constant prefactor
//! `P`. The transforms only differ in how `(a, c, P)` are computed from the
//! probe point, so they share a single engine:
//!
//! * the integration variable is `s = 2u` with `u` on the state's nodes
//!   relative to its centre node, hence `Δs = 2h`;
//! * for a fixed centre `c` the integrand's field part is
//!   `conj(λ shifted by c − x_ref) · (χ reflected through (c + x_ref)/2)`,
//!   built with Fourier shifts (exact index moves when `c` sits on a node);
//! * probe points sharing a centre form one group; if their frequencies form
//!   a uniform tensor grid the phase sum is a 2D chirp-z transform
//!   ([`Method::Fft`]), otherwise (or with [`Method::Direct`]) it is an
//!   explicit exponential sum.
//!
//! The integral is truncated to the state grid, so both fields must vanish on
//! its boundary (relative level `1e-12`), and `|a_i|·Δs_i ≤ π` is enforced.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, Grid1D, Grid2D, Representation};
use crate::numerics::{czt, fractional_shift, reflect};
use crate::orbit::{
    nc_params_from_label, nc_to_orbit, orbit_to_nc, CoadjointPoint, DimensionalConstants,
    NCCoords, NCParams, OrbitLabel, Sector,
};

/// Relative boundary level above which a state is considered truncated.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Largest per-axis size accepted for full 4D outputs.
pub const MAX_FULL_AXIS: usize = 32;

/// The ordered pair `(ket χ, bra λ)` representing `|χ⟩⟨λ|`.
#[derive(Clone, Debug)]
pub struct RankOneOperator {
    pub ket: ComplexField2D,
    pub bra: ComplexField2D,
}

impl RankOneOperator {
    pub fn new(ket: ComplexField2D, bra: ComplexField2D) -> Result<Self> {
        if !ket.grid().same_as(bra.grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { ket, bra })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn diagonal(psi: ComplexField2D) -> Self {
        Self { bra: psi.clone(), ket: psi }
    }

    /// `|λ⟩⟨χ|`, the adjoint.
    pub fn adjoint(&self) -> Self {
        Self { ket: self.bra.clone(), bra: self.ket.clone() }
    }

    pub fn grid(&self) -> &Grid2D {
        self.ket.grid()
    }
}

/// Coordinates a Wigner field is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    /// Orbit coordinates `(k1*, k2*, k3*, k4*)`.
    Orbit,
    /// Noncommutative `(q1nc, q2nc, p1nc, p2nc)`.
    Nc,
    /// Ordinary phase space `(q1, q2, p1, p2)`.
    Phase,
}

impl Chart {
    pub fn axis_names(&self) -> [&'static str; 4] {
        match self {
            Chart::Orbit => ["k1s", "k2s", "k3s", "k4s"],
            Chart::Nc | Chart::Phase => ["q1", "q2", "p1", "p2"],
        }
    }

    pub fn axis_index(&self, name: &str) -> Option<usize> {
        self.axis_names().iter().position(|n| *n == name)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Chart::Orbit => "orbit",
            Chart::Nc => "nc",
            Chart::Phase => "phase",
        }
    }
}

/// Where a transform is evaluated.
#[derive(Clone, Debug, PartialEq)]
pub enum Probes {
    /// An arbitrary list of 4-vectors.
    Points(Vec<[f64; 4]>),
    /// A 2D grid over coordinates `axes`, the other two held at `fixed`.
    Slice { grid: Grid2D, axes: [usize; 2], fixed: [f64; 4] },
    /// A full 4D tensor grid, axis 0 fastest.
    Full([Grid1D; 4]),
}

impl Probes {
    pub fn slice(grid: Grid2D, axes: [usize; 2], fixed: [f64; 4]) -> Result<Self> {
        if axes[0] == axes[1] || axes[0] > 3 || axes[1] > 3 {
            return Err(Error::InvalidGrid(format!("invalid slice axes {axes:?}")));
        }
        Ok(Probes::Slice { grid, axes, fixed })
    }

    pub fn full(axes: [Grid1D; 4]) -> Result<Self> {
        Self::full_capped(axes, MAX_FULL_AXIS)
    }

    pub fn full_capped(axes: [Grid1D; 4], cap: usize) -> Result<Self> {
        if let Some(a) = axes.iter().find(|a| a.n > cap) {
            return Err(Error::GridTooLarge(format!("4D axis with {} samples exceeds the cap {cap}", a.n)));
        }
        Ok(Probes::Full(axes))
    }

    pub fn len(&self) -> usize {
        match self {
            Probes::Points(p) => p.len(),
            Probes::Slice { grid, .. } => grid.len(),
            Probes::Full(a) => a.iter().map(|g| g.n).product(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> [f64; 4] {
        match self {
            Probes::Points(p) => p[i],
            Probes::Slice { grid, axes, fixed } => {
                let mut x = *fixed;
                let (i0, i1) = (i % grid.axis0.n, i / grid.axis0.n);
                x[axes[0]] = grid.axis0.coord(i0);
                x[axes[1]] = grid.axis1.coord(i1);
                x
            }
            Probes::Full(a) => {
                let mut rest = i;
                let mut x = [0.0; 4];
                for (k, ax) in a.iter().enumerate() {
                    x[k] = ax.coord(rest % ax.n);
                    rest /= ax.n;
                }
                x
            }
        }
    }

    pub fn points(&self) -> Vec<[f64; 4]> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Same structure with every point mapped by `f` (grids become a point list
    /// unless `f` is the identity on the structure).
    fn mapped(&self, f: impl Fn([f64; 4]) -> [f64; 4]) -> Vec<[f64; 4]> {
        (0..self.len()).map(|i| f(self.point(i))).collect()
    }
}

/// Samples of a Wigner function together with where they were taken.
#[derive(Clone, Debug)]
pub struct WignerField {
    pub chart: Chart,
    pub probes: Probes,
    values: Vec<Complex64>,
    pub label: Option<OrbitLabel>,
    pub params: Option<NCParams>,
}

impl WignerField {
    pub fn new(chart: Chart, probes: Probes, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != probes.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} probe points",
                values.len(),
                probes.len()
            )));
        }
        Ok(Self { chart, probes, values, label: None, params: None })
    }

    pub fn from_fn(chart: Chart, probes: Probes, f: impl Fn([f64; 4]) -> Complex64) -> Self {
        let values = (0..probes.len()).map(|i| f(probes.point(i))).collect();
        Self { chart, probes, values, label: None, params: None }
    }

    pub fn with_label(mut self, label: OrbitLabel) -> Self {
        self.params = Some(nc_params_from_label(&label));
        self.label = Some(label);
        self
    }

    pub fn with_params(mut self, params: NCParams) -> Self {
        self.params = Some(params);
        self
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// A 2D slice as a plain field over its grid.
    pub fn slice_field(&self) -> Option<ComplexField2D> {
        match &self.probes {
            Probes::Slice { grid, .. } => Some(ComplexField2D::from_parts_unchecked(
                *grid,
                self.values.clone(),
                Representation::Position,
            )),
            _ => None,
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { values: self.values.iter().map(|&v| f(v)).collect(), ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Chirp-z transforms over tensor groups of probe points.
    #[default]
    Fft,
    /// Explicit exponential sums.
    Direct,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fft" => Ok(Method::Fft),
            "direct" => Ok(Method::Direct),
            o => Err(Error::Parse(format!("unknown method `{o}` (fft|direct)"))),
        }
    }
}

/// One probe point as seen by the engine.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Term {
    pub a: [f64; 2],
    pub c: [f64; 2],
}

pub(crate) fn check_tails(f: &ComplexField2D) -> Result<()> {
    f.check_tails(TAIL_TOLERANCE)
}

/// `pref · Σ_s e^{i a·s} conj λ(c + s/2) χ(c − s/2) Δs²` for every term.
pub(crate) fn kernel_transform(
    op: &RankOneOperator,
    terms: &[Term],
    pref: f64,
    method: Method,
) -> Result<Vec<Complex64>> {
    let grid = *op.grid();
    check_tails(&op.ket)?;
    check_tails(&op.bra)?;
    let ds = [2.0 * grid.axis0.step, 2.0 * grid.axis1.step];
    for t in terms {
        for i in 0..2 {
            if !(t.a[i].is_finite() && t.c[i].is_finite()) {
                return Err(Error::NonFinite("probe point"));
            }
            if t.a[i].abs() * ds[i] > PI {
                return Err(Error::GridTooCoarse(format!(
                    "frequency {:.6e} on axis {i} exceeds the Nyquist limit {:.6e} of the state grid",
                    t.a[i],
                    PI / ds[i]
                )));
            }
        }
    }

    let mut order: Vec<[f64; 2]> = Vec::new();
    let mut members: HashMap<[u64; 2], Vec<usize>> = HashMap::new();
    for (i, t) in terms.iter().enumerate() {
        let key = [t.c[0].to_bits(), t.c[1].to_bits()];
        members
            .entry(key)
            .or_insert_with(|| {
                order.push(t.c);
                Vec::new()
            })
            .push(i);
    }

    let scale = pref * ds[0] * ds[1];
    let results: Vec<Vec<(usize, Complex64)>> = order
        .par_iter()
        .map(|c| {
            let idx = &members[&[c[0].to_bits(), c[1].to_bits()]];
            let product = product_field(op, *c);
            let group: Vec<[f64; 2]> = idx.iter().map(|&i| terms[i].a).collect();
            let sums = phase_sums(&product, &grid, &group, method);
            idx.iter().zip(sums).map(|(&i, v)| (i, v * scale)).collect()
        })
        .collect();

    let mut out = vec![Complex64::default(); terms.len()];
    for group in results {
        for (i, v) in group {
            out[i] = v;
        }
    }
    Ok(out)
}

/// `conj λ(c + u_m) · χ(c − u_m)` on the node offsets `u_m = (m − n/2)h`.
fn product_field(op: &RankOneOperator, c: [f64; 2]) -> Vec<Complex64> {
    let g = op.grid();
    let xref = [
        g.axis0.coord(g.axis0.center_index()),
        g.axis1.coord(g.axis1.center_index()),
    ];
    let bra = fractional_shift(&op.bra, c[0] - xref[0], c[1] - xref[1]);
    let ket = reflect(&op.ket, 0.5 * (c[0] + xref[0]), 0.5 * (c[1] + xref[1]));
    bra.values().iter().zip(ket.values()).map(|(b, k)| b.conj() * k).collect()
}

/// Sample positions `s_m = 2(m − n/2)h` of the integration variable.
fn s_axis(ax: &Grid1D) -> (f64, f64) {
    (-2.0 * ax.center_index() as f64 * ax.step, 2.0 * ax.step)
}

fn unique_in_order(xs: impl Iterator<Item = f64>) -> (Vec<f64>, HashMap<u64, usize>) {
    let mut vals = Vec::new();
    let mut pos = HashMap::new();
    for x in xs {
        pos.entry(x.to_bits()).or_insert_with(|| {
            vals.push(x);
            vals.len() - 1
        });
    }
    (vals, pos)
}

/// Start and spacing when `v` (in its given order) is an arithmetic progression.
fn arithmetic(v: &[f64]) -> Option<(f64, f64)> {
    if v.len() == 1 {
        return Some((v[0], 0.0));
    }
    let d = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
    let tol = 1e-12 * (v[0].abs() + v[v.len() - 1].abs()).max(d.abs());
    v.iter()
        .enumerate()
        .all(|(k, &x)| (x - (v[0] + k as f64 * d)).abs() <= tol)
        .then_some((v[0], d))
}

fn phase_sums(p: &[Complex64], grid: &Grid2D, a: &[[f64; 2]], method: Method) -> Vec<Complex64> {
    let (n0, n1) = (grid.axis0.n, grid.axis1.n);
    let (s0, ds0) = s_axis(&grid.axis0);
    let (s1, ds1) = s_axis(&grid.axis1);
    let (u0, pos0) = unique_in_order(a.iter().map(|x| x[0]));
    let (u1, pos1) = unique_in_order(a.iter().map(|x| x[1]));
    let tensor = u0.len() * u1.len() == a.len() && {
        let mut seen = vec![false; a.len()];
        a.iter().all(|x| {
            let k = pos0[&x[0].to_bits()] + u0.len() * pos1[&x[1].to_bits()];
            !std::mem::replace(&mut seen[k], true)
        })
    };

    if !tensor {
        return a
            .iter()
            .map(|x| {
                let e0: Vec<Complex64> = (0..n0).map(|m| cis(x[0] * (s0 + m as f64 * ds0))).collect();
                let mut total = Complex64::default();
                for m1 in 0..n1 {
                    let row = &p[m1 * n0..(m1 + 1) * n0];
                    let r: Complex64 = row.iter().zip(&e0).map(|(v, e)| v * e).sum();
                    total += r * cis(x[1] * (s1 + m1 as f64 * ds1));
                }
                total
            })
            .collect();
    }

    let (m0, m1) = (u0.len(), u1.len());
    // q[k0 + m0·j1] = Σ_{j0} e^{i u0[k0] s_{j0}} p[j0, j1]
    let mut q = vec![Complex64::default(); m0 * n1];
    let fft0 = if method == Method::Fft { arithmetic(&u0) } else { None };
    let fft1 = if method == Method::Fft { arithmetic(&u1) } else { None };
    let e0: Vec<Vec<Complex64>> = if fft0.is_none() {
        u0.iter().map(|&w| (0..n0).map(|j| cis(w * (s0 + j as f64 * ds0))).collect()).collect()
    } else {
        Vec::new()
    };
    for j1 in 0..n1 {
        let row = &p[j1 * n0..(j1 + 1) * n0];
        match fft0 {
            Some((w0, dw)) => {
                let y = czt(row, s0, ds0, w0, dw, m0);
                q[j1 * m0..(j1 + 1) * m0].copy_from_slice(&y);
            }
            None => {
                for (k0, e) in e0.iter().enumerate() {
                    q[k0 + m0 * j1] = row.iter().zip(e).map(|(v, e)| v * e).sum();
                }
            }
        }
    }
    // r[k0 + m0·k1] = Σ_{j1} e^{i u1[k1] s_{j1}} q[k0, j1]
    let mut r = vec![Complex64::default(); m0 * m1];
    let e1: Vec<Vec<Complex64>> = if fft1.is_none() {
        u1.iter().map(|&w| (0..n1).map(|j| cis(w * (s1 + j as f64 * ds1))).collect()).collect()
    } else {
        Vec::new()
    };
    for k0 in 0..m0 {
        let col: Vec<Complex64> = (0..n1).map(|j1| q[k0 + m0 * j1]).collect();
        match fft1 {
            Some((w1, dw)) => {
                for (k1, y) in czt(&col, s1, ds1, w1, dw, m1).into_iter().enumerate() {
                    r[k0 + m0 * k1] = y;
                }
            }
            None => {
                for (k1, e) in e1.iter().enumerate() {
                    r[k0 + m0 * k1] = col.iter().zip(e).map(|(v, e)| v * e).sum();
                }
            }
        }
    }
    a.iter()
        .map(|x| r[pos0[&x[0].to_bits()] + m0 * pos1[&x[1].to_bits()]])
        .collect()
}

#[inline]
fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

fn finish(chart: Chart, probes: &Probes, values: Vec<Complex64>) -> WignerField {
    WignerField { chart, probes: probes.clone(), values, label: None, params: None }
}

/// Frequency, centre and prefactor of the generic-orbit transform at `k*`.
pub(crate) fn generic_term(label: &OrbitLabel, k: [f64; 4]) -> Term {
    let a = label.consts().alpha;
    let nc = orbit_to_nc(&CoadjointPoint::from_array(k), label);
    Term {
        a: [a * nc.qnc[0], a * k[1]],
        c: [k[2] / label.k1(), nc.pnc[1] / label.k1()],
    }
}

/// Generic orbits `k2, k3 ≠ 0`, over orbit coordinates. `op` is in the
/// momentum representation `(s1, s2)`.
pub fn wigner_generic(
    op: &RankOneOperator,
    probes: &Probes,
    label: &OrbitLabel,
    method: Method,
) -> Result<WignerField> {
    label.require(Sector::Generic)?;
    let terms: Vec<Term> = probes.points().into_iter().map(|k| generic_term(label, k)).collect();
    let pref = label.consts().alpha.abs() / (2.0 * PI * label.discriminant().abs().sqrt());
    let v = kernel_transform(op, &terms, pref, method)?;
    Ok(finish(Chart::Orbit, probes, v).with_label(*label))
}

/// Orbits with `k3 = 0`, over orbit coordinates.
pub fn wigner_tau0(
    op: &RankOneOperator,
    probes: &Probes,
    label: &OrbitLabel,
    method: Method,
) -> Result<WignerField> {
    label.require(Sector::TauZero)?;
    let DimensionalConstants { alpha: a, beta: b, .. } = label.consts();
    let (k1, k2) = (label.k1(), label.k2());
    let terms: Vec<Term> = probes
        .points()
        .into_iter()
        .map(|k| Term {
            a: [a * (k[0] - k[3] * k2 * b / (k1 * a)), a * k[1]],
            c: [k[2] / k1, k[3] / k1],
        })
        .collect();
    let pref = 1.0 / ((2.0 * PI).powf(1.5) * k1.abs());
    let v = kernel_transform(op, &terms, pref, method)?;
    Ok(finish(Chart::Orbit, probes, v).with_label(*label))
}

/// Orbits with `k2 = k3 = 0`, over orbit coordinates.
pub fn wigner_qm_orbit(
    op: &RankOneOperator,
    probes: &Probes,
    label: &OrbitLabel,
    method: Method,
) -> Result<WignerField> {
    label.require(Sector::SigmaTauZero)?;
    let a = label.consts().alpha;
    let k1 = label.k1();
    let terms: Vec<Term> = probes
        .points()
        .into_iter()
        .map(|k| Term { a: [a * k[0], a * k[1]], c: [k[2] / k1, k[3] / k1] })
        .collect();
    let pref = 1.0 / ((2.0 * PI).powi(2) * k1.abs());
    let v = kernel_transform(op, &terms, pref, method)?;
    Ok(finish(Chart::Orbit, probes, v).with_label(*label))
}

/// Dispatches on the sector of `label` to the matching orbit-coordinate transform.
pub fn wigner_orbit(
    op: &RankOneOperator,
    probes: &Probes,
    label: &OrbitLabel,
    method: Method,
) -> Result<WignerField> {
    match label.sector() {
        Sector::Generic => wigner_generic(op, probes, label, method),
        Sector::TauZero => wigner_tau0(op, probes, label, method),
        Sector::SigmaTauZero => wigner_qm_orbit(op, probes, label, method),
    }
}

/// `|k1α|³ / ((2π)² √|D|)`, the prefactor of the noncommutative Wigner function.
pub fn nc_prefactor(label: &OrbitLabel) -> f64 {
    let k1a = (label.k1() * label.consts().alpha).abs();
    k1a.powi(3) / ((2.0 * PI).powi(2) * label.discriminant().abs().sqrt())
}

fn nc_momentum_terms(label: &OrbitLabel, pts: &[[f64; 4]]) -> Vec<Term> {
    let k1a = label.k1() * label.consts().alpha;
    pts.iter()
        .map(|x| Term { a: [-k1a * x[0], -k1a * x[1]], c: [x[2], x[3]] })
        .collect()
}

/// The noncommutative Wigner function `𝒲nc(q^nc, p^nc)` of a momentum
/// representation operator, evaluated natively from its `s`-integral.
///
/// Defined for every sector; with `k2 = k3 = 0` it is the ordinary Wigner
/// function with `ħ = 1/(k1α)`.
pub fn wigner_nc(
    op: &RankOneOperator,
    probes: &Probes,
    label: &OrbitLabel,
    method: Method,
) -> Result<WignerField> {
    let terms = nc_momentum_terms(label, &probes.points());
    let v = kernel_transform(op, &terms, nc_prefactor(label), method)?;
    Ok(finish(Chart::Nc, probes, v).with_label(*label))
}

/// [`wigner_nc`] evaluated at orbit coordinates, i.e. at `q^nc, p^nc` given by
/// the coordinate map of the label.
pub fn wigner_nc_orbit(
    op: &RankOneOperator,
    probes: &Probes,
    label: &OrbitLabel,
    method: Method,
) -> Result<WignerField> {
    let pts = probes.mapped(|k| orbit_to_nc(&CoadjointPoint::from_array(k), label).to_array());
    let terms = nc_momentum_terms(label, &pts);
    let v = kernel_transform(op, &terms, nc_prefactor(label), method)?;
    Ok(finish(Chart::Orbit, probes, v).with_label(*label))
}

/// `𝒲nc` from position-representation fields: the ket `op.ket = φ` enters at
/// `q − r/2`, the conjugated bra `op.bra = ψ` at `q + r/2`.
pub fn wigner_nc_position(
    op: &RankOneOperator,
    probes: &Probes,
    label: &OrbitLabel,
    method: Method,
) -> Result<WignerField> {
    let k1a = label.k1() * label.consts().alpha;
    let terms: Vec<Term> = probes
        .points()
        .into_iter()
        .map(|x| Term { a: [k1a * x[2], k1a * x[3]], c: [x[0], x[1]] })
        .collect();
    let v = kernel_transform(op, &terms, nc_prefactor(label), method)?;
    Ok(finish(Chart::Nc, probes, v).with_label(*label))
}

/// Frequency and centre of the parameter form at `k*`.
pub(crate) fn params_term(p: &NCParams, delta: f64, k: [f64; 4]) -> Term {
    let NCParams { hbar: h, vartheta: t, bfield: b } = *p;
    Term {
        a: [k[2] / h, (h * k[3] + b * k[0]) / delta],
        c: [(h * h * k[0] + h * t * k[3]) / delta, k[1]],
    }
}

/// `1 / (4π² |ħ| √|ħ² − 𝓑ϑ|)`.
pub fn params_prefactor(p: &NCParams) -> Result<f64> {
    let d = p.require_nondegenerate()?;
    Ok(1.0 / (4.0 * PI * PI * p.hbar.abs() * d.abs().sqrt()))
}

/// `𝒲nc` over orbit coordinates written with `(ħ, ϑ, 𝓑)`; position
/// representation fields as in [`wigner_nc_position`].
pub fn wigner_nc_params(
    op: &RankOneOperator,
    probes: &Probes,
    params: &NCParams,
    method: Method,
) -> Result<WignerField> {
    let pref = params_prefactor(params)?;
    let d = params.delta();
    let terms: Vec<Term> = probes.points().into_iter().map(|k| params_term(params, d, k)).collect();
    let v = kernel_transform(op, &terms, pref, method)?;
    Ok(finish(Chart::Orbit, probes, v).with_params(*params))
}

/// The textbook cross-Wigner function of `|φ⟩⟨ψ|` in two dimensions,
/// `h^{-2} ∫ conj ψ(q − x/2) e^{−2πi x·p/h} φ(q + x/2) dx`, with
/// `op.ket = φ`, `op.bra = ψ` in the position representation.
pub fn cross_wigner_standard(
    op: &RankOneOperator,
    probes: &Probes,
    h: f64,
    method: Method,
) -> Result<WignerField> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::DegenerateParams(format!("h must be positive, got {h}")));
    }
    let terms: Vec<Term> = probes
        .points()
        .into_iter()
        .map(|x| Term { a: [2.0 * PI * x[2] / h, 2.0 * PI * x[3] / h], c: [x[0], x[1]] })
        .collect();
    let v = kernel_transform(op, &terms, 1.0 / (h * h), method)?;
    Ok(finish(Chart::Phase, probes, v))
}

/// Maps an orbit point of the `k2 = k3 = 0` sector to the ordinary phase-space
/// point and Planck constant at which [`cross_wigner_standard`] of the
/// position-space states reproduces [`wigner_qm_orbit`]:
/// `q = −(k1*, k2*)/k1`, `p = (k3*, k4*)/k1`, `h = 2π/(k1α)`, and
/// `W_orbit = W_standard / (|k1|³ α²)`. Requires `k1α > 0`.
pub fn qm_convention_map(label: &OrbitLabel, k: [f64; 4]) -> Result<([f64; 4], f64, f64)> {
    let k1 = label.k1();
    let a = label.consts().alpha;
    if k1 * a <= 0.0 {
        return Err(Error::DegenerateParams("the standard form needs k1 alpha > 0".into()));
    }
    let x = [-k[0] / k1, -k[1] / k1, k[2] / k1, k[3] / k1];
    Ok((x, 2.0 * PI / (k1 * a), 1.0 / (k1.abs().powi(3) * a * a)))
}

/// The momentum-representation state of a position-space state on the orbit
/// with `ħ = 1/(k1α)`: `ψ̂(s) = (|k1α|/2π) ∫ ψ(x) e^{−ik1α s·x} dx`.
pub fn to_momentum(psi: &ComplexField2D, label: &OrbitLabel) -> Result<ComplexField2D> {
    let mut f = crate::numerics::ft_2d_scaled(psi, -label.k1() * label.consts().alpha)?;
    f.representation = Representation::Momentum;
    Ok(f)
}

/// Inverse of [`to_momentum`].
pub fn to_position(psi_hat: &ComplexField2D, label: &OrbitLabel) -> Result<ComplexField2D> {
    let mut f = crate::numerics::ft_2d_scaled(psi_hat, label.k1() * label.consts().alpha)?;
    f.representation = Representation::Position;
    Ok(f)
}

/// Sup-norm distances between `𝒲nc` on the labels `k2 = k3 = c·ratio^{−m}`,
/// `m = 0..=m_max`, and the ordinary Wigner function with the same `ħ`, all
/// evaluated at the same orbit points.
#[allow(clippy::too_many_arguments)]
pub fn qm_limit_check(
    op: &RankOneOperator,
    k1: f64,
    consts: DimensionalConstants,
    c: f64,
    ratio: f64,
    m_max: u32,
    probes: &Probes,
    method: Method,
) -> Result<Vec<f64>> {
    let reference_label = crate::orbit::make_orbit_label(k1, 0.0, 0.0, consts)?;
    let reference = wigner_nc_orbit(op, probes, &reference_label, method)?;
    (0..=m_max)
        .map(|m| {
            let k = c * ratio.powi(-(m as i32));
            let label = crate::orbit::make_orbit_label(k1, k, k, consts)?;
            let w = wigner_nc_orbit(op, probes, &label, method)?;
            Ok(w.values()
                .iter()
                .zip(reference.values())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max))
        })
        .collect()
}

/// The Wigner function of the generic sector at `(q^nc, p^nc)` obtained from
/// [`wigner_generic`] by the rescaling `𝒲nc(q, p) = |k1|³α²/(2π) W(−k1 q, k1 p)`.
pub fn wigner_nc_via_generic(
    op: &RankOneOperator,
    probes: &Probes,
    label: &OrbitLabel,
    method: Method,
) -> Result<WignerField> {
    let k1 = label.k1();
    let a = label.consts().alpha;
    let pts = probes.mapped(|x| {
        let nc = NCCoords { qnc: [-k1 * x[0], -k1 * x[1]], pnc: [k1 * x[2], k1 * x[3]] };
        nc_to_orbit(&nc, label).to_array()
    });
    let w = wigner_generic(op, &Probes::Points(pts), label, method)?;
    let s = k1.abs().powi(3) * a * a / (2.0 * PI);
    Ok(finish(Chart::Nc, probes, w.values().iter().map(|v| v * s).collect()).with_label(*label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::make_orbit_label;

    fn gaussian(n: usize, l: f64, rep: Representation) -> ComplexField2D {
        let g = Grid2D::square_symmetric(n, l).unwrap();
        ComplexField2D::from_fn(g, rep, |x, y| {
            Complex64::new((-(x * x + y * y) / 2.0).exp() / PI.sqrt(), 0.0)
        })
    }

    #[test]
    fn zero_state_gives_zero() {
        let z = ComplexField2D::zeros(Grid2D::square_symmetric(32, 6.0).unwrap(), Representation::Momentum);
        let op = RankOneOperator::diagonal(z);
        let l = make_orbit_label(1.0, -1.0, 1.0, DimensionalConstants::unit()).unwrap();
        let pr = Probes::Points(vec![[0.1, 0.2, 0.3, 0.4]]);
        let w = wigner_generic(&op, &pr, &l, Method::Fft).unwrap();
        assert_eq!(w.values()[0], Complex64::default());
    }

    #[test]
    fn sector_is_checked() {
        let op = RankOneOperator::diagonal(gaussian(32, 8.0, Representation::Momentum));
        let l = make_orbit_label(1.0, 0.0, 0.0, DimensionalConstants::unit()).unwrap();
        let pr = Probes::Points(vec![[0.0; 4]]);
        assert!(matches!(
            wigner_generic(&op, &pr, &l, Method::Fft),
            Err(Error::SectorMismatch { .. })
        ));
        assert!(wigner_tau0(&op, &pr, &l, Method::Fft).is_err());
        assert!(wigner_qm_orbit(&op, &pr, &l, Method::Fft).is_ok());
    }

    #[test]
    fn nyquist_and_tail_guards() {
        let op = RankOneOperator::diagonal(gaussian(32, 8.0, Representation::Momentum));
        let l = make_orbit_label(1.0, 0.0, 0.0, DimensionalConstants::unit()).unwrap();
        let far = Probes::Points(vec![[100.0, 0.0, 0.0, 0.0]]);
        assert!(matches!(wigner_qm_orbit(&op, &far, &l, Method::Fft), Err(Error::GridTooCoarse(_))));
        let wide = gaussian(32, 2.0, Representation::Momentum);
        let op = RankOneOperator::diagonal(wide);
        let pr = Probes::Points(vec![[0.0; 4]]);
        assert!(matches!(
            wigner_qm_orbit(&op, &pr, &l, Method::Fft),
            Err(Error::TailNotNegligible { .. })
        ));
    }

    #[test]
    fn ground_state_closed_form() {
        // 𝒲nc of the unit Gaussian at k2 = k3 = 0, ħ = 1 is e^{-q²-p²}/π².
        let op = RankOneOperator::diagonal(gaussian(128, 10.0, Representation::Momentum));
        let l = make_orbit_label(1.0, 0.0, 0.0, DimensionalConstants::unit()).unwrap();
        let g = Grid2D::square_symmetric(16, 3.0).unwrap();
        let pr = Probes::slice(g, [0, 2], [0.0, 0.25, 0.0, -0.5]).unwrap();
        let w = wigner_nc(&op, &pr, &l, Method::Fft).unwrap();
        for (i, v) in w.values().iter().enumerate() {
            let x = pr.point(i);
            let want = (-(x.iter().map(|t| t * t).sum::<f64>())).exp() / (PI * PI);
            assert!((v - want).norm() < 1e-12, "{x:?} {v} {want}");
        }
    }

    #[test]
    fn fft_and_direct_agree_on_slices() {
        let g = Grid2D::square_symmetric(64, 9.0).unwrap();
        let psi = ComplexField2D::from_fn(g, Representation::Momentum, |x, y| {
            Complex64::new(1.0 + x, 0.5 * y) * (-((x - 0.3).powi(2) + y * y) / 2.0).exp()
        });
        let op = RankOneOperator::diagonal(psi);
        let l = make_orbit_label(1.0, -1.0, 1.0, DimensionalConstants::unit()).unwrap();
        let pg = Grid2D::square_symmetric(16, 3.0).unwrap();
        for axes in [[0, 1], [2, 3], [0, 3]] {
            let pr = Probes::slice(pg, axes, [0.2, -0.1, 0.3, 0.15]).unwrap();
            let a = wigner_generic(&op, &pr, &l, Method::Fft).unwrap();
            let b = wigner_generic(&op, &pr, &l, Method::Direct).unwrap();
            let m = b.max_abs();
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).norm() < 1e-10 * m);
            }
        }
    }

    #[test]
    fn full_grid_cap() {
        let ax = Grid1D::symmetric(33, 1.0).unwrap();
        assert!(matches!(Probes::full([ax; 4]), Err(Error::GridTooLarge(_))));
        let ax = Grid1D::symmetric(4, 1.0).unwrap();
        let p = Probes::full([ax; 4]).unwrap();
        assert_eq!(p.len(), 256);
        assert_eq!(p.point(1 + 4 * 2), [ax.coord(1), ax.coord(2), ax.coord(0), ax.coord(0)]);
    }
}
