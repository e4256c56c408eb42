//! Marginal distributions and the kernel star products.
//!
//! The two-dimensional products `⋆_ϑ` (positions) and `⋆_𝓑` (momenta) act on
//! fields over a plane; `⋆_ħ` and the combined `⋆_{ħ,ϑ,𝓑}` act on small 4D
//! node grids. All kernels carry exact quadratic phases and are integrated by
//! the trapezoid rule, guarded so the phase changes by less than π/2 per cell
//! wherever the integrand is not negligible.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, Grid1D, Grid2D, Representation};
use crate::numerics::{fractional_shift, reflect_axis, weights, Rule};
use crate::orbit::{NCParams, OrbitLabel};
use crate::wigner::{check_tails, wigner_nc, wigner_nc_position, Chart, Method, Probes, RankOneOperator, WignerField};

/// Largest per-axis size for 4D star products.
pub const MAX_STAR_AXIS: usize = 16;

/// Integrand level (relative to its peak) below which the phase guard ignores a node.
const SUPPORT_LEVEL: f64 = 1e-12;

/// `|k1α| / √|k1²α² − k2k3βγ|`, the factor in front of both marginals.
pub fn marginal_prefactor(label: &OrbitLabel) -> f64 {
    (label.k1() * label.consts().alpha).abs() / label.discriminant().abs().sqrt()
}

fn full_axes(w: &WignerField) -> Result<[Grid1D; 4]> {
    match &w.probes {
        Probes::Full(a) => Ok(*a),
        _ => Err(Error::InvalidGrid("a full 4D field is required".into())),
    }
}

fn integrate_pair(w: &WignerField, keep: [usize; 2]) -> Result<ComplexField2D> {
    if w.chart != Chart::Nc {
        return Err(Error::InvalidGrid("marginals are taken over noncommutative coordinates".into()));
    }
    let axes = full_axes(w)?;
    let drop: Vec<usize> = (0..4).filter(|k| !keep.contains(k)).collect();
    let wt: Vec<Vec<f64>> = axes.iter().map(|a| weights(a.n, a.step, Rule::Trapezoid)).collect();
    let out_grid = Grid2D::new(axes[keep[0]], axes[keep[1]]);
    let mut out = vec![Complex64::default(); out_grid.len()];
    let mut idx = [0usize; 4];
    for (flat, v) in w.values().iter().enumerate() {
        let mut rest = flat;
        for (k, a) in axes.iter().enumerate() {
            idx[k] = rest % a.n;
            rest /= a.n;
        }
        let weight = wt[drop[0]][idx[drop[0]]] * wt[drop[1]][idx[drop[1]]];
        out[idx[keep[0]] + out_grid.axis0.n * idx[keep[1]]] += v * weight;
    }
    Ok(ComplexField2D::from_parts_unchecked(out_grid, out, Representation::Momentum))
}

/// `∫ 𝒲nc dq^nc` of a full 4D field over `(q^nc, p^nc)`, as a field over `p^nc`.
pub fn marginal_momentum(w: &WignerField) -> Result<ComplexField2D> {
    integrate_pair(w, [2, 3])
}

/// `∫ 𝒲nc dp^nc` of a full 4D field over `(q^nc, p^nc)`, as a field over `q^nc`.
pub fn marginal_position(w: &WignerField) -> Result<ComplexField2D> {
    let mut f = integrate_pair(w, [0, 1])?;
    f.representation = Representation::Position;
    Ok(f)
}

/// Computes `𝒲nc` of a momentum-representation operator on `q_axes × p_grid`
/// and integrates out `q^nc`.
pub fn marginal_momentum_of(
    op: &RankOneOperator,
    label: &OrbitLabel,
    q_axes: [Grid1D; 2],
    p_grid: &Grid2D,
    method: Method,
) -> Result<ComplexField2D> {
    let probes = Probes::full([q_axes[0], q_axes[1], p_grid.axis0, p_grid.axis1])?;
    marginal_momentum(&wigner_nc(op, &probes, label, method)?)
}

/// Computes `𝒲nc` of a position-representation operator on `q_grid × p_axes`
/// and integrates out `p^nc`.
pub fn marginal_position_of(
    op: &RankOneOperator,
    label: &OrbitLabel,
    q_grid: &Grid2D,
    p_axes: [Grid1D; 2],
    method: Method,
) -> Result<ComplexField2D> {
    let probes = Probes::full([q_grid.axis0, q_grid.axis1, p_axes[0], p_axes[1]])?;
    marginal_position(&wigner_nc_position(op, &probes, label, method)?)
}

fn check_pair(f: &ComplexField2D, g: &ComplexField2D) -> Result<()> {
    if !f.grid().same_as(g.grid()) {
        return Err(Error::GridMismatch);
    }
    check_tails(f)?;
    check_tails(g)
}

/// Shared body of `⋆_ϑ` and `⋆_𝓑`:
/// `pref Σ e^{i κ (x0 − k0)(x1 − k1)} f(x) g_reflected(x) h0 h1`.
fn planar_star(
    f: &ComplexField2D,
    g: &ComplexField2D,
    out: &Grid2D,
    reflect_along: usize,
    kappa: f64,
    pref: f64,
) -> Result<ComplexField2D> {
    check_pair(f, g)?;
    let grid = *f.grid();
    let (n0, n1) = (grid.axis0.n, grid.axis1.n);
    let w0 = weights(n0, grid.axis0.step, Rule::Trapezoid);
    let w1 = weights(n1, grid.axis1.step, Rule::Trapezoid);
    let x0 = grid.axis0.coords();
    let x1 = grid.axis1.coords();

    // one reflected copy of g per distinct output coordinate along the reflected axis
    let out_ax = out.axis(reflect_along);
    let copies: Vec<ComplexField2D> = (0..out_ax.n)
        .into_par_iter()
        .map(|i| reflect_axis(g, reflect_along, out_ax.coord(i)))
        .collect();

    let values: Result<Vec<Complex64>> = (0..out.len())
        .into_par_iter()
        .map(|k| {
            let (i0, i1) = (k % out.axis0.n, k / out.axis0.n);
            let (k0, k1) = out.coord(i0, i1);
            let gr = &copies[if reflect_along == 0 { i0 } else { i1 }];
            let prod: Vec<Complex64> = f.values().iter().zip(gr.values()).map(|(a, b)| a * b).collect();
            let peak = prod.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if peak == 0.0 {
                return Ok(Complex64::default());
            }
            let cut = SUPPORT_LEVEL * peak;
            let mut worst = 0.0f64;
            let mut total = Complex64::default();
            for j1 in 0..n1 {
                let d1 = x1[j1] - k1;
                let mut row = Complex64::default();
                for j0 in 0..n0 {
                    let v = prod[j0 + n0 * j1];
                    if v.norm() <= cut {
                        continue;
                    }
                    let d0 = x0[j0] - k0;
                    worst = worst
                        .max((kappa * d1).abs() * grid.axis0.step)
                        .max((kappa * d0).abs() * grid.axis1.step);
                    row += v * Complex64::from_polar(w0[j0], kappa * d0 * d1);
                }
                total += row * w1[j1];
            }
            if worst >= 0.5 * PI {
                return Err(Error::GridTooCoarse(format!(
                    "star-product phase changes by {worst:.3} rad per cell at output ({k0}, {k1}); limit is pi/2"
                )));
            }
            Ok(total * pref)
        })
        .collect();
    Ok(ComplexField2D::from_parts_unchecked(*out, values?, f.representation))
}

/// `f ⋆_ϑ g` over positions `(k1*, k2*)` on the output grid `out`:
/// `√|ħ²−𝓑ϑ|/(π|ħϑ|) ∫ e^{(2i/ϑ)(η1−k1*)(η2−k2*)} f(η1, η2) g(η1, 2k2*−η2) dη`.
pub fn star_vartheta(
    f: &ComplexField2D,
    g: &ComplexField2D,
    params: &NCParams,
    out: &Grid2D,
) -> Result<ComplexField2D> {
    if params.vartheta == 0.0 {
        return Err(Error::Singular("vartheta = 0 makes the star_vartheta kernel singular".into()));
    }
    let d = params.require_nondegenerate()?;
    let pref = d.abs().sqrt() / (PI * (params.hbar * params.vartheta).abs());
    planar_star(f, g, out, 1, 2.0 / params.vartheta, pref)
}

/// `f ⋆_𝓑 g` over momenta `(k3*, k4*)` on the output grid `out`:
/// `√|ħ²−𝓑ϑ|/(π|ħ𝓑|) ∫ e^{−(2i/𝓑)(ξ1−k3*)(ξ2−k4*)} f(ξ1, ξ2) g(2k3*−ξ1, ξ2) dξ`.
pub fn star_b(
    f: &ComplexField2D,
    g: &ComplexField2D,
    params: &NCParams,
    out: &Grid2D,
) -> Result<ComplexField2D> {
    if params.bfield == 0.0 {
        return Err(Error::Singular("B = 0 makes the star_B kernel singular".into()));
    }
    let d = params.require_nondegenerate()?;
    let pref = d.abs().sqrt() / (PI * (params.hbar * params.bfield).abs());
    planar_star(f, g, out, 0, -2.0 / params.bfield, pref)
}

/// Which 4D kernel to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel4 {
    /// `⋆_ħ`: phase `(1/ħ)(2a1a3 − 2a2a4)`.
    Hbar,
    /// `⋆_{ħ,ϑ,𝓑}`: phase `(2/Δ)(𝓑a1a2 − ħa1a3 + ħa2a4 − ϑa3a4)`.
    General,
}

/// Symmetric phase coefficients `c_ij` with `Φ = Σ_{i<j} c_ij a_i a_j`,
/// `a = (k1*−η1, k2*−η2, k3*−ξ1, k4*−ξ2)`.
pub fn phase_coefficients(kernel: Kernel4, p: &NCParams) -> Result<[[f64; 4]; 4]> {
    let mut c = [[0.0; 4]; 4];
    match kernel {
        Kernel4::Hbar => {
            c[0][2] = 2.0 / p.hbar;
            c[1][3] = -2.0 / p.hbar;
        }
        Kernel4::General => {
            let d = p.require_nondegenerate()?;
            c[0][1] = 2.0 * p.bfield / d;
            c[0][2] = -2.0 * p.hbar / d;
            c[1][3] = 2.0 * p.hbar / d;
            c[2][3] = -2.0 * p.vartheta / d;
        }
    }
    Ok(c)
}

/// The 4×4 phase matrices as printed in the kernels, before the scalar factor
/// (`1/ħ` for `⋆_ħ`, `1/Δ` for the combined product).
pub fn phase_matrix(kernel: Kernel4, p: &NCParams) -> [[f64; 4]; 4] {
    let (h, t, b) = (p.hbar, p.vartheta, p.bfield);
    match kernel {
        Kernel4::Hbar => [
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
        ],
        Kernel4::General => [
            [0.0, b, -h, 0.0],
            [-b, 0.0, 0.0, -h],
            [h, 0.0, 0.0, t],
            [0.0, h, -t, 0.0],
        ],
    }
}

fn star4(w1: &WignerField, w2: &WignerField, p: &NCParams, kernel: Kernel4) -> Result<WignerField> {
    let axes = full_axes(w1)?;
    if full_axes(w2)?.iter().zip(&axes).any(|(a, b)| !a.same_as(b)) {
        return Err(Error::GridMismatch);
    }
    if let Some(a) = axes.iter().find(|a| a.n > MAX_STAR_AXIS) {
        return Err(Error::GridTooLarge(format!(
            "4D star products are capped at {MAX_STAR_AXIS} samples per axis, got {}",
            a.n
        )));
    }
    let d = p.require_nondegenerate()?;
    let c = phase_coefficients(kernel, p)?;
    let n: [usize; 4] = [axes[0].n, axes[1].n, axes[2].n, axes[3].n];
    let h: [f64; 4] = [axes[0].step, axes[1].step, axes[2].step, axes[3].step];

    // phase change per cell over the whole grid
    let span: Vec<f64> = (0..4).map(|k| (n[k] - 1) as f64 * h[k]).collect();
    for i in 0..4 {
        let slope: f64 = (0..4).map(|j| (c[i.min(j)][i.max(j)]).abs() * span[j]).sum();
        if slope * h[i] >= 0.5 * PI {
            return Err(Error::GridTooCoarse(format!(
                "4D kernel phase changes by {:.3} rad per cell along axis {i}; limit is pi/2",
                slope * h[i]
            )));
        }
    }

    // pair tables over index differences d ∈ (−n, n)
    let table = |i: usize, j: usize| -> Vec<Complex64> {
        let (ni, nj) = (2 * n[i] - 1, 2 * n[j] - 1);
        let mut t = vec![Complex64::new(1.0, 0.0); ni * nj];
        if c[i][j] != 0.0 {
            for a in 0..ni {
                for b in 0..nj {
                    let di = (a as f64 - (n[i] - 1) as f64) * h[i];
                    let dj = (b as f64 - (n[j] - 1) as f64) * h[j];
                    t[a + ni * b] = Complex64::from_polar(1.0, c[i][j] * di * dj);
                }
            }
        }
        t
    };
    let pairs = [(0, 1), (0, 2), (1, 3), (2, 3)];
    let tables: Vec<Vec<Complex64>> = pairs.iter().map(|&(i, j)| table(i, j)).collect();

    let wt: Vec<Vec<f64>> = (0..4).map(|k| weights(n[k], h[k], Rule::Trapezoid)).collect();
    let stride = [1, n[0], n[0] * n[1], n[0] * n[1] * n[2]];
    let weighted: Vec<Complex64> = w1
        .values()
        .iter()
        .enumerate()
        .map(|(flat, v)| {
            let i = [flat % n[0], (flat / stride[1]) % n[1], (flat / stride[2]) % n[2], flat / stride[3]];
            v * wt[0][i[0]] * wt[1][i[1]] * wt[2][i[2]] * wt[3][i[3]]
        })
        .collect();
    let v2 = w2.values();
    let pref = d.abs().sqrt() / (PI * p.hbar.abs());
    let total = n.iter().product::<usize>();

    let values: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let k = [flat % n[0], (flat / stride[1]) % n[1], (flat / stride[2]) % n[2], flat / stride[3]];
            let mut acc = Complex64::default();
            for i3 in 0..n[3] {
                for i2 in 0..n[2] {
                    let r2 = 2 * k[2] as i64 - i2 as i64;
                    if r2 < 0 || r2 >= n[2] as i64 {
                        continue;
                    }
                    for i1 in 0..n[1] {
                        let r1 = 2 * k[1] as i64 - i1 as i64;
                        if r1 < 0 || r1 >= n[1] as i64 {
                            continue;
                        }
                        for i0 in 0..n[0] {
                            let a = [
                                k[0] + n[0] - 1 - i0,
                                k[1] + n[1] - 1 - i1,
                                k[2] + n[2] - 1 - i2,
                                k[3] + n[3] - 1 - i3,
                            ];
                            let ph = tables[0][a[0] + (2 * n[0] - 1) * a[1]]
                                * tables[1][a[0] + (2 * n[0] - 1) * a[2]]
                                * tables[2][a[1] + (2 * n[1] - 1) * a[3]]
                                * tables[3][a[2] + (2 * n[2] - 1) * a[3]];
                            let src = i0 * stride[0] + i1 * stride[1] + i2 * stride[2] + i3 * stride[3];
                            let refl = i0 + r1 as usize * stride[1] + r2 as usize * stride[2] + i3 * stride[3];
                            acc += ph * weighted[src] * v2[refl];
                        }
                    }
                }
            }
            acc * pref
        })
        .collect();
    let mut out = WignerField::new(w1.chart, w1.probes.clone(), values)?;
    out.label = w1.label;
    out.params = Some(*p);
    Ok(out)
}

/// `w1 ⋆_ħ w2` on a common 4D node grid (at most [`MAX_STAR_AXIS`] per axis).
pub fn star_hbar(w1: &WignerField, w2: &WignerField, params: &NCParams) -> Result<WignerField> {
    star4(w1, w2, params, Kernel4::Hbar)
}

/// `w1 ⋆_{ħ,ϑ,𝓑} w2` on a common 4D node grid.
pub fn star_general(w1: &WignerField, w2: &WignerField, params: &NCParams) -> Result<WignerField> {
    star4(w1, w2, params, Kernel4::General)
}

/// `∫∫ 𝒲nc dk3* dk4*` at the output positions `(k1*, k2*)`, for the
/// position-space state `psi` and parameters with `ϑ ≠ 0`.
///
/// The `k3*` integral is the trapezoid rule on the grid conjugate to `r1`,
/// where discrete orthogonality keeps only `r1 = 0` and yields `2π|ħ|`.
/// The `k4*` integral is the trapezoid rule on the grid that puts the centre
/// `(ħ²k1* + ħϑk4*)/Δ` on the state's axis-0 nodes, step `h0·|Δ/(ħϑ)|`.
pub fn position_marginal_canonical(
    psi: &ComplexField2D,
    params: &NCParams,
    out: &Grid2D,
) -> Result<ComplexField2D> {
    if params.vartheta == 0.0 {
        return Err(Error::Singular("the k4* substitution needs vartheta != 0".into()));
    }
    check_tails(psi)?;
    let NCParams { hbar: h, vartheta: t, bfield: b } = *params;
    let d = params.require_nondegenerate()?;
    let g = *psi.grid();
    let pref = crate::wigner::params_prefactor(params)? * 2.0 * PI * h.abs();
    let dk4 = g.axis0.step * (d / (h * t)).abs();
    let line = canonical_lines(psi, 1, out.axis1)?;
    let (n0, n1) = (g.axis0.n, g.axis1.n);
    let (s0, ds) = (-2.0 * (n1 / 2) as f64 * g.axis1.step, 2.0 * g.axis1.step);

    let values: Result<Vec<Complex64>> = (0..out.len())
        .into_par_iter()
        .map(|k| {
            let (i0, i1) = (k % out.axis0.n, k / out.axis0.n);
            let k1s = out.axis0.coord(i0);
            let rows = &line[i1];
            let mut total = Complex64::default();
            for j in 0..n0 {
                let x = g.axis0.coord(j);
                let k4s = (d * x - h * h * k1s) / (h * t);
                let a1 = (h * k4s + b * k1s) / d;
                if a1.abs() * ds > PI {
                    return Err(Error::GridTooCoarse(format!("frequency {a1:.3e} exceeds the state grid's Nyquist limit")));
                }
                let mut s = Complex64::default();
                for m in 0..n1 {
                    s += rows[j + n0 * m] * Complex64::from_polar(1.0, a1 * (s0 + m as f64 * ds));
                }
                total += s;
            }
            Ok(total * pref * dk4 * ds)
        })
        .collect();
    Ok(ComplexField2D::from_parts_unchecked(*out, values?, Representation::Position))
}

/// `∫∫ 𝒲nc dk1* dk2*` at the output momenta `(k3*, k4*)`, for the
/// momentum-space state `psi_hat` and parameters with `𝓑 ≠ 0`. Mirror of
/// [`position_marginal_canonical`] with the roles of the axes exchanged.
pub fn momentum_marginal_canonical(
    psi_hat: &ComplexField2D,
    params: &NCParams,
    out: &Grid2D,
) -> Result<ComplexField2D> {
    if params.bfield == 0.0 {
        return Err(Error::Singular("the k1* substitution needs B != 0".into()));
    }
    check_tails(psi_hat)?;
    let NCParams { hbar: h, vartheta: t, bfield: b } = *params;
    let d = params.require_nondegenerate()?;
    let g = *psi_hat.grid();
    let pref = crate::wigner::params_prefactor(params)? * 2.0 * PI * h.abs();
    let dk1 = g.axis1.step * (d / (h * b)).abs();
    let line = canonical_lines(psi_hat, 0, out.axis0)?;
    let (n0, n1) = (g.axis0.n, g.axis1.n);
    let (s0, ds) = (-2.0 * (n0 / 2) as f64 * g.axis0.step, 2.0 * g.axis0.step);

    let values: Result<Vec<Complex64>> = (0..out.len())
        .into_par_iter()
        .map(|k| {
            let (i0, i1) = (k % out.axis0.n, k / out.axis0.n);
            let k4s = out.axis1.coord(i1);
            let rows = &line[i0];
            let mut total = Complex64::default();
            for j in 0..n1 {
                let y = g.axis1.coord(j);
                let k1s = (d * y - h * h * k4s) / (h * b);
                let a0 = -(h * k1s + t * k4s) / d;
                if a0.abs() * ds > PI {
                    return Err(Error::GridTooCoarse(format!("frequency {a0:.3e} exceeds the state grid's Nyquist limit")));
                }
                let mut s = Complex64::default();
                for m in 0..n0 {
                    s += rows[m + n0 * j] * Complex64::from_polar(1.0, a0 * (s0 + m as f64 * ds));
                }
                total += s;
            }
            Ok(total * pref * dk1 * ds)
        })
        .collect();
    Ok(ComplexField2D::from_parts_unchecked(*out, values?, Representation::Momentum))
}

/// For every output coordinate `c` along `axis`, the field
/// `conj ψ(…, c + u_m) · ψ(…, c − u_m)` with `u_m` the node offsets along `axis`.
fn canonical_lines(psi: &ComplexField2D, axis: usize, centres: Grid1D) -> Result<Vec<Vec<Complex64>>> {
    let g = *psi.grid();
    let ax = *g.axis(axis);
    let xref = ax.coord(ax.center_index());
    Ok((0..centres.n)
        .into_par_iter()
        .map(|i| {
            let c = centres.coord(i);
            let (d0, d1) = if axis == 0 { (c - xref, 0.0) } else { (0.0, c - xref) };
            let plus = fractional_shift(psi, d0, d1);
            let minus = reflect_axis(psi, axis, 0.5 * (c + xref));
            plus.values().iter().zip(minus.values()).map(|(a, b)| a.conj() * b).collect()
        })
        .collect())
}
