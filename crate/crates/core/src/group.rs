//! The group law of `G_NC` and its unitary irreducible representations in the
//! Landau gauge, acting on sampled fields.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, Grid1D};
use crate::numerics::{fractional_shift, integer_steps};
use crate::orbit::{DimensionalConstants, OrbitLabel};

/// `(θ, φ, ψ, q, p)`; `θ, φ, ψ` are central.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupElement {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
    pub q: [f64; 2],
    pub p: [f64; 2],
}

impl GroupElement {
    pub fn new(theta: f64, phi: f64, psi: f64, q: [f64; 2], p: [f64; 2]) -> Self {
        Self { theta, phi, psi, q, p }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn to_array(&self) -> [f64; 7] {
        [self.theta, self.phi, self.psi, self.q[0], self.q[1], self.p[0], self.p[1]]
    }
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn wedge(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn group_multiply(g: &GroupElement, h: &GroupElement, c: &DimensionalConstants) -> GroupElement {
    GroupElement {
        theta: g.theta + h.theta + 0.5 * c.alpha * (dot(g.q, h.p) - dot(g.p, h.q)),
        phi: g.phi + h.phi + 0.5 * c.beta * wedge(g.p, h.p),
        psi: g.psi + h.psi + 0.5 * c.gamma * wedge(g.q, h.q),
        q: [g.q[0] + h.q[0], g.q[1] + h.q[1]],
        p: [g.p[0] + h.p[0], g.p[1] + h.p[1]],
    }
}

pub fn group_inverse(g: &GroupElement) -> GroupElement {
    GroupElement {
        theta: -g.theta,
        phi: -g.phi,
        psi: -g.psi,
        q: [-g.q[0], -g.q[1]],
        p: [-g.p[0], -g.p[1]],
    }
}

/// How translations of the field argument are realised on the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ShiftMode {
    /// Shifts must be whole multiples of the step (within 1e-9 steps).
    #[default]
    Integer,
    /// Arbitrary shifts by Fourier phases; the field must be band-limited.
    Fractional,
}

fn check_shift(axis: usize, d: f64, ax: &Grid1D, mode: ShiftMode) -> Result<()> {
    if mode == ShiftMode::Integer && integer_steps(d, ax.step).is_none() {
        return Err(Error::ShiftOffGrid { axis, shift: d, step: ax.step });
    }
    Ok(())
}

fn shifted(f: &ComplexField2D, d0: f64, d1: f64, mode: ShiftMode) -> Result<ComplexField2D> {
    let g = f.grid();
    check_shift(0, d0, &g.axis0, mode)?;
    check_shift(1, d1, &g.axis1, mode)?;
    Ok(fractional_shift(f, d0, d1))
}

/// The representation on `L²(dr1 ds2)`:
/// `(U(g)f)(r1, s2) = e^{iρ(θ + αq2s2 + αp1r1 + α/2 q1p1 − α/2 q2p2)}
///  e^{iσ(φ + βp1s2 − β/2 p1p2)} e^{iτ(ψ + γq2r1 + γ/2 q2q1)} f(r1 + q1, s2 − p2)`.
pub fn uir_apply(
    g: &GroupElement,
    f: &ComplexField2D,
    label: &OrbitLabel,
    mode: ShiftMode,
) -> Result<ComplexField2D> {
    let (rho, sigma, tau) = (label.k1(), label.k2(), label.k3());
    let DimensionalConstants { alpha: a, beta: b, gamma: c } = label.consts();
    let [q1, q2] = g.q;
    let [p1, p2] = g.p;
    let moved = shifted(f, q1, -p2, mode)?;
    let constant = rho * (g.theta + 0.5 * a * q1 * p1 - 0.5 * a * q2 * p2)
        + sigma * (g.phi - 0.5 * b * p1 * p2)
        + tau * (g.psi + 0.5 * c * q2 * q1);
    let k_r1 = rho * a * p1 + tau * c * q2;
    let k_s2 = rho * a * q2 + sigma * b * p1;
    let grid = *moved.grid();
    let vals = moved
        .values()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let (r1, s2) = grid.coord(k % grid.axis0.n, k / grid.axis0.n);
            v * Complex64::from_polar(1.0, constant + k_r1 * r1 + k_s2 * s2)
        })
        .collect();
    Ok(ComplexField2D::from_parts_unchecked(grid, vals, f.representation))
}

/// The Fourier-transformed representation on `L²(ds1 ds2)`:
/// `(Û(g)f̂)(s1, s2) = e^{−iρ(θ + αq1s1 + αq2s2 − α/2 q1p1 − α/2 q2p2)}
///  e^{−iσ(φ + βp1s2 − β/2 p1p2)} e^{−iτ(ψ − γ/2 q1q2)} f̂(s1 − p1 − τγ/(ρα) q2, s2 − p2)`.
pub fn uir_apply_ft(
    g: &GroupElement,
    fhat: &ComplexField2D,
    label: &OrbitLabel,
    mode: ShiftMode,
) -> Result<ComplexField2D> {
    let (rho, sigma, tau) = (label.k1(), label.k2(), label.k3());
    let DimensionalConstants { alpha: a, beta: b, gamma: c } = label.consts();
    let [q1, q2] = g.q;
    let [p1, p2] = g.p;
    let d0 = -p1 - tau * c / (rho * a) * q2;
    let moved = shifted(fhat, d0, -p2, mode)?;
    let constant = -rho * (g.theta - 0.5 * a * q1 * p1 - 0.5 * a * q2 * p2)
        - sigma * (g.phi - 0.5 * b * p1 * p2)
        - tau * (g.psi - 0.5 * c * q1 * q2);
    let k_s1 = -rho * a * q1;
    let k_s2 = -rho * a * q2 - sigma * b * p1;
    let grid = *moved.grid();
    let vals = moved
        .values()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let (s1, s2) = grid.coord(k % grid.axis0.n, k / grid.axis0.n);
            v * Complex64::from_polar(1.0, constant + k_s1 * s1 + k_s2 * s2)
        })
        .collect();
    Ok(ComplexField2D::from_parts_unchecked(grid, vals, fhat.representation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid2D, Representation};
    use crate::orbit::make_orbit_label;

    fn unit() -> DimensionalConstants {
        DimensionalConstants::unit()
    }

    #[test]
    fn multiply_examples() {
        let g = GroupElement::new(1.0, 2.0, 3.0, [4.0, 5.0], [6.0, 7.0]);
        assert_eq!(group_multiply(&GroupElement::identity(), &g, &unit()), g);
        let a = GroupElement::new(0.0, 0.0, 0.0, [1.0, 0.0], [0.0, 0.0]);
        let b = GroupElement::new(0.0, 0.0, 0.0, [0.0, 0.0], [1.0, 0.0]);
        let ab = group_multiply(&a, &b, &unit());
        assert_eq!(ab, GroupElement::new(0.5, 0.0, 0.0, [1.0, 0.0], [1.0, 0.0]));
        let ba = group_multiply(&b, &a, &unit());
        assert_eq!((ba.q, ba.p), (ab.q, ab.p));
        assert_eq!(ba.theta, -0.5);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(group_inverse(&GroupElement::identity()), GroupElement::identity());
        let g = GroupElement::new(0.3, -1.1, 2.0, [0.5, -0.25], [1.5, 0.75]);
        assert_eq!(group_multiply(&g, &group_inverse(&g), &unit()), GroupElement::identity());
        assert_eq!(group_multiply(&group_inverse(&g), &g, &unit()), GroupElement::identity());
        assert_eq!(group_inverse(&group_inverse(&g)), g);
    }

    fn state() -> ComplexField2D {
        let g = Grid2D::square_symmetric(64, 8.0).unwrap();
        ComplexField2D::from_fn(g, Representation::Momentum, |x, y| {
            Complex64::new(1.0 + 0.3 * x, -0.2 * y) * (-(x * x + y * y) / 2.0).exp()
        })
    }

    #[test]
    fn central_element_is_a_phase() {
        let l = make_orbit_label(1.5, -1.0, 0.5, unit()).unwrap();
        let f = state();
        let g = GroupElement::new(0.7, 0.0, 0.0, [0.0; 2], [0.0; 2]);
        let out = uir_apply(&g, &f, &l, ShiftMode::Integer).unwrap();
        let ph = Complex64::from_polar(1.0, 1.5 * 0.7);
        for (a, b) in out.values().iter().zip(f.values()) {
            assert!((a - b * ph).norm() < 1e-15);
        }
        let id = uir_apply(&GroupElement::identity(), &f, &l, ShiftMode::Integer).unwrap();
        assert_eq!(id.values(), f.values());
        let id = uir_apply_ft(&GroupElement::identity(), &f, &l, ShiftMode::Integer).unwrap();
        assert_eq!(id.values(), f.values());
    }

    #[test]
    fn off_grid_shift_is_rejected() {
        let l = make_orbit_label(1.0, 1.0, 0.0, unit()).unwrap();
        let g = GroupElement::new(0.0, 0.0, 0.0, [0.1, 0.0], [0.0; 2]);
        assert!(matches!(
            uir_apply(&g, &state(), &l, ShiftMode::Integer),
            Err(Error::ShiftOffGrid { axis: 0, .. })
        ));
        assert!(uir_apply(&g, &state(), &l, ShiftMode::Fractional).is_ok());
    }
}
