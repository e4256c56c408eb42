//! Uniform sampling grids and complex fields sampled on them.
//!
//! Every 2D array in this crate is stored row-major with the axis-0 index
//! varying fastest: the sample at `(i0, i1)` lives at `i0 + n0 * i1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform 1D grid `origin + i * step`, `i = 0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub n: usize,
    pub origin: f64,
    pub step: f64,
}

impl Grid1D {
    pub fn new(n: usize, origin: f64, step: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 samples, got {n}")));
        }
        if !(step > 0.0) || !step.is_finite() || !origin.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "step must be positive and finite (origin {origin}, step {step})"
            )));
        }
        Ok(Self { n, origin, step })
    }

    /// The symmetric grid `[-extent, extent - step]` with `n` samples.
    pub fn symmetric(n: usize, extent: f64) -> Result<Self> {
        if !(extent > 0.0) {
            return Err(Error::InvalidGrid(format!("extent must be positive, got {extent}")));
        }
        Self::new(n, -extent, 2.0 * extent / n as f64)
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.step
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    /// Last sample coordinate.
    pub fn end(&self) -> f64 {
        self.coord(self.n - 1)
    }

    /// Whether `x` lies in the closed bounding interval of the samples.
    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        let tol = 1e-12 * self.step;
        x >= self.origin - tol && x <= self.end() + tol
    }

    /// Index of the node at `x` if `x` sits on a node within `tol` steps.
    pub fn node_index(&self, x: f64, tol: f64) -> Option<usize> {
        let t = (x - self.origin) / self.step;
        let r = t.round();
        if (t - r).abs() <= tol && r >= 0.0 && (r as usize) < self.n {
            Some(r as usize)
        } else {
            None
        }
    }

    /// Index of the center sample (`n / 2`), the zero of a symmetric grid.
    pub fn center_index(&self) -> usize {
        self.n / 2
    }

    /// The grid with the same sample count and step `2π / (n·step·|kappa|)`,
    /// centered so that sample `n/2` is zero.
    pub fn conjugate(&self, kappa: f64) -> Grid1D {
        let step = 2.0 * std::f64::consts::PI / (self.n as f64 * self.step * kappa.abs());
        Grid1D {
            n: self.n,
            origin: -(self.center_index() as f64) * step,
            step,
        }
    }

    pub fn same_as(&self, other: &Grid1D) -> bool {
        self.n == other.n
            && (self.origin - other.origin).abs() <= 1e-12 * self.step.max(other.step)
            && (self.step - other.step).abs() <= 1e-12 * self.step.max(other.step)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub axis0: Grid1D,
    pub axis1: Grid1D,
}

impl Grid2D {
    pub fn new(axis0: Grid1D, axis1: Grid1D) -> Self {
        Self { axis0, axis1 }
    }

    pub fn square_symmetric(n: usize, extent: f64) -> Result<Self> {
        let a = Grid1D::symmetric(n, extent)?;
        Ok(Self::new(a, a))
    }

    pub fn len(&self) -> usize {
        self.axis0.n * self.axis1.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i0: usize, i1: usize) -> usize {
        i0 + self.axis0.n * i1
    }

    #[inline]
    pub fn coord(&self, i0: usize, i1: usize) -> (f64, f64) {
        (self.axis0.coord(i0), self.axis1.coord(i1))
    }

    pub fn axis(&self, axis: usize) -> &Grid1D {
        match axis {
            0 => &self.axis0,
            _ => &self.axis1,
        }
    }

    /// Area of one cell.
    pub fn cell(&self) -> f64 {
        self.axis0.step * self.axis1.step
    }

    pub fn same_as(&self, other: &Grid2D) -> bool {
        self.axis0.same_as(&other.axis0) && self.axis1.same_as(&other.axis1)
    }
}

/// Which space a sampled state lives in. Carried as metadata only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Position,
    Momentum,
}

impl Representation {
    pub fn tag(&self) -> &'static str {
        match self {
            Representation::Position => "position",
            Representation::Momentum => "momentum",
        }
    }
}

impl std::str::FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "position" => Ok(Representation::Position),
            "momentum" => Ok(Representation::Momentum),
            other => Err(Error::Parse(format!("unknown representation tag `{other}`"))),
        }
    }
}

/// A complex function sampled on a [`Grid2D`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField2D {
    grid: Grid2D,
    values: Vec<Complex64>,
    pub representation: Representation,
}

impl ComplexField2D {
    pub fn new(grid: Grid2D, values: Vec<Complex64>, representation: Representation) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "field has {} values but grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("field samples"));
        }
        Ok(Self { grid, values, representation })
    }

    pub fn zeros(grid: Grid2D, representation: Representation) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            representation,
        }
    }

    /// Samples `f(x0, x1)` at every node.
    pub fn from_fn(
        grid: Grid2D,
        representation: Representation,
        mut f: impl FnMut(f64, f64) -> Complex64,
    ) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i1 in 0..grid.axis1.n {
            for i0 in 0..grid.axis0.n {
                let (x0, x1) = grid.coord(i0, i1);
                values.push(f(x0, x1));
            }
        }
        Self { grid, values, representation }
    }

    pub(crate) fn from_parts_unchecked(
        grid: Grid2D,
        values: Vec<Complex64>,
        representation: Representation,
    ) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values, representation }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i0: usize, i1: usize) -> Complex64 {
        self.values[self.grid.index(i0, i1)]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            representation: self.representation,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// `a·self + b·other`; the grids must agree.
    pub fn axpby(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
            representation: self.representation,
        })
    }

    /// Riemann-sum L² norm (the trapezoid rule for fields vanishing at the edges).
    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell()).sqrt()
    }

    /// `⟨self|other⟩ = Σ conj(self)·other · cell`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.cell())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest sample modulus on the outer ring of nodes.
    pub fn boundary_max_abs(&self) -> f64 {
        let (n0, n1) = (self.grid.axis0.n, self.grid.axis1.n);
        let mut m = 0.0f64;
        for i0 in 0..n0 {
            m = m.max(self.at(i0, 0).norm()).max(self.at(i0, n1 - 1).norm());
        }
        for i1 in 0..n1 {
            m = m.max(self.at(0, i1).norm()).max(self.at(n0 - 1, i1).norm());
        }
        m
    }

    /// Tail guard: the boundary samples are negligible against the peak.
    pub fn check_tails(&self, rel: f64) -> Result<()> {
        let peak = self.max_abs();
        if peak == 0.0 {
            return Ok(());
        }
        let edge = self.boundary_max_abs();
        if edge > rel * peak {
            return Err(Error::TailNotNegligible { edge, peak });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid1D::new(1, 0.0, 1.0).is_err());
        assert!(Grid1D::new(4, 0.0, 0.0).is_err());
        assert!(Grid1D::new(4, 0.0, -1.0).is_err());
        assert!(Grid1D::new(4, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn symmetric_grid_has_zero_at_center() {
        let g = Grid1D::symmetric(128, 10.0).unwrap();
        assert_eq!(g.coord(g.center_index()), 0.0);
        assert_eq!(g.origin, -10.0);
        let c = g.conjugate(1.0);
        assert_eq!(c.coord(c.center_index()), 0.0);
        assert!((c.step * g.step * 128.0 - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn layout_is_axis0_fastest() {
        let g = Grid2D::new(Grid1D::new(3, 0.0, 1.0).unwrap(), Grid1D::new(2, 0.0, 1.0).unwrap());
        let f = ComplexField2D::from_fn(g, Representation::Position, |x, y| {
            Complex64::new(x + 10.0 * y, 0.0)
        });
        let re: Vec<f64> = f.values().iter().map(|v| v.re).collect();
        assert_eq!(re, vec![0.0, 1.0, 2.0, 10.0, 11.0, 12.0]);
    }

    #[test]
    fn rejects_length_mismatch_and_nan() {
        let g = Grid2D::square_symmetric(4, 1.0).unwrap();
        assert!(ComplexField2D::new(g, vec![Complex64::default(); 3], Representation::Position).is_err());
        let mut v = vec![Complex64::default(); 16];
        v[3].im = f64::INFINITY;
        assert!(matches!(
            ComplexField2D::new(g, v, Representation::Position),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn node_lookup() {
        let g = Grid1D::symmetric(8, 2.0).unwrap();
        assert_eq!(g.node_index(0.5, 1e-9), Some(5));
        assert_eq!(g.node_index(0.6, 1e-9), None);
        assert_eq!(g.node_index(2.0, 1e-9), None);
    }
}
