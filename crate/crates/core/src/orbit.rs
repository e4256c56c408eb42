//! Orbit labels `(k1, k2, k3) ≡ (ρ, σ, τ)`, their sectors, the noncommutativity
//! parameters, and the map between orbit coordinates `k*` and noncommutative
//! positions and momenta.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The constants `α, β, γ` of the group law. Units are bookkeeping only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionalConstants {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl DimensionalConstants {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if v == 0.0 || !v.is_finite() {
                return Err(Error::InvalidConstants(format!("{name} must be finite and nonzero, got {v}")));
            }
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn unit() -> Self {
        Self { alpha: 1.0, beta: 1.0, gamma: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    /// `k2, k3 ≠ 0` and `k1²α² − k2k3βγ ≠ 0`.
    Generic,
    /// `k2 ≠ 0, k3 = 0`: commuting momenta.
    TauZero,
    /// `k2 = k3 = 0`: ordinary quantum mechanics.
    SigmaTauZero,
}

impl Sector {
    pub fn name(&self) -> &'static str {
        match self {
            Sector::Generic => "generic",
            Sector::TauZero => "tau0",
            Sector::SigmaTauZero => "qm",
        }
    }
}

/// A validated orbit label. Construct with [`make_orbit_label`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitLabel {
    k1: f64,
    k2: f64,
    k3: f64,
    consts: DimensionalConstants,
    sector: Sector,
}

impl OrbitLabel {
    pub fn k1(&self) -> f64 {
        self.k1
    }
    pub fn k2(&self) -> f64 {
        self.k2
    }
    pub fn k3(&self) -> f64 {
        self.k3
    }
    pub fn consts(&self) -> DimensionalConstants {
        self.consts
    }
    pub fn sector(&self) -> Sector {
        self.sector
    }

    /// `D = k1²α² − k2k3βγ`.
    pub fn discriminant(&self) -> f64 {
        let c = self.consts;
        self.k1 * self.k1 * c.alpha * c.alpha - self.k2 * self.k3 * c.beta * c.gamma
    }

    pub fn require(&self, sector: Sector) -> Result<()> {
        if self.sector == sector {
            Ok(())
        } else {
            Err(Error::SectorMismatch { expected: sector, found: self.sector })
        }
    }
}

impl std::fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "k=({:e}, {:e}, {:e}) alpha={:e} beta={:e} gamma={:e} sector={}",
            self.k1,
            self.k2,
            self.k3,
            self.consts.alpha,
            self.consts.beta,
            self.consts.gamma,
            self.sector.name()
        )
    }
}

/// Validates `(k1, k2, k3)` and classifies its sector by exact zero tests.
pub fn make_orbit_label(k1: f64, k2: f64, k3: f64, consts: DimensionalConstants) -> Result<OrbitLabel> {
    let consts = DimensionalConstants::new(consts.alpha, consts.beta, consts.gamma)?;
    if ![k1, k2, k3].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidLabel("k1, k2, k3 must be finite".into()));
    }
    if k1 == 0.0 {
        return Err(Error::InvalidLabel("k1 must be nonzero".into()));
    }
    let sector = match (k2 == 0.0, k3 == 0.0) {
        (true, true) => Sector::SigmaTauZero,
        (false, true) => Sector::TauZero,
        (true, false) => {
            return Err(Error::InvalidLabel(
                "k2 = 0 with k3 != 0 lies outside the three covered sectors".into(),
            ))
        }
        (false, false) => Sector::Generic,
    };
    let label = OrbitLabel { k1, k2, k3, consts, sector };
    if sector == Sector::Generic && label.discriminant() == 0.0 {
        return Err(Error::Degenerate(format!(
            "k1^2 alpha^2 - k2 k3 beta gamma = 0 for {label}"
        )));
    }
    Ok(label)
}

/// The noncommutativity parameters `ħ, ϑ, 𝓑`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NCParams {
    pub hbar: f64,
    pub vartheta: f64,
    pub bfield: f64,
}

impl NCParams {
    pub fn new(hbar: f64, vartheta: f64, bfield: f64) -> Result<Self> {
        if ![hbar, vartheta, bfield].iter().all(|v| v.is_finite()) {
            return Err(Error::DegenerateParams("parameters must be finite".into()));
        }
        if hbar == 0.0 {
            return Err(Error::DegenerateParams("hbar must be nonzero".into()));
        }
        Ok(Self { hbar, vartheta, bfield })
    }

    /// `Δ = ħ² − 𝓑ϑ`.
    pub fn delta(&self) -> f64 {
        self.hbar * self.hbar - self.bfield * self.vartheta
    }

    pub(crate) fn require_nondegenerate(&self) -> Result<f64> {
        let d = self.delta();
        if d == 0.0 {
            Err(Error::DegenerateParams("hbar^2 - B vartheta = 0".into()))
        } else {
            Ok(d)
        }
    }
}

impl std::fmt::Display for NCParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "hbar={:e} vartheta={:e} B={:e}", self.hbar, self.vartheta, self.bfield)
    }
}

pub fn nc_params_from_label(label: &OrbitLabel) -> NCParams {
    let a = label.consts.alpha;
    let k1a2 = label.k1 * label.k1 * a * a;
    NCParams {
        hbar: 1.0 / (label.k1 * a),
        vartheta: -label.k2 * label.consts.beta / k1a2 + 0.0,
        bfield: -label.k3 * label.consts.gamma / k1a2 + 0.0,
    }
}

/// A point `(k1*, k2*, k3*, k4*)` of a 4-dimensional orbit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoadjointPoint {
    pub k1s: f64,
    pub k2s: f64,
    pub k3s: f64,
    pub k4s: f64,
}

impl CoadjointPoint {
    pub fn new(k1s: f64, k2s: f64, k3s: f64, k4s: f64) -> Self {
        Self { k1s, k2s, k3s, k4s }
    }
    pub fn to_array(self) -> [f64; 4] {
        [self.k1s, self.k2s, self.k3s, self.k4s]
    }
    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

/// Noncommutative positions `q^nc` and momenta `p^nc`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NCCoords {
    pub qnc: [f64; 2],
    pub pnc: [f64; 2],
}

impl NCCoords {
    pub fn to_array(self) -> [f64; 4] {
        [self.qnc[0], self.qnc[1], self.pnc[0], self.pnc[1]]
    }
    pub fn from_array(a: [f64; 4]) -> Self {
        Self { qnc: [a[0], a[1]], pnc: [a[2], a[3]] }
    }
}

pub fn orbit_to_nc(pt: &CoadjointPoint, label: &OrbitLabel) -> NCCoords {
    let (k1, k2, k3) = (label.k1, label.k2, label.k3);
    let DimensionalConstants { alpha: a, beta: b, gamma: g } = label.consts;
    let d = label.discriminant();
    NCCoords {
        qnc: [(pt.k1s * k1 * k1 * a * a - pt.k4s * k1 * k2 * a * b) / d, pt.k2s],
        pnc: [pt.k3s, (k1 * k1 * pt.k4s * a * a - k1 * pt.k1s * k3 * a * g) / d],
    }
}

/// Inverse of [`orbit_to_nc`]: solves the 2×2 system in `(k1*, k4*)`.
pub fn nc_to_orbit(nc: &NCCoords, label: &OrbitLabel) -> CoadjointPoint {
    let (k1, k2, k3) = (label.k1, label.k2, label.k3);
    let DimensionalConstants { alpha: a, beta: b, gamma: g } = label.consts;
    let d = label.discriminant();
    // d·q1 = m11 k1* + m14 k4*,  d·p2 = m41 k1* + m44 k4*
    let (m11, m14) = (k1 * k1 * a * a, -k1 * k2 * a * b);
    let (m41, m44) = (-k1 * k3 * a * g, k1 * k1 * a * a);
    let det = m11 * m44 - m14 * m41;
    let (r1, r4) = (d * nc.qnc[0], d * nc.pnc[1]);
    CoadjointPoint {
        k1s: (m44 * r1 - m14 * r4) / det,
        k2s: nc.qnc[1],
        k3s: nc.pnc[0],
        k4s: (m11 * r4 - m41 * r1) / det,
    }
}

/// `|dq^nc dp^nc / dk*| = |k1²α² / D|`.
pub fn nc_jacobian(label: &OrbitLabel) -> f64 {
    let a = label.consts.alpha;
    (label.k1 * label.k1 * a * a / label.discriminant()).abs()
}

pub fn plancherel_density(label: &OrbitLabel) -> f64 {
    match label.sector {
        Sector::Generic => label.discriminant().abs() / (label.consts.alpha * label.consts.alpha),
        Sector::TauZero | Sector::SigmaTauZero => label.k1 * label.k1,
    }
}

pub fn duflo_moore_constant(label: &OrbitLabel) -> f64 {
    let tau = 2.0 * PI;
    match label.sector {
        Sector::Generic => tau.powf(2.5),
        Sector::TauZero => tau * tau,
        Sector::SigmaTauZero => tau.powf(1.5),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(k1: f64, k2: f64, k3: f64) -> Result<OrbitLabel> {
        make_orbit_label(k1, k2, k3, DimensionalConstants::unit())
    }

    #[test]
    fn classification() {
        assert_eq!(lab(1.0, 0.0, 0.0).unwrap().sector(), Sector::SigmaTauZero);
        assert_eq!(lab(3.0, 1.0, 0.0).unwrap().sector(), Sector::TauZero);
        let g = lab(1.0, -1.0, 1.0).unwrap();
        assert_eq!(g.sector(), Sector::Generic);
        assert_eq!(g.discriminant(), 2.0);
        let e = lab(1.0, 1.0, 1.0).unwrap_err();
        assert!(matches!(e, Error::Degenerate(_)));
        assert!(e.to_string().contains("degenerate"));
        assert!(lab(0.0, 1.0, 1.0).is_err());
        assert!(lab(1.0, 0.0, 1.0).is_err());
        assert!(DimensionalConstants::new(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn params() {
        let p = nc_params_from_label(&lab(1.0, 0.0, 0.0).unwrap());
        assert_eq!((p.hbar, p.vartheta, p.bfield), (1.0, 0.0, 0.0));
        let p = nc_params_from_label(&lab(1.0, -1.0, 2.0).unwrap());
        assert_eq!((p.hbar, p.vartheta, p.bfield), (1.0, 1.0, -2.0));
        assert_eq!(p.delta(), 3.0);
        let c = DimensionalConstants::new(1.0, 2.0, 1.0).unwrap();
        let p = nc_params_from_label(&make_orbit_label(2.0, 1.0, 0.0, c).unwrap());
        assert_eq!((p.hbar, p.vartheta, p.bfield), (0.5, -0.5, 0.0));
    }

    #[test]
    fn coordinate_examples() {
        let q = lab(1.0, 0.0, 0.0).unwrap();
        let pt = CoadjointPoint::new(0.3, -1.2, 2.5, 0.7);
        assert_eq!(orbit_to_nc(&pt, &q).to_array(), pt.to_array());
        assert_eq!(nc_to_orbit(&NCCoords::from_array(pt.to_array()), &q), pt);

        let g = lab(1.0, 1.0, -1.0).unwrap();
        let nc = orbit_to_nc(&CoadjointPoint::new(1.0, 0.0, 0.0, 1.0), &g);
        let want = [0.0, 0.0, 0.0, 1.0];
        for (a, b) in nc.to_array().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let back = nc_to_orbit(&NCCoords::from_array(want), &g);
        assert_eq!(back, CoadjointPoint::new(1.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn tables() {
        assert_eq!(plancherel_density(&lab(2.0, 1.0, 1.0).unwrap()), 3.0);
        assert_eq!(plancherel_density(&lab(3.0, 1.0, 0.0).unwrap()), 9.0);
        assert_eq!(plancherel_density(&lab(1.0, 0.0, 0.0).unwrap()), 1.0);
        assert!((duflo_moore_constant(&lab(2.0, 1.0, 1.0).unwrap()) - 98.957_717_804_772_6).abs() < 1e-9);
        assert!((duflo_moore_constant(&lab(3.0, 1.0, 0.0).unwrap()) - 39.4784).abs() < 1e-3);
        assert!((duflo_moore_constant(&lab(1.0, 0.0, 0.0).unwrap()) - 15.7496).abs() < 1e-3);
    }
}
