//! Wigner functions on the 4-dimensional coadjoint orbits of `G_NC`, the
//! triply centrally extended group of `R^4` underlying noncommutative quantum
//! mechanics.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`] — uniform grids and sampled complex fields,
//! * [`numerics`] — continuous Fourier transforms, shifts, chirp-z, quadrature,
//! * [`orbit`] — orbit labels, sectors, coordinate maps and constant tables,
//! * [`group`] — the group law and both unitary irreducible representations,
//! * [`wigner`] — every Wigner transform, sharing one kernel engine,
//! * [`starprod`] — marginals and the four kernel star products,
//! * [`oracles`] — brute-force references, test states and the verification suite.
//!
//! Conventions: 2D arrays are stored with the axis-0 index fastest; the
//! Fourier transform is unitary, `(2π)^{-1/2} e^{-isr}` per coordinate for
//! the forward direction.

pub mod error;
pub mod grid;
pub mod group;
pub mod numerics;
pub mod orbit;
pub mod oracles;
pub mod report;
pub mod starprod;
pub mod wigner;

pub use error::{Error, Result};
pub use grid::{ComplexField2D, Grid1D, Grid2D, Representation};
pub use group::{group_inverse, group_multiply, uir_apply, uir_apply_ft, GroupElement, ShiftMode};
pub use orbit::{
    duflo_moore_constant, make_orbit_label, nc_params_from_label, nc_to_orbit, orbit_to_nc,
    plancherel_density, CoadjointPoint, DimensionalConstants, NCCoords, NCParams, OrbitLabel,
    Sector,
};
pub use report::VerificationReport;
pub use wigner::{Chart, Method, Probes, RankOneOperator, WignerField};

pub use num_complex::Complex64;
