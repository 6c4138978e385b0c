//! Core data types: spacetime points, plasma states, cylindrical
//! component bundles, and global configuration.

use crate::error::{MhdError, Result};
use crate::vec3::Vec3;
use serde::{Deserialize, Serialize};

/// Event in Galilean spacetime.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpacetimePoint {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        SpacetimePoint { t, x, y, z }
    }

    pub fn spatial(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn with_spatial(t: f64, r: Vec3) -> Self {
        SpacetimePoint { t, x: r.x, y: r.y, z: r.z }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        SpacetimePoint { t: a[0], x: a[1], y: a[2], z: a[3] }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Cylindrical radius about the z axis.
    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Azimuth in `(-pi, pi]`; zero on the axis.
    pub fn azimuth(&self) -> f64 {
        azimuth(self.x, self.y)
    }
}

/// Azimuthal angle of `(x, y)` normalised to `(-pi, pi]`.
pub fn azimuth(x: f64, y: f64) -> f64 {
    if y == 0.0 && x < 0.0 {
        std::f64::consts::PI
    } else {
        y.atan2(x)
    }
}

/// Full thermodynamic and electromagnetic state of the plasma at a point.
///
/// Density must be strictly positive; the checked constructor rejects
/// anything else, and every solution family in the crate produces states
/// through it. Pressure is unconstrained: several families admit formally
/// negative pressure in parts of parameter space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MhdState {
    /// Mass density.
    pub rho: f64,
    /// Thermal pressure.
    pub p: f64,
    /// Bulk velocity.
    pub v: Vec3,
    /// Magnetic field.
    pub b: Vec3,
}

impl MhdState {
    pub fn new(rho: f64, p: f64, v: Vec3, b: Vec3) -> Result<Self> {
        let state = MhdState { rho, p, v, b };
        state.validate()?;
        Ok(state)
    }

    /// Checks the physical invariants: finite entries and positive density.
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if !(self.rho > 0.0) {
            violations.push(format!("rho: must be positive, got {}", self.rho));
        }
        if !self.rho.is_finite() {
            violations.push("rho: must be finite".into());
        }
        if !self.p.is_finite() {
            violations.push("p: must be finite".into());
        }
        if !self.v.is_finite() {
            violations.push("v: must be finite".into());
        }
        if !self.b.is_finite() {
            violations.push("b: must be finite".into());
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(MhdError::invalid_params("MhdState", violations))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.p.is_finite() && self.v.is_finite() && self.b.is_finite()
    }

    /// Flattens to `[rho, p, v1, v2, v3, b1, b2, b3]`.
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.rho, self.p, self.v.x, self.v.y, self.v.z, self.b.x, self.b.y, self.b.z,
        ]
    }

    pub fn from_array(a: [f64; 8]) -> Self {
        MhdState {
            rho: a[0],
            p: a[1],
            v: Vec3::new(a[2], a[3], a[4]),
            b: Vec3::new(a[5], a[6], a[7]),
        }
    }
}

/// A point in circular-cylindrical coordinates together with the
/// cylindrical components of one vector attached there.
///
/// Azimuth is normalised to `(-pi, pi]`; the frame is undefined on the
/// axis, so conversions require `r > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylComponents {
    pub r: f64,
    pub phi: f64,
    pub z: f64,
    pub a_r: f64,
    pub a_phi: f64,
    pub a_z: f64,
}

impl CylComponents {
    pub const fn new(r: f64, phi: f64, z: f64, a_r: f64, a_phi: f64, a_z: f64) -> Self {
        CylComponents { r, phi, z, a_r, a_phi, a_z }
    }
}

/// Maps a cylindrical point-plus-vector bundle to the Cartesian position
/// and the Cartesian components of the vector.
pub fn cyl_to_cart(q: &CylComponents) -> Result<(Vec3, Vec3)> {
    if !(q.r > 0.0) {
        return Err(MhdError::AxisSingularity);
    }
    let (s, c) = q.phi.sin_cos();
    let position = Vec3::new(q.r * c, q.r * s, q.z);
    let vector = Vec3::new(
        c * q.a_r - s * q.a_phi,
        s * q.a_r + c * q.a_phi,
        q.a_z,
    );
    Ok((position, vector))
}

/// Resolves a Cartesian position and vector into cylindrical coordinates
/// and components. Inverse of [`cyl_to_cart`] away from the axis.
pub fn cart_to_cyl(position: Vec3, vector: Vec3) -> Result<CylComponents> {
    let r = position.x.hypot(position.y);
    if r == 0.0 {
        return Err(MhdError::AxisSingularity);
    }
    let (c, s) = (position.x / r, position.y / r);
    Ok(CylComponents {
        r,
        phi: azimuth(position.x, position.y),
        z: position.z,
        a_r: c * vector.x + s * vector.y,
        a_phi: c * vector.y - s * vector.x,
        a_z: vector.z,
    })
}

/// Global physical configuration shared by the diagnostics.
///
/// The magnetic permeability is normalised to one throughout the crate, so
/// the current density is the plain curl of the magnetic field. The
/// adiabatic exponent stored here is only a default: families that fix
/// their own exponent carry it themselves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MhdConfig {
    /// Adiabatic exponent of the polytropic pressure law.
    pub gamma: f64,
    /// Pass threshold for PDE residual max-norms.
    pub residual_tol: f64,
    /// Relative tolerance handed to adaptive integrators.
    pub ode_tol: f64,
    /// Tolerance for quadratures (circulation, line integrals).
    pub quad_tol: f64,
}

impl MhdConfig {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(MhdError::invalid_params(
                "MhdConfig",
                vec![format!("gamma: must satisfy gamma >= 1, got {gamma}")],
            ));
        }
        Ok(MhdConfig { gamma, ..Default::default() })
    }
}

impl Default for MhdConfig {
    fn default() -> Self {
        MhdConfig {
            gamma: 5.0 / 3.0,
            residual_tol: 1e-8,
            ode_tol: 1e-10,
            quad_tol: 1e-9,
        }
    }
}
