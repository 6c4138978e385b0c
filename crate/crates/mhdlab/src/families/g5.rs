//! Cylindrical equilibrium with an axially sheared flow, built on a
//! numerically solved pitch-angle profile.
//!
//! All fields live in the transverse plane through the radius and the
//! azimuth: pressure and magnetic field scale exponentially in the
//! azimuth and in the radial twist integral, the velocity is purely
//! axial, and the magnetic pitch angle solves a first-order radial ODE
//! carried inside the family as a [`ReducedProfile`]. The magnetic force
//! balances the pressure gradient exactly at every radius the profile
//! covers.

use super::{
    check_variant, eval_via_components, FamilyMetadata, MhdField, ParamInfo,
    ReferenceQuantities, SampleWindow, SolutionFamily,
};
use crate::error::Result;
use crate::params::{get, ParamMap, Violations};
use crate::reduced::{solve_g5, CylPitchParams, ReducedProfile};
use crate::scalar::Scalar;
use crate::state::SpacetimePoint;
use crate::vec3::Vec3;
use std::sync::Arc;

/// Axial speed twisted by the pressure rate instead of its own, as
/// displayed at the source; breaks field-line advection of the flow.
pub const PRINTED_VZ: &str = "printed-vz";
/// Flux-surface density with the twist scaled by the pressure rate
/// alone, as displayed at the source; the field lines then leave the
/// density surfaces unless the speed rate vanishes.
pub const PRINTED_RHO: &str = "printed-rho";

#[derive(Clone)]
pub struct G5 {
    profile: Arc<ReducedProfile>,
    alpha1: f64,
    alpha2: f64,
    a_o: f64,
    x_o: f64,
    z_o: f64,
    w_o: f64,
    r_o: f64,
    lambda: f64,
    /// Twist coefficient inside the axial speed exponent.
    vz_rate: f64,
    /// Twist coefficient inside the density exponent.
    rho_rate: f64,
}

pub fn describe(_id: &str) -> Result<FamilyMetadata> {
    Ok(FamilyMetadata {
        id: "G5".to_string(),
        group: "G5".to_string(),
        title: "cylindrical pitch-profile equilibrium with axial shear".to_string(),
        combo: "J3+0.4*G+0.5*H".to_string(),
        algebra: vec!["J3+0.4*G+0.5*H".to_string(), "P0".to_string(), "P3".to_string()],
        gamma: 5.0 / 3.0,
        gamma_fixed: false,
        parameters: vec![
            ParamInfo { name: "alpha1", default: 0.4, constraint: "axial speed rate" },
            ParamInfo { name: "alpha2", default: 0.5, constraint: "pressure/field rate" },
            ParamInfo { name: "A_o", default: 0.5, constraint: "pressure scale, positive" },
            ParamInfo { name: "X_o", default: 1.0, constraint: "nonzero transverse field scale" },
            ParamInfo { name: "Z_o", default: 0.5, constraint: "axial field scale" },
            ParamInfo { name: "W_o", default: 0.8, constraint: "axial speed scale" },
            ParamInfo { name: "R_o", default: 1.0, constraint: "positive density scale" },
            ParamInfo { name: "lambda", default: 0.0, constraint: "density profile exponent" },
            ParamInfo { name: "Y0", default: 0.3, constraint: "pitch at r_min, cos(Y0) away from 0" },
            ParamInfo { name: "r_min", default: 0.4, constraint: "inner radius, positive" },
            ParamInfo { name: "r_max", default: 2.0, constraint: "outer radius, > r_min" },
        ],
        domain: "radius inside the solved profile window, off the azimuthal branch cut"
            .to_string(),
        force_free: false,
        circulation_conserved: true,
        planar_b: false,
        static_flow: true,
        variants: vec![PRINTED_VZ, PRINTED_RHO],
        notes: vec![
            "the pitch equation may hit a right-angle pitch before r_max; the domain then \
             ends at the flagged radius"
                .to_string(),
            "lambda deforms the free radial density profile; field lines stay on density \
             surfaces only at lambda = 0"
                .to_string(),
        ],
    })
}

pub fn validate(params: &ParamMap) -> Result<()> {
    let mut v = Violations::new();
    v.require(get(params, "A_o") > 0.0, "A_o: must be positive");
    v.require(get(params, "X_o") != 0.0, "X_o: must be nonzero");
    v.require(get(params, "R_o") > 0.0, "R_o: must be positive");
    v.require(
        get(params, "Y0").cos().abs() > 1e-6,
        "Y0: cos(Y0) must stay away from zero",
    );
    let r_min = get(params, "r_min");
    v.require(r_min > 0.0, "r_min: must be positive");
    v.require(get(params, "r_max") > r_min, "r_max: must exceed r_min");
    v.into_result("G5")
}

/// Stress ratio steering the pitch equation.
fn stress_ratio(params: &ParamMap) -> f64 {
    let z_o = get(params, "Z_o");
    (2.0 * get(params, "A_o") + z_o * z_o) / get(params, "X_o").powi(2)
}

pub fn build(params: &ParamMap, variant: Option<&str>) -> Result<SolutionFamily> {
    check_variant("G5", variant, &[PRINTED_VZ, PRINTED_RHO])?;
    validate(params)?;
    let pitch = CylPitchParams { alpha2: get(params, "alpha2"), beta_o: stress_ratio(params) };
    let span = (get(params, "r_min"), get(params, "r_max"));
    let profile = solve_g5(&pitch, span, get(params, "Y0"), 1e-10)?;
    assemble(Arc::new(profile), params, variant)
}

/// Wraps an externally solved pitch profile in the full field.
pub fn from_profile(profile: Arc<ReducedProfile>, params: &ParamMap) -> Result<SolutionFamily> {
    let merged = crate::params::merge_params("G5", &super::default_params("G5")?, params)?;
    validate(&merged)?;
    if profile.component_names() != ["Y", "theta"] {
        return Err(crate::error::MhdError::Parse(format!(
            "profile carries components {:?}; the cylindrical family needs [\"Y\", \"theta\"]",
            profile.component_names()
        )));
    }
    assemble(profile, &merged, None)
}

fn assemble(
    profile: Arc<ReducedProfile>,
    params: &ParamMap,
    variant: Option<&str>,
) -> Result<SolutionFamily> {
    let alpha1 = get(params, "alpha1");
    let alpha2 = get(params, "alpha2");
    Ok(Box::new(G5 {
        profile,
        alpha1,
        alpha2,
        a_o: get(params, "A_o"),
        x_o: get(params, "X_o"),
        z_o: get(params, "Z_o"),
        w_o: get(params, "W_o"),
        r_o: get(params, "R_o"),
        lambda: get(params, "lambda"),
        vz_rate: if variant == Some(PRINTED_VZ) { alpha2 } else { alpha1 },
        rho_rate: if variant == Some(PRINTED_RHO) {
            2.0 * alpha2
        } else {
            2.0 * (alpha2 - alpha1)
        },
    }))
}

impl G5 {
    /// Pitch and twist lifted to jets at radius `r`, with slopes and
    /// curvatures supplied analytically by the pitch equation, so the
    /// jet is the exact jet of the solution through the tabulated value.
    fn pitch_twist<S: Scalar>(&self, r: S) -> (S, S) {
        let rv = r.value();
        let row = self.profile.eval_clamped(rv);
        let (yv, tv) = (row[0], row[1]);
        let beta_o = (2.0 * self.a_o + self.z_o * self.z_o) / (self.x_o * self.x_o);
        let (sin_y, cos_y) = yv.sin_cos();
        let y1 = self.alpha2 * beta_o * rv * cos_y * cos_y + self.alpha2 / rv;
        let y2 = self.alpha2 * beta_o * (cos_y * cos_y - rv * 2.0 * sin_y * cos_y * y1)
            - self.alpha2 / (rv * rv);
        let tan_y = sin_y / cos_y;
        let t1 = tan_y / rv;
        let t2 = y1 / (cos_y * cos_y * rv) - tan_y / (rv * rv);
        (r.lift1(yv, y1, y2), r.lift1(tv, t1, t2))
    }

    fn components<S: Scalar>(&self, _t: S, x: S, y: S, _z: S) -> [S; 8] {
        let r = x.hypot(y);
        let phi = y.atan2(x);
        let (pitch, twist) = self.pitch_twist(r);
        let swirl = phi - twist;
        let envelope = swirl.scale(self.alpha2).exp();
        let rho = r.powf(self.lambda)
            * (phi.scale(2.0 * (self.alpha2 - self.alpha1)) - twist.scale(self.rho_rate)).exp()
            * self.r_o;
        let p = envelope * envelope * self.a_o;
        let v3 = (phi.scale(self.alpha1) - twist.scale(self.vz_rate)).exp() * self.w_o;
        let b_r = envelope / r * self.x_o;
        let b_phi = b_r * pitch.tan();
        let b_z = envelope * self.z_o;
        let (cos_phi, sin_phi) = (x / r, y / r);
        let b1 = b_r * cos_phi - b_phi * sin_phi;
        let b2 = b_r * sin_phi + b_phi * cos_phi;
        [rho, p, S::lit(0.0), S::lit(0.0), v3, b1, b2, b_z]
    }
}

impl MhdField for G5 {
    fn id(&self) -> &str {
        "G5"
    }

    fn gamma(&self) -> f64 {
        5.0 / 3.0
    }

    fn metadata(&self) -> FamilyMetadata {
        let mut meta = describe("G5").expect("own id");
        meta.combo = format!("J3+({})*G+({})*H", self.alpha1, self.alpha2);
        meta.algebra[0] = meta.combo.clone();
        meta
    }

    fn sample_window(&self) -> SampleWindow {
        // Corner radii of the box [a, b]^2 are a*sqrt(2) and b*sqrt(2),
        // so this box keeps every draw inside the profile span.
        let (lo, hi) = self.profile.span();
        let a = 1.02 * lo / std::f64::consts::SQRT_2;
        let b = 0.98 * hi / std::f64::consts::SQRT_2;
        SampleWindow { t: (0.0, 2.0), x: (a, b), y: (a, b), z: (-2.0, 2.0) }
    }

    fn check_point(&self, p: &SpacetimePoint) -> Result<()> {
        if p.y == 0.0 && p.x <= 0.0 {
            return Err(crate::error::outside_domain(
                "G5",
                "on the azimuthal branch cut (y = 0, x <= 0)",
            ));
        }
        let r = (p.x * p.x + p.y * p.y).sqrt();
        if !self.profile.contains(r) {
            let (lo, hi) = self.profile.span();
            return Err(crate::error::outside_domain(
                "G5",
                format!("radius {r:.6} outside the solved window [{lo:.6}, {hi:.6}]"),
            ));
        }
        Ok(())
    }

    eval_via_components!();

    fn reference_quantities(&self, p: &SpacetimePoint) -> Result<ReferenceQuantities> {
        let s = self.state(p)?;
        let r = (p.x * p.x + p.y * p.y).sqrt();
        let (cos_phi, sin_phi) = (p.x / r, p.y / r);
        let row = self.profile.eval_clamped(r);
        let yv = row[0];
        let beta_o = (2.0 * self.a_o + self.z_o * self.z_o) / (self.x_o * self.x_o);
        let y1 = self.alpha2 * beta_o * r * yv.cos().powi(2) + self.alpha2 / r;
        let tan_y = yv.tan();
        // Cylindrical components of state vectors.
        let b_r = s.b.x * cos_phi + s.b.y * sin_phi;
        let b_phi = -s.b.x * sin_phi + s.b.y * cos_phi;
        let k = self.alpha2 / r;
        let j_cyl = Vec3::new(
            k * s.b.z,
            k * tan_y * s.b.z,
            b_r / yv.cos().powi(2) * y1 - k * b_phi * tan_y - k * b_r,
        );
        let j = Vec3::new(
            j_cyl.x * cos_phi - j_cyl.y * sin_phi,
            j_cyl.x * sin_phi + j_cyl.y * cos_phi,
            j_cyl.z,
        );
        let w_cyl = Vec3::new(self.alpha1 * s.v.z / r, self.alpha1 * tan_y * s.v.z / r, 0.0);
        let vorticity = Vec3::new(
            w_cyl.x * cos_phi - w_cyl.y * sin_phi,
            w_cyl.x * sin_phi + w_cyl.y * cos_phi,
            0.0,
        );
        Ok(ReferenceQuantities {
            current: Some(j),
            magnetic_force: Some(j.cross(s.b)),
            vorticity: Some(vorticity),
        })
    }
}
