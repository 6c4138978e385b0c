//! Spiral equilibrium with an axially sheared flow.
//!
//! Fields are constant on logarithmic spirals `r e^{-alpha1 phi} = const`
//! and scale exponentially in the azimuth and in two spiral twist
//! integrals. The general pitch angle solves an integro-differential
//! equation carried as a [`ReducedProfile`]; the twist-free sub-case
//! closes in elementary functions and is registered separately as
//! `G6/alpha2=0`, where the magnetic field becomes curl-free.

use super::{
    check_variant, eval_via_components, FamilyMetadata, MhdField, ParamInfo,
    ReferenceQuantities, SampleWindow, SolutionFamily,
};
use crate::error::Result;
use crate::params::{get, ParamMap, Violations};
use crate::reduced::{solve_g6, HelicalPitchParams, ReducedProfile};
use crate::scalar::Scalar;
use crate::state::SpacetimePoint;
use crate::vec3::Vec3;
use std::sync::Arc;

/// Axial speed twisted by the pressure rate instead of its own, as
/// displayed at the source; breaks field-line advection of the flow.
pub const PRINTED_VZ: &str = "printed-vz";
/// Axial field linear in the swirl combination instead of exponential,
/// as displayed at the source; breaks the transverse force balance.
pub const PRINTED_BZ: &str = "printed-Bz";
/// Flux-surface density twisted by the pressure rate alone, as displayed
/// at the source; field lines then leave the density surfaces.
pub const PRINTED_RHO: &str = "printed-rho";

#[derive(Clone)]
pub struct G6 {
    profile: Arc<ReducedProfile>,
    alpha1: f64,
    alpha2: f64,
    beta_o: f64,
    a_o: f64,
    x_o: f64,
    z_o: f64,
    w_o: f64,
    r_o: f64,
    lambda: f64,
    vz_rate: f64,
    rho_rate: f64,
    bz_linear: bool,
}

/// The curl-free sub-case: pitch varies logarithmically with the spiral
/// coordinate and every twist integral closes in elementary functions.
#[derive(Clone, Debug)]
pub struct G6Alpha2Zero {
    alpha1: f64,
    a_o: f64,
    x_o: f64,
    z_o: f64,
    w_o: f64,
    r_o: f64,
    lambda: f64,
    y_o: f64,
    /// Radial exponent of the axial speed; the self-consistent value is
    /// `alpha1^2 / (1 + alpha1^2)`.
    vz_r_exp: f64,
}

pub fn describe(id: &str) -> Result<FamilyMetadata> {
    match id {
        "G6" => Ok(FamilyMetadata {
            id: "G6".to_string(),
            group: "G6".to_string(),
            title: "spiral pitch-profile equilibrium with axial shear".to_string(),
            combo: "J3+0.8*F+0.8*G+(-0.5)*H".to_string(),
            algebra: vec![
                "J3+0.8*F+0.8*G+(-0.5)*H".to_string(),
                "P0".to_string(),
                "P3".to_string(),
            ],
            gamma: 5.0 / 3.0,
            gamma_fixed: false,
            parameters: vec![
                ParamInfo { name: "alpha1", default: 0.8, constraint: "spiral rate, nonzero" },
                ParamInfo { name: "alpha2", default: -0.5, constraint: "pressure/field rate" },
                ParamInfo { name: "A_o", default: 0.5, constraint: "pressure scale, positive" },
                ParamInfo { name: "X_o", default: 1.0, constraint: "nonzero transverse field scale" },
                ParamInfo { name: "Z_o", default: 0.7, constraint: "axial field scale" },
                ParamInfo { name: "W_o", default: 0.6, constraint: "axial speed scale" },
                ParamInfo { name: "R_o", default: 1.0, constraint: "positive density scale" },
                ParamInfo { name: "lambda", default: 0.0, constraint: "density profile exponent" },
                ParamInfo {
                    name: "Y_o",
                    default: 0.1,
                    constraint: "pitch at s0, away from the singular direction",
                },
                ParamInfo { name: "s0", default: 1.0, constraint: "twist anchor, in [s_min, s_max]" },
                ParamInfo { name: "s_min", default: 0.2, constraint: "inner spiral coordinate, positive" },
                ParamInfo { name: "s_max", default: 3.0, constraint: "outer spiral coordinate, > s_min" },
            ],
            domain: "spiral coordinate inside the solved window, off the azimuthal branch cut"
                .to_string(),
            force_free: false,
            circulation_conserved: true,
            planar_b: false,
            static_flow: true,
            variants: vec![PRINTED_VZ, PRINTED_BZ, PRINTED_RHO],
            notes: vec![
                "the pitch equation may reach the singular direction arctan(1/alpha1) before \
                 s_max; the domain then ends at the flagged spiral coordinate"
                    .to_string(),
                "twist integrals are anchored to zero at s0".to_string(),
            ],
        }),
        "G6/alpha2=0" => Ok(FamilyMetadata {
            id: "G6/alpha2=0".to_string(),
            group: "G6".to_string(),
            title: "curl-free spiral field with axial shear".to_string(),
            combo: "J3+0.8*F+0.8*G".to_string(),
            algebra: vec!["J3+0.8*F+0.8*G".to_string(), "P0".to_string(), "P3".to_string()],
            gamma: 5.0 / 3.0,
            gamma_fixed: false,
            parameters: vec![
                ParamInfo { name: "alpha1", default: 0.8, constraint: "spiral rate, nonzero" },
                ParamInfo { name: "A_o", default: 0.5, constraint: "uniform pressure, positive" },
                ParamInfo { name: "X_o", default: 1.0, constraint: "transverse field scale" },
                ParamInfo { name: "Z_o", default: 0.7, constraint: "axial field scale" },
                ParamInfo { name: "W_o", default: 0.6, constraint: "axial speed scale" },
                ParamInfo { name: "R_o", default: 1.0, constraint: "positive density scale" },
                ParamInfo { name: "lambda", default: 0.0, constraint: "density profile exponent" },
                ParamInfo { name: "Y_o", default: 0.4, constraint: "pitch at unit spiral coordinate" },
            ],
            domain: "off the azimuthal branch cut and the singular pitch cylinder".to_string(),
            force_free: true,
            circulation_conserved: true,
            planar_b: false,
            static_flow: true,
            variants: vec![PRINTED_VZ],
            notes: vec![
                "the magnetic field is a gradient: the current density vanishes identically"
                    .to_string(),
            ],
        }),
        other => Err(crate::error::MhdError::UnknownFamily(other.to_string())),
    }
}

pub fn validate(id: &str, params: &ParamMap) -> Result<()> {
    let mut v = Violations::new();
    let alpha1 = get(params, "alpha1");
    v.require(alpha1 != 0.0, "alpha1: must be nonzero");
    v.require(get(params, "A_o") > 0.0, "A_o: must be positive");
    v.require(get(params, "R_o") > 0.0, "R_o: must be positive");
    if id == "G6" {
        v.require(get(params, "X_o") != 0.0, "X_o: must be nonzero");
        let y_o = get(params, "Y_o");
        v.require(
            (y_o.cos() - alpha1 * y_o.sin()).abs() > 1e-6,
            "Y_o: pitch must start away from the singular direction arctan(1/alpha1)",
        );
        let s_min = get(params, "s_min");
        let s_max = get(params, "s_max");
        let s0 = get(params, "s0");
        v.require(s_min > 0.0, "s_min: must be positive");
        v.require(s_max > s_min, "s_max: must exceed s_min");
        v.require(
            (s_min..=s_max).contains(&s0),
            "s0: twist anchor must lie inside [s_min, s_max]",
        );
    }
    v.into_result(id)
}

/// Stress ratio steering the pitch equation.
fn stress_ratio(params: &ParamMap) -> f64 {
    let z_o = get(params, "Z_o");
    (2.0 * get(params, "A_o") + z_o * z_o) / get(params, "X_o").powi(2)
}

pub fn build(id: &str, params: &ParamMap, variant: Option<&str>) -> Result<SolutionFamily> {
    match id {
        "G6" => {
            check_variant(id, variant, &[PRINTED_VZ, PRINTED_BZ, PRINTED_RHO])?;
            validate(id, params)?;
            let pitch = HelicalPitchParams {
                alpha1: get(params, "alpha1"),
                alpha2: get(params, "alpha2"),
                beta_o: stress_ratio(params),
            };
            let y_o = get(params, "Y_o");
            let s0 = get(params, "s0");
            let s_min = get(params, "s_min");
            let s_max = get(params, "s_max");
            let tol = 1e-10;
            let lower = if s0 > s_min {
                Some(solve_g6(&pitch, (s0, s_min), y_o, tol)?)
            } else {
                None
            };
            let upper = if s0 < s_max {
                Some(solve_g6(&pitch, (s0, s_max), y_o, tol)?)
            } else {
                None
            };
            let profile = match (lower, upper) {
                (Some(a), Some(b)) => ReducedProfile::merge(a, b)?,
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (None, None) => unreachable!("s_min < s_max"),
            };
            assemble(Arc::new(profile), params, variant)
        }
        "G6/alpha2=0" => {
            check_variant(id, variant, &[PRINTED_VZ])?;
            validate(id, params)?;
            let alpha1 = get(params, "alpha1");
            let b2 = 1.0 + alpha1 * alpha1;
            Ok(Box::new(G6Alpha2Zero {
                alpha1,
                a_o: get(params, "A_o"),
                x_o: get(params, "X_o"),
                z_o: get(params, "Z_o"),
                w_o: get(params, "W_o"),
                r_o: get(params, "R_o"),
                lambda: get(params, "lambda"),
                y_o: get(params, "Y_o"),
                vz_r_exp: if variant == Some(PRINTED_VZ) {
                    alpha1 / b2
                } else {
                    alpha1 * alpha1 / b2
                },
            }))
        }
        other => Err(crate::error::MhdError::UnknownFamily(other.to_string())),
    }
}

/// Wraps an externally solved pitch profile in the full spiral field.
pub fn from_profile(profile: Arc<ReducedProfile>, params: &ParamMap) -> Result<SolutionFamily> {
    let merged = crate::params::merge_params("G6", &super::default_params("G6")?, params)?;
    validate("G6", &merged)?;
    if profile.component_names() != ["Y", "theta1", "theta2"] {
        return Err(crate::error::MhdError::Parse(format!(
            "profile carries components {:?}; the spiral family needs [\"Y\", \"theta1\", \"theta2\"]",
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
    Ok(Box::new(G6 {
        profile,
        alpha1,
        alpha2,
        beta_o: stress_ratio(params),
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
        bz_linear: variant == Some(PRINTED_BZ),
    }))
}

impl G6 {
    /// Pitch and both twists lifted to jets at the spiral coordinate,
    /// with slopes and curvatures supplied analytically by the pitch
    /// system.
    fn pitch_twists<S: Scalar>(&self, s: S) -> (S, S, S) {
        let sv = s.value();
        let row = self.profile.eval_clamped(sv);
        let (yv, t1v, t2v) = (row[0], row[1], row[2]);
        let b2 = 1.0 + self.alpha1 * self.alpha1;
        let k = self.alpha2 * self.beta_o / b2;
        let c = (self.alpha1 + self.alpha2) / b2;
        let (sin_y, cos_y) = yv.sin_cos();
        let d = cos_y - self.alpha1 * sin_y;
        let e = (2.0 * t1v).exp();
        let y1 = (k * d * d * e + c) / sv;
        let d1 = -(sin_y + self.alpha1 * cos_y) * y1;
        let t1_1 = cos_y / (d * sv);
        let t2_1 = sin_y / (d * sv);
        let y2 = 2.0 * k * e * d * (d1 + d * t1_1) / sv - y1 / sv;
        let t1_2 = -sin_y * y1 / (d * sv) - cos_y * d1 / (d * d * sv) - t1_1 / sv;
        let t2_2 = cos_y * y1 / (d * sv) - sin_y * d1 / (d * d * sv) - t2_1 / sv;
        (s.lift1(yv, y1, y2), s.lift1(t1v, t1_1, t1_2), s.lift1(t2v, t2_1, t2_2))
    }

    fn spiral_coordinate(&self, x: f64, y: f64) -> f64 {
        let r = (x * x + y * y).sqrt();
        let phi = y.atan2(x);
        r * (-self.alpha1 * phi).exp()
    }

    fn components<S: Scalar>(&self, _t: S, x: S, y: S, _z: S) -> [S; 8] {
        let r = x.hypot(y);
        let phi = y.atan2(x);
        let spiral = r * (phi.scale(-self.alpha1)).exp();
        let (pitch, tw1, tw2) = self.pitch_twists(spiral);
        let (sin_y, cos_y) = (pitch.sin(), pitch.cos());
        let dir = cos_y - sin_y.scale(self.alpha1);
        let swirl = phi - tw2;
        let envelope = swirl.scale(self.alpha2).exp();
        let amp = (phi.scale(self.alpha2) - tw1 - tw2.scale(self.alpha2)).exp() / dir
            * self.x_o;
        let rho = spiral.powf(self.lambda)
            * (phi.scale(2.0 * (self.alpha2 - self.alpha1)) - tw2.scale(self.rho_rate)).exp()
            * self.r_o;
        let p = envelope * envelope * self.a_o;
        let v3 = (phi.scale(self.alpha1) - tw2.scale(self.vz_rate)).exp() * self.w_o;
        let b_r = amp * cos_y;
        let b_phi = amp * sin_y;
        let b_z =
            if self.bz_linear { swirl.scale(self.alpha2 * self.z_o) } else { envelope * self.z_o };
        let (cos_phi, sin_phi) = (x / r, y / r);
        [
            rho,
            p,
            S::lit(0.0),
            S::lit(0.0),
            v3,
            b_r * cos_phi - b_phi * sin_phi,
            b_r * sin_phi + b_phi * cos_phi,
            b_z,
        ]
    }
}

impl MhdField for G6 {
    fn id(&self) -> &str {
        "G6"
    }

    fn gamma(&self) -> f64 {
        5.0 / 3.0
    }

    fn metadata(&self) -> FamilyMetadata {
        let mut meta = describe("G6").expect("own id");
        meta.combo = format!(
            "J3+({a})*F+({a})*G+({b})*H",
            a = self.alpha1,
            b = self.alpha2
        );
        meta.algebra[0] = meta.combo.clone();
        meta
    }

    fn sample_window(&self) -> SampleWindow {
        SampleWindow { t: (0.0, 2.0), x: (0.6, 2.2), y: (0.4, 2.0), z: (-2.0, 2.0) }
    }

    fn check_point(&self, p: &SpacetimePoint) -> Result<()> {
        if p.y == 0.0 && p.x <= 0.0 {
            return Err(crate::error::outside_domain(
                "G6",
                "on the azimuthal branch cut (y = 0, x <= 0)",
            ));
        }
        let s = self.spiral_coordinate(p.x, p.y);
        if !self.profile.contains(s) {
            let (lo, hi) = self.profile.span();
            return Err(crate::error::outside_domain(
                "G6",
                format!("spiral coordinate {s:.6} outside the solved window [{lo:.6}, {hi:.6}]"),
            ));
        }
        Ok(())
    }

    eval_via_components!();

    fn reference_quantities(&self, p: &SpacetimePoint) -> Result<ReferenceQuantities> {
        let state = self.state(p)?;
        let r = (p.x * p.x + p.y * p.y).sqrt();
        let phi = p.y.atan2(p.x);
        let (cos_phi, sin_phi) = (p.x / r, p.y / r);
        let s = self.spiral_coordinate(p.x, p.y);
        let row = self.profile.eval_clamped(s);
        let yv = row[0];
        let (sin_y, cos_y) = yv.sin_cos();
        let d = cos_y - self.alpha1 * sin_y;
        let b2 = 1.0 + self.alpha1 * self.alpha1;
        let k = self.alpha2 * self.beta_o / b2;
        let y1 = (k * d * d * (2.0 * row[1]).exp() + (self.alpha1 + self.alpha2) / b2) / s;
        let b_r = state.b.x * cos_phi + state.b.y * sin_phi;
        let b_phi = -state.b.x * sin_phi + state.b.y * cos_phi;
        let j_cyl = Vec3::new(
            self.alpha2 / r * cos_y * state.b.z / d,
            self.alpha2 / r * sin_y * state.b.z / d,
            (b_phi - self.alpha2 * b_r) / r
                - (cos_y + self.alpha2 * sin_y) / (r * d) * (b_phi + self.alpha1 * b_r)
                + b2 * (-self.alpha1 * phi).exp() * (cos_y * b_r + sin_y * b_phi) / d * y1,
        );
        let j = Vec3::new(
            j_cyl.x * cos_phi - j_cyl.y * sin_phi,
            j_cyl.x * sin_phi + j_cyl.y * cos_phi,
            j_cyl.z,
        );
        let w_scale = self.alpha1 * state.v.z / (r * d);
        let vorticity = Vec3::new(
            w_scale * (cos_y * cos_phi - sin_y * sin_phi),
            w_scale * (cos_y * sin_phi + sin_y * cos_phi),
            0.0,
        );
        Ok(ReferenceQuantities {
            current: Some(j),
            magnetic_force: Some(j.cross(state.b)),
            vorticity: Some(vorticity),
        })
    }
}

impl G6Alpha2Zero {
    fn pitch_at(&self, s: f64) -> f64 {
        self.y_o + self.alpha1 / (1.0 + self.alpha1 * self.alpha1) * s.ln()
    }

    fn components<S: Scalar>(&self, _t: S, x: S, y: S, _z: S) -> [S; 8] {
        let a1 = self.alpha1;
        let b2 = 1.0 + a1 * a1;
        let r = x.hypot(y);
        let phi = y.atan2(x);
        let spiral = r * (phi.scale(-a1)).exp();
        let pitch = spiral.ln().scale(a1 / b2) + self.y_o;
        let (sin_y, cos_y) = (pitch.sin(), pitch.cos());
        let dir = cos_y - sin_y.scale(a1);
        let swirl = (phi.scale(a1 / b2)).exp();
        let rho = spiral.powf(self.lambda - 2.0 * a1 * a1 / b2) / (dir * dir)
            * (phi.scale(-2.0 * a1)).exp()
            * self.r_o;
        let v3 = r.powf(self.vz_r_exp) * swirl * (sin_y.scale(a1) - cos_y) * self.w_o;
        let amp = r.powf(-1.0 / b2) * swirl * self.x_o;
        let b_r = amp * cos_y;
        let b_phi = amp * sin_y;
        let (cos_phi, sin_phi) = (x / r, y / r);
        [
            rho,
            S::lit(self.a_o),
            S::lit(0.0),
            S::lit(0.0),
            v3,
            b_r * cos_phi - b_phi * sin_phi,
            b_r * sin_phi + b_phi * cos_phi,
            S::lit(self.z_o),
        ]
    }
}

impl MhdField for G6Alpha2Zero {
    fn id(&self) -> &str {
        "G6/alpha2=0"
    }

    fn gamma(&self) -> f64 {
        5.0 / 3.0
    }

    fn metadata(&self) -> FamilyMetadata {
        let mut meta = describe("G6/alpha2=0").expect("own id");
        meta.combo = format!("J3+({a})*F+({a})*G", a = self.alpha1);
        meta.algebra[0] = meta.combo.clone();
        meta
    }

    fn sample_window(&self) -> SampleWindow {
        SampleWindow { t: (0.0, 2.0), x: (0.35, 1.1), y: (0.35, 1.1), z: (-2.0, 2.0) }
    }

    fn check_point(&self, p: &SpacetimePoint) -> Result<()> {
        if p.y == 0.0 && p.x <= 0.0 {
            return Err(crate::error::outside_domain(
                "G6/alpha2=0",
                "on the azimuthal branch cut (y = 0, x <= 0)",
            ));
        }
        let r = (p.x * p.x + p.y * p.y).sqrt();
        if !(r > 0.0) {
            return Err(crate::error::outside_domain("G6/alpha2=0", "on the axis"));
        }
        let s = r * (-self.alpha1 * p.y.atan2(p.x)).exp();
        let yv = self.pitch_at(s);
        if (yv.cos() - self.alpha1 * yv.sin()).abs() < 1e-6 {
            return Err(crate::error::outside_domain(
                "G6/alpha2=0",
                "on the singular pitch cylinder (density diverges)",
            ));
        }
        Ok(())
    }

    eval_via_components!();

    fn reference_quantities(&self, p: &SpacetimePoint) -> Result<ReferenceQuantities> {
        let state = self.state(p)?;
        let r = (p.x * p.x + p.y * p.y).sqrt();
        let (cos_phi, sin_phi) = (p.x / r, p.y / r);
        let s = r * (-self.alpha1 * p.y.atan2(p.x)).exp();
        let yv = self.pitch_at(s);
        let (sin_y, cos_y) = yv.sin_cos();
        let d = cos_y - self.alpha1 * sin_y;
        let w_scale = self.alpha1 * state.v.z / (r * d);
        let vorticity = Vec3::new(
            w_scale * (cos_y * cos_phi - sin_y * sin_phi),
            w_scale * (cos_y * sin_phi + sin_y * cos_phi),
            0.0,
        );
        Ok(ReferenceQuantities {
            current: Some(Vec3::new(0.0, 0.0, 0.0)),
            magnetic_force: Some(Vec3::new(0.0, 0.0, 0.0)),
            vorticity: Some(vorticity),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffcalc::{convective, convective_vec, curl, div, grad};
    use crate::families::{make_family, make_family_with, sample_points};
    use crate::jet::T;
    use approx::assert_relative_eq;

    fn fam() -> SolutionFamily {
        make_family("G6", &ParamMap::new()).unwrap()
    }

    // Pitch system values at s = 1.5 from an independent high-precision
    // integration with the default parameters (anchor s0 = 1).
    const Y_AT_15: f64 = -0.111_860_596_618_415_10;
    const T1_AT_15: f64 = 0.413_534_701_274_613_08;
    const T2_AT_15: f64 = 0.010_086_991_458_060_875;

    fn induction_residual(fam: &SolutionFamily, p: &SpacetimePoint) -> f64 {
        let j = fam.state_jet(p).unwrap();
        let vxb = [
            j.v[1] * j.b[2] - j.v[2] * j.b[1],
            j.v[2] * j.b[0] - j.v[0] * j.b[2],
            j.v[0] * j.b[1] - j.v[1] * j.b[0],
        ];
        let dbdt = Vec3::new(j.b[0].g[T], j.b[1].g[T], j.b[2].g[T]);
        (dbdt - curl(&vxb)).max_abs()
    }

    #[test]
    fn anchor_state_is_elementary() {
        // At the twist anchor (phi = 0, s = 1) both twists vanish and the
        // pitch is Y_o, so every field reduces to its scale constant.
        let s = fam().state(&SpacetimePoint::new(0.0, 1.0, 0.0, 0.5)).unwrap();
        let d = 0.1_f64.cos() - 0.8 * 0.1_f64.sin();
        assert_relative_eq!(s.p, 0.5, epsilon = 1e-10);
        assert_relative_eq!(s.v.z, 0.6, epsilon = 1e-10);
        assert_relative_eq!(s.rho, 1.0, epsilon = 1e-10);
        assert_relative_eq!(s.b.x, 0.1_f64.cos() / d, epsilon = 1e-9);
        assert_relative_eq!(s.b.y, 0.1_f64.sin() / d, epsilon = 1e-9);
        assert_relative_eq!(s.b.z, 0.7, epsilon = 1e-10);
        assert!(s.v.x == 0.0 && s.v.y == 0.0);
    }

    #[test]
    fn frozen_state_off_the_anchor() {
        let phi = 0.3_f64;
        let r = 1.5 * (0.8 * phi).exp();
        let p = SpacetimePoint::new(0.0, r * phi.cos(), r * phi.sin(), -0.4);
        let s = fam().state(&p).unwrap();
        let d = Y_AT_15.cos() - 0.8 * Y_AT_15.sin();
        let amp = (-0.5 * phi - T1_AT_15 + 0.5 * T2_AT_15).exp() / d;
        assert_relative_eq!(s.p, 0.5 * (-1.0 * (phi - T2_AT_15)).exp(), epsilon = 1e-8);
        assert_relative_eq!(s.v.z, 0.6 * (0.8 * (phi - T2_AT_15)).exp(), epsilon = 1e-8);
        assert_relative_eq!(s.rho, (-2.6 * (phi - T2_AT_15)).exp(), epsilon = 1e-8);
        let b_r = s.b.x * phi.cos() + s.b.y * phi.sin();
        let b_phi = -s.b.x * phi.sin() + s.b.y * phi.cos();
        assert_relative_eq!(b_r, amp * Y_AT_15.cos(), epsilon = 1e-8);
        assert_relative_eq!(b_phi, amp * Y_AT_15.sin(), epsilon = 1e-8);
        assert_relative_eq!(s.b.z, 0.7 * (-0.5 * (phi - T2_AT_15)).exp(), epsilon = 1e-8);
    }

    #[test]
    fn transverse_force_balance_holds() {
        let f = fam();
        let mut worst = 0.0_f64;
        for p in sample_points(f.as_ref(), 29, 100).unwrap() {
            let j = f.state_jet(&p).unwrap();
            let ptot = j.p + (j.b[0] * j.b[0] + j.b[1] * j.b[1] + j.b[2] * j.b[2]) * 0.5;
            let b = j.state().unwrap().b;
            let defect = grad(&ptot) - convective_vec(b, &j.b);
            let r = (p.x * p.x + p.y * p.y).sqrt();
            let e_r = Vec3::new(p.x / r, p.y / r, 0.0);
            let e_phi = Vec3::new(-p.y / r, p.x / r, 0.0);
            worst = worst.max(defect.dot(e_r).abs()).max(defect.dot(e_phi).abs());
        }
        assert!(worst < 1e-7, "transverse balance defect {worst:.3e}");
    }

    #[test]
    fn field_lines_stay_on_pressure_and_density_surfaces() {
        let f = fam();
        for p in sample_points(f.as_ref(), 37, 100).unwrap() {
            let j = f.state_jet(&p).unwrap();
            let b = j.state().unwrap().b;
            assert!(convective(b, &j.p).abs() < 1e-8, "B . grad p at {p:?}");
            assert!(convective(b, &j.rho).abs() < 1e-8, "B . grad rho at {p:?}");
            assert!(div(&j.b).abs() < 1e-8);
        }
    }

    #[test]
    fn corrected_speed_satisfies_induction_and_printed_does_not() {
        let p = SpacetimePoint::new(0.0, 1.3, 0.7, 0.2);
        let good = fam();
        let printed = make_family_with("G6", &ParamMap::new(), Some(PRINTED_VZ)).unwrap();
        assert!(induction_residual(&good, &p) < 1e-8);
        assert!(induction_residual(&printed, &p) > 1e-3);
    }

    #[test]
    fn linear_axial_field_breaks_the_balance() {
        let printed = make_family_with("G6", &ParamMap::new(), Some(PRINTED_BZ)).unwrap();
        let p = SpacetimePoint::new(0.0, 1.3, 0.7, 0.2);
        let j = printed.state_jet(&p).unwrap();
        let ptot = j.p + (j.b[0] * j.b[0] + j.b[1] * j.b[1] + j.b[2] * j.b[2]) * 0.5;
        let b = j.state().unwrap().b;
        let defect = grad(&ptot) - convective_vec(b, &j.b);
        assert!(defect.max_abs() > 1e-3, "defect {:.3e}", defect.max_abs());
    }

    #[test]
    fn printed_density_leaves_flux_surfaces() {
        let printed = make_family_with("G6", &ParamMap::new(), Some(PRINTED_RHO)).unwrap();
        let p = SpacetimePoint::new(0.0, 1.3, 0.7, 0.2);
        let j = printed.state_jet(&p).unwrap();
        let b = j.state().unwrap().b;
        assert!(convective(b, &j.rho).abs() > 1e-3);
    }

    #[test]
    fn published_current_and_vorticity_match_the_jets() {
        let f = fam();
        for p in sample_points(f.as_ref(), 43, 24).unwrap() {
            let j = f.state_jet(&p).unwrap();
            let r = f.reference_quantities(&p).unwrap();
            let jc = r.current.unwrap();
            assert!((curl(&j.b) - jc).max_abs() < 1e-7, "current at {p:?}");
            assert!((curl(&j.v) - r.vorticity.unwrap()).max_abs() < 1e-8);
        }
    }

    #[test]
    fn domain_truncates_at_a_flagged_pitch_singularity() {
        // Flipping the twist forcing positive drives the pitch into the
        // singular direction near s = 2.149; the family still builds but
        // its domain ends there.
        let mut params = ParamMap::new();
        params.insert("alpha2".to_string(), 0.5);
        let f = make_family("G6", &params).unwrap();
        assert!(f.contains(&SpacetimePoint::new(0.0, 2.0, 0.0, 0.0)));
        assert!(!f.contains(&SpacetimePoint::new(0.0, 2.5, 0.0, 0.0)));
    }

    #[test]
    fn domain_rejects_outside_window_and_cut() {
        let f = fam();
        assert!(!f.contains(&SpacetimePoint::new(0.0, 0.05, 0.05, 0.0)));
        assert!(!f.contains(&SpacetimePoint::new(0.0, -1.0, 0.0, 0.0)));
        assert!(f.contains(&SpacetimePoint::new(0.0, 1.0, 0.5, 0.0)));
    }

    #[test]
    fn curl_free_sub_case_has_no_current_and_conserves_everything() {
        let f = make_family("G6/alpha2=0", &ParamMap::new()).unwrap();
        for p in sample_points(f.as_ref(), 17, 50).unwrap() {
            let j = f.state_jet(&p).unwrap();
            assert!(curl(&j.b).max_abs() < 1e-9, "current at {p:?}");
            assert!(div(&j.b).abs() < 1e-10);
            let b = j.state().unwrap().b;
            assert!(convective(b, &j.rho).abs() < 1e-9, "B . grad rho at {p:?}");
            assert!(induction_residual(&f, &p) < 1e-9, "induction at {p:?}");
        }
    }

    #[test]
    fn curl_free_sub_case_frozen_values() {
        let f = make_family("G6/alpha2=0", &ParamMap::new()).unwrap();
        // phi = 0, r = 1: s = 1, pitch = Y_o, all power laws collapse.
        let s = f.state(&SpacetimePoint::new(0.0, 1.0, 0.0, 0.0)).unwrap();
        let y = 0.4_f64;
        let d = y.cos() - 0.8 * y.sin();
        assert_relative_eq!(s.p, 0.5, epsilon = 1e-14);
        assert_relative_eq!(s.rho, 1.0 / (d * d), epsilon = 1e-12);
        assert_relative_eq!(s.v.z, 0.6 * (0.8 * y.sin() - y.cos()), epsilon = 1e-12);
        assert_relative_eq!(s.b.x, y.cos(), epsilon = 1e-12);
        assert_relative_eq!(s.b.y, y.sin(), epsilon = 1e-12);
        assert_relative_eq!(s.b.z, 0.7, epsilon = 1e-14);
    }

    #[test]
    fn printed_speed_exponent_breaks_induction_in_the_sub_case() {
        let p = SpacetimePoint::new(0.0, 0.9, 0.6, 0.0);
        let good = make_family("G6/alpha2=0", &ParamMap::new()).unwrap();
        let printed =
            make_family_with("G6/alpha2=0", &ParamMap::new(), Some(PRINTED_VZ)).unwrap();
        assert!(induction_residual(&good, &p) < 1e-10);
        assert!(induction_residual(&printed, &p) > 1e-3);
    }

    #[test]
    fn profile_assembly_round_trips() {
        let pitch = HelicalPitchParams { alpha1: 0.8, alpha2: -0.5, beta_o: 1.49 };
        let lower = solve_g6(&pitch, (1.0, 0.2), 0.1, 1e-10).unwrap();
        let upper = solve_g6(&pitch, (1.0, 3.0), 0.1, 1e-10).unwrap();
        let profile = Arc::new(ReducedProfile::merge(lower, upper).unwrap());
        let via_profile =
            crate::reduced::assemble_field(profile, "G6", &ParamMap::new()).unwrap();
        let p = SpacetimePoint::new(0.0, 1.1, 0.8, 0.3);
        let a = via_profile.state(&p).unwrap();
        let b = fam().state(&p).unwrap();
        assert_relative_eq!(a.p, b.p, epsilon = 1e-12);
        assert!((a.b - b.b).max_abs() < 1e-12);
        assert!((a.v - b.v).max_abs() < 1e-12);
    }
}
