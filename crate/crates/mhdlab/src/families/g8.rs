//! Inertial flow with a spatially uniform, decaying magnetic field.
//!
//! Every fluid element moves in a straight line (zero acceleration), and
//! the magnetic field is uniform in space at each instant, so the current
//! vanishes and the field exerts no force. Density rides on a quadratic
//! clock divided by the square of a moving planar coordinate. The field
//! components are not independent: the induction balance ties the axial
//! component to the transverse ones.

use super::{
    check_variant, eval_via_components, FamilyMetadata, MhdField, ParamInfo,
    ReferenceQuantities, SampleWindow, SolutionFamily,
};
use crate::error::Result;
use crate::params::{get, ParamMap, Violations};
use crate::scalar::Scalar;
use crate::state::SpacetimePoint;
use crate::vec3::Vec3;

#[derive(Clone, Debug)]
pub struct G8 {
    gamma: f64,
    alpha: f64,
    beta: f64,
    u_o: f64,
    v_o: f64,
    w_o: f64,
    x_o: f64,
    y_o: f64,
    z_o: f64,
    a_o: f64,
    r_o: f64,
}

pub fn describe(_id: &str) -> Result<FamilyMetadata> {
    Ok(FamilyMetadata {
        id: "G8".to_string(),
        group: "G8".to_string(),
        title: "force-free inertial flow with a uniform decaying field".to_string(),
        combo: "F+G".to_string(),
        algebra: vec![
            "F+G".to_string(),
            "K1+P2+1*P3".to_string(),
            "P1+1*P2".to_string(),
        ],
        gamma: 5.0 / 3.0,
        gamma_fixed: false,
        parameters: vec![
            ParamInfo { name: "alpha", default: 1.0, constraint: "nonzero" },
            ParamInfo { name: "beta", default: 1.0, constraint: "positive" },
            ParamInfo { name: "U_o", default: 0.2, constraint: "drift offset" },
            ParamInfo { name: "V_o", default: 0.3, constraint: "drift offset" },
            ParamInfo { name: "W_o", default: 1.0, constraint: "positive axial drift" },
            ParamInfo { name: "X_o", default: 0.4, constraint: "field scale" },
            ParamInfo { name: "Y_o", default: 0.6, constraint: "field scale" },
            ParamInfo {
                name: "Z_o",
                default: 0.2,
                constraint: "must equal alpha (Y_o - beta X_o)",
            },
            ParamInfo { name: "A_o", default: 1.0, constraint: "positive pressure scale" },
            ParamInfo {
                name: "R_o",
                default: 2.0,
                constraint: "exceeds (W_o + beta U_o + alpha V_o)^2 / (2 beta W_o)",
            },
            ParamInfo { name: "gamma", default: 5.0 / 3.0, constraint: "at least 1" },
        ],
        domain: "q = alpha (beta x - y) + (1 - beta t) z != 0".to_string(),
        force_free: true,
        circulation_conserved: true,
        planar_b: false,
        static_flow: false,
        variants: vec![],
        notes: vec![
            "fluid acceleration vanishes identically".to_string(),
            "the clock R(t) stays positive under the stated parameter bound".to_string(),
        ],
    })
}

pub fn validate(params: &ParamMap) -> Result<()> {
    let mut v = Violations::new();
    let alpha = get(params, "alpha");
    let beta = get(params, "beta");
    let u_o = get(params, "U_o");
    let v_o = get(params, "V_o");
    let w_o = get(params, "W_o");
    let x_o = get(params, "X_o");
    let y_o = get(params, "Y_o");
    let z_o = get(params, "Z_o");
    v.require(alpha != 0.0, "alpha: must be nonzero");
    v.require(beta > 0.0, "beta: must be positive");
    v.require(w_o > 0.0, "W_o: must be positive");
    v.require(get(params, "A_o") > 0.0, "A_o: must be positive");
    v.require(get(params, "gamma") >= 1.0, "gamma: must be at least 1");
    let tied = alpha * (y_o - beta * x_o);
    v.require(
        (z_o - tied).abs() <= 1e-12 * (1.0 + tied.abs()),
        "Z_o: induction ties Z_o = alpha (Y_o - beta X_o)",
    );
    if beta > 0.0 && w_o > 0.0 {
        let m = w_o + beta * u_o + alpha * v_o;
        v.require(
            get(params, "R_o") > m * m / (2.0 * beta * w_o),
            "R_o: must exceed (W_o + beta U_o + alpha V_o)^2 / (2 beta W_o)",
        );
    }
    v.into_result("G8")
}

pub fn build(params: &ParamMap, variant: Option<&str>) -> Result<SolutionFamily> {
    check_variant("G8", variant, &[])?;
    validate(params)?;
    Ok(Box::new(G8 {
        gamma: get(params, "gamma"),
        alpha: get(params, "alpha"),
        beta: get(params, "beta"),
        u_o: get(params, "U_o"),
        v_o: get(params, "V_o"),
        w_o: get(params, "W_o"),
        x_o: get(params, "X_o"),
        y_o: get(params, "Y_o"),
        z_o: get(params, "Z_o"),
        a_o: get(params, "A_o"),
        r_o: get(params, "R_o"),
    }))
}

impl G8 {
    fn planar_coordinate(&self, p: &SpacetimePoint) -> f64 {
        self.alpha * (self.beta * p.x - p.y) + (1.0 - self.beta * p.t) * p.z
    }

    fn clock(&self, t: f64) -> f64 {
        let m = self.w_o + self.beta * self.u_o + self.alpha * self.v_o;
        self.beta * self.w_o * t * t - m * t + self.r_o
    }

    fn components<S: Scalar>(&self, t: S, x: S, y: S, z: S) -> [S; 8] {
        let (al, be) = (self.alpha, self.beta);
        let m = self.w_o + be * self.u_o + al * self.v_o;
        let q = (x * be - y) * al + (-t * be + 1.0) * z;
        let r = t * t * (be * self.w_o) - t * m + self.r_o;
        let rho = r / (q * q);
        let p = r.powf(-self.gamma) * self.a_o;
        let v1 = z / al + q / r * (t * self.w_o - self.u_o) / al;
        let v2 = q / r * self.v_o;
        let v3 = q / r * (-self.w_o);
        let b1 = (t * (self.z_o / al) + self.x_o) / r;
        let b2 = r.recip() * self.y_o;
        let b3 = r.recip() * self.z_o;
        [rho, p, v1, v2, v3, b1, b2, b3]
    }
}

impl MhdField for G8 {
    fn id(&self) -> &str {
        "G8"
    }

    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn metadata(&self) -> FamilyMetadata {
        let mut meta = describe("G8").expect("own id");
        meta.gamma = self.gamma;
        meta.algebra = vec![
            format!("K1+P2+({})*P3", self.alpha),
            format!("P1+({})*P2", self.beta),
        ];
        meta
    }

    fn sample_window(&self) -> SampleWindow {
        SampleWindow { t: (0.2, 3.0), x: (-2.0, 2.0), y: (-2.0, 2.0), z: (-2.0, 2.0) }
    }

    fn check_point(&self, p: &SpacetimePoint) -> Result<()> {
        if self.planar_coordinate(p) == 0.0 {
            return Err(crate::error::outside_domain(
                "G8",
                "the moving planar coordinate vanishes here",
            ));
        }
        Ok(())
    }

    eval_via_components!();

    fn reference_quantities(&self, p: &SpacetimePoint) -> Result<ReferenceQuantities> {
        self.check_point(p)?;
        let r = self.clock(p.t);
        let (al, be, t) = (self.alpha, self.beta, p.t);
        let vorticity = Vec3::new(
            (be * self.v_o * t + al * self.w_o - self.v_o) / r,
            (self.r_o - self.u_o + al * al * be * self.w_o - al * self.v_o * t) / (al * r),
            (self.w_o * t + al * be * self.v_o - self.u_o) / r,
        );
        Ok(ReferenceQuantities {
            current: Some(Vec3::ZERO),
            magnetic_force: Some(Vec3::ZERO),
            vorticity: Some(vorticity),
        })
    }
}
