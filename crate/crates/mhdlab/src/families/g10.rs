//! Radially expanding flows with an axial profile, exponent tied to the
//! expansion.
//!
//! Both sub-cases expand as `x/t` in every direction with an axial
//! profile `W(z)` carried along `v3 = W/t`. Case 1 takes a linear profile
//! with a uniform force-free field; case 2 takes a linear profile with a
//! slope of two thirds, a transverse field growing as the square root of
//! the shifted profile, and a genuine magnetic force.

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
pub struct G10Case1 {
    r_o: f64,
    a_o: f64,
    x_o: f64,
    y_o: f64,
    z_o: f64,
    u_o: f64,
    v_o: f64,
    c2: f64,
}

#[derive(Clone, Debug)]
pub struct G10Case2 {
    a_o: f64,
    x_o: f64,
    y_o: f64,
    z_o: f64,
    u_o: f64,
    v_o: f64,
    c2: f64,
}

pub fn describe(id: &str) -> Result<FamilyMetadata> {
    let case1 = id == "G10/case1";
    Ok(FamilyMetadata {
        id: id.to_string(),
        group: "G10".to_string(),
        title: if case1 {
            "uniform-field radial expansion, force-free and irrotational".to_string()
        } else {
            "radial expansion with a root-profile transverse field".to_string()
        },
        combo: "G+2*H".to_string(),
        algebra: vec!["G+2*H".to_string()],
        gamma: if case1 { 4.0 / 3.0 } else { 1.25 },
        gamma_fixed: true,
        parameters: if case1 {
            vec![
                ParamInfo { name: "R_o", default: 1.0, constraint: "positive density scale" },
                ParamInfo { name: "A_o", default: 0.5, constraint: "positive pressure scale" },
                ParamInfo { name: "X_o", default: 0.3, constraint: "field scale" },
                ParamInfo { name: "Y_o", default: 0.4, constraint: "field scale" },
                ParamInfo { name: "Z_o", default: 1.0, constraint: "nonzero axial field" },
                ParamInfo { name: "U_o", default: 0.0, constraint: "transverse center" },
                ParamInfo { name: "V_o", default: 0.0, constraint: "transverse center" },
                ParamInfo { name: "C2", default: 1.0, constraint: "profile offset" },
            ]
        } else {
            vec![
                ParamInfo { name: "A_o", default: 0.5, constraint: "positive pressure scale" },
                ParamInfo { name: "X_o", default: 0.6, constraint: "field scale" },
                ParamInfo { name: "Y_o", default: 0.4, constraint: "field scale" },
                ParamInfo { name: "Z_o", default: 0.8, constraint: "nonzero axial field" },
                ParamInfo { name: "U_o", default: 0.0, constraint: "transverse center" },
                ParamInfo { name: "V_o", default: 0.0, constraint: "transverse center" },
                ParamInfo { name: "C2", default: 1.5, constraint: "profile offset" },
            ]
        },
        domain: if case1 {
            "t != 0 and positive axial profile z + C2".to_string()
        } else {
            "t != 0 and 2z/3 + C2 > Z_o^2 / (2 A_o + X_o^2 + Y_o^2)".to_string()
        },
        force_free: case1,
        circulation_conserved: case1,
        planar_b: false,
        static_flow: false,
        variants: vec![],
        notes: if case1 {
            vec!["velocity is a gradient; vorticity vanishes identically".to_string()]
        } else {
            vec![
                "density scale is tied: rho_0 = 2 A_o + X_o^2 + Y_o^2".to_string(),
                "circulation of advected loops is not conserved".to_string(),
            ]
        },
    })
}

pub fn validate(id: &str, params: &ParamMap) -> Result<()> {
    let mut v = Violations::new();
    v.require(get(params, "A_o") > 0.0, "A_o: must be positive");
    v.require(get(params, "Z_o") != 0.0, "Z_o: must be nonzero");
    if id == "G10/case1" {
        v.require(get(params, "R_o") > 0.0, "R_o: must be positive");
    }
    v.into_result(id)
}

pub fn build(id: &str, params: &ParamMap, variant: Option<&str>) -> Result<SolutionFamily> {
    check_variant(id, variant, &[])?;
    validate(id, params)?;
    let common = |k: &str| get(params, k);
    if id == "G10/case1" {
        Ok(Box::new(G10Case1 {
            r_o: common("R_o"),
            a_o: common("A_o"),
            x_o: common("X_o"),
            y_o: common("Y_o"),
            z_o: common("Z_o"),
            u_o: common("U_o"),
            v_o: common("V_o"),
            c2: common("C2"),
        }))
    } else {
        Ok(Box::new(G10Case2 {
            a_o: common("A_o"),
            x_o: common("X_o"),
            y_o: common("Y_o"),
            z_o: common("Z_o"),
            u_o: common("U_o"),
            v_o: common("V_o"),
            c2: common("C2"),
        }))
    }
}

impl G10Case1 {
    fn components<S: Scalar>(&self, t: S, x: S, y: S, z: S) -> [S; 8] {
        let w = z + self.c2;
        let it = t.recip();
        let it2 = it * it;
        let rho = it2 * w.recip() * self.r_o;
        let p = it2 * it2 * self.a_o;
        let v1 = (x - self.u_o) * it + it * (self.z_o * self.x_o / self.r_o);
        let v2 = (y - self.v_o) * it + it * (self.z_o * self.y_o / self.r_o);
        let v3 = w * it;
        [rho, p, v1, v2, v3, it2 * self.x_o, it2 * self.y_o, it2 * self.z_o]
    }
}

impl MhdField for G10Case1 {
    fn id(&self) -> &str {
        "G10/case1"
    }

    fn gamma(&self) -> f64 {
        4.0 / 3.0
    }

    fn metadata(&self) -> FamilyMetadata {
        describe("G10/case1").expect("own id")
    }

    fn sample_window(&self) -> SampleWindow {
        SampleWindow { t: (0.5, 4.0), x: (-2.0, 2.0), y: (-2.0, 2.0), z: (-0.5, 2.0) }
    }

    fn check_point(&self, p: &SpacetimePoint) -> Result<()> {
        if p.t == 0.0 {
            return Err(crate::error::outside_domain(self.id(), "requires t != 0"));
        }
        if p.z + self.c2 <= 0.0 {
            return Err(crate::error::outside_domain(
                self.id(),
                "requires a positive axial profile z + C2",
            ));
        }
        Ok(())
    }

    eval_via_components!();

    fn reference_quantities(&self, p: &SpacetimePoint) -> Result<ReferenceQuantities> {
        self.check_point(p)?;
        Ok(ReferenceQuantities {
            current: Some(Vec3::ZERO),
            magnetic_force: Some(Vec3::ZERO),
            vorticity: Some(Vec3::ZERO),
        })
    }
}

impl G10Case2 {
    fn density_scale(&self) -> f64 {
        2.0 * self.a_o + self.x_o * self.x_o + self.y_o * self.y_o
    }

    fn pinch(&self) -> f64 {
        self.z_o * self.z_o / self.density_scale()
    }

    fn profile(&self, z: f64) -> f64 {
        2.0 * z / 3.0 + self.c2
    }

    fn components<S: Scalar>(&self, t: S, x: S, y: S, z: S) -> [S; 8] {
        let rho0 = self.density_scale();
        let a2 = self.pinch();
        let w = z * (2.0 / 3.0) + self.c2;
        let root = (w - a2).sqrt();
        let it = t.recip();
        let it2 = it * it;
        let rho = it2 * w.recip() * rho0;
        let p = it2 * it2 * w * self.a_o;
        let v1 = (x - self.u_o) * it + root * it * (a2 * self.x_o / self.z_o);
        let v2 = (y - self.v_o) * it + root * it * (a2 * self.y_o / self.z_o);
        let v3 = w * it;
        let b1 = it2 * root * self.x_o;
        let b2 = it2 * root * self.y_o;
        let b3 = it2 * self.z_o;
        [rho, p, v1, v2, v3, b1, b2, b3]
    }
}

impl MhdField for G10Case2 {
    fn id(&self) -> &str {
        "G10/case2"
    }

    fn gamma(&self) -> f64 {
        1.25
    }

    fn metadata(&self) -> FamilyMetadata {
        describe("G10/case2").expect("own id")
    }

    fn sample_window(&self) -> SampleWindow {
        SampleWindow { t: (0.5, 4.0), x: (-2.0, 2.0), y: (-2.0, 2.0), z: (0.0, 2.5) }
    }

    fn check_point(&self, p: &SpacetimePoint) -> Result<()> {
        if p.t == 0.0 {
            return Err(crate::error::outside_domain(self.id(), "requires t != 0"));
        }
        if self.profile(p.z) <= self.pinch() {
            return Err(crate::error::outside_domain(
                self.id(),
                "requires 2z/3 + C2 above the pinch offset",
            ));
        }
        Ok(())
    }

    eval_via_components!();

    fn reference_quantities(&self, p: &SpacetimePoint) -> Result<ReferenceQuantities> {
        self.check_point(p)?;
        let t4 = p.t.powi(4);
        let root = (self.profile(p.z) - self.pinch()).sqrt();
        let fperp = self.z_o / (3.0 * t4 * root);
        let force = Vec3::new(
            fperp * self.x_o,
            fperp * self.y_o,
            -(self.x_o * self.x_o + self.y_o * self.y_o) / (3.0 * t4),
        );
        let wperp = self.pinch() / (3.0 * self.z_o * p.t * root);
        let vorticity = Vec3::new(-wperp * self.y_o, wperp * self.x_o, 0.0);
        Ok(ReferenceQuantities {
            current: None,
            magnetic_force: Some(force),
            vorticity: Some(vorticity),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::make_family;
    use approx::assert_relative_eq;

    #[test]
    fn case1_is_irrotational_and_force_free() {
        let f = make_family("G10/case1", &ParamMap::new()).unwrap();
        let p = SpacetimePoint::new(1.3, 0.7, -0.5, 0.8);
        let j = f.state_jet(&p).unwrap();
        assert!(crate::diffcalc::curl(&j.v).max_abs() < 1e-12);
        assert!(crate::diffcalc::curl(&j.b).max_abs() < 1e-12);
    }

    #[test]
    fn case2_force_matches_curl_cross_field() {
        let f = make_family("G10/case2", &ParamMap::new()).unwrap();
        let p = SpacetimePoint::new(1.1, 0.4, 0.6, 1.2);
        let j = f.state_jet(&p).unwrap();
        let s = j.state().unwrap();
        let jc = crate::diffcalc::curl(&j.b);
        let want = jc.cross(s.b);
        let got = f.reference_quantities(&p).unwrap().magnetic_force.unwrap();
        assert_relative_eq!(got.x, want.x, max_relative = 1e-11);
        assert_relative_eq!(got.y, want.y, max_relative = 1e-11);
        assert_relative_eq!(got.z, want.z, max_relative = 1e-11);
    }

    #[test]
    fn case2_vorticity_matches_curl() {
        let f = make_family("G10/case2", &ParamMap::new()).unwrap();
        let p = SpacetimePoint::new(0.8, -0.3, 0.2, 1.6);
        let j = f.state_jet(&p).unwrap();
        let curl = crate::diffcalc::curl(&j.v);
        let want = f.reference_quantities(&p).unwrap().vorticity.unwrap();
        assert_relative_eq!(curl.x, want.x, max_relative = 1e-11, epsilon = 1e-14);
        assert_relative_eq!(curl.y, want.y, max_relative = 1e-11);
        assert!(curl.z.abs() < 1e-13);
    }

    #[test]
    fn case2_density_scale_is_tied() {
        let f = make_family("G10/case2", &ParamMap::new()).unwrap();
        let p = SpacetimePoint::new(2.0, 0.0, 0.0, 1.0);
        let s = f.state(&p).unwrap();
        // rho0 = 2*0.5 + 0.36 + 0.16 = 1.52; w = 2/3 + 1.5.
        let w: f64 = 2.0 / 3.0 + 1.5;
        assert_relative_eq!(s.rho, 1.52 / (4.0 * w), max_relative = 1e-13);
        assert_relative_eq!(s.p, 0.5 * w / 16.0, max_relative = 1e-13);
    }

    #[test]
    fn pinch_offset_guards_domain() {
        let f = make_family("G10/case2", &ParamMap::new()).unwrap();
        // pinch = 0.64 / 1.52; profile(z) = 2z/3 + 1.5 > pinch needs
        // z > 3 (pinch - 1.5) / 2, far below the sampled range.
        assert!(f.state(&SpacetimePoint::new(1.0, 0.0, 0.0, -1.7)).is_err());
        assert!(f.state(&SpacetimePoint::new(1.0, 0.0, 0.0, 0.0)).is_ok());
    }

    #[test]
    fn negative_time_sheet_is_valid_for_case1() {
        let f = make_family("G10/case1", &ParamMap::new()).unwrap();
        let s = f.state(&SpacetimePoint::new(-2.0, 0.3, 0.1, 0.5)).unwrap();
        assert!(s.rho > 0.0);
        assert!(s.p > 0.0);
    }
}
