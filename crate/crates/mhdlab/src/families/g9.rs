//! Oblique logarithmic expansion with a frozen transverse field ratio.
//!
//! The state depends on space through a single tilted similarity
//! coordinate. Density and pressure are powers of that coordinate with
//! exponents locked to a single free exponent parameter; the adiabatic
//! exponent is structurally 3. The magnetic field keeps fixed direction
//! while its amplitude follows the similarity power.

use super::{
    check_variant, eval_via_components, FamilyMetadata, MhdField, ParamInfo,
    ReferenceQuantities, SampleWindow, SolutionFamily,
};
use crate::error::Result;
use crate::params::{get, ParamMap, Violations};
use crate::scalar::Scalar;
use crate::state::SpacetimePoint;
use crate::vec3::Vec3;

const PRINTED_B: &str = "printed-B";

#[derive(Clone, Debug)]
pub struct G9 {
    alpha: f64,
    beta: f64,
    v_o: f64,
    y_o: f64,
    z_o: f64,
    c2: f64,
    c3: f64,
    /// Time exponent of the field amplitude; `alpha` by default, the
    /// doubled printed value under the `printed-B` variant.
    b_exp: f64,
}

pub fn describe(_id: &str) -> Result<FamilyMetadata> {
    Ok(FamilyMetadata {
        id: "G9".to_string(),
        group: "G9".to_string(),
        title: "tilted logarithmic expansion with a fixed-direction field".to_string(),
        combo: "F+K3+(-0.625)*H".to_string(),
        algebra: vec![
            "F+K3+(-0.625)*H".to_string(),
            "P2".to_string(),
            "P3+(1)*P1".to_string(),
        ],
        gamma: 3.0,
        gamma_fixed: true,
        parameters: vec![
            ParamInfo { name: "alpha", default: -0.625, constraint: "-3/4 < alpha < -1/2" },
            ParamInfo { name: "beta", default: 1.0, constraint: "positive tilt" },
            ParamInfo { name: "V_o", default: 0.2, constraint: "transverse drift" },
            ParamInfo { name: "Y_o", default: 1.0, constraint: "field scale" },
            ParamInfo {
                name: "Z_o",
                default: 0.5,
                constraint: "field scale; (Y_o, Z_o) != (0, 0)",
            },
            ParamInfo { name: "C2", default: 2.0, constraint: "similarity offset" },
            ParamInfo { name: "C3", default: 0.0, constraint: "axial phase offset" },
        ],
        domain: "t > 0 and positive similarity coordinate".to_string(),
        force_free: false,
        circulation_conserved: true,
        planar_b: false,
        static_flow: false,
        variants: vec![PRINTED_B],
        notes: vec![
            "density and pressure positivity is automatic in the admissible \
             exponent range"
                .to_string(),
            "vorticity is a single transverse component 1/(t xi)".to_string(),
        ],
    })
}

pub fn validate(params: &ParamMap) -> Result<()> {
    let mut v = Violations::new();
    let alpha = get(params, "alpha");
    v.require(
        alpha > -0.75 && alpha < -0.5,
        "alpha: must lie in (-3/4, -1/2)",
    );
    v.require(get(params, "beta") > 0.0, "beta: must be positive");
    let y_o = get(params, "Y_o");
    let z_o = get(params, "Z_o");
    v.require(
        y_o != 0.0 || z_o != 0.0,
        "Y_o/Z_o: at least one field scale must be nonzero",
    );
    v.into_result("G9")
}

pub fn build(params: &ParamMap, variant: Option<&str>) -> Result<SolutionFamily> {
    check_variant("G9", variant, &[PRINTED_B])?;
    validate(params)?;
    let alpha = get(params, "alpha");
    Ok(Box::new(G9 {
        alpha,
        beta: get(params, "beta"),
        v_o: get(params, "V_o"),
        y_o: get(params, "Y_o"),
        z_o: get(params, "Z_o"),
        c2: get(params, "C2"),
        c3: get(params, "C3"),
        b_exp: if variant == Some(PRINTED_B) { 2.0 * alpha } else { alpha },
    }))
}

impl G9 {
    fn stress_scale(&self) -> f64 {
        let b2 = 1.0 + self.beta * self.beta;
        self.y_o * self.y_o + b2 * self.z_o * self.z_o
    }

    fn similarity(&self, p: &SpacetimePoint) -> f64 {
        self.c2 - 0.5 * self.beta * p.t.ln() - (p.x - self.beta * p.z) / (2.0 * p.t)
    }

    fn components<S: Scalar>(&self, t: S, x: S, _y: S, z: S) -> [S; 8] {
        let (al, be) = (self.alpha, self.beta);
        let b2 = 1.0 + be * be;
        let k = self.stress_scale();
        let lt = t.ln();
        let tilt = x - z * be;
        let xi = -lt * (0.5 * be) - tilt / t * 0.5 + self.c2;
        let ln_xi = xi.ln();
        let rho_c = -(2.0 * al + 1.0) * b2 * k / (2.0 * be);
        let p_c = -(2.0 * al + 1.0) * k / (2.0 * be * (4.0 * al + 3.0));
        let rho = t.powf(2.0 * al) * xi.powf(4.0 * al + 1.0) * rho_c;
        let p = t.powf(2.0 * al) * xi.powf(4.0 * al + 3.0) * p_c;
        let v1 = (lt * 0.25 + ln_xi) * (2.0 * be / b2) + tilt / t * (0.5 / b2)
            + (self.c2 + be * (self.c3 - 1.0)) / b2;
        let v3 = (lt * ((2.0 + be * be) / 4.0) + ln_xi) * (2.0 / b2)
            - tilt / t * (0.5 * be / b2)
            + (self.c3 + be * (be - self.c2)) / b2;
        let amp = t.powf(self.b_exp) * xi.powf(2.0 * al + 1.0);
        [
            rho,
            p,
            v1,
            S::lit(self.v_o),
            v3,
            amp * (be * self.z_o),
            amp * self.y_o,
            amp * self.z_o,
        ]
    }
}

impl MhdField for G9 {
    fn id(&self) -> &str {
        "G9"
    }

    fn gamma(&self) -> f64 {
        3.0
    }

    fn metadata(&self) -> FamilyMetadata {
        let mut meta = describe("G9").expect("own id");
        meta.combo = format!("F+K3+({})*H", self.alpha);
        meta.algebra = vec![
            meta.combo.clone(),
            "P2".to_string(),
            format!("P3+({})*P1", self.beta),
        ];
        meta
    }

    fn sample_window(&self) -> SampleWindow {
        SampleWindow { t: (0.5, 4.0), x: (-2.0, 2.0), y: (-2.0, 2.0), z: (-2.0, 2.0) }
    }

    fn check_point(&self, p: &SpacetimePoint) -> Result<()> {
        if p.t <= 0.0 {
            return Err(crate::error::outside_domain("G9", "requires t > 0"));
        }
        if self.similarity(p) <= 0.0 {
            return Err(crate::error::outside_domain(
                "G9",
                "requires a positive similarity coordinate",
            ));
        }
        Ok(())
    }

    eval_via_components!();

    fn reference_quantities(&self, p: &SpacetimePoint) -> Result<ReferenceQuantities> {
        self.check_point(p)?;
        let (al, be) = (self.alpha, self.beta);
        let b2 = 1.0 + be * be;
        let xi = self.similarity(p);
        let jc = (2.0 * al + 1.0) / 2.0 * p.t.powf(self.b_exp - 1.0) * xi.powf(2.0 * al);
        let current = Vec3::new(-be * self.y_o * jc, b2 * self.z_o * jc, -self.y_o * jc);
        let fc = (2.0 * al + 1.0) * self.stress_scale() / 2.0
            * p.t.powf(2.0 * self.b_exp - 1.0)
            * xi.powf(4.0 * al + 1.0);
        let force = Vec3::new(fc, 0.0, -be * fc);
        let vorticity = Vec3::new(0.0, 1.0 / (p.t * xi), 0.0);
        Ok(ReferenceQuantities {
            current: Some(current),
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

    fn fam() -> SolutionFamily {
        make_family("G9", &ParamMap::new()).unwrap()
    }

    #[test]
    fn field_direction_is_frozen() {
        let f = fam();
        let a = f.state(&SpacetimePoint::new(1.0, 0.2, 0.0, 0.4)).unwrap();
        let b = f.state(&SpacetimePoint::new(2.5, -0.8, 1.0, 1.3)).unwrap();
        let cross = a.b.cross(b.b);
        assert!(cross.max_abs() < 1e-13, "direction drifts: {cross:?}");
        // Direction is (beta Z_o, Y_o, Z_o).
        assert_relative_eq!(a.b.x / a.b.z, 1.0, max_relative = 1e-12);
        assert_relative_eq!(a.b.y / a.b.z, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn density_and_pressure_are_positive_powers() {
        let f = fam();
        for i in 0..20 {
            let p = SpacetimePoint::new(0.6 + 0.2 * i as f64, 0.3, 0.0, -0.2);
            let s = f.state(&p).unwrap();
            assert!(s.rho > 0.0 && s.p > 0.0);
        }
    }

    // rho / p = (4 alpha + 3) (1 + beta^2) xi^{-2} is a closed identity.
    #[test]
    fn density_pressure_ratio_identity() {
        let f = fam();
        let p = SpacetimePoint::new(1.7, 0.5, 0.2, -0.3);
        let s = f.state(&p).unwrap();
        let xi = 2.0 - 0.5 * (1.7f64).ln() - (0.5 - (-0.3)) / (2.0 * 1.7);
        let want = (4.0 * -0.625 + 3.0) * 2.0 / (xi * xi);
        assert_relative_eq!(s.rho / s.p, want, max_relative = 1e-12);
    }

    #[test]
    fn reference_current_matches_curl() {
        for variant in [None, Some("printed-B")] {
            let f = crate::families::make_family_with("G9", &ParamMap::new(), variant).unwrap();
            let p = SpacetimePoint::new(1.3, 0.4, 0.0, 0.9);
            let j = f.state_jet(&p).unwrap();
            let curl = crate::diffcalc::curl(&j.b);
            let want = f.reference_quantities(&p).unwrap().current.unwrap();
            assert_relative_eq!(curl.x, want.x, max_relative = 1e-11);
            assert_relative_eq!(curl.y, want.y, max_relative = 1e-11);
            assert_relative_eq!(curl.z, want.z, max_relative = 1e-11);
        }
    }

    #[test]
    fn vorticity_is_single_transverse_component() {
        let f = fam();
        let p = SpacetimePoint::new(0.9, -0.2, 0.5, 0.1);
        let j = f.state_jet(&p).unwrap();
        let curl = crate::diffcalc::curl(&j.v);
        let want = f.reference_quantities(&p).unwrap().vorticity.unwrap();
        assert!(curl.x.abs() < 1e-12);
        assert_relative_eq!(curl.y, want.y, max_relative = 1e-11);
        assert!(curl.z.abs() < 1e-12);
    }

    #[test]
    fn exponent_range_is_enforced() {
        for bad in [-0.5, -0.75, 0.3] {
            let mut params = ParamMap::new();
            params.insert("alpha".into(), bad);
            assert!(make_family("G9", &params).is_err(), "alpha = {bad}");
        }
    }

    #[test]
    fn domain_requires_positive_similarity() {
        let f = fam();
        // Large positive x drives the similarity coordinate negative.
        assert!(f.state(&SpacetimePoint::new(0.6, 5.0, 0.0, 0.0)).is_err());
    }
}
