//! Static wedge equilibrium with an axial shear flow.
//!
//! Pressure, magnetic field, and axial velocity depend on the transverse
//! plane only, through the polar angle and radius; density is an
//! arbitrary positive profile of a self-similar combination. The magnetic
//! force balances the pressure gradient exactly, so the configuration is
//! an equilibrium regardless of the density profile.

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
pub struct G4 {
    alpha1: f64,
    c_o: f64,
    a_o: f64,
    w_o: f64,
    y_o: f64,
    z_o: f64,
    r_o: f64,
    lambda: f64,
}

pub fn describe(_id: &str) -> Result<FamilyMetadata> {
    Ok(FamilyMetadata {
        id: "G4".to_string(),
        group: "G4".to_string(),
        title: "static wedge equilibrium with axial shear".to_string(),
        combo: "F+(-1)*G-H".to_string(),
        algebra: vec!["P0".to_string(), "P3".to_string()],
        gamma: 5.0 / 3.0,
        gamma_fixed: false,
        parameters: vec![
            ParamInfo { name: "alpha1", default: -1.0, constraint: "not 0 or 1" },
            ParamInfo { name: "c_o", default: 1.0, constraint: "nonzero angular wavenumber" },
            ParamInfo { name: "A_o", default: 1.0, constraint: "background pressure, positive" },
            ParamInfo { name: "W_o", default: 1.0, constraint: "axial speed scale" },
            ParamInfo { name: "Y_o", default: 1.0, constraint: "nonzero transverse field scale" },
            ParamInfo { name: "Z_o", default: 0.5, constraint: "axial field scale" },
            ParamInfo { name: "R_o", default: 1.0, constraint: "positive density scale" },
            ParamInfo { name: "lambda", default: 0.0, constraint: "density profile exponent" },
        ],
        domain: "x > 0, y != 0, sin(c_o * azimuth) > 0, pressure positive".to_string(),
        force_free: false,
        circulation_conserved: true,
        planar_b: false,
        static_flow: true,
        variants: vec![],
        notes: vec![
            "density enters no balance; its profile is a free positive function".to_string(),
            "pressure dips below the background near the wedge faces".to_string(),
            "the constructing dilation rescales the pressure offset A_o, so it maps \
             the family into itself without fixing any positive-pressure member"
                .to_string(),
        ],
    })
}

pub fn validate(params: &ParamMap) -> Result<()> {
    let mut v = Violations::new();
    let alpha1 = get(params, "alpha1");
    v.require(
        alpha1 != 0.0 && alpha1 != 1.0,
        "alpha1: must differ from 0 and 1",
    );
    v.require(get(params, "c_o") != 0.0, "c_o: must be nonzero");
    v.require(get(params, "A_o") > 0.0, "A_o: must be positive");
    v.require(get(params, "Y_o") != 0.0, "Y_o: must be nonzero");
    v.require(get(params, "R_o") > 0.0, "R_o: must be positive");
    v.into_result("G4")
}

pub fn build(params: &ParamMap, variant: Option<&str>) -> Result<SolutionFamily> {
    check_variant("G4", variant, &[])?;
    validate(params)?;
    Ok(Box::new(G4 {
        alpha1: get(params, "alpha1"),
        c_o: get(params, "c_o"),
        a_o: get(params, "A_o"),
        w_o: get(params, "W_o"),
        y_o: get(params, "Y_o"),
        z_o: get(params, "Z_o"),
        r_o: get(params, "R_o"),
        lambda: get(params, "lambda"),
    }))
}

impl G4 {
    fn stress_scale(&self) -> f64 {
        self.c_o * self.c_o * self.y_o * self.y_o + self.z_o * self.z_o
    }

    fn components<S: Scalar>(&self, _t: S, x: S, y: S, _z: S) -> [S; 8] {
        let (c_o, y_o, z_o) = (self.c_o, self.y_o, self.z_o);
        let theta = y.atan2(x);
        let r2 = x * x + y * y;
        let angle = theta * c_o;
        let sn = angle.sin();
        let csc = sn.recip();
        let cot = angle.cos() * csc;
        let rho = x.powf(-2.0 * (1.0 + self.alpha1))
            * ((x / y).atan() * self.lambda).exp()
            * self.r_o;
        let p = -csc * csc / r2 * (self.stress_scale() / 2.0) + self.a_o;
        let v3 = r2.powf(self.alpha1 / 2.0) * sn.powf(self.alpha1) * self.w_o;
        let b1 = (x * cot * c_o + y) * y_o / r2;
        let b2 = (y * cot * c_o - x) * y_o / r2;
        let b3 = csc / r2.sqrt() * z_o;
        [rho, p, S::lit(0.0), S::lit(0.0), v3, b1, b2, b3]
    }

    fn wedge_angle_ok(&self, p: &SpacetimePoint) -> bool {
        let theta = p.y.atan2(p.x);
        (self.c_o * theta).sin() > 0.0
    }
}

impl MhdField for G4 {
    fn id(&self) -> &str {
        "G4"
    }

    fn gamma(&self) -> f64 {
        5.0 / 3.0
    }

    fn metadata(&self) -> FamilyMetadata {
        let mut meta = describe("G4").expect("own id");
        meta.combo = format!("F+({})*G-H", self.alpha1);
        meta
    }

    fn sample_window(&self) -> SampleWindow {
        SampleWindow { t: (0.0, 2.0), x: (0.4, 2.5), y: (0.4, 2.5), z: (-2.0, 2.0) }
    }

    fn check_point(&self, p: &SpacetimePoint) -> Result<()> {
        if p.x <= 0.0 {
            return Err(crate::error::outside_domain("G4", "requires x > 0"));
        }
        if p.y == 0.0 {
            return Err(crate::error::outside_domain("G4", "requires y != 0"));
        }
        if !self.wedge_angle_ok(p) {
            return Err(crate::error::outside_domain(
                "G4",
                "requires sin(c_o * azimuth) > 0",
            ));
        }
        let theta = p.y.atan2(p.x);
        let sn = (self.c_o * theta).sin();
        let r2 = p.x * p.x + p.y * p.y;
        if self.a_o - self.stress_scale() / (2.0 * r2 * sn * sn) <= 0.0 {
            return Err(crate::error::outside_domain(
                "G4",
                "pressure not positive here (too close to a wedge face)",
            ));
        }
        Ok(())
    }

    eval_via_components!();

    fn reference_quantities(&self, p: &SpacetimePoint) -> Result<ReferenceQuantities> {
        let s = self.state(p)?;
        let theta = p.y.atan2(p.x);
        let r2 = p.x * p.x + p.y * p.y;
        let sn = (self.c_o * theta).sin();
        let cot = (self.c_o * theta).cos() / sn;
        let current = Vec3::new(
            -s.b.x * s.b.z / self.y_o,
            -s.b.y * s.b.z / self.y_o,
            self.c_o * self.c_o * self.y_o / (r2 * sn * sn),
        );
        let v3 = s.v.z;
        let vorticity = Vec3::new(
            self.alpha1 * v3 / r2 * (p.y + self.c_o * p.x * cot),
            self.alpha1 * v3 / r2 * (self.c_o * p.y * cot - p.x),
            0.0,
        );
        Ok(ReferenceQuantities {
            current: Some(current),
            magnetic_force: None,
            vorticity: Some(vorticity),
        })
    }
}
