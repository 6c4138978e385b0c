//! Expanding screw flow with a transverse rotating magnetic field.
//!
//! The velocity turns on a cone around the axis while the plasma expands
//! axially; density decays exponentially along the axis with a
//! time-dependent amplitude. Three branches of the adiabatic exponent
//! give distinct amplitude laws: isothermal-like (`gamma=1`), a doubly
//! logarithmic branch (`gamma=2`), and the generic power-tail branch.

use super::{
    check_variant, eval_via_components, FamilyMetadata, MhdField, ParamInfo,
    ReferenceQuantities, SampleWindow, SolutionFamily,
};
use crate::error::Result;
use crate::params::{get, ParamMap, Violations};
use crate::scalar::Scalar;
use crate::state::SpacetimePoint;
use crate::vec3::Vec3;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Branch {
    GammaOne,
    GammaTwo,
    Generic,
}

impl Branch {
    fn from_id(id: &str) -> Self {
        match id {
            "G1/gamma=1" => Branch::GammaOne,
            "G1/gamma=2" => Branch::GammaTwo,
            _ => Branch::Generic,
        }
    }
}

#[derive(Clone, Debug)]
pub struct G1 {
    id: &'static str,
    branch: Branch,
    gamma: f64,
    alpha: f64,
    r_o: f64,
    a_o: f64,
    w_o: f64,
    u_o: f64,
    x_o: f64,
    theta_o: f64,
}

pub fn describe(id: &str) -> Result<FamilyMetadata> {
    let branch = Branch::from_id(id);
    let (gamma, gamma_fixed) = match branch {
        Branch::GammaOne => (1.0, true),
        Branch::GammaTwo => (2.0, true),
        Branch::Generic => (4.0 / 3.0, false),
    };
    let mut parameters = vec![
        ParamInfo { name: "alpha", default: 0.5, constraint: "nonzero screw pitch" },
        ParamInfo { name: "R_o", default: 1.0, constraint: "positive density scale" },
        ParamInfo {
            name: "A_o",
            default: 0.25,
            constraint: if matches!(branch, Branch::GammaOne) {
                "0 <= A_o < 1/(4 alpha^2)"
            } else {
                "positive pressure scale"
            },
        },
        ParamInfo { name: "W_o", default: 0.5, constraint: "same sign as alpha" },
        ParamInfo { name: "U_o", default: 1.0, constraint: "transverse speed" },
        ParamInfo { name: "X_o", default: 1.0, constraint: "transverse field scale" },
        ParamInfo { name: "theta_o", default: 1.0, constraint: "positive phase scale" },
    ];
    if matches!(branch, Branch::Generic) {
        parameters.push(ParamInfo {
            name: "gamma",
            default: 4.0 / 3.0,
            constraint: "gamma > 1, away from 2 (dedicated branches otherwise)",
        });
    }
    Ok(FamilyMetadata {
        id: id.to_string(),
        group: "G1".to_string(),
        title: "expanding screw flow with a rotating transverse field".to_string(),
        combo: format!("J3+K3+({})*H", 0.5),
        algebra: vec![format!("J3+K3+({})*H", 0.5)],
        gamma,
        gamma_fixed,
        parameters,
        domain: "t > 0".to_string(),
        force_free: false,
        circulation_conserved: true,
        planar_b: true,
        static_flow: false,
        variants: vec![],
        notes: vec![
            "transverse speed |v - v_axial| stays exactly U_o for all t".to_string(),
            "magnetic force is purely axial and density-proportional".to_string(),
        ],
    })
}

pub fn validate(id: &str, params: &ParamMap) -> Result<()> {
    let branch = Branch::from_id(id);
    let alpha = get(params, "alpha");
    let a_o = get(params, "A_o");
    let w_o = get(params, "W_o");
    let mut v = Violations::new();
    v.require(alpha != 0.0, "alpha: must be nonzero");
    v.require(get(params, "R_o") > 0.0, "R_o: must be positive");
    v.require(get(params, "theta_o") > 0.0, "theta_o: must be positive");
    v.require(
        w_o == 0.0 || w_o.signum() == alpha.signum(),
        "W_o: must carry the sign of alpha",
    );
    match branch {
        Branch::GammaOne => {
            let cap = if alpha != 0.0 { 1.0 / (4.0 * alpha * alpha) } else { f64::INFINITY };
            v.require(
                (0.0..cap).contains(&a_o),
                "A_o: gamma=1 branch needs 0 <= A_o < 1/(4 alpha^2)",
            );
        }
        _ => v.require(a_o > 0.0, "A_o: must be positive"),
    }
    if matches!(branch, Branch::Generic) {
        let gamma = get(params, "gamma");
        v.require(gamma > 1.0, "gamma: generic branch needs gamma > 1");
        v.require(
            (gamma - 2.0).abs() > 1e-9 && (gamma - 1.0).abs() > 1e-9,
            "gamma: use the dedicated branches for gamma = 1 or 2",
        );
    }
    v.into_result(id)
}

pub fn build(id: &str, params: &ParamMap, variant: Option<&str>) -> Result<SolutionFamily> {
    check_variant(id, variant, &[])?;
    validate(id, params)?;
    let branch = Branch::from_id(id);
    let gamma = match branch {
        Branch::GammaOne => 1.0,
        Branch::GammaTwo => 2.0,
        Branch::Generic => get(params, "gamma"),
    };
    let leaked: &'static str = match id {
        "G1/gamma=1" => "G1/gamma=1",
        "G1/gamma=2" => "G1/gamma=2",
        _ => "G1/generic",
    };
    Ok(Box::new(G1 {
        id: leaked,
        branch,
        gamma,
        alpha: get(params, "alpha"),
        r_o: get(params, "R_o"),
        a_o: get(params, "A_o"),
        w_o: get(params, "W_o"),
        u_o: get(params, "U_o"),
        x_o: get(params, "X_o"),
        theta_o: get(params, "theta_o"),
    }))
}

impl G1 {
    /// Log of the density amplitude and the axial drift integral, as
    /// scalar expressions of time.
    fn profiles<S: Scalar>(&self, t: S) -> (S, S) {
        let (al, a_o, w_o, x_o) = (self.alpha, self.a_o, self.w_o, self.x_o);
        let lt = t.ln();
        let common = t.recip() * (-2.0 * al * w_o)
            + (lt + 1.0) * t.recip() * (-2.0 * al * al * x_o * x_o);
        let ln_r = match self.branch {
            Branch::GammaOne => {
                lt * (4.0 * al * al * a_o - 1.0) + common + self.r_o.ln()
            }
            Branch::GammaTwo => {
                // The pressure term joins the field term inside the 1/t
                // logarithmic factor on this branch.
                let k = 2.0 * al * al * (2.0 * a_o + x_o * x_o);
                -lt + t.recip() * (-2.0 * al * w_o) + (lt + 1.0) * t.recip() * (-k)
                    + self.r_o.ln()
            }
            Branch::Generic => {
                let g = self.gamma;
                let c = 4.0 * al * al * a_o / ((2.0 - g) * (1.0 - g));
                -lt + common + t.powf(1.0 - g) * c + self.r_o.ln()
            }
        };
        let w = match self.branch {
            Branch::GammaOne => t * (2.0 * al * a_o) + lt * (al * x_o * x_o) + w_o,
            Branch::GammaTwo => lt * (al * (2.0 * a_o + x_o * x_o)) + w_o,
            Branch::Generic => {
                let g = self.gamma;
                t.powf(2.0 - g) * (2.0 * al * a_o / (2.0 - g)) + lt * (al * x_o * x_o) + w_o
            }
        };
        (ln_r, w)
    }

    fn components<S: Scalar>(&self, t: S, _x: S, _y: S, z: S) -> [S; 8] {
        let al = self.alpha;
        let (ln_r, w) = self.profiles(t);
        let ln_rho = z / t * (2.0 * al) + ln_r;
        let rho = ln_rho.exp();
        let p = rho * t.powf(1.0 - self.gamma) * self.a_o;
        // Phase carried by fluid elements; constant along the flow.
        let theta = (t.ln() + ln_r - self.theta_o.ln()) * (-1.0 / (2.0 * al)) - z / t;
        let (sin_th, cos_th) = (theta.sin(), theta.cos());
        let v1 = sin_th * self.u_o;
        let v2 = cos_th * self.u_o;
        let v3 = (z - w) / t;
        let amp = ((ln_rho - t.ln()) * 0.5).exp() * self.x_o;
        [rho, p, v1, v2, v3, amp * sin_th, amp * cos_th, S::lit(0.0)]
    }
}

impl MhdField for G1 {
    fn id(&self) -> &str {
        self.id
    }

    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn metadata(&self) -> FamilyMetadata {
        let mut meta = describe(self.id).expect("own id");
        meta.gamma = self.gamma;
        meta.combo = format!("J3+K3+({})*H", self.alpha);
        meta.algebra = vec![meta.combo.clone()];
        meta
    }

    fn sample_window(&self) -> SampleWindow {
        SampleWindow { t: (0.5, 5.0), x: (-2.0, 2.0), y: (-2.0, 2.0), z: (-2.0, 2.0) }
    }

    fn check_point(&self, p: &SpacetimePoint) -> Result<()> {
        if p.t > 0.0 {
            Ok(())
        } else {
            Err(crate::error::outside_domain(self.id, "requires t > 0"))
        }
    }

    eval_via_components!();

    fn reference_quantities(&self, p: &SpacetimePoint) -> Result<ReferenceQuantities> {
        let s = self.state(p)?;
        let (b1, b2) = (s.b.x, s.b.y);
        let al = self.alpha;
        let current = Vec3::new(-(al * b2 + b1) / p.t, (al * b1 - b2) / p.t, 0.0);
        let force = Vec3::new(0.0, 0.0, -al * self.x_o * self.x_o * s.rho / (p.t * p.t));
        Ok(ReferenceQuantities {
            current: Some(current),
            magnetic_force: Some(force),
            vorticity: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::make_family;
    use approx::assert_relative_eq;

    fn fam(id: &str) -> SolutionFamily {
        make_family(id, &ParamMap::new()).unwrap()
    }

    #[test]
    fn transverse_speed_is_constant() {
        for id in ["G1/gamma=1", "G1/gamma=2", "G1/generic"] {
            let f = fam(id);
            for &t in &[0.7, 1.0, 2.5, 40.0] {
                let s = f.state(&SpacetimePoint::new(t, 0.3, -0.2, 0.9)).unwrap();
                let vperp = (s.v.x * s.v.x + s.v.y * s.v.y).sqrt();
                assert_relative_eq!(vperp, 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn field_amplitude_tracks_density() {
        let f = fam("G1/gamma=2");
        let p = SpacetimePoint::new(1.6, 0.1, 0.4, -0.7);
        let s = f.state(&p).unwrap();
        let bperp = (s.b.x * s.b.x + s.b.y * s.b.y).sqrt();
        assert_relative_eq!(bperp, (s.rho / p.t).sqrt(), max_relative = 1e-12);
    }

    // Amplitude values at t=2, z=0.3 for the default parameters, frozen
    // from an independent high-precision evaluation of the amplitude laws.
    #[test]
    fn frozen_state_values() {
        let p = SpacetimePoint::new(2.0, 0.0, 0.0, 0.3);
        let cases = [
            ("G1/gamma=1", 0.352_344_044_859_356_7, 0.088_086_011_214_839_18),
            ("G1/gamma=2", 0.239_769_466_559_945_62, 0.029_971_183_319_993_2),
            ("G1/generic", 0.121_317_152_498_906_13, 0.024_072_371_937_318_758),
        ];
        for (id, rho_want, p_want) in cases {
            let s = fam(id).state(&p).unwrap();
            assert_relative_eq!(s.rho, rho_want, max_relative = 1e-13);
            assert_relative_eq!(s.p, p_want, max_relative = 1e-13);
        }
    }

    #[test]
    fn axial_force_matches_reference_shape() {
        let f = fam("G1/generic");
        let p = SpacetimePoint::new(1.2, 0.5, 0.2, -0.4);
        let r = f.reference_quantities(&p).unwrap();
        let s = f.state(&p).unwrap();
        let fm = r.magnetic_force.unwrap();
        assert_eq!(fm.x, 0.0);
        assert_eq!(fm.y, 0.0);
        assert_relative_eq!(fm.z, -0.5 * s.rho / (1.2 * 1.2), max_relative = 1e-12);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        let mut p = ParamMap::new();
        p.insert("alpha".into(), 0.0);
        assert!(make_family("G1/generic", &p).is_err());
        let mut p = ParamMap::new();
        p.insert("A_o".into(), 1.5);
        assert!(make_family("G1/gamma=1", &p).is_err(), "gamma=1 cap on A_o");
        let mut p = ParamMap::new();
        p.insert("W_o".into(), -0.5);
        assert!(make_family("G1/gamma=2", &p).is_err(), "W_o sign must match alpha");
    }

    #[test]
    fn rejects_nonpositive_time() {
        let f = fam("G1/gamma=2");
        assert!(f.state(&SpacetimePoint::new(0.0, 0.0, 0.0, 0.0)).is_err());
        assert!(f.state(&SpacetimePoint::new(-1.0, 0.0, 0.0, 0.0)).is_err());
    }
}
