//! Constant-density transverse wave riding on a uniform axial field.
//!
//! Velocity and magnetic field rotate in the transverse plane with
//! amplitudes that exchange energy periodically: the sum of the kinetic
//! and magnetic transverse energies is constant, as is the projection of
//! one rotating frame onto the other. Density and pressure are uniform,
//! so the wave is exact at any amplitude.

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
pub struct G7 {
    rho_o: f64,
    p_o: f64,
    w_o: f64,
    z_o: f64,
    e_o: f64,
    delta_o: f64,
    v_o: f64,
    phi_o: f64,
}

pub fn describe(_id: &str) -> Result<FamilyMetadata> {
    Ok(FamilyMetadata {
        id: "G7".to_string(),
        group: "G7".to_string(),
        title: "transverse amplitude-exchange wave on a uniform axial field".to_string(),
        combo: "J3+P3".to_string(),
        algebra: vec!["J3+P3".to_string(), "P1".to_string(), "P2".to_string()],
        gamma: 5.0 / 3.0,
        gamma_fixed: false,
        parameters: vec![
            ParamInfo { name: "rho_o", default: 1.0, constraint: "positive density" },
            ParamInfo { name: "p_o", default: 1.0, constraint: "positive pressure" },
            ParamInfo { name: "W_o", default: 0.3, constraint: "axial drift speed" },
            ParamInfo { name: "Z_o", default: 1.0, constraint: "nonzero axial field" },
            ParamInfo { name: "E_o", default: 1.0, constraint: "positive transverse energy" },
            ParamInfo {
                name: "delta_o",
                default: 0.5,
                constraint: "nonzero; delta_o^2 <= E_o^2 / rho_o",
            },
            ParamInfo { name: "V_o", default: 0.0, constraint: "phase offset" },
            ParamInfo { name: "phi_o", default: 0.4, constraint: "exchange phase offset" },
        ],
        domain: "all spacetime".to_string(),
        force_free: false,
        circulation_conserved: false,
        planar_b: false,
        static_flow: false,
        variants: vec![],
        notes: vec![
            "kinetic and magnetic transverse amplitudes satisfy u^2 + x^2 = 2 E_o".to_string(),
            "circulation of advected loops genuinely oscillates".to_string(),
        ],
    })
}

pub fn validate(params: &ParamMap) -> Result<()> {
    let mut v = Violations::new();
    let rho_o = get(params, "rho_o");
    let e_o = get(params, "E_o");
    let delta_o = get(params, "delta_o");
    v.require(rho_o > 0.0, "rho_o: must be positive");
    v.require(get(params, "p_o") > 0.0, "p_o: must be positive");
    v.require(get(params, "Z_o") != 0.0, "Z_o: must be nonzero");
    v.require(e_o > 0.0, "E_o: must be positive");
    v.require(delta_o != 0.0, "delta_o: must be nonzero (phase degenerates)");
    if rho_o > 0.0 {
        v.require(
            delta_o * delta_o * rho_o <= e_o * e_o,
            "delta_o: needs delta_o^2 <= E_o^2 / rho_o",
        );
    }
    v.into_result("G7")
}

pub fn build(params: &ParamMap, variant: Option<&str>) -> Result<SolutionFamily> {
    check_variant("G7", variant, &[])?;
    validate(params)?;
    Ok(Box::new(G7 {
        rho_o: get(params, "rho_o"),
        p_o: get(params, "p_o"),
        w_o: get(params, "W_o"),
        z_o: get(params, "Z_o"),
        e_o: get(params, "E_o"),
        delta_o: get(params, "delta_o"),
        v_o: get(params, "V_o"),
        phi_o: get(params, "phi_o"),
    }))
}

impl G7 {
    fn detuning(&self) -> f64 {
        (self.e_o * self.e_o - self.rho_o * self.delta_o * self.delta_o).sqrt()
    }

    fn components<S: Scalar>(&self, t: S, _x: S, _y: S, z: S) -> [S; 8] {
        let sr = self.rho_o.sqrt();
        let k = self.z_o / sr;
        let d = self.detuning();
        let proj = sr * self.delta_o;
        let phi = -t * (2.0 * k) + self.phi_o;
        let sin_phi = phi.sin();
        let u = (-sin_phi * d + self.e_o).sqrt();
        let xamp = (sin_phi * d + self.e_o).sqrt();
        // Phase accumulated by the velocity frame; the arctangent form
        // keeps it smooth between branch jumps, which are harmless since
        // it enters only via sine and cosine.
        let half = phi * 0.5;
        let (sh, ch) = (half.sin(), half.cos());
        let va = self.e_o / proj;
        let vb = d / proj;
        let v_phase = (sh * va - ch * vb).atan2(ch) + t * self.w_o + self.v_o;
        let b_phase = (phi.cos() * d).atan2(S::lit(proj)) + v_phase;
        let (va_arg, ba_arg) = (v_phase - z, b_phase - z);
        [
            S::lit(self.rho_o),
            S::lit(self.p_o),
            va_arg.sin() * u / sr,
            va_arg.cos() * u / sr,
            S::lit(self.w_o),
            ba_arg.sin() * xamp,
            ba_arg.cos() * xamp,
            S::lit(self.z_o),
        ]
    }
}

impl MhdField for G7 {
    fn id(&self) -> &str {
        "G7"
    }

    fn gamma(&self) -> f64 {
        5.0 / 3.0
    }

    fn metadata(&self) -> FamilyMetadata {
        describe("G7").expect("own id")
    }

    fn sample_window(&self) -> SampleWindow {
        SampleWindow { t: (0.0, 10.0), x: (-3.0, 3.0), y: (-3.0, 3.0), z: (-3.0, 3.0) }
    }

    fn check_point(&self, _p: &SpacetimePoint) -> Result<()> {
        Ok(())
    }

    eval_via_components!();

    fn reference_quantities(&self, p: &SpacetimePoint) -> Result<ReferenceQuantities> {
        let s = self.state(p)?;
        Ok(ReferenceQuantities {
            current: None,
            magnetic_force: Some(Vec3::new(-self.z_o * s.b.y, self.z_o * s.b.x, 0.0)),
            vorticity: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::make_family;
    use approx::assert_relative_eq;

    fn fam() -> SolutionFamily {
        make_family("G7", &ParamMap::new()).unwrap()
    }

    fn amplitudes(s: &crate::state::MhdState) -> (f64, f64) {
        let u = (s.v.x * s.v.x + s.v.y * s.v.y).sqrt();
        let x = (s.b.x * s.b.x + s.b.y * s.b.y).sqrt();
        (u, x)
    }

    #[test]
    fn transverse_energy_exchange_is_conservative() {
        let f = fam();
        for i in 0..40 {
            let t = 0.37 * i as f64;
            let s = f.state(&SpacetimePoint::new(t, 0.0, 0.0, 1.3)).unwrap();
            let (u, x) = amplitudes(&s);
            // rho_o = 1: kinetic amplitude is u itself.
            assert_relative_eq!(u * u + x * x, 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn frame_projection_is_constant() {
        let f = fam();
        for i in 0..25 {
            let t = 0.53 * i as f64;
            let s = f.state(&SpacetimePoint::new(t, 0.4, -0.2, 0.8)).unwrap();
            // v_perp . B_perp = u * x * cos(Y - V) / sqrt(rho) = delta_o.
            let dot = s.v.x * s.b.x + s.v.y * s.b.y;
            assert_relative_eq!(dot, 0.5, max_relative = 1e-11);
        }
    }

    #[test]
    fn wave_is_z_periodic_and_t_quasiperiodic() {
        let f = fam();
        let a = f.state(&SpacetimePoint::new(1.0, 0.0, 0.0, 0.5)).unwrap();
        let b = f
            .state(&SpacetimePoint::new(1.0, 0.0, 0.0, 0.5 + 2.0 * std::f64::consts::PI))
            .unwrap();
        assert_relative_eq!(a.v.x, b.v.x, epsilon = 1e-12);
        assert_relative_eq!(a.b.y, b.b.y, epsilon = 1e-12);
    }

    #[test]
    fn magnetic_force_is_transverse_and_matches_field() {
        let f = fam();
        let p = SpacetimePoint::new(2.2, 0.0, 0.0, -0.7);
        let s = f.state(&p).unwrap();
        let fm = f.reference_quantities(&p).unwrap().magnetic_force.unwrap();
        assert_relative_eq!(fm.x, -s.b.y, max_relative = 1e-13);
        assert_relative_eq!(fm.y, s.b.x, max_relative = 1e-13);
        assert_eq!(fm.z, 0.0);
    }

    #[test]
    fn collinear_limit_is_accepted() {
        // delta_o^2 = E_o^2 / rho_o exactly: amplitudes stay positive and
        // the phases remain defined.
        let mut params = ParamMap::new();
        params.insert("delta_o".into(), 1.0);
        let f = make_family("G7", &params).unwrap();
        let s = f.state(&SpacetimePoint::new(0.9, 0.0, 0.0, 0.2)).unwrap();
        assert!(s.is_finite());
    }

    #[test]
    fn validation_rejects_overlong_projection() {
        let mut params = ParamMap::new();
        params.insert("delta_o".into(), 1.2);
        assert!(make_family("G7", &params).is_err());
    }
}
