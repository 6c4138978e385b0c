//! Sheared screw flow with two time scales.
//!
//! A variant of the expanding screw flow in which the axial direction
//! expands on a shifted clock `t + alpha1` while the transverse plane
//! expands on `t` itself. The drift and phase amplitudes are quadratures
//! of `t^(2-2g) (t+alpha1)^(1-g)`; they close in elementary terms for
//! `g = 3/2` and `g = 2` and in terms of the Gauss hypergeometric
//! function otherwise.

use super::{
    check_variant, eval_via_components, FamilyMetadata, MhdField, ParamInfo,
    ReferenceQuantities, SampleWindow, SolutionFamily,
};
use crate::error::Result;
use crate::params::{get, ParamMap, Violations};
use crate::scalar::Scalar;
use crate::specfun::hyp2f1;
use crate::state::SpacetimePoint;
use crate::vec3::Vec3;

const PRINTED_V3: &str = "printed-v3";

#[derive(Clone, Copy, Debug, PartialEq)]
enum Branch {
    ThreeHalves,
    Two,
    Generic,
}

impl Branch {
    fn from_id(id: &str) -> Self {
        match id {
            "G2/gamma=1.5" => Branch::ThreeHalves,
            "G2/gamma=2" => Branch::Two,
            _ => Branch::Generic,
        }
    }
}

#[derive(Clone, Debug)]
pub struct G2 {
    id: &'static str,
    branch: Branch,
    gamma: f64,
    alpha1: f64,
    alpha2: f64,
    r_o: f64,
    a_o: f64,
    w_o: f64,
    u_o: f64,
    x_o: f64,
    theta_o: f64,
    /// Integration constant of the phase amplitude (generic branch),
    /// anchored at t = 1.
    e_at_one: f64,
    printed_v3: bool,
}

pub fn describe(id: &str) -> Result<FamilyMetadata> {
    let branch = Branch::from_id(id);
    let (gamma, gamma_fixed) = match branch {
        Branch::ThreeHalves => (1.5, true),
        Branch::Two => (2.0, true),
        Branch::Generic => (4.0 / 3.0, false),
    };
    let mut parameters = vec![
        ParamInfo { name: "alpha1", default: 1.0, constraint: "positive clock offset" },
        ParamInfo { name: "alpha2", default: 0.5, constraint: "nonzero screw pitch" },
        ParamInfo { name: "R_o", default: 1.0, constraint: "positive density scale" },
        ParamInfo { name: "A_o", default: 0.5, constraint: "positive pressure scale" },
        ParamInfo { name: "W_o", default: 0.3, constraint: "axial drift offset" },
        ParamInfo { name: "U_o", default: 0.8, constraint: "transverse speed" },
        ParamInfo { name: "X_o", default: 0.7, constraint: "transverse field scale" },
        ParamInfo { name: "theta_o", default: 0.2, constraint: "phase offset" },
    ];
    if matches!(branch, Branch::Generic) {
        parameters.push(ParamInfo {
            name: "gamma",
            default: 4.0 / 3.0,
            constraint: "1.05 <= gamma <= 1.95, away from 1.5 (dedicated branch)",
        });
        parameters.push(ParamInfo {
            name: "R_int0",
            default: 0.0,
            constraint: "phase amplitude at t = 1",
        });
    }
    Ok(FamilyMetadata {
        id: id.to_string(),
        group: "G2".to_string(),
        title: "two-clock screw flow with a rotating transverse field".to_string(),
        combo: "J3+K3+(1)*P3+(0.5)*H".to_string(),
        algebra: vec!["J3+K3+(1)*P3+(0.5)*H".to_string()],
        gamma,
        gamma_fixed,
        parameters,
        domain: if matches!(branch, Branch::Generic) {
            "0 < t <= 50 alpha1 (validated hypergeometric window)".to_string()
        } else {
            "t > 0".to_string()
        },
        force_free: false,
        circulation_conserved: true,
        planar_b: true,
        static_flow: false,
        variants: vec![PRINTED_V3],
        notes: vec![
            "transverse velocity relative to the radial expansion has constant magnitude"
                .to_string(),
            "magnetic force is axial, scaled by the shifted clock".to_string(),
        ],
    })
}

pub fn validate(id: &str, params: &ParamMap) -> Result<()> {
    let mut v = Violations::new();
    v.require(get(params, "alpha1") > 0.0, "alpha1: must be positive");
    v.require(get(params, "alpha2") != 0.0, "alpha2: must be nonzero");
    v.require(get(params, "R_o") > 0.0, "R_o: must be positive");
    v.require(get(params, "A_o") > 0.0, "A_o: must be positive");
    if matches!(Branch::from_id(id), Branch::Generic) {
        let gamma = get(params, "gamma");
        v.require(
            (1.05..=1.95).contains(&gamma),
            "gamma: generic branch validated for 1.05 <= gamma <= 1.95",
        );
        v.require(
            (gamma - 1.5).abs() > 1e-9,
            "gamma: use the dedicated branch for gamma = 1.5",
        );
    }
    v.into_result(id)
}

pub fn build(id: &str, params: &ParamMap, variant: Option<&str>) -> Result<SolutionFamily> {
    check_variant(id, variant, &[PRINTED_V3])?;
    validate(id, params)?;
    let branch = Branch::from_id(id);
    let (leaked, gamma): (&'static str, f64) = match branch {
        Branch::ThreeHalves => ("G2/gamma=1.5", 1.5),
        Branch::Two => ("G2/gamma=2", 2.0),
        Branch::Generic => ("G2/generic", get(params, "gamma")),
    };
    Ok(Box::new(G2 {
        id: leaked,
        branch,
        gamma,
        alpha1: get(params, "alpha1"),
        alpha2: get(params, "alpha2"),
        r_o: get(params, "R_o"),
        a_o: get(params, "A_o"),
        w_o: get(params, "W_o"),
        u_o: get(params, "U_o"),
        x_o: get(params, "X_o"),
        theta_o: get(params, "theta_o"),
        e_at_one: if matches!(branch, Branch::Generic) { get(params, "R_int0") } else { 0.0 },
        printed_v3: variant == Some(PRINTED_V3),
    }))
}

impl G2 {
    fn phase_gain(&self) -> f64 {
        4.0 * self.alpha2 * self.alpha2 * self.a_o
    }

    /// Axial drift amplitude `W(t)`, the antiderivative of
    /// `t^(2-2g) T^(1-g)` with `T = t + alpha1`, evaluated at plain `t`.
    fn drift_value(&self, t: f64) -> f64 {
        let a1 = self.alpha1;
        let tt = t + a1;
        match self.branch {
            Branch::Two => (1.0 + a1 / t).ln() / (a1 * a1) - 1.0 / (a1 * t),
            Branch::ThreeHalves => {
                let s = tt.sqrt();
                let root = a1.sqrt();
                ((s - root) / (s + root)).ln() / root
            }
            Branch::Generic => {
                let g = self.gamma;
                let f = hyp2f1(g - 1.0, 3.0 - 2.0 * g, 4.0 - 2.0 * g, -t / a1)
                    .expect("validated hypergeometric arguments");
                a1.powf(1.0 - g) * t.powf(3.0 - 2.0 * g) / (3.0 - 2.0 * g) * f.value
            }
        }
    }

    fn drift_slope(&self, t: f64) -> f64 {
        t.powf(2.0 - 2.0 * self.gamma) * (t + self.alpha1).powf(1.0 - self.gamma)
    }

    fn drift_slope2(&self, t: f64) -> f64 {
        let g = self.gamma;
        let tt = t + self.alpha1;
        (2.0 - 2.0 * g) * t.powf(1.0 - 2.0 * g) * tt.powf(1.0 - g)
            + (1.0 - g) * t.powf(2.0 - 2.0 * g) * tt.powf(-g)
    }

    /// Phase amplitude `E(t)`, the antiderivative of `k W / T^2`.
    fn phase_value(&self, t: f64, w: f64) -> f64 {
        let a1 = self.alpha1;
        let k = self.phase_gain();
        let tt = t + a1;
        match self.branch {
            Branch::Two => {
                let l = (tt / t).ln();
                2.0 * k * l / (a1 * a1 * a1) - k * (2.0 + l) / (a1 * a1 * tt)
            }
            Branch::ThreeHalves => {
                let root = a1.sqrt();
                let l = (tt.sqrt() - root) / (tt.sqrt() + root);
                let l = l.ln();
                k * l / (a1 * root) + 2.0 * k / (a1 * tt.sqrt()) - k * l / (root * tt)
            }
            Branch::Generic => {
                let anti = |t: f64, w: f64| {
                    let g = self.gamma;
                    let f = hyp2f1(g, 3.0 - 2.0 * g, 4.0 - 2.0 * g, -t / a1)
                        .expect("validated hypergeometric arguments");
                    -w / (t + a1)
                        + a1.powf(-g) * t.powf(3.0 - 2.0 * g) / (3.0 - 2.0 * g) * f.value
                };
                let w1 = self.drift_value(1.0);
                k * (anti(t, w) - anti(1.0, w1)) + self.e_at_one
            }
        }
    }

    fn components<S: Scalar>(&self, t: S, x: S, y: S, z: S) -> [S; 8] {
        let (a1, a2) = (self.alpha1, self.alpha2);
        let k = self.phase_gain();
        let tt = t + a1;
        let t0 = t.value();
        let tt0 = t0 + a1;
        let w0 = self.drift_value(t0);
        let w1 = self.drift_slope(t0);
        let w = t.lift1(w0, w1, self.drift_slope2(t0));
        let e = t.lift1(
            self.phase_value(t0, w0),
            k * w0 / (tt0 * tt0),
            k * (w1 / (tt0 * tt0) - 2.0 * w0 / (tt0 * tt0 * tt0)),
        );
        let ln_tt = tt.ln();
        // Axial profile shared by the density exponent and the phase.
        let m = -z * (2.0 * a2) + (5.0 * a1 + self.w_o);
        let field_log = (ln_tt + 1.0) / tt;
        let ln_rho = e - m / tt - field_log * (2.0 * a2 * a2 * self.x_o * self.x_o)
            - t.ln() * 2.0 - ln_tt + self.r_o.ln();
        let rho = ln_rho.exp();
        let p = ((t.ln() * 2.0 + ln_tt) * (1.0 - self.gamma)).exp() * rho * self.a_o;
        let theta = -e / (2.0 * a2) + m / tt / (2.0 * a2)
            + field_log * (a2 * self.x_o * self.x_o)
            + self.theta_o;
        let (sin_th, cos_th) = (theta.sin(), theta.cos());
        let v1 = (x - sin_th * self.u_o) / t;
        let v2 = (y - cos_th * self.u_o) / t;
        let v3 = if self.printed_v3 {
            (z - w * (2.0 * a2) - ln_tt * (a2 * self.a_o * self.x_o * self.x_o)
                - (5.0 * a1 + self.w_o) / (2.0 * a2))
                / tt
        } else {
            (z - w * (2.0 * a2 * self.a_o) - ln_tt * (a2 * self.x_o * self.x_o)
                - (5.0 * a1 + self.w_o) / (2.0 * a2))
                / tt
        };
        let amp = ((ln_rho - ln_tt) * 0.5).exp() * self.x_o;
        [rho, p, v1, v2, v3, amp * sin_th, amp * cos_th, S::lit(0.0)]
    }
}

impl MhdField for G2 {
    fn id(&self) -> &str {
        self.id
    }

    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn metadata(&self) -> FamilyMetadata {
        let mut meta = describe(self.id).expect("own id");
        meta.gamma = self.gamma;
        meta.combo = format!("J3+K3+({})*P3+({})*H", self.alpha1, self.alpha2);
        meta.algebra = vec![meta.combo.clone()];
        meta
    }

    fn sample_window(&self) -> SampleWindow {
        SampleWindow { t: (0.3, 5.0), x: (-2.0, 2.0), y: (-2.0, 2.0), z: (-2.0, 2.0) }
    }

    fn check_point(&self, p: &SpacetimePoint) -> Result<()> {
        if p.t <= 0.0 {
            return Err(crate::error::outside_domain(self.id, "requires t > 0"));
        }
        if matches!(self.branch, Branch::Generic) && p.t > 50.0 * self.alpha1 {
            return Err(crate::error::outside_domain(
                self.id,
                "generic branch validated for t <= 50 alpha1",
            ));
        }
        Ok(())
    }

    eval_via_components!();

    fn reference_quantities(&self, p: &SpacetimePoint) -> Result<ReferenceQuantities> {
        let s = self.state(p)?;
        let (b1, b2) = (s.b.x, s.b.y);
        let a2 = self.alpha2;
        let tt = p.t + self.alpha1;
        let current = Vec3::new(-(a2 * b2 + b1) / tt, (a2 * b1 - b2) / tt, 0.0);
        let force = Vec3::new(0.0, 0.0, -a2 * self.x_o * self.x_o * s.rho / (tt * tt));
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
    use crate::diffcalc::fd;
    use crate::families::make_family;
    use approx::assert_relative_eq;

    // Concrete instance with default parameters, for direct access to the
    // profile quadratures.
    fn defaults(id: &str) -> G2 {
        let params = crate::families::default_params(id).unwrap();
        let branch = Branch::from_id(id);
        G2 {
            id: "test",
            branch,
            gamma: match branch {
                Branch::ThreeHalves => 1.5,
                Branch::Two => 2.0,
                Branch::Generic => get(&params, "gamma"),
            },
            alpha1: get(&params, "alpha1"),
            alpha2: get(&params, "alpha2"),
            r_o: get(&params, "R_o"),
            a_o: get(&params, "A_o"),
            w_o: get(&params, "W_o"),
            u_o: get(&params, "U_o"),
            x_o: get(&params, "X_o"),
            theta_o: get(&params, "theta_o"),
            e_at_one: 0.0,
            printed_v3: false,
        }
    }

    #[test]
    fn drift_amplitude_solves_its_quadrature() {
        for id in ["G2/gamma=1.5", "G2/gamma=2", "G2/generic"] {
            let f = defaults(id);
            for &t in &[0.4, 1.0, 2.7, 8.0] {
                let num = fd::gradient(&|p: [f64; 4]| f.drift_value(p[0]), [t, 0.0, 0.0, 0.0], 0, 1e-3);
                assert_relative_eq!(num, f.drift_slope(t), max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn phase_amplitude_solves_its_quadrature() {
        for id in ["G2/gamma=1.5", "G2/gamma=2", "G2/generic"] {
            let f = defaults(id);
            let k = f.phase_gain();
            for &t in &[0.5, 1.3, 3.1] {
                let num = fd::gradient(
                    &|p: [f64; 4]| f.phase_value(p[0], f.drift_value(p[0])),
                    [t, 0.0, 0.0, 0.0],
                    0,
                    1e-2,
                );
                let tt = t + f.alpha1;
                let want = k * f.drift_value(t) / (tt * tt);
                assert_relative_eq!(num, want, epsilon = 1e-9, max_relative = 1e-7);
            }
        }
    }

    // Values frozen from an independent high-precision evaluation of the
    // quadratures (closed forms and the hypergeometric representation).
    #[test]
    fn frozen_profile_values() {
        let f15 = defaults("G2/gamma=1.5");
        assert_relative_eq!(
            f15.drift_value(2.0),
            -1.316_957_896_924_816_6,
            max_relative = 1e-13
        );
        let f2 = defaults("G2/gamma=2");
        assert_relative_eq!(
            f2.drift_value(2.0),
            -0.094_534_891_891_835_83,
            max_relative = 1e-13
        );
        let fg = defaults("G2/generic");
        assert_relative_eq!(
            fg.drift_value(2.0),
            3.392_376_691_159_894_6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            fg.phase_value(2.0, fg.drift_value(2.0)),
            0.257_704_035_866_487_08,
            max_relative = 1e-11
        );
    }

    #[test]
    fn relative_transverse_speed_is_constant() {
        for id in ["G2/gamma=1.5", "G2/gamma=2", "G2/generic"] {
            let f = make_family(id, &ParamMap::new()).unwrap();
            for &t in &[0.6, 1.9, 4.0] {
                let p = SpacetimePoint::new(t, 0.4, -0.8, 1.1);
                let s = f.state(&p).unwrap();
                let rel = Vec3::new(s.v.x - p.x / t, s.v.y - p.y / t, 0.0);
                assert_relative_eq!(rel.norm() * t, 0.8, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn printed_axial_velocity_variant_differs() {
        let params = ParamMap::new();
        let a = make_family("G2/gamma=2", &params).unwrap();
        let b = crate::families::make_family_with("G2/gamma=2", &params, Some("printed-v3"))
            .unwrap();
        let p = SpacetimePoint::new(1.7, 0.2, 0.3, 0.5);
        let (sa, sb) = (a.state(&p).unwrap(), b.state(&p).unwrap());
        assert!((sa.v.z - sb.v.z).abs() > 1e-6);
        assert_eq!(sa.v.x, sb.v.x);
        assert_eq!(sa.rho, sb.rho);
    }

    #[test]
    fn generic_branch_rejects_out_of_window_gamma() {
        let mut p = ParamMap::new();
        p.insert("gamma".into(), 1.5);
        assert!(make_family("G2/generic", &p).is_err());
        let mut p = ParamMap::new();
        p.insert("gamma".into(), 2.2);
        assert!(make_family("G2/generic", &p).is_err());
    }
}
