//! Logarithmically translated screw flows with power-law amplitudes.
//!
//! All five sub-cases share one shape: a similarity coordinate
//! `s = z + ln(t)/alpha1`, a linear profile `W = C1 s + C2`, and state
//! amplitudes that are pure powers of `t` and `W`. The sub-cases differ
//! in how the exponents and coefficients are tied to the parameters; the
//! admissible adiabatic exponent is dictated by each tie.
//!
//! Exponent identities used by every case (`g` is the adiabatic
//! exponent):
//!
//! - continuity:  `a_rho + b_rho C1 + C1 + 2 = 0`
//! - pressure:    `a_p + b_p C1 + g (2 + C1) = 0`
//! - field clock: `2 a_B - a_rho = -2`
//!
//! Case 4 cannot satisfy the induction tie `a_B + b_B C1 = -(C1 + 1)`
//! anywhere in its admissible parameter range; it is included for
//! completeness and its induction residual is reported honestly.

use super::{
    check_variant, eval_via_components, FamilyMetadata, MhdField, ParamInfo,
    ReferenceQuantities, SampleWindow, SolutionFamily,
};
use crate::error::Result;
use crate::params::{get, ParamMap, Violations};
use crate::scalar::Scalar;
use crate::state::SpacetimePoint;

const PRINTED: &str = "printed";

#[derive(Clone, Debug)]
pub struct G3 {
    id: &'static str,
    gamma: f64,
    alpha1: f64,
    alpha2: f64,
    c1: f64,
    c2: f64,
    u_o: f64,
    theta_o: f64,
    rho0: f64,
    a_rho: f64,
    b_rho: f64,
    p0: f64,
    a_p: f64,
    b_p: f64,
    amp: f64,
    a_b: f64,
    b_b: f64,
}

fn case_of(id: &str) -> usize {
    match id {
        "G3/case1" => 1,
        "G3/case2" => 2,
        "G3/case3" => 3,
        "G3/case4" => 4,
        _ => 5,
    }
}

pub fn describe(id: &str) -> Result<FamilyMetadata> {
    let case = case_of(id);
    let (gamma, parameters, title, notes, variants): (
        f64,
        Vec<ParamInfo>,
        &str,
        Vec<String>,
        Vec<&'static str>,
    ) = match case {
        1 => (
            4.0 / 3.0,
            vec![
                ParamInfo { name: "alpha1", default: 2.0, constraint: "alpha1 > 1" },
                ParamInfo { name: "R_o", default: 1.0, constraint: "positive density scale" },
                ParamInfo {
                    name: "X_o",
                    default: 0.5,
                    constraint: "X_o^2 < R_o/(alpha1 - 1) so pressure stays positive",
                },
                ParamInfo { name: "U_o", default: 0.7, constraint: "transverse speed" },
                ParamInfo { name: "theta_o", default: 0.2, constraint: "phase offset" },
                ParamInfo { name: "C2", default: 2.0, constraint: "profile offset" },
            ],
            "screw flow, field amplitude tied to the profile power",
            vec![
                "pressure coefficient carries a field-energy correction".to_string(),
            ],
            vec![PRINTED],
        ),
        2 => (
            1.2,
            vec![
                ParamInfo { name: "alpha2", default: 1.8, constraint: "3/2 <= alpha2 < 2" },
                ParamInfo { name: "R_o", default: 1.0, constraint: "positive density scale" },
                ParamInfo { name: "A_o", default: 0.7, constraint: "positive pressure scale" },
                ParamInfo { name: "U_o", default: 0.6, constraint: "transverse speed" },
                ParamInfo { name: "theta_o", default: 0.3, constraint: "phase offset" },
                ParamInfo { name: "C2", default: 2.0, constraint: "profile offset" },
            ],
            "screw flow with spatially uniform pressure",
            vec![
                "adiabatic exponent is 2 alpha2 / 3".to_string(),
                "field amplitude is fixed by the density scale, not free".to_string(),
            ],
            vec![],
        ),
        3 => (
            4.0 / 3.0,
            vec![
                ParamInfo { name: "alpha2", default: 1.5, constraint: "1 < alpha2 < 2" },
                ParamInfo { name: "A_o", default: 0.8, constraint: "positive pressure scale" },
                ParamInfo { name: "X_o", default: 0.6, constraint: "nonzero field scale" },
                ParamInfo { name: "U_o", default: 0.5, constraint: "transverse speed" },
                ParamInfo { name: "theta_o", default: 0.1, constraint: "phase offset" },
                ParamInfo { name: "C2", default: 2.0, constraint: "profile offset" },
            ],
            "screw flow, density scale tied to total transverse stress",
            vec![],
            vec![],
        ),
        4 => (
            1.25,
            vec![
                ParamInfo { name: "alpha1", default: 0.75, constraint: "1/2 < alpha1 < 1" },
                ParamInfo {
                    name: "alpha2",
                    default: 1.4,
                    constraint: "alpha1 + 1/2 < alpha2 < 2 alpha1",
                },
                ParamInfo { name: "R_o", default: 1.0, constraint: "positive density scale" },
                ParamInfo { name: "U_o", default: 0.5, constraint: "transverse speed" },
                ParamInfo { name: "theta_o", default: 0.2, constraint: "phase offset" },
                ParamInfo { name: "C2", default: 2.5, constraint: "profile offset" },
            ],
            "screw flow with incompatible field clock (kept for reference)",
            vec![
                "no parameter choice satisfies the induction tie; the induction \
                 residual is reported honestly"
                    .to_string(),
            ],
            vec![],
        ),
        _ => (
            1.5,
            vec![
                ParamInfo {
                    name: "alpha1",
                    default: 1.0,
                    constraint: "exact only at alpha1 = 1; admissible range (1/2, 2)",
                },
                ParamInfo {
                    name: "alpha2",
                    default: 1.8,
                    constraint: "(4 alpha1 + 1)/3 < alpha2 < 2 alpha1",
                },
                ParamInfo { name: "R_o", default: 1.0, constraint: "positive density scale" },
                ParamInfo { name: "U_o", default: 0.5, constraint: "transverse speed" },
                ParamInfo { name: "theta_o", default: 0.15, constraint: "phase offset" },
                ParamInfo { name: "C2", default: 2.5, constraint: "profile offset" },
            ],
            "screw flow with fractional profile slope",
            vec!["all balance ties close only at alpha1 = 1".to_string()],
            vec![],
        ),
    };
    let gamma_note = match case {
        2 => "2*alpha2/3",
        4 => "(2 alpha1 + 1)/(4 alpha1 - 1)",
        5 => "6 alpha1/(5 alpha1 - 1)",
        _ => "4/3",
    };
    let (a1_default, a2_default) = match case {
        1 => (2.0, 3.0),
        2 => (1.0, 1.8),
        3 => (1.0, 1.5),
        4 => (0.75, 1.4),
        _ => (1.0, 1.8),
    };
    let combo = format!("J3+P3+({a1_default})*G+({a2_default})*H");
    Ok(FamilyMetadata {
        id: id.to_string(),
        group: "G3".to_string(),
        title: title.to_string(),
        algebra: vec![combo.clone()],
        combo,
        gamma,
        gamma_fixed: true,
        parameters,
        domain: format!("t > 0 and W > 0 (exponent law: gamma = {gamma_note})"),
        force_free: false,
        circulation_conserved: true,
        planar_b: true,
        static_flow: false,
        variants,
        notes,
    })
}

pub fn validate(id: &str, params: &ParamMap) -> Result<()> {
    let mut v = Violations::new();
    match case_of(id) {
        1 => {
            let a1 = get(params, "alpha1");
            let r_o = get(params, "R_o");
            let x_o = get(params, "X_o");
            v.require(a1 > 1.0, "alpha1: must exceed 1");
            v.require(r_o > 0.0, "R_o: must be positive");
            if a1 > 1.0 {
                v.require(
                    x_o * x_o < r_o / (a1 - 1.0),
                    "X_o: X_o^2 must stay below R_o/(alpha1 - 1)",
                );
            }
        }
        2 => {
            let a2 = get(params, "alpha2");
            v.require((1.5..2.0).contains(&a2), "alpha2: must lie in [3/2, 2)");
            v.require(get(params, "R_o") > 0.0, "R_o: must be positive");
            v.require(get(params, "A_o") > 0.0, "A_o: must be positive");
        }
        3 => {
            let a2 = get(params, "alpha2");
            v.require(a2 > 1.0 && a2 < 2.0, "alpha2: must lie in (1, 2)");
            v.require(get(params, "A_o") > 0.0, "A_o: must be positive");
            v.require(get(params, "X_o") != 0.0, "X_o: must be nonzero");
        }
        4 => {
            let a1 = get(params, "alpha1");
            let a2 = get(params, "alpha2");
            v.require(a1 > 0.5 && a1 < 1.0, "alpha1: must lie in (1/2, 1)");
            v.require(
                a2 > a1 + 0.5 && a2 < 2.0 * a1,
                "alpha2: must lie in (alpha1 + 1/2, 2 alpha1)",
            );
            v.require(get(params, "R_o") > 0.0, "R_o: must be positive");
        }
        _ => {
            let a1 = get(params, "alpha1");
            let a2 = get(params, "alpha2");
            let lo_mid = (4.0 * a1 + 1.0) / 3.0;
            let admissible = (a1 > 0.5 && a1 < 2.0 && a2 > lo_mid && a2 < 2.0 * a1)
                || (a1 > 2.0 && a2 > a1 && a2 < lo_mid);
            v.require(
                admissible,
                "alpha1/alpha2: need 1/2 < alpha1 < 2 with (4 alpha1+1)/3 < alpha2 < 2 alpha1, \
                 or alpha1 > 2 with alpha1 < alpha2 < (4 alpha1+1)/3",
            );
            v.require(get(params, "R_o") > 0.0, "R_o: must be positive");
        }
    }
    v.into_result(id)
}

pub fn build(id: &str, params: &ParamMap, variant: Option<&str>) -> Result<SolutionFamily> {
    Ok(Box::new(assemble(id, params, variant)?))
}

fn assemble(id: &str, params: &ParamMap, variant: Option<&str>) -> Result<G3> {
    let allowed: &[&'static str] = if case_of(id) == 1 { &[PRINTED] } else { &[] };
    check_variant(id, variant, allowed)?;
    validate(id, params)?;
    let printed = variant == Some(PRINTED);
    let u_o = get(params, "U_o");
    let theta_o = get(params, "theta_o");
    let c2 = get(params, "C2");

    let fam = match case_of(id) {
        1 => {
            let a1 = get(params, "alpha1");
            let r_o = get(params, "R_o");
            let x_o = get(params, "X_o");
            let p0 = if printed {
                r_o / (2.0 * (a1 - 1.0))
            } else {
                (r_o / (a1 - 1.0) - x_o * x_o) / 2.0
            };
            G3 {
                id: "G3/case1",
                gamma: 4.0 / 3.0,
                alpha1: a1,
                alpha2: a1 + 1.0,
                c1: 1.0,
                c2,
                u_o,
                theta_o,
                rho0: r_o,
                a_rho: -2.0 / a1,
                b_rho: (2.0 - 3.0 * a1) / a1,
                p0,
                a_p: -2.0 * (a1 + 1.0) / a1,
                b_p: 2.0 * (1.0 - a1) / a1,
                amp: x_o,
                a_b: -(a1 + 1.0) / a1,
                b_b: if printed { 0.0 } else { (1.0 - a1) / a1 },
            }
        }
        2 => {
            let a2 = get(params, "alpha2");
            let r_o = get(params, "R_o");
            G3 {
                id: "G3/case2",
                gamma: 2.0 * a2 / 3.0,
                alpha1: 1.0,
                alpha2: a2,
                c1: 1.0,
                c2,
                u_o,
                theta_o,
                rho0: r_o,
                a_rho: 2.0 * (1.0 - a2),
                b_rho: 2.0 * a2 - 5.0,
                p0: get(params, "A_o"),
                a_p: -2.0 * a2,
                b_p: 0.0,
                amp: (r_o / (2.0 - a2)).sqrt(),
                a_b: -a2,
                b_b: a2 - 2.0,
            }
        }
        3 => {
            let a2 = get(params, "alpha2");
            let a_o = get(params, "A_o");
            let x_o = get(params, "X_o");
            G3 {
                id: "G3/case3",
                gamma: 4.0 / 3.0,
                alpha1: 1.0,
                alpha2: a2,
                c1: 1.0,
                c2,
                u_o,
                theta_o,
                rho0: (2.0 - a2) * (2.0 * a_o + x_o * x_o),
                a_rho: 2.0 * (1.0 - a2),
                b_rho: 2.0 * a2 - 5.0,
                p0: a_o,
                a_p: -2.0 * a2,
                b_p: 2.0 * a2 - 4.0,
                amp: x_o,
                a_b: -a2,
                b_b: a2 - 2.0,
            }
        }
        4 => {
            let a1 = get(params, "alpha1");
            let a2 = get(params, "alpha2");
            let r_o = get(params, "R_o");
            let gamma = (2.0 * a1 + 1.0) / (4.0 * a1 - 1.0);
            let c1 = (2.0 * a1 - 1.0) / a1;
            let b_rho = (2.0 * a2 - 6.0 * a1 + 1.0) / (2.0 * a1 - 1.0);
            let b_p = (2.0 * a2 - 2.0 * a1 - 1.0) / (2.0 * a1 - 1.0);
            let a_rho = -(c1 + 2.0) - b_rho * c1;
            G3 {
                id: "G3/case4",
                gamma,
                alpha1: a1,
                alpha2: a2,
                c1,
                c2,
                u_o,
                theta_o,
                rho0: r_o,
                a_rho,
                b_rho,
                p0: (1.0 - a1) * r_o / (2.0 * (a2 - a1) - 1.0),
                a_p: -b_p * c1 - gamma * (2.0 + c1),
                b_p,
                amp: (r_o / (2.0 * a1 - a2)).sqrt(),
                a_b: (a_rho - 2.0) / 2.0,
                b_b: (a2 - 2.0 * a1) / (2.0 * a1 - 1.0),
            }
        }
        _ => {
            let a1 = get(params, "alpha1");
            let a2 = get(params, "alpha2");
            let r_o = get(params, "R_o");
            let gamma = 6.0 * a1 / (5.0 * a1 - 1.0);
            let c1 = (4.0 * a1 - 2.0) / (3.0 * a1);
            let b_rho = (3.0 * a2 - 8.0 * a1 + 1.0) / (2.0 * a1 - 1.0);
            let b_p = 3.0 * (a2 - 2.0 * a1) / (2.0 * a1 - 1.0);
            let a_rho = -(c1 + 2.0) - b_rho * c1;
            G3 {
                id: "G3/case5",
                gamma,
                alpha1: a1,
                alpha2: a2,
                c1,
                c2,
                u_o,
                theta_o,
                rho0: r_o,
                a_rho,
                b_rho,
                p0: r_o / (2.0 * (2.0 * a1 - a2)),
                a_p: -b_p * c1 - gamma * (2.0 + c1),
                b_p,
                amp: ((a1 - 2.0) * r_o / (4.0 * a1 - 3.0 * a2 + 1.0)).sqrt(),
                a_b: (a_rho - 2.0) / 2.0,
                b_b: (3.0 * a2 - 4.0 * a1 - 1.0) / (4.0 * a1 - 2.0),
            }
        }
    };
    Ok(fam)
}

impl G3 {
    fn profile_value(&self, t: f64, z: f64) -> f64 {
        self.c1 * (z + t.ln() / self.alpha1) + self.c2
    }

    fn components<S: Scalar>(&self, t: S, x: S, y: S, z: S) -> [S; 8] {
        let lt = t.ln();
        let w = (z + lt / self.alpha1) * self.c1 + self.c2;
        let theta =
            lt / self.alpha1 - w.ln() / (self.alpha1 * self.c1) + self.theta_o;
        let rho = t.powf(self.a_rho) * w.powf(self.b_rho) * self.rho0;
        let p = t.powf(self.a_p) * w.powf(self.b_p) * self.p0;
        let (sin_th, cos_th) = (theta.sin(), theta.cos());
        let v1 = (x - sin_th * self.u_o) / t;
        let v2 = (y - cos_th * self.u_o) / t;
        let v3 = (w - 1.0 / self.alpha1) / t;
        let amp = t.powf(self.a_b) * w.powf(self.b_b) * self.amp;
        [rho, p, v1, v2, v3, amp * sin_th, amp * cos_th, S::lit(0.0)]
    }
}

impl MhdField for G3 {
    fn id(&self) -> &str {
        self.id
    }

    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn metadata(&self) -> FamilyMetadata {
        let mut meta = describe(self.id).expect("own id");
        meta.gamma = self.gamma;
        meta.combo = format!("J3+P3+({})*G+({})*H", self.alpha1, self.alpha2);
        meta.algebra = vec![meta.combo.clone()];
        meta
    }

    fn sample_window(&self) -> SampleWindow {
        SampleWindow { t: (0.5, 4.0), x: (-2.0, 2.0), y: (-2.0, 2.0), z: (-1.0, 2.0) }
    }

    fn check_point(&self, p: &SpacetimePoint) -> Result<()> {
        if p.t <= 0.0 {
            return Err(crate::error::outside_domain(self.id, "requires t > 0"));
        }
        if self.profile_value(p.t, p.z) <= 0.0 {
            return Err(crate::error::outside_domain(
                self.id,
                "requires a positive profile value W(t, z)",
            ));
        }
        Ok(())
    }

    eval_via_components!();

    fn reference_quantities(&self, p: &SpacetimePoint) -> Result<ReferenceQuantities> {
        self.check_point(p)?;
        Ok(ReferenceQuantities::default())
    }
}
