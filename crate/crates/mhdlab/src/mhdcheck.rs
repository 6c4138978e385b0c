//! Residuals of the ideal-MHD system and derived diagnostics.
//!
//! Every check runs on the exact second-order jet of a field evaluation:
//! no finite differences enter, so a vanishing residual certifies the
//! formulas themselves, to roundoff amplified by the formula's own
//! conditioning. The system is taken in non-dimensional form with unit
//! magnetic permeability:
//!
//! * mass:        d rho/dt + div(rho v) = 0
//! * momentum:    rho Dv/Dt + grad p - (curl B) x B = 0
//! * pressure:    Dp/Dt + gamma p div v = 0
//! * induction:   dB/dt - curl(v x B) = 0
//! * solenoid:    div B = 0

use crate::diffcalc::{
    convective, convective_vec, curl, curl1, curl_jet, div, div1, grad, grad_jet, material,
    StateJet,
};
use crate::error::Result;
use crate::families::MhdField;
use crate::jet::{Jet1, T, X, Y, Z};
use crate::state::SpacetimePoint;
use crate::vec3::Vec3;
use serde::Serialize;

/// Pointwise residuals of the five ideal-MHD equations.
///
/// `max_abs` is the largest raw residual component; `rel` rescales each
/// equation by the largest term entering its balance (floored at one) and
/// takes the worst, so it stays meaningful where the fields are large.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ResidualReport {
    pub continuity: f64,
    pub momentum: [f64; 3],
    pub pressure: f64,
    pub induction: [f64; 3],
    #[serde(rename = "divB")]
    pub div_b: f64,
    pub max_abs: f64,
    pub rel: f64,
}

impl ResidualReport {
    /// Keeps, per entry, whichever of the two reports is worse in
    /// magnitude. Used to fold pointwise reports into a suite verdict.
    pub fn merge_max(&mut self, other: &ResidualReport) {
        fn pick(a: &mut f64, b: f64) {
            if b.abs() > a.abs() {
                *a = b;
            }
        }
        pick(&mut self.continuity, other.continuity);
        pick(&mut self.pressure, other.pressure);
        pick(&mut self.div_b, other.div_b);
        for i in 0..3 {
            pick(&mut self.momentum[i], other.momentum[i]);
            pick(&mut self.induction[i], other.induction[i]);
        }
        self.max_abs = self.max_abs.max(other.max_abs);
        self.rel = self.rel.max(other.rel);
    }

    /// Name of the balance carrying the largest raw residual entry.
    pub fn dominant_equation(&self) -> &'static str {
        let entries = [
            (self.continuity.abs(), "continuity"),
            (self.momentum[0].abs(), "momentum-x"),
            (self.momentum[1].abs(), "momentum-y"),
            (self.momentum[2].abs(), "momentum-z"),
            (self.pressure.abs(), "pressure transport"),
            (self.induction[0].abs(), "induction-x"),
            (self.induction[1].abs(), "induction-y"),
            (self.induction[2].abs(), "induction-z"),
            (self.div_b.abs(), "divergence constraint"),
        ];
        entries
            .iter()
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .map(|e| e.1)
            .unwrap_or("continuity")
    }
}

/// Residuals of the full system at one point.
pub fn residual(field: &dyn MhdField, p: &SpacetimePoint) -> Result<ResidualReport> {
    let jet = field.state_jet(p)?;
    Ok(residual_of_jet(&jet, field.gamma()))
}

/// Residuals computed directly from a state jet.
pub fn residual_of_jet(jet: &StateJet, gamma: f64) -> ResidualReport {
    let rho = jet.rho.v;
    let v = Vec3::new(jet.v[0].v, jet.v[1].v, jet.v[2].v);
    let b = Vec3::new(jet.b[0].v, jet.b[1].v, jet.b[2].v);
    let div_v = div(&jet.v);

    let drho_dt = jet.rho.g[T];
    let rho_adv = convective(v, &jet.rho);
    let continuity = drho_dt + rho_adv + rho * div_v;
    let cont_scale = scale_floor(&[drho_dt, rho_adv, rho * div_v]);

    let accel = Vec3::new(jet.v[0].g[T], jet.v[1].g[T], jet.v[2].g[T]) * rho;
    let advect = convective_vec(v, &jet.v) * rho;
    let grad_p = grad(&jet.p);
    let lorentz = curl(&jet.b).cross(b);
    let momentum = accel + advect + grad_p - lorentz;
    let mom_scale = scale_floor(&[
        accel.max_abs(),
        advect.max_abs(),
        grad_p.max_abs(),
        lorentz.max_abs(),
    ]);

    let dp = material(v, &jet.p);
    let compression = gamma * jet.p.v * div_v;
    let pressure = dp + compression;
    let pres_scale = scale_floor(&[jet.p.g[T], dp - jet.p.g[T], compression]);

    let vxb = [
        jet.v[1] * jet.b[2] - jet.v[2] * jet.b[1],
        jet.v[2] * jet.b[0] - jet.v[0] * jet.b[2],
        jet.v[0] * jet.b[1] - jet.v[1] * jet.b[0],
    ];
    let db_dt = Vec3::new(jet.b[0].g[T], jet.b[1].g[T], jet.b[2].g[T]);
    let stretching = curl(&vxb);
    let induction = db_dt - stretching;
    let ind_scale = scale_floor(&[db_dt.max_abs(), stretching.max_abs()]);

    let div_b = div(&jet.b);
    let divb_scale = scale_floor(&(0..3)
        .flat_map(|i| [jet.b[i].g[X], jet.b[i].g[Y], jet.b[i].g[Z]])
        .collect::<Vec<_>>());

    let max_abs = continuity
        .abs()
        .max(momentum.max_abs())
        .max(pressure.abs())
        .max(induction.max_abs())
        .max(div_b.abs());
    let rel = (continuity.abs() / cont_scale)
        .max(momentum.max_abs() / mom_scale)
        .max(pressure.abs() / pres_scale)
        .max(induction.max_abs() / ind_scale)
        .max(div_b.abs() / divb_scale);

    ResidualReport {
        continuity,
        momentum: [momentum.x, momentum.y, momentum.z],
        pressure,
        induction: [induction.x, induction.y, induction.z],
        div_b,
        max_abs,
        rel,
    }
}

/// Worst residual report over a set of points.
pub fn worst_residual(
    field: &dyn MhdField,
    points: &[SpacetimePoint],
) -> Result<ResidualReport> {
    let mut worst: Option<ResidualReport> = None;
    for p in points {
        let r = residual(field, p)?;
        match worst.as_mut() {
            Some(w) => w.merge_max(&r),
            None => worst = Some(r),
        }
    }
    worst.ok_or_else(|| crate::error::MhdError::Diagnostic("no points supplied".to_string()))
}

fn scale_floor(terms: &[f64]) -> f64 {
    terms.iter().fold(1.0_f64, |m, t| m.max(t.abs()))
}

/// Current density `curl B` from the exact jet.
pub fn current_density(field: &dyn MhdField, p: &SpacetimePoint) -> Result<Vec3> {
    Ok(curl(&field.state_jet(p)?.b))
}

/// The magnetic force and its tension / magnetic-pressure split.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ForceDecomposition {
    /// `(curl B) x B`.
    pub lorentz: Vec3,
    /// `(B . grad) B`.
    pub tension: Vec3,
    /// `grad(|B|^2 / 2)`.
    pub magnetic_pressure: Vec3,
}

impl ForceDecomposition {
    /// Defect of the vector identity
    /// `(curl B) x B = (B . grad) B - grad(|B|^2 / 2)`;
    /// nonzero only through roundoff.
    pub fn identity_defect(&self) -> f64 {
        (self.lorentz - (self.tension - self.magnetic_pressure)).max_abs()
    }
}

pub fn force_decomposition(
    field: &dyn MhdField,
    p: &SpacetimePoint,
) -> Result<ForceDecomposition> {
    let jet = field.state_jet(p)?;
    let b = Vec3::new(jet.b[0].v, jet.b[1].v, jet.b[2].v);
    let half_b2 = (jet.b[0] * jet.b[0] + jet.b[1] * jet.b[1] + jet.b[2] * jet.b[2]) * 0.5;
    Ok(ForceDecomposition {
        lorentz: curl(&jet.b).cross(b),
        tension: convective_vec(b, &jet.b),
        magnetic_pressure: grad(&half_b2),
    })
}

/// Whether the magnetic force density vanishes at the point, relative to
/// the sizes of the current and the field.
pub fn is_force_free(field: &dyn MhdField, p: &SpacetimePoint, tol: f64) -> Result<bool> {
    let jet = field.state_jet(p)?;
    let b = Vec3::new(jet.b[0].v, jet.b[1].v, jet.b[2].v);
    let j = curl(&jet.b);
    let scale = 1.0_f64.max(j.max_abs() * b.max_abs());
    Ok(j.cross(b).max_abs() <= tol * scale)
}

/// Residual of the frozen-in law in Cauchy form: the field per unit mass
/// `q = B / rho` is transported like a material line element,
/// `Dq/Dt = (q . grad) v`.
pub fn frozen_in_residual(field: &dyn MhdField, p: &SpacetimePoint) -> Result<f64> {
    let jet = field.state_jet(p)?;
    let v = Vec3::new(jet.v[0].v, jet.v[1].v, jet.v[2].v);
    let q = [jet.b[0] / jet.rho, jet.b[1] / jet.rho, jet.b[2] / jet.rho];
    let qv = Vec3::new(q[0].v, q[1].v, q[2].v);
    let mut worst = 0.0_f64;
    for i in 0..3 {
        let r = material(v, &q[i]) - convective(qv, &jet.v[i]);
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Residuals of the vorticity transport law, with and without the
/// pressure-density (baroclinic) source.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct VorticityBalance {
    /// `dw/dt - curl(v x w) - curl((J x B)/rho) + curl(grad p / rho)`,
    /// the exact consequence of the momentum equation.
    pub full: f64,
    /// The same balance without the baroclinic term, valid only where
    /// the density and pressure gradients are parallel.
    pub barotropic: f64,
}

pub fn vorticity_transport_residual(
    field: &dyn MhdField,
    p: &SpacetimePoint,
) -> Result<VorticityBalance> {
    let jet = field.state_jet(p)?;
    let v1: [Jet1; 3] = [jet.v[0].into(), jet.v[1].into(), jet.v[2].into()];
    let b1: [Jet1; 3] = [jet.b[0].into(), jet.b[1].into(), jet.b[2].into()];
    let rho1: Jet1 = jet.rho.into();
    let w = curl_jet(&jet.v);
    let j = curl_jet(&jet.b);
    let lorentz_acc = cross1(&j, &b1).map(|f| f / rho1);
    let vxw = cross1(&v1, &w);
    let dw_dt = Vec3::new(w[0].g[T], w[1].g[T], w[2].g[T]);
    let barotropic_vec = dw_dt - curl1(&vxw) - curl1(&lorentz_acc);
    let gp = grad_jet(&jet.p);
    let baroclinic = curl1(&[gp[0] / rho1, gp[1] / rho1, gp[2] / rho1]);
    Ok(VorticityBalance {
        full: (barotropic_vec + baroclinic).max_abs(),
        barotropic: barotropic_vec.max_abs(),
    })
}

/// Sign of the field-aligned part `(v . B) B` of the electromagnetic
/// energy flux.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoyntingSign {
    /// The self-consistent sign: flux `|B|^2 v - (v . B) B`.
    Minus,
    /// The transposed sign, kept selectable as a falsifiable variant.
    Plus,
}

/// Residual of the total-energy conservation law
/// `dE/dt + div[(rho |v|^2/2 + gamma p/(gamma-1)) v + |B|^2 v +- (v.B) B] = 0`
/// with `E = rho |v|^2/2 + p/(gamma-1) + |B|^2/2`.
pub fn energy_law_residual(
    field: &dyn MhdField,
    p: &SpacetimePoint,
    sign: PoyntingSign,
) -> Result<f64> {
    let jet = field.state_jet(p)?;
    let gamma = field.gamma();
    let v1: [Jet1; 3] = [jet.v[0].into(), jet.v[1].into(), jet.v[2].into()];
    let b1: [Jet1; 3] = [jet.b[0].into(), jet.b[1].into(), jet.b[2].into()];
    let rho1: Jet1 = jet.rho.into();
    let p1: Jet1 = jet.p.into();
    let kinetic = rho1 * dot1(&v1, &v1) * 0.5;
    let b2 = dot1(&b1, &b1);
    let energy = kinetic + p1 * (1.0 / (gamma - 1.0)) + b2 * 0.5;
    let carried = kinetic + p1 * (gamma / (gamma - 1.0)) + b2;
    let aligned = dot1(&v1, &b1)
        * match sign {
            PoyntingSign::Minus => -1.0,
            PoyntingSign::Plus => 1.0,
        };
    let flux = [
        carried * v1[0] + aligned * b1[0],
        carried * v1[1] + aligned * b1[1],
        carried * v1[2] + aligned * b1[2],
    ];
    Ok(energy.g[T] + div1(&flux))
}

fn cross1(a: &[Jet1; 3], b: &[Jet1; 3]) -> [Jet1; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot1(a: &[Jet1; 3], b: &[Jet1; 3]) -> Jet1 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, make_family_with, sample_points};
    use crate::params::ParamMap;

    fn points_of(id: &str, seed: u64, n: usize) -> (crate::families::SolutionFamily, Vec<SpacetimePoint>) {
        let f = make_family(id, &ParamMap::new()).unwrap();
        let pts = sample_points(f.as_ref(), seed, n).unwrap();
        (f, pts)
    }

    #[test]
    fn exact_families_have_roundoff_residuals() {
        for id in ["G4", "G7", "G8", "G1/gamma=2"] {
            let (f, pts) = points_of(id, 11, 40);
            let worst = worst_residual(f.as_ref(), &pts).unwrap();
            assert!(worst.rel < 1e-10, "{id}: rel residual {:.3e}", worst.rel);
        }
    }

    #[test]
    fn report_serializes_with_stable_names() {
        let (f, pts) = points_of("G7", 3, 1);
        let r = residual(f.as_ref(), &pts[0]).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        for key in ["continuity", "momentum", "pressure", "induction", "divB", "max_abs", "rel"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn merge_keeps_the_worse_entry() {
        let (f, pts) = points_of("G8", 5, 2);
        let a = residual(f.as_ref(), &pts[0]).unwrap();
        let b = residual(f.as_ref(), &pts[1]).unwrap();
        let mut m = a;
        m.merge_max(&b);
        assert!(m.max_abs >= a.max_abs && m.max_abs >= b.max_abs);
        assert!(m.continuity.abs() >= a.continuity.abs());
    }

    #[test]
    fn broken_variant_is_flagged_by_the_suite() {
        let f = make_family_with("G6", &ParamMap::new(), Some(crate::families::g6::PRINTED_VZ))
            .unwrap();
        let pts = sample_points(f.as_ref(), 7, 10).unwrap();
        let worst = worst_residual(f.as_ref(), &pts).unwrap();
        assert!(worst.rel > 1e-4, "printed variant slipped through: {:.3e}", worst.rel);
    }

    #[test]
    fn force_split_identity_holds_everywhere() {
        for id in ["G4", "G5", "G8", "G10/case1"] {
            let (f, pts) = points_of(id, 23, 30);
            for p in &pts {
                let d = force_decomposition(f.as_ref(), p).unwrap();
                assert!(d.identity_defect() < 1e-11, "{id} at {p:?}");
            }
        }
    }

    #[test]
    fn force_free_classification_matches_metadata() {
        let (f, pts) = points_of("G6/alpha2=0", 31, 20);
        for p in &pts {
            assert!(is_force_free(f.as_ref(), p, 1e-9).unwrap());
        }
        let (f, pts) = points_of("G5", 31, 20);
        assert!(pts.iter().any(|p| !is_force_free(f.as_ref(), p, 1e-9).unwrap()));
    }

    #[test]
    fn frozen_in_follows_from_induction_and_continuity() {
        for id in ["G1/gamma=2", "G7", "G8"] {
            let (f, pts) = points_of(id, 41, 25);
            for p in &pts {
                assert!(frozen_in_residual(f.as_ref(), p).unwrap() < 1e-9, "{id} at {p:?}");
            }
        }
    }

    #[test]
    fn vorticity_transport_closes_with_the_baroclinic_term() {
        for id in ["G7", "G8", "G5", "G1/gamma=2"] {
            let (f, pts) = points_of(id, 43, 25);
            for p in &pts {
                let vb = vorticity_transport_residual(f.as_ref(), p).unwrap();
                assert!(vb.full < 1e-8, "{id} at {p:?}: {:.3e}", vb.full);
            }
        }
    }

    #[test]
    fn energy_flux_sign_is_arbitrated_by_sheared_flows() {
        // Both families carry v . B != 0, so the two signs differ at
        // leading order and only the minus branch conserves energy.
        for id in ["G8", "G10/case2"] {
            let (f, pts) = points_of(id, 47, 20);
            for p in &pts {
                let good = energy_law_residual(f.as_ref(), p, PoyntingSign::Minus).unwrap();
                assert!(good.abs() < 1e-8, "{id} at {p:?}: {good:.3e}");
            }
            let bad = pts
                .iter()
                .map(|p| {
                    energy_law_residual(f.as_ref(), p, PoyntingSign::Plus).unwrap().abs()
                })
                .fold(0.0_f64, f64::max);
            assert!(bad > 1e-4, "{id}: transposed sign not rejected ({bad:.3e})");
        }
    }
}
