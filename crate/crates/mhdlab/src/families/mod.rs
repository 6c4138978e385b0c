//! Catalogue of closed-form and profile-backed ideal MHD solution
//! families.
//!
//! Each family implements [`MhdField`]: it can evaluate the plasma state
//! at a spacetime point, evaluate the full second-order jet of the state
//! (for residual diagnostics), describe itself, and report closed-form
//! derived quantities where those are known.
//!
//! Families are identified by stable string ids such as `"G1/gamma=2"` or
//! `"G10/case2"`. Construction goes through [`make_family`], which merges
//! user parameters over documented defaults and validates every named
//! constraint before any evaluation happens.

use crate::diffcalc::StateJet;
use crate::error::{MhdError, Result};
use crate::params::{merge_params, ParamMap};
use crate::state::{MhdState, SpacetimePoint};
use crate::vec3::Vec3;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub mod g1;
pub mod g10;
pub mod g2;
pub mod g3;
pub mod g4;
pub mod g5;
pub mod g6;
pub mod g7;
pub mod g8;
pub mod g9;

/// A named numeric parameter with its default and a one-line constraint.
#[derive(Clone, Debug, Serialize)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: f64,
    pub constraint: &'static str,
}

/// Self-description of a solution family.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyMetadata {
    /// Stable id, e.g. `"G3/case2"`.
    pub id: String,
    /// Group id, e.g. `"G3"`.
    pub group: String,
    /// Human-readable description of the flow.
    pub title: String,
    /// Symmetry combination that defines the family, in the combo
    /// grammar understood by the `symmetry` module.
    pub combo: String,
    /// Remaining generators of the family's invariance algebra.
    pub algebra: Vec<String>,
    /// Adiabatic exponent in effect.
    pub gamma: f64,
    /// Whether the exponent is structurally fixed or user-selectable.
    pub gamma_fixed: bool,
    pub parameters: Vec<ParamInfo>,
    /// Prose description of the domain predicate.
    pub domain: String,
    /// True when the magnetic force density vanishes identically.
    pub force_free: bool,
    /// True when circulation around advected material loops is constant.
    pub circulation_conserved: bool,
    /// True when the magnetic field has no axial component.
    pub planar_b: bool,
    /// True when the velocity field is steady.
    pub static_flow: bool,
    /// Alternative formula variants selectable at construction.
    pub variants: Vec<&'static str>,
    pub notes: Vec<String>,
}

/// Closed-form derived quantities a family can vouch for at a point.
/// `None` entries mean the family publishes no formula for that quantity.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReferenceQuantities {
    /// Current density (curl of B).
    pub current: Option<Vec3>,
    /// Magnetic force density (J x B).
    pub magnetic_force: Option<Vec3>,
    /// Vorticity (curl of v).
    pub vorticity: Option<Vec3>,
}

/// Axis-aligned spacetime box from which sample points are drawn.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SampleWindow {
    pub t: (f64, f64),
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub z: (f64, f64),
}

impl SampleWindow {
    pub fn draw(&self, rng: &mut impl Rng) -> SpacetimePoint {
        let u = |(lo, hi): (f64, f64), r: &mut dyn FnMut() -> f64| lo + (hi - lo) * r();
        let mut r = || rng.gen::<f64>();
        SpacetimePoint::new(u(self.t, &mut r), u(self.x, &mut r), u(self.y, &mut r), u(self.z, &mut r))
    }
}

/// The working interface of a solution family.
pub trait MhdField: Send + Sync {
    /// Stable id of the concrete sub-case.
    fn id(&self) -> &str;

    /// Adiabatic exponent used by the pressure law and diagnostics.
    fn gamma(&self) -> f64;

    fn metadata(&self) -> FamilyMetadata;

    /// Box sample points are drawn from (combined with the domain
    /// predicate via rejection).
    fn sample_window(&self) -> SampleWindow;

    /// Detailed domain check with a reason on failure.
    fn check_point(&self, p: &SpacetimePoint) -> Result<()>;

    /// Fast domain predicate.
    fn contains(&self, p: &SpacetimePoint) -> bool {
        self.check_point(p).is_ok()
    }

    /// Plasma state at a point inside the domain.
    fn state(&self, p: &SpacetimePoint) -> Result<MhdState>;

    /// Second-order jet of the state, for derivative diagnostics.
    fn state_jet(&self, p: &SpacetimePoint) -> Result<StateJet>;

    /// Closed-form derived quantities, where published.
    fn reference_quantities(&self, p: &SpacetimePoint) -> Result<ReferenceQuantities> {
        self.check_point(p)?;
        Ok(ReferenceQuantities::default())
    }
}

/// Implements `state`/`state_jet` by delegating to an inherent generic
/// `components` method returning `[S; 8]` in the order
/// `[rho, p, v1, v2, v3, b1, b2, b3]`.
macro_rules! eval_via_components {
    () => {
        fn state(
            &self,
            p: &crate::state::SpacetimePoint,
        ) -> crate::error::Result<crate::state::MhdState> {
            self.check_point(p)?;
            let [rho, pr, v1, v2, v3, b1, b2, b3] = self.components(p.t, p.x, p.y, p.z);
            crate::state::MhdState::new(
                rho,
                pr,
                crate::vec3::Vec3::new(v1, v2, v3),
                crate::vec3::Vec3::new(b1, b2, b3),
            )
        }

        fn state_jet(
            &self,
            p: &crate::state::SpacetimePoint,
        ) -> crate::error::Result<crate::diffcalc::StateJet> {
            self.check_point(p)?;
            let [t, x, y, z] = crate::jet::Jet2::vars(p.t, p.x, p.y, p.z);
            Ok(crate::diffcalc::StateJet::from_components(self.components(
                t, x, y, z,
            )))
        }
    };
}
pub(crate) use eval_via_components;

/// A constructed solution family.
pub type SolutionFamily = Box<dyn MhdField>;

/// All registered sub-case ids, grouped order.
pub fn family_ids() -> Vec<&'static str> {
    vec![
        "G1/gamma=1",
        "G1/gamma=2",
        "G1/generic",
        "G2/gamma=1.5",
        "G2/gamma=2",
        "G2/generic",
        "G3/case1",
        "G3/case2",
        "G3/case3",
        "G3/case4",
        "G3/case5",
        "G4",
        "G5",
        "G6",
        "G6/alpha2=0",
        "G7",
        "G8",
        "G9",
        "G10/case1",
        "G10/case2",
    ]
}

/// Ids of the sub-cases exercised by the standard residual suite.
pub fn residual_suite_ids() -> Vec<&'static str> {
    vec![
        "G1/gamma=1",
        "G1/gamma=2",
        "G1/generic",
        "G2/gamma=1.5",
        "G2/gamma=2",
        "G3/case1",
        "G3/case2",
        "G3/case3",
        "G3/case4",
        "G3/case5",
        "G4",
        "G6/alpha2=0",
        "G7",
        "G8",
        "G9",
        "G10/case1",
        "G10/case2",
    ]
}

/// Default parameter map for a family id.
pub fn default_params(id: &str) -> Result<ParamMap> {
    Ok(describe(id)?
        .parameters
        .iter()
        .map(|p| (p.name.to_string(), p.default))
        .collect())
}

/// Static metadata for a family id at default parameters.
pub fn describe(id: &str) -> Result<FamilyMetadata> {
    match group_of(id)? {
        "G1" => g1::describe(id),
        "G2" => g2::describe(id),
        "G3" => g3::describe(id),
        "G4" => g4::describe(id),
        "G5" => g5::describe(id),
        "G6" => g6::describe(id),
        "G7" => g7::describe(id),
        "G8" => g8::describe(id),
        "G9" => g9::describe(id),
        "G10" => g10::describe(id),
        _ => unreachable!(),
    }
}

/// Validates a full or partial parameter map against the family's named
/// constraints. Total: never panics, reports every violation by name.
pub fn validate_params(id: &str, params: &ParamMap) -> Result<()> {
    let merged = merge_params(id, &default_params(id)?, params)?;
    match group_of(id)? {
        "G1" => g1::validate(id, &merged),
        "G2" => g2::validate(id, &merged),
        "G3" => g3::validate(id, &merged),
        "G4" => g4::validate(&merged),
        "G5" => g5::validate(&merged),
        "G6" => g6::validate(id, &merged),
        "G7" => g7::validate(&merged),
        "G8" => g8::validate(&merged),
        "G9" => g9::validate(&merged),
        "G10" => g10::validate(id, &merged),
        _ => unreachable!(),
    }
}

/// Builds a family with the default formula variant.
pub fn make_family(id: &str, params: &ParamMap) -> Result<SolutionFamily> {
    make_family_with(id, params, None)
}

/// Builds a family, optionally selecting a named formula variant.
pub fn make_family_with(
    id: &str,
    params: &ParamMap,
    variant: Option<&str>,
) -> Result<SolutionFamily> {
    let merged = merge_params(id, &default_params(id)?, params)?;
    match group_of(id)? {
        "G1" => g1::build(id, &merged, variant),
        "G2" => g2::build(id, &merged, variant),
        "G3" => g3::build(id, &merged, variant),
        "G4" => g4::build(&merged, variant),
        "G5" => g5::build(&merged, variant),
        "G6" => g6::build(id, &merged, variant),
        "G7" => g7::build(&merged, variant),
        "G8" => g8::build(&merged, variant),
        "G9" => g9::build(&merged, variant),
        "G10" => g10::build(id, &merged, variant),
        _ => unreachable!(),
    }
}

fn group_of(id: &str) -> Result<&str> {
    let group = id.split('/').next().unwrap_or(id);
    match group {
        "G1" | "G2" | "G3" | "G4" | "G5" | "G6" | "G7" | "G8" | "G9" | "G10" => {
            if family_ids().contains(&id) {
                Ok(group)
            } else {
                Err(MhdError::UnknownFamily(id.to_string()))
            }
        }
        _ => Err(MhdError::UnknownFamily(id.to_string())),
    }
}

/// Rejects a variant name a family does not offer.
pub(crate) fn check_variant(
    id: &str,
    variant: Option<&str>,
    allowed: &[&'static str],
) -> Result<()> {
    match variant {
        None => Ok(()),
        Some(v) if allowed.contains(&v) => Ok(()),
        Some(v) => Err(MhdError::Parse(format!(
            "family {id} has no variant {v:?} (available: {})",
            if allowed.is_empty() { "none".to_string() } else { allowed.join(", ") }
        ))),
    }
}

/// Draws `n` points from the family's sample window, rejecting those
/// outside the domain predicate. Deterministic for a given seed.
pub fn sample_points(
    field: &dyn MhdField,
    seed: u64,
    n: usize,
) -> Result<Vec<SpacetimePoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window = field.sample_window();
    let mut points = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while points.len() < n {
        attempts += 1;
        if attempts > 200 * n.max(8) {
            return Err(MhdError::Diagnostic(format!(
                "sample window for {} rejects too many draws ({} accepted of {})",
                field.id(),
                points.len(),
                attempts
            )));
        }
        let p = window.draw(&mut rng);
        if field.contains(&p) {
            points.push(p);
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete_and_buildable() {
        let ids = family_ids();
        assert!(ids.len() >= 17);
        let groups: std::collections::BTreeSet<_> =
            ids.iter().map(|id| id.split('/').next().unwrap()).collect();
        assert_eq!(groups.len(), 10);
        for id in ids {
            let meta = describe(id).unwrap();
            assert_eq!(meta.id, id);
            let defaults = default_params(id).unwrap();
            validate_params(id, &defaults).unwrap();
            let fam = make_family(id, &ParamMap::new()).unwrap();
            assert_eq!(fam.id(), id);
            assert!(fam.gamma() >= 1.0, "{id}: gamma {}", fam.gamma());
        }
    }

    #[test]
    fn unknown_ids_are_rejected() {
        assert!(matches!(
            make_family("G11", &ParamMap::new()),
            Err(MhdError::UnknownFamily(_))
        ));
        assert!(matches!(
            make_family("G1/gamma=3", &ParamMap::new()),
            Err(MhdError::UnknownFamily(_))
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_in_domain() {
        let fam = make_family("G7", &ParamMap::new()).unwrap();
        let a = sample_points(fam.as_ref(), 7, 64).unwrap();
        let b = sample_points(fam.as_ref(), 7, 64).unwrap();
        assert_eq!(a.len(), 64);
        for (p, q) in a.iter().zip(&b) {
            assert_eq!(p, q);
        }
        for p in &a {
            assert!(fam.contains(p));
        }
    }

    #[test]
    fn states_and_jets_agree_across_registry() {
        for id in family_ids() {
            let fam = make_family(id, &ParamMap::new()).unwrap();
            for p in sample_points(fam.as_ref(), 11, 8).unwrap() {
                let s = fam.state(&p).unwrap();
                let j = fam.state_jet(&p).unwrap();
                let js = j.state().unwrap();
                let d = (s.v - js.v).max_abs().max((s.b - js.b).max_abs());
                let d = d.max((s.rho - js.rho).abs()).max((s.p - js.p).abs());
                assert!(d < 1e-12, "{id}: jet value drifts from state by {d:.3e}");
            }
        }
    }
}
