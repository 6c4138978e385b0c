//! Lagrangian diagnostics: material loops, circulation budgets,
//! field-line tracing, and a frozen-in transport probe.
//!
//! A material loop is a closed polyline of marker vertices advected by
//! the flow map `dx/dt = v(t, x)`. Circulation integrals use periodic
//! quadrature with fourth-order tangents, so smooth loops converge fast
//! enough to resolve conservation defects near roundoff.

use crate::error::{MhdError, Result};
use crate::families::MhdField;
use crate::ode::{dopri5, OdeOptions};
use crate::state::SpacetimePoint;
use crate::vec3::Vec3;
use rayon::prelude::*;

/// Smallest admissible vertex count; counts must be even so the
/// half-resolution quadrature error estimate is always available.
pub const MIN_VERTICES: usize = 16;

/// A closed polyline of marker positions at a common time.
#[derive(Clone, Debug)]
pub struct MaterialLoop {
    time: f64,
    vertices: Vec<Vec3>,
}

impl MaterialLoop {
    /// A circle of `n` markers around `center` in the plane orthogonal
    /// to `normal`.
    pub fn circle(time: f64, center: Vec3, radius: f64, normal: Vec3, n: usize) -> Result<Self> {
        if radius <= 0.0 || !radius.is_finite() {
            return Err(MhdError::Diagnostic(format!("bad loop radius {radius}")));
        }
        let axis = normal
            .normalized()
            .ok_or_else(|| MhdError::Diagnostic("zero loop normal".to_string()))?;
        // Build an orthonormal frame spanning the loop plane.
        let seed = if axis.x.abs() < 0.9 { Vec3::new(1.0, 0.0, 0.0) } else { Vec3::new(0.0, 1.0, 0.0) };
        let e1 = axis.cross(seed).normalized().expect("independent seed");
        let e2 = axis.cross(e1);
        let vertices = (0..n)
            .map(|i| {
                let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                center + e1 * (radius * th.cos()) + e2 * (radius * th.sin())
            })
            .collect();
        Self::from_points(time, vertices)
    }

    /// Wraps explicit marker positions; the polyline closes from the
    /// last vertex back to the first.
    pub fn from_points(time: f64, vertices: Vec<Vec3>) -> Result<Self> {
        if vertices.len() < MIN_VERTICES || vertices.len() % 2 != 0 {
            return Err(MhdError::Diagnostic(format!(
                "a loop needs an even vertex count of at least {MIN_VERTICES}, got {}",
                vertices.len()
            )));
        }
        if !vertices.iter().all(|v| v.is_finite()) || !time.is_finite() {
            return Err(MhdError::Diagnostic("non-finite loop data".to_string()));
        }
        Ok(MaterialLoop { time, vertices })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Every second vertex, for refinement comparisons.
    fn halved(&self) -> Vec<Vec3> {
        self.vertices.iter().step_by(2).copied().collect()
    }
}

/// Fourth-order central-difference tangents of a closed polyline,
/// parametrized by vertex index.
fn tangents(verts: &[Vec3]) -> Vec<Vec3> {
    let n = verts.len();
    (0..n)
        .map(|i| {
            let at = |k: isize| verts[((i as isize + k).rem_euclid(n as isize)) as usize];
            (at(1) - at(-1)) * (8.0 / 12.0) - (at(2) - at(-2)) * (1.0 / 12.0)
        })
        .collect()
}

/// Periodic quadrature of `w . dl` around a closed polyline.
fn loop_integral(verts: &[Vec3], w: &dyn Fn(Vec3) -> Result<Vec3>) -> Result<f64> {
    let tans = tangents(verts);
    let mut acc = 0.0;
    for (x, t) in verts.iter().zip(&tans) {
        acc += w(*x)?.dot(*t);
    }
    Ok(acc)
}

/// Circulation of the velocity field around a loop, with an error
/// estimate from recomputing on every second vertex.
#[derive(Clone, Copy, Debug)]
pub struct Circulation {
    pub value: f64,
    /// Difference against the half-resolution quadrature; an upper
    /// bound in practice, since the coarse error dominates it.
    pub quadrature_error: f64,
}

pub fn circulation(field: &dyn MhdField, lp: &MaterialLoop) -> Result<Circulation> {
    let v = |x: Vec3| -> Result<Vec3> {
        Ok(field.state(&SpacetimePoint::new(lp.time, x.x, x.y, x.z))?.v)
    };
    let fine = loop_integral(&lp.vertices, &v)?;
    let coarse = loop_integral(&lp.halved(), &v)?;
    Ok(Circulation { value: fine, quadrature_error: (fine - coarse).abs() })
}

/// Advects every marker with the flow map to time `t1`.
///
/// Markers integrate independently (in parallel); a marker that leaves
/// the field's domain poisons its right-hand side and surfaces as a
/// solver error naming the vertex.
pub fn advect(
    field: &dyn MhdField,
    lp: &MaterialLoop,
    t1: f64,
    tol: f64,
) -> Result<MaterialLoop> {
    if t1 == lp.time {
        return Ok(lp.clone());
    }
    let opts = OdeOptions::with_tol(tol, tol * 1e-2);
    let vertices: Result<Vec<Vec3>> = lp
        .vertices
        .par_iter()
        .enumerate()
        .map(|(idx, start)| {
            let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
                match field.state(&SpacetimePoint::new(t, y[0], y[1], y[2])) {
                    Ok(s) => {
                        dy[0] = s.v.x;
                        dy[1] = s.v.y;
                        dy[2] = s.v.z;
                    }
                    Err(_) => dy.fill(f64::NAN),
                }
            };
            let sol = dopri5(&rhs, lp.time, t1, &start.to_array(), &opts, None)
                .map_err(|e| {
                    MhdError::Solver(format!("marker {idx} failed to advect: {e}"))
                })?;
            let y = sol.y_end();
            Ok(Vec3::new(y[0], y[1], y[2]))
        })
        .collect();
    MaterialLoop::from_points(t1, vertices?)
}

/// Two independent measurements of `d Gamma / dt` for a material loop.
#[derive(Clone, Copy, Debug)]
pub struct CirculationRate {
    /// Symmetric difference of the circulation of the advected loop.
    pub numeric: f64,
    /// Closed-loop integral of the fluid acceleration
    /// `((curl B) x B - grad p) / rho`, which the momentum equation
    /// equates to the rate exactly.
    pub integral: f64,
}

impl CirculationRate {
    pub fn defect(&self) -> f64 {
        (self.numeric - self.integral).abs()
    }
}

pub fn circulation_rate(
    field: &dyn MhdField,
    lp: &MaterialLoop,
    tol: f64,
) -> Result<CirculationRate> {
    let dt = 1e-4 * lp.time.abs().max(1.0);
    let fwd = circulation(field, &advect(field, lp, lp.time + dt, tol)?)?;
    let bwd = circulation(field, &advect(field, lp, lp.time - dt, tol)?)?;
    let numeric = (fwd.value - bwd.value) / (2.0 * dt);
    let accel = |x: Vec3| -> Result<Vec3> {
        let jet = field.state_jet(&SpacetimePoint::new(lp.time, x.x, x.y, x.z))?;
        let b = Vec3::new(jet.b[0].v, jet.b[1].v, jet.b[2].v);
        let lorentz = crate::diffcalc::curl(&jet.b).cross(b);
        let gp = crate::diffcalc::grad(&jet.p);
        Ok((lorentz - gp) * (1.0 / jet.rho.v))
    };
    let integral = loop_integral(&lp.vertices, &accel)?;
    Ok(CirculationRate { numeric, integral })
}

/// Traces a magnetic field line by arclength from `start` at time `t`,
/// returning `samples` evenly spaced positions (including both ends).
pub fn trace_field_line(
    field: &dyn MhdField,
    t: f64,
    start: Vec3,
    length: f64,
    samples: usize,
    tol: f64,
) -> Result<Vec<Vec3>> {
    if samples < 2 || length == 0.0 || !length.is_finite() {
        return Err(MhdError::Diagnostic(format!(
            "need two or more samples and a finite nonzero length, got {samples} and {length}"
        )));
    }
    let b0 = field.state(&SpacetimePoint::new(t, start.x, start.y, start.z))?.b;
    if b0.norm() < 1e-12 {
        return Err(MhdError::Diagnostic("field vanishes at the start point".to_string()));
    }
    let rhs = |_s: f64, y: &[f64], dy: &mut [f64]| {
        match field.state(&SpacetimePoint::new(t, y[0], y[1], y[2])) {
            Ok(s) => match s.b.normalized() {
                Some(u) => {
                    dy[0] = u.x;
                    dy[1] = u.y;
                    dy[2] = u.z;
                }
                None => dy.fill(f64::NAN),
            },
            Err(_) => dy.fill(f64::NAN),
        }
    };
    let opts = OdeOptions::with_tol(tol, tol * 1e-2);
    let sol = dopri5(&rhs, 0.0, length, &start.to_array(), &opts, None)?;
    (0..samples)
        .map(|i| {
            let s = length * i as f64 / (samples - 1) as f64;
            let y = sol.sample(s)?;
            Ok(Vec3::new(y[0], y[1], y[2]))
        })
        .collect()
}

/// Maximum relative drift of the frozen-in ratio `|dl| / (|B| / rho)`
/// for a short material segment seeded along the field, advected from
/// `t0` to `t1` and checked at `checks` intermediate times.
///
/// For an exact solution the ratio is a material invariant; the probe
/// reports the worst departure from its initial value, which stays at
/// the size of the seeding separation unless transport is broken.
pub fn frozen_in_drift(
    field: &dyn MhdField,
    t0: f64,
    t1: f64,
    start: Vec3,
    checks: usize,
    tol: f64,
) -> Result<f64> {
    if checks == 0 || t1 == t0 {
        return Err(MhdError::Diagnostic("need a nonempty span and checks".to_string()));
    }
    let s0 = field.state(&SpacetimePoint::new(t0, start.x, start.y, start.z))?;
    let q0 = s0.b * (1.0 / s0.rho);
    let q0n = q0.norm();
    if q0n < 1e-12 {
        return Err(MhdError::Diagnostic("field vanishes at the seed point".to_string()));
    }
    let sep = 1e-6;
    let mate = start + q0 * (sep / q0n);
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        for k in 0..2 {
            match field.state(&SpacetimePoint::new(t, y[3 * k], y[3 * k + 1], y[3 * k + 2])) {
                Ok(s) => {
                    dy[3 * k] = s.v.x;
                    dy[3 * k + 1] = s.v.y;
                    dy[3 * k + 2] = s.v.z;
                }
                Err(_) => dy.fill(f64::NAN),
            }
        }
    };
    let y0 = [start.x, start.y, start.z, mate.x, mate.y, mate.z];
    let opts = OdeOptions::with_tol(tol, tol * 1e-2);
    let sol = dopri5(&rhs, t0, t1, &y0, &opts, None)?;
    let ratio_at = |t: f64| -> Result<f64> {
        let y = sol.sample(t)?;
        let a = Vec3::new(y[0], y[1], y[2]);
        let b = Vec3::new(y[3], y[4], y[5]);
        let s = field.state(&SpacetimePoint::new(t, a.x, a.y, a.z))?;
        Ok((b - a).norm() * s.rho / s.b.norm())
    };
    let base = ratio_at(t0)?;
    let mut worst = 0.0_f64;
    for i in 1..=checks {
        let t = t0 + (t1 - t0) * i as f64 / checks as f64;
        worst = worst.max((ratio_at(t)? / base - 1.0).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffcalc::StateJet;
    use crate::families::{make_family, FamilyMetadata, SampleWindow};
    use crate::jet::Jet2;
    use crate::params::ParamMap;
    use crate::state::MhdState;

    /// Marker flow fixtures with handpicked velocity laws. They are not
    /// solutions of the full system; they exercise the quadrature and
    /// transport machinery against closed-form answers.
    struct Fixture {
        which: &'static str,
    }

    impl Fixture {
        fn velocity(&self, x: Vec3) -> Vec3 {
            match self.which {
                "rotation" => Vec3::new(-x.y, x.x, 0.0),
                _ => Vec3::new(1.0, 0.0, 0.0),
            }
        }
    }

    impl MhdField for Fixture {
        fn id(&self) -> &str {
            self.which
        }
        fn gamma(&self) -> f64 {
            5.0 / 3.0
        }
        fn metadata(&self) -> FamilyMetadata {
            FamilyMetadata {
                id: self.which.to_string(),
                group: "fixture".to_string(),
                title: "test fixture".to_string(),
                combo: "P0".to_string(),
                algebra: vec![],
                gamma: 5.0 / 3.0,
                gamma_fixed: false,
                parameters: vec![],
                domain: "everywhere".to_string(),
                force_free: true,
                circulation_conserved: false,
                planar_b: false,
                static_flow: true,
                variants: vec![],
                notes: vec![],
            }
        }
        fn sample_window(&self) -> SampleWindow {
            SampleWindow { t: (0.0, 1.0), x: (-2.0, 2.0), y: (-2.0, 2.0), z: (-2.0, 2.0) }
        }
        fn check_point(&self, _p: &SpacetimePoint) -> Result<()> {
            Ok(())
        }
        fn state(&self, p: &SpacetimePoint) -> Result<MhdState> {
            MhdState::new(1.0, 1.0, self.velocity(Vec3::new(p.x, p.y, p.z)), Vec3::new(0.0, 0.0, 1.0))
        }
        fn state_jet(&self, p: &SpacetimePoint) -> Result<StateJet> {
            let [_, x, y, _] = Jet2::vars(p.t, p.x, p.y, p.z);
            let (v1, v2) = match self.which {
                "rotation" => (-y, x),
                _ => (Jet2::constant(1.0), Jet2::constant(0.0)),
            };
            Ok(StateJet::from_components([
                Jet2::constant(1.0),
                Jet2::constant(1.0),
                v1,
                v2,
                Jet2::constant(0.0),
                Jet2::constant(0.0),
                Jet2::constant(0.0),
                Jet2::constant(1.0),
            ]))
        }
    }

    fn unit_circle(n: usize) -> MaterialLoop {
        MaterialLoop::circle(0.0, Vec3::new(0.0, 0.0, 0.0), 1.0, Vec3::new(0.0, 0.0, 1.0), n)
            .unwrap()
    }

    #[test]
    fn loop_constructors_validate() {
        assert!(MaterialLoop::circle(0.0, Vec3::new(0.0, 0.0, 0.0), 1.0, Vec3::new(0.0, 0.0, 1.0), 10).is_err());
        assert!(MaterialLoop::circle(0.0, Vec3::new(0.0, 0.0, 0.0), 1.0, Vec3::new(0.0, 0.0, 1.0), 17).is_err());
        assert!(MaterialLoop::circle(0.0, Vec3::new(0.0, 0.0, 0.0), -1.0, Vec3::new(0.0, 0.0, 1.0), 32).is_err());
        assert!(MaterialLoop::circle(0.0, Vec3::new(0.0, 0.0, 0.0), 1.0, Vec3::new(0.0, 0.0, 0.0), 32).is_err());
        let lp = unit_circle(64);
        assert_eq!(lp.len(), 64);
        for v in lp.vertices() {
            assert!((v.norm() - 1.0).abs() < 1e-14);
            assert!(v.z.abs() < 1e-14);
        }
    }

    #[test]
    fn rigid_rotation_circulation_is_two_pi() {
        let f = Fixture { which: "rotation" };
        let c = circulation(&f, &unit_circle(512)).unwrap();
        assert!(
            (c.value - 2.0 * std::f64::consts::PI).abs() < 1e-8,
            "got {:.12}",
            c.value
        );
        assert!(c.quadrature_error < 1e-6);
    }

    #[test]
    fn uniform_drift_translates_the_loop_exactly() {
        let f = Fixture { which: "drift" };
        let lp = unit_circle(32);
        let moved = advect(&f, &lp, 1.0, 1e-12).unwrap();
        for (a, b) in lp.vertices().iter().zip(moved.vertices()) {
            assert!((*a + Vec3::new(1.0, 0.0, 0.0) - *b).max_abs() < 1e-10);
        }
        assert!(circulation(&f, &moved).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn rotation_advection_matches_the_closed_form_map() {
        let f = Fixture { which: "rotation" };
        let lp = MaterialLoop::circle(
            0.0,
            Vec3::new(0.5, 0.0, 0.2),
            0.3,
            Vec3::new(0.0, 0.0, 1.0),
            64,
        )
        .unwrap();
        let th = 0.8_f64;
        let moved = advect(&f, &lp, th, 1e-11).unwrap();
        for (a, b) in lp.vertices().iter().zip(moved.vertices()) {
            let exact = Vec3::new(
                a.x * th.cos() - a.y * th.sin(),
                a.x * th.sin() + a.y * th.cos(),
                a.z,
            );
            assert!((exact - *b).max_abs() < 1e-9);
        }
    }

    #[test]
    fn straight_field_lines_trace_exactly() {
        let f = Fixture { which: "drift" };
        let start = Vec3::new(0.3, -0.2, 0.1);
        let line = trace_field_line(&f, 0.0, start, 2.0, 5, 1e-12).unwrap();
        assert_eq!(line.len(), 5);
        assert!((line[4] - start - Vec3::new(0.0, 0.0, 2.0)).max_abs() < 1e-10);
        assert!((line[2] - start - Vec3::new(0.0, 0.0, 1.0)).max_abs() < 1e-10);
    }

    #[test]
    fn field_line_tracing_respects_arclength_on_a_real_family() {
        let f = make_family("G5", &ParamMap::new()).unwrap();
        let line =
            trace_field_line(f.as_ref(), 0.0, Vec3::new(1.0, 0.3, 0.0), 0.3, 7, 1e-10).unwrap();
        for pair in line.windows(2) {
            let step = (pair[1] - pair[0]).norm();
            // Chord length shadows arclength to quadrature accuracy.
            assert!((step - 0.05).abs() < 1e-4, "step {step}");
        }
    }

    #[test]
    fn kelvin_rate_matches_the_acceleration_integral() {
        let f = make_family("G7", &ParamMap::new()).unwrap();
        let lp = MaterialLoop::circle(
            2.0,
            Vec3::new(1.5, 0.0, 0.3),
            0.3,
            Vec3::new(0.0, 0.0, 1.0),
            128,
        )
        .unwrap();
        let rate = circulation_rate(f.as_ref(), &lp, 1e-10).unwrap();
        assert!(
            rate.defect() < 1e-5 * rate.integral.abs().max(1.0),
            "numeric {} vs integral {}",
            rate.numeric,
            rate.integral
        );
    }

    #[test]
    fn conserving_family_keeps_circulation_flat() {
        let f = make_family("G8", &ParamMap::new()).unwrap();
        let lp = MaterialLoop::circle(
            1.0,
            Vec3::new(0.8, 0.4, 0.5),
            0.25,
            Vec3::new(0.2, 0.3, 1.0),
            128,
        )
        .unwrap();
        let before = circulation(f.as_ref(), &lp).unwrap();
        let after = circulation(f.as_ref(), &advect(f.as_ref(), &lp, 1.5, 1e-11).unwrap()).unwrap();
        assert!(
            (after.value - before.value).abs() < 1e-6,
            "{} -> {}",
            before.value,
            after.value
        );
        let rate = circulation_rate(f.as_ref(), &lp, 1e-10).unwrap();
        assert!(rate.integral.abs() < 1e-7, "integral {}", rate.integral);
    }

    #[test]
    fn frozen_in_ratio_stays_constant_along_trajectories() {
        let f = make_family("G1/gamma=2", &ParamMap::new()).unwrap();
        let drift =
            frozen_in_drift(f.as_ref(), 1.0, 2.0, Vec3::new(1.0, 0.5, 0.5), 8, 1e-11).unwrap();
        assert!(drift < 1e-5, "drift {drift:.3e}");
    }

    #[test]
    fn probes_reject_degenerate_input() {
        let f = Fixture { which: "drift" };
        assert!(trace_field_line(&f, 0.0, Vec3::new(0.0, 0.0, 0.0), 1.0, 1, 1e-10).is_err());
        assert!(trace_field_line(&f, 0.0, Vec3::new(0.0, 0.0, 0.0), 0.0, 5, 1e-10).is_err());
        assert!(frozen_in_drift(&f, 1.0, 1.0, Vec3::new(0.0, 0.0, 0.0), 4, 1e-10).is_err());
    }
}
