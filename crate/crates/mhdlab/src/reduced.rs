//! Numerical profiles for the families whose shape functions solve
//! one-dimensional ordinary or integro-differential equations, plus
//! residual functionals for the algebraic reductions behind the
//! closed-form sub-cases.
//!
//! Integro-differential equations are made local by carrying their
//! running integrals as extra state, so a standard adaptive embedded
//! Runge-Kutta pair (see [`crate::ode`]) integrates them with rigorous
//! step-error control. The result is captured in a [`ReducedProfile`]:
//! a dense grid of states with their analytic slopes, interpolated
//! between nodes by a cubic Hermite rule. Initial values and lower
//! integration limits are genuine integration constants and stay user
//! parameters throughout.

use crate::error::{MhdError, Result};
use crate::families::{self, SolutionFamily};
use crate::ode::{dopri5, OdeOptions, OdeSolution};
use crate::params::{get, merge_params, ParamMap};
use std::fmt::Write as _;
use std::sync::Arc;

/// Default node budget when densifying an adaptive solution.
const MIN_NODES: usize = 800;

/// Dense record of a solved one-dimensional profile.
///
/// `states` and `slopes` are row-major (node major, component minor).
/// The grid is strictly increasing. Between nodes, values follow the
/// cubic Hermite interpolant through the stored analytic slopes; the
/// reported error estimate combines the integrator's accumulated local
/// error with the measured midpoint interpolation defect, so halving
/// the grid spacing can only move values by less than the estimate.
#[derive(Clone, Debug)]
pub struct ReducedProfile {
    var_name: &'static str,
    names: Vec<&'static str>,
    grid: Vec<f64>,
    states: Vec<f64>,
    slopes: Vec<f64>,
    errors: Vec<f64>,
    dim: usize,
    error_estimate: f64,
    event: Option<f64>,
}

impl ReducedProfile {
    fn from_solution(
        sol: &OdeSolution,
        rhs: &dyn Fn(f64, &[f64], &mut [f64]),
        var_name: &'static str,
        names: Vec<&'static str>,
        min_nodes: usize,
    ) -> Result<ReducedProfile> {
        if sol.steps.is_empty() {
            return Err(MhdError::Solver("no accepted steps to tabulate".into()));
        }
        let dim = names.len();
        let t0 = sol.t_start();
        let t_final = sol.t_end();
        let dir = (t_final - t0).signum();
        let total = (t_final - t0).abs();
        if !(total > 0.0) {
            return Err(MhdError::Solver("degenerate profile span".into()));
        }

        let mut grid: Vec<f64> = Vec::new();
        let mut states: Vec<f64> = Vec::new();
        let mut slopes: Vec<f64> = Vec::new();
        let mut errors: Vec<f64> = Vec::new();
        let mut dy = vec![0.0; dim];
        for step in &sol.steps {
            if (step.t0 - t_final) * dir >= 0.0 {
                break;
            }
            let end = if (step.t_end() - t_final) * dir > 0.0 { t_final } else { step.t_end() };
            let width = (end - step.t0).abs();
            let n_sub = ((min_nodes as f64) * width / total).ceil().max(1.0) as usize;
            for k in 0..n_sub {
                let t = step.t0 + (end - step.t0) * (k as f64) / (n_sub as f64);
                let y = step.interpolate(t);
                rhs(t, &y, &mut dy);
                grid.push(t);
                states.extend_from_slice(&y);
                slopes.extend_from_slice(&dy);
                errors.push(step.accumulated_error);
            }
        }
        // Terminal node: the located event state when one fired, the last
        // step endpoint otherwise.
        let y_final = sol.y_end();
        rhs(t_final, &y_final, &mut dy);
        grid.push(t_final);
        states.extend_from_slice(&y_final);
        slopes.extend_from_slice(&dy);
        errors.push(sol.accumulated_error());

        if grid.len() < 2 {
            return Err(MhdError::Solver("profile needs at least two nodes".into()));
        }
        if dir < 0.0 {
            grid.reverse();
            errors.reverse();
            reverse_rows(&mut states, dim);
            reverse_rows(&mut slopes, dim);
        }

        let mut profile = ReducedProfile {
            var_name,
            names,
            grid,
            states,
            slopes,
            errors,
            dim,
            error_estimate: 0.0,
            event: sol.event.as_ref().map(|e| e.t),
        };

        // Midpoint defect of the Hermite rule against the integrator's
        // own dense output bounds what grid refinement could change.
        let mut probe = 0.0f64;
        for i in 0..profile.grid.len() - 1 {
            let tm = 0.5 * (profile.grid[i] + profile.grid[i + 1]);
            let ours = profile.eval_clamped(tm);
            if let Ok(dense) = sol.sample(tm) {
                for c in 0..dim {
                    probe = probe.max((ours[c] - dense[c]).abs());
                }
            }
        }
        profile.error_estimate = sol.accumulated_error() + probe;
        Ok(profile)
    }

    /// Joins two profiles that share an anchor node (the last node of
    /// `lower` must coincide with the first node of `upper`).
    pub fn merge(lower: ReducedProfile, upper: ReducedProfile) -> Result<ReducedProfile> {
        if lower.dim != upper.dim || lower.names != upper.names {
            return Err(MhdError::Solver("cannot merge profiles of different systems".into()));
        }
        let seam = *lower.grid.last().expect("nonempty");
        let scale = 1.0 + seam.abs();
        if (upper.grid[0] - seam).abs() > 1e-12 * scale {
            return Err(MhdError::Solver(format!(
                "profiles do not adjoin: {} vs {}",
                seam, upper.grid[0]
            )));
        }
        for c in 0..lower.dim {
            let a = lower.states[(lower.grid.len() - 1) * lower.dim + c];
            let b = upper.states[c];
            if (a - b).abs() > 1e-9 * (1.0 + a.abs()) {
                return Err(MhdError::Solver(format!(
                    "profiles disagree at the seam in {}: {} vs {}",
                    lower.names[c], a, b
                )));
            }
        }
        let mut out = lower;
        out.grid.extend_from_slice(&upper.grid[1..]);
        out.states.extend_from_slice(&upper.states[upper.dim..]);
        out.slopes.extend_from_slice(&upper.slopes[upper.dim..]);
        out.errors.extend_from_slice(&upper.errors[1..]);
        out.error_estimate = out.error_estimate.max(upper.error_estimate);
        out.event = out.event.or(upper.event);
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Independent-variable range covered by the profile.
    pub fn span(&self) -> (f64, f64) {
        (self.grid[0], *self.grid.last().expect("nonempty"))
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Combined integration and interpolation error estimate.
    pub fn error_estimate(&self) -> f64 {
        self.error_estimate
    }

    /// Location of a flagged singularity, when integration stopped early.
    pub fn event(&self) -> Option<f64> {
        self.event
    }

    pub fn component_names(&self) -> &[&'static str] {
        &self.names
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = self.span();
        let pad = 1e-12 * (1.0 + hi.abs().max(lo.abs()));
        t >= lo - pad && t <= hi + pad
    }

    /// State row at a grid node.
    pub fn node_state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    /// Analytic slope row at a grid node.
    pub fn node_slope(&self, i: usize) -> &[f64] {
        &self.slopes[i * self.dim..(i + 1) * self.dim]
    }

    /// All state components at `t` (cubic Hermite between nodes).
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        if !self.contains(t) {
            let (lo, hi) = self.span();
            return Err(MhdError::Diagnostic(format!(
                "{} = {t} outside profile span [{lo}, {hi}]",
                self.var_name
            )));
        }
        Ok(self.eval_clamped(t))
    }

    /// Single component with the interpolant's slope at `t`.
    pub fn eval_one(&self, t: f64, c: usize) -> Result<(f64, f64)> {
        if !self.contains(t) {
            let (lo, hi) = self.span();
            return Err(MhdError::Diagnostic(format!(
                "{} = {t} outside profile span [{lo}, {hi}]",
                self.var_name
            )));
        }
        let (i, u, h) = self.bracket(t);
        Ok(self.hermite_one(i, u, h, c))
    }

    fn bracket(&self, t: f64) -> (usize, f64, f64) {
        let n = self.grid.len();
        let i = self
            .grid
            .partition_point(|&g| g <= t)
            .clamp(1, n - 1)
            - 1;
        let h = self.grid[i + 1] - self.grid[i];
        let u = ((t - self.grid[i]) / h).clamp(0.0, 1.0);
        (i, u, h)
    }

    fn hermite_one(&self, i: usize, u: f64, h: f64, c: usize) -> (f64, f64) {
        let ya = self.states[i * self.dim + c];
        let yb = self.states[(i + 1) * self.dim + c];
        let ma = self.slopes[i * self.dim + c];
        let mb = self.slopes[(i + 1) * self.dim + c];
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let value = h00 * ya + h10 * h * ma + h01 * yb + h11 * h * mb;
        let d00 = 6.0 * u2 - 6.0 * u;
        let d10 = 3.0 * u2 - 4.0 * u + 1.0;
        let d01 = -6.0 * u2 + 6.0 * u;
        let d11 = 3.0 * u2 - 2.0 * u;
        let slope = (d00 * ya + d01 * yb) / h + d10 * ma + d11 * mb;
        (value, slope)
    }

    /// Interpolation without the span check, for call sites that have
    /// already validated the point (clamps to the nearest node pair).
    pub(crate) fn eval_clamped(&self, t: f64) -> Vec<f64> {
        let (i, u, h) = self.bracket(t);
        (0..self.dim).map(|c| self.hermite_one(i, u, h, c).0).collect()
    }

    /// CSV dump: grid, states, slopes, running error estimates.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(self.var_name);
        for n in &self.names {
            let _ = write!(out, ",{n}");
        }
        for n in &self.names {
            let _ = write!(out, ",d{n}");
        }
        out.push_str(",acc_error\n");
        for i in 0..self.grid.len() {
            let _ = write!(out, "{:.16e}", self.grid[i]);
            for c in 0..self.dim {
                let _ = write!(out, ",{:.16e}", self.states[i * self.dim + c]);
            }
            for c in 0..self.dim {
                let _ = write!(out, ",{:.16e}", self.slopes[i * self.dim + c]);
            }
            let _ = write!(out, ",{:.3e}\n", self.errors[i]);
        }
        out
    }
}

fn reverse_rows(data: &mut [f64], dim: usize) {
    let n = data.len() / dim;
    for i in 0..n / 2 {
        for c in 0..dim {
            data.swap(i * dim + c, (n - 1 - i) * dim + c);
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1e-2) {
        return Err(MhdError::Solver(format!("tolerance {tol} outside (0, 1e-2)")));
    }
    Ok(())
}

fn options_for(tol: f64) -> OdeOptions {
    OdeOptions::with_tol(tol, tol * 1e-2)
}

/// Parameters of the cylindrical pitch equation
/// `r Y' = alpha2 (beta_o r^2 cos^2 Y + 1)`.
#[derive(Clone, Copy, Debug)]
pub struct CylPitchParams {
    pub alpha2: f64,
    /// Stress ratio `(2 A_o + Z_o^2) / X_o^2`.
    pub beta_o: f64,
}

/// Integrates the cylindrical pitch angle `Y(r)` jointly with the twist
/// `theta(r)` (slope `tan Y / r`, anchored to zero at `r_span.0`).
///
/// Integration stops with a flagged event when `Y` comes within about
/// 1e-6 of an odd multiple of pi/2, where the twist integrand blows up.
pub fn solve_g5(
    params: &CylPitchParams,
    r_span: (f64, f64),
    y0: f64,
    tol: f64,
) -> Result<ReducedProfile> {
    solve_g5_nodes(params, r_span, y0, tol, MIN_NODES)
}

fn solve_g5_nodes(
    params: &CylPitchParams,
    r_span: (f64, f64),
    y0: f64,
    tol: f64,
    min_nodes: usize,
) -> Result<ReducedProfile> {
    check_tol(tol)?;
    if !(r_span.0 > 0.0 && r_span.1 > 0.0) {
        return Err(MhdError::Solver(format!(
            "radial span [{}, {}] must stay positive",
            r_span.0, r_span.1
        )));
    }
    if y0.cos().abs() <= 1e-6 {
        return Err(MhdError::Solver(
            "initial pitch is within 1e-6 of an odd multiple of pi/2".into(),
        ));
    }
    let p = *params;
    let rhs = move |r: f64, y: &[f64], dy: &mut [f64]| {
        let c = y[0].cos();
        dy[0] = p.alpha2 * (p.beta_o * r * r * c * c + 1.0) / r;
        dy[1] = y[0].tan() / r;
    };
    let event = |_r: f64, y: &[f64]| {
        let c = y[0].cos();
        c * c - 1e-12
    };
    let sol = dopri5(&rhs, r_span.0, r_span.1, &[y0, 0.0], &options_for(tol), Some(&event))?;
    ReducedProfile::from_solution(&sol, &rhs, "r", vec!["Y", "theta"], min_nodes)
}

/// Parameters of the helical pitch equation
/// `s Y' = (alpha2 beta_o D^2 e^{2 theta1} + alpha1 + alpha2) / (1 + alpha1^2)`
/// with `D = cos Y - alpha1 sin Y`.
#[derive(Clone, Copy, Debug)]
pub struct HelicalPitchParams {
    pub alpha1: f64,
    pub alpha2: f64,
    /// Stress ratio `(2 A_o + Z_o^2) / X_o^2`.
    pub beta_o: f64,
}

/// Integrates the helical pitch angle `Y(s)` with its two spiral twists
/// `theta1`, `theta2` carried as state, which makes the exponential
/// memory term of the pitch equation local. Both twists are anchored to
/// zero at `s_span.0`.
///
/// Integration stops with a flagged event when `cos Y - alpha1 sin Y`
/// comes within about 1e-6 of zero.
pub fn solve_g6(
    params: &HelicalPitchParams,
    s_span: (f64, f64),
    y0: f64,
    tol: f64,
) -> Result<ReducedProfile> {
    solve_g6_nodes(params, s_span, y0, tol, MIN_NODES)
}

fn solve_g6_nodes(
    params: &HelicalPitchParams,
    s_span: (f64, f64),
    y0: f64,
    tol: f64,
    min_nodes: usize,
) -> Result<ReducedProfile> {
    check_tol(tol)?;
    if !(s_span.0 > 0.0 && s_span.1 > 0.0) {
        return Err(MhdError::Solver(format!(
            "spiral span [{}, {}] must stay positive",
            s_span.0, s_span.1
        )));
    }
    let a1 = params.alpha1;
    if (y0.cos() - a1 * y0.sin()).abs() <= 1e-6 {
        return Err(MhdError::Solver(
            "initial pitch is within 1e-6 of the singular direction arctan(1/alpha1)".into(),
        ));
    }
    let b2 = 1.0 + a1 * a1;
    let k = params.alpha2 * params.beta_o / b2;
    let c = (a1 + params.alpha2) / b2;
    let rhs = move |s: f64, y: &[f64], dy: &mut [f64]| {
        let (sin_y, cos_y) = y[0].sin_cos();
        let d = cos_y - a1 * sin_y;
        dy[0] = (k * d * d * (2.0 * y[1]).exp() + c) / s;
        dy[1] = cos_y / (d * s);
        dy[2] = sin_y / (d * s);
    };
    let event = move |_s: f64, y: &[f64]| {
        let d = y[0].cos() - a1 * y[0].sin();
        d * d - 1e-12
    };
    let sol = dopri5(
        &rhs,
        s_span.0,
        s_span.1,
        &[y0, 0.0, 0.0],
        &options_for(tol),
        Some(&event),
    )?;
    ReducedProfile::from_solution(&sol, &rhs, "s", vec!["Y", "theta1", "theta2"], min_nodes)
}

/// On-axis balance of the line-flow reduction. The shape `W` and the
/// running integral `F = int ds / W` satisfy
///
/// ```text
/// W^3 W' - W^3 + W^2/alpha1
///   - pressure_ratio (gamma W' + 2 (gamma - alpha2/alpha1)) W^{2-gamma} e^{2(2-gamma)F}
///   - field_ratio (W' + (1-alpha2)/alpha1) e^{(4-2/alpha1)F} = 0 .
/// ```
///
/// `W'` enters linearly, so the slope isolates algebraically; the
/// denominator of that isolation is exposed for event detection.
#[derive(Clone, Copy, Debug)]
pub struct LineReduction {
    pub gamma: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Pressure-to-density scale ratio multiplying the thermal term.
    pub pressure_ratio: f64,
    /// Squared-field-to-density scale ratio multiplying the tension term.
    pub field_ratio: f64,
}

impl LineReduction {
    fn exponentials(&self, f: f64) -> (f64, f64) {
        (
            (2.0 * (2.0 - self.gamma) * f).exp(),
            ((4.0 - 2.0 / self.alpha1) * f).exp(),
        )
    }

    /// Residual of the balance at state `(W, W', F)`.
    pub fn residual(&self, w: f64, w_slope: f64, f: f64) -> f64 {
        let (ep, ex) = self.exponentials(f);
        w.powi(3) * w_slope - w.powi(3) + w * w / self.alpha1
            - self.pressure_ratio
                * (self.gamma * w_slope + 2.0 * (self.gamma - self.alpha2 / self.alpha1))
                * w.powf(2.0 - self.gamma)
                * ep
            - self.field_ratio * (w_slope + (1.0 - self.alpha2) / self.alpha1) * ex
    }

    /// Coefficient of `W'` after isolation; a zero crossing is a genuine
    /// singularity of the reduced equation.
    pub fn slope_denominator(&self, w: f64, f: f64) -> f64 {
        let (ep, ex) = self.exponentials(f);
        w.powi(3)
            - self.gamma * self.pressure_ratio * w.powf(2.0 - self.gamma) * ep
            - self.field_ratio * ex
    }

    /// The isolated slope `W'(W, F)`.
    pub fn slope_from_state(&self, w: f64, f: f64) -> f64 {
        let (ep, ex) = self.exponentials(f);
        let num = w.powi(3) - w * w / self.alpha1
            + 2.0 * (self.gamma - self.alpha2 / self.alpha1)
                * self.pressure_ratio
                * w.powf(2.0 - self.gamma)
                * ep
            + (1.0 - self.alpha2) / self.alpha1 * self.field_ratio * ex;
        num / self.slope_denominator(w, f)
    }
}

/// Inputs for the general line-flow shape integration.
#[derive(Clone, Copy, Debug)]
pub struct LineShapeParams {
    pub gamma: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub pressure_ratio: f64,
    pub field_ratio: f64,
    /// Integration constant of `F` at the start of the span.
    pub f0: f64,
}

impl LineShapeParams {
    pub fn reduction(&self) -> LineReduction {
        LineReduction {
            gamma: self.gamma,
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            pressure_ratio: self.pressure_ratio,
            field_ratio: self.field_ratio,
        }
    }
}

/// Integrates the general line-flow shape `W(s)` with its auxiliary
/// integral `F(s)` carried as state. Stops with a flagged event when the
/// slope denominator vanishes or `W` reaches zero.
pub fn solve_g3_general(
    params: &LineShapeParams,
    s_span: (f64, f64),
    w0: f64,
    tol: f64,
) -> Result<ReducedProfile> {
    solve_g3_nodes(params, s_span, w0, tol, MIN_NODES)
}

fn solve_g3_nodes(
    params: &LineShapeParams,
    s_span: (f64, f64),
    w0: f64,
    tol: f64,
    min_nodes: usize,
) -> Result<ReducedProfile> {
    check_tol(tol)?;
    if params.alpha1 == 0.0 {
        return Err(MhdError::Solver("alpha1 must be nonzero".into()));
    }
    if !(w0 > 0.0) {
        return Err(MhdError::Solver(format!("initial shape W0 = {w0} must be positive")));
    }
    let red = params.reduction();
    let den0 = red.slope_denominator(w0, params.f0);
    if den0.abs() < 1e-12 * (1.0 + w0.powi(3).abs()) {
        return Err(MhdError::Solver(
            "slope coefficient vanishes at the initial point".into(),
        ));
    }
    let sgn = den0.signum();
    let rhs = move |_s: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = red.slope_from_state(y[0], y[1]);
        dy[1] = 1.0 / y[0];
    };
    let event = move |_s: f64, y: &[f64]| (sgn * red.slope_denominator(y[0], y[1])).min(y[0]);
    let sol = dopri5(
        &rhs,
        s_span.0,
        s_span.1,
        &[w0, params.f0],
        &options_for(tol),
        Some(&event),
    )?;
    ReducedProfile::from_solution(&sol, &rhs, "s", vec!["W", "F"], min_nodes)
}

/// Axial balance of the expanding-flow reduction. The shape `W` and the
/// running integrals `I1 = int dz / W`, `I2 = int dz / (W - pinch)`
/// satisfy
///
/// ```text
/// W W' - W
///   + pressure_ratio W^{-gamma} (2(2-gamma) - gamma W') e^{2(2-gamma) I1}
///   - shear_ratio W (W' - 1) e^{2 I2} / (W - pinch)^3 = 0 .
/// ```
#[derive(Clone, Copy, Debug)]
pub struct AxialReduction {
    pub gamma: f64,
    pub pressure_ratio: f64,
    /// Transverse-field-to-density scale ratio.
    pub shear_ratio: f64,
    /// Axial-field offset `Z_o^2` over the density scale; `W` crossing it
    /// is a resonance of the reduced equation.
    pub pinch: f64,
}

impl AxialReduction {
    fn terms(&self, w: f64, i1: f64, i2: f64) -> (f64, f64) {
        let e1 = (2.0 * (2.0 - self.gamma) * i1).exp();
        let e2 = (2.0 * i2).exp();
        let sing = (w - self.pinch).powi(3);
        (
            self.pressure_ratio * w.powf(-self.gamma) * e1,
            self.shear_ratio * w * e2 / sing,
        )
    }

    /// Residual of the balance at state `(W, W', I1, I2)`.
    pub fn residual(&self, w: f64, w_slope: f64, i1: f64, i2: f64) -> f64 {
        let (thermal, tension) = self.terms(w, i1, i2);
        w * w_slope - w + thermal * (2.0 * (2.0 - self.gamma) - self.gamma * w_slope)
            - tension * (w_slope - 1.0)
    }

    /// Coefficient of `W'` after isolation.
    pub fn slope_denominator(&self, w: f64, i1: f64, i2: f64) -> f64 {
        let (thermal, tension) = self.terms(w, i1, i2);
        w - self.gamma * thermal - tension
    }

    /// The isolated slope `W'(W, I1, I2)`.
    pub fn slope_from_state(&self, w: f64, i1: f64, i2: f64) -> f64 {
        let (thermal, tension) = self.terms(w, i1, i2);
        (w - 2.0 * (2.0 - self.gamma) * thermal - tension)
            / self.slope_denominator(w, i1, i2)
    }
}

/// Inputs for the general expanding-flow shape integration.
#[derive(Clone, Copy, Debug)]
pub struct AxialShapeParams {
    pub gamma: f64,
    pub pressure_ratio: f64,
    pub shear_ratio: f64,
    pub pinch: f64,
    /// Integration constants of the two auxiliary integrals at the start
    /// of the span.
    pub i1_0: f64,
    pub i2_0: f64,
}

impl AxialShapeParams {
    pub fn reduction(&self) -> AxialReduction {
        AxialReduction {
            gamma: self.gamma,
            pressure_ratio: self.pressure_ratio,
            shear_ratio: self.shear_ratio,
            pinch: self.pinch,
        }
    }
}

/// Integrates the general expanding-flow shape `W(z)` with both
/// auxiliary integrals carried as state. Stops with a flagged event when
/// the slope denominator vanishes, `W` approaches the pinch offset
/// (within 1e-9), or `W` reaches zero.
pub fn solve_g10_general(
    params: &AxialShapeParams,
    z_span: (f64, f64),
    w0: f64,
    tol: f64,
) -> Result<ReducedProfile> {
    solve_g10_nodes(params, z_span, w0, tol, MIN_NODES)
}

fn solve_g10_nodes(
    params: &AxialShapeParams,
    z_span: (f64, f64),
    w0: f64,
    tol: f64,
    min_nodes: usize,
) -> Result<ReducedProfile> {
    check_tol(tol)?;
    if !(w0 > 0.0) {
        return Err(MhdError::Solver(format!("initial shape W0 = {w0} must be positive")));
    }
    if (w0 - params.pinch).abs() <= 1e-9 {
        return Err(MhdError::Solver(
            "initial shape sits on the pinch resonance".into(),
        ));
    }
    let red = params.reduction();
    let den0 = red.slope_denominator(w0, params.i1_0, params.i2_0);
    if den0.abs() < 1e-12 * (1.0 + w0.abs()) {
        return Err(MhdError::Solver(
            "slope coefficient vanishes at the initial point".into(),
        ));
    }
    let sgn_den = den0.signum();
    let sgn_pinch = (w0 - params.pinch).signum();
    let pinch = params.pinch;
    let rhs = move |_z: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = red.slope_from_state(y[0], y[1], y[2]);
        dy[1] = 1.0 / y[0];
        dy[2] = 1.0 / (y[0] - pinch);
    };
    let event = move |_z: f64, y: &[f64]| {
        (sgn_den * red.slope_denominator(y[0], y[1], y[2]))
            .min(sgn_pinch * (y[0] - pinch) - 1e-9)
            .min(y[0])
    };
    let sol = dopri5(
        &rhs,
        z_span.0,
        z_span.1,
        &[w0, params.i1_0, params.i2_0],
        &options_for(tol),
        Some(&event),
    )?;
    ReducedProfile::from_solution(&sol, &rhs, "z", vec!["W", "I1", "I2"], min_nodes)
}

/// Builds a full spacetime field from a solved profile. Only the two
/// profile-backed families accept one; every other id is closed-form.
pub fn assemble_field(
    profile: Arc<ReducedProfile>,
    family_id: &str,
    params: &ParamMap,
) -> Result<SolutionFamily> {
    match family_id {
        "G5" => families::g5::from_profile(profile, params),
        "G6" => families::g6::from_profile(profile, params),
        other if families::family_ids().contains(&other) => Err(MhdError::Parse(format!(
            "family {other} is closed-form; profile assembly applies to G5 and G6"
        ))),
        other => Err(MhdError::UnknownFamily(other.to_string())),
    }
}

/// Linear shape `W(s) = c1 s + c2` with its exact running integrals,
/// used to check the polynomial sub-cases against their reduced
/// equations without any numerics.
#[derive(Clone, Copy, Debug)]
pub struct LinearProfile {
    pub c1: f64,
    pub c2: f64,
}

impl LinearProfile {
    pub fn value(&self, s: f64) -> f64 {
        self.c1 * s + self.c2
    }

    pub fn slope(&self) -> f64 {
        self.c1
    }

    /// Running integral of `1/W`, with the constant fixed so it vanishes
    /// where `W = 1`.
    pub fn log_integral(&self, s: f64) -> f64 {
        self.value(s).ln() / self.c1
    }

    /// Running integral of `1/(W - shift)`.
    pub fn shifted_log_integral(&self, s: f64, shift: f64) -> f64 {
        (self.value(s) - shift).ln() / self.c1
    }
}

/// Reduction inputs matching a line-flow sub-case at the given
/// parameters (user values are merged over the family defaults). The
/// returned linear profile is the sub-case's shape ansatz.
pub fn g3_case_inputs(id: &str, params: &ParamMap) -> Result<(LineReduction, LinearProfile)> {
    let merged = merge_params(id, &families::default_params(id)?, params)?;
    let g = |k: &str| get(&merged, k);
    let (gamma, alpha1, alpha2, c1, pr, sr) = match id {
        "G3/case1" => {
            // The balance keeps the display coefficient for the pressure
            // scale; the family itself applies a field-energy correction
            // on top of it.
            let a1 = g("alpha1");
            (
                4.0 / 3.0,
                a1,
                a1 + 1.0,
                1.0,
                1.0 / (2.0 * (a1 - 1.0)),
                g("X_o").powi(2) / g("R_o"),
            )
        }
        "G3/case2" => {
            let a2 = g("alpha2");
            (2.0 * a2 / 3.0, 1.0, a2, 1.0, g("A_o") / g("R_o"), 1.0 / (2.0 - a2))
        }
        "G3/case3" => {
            let a2 = g("alpha2");
            let rho0 = (2.0 - a2) * (2.0 * g("A_o") + g("X_o").powi(2));
            (4.0 / 3.0, 1.0, a2, 1.0, g("A_o") / rho0, g("X_o").powi(2) / rho0)
        }
        "G3/case4" => {
            let (a1, a2) = (g("alpha1"), g("alpha2"));
            (
                (2.0 * a1 + 1.0) / (4.0 * a1 - 1.0),
                a1,
                a2,
                (2.0 * a1 - 1.0) / a1,
                (1.0 - a1) / (2.0 * (a2 - a1) - 1.0),
                1.0 / (2.0 * a1 - a2),
            )
        }
        "G3/case5" => {
            let (a1, a2) = (g("alpha1"), g("alpha2"));
            (
                6.0 * a1 / (5.0 * a1 - 1.0),
                a1,
                a2,
                (4.0 * a1 - 2.0) / (3.0 * a1),
                1.0 / (2.0 * (2.0 * a1 - a2)),
                (a1 - 2.0) / (4.0 * a1 - 3.0 * a2 + 1.0),
            )
        }
        other => return Err(MhdError::UnknownFamily(other.to_string())),
    };
    Ok((
        LineReduction { gamma, alpha1, alpha2, pressure_ratio: pr, field_ratio: sr },
        LinearProfile { c1, c2: g("C2") },
    ))
}

/// Reduction inputs matching an expanding-flow sub-case at the given
/// parameters.
pub fn g10_case_inputs(id: &str, params: &ParamMap) -> Result<(AxialReduction, LinearProfile)> {
    let merged = merge_params(id, &families::default_params(id)?, params)?;
    let g = |k: &str| get(&merged, k);
    let transverse = g("X_o").powi(2) + g("Y_o").powi(2);
    match id {
        "G10/case1" => {
            let r_o = g("R_o");
            Ok((
                AxialReduction {
                    gamma: 4.0 / 3.0,
                    pressure_ratio: g("A_o") / r_o,
                    shear_ratio: transverse / r_o,
                    pinch: g("Z_o").powi(2) / r_o,
                },
                LinearProfile { c1: 1.0, c2: g("C2") },
            ))
        }
        "G10/case2" => {
            let rho0 = 2.0 * g("A_o") + transverse;
            Ok((
                AxialReduction {
                    gamma: 1.25,
                    pressure_ratio: g("A_o") / rho0,
                    shear_ratio: transverse / rho0,
                    pinch: g("Z_o").powi(2) / rho0,
                },
                LinearProfile { c1: 2.0 / 3.0, c2: g("C2") },
            ))
        }
        other => Err(MhdError::UnknownFamily(other.to_string())),
    }
}

/// The overdetermined reduced system behind the tilted-wave family,
/// evaluated on its single consistent closed branch (linear shape of
/// slope -1/2, exponent 3). Exposed as residual functionals because the
/// general system has no known solution.
#[derive(Clone, Copy, Debug)]
pub struct TiltedWave {
    pub alpha: f64,
    pub beta: f64,
    pub c2: f64,
    pub c3: f64,
    pub y_o: f64,
    pub z_o: f64,
}

impl TiltedWave {
    /// Transverse stress scale `Y_o^2 + (1 + beta^2) Z_o^2`.
    pub fn stress_scale(&self) -> f64 {
        let b2 = 1.0 + self.beta * self.beta;
        self.y_o * self.y_o + b2 * self.z_o * self.z_o
    }

    /// Similarity coordinate of the closed branch.
    pub fn similarity(&self, s: f64) -> f64 {
        self.c2 - 0.5 * s
    }

    /// Upper end of the admissible range (positivity of the similarity
    /// coordinate).
    pub fn max_s(&self) -> f64 {
        2.0 * self.c2
    }

    fn speed_slopes(&self, s: f64) -> (f64, f64) {
        let b2 = 1.0 + self.beta * self.beta;
        let ratio = -0.5 / self.similarity(s);
        (
            2.0 * self.beta / b2 * ratio + 0.5 / b2,
            2.0 / b2 * ratio - 0.5 * self.beta / b2,
        )
    }

    /// Defect of the algebraic closure tying the shape to the two speed
    /// profiles; identically zero on the closed branch.
    pub fn closure_residual(&self, s: f64) -> f64 {
        let b2 = 1.0 + self.beta * self.beta;
        let xi = self.similarity(s);
        let lx = xi.ln();
        let cu = (self.c2 + self.beta * (self.c3 - 1.0)) / b2;
        let cw = (self.c3 + self.beta * (self.beta - self.c2)) / b2;
        let u = 2.0 * self.beta / b2 * lx + s / (2.0 * b2) + cu;
        let w = 2.0 / b2 * lx - self.beta * s / (2.0 * b2) + cw;
        u - self.beta * w - s + self.beta - xi
    }

    /// Shear constraint `beta U' + W' + 1/f`; zero on the closed branch.
    pub fn shear_residual(&self, s: f64) -> f64 {
        let (u_slope, w_slope) = self.speed_slopes(s);
        self.beta * u_slope + w_slope + 1.0 / self.similarity(s)
    }

    /// The same constraint with the constant closing term instead of the
    /// reciprocal one, as displayed at the source; evaluates to
    /// `1 - 1/f`, which vanishes only at the isolated shape value
    /// `f = 1`, never identically along the branch.
    pub fn shear_residual_printed(&self, s: f64) -> f64 {
        let (u_slope, w_slope) = self.speed_slopes(s);
        self.beta * u_slope + w_slope + 1.0
    }

    /// Momentum balance of the shape profile; zero on the closed branch.
    pub fn balance_residual(&self, s: f64) -> f64 {
        let b2 = 1.0 + self.beta * self.beta;
        let k = self.stress_scale();
        let r_o = -b2 * k * (1.0 + 2.0 * self.alpha) / (2.0 * self.beta);
        let a_o = r_o / (b2 * (3.0 + 4.0 * self.alpha));
        let gamma = 3.0;
        let f = self.similarity(s);
        let fp = -0.5;
        let i = -2.0 * f.ln();
        f.powi(3) * fp + f.powi(3) - self.beta * f * f
            - b2 * (a_o / r_o)
                * (gamma * fp + gamma + 2.0 * self.alpha)
                * f.powf(2.0 - gamma)
                * ((1.0 - gamma) * i).exp()
            - b2 * k / r_o * (fp + 1.0 + self.alpha) * (-i).exp()
    }
}

/// Tilted-wave reduction inputs at the given parameters.
pub fn g9_inputs(params: &ParamMap) -> Result<TiltedWave> {
    let merged = merge_params("G9", &families::default_params("G9")?, params)?;
    Ok(TiltedWave {
        alpha: get(&merged, "alpha"),
        beta: get(&merged, "beta"),
        c2: get(&merged, "C2"),
        c3: get(&merged, "C3"),
        y_o: get(&merged, "Y_o"),
        z_o: get(&merged, "Z_o"),
    })
}
