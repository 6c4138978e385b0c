//! Adaptive explicit Runge-Kutta integration (Dormand-Prince 5(4)) with
//! continuous dense output and event location.
//!
//! The integrator keeps every accepted step together with its quartic
//! interpolation polynomial, so solutions can be sampled anywhere in the
//! integration span at fifth order. Per-step embedded error estimates are
//! accumulated into a running bound used by the self-convergence tests.

use crate::error::{MhdError, Result};

// Butcher tableau of the Dormand-Prince 5(4) pair.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

// Fifth-order solution weights (also the last stage row: first-same-as-last).
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// Embedded error weights (difference between the 5th and 4th order results).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense-output weights.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integration controls.
#[derive(Clone, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step magnitude; chosen automatically when absent.
    pub h_init: Option<f64>,
    /// Cap on the step magnitude.
    pub h_max: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, h_init: None, h_max: None, max_steps: 100_000 }
    }
}

impl OdeOptions {
    pub fn with_tol(rtol: f64, atol: f64) -> Self {
        OdeOptions { rtol, atol, ..Default::default() }
    }
}

/// One accepted step with its dense-output polynomial.
#[derive(Clone, Debug)]
pub struct OdeStep {
    pub t0: f64,
    pub h: f64,
    pub y0: Vec<f64>,
    pub y1: Vec<f64>,
    /// Derivative at the step start (analytic slope for interpolation).
    pub dy0: Vec<f64>,
    /// Derivative at the step end.
    pub dy1: Vec<f64>,
    rcont: [Vec<f64>; 5],
    /// Max-abs embedded local error estimate of this step.
    pub local_error: f64,
    /// Running sum of local error estimates up to and including this step.
    pub accumulated_error: f64,
}

impl OdeStep {
    /// Fifth-order interpolant evaluated at `t` inside the step.
    pub fn interpolate(&self, t: f64) -> Vec<f64> {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let n = self.y0.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            out[i] = self.rcont[0][i]
                + theta
                    * (self.rcont[1][i]
                        + theta1
                            * (self.rcont[2][i]
                                + theta * (self.rcont[3][i] + theta1 * self.rcont[4][i])));
        }
        out
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.h >= 0.0 {
            (self.t0, self.t0 + self.h)
        } else {
            (self.t0 + self.h, self.t0)
        };
        t >= lo - 1e-12 * (1.0 + hi.abs()) && t <= hi + 1e-12 * (1.0 + hi.abs())
    }
}

/// Location reported when the event function crosses zero.
#[derive(Clone, Debug)]
pub struct EventLocation {
    pub t: f64,
    pub y: Vec<f64>,
}

/// Full integration record.
#[derive(Clone, Debug)]
pub struct OdeSolution {
    pub steps: Vec<OdeStep>,
    pub event: Option<EventLocation>,
    pub n_accepted: usize,
    pub n_rejected: usize,
    pub n_rhs: usize,
}

impl OdeSolution {
    pub fn t_start(&self) -> f64 {
        self.steps.first().map_or(f64::NAN, |s| s.t0)
    }

    pub fn t_end(&self) -> f64 {
        if let Some(e) = &self.event {
            e.t
        } else {
            self.steps.last().map_or(f64::NAN, |s| s.t_end())
        }
    }

    pub fn y_end(&self) -> Vec<f64> {
        if let Some(e) = &self.event {
            e.y.clone()
        } else {
            self.steps.last().map_or_else(Vec::new, |s| s.y1.clone())
        }
    }

    /// Total accumulated local-error estimate over all accepted steps.
    pub fn accumulated_error(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.accumulated_error)
    }

    /// Samples the dense output; `t` must lie inside the integration span.
    pub fn sample(&self, t: f64) -> Result<Vec<f64>> {
        let step = self.locate(t)?;
        Ok(step.interpolate(t))
    }

    /// The step whose span covers `t`.
    pub fn locate(&self, t: f64) -> Result<&OdeStep> {
        if self.steps.is_empty() {
            return Err(MhdError::Solver("empty solution".into()));
        }
        let forward = self.steps[0].h >= 0.0;
        // Binary search on step start times.
        let mut lo = 0usize;
        let mut hi = self.steps.len();
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let starts_after = if forward { self.steps[mid].t0 > t } else { self.steps[mid].t0 < t };
            if starts_after {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        for idx in [lo, lo.saturating_sub(1), (lo + 1).min(self.steps.len() - 1)] {
            if self.steps[idx].contains(t) {
                return Ok(&self.steps[idx]);
            }
        }
        Err(MhdError::Solver(format!(
            "sample point t = {t} outside integrated span [{}, {}]",
            self.t_start(),
            self.t_end()
        )))
    }
}

fn error_norm(e: &[f64], y0: &[f64], y1: &[f64], opts: &OdeOptions) -> f64 {
    let mut acc = 0.0;
    for i in 0..e.len() {
        let sc = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
        let q = e[i] / sc;
        acc += q * q;
    }
    (acc / e.len() as f64).sqrt()
}

fn initial_step(
    rhs: &dyn Fn(f64, &[f64], &mut [f64]),
    t0: f64,
    y0: &[f64],
    dy0: &[f64],
    dir: f64,
    opts: &OdeOptions,
) -> f64 {
    // Standard starting-step heuristic based on the scale of y and y'.
    let n = y0.len();
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for i in 0..n {
        let sc = opts.atol + opts.rtol * y0[i].abs();
        d0 += (y0[i] / sc).powi(2);
        d1 += (dy0[i] / sc).powi(2);
    }
    let d0 = (d0 / n as f64).sqrt();
    let d1 = (d1 / n as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let mut y1 = vec![0.0; n];
    for i in 0..n {
        y1[i] = y0[i] + dir * h0 * dy0[i];
    }
    let mut dy1 = vec![0.0; n];
    rhs(t0 + dir * h0, &y1, &mut dy1);
    let mut d2: f64 = 0.0;
    for i in 0..n {
        let sc = opts.atol + opts.rtol * y0[i].abs();
        d2 += ((dy1[i] - dy0[i]) / sc).powi(2);
    }
    let d2 = (d2 / n as f64).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

/// Integrates `dy/dt = rhs(t, y)` from `t0` to `t1` (either direction).
///
/// When `event` is supplied, integration stops at the first sign change of
/// the event function after `t0`, located on the dense output to near
/// machine precision and reported in [`OdeSolution::event`].
pub fn dopri5(
    rhs: &dyn Fn(f64, &[f64], &mut [f64]),
    t0: f64,
    t1: f64,
    y0: &[f64],
    opts: &OdeOptions,
    event: Option<&dyn Fn(f64, &[f64]) -> f64>,
) -> Result<OdeSolution> {
    if !(t1 - t0).is_finite() || t1 == t0 {
        return Err(MhdError::Solver(format!("bad integration span [{t0}, {t1}]")));
    }
    let n = y0.len();
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();

    let mut y = y0.to_vec();
    let mut t = t0;
    let mut k1 = vec![0.0; n];
    rhs(t, &y, &mut k1);
    let mut n_rhs = 1usize;

    let h_max = opts.h_max.unwrap_or(span).abs();
    let mut h = opts
        .h_init
        .map(|h| h.abs())
        .unwrap_or_else(|| initial_step(rhs, t0, &y, &k1, dir, opts))
        .min(h_max)
        .min(span);

    let mut event_prev = event.map(|g| g(t, &y));

    let mut steps: Vec<OdeStep> = Vec::new();
    let mut acc_err = 0.0;
    let mut n_accepted = 0usize;
    let mut n_rejected = 0usize;

    let mut stage = vec![vec![0.0; n]; 7];
    stage[0].copy_from_slice(&k1);

    for _ in 0..opts.max_steps {
        let remaining = (t1 - t).abs();
        if remaining <= 1e-14 * (1.0 + t.abs()) {
            break;
        }
        h = h.min(remaining).min(h_max);
        let hs = dir * h;

        // The six intermediate stages.
        let mut yt = vec![0.0; n];
        let axs: [(&[f64], f64); 5] = [
            (&[A21], C2),
            (&[A31, A32], C3),
            (&[A41, A42, A43], C4),
            (&[A51, A52, A53, A54], C5),
            (&[A61, A62, A63, A64, A65], 1.0),
        ];
        for (s, (row, c)) in axs.iter().enumerate() {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, aij) in row.iter().enumerate() {
                    acc += aij * stage[j][i];
                }
                yt[i] = y[i] + hs * acc;
            }
            let (head, tail) = stage.split_at_mut(s + 1);
            rhs(t + c * hs, &yt, &mut tail[0]);
            let _ = head;
            n_rhs += 1;
        }
        // Fifth-order solution, then the FSAL stage at the step end.
        let mut y1 = vec![0.0; n];
        for i in 0..n {
            y1[i] = y[i]
                + hs * (B1 * stage[0][i]
                    + B3 * stage[2][i]
                    + B4 * stage[3][i]
                    + B5 * stage[4][i]
                    + B6 * stage[5][i]);
        }
        let (head, tail) = stage.split_at_mut(6);
        rhs(t + hs, &y1, &mut tail[0]);
        let _ = head;
        n_rhs += 1;

        let mut e = vec![0.0; n];
        for i in 0..n {
            e[i] = hs
                * (E1 * stage[0][i]
                    + E3 * stage[2][i]
                    + E4 * stage[3][i]
                    + E5 * stage[4][i]
                    + E6 * stage[5][i]
                    + E7 * stage[6][i]);
        }
        let err = error_norm(&e, &y, &y1, opts);

        if err <= 1.0 {
            // Accept: build the dense-output polynomial.
            let dy = |i: usize| y1[i] - y[i];
            let mut rcont = [
                vec![0.0; n],
                vec![0.0; n],
                vec![0.0; n],
                vec![0.0; n],
                vec![0.0; n],
            ];
            for i in 0..n {
                let delta = dy(i);
                rcont[0][i] = y[i];
                rcont[1][i] = delta;
                rcont[2][i] = hs * stage[0][i] - delta;
                rcont[3][i] = delta - hs * stage[6][i] - rcont[2][i];
                rcont[4][i] = hs
                    * (D1 * stage[0][i]
                        + D3 * stage[2][i]
                        + D4 * stage[3][i]
                        + D5 * stage[4][i]
                        + D6 * stage[5][i]
                        + D7 * stage[6][i]);
            }
            let local = e.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            acc_err += local;
            let step = OdeStep {
                t0: t,
                h: hs,
                y0: y.clone(),
                y1: y1.clone(),
                dy0: stage[0].clone(),
                dy1: stage[6].clone(),
                rcont,
                local_error: local,
                accumulated_error: acc_err,
            };

            // Event check across the accepted step.
            if let (Some(g), Some(prev)) = (event, event_prev) {
                let cur = g(t + hs, &y1);
                if prev == 0.0 && n_accepted == 0 {
                    // Starting exactly on the event is not a crossing.
                } else if cur == 0.0 || (prev.signum() != cur.signum() && prev != 0.0) {
                    let loc = locate_event(&step, g, prev)?;
                    let mut sol = OdeSolution {
                        steps,
                        event: None,
                        n_accepted: n_accepted + 1,
                        n_rejected,
                        n_rhs,
                    };
                    sol.steps.push(step);
                    sol.event = Some(loc);
                    return Ok(sol);
                }
                event_prev = Some(cur);
            }

            steps.push(step);
            n_accepted += 1;
            t += hs;
            y = y1;
            stage[0] = stage[6].clone();

            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            n_rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            if h < 1e-14 * (1.0 + t.abs()) {
                return Err(MhdError::Solver(format!(
                    "step size underflow at t = {t} (error norm {err})"
                )));
            }
        }
    }

    let remaining = (t1 - t).abs();
    if remaining > 1e-10 * (1.0 + t1.abs()) {
        return Err(MhdError::Solver(format!(
            "maximum step count {} exhausted at t = {t} before reaching {t1}",
            opts.max_steps
        )));
    }
    Ok(OdeSolution { steps, event: None, n_accepted, n_rejected, n_rhs })
}

/// Bisects the dense output of one step for the event zero crossing.
fn locate_event(
    step: &OdeStep,
    g: &dyn Fn(f64, &[f64]) -> f64,
    g_start: f64,
) -> Result<EventLocation> {
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    let mut g_lo = g_start;
    let eval = |theta: f64| {
        let t = step.t0 + theta * step.h;
        (t, step.interpolate(t))
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (tm, ym) = eval(mid);
        let gm = g(tm, &ym);
        if gm == 0.0 {
            return Ok(EventLocation { t: tm, y: ym });
        }
        if gm.signum() == g_lo.signum() {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
        if (hi - lo) * step.h.abs() < 1e-15 * (1.0 + step.t0.abs()) {
            break;
        }
    }
    let (tm, ym) = eval(0.5 * (lo + hi));
    Ok(EventLocation { t: tm, y: ym })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_rhs(_t: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[0];
    }

    #[test]
    fn exponential_growth_is_accurate() {
        let sol = dopri5(&exp_rhs, 0.0, 2.0, &[1.0], &OdeOptions::default(), None).unwrap();
        let y = sol.y_end();
        assert!((y[0] - 2.0_f64.exp()).abs() < 1e-9);
        assert!(sol.accumulated_error() < 1e-7);
    }

    #[test]
    fn dense_output_is_fifth_order_accurate() {
        let sol = dopri5(&exp_rhs, 0.0, 2.0, &[1.0], &OdeOptions::with_tol(1e-11, 1e-13), None)
            .unwrap();
        let mut t = 0.0;
        while t <= 2.0 {
            let y = sol.sample(t).unwrap();
            assert!(
                (y[0] - t.exp()).abs() < 1e-9 * t.exp(),
                "dense output at {t}: {} vs {}",
                y[0],
                t.exp()
            );
            t += 0.0173;
        }
    }

    #[test]
    fn tightening_tolerance_reduces_error() {
        let coarse = dopri5(&exp_rhs, 0.0, 2.0, &[1.0], &OdeOptions::with_tol(1e-5, 1e-8), None)
            .unwrap();
        let fine = dopri5(&exp_rhs, 0.0, 2.0, &[1.0], &OdeOptions::with_tol(1e-11, 1e-14), None)
            .unwrap();
        let exact = 2.0_f64.exp();
        let e_coarse = (coarse.y_end()[0] - exact).abs();
        let e_fine = (fine.y_end()[0] - exact).abs();
        assert!(e_fine < e_coarse / 100.0);
    }

    #[test]
    fn harmonic_oscillator_conserves_energy() {
        let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let sol = dopri5(&rhs, 0.0, 50.0, &[1.0, 0.0], &OdeOptions::with_tol(1e-11, 1e-13), None)
            .unwrap();
        let y = sol.y_end();
        let energy = y[0] * y[0] + y[1] * y[1];
        assert!((energy - 1.0).abs() < 1e-8);
        assert!((y[0] - 50.0_f64.cos()).abs() < 1e-7);
    }

    #[test]
    fn backward_integration_works() {
        let sol = dopri5(&exp_rhs, 2.0, 0.0, &[2.0_f64.exp()], &OdeOptions::default(), None)
            .unwrap();
        assert!((sol.y_end()[0] - 1.0).abs() < 1e-9);
        let mid = sol.sample(1.0).unwrap();
        assert!((mid[0] - 1.0_f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn event_location_is_sharp() {
        // y' = y from 1: event at y = e exactly at t = 1.
        let sol = dopri5(
            &exp_rhs,
            0.0,
            5.0,
            &[1.0],
            &OdeOptions::default(),
            Some(&|_t, y| y[0] - 1.0_f64.exp()),
        )
        .unwrap();
        let ev = sol.event.expect("event must trigger");
        assert!((ev.t - 1.0).abs() < 1e-10, "event at {}", ev.t);
        assert!((ev.y[0] - 1.0_f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn event_at_start_is_not_a_crossing() {
        let sol = dopri5(
            &exp_rhs,
            0.0,
            1.0,
            &[1.0],
            &OdeOptions::default(),
            Some(&|_t, y| y[0] - 1.0),
        )
        .unwrap();
        assert!(sol.event.is_none());
    }

    #[test]
    fn rejects_degenerate_span() {
        assert!(dopri5(&exp_rhs, 1.0, 1.0, &[1.0], &OdeOptions::default(), None).is_err());
    }
}
