//! Truncated Taylor jets in the four spacetime variables `(t, x, y, z)`.
//!
//! [`Jet2`] carries a value, its spacetime gradient, and its symmetric
//! Hessian, propagated exactly through arithmetic and elementary functions.
//! Every solution family evaluates into jets, so PDE residuals never touch
//! finite differences. [`Jet1`] is the first-order analogue, used for
//! quantities that are themselves derivatives (current density, vorticity).

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Index of `t` in gradient slots.
pub const T: usize = 0;
/// Index of `x` in gradient slots.
pub const X: usize = 1;
/// Index of `y` in gradient slots.
pub const Y: usize = 2;
/// Index of `z` in gradient slots.
pub const Z: usize = 3;

fn outer_sym(a: &[f64; 4], b: &[f64; 4]) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = a[i] * b[j] + a[j] * b[i];
        }
    }
    m
}

/// Order-2 jet: value, gradient, and Hessian with respect to `(t, x, y, z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub g: [f64; 4],
    pub h: [[f64; 4]; 4],
}

impl Jet2 {
    pub const fn constant(c: f64) -> Self {
        Jet2 { v: c, g: [0.0; 4], h: [[0.0; 4]; 4] }
    }

    /// Seeds the jet of coordinate `axis` at value `v`.
    pub fn var(v: f64, axis: usize) -> Self {
        let mut g = [0.0; 4];
        g[axis] = 1.0;
        Jet2 { v, g, h: [[0.0; 4]; 4] }
    }

    /// Seeds the four coordinate jets at a spacetime point.
    pub fn vars(t: f64, x: f64, y: f64, z: f64) -> [Jet2; 4] {
        [Jet2::var(t, T), Jet2::var(x, X), Jet2::var(y, Y), Jet2::var(z, Z)]
    }

    /// Applies the univariate chain rule given `f(v)`, `f'(v)`, `f''(v)`.
    pub fn lift1(self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut h = [[0.0; 4]; 4];
        for (i, row) in h.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = f1 * self.h[i][j] + f2 * self.g[i] * self.g[j];
            }
        }
        Jet2 { v: f0, g: self.g.map(|gi| f1 * gi), h }
    }

    /// Applies the bivariate chain rule to `f(self, w)` given the value and
    /// the partial derivatives of `f` at `(self.v, w.v)`.
    #[allow(clippy::too_many_arguments)]
    pub fn lift2(self, w: Jet2, f0: f64, fu: f64, fw: f64, fuu: f64, fuw: f64, fww: f64) -> Self {
        let mut g = [0.0; 4];
        for i in 0..4 {
            g[i] = fu * self.g[i] + fw * w.g[i];
        }
        let mut h = [[0.0; 4]; 4];
        for (i, row) in h.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = fu * self.h[i][j]
                    + fw * w.h[i][j]
                    + fuu * self.g[i] * self.g[j]
                    + fww * w.g[i] * w.g[j]
                    + fuw * (self.g[i] * w.g[j] + self.g[j] * w.g[i]);
            }
        }
        Jet2 { v: f0, g, h }
    }

    /// Jet of the partial derivative along `axis`, one order lower.
    pub fn partial_jet(self, axis: usize) -> Jet1 {
        Jet1 { v: self.g[axis], g: self.h[axis] }
    }

    /// Largest absolute entry across value, gradient, and Hessian.
    pub fn max_abs(self) -> f64 {
        let mut m = self.v.abs();
        for gi in self.g {
            m = m.max(gi.abs());
        }
        for row in self.h {
            for e in row {
                m = m.max(e.abs());
            }
        }
        m
    }

    pub fn is_finite(self) -> bool {
        self.v.is_finite()
            && self.g.iter().all(|g| g.is_finite())
            && self.h.iter().all(|r| r.iter().all(|e| e.is_finite()))
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        let mut out = self;
        out.v += o.v;
        for i in 0..4 {
            out.g[i] += o.g[i];
            for j in 0..4 {
                out.h[i][j] += o.h[i][j];
            }
        }
        out
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        self + (-o)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 {
            v: -self.v,
            g: self.g.map(|x| -x),
            h: self.h.map(|r| r.map(|x| -x)),
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        let cross = outer_sym(&self.g, &o.g);
        let mut h = [[0.0; 4]; 4];
        let mut g = [0.0; 4];
        for i in 0..4 {
            g[i] = self.v * o.g[i] + o.v * self.g[i];
            for j in 0..4 {
                h[i][j] = self.v * o.h[i][j] + o.v * self.h[i][j] + cross[i][j];
            }
        }
        Jet2 { v: self.v * o.v, g, h }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        let w = o.v;
        self * o.lift1(1.0 / w, -1.0 / (w * w), 2.0 / (w * w * w))
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, c: f64) -> Jet2 {
        let mut out = self;
        out.v += c;
        out
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(self, c: f64) -> Jet2 {
        self + (-c)
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, c: f64) -> Jet2 {
        Jet2 {
            v: self.v * c,
            g: self.g.map(|x| x * c),
            h: self.h.map(|r| r.map(|x| x * c)),
        }
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, j: Jet2) -> Jet2 {
        j * self
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    fn add(self, j: Jet2) -> Jet2 {
        j + self
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    fn sub(self, j: Jet2) -> Jet2 {
        -j + self
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    fn div(self, c: f64) -> Jet2 {
        self * (1.0 / c)
    }
}

impl Div<Jet2> for f64 {
    type Output = Jet2;
    fn div(self, j: Jet2) -> Jet2 {
        let w = j.v;
        j.lift1(self / w, -self / (w * w), 2.0 * self / (w * w * w))
    }
}

/// Order-1 jet: value and spacetime gradient.
///
/// Produced when differentiating [`Jet2`] data once, e.g. the jet of one
/// vorticity component. Supports enough arithmetic to assemble transport
/// equations for such derived quantities.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet1 {
    pub v: f64,
    pub g: [f64; 4],
}

impl Jet1 {
    pub const fn constant(c: f64) -> Self {
        Jet1 { v: c, g: [0.0; 4] }
    }

    pub fn lift1(self, f0: f64, f1: f64) -> Self {
        Jet1 { v: f0, g: self.g.map(|gi| f1 * gi) }
    }

    pub fn max_abs(self) -> f64 {
        let mut m = self.v.abs();
        for gi in self.g {
            m = m.max(gi.abs());
        }
        m
    }
}

impl From<Jet2> for Jet1 {
    fn from(j: Jet2) -> Jet1 {
        Jet1 { v: j.v, g: j.g }
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(self, o: Jet1) -> Jet1 {
        let mut out = self;
        out.v += o.v;
        for i in 0..4 {
            out.g[i] += o.g[i];
        }
        out
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(self, o: Jet1) -> Jet1 {
        self + (-o)
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        Jet1 { v: -self.v, g: self.g.map(|x| -x) }
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, o: Jet1) -> Jet1 {
        let mut g = [0.0; 4];
        for i in 0..4 {
            g[i] = self.v * o.g[i] + o.v * self.g[i];
        }
        Jet1 { v: self.v * o.v, g }
    }
}

impl Div for Jet1 {
    type Output = Jet1;
    fn div(self, o: Jet1) -> Jet1 {
        self * o.lift1(1.0 / o.v, -1.0 / (o.v * o.v))
    }
}

impl Mul<f64> for Jet1 {
    type Output = Jet1;
    fn mul(self, c: f64) -> Jet1 {
        Jet1 { v: self.v * c, g: self.g.map(|x| x * c) }
    }
}

impl Mul<Jet1> for f64 {
    type Output = Jet1;
    fn mul(self, j: Jet1) -> Jet1 {
        j * self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(t: f64, x: f64, y: f64, z: f64) -> f64 {
        (x * y).sin() * (0.3 * t).exp() + z * z * x - 2.0 * t / (1.0 + y * y)
    }

    fn f_jet(t: f64, x: f64, y: f64, z: f64) -> Jet2 {
        let [jt, jx, jy, jz] = Jet2::vars(t, x, y, z);
        let sin_arg = jx * jy;
        let s = sin_arg.lift1(sin_arg.v.sin(), sin_arg.v.cos(), -sin_arg.v.sin());
        let e_arg = jt * 0.3;
        let e = e_arg.lift1(e_arg.v.exp(), e_arg.v.exp(), e_arg.v.exp());
        s * e + jz * jz * jx - 2.0 * jt / (1.0 + jy * jy)
    }

    #[test]
    fn polynomial_jets_are_exact() {
        // q = t^2 x + 3 y z has a closed Hessian.
        let [jt, jx, jy, jz] = Jet2::vars(2.0, -1.0, 0.5, 4.0);
        let q = jt * jt * jx + 3.0 * jy * jz;
        assert_eq!(q.v, 4.0 * -1.0 + 3.0 * 0.5 * 4.0);
        assert_eq!(q.g, [2.0 * 2.0 * -1.0, 4.0, 3.0 * 4.0, 3.0 * 0.5]);
        assert_eq!(q.h[T][T], 2.0 * -1.0);
        assert_eq!(q.h[T][X], 2.0 * 2.0);
        assert_eq!(q.h[Y][Z], 3.0);
        assert_eq!(q.h[X][X], 0.0);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(q.h[i][j], q.h[j][i]);
            }
        }
    }

    #[test]
    fn composite_jet_matches_central_differences() {
        let (t, x, y, z) = (1.3, 0.7, -0.4, 2.1);
        let j = f_jet(t, x, y, z);
        assert!((j.v - f(t, x, y, z)).abs() < 1e-14);

        let hstep = 1e-5;
        let shift = |i: usize, s: f64| {
            let mut p = [t, x, y, z];
            p[i] += s;
            f(p[0], p[1], p[2], p[3])
        };
        for i in 0..4 {
            let fd = (shift(i, hstep) - shift(i, -hstep)) / (2.0 * hstep);
            assert!((j.g[i] - fd).abs() < 1e-8, "grad[{i}]: {} vs {}", j.g[i], fd);
        }
        let shift2 = |i: usize, si: f64, jj: usize, sj: f64| {
            let mut p = [t, x, y, z];
            p[i] += si;
            p[jj] += sj;
            f(p[0], p[1], p[2], p[3])
        };
        for i in 0..4 {
            for jj in 0..4 {
                let fd = (shift2(i, hstep, jj, hstep) - shift2(i, hstep, jj, -hstep)
                    - shift2(i, -hstep, jj, hstep)
                    + shift2(i, -hstep, jj, -hstep))
                    / (4.0 * hstep * hstep);
                assert!(
                    (j.h[i][jj] - fd).abs() < 2e-5,
                    "hess[{i}][{jj}]: {} vs {}",
                    j.h[i][jj],
                    fd
                );
            }
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let [jt, jx, ..] = Jet2::vars(0.9, 1.7, 0.0, 0.0);
        let a = jt * jt + 2.0 * jx;
        let b = jx - 0.3 * jt;
        let c = (a / b) * b - a;
        assert!(c.max_abs() < 1e-13);
    }

    #[test]
    fn partial_jet_extracts_derivative_with_gradient() {
        // u = x^2 y: d/dx = 2xy with gradient (0, 2y, 2x, 0).
        let [_, jx, jy, _] = Jet2::vars(0.0, 3.0, 5.0, 0.0);
        let u = jx * jx * jy;
        let du_dx = u.partial_jet(X);
        assert_eq!(du_dx.v, 2.0 * 3.0 * 5.0);
        assert_eq!(du_dx.g, [0.0, 2.0 * 5.0, 2.0 * 3.0, 0.0]);
    }

    #[test]
    fn lift2_matches_atan2_derivatives() {
        let [_, jx, jy, _] = Jet2::vars(0.0, 1.2, -0.7, 0.0);
        let (yv, xv) = (jy.v, jx.v);
        let r2 = xv * xv + yv * yv;
        let a = jy.lift2(
            jx,
            yv.atan2(xv),
            xv / r2,
            -yv / r2,
            -2.0 * xv * yv / (r2 * r2),
            (yv * yv - xv * xv) / (r2 * r2),
            2.0 * xv * yv / (r2 * r2),
        );
        // Against finite differences of atan2(y, x).
        let hstep = 1e-6;
        let fd_x = ((yv).atan2(xv + hstep) - (yv).atan2(xv - hstep)) / (2.0 * hstep);
        let fd_y = ((yv + hstep).atan2(xv) - (yv - hstep).atan2(xv)) / (2.0 * hstep);
        assert!((a.g[X] - fd_x).abs() < 1e-9);
        assert!((a.g[Y] - fd_y).abs() < 1e-9);
        assert!((a.v - yv.atan2(xv)).abs() < 1e-15);
    }
}
