//! Generic scalar abstraction so each closed-form solution is written once
//! and evaluated either as plain numbers or as second-order jets.

use crate::jet::Jet2;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A differentiable scalar: `f64` for plain evaluation, [`Jet2`] for exact
/// derivative propagation. Elementary functions are supplied as default
/// methods through the univariate chain rule [`Scalar::lift1`].
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// Embeds a constant.
    fn lit(c: f64) -> Self;

    /// Underlying point value.
    fn value(self) -> f64;

    /// Chain rule through a univariate map given `f`, `f'`, `f''` at the
    /// current value.
    fn lift1(self, f0: f64, f1: f64, f2: f64) -> Self;

    /// Chain rule through a bivariate map `f(self, w)` given the value and
    /// partials at the current point.
    #[allow(clippy::too_many_arguments)]
    fn lift2(self, w: Self, f0: f64, fu: f64, fw: f64, fuu: f64, fuw: f64, fww: f64) -> Self;

    fn scale(self, c: f64) -> Self {
        self * Self::lit(c)
    }

    fn add_const(self, c: f64) -> Self {
        self + Self::lit(c)
    }

    fn exp(self) -> Self {
        let e = self.value().exp();
        self.lift1(e, e, e)
    }

    fn ln(self) -> Self {
        let u = self.value();
        self.lift1(u.ln(), 1.0 / u, -1.0 / (u * u))
    }

    fn sqrt(self) -> Self {
        let s = self.value().sqrt();
        self.lift1(s, 0.5 / s, -0.25 / (s * s * s))
    }

    /// Power with a constant real exponent.
    fn powf(self, a: f64) -> Self {
        let u = self.value();
        self.lift1(u.powf(a), a * u.powf(a - 1.0), a * (a - 1.0) * u.powf(a - 2.0))
    }

    fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::lit(1.0),
            1 => self,
            2 => self * self,
            3 => self * self * self,
            _ => {
                let u = self.value();
                self.lift1(
                    u.powi(n),
                    f64::from(n) * u.powi(n - 1),
                    f64::from(n) * f64::from(n - 1) * u.powi(n - 2),
                )
            }
        }
    }

    fn recip(self) -> Self {
        let u = self.value();
        self.lift1(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u))
    }

    fn sin(self) -> Self {
        let u = self.value();
        self.lift1(u.sin(), u.cos(), -u.sin())
    }

    fn cos(self) -> Self {
        let u = self.value();
        self.lift1(u.cos(), -u.sin(), -u.cos())
    }

    fn tan(self) -> Self {
        let t = self.value().tan();
        let sec2 = 1.0 + t * t;
        self.lift1(t, sec2, 2.0 * t * sec2)
    }

    fn atan(self) -> Self {
        let u = self.value();
        let d = 1.0 + u * u;
        self.lift1(u.atan(), 1.0 / d, -2.0 * u / (d * d))
    }

    fn sinh(self) -> Self {
        let u = self.value();
        self.lift1(u.sinh(), u.cosh(), u.sinh())
    }

    fn cosh(self) -> Self {
        let u = self.value();
        self.lift1(u.cosh(), u.sinh(), u.cosh())
    }

    fn tanh(self) -> Self {
        let th = self.value().tanh();
        let sech2 = 1.0 - th * th;
        self.lift1(th, sech2, -2.0 * th * sech2)
    }

    /// Two-argument arctangent `atan2(self, x)`; smooth away from the origin.
    fn atan2(self, x: Self) -> Self {
        let yv = self.value();
        let xv = x.value();
        let r2 = xv * xv + yv * yv;
        self.lift2(
            x,
            yv.atan2(xv),
            xv / r2,
            -yv / r2,
            -2.0 * xv * yv / (r2 * r2),
            (yv * yv - xv * xv) / (r2 * r2),
            2.0 * xv * yv / (r2 * r2),
        )
    }

    fn hypot(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }
}

impl Scalar for f64 {
    fn lit(c: f64) -> f64 {
        c
    }

    fn value(self) -> f64 {
        self
    }

    fn lift1(self, f0: f64, _f1: f64, _f2: f64) -> f64 {
        f0
    }

    fn lift2(self, _w: f64, f0: f64, _fu: f64, _fw: f64, _fuu: f64, _fuw: f64, _fww: f64) -> f64 {
        f0
    }
}

impl Scalar for Jet2 {
    fn lit(c: f64) -> Jet2 {
        Jet2::constant(c)
    }

    fn value(self) -> f64 {
        self.v
    }

    fn lift1(self, f0: f64, f1: f64, f2: f64) -> Jet2 {
        Jet2::lift1(self, f0, f1, f2)
    }

    fn lift2(self, w: Jet2, f0: f64, fu: f64, fw: f64, fuu: f64, fuw: f64, fww: f64) -> Jet2 {
        Jet2::lift2(self, w, f0, fu, fw, fuu, fuw, fww)
    }
}
