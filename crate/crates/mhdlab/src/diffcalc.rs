//! Differential operators on jet-valued fields, plus an independent
//! finite-difference oracle used by the tests to cross-check jets.

use crate::error::Result;
use crate::jet::{Jet1, Jet2, T, X, Y, Z};
use crate::state::MhdState;
use crate::vec3::Vec3;

/// Second-order jets of the full plasma state at one spacetime point.
#[derive(Clone, Copy, Debug)]
pub struct StateJet {
    pub rho: Jet2,
    pub p: Jet2,
    pub v: [Jet2; 3],
    pub b: [Jet2; 3],
}

impl StateJet {
    /// Point values without derivative data, through the checked
    /// constructor.
    pub fn state(&self) -> Result<MhdState> {
        MhdState::new(
            self.rho.v,
            self.p.v,
            Vec3::new(self.v[0].v, self.v[1].v, self.v[2].v),
            Vec3::new(self.b[0].v, self.b[1].v, self.b[2].v),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite()
            && self.p.is_finite()
            && self.v.iter().all(|j| j.is_finite())
            && self.b.iter().all(|j| j.is_finite())
    }

    pub fn from_components(components: [Jet2; 8]) -> Self {
        let [rho, p, v1, v2, v3, b1, b2, b3] = components;
        StateJet { rho, p, v: [v1, v2, v3], b: [b1, b2, b3] }
    }
}

/// Spatial gradient of a scalar jet.
pub fn grad(f: &Jet2) -> Vec3 {
    Vec3::new(f.g[X], f.g[Y], f.g[Z])
}

/// Spatial divergence of a vector of jets.
pub fn div(f: &[Jet2; 3]) -> f64 {
    f[0].g[X] + f[1].g[Y] + f[2].g[Z]
}

/// Spatial curl of a vector of jets.
pub fn curl(f: &[Jet2; 3]) -> Vec3 {
    Vec3::new(
        f[2].g[Y] - f[1].g[Z],
        f[0].g[Z] - f[2].g[X],
        f[1].g[X] - f[0].g[Y],
    )
}

/// Convective derivative `(w . grad) f` of a scalar jet.
pub fn convective(w: Vec3, f: &Jet2) -> f64 {
    w.x * f.g[X] + w.y * f.g[Y] + w.z * f.g[Z]
}

/// Convective derivative `(w . grad) f` applied componentwise.
pub fn convective_vec(w: Vec3, f: &[Jet2; 3]) -> Vec3 {
    Vec3::new(convective(w, &f[0]), convective(w, &f[1]), convective(w, &f[2]))
}

/// Material derivative `d f / d t = f_t + (w . grad) f` of a scalar jet.
pub fn material(w: Vec3, f: &Jet2) -> f64 {
    f.g[T] + convective(w, f)
}

/// Material derivative applied componentwise.
pub fn material_vec(w: Vec3, f: &[Jet2; 3]) -> Vec3 {
    Vec3::new(material(w, &f[0]), material(w, &f[1]), material(w, &f[2]))
}

/// Gradient of a scalar jet as first-order jets, one per spatial axis.
pub fn grad_jet(f: &Jet2) -> [Jet1; 3] {
    [f.partial_jet(X), f.partial_jet(Y), f.partial_jet(Z)]
}

/// Curl of a jet vector as first-order jets; carries one more derivative
/// order than [`curl`], enough to differentiate the result once.
pub fn curl_jet(f: &[Jet2; 3]) -> [Jet1; 3] {
    [
        f[2].partial_jet(Y) - f[1].partial_jet(Z),
        f[0].partial_jet(Z) - f[2].partial_jet(X),
        f[1].partial_jet(X) - f[0].partial_jet(Y),
    ]
}

/// Spatial divergence of a first-order jet vector.
pub fn div1(f: &[Jet1; 3]) -> f64 {
    f[0].g[X] + f[1].g[Y] + f[2].g[Z]
}

/// Spatial curl of a first-order jet vector.
pub fn curl1(f: &[Jet1; 3]) -> Vec3 {
    Vec3::new(
        f[2].g[Y] - f[1].g[Z],
        f[0].g[Z] - f[2].g[X],
        f[1].g[X] - f[0].g[Y],
    )
}

/// Material derivative of a first-order jet scalar.
pub fn material1(w: Vec3, f: &Jet1) -> f64 {
    f.g[T] + w.x * f.g[X] + w.y * f.g[Y] + w.z * f.g[Z]
}

/// Finite-difference oracle with one step of Richardson extrapolation.
///
/// Central differences at steps `h` and `h/2` are combined to cancel the
/// leading error term, giving fourth-order estimates that are independent
/// of the jet machinery.
pub mod fd {
    /// First partial of `f` along `axis` at `p`.
    pub fn gradient(f: &dyn Fn([f64; 4]) -> f64, p: [f64; 4], axis: usize, h: f64) -> f64 {
        let d = |step: f64| {
            let mut a = p;
            let mut b = p;
            a[axis] += step;
            b[axis] -= step;
            (f(a) - f(b)) / (2.0 * step)
        };
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    }

    /// Second partial of `f` along `(i, j)` at `p`.
    pub fn hessian(f: &dyn Fn([f64; 4]) -> f64, p: [f64; 4], i: usize, j: usize, h: f64) -> f64 {
        let d = |step: f64| {
            if i == j {
                let mut a = p;
                let mut b = p;
                a[i] += step;
                b[i] -= step;
                (f(a) - 2.0 * f(p) + f(b)) / (step * step)
            } else {
                let mut pp = p;
                let mut pm = p;
                let mut mp = p;
                let mut mm = p;
                pp[i] += step;
                pp[j] += step;
                pm[i] += step;
                pm[j] -= step;
                mp[i] -= step;
                mp[j] += step;
                mm[i] -= step;
                mm[j] -= step;
                (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * step * step)
            }
        };
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    }
}
