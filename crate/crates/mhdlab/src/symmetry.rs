//! Point symmetries of the ideal-MHD system and their action on
//! solutions.
//!
//! The system admits a thirteen-generator algebra: spacetime
//! translations `P0..P3`, rotations `J1..J3` acting jointly on the
//! position, velocity, and magnetic field vectors, Galilean boosts
//! `K1..K3`, and three dilations `F`, `G`, `H` rescaling spacetime,
//! flow, and thermodynamic quantities. `H` is central.
//!
//! Every generator is affine on the extended coordinates
//! `(t, x, y, z, rho, p, v, B)`, so the flow of any real combination is
//! an exact matrix exponential. A combination is written in a small
//! grammar, e.g. `"J3+0.4*G+(-0.5)*H"`, and its flow can be applied to
//! points, states, and whole solution fields (as a pushforward carrying
//! exact derivative jets).

use crate::diffcalc::StateJet;
use crate::error::{MhdError, Result};
use crate::families::{FamilyMetadata, MhdField, SampleWindow};
use crate::jet::Jet2;
use crate::ode::{dopri5, OdeOptions};
use crate::state::{MhdState, SpacetimePoint};
use crate::vec3::Vec3;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Basis generator names, in canonical order.
pub const GENERATOR_NAMES: [&str; 13] =
    ["P0", "P1", "P2", "P3", "J1", "J2", "J3", "K1", "K2", "K3", "F", "G", "H"];

/// Extended phase space layout: homogeneous coordinates
/// `[t, x, y, z, rho, p, v1, v2, v3, B1, B2, B3, 1]`.
pub const DIM: usize = 13;

type Mat = [[f64; DIM]; DIM];

/// A real combination of the basis generators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Combo {
    pub coef: [f64; 13],
}

impl Combo {
    pub fn zero() -> Self {
        Combo { coef: [0.0; 13] }
    }

    /// A single basis generator by name.
    pub fn generator(name: &str) -> Result<Self> {
        let idx = GENERATOR_NAMES
            .iter()
            .position(|g| *g == name)
            .ok_or_else(|| MhdError::Parse(format!("unknown generator `{name}`")))?;
        let mut c = Combo::zero();
        c.coef[idx] = 1.0;
        Ok(c)
    }

    /// Affine generator matrix on the homogeneous extended coordinates.
    pub fn matrix(&self) -> Mat {
        let mut m = [[0.0; DIM]; DIM];
        for (idx, &c) in self.coef.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            accumulate_generator(&mut m, idx, c);
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.coef.iter().all(|c| *c == 0.0)
    }
}

/// Adds `c` times basis generator `idx` to the matrix.
///
/// Rotations act with the vector action on position, velocity, and
/// field alike; boosts shear space by time and shift the velocity;
/// the three dilations are diagonal.
fn accumulate_generator(m: &mut Mat, idx: usize, c: f64) {
    // Coordinate slots.
    const TT: usize = 0;
    const RHO: usize = 4;
    const P: usize = 5;
    const V: usize = 6;
    const B: usize = 9;
    const ONE: usize = 12;
    match idx {
        // P0..P3: translations.
        0..=3 => m[idx][ONE] += c,
        // J1..J3: for axis k, d(a_i)/d eps = -eps_{kij} a_j on each of
        // the three transported vectors (position, velocity, field).
        4..=6 => {
            let k = idx - 4;
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            for base in [1, V, B] {
                m[base + j][base + i] += c;
                m[base + i][base + j] -= c;
            }
        }
        // K1..K3: x_i gains t, v_i gains a constant.
        7..=9 => {
            let i = idx - 7;
            m[1 + i][TT] += c;
            m[V + i][ONE] += c;
        }
        // F: spacetime dilation.
        10 => {
            for d in 0..4 {
                m[d][d] += c;
            }
        }
        // G: slows time, rescales speed, thins density.
        11 => {
            m[TT][TT] -= c;
            m[RHO][RHO] -= 2.0 * c;
            for d in 0..3 {
                m[V + d][V + d] += c;
            }
        }
        // H: central thermodynamic-magnetic dilation.
        12 => {
            m[RHO][RHO] += 2.0 * c;
            m[P][P] += 2.0 * c;
            for d in 0..3 {
                m[B + d][B + d] += c;
            }
        }
        _ => unreachable!("13 generators"),
    }
}

impl FromStr for Combo {
    type Err = MhdError;

    /// Parses `term (+|- term)*` where a term is `gen`, `coef*gen`, or
    /// `(coef)*gen`; coefficients may be signed, and sign characters may
    /// stack (`"J3+-0.5*H"`).
    fn from_str(s: &str) -> Result<Self> {
        let text: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(MhdError::Parse("empty generator combination".to_string()));
        }
        let mut combo = Combo::zero();
        let mut pos = 0;
        while pos < text.len() {
            let mut sign = 1.0;
            while pos < text.len() && (text[pos] == '+' || text[pos] == '-') {
                if text[pos] == '-' {
                    sign = -sign;
                }
                pos += 1;
            }
            let (coef, gen_start) = parse_coefficient(&text, pos)?;
            let (idx, next) = parse_generator(&text, gen_start)?;
            combo.coef[idx] += sign * coef;
            pos = next;
            if pos < text.len() && text[pos] != '+' && text[pos] != '-' {
                return Err(MhdError::Parse(format!(
                    "expected `+` or `-` at offset {pos} in `{s}`"
                )));
            }
        }
        Ok(combo)
    }
}

/// Parses an optional `coef*` or `(coef)*` prefix; returns the
/// coefficient and the offset where the generator name starts.
fn parse_coefficient(text: &[char], mut pos: usize) -> Result<(f64, usize)> {
    let start = pos;
    if pos < text.len() && text[pos] == '(' {
        let close = text[pos..]
            .iter()
            .position(|c| *c == ')')
            .ok_or_else(|| MhdError::Parse("unclosed parenthesis".to_string()))?
            + pos;
        let num: String = text[pos + 1..close].iter().collect();
        let coef = num
            .parse::<f64>()
            .map_err(|_| MhdError::Parse(format!("bad coefficient `{num}`")))?;
        pos = close + 1;
        if pos >= text.len() || text[pos] != '*' {
            return Err(MhdError::Parse("expected `*` after coefficient".to_string()));
        }
        return Ok((coef, pos + 1));
    }
    let mut end = pos;
    while end < text.len()
        && (text[end].is_ascii_digit()
            || text[end] == '.'
            || text[end] == 'e'
            || text[end] == 'E'
            || ((text[end] == '+' || text[end] == '-')
                && end > pos
                && (text[end - 1] == 'e' || text[end - 1] == 'E')))
    {
        end += 1;
    }
    if end == pos {
        return Ok((1.0, start));
    }
    if end >= text.len() || text[end] != '*' {
        // Not a coefficient after all (e.g. the digit in `J3`).
        return Ok((1.0, start));
    }
    let num: String = text[pos..end].iter().collect();
    let coef = num
        .parse::<f64>()
        .map_err(|_| MhdError::Parse(format!("bad coefficient `{num}`")))?;
    Ok((coef, end + 1))
}

fn parse_generator(text: &[char], pos: usize) -> Result<(usize, usize)> {
    for (idx, name) in GENERATOR_NAMES.iter().enumerate() {
        let chars: Vec<char> = name.chars().collect();
        if text.len() - pos >= chars.len() && text[pos..pos + chars.len()] == chars[..] {
            // Longest-match not needed: names are prefix-free.
            return Ok((idx, pos + chars.len()));
        }
    }
    let tail: String = text[pos..].iter().take(8).collect();
    Err(MhdError::Parse(format!("expected a generator name at `{tail}`")))
}

impl fmt::Display for Combo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, &c) in self.coef.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            if c == 1.0 {
                write!(f, "{}", GENERATOR_NAMES[idx])?;
            } else if c < 0.0 {
                write!(f, "({})*{}", c, GENERATOR_NAMES[idx])?;
            } else {
                write!(f, "{}*{}", c, GENERATOR_NAMES[idx])?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Commutator `[a, b]` of two combinations, decomposed back into the
/// basis. The algebra is closed, so the decomposition is exact; any
/// reconstruction defect above roundoff is reported as an error.
pub fn commutator(a: &Combo, b: &Combo) -> Result<Combo> {
    let (ma, mb) = (a.matrix(), b.matrix());
    let bracket = mat_sub(&mat_mul(&ma, &mb), &mat_mul(&mb, &ma));
    // Read coefficients off the entries each generator uniquely owns.
    let mut c = Combo::zero();
    c.coef[7] = bracket[1][0]; // K1: x row, t column
    c.coef[8] = bracket[2][0];
    c.coef[9] = bracket[3][0];
    c.coef[4] = bracket[3][2]; // J1: z row, y column
    c.coef[5] = bracket[1][3]; // J2: x row, z column
    c.coef[6] = bracket[2][1]; // J3: y row, x column
    c.coef[10] = bracket[1][1]; // F: x diagonal
    c.coef[11] = bracket[6][6]; // G: v1 diagonal
    c.coef[12] = bracket[5][5] / 2.0; // H: p diagonal
    c.coef[0] = bracket[0][12];
    c.coef[1] = bracket[1][12];
    c.coef[2] = bracket[2][12];
    c.coef[3] = bracket[3][12];
    let defect = mat_inf_norm(&mat_sub(&bracket, &c.matrix()));
    if defect > 1e-12 {
        return Err(MhdError::Diagnostic(format!(
            "commutator left the generator span (defect {defect:.3e})"
        )));
    }
    Ok(c)
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut out = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        for k in 0..DIM {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..DIM {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn mat_sub(a: &Mat, b: &Mat) -> Mat {
    let mut out = *a;
    for i in 0..DIM {
        for j in 0..DIM {
            out[i][j] -= b[i][j];
        }
    }
    out
}

fn mat_add_scaled(a: &mut Mat, b: &Mat, s: f64) {
    for i in 0..DIM {
        for j in 0..DIM {
            a[i][j] += s * b[i][j];
        }
    }
}

fn mat_identity() -> Mat {
    let mut m = [[0.0; DIM]; DIM];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn mat_inf_norm(m: &Mat) -> f64 {
    m.iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
/// Adequate to machine precision for the moderate norms that arise from
/// flow parameters of order one.
fn expm(m: &Mat) -> Mat {
    let norm = mat_inf_norm(m);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 0.5_f64.powi(squarings as i32);
    let mut scaled = *m;
    for row in scaled.iter_mut() {
        for e in row.iter_mut() {
            *e *= scale;
        }
    }
    let mut result = mat_identity();
    let mut term = mat_identity();
    for k in 1..=24 {
        term = mat_mul(&term, &scaled);
        for row in term.iter_mut() {
            for e in row.iter_mut() {
                *e /= k as f64;
            }
        }
        mat_add_scaled(&mut result, &term, 1.0);
        if mat_inf_norm(&term) < 1e-20 * mat_inf_norm(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result);
    }
    result
}

/// A finite symmetry transformation: affine on spacetime and affine on
/// the state, the two acting independently.
#[derive(Clone, Debug)]
pub struct GroupElement {
    /// Spacetime map `x' = A x + b` on `(t, x, y, z)`.
    pub coord_lin: [[f64; 4]; 4],
    pub coord_shift: [f64; 4],
    /// State map `u' = S u + c` on `(rho, p, v, B)`.
    pub state_lin: [[f64; 8]; 8],
    pub state_shift: [f64; 8],
}

impl GroupElement {
    pub fn identity() -> Self {
        Self::from_matrix(&mat_identity())
    }

    fn from_matrix(m: &Mat) -> Self {
        let mut coord_lin = [[0.0; 4]; 4];
        let mut coord_shift = [0.0; 4];
        let mut state_lin = [[0.0; 8]; 8];
        let mut state_shift = [0.0; 8];
        for i in 0..4 {
            coord_shift[i] = m[i][12];
            for j in 0..4 {
                coord_lin[i][j] = m[i][j];
            }
        }
        for i in 0..8 {
            state_shift[i] = m[4 + i][12];
            for j in 0..8 {
                state_lin[i][j] = m[4 + i][4 + j];
            }
        }
        GroupElement { coord_lin, coord_shift, state_lin, state_shift }
    }

    fn to_matrix(&self) -> Mat {
        let mut m = mat_identity();
        for i in 0..4 {
            m[i][12] = self.coord_shift[i];
            for j in 0..4 {
                m[i][j] = self.coord_lin[i][j];
            }
        }
        for i in 0..8 {
            m[4 + i][12] = self.state_shift[i];
            for j in 0..8 {
                m[4 + i][4 + j] = self.state_lin[i][j];
            }
        }
        m
    }

    pub fn apply_point(&self, p: &SpacetimePoint) -> SpacetimePoint {
        let x = [p.t, p.x, p.y, p.z];
        let mut out = self.coord_shift;
        for i in 0..4 {
            for j in 0..4 {
                out[i] += self.coord_lin[i][j] * x[j];
            }
        }
        SpacetimePoint::new(out[0], out[1], out[2], out[3])
    }

    pub fn apply_state(&self, s: &MhdState) -> Result<MhdState> {
        let u = [s.rho, s.p, s.v.x, s.v.y, s.v.z, s.b.x, s.b.y, s.b.z];
        let mut out = self.state_shift;
        for i in 0..8 {
            for j in 0..8 {
                out[i] += self.state_lin[i][j] * u[j];
            }
        }
        MhdState::new(
            out[0],
            out[1],
            Vec3::new(out[2], out[3], out[4]),
            Vec3::new(out[5], out[6], out[7]),
        )
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement::from_matrix(&mat_mul(&self.to_matrix(), &other.to_matrix()))
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        let coord = invert(&self.coord_lin).ok_or_else(|| {
            MhdError::Diagnostic("singular coordinate map".to_string())
        })?;
        let state = invert(&self.state_lin).ok_or_else(|| {
            MhdError::Diagnostic("singular state map".to_string())
        })?;
        let mut ge = GroupElement {
            coord_lin: coord,
            coord_shift: [0.0; 4],
            state_lin: state,
            state_shift: [0.0; 8],
        };
        for i in 0..4 {
            for j in 0..4 {
                ge.coord_shift[i] -= coord[i][j] * self.coord_shift[j];
            }
        }
        for i in 0..8 {
            for j in 0..8 {
                ge.state_shift[i] -= state[i][j] * self.state_shift[j];
            }
        }
        Ok(ge)
    }

    /// Largest entrywise difference against another element.
    pub fn distance(&self, other: &GroupElement) -> f64 {
        let (a, b) = (self.to_matrix(), other.to_matrix());
        let mut worst = 0.0_f64;
        for i in 0..DIM {
            for j in 0..DIM {
                worst = worst.max((a[i][j] - b[i][j]).abs());
            }
        }
        worst
    }
}

/// Gauss-Jordan inverse of a small matrix with partial pivoting.
fn invert<const N: usize>(m: &[[f64; N]; N]) -> Option<[[f64; N]; N]> {
    let mut a = *m;
    let mut inv = [[0.0; N]; N];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..N {
        let pivot = (col..N).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col];
        for j in 0..N {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for row in 0..N {
            if row == col {
                continue;
            }
            let f = a[row][col];
            if f == 0.0 {
                continue;
            }
            for j in 0..N {
                a[row][j] -= f * a[col][j];
                inv[row][j] -= f * inv[col][j];
            }
        }
    }
    Some(inv)
}

/// Exact flow of a generator combination for parameter `eps`.
pub fn flow(combo: &Combo, eps: f64) -> GroupElement {
    let mut m = combo.matrix();
    for row in m.iter_mut() {
        for e in row.iter_mut() {
            *e *= eps;
        }
    }
    GroupElement::from_matrix(&expm(&m))
}

/// The same flow obtained by numerical integration of the linear ODE
/// `M' = L M`; serves as an independent cross-check of [`flow`].
pub fn flow_numeric(combo: &Combo, eps: f64) -> Result<GroupElement> {
    if eps == 0.0 {
        return Ok(GroupElement::identity());
    }
    let l = combo.matrix();
    let rhs = move |_: f64, y: &[f64], dy: &mut [f64]| {
        for i in 0..DIM {
            for j in 0..DIM {
                let mut acc = 0.0;
                for k in 0..DIM {
                    acc += l[i][k] * y[k * DIM + j];
                }
                dy[i * DIM + j] = acc;
            }
        }
    };
    let id = mat_identity();
    let y0: Vec<f64> = (0..DIM * DIM).map(|n| id[n / DIM][n % DIM]).collect();
    let sol = dopri5(&rhs, 0.0, eps, &y0, &OdeOptions::with_tol(1e-13, 1e-13), None)?;
    let y = sol.y_end();
    let mut m = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            m[i][j] = y[i * DIM + j];
        }
    }
    Ok(GroupElement::from_matrix(&m))
}

/// A solution field transported by a finite symmetry transformation.
///
/// Evaluation pulls the query point back through the inverse spacetime
/// map, evaluates the carried field there, and pushes the state (and its
/// exact jet, via the affine chain rule) forward through the state map.
pub struct PushedField {
    inner: Arc<dyn MhdField>,
    fwd: GroupElement,
    inv: GroupElement,
    label: String,
}

/// Transports a whole solution along the flow of `combo` for parameter
/// `eps`. The result is again an exact solution of the same system.
pub fn pushforward(field: Arc<dyn MhdField>, combo: &Combo, eps: f64) -> PushedField {
    let label = format!("{}<-[{}; eps={}]", field.id(), combo, eps);
    PushedField { fwd: flow(combo, eps), inv: flow(combo, -eps), inner: field, label }
}

impl PushedField {
    /// Jet of the transported field at `q`: affine pullback of the
    /// coordinates composed with the affine state map.
    fn transform_jet(&self, jet: &StateJet) -> StateJet {
        let p = &self.inv.coord_lin;
        let pull = |j: &Jet2| -> Jet2 {
            let mut g = [0.0; 4];
            let mut h = [[0.0; 4]; 4];
            for a in 0..4 {
                for b in 0..4 {
                    g[a] += j.g[b] * p[b][a];
                    for e in 0..4 {
                        for d in 0..4 {
                            h[a][e] += p[b][a] * j.h[b][d] * p[d][e];
                        }
                    }
                }
            }
            Jet2 { v: j.v, g, h }
        };
        let pulled = [
            pull(&jet.rho),
            pull(&jet.p),
            pull(&jet.v[0]),
            pull(&jet.v[1]),
            pull(&jet.v[2]),
            pull(&jet.b[0]),
            pull(&jet.b[1]),
            pull(&jet.b[2]),
        ];
        let s = &self.fwd.state_lin;
        let c = &self.fwd.state_shift;
        let mut mixed: Vec<Jet2> = Vec::with_capacity(8);
        for i in 0..8 {
            let mut out = Jet2::constant(c[i]);
            for (k, pk) in pulled.iter().enumerate() {
                if s[i][k] == 0.0 {
                    continue;
                }
                out = out + *pk * s[i][k];
            }
            mixed.push(out);
        }
        StateJet::from_components([
            mixed[0], mixed[1], mixed[2], mixed[3], mixed[4], mixed[5], mixed[6], mixed[7],
        ])
    }
}

impl MhdField for PushedField {
    fn id(&self) -> &str {
        &self.label
    }

    fn gamma(&self) -> f64 {
        self.inner.gamma()
    }

    fn metadata(&self) -> FamilyMetadata {
        let mut meta = self.inner.metadata();
        meta.title = format!("transported: {}", meta.title);
        meta
    }

    fn sample_window(&self) -> SampleWindow {
        // Bounding box of the mapped corners of the carried window.
        let w = self.inner.sample_window();
        let axes = [w.t, w.x, w.y, w.z];
        let mut lo = [f64::INFINITY; 4];
        let mut hi = [f64::NEG_INFINITY; 4];
        for mask in 0..16u32 {
            let corner = SpacetimePoint::new(
                if mask & 1 == 0 { axes[0].0 } else { axes[0].1 },
                if mask & 2 == 0 { axes[1].0 } else { axes[1].1 },
                if mask & 4 == 0 { axes[2].0 } else { axes[2].1 },
                if mask & 8 == 0 { axes[3].0 } else { axes[3].1 },
            );
            let m = self.fwd.apply_point(&corner);
            for (i, c) in [m.t, m.x, m.y, m.z].into_iter().enumerate() {
                lo[i] = lo[i].min(c);
                hi[i] = hi[i].max(c);
            }
        }
        SampleWindow {
            t: (lo[0], hi[0]),
            x: (lo[1], hi[1]),
            y: (lo[2], hi[2]),
            z: (lo[3], hi[3]),
        }
    }

    fn check_point(&self, p: &SpacetimePoint) -> Result<()> {
        self.inner.check_point(&self.inv.apply_point(p))
    }

    fn state(&self, p: &SpacetimePoint) -> Result<MhdState> {
        let back = self.inv.apply_point(p);
        self.fwd.apply_state(&self.inner.state(&back)?)
    }

    fn state_jet(&self, p: &SpacetimePoint) -> Result<StateJet> {
        let back = self.inv.apply_point(p);
        Ok(self.transform_jet(&self.inner.state_jet(&back)?))
    }
}

/// Largest relative state discrepancy between a field and its transport
/// along `combo`, over the supplied points (skipping any that fall
/// outside either domain). Vanishes exactly when the flow belongs to the
/// field's invariance algebra.
pub fn invariance_defect(
    field: &Arc<dyn MhdField>,
    combo: &Combo,
    eps: f64,
    points: &[SpacetimePoint],
) -> Result<f64> {
    let pushed = pushforward(Arc::clone(field), combo, eps);
    let mut worst = 0.0_f64;
    let mut used = 0usize;
    for p in points {
        if !field.contains(p) || !pushed.contains(p) {
            continue;
        }
        let a = field.state(p)?;
        let b = pushed.state(p)?;
        let scale = |x: f64, y: f64| (x - y).abs() / 1.0_f64.max(x.abs()).max(y.abs());
        let d = scale(a.rho, b.rho)
            .max(scale(a.p, b.p))
            .max(scale(a.v.x, b.v.x))
            .max(scale(a.v.y, b.v.y))
            .max(scale(a.v.z, b.v.z))
            .max(scale(a.b.x, b.b.x))
            .max(scale(a.b.y, b.b.y))
            .max(scale(a.b.z, b.b.z));
        worst = worst.max(d);
        used += 1;
    }
    if used == 0 {
        return Err(MhdError::Diagnostic(
            "no sample point lies in both the original and transported domains".to_string(),
        ));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, sample_points};
    use crate::mhdcheck;
    use crate::params::ParamMap;

    fn c(s: &str) -> Combo {
        s.parse().unwrap()
    }

    #[test]
    fn parser_handles_the_catalogue_grammar() {
        let k = c("F+1*G-H").coef;
        assert_eq!((k[10], k[11], k[12]), (1.0, 1.0, -1.0));
        assert_eq!(c("(-0.625)*H").coef[12], -0.625);
        let k = c("J3+-0.5*H").coef;
        assert_eq!((k[6], k[12]), (1.0, -0.5));
        let k = c("G+2*H").coef;
        assert_eq!((k[11], k[12]), (1.0, 2.0));
        let k = c("J3+(0.8)*F+(0.8)*G+(-0.5)*H").coef;
        assert_eq!((k[6], k[10], k[11], k[12]), (1.0, 0.8, 0.8, -0.5));
        let k = c(" P0 + 2.5e-1*K3 ").coef;
        assert_eq!((k[0], k[9]), (1.0, 0.25));
    }

    #[test]
    fn parser_rejects_malformed_input() {
        assert!("Q1".parse::<Combo>().is_err());
        assert!("".parse::<Combo>().is_err());
        assert!("2*".parse::<Combo>().is_err());
        assert!("(0.5*H".parse::<Combo>().is_err());
        assert!("J3 K1".parse::<Combo>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["F+G+(-1)*H", "J3+(-0.5)*H", "P0", "K1+0.25*K2", "(-0.625)*H"] {
            let parsed = c(s);
            assert_eq!(c(&parsed.to_string()), parsed, "{s}");
        }
    }

    #[test]
    fn single_generator_flows_match_closed_forms() {
        let eps = 0.37;
        // Translation.
        let g = flow(&c("P2"), eps);
        let p = g.apply_point(&SpacetimePoint::new(1.0, 2.0, 3.0, 4.0));
        assert!((p.y - 3.37).abs() < 1e-15);
        // Rotation about z by a quarter turn.
        let g = flow(&c("J3"), std::f64::consts::FRAC_PI_2);
        let p = g.apply_point(&SpacetimePoint::new(0.0, 1.0, 0.0, 0.0));
        assert!((p.x).abs() < 1e-12 && (p.y - 1.0).abs() < 1e-12);
        let s = g
            .apply_state(
                &MhdState::new(1.0, 1.0, Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 1.0))
                    .unwrap(),
            )
            .unwrap();
        assert!(s.v.x.abs() < 1e-12 && (s.v.y - 1.0).abs() < 1e-12);
        assert!((s.b.z - 1.0).abs() < 1e-15);
        // Boost: position shears by time, velocity shifts.
        let g = flow(&c("K3"), 0.5);
        let p = g.apply_point(&SpacetimePoint::new(2.0, 0.0, 0.0, 1.0));
        assert!((p.z - 2.0).abs() < 1e-15);
        let s = g
            .apply_state(
                &MhdState::new(1.0, 1.0, Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0))
                    .unwrap(),
            )
            .unwrap();
        assert!((s.v.z - 0.5).abs() < 1e-15);
        // Dilations act by exact exponentials.
        let g = flow(&c("H"), eps);
        let s = g
            .apply_state(
                &MhdState::new(2.0, 3.0, Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 1.0))
                    .unwrap(),
            )
            .unwrap();
        assert!((s.rho - 2.0 * (2.0 * eps).exp()).abs() < 1e-13);
        assert!((s.p - 3.0 * (2.0 * eps).exp()).abs() < 1e-13);
        assert!((s.b.x - eps.exp()).abs() < 1e-14);
        let g = flow(&c("G"), eps);
        let p = g.apply_point(&SpacetimePoint::new(2.0, 1.0, 1.0, 1.0));
        assert!((p.t - 2.0 * (-eps).exp()).abs() < 1e-14);
        let g = flow(&c("F"), eps);
        let p = g.apply_point(&SpacetimePoint::new(2.0, 1.0, 0.0, 0.0));
        assert!((p.t - 2.0 * eps.exp()).abs() < 1e-14 && (p.x - eps.exp()).abs() < 1e-14);
    }

    #[test]
    fn numeric_flow_agrees_with_the_exponential() {
        let combo = c("J3+K1+0.3*F+(-0.2)*G+0.1*H+0.7*P0");
        for eps in [0.8, -1.3, 0.05] {
            let a = flow(&combo, eps);
            let b = flow_numeric(&combo, eps).unwrap();
            assert!(a.distance(&b) < 1e-12, "eps={eps}: {:.3e}", a.distance(&b));
        }
    }

    #[test]
    fn flows_satisfy_the_group_law() {
        let combo = c("J2+0.4*K2+0.2*F+0.3*H");
        let a = flow(&combo, 0.7);
        let b = flow(&combo, 0.5);
        let ab = a.compose(&b);
        assert!(ab.distance(&flow(&combo, 1.2)) < 1e-12);
        let inv = a.inverse().unwrap();
        assert!(inv.distance(&flow(&combo, -0.7)) < 1e-12);
        assert!(a.compose(&inv).distance(&GroupElement::identity()) < 1e-12);
    }

    #[test]
    fn commutators_close_and_h_is_central() {
        let h = c("H");
        for name in GENERATOR_NAMES {
            let x = Combo::generator(name).unwrap();
            assert!(commutator(&h, &x).unwrap().is_zero(), "[H, {name}] != 0");
        }
        assert_eq!(commutator(&c("J1"), &c("J2")).unwrap(), c("J3"));
        assert_eq!(commutator(&c("J3"), &c("K1")).unwrap(), c("K2"));
        assert!(commutator(&c("F"), &c("G")).unwrap().is_zero());
        // Closure over all basis pairs.
        for a in GENERATOR_NAMES {
            for b in GENERATOR_NAMES {
                let ca = Combo::generator(a).unwrap();
                let cb = Combo::generator(b).unwrap();
                commutator(&ca, &cb).unwrap();
            }
        }
    }

    #[test]
    fn pushforward_of_a_solution_still_solves_the_system() {
        let combo = c("K1+0.3*J3+0.2*F+0.1*G+(-0.2)*H");
        for id in ["G7", "G8", "G4"] {
            let inner: Arc<dyn MhdField> =
                Arc::from(make_family(id, &ParamMap::new()).unwrap());
            let pushed = pushforward(inner, &combo, 0.4);
            let pts = sample_points(&pushed, 19, 30).unwrap();
            for p in &pts {
                let r = mhdcheck::residual(&pushed, p).unwrap();
                assert!(r.rel < 1e-9, "{id} at {p:?}: rel {:.3e}", r.rel);
            }
        }
    }

    #[test]
    fn pushed_jet_matches_a_finite_difference_probe() {
        let inner: Arc<dyn MhdField> =
            Arc::from(make_family("G8", &ParamMap::new()).unwrap());
        let pushed = pushforward(Arc::clone(&inner), &c("K2+0.5*J1"), 0.3);
        let p = sample_points(&pushed, 5, 1).unwrap()[0];
        let jet = pushed.state_jet(&p).unwrap();
        let f = |q: [f64; 4]| {
            pushed
                .state(&SpacetimePoint::new(q[0], q[1], q[2], q[3]))
                .unwrap()
                .b
                .x
        };
        let q = [p.t, p.x, p.y, p.z];
        for axis in 0..4 {
            let fd = crate::diffcalc::fd::gradient(&f, q, axis, 1e-3);
            assert!((jet.b[0].g[axis] - fd).abs() < 1e-8, "axis {axis}");
        }
    }

    #[test]
    fn declared_algebras_leave_their_families_invariant() {
        for id in ["G4", "G7", "G8"] {
            let field: Arc<dyn MhdField> =
                Arc::from(make_family(id, &ParamMap::new()).unwrap());
            let pts = sample_points(field.as_ref(), 11, 40).unwrap();
            for combo_str in field.metadata().algebra {
                let combo = c(&combo_str);
                for eps in [0.15, -0.3] {
                    let d = invariance_defect(&field, &combo, eps, &pts).unwrap();
                    assert!(d < 1e-9, "{id} under {combo_str} (eps {eps}): {d:.3e}");
                }
            }
        }
    }

    #[test]
    fn a_flow_outside_the_algebra_moves_the_field() {
        let field: Arc<dyn MhdField> =
            Arc::from(make_family("G5", &ParamMap::new()).unwrap());
        let pts = sample_points(field.as_ref(), 13, 40).unwrap();
        let d = invariance_defect(&field, &c("P1"), 0.05, &pts).unwrap();
        assert!(d > 1e-3, "translation unexpectedly preserved the field: {d:.3e}");
    }
}
