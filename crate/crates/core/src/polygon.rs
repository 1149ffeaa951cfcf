//! Regular helical polygons in R^{1,2} and their sampled initial data.
//!
//! A circular helical polygon (CHP) has a time-like screw axis (the x1-axis),
//! M sides of length 2π/M per turn and a 2π-periodic tangent. A hyperbolic
//! helical polygon (HHP) has a space-like screw axis (the x3-axis) and side
//! length l; numerically it is truncated to M sides centered at s = 0.

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mink::MinkVec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolygonKind {
    Chp,
    Hhp,
}

impl PolygonKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PolygonKind::Chp => "CHP",
            PolygonKind::Hhp => "HHP",
        }
    }
}

/// A regular helical polygon together with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolygonSpec {
    pub kind: PolygonKind,
    /// Number of sides (per turn for CHP, truncation count for HHP).
    pub m: usize,
    pub b: f64,
    /// Side length; 2π/M for a CHP.
    pub l: f64,
    pub a: f64,
    /// Hyperbolic angle between adjacent sides.
    pub rho0: f64,
    /// Torsion angle between consecutive osculating planes.
    pub theta0: f64,
    pub c0: f64,
    pub c_theta0: f64,
    /// Recurrence period l^2 / 2π (equal to 2π/M^2 for a CHP).
    pub t_f: f64,
}

const CHP_MIN_B: f64 = 1.0 + 1e-12;
const HHP_MAX_TANGENT: f64 = 1e150;

impl PolygonSpec {
    /// Circular helical polygon with `m` sides and first tangent component `b > 1`.
    pub fn chp(m: usize, b: f64) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidSpec(format!("CHP needs M >= 3, got {m}")));
        }
        if !(b > CHP_MIN_B) || !b.is_finite() {
            return Err(Error::InvalidSpec(format!("CHP needs b > 1, got {b}")));
        }
        let l = 2.0 * PI / m as f64;
        let a = (b * b - 1.0).sqrt();
        let half = PI / m as f64;
        let rho0 = 2.0 * (a * half.sin()).asinh();
        let theta0 = 2.0 * (b * half.tan()).atan();
        Ok(Self::finish(PolygonKind::Chp, m, b, l, a, rho0, theta0))
    }

    /// Hyperbolic helical polygon truncated to `m` (even) sides of length `l`.
    pub fn hhp(m: usize, l: f64, b: f64) -> Result<Self> {
        if m < 2 || m % 2 != 0 {
            return Err(Error::InvalidSpec(format!("HHP needs an even M >= 2, got {m}")));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidSpec(format!("HHP needs l > 0, got {l}")));
        }
        if !(b >= 0.0) || !b.is_finite() {
            return Err(Error::InvalidSpec(format!("HHP needs b >= 0, got {b}")));
        }
        let a = (1.0 + b * b).sqrt();
        let reach = a * (0.5 * l * m as f64).cosh();
        if !(reach < HHP_MAX_TANGENT) {
            return Err(Error::InvalidSpec(format!(
                "HHP tangent grows to {reach:e} over the truncated length; parameters out of range"
            )));
        }
        let rho0 = 2.0 * (a * (0.5 * l).sinh()).asinh();
        let theta0 = 2.0 * (b * (0.5 * l).tanh()).atan();
        Ok(Self::finish(PolygonKind::Hhp, m, b, l, a, rho0, theta0))
    }

    /// CHP whose torsion angle is `π c / d`.
    pub fn chp_with_torsion(m: usize, c: u32, d: u32) -> Result<Self> {
        let theta0 = PI * c as f64 / d as f64;
        Self::chp(m, (0.5 * theta0).tan() / (PI / m as f64).tan())
    }

    /// HHP whose torsion angle is `π c / d`.
    pub fn hhp_with_torsion(m: usize, l: f64, c: u32, d: u32) -> Result<Self> {
        let theta0 = PI * c as f64 / d as f64;
        Self::hhp(m, l, (0.5 * theta0).tan() / (0.5 * l).tanh())
    }

    fn finish(kind: PolygonKind, m: usize, b: f64, l: f64, a: f64, rho0: f64, theta0: f64) -> Self {
        let coeff = |angle: f64| ((2.0 / PI) * (0.5 * angle).cosh().ln()).sqrt();
        PolygonSpec {
            kind,
            m,
            b,
            l,
            a,
            rho0,
            theta0,
            c0: coeff(l),
            c_theta0: coeff(rho0),
            t_f: l * l / (2.0 * PI),
        }
    }

    pub fn side_length(&self) -> f64 {
        self.l
    }

    /// Arclength covered by the sampled curve: 2π (CHP) or L = lM (HHP).
    pub fn domain_length(&self) -> f64 {
        match self.kind {
            PolygonKind::Chp => 2.0 * PI,
            PolygonKind::Hhp => self.l * self.m as f64,
        }
    }

    /// Tangent of side `k`, i.e. the value on `s_k < s < s_{k+1}`.
    pub fn side_tangent(&self, k: i64) -> MinkVec {
        match self.kind {
            PolygonKind::Chp => {
                let phi = 2.0 * PI * k as f64 / self.m as f64;
                MinkVec::new(self.b, self.a * phi.cos(), self.a * phi.sin())
            }
            PolygonKind::Hhp => {
                let arg = 0.5 * self.l + k as f64 * self.l;
                MinkVec::new(self.a * arg.cosh(), self.a * arg.sinh(), self.b)
            }
        }
    }

    /// Unit bisector of the two sides meeting at vertex `k`.
    pub fn vertex_tangent(&self, k: i64) -> MinkVec {
        (self.side_tangent(k - 1) + self.side_tangent(k)) * (0.5 / (0.5 * self.rho0).cosh())
    }

    /// Vertex `X(s_k, 0)` for any integer `k`.
    pub fn vertex(&self, k: i64) -> MinkVec {
        let sk = k as f64 * self.l;
        match self.kind {
            PolygonKind::Chp => {
                let m = self.m as f64;
                let scale = self.a * PI / (m * (PI / m).sin());
                let phi = PI * (2.0 * k as f64 - 1.0) / m;
                MinkVec::new(self.b * sk, scale * phi.sin(), -scale * phi.cos())
            }
            PolygonKind::Hhp => {
                let half = 0.5 * self.l;
                let pref = half / half.sinh();
                MinkVec::new(pref * self.a * sk.sinh(), pref * self.a * sk.cosh(), self.b * sk)
            }
        }
    }

    fn side_of(&self, s: f64) -> Result<i64> {
        let u = s / self.l;
        let nearest = u.round();
        if (u - nearest).abs() * self.l <= 1e-12 * (1.0 + s.abs()) {
            return Err(Error::VertexPoint(s));
        }
        Ok(u.floor() as i64)
    }

    /// Piecewise-constant tangent `T(s, 0)`; undefined exactly at a vertex.
    pub fn tangent_at(&self, s: f64) -> Result<MinkVec> {
        Ok(self.side_tangent(self.side_of(s)?))
    }

    /// Piecewise-linear position `X(s, 0)`.
    pub fn position_at(&self, s: f64) -> MinkVec {
        let k = (s / self.l).floor() as i64;
        self.vertex(k) + self.side_tangent(k) * (s - k as f64 * self.l)
    }

    /// Default per-side product P(0) = cosh(ρ0/2)^n over one CHP period
    /// (M sides) or the inner half of the HHP (M/2 sides).
    pub fn conserved_product(&self) -> f64 {
        let sides = match self.kind {
            PolygonKind::Chp => self.m,
            PolygonKind::Hhp => self.m / 2,
        };
        (0.5 * self.rho0).cosh().powi(sides as i32)
    }
}

/// Error-free wrapper kept for symmetry with the other closed forms.
pub fn curvature_angle(spec: &PolygonSpec) -> f64 {
    spec.rho0
}

pub fn torsion_angle(spec: &PolygonSpec) -> f64 {
    spec.theta0
}

/// `(c0, c_{θ,0})`.
pub fn corner_coefficients(spec: &PolygonSpec) -> (f64, f64) {
    (spec.c0, spec.c_theta0)
}

pub fn chp_tangent(spec: &PolygonSpec, s: f64) -> Result<MinkVec> {
    expect_kind(spec, PolygonKind::Chp)?;
    spec.tangent_at(s)
}

pub fn hhp_tangent(spec: &PolygonSpec, s: f64) -> Result<MinkVec> {
    expect_kind(spec, PolygonKind::Hhp)?;
    spec.tangent_at(s)
}

pub fn chp_vertices(spec: &PolygonSpec, k: i64) -> Result<MinkVec> {
    expect_kind(spec, PolygonKind::Chp)?;
    Ok(spec.vertex(k))
}

pub fn hhp_vertices(spec: &PolygonSpec, k: i64) -> Result<MinkVec> {
    expect_kind(spec, PolygonKind::Hhp)?;
    Ok(spec.vertex(k))
}

fn expect_kind(spec: &PolygonSpec, kind: PolygonKind) -> Result<()> {
    if spec.kind == kind {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("expected a {} spec, got {}", kind.as_str(), spec.kind.as_str())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic2Pi,
    FixedEnds,
}

/// Sampled tangent and position on a uniform arclength grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveState {
    pub grid: Vec<f64>,
    pub tangent: Vec<MinkVec>,
    pub position: Vec<MinkVec>,
    pub time: f64,
    pub boundary: Boundary,
}

impl CurveState {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn ds(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// Index of the node at s = 0.
    pub fn origin_index(&self) -> usize {
        match self.boundary {
            Boundary::Periodic2Pi => 0,
            Boundary::FixedEnds => (self.len() - 1) / 2,
        }
    }

    /// Largest `|T∘T + 1|` over the grid.
    pub fn h2_defect(&self) -> f64 {
        self.tangent.iter().map(|t| (t.norm_sq() + 1.0).abs()).fold(0.0, f64::max)
    }

    /// Mean of the positions over all nodes (or a centered sub-window).
    pub fn center_of_mass(&self, inner_fraction: f64) -> MinkVec {
        let n = self.len();
        let keep = ((n as f64 * inner_fraction).round() as usize).clamp(1, n);
        let start = (n - keep) / 2;
        let sum = self.position[start..start + keep]
            .iter()
            .fold(MinkVec::ZERO, |acc, &x| acc + x);
        sum * (1.0 / keep as f64)
    }
}

/// Samples the initial polygon.
///
/// CHP: `n` nodes `s_j = 2πj/n` on [0, 2π), `n` a multiple of M.
/// HHP: `n + 1` nodes `s_j = -L/2 + jL/n`, `n` a multiple of M.
/// A vertex node carries the bisector `(T_{k-1} + T_k) / 2cosh(ρ0/2)`, the
/// mean of its two sides pulled back onto H². Taking a one-sided value there
/// misplaces every jump by half a node, and the dispersive high modes turn
/// that into O(1) ripples along the sides. The two HHP end nodes keep the
/// tangent of the side they close.
pub fn sample_initial(spec: &PolygonSpec, n: usize) -> Result<CurveState> {
    let m = spec.m;
    if n == 0 || n % m != 0 {
        return Err(Error::BadDiscretization(format!("N = {n} must be a positive multiple of M = {m}")));
    }
    if n / m < 2 {
        return Err(Error::BadDiscretization(format!("N/M = {} leaves no interior nodes", n / m)));
    }
    let per_side = n / m;
    match spec.kind {
        PolygonKind::Chp => {
            let ds = 2.0 * PI / n as f64;
            let mut grid = Vec::with_capacity(n);
            let mut tangent = Vec::with_capacity(n);
            let mut position = Vec::with_capacity(n);
            for j in 0..n {
                let s = ds * j as f64;
                let k = (j / per_side) as i64;
                let offset = (j % per_side) as f64 * ds;
                grid.push(s);
                tangent.push(if j % per_side == 0 { spec.vertex_tangent(k) } else { spec.side_tangent(k) });
                position.push(spec.vertex(k) + spec.side_tangent(k) * offset);
            }
            Ok(CurveState { grid, tangent, position, time: 0.0, boundary: Boundary::Periodic2Pi })
        }
        PolygonKind::Hhp => {
            let length = spec.domain_length();
            let ds = length / n as f64;
            let half_sides = (m / 2) as i64;
            let mut grid = Vec::with_capacity(n + 1);
            let mut tangent = Vec::with_capacity(n + 1);
            let mut position = Vec::with_capacity(n + 1);
            for j in 0..=n {
                let s = -0.5 * length + ds * j as f64;
                let jj = j.min(n - 1);
                let k = (jj / per_side) as i64 - half_sides;
                let offset = (j - (jj / per_side) * per_side) as f64 * ds;
                grid.push(s);
                let interior_vertex = j % per_side == 0 && j != 0 && j != n;
                tangent.push(if interior_vertex { spec.vertex_tangent(k) } else { spec.side_tangent(k) });
                position.push(spec.vertex(k) + spec.side_tangent(k) * offset);
            }
            Ok(CurveState { grid, tangent, position, time: 0.0, boundary: Boundary::FixedEnds })
        }
    }
}
