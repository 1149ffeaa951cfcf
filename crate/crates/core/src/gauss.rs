//! Rational times, quadratic Gauss sums and the Dirac comb they produce.
//!
//! At `t_pq = T_f p/q` the filament function of a helical polygon is a comb of
//! Dirac deltas on the lattice `s_pq + j l/q`. The coefficient at lattice
//! index `j` is `(c_{θ,0}/q) G(-p, j, q) e^{iθ0 j/q}` times a global phase
//! `e^{iθ0² p/(2πq)}`, where `G(a, b, c) = Σ_{m<c} e^{2πi(am² + bm)/c}`.
//! For even `q` half of the lattice carries zero weight.

use core::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::polygon::PolygonSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    /// q even and q/2 even: weights on even lattice indices.
    QHalfEven,
    /// q even and q/2 odd: weights on odd lattice indices.
    QHalfOdd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalTime {
    pub p: u64,
    pub q: u64,
    pub parity: Parity,
    /// Physical time `T_f p / q`.
    pub t: f64,
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl RationalTime {
    pub fn new(p: u64, q: u64, t_f: f64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidTime("q must be positive".into()));
        }
        if gcd(p, q) != 1 {
            return Err(Error::InvalidTime(format!("gcd({p}, {q}) != 1")));
        }
        let parity = if q % 2 == 1 {
            Parity::Odd
        } else if (q / 2) % 2 == 0 {
            Parity::QHalfEven
        } else {
            Parity::QHalfOdd
        };
        Ok(RationalTime { p, q, parity, t: t_f * p as f64 / q as f64 })
    }

    pub fn for_spec(spec: &PolygonSpec, p: u64, q: u64) -> Result<Self> {
        Self::new(p, q, spec.t_f)
    }

    /// Number of new corners per original side: q (odd) or q/2 (even).
    pub fn corners_per_side(&self) -> u64 {
        match self.parity {
            Parity::Odd => self.q,
            _ => self.q / 2,
        }
    }

    /// Whether lattice index `j` carries a nonzero weight.
    pub fn is_corner(&self, j: i64) -> bool {
        match self.parity {
            Parity::Odd => true,
            Parity::QHalfEven => j.rem_euclid(2) == 0,
            Parity::QHalfOdd => j.rem_euclid(2) == 1,
        }
    }
}

/// `Σ_{m=0}^{c-1} exp(2πi (a m² + b m)/c)` by direct summation with exact
/// integer reduction of the exponent.
pub fn gauss_sum(a: i64, b: i64, c: u64) -> Complex64 {
    assert!(c >= 1, "gauss_sum needs c >= 1");
    let c = c as i128;
    let (a, b) = (a as i128, b as i128);
    (0..c)
        .map(|m| {
            let r = (a * m % c * m + b * m).rem_euclid(c);
            Complex64::from_polar(1.0, 2.0 * PI * r as f64 / c as f64)
        })
        .sum()
}

/// `G(-p, n, q)` for all `n = 0..q`, via one inverse DFT of `e^{-2πi p m²/q}`.
pub fn gauss_table(p: u64, q: u64) -> Vec<Complex64> {
    let qi = q as u128;
    let mut buf: Vec<Complex64> = (0..qi)
        .map(|m| {
            let r = (p as u128 % qi) * (m * m % qi) % qi;
            Complex64::from_polar(1.0, -2.0 * PI * r as f64 / q as f64)
        })
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(q as usize).process(&mut buf);
    buf
}

/// Lattice of corner positions and Dirac weights at one rational time.
#[derive(Debug, Clone)]
pub struct CornerLattice {
    pub spec: PolygonSpec,
    pub time: RationalTime,
    /// Galilean shift `s_pq`.
    pub shift: f64,
    /// Lattice spacing `l/q`.
    pub spacing: f64,
    /// Angle between adjacent sides at this time.
    pub rho_q: f64,
    /// Common modulus of the Dirac weights.
    pub c_theta_q: f64,
    pub global_phase: f64,
    table: Vec<Complex64>,
}

/// One period of the comb: positions, moduli and phases (global phase removed).
#[derive(Debug, Clone)]
pub struct DiracComb {
    pub positions: Vec<f64>,
    pub moduli: Vec<f64>,
    pub phases: Vec<f64>,
    /// `θ0² p / (2π q)`, stored apart from the per-delta phases.
    pub global_phase: f64,
    pub shift: f64,
}

pub fn galilean_shift(spec: &PolygonSpec, rt: &RationalTime) -> f64 {
    spec.l * spec.theta0 * rt.p as f64 / (PI * rt.q as f64)
}

/// Corner angle at any time with denominator `q`, from
/// `cosh(ρ_q/2) = cosh(ρ0/2)^{1/q}` (q odd) or `^{2/q}` (q even).
pub fn rho_q(rho0: f64, q: u64) -> f64 {
    let div = if q % 2 == 1 { q as f64 } else { q as f64 / 2.0 };
    let y = (0.5 * rho0).cosh().ln() / div;
    // acosh(e^y) without cancellation for tiny y
    let x = y.exp_m1();
    2.0 * (x + (x * (2.0 + x)).sqrt()).ln_1p()
}

pub fn c_theta_q(c_theta0: f64, q: u64) -> f64 {
    let div = if q % 2 == 1 { q as f64 } else { q as f64 / 2.0 };
    c_theta0 / div.sqrt()
}

impl CornerLattice {
    pub fn new(spec: &PolygonSpec, rt: RationalTime) -> Self {
        let q = rt.q;
        CornerLattice {
            spec: *spec,
            time: rt,
            shift: galilean_shift(spec, &rt),
            spacing: spec.l / q as f64,
            rho_q: rho_q(spec.rho0, q),
            c_theta_q: c_theta_q(spec.c_theta0, q),
            global_phase: spec.theta0 * spec.theta0 * rt.p as f64 / (2.0 * PI * q as f64),
            table: gauss_table(rt.p, q),
        }
    }

    pub fn position(&self, j: i64) -> f64 {
        self.shift + j as f64 * self.spacing
    }

    /// Weight at lattice index `j` without the global phase.
    pub fn weight(&self, j: i64) -> Complex64 {
        let q = self.time.q as i64;
        let g = self.table[j.rem_euclid(q) as usize];
        let scale = self.spec.c_theta0 / q as f64;
        g * scale * Complex64::from_polar(1.0, self.spec.theta0 * j as f64 / q as f64)
    }

    /// Phase ζ of the corner at lattice index `j`, as used for the frame rotation.
    pub fn phase(&self, j: i64) -> f64 {
        self.weight(j).arg()
    }

    /// Lattice indices of all corners with position in `[start, end)`.
    pub fn corners_in(&self, start: f64, end: f64) -> impl Iterator<Item = i64> + '_ {
        let lo = ((start - self.shift) / self.spacing).ceil() as i64;
        let lo = if self.position(lo - 1) >= start { lo - 1 } else { lo };
        let hi = ((end - self.shift) / self.spacing).ceil() as i64 + 1;
        (lo..hi).filter(move |&j| {
            let s = self.position(j);
            s >= start && s < end && self.time.is_corner(j)
        })
    }

    /// Corner gap in arclength: l/q (q odd) or 2l/q (q even).
    pub fn corner_gap(&self) -> f64 {
        match self.time.parity {
            Parity::Odd => self.spacing,
            _ => 2.0 * self.spacing,
        }
    }

    /// The comb over one spatial period: [s_pq, s_pq + 2π) for a CHP, or
    /// the truncated curve shifted by `s_pq` for an HHP.
    pub fn comb(&self) -> DiracComb {
        let start = match self.spec.kind {
            crate::polygon::PolygonKind::Chp => self.shift,
            crate::polygon::PolygonKind::Hhp => self.shift - 0.5 * self.spec.domain_length(),
        };
        let end = start + self.spec.domain_length() - 0.5 * self.spacing;
        let mut comb = DiracComb {
            positions: Vec::new(),
            moduli: Vec::new(),
            phases: Vec::new(),
            global_phase: self.global_phase,
            shift: self.shift,
        };
        for j in self.corners_in(start - 0.5 * self.spacing, end) {
            let w = self.weight(j);
            comb.positions.push(self.position(j));
            comb.moduli.push(w.norm());
            comb.phases.push(w.arg());
        }
        comb
    }
}

pub fn dirac_comb_at(spec: &PolygonSpec, rt: RationalTime) -> DiracComb {
    CornerLattice::new(spec, rt).comb()
}
