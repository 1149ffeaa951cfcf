//! Observables derived from evolved curves: the conserved product, center of
//! mass speeds, the trajectory of `X(0, t)`, Riemann-type comparison series
//! and Fourier fingerprints.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::gauss::gcd;
use crate::mink::MinkVec;
use crate::polygon::{PolygonKind, PolygonSpec};

/// `Π cosh(ρ/2)` over the given angles.
pub fn conserved_product(angles: &[f64]) -> f64 {
    angles.iter().map(|r| (0.5 * r).cosh()).product()
}

/// Least-squares line `y = slope x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len().min(y.len()) as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComFit {
    /// c_M (CHP, from −h1) or c_l (HHP, from h3).
    pub speed: f64,
    pub intercept: f64,
    /// Largest magnitude of the two transverse components over the record.
    pub transverse: f64,
}

/// Fits the axial speed of the center of mass `h(t)`.
pub fn com_track(com: &[(f64, MinkVec)], kind: PolygonKind) -> Result<ComFit> {
    if com.len() < 10 {
        return Err(Error::TooShort { len: com.len(), n_max: 10 });
    }
    let t: Vec<f64> = com.iter().map(|p| p.0).collect();
    let (axial, transverse): (Vec<f64>, f64) = match kind {
        PolygonKind::Chp => (
            com.iter().map(|p| -p.1.x1).collect(),
            com.iter().map(|p| p.1.x2.abs().max(p.1.x3.abs())).fold(0.0, f64::max),
        ),
        PolygonKind::Hhp => (
            com.iter().map(|p| p.1.x3).collect(),
            com.iter().map(|p| p.1.x1.abs().max(p.1.x2.abs())).fold(0.0, f64::max),
        ),
    };
    let (speed, intercept) = linear_fit(&t, &axial);
    Ok(ComFit { speed, intercept, transverse })
}

/// Recurrence period of `X(0, t)` for `θ0 = cπ/d`: `(d/2) T_f` if `cd` is odd, `d T_f` otherwise.
pub fn period_cd(c: u64, d: u64, t_f: f64) -> Result<f64> {
    if c == 0 || d == 0 || gcd(c, d) != 1 {
        return Err(Error::InvalidTime(format!("(c, d) = ({c}, {d}) must be coprime and positive")));
    }
    Ok(if (c * d) % 2 == 1 { 0.5 * d as f64 * t_f } else { d as f64 * t_f })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTransforms {
    pub times: Vec<f64>,
    pub r: Vec<f64>,
    /// Continuous branch.
    pub nu: Vec<f64>,
    /// `X1 + c_M t` (CHP) or `X3 − c_l t` (HHP).
    pub axial: Vec<f64>,
}

/// Polar form of `X(0, t)` about the polygon axis and the axial component with
/// the mean drift removed.
pub fn trajectory_transforms(trace: &[(f64, MinkVec)], spec: &PolygonSpec, speed: f64) -> Result<TrajectoryTransforms> {
    let times: Vec<f64> = trace.iter().map(|p| p.0).collect();
    let mut r = Vec::with_capacity(trace.len());
    let mut nu = Vec::with_capacity(trace.len());
    let mut axial = Vec::with_capacity(trace.len());
    match spec.kind {
        PolygonKind::Chp => {
            let mut prev: Option<f64> = None;
            for &(t, x) in trace {
                r.push(x.x2.hypot(x.x3));
                let mut a = x.x3.atan2(x.x2);
                if let Some(p) = prev {
                    a += 2.0 * PI * ((p - a) / (2.0 * PI)).round();
                }
                prev = Some(a);
                nu.push(a);
                axial.push(x.x1 + speed * t);
            }
        }
        PolygonKind::Hhp => {
            for &(t, x) in trace {
                let ratio = x.x1 / x.x2;
                if !(ratio.abs() < 1.0) {
                    return Err(Error::DomainError(format!(
                        "X1/X2 = {ratio} at t = {t} leaves (-1, 1); X(0, t) is not space-like about the axis"
                    )));
                }
                r.push((x.x2 * x.x2 - x.x1 * x.x1).sqrt());
                nu.push(ratio.atanh());
                axial.push(x.x3 - speed * t);
            }
        }
    }
    Ok(TrajectoryTransforms { times, r, nu, axial })
}

/// `A_{c,d} ∩ [1, n_max]`: `n(nd + c)/2` if `cd` is odd, `n(nd + c)` otherwise, `n ∈ Z`.
pub fn dominating_set_cd(c: u64, d: u64, n_max: u64) -> Vec<u64> {
    let (c, d) = (c as i64, d as i64);
    let div = if (c * d) % 2 == 1 { 2 } else { 1 };
    let mut out = BTreeSet::new();
    for sign in [1i64, -1] {
        let mut n = sign;
        loop {
            let v = n * (n * d + c);
            if v > 0 && v / div > n_max as i64 && n.abs() > 1 + c / d.max(1) {
                break;
            }
            if v > 0 && (v / div) as u64 <= n_max {
                out.insert((v / div) as u64);
            }
            n += sign;
            if n.unsigned_abs() > 4 * n_max + 8 {
                break;
            }
        }
    }
    out.into_iter().collect()
}

/// `A_M ∩ [1, n_max]` with `A_M = {1} ∪ {nM ± 1 : n ≥ 1}`.
pub fn dominating_set_m(m: u64, n_max: u64) -> Vec<u64> {
    let mut out = BTreeSet::new();
    if n_max >= 1 {
        out.insert(1);
    }
    let mut n = 1;
    while n * m - 1 <= n_max {
        out.insert(n * m - 1);
        if n * m + 1 <= n_max {
            out.insert(n * m + 1);
        }
        n += 1;
    }
    out.into_iter().collect()
}

/// First `count` members of `A_{c,d}`.
fn first_members_cd(c: u64, d: u64, count: usize) -> Vec<u64> {
    let mut n_max = 16u64;
    loop {
        let set = dominating_set_cd(c, d, n_max);
        if set.len() >= count {
            return set[..count].to_vec();
        }
        n_max *= 4;
    }
}

/// `φ_{c,d}(t) = Σ_{k ∈ A_{c,d}} e^{2πikt}/k` over the first `terms` members.
pub fn riemann_variant_cd(c: u64, d: u64, terms: usize, t_grid: &[f64]) -> Vec<Complex64> {
    let ks = first_members_cd(c, d, terms);
    t_grid
        .iter()
        .map(|&t| ks.iter().map(|&k| Complex64::from_polar(1.0 / k as f64, 2.0 * PI * ((k as f64 * t) % 1.0))).sum())
        .collect()
}

/// `φ_M(t) = Σ_{k ∈ A_M} e^{2πik²t}/k²` over the first `terms` members.
pub fn riemann_variant_m(m: u64, terms: usize, t_grid: &[f64]) -> Vec<Complex64> {
    let ks = dominating_set_m(m, m * terms as u64 + 1);
    let ks = &ks[..terms.min(ks.len())];
    t_grid
        .iter()
        .map(|&t| {
            ks.iter()
                .map(|&k| {
                    let k2 = (k * k) as f64;
                    Complex64::from_polar(1.0 / k2, 2.0 * PI * ((k2 * t) % 1.0))
                })
                .sum()
        })
        .collect()
}

/// Fourier coefficients `b_n = (1/N) Σ_j v_j e^{−2πinj/N}` of one period
/// sampled at `N` equispaced points (the closing endpoint excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct FingerprintSeries {
    /// `coeffs[n - 1] = b_n`, n = 1..=n_max.
    pub coeffs: Vec<Complex64>,
    /// `b_{-n}`, used for complex series.
    pub negative: Vec<Complex64>,
    pub dominating: Vec<usize>,
    /// Factor the series was multiplied by before transforming.
    pub scale: f64,
    /// Σ|v|²/N and Σ over the full spectrum of |b|², for Parseval checks.
    pub energy: (f64, f64),
}

impl FingerprintSeries {
    /// `n |b_n|` for n = 1..=n_max.
    pub fn weighted(&self) -> Vec<f64> {
        self.coeffs.iter().enumerate().map(|(i, b)| (i + 1) as f64 * b.norm()).collect()
    }

    /// `n Im b_n`.
    pub fn weighted_imag(&self) -> Vec<f64> {
        self.coeffs.iter().enumerate().map(|(i, b)| (i + 1) as f64 * b.im).collect()
    }
}

/// Fraction of the median of the top decile of `n|b_n|` above which an index counts as dominating.
pub const DOMINATING_FRACTION: f64 = 0.5;

/// Indices (1-based) whose weight exceeds `fraction` times the median of the
/// top decile. A floor at 1e-3 of the peak keeps roundoff out when the
/// spectrum has fewer lines than a decile.
pub fn detect_dominating(weights: &[f64], fraction: f64) -> Vec<usize> {
    if weights.is_empty() {
        return Vec::new();
    }
    let mut sorted = weights.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let top = &sorted[..weights.len().div_ceil(10)];
    let median = top[top.len() / 2];
    let cut = (fraction * median).max(1e-3 * sorted[0]);
    weights.iter().enumerate().filter(|(_, &w)| w > cut).map(|(i, _)| i + 1).collect()
}

pub fn fingerprint_complex(values: &[Complex64], n_max: usize, scale: f64) -> Result<FingerprintSeries> {
    let n = values.len();
    if n < 2 * n_max + 1 || n_max == 0 {
        return Err(Error::TooShort { len: n, n_max });
    }
    let mut buf: Vec<Complex64> = values.iter().map(|v| v * scale).collect();
    let time_energy = buf.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let inv = 1.0 / n as f64;
    buf.iter_mut().for_each(|b| *b *= inv);
    let freq_energy = buf.iter().map(|b| b.norm_sqr()).sum::<f64>();
    let coeffs = buf[1..=n_max].to_vec();
    let negative = (1..=n_max).map(|k| buf[n - k]).collect();
    let mut fp = FingerprintSeries {
        coeffs,
        negative,
        dominating: Vec::new(),
        scale,
        energy: (time_energy, freq_energy),
    };
    fp.dominating = detect_dominating(&fp.weighted(), DOMINATING_FRACTION);
    Ok(fp)
}

/// Fingerprint of a real periodic series.
pub fn fingerprint(values: &[f64], n_max: usize, scale: f64) -> Result<FingerprintSeries> {
    let z: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fingerprint_complex(&z, n_max, scale)
}

/// Least-squares factor λ minimizing `|λ (x − x̄) − (r − r̄)|²`.
pub fn scale_to_reference(values: &[f64], reference: &[f64]) -> f64 {
    let n = values.len().min(reference.len());
    let mx = values[..n].iter().sum::<f64>() / n as f64;
    let mr = reference[..n].iter().sum::<f64>() / n as f64;
    let (mut xr, mut xx) = (0.0, 0.0);
    for (x, r) in values[..n].iter().zip(&reference[..n]) {
        xr += (x - mx) * (r - mr);
        xx += (x - mx) * (x - mx);
    }
    if xx > 0.0 { xr / xx } else { 0.0 }
}

/// One row of a limit-conjecture report.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitRow {
    pub index: usize,
    /// `n|b_n|` along the parameter sequence.
    pub values: Vec<f64>,
    /// `|value − target|` never increases along the sequence.
    pub monotone: bool,
    pub final_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub target: f64,
    pub rows: Vec<LimitRow>,
}

impl LimitReport {
    pub fn all_monotone(&self) -> bool {
        self.rows.iter().all(|r| r.monotone)
    }

    pub fn max_final_error(&self) -> f64 {
        self.rows.iter().map(|r| r.final_error).fold(0.0, f64::max)
    }
}

/// Tracks `n|b_n|` on `indices` across fingerprints ordered toward the limit.
pub fn limit_conjecture_check(fingerprints: &[FingerprintSeries], indices: &[usize], target: f64) -> Result<LimitReport> {
    if fingerprints.len() < 3 {
        return Err(Error::TooShort { len: fingerprints.len(), n_max: 3 });
    }
    let mut rows = Vec::new();
    for &index in indices {
        let values: Vec<f64> = fingerprints
            .iter()
            .map(|fp| fp.coeffs.get(index - 1).map_or(f64::NAN, |b| index as f64 * b.norm()))
            .collect();
        let errs: Vec<f64> = values.iter().map(|v| (v - target).abs()).collect();
        let monotone = errs.windows(2).all(|w| w[1] <= w[0] + 1e-15);
        rows.push(LimitRow { index, monotone, final_error: *errs.last().unwrap_or(&f64::NAN), values });
    }
    Ok(LimitReport { target, rows })
}

/// Affine fit of ν(t); `|slope|` is compared with b.
pub fn nu_linear_fit(times: &[f64], nu: &[f64]) -> (f64, f64) {
    linear_fit(times, nu)
}

/// `(T2, T3) / (1 + T1)`, mapping H² into the unit disk.
pub fn stereographic(t: MinkVec) -> (f64, f64) {
    let d = 1.0 + t.x1;
    (t.x2 / d, t.x3 / d)
}

/// `z(t) = (−X2 + i X3)/(1 + X̃1)` with `X̃1 = X1 + c_M t`, rotated clockwise by `π/2 − π/M`.
pub fn z_projection(trace: &[(f64, MinkVec)], spec: &PolygonSpec, speed: f64) -> Vec<Complex64> {
    let rot = Complex64::from_polar(1.0, -(0.5 * PI - PI / spec.m as f64));
    trace
        .iter()
        .map(|&(t, x)| {
            let d = 1.0 + x.x1 + speed * t;
            Complex64::new(-x.x2 / d, x.x3 / d) * rot
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffineFit {
    pub lambda: Complex64,
    pub mu: Complex64,
    /// `max |φ − λz − μ|`.
    pub max_abs: f64,
    /// `max |(φ − λz − μ)/φ|`.
    pub max_rel: f64,
}

/// Complex least squares `φ ≈ λ z + μ` on a common grid.
pub fn affine_fit(phi: &[Complex64], z: &[Complex64]) -> AffineFit {
    let n = phi.len().min(z.len());
    let inv = 1.0 / n as f64;
    let mz: Complex64 = z[..n].iter().sum::<Complex64>() * inv;
    let mp: Complex64 = phi[..n].iter().sum::<Complex64>() * inv;
    let (mut zz, mut zp) = (0.0, Complex64::new(0.0, 0.0));
    for (a, p) in z[..n].iter().zip(&phi[..n]) {
        let dz = a - mz;
        zz += dz.norm_sqr();
        zp += dz.conj() * (p - mp);
    }
    let lambda = if zz > 0.0 { zp / zz } else { Complex64::new(0.0, 0.0) };
    let mu = mp - lambda * mz;
    let (mut max_abs, mut max_rel) = (0.0f64, 0.0f64);
    for (a, p) in z[..n].iter().zip(&phi[..n]) {
        let e = (p - lambda * a - mu).norm();
        max_abs = max_abs.max(e);
        max_rel = max_rel.max(e / p.norm());
    }
    AffineFit { lambda, mu, max_abs, max_rel }
}

/// z-projection of a CHP trace over `[0, 2π]` compared with `φ_M` on `[0, 1]`.
pub fn z_projection_and_fit(trace: &[(f64, MinkVec)], spec: &PolygonSpec, speed: f64, terms: usize) -> (Vec<Complex64>, AffineFit) {
    let z = z_projection(trace, spec, speed);
    let t_grid: Vec<f64> = trace.iter().map(|p| p.0 / (2.0 * PI)).collect();
    let phi = riemann_variant_m(spec.m as u64, terms, &t_grid);
    let fit = affine_fit(&phi, &z);
    (z, fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn products() {
        let chp = PolygonSpec::chp(6, 1.2).unwrap();
        assert!((conserved_product(&[chp.rho0; 6]) - 1.367631).abs() < 5e-7);
        let hhp = PolygonSpec::hhp(48, 0.2, 0.4).unwrap();
        assert!((conserved_product(&[hhp.rho0; 24]) - 1.1490).abs() < 5e-5);
    }

    #[test]
    fn com_of_straight_line_is_still() {
        let com: Vec<(f64, MinkVec)> = (0..20).map(|j| (j as f64 * 0.1, MinkVec::new(3.0, 0.0, 0.0))).collect();
        let fit = com_track(&com, PolygonKind::Chp).unwrap();
        assert_eq!(fit.speed, 0.0);
        assert!(com_track(&com[..5], PolygonKind::Chp).is_err());
        let moving: Vec<(f64, MinkVec)> = (0..20).map(|j| (j as f64, MinkVec::new(0.0, 0.0, 0.5 * j as f64))).collect();
        assert!((com_track(&moving, PolygonKind::Hhp).unwrap().speed - 0.5).abs() < 1e-14);
    }

    #[test]
    fn periods() {
        let tf = 2.0 * PI / 36.0;
        assert_eq!(period_cd(1, 1, tf).unwrap(), 0.5 * tf);
        assert_eq!(period_cd(2, 5, tf).unwrap(), 5.0 * tf);
        assert_eq!(period_cd(1, 4, tf).unwrap(), 4.0 * tf);
        assert!(period_cd(2, 4, tf).is_err());
    }

    #[test]
    fn dominating_sets() {
        assert_eq!(dominating_set_cd(2, 5, 60), vec![3, 7, 16, 24, 39, 51]);
        assert_eq!(dominating_set_cd(1, 1, 30), vec![1, 3, 6, 10, 15, 21, 28]);
        assert_eq!(dominating_set_m(6, 14), vec![1, 5, 7, 11, 13]);
        let odd: Vec<u64> = (1..=41).step_by(2).collect();
        assert_eq!(dominating_set_m(4, 41), odd);
        assert_eq!(dominating_set_m(4, 0), Vec::<u64>::new());
    }

    #[test]
    fn riemann_variants() {
        let grid: Vec<f64> = (0..256).map(|j| j as f64 / 256.0).collect();
        for k in [1, 5, 40] {
            let phi = riemann_variant_cd(2, 5, k, &grid);
            let mean: Complex64 = phi.iter().sum::<Complex64>() / 256.0;
            assert!(mean.norm() < 1e-12);
        }
        let ks = dominating_set_m(6, 6 * 8 + 1);
        let want: f64 = ks[..8].iter().map(|&k| 1.0 / (k * k) as f64).sum();
        let at0 = riemann_variant_m(6, 8, &[0.0, 1.0]);
        assert!((at0[0].re - want).abs() < 1e-15 && at0[0].im == 0.0);
        assert!((at0[1] - at0[0]).norm() < 1e-12);
    }

    #[test]
    fn calibration_tone() {
        let n = 1024;
        for m in [1usize, 3, 17] {
            let v: Vec<f64> = (0..n).map(|j| (2.0 * PI * (m * j) as f64 / n as f64).sin() / m as f64).collect();
            let fp = fingerprint(&v, 60, 1.0).unwrap();
            for (i, w) in fp.weighted().iter().enumerate() {
                let want = if i + 1 == m { 0.5 } else { 0.0 };
                assert!((w - want).abs() < 1e-10, "m={m} n={}: {w}", i + 1);
            }
            assert_eq!(fp.dominating, vec![m]);
            assert!((fp.energy.0 - fp.energy.1).abs() < 1e-8 * fp.energy.0);
        }
        assert!(fingerprint(&[0.0; 50], 30, 1.0).is_err());
    }

    #[test]
    fn exact_riemann_input_hits_the_limits() {
        // Im φ_{c,d} on one period: n|b_n| = 1/2 exactly on A_{c,d}
        let n = 4096;
        let grid: Vec<f64> = (0..n).map(|j| j as f64 / n as f64).collect();
        let mut fps = Vec::new();
        for terms in [3usize, 5, 8] {
            let v: Vec<f64> = riemann_variant_cd(2, 5, terms, &grid).iter().map(|z| z.im).collect();
            fps.push(fingerprint(&v, 60, 1.0).unwrap());
        }
        let set: Vec<usize> = dominating_set_cd(2, 5, 51).iter().map(|&k| k as usize).collect();
        let last = fps.last().unwrap();
        assert_eq!(last.dominating, vec![3, 7, 16, 24, 39, 51]);
        let report = limit_conjecture_check(&fps, &set[..3], 0.5).unwrap();
        assert!(report.max_final_error() < 1e-12 && report.all_monotone());
        assert!(limit_conjecture_check(&fps[..2], &set, 0.5).is_err());
    }

    #[test]
    fn scale_recovers_factor() {
        let r: Vec<f64> = (0..100).map(|j| (j as f64 * 0.1).sin()).collect();
        let x: Vec<f64> = r.iter().map(|v| 4.0 + v / 2.5).collect();
        assert!((scale_to_reference(&x, &r) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn fits() {
        let t: Vec<f64> = (0..50).map(|j| j as f64 * 0.02).collect();
        let nu: Vec<f64> = t.iter().map(|s| -1.1 * s + 1.4).collect();
        let (m, c) = nu_linear_fit(&t, &nu);
        assert!((m + 1.1).abs() < 1e-12 && (c - 1.4).abs() < 1e-12);
        assert_eq!(nu_linear_fit(&t, &[2.0; 50]).0, 0.0);

        let grid: Vec<f64> = (0..300).map(|j| j as f64 / 300.0).collect();
        let phi = riemann_variant_m(4, 64, &grid);
        let (lam, mu) = (Complex64::new(0.3, -1.2), Complex64::new(0.1, 0.05));
        let z: Vec<Complex64> = phi.iter().map(|p| (p - mu) / lam).collect();
        let fit = affine_fit(&phi, &z);
        assert!((fit.lambda - lam).norm() < 1e-12 && (fit.mu - mu).norm() < 1e-12);
        assert!(fit.max_abs < 1e-12);
    }

    #[test]
    fn stereographic_examples() {
        assert_eq!(stereographic(MinkVec::E1), (0.0, 0.0));
        let e: f64 = 0.7;
        let (u, v) = stereographic(MinkVec::new(e.cosh(), e.sinh(), 0.0));
        assert!((u - (0.5 * e).tanh()).abs() < 1e-15 && v == 0.0);
    }

    #[test]
    fn hhp_transform_domain() {
        let hhp = PolygonSpec::hhp(8, 0.6, 0.4).unwrap();
        let good = [(0.0, MinkVec::new(0.1, 1.0, 0.0)), (1.0, MinkVec::new(0.2, 1.0, 0.5))];
        let tr = trajectory_transforms(&good, &hhp, 0.5).unwrap();
        assert_eq!(tr.axial, vec![0.0, 0.0]);
        assert!((tr.nu[0] - 0.1f64.atanh()).abs() < 1e-15);
        let bad = [(0.0, MinkVec::new(2.0, 1.0, 0.0))];
        assert!(matches!(trajectory_transforms(&bad, &hhp, 0.5), Err(Error::DomainError(_))));
    }

    #[test]
    fn chp_nu_is_unwrapped() {
        let chp = PolygonSpec::chp(6, 1.2).unwrap();
        let trace: Vec<(f64, MinkVec)> =
            (0..200).map(|j| (j as f64, MinkVec::new(-0.1 * j as f64, (0.1 * j as f64).cos(), (0.1 * j as f64).sin()))).collect();
        let tr = trajectory_transforms(&trace, &chp, 0.1).unwrap();
        assert!(tr.axial.iter().all(|a| a.abs() < 1e-12));
        for (j, nu) in tr.nu.iter().enumerate() {
            assert!((nu - 0.1 * j as f64).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1_000_000))]
        #[test]
        fn stereographic_lands_in_disk(a in -8.0..8.0f64, b in -8.0..8.0f64) {
            let t = MinkVec::new((1.0 + a * a + b * b).sqrt(), a, b);
            let (u, v) = stereographic(t);
            prop_assert!(u * u + v * v < 1.0);
        }
    }

    proptest! {
        #[test]
        fn cd_membership(c in 1u64..8, d in 1u64..12) {
            prop_assume!(gcd(c, d) == 1);
            let n_max = 2000;
            let set = dominating_set_cd(c, d, n_max);
            prop_assert!(set.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(&dominating_set_cd(c, d, n_max), &set);
            let div = if (c * d) % 2 == 1 { 2 } else { 1 };
            for n in -50i64..=50 {
                let v = n * (n * d as i64 + c as i64) / div;
                if v >= 1 && v as u64 <= n_max {
                    prop_assert!(set.binary_search(&(v as u64)).is_ok());
                }
            }
            for &k in &set {
                let hit = (-200i64..=200).any(|n| n * (n * d as i64 + c as i64) / div == k as i64 && n * (n * d as i64 + c as i64) % div == 0);
                prop_assert!(hit);
            }
        }
    }
}
