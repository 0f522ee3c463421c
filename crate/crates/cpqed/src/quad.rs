//! Quadrature toolkit: Gauss-Legendre nodes, adaptive Gauss-Kronrod (21 point),
//! fixed panel rules, principal values, polynomial extrapolation and Brent roots.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::{Error, Result};

/// Tolerances and the damping ladder (multipliers of `1/r` for σ, plain values
/// for the dimensionless double integrals).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub damping: Vec<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
            damping: vec![1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0],
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol >= 0.0) || self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter("bad quadrature tolerances".into()));
        }
        if self.damping.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::InvalidParameter("damping values must be > 0".into()));
        }
        let mut d = self.damping.clone();
        d.sort_by(|a, b| b.total_cmp(a));
        d.dedup();
        if d.len() != self.damping.len() {
            return Err(Error::InvalidParameter("damping ladder has repeated values".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate { value: self.value + o.value, err: self.err + o.err }
    }
}

impl Estimate {
    pub fn scale(self, s: f64) -> Estimate {
        Estimate { value: self.value * s, err: self.err * s.abs() }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208980515620,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651146,
];

/// One 21-point Kronrod panel with the embedded 10-point Gauss error estimate.
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[10];
    let mut rg = 0.0;
    for j in 0..10 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    Estimate { value: rk * h, err: ((rk - rg) * h).abs() }
}

/// Nodes, Kronrod weights and Gauss weights (zero off the Gauss nodes) of
/// `n_panels` equal GK21 panels on [a, b].
pub fn gk21_panel_rule(a: f64, b: f64, n_panels: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let cap = 21 * n_panels;
    let (mut x, mut wk, mut wg) = (Vec::with_capacity(cap), Vec::with_capacity(cap), Vec::with_capacity(cap));
    let width = (b - a) / n_panels as f64;
    for p in 0..n_panels {
        let lo = a + width * p as f64;
        let c = lo + 0.5 * width;
        let h = 0.5 * width;
        for j in 0..10 {
            let g = if j % 2 == 1 { WG[j / 2] * h } else { 0.0 };
            x.push(c - h * XGK[j]);
            wk.push(WGK[j] * h);
            wg.push(g);
        }
        x.push(c);
        wk.push(WGK[10] * h);
        wg.push(0.0);
        for j in (0..10).rev() {
            let g = if j % 2 == 1 { WG[j / 2] * h } else { 0.0 };
            x.push(c + h * XGK[j]);
            wk.push(WGK[j] * h);
            wg.push(g);
        }
    }
    (x, wk, wg)
}

struct Seg {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Seg {
    fn eq(&self, o: &Self) -> bool {
        self.est.err == o.est.err
    }
}
impl Eq for Seg {}
impl PartialOrd for Seg {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Seg {
    fn cmp(&self, o: &Self) -> Ordering {
        self.est.err.total_cmp(&o.est.err)
    }
}

/// Globally adaptive GK21 on a finite interval. Returns the best estimate even
/// when the tolerance is missed; callers decide whether that is fatal.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cfg: &QuadratureConfig) -> Estimate {
    if a == b {
        return Estimate { value: 0.0, err: 0.0 };
    }
    let first = gk21(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Seg { a, b, est: first });
    let (mut total, mut err) = (first.value, first.err);
    let mut n = 1;
    while err > cfg.abs_tol.max(cfg.rel_tol * total.abs()) && n < cfg.max_subdivisions {
        let Some(s) = heap.pop() else { break };
        let m = 0.5 * (s.a + s.b);
        if !(m > s.a.min(s.b) && m < s.a.max(s.b)) {
            heap.push(s);
            break;
        }
        let l = gk21(f, s.a, m);
        let r = gk21(f, m, s.b);
        total += l.value + r.value - s.est.value;
        err += l.err + r.err - s.est.err;
        heap.push(Seg { a: s.a, b: m, est: l });
        heap.push(Seg { a: m, b: s.b, est: r });
        n += 1;
    }
    // re-sum in a fixed order so the result does not depend on heap history
    let mut segs: Vec<Seg> = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = pairwise_sum(&segs.iter().map(|s| s.est.value).collect::<Vec<_>>());
    let err = segs.iter().map(|s| s.est.err).sum();
    Estimate { value, err }
}

/// Adaptive integration with a convergence check.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    let e = adaptive(f, a, b, cfg);
    check(e, cfg)
}

pub fn check(e: Estimate, cfg: &QuadratureConfig) -> Result<Estimate> {
    let tol = cfg.abs_tol.max(cfg.rel_tol * e.value.abs());
    if e.err <= tol && e.value.is_finite() {
        Ok(e)
    } else {
        Err(Error::Quadrature { value: e.value, err: e.err, tol })
    }
}

/// ∫_a^∞ via x = a + s t/(1-t); `scale` sets where the bulk of the integrand lives.
pub fn integrate_to_inf<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    scale: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let u = 1.0 - t;
        let x = a + scale * t / u;
        let v = f(x) * scale / (u * u);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(&g, 0.0, 1.0, cfg)
}

/// Sum of adaptive integrals over equal panels of at most `width`.
pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    width: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    if b <= a {
        return Ok(Estimate { value: 0.0, err: 0.0 });
    }
    let n = ((b - a) / width).ceil().max(1.0) as usize;
    let w = (b - a) / n as f64;
    let local = QuadratureConfig { abs_tol: cfg.abs_tol / n as f64, ..cfg.clone() };
    let parts: Vec<Estimate> =
        (0..n).map(|p| adaptive(f, a + w * p as f64, a + w * (p + 1) as f64, &local)).collect();
    let value = pairwise_sum(&parts.iter().map(|e| e.value).collect::<Vec<_>>());
    let err = parts.iter().map(|e| e.err).sum();
    check(Estimate { value, err }, cfg)
}

/// Principal value of ∫_0^∞ φ(x)/(x² - a²) dx by subtracting φ(a) on [0, 2a]:
/// `∫_0^{2a} (φ(x) - φ(a))/(x² - a²) + φ(a) ln(1/3)/(2a) + ∫_{2a}^∞ φ/(x² - a²)`.
/// `tail` integrates φ/(x² - a²) on [2a, ∞) and is supplied by the caller since
/// its shape (oscillatory, cut off, damped) differs per use.
pub fn pv_subtracted<F, T>(phi: &F, a: f64, width: f64, cfg: &QuadratureConfig, tail: T) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
    T: FnOnce(f64) -> Result<Estimate>,
{
    if a <= 0.0 {
        return tail(0.0);
    }
    let pa = phi(a);
    let g = |x: f64| {
        let d = x * x - a * a;
        if d == 0.0 {
            0.0
        } else {
            (phi(x) - pa) / d
        }
    };
    let lo = integrate_panels(&g, 0.0, a, width, cfg)?;
    let hi = integrate_panels(&g, a, 2.0 * a, width, cfg)?;
    let log_part = pa * (1.0f64 / 3.0).ln() / (2.0 * a);
    let t = tail(2.0 * a)?;
    Ok(lo + hi + t + Estimate { value: log_part, err: 0.0 })
}

/// Neville extrapolation of samples `(h_i, v_i)` to h = 0. The error estimate
/// is the change against the extrapolation that drops the coarsest sample.
pub fn extrapolate_to_zero(h: &[f64], v: &[f64]) -> Estimate {
    assert_eq!(h.len(), v.len());
    assert!(!h.is_empty());
    let full = neville0(h, v);
    let err = if h.len() > 1 {
        let mut idx: Vec<usize> = (0..h.len()).collect();
        idx.sort_by(|&i, &j| h[j].total_cmp(&h[i]));
        let rest: Vec<usize> = idx[1..].to_vec();
        let hh: Vec<f64> = rest.iter().map(|&i| h[i]).collect();
        let vv: Vec<f64> = rest.iter().map(|&i| v[i]).collect();
        (full - neville0(&hh, &vv)).abs()
    } else {
        f64::INFINITY
    };
    Estimate { value: full, err }
}

fn neville0(h: &[f64], v: &[f64]) -> f64 {
    let n = h.len();
    let mut p = v.to_vec();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
        }
    }
    p[0]
}

/// Pairwise (cascade) summation in a fixed tree order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let m = v.len() / 2;
    pairwise_sum(&v[..m]) + pairwise_sum(&v[m..])
}

/// Brent's method on a bracketing interval.
pub fn brent<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootFinding(format!("no sign change on [{a}, {b}]")));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::RootFinding("Brent iteration limit".into()))
}
