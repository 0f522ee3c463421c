//! Dressed resolvent `G_i`, the coupling function `σ_ℓ`, their ±iε branches and
//! the difference identities they satisfy.
//!
//! Sign convention: σ is the continuum integral
//! `σ_ℓ(k) = -(2/π) k0 μ1 μ2 ∫dk' 2k'⁴ h_ℓ(k'r)/(k'² - k²)`; the discrete sum with
//! the same sign is `σ_ℓ(z) = 2k0 Σ f¹f² (e^{iφ}/(z+k) - e^{-iφ}/(z-k))`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::model::{coupling_constant, ModeGrid, OscillatorPair, Osc};
use crate::quad::{extrapolate_to_zero, integrate_panels, integrate_to_inf, pv_subtracted, Estimate, QuadratureConfig};
use crate::specfun::{h_kernel, Axis};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CutoffKind {
    Exponential,
    Sharp,
}

/// UV regularization of the self-energy; `lambda` is in units of k0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffScheme {
    pub kind: CutoffKind,
    pub lambda: f64,
}

impl Default for CutoffScheme {
    fn default() -> Self {
        CutoffScheme { kind: CutoffKind::Exponential, lambda: 100.0 }
    }
}

impl CutoffScheme {
    pub fn new(kind: CutoffKind, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("cutoff lambda must be > 0, got {lambda}")));
        }
        Ok(CutoffScheme { kind, lambda })
    }

    pub fn factor(&self, k: f64, k0: f64) -> f64 {
        let l = self.lambda * k0;
        match self.kind {
            CutoffKind::Exponential => (-k / l).exp(),
            CutoffKind::Sharp => {
                if k < l {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// (∫c dk, ∫k² c dk).
    fn moments(&self, k0: f64) -> (f64, f64) {
        let l = self.lambda * k0;
        match self.kind {
            CutoffKind::Exponential => (l, 2.0 * l.powi(3)),
            CutoffKind::Sharp => (l, l.powi(3) / 3.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchedValue {
    pub value: C64,
    pub branch: Branch,
    pub err: f64,
}

/// Evaluation point: real wavenumber on a branch, or imaginary frequency iξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Freq {
    Real(f64, Branch),
    Imag(f64),
}

/// Anything that supplies `G_i⁻¹` and `σ_ℓ`: the continuum model or a finite grid.
pub trait Medium: Sync {
    fn pair(&self) -> &OscillatorPair;
    fn inv_g(&self, which: Osc, axis: Axis, w: Freq) -> Result<C64>;
    fn sigma(&self, axis: Axis, w: Freq) -> Result<C64>;
}

/// PV ∫_0^∞ c(k')/(k'² - k²) dk' for k > 0.
fn pv_cutoff(cutoff: &CutoffScheme, k: f64, k0: f64, quad: &QuadratureConfig) -> Result<Estimate> {
    let l = cutoff.lambda * k0;
    match cutoff.kind {
        CutoffKind::Sharp => {
            if (k - l).abs() <= 1e-12 * l {
                return Err(Error::Degenerate("k coincides with the sharp cutoff".into()));
            }
            Ok(Estimate { value: ((l - k) / (l + k)).abs().ln() / (2.0 * k), err: 0.0 })
        }
        CutoffKind::Exponential => {
            let c = |x: f64| (-x / l).exp();
            let tail = |a: f64| integrate_to_inf(&|x: f64| c(x) / (x * x - k * k), a, l, quad);
            pv_subtracted(&c, k, l.max(k), quad, tail)
        }
    }
}

/// Continuum `(G_i(k ± iε))⁻¹ = k0² - k² - (4/3π) k0 μ_i² ∫dk' 2k'⁴ c(k')/(k'² - k²)`.
pub fn inverse_g(
    pair: &OscillatorPair,
    which: Osc,
    k: f64,
    branch: Branch,
    cutoff: &CutoffScheme,
    quad: &QuadratureConfig,
) -> Result<BranchedValue> {
    if !(k >= 0.0) {
        return Err(Error::InvalidParameter(format!("k must be >= 0, got {k}")));
    }
    let k0 = pair.k0;
    let mu2 = pair.mu(which).powi(2);
    let free = k0 * k0 - k * k;
    if mu2 == 0.0 {
        return Ok(BranchedValue { value: C64::new(free, 0.0), branch, err: 0.0 });
    }
    // 2k'⁴/(k'² - k²) = 2k'² + 2k² + 2k⁴/(k'² - k²)
    let (m0, m2) = cutoff.moments(k0);
    let (pv, err) = if k > 0.0 {
        let p = pv_cutoff(cutoff, k, k0, quad)?;
        (p.value, p.err)
    } else {
        (0.0, 0.0)
    };
    let re = 2.0 * m2 + 2.0 * k * k * m0 + 2.0 * k.powi(4) * pv;
    let im = branch.sign() * PI * k.powi(3) * cutoff.factor(k, k0);
    let pre = 4.0 / (3.0 * PI) * k0 * mu2;
    Ok(BranchedValue {
        value: C64::new(free - pre * re, -pre * im),
        branch,
        err: pre * 2.0 * k.powi(4) * err,
    })
}

/// `G_i⁻¹(iξ)` on the imaginary axis (real valued).
pub fn inverse_g_imag(
    pair: &OscillatorPair,
    which: Osc,
    xi: f64,
    cutoff: &CutoffScheme,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let k0 = pair.k0;
    let mu2 = pair.mu(which).powi(2);
    let free = k0 * k0 + xi * xi;
    if mu2 == 0.0 {
        return Ok(free);
    }
    let (m0, m2) = cutoff.moments(k0);
    let l = cutoff.lambda * k0;
    // ∫ c/(k'² + ξ²)
    let w = if xi == 0.0 {
        0.0
    } else {
        match cutoff.kind {
            CutoffKind::Sharp => (l / xi).atan() / xi,
            CutoffKind::Exponential => {
                integrate_to_inf(&|x: f64| (-x / l).exp() / (x * x + xi * xi), 0.0, xi.min(l), quad)?.value
            }
        }
    };
    let q = 2.0 * m2 - 2.0 * xi * xi * m0 + 2.0 * xi.powi(4) * w;
    Ok(free - 4.0 / (3.0 * PI) * k0 * mu2 * q)
}

/// Abel-regularized moments (∫h_ℓ(x)dx, ∫x² h_ℓ(x)dx).
fn kernel_moments(axis: Axis) -> (f64, f64) {
    match axis {
        Axis::X | Axis::Y => (PI / 4.0, -PI / 2.0),
        Axis::Z => (PI / 2.0, PI),
    }
}

/// Damped PV ∫_0^∞ h_ℓ(x) e^{-dx}/(x² - a²) dx, a > 0.
fn sigma_pv_damped(axis: Axis, a: f64, d: f64, quad: &QuadratureConfig) -> Result<Estimate> {
    let phi = |x: f64| h_kernel(axis, x) * (-d * x).exp();
    let x_end = (2.0 * a).max(40.0 / d);
    let tail = |lo: f64| integrate_panels(&|x: f64| phi(x) / (x * x - a * a), lo, x_end.max(lo), PI, quad);
    pv_subtracted(&phi, a, PI, quad, tail)
}

/// `h_ℓ(x) = Re[e^{ix} q_ℓ(x)]` continued off the real axis.
fn kernel_envelope(axis: Axis, x: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    let (x1, x2, x3) = (x.inv(), x.inv().powi(2), x.inv().powi(3));
    match axis {
        Axis::X | Axis::Y => -i * x1 + i * x3 + x2,
        Axis::Z => 2.0 * (-i * x3 - x2),
    }
}

/// ∫_X^∞ h_ℓ(x)/(x² - a²) dx with the contour turned to x = X + iy.
fn sigma_tail_rotated(axis: Axis, a: f64, x0: f64, quad: &QuadratureConfig) -> Result<Estimate> {
    let i = C64::new(0.0, 1.0);
    let f = |y: f64| {
        let x = C64::new(x0, y);
        (i * C64::from_polar((-y).exp(), x0) * kernel_envelope(axis, x) / (x * x - a * a)).re
    };
    integrate_to_inf(&f, 0.0, 1.0, quad)
}

/// PV ∫_0^∞ h_ℓ(x)/(x² - a²) dx, a > 0, with the oscillatory tail beyond
/// max(2a, 1) integrated along the rotated contour.
fn sigma_pv(axis: Axis, a: f64, quad: &QuadratureConfig) -> Result<Estimate> {
    let phi = |x: f64| h_kernel(axis, x);
    let tail = |lo: f64| {
        let x0 = lo.max(1.0);
        let near = integrate_panels(&|x: f64| phi(x) / (x * x - a * a), lo, x0, PI, quad)?;
        Ok(near + sigma_tail_rotated(axis, a, x0, quad)?)
    };
    pv_subtracted(&phi, a, PI, quad, tail)
}

fn sigma_assemble(pair: &OscillatorPair, axis: Axis, k: f64, branch: Branch, p: Estimate) -> BranchedValue {
    let r = pair.r;
    let a = k * r;
    let (m0, m2) = kernel_moments(axis);
    let re = 2.0 * m2 + 2.0 * a * a * m0 + 2.0 * a.powi(4) * p.value;
    let im = branch.sign() * PI * a.powi(3) * h_kernel(axis, a);
    let pre = -2.0 / PI * pair.k0 * pair.mu1 * pair.mu2 / r.powi(3);
    BranchedValue { value: C64::new(pre * re, pre * im), branch, err: (pre * 2.0 * a.powi(4)).abs() * p.err }
}

fn check_k(k: f64) -> Result<()> {
    if !(k >= 0.0) {
        return Err(Error::InvalidParameter(format!("k must be >= 0, got {k}")));
    }
    Ok(())
}

/// Continuum `σ_ℓ(k ± iε, r)` by quadrature. In x = k'r the integrand splits
/// as `2x² + 2a² + 2a⁴/(x² - a²)`; the two polynomial moments are Abel sums,
/// the remainder is an absolutely convergent principal value whose oscillatory
/// tail is taken along a contour rotated into the upper half plane.
pub fn sigma(
    pair: &OscillatorPair,
    axis: Axis,
    k: f64,
    branch: Branch,
    quad: &QuadratureConfig,
) -> Result<BranchedValue> {
    check_k(k)?;
    if pair.mu1 * pair.mu2 == 0.0 {
        return Ok(BranchedValue { value: C64::new(0.0, 0.0), branch, err: 0.0 });
    }
    let a = k * pair.r;
    let p = if a > 0.0 { sigma_pv(axis, a, quad)? } else { Estimate { value: 0.0, err: 0.0 } };
    Ok(sigma_assemble(pair, axis, k, branch, p))
}

/// σ with the remainder damped by `e^{-ηx}` for each η of the ladder and
/// extrapolated to η = 0. Slower and less accurate than [`sigma`]; kept to
/// exhibit the Abel limit.
pub fn sigma_damped(
    pair: &OscillatorPair,
    axis: Axis,
    k: f64,
    branch: Branch,
    quad: &QuadratureConfig,
) -> Result<BranchedValue> {
    check_k(k)?;
    if pair.mu1 * pair.mu2 == 0.0 {
        return Ok(BranchedValue { value: C64::new(0.0, 0.0), branch, err: 0.0 });
    }
    if quad.damping.is_empty() {
        return Err(Error::InvalidParameter("damping ladder is empty".into()));
    }
    let a = k * pair.r;
    let p = if a > 0.0 {
        let vals = quad
            .damping
            .iter()
            .map(|&d| sigma_pv_damped(axis, a, d, quad).map(|e| e.value))
            .collect::<Result<Vec<f64>>>()?;
        extrapolate_to_zero(&quad.damping, &vals)
    } else {
        Estimate { value: 0.0, err: 0.0 }
    };
    Ok(sigma_assemble(pair, axis, k, branch, p))
}

/// Closed form of the Abel-regularized σ on the real axis.
pub fn sigma_closed(pair: &OscillatorPair, axis: Axis, k: f64, branch: Branch) -> C64 {
    let r = pair.r;
    let x = k * r;
    let e = C64::from_polar(1.0, x);
    let s = match axis {
        Axis::Z => 2.0 * PI * e * C64::new(1.0, -x),
        Axis::X | Axis::Y => -PI * e * C64::new(1.0 - x * x, -x),
    } / r.powi(3);
    let s = if branch == Branch::Plus { s } else { s.conj() };
    -2.0 / PI * pair.k0 * pair.mu1 * pair.mu2 * s
}

/// σ_ℓ(iξ) in closed form (real valued).
pub fn sigma_imag(pair: &OscillatorPair, axis: Axis, xi: f64) -> f64 {
    let r = pair.r;
    let s = xi * r;
    let v = match axis {
        Axis::Z => 2.0 * PI * (-s).exp() * (1.0 + s),
        Axis::X | Axis::Y => -PI * (-s).exp() * (1.0 + s + s * s),
    } / r.powi(3);
    -2.0 / PI * pair.k0 * pair.mu1 * pair.mu2 * v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SigmaEval {
    Quadrature,
    Closed,
}

/// The continuum model as a [`Medium`].
#[derive(Debug, Clone, PartialEq)]
pub struct Continuum {
    pub pair: OscillatorPair,
    pub cutoff: CutoffScheme,
    pub quad: QuadratureConfig,
    pub sigma_eval: SigmaEval,
}

impl Medium for Continuum {
    fn pair(&self) -> &OscillatorPair {
        &self.pair
    }

    fn inv_g(&self, which: Osc, _axis: Axis, w: Freq) -> Result<C64> {
        match w {
            Freq::Real(k, b) => Ok(inverse_g(&self.pair, which, k, b, &self.cutoff, &self.quad)?.value),
            Freq::Imag(xi) => Ok(C64::new(inverse_g_imag(&self.pair, which, xi, &self.cutoff, &self.quad)?, 0.0)),
        }
    }

    fn sigma(&self, axis: Axis, w: Freq) -> Result<C64> {
        match (w, self.sigma_eval) {
            (Freq::Real(k, b), SigmaEval::Quadrature) => Ok(sigma(&self.pair, axis, k, b, &self.quad)?.value),
            (Freq::Real(k, b), SigmaEval::Closed) => Ok(sigma_closed(&self.pair, axis, k, b)),
            (Freq::Imag(xi), _) => Ok(C64::new(sigma_imag(&self.pair, axis, xi), 0.0)),
        }
    }
}

/// Finite-grid sums for `G_i⁻¹` and `σ_ℓ`, with couplings precomputed.
#[derive(Debug, Clone)]
pub struct DiscreteMedium<'a> {
    pair: OscillatorPair,
    grid: &'a ModeGrid,
    /// g[i][ℓ][m] with f = -i g.
    g: [[Vec<f64>; 3]; 2],
    phase: Vec<f64>,
    k: Vec<f64>,
}

impl<'a> DiscreteMedium<'a> {
    pub fn new(pair: OscillatorPair, grid: &'a ModeGrid) -> Result<Self> {
        let mut g: [[Vec<f64>; 3]; 2] = Default::default();
        for i in Osc::BOTH {
            for l in Axis::ALL {
                g[i.index()][l.index()] = grid
                    .modes()
                    .iter()
                    .map(|m| coupling_constant(&pair, i, l, m, grid.volume()).map(|f| -f.im))
                    .collect::<Result<Vec<f64>>>()?;
            }
        }
        let phase = grid.modes().iter().map(|m| m.phase(pair.r)).collect();
        let k = grid.modes().iter().map(|m| m.k).collect();
        Ok(DiscreteMedium { pair, grid, g, phase, k })
    }

    pub fn grid(&self) -> &ModeGrid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn k(&self, m: usize) -> f64 {
        self.k[m]
    }

    pub fn phase(&self, m: usize) -> f64 {
        self.phase[m]
    }

    /// Real amplitude g with `f = -i g`.
    pub fn g(&self, which: Osc, axis: Axis, m: usize) -> f64 {
        self.g[which.index()][axis.index()][m]
    }

    pub fn f(&self, which: Osc, axis: Axis, m: usize) -> C64 {
        C64::new(0.0, -self.g(which, axis, m))
    }

    pub fn inv_g_z(&self, which: Osc, axis: Axis, z: C64) -> C64 {
        let g = &self.g[which.index()][axis.index()];
        let k0 = self.pair.k0;
        let mut s = C64::new(0.0, 0.0);
        for (gm, &km) in g.iter().zip(&self.k) {
            s += gm * gm * 2.0 * km / ((z - km) * (z + km));
        }
        k0 * k0 - z * z + 2.0 * k0 * s
    }

    pub fn sigma_z(&self, axis: Axis, z: C64) -> C64 {
        let (g1, g2) = (&self.g[0][axis.index()], &self.g[1][axis.index()]);
        let mut s = C64::new(0.0, 0.0);
        for m in 0..self.k.len() {
            let e = C64::from_polar(1.0, self.phase[m]);
            s += g1[m] * g2[m] * (e / (z + self.k[m]) - e.conj() / (z - self.k[m]));
        }
        -2.0 * self.pair.k0 * s
    }

    pub fn inv_g_dz(&self, which: Osc, axis: Axis, z: C64) -> C64 {
        let g = &self.g[which.index()][axis.index()];
        let k0 = self.pair.k0;
        let mut s = C64::new(0.0, 0.0);
        for (gm, &km) in g.iter().zip(&self.k) {
            let d = (z - km) * (z + km);
            s += gm * gm * (-4.0 * km) * z / (d * d);
        }
        -2.0 * z + 2.0 * k0 * s
    }

    pub fn sigma_dz(&self, axis: Axis, z: C64) -> C64 {
        let (g1, g2) = (&self.g[0][axis.index()], &self.g[1][axis.index()]);
        let mut s = C64::new(0.0, 0.0);
        for m in 0..self.k.len() {
            let e = C64::from_polar(1.0, self.phase[m]);
            let (a, b) = (z + self.k[m], z - self.k[m]);
            s += g1[m] * g2[m] * (-e / (a * a) + e.conj() / (b * b));
        }
        -2.0 * self.pair.k0 * s
    }
}

fn freq_z(w: Freq) -> C64 {
    match w {
        Freq::Real(k, _) => C64::new(k, 0.0),
        Freq::Imag(xi) => C64::new(0.0, xi),
    }
}

impl Medium for DiscreteMedium<'_> {
    fn pair(&self) -> &OscillatorPair {
        &self.pair
    }

    fn inv_g(&self, which: Osc, axis: Axis, w: Freq) -> Result<C64> {
        Ok(self.inv_g_z(which, axis, freq_z(w)))
    }

    fn sigma(&self, axis: Axis, w: Freq) -> Result<C64> {
        Ok(self.sigma_z(axis, freq_z(w)))
    }
}

/// Right-hand sides of the first pair of difference identities:
/// `(1/2k0)[(G⁻¹(k') - G⁻¹(k̃))/(k' - k̃) + (k' + k̃)]` and `(σ(k') - σ(k̃))/(2k0(k' - k̃))`.
pub fn identity_f1(
    medium: &dyn Medium,
    which: Osc,
    axis: Axis,
    kprime: f64,
    ktilde: f64,
    branch: Branch,
) -> Result<(C64, C64)> {
    if kprime == ktilde {
        return Err(Error::Coincident);
    }
    let k0 = medium.pair().k0;
    let (wp, wt) = (Freq::Real(kprime, branch), Freq::Real(ktilde, branch));
    let dg = medium.inv_g(which, axis, wp)? - medium.inv_g(which, axis, wt)?;
    let same = (dg / (kprime - ktilde) + (kprime + ktilde)) / (2.0 * k0);
    let cross = (medium.sigma(axis, wp)? - medium.sigma(axis, wt)?) / (2.0 * k0 * (kprime - ktilde));
    Ok((same, cross))
}

/// Right-hand sides of the k-weighted identities:
/// `k0/2 - [k'³ + k̃³ + k'G⁻¹(k') + k̃G⁻¹(k̃)]/(2k0(k' + k̃))` and
/// `-[k'σ(k') + k̃σ(k̃)]/(2k0(k' + k̃))`.
pub fn identity_f2(
    medium: &dyn Medium,
    which: Osc,
    axis: Axis,
    kprime: f64,
    ktilde: f64,
    branch: Branch,
) -> Result<(C64, C64)> {
    if kprime == ktilde {
        return Err(Error::Coincident);
    }
    let k0 = medium.pair().k0;
    let (wp, wt) = (Freq::Real(kprime, branch), Freq::Real(ktilde, branch));
    let den = 2.0 * k0 * (kprime + ktilde);
    let same = k0 / 2.0
        - (kprime.powi(3)
            + ktilde.powi(3)
            + kprime * medium.inv_g(which, axis, wp)?
            + ktilde * medium.inv_g(which, axis, wt)?)
            / den;
    let cross = -(kprime * medium.sigma(axis, wp)? + ktilde * medium.sigma(axis, wt)?) / den;
    Ok((same, cross))
}

/// `F⁽¹⁾_{k',k̃}(k)`.
pub fn f1_kernel(kprime: f64, ktilde: f64, k: f64) -> f64 {
    1.0 / ((kprime - k) * (ktilde - k)) - 1.0 / ((ktilde + k) * (kprime + k))
}

/// `F⁽²⁾_{k',k̃}(k)`.
pub fn f2_kernel(kprime: f64, ktilde: f64, k: f64) -> f64 {
    1.0 / ((kprime - k) * (ktilde + k)) + 1.0 / ((ktilde - k) * (kprime + k))
}

/// Continuum self-energies restricted to the band `k_min < k' < k_max` on the
/// imaginary axis: the limit of a shell grid covering that band.
#[derive(Debug, Clone, PartialEq)]
pub struct BandLimited {
    pub pair: OscillatorPair,
    pub k_min: f64,
    pub k_max: f64,
    pub quad: QuadratureConfig,
}

impl BandLimited {
    fn band(&self, xi: f64, h: impl Fn(f64) -> f64) -> Result<f64> {
        let f = |k: f64| 2.0 * k.powi(4) / (k * k + xi * xi) * h(k);
        let width = if self.pair.r > 0.0 { PI / self.pair.r } else { self.k_max - self.k_min };
        // absolute tolerance on the scale of the unsigned integrand
        let mag = 2.0 / 3.0 * (self.k_max.powi(3) - self.k_min.powi(3));
        let cfg = QuadratureConfig { abs_tol: self.quad.abs_tol.max(self.quad.rel_tol * mag), ..self.quad.clone() };
        Ok(integrate_panels(&f, self.k_min, self.k_max, width, &cfg)?.value)
    }
}

impl Medium for BandLimited {
    fn pair(&self) -> &OscillatorPair {
        &self.pair
    }

    fn inv_g(&self, which: Osc, _axis: Axis, w: Freq) -> Result<C64> {
        match w {
            Freq::Imag(xi) => {
                let k0 = self.pair.k0;
                let s = self.band(xi, |_| 1.0)?;
                Ok(C64::new(k0 * k0 + xi * xi - 4.0 / (3.0 * PI) * k0 * self.pair.mu(which).powi(2) * s, 0.0))
            }
            Freq::Real(..) => Err(Error::InvalidParameter("band-limited medium is defined on the imaginary axis".into())),
        }
    }

    fn sigma(&self, axis: Axis, w: Freq) -> Result<C64> {
        match w {
            Freq::Imag(xi) => {
                let r = self.pair.r;
                let s = self.band(xi, |k| h_kernel(axis, k * r))?;
                Ok(C64::new(-2.0 / PI * self.pair.k0 * self.pair.mu1 * self.pair.mu2 * s, 0.0))
            }
            Freq::Real(..) => Err(Error::InvalidParameter("band-limited medium is defined on the imaginary axis".into())),
        }
    }
}
