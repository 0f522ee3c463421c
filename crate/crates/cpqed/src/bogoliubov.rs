//! Closed-form Bogoliubov coefficients built from the 2×2 mixing matrix `M_ℓ`.

use serde::Serialize;

use crate::model::{coupling_constant, Mode, OscillatorPair, Osc};
use crate::resolvent::{DiscreteMedium, Freq, Medium};
use crate::specfun::Axis;
use crate::{Error, Result, C64};

pub type Mat2 = [[C64; 2]; 2];

/// `M_ℓ = (G1 G2/(1 - σ² G1 G2)) [[G2⁻¹, -σ], [-σ, G1⁻¹]]`, the inverse of
/// `[[G1⁻¹, σ], [σ, G2⁻¹]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixMatrix {
    pub m: Mat2,
}

impl MixMatrix {
    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [self.m[0][0] * v[0] + self.m[0][1] * v[1], self.m[1][0] * v[0] + self.m[1][1] * v[1]]
    }
}

pub fn dressed_matrix(medium: &dyn Medium, axis: Axis, w: Freq) -> Result<Mat2> {
    let g1 = medium.inv_g(Osc::One, axis, w)?;
    let g2 = medium.inv_g(Osc::Two, axis, w)?;
    let s = medium.sigma(axis, w)?;
    Ok([[g1, s], [s, g2]])
}

pub fn mix_from_dressed(d: &Mat2) -> Result<MixMatrix> {
    let (g1, g2, s) = (d[0][0], d[1][1], d[0][1]);
    let det = g1 * g2 - s * s;
    let scale = (g1 * g2).norm().max((s * s).norm());
    if scale > 0.0 && det.norm() < 1e-10 * scale || det.norm() == 0.0 {
        return Err(Error::DressedPole(if scale > 0.0 { det.norm() / scale } else { 0.0 }));
    }
    Ok(MixMatrix { m: [[g2 / det, -s / det], [-s / det, g1 / det]] })
}

pub fn mix_matrix(medium: &dyn Medium, axis: Axis, w: Freq) -> Result<MixMatrix> {
    mix_from_dressed(&dressed_matrix(medium, axis, w)?)
}

/// max |M·D - 1| over entries.
pub fn inverse_residual(m: &MixMatrix, d: &Mat2) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let v = m.m[i][0] * d[0][j] + m.m[i][1] * d[1][j];
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).norm());
        }
    }
    worst
}

/// Couplings of one (transformed) mode to the two oscillators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeCouplings {
    pub omega: f64,
    pub f: [[C64; 3]; 2],
    pub phase: f64,
}

impl ProbeCouplings {
    pub fn from_mode(pair: &OscillatorPair, mode: &Mode, volume: f64) -> Result<Self> {
        let mut f = [[C64::new(0.0, 0.0); 3]; 2];
        for i in Osc::BOTH {
            for l in Axis::ALL {
                f[i.index()][l.index()] = coupling_constant(pair, i, l, mode, volume)?;
            }
        }
        Ok(ProbeCouplings { omega: mode.k, f, phase: mode.phase(pair.r) })
    }

    /// `(f¹, f² e^{ik·r})`.
    pub fn fvec(&self, axis: Axis) -> [C64; 2] {
        let l = axis.index();
        [self.f[0][l], self.f[1][l] * C64::from_polar(1.0, self.phase)]
    }

    /// `(f¹, f² e^{-ik·r})`.
    pub fn fvec_bar(&self, axis: Axis) -> [C64; 2] {
        let l = axis.index();
        [self.f[0][l], self.f[1][l] * C64::from_polar(1.0, -self.phase)]
    }
}

/// Direct coefficients {t, r, T, R} of one transformed mode over a grid. `T`
/// is stored as `delta` (the Kronecker term on the mode itself) plus the
/// smooth part `big_t` over the grid modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSet {
    pub omega: f64,
    pub t: [[C64; 3]; 2],
    pub r: [[C64; 3]; 2],
    pub delta: C64,
    pub big_t: Vec<C64>,
    pub big_r: Vec<C64>,
}

/// Inverse coefficients {λ, τ, μ, η} of one transformed mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseCoefficientSet {
    pub omega: f64,
    pub lambda: [[C64; 3]; 2],
    pub tau: [[C64; 3]; 2],
    pub mu_delta: C64,
    pub mu: Vec<C64>,
    pub eta: Vec<C64>,
}

/// Builds {t, r, T, R} from `u_ℓ = M_ℓ f_ℓ` (one 2-vector per axis).
pub fn coefficients_from_u(medium: &DiscreteMedium, omega: f64, u: &[[C64; 2]; 3], delta: C64) -> CoefficientSet {
    let k0 = medium.pair().k0;
    let mut t = [[C64::new(0.0, 0.0); 3]; 2];
    let mut r = t;
    for l in 0..3 {
        for i in 0..2 {
            t[i][l] = -(omega + k0) * u[l][i];
            r[i][l] = -(omega - k0) * u[l][i];
        }
    }
    let n = medium.len();
    let mut big_t = Vec::with_capacity(n);
    let mut big_r = Vec::with_capacity(n);
    for m in 0..n {
        let km = medium.k(m);
        let e = C64::from_polar(1.0, medium.phase(m));
        let (mut st, mut sr) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for axis in Axis::ALL {
            let (f1, f2) = (medium.f(Osc::One, axis, m), medium.f(Osc::Two, axis, m));
            let ul = u[axis.index()];
            st += f1 * ul[0] + f2 * e.conj() * ul[1];
            sr += f1 * ul[0] + f2 * e * ul[1];
        }
        big_t.push(2.0 * k0 / (omega - km) * st);
        big_r.push(-2.0 * k0 / (omega + km) * sr);
    }
    CoefficientSet { omega, t, r, delta, big_t, big_r }
}

/// Guards against the degenerate denominators ω = k0 and ω = k_m.
pub fn check_nondegenerate(medium: &DiscreteMedium, omega: f64) -> Result<()> {
    let k0 = medium.pair().k0;
    let tol = 1e-9 * k0.max(omega);
    if (omega - k0).abs() <= tol {
        return Err(Error::Degenerate(format!("mode frequency {omega} equals k0")));
    }
    for m in 0..medium.len() {
        if (omega - medium.k(m)).abs() <= tol {
            return Err(Error::Degenerate(format!("mode frequency {omega} equals grid k {}", medium.k(m))));
        }
    }
    Ok(())
}

/// `t = -(k+k0) M f`, `r = -(k-k0) M f`, `T = δ + (2k0/(k-k')) f̄'·M f`,
/// `R = -(2k0/(k'+k)) f'·M f` for a mode external to the grid. The adjoint of
/// the printed form acts as a plain transpose on the imaginary couplings; the
/// phase on the bare mode enters as `e^{-ik'·r}` in T and `e^{+ik'·r}` in R.
pub fn direct_coefficients(medium: &DiscreteMedium, probe: &ProbeCouplings) -> Result<CoefficientSet> {
    check_nondegenerate(medium, probe.omega)?;
    let w = Freq::Real(probe.omega, crate::resolvent::Branch::Plus);
    let mut u = [[C64::new(0.0, 0.0); 2]; 3];
    for axis in Axis::ALL {
        let m = mix_matrix(medium, axis, w)?;
        u[axis.index()] = m.apply(probe.fvec(axis));
    }
    Ok(coefficients_from_u(medium, probe.omega, &u, C64::new(1.0, 0.0)))
}

/// λ from the explicit two-component formulas.
pub fn lambda_coefficients(medium: &dyn Medium, probe: &ProbeCouplings, w: Freq) -> Result<[[C64; 3]; 2]> {
    let k = match w {
        Freq::Real(k, _) => k,
        Freq::Imag(_) => return Err(Error::InvalidParameter("λ needs a real frequency".into())),
    };
    let k0 = medium.pair().k0;
    let mut lam = [[C64::new(0.0, 0.0); 3]; 2];
    let em = C64::from_polar(1.0, -probe.phase);
    for axis in Axis::ALL {
        let d = dressed_matrix(medium, axis, w)?;
        mix_from_dressed(&d)?;
        let (g1, g2, s) = (d[0][0].inv(), d[1][1].inv(), d[0][1]);
        let den = 1.0 - s * s * g1 * g2;
        let l = axis.index();
        let (f1, f2) = (probe.f[0][l], probe.f[1][l]);
        lam[0][l] = (k + k0) * g1 / den * (f1 - f2 * em * s * g2);
        lam[1][l] = (k + k0) * g2 / den * (f2 * em - f1 * s * g1);
    }
    Ok(lam)
}

/// λ along the matrix path `(k + k0) M_ℓ f̄_ℓ`.
pub fn lambda_via_matrix(medium: &dyn Medium, probe: &ProbeCouplings, w: Freq) -> Result<[[C64; 3]; 2]> {
    let k = match w {
        Freq::Real(k, _) => k,
        Freq::Imag(_) => return Err(Error::InvalidParameter("λ needs a real frequency".into())),
    };
    let k0 = medium.pair().k0;
    let mut lam = [[C64::new(0.0, 0.0); 3]; 2];
    for axis in Axis::ALL {
        let v = mix_matrix(medium, axis, w)?.apply(probe.fvec_bar(axis));
        lam[0][axis.index()] = (k + k0) * v[0];
        lam[1][axis.index()] = (k + k0) * v[1];
    }
    Ok(lam)
}

fn mu_sum(medium: &DiscreteMedium, lambda: &[[C64; 3]; 2], m: usize, phase_sign: f64) -> C64 {
    let e = C64::from_polar(1.0, phase_sign * medium.phase(m));
    let mut s = C64::new(0.0, 0.0);
    for axis in Axis::ALL {
        let l = axis.index();
        s += medium.f(Osc::One, axis, m) * lambda[0][l] + e * medium.f(Osc::Two, axis, m) * lambda[1][l];
    }
    s
}

/// τ, μ and η from λ. `mu_delta` carries the Kronecker term, which sits on the
/// transformed mode itself and not on any grid mode.
pub fn companion_coefficients(
    lambda: &[[C64; 3]; 2],
    omega: f64,
    medium: &DiscreteMedium,
    mu_delta: C64,
) -> InverseCoefficientSet {
    let k0 = medium.pair().k0;
    let ratio = (omega - k0) / (omega + k0);
    let mut tau = [[C64::new(0.0, 0.0); 3]; 2];
    for i in 0..2 {
        for l in 0..3 {
            tau[i][l] = -ratio * lambda[i][l].conj();
        }
    }
    let n = medium.len();
    let mut mu = Vec::with_capacity(n);
    let mut eta = Vec::with_capacity(n);
    for m in 0..n {
        let km = medium.k(m);
        let pre = 2.0 * k0 / ((omega + k0) * (omega - km));
        mu.push(pre * mu_sum(medium, lambda, m, 1.0));
        // μ at -k: same couplings, reversed phase
        let mu_mirror = pre * mu_sum(medium, lambda, m, -1.0);
        eta.push((omega - km) / (omega + km) * mu_mirror.conj());
    }
    InverseCoefficientSet { omega, lambda: *lambda, tau, mu_delta, mu, eta }
}

/// max over components with |t| > 1e-8 of |r/t - (ω - k0)/(ω + k0)|.
pub fn ratio_law_residual(c: &CoefficientSet, k0: f64) -> f64 {
    let ratio = (c.omega - k0) / (c.omega + k0);
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for l in 0..3 {
            if c.t[i][l].norm() > 1e-8 {
                worst = worst.max((c.r[i][l] / c.t[i][l] - ratio).norm());
            }
        }
    }
    worst
}

/// max |R_{k'} - ((k'-ω)/(k'+ω)) T_{-k'}| relative to the largest |T|, |R|,
/// using the mirrored grid modes.
pub fn r_law_residual(c: &CoefficientSet, medium: &DiscreteMedium) -> Result<f64> {
    let scale = c.big_t.iter().chain(&c.big_r).map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for m in 0..medium.len() {
        let mm = medium
            .grid()
            .mirror_index(m)
            .ok_or_else(|| Error::InvalidParameter("grid is not inversion symmetric".into()))?;
        let km = medium.k(m);
        let v = c.big_r[m] - (km - c.omega) / (km + c.omega) * c.big_t[mm];
        worst = worst.max(v.norm() / scale);
    }
    Ok(worst)
}

/// max over |λ| > 1e-8 of |τ/conj(λ) + (ω - k0)/(ω + k0)|.
pub fn tau_law_residual(inv: &InverseCoefficientSet, k0: f64) -> f64 {
    let ratio = (inv.omega - k0) / (inv.omega + k0);
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for l in 0..3 {
            let lam = inv.lambda[i][l];
            if lam.norm() > 1e-8 {
                worst = worst.max((inv.tau[i][l] / lam.conj() + ratio).norm());
            }
        }
    }
    worst
}

/// η against μ at the mirrored grid mode, relative to the largest |μ|, |η|.
pub fn eta_law_residual(inv: &InverseCoefficientSet, medium: &DiscreteMedium) -> Result<f64> {
    let scale = inv.mu.iter().chain(&inv.eta).map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for m in 0..medium.len() {
        let mm = medium
            .grid()
            .mirror_index(m)
            .ok_or_else(|| Error::InvalidParameter("grid is not inversion symmetric".into()))?;
        let km = medium.k(m);
        let v = inv.eta[m] - (inv.omega - km) / (inv.omega + km) * inv.mu[mm].conj();
        worst = worst.max(v.norm() / scale);
    }
    Ok(worst)
}
