//! Ground-state energy shift, its r-dependent part, the far-zone integrals
//! I₁ and I₂ and the Casimir-Polder potential.

use std::f64::consts::PI;

use serde::Serialize;

use crate::discrete_oracle::{normal_modes, NormalMode};
use crate::model::{static_polarizability, ModeGrid, OscillatorPair, Osc, ShellSpec};
use crate::par::{map, map_range, Exec};
use crate::quad::{extrapolate_to_zero, gk21_panel_rule, integrate_to_inf, pairwise_sum, Estimate, QuadratureConfig};
use crate::resolvent::{Continuum, CutoffScheme, DiscreteMedium, Freq, Medium, SigmaEval};
use crate::specfun::{h_kernel, h_kernel_prime, spherical_j0, spherical_j1, Axis};
use crate::{Error, Result, C64};

/// `single_atom_part` is r-independent and carries the cutoff dependence;
/// `cross_part` is the interaction energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub total: f64,
    pub single_atom_part: f64,
    pub cross_part: f64,
    pub imag_residue: f64,
}

fn c_pairwise(v: &[C64]) -> C64 {
    let re: Vec<f64> = v.iter().map(|c| c.re).collect();
    let im: Vec<f64> = v.iter().map(|c| c.im).collect();
    C64::new(pairwise_sum(&re), pairwise_sum(&im))
}

/// The energy formula evaluated with grid sums over the given normal modes,
/// with `λ = conj(t)`.
pub fn e0_from_modes(medium: &DiscreteMedium, modes: &[NormalMode]) -> C64 {
    let k0 = medium.pair().k0;
    let mut terms = Vec::with_capacity(modes.len() * (1 + medium.len()));
    for nm in modes {
        let w = nm.omega;
        let l = nm.axis;
        let lam = [nm.coeffs.t[0][l.index()].conj(), nm.coeffs.t[1][l.index()].conj()];
        let den = (w + k0).powi(2);
        let norm2 = lam[0].norm_sqr() + lam[1].norm_sqr();
        terms.push(C64::new(k0 * (3.0 * w * w - 2.0 * w * k0 - k0 * k0) * norm2 / den, 0.0));
        for m in 0..medium.len() {
            let km = medium.k(m);
            let (f1, f2) = (medium.f(Osc::One, l, m), medium.f(Osc::Two, l, m));
            let a1 = f1 * f1 * lam[0].norm_sqr();
            let a2 = f2 * f2 * lam[1].norm_sqr();
            let cr = f1 * f2 * C64::from_polar(1.0, -medium.phase(m)) * lam[0] * lam[1].conj();
            terms.push(-4.0 * k0 * k0 * km / (km + w).powi(2) * (a1 + a2 + cr + cr.conj()) / den);
        }
    }
    c_pairwise(&terms)
}

/// Total E₀ of one grid from its exact normal modes.
pub fn e0_grid_total(pair: &OscillatorPair, grid: &ModeGrid) -> Result<C64> {
    let medium = DiscreteMedium::new(*pair, grid)?;
    let modes = normal_modes(&medium)?;
    Ok(e0_from_modes(&medium, &modes))
}

fn check_real(v: C64) -> Result<f64> {
    let scale = v.re.abs();
    if v.im != 0.0 && v.im.abs() > 1e-10 * scale {
        return Err(Error::ImaginaryResidue(v.im.abs() / scale.max(f64::MIN_POSITIVE)));
    }
    Ok(v.re)
}

/// Energy formula on a grid, split by dipole subtraction:
/// `cross = E₀(μ1, μ2) - E₀(μ1, 0) - E₀(0, μ2)`.
pub fn e0_discrete(pair: &OscillatorPair, grid: &ModeGrid) -> Result<EnergyBreakdown> {
    let full = e0_grid_total(pair, grid)?;
    let one = e0_grid_total(&pair.with_mu(pair.mu1, 0.0), grid)?;
    let two = e0_grid_total(&pair.with_mu(0.0, pair.mu2), grid)?;
    let imag_residue = [full, one, two]
        .iter()
        .map(|v| if v.re == 0.0 { v.im.abs() } else { v.im.abs() / v.re.abs() })
        .fold(0.0, f64::max);
    let (full, one, two) = (check_real(full)?, check_real(one)?, check_real(two)?);
    Ok(EnergyBreakdown {
        total: full,
        single_atom_part: one + two,
        cross_part: full - one - two,
        imag_residue,
    })
}

/// Adds a constant to each `G_i⁻¹` so that `G_i⁻¹(0) = k0²`, i.e. the static
/// self-energy is absorbed into the bare frequency.
pub struct StaticCounterterm<'a> {
    inner: &'a dyn Medium,
    shift: [f64; 2],
}

impl<'a> StaticCounterterm<'a> {
    pub fn new(inner: &'a dyn Medium) -> Result<Self> {
        let k0 = inner.pair().k0;
        let mut shift = [0.0; 2];
        for i in Osc::BOTH {
            shift[i.index()] = k0 * k0 - inner.inv_g(i, Axis::X, Freq::Imag(0.0))?.re;
        }
        Ok(StaticCounterterm { inner, shift })
    }
}

impl Medium for StaticCounterterm<'_> {
    fn pair(&self) -> &OscillatorPair {
        self.inner.pair()
    }

    fn inv_g(&self, which: Osc, axis: Axis, w: Freq) -> Result<C64> {
        Ok(self.inner.inv_g(which, axis, w)? + self.shift[which.index()])
    }

    fn sigma(&self, axis: Axis, w: Freq) -> Result<C64> {
        self.inner.sigma(axis, w)
    }
}

fn imag_axis_cfg(quad: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig { abs_tol: 0.0, ..quad.clone() }
}

/// `(1/2π) ∫_0^∞ Σ_ℓ ln(1 - σ² G1 G2)(iξ) dξ`, the interaction energy.
pub fn e0_cross_logdet(medium: &dyn Medium, scale: f64, quad: &QuadratureConfig) -> Result<Estimate> {
    let failure = std::sync::Mutex::new(None);
    let f = |xi: f64| -> f64 {
        let mut s = 0.0;
        for axis in Axis::ALL {
            let w = Freq::Imag(xi);
            let v = (|| -> Result<f64> {
                let g1 = medium.inv_g(Osc::One, axis, w)?.re;
                let g2 = medium.inv_g(Osc::Two, axis, w)?.re;
                if !(g1 > 0.0 && g2 > 0.0) {
                    return Err(Error::Unstable);
                }
                let sg = medium.sigma(axis, w)?.re;
                let q = sg * sg / (g1 * g2);
                if q >= 1.0 {
                    return Err(Error::Unstable);
                }
                Ok((-q).ln_1p())
            })();
            match v {
                Ok(v) => s += v,
                Err(e) => {
                    failure.lock().unwrap().get_or_insert(e);
                    return 0.0;
                }
            }
        }
        s
    };
    let est = integrate_to_inf(&f, 0.0, scale, &imag_axis_cfg(quad));
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(est?.scale(1.0 / (2.0 * PI)))
}

/// `(1/2π) ∫_0^∞ Σ_ℓ ln[det D_ℓ(iξ)/(k0² + ξ²)²] dξ`, the full shift of a grid.
pub fn e0_logdet_total(medium: &DiscreteMedium, quad: &QuadratureConfig) -> Result<Estimate> {
    let k0 = medium.pair().k0;
    let f = |xi: f64| -> f64 {
        let z = C64::new(0.0, xi);
        let free = k0 * k0 + xi * xi;
        let mut s = 0.0;
        for axis in Axis::ALL {
            let g1 = medium.inv_g_z(Osc::One, axis, z).re;
            let g2 = medium.inv_g_z(Osc::Two, axis, z).re;
            let sg = medium.sigma_z(axis, z).re;
            s += ((g1 * g2 - sg * sg) / (free * free)).ln();
        }
        s
    };
    Ok(integrate_to_inf(&f, 0.0, k0, &imag_axis_cfg(quad))?.scale(1.0 / (2.0 * PI)))
}

/// Which double integral of the far-zone reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FarZoneIntegral {
    /// principal value with `1/(x² - y²)`
    I1,
    /// `1/(x + y)²`
    I2,
}

fn cutoff_length(eta: f64) -> f64 {
    (40.0 + 5.0 * (1.0 / eta).ln()) / eta
}

/// Outer bracket `x j0(x) h_X(y) + j1(x) (h_Z - h_X)(y)` split into its x parts.
fn outer_factors(x: f64) -> (f64, f64) {
    (x * spherical_j0(x), spherical_j1(x))
}

fn inner_profiles(y: f64, eta: f64) -> (f64, f64) {
    let d = y.powi(4) * (-eta * y).exp();
    let hx = h_kernel(Axis::X, y);
    (d * hx, d * (h_kernel(Axis::Z, y) - hx))
}

fn inner_profiles_prime(y: f64, eta: f64) -> (f64, f64) {
    let e = (-eta * y).exp();
    let y3 = y.powi(3);
    let hx = h_kernel(Axis::X, y);
    let hd = h_kernel(Axis::Z, y) - hx;
    let hxp = h_kernel_prime(Axis::X, y);
    let hdp = h_kernel_prime(Axis::Z, y) - hxp;
    let p = |h: f64, hp: f64| e * (4.0 * y3 * h + y3 * y * hp - eta * y3 * y * h);
    (p(hx, hxp), p(hd, hdp))
}

/// The damped double integral with `e^{-ηx} e^{-ηy}` on a fixed Gauss-Kronrod
/// panel rule (panels of width π on [0, L]). Returns the Kronrod value and the
/// Kronrod-Gauss difference of the outer rule as the error.
pub fn far_zone_damped(which: FarZoneIntegral, eta: f64, exec: Exec) -> Result<Estimate> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter(format!("damping must be > 0, got {eta}")));
    }
    let l = cutoff_length(eta);
    let n_panels = (l / PI).ceil() as usize;
    let (nodes, wk, wg) = gk21_panel_rule(0.0, l, n_panels);
    let prof: Vec<(f64, f64)> = nodes.iter().map(|&y| inner_profiles(y, eta)).collect();
    let outer = |i: usize| -> f64 {
        let x = nodes[i];
        let (a, b) = match which {
            FarZoneIntegral::I1 => {
                let (px, pd) = prof[i];
                let (dx, dd) = inner_profiles_prime(x, eta);
                let (mut sx, mut sd) = (0.0, 0.0);
                for j in 0..nodes.len() {
                    let y = nodes[j];
                    let (qx, qd) = prof[j];
                    let w = wk[j];
                    let plus = 1.0 / (x + y);
                    if j == i {
                        sx += w * (-dx + qx * plus);
                        sd += w * (-dd + qd * plus);
                    } else {
                        let minus = 1.0 / (x - y);
                        sx += w * ((qx - px) * minus + qx * plus);
                        sd += w * ((qd - pd) * minus + qd * plus);
                    }
                }
                let lg = (x / (l - x)).ln();
                ((sx + px * lg) / (2.0 * x), (sd + pd * lg) / (2.0 * x))
            }
            FarZoneIntegral::I2 => {
                let (mut sx, mut sd) = (0.0, 0.0);
                for j in 0..nodes.len() {
                    let q = 1.0 / (x + nodes[j]).powi(2);
                    sx += wk[j] * prof[j].0 * q;
                    sd += wk[j] * prof[j].1 * q;
                }
                (sx, sd)
            }
        };
        let (ox, od) = outer_factors(x);
        x * x * (-eta * x).exp() * (ox * a + od * b)
    };
    let vals = map_range(exec, nodes.len(), outer);
    let k: Vec<f64> = vals.iter().zip(&wk).map(|(v, w)| v * w).collect();
    let g: Vec<f64> = vals.iter().zip(&wg).map(|(v, w)| v * w).collect();
    let (vk, vg) = (pairwise_sum(&k), pairwise_sum(&g));
    Ok(Estimate { value: vk, err: (vk - vg).abs() })
}

/// Damped values over the ladder, extrapolated to η = 0 by Neville's scheme.
/// The error combines the extrapolation change and the quadrature errors.
pub fn far_zone_integral(which: FarZoneIntegral, quad: &QuadratureConfig, exec: Exec) -> Result<Estimate> {
    quad.validate()?;
    if quad.damping.is_empty() {
        return Err(Error::InvalidParameter("damping ladder is empty".into()));
    }
    let samples = quad
        .damping
        .iter()
        .map(|&eta| far_zone_damped(which, eta, exec))
        .collect::<Result<Vec<Estimate>>>()?;
    let vals: Vec<f64> = samples.iter().map(|e| e.value).collect();
    let ex = extrapolate_to_zero(&quad.damping, &vals);
    let qerr: f64 = samples.iter().map(|e| e.err).sum();
    Ok(Estimate { value: ex.value, err: ex.err + qerr })
}

pub fn integral_i1(quad: &QuadratureConfig, exec: Exec) -> Result<Estimate> {
    far_zone_integral(FarZoneIntegral::I1, quad, exec)
}

pub fn integral_i2(quad: &QuadratureConfig, exec: Exec) -> Result<Estimate> {
    far_zone_integral(FarZoneIntegral::I2, quad, exec)
}

/// Undamped inner principal values `PV∫ y⁴ h(y)/(x² - y²) dy` for the h_X and
/// `h_Z - h_X` kernels, as Abel sums.
pub fn inner_pv_closed(x: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    let yx = PI / 2.0 * ((1.0 - x * x) * c + x * s);
    let yd = -PI * (1.5 * c + 1.5 * x * s - 0.5 * x * x * c);
    (yx, yd)
}

/// I₁ with the inner integral done in closed form and only the outer one
/// damped and extrapolated.
pub fn integral_i1_iterated(quad: &QuadratureConfig) -> Result<Estimate> {
    quad.validate()?;
    let vals = quad
        .damping
        .iter()
        .map(|&eta| {
            let l = cutoff_length(eta);
            let (nodes, wk, _) = gk21_panel_rule(0.0, l, (l / PI).ceil() as usize);
            let v: Vec<f64> = nodes
                .iter()
                .zip(&wk)
                .map(|(&x, &w)| {
                    let (a, b) = inner_pv_closed(x);
                    let (ox, od) = outer_factors(x);
                    w * x * x * (-eta * x).exp() * (ox * a + od * b)
                })
                .collect();
            pairwise_sum(&v)
        })
        .collect::<Vec<f64>>();
    Ok(extrapolate_to_zero(&quad.damping, &vals))
}

/// I₂ reduced to a single integral through Laplace transforms of the kernels:
/// with `z = t - i` and `L_n = n!/z^{n+1}`,
/// `I₂ = ∫_0^∞ t [Im(2/z³)(Im L3 - Im L1 + Re L2) + (Im L0 - Re L1)(3 Im L1 - 3 Re L2 - Im L3)] dt`.
pub fn integral_i2_laplace(quad: &QuadratureConfig) -> Result<Estimate> {
    let f = |t: f64| {
        let z = C64::new(t, -1.0);
        let ln = |n: i32| {
            let fact = [1.0, 1.0, 2.0, 6.0][n as usize];
            fact / z.powi(n + 1)
        };
        let a = (2.0 / z.powi(3)).im;
        let b = ln(3).im - ln(1).im + ln(2).re;
        let c = ln(0).im - ln(1).re;
        let d = 3.0 * ln(1).im - 3.0 * ln(2).re - ln(3).im;
        t * (a * b + c * d)
    };
    integrate_to_inf(&f, 0.0, 1.0, quad)
}

/// `(16 μ1² μ2²/(π² k0²)) (2I₁ + I₂)/r⁷`.
pub fn vcp12(pair: &OscillatorPair, r: f64, i1: f64, i2: f64) -> f64 {
    16.0 * (pair.mu1 * pair.mu2).powi(2) / (PI * PI * pair.k0 * pair.k0) * (2.0 * i1 + i2) / r.powi(7)
}

/// `-23 α1 α2/(4π r⁷)`.
pub fn vcp_final(pair: &OscillatorPair, r: f64) -> f64 {
    let a1 = static_polarizability(pair, Osc::One);
    let a2 = static_polarizability(pair, Osc::Two);
    -23.0 * a1 * a2 / (4.0 * PI * r.powi(7))
}

/// Far-zone fourth-order potential.
pub fn vcp_fourth_order(pair: &OscillatorPair, r: f64) -> f64 {
    vcp_final(pair, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PotentialOrder {
    FourthOrderFarZone,
    AllOrdersNumeric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialSample {
    pub r: f64,
    pub v: f64,
    pub v_4th: f64,
    pub rel_dev: f64,
    pub err_est: f64,
    /// Set when this sample failed; `v` is NaN then.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum AllOrdersBackend {
    /// Continuum self-energies on the imaginary axis.
    Continuum,
    /// Energy formula with grid sums on the given shell grid, the same grid at every r.
    Grid(ShellSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllOrdersConfig {
    pub cutoff: CutoffScheme,
    pub quad: QuadratureConfig,
    pub mass_counterterm: bool,
    pub backend: AllOrdersBackend,
}

impl Default for AllOrdersConfig {
    fn default() -> Self {
        AllOrdersConfig {
            cutoff: CutoffScheme::default(),
            quad: QuadratureConfig::default(),
            mass_counterterm: true,
            backend: AllOrdersBackend::Continuum,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveMeta {
    pub k0: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub settings: Option<AllOrdersConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialCurve {
    pub order: PotentialOrder,
    pub samples: Vec<PotentialSample>,
    pub meta: CurveMeta,
}

fn meta(pair: &OscillatorPair, settings: Option<AllOrdersConfig>) -> CurveMeta {
    CurveMeta {
        k0: pair.k0,
        mu1: pair.mu1,
        mu2: pair.mu2,
        alpha1: static_polarizability(pair, Osc::One),
        alpha2: static_polarizability(pair, Osc::Two),
        settings,
    }
}

pub fn fourth_order_curve(pair: &OscillatorPair, rs: &[f64]) -> Result<PotentialCurve> {
    let samples = rs
        .iter()
        .map(|&r| {
            if !(r > 0.0) {
                return Err(Error::InvalidParameter(format!("r must be > 0, got {r}")));
            }
            let v = vcp_fourth_order(pair, r);
            Ok(PotentialSample { r, v, v_4th: v, rel_dev: 0.0, err_est: 0.0, error: None })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PotentialCurve { order: PotentialOrder::FourthOrderFarZone, samples, meta: meta(pair, None) })
}

/// Interaction energy at one separation on the selected backend.
pub fn all_orders_at(pair: &OscillatorPair, cfg: &AllOrdersConfig) -> Result<Estimate> {
    if pair.mu1 == 0.0 || pair.mu2 == 0.0 {
        return Ok(Estimate { value: 0.0, err: 0.0 });
    }
    match &cfg.backend {
        AllOrdersBackend::Continuum => {
            let c = Continuum { pair: *pair, cutoff: cfg.cutoff, quad: cfg.quad.clone(), sigma_eval: SigmaEval::Closed };
            let scale = 1.0 / pair.r;
            if cfg.mass_counterterm {
                e0_cross_logdet(&StaticCounterterm::new(&c)?, scale, &cfg.quad)
            } else {
                e0_cross_logdet(&c, scale, &cfg.quad)
            }
        }
        AllOrdersBackend::Grid(spec) => {
            let grid = ModeGrid::shells(spec)?;
            let e = e0_discrete(pair, &grid)?;
            Ok(Estimate { value: e.cross_part, err: 0.0 })
        }
    }
}

/// All-orders interaction energy over r samples (parallel over r). Samples
/// that fail carry their error; the curve is still returned.
pub fn vcp_all_orders(pair: &OscillatorPair, rs: &[f64], cfg: &AllOrdersConfig, exec: Exec) -> Result<PotentialCurve> {
    cfg.quad.validate()?;
    if let Some(&r) = rs.iter().find(|&&r| !(r > 0.0)) {
        return Err(Error::InvalidParameter(format!("r must be > 0, got {r}")));
    }
    let samples = map(exec, rs, |&r| {
        let p = pair.with_r(r);
        let v4 = vcp_fourth_order(&p, r);
        match all_orders_at(&p, cfg) {
            Ok(e) => {
                let rel_dev = if v4 != 0.0 { e.value / v4 - 1.0 } else { 0.0 };
                PotentialSample { r, v: e.value, v_4th: v4, rel_dev, err_est: e.err, error: None }
            }
            Err(err) => PotentialSample {
                r,
                v: f64::NAN,
                v_4th: v4,
                rel_dev: f64::NAN,
                err_est: f64::NAN,
                error: Some(err.to_string()),
            },
        }
    });
    Ok(PotentialCurve { order: PotentialOrder::AllOrdersNumeric, samples, meta: meta(pair, Some(cfg.clone())) })
}

impl PotentialCurve {
    pub fn failures(&self) -> usize {
        self.samples.iter().filter(|s| s.error.is_some()).count()
    }

    /// Least-squares slope of ln|V| against ln r over the successful samples.
    pub fn loglog_slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .samples
            .iter()
            .filter(|s| s.error.is_none() && s.v != 0.0)
            .map(|s| (s.r.ln(), s.v.abs().ln()))
            .collect();
        loglog_fit(&pts)
    }

    /// Columns r, V, V_4th, rel_dev, err_est; shortest round-trip decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,V,V_4th,rel_dev,err_est\n");
        for s in &self.samples {
            out.push_str(&format!("{:?},{:?},{:?},{:?},{:?}\n", s.r, s.v, s.v_4th, s.rel_dev, s.err_est));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}

fn loglog_fit(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}
