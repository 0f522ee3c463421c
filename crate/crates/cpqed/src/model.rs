//! Physical parameters, field modes and coupling constants.

use std::collections::HashSet;
use std::f64::consts::PI;

use serde::Serialize;

use crate::quad::gauss_legendre;
use crate::specfun::{h_kernel, Axis};
use crate::{Error, Result, C64};

/// Which of the two oscillators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Osc {
    One,
    Two,
}

impl Osc {
    pub const BOTH: [Osc; 2] = [Osc::One, Osc::Two];

    pub fn index(self) -> usize {
        match self {
            Osc::One => 0,
            Osc::Two => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorPair {
    pub k0: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub r: f64,
}

impl OscillatorPair {
    pub fn new(k0: f64, mu1: f64, mu2: f64, r: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite();
        if !(ok(k0) && k0 > 0.0) {
            return Err(Error::InvalidParameter(format!("k0 must be > 0, got {k0}")));
        }
        if !(ok(mu1) && mu1 >= 0.0 && ok(mu2) && mu2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dipole moments must be >= 0, got mu1={mu1}, mu2={mu2}"
            )));
        }
        if !(ok(r) && r > 0.0) {
            return Err(Error::InvalidParameter(format!("r must be > 0, got {r}")));
        }
        Ok(OscillatorPair { k0, mu1, mu2, r })
    }

    /// Pair with the dipole moments fixed by static polarizabilities `α_i = 2μ_i²/k0`.
    pub fn from_polarizabilities(k0: f64, alpha1: f64, alpha2: f64, r: f64) -> Result<Self> {
        if alpha1 < 0.0 || alpha2 < 0.0 {
            return Err(Error::InvalidParameter("polarizabilities must be >= 0".into()));
        }
        Self::new(k0, (alpha1 * k0 / 2.0).sqrt(), (alpha2 * k0 / 2.0).sqrt(), r)
    }

    pub fn mu(&self, which: Osc) -> f64 {
        match which {
            Osc::One => self.mu1,
            Osc::Two => self.mu2,
        }
    }

    pub fn with_r(&self, r: f64) -> Self {
        OscillatorPair { r, ..*self }
    }

    pub fn with_mu(&self, mu1: f64, mu2: f64) -> Self {
        OscillatorPair { mu1, mu2, ..*self }
    }

    pub fn swapped(&self) -> Self {
        OscillatorPair { mu1: self.mu2, mu2: self.mu1, ..*self }
    }
}

/// Static polarizability `2 μ_i² / k0`.
pub fn static_polarizability(pair: &OscillatorPair, which: Osc) -> f64 {
    2.0 * pair.mu(which).powi(2) / pair.k0
}

/// One field mode. `weight` multiplies the mode density: 1 for a box lattice,
/// the k-space cell volume for quadrature shells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    pub kvec: [f64; 3],
    pub pol: u8,
    pub k: f64,
    pub evec: [f64; 3],
    pub weight: f64,
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Transverse polarization pair for direction `khat`. Built from a canonical
/// representative of ±k̂ so that the modes k and -k share polarization vectors.
pub fn polarization_pair(khat: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let positive = khat[2] > 0.0
        || (khat[2] == 0.0 && (khat[1] > 0.0 || (khat[1] == 0.0 && khat[0] > 0.0)));
    let c = if positive { khat } else { [-khat[0], -khat[1], -khat[2]] };
    let a = if c[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = cross(a, c);
    let n = norm(e1);
    let e1 = [e1[0] / n, e1[1] / n, e1[2] / n];
    (e1, cross(c, e1))
}

impl Mode {
    pub fn new(kvec: [f64; 3], pol: u8, weight: f64) -> Result<Mode> {
        let k = norm(kvec);
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter("mode wavevector must be nonzero".into()));
        }
        if pol != 1 && pol != 2 {
            return Err(Error::InvalidParameter(format!("polarization index {pol}")));
        }
        if !(weight > 0.0) {
            return Err(Error::InvalidParameter("mode weight must be > 0".into()));
        }
        let khat = [kvec[0] / k, kvec[1] / k, kvec[2] / k];
        let (e1, e2) = polarization_pair(khat);
        let evec = if pol == 1 { e1 } else { e2 };
        Ok(Mode { kvec, pol, k, evec, weight })
    }

    /// Phase `k·r` picked up at oscillator 2.
    pub fn phase(&self, r: f64) -> f64 {
        self.kvec[2] * r
    }

    pub fn mirrored(&self) -> Mode {
        Mode { kvec: [-self.kvec[0], -self.kvec[1], -self.kvec[2]], ..*self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeGrid {
    modes: Vec<Mode>,
    volume: f64,
}

/// Radial node placement for shell grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Ladder {
    Uniform,
    Geometric,
    Gauss,
}

/// Isotropic shell grid: radial nodes with weights, Gauss-Legendre nodes in
/// cos θ and `n_phi` equally spaced azimuths rotated by `phi_offset`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellSpec {
    pub radial: Vec<(f64, f64)>,
    pub n_theta: usize,
    pub n_phi: usize,
    pub phi_offset: f64,
}

impl ShellSpec {
    pub fn ladder(kind: Ladder, n_shells: usize, k_min: f64, k_max: f64) -> Result<Vec<(f64, f64)>> {
        if n_shells == 0 || !(k_min >= 0.0) || !(k_max > k_min) {
            return Err(Error::InvalidParameter(format!(
                "bad radial ladder: n={n_shells}, k_min={k_min}, k_max={k_max}"
            )));
        }
        let n = n_shells as f64;
        let out = match kind {
            Ladder::Uniform => {
                let dk = (k_max - k_min) / n;
                (0..n_shells).map(|s| (k_min + (s as f64 + 0.5) * dk, dk)).collect()
            }
            Ladder::Geometric => {
                if k_min <= 0.0 {
                    return Err(Error::InvalidParameter("geometric ladder needs k_min > 0".into()));
                }
                let q = (k_max / k_min).ln() / n;
                (0..n_shells)
                    .map(|s| {
                        let k = k_min * ((s as f64 + 0.5) * q).exp();
                        (k, k * q)
                    })
                    .collect()
            }
            Ladder::Gauss => {
                let (x, w) = gauss_legendre(n_shells);
                let h = 0.5 * (k_max - k_min);
                x.iter().zip(&w).map(|(xi, wi)| (k_min + h * (xi + 1.0), h * wi)).collect()
            }
        };
        Ok(out)
    }
}

impl ModeGrid {
    pub fn new(modes: Vec<Mode>, volume: f64) -> Result<ModeGrid> {
        if !(volume > 0.0) {
            return Err(Error::InvalidParameter(format!("volume must be > 0, got {volume}")));
        }
        let mut seen = HashSet::new();
        for m in &modes {
            let key = (m.kvec.map(f64::to_bits), m.pol);
            if !seen.insert(key) {
                return Err(Error::Degenerate(format!(
                    "duplicate mode kvec={:?} pol={}",
                    m.kvec, m.pol
                )));
            }
        }
        Ok(ModeGrid { modes, volume })
    }

    /// Shell grid with volume (2π)³, so each mode carries its k-space cell volume.
    pub fn shells(spec: &ShellSpec) -> Result<ModeGrid> {
        if spec.n_theta == 0 || spec.n_phi == 0 {
            return Err(Error::InvalidParameter("empty angular grid".into()));
        }
        let (ct, wt) = gauss_legendre(spec.n_theta);
        let dphi = 2.0 * PI / spec.n_phi as f64;
        let mut modes = Vec::with_capacity(spec.radial.len() * spec.n_theta * spec.n_phi * 2);
        for &(k, dk) in &spec.radial {
            if !(k > 0.0 && dk > 0.0) {
                return Err(Error::InvalidParameter(format!("bad shell k={k}, dk={dk}")));
            }
            for (c, w) in ct.iter().zip(&wt) {
                let s = (1.0 - c * c).sqrt();
                for m in 0..spec.n_phi {
                    let phi = spec.phi_offset + dphi * m as f64;
                    let kvec = [k * s * phi.cos(), k * s * phi.sin(), k * c];
                    let weight = k * k * dk * w * dphi;
                    for pol in [1u8, 2] {
                        // all modes of a shell share one exact wavenumber
                        let mut mode = Mode::new(kvec, pol, weight)?;
                        mode.k = k;
                        modes.push(mode);
                    }
                }
            }
        }
        ModeGrid::new(modes, (2.0 * PI).powi(3))
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Distinct wavenumbers in ascending order (merged within `rel_tol`).
    pub fn distinct_k(&self, rel_tol: f64) -> Vec<f64> {
        let mut ks: Vec<f64> = self.modes.iter().map(|m| m.k).collect();
        ks.sort_by(f64::total_cmp);
        let mut out: Vec<f64> = Vec::new();
        for k in ks {
            match out.last() {
                Some(&last) if (k - last).abs() <= rel_tol * k => {}
                _ => out.push(k),
            }
        }
        out
    }

    /// Index of the mode with wavevector -k and the same polarization, if present.
    pub fn mirror_index(&self, idx: usize) -> Option<usize> {
        let m = &self.modes[idx];
        let tol = 1e-12 * m.k;
        self.modes.iter().position(|o| {
            o.pol == m.pol && (0..3).all(|c| (o.kvec[c] + m.kvec[c]).abs() <= tol)
        })
    }
}

/// `f = -i √(2πk w / V) μ_i (ê)_ℓ`.
pub fn coupling_constant(
    pair: &OscillatorPair,
    which: Osc,
    axis: Axis,
    mode: &Mode,
    volume: f64,
) -> Result<C64> {
    if !(volume > 0.0) {
        return Err(Error::InvalidParameter(format!("volume must be > 0, got {volume}")));
    }
    let g = (2.0 * PI * mode.k * mode.weight / volume).sqrt() * pair.mu(which) * mode.evec[axis.index()];
    Ok(C64::new(0.0, -g))
}

/// Polarization-summed, angle-integrated `V/(2π)³ ∫dΩ Σ_j f^{iℓ} f^{i'ℓ'}`,
/// optionally with the phase `e^{±ik·r}` between different oscillators.
pub fn angular_coupling_moment(
    pair: &OscillatorPair,
    i: Osc,
    i2: Osc,
    l: Axis,
    l2: Axis,
    kprime: f64,
    with_phase: bool,
) -> Result<f64> {
    if kprime < 0.0 {
        return Err(Error::InvalidParameter("k' must be >= 0".into()));
    }
    if with_phase && i == i2 {
        return Err(Error::InvalidParameter("phase factor needs two different oscillators".into()));
    }
    if l != l2 {
        return Ok(0.0);
    }
    let dip = pair.mu(i) * pair.mu(i2);
    Ok(if with_phase {
        -kprime / PI * h_kernel(l, kprime * pair.r) * dip
    } else {
        -2.0 / (3.0 * PI) * kprime * dip
    })
}
