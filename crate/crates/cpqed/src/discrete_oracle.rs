//! Brute-force finite-mode oracle: the coupled linear system for one transformed
//! mode, exact normal modes of a grid, and symplectic diagonalization of the
//! full quadratic Hamiltonian.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bogoliubov::{check_nondegenerate, coefficients_from_u, CoefficientSet, ProbeCouplings};
use crate::model::{Mode, ModeGrid, OscillatorPair, Osc, ShellSpec};
use crate::quad::brent;
use crate::resolvent::{f1_kernel, f2_kernel, DiscreteMedium, Medium};
use crate::specfun::Axis;
use crate::{Error, Result, C64};

/// Dense system `A x = b` with unknowns ordered
/// `[t(i,ℓ) ×6, r(i,ℓ) ×6, T ×N, R ×N]`, index `i*3 + ℓ` inside each block.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: DMatrix<C64>,
    pub rhs: DVector<C64>,
    pub n_modes: usize,
}

impl LinearSystem {
    pub fn dim(&self) -> usize {
        12 + 2 * self.n_modes
    }

    pub fn t_index(i: Osc, l: Axis) -> usize {
        i.index() * 3 + l.index()
    }

    pub fn r_index(i: Osc, l: Axis) -> usize {
        6 + i.index() * 3 + l.index()
    }

    pub fn big_t_index(&self, m: usize) -> usize {
        12 + m
    }

    pub fn big_r_index(&self, m: usize) -> usize {
        12 + self.n_modes + m
    }
}

/// Assembles the six equation families for a transformed mode that is not
/// itself part of the grid. Its own `T` amplitude (the Kronecker term) is
/// fixed to 1 and moved to the right-hand side.
pub fn build_system(medium: &DiscreteMedium, probe: &ProbeCouplings) -> Result<LinearSystem> {
    check_nondegenerate(medium, probe.omega)?;
    let n = medium.len();
    let k0 = medium.pair().k0;
    let w = probe.omega;
    let dim = 12 + 2 * n;
    let mut a = DMatrix::<C64>::zeros(dim, dim);
    let mut b = DVector::<C64>::zeros(dim);
    let sys_t = |m: usize| 12 + m;
    let sys_r = |m: usize| 12 + n + m;
    let e_probe = C64::from_polar(1.0, probe.phase);
    for i in Osc::BOTH {
        for l in Axis::ALL {
            let src = if i == Osc::One { C64::new(1.0, 0.0) } else { e_probe };
            let it = LinearSystem::t_index(i, l);
            let ir = LinearSystem::r_index(i, l);
            for (row, fac) in [(it, w - k0), (ir, w + k0)] {
                a[(row, row)] += fac;
                for m in 0..n {
                    let e = C64::from_polar(1.0, medium.phase(m));
                    let (pt, pr) = if i == Osc::One { (C64::new(1.0, 0.0), C64::new(1.0, 0.0)) } else { (e, e.conj()) };
                    let f = medium.f(i, l, m);
                    a[(row, sys_t(m))] -= f * pt;
                    a[(row, sys_r(m))] -= f * pr;
                }
                b[row] = probe.f[i.index()][l.index()] * src;
            }
        }
    }
    for m in 0..n {
        let km = medium.k(m);
        a[(sys_t(m), sys_t(m))] = C64::new(w - km, 0.0);
        a[(sys_r(m), sys_r(m))] = C64::new(-(w + km), 0.0);
        let e = C64::from_polar(1.0, medium.phase(m));
        for l in Axis::ALL {
            for i in Osc::BOTH {
                let (pt, pr) = if i == Osc::One { (C64::new(1.0, 0.0), C64::new(1.0, 0.0)) } else { (e.conj(), e) };
                let f = medium.f(i, l, m);
                let (it, ir) = (LinearSystem::t_index(i, l), LinearSystem::r_index(i, l));
                a[(sys_t(m), ir)] -= f * pt;
                a[(sys_t(m), it)] += f * pt;
                a[(sys_r(m), ir)] -= f * pr;
                a[(sys_r(m), it)] += f * pr;
            }
        }
    }
    Ok(LinearSystem { matrix: a, rhs: b, n_modes: n })
}

/// LU solve, unpacked into a coefficient set with the Kronecker term 1.
pub fn solve(sys: &LinearSystem, omega: f64) -> Result<CoefficientSet> {
    let x = sys
        .matrix
        .clone()
        .lu()
        .solve(&sys.rhs)
        .ok_or_else(|| Error::Degenerate("singular coefficient system".into()))?;
    let mut t = [[C64::new(0.0, 0.0); 3]; 2];
    let mut r = t;
    for i in Osc::BOTH {
        for l in Axis::ALL {
            t[i.index()][l.index()] = x[LinearSystem::t_index(i, l)];
            r[i.index()][l.index()] = x[LinearSystem::r_index(i, l)];
        }
    }
    let n = sys.n_modes;
    Ok(CoefficientSet {
        omega,
        t,
        r,
        delta: C64::new(1.0, 0.0),
        big_t: (0..n).map(|m| x[sys.big_t_index(m)]).collect(),
        big_r: (0..n).map(|m| x[sys.big_r_index(m)]).collect(),
    })
}

/// `|A x - b| / |b|` for a coefficient set substituted back into the system.
pub fn system_residual(sys: &LinearSystem, c: &CoefficientSet) -> f64 {
    let mut x = DVector::<C64>::zeros(sys.dim());
    for i in Osc::BOTH {
        for l in Axis::ALL {
            x[LinearSystem::t_index(i, l)] = c.t[i.index()][l.index()];
            x[LinearSystem::r_index(i, l)] = c.r[i.index()][l.index()];
        }
    }
    for m in 0..sys.n_modes {
        x[sys.big_t_index(m)] = c.big_t[m];
        x[sys.big_r_index(m)] = c.big_r[m];
    }
    let res = &sys.matrix * x - &sys.rhs;
    let scale = sys.rhs.norm();
    if scale == 0.0 {
        res.norm()
    } else {
        res.norm() / scale
    }
}

/// Largest componentwise difference between two coefficient sets.
pub fn max_coefficient_difference(a: &CoefficientSet, b: &CoefficientSet) -> f64 {
    let mut worst: f64 = (a.delta - b.delta).norm();
    for i in 0..2 {
        for l in 0..3 {
            worst = worst.max((a.t[i][l] - b.t[i][l]).norm()).max((a.r[i][l] - b.r[i][l]).norm());
        }
    }
    for (x, y) in a.big_t.iter().zip(&b.big_t).chain(a.big_r.iter().zip(&b.big_r)) {
        worst = worst.max((x - y).norm());
    }
    worst
}

/// `|Σ(|t|² - |r|²) + Σ(|T|² - |R|²) - 1|`, the Kronecker term included in T.
pub fn commutator_residual(c: &CoefficientSet) -> f64 {
    let mut s = c.delta.norm_sqr();
    for i in 0..2 {
        for l in 0..3 {
            s += c.t[i][l].norm_sqr() - c.r[i][l].norm_sqr();
        }
    }
    for (tt, rr) in c.big_t.iter().zip(&c.big_r) {
        s += tt.norm_sqr() - rr.norm_sqr();
    }
    (s - 1.0).abs()
}

/// An exact normal mode of the finite grid on one axis.
#[derive(Debug, Clone, Serialize)]
pub struct NormalMode {
    pub omega: f64,
    pub axis: Axis,
    pub u: [C64; 2],
    pub coeffs: CoefficientSet,
}

fn real_dressed(medium: &DiscreteMedium, axis: Axis, w: f64) -> [[f64; 2]; 2] {
    let z = C64::new(w, 0.0);
    let g1 = medium.inv_g_z(Osc::One, axis, z).re;
    let g2 = medium.inv_g_z(Osc::Two, axis, z).re;
    let s = medium.sigma_z(axis, z).re;
    [[g1, s], [s, g2]]
}

/// Eigenvalues of a real symmetric 2×2 matrix, ascending.
fn eig2(d: &[[f64; 2]; 2]) -> [f64; 2] {
    let m = 0.5 * (d[0][0] + d[1][1]);
    let h = 0.5 * (d[0][0] - d[1][1]);
    let rad = h.hypot(d[0][1]);
    [m - rad, m + rad]
}

/// Unit eigenvector for the eigenvalue of `d` closest to zero.
fn null_vector(d: &[[f64; 2]; 2]) -> [f64; 2] {
    let ev = eig2(d);
    let lam = if ev[0].abs() < ev[1].abs() { ev[0] } else { ev[1] };
    // rows of (d - λ) are orthogonal to the eigenvector; use the larger one
    let r0 = [d[0][0] - lam, d[0][1]];
    let r1 = [d[1][0], d[1][1] - lam];
    let row = if r0[0].hypot(r0[1]) >= r1[0].hypot(r1[1]) { r0 } else { r1 };
    let n = row[0].hypot(row[1]);
    if n == 0.0 {
        return [1.0, 0.0];
    }
    [-row[1] / n, row[0] / n]
}

/// Bracketing intervals between the distinct grid wavenumbers: `(0, k_1)`,
/// `(k_1, k_2)`, ..., `(k_n, ∞)` with relative margins past each cluster.
fn pole_intervals(medium: &DiscreteMedium) -> Vec<(f64, f64)> {
    let mut ks: Vec<f64> = (0..medium.len()).map(|m| medium.k(m)).collect();
    ks.sort_by(f64::total_cmp);
    let mut clusters: Vec<(f64, f64)> = Vec::new();
    for k in ks {
        match clusters.last_mut() {
            Some(c) if k - c.1 <= 1e-12 * k => c.1 = k,
            _ => clusters.push((k, k)),
        }
    }
    let margin = 1e-13;
    let mut out = Vec::with_capacity(clusters.len() + 1);
    let mut lo = 0.0;
    for &(a, b) in &clusters {
        out.push((lo, a * (1.0 - margin)));
        lo = b * (1.0 + margin);
    }
    out.push((lo, f64::INFINITY));
    out
}

/// All normal modes with frequencies off the grid, found as zeros of the two
/// eigenvalue branches of the real dressed matrix between consecutive poles.
/// Modes that stay exactly on a grid wavenumber decouple from the oscillators
/// and are not returned. Eigenvectors are normalized by `-2k0 uᵀD'u = 1`.
pub fn normal_modes(medium: &DiscreteMedium) -> Result<Vec<NormalMode>> {
    let k0 = medium.pair().k0;
    let mut out = Vec::new();
    for axis in Axis::ALL {
        for (lo, hi) in pole_intervals(medium) {
            let mut hi = hi;
            if hi.is_infinite() {
                hi = 2.0 * lo.max(k0) + 1.0;
                while eig2(&real_dressed(medium, axis, hi))[1] > 0.0 {
                    hi *= 2.0;
                    if hi > 1e12 {
                        return Err(Error::RootFinding("no upper bracket for the last branch".into()));
                    }
                }
            }
            let lo = if lo == 0.0 { 1e-12 * hi } else { lo };
            let mut prev: Option<(f64, [f64; 2])> = None;
            for branch in 0..2 {
                let f = |w: f64| eig2(&real_dressed(medium, axis, w))[branch];
                let (fa, fb) = (f(lo), f(hi));
                if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
                    continue;
                }
                let w = brent(&f, lo, hi, 0.0, 400)?;
                let mut v = null_vector(&real_dressed(medium, axis, w));
                // a doubly degenerate root gets the orthogonal partner
                if let Some((wp, vp)) = prev {
                    if (w - wp).abs() <= 1e-9 * w && (v[0] * vp[1] - v[1] * vp[0]).abs() < 1e-6 {
                        v = [-vp[1], vp[0]];
                    }
                }
                prev = Some((w, v));
                out.push(normal_mode_at(medium, axis, w, v, k0));
            }
        }
    }
    out.sort_by(|a, b| a.omega.total_cmp(&b.omega).then(a.axis.index().cmp(&b.axis.index())));
    Ok(out)
}

fn normal_mode_at(medium: &DiscreteMedium, axis: Axis, w: f64, v: [f64; 2], k0: f64) -> NormalMode {
    let z = C64::new(w, 0.0);
    let dp = [
        [medium.inv_g_dz(Osc::One, axis, z).re, medium.sigma_dz(axis, z).re],
        [medium.sigma_dz(axis, z).re, medium.inv_g_dz(Osc::Two, axis, z).re],
    ];
    let quad = v[0] * (dp[0][0] * v[0] + dp[0][1] * v[1]) + v[1] * (dp[1][0] * v[0] + dp[1][1] * v[1]);
    let s = 1.0 / (-2.0 * k0 * quad).sqrt();
    let u = [C64::new(v[0] * s, 0.0), C64::new(v[1] * s, 0.0)];
    let mut uu = [[C64::new(0.0, 0.0); 2]; 3];
    uu[axis.index()] = u;
    let coeffs = coefficients_from_u(medium, w, &uu, C64::new(0.0, 0.0));
    NormalMode { omega: w, axis, u, coeffs }
}

/// Largest deviation from `[b_a, b_b†] = δ_ab` and `[b_a, b_b] = 0` over all pairs.
pub fn orthogonality_residual(modes: &[NormalMode]) -> f64 {
    let mut worst: f64 = 0.0;
    for (ia, a) in modes.iter().enumerate() {
        for (ib, b) in modes.iter().enumerate().skip(ia) {
            let (ca, cb) = (&a.coeffs, &b.coeffs);
            let mut herm = C64::new(0.0, 0.0);
            let mut anti = C64::new(0.0, 0.0);
            for i in 0..2 {
                for l in 0..3 {
                    herm += ca.t[i][l] * cb.t[i][l].conj() - ca.r[i][l] * cb.r[i][l].conj();
                    anti += ca.t[i][l] * cb.r[i][l] - ca.r[i][l] * cb.t[i][l];
                }
            }
            for m in 0..ca.big_t.len() {
                herm += ca.big_t[m] * cb.big_t[m].conj() - ca.big_r[m] * cb.big_r[m].conj();
                anti += ca.big_t[m] * cb.big_r[m] - ca.big_r[m] * cb.big_t[m];
            }
            let target = if ia == ib { 1.0 } else { 0.0 };
            worst = worst.max((herm - target).norm()).max(anti.norm());
        }
    }
    worst
}

/// Real quadratic form `H = ½ ξᵀ K ξ` on `ξ = (x, p)` with D coordinates and D
/// momenta, plus the bare frequencies subtracted by normal ordering.
#[derive(Debug, Clone)]
pub struct QuadraticHamiltonian {
    pub k: DMatrix<f64>,
    pub bare: Vec<f64>,
}

/// Normal-mode frequencies (ascending) and the ground energy shift.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub e0: f64,
}

impl QuadraticHamiltonian {
    pub fn new(k: DMatrix<f64>, bare: Vec<f64>) -> Result<Self> {
        if k.nrows() != k.ncols() || k.nrows() != 2 * bare.len() {
            return Err(Error::InvalidParameter("quadratic form must be 2D×2D with D bare frequencies".into()));
        }
        if (&k - k.transpose()).amax() > 1e-14 * k.amax().max(1.0) {
            return Err(Error::InvalidParameter("quadratic form must be symmetric".into()));
        }
        Ok(QuadraticHamiltonian { k, bare })
    }

    /// Oscillators (6 coordinates) plus grid modes in the order
    /// `x(6), X(N), p(6), P(N)`, with the field quadratures chosen so the
    /// dipole couples to `sin(k·r) X + cos(k·r) P`.
    pub fn from_medium(medium: &DiscreteMedium) -> Result<Self> {
        let n = medium.len();
        let k0 = medium.pair().k0;
        let d = 6 + n;
        let mut k = DMatrix::<f64>::zeros(2 * d, 2 * d);
        for a in 0..6 {
            k[(a, a)] = k0;
            k[(d + a, d + a)] = k0;
        }
        for m in 0..n {
            k[(6 + m, 6 + m)] = medium.k(m);
            k[(d + 6 + m, d + 6 + m)] = medium.k(m);
        }
        for i in Osc::BOTH {
            for l in Axis::ALL {
                let a = i.index() * 3 + l.index();
                for m in 0..n {
                    let g = medium.g(i, l, m);
                    let p = if i == Osc::One { 0.0 } else { medium.phase(m) };
                    k[(a, 6 + m)] = 2.0 * g * p.sin();
                    k[(6 + m, a)] = 2.0 * g * p.sin();
                    k[(a, d + 6 + m)] = 2.0 * g * p.cos();
                    k[(d + 6 + m, a)] = 2.0 * g * p.cos();
                }
            }
        }
        let mut bare = vec![k0; 6];
        bare.extend((0..n).map(|m| medium.k(m)));
        QuadraticHamiltonian::new(k, bare)
    }

    pub fn dim(&self) -> usize {
        self.bare.len()
    }
}

/// Williamson normal form: with `K = L Lᵀ` and `A = Lᵀ J L`, the symplectic
/// eigenvalues are the singular values of A, each appearing twice.
pub fn diagonalize_quadratic(h: &QuadraticHamiltonian) -> Result<Spectrum> {
    let d = h.dim();
    let chol = Cholesky::new(h.k.clone()).ok_or(Error::Unstable)?;
    let l = chol.l();
    let mut j = DMatrix::<f64>::zeros(2 * d, 2 * d);
    for a in 0..d {
        j[(a, d + a)] = 1.0;
        j[(d + a, a)] = -1.0;
    }
    let a = l.transpose() * j * &l;
    let ata = a.transpose() * &a;
    let mut ev: Vec<f64> = SymmetricEigen::new(ata).eigenvalues.iter().map(|&e| e.max(0.0).sqrt()).collect();
    ev.sort_by(f64::total_cmp);
    let frequencies: Vec<f64> = ev.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    let total = crate::quad::pairwise_sum(&ev) * 0.5;
    let bare = crate::quad::pairwise_sum(&h.bare);
    Ok(Spectrum { frequencies, e0: 0.5 * (total - bare) })
}

/// Which left-hand side of the difference identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IdentityKind {
    /// `Σ (f^{iℓ})² F⁽¹⁾(k)`
    SameF1(Osc),
    /// `Σ f^{1ℓ} f^{2ℓ} e^{±ik·r} F⁽¹⁾(k)`
    CrossF1,
    /// `Σ k (f^{iℓ})² F⁽²⁾(k)`
    SameF2(Osc),
    /// `Σ k f^{1ℓ} f^{2ℓ} e^{±ik·r} F⁽²⁾(k)`
    CrossF2,
}

/// Direct grid sum for one identity. `phase_sign` selects `e^{±ik·r}` for the
/// cross sums and is ignored otherwise.
pub fn identity_lhs(
    medium: &DiscreteMedium,
    kind: IdentityKind,
    axis: Axis,
    kprime: f64,
    ktilde: f64,
    phase_sign: f64,
) -> Result<C64> {
    if kprime == ktilde {
        return Err(Error::Coincident);
    }
    let mut terms = Vec::with_capacity(medium.len());
    for m in 0..medium.len() {
        let k = medium.k(m);
        let e = C64::from_polar(1.0, phase_sign * medium.phase(m));
        let v = match kind {
            IdentityKind::SameF1(i) => medium.f(i, axis, m).powi(2) * f1_kernel(kprime, ktilde, k),
            IdentityKind::CrossF1 => {
                medium.f(Osc::One, axis, m) * medium.f(Osc::Two, axis, m) * e * f1_kernel(kprime, ktilde, k)
            }
            IdentityKind::SameF2(i) => medium.f(i, axis, m).powi(2) * k * f2_kernel(kprime, ktilde, k),
            IdentityKind::CrossF2 => {
                medium.f(Osc::One, axis, m) * medium.f(Osc::Two, axis, m) * e * k * f2_kernel(kprime, ktilde, k)
            }
        };
        terms.push(v);
    }
    let re: Vec<f64> = terms.iter().map(|c| c.re).collect();
    let im: Vec<f64> = terms.iter().map(|c| c.im).collect();
    Ok(C64::new(crate::quad::pairwise_sum(&re), crate::quad::pairwise_sum(&im)))
}

/// A reproducible random test case: a small inversion-symmetric shell grid,
/// an oscillator pair and an external transformed mode.
#[derive(Debug, Clone)]
pub struct RandomCase {
    pub pair: OscillatorPair,
    pub grid: ModeGrid,
    pub probe: Mode,
}

fn draw_apart(rng: &mut ChaCha8Rng, lo: f64, hi: f64, avoid: &[f64], gap: f64) -> f64 {
    loop {
        let k = rng.gen_range(lo..hi);
        if avoid.iter().all(|&a| (k - a).abs() > gap) {
            return k;
        }
    }
}

/// Shell grids with 1-2 shells, 1-2 polar nodes and 4 azimuths (8, 16 or 32
/// modes, capped by `max_modes`). Wavenumbers stay at least 0.05 k0 away from
/// k0 and from each other.
pub fn random_case(seed: u64, max_modes: usize, mu_max: f64) -> Result<RandomCase> {
    if max_modes < 8 {
        return Err(Error::InvalidParameter("random grids have at least 8 modes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k0 = 1.0;
    let (n_shells, n_theta) = loop {
        let s = rng.gen_range(1..=2usize);
        let t = rng.gen_range(1..=2usize);
        if s * t * 8 <= max_modes {
            break (s, t);
        }
    };
    let mut avoid = vec![k0];
    let mut radial = Vec::new();
    for _ in 0..n_shells {
        let k = draw_apart(&mut rng, 0.2, 3.0, &avoid, 0.05);
        avoid.push(k);
        radial.push((k, rng.gen_range(0.05..0.5)));
    }
    let spec = ShellSpec {
        radial,
        n_theta,
        n_phi: 4,
        phi_offset: rng.gen_range(0.0..std::f64::consts::FRAC_PI_2),
    };
    let grid = ModeGrid::shells(&spec)?;
    let pair = OscillatorPair::new(k0, rng.gen_range(0.01..mu_max), rng.gen_range(0.01..mu_max), rng.gen_range(0.5..5.0))?;
    let kp = draw_apart(&mut rng, 0.2, 3.0, &avoid, 0.05);
    let ct: f64 = rng.gen_range(-1.0..1.0);
    let ph: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let st = (1.0 - ct * ct).sqrt();
    let probe = Mode::new([kp * st * ph.cos(), kp * st * ph.sin(), kp * ct], rng.gen_range(1..=2u8), rng.gen_range(0.05..0.5))?;
    Ok(RandomCase { pair, grid, probe })
}
