//! Spherical Bessel functions of order 0 and 1 and the dipole-dipole kernel `h_ℓ`.

use serde::Serialize;

/// Cartesian axis. `Z` is the direction of the interatomic separation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Below this |x| power series replace the closed forms, whose cancellation
/// costs about eps/x² in j1/x.
pub const SERIES_CUT: f64 = 0.5;

// enough terms for full precision at |x| < SERIES_CUT
const SERIES_TERMS: usize = 10;

/// `Σ (-1)^n c_n x^{2n}` with `c_n = num(n) / (2n + 1 + shift)!`.
fn alternating_series(x2: f64, num: impl Fn(usize) -> f64, shift: usize) -> f64 {
    let mut fact = (1..=1 + shift).map(|i| i as f64).product::<f64>();
    let mut pow = 1.0;
    let mut sum = 0.0;
    for n in 0..SERIES_TERMS {
        if n > 0 {
            let m = 2 * n + 1 + shift;
            fact *= (m - 1) as f64 * m as f64;
            pow *= -x2;
        }
        sum += pow * num(n) / fact;
    }
    sum
}

pub fn spherical_j0(x: f64) -> f64 {
    if x.abs() < SERIES_CUT {
        alternating_series(x * x, |_| 1.0, 0)
    } else {
        x.sin() / x
    }
}

pub fn spherical_j1(x: f64) -> f64 {
    if x.abs() < SERIES_CUT {
        x * j1_over_x_series(x * x)
    } else {
        (x.sin() / x - x.cos()) / x
    }
}

fn j1_over_x_series(x2: f64) -> f64 {
    alternating_series(x2, |n| 2.0 * (n + 1) as f64, 2)
}

/// `j1(x)/x`, finite at the origin with limit 1/3.
pub fn j1_over_x(x: f64) -> f64 {
    if x.abs() < SERIES_CUT {
        j1_over_x_series(x * x)
    } else {
        spherical_j1(x) / x
    }
}

/// Dipole-dipole kernel: `j0 - j1/x` for X and Y, `2 j1/x` for Z.
pub fn h_kernel(axis: Axis, x: f64) -> f64 {
    debug_assert!(x >= 0.0, "h_kernel needs x >= 0");
    match axis {
        Axis::X | Axis::Y => spherical_j0(x) - j1_over_x(x),
        Axis::Z => 2.0 * j1_over_x(x),
    }
}

/// d/dx of `j1(x)/x`.
fn d_j1_over_x(x: f64) -> f64 {
    if x.abs() < SERIES_CUT {
        // term-wise derivative, re-indexed from n = 1
        -x * alternating_series(x * x, |n| 4.0 * (n + 1) as f64 * (n + 2) as f64, 4)
    } else {
        (spherical_j0(x) - 3.0 * j1_over_x(x)) / x
    }
}

/// Derivative of the kernel with respect to its argument.
pub fn h_kernel_prime(axis: Axis, x: f64) -> f64 {
    match axis {
        Axis::X | Axis::Y => -spherical_j1(x) - d_j1_over_x(x),
        Axis::Z => 2.0 * d_j1_over_x(x),
    }
}
