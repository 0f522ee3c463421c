use cpqed::bogoliubov::*;
use cpqed::discrete_oracle::*;
use cpqed::energy::e0_from_modes;
use cpqed::model::*;
use cpqed::resolvent::*;
use cpqed::specfun::Axis;
use cpqed::{Error, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn x_mode(kz: f64) -> Mode {
    // propagation along z, second polarization along x
    Mode::new([0.0, 0.0, kz], 2, 1.0).unwrap()
}

#[test]
fn single_mode_single_axis_by_hand() {
    let pair = OscillatorPair::new(1.0, 0.3, 0.0, 1.0).unwrap();
    let grid = ModeGrid::new(vec![x_mode(0.6)], 1.0).unwrap();
    let medium = DiscreteMedium::new(pair, &grid).unwrap();
    let probe = ProbeCouplings::from_mode(&pair, &x_mode(0.9), 1.0).unwrap();
    let sys = build_system(&medium, &probe).unwrap();
    assert_eq!(sys.dim(), 14);
    let c = solve(&sys, probe.omega).unwrap();

    // eliminate T and R by hand: t = (w + k0) f'/[(w² - k0²) + 2k0 f² 2k/(w² - k²)]
    let (w, k, k0) = (0.9, 0.6, 1.0);
    let f = medium.f(Osc::One, Axis::X, 0);
    let fp = probe.f[0][0];
    let t = (w + k0) * fp / ((w * w - k0 * k0) + 2.0 * k0 * f * f * 2.0 * k / (w * w - k * k));
    let x = Axis::X.index();
    assert!((c.t[0][x] - t).norm() < 1e-14 * t.norm(), "{} vs {t}", c.t[0][x]);
    assert!((c.r[0][x] - t * (w - k0) / (w + k0)).norm() < 1e-14 * t.norm());
    for l in [Axis::Y, Axis::Z] {
        assert_eq!(c.t[0][l.index()].norm(), 0.0);
    }
    assert!(c.t[1].iter().chain(&c.r[1]).all(|v| v.norm() == 0.0));

    let closed = direct_coefficients(&medium, &probe).unwrap();
    assert!(max_coefficient_difference(&closed, &c) < 1e-14);
}

#[test]
fn two_coordinate_symplectic_closed_form() {
    // H = ½(p² + a²x²) + ½(P² + b²X²) + c x X
    let (a, b, c): (f64, f64, f64) = (1.0, 1.7, 0.4);
    let mut k = DMatrix::zeros(4, 4);
    k[(0, 0)] = a * a;
    k[(1, 1)] = b * b;
    k[(0, 1)] = c;
    k[(1, 0)] = c;
    k[(2, 2)] = 1.0;
    k[(3, 3)] = 1.0;
    let s = diagonalize_quadratic(&QuadraticHamiltonian::new(k, vec![a, b]).unwrap()).unwrap();
    let tr = a * a + b * b;
    let det = a * a * b * b - c * c;
    let disc = (tr * tr / 4.0 - det).sqrt();
    let (w1, w2) = ((tr / 2.0 - disc).sqrt(), (tr / 2.0 + disc).sqrt());
    assert!((s.frequencies[0] - w1).abs() < 1e-13);
    assert!((s.frequencies[1] - w2).abs() < 1e-13);
    assert!((s.e0 - 0.5 * (w1 + w2 - a - b)).abs() < 1e-14);
}

#[test]
fn indefinite_forms_are_unstable() {
    let mut k = DMatrix::identity(4, 4);
    k[(0, 1)] = 2.0;
    k[(1, 0)] = 2.0;
    let h = QuadraticHamiltonian::new(k, vec![1.0, 1.0]).unwrap();
    assert!(matches!(diagonalize_quadratic(&h), Err(Error::Unstable)));
    assert!(QuadraticHamiltonian::new(DMatrix::identity(3, 3), vec![1.0]).is_err());
}

#[test]
fn zero_coupling_is_trivial() {
    let case = random_case(11, 32, 0.2).unwrap();
    let pair = case.pair.with_mu(0.0, 0.0);
    let medium = DiscreteMedium::new(pair, &case.grid).unwrap();
    let modes = normal_modes(&medium).unwrap();
    // six oscillator modes at k0; grid modes stay on their wavenumbers
    assert_eq!(modes.len(), 6);
    assert!(modes.iter().all(|m| (m.omega - 1.0).abs() < 1e-12));
    assert!(orthogonality_residual(&modes) < 1e-12);
    let s = diagonalize_quadratic(&QuadraticHamiltonian::from_medium(&medium).unwrap()).unwrap();
    assert!(s.e0.abs() < 1e-14);
    assert!(e0_from_modes(&medium, &modes).norm() < 1e-14);
}

#[test]
fn oracle_matches_closed_form_on_random_grids() {
    for seed in 0..50 {
        let case = random_case(seed, 32, 0.2).unwrap();
        let medium = DiscreteMedium::new(case.pair, &case.grid).unwrap();
        let probe = ProbeCouplings::from_mode(&case.pair, &case.probe, case.grid.volume()).unwrap();
        let sys = build_system(&medium, &probe).unwrap();
        let solved = solve(&sys, probe.omega).unwrap();
        let closed = direct_coefficients(&medium, &probe).unwrap();
        let scale = closed.big_t.iter().chain(&closed.big_r).map(|c| c.norm()).fold(1.0, f64::max);
        assert!(max_coefficient_difference(&closed, &solved) < 1e-8 * scale, "seed {seed}");
        assert!(system_residual(&sys, &closed) < 1e-10, "seed {seed}");
    }
}

#[test]
fn normal_modes_are_canonical_on_random_grids() {
    for seed in 0..50 {
        let case = random_case(seed, 32, 0.2).unwrap();
        let medium = DiscreteMedium::new(case.pair, &case.grid).unwrap();
        let modes = normal_modes(&medium).unwrap();
        for m in &modes {
            assert!(commutator_residual(&m.coeffs) < 1e-8, "seed {seed}");
        }
        assert!(orthogonality_residual(&modes) < 1e-8, "seed {seed}");
    }
}

#[test]
fn energy_formula_matches_symplectic_diagonalization() {
    let mut seen_32 = false;
    for seed in 0..20 {
        let case = random_case(seed, 32, 0.2).unwrap();
        seen_32 |= case.grid.len() == 32;
        let medium = DiscreteMedium::new(case.pair, &case.grid).unwrap();
        let modes = normal_modes(&medium).unwrap();
        let e = e0_from_modes(&medium, &modes);
        let s = diagonalize_quadratic(&QuadraticHamiltonian::from_medium(&medium).unwrap()).unwrap();
        assert!((e.re - s.e0).abs() < 1e-8 * s.e0.abs(), "seed {seed}: {} vs {}", e.re, s.e0);
        assert!(e.im.abs() < 1e-10 * e.re.abs());
        // every frequency of the form is found by the bracketing search
        let mut all: Vec<f64> = modes.iter().map(|m| m.omega).collect();
        for k in case.grid.distinct_k(1e-12) {
            let stuck = s.frequencies.iter().filter(|&&w| (w - k).abs() < 1e-9).count();
            all.extend(std::iter::repeat(k).take(stuck));
        }
        all.sort_by(f64::total_cmp);
        assert_eq!(all.len(), s.frequencies.len(), "seed {seed}");
        for (a, b) in all.iter().zip(&s.frequencies) {
            assert!((a - b).abs() < 1e-9 * b, "seed {seed}: {a} vs {b}");
        }
    }
    assert!(seen_32);
}

#[test]
fn difference_identities_on_random_grids() {
    for seed in 0..20 {
        let case = random_case(seed, 32, 0.2).unwrap();
        let medium = DiscreteMedium::new(case.pair, &case.grid).unwrap();
        let (kp, kt) = (case.probe.k, 0.5 * case.probe.k + 0.137);
        let floor = 1e-5 * (kp + kt);
        for axis in Axis::ALL {
            for which in Osc::BOTH {
                let (s1, _) = identity_f1(&medium, which, axis, kp, kt, Branch::Plus).unwrap();
                let (s2, _) = identity_f2(&medium, which, axis, kp, kt, Branch::Plus).unwrap();
                let l1 = identity_lhs(&medium, IdentityKind::SameF1(which), axis, kp, kt, 1.0).unwrap();
                let l2 = identity_lhs(&medium, IdentityKind::SameF2(which), axis, kp, kt, 1.0).unwrap();
                assert!((l1 - s1).norm() < 1e-10 * s1.norm().max(floor), "seed {seed}");
                assert!((l2 - s2).norm() < 1e-10 * s2.norm().max(floor), "seed {seed}");
            }
            let (_, c1) = identity_f1(&medium, Osc::One, axis, kp, kt, Branch::Plus).unwrap();
            let (_, c2) = identity_f2(&medium, Osc::One, axis, kp, kt, Branch::Plus).unwrap();
            for sgn in [1.0, -1.0] {
                let l1 = identity_lhs(&medium, IdentityKind::CrossF1, axis, kp, kt, sgn).unwrap();
                let l2 = identity_lhs(&medium, IdentityKind::CrossF2, axis, kp, kt, sgn).unwrap();
                assert!((l1 - c1).norm() < 1e-10 * c1.norm().max(floor), "seed {seed}");
                assert!((l2 - c2).norm() < 1e-10 * c2.norm().max(floor), "seed {seed}");
            }
        }
        assert!(matches!(identity_lhs(&medium, IdentityKind::CrossF1, Axis::X, kp, kp, 1.0), Err(Error::Coincident)));
    }
}

#[test]
fn random_cases_are_reproducible() {
    let a = random_case(7, 16, 0.3).unwrap();
    let b = random_case(7, 16, 0.3).unwrap();
    assert_eq!(a.pair, b.pair);
    assert_eq!(a.grid.modes(), b.grid.modes());
    assert!(a.grid.len() <= 16);
    assert!(random_case(0, 4, 0.3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_family_of_a_normal_mode(seed in 0u64..10_000) {
        let case = random_case(seed, 16, 0.2).unwrap();
        let medium = DiscreteMedium::new(case.pair, &case.grid).unwrap();
        for nm in normal_modes(&medium).unwrap() {
            let l = nm.axis.index();
            let mut lam = [[C64::new(0.0, 0.0); 3]; 2];
            lam[0][l] = nm.coeffs.t[0][l].conj();
            lam[1][l] = nm.coeffs.t[1][l].conj();
            let c = companion_coefficients(&lam, nm.omega, &medium, C64::new(0.0, 0.0));
            let s = nm.coeffs.big_t.iter().chain(nm.coeffs.t.iter().flatten()).map(|v| v.norm()).fold(0.0, f64::max);
            for m in 0..medium.len() {
                let d1 = (c.mu[m] - nm.coeffs.big_t[m].conj()).norm();
                let d2 = (c.eta[m] + nm.coeffs.big_r[m]).norm();
                prop_assert!(d1 <= 1e-12 * s && d2 <= 1e-12 * s, "{} {} {}", d1, d2, s);
            }
        }
    }

    #[test]
    fn swapping_oscillators_keeps_the_spectrum(seed in 0u64..10_000) {
        let case = random_case(seed, 16, 0.2).unwrap();
        let a = DiscreteMedium::new(case.pair, &case.grid).unwrap();
        let sw = case.pair.swapped();
        let b = DiscreteMedium::new(sw, &case.grid).unwrap();
        let ea = diagonalize_quadratic(&QuadraticHamiltonian::from_medium(&a).unwrap()).unwrap();
        let eb = diagonalize_quadratic(&QuadraticHamiltonian::from_medium(&b).unwrap()).unwrap();
        // both are differences of zero-point sums of size ~ k0·dim
        let tol = 1e-14 * (6 + case.grid.len()) as f64;
        prop_assert!((ea.e0 - eb.e0).abs() <= tol, "{} {}", ea.e0, eb.e0);
    }
}
