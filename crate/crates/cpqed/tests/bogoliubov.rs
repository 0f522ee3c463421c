use std::f64::consts::PI;

use cpqed::bogoliubov::*;
use cpqed::discrete_oracle::random_case;
use cpqed::model::*;
use cpqed::quad::QuadratureConfig;
use cpqed::resolvent::*;
use cpqed::specfun::Axis;
use cpqed::{Error, C64};
use proptest::prelude::*;

fn continuum(p: OscillatorPair) -> Continuum {
    Continuum { pair: p, cutoff: CutoffScheme::default(), quad: QuadratureConfig::default(), sigma_eval: SigmaEval::Closed }
}

fn z_probe(p: &OscillatorPair, k: f64) -> ProbeCouplings {
    ProbeCouplings::from_mode(p, &Mode::new([0.0, 0.0, k], 2, 1.0).unwrap(), 2.0 * PI).unwrap()
}

#[test]
fn lambda_frozen_value() {
    let p = OscillatorPair::new(1.0, 0.1, 0.1, 5.0).unwrap();
    let c = continuum(p);
    let probe = z_probe(&p, 0.4);
    let w = Freq::Real(0.4, Branch::Plus);
    let want = [
        C64::new(3.59463696700174982809444144206845e-13, 0.0000052158750509728980571676941980098),
        C64::new(0.00000474278188111338851531458565564449, -0.00000217057005034089568282773558639168),
    ];
    for lam in [lambda_coefficients(&c, &probe, w).unwrap(), lambda_via_matrix(&c, &probe, w).unwrap()] {
        for i in 0..2 {
            assert!((lam[i][0] - want[i]).norm() < 1e-9 * want[i].norm(), "{:?}", lam[i][0]);
            assert_eq!(lam[i][1], C64::new(0.0, 0.0));
        }
    }
}

#[test]
fn zero_coupling_leaves_the_mode_alone() {
    let p = OscillatorPair::new(1.0, 0.0, 0.0, 2.0).unwrap();
    let probe = z_probe(&p, 0.4);
    let w = Freq::Real(0.4, Branch::Plus);
    let m = mix_matrix(&continuum(p), Axis::X, w).unwrap();
    assert_eq!(m.m[0][1], C64::new(0.0, 0.0));
    assert!((m.m[0][0] - 1.0 / 0.84).norm() < 1e-15);
    let lam = lambda_coefficients(&continuum(p), &probe, w).unwrap();
    assert!(lam.iter().flatten().all(|c| c.norm() == 0.0));
}

#[test]
fn one_dipole_reduces_to_a_single_oscillator() {
    let p = OscillatorPair::new(1.0, 0.1, 0.0, 2.0).unwrap();
    let c = continuum(p);
    let probe = z_probe(&p, 0.4);
    let w = Freq::Real(0.4, Branch::Plus);
    let lam = lambda_coefficients(&c, &probe, w).unwrap();
    let g1 = c.inv_g(Osc::One, Axis::X, w).unwrap();
    assert!((lam[0][0] - 1.4 * probe.f[0][0] / g1).norm() < 1e-15 * lam[0][0].norm());
    assert!(lam[1].iter().all(|c| c.norm() == 0.0));
}

#[test]
fn exchanging_the_oscillators() {
    let p = OscillatorPair::new(1.0, 0.08, 0.13, 1.7).unwrap();
    let w = Freq::Real(0.55, Branch::Plus);
    for axis in Axis::ALL {
        let a = mix_matrix(&continuum(p), axis, w).unwrap();
        let b = mix_matrix(&continuum(p.swapped()), axis, w).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((a.m[i][j] - b.m[1 - i][1 - j]).norm() < 1e-15 * a.m[i][j].norm().max(1e-300));
            }
        }
    }
}

#[test]
fn dressed_pole_is_reported() {
    let d = [[C64::new(1.0, 0.0), C64::new(1.0, 0.0)], [C64::new(1.0, 0.0), C64::new(1.0, 0.0)]];
    assert!(matches!(mix_from_dressed(&d), Err(Error::DressedPole(_))));
}

#[test]
fn probe_at_a_grid_wavenumber_is_degenerate() {
    let case = random_case(3, 32, 0.2).unwrap();
    let m = DiscreteMedium::new(case.pair, &case.grid).unwrap();
    let k = case.grid.modes()[0].k;
    assert!(matches!(check_nondegenerate(&m, k), Err(Error::Degenerate(_))));
    assert!(matches!(check_nondegenerate(&m, case.pair.k0), Err(Error::Degenerate(_))));
}

#[test]
fn ratio_laws_on_random_grids() {
    for seed in 0..20 {
        let case = random_case(seed, 32, 0.2).unwrap();
        let m = DiscreteMedium::new(case.pair, &case.grid).unwrap();
        let probe = ProbeCouplings::from_mode(&case.pair, &case.probe, case.grid.volume()).unwrap();
        let c = direct_coefficients(&m, &probe).unwrap();
        assert!(ratio_law_residual(&c, case.pair.k0) < 1e-12, "seed {seed}");
        assert!(r_law_residual(&c, &m).unwrap() < 1e-10, "seed {seed}");
        let w = Freq::Real(probe.omega, Branch::Plus);
        let lam = lambda_coefficients(&m, &probe, w).unwrap();
        let inv = companion_coefficients(&lam, probe.omega, &m, C64::new(1.0, 0.0));
        assert!(tau_law_residual(&inv, case.pair.k0) < 1e-12, "seed {seed}");
        assert!(eta_law_residual(&inv, &m).unwrap() < 1e-10, "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn matrix_path_matches_explicit_formulas(
        mu1 in 0.0f64..0.3, mu2 in 0.0f64..0.3, r in 0.5f64..20.0, k in 0.05f64..3.0,
        plus in any::<bool>(), kz in 0.1f64..1.0, kx in -1.0f64..1.0
    ) {
        prop_assume!((k - 1.0).abs() > 1e-3);
        let p = OscillatorPair::new(1.0, mu1, mu2, r).unwrap();
        let c = continuum(p);
        let mode = Mode::new([kx, 0.3, kz], 1, 0.7).unwrap();
        let mut probe = ProbeCouplings::from_mode(&p, &mode, 5.0).unwrap();
        probe.omega = k;
        let b = if plus { Branch::Plus } else { Branch::Minus };
        let w = Freq::Real(k, b);
        let a = lambda_coefficients(&c, &probe, w).unwrap();
        let m = lambda_via_matrix(&c, &probe, w).unwrap();
        let scale = a.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
        for (x, y) in a.iter().flatten().zip(m.iter().flatten()) {
            prop_assert!((x - y).norm() <= 1e-10 * scale);
        }
        for axis in Axis::ALL {
            let d = dressed_matrix(&c, axis, w).unwrap();
            prop_assert!(inverse_residual(&mix_from_dressed(&d).unwrap(), &d) < 1e-12);
        }
    }

    #[test]
    fn branches_give_conjugate_mixing(k in 0.05f64..3.0, r in 0.5f64..10.0) {
        let p = OscillatorPair::new(1.0, 0.1, 0.2, r).unwrap();
        let c = continuum(p);
        let a = mix_matrix(&c, Axis::Z, Freq::Real(k, Branch::Plus)).unwrap();
        let b = mix_matrix(&c, Axis::Z, Freq::Real(k, Branch::Minus)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((a.m[i][j] - b.m[i][j].conj()).norm() <= 1e-15 * a.m[i][j].norm());
            }
        }
    }
}
