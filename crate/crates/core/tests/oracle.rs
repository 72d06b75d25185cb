use disloc_spectra::geometry::{DefectMedium, ModeNumbers};
use disloc_spectra::mathieu_oracle::{
    finite_difference_baseline, finite_difference_baseline_with, rotating_oracle,
    solve_eigenvalues, BoundaryCondition, MathieuProblem, OracleError, Shooter,
};
use disloc_spectra::specfun::{bessel_zero, BesselOrder};
use disloc_spectra::spectrum::{energy_hardwall, energy_rotating, Confinement, RotationFrame};

use BoundaryCondition::{Even, Odd};

fn problem(
    beta: f64,
    l: i32,
    k: f64,
    omega: f64,
    bc: BoundaryCondition,
    count: usize,
) -> MathieuProblem {
    let m = DefectMedium::new(beta, 1.0).unwrap();
    let c = Confinement::new(1.0, &m).unwrap();
    MathieuProblem::new(m, l, k, &c, omega, bc, count).unwrap()
}

fn lowest(beta: f64, l: i32, k: f64, bc: BoundaryCondition) -> f64 {
    rotating_oracle(&problem(beta, l, k, 0.0, bc, 1)).unwrap()[0].energy
}

fn bessel_level(beta: f64, l: i32, k: f64, n: u32) -> f64 {
    let m = DefectMedium::new(beta, 1.0).unwrap();
    let c = Confinement::new(1.0, &m).unwrap();
    energy_hardwall(&m, &ModeNumbers::new(n, l, k).unwrap(), &c)
        .unwrap()
        .energy
}

fn slope(betas: &[f64], devs: &[f64]) -> f64 {
    let xs: Vec<f64> = betas.iter().map(|b| b.ln()).collect();
    let ys: Vec<f64> = devs.iter().map(|d| d.abs().ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[test]
fn matches_independent_ode_references() {
    // lowest even eigenvalues from an adaptive 8th-order integrator of the
    // r-space equation, rtol 1e-12
    let reference = [
        (0.05, 0, 0.0, 2.971_567_380_412_774),
        (0.1, 0, 0.0, 3.147_388_529_141_078),
        (0.2, 0, 0.0, 3.722_660_093_026_694_6),
        (0.05, 0, 1.0, 3.497_410_586_290_853),
        (0.1, 0, 1.0, 3.726_636_429_139_611_5),
    ];
    for &(beta, l, k, expected) in &reference {
        let e = lowest(beta, l, k, Even);
        assert!(
            ((e - expected) / expected).abs() < 1e-8,
            "beta={beta} k={k}: {e} vs {expected}"
        );
    }
}

#[test]
fn sturm_ordering_in_both_families() {
    for bc in [Even, Odd] {
        let p = problem(0.1, 1, 1.0, 0.0, bc, 5);
        let found = rotating_oracle(&p).unwrap();
        assert_eq!(found.len(), 5);
        for (s, ev) in found.iter().enumerate() {
            assert_eq!(ev.index, s + 1);
            assert_eq!(ev.node_count, s, "{bc:?} level {}", s + 1);
            assert_eq!(ev.bc, bc);
            assert!(ev.residual < 1e-8, "residual {}", ev.residual);
        }
        assert!(found.windows(2).all(|w| w[1].energy > w[0].energy));
    }
}

#[test]
fn families_differ() {
    let even = lowest(0.2, 1, 0.0, Even);
    let odd = lowest(0.2, 1, 0.0, Odd);
    assert!(odd > even);
}

#[test]
fn step_halving_is_fourth_order() {
    for &(beta, l, k, bc) in &[
        (0.1, 1, 1.0, Even),
        (0.05, 0, 0.0, Odd),
        (0.3, 2, -1.0, Even),
    ] {
        let p = problem(beta, l, k, 0.0, bc, 1);
        let energy = bessel_level(beta, l, k, 2);
        let r: Vec<f64> = [64, 128, 256]
            .iter()
            .map(|&n| Shooter::new(p, n).shoot(energy).unwrap().wall_sine)
            .collect();
        let contraction = (r[0] - r[1]).abs() / (r[1] - r[2]).abs();
        assert!(contraction >= 8.0 * 0.9, "beta={beta}: {contraction}");
    }
}

#[test]
fn small_beta_deviation_is_second_order() {
    let betas = [0.01, 0.02, 0.05];
    for l in 1..=2 {
        for &k in &[0.0, 1.0] {
            let devs: Vec<f64> = betas
                .iter()
                .map(|&b| lowest(b, l, k, Even) - bessel_level(b, l, k, 1))
                .collect();
            let s = slope(&betas, &devs);
            assert!(
                (1.7..=2.3).contains(&s),
                "l={l} k={k}: slope {s} from {devs:?}"
            );
        }
    }
}

#[test]
fn rotation_shifts_oracle_levels_by_omega_gamma() {
    let base = problem(0.1, 1, 1.0, 0.0, Even, 3);
    let still = rotating_oracle(&base).unwrap();
    for &omega in &[-1.0, 0.3, 2.0] {
        let spun = rotating_oracle(&base.with_omega(omega)).unwrap();
        for (a, b) in spun.iter().zip(&still) {
            let expected = b.energy - omega * base.gamma();
            assert!(
                (a.energy - expected).abs() < 1e-8,
                "omega={omega}: {} vs {expected}",
                a.energy
            );
        }
    }
}

#[test]
fn zero_rotation_reproduces_static_solve() {
    let p = problem(0.1, 2, 0.5, 0.0, Odd, 2);
    let a = rotating_oracle(&p).unwrap();
    let b = solve_eigenvalues(&p, p.default_window().unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn rotating_oracle_tracks_closed_form() {
    let beta = 0.05;
    let m = DefectMedium::new(beta, 1.0).unwrap();
    let c = Confinement::new(1.0, &m).unwrap();
    let modes = ModeNumbers::new(1, 1, 1.0).unwrap();
    let closed = energy_rotating(&m, &modes, &c, &RotationFrame::new(0.3).unwrap())
        .unwrap()
        .energy;
    let oracle = rotating_oracle(&problem(beta, 1, 1.0, 0.3, Even, 1)).unwrap()[0].energy;
    assert!(((oracle - closed) / closed).abs() < 10.0 * beta * beta);
}

#[test]
fn static_oracle_tracks_closed_form_for_l_one() {
    let beta = 0.05;
    let e = lowest(beta, 1, 1.0, Even);
    let closed = bessel_level(beta, 1, 1.0, 1);
    assert!(((e - closed) / closed).abs() < 10.0 * beta * beta);
}

#[test]
fn zero_angular_momentum_deviation_exceeds_ten_beta_squared() {
    // the s-wave shift carries a β² ln(1/β) factor and is not bounded by 10β²
    let beta = 0.05;
    let e = lowest(beta, 0, 0.0, Even);
    let closed = bessel_level(0.0, 0, 0.0, 1);
    let rel = (e - closed) / closed;
    assert!((rel - 0.027_658).abs() < 1e-5, "{rel}");
    assert!(rel > 10.0 * beta * beta);
}

#[test]
fn beta_zero_is_not_applicable() {
    let m = DefectMedium::new(0.0, 1.0).unwrap();
    let c = Confinement::new(1.0, &m).unwrap();
    assert_eq!(
        MathieuProblem::new(m, 0, 0.0, &c, 0.0, Even, 1).unwrap_err(),
        OracleError::NotApplicable
    );
}

#[test]
fn baseline_examples() {
    let j = |nu: f64, n| bessel_zero(BesselOrder::new(nu).unwrap(), n).unwrap().value;
    let e0 = finite_difference_baseline(1.0, 0, 0.0, 1.0, 1).unwrap()[0];
    assert!((e0 - j(0.0, 1).powi(2) / 2.0).abs() < 1e-5);
    let e1 = finite_difference_baseline(1.0, 1, 0.0, 1.0, 1).unwrap()[0];
    assert!((e1 - j(1.0, 1).powi(2) / 2.0).abs() < 1e-5);
    let shifted = finite_difference_baseline(1.0, 0, 2.0, 1.0, 1).unwrap()[0];
    assert!((shifted - (e0 + 2.0)).abs() < 1e-12);
}

#[test]
fn baseline_richardson_shift() {
    for l in 0..=2 {
        let coarse = finite_difference_baseline_with(1.0, l, 0.0, 1.0, 3, 4000).unwrap();
        let fine = finite_difference_baseline_with(1.0, l, 0.0, 1.0, 3, 8000).unwrap();
        for (a, b) in coarse.iter().zip(&fine) {
            assert!(((a - b) / b).abs() < 1e-6, "l={l}: {a} vs {b}");
        }
    }
}

#[test]
fn window_without_enough_roots() {
    let p = problem(0.1, 0, 0.0, 0.0, Even, 3);
    let closed = bessel_level(0.1, 0, 0.0, 1);
    match solve_eigenvalues(&p, (0.0, 1.5 * closed)) {
        Err(OracleError::WindowExhausted { found, wanted }) => {
            assert_eq!(wanted, 3);
            assert_eq!(found.len(), 1);
        }
        other => panic!("expected an exhausted window, got {other:?}"),
    }
}
