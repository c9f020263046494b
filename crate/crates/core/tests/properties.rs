use std::f64::consts::{PI, TAU};

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use cqed_bell::bell::{encode, prepare_bell, AngleSet};
use cqed_bell::chsh::{chsh_analytic, chsh_simulated, Pipeline, TSIRELSON_BOUND};
use cqed_bell::quantum::{iswap, rx, ry, rz, Qubit, TwoQubitState};
use cqed_bell::readout::{correlation_from_trace, extract_probs_kernel, extract_probs_naive, ExtractionMethod};
use cqed_bell::spectrum::{
    closed_form_from_expectations, closed_form_spectrum, lorentzian_from_probabilities, lorentzian_spectrum,
    read_trace_csv, write_trace_csv, ATerm, DetuningGrid, DispersiveParams, LindbladSweep, DEFAULT_N_MAX,
};
use cqed_bell::units::mhz;

fn state() -> impl Strategy<Value = TwoQubitState> {
    any::<u64>().prop_map(|seed| TwoQubitState::random(&mut StdRng::seed_from_u64(seed)))
}

fn angle() -> impl Strategy<Value = f64> {
    0.0..TAU
}

fn probabilities() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(0.0..1.0f64)
        .prop_filter("non-zero", |p| p.iter().sum::<f64>() > 1e-3)
        .prop_map(|p| {
            let s: f64 = p.iter().sum();
            p.map(|x| x / s)
        })
}

fn reference() -> DispersiveParams {
    DispersiveParams::reference()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_preserve_norm(s in state(), a in angle(), b in angle(), c in angle()) {
        let out = s
            .apply_single(&rx(a), Qubit::One)
            .apply_single(&ry(b), Qubit::Two)
            .apply_two(&iswap())
            .apply_local(&rz(c), &rx(b));
        assert_abs_diff_eq!(out.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn global_phase_leaves_spectrum_unchanged(s in state(), phase in angle()) {
        let grid = DetuningGrid::uniform(mhz(-25.0), mhz(25.0), 201).unwrap();
        let a = closed_form_spectrum(&s, &reference(), &grid).unwrap();
        let b = closed_form_spectrum(&s.with_global_phase(phase), &reference(), &grid).unwrap();
        prop_assert!(a.max_normalized_deviation(&b).unwrap() < 1e-12);
    }

    #[test]
    fn product_states_factorize(a in angle(), b in angle(), c in angle(), d in angle()) {
        let q = |t: f64, p: f64| [Complex64::new((t / 2.0).cos(), 0.0), Complex64::from_polar((t / 2.0).sin(), p)];
        let s = TwoQubitState::product(q(a, b), q(c, d)).unwrap();
        let e = s.expectations();
        assert_abs_diff_eq!(e.zz, e.z1 * e.z2, epsilon = 1e-12);
    }

    #[test]
    fn correlations_depend_on_angle_sum(t1 in angle(), t2 in angle(), delta in -PI..PI) {
        let p = Pipeline::standard(&reference(), ExtractionMethod::KernelDeconvolution).unwrap();
        let a = p.correlation(t1, t2).unwrap();
        let b = p.correlation(t1 + delta, t2 - delta).unwrap();
        prop_assert!((a.value - b.value).abs() < 1e-9);
    }

    #[test]
    fn spectrum_mirrors_under_qubit_flip(s in state()) {
        let p = reference();
        let grid = DetuningGrid::uniform(mhz(-25.0), mhz(25.0), 201).unwrap();
        let flipped = DetuningGrid::new(grid.points().iter().rev().map(|x| -x).collect()).unwrap();
        let e = s.expectations();
        let a = closed_form_from_expectations(&e, &p, &grid, ATerm::Squared).unwrap();
        let b = closed_form_from_expectations(&e.reversed(), &p, &flipped, ATerm::Squared).unwrap();
        for (x, y) in a.values.iter().zip(b.values.iter().rev()) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn kernel_recovers_probabilities(p in probabilities()) {
        let params = reference();
        let trace = lorentzian_from_probabilities(&p, &params, &DetuningGrid::standard());
        let got = extract_probs_kernel(&trace, &params).unwrap().probabilities();
        for (a, b) in got.iter().zip(p) {
            prop_assert!((a - b).abs() < 1e-9, "{got:?} vs {p:?}");
        }
    }

    #[test]
    fn naive_reading_is_close(s in state()) {
        let params = reference();
        let trace = lorentzian_spectrum(&s, &params, &DetuningGrid::standard());
        let got = extract_probs_naive(&trace, &params).unwrap().probabilities();
        let want = s.probabilities();
        for (a, b) in got.iter().zip(want) {
            prop_assert!((a - b).abs() < 0.02);
        }
    }

    #[test]
    fn simulated_chsh_respects_tsirelson(a in angle(), b in angle(), c in angle(), d in angle()) {
        let set = AngleSet::new(a, b, c, d).unwrap();
        for method in [ExtractionMethod::NaiveHeight, ExtractionMethod::KernelDeconvolution] {
            let r = chsh_simulated(&set, &Pipeline::standard(&reference(), method).unwrap()).unwrap();
            prop_assert!(r.f <= TSIRELSON_BOUND + 5e-3);
            let v = r.values();
            prop_assert_eq!(r.f, (v[0] + v[1] + v[2] - v[3]).abs());
        }
    }

    #[test]
    fn isolated_peak_width_is_kappa(g1 in 5.0..20.0f64, g2 in 3.0..8.0f64, kappa in 0.5..2.0f64) {
        prop_assume!((g1 - g2).abs() > 5.0 * kappa);
        let p = DispersiveParams::new(mhz(g1), mhz(g2), mhz(kappa), 0.0).unwrap();
        let grid = DetuningGrid::uniform(mhz(-40.0), mhz(40.0), 8001).unwrap();
        let t = lorentzian_from_probabilities(&[0.0, 1.0, 0.0, 0.0], &p, &grid);
        let half = 0.5 * t.max_value();
        let above: Vec<f64> = grid
            .points()
            .iter()
            .zip(&t.values)
            .filter(|(_, v)| **v >= half)
            .map(|(x, _)| *x)
            .collect();
        let width = above.last().unwrap() - above.first().unwrap();
        prop_assert!((width - p.kappa).abs() <= 2.0 * grid.max_step() + 0.05 * p.kappa);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn engines_agree_across_parameters(s in state(), g1 in 6.0..20.0f64, g2 in 1.0..5.0f64, kappa in 0.5..2.0f64) {
        let p = DispersiveParams::new(mhz(g1), mhz(g2), mhz(kappa), mhz(0.05)).unwrap();
        let grid = DetuningGrid::uniform(mhz(-30.0), mhz(30.0), 241).unwrap();
        let lorentz = lorentzian_spectrum(&s, &p, &grid);
        let closed = closed_form_spectrum(&s, &p, &grid).unwrap();
        let lindblad = LindbladSweep::new(&p, &grid, DEFAULT_N_MAX).unwrap().trace(&s);
        prop_assert!(closed.max_normalized_deviation(&lorentz).unwrap() < 1e-9);
        prop_assert!(lindblad.max_normalized_deviation(&lorentz).unwrap() < 1e-3);
    }
}

#[test]
fn spectral_weight_sum_rule() {
    // ∫ Σ P_k / ((x − s_k)² + κ²/4) dx = 2π/κ for normalized P
    let p = reference();
    let half = 1000.0 * p.kappa;
    let grid = DetuningGrid::uniform(-half, half, 40_001).unwrap();
    let s = TwoQubitState::random(&mut StdRng::seed_from_u64(5));
    let t = closed_form_spectrum(&s, &p, &grid).unwrap();
    let h = grid.max_step();
    let integral: f64 = t.values.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
    assert!((integral * p.kappa / TAU - 1.0).abs() < 1e-3);
}

#[test]
fn kernel_matches_analytic_on_random_angle_sets() {
    let mut rng = StdRng::seed_from_u64(99);
    let pipeline = Pipeline::standard(&reference(), ExtractionMethod::KernelDeconvolution).unwrap();
    for _ in 0..20 {
        let a: [f64; 4] = std::array::from_fn(|_| rand::Rng::random_range(&mut rng, 0.0..TAU));
        let set = AngleSet::new(a[0], a[1], a[2], a[3]).unwrap();
        let r = chsh_simulated(&set, &pipeline).unwrap();
        assert!((r.f - chsh_analytic(&set)).abs() < 2e-3);
    }
}

#[test]
fn naive_bias_shrinks_with_linewidth() {
    let state = encode(&prepare_bell(), PI / 2.0, 3.0 * PI / 4.0);
    let bias = |kappa: f64| {
        let p = reference().with_kappa(mhz(kappa)).unwrap();
        let t = lorentzian_spectrum(&state, &p, &DetuningGrid::standard());
        let e = correlation_from_trace(&t, &p, ExtractionMethod::NaiveHeight).unwrap().value;
        (e - (5.0 * PI / 4.0).cos()).abs()
    };
    let b: Vec<f64> = [2.0, 1.0, 0.5, 0.1].into_iter().map(bias).collect();
    assert!(b.windows(2).all(|w| w[1] < w[0]), "{b:?}");
    assert!(b[2] < 1e-3 && b[3] < 1e-4);
}

#[test]
fn reports_are_deterministic() {
    let pipeline = Pipeline::standard(&reference(), ExtractionMethod::NaiveHeight).unwrap();
    let a = chsh_simulated(&AngleSet::set2(), &pipeline).unwrap();
    let b = chsh_simulated(&AngleSet::set2(), &pipeline).unwrap();
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn trace_files_round_trip_through_extraction() {
    let p = reference();
    let s = encode(&prepare_bell(), 0.7, 1.1);
    let t = lorentzian_spectrum(&s, &p, &DetuningGrid::standard());
    let mut buf = Vec::new();
    write_trace_csv(&t, &mut buf).unwrap();
    let back = read_trace_csv(buf.as_slice()).unwrap();
    let a = correlation_from_trace(&t, &p, ExtractionMethod::KernelDeconvolution).unwrap();
    let b = correlation_from_trace(&back, &p, ExtractionMethod::KernelDeconvolution).unwrap();
    assert!((a.value - b.value).abs() < 1e-9);
}
