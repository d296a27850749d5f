use proptest::prelude::*;

use qwalk_nm::noise::{kraus_at, oun_p, pln_q, rtn_lambda};
use qwalk_nm::observables::position_distribution;
use qwalk_nm::spectral::{mfbf, power_spectrum};
use qwalk_nm::walk::{run_walk, Evolution};
use qwalk_nm::{
    trace_norm_distance, von_neumann_entropy, CoinState, ComplexMatrix, DensityOperator, Factor, NoiseModel,
    WalkConfig, C64,
};

/// G·G† / tr from a flat list of real and imaginary parts.
fn state_from(entries: &[f64], coin_dim: usize, position_dim: usize) -> DensityOperator {
    let n = coin_dim * position_dim;
    let g: Vec<C64> = entries.chunks(2).take(n * n).map(|p| C64::new(p[0], p[1])).collect();
    let g = ComplexMatrix::from_vec(n, n, g).unwrap();
    let mut rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho = rho.scale(C64::new(1.0 / tr, 0.0));
    DensityOperator::new(rho, coin_dim, position_dim).unwrap()
}

fn ginibre(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, 2 * n * n)
}

fn coin() -> impl Strategy<Value = CoinState> {
    (0.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(mix, phase)| {
        CoinState::new(C64::new(mix.sqrt(), 0.0), C64::from_polar((1.0 - mix).sqrt(), phase)).unwrap()
    })
}

fn noise() -> impl Strategy<Value = NoiseModel> {
    prop_oneof![
        (0.01f64..2.0, 0.001f64..10.0).prop_map(|(a, g)| NoiseModel::rtn(a, g)),
        (0.01f64..1.0, 0.001f64..5.0).prop_map(|(r, g)| NoiseModel::oun(r, g)),
        (0.01f64..1.0, 0.001f64..5.0).prop_map(|(r, g)| NoiseModel::pln(r, g)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_distance_is_a_bounded_metric(a in ginibre(6), b in ginibre(6), c in ginibre(6)) {
        let (r, s, t) = (state_from(&a, 2, 3), state_from(&b, 2, 3), state_from(&c, 2, 3));
        let rs = trace_norm_distance(&r, &s).unwrap();
        let sr = trace_norm_distance(&s, &r).unwrap();
        let st = trace_norm_distance(&s, &t).unwrap();
        let rt = trace_norm_distance(&r, &t).unwrap();
        prop_assert!((rs - sr).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&rs));
        prop_assert!(rt <= rs + st + 1e-9);
        prop_assert!(trace_norm_distance(&r, &r).unwrap() < 1e-9);
    }

    #[test]
    fn partial_trace_is_linear_and_trace_preserving(a in ginibre(6), b in ginibre(6), w in 0.0f64..1.0) {
        let (r, s) = (state_from(&a, 2, 3), state_from(&b, 2, 3));
        let mix = &r.matrix().scale(C64::new(w, 0.0)) + &s.matrix().scale(C64::new(1.0 - w, 0.0));
        let mix = DensityOperator::new(mix, 2, 3).unwrap();
        for keep in [Factor::Coin, Factor::Position] {
            let lhs = mix.partial_trace(keep);
            prop_assert!((lhs.trace() - 1.0).abs() < 1e-12);
            let rhs = &r.partial_trace(keep).matrix().scale(C64::new(w, 0.0))
                + &s.partial_trace(keep).matrix().scale(C64::new(1.0 - w, 0.0));
            prop_assert!(lhs.matrix().max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn entropy_is_additive_on_products(a in ginibre(2), b in ginibre(3)) {
        let coin = state_from(&a, 2, 1);
        let pos = state_from(&b, 1, 3);
        let product = DensityOperator::product(coin.matrix(), pos.matrix()).unwrap();
        let sum = von_neumann_entropy(&coin).unwrap() + von_neumann_entropy(&pos).unwrap();
        prop_assert!((von_neumann_entropy(&product).unwrap() - sum).abs() < 1e-9);
    }

    #[test]
    fn noiseless_walks_stay_pure_inside_the_light_cone(c in coin(), theta in 0.0f64..1.5, steps in 1usize..14) {
        let cfg = WalkConfig::new(steps).with_coin(c).with_angle(theta);
        let lattice = cfg.lattice();
        run_walk(&cfg, None, |n, rho| {
            assert!((rho.purity() - 1.0).abs() < 1e-10);
            for (x, p) in lattice.positions().zip(position_distribution(rho)) {
                if x.unsigned_abs() as usize > n {
                    assert!(p < 1e-28, "P({x}) = {p} after {n} steps");
                }
            }
            Ok(())
        }).unwrap();
    }

    #[test]
    fn noiseless_full_state_distance_is_conserved(a in coin(), b in coin(), steps in 1usize..12) {
        let cfg_a = WalkConfig::new(steps).with_coin(a);
        let cfg_b = WalkConfig::new(steps).with_coin(b);
        let mut ea = Evolution::new(&cfg_a, None).unwrap();
        let mut eb = Evolution::new(&cfg_b, None).unwrap();
        let d0 = trace_norm_distance(ea.state(), eb.state()).unwrap();
        while ea.advance().unwrap() && eb.advance().unwrap() {
            let d = trace_norm_distance(ea.state(), eb.state()).unwrap();
            prop_assert!((d - d0).abs() < 1e-10);
        }
    }

    #[test]
    fn noisy_steps_are_trace_and_positivity_preserving(n in noise(), c in coin(), steps in 1usize..16) {
        let cfg = WalkConfig::new(steps).with_coin(c);
        run_walk(&cfg, Some(n), |_, rho| {
            assert!((rho.trace() - 1.0).abs() < 1e-10);
            assert!(rho.min_eigenvalue().unwrap() >= -1e-9);
            Ok(())
        }).unwrap();
    }

    #[test]
    fn kraus_completeness_holds(n in noise(), t in 0.0f64..500.0) {
        prop_assert!(kraus_at(&n, t).unwrap().completeness_residual() <= 1e-10);
    }

    #[test]
    fn mfbf_blocks_balance_their_residuals(y in proptest::collection::vec(-3.0f64..3.0, 1..80)) {
        let fit = mfbf(&y);
        for block in &fit.blocks {
            let s: f64 = fit.residual[block.clone()].iter().sum();
            prop_assert!(s.abs() < 1e-10);
        }
        let again = mfbf(&fit.fitted);
        prop_assert_eq!(&again.fitted, &fit.fitted);
    }

    #[test]
    fn spectrum_is_symmetric_and_conserves_energy(x in proptest::collection::vec(-5.0f64..5.0, 1..200)) {
        let spec = power_spectrum(&x);
        let n = x.len();
        let energy: f64 = x.iter().map(|v| v * v).sum();
        let total: f64 = spec.power.iter().sum::<f64>() / n as f64;
        prop_assert!((energy - total).abs() <= 1e-9 * energy.max(1.0));
        let scale = spec.power.iter().copied().fold(1.0, f64::max);
        for k in 1..n {
            prop_assert!((spec.power[k] - spec.power[n - k]).abs() <= 1e-9 * scale);
        }
    }
}

fn grid(n: usize, hi: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| hi * i as f64 / (n - 1) as f64)
}

#[test]
fn rtn_lambda_is_bounded_in_both_regimes() {
    for (a, gamma) in [(0.05, 0.001), (1.0, 0.001), (0.05, 1.0), (0.4, 5.0), (0.5, 1.0), (2.0, 0.5)] {
        for nu in grid(10_000, 200.0) {
            let l = rtn_lambda(a, gamma, nu / gamma);
            assert!(l.abs() <= 1.0 + 1e-12, "a={a} γ={gamma} ν={nu}: {l}");
        }
    }
}

#[test]
fn rtn_lambda_is_continuous_across_the_critical_point() {
    let gamma = 0.8;
    for nu in grid(500, 40.0) {
        let t = nu / gamma;
        let below = rtn_lambda(0.5 * gamma * (1.0 - 1e-6f64).sqrt(), gamma, t);
        let above = rtn_lambda(0.5 * gamma * (1.0 + 1e-6f64).sqrt(), gamma, t);
        assert!((below - above).abs() < 1e-5, "ν={nu}: {below} vs {above}");
    }
}

#[test]
fn oun_and_pln_factors_are_monotone_and_bounded() {
    for (r, g) in [(0.1, 0.01), (0.1, 1.0), (1.0, 0.001), (0.5, 5.0)] {
        let p: Vec<f64> = grid(2_000, 500.0).map(|t| oun_p(r, g, t)).collect();
        let q: Vec<f64> = grid(2_000, 500.0).map(|t| pln_q(r, g, 3.0, t).unwrap()).collect();
        for s in [&p, &q] {
            assert!(s.iter().all(|&v| v > 0.0 && v <= 1.0));
            assert!(s.windows(2).all(|w| w[1] <= w[0]));
        }
    }
}
