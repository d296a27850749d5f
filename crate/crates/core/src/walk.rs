//! Coin, shift and walk operators on a finite line, and stepwise evolution
//! of the walker's density operator.
//!
//! One step maps ρ to `W ρ W†` with `W = S·(C ⊗ I)`. Under noise the step is
//! followed by the coin channel evaluated at the elapsed step count `n`:
//!
//! ```text
//! ρ(n) = Σᵢ (Kᵢ(n) ⊗ I) W ρ(n−1) W† (Kᵢ(n)† ⊗ I)
//! ```
//!
//! Each step is CPTP on its own because every Kraus pair is complete. The
//! lattice is a ring of `2h + 1` sites with `h ≥ T + 1`, so the wrap-around
//! edge that keeps `S` unitary is never reached within `T` steps.

use serde::{Deserialize, Serialize};

use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::noise::{kraus_at, KrausPair, NoiseModel};

pub const UNIT_NORM_TOLERANCE: f64 = 1e-12;
/// Kraus pairs passed to [`noisy_step`] must be complete to this residual.
pub const STEP_COMPLETENESS_TOLERANCE: f64 = 1e-8;
pub const STEP_TRACE_TOLERANCE: f64 = 1e-10;

/// Sites `−h..=h` of a finite line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub halfwidth: usize,
}

impl Lattice {
    pub fn new(halfwidth: usize) -> Self {
        Self { halfwidth }
    }

    pub fn size(&self) -> usize {
        2 * self.halfwidth + 1
    }

    /// Slot of site `x`, if it lies on the lattice.
    pub fn index(&self, x: i64) -> Option<usize> {
        let h = self.halfwidth as i64;
        (-h..=h).contains(&x).then(|| (x + h) as usize)
    }

    pub fn position(&self, index: usize) -> i64 {
        index as i64 - self.halfwidth as i64
    }

    pub fn positions(&self) -> impl Iterator<Item = i64> {
        let h = self.halfwidth as i64;
        -h..=h
    }
}

/// Initial coin amplitudes `α|0⟩ + β|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinState(pub [C64; 2]);

impl CoinState {
    /// Normalized custom coin; errors unless ‖(α, β)‖ = 1.
    pub fn new(up: C64, down: C64) -> Result<Self> {
        let state = CoinState([up, down]);
        let norm = state.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOLERANCE {
            return Err(Error::Config(format!("coin state has norm {norm}, expected 1")));
        }
        Ok(state)
    }

    pub fn up() -> Self {
        CoinState([C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
    }

    /// (|0⟩ + |1⟩)/√2
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        CoinState([C64::new(h, 0.0), C64::new(h, 0.0)])
    }

    /// (|0⟩ − |1⟩)/√2
    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        CoinState([C64::new(h, 0.0), C64::new(-h, 0.0)])
    }

    /// (|0⟩ + i|1⟩)/√2, which spreads symmetrically under the Hadamard coin.
    pub fn symmetric() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        CoinState([C64::new(h, 0.0), C64::new(0.0, h)])
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub steps: usize,
    /// Rotation angle θ of the coin; π/4 is the Hadamard coin.
    pub coin_angle: f64,
    pub initial_coin: CoinState,
    pub initial_position: i64,
    pub lattice_halfwidth: usize,
}

impl WalkConfig {
    /// Hadamard walk from the origin with the symmetric coin on the smallest
    /// admissible lattice.
    pub fn new(steps: usize) -> Self {
        Self {
            steps,
            coin_angle: std::f64::consts::FRAC_PI_4,
            initial_coin: CoinState::symmetric(),
            initial_position: 0,
            lattice_halfwidth: steps + 1,
        }
    }

    pub fn with_coin(mut self, coin: CoinState) -> Self {
        self.initial_coin = coin;
        self
    }

    pub fn with_angle(mut self, theta: f64) -> Self {
        self.coin_angle = theta;
        self
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.lattice_halfwidth)
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.initial_coin.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOLERANCE {
            return Err(Error::Config(format!("initial coin has norm {norm}, expected 1")));
        }
        if !self.coin_angle.is_finite() {
            return Err(Error::Config("coin angle must be finite".into()));
        }
        let reach = self.initial_position.unsigned_abs() as usize + self.steps + 1;
        if self.lattice_halfwidth < reach {
            return Err(Error::Config(format!(
                "lattice halfwidth {} cannot contain {} steps from x = {} (need {reach})",
                self.lattice_halfwidth, self.steps, self.initial_position
            )));
        }
        Ok(())
    }

    /// ρ(0) = |coin⟩⟨coin| ⊗ |x₀⟩⟨x₀|.
    pub fn initial_state(&self) -> Result<DensityOperator> {
        self.validate()?;
        let lattice = self.lattice();
        let np = lattice.size();
        let slot = lattice.index(self.initial_position).expect("validated");
        let mut psi = vec![C64::new(0.0, 0.0); 2 * np];
        psi[slot] = self.initial_coin.0[0];
        psi[np + slot] = self.initial_coin.0[1];
        Ok(DensityOperator::from_parts_unchecked(
            ComplexMatrix::outer(&psi, &psi),
            2,
            np,
        ))
    }
}

/// C(θ) = [[cos θ, sin θ], [sin θ, −cos θ]].
pub fn coin_operator(theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    ComplexMatrix::from_real_rows(&[vec![c, s], vec![s, -c]]).expect("2x2")
}

/// S = |0⟩⟨0| ⊗ Σ|i−1⟩⟨i| + |1⟩⟨1| ⊗ Σ|i+1⟩⟨i| on the ring of lattice sites.
pub fn shift_operator(lattice: Lattice) -> ComplexMatrix {
    let np = lattice.size();
    let mut s = ComplexMatrix::zeros(2 * np, 2 * np);
    for i in 0..np {
        s[((i + np - 1) % np, i)] = C64::new(1.0, 0.0);
        s[(np + (i + 1) % np, np + i)] = C64::new(1.0, 0.0);
    }
    s
}

#[derive(Debug, Clone)]
pub struct WalkOperators {
    pub coin: ComplexMatrix,
    pub shift: ComplexMatrix,
    pub walk: ComplexMatrix,
    pub lattice: Lattice,
}

pub fn build_operators(cfg: &WalkConfig) -> Result<WalkOperators> {
    cfg.validate()?;
    let lattice = cfg.lattice();
    let coin = coin_operator(cfg.coin_angle);
    let shift = shift_operator(lattice);
    let walk = shift.matmul(&coin.kron(&ComplexMatrix::identity(lattice.size())))?;
    Ok(WalkOperators {
        coin,
        shift,
        walk,
        lattice,
    })
}

/// Coefficients w[a][b][c][d] of the block map ρ_ab ← Σ_cd w·ρ_cd induced by
/// Σᵢ (Mᵢ ⊗ I) ρ (Mᵢ† ⊗ I).
fn coin_block_weights(ops: &[&ComplexMatrix]) -> [[[[C64; 2]; 2]; 2]; 2] {
    let mut w = [[[[C64::new(0.0, 0.0); 2]; 2]; 2]; 2];
    for m in ops {
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        w[a][b][c][d] += m[(a, c)] * m[(b, d)].conj();
                    }
                }
            }
        }
    }
    w
}

fn apply_coin_map(rho: &ComplexMatrix, np: usize, w: &[[[[C64; 2]; 2]; 2]; 2]) -> ComplexMatrix {
    let dim = 2 * np;
    let mut out = ComplexMatrix::zeros(dim, dim);
    let src = rho.as_slice();
    let dst = out.as_mut_slice();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    let coef = w[a][b][c][d];
                    if coef.re == 0.0 && coef.im == 0.0 {
                        continue;
                    }
                    for x in 0..np {
                        let s = &src[(c * np + x) * dim + d * np..(c * np + x) * dim + (d + 1) * np];
                        let o = &mut dst[(a * np + x) * dim + b * np..(a * np + x) * dim + (b + 1) * np];
                        for (o, s) in o.iter_mut().zip(s) {
                            *o += coef * s;
                        }
                    }
                }
            }
        }
    }
    out
}

/// S ρ S† by index relabelling: coin 0 moves left, coin 1 moves right.
fn apply_shift(rho: &ComplexMatrix, np: usize) -> ComplexMatrix {
    let dim = 2 * np;
    let mut out = ComplexMatrix::zeros(dim, dim);
    let src = rho.as_slice();
    let dst = out.as_mut_slice();
    // New site x under coin a came from x + offset[a].
    let offset = [1usize, np - 1];
    for a in 0..2 {
        for x in 0..np {
            let from_x = (x + offset[a]) % np;
            for b in 0..2 {
                let src_row = &src[(a * np + from_x) * dim + b * np..(a * np + from_x) * dim + (b + 1) * np];
                let dst_row = &mut dst[(a * np + x) * dim + b * np..(a * np + x) * dim + (b + 1) * np];
                let k = offset[b] % np;
                // dst[y] = src[(y + k) % np]
                dst_row[..np - k].copy_from_slice(&src_row[k..]);
                dst_row[np - k..].copy_from_slice(&src_row[..k]);
            }
        }
    }
    out
}

fn check_dims(rho: &DensityOperator, ops: &WalkOperators) -> Result<usize> {
    let np = ops.lattice.size();
    if rho.coin_dim() != 2 || rho.position_dim() != np {
        return Err(Error::Shape(format!(
            "state factors {}x{} do not match walk on {np} sites",
            rho.coin_dim(),
            rho.position_dim()
        )));
    }
    Ok(np)
}

/// ρ ↦ W ρ W†.
pub fn unitary_step(rho: &DensityOperator, ops: &WalkOperators) -> Result<DensityOperator> {
    let np = check_dims(rho, ops)?;
    let coined = apply_coin_map(rho.matrix(), np, &coin_block_weights(&[&ops.coin]));
    Ok(DensityOperator::from_parts_unchecked(apply_shift(&coined, np), 2, np))
}

/// ρ ↦ Σᵢ (Kᵢ ⊗ I) W ρ W† (Kᵢ† ⊗ I).
pub fn noisy_step(
    rho: &DensityOperator,
    ops: &WalkOperators,
    kraus: &KrausPair,
) -> Result<DensityOperator> {
    kraus.check_completeness(STEP_COMPLETENESS_TOLERANCE)?;
    let stepped = unitary_step(rho, ops)?;
    let np = ops.lattice.size();
    let out = apply_coin_map(
        stepped.matrix(),
        np,
        &coin_block_weights(&[&kraus.k1, &kraus.k2]),
    );
    Ok(DensityOperator::from_parts_unchecked(out, 2, np))
}

/// Stepwise evolution of one walk.
#[derive(Debug, Clone)]
pub struct Evolution {
    ops: WalkOperators,
    noise: Option<NoiseModel>,
    state: DensityOperator,
    step: usize,
    steps: usize,
}

impl Evolution {
    pub fn new(cfg: &WalkConfig, noise: Option<NoiseModel>) -> Result<Self> {
        if let Some(n) = &noise {
            n.validate()?;
        }
        let ops = build_operators(cfg)?;
        Ok(Self {
            ops,
            noise,
            state: cfg.initial_state()?,
            step: 0,
            steps: cfg.steps,
        })
    }

    pub fn state(&self) -> &DensityOperator {
        &self.state
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn operators(&self) -> &WalkOperators {
        &self.ops
    }

    /// Kraus pair applied on step `n` (elapsed time t = n, Δt = 1).
    pub fn kraus_for_step(&self, n: usize) -> Result<Option<KrausPair>> {
        self.noise.as_ref().map(|noise| kraus_at(noise, n as f64)).transpose()
    }

    /// Advances one step; returns `false` once the configured count is done.
    pub fn advance(&mut self) -> Result<bool> {
        if self.step >= self.steps {
            return Ok(false);
        }
        let n = self.step + 1;
        self.state = match self.kraus_for_step(n)? {
            Some(kraus) => noisy_step(&self.state, &self.ops, &kraus)?,
            None => unitary_step(&self.state, &self.ops)?,
        };
        let tr = self.state.trace();
        if (tr - 1.0).abs() > STEP_TRACE_TOLERANCE || !tr.is_finite() {
            return Err(Error::Integrity(format!("trace {tr} after step {n}")));
        }
        self.step = n;
        Ok(true)
    }
}

/// Runs the walk, handing every state ρ(0), …, ρ(T) to `visit` in order.
pub fn run_walk<F>(cfg: &WalkConfig, noise: Option<NoiseModel>, mut visit: F) -> Result<()>
where
    F: FnMut(usize, &DensityOperator) -> Result<()>,
{
    let mut evolution = Evolution::new(cfg, noise)?;
    visit(0, evolution.state())?;
    while evolution.advance()? {
        visit(evolution.step_index(), evolution.state())?;
    }
    Ok(())
}

/// Collects every snapshot. Memory grows as `T³`; meant for short walks.
pub fn run_walk_collect(cfg: &WalkConfig, noise: Option<NoiseModel>) -> Result<Vec<DensityOperator>> {
    let mut out = Vec::with_capacity(cfg.steps + 1);
    run_walk(cfg, noise, |_, rho| {
        out.push(rho.clone());
        Ok(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{trace_norm_distance, Factor};
    use crate::matrix::pauli;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn populations_by_site(rho: &DensityOperator, lattice: Lattice) -> Vec<f64> {
        let np = lattice.size();
        let pops = rho.populations();
        (0..np).map(|x| pops[x] + pops[np + x]).collect()
    }

    /// Sum over all 2^T coin paths of the amplitude to end at (coin, x).
    fn path_sum(theta: f64, coin: CoinState, steps: usize) -> std::collections::BTreeMap<i64, f64> {
        let (s, cs) = theta.sin_cos();
        let u = [[cs, s], [s, -cs]];
        let mut amps: std::collections::BTreeMap<(usize, i64), C64> = Default::default();
        for path in 0..(1u32 << (2 * steps)) {
            // Each step picks (from_coin, to_coin); keep only consistent chains.
            let mut start = None;
            let mut x = 0i64;
            let mut amp = c(1.0, 0.0);
            let mut prev_to = None;
            let mut valid = true;
            for k in 0..steps {
                let bits = (path >> (2 * k)) & 3;
                let from = (bits & 1) as usize;
                let to = ((bits >> 1) & 1) as usize;
                if let Some(p) = prev_to {
                    if p != from {
                        valid = false;
                        break;
                    }
                } else {
                    start = Some(from);
                }
                amp *= u[to][from];
                x += if to == 0 { -1 } else { 1 };
                prev_to = Some(to);
            }
            if !valid {
                continue;
            }
            let s0 = start.unwrap();
            *amps.entry((prev_to.unwrap(), x)).or_insert(c(0.0, 0.0)) += amp * coin.0[s0];
        }
        let mut probs = std::collections::BTreeMap::new();
        for ((_, x), a) in amps {
            *probs.entry(x).or_insert(0.0) += a.norm_sqr();
        }
        probs
    }

    #[test]
    fn hadamard_coin_at_quarter_pi() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = ComplexMatrix::from_real_rows(&[vec![h, h], vec![h, -h]]).unwrap();
        assert!(coin_operator(std::f64::consts::FRAC_PI_4).max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn shift_moves_coin_zero_left() {
        let cfg = WalkConfig::new(3);
        let ops = build_operators(&cfg).unwrap();
        let lattice = cfg.lattice();
        let np = lattice.size();
        let mut ket = vec![c(0.0, 0.0); 2 * np];
        ket[lattice.index(0).unwrap()] = c(1.0, 0.0);
        let col = ComplexMatrix::from_vec(2 * np, 1, ket).unwrap();
        let moved = &ops.shift * &col;
        assert_eq!(moved[(lattice.index(-1).unwrap(), 0)], c(1.0, 0.0));
        let mut ket = vec![c(0.0, 0.0); 2 * np];
        ket[np + lattice.index(0).unwrap()] = c(1.0, 0.0);
        let moved = &ops.shift * &ComplexMatrix::from_vec(2 * np, 1, ket).unwrap();
        assert_eq!(moved[(np + lattice.index(1).unwrap(), 0)], c(1.0, 0.0));
    }

    #[test]
    fn operators_are_unitary() {
        for theta in [0.1, 0.7, std::f64::consts::FRAC_PI_4, 1.3, 2.9] {
            let ops = build_operators(&WalkConfig::new(4).with_angle(theta)).unwrap();
            assert!(ops.coin.unitarity_defect() < 1e-12);
            assert!(ops.shift.unitarity_defect() < 1e-12);
            assert!(ops.walk.unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn structured_step_matches_dense_product() {
        let cfg = WalkConfig::new(4).with_angle(0.6).with_coin(CoinState::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap());
        let ops = build_operators(&cfg).unwrap();
        let mut rho = cfg.initial_state().unwrap();
        let kraus = kraus_at(&NoiseModel::rtn(1.0, 0.3), 2.0).unwrap();
        for _ in 0..3 {
            let dense = &(&ops.walk * rho.matrix()) * &ops.walk.adjoint();
            let fast = unitary_step(&rho, &ops).unwrap();
            assert!(fast.matrix().max_abs_diff(&dense) < 1e-14);

            let big = |k: &ComplexMatrix| k.kron(&ComplexMatrix::identity(ops.lattice.size()));
            let (k1, k2) = (big(&kraus.k1), big(&kraus.k2));
            let dense_noisy = &(&(&k1 * &dense) * &k1.adjoint()) + &(&(&k2 * &dense) * &k2.adjoint());
            let fast_noisy = noisy_step(&rho, &ops, &kraus).unwrap();
            assert!(fast_noisy.matrix().max_abs_diff(&dense_noisy) < 1e-14);
            rho = fast_noisy;
        }
    }

    #[test]
    fn one_hadamard_step_from_coin_up() {
        let cfg = WalkConfig::new(1).with_coin(CoinState::up());
        let states = run_walk_collect(&cfg, None).unwrap();
        let p = populations_by_site(&states[1], cfg.lattice());
        let l = cfg.lattice();
        assert!((p[l.index(-1).unwrap()] - 0.5).abs() < 1e-15);
        assert!((p[l.index(1).unwrap()] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn plus_coin_moves_entirely_left() {
        let cfg = WalkConfig::new(1).with_coin(CoinState::plus());
        let states = run_walk_collect(&cfg, None).unwrap();
        let p = populations_by_site(&states[1], cfg.lattice());
        assert!((p[cfg.lattice().index(-1).unwrap()] - 1.0).abs() < 1e-15);
        assert!((states[1].purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn three_steps_match_path_sum() {
        for (theta, coin) in [
            (std::f64::consts::FRAC_PI_4, CoinState::symmetric()),
            (0.4, CoinState::up()),
            (1.1, CoinState::new(c(0.6, 0.0), c(0.0, -0.8)).unwrap()),
        ] {
            let cfg = WalkConfig::new(3).with_angle(theta).with_coin(coin);
            let states = run_walk_collect(&cfg, None).unwrap();
            let p = populations_by_site(&states[3], cfg.lattice());
            let oracle = path_sum(theta, coin, 3);
            for x in cfg.lattice().positions() {
                let expected = oracle.get(&x).copied().unwrap_or(0.0);
                assert!((p[cfg.lattice().index(x).unwrap()] - expected).abs() < 1e-14, "x={x}");
            }
        }
    }

    #[test]
    fn identity_kraus_equals_unitary_step() {
        let cfg = WalkConfig::new(5);
        let ops = build_operators(&cfg).unwrap();
        let rho = cfg.initial_state().unwrap();
        let a = unitary_step(&rho, &ops).unwrap();
        let b = noisy_step(&rho, &ops, &KrausPair::identity()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn complete_dephasing_kills_coin_coherence() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let pair = KrausPair::new(
            ComplexMatrix::identity(2).scale(c(h, 0.0)),
            pauli::sigma_z().scale(c(h, 0.0)),
            1.0,
        )
        .unwrap();
        let cfg = WalkConfig::new(5).with_coin(CoinState::up());
        let ops = build_operators(&cfg).unwrap();
        let rho = noisy_step(&cfg.initial_state().unwrap(), &ops, &pair).unwrap();
        let coin = rho.partial_trace(Factor::Coin);
        assert_eq!(coin.matrix()[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let cfg = WalkConfig::new(2);
        let ops = build_operators(&cfg).unwrap();
        let bad = KrausPair::new(ComplexMatrix::identity(2), ComplexMatrix::identity(2), 1.0).unwrap();
        assert!(matches!(
            noisy_step(&cfg.initial_state().unwrap(), &ops, &bad),
            Err(Error::Integrity(_))
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = WalkConfig::new(10);
        cfg.lattice_halfwidth = 10;
        assert!(matches!(build_operators(&cfg), Err(Error::Config(_))));
        let mut cfg = WalkConfig::new(10);
        cfg.initial_coin = CoinState([c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        assert!(CoinState::new(c(0.6, 0.0), c(0.8, 0.0)).is_ok());
    }

    #[test]
    fn light_cone_and_unitary_invariants() {
        let steps = 12;
        let cfg = WalkConfig::new(steps).with_angle(0.9);
        let lattice = cfg.lattice();
        let plus = run_walk_collect(&cfg.clone().with_coin(CoinState::plus()), None).unwrap();
        let minus = run_walk_collect(&cfg.with_coin(CoinState::minus()), None).unwrap();
        for (n, (a, b)) in plus.iter().zip(&minus).enumerate() {
            let p = populations_by_site(a, lattice);
            for x in lattice.positions() {
                if x.unsigned_abs() as usize > n {
                    assert!(p[lattice.index(x).unwrap()] < 1e-14);
                }
            }
            assert!((a.purity() - 1.0).abs() < 1e-10);
            assert!((trace_norm_distance(a, b).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn noisy_steps_stay_physical() {
        let cfg = WalkConfig::new(15);
        for noise in [NoiseModel::rtn(1.0, 0.001), NoiseModel::oun(0.1, 0.01), NoiseModel::pln(0.1, 0.01)] {
            run_walk(&cfg, Some(noise), |_, rho| {
                assert!((rho.trace() - 1.0).abs() < 1e-10);
                rho.check_positive()
            })
            .unwrap();
        }
    }
}
