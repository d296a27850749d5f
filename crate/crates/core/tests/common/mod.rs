#![allow(dead_code)]

use num_complex::Complex64;

pub type Amp = Complex64;

/// Pure-state Hadamard-type walk on amplitudes ψ[c][x], written without any of
/// the library's matrix or lattice machinery.
#[derive(Clone)]
pub struct StateVectorWalk {
    pub reach: usize,
    pub up: Vec<Amp>,
    pub down: Vec<Amp>,
    pub theta: f64,
}

impl StateVectorWalk {
    pub fn new(steps: usize, theta: f64, coin: [Amp; 2]) -> Self {
        let width = 2 * steps + 3;
        let mut up = vec![Amp::new(0.0, 0.0); width];
        let mut down = vec![Amp::new(0.0, 0.0); width];
        up[steps + 1] = coin[0];
        down[steps + 1] = coin[1];
        Self {
            reach: steps + 1,
            up,
            down,
            theta,
        }
    }

    /// Coin then shift: |0⟩ moves to x − 1, |1⟩ to x + 1.
    pub fn step(&mut self) {
        let (s, c) = self.theta.sin_cos();
        let n = self.up.len();
        let mut up = vec![Amp::new(0.0, 0.0); n];
        let mut down = vec![Amp::new(0.0, 0.0); n];
        for x in 0..n {
            let a = self.up[x] * c + self.down[x] * s;
            let b = self.up[x] * s - self.down[x] * c;
            if x > 0 {
                up[x - 1] += a;
            }
            if x + 1 < n {
                down[x + 1] += b;
            }
        }
        self.up = up;
        self.down = down;
    }

    /// σz on the coin.
    pub fn phase_flip(&mut self) {
        for z in &mut self.down {
            *z = -*z;
        }
    }

    /// (x, P(x)) over the tracked window.
    pub fn distribution(&self) -> Vec<(i64, f64)> {
        (0..self.up.len())
            .map(|i| {
                (
                    i as i64 - self.reach as i64,
                    self.up[i].norm_sqr() + self.down[i].norm_sqr(),
                )
            })
            .collect()
    }

    /// Reduced coin density matrix [[ρ00, ρ01], [ρ10, ρ11]].
    pub fn coin_matrix(&self) -> [[Amp; 2]; 2] {
        let mut m = [[Amp::new(0.0, 0.0); 2]; 2];
        for (u, d) in self.up.iter().zip(&self.down) {
            m[0][0] += u * u.conj();
            m[0][1] += u * d.conj();
            m[1][0] += d * u.conj();
            m[1][1] += d * d.conj();
        }
        m
    }
}

/// Exact mixed-state evolution under per-step coin dephasing with factors
/// `f[n]` (applied after step n), by enumerating all 2^T branches of
/// {I, σz} insertions with weights (1 ± f)/2. Returns P(x) and the coin matrix.
pub fn dephasing_ensemble(
    steps: usize,
    theta: f64,
    coin: [Amp; 2],
    factors: &[f64],
) -> (Vec<(i64, f64)>, [[Amp; 2]; 2]) {
    assert!(steps <= 16 && factors.len() == steps);
    let width = 2 * steps + 3;
    let mut dist = vec![0.0; width];
    let mut coin_m = [[Amp::new(0.0, 0.0); 2]; 2];
    for pattern in 0u32..(1 << steps) {
        let mut weight = 1.0;
        let mut walk = StateVectorWalk::new(steps, theta, coin);
        for (n, f) in factors.iter().enumerate() {
            walk.step();
            if pattern >> n & 1 == 1 {
                weight *= 0.5 * (1.0 - f);
                walk.phase_flip();
            } else {
                weight *= 0.5 * (1.0 + f);
            }
        }
        if weight == 0.0 {
            continue;
        }
        for (slot, (_, p)) in dist.iter_mut().zip(walk.distribution()) {
            *slot += weight * p;
        }
        let m = walk.coin_matrix();
        for i in 0..2 {
            for j in 0..2 {
                coin_m[i][j] += m[i][j] * weight;
            }
        }
    }
    let reach = steps as i64 + 1;
    (
        dist.into_iter().enumerate().map(|(i, p)| (i as i64 - reach, p)).collect(),
        coin_m,
    )
}

/// Trace distance ½‖a − b‖₁ of two 2×2 Hermitian matrices, in closed form.
pub fn qubit_trace_distance(a: &[[Amp; 2]; 2], b: &[[Amp; 2]; 2]) -> f64 {
    let d00 = (a[0][0] - b[0][0]).re;
    let d11 = (a[1][1] - b[1][1]).re;
    let d01 = a[0][1] - b[0][1];
    // Eigenvalues of [[d00, d01], [d01*, d11]] are m ± r.
    let m = 0.5 * (d00 + d11);
    let r = (0.25 * (d00 - d11).powi(2) + d01.norm_sqr()).sqrt();
    0.5 * ((m + r).abs() + (m - r).abs())
}

/// Ordinary least-squares slope of y against x.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Minimum-SSE non-increasing fit of `y`, by enumerating every contiguous
/// block partition and keeping the best feasible vector of block means.
pub fn brute_force_antitonic(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    if n == 0 {
        return Vec::new();
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for cuts in 0u32..(1 << (n - 1)) {
        let mut fit = Vec::with_capacity(n);
        let mut start = 0;
        for end in 1..=n {
            if end == n || cuts >> (end - 1) & 1 == 1 {
                let mean = y[start..end].iter().sum::<f64>() / (end - start) as f64;
                fit.extend(std::iter::repeat(mean).take(end - start));
                start = end;
            }
        }
        if fit.windows(2).any(|w| w[1] > w[0] + 1e-15) {
            continue;
        }
        let sse: f64 = fit.iter().zip(y).map(|(f, v)| (f - v).powi(2)).sum();
        if best.as_ref().is_none_or(|(b, _)| sse < *b) {
            best = Some((sse, fit));
        }
    }
    best.expect("a single block is always feasible").1
}

/// |Σₙ xₙ e^{−2πikn/N}|² by the direct sum.
pub fn direct_power(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (j, v) in x.iter().enumerate() {
                let phase = -2.0 * std::f64::consts::PI * ((k * j) % n) as f64 / n as f64;
                re += v * phase.cos();
                im += v * phase.sin();
            }
            re * re + im * im
        })
        .collect()
}
