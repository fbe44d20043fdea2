#![allow(dead_code)]

use freqop::{Complex, StateVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random normalized state with complex amplitudes.
pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> StateVector {
    loop {
        let amps: Vec<Complex> = (0..dim)
            .map(|_| {
                Complex::new(
                    rng.random::<f64>() * 2.0 - 1.0,
                    rng.random::<f64>() * 2.0 - 1.0,
                )
            })
            .collect();
        if let Ok(s) = StateVector::renormalized(amps) {
            return s;
        }
    }
}

/// `C(2m, m) / 4^m` from its asymptotic series, accurate to ~m^-5.
pub fn central_binomial_asymptotic(n: usize) -> f64 {
    let m = n as f64 / 2.0;
    let inv = 1.0 / m;
    (std::f64::consts::PI * m).sqrt().recip()
        * (1.0 - inv / 8.0 + inv * inv / 128.0 + 5.0 * inv.powi(3) / 1024.0
            - 21.0 * inv.powi(4) / 32768.0)
}

/// Binomial pmf through a direct difference of log-gamma values.
pub fn log_gamma_pmf(k: usize, n: usize, p: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let (k, n) = (k as f64, n as f64);
    let ln_c = ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0);
    (ln_c + k * p.ln() + (n - k) * (1.0 - p).ln()).exp()
}
