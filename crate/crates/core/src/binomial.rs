//! Binomial probabilities evaluated in log space.
//!
//! Uses the saddle-point form `ln C(n,k) p^k q^(n-k)` expressed through the
//! Stirling remainders `ln Γ(m+1) - [(m+1/2) ln m - m + ln sqrt(2π)]` and the
//! deviance `bd0`, which avoids cancelling two large log-gamma values. Relative
//! accuracy stays near machine precision for `n` in the millions.

use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Stirling remainder `ln m! - (m + 1/2) ln m + m - ln sqrt(2π)` for `m >= 1`.
fn stirling_error(m: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;

    if m <= 15.0 {
        let ln_fact: f64 = (2..=m as u64).map(|i| (i as f64).ln()).sum();
        return ln_fact - (m + 0.5) * m.ln() + m - LN_SQRT_2PI;
    }
    let mm = m * m;
    if m > 500.0 {
        (S0 - S1 / mm) / m
    } else if m > 80.0 {
        (S0 - (S1 - S2 / mm) / mm) / m
    } else if m > 35.0 {
        (S0 - (S1 - (S2 - S3 / mm) / mm) / mm) / m
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / mm) / mm) / mm) / mm) / m
    }
}

/// Deviance term `x ln(x/np) + np - x`, computed stably near `x = np`.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1.. {
            ej *= v;
            let next = s + ej / f64::from(2 * j + 1);
            if next == s {
                break;
            }
            s = next;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

/// `ln [C(n,k) p^k q^(n-k)]`, with `q = 1 - p` passed explicitly.
/// Returns `-inf` for impossible outcomes.
pub fn ln_pmf(k: u64, n: u64, p: f64, q: f64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if p == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let nf = n as f64;
    if k == 0 {
        return if p < 0.1 {
            -bd0(nf, nf * q) - nf * p
        } else {
            nf * q.ln()
        };
    }
    if k == n {
        return if q < 0.1 {
            -bd0(nf, nf * p) - nf * q
        } else {
            nf * p.ln()
        };
    }
    let kf = k as f64;
    let rest = nf - kf;
    let lc = stirling_error(nf)
        - stirling_error(kf)
        - stirling_error(rest)
        - bd0(kf, nf * p)
        - bd0(rest, nf * q);
    let lf = (2.0 * PI).ln() + kf.ln() + (-kf / nf).ln_1p();
    lc - 0.5 * lf
}

pub fn pmf(k: u64, n: u64, p: f64, q: f64) -> f64 {
    ln_pmf(k, n, p, q).exp()
}
