//! Special functions: log-gamma with sign, Hurwitz zeta, exponential
//! integral.

use crate::error::{Error, Result};
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// log(2π)
pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

const BERNOULLI_2K: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// (log|Γ(x)|, sign Γ(x)); errors at the poles x = 0, −1, −2, …
pub fn ln_gamma(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("ln_gamma({x})")));
    }
    if x <= 0.0 && x == x.round() {
        return Err(Error::Singular(format!("Γ has a pole at {x}")));
    }
    if x < 0.5 {
        // Γ(x)Γ(1−x) = π / sin(πx)
        let r = x - x.round();
        let sn = (PI * r).sin() * if (x.round() as i64) % 2 == 0 { 1.0 } else { -1.0 };
        let (lg, _) = ln_gamma(1.0 - x)?;
        return Ok((PI.ln() - sn.abs().ln() - lg, sn.signum()));
    }
    let mut y = x;
    let mut shift = 0.0;
    while y < 12.0 {
        shift += y.ln();
        y += 1.0;
    }
    let mut series = 0.0;
    let y2 = y * y;
    let mut p = y;
    for (k, b) in BERNOULLI_2K.iter().enumerate() {
        let k = (k + 1) as f64;
        series += b / (2.0 * k * (2.0 * k - 1.0) * p);
        p *= y2;
    }
    Ok(((y - 0.5) * y.ln() - y + 0.5 * LN_2PI + series - shift, 1.0))
}

/// Hurwitz zeta ζ(s, a) = Σ_{k≥0} (k+a)^{−s} for a > 0, s ≠ 1, by
/// Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    if a <= 0.0 || s == 1.0 || !s.is_finite() || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("hurwitz_zeta({s}, {a})")));
    }
    let m = (20.0 + s.abs()).ceil() as usize;
    let mut acc = 0.0;
    for k in 0..m {
        acc += (k as f64 + a).powf(-s);
    }
    let x = m as f64 + a;
    acc += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // Σ B_{2j}/(2j)! · s(s+1)…(s+2j−2) · x^{−s−2j+1}
    let mut poch = s;
    let mut fact = 2.0;
    let mut xp = x.powf(-s - 1.0);
    for (j, b) in BERNOULLI_2K.iter().enumerate() {
        acc += b / fact * poch * xp;
        let j2 = 2.0 * (j + 1) as f64;
        poch *= (s + j2 - 1.0) * (s + j2);
        fact *= (j2 + 1.0) * (j2 + 2.0);
        xp /= x * x;
    }
    Ok(acc)
}

/// Riemann zeta for s ≠ 1.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if s < 0.0 {
        // reflection keeps Euler–Maclaurin in its comfortable range
        let (lg, sg) = ln_gamma(1.0 - s)?;
        let z = riemann_zeta(1.0 - s)?;
        let f = 2f64.powf(s) * PI.powf(s - 1.0) * (PI * s / 2.0).sin();
        return Ok(f * sg * lg.exp() * z);
    }
    hurwitz_zeta(s, 1.0)
}

/// ∂_s ζ(s, a) at s = 0, by Lerch's formula log Γ(a) − ½ log 2π.
pub fn hurwitz_zeta_prime0(a: f64) -> Result<f64> {
    let (lg, sg) = ln_gamma(a)?;
    if sg < 0.0 {
        return Err(Error::InvalidArgument("Lerch formula needs a > 0".into()));
    }
    Ok(lg - 0.5 * LN_2PI)
}

/// Exponential integral E₁(x) = ∫_x^∞ e^{−t}/t dt for x > 0.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 needs x > 0");
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let t = term / k as f64;
            sum += t;
            if t.abs() < 1e-18 {
                break;
            }
        }
        return -EULER_GAMMA - x.ln() - sum;
    }
    if x > 745.0 {
        return 0.0;
    }
    // modified Lentz evaluation of the continued fraction
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x).exp()
}
