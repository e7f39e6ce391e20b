//! Gaussian tail function Q(x), its inverse, and the standard normal pdf.
//!
//! Q(x) = P(Z > x) for Z ~ N(0,1), computed as ½·erfc(x/√2). The inverse is
//! solved by bisection-bracketed Newton iteration to full double precision.

/// Gaussian tail probability Q(x) = ½·erfc(x/√2).
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Standard normal density φ(x) = exp(−x²/2)/√(2π).
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Inverse of [`q_function`] on (0, 1): returns x with Q(x) = p.
///
/// Panics if p is outside (0, 1).
pub fn q_inverse(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "q_inverse needs p in (0,1), got {p}");
    if p == 0.5 {
        return 0.0;
    }
    // Q is strictly decreasing; bracket the root, then polish with Newton
    // steps that fall back to bisection whenever they leave the bracket.
    let (mut lo, mut hi) = if p < 0.5 { (0.0, 1.0) } else { (-1.0, 0.0) };
    while q_function(hi) > p {
        hi *= 2.0;
        if hi > 1e3 {
            break;
        }
    }
    while q_function(lo) < p {
        lo *= 2.0;
        if lo < -1e3 {
            break;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = q_function(x) - p;
        if f == 0.0 {
            break;
        }
        if f > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = normal_pdf(x);
        let mut next = x + f / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-16 * (1.0 + x.abs()) {
            x = next;
            break;
        }
        x = next;
    }
    x
}

/// Single-bit error probability for amplitude `a` at noise level `sigma`:
/// Q(a/σ), taken as 0 when σ = 0.
pub fn single_bit_bound(a: f64, sigma: f64) -> f64 {
    assert!(a >= 0.0 && sigma >= 0.0);
    if sigma == 0.0 {
        return 0.0;
    }
    q_function(a / sigma)
}
