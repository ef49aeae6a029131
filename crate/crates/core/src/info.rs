//! Scalar information measures and elementary distributions.

/// Binary entropy in bits. `h(0) = h(1) = 0`.
pub fn h_b(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Inverse of the binary entropy restricted to `[0, 1/2]`.
///
/// Arguments outside `[0, 1]` are clamped. Bisection to machine precision.
pub fn h_b_inv(y: f64) -> f64 {
    let y = y.clamp(0.0, 1.0);
    if y == 0.0 {
        return 0.0;
    }
    if y == 1.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if h_b(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Binary convolution `a * b = a(1-b) + b(1-a)`.
pub fn conv(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

/// Binary KL divergence `d(p || q)` in bits.
pub fn kl_b(p: f64, q: f64) -> f64 {
    let term = |a: f64, b: f64| if a <= 0.0 { 0.0 } else { a * (a / b).log2() };
    term(p, q) + term(1.0 - p, 1.0 - q)
}

/// `n choose k` as a float.
pub fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Poisson probabilities `P(X = 0..=dmax)` with mean `lambda`.
pub fn poisson_pmf(lambda: f64, dmax: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(dmax + 1);
    let mut p = (-lambda).exp();
    for i in 0..=dmax {
        if i > 0 {
            p *= lambda / i as f64;
        }
        out.push(p);
    }
    out
}

/// Binomial probabilities `P(X = 0..=n)` for `Bin(n, p)`.
pub fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| binom(n, i) * p.powi(i as i32) * (1.0 - p).powi((n - i) as i32))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_endpoints_and_inverse() {
        assert_eq!(h_b(0.0), 0.0);
        assert!((h_b(0.5) - 1.0).abs() < 1e-15);
        for &p in &[1e-6, 0.01, 0.11, 0.3, 0.4999] {
            assert!((h_b_inv(h_b(p)) - p).abs() < 1e-12);
        }
        assert!((h_b(0.11002786443835955) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pmfs_sum_to_one() {
        let s: f64 = binomial_pmf(9, 0.3).iter().sum();
        assert!((s - 1.0).abs() < 1e-14);
        let s: f64 = poisson_pmf(2.0, 60).iter().sum();
        assert!((s - 1.0).abs() < 1e-14);
        assert_eq!(binom(10, 3), 120.0);
    }

    #[test]
    fn divergence_basics() {
        assert_eq!(kl_b(0.3, 0.3), 0.0);
        assert!(kl_b(0.1, 0.4) > 0.0);
        assert!((conv(0.1, 0.2) - 0.26).abs() < 1e-15);
    }
}
