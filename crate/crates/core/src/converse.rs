//! Single-point and two-point lower bounds on the BER achievable over BEC,
//! EXIT-function tools for small linear codes, and threshold conversions.

use crate::efun::BernsteinPoly;
use crate::error::{check_unit, Error, Result};
use crate::exactdec::BitMatrix;
use crate::info::{binom, conv, h_b, h_b_inv};

const GRID: usize = 2000;
const REFINE_TOL: f64 = 1e-10;
/// Largest code handled by [`exit_tools`].
pub const EXIT_MAX_K: usize = 16;
pub const EXIT_MAX_N: usize = 22;

/// Golden-section maximisation of a unimodal-near-the-optimum function on `[a, b]`.
fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > REFINE_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Supremum over `[lo, hi]` by a uniform grid followed by golden refinement
/// around the best grid point. `hi` itself is sampled only if `include_hi`.
fn grid_sup(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, include_hi: bool) -> f64 {
    let h = (hi - lo) / GRID as f64;
    let last = if include_hi { GRID } else { GRID - 1 };
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..=last {
        let v = f(lo + i as f64 * h);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let a = lo + best_i.saturating_sub(1) as f64 * h;
    let b = (lo + (best_i + 1) as f64 * h).min(if include_hi { hi } else { hi - 1e-12 * (hi - lo).max(1e-300) });
    if b > a {
        let (_, v) = golden_max(f, a, b);
        best = best.max(v);
    }
    best
}

/// `delta* = h^-1(1 - C/R)`, zero once `C >= R`.
pub fn shannon_single_point(rate: f64, capacity: f64) -> f64 {
    if capacity >= rate {
        0.0
    } else {
        h_b_inv(1.0 - capacity / rate)
    }
}

/// `max(0, (1 - rho(1 - eps))/2)` for linear codes of rate `1/rho`.
pub fn linear_single_point(rho: f64, eps: f64) -> f64 {
    ((1.0 - rho * (1.0 - eps)) / 2.0).max(0.0)
}

/// Two-point bound for linear systematic codes, before clamping.
pub fn kappa(rho: f64, delta1: f64, eps2: f64, eps1: f64) -> f64 {
    let gamma = eps1 - 2.0 * delta1;
    (eps2 - (1.0 - eps2) / (1.0 - eps1) * ((eps2 / eps1) * gamma + (rho - 1.0) * (1.0 - eps1) - gamma)) / 2.0
}

fn kappa_above(rho: f64, delta1: f64, eps2: f64, eps1: f64) -> f64 {
    eps2 / 2.0 - eps2 / (eps2 - eps1) / (1.0 - eps1) * (delta1 - 0.5 * (1.0 - rho * (1.0 - eps1)))
}

/// Lower bound on `BER(eps2)` for a linear systematic code of rate `1/rho`
/// with `BER(eps1) <= delta1`; never below the single-point bound.
pub fn linear_two_point(rho: f64, delta1: f64, eps1: f64, eps2: f64) -> Result<f64> {
    if delta1 > eps1 / 2.0 {
        return Err(Error::InvalidParameter(format!("delta1 = {delta1} exceeds eps1/2 = {}", eps1 / 2.0)));
    }
    check_unit("eps1", eps1)?;
    check_unit("eps2", eps2)?;
    let raw = if eps2 < eps1 {
        kappa(rho, delta1, eps2, eps1)
    } else if eps2 > eps1 {
        kappa_above(rho, delta1, eps2, eps1)
    } else {
        delta1
    };
    Ok(raw.clamp(0.0, 0.5).max(linear_single_point(rho, eps2)))
}

/// Inner function of the general two-point bound.
pub fn eta(delta: f64, eps: f64, tau: f64, rate: f64) -> f64 {
    let base = 1.0 - (1.0 - tau) / rate;
    let scale = (1.0 - tau) / (1.0 - eps);
    let hd = h_b(delta);
    let f = |q: f64| (h_b_inv(base + scale * (h_b(conv(q, delta)) - hd)) - q) / (1.0 - 2.0 * q);
    grid_sup(&f, 0.0, 0.5, false)
}

/// Result of the general two-point bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralBound {
    pub value: f64,
    /// Width of the final bracket of the inner infimum (zero on the direct branch).
    pub bracket: f64,
    /// The inner infimum ranged over an empty set; `value` is then 1/2.
    pub empty: bool,
}

/// Lower bound on the distortion over `BEC(tau)` of any rate-`R` code with
/// distortion `delta_a` over `BEC(eps_a)`.
pub fn general_two_point(rate: f64, delta_a: f64, eps_a: f64, tau: f64) -> Result<GeneralBound> {
    check_unit("anchor erasure", eps_a)?;
    check_unit("target erasure", tau)?;
    let floor = shannon_single_point(rate, 1.0 - eps_a);
    if delta_a < floor - 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "anchor distortion {delta_a} is below the Shannon limit {floor}"
        )));
    }
    let single = shannon_single_point(rate, 1.0 - tau);
    if tau >= eps_a {
        let v = eta(delta_a, eps_a, tau, rate).clamp(0.0, 0.5);
        return Ok(GeneralBound { value: v.max(single), bracket: 0.0, empty: false });
    }
    // eta(y, tau, eps_a) decreases in y; find where it drops to delta_a.
    let ok = |y: f64| eta(y, tau, eps_a, rate) <= delta_a;
    const SCAN: usize = 64;
    let mut prev = 0.0;
    for i in 0..=SCAN {
        let y = 0.5 * i as f64 / SCAN as f64;
        if ok(y) {
            if i == 0 {
                return Ok(GeneralBound { value: single, bracket: 0.0, empty: false });
            }
            let (mut lo, mut hi) = (prev, y);
            while hi - lo > 1e-9 {
                let mid = 0.5 * (lo + hi);
                if ok(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(GeneralBound { value: lo.max(single), bracket: hi - lo, empty: false });
        }
        prev = y;
    }
    Ok(GeneralBound { value: 0.5, bracket: 0.0, empty: true })
}

/// Supremum over `eps0 in [0, eps2)` in the area-theorem bound.
pub fn zeta(x: f64, eps2: f64, eps1: f64, rate: f64) -> f64 {
    let f = |e0: f64| {
        let pen = if e0 >= eps2 {
            if x == 0.0 {
                0.0
            } else {
                return f64::NEG_INFINITY;
            }
        } else {
            e0 * x * rate / (eps2 - e0)
        };
        ((rate - (1.0 - eps1) - pen) / (eps1 - e0) - 1.0 + rate) / rate
    };
    grid_sup(&f, 0.0, eps2, x == 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AreaMode {
    LinearSystematic,
    Systematic,
}

/// Lower bound on `BER(eps1)` from `BER(eps2) <= delta2`, `eps2 < eps1`.
pub fn area_two_point(rate: f64, delta2: f64, eps2: f64, eps1: f64, mode: AreaMode) -> Result<f64> {
    if !(eps2 < eps1) {
        return Err(Error::InvalidParameter("the area bound needs eps2 < eps1".into()));
    }
    let v = match mode {
        AreaMode::LinearSystematic => {
            let z = zeta(2.0 * delta2, eps2, eps1, rate);
            (eps1 / 2.0 * z).max(0.0).max(linear_single_point(1.0 / rate, eps1))
        }
        AreaMode::Systematic => {
            let z = zeta(h_b(delta2), eps2, eps1, rate);
            let v = if z <= 0.0 { 0.0 } else { eps1 * h_b_inv(z.min(1.0)) };
            v.max(shannon_single_point(rate, 1.0 - eps1))
        }
    };
    Ok(v.min(0.5))
}

/// Threshold beyond which a rate-1/2 linear systematic code beating repetition
/// by factor `t` at `eps2` must lose to it.
pub fn repetition_domination(eps2: f64, t: f64) -> Result<f64> {
    if eps2 >= 1.0 || !(t < 1.0) {
        return Err(Error::InvalidParameter("need eps2 < 1 and t < 1".into()));
    }
    Ok(eps2.max(1.0 - (1.0 - t) * eps2 * eps2 / (1.0 - eps2)))
}

/// BSC threshold interval implied by a BEC threshold.
pub fn threshold_comparison(eps_star: f64) -> Result<(f64, f64)> {
    check_unit("BEC threshold", eps_star)?;
    Ok(((1.0 - (1.0 - eps_star * eps_star).sqrt()) / 2.0, (1.0 - (1.0 - eps_star).sqrt()) / 2.0))
}

/// Exact EXIT data for a small linear code.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitData {
    pub k: usize,
    pub n: usize,
    /// `h(eps)`, averaged over coded bits.
    pub h: BernsteinPoly,
    /// Bit-MAP data BER as a function of `eps`.
    pub ber: BernsteinPoly,
    /// `int_0^1 h`.
    pub area: f64,
}

impl ExitData {
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Coded-bit extrinsic error `eps h(eps) / 2`.
    pub fn coded_ber(&self, eps: f64) -> f64 {
        eps * self.h.eval(eps) / 2.0
    }
}

struct XorBasis {
    by_lead: [u32; 32],
}

impl XorBasis {
    fn reduce(&self, mut v: u32) -> u32 {
        while v != 0 {
            let lead = 31 - v.leading_zeros() as usize;
            if self.by_lead[lead] == 0 {
                return v;
            }
            v ^= self.by_lead[lead];
        }
        0
    }
}

/// Exhaustive EXIT function, MAP BER and area of the code generated by `G` (`k x n`).
pub fn exit_tools(g: &BitMatrix) -> Result<ExitData> {
    let (k, n) = (g.rows(), g.cols());
    if k > EXIT_MAX_K || n > EXIT_MAX_N || n == 0 {
        return Err(Error::TooLarge(format!("{k}x{n} exceeds the exhaustive limit")));
    }
    let cols: Vec<u32> = (0..n)
        .map(|j| (0..k).fold(0u32, |m, i| if g.get(i, j) { m | (1 << i) } else { m }))
        .collect();
    // extrinsic[s]: undetermined (i, S) pairs with |S| = s, i not in S.
    let mut extrinsic = vec![0u64; n];
    let mut undetermined = vec![0u64; n + 1];
    fn dfs(
        j: usize,
        size: usize,
        chosen: u32,
        basis: &mut XorBasis,
        cols: &[u32],
        k: usize,
        extrinsic: &mut [u64],
        undetermined: &mut [u64],
    ) {
        if j == cols.len() {
            for (i, &c) in cols.iter().enumerate() {
                if chosen >> i & 1 == 0 && basis.reduce(c) != 0 {
                    extrinsic[size] += 1;
                }
            }
            let forced = (0..k).filter(|&r| basis.reduce(1 << r) == 0).count();
            undetermined[size] += (k - forced) as u64;
            return;
        }
        dfs(j + 1, size, chosen, basis, cols, k, extrinsic, undetermined);
        let v = basis.reduce(cols[j]);
        if v != 0 {
            let lead = 31 - v.leading_zeros() as usize;
            basis.by_lead[lead] = v;
            dfs(j + 1, size + 1, chosen | (1 << j), basis, cols, k, extrinsic, undetermined);
            basis.by_lead[lead] = 0;
        } else {
            dfs(j + 1, size + 1, chosen | (1 << j), basis, cols, k, extrinsic, undetermined);
        }
    }
    let mut basis = XorBasis { by_lead: [0; 32] };
    dfs(0, 0, 0, &mut basis, &cols, k, &mut extrinsic, &mut undetermined);
    // Revealed set of size s among the other n-1 bits has probability (1-eps)^s eps^(n-1-s).
    // `c[j]` multiplies eps^j (1-eps)^(order-j).
    let mut h = BernsteinPoly { c: vec![0.0; n] };
    for (s, &c) in extrinsic.iter().enumerate() {
        h.c[n - 1 - s] = c as f64 / n as f64;
    }
    let mut ber = BernsteinPoly { c: vec![0.0; n + 1] };
    for (s, &c) in undetermined.iter().enumerate() {
        ber.c[n - s] = c as f64 / (2 * k.max(1)) as f64;
    }
    // int_0^1 eps^j (1-eps)^(N-j) = 1 / ((N+1) C(N, j)).
    let area = h.c.iter().enumerate().map(|(j, c)| c / (n as f64 * binom(n - 1, j))).sum();
    Ok(ExitData { k, n, h, ber, area })
}

/// Which axis a curve is indexed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XAxis {
    Eps,
    /// Capacity-to-rate ratio `(1 - eps)/R`.
    Alpha,
}

impl XAxis {
    pub fn name(self) -> &'static str {
        match self {
            XAxis::Eps => "eps",
            XAxis::Alpha => "alpha",
        }
    }

    pub fn to_eps(self, x: f64, rate: f64) -> f64 {
        match self {
            XAxis::Eps => x,
            XAxis::Alpha => 1.0 - x * rate,
        }
    }
}

/// A sampled lower-bound curve.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub kind: String,
    pub axis: XAxis,
    pub rate: f64,
    pub anchor: Option<(f64, f64)>,
    pub points: Vec<(f64, f64)>,
}

impl BoundCurve {
    pub fn csv(&self, fmt: impl Fn(f64) -> String) -> String {
        let mut s = String::from("x_axis_kind,x,bound_kind,value,anchor_eps,anchor_delta,R\n");
        let (ae, ad) = match self.anchor {
            Some((e, d)) => (fmt(e), fmt(d)),
            None => (String::new(), String::new()),
        };
        for &(x, v) in &self.points {
            s.push_str(&format!("{},{},{},{},{},{},{}\n", self.axis.name(), fmt(x), self.kind, fmt(v), ae, ad, fmt(self.rate)));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_values() {
        assert_eq!(shannon_single_point(0.5, 0.6), 0.0);
        assert_eq!(shannon_single_point(0.5, 0.0), 0.5);
        assert!((shannon_single_point(0.5, 0.25) - 0.110_027_864_438_36).abs() < 1e-10);
        assert_eq!(linear_single_point(2.0, 0.5), 0.0);
        assert!((linear_single_point(2.0, 0.75) - 0.25).abs() < 1e-15);
        assert!((linear_single_point(5.0, 0.9) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn two_point_linear_examples() {
        assert!((kappa(2.0, 0.2501, 0.5, 0.75) - 0.0833).abs() < 1e-4);
        let d1 = 0.5 * (1.0 - 2.0 * (1.0 - 0.75));
        for e2 in [0.8, 0.9, 0.99] {
            assert!((linear_two_point(2.0, d1, 0.75, e2).unwrap() - e2 / 2.0).abs() < 1e-12);
        }
        assert!(kappa(2.0, 0.3, 0.5, 0.6).abs() < 1e-12);
        assert!(linear_two_point(2.0, 0.4, 0.6, 0.5).is_err());
    }

    #[test]
    fn area_example() {
        let v = area_two_point(0.5, 0.0, 0.475, 0.6, AreaMode::LinearSystematic).unwrap();
        assert!((v - 0.18).abs() < 1e-9, "{v}");
        assert_eq!(area_two_point(0.5, 0.4, 0.3, 0.35, AreaMode::LinearSystematic).unwrap(), 0.0);
    }

    #[test]
    fn domination_threshold() {
        assert!((repetition_domination(0.5, 0.9).unwrap() - 0.95).abs() < 1e-12);
        assert!(repetition_domination(0.5, 1.0 - 1e-12).unwrap() > 0.999_999);
    }

    #[test]
    fn thresholds() {
        let (lo, hi) = threshold_comparison(0.4294).unwrap();
        assert!((lo - 0.0484).abs() < 1e-4 && (hi - 0.1223).abs() < 1e-4);
        assert_eq!(threshold_comparison(0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn eta_at_anchor() {
        let (rate, eps) = (0.5, 0.6);
        let d = shannon_single_point(rate, 1.0 - eps);
        assert!(eta(d, eps, eps, rate) >= d - 1e-12);
        let b = general_two_point(rate, 0.5, eps, 0.9).unwrap();
        assert!(b.value <= 0.5);
    }

    #[test]
    fn repetition_exit() {
        let g = BitMatrix::from_rows(&[vec![1, 0, 1, 0], vec![0, 1, 0, 1]]);
        let x = exit_tools(&g).unwrap();
        assert!((x.area - 0.5).abs() < 1e-12);
        for e in [0.1, 0.5, 0.9] {
            assert!((x.ber.eval(e) - 0.5 * e * e).abs() < 1e-12);
            assert!((x.h.eval(e) - e).abs() < 1e-12);
        }
    }
}
