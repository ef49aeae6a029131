//! Density evolution over BEC/BSC surrogates and the bounds read off its traces.

use std::f64::consts::PI;

use crate::efun::{EFunctionFamily, Payoff, Surrogate, VariableFunction};
use crate::error::{Error, Result};
use crate::info::{h_b, h_b_inv};

const FIXED_POINT_MAX_STEPS: usize = 100_000;

/// Which recursion a trace follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeQuantity {
    /// Bit error, iterated with E-functions.
    Error,
    /// Soft information, chi-square matched, iterated with chi-square entropy functions.
    Chi2Soft,
    /// Soft information, capacity matched. Conjectured; outputs are tagged.
    CapacitySoft,
}

impl DeQuantity {
    pub fn payoff(self) -> Payoff {
        match self {
            DeQuantity::Error => Payoff::Error,
            DeQuantity::Chi2Soft => Payoff::Chi2,
            DeQuantity::CapacitySoft => Payoff::Entropy,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DeQuantity::Error => "error",
            DeQuantity::Chi2Soft => "chi2-soft",
            DeQuantity::CapacitySoft => "capacity-soft",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeTrace {
    pub surrogate: Surrogate,
    pub quantity: DeQuantity,
    pub x0: f64,
    pub alpha: f64,
    /// `q_0 = x0, q_1, ..., q_l`.
    pub values: Vec<f64>,
    pub conjectured: bool,
}

impl DeTrace {
    pub fn last(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn len_iters(&self) -> usize {
        self.values.len() - 1
    }
}

fn step(f: &dyn VariableFunction, alpha: f64, q: f64, surrogate: Surrogate, quantity: DeQuantity) -> f64 {
    let v = f.value(alpha, q);
    match (surrogate, quantity) {
        (Surrogate::Bec, DeQuantity::Error) => (1.0 - 2.0 * v).clamp(0.0, 1.0),
        (Surrogate::Bsc, DeQuantity::Error) => v.clamp(0.0, 0.5),
        (Surrogate::Bec, _) => (1.0 - v).clamp(0.0, 1.0),
        (Surrogate::Bsc, DeQuantity::Chi2Soft) => 0.5 - 0.5 * (1.0 - v.clamp(0.0, 1.0)).sqrt(),
        (Surrogate::Bsc, DeQuantity::CapacitySoft) => h_b_inv(v),
    }
}

/// Run `ell` steps of the recursion selected by `surrogate` and `quantity`.
pub fn iterate(
    f: &dyn VariableFunction,
    alpha: f64,
    x0: f64,
    ell: usize,
    surrogate: Surrogate,
    quantity: DeQuantity,
) -> Result<DeTrace> {
    if f.surrogate() != surrogate {
        return Err(Error::Mismatch(format!("function is {:?}, recursion is {surrogate:?}", f.surrogate())));
    }
    if f.payoff() != quantity.payoff() {
        return Err(Error::Mismatch(format!("{:?} payoff cannot drive the {} recursion", f.payoff(), quantity.name())));
    }
    let hi = match surrogate {
        Surrogate::Bec => 1.0,
        Surrogate::Bsc => 0.5,
    };
    if !(0.0..=hi).contains(&x0) {
        return Err(Error::InvalidParameter(format!("x0 = {x0} is outside [0, {hi}]")));
    }
    let mut values = Vec::with_capacity(ell + 1);
    values.push(x0);
    let mut q = x0;
    for _ in 0..ell {
        q = step(f, alpha, q, surrogate, quantity);
        values.push(q);
    }
    Ok(DeTrace { surrogate, quantity, x0, alpha, values, conjectured: quantity == DeQuantity::CapacitySoft })
}

/// BER bounds: `map_lower <= BER_MAP`, `bp_lower <= BER_BP <= bp_upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeBounds {
    pub map_lower: f64,
    pub bp_lower: f64,
    pub bp_upper: f64,
}

/// Soft-information bounds: `bp_lower <= iota_BP <= bp_upper`, `iota_opt <= opt_upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftBounds {
    pub bp_lower: f64,
    pub bp_upper: f64,
    pub opt_upper: f64,
}

fn expect(t: &DeTrace, s: Surrogate, q: DeQuantity, x0: f64, alpha: f64, ell: usize) -> Result<()> {
    if t.surrogate != s || t.quantity != q || t.x0 != x0 {
        return Err(Error::Mismatch(format!("expected a {s:?} {} trace from {x0}", q.name())));
    }
    if t.alpha != alpha || t.len_iters() != ell {
        return Err(Error::Mismatch("traces disagree on alpha or length".into()));
    }
    Ok(())
}

/// Read BER bounds off the BEC traces from 1 and 0 and the BSC trace from 1/2.
pub fn bounds_from_traces(bec_from_one: &DeTrace, bec_from_zero: &DeTrace, bsc_from_half: &DeTrace) -> Result<DeBounds> {
    let (a, l) = (bec_from_one.alpha, bec_from_one.len_iters());
    expect(bec_from_one, Surrogate::Bec, DeQuantity::Error, 1.0, a, l)?;
    expect(bec_from_zero, Surrogate::Bec, DeQuantity::Error, 0.0, a, l)?;
    expect(bsc_from_half, Surrogate::Bsc, DeQuantity::Error, 0.5, a, l)?;
    Ok(DeBounds {
        map_lower: (1.0 - bec_from_one.last()) / 2.0,
        bp_lower: (1.0 - bec_from_zero.last()) / 2.0,
        bp_upper: bsc_from_half.last(),
    })
}

/// Soft-information bounds from chi-square traces.
pub fn soft_bounds_from_traces(bec_from_one: &DeTrace, bec_from_zero: &DeTrace, bsc_from_half: &DeTrace) -> Result<SoftBounds> {
    let (a, l) = (bec_from_one.alpha, bec_from_one.len_iters());
    expect(bec_from_one, Surrogate::Bec, DeQuantity::Chi2Soft, 1.0, a, l)?;
    expect(bec_from_zero, Surrogate::Bec, DeQuantity::Chi2Soft, 0.0, a, l)?;
    expect(bsc_from_half, Surrogate::Bsc, DeQuantity::Chi2Soft, 0.5, a, l)?;
    Ok(SoftBounds {
        bp_lower: 1.0 - h_b(bsc_from_half.last()),
        bp_upper: bec_from_zero.last(),
        opt_upper: bec_from_one.last(),
    })
}

/// Both bound sets for a non-systematic LDMC(`arity`) ensemble.
pub fn ldmc_bounds(arity: usize, alpha: f64, ell: usize, dmax: usize) -> Result<(DeBounds, SoftBounds)> {
    let fam = |s, p| EFunctionFamily::ldmc(arity, s, p, dmax);
    let (be, bs) = (fam(Surrogate::Bec, Payoff::Error)?, fam(Surrogate::Bsc, Payoff::Error)?);
    let (ce, cs) = (fam(Surrogate::Bec, Payoff::Chi2)?, fam(Surrogate::Bsc, Payoff::Chi2)?);
    let err = bounds_from_traces(
        &iterate(&be, alpha, 1.0, ell, Surrogate::Bec, DeQuantity::Error)?,
        &iterate(&be, alpha, 0.0, ell, Surrogate::Bec, DeQuantity::Error)?,
        &iterate(&bs, alpha, 0.5, ell, Surrogate::Bsc, DeQuantity::Error)?,
    )?;
    let soft = soft_bounds_from_traces(
        &iterate(&ce, alpha, 1.0, ell, Surrogate::Bec, DeQuantity::Chi2Soft)?,
        &iterate(&ce, alpha, 0.0, ell, Surrogate::Bec, DeQuantity::Chi2Soft)?,
        &iterate(&cs, alpha, 0.5, ell, Surrogate::Bsc, DeQuantity::Chi2Soft)?,
    )?;
    Ok((err, soft))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub q: f64,
    pub converged: bool,
    pub steps: usize,
}

impl FixedPoint {
    /// `(1 - q*)/2`.
    pub fn ber(&self) -> f64 {
        (1.0 - self.q) / 2.0
    }
}

/// Iterate the BEC error recursion until successive values differ by less than `tol`.
pub fn fixed_point(f: &dyn VariableFunction, alpha: f64, x0: f64, tol: f64) -> Result<FixedPoint> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    if f.surrogate() != Surrogate::Bec || f.payoff() != Payoff::Error {
        return Err(Error::Mismatch("fixed points use the BEC error recursion".into()));
    }
    let mut q = x0.clamp(0.0, 1.0);
    for s in 1..=FIXED_POINT_MAX_STEPS {
        let next = step(f, alpha, q, Surrogate::Bec, DeQuantity::Error);
        if (next - q).abs() < tol {
            return Ok(FixedPoint { q: next, converged: true, steps: s });
        }
        q = next;
    }
    Ok(FixedPoint { q, converged: false, steps: FIXED_POINT_MAX_STEPS })
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: usize) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::NonConvergence("adaptive Simpson exhausted its depth".into()));
    }
    Ok(adapt(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)? + adapt(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    adapt(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 50)
}

/// Coefficients `(a, b)` of the argument `|a z + b|` in the large-degree bound, at `p = 1/2`.
pub fn large_d_coefficients(alpha: f64, r: f64) -> (f64, f64) {
    let p = 0.5;
    let a = 2.0 * (2.0 * alpha * (1.0 - r) / (PI * (1.0 - p))).sqrt();
    let b = 4.0 * alpha * (1.0 - r) / (PI * (1.0 - p).sqrt());
    (a, b)
}

/// Large-degree limit of the one-step BER.
pub fn large_d_bound(alpha: f64, r: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidParameter("need alpha > 0 and r in [0, 1)".into()));
    }
    let (a, b) = large_d_coefficients(alpha, r);
    let g = move |z: f64| (-0.5 * z * z).exp() / (2.0 * PI).sqrt() / (1.0 + (a * z + b).abs().exp());
    let kink = -b / a;
    let tol = 1e-10;
    if kink > -8.0 && kink < 8.0 {
        Ok(integrate(&g, -8.0, kink, tol)? + integrate(&g, kink, 8.0, tol)?)
    } else {
        integrate(&g, -8.0, 8.0, tol)
    }
}
