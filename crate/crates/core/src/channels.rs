//! BEC/BSC transmission, BMS summaries and the extremal matched surrogates.

use rand::Rng;

use crate::error::{check_unit, Error, Result};
use crate::info::{h_b, h_b_inv, kl_b};

/// A memoryless binary channel used for transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelParam {
    /// Erasure probability.
    Bec(f64),
    /// Crossover probability.
    Bsc(f64),
}

impl ChannelParam {
    pub fn bec(eps: f64) -> Result<Self> {
        check_unit("erasure probability", eps)?;
        Ok(ChannelParam::Bec(eps))
    }

    pub fn bsc(delta: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&delta) {
            return Err(Error::InvalidParameter(format!(
                "crossover {delta} is outside [0, 1/2]"
            )));
        }
        Ok(ChannelParam::Bsc(delta))
    }
}

/// One channel output symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
    Erased,
}

impl Symbol {
    pub fn from_bit(b: bool) -> Self {
        if b {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    pub fn bit(self) -> Option<bool> {
        match self {
            Symbol::Zero => Some(false),
            Symbol::One => Some(true),
            Symbol::Erased => None,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Symbol::Zero => Symbol::One,
            Symbol::One => Symbol::Zero,
            Symbol::Erased => Symbol::Erased,
        }
    }
}

/// Channel output for a whole codeword.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedWord {
    pub symbols: Vec<Symbol>,
    pub channel: ChannelParam,
}

impl ReceivedWord {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn erased_fraction(&self) -> f64 {
        if self.symbols.is_empty() {
            return 0.0;
        }
        let e = self.symbols.iter().filter(|s| **s == Symbol::Erased).count();
        e as f64 / self.symbols.len() as f64
    }

    /// Output with every bit flipped (erasures kept).
    pub fn complemented(&self) -> Self {
        ReceivedWord {
            symbols: self.symbols.iter().map(|s| s.flip()).collect(),
            channel: self.channel,
        }
    }
}

/// Pass a codeword through the channel, one independent draw per symbol.
pub fn transmit<R: Rng + ?Sized>(codeword: &[bool], ch: ChannelParam, rng: &mut R) -> ReceivedWord {
    let symbols = match ch {
        ChannelParam::Bec(eps) => codeword
            .iter()
            .map(|&b| {
                if rng.random::<f64>() < eps {
                    Symbol::Erased
                } else {
                    Symbol::from_bit(b)
                }
            })
            .collect(),
        ChannelParam::Bsc(delta) => codeword
            .iter()
            .map(|&b| Symbol::from_bit(b ^ (rng.random::<f64>() < delta)))
            .collect(),
    };
    ReceivedWord { symbols, channel: ch }
}

/// Probability of error, capacity (bits) and chi-square capacity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmsSummary {
    pub pe: f64,
    pub capacity: f64,
    pub chi2_capacity: f64,
}

impl BmsSummary {
    /// `(log2 e / 2) * chi2 <= C <= chi2`.
    pub fn sandwich_holds(&self, tol: f64) -> bool {
        let lower = std::f64::consts::LOG2_E / 2.0 * self.chi2_capacity;
        lower <= self.capacity + tol && self.capacity <= self.chi2_capacity + tol
    }
}

pub fn bms_metrics(ch: ChannelParam) -> BmsSummary {
    match ch {
        ChannelParam::Bec(e) => BmsSummary {
            pe: e / 2.0,
            capacity: 1.0 - e,
            chi2_capacity: 1.0 - e,
        },
        ChannelParam::Bsc(d) => BmsSummary {
            pe: d,
            capacity: 1.0 - h_b(d),
            chi2_capacity: (1.0 - 2.0 * d).powi(2),
        },
    }
}

/// A BMS channel written as a finite mixture of BSCs.
#[derive(Debug, Clone, PartialEq)]
pub struct BmsChannel {
    /// `(weight, crossover)` pairs; weights sum to one.
    pub atoms: Vec<(f64, f64)>,
}

impl BmsChannel {
    pub fn summary(&self) -> BmsSummary {
        let mut s = BmsSummary { pe: 0.0, capacity: 0.0, chi2_capacity: 0.0 };
        for &(w, d) in &self.atoms {
            let m = bms_metrics(ChannelParam::Bsc(d.min(1.0 - d)));
            s.pe += w * m.pe;
            s.capacity += w * m.capacity;
            s.chi2_capacity += w * m.chi2_capacity;
        }
        s
    }
}

/// Which scalar the surrogate pair is matched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Matching {
    /// Probability of error `P_e = delta`.
    Degradation,
    /// Capacity in bits.
    Capacity,
    /// Chi-square capacity.
    Chi2,
}

/// The least and most favourable channels sharing a given metric value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Surrogates {
    pub bec: ChannelParam,
    pub bsc: ChannelParam,
}

pub fn matched_surrogates(matching: Matching, value: f64) -> Result<Surrogates> {
    match matching {
        Matching::Degradation => {
            if !(0.0..=0.5).contains(&value) {
                return Err(Error::InvalidParameter(format!("P_e = {value} is outside [0, 1/2]")));
            }
            Ok(Surrogates { bec: ChannelParam::Bec(2.0 * value), bsc: ChannelParam::Bsc(value) })
        }
        Matching::Chi2 => {
            check_unit("chi2 capacity", value)?;
            Ok(Surrogates {
                bec: ChannelParam::Bec(1.0 - value),
                bsc: ChannelParam::Bsc((1.0 - value.sqrt()) / 2.0),
            })
        }
        Matching::Capacity => {
            check_unit("capacity", value)?;
            Ok(Surrogates {
                bec: ChannelParam::Bec(1.0 - value),
                bsc: ChannelParam::Bsc(h_b_inv(1.0 - value)),
            })
        }
    }
}

/// Auxiliary function whose vanishing on the diagonal closes the convexity argument.
pub fn mgl_f(u: f64, v: f64) -> f64 {
    let one_u2 = (1.0 - u) * (1.0 + u);
    let one_v2 = (1.0 - v) * (1.0 + v);
    // Rational part regrouped around the factor (u - v), so the diagonal is exact.
    2.0 * ((1.0 - u) * (1.0 + v) / ((1.0 + u) * (1.0 - v))).ln()
        + 4.0 * (u - v) / (u * one_v2) * ((u + v) / one_u2 - v * (1.0 + v * v) / one_v2)
}

/// Numeric check of the convexity of `x -> d(p*delta(x) || q*delta(x))` with
/// `delta(x) = (1 - sqrt x)/2`.
///
/// Returns the most negative second difference over an open uniform grid of
/// `x`, and the largest `|f(u,u)|` on an open grid of `u`.
pub fn mgl_variant_check(p: f64, q: f64, grid_size: usize) -> Result<(f64, f64)> {
    if !(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter("p and q must lie in (0, 1)".into()));
    }
    if grid_size < 3 {
        return Err(Error::InvalidParameter("grid_size must be at least 3".into()));
    }
    let step = 1.0 / (grid_size + 1) as f64;
    let g = |x: f64| {
        let d = (1.0 - x.sqrt()) / 2.0;
        kl_b(crate::info::conv(p, d), crate::info::conv(q, d))
    };
    let vals: Vec<f64> = (1..=grid_size).map(|i| g(i as f64 * step)).collect();
    let worst = vals
        .windows(3)
        .map(|w| w[0] - 2.0 * w[1] + w[2])
        .fold(f64::INFINITY, f64::min);
    let fmax = (1..=grid_size)
        .map(|i| {
            let u = i as f64 * step;
            mgl_f(u, u).abs()
        })
        .fold(0.0, f64::max);
    Ok((worst, fmax))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn metric_closed_forms() {
        assert_eq!(bms_metrics(ChannelParam::Bsc(0.0)), BmsSummary { pe: 0.0, capacity: 1.0, chi2_capacity: 1.0 });
        assert!((bms_metrics(ChannelParam::Bsc(0.25)).chi2_capacity - 0.25).abs() < 1e-15);
        let m = bms_metrics(ChannelParam::Bec(0.4));
        assert!((m.pe - 0.2).abs() < 1e-15 && (m.capacity - 0.6).abs() < 1e-15);
        assert!((m.chi2_capacity - 0.6).abs() < 1e-15);
    }

    #[test]
    fn surrogate_maps() {
        let s = matched_surrogates(Matching::Chi2, 1.0).unwrap();
        assert_eq!(s.bec, ChannelParam::Bec(0.0));
        assert_eq!(s.bsc, ChannelParam::Bsc(0.0));
        let s = matched_surrogates(Matching::Chi2, 0.25).unwrap();
        assert_eq!(s.bsc, ChannelParam::Bsc(0.25));
        let s = matched_surrogates(Matching::Degradation, 0.1).unwrap();
        assert_eq!(s.bec, ChannelParam::Bec(0.2));
        let s = matched_surrogates(Matching::Capacity, 0.5).unwrap();
        if let ChannelParam::Bsc(d) = s.bsc {
            assert!((1.0 - h_b(d) - 0.5).abs() < 1e-12);
        }
        assert!(matched_surrogates(Matching::Capacity, 1.5).is_err());
    }

    #[test]
    fn extremes_of_transmission() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cw: Vec<bool> = (0..100).map(|i| i % 3 == 0).collect();
        let r = transmit(&cw, ChannelParam::Bec(0.0), &mut rng);
        assert!(r.symbols.iter().zip(&cw).all(|(s, &b)| s.bit() == Some(b)));
        let r = transmit(&cw, ChannelParam::Bec(1.0), &mut rng);
        assert!(r.symbols.iter().all(|s| *s == Symbol::Erased));
        let r = transmit(&cw, ChannelParam::Bsc(0.3), &mut rng);
        assert!(r.symbols.iter().all(|s| *s != Symbol::Erased));
    }

    #[test]
    fn erasure_fraction_concentrates() {
        let n = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = transmit(&vec![false; n], ChannelParam::Bec(0.3), &mut rng);
        let sigma = (0.3f64 * 0.7 / n as f64).sqrt();
        assert!((r.erased_fraction() - 0.3).abs() < 3.0 * sigma);
    }

    #[test]
    fn seeded_transmission_is_reproducible() {
        let cw: Vec<bool> = (0..1000).map(|i| i % 2 == 0).collect();
        let a = transmit(&cw, ChannelParam::Bsc(0.2), &mut ChaCha8Rng::seed_from_u64(5));
        let b = transmit(&cw, ChannelParam::Bsc(0.2), &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }

    #[test]
    fn diagonal_of_f_vanishes() {
        let (viol, fmax) = mgl_variant_check(0.3, 0.3, 1000).unwrap();
        assert!(viol.abs() < 1e-15);
        assert!(fmax < 1e-9);
        let (viol, _) = mgl_variant_check(0.1, 0.4, 10_000).unwrap();
        assert!(viol >= -1e-9);
    }

    #[test]
    fn regrouped_f_matches_expanded_form() {
        let expanded = |u: f64, v: f64| {
            let w = 1.0 - v * v;
            2.0 * ((1.0 - u) * (1.0 + v) / ((1.0 + u) * (1.0 - v))).ln() - 4.0 * v * (u + v) / (u * w)
                + 4.0 * u / (1.0 - u * u)
                + 4.0 * v * v * (2.0 * (1.0 - u) * v + (1.0 - v).powi(2)) / (u * w * w)
        };
        for (u, v) in [(0.2, 0.5), (0.7, 0.1), (0.5, 0.5), (0.9, 0.3), (0.05, 0.6)] {
            let (a, b) = (mgl_f(u, v), expanded(u, v));
            assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()), "{u} {v}: {a} vs {b}");
        }
    }
}
