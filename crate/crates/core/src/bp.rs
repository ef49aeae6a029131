//! Flooding belief propagation over erasure (or BSC) observations.
//!
//! Messages are log-likelihood ratios `ln(P(0)/P(1))` in nats, with certainty
//! held as an explicit state.

use crate::channels::{ReceivedWord, Symbol};
use crate::ensemble::{CheckKind, FactorGraph};
use crate::error::{Error, Result};
use crate::info::h_b;

/// Saturation magnitude for soft messages, in nats.
pub const LLR_SATURATION: f64 = 500.0;
/// Final beliefs closer than this to zero are treated as undecided.
pub const UNDECIDED_LLR: f64 = 1e-9;

/// A check-to-variable or variable-to-check message.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Msg {
    /// The bit is known with certainty.
    Known(bool),
    /// Log-likelihood ratio `ln(P0/P1)`, finite and saturated.
    Llr(f64),
}

impl Msg {
    pub const UNIFORM: Msg = Msg::Llr(0.0);

    pub fn soft(l: f64) -> Msg {
        Msg::Llr(l.clamp(-LLR_SATURATION, LLR_SATURATION))
    }

    /// From a likelihood ratio `r = P0/P1` in `[0, inf]`.
    pub fn from_ratio(r: f64) -> Msg {
        if r == 0.0 {
            Msg::Known(true)
        } else if r == f64::INFINITY {
            Msg::Known(false)
        } else {
            Msg::soft(r.ln())
        }
    }

    pub fn ratio(self) -> f64 {
        match self {
            Msg::Known(false) => f64::INFINITY,
            Msg::Known(true) => 0.0,
            Msg::Llr(l) => l.exp(),
        }
    }

    pub fn flip(self) -> Msg {
        match self {
            Msg::Known(b) => Msg::Known(!b),
            Msg::Llr(l) => Msg::Llr(-l),
        }
    }

    /// Posterior probability that the bit is 0.
    pub fn p0(self) -> f64 {
        match self {
            Msg::Known(b) => f64::from(u8::from(!b)),
            Msg::Llr(l) => 1.0 / (1.0 + (-l).exp()),
        }
    }

    /// Probability of one.
    fn p1(self) -> f64 {
        match self {
            Msg::Known(b) => f64::from(u8::from(b)),
            Msg::Llr(l) => 1.0 / (1.0 + l.exp()),
        }
    }

    pub fn hard(self) -> Option<bool> {
        match self {
            Msg::Known(b) => Some(b),
            Msg::Llr(l) if l > 0.0 => Some(false),
            Msg::Llr(l) if l < 0.0 => Some(true),
            Msg::Llr(_) => None,
        }
    }
}

/// Message from a check to one of its variables, given the messages from the
/// other `arity - 1` variables.
pub fn check_message(kind: CheckKind, observed: Symbol, incoming: &[Msg]) -> Result<Msg> {
    if incoming.len() + 1 != kind.arity() {
        return Err(Error::LengthMismatch { expected: kind.arity() - 1, got: incoming.len() });
    }
    let observed = match kind {
        CheckKind::Parity(_) => false,
        _ => match observed.bit() {
            Some(b) => b,
            None => return Ok(Msg::UNIFORM),
        },
    };
    match kind {
        CheckKind::Maj(d) => {
            if observed {
                let flipped: Vec<Msg> = incoming.iter().map(|m| m.flip()).collect();
                Ok(maj_observed_zero(d, &flipped)?.flip())
            } else {
                maj_observed_zero(d, incoming)
            }
        }
        CheckKind::Xor(_) | CheckKind::Parity(_) => {
            let mut parity = observed;
            for m in incoming {
                match m {
                    Msg::Known(b) => parity ^= b,
                    Msg::Llr(_) => return Ok(Msg::UNIFORM),
                }
            }
            Ok(Msg::Known(parity))
        }
    }
}

// Distribution of the number of ones among the soft inputs, then the ratio
// P(X=0 | S=0) / P(X=0 | S=1) = P(N <= m) / P(N <= m-1).
fn maj_observed_zero(d: usize, incoming: &[Msg]) -> Result<Msg> {
    let m = (d - 1) / 2;
    let ones = incoming.iter().filter(|x| matches!(x, Msg::Known(true))).count();
    if ones > m {
        return Err(Error::Contradiction { var: usize::MAX });
    }
    let mut dist = vec![1.0_f64];
    for x in incoming {
        if let Msg::Llr(_) = x {
            let (p1, p0) = (x.p1(), x.p0());
            let mut next = vec![0.0; dist.len() + 1];
            for (j, &w) in dist.iter().enumerate() {
                next[j] += w * p0;
                next[j + 1] += w * p1;
            }
            dist = next;
        }
    }
    if ones == m {
        return Ok(Msg::Known(false));
    }
    let t = m - 1 - ones;
    let den: f64 = dist.iter().take(t + 1).sum();
    let at_m = dist.get(t + 1).copied().unwrap_or(0.0);
    if den == 0.0 {
        return Ok(Msg::soft(LLR_SATURATION));
    }
    Ok(Msg::soft((at_m / den).ln_1p()))
}

/// Per-variable beliefs after some number of iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    pub beliefs: Vec<Msg>,
    pub iteration: usize,
}

impl BeliefState {
    pub fn p0(&self) -> Vec<f64> {
        self.beliefs.iter().map(|m| m.p0()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub state: BeliefState,
    pub hard: Vec<Option<bool>>,
    /// Posterior-expected BER, `mean min(p0, 1-p0)`, after each iteration.
    pub ber_trace: Vec<f64>,
    /// Soft information `1 - mean h_b(p0)` after each iteration.
    pub soft_trace: Vec<f64>,
}

#[derive(Clone, Copy, Default)]
struct VarAcc {
    zeros: u32,
    ones: u32,
    sum: f64,
}

impl VarAcc {
    fn add(&mut self, m: Msg) {
        match m {
            Msg::Known(false) => self.zeros += 1,
            Msg::Known(true) => self.ones += 1,
            Msg::Llr(l) => self.sum += l,
        }
    }

    fn total(&self, var: usize) -> Result<Msg> {
        match (self.zeros > 0, self.ones > 0) {
            (true, true) => Err(Error::Contradiction { var }),
            (true, false) => Ok(Msg::Known(false)),
            (false, true) => Ok(Msg::Known(true)),
            (false, false) => Ok(Msg::soft(self.sum)),
        }
    }

    fn without(&self, m: Msg, var: usize) -> Result<Msg> {
        let mut a = *self;
        match m {
            Msg::Known(false) => a.zeros -= 1,
            Msg::Known(true) => a.ones -= 1,
            Msg::Llr(l) => a.sum -= l,
        }
        a.total(var)
    }
}

fn summarize(beliefs: &[Msg]) -> (f64, f64) {
    let k = beliefs.len().max(1) as f64;
    let mut ber = 0.0;
    let mut ent = 0.0;
    for m in beliefs {
        let p = m.p0();
        ber += p.min(1.0 - p);
        ent += h_b(p);
    }
    (ber / k, 1.0 - ent / k)
}

/// Run `iters` flooding iterations and return the final beliefs and traces.
pub fn run_bp(graph: &FactorGraph, received: &ReceivedWord, iters: usize) -> Result<DecodeResult> {
    let emitted = graph.n_emitted();
    if received.len() != emitted {
        return Err(Error::LengthMismatch { expected: emitted, got: received.len() });
    }
    // Active checks with their observations; erased ones never send anything.
    let mut obs = Vec::new();
    let mut active = Vec::new();
    let mut pos = 0;
    for (j, c) in graph.checks.iter().enumerate() {
        let s = if c.kind.is_emitted() {
            pos += 1;
            received.symbols[pos - 1]
        } else {
            Symbol::Zero
        };
        if s != Symbol::Erased {
            active.push(j);
            obs.push(s);
        }
    }
    let mut edge_start = Vec::with_capacity(active.len() + 1);
    let mut edge_var = Vec::new();
    edge_start.push(0);
    for &j in &active {
        edge_var.extend_from_slice(&graph.checks[j].vars);
        edge_start.push(edge_var.len());
    }
    let mut c2v = vec![Msg::UNIFORM; edge_var.len()];
    for (a, &j) in active.iter().enumerate() {
        if graph.checks[j].kind.arity() == 1 {
            c2v[edge_start[a]] = check_message(graph.checks[j].kind, obs[a], &[])?;
        }
    }

    let accumulate = |c2v: &[Msg]| {
        let mut acc = vec![VarAcc::default(); graph.k];
        for (e, &v) in edge_var.iter().enumerate() {
            acc[v].add(c2v[e]);
        }
        acc
    };
    let beliefs_of = |acc: &[VarAcc]| -> Result<Vec<Msg>> {
        acc.iter()
            .enumerate()
            .map(|(v, a)| {
                a.total(v).map(|m| match m {
                    Msg::Llr(l) if l.abs() < UNDECIDED_LLR => Msg::UNIFORM,
                    other => other,
                })
            })
            .collect()
    };

    let mut acc = accumulate(&c2v);
    let mut beliefs = beliefs_of(&acc)?;
    let (b0, s0) = summarize(&beliefs);
    let mut ber_trace = vec![b0];
    let mut soft_trace = vec![s0];
    let mut buf: Vec<Msg> = Vec::new();
    let mut v2c: Vec<Msg> = Vec::new();
    for _ in 0..iters {
        let mut next = c2v.clone();
        for (a, &j) in active.iter().enumerate() {
            let kind = graph.checks[j].kind;
            if kind.arity() == 1 {
                continue;
            }
            let (lo, hi) = (edge_start[a], edge_start[a + 1]);
            v2c.clear();
            for e in lo..hi {
                let v = edge_var[e];
                v2c.push(acc[v].without(c2v[e], v)?);
            }
            for t in 0..hi - lo {
                buf.clear();
                buf.extend(v2c.iter().enumerate().filter(|(i, _)| *i != t).map(|(_, m)| *m));
                next[lo + t] = check_message(kind, obs[a], &buf).map_err(|e| match e {
                    Error::Contradiction { .. } => Error::Contradiction { var: edge_var[lo + t] },
                    other => other,
                })?;
            }
        }
        c2v = next;
        acc = accumulate(&c2v);
        beliefs = beliefs_of(&acc)?;
        let (b, s) = summarize(&beliefs);
        ber_trace.push(b);
        soft_trace.push(s);
    }
    let hard = beliefs.iter().map(|m| m.hard()).collect();
    Ok(DecodeResult { state: BeliefState { beliefs, iteration: iters }, hard, ber_trace, soft_trace })
}

/// Empirical BER, soft information and a histogram of `p0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub ber: f64,
    pub soft_info: f64,
    pub histogram: Vec<usize>,
}

/// Error of a single decision: 1 if wrong, 1/2 if undecided.
pub fn bit_error(decision: Option<bool>, truth: bool) -> f64 {
    match decision {
        Some(b) if b == truth => 0.0,
        Some(_) => 1.0,
        None => 0.5,
    }
}

pub fn measure(result: &DecodeResult, truth: &[bool], bins: usize) -> Result<Measurement> {
    if truth.len() != result.hard.len() {
        return Err(Error::LengthMismatch { expected: result.hard.len(), got: truth.len() });
    }
    let k = truth.len().max(1) as f64;
    let ber = result.hard.iter().zip(truth).map(|(&h, &t)| bit_error(h, t)).sum::<f64>() / k;
    let ent: f64 = result.state.beliefs.iter().map(|m| h_b(m.p0())).sum();
    let bins = bins.max(1);
    let mut histogram = vec![0usize; bins];
    for m in &result.state.beliefs {
        let b = ((m.p0() * bins as f64) as usize).min(bins - 1);
        histogram[b] += 1;
    }
    Ok(Measurement { ber, soft_info: 1.0 - ent / k, histogram })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::Check;

    fn ratio(m: Msg) -> f64 {
        m.ratio()
    }

    #[test]
    fn majority_message_taxonomy() {
        let u = Msg::UNIFORM;
        let m = check_message(CheckKind::Maj(3), Symbol::Zero, &[u, u]).unwrap();
        assert!((ratio(m) - 3.0).abs() < 1e-12);
        let m = check_message(CheckKind::Maj(3), Symbol::One, &[u, u]).unwrap();
        assert!((ratio(m) - 1.0 / 3.0).abs() < 1e-12);
        let m = check_message(CheckKind::Maj(3), Symbol::Zero, &[Msg::Known(false), u]).unwrap();
        assert!((ratio(m) - 2.0).abs() < 1e-12);
        let m = check_message(CheckKind::Maj(3), Symbol::Zero, &[Msg::Known(true), u]).unwrap();
        assert_eq!(m, Msg::Known(false));
        let m = check_message(CheckKind::Maj(3), Symbol::Zero, &[Msg::Known(true), Msg::Known(false)]).unwrap();
        assert_eq!(m, Msg::Known(false));
        let m = check_message(CheckKind::Maj(3), Symbol::Zero, &[Msg::Known(false), Msg::Known(false)]).unwrap();
        assert_eq!(m, Msg::UNIFORM);
        assert!(check_message(CheckKind::Maj(3), Symbol::Zero, &[Msg::Known(true), Msg::Known(true)]).is_err());
    }

    #[test]
    fn majority_matches_reciprocal_formula() {
        // r0 = 1 + 1/r1 + 1/r2 for MAJ(3) with observed 0.
        let (r1, r2) = (2.5_f64, 0.4_f64);
        let m = check_message(CheckKind::Maj(3), Symbol::Zero, &[Msg::Llr(r1.ln()), Msg::Llr(r2.ln())]).unwrap();
        assert!((ratio(m) - (1.0 + 1.0 / r1 + 1.0 / r2)).abs() < 1e-12);
    }

    #[test]
    fn parity_messages() {
        let u = Msg::UNIFORM;
        assert_eq!(check_message(CheckKind::Xor(3), Symbol::One, &[u, Msg::Known(true)]).unwrap(), u);
        assert_eq!(
            check_message(CheckKind::Xor(3), Symbol::One, &[Msg::Known(true), Msg::Known(true)]).unwrap(),
            Msg::Known(true)
        );
        assert_eq!(check_message(CheckKind::Xor(2), Symbol::Erased, &[Msg::Known(true)]).unwrap(), u);
        assert_eq!(check_message(CheckKind::Parity(2), Symbol::Erased, &[Msg::Known(true)]).unwrap(), Msg::Known(true));
    }

    #[test]
    fn zero_iterations_clamp_systematic() {
        let g = FactorGraph::new(
            2,
            vec![
                Check { kind: CheckKind::Xor(1), vars: vec![0] },
                Check { kind: CheckKind::Xor(1), vars: vec![1] },
                Check { kind: CheckKind::Maj(1), vars: vec![1] },
            ],
            2,
        )
        .unwrap();
        let rx = ReceivedWord {
            symbols: vec![Symbol::One, Symbol::Erased, Symbol::Erased],
            channel: crate::channels::ChannelParam::Bec(0.5),
        };
        let r = run_bp(&g, &rx, 0).unwrap();
        assert_eq!(r.state.beliefs, vec![Msg::Known(true), Msg::UNIFORM]);
        assert_eq!(r.ber_trace.len(), 1);
        let m = measure(&r, &[true, false], 4).unwrap();
        assert!((m.ber - 0.25).abs() < 1e-15);
        assert!((m.soft_info - 0.5).abs() < 1e-15);
    }
}
