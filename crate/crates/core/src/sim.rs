//! Monte Carlo harness: sample a code, transmit, decode, measure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bp::{bit_error, measure, run_bp};
use crate::channels::{transmit, ChannelParam, Symbol};
use crate::ensemble::{encode, sample_graph, EnsembleSpec, FactorGraph};
use crate::error::{Error, Result};

/// Counter-derived stream for trial `trial` of sweep point `point`.
pub fn trial_stream(seed: u64, point: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((point << 32) | (trial & 0xffff_ffff));
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub bp_iters: usize,
    pub trials: usize,
    pub seed: u64,
    pub bins: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { bp_iters: 10, trials: 10, seed: 0, bins: 20 }
    }
}

/// Result of one decoded instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub ber: f64,
    pub soft_info: f64,
    pub histogram: Vec<usize>,
    /// `degree_errors[d]` sums bit errors over variables with `d` observed memberships.
    pub degree_errors: Vec<f64>,
    pub degree_counts: Vec<u64>,
    pub ber_trace: Vec<f64>,
}

/// Aggregate over the trials of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SimPoint {
    pub channel: ChannelParam,
    /// Trials that decoded (contradictions are counted in `failures`).
    pub trials: usize,
    pub failures: usize,
    pub ber: f64,
    /// Binomial standard error of the trial mean over `trials * k` bits.
    pub ber_stderr: f64,
    pub soft_info: f64,
    pub trial_ber: Vec<f64>,
    pub trial_soft: Vec<f64>,
    pub histogram: Vec<usize>,
    pub degree_errors: Vec<f64>,
    pub degree_counts: Vec<u64>,
    pub ber_trace: Vec<f64>,
}

impl SimPoint {
    /// BER among variables with exactly `d` observed memberships.
    pub fn degree_ber(&self, d: usize) -> Option<f64> {
        match self.degree_counts.get(d) {
            Some(&c) if c > 0 => Some(self.degree_errors[d] / c as f64),
            _ => None,
        }
    }

    /// Standard deviation of per-trial BER divided by sqrt(trials).
    pub fn trial_stderr(&self) -> f64 {
        spread(&self.trial_ber, self.ber)
    }

    /// Same for the soft information.
    pub fn soft_stderr(&self) -> f64 {
        spread(&self.trial_soft, self.soft_info)
    }
}

fn spread(xs: &[f64], mean: f64) -> f64 {
    let t = xs.len();
    if t < 2 {
        return 0.0;
    }
    let var = xs.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (t - 1) as f64;
    (var / t as f64).sqrt()
}

/// Memberships of each variable in unerased checks past the systematic prefix.
pub fn observed_degrees(graph: &FactorGraph, symbols: &[Symbol]) -> Vec<usize> {
    let mut deg = vec![0usize; graph.k];
    let mut pos = 0;
    for (j, c) in graph.checks.iter().enumerate() {
        let seen = if c.kind.is_emitted() {
            pos += 1;
            symbols[pos - 1] != Symbol::Erased
        } else {
            true
        };
        if seen && j >= graph.systematic_prefix {
            for &v in &c.vars {
                deg[v] += 1;
            }
        }
    }
    deg
}

/// Decode one instance of `graph` with uniform source bits drawn from `rng`.
pub fn run_trial<R: Rng + ?Sized>(
    graph: &FactorGraph,
    ch: ChannelParam,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<TrialOutcome> {
    let source: Vec<bool> = (0..graph.k).map(|_| rng.random()).collect();
    let codeword = encode(graph, &source)?;
    let received = transmit(&codeword, ch, rng);
    let res = run_bp(graph, &received, cfg.bp_iters)?;
    let m = measure(&res, &source, cfg.bins)?;
    let deg = observed_degrees(graph, &received.symbols);
    let maxd = deg.iter().copied().max().unwrap_or(0);
    let mut degree_errors = vec![0.0; maxd + 1];
    let mut degree_counts = vec![0u64; maxd + 1];
    for v in 0..graph.k {
        degree_errors[deg[v]] += bit_error(res.hard[v], source[v]);
        degree_counts[deg[v]] += 1;
    }
    Ok(TrialOutcome {
        ber: m.ber,
        soft_info: m.soft_info,
        histogram: m.histogram,
        degree_errors,
        degree_counts,
        ber_trace: res.ber_trace,
    })
}

fn add_into<T: Copy + std::ops::AddAssign + Default>(acc: &mut Vec<T>, x: &[T]) {
    if acc.len() < x.len() {
        acc.resize(x.len(), T::default());
    }
    for (a, b) in acc.iter_mut().zip(x) {
        *a += *b;
    }
}

/// Run `cfg.trials` independent trials, each on a freshly sampled graph.
pub fn simulate_point(spec: &EnsembleSpec, ch: ChannelParam, cfg: &SimConfig, point: u64) -> Result<SimPoint> {
    spec.validate()?;
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let outcomes: Vec<Result<TrialOutcome>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_stream(cfg.seed, point, t);
            let graph = sample_graph(spec, &mut rng)?;
            run_trial(&graph, ch, cfg, &mut rng)
        })
        .collect();
    let mut ok = Vec::with_capacity(outcomes.len());
    let mut failures = 0;
    for o in outcomes {
        match o {
            Ok(x) => ok.push(x),
            Err(Error::Contradiction { .. }) => failures += 1,
            Err(e) => return Err(e),
        }
    }
    if ok.is_empty() {
        return Err(Error::NonConvergence("every trial ended in a contradiction".into()));
    }
    let t = ok.len() as f64;
    let trial_ber: Vec<f64> = ok.iter().map(|o| o.ber).collect();
    let ber = trial_ber.iter().sum::<f64>() / t;
    let trial_soft: Vec<f64> = ok.iter().map(|o| o.soft_info).collect();
    let soft_info = trial_soft.iter().sum::<f64>() / t;
    let (mut histogram, mut degree_errors, mut degree_counts, mut ber_trace) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for o in &ok {
        add_into(&mut histogram, &o.histogram);
        add_into(&mut degree_errors, &o.degree_errors);
        add_into(&mut degree_counts, &o.degree_counts);
        add_into(&mut ber_trace, &o.ber_trace);
    }
    for x in &mut ber_trace {
        *x /= t;
    }
    let bits = t * spec.k as f64;
    Ok(SimPoint {
        channel: ch,
        trials: ok.len(),
        failures,
        ber,
        ber_stderr: (ber * (1.0 - ber) / bits).sqrt(),
        soft_info,
        trial_ber,
        trial_soft,
        histogram,
        degree_errors,
        degree_counts,
        ber_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{CheckKind, DegreeProfile};

    fn rep(k: usize) -> EnsembleSpec {
        EnsembleSpec {
            k,
            rate: 0.5,
            profile: DegreeProfile::single(CheckKind::Maj(1)).unwrap(),
            systematic: false,
            regular: true,
            seed: 0,
        }
    }

    #[test]
    fn repetition_half_eps_squared() {
        let cfg = SimConfig { bp_iters: 1, trials: 8, seed: 3, bins: 10 };
        let p = simulate_point(&rep(5000), ChannelParam::Bec(0.5), &cfg, 0).unwrap();
        assert!((p.ber - 0.125).abs() < 4.0 * p.ber_stderr + 1e-3, "{}", p.ber);
        assert_eq!(p.histogram.iter().sum::<usize>(), 8 * 5000);
        let d0 = p.degree_ber(0).unwrap();
        assert!((d0 - 0.5).abs() < 1e-12);
        assert_eq!(p.degree_ber(2), Some(0.0));
    }

    #[test]
    fn seeded_points_repeat() {
        let cfg = SimConfig { bp_iters: 5, trials: 4, seed: 9, bins: 10 };
        let ldmc = EnsembleSpec { profile: DegreeProfile::single(CheckKind::Maj(3)).unwrap(), regular: false, ..rep(500) };
        let a = simulate_point(&ldmc, ChannelParam::Bec(0.3), &cfg, 2).unwrap();
        let b = simulate_point(&ldmc, ChannelParam::Bec(0.3), &cfg, 2).unwrap();
        assert_eq!(a, b);
        let c = simulate_point(&ldmc, ChannelParam::Bec(0.3), &cfg, 3).unwrap();
        assert_ne!(a.trial_ber, c.trial_ber);
    }
}
