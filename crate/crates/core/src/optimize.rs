//! Degree-profile search: projected gradient ascent of density-evolution
//! objectives over the probability simplex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::devo::{fixed_point, iterate, DeQuantity};
use crate::efun::{EFunctionFamily, Payoff, Surrogate, VariableFunction};
use crate::ensemble::{CheckKind, DegreeProfile};
use crate::error::{Error, Result};

const FD_STEP: f64 = 1e-5;
const INITIAL_STEP: f64 = 1e-3;
const MIN_STEP: f64 = 1e-10;
const MAX_ITERS: usize = 400;
const FIXED_POINT_TOL: f64 = 1e-12;

/// How many density-evolution steps the objective uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    Iterations(usize),
    /// Iterate to convergence from zero.
    FixedPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptProblem {
    pub components: Vec<CheckKind>,
    /// Capacity-to-rate ratios whose reveal probabilities are summed.
    pub targets: Vec<f64>,
    pub horizon: Horizon,
    pub dmax: usize,
    pub starts: usize,
    pub seed: u64,
}

impl OptProblem {
    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() || self.targets.is_empty() {
            return Err(Error::InvalidParameter("components and targets must be non-empty".into()));
        }
        if self.horizon == Horizon::Iterations(0) {
            return Err(Error::InvalidParameter("need at least one iteration".into()));
        }
        Ok(())
    }
}

/// One projected-ascent run.
#[derive(Debug, Clone, PartialEq)]
pub struct StartTrace {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    /// Objective after every accepted step, starting with the initial value.
    pub objective: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub profile: DegreeProfile,
    pub objective: f64,
    pub starts: Vec<StartTrace>,
}

/// Mixed erasure function with per-component weights supplied at evaluation.
struct Evaluator {
    linear: Vec<(usize, usize)>,
    maj: Vec<usize>,
    family: Option<EFunctionFamily>,
}

struct Weighted<'a> {
    ev: &'a Evaluator,
    w: &'a [f64],
}

impl VariableFunction for Weighted<'_> {
    fn value(&self, alpha: f64, q: f64) -> f64 {
        let lin: f64 = self
            .ev
            .linear
            .iter()
            .map(|&(idx, i)| (-alpha * self.w[idx] * i as f64 * q.powi(i as i32 - 1)).exp())
            .product();
        match &self.ev.family {
            Some(f) => {
                let wm: f64 = self.ev.maj.iter().map(|&i| self.w[i]).sum();
                lin * f.value(alpha * wm, q)
            }
            None => 0.5 * lin,
        }
    }

    fn payoff(&self) -> Payoff {
        Payoff::Error
    }

    fn surrogate(&self) -> Surrogate {
        Surrogate::Bec
    }
}

impl Evaluator {
    fn new(components: &[CheckKind], dmax: usize) -> Result<Self> {
        let mut linear = Vec::new();
        let mut maj = Vec::new();
        let mut arity = None;
        for (i, &c) in components.iter().enumerate() {
            match c {
                CheckKind::Xor(d) | CheckKind::Maj(d @ 1) => linear.push((i, d)),
                CheckKind::Maj(d) => {
                    if arity.is_some_and(|a| a != d) {
                        return Err(Error::UnsupportedArity { got: d, expected: "one majority arity".into() });
                    }
                    arity = Some(d);
                    maj.push(i);
                }
                CheckKind::Parity(d) => {
                    return Err(Error::UnsupportedArity { got: d, expected: "transmitted checks".into() })
                }
            }
        }
        let family = match arity {
            Some(d) => Some(EFunctionFamily::ldmc(d, Surrogate::Bec, Payoff::Error, dmax)?),
            None => None,
        };
        Ok(Evaluator { linear, maj, family })
    }

    fn eval(&self, w: &[f64], targets: &[f64], horizon: Horizon) -> f64 {
        let f = Weighted { ev: self, w };
        targets
            .iter()
            .map(|&a| match horizon {
                Horizon::Iterations(l) => iterate(&f, a, 0.0, l, Surrogate::Bec, DeQuantity::Error)
                    .expect("tags match")
                    .last(),
                Horizon::FixedPoint => fixed_point(&f, a, 0.0, FIXED_POINT_TOL).expect("tags match").q,
            })
            .sum()
    }
}

/// Sum over targets of the reveal probability reached from zero.
pub fn objective(profile: &DegreeProfile, problem: &OptProblem) -> Result<f64> {
    problem.validate()?;
    let total: f64 = profile.entries().iter().map(|e| e.1).sum();
    if (total - 1.0).abs() > 1e-9 || profile.entries().iter().any(|e| e.1 < 0.0) {
        return Err(Error::InvalidParameter("profile is not on the simplex".into()));
    }
    let kinds: Vec<CheckKind> = profile.entries().iter().map(|e| e.0).collect();
    let w: Vec<f64> = profile.entries().iter().map(|e| e.1).collect();
    Ok(Evaluator::new(&kinds, problem.dmax)?.eval(&w, &problem.targets, problem.horizon))
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (j + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

fn dirichlet_one<R: Rng>(m: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

fn ascend(ev: &Evaluator, p: &OptProblem, start: Vec<f64>) -> StartTrace {
    let f = |w: &[f64]| ev.eval(w, &p.targets, p.horizon);
    let mut x = start.clone();
    let mut fx = f(&x);
    let mut trace = vec![fx];
    let mut step = INITIAL_STEP;
    let mut converged = false;
    for _ in 0..MAX_ITERS {
        let mut grad = vec![0.0; x.len()];
        for i in 0..x.len() {
            let mut hi = x.clone();
            let mut lo = x.clone();
            hi[i] += FD_STEP;
            let span = if x[i] >= FD_STEP {
                lo[i] -= FD_STEP;
                2.0 * FD_STEP
            } else {
                FD_STEP
            };
            grad[i] = (f(&hi) - f(&lo)) / span;
        }
        let mut accepted = false;
        while step >= MIN_STEP {
            let cand: Vec<f64> = project_simplex(&x.iter().zip(&grad).map(|(a, g)| a + step * g).collect::<Vec<_>>());
            let fc = f(&cand);
            if fc > fx {
                x = cand;
                fx = fc;
                trace.push(fx);
                step = (step * 2.0).min(1.0);
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if !accepted {
            converged = true;
            break;
        }
    }
    StartTrace { start, end: x, objective: trace, converged }
}

/// Best local optimum over `problem.starts` Dirichlet(1) starting points.
pub fn optimize_profile(problem: &OptProblem) -> Result<OptResult> {
    problem.validate()?;
    let m = problem.components.len();
    let build = |w: &[f64]| DegreeProfile::new(problem.components.iter().copied().zip(w.iter().copied()).collect());
    let ev = Evaluator::new(&problem.components, problem.dmax)?;
    if m == 1 {
        let obj = ev.eval(&[1.0], &problem.targets, problem.horizon);
        let t = StartTrace { start: vec![1.0], end: vec![1.0], objective: vec![obj], converged: true };
        return Ok(OptResult { profile: build(&[1.0])?, objective: obj, starts: vec![t] });
    }
    let traces: Vec<StartTrace> = (0..problem.starts.max(1))
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
            rng.set_stream(s as u64);
            ascend(&ev, problem, dirichlet_one(m, &mut rng))
        })
        .collect();
    let best = traces
        .iter()
        .max_by(|a, b| a.objective.last().partial_cmp(&b.objective.last()).unwrap())
        .unwrap();
    // Renormalise away rounding drift before validating.
    let s: f64 = best.end.iter().sum();
    let w: Vec<f64> = best.end.iter().map(|x| x / s).collect();
    Ok(OptResult { profile: build(&w)?, objective: *best.objective.last().unwrap(), starts: traces })
}
