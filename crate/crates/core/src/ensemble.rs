//! Check kinds, degree profiles, ensemble sampling and encoding.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{ReceivedWord, Symbol};
use crate::error::{Error, Result};

const REGULAR_RETRIES: usize = 100;
const SWAP_ATTEMPTS: usize = 1000;

/// Boolean function attached to a check node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckKind {
    /// Strict majority of an odd number of inputs.
    Maj(usize),
    /// Parity of the inputs.
    Xor(usize),
    /// Parity observed noiselessly as zero; never transmitted.
    Parity(usize),
}

impl CheckKind {
    pub fn maj(d: usize) -> Result<Self> {
        CheckKind::Maj(d).validated()
    }

    pub fn xor(d: usize) -> Result<Self> {
        CheckKind::Xor(d).validated()
    }

    pub fn parity(d: usize) -> Result<Self> {
        CheckKind::Parity(d).validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            CheckKind::Maj(d) if d == 0 || d % 2 == 0 => Err(Error::UnsupportedArity {
                got: d,
                expected: "odd arity >= 1 for MAJ".into(),
            }),
            CheckKind::Xor(0) => Err(Error::UnsupportedArity { got: 0, expected: ">= 1".into() }),
            CheckKind::Parity(d) if d < 2 => Err(Error::UnsupportedArity {
                got: d,
                expected: ">= 2 for PAR".into(),
            }),
            k => Ok(k),
        }
    }

    pub fn arity(self) -> usize {
        match self {
            CheckKind::Maj(d) | CheckKind::Xor(d) | CheckKind::Parity(d) => d,
        }
    }

    /// True when the check produces a transmitted coded bit.
    pub fn is_emitted(self) -> bool {
        !matches!(self, CheckKind::Parity(_))
    }

    /// True when the check output is a GF(2)-linear function of its inputs.
    pub fn is_linear(self) -> bool {
        !matches!(self, CheckKind::Maj(d) if d > 1)
    }

    pub fn eval(self, inputs: &[bool]) -> bool {
        match self {
            CheckKind::Maj(d) => 2 * inputs.iter().filter(|&&b| b).count() > d,
            CheckKind::Xor(_) | CheckKind::Parity(_) => inputs.iter().fold(false, |a, &b| a ^ b),
        }
    }

    fn token(self) -> &'static str {
        match self {
            CheckKind::Maj(_) => "MAJ",
            CheckKind::Xor(_) => "XOR",
            CheckKind::Parity(_) => "PAR",
        }
    }

    fn from_token(tok: &str, arity: usize) -> Option<Result<Self>> {
        let k = match tok.to_ascii_uppercase().as_str() {
            "MAJ" => CheckKind::Maj(arity),
            "XOR" => CheckKind::Xor(arity),
            "PAR" | "PARITY" => CheckKind::Parity(arity),
            _ => return None,
        };
        Some(k.validated())
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.token(), self.arity())
    }
}

/// Mixture weights over check kinds.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeProfile {
    entries: Vec<(CheckKind, f64)>,
}

impl DegreeProfile {
    pub fn new(entries: Vec<(CheckKind, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter("degree profile is empty".into()));
        }
        for &(kind, w) in &entries {
            kind.validated()?;
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidParameter(format!("weight {w} on {kind} is negative")));
            }
        }
        let total: f64 = entries.iter().map(|e| e.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("profile weights sum to {total}, not 1")));
        }
        Ok(DegreeProfile { entries })
    }

    pub fn single(kind: CheckKind) -> Result<Self> {
        DegreeProfile::new(vec![(kind, 1.0)])
    }

    pub fn entries(&self) -> &[(CheckKind, f64)] {
        &self.entries
    }

    /// `sum_i lambda_i * arity_i`.
    pub fn mean_arity(&self) -> f64 {
        self.entries.iter().map(|(k, w)| w * k.arity() as f64).sum()
    }

    /// Parse lines of `KIND arity weight`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: i + 1, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(perr(format!("expected `KIND arity weight`, got `{line}`")));
            }
            let arity: usize = toks[1].parse().map_err(|_| perr(format!("bad arity `{}`", toks[1])))?;
            let weight: f64 = toks[2].parse().map_err(|_| perr(format!("bad weight `{}`", toks[2])))?;
            let kind = CheckKind::from_token(toks[0], arity)
                .ok_or_else(|| perr(format!("unknown check kind `{}`", toks[0])))??;
            entries.push((kind, weight));
        }
        DegreeProfile::new(entries)
    }

    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(k, w)| format!("{} {} {}\n", k.token(), k.arity(), w))
            .collect()
    }

    /// Check counts summing to `n` by largest-remainder rounding.
    pub fn counts(&self, n: usize) -> Vec<usize> {
        let ideal: Vec<f64> = self.entries.iter().map(|e| e.1 * n as f64).collect();
        let mut counts: Vec<usize> = ideal.iter().map(|x| x.floor() as usize).collect();
        let assigned: usize = counts.iter().sum();
        let mut order: Vec<usize> = (0..counts.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = ideal[a] - ideal[a].floor();
            let rb = ideal[b] - ideal[b].floor();
            rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
        });
        for &i in order.iter().take(n.saturating_sub(assigned)) {
            counts[i] += 1;
        }
        counts
    }
}

impl FromStr for DegreeProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DegreeProfile::parse(s)
    }
}

/// Parameters of a code ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub k: usize,
    pub rate: f64,
    pub profile: DegreeProfile,
    pub systematic: bool,
    pub regular: bool,
    pub seed: u64,
}

impl EnsembleSpec {
    /// Number of transmitted-or-constrained checks, `round(k / R)`.
    pub fn n(&self) -> usize {
        (self.k as f64 / self.rate).round() as usize
    }

    /// Checks drawn from the profile (everything but the identity prefix).
    pub fn random_checks(&self) -> usize {
        self.n() - if self.systematic { self.k } else { 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Infeasible("k must be positive".into()));
        }
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(Error::Infeasible(format!("rate {} is outside (0, 1]", self.rate)));
        }
        if self.systematic && self.n() < self.k {
            return Err(Error::Infeasible("n < k for a systematic code".into()));
        }
        let counts = self.profile.counts(self.random_checks());
        for (&(kind, _), &c) in self.profile.entries().iter().zip(&counts) {
            if c > 0 && kind.arity() > self.k {
                return Err(Error::Infeasible(format!("{kind} needs more than k = {} variables", self.k)));
            }
        }
        if self.regular {
            let stubs: usize = self
                .profile
                .entries()
                .iter()
                .zip(&counts)
                .map(|(e, c)| e.0.arity() * c)
                .sum();
            if !stubs.is_multiple_of(self.k) {
                return Err(Error::Infeasible(format!(
                    "regular ensemble needs k | sum of arities ({stubs} memberships over k = {})",
                    self.k
                )));
            }
        }
        Ok(())
    }

    /// Sample with the stream seeded from `self.seed`.
    pub fn sample(&self) -> Result<FactorGraph> {
        sample_graph(self, &mut ChaCha8Rng::seed_from_u64(self.seed))
    }
}

/// One check node: a kind and the participating variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub kind: CheckKind,
    pub vars: Vec<usize>,
}

/// A code instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorGraph {
    pub k: usize,
    pub checks: Vec<Check>,
    /// The first `systematic_prefix` checks are `XOR(1)` on variables `0..k` in order.
    pub systematic_prefix: usize,
}

impl FactorGraph {
    pub fn new(k: usize, checks: Vec<Check>, systematic_prefix: usize) -> Result<Self> {
        for (j, c) in checks.iter().enumerate() {
            c.kind.validated()?;
            if c.vars.len() != c.kind.arity() {
                return Err(Error::LengthMismatch { expected: c.kind.arity(), got: c.vars.len() });
            }
            let mut seen = c.vars.clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter(format!("check {j} repeats a variable")));
            }
            if seen.last().is_some_and(|&v| v >= k) {
                return Err(Error::InvalidParameter(format!("check {j} indexes past k = {k}")));
            }
        }
        if systematic_prefix > checks.len() {
            return Err(Error::InvalidParameter("systematic prefix longer than check list".into()));
        }
        for (i, c) in checks.iter().take(systematic_prefix).enumerate() {
            if c.kind != CheckKind::Xor(1) || c.vars[0] != i {
                return Err(Error::InvalidParameter(format!("check {i} is not the identity on variable {i}")));
            }
        }
        Ok(FactorGraph { k, checks, systematic_prefix })
    }

    /// Indices of checks whose outputs are transmitted, in codeword order.
    pub fn emitted_checks(&self) -> Vec<usize> {
        (0..self.checks.len()).filter(|&j| self.checks[j].kind.is_emitted()).collect()
    }

    pub fn n_emitted(&self) -> usize {
        self.checks.iter().filter(|c| c.kind.is_emitted()).count()
    }

    pub fn is_linear(&self) -> bool {
        self.checks.iter().all(|c| c.kind.is_linear())
    }

    /// Keep the parity constraints and the transmitted checks that were not erased.
    pub fn observed_subgraph(&self, received: &ReceivedWord) -> Result<FactorGraph> {
        let emitted = self.emitted_checks();
        if emitted.len() != received.len() {
            return Err(Error::LengthMismatch { expected: emitted.len(), got: received.len() });
        }
        let mut keep = vec![true; self.checks.len()];
        for (pos, &j) in emitted.iter().enumerate() {
            if received.symbols[pos] == Symbol::Erased {
                keep[j] = false;
            }
        }
        let checks = self
            .checks
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(c, _)| c.clone())
            .collect();
        Ok(FactorGraph { k: self.k, checks, systematic_prefix: 0 })
    }

    /// Line-oriented text: header `k n systematic`, then `KIND arity i1 .. id`.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.k, self.checks.len(), u8::from(self.systematic_prefix > 0));
        for c in &self.checks {
            s.push_str(c.kind.token());
            s.push(' ');
            s.push_str(&c.kind.arity().to_string());
            for v in &c.vars {
                s.push(' ');
                s.push_str(&v.to_string());
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty graph file".into() })?;
        let h: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse { line: 1, msg: "header must be `k n systematic`".into() })?;
        if h.len() != 3 {
            return Err(Error::Parse { line: 1, msg: "header must be `k n systematic`".into() });
        }
        let (k, n, sys) = (h[0], h[1], h[2] != 0);
        let mut checks = Vec::with_capacity(n);
        for (i, line) in lines {
            let perr = |msg: &str| Error::Parse { line: i + 1, msg: msg.into() };
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 2 {
                return Err(perr("expected `KIND arity indices`"));
            }
            let arity: usize = toks[1].parse().map_err(|_| perr("bad arity"))?;
            let kind = CheckKind::from_token(toks[0], arity).ok_or_else(|| perr("unknown kind"))??;
            let vars: Vec<usize> = toks[2..]
                .iter()
                .map(|t| t.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| perr("bad variable index"))?;
            checks.push(Check { kind, vars });
        }
        if checks.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: checks.len() });
        }
        FactorGraph::new(k, checks, if sys { k } else { 0 })
    }
}

/// Sample a code instance from the ensemble.
pub fn sample_graph<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<FactorGraph> {
    spec.validate()?;
    let k = spec.k;
    let mut checks = Vec::with_capacity(spec.n());
    if spec.systematic {
        checks.extend((0..k).map(|i| Check { kind: CheckKind::Xor(1), vars: vec![i] }));
    }
    let counts = spec.profile.counts(spec.random_checks());
    let kinds: Vec<CheckKind> = spec
        .profile
        .entries()
        .iter()
        .zip(&counts)
        .flat_map(|(e, &c)| std::iter::repeat_n(e.0, c))
        .collect();
    if spec.regular {
        checks.extend(configuration_model(k, &kinds, rng)?);
    } else {
        for kind in kinds {
            let vars = rand::seq::index::sample(rng, k, kind.arity()).into_vec();
            checks.push(Check { kind, vars });
        }
    }
    Ok(FactorGraph { k, checks, systematic_prefix: if spec.systematic { k } else { 0 } })
}

fn configuration_model<R: Rng + ?Sized>(k: usize, kinds: &[CheckKind], rng: &mut R) -> Result<Vec<Check>> {
    let offsets: Vec<usize> = std::iter::once(0)
        .chain(kinds.iter().scan(0, |acc, kd| {
            *acc += kd.arity();
            Some(*acc)
        }))
        .collect();
    let total = *offsets.last().unwrap();
    let deg = total / k;
    let check_of = |pos: usize| offsets.partition_point(|&o| o <= pos) - 1;
    let has_dup = |stubs: &[usize], c: usize| {
        let s = &stubs[offsets[c]..offsets[c + 1]];
        (0..s.len()).any(|i| s[i + 1..].contains(&s[i]))
    };
    for _ in 0..REGULAR_RETRIES {
        let mut stubs: Vec<usize> = (0..k).flat_map(|v| std::iter::repeat_n(v, deg)).collect();
        stubs.shuffle(rng);
        let mut ok = true;
        'checks: for c in 0..kinds.len() {
            while has_dup(&stubs, c) {
                let (lo, hi) = (offsets[c], offsets[c + 1]);
                let dup = (lo..hi).find(|&i| stubs[lo..i].contains(&stubs[i])).unwrap();
                let mut fixed = false;
                for _ in 0..SWAP_ATTEMPTS {
                    let p = rng.random_range(0..total);
                    let other = check_of(p);
                    if other == c {
                        continue;
                    }
                    stubs.swap(dup, p);
                    if !has_dup(&stubs, other) && !stubs[lo..hi].iter().enumerate().any(|(i, &v)| i + lo != dup && v == stubs[dup]) {
                        fixed = true;
                        break;
                    }
                    stubs.swap(dup, p);
                }
                if !fixed {
                    ok = false;
                    break 'checks;
                }
            }
        }
        if ok {
            return Ok(kinds
                .iter()
                .enumerate()
                .map(|(c, &kind)| Check { kind, vars: stubs[offsets[c]..offsets[c + 1]].to_vec() })
                .collect());
        }
    }
    Err(Error::SamplingFailure { attempts: REGULAR_RETRIES })
}

/// Evaluate the transmitted coded bits.
pub fn encode(graph: &FactorGraph, source: &[bool]) -> Result<Vec<bool>> {
    if source.len() != graph.k {
        return Err(Error::LengthMismatch { expected: graph.k, got: source.len() });
    }
    let mut out = Vec::with_capacity(graph.checks.len());
    let mut buf = Vec::new();
    for (j, c) in graph.checks.iter().enumerate() {
        buf.clear();
        buf.extend(c.vars.iter().map(|&v| source[v]));
        let y = c.kind.eval(&buf);
        if c.kind.is_emitted() {
            out.push(y);
        } else if y {
            return Err(Error::ConstraintViolation { check: j });
        }
    }
    Ok(out)
}

/// Histogram of variable memberships in the non-identity checks.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    /// `counts[d]` variables have degree `d`.
    pub counts: Vec<usize>,
    pub mean: f64,
}

impl DegreeStats {
    pub fn min_max(&self) -> (usize, usize) {
        let nz: Vec<usize> = (0..self.counts.len()).filter(|&d| self.counts[d] > 0).collect();
        (*nz.first().unwrap_or(&0), *nz.last().unwrap_or(&0))
    }

    pub fn pmf(&self) -> Vec<f64> {
        let total: usize = self.counts.iter().sum();
        self.counts.iter().map(|&c| c as f64 / total.max(1) as f64).collect()
    }
}

/// Per-variable degree over the checks after the systematic prefix.
pub fn variable_degrees(graph: &FactorGraph) -> Vec<usize> {
    let mut deg = vec![0usize; graph.k];
    for c in &graph.checks[graph.systematic_prefix..] {
        for &v in &c.vars {
            deg[v] += 1;
        }
    }
    deg
}

pub fn degree_stats(graph: &FactorGraph) -> DegreeStats {
    let deg = variable_degrees(graph);
    let maxd = deg.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0usize; maxd + 1];
    for &d in &deg {
        counts[d] += 1;
    }
    let total: usize = deg.iter().sum();
    DegreeStats { counts, mean: total as f64 / graph.k.max(1) as f64 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(k: usize, rate: f64, kind: CheckKind, systematic: bool, regular: bool) -> EnsembleSpec {
        EnsembleSpec { k, rate, profile: DegreeProfile::single(kind).unwrap(), systematic, regular, seed: 11 }
    }

    #[test]
    fn check_counts() {
        let g = spec(10, 0.5, CheckKind::Maj(3), false, false).sample().unwrap();
        assert_eq!(g.checks.len(), 20);
        for c in &g.checks {
            let mut v = c.vars.clone();
            v.sort();
            v.dedup();
            assert_eq!(v.len(), 3);
        }
        let g = spec(4, 0.5, CheckKind::Maj(3), true, false).sample().unwrap();
        assert_eq!(g.systematic_prefix, 4);
        assert_eq!(g.checks.len(), 8);
    }

    #[test]
    fn regular_systematic_memberships() {
        let g = spec(40_000, 0.5, CheckKind::Maj(3), true, true).sample().unwrap();
        let mut all = vec![0usize; g.k];
        for c in &g.checks {
            for &v in &c.vars {
                all[v] += 1;
            }
        }
        assert!(all.iter().all(|&d| d == 4));
        assert_eq!(degree_stats(&g).min_max(), (3, 3));
    }

    #[test]
    fn infeasible_regularity() {
        let s = spec(10, 0.7, CheckKind::Maj(3), false, true);
        assert!(matches!(s.sample(), Err(Error::Infeasible(_))));
    }

    #[test]
    fn encoding_rules() {
        assert!(!CheckKind::Maj(3).eval(&[false, false, true]));
        assert!(CheckKind::Maj(3).eval(&[true, true, false]));
        assert!(!CheckKind::Xor(3).eval(&[true, true, false]));
        let g = spec(6, 0.5, CheckKind::Maj(3), true, false).sample().unwrap();
        let s = vec![true, false, true, true, false, false];
        assert_eq!(&encode(&g, &s).unwrap()[..6], &s[..]);
    }

    #[test]
    fn parity_constraints_are_checked() {
        let g = FactorGraph::new(
            3,
            vec![
                Check { kind: CheckKind::Parity(2), vars: vec![0, 1] },
                Check { kind: CheckKind::Maj(3), vars: vec![0, 1, 2] },
            ],
            0,
        )
        .unwrap();
        assert_eq!(encode(&g, &[true, true, false]).unwrap(), vec![true]);
        assert_eq!(encode(&g, &[true, false, false]), Err(Error::ConstraintViolation { check: 0 }));
    }

    #[test]
    fn largest_remainder() {
        let p = DegreeProfile::new(vec![(CheckKind::Xor(1), 0.08), (CheckKind::Xor(2), 0.22), (CheckKind::Xor(3), 0.7)]).unwrap();
        let c = p.counts(101);
        assert_eq!(c.iter().sum::<usize>(), 101);
        let p = DegreeProfile::new(vec![(CheckKind::Xor(1), 0.0), (CheckKind::Maj(3), 1.0)]).unwrap();
        assert_eq!(p.counts(50), vec![0, 50]);
    }

    #[test]
    fn text_round_trips() {
        let g = spec(12, 0.5, CheckKind::Maj(3), true, false).sample().unwrap();
        assert_eq!(FactorGraph::from_text(&g.to_text()).unwrap(), g);
        let p = DegreeProfile::parse("# mix\nXOR 1 0.25\nMAJ 3 0.75\n").unwrap();
        assert_eq!(DegreeProfile::parse(&p.to_text()).unwrap(), p);
        assert!(DegreeProfile::parse("MAJ 2 1.0").is_err());
    }

    #[test]
    fn mixed_mean_degree() {
        let p = DegreeProfile::new(vec![(CheckKind::Xor(2), 0.5), (CheckKind::Maj(5), 0.5)]).unwrap();
        let s = EnsembleSpec { k: 1000, rate: 0.25, profile: p.clone(), systematic: false, regular: false, seed: 3 };
        let st = degree_stats(&s.sample().unwrap());
        assert!((st.mean - p.mean_arity() / 0.25).abs() < 1e-9);
    }
}
