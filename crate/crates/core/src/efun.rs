//! Message alphabets, per-degree erasure/error polynomials and the
//! degree-weighted E-, H- and chi-square entropy functions.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::ensemble::{CheckKind, DegreeProfile};
use crate::error::{Error, Result};
use crate::info::{binom, binomial_pmf, h_b, poisson_pmf};

/// Largest degree expanded exactly.
pub const MAX_DEGREE: usize = 14;
/// Largest alphabet accepted by [`error_poly`].
pub const MAX_ALPHABET: usize = 7;
/// Default truncation for degree-weighted functions.
pub const DEFAULT_DMAX: usize = 10;

/// Polynomial in power basis, `c[0] + c[1] q + ...`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Poly {
        Poly(vec![c])
    }

    /// `c * q^a * (1-q)^b`.
    pub fn bernstein(c: f64, a: usize, b: usize) -> Poly {
        let mut p = Poly(vec![0.0; a + b + 1]);
        for j in 0..=b {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            p.0[a + j] = c * sign * binom(b, j);
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, q: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * q + c)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n).map(|i| self.0.get(i).unwrap_or(&0.0) + other.0.get(i).unwrap_or(&0.0)).collect())
    }

    pub fn add_scaled(&mut self, other: &Poly, s: f64) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), 0.0);
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::default();
        }
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, e: usize) -> Poly {
        (0..e).fold(Poly::constant(1.0), |acc, _| acc.mul(self))
    }

    /// `int_0^1 p(q) dq`.
    pub fn integral01(&self) -> f64 {
        self.0.iter().enumerate().map(|(i, c)| c / (i + 1) as f64).sum()
    }

    /// Coefficient of `q^i`, zero past the end.
    pub fn coeff(&self, i: usize) -> f64 {
        self.0.get(i).copied().unwrap_or(0.0)
    }
}

/// `sum_j c[j] q^j (1-q)^(n-j)`: the evaluation form of the E-polynomials.
///
/// Coefficients of the error polynomials are non-negative in this basis,
/// so evaluation avoids the cancellation the power basis suffers at high
/// degree.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BernsteinPoly {
    pub c: Vec<f64>,
}

impl BernsteinPoly {
    /// Re-express `p` over `q^j (1-q)^(n-j)`, `n >= deg p`.
    pub fn from_poly(p: &Poly, n: usize) -> BernsteinPoly {
        let mut c = vec![0.0; n + 1];
        for (i, &a) in p.0.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for l in 0..=n - i {
                c[i + l] += binom(n - i, l) * a;
            }
        }
        BernsteinPoly { c }
    }

    pub fn order(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn mul(&self, other: &BernsteinPoly) -> BernsteinPoly {
        let mut c = vec![0.0; self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in other.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        BernsteinPoly { c }
    }

    fn add_scaled(&mut self, other: &BernsteinPoly, s: f64) {
        if self.c.len() < other.c.len() {
            self.c.resize(other.c.len(), 0.0);
        }
        for (a, b) in self.c.iter_mut().zip(&other.c) {
            *a += s * b;
        }
    }

    pub fn eval(&self, q: f64) -> f64 {
        let n = self.order();
        if q <= 0.5 {
            // Horner in t = q / (1-q), scaled by (1-q)^n.
            let t = q / (1.0 - q);
            self.c.iter().rev().fold(0.0, |acc, &c| acc * t + c) * (1.0 - q).powi(n as i32)
        } else {
            let t = (1.0 - q) / q;
            self.c.iter().fold(0.0, |acc, &c| acc * t + c) * q.powi(n as i32)
        }
    }

    pub fn to_poly(&self) -> Poly {
        let n = self.order();
        let mut out = Poly(vec![0.0; n + 1]);
        for (j, &c) in self.c.iter().enumerate() {
            if c != 0.0 {
                out.add_scaled(&Poly::bernstein(c, j, n - j), 1.0);
            }
        }
        out
    }
}

/// How a leaf of the depth-one tree is observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Surrogate {
    /// Leaves revealed with probability `q`.
    Bec,
    /// Leaves seen through a BSC with crossover `q`.
    Bsc,
}

/// What is averaged over the posterior of the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Payoff {
    /// Bit-MAP error probability.
    Error,
    /// Binary entropy of the posterior, in bits.
    Entropy,
    /// One minus the chi-square information.
    Chi2,
}

impl Payoff {
    fn apply(self, e: f64) -> f64 {
        match self {
            Payoff::Error => e,
            Payoff::Entropy => h_b(e),
            Payoff::Chi2 => 1.0 - (1.0 - 2.0 * e).powi(2),
        }
    }

    /// Value of an uninformative message.
    fn uninformative(self) -> f64 {
        self.apply(0.5)
    }
}

/// Magnitudes of the non-determining messages with their probabilities.
///
/// Every message is stored modulo inversion, so magnitudes are at least 1.
/// Events that determine the root bit carry zero payoff and are omitted, so
/// the weights sum to at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageAlphabet {
    pub channel: Surrogate,
    pub entries: Vec<(f64, Poly)>,
}

impl MessageAlphabet {
    /// Total retained mass at `q`.
    pub fn mass(&self, q: f64) -> f64 {
        self.entries.iter().map(|e| e.1.eval(q)).sum()
    }
}

/// Named alphabets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphabetFamily {
    Ldmc3Bec,
    Ldmc5Bec,
    /// Crossover of the leaf channel.
    Ldmc3Bsc(f64),
    /// Majority of odd arity over erased leaves, by enumeration.
    MajBec(usize),
    /// Majority of odd arity over BSC leaves at the given crossover.
    MajBsc(usize, f64),
}

pub fn f_alphabet(family: AlphabetFamily) -> Result<MessageAlphabet> {
    let b = Poly::bernstein;
    match family {
        AlphabetFamily::Ldmc3Bec => Ok(MessageAlphabet {
            channel: Surrogate::Bec,
            entries: vec![(1.0, b(0.5, 2, 0)), (2.0, b(1.5, 1, 1)), (3.0, b(1.0, 0, 2))],
        }),
        AlphabetFamily::Ldmc5Bec => Ok(MessageAlphabet {
            channel: Surrogate::Bec,
            entries: vec![
                (1.0, b(5.0 / 8.0, 4, 0).add(&b(4.0 * 0.25, 3, 1))),
                (2.0, b(4.0 * 9.0 / 16.0, 3, 1)),
                (4.0 / 3.0, b(6.0 * 7.0 / 16.0, 2, 2)),
                (3.0, b(6.0 * 0.5, 2, 2)),
                (7.0 / 4.0, b(4.0 * 11.0 / 16.0, 1, 3)),
                (4.0, b(4.0 * 5.0 / 16.0, 1, 3)),
                (11.0 / 5.0, b(1.0, 0, 4)),
            ],
        }),
        AlphabetFamily::Ldmc3Bsc(p) => {
            check_crossover(p)?;
            let rho = (1.0 - p) / p;
            let c = Poly::constant;
            Ok(MessageAlphabet {
                channel: Surrogate::Bsc,
                entries: vec![
                    (1.0 + rho + 1.0 / rho, c(0.5)),
                    (1.0 + 2.0 / rho, c(0.5 * (1.0 - p))),
                    (1.0 + 2.0 * rho, c(0.5 * p)),
                ],
            })
        }
        AlphabetFamily::MajBec(m) => maj_bec(m),
        AlphabetFamily::MajBsc(m, p) => {
            check_crossover(p)?;
            maj_bsc(m, p)
        }
    }
}

fn check_crossover(p: f64) -> Result<()> {
    if p > 0.0 && p <= 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("leaf crossover {p} is outside (0, 1/2]")))
    }
}

fn check_maj_arity(m: usize) -> Result<usize> {
    if m % 2 == 1 && m >= 3 {
        Ok((m - 1) / 2)
    } else {
        Err(Error::UnsupportedArity { got: m, expected: "odd arity >= 3".into() })
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

// Enumerate revealed-leaf patterns; the likelihood ratio is a ratio of
// counts of hidden completions, grouped as reduced fractions.
fn maj_bec(m: usize) -> Result<MessageAlphabet> {
    let r = check_maj_arity(m)?;
    let leaves = m - 1;
    let mut groups: BTreeMap<(u64, u64), Poly> = BTreeMap::new();
    for u in 0..=leaves {
        let h = leaves - u;
        for v in 0..=u {
            for x in [false, true] {
                let count = |s: usize| -> u64 {
                    (0..=h)
                        .filter(|&hh| (s + v + hh > r) == x)
                        .map(|hh| binom(h, hh) as u64)
                        .sum()
                };
                let (n0, n1) = (count(0), count(1));
                if n0 == 0 || n1 == 0 {
                    continue;
                }
                let g = gcd(n0, n1);
                let key = (n0.max(n1) / g, n0.min(n1) / g);
                let w = binom(leaves, u) * binom(u, v) * 0.5f64.powi(u as i32) * 0.5 * (n0 + n1) as f64
                    / 2f64.powi(h as i32);
                let term = Poly::bernstein(w, u, h);
                groups.entry(key).or_default().add_scaled(&term, 1.0);
            }
        }
    }
    Ok(MessageAlphabet {
        channel: Surrogate::Bec,
        entries: groups.into_iter().map(|((a, b), p)| (a as f64 / b as f64, p)).collect(),
    })
}

fn maj_bsc(m: usize, p: f64) -> Result<MessageAlphabet> {
    let r = check_maj_arity(m)?;
    let leaves = m - 1;
    let mut entries: Vec<(f64, f64)> = Vec::new();
    for w in 0..=leaves {
        // Number of true ones among the leaves given `w` observed ones.
        let a = binomial_pmf(w, 1.0 - p);
        let b = binomial_pmf(leaves - w, p);
        let mut dist = vec![0.0; leaves + 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                dist[i + j] += x * y;
            }
        }
        let p_one = |s: usize| -> f64 { (0..=leaves).filter(|&n| n + s > r).map(|n| dist[n]).sum() };
        for x in [false, true] {
            let (l0, l1) = if x { (p_one(0), p_one(1)) } else { (1.0 - p_one(0), 1.0 - p_one(1)) };
            if l0 <= 0.0 || l1 <= 0.0 {
                continue;
            }
            let mag = (l0 / l1).max(l1 / l0);
            let weight = binom(leaves, w) * 0.5f64.powi(leaves as i32) * 0.5 * (l0 + l1);
            match entries.iter_mut().find(|e| (e.0 - mag).abs() <= 1e-12 * mag) {
                Some(e) => e.1 += weight,
                None => entries.push((mag, weight)),
            }
        }
    }
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(MessageAlphabet {
        channel: Surrogate::Bsc,
        entries: entries.into_iter().map(|(m, w)| (m, Poly::constant(w))).collect(),
    })
}

fn compositions(d: usize, parts: usize, cur: &mut Vec<usize>, out: &mut dyn FnMut(&[usize])) {
    if cur.len() + 1 == parts {
        cur.push(d);
        out(cur);
        cur.pop();
        return;
    }
    for c in 0..=d {
        cur.push(c);
        compositions(d - c, parts, cur, out);
        cur.pop();
    }
}

// Sum over agreement counts j_i of prod C(c_i, j_i) a_i^j_i b_i^(c_i-j_i)
// times the payoff of the error 1/(1 + exp|sum (c_i - 2 j_i) ln M_i|).
fn type_payoff(counts: &[usize], logm: &[f64], agree: &[f64], payoff: Payoff) -> f64 {
    fn rec(i: usize, counts: &[usize], logm: &[f64], agree: &[f64], payoff: Payoff, llr: f64, w: f64, acc: &mut f64) {
        if i == counts.len() {
            let e = 1.0 / (1.0 + llr.abs().exp());
            *acc += w * payoff.apply(e);
            return;
        }
        let c = counts[i];
        if c == 0 || logm[i] == 0.0 {
            rec(i + 1, counts, logm, agree, payoff, llr, w, acc);
            return;
        }
        let (a, b) = (agree[i], 1.0 - agree[i]);
        for j in 0..=c {
            let wj = binom(c, j) * a.powi(j as i32) * b.powi((c - j) as i32);
            rec(i + 1, counts, logm, agree, payoff, llr + (c as f64 - 2.0 * j as f64) * logm[i], w * wj, acc);
        }
    }
    let mut acc = 0.0;
    rec(0, counts, logm, agree, payoff, 0.0, 1.0, &mut acc);
    acc
}

/// Expected payoff at a degree-`d` root whose `d` incoming messages are drawn
/// independently from the alphabet.
pub fn error_poly(alphabet: &MessageAlphabet, d: usize, payoff: Payoff) -> Result<Poly> {
    error_bernstein(alphabet, d, payoff).map(|b| b.to_poly())
}

/// [`error_poly`] in the numerically stable Bernstein form.
pub fn error_bernstein(alphabet: &MessageAlphabet, d: usize, payoff: Payoff) -> Result<BernsteinPoly> {
    if d > MAX_DEGREE {
        return Err(Error::TooLarge(format!("degree {d} exceeds {MAX_DEGREE}")));
    }
    for (m, _) in &alphabet.entries {
        if m.is_nan() || *m < 1.0 {
            return Err(Error::InvalidParameter(format!("message magnitude {m} is below 1")));
        }
    }
    // Infinite magnitudes determine the root; they drop out like the omitted mass.
    let entries: Vec<&(f64, Poly)> = alphabet.entries.iter().filter(|e| e.0.is_finite()).collect();
    if entries.len() > MAX_ALPHABET {
        return Err(Error::TooLarge(format!("alphabet of {} entries exceeds {MAX_ALPHABET}", entries.len())));
    }
    if d == 0 {
        return Ok(BernsteinPoly { c: vec![payoff.uninformative()] });
    }
    if entries.is_empty() {
        return Ok(BernsteinPoly { c: vec![0.0] });
    }
    let order = entries.iter().map(|e| e.1.degree()).max().unwrap_or(0);
    let logm: Vec<f64> = entries.iter().map(|e| e.0.ln()).collect();
    let agree: Vec<f64> = entries.iter().map(|e| 1.0 / (1.0 + e.0)).collect();
    let one = BernsteinPoly { c: vec![1.0] };
    let powers: Vec<Vec<BernsteinPoly>> = entries
        .iter()
        .map(|e| {
            let base = BernsteinPoly::from_poly(&e.1, order);
            let mut v = vec![one.clone()];
            for i in 1..=d {
                let next = v[i - 1].mul(&base);
                v.push(next);
            }
            v
        })
        .collect();
    let fact: Vec<f64> = (0..=d).scan(1.0, |f, i| {
        if i > 0 {
            *f *= i as f64;
        }
        Some(*f)
    }).collect();
    let mut out = BernsteinPoly { c: vec![0.0; d * order + 1] };
    compositions(d, entries.len(), &mut Vec::new(), &mut |c: &[usize]| {
        let scalar = type_payoff(c, &logm, &agree, payoff);
        if scalar == 0.0 {
            return;
        }
        let mut coef = fact[d];
        let mut w = one.clone();
        for (i, &ci) in c.iter().enumerate() {
            coef /= fact[ci];
            if ci > 0 {
                w = w.mul(&powers[i][ci]);
            }
        }
        out.add_scaled(&w, coef * scalar);
    });
    Ok(out)
}

/// Distribution of the variable degree as a function of `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub enum DegreeLaw {
    /// `Poisson(scale * alpha)`.
    Poisson { scale: f64 },
    /// `Bin(trials, scale * alpha)`.
    Binomial { trials: usize, scale: f64 },
    /// Fixed probabilities `P(Deg = d)`.
    Explicit(Vec<f64>),
}

impl DegreeLaw {
    /// `P(Deg = 0..=dmax)`.
    pub fn pmf(&self, alpha: f64, dmax: usize) -> Vec<f64> {
        match self {
            DegreeLaw::Poisson { scale } => poisson_pmf(scale * alpha, dmax),
            DegreeLaw::Binomial { trials, scale } => {
                let mut v = binomial_pmf(*trials, (scale * alpha).clamp(0.0, 1.0));
                v.resize(dmax + 1, 0.0);
                v
            }
            DegreeLaw::Explicit(w) => {
                let mut v = w.clone();
                v.resize(dmax + 1, 0.0);
                v
            }
        }
    }
}

/// A scalar function `E(alpha, q)` that density evolution can iterate.
pub trait VariableFunction: Sync {
    fn value(&self, alpha: f64, q: f64) -> f64;
    fn payoff(&self) -> Payoff;
    fn surrogate(&self) -> Surrogate;
}

/// Which majority alphabet a family is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MajFamily {
    Ldmc3,
    Ldmc5,
    /// Odd arity, generic enumeration.
    Maj(usize),
}

impl MajFamily {
    pub fn arity(self) -> usize {
        match self {
            MajFamily::Ldmc3 => 3,
            MajFamily::Ldmc5 => 5,
            MajFamily::Maj(m) => m,
        }
    }

    pub fn for_arity(m: usize) -> Result<Self> {
        match m {
            3 => Ok(MajFamily::Ldmc3),
            5 => Ok(MajFamily::Ldmc5),
            m => check_maj_arity(m).map(|_| MajFamily::Maj(m)),
        }
    }

    fn alphabet(self, surrogate: Surrogate, q: f64) -> Result<MessageAlphabet> {
        let fam = match (self, surrogate) {
            (MajFamily::Ldmc3, Surrogate::Bec) => AlphabetFamily::Ldmc3Bec,
            (MajFamily::Ldmc5, Surrogate::Bec) => AlphabetFamily::Ldmc5Bec,
            (MajFamily::Maj(m), Surrogate::Bec) => AlphabetFamily::MajBec(m),
            (MajFamily::Ldmc3, Surrogate::Bsc) => AlphabetFamily::Ldmc3Bsc(q),
            (f, Surrogate::Bsc) => AlphabetFamily::MajBsc(f.arity(), q),
        };
        f_alphabet(fam)
    }
}

/// Truncated degree-weighted function `sum_{d<=D} P(Deg=d) E_d(q) + tail`.
#[derive(Debug, Clone)]
pub struct EFunctionFamily {
    pub family: MajFamily,
    pub surrogate: Surrogate,
    pub payoff: Payoff,
    pub dmax: usize,
    pub law: DegreeLaw,
    /// Multiplies the whole function (probability a systematic bit is erased).
    pub systematic_rate: Option<f64>,
    bec_polys: Vec<Poly>,
    bec_bern: Vec<BernsteinPoly>,
}

impl EFunctionFamily {
    pub fn new(family: MajFamily, surrogate: Surrogate, payoff: Payoff, dmax: usize, law: DegreeLaw) -> Result<Self> {
        if dmax > MAX_DEGREE {
            return Err(Error::TooLarge(format!("truncation {dmax} exceeds {MAX_DEGREE}")));
        }
        let bec_bern: Vec<BernsteinPoly> = match surrogate {
            Surrogate::Bec => {
                let a = family.alphabet(Surrogate::Bec, 0.0)?;
                (0..=dmax).map(|d| error_bernstein(&a, d, payoff)).collect::<Result<_>>()?
            }
            Surrogate::Bsc => Vec::new(),
        };
        let bec_polys = bec_bern.iter().map(|b| b.to_poly()).collect();
        Ok(EFunctionFamily { family, surrogate, payoff, dmax, law, systematic_rate: None, bec_polys, bec_bern })
    }

    /// Non-systematic LDMC(m): degrees `Poisson(m * alpha)`.
    pub fn ldmc(arity: usize, surrogate: Surrogate, payoff: Payoff, dmax: usize) -> Result<Self> {
        let fam = MajFamily::for_arity(arity)?;
        EFunctionFamily::new(fam, surrogate, payoff, dmax, DegreeLaw::Poisson { scale: arity as f64 })
    }

    /// Systematic check-regular LDMC(d) at rate `R` over the erasure surrogate.
    pub fn sys_regular(arity: usize, rate: f64, payoff: Payoff) -> Result<Self> {
        let trials = arity as f64 * (1.0 - rate) / rate;
        let t = trials.round();
        if (trials - t).abs() > 1e-9 {
            return Err(Error::Infeasible(format!("d(1-R)/R = {trials} is not an integer")));
        }
        let t = t as usize;
        let mut f = EFunctionFamily::new(
            MajFamily::for_arity(arity)?,
            Surrogate::Bec,
            payoff,
            t,
            DegreeLaw::Binomial { trials: t, scale: rate },
        )?;
        f.systematic_rate = Some(rate);
        Ok(f)
    }

    /// Per-degree polynomials for the erasure surrogate.
    pub fn polys(&self) -> &[Poly] {
        &self.bec_polys
    }

    fn tail_value(&self) -> f64 {
        match (self.surrogate, self.payoff) {
            (Surrogate::Bec, _) => 0.0,
            (Surrogate::Bsc, Payoff::Error) => 0.5,
            (Surrogate::Bsc, _) => 1.0,
        }
    }

    /// `E_d(q)` for `d = 0..=D`.
    pub fn per_degree(&self, q: f64) -> Vec<f64> {
        match self.surrogate {
            Surrogate::Bec => self.bec_bern.iter().map(|p| p.eval(q)).collect(),
            Surrogate::Bsc => {
                let p = q.clamp(0.0, 0.5);
                if p == 0.0 {
                    // Every leaf is seen correctly; only uninformative checks remain.
                    return self.per_degree_bsc(f64::MIN_POSITIVE);
                }
                self.per_degree_bsc(p)
            }
        }
    }

    fn per_degree_bsc(&self, p: f64) -> Vec<f64> {
        let a = self.family.alphabet(Surrogate::Bsc, p).expect("valid crossover");
        (0..=self.dmax)
            .map(|d| error_bernstein(&a, d, self.payoff).expect("bounded degree").eval(0.0))
            .collect()
    }
}

impl VariableFunction for EFunctionFamily {
    fn value(&self, alpha: f64, q: f64) -> f64 {
        let w = self.law.pmf(alpha, self.dmax);
        let e = self.per_degree(q);
        let head: f64 = w.iter().zip(&e).map(|(a, b)| a * b).sum();
        let tail = (1.0 - w.iter().sum::<f64>()).max(0.0) * self.tail_value();
        let pre = self.systematic_rate.map_or(1.0, |r| (1.0 - alpha * r).clamp(0.0, 1.0));
        pre * (head + tail)
    }

    fn payoff(&self) -> Payoff {
        self.payoff
    }

    fn surrogate(&self) -> Surrogate {
        self.surrogate
    }
}

/// Closed-form erasure functions.
#[derive(Debug, Clone)]
pub enum ClosedForm {
    /// Non-systematic LDGM with `XOR(d)` checks.
    Ldgm(usize),
    /// Mixture over check kinds; a majority component uses a truncated family.
    Mixed(MixedFunction),
    /// Systematic check-regular LDMC(d) at rate `R`.
    SysRegular(EFunctionFamily),
}

impl ClosedForm {
    pub fn ldgm(d: usize) -> Result<Self> {
        CheckKind::xor(d).map(|_| ClosedForm::Ldgm(d))
    }

    pub fn mixed(profile: &DegreeProfile, dmax: usize) -> Result<Self> {
        MixedFunction::new(profile, dmax).map(ClosedForm::Mixed)
    }

    pub fn sys_regular(d: usize, rate: f64) -> Result<Self> {
        EFunctionFamily::sys_regular(d, rate, Payoff::Error).map(ClosedForm::SysRegular)
    }
}

impl VariableFunction for ClosedForm {
    fn value(&self, alpha: f64, q: f64) -> f64 {
        match self {
            ClosedForm::Ldgm(d) => 0.5 * (-alpha * *d as f64 * q.powi(*d as i32 - 1)).exp(),
            ClosedForm::Mixed(m) => m.value(alpha, q),
            ClosedForm::SysRegular(f) => f.value(alpha, q),
        }
    }

    fn payoff(&self) -> Payoff {
        Payoff::Error
    }

    fn surrogate(&self) -> Surrogate {
        Surrogate::Bec
    }
}

/// `closed_form_efun(kind, alpha, q)`.
pub fn closed_form_efun(kind: &ClosedForm, alpha: f64, q: f64) -> f64 {
    kind.value(alpha, q)
}

/// Erasure function of a mixed ensemble: the bit stays in error only if no
/// linear component determines it, times the majority component's function.
#[derive(Debug, Clone)]
pub struct MixedFunction {
    /// `(arity, weight)` of the linear components.
    linear: Vec<(usize, f64)>,
    /// Weight and family of the majority component.
    maj: Option<(f64, EFunctionFamily)>,
}

impl MixedFunction {
    pub fn new(profile: &DegreeProfile, dmax: usize) -> Result<Self> {
        let mut linear = Vec::new();
        let mut maj: Option<(CheckKind, f64)> = None;
        for &(kind, w) in profile.entries() {
            match kind {
                CheckKind::Xor(d) | CheckKind::Maj(d @ 1) => linear.push((d, w)),
                CheckKind::Maj(d) => {
                    if w == 0.0 {
                        continue;
                    }
                    match maj {
                        Some((k, w0)) if k == kind => maj = Some((k, w0 + w)),
                        Some(_) => {
                            return Err(Error::UnsupportedArity {
                                got: d,
                                expected: "at most one majority arity per mixture".into(),
                            })
                        }
                        None => maj = Some((kind, w)),
                    }
                }
                CheckKind::Parity(d) => {
                    return Err(Error::UnsupportedArity { got: d, expected: "transmitted checks only".into() })
                }
            }
        }
        let maj = match maj {
            Some((kind, w)) => {
                Some((w, EFunctionFamily::ldmc(kind.arity(), Surrogate::Bec, Payoff::Error, dmax)?))
            }
            None => None,
        };
        Ok(MixedFunction { linear, maj })
    }

    pub fn value(&self, alpha: f64, q: f64) -> f64 {
        let lin: f64 = self
            .linear
            .iter()
            .map(|&(i, w)| (-alpha * w * i as f64 * q.powi(i as i32 - 1)).exp())
            .product();
        match &self.maj {
            Some((w, fam)) => lin * fam.value(alpha * w, q),
            None => 0.5 * lin,
        }
    }
}

impl VariableFunction for MixedFunction {
    fn value(&self, alpha: f64, q: f64) -> f64 {
        MixedFunction::value(self, alpha, q)
    }

    fn payoff(&self) -> Payoff {
        Payoff::Error
    }

    fn surrogate(&self) -> Surrogate {
        Surrogate::Bec
    }
}

/// A function that ignores its arguments.
#[derive(Debug, Clone, Copy)]
pub struct ConstantFunction {
    pub value: f64,
    pub payoff: Payoff,
    pub surrogate: Surrogate,
}

impl VariableFunction for ConstantFunction {
    fn value(&self, _alpha: f64, _q: f64) -> f64 {
        self.value
    }

    fn payoff(&self) -> Payoff {
        self.payoff
    }

    fn surrogate(&self) -> Surrogate {
        self.surrogate
    }
}

/// `D(alpha, q) = (1 - q)/2 - E(alpha, q)`.
pub fn d_function(f: &dyn VariableFunction, alpha: f64, q: f64) -> f64 {
    (1.0 - q) / 2.0 - f.value(alpha, q)
}

/// Smallest `q` where `D` stops being positive, or `None` if it never does.
///
/// Returns `Some(0.0)` when `D(alpha, 0) <= 0`: the recursion from zero
/// cannot move.
pub fn first_zero(f: &dyn VariableFunction, alpha: f64) -> Option<f64> {
    const GRID: usize = 2000;
    if d_function(f, alpha, 0.0) <= 0.0 {
        return Some(0.0);
    }
    let mut prev = 0.0;
    for i in 1..=GRID {
        let q = i as f64 / GRID as f64;
        if d_function(f, alpha, q) <= 0.0 {
            let (mut lo, mut hi) = (prev, q);
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                if d_function(f, alpha, mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(hi);
        }
        prev = q;
    }
    None
}

/// Coefficient table, one row per degree: `d,c0,c1,...`.
pub fn poly_csv(polys: &[Poly], fmt: impl Fn(f64) -> String) -> String {
    let width = polys.iter().map(|p| p.0.len()).max().unwrap_or(1);
    let mut s = String::from("d");
    for i in 0..width {
        let _ = write!(s, ",c{i}");
    }
    s.push('\n');
    for (d, p) in polys.iter().enumerate() {
        let _ = write!(s, "{d}");
        for i in 0..width {
            let _ = write!(s, ",{}", fmt(p.coeff(i)));
        }
        s.push('\n');
    }
    s
}
