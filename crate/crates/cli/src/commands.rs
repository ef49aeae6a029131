use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use gracecode::efun::{poly_csv, VariableFunction};
use gracecode::info::{h_b, h_b_inv};
use gracecode::*;

use crate::args::*;
use crate::output::{num, usage, TrialCount};

/// Files to write plus bookkeeping for the manifest.
pub struct Outcome {
    pub files: Vec<(PathBuf, String)>,
    pub seed: Option<u64>,
    pub trials: Vec<TrialCount>,
}

impl Outcome {
    fn single(path: PathBuf, body: String) -> Self {
        Outcome { files: vec![(path, body)], seed: None, trials: Vec::new() }
    }
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Simulate(a) => simulate(a),
        Command::Histogram(a) => histogram(a),
        Command::Devo(a) => devo(a),
        Command::Converse(a) => converse(a),
        Command::Efun(a) => efun(a),
        Command::Optimize(a) => optimize(a),
        Command::Replay(_) => unreachable!("replay is resolved before dispatch"),
    }
}

/// Inclusive grid `a:b:step`, or a single value.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| usage(format!("bad grid `{text}`")))?;
    match nums[..] {
        [x] => Ok(vec![x]),
        [a, b, step] if step > 0.0 && b >= a => {
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + i as f64 * step).collect())
        }
        _ => Err(usage(format!("grid `{text}` must be `a:b:step` with step > 0 and b >= a"))),
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("bad number `{t}`"))))
        .collect()
}

fn parse_kind(text: &str) -> Result<CheckKind> {
    let (tok, ar) = text.split_once(':').ok_or_else(|| usage(format!("component `{text}` must be KIND:arity")))?;
    let arity: usize = ar.trim().parse().map_err(|_| usage(format!("bad arity in `{text}`")))?;
    Ok(match tok.trim().to_ascii_uppercase().as_str() {
        "MAJ" => CheckKind::maj(arity)?,
        "XOR" => CheckKind::xor(arity)?,
        "PAR" => CheckKind::parity(arity)?,
        _ => return Err(usage(format!("unknown check kind `{tok}`"))),
    })
}

/// A resolved `--ensemble` value.
struct Resolved {
    profile: DegreeProfile,
    rate: Option<f64>,
    regular: bool,
}

fn resolve_ensemble(name: &str) -> Result<Resolved> {
    let builtin = |profile, rate, regular| Ok(Resolved { profile, rate, regular });
    let arg = |s: &str| s.parse::<f64>().map_err(|_| usage(format!("bad builtin parameter in `{name}`")));
    match name.split_once(':') {
        None if name == "ldmc3" => builtin(DegreeProfile::single(CheckKind::Maj(3))?, None, false),
        None if name == "ldmc5" => builtin(DegreeProfile::single(CheckKind::Maj(5))?, None, false),
        Some(("ldgm", d)) => {
            let d = arg(d)? as usize;
            builtin(DegreeProfile::single(CheckKind::xor(d)?)?, None, false)
        }
        Some(("repetition", rho)) => {
            let rho = arg(rho)?;
            if rho < 1.0 {
                return Err(usage("repetition factor must be at least 1".into()));
            }
            builtin(DegreeProfile::single(CheckKind::Xor(1))?, Some(1.0 / rho), true)
        }
        _ => {
            let text = std::fs::read_to_string(name).with_context(|| format!("reading profile `{name}`"))?;
            builtin(DegreeProfile::parse(&text)?, None, false)
        }
    }
}

fn rate_of(resolved: &Resolved, flag: Option<f64>) -> Result<f64> {
    match (resolved.rate, flag) {
        (Some(a), Some(b)) if (a - b).abs() > 1e-12 => {
            Err(usage(format!("--rate {b} conflicts with the builtin's rate {a}")))
        }
        (Some(r), _) | (None, Some(r)) => Ok(r),
        (None, None) => Err(usage("--rate is required for this ensemble".into())),
    }
}

fn ensemble_spec(a: &EnsembleArgs, seed: u64) -> Result<EnsembleSpec> {
    let r = resolve_ensemble(&a.ensemble)?;
    let spec = EnsembleSpec {
        k: a.k,
        rate: rate_of(&r, a.rate)?,
        regular: a.regular || r.regular,
        profile: r.profile,
        systematic: a.systematic,
        seed,
    };
    spec.validate()?;
    Ok(spec)
}

/// Channel and `(alpha, parameter)` for a sweep value.
fn channel_point(kind: ChannelKind, rate: f64, alpha: Option<f64>, eps: Option<f64>) -> Result<(f64, f64, ChannelParam)> {
    let (alpha, p) = match (kind, alpha, eps) {
        (ChannelKind::Bec, Some(a), _) => (a, 1.0 - a * rate),
        (ChannelKind::Bsc, Some(a), _) => {
            let c = a * rate;
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::InvalidParameter(format!("capacity {c} is outside [0, 1]")).into());
            }
            (a, h_b_inv(1.0 - c))
        }
        (ChannelKind::Bec, None, Some(e)) => ((1.0 - e) / rate, e),
        (ChannelKind::Bsc, None, Some(d)) => ((1.0 - h_b(d)) / rate, d),
        (_, None, None) => unreachable!("clap requires one of the axes"),
    };
    let ch = match kind {
        ChannelKind::Bec => ChannelParam::bec(p)?,
        ChannelKind::Bsc => ChannelParam::bsc(p)?,
    };
    Ok((alpha, p, ch))
}

fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    let spec = ensemble_spec(&a.ensemble, a.seed)?;
    let cfg = SimConfig { bp_iters: a.bp_iters, trials: a.trials, seed: a.seed, ..SimConfig::default() };
    let points: Vec<(Option<f64>, Option<f64>)> = match (&a.alpha_grid, &a.eps_grid) {
        (Some(g), _) => parse_grid(g)?.into_iter().map(|x| (Some(x), None)).collect(),
        (None, Some(g)) => parse_grid(g)?.into_iter().map(|x| (None, Some(x))).collect(),
        (None, None) => unreachable!("clap requires one grid"),
    };
    let mut csv = String::from("alpha,eps,ber,ber_stderr,soft_info,trials\n");
    let mut trials = Vec::new();
    for (i, &(al, ep)) in points.iter().enumerate() {
        let (alpha, p, ch) = channel_point(a.channel, spec.rate, al, ep)?;
        let pt = simulate_point(&spec, ch, &cfg, i as u64)?;
        let _ = writeln!(csv, "{},{},{},{},{},{}", num(alpha), num(p), num(pt.ber), num(pt.ber_stderr), num(pt.soft_info), pt.trials);
        trials.push(TrialCount { point: i, decoded: pt.trials, failures: pt.failures });
    }
    Ok(Outcome { files: vec![(a.out.clone(), csv)], seed: Some(a.seed), trials })
}

fn histogram(a: &HistogramArgs) -> Result<Outcome> {
    if a.bins == 0 {
        return Err(usage("--bins must be positive".into()));
    }
    let spec = ensemble_spec(&a.ensemble, a.seed)?;
    let cfg = SimConfig { bp_iters: a.bp_iters, trials: a.trials, seed: a.seed, bins: a.bins };
    let (_, _, ch) = channel_point(a.channel, spec.rate, a.alpha, a.eps)?;
    let pt = simulate_point(&spec, ch, &cfg, 0)?;
    let mut csv = String::from("bin_lo,bin_hi,count\n");
    let w = 1.0 / pt.histogram.len() as f64;
    for (b, c) in pt.histogram.iter().enumerate() {
        let _ = writeln!(csv, "{},{},{}", num(b as f64 * w), num((b + 1) as f64 * w), c);
    }
    let trials = vec![TrialCount { point: 0, decoded: pt.trials, failures: pt.failures }];
    Ok(Outcome { files: vec![(a.out.clone(), csv)], seed: Some(a.seed), trials })
}

fn devo(a: &DevoArgs) -> Result<Outcome> {
    let r = resolve_ensemble(&a.ensemble)?;
    let (surrogate, quantity) = (
        match a.surrogate {
            SurrogateKind::Bec => Surrogate::Bec,
            SurrogateKind::Bsc => Surrogate::Bsc,
        },
        match a.quantity {
            QuantityKind::Error => DeQuantity::Error,
            QuantityKind::Chi2Soft => DeQuantity::Chi2Soft,
            QuantityKind::CapacitySoft => DeQuantity::CapacitySoft,
        },
    );
    let single_maj = match r.profile.entries() {
        [(CheckKind::Maj(m), _)] if *m >= 3 => Some(*m),
        _ => None,
    };
    let mut sys_rate = None;
    let f: Box<dyn VariableFunction> = match (a.systematic, single_maj) {
        (true, Some(m)) => {
            let rate = rate_of(&r, a.rate)?;
            sys_rate = Some(rate);
            Box::new(EFunctionFamily::sys_regular(m, rate, quantity.payoff())?)
        }
        (true, None) => return Err(usage("--systematic needs a single majority kind".into())),
        (false, Some(m)) => Box::new(EFunctionFamily::ldmc(m, surrogate, quantity.payoff(), a.dmax)?),
        (false, None) => Box::new(MixedFunction::new(&r.profile, a.dmax)?),
    };
    let mut csv = String::from("alpha,t,q,quantity,surrogate,x0\n");
    let label = if quantity == DeQuantity::CapacitySoft { "capacity-soft-conjectured" } else { quantity.name() };
    let sname = match surrogate {
        Surrogate::Bec => "bec",
        Surrogate::Bsc => "bsc",
    };
    for alpha in parse_grid(&a.alpha_grid)? {
        let x0 = match (a.x0, sys_rate, surrogate) {
            (Some(x), _, _) => x,
            (None, Some(rate), _) => (alpha * rate).clamp(0.0, 1.0),
            (None, None, Surrogate::Bec) => 0.0,
            (None, None, Surrogate::Bsc) => 0.5,
        };
        let tr = iterate(f.as_ref(), alpha, x0, a.iters, surrogate, quantity)?;
        for (t, q) in tr.values.iter().enumerate() {
            let _ = writeln!(csv, "{},{t},{},{label},{sname},{}", num(alpha), num(*q), num(x0));
        }
    }
    Ok(Outcome::single(a.out.clone(), csv))
}

fn converse(a: &ConverseArgs) -> Result<Outcome> {
    let anchor = match (a.bound, a.anchor_eps, a.anchor_delta) {
        (BoundKind::Shannon | BoundKind::Linear1, _, _) => None,
        (_, Some(e), Some(d)) => Some((e, d)),
        _ => return Err(usage("two-point bounds need --anchor-eps and --anchor-delta".into())),
    };
    let axis = match a.axis {
        AxisKind::Eps => XAxis::Eps,
        AxisKind::Alpha => XAxis::Alpha,
    };
    if !(a.rate > 0.0 && a.rate <= 1.0) {
        return Err(Error::Infeasible(format!("rate {} is outside (0, 1]", a.rate)).into());
    }
    let rho = 1.0 / a.rate;
    let mut points = Vec::new();
    for x in parse_grid(&a.grid)? {
        let eps = axis.to_eps(x, a.rate);
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::InvalidParameter(format!("grid point {x} maps to erasure {eps}")).into());
        }
        let v = match (a.bound, anchor) {
            (BoundKind::Shannon, _) => shannon_single_point(a.rate, 1.0 - eps),
            (BoundKind::Linear1, _) => linear_single_point(rho, eps),
            (BoundKind::Linear2, Some((e, d))) => linear_two_point(rho, d, e, eps)?,
            (BoundKind::General2, Some((e, d))) => general_two_point(a.rate, d, e, eps)?.value,
            (BoundKind::Area, Some((e, d))) => {
                if eps <= e {
                    continue;
                }
                let mode = match a.area_mode {
                    AreaKind::LinearSystematic => AreaMode::LinearSystematic,
                    AreaKind::Systematic => AreaMode::Systematic,
                };
                area_two_point(a.rate, d, e, eps, mode)?
            }
            (_, None) => unreachable!(),
        };
        points.push((x, v));
    }
    let kind = a.bound.to_possible_value_name();
    let curve = BoundCurve { kind, axis, rate: a.rate, anchor, points };
    Ok(Outcome::single(a.out.clone(), curve.csv(num)))
}

trait ValueName {
    fn to_possible_value_name(&self) -> String;
}

impl<T: clap::ValueEnum> ValueName for T {
    fn to_possible_value_name(&self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

fn efun(a: &EfunArgs) -> Result<Outcome> {
    let fam = match a.family.as_str() {
        "ldmc3-bec" => AlphabetFamily::Ldmc3Bec,
        "ldmc5-bec" => AlphabetFamily::Ldmc5Bec,
        other => match other.strip_prefix("maj-bec:").map(str::parse::<usize>) {
            Some(Ok(m)) => AlphabetFamily::MajBec(m),
            _ => return Err(usage(format!("unknown family `{other}`"))),
        },
    };
    let payoff = match a.payoff {
        PayoffKind::Error => Payoff::Error,
        PayoffKind::Entropy => Payoff::Entropy,
        PayoffKind::Chi2 => Payoff::Chi2,
    };
    let alphabet = f_alphabet(fam)?;
    let polys = (0..=a.dmax).map(|d| error_poly(&alphabet, d, payoff)).collect::<gracecode::Result<Vec<_>>>()?;
    Ok(Outcome::single(a.out.clone(), poly_csv(&polys, num)))
}

fn optimize(a: &OptimizeArgs) -> Result<Outcome> {
    let components = a.components.split(',').map(parse_kind).collect::<Result<Vec<_>>>()?;
    let problem = OptProblem {
        components,
        targets: parse_list(&a.targets)?,
        horizon: match a.iters {
            Some(l) => Horizon::Iterations(l),
            None => Horizon::FixedPoint,
        },
        dmax: a.dmax,
        starts: a.starts,
        seed: a.seed,
    };
    let res = optimize_profile(&problem)?;
    let mut log = String::from("start,step,objective\n");
    for (s, tr) in res.starts.iter().enumerate() {
        for (i, v) in tr.objective.iter().enumerate() {
            let _ = writeln!(log, "{s},{i},{}", num(*v));
        }
    }
    let mut profile = format!("# objective {}\n", num(res.objective));
    profile.push_str(&res.profile.to_text());
    let mut log_path = a.out.clone().into_os_string();
    log_path.push(".log.csv");
    Ok(Outcome { files: vec![(a.out.clone(), profile), (log_path.into(), log)], seed: Some(a.seed), trials: Vec::new() })
}
