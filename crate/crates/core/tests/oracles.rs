use gracecode::exactdec::generator_matrix;
use gracecode::info::poisson_pmf;
use gracecode::optimize::StartTrace;
use gracecode::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn ldmc_degrees_are_near_poisson() {
    let spec = EnsembleSpec {
        k: 20_000,
        rate: 0.5,
        profile: DegreeProfile::single(CheckKind::Maj(3)).unwrap(),
        systematic: false,
        regular: false,
        seed: 12,
    };
    let st = degree_stats(&spec.sample().unwrap());
    assert!((st.mean - 6.0).abs() < 1e-9);
    let pois = poisson_pmf(6.0, st.counts.len() + 10);
    let emp = st.pmf();
    let tv: f64 = 0.5 * (0..pois.len()).map(|d| (emp.get(d).copied().unwrap_or(0.0) - pois[d]).abs()).sum::<f64>();
    assert!(tv < 0.02, "total variation {tv}");
}

#[test]
fn ldmc3_has_one_fixed_point_at_unit_ratio() {
    let f = EFunctionFamily::ldmc(3, Surrogate::Bec, Payoff::Error, 10).unwrap();
    let lo = iterate(&f, 1.0, 0.0, 50, Surrogate::Bec, DeQuantity::Error).unwrap();
    let hi = iterate(&f, 1.0, 1.0, 50, Surrogate::Bec, DeQuantity::Error).unwrap();
    assert!((lo.last() - hi.last()).abs() < 1e-6, "{} vs {}", lo.last(), hi.last());
}

#[test]
fn ldmc5_fixed_points_from_both_ends() {
    let f = EFunctionFamily::ldmc(5, Surrogate::Bec, Payoff::Error, 14).unwrap();
    for alpha in [0.5, 1.0, 1.5] {
        let a = fixed_point(&f, alpha, 0.0, 1e-12).unwrap();
        let b = fixed_point(&f, alpha, 1.0, 1e-12).unwrap();
        assert!(a.converged && b.converged);
        let gap = (a.q - b.q).abs();
        if gap > 1e-6 {
            eprintln!("two fixed points at alpha {alpha}: {} and {}", a.q, b.q);
        }
    }
}

fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

#[test]
fn large_degree_bound_against_midpoint_rule() {
    let (alpha, r) = (2.0, 0.5);
    let (a, b) = gracecode::devo::large_d_coefficients(alpha, r);
    let g = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt() / (1.0 + (a * z + b).abs().exp());
    let kink = -b / a;
    let reference = midpoint(g, -8.0, kink, 400_000) + midpoint(g, kink, 8.0, 400_000);
    let v = large_d_bound(alpha, r).unwrap();
    assert!((v - reference).abs() < 1e-6, "{v} vs {reference}");
    let mut prev = 0.5;
    for i in 1..=30 {
        let x = large_d_bound(0.1 * i as f64, 0.3).unwrap();
        assert!(x < prev);
        prev = x;
    }
}

#[test]
fn systematic_ber_matches_hrank_identity() {
    // BER = (eps k - E hrank(A~(eps, 1-eps))) / (2k) for G = [I A].
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..4 {
        let (k, m) = (rng.random_range(2..=5), rng.random_range(1..=5));
        let a = BitMatrix::random(k, m, 0.5, &mut rng);
        let mut cols: Vec<Vec<usize>> = (0..k).map(|i| vec![i]).collect();
        cols.extend(a.column_supports());
        let ex = exit_tools(&BitMatrix::from_columns(k, &cols)).unwrap();
        for eps in [0.1f64, 0.35, 0.6, 0.9] {
            let mut expect = 0.0;
            for rows in 0u32..1 << k {
                for keep in 0u32..1 << m {
                    let r: Vec<usize> = (0..k).filter(|i| rows >> i & 1 == 1).collect();
                    let c: Vec<usize> = (0..m).filter(|j| keep >> j & 1 == 1).collect();
                    let p = eps.powi(r.len() as i32)
                        * (1.0 - eps).powi((k - r.len()) as i32)
                        * (1.0 - eps).powi(c.len() as i32)
                        * eps.powi((m - c.len()) as i32);
                    expect += p * rank_hrank(&a.select(&r, &c)).hrank() as f64;
                }
            }
            let ber = (eps * k as f64 - expect) / (2.0 * k as f64);
            assert!((ex.ber.eval(eps) - ber).abs() < 1e-12);
        }
    }
}

#[test]
fn forced_sets_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..40 {
        let k = rng.random_range(1..=12);
        let spec = EnsembleSpec {
            k,
            rate: rng.random_range(0.3..1.0),
            profile: DegreeProfile::new(vec![(CheckKind::Xor(1), 0.3), (CheckKind::Xor(2.min(k)), 0.7)]).unwrap(),
            systematic: false,
            regular: false,
            seed: rng.random(),
        };
        let g = spec.sample().unwrap();
        let src: Vec<bool> = (0..k).map(|_| rng.random()).collect();
        let rx = transmit(&encode(&g, &src).unwrap(), ChannelParam::Bec(0.4), &mut rng);
        let exact = brute_force_marginals(&g, &rx).unwrap();
        let forced_bf: Vec<usize> = (0..k).filter(|&i| exact[i] == 0.0 || exact[i] == 1.0).collect();
        let obs = g.observed_subgraph(&rx).unwrap();
        let forced = rank_hrank(&generator_matrix(&obs).unwrap()).forced;
        assert_eq!(forced, forced_bf);
    }
}

#[test]
fn full_hrank_means_unique_decoding() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..60 {
        let (k, n) = (rng.random_range(1..=8), rng.random_range(1..=10));
        let g = BitMatrix::random(k, n, 0.4, &mut rng);
        let images: std::collections::HashSet<Vec<bool>> = (0u32..1 << k)
            .map(|x| g.left_mul(&(0..k).map(|i| x >> i & 1 == 1).collect::<Vec<_>>()))
            .collect();
        assert_eq!(rank_hrank(&g).hrank() == k, images.len() == 1 << k);
    }
}

#[test]
fn dense_and_sparse_map_estimates_agree() {
    let spec = EnsembleSpec {
        k: 300,
        rate: 0.4,
        profile: DegreeProfile::new(vec![(CheckKind::Xor(1), 0.2), (CheckKind::Xor(3), 0.8)]).unwrap(),
        systematic: true,
        regular: false,
        seed: 2,
    };
    let g = spec.sample().unwrap();
    let a = map_ber_graph(&g, 0.55, 10, 7).unwrap();
    let b = map_ber_linear(&generator_matrix(&g).unwrap(), 0.55, 10, 7).unwrap();
    assert_eq!(a, b);
}

#[test]
fn optimizer_beats_every_vertex() {
    let problem = OptProblem {
        components: vec![CheckKind::Xor(1), CheckKind::Xor(2), CheckKind::Xor(3)],
        targets: vec![0.9, 1.0, 1.2, 1.5],
        horizon: Horizon::FixedPoint,
        dmax: 10,
        starts: 6,
        seed: 3,
    };
    let res = optimize_profile(&problem).unwrap();
    for c in &problem.components {
        let vertex = objective(&DegreeProfile::single(*c).unwrap(), &problem).unwrap();
        assert!(res.objective >= vertex - 1e-9);
    }
    assert!((objective(&res.profile, &problem).unwrap() - res.objective).abs() < 1e-6);
    let StartTrace { objective: trace, .. } = &res.starts[0];
    assert!(trace.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(optimize_profile(&problem).unwrap(), res);
}

#[test]
fn objective_ignores_component_order() {
    let problem = OptProblem {
        components: vec![CheckKind::Xor(1), CheckKind::Maj(3)],
        targets: vec![0.5, 1.0],
        horizon: Horizon::Iterations(10),
        dmax: 10,
        starts: 1,
        seed: 0,
    };
    let a = DegreeProfile::new(vec![(CheckKind::Xor(1), 0.3), (CheckKind::Maj(3), 0.7)]).unwrap();
    let b = DegreeProfile::new(vec![(CheckKind::Maj(3), 0.7), (CheckKind::Xor(1), 0.3)]).unwrap();
    let (x, y) = (objective(&a, &problem).unwrap(), objective(&b, &problem).unwrap());
    assert!((x - y).abs() < 1e-14);
}

#[test]
fn single_point_examples() {
    assert!((shannon_single_point(0.5, 0.25) - 0.1100).abs() < 1e-4);
    assert_eq!(shannon_single_point(0.5, 0.6), 0.0);
    assert!((linear_single_point(5.0, 0.9) - 0.25).abs() < 1e-15);
    let floor = 0.5 * (1.0 - 2.0 * (1.0 - 0.7));
    for e2 in [0.75, 0.8, 0.95] {
        assert!((linear_two_point(2.0, floor, 0.7, e2).unwrap() - e2 / 2.0).abs() < 1e-12);
    }
}
