//! Fixtures shared by the benchmarks.

use gracecode::{encode, transmit, ChannelParam, CheckKind, DegreeProfile, EnsembleSpec, FactorGraph, ReceivedWord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A sampled LDMC(`arity`) graph at rate 1/2 with one noisy observation.
pub fn ldmc_instance(k: usize, arity: usize, eps: f64, seed: u64) -> (FactorGraph, ReceivedWord) {
    let spec = EnsembleSpec {
        k,
        rate: 0.5,
        profile: DegreeProfile::single(CheckKind::Maj(arity)).expect("valid arity"),
        systematic: false,
        regular: false,
        seed,
    };
    let g = spec.sample().expect("feasible ensemble");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let src: Vec<bool> = (0..k).map(|_| rng.random()).collect();
    let rx = transmit(&encode(&g, &src).expect("unconstrained"), ChannelParam::Bec(eps), &mut rng);
    (g, rx)
}
