//! Sparse-graph codes built from majority (LDMC), parity (LDGM) and
//! parity-constraint (LDPC) checks, observed through binary erasure
//! channels.
//!
//! The crate covers ensemble sampling, belief propagation, exact MAP
//! decoding of the linear cases by GF(2) rank, polynomial E-functions,
//! density evolution and converse bounds on achievable distortion.

pub mod bp;
pub mod channels;
pub mod converse;
pub mod devo;
pub mod efun;
pub mod ensemble;
mod error;
pub mod exactdec;
pub mod info;
pub mod optimize;
pub mod sim;

pub use bp::{check_message, measure, run_bp, DecodeResult, Measurement, Msg};
pub use channels::{
    bms_metrics, matched_surrogates, transmit, BmsChannel, BmsSummary, ChannelParam, Matching,
    ReceivedWord, Surrogates, Symbol,
};
pub use converse::{
    area_two_point, exit_tools, general_two_point, linear_single_point, linear_two_point,
    shannon_single_point, threshold_comparison, AreaMode, BoundCurve, ExitData, XAxis,
};
pub use devo::{
    bounds_from_traces, fixed_point, iterate, large_d_bound, ldmc_bounds, DeBounds, DeQuantity,
    DeTrace, FixedPoint,
};
pub use efun::{
    closed_form_efun, d_function, error_bernstein, error_poly, f_alphabet, first_zero, AlphabetFamily, BernsteinPoly, ClosedForm,
    DegreeLaw, EFunctionFamily, MajFamily, MessageAlphabet, MixedFunction, Payoff, Poly, Surrogate,
    VariableFunction,
};
pub use ensemble::{
    degree_stats, encode, sample_graph, Check, CheckKind, DegreeProfile, DegreeStats, EnsembleSpec,
    FactorGraph,
};
pub use error::{Error, Result};
pub use exactdec::{
    brute_force_marginals, map_ber_graph, map_ber_linear, rank_hrank, BerEstimate, BitMatrix,
    HrankResult,
};
pub use optimize::{objective, optimize_profile, Horizon, OptProblem, OptResult};
pub use sim::{simulate_point, SimConfig, SimPoint};
