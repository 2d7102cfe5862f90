//! Simulation and verification toolkit for the length of high-level
//! excursions of stationary Gaussian processes.
//!
//! Given `X_0 > u`, the excursion interval `(tau_u^-, tau_u^+)` around the
//! origin shrinks as `u` grows. For C² covariance kernels its length scales
//! like `1/u` with an explicit limit law; for kernels whose spectral measure
//! has a regularly varying tail of index `-alpha < -0` it scales like
//! `delta_u ~ u^(-2/alpha)`, with the hitting interval of a drifted
//! fractional Brownian motion as the limit. The crate samples exactly
//! conditioned paths, measures excursions, and compares them with both limits.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`, which every tolerance in the test suites assumes.

pub mod diagnostics;
pub mod error;
pub mod excursion;
pub mod gauss_sim;
pub mod grid;
pub mod kernels;
pub mod limit_law;
pub mod limit_process;
pub mod linalg;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use excursion::{c2_root_predictor, crossing_bounds, ExcursionResult};
pub use gauss_sim::{
    build_sampler, path_derivative_at_zero, sample_conditional_exceedance, sample_truncated_normal,
    sample_unconditional, Path, SamplerPlan, SynthesisMethod,
};
pub use grid::Grid;
pub use kernels::{c_alpha, delta_u, make_kernel, pitman_ratio, second_derivative_at_zero, spectral_tail, Kernel, KernelFamily, SpectralTail};
pub use limit_law::{c2_limit_cdf, c2_limit_quantile, c2_limit_sample, C2LimitParams};
pub use limit_process::{
    fbm_two_sided, limit_hitting_interval, limit_process_path, sample_limit_length, tilde_process_path, FbmGenerator, FbmPath,
    LimitSample, LimitSampler,
};
pub use rng::Seed;
pub use scalar::Real;
pub use stats::{ecdf, ks_one_sample, ks_two_sample, wasserstein1, KsResult, SampleSet};
pub use verify::{run_verification, Regime, VerificationConfig, VerificationReport};

pub type Kernel64 = Kernel<f64>;
pub type Kernel32 = Kernel<f32>;
pub type Grid64 = Grid<f64>;
pub type Grid32 = Grid<f32>;
pub type SamplerPlan64 = SamplerPlan<f64>;
pub type SamplerPlan32 = SamplerPlan<f32>;
pub type Path64 = Path<f64>;
pub type Path32 = Path<f32>;
pub type ExcursionResult64 = ExcursionResult<f64>;
pub type FbmPath64 = FbmPath<f64>;
pub type LimitSample64 = LimitSample<f64>;
pub type LimitSampler64 = LimitSampler<f64>;
pub type C2LimitParams64 = C2LimitParams<f64>;
pub type C2LimitParams32 = C2LimitParams<f32>;
pub type SampleSet64 = SampleSet<f64>;
