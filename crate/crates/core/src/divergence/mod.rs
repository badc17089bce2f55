//! Divergence functionals on finite discrete distributions, in nats.

mod measures;
mod sibson;
mod types;

pub use measures::{
    cond_js, cond_renyi, js_alpha, kl, lautum, log_sum_exp, log_sum_exp_slice, mutual_information, renyi,
};
pub(crate) use measures::{js_raw, kl_raw, renyi_raw};
pub use sibson::{sibson_mi, sibson_mi_routes, sibson_minimizer, tilted_joint, SibsonMinimizer, ROUTE_TOL};
pub use types::{binary_entropy, AlphaOrder, ConditionalKernel, JointPmf, Pmf, NORMALIZATION_TOL};
