//! Numerical experiments: random generators in three dimensions, a Gaussian
//! bump on the 11-dimensional cube, and a zero-coupon bond under the Vasicek
//! model, each with its baseline.

mod integrands;
mod mle;
mod report;
mod run;

pub use integrands::{
    bond_closed_form, bond_integrand, ex2_center, integrand_ex1, integrand_ex2, true_integral_ex2, VasicekParams,
    EX1_REFERENCE, EX2_DIM, EX2_LENGTH_SCALE,
};
pub use mle::{log_grid, log_marginal_likelihood, mle_lengthscale, MleFit, MLE_JITTER, MLE_MAX_NODES};
pub use report::{rows_to_csv, ExperimentId, ExperimentReport, ReportRow, RowFailure, CSV_HEADER};
pub use run::{
    gaussian_samples, kmc_rule, monte_carlo, run_experiment, ExperimentConfig, KmcRule, EX1_SET_SIZE,
    EX2_DEFAULT_MAX_LEVEL,
};
