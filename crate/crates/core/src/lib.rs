//! Fox–Wright functions, their Fox H-function representing densities, and
//! numerical checks of the associated representations and inequalities.

// `!(x > 0.0)` is used deliberately so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod hfun;
pub mod params;
pub mod quad;
pub mod report;
pub mod repr;
pub mod series;
pub mod special;

pub use bounds::{
    cm_check, km1_bounds, lifted_bounds, log_grid, ratio_f, ratio_f_monotonicity_scan,
    sigma_lower_bound, BoundsReport, CmReport, InequalityLab, MonotoneReport, RatioF,
    SigmaBoundReport,
};
pub use error::{FoxError, Result};
pub use hfun::{
    hfun_moment, hfun_nonneg_scan, hfun_value, moment_identity_check, HFunction, HfunEvalConfig,
    HfunMethod, MomentReport, NonnegReport,
};
pub use params::{
    classify_convergence, correction_coeffs, derive_constants, gamma_ratio, Convergence,
    CorrectionCoefficients, DerivedConstants, GammaPair, ParameterSet,
};
pub use report::{Format, Outcome, Row, RowStatus};
pub use repr::{
    eval_via_representation, finite_laplace_identity, four_param_representation,
    laplace_lift_check, stieltjes_eval, FiniteLaplaceReport, IdentityRecord, ReprConfig,
};
pub use series::{
    correction_series, four_param_wright, fox_wright, fox_wright_complex, mittag_leffler, pfq,
    wright_w, EvalResult, EvalStatus, SeriesConfig,
};
