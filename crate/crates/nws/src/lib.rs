//! Exact series solutions of the Newell–Whitehead–Segel equation
//! `u_t = k u_xx + a u - b u^q` by homotopy perturbation, with closed-form
//! reference solutions, numeric cross-checks, and error-table reporting.

pub mod error;
pub mod hpm;
pub mod oracle;
pub mod report;
pub mod scalar;
pub mod symexpr;
pub mod tseries;

pub use error::{Error, Result};
pub use hpm::{
    build_problem, dump_terms, hpm_terms, hpm_terms_with_cap, nonlinear_coeff, partial_sum,
    preset_case, Problem, DEFAULT_MAX_ORDER,
};
pub use oracle::{
    exact_eval, fornberg_weights, pde_residual, taylor_coeff_numeric, ExactSolution,
};
pub use report::{
    build_error_table, build_error_table_with_cap, quantize_sig, relative_error, render_table,
    ErrorTable, RenderOpts, TableEntry, REFERENCE_SIG_DIGITS,
};
pub use scalar::{parse_rational, rational, rational_to_f64, Rational, Scalar};
pub use symexpr::{
    expr_add, expr_canonicalize, expr_d2dx, expr_equals, expr_eval, expr_mul, expr_pow, expr_sub,
    Expr, ExpRational, WPoly,
};
pub use tseries::{
    factorial, ts_add, ts_d2dx, ts_eval, ts_from_expr, ts_integrate_t, ts_mul_trunc, ts_pow_trunc,
    ts_scale, ts_scale_rat, TSeries,
};
