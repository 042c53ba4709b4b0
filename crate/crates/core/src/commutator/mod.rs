//! Conjugated generators w(iΔ)w⁻¹, their symmetric/skew split, commutator
//! quadratic forms, and the scalar positivity expressions behind them.

mod operators;
mod scalar;
mod scan;

pub use operators::{assemble, commutator_form, gaussian_closed_form, ConjugatedOperators};
pub use scalar::{eq1_expression, eq1_small_x_coefficient, lambda_j, lambda_j_recurrence};
pub use scan::{
    positivity_scan, ScanSample,
    eq1_scan, lambda_scan, log_grid, turan_scan, ExpressionId, ScanGrid, PositivityScanReport, TuranFamily,
};
