//! Positivity scan of the scalar commutator coefficient.
use lattice_hardy::commutator::{positivity_scan, ExpressionId, ScanGrid};

fn main() -> lattice_hardy::Result<()> {
    let grid = ScanGrid { j_max: 50, x_max: 100.0, ..ScanGrid::default_for(ExpressionId::Eq1) };
    let r = positivity_scan(ExpressionId::Eq1, &grid, false)?;
    println!("{} points, min {:.3e} at j = {}, x = {:.3e}, positive: {}", r.points, r.min_value, r.argmin_j, r.argmin_x, r.verdict);
    Ok(())
}
