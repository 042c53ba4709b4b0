//! Log-convexity of the inverse-I weighted norm along the free flow.
use lattice_hardy::convexity::{convexity_report, sample_series, unit_grid, CONVEXITY_TOLERANCE};
use lattice_hardy::evolve::{tight_kernel_cut, EvolutionConfig};
use lattice_hardy::weights::WeightSpec;
use lattice_hardy::{Field, LatticeWindow};

fn main() -> lattice_hardy::Result<()> {
    let f0 = Field::random_compact(LatticeWindow::cube(1, 40)?, 4, 1)?;
    let engine = EvolutionConfig::convolution(1.0).with_kernel_cut(tight_kernel_cut(1.0)?);
    let series = sample_series(&f0, &WeightSpec::InverseBesselI { lambda: 0.1 }, &unit_grid(11), &engine, None)?;
    for (t, l) in series.times.iter().zip(&series.log_values) {
        println!("t = {t:.1}  ln H = {l:.6}");
    }
    let report = convexity_report(&series, CONVEXITY_TOLERANCE)?;
    println!("log-convex: {}", report.verdict);
    Ok(())
}
