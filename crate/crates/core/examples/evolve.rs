//! Free evolution of a delta by both exact engines.
use lattice_hardy::evolve::{evolve_free_convolution, evolve_free_spectral, EvolutionConfig};
use lattice_hardy::{Field, LatticeWindow};

fn main() -> lattice_hardy::Result<()> {
    let f0 = Field::delta(LatticeWindow::cube(1, 60)?, [0, 0, 0])?;
    let a = evolve_free_spectral(&f0, 1.0, &EvolutionConfig::spectral(1.0))?;
    let b = evolve_free_convolution(&f0, 1.0, &EvolutionConfig::convolution(1.0))?;
    println!("|u(1)| = {:.15}, engines differ by {:.2e}", a.norm(), a.distance(&b)?);
    for j in 0..=4 {
        println!("u_{j}(1) = {:.6}", b.get(&[j, 0, 0]));
    }
    Ok(())
}
