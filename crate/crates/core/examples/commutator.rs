//! The conjugated commutator form for the Gaussian weight, matrix vs closed form.
use lattice_hardy::commutator::{assemble, commutator_form, gaussian_closed_form};
use lattice_hardy::weights::WeightSpec;
use lattice_hardy::{Field, LatticeWindow};

fn main() -> lattice_hardy::Result<()> {
    let w = LatticeWindow::cube(2, 12)?;
    let ops = assemble(&WeightSpec::Gaussian { lambda: 0.05 }, &w)?;
    for seed in 0..3 {
        let f = Field::random_compact(w.clone(), 6, seed)?;
        println!("matrix {:.12e}  closed form {:.12e}", commutator_form(&ops, &f)?, gaussian_closed_form(0.05, &f)?);
    }
    Ok(())
}
