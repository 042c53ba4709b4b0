//! The Carleman inequality for one test function and the quadratic-form bound.
use lattice_hardy::carleman::{eqc_quadratic_form, mu0, verify_carleman_refined, CarlemanParams, TestProfile, TimeBump};
use lattice_hardy::LatticeWindow;

fn main() -> lattice_hardy::Result<()> {
    println!("mu0 = {:.9}", mu0());
    let h = TestProfile::NarrowBump.field(&LatticeWindow::cube(1, 16)?)?;
    for r in [50.0, 100.0, 200.0] {
        let p = CarlemanParams::new(0.6, 0.1, r)?;
        let rep = verify_carleman_refined(&h, TimeBump::default(), &p)?;
        let form = eqc_quadratic_form(&p, 0.3, &LatticeWindow::cube(1, 40)?)?;
        println!(
            "R = {r}: ln LHS = {:.3}, ln RHS = {:.3}, form min = {:.3e} (target {:.3e})",
            rep.lhs_log, rep.rhs_log, form.min_rayleigh, form.target
        );
    }
    Ok(())
}
