//! Identity checks of the special-function library.
fn main() -> lattice_hardy::Result<()> {
    let report = lattice_hardy::specfun::selftest()?;
    for c in &report.checks {
        println!("{:<26} {:.3e} (tol {:.0e}) {}", c.name, c.max_error, c.tolerance, if c.pass { "ok" } else { "FAIL" });
    }
    Ok(())
}
