//! Envelope threshold α + β* for Bessel-profile data.
use lattice_hardy::cli::{hardy_threshold, HardyConfig};

fn main() -> lattice_hardy::Result<()> {
    for a in [0.25, 0.5, 1.0] {
        let r = hardy_threshold(&HardyConfig { a, ..HardyConfig::default() })?;
        println!("a = {a}: beta* = {:.6}, alpha + beta* = {:.6}", r.beta_star.unwrap(), r.alpha_plus_beta.unwrap());
    }
    Ok(())
}
