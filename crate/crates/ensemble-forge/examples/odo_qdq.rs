//! `U = O1 D O2` for symmetric-space COE input and `U = Q1 D Q2` for CSE input.

use ensemble_forge::factorizations::{odo_decompose, qdq_decompose};
use ensemble_forge::matrix::sample_haar;
use ensemble_forge::{FieldTag, Result, RngState};

fn main() -> Result<()> {
    let mut rng = RngState::new(3);
    let u = sample_haar(FieldTag::Complex, 4, &mut rng)?;
    let f = odo_decompose(&u, &mut rng)?;
    println!("ODO of U(4): |U - O1 D O2| = {:.2e}", f.reconstruct().distance(&u));
    println!("  orthogonality residuals {:.2e} {:.2e}", f.o1.unitarity_residual(), f.o2.unitarity_residual());
    println!("  doubled angles {:?}", f.doubled_angles());

    let u = sample_haar(FieldTag::Complex, 6, &mut rng)?;
    let f = qdq_decompose(&u, &mut rng)?;
    println!("QDQ of U(6): |U - Q1 D Q2| = {:.2e}", f.reconstruct().distance(&u));
    println!("  doubled angles {:?}", f.doubled_angles());
    Ok(())
}
