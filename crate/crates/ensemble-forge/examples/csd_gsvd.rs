//! CS decomposition of a Haar unitary and the GSVD of a Gaussian pair.

use ensemble_forge::factorizations::{csd, gsvd, Partition};
use ensemble_forge::matrix::{sample_gaussian_matrix, sample_haar};
use ensemble_forge::{FieldTag, Result, RngState};

fn main() -> Result<()> {
    let mut rng = RngState::new(2);
    let part = Partition::new(3, 2, 3, 2)?;
    let u = sample_haar(FieldTag::Complex, part.n(), &mut rng)?;
    let c = csd(&u, part)?;
    println!("CSD of U(5), p=3 q=2 r=3 s=2");
    println!("  theta = {:?}", c.theta);
    println!("  |U - recon| = {:.2e}, factor residual {:.2e}", c.reconstruct().distance(&u), c.factor_residual());

    // squared cosines of the GSVD are Jacobi distributed
    let a = sample_gaussian_matrix(FieldTag::Real, 4, 2, &mut rng)?;
    let b = sample_gaussian_matrix(FieldTag::Real, 3, 2, &mut rng)?;
    let g = gsvd(&a, &b)?;
    let (ra, rb) = g.reconstruct();
    println!("GSVD of a 4x2 / 3x2 Gaussian pair");
    println!("  c = {:?}", g.c);
    println!("  s = {:?}", g.s);
    println!("  c/s = {:?}", g.ratios());
    println!("  residuals {:.2e} {:.2e}", ra.distance(&a), rb.distance(&b));
    Ok(())
}
