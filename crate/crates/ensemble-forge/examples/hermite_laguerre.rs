//! Gaussian and Wishart ensembles with their moments.

use ensemble_forge::ensembles::{sample_hermite, sample_laguerre};
use ensemble_forge::stats::moment_summary;
use ensemble_forge::{Result, RngState};

fn main() -> Result<()> {
    let mut rng = RngState::new(6);
    for beta in [1, 2, 4] {
        let b = sample_hermite(3, beta, 10_000, &mut rng)?;
        let m = moment_summary(&b, &[2])?[0];
        // n + beta n (n - 1) / 2
        let exact = 3.0 + beta as f64 * 3.0;
        println!("hermite n=3 beta={beta}: E tr X^2 = {:.3} +- {:.3} (exact {exact})", m.mean, m.std_error);
    }
    for beta in [1, 2, 4] {
        let b = sample_laguerre(3, 2, beta, 10_000, &mut rng)?;
        let m = moment_summary(&b, &[1])?[0];
        println!("laguerre 3x2 beta={beta}: E tr W = {:.3} +- {:.3} (exact {})", m.mean, m.std_error, beta * 6);
    }
    Ok(())
}
