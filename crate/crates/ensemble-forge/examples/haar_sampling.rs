//! Haar unitary matrices over the three fields and their eigenangles.

use ensemble_forge::matrix::{sample_haar, unitary_eigenangles};
use ensemble_forge::{FieldTag, Result, RngState};

fn main() -> Result<()> {
    let mut rng = RngState::new(1);
    for field in [FieldTag::Real, FieldTag::Complex, FieldTag::Quaternion] {
        let u = sample_haar(field, 4, &mut rng)?;
        println!("{field:?} (beta = {}): storage {:?}, unitarity residual {:.2e}", field.beta(), u.complex().shape(), u.unitarity_residual());
        let a: Vec<String> = unitary_eigenangles(&u).iter().map(|x| format!("{x:.3}")).collect();
        println!("  eigenangles {}", a.join(" "));
    }

    // |tr U|^2 averages to 1 over U(n)
    let draws = 5_000;
    let mean: f64 = (0..draws).map(|_| sample_haar(FieldTag::Complex, 5, &mut rng).unwrap().complex().trace().norm_sqr()).sum::<f64>() / draws as f64;
    println!("E|tr U|^2 over {draws} draws of U(5): {mean:.3}");
    Ok(())
}
