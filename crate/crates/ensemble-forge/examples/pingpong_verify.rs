//! The k/p split of `ad_H` into ping-pong pairs and the exponential-map identity.

use ensemble_forge::pingpong::{split_kp_basis, verify_exponential_map, LieAlgebraSpec};
use ensemble_forge::{Result, RngState};

fn main() -> Result<()> {
    let mut rng = RngState::new(8);
    for spec in [LieAlgebraSpec::gl_real(3)?, LieAlgebraSpec::u_csd(2, 2, 1)?, LieAlgebraSpec::o_pq(3, 2)?] {
        let h: Vec<f64> = (0..spec.torus_rank()).map(|k| 0.3 + 0.4 * k as f64).collect();
        let h = spec.torus_element(&h);
        let report = split_kp_basis(&spec, &h)?;
        println!("{}: dim {}, centralizer {}, kp dims {:?}", report.label, report.dim, report.zero_dim, report.kp_dims);
        for r in &report.roots {
            println!("  alpha(H) = {:.4}  m+={} m-={}", r.value, r.m_plus, r.m_minus);
        }
        println!("  exp(ad_H) residual {:.2e}", verify_exponential_map(&spec, &h, 20, &mut rng)?);
    }
    Ok(())
}
