//! Printed restricted-root tables next to the numerically measured ones.

use ensemble_forge::pingpong::{measure_root_multiplicities, LieAlgebraSpec};
use ensemble_forge::roots::{root_data, SpaceType};
use ensemble_forge::verify::table_mismatches;
use ensemble_forge::{Result, RngState};

fn main() -> Result<()> {
    let mut rng = RngState::new(7);
    for space in ["BDI_I(3,2,1)", "AIII_III(3,2,2)", "CII_II(2,2,1)", "CI_II(2,2)", "DI_III(3,1)", "A(3)"] {
        let space: SpaceType = space.parse()?;
        let table = root_data(space)?;
        let measured = measure_root_multiplicities(&LieAlgebraSpec::for_space(space)?, &mut rng)?;
        println!("{space} rank {}:", space.torus_rank());
        for r in &table.roots {
            println!("  {:?}  m+={} m-={}", r.coeffs, r.m_plus, r.m_minus);
        }
        println!("  mismatches against measurement: {}", table_mismatches(&measured.roots, &table.roots));
    }
    Ok(())
}
