//! COE, CUE and CSE eigenangles along every sampler path.

use std::f64::consts::PI;

use ensemble_forge::ensembles::{sample, EnsembleSpec, SamplerPath};
use ensemble_forge::stats::ks_one_sample;
use ensemble_forge::{Result, RngState};

fn main() -> Result<()> {
    let mut rng = RngState::new(5);
    for (beta, path) in [(1, SamplerPath::Odo), (1, SamplerPath::UutEig), (2, SamplerPath::Eig), (4, SamplerPath::Qdq), (4, SamplerPath::SkewhamEig)] {
        let spec = EnsembleSpec::circular(2, beta, path)?;
        let batch = sample(&spec, 2_000, &mut rng)?;
        batch.check_invariants()?;
        let g = batch.arc_spacings()?;
        println!("{spec}: mean min-arc {:.4}", g.iter().sum::<f64>() / g.len() as f64);
    }

    let batch = sample(&EnsembleSpec::circular(2, 2, SamplerPath::Eig)?, 20_000, &mut rng)?;
    let ks = ks_one_sample(&batch.arc_spacings()?, |g| (g - g.sin()) / PI, 0.01)?;
    println!("CUE(2) spacing vs (g - sin g)/pi: D={:.4} pass={}", ks.statistic, ks.pass);
    Ok(())
}
