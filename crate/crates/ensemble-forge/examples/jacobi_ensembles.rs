//! Jacobi ensembles by GSVD, by CSD of a Haar matrix and by the COE block.

use ensemble_forge::ensembles::{sample, EnsembleSpec, SamplerPath};
use ensemble_forge::stats::{ks_one_sample, ks_two_sample};
use ensemble_forge::{Result, RngState};
use statrs::distribution::{Beta, ContinuousCDF};

fn main() -> Result<()> {
    let mut rng = RngState::new(4);
    for beta in [1, 2, 4] {
        let spec = EnsembleSpec::jacobi(2, 1, 1, beta, SamplerPath::Gsvd)?;
        let c = spec.classical_params();
        let (a1, a2) = (c.alpha1.unwrap(), c.alpha2.unwrap());
        let batch = sample(&spec, 20_000, &mut rng)?;
        let law = Beta::new(a1 + 1.0, a2 + 1.0).unwrap();
        let ks = ks_one_sample(&batch.column(0), |x| law.cdf(x), 0.01)?;
        println!("{spec}: alpha1={a1} alpha2={a2}  KS D={:.4} p={:.3}", ks.statistic, ks.p_value);
    }

    let spec = EnsembleSpec::jacobi(3, 3, 2, 1, SamplerPath::CoeBlock)?;
    let a = sample(&spec, 10_000, &mut rng)?;
    let b = sample(&spec.with_path(SamplerPath::CsdHaar)?, 10_000, &mut rng)?;
    let ks = ks_two_sample(&a.maxima(), &b.maxima(), 0.01)?;
    println!("coe_block vs csd_haar on {}: D={:.4} pass={}", spec.dims, ks.statistic, ks.pass);
    Ok(())
}
