//! Quadrature marginals of small-rank densities tested against samples.

use ensemble_forge::ensembles::{sample, EnsembleSpec, SamplerPath};
use ensemble_forge::stats::{ks_one_sample, numeric_marginal_cdf, Coordinate};
use ensemble_forge::{Result, RngState};

fn main() -> Result<()> {
    let mut rng = RngState::new(9);
    let cases = [
        (EnsembleSpec::laguerre(2, 1, 1)?, Coordinate::Min),
        (EnsembleSpec::jacobi(3, 2, 2, 2, SamplerPath::Gsvd)?, Coordinate::Max),
        (EnsembleSpec::hermite(2, 1)?, Coordinate::Min),
        (EnsembleSpec::circular(2, 4, SamplerPath::Qdq)?, Coordinate::ArcSpacing),
    ];
    for (spec, coord) in cases {
        let cdf = numeric_marginal_cdf(&spec, coord, 512)?;
        let batch = sample(&spec, 10_000, &mut rng)?;
        let data = match coord {
            Coordinate::Min => batch.minima(),
            Coordinate::Max => batch.maxima(),
            Coordinate::ArcSpacing => batch.arc_spacings()?,
        };
        let ks = ks_one_sample(&data, |x| cdf.eval(x), 0.01)?;
        println!("{spec} {coord:?}: D={:.4} threshold {:.4} p={:.3}", ks.statistic, ks.threshold, ks.p_value);
    }
    Ok(())
}
