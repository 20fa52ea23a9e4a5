//! Jacobi parameters reachable at beta = 2, grouped by space type.

use std::collections::BTreeMap;

use ensemble_forge::cli::parameter_rows;
use ensemble_forge::Result;

fn main() -> Result<()> {
    let rows = parameter_rows(Some(2), 6, &[])?;
    let mut by_space: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.family == "jacobi") {
        by_space.entry(&r.space).or_default().push((r.alpha1.unwrap(), r.alpha2.unwrap()));
    }
    for (space, mut pts) in by_space {
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        let shown: Vec<String> = pts.iter().take(8).map(|(a, b)| format!("({a},{b})")).collect();
        println!("{space}: {} points, first {}", pts.len(), shown.join(" "));
    }
    Ok(())
}
