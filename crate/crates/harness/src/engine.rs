use rayon::prelude::*;
use spinbath_core::evolution::{BathPropagator, CouplingConfig, SectorPropagator};
use spinbath_core::spin::BathSpec;

use crate::error::Result;

/// Diagonalizes the sectors in parallel; the sum over sectors is still taken
/// in ascending-spin order.
pub fn build_propagator(bath: &BathSpec, couplings: CouplingConfig) -> Result<BathPropagator> {
    let sectors: Vec<&_> = BathPropagator::active_sectors(bath).collect();
    let built: Vec<SectorPropagator> = sectors
        .par_iter()
        .map(|s| SectorPropagator::new(s, couplings))
        .collect();
    Ok(BathPropagator::from_sectors(bath, couplings, built)?)
}
