use crate::error::Result;
use crate::linalg::hermitian_eigenvalues;
use crate::state::{DensityMatrix, Party, SubsystemPartition};

fn pt_spectrum(rho: &DensityMatrix, bipartition: &SubsystemPartition) -> Result<Vec<f64>> {
    let pt = rho.partial_transpose(bipartition, Party::B)?;
    hermitian_eigenvalues(&pt)
}

/// `log2 ||rho^{T_B}||_1`, clipped at zero.
pub fn negativity(rho: &DensityMatrix, bipartition: &SubsystemPartition) -> Result<f64> {
    let norm: f64 = pt_spectrum(rho, bipartition)?.iter().map(|l| l.abs()).sum();
    Ok(norm.log2().max(0.0))
}

/// Smallest eigenvalue of `rho^{T_B}`.
pub fn min_eig_after_pt(rho: &DensityMatrix, bipartition: &SubsystemPartition) -> Result<f64> {
    Ok(pt_spectrum(rho, bipartition)?[0])
}
