//! Configuration decomposition of optimized wavefunctions.

use num_complex::Complex64;
use serde::Serialize;

use super::gnm::GNMResult;
use crate::error::{Error, Result};
use crate::graphs::BasisSpec;
use crate::simulator::{configuration_amplitudes, simulate, Configuration, StateVector};

#[derive(Debug, Clone, Serialize)]
pub struct ComponentAnalysis {
    pub index: usize,
    /// Configurations of circuit `index` at its optimized angles.
    pub component: Vec<Configuration>,
    /// Configurations of the normalized total wavefunction.
    pub total: Vec<Configuration>,
    /// Expansion coefficients (`cᵀSc = 1`, largest entry positive).
    pub coefficients: Vec<f64>,
}

/// State of circuit `k` at the result's angles.
pub fn component_state(result: &GNMResult, basis: &BasisSpec, k: usize) -> Result<StateVector> {
    let n = result.angles.len();
    if k >= n {
        return Err(Error::IndexOutOfRange {
            index: k,
            limit: n,
            context: "basis component".into(),
        });
    }
    simulate(&basis.circuits[k], &result.angles[k])
}

/// `Σ c_k ψ_k`, normalized.
pub fn total_wavefunction(result: &GNMResult, basis: &BasisSpec) -> Result<StateVector> {
    let n_qubits = basis.n_qubits();
    let mut total = StateVector::from_amplitudes(vec![Complex64::new(0.0, 0.0); 1 << n_qubits])?;
    for (k, &c) in result.coefficients.iter().enumerate() {
        total.axpy(Complex64::new(c, 0.0), &component_state(result, basis, k)?)?;
    }
    total.normalize();
    Ok(total)
}

pub fn analyze_component(
    result: &GNMResult,
    basis: &BasisSpec,
    k: usize,
    threshold: f64,
) -> Result<ComponentAnalysis> {
    let component = configuration_amplitudes(&component_state(result, basis, k)?, threshold);
    let total = configuration_amplitudes(&total_wavefunction(result, basis)?, threshold);
    Ok(ComponentAnalysis {
        index: k,
        component,
        total,
        coefficients: result.coefficients.clone(),
    })
}

/// `|<a|b>|`.
pub fn projection(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm())
}
