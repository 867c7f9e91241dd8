//! Dense statevector simulation of the circuit IR.

mod circuit;
mod measure;
mod simulate;
mod state;

pub use circuit::{Angle, Circuit, CircuitBuilder, Gate, ParamRef, Parameter, ParameterBinding};
pub use measure::{
    configuration_amplitudes, expectation, expectation_sparse, transition_elements,
    transition_elements_complex, transition_elements_complex_sparse, transition_elements_sparse,
    Configuration, DEFAULT_AMPLITUDE_THRESHOLD, IMAG_TOLERANCE,
};
pub use simulate::simulate;
pub use state::{bitstring_index, index_bitstring, StateVector};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 16;
