//! Lower-bound machinery: Clebsch–Gordan coefficients, the qubit flat-spectrum
//! system, Haar twirling through the partially transposed permutation
//! commutant, ensemble entropies and the program-dimension bound.

pub mod bounds;
pub mod cg;
pub mod commutant;
pub mod conjecture;
pub mod entropy;
pub mod gt;
pub mod probe;

pub use bounds::{final_bound, lambert_w0, lower_bound_fd, n_of_eps, FinalBound};
pub use cg::{cg_su2, magic_sum_check, SpinLabel};
pub use commutant::{commutant_basis, twirl, CommutantBasis};
pub use conjecture::{conjecture_system_d2, solve_q_d2, QSolution};
pub use entropy::{ensemble_entropy, ensemble_spectrum, maximize_entropy_over_q, EnsembleSpectrum, EntropyMaximum};
pub use gt::{gt_patterns, GtPattern};
pub use probe::{build_probe, build_probe_d2, Partition, ProbeSpec};
