//! Programmable reflection and rotation processors on qudits.

pub mod budget;
pub mod channels;
pub mod circuits;
pub mod cyclic_algebra;
pub mod distances;
pub mod error;
pub mod optima;
pub mod repthy;
pub mod tensor_core;
pub mod universal;

pub use channels::{effective_channel, Channel, ComposedChannel, EffectiveChannel, UnitaryChannel};
pub use circuits::{Gate, GateList};
pub use cyclic_algebra::CyclicElement;
pub use distances::{Branch, CovariantPair};
pub use error::{Error, Result};
pub use tensor_core::{CMatrix, CVector, DenseOperator, PureState, C64};
pub use universal::UniversalProgram;
