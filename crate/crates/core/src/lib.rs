//! Exact computation and classification of almost contact metric structures
//! on five-dimensional left-invariant coframes.

pub mod acms;
pub mod connection;
pub mod error;
pub mod exterior;
pub mod family;
pub mod frames;
pub mod linalg;
pub mod scalar;
pub mod spinor;
pub mod torsionclass;

pub use error::{Error, Result};
pub use exterior::{d_squared_zero, ext_d, hodge, interior, wedge, Coframe, Form, Symbol, SymbolKind};
pub use scalar::{rat, Field, PhasePoint, Rational, Scalar, TrigScalar};
pub use acms::{AdaptedStructure, Geometry, Lambda2, Predicates, Tensor3};
pub use connection::{CharacteristicConnection, CurvatureData, TorsionType};
pub use family::{build, identify_group, verify_family, FamilyInstance, FamilyParams};
pub use frames::{frame_change_verify, koszul_connection, CanonicalAlgebra, ConnectionForms, FrameChange, PointwiseFrame};
pub use spinor::SpinorSpace;
pub use torsionclass::{cartan_decompose, classify, intrinsic_torsion, CartanParts, ClassReport, IntrinsicTorsion, WModule, WSubspaces};
