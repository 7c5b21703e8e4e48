pub mod acceptance;
pub mod error;
pub mod numeric;
pub mod spectral;
pub mod sphere;
pub mod transform;
pub mod torus;

pub use error::{Error, Result};
pub use spectral::{ScaleGrid, SymbolFunction, SymbolKind, TruncationConstants};
pub use transform::{Manifold, SpectralField};
