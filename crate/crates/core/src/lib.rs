//! Finite truncations of dyadic level systems of monomial algebras, and
//! exact analytics over their factor languages.

pub mod analyzer;
pub mod construction;
pub mod freesub;
pub mod growthfn;
pub mod numeric;
pub mod persist;

pub use analyzer::{AnalyzeError, FactorSet, Verdict};
pub use construction::{Alphabet, BuildError, CSet, Chooser, LevelSystem, WordRef};
pub use freesub::{FreeError, FreeParams};
pub use growthfn::{Family, GrowthError, GrowthFunction};
pub use numeric::Ratio;
