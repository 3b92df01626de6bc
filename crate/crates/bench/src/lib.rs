//! Shared fixtures for the criterion benches.

use growthforge_core::construction::{build_plain, build_uniformly_recurrent, Chooser, LevelSystem};
use growthforge_core::growthfn::{Family, GrowthFunction};
use growthforge_core::numeric::Ratio;

pub fn reference_growth() -> GrowthFunction {
    GrowthFunction::new(Family::poly_geometric(Ratio::new(1, 10))).expect("valid family")
}

pub fn plain_system(depth: u32) -> LevelSystem {
    build_plain(reference_growth(), Chooser::Lex, depth).expect("plain build")
}

pub fn recurrent_system(depth: u32, captures: usize) -> LevelSystem {
    build_uniformly_recurrent(reference_growth(), depth, captures, 0, 12, Chooser::Lex).expect("recurrent build")
}
