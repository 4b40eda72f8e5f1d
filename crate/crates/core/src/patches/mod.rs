//! S2/C2: randomly learned patch bank, sliding correlation and global max.

mod bank;
mod extract;
mod spectral;

pub use bank::{
    fitting_levels, learn_patch_bank, Patch, PatchBank, PatchSource, DEFAULT_PATCH_COUNTS,
    MAX_DRAWS,
};
pub use extract::{
    extract_features, extract_features_with, s2_map, s2_responses, BoundaryMode, Extractor,
    FeatureLocation, FeatureVector, S2Response,
};
