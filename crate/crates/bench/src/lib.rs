//! Shared inputs for the benchmarks in `benches/`.

use fuzzy_effort::dataset::{impute_mmsi, normalize_minmax, split, synth_generate, NormalizedRecord, SynthSpec};
use fuzzy_effort::{Dataset, NormalizationParams};

/// The default 151-project synthetic set, imputed.
pub fn synthetic() -> Dataset {
    impute_mmsi(&synth_generate(&SynthSpec::default()).expect("default spec is valid")).expect("imputable")
}

/// The 74/77 split of [`synthetic`], normalized on the training part.
pub fn split_normalized() -> (Vec<NormalizedRecord>, Vec<NormalizedRecord>, NormalizationParams) {
    let ds = synthetic();
    let (train, test) = split(&ds, fuzzy_effort::dataset::DEFAULT_TRAIN_FRACTION, 42).expect("non-degenerate");
    normalize_minmax(&train, &test).expect("non-empty training set")
}
