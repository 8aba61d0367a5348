//! Tabular data pipeline: schema, CSV ingestion, encoding, ratio-based
//! dataset construction, stratified splitting, and the synthetic population
//! generator.

pub mod dataset;
pub mod encode;
pub mod records;
pub mod schema;
pub mod synthetic;

pub use dataset::{build_prospecting_dataset, LabeledDataset, Split};
pub use encode::{encode, EncodingStats, NumericStats};
pub use records::{load_csv, write_csv, RawRecord, RawValue};
pub use schema::{ColumnKind, ColumnSpec, FeatureSchema};
pub use synthetic::{
    generate_synthetic, sample_conversions, SyntheticPopulation, SyntheticPopulationSpec,
};
