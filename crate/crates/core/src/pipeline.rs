//! End-to-end training pipelines: dataset assembly, autoencoder pretraining
//! with weight freezing, classifier training, the random-forest baseline,
//! and split metrics — the glue shared by the CLI and the test suites.

use crate::autoencoder::{
    train_autoencoder, AeTrainConfig, AutoencoderModel, DEFAULT_ENCODED_SIZE,
};
use crate::classifier::{
    classify, train_classifier, Architecture, ClassifierModel, TrainConfig, DEFAULT_THRESHOLD,
};
use crate::data::dataset::{build_prospecting_dataset, LabeledDataset, Split};
use crate::data::records::RawRecord;
use crate::data::schema::FeatureSchema;
use crate::error::Result;
use crate::eval::{compute_metrics, MetricReport, DEFAULT_BETA};
use crate::forest::{fit_forest, Forest, RfConfig};
use crate::nn::loss::ClassWeights;
use crate::nn::optim::OptimizerConfig;

/// Builds the ratio-sampled dataset and applies the stratified split.
pub fn build_dataset(
    audience: &[RawRecord],
    universe: &[RawRecord],
    schema: &FeatureSchema,
    ratio: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<LabeledDataset> {
    let mut dataset = build_prospecting_dataset(audience, universe, schema, ratio, seed)?;
    dataset.split(test_fraction, seed)?;
    Ok(dataset)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DlaeConfig {
    pub encoded_size: usize,
    pub ae_optimizer: OptimizerConfig,
    pub ae_epochs: usize,
    pub ae_batch_size: usize,
    pub architecture: Architecture,
    pub optimizer: OptimizerConfig,
    pub epochs: usize,
    pub batch_size: usize,
    /// `None` uses the dataset's inverse-frequency weights.
    pub class_weights: Option<ClassWeights>,
    pub threshold: f64,
    pub seed: u64,
}

impl Default for DlaeConfig {
    fn default() -> Self {
        DlaeConfig {
            encoded_size: DEFAULT_ENCODED_SIZE,
            ae_optimizer: OptimizerConfig::adam(1e-3),
            ae_epochs: 100,
            ae_batch_size: 256,
            architecture: Architecture::A4096,
            optimizer: OptimizerConfig::sgd_momentum(1e-4, 0.92),
            epochs: 100,
            batch_size: 256,
            class_weights: None,
            threshold: DEFAULT_THRESHOLD,
            seed: 0,
        }
    }
}

#[derive(Debug)]
pub struct DlaeArtifacts {
    pub autoencoder: AutoencoderModel,
    pub classifier: ClassifierModel,
    pub ae_trace: Vec<f64>,
    pub clf_trace: Vec<f64>,
    pub train_metrics: MetricReport,
    pub test_metrics: MetricReport,
}

/// Full DL-AE procedure: train the autoencoder alone on the train split,
/// freeze it, train the feed-forward classifier over `[x, x_e]`, and score
/// both splits at the configured threshold.
pub fn train_dlae(dataset: &LabeledDataset, cfg: &DlaeConfig) -> Result<DlaeArtifacts> {
    let (train_x, _, _) = dataset.subset(Split::Train);
    let ae_cfg = AeTrainConfig {
        encoded_size: cfg.encoded_size,
        optimizer: cfg.ae_optimizer,
        epochs: cfg.ae_epochs,
        batch_size: cfg.ae_batch_size,
        seed: cfg.seed,
    };
    let (mut autoencoder, ae_trace) = train_autoencoder(&train_x, &ae_cfg)?;
    autoencoder.freeze();

    let clf_cfg = TrainConfig {
        architecture: cfg.architecture,
        optimizer: cfg.optimizer,
        batch_size: cfg.batch_size,
        epochs: cfg.epochs,
        class_weights: cfg.class_weights.unwrap_or(dataset.class_weights),
        seed: cfg.seed,
    };
    let (classifier, clf_trace) = train_classifier(dataset, &autoencoder, &clf_cfg)?;

    let train_metrics = split_metrics(
        dataset,
        Split::Train,
        |x| classifier.predict_proba(x),
        cfg.threshold,
    )?;
    let test_metrics = split_metrics(
        dataset,
        Split::Test,
        |x| classifier.predict_proba(x),
        cfg.threshold,
    )?;

    Ok(DlaeArtifacts {
        autoencoder,
        classifier,
        ae_trace,
        clf_trace,
        train_metrics,
        test_metrics,
    })
}

#[derive(Debug)]
pub struct RfArtifacts {
    pub forest: Forest,
    pub train_metrics: MetricReport,
    pub test_metrics: MetricReport,
}

/// Random-forest baseline through the identical evaluation path.
pub fn train_rf(dataset: &LabeledDataset, cfg: &RfConfig, threshold: f64) -> Result<RfArtifacts> {
    let forest = fit_forest(dataset, cfg)?;
    let train_metrics = split_metrics(
        dataset,
        Split::Train,
        |x| forest.predict_proba(x),
        threshold,
    )?;
    let test_metrics = split_metrics(dataset, Split::Test, |x| forest.predict_proba(x), threshold)?;
    Ok(RfArtifacts {
        forest,
        train_metrics,
        test_metrics,
    })
}

/// Metrics for one split of the dataset under any probability scorer.
pub fn split_metrics<F>(
    dataset: &LabeledDataset,
    which: Split,
    score: F,
    threshold: f64,
) -> Result<MetricReport>
where
    F: Fn(&crate::tensor::Tensor2D) -> Result<Vec<f64>>,
{
    let (x, labels, _) = dataset.subset(which);
    let probs = score(&x)?;
    let predictions = classify(&probs, threshold)?;
    compute_metrics(&predictions, &labels, DEFAULT_BETA)
}
