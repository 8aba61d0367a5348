//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};

use prospect_core::autoencoder::SWEEP_ENCODED_SIZES;
use prospect_core::classifier::Architecture;
use prospect_core::classifier::ClassifierModel;
use prospect_core::container::{read_header, ArtifactKind};
use prospect_core::data::{
    generate_synthetic, load_csv, sample_conversions, write_csv, EncodingStats, FeatureSchema,
    RawRecord, SyntheticPopulationSpec,
};
use prospect_core::eval::{
    compare_models, format_percent, load_ground_truth, percent_2dp, rank_order, simulate_campaign,
    tally_campaign_outcomes, write_ground_truth, CampaignReport, MetricReport, ModelReport,
};
use prospect_core::forest::Forest;
use prospect_core::pipeline::{build_dataset, train_dlae, train_rf};
use prospect_core::Tensor2D;

use crate::config::RunConfig;
use crate::manifest::{prepare_out_dir, write_atomic, ManifestBuilder};

pub struct SynthParams {
    pub out: PathBuf,
    pub spec: SyntheticPopulationSpec,
    pub force: bool,
}

pub fn cmd_synth(params: &SynthParams) -> anyhow::Result<()> {
    params
        .spec
        .validate()
        .context("invalid synthetic population spec")?;
    prepare_out_dir(&params.out, params.force)?;

    let population = generate_synthetic(&params.spec)?;
    let schema_path = params.out.join("schema.txt");
    write_atomic(&schema_path, population.schema.to_text().as_bytes())?;

    let write_records = |name: &str, records: &[RawRecord]| -> anyhow::Result<()> {
        let tmp = params.out.join(format!("{name}.tmp"));
        write_csv(&tmp, &population.schema, records)?;
        std::fs::rename(&tmp, params.out.join(name))?;
        Ok(())
    };
    write_records("audience.csv", &population.audience)?;
    write_records("universe.csv", &population.universe)?;

    // Conversion counts drawn from the ground-truth propensities; only
    // converters are listed (absent ids convert zero times).
    let rows = sample_conversions(&population, params.spec.seed);
    let conv_tmp = params.out.join("conversions.tmp");
    write_ground_truth(&conv_tmp, &rows)?;
    std::fs::rename(&conv_tmp, params.out.join("conversions.csv"))?;

    let config = serde_json::json!({
        "universe_size": params.spec.universe_size,
        "audience_size": params.spec.audience_size,
        "numeric_dims": params.spec.numeric_dims,
        "categorical_dims": params.spec.categorical_dims,
        "separation": params.spec.separation,
        "overlap_fraction": params.spec.overlap_fraction,
        "propensity_scale": params.spec.propensity_scale,
        "propensity_steepness": params.spec.propensity_steepness,
    });
    let mut manifest = ManifestBuilder::new("synth", config, &[params.spec.seed], &params.out);
    for artifact in [
        "schema.txt",
        "audience.csv",
        "universe.csv",
        "conversions.csv",
    ] {
        manifest.record_artifact(artifact)?;
    }
    manifest.write()?;
    Ok(())
}

pub struct DataPaths {
    pub schema: PathBuf,
    pub audience: PathBuf,
    pub universe: PathBuf,
}

impl DataPaths {
    pub fn from_dir(dir: &Path) -> Self {
        DataPaths {
            schema: dir.join("schema.txt"),
            audience: dir.join("audience.csv"),
            universe: dir.join("universe.csv"),
        }
    }

    fn load(&self) -> anyhow::Result<(FeatureSchema, Vec<RawRecord>, Vec<RawRecord>)> {
        let schema = FeatureSchema::load(&self.schema)
            .with_context(|| format!("loading schema {}", self.schema.display()))?;
        let audience = load_csv(&self.audience, &schema)
            .with_context(|| format!("loading audience {}", self.audience.display()))?;
        let universe = load_csv(&self.universe, &schema)
            .with_context(|| format!("loading universe {}", self.universe.display()))?;
        Ok((schema, audience, universe))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Dlae,
    Rf,
}

pub struct TrainParams {
    pub data: DataPaths,
    pub out: PathBuf,
    pub model: ModelKind,
    pub config: RunConfig,
    pub snapshot: bool,
    pub force: bool,
}

struct SeedOutcome {
    seed: u64,
    train: MetricReport,
    test: MetricReport,
}

fn metrics_csv(outcomes: &[SeedOutcome]) -> String {
    let mut out = String::from("seed,split,accuracy,precision,recall,f2,degenerate\n");
    for o in outcomes {
        for (split, m) in [("train", &o.train), ("test", &o.test)] {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6},{:.6},{}",
                o.seed, split, m.accuracy, m.precision, m.recall, m.f_beta, m.degenerate
            );
        }
    }
    for split in ["train", "test"] {
        let pick = |f: fn(&MetricReport) -> f64| -> Vec<f64> {
            outcomes
                .iter()
                .map(|o| f(if split == "train" { &o.train } else { &o.test }))
                .collect()
        };
        for (stat, reduce) in [("mean", mean as fn(&[f64]) -> f64), ("std", std_dev)] {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6},{:.6},",
                stat,
                split,
                reduce(&pick(|m| m.accuracy)),
                reduce(&pick(|m| m.precision)),
                reduce(&pick(|m| m.recall)),
                reduce(&pick(|m| m.f_beta)),
            );
        }
    }
    out
}

fn metrics_pretty(outcomes: &[SeedOutcome]) -> String {
    let mut out = String::new();
    for split in ["train", "test"] {
        let _ = writeln!(out, "[{split}]");
        for (name, f) in [
            (
                "accuracy",
                (|m: &MetricReport| m.accuracy) as fn(&MetricReport) -> f64,
            ),
            ("precision", |m| m.precision),
            ("recall", |m| m.recall),
            ("f2", |m| m.f_beta),
        ] {
            let values: Vec<f64> = outcomes
                .iter()
                .map(|o| f(if split == "train" { &o.train } else { &o.test }))
                .collect();
            let _ = writeln!(
                out,
                "  {name}: {:.4} +/- {:.4}",
                mean(&values),
                std_dev(&values)
            );
        }
    }
    out
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}

fn trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("epoch,loss\n");
    for (i, loss) in trace.iter().enumerate() {
        let _ = writeln!(out, "{},{:.9e}", i + 1, loss);
    }
    out
}

pub fn cmd_train(params: &TrainParams) -> anyhow::Result<()> {
    if params.config.seeds.is_empty() {
        bail!("need at least one seed");
    }
    prepare_out_dir(&params.out, params.force)?;
    let (schema, audience, universe) = params.data.load()?;

    let mut manifest = ManifestBuilder::new(
        "train",
        serde_json::json!({
            "model": match params.model { ModelKind::Dlae => "dlae", ModelKind::Rf => "rf" },
            "run": params.config.manifest_json(),
        }),
        &params.config.seeds,
        &params.out,
    );
    manifest.record_input(&params.data.schema)?;
    manifest.record_input(&params.data.audience)?;
    manifest.record_input(&params.data.universe)?;

    let mut outcomes = Vec::new();
    for &seed in &params.config.seeds {
        let seed_dir = params.out.join(format!("seed-{seed}"));
        std::fs::create_dir_all(&seed_dir)?;
        let rel = |name: &str| format!("seed-{seed}/{name}");

        let dataset = build_dataset(
            &audience,
            &universe,
            &schema,
            params.config.ratio,
            params.config.test_fraction,
            seed,
        )?;
        write_atomic(
            &seed_dir.join("stats.txt"),
            dataset.stats.to_text().as_bytes(),
        )?;
        manifest.record_artifact(&rel("stats.txt"))?;
        if params.snapshot {
            dataset.save_snapshot(seed_dir.join("dataset.pknn"))?;
            manifest.record_artifact(&rel("dataset.pknn"))?;
        }

        let (train, test) = match params.model {
            ModelKind::Dlae => {
                let artifacts = train_dlae(&dataset, &params.config.dlae_config(seed))?;
                artifacts.autoencoder.save(seed_dir.join("ae.pknn"))?;
                artifacts
                    .classifier
                    .save(seed_dir.join("classifier.pknn"))?;
                write_atomic(
                    &seed_dir.join("ae_loss.csv"),
                    trace_csv(&artifacts.ae_trace).as_bytes(),
                )?;
                write_atomic(
                    &seed_dir.join("clf_loss.csv"),
                    trace_csv(&artifacts.clf_trace).as_bytes(),
                )?;
                for name in ["ae.pknn", "classifier.pknn", "ae_loss.csv", "clf_loss.csv"] {
                    manifest.record_artifact(&rel(name))?;
                }
                (artifacts.train_metrics, artifacts.test_metrics)
            }
            ModelKind::Rf => {
                let artifacts = train_rf(
                    &dataset,
                    &params.config.rf_config(seed),
                    params.config.threshold,
                )?;
                artifacts.forest.save(seed_dir.join("rf.pknn"))?;
                manifest.record_artifact(&rel("rf.pknn"))?;
                (artifacts.train_metrics, artifacts.test_metrics)
            }
        };
        outcomes.push(SeedOutcome { seed, train, test });
    }

    write_atomic(
        &params.out.join("metrics.csv"),
        metrics_csv(&outcomes).as_bytes(),
    )?;
    write_atomic(
        &params.out.join("metrics.txt"),
        metrics_pretty(&outcomes).as_bytes(),
    )?;
    manifest.record_artifact("metrics.csv")?;
    manifest.record_artifact("metrics.txt")?;
    manifest.write()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Ratio,
    EncoderSize,
    Architecture,
}

pub struct SweepParams {
    pub data: DataPaths,
    pub out: PathBuf,
    pub kind: SweepKind,
    /// Raw sweep values; defaults depend on the kind.
    pub values: Option<Vec<String>>,
    pub config: RunConfig,
    pub force: bool,
}

enum SweepValue {
    Ratio(usize),
    EncoderSize(usize),
    Architecture(Architecture),
}

impl SweepValue {
    fn label(&self) -> String {
        match self {
            SweepValue::Ratio(v) => v.to_string(),
            SweepValue::EncoderSize(v) => v.to_string(),
            SweepValue::Architecture(a) => a.name().to_string(),
        }
    }
}

fn parse_sweep_values(
    kind: SweepKind,
    raw: Option<&Vec<String>>,
) -> anyhow::Result<Vec<SweepValue>> {
    match kind {
        SweepKind::Ratio => {
            let values: Vec<usize> = match raw {
                None => (1..=10).collect(),
                Some(list) => list
                    .iter()
                    .map(|s| s.parse().context("ratio values must be integers"))
                    .collect::<anyhow::Result<_>>()?,
            };
            for &v in &values {
                if !(1..=10).contains(&v) {
                    bail!("ratio sweep values must lie in 1..=10, got {v}");
                }
            }
            Ok(values.into_iter().map(SweepValue::Ratio).collect())
        }
        SweepKind::EncoderSize => {
            let values: Vec<usize> = match raw {
                None => SWEEP_ENCODED_SIZES.to_vec(),
                Some(list) => list
                    .iter()
                    .map(|s| s.parse().context("encoder sizes must be integers"))
                    .collect::<anyhow::Result<_>>()?,
            };
            for &v in &values {
                if !SWEEP_ENCODED_SIZES.contains(&v) {
                    bail!("encoder size {v} not in {SWEEP_ENCODED_SIZES:?}");
                }
            }
            Ok(values.into_iter().map(SweepValue::EncoderSize).collect())
        }
        SweepKind::Architecture => {
            let values: Vec<Architecture> = match raw {
                None => Architecture::all().to_vec(),
                Some(list) => list
                    .iter()
                    .map(|s| s.parse::<Architecture>().map_err(anyhow::Error::from))
                    .collect::<anyhow::Result<_>>()?,
            };
            Ok(values.into_iter().map(SweepValue::Architecture).collect())
        }
    }
}

pub fn cmd_sweep(params: &SweepParams) -> anyhow::Result<()> {
    if params.config.seeds.is_empty() {
        bail!("need at least one seed");
    }
    let values = parse_sweep_values(params.kind, params.values.as_ref())?;
    prepare_out_dir(&params.out, params.force)?;
    let (schema, audience, universe) = params.data.load()?;

    let kind_name = match params.kind {
        SweepKind::Ratio => "ratio",
        SweepKind::EncoderSize => "encoder_size",
        SweepKind::Architecture => "architecture",
    };

    let mut csv = String::from(
        "kind,value,split,seeds,positives,accuracy_mean,accuracy_std,precision_mean,precision_std,recall_mean,recall_std,f2_mean,f2_std\n",
    );
    for value in &values {
        let mut per_split: BTreeMap<&str, Vec<MetricReport>> = BTreeMap::new();
        let mut positives = 0usize;
        for &seed in &params.config.seeds {
            let mut cfg = params.config.dlae_config(seed);
            let mut ratio = params.config.ratio;
            match value {
                SweepValue::Ratio(r) => ratio = *r,
                SweepValue::EncoderSize(s) => cfg.encoded_size = *s,
                SweepValue::Architecture(a) => cfg.architecture = *a,
            }
            let dataset = build_dataset(
                &audience,
                &universe,
                &schema,
                ratio,
                params.config.test_fraction,
                seed,
            )?;
            positives = dataset.positives();
            let artifacts = train_dlae(&dataset, &cfg)?;
            per_split
                .entry("train")
                .or_default()
                .push(artifacts.train_metrics);
            per_split
                .entry("test")
                .or_default()
                .push(artifacts.test_metrics);
        }
        for (split, reports) in &per_split {
            let col = |f: fn(&MetricReport) -> f64| -> Vec<f64> { reports.iter().map(f).collect() };
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                kind_name,
                value.label(),
                split,
                params.config.seeds.len(),
                positives,
                mean(&col(|m| m.accuracy)),
                std_dev(&col(|m| m.accuracy)),
                mean(&col(|m| m.precision)),
                std_dev(&col(|m| m.precision)),
                mean(&col(|m| m.recall)),
                std_dev(&col(|m| m.recall)),
                mean(&col(|m| m.f_beta)),
                std_dev(&col(|m| m.f_beta)),
            );
        }
    }

    write_atomic(&params.out.join("sweep.csv"), csv.as_bytes())?;
    let mut manifest = ManifestBuilder::new(
        "sweep",
        serde_json::json!({
            "kind": kind_name,
            "values": values.iter().map(SweepValue::label).collect::<Vec<_>>(),
            "run": params.config.manifest_json(),
        }),
        &params.config.seeds,
        &params.out,
    );
    manifest.record_input(&params.data.schema)?;
    manifest.record_input(&params.data.audience)?;
    manifest.record_input(&params.data.universe)?;
    manifest.record_artifact("sweep.csv")?;
    manifest.write()?;
    Ok(())
}

/// A scoring model loaded from disk: either the DL-AE classifier or the
/// random-forest baseline. Both consume the schema-encoded feature matrix.
enum ScoringModel {
    Classifier(Box<ClassifierModel>),
    Forest(Forest),
}

impl ScoringModel {
    fn load(path: &Path) -> anyhow::Result<Self> {
        let file = std::fs::File::open(path)
            .with_context(|| format!("opening model {}", path.display()))?;
        let mut reader = std::io::BufReader::new(file);
        let kind = read_header(&mut reader)?;
        drop(reader);
        match kind {
            ArtifactKind::Classifier => Ok(ScoringModel::Classifier(Box::new(
                ClassifierModel::load(path)?,
            ))),
            ArtifactKind::Forest => Ok(ScoringModel::Forest(Forest::load(path)?)),
            other => bail!("model file holds {other:?}, expected a classifier or forest"),
        }
    }

    fn input_width(&self) -> usize {
        match self {
            ScoringModel::Classifier(c) => c.input_width(),
            ScoringModel::Forest(f) => f.n_features,
        }
    }

    fn predict(&self, x: &Tensor2D) -> anyhow::Result<Vec<f64>> {
        Ok(match self {
            ScoringModel::Classifier(c) => c.predict_proba(x)?,
            ScoringModel::Forest(f) => f.predict_proba(x)?,
        })
    }
}

fn score_universe(
    model_path: &Path,
    schema_path: &Path,
    stats_path: &Path,
    universe_path: &Path,
) -> anyhow::Result<(Vec<String>, Vec<f64>)> {
    let schema = FeatureSchema::load(schema_path)?;
    let stats = EncodingStats::load(stats_path, &schema)?;
    let records = load_csv(universe_path, &schema)?;
    let model = ScoringModel::load(model_path)?;
    let (features, _) = prospect_core::data::encode(&records, &schema, Some(&stats))?;
    if features.cols() != model.input_width() {
        bail!(
            "schema mismatch: encoded width {} but the model expects {}",
            features.cols(),
            model.input_width()
        );
    }
    let probs = model.predict(&features)?;
    let ids = records.into_iter().map(|r| r.record_id).collect();
    Ok((ids, probs))
}

pub struct RankParams {
    pub model: PathBuf,
    pub schema: PathBuf,
    pub stats: PathBuf,
    pub universe: PathBuf,
    pub out: PathBuf,
    pub force: bool,
}

pub fn cmd_rank(params: &RankParams) -> anyhow::Result<()> {
    prepare_out_dir(&params.out, params.force)?;
    let (ids, probs) = score_universe(
        &params.model,
        &params.schema,
        &params.stats,
        &params.universe,
    )?;
    let order = rank_order(&probs, &ids)?;
    let mut csv = String::from("rank,record_id,probability\n");
    for (rank, &idx) in order.iter().enumerate() {
        let _ = writeln!(csv, "{},{},{:.9}", rank + 1, ids[idx], probs[idx]);
    }
    write_atomic(&params.out.join("ranking.csv"), csv.as_bytes())?;

    let mut manifest = ManifestBuilder::new(
        "rank",
        serde_json::json!({
            "model": params.model.display().to_string(),
        }),
        &[],
        &params.out,
    );
    manifest.record_input(&params.model)?;
    manifest.record_input(&params.schema)?;
    manifest.record_input(&params.stats)?;
    manifest.record_input(&params.universe)?;
    manifest.record_artifact("ranking.csv")?;
    manifest.write()?;
    Ok(())
}

pub struct CampaignParams {
    pub model: PathBuf,
    pub schema: PathBuf,
    pub stats: PathBuf,
    pub universe: PathBuf,
    pub ground_truth: PathBuf,
    pub reach: usize,
    pub window: String,
    pub method_tag: String,
    pub audience_tag: String,
    pub out: PathBuf,
    pub force: bool,
}

pub fn cmd_campaign(params: &CampaignParams) -> anyhow::Result<()> {
    prepare_out_dir(&params.out, params.force)?;
    let (ids, probs) = score_universe(
        &params.model,
        &params.schema,
        &params.stats,
        &params.universe,
    )?;
    if params.reach > ids.len() {
        bail!("reach {} exceeds universe size {}", params.reach, ids.len());
    }
    let ranked = prospect_core::eval::rank_universe(&probs, &ids)?;
    let truth = load_ground_truth(&params.ground_truth)?;
    let report = simulate_campaign(&ranked, params.reach, &truth, &params.window)?;

    let mut csv = String::from("method,audience,reach,cnv,cvr_percent\n");
    let _ = writeln!(
        csv,
        "{},{},{},{},{:.2}",
        params.method_tag,
        params.audience_tag,
        report.reach,
        report.conversions,
        percent_2dp(report.cvr)
    );
    write_atomic(&params.out.join("campaign.csv"), csv.as_bytes())?;

    let pretty = format!(
        "method: {}\naudience: {}\nreach: {}\nconverters: {}\nconversions: {}\ncvr: {}\nattribution window: {}\n",
        params.method_tag,
        params.audience_tag,
        report.reach,
        report.converters,
        report.conversions,
        format_percent(report.cvr),
        report.attribution_window
    );
    write_atomic(&params.out.join("campaign.txt"), pretty.as_bytes())?;

    let json = serde_json::json!({
        "tag": params.method_tag,
        "audience": params.audience_tag,
        "reach": report.reach,
        "converters": report.converters,
        "conversions": report.conversions,
        "cvr": report.cvr,
        "attribution_window": report.attribution_window,
        "ranked_ids": report.ranked_ids,
    });
    write_atomic(
        &params.out.join("campaign.json"),
        serde_json::to_string_pretty(&json)?.as_bytes(),
    )?;

    let mut manifest = ManifestBuilder::new(
        "campaign",
        serde_json::json!({
            "reach": params.reach,
            "window": params.window,
            "method": params.method_tag,
            "audience": params.audience_tag,
        }),
        &[],
        &params.out,
    );
    manifest.record_input(&params.model)?;
    manifest.record_input(&params.universe)?;
    manifest.record_input(&params.ground_truth)?;
    for artifact in ["campaign.csv", "campaign.txt", "campaign.json"] {
        manifest.record_artifact(artifact)?;
    }
    manifest.write()?;
    Ok(())
}

pub struct CompareParams {
    pub reports: Vec<PathBuf>,
    pub out: PathBuf,
    pub force: bool,
}

fn load_campaign_json(path: &Path) -> anyhow::Result<(String, CampaignReport)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading report {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let tag = value["tag"].as_str().unwrap_or("model").to_string();
    let ranked_ids: Vec<String> = value["ranked_ids"]
        .as_array()
        .context("report missing ranked_ids")?
        .iter()
        .map(|v| v.as_str().unwrap_or_default().to_string())
        .collect();
    let report = CampaignReport {
        reach: value["reach"].as_u64().context("missing reach")? as usize,
        converters: value["converters"].as_u64().context("missing converters")? as usize,
        conversions: value["conversions"]
            .as_u64()
            .context("missing conversions")?,
        cvr: value["cvr"].as_f64().context("missing cvr")?,
        attribution_window: value["attribution_window"]
            .as_str()
            .unwrap_or("")
            .to_string(),
        ranked_ids,
    };
    Ok((tag, report))
}

pub fn cmd_compare(params: &CompareParams) -> anyhow::Result<()> {
    if params.reports.len() < 2 {
        bail!("compare needs at least two campaign reports");
    }
    prepare_out_dir(&params.out, params.force)?;
    let mut loaded = Vec::new();
    for path in &params.reports {
        loaded.push(load_campaign_json(path)?);
    }
    let entries: Vec<(String, ModelReport)> = loaded
        .iter()
        .map(|(tag, report)| (tag.clone(), ModelReport::Campaign(report.clone())))
        .collect();
    let table = compare_models(&entries)?;

    let mut csv = String::from("metric");
    for tag in &table.tags {
        let _ = write!(csv, ",{tag}");
    }
    csv.push('\n');
    for row in &table.rows {
        let _ = write!(csv, "{}", row.metric);
        for v in &row.values {
            let _ = write!(csv, ",{v:.4}");
        }
        csv.push('\n');
    }
    write_atomic(&params.out.join("comparison.csv"), csv.as_bytes())?;

    let mut pretty = table.to_string();
    if loaded.len() == 2 {
        let tally = tally_campaign_outcomes(&[(&loaded[0].1, &loaded[1].1)]);
        let outcome = if tally.wins == 1 {
            "win"
        } else if tally.losses == 1 {
            "loss"
        } else {
            "tie"
        };
        let _ = writeln!(pretty, "{} vs {}: {}", loaded[0].0, loaded[1].0, outcome);
    }
    write_atomic(&params.out.join("comparison.txt"), pretty.as_bytes())?;

    let mut manifest = ManifestBuilder::new(
        "compare",
        serde_json::json!({
            "reports": params.reports.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        }),
        &[],
        &params.out,
    );
    for path in &params.reports {
        manifest.record_input(path)?;
    }
    manifest.record_artifact("comparison.csv")?;
    manifest.record_artifact("comparison.txt")?;
    manifest.write()?;
    Ok(())
}
