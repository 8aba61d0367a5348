//! Evaluation: confusion-matrix metrics with recall-weighted F-beta,
//! probability ranking of a universe, and campaign simulation (reach,
//! converters, conversions, CVR).

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Default beta: recall weighted four times precision in the harmonic mean.
pub const DEFAULT_BETA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl ConfusionCounts {
    pub fn from_predictions(predictions: &[u8], labels: &[u8]) -> Result<Self> {
        if predictions.is_empty() {
            return Err(Error::EmptyInput("ConfusionCounts::from_predictions"));
        }
        if predictions.len() != labels.len() {
            return Err(Error::ShapeMismatch {
                op: "ConfusionCounts::from_predictions",
                expected: format!("{} labels", predictions.len()),
                got: format!("{}", labels.len()),
            });
        }
        let mut c = ConfusionCounts {
            true_pos: 0,
            false_pos: 0,
            true_neg: 0,
            false_neg: 0,
        };
        for (&p, &y) in predictions.iter().zip(labels) {
            match (p, y) {
                (1, 1) => c.true_pos += 1,
                (1, 0) => c.false_pos += 1,
                (0, 0) => c.true_neg += 1,
                (0, 1) => c.false_neg += 1,
                _ => {
                    return Err(Error::InvalidConfig(
                        "predictions and labels must be 0/1".to_string(),
                    ))
                }
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }
}

/// F-beta from precision and recall; degenerate denominators give 0.
pub fn f_beta_from(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * precision * recall / denom
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
    pub beta: f64,
    /// Set when any metric hit a 0/0 denominator and was reported as 0.
    pub degenerate: bool,
    pub counts: ConfusionCounts,
}

impl MetricReport {
    pub fn csv_header() -> &'static str {
        "accuracy,precision,recall,f_beta,beta,degenerate"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:.6},{:.6},{:.6},{:.6},{},{}",
            self.accuracy, self.precision, self.recall, self.f_beta, self.beta, self.degenerate
        )
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "accuracy: {:.4}", self.accuracy)?;
        writeln!(f, "precision: {:.4}", self.precision)?;
        writeln!(f, "recall: {:.4}", self.recall)?;
        writeln!(f, "f{:.0}: {:.4}", self.beta, self.f_beta)?;
        if self.degenerate {
            writeln!(f, "degenerate: true")?;
        }
        Ok(())
    }
}

/// Accuracy, precision, recall, and F-beta over 0/1 predictions.
pub fn compute_metrics(predictions: &[u8], labels: &[u8], beta: f64) -> Result<MetricReport> {
    let counts = ConfusionCounts::from_predictions(predictions, labels)?;
    let mut degenerate = false;
    let precision = if counts.true_pos + counts.false_pos == 0 {
        degenerate = true;
        0.0
    } else {
        counts.true_pos as f64 / (counts.true_pos + counts.false_pos) as f64
    };
    let recall = if counts.true_pos + counts.false_neg == 0 {
        degenerate = true;
        0.0
    } else {
        counts.true_pos as f64 / (counts.true_pos + counts.false_neg) as f64
    };
    if beta * beta * precision + recall == 0.0 {
        degenerate = true;
    }
    let f_beta = f_beta_from(precision, recall, beta);
    let accuracy = (counts.true_pos + counts.true_neg) as f64 / counts.total() as f64;
    Ok(MetricReport {
        accuracy,
        precision,
        recall,
        f_beta,
        beta,
        degenerate,
        counts,
    })
}

/// Ranking permutation: descending probability, ties broken by ascending
/// record id.
pub fn rank_order(probabilities: &[f64], record_ids: &[String]) -> Result<Vec<usize>> {
    if probabilities.len() != record_ids.len() {
        return Err(Error::ShapeMismatch {
            op: "rank_universe",
            expected: format!("{} ids", probabilities.len()),
            got: format!("{}", record_ids.len()),
        });
    }
    let mut order: Vec<usize> = (0..probabilities.len()).collect();
    order.sort_by(|&a, &b| {
        probabilities[b]
            .total_cmp(&probabilities[a])
            .then_with(|| record_ids[a].cmp(&record_ids[b]))
    });
    Ok(order)
}

/// Record ids ordered by descending probability (ties by ascending id).
pub fn rank_universe(probabilities: &[f64], record_ids: &[String]) -> Result<Vec<String>> {
    Ok(rank_order(probabilities, record_ids)?
        .into_iter()
        .map(|i| record_ids[i].clone())
        .collect())
}

/// CVR as a percentage rounded half-up to two decimals (the precision used
/// in campaign reports).
pub fn percent_2dp(fraction: f64) -> f64 {
    (fraction * 10_000.0).round() / 100.0
}

pub fn format_percent(fraction: f64) -> String {
    format!("{:.2}%", percent_2dp(fraction))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub reach: usize,
    /// Mailed households with at least one conversion.
    pub converters: usize,
    /// Total conversion count over mailed households (#CNV).
    pub conversions: u64,
    /// conversions / reach.
    pub cvr: f64,
    /// Pass-through label; the simulator does not model time.
    pub attribution_window: String,
    pub ranked_ids: Vec<String>,
}

impl CampaignReport {
    pub fn csv_header() -> &'static str {
        "reach,converters,conversions,cvr_percent,attribution_window"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.2},{}",
            self.reach,
            self.converters,
            self.conversions,
            percent_2dp(self.cvr),
            self.attribution_window
        )
    }
}

impl fmt::Display for CampaignReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "reach: {}", self.reach)?;
        writeln!(f, "converters: {}", self.converters)?;
        writeln!(f, "conversions: {}", self.conversions)?;
        writeln!(f, "cvr: {}", format_percent(self.cvr))?;
        writeln!(f, "attribution window: {}", self.attribution_window)?;
        Ok(())
    }
}

/// Mails the top `reach` ids of the ranking and tallies conversions from the
/// ground-truth table (ids absent from the table convert zero times).
pub fn simulate_campaign(
    ranked_ids: &[String],
    reach: usize,
    ground_truth: &HashMap<String, u64>,
    attribution_window: &str,
) -> Result<CampaignReport> {
    if reach == 0 {
        return Err(Error::InvalidConfig("reach must be positive".to_string()));
    }
    if reach > ranked_ids.len() {
        return Err(Error::InvalidConfig(format!(
            "reach {reach} exceeds ranked universe size {}",
            ranked_ids.len()
        )));
    }
    let mut converters = 0usize;
    let mut conversions = 0u64;
    for id in &ranked_ids[..reach] {
        let count = ground_truth.get(id).copied().unwrap_or(0);
        if count >= 1 {
            converters += 1;
            conversions += count;
        }
    }
    Ok(CampaignReport {
        reach,
        converters,
        conversions,
        cvr: conversions as f64 / reach as f64,
        attribution_window: attribution_window.to_string(),
        ranked_ids: ranked_ids.to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelReport {
    Campaign(CampaignReport),
    Metrics(MetricReport),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub metric: String,
    /// One value per model, in input order.
    pub values: Vec<f64>,
    /// value - first model's value.
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub tags: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

impl fmt::Display for ComparisonTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<14}", "metric")?;
        for tag in &self.tags {
            write!(f, "{tag:>14}")?;
        }
        writeln!(f)?;
        for row in &self.rows {
            write!(f, "{:<14}", row.metric)?;
            for v in &row.values {
                write!(f, "{v:>14.4}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn comparison_row(metric: &str, values: Vec<f64>) -> ComparisonRow {
    let first = values[0];
    let deltas = values.iter().map(|v| v - first).collect();
    ComparisonRow {
        metric: metric.to_string(),
        values,
        deltas,
    }
}

/// Side-by-side comparison of reports over the same dataset. Campaign
/// reports must rank the same universe; reports must all be of one kind.
pub fn compare_models(reports: &[(String, ModelReport)]) -> Result<ComparisonTable> {
    if reports.len() < 2 {
        return Err(Error::InvalidConfig(
            "comparison needs at least two reports".to_string(),
        ));
    }
    let tags: Vec<String> = reports.iter().map(|(t, _)| t.clone()).collect();
    match &reports[0].1 {
        ModelReport::Campaign(first) => {
            let mut universe: Vec<&String> = first.ranked_ids.iter().collect();
            universe.sort();
            let mut campaigns = Vec::with_capacity(reports.len());
            for (tag, report) in reports {
                let ModelReport::Campaign(c) = report else {
                    return Err(Error::InvalidConfig(
                        "cannot mix campaign and metric reports".to_string(),
                    ));
                };
                let mut ids: Vec<&String> = c.ranked_ids.iter().collect();
                ids.sort();
                if ids != universe {
                    return Err(Error::InvalidConfig(format!(
                        "report {tag:?} ranks a different universe"
                    )));
                }
                campaigns.push(c);
            }
            let rows = vec![
                comparison_row("reach", campaigns.iter().map(|c| c.reach as f64).collect()),
                comparison_row(
                    "conversions",
                    campaigns.iter().map(|c| c.conversions as f64).collect(),
                ),
                comparison_row(
                    "cvr_percent",
                    campaigns.iter().map(|c| percent_2dp(c.cvr)).collect(),
                ),
            ];
            Ok(ComparisonTable { tags, rows })
        }
        ModelReport::Metrics(first) => {
            let expected_rows = first.counts.total();
            let mut metrics = Vec::with_capacity(reports.len());
            for (tag, report) in reports {
                let ModelReport::Metrics(m) = report else {
                    return Err(Error::InvalidConfig(
                        "cannot mix campaign and metric reports".to_string(),
                    ));
                };
                if m.counts.total() != expected_rows {
                    return Err(Error::InvalidConfig(format!(
                        "report {tag:?} evaluates a different dataset"
                    )));
                }
                metrics.push(m);
            }
            let rows = vec![
                comparison_row("accuracy", metrics.iter().map(|m| m.accuracy).collect()),
                comparison_row("precision", metrics.iter().map(|m| m.precision).collect()),
                comparison_row("recall", metrics.iter().map(|m| m.recall).collect()),
                comparison_row("f_beta", metrics.iter().map(|m| m.f_beta).collect()),
            ];
            Ok(ComparisonTable { tags, rows })
        }
    }
}

/// Ground-truth conversion counts: CSV with a `record_id,conversions`
/// header. Ids absent from the file convert zero times.
pub fn load_ground_truth(path: impl AsRef<std::path::Path>) -> Result<HashMap<String, u64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path.as_ref())
        .map_err(|e| Error::Csv {
            line: 0,
            message: e.to_string(),
        })?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Csv {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let id_pos = headers
        .iter()
        .position(|h| h == "record_id")
        .ok_or_else(|| Error::Schema("ground truth missing record_id column".to_string()))?;
    let count_pos = headers
        .iter()
        .position(|h| h == "conversions")
        .ok_or_else(|| Error::Schema("ground truth missing conversions column".to_string()))?;
    let mut table = HashMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::Csv {
            line: e.position().map(csv::Position::line).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = row.position().map(csv::Position::line).unwrap_or(0);
        let id = row.get(id_pos).unwrap_or("").to_string();
        let count: u64 = row
            .get(count_pos)
            .unwrap_or("")
            .parse()
            .map_err(|_| Error::Csv {
                line,
                message: "bad conversion count".to_string(),
            })?;
        if table.insert(id, count).is_some() {
            return Err(Error::Csv {
                line,
                message: "duplicate record id in ground truth".to_string(),
            });
        }
    }
    Ok(table)
}

pub fn write_ground_truth(path: impl AsRef<std::path::Path>, rows: &[(String, u64)]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref()).map_err(|e| Error::Csv {
        line: 0,
        message: e.to_string(),
    })?;
    writer
        .write_record(["record_id", "conversions"])
        .map_err(|e| Error::Csv {
            line: 0,
            message: e.to_string(),
        })?;
    for (id, count) in rows {
        writer
            .write_record([id.as_str(), &count.to_string()])
            .map_err(|e| Error::Csv {
                line: 0,
                message: e.to_string(),
            })?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tally {
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
}

/// Win/tie/loss tally for the first model over repeated paired runs; a tie is
/// equal CVR at two-decimal percent precision.
pub fn tally_campaign_outcomes(pairs: &[(&CampaignReport, &CampaignReport)]) -> Tally {
    let mut tally = Tally {
        wins: 0,
        ties: 0,
        losses: 0,
    };
    for (a, b) in pairs {
        let pa = percent_2dp(a.cvr);
        let pb = percent_2dp(b.cvr);
        if pa > pb {
            tally.wins += 1;
        } else if pa < pb {
            tally.losses += 1;
        } else {
            tally.ties += 1;
        }
    }
    tally
}
