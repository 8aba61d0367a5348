//! Synthetic population generator.
//!
//! Stands in for proprietary vendor data: audience records are drawn from a
//! "customer" class-conditional distribution, the universe is a mixture
//! dominated by the non-customer distribution with a small customer-like
//! fraction, and every universe record carries a ground-truth conversion
//! propensity that increases monotonically with customer-likeness.
//!
//! Numeric features are unit-variance Gaussians whose class means are
//! `separation` apart in Euclidean distance. Categorical features are
//! uniform for non-customers and geometrically skewed toward low indices for
//! customers, with the skew scaled by `separation` so zero separation makes
//! every feature uninformative.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::data::records::{RawRecord, RawValue};
use crate::data::schema::{
    ColumnKind, ColumnSpec, FeatureSchema, DEFAULT_HASH_BUCKETS, MAX_ONE_HOT,
};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticPopulationSpec {
    pub universe_size: usize,
    pub audience_size: usize,
    pub numeric_dims: usize,
    /// Cardinalities of categorical features.
    pub categorical_dims: Vec<usize>,
    /// Euclidean distance between the class-conditional numeric means.
    pub separation: f64,
    /// Fraction of the universe drawn from the customer distribution.
    pub overlap_fraction: f64,
    /// Peak conversion propensity.
    pub propensity_scale: f64,
    /// Steepness of the propensity curve in customer-likeness.
    pub propensity_steepness: f64,
    pub seed: u64,
}

impl Default for SyntheticPopulationSpec {
    fn default() -> Self {
        SyntheticPopulationSpec {
            universe_size: 50_000,
            audience_size: 5_000,
            numeric_dims: 50,
            categorical_dims: Vec::new(),
            separation: 2.0,
            overlap_fraction: 0.05,
            propensity_scale: 0.05,
            propensity_steepness: 1.5,
            seed: 0,
        }
    }
}

impl SyntheticPopulationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.audience_size == 0 || self.universe_size == 0 {
            return Err(Error::InvalidConfig(
                "audience and universe sizes must be positive".to_string(),
            ));
        }
        if self.audience_size >= self.universe_size {
            return Err(Error::InvalidConfig(format!(
                "audience size {} must be smaller than universe size {}",
                self.audience_size, self.universe_size
            )));
        }
        if self.numeric_dims == 0 && self.categorical_dims.is_empty() {
            return Err(Error::InvalidConfig(
                "need at least one feature".to_string(),
            ));
        }
        if self.separation < 0.0 {
            return Err(Error::InvalidConfig("separation must be >= 0".to_string()));
        }
        if !(0.0..=1.0).contains(&self.overlap_fraction) {
            return Err(Error::InvalidConfig(
                "overlap fraction must be in [0,1]".to_string(),
            ));
        }
        if !(0.0 < self.propensity_scale && self.propensity_scale <= 1.0) {
            return Err(Error::InvalidConfig(
                "propensity scale must be in (0,1]".to_string(),
            ));
        }
        if self.categorical_dims.iter().any(|&k| k == 0) {
            return Err(Error::InvalidConfig(
                "categorical cardinalities must be positive".to_string(),
            ));
        }
        Ok(())
    }

    pub fn schema(&self) -> Result<FeatureSchema> {
        let mut columns = Vec::new();
        for d in 0..self.numeric_dims {
            columns.push(ColumnSpec {
                name: format!("n{d}"),
                kind: ColumnKind::Numeric { nullable: false },
            });
        }
        for (c, &k) in self.categorical_dims.iter().enumerate() {
            let kind = if k <= MAX_ONE_HOT {
                ColumnKind::Categorical {
                    vocab: (0..k).map(|j| format!("v{j}")).collect(),
                }
            } else {
                ColumnKind::CategoricalHashed {
                    buckets: DEFAULT_HASH_BUCKETS,
                }
            };
            columns.push(ColumnSpec {
                name: format!("c{c}"),
                kind,
            });
        }
        FeatureSchema::new("record_id", columns)
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticPopulation {
    pub schema: FeatureSchema,
    pub audience: Vec<RawRecord>,
    pub universe: Vec<RawRecord>,
    /// Ground-truth conversion propensity per universe record.
    pub propensities: Vec<f64>,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; 1 - gen() keeps the log argument in (0, 1].
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn sample_categorical(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut draw = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        draw -= w;
        if draw <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

struct Generator {
    numeric_mean: Vec<f64>,
    customer_cat_weights: Vec<Vec<f64>>,
    uniform_cat_weights: Vec<Vec<f64>>,
    direction: Vec<f64>,
    spec: SyntheticPopulationSpec,
}

impl Generator {
    fn new(spec: &SyntheticPopulationSpec) -> Self {
        let d = spec.numeric_dims;
        let per_dim = if d > 0 {
            spec.separation / (d as f64).sqrt()
        } else {
            0.0
        };
        let numeric_mean = vec![per_dim; d];
        let direction = vec![1.0 / (d.max(1) as f64).sqrt(); d];
        let customer_cat_weights = spec
            .categorical_dims
            .iter()
            .map(|&k| {
                (0..k)
                    .map(|j| {
                        if k == 1 {
                            1.0
                        } else {
                            (-spec.separation * j as f64 / (k - 1) as f64).exp()
                        }
                    })
                    .collect()
            })
            .collect();
        let uniform_cat_weights = spec
            .categorical_dims
            .iter()
            .map(|&k| vec![1.0; k])
            .collect();
        Generator {
            numeric_mean,
            customer_cat_weights,
            uniform_cat_weights,
            direction,
            spec: spec.clone(),
        }
    }

    fn draw(&self, customer: bool, rng: &mut ChaCha8Rng) -> (Vec<RawValue>, f64) {
        let mut values =
            Vec::with_capacity(self.spec.numeric_dims + self.spec.categorical_dims.len());
        let mut score = 0.0;
        for dim in 0..self.spec.numeric_dims {
            let mut x = normal(rng);
            if customer {
                x += self.numeric_mean[dim];
            }
            score += x * self.direction[dim];
            values.push(RawValue::Number(x));
        }
        let weights = if customer {
            &self.customer_cat_weights
        } else {
            &self.uniform_cat_weights
        };
        for w in weights {
            let j = sample_categorical(rng, w);
            values.push(RawValue::Token(format!("v{j}")));
        }
        (values, score)
    }

    /// Monotone in the customer-likeness score.
    fn propensity(&self, score: f64) -> f64 {
        let centered = score - self.spec.separation / 2.0;
        let z = self.spec.propensity_steepness * centered;
        self.spec.propensity_scale / (1.0 + (-z).exp())
    }
}

/// Draws ground-truth conversion counts from the population's propensities:
/// a record converts with its propensity, and a converter occasionally makes
/// a second transaction. Only converters are returned.
pub fn sample_conversions(population: &SyntheticPopulation, seed: u64) -> Vec<(String, u64)> {
    let mut conv_rng = rng::stream(seed, rng::purpose::CONVERSIONS, 0);
    let mut rows = Vec::new();
    for (record, &p) in population.universe.iter().zip(&population.propensities) {
        if conv_rng.gen::<f64>() < p {
            let count = if conv_rng.gen::<f64>() < 0.25 { 2 } else { 1 };
            rows.push((record.record_id.clone(), count));
        }
    }
    rows
}

pub fn generate_synthetic(spec: &SyntheticPopulationSpec) -> Result<SyntheticPopulation> {
    spec.validate()?;
    let schema = spec.schema()?;
    let gen = Generator::new(spec);
    let mut draw_rng = rng::stream(spec.seed, rng::purpose::SYNTHETIC, 0);

    let mut audience = Vec::with_capacity(spec.audience_size);
    for i in 0..spec.audience_size {
        let (values, _) = gen.draw(true, &mut draw_rng);
        audience.push(RawRecord {
            record_id: format!("A{i:07}"),
            values,
        });
    }

    let mut universe = Vec::with_capacity(spec.universe_size);
    let mut propensities = Vec::with_capacity(spec.universe_size);
    for i in 0..spec.universe_size {
        let customer_like = draw_rng.gen::<f64>() < spec.overlap_fraction;
        let (values, score) = gen.draw(customer_like, &mut draw_rng);
        propensities.push(gen.propensity(score));
        universe.push(RawRecord {
            record_id: format!("U{i:07}"),
            values,
        });
    }

    Ok(SyntheticPopulation {
        schema,
        audience,
        universe,
        propensities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SyntheticPopulationSpec {
        SyntheticPopulationSpec {
            universe_size: 500,
            audience_size: 50,
            numeric_dims: 4,
            categorical_dims: vec![3],
            separation: 2.0,
            overlap_fraction: 0.1,
            propensity_scale: 0.1,
            propensity_steepness: 1.0,
            seed: 5,
        }
    }

    #[test]
    fn sizes_match_spec() {
        let pop = generate_synthetic(&small_spec()).unwrap();
        assert_eq!(pop.audience.len(), 50);
        assert_eq!(pop.universe.len(), 500);
        assert_eq!(pop.propensities.len(), 500);
        assert_eq!(pop.schema.columns.len(), 5);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_synthetic(&small_spec()).unwrap();
        let b = generate_synthetic(&small_spec()).unwrap();
        assert_eq!(a.audience, b.audience);
        assert_eq!(a.universe, b.universe);
        assert_eq!(a.propensities, b.propensities);
        let mut other = small_spec();
        other.seed = 6;
        let c = generate_synthetic(&other).unwrap();
        assert_ne!(a.universe, c.universe);
    }

    #[test]
    fn infeasible_sizes_rejected() {
        let mut spec = small_spec();
        spec.audience_size = 500;
        assert!(generate_synthetic(&spec).is_err());
    }

    #[test]
    fn propensity_is_monotone_in_score() {
        let spec = small_spec();
        let gen = Generator::new(&spec);
        let mut last = 0.0;
        for i in 0..20 {
            let score = -3.0 + i as f64 * 0.4;
            let p = gen.propensity(score);
            assert!(p >= last);
            assert!(p > 0.0 && p <= spec.propensity_scale);
            last = p;
        }
    }

    #[test]
    fn separated_classes_have_shifted_numeric_means() {
        let spec = SyntheticPopulationSpec {
            universe_size: 4000,
            audience_size: 1000,
            numeric_dims: 2,
            categorical_dims: vec![],
            separation: 3.0,
            overlap_fraction: 0.0,
            ..small_spec()
        };
        let pop = generate_synthetic(&spec).unwrap();
        let mean_of = |records: &[RawRecord]| -> f64 {
            let mut sum = 0.0;
            for r in records {
                for v in &r.values {
                    if let RawValue::Number(x) = v {
                        sum += x;
                    }
                }
            }
            sum / (records.len() * 2) as f64
        };
        let audience_mean = mean_of(&pop.audience);
        let universe_mean = mean_of(&pop.universe);
        // Per-dimension shift is 3/sqrt(2) = 2.12.
        assert!(audience_mean - universe_mean > 1.8);
    }
}
