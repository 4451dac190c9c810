//! Candidate summary statistics and pools drawn from a fixed catalog.

mod features;

use std::collections::HashSet;
use std::sync::OnceLock;

use rand::seq::index;
use serde::{Deserialize, Serialize};

pub use features::spectrum;
use features::SeriesView;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Moment,
    Quantile,
    Autocorrelation,
    Spectral,
    MassQuantile,
    Count,
    Complexity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FftPart {
    Magnitude,
    /// Phase in degrees.
    Angle,
}

/// A parameterized scalar feature of a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "feature", rename_all = "snake_case")]
pub enum Feature {
    Mean,
    Variance,
    StandardDeviation,
    Skewness,
    Kurtosis,
    Minimum,
    Maximum,
    Median,
    Quantile { q: f64 },
    Autocorrelation { lag: usize },
    FftCoefficient { bin: usize, part: FftPart },
    IndexMassQuantile { q: f64 },
    MeanAbsChange,
    AbsoluteSumOfChanges,
    AbsEnergy,
    NumberPeaks { support: usize },
    CountAboveMean,
    CountBelowMean,
    LongestStrikeAboveMean,
    LongestStrikeBelowMean,
    ApproximateEntropy { m: usize, r: f64 },
    CidCe,
}

impl Feature {
    pub fn family(&self) -> Family {
        use Feature::*;
        match self {
            Mean | Variance | StandardDeviation | Skewness | Kurtosis | AbsEnergy => Family::Moment,
            Minimum | Maximum | Median | Quantile { .. } => Family::Quantile,
            Autocorrelation { .. } => Family::Autocorrelation,
            FftCoefficient { .. } => Family::Spectral,
            IndexMassQuantile { .. } => Family::MassQuantile,
            NumberPeaks { .. }
            | CountAboveMean
            | CountBelowMean
            | LongestStrikeAboveMean
            | LongestStrikeBelowMean => Family::Count,
            MeanAbsChange | AbsoluteSumOfChanges | ApproximateEntropy { .. } | CidCe => {
                Family::Complexity
            }
        }
    }

    /// Stable identifier, e.g. `autocorrelation__lag_3`.
    pub fn id(&self) -> String {
        use Feature::*;
        match *self {
            Mean => "mean".into(),
            Variance => "variance".into(),
            StandardDeviation => "standard_deviation".into(),
            Skewness => "skewness".into(),
            Kurtosis => "kurtosis".into(),
            Minimum => "minimum".into(),
            Maximum => "maximum".into(),
            Median => "median".into(),
            Quantile { q } => format!("quantile__q_{q}"),
            Autocorrelation { lag } => format!("autocorrelation__lag_{lag}"),
            FftCoefficient { bin, part } => format!(
                "fft_coefficient__bin_{bin}__attr_{}",
                match part {
                    FftPart::Magnitude => "abs",
                    FftPart::Angle => "angle",
                }
            ),
            IndexMassQuantile { q } => format!("index_mass_quantile__q_{q}"),
            MeanAbsChange => "mean_abs_change".into(),
            AbsoluteSumOfChanges => "absolute_sum_of_changes".into(),
            AbsEnergy => "abs_energy".into(),
            NumberPeaks { support } => format!("number_peaks__n_{support}"),
            CountAboveMean => "count_above_mean".into(),
            CountBelowMean => "count_below_mean".into(),
            LongestStrikeAboveMean => "longest_strike_above_mean".into(),
            LongestStrikeBelowMean => "longest_strike_below_mean".into(),
            ApproximateEntropy { m, r } => format!("approximate_entropy__m_{m}__r_{r}"),
            CidCe => "cid_ce".into(),
        }
    }

    fn compute(&self, v: &SeriesView<'_>) -> f64 {
        use Feature::*;
        let x = v.values;
        let out = match *self {
            Mean => v.mean(),
            Variance => v.variance(),
            StandardDeviation => v.variance().sqrt(),
            Skewness => {
                if v.is_constant() {
                    0.0
                } else {
                    v.central_moment(3) / v.variance().powf(1.5)
                }
            }
            Kurtosis => {
                if v.is_constant() {
                    0.0
                } else {
                    v.central_moment(4) / (v.variance() * v.variance()) - 3.0
                }
            }
            Minimum => v.sorted()[0],
            Maximum => v.sorted()[v.len() - 1],
            Median => features::quantile_sorted(v.sorted(), 0.5),
            Quantile { q } => features::quantile_sorted(v.sorted(), q),
            Autocorrelation { lag } => features::autocorrelation(v, lag),
            FftCoefficient { bin, part } => {
                // Real input: only bins up to the Nyquist index are distinct.
                if bin > v.len() / 2 {
                    0.0
                } else {
                    let c = v.spectrum()[bin];
                    match part {
                        FftPart::Magnitude => c.norm(),
                        FftPart::Angle => c.im.atan2(c.re).to_degrees(),
                    }
                }
            }
            IndexMassQuantile { q } => features::index_mass_quantile(x, q),
            MeanAbsChange => features::mean_abs_change(x),
            AbsoluteSumOfChanges => features::abs_sum_of_changes(x),
            AbsEnergy => x.iter().map(|a| a * a).sum(),
            NumberPeaks { support } => features::number_peaks(x, support),
            CountAboveMean => {
                let m = v.mean();
                x.iter().filter(|&&a| a > m).count() as f64
            }
            CountBelowMean => {
                let m = v.mean();
                x.iter().filter(|&&a| a < m).count() as f64
            }
            LongestStrikeAboveMean => {
                let m = v.mean();
                features::longest_strike(x, |a| a > m)
            }
            LongestStrikeBelowMean => {
                let m = v.mean();
                features::longest_strike(x, |a| a < m)
            }
            ApproximateEntropy { m, r } => features::approximate_entropy(v, m, r),
            CidCe => features::cid_ce(x),
        };
        if out.is_finite() {
            out
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStatistic {
    pub id: String,
    pub family: Family,
    #[serde(flatten)]
    pub feature: Feature,
}

impl SummaryStatistic {
    pub fn new(feature: Feature) -> Self {
        Self {
            id: feature.id(),
            family: feature.family(),
            feature,
        }
    }

    pub fn evaluate(&self, values: &[f64]) -> Result<f64> {
        check_series(values)?;
        Ok(self.feature.compute(&SeriesView::new(values)))
    }
}

fn check_series(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Input("cannot summarise an empty series".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("series contains non-finite values".into()));
    }
    Ok(())
}

const DECILES: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// The full catalog of parameterized statistics, in a fixed order.
pub fn catalog() -> &'static [SummaryStatistic] {
    static CATALOG: OnceLock<Vec<SummaryStatistic>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        use Feature::*;
        let mut f = vec![
            Mean,
            Variance,
            StandardDeviation,
            Skewness,
            Kurtosis,
            Minimum,
            Maximum,
            Median,
        ];
        f.extend(DECILES.iter().map(|&q| Quantile { q }));
        f.extend((1..=50).map(|lag| Autocorrelation { lag }));
        for part in [FftPart::Magnitude, FftPart::Angle] {
            f.extend((0..64).map(|bin| FftCoefficient { bin, part }));
        }
        f.extend(DECILES.iter().map(|&q| IndexMassQuantile { q }));
        f.extend([MeanAbsChange, AbsoluteSumOfChanges, AbsEnergy, CidCe]);
        f.extend([1, 3, 5, 10].map(|support| NumberPeaks { support }));
        f.extend([
            CountAboveMean,
            CountBelowMean,
            LongestStrikeAboveMean,
            LongestStrikeBelowMean,
        ]);
        f.extend([0.1, 0.3, 0.5].map(|r| ApproximateEntropy { m: 2, r }));
        f.into_iter().map(SummaryStatistic::new).collect()
    })
}

pub fn lookup(id: &str) -> Result<&'static SummaryStatistic> {
    catalog()
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::UnknownStatistic(id.to_string()))
}

/// Catalog listing as a JSON array of `{id, family, feature, ...params}`.
pub fn catalog_json() -> serde_json::Value {
    serde_json::to_value(catalog()).expect("catalog serializes")
}

/// An ordered set of `K >= 2` distinct statistics; the bandit's arms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticPool {
    statistics: Vec<SummaryStatistic>,
}

impl StatisticPool {
    pub fn new(statistics: Vec<SummaryStatistic>) -> Result<Self> {
        if statistics.len() < 2 {
            return Err(Error::Config(format!(
                "a pool needs at least 2 statistics, got {}",
                statistics.len()
            )));
        }
        let mut ids = HashSet::new();
        for s in &statistics {
            if !ids.insert(s.id.as_str()) {
                return Err(Error::Config(format!("duplicate statistic `{}`", s.id)));
            }
        }
        Ok(Self { statistics })
    }

    pub fn from_ids<S: AsRef<str>>(ids: &[S]) -> Result<Self> {
        let stats = ids
            .iter()
            .map(|id| lookup(id.as_ref()).cloned())
            .collect::<Result<Vec<_>>>()?;
        Self::new(stats)
    }

    pub fn len(&self) -> usize {
        self.statistics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statistics.is_empty()
    }

    pub fn statistics(&self) -> &[SummaryStatistic] {
        &self.statistics
    }

    pub fn get(&self, i: usize) -> Option<&SummaryStatistic> {
        self.statistics.get(i)
    }

    pub fn ids(&self) -> Vec<String> {
        self.statistics.iter().map(|s| s.id.clone()).collect()
    }

    /// `k` distinct pool indices drawn uniformly, in ascending order.
    pub fn random_subset(&self, k: usize, seed: u64) -> Result<Vec<usize>> {
        if k == 0 || k > self.len() {
            return Err(Error::Config(format!(
                "cannot draw {k} of {} statistics",
                self.len()
            )));
        }
        let mut rng = stream_rng(seed, Stream::Subset, k as u64);
        let mut picked = index::sample(&mut rng, self.len(), k).into_vec();
        picked.sort_unstable();
        Ok(picked)
    }

    /// Evaluates every statistic on one series, sharing intermediate work.
    pub fn evaluate(&self, values: &[f64]) -> Result<Vec<f64>> {
        check_series(values)?;
        let view = SeriesView::new(values);
        Ok(self
            .statistics
            .iter()
            .map(|s| s.feature.compute(&view))
            .collect())
    }

    /// Evaluates the statistics at `indices` only, in the given order.
    pub fn evaluate_subset(&self, values: &[f64], indices: &[usize]) -> Result<Vec<f64>> {
        check_series(values)?;
        let view = SeriesView::new(values);
        indices
            .iter()
            .map(|&i| {
                self.statistics
                    .get(i)
                    .map(|s| s.feature.compute(&view))
                    .ok_or_else(|| Error::Input(format!("statistic index {i} out of range")))
            })
            .collect()
    }
}

/// Draws `size` distinct statistics uniformly without replacement from the
/// catalog, listed in catalog order.
pub fn standard_pool(size: usize, seed: u64) -> Result<StatisticPool> {
    let all = catalog();
    if size < 2 || size > all.len() {
        return Err(Error::Config(format!(
            "pool size must be in [2, {}], got {size}",
            all.len()
        )));
    }
    let mut rng = stream_rng(seed, Stream::Pool, size as u64);
    let mut picked = index::sample(&mut rng, all.len(), size).into_vec();
    picked.sort_unstable();
    StatisticPool::new(picked.into_iter().map(|i| all[i].clone()).collect())
}

/// Evaluates one statistic on one series.
pub fn evaluate(stat: &SummaryStatistic, values: &[f64]) -> Result<f64> {
    stat.evaluate(values)
}
