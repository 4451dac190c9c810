use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// Independent uniform box, or a uniform distribution over a finite set of
/// parameter vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Prior {
    Uniform { lower: Vec<f64>, upper: Vec<f64> },
    Grid { points: Vec<Vec<f64>> },
}

impl Prior {
    pub fn uniform(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let p = Prior::Uniform { lower, upper };
        p.validate()?;
        Ok(p)
    }

    pub fn grid(points: Vec<Vec<f64>>) -> Result<Self> {
        let p = Prior::Grid { points };
        p.validate()?;
        Ok(p)
    }

    /// Search box for the Vilar oscillator's 15 rate constants.
    pub fn vilar() -> Self {
        let bounds: [(f64, f64); 15] = [
            (30.0, 70.0),
            (200.0, 600.0),
            (0.0, 1.0),
            (30.0, 70.0),
            (30.0, 70.0),
            (1.0, 10.0),
            (1.0, 12.0),
            (0.0, 1.0),
            (0.0, 2.0),
            (0.0, 0.5),
            (0.5, 1.5),
            (0.5, 1.5),
            (1.0, 3.0),
            (30.0, 70.0),
            (80.0, 120.0),
        ];
        Prior::Uniform {
            lower: bounds.iter().map(|b| b.0).collect(),
            upper: bounds.iter().map(|b| b.1).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Prior::Uniform { lower, upper } => {
                if lower.is_empty() || lower.len() != upper.len() {
                    return Err(Error::Config(format!(
                        "prior bounds have lengths {} and {}",
                        lower.len(),
                        upper.len()
                    )));
                }
                for (i, (lo, hi)) in lower.iter().zip(upper).enumerate() {
                    if !lo.is_finite() || !hi.is_finite() || lo > hi {
                        return Err(Error::Config(format!(
                            "invalid bounds [{lo}, {hi}] for dimension {i}"
                        )));
                    }
                }
            }
            Prior::Grid { points } => {
                let dim = points.first().map(Vec::len).unwrap_or(0);
                if dim == 0 || points.iter().any(|p| p.len() != dim) {
                    return Err(Error::Config(
                        "grid prior needs equal-length, non-empty points".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Prior::Uniform { lower, .. } => lower.len(),
            Prior::Grid { points } => points[0].len(),
        }
    }

    pub fn sample(&self, rng: &mut StreamRng) -> Vec<f64> {
        match self {
            Prior::Uniform { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(&lo, &hi)| if lo == hi { lo } else { rng.gen_range(lo..=hi) })
                .collect(),
            Prior::Grid { points } => points[rng.gen_range(0..points.len())].clone(),
        }
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        match self {
            Prior::Uniform { lower, upper } => {
                theta.len() == lower.len()
                    && theta
                        .iter()
                        .zip(lower.iter().zip(upper))
                        .all(|(t, (lo, hi))| lo <= t && t <= hi)
            }
            Prior::Grid { points } => points.iter().any(|p| p.as_slice() == theta),
        }
    }

    /// Box midpoints (uniform) or the grid's centroid.
    pub fn midpoint(&self) -> Vec<f64> {
        match self {
            Prior::Uniform { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(lo, hi)| 0.5 * (lo + hi))
                .collect(),
            Prior::Grid { points } => {
                let n = points.len() as f64;
                (0..self.dim())
                    .map(|d| points.iter().map(|p| p[d]).sum::<f64>() / n)
                    .collect()
            }
        }
    }
}

/// One draw from `prior` using a generator seeded with `seed`.
pub fn sample_prior(prior: &Prior, seed: u64) -> Vec<f64> {
    use rand::SeedableRng;
    prior.sample(&mut StreamRng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_box_returns_the_point() {
        let p = Prior::uniform(vec![1.5, -2.0], vec![1.5, -2.0]).unwrap();
        assert_eq!(sample_prior(&p, 3), vec![1.5, -2.0]);
    }

    #[test]
    fn vilar_draws_stay_in_box() {
        let p = Prior::vilar();
        assert_eq!(p.dim(), 15);
        for s in 0..200 {
            let t = sample_prior(&p, s);
            assert!(p.contains(&t));
            assert!((30.0..=70.0).contains(&t[0]));
            assert!((80.0..=120.0).contains(&t[14]));
        }
    }

    #[test]
    fn invalid_priors() {
        assert!(Prior::uniform(vec![1.0], vec![0.0]).is_err());
        assert!(Prior::uniform(vec![1.0], vec![]).is_err());
        assert!(Prior::grid(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(Prior::grid(vec![]).is_err());
    }

    #[test]
    fn grid_samples_from_points() {
        let p = Prior::grid(vec![vec![0.5], vec![1.0], vec![2.0]]).unwrap();
        for s in 0..50 {
            assert!(p.contains(&sample_prior(&p, s)));
        }
        assert!((p.midpoint()[0] - 3.5 / 3.0).abs() < 1e-15);
    }
}
