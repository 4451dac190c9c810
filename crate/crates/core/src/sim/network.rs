use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub name: String,
    pub initial: u64,
}

/// Saturating regulation term `x^n / (h^n + x^n)` (or its complement when
/// repressive), where `x` is the count of the regulator species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HillTerm {
    pub regulator: usize,
    pub half_max: f64,
    pub coefficient: f64,
    pub repressive: bool,
}

impl HillTerm {
    fn factor(&self, count: f64) -> f64 {
        let xn = count.powf(self.coefficient);
        let hn = self.half_max.powf(self.coefficient);
        let denom = hn + xn;
        if denom == 0.0 {
            // x = 0 and h = 0: activation is off, repression is fully on.
            return if self.repressive { 1.0 } else { 0.0 };
        }
        if self.repressive {
            hn / denom
        } else {
            xn / denom
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropensityKind {
    Zeroth,
    First,
    Second,
    Hill(HillTerm),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reaction {
    pub name: String,
    /// Index into the parameter vector holding this reaction's rate constant.
    pub rate: usize,
    pub reactants: Vec<(usize, u32)>,
    pub products: Vec<(usize, u32)>,
    pub kind: PropensityKind,
}

impl Reaction {
    fn order(&self) -> u32 {
        self.reactants.iter().map(|&(_, n)| n).sum()
    }

    /// Mass-action propensity: rate times the number of distinct reactant
    /// combinations, with an extra Hill factor for regulated reactions.
    #[inline]
    pub(crate) fn propensity(&self, rate: f64, state: &[i64]) -> f64 {
        let mut a = rate;
        for &(s, n) in &self.reactants {
            let x = state[s];
            match n {
                1 => a *= x as f64,
                2 => a *= (x * (x - 1)) as f64 * 0.5,
                _ => {
                    let mut c = 1.0;
                    for i in 0..n as i64 {
                        c *= (x - i).max(0) as f64 / (i + 1) as f64;
                    }
                    a *= c;
                }
            }
        }
        if let PropensityKind::Hill(h) = self.kind {
            a *= h.factor(state[h.regulator] as f64);
        }
        a
    }
}

/// An immutable reaction network with a designated observable species.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReactionNetwork {
    pub name: String,
    pub species: Vec<Species>,
    pub reactions: Vec<Reaction>,
    pub parameter_names: Vec<String>,
    pub observable: usize,
    /// Net state change per reaction, sparse.
    #[serde(skip)]
    deltas: Vec<Vec<(usize, i64)>>,
    /// For each reaction, the reactions whose propensity must be recomputed
    /// after it fires.
    #[serde(skip)]
    dependents: Vec<Vec<usize>>,
}

impl ReactionNetwork {
    pub fn new(
        name: impl Into<String>,
        species: Vec<Species>,
        parameter_names: Vec<String>,
        reactions: Vec<Reaction>,
        observable: usize,
    ) -> Result<Self> {
        let n_species = species.len();
        if n_species == 0 {
            return Err(Error::Model("network has no species".into()));
        }
        if observable >= n_species {
            return Err(Error::Model(format!(
                "observable index {observable} out of range for {n_species} species"
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for s in &species {
            if !seen.insert(s.name.as_str()) {
                return Err(Error::Model(format!("duplicate species `{}`", s.name)));
            }
        }
        for r in &reactions {
            if r.rate >= parameter_names.len() {
                return Err(Error::Model(format!(
                    "reaction `{}` refers to missing parameter {}",
                    r.name, r.rate
                )));
            }
            let in_range = |&(s, _): &(usize, u32)| s < n_species;
            if !r.reactants.iter().all(in_range) || !r.products.iter().all(in_range) {
                return Err(Error::Model(format!(
                    "reaction `{}` refers to a missing species",
                    r.name
                )));
            }
            let order = r.order();
            let consistent = match r.kind {
                PropensityKind::Zeroth => order == 0,
                PropensityKind::First => order == 1,
                PropensityKind::Second => order == 2,
                PropensityKind::Hill(h) => {
                    h.regulator < n_species && h.half_max >= 0.0 && h.coefficient > 0.0
                }
            };
            if !consistent {
                return Err(Error::Model(format!(
                    "reaction `{}` has propensity kind {:?} but reactant order {order}",
                    r.name, r.kind
                )));
            }
        }

        let mut net = Self {
            name: name.into(),
            species,
            reactions,
            parameter_names,
            observable,
            deltas: Vec::new(),
            dependents: Vec::new(),
        };
        net.index();
        Ok(net)
    }

    fn index(&mut self) {
        let n = self.species.len();
        self.deltas = self
            .reactions
            .iter()
            .map(|r| {
                let mut d = vec![0i64; n];
                for &(s, c) in &r.reactants {
                    d[s] -= c as i64;
                }
                for &(s, c) in &r.products {
                    d[s] += c as i64;
                }
                d.into_iter().enumerate().filter(|&(_, v)| v != 0).collect()
            })
            .collect();

        let reads: Vec<Vec<usize>> = self
            .reactions
            .iter()
            .map(|r| {
                let mut v: Vec<usize> = r.reactants.iter().map(|&(s, _)| s).collect();
                if let PropensityKind::Hill(h) = r.kind {
                    v.push(h.regulator);
                }
                v
            })
            .collect();
        self.dependents = self
            .deltas
            .iter()
            .map(|delta| {
                (0..self.reactions.len())
                    .filter(|&j| reads[j].iter().any(|s| delta.iter().any(|&(c, _)| c == *s)))
                    .collect()
            })
            .collect();
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    pub fn n_reactions(&self) -> usize {
        self.reactions.len()
    }

    pub fn n_parameters(&self) -> usize {
        self.parameter_names.len()
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s.name == name)
    }

    /// Returns a copy observing a different species.
    pub fn with_observable(mut self, name: &str) -> Result<Self> {
        self.observable = self
            .species_index(name)
            .ok_or_else(|| Error::Model(format!("unknown species `{name}`")))?;
        Ok(self)
    }

    pub fn initial_state(&self) -> Vec<i64> {
        self.species.iter().map(|s| s.initial as i64).collect()
    }

    pub(crate) fn delta(&self, reaction: usize) -> &[(usize, i64)] {
        &self.deltas[reaction]
    }

    pub(crate) fn dependents(&self, reaction: usize) -> &[usize] {
        &self.dependents[reaction]
    }

    pub fn validate_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_parameters() {
            return Err(Error::Input(format!(
                "theta has {} entries, `{}` expects {}",
                theta.len(),
                self.name,
                self.n_parameters()
            )));
        }
        if let Some((i, v)) = theta
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::Input(format!(
                "parameter `{}` = {v} must be finite and non-negative",
                self.parameter_names[i]
            )));
        }
        Ok(())
    }
}
