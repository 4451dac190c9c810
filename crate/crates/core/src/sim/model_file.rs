//! TOML model-definition documents.
//!
//! ```toml
//! name = "birth_death"
//! observable = "X"
//! parameters = ["lambda", "mu"]
//!
//! [[species]]
//! name = "X"
//! initial = 0
//!
//! [[reactions]]
//! name = "birth"
//! rate = "lambda"
//! products = { X = 1 }
//! kind = "zeroth"
//!
//! [[reactions]]
//! name = "death"
//! rate = "mu"
//! reactants = { X = 1 }
//! kind = "first"
//! ```
//!
//! Regulated reactions use `kind = "hill"` together with
//! `hill = { regulator = "X", half_max = 20.0, coefficient = 2.0, repressive = false }`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::network::{HillTerm, PropensityKind, Reaction, ReactionNetwork, Species};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub name: String,
    pub observable: String,
    pub parameters: Vec<String>,
    pub species: Vec<SpeciesEntry>,
    pub reactions: Vec<ReactionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesEntry {
    pub name: String,
    pub initial: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactionEntry {
    pub name: String,
    pub rate: String,
    #[serde(default)]
    pub reactants: BTreeMap<String, u32>,
    #[serde(default)]
    pub products: BTreeMap<String, u32>,
    pub kind: KindEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hill: Option<HillEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindEntry {
    Zeroth,
    First,
    Second,
    Hill,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HillEntry {
    pub regulator: String,
    pub half_max: f64,
    pub coefficient: f64,
    #[serde(default)]
    pub repressive: bool,
}

impl ModelDocument {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model documents always serialize")
    }

    pub fn from_network(net: &ReactionNetwork) -> Self {
        let names = |v: &[(usize, u32)]| {
            v.iter()
                .map(|&(s, n)| (net.species[s].name.clone(), n))
                .collect::<BTreeMap<_, _>>()
        };
        Self {
            name: net.name.clone(),
            observable: net.species[net.observable].name.clone(),
            parameters: net.parameter_names.clone(),
            species: net
                .species
                .iter()
                .map(|s| SpeciesEntry {
                    name: s.name.clone(),
                    initial: s.initial,
                })
                .collect(),
            reactions: net
                .reactions
                .iter()
                .map(|r| {
                    let (kind, hill) = match r.kind {
                        PropensityKind::Zeroth => (KindEntry::Zeroth, None),
                        PropensityKind::First => (KindEntry::First, None),
                        PropensityKind::Second => (KindEntry::Second, None),
                        PropensityKind::Hill(h) => (
                            KindEntry::Hill,
                            Some(HillEntry {
                                regulator: net.species[h.regulator].name.clone(),
                                half_max: h.half_max,
                                coefficient: h.coefficient,
                                repressive: h.repressive,
                            }),
                        ),
                    };
                    ReactionEntry {
                        name: r.name.clone(),
                        rate: net.parameter_names[r.rate].clone(),
                        reactants: names(&r.reactants),
                        products: names(&r.products),
                        kind,
                        hill,
                    }
                })
                .collect(),
        }
    }

    pub fn build(&self) -> Result<ReactionNetwork> {
        let species_idx = |name: &str| {
            self.species
                .iter()
                .position(|s| s.name == name)
                .ok_or_else(|| Error::Model(format!("unknown species `{name}`")))
        };
        let counts = |m: &BTreeMap<String, u32>| -> Result<Vec<(usize, u32)>> {
            m.iter()
                .filter(|(_, &n)| n > 0)
                .map(|(s, &n)| Ok((species_idx(s)?, n)))
                .collect()
        };
        let mut reactions = Vec::with_capacity(self.reactions.len());
        for r in &self.reactions {
            let rate = self
                .parameters
                .iter()
                .position(|p| *p == r.rate)
                .ok_or_else(|| Error::Model(format!("unknown parameter `{}`", r.rate)))?;
            let kind = match (r.kind, &r.hill) {
                (KindEntry::Zeroth, None) => PropensityKind::Zeroth,
                (KindEntry::First, None) => PropensityKind::First,
                (KindEntry::Second, None) => PropensityKind::Second,
                (KindEntry::Hill, Some(h)) => PropensityKind::Hill(HillTerm {
                    regulator: species_idx(&h.regulator)?,
                    half_max: h.half_max,
                    coefficient: h.coefficient,
                    repressive: h.repressive,
                }),
                (KindEntry::Hill, None) => {
                    return Err(Error::Model(format!(
                        "reaction `{}` needs a `hill` table",
                        r.name
                    )))
                }
                (_, Some(_)) => {
                    return Err(Error::Model(format!(
                        "reaction `{}` has a `hill` table but kind {:?}",
                        r.name, r.kind
                    )))
                }
            };
            reactions.push(Reaction {
                name: r.name.clone(),
                rate,
                reactants: counts(&r.reactants)?,
                products: counts(&r.products)?,
                kind,
            });
        }
        let species = self
            .species
            .iter()
            .map(|s| Species {
                name: s.name.clone(),
                initial: s.initial,
            })
            .collect();
        ReactionNetwork::new(
            self.name.clone(),
            species,
            self.parameters.clone(),
            reactions,
            species_idx(&self.observable)?,
        )
    }
}
