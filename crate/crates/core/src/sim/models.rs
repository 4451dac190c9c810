//! Built-in reaction networks.

use super::network::{PropensityKind, Reaction, ReactionNetwork, Species};
use crate::error::{Error, Result};

pub const MODEL_NAMES: [&str; 4] = [
    "vilar_oscillator",
    "birth_death",
    "dimerization",
    "lotka_volterra",
];

/// Rate constants producing sustained noisy oscillations in the Vilar
/// circadian network, in [`vilar_oscillator`] parameter order.
pub const VILAR_TRUE_THETA: [f64; 15] = [
    50.0, 500.0, 0.01, 50.0, 50.0, 5.0, 10.0, 0.5, 1.0, 0.2, 1.0, 1.0, 2.0, 50.0, 100.0,
];

pub fn builtin_model(name: &str) -> Result<ReactionNetwork> {
    match name {
        "vilar_oscillator" => Ok(vilar_oscillator()),
        "birth_death" => Ok(birth_death()),
        "dimerization" => Ok(dimerization()),
        "lotka_volterra" => Ok(lotka_volterra()),
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

struct Builder {
    species: Vec<Species>,
    params: Vec<String>,
    reactions: Vec<Reaction>,
}

impl Builder {
    fn new(species: &[(&str, u64)], params: &[&str]) -> Self {
        Self {
            species: species
                .iter()
                .map(|&(name, initial)| Species {
                    name: name.to_string(),
                    initial,
                })
                .collect(),
            params: params.iter().map(|p| p.to_string()).collect(),
            reactions: Vec::new(),
        }
    }

    fn sp(&self, name: &str) -> usize {
        self.species
            .iter()
            .position(|s| s.name == name)
            .expect("species")
    }

    fn rx(mut self, name: &str, rate: &str, reactants: &[&str], products: &[&str]) -> Self {
        let rate = self
            .params
            .iter()
            .position(|p| p == rate)
            .expect("parameter");
        let tally = |names: &[&str]| {
            let mut v: Vec<(usize, u32)> = Vec::new();
            for n in names {
                let i = self.sp(n);
                match v.iter_mut().find(|(s, _)| *s == i) {
                    Some(e) => e.1 += 1,
                    None => v.push((i, 1)),
                }
            }
            v
        };
        let reactants = tally(reactants);
        let products = tally(products);
        let kind = match reactants.iter().map(|&(_, n)| n).sum::<u32>() {
            0 => PropensityKind::Zeroth,
            1 => PropensityKind::First,
            _ => PropensityKind::Second,
        };
        self.reactions.push(Reaction {
            name: name.to_string(),
            rate,
            reactants,
            products,
            kind,
        });
        self
    }

    fn build(self, name: &str, observable: &str) -> ReactionNetwork {
        let obs = self.sp(observable);
        ReactionNetwork::new(name, self.species, self.params, self.reactions, obs)
            .expect("built-in model is well formed")
    }
}

/// Genetic oscillator of Vilar, Kueh, Barkai and Leibler (2002): an
/// activator `A` and repressor `R`, their mRNAs, free and bound promoters,
/// and the inactive complex `C`. Observes `C` by default.
pub fn vilar_oscillator() -> ReactionNetwork {
    Builder::new(
        &[
            ("D_A", 1),
            ("D_R", 1),
            ("D_A_bound", 0),
            ("D_R_bound", 0),
            ("M_A", 0),
            ("M_R", 0),
            ("A", 0),
            ("R", 0),
            ("C", 0),
        ],
        &[
            "alpha_A",
            "alpha_A_prime",
            "alpha_R",
            "alpha_R_prime",
            "beta_A",
            "beta_R",
            "delta_MA",
            "delta_MR",
            "delta_A",
            "delta_R",
            "gamma_A",
            "gamma_R",
            "gamma_C",
            "theta_A",
            "theta_R",
        ],
    )
    .rx(
        "activator_binds_D_A",
        "gamma_A",
        &["A", "D_A"],
        &["D_A_bound"],
    )
    .rx(
        "activator_leaves_D_A",
        "theta_A",
        &["D_A_bound"],
        &["A", "D_A"],
    )
    .rx(
        "activator_binds_D_R",
        "gamma_R",
        &["A", "D_R"],
        &["D_R_bound"],
    )
    .rx(
        "activator_leaves_D_R",
        "theta_R",
        &["D_R_bound"],
        &["A", "D_R"],
    )
    .rx("transcribe_A_basal", "alpha_A", &["D_A"], &["D_A", "M_A"])
    .rx(
        "transcribe_A_active",
        "alpha_A_prime",
        &["D_A_bound"],
        &["D_A_bound", "M_A"],
    )
    .rx("transcribe_R_basal", "alpha_R", &["D_R"], &["D_R", "M_R"])
    .rx(
        "transcribe_R_active",
        "alpha_R_prime",
        &["D_R_bound"],
        &["D_R_bound", "M_R"],
    )
    .rx("translate_A", "beta_A", &["M_A"], &["M_A", "A"])
    .rx("translate_R", "beta_R", &["M_R"], &["M_R", "R"])
    .rx("complex_formation", "gamma_C", &["A", "R"], &["C"])
    .rx("complex_releases_R", "delta_A", &["C"], &["R"])
    .rx("degrade_A", "delta_A", &["A"], &[])
    .rx("degrade_R", "delta_R", &["R"], &[])
    .rx("degrade_M_A", "delta_MA", &["M_A"], &[])
    .rx("degrade_M_R", "delta_MR", &["M_R"], &[])
    .build("vilar_oscillator", "C")
}

/// `0 -> X` at rate `lambda`, `X -> 0` at rate `mu * X`.
pub fn birth_death() -> ReactionNetwork {
    Builder::new(&[("X", 0)], &["lambda", "mu"])
        .rx("birth", "lambda", &[], &["X"])
        .rx("death", "mu", &["X"], &[])
        .build("birth_death", "X")
}

/// `2 M <-> D`.
pub fn dimerization() -> ReactionNetwork {
    Builder::new(&[("M", 100), ("D", 0)], &["k_bind", "k_unbind"])
        .rx("bind", "k_bind", &["M", "M"], &["D"])
        .rx("unbind", "k_unbind", &["D"], &["M", "M"])
        .build("dimerization", "D")
}

/// Stochastic predator-prey: prey birth, predation, predator death.
pub fn lotka_volterra() -> ReactionNetwork {
    Builder::new(
        &[("prey", 50), ("predator", 100)],
        &["c_birth", "c_predation", "c_death"],
    )
    .rx("prey_birth", "c_birth", &["prey"], &["prey", "prey"])
    .rx(
        "predation",
        "c_predation",
        &["prey", "predator"],
        &["predator", "predator"],
    )
    .rx("predator_death", "c_death", &["predator"], &[])
    .build("lotka_volterra", "prey")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(name: &str) -> (usize, usize, usize) {
        let n = builtin_model(name).unwrap();
        (n.n_species(), n.n_reactions(), n.n_parameters())
    }

    #[test]
    fn builtin_shapes() {
        assert_eq!(shape("birth_death"), (1, 2, 2));
        assert_eq!(shape("lotka_volterra"), (2, 3, 3));
        assert_eq!(shape("dimerization"), (2, 2, 2));
        assert_eq!(shape("vilar_oscillator"), (9, 16, 15));
    }

    #[test]
    fn vilar_parameter_order() {
        let n = vilar_oscillator();
        assert_eq!(n.parameter_names[0], "alpha_A");
        assert_eq!(n.parameter_names[1], "alpha_A_prime");
        assert_eq!(n.parameter_names[13], "theta_A");
        assert_eq!(n.parameter_names[14], "theta_R");
        assert_eq!(n.species[n.observable].name, "C");
        // every parameter drives at least one reaction
        for p in 0..n.n_parameters() {
            assert!(
                n.reactions.iter().any(|r| r.rate == p),
                "{}",
                n.parameter_names[p]
            );
        }
    }

    #[test]
    fn unknown_model() {
        assert!(matches!(builtin_model("nope"), Err(Error::UnknownModel(_))));
    }
}
