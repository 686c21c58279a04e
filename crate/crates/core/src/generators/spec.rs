//! Serializable generator specifications and connectivity resampling.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::*;
use crate::kv::KvMap;
use crate::seed::derive_seed;

pub const DEFAULT_MAX_ATTEMPTS: usize = 100;

/// Network family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Sbm,
    Er,
    SmallWorld,
    PaShifted,
    PaSuperlinear,
    HolmeKim,
    KlemmEguiluz,
    SpatialSf,
    Ucm,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 9] = [
        FamilyKind::Sbm,
        FamilyKind::Er,
        FamilyKind::SmallWorld,
        FamilyKind::PaShifted,
        FamilyKind::PaSuperlinear,
        FamilyKind::HolmeKim,
        FamilyKind::KlemmEguiluz,
        FamilyKind::SpatialSf,
        FamilyKind::Ucm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Sbm => "sbm",
            FamilyKind::Er => "er",
            FamilyKind::SmallWorld => "small-world",
            FamilyKind::PaShifted => "pa-shifted",
            FamilyKind::PaSuperlinear => "pa-superlinear",
            FamilyKind::HolmeKim => "holme-kim",
            FamilyKind::KlemmEguiluz => "klemm-eguiluz",
            FamilyKind::SpatialSf => "spatial-sf",
            FamilyKind::Ucm => "ucm",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            FamilyKind::Sbm => &["m", "p", "q"],
            FamilyKind::Er => &["p"],
            FamilyKind::SmallWorld => &["lattice_degree", "p_add"],
            FamilyKind::PaShifted => &["links_per_node", "attractiveness"],
            FamilyKind::PaSuperlinear => &["links_per_node", "theta"],
            FamilyKind::HolmeKim => &["links_per_node", "p_triad"],
            FamilyKind::KlemmEguiluz => &["links_per_node", "crossover"],
            FamilyKind::SpatialSf => &["links_per_node", "r_c"],
            FamilyKind::Ucm => &["gamma", "k_min"],
        }
    }

    /// Draws a parameter set from the validation-study distribution for this family.
    pub fn sample_model<R: rand::Rng + ?Sized>(self, rng: &mut R) -> Model {
        match self {
            FamilyKind::Sbm => {
                let m = rng.random_range(2..=5);
                let p = rng.random_range(0.1..=1.0);
                let q = rng.random_range(0.01..=p);
                Model::Sbm { m, p, q }
            }
            FamilyKind::Er => Model::Er {
                p: rng.random_range(0.2..=1.0),
            },
            FamilyKind::SmallWorld => Model::SmallWorld {
                lattice_degree: [4, 8, 12][rng.random_range(0..3)],
                p_add: rng.random_range(0.0..=0.1),
            },
            FamilyKind::PaShifted => Model::PaShifted {
                links_per_node: rng.random_range(1..=5),
                attractiveness: rng.random_range(0.0..=5.0),
            },
            FamilyKind::PaSuperlinear => Model::PaSuperlinear {
                links_per_node: rng.random_range(1..=4),
                theta: rng.random_range(0.0..=3.0),
            },
            FamilyKind::HolmeKim => Model::HolmeKim {
                links_per_node: rng.random_range(1..=5),
                p_triad: rng.random_range(0.0..=1.0),
            },
            FamilyKind::KlemmEguiluz => Model::KlemmEguiluz {
                links_per_node: rng.random_range(1..=5),
                crossover: rng.random_range(0.0..=1.0),
            },
            FamilyKind::SpatialSf => Model::SpatialSf {
                links_per_node: rng.random_range(1..=5),
                // r_c must be strictly positive
                r_c: loop {
                    let r: f64 = rng.random_range(0.0..=0.2);
                    if r > 0.0 {
                        break r;
                    }
                },
            },
            FamilyKind::Ucm => Model::Ucm {
                gamma: rng.random_range(1.0..=4.0),
                k_min: rng.random_range(1..=5),
            },
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::param(format!("unknown family {s:?}")))
    }
}

/// Family-specific parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Model {
    Sbm {
        m: usize,
        p: f64,
        q: f64,
    },
    Er {
        p: f64,
    },
    SmallWorld {
        lattice_degree: usize,
        p_add: f64,
    },
    PaShifted {
        links_per_node: usize,
        attractiveness: f64,
    },
    PaSuperlinear {
        links_per_node: usize,
        theta: f64,
    },
    HolmeKim {
        links_per_node: usize,
        p_triad: f64,
    },
    KlemmEguiluz {
        links_per_node: usize,
        crossover: f64,
    },
    SpatialSf {
        links_per_node: usize,
        r_c: f64,
    },
    Ucm {
        gamma: f64,
        k_min: usize,
    },
}

impl Model {
    pub fn kind(&self) -> FamilyKind {
        match self {
            Model::Sbm { .. } => FamilyKind::Sbm,
            Model::Er { .. } => FamilyKind::Er,
            Model::SmallWorld { .. } => FamilyKind::SmallWorld,
            Model::PaShifted { .. } => FamilyKind::PaShifted,
            Model::PaSuperlinear { .. } => FamilyKind::PaSuperlinear,
            Model::HolmeKim { .. } => FamilyKind::HolmeKim,
            Model::KlemmEguiluz { .. } => FamilyKind::KlemmEguiluz,
            Model::SpatialSf { .. } => FamilyKind::SpatialSf,
            Model::Ucm { .. } => FamilyKind::Ucm,
        }
    }

    /// `(key, value)` pairs in canonical order.
    pub fn params(&self) -> Vec<(&'static str, String)> {
        let keys = self.kind().keys();
        let values: Vec<String> = match *self {
            Model::Sbm { m, p, q } => vec![m.to_string(), p.to_string(), q.to_string()],
            Model::Er { p } => vec![p.to_string()],
            Model::SmallWorld {
                lattice_degree,
                p_add,
            } => {
                vec![lattice_degree.to_string(), p_add.to_string()]
            }
            Model::PaShifted {
                links_per_node,
                attractiveness,
            } => {
                vec![links_per_node.to_string(), attractiveness.to_string()]
            }
            Model::PaSuperlinear {
                links_per_node,
                theta,
            } => {
                vec![links_per_node.to_string(), theta.to_string()]
            }
            Model::HolmeKim {
                links_per_node,
                p_triad,
            } => {
                vec![links_per_node.to_string(), p_triad.to_string()]
            }
            Model::KlemmEguiluz {
                links_per_node,
                crossover,
            } => {
                vec![links_per_node.to_string(), crossover.to_string()]
            }
            Model::SpatialSf {
                links_per_node,
                r_c,
            } => {
                vec![links_per_node.to_string(), r_c.to_string()]
            }
            Model::Ucm { gamma, k_min } => vec![gamma.to_string(), k_min.to_string()],
        };
        keys.iter().copied().zip(values).collect()
    }
}

/// A family, its parameters, a node count and a seed: everything needed to
/// reproduce one graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub model: Model,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(n: usize, model: Model, seed: u64) -> Result<Self> {
        let spec = Self { n, model, seed };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks structural preconditions of the family's generator.
    pub fn validate(&self) -> Result<()> {
        check_nodes(self.n)?;
        let links = |name: &str, l: usize, max: usize| -> Result<()> {
            if (1..=max).contains(&l) && self.n > l {
                Ok(())
            } else {
                Err(Error::param(format!(
                    "{name}: links_per_node = {l} must lie in [1, {max}] and below n"
                )))
            }
        };
        match self.model {
            Model::Sbm { m, p, q } => SbmParams { n: self.n, m, p, q }.validate(),
            Model::Er { p } => check_probability("p", p),
            Model::SmallWorld {
                lattice_degree,
                p_add,
            } => {
                check_probability("p_add", p_add)?;
                if lattice_degree < 2 || lattice_degree % 2 == 1 || lattice_degree >= self.n {
                    return Err(Error::param(format!(
                        "lattice_degree = {lattice_degree} must be even, >= 2 and below n"
                    )));
                }
                Ok(())
            }
            Model::PaShifted {
                links_per_node,
                attractiveness,
            } => {
                links("pa-shifted", links_per_node, 5)?;
                if !(attractiveness >= 0.0 && attractiveness.is_finite()) {
                    return Err(Error::param("attractiveness must be finite and >= 0"));
                }
                Ok(())
            }
            Model::PaSuperlinear {
                links_per_node,
                theta,
            } => {
                links("pa-superlinear", links_per_node, 4)?;
                if !(0.0..=3.0).contains(&theta) {
                    return Err(Error::param("theta must lie in [0, 3]"));
                }
                Ok(())
            }
            Model::HolmeKim {
                links_per_node,
                p_triad,
            } => {
                links("holme-kim", links_per_node, 5)?;
                check_probability("p_triad", p_triad)
            }
            Model::KlemmEguiluz {
                links_per_node,
                crossover,
            } => {
                links("klemm-eguiluz", links_per_node, 5)?;
                check_probability("crossover", crossover)
            }
            Model::SpatialSf {
                links_per_node,
                r_c,
            } => {
                links("spatial-sf", links_per_node, usize::MAX)?;
                if !(r_c > 0.0 && r_c.is_finite()) {
                    return Err(Error::param("r_c must be positive and finite"));
                }
                Ok(())
            }
            Model::Ucm { gamma, k_min } => {
                if !(1.0..=4.0).contains(&gamma) {
                    return Err(Error::param("gamma must lie in [1, 4]"));
                }
                if k_min < 1 || k_min > ucm::ucm_cutoff(self.n) {
                    return Err(Error::param(format!(
                        "k_min = {k_min} must lie in [1, floor(sqrt(n))]"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn generate(&self) -> Result<Graph> {
        self.generate_with_seed(self.seed)
    }

    fn generate_with_seed(&self, seed: u64) -> Result<Graph> {
        let n = self.n;
        match self.model {
            Model::Sbm { m, p, q } => gen_sbm(SbmParams::new(n, m, p, q)?, seed),
            Model::Er { p } => gen_er(n, p, seed),
            Model::SmallWorld {
                lattice_degree,
                p_add,
            } => gen_small_world(n, lattice_degree, p_add, seed),
            Model::PaShifted {
                links_per_node,
                attractiveness,
            } => gen_pa_shifted(n, links_per_node, attractiveness, seed),
            Model::PaSuperlinear {
                links_per_node,
                theta,
            } => gen_pa_superlinear(n, links_per_node, theta, seed),
            Model::HolmeKim {
                links_per_node,
                p_triad,
            } => gen_holme_kim(n, links_per_node, p_triad, seed),
            Model::KlemmEguiluz {
                links_per_node,
                crossover,
            } => gen_klemm_eguiluz(n, links_per_node, crossover, seed),
            Model::SpatialSf {
                links_per_node,
                r_c,
            } => gen_spatial_sf(n, links_per_node, r_c, seed),
            Model::Ucm { gamma, k_min } => gen_ucm(n, gamma, k_min, seed),
        }
    }

    pub fn to_kv(&self) -> KvMap {
        let mut kv = KvMap::default();
        kv.set("family", self.model.kind().name());
        kv.set("n", self.n.to_string());
        for (k, v) in self.model.params() {
            kv.set(k, v);
        }
        kv.set("seed", self.seed.to_string());
        kv
    }

    pub fn to_kv_string(&self) -> String {
        self.to_kv().to_text()
    }

    pub fn from_kv(kv: &KvMap) -> Result<Self> {
        let kind: FamilyKind = kv.require::<String>("family")?.parse()?;
        let mut allowed = vec!["family", "n", "seed"];
        allowed.extend_from_slice(kind.keys());
        kv.check_keys(&allowed)?;
        let n = kv.require("n")?;
        let seed = kv.parsed_or("seed", 0u64)?;
        let model = match kind {
            FamilyKind::Sbm => Model::Sbm {
                m: kv.require("m")?,
                p: kv.require("p")?,
                q: kv.require("q")?,
            },
            FamilyKind::Er => Model::Er {
                p: kv.require("p")?,
            },
            FamilyKind::SmallWorld => Model::SmallWorld {
                lattice_degree: kv.require("lattice_degree")?,
                p_add: kv.require("p_add")?,
            },
            FamilyKind::PaShifted => Model::PaShifted {
                links_per_node: kv.require("links_per_node")?,
                attractiveness: kv.require("attractiveness")?,
            },
            FamilyKind::PaSuperlinear => Model::PaSuperlinear {
                links_per_node: kv.require("links_per_node")?,
                theta: kv.require("theta")?,
            },
            FamilyKind::HolmeKim => Model::HolmeKim {
                links_per_node: kv.require("links_per_node")?,
                p_triad: kv.require("p_triad")?,
            },
            FamilyKind::KlemmEguiluz => Model::KlemmEguiluz {
                links_per_node: kv.require("links_per_node")?,
                crossover: kv.require("crossover")?,
            },
            FamilyKind::SpatialSf => Model::SpatialSf {
                links_per_node: kv.require("links_per_node")?,
                r_c: kv.require("r_c")?,
            },
            FamilyKind::Ucm => Model::Ucm {
                gamma: kv.require("gamma")?,
                k_min: kv.require("k_min")?,
            },
        };
        Self::new(n, model, seed)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_kv(&KvMap::parse(text)?)
    }
}

/// A connected draw and the number of attempts it took.
#[derive(Debug, Clone)]
pub struct Connected {
    pub graph: Graph,
    pub attempts: usize,
}

/// Draws until connected; attempt `i` uses sub-seed `(spec.seed, i)`.
pub fn ensure_connected(spec: &GeneratorSpec, max_attempts: usize) -> Result<Connected> {
    if max_attempts == 0 {
        return Err(Error::param("max_attempts must be >= 1"));
    }
    spec.validate()?;
    let mut last_sizes = Vec::new();
    for attempt in 0..max_attempts {
        let seed = derive_seed(spec.seed, "attempt", &[attempt as u64]);
        let graph = spec.generate_with_seed(seed)?;
        let sizes = graph.component_sizes();
        if sizes.len() == 1 {
            return Ok(Connected {
                graph,
                attempts: attempt + 1,
            });
        }
        last_sizes = sizes;
    }
    let shown: Vec<usize> = last_sizes.iter().copied().take(10).collect();
    Err(Error::AttemptsExhausted {
        attempts: max_attempts,
        detail: format!(
            "last draw had {} components (largest sizes {:?})",
            last_sizes.len(),
            shown
        ),
    })
}
