use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::FamilyKind;
use crate::kv::KvMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SweepN,
    SweepPEr,
    SweepQSbm,
    Families,
    AnalyzeFile,
    Simulate,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::SweepN,
        ExperimentKind::SweepPEr,
        ExperimentKind::SweepQSbm,
        ExperimentKind::Families,
        ExperimentKind::AnalyzeFile,
        ExperimentKind::Simulate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SweepN => "sweep-n",
            ExperimentKind::SweepPEr => "sweep-p-er",
            ExperimentKind::SweepQSbm => "sweep-q-sbm",
            ExperimentKind::Families => "families",
            ExperimentKind::AnalyzeFile => "analyze-file",
            ExperimentKind::Simulate => "simulate",
        }
    }

    /// Every accepted key with its default, in echo order.
    pub fn defaults(self) -> Vec<(&'static str, String)> {
        let grid = |lo: usize, hi: usize, step: usize, scale: f64| {
            (lo..=hi)
                .step_by(step)
                .map(|i| format!("{}", i as f64 / scale))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut d: Vec<(&'static str, String)> = match self {
            ExperimentKind::SweepN => vec![
                ("replicates", "20".into()),
                ("n_grid", grid(20, 300, 20, 1.0)),
                ("m", "3".into()),
                ("p", "0.7".into()),
                ("q", "0.1".into()),
                ("max_attempts", "100".into()),
            ],
            ExperimentKind::SweepPEr => vec![
                ("replicates", "20".into()),
                ("n", "100".into()),
                ("p_grid", grid(5, 100, 5, 100.0)),
                ("max_attempts", "100".into()),
            ],
            ExperimentKind::SweepQSbm => vec![
                ("replicates", "20".into()),
                ("n", "100".into()),
                ("p", "0.8".into()),
                ("m_list", "2,4".into()),
                ("q_grid", format!("0.005,{}", grid(1, 60, 1, 100.0))),
                ("intercept_points", "4".into()),
                ("max_attempts", "100".into()),
            ],
            ExperimentKind::Families => vec![
                ("replicates", "50".into()),
                (
                    "families",
                    FamilyKind::ALL
                        .iter()
                        .map(|f| f.name())
                        .collect::<Vec<_>>()
                        .join(","),
                ),
                ("n_min", "100".into()),
                ("n_max", "500".into()),
                ("max_attempts", "20".into()),
                ("param_redraws", "20".into()),
            ],
            ExperimentKind::AnalyzeFile => vec![
                ("graph", String::new()),
                ("game", "1,-1,2,0".into()),
                ("exact_max_nodes", "5000".into()),
            ],
            ExperimentKind::Simulate => vec![
                ("graph", String::new()),
                ("spec", String::new()),
                ("b", "2".into()),
                ("c", "1".into()),
                ("delta", "0.01".into()),
                ("trials", "100000".into()),
                ("placement", "uniform".into()),
            ],
        };
        d.insert(0, ("seed", "1".into()));
        d
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::param(format!("unknown experiment {s:?}")))
    }
}

/// Fully resolved settings: defaults, then the config file, then overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    values: KvMap,
}

impl ExperimentConfig {
    pub fn resolve(
        kind: ExperimentKind,
        file: Option<&KvMap>,
        overrides: &[(String, String)],
    ) -> Result<Self> {
        let defaults = kind.defaults();
        let allowed: Vec<&str> = defaults.iter().map(|(k, _)| *k).collect();
        let mut values = KvMap::default();
        for (k, v) in &defaults {
            values.set(k, v.clone());
        }
        if let Some(file) = file {
            file.check_keys(&allowed)?;
            for k in file.keys() {
                values.set(k, file.get(k).unwrap_or_default());
            }
        }
        for (k, v) in overrides {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::param(format!("unknown key {k:?} for {kind}")));
            }
            values.set(k, v.clone());
        }
        let config = Self { kind, values };
        config.validate()?;
        Ok(config)
    }

    pub fn defaults(kind: ExperimentKind) -> Result<Self> {
        Self::resolve(kind, None, &[])
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Result<Self> {
        if !self.kind.defaults().iter().any(|(k, _)| *k == key) {
            return Err(Error::param(format!(
                "unknown key {key:?} for {}",
                self.kind
            )));
        }
        self.values.set(key, value.to_string());
        self.validate()?;
        Ok(self)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        self.values.require(key)
    }

    pub fn text(&self, key: &str) -> &str {
        self.values.get(key).unwrap_or_default()
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let items = self.values.list(key)?.unwrap_or_default();
        if items.is_empty() {
            return Err(Error::param(format!("{key} must not be empty")));
        }
        Ok(items)
    }

    pub fn seed(&self) -> u64 {
        self.get("seed").unwrap_or(1)
    }

    pub fn values(&self) -> &KvMap {
        &self.values
    }

    /// `# key = value` lines describing the run.
    pub fn echo(&self) -> String {
        let mut out = format!("# experiment = {}\n", self.kind);
        for line in self.values.to_text().lines() {
            let _ = writeln!(out, "# {line}");
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for k in self.values.keys() {
            map.insert(k.into(), self.text(k).into());
        }
        serde_json::Value::Object(map)
    }

    fn validate(&self) -> Result<()> {
        self.get::<u64>("seed")?;
        let positive = |key: &str| -> Result<usize> {
            let v: usize = self.get(key)?;
            if v == 0 {
                return Err(Error::param(format!("{key} must be >= 1")));
            }
            Ok(v)
        };
        let probabilities = |key: &str, open_low: bool| -> Result<()> {
            for p in self.list::<f64>(key)? {
                let ok = if open_low {
                    p > 0.0 && p <= 1.0
                } else {
                    (0.0..=1.0).contains(&p)
                };
                if !ok {
                    return Err(Error::param(format!("{key} entry {p} out of range")));
                }
            }
            Ok(())
        };
        match self.kind {
            ExperimentKind::SweepN => {
                positive("replicates")?;
                positive("max_attempts")?;
                for n in self.list::<usize>("n_grid")? {
                    crate::generators::SbmParams::new(
                        n,
                        self.get("m")?,
                        self.get("p")?,
                        self.get("q")?,
                    )?;
                }
            }
            ExperimentKind::SweepPEr => {
                positive("replicates")?;
                positive("max_attempts")?;
                if self.get::<usize>("n")? < 3 {
                    return Err(Error::param("n must be >= 3"));
                }
                probabilities("p_grid", true)?;
            }
            ExperimentKind::SweepQSbm => {
                positive("replicates")?;
                positive("max_attempts")?;
                positive("intercept_points")?;
                probabilities("q_grid", false)?;
                for m in self.list::<usize>("m_list")? {
                    if m < 2 {
                        return Err(Error::param("m_list entries must be >= 2"));
                    }
                    crate::generators::SbmParams::new(self.get("n")?, m, self.get("p")?, 0.0)?;
                }
            }
            ExperimentKind::Families => {
                positive("replicates")?;
                positive("max_attempts")?;
                positive("param_redraws")?;
                self.list::<FamilyKind>("families")?;
                let (lo, hi): (usize, usize) = (self.get("n_min")?, self.get("n_max")?);
                if lo < 10 || hi < lo {
                    return Err(Error::param("need 10 <= n_min <= n_max"));
                }
            }
            ExperimentKind::AnalyzeFile => {
                if self.list::<f64>("game")?.len() != 4 {
                    return Err(Error::param("game takes four payoffs R,S,T,P"));
                }
                self.get::<usize>("exact_max_nodes")?;
            }
            ExperimentKind::Simulate => {
                positive("trials")?;
                self.get::<f64>("b")?;
                self.get::<f64>("c")?;
                let delta: f64 = self.get("delta")?;
                if !(delta >= 0.0 && delta.is_finite()) {
                    return Err(Error::param("delta must be finite and >= 0"));
                }
                let placement = self.text("placement");
                if placement != "uniform" && placement.parse::<usize>().is_err() {
                    return Err(Error::param("placement is `uniform` or a node index"));
                }
            }
        }
        Ok(())
    }
}
