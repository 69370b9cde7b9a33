use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{lemma_block_length, Normalization};
use crate::learner::Regularizer;
use crate::metrics::{default_eta, default_gamma};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    FullInfo,
    BanditBlocked,
    FtrlDemo,
    IndependentTransition,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::FullInfo => "full_info",
            Mode::BanditBlocked => "bandit_blocked",
            Mode::FtrlDemo => "ftrl_demo",
            Mode::IndependentTransition => "independent_transition",
        })
    }
}

/// Random-game generator settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorSpec {
    pub players: usize,
    pub horizon: usize,
    /// States per decision layer after the first.
    pub width: usize,
    pub actions: usize,
    pub seed: u64,
    /// Redraw until the minimum reach probability reaches this value.
    pub min_beta: Option<f64>,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            players: 2,
            horizon: 2,
            width: 2,
            actions: 2,
            seed: 0,
            min_beta: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GameSource {
    File(PathBuf),
    Generator(GeneratorSpec),
}

impl Default for GameSource {
    fn default() -> Self {
        GameSource::Generator(GeneratorSpec::default())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub game: GameSource,
    pub episodes: usize,
    pub seed: u64,
    pub eta: Option<f64>,
    pub gamma: Option<f64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub block: Option<usize>,
    pub checkpoints: usize,
    pub out: Option<PathBuf>,
    pub normalization: Normalization,
    pub regularizer: Option<Regularizer>,
    pub eta_grid: Option<Vec<f64>>,
    /// Largest number of swap functions enumerated exactly.
    pub enumeration_cap: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::FullInfo,
            game: GameSource::default(),
            episodes: 1000,
            seed: 0,
            eta: None,
            gamma: None,
            epsilon: None,
            delta: None,
            block: None,
            checkpoints: 32,
            out: None,
            normalization: Normalization::VisitCount,
            regularizer: None,
            eta_grid: None,
            enumeration_cap: crate::metrics::DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Resolved value of one parameter and where it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamNote {
    pub name: String,
    pub value: String,
    pub source: String,
}

/// Learner and estimation parameters after defaults are filled in.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParams {
    pub eta: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub block: usize,
    pub notes: Vec<ParamNote>,
}

impl ResolvedParams {
    fn note(&mut self, name: &str, value: impl ToString, source: impl Into<String>) {
        self.notes.push(ParamNote {
            name: name.into(),
            value: value.to_string(),
            source: source.into(),
        });
    }

    /// `key=value` pairs for report headers.
    pub fn header(&self) -> Vec<(String, String)> {
        self.notes
            .iter()
            .map(|n| (n.name.clone(), format!("{} ({})", n.value, n.source)))
            .collect()
    }
}

/// Sizes of the game the parameters are resolved for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameSizes {
    pub horizon: usize,
    pub players: usize,
    /// Non-terminal states.
    pub states: usize,
    /// Largest action count.
    pub actions: usize,
}

const OVERRIDE: &str = "override";

fn gamma_cap(actions: usize) -> f64 {
    1.0 / (2.0 * actions as f64)
}

fn check_gamma_override(gamma: f64, actions: usize) -> Result<()> {
    let cap = gamma_cap(actions);
    if !(gamma > 0.0 && gamma <= cap) {
        return Err(Error::Parameter(format!(
            "gamma = {gamma} must lie in (0, 1/(2A)] = (0, {cap}]"
        )));
    }
    Ok(())
}

fn resolve_eta(r: &mut ResolvedParams, z: &GameSizes, eta: Option<f64>) {
    r.eta = match eta {
        Some(v) => {
            r.note("eta", v, OVERRIDE);
            v
        }
        None => {
            let v = default_eta(z.horizon, z.players, z.states, z.actions);
            r.note("eta", v, "1/(96 H^2 m sqrt(S A))");
            v
        }
    };
}

fn clamp_gamma(r: &mut ResolvedParams, z: &GameSizes, formula: f64, source: &str) {
    let cap = gamma_cap(z.actions);
    if formula > cap {
        r.gamma = cap;
        r.note("gamma", cap, format!("{source} = {formula}, clamped to 1/(2A)"));
    } else {
        r.gamma = formula;
        r.note("gamma", formula, source);
    }
}

/// Full-information defaults: `eta = 1/(96 H^2 m sqrt(S A))`,
/// `gamma = min(m H sqrt(S) A T^{-1/4}, 1/(2A))`.
pub fn resolve_full_info(z: &GameSizes, episodes: usize, eta: Option<f64>, gamma: Option<f64>) -> Result<ResolvedParams> {
    let mut r = ResolvedParams::default();
    resolve_eta(&mut r, z, eta);
    match gamma {
        Some(g) => {
            check_gamma_override(g, z.actions)?;
            r.gamma = g;
            r.note("gamma", g, OVERRIDE);
        }
        None => {
            let f = default_gamma(z.horizon, z.players, z.states, z.actions, episodes);
            clamp_gamma(&mut r, z, f, "m H sqrt(S) A T^(-1/4)");
        }
    }
    r.note("epsilon", 0, "exact Q-functions");
    Ok(r)
}

/// Independent-transition defaults: the full-information step size and `gamma = 1/T`.
pub fn resolve_independent(z: &GameSizes, episodes: usize, eta: Option<f64>, gamma: Option<f64>) -> Result<ResolvedParams> {
    let mut r = ResolvedParams::default();
    resolve_eta(&mut r, z, eta);
    match gamma {
        Some(g) => {
            check_gamma_override(g, z.actions)?;
            r.gamma = g;
            r.note("gamma", g, OVERRIDE);
        }
        None => clamp_gamma(&mut r, z, 1.0 / episodes.max(1) as f64, "1/T"),
    }
    r.note("epsilon", 0, "exact Q-functions");
    Ok(r)
}

pub struct BanditOverrides {
    pub eta: Option<f64>,
    pub gamma: Option<f64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub block: Option<usize>,
}

/// Bandit defaults, with `L = ln(m S A T / delta)`:
/// `gamma = min(H^{4/9} S^{1/3} A^{5/9} m^{2/3} beta^{-1/9} (L ln T)^{1/9} T^{-1/9}, 1/(2A))`,
/// `epsilon = 6 H^2 sqrt(m) S^{1/4} A^{3/4} (L ln(1/gamma))^{1/4} (beta gamma T)^{-1/4}`,
/// `B = ceil(2 H^2 L / (gamma beta epsilon^2))`.
pub fn resolve_bandit(z: &GameSizes, episodes: usize, beta: f64, o: &BanditOverrides) -> Result<ResolvedParams> {
    let mut r = ResolvedParams::default();
    resolve_eta(&mut r, z, o.eta);
    let (h, s, a, m, t) = (
        z.horizon as f64,
        z.states as f64,
        z.actions as f64,
        z.players as f64,
        episodes as f64,
    );
    r.delta = o.delta.unwrap_or(0.1);
    r.note("delta", r.delta, if o.delta.is_some() { OVERRIDE } else { "default 0.1" });
    if !(r.delta > 0.0 && r.delta < 1.0) {
        return Err(Error::Parameter(format!("delta = {} must lie in (0, 1)", r.delta)));
    }
    r.note("beta", beta, "minimum reach probability of the game");
    let log_term = (m * s * a * t / r.delta).ln();
    let needs_beta = o.block.is_none() || o.gamma.is_none() || o.epsilon.is_none();
    if needs_beta && beta <= 0.0 {
        return Err(Error::Parameter(
            "the game has a state with zero minimum reach probability; pass --block, --gamma and --epsilon explicitly".into(),
        ));
    }
    match o.gamma {
        Some(g) => {
            check_gamma_override(g, z.actions)?;
            r.gamma = g;
            r.note("gamma", g, OVERRIDE);
        }
        None => {
            let f = h.powf(4.0 / 9.0)
                * s.powf(1.0 / 3.0)
                * a.powf(5.0 / 9.0)
                * m.powf(2.0 / 3.0)
                * beta.powf(-1.0 / 9.0)
                * (log_term * t.ln()).powf(1.0 / 9.0)
                * t.powf(-1.0 / 9.0);
            clamp_gamma(&mut r, z, f, "H^(4/9) S^(1/3) A^(5/9) m^(2/3) beta^(-1/9) (L ln T)^(1/9) T^(-1/9)");
        }
    }
    r.epsilon = match o.epsilon {
        Some(e) => {
            r.note("epsilon", e, OVERRIDE);
            e
        }
        None => {
            let e = 6.0 * h * h * m.sqrt() * s.powf(0.25) * a.powf(0.75)
                * (log_term * (1.0 / r.gamma).ln()).powf(0.25)
                * (beta * r.gamma * t).powf(-0.25);
            r.note("epsilon", e, "6 H^2 sqrt(m) S^(1/4) A^(3/4) (L ln(1/gamma))^(1/4) (beta gamma T)^(-1/4)");
            e
        }
    };
    r.block = match o.block {
        Some(b) => {
            r.note("block", b, OVERRIDE);
            b
        }
        None => {
            let b = lemma_block_length(
                z.horizon, z.players, z.states, z.actions, episodes, r.delta, r.gamma, beta, r.epsilon,
            );
            r.note("block", b, "ceil(2 H^2 L / (gamma beta epsilon^2))");
            b
        }
    };
    if r.block == 0 || r.block > episodes {
        return Err(Error::Parameter(format!(
            "block length {} must lie in 1..={episodes}",
            r.block
        )));
    }
    Ok(r)
}
