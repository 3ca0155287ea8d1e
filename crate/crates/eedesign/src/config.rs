//! Scenario files.
//!
//! A scenario is a flat INI file of `key = value` lines grouped in the
//! sections `[hardware]`, `[propagation]`, `[system]`, `[search]` and
//! `[mc]`. Lines starting with `#` or `;` are comments. Every key is
//! optional and defaults to the macro-cell reference scenario, so an empty
//! file is a complete scenario. Physical quantities are given in W, MHz,
//! kHz, ms and m and converted to per-channel-use units on load.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use eedesign_core::propagation::{AnnulusCell, EmpiricalPdf, UserDistribution};
use eedesign_core::{HardwareProfile, PowerCoefficients, PropagationModel, SearchSpace};

use crate::error::{Result, SimError};
use crate::mc::{CircuitModel, McConfig, PilotEnergy, PrecoderSpec};

/// Parameters of the joint design searches.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSettings {
    pub m_min: u32,
    pub m_max: u32,
    pub k_min: u32,
    /// `None` selects `min(T - 1, 500)`.
    pub k_max: Option<u32>,
    pub rho_cap: Option<f64>,
    pub max_iter: u32,
    /// Start of the alternating optimisation, `(M, K, rho)`.
    pub init: (u32, u32, f64),
    /// Antenna counts of the power-scaling and EE-versus-antennas sweeps.
    pub antennas: Vec<u32>,
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self {
            m_min: 1,
            m_max: 1000,
            k_min: 1,
            k_max: None,
            rho_cap: None,
            max_iter: eedesign_core::design::DEFAULT_MAX_ITER,
            init: (3, 1, 1.0),
            antennas: vec![20, 60, 100, 200, 300],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSettings {
    pub config: McConfig,
    /// Precoders of the sweeps and simulations; pilot energy and RZF
    /// regularisation are already applied.
    pub schemes: Vec<PrecoderSpec>,
    pub pilot_energy: PilotEnergy,
    pub regularization: Option<f64>,
}

impl McSettings {
    /// `spec` with the scenario's pilot energy and RZF regularisation.
    pub fn configure(&self, spec: PrecoderSpec) -> PrecoderSpec {
        PrecoderSpec { pilot_energy: self.pilot_energy, regularization: self.regularization, ..spec }
    }
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            config: McConfig::default(),
            schemes: ["zf", "rzf", "mrt"].map(|s| s.parse().unwrap()).to_vec(),
            pilot_energy: PilotEnergy::MatchDownlink,
            regularization: None,
        }
    }
}

/// Fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub hardware: HardwareProfile,
    pub propagation: PropagationModel,
    /// ZF-type coefficients, used by every closed-form result.
    pub coefficients: PowerCoefficients,
    /// Coefficients per precoder family for the simulations.
    pub circuit: CircuitModel,
    pub a_lambda: f64,
    pub search: SearchSettings,
    pub mc: McSettings,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        parse_config_str("", "<default>", Path::new(".")).expect("reference scenario is valid")
    }
}

impl ScenarioConfig {
    pub fn coherence_block(&self) -> u32 {
        self.coefficients.coherence_block()
    }

    /// Re-checks the search and simulation settings, e.g. after command-line
    /// overrides.
    pub fn validate(&self) -> Result<()> {
        if self.mc.config.trials == 0 {
            return Err(validation("mc", "trials must be >= 1"));
        }
        if self.mc.schemes.is_empty() {
            return Err(validation("mc", "schemes must list at least one precoder"));
        }
        validate_search(self)
    }

    pub fn search_space(&self) -> SearchSpace {
        let k_max = self.search.k_max.unwrap_or_else(|| (self.coherence_block() - 1).min(500));
        let mut space = SearchSpace::new(self.search.m_min..=self.search.m_max, self.search.k_min..=k_max);
        space.rho_cap = self.search.rho_cap;
        space
    }
}

/// Reads and validates a scenario file. A relative `pdf_csv` path is
/// resolved against the directory of the file.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| SimError::Io { path: path.to_path_buf(), source })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&text, &path.display().to_string(), base)
}

struct Entry<'t> {
    line: usize,
    section: &'t str,
    key: &'t str,
    value: &'t str,
}

const SECTIONS: [&str; 5] = ["hardware", "propagation", "system", "search", "mc"];

fn tokenize<'t>(text: &'t str, file: &str) -> Result<Vec<Entry<'t>>> {
    let parse_error = |line: usize, message: String| SimError::Parse { file: file.to_string(), line, message };
    let mut section: Option<&str> = None;
    let mut seen = BTreeSet::new();
    let mut entries = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') || body.starts_with(';') {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| parse_error(line, "unterminated section header".into()))?;
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(parse_error(line, format!("unknown section [{name}]")));
            }
            section = Some(name);
            continue;
        }
        let (key, value) =
            body.split_once('=').ok_or_else(|| parse_error(line, format!("expected 'key = value', got '{body}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(parse_error(line, "missing key before '='".into()));
        }
        let section = section.ok_or_else(|| parse_error(line, format!("key '{key}' appears before any section")))?;
        if !seen.insert((section, key)) {
            return Err(parse_error(line, format!("duplicate key '{key}' in [{section}]")));
        }
        entries.push(Entry { line, section, key, value });
    }
    Ok(entries)
}

fn validation(section: &str, err: impl std::fmt::Display) -> SimError {
    SimError::Validation { section: section.to_string(), message: err.to_string() }
}

/// Parses scenario text; `file` names it in error messages and `base` is
/// the directory for relative paths.
pub fn parse_config_str(text: &str, file: &str, base: &Path) -> Result<ScenarioConfig> {
    let entries = tokenize(text, file)?;

    let mut hw = HardwareProfile::default();
    let mut cell = AnnulusCell::default();
    let mut model = "annulus".to_string();
    let mut pdf_csv: Option<PathBuf> = None;
    let mut noise_variance = PropagationModel::default().noise_variance;
    let mut coherence_block: Option<u32> = None;
    let mut search = SearchSettings::default();
    let mut mc = McSettings::default();
    let mut pilot_power_w: Option<f64> = None;
    let mut rzf_regularization: Option<f64> = None;

    for e in &entries {
        let bad = |message: String| SimError::Parse { file: file.to_string(), line: e.line, message };
        let num = || -> Result<f64> {
            let v = f64::from_str(e.value).map_err(|_| bad(format!("{}: '{}' is not a number", e.key, e.value)))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad(format!("{}: value must be finite", e.key)))
            }
        };
        let int = || u32::from_str(e.value).map_err(|_| bad(format!("{}: '{}' is not a non-negative integer", e.key, e.value)));
        match (e.section, e.key) {
            ("hardware", "static_power_w") => hw.static_power_w = num()?,
            ("hardware", "synthesizer_w") => hw.synthesizer_w = num()?,
            ("hardware", "coding_w") => hw.coding_w = num()?,
            ("hardware", "decoding_w") => hw.decoding_w = num()?,
            ("hardware", "tx_chain_w") => hw.tx_chain_w = num()?,
            ("hardware", "rx_chain_w") => hw.rx_chain_w = num()?,
            ("hardware", "ops_per_joule") => hw.ops_per_joule = num()?,
            ("hardware", "bandwidth_mhz") => hw.symbol_time_s = 1.0 / (num()? * 1e6),
            ("hardware", "coherence_bandwidth_khz") => hw.coherence_bandwidth_hz = num()? * 1e3,
            ("hardware", "coherence_time_ms") => hw.coherence_time_s = num()? * 1e-3,
            ("hardware", "eta") => hw.eta = num()?,
            ("propagation", "model") => model = e.value.to_ascii_lowercase(),
            ("propagation", "attenuation_db") => cell.attenuation = 10f64.powf(num()? / 10.0),
            ("propagation", "pathloss_exponent") => cell.pathloss_exponent = num()?,
            ("propagation", "d_min_m") => cell.d_min = num()?,
            ("propagation", "d_max_m") => cell.d_max = num()?,
            ("propagation", "pdf_csv") => pdf_csv = Some(base.join(e.value)),
            ("system", "coherence_block") => coherence_block = Some(int()?),
            ("system", "noise_variance") => noise_variance = num()?,
            ("search", "m_min") => search.m_min = int()?,
            ("search", "m_max") => search.m_max = int()?,
            ("search", "k_min") => search.k_min = int()?,
            ("search", "k_max") => search.k_max = Some(int()?),
            ("search", "rho_cap") => search.rho_cap = Some(num()?),
            ("search", "max_iter") => search.max_iter = int()?,
            ("search", "init_m") => search.init.0 = int()?,
            ("search", "init_k") => search.init.1 = int()?,
            ("search", "init_rho") => search.init.2 = num()?,
            ("search", "antennas") => {
                search.antennas = parse_list(e.value, |s| u32::from_str(s).map_err(|_| format!("'{s}' is not an integer")))
                    .map_err(|m| bad(format!("antennas: {m}")))?
            }
            ("mc", "trials") => mc.config.trials = int()?,
            ("mc", "seed") => {
                mc.config.seed = u64::from_str(e.value).map_err(|_| bad(format!("seed: '{}' is not a u64", e.value)))?
            }
            ("mc", "resample_users") => {
                mc.config.resample_users = match e.value.to_ascii_lowercase().as_str() {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    _ => return Err(bad(format!("resample_users: '{}' is not a boolean", e.value))),
                }
            }
            ("mc", "schemes") => {
                mc.schemes = parse_list(e.value, PrecoderSpec::from_str).map_err(|m| bad(format!("schemes: {m}")))?
            }
            ("mc", "pilot_power_w") => pilot_power_w = Some(num()?),
            ("mc", "rzf_regularization") => rzf_regularization = Some(num()?),
            (section, key) => return Err(bad(format!("unknown key '{key}' in [{section}]"))),
        }
    }

    hw.validate().map_err(|err| validation("hardware", err))?;
    let t = match coherence_block {
        Some(t) => t,
        None => hw.coherence_block_length().map_err(|err| validation("hardware", err))?,
    };
    let circuit = CircuitModel::from_hardware(&hw, t).map_err(|err| validation("system", err))?;
    let coefficients = circuit.zero_forcing;

    let users = match model.as_str() {
        "annulus" => {
            if pdf_csv.is_some() {
                return Err(validation("propagation", "pdf_csv requires model = empirical"));
            }
            UserDistribution::Annulus(cell)
        }
        "empirical" => {
            let path = pdf_csv.ok_or_else(|| validation("propagation", "model = empirical requires pdf_csv"))?;
            UserDistribution::Empirical(read_pdf_csv(&path)?)
        }
        other => return Err(validation("propagation", format!("unknown model '{other}' (annulus or empirical)"))),
    };
    let propagation = PropagationModel { users, noise_variance };
    let a_lambda = propagation.a_lambda().map_err(|err| validation("propagation", err))?;

    let pilot_energy = match pilot_power_w {
        None => PilotEnergy::MatchDownlink,
        Some(p) if p > 0.0 => PilotEnergy::PerSymbol(p * hw.symbol_time_s),
        Some(_) => return Err(validation("mc", "pilot_power_w must be > 0")),
    };
    if let Some(xi) = rzf_regularization {
        if !(xi > 0.0) {
            return Err(validation("mc", "rzf_regularization must be > 0"));
        }
    }
    mc.pilot_energy = pilot_energy;
    mc.regularization = rzf_regularization;
    mc.schemes = mc.schemes.iter().map(|&spec| mc.configure(spec)).collect();

    let config = ScenarioConfig { hardware: hw, propagation, coefficients, circuit, a_lambda, search, mc };
    config.validate()?;
    Ok(config)
}

fn validate_search(config: &ScenarioConfig) -> Result<()> {
    let s = &config.search;
    config.search_space().validate(&config.coefficients).map_err(|err| validation("search", err))?;
    if s.m_min > s.m_max || s.k_min > s.k_max.unwrap_or(u32::MAX) {
        return Err(validation("search", "range minimum exceeds maximum"));
    }
    let (m, k, rho) = s.init;
    if k == 0 || m <= k {
        return Err(validation("search", "initial point needs init_m > init_k >= 1"));
    }
    if k >= config.coherence_block() {
        return Err(validation("search", "init_k must be below the coherence block length"));
    }
    if !(rho > 0.0) {
        return Err(validation("search", "init_rho must be > 0"));
    }
    if s.max_iter == 0 {
        return Err(validation("search", "max_iter must be >= 1"));
    }
    if s.antennas.is_empty() || s.antennas.iter().any(|&m| m < 2) {
        return Err(validation("search", "antennas must list counts >= 2"));
    }
    Ok(())
}

fn parse_list<T>(value: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(item).collect()
}

/// Reads a two-column `(x, density)` CSV. A header row and `#` comments are
/// allowed.
pub fn read_pdf_csv(path: &Path) -> Result<EmpiricalPdf> {
    let io = |source: std::io::Error| SimError::Io { path: path.to_path_buf(), source };
    let file = std::fs::File::open(path).map_err(io)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let name = path.display().to_string();
    let mut points = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(index + 1, |p| p.line() as usize);
        let bad = |message: String| SimError::Parse { file: name.clone(), line, message };
        if record.len() != 2 {
            return Err(bad(format!("expected 2 columns, got {}", record.len())));
        }
        match (f64::from_str(&record[0]), f64::from_str(&record[1])) {
            (Ok(x), Ok(f)) => points.push((x, f)),
            _ if index == 0 => continue,
            _ => return Err(bad("columns must be numbers".into())),
        }
    }
    EmpiricalPdf::new(&points).map_err(|err| validation("propagation", format!("{name}: {err}")))
}

#[cfg(test)]
mod tests;
