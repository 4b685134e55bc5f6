//! Flat key = value configuration with CLI overrides.
//!
//! Keys mirror how the operating point is quoted in the lab: ordinary
//! frequencies (omega_c_ghz, kappa_khz, epsilon_khz, lambda_mhz, j_ghz),
//! temperature_mk, and the dimensionless hx_over_2j. One `#` starts a
//! comment. The resolved configuration is what gets hashed into output
//! metadata, so identical inputs produce byte-identical outputs.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use qprobe::{
    Boundary, ChainModel, CouplingProfile, OccupationStatistics, ProbeModel, ThermalState,
};
use sha2::{Digest, Sha256};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(message.into()))
}

/// Output serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Sweepable parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    HxOver2J,
    TemperatureMk,
    LambdaMhz,
}

impl SweepParam {
    pub fn key(&self) -> &'static str {
        match self {
            SweepParam::HxOver2J => "hx_over_2j",
            SweepParam::TemperatureMk => "temperature_mk",
            SweepParam::LambdaMhz => "lambda_mhz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    /// Inclusive linspace: steps points from start to stop.
    pub fn values(&self) -> Vec<f64> {
        (0..self.steps)
            .map(|i| {
                self.start + i as f64 * (self.stop - self.start) / (self.steps as f64 - 1.0)
            })
            .collect()
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_sites: usize,
    pub j_ghz: f64,
    pub hx_over_2j: f64,
    pub boundary: Boundary,
    pub coupling_profile: CouplingProfile,
    pub omega_c_ghz: f64,
    pub kappa_khz: f64,
    pub epsilon_khz: f64,
    pub lambda_mhz: f64,
    pub n_th: f64,
    pub temperature_mk: f64,
    pub occupation: OccupationStatistics,
    pub pair: Option<(usize, usize)>,
    pub sweep: Option<SweepSpec>,
    pub log_floor: f64,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_sites: 20,
            j_ghz: 1.0,
            hx_over_2j: 1.0,
            boundary: Boundary::Periodic,
            coupling_profile: CouplingProfile::Uniform,
            omega_c_ghz: 12.0,
            kappa_khz: 100.0,
            epsilon_khz: 600.0,
            lambda_mhz: 40.0,
            n_th: 0.0,
            temperature_mk: 20.0,
            occupation: OccupationStatistics::FermiDirac,
            pair: None,
            sweep: None,
            log_floor: 1e-30,
            workers: 1,
        }
    }
}

fn parse_kv(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(format!("line {}: expected `key = value`", lineno + 1));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::default();
        config.apply_map(&parse_kv(&text)?)?;
        Ok(config)
    }

    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<(), ConfigError> {
        for item in overrides {
            let Some((key, value)) = item.split_once('=') else {
                return err(format!("--set expects key=value, got `{item}`"));
            };
            self.apply_key(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn apply_map(&mut self, map: &BTreeMap<String, String>) -> Result<(), ConfigError> {
        for (key, value) in map {
            self.apply_key(key, value)?;
        }
        Ok(())
    }

    fn apply_key(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad_num = |k: &str, v: &str| ConfigError(format!("{k}: cannot parse `{v}`"));
        match key {
            "n_sites" => self.n_sites = value.parse().map_err(|_| bad_num(key, value))?,
            "j_ghz" => self.j_ghz = value.parse().map_err(|_| bad_num(key, value))?,
            "hx_over_2j" => self.hx_over_2j = value.parse().map_err(|_| bad_num(key, value))?,
            "boundary" => {
                self.boundary = match value {
                    "periodic" => Boundary::Periodic,
                    "open" => Boundary::Open,
                    _ => return err(format!("boundary: `{value}` is not periodic|open")),
                }
            }
            "coupling_profile" => {
                self.coupling_profile = match value {
                    "uniform" => CouplingProfile::Uniform,
                    "sine" => CouplingProfile::SineLowestEvenMode,
                    _ => return err(format!("coupling_profile: `{value}` is not uniform|sine")),
                }
            }
            "omega_c_ghz" => self.omega_c_ghz = value.parse().map_err(|_| bad_num(key, value))?,
            "kappa_khz" => self.kappa_khz = value.parse().map_err(|_| bad_num(key, value))?,
            "epsilon_khz" => self.epsilon_khz = value.parse().map_err(|_| bad_num(key, value))?,
            "lambda_mhz" => self.lambda_mhz = value.parse().map_err(|_| bad_num(key, value))?,
            "n_th" => self.n_th = value.parse().map_err(|_| bad_num(key, value))?,
            "temperature_mk" => {
                self.temperature_mk = value.parse().map_err(|_| bad_num(key, value))?
            }
            "occupation" => {
                self.occupation = match value {
                    "fermi_dirac" => OccupationStatistics::FermiDirac,
                    "bose" => OccupationStatistics::Bose,
                    _ => return err(format!("occupation: `{value}` is not fermi_dirac|bose")),
                }
            }
            "pair_i" => {
                let i = value.parse().map_err(|_| bad_num(key, value))?;
                self.pair = Some((i, self.pair.map_or(i, |p| p.1)));
            }
            "pair_j" => {
                let j = value.parse().map_err(|_| bad_num(key, value))?;
                self.pair = Some((self.pair.map_or(j, |p| p.0), j));
            }
            "sweep_param" => {
                let param = match value {
                    "hx_over_2j" => SweepParam::HxOver2J,
                    "temperature_mk" => SweepParam::TemperatureMk,
                    "lambda_mhz" => SweepParam::LambdaMhz,
                    _ => {
                        return err(format!(
                            "sweep_param: `{value}` is not hx_over_2j|temperature_mk|lambda_mhz"
                        ))
                    }
                };
                let s = self.sweep.get_or_insert(SweepSpec {
                    param,
                    start: 0.2,
                    stop: 1.5,
                    steps: 27,
                });
                s.param = param;
            }
            "sweep_start" | "sweep_stop" | "sweep_steps" => {
                let s = self.sweep.get_or_insert(SweepSpec {
                    param: SweepParam::HxOver2J,
                    start: 0.2,
                    stop: 1.5,
                    steps: 27,
                });
                match key {
                    "sweep_start" => s.start = value.parse().map_err(|_| bad_num(key, value))?,
                    "sweep_stop" => s.stop = value.parse().map_err(|_| bad_num(key, value))?,
                    _ => s.steps = value.parse().map_err(|_| bad_num(key, value))?,
                }
            }
            "log_floor" => self.log_floor = value.parse().map_err(|_| bad_num(key, value))?,
            "workers" => self.workers = value.parse().map_err(|_| bad_num(key, value))?,
            _ => return err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Canonical key = value view of the resolved configuration: the basis
    /// of the config hash and of the JSON round trip.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            map.insert(k.to_string(), v);
        };
        put("n_sites", self.n_sites.to_string());
        put("j_ghz", format_f64(self.j_ghz));
        put("hx_over_2j", format_f64(self.hx_over_2j));
        put(
            "boundary",
            match self.boundary {
                Boundary::Periodic => "periodic",
                Boundary::Open => "open",
            }
            .to_string(),
        );
        put(
            "coupling_profile",
            match self.coupling_profile {
                CouplingProfile::Uniform => "uniform",
                CouplingProfile::SineLowestEvenMode => "sine",
            }
            .to_string(),
        );
        put("omega_c_ghz", format_f64(self.omega_c_ghz));
        put("kappa_khz", format_f64(self.kappa_khz));
        put("epsilon_khz", format_f64(self.epsilon_khz));
        put("lambda_mhz", format_f64(self.lambda_mhz));
        put("n_th", format_f64(self.n_th));
        put("temperature_mk", format_f64(self.temperature_mk));
        put(
            "occupation",
            match self.occupation {
                OccupationStatistics::FermiDirac => "fermi_dirac",
                OccupationStatistics::Bose => "bose",
            }
            .to_string(),
        );
        if let Some((i, j)) = self.pair {
            put("pair_i", i.to_string());
            put("pair_j", j.to_string());
        }
        if let Some(s) = &self.sweep {
            put("sweep_param", s.param.key().to_string());
            put("sweep_start", format_f64(s.start));
            put("sweep_stop", format_f64(s.stop));
            put("sweep_steps", s.steps.to_string());
        }
        put("log_floor", format_f64(self.log_floor));
        put("workers", self.workers.to_string());
        map
    }

    pub fn config_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for (k, v) in self.to_map() {
            hasher.update(k.as_bytes());
            hasher.update(b"=");
            hasher.update(v.as_bytes());
            hasher.update(b"\n");
        }
        let digest = hasher.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn chain(&self) -> Result<ChainModel, qprobe::Error> {
        ChainModel::new(
            self.n_sites,
            self.j_ghz,
            self.hx_over_2j,
            self.boundary,
            self.coupling_profile,
        )
    }

    pub fn probe(&self) -> Result<ProbeModel, qprobe::Error> {
        ProbeModel::from_lab_units(
            self.omega_c_ghz,
            self.kappa_khz,
            self.epsilon_khz,
            self.lambda_mhz,
            self.n_th,
            self.j_ghz,
        )
    }

    pub fn thermal_state(&self) -> Result<ThermalState, qprobe::Error> {
        ThermalState::new(self.temperature_mk, self.j_ghz, self.occupation)
    }

    /// With the sweep parameter replaced by `value`.
    pub fn at_sweep_value(&self, value: f64) -> Self {
        let mut c = self.clone();
        if let Some(s) = &self.sweep {
            match s.param {
                SweepParam::HxOver2J => c.hx_over_2j = value,
                SweepParam::TemperatureMk => c.temperature_mk = value,
                SweepParam::LambdaMhz => c.lambda_mhz = value,
            }
        }
        c
    }
}

/// Shortest float form that round-trips.
pub fn format_f64(v: f64) -> String {
    let plain = format!("{v}");
    let exp = format!("{v:e}");
    if plain.parse::<f64>() == Ok(v) && plain.len() <= exp.len() {
        plain
    } else {
        exp
    }
}

/// Errors and advisory warnings for a configuration; never mutates state.
pub fn validate(config: &RunConfig) -> (Vec<String>, Vec<String>) {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();

    if let Err(e) = config.chain() {
        errors.push(e.to_string());
    }
    if let Err(e) = config.probe() {
        errors.push(e.to_string());
    }
    if let Err(e) = config.thermal_state() {
        errors.push(e.to_string());
    }
    if let Some(s) = &config.sweep {
        if s.steps < 2 {
            errors.push(format!("sweep_steps = {}, need at least 2", s.steps));
        }
        if !(s.start.is_finite() && s.stop.is_finite()) || s.start == s.stop {
            errors.push("sweep range is degenerate".to_string());
        }
        let nonneg_ok = match s.param {
            SweepParam::HxOver2J | SweepParam::TemperatureMk | SweepParam::LambdaMhz => {
                s.start >= 0.0 && s.stop >= 0.0
            }
        };
        if !nonneg_ok {
            errors.push(format!("sweep over {} requires nonnegative values", s.param.key()));
        }
    }
    if let Some((i, j)) = config.pair {
        for site in [i, j] {
            if site == 0 || site > config.n_sites {
                errors.push(format!(
                    "pair site {site} out of range 1..={}",
                    config.n_sites
                ));
            }
        }
    }
    if config.log_floor <= 0.0 || config.log_floor.is_nan() {
        errors.push(format!("log_floor = {}, need > 0", config.log_floor));
    }
    if config.workers == 0 {
        errors.push("workers = 0, need at least 1".to_string());
    }

    if errors.is_empty() {
        let chain = config.chain().unwrap();
        let probe = config.probe().unwrap();
        if !qprobe::perturbative_validity(&probe, &chain) && probe.lambda > 0.0 {
            let band = 4.0 + 2.0 * chain.transverse_field();
            let bound = 2.0 * (probe.omega_c - band) / probe.lambda;
            warnings.push(format!(
                "backaction: N = {} exceeds the perturbative-validity bound N < {:.0} \
                 (lambda N/2 must stay below omega_c - 4J - 2h_x)",
                config.n_sites,
                bound.max(0.0)
            ));
        }
        if probe.lambda > 0.1 {
            warnings.push(format!(
                "weak-probe assumption strained: lambda = {:.4} J exceeds J/10",
                probe.lambda
            ));
        }
        // float-resolution limit of the dense peak windows
        let band = 4.0 + 2.0 * chain.transverse_field();
        if probe.epsilon / 16.0 < 8.0 * band * f64::EPSILON {
            warnings.push(format!(
                "grid cannot resolve epsilon = {:.3e} J next to the excitation band; \
                 peak extraction will be rejected",
                probe.epsilon
            ));
        }
    }
    (errors, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_clean() {
        let (errors, warnings) = validate(&RunConfig::default());
        assert!(errors.is_empty(), "{errors:?}");
        assert!(warnings.is_empty(), "{warnings:?}");
    }

    #[test]
    fn parse_and_override() {
        let text = "n_sites = 6  # sites\nhx_over_2j = 0.2\nboundary = open\n";
        let mut c = RunConfig::default();
        c.apply_map(&parse_kv(text).unwrap()).unwrap();
        assert_eq!(c.n_sites, 6);
        assert_eq!(c.boundary, Boundary::Open);
        c.apply_overrides(&["hx_over_2j=1.5".to_string()]).unwrap();
        assert_eq!(c.hx_over_2j, 1.5);
    }

    #[test]
    fn unknown_key_rejected() {
        let mut c = RunConfig::default();
        assert!(c.apply_overrides(&["bogus=1".to_string()]).is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let b = RunConfig::default();
        assert_eq!(a.config_hash(), b.config_hash());
        let b = RunConfig {
            hx_over_2j: 0.2,
            ..b
        };
        assert_ne!(a.config_hash(), b.config_hash());
    }

    #[test]
    fn map_round_trip() {
        let a = RunConfig {
            sweep: Some(SweepSpec {
                param: SweepParam::HxOver2J,
                start: 0.2,
                stop: 1.5,
                steps: 27,
            }),
            pair: Some((1, 4)),
            ..RunConfig::default()
        };
        let mut b = RunConfig::default();
        b.apply_map(&a.to_map()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn backaction_warning_cites_bound() {
        let c = RunConfig {
            n_sites: 400,
            hx_over_2j: 0.5, // h_x = J
            ..RunConfig::default()
        };
        let (errors, warnings) = validate(&c);
        assert!(errors.is_empty());
        assert!(warnings.iter().any(|w| w.contains("N < 300")), "{warnings:?}");
    }

    #[test]
    fn negative_epsilon_is_error() {
        let c = RunConfig {
            epsilon_khz: -1.0,
            ..RunConfig::default()
        };
        let (errors, _) = validate(&c);
        assert!(!errors.is_empty());
    }

    #[test]
    fn sweep_values_inclusive_grid() {
        let s = SweepSpec {
            param: SweepParam::HxOver2J,
            start: 0.2,
            stop: 1.5,
            steps: 27,
        };
        let v = s.values();
        assert_eq!(v.len(), 27);
        assert_eq!(v[0], 0.2);
        assert!((v[26] - 1.5).abs() < 1e-12);
        assert!(v.iter().any(|x| (x - 1.0).abs() < 1e-12));
    }
}
