//! Experiment configuration: strict JSON with documented defaults, validated
//! before anything runs. Validation failures carry the offending key path.

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64 as C64;
use rkg_core::analytic::{AnalyticProfile, GaussianTerm};
use rkg_core::dynamics::SystemKind;
use rkg_core::grid::Grid;
use rkg_core::profiles::ScatteringData;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
pub enum Experiment {
    #[serde(rename = "cauchy")]
    Cauchy,
    #[serde(rename = "scatter")]
    Scatter,
    #[serde(rename = "resonance")]
    Resonance,
    #[serde(rename = "poincare")]
    Poincare,
    #[serde(rename = "asymptotics")]
    Asymptotics,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Cauchy => "cauchy",
            Experiment::Scatter => "scatter",
            Experiment::Resonance => "resonance",
            Experiment::Poincare => "poincare",
            Experiment::Asymptotics => "asymptotics",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
pub enum SystemTag {
    A,
    B,
}

impl From<SystemTag> for SystemKind {
    fn from(t: SystemTag) -> SystemKind {
        match t {
            SystemTag::A => SystemKind::A,
            SystemTag::B => SystemKind::B,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_length")]
    pub length: f64,
}

fn default_n() -> usize {
    128
}
fn default_length() -> f64 {
    64.0
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n: default_n(),
            length: default_length(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// number of sample times (log-spaced over the fit window for decay
    /// studies, linear for the Cauchy run)
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub fit_window: Option<[f64; 2]>,
}

fn default_t_max() -> f64 {
    200.0
}
fn default_dt() -> f64 {
    0.05
}
fn default_samples() -> usize {
    32
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            t_max: default_t_max(),
            dt: default_dt(),
            samples: default_samples(),
            fit_window: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
pub enum CatalogKind {
    #[serde(rename = "gaussian")]
    Gaussian,
    #[serde(rename = "hermite-gaussian")]
    HermiteGaussian,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    /// which scattering-data component the entry feeds ("f1" or "f2"); the
    /// mirror sign component is generated automatically
    pub component: String,
    #[serde(default = "default_kind")]
    pub kind: CatalogKind,
    pub amplitude: [f64; 2],
    pub width: f64,
    #[serde(default)]
    pub center: [f64; 2],
    #[serde(default)]
    pub power: [u8; 2],
    #[serde(default)]
    pub shift: [f64; 2],
}

fn default_kind() -> CatalogKind {
    CatalogKind::Gaussian
}

/// Extra knobs for the scattering experiment.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterConfig {
    /// doublings of t_max certifying the truncation error
    #[serde(default = "default_doublings")]
    pub doublings: usize,
    /// contraction-norm weight exponent; defaults to 0.5 for system A and
    /// 0.5 (1 - gamma) for system B
    #[serde(default)]
    pub m_tau_c: Option<f64>,
}

fn default_doublings() -> usize {
    1
}

impl Default for ScatterConfig {
    fn default() -> Self {
        ScatterConfig {
            doublings: default_doublings(),
            m_tau_c: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceConfig {
    /// masses (M1, M2, M) with eps M = eps1 M1 + eps2 M2
    #[serde(default = "default_masses")]
    pub masses: [f64; 3],
    /// signs as +1/-1 for (eps1, eps2, eps)
    #[serde(default = "default_signs")]
    pub signs: [i8; 3],
    /// expansion order (0 or 1)
    #[serde(default)]
    pub order: usize,
    #[serde(default = "default_slice_radius")]
    pub slice_radius: f64,
    #[serde(default = "default_slice_resolution")]
    pub slice_resolution: usize,
}

fn default_masses() -> [f64; 3] {
    [1.0, 1.0, 2.0]
}
fn default_signs() -> [i8; 3] {
    [1, 1, 1]
}
fn default_slice_radius() -> f64 {
    0.96
}
fn default_slice_resolution() -> usize {
    1536
}

impl Default for ResonanceConfig {
    fn default() -> Self {
        ResonanceConfig {
            masses: default_masses(),
            signs: default_signs(),
            order: 0,
            slice_radius: default_slice_radius(),
            slice_resolution: default_slice_resolution(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PoincareConfig {
    #[serde(default = "default_space_shift")]
    pub space_shift: [f64; 2],
    #[serde(default = "default_time_shift")]
    pub time_shift: f64,
    /// truncation time for the intertwining wave operators
    #[serde(default = "default_intertwine_t_max")]
    pub intertwine_t_max: f64,
    #[serde(default)]
    pub skip_intertwining: bool,
}

fn default_space_shift() -> [f64; 2] {
    [0.5, 0.0]
}
fn default_time_shift() -> f64 {
    0.5
}
fn default_intertwine_t_max() -> f64 {
    50.0
}

impl Default for PoincareConfig {
    fn default() -> Self {
        PoincareConfig {
            space_shift: default_space_shift(),
            time_shift: default_time_shift(),
            intertwine_t_max: default_intertwine_t_max(),
            skip_intertwining: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
pub enum AsymptoticsMode {
    #[serde(rename = "cone")]
    Cone,
    #[serde(rename = "inverse")]
    Inverse,
    /// alias dispatching to the resonance experiment
    #[serde(rename = "resonance")]
    Resonance,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticsConfig {
    #[serde(default = "default_mode")]
    pub mode: AsymptoticsMode,
    #[serde(default = "default_asy_mass")]
    pub mass: f64,
    /// expansion orders studied by the cone mode
    #[serde(default = "default_orders")]
    pub orders: Vec<usize>,
    #[serde(default = "default_slice_radius")]
    pub slice_radius: f64,
    #[serde(default = "default_asy_resolution")]
    pub slice_resolution: usize,
}

fn default_mode() -> AsymptoticsMode {
    AsymptoticsMode::Cone
}
fn default_asy_mass() -> f64 {
    1.0
}
fn default_orders() -> Vec<usize> {
    vec![1, 2]
}
fn default_asy_resolution() -> usize {
    768
}

impl Default for AsymptoticsConfig {
    fn default() -> Self {
        AsymptoticsConfig {
            mode: default_mode(),
            mass: default_asy_mass(),
            orders: default_orders(),
            slice_radius: default_slice_radius(),
            slice_resolution: default_asy_resolution(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub experiment: Experiment,
    #[serde(default = "default_system")]
    pub system: SystemTag,
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub catalog: Vec<CatalogEntry>,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub scatter: ScatterConfig,
    #[serde(default)]
    pub resonance: ResonanceConfig,
    #[serde(default)]
    pub poincare: PoincareConfig,
    #[serde(default)]
    pub asymptotics: AsymptoticsConfig,
    /// pass/fail thresholds; defaults are the acceptance values and every
    /// key present here overrides one of them
    #[serde(default)]
    pub thresholds: BTreeMap<String, f64>,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}
fn default_system() -> SystemTag {
    SystemTag::A
}
fn default_mass() -> f64 {
    1.0
}

/// Parse with strict unknown-key rejection; errors carry the key path.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig =
        serde_path_to_error::deserialize(de).map_err(|e| anyhow!("config error at `{}`: {}", e.path(), e.inner()))?;
    validate(&cfg)?;
    Ok(cfg)
}

/// Apply `--override key.path=value` entries onto the raw JSON before
/// parsing; values parse as JSON when possible, else as strings.
pub fn apply_overrides(text: &str, overrides: &[String]) -> Result<String> {
    let mut value: serde_json::Value =
        serde_json::from_str(text).context("config is not valid JSON")?;
    for entry in overrides {
        let (path, raw) = entry
            .split_once('=')
            .ok_or_else(|| anyhow!("override `{entry}` is not of the form key=value"))?;
        let new: serde_json::Value = serde_json::from_str(raw)
            .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
        let mut cursor = &mut value;
        let parts: Vec<&str> = path.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            if i + 1 == parts.len() {
                cursor
                    .as_object_mut()
                    .ok_or_else(|| anyhow!("override path `{path}` crosses a non-object"))?
                    .insert(part.to_string(), new.clone());
            } else {
                cursor = cursor
                    .as_object_mut()
                    .ok_or_else(|| anyhow!("override path `{path}` crosses a non-object"))?
                    .entry(part.to_string())
                    .or_insert_with(|| serde_json::Value::Object(Default::default()));
            }
        }
    }
    Ok(serde_json::to_string(&value)?)
}

fn validate(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.schema_version != SCHEMA_VERSION {
        bail!(
            "schema_version: expected {SCHEMA_VERSION}, got {}",
            cfg.schema_version
        );
    }
    if cfg.mass <= 0.0 {
        bail!("mass: must be positive");
    }
    let grid = Grid::<f64>::new(cfg.grid.n, cfg.grid.length)
        .map_err(|e| anyhow!("grid: {e}"))?;
    if cfg.time.dt <= 0.0 {
        bail!("time.dt: must be positive");
    }
    if let Some([lo, hi]) = cfg.time.fit_window {
        if !(0.0 < lo && lo < hi && hi <= cfg.time.t_max) {
            bail!(
                "time.fit_window: must satisfy 0 < {lo} < {hi} <= t_max = {}",
                cfg.time.t_max
            );
        }
    }
    // experiments that form pointwise products need headroom under the
    // dealias cutoff; the free-propagation studies only need representability
    let forms_products = !matches!(
        (cfg.experiment, cfg.asymptotics.mode),
        (Experiment::Asymptotics, AsymptoticsMode::Cone)
            | (Experiment::Asymptotics, AsymptoticsMode::Inverse)
    );
    let band_bound = if forms_products {
        grid.dealias_k()
    } else {
        grid.k_nyquist() * 0.95
    };
    for (i, entry) in cfg.catalog.iter().enumerate() {
        if entry.component != "f1" && entry.component != "f2" {
            bail!("catalog[{i}].component: must be \"f1\" or \"f2\"");
        }
        if entry.width <= 0.0 {
            bail!("catalog[{i}].width: must be positive");
        }
        if entry.power[0] > 2 || entry.power[1] > 2 {
            bail!("catalog[{i}].power: components must be at most 2");
        }
        if entry.kind == CatalogKind::Gaussian && entry.power != [0, 0] {
            bail!("catalog[{i}].power: nonzero powers require kind \"hermite-gaussian\"");
        }
        let profile = entry_profile(entry);
        let k_eff = profile.k_eff();
        if k_eff > band_bound {
            bail!(
                "catalog[{i}]: effective band limit {k_eff:.3} exceeds the grid bound {band_bound:.3}",
            );
        }
        // locality: the physical footprint must sit well inside the box
        let sampled = profile.sample(&grid);
        let central = sampled.central_mass_fraction();
        if central < 1.0 - 1e-10 {
            bail!(
                "catalog[{i}]: data mass outside the central half of the box (fraction inside = {central})"
            );
        }
    }
    if cfg.experiment == Experiment::Scatter || cfg.experiment == Experiment::Cauchy {
        // smallness of the system-B datum
        let data = build_data(cfg, &grid)?;
        if SystemKind::from(cfg.system) == SystemKind::B && !data.is_admissible(SystemKind::B) {
            bail!(
                "catalog: system-B smallness violated, measured surrogate gamma = {:.4} (needs 2 gamma < 1)",
                data.gamma()
            );
        }
    }
    if cfg.resonance.order > 1 {
        bail!("resonance.order: only orders 0 and 1 are built");
    }
    {
        let [m1, m2, m] = cfg.resonance.masses;
        let [s1, s2, s] = cfg.resonance.signs;
        if s.abs() != 1 || s1.abs() != 1 || s2.abs() != 1 {
            bail!("resonance.signs: entries must be +1 or -1");
        }
        let defect = (s as f64 * m - s1 as f64 * m1 - s2 as f64 * m2).abs();
        if defect > 1e-12 * m.abs().max(1.0) {
            bail!("resonance.masses: not resonant, defect {defect:e}");
        }
    }
    Ok(())
}

fn entry_profile(entry: &CatalogEntry) -> AnalyticProfile<f64> {
    AnalyticProfile::new(vec![GaussianTerm {
        amplitude: C64::new(entry.amplitude[0], entry.amplitude[1]),
        center: entry.center,
        width: entry.width,
        power: entry.power,
        shift: entry.shift,
    }])
}

/// Assemble the scattering datum from the catalog (plus components; mirrors
/// are generated by the core constructor).
pub fn build_data(cfg: &ExperimentConfig, grid: &Grid<f64>) -> Result<ScatteringData<f64>> {
    let mut f1_terms = Vec::new();
    let mut f2_terms = Vec::new();
    for entry in &cfg.catalog {
        let term = GaussianTerm {
            amplitude: C64::new(entry.amplitude[0], entry.amplitude[1]),
            center: entry.center,
            width: entry.width,
            power: entry.power,
            shift: entry.shift,
        };
        match entry.component.as_str() {
            "f1" => f1_terms.push(term),
            _ => f2_terms.push(term),
        }
    }
    let f1 = if f1_terms.is_empty() {
        None
    } else {
        Some(AnalyticProfile::new(f1_terms))
    };
    let f2 = if f2_terms.is_empty() {
        None
    } else {
        Some(AnalyticProfile::new(f2_terms))
    };
    Ok(ScatteringData::from_catalog(grid, cfg.mass, f1, f2))
}

/// Merge configured thresholds over the documented defaults for one
/// experiment; unknown threshold keys are rejected.
pub fn resolve_thresholds(
    cfg: &ExperimentConfig,
    defaults: &[(&str, f64)],
) -> Result<BTreeMap<String, f64>> {
    let mut out: BTreeMap<String, f64> =
        defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in &cfg.thresholds {
        if !out.contains_key(k) {
            bail!(
                "thresholds.{k}: unknown key for the {} experiment (known: {})",
                cfg.experiment.name(),
                defaults
                    .iter()
                    .map(|(k, _)| *k)
                    .collect::<Vec<_>>()
                    .join(", ")
            );
        }
        out.insert(k.clone(), *v);
    }
    Ok(out)
}
