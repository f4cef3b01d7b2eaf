//! Run configuration: one JSON document, with `--set key.path=value`
//! overrides applied to the raw tree before typed parsing.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::discretization::{build_grid, Grid, Side, Sponge};
use crate::error::{Error, Result};
use crate::experiments::FSpec;
use crate::geometry::{outward_increasing_nus, LayerIndexSet, LayeredPartition, Locus};
use crate::medium::{MediumProfile, Perturbation};
use crate::oracle1d::Stratified;
use crate::solver::SolveOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    /// Parallel slabs.
    Planar,
    /// Concentric cylinders, circles for `N = 2`.
    Cylinders,
    /// Two regions split by a cone around the `x_N` axis.
    Cone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub kind: GeometryKind,
    #[serde(default)]
    pub breakpoints: Vec<f64>,
    #[serde(default)]
    pub axis: Option<Vec<f64>>,
    #[serde(default)]
    pub half_angle: Option<f64>,
    /// Layer index set; defaults to the finite set the breakpoints define.
    #[serde(default)]
    pub window: Option<LayerIndexSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExtensionRule {
    /// `nu_l = nu0 + step |l|`.
    OutwardIncreasing { nu0: f64, step: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    /// One value per layer of the window, lowest index first.
    #[serde(default)]
    pub nus: Option<Vec<f64>>,
    #[serde(default)]
    pub extension_rule: Option<ExtensionRule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "N")]
    pub dim: usize,
    pub rmax: f64,
    pub h: f64,
    #[serde(default)]
    pub sponge: Option<Sponge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideChoice {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    Both,
}

impl SideChoice {
    pub fn sides(self) -> Vec<Side> {
        match self {
            SideChoice::Plus => vec![Side::Plus],
            SideChoice::Minus => vec![Side::Minus],
            SideChoice::Both => vec![Side::Plus, Side::Minus],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityConfig {
    #[serde(default = "d_inner")]
    pub inner: f64,
    #[serde(default = "d_outer")]
    pub outer: f64,
    /// Spectral parameter `z = re + i im`.
    #[serde(default = "d_z")]
    pub z: [f64; 2],
    /// Center of the manufactured Gaussian `exp(-|x-c|^2/(2w^2) + i k.x)`.
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    #[serde(default = "d_width")]
    pub width: f64,
    #[serde(default)]
    pub wave: Option<Vec<f64>>,
    #[serde(default = "d_delta")]
    pub xi_delta: f64,
    /// Largest admissible residual ratio between `h/2` and `h`.
    #[serde(default = "d_ratio")]
    pub max_ratio: f64,
}

fn d_inner() -> f64 {
    1.0
}
fn d_outer() -> f64 {
    4.0
}
fn d_z() -> [f64; 2] {
    [1.0, 0.0]
}
fn d_width() -> f64 {
    2.0f64.sqrt()
}
fn d_delta() -> f64 {
    0.75
}
fn d_ratio() -> f64 {
    0.7
}

impl Default for IdentityConfig {
    fn default() -> Self {
        Self {
            inner: d_inner(),
            outer: d_outer(),
            z: d_z(),
            center: None,
            width: d_width(),
            wave: None,
            xi_delta: d_delta(),
            max_ratio: d_ratio(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "d_hs")]
    pub hs: Vec<f64>,
    #[serde(default = "d_etas")]
    pub etas: Vec<f64>,
    #[serde(default = "d_xmax")]
    pub x_max: f64,
    #[serde(default = "d_source")]
    pub source: crate::oracle1d::Source,
    /// Largest admissible relative error on rows with `h <= tol_h`.
    #[serde(default = "d_tol")]
    pub tol: f64,
    #[serde(default = "d_tol_h")]
    pub tol_h: f64,
}

fn d_hs() -> Vec<f64> {
    vec![1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0]
}
fn d_etas() -> Vec<f64> {
    vec![0.0, 0.01]
}
fn d_xmax() -> f64 {
    4.0
}
fn d_source() -> crate::oracle1d::Source {
    crate::oracle1d::Source::Point {
        at: 0.0,
        strength: 1.0,
    }
}
fn d_tol() -> f64 {
    0.02
}
fn d_tol_h() -> f64 {
    1.0 / 64.0
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            hs: d_hs(),
            etas: d_etas(),
            x_max: d_xmax(),
            source: d_source(),
            tol: d_tol(),
            tol_h: d_tol_h(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Free label copied into the manifest.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub lambda_list: Option<Vec<f64>>,
    #[serde(default)]
    pub lambda_grid: Option<LambdaGrid>,
    #[serde(default = "d_eta0")]
    pub eta0: f64,
    #[serde(default = "d_factor")]
    pub factor: f64,
    #[serde(default = "d_count")]
    pub count: usize,
    #[serde(default = "d_side")]
    pub side: SideChoice,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub f_spec: FSpec,
    /// `eta` of the single `solve` command.
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub solver: SolveOptions,
    #[serde(default = "d_cauchy")]
    pub cauchy_ratio_max: f64,
    #[serde(default = "d_band")]
    pub radiation_band: f64,
    #[serde(default = "d_samples")]
    pub samples: usize,
    #[serde(default = "d_plateau")]
    pub plateau_tol: f64,
    #[serde(default)]
    pub lambda0: f64,
    #[serde(default)]
    pub identity: IdentityConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
}

fn d_eta0() -> f64 {
    1.0
}
fn d_factor() -> f64 {
    2.0
}
fn d_count() -> usize {
    8
}
fn d_side() -> SideChoice {
    SideChoice::Plus
}
fn d_cauchy() -> f64 {
    0.75
}
fn d_band() -> f64 {
    2.0
}
fn d_samples() -> usize {
    4
}
fn d_plateau() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "d_dir")]
    pub dir: String,
    #[serde(default = "d_formats")]
    pub formats: Vec<Format>,
}

fn d_dir() -> String {
    "out".into()
}
fn d_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: d_dir(),
            formats: d_formats(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub medium: MediumConfig,
    #[serde(default)]
    pub perturbation: Option<Perturbation>,
    pub grid: GridConfig,
    #[serde(default = "d_experiment")]
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
}

fn d_experiment() -> ExperimentConfig {
    serde_json::from_value(Value::Object(Default::default())).expect("defaults parse")
}

fn cfg_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.into(),
        message: message.into(),
    }
}

/// Sets `path` (dot separated) in `tree` to `raw`, read as JSON when it
/// parses and as a string otherwise. Missing objects along the path are
/// created.
pub fn apply_override(tree: &mut Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| cfg_err(assignment, "override must look like key.path=value"))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = tree;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        if key.is_empty() {
            return Err(cfg_err(path, "empty key segment"));
        }
        let last = i + 1 == keys.len();
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(key.to_string(), value);
                    return Ok(());
                }
                map.entry(key.to_string())
                    .or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let idx: usize = key
                    .parse()
                    .map_err(|_| cfg_err(path, format!("`{key}` is not an array index")))?;
                let len = items.len();
                let slot = items.get_mut(idx).ok_or_else(|| {
                    cfg_err(path, format!("index {idx} out of range (length {len})"))
                })?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(cfg_err(path, format!("`{key}` is below a scalar"))),
        };
    }
    Ok(())
}

impl RunConfig {
    /// Parses JSON text, applies the overrides and checks the cross-field
    /// preconditions.
    pub fn parse(text: &str, overrides: &[String]) -> Result<(Self, Value)> {
        let mut tree: Value = serde_json::from_str(text).map_err(|e| {
            cfg_err(
                &format!("line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        for o in overrides {
            apply_override(&mut tree, o)?;
        }
        let cfg: RunConfig = serde_path_error(tree.clone())?;
        cfg.check()?;
        Ok((cfg, tree))
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<(Self, Value)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| cfg_err(&path.display().to_string(), e.to_string()))?;
        Self::parse(&text, overrides)
    }

    /// Hex SHA-256 of the compact JSON of the resolved configuration.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    fn check(&self) -> Result<()> {
        let g = &self.grid;
        if !(2..=3).contains(&g.dim) {
            return Err(cfg_err("grid.N", "must be 2 or 3"));
        }
        if !(g.rmax > 0.0 && g.h > 0.0) {
            return Err(cfg_err("grid", "rmax and h must be positive"));
        }
        match (&self.medium.nus, &self.medium.extension_rule) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(cfg_err(
                    "medium",
                    "give exactly one of `nus` and `extension_rule`",
                ))
            }
            _ => {}
        }
        let e = &self.experiment;
        if e.lambda_list.is_some() && e.lambda_grid.is_some() {
            return Err(cfg_err(
                "experiment",
                "give at most one of `lambda_list` and `lambda_grid`",
            ));
        }
        if let Some(lg) = &e.lambda_grid {
            if lg.count == 0 || !(lg.stop >= lg.start) {
                return Err(cfg_err(
                    "experiment.lambda_grid",
                    "needs count >= 1 and stop >= start",
                ));
            }
        }
        if let Some(a) = &self.geometry.axis {
            if a.len() != g.dim {
                return Err(cfg_err(
                    "geometry.axis",
                    format!("length {} != N = {}", a.len(), g.dim),
                ));
            }
        }
        if self.geometry.kind == GeometryKind::Cone && self.geometry.half_angle.is_none() {
            return Err(cfg_err("geometry.half_angle", "required for a cone"));
        }
        e.solver
            .check()
            .map_err(|err| cfg_err("experiment.solver", err.to_string()))
    }

    pub fn partition(&self) -> Result<LayeredPartition> {
        let g = &self.geometry;
        let dim = self.grid.dim;
        match g.kind {
            GeometryKind::Planar => LayeredPartition::planar_stack(
                dim,
                g.breakpoints.clone(),
                g.axis.clone(),
                g.window.clone(),
            ),
            GeometryKind::Cylinders => {
                LayeredPartition::concentric_cylinders(dim, g.breakpoints.clone(), g.window.clone())
            }
            GeometryKind::Cone => LayeredPartition::two_region(
                dim,
                Locus::Cone {
                    half_angle: g.half_angle.unwrap_or_default(),
                },
            ),
        }
    }

    pub fn nus(&self, p: &LayeredPartition) -> Vec<f64> {
        match (&self.medium.nus, &self.medium.extension_rule) {
            (Some(n), _) => n.clone(),
            (None, Some(ExtensionRule::OutwardIncreasing { nu0, step })) => {
                outward_increasing_nus(&p.index_set, *nu0, *step)
            }
            (None, None) => Vec::new(),
        }
    }

    pub fn medium(&self) -> Result<MediumProfile> {
        let p = self.partition()?;
        let nus = self.nus(&p);
        MediumProfile::new(p, nus, self.perturbation.clone())
    }

    pub fn grid(&self) -> Result<Grid> {
        build_grid(
            self.grid.dim,
            self.grid.rmax,
            self.grid.h,
            self.grid.sponge.clone(),
        )
    }

    /// The planar medium reduced to its normal axis.
    pub fn stratified(&self) -> Result<Stratified> {
        if self.geometry.kind != GeometryKind::Planar {
            return Err(cfg_err(
                "geometry.kind",
                "the 1-D oracle needs a planar stack",
            ));
        }
        let p = self.partition()?;
        let nus = self.nus(&p);
        if nus.len() != self.geometry.breakpoints.len() + 1 {
            return Err(cfg_err(
                "medium",
                "the 1-D oracle needs one nu per slab of the full stack",
            ));
        }
        Stratified::new(self.geometry.breakpoints.clone(), nus)
    }

    pub fn lambdas(&self) -> Result<Vec<f64>> {
        let e = &self.experiment;
        match (&e.lambda_list, &e.lambda_grid) {
            (Some(l), _) => Ok(l.clone()),
            (None, Some(g)) if g.count == 1 => Ok(vec![g.start]),
            (None, Some(g)) => {
                let step = (g.stop - g.start) / (g.count - 1) as f64;
                Ok((0..g.count).map(|i| g.start + i as f64 * step).collect())
            }
            (None, None) => Err(cfg_err("experiment.lambda_list", "no lambda values given")),
        }
    }
}

/// Typed parse that names the offending key path.
fn serde_path_error(tree: Value) -> Result<RunConfig> {
    RunConfig::deserialize(tree).map_err(|e| {
        let msg = e.to_string();
        let key = msg
            .split('`')
            .nth(1)
            .map(str::to_string)
            .unwrap_or_else(|| "<root>".into());
        cfg_err(&key, msg)
    })
}
