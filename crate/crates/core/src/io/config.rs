//! Serialized run configuration written next to every output.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::DEFAULT_DELTA_STAR;
use crate::batch::PairCategory;
use crate::error::Result;
use crate::kernels::KernelSpec;
use crate::quantile::{DEFAULT_GRID, DEFAULT_MARGIN};

pub const CONFIG_FILE: &str = "config.json";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    #[default]
    Coords,
    Gram,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairFilter {
    #[default]
    All,
    Within,
    Between,
}

impl PairFilter {
    pub fn keeps(self, category: Option<PairCategory>) -> bool {
        matches!(
            (self, category),
            (PairFilter::All, _)
                | (PairFilter::Within, Some(PairCategory::Within))
                | (PairFilter::Between, Some(PairCategory::Between))
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<PathBuf>,
    pub input_kind: InputKind,
    pub label_column: Option<String>,
    pub aperture_deg: f64,
    pub margin: f64,
    pub grid: usize,
    pub include_pair_points: bool,
    pub pairs: PairFilter,
    pub kernel: KernelSpec,
    pub delta_star: f64,
    pub normalized: bool,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: String::new(),
            inputs: Vec::new(),
            input_kind: InputKind::Coords,
            label_column: None,
            aperture_deg: 90.0,
            margin: DEFAULT_MARGIN,
            grid: DEFAULT_GRID,
            include_pair_points: true,
            pairs: PairFilter::All,
            kernel: KernelSpec::Linear,
            delta_star: DEFAULT_DELTA_STAR,
            normalized: false,
            seed: 0,
            out_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(CONFIG_FILE);
        let json = serde_json::to_string_pretty(self).expect("config serializes");
        std::fs::write(&path, json + "\n")?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| crate::error::DqfError::data(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            kernel: KernelSpec::Rbf { sigma: 0.5 },
            ..RunConfig::default()
        };
        let path = cfg.write(dir.path()).unwrap();
        assert_eq!(RunConfig::read(&path).unwrap(), cfg);
        assert_eq!(cfg.aperture_deg, 90.0);
        assert_eq!(cfg.grid, 100);
        assert!(cfg.include_pair_points);
    }

    #[test]
    fn pair_filter() {
        assert!(PairFilter::All.keeps(None));
        assert!(PairFilter::Between.keeps(Some(PairCategory::Between)));
        assert!(!PairFilter::Between.keeps(Some(PairCategory::Within)));
        assert!(!PairFilter::Within.keeps(None));
    }
}
