//! JSON manifest tying count files to measurement settings.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use pixent::mub::BasisLabel;
use pixent::state::{CountMatrix, MeasurementSetting};

use crate::config::JtmaConfig;
use crate::failure::{Failure, ResultExt};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub d: usize,
    /// Layout file, relative to the manifest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jtma: Option<JtmaConfig>,
    /// Forward-model details for simulated data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelInfo>,
    pub settings: Vec<SettingEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelInfo {
    pub total_pairs: u64,
    pub noise: f64,
    /// Overlap of the simulated state with the maximally entangled state.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingEntry {
    pub basis_a: BasisLabel,
    pub basis_b: BasisLabel,
    pub conjugate_b: bool,
    /// Count CSV, relative to the manifest.
    pub file: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acquisition_time: Option<f64>,
}

impl SettingEntry {
    pub fn setting(&self) -> MeasurementSetting {
        MeasurementSetting::new(self.basis_a, self.basis_b, self.conjugate_b)
    }
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self, Failure> {
        let file = File::open(path).data(format!("opening {}", path.display()))?;
        serde_json::from_reader(file).data(format!("parsing {}", path.display()))
    }

    pub fn write(&self, path: &Path) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(self).data("serializing manifest")?;
        std::fs::write(path, text + "\n").data(format!("writing {}", path.display()))
    }

    /// Loads every count file, resolved against `base`, and checks that all
    /// matrices are `d × d`.
    pub fn load_counts(&self, base: &Path) -> Result<Vec<CountMatrix>, Failure> {
        if self.d == 0 {
            return Err(Failure::data("manifest dimension must be positive"));
        }
        self.settings
            .iter()
            .map(|entry| {
                let path = base.join(&entry.file);
                let file = File::open(&path).data(format!("opening {}", path.display()))?;
                let mut counts =
                    CountMatrix::read_csv(file, entry.setting()).data(format!("reading {}", path.display()))?;
                if counts.d() != self.d {
                    return Err(Failure::data(format!(
                        "{} is {}x{} but the manifest declares d = {}",
                        path.display(),
                        counts.d(),
                        counts.d(),
                        self.d
                    )));
                }
                counts.acquisition_time = entry.acquisition_time;
                Ok(counts)
            })
            .collect()
    }
}

/// Short file-name stem for a setting, such as `wf0` or `standard`.
pub fn setting_stem(s: &MeasurementSetting) -> String {
    let label = |b: BasisLabel| match b {
        BasisLabel::Standard => "standard".to_string(),
        BasisLabel::Wf(k) => format!("wf{k}"),
    };
    if s.basis_a == s.basis_b {
        label(s.basis_a)
    } else {
        format!("{}_{}", label(s.basis_a), label(s.basis_b))
    }
}

/// Parses `wf:0,wf:1,standard` into matched settings: the same basis on both
/// arms, conjugated on the second arm for WF bases.
pub fn parse_bases(list: &str) -> Result<Vec<MeasurementSetting>, Failure> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let label: BasisLabel = s.parse().map_err(|e| Failure::usage(format!("--bases: {e}")))?;
            Ok(match label {
                BasisLabel::Standard => MeasurementSetting::standard(),
                BasisLabel::Wf(k) => MeasurementSetting::wf(k),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bases_list() {
        let s = parse_bases("wf:0, wf:k=2,standard").unwrap();
        assert_eq!(s, vec![MeasurementSetting::wf(0), MeasurementSetting::wf(2), MeasurementSetting::standard()]);
        assert!(parse_bases("wf:x").is_err());
    }

    #[test]
    fn stems() {
        assert_eq!(setting_stem(&MeasurementSetting::wf(3)), "wf3");
        assert_eq!(setting_stem(&MeasurementSetting::standard()), "standard");
    }

    #[test]
    fn json_round_trip() {
        let m = Manifest {
            d: 3,
            layout: Some("layout.json".into()),
            seed: Some(1),
            jtma: Some(JtmaConfig::default()),
            model: None,
            settings: vec![SettingEntry {
                basis_a: BasisLabel::Wf(0),
                basis_b: BasisLabel::Wf(0),
                conjugate_b: true,
                file: "counts_wf0.csv".into(),
                acquisition_time: Some(2.5),
            }],
        };
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("\"wf:k=0\""));
        assert_eq!(serde_json::from_str::<Manifest>(&text).unwrap(), m);
    }
}
