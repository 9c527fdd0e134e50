//! Run manifests written next to every output file.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    #[serde(rename = "H_min")]
    pub h_min: f64,
    #[serde(rename = "H_max")]
    pub h_max: f64,
    pub steps: usize,
    pub spacing: &'static str,
}

/// Uniform grid of `steps` points; a degenerate range gives one point.
pub fn linear_grid(h_min: f64, h_max: f64, steps: usize) -> Vec<f64> {
    if h_min == h_max || steps <= 1 {
        return vec![h_min];
    }
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            let t = i as f64 / last;
            // pin the end point exactly
            if i + 1 == steps {
                h_max
            } else {
                h_min + t * (h_max - h_min)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub command: String,
    pub parameters: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    pub tolerances: Map<String, Value>,
    pub version: String,
    pub features: Vec<&'static str>,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, command_line: Vec<String>) -> Self {
        Self {
            command_line,
            command: command.to_string(),
            parameters: Map::new(),
            grid: None,
            tolerances: Map::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            features: enabled_features(),
            outputs: Vec::new(),
            wall_clock_seconds: 0.0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.parameters.insert(key.to_string(), to_value(value));
        self
    }

    pub fn tolerance(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.tolerances.insert(key.to_string(), to_value(value));
        self
    }

    pub fn output(&mut self, path: &Path) -> &mut Self {
        self.outputs.push(path.display().to_string());
        self
    }

    /// Writes `<primary>.manifest.json` and returns its path.
    pub fn write_beside(&mut self, primary: &Path, elapsed: Duration) -> io::Result<PathBuf> {
        self.wall_clock_seconds = elapsed.as_secs_f64();
        let path = manifest_path(primary);
        let text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        fs::write(&path, text + "\n")?;
        Ok(path)
    }
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).unwrap_or(Value::Null)
}

pub fn manifest_path(primary: &Path) -> PathBuf {
    with_suffix(primary, "manifest.json")
}

/// `foo.csv` + `area.csv` → `foo.csv.area.csv`.
pub fn with_suffix(primary: &Path, suffix: &str) -> PathBuf {
    let mut s = primary.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

fn enabled_features() -> Vec<&'static str> {
    let mut f = Vec::new();
    if cfg!(feature = "parallel") {
        f.push("parallel");
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(linear_grid(0.3, 0.3, 40), vec![0.3]);
        let g = linear_grid(0.05, 1.0, 40);
        assert_eq!(g.len(), 40);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[39], 1.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn suffix_paths() {
        assert_eq!(
            manifest_path(Path::new("out/a.csv")),
            PathBuf::from("out/a.csv.manifest.json")
        );
    }

    #[test]
    fn manifest_serializes() {
        let mut m = RunManifest::new("profile", vec!["rotcmc".into()]);
        m.param("H", 0.5)
            .tolerance("zero_tol", "error_multiple(50)");
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(v["parameters"]["H"], 0.5);
        assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    }
}
