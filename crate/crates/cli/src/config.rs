//! Run configuration: built-in defaults, then a `key = value` file, then
//! command-line flags.

use std::path::Path;

use wvc_core::classify::ModelConfig;
use wvc_core::patches::{BoundaryMode, DEFAULT_PATCH_COUNTS};
use wvc_core::pipeline::TrainOptions;
use wvc_core::select::DEFAULT_SELECT_K;
use wvc_core::wavelet::WaveletConfig;

use crate::error::{CliError, Result};

/// Histogram bins used when a histogram is switched on without a count.
pub const DEFAULT_HIST_BINS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub levels: usize,
    /// `(side, count)` pairs.
    pub patch_counts: Vec<(usize, usize)>,
    pub select_k: usize,
    pub seed: u64,
    pub hist_bins: Option<usize>,
    pub feedback_k: usize,
    pub boundary: BoundaryMode,
    pub min_side: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            levels: WaveletConfig::default().levels,
            patch_counts: DEFAULT_PATCH_COUNTS.to_vec(),
            select_k: DEFAULT_SELECT_K,
            seed: 0,
            hist_bins: None,
            feedback_k: 2,
            boundary: BoundaryMode::Valid,
            min_side: None,
        }
    }
}

/// Settings that were asked for explicitly, by file or flag.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub levels: Option<usize>,
    pub patch_counts: Option<Vec<(usize, usize)>>,
    pub select_k: Option<usize>,
    pub seed: Option<u64>,
    pub hist_bins: Option<Option<usize>>,
    pub feedback_k: Option<usize>,
    pub boundary: Option<BoundaryMode>,
    pub min_side: Option<Option<usize>>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn count(key: &str, value: &str) -> Result<usize> {
    match value.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(usage(format!(
            "{key}: expected a positive integer, got `{value}`"
        ))),
    }
}

fn optional_count(key: &str, value: &str) -> Result<Option<usize>> {
    match value {
        "off" | "none" | "0" => Ok(None),
        "on" if key == "hist_bins" => Ok(Some(DEFAULT_HIST_BINS)),
        _ => count(key, value).map(Some),
    }
}

/// `4x250,8x250`: side `x` count, comma separated.
fn patch_counts(value: &str) -> Result<Vec<(usize, usize)>> {
    value
        .split(',')
        .map(|item| {
            let (side, n) = item
                .trim()
                .split_once('x')
                .ok_or_else(|| usage(format!("patch_counts: `{item}` is not SIDExCOUNT")))?;
            Ok((
                count("patch side", side.trim())?,
                count("patch count", n.trim())?,
            ))
        })
        .collect()
}

impl Overrides {
    /// Parses a flat `key = value` file. Blank lines and lines starting with
    /// `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut o = Overrides::default();
        let mut seen = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at = |msg: String| usage(format!("config line {}: {msg}", n + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected key = value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key) {
                return Err(at(format!("`{key}` given twice")));
            }
            seen.push(key);
            let wrap = |e: CliError| at(e.to_string());
            match key {
                "levels" => o.levels = Some(count(key, value).map_err(wrap)?),
                "patch_counts" => o.patch_counts = Some(patch_counts(value).map_err(wrap)?),
                "select_k" => o.select_k = Some(count(key, value).map_err(wrap)?),
                "seed" => {
                    o.seed = Some(
                        value
                            .parse()
                            .map_err(|_| at(format!("seed: `{value}` is not an integer")))?,
                    )
                }
                "hist_bins" => o.hist_bins = Some(optional_count(key, value).map_err(wrap)?),
                "feedback_k" => o.feedback_k = Some(count(key, value).map_err(wrap)?),
                "boundary" => {
                    o.boundary = Some(match value {
                        "valid" => BoundaryMode::Valid,
                        "periodic" => BoundaryMode::Periodic,
                        _ => {
                            return Err(at(format!(
                                "boundary: expected valid or periodic, got `{value}`"
                            )))
                        }
                    })
                }
                "min_side" => o.min_side = Some(optional_count(key, value).map_err(wrap)?),
                _ => return Err(at(format!("unknown key `{key}`"))),
            }
        }
        Ok(o)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// `other` wins wherever it says something.
    pub fn then(self, other: Overrides) -> Overrides {
        Overrides {
            levels: other.levels.or(self.levels),
            patch_counts: other.patch_counts.or(self.patch_counts),
            select_k: other.select_k.or(self.select_k),
            seed: other.seed.or(self.seed),
            hist_bins: other.hist_bins.or(self.hist_bins),
            feedback_k: other.feedback_k.or(self.feedback_k),
            boundary: other.boundary.or(self.boundary),
            min_side: other.min_side.or(self.min_side),
        }
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let d = RunConfig::default();
        let cfg = RunConfig {
            levels: self.levels.unwrap_or(d.levels),
            patch_counts: self.patch_counts.clone().unwrap_or(d.patch_counts),
            select_k: self.select_k.unwrap_or(d.select_k),
            seed: self.seed.unwrap_or(d.seed),
            hist_bins: self.hist_bins.unwrap_or(d.hist_bins),
            feedback_k: self.feedback_k.unwrap_or(d.feedback_k),
            boundary: self.boundary.unwrap_or(d.boundary),
            min_side: self.min_side.unwrap_or(d.min_side),
        };
        cfg.model_config()
            .wavelet
            .validate()
            .map_err(|e| usage(e.to_string()))?;
        if let Some(b) = cfg.hist_bins {
            if b < 2 {
                return Err(usage("hist_bins: need at least 2 bins"));
            }
        }
        Ok(cfg)
    }

    /// Applies the explicitly requested encoding settings to a model's
    /// configuration.
    pub fn apply_to(&self, cfg: &mut ModelConfig) {
        if let Some(l) = self.levels {
            cfg.wavelet.levels = l;
        }
        if let Some(h) = self.hist_bins {
            cfg.hist_bins = h;
        }
        if let Some(m) = self.min_side {
            cfg.min_side = m;
        }
    }
}

impl RunConfig {
    pub fn model_config(&self) -> ModelConfig {
        ModelConfig {
            wavelet: WaveletConfig {
                levels: self.levels,
                ..WaveletConfig::default()
            },
            boundary: self.boundary,
            hist_bins: self.hist_bins,
            min_side: self.min_side,
            ..ModelConfig::default()
        }
    }

    pub fn train_options(&self) -> TrainOptions {
        TrainOptions {
            config: self.model_config(),
            patch_counts: self.patch_counts.clone(),
            select_k: Some(self.select_k),
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = Overrides::default().resolve().unwrap();
        assert_eq!(c.levels, 3);
        assert_eq!(
            c.patch_counts,
            vec![(4, 250), (8, 250), (12, 250), (16, 250)]
        );
        assert_eq!(c.select_k, 200);
        assert_eq!(c.seed, 0);
        assert_eq!(c.hist_bins, None);
        assert_eq!(c.boundary, BoundaryMode::Valid);
    }

    #[test]
    fn file_then_flags() {
        let file = Overrides::parse(
            "# comment\nlevels = 4\nseed=9\npatch_counts = 4x10, 8x5\nhist_bins = on\nboundary = periodic\n",
        )
        .unwrap();
        let flags = Overrides {
            seed: Some(3),
            ..Overrides::default()
        };
        let c = file.then(flags).resolve().unwrap();
        assert_eq!((c.levels, c.seed), (4, 3));
        assert_eq!(c.patch_counts, vec![(4, 10), (8, 5)]);
        assert_eq!(c.hist_bins, Some(64));
        assert_eq!(c.boundary, BoundaryMode::Periodic);
    }

    #[test]
    fn bad_lines_name_the_line() {
        for (text, needle) in [
            ("levels = 3\nfoo = 1\n", "line 2"),
            ("levels = 0\n", "positive"),
            ("levels\n", "key = value"),
            ("seed = 1\nseed = 2\n", "twice"),
            ("patch_counts = 4-10\n", "SIDExCOUNT"),
            ("boundary = wrap\n", "periodic"),
        ] {
            let e = Overrides::parse(text).unwrap_err();
            assert!(e.to_string().contains(needle), "{e}");
            assert_eq!(e.exit_code(), 1);
        }
    }

    #[test]
    fn too_many_levels_is_a_usage_error() {
        let o = Overrides {
            levels: Some(9),
            ..Overrides::default()
        };
        assert_eq!(o.resolve().unwrap_err().exit_code(), 1);
    }
}
