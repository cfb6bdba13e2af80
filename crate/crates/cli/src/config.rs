use std::path::{Path, PathBuf};

use airwrite_core::blobs::Connectivity;
use airwrite_core::pipeline::PipelineConfig;
use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

/// Pipeline settings shared by every command that runs recognition. Flags
/// override values from `--config`, which override the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct PipelineFlags {
    /// TOML file with pipeline settings (same field names as the report's config)
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Template directory laid out as <label>/<variant>.pgm; built-in set if omitted
    #[arg(long, value_name = "DIR")]
    pub templates: Option<PathBuf>,
    /// Odd Gaussian window size (>= 3)
    #[arg(long)]
    pub gaussian_window: Option<usize>,
    /// Edge threshold on the 0..255 stretched edge image
    #[arg(long)]
    pub edge_threshold: Option<f64>,
    /// Intersect the red mask with the edge image
    #[arg(long, value_enum)]
    pub edge_gate: Option<OnOff>,
    /// Also require frame-to-frame change
    #[arg(long)]
    pub motion_gate: bool,
    #[arg(long)]
    pub min_red: Option<u8>,
    /// Required margin of red over the larger of green and blue
    #[arg(long)]
    pub min_dominance: Option<u8>,
    /// Per-channel change that counts as motion
    #[arg(long)]
    pub diff_threshold: Option<u8>,
    /// Pixel connectivity for blob labeling: 4 or 8
    #[arg(long)]
    pub connectivity: Option<u8>,
    #[arg(long)]
    pub min_blob_area: Option<usize>,
    /// Still frames that end a character
    #[arg(long)]
    pub dwell_frames: Option<usize>,
    /// Movement in pixels that still counts as holding still
    #[arg(long)]
    pub dwell_epsilon: Option<f64>,
    /// Frames without the fingertip that produce a space
    #[arg(long)]
    pub absence_frames: Option<usize>,
}

impl PipelineFlags {
    pub fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => read_config(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = &self.templates {
            cfg.templates = Some(v.clone());
        }
        if let Some(v) = self.gaussian_window {
            cfg.gaussian_window = v;
        }
        if let Some(v) = self.edge_threshold {
            cfg.edge_threshold = v;
        }
        if let Some(v) = self.edge_gate {
            cfg.edge_gate = v == OnOff::On;
        }
        if self.motion_gate {
            cfg.red.use_motion_gate = true;
        }
        if let Some(v) = self.min_red {
            cfg.red.min_red = v;
        }
        if let Some(v) = self.min_dominance {
            cfg.red.min_dominance = v;
        }
        if let Some(v) = self.diff_threshold {
            cfg.red.diff_threshold = v;
        }
        if let Some(n) = self.connectivity {
            cfg.connectivity = match Connectivity::from_count(n) {
                Some(c) => c,
                None => bail!("--connectivity must be 4 or 8, got {n}"),
            };
        }
        if let Some(v) = self.min_blob_area {
            cfg.min_blob_area = v;
        }
        if let Some(v) = self.dwell_frames {
            cfg.tracker.dwell_frames = v;
        }
        if let Some(v) = self.dwell_epsilon {
            cfg.tracker.dwell_epsilon = v;
        }
        if let Some(v) = self.absence_frames {
            cfg.tracker.absence_frames = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read_config(path: &Path) -> Result<PipelineConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
