//! Run manifests: the fully resolved configuration of a run plus what it
//! produced, in the same `key = value` format the config loader reads.
//! Feeding a manifest back through `--config` reproduces the run.

use std::path::Path;

use super::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default)]
pub struct RunManifest {
    pub command: String,
    pub config: Option<RunConfig>,
    pub samples: usize,
    pub diverged_at: Option<usize>,
    pub csv: Option<String>,
    pub svg: Option<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            command: command.to_string(),
            config: Some(config.clone()),
            ..Self::default()
        }
    }

    pub fn with_outputs(mut self, csv: &Path, svg: &Path) -> Self {
        self.csv = Some(csv.display().to_string());
        self.svg = Some(svg.display().to_string());
        self
    }

    pub fn render(&self) -> String {
        let mut out = String::from("# cartpole run manifest\n");
        let mut line = |k: &str, v: &str| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        };
        line("version", VERSION);
        line("command", &self.command);
        if let Some(cfg) = &self.config {
            for (k, v) in cfg.entries() {
                line(k, &v);
            }
        }
        line("samples", &self.samples.to_string());
        line("diverged", if self.diverged_at.is_some() { "true" } else { "false" });
        if let Some(k) = self.diverged_at {
            line("diverged_at", &k.to_string());
        }
        if let Some(csv) = &self.csv {
            line("csv", csv);
        }
        if let Some(svg) = &self.svg {
            line("svg", svg);
        }
        out
    }
}
