//! Sweep configuration: a single JSON document, overridable field by
//! field from the command line.

use catalynet::probes::{ProbeFamily, ProbeSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeBlock {
    pub family: String,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub m: usize,
    pub d: usize,
    #[serde(default)]
    pub s: usize,
}

impl ProbeBlock {
    pub fn to_spec(&self) -> Result<ProbeSpec, String> {
        let family = ProbeFamily::parse(&self.family).map_err(|e| e.to_string())?;
        let spec = ProbeSpec {
            family,
            amplitude: self.amplitude,
            theta: self.theta,
            m: self.m,
            d: self.d,
            s: self.s,
        };
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridBlock {
    /// swept parameter: amplitude | theta | m | d | s | n_resource | eta | phi_bar
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Linear
}

impl GridBlock {
    pub fn points(&self) -> Result<Vec<f64>, String> {
        if self.count == 0 {
            return Err("grid count must be >= 1".into());
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        match self.spacing {
            Spacing::Linear => {
                let step = (self.stop - self.start) / (self.count - 1) as f64;
                let mut pts: Vec<f64> =
                    (0..self.count).map(|k| self.start + step * k as f64).collect();
                // endpoints exact regardless of accumulation
                pts[0] = self.start;
                *pts.last_mut().unwrap() = self.stop;
                Ok(pts)
            }
            Spacing::Log => {
                if self.start <= 0.0 || self.stop <= 0.0 {
                    return Err("log spacing needs positive endpoints".into());
                }
                let lstart = self.start.ln();
                let lstop = self.stop.ln();
                let step = (lstop - lstart) / (self.count - 1) as f64;
                let mut pts: Vec<f64> =
                    (0..self.count).map(|k| (lstart + step * k as f64).exp()).collect();
                pts[0] = self.start;
                *pts.last_mut().unwrap() = self.stop;
                Ok(pts)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub probe: ProbeBlock,
    pub sweep: GridBlock,
    /// requested outputs, subset of {H, N_bar, P, G, R, delta_phi, H_l}
    pub outputs: Vec<String>,
    /// reference probe for G/R (must be the uncatalyzed family at the
    /// same amplitude and d)
    #[serde(default)]
    pub reference: Option<ProbeBlock>,
    /// transmittance for H_l
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// phase for delta_phi
    #[serde(default)]
    pub phi_bar: f64,
    pub out: String,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

fn default_eta() -> f64 {
    0.7
}

fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

pub const KNOWN_OUTPUTS: &[&str] = &["H", "N_bar", "P", "G", "R", "delta_phi", "H_l"];
pub const KNOWN_PARAMETERS: &[&str] =
    &["amplitude", "theta", "m", "d", "s", "n_resource", "eta", "phi_bar"];

impl SweepConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.outputs.is_empty() {
            return Err("config.outputs: at least one output is required".into());
        }
        for o in &self.outputs {
            if !KNOWN_OUTPUTS.contains(&o.as_str()) {
                return Err(format!(
                    "config.outputs: unknown output '{o}' (expected one of {KNOWN_OUTPUTS:?})"
                ));
            }
        }
        if !KNOWN_PARAMETERS.contains(&self.sweep.parameter.as_str()) {
            return Err(format!(
                "config.sweep.parameter: unknown parameter '{}' (expected one of {KNOWN_PARAMETERS:?})",
                self.sweep.parameter
            ));
        }
        let needs_ref = self.outputs.iter().any(|o| o == "G" || o == "R");
        if needs_ref && self.reference.is_none() {
            return Err("config.reference: G and R outputs need a reference probe block".into());
        }
        self.sweep.points()?;
        self.probe.to_spec().map_err(|e| format!("config.probe: {e}"))?;
        if let Some(r) = &self.reference {
            r.to_spec().map_err(|e| format!("config.reference: {e}"))?;
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(format!("config.eta: {} outside [0, 1]", self.eta));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        let g = GridBlock { parameter: "theta".into(), start: 0.1, stop: 1.3, count: 7, spacing: Spacing::Linear };
        let pts = g.points().unwrap();
        assert_eq!(pts.len(), 7);
        assert_eq!(pts[0], 0.1);
        assert_eq!(*pts.last().unwrap(), 1.3);
        let g = GridBlock { parameter: "n_resource".into(), start: 0.01, stop: 2.0, count: 9, spacing: Spacing::Log };
        let pts = g.points().unwrap();
        assert_eq!(pts[0], 0.01);
        assert_eq!(*pts.last().unwrap(), 2.0);
        let one = GridBlock { parameter: "eta".into(), start: 0.5, stop: 0.9, count: 1, spacing: Spacing::Linear };
        assert_eq!(one.points().unwrap(), vec![0.5]);
    }

    #[test]
    fn config_validation_errors() {
        let mut cfg = SweepConfig {
            probe: ProbeBlock { family: "cwc".into(), amplitude: 1.0, theta: 0.7, m: 2, d: 3, s: 0 },
            sweep: GridBlock { parameter: "theta".into(), start: 0.0, stop: 1.0, count: 5, spacing: Spacing::Linear },
            outputs: vec!["H".into()],
            reference: None,
            eta: 0.7,
            phi_bar: 0.0,
            out: "x.csv".into(),
            format: OutputFormat::Csv,
        };
        assert!(cfg.validate().is_ok());
        cfg.outputs = vec!["G".into()];
        assert!(cfg.validate().unwrap_err().contains("reference"));
        cfg.outputs = vec!["bogus".into()];
        assert!(cfg.validate().unwrap_err().contains("unknown output"));
        cfg.outputs = vec!["H".into()];
        cfg.sweep.parameter = "bogus".into();
        assert!(cfg.validate().unwrap_err().contains("unknown parameter"));
    }
}
