use serde::{Deserialize, Serialize};

use crate::domain::{Domain, DomainModel};
use crate::hyperbolic::DiskPoint;
use crate::maps::MapDescriptor;
use crate::{constructions, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Bloch,
    IfsRun,
    ConstructT7,
    ConstructT8,
    Dw,
    VerifyLemmas,
    Qc,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Bloch => "bloch",
            Command::IfsRun => "ifs-run",
            Command::ConstructT7 => "construct-t7",
            Command::ConstructT8 => "construct-t8",
            Command::Dw => "dw",
            Command::VerifyLemmas => "verify-lemmas",
            Command::Qc => "qc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub radius: f64,
    pub rings: usize,
    pub spokes: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            radius: 1.2,
            rings: 24,
            spokes: 24,
        }
    }
}

/// A run description. [`parse_config`] fills every default the command
/// uses, so the parsed value is also the echoed, fully explicit config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<[f64; 2]>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub stretch: Option<Vec<f64>>,
    /// `[a0, w0]` for construct-t7, `[a, a1]` for construct-t8.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeConfig>,
    /// Witness threshold for bloch and qc.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Which lemmas verify-lemmas checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemmas: Option<Vec<u8>>,
    /// Subdisk radii for lemma 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Target `c` for lemma 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moduli: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            domain: None,
            map: None,
            z0: None,
            steps: None,
            seed: None,
            depth: None,
            tol: None,
            stretch: None,
            points: None,
            probe: None,
            threshold: None,
            lemmas: None,
            radii: None,
            samples: None,
            c: None,
            moduli: None,
            out: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub(crate) fn domain(&self) -> Result<Domain<f64>> {
        Domain::parse(self.domain.as_deref().unwrap_or_default())
    }

    pub(crate) fn map(&self) -> Result<MapDescriptor<f64>> {
        MapDescriptor::parse(self.map.as_deref().unwrap_or_default())
    }

    /// Fills the defaults of `self.command` and checks the fields it needs.
    pub fn with_defaults(mut self) -> Result<Self> {
        use Command::*;
        let cmd = self.command;
        let need = |field: &str, present: bool| {
            if present {
                Ok(())
            } else {
                Err(Error::Config(format!("command `{}` requires `{field}`", cmd.name())))
            }
        };
        match cmd {
            Bloch | Qc => {
                need("domain", self.domain.is_some())?;
                self.depth.get_or_insert(5.0);
                if cmd == Qc {
                    self.stretch.get_or_insert_with(|| vec![1.0, 2.0, 4.0]);
                }
            }
            IfsRun => {
                need("domain or map", self.domain.is_some() || self.map.is_some())?;
                self.steps.get_or_insert(50);
                self.tol.get_or_insert(1e-8);
                self.probe.get_or_insert_with(ProbeConfig::default);
                if self.map.is_none() {
                    self.seed.get_or_insert(0);
                }
            }
            Dw => {
                need("map", self.map.is_some())?;
                self.z0.get_or_insert([0.0, 0.0]);
                self.steps.get_or_insert(1000);
                self.tol.get_or_insert(1e-10);
            }
            ConstructT7 | ConstructT8 => {
                self.domain.get_or_insert_with(|| "horodisk(0,0.5)".into());
                self.steps.get_or_insert(if cmd == ConstructT7 { 20 } else { 12 });
                self.tol.get_or_insert(1e-8);
                self.probe.get_or_insert_with(ProbeConfig::default);
                if self.points.is_none() {
                    self.points = Some(self.default_points()?);
                }
            }
            VerifyLemmas => {
                let lemmas = self.lemmas.get_or_insert_with(|| vec![1, 2]);
                if lemmas.iter().any(|&l| l != 1 && l != 2) {
                    return Err(Error::Config(format!("`lemmas` may only contain 1 and 2, got {lemmas:?}")));
                }
                if lemmas.contains(&1) {
                    self.radii.get_or_insert_with(|| vec![2.0, 4.0, 8.0]);
                    self.samples.get_or_insert(1000);
                }
                if lemmas.contains(&2) {
                    self.c.get_or_insert([0.3, 0.0]);
                    self.moduli.get_or_insert_with(|| vec![0.9, 0.99, 0.999]);
                }
            }
        }
        self.check_specs()?;
        Ok(self)
    }

    fn default_points(&self) -> Result<Vec<[f64; 2]>> {
        let x = self.domain()?;
        let phi = x.riemann().ok_or_else(|| Error::NoRiemannMap(x.label()))?;
        let base = phi.to(DiskPoint::origin());
        let other = if self.command == Command::ConstructT7 {
            constructions::w0_at_distance(&x, base, 0.3, 0.0)?
        } else {
            // ρ_X-distance artanh(0.4) along the chart's real direction
            phi.to(DiskPoint::real(0.4))
        };
        Ok(vec![pair(base), pair(other)])
    }

    fn check_specs(&self) -> Result<()> {
        if self.domain.is_some() {
            self.domain()?;
        }
        if self.map.is_some() {
            self.map()?;
        }
        if let Some(points) = &self.points {
            if points.len() != 2 {
                return Err(Error::Config(format!("`points` needs exactly two points, got {}", points.len())));
            }
        }
        if let Some(p) = &self.probe {
            if !(p.radius > 0.0 && p.radius.is_finite()) {
                return Err(Error::Config(format!("probe radius must be positive, got {}", p.radius)));
            }
        }
        Ok(())
    }
}

fn pair(z: DiskPoint<f64>) -> [f64; 2] {
    [z.value().re, z.value().im]
}

impl RunConfig {
    /// Parses JSON without filling defaults; unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Parses a JSON run config, rejecting unknown keys, and fills defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    RunConfig::from_json(text)?.with_defaults()
}
