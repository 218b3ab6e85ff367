use serde::{Deserialize, Serialize};

use super::PipelineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Float,
    Exact,
}

impl std::str::FromStr for Backend {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "float" => Ok(Backend::Float),
            "exact" => Ok(Backend::Exact),
            other => Err(format!("unknown backend `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Per-factor reconstruction tolerance; the certificate allows `tol·K`.
    pub tol: f64,
    /// Closeness bound for subdivision steps.
    pub epsilon: f64,
    /// Pivot floor for the four-factor elimination.
    pub delta: f64,
    /// Cover radius in grid cells.
    pub radius: usize,
    pub max_factors: usize,
    pub backend: Backend,
    /// `|f|` at or below this counts as zero.
    pub zero_tol: f64,
    /// Largest residual near the zero set that localization may round to `Id`.
    pub snap_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tol: 1e-10,
            epsilon: 0.5,
            delta: 1e-6,
            radius: 3,
            max_factors: 100_000,
            backend: Backend::Float,
            zero_tol: 1e-12,
            snap_tol: 1e-9,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let positive = [
            ("tol", self.tol),
            ("epsilon", self.epsilon),
            ("delta", self.delta),
            ("zero_tol", self.zero_tol),
            ("snap_tol", self.snap_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(PipelineError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.epsilon > 0.5 {
            return Err(PipelineError::Config(format!("epsilon must be at most 1/2, got {}", self.epsilon)));
        }
        if self.radius == 0 {
            return Err(PipelineError::Config("radius must be at least one cell".into()));
        }
        if self.max_factors == 0 {
            return Err(PipelineError::Config("max_factors must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_large_epsilon_and_nonpositive_values() {
        let c = RunConfig { epsilon: 0.6, ..Default::default() };
        assert!(c.validate().is_err());
        let c = RunConfig { tol: 0.0, ..Default::default() };
        assert!(c.validate().is_err());
        let c = RunConfig { radius: 0, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn parses_partial_json() {
        let c: RunConfig = serde_json::from_str(r#"{"tol": 1e-9, "backend": "exact"}"#).unwrap();
        assert_eq!(c.tol, 1e-9);
        assert_eq!(c.backend, Backend::Exact);
        assert_eq!(c.radius, 3);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }
}
