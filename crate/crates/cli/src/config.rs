//! JSON run configuration: parsing, validation, and conversion into the
//! core model. Unknown keys are rejected and every error names the field
//! path that caused it.

use gsic_core::{derive_params, GroupParams, ReceiverKind, SystemModel};
use serde::{Deserialize, Serialize};

use crate::CliError;

fn default_sigma2() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Background noise power; powers in the outputs are normalized by it.
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
    pub groups: Vec<GroupConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub hbar2: f64,
    pub xi2: f64,
    pub paths: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_override: Option<f64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let deserializer = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(deserializer).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                CliError::Validation(format!("config parse error: {inner}"))
            } else {
                CliError::Validation(format!("config parse error at {path}: {inner}"))
            }
        })
    }

    /// Builds the validated system model, running the per-group derivation
    /// for the selected receiver so unreachable targets are rejected here
    /// rather than deep inside a solver.
    pub fn to_system(&self, kind: ReceiverKind) -> Result<SystemModel, CliError> {
        let mut groups = Vec::with_capacity(self.groups.len());
        for (index, g) in self.groups.iter().enumerate() {
            let at = |field: &str| format!("groups[{index}].{field}");
            let mut group = GroupParams::new(g.alpha, g.gamma, g.hbar2, g.xi2, g.paths)
                .map_err(|e| CliError::Validation(format!("{}: {e}", at("*"))))?;
            if let Some(eps) = g.epsilon_override {
                group = group.with_epsilon_override(eps).map_err(|e| {
                    CliError::Validation(format!("{}: {e}", at("epsilon_override")))
                })?;
            }
            derive_params(&group, kind)
                .map_err(|e| CliError::Validation(format!("groups[{index}]: {e}")))?;
            groups.push(group);
        }
        SystemModel::new(groups, self.sigma2)
            .map_err(|e| CliError::Validation(format!("config: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_CLASS: &str = r#"{"sigma2":1,"groups":[
        {"alpha":0.5,"gamma":10,"hbar2":1,"xi2":0,"paths":3},
        {"alpha":0.5,"gamma":10,"hbar2":1,"xi2":0,"paths":3}]}"#;

    #[test]
    fn parses_two_class_config() {
        let cfg = ConfigFile::parse(TWO_CLASS).unwrap();
        assert_eq!(cfg.sigma2, 1.0);
        assert_eq!(cfg.groups.len(), 2);
        let sys = cfg.to_system(ReceiverKind::Lmmse).unwrap();
        assert_eq!(sys.len(), 2);
    }

    #[test]
    fn sigma2_defaults_to_one() {
        let cfg = ConfigFile::parse(
            r#"{"groups":[{"alpha":0.1,"gamma":5,"hbar2":1,"xi2":0,"paths":1}]}"#,
        )
        .unwrap();
        assert_eq!(cfg.sigma2, 1.0);
    }

    #[test]
    fn missing_field_names_its_path() {
        let err = ConfigFile::parse(
            r#"{"sigma2":1,"groups":[{"alpha":0.5,"hbar2":1,"xi2":0,"paths":3}]}"#,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("groups[0]"), "got: {msg}");
        assert!(msg.contains("gamma"), "got: {msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ConfigFile::parse(
            r#"{"sigma2":1,"bogus":2,"groups":[{"alpha":0.5,"gamma":10,"hbar2":1,"xi2":0,"paths":3}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn unreachable_target_rejected_at_validation() {
        // nu = 0.1 and gamma = 10 sit on the gamma = 1/nu boundary.
        let cfg = ConfigFile::parse(
            r#"{"groups":[{"alpha":0.1,"gamma":10,"hbar2":1,"xi2":0.1,"paths":1}]}"#,
        )
        .unwrap();
        let err = cfg.to_system(ReceiverKind::Lmmse).unwrap_err();
        assert!(matches!(err, CliError::Validation(_)));
        assert!(err.to_string().contains("groups[0]"));
    }

    #[test]
    fn round_trips_through_serialization() {
        let cfg = ConfigFile::parse(TWO_CLASS).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let again = ConfigFile::parse(&text).unwrap();
        assert_eq!(cfg, again);
    }
}
