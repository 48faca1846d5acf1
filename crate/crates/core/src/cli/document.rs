//! The TOML economy document.
//!
//! ```toml
//! version = 1
//! goods = ["bread", "wine"]
//!
//! [options]
//! margin = 2.0
//!
//! [[agents]]
//! name = "ann"
//! endowment = [1.0, 0.0]
//! utility = { kind = "CobbDouglas", weights = [0.6, 0.4] }
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::economy::{Agent, Economy, UtilityFunction, DEFAULT_MARGIN};
use crate::geometry::Bundle;
use crate::sampling::DEFAULT_SEED;

pub const SCHEMA_VERSION: u32 = 1;

/// A schema violation, located by line (when known) and field path.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("schema error{}{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default(), field.as_ref().map(|f| format!(" in `{f}`")).unwrap_or_default())]
pub struct SchemaError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum UtilitySpec {
    CobbDouglas { weights: Vec<f64> },
    #[serde(rename = "CES")]
    Ces { weights: Vec<f64>, rho: f64 },
    Linear { weights: Vec<f64> },
    Leontief { coefficients: Vec<f64> },
}

impl UtilitySpec {
    pub fn build(&self) -> Result<UtilityFunction, String> {
        let u = match self {
            Self::CobbDouglas { weights } => UtilityFunction::cobb_douglas(weights.clone()),
            Self::Ces { weights, rho } => UtilityFunction::ces(weights.clone(), *rho),
            Self::Linear { weights } => UtilityFunction::linear(weights.clone()),
            Self::Leontief { coefficients } => UtilityFunction::leontief(coefficients.clone()),
        };
        u.map_err(|e| e.to_string())
    }

    pub fn from_utility(u: &UtilityFunction) -> Self {
        match u {
            UtilityFunction::CobbDouglas { weights } => Self::CobbDouglas { weights: weights.clone() },
            UtilityFunction::Ces { weights, rho } => Self::Ces { weights: weights.clone(), rho: *rho },
            UtilityFunction::Linear { weights } => Self::Linear { weights: weights.clone() },
            UtilityFunction::Leontief { coefficients } => Self::Leontief { coefficients: coefficients.clone() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub endowment: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    pub utility: UtilitySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DocumentOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assume_survival: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomyDocument {
    pub version: u32,
    pub goods: Vec<String>,
    #[serde(default)]
    pub options: DocumentOptions,
    pub agents: Vec<AgentSpec>,
}

impl EconomyDocument {
    /// Describes an existing economy; options are filled from it.
    pub fn from_economy(econ: &Economy, seed: u64) -> Self {
        let agents = econ
            .agents()
            .iter()
            .enumerate()
            .map(|(i, a)| AgentSpec {
                name: Some(format!("agent{}", i + 1)),
                endowment: a.endowment.to_vec(),
                lower: a.lower.iter().any(|v| *v != 0.0).then(|| a.lower.to_vec()),
                utility: UtilitySpec::from_utility(&a.utility),
            })
            .collect();
        Self {
            version: SCHEMA_VERSION,
            goods: econ.goods().to_vec(),
            options: DocumentOptions {
                margin: Some(econ.margin()),
                epsilon: None,
                seed: Some(seed),
                assume_survival: Some(econ.assumes_survival()),
            },
            agents,
        }
    }

    /// Fills every defaulted option.
    pub fn with_defaults(mut self) -> Self {
        self.options.margin.get_or_insert(DEFAULT_MARGIN);
        self.options.seed.get_or_insert(DEFAULT_SEED);
        self.options.assume_survival.get_or_insert(true);
        self
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("documents contain only TOML-representable values")
    }

    /// Builds the economy, overriding the margin when asked.
    pub fn build(&self, margin: Option<f64>, text: Option<&str>) -> Result<Economy, SchemaError> {
        let agent_line = |i: usize| text.and_then(|t| nth_agent_line(t, i));
        if self.version != SCHEMA_VERSION {
            return Err(SchemaError {
                line: text.and_then(|t| key_line(t, "version")),
                field: Some("version".into()),
                message: format!("unsupported schema version {}, expected {SCHEMA_VERSION}", self.version),
            });
        }
        let mut agents = Vec::with_capacity(self.agents.len());
        for (i, spec) in self.agents.iter().enumerate() {
            let fail = |field: &str, message: String| SchemaError {
                line: agent_line(i),
                field: Some(format!("agents[{i}].{field}")),
                message,
            };
            let utility = spec.utility.build().map_err(|m| fail("utility", m))?;
            let endowment = Bundle::new(spec.endowment.clone()).map_err(|e| fail("endowment", e.to_string()))?;
            let mut agent = Agent::new(utility, endowment);
            if let Some(lower) = &spec.lower {
                agent = agent.with_lower(Bundle::new(lower.clone()).map_err(|e| fail("lower", e.to_string()))?);
            }
            agents.push(agent);
        }
        let margin = margin.or(self.options.margin).unwrap_or(DEFAULT_MARGIN);
        let survival = self.options.assume_survival.unwrap_or(true);
        Economy::with_options(self.goods.clone(), agents, margin, survival).map_err(|e| SchemaError {
            line: None,
            field: None,
            message: e.to_string(),
        })
    }
}

/// A parsed document together with its economy.
#[derive(Debug, Clone)]
pub struct ParsedEconomy {
    /// The document with every default filled in.
    pub document: EconomyDocument,
    pub economy: Economy,
}

/// Parses document text into a validated economy. Structural assumption
/// violations do not fail the parse; see [`Economy::validate_structure`].
pub fn parse_economy(text: &str) -> Result<ParsedEconomy, SchemaError> {
    let document = parse_document(text)?.with_defaults();
    let economy = document.build(None, Some(text))?;
    Ok(ParsedEconomy { document, economy })
}

/// Parses without building the economy.
pub fn parse_document(text: &str) -> Result<EconomyDocument, SchemaError> {
    toml::from_str::<EconomyDocument>(text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        SchemaError { line, field: None, message: e.message().trim().to_string() }
    })
}

fn nth_agent_line(text: &str, n: usize) -> Option<usize> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| l.trim_start().starts_with("[[agents]]"))
        .nth(n)
        .map(|(i, _)| i + 1)
}

fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| l.trim_start().starts_with(key)).map(|i| i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
version = 1
goods = ["x", "y"]

[[agents]]
endowment = [1.0, 0.0]
utility = { kind = "CobbDouglas", weights = [0.6, 0.4] }

[[agents]]
endowment = [0, 1]
utility = { kind = "CobbDouglas", weights = [0.6, 0.4] }
"#;

    #[test]
    fn minimal_document_gets_default_margin() {
        let parsed = parse_economy(MINIMAL).unwrap();
        assert_eq!(parsed.economy.margin(), 2.0);
        assert_eq!(parsed.document.options.margin, Some(2.0));
        assert_eq!(parsed.document.options.seed, Some(DEFAULT_SEED));
        assert_eq!(parsed.economy.num_agents(), 2);
        assert_eq!(parsed.economy.validate_structure().len(), 2);
    }

    #[test]
    fn misspelled_kind_names_the_field() {
        let text = MINIMAL.replacen("\"CobbDouglas\"", "\"CobDouglas\"", 1);
        let err = parse_economy(&text).unwrap_err();
        assert!(err.message.contains("CobDouglas"), "{err}");
        assert_eq!(err.line, Some(7));
    }

    #[test]
    fn ces_without_rho_is_rejected() {
        let text = MINIMAL.replacen(
            "{ kind = \"CobbDouglas\", weights = [0.6, 0.4] }",
            "{ kind = \"CES\", weights = [0.6, 0.4] }",
            1,
        );
        let err = parse_economy(&text).unwrap_err();
        assert!(err.message.contains("rho"), "{err}");
    }

    #[test]
    fn semantic_errors_point_at_the_agent() {
        let text = MINIMAL.replacen("[0.6, 0.4] }\n\n[[agents]]\nendowment = [0, 1]", "[0.6, 0.4] }\n\n[[agents]]\nendowment = [0, -1]", 1);
        let err = parse_economy(&text).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("agents[1].endowment"));
        assert_eq!(err.line, Some(9));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_economy(&format!("colour = 1\n{MINIMAL}")).unwrap_err();
        assert!(err.message.contains("colour"), "{err}");
        assert_eq!(err.line, Some(1));
    }

    #[test]
    fn round_trip_is_identity() {
        let parsed = parse_economy(MINIMAL).unwrap();
        let again = parse_economy(&parsed.document.to_toml()).unwrap();
        assert_eq!(parsed.document, again.document);
    }
}
