//! Agents, utility families and exchange economies.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Bundle, GeometryError};

/// Default multiple of total endowment used as the upper corner of each
/// agent's truncated consumption set.
pub const DEFAULT_MARGIN: f64 = 2.0;

/// Minimum gap between endowment and lower bound for survival to count as strict.
pub const SURVIVAL_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EconomyError {
    #[error("utility parameters: {0}")]
    Utility(String),
    #[error("economy needs at least {min} {what}, got {got}")]
    TooSmall { what: &'static str, min: usize, got: usize },
    #[error("agent {agent}: {field} has {got} coordinates, expected {expected}")]
    Dimension { agent: usize, field: &'static str, got: usize, expected: usize },
    #[error("agent {agent}: {source}")]
    Bundle { agent: usize, source: GeometryError },
    #[error("total endowment of good {good} is {value}; every good must be in positive supply")]
    MissingGood { good: usize, value: f64 },
    #[error("truncation margin {0} must be finite and greater than 1")]
    Margin(f64),
    #[error("truncation box upper {upper} does not exceed lower bound {lower} for good {good}")]
    EmptyBox { good: usize, lower: f64, upper: f64 },
}

/// Parametric utility families.
///
/// Preferences are only meaningful up to strictly increasing transformations;
/// every family here is continuous on the non-negative orthant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum UtilityFunction {
    /// `prod x_j^{a_j}` with positive weights summing to one.
    CobbDouglas { weights: Vec<f64> },
    /// `(sum a_j x_j^rho)^(1/rho)`. Quasi-concave for `rho < 1`.
    Ces { weights: Vec<f64>, rho: f64 },
    /// `sum a_j x_j`. Zero weights are allowed as long as one weight is positive.
    Linear { weights: Vec<f64> },
    /// `min_j x_j / c_j`.
    Leontief { coefficients: Vec<f64> },
}

impl UtilityFunction {
    pub fn cobb_douglas(weights: Vec<f64>) -> Result<Self, EconomyError> {
        check_positive(&weights, "Cobb-Douglas weights")?;
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(EconomyError::Utility(format!("Cobb-Douglas weights sum to {sum}, expected 1")));
        }
        Ok(Self::CobbDouglas { weights })
    }

    /// CES with any finite non-zero exponent. Exponents `>= 1` are accepted so the
    /// auditor can report them; they violate convexity of preferences.
    pub fn ces(weights: Vec<f64>, rho: f64) -> Result<Self, EconomyError> {
        check_positive(&weights, "CES weights")?;
        if !rho.is_finite() || rho == 0.0 {
            return Err(EconomyError::Utility(format!("CES exponent must be finite and non-zero, got {rho}")));
        }
        Ok(Self::Ces { weights, rho })
    }

    pub fn linear(weights: Vec<f64>) -> Result<Self, EconomyError> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(EconomyError::Utility("linear weights must be finite and non-negative".into()));
        }
        if !weights.iter().any(|w| *w > 0.0) {
            return Err(EconomyError::Utility("linear utility needs at least one positive weight".into()));
        }
        Ok(Self::Linear { weights })
    }

    pub fn leontief(coefficients: Vec<f64>) -> Result<Self, EconomyError> {
        check_positive(&coefficients, "Leontief coefficients")?;
        Ok(Self::Leontief { coefficients })
    }

    /// Re-runs the constructor checks; used after deserialization.
    pub fn validated(self) -> Result<Self, EconomyError> {
        match self {
            Self::CobbDouglas { weights } => Self::cobb_douglas(weights),
            Self::Ces { weights, rho } => Self::ces(weights, rho),
            Self::Linear { weights } => Self::linear(weights),
            Self::Leontief { coefficients } => Self::leontief(coefficients),
        }
    }

    pub fn dim(&self) -> usize {
        self.params().len()
    }

    pub fn params(&self) -> &[f64] {
        match self {
            Self::CobbDouglas { weights } | Self::Ces { weights, .. } | Self::Linear { weights } => weights,
            Self::Leontief { coefficients } => coefficients,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::CobbDouglas { .. } => "CobbDouglas",
            Self::Ces { .. } => "CES",
            Self::Linear { .. } => "Linear",
            Self::Leontief { .. } => "Leontief",
        }
    }

    /// Utility level of `x`. Zero coordinates are handled as limits.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::CobbDouglas { weights } => {
                if x.iter().any(|v| *v <= 0.0) {
                    return 0.0;
                }
                weights.iter().zip(x).map(|(a, v)| a * v.ln()).sum::<f64>().exp()
            }
            Self::Ces { weights, rho } => {
                if *rho < 0.0 && x.iter().any(|v| *v <= 0.0) {
                    return 0.0;
                }
                let s: f64 = weights.iter().zip(x).map(|(a, v)| a * v.powf(*rho)).sum();
                s.powf(1.0 / rho)
            }
            Self::Linear { weights } => weights.iter().zip(x).map(|(a, v)| a * v).sum(),
            Self::Leontief { coefficients } => coefficients
                .iter()
                .zip(x)
                .map(|(c, v)| v / c)
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// True when preferences are convex by construction of the parameters.
    pub fn convex_by_parameters(&self) -> bool {
        match self {
            Self::Ces { rho, .. } => *rho < 1.0,
            _ => true,
        }
    }
}

fn check_positive(values: &[f64], what: &str) -> Result<(), EconomyError> {
    if values.is_empty() {
        return Err(EconomyError::Utility(format!("{what} must not be empty")));
    }
    if values.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return Err(EconomyError::Utility(format!("{what} must be finite and strictly positive")));
    }
    Ok(())
}

/// Free-function form of [`UtilityFunction::eval`].
pub fn utility_eval(u: &UtilityFunction, x: &Bundle) -> f64 {
    u.eval(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub utility: UtilityFunction,
    pub endowment: Bundle,
    /// Lower corner of the consumption set; zero unless stated.
    pub lower: Bundle,
}

impl Agent {
    pub fn new(utility: UtilityFunction, endowment: Bundle) -> Self {
        let lower = Bundle::zeros(endowment.len());
        Self { utility, endowment, lower }
    }

    pub fn with_lower(mut self, lower: Bundle) -> Self {
        self.lower = lower;
        self
    }

    /// First good (0-based) on which the endowment does not strictly exceed the lower bound.
    pub fn survival_gap(&self) -> Option<usize> {
        self.endowment
            .iter()
            .zip(self.lower.iter())
            .position(|(h, lo)| h - lo <= SURVIVAL_MARGIN)
    }
}

/// Compact sub-box `[lower, upper]` of an agent's consumption set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationBox {
    pub lower: Bundle,
    pub upper: Bundle,
}

impl TruncationBox {
    /// Box with upper corner `margin * total`; fails unless `margin > 1`.
    pub fn new(total: &Bundle, lower: &Bundle, margin: f64) -> Result<Self, EconomyError> {
        if !margin.is_finite() || margin <= 1.0 {
            return Err(EconomyError::Margin(margin));
        }
        let upper: Vec<f64> = total.iter().map(|t| margin * t).collect();
        for (good, (lo, up)) in lower.iter().zip(&upper).enumerate() {
            if up <= lo {
                return Err(EconomyError::EmptyBox { good, lower: *lo, upper: *up });
            }
        }
        Ok(Self { lower: lower.clone(), upper: Bundle::from_clamped(upper) })
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .all(|(v, (lo, up))| *v >= lo - tol && *v <= up + tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Economy {
    goods: Vec<String>,
    agents: Vec<Agent>,
    margin: f64,
    assume_survival: bool,
}

impl Economy {
    /// Builds an economy with the default margin and the survival claim on.
    pub fn new(goods: Vec<String>, agents: Vec<Agent>) -> Result<Self, EconomyError> {
        Self::with_options(goods, agents, DEFAULT_MARGIN, true)
    }

    pub fn with_options(
        goods: Vec<String>,
        agents: Vec<Agent>,
        margin: f64,
        assume_survival: bool,
    ) -> Result<Self, EconomyError> {
        let l = goods.len();
        if l < 2 {
            return Err(EconomyError::TooSmall { what: "goods", min: 2, got: l });
        }
        if agents.is_empty() {
            return Err(EconomyError::TooSmall { what: "agents", min: 1, got: 0 });
        }
        if !margin.is_finite() || margin <= 1.0 {
            return Err(EconomyError::Margin(margin));
        }
        for (i, a) in agents.iter().enumerate() {
            for (field, got) in [
                ("utility", a.utility.dim()),
                ("endowment", a.endowment.len()),
                ("lower", a.lower.len()),
            ] {
                if got != l {
                    return Err(EconomyError::Dimension { agent: i, field, got, expected: l });
                }
            }
            // Bundles may have been built through serde; re-check signs.
            Bundle::new(a.endowment.to_vec()).map_err(|source| EconomyError::Bundle { agent: i, source })?;
            Bundle::new(a.lower.to_vec()).map_err(|source| EconomyError::Bundle { agent: i, source })?;
        }
        let econ = Self { goods, agents, margin, assume_survival };
        let total = econ.total_endowment();
        if let Some(good) = total.iter().position(|t| *t <= 0.0) {
            return Err(EconomyError::MissingGood { good, value: total[good] });
        }
        for i in 0..econ.agents.len() {
            TruncationBox::new(&total, &econ.agents[i].lower, margin)?;
        }
        Ok(econ)
    }

    pub fn goods(&self) -> &[String] {
        &self.goods
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent(&self, i: usize) -> &Agent {
        &self.agents[i]
    }

    pub fn num_goods(&self) -> usize {
        self.goods.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn assumes_survival(&self) -> bool {
        self.assume_survival
    }

    /// Same agents, different truncation margin.
    pub fn with_margin(&self, margin: f64) -> Result<Self, EconomyError> {
        Self::with_options(self.goods.clone(), self.agents.clone(), margin, self.assume_survival)
    }

    pub fn total_endowment(&self) -> Bundle {
        let mut total = vec![0.0; self.goods.len()];
        for a in &self.agents {
            for (t, h) in total.iter_mut().zip(a.endowment.iter()) {
                *t += h;
            }
        }
        Bundle::from_clamped(total)
    }

    pub fn truncated_consumption_set(&self, agent: usize) -> TruncationBox {
        TruncationBox::new(&self.total_endowment(), &self.agents[agent].lower, self.margin)
            .expect("economy invariants guarantee a non-empty truncation box")
    }

    /// Structural assumption violations. An empty list means the economy is fit
    /// for the existence argument; violations are data, never errors.
    pub fn validate_structure(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.goods.len() < 2 {
            out.push(Violation::new(Assumption::GivenTotalStocks, None, "fewer than two goods".into()));
        }
        for (i, a) in self.agents.iter().enumerate() {
            if self.assume_survival {
                if let Some(j) = a.survival_gap() {
                    out.push(Violation::new(
                        Assumption::Survival,
                        Some(i),
                        format!("survival: h not ≫ 0, coordinate {}", j + 1),
                    ));
                }
            }
            if let UtilityFunction::Ces { rho, .. } = a.utility {
                if rho >= 1.0 {
                    out.push(Violation::new(
                        Assumption::ConvexPreferences,
                        Some(i),
                        "convexity: exponent ≥ 1".into(),
                    ));
                }
            }
        }
        out
    }
}

/// The assumptions under which the excess consumption correspondence is
/// well behaved enough for a fixed point to exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Assumption {
    ConsumptionSet,
    PreferenceMaximization,
    ClosedPreferences,
    GivenTotalStocks,
    Survival,
    ConvexPreferences,
    NonSatiation,
    FreeDisposal,
}

impl Assumption {
    pub const ALL: [Assumption; 8] = [
        Assumption::ConsumptionSet,
        Assumption::PreferenceMaximization,
        Assumption::ClosedPreferences,
        Assumption::GivenTotalStocks,
        Assumption::Survival,
        Assumption::ConvexPreferences,
        Assumption::NonSatiation,
        Assumption::FreeDisposal,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::ConsumptionSet => "consumption sets closed, convex, bounded below",
            Self::PreferenceMaximization => "agents maximize preferences",
            Self::ClosedPreferences => "preferences closed",
            Self::GivenTotalStocks => "total stocks given",
            Self::Survival => "survival",
            Self::ConvexPreferences => "convex preferences",
            Self::NonSatiation => "non-satiation",
            Self::FreeDisposal => "free disposal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub assumption: Assumption,
    pub agent: Option<usize>,
    pub message: String,
}

impl Violation {
    fn new(assumption: Assumption, agent: Option<usize>, message: String) -> Self {
        Self { assumption, agent, message }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: &[f64]) -> Bundle {
        Bundle::new(v.to_vec()).unwrap()
    }

    fn goods(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("g{i}")).collect()
    }

    fn cd_agent(h: &[f64]) -> Agent {
        Agent::new(UtilityFunction::cobb_douglas(vec![0.5, 0.5]).unwrap(), b(h))
    }

    #[test]
    fn total_endowment_examples() {
        let e = Economy::new(goods(2), vec![cd_agent(&[1.0, 0.0]), cd_agent(&[0.0, 1.0])]).unwrap();
        assert_eq!(e.total_endowment().quantities(), &[1.0, 1.0]);
        let e = Economy::new(goods(2), vec![cd_agent(&[2.0, 3.0])]).unwrap();
        assert_eq!(e.total_endowment().quantities(), &[2.0, 3.0]);
        let e = Economy::new(goods(2), vec![cd_agent(&[1.0, 1.0]); 3]).unwrap();
        assert_eq!(e.total_endowment().quantities(), &[3.0, 3.0]);
    }

    #[test]
    fn truncation_box_examples() {
        let e = Economy::new(goods(2), vec![cd_agent(&[1.0, 1.0])]).unwrap();
        assert_eq!(e.truncated_consumption_set(0).upper.quantities(), &[2.0, 2.0]);
        let e = Economy::with_options(goods(2), vec![cd_agent(&[3.0, 1.0])], 1.5, true).unwrap();
        let bx = e.truncated_consumption_set(0);
        assert_eq!(bx.upper.quantities(), &[4.5, 1.5]);
        assert_eq!(bx.lower.quantities(), &[0.0, 0.0]);
        assert_eq!(TruncationBox::new(&b(&[1.0, 1.0]), &b(&[0.0, 0.0]), 1.0), Err(EconomyError::Margin(1.0)));
        assert!(Economy::with_options(goods(2), vec![cd_agent(&[1.0, 1.0])], 1.0, true).is_err());
    }

    #[test]
    fn utility_examples() {
        let cd = UtilityFunction::cobb_douglas(vec![0.5, 0.5]).unwrap();
        assert!((utility_eval(&cd, &b(&[4.0, 1.0])) - 2.0).abs() < 1e-12);
        assert_eq!(utility_eval(&cd, &b(&[4.0, 0.0])), 0.0);
        let lin = UtilityFunction::linear(vec![1.0, 2.0]).unwrap();
        assert_eq!(utility_eval(&lin, &b(&[3.0, 1.0])), 5.0);
        let leo = UtilityFunction::leontief(vec![1.0, 1.0]).unwrap();
        assert_eq!(utility_eval(&leo, &b(&[2.0, 3.0])), 2.0);
        let ces = UtilityFunction::ces(vec![1.0, 1.0], -1.0).unwrap();
        assert!((ces.eval(&[1.0, 1.0]) - 0.5).abs() < 1e-12);
        assert_eq!(ces.eval(&[1.0, 0.0]), 0.0);
    }

    #[test]
    fn constructor_rejections() {
        assert!(UtilityFunction::cobb_douglas(vec![0.5, 0.6]).is_err());
        assert!(UtilityFunction::cobb_douglas(vec![1.0, 0.0]).is_err());
        assert!(UtilityFunction::ces(vec![1.0, 1.0], 0.0).is_err());
        assert!(UtilityFunction::linear(vec![0.0, 0.0]).is_err());
        assert!(UtilityFunction::linear(vec![1.0, 0.0]).is_ok());
        assert!(UtilityFunction::leontief(vec![1.0, -1.0]).is_err());
        assert!(matches!(Economy::new(goods(1), vec![]), Err(EconomyError::TooSmall { .. })));
        assert!(matches!(
            Economy::new(goods(2), vec![cd_agent(&[1.0, 0.0])]),
            Err(EconomyError::MissingGood { good: 1, .. })
        ));
        assert!(matches!(
            Economy::new(goods(3), vec![cd_agent(&[1.0, 1.0])]),
            Err(EconomyError::Dimension { .. })
        ));
    }

    #[test]
    fn validate_structure_examples() {
        let e = Economy::new(goods(2), vec![cd_agent(&[1.0, 1.0]), cd_agent(&[1.0, 1.0])]).unwrap();
        assert!(e.validate_structure().is_empty());

        let e = Economy::new(goods(2), vec![cd_agent(&[1.0, 0.0]), cd_agent(&[1.0, 1.0])]).unwrap();
        let v = e.validate_structure();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].assumption, Assumption::Survival);
        assert_eq!(v[0].message, "survival: h not ≫ 0, coordinate 2");
        let relaxed = Economy::with_options(goods(2), e.agents().to_vec(), 2.0, false).unwrap();
        assert!(relaxed.validate_structure().is_empty());

        let ces = Agent::new(UtilityFunction::ces(vec![0.5, 0.5], 2.0).unwrap(), b(&[1.0, 1.0]));
        let e = Economy::new(goods(2), vec![ces]).unwrap();
        let v = e.validate_structure();
        assert_eq!(v[0].assumption, Assumption::ConvexPreferences);
        assert_eq!(v[0].message, "convexity: exponent ≥ 1");
    }

    #[test]
    fn box_is_convex() {
        let bx = TruncationBox::new(&b(&[2.0, 3.0]), &b(&[0.5, 0.0]), 2.0).unwrap();
        let x1 = [0.5, 6.0];
        let x2 = [4.0, 0.0];
        for k in 0..=10 {
            let a = k as f64 / 10.0;
            let m: Vec<f64> = x1.iter().zip(&x2).map(|(p, q)| a * p + (1.0 - a) * q).collect();
            assert!(bx.contains(&m, 0.0));
        }
    }
}
