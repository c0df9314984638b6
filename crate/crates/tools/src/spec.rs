//! The curve-spec file: the one way curves and families enter the tools.
//!
//! ```json
//! { "name": "ellipse",
//!   "x": { "const": 0.0, "cos": [2.0], "sin": [] },
//!   "y": { "const": 0.0, "cos": [], "sin": [1.0] },
//!   "family": [ { "order": 1, "x": {...}, "y": {...} } ] }
//! ```

use std::path::Path;

use mss_core::{CurveFamily, FourierComponent};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ToolError};

/// `const + Σ cos[n-1] cos(nt) + sin[n-1] sin(nt)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    #[serde(rename = "const")]
    pub constant: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

/// `u^order · (x(t), y(t))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyTermSpec {
    pub order: u32,
    pub x: ComponentSpec,
    pub y: ComponentSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub name: String,
    pub x: ComponentSpec,
    pub y: ComponentSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<FamilyTermSpec>>,
}

impl ComponentSpec {
    pub fn from_component(c: &FourierComponent) -> Self {
        Self { constant: c.constant, cos: c.cos.clone(), sin: c.sin.clone() }
    }

    fn to_component(&self, what: &str, constant_only_ok: bool) -> Result<FourierComponent> {
        let (mut cos, sin) = (self.cos.clone(), self.sin.clone());
        // a pure translation term has no harmonics
        if constant_only_ok && cos.is_empty() && sin.is_empty() {
            cos.push(0.0);
        }
        FourierComponent::new(self.constant, cos, sin).map_err(|e| ToolError::Input(format!("{what}: {e}")))
    }
}

impl CurveSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| ToolError::Parse { what: "curve spec", source })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ToolError::Read { path: path.into(), source })?;
        Self::parse(&text)
    }

    pub fn from_family(name: &str, family: &CurveFamily) -> Self {
        let terms: Vec<FamilyTermSpec> = family
            .perturbations
            .iter()
            .map(|p| FamilyTermSpec {
                order: p.order,
                x: ComponentSpec::from_component(&p.dx),
                y: ComponentSpec::from_component(&p.dy),
            })
            .collect();
        Self {
            name: name.to_string(),
            x: ComponentSpec::from_component(&family.base_x),
            y: ComponentSpec::from_component(&family.base_y),
            family: (!terms.is_empty()).then_some(terms),
        }
    }

    pub fn has_family(&self) -> bool {
        self.family.as_ref().is_some_and(|f| !f.is_empty())
    }

    pub fn to_family(&self) -> Result<CurveFamily> {
        let mut fam = CurveFamily::new(self.x.to_component("x", false)?, self.y.to_component("y", false)?);
        for (k, term) in self.family.iter().flatten().enumerate() {
            if term.order == 0 {
                return Err(ToolError::Input(format!("family[{k}]: order must be at least 1")));
            }
            let dx = term.x.to_component(&format!("family[{k}].x"), true)?;
            let dy = term.y.to_component(&format!("family[{k}].y"), true)?;
            fam = fam.with_perturbation(term.order, dx, dy)?;
        }
        Ok(fam)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serialises");
        s.push('\n');
        s
    }
}
