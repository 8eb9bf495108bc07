use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::series::Indicator;
use crate::error::{Error, Result};

/// How a source series enters the feature matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureForm {
    /// Level as published.
    Nominal,
    /// Four-quarter relative change, in percent.
    Rate4q,
    /// Twelve-quarter relative change, in percent.
    Rate12q,
    /// Pass-through for series that are already rates (policy rates, yields,
    /// annualised inflation).
    AsIs,
}

impl FeatureForm {
    pub fn code(&self) -> &'static str {
        match self {
            FeatureForm::Nominal => "nominal",
            FeatureForm::Rate4q => "rate_4q",
            FeatureForm::Rate12q => "rate_12q",
            FeatureForm::AsIs => "as_is",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "nominal" => Some(FeatureForm::Nominal),
            "rate_4q" | "rate4q" => Some(FeatureForm::Rate4q),
            "rate_12q" | "rate12q" => Some(FeatureForm::Rate12q),
            "as_is" | "asis" => Some(FeatureForm::AsIs),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TargetForm {
    HpiNominal,
    /// Twelve-quarter HPI change, in percent.
    HpiRate12q,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub indicator: Indicator,
    pub form: FeatureForm,
}

impl FeatureSpec {
    pub fn new(indicator: Indicator, form: FeatureForm) -> Self {
        FeatureSpec { indicator, form }
    }
}

/// Declarative description of one model configuration: which indicators enter the
/// feature matrix, in which form, and which HPI form is the target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    pub features: Vec<FeatureSpec>,
    pub target: TargetForm,
}

impl ModelSpec {
    pub fn new(name: impl Into<String>, features: Vec<FeatureSpec>, target: TargetForm) -> Result<Self> {
        let spec = ModelSpec {
            name: name.into(),
            features,
            target,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::InvalidSpec("feature list is empty".to_string()));
        }
        for (i, f) in self.features.iter().enumerate() {
            if self.features[..i].contains(f) {
                return Err(Error::InvalidSpec(alloc::format!(
                    "duplicate feature {} ({})",
                    f.indicator,
                    f.form.code()
                )));
            }
            if f.indicator == Indicator::Hpi {
                return Err(Error::InvalidSpec("HPI cannot be a feature".to_string()));
            }
        }
        Ok(())
    }

    /// Column names in spec order. An indicator used twice gets its form appended.
    pub fn feature_names(&self) -> Vec<String> {
        self.features
            .iter()
            .map(|f| {
                let repeated = self.features.iter().filter(|g| g.indicator == f.indicator).count() > 1;
                if repeated {
                    alloc::format!("{}_{}", f.indicator.label(), f.form.code())
                } else {
                    f.indicator.label().to_string()
                }
            })
            .collect()
    }

    pub fn indicators(&self) -> impl Iterator<Item = &Indicator> {
        self.features.iter().map(|f| &f.indicator)
    }

    pub fn builtin(name: &str) -> Result<ModelSpec> {
        let key = normalize(name);
        builtin_specs()
            .into_iter()
            .find(|s| normalize(&s.name) == key)
            .ok_or_else(|| Error::UnknownSpec {
                name: name.to_string(),
                valid: builtin_names().join(", "),
            })
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn normalize(name: &str) -> String {
    let mut s: String = name
        .chars()
        .filter(|c| !matches!(c, '-' | '_' | ' ' | '/'))
        .flat_map(|c| c.to_lowercase())
        .collect();
    s = s.replace("parameter", "param").replace("rent1yr", "rents1yr");
    if s.ends_with("1y") {
        s.push('r');
    }
    if s == "rent" {
        s = "rents".to_string();
    }
    s
}

/// Names of the twelve built-in configurations, in table order.
pub fn builtin_names() -> Vec<&'static str> {
    vec![
        "3-param",
        "3-param-1yr",
        "IR",
        "LIR",
        "ECB",
        "ECB-FED",
        "ECB-1yr",
        "LOCAL",
        "LOCAL-1yr",
        "Rents",
        "Rents-1yr",
        "Permutations",
    ]
}

/// The twelve model configurations.
///
/// "Y, rates" columns map to a four-quarter rate for level series (GDP, rent index)
/// and to pass-through for series that are already rates (CPI inflation, treasury
/// yield, policy rates, unemployment). Row one keeps GDP nominal, as tabulated, even
/// though every other row uses GDP growth.
pub fn builtin_specs() -> Vec<ModelSpec> {
    use FeatureForm::*;
    use Indicator::*;
    let f = FeatureSpec::new;
    let core_rates = || vec![f(Gdp, Rate4q), f(CpiRate, AsIs), f(Tr10y, AsIs)];
    let with = |extra: Vec<FeatureSpec>| {
        let mut v = core_rates();
        v.extend(extra);
        v
    };
    let fed_rate = || Custom("FED_RATE".to_string());
    let rows: Vec<(&str, Vec<FeatureSpec>, TargetForm)> = vec![
        (
            "3-param",
            vec![f(Gdp, Nominal), f(CpiRate, AsIs), f(Tr10y, AsIs)],
            TargetForm::HpiNominal,
        ),
        ("3-param-1yr", core_rates(), TargetForm::HpiRate12q),
        ("IR", with(vec![f(fed_rate(), AsIs)]), TargetForm::HpiNominal),
        ("LIR", with(vec![f(CbRate, AsIs)]), TargetForm::HpiNominal),
        ("ECB", with(vec![f(EcbAssets, Nominal)]), TargetForm::HpiNominal),
        (
            "ECB-FED",
            with(vec![f(EcbAssets, Nominal), f(FedAssets, Nominal)]),
            TargetForm::HpiNominal,
        ),
        ("ECB-1yr", with(vec![f(EcbAssets, Nominal)]), TargetForm::HpiRate12q),
        ("LOCAL", with(vec![f(Unemployment, AsIs)]), TargetForm::HpiNominal),
        ("LOCAL-1yr", with(vec![f(Unemployment, AsIs)]), TargetForm::HpiRate12q),
        ("Rents", with(vec![f(RentIndex, Rate4q)]), TargetForm::HpiNominal),
        ("Rents-1yr", with(vec![f(RentIndex, Rate4q)]), TargetForm::HpiRate12q),
        ("Permutations", core_rates(), TargetForm::HpiNominal),
    ];
    rows.into_iter()
        .map(|(name, features, target)| ModelSpec {
            name: name.to_string(),
            features,
            target,
        })
        .collect()
}
