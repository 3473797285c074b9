//! Experiment configuration files: flat sections of `key = value` pairs with
//! decimal literals. Unknown sections and keys are rejected with line
//! diagnostics; every required key must be present, so a parse either yields
//! a complete, validated [`SimConfig`] or an error.
//!
//! ```text
//! [plant]
//! kind = first-order
//! a_p = 1.0
//! ...
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use crate::controllers::{AdaptationLaw, FogpssConfig};
use crate::error::{Error, Result};
use crate::plants::{
    CatalogFn, FirstOrderPlant, MeasurementModel, PlantBounds, ReferenceShape, ReferenceSpec,
};
use crate::simkit::{LambdaTrackerSpec, ScalarController, SimConfig};

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
    consumed: bool,
}

#[derive(Debug, Default)]
struct Section {
    entries: BTreeMap<String, Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.get_mut(key).map(|e| {
            e.consumed = true;
            (e.line, e.value.clone())
        })
    }
}

fn parse_sections(text: &str) -> Result<BTreeMap<String, Section>> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or(Error::ConfigParse {
                line: line_no,
                msg: "unterminated section header".into(),
            })?;
            let name = name.trim().to_string();
            if name.is_empty() {
                return Err(Error::ConfigParse {
                    line: line_no,
                    msg: "empty section name".into(),
                });
            }
            sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(Error::ConfigParse {
            line: line_no,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        let section = current.as_ref().ok_or(Error::ConfigParse {
            line: line_no,
            msg: "key outside any [section]".into(),
        })?;
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(Error::ConfigParse {
                line: line_no,
                msg: "empty key".into(),
            });
        }
        let previous = sections.get_mut(section).expect("section exists").entries.insert(
            key.clone(),
            Entry {
                line: line_no,
                value: value.trim().to_string(),
                consumed: false,
            },
        );
        if previous.is_some() {
            return Err(Error::ConfigParse {
                line: line_no,
                msg: format!("duplicate key `{key}` in [{section}]"),
            });
        }
    }
    Ok(sections)
}

struct SectionReader<'a> {
    name: &'a str,
    section: &'a mut Section,
}

impl<'a> SectionReader<'a> {
    fn required(&mut self, key: &str) -> Result<String> {
        self.section
            .take(key)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::InvalidConfig(format!("missing key `{key}` in [{}]", self.name)))
    }

    fn required_f64(&mut self, key: &str) -> Result<f64> {
        let (line, value) = self.section.take(key).ok_or_else(|| {
            Error::InvalidConfig(format!("missing key `{key}` in [{}]", self.name))
        })?;
        value.parse::<f64>().map_err(|_| Error::ConfigParse {
            line,
            msg: format!("`{key}` must be a decimal literal, got `{value}`"),
        })
    }

    fn optional_f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.section.take(key) {
            None => Ok(None),
            Some((line, value)) => value
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::ConfigParse {
                    line,
                    msg: format!("`{key}` must be a decimal literal, got `{value}`"),
                }),
        }
    }

    fn optional_u64(&mut self, key: &str) -> Result<Option<u64>> {
        match self.section.take(key) {
            None => Ok(None),
            Some((line, value)) => value
                .parse::<u64>()
                .map(Some)
                .map_err(|_| Error::ConfigParse {
                    line,
                    msg: format!("`{key}` must be a non-negative integer, got `{value}`"),
                }),
        }
    }

    fn optional_bool(&mut self, key: &str) -> Result<Option<bool>> {
        match self.section.take(key) {
            None => Ok(None),
            Some((line, value)) => match value.as_str() {
                "true" => Ok(Some(true)),
                "false" => Ok(Some(false)),
                _ => Err(Error::ConfigParse {
                    line,
                    msg: format!("`{key}` must be `true` or `false`, got `{value}`"),
                }),
            },
        }
    }

    /// Reads a catalog function given the key prefix, e.g. `disturbance`,
    /// `disturbance_amp`, `disturbance_freq`, `disturbance_value`.
    fn catalog_fn(&mut self, prefix: &str) -> Result<CatalogFn> {
        let kind = self.required(prefix)?;
        let amp_key = format!("{prefix}_amp");
        let freq_key = format!("{prefix}_freq");
        let value_key = format!("{prefix}_value");
        match kind.as_str() {
            "zero" => Ok(CatalogFn::Zero),
            "constant" => Ok(CatalogFn::Constant(self.required_f64(&value_key)?)),
            "sin-product" => Ok(CatalogFn::SinProduct(self.required_f64(&amp_key)?)),
            "cos-product" => Ok(CatalogFn::CosProduct(self.required_f64(&amp_key)?)),
            "sin-time" => Ok(CatalogFn::SinTime {
                amp: self.required_f64(&amp_key)?,
                freq: self.required_f64(&freq_key)?,
            }),
            "cos-time" => Ok(CatalogFn::CosTime {
                amp: self.required_f64(&amp_key)?,
                freq: self.required_f64(&freq_key)?,
            }),
            other => Err(Error::InvalidConfig(format!(
                "unknown catalog function `{other}` for `{prefix}` in [{}]; \
                 known: zero, constant, sin-product, cos-product, sin-time, cos-time",
                self.name
            ))),
        }
    }

    fn finish(self) -> Result<()> {
        for (key, entry) in &self.section.entries {
            if !entry.consumed {
                return Err(Error::ConfigParse {
                    line: entry.line,
                    msg: format!("unknown key `{key}` in [{}]", self.name),
                });
            }
        }
        Ok(())
    }
}

/// Parses and validates a configuration from text.
pub fn parse_config_str(text: &str) -> Result<SimConfig> {
    let mut sections = parse_sections(text)?;
    for name in sections.keys() {
        if !matches!(
            name.as_str(),
            "plant" | "reference" | "measurement" | "controller" | "sim"
        ) {
            return Err(Error::InvalidConfig(format!("unknown section [{name}]")));
        }
    }

    let mut take_section = |name: &'static str| -> Result<Section> {
        sections
            .remove(name)
            .ok_or_else(|| Error::InvalidConfig(format!("missing section [{name}]")))
    };

    // [plant]
    let mut section = take_section("plant")?;
    let mut plant_reader = SectionReader {
        name: "plant",
        section: &mut section,
    };
    let kind = plant_reader.required("kind")?;
    if kind != "first-order" {
        return Err(Error::InvalidConfig(format!(
            "unsupported plant kind `{kind}`; the file schema covers `first-order`"
        )));
    }
    let a_p = plant_reader.required_f64("a_p")?;
    let b_p = plant_reader.required_f64("b_p")?;
    let bounds = PlantBounds::new(
        plant_reader.required_f64("a_lo")?,
        plant_reader.required_f64("a_hi")?,
        plant_reader.required_f64("b_lo")?,
        plant_reader.required_f64("b_hi")?,
        plant_reader.required_f64("d_bar")?,
    )?;
    let disturbance = plant_reader.catalog_fn("disturbance")?;
    plant_reader.finish()?;
    let plant = FirstOrderPlant::new(a_p, b_p, disturbance, bounds)?;

    // [reference]
    let mut section = take_section("reference")?;
    let mut reference_reader = SectionReader {
        name: "reference",
        section: &mut section,
    };
    let kind = reference_reader.required("kind")?;
    let shape = match kind.as_str() {
        "constant" => ReferenceShape::Constant(reference_reader.required_f64("value")?),
        "cosine" => ReferenceShape::Cosine {
            amp: reference_reader.required_f64("amp")?,
            freq: reference_reader.required_f64("freq")?,
        },
        "sine" => ReferenceShape::Sine {
            amp: reference_reader.required_f64("amp")?,
            freq: reference_reader.required_f64("freq")?,
        },
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown reference kind `{other}`; known: constant, cosine, sine"
            )))
        }
    };
    let b1 = reference_reader.required_f64("b1")?;
    let b2 = reference_reader.required_f64("b2")?;
    reference_reader.finish()?;
    let reference = ReferenceSpec::new(shape, b1, b2)?;

    // [measurement]
    let mut section = take_section("measurement")?;
    let mut measurement_reader = SectionReader {
        name: "measurement",
        section: &mut section,
    };
    let omega = measurement_reader.catalog_fn("omega")?;
    let c1 = measurement_reader.required_f64("c1")?;
    let c2 = measurement_reader.required_f64("c2")?;
    let meas_alpha = measurement_reader.required_f64("alpha")?;
    measurement_reader.finish()?;
    let measurement = MeasurementModel::new(omega, c1, c2, meas_alpha)?;

    // [controller]
    let mut section = take_section("controller")?;
    let mut controller_reader = SectionReader {
        name: "controller",
        section: &mut section,
    };
    let kind = controller_reader.required("kind")?;
    let controller = match kind.as_str() {
        "fogpss" => {
            let delta = controller_reader.required_f64("delta")?;
            let beta_bar = controller_reader.required_f64("beta_bar")?;
            let epsilon0 = controller_reader.required_f64("epsilon0")?;
            let alpha = controller_reader.required_f64("alpha")?;
            let u_max = controller_reader.required_f64("u_max")?;
            ScalarController::Fogpss(FogpssConfig::new(delta, beta_bar, epsilon0, alpha, u_max)?)
        }
        "lambda" => {
            let lambda = controller_reader.required_f64("lambda")?;
            let alpha = controller_reader.required_f64("alpha")?;
            let k0 = controller_reader.optional_f64("k0")?.unwrap_or(0.0);
            let law = match controller_reader
                .section
                .take("law")
                .map(|(_, v)| v)
                .as_deref()
            {
                None | Some("excess-times-norm") => AdaptationLaw::ExcessTimesNorm,
                Some("norm-squared") => AdaptationLaw::NormSquared,
                Some(other) => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown adaptation law `{other}`; known: excess-times-norm, norm-squared"
                    )))
                }
            };
            ScalarController::Lambda(LambdaTrackerSpec {
                k0,
                lambda,
                alpha,
                law,
            })
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown controller kind `{other}`; known: fogpss, lambda"
            )))
        }
    };
    controller_reader.finish()?;

    // [sim]
    let mut section = take_section("sim")?;
    let mut sim_reader = SectionReader {
        name: "sim",
        section: &mut section,
    };
    let step = sim_reader.required_f64("h")?;
    let horizon = sim_reader.required_f64("T")?;
    let x0 = sim_reader.required_f64("x0")?;
    let seed = sim_reader.optional_u64("seed")?.unwrap_or(0);
    let negate_u = sim_reader.optional_bool("negate_u")?.unwrap_or(false);
    sim_reader.finish()?;

    let config = SimConfig {
        step,
        horizon,
        plant,
        reference,
        measurement,
        controller,
        x0,
        seed,
        negate_u,
    };
    config.steps()?; // surface step/horizon problems at parse time
    Ok(config)
}

/// Parses and validates a configuration file.
pub fn load_config(path: &Path) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    const GOOD: &str = include_str!("../../configs/paper_fig5.cfg");

    #[test]
    fn bundled_config_parses_to_the_preset() {
        let parsed = parse_config_str(GOOD).unwrap();
        assert_eq!(parsed, presets::tracking_experiment());
    }

    #[test]
    fn unknown_key_is_rejected_with_its_line() {
        let text = GOOD.replace("a_p = 1.0", "a_p = 1.0\nbogus = 3");
        match parse_config_str(&text) {
            Err(Error::ConfigParse { line, msg }) => {
                assert!(msg.contains("bogus"), "{msg}");
                assert!(line > 1);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_key_is_rejected_by_name() {
        let text = GOOD.replace("beta_bar = 12.0\n", "");
        match parse_config_str(&text) {
            Err(Error::InvalidConfig(msg)) => assert!(msg.contains("beta_bar"), "{msg}"),
            other => panic!("expected missing-key error, got {other:?}"),
        }
    }

    #[test]
    fn gain_condition_violations_name_the_condition() {
        let text = GOOD.replace("beta_bar = 12.0", "beta_bar = 1.0");
        match parse_config_str(&text) {
            Err(Error::InvalidGain(msg)) => {
                assert!(msg.contains("beta_bar > u_max/(delta*epsilon0)"), "{msg}");
            }
            other => panic!("expected gain rejection, got {other:?}"),
        }
    }

    #[test]
    fn unknown_section_is_rejected() {
        let text = format!("{GOOD}\n[extra]\nx = 1\n");
        assert!(matches!(
            parse_config_str(&text),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn malformed_lines_carry_numbers() {
        match parse_config_str("[plant]\nkind first-order\n") {
            Err(Error::ConfigParse { line: 2, .. }) => {}
            other => panic!("expected line-2 parse error, got {other:?}"),
        }
        match parse_config_str("a = 1\n") {
            Err(Error::ConfigParse { line: 1, msg }) => {
                assert!(msg.contains("section"), "{msg}")
            }
            other => panic!("expected section error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let text = GOOD.replace("a_p = 1.0", "a_p = 1.0\na_p = 1.1");
        assert!(matches!(
            parse_config_str(&text),
            Err(Error::ConfigParse { .. })
        ));
    }
}
