//! Run configuration: a versioned TOML document, parsed strictly.

use std::fmt;

use casimir_core::materials::{Basis, Material};
use casimir_core::stack::{LayerStack, Region};
use casimir_core::thermo::{QuadratureSpec, ThermalSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// The only schema this build understands.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub stack: StackConfig,
    pub observable: ObservableConfig,
    #[serde(default)]
    pub thermal: ThermalConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub identity: IdentityConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackConfig {
    pub regions: Vec<RegionConfig>,
    /// Allow energies and forces without conductor boundaries.
    #[serde(default)]
    pub open_boundaries: bool,
    /// Widen regions 1 and N so that the conductor boundaries decouple.
    #[serde(default)]
    pub pad_outer_layers: bool,
    /// Wrap an open stack in conductors; `pad_width` overrides the default
    /// padding.
    #[serde(default)]
    pub enclose_in_conductors: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pad_width: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub material: Material,
    pub width: Width,
}

/// A finite width, or the keyword `"infinite"` for the two boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Width {
    Finite(f64),
    Keyword(Infinite),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Infinite {
    Infinite,
}

impl Width {
    fn value(self) -> f64 {
        match self {
            Width::Finite(w) => w,
            Width::Keyword(Infinite::Infinite) => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableKind {
    Energy,
    Force,
    Work,
    IdentityCheck,
}

impl fmt::Display for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObservableKind::Energy => "energy",
            ObservableKind::Force => "force",
            ObservableKind::Work => "work",
            ObservableKind::IdentityCheck => "identity-check",
        })
    }
}

impl std::str::FromStr for ObservableKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "energy" => Ok(ObservableKind::Energy),
            "force" => Ok(ObservableKind::Force),
            "work" => Ok(ObservableKind::Work),
            "identity-check" => Ok(ObservableKind::IdentityCheck),
            _ => Err(format!("unknown observable `{s}` (energy, force, work, identity-check)")),
        }
    }
}

/// Which quantity to compute, and on which regions.
///
/// `force` takes either `gap` (force conjugate to that width) or `body`
/// (net force on the rigid body between two gaps); `work` takes `triple`;
/// `energy` may name the `split` region of the factorization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableConfig {
    pub kind: ObservableKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triple: Option<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<usize>,
    #[serde(default = "default_basis")]
    pub basis: Basis,
}

fn default_basis() -> Basis {
    Basis::TmTe
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalConfig {
    #[serde(default)]
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Dotted path of a numeric config field, e.g. `stack.regions.1.width`
    /// or `thermal.temperature`.
    pub path: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Tsv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "tsv" => Ok(Format::Tsv),
            _ => Err(format!("unknown format `{s}` (csv, tsv)")),
        }
    }
}

impl Format {
    pub fn delimiter(self) -> char {
        match self {
            Format::Csv => ',',
            Format::Tsv => '\t',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Standard output when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub format: Format,
    /// Add a column in J/m² (energy, work) or Pa (force).
    pub si_units: bool,
    /// Length of one natural unit in nanometres, for the SI column.
    pub length_unit_nm: f64,
    /// Wall-time column; turn off for byte-identical reruns.
    pub timing: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            path: None,
            format: Format::Csv,
            si_units: false,
            length_unit_nm: 1.0,
            timing: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentityConfig {
    /// Random spectral points per identity.
    pub points: usize,
    pub seed: u64,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        IdentityConfig { points: 200, seed: 0 }
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let config = parse_document(text)?;
    config.validate()?;
    Ok(config)
}

/// Parses a document without the semantic checks, so that command-line
/// overrides can be applied first.
pub fn parse_document(text: &str) -> Result<RunConfig, CliError> {
    let de = toml::Deserializer::new(text);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let msg = inner.message().to_string();
        let at = match inner.span() {
            Some(span) => format!(" (line {})", line_of(text, span.start)),
            None => String::new(),
        };
        if path.is_empty() || path == "." {
            CliError::Validation(format!("config{at}: {msg}"))
        } else {
            CliError::Validation(format!("config field `{path}`{at}: {msg}"))
        }
    })?;
    Ok(config)
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn invalid(path: impl fmt::Display, msg: impl fmt::Display) -> CliError {
    CliError::Validation(format!("config field `{path}`: {msg}"))
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks everything that can be checked without computing: schema,
    /// widths, the stack itself, targets, sweep values and every swept
    /// configuration.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        self.validate_point()?;
        if let Some(sweep) = &self.sweep {
            let last = sweep.path.rsplit('.').next().unwrap_or("");
            for (i, &v) in sweep.values.iter().enumerate() {
                if !v.is_finite() {
                    return Err(invalid(format!("sweep.values[{i}]"), format!("{v} is not finite")));
                }
                if (last == "width" || last == "temperature") && v <= 0.0 {
                    return Err(invalid(format!("sweep.values[{i}]"), format!("{last} {v} must be positive")));
                }
                self.at_sweep_value(v)?;
            }
        }
        Ok(())
    }

    fn validate_point(&self) -> Result<(), CliError> {
        let n = self.stack.regions.len();
        if n < 2 {
            return Err(invalid("stack.regions", "a stack needs at least two regions"));
        }
        for (j, r) in self.stack.regions.iter().enumerate() {
            let w = r.width.value();
            let boundary = j == 0 || j == n - 1;
            if boundary && w.is_finite() {
                return Err(invalid(format!("stack.regions[{j}].width"), "boundary regions must be \"infinite\""));
            }
            if !boundary && !(w.is_finite() && w >= 0.0) {
                return Err(invalid(
                    format!("stack.regions[{j}].width"),
                    format!("{w} must be finite and non-negative"),
                ));
            }
        }
        if !(self.thermal.temperature.is_finite() && self.thermal.temperature >= 0.0) {
            return Err(invalid("thermal.temperature", "must be finite and non-negative"));
        }
        self.quadrature.validate().map_err(|e| invalid("quadrature", e))?;
        if let Some(w) = self.stack.pad_width {
            if !(w.is_finite() && w > 0.0) {
                return Err(invalid("stack.pad_width", format!("{w} must be positive")));
            }
        }
        let o = &self.output;
        if o.si_units && !(o.length_unit_nm.is_finite() && o.length_unit_nm > 0.0) {
            return Err(invalid("output.length_unit_nm", "must be positive"));
        }
        if self.observable.kind == ObservableKind::IdentityCheck && self.identity.points == 0 {
            return Err(invalid("identity.points", "must be positive"));
        }
        let stack = self.build_stack()?;
        self.validate_targets(&stack)
    }

    fn validate_targets(&self, stack: &LayerStack) -> Result<(), CliError> {
        let o = &self.observable;
        let last = stack.last();
        let gap_ok = |j: usize| j >= 1 && j < last;
        let set = [
            ("gap", o.gap.is_some()),
            ("body", o.body.is_some()),
            ("triple", o.triple.is_some()),
            ("split", o.split.is_some()),
        ];
        let allowed: &[&str] = match o.kind {
            ObservableKind::Energy => &["split"],
            ObservableKind::Force => &["gap", "body"],
            ObservableKind::Work => &["triple"],
            ObservableKind::IdentityCheck => &[],
        };
        for (name, present) in set {
            if present && !allowed.contains(&name) {
                return Err(invalid(format!("observable.{name}"), format!("not used by `{}`", o.kind)));
            }
        }
        match o.kind {
            ObservableKind::Energy => {
                if let Some(j) = o.split {
                    if !gap_ok(j) {
                        return Err(invalid("observable.split", format!("{j} is not an interior region (1..={})", last - 1)));
                    }
                }
            }
            ObservableKind::Force => match (o.gap, o.body) {
                (Some(j), None) if gap_ok(j) => {}
                (Some(j), None) => {
                    return Err(invalid("observable.gap", format!("{j} is not an interior region (1..={})", last - 1)))
                }
                (None, Some([k, j])) if gap_ok(k) && gap_ok(j) && k != j => {}
                (None, Some(b)) => {
                    return Err(invalid("observable.body", format!("{b:?} needs two distinct interior regions")))
                }
                _ => return Err(invalid("observable", "force needs exactly one of `gap` or `body`")),
            },
            ObservableKind::Work => match o.triple {
                Some([i, k, j]) if ((i < k && k < j) || (j < k && k < i)) && i.max(j) <= last => {}
                Some(t) => {
                    return Err(invalid("observable.triple", format!("{t:?} needs the middle index strictly between the others, all ≤ {last}")))
                }
                None => return Err(invalid("observable", "work needs `triple`")),
            },
            ObservableKind::IdentityCheck => {}
        }
        if o.kind != ObservableKind::IdentityCheck && !stack.has_conductor_boundaries() && !stack.open_boundaries() {
            return Err(invalid(
                "stack",
                "energies and forces need conductor boundaries; set `pad_outer_layers`/`enclose_in_conductors` or `open_boundaries`",
            ));
        }
        Ok(())
    }

    /// The stack described by the config, with padding applied.
    pub fn build_stack(&self) -> Result<LayerStack, CliError> {
        let regions = self.stack.regions.iter().map(|r| Region::new(r.material, r.width.value())).collect();
        let mut stack = LayerStack::new(regions).map_err(|e| invalid("stack.regions", e))?;
        if self.stack.enclose_in_conductors {
            stack = stack
                .enclose_in_conductors(self.stack.pad_width)
                .map_err(|e| invalid("stack.enclose_in_conductors", e))?;
        } else if self.stack.pad_width.is_some() {
            return Err(invalid("stack.pad_width", "only used with `enclose_in_conductors`"));
        }
        if self.stack.pad_outer_layers {
            stack = stack.pad_outer_layers().map_err(|e| invalid("stack.pad_outer_layers", e))?;
        }
        Ok(stack.with_open_boundaries(self.stack.open_boundaries))
    }

    pub fn thermal_spec(&self) -> ThermalSpec {
        ThermalSpec::new(self.thermal.temperature).expect("validated temperature")
    }

    /// A copy with the sweep field set to `value`, validated (without
    /// the sweep itself).
    pub fn at_sweep_value(&self, value: f64) -> Result<RunConfig, CliError> {
        let Some(sweep) = &self.sweep else {
            return Ok(self.clone());
        };
        let mut doc = toml::Value::try_from(self).expect("config converts to a TOML value");
        if let toml::Value::Table(t) = &mut doc {
            t.remove("sweep");
        }
        set_path(&mut doc, &sweep.path, value)?;
        let mut point: RunConfig = doc
            .try_into()
            .map_err(|e: toml::de::Error| invalid(format!("sweep.path `{}`", sweep.path), e.message()))?;
        point.sweep = None;
        point.validate_point()?;
        Ok(point)
    }

    /// Sweep values, or a single `None` point when there is no sweep.
    pub fn points(&self) -> Vec<Option<f64>> {
        match &self.sweep {
            Some(s) => s.values.iter().copied().map(Some).collect(),
            None => vec![None],
        }
    }
}

fn set_path(doc: &mut toml::Value, path: &str, value: f64) -> Result<(), CliError> {
    let bad = |msg: &str| invalid("sweep.path", format!("`{path}`: {msg}"));
    let mut cur = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for part in &parts {
        cur = match cur {
            toml::Value::Table(t) => t.get_mut(*part).ok_or_else(|| bad(&format!("no field `{part}`")))?,
            toml::Value::Array(a) => {
                let i: usize = part.parse().map_err(|_| bad(&format!("`{part}` is not an index")))?;
                let len = a.len();
                a.get_mut(i).ok_or_else(|| bad(&format!("index {i} out of range ({len} entries)")))?
            }
            _ => return Err(bad(&format!("`{part}` goes below a scalar"))),
        };
    }
    match cur {
        toml::Value::Float(_) => *cur = toml::Value::Float(value),
        toml::Value::Integer(_) if value.fract() == 0.0 && value.abs() < 9.0e15 => {
            *cur = toml::Value::Integer(value as i64)
        }
        toml::Value::Integer(_) => return Err(bad(&format!("integer field cannot take {value}"))),
        _ => return Err(bad("not a numeric field")),
    }
    Ok(())
}
