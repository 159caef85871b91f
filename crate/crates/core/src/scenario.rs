//! Scenario files: one protocol configuration and the metrics to report.
//!
//! Partition strings are resolved against the Wigner state on `[a, t, A]`
//! first and against Alice's lab state on `[a, t, m]` otherwise. A partition
//! that names only some subsystems is evaluated on the corresponding
//! marginal.

use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::channel::{block_dephasing, make_channel, ChannelKind, KrausChannel};
use crate::circuit::ud_projectors;
use crate::error::{Error, Result};
use crate::metrics::{build_witnesses, negativity, trace_distance, witness_expectation, witness_violation};
use crate::protocol::{
    alice_lab_state, alice_state_pair, key_security, semiclassical_bound, traced_negativity_with,
    ud_povm, wigner_state, AliceModel,
};
use crate::state::{Bipartition, DensityMatrix};

pub const METRICS: [&str; 6] = [
    "negativity",
    "witnesses",
    "key_security",
    "semiclassical_bound",
    "traced_negativity",
    "trace_distance",
];

const DEFAULT_PARTITION: &str = "a|tA";
const EQUAL_MIXTURE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelType {
    #[default]
    Identity,
    Dephasing,
    Depolarizing,
    Kraus,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DephasingBasis {
    /// Coherences between Alice's up and down subspaces.
    #[default]
    Ud,
    Computational,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    #[serde(rename = "type", default)]
    pub kind: ChannelType,
    #[serde(default)]
    pub strength: f64,
    #[serde(default)]
    pub basis: DephasingBasis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus_file: Option<PathBuf>,
}

impl ChannelSpec {
    /// Relative `kraus_file` paths are resolved against `base_dir`.
    pub fn build(&self, d_a: usize, base_dir: Option<&Path>) -> Result<KrausChannel> {
        match self.kind {
            ChannelType::Identity => make_channel(ChannelKind::Identity, d_a, self.strength, None),
            ChannelType::Depolarizing => make_channel(ChannelKind::Depolarizing, d_a, self.strength, None),
            ChannelType::Dephasing => match self.basis {
                DephasingBasis::Computational => {
                    make_channel(ChannelKind::Dephasing, d_a, self.strength, None)
                }
                DephasingBasis::Ud => {
                    let (up, down) = ud_projectors(d_a)?;
                    block_dephasing(&[up, down], self.strength)
                }
            },
            ChannelType::Kraus => {
                let file = self
                    .kraus_file
                    .as_ref()
                    .ok_or_else(|| Error::invalid("kraus channel needs `kraus_file`"))?;
                let path = match base_dir {
                    Some(dir) if file.is_relative() => dir.join(file),
                    _ => file.clone(),
                };
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
                let ch: KrausChannel = serde_json::from_str(&text)
                    .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
                if ch.dim() != d_a {
                    return Err(Error::dim(format!(
                        "Kraus channel of dimension {} for Alice of dimension {d_a}",
                        ch.dim()
                    )));
                }
                Ok(ch)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AliceSpec {
    pub dim: usize,
    pub epsilon: f64,
    #[serde(default)]
    pub channel: ChannelSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub p: f64,
    pub alice: AliceSpec,
    #[serde(default)]
    pub partitions: Vec<String>,
    #[serde(default)]
    pub metrics: Vec<String>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("scenario: {e}")))
    }

    fn partition_strings(&self) -> Vec<&str> {
        if self.partitions.is_empty() {
            vec![DEFAULT_PARTITION]
        } else {
            self.partitions.iter().map(|s| s.trim()).collect()
        }
    }

    /// Checks everything that does not require building states.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::invalid(format!("p = {} is outside [0, 1]", self.p)));
        }
        if !(0.0..=1.0).contains(&self.alice.epsilon) {
            return Err(Error::invalid(format!(
                "epsilon = {} is outside [0, 1]",
                self.alice.epsilon
            )));
        }
        if self.alice.dim < 2 {
            return Err(Error::invalid(format!("Alice dimension {} < 2", self.alice.dim)));
        }
        for m in &self.metrics {
            if !METRICS.contains(&m.as_str()) {
                return Err(Error::invalid(format!(
                    "unknown metric `{m}` (expected one of {})",
                    METRICS.join(", ")
                )));
            }
        }
        if self.wants("negativity") {
            let wigner = crate::state::SubsystemLayout::new([("a", 2), ("t", 2), ("A", self.alice.dim)])?;
            let lab = crate::state::SubsystemLayout::qubits(&["a", "t", "m"]);
            for s in self.partition_strings() {
                resolve(s, &wigner, &lab)?;
            }
        }
        Ok(())
    }

    fn wants(&self, metric: &str) -> bool {
        self.metrics.iter().any(|m| m == metric)
    }

    /// Report columns in output order.
    pub fn column_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for m in &self.metrics {
            match m.as_str() {
                "negativity" => out.extend(
                    self.partition_strings()
                        .into_iter()
                        .map(|s| format!("negativity[{s}]")),
                ),
                "witnesses" => out.extend(
                    ["witness_w1", "witness_w2", "witness_violation"].map(String::from),
                ),
                other => out.push(other.to_string()),
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    Wigner,
    Lab,
}

fn resolve(
    s: &str,
    wigner: &crate::state::SubsystemLayout,
    lab: &crate::state::SubsystemLayout,
) -> Result<(Target, Bipartition)> {
    match Bipartition::parse(s, wigner) {
        Ok(b) => Ok((Target::Wigner, b)),
        Err(first) => match Bipartition::parse(s, lab) {
            Ok(b) => Ok((Target::Lab, b)),
            // report the label that is unknown to both layouts
            Err(second) if first == Error::UnknownLabel("m".into()) => Err(second),
            Err(_) => Err(first),
        },
    }
}

fn negativity_on(rho: &DensityMatrix, bip: &Bipartition) -> Result<f64> {
    if bip.covers(rho.layout()) {
        return negativity(rho, bip);
    }
    let keep: Vec<&str> = bip.labels().collect();
    let marginal = rho.partial_trace(&keep)?;
    let bip = Bipartition::new(bip.left(), bip.right(), marginal.layout())?;
    negativity(&marginal, &bip)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub metrics: IndexMap<String, f64>,
    pub negativity: IndexMap<String, f64>,
    pub warnings: Vec<String>,
}

impl RunReport {
    /// Value for a name from [`Scenario::column_names`]; `None` if skipped.
    pub fn value(&self, column: &str) -> Option<f64> {
        if let Some(part) = column
            .strip_prefix("negativity[")
            .and_then(|s| s.strip_suffix(']'))
        {
            return self.negativity.get(part).copied();
        }
        self.metrics.get(column).copied()
    }

    pub fn columns(&self) -> Vec<(String, Option<f64>)> {
        self.scenario
            .column_names()
            .into_iter()
            .map(|c| {
                let v = self.value(&c);
                (c, v)
            })
            .collect()
    }
}

pub fn run_scenario(scenario: &Scenario, base_dir: Option<&Path>) -> Result<RunReport> {
    scenario.validate()?;
    let channel = scenario.alice.channel.build(scenario.alice.dim, base_dir)?;
    let model = AliceModel::new(scenario.alice.dim, scenario.alice.epsilon, channel)?;
    let (tau, upsilon) = alice_state_pair(&model)?;
    let rho = wigner_state(scenario.p, &tau, &upsilon)?;

    let mut metrics = IndexMap::new();
    let mut neg = IndexMap::new();
    let mut warnings = Vec::new();
    for m in &scenario.metrics {
        match m.as_str() {
            "negativity" => {
                let lab = alice_lab_state(scenario.p)?;
                for s in scenario.partition_strings() {
                    let (target, bip) = resolve(s, rho.layout(), lab.layout())?;
                    let state = match target {
                        Target::Wigner => &rho,
                        Target::Lab => &lab,
                    };
                    neg.insert(s.to_string(), negativity_on(state, &bip)?);
                }
            }
            "witnesses" => {
                let (up, down) = ud_projectors(model.dim())?;
                let (w1, w2) = build_witnesses(model.dim(), &up, &down)?;
                metrics.insert("witness_w1".into(), witness_expectation(&rho, &w1)?);
                metrics.insert("witness_w2".into(), witness_expectation(&rho, &w2)?);
                metrics.insert("witness_violation".into(), witness_violation(&rho, &w1, &w2)?);
            }
            "key_security" => {
                if (scenario.p - 0.5).abs() > EQUAL_MIXTURE_TOL {
                    warnings.push(format!(
                        "key_security skipped: defined only at p = 0.5 (got p = {})",
                        scenario.p
                    ));
                } else {
                    metrics.insert(m.clone(), key_security(&rho)?);
                }
            }
            "semiclassical_bound" => {
                let povm = ud_povm(model.dim())?;
                metrics.insert(m.clone(), semiclassical_bound(&tau, &upsilon, &povm)?);
            }
            "traced_negativity" => {
                metrics.insert(m.clone(), traced_negativity_with(scenario.p, &tau, &upsilon)?);
            }
            "trace_distance" => {
                metrics.insert(m.clone(), trace_distance(&tau, &upsilon)?);
            }
            other => return Err(Error::invalid(format!("unknown metric `{other}`"))),
        }
    }
    Ok(RunReport {
        scenario: scenario.clone(),
        metrics,
        negativity: neg,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    P,
    Epsilon,
    ChannelStrength,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::P => "p",
            Self::Epsilon => "epsilon",
            Self::ChannelStrength => "channel.strength",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl SweepSpec {
    /// Parses `name=start:stop:step`. The grid includes `stop` when it lies
    /// on the grid up to rounding.
    pub fn parse(s: &str) -> Result<Self> {
        let (name, range) = s
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("sweep `{s}` is not name=start:stop:step")))?;
        let param = match name.trim() {
            "p" => SweepParam::P,
            "epsilon" => SweepParam::Epsilon,
            "channel.strength" => SweepParam::ChannelStrength,
            other => {
                return Err(Error::invalid(format!(
                    "cannot sweep `{other}` (expected p, epsilon or channel.strength)"
                )))
            }
        };
        let parts: Vec<f64> = range
            .split(':')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad number `{x}` in sweep `{s}`")))
            })
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(Error::invalid(format!("sweep `{s}` is not name=start:stop:step")));
        };
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(Error::invalid(format!("sweep `{s}` has non-finite bounds")));
        }
        if step <= 0.0 || stop < start {
            return Err(Error::invalid(format!("sweep `{s}` has an empty grid")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        let last = start + (n - 1) as f64 * step;
        let hits_stop = n > 1 && (last - stop).abs() <= 1e-9 * stop.abs().max(1.0);
        let values = (0..n)
            .map(|i| {
                if hits_stop {
                    start + (stop - start) * i as f64 / (n - 1) as f64
                } else {
                    start + i as f64 * step
                }
            })
            .collect();
        Ok(Self { param, values })
    }
}

pub fn with_param(scenario: &Scenario, param: SweepParam, value: f64) -> Scenario {
    let mut s = scenario.clone();
    match param {
        SweepParam::P => s.p = value,
        SweepParam::Epsilon => s.alice.epsilon = value,
        SweepParam::ChannelStrength => s.alice.channel.strength = value,
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(json: &str) -> Scenario {
        Scenario::from_json(json).unwrap()
    }

    #[test]
    fn reference_scenario() {
        let s = scenario(
            r#"{"p": 0.5, "alice": {"dim": 2, "epsilon": 0.0, "channel": {"type": "identity"}},
                "partitions": ["a|tA", "aA|t", "a|t", "am|t"],
                "metrics": ["negativity", "witnesses", "key_security", "semiclassical_bound",
                            "traced_negativity", "trace_distance"]}"#,
        );
        let r = run_scenario(&s, None).unwrap();
        assert!((r.negativity["a|tA"] - 0.5).abs() < 1e-12);
        assert!((r.negativity["aA|t"] - 0.5).abs() < 1e-12);
        assert!(r.negativity["a|t"].abs() < 1e-12);
        assert!((r.negativity["am|t"] - 0.5).abs() < 1e-12);
        assert!((r.metrics["key_security"] - 0.5).abs() < 1e-12);
        assert!((r.metrics["semiclassical_bound"] - 0.5).abs() < 1e-12);
        assert!(r.metrics["traced_negativity"].abs() < 1e-12);
        assert!((r.metrics["trace_distance"] - 1.0).abs() < 1e-12);
        assert!((r.metrics["witness_w1"] + r.metrics["witness_w2"]).abs() < 1e-12);
        assert!(r.warnings.is_empty());
        assert_eq!(r.columns().len(), 4 + 3 + 4);
    }

    #[test]
    fn identical_memories_are_insecure() {
        let s = scenario(r#"{"p": 0.5, "alice": {"dim": 3, "epsilon": 1.0}, "metrics": ["key_security"]}"#);
        assert!(run_scenario(&s, None).unwrap().metrics["key_security"].abs() < 1e-12);
    }

    #[test]
    fn key_security_off_balance_is_a_warning() {
        let s = scenario(r#"{"p": 0.3, "alice": {"dim": 2, "epsilon": 0.0}, "metrics": ["key_security"]}"#);
        let r = run_scenario(&s, None).unwrap();
        assert!(r.metrics.is_empty());
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.columns(), vec![("key_security".to_string(), None)]);
    }

    #[test]
    fn bad_inputs() {
        let s = scenario(r#"{"p": 0.5, "alice": {"dim": 2, "epsilon": 0.0}, "partitions": ["a|q"], "metrics": ["negativity"]}"#);
        assert_eq!(run_scenario(&s, None).unwrap_err(), Error::UnknownLabel("q".into()));
        let s = scenario(r#"{"p": 0.5, "alice": {"dim": 2, "epsilon": 0.0}, "metrics": ["entropy"]}"#);
        assert!(matches!(run_scenario(&s, None), Err(Error::Invalid(_))));
        let s = scenario(r#"{"p": 1.5, "alice": {"dim": 2, "epsilon": 0.0}}"#);
        assert!(s.validate().is_err());
        assert!(Scenario::from_json(r#"{"p": 0.5}"#).is_err());
        let s = scenario(r#"{"p": 0.5, "alice": {"dim": 2, "epsilon": 0.0, "channel": {"type": "kraus"}}}"#);
        assert!(run_scenario(&s, None).is_err());
    }

    #[test]
    fn dephasing_preserves_distinguishable_records() {
        let s = scenario(
            r#"{"p": 0.5, "alice": {"dim": 4, "epsilon": 0.0, "channel": {"type": "dephasing", "strength": 1.0}},
                "metrics": ["key_security"]}"#,
        );
        assert!((run_scenario(&s, None).unwrap().metrics["key_security"] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kraus_file_is_loaded_relative_to_base() {
        let dir = std::env::temp_dir().join(format!("wfsim-kraus-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let ch = make_channel(ChannelKind::Depolarizing, 2, 0.5, None).unwrap();
        std::fs::write(dir.join("ch.json"), serde_json::to_string(&ch).unwrap()).unwrap();
        let s = scenario(
            r#"{"p": 0.5, "alice": {"dim": 2, "epsilon": 0.0, "channel": {"type": "kraus", "kraus_file": "ch.json"}},
                "metrics": ["trace_distance"]}"#,
        );
        let r = run_scenario(&s, Some(&dir)).unwrap();
        assert!((r.metrics["trace_distance"] - 0.5).abs() < 1e-12);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn sweep_grammar() {
        let s = SweepSpec::parse("p=0:1:0.25").unwrap();
        assert_eq!(s.param, SweepParam::P);
        assert_eq!(s.values, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let s = SweepSpec::parse("epsilon=0:1:0.1").unwrap();
        assert_eq!(s.values.len(), 11);
        assert_eq!(s.values[3], 0.3);
        assert_eq!(*s.values.last().unwrap(), 1.0);
        let s = SweepSpec::parse("channel.strength=0:1:0.3").unwrap();
        assert_eq!(s.values.len(), 4);
        assert_eq!(SweepSpec::parse("p=0.5:0.5:0.1").unwrap().values, vec![0.5]);
        for bad in ["p=1:0:0.1", "p=0:1:0", "p=0:1", "q=0:1:0.1", "p0:1:0.1", "p=a:1:0.1"] {
            assert!(SweepSpec::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn with_param_sets_field() {
        let s = scenario(r#"{"p": 0.5, "alice": {"dim": 2, "epsilon": 0.0}}"#);
        assert_eq!(with_param(&s, SweepParam::Epsilon, 0.3).alice.epsilon, 0.3);
        assert_eq!(with_param(&s, SweepParam::ChannelStrength, 0.2).alice.channel.strength, 0.2);
        assert_eq!(with_param(&s, SweepParam::P, 0.1).p, 0.1);
    }
}
