//! Run report and its JSON encoding (floats with 17 significant digits).

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use super::config::ExperimentConfig;
use crate::greedy::CheckReport;

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub estimates: Estimates,
    pub norming: NormingSummary,
    pub checks: Checks,
    pub rate: RateSummary,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct Estimates {
    pub region_radius: f64,
    pub samples: usize,
    pub seed: u64,
    pub p_hat: f64,
    pub p_hat_raw_slope: f64,
    pub lip_hat: f64,
    pub s_hat: f64,
    pub alpha_hat: f64,
    /// `p̂ / (ŝ - 1 - p̂)` when `ŝ > p̂ + 1`.
    pub algebraic_exponent_hat: Option<f64>,
    pub exponent_relation_pass: bool,
    pub declared: Declared,
    pub used: UsedConstants,
    pub reference_solver: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Declared {
    pub p: f64,
    pub s: f64,
    pub lip: Option<f64>,
    pub alpha: Option<f64>,
    pub mode: String,
}

/// Constants fed into the checks, and where each came from
/// (`declared` or `estimated`).
#[derive(Clone, Debug, Serialize)]
pub struct UsedConstants {
    pub p: f64,
    pub s: f64,
    pub lip: f64,
    pub lip_source: String,
    pub alpha: f64,
    pub alpha_source: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BruteForceSummary {
    pub dim: usize,
    pub functionals: usize,
    pub samples_per_functional: usize,
    pub max_rel_gap: f64,
    pub max_excess: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormingSummary {
    pub dictionary: String,
    pub constant: f64,
    pub provenance: String,
    pub trials: usize,
    pub violations: usize,
    pub worst_ratio: f64,
    pub brute_force: Option<BruteForceSummary>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckSummary {
    pub checked: usize,
    pub violations: usize,
    pub worst_excess: f64,
    pub first_violation: Option<usize>,
    /// Constants the check was evaluated with.
    pub constants: BTreeMap<String, f64>,
    pub pass: bool,
}

impl CheckSummary {
    pub fn new(rep: &CheckReport, constants: &[(&str, f64)]) -> Self {
        Self {
            checked: rep.checked,
            violations: rep.violations,
            worst_excess: rep.worst_excess,
            first_violation: rep.first_violation,
            constants: constants.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            pass: rep.pass(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Checks {
    pub monotone: CheckSummary,
    pub one_step_bound: CheckSummary,
    pub orthogonality: CheckSummary,
    pub telescoping: CheckSummary,
    pub iterate_error: Option<CheckSummary>,
    pub bounded: Option<CheckSummary>,
    pub gap_sigma: Option<CheckSummary>,
    pub geometric_envelope: Option<CheckSummary>,
}

impl Checks {
    pub fn all(&self) -> Vec<(&'static str, &CheckSummary)> {
        let mut out = vec![
            ("monotone", &self.monotone),
            ("one_step_bound", &self.one_step_bound),
            ("orthogonality", &self.orthogonality),
            ("telescoping", &self.telescoping),
        ];
        for (name, c) in [
            ("iterate_error", &self.iterate_error),
            ("bounded", &self.bounded),
            ("gap_sigma", &self.gap_sigma),
            ("geometric_envelope", &self.geometric_envelope),
        ] {
            if let Some(c) = c {
                out.push((name, c));
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RateSummary {
    pub kind: String,
    pub alpha: Option<f64>,
    pub exponent: Option<f64>,
    pub r_squared: f64,
    pub r_squared_exponential: f64,
    pub r_squared_algebraic: f64,
    pub burn_in: usize,
    pub floor: f64,
    pub floor_index: usize,
    pub window: usize,
    pub predicted_kind: String,
    pub predicted_exponent: Option<f64>,
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub failed: Vec<String>,
    pub iterations: usize,
    pub termination: String,
    pub final_gap: Option<f64>,
}

/// Pretty JSON whose floats carry 17 significant digits (`{:.16e}`), so
/// every `f64` round-trips exactly.
struct Float17<'a>(PrettyFormatter<'a>);

impl Formatter for Float17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serialize with [`Float17`] formatting; non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Float17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report types always serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits_and_round_trip() {
        let x = 0.1 + 0.2;
        let text = to_json(&vec![x, 12.5, f64::NAN]);
        assert!(text.contains("3.0000000000000004e-1"), "{text}");
        assert!(text.contains("1.2500000000000000e1"));
        assert!(text.contains("null"));
        let back: Vec<Option<f64>> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, vec![Some(x), Some(12.5), None]);
    }
}
