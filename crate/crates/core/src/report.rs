//! Check reports and their JSON encoding.
//!
//! JSON output uses a fixed field order (struct declaration order) and prints
//! every float with 17 significant digits, so identical runs produce
//! byte-identical files.

use std::io::{self, Write};

use serde::ser::Serialize;
use serde::Deserialize;
use serde_json::ser::{Formatter, PrettyFormatter};

pub const SCHEMA_VERSION: u32 = 1;

/// Max- and mean-norm of a per-node residual.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, Deserialize)]
pub struct Stats {
    pub max: f64,
    pub mean: f64,
}

impl Stats {
    /// Sequential reduction in slice order. NaN propagates into `max`.
    pub fn of(values: &[f64]) -> Stats {
        if values.is_empty() {
            return Stats::default();
        }
        let max = values
            .iter()
            .fold(0.0_f64, |m, &v| if m.is_nan() || v.is_nan() { f64::NAN } else { m.max(v) });
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Stats { max, mean }
    }

    pub fn merge(&self, other: &Stats) -> Stats {
        Stats { max: self.max.max(other.max), mean: 0.5 * (self.mean + other.mean) }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub max: f64,
    pub mean: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, stats: Stats, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            max: stats.max,
            mean: stats.mean,
            tolerance,
            pass: stats.max <= tolerance,
        }
    }

    /// Re-evaluates `pass` against a new tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Check {
        self.tolerance = tolerance;
        self.pass = self.max <= tolerance;
        self
    }
}

/// Ordered list of checks.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, Deserialize)]
#[serde(transparent)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Applies `name=value` overrides; returns names that matched nothing.
    pub fn override_tolerances(&mut self, overrides: &[(String, f64)]) -> Vec<String> {
        let mut unknown = Vec::new();
        for (name, tol) in overrides {
            let mut hit = false;
            for c in self.checks.iter_mut().filter(|c| &c.name == name) {
                *c = c.clone().with_tolerance(*tol);
                hit = true;
            }
            if !hit {
                unknown.push(name.clone());
            }
        }
        unknown
    }
}

/// Pretty JSON with `{:.16e}` floats.
struct FixedFloat<'a>(PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(w $(, $arg)*)
            }
        )*
    };
}

impl Formatter for FixedFloat<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        end_object_key();
        begin_object_value();
        end_object_value();
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, FixedFloat(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_max_and_mean() {
        let s = Stats::of(&[1.0, 3.0, 2.0]);
        assert_eq!(s.max, 3.0);
        assert_eq!(s.mean, 2.0);
        assert!(Stats::of(&[1.0, f64::NAN]).max.is_nan());
    }

    #[test]
    fn pass_iff_within_tolerance() {
        let c = Check::new("a", Stats { max: 1e-9, mean: 0.0 }, 1e-10);
        assert!(!c.pass);
        assert!(c.clone().with_tolerance(1e-9).pass);
    }

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json_string(&vec![0.1_f64, 2.0]).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("2.0000000000000000e0"), "{s}");
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1, 2.0]);
    }

    #[test]
    fn overrides_report_unknown_names() {
        let mut r = Report::default();
        r.push(Check::new("x", Stats { max: 1.0, mean: 1.0 }, 2.0));
        let unknown = r.override_tolerances(&[("x".into(), 0.5), ("y".into(), 1.0)]);
        assert_eq!(unknown, vec!["y".to_string()]);
        assert!(!r.all_pass());
    }
}
