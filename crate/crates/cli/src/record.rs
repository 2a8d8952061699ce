//! The serialized result of one command.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub version: String,
    pub params: BTreeMap<String, Value>,
    pub results: Value,
    /// Wall-clock milliseconds per phase. Left out of stdout unless asked
    /// for, so that repeated runs print identical bytes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
    /// ISO-8601, same treatment as `timings`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl RunRecord {
    pub fn new(command: &str, params: BTreeMap<String, Value>, results: Value, timer: Timer) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            params,
            results,
            timings: Some(timer.phases),
            timestamp: Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)),
        }
    }

    /// The record without its nondeterministic fields.
    pub fn stripped(&self) -> Self {
        Self { timings: None, timestamp: None, ..self.clone() }
    }
}

/// Collects named phase durations.
#[derive(Debug, Default)]
pub struct Timer {
    phases: BTreeMap<String, f64>,
}

impl Timer {
    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.phases.entry(phase.to_string()).or_default() += start.elapsed().as_secs_f64() * 1e3;
        out
    }
}

/// Builds a parameter map from `key => value` pairs.
#[macro_export]
macro_rules! params {
    ($($k:expr => $v:expr),* $(,)?) => {{
        let mut m = std::collections::BTreeMap::new();
        $(m.insert($k.to_string(), serde_json::json!($v));)*
        m
    }};
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_losslessly() {
        let results = serde_json::json!({ "x": 0.1 + 0.2, "tiny": 5e-324, "big": 1.7976931348623157e308 });
        let rec = RunRecord::new("t", params! { "p" => 7 }, results, Timer::default());
        let text = serde_json::to_string(&rec).unwrap();
        let back: RunRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.results["x"].as_f64().unwrap().to_bits(), (0.1f64 + 0.2).to_bits());
        let s = serde_json::to_string(&rec.stripped()).unwrap();
        assert!(!s.contains("timestamp") && !s.contains("timings"));
    }
}
