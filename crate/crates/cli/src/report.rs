use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

use hpnet_core::timed::TimedStep;
use hpnet_core::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckResult {
    Pass,
    Fail,
    Unknown,
}

impl CheckResult {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckResult::Pass => "pass",
            CheckResult::Fail => "fail",
            CheckResult::Unknown => "unknown",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            CheckResult::Pass
        } else {
            CheckResult::Fail
        }
    }
}

impl From<Verdict> for CheckResult {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Yes => CheckResult::Pass,
            Verdict::No => CheckResult::Fail,
            Verdict::Unknown => CheckResult::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessStep {
    pub transition: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<u64>,
}

impl WitnessStep {
    pub fn untimed(trace: &[String]) -> Vec<WitnessStep> {
        trace.iter().map(|t| WitnessStep { transition: t.clone(), time: None }).collect()
    }

    pub fn timed(trace: &[TimedStep]) -> Vec<WitnessStep> {
        trace.iter().map(|s| WitnessStep { transition: s.transition.clone(), time: Some(s.time) }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckVerdict {
    pub check: String,
    pub result: CheckResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<WitnessStep>>,
    pub details: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub command: String,
    pub input: String,
    pub verdicts: Vec<CheckVerdict>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.result == CheckResult::Pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.command, self.input);
        let width = self.verdicts.iter().map(|v| v.check.len()).max().unwrap_or(0);
        for v in &self.verdicts {
            let _ = writeln!(out, "  {:width$}  {}", v.check, v.result.as_str().to_uppercase());
            if let Value::Object(map) = &v.details {
                for (k, val) in map {
                    let shown = match val {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    let _ = writeln!(out, "      {k}: {shown}");
                }
            }
            if let Some(w) = &v.witness {
                let steps: Vec<String> = w
                    .iter()
                    .map(|s| match s.time {
                        Some(t) => format!("{}@{t}", s.transition),
                        None => s.transition.clone(),
                    })
                    .collect();
                let shown = if steps.is_empty() { "(initial state)".to_string() } else { steps.join(" -> ") };
                let _ = writeln!(out, "      witness: {shown}");
            }
        }
        out
    }
}
