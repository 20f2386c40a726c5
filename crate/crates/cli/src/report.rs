//! Report assembly and rendering.

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Md,
}

/// One sub-check. `gating` checks decide the exit code; the others are
/// reported for information only.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Check {
    pub anchor: String,
    pub name: String,
    pub pass: bool,
    pub gating: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(anchor: &str, name: impl Into<String>, pass: bool) -> Self {
        Check {
            anchor: anchor.to_string(),
            name: name.into(),
            pass,
            gating: true,
            detail: None,
        }
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn info(mut self) -> Self {
        self.gating = false;
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    #[serde(flatten)]
    pub data: Map<String, Value>,
}

impl Report {
    pub fn new(command: impl Into<String>, checks: Vec<Check>, data: Value) -> Self {
        let data = match data {
            Value::Object(m) => m,
            Value::Null => Map::new(),
            other => {
                let mut m = Map::new();
                m.insert("data".into(), other);
                m
            }
        };
        let pass = checks.iter().filter(|c| c.gating).all(|c| c.pass);
        Report {
            command: command.into(),
            pass,
            checks,
            data,
        }
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.gating && !c.pass)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Md => self.markdown(),
        }
    }

    fn markdown(&self) -> String {
        let mut s = format!(
            "# bfun {}\n\nresult: **{}**\n\n| anchor | check | result | detail |\n|---|---|---|---|\n",
            self.command,
            if self.pass { "pass" } else { "FAIL" }
        );
        for c in &self.checks {
            let res = match (c.pass, c.gating) {
                (true, _) => "pass",
                (false, true) => "FAIL",
                (false, false) => "fail (info)",
            };
            let detail = c
                .detail
                .as_deref()
                .unwrap_or("")
                .replace('|', "\\|")
                .replace('\n', " ");
            s.push_str(&format!(
                "| {} | {} | {} | {} |\n",
                c.anchor,
                c.name.replace('|', "\\|"),
                res,
                detail
            ));
        }
        if !self.data.is_empty() {
            s.push_str("\n## data\n\n```json\n");
            s.push_str(&serde_json::to_string_pretty(&self.data).expect("data serializes"));
            s.push_str("\n```\n");
        }
        s
    }
}
