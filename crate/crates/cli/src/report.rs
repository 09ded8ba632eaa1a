//! Report assembly and rendering. One JSON shape and one plain-text
//! table shape, both with fixed field and row order so repeated runs
//! are byte-identical.

use serde::Serialize;

/// Version tag carried by every JSON report; the schema document in
/// docs/ describes this exact shape.
pub const SCHEMA: &str = "hilbtaut-report/1";

/// One report row. Anchored rows carry an expected value and a
/// citation; informational rows carry only the computed value.
#[derive(Clone, Serialize)]
pub struct ReportRow {
    pub label: String,
    pub citation: Option<String>,
    pub provenance: &'static str,
    pub expected: Option<String>,
    pub computed: String,
    pub matches: bool,
}

impl ReportRow {
    /// Informational row; matches by definition.
    pub fn info(label: impl Into<String>, provenance: &'static str, computed: impl Into<String>) -> Self {
        ReportRow {
            label: label.into(),
            citation: None,
            provenance,
            expected: None,
            computed: computed.into(),
            matches: true,
        }
    }

    pub fn with_citation(mut self, citation: impl Into<String>) -> Self {
        self.citation = Some(citation.into());
        self
    }
}

#[derive(Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub rows: Vec<ReportRow>,
    pub overall: &'static str,
}

impl Report {
    pub fn new(command: impl Into<String>, rows: Vec<ReportRow>) -> Self {
        let overall = if rows.iter().all(|r| r.matches) {
            "PASS"
        } else {
            "FAIL"
        };
        Report {
            schema: SCHEMA,
            command: command.into(),
            rows,
            overall,
        }
    }

    pub fn passed(&self) -> bool {
        self.overall == "PASS"
    }

    /// JSON rendering: stable key order, trailing newline.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serialization is total");
        out.push('\n');
        out
    }

    /// Plain-text rendering: aligned columns, one row per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} ({} rows)\n", self.command, self.rows.len()));
        let label_width = self
            .rows
            .iter()
            .map(|r| r.label.len())
            .max()
            .unwrap_or(0);
        let prov_width = self
            .rows
            .iter()
            .map(|r| r.provenance.len())
            .max()
            .unwrap_or(0);
        for (i, row) in self.rows.iter().enumerate() {
            let status = if row.matches { "ok" } else { "!!" };
            out.push_str(&format!(
                "{:>3}  {status}  {:prov_width$}  {:label_width$}  {}",
                i + 1,
                row.provenance,
                row.label,
                row.computed,
            ));
            if let Some(expected) = &row.expected {
                if !row.matches {
                    out.push_str(&format!("  (expected {expected})"));
                }
            }
            if let Some(citation) = &row.citation {
                out.push_str(&format!("  [{citation}]"));
            }
            out.push('\n');
        }
        out.push_str(&format!("overall: {}\n", self.overall));
        out
    }
}

// ---- Tests ----
