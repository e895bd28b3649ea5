//! Report envelopes, bound-check rows, CSV emission and the summary table.

use serde::Serialize;

/// Schema version stamped into every report.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Ge,
    Le,
}

/// One asserted inequality with its measured value.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub fixture: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub value: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl BoundCheck {
    pub fn ge(name: &str, fixture: &str, delta: Option<f64>, value: f64, threshold: f64) -> Self {
        BoundCheck {
            name: name.into(),
            fixture: fixture.into(),
            delta,
            value,
            threshold,
            relation: Relation::Ge,
            pass: value >= threshold,
        }
    }

    pub fn le(name: &str, fixture: &str, delta: Option<f64>, value: f64, threshold: f64) -> Self {
        BoundCheck {
            name: name.into(),
            fixture: fixture.into(),
            delta,
            value,
            threshold,
            relation: Relation::Le,
            pass: value <= threshold,
        }
    }
}

/// One summary row per (fixture, delta) pair.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SummaryRow {
    pub fixture: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_corr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_sec: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub avg_success: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_6eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_success: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_28eps: Option<f64>,
    pub pass: bool,
}

/// Full scenario report; `details` carries the scenario-specific payload.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: String,
    pub seed: u64,
    pub config_echo: serde_json::Value,
    pub bound_checks: Vec<BoundCheck>,
    pub summary: Vec<SummaryRow>,
    pub details: serde_json::Value,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.bound_checks.iter().all(|b| b.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.9}")).unwrap_or_default()
}

/// Flat CSV of the bound checks, one row each, fixed header.
pub fn bounds_csv(checks: &[BoundCheck]) -> String {
    let mut out = String::from("scenario_check,fixture,delta,value,threshold,relation,pass\n");
    for c in checks {
        out.push_str(&format!(
            "{},{},{},{:.12},{:.12},{},{}\n",
            c.name,
            c.fixture,
            fmt_opt(c.delta),
            c.value,
            c.threshold,
            match c.relation {
                Relation::Ge => "ge",
                Relation::Le => "le",
            },
            c.pass
        ));
    }
    out
}

/// Wide summary CSV, one row per (fixture, delta).
pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(
        "fixture,delta,eps_corr,eps_sec,avg_success,threshold_6eps,min_success,threshold_28eps,pass\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.fixture,
            fmt_opt(r.delta),
            fmt_opt(r.eps_corr),
            fmt_opt(r.eps_sec),
            fmt_opt(r.avg_success),
            fmt_opt(r.threshold_6eps),
            fmt_opt(r.min_success),
            fmt_opt(r.threshold_28eps),
            r.pass
        ));
    }
    out
}

/// Human-oriented fixed-width table of the summary rows.
pub fn summary_table(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<28} {:>7} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>5}\n",
        "fixture", "delta", "eps_corr", "eps_sec", "avg_succ", "1-6eps", "min_succ", "1-28eps", "pass"
    ));
    let cell = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into());
    for r in rows {
        out.push_str(&format!(
            "{:<28} {:>7} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>5}\n",
            r.fixture,
            r.delta.map(|d| format!("{d}")).unwrap_or_else(|| "-".into()),
            cell(r.eps_corr),
            cell(r.eps_sec),
            cell(r.avg_success),
            cell(r.threshold_6eps),
            cell(r.min_success),
            cell(r.threshold_28eps),
            if r.pass { "ok" } else { "FAIL" }
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_explicit_pass_everywhere() {
        let rows = vec![
            SummaryRow {
                fixture: "a".into(),
                pass: true,
                ..Default::default()
            },
            SummaryRow {
                fixture: "b".into(),
                delta: Some(0.05),
                eps_sec: Some(0.12),
                pass: false,
                ..Default::default()
            },
        ];
        let csv = summary_csv(&rows);
        for line in csv.lines().skip(1) {
            let last = line.rsplit(',').next().unwrap();
            assert!(last == "true" || last == "false");
        }
    }

    #[test]
    fn report_serialization_is_stable() {
        let report = Report {
            schema_version: REPORT_SCHEMA_VERSION,
            scenario: "t".into(),
            seed: 7,
            config_echo: serde_json::json!({"a": 1}),
            bound_checks: vec![BoundCheck::ge("x", "f", None, 1.0, 0.5)],
            summary: vec![],
            details: serde_json::Value::Null,
        };
        assert_eq!(report.to_json(), report.to_json());
        assert!(report.all_pass());
    }
}
