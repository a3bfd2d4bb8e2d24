use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Named pass/fail records accumulated by a command.
#[derive(Clone, Debug, Default)]
pub struct Ledger(pub Vec<Check>);

impl Ledger {
    pub fn record(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.0.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.0.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommandEcho {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub elapsed_ms: u128,
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: CommandEcho,
    pub input_sha256: Vec<String>,
    pub results: Value,
    pub checks: Vec<Check>,
    pub timing: Timing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
                s.push('\n');
                s
            }
            Format::Table => self.table(),
        }
    }

    fn table(&self) -> String {
        let mut rows = vec![("command".to_string(), std::iter::once(self.command.name.clone()).chain(self.command.args.iter().cloned()).collect::<Vec<_>>().join(" "))];
        for (i, h) in self.input_sha256.iter().enumerate() {
            rows.push((format!("input[{i}].sha256"), h.clone()));
        }
        flatten("", &self.results, &mut rows);
        let passed = self.checks.iter().filter(|c| c.passed).count();
        rows.push(("checks".into(), format!("{passed}/{} passed", self.checks.len())));
        rows.push(("elapsed_ms".into(), self.timing.elapsed_ms.to_string()));
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            out.push_str(&format!("{k:width$}  {v}\n"));
        }
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                out.push_str(&format!("  {mark}  {}\n", c.name));
            } else {
                out.push_str(&format!("  {mark}  {}: {}\n", c.name, c.detail));
            }
        }
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// `a.b[2].c = value` rows; arrays of scalars stay on one row.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| scalar(x).is_some()) => {
            let items: Vec<String> = a.iter().filter_map(scalar).collect();
            out.push((prefix.to_string(), format!("[{}]", items.join(", "))));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        x => out.push((prefix.to_string(), scalar(x).unwrap_or_default())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn report(results: Value, checks: Vec<Check>) -> RunReport {
        RunReport {
            command: CommandEcho { name: "depth".into(), args: vec!["-".into()] },
            input_sha256: vec!["ab".into()],
            results,
            checks,
            timing: Timing { elapsed_ms: 3, threads: 1 },
        }
    }

    #[test]
    fn one_failed_check_fails_the_run() {
        let mut l = Ledger::default();
        l.record("a", true, "");
        assert!(l.passed());
        l.record("b", false, "x");
        assert!(!l.passed());
        assert!(!report(json!({}), l.0).passed());
    }

    #[test]
    fn table_flattens_nested_results() {
        let t = report(json!({"beta": "7/3", "bounds": {"delta": "1"}, "pages": [{"index": 1, "ranks": [2, 0]}]}), vec![
            Check { name: "methods_agree".into(), passed: true, detail: String::new() },
        ])
        .render(Format::Table);
        assert!(t.contains("beta"));
        assert!(t.contains("bounds.delta"));
        assert!(t.contains("pages[0].ranks"));
        assert!(t.contains("[2, 0]"));
        assert!(t.contains("PASS  methods_agree"));
    }
}
