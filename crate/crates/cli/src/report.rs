use serde::Serialize;

/// What every subcommand prints. The JSON keys are stable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommandResult {
    pub result: String,
    pub certified: bool,
    pub witness: Vec<String>,
    pub bound: Option<usize>,
    pub mode: String,
}

impl CommandResult {
    pub fn new(result: impl Into<String>, certified: bool, mode: impl Into<String>) -> Self {
        Self {
            result: result.into(),
            certified,
            witness: Vec::new(),
            bound: None,
            mode: mode.into(),
        }
    }

    pub fn witness(mut self, lines: Vec<String>) -> Self {
        self.witness = lines;
        self
    }

    pub fn bound(mut self, b: usize) -> Self {
        self.bound = Some(b);
        self
    }

    /// 0 for holds/related/feasible and plain outputs, 1 for
    /// fails/unrelated/infeasible, 2 for unknown/deferred.
    pub fn exit_code(&self) -> u8 {
        match self.result.as_str() {
            "fails" | "unrelated" | "infeasible" => 1,
            "unknown" | "deferred" => 2,
            _ => 0,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("result: {}\n", self.result);
        out.push_str(&format!("certified: {}\n", if self.certified { "yes" } else { "no" }));
        out.push_str(&format!("mode: {}\n", self.mode));
        if let Some(b) = self.bound {
            out.push_str(&format!("bound: {b}\n"));
        }
        if !self.witness.is_empty() {
            out.push_str("witness:\n");
            for line in &self.witness {
                out.push_str("  ");
                out.push_str(line);
                out.push('\n');
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CommandResult::new("holds", true, "m").exit_code(), 0);
        assert_eq!(CommandResult::new("relation", true, "m").exit_code(), 0);
        assert_eq!(CommandResult::new("infeasible", true, "m").exit_code(), 1);
        assert_eq!(CommandResult::new("deferred", false, "m").exit_code(), 2);
    }

    #[test]
    fn text_layout() {
        let r = CommandResult::new("holds", false, "grid=2")
            .bound(3)
            .witness(vec!["a".into(), "  b".into()]);
        assert_eq!(
            r.to_text(),
            "result: holds\ncertified: no\nmode: grid=2\nbound: 3\nwitness:\n  a\n    b\n"
        );
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["bound"], 3);
        assert_eq!(v["witness"][1], "  b");
    }
}
