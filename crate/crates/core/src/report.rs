use std::fmt;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub axiom: String,
    pub instance: String,
}

/// Outcome of an exhaustive check. Violations are kept sorted and unique, so
/// two runs over the same input render identically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub violations: Vec<Violation>,
    /// Number of instances actually evaluated.
    pub checked: usize,
}

impl AxiomReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn record(&mut self, axiom: &str, instance: impl Into<String>) {
        self.violations.push(Violation {
            axiom: axiom.to_string(),
            instance: instance.into(),
        });
    }

    pub fn tick(&mut self) {
        self.checked += 1;
    }

    /// Check one instance: counts it and records a violation when `ok` fails.
    pub fn expect(&mut self, ok: bool, axiom: &str, instance: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.record(axiom, instance());
        }
    }

    pub fn merge(&mut self, other: AxiomReport) {
        self.checked += other.checked;
        self.violations.extend(other.violations);
    }

    pub fn finish(mut self) -> Self {
        self.violations.sort();
        self.violations.dedup();
        self
    }

    pub fn with_axiom(&self, axiom: &str) -> Vec<&Violation> {
        self.violations
            .iter()
            .filter(|v| v.axiom == axiom)
            .collect()
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            writeln!(f, "passed ({} instances)", self.checked)
        } else {
            writeln!(
                f,
                "failed: {} violations over {} instances",
                self.violations.len(),
                self.checked
            )?;
            for v in &self.violations {
                writeln!(f, "  {}: {}", v.axiom, v.instance)?;
            }
            Ok(())
        }
    }
}
