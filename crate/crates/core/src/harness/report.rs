use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    /// Index of the case within its property.
    pub case: usize,
    /// Seed that regenerates the case on its own.
    pub seed: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub runs: usize,
    pub failures: usize,
    /// Cases the reference search could not settle within its budget.
    pub inconclusive: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl PropertyReport {
    pub fn new(name: &str) -> PropertyReport {
        PropertyReport {
            name: name.to_string(),
            runs: 0,
            failures: 0,
            inconclusive: 0,
            counterexamples: Vec::new(),
        }
    }

    /// Adds the counts and counterexamples of `other`.
    pub fn absorb(&mut self, other: PropertyReport) {
        self.runs += other.runs;
        self.failures += other.failures;
        self.inconclusive += other.inconclusive;
        let room = MAX_COUNTEREXAMPLES.saturating_sub(self.counterexamples.len());
        self.counterexamples
            .extend(other.counterexamples.into_iter().take(room));
    }

    pub(crate) fn fail(&mut self, case: usize, seed: u64, detail: String) {
        self.failures += 1;
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(Counterexample { case, seed, detail });
        }
    }
}

const MAX_COUNTEREXAMPLES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub cases: usize,
    pub properties: Vec<PropertyReport>,
}

impl Report {
    pub fn total_failures(&self) -> usize {
        self.properties.iter().map(|p| p.failures).sum()
    }

    pub fn passed(&self) -> bool {
        self.total_failures() == 0
    }

    pub fn property(&self, name: &str) -> Option<&PropertyReport> {
        self.properties.iter().find(|p| p.name == name)
    }

    /// Adds the counts of `other` property by property.
    pub fn merge(&mut self, other: Report) {
        self.cases += other.cases;
        for p in other.properties {
            match self.properties.iter_mut().find(|q| q.name == p.name) {
                Some(q) => q.absorb(p),
                None => self.properties.push(p),
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("seed {} · {} cases per property\n", self.seed, self.cases);
        for p in &self.properties {
            let status = if p.failures == 0 { "ok  " } else { "FAIL" };
            let _ = writeln!(
                out,
                "{status} {:<18} runs {:>5}  failures {:>4}  inconclusive {:>4}",
                p.name, p.runs, p.failures, p.inconclusive
            );
            for c in &p.counterexamples {
                let _ = writeln!(out, "     case {} (seed {:#018x}): {}", c.case, c.seed, c.detail);
            }
        }
        let _ = write!(
            out,
            "{}",
            if self.passed() {
                "all properties hold".to_string()
            } else {
                format!("{} failures", self.total_failures())
            }
        );
        out
    }
}
