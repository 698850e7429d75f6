use std::collections::BTreeMap;

/// Maximum number of failing points kept on a certificate.
pub const MAX_WITNESSES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

/// A failing sample: coordinates as `(re, im)` pairs and its margin.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: Vec<(f64, f64)>,
    pub margin: f64,
}

/// Outcome of one named sampled check.
///
/// Every sample contributes a margin; the check passes iff the smallest margin
/// is at least `-tolerance`. NaN margins are recorded as `-inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub name: String,
    pub status: Status,
    pub samples: usize,
    pub worst_margin: f64,
    pub tolerance: f64,
    pub witnesses: Vec<Witness>,
    /// Named outputs of the check (floors, suprema, constants).
    pub metrics: BTreeMap<String, f64>,
    pub note: Option<String>,
}

impl Certificate {
    pub fn from_margins<I>(name: impl Into<String>, tolerance: f64, items: I) -> Self
    where
        I: IntoIterator<Item = (f64, Vec<(f64, f64)>)>,
    {
        let mut samples = 0;
        let mut worst = f64::INFINITY;
        let mut witnesses = Vec::new();
        for (margin, point) in items {
            let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
            samples += 1;
            worst = worst.min(margin);
            if margin < -tolerance && witnesses.len() < MAX_WITNESSES {
                witnesses.push(Witness { point, margin });
            }
        }
        Self {
            name: name.into(),
            status: if worst >= -tolerance { Status::Pass } else { Status::Fail },
            samples,
            worst_margin: worst,
            tolerance,
            witnesses,
            metrics: BTreeMap::new(),
            note: None,
        }
    }

    /// A certificate for a construction step that could not be carried out.
    pub fn failed(name: impl Into<String>, tolerance: f64, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: Status::Fail,
            samples: 0,
            worst_margin: f64::NEG_INFINITY,
            tolerance,
            witnesses: Vec::new(),
            metrics: BTreeMap::new(),
            note: Some(reason.into()),
        }
    }

    pub fn with_metric(mut self, key: impl Into<String>, value: f64) -> Self {
        self.metrics.insert(key.into(), value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }
}
