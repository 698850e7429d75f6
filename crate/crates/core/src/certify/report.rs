use std::collections::BTreeMap;

use serde::ser::{Serialize, SerializeMap, SerializeSeq, Serializer};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use super::{Suite, SuiteConfig};
use crate::{Certificate, Status};

/// Fixed 17-significant-digit scientific notation; non-finite values as
/// `inf`, `-inf` and `nan`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

/// JSON tree whose objects keep sorted keys and whose floats print in fixed format.
enum Json {
    Float(f64),
    Int(u64),
    Str(String),
    Arr(Vec<Json>),
    Obj(BTreeMap<&'static str, Json>),
    Map(BTreeMap<String, Json>),
    Null,
}

impl Serialize for Json {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Json::Float(x) if x.is_finite() => {
                let raw = RawValue::from_string(format_float(*x)).map_err(serde::ser::Error::custom)?;
                raw.serialize(s)
            }
            Json::Float(x) => s.serialize_str(&format_float(*x)),
            Json::Int(i) => s.serialize_u64(*i),
            Json::Str(t) => s.serialize_str(t),
            Json::Arr(v) => {
                let mut seq = s.serialize_seq(Some(v.len()))?;
                for x in v {
                    seq.serialize_element(x)?;
                }
                seq.end()
            }
            Json::Obj(m) => {
                let mut map = s.serialize_map(Some(m.len()))?;
                for (k, v) in m {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
            Json::Map(m) => {
                let mut map = s.serialize_map(Some(m.len()))?;
                for (k, v) in m {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
            Json::Null => s.serialize_none(),
        }
    }
}

/// Outcome of a suite run.
#[derive(Debug, Clone)]
pub struct Report {
    pub suite: Suite,
    pub config: SuiteConfig,
    pub certificates: Vec<Certificate>,
    /// SHA-256 of the scenario dump, hex.
    pub schedule_fingerprint: String,
    pub seed: u64,
    /// Present only when timing was requested, so that default reports are byte-stable.
    pub elapsed_ms: Option<u64>,
    pub status: Status,
    dump: String,
}

impl Report {
    pub fn new(
        suite: Suite,
        config: SuiteConfig,
        certificates: Vec<Certificate>,
        dump: String,
        elapsed_ms: Option<u64>,
    ) -> Self {
        let status = if !certificates.is_empty() && certificates.iter().all(Certificate::passed) {
            Status::Pass
        } else {
            Status::Fail
        };
        let schedule_fingerprint = Sha256::digest(dump.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        Self { suite, config, certificates, schedule_fingerprint, seed: config.seed, elapsed_ms, status, dump }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Schedule constants, `w0`, form constants: the text behind the fingerprint.
    pub fn schedule_dump(&self) -> &str {
        &self.dump
    }

    pub fn certificate(&self, name: &str) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.name == name)
    }

    fn config_json(&self) -> Json {
        let c = &self.config;
        Json::Obj(BTreeMap::from([
            ("n", Json::Int(c.n as u64)),
            ("trunc", Json::Int(c.trunc as u64)),
            ("samples", Json::Int(c.samples as u64)),
            ("lemma3_samples", Json::Int(c.lemma3_samples as u64)),
            ("seed", Json::Int(c.seed)),
            ("tol", Json::Float(c.tol)),
            ("fd_step", Json::Float(c.fd_step)),
        ]))
    }

    fn certificate_json(c: &Certificate) -> Json {
        let witnesses = c
            .witnesses
            .iter()
            .map(|w| {
                let point =
                    w.point.iter().map(|(re, im)| Json::Arr(vec![Json::Float(*re), Json::Float(*im)])).collect();
                Json::Obj(BTreeMap::from([("margin", Json::Float(w.margin)), ("point", Json::Arr(point))]))
            })
            .collect();
        let metrics = c.metrics.iter().map(|(k, v)| (k.clone(), Json::Float(*v))).collect();
        Json::Obj(BTreeMap::from([
            ("name", Json::Str(c.name.clone())),
            ("status", Json::Str(c.status.as_str().into())),
            ("samples", Json::Int(c.samples as u64)),
            ("worst_margin", Json::Float(c.worst_margin)),
            ("tolerance", Json::Float(c.tolerance)),
            ("witnesses", Json::Arr(witnesses)),
            ("metrics", Json::Map(metrics)),
            ("note", c.note.clone().map_or(Json::Null, Json::Str)),
        ]))
    }

    /// Pretty JSON with sorted keys, newline-terminated.
    pub fn to_json(&self) -> String {
        let mut top = BTreeMap::from([
            ("suite", Json::Str(self.suite.as_str().into())),
            ("config", self.config_json()),
            ("certificates", Json::Arr(self.certificates.iter().map(Self::certificate_json).collect())),
            ("schedule_fingerprint", Json::Str(self.schedule_fingerprint.clone())),
            ("seed", Json::Int(self.seed)),
            ("status", Json::Str(self.status.as_str().into())),
        ]);
        if let Some(ms) = self.elapsed_ms {
            top.insert("elapsed_ms", Json::Int(ms));
        }
        let mut s = serde_json::to_string_pretty(&Json::Obj(top)).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per certificate.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.certificates {
            s.push_str(&format!(
                "{} {} samples={} worst_margin={}",
                c.status.as_str().to_uppercase(),
                c.name,
                c.samples,
                format_float(c.worst_margin)
            ));
            for (k, v) in &c.metrics {
                s.push_str(&format!(" {k}={}", format_float(*v)));
            }
            if let Some(n) = &c.note {
                s.push_str(&format!(" note=\"{n}\""));
            }
            s.push('\n');
        }
        s.push_str(&format!("suite {} {}\n", self.suite, self.status.as_str()));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(-0.25), "-2.5000000000000000e-1");
        assert_eq!(format_float(f64::NEG_INFINITY), "-inf");
        assert_eq!(format_float(f64::NAN), "nan");
        let x = 0.1 + 0.2;
        assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn json_is_valid_sorted_and_exact() {
        let c = Certificate::from_margins("x", 1e-6, [(-0.5, vec![(1.0, 2.0)]), (f64::NEG_INFINITY, vec![])])
            .with_metric("zeta", 3.0)
            .with_metric("alpha", 0.1);
        let r = Report::new(Suite::Thm1, SuiteConfig::default(), vec![c], "dump".into(), None);
        let text = r.to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["status"], "fail");
        assert_eq!(v["certificates"][0]["worst_margin"], "-inf");
        assert_eq!(v["certificates"][0]["witnesses"][0]["margin"].as_f64(), Some(-0.5));
        assert_eq!(v["certificates"][0]["metrics"]["alpha"].as_f64(), Some(0.1));
        assert!(v.get("elapsed_ms").is_none());
        assert!(text.find("\"certificates\"").unwrap() < text.find("\"config\"").unwrap());
        assert!(text.find("\"alpha\"").unwrap() < text.find("\"zeta\"").unwrap());
        assert_eq!(r.schedule_fingerprint, "b6ca0868bca6a2926b70aa1a71592038d9030fe26d4214edcfbd6cf41f2f4654");
    }

    #[test]
    fn empty_report_fails() {
        let r = Report::new(Suite::Thm1, SuiteConfig::default(), vec![], String::new(), Some(3));
        assert!(!r.passed());
        assert!(r.to_json().contains("\"elapsed_ms\": 3"));
    }
}
