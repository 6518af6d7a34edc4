use std::collections::BTreeMap;

use geogirth::boxworld::BoxError;
use geogirth::gallai::{CertificateReport, GallaiError};
use geogirth::lineworld::LineError;
use geogirth::scene::VerifyReport;
use geogirth::structure::{CertificateSummary, Provenance};
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    AssertionFailed,
    BudgetExhausted,
    ProviderRefused,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::AssertionFailed => 2,
            Status::BudgetExhausted => 3,
            Status::ProviderRefused => 4,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelSummary {
    pub level: usize,
    pub base: Option<String>,
    pub objects: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<LevelSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerifyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub files: Vec<String>,
    pub summary: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str, parameters: BTreeMap<String, Value>) -> Self {
        RunReport {
            command: command.to_string(),
            parameters,
            status: Status::Ok,
            error: None,
            levels: Vec::new(),
            verification: None,
            certificate: None,
            files: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn fail(&mut self, status: Status, msg: impl Into<String>) {
        let msg = msg.into();
        self.status = status;
        self.summary.push(format!("error: {msg}"));
        self.error = Some(msg);
    }

    /// Takes on the verdict of a verification without hiding an earlier failure.
    pub fn absorb(&mut self, v: VerifyReport) {
        if self.status == Status::Ok {
            if v.failed() {
                self.status = Status::AssertionFailed;
            } else if v.inconclusive() {
                self.status = Status::BudgetExhausted;
            }
        }
        self.summary.extend(verify_lines(&v));
        self.verification = Some(v);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn verify_lines(v: &VerifyReport) -> Vec<String> {
    let mut out = vec![format!("{}: {} objects", v.kind, v.objects)];
    if let Some(g) = &v.geometry {
        out.push(format!(
            "geometry: {} ({} edges, checked against {})",
            if g.ok { "ok" } else { "FAILED" },
            g.edges,
            g.basis
        ));
        out.extend(g.violations.iter().map(|s| format!("  {s}")));
    }
    if let Some(g) = &v.girth {
        let value = g.girth.map_or("infinite".to_string(), |x| x.to_string());
        let claim = g.claimed.map(|c| format!(", required >= {c}")).unwrap_or_default();
        out.push(format!(
            "girth: {value}{claim} ({})",
            if g.ok { "ok" } else { "FAILED" }
        ));
    }
    if let Some(c) = &v.chroma {
        let value = match (c.chi, c.upper) {
            (Some(x), _) => format!("chi = {x}"),
            (None, Some(u)) => format!("{} <= chi <= {u}", c.lower),
            (None, None) => format!("chi >= {}", c.lower),
        };
        let claim = c.claimed.map(|k| format!(", required >= {k}")).unwrap_or_default();
        out.push(format!("chromatic: {value}{claim} ({:?}, {} nodes)", c.status, c.nodes).to_lowercase());
    }
    out
}

pub fn levels(p: &Provenance, final_size: usize) -> Vec<LevelSummary> {
    let mut chain = Vec::new();
    let mut cur = p;
    let mut size = final_size;
    loop {
        match cur {
            Provenance::Step {
                level,
                parent_size,
                certificate,
                parent,
                ..
            } => {
                chain.push(LevelSummary {
                    level: *level,
                    base: None,
                    objects: size,
                    certificate: Some(certificate.clone()),
                });
                size = *parent_size;
                cur = parent;
            }
            base => {
                let name = serde_json::to_value(base)
                    .ok()
                    .and_then(|v| v["kind"].as_str().map(String::from));
                chain.push(LevelSummary {
                    level: 0,
                    base: name,
                    objects: size,
                    certificate: None,
                });
                break;
            }
        }
    }
    chain.reverse();
    chain
}

pub fn gallai_status(e: &GallaiError) -> Status {
    match e {
        GallaiError::Budget(_) => Status::BudgetExhausted,
        GallaiError::GroundSetTooSmall(_) | GallaiError::GroundSetUnsorted => Status::AssertionFailed,
        _ => Status::ProviderRefused,
    }
}

pub fn box_status(e: &BoxError) -> Status {
    match e {
        BoxError::AtLevel { source, .. } => box_status(source),
        BoxError::Provider(g) => gallai_status(g),
        BoxError::CertificateUnusable(_) => Status::ProviderRefused,
        _ => Status::AssertionFailed,
    }
}

pub fn line_status(e: &LineError) -> Status {
    match e {
        LineError::AtLevel { source, .. } => line_status(source),
        LineError::Provider(g) => gallai_status(g),
        LineError::CertificateUnusable(_) => Status::ProviderRefused,
        LineError::NoFrame { .. } | LineError::NoTranslation { .. } | LineError::ResampleExhausted { .. } => {
            Status::BudgetExhausted
        }
        _ => Status::AssertionFailed,
    }
}
