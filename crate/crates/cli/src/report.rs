use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use sqc_core::convexity::{KSearchResult, SpectrumSample, SpectrumScan};
use sqc_core::tartar::TartarSummary;
use sqc_core::torus::{DefectReport, Moments};

use crate::config::RunConfig;

pub const SCHEMA: &str = "cert/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CounterexampleCertified,
    Inconclusive,
    Failed,
}

#[derive(Clone, Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisCheck {
    pub ranks: [usize; 3],
    pub rank_tolerance: f64,
    pub gram: [[f64; 3]; 3],
    pub all_rank_deficient: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityCheck {
    pub k: f64,
    pub seed: u64,
    pub samples: usize,
    pub restarts: usize,
    pub search_radius: f64,
    pub min_defect: f64,
    pub tolerance: f64,
}

/// Everything `certify` computed, in a fixed key order.
#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub schema: &'static str,
    pub tool: ToolInfo,
    pub config: RunConfig,
    pub basis_check: Option<BasisCheck>,
    pub spectrum: Option<SpectrumScan>,
    pub divergence_free: Option<bool>,
    pub moments: Option<Moments>,
    pub epsilon: Option<f64>,
    pub epsilon_source: Option<&'static str>,
    pub k_search: Option<KSearchResult>,
    pub k: Option<f64>,
    pub convexity_check: Option<ConvexityCheck>,
    pub convexity_min_defect: Option<f64>,
    pub sq_defect: Option<DefectReport>,
    pub verdict: Verdict,
    pub failed_stage: Option<String>,
    pub failed_conditions: Vec<String>,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRecord {
    pub schema: &'static str,
    pub kind: &'static str,
    pub config: RunConfig,
    pub basis_check: BasisCheck,
    pub spectrum: SpectrumScan,
}

#[derive(Clone, Debug, Serialize)]
pub struct FindKRecord {
    pub schema: &'static str,
    pub kind: &'static str,
    pub config: RunConfig,
    pub epsilon: f64,
    pub epsilon_source: &'static str,
    pub k_search: KSearchResult,
    pub recheck: ConvexityCheck,
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectRecord {
    pub schema: &'static str,
    pub kind: &'static str,
    pub config: RunConfig,
    pub divergence_free: bool,
    pub moments: Moments,
    pub epsilon_source: &'static str,
    pub sq_defect: DefectReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct TartarRecord {
    pub schema: &'static str,
    pub kind: &'static str,
    pub config: RunConfig,
    pub summary: TartarSummary,
}

/// Pretty JSON with every float written to 17 significant digits, so that
/// equal values always produce equal bytes.
struct FixedFloat<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloat<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report types serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::Number(num) => {
            let s = match (num.as_u64(), num.as_i64(), num.as_f64()) {
                (Some(u), _, _) => u.to_string(),
                (_, Some(i), _) => i.to_string(),
                (_, _, Some(f)) => format!("{f:.16e}"),
                _ => num.to_string(),
            };
            out.push((prefix.to_string(), s));
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Null => out.push((prefix.to_string(), String::new())),
    }
}

/// Any record as `key,value` rows with dotted keys.
pub fn to_key_value_csv<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize");
    let mut rows = Vec::new();
    flatten("", &v, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).expect("in-memory write");
    for (k, v) in rows {
        w.write_record([k, v]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("UTF-8")
}

/// The sphere scan as a table, one row per grid point.
pub fn spectrum_csv(samples: &[SpectrumSample]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["alpha1", "alpha2", "alpha3", "sigma_n", "admissible"])
        .expect("in-memory write");
    for s in samples {
        w.write_record([
            format!("{:.16e}", s.alpha[0]),
            format!("{:.16e}", s.alpha[1]),
            format!("{:.16e}", s.alpha[2]),
            format!("{:.16e}", s.sigma_n),
            s.admissible.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("UTF-8")
}
