use std::fmt::Write as _;

use anyhow::Result;
use serde::Serialize;
use superint_core::checks::OracleRow;
use superint_core::{CheckResult, DsoParams, KcParams, ModelConfig, ModelKind, SectorInfo, SpectrumEntry, SuiteConfig};

/// Bumped whenever a field is renamed, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Serialize)]
#[serde(untagged)]
pub enum ParamsEcho {
    Dso(DsoParams),
    Kc(KcParams),
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRow {
    pub p: u32,
    pub energy: Option<f64>,
    pub multiplicity: u32,
    pub branch: String,
    pub physical: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl From<&SpectrumEntry> for SpectrumRow {
    fn from(e: &SpectrumEntry) -> Self {
        SpectrumRow {
            p: e.p,
            energy: e.energy,
            multiplicity: e.multiplicity,
            branch: e.branch.to_string(),
            physical: e.physical,
            note: e.note.clone(),
        }
    }
}

/// Result of one command on one model.
#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub model: ModelKind,
    pub params: ParamsEcho,
    pub sector: SectorInfo,
    pub settings: SuiteConfig,
    pub spectrum: Vec<SpectrumRow>,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Vec<OracleRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl ReportDocument {
    pub fn new(command: &'static str, cfg: &ModelConfig, settings: &SuiteConfig) -> Result<Self> {
        let params = match *cfg {
            ModelConfig::Dso { params, .. } => ParamsEcho::Dso(params),
            ModelConfig::Kc { params, .. } => ParamsEcho::Kc(params),
        };
        Ok(ReportDocument {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION,
            command,
            model: cfg.model(),
            params,
            sector: cfg.sector()?,
            settings: settings.clone(),
            spectrum: cfg.spectrum(settings.p_max)?.iter().map(SpectrumRow::from).collect(),
            checks: Vec::new(),
            oracle: None,
            timing_ms: None,
        })
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

/// Several single-model reports from one invocation (`--model all`).
#[derive(Clone, Debug, Serialize)]
pub struct ReportBundle {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub reports: Vec<ReportDocument>,
}

pub fn to_json(reports: &[ReportDocument]) -> Result<String> {
    let mut out = match reports {
        [single] => serde_json::to_string_pretty(single)?,
        _ => serde_json::to_string_pretty(&ReportBundle {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION,
            reports: reports.to_vec(),
        })?,
    };
    out.push('\n');
    Ok(out)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    model: ModelKind,
    p: u32,
    branch: &'a str,
    energy: Option<f64>,
    multiplicity: u32,
    physical: bool,
}

/// Spectrum tables only, one row per level and branch.
pub fn to_csv(reports: &[ReportDocument]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        for row in &r.spectrum {
            w.serialize(CsvRow {
                model: r.model,
                p: row.p,
                branch: &row.branch,
                energy: row.energy,
                multiplicity: row.multiplicity,
                physical: row.physical,
            })?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn sector_line(sector: &SectorInfo) -> String {
    match sector {
        SectorInfo::Dso(s) => format!(
            "sector l1={} l2={}  alpha=({:.12}, {:.12})  beta=({:.12}, {:.12})",
            s.l1, s.l2, s.alpha1, s.alpha2, s.beta1, s.beta2
        ),
        SectorInfo::Kc { sector: s, gamma } => format!(
            "sector l={}  alpha'=({:.12}, {:.12})  gamma={}",
            s.l, s.alphap1, s.alphap2, gamma
        ),
    }
}

pub fn to_text(reports: &[ReportDocument]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(out, "== {} {} ==", r.model, r.command);
        let _ = writeln!(out, "{}", sector_line(&r.sector));
        let _ = writeln!(out, "{:>4}  {:>7}  {:>24}  {:>5}  physical", "p", "branch", "energy", "mult");
        for row in &r.spectrum {
            let energy = row.energy.map_or("-".to_string(), |e| format!("{e:.15}"));
            let _ = write!(
                out,
                "{:>4}  {:>7}  {:>24}  {:>5}  {}",
                row.p, row.branch, energy, row.multiplicity, row.physical
            );
            if let Some(note) = &row.note {
                let _ = write!(out, "  ({note})");
            }
            out.push('\n');
        }
        if let Some(rows) = &r.oracle {
            let _ = writeln!(out, "oracle: mode level  exact  extrapolated  rel.error");
            for row in rows {
                let _ = writeln!(
                    out,
                    "  {} {:>3}  {:.12}  {:.12}  {:.2e}",
                    row.mode, row.level, row.exact, row.extrapolated, row.relative_error
                );
            }
        }
        for c in &r.checks {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            let _ = write!(out, "{tag} {}  residual {:.3e} (tol {:.1e})", c.name, c.max_residual, c.tolerance);
            if let Some(w) = &c.witness {
                let _ = write!(out, "  at {w}");
            }
            out.push('\n');
        }
        if let Some(ms) = r.timing_ms {
            let _ = writeln!(out, "time {ms:.1} ms");
        }
    }
    out
}
