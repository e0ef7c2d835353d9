use std::fmt::Write as _;
use std::str::FromStr;

use super::VerificationReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Markdown,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

fn residual(r: Option<f64>) -> String {
    r.map_or_else(|| "-".to_string(), |x| format!("{x:.3e}"))
}

/// Renders reports. JSON key order follows struct field order, so equal
/// reports give byte-identical documents; `timing` is the only field that
/// varies between runs.
pub fn emit_report(reports: &[VerificationReport], format: Format) -> String {
    match format {
        Format::Json => {
            let doc = if reports.len() == 1 {
                serde_json::to_value(&reports[0])
            } else {
                serde_json::to_value(reports)
            };
            let mut s = serde_json::to_string_pretty(&doc.expect("reports serialize"))
                .expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Markdown => {
            let mut s = String::new();
            for r in reports {
                let _ = writeln!(
                    s,
                    "## {} on {} ({})\n",
                    r.suite,
                    r.model,
                    if r.pass { "pass" } else { "FAIL" }
                );
                s.push_str("| identity | formula | points | skipped | max residual | tol | pass |\n");
                s.push_str("|---|---|---|---|---|---|---|\n");
                for i in &r.identities {
                    let _ = writeln!(
                        s,
                        "| {} | `{}` | {} | {} | {} | {:.0e} | {} |",
                        i.id,
                        i.anchor,
                        i.points,
                        i.skipped,
                        residual(i.max_residual),
                        i.tol,
                        if i.pass { "yes" } else { "no" }
                    );
                }
                for i in r.identities.iter().filter(|i| i.note.is_some()) {
                    let _ = writeln!(s, "\n- {}: {}", i.id, i.note.as_deref().unwrap_or_default());
                }
                s.push('\n');
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in reports {
                let _ = writeln!(
                    s,
                    "suite {} on {}: {}",
                    r.suite,
                    r.model,
                    if r.pass { "PASS" } else { "FAIL" }
                );
                for i in &r.identities {
                    let _ = writeln!(
                        s,
                        "  {:<4} {:<28} max {:>10}  tol {:.0e}  points {}/{}{}",
                        if i.pass { "ok" } else { "FAIL" },
                        i.id,
                        residual(i.max_residual),
                        i.tol,
                        i.points - i.skipped,
                        i.points,
                        i.note.as_ref().map(|n| format!("  ({n})")).unwrap_or_default()
                    );
                }
            }
            s
        }
    }
}
