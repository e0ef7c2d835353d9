//! Identity registry, deterministic grids and suite reports.

mod context;
mod registry;
mod report;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::EvalPoint;
use crate::error::{Error, Result};
use crate::frame::{canonical_frame, match_frames, CanonicalFrame, FrameOptions};
use crate::model::{builtin_catalog, catalog_names, wdvv_residual, FrobeniusModel};
use crate::numeric::{format_complex, unit_vector, C64};

pub use context::PointContext;
pub use registry::{
    lookup, registry, suite_ids, Identity, FRAMELESS, SUITES, TOL_DESCENDANTS, TOL_FD, TOL_FRAME,
    TOL_G0, TOL_GETZLER, TOL_VIRASORO, TOL_WDVV,
};
pub use report::{emit_report, Format};

pub const DEFAULT_FD_STEP: f64 = 1e-5;
pub const DEFAULT_GRID_POINTS: usize = 20;
pub const MIN_USABLE_FRACTION: f64 = 0.8;

/// `p_k = base + steps[0]·(k − (count−1)/2)·d_0 + Σ_{m≥1} steps[m]·sin(0.9·m·k)·d_m`.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub base: Vec<C64>,
    pub directions: Vec<Vec<C64>>,
    pub steps: Vec<f64>,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<EvalPoint> {
        let mid = (self.count as f64 - 1.0) / 2.0;
        (0..self.count)
            .map(|k| {
                let mut p = self.base.clone();
                for (m, (d, step)) in self.directions.iter().zip(&self.steps).enumerate() {
                    let s = if m == 0 {
                        step * (k as f64 - mid)
                    } else {
                        step * (0.9 * m as f64 * k as f64).sin()
                    };
                    for (x, y) in p.iter_mut().zip(d) {
                        *x += s * y;
                    }
                }
                EvalPoint::new(p).expect("grid points are finite")
            })
            .collect()
    }

    /// Per-model defaults; `base` overrides the model's base point.
    pub fn default_for(model: &FrobeniusModel, base: Option<Vec<C64>>) -> Self {
        let n = model.dim();
        let e = |k: usize| unit_vector(n, k);
        let (default_base, directions, steps): (Vec<f64>, Vec<Vec<C64>>, Vec<f64>) =
            match (model.name(), n) {
                ("P1", 2) => (vec![0.0, 0.0], vec![e(1), e(0)], vec![1.0 / 19.0, 0.2]),
                ("P2", 3) => (
                    vec![0.0, 0.0, 0.0],
                    vec![e(1), e(0), e(2)],
                    vec![0.05, 0.2, 0.1],
                ),
                ("poly2d", 2) => (vec![0.0, 0.8], vec![e(1), e(0)], vec![0.04, 0.2]),
                _ => {
                    let mut dirs: Vec<Vec<C64>> = (1..n).map(e).collect();
                    dirs.push(e(0));
                    let mut steps = vec![0.02];
                    steps.extend(std::iter::repeat_n(0.05, dirs.len() - 1));
                    (vec![0.0; n], dirs, steps)
                }
            };
        Self {
            base: base.unwrap_or_else(|| default_base.iter().map(|x| C64::new(*x, 0.0)).collect()),
            directions,
            steps,
            count: DEFAULT_GRID_POINTS,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteSpec {
    pub suite: String,
    pub identities: Vec<&'static str>,
    pub grid: GridSpec,
    pub tolerances: BTreeMap<String, f64>,
    pub fd_step: f64,
}

impl SuiteSpec {
    pub fn new(suite: &str, model: &FrobeniusModel) -> Result<Self> {
        let identities = suite_ids(suite).ok_or_else(|| Error::UnknownSuite(suite.to_string()))?;
        Ok(Self {
            suite: suite.to_string(),
            identities,
            grid: GridSpec::default_for(model, None),
            tolerances: BTreeMap::new(),
            fd_step: DEFAULT_FD_STEP,
        })
    }

    /// Same tolerance for every identity in the suite.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        for id in &self.identities {
            self.tolerances.insert(id.to_string(), tol);
        }
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub id: String,
    pub anchor: String,
    pub points: usize,
    pub skipped: usize,
    pub max_residual: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedPoint {
    pub index: usize,
    pub point: Vec<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportMeta {
    pub precision: String,
    pub seed: String,
    pub fd_step: f64,
    pub grid_points: usize,
    pub grid_base: Vec<String>,
    pub grid_steps: Vec<f64>,
    pub min_usable_fraction: f64,
    pub truncation: usize,
    pub skipped_points: Vec<SkippedPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub total_ms: f64,
    pub identities_ms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub model: String,
    pub pass: bool,
    pub identities: Vec<IdentityReport>,
    pub meta: ReportMeta,
    pub timing: Timing,
}

impl VerificationReport {
    pub fn empty(suite: &str, model: &str) -> Self {
        Self {
            suite: suite.to_string(),
            model: model.to_string(),
            pass: true,
            identities: Vec::new(),
            meta: ReportMeta {
                precision: "f64".into(),
                seed: "none".into(),
                fd_step: DEFAULT_FD_STEP,
                grid_points: 0,
                grid_base: Vec::new(),
                grid_steps: Vec::new(),
                min_usable_fraction: MIN_USABLE_FRACTION,
                truncation: 0,
                skipped_points: Vec::new(),
            },
            timing: Timing {
                total_ms: 0.0,
                identities_ms: BTreeMap::new(),
            },
        }
    }

    pub fn identity(&self, id: &str) -> Option<&IdentityReport> {
        self.identities.iter().find(|r| r.id == id)
    }
}

enum Outcome {
    Residual(f64),
    Skip(String),
    Fail(String),
}

fn is_skip(e: &Error) -> bool {
    matches!(
        e,
        Error::NonSemisimple { .. } | Error::AmbiguousMatch(_) | Error::ZeroNorm(_) | Error::Eigen(_)
    )
}

fn outcome(r: Result<f64>) -> Outcome {
    match r {
        Ok(x) if x.is_nan() => Outcome::Fail("residual is NaN".into()),
        Ok(x) => Outcome::Residual(x),
        Err(e) if is_skip(&e) => Outcome::Skip(e.to_string()),
        Err(e) => Outcome::Fail(e.to_string()),
    }
}

/// Principal frame at the grid base, continued outward along the path in
/// both directions. A point whose frame cannot be built or matched is
/// skipped and does not break the chain.
fn continued_frames(
    model: &FrobeniusModel,
    grid: &GridSpec,
    points: &[EvalPoint],
) -> Vec<std::result::Result<CanonicalFrame, String>> {
    let principal = FrameOptions::default();
    let mut out: Vec<std::result::Result<CanonicalFrame, String>> =
        vec![Err("not visited".into()); points.len()];
    if points.is_empty() {
        return out;
    }
    let base = EvalPoint::new(grid.base.clone())
        .ok()
        .and_then(|p| canonical_frame(model, &p, &principal).ok());
    let mid = points.len() / 2;
    walk(model, points, &mut out, mid..points.len(), base.clone());
    let seed = out[mid].clone().ok().or(base);
    walk(model, points, &mut out, (0..mid).rev(), seed);
    out
}

fn walk(
    model: &FrobeniusModel,
    points: &[EvalPoint],
    out: &mut [std::result::Result<CanonicalFrame, String>],
    order: impl Iterator<Item = usize>,
    mut previous: Option<CanonicalFrame>,
) {
    let principal = FrameOptions::default();
    for k in order {
        let result = match (canonical_frame(model, &points[k], &principal), &previous) {
            (Err(e), _) => Err(e.to_string()),
            (Ok(f), None) => Ok(f),
            (Ok(f), Some(prev)) => match_frames(prev, &f)
                .map(|m| m.frame)
                .map_err(|e| e.to_string()),
        };
        if let Ok(f) = &result {
            previous = Some(f.clone());
        }
        out[k] = result;
    }
}

pub fn run_suite(model: &FrobeniusModel, spec: &SuiteSpec) -> Result<VerificationReport> {
    let started = Instant::now();
    let identities: Vec<Identity> = spec
        .identities
        .iter()
        .map(|id| lookup(id).ok_or_else(|| Error::UnknownIdentity(id.to_string())))
        .collect::<Result<_>>()?;
    if spec.grid.count == 0 {
        return Err(Error::Schema("grid needs at least one point".into()));
    }
    for p in &spec.grid.base {
        if !p.re.is_finite() || !p.im.is_finite() {
            return Err(Error::Schema("grid base is not finite".into()));
        }
    }
    if spec.grid.base.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: spec.grid.base.len(),
        });
    }
    let points = spec.grid.points();
    let frames = continued_frames(model, &spec.grid, &points);
    let needs_frame = identities.iter().any(|i| !FRAMELESS.contains(&i.id));

    // per point: one outcome and elapsed seconds per identity
    let per_point: Vec<Vec<(Outcome, f64)>> = points
        .par_iter()
        .zip(frames.par_iter())
        .map(|(point, frame)| {
            let ctx = frame
                .as_ref()
                .ok()
                .map(|f| PointContext::new(model, f, spec.fd_step));
            identities
                .iter()
                .map(|ident| {
                    let t0 = Instant::now();
                    let o = if FRAMELESS.contains(&ident.id) {
                        outcome(wdvv_residual(model, point))
                    } else {
                        match (&ctx, frame) {
                            (Some(c), _) => outcome((ident.check)(c)),
                            (None, Err(reason)) => Outcome::Skip(reason.clone()),
                            (None, Ok(_)) => unreachable!(),
                        }
                    };
                    (o, t0.elapsed().as_secs_f64())
                })
                .collect()
        })
        .collect();

    let mut skipped_points = Vec::new();
    if needs_frame {
        for (k, f) in frames.iter().enumerate() {
            if let Err(reason) = f {
                skipped_points.push(SkippedPoint {
                    index: k,
                    point: points[k].coords().iter().map(|z| format_complex(*z)).collect(),
                    reason: reason.clone(),
                });
            }
        }
    }

    let mut reports = Vec::new();
    let mut timing = BTreeMap::new();
    for (slot, ident) in identities.iter().enumerate() {
        let tol = spec.tolerances.get(ident.id).copied().unwrap_or(ident.tol);
        let mut worst: Option<f64> = None;
        let mut worst_index = 0;
        let mut skipped = 0;
        let mut failures = Vec::new();
        let mut first_skip: Option<&str> = None;
        let mut elapsed = 0.0;
        for (k, row) in per_point.iter().enumerate() {
            let (o, secs) = &row[slot];
            elapsed += secs;
            match o {
                Outcome::Residual(r) => {
                    if worst.is_none_or(|w| *r > w) {
                        worst = Some(*r);
                        worst_index = k;
                    }
                }
                Outcome::Skip(reason) => {
                    skipped += 1;
                    first_skip.get_or_insert(reason);
                }
                Outcome::Fail(msg) => failures.push(format!("point {k}: {msg}")),
            }
        }
        let usable = points.len() - skipped;
        let enough = usable as f64 >= MIN_USABLE_FRACTION * points.len() as f64;
        let within = worst.is_none_or(|w| w <= tol);
        let pass = failures.is_empty() && enough && within && worst.is_some();
        let mut notes = Vec::new();
        if !failures.is_empty() {
            notes.push(failures.join("; "));
        }
        if let Some(reason) = first_skip {
            notes.push(format!("{skipped} skipped, first: {reason}"));
        }
        if !enough {
            notes.push(format!(
                "only {usable} of {} points usable (need {:.0}%)",
                points.len(),
                MIN_USABLE_FRACTION * 100.0
            ));
        }
        if !within && ident.id == "wdvv-associativity" {
            if let Some(diagnosis) = truncation_diagnosis(model, &points[worst_index], tol) {
                notes.push(diagnosis);
            }
        }
        reports.push(IdentityReport {
            id: ident.id.to_string(),
            anchor: ident.anchor.to_string(),
            points: points.len(),
            skipped,
            max_residual: worst,
            tol,
            pass,
            note: if notes.is_empty() {
                None
            } else {
                Some(notes.join("; "))
            },
        });
        timing.insert(ident.id.to_string(), elapsed * 1e3);
    }

    Ok(VerificationReport {
        suite: spec.suite.clone(),
        model: model.name().to_string(),
        pass: reports.iter().all(|r| r.pass),
        identities: reports,
        meta: ReportMeta {
            precision: "f64".into(),
            seed: "none".into(),
            fd_step: spec.fd_step,
            grid_points: points.len(),
            grid_base: spec.grid.base.iter().map(|z| format_complex(*z)).collect(),
            grid_steps: spec.grid.steps.clone(),
            min_usable_fraction: MIN_USABLE_FRACTION,
            truncation: model.truncation_degree(),
            skipped_points,
        },
        timing: Timing {
            total_ms: started.elapsed().as_secs_f64() * 1e3,
            identities_ms: timing,
        },
    })
}

/// For catalog models, re-evaluates the worst point with five more instanton
/// degrees and reports whether truncation explains the failure.
fn truncation_diagnosis(model: &FrobeniusModel, point: &EvalPoint, tol: f64) -> Option<String> {
    if !catalog_names().contains(&model.name()) {
        return None;
    }
    let d = model.truncation_degree();
    let reference = builtin_catalog(model.name(), d)
        .ok()
        .filter(|m| m.same_as(model))?;
    let deeper = builtin_catalog(reference.name(), d + 5).ok()?;
    let at_d = wdvv_residual(model, point).ok()?;
    let at_more = wdvv_residual(&deeper, point).ok()?;
    // a hundredfold drop with five more degrees points at the truncation
    let verdict = if at_more <= tol || at_more * 100.0 <= at_d {
        "attributable to truncation"
    } else {
        "not explained by truncation"
    };
    Some(format!(
        "residual {at_d:.3e} at truncation {d} vs {at_more:.3e} at truncation {}: {verdict}",
        d + 5
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_centered() {
        let m = builtin_catalog("P1", 1).unwrap();
        let g = GridSpec::default_for(&m, None);
        let pts = g.points();
        assert_eq!(pts.len(), 20);
        assert!((pts[0].coords()[1].re + 0.5).abs() < 1e-12);
        assert!((pts[19].coords()[1].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn registry_ids_are_unique_and_suites_resolve() {
        let reg = registry();
        for (k, a) in reg.iter().enumerate() {
            assert!(reg[k + 1..].iter().all(|b| b.id != a.id), "{}", a.id);
        }
        for s in SUITES {
            for id in suite_ids(s).unwrap() {
                assert!(lookup(id).is_some(), "{id}");
            }
        }
        assert!(suite_ids("no-such-suite").is_none());
    }
}
