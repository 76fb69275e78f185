//! Pipeline orchestration: run every condition check in dependency order,
//! apply implication shortcuts, and assemble a reproducible bundle.

use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::conditions::{
    arc_id_of, check_condition_main, check_milnor_image_coverage, check_mvf_exists,
    check_niceness, check_radial_discriminant, check_rho_regularity_psi, milnor_witnesses,
    sample_discriminant, sphere_exists_report, target_arcs, tube_exists_report,
    DiscriminantSample,
};
use crate::config::Config;
use crate::flow::equivalence_evidence;
use crate::germ::{GermError, MapGerm};
use crate::homogeneity::{
    detect_polar_weights, detect_radial_weights, verify_polar_action, verify_radial_action,
    PolarWeights, RadialWeights,
};
use crate::report::{implications_sound, ConditionId, ConditionReport, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Germ(#[from] GermError),
    #[error("internal invariant violation: {0}")]
    Invariant(String),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Serialize)]
pub struct GermSummary {
    pub source_dim: usize,
    pub target_dim: usize,
    pub components: Vec<String>,
    pub flags: Vec<String>,
    pub mixed_provenance: bool,
}

#[derive(Debug, Serialize)]
pub struct AnalysisBundle {
    pub tool_version: String,
    pub germ: GermSummary,
    pub config: Config,
    pub radial_weights: Option<RadialWeights>,
    pub polar_weights: Option<PolarWeights>,
    pub reports: Vec<ConditionReport>,
    #[serde(skip)]
    pub discriminant: DiscriminantSample,
    /// Named CSV artifacts (file stem, contents).
    #[serde(skip)]
    pub witness_csvs: Vec<(String, String)>,
}

impl AnalysisBundle {
    pub fn report(&self, id: ConditionId) -> Option<&ConditionReport> {
        self.reports.iter().find(|r| r.condition == id)
    }

    pub fn reports_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    /// Write the bundle directory; timestamps go only to a metadata sidecar
    /// so the data files are byte-reproducible.
    pub fn write_to(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let reports = dir.join("reports.json");
        std::fs::write(&reports, self.reports_json())?;
        written.push(reports);
        let disc = dir.join("discriminant.json");
        std::fs::write(
            &disc,
            serde_json::to_string_pretty(&self.discriminant).expect("serializes"),
        )?;
        written.push(disc);
        for (stem, csv) in &self.witness_csvs {
            let path = dir.join(format!("{}.csv", stem));
            std::fs::write(&path, csv)?;
            written.push(path);
        }
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let meta = dir.join("metadata.json");
        std::fs::write(
            &meta,
            serde_json::to_string_pretty(&serde_json::json!({ "created_unix": now }))
                .expect("serializes"),
        )?;
        written.push(meta);
        Ok(written)
    }
}

fn unsupported(id: ConditionId, seed: u64, note: &str) -> ConditionReport {
    ConditionReport::new(id, Verdict::Inconclusive, seed)
        .with_evidence(serde_json::json!({ "note": note }))
}

/// Run the full certification pipeline on one germ.
pub fn analyze(g: &MapGerm, cfg: &Config) -> Result<AnalysisBundle, AnalysisError> {
    let params = cfg.check_params();
    let m = g.source_dim();
    let p = g.target_dim();

    let radial_weights =
        detect_radial_weights(g, cfg.weight_bound).filter(|w| verify_radial_action(g, w, 1000));
    let polar_weights = g
        .provenance()
        .and_then(|f| detect_polar_weights(f, cfg.weight_bound as i32))
        .filter(|w| {
            g.provenance()
                .map(|f| verify_polar_action(f, w, 1000))
                .unwrap_or(false)
        });

    let nice = check_niceness(g, &params);
    let ds = sample_discriminant(g, &params);
    let radial_disc = check_radial_discriminant(&ds, &params);

    let cond_main = if m > p {
        check_condition_main(g, &ds, &params)?
    } else {
        unsupported(
            ConditionId::CondMain,
            cfg.seed,
            "cone condition needs source dimension above target dimension",
        )
    };
    let rho_reg = if p >= 2 && m > p {
        check_rho_regularity_psi(g, &ds, &params)?
    } else {
        unsupported(
            ConditionId::RhoRegularPsi,
            cfg.seed,
            "rho-regularity analysis needs source dimension > target dimension >= 2",
        )
    };

    let mut tube = tube_exists_report(&nice, &radial_disc, &cond_main, cfg.seed);
    if tube.verdict == Verdict::Pass && m > p {
        // coverage evidence rides along inside the tube report
        if let Ok(cov) = check_milnor_image_coverage(g, &ds, cfg.eta, 5, &params) {
            let mut ev = tube.evidence.clone();
            ev["milnor_image_coverage"] = cov.evidence;
            ev["milnor_image_coverage_verdict"] = serde_json::to_value(cov.verdict).unwrap();
            tube.evidence = ev;
        }
    }
    let sphere = sphere_exists_report(g, &nice, &radial_disc, &rho_reg, cfg.seed);

    let mut witness_csvs = Vec::new();
    let mvf = if m > p {
        let mut top = None;
        for (k, r) in params.ladder.radii().into_iter().enumerate() {
            let ws = milnor_witnesses(
                g,
                &ds,
                r,
                cfg.samples,
                cfg.seed.wrapping_add(3000 + k as u64),
                &params,
            )?;
            witness_csvs.push((format!("milnor_rung{}", k), ws.to_csv(m)));
            if k == 0 {
                top = Some(ws);
            }
        }
        check_mvf_exists(g, &top.expect("ladder has at least one rung"), &params)
    } else {
        unsupported(
            ConditionId::MvfExists,
            cfg.seed,
            "Milnor set analysis needs source dimension above target dimension",
        )
    };

    let equivalence = if p == 2 && m > p {
        let mut arc_reports = Vec::new();
        let mut verdicts = Vec::new();
        for y in target_arcs(&ds) {
            let rep = equivalence_evidence(
                g,
                &y,
                cfg.eps,
                cfg.eta,
                cfg.equivalence_points,
                cfg.seed,
                arc_id_of(&ds, &y),
                cfg.tol_variety,
            );
            verdicts.push(rep.verdict);
            arc_reports.push(rep.evidence);
        }
        let verdict = if verdicts.contains(&Verdict::Fail) {
            Verdict::Fail
        } else if verdicts.iter().all(|v| *v == Verdict::Pass) && !verdicts.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        };
        ConditionReport::new(ConditionId::EquivalenceEvidence, verdict, cfg.seed)
            .with_evidence(serde_json::json!({ "arcs": arc_reports }))
            .with_tolerances(serde_json::json!({
                "drift": cfg.drift_budget,
                "sphere_residual": 1e-6,
            }))
    } else {
        unsupported(
            ConditionId::EquivalenceEvidence,
            cfg.seed,
            "equivalence evidence implemented for source dimension > target dimension = 2",
        )
    };

    let mut reports = vec![nice, radial_disc, cond_main, rho_reg, tube, sphere, mvf, equivalence];

    // polar shortcut: a verified circle action on the provenance upgrades
    // the fibration conclusions, keeping the numeric evidence alongside
    if let Some(w) = &polar_weights {
        let upgraded = [
            ConditionId::Nice,
            ConditionId::RadialDisc,
            ConditionId::TubeExists,
            ConditionId::SphereExists,
            ConditionId::EquivalenceEvidence,
        ];
        for r in reports.iter_mut() {
            if upgraded.contains(&r.condition) && r.verdict != Verdict::Pass {
                let numeric = r.evidence.clone();
                r.verdict = Verdict::Pass;
                r.evidence = serde_json::json!({
                    "polar_weights": w,
                    "numeric_evidence": numeric,
                });
                *r = r
                    .clone()
                    .with_implication("polar_weighted_homogeneity_criterion", vec![]);
            }
        }
    }

    implications_sound(&reports).map_err(AnalysisError::Invariant)?;

    Ok(AnalysisBundle {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        germ: GermSummary {
            source_dim: m,
            target_dim: p,
            components: g.components().iter().map(|c| c.to_string()).collect(),
            flags: g.declared_flags().iter().map(|f| f.name.clone()).collect(),
            mixed_provenance: g.provenance().is_some(),
        },
        config: *cfg,
        radial_weights,
        polar_weights,
        reports,
        discriminant: ds,
        witness_csvs,
    })
}
