//! Machine-readable certificates for the fibration conditions.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    Nice,
    RadialDisc,
    CondMain,
    RhoRegularPsi,
    MvfExists,
    TubeExists,
    SphereExists,
    EquivalenceEvidence,
}

impl ConditionId {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "nice" => ConditionId::Nice,
            "radial_disc" => ConditionId::RadialDisc,
            "cond_main" => ConditionId::CondMain,
            "rho_regular_psi" => ConditionId::RhoRegularPsi,
            "mvf_exists" => ConditionId::MvfExists,
            "tube_exists" => ConditionId::TubeExists,
            "sphere_exists" => ConditionId::SphereExists,
            "equivalence_evidence" => ConditionId::EquivalenceEvidence,
            _ => return None,
        })
    }

    pub fn all() -> [ConditionId; 8] {
        [
            ConditionId::Nice,
            ConditionId::RadialDisc,
            ConditionId::CondMain,
            ConditionId::RhoRegularPsi,
            ConditionId::MvfExists,
            ConditionId::TubeExists,
            ConditionId::SphereExists,
            ConditionId::EquivalenceEvidence,
        ]
    }
}

/// A verdict is `Pass` only on positive evidence, `Fail` only on a robust
/// numerical counterexample; everything marginal stays `Inconclusive`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// A pass granted by a known implication: `rule` names the criterion and
/// `hypotheses` the conditions it requires, which must themselves pass in
/// the same report bundle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImplicationEdge {
    pub rule: String,
    pub hypotheses: Vec<ConditionId>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub condition: ConditionId,
    pub verdict: Verdict,
    pub evidence: serde_json::Value,
    pub implied_by: Option<ImplicationEdge>,
    pub tolerances: serde_json::Value,
    pub seed: u64,
}

impl ConditionReport {
    pub fn new(condition: ConditionId, verdict: Verdict, seed: u64) -> Self {
        ConditionReport {
            condition,
            verdict,
            evidence: serde_json::json!({}),
            implied_by: None,
            tolerances: serde_json::json!({}),
            seed,
        }
    }

    pub fn with_evidence(mut self, evidence: serde_json::Value) -> Self {
        self.evidence = evidence;
        self
    }

    pub fn with_tolerances(mut self, tolerances: serde_json::Value) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn with_implication(mut self, rule: &str, hypotheses: Vec<ConditionId>) -> Self {
        self.implied_by = Some(ImplicationEdge {
            rule: rule.to_string(),
            hypotheses,
        });
        self
    }
}

/// Check implication soundness across a bundle of reports: every pass that
/// rests on an implication edge must have all its hypotheses passing too.
pub fn implications_sound(reports: &[ConditionReport]) -> Result<(), String> {
    let verdict_of = |id: ConditionId| -> Option<Verdict> {
        reports.iter().find(|r| r.condition == id).map(|r| r.verdict)
    };
    for r in reports {
        if r.verdict != Verdict::Pass {
            continue;
        }
        if let Some(edge) = &r.implied_by {
            for hyp in &edge.hypotheses {
                match verdict_of(*hyp) {
                    Some(Verdict::Pass) => {}
                    other => {
                        return Err(format!(
                            "{:?} passes via rule '{}' but hypothesis {:?} is {:?}",
                            r.condition, edge.rule, hyp, other
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}
