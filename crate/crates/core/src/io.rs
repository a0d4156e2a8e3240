//! JSON formats for models, certificates, verdicts and admissibility reports.
//!
//! A model file looks like
//!
//! ```json
//! {"frame": {"kind": "lasso", "worlds": 3, "loop": 2, "reach": [1, 1, 1]},
//!  "valuations": [{"agent": "V", "letters": {"p": [0, 1]}}]}
//! ```
//!
//! with `{"kind": "uniform", "worlds": W, "measure": m}` for uniform frames.
//! A single-valuation model has exactly one entry, conventionally named `V`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::admissibility::{AdmissibilityReport, ScreenReason};
use crate::decide::{Countermodel, SearchCaps, Target, Verdict};
use crate::frames::{Agent, FiniteLassoFrame, Frame, FrameError, Model, MultiAgentModel, UniformWindowFrame, Valuation};
use crate::syntax::{parse_formula, parse_rule, ParseError, Rule};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Shape(String),
}

/// Name of the valuation in a single-valuation model file.
pub const SINGLE_AGENT: &str = "V";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FrameFile {
    Lasso {
        worlds: usize,
        #[serde(rename = "loop")]
        loop_target: usize,
        reach: Vec<usize>,
    },
    Uniform {
        worlds: usize,
        measure: usize,
    },
}

impl FrameFile {
    pub fn of(frame: &Frame) -> Self {
        match frame {
            Frame::Lasso(f) => FrameFile::Lasso {
                worlds: f.worlds(),
                loop_target: f.loop_target(),
                reach: f.reach().to_vec(),
            },
            Frame::Uniform(f) => FrameFile::Uniform {
                worlds: f.worlds(),
                measure: f.measure(),
            },
        }
    }

    pub fn to_frame(&self) -> Result<Frame, FrameError> {
        Ok(match self {
            FrameFile::Lasso {
                worlds,
                loop_target,
                reach,
            } => FiniteLassoFrame::new(*worlds, *loop_target, reach.clone())?.into(),
            FrameFile::Uniform { worlds, measure } => UniformWindowFrame::new(*worlds, *measure)?.into(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationFile {
    pub agent: String,
    pub letters: BTreeMap<String, Vec<usize>>,
}

impl ValuationFile {
    fn of(agent: &str, v: &Valuation) -> Self {
        ValuationFile {
            agent: agent.to_string(),
            letters: v.iter().map(|(k, s)| (k.to_string(), s.iter().copied().collect())).collect(),
        }
    }

    fn to_valuation(&self) -> Valuation {
        self.letters
            .iter()
            .fold(Valuation::new(), |v, (k, worlds)| v.with(k.clone(), worlds.iter().copied()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    pub frame: FrameFile,
    pub valuations: Vec<ValuationFile>,
}

impl ModelFile {
    pub fn of_model(model: &Model) -> Self {
        ModelFile {
            frame: FrameFile::of(model.frame()),
            valuations: vec![ValuationFile::of(SINGLE_AGENT, model.valuation())],
        }
    }

    pub fn of_agents(mam: &MultiAgentModel) -> Self {
        ModelFile {
            frame: FrameFile::of(mam.frame()),
            valuations: mam
                .agents()
                .iter()
                .map(|a| ValuationFile::of(&a.name, &a.valuation))
                .collect(),
        }
    }

    /// The model, if the file has exactly one valuation.
    pub fn to_model(&self) -> Result<Model, IoError> {
        match self.valuations.as_slice() {
            [only] => Ok(Model::new(self.frame.to_frame()?, only.to_valuation())?),
            other => Err(IoError::Shape(format!(
                "expected a single valuation, found {}",
                other.len()
            ))),
        }
    }

    pub fn to_agents(&self) -> Result<MultiAgentModel, IoError> {
        let agents = self
            .valuations
            .iter()
            .map(|v| Agent {
                name: v.agent.clone(),
                valuation: v.to_valuation(),
            })
            .collect();
        Ok(MultiAgentModel::new(self.frame.to_frame()?, agents)?)
    }
}

pub fn parse_model_json(text: &str) -> Result<ModelFile, IoError> {
    Ok(serde_json::from_str(text)?)
}

/// Formula or rule text; rules are recognized by their `/`.
pub fn parse_target(text: &str) -> Result<Target, ParseError> {
    if text.contains('/') {
        parse_rule(text).map(Target::Rule)
    } else {
        parse_formula(text).map(Target::Formula)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    #[serde(flatten)]
    pub model: ModelFile,
    pub world: usize,
    pub target: String,
}

impl CertificateFile {
    pub fn of(c: &Countermodel) -> Self {
        CertificateFile {
            model: ModelFile::of_model(&c.model),
            world: c.world,
            target: c.target.to_string(),
        }
    }

    pub fn to_countermodel(&self) -> Result<Countermodel, IoError> {
        Ok(Countermodel {
            model: self.model.to_model()?,
            world: self.world,
            target: parse_target(&self.target)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictFile {
    pub verdict: String,
    pub certificate: Option<CertificateFile>,
    pub caps: Option<SearchCaps>,
}

impl VerdictFile {
    /// `caps` describes the search that produced `v`; an inconclusive verdict
    /// always reports its own.
    pub fn of(v: &Verdict, caps: Option<SearchCaps>) -> Self {
        let caps = match v {
            Verdict::Inconclusive(own) => Some(own.clone()),
            _ => caps,
        };
        VerdictFile {
            verdict: v.name().to_string(),
            certificate: v.certificate().map(CertificateFile::of),
            caps,
        }
    }

    pub fn to_verdict(&self) -> Result<Verdict, IoError> {
        let certificate = || -> Result<Countermodel, IoError> {
            self.certificate
                .as_ref()
                .ok_or_else(|| IoError::Shape(format!("verdict {} needs a certificate", self.verdict)))?
                .to_countermodel()
        };
        Ok(match self.verdict.as_str() {
            "Theorem" => Verdict::Theorem,
            "Unsatisfiable" => Verdict::Unsatisfiable,
            "NonTheorem" => Verdict::NonTheorem(certificate()?),
            "Satisfiable" => Verdict::Satisfiable(certificate()?),
            "Inconclusive" => Verdict::Inconclusive(
                self.caps
                    .clone()
                    .ok_or_else(|| IoError::Shape("inconclusive verdict without caps".into()))?,
            ),
            other => return Err(IoError::Shape(format!("unknown verdict {other}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityFile {
    pub status: String,
    pub rule: String,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substitution: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub premise_verdicts: Vec<String>,
    #[serde(default)]
    pub certificates: Vec<CertificateFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_size: Option<u128>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuples_checked: Option<u128>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inconclusive: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl AdmissibilityFile {
    pub fn of(r: &Rule, m: usize, report: &AdmissibilityReport) -> Self {
        let mut file = AdmissibilityFile {
            status: report.status().to_string(),
            rule: r.to_string(),
            m,
            substitution: None,
            premise_verdicts: Vec::new(),
            certificates: Vec::new(),
            reason: None,
            depth: None,
            signature: None,
            pool_size: None,
            tuples_checked: None,
            inconclusive: None,
            note: None,
        };
        match report {
            AdmissibilityReport::Refuted {
                substitution,
                premise_verdicts,
                conclusion_certificate,
            } => {
                file.substitution = Some(substitution.iter().map(|(k, v)| (k.clone(), v.to_string())).collect());
                file.premise_verdicts = premise_verdicts.iter().map(|v| v.name().to_string()).collect();
                file.certificates = conclusion_certificate.certificate().map(CertificateFile::of).into_iter().collect();
            }
            AdmissibilityReport::NoRefutationFound {
                depth,
                signature,
                pool_size,
                tuples_checked,
                inconclusive,
                note,
            } => {
                file.depth = Some(*depth);
                file.signature = Some(signature.clone());
                file.pool_size = Some(*pool_size);
                file.tuples_checked = Some(*tuples_checked);
                file.inconclusive = Some(*inconclusive);
                file.note = note.clone();
            }
            AdmissibilityReport::AdmissibleScreen(reason) => {
                file.reason = Some(match reason {
                    ScreenReason::ConclusionTheorem => "conclusion_theorem".to_string(),
                    ScreenReason::PremiseUnsatisfiable(i) => format!("premise_unsatisfiable:{i}"),
                });
            }
        }
        file
    }

    /// Rebuilds a refutation report; other statuses carry no certificates.
    pub fn to_refutation(&self) -> Result<(Rule, AdmissibilityReport), IoError> {
        if self.status != "refuted" {
            return Err(IoError::Shape(format!("status {} carries no refutation", self.status)));
        }
        let rule = parse_rule(&self.rule)?;
        let substitution = self
            .substitution
            .as_ref()
            .ok_or_else(|| IoError::Shape("refutation without substitution".into()))?
            .iter()
            .map(|(k, v)| Ok((k.clone(), parse_formula(v)?)))
            .collect::<Result<_, IoError>>()?;
        let [certificate] = self.certificates.as_slice() else {
            return Err(IoError::Shape("refutation needs exactly one certificate".into()));
        };
        let premise_verdicts = self
            .premise_verdicts
            .iter()
            .map(|name| match name.as_str() {
                "Theorem" => Ok(Verdict::Theorem),
                other => Err(IoError::Shape(format!("premise verdict {other} in a refutation"))),
            })
            .collect::<Result<_, _>>()?;
        Ok((
            rule,
            AdmissibilityReport::Refuted {
                substitution,
                premise_verdicts,
                conclusion_certificate: Verdict::NonTheorem(certificate.to_countermodel()?),
            },
        ))
    }
}
