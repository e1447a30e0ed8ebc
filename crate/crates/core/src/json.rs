//! Serde wire types for the JSON file formats.
//!
//! The domain types keep their invariants private, so conversion goes
//! through these plain structs: `From` for output and `TryFrom` (with full
//! validation) for input. Field order here is the order in the files.

use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryReport;
use crate::error::{Error, Result};
use crate::exppoly::{ExpPoly, Term};
use crate::flows::{FlowKind, FlowParams, MomentFlow};
use crate::measure::{Atom, AtomicMeasure, GaussianComponent, GaussianMixture};
use crate::multi_index::MultiIndex;
use crate::recovery::RecoveryResult;
use crate::sequence::MomentSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentJson {
    pub alpha: Vec<u32>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceJson {
    pub n: usize,
    pub degree: u32,
    pub moments: Vec<MomentJson>,
}

impl From<&MomentSequence> for SequenceJson {
    fn from(s: &MomentSequence) -> Self {
        SequenceJson {
            n: s.n(),
            degree: s.degree(),
            moments: s
                .iter()
                .map(|(a, v)| MomentJson {
                    alpha: a.entries().to_vec(),
                    value: v,
                })
                .collect(),
        }
    }
}

impl TryFrom<SequenceJson> for MomentSequence {
    type Error = Error;

    fn try_from(w: SequenceJson) -> Result<Self> {
        let pairs = w
            .moments
            .into_iter()
            .map(|m| {
                if m.alpha.len() != w.n {
                    return Err(Error::DimensionMismatch {
                        expected: w.n,
                        got: m.alpha.len(),
                    });
                }
                Ok((MultiIndex::new(m.alpha), m.value))
            })
            .collect::<Result<Vec<_>>>()?;
        MomentSequence::from_pairs(w.n, w.degree, pairs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub point: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentJson {
    pub center: Vec<f64>,
    pub weight: f64,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureJson {
    Atomic {
        n: usize,
        atoms: Vec<AtomJson>,
    },
    GaussianMixture {
        n: usize,
        nu: f64,
        components: Vec<ComponentJson>,
    },
}

/// A parsed representing measure.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Atomic(AtomicMeasure),
    GaussianMixture(GaussianMixture),
}

impl From<&AtomicMeasure> for MeasureJson {
    fn from(m: &AtomicMeasure) -> Self {
        MeasureJson::Atomic {
            n: m.n(),
            atoms: m
                .atoms()
                .iter()
                .map(|a| AtomJson {
                    point: a.point.clone(),
                    weight: a.weight,
                })
                .collect(),
        }
    }
}

impl From<&GaussianMixture> for MeasureJson {
    fn from(g: &GaussianMixture) -> Self {
        MeasureJson::GaussianMixture {
            n: g.n(),
            nu: g.nu(),
            components: g.components().iter().map(ComponentJson::from).collect(),
        }
    }
}

impl From<&GaussianComponent> for ComponentJson {
    fn from(c: &GaussianComponent) -> Self {
        ComponentJson {
            center: c.center.clone(),
            weight: c.weight,
            time: c.time,
        }
    }
}

impl TryFrom<MeasureJson> for Measure {
    type Error = Error;

    fn try_from(w: MeasureJson) -> Result<Self> {
        match w {
            MeasureJson::Atomic { n, atoms } => Ok(Measure::Atomic(AtomicMeasure::new(
                n,
                atoms
                    .into_iter()
                    .map(|a| Atom {
                        point: a.point,
                        weight: a.weight,
                    })
                    .collect(),
            )?)),
            MeasureJson::GaussianMixture { n, nu, components } => {
                Ok(Measure::GaussianMixture(GaussianMixture::new(
                    n,
                    nu,
                    components
                        .into_iter()
                        .map(|c| GaussianComponent {
                            center: c.center,
                            weight: c.weight,
                            time: c.time,
                        })
                        .collect(),
                )?))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coeff: f64,
    pub power: u32,
    pub rate: Vec<i64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub resonant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpPolyJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
}

impl From<&ExpPoly> for ExpPolyJson {
    fn from(f: &ExpPoly) -> Self {
        ExpPolyJson {
            n: f.n(),
            terms: f
                .terms()
                .iter()
                .map(|t| TermJson {
                    coeff: t.coeff,
                    power: t.power,
                    rate: t.rate.clone(),
                    resonant: t.resonant,
                })
                .collect(),
        }
    }
}

impl TryFrom<ExpPolyJson> for ExpPoly {
    type Error = Error;

    fn try_from(w: ExpPolyJson) -> Result<Self> {
        if let Some(t) = w.terms.iter().find(|t| t.rate.len() != w.n) {
            return Err(Error::DimensionMismatch {
                expected: w.n,
                got: t.rate.len(),
            });
        }
        Ok(ExpPoly::from_terms(
            w.n,
            w.terms
                .into_iter()
                .map(|t| Term {
                    coeff: t.coeff,
                    power: t.power,
                    rate: t.rate,
                    resonant: t.resonant,
                })
                .collect(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsJson {
    pub kind: String,
    pub nu: f64,
    pub a: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowEntryJson {
    pub alpha: Vec<u32>,
    pub exppoly: ExpPolyJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowJson {
    pub n: usize,
    pub degree: u32,
    pub params: ParamsJson,
    pub entries: Vec<FlowEntryJson>,
}

impl From<&MomentFlow> for FlowJson {
    fn from(f: &MomentFlow) -> Self {
        FlowJson {
            n: f.n(),
            degree: f.degree(),
            params: ParamsJson {
                kind: f.params().kind().as_str().into(),
                nu: f.params().nu(),
                a: f.params().a().to_vec(),
            },
            entries: f
                .iter()
                .map(|(alpha, e)| FlowEntryJson {
                    alpha: alpha.entries().to_vec(),
                    exppoly: e.into(),
                })
                .collect(),
        }
    }
}

impl TryFrom<FlowJson> for MomentFlow {
    type Error = Error;

    /// The initial sequence is recovered as the value of each entry at `t = 0`.
    fn try_from(w: FlowJson) -> Result<Self> {
        let kind: FlowKind = w.params.kind.parse()?;
        let params = FlowParams::new(kind, w.params.nu, w.params.a)?;
        let mut pairs = Vec::with_capacity(w.entries.len());
        let mut polys = Vec::with_capacity(w.entries.len());
        for e in w.entries {
            let f = ExpPoly::try_from(e.exppoly)?;
            pairs.push((MultiIndex::new(e.alpha), f.eval(params.a(), 0.0)));
            polys.push(f);
        }
        let order: Vec<MultiIndex> = pairs.iter().map(|p| p.0.clone()).collect();
        let initial = MomentSequence::from_pairs(w.n, w.degree, pairs)?;
        let mut entries = vec![ExpPoly::zero(w.n); initial.len()];
        for (alpha, f) in order.iter().zip(polys) {
            entries[initial.position(alpha).expect("validated index")] = f;
        }
        MomentFlow::from_parts(params, initial, entries)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipJson {
    pub atoms: Vec<f64>,
    pub weights: Vec<f64>,
    pub residual: Option<f64>,
    pub top_slack: Option<f64>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsJson {
    pub scan_cells: usize,
    pub bracket: [f64; 2],
    pub bisection_steps: usize,
    pub snapped_to_bound: bool,
    pub scaled_min_eigenvalue: f64,
    pub det_bracket: [f64; 2],
    pub kernel_dim: usize,
}

/// `distance` and `upper_bound` are `null` when infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReportJson {
    pub distance: Option<f64>,
    pub interval_closed: bool,
    pub upper_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_sequence: Option<SequenceJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_poly: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_poly_alt: Option<Vec<f64>>,
    pub kernel_degenerate: bool,
    pub trivial: bool,
    pub truncated_odd: bool,
    pub bound_only: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub membership: Option<MembershipJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<DiagnosticsJson>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl From<&BoundaryReport> for BoundaryReportJson {
    fn from(r: &BoundaryReport) -> Self {
        BoundaryReportJson {
            distance: finite(r.distance),
            interval_closed: r.interval_closed,
            upper_bound: finite(r.upper_bound),
            boundary_sequence: r.boundary_sequence.as_ref().map(SequenceJson::from),
            kernel_poly: r.kernel_poly.clone(),
            kernel_poly_alt: r.kernel_poly_alt.clone(),
            kernel_degenerate: r.kernel_degenerate,
            trivial: r.trivial,
            truncated_odd: r.truncated_odd,
            bound_only: false,
            membership: r.membership.as_ref().map(|m| MembershipJson {
                atoms: m.atoms.clone(),
                weights: m.weights.clone(),
                residual: finite(m.residual),
                top_slack: finite(m.top_slack),
                passed: m.passed,
                failure: m.failure.clone(),
            }),
            diagnostics: r.diagnostics.as_ref().map(|d| DiagnosticsJson {
                scan_cells: d.scan_cells,
                bracket: [d.bracket.0, d.bracket.1],
                bisection_steps: d.bisection_steps,
                snapped_to_bound: d.snapped_to_bound,
                scaled_min_eigenvalue: d.scaled_min_eigenvalue,
                det_bracket: [d.det_bracket.0, d.det_bracket.1],
                kernel_dim: d.kernel_dim,
            }),
        }
    }
}

impl BoundaryReportJson {
    /// Report for `n ≥ 2`, where only the one-point bound is available.
    pub fn bound_only(upper_bound: f64, trivial: bool) -> Self {
        BoundaryReportJson {
            distance: None,
            interval_closed: false,
            upper_bound: finite(upper_bound),
            boundary_sequence: None,
            kernel_poly: None,
            kernel_poly_alt: None,
            kernel_degenerate: false,
            trivial,
            truncated_odd: false,
            bound_only: true,
            membership: None,
            diagnostics: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveredAtomJson {
    pub location: f64,
    pub weight: f64,
}

/// The mixture in the measure schema, followed by the recovery fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryJson {
    #[serde(rename = "type")]
    pub kind: String,
    pub n: usize,
    pub nu: f64,
    pub components: Vec<ComponentJson>,
    pub delta: f64,
    pub residual: f64,
    pub atoms: Vec<RecoveredAtomJson>,
    pub augmented: bool,
    pub kernel_degenerate: bool,
    pub used_alternate_kernel: bool,
    pub boundary_sequence: SequenceJson,
}

impl From<&RecoveryResult> for RecoveryJson {
    fn from(r: &RecoveryResult) -> Self {
        RecoveryJson {
            kind: "gaussian_mixture".into(),
            n: r.mixture.n(),
            nu: r.mixture.nu(),
            components: r
                .mixture
                .components()
                .iter()
                .map(ComponentJson::from)
                .collect(),
            delta: r.delta,
            residual: r.residual,
            atoms: r
                .atoms
                .iter()
                .map(|&(location, weight)| RecoveredAtomJson { location, weight })
                .collect(),
            augmented: r.augmented,
            kernel_degenerate: r.kernel_degenerate,
            used_alternate_kernel: r.used_alternate_kernel,
            boundary_sequence: r
                .boundary
                .boundary_sequence
                .as_ref()
                .expect("recovery has a boundary")
                .into(),
        }
    }
}
