//! Schema-stable serializable views of results.
//!
//! Machine formats print both enclosure endpoints, outward-rounded into
//! f64, never midpoints. Field order is fixed by declaration order, so
//! re-serializing a parsed document is byte-identical.

use crate::bounds::{BoundProfile, Verdict};
use crate::dyadic::Round;
use crate::families::{FamilyTag, PreperiodicCatalog};
use crate::global::{HeightReport, Method};
use crate::interval::CertInterval;
use crate::local::{Exactness, LocalHeight, ReductionType};
use crate::dynamics::{OrbitVerdict, WanderingCert};
use crate::survey::{FamilyScanRow, SurveyRow};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LocalHeightDoc {
    pub place: String,
    pub lo: f64,
    pub hi: f64,
    pub exactness: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u32>,
}

impl From<&LocalHeight> for LocalHeightDoc {
    fn from(l: &LocalHeight) -> Self {
        let (exactness, steps) = match l.exactness {
            Exactness::Exact => ("exact".to_string(), None),
            Exactness::TailBounded { steps } => ("tail-bounded".to_string(), Some(steps)),
        };
        LocalHeightDoc {
            place: l.place.to_string(),
            lo: l.value.lo_f64(),
            hi: l.value.hi_f64(),
            exactness,
            steps,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HeightDoc {
    pub alpha: String,
    pub c: String,
    pub d: u32,
    pub eps: String,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    pub total_lo: f64,
    pub total_hi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub locals: Option<Vec<LocalHeightDoc>>,
}

impl HeightDoc {
    pub fn new(
        alpha: &str,
        c: &str,
        d: u32,
        eps: &str,
        report: &HeightReport,
        decompose: bool,
    ) -> HeightDoc {
        let (method, m) = match report.method {
            Method::ExactSchedule { m } => ("exact-schedule".to_string(), Some(m)),
            Method::PlaceSum => ("place-sum".to_string(), None),
        };
        HeightDoc {
            alpha: alpha.to_string(),
            c: c.to_string(),
            d,
            eps: eps.to_string(),
            method,
            m,
            total_lo: report.total.lo_f64(),
            total_hi: report.total.hi_f64(),
            locals: if decompose {
                Some(report.locals.iter().map(LocalHeightDoc::from).collect())
            } else {
                None
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OrbitDoc {
    pub alpha: String,
    pub c: String,
    pub d: u32,
    pub steps: u32,
    pub orbit: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ReductionRowDoc {
    pub p: u64,
    pub kind: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ClassifyDoc {
    pub c: String,
    pub d: u32,
    pub bad_primes: Vec<ReductionRowDoc>,
    pub type_ii_count: u32,
}

pub fn reduction_kind_str(k: ReductionType) -> String {
    k.to_string()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerdictDoc {
    pub alpha: String,
    pub c: String,
    pub d: u32,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin_lo: Option<f64>,
}

impl VerdictDoc {
    pub fn new(alpha: &str, c: &str, d: u32, v: &Verdict) -> VerdictDoc {
        let mut doc = VerdictDoc {
            alpha: alpha.to_string(),
            c: c.to_string(),
            d,
            verdict: String::new(),
            i: None,
            j: None,
            height_lo: None,
            height_hi: None,
            bound_lo: None,
            bound_hi: None,
            margin_lo: None,
        };
        match v {
            Verdict::PreperiodicWithinN { i, j } => {
                doc.verdict = "preperiodic-within-n".into();
                doc.i = Some(*i);
                doc.j = Some(*j);
            }
            Verdict::SatisfiesBound {
                height,
                bound,
                margin,
            } => {
                doc.verdict = "satisfies-bound".into();
                doc.height_lo = Some(height.lo_f64());
                doc.height_hi = Some(height.hi_f64());
                doc.bound_lo = Some(bound.lo_f64());
                doc.bound_hi = Some(bound.hi_f64());
                doc.margin_lo = Some(margin.lo_f64());
            }
            Verdict::BoundViolation { height, bound } => {
                doc.verdict = "BOUND-VIOLATION".into();
                doc.height_lo = Some(height.lo_f64());
                doc.height_hi = Some(height.hi_f64());
                doc.bound_lo = Some(bound.lo_f64());
                doc.bound_hi = Some(bound.hi_f64());
            }
        }
        doc
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PreperiodicDoc {
    pub alpha: String,
    pub c: String,
    pub d: u32,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

impl PreperiodicDoc {
    pub fn new(alpha: &str, c: &str, d: u32, v: &OrbitVerdict) -> PreperiodicDoc {
        let mut doc = PreperiodicDoc {
            alpha: alpha.to_string(),
            c: c.to_string(),
            d,
            status: String::new(),
            i: None,
            j: None,
            certificate: None,
            budget: None,
        };
        match v {
            OrbitVerdict::Preperiodic { i, j } => {
                doc.status = "preperiodic".into();
                doc.i = Some(*i);
                doc.j = Some(*j);
            }
            OrbitVerdict::Wandering(cert) => {
                doc.status = "wandering".into();
                doc.certificate = Some(match cert {
                    WanderingCert::NonIntegral { p } => format!("non-integral at {p}"),
                    WanderingCert::TypeIObstruction { p } => format!("type-i at {p}"),
                    WanderingCert::BasinEscape { k, place } => {
                        format!("basin-escape at step {k} (place {place})")
                    }
                });
            }
            OrbitVerdict::Undecided { budget } => {
                doc.status = "undecided".into();
                doc.budget = Some(*budget);
            }
        }
        doc
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CatalogPointDoc {
    pub point: String,
    pub tail: u32,
    pub period: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CatalogDoc {
    pub c: i64,
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    pub points: Vec<CatalogPointDoc>,
}

impl From<&PreperiodicCatalog> for CatalogDoc {
    fn from(cat: &PreperiodicCatalog) -> Self {
        let (family, m) = match cat.family_tag {
            FamilyTag::FixedFamily { m } => ("fixed".to_string(), Some(m)),
            FamilyTag::TwoCycleFamily { m } => ("two-cycle".to_string(), Some(m)),
            FamilyTag::NoneMatch => ("none".to_string(), None),
        };
        CatalogDoc {
            c: cat.c,
            family,
            m,
            points: cat
                .points
                .iter()
                .map(|p| CatalogPointDoc {
                    point: p.point.to_string(),
                    tail: p.tail,
                    period: p.period,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BoundDoc {
    pub c: String,
    pub d: u32,
    pub r: u32,
    pub s: u32,
    pub m: u32,
    pub n: String,
    pub coefficient: String,
    pub offset_log2_multiplier: u32,
    pub theorem_bound_lo: f64,
    pub theorem_bound_hi: f64,
    pub theorem_bound_vacuous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integer_c_bound_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integer_c_bound_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remark_bound_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remark_bound_hi: Option<f64>,
}

impl BoundDoc {
    pub fn new(
        c: &str,
        profile: &BoundProfile,
        theorem: &CertInterval,
        integer_c: Option<&CertInterval>,
        remark: Option<&CertInterval>,
    ) -> BoundDoc {
        BoundDoc {
            c: c.to_string(),
            d: profile.d,
            r: profile.r,
            s: profile.s,
            m: profile.m,
            n: profile.n.to_string(),
            coefficient: format!("1/{}^{}", profile.d, &profile.n + 2u32),
            offset_log2_multiplier: profile.offset_log2,
            theorem_bound_lo: theorem.lo_f64(),
            theorem_bound_hi: theorem.hi_f64(),
            theorem_bound_vacuous: crate::bounds::is_vacuous(theorem),
            integer_c_bound_lo: integer_c.map(|b| b.lo_f64()),
            integer_c_bound_hi: integer_c.map(|b| b.hi_f64()),
            remark_bound_lo: remark.map(|b| b.lo_f64()),
            remark_bound_hi: remark.map(|b| b.hi_f64()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SurveyRowDoc {
    pub c: i64,
    pub min_height_lo: f64,
    pub min_height_hi: f64,
    pub argmin_num: i64,
    pub argmin_den: i64,
    pub ratio_lo: f64,
    pub ratio_hi: f64,
    pub candidates: u64,
    pub preperiodic_excluded: u64,
}

impl TryFrom<&SurveyRow> for SurveyRowDoc {
    type Error = crate::error::Error;

    fn try_from(row: &SurveyRow) -> crate::error::Result<SurveyRowDoc> {
        let num = row
            .argmin
            .numer()
            .to_i64()
            .ok_or_else(|| crate::error::Error::resource("argmin numerator exceeds i64"))?;
        let den = row
            .argmin
            .denom()
            .to_i64()
            .ok_or_else(|| crate::error::Error::resource("argmin denominator exceeds i64"))?;
        Ok(SurveyRowDoc {
            c: row.c,
            min_height_lo: row.min_height.lo_f64(),
            min_height_hi: row.min_height.hi_f64(),
            argmin_num: num,
            argmin_den: den,
            ratio_lo: row.ratio.lo_f64(),
            ratio_hi: row.ratio.hi_f64(),
            candidates: row.candidates_examined,
            preperiodic_excluded: row.preperiodic_excluded,
        })
    }
}

pub const SURVEY_CSV_HEADER: &str =
    "c,min_height_lo,min_height_hi,argmin_num,argmin_den,ratio_lo,ratio_hi,candidates,preperiodic_excluded";

/// Deterministic CSV for survey rows (schema above, one row per c).
pub fn survey_csv(rows: &[SurveyRowDoc]) -> String {
    let mut out = String::from(SURVEY_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.c,
            r.min_height_lo,
            r.min_height_hi,
            r.argmin_num,
            r.argmin_den,
            r.ratio_lo,
            r.ratio_hi,
            r.candidates,
            r.preperiodic_excluded
        ));
    }
    out
}

/// Two-column plot data: c and the ratio midpoint.
pub fn survey_plot(rows: &[SurveyRowDoc]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&format!("{} {}\n", r.c, (r.ratio_lo + r.ratio_hi) / 2.0));
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FamilyScanRowDoc {
    pub k: u64,
    pub c: i64,
    pub height_lo: f64,
    pub height_hi: f64,
    pub ratio_lo: f64,
    pub ratio_hi: f64,
}

impl From<&FamilyScanRow> for FamilyScanRowDoc {
    fn from(r: &FamilyScanRow) -> Self {
        FamilyScanRowDoc {
            k: r.k,
            c: r.c,
            height_lo: r.height_of_k.lo_f64(),
            height_hi: r.height_of_k.hi_f64(),
            ratio_lo: r.ratio.lo_f64(),
            ratio_hi: r.ratio.hi_f64(),
        }
    }
}

/// Interval endpoints directed outward into f64 for display.
pub fn interval_f64(i: &CertInterval) -> (f64, f64) {
    (i.lo().to_f64(Round::Down), i.hi().to_f64(Round::Up))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn height_doc_roundtrip_is_byte_identical() {
        let doc = HeightDoc {
            alpha: "3".into(),
            c: "-2".into(),
            d: 2,
            eps: "1e-6".into(),
            method: "exact-schedule".into(),
            m: Some(24),
            total_lo: 0.962423645,
            total_hi: 0.962423655,
            locals: Some(vec![LocalHeightDoc {
                place: "inf".into(),
                lo: 0.962423645,
                hi: 0.962423655,
                exactness: "tail-bounded".into(),
                steps: Some(24),
            }]),
        };
        let s1 = serde_json::to_string_pretty(&doc).unwrap();
        let parsed: HeightDoc = serde_json::from_str(&s1).unwrap();
        let s2 = serde_json::to_string_pretty(&parsed).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(doc, parsed);
    }

    #[test]
    fn survey_csv_schema() {
        let rows = vec![SurveyRowDoc {
            c: -2,
            min_height_lo: 0.6931,
            min_height_hi: 0.6932,
            argmin_num: 1,
            argmin_den: 2,
            ratio_lo: 0.9999,
            ratio_hi: 1.0001,
            candidates: 100,
            preperiodic_excluded: 5,
        }];
        let csv = survey_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), SURVEY_CSV_HEADER);
        assert_eq!(lines.next().unwrap(), "-2,0.6931,0.6932,1,2,0.9999,1.0001,100,5");
    }
}
