//! JSON wire formats for lattices, automorphisms, theta tables and check
//! reports.
//!
//! Matrices are rows of JSON integers (arbitrary precision, never floats);
//! representation counts are decimal strings so that consumers with 64-bit
//! number types cannot truncate them silently.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};
use serde_json::Number;
use thiserror::Error;

use crate::error::LatticeError;
use crate::exact_linalg::IntegerMatrix;
use crate::fixpoint::{ChainSideReport, FixedSplitReport, GammaSplittingReport};
use crate::lattice::{Lattice, SublatticeHandle, ValidationReport};
use crate::theta::{
    CongruenceClaim, CongruenceReport, CongruenceWitness, ConvolutionReport, SemiIntegralForm,
    ThetaTable,
};

#[derive(Debug, Error)]
pub enum WireError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

fn bigint_to_number(x: &BigInt) -> Number {
    Number::from_str(&x.to_string()).expect("integer literal")
}

fn number_to_bigint(n: &Number) -> Result<BigInt, WireError> {
    let s = n.to_string();
    if s.contains(['.', 'e', 'E']) {
        return Err(WireError::Invalid(format!("number {s} is not an integer")));
    }
    BigInt::from_str(&s).map_err(|e| WireError::Invalid(format!("bad integer {s}: {e}")))
}

fn matrix_to_rows(m: &IntegerMatrix) -> Vec<Vec<Number>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(bigint_to_number).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<Number>]) -> Result<IntegerMatrix, WireError> {
    if rows.is_empty() {
        return Err(WireError::Invalid("matrix has no rows".into()));
    }
    let cols = rows[0].len();
    if cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(WireError::Invalid(
            "matrix rows must be non-empty and equal length".into(),
        ));
    }
    let mut data = Vec::with_capacity(rows.len() * cols);
    for row in rows {
        for n in row {
            data.push(number_to_bigint(n)?);
        }
    }
    Ok(IntegerMatrix::new(rows.len(), cols, data))
}

/// `{"label": ..., "gram": [[...], ...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub gram: Vec<Vec<Number>>,
}

impl LatticeFile {
    pub fn from_lattice(l: &Lattice) -> Self {
        Self {
            label: l.label().map(String::from),
            gram: matrix_to_rows(l.gram()),
        }
    }

    pub fn gram_matrix(&self) -> Result<IntegerMatrix, WireError> {
        rows_to_matrix(&self.gram)
    }

    pub fn to_lattice(&self) -> Result<Lattice, WireError> {
        Ok(Lattice::new(self.gram_matrix()?, self.label.clone())?)
    }

    pub fn parse(s: &str) -> Result<Self, WireError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// `{"matrix": [[...], ...], "order": p}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutomorphismFile {
    pub matrix: Vec<Vec<Number>>,
    pub order: u64,
}

impl AutomorphismFile {
    pub fn new(matrix: &IntegerMatrix, order: u64) -> Self {
        Self {
            matrix: matrix_to_rows(matrix),
            order,
        }
    }

    pub fn matrix_value(&self) -> Result<IntegerMatrix, WireError> {
        rows_to_matrix(&self.matrix)
    }

    pub fn parse(s: &str) -> Result<Self, WireError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationJson {
    pub symmetric: bool,
    pub even_diagonal: bool,
    pub positive_definite: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub determinant: Option<Number>,
    pub unimodular: bool,
    pub valid: bool,
}

impl ValidationJson {
    pub fn from_report(r: &ValidationReport) -> Self {
        Self {
            symmetric: r.symmetric,
            even_diagonal: r.even_diagonal,
            positive_definite: r.positive_definite,
            determinant: r.determinant.as_ref().map(bigint_to_number),
            unimodular: r.unimodular,
            valid: r.is_valid(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentJson {
    pub rank: usize,
    pub det: Number,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecomposeJson {
    pub components: Vec<ComponentJson>,
}

impl DecomposeJson {
    pub fn from_handles(handles: &[SublatticeHandle]) -> Self {
        Self {
            components: handles
                .iter()
                .map(|h| ComponentJson {
                    rank: h.rank(),
                    det: bigint_to_number(&h.det()),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThetaEntryJson {
    #[serde(rename = "twoT")]
    pub two_t: Vec<Vec<Number>>,
    /// Decimal string: arbitrary precision.
    pub count: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThetaTableJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice: Option<String>,
    pub degree: usize,
    pub diag_bound: Number,
    pub entries: Vec<ThetaEntryJson>,
}

impl ThetaTableJson {
    pub fn from_table(t: &ThetaTable) -> Self {
        Self {
            lattice: t.label.clone(),
            degree: t.degree,
            diag_bound: bigint_to_number(&t.diag_bound),
            entries: t
                .entries
                .iter()
                .map(|(f, c)| ThetaEntryJson {
                    two_t: matrix_to_rows(f.two_t()),
                    count: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_table(&self) -> Result<ThetaTable, WireError> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            let form = SemiIntegralForm::from_two_t(rows_to_matrix(&e.two_t)?)
                .map_err(|err| WireError::Invalid(err.to_string()))?;
            let count = BigUint::from_str(&e.count)
                .map_err(|err| WireError::Invalid(format!("bad count {}: {err}", e.count)))?;
            entries.push((form, count));
        }
        Ok(ThetaTable {
            label: self.lattice.clone(),
            degree: self.degree,
            diag_bound: number_to_bigint(&self.diag_bound)?,
            entries,
        })
    }

    pub fn parse(s: &str) -> Result<Self, WireError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessJson {
    #[serde(rename = "twoT")]
    pub two_t: Vec<Vec<Number>>,
    pub count: String,
    #[serde(rename = "det2T")]
    pub det_two_t: Number,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_count: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CongruenceReportJson {
    pub claim: String,
    pub p: u64,
    pub degree: usize,
    pub diag_bound: Number,
    pub holds: bool,
    pub witnesses: Vec<WitnessJson>,
}

impl CongruenceReportJson {
    pub fn from_report(r: &CongruenceReport) -> Self {
        Self {
            claim: r.claim.as_str().to_string(),
            p: r.p,
            degree: r.degree,
            diag_bound: bigint_to_number(&r.diag_bound),
            holds: r.holds,
            witnesses: r
                .witnesses
                .iter()
                .map(|w| WitnessJson {
                    two_t: matrix_to_rows(w.form.two_t()),
                    count: w.count.to_string(),
                    det_two_t: bigint_to_number(&w.det_two_t),
                    reference_count: w.reference_count.as_ref().map(|c| c.to_string()),
                })
                .collect(),
        }
    }

    pub fn to_report(&self) -> Result<CongruenceReport, WireError> {
        let claim = match self.claim.as_str() {
            "theta_operator_mod_p" => CongruenceClaim::ThetaOperatorModP,
            "singular_mod_p" => CongruenceClaim::SingularModP,
            "fixed_sublattice_mod_p" => CongruenceClaim::FixedSublatticeModP,
            other => return Err(WireError::Invalid(format!("unknown claim {other}"))),
        };
        let mut witnesses = Vec::with_capacity(self.witnesses.len());
        for w in &self.witnesses {
            witnesses.push(CongruenceWitness {
                form: SemiIntegralForm::from_two_t(rows_to_matrix(&w.two_t)?)
                    .map_err(|e| WireError::Invalid(e.to_string()))?,
                count: BigUint::from_str(&w.count)
                    .map_err(|e| WireError::Invalid(e.to_string()))?,
                det_two_t: number_to_bigint(&w.det_two_t)?,
                reference_count: w
                    .reference_count
                    .as_ref()
                    .map(|c| BigUint::from_str(c))
                    .transpose()
                    .map_err(|e| WireError::Invalid(e.to_string()))?,
            });
        }
        Ok(CongruenceReport {
            claim,
            p: self.p,
            degree: self.degree,
            diag_bound: number_to_bigint(&self.diag_bound)?,
            holds: self.holds,
            witnesses,
        })
    }

    pub fn parse(s: &str) -> Result<Self, WireError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvolutionMismatchJson {
    #[serde(rename = "twoT")]
    pub two_t: Vec<Vec<Number>>,
    pub direct: String,
    pub convolved: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvolutionReportJson {
    pub claim: String,
    pub degree: usize,
    pub diag_bound: Number,
    pub holds: bool,
    pub witnesses: Vec<ConvolutionMismatchJson>,
}

impl ConvolutionReportJson {
    pub fn from_report(r: &ConvolutionReport) -> Self {
        Self {
            claim: "convolution_identity".into(),
            degree: r.degree,
            diag_bound: bigint_to_number(&r.diag_bound),
            holds: r.holds,
            witnesses: r
                .mismatches
                .iter()
                .map(|m| ConvolutionMismatchJson {
                    two_t: matrix_to_rows(m.form.two_t()),
                    direct: m.direct.to_string(),
                    convolved: m.convolved.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainSideJson {
    pub scaled_projection_in_intersection: bool,
    pub intersection_in_projection: bool,
    pub projection_in_dual: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaJson {
    pub rank_sum_ok: bool,
    pub projections_orthogonal: bool,
    pub gamma_index: Number,
    pub index_is_p_power: bool,
    pub det_identity_ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedSplitJson {
    pub p: u64,
    pub m0: usize,
    pub m1: usize,
    pub det_m0: Number,
    pub det_m1: Number,
    pub m1_divisible_by_p_minus_1: bool,
    pub split_index: Number,
    pub index_bookkeeping_ok: bool,
    pub is_orthogonal_split: bool,
    pub det_m0_divisible_by_p: bool,
    pub disjunction_holds: bool,
    pub chain: Vec<ChainSideJson>,
    pub gamma: GammaJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub has_exceptional_summand: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forced_divisibility_holds: Option<bool>,
    pub all_assertions_hold: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m0_gram: Option<Vec<Vec<Number>>>,
    /// Gauss-reduced Gram of the fixed lattice, present when `m0 = 2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduced_m0_gram: Option<Vec<Vec<Number>>>,
}

impl FixedSplitJson {
    pub fn from_report(
        r: &FixedSplitReport,
        m0_gram: Option<&IntegerMatrix>,
        reduced_m0_gram: Option<&IntegerMatrix>,
    ) -> Self {
        let chain_side = |c: &ChainSideReport| ChainSideJson {
            scaled_projection_in_intersection: c.scaled_projection_in_intersection,
            intersection_in_projection: c.intersection_in_projection,
            projection_in_dual: c.projection_in_dual,
        };
        let g: &GammaSplittingReport = &r.gamma;
        Self {
            p: r.p,
            m0: r.m0,
            m1: r.m1,
            det_m0: bigint_to_number(&r.det_m0),
            det_m1: bigint_to_number(&r.det_m1),
            m1_divisible_by_p_minus_1: r.m1_divisible_by_p_minus_1,
            split_index: bigint_to_number(&r.split_index),
            index_bookkeeping_ok: r.index_bookkeeping_ok,
            is_orthogonal_split: r.is_orthogonal_split,
            det_m0_divisible_by_p: r.det_m0_divisible_by_p,
            disjunction_holds: r.disjunction_holds,
            chain: r.chain.iter().map(chain_side).collect(),
            gamma: GammaJson {
                rank_sum_ok: g.rank_sum_ok,
                projections_orthogonal: g.projections_orthogonal,
                gamma_index: bigint_to_number(&g.gamma_index),
                index_is_p_power: g.index_is_p_power,
                det_identity_ok: g.det_identity_ok,
            },
            has_exceptional_summand: r.has_exceptional_summand,
            forced_divisibility_holds: r.forced_divisibility_holds,
            all_assertions_hold: r.all_assertions_hold(),
            m0_gram: m0_gram.map(matrix_to_rows),
            reduced_m0_gram: reduced_m0_gram.map(matrix_to_rows),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;
    use crate::theta::theta_table;
    use num_traits::One;

    #[test]
    fn lattice_file_round_trip() {
        let e8 = catalog("E8").unwrap().lattice;
        let file = LatticeFile::from_lattice(&e8);
        let text = file.to_json();
        let back = LatticeFile::parse(&text).unwrap().to_lattice().unwrap();
        assert_eq!(back.gram(), e8.gram());
        assert_eq!(back.label(), Some("E8"));
    }

    #[test]
    fn automorphism_file_round_trip() {
        let entry = catalog("A2").unwrap();
        let aut = &entry.automorphisms[0];
        let file = AutomorphismFile::new(&aut.matrix, aut.order);
        let text = file.to_json();
        let back = AutomorphismFile::parse(&text).unwrap();
        assert_eq!(back.order, 3);
        assert_eq!(back.matrix_value().unwrap(), aut.matrix);
    }

    #[test]
    fn rejects_floats() {
        let text = r#"{"gram": [[2.5, 0], [0, 2]]}"#;
        let file = LatticeFile::parse(text).unwrap();
        assert!(file.gram_matrix().is_err());
    }

    #[test]
    fn big_integers_survive() {
        let big = "123456789012345678901234567890123456789";
        let text = format!(r#"{{"gram": [[{big}]]}}"#);
        let file = LatticeFile::parse(&text).unwrap();
        let m = file.gram_matrix().unwrap();
        assert_eq!(m.at(0, 0).to_string(), big);
    }

    #[test]
    fn theta_table_round_trip() {
        let a1 = catalog("A1").unwrap().lattice;
        let table = theta_table(&a1, 1, &BigInt::from(3)).unwrap();
        let text = ThetaTableJson::from_table(&table).to_json();
        let back = ThetaTableJson::parse(&text).unwrap().to_table().unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn congruence_report_round_trip() {
        let l = Lattice::new(
            IntegerMatrix::from_i64_rows(&[&[2, 0], &[0, 2]]),
            Some("A1+A1".into()),
        )
        .unwrap();
        let report = crate::theta::congruence_check_theta_op(&l, 3, 1, &BigInt::one()).unwrap();
        let json = CongruenceReportJson::from_report(&report);
        let text = json.to_json();
        let back = CongruenceReportJson::parse(&text)
            .unwrap()
            .to_report()
            .unwrap();
        assert_eq!(back.holds, report.holds);
        assert_eq!(back.witnesses.len(), report.witnesses.len());
        assert_eq!(back.witnesses[0].count, report.witnesses[0].count);
        assert_eq!(back.witnesses[0].form, report.witnesses[0].form);
    }
}
