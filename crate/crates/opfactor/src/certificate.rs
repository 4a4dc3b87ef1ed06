//! Versioned certificate files and their independent re-verification.
//!
//! A certificate records the inputs, the verdict, the constructed factor for
//! the chosen mode, and named residuals.  Verification never trusts the
//! producer: [`verify_certificate_file`] rebuilds every claim from the raw
//! matrices stored in the file.  The schema is strict — unknown fields are
//! rejected and the version string must match [`SCHEMA_VERSION`].

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::douglas::{range_inclusion, verify_douglas_certificate, DouglasCertificate};
use crate::error::{OpfactorError, Result};
use crate::io::MatrixJson;
use crate::matrix::ComplexMatrix;
use crate::report::{CheckResult, VerificationReport};
use crate::reversed::{check_reversed, verify_reversed_certificate, ReversedCertificate};
use crate::sebestyen::{check_forward, verify_forward_certificate, SebestyenCertificate};
use crate::tolerance::Tolerance;

pub const SCHEMA_VERSION: &str = "opfactor-cert/1";

/// Which factorization the certificate speaks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sebestyen,
    Douglas,
    Reversed,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Sebestyen => "sebestyen",
            Mode::Douglas => "douglas",
            Mode::Reversed => "reversed",
        }
    }
}

/// Outcome recorded in the file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Feasible,
    Infeasible,
    /// Reversed mode only: the Gram operator vanishes, so every m works.
    Unconstrained,
}

/// The reversed bound: a finite supremum or "unconstrained" when M = 0.
/// Serialized as a JSON number or the literal string `"unconstrained"`,
/// never as a non-finite float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MmaxValue {
    Finite(f64),
    Unconstrained,
}

impl From<Option<f64>> for MmaxValue {
    fn from(v: Option<f64>) -> Self {
        match v {
            Some(m) => MmaxValue::Finite(m),
            None => MmaxValue::Unconstrained,
        }
    }
}

impl MmaxValue {
    pub fn as_option(&self) -> Option<f64> {
        match self {
            MmaxValue::Finite(m) => Some(*m),
            MmaxValue::Unconstrained => None,
        }
    }
}

impl Serialize for MmaxValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MmaxValue::Finite(m) => serializer.serialize_f64(*m),
            MmaxValue::Unconstrained => serializer.serialize_str("unconstrained"),
        }
    }
}

struct MmaxVisitor;

impl Visitor<'_> for MmaxVisitor {
    type Value = MmaxValue;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("a number or the string \"unconstrained\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<MmaxValue, E> {
        Ok(MmaxValue::Finite(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<MmaxValue, E> {
        Ok(MmaxValue::Finite(v as f64))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<MmaxValue, E> {
        Ok(MmaxValue::Finite(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<MmaxValue, E> {
        if v == "unconstrained" {
            Ok(MmaxValue::Unconstrained)
        } else {
            Err(E::invalid_value(de::Unexpected::Str(v), &self))
        }
    }
}

impl<'de> Deserialize<'de> for MmaxValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(MmaxVisitor)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SebestyenPayload {
    pub lambda_min: f64,
    pub gram: MatrixJson,
    pub factor_x: MatrixJson,
    pub intermediate_h: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DouglasPayload {
    pub lambda_min: f64,
    pub factor_c: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReversedPayload {
    pub m_max: MmaxValue,
    pub factor_y: MatrixJson,
    pub projector_t: MatrixJson,
}

/// The on-disk certificate.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub schema_version: String,
    pub mode: Mode,
    pub t_matrix: MatrixJson,
    pub b_matrix: MatrixJson,
    pub tolerance: Tolerance,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sebestyen: Option<SebestyenPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub douglas: Option<DouglasPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reversed: Option<ReversedPayload>,
    /// Unit vector exhibiting the violated inequality, infeasible only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<[f64; 2]>>,
    pub residuals: BTreeMap<String, f64>,
}

fn witness_json(w: &[Complex64]) -> Vec<[f64; 2]> {
    w.iter().map(|z| [z.re, z.im]).collect()
}

impl CertificateFile {
    fn base(mode: Mode, t: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerance, verdict: Verdict) -> Self {
        CertificateFile {
            schema_version: SCHEMA_VERSION.to_string(),
            mode,
            t_matrix: MatrixJson::from(t),
            b_matrix: MatrixJson::from(b),
            tolerance: *tol,
            verdict,
            sebestyen: None,
            douglas: None,
            reversed: None,
            witness: None,
            residuals: BTreeMap::new(),
        }
    }

    pub fn from_sebestyen(
        t: &ComplexMatrix,
        b: &ComplexMatrix,
        tol: &Tolerance,
        cert: &SebestyenCertificate,
    ) -> Self {
        let mut file = Self::base(Mode::Sebestyen, t, b, tol, Verdict::Feasible);
        file.sebestyen = Some(SebestyenPayload {
            lambda_min: cert.lambda_min,
            gram: MatrixJson::from(&cert.gram),
            factor_x: MatrixJson::from(&cert.factor_x),
            intermediate_h: MatrixJson::from(&cert.intermediate_h),
        });
        file.residuals = cert.residuals.clone();
        file
    }

    pub fn from_douglas(
        t: &ComplexMatrix,
        b: &ComplexMatrix,
        tol: &Tolerance,
        cert: &DouglasCertificate,
    ) -> Self {
        let mut file = Self::base(Mode::Douglas, t, b, tol, Verdict::Feasible);
        file.douglas = Some(DouglasPayload {
            lambda_min: cert.lambda_min,
            factor_c: MatrixJson::from(&cert.factor_c),
        });
        file.residuals = cert.residuals.clone();
        file
    }

    pub fn from_reversed(
        t: &ComplexMatrix,
        b: &ComplexMatrix,
        tol: &Tolerance,
        cert: &ReversedCertificate,
    ) -> Self {
        let verdict = match cert.m_max {
            Some(_) => Verdict::Feasible,
            None => Verdict::Unconstrained,
        };
        let mut file = Self::base(Mode::Reversed, t, b, tol, verdict);
        file.reversed = Some(ReversedPayload {
            m_max: MmaxValue::from(cert.m_max),
            factor_y: MatrixJson::from(&cert.factor_y),
            projector_t: MatrixJson::from(&cert.projector_t),
        });
        file.residuals = cert.residuals.clone();
        file
    }

    pub fn infeasible(
        mode: Mode,
        t: &ComplexMatrix,
        b: &ComplexMatrix,
        tol: &Tolerance,
        witness: &[Complex64],
        residuals: BTreeMap<String, f64>,
    ) -> Self {
        let mut file = Self::base(mode, t, b, tol, Verdict::Infeasible);
        file.witness = Some(witness_json(witness));
        file.residuals = residuals;
        file
    }

    pub fn t(&self) -> Result<ComplexMatrix> {
        self.t_matrix.to_matrix()
    }

    pub fn b(&self) -> Result<ComplexMatrix> {
        self.b_matrix.to_matrix()
    }

    pub fn witness_vector(&self) -> Option<Vec<Complex64>> {
        self.witness
            .as_ref()
            .map(|w| w.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
    }

    /// Schema-level consistency: version, tolerance, shapes, and the
    /// verdict/payload agreement the format promises.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(OpfactorError::Schema(format!(
                "unsupported schema version '{}', expected '{}'",
                self.schema_version, SCHEMA_VERSION
            )));
        }
        self.tolerance.validate()?;
        let t = self.t()?;
        let b = self.b()?;
        match self.mode {
            Mode::Sebestyen | Mode::Reversed => {
                if t.shape() != b.shape() {
                    return Err(OpfactorError::Schema(format!(
                        "t is {}x{} but b is {}x{}; this mode needs equal shapes",
                        t.rows(),
                        t.cols(),
                        b.rows(),
                        b.cols()
                    )));
                }
            }
            Mode::Douglas => {
                if t.rows() != b.rows() {
                    return Err(OpfactorError::Schema(format!(
                        "t has {} rows but b has {}; douglas needs a common codomain",
                        t.rows(),
                        b.rows()
                    )));
                }
            }
        }

        let payloads = [
            (Mode::Sebestyen, self.sebestyen.is_some()),
            (Mode::Douglas, self.douglas.is_some()),
            (Mode::Reversed, self.reversed.is_some()),
        ];
        for (mode, present) in payloads {
            let expected = mode == self.mode && self.verdict != Verdict::Infeasible;
            if present != expected {
                return Err(OpfactorError::Schema(format!(
                    "{} payload {} for mode {} with verdict {:?}",
                    mode.as_str(),
                    if present { "present" } else { "missing" },
                    self.mode.as_str(),
                    self.verdict
                )));
            }
        }
        match self.verdict {
            Verdict::Infeasible => {
                let w = self.witness.as_ref().ok_or_else(|| {
                    OpfactorError::Schema("infeasible verdict requires a witness".to_string())
                })?;
                if w.is_empty() || w.iter().any(|&[re, im]| !(re.is_finite() && im.is_finite())) {
                    return Err(OpfactorError::Schema("witness must be nonempty and finite".to_string()));
                }
            }
            Verdict::Feasible | Verdict::Unconstrained => {
                if self.witness.is_some() {
                    return Err(OpfactorError::Schema(
                        "witness is only recorded on infeasible certificates".to_string(),
                    ));
                }
            }
        }
        if self.verdict == Verdict::Unconstrained && self.mode != Mode::Reversed {
            return Err(OpfactorError::Schema(
                "unconstrained verdict applies to reversed mode only".to_string(),
            ));
        }
        if let Some(rev) = &self.reversed {
            let finite = matches!(rev.m_max, MmaxValue::Finite(_));
            if finite != (self.verdict == Verdict::Feasible) {
                return Err(OpfactorError::Schema(
                    "reversed m_max must be finite exactly when the verdict is feasible".to_string(),
                ));
            }
            if let MmaxValue::Finite(m) = rev.m_max {
                if !(m.is_finite() && m > 0.0) {
                    return Err(OpfactorError::Schema(format!(
                        "finite m_max must be positive, got {m}"
                    )));
                }
            }
        }
        if let Some(p) = &self.sebestyen {
            if !(p.lambda_min.is_finite() && p.lambda_min >= 0.0) {
                return Err(OpfactorError::Schema(format!(
                    "lambda_min must be finite and nonnegative, got {}",
                    p.lambda_min
                )));
            }
        }
        if let Some(p) = &self.douglas {
            if !(p.lambda_min.is_finite() && p.lambda_min >= 0.0) {
                return Err(OpfactorError::Schema(format!(
                    "lambda_min must be finite and nonnegative, got {}",
                    p.lambda_min
                )));
            }
        }
        for (k, v) in &self.residuals {
            if !v.is_finite() {
                return Err(OpfactorError::Schema(format!("residual '{k}' is not finite")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s =
            serde_json::to_string_pretty(self).map_err(|e| OpfactorError::Schema(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// Parses and validates; the two-step contract behind exit code 1.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: CertificateFile =
            serde_json::from_str(text).map_err(|e| OpfactorError::Schema(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

fn sebestyen_cert(p: &SebestyenPayload, residuals: &BTreeMap<String, f64>) -> Result<SebestyenCertificate> {
    Ok(SebestyenCertificate {
        lambda_min: p.lambda_min,
        gram: p.gram.to_matrix()?,
        factor_x: p.factor_x.to_matrix()?,
        intermediate_h: p.intermediate_h.to_matrix()?,
        residuals: residuals.clone(),
    })
}

fn douglas_cert(p: &DouglasPayload, residuals: &BTreeMap<String, f64>) -> Result<DouglasCertificate> {
    Ok(DouglasCertificate {
        lambda_min: p.lambda_min,
        factor_c: p.factor_c.to_matrix()?,
        residuals: residuals.clone(),
    })
}

fn reversed_cert(p: &ReversedPayload, residuals: &BTreeMap<String, f64>) -> Result<ReversedCertificate> {
    Ok(ReversedCertificate {
        m_max: p.m_max.as_option(),
        factor_y: p.factor_y.to_matrix()?,
        projector_t: p.projector_t.to_matrix()?,
        residuals: residuals.clone(),
    })
}

/// Re-verifies an infeasibility claim by re-running the check from the raw
/// matrices.
fn verify_infeasible(
    file: &CertificateFile,
    t: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::default();
    let still_infeasible = match file.mode {
        Mode::Sebestyen => !check_forward(t, b, tol)?.feasible,
        Mode::Douglas => !range_inclusion(t, b, tol)?,
        Mode::Reversed => !check_reversed(t, b, tol)?.feasible,
    };
    report.push(CheckResult::predicate(
        "verdict-consistency",
        still_infeasible,
        if still_infeasible { 1.0 } else { 0.0 },
        1.0,
    ));
    let witness = file.witness_vector().unwrap_or_default();
    let norm = crate::matrix::vec_norm(&witness);
    report.push(CheckResult::predicate(
        "witness-unit-norm",
        (norm - 1.0).abs() <= 1e-6,
        norm,
        1.0,
    ));
    Ok(report)
}

/// Independent re-verification of a certificate file: rebuilds every claim
/// from the matrices stored in the file.  Schema problems surface as `Err`;
/// mathematical problems surface as failed checks in the report.
pub fn verify_certificate_file(file: &CertificateFile) -> Result<VerificationReport> {
    file.validate()?;
    let t = file.t()?;
    let b = file.b()?;
    let tol = &file.tolerance;
    if file.verdict == Verdict::Infeasible {
        return verify_infeasible(file, &t, &b, tol);
    }
    match file.mode {
        Mode::Sebestyen => {
            let cert = sebestyen_cert(file.sebestyen.as_ref().expect("validated"), &file.residuals)?;
            Ok(verify_forward_certificate(&t, &b, &cert, tol))
        }
        Mode::Douglas => {
            let cert = douglas_cert(file.douglas.as_ref().expect("validated"), &file.residuals)?;
            Ok(verify_douglas_certificate(&t, &b, &cert, tol))
        }
        Mode::Reversed => {
            let cert = reversed_cert(file.reversed.as_ref().expect("validated"), &file.residuals)?;
            Ok(verify_reversed_certificate(&t, &b, &cert, tol))
        }
    }
}
