//! Sign certificates for C_{k,m}(j_{m,p}) and the classification of each
//! eigenvalue index of the disk as a local minimizer, a non-minimizer, or
//! an open case.
//!
//! A certificate carries a point value, an outward error budget and a
//! verdict decided against a margin of 1e-6. The budget is
//! 1e-8·(1 + |C|) for the Bessel evaluations plus 1e-12·|dC/dj| for the
//! error in the zero.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::global_table;
use crate::disk_spectrum::{enumerate_spectrum, Branch};
use crate::error::{Error, Result};
use crate::perturbation::{c_coeff_detail, c_coeff_direct, c_coeff_slope, gamma_and_upsilon};
use crate::width_body::DeformationCoeffs;

pub const MARGIN: f64 = 1e-6;
pub const EVAL_ERR: f64 = 1e-8;
pub const ZERO_ERR: f64 = 1e-12;

/// The double modes at which every C_{k,m} is nonnegative.
pub const NONNEGATIVE_ZEROS: [(u32, u32); 8] =
    [(1, 1), (2, 1), (3, 1), (4, 1), (5, 1), (5, 2), (6, 2), (7, 1)];

/// Left open by convention even though computed coefficients exist.
pub const OPEN_MODES: [(u32, u32); 1] = [(7, 2)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    LandauBound,
    Numeric,
    Identity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Quantity {
    /// C_{k,m}(j_{m,p}).
    C { k: u32, m: u32, p: u32 },
    /// C_{k,m}(j_{m,p}) for every odd k ≥ k_from.
    CTail { k_from: u32, m: u32, p: u32 },
    /// Γ ± |Υ| for the single mode a_3 at j_{3,p}.
    OrderThreeBranch { p: u32, upper: bool },
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::C { k, m, p } => write!(f, "C[k={k},m={m},p={p}]"),
            Quantity::CTail { k_from, m, p } => write!(f, "C[k>={k_from},m={m},p={p}]"),
            Quantity::OrderThreeBranch { p, upper } => {
                write!(f, "a3-branch[{},p={p}]", if *upper { "plus" } else { "minus" })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignCertificate {
    pub quantity: Quantity,
    /// Which family of inequalities the certificate belongs to.
    pub claim: String,
    pub sign: Sign,
    #[serde(with = "bound")]
    pub lo: f64,
    #[serde(with = "bound")]
    pub hi: f64,
    /// None when the quantity could not be evaluated.
    pub value: Option<f64>,
    pub method: Method,
    pub note: String,
}

/// JSON has no infinities; unbounded ends are written as "inf" / "-inf".
mod bound {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => Err(de::Error::custom(format!("bad bound '{t}'"))),
            },
        }
    }
}

impl SignCertificate {
    pub fn is_nonnegative(&self) -> bool {
        matches!(self.sign, Sign::Positive | Sign::Zero)
    }
}

fn verdict(lo: f64, hi: f64) -> Sign {
    if hi < -MARGIN {
        Sign::Negative
    } else if lo > MARGIN {
        Sign::Positive
    } else {
        Sign::Indeterminate
    }
}

fn indeterminate(quantity: Quantity, claim: &str, method: Method, note: String) -> SignCertificate {
    SignCertificate {
        quantity,
        claim: claim.to_string(),
        sign: Sign::Indeterminate,
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        value: None,
        method,
        note,
    }
}

/// Certificate for the sign of C_{k,m}(j_{m,p}).
pub fn certify_c_sign(k: u32, m: u32, p: u32) -> Result<SignCertificate> {
    certify_c_claim(k, m, p, "sign")
}

fn certify_c_claim(k: u32, m: u32, p: u32, claim: &str) -> Result<SignCertificate> {
    if k.is_multiple_of(2) || k == 2 * m {
        return Err(Error::Domain(format!("k = {k} must be odd and differ from 2m")));
    }
    let j = global_table().zero(m, p)?;
    let quantity = Quantity::C { k, m, p };
    let (v, closed) = match c_coeff_detail(k, m, j) {
        Ok(x) => x,
        Err(e) => return Ok(indeterminate(quantity, claim, Method::Numeric, e.to_string())),
    };
    let method = if closed { Method::ClosedForm } else { Method::Numeric };
    let slope = c_coeff_slope(k, m, j).unwrap_or(f64::INFINITY);
    let err = EVAL_ERR * (1.0 + v.abs()) + ZERO_ERR * slope.abs();
    let (lo, hi) = (v - err, v + err);
    let mut note = format!("j = {j:.15}");
    // the enclosure has to hold the value computed the other way too
    match c_coeff_direct(k, m, j) {
        Ok(d) if (d - v).abs() <= err => {}
        Ok(d) => {
            return Ok(SignCertificate {
                value: Some(v),
                note: format!("closed form {v} and direct {d} disagree beyond {err:e}"),
                ..indeterminate(quantity, claim, method, String::new())
            })
        }
        Err(e) => note.push_str(&format!("; direct path unavailable: {e}")),
    }
    if k == 1 {
        // C_{1,m} = 2 − (m+1) + (m−1) at every zero of J_m
        let sign = if lo <= 0.0 && hi >= 0.0 { Sign::Zero } else { Sign::Indeterminate };
        return Ok(SignCertificate {
            quantity,
            claim: claim.to_string(),
            sign,
            lo,
            hi,
            value: Some(v),
            method: Method::Identity,
            note,
        });
    }
    Ok(SignCertificate {
        quantity,
        claim: claim.to_string(),
        sign: verdict(lo, hi),
        lo,
        hi,
        value: Some(v),
        method,
        note,
    })
}

/// Smallest odd k > m with j_{m,p} ≤ j'_{k−m,1}, together with that j'.
/// Beyond it both log-derivatives in C_{k,m} are nonnegative, so
/// C_{k,m} ≥ 1 + k².
pub fn landau_cutoff(m: u32, p: u32) -> Result<(u32, f64)> {
    let j = global_table().zero(m, p)?;
    let mut k = if m.is_multiple_of(2) { m + 1 } else { m + 2 };
    loop {
        let d = global_table().prime_zero(k - m, 1)?;
        if j <= d {
            return Ok((k, d));
        }
        k += 2;
    }
}

/// Certificates that C_{k,m}(j_{m,p}) ≥ 0 for every odd k: one per odd k
/// below the Landau cutoff, plus one bound covering the rest.
pub fn nonnegativity_certificates(m: u32, p: u32) -> Result<Vec<SignCertificate>> {
    let (cut, d) = landau_cutoff(m, p)?;
    let claim = "C_{k,m}(j) >= 0 for all odd k";
    let mut out = Vec::new();
    for k in (1..cut).step_by(2) {
        out.push(certify_c_claim(k, m, p, claim)?);
    }
    let j = global_table().zero(m, p)?;
    let lo = 1.0 + (cut as f64).powi(2);
    out.push(SignCertificate {
        quantity: Quantity::CTail { k_from: cut, m, p },
        claim: claim.to_string(),
        sign: Sign::Positive,
        lo,
        hi: f64::INFINITY,
        value: None,
        method: Method::LandauBound,
        note: format!("j = {j:.12} <= j'_{{{},1}} = {d:.12}", cut - m),
    });
    Ok(out)
}

/// Nonnegativity certificates at the eight distinguished double modes.
pub fn lemma6_suite() -> Result<Vec<SignCertificate>> {
    let parts: Result<Vec<Vec<SignCertificate>>> = NONNEGATIVE_ZEROS
        .par_iter()
        .map(|&(m, p)| nonnegativity_certificates(m, p))
        .collect();
    Ok(parts?.into_iter().flatten().collect())
}

/// Certificates whose verdict is not the one the suite claims.
pub fn violations(certs: &[SignCertificate], want_negative: bool) -> Vec<&SignCertificate> {
    certs
        .iter()
        .filter(|c| {
            if want_negative {
                c.sign != Sign::Negative
            } else {
                !c.is_nonnegative()
            }
        })
        .collect()
}

fn in_interval_i(m: u32, j: f64) -> bool {
    let mf = m as f64;
    let a = (mf * (mf + 2.0)).sqrt();
    let b = 2.0 * ((mf - 1.0) * (mf - 2.0)).sqrt();
    let c = 2.0 * ((mf + 1.0) * (mf + 2.0)).sqrt();
    (j >= a && j < b) || j >= c
}

fn in_interval_v(m: u32, j: f64) -> bool {
    let mf = m as f64;
    let b = 2.0 * ((mf - 1.0) * (mf - 2.0)).sqrt();
    let c = 2.0 * ((mf + 1.0) * (mf + 2.0)).sqrt();
    j >= b && j <= c
}

/// Whether j lies where C_{3,m} is claimed negative (m ≥ 4).
pub fn c3_region(m: u32, j: f64) -> bool {
    in_interval_i(m, j)
}

/// Whether j lies where C_{5,m} is claimed negative (m ≥ 9).
pub fn c5_region(m: u32, j: f64) -> bool {
    in_interval_v(m, j)
}

/// (k, m, first p, last p or None for "up to the cap") of the individually
/// stated negative signs.
const NAMED_NEGATIVES: &[(u32, u32, u32, Option<u32>)] = &[
    (3, 0, 2, None),
    (3, 1, 2, None),
    (3, 2, 2, None),
    (3, 3, 2, None),
    (5, 3, 5, None),
    (3, 4, 2, None),
    (3, 5, 3, None),
    (5, 6, 1, Some(1)),
    (3, 6, 3, None),
    (3, 7, 3, None),
    (3, 8, 3, None),
    (3, 8, 1, Some(1)),
    (5, 8, 2, Some(2)),
];

/// Certificates for every negative sign the classification relies on:
/// C_{3,m} on the region I for 4 ≤ m ≤ m_cap, C_{5,m} on V for
/// 9 ≤ m ≤ m_cap, the individually stated signs at small m, and both a_3
/// branch coefficients at j_{3,p} for p = 2, 3, 4. All are expected
/// Negative.
pub fn appendix_c_suite(m_cap: u32, p_cap: u32) -> Result<Vec<SignCertificate>> {
    if m_cap > 40 || p_cap > 20 || p_cap == 0 {
        return Err(Error::Domain(format!(
            "caps m <= 40, 1 <= p <= 20 required, got m_cap={m_cap}, p_cap={p_cap}"
        )));
    }
    let region: Result<Vec<Vec<SignCertificate>>> = (4..=m_cap.max(3))
        .into_par_iter()
        .filter(|&m| m >= 4)
        .map(|m| {
            let mut out = Vec::new();
            for p in 1..=p_cap {
                let j = global_table().zero(m, p)?;
                if in_interval_i(m, j) {
                    out.push(certify_c_claim(3, m, p, "C_{3,m}(j) < 0 for j in I")?);
                }
                if m >= 9 && in_interval_v(m, j) {
                    out.push(certify_c_claim(5, m, p, "C_{5,m}(j) < 0 for j in V")?);
                }
            }
            Ok(out)
        })
        .collect();
    let mut out: Vec<SignCertificate> = region?.into_iter().flatten().collect();
    for &(k, m, p0, p1) in NAMED_NEGATIVES {
        let last = p1.unwrap_or(p_cap).min(p_cap);
        for p in p0..=last {
            let claim = match p1 {
                Some(_) => format!("C_{{{k},{m}}}(j_{{{m},{p}}}) < 0"),
                None => format!("C_{{{k},{m}}}(j_{{{m},p}}) < 0 for p >= {p0}"),
            };
            out.push(certify_c_claim(k, m, p, &claim)?);
        }
    }
    for p in 2..=4.min(p_cap) {
        out.extend(m3_branch_certificates(p)?);
    }
    Ok(out)
}

/// Γ + |Υ| and Γ − |Υ| (per unit |a_3|²) for the single mode a_3 at
/// j = j_{3,p}, p ≥ 2, in their rational forms
/// −576j²/((8 − j²)(80 − j²)) and 640/(80 − j²).
pub fn m3_branch_coefficients(p: u32) -> Result<(f64, f64)> {
    if p < 2 {
        return Err(Error::Domain("the a_3 branch formulas need p >= 2".into()));
    }
    let j = global_table().zero(3, p)?;
    m3_branch_at(j)
}

fn m3_branch_at(j: f64) -> Result<(f64, f64)> {
    let t = j * j;
    let (d1, d2) = (8.0 - t, 80.0 - t);
    if d1.abs() < 1e-9 * t || d2.abs() < 1e-9 * t {
        return Err(Error::Pole(format!("j² = {t} hits 8 or 80")));
    }
    Ok((-576.0 * t / (d1 * d2), 640.0 / d2))
}

pub fn m3_branch_certificates(p: u32) -> Result<[SignCertificate; 2]> {
    let j = global_table().zero(3, p)?;
    let (plus, minus) = m3_branch_coefficients(p)?;
    let h = 1e-6;
    let (pu, mu) = m3_branch_at(j + h)?;
    let (pd, md) = m3_branch_at(j - h)?;
    let mk = |upper: bool, v: f64, slope: f64| {
        let err = EVAL_ERR * (1.0 + v.abs()) + ZERO_ERR * slope.abs();
        SignCertificate {
            quantity: Quantity::OrderThreeBranch { p, upper },
            claim: "both a_3 branch coefficients < 0 at j_{3,p}, p = 2, 3, 4".into(),
            sign: verdict(v - err, v + err),
            lo: v - err,
            hi: v + err,
            value: Some(v),
            method: Method::ClosedForm,
            note: format!("j = {j:.15}"),
        }
    };
    Ok([
        mk(true, plus, (pu - pd) / (2.0 * h)),
        mk(false, minus, (mu - md) / (2.0 * h)),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    LocalMin,
    NotLocalMin,
    Open,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::LocalMin => "LocalMin",
            Verdict::NotLocalMin => "NotLocalMin",
            Verdict::Open => "Open",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kappa: usize,
    pub m: u32,
    pub p: u32,
    pub branch: Branch,
    pub verdict: Verdict,
    pub witness: String,
    /// Deforming by a_k alone lowers λ_κ, when the verdict is NotLocalMin.
    pub witness_k: Option<u32>,
}

struct ModeVerdict {
    lower: (Verdict, String),
    upper: (Verdict, String),
    witness_k: Option<u32>,
}

const SEARCH_K_MAX: u32 = 61;

fn classify_mode(m: u32, p: u32) -> Result<ModeVerdict> {
    let all_nonneg = |certs: &[SignCertificate]| -> Result<()> {
        match certs.iter().find(|c| !c.is_nonnegative()) {
            None => Ok(()),
            Some(c) => Err(Error::Classification(format!(
                "{} came out {:?} at ({m},{p})",
                c.quantity, c.sign
            ))),
        }
    };
    if m == 0 && p == 1 {
        let certs = nonnegativity_certificates(0, 1)?;
        all_nonneg(&certs)?;
        let cut = certs.len() * 2 - 1;
        let w = format!("C_{{k,0}}(j_{{0,1}}) >= 0 for all odd k (explicit k < {cut}, Landau bound beyond)");
        return Ok(ModeVerdict { lower: (Verdict::LocalMin, w.clone()), upper: (Verdict::LocalMin, w), witness_k: None });
    }
    if NONNEGATIVE_ZEROS.contains(&(m, p)) {
        let certs = nonnegativity_certificates(m, p)?;
        all_nonneg(&certs)?;
        return Ok(ModeVerdict {
            lower: (
                Verdict::Open,
                format!("C_{{k,{m}}}(j_{{{m},{p}}}) >= 0 for all odd k, but the sign of Gamma - |Upsilon| is undetermined"),
            ),
            upper: (
                Verdict::LocalMin,
                format!("C_{{k,{m}}}(j_{{{m},{p}}}) >= 0 for all odd k, so Gamma + |Upsilon| >= 0"),
            ),
            witness_k: None,
        });
    }
    if OPEN_MODES.contains(&(m, p)) {
        let unit = DeformationCoeffs::single(m, num_complex::Complex64::new(1.0, 0.0))?;
        let (g, u) = gamma_and_upsilon(m, p, &unit)?;
        let w = format!(
            "left open; single mode a_{m}: Gamma - |Upsilon| = {:.6}, Gamma + |Upsilon| = {:.6}",
            g - u,
            g + u
        );
        return Ok(ModeVerdict { lower: (Verdict::Open, w.clone()), upper: (Verdict::Open, w), witness_k: None });
    }
    for k in (3..=SEARCH_K_MAX).step_by(2) {
        if k == m || k == 2 * m {
            continue;
        }
        let c = certify_c_sign(k, m, p)?;
        if c.sign == Sign::Negative {
            let w = format!(
                "C_{{{k},{m}}}(j_{{{m},{p}}}) = {:.6} < 0 ({:?}); single mode a_{k} has Upsilon = 0",
                c.value.unwrap_or(f64::NAN),
                c.method
            );
            return Ok(ModeVerdict {
                lower: (Verdict::NotLocalMin, w.clone()),
                upper: (Verdict::NotLocalMin, w),
                witness_k: Some(k),
            });
        }
    }
    if m == 3 {
        let [plus, minus] = m3_branch_certificates(p)?;
        if plus.sign == Sign::Negative && minus.sign == Sign::Negative {
            let w = format!(
                "single mode a_3: Gamma + |Upsilon| = {:.6} < 0 and Gamma - |Upsilon| = {:.6} < 0",
                plus.value.unwrap_or(f64::NAN),
                minus.value.unwrap_or(f64::NAN)
            );
            return Ok(ModeVerdict {
                lower: (Verdict::NotLocalMin, w.clone()),
                upper: (Verdict::NotLocalMin, w),
                witness_k: Some(3),
            });
        }
    }
    Err(Error::Classification(format!(
        "no certified negative coefficient for mode ({m},{p})"
    )))
}

/// Verdict for every index κ ≤ kappa_max (at most 50).
pub fn classify(kappa_max: usize) -> Result<Vec<Classification>> {
    if kappa_max == 0 || kappa_max > 50 {
        return Err(Error::OutOfRange(format!("kappa_max {kappa_max} outside 1..=50")));
    }
    let table = enumerate_spectrum(kappa_max)?;
    let mut modes: Vec<(u32, u32)> = table.entries().iter().map(|e| (e.mode.m, e.mode.p)).collect();
    modes.dedup();
    let verdicts: Result<Vec<ModeVerdict>> = modes.par_iter().map(|&(m, p)| classify_mode(m, p)).collect();
    let verdicts = verdicts?;
    Ok(table
        .entries()
        .iter()
        .map(|e| {
            let i = modes.iter().position(|&x| x == (e.mode.m, e.mode.p)).expect("mode listed");
            let mv = &verdicts[i];
            let (verdict, witness) = if e.branch == Branch::Lower { &mv.lower } else { &mv.upper };
            Classification {
                kappa: e.kappa,
                m: e.mode.m,
                p: e.mode.p,
                branch: e.branch,
                verdict: *verdict,
                witness: witness.clone(),
                witness_k: if *verdict == Verdict::NotLocalMin { mv.witness_k } else { None },
            }
        })
        .collect())
}

/// Flat row for certificate dumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRow {
    pub quantity: String,
    pub claim: String,
    pub sign: Sign,
    pub lo: f64,
    pub hi: f64,
    pub method: Method,
}

impl From<&SignCertificate> for CertificateRow {
    fn from(c: &SignCertificate) -> Self {
        Self {
            quantity: c.quantity.to_string(),
            claim: c.claim.clone(),
            sign: c.sign,
            lo: c.lo,
            hi: c.hi,
            method: c.method,
        }
    }
}

pub fn certificates_csv(certs: &[SignCertificate]) -> Result<String> {
    let rows: Vec<CertificateRow> = certs.iter().map(CertificateRow::from).collect();
    crate::io::rows_to_csv(&rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRow {
    pub kappa: usize,
    pub m: u32,
    pub p: u32,
    pub branch: Branch,
    pub verdict: Verdict,
    pub witness: String,
}

pub fn classification_csv(rows: &[Classification]) -> Result<String> {
    let flat: Vec<ClassificationRow> = rows
        .iter()
        .map(|c| ClassificationRow {
            kappa: c.kappa,
            m: c.m,
            p: c.p,
            branch: c.branch,
            verdict: c.verdict,
            witness: c.witness.clone(),
        })
        .collect();
    crate::io::rows_to_csv(&flat)
}
