//! Second-order eigenvalue expansions for the deformed disk.
//!
//! For λ(Ω_0) = j² with j = j_{m,p}, the eigenvalue of Ω_ε behaves like
//! ω² with ω = ω_0 + ε²ω_2 + O(ε³), ω_0 = j, and
//!
//! * m = 0: ω_2 = 2j Σ_{l odd} (½ + ½l² + F_l(j)) |a_l|²,
//! * m ≥ 1: ω_2 = j (Γ ∓ |Υ|), one value per branch, with
//!   Γ = Σ_{k odd} C_{k,m}(j) |a_k|² and
//!   Υ = Σ_l (½ − ½(m² − l²) + F_l(j)) a_{m+l} a_{m−l},
//!
//! where C_{k,m}(j) = 1 + k² + F_{k+m}(j) + F_{|k−m|}(j) and F_n is the
//! log-derivative x J_n'/J_n. Only the a_n enter; the b_n drop out.

use serde::{Deserialize, Serialize};

use crate::bessel::{global_table, log_derivative, log_derivative_at_zero};
use crate::disk_spectrum::{enumerate_spectrum_with, Branch, Mode};
use crate::error::{Error, Result};
use crate::width_body::{epsilon_max, DeformationCoeffs};

/// C_{k,m}(j) at a zero j of J_m, using the rational closed forms whenever
/// the shifted order allows it.
pub fn c_coeff(k: u32, m: u32, j: f64) -> Result<f64> {
    Ok(c_coeff_detail(k, m, j)?.0)
}

/// C_{k,m}(j) and whether both ratio terms came from closed forms.
pub fn c_coeff_detail(k: u32, m: u32, j: f64) -> Result<(f64, bool)> {
    check_k(k, m)?;
    let (f1, c1) = log_derivative_at_zero(k + m, m, j)?;
    let (f2, c2) = log_derivative_at_zero(k.abs_diff(m), m, j)?;
    let kf = k as f64;
    Ok((1.0 + kf * kf + f1 + f2, c1 && c2))
}

/// C_{k,m}(j) from direct Bessel ratios only, without closed forms.
pub fn c_coeff_direct(k: u32, m: u32, j: f64) -> Result<f64> {
    check_k(k, m)?;
    let kf = k as f64;
    Ok(1.0 + kf * kf + log_derivative(k + m, j)? + log_derivative(k.abs_diff(m), j)?)
}

/// dC_{k,m}/dj, from x F_n' = n² − x² − F_n².
pub fn c_coeff_slope(k: u32, m: u32, j: f64) -> Result<f64> {
    check_k(k, m)?;
    let mut s = 0.0;
    for n in [k + m, k.abs_diff(m)] {
        let f = log_derivative(n, j)?;
        s += crate::bessel::log_derivative_slope(n, j, f);
    }
    Ok(s)
}

fn check_k(k: u32, m: u32) -> Result<()> {
    if k % 2 == 0 || k == 2 * m {
        return Err(Error::Domain(format!("C_{{k,m}} needs odd k != 2m, got k={k}, m={m}")));
    }
    Ok(())
}

/// ω_2 for the simple eigenvalue j_{0,p}².
pub fn omega2_simple(p: u32, coeffs: &DeformationCoeffs) -> Result<f64> {
    let j = global_table().zero(0, p)?;
    let mut s = 0.0;
    for (l, a) in coeffs.a_terms() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let lf = l as f64;
        let (f, _) = log_derivative_at_zero(l, 0, j)?;
        s += (0.5 + 0.5 * lf * lf + f) * a.norm_sqr();
    }
    Ok(2.0 * j * s)
}

/// Γ = Σ_k C_{k,m}(j_{m,p}) |a_k|². For m = 0 this is ω_2/j of the simple case.
pub fn gamma(m: u32, p: u32, coeffs: &DeformationCoeffs) -> Result<f64> {
    let j = global_table().zero(m, p)?;
    let mut g = 0.0;
    for (k, a) in coeffs.a_terms() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        g += c_coeff(k, m, j)? * a.norm_sqr();
    }
    Ok(g)
}

/// Υ (complex in general) for a double mode (m ≥ 1).
pub fn upsilon(m: u32, p: u32, coeffs: &DeformationCoeffs) -> Result<num_complex::Complex64> {
    if m == 0 {
        return Err(Error::Domain("Υ is defined for double modes only".into()));
    }
    let j = global_table().zero(m, p)?;
    let big_n = coeffs.truncation() as i64;
    let mi = m as i64;
    let mut u = num_complex::Complex64::new(0.0, 0.0);
    for l in -(big_n + mi)..=(big_n + mi) {
        if l.abs() == mi {
            continue;
        }
        let prod = coeffs.a(mi + l) * coeffs.a(mi - l);
        if prod.norm_sqr() == 0.0 {
            continue;
        }
        let lf = l as f64;
        let mf = m as f64;
        let (f, _) = log_derivative_at_zero(l.unsigned_abs() as u32, m, j)?;
        u += prod * (0.5 - 0.5 * (mf * mf - lf * lf) + f);
    }
    Ok(u)
}

pub fn gamma_and_upsilon(m: u32, p: u32, coeffs: &DeformationCoeffs) -> Result<(f64, f64)> {
    if m == 0 {
        return Err(Error::Domain("gamma_and_upsilon needs m >= 1".into()));
    }
    Ok((gamma(m, p, coeffs)?, upsilon(m, p, coeffs)?.norm()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionPrediction {
    pub kappa: usize,
    pub m: u32,
    pub p: u32,
    pub j: f64,
    pub branch: Branch,
    pub gamma: f64,
    pub upsilon_mag: f64,
    pub omega1: f64,
    /// ω_2 of this index's branch.
    pub omega2: f64,
    /// Both branch values j(Γ − |Υ|), j(Γ + |Υ|) for double modes; one value
    /// otherwise.
    pub omega2_branches: Vec<f64>,
    pub eps: f64,
    pub lambda_pred: f64,
}

impl ExpansionPrediction {
    pub fn omega0(&self) -> f64 {
        self.j
    }

    /// ω_0² + ε² · 2ω_0ω_2 for this branch.
    pub fn predicted_lambda(&self, eps: f64) -> f64 {
        self.j * self.j + eps * eps * 2.0 * self.j * self.omega2
    }
}

/// Expansion for λ_κ of the body with data `coeffs` at size `eps`.
pub fn predict(kappa: usize, coeffs: &DeformationCoeffs, eps: f64) -> Result<ExpansionPrediction> {
    let emax = epsilon_max(coeffs);
    if !(eps >= 0.0) || eps >= emax {
        return Err(Error::InvalidBody(format!("epsilon {eps} outside [0, {emax})")));
    }
    let table = enumerate_spectrum_with(global_table(), kappa + 1)?;
    let (mode, branch) = table.mode_of_index(kappa)?;
    predict_mode(kappa, mode, branch, coeffs, eps)
}

pub fn predict_mode(
    kappa: usize,
    mode: Mode,
    branch: Branch,
    coeffs: &DeformationCoeffs,
    eps: f64,
) -> Result<ExpansionPrediction> {
    let j = mode.zero;
    let consistent = match branch {
        Branch::Simple => mode.m == 0,
        Branch::Lower | Branch::Upper => mode.m > 0,
    };
    if !consistent {
        return Err(Error::Domain(format!(
            "branch {branch} does not fit mode ({},{}) at kappa {kappa}",
            mode.m, mode.p
        )));
    }
    let (gamma, ups, branches, omega2) = if mode.m == 0 {
        let w = omega2_simple(mode.p, coeffs)?;
        (w / j, 0.0, vec![w], w)
    } else {
        let (g, u) = gamma_and_upsilon(mode.m, mode.p, coeffs)?;
        let lo = j * (g - u);
        let hi = j * (g + u);
        let w = if branch == Branch::Lower { lo } else { hi };
        (g, u, vec![lo, hi], w)
    };
    let mut pred = ExpansionPrediction {
        kappa,
        m: mode.m,
        p: mode.p,
        j,
        branch,
        gamma,
        upsilon_mag: ups,
        omega1: 0.0,
        omega2,
        omega2_branches: branches,
        eps,
        lambda_pred: 0.0,
    };
    pred.lambda_pred = pred.predicted_lambda(eps);
    Ok(pred)
}
