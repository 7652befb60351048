//! Dirichlet eigenvalues of star-shaped bodies by the method of particular
//! solutions.
//!
//! Trial functions J_n(ωr){cos, sin}(nθ), n ≤ N, satisfy the Helmholtz
//! equation exactly. At each ω the basis is sampled on the boundary and at a
//! set of interior points, the column space is orthonormalized, and the
//! smallest singular value of its boundary block measures how well some
//! combination of normalized size vanishes on the boundary. Eigenvalues are
//! the zeros of that function, found by scanning and golden-section search.
//!
//! Boundary points come from the exact polar radius of the body, never from
//! the expansions being validated.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::bessel_j_sequence;
use crate::disk_spectrum::{enumerate_spectrum, MAX_COUNT};
use crate::error::{Error, Result};
use crate::perturbation::predict;
use crate::width_body::{epsilon_max, ConstantWidthBody, DeformationCoeffs};

pub const DEFAULT_TOL: f64 = 1e-13;
/// Below this the golden-section search only chases rounding noise.
pub const MIN_TOL: f64 = 1e-14;
pub const DEFAULT_SCAN_STEP: f64 = 0.01;
pub const DEFAULT_ACCEPT: f64 = 1e-6;
pub const MAX_KAPPA: usize = 50;

/// Singular values of the sampled basis below this fraction of the largest
/// are dropped before the boundary block is examined.
const RANK_CUT: f64 = 1e-14;
/// Probe offset for the slope of σ₁ next to a root.
const SLOPE_PROBE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Highest angular order N.
    pub basis_size: usize,
    pub collocation_count: usize,
    pub interior_count: usize,
    pub search_window: (f64, f64),
    pub scan_step: f64,
    pub tol: f64,
    /// Largest σ₁ accepted at a located frequency.
    pub accept_threshold: f64,
}

impl SolverConfig {
    pub fn for_window(lo: f64, hi: f64) -> Self {
        let basis_size = 30usize.max((1.5 * hi).ceil() as usize);
        Self {
            basis_size,
            collocation_count: 4 * basis_size,
            interior_count: basis_size,
            search_window: (lo, hi),
            scan_step: DEFAULT_SCAN_STEP,
            tol: DEFAULT_TOL,
            accept_threshold: DEFAULT_ACCEPT,
        }
    }

    pub fn cluster_tol(&self) -> f64 {
        50.0 * self.tol
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.search_window;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Domain(format!("bad search window [{lo}, {hi}]")));
        }
        if self.basis_size == 0 || self.basis_size > crate::bessel::MAX_ORDER as usize {
            return Err(Error::Domain(format!("basis size {} outside 1..=128", self.basis_size)));
        }
        if hi > 0.8 * self.basis_size as f64 {
            return Err(Error::Solver(format!(
                "window top {hi} beyond the resolution limit 0.8·{} of the basis",
                self.basis_size
            )));
        }
        if self.collocation_count < 2 * self.basis_size {
            return Err(Error::Domain("collocation_count must be at least 2·basis_size".into()));
        }
        if self.interior_count == 0 {
            return Err(Error::Domain("interior_count must be positive".into()));
        }
        if !(self.tol >= MIN_TOL) {
            return Err(Error::Domain(format!("tol {} below {MIN_TOL}", self.tol)));
        }
        if !(self.scan_step > 0.0) || !(self.accept_threshold > 0.0) {
            return Err(Error::Domain("scan_step and accept_threshold must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    /// Located frequencies in increasing order; an exactly double one is
    /// listed twice.
    pub omegas: Vec<f64>,
    pub residuals: Vec<f64>,
    pub multiplicity_clusters: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

impl EigenResult {
    pub fn lambdas(&self) -> Vec<f64> {
        self.omegas.iter().map(|w| w * w).collect()
    }
}

/// A body, optionally scaled about the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    body: ConstantWidthBody,
    scale: f64,
}

impl Domain {
    pub fn new(body: ConstantWidthBody) -> Self {
        Self { body, scale: 1.0 }
    }

    pub fn disk() -> Self {
        Self::new(ConstantWidthBody::disk())
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Domain(format!("scale {s} must be positive")));
        }
        Ok(Self { body: self.body.clone(), scale: self.scale * s })
    }

    pub fn body(&self) -> &ConstantWidthBody {
        &self.body
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn radius(&self, theta: f64) -> Result<f64> {
        Ok(self.scale * self.body.radius_exact(theta)?)
    }
}

impl From<ConstantWidthBody> for Domain {
    fn from(body: ConstantWidthBody) -> Self {
        Self::new(body)
    }
}

struct Point {
    r: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

struct Samples {
    order: usize,
    boundary: Vec<Point>,
    interior: Vec<Point>,
}

fn point(r: f64, theta: f64, order: usize) -> Point {
    let (cos, sin) = (0..=order)
        .map(|n| {
            let (s, c) = (n as f64 * theta).sin_cos();
            (c, s)
        })
        .unzip();
    Point { r, cos, sin }
}

fn samples(domain: &Domain, cfg: &SolverConfig) -> Result<Samples> {
    let order = cfg.basis_size;
    let mut boundary = Vec::with_capacity(cfg.collocation_count);
    for i in 0..cfg.collocation_count {
        let theta = TAU * i as f64 / cfg.collocation_count as f64;
        boundary.push(point(domain.radius(theta)?, theta, order));
    }
    // golden-angle spiral, radii between 0.3 and 0.8 of the boundary radius
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut interior = Vec::with_capacity(cfg.interior_count);
    for i in 0..cfg.interior_count {
        let theta = (golden * i as f64).rem_euclid(TAU);
        let frac = 0.3 + 0.5 * (i as f64 + 0.5) / cfg.interior_count as f64;
        interior.push(point(frac * domain.radius(theta)?, theta, order));
    }
    Ok(Samples { order, boundary, interior })
}

impl Samples {
    /// The two smallest singular values of the boundary block of an
    /// orthonormal basis for the sampled trial space.
    fn sigmas(&self, omega: f64) -> (f64, f64) {
        let n = self.order;
        let cols = 2 * n + 1;
        let nb = self.boundary.len();
        let rows = nb + self.interior.len();
        let mut a = DMatrix::<f64>::zeros(rows, cols);
        for (i, p) in self.boundary.iter().chain(self.interior.iter()).enumerate() {
            let js = bessel_j_sequence(n, omega * p.r);
            a[(i, 0)] = js[0];
            for k in 1..=n {
                a[(i, 2 * k - 1)] = js[k] * p.cos[k];
                a[(i, 2 * k)] = js[k] * p.sin[k];
            }
        }
        for mut c in a.column_iter_mut() {
            let norm = c.norm();
            if norm > 0.0 {
                c /= norm;
            }
        }
        let svd = a.svd(true, false);
        let u = svd.u.expect("left vectors requested");
        let smax = svd.singular_values.max();
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] > RANK_CUT * smax)
            .collect();
        let mut ub = DMatrix::<f64>::zeros(nb, keep.len());
        for (jj, &c) in keep.iter().enumerate() {
            for i in 0..nb {
                ub[(i, jj)] = u[(i, c)];
            }
        }
        let mut s: Vec<f64> = ub.singular_values().iter().copied().collect();
        s.sort_by(f64::total_cmp);
        (s.first().copied().unwrap_or(1.0), s.get(1).copied().unwrap_or(f64::INFINITY))
    }

    fn sigma1(&self, omega: f64) -> f64 {
        self.sigmas(omega).0
    }
}

/// Minimizer of a unimodal f on [a, b] to width tol, with its value.
fn golden<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Every Dirichlet frequency of `domain` in the configured window.
pub fn solve_window(domain: &Domain, cfg: &SolverConfig) -> Result<EigenResult> {
    cfg.validate()?;
    let s = samples(domain, cfg)?;
    let (lo, hi) = cfg.search_window;
    let h = cfg.scan_step;
    let steps = ((hi - lo) / h).ceil() as usize;
    // one extra point on each side so roots near the edges still show a dip
    let grid: Vec<f64> = (0..=steps + 2)
        .map(|i| lo - h + i as f64 * h)
        .filter(|w| *w > 0.0)
        .collect();
    let vals: Vec<f64> = grid.par_iter().map(|&w| s.sigma1(w)).collect();
    let dips: Vec<usize> = (1..grid.len().saturating_sub(1))
        .filter(|&i| vals[i] < vals[i - 1] && vals[i] <= vals[i + 1])
        .collect();
    let refined: Vec<(f64, f64)> = dips
        .par_iter()
        .map(|&i| golden(|w| s.sigma1(w), grid[i - 1], grid[i + 1], cfg.tol))
        .collect();

    let ctol = cfg.cluster_tol();
    let mut roots: Vec<(f64, f64)> = Vec::new();
    let mut warnings = Vec::new();
    let mut sorted = refined;
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (w, r) in sorted {
        if r >= cfg.accept_threshold {
            continue;
        }
        match roots.last_mut() {
            Some(last) if (w - last.0).abs() < ctol => {
                if r < last.1 {
                    *last = (w, r);
                }
            }
            _ => roots.push((w, r)),
        }
    }

    // a second frequency closer than the scan step leaves only one dip;
    // σ₂ at the root tells how far away it can be
    let mut extra: Vec<(f64, f64)> = Vec::new();
    for &(w, _) in &roots {
        let (_, s2) = s.sigmas(w);
        let slope = s.sigma1(w + SLOPE_PROBE).max(s.sigma1(w - SLOPE_PROBE)) / SLOPE_PROBE;
        let delta = s2 / slope;
        if !(delta < 2.0 * h) {
            continue;
        }
        let mut found = false;
        for side in [1.0, -1.0] {
            let (a, b) = (w + side * 0.55 * delta, w + side * 3.0 * delta);
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            if b - a < 4.0 * ctol {
                continue;
            }
            let (x, r) = golden(|v| s.sigma1(v), a, b, cfg.tol);
            let inside = x - a > 0.01 * (b - a) && b - x > 0.01 * (b - a);
            let known = roots.iter().chain(extra.iter()).any(|q| (q.0 - x).abs() < ctol);
            if inside && r < cfg.accept_threshold && (x - w).abs() >= ctol {
                found = true;
                if !known {
                    extra.push((x, r));
                }
            }
        }
        if !found && s2 < cfg.accept_threshold {
            extra.push((w, s2));
        }
    }
    roots.extend(extra);
    roots.retain(|(w, _)| *w >= lo && *w <= hi);
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    if roots.is_empty() {
        warnings.push(format!("no eigenvalue found in [{lo}, {hi}]"));
    }

    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for &(w, _) in &roots {
        match clusters.last_mut() {
            Some(c) if (w - c[c.len() - 1]).abs() < ctol => c.push(w),
            _ => clusters.push(vec![w]),
        }
    }
    Ok(EigenResult {
        omegas: roots.iter().map(|r| r.0).collect(),
        residuals: roots.iter().map(|r| r.1).collect(),
        multiplicity_clusters: clusters,
        warnings,
    })
}

/// Knobs for the automatically configured solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexOptions {
    pub tol: f64,
    pub scan_step: f64,
    pub accept_threshold: f64,
}

impl Default for IndexOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, scan_step: DEFAULT_SCAN_STEP, accept_threshold: DEFAULT_ACCEPT }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexSolution {
    pub kappa: usize,
    pub lambda: f64,
    pub omega: f64,
    pub residual: f64,
    /// The corresponding eigenvalue of the (equally scaled) disk.
    pub disk_lambda: f64,
    /// λ window that was searched.
    pub window: (f64, f64),
    /// All eigenvalues found in the window.
    pub window_lambdas: Vec<f64>,
}

/// λ_κ of the domain. The λ window is centred on the disk value with
/// half-width max(0.5, 10εj²); its edges are moved to the middle of the
/// disk gaps they fall in, and the eigenvalues found must match the disk
/// eigenvalues inside it one for one.
pub fn solve_index(domain: &Domain, kappa: usize, opts: &IndexOptions) -> Result<IndexSolution> {
    if kappa == 0 || kappa > MAX_KAPPA {
        return Err(Error::OutOfRange(format!("kappa {kappa} outside 1..={MAX_KAPPA}")));
    }
    let s2 = domain.scale() * domain.scale();
    let eps = domain.body().epsilon();
    let mut count = (4 * kappa + 40).min(MAX_COUNT);
    let (disk, target, lo, hi) = loop {
        let table = enumerate_spectrum(count)?;
        let disk: Vec<f64> = table.entries().iter().map(|e| e.lambda / s2).collect();
        let target = disk[kappa - 1];
        let hw = 0.5f64.max(10.0 * eps * target);
        let (lo, hi) = (target - hw, target + hw);
        if disk[disk.len() - 1] > hi {
            break (disk, target, lo, hi);
        }
        if count == MAX_COUNT {
            return Err(Error::OutOfRange(format!("window top {hi} beyond the enumerated spectrum")));
        }
        count = (2 * count).min(MAX_COUNT);
    };
    let mut distinct: Vec<f64> = Vec::new();
    for &d in &disk {
        if distinct.last().is_none_or(|&l| d - l > 1e-9 * d) {
            distinct.push(d);
        }
    }
    let lo = match distinct.iter().rposition(|&d| d < lo) {
        Some(i) => 0.5 * (distinct[i] + distinct[i + 1]),
        None => 0.5 * distinct[0],
    };
    let hi = match distinct.iter().position(|&d| d > hi) {
        Some(i) => 0.5 * (distinct[i - 1] + distinct[i]),
        None => unreachable!("coverage checked above"),
    };
    let below = disk.iter().filter(|&&d| d < lo).count();
    let expected = disk.iter().filter(|&&d| d >= lo && d <= hi).count();

    let mut cfg = SolverConfig::for_window(lo.sqrt(), hi.sqrt());
    cfg.tol = opts.tol;
    cfg.scan_step = opts.scan_step;
    cfg.accept_threshold = opts.accept_threshold;
    let res = solve_window(domain, &cfg)?;
    if res.omegas.len() != expected {
        return Err(Error::Solver(format!(
            "match failure for kappa {kappa}: {} eigenvalues in [{lo:.6}, {hi:.6}], expected {expected}",
            res.omegas.len()
        )));
    }
    let i = kappa - 1 - below;
    Ok(IndexSolution {
        kappa,
        lambda: res.omegas[i] * res.omegas[i],
        omega: res.omegas[i],
        residual: res.residuals[i],
        disk_lambda: target,
        window: (lo, hi),
        window_lambdas: res.lambdas(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub lambda_num: f64,
    pub lambda_pred: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub kappa: usize,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of log residual against log ε; None when some
    /// residual is exactly zero.
    pub slope: Option<f64>,
}

#[derive(Serialize)]
struct ConvergenceCsvRow {
    eps: f64,
    lambda_num: f64,
    lambda_pred: f64,
    residual: f64,
    slope: Option<f64>,
}

impl ConvergenceStudy {
    pub fn to_csv(&self) -> Result<String> {
        let rows: Vec<ConvergenceCsvRow> = self
            .rows
            .iter()
            .map(|r| ConvergenceCsvRow {
                eps: r.eps,
                lambda_num: r.lambda_num,
                lambda_pred: r.lambda_pred,
                residual: r.residual,
                slope: self.slope,
            })
            .collect();
        crate::io::rows_to_csv(&rows)
    }
}

pub fn fitted_order(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(e, r)| !(e > 0.0 && r > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

/// Numerical λ_κ against the second-order prediction along a sequence of ε.
pub fn convergence_study(
    coeffs: &DeformationCoeffs,
    kappa: usize,
    eps_list: &[f64],
    opts: &IndexOptions,
) -> Result<ConvergenceStudy> {
    if eps_list.len() < 3 {
        return Err(Error::Domain("a convergence study needs at least three ε values".into()));
    }
    if eps_list.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::Domain("ε values must be strictly decreasing".into()));
    }
    let emax = epsilon_max(coeffs);
    if let Some(e) = eps_list.iter().find(|&&e| !(e > 0.0 && e < emax)) {
        return Err(Error::InvalidBody(format!("epsilon {e} outside (0, {emax})")));
    }
    let rows: Result<Vec<ConvergenceRow>> = eps_list
        .par_iter()
        .map(|&eps| {
            let body = ConstantWidthBody::new(coeffs.clone(), eps)?;
            let num = solve_index(&Domain::new(body), kappa, opts)?;
            let pred = predict(kappa, coeffs, eps)?;
            Ok(ConvergenceRow {
                eps,
                lambda_num: num.lambda,
                lambda_pred: pred.lambda_pred,
                residual: (num.lambda - pred.lambda_pred).abs(),
            })
        })
        .collect();
    let rows = rows?;
    let slope = fitted_order(&rows.iter().map(|r| (r.eps, r.residual)).collect::<Vec<_>>());
    Ok(ConvergenceStudy { kappa, rows, slope })
}
