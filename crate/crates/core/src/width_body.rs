//! Bodies of constant width 2 given by the support function
//! h(φ) = 1 + ε f(φ) + ε² g(φ), where f and g carry only odd harmonics:
//! f(φ) = Σ_{n odd} 2 Re(a_n e^{inφ}), g(φ) = Σ_{n odd} 2 Re(b_n e^{inφ}).

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_HARMONIC: u32 = 128;
pub const GRID: usize = 4096;
pub const SAFETY: f64 = 0.99;
pub const DIAMETER_SAMPLES: usize = 1024;
pub const SVG_POINTS: usize = 720;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DeformationCoeffs {
    a: BTreeMap<u32, Complex64>,
    b: BTreeMap<u32, Complex64>,
}

fn check_index(n: u32) -> Result<()> {
    if n % 2 == 0 || n > MAX_HARMONIC {
        return Err(Error::Parse(format!(
            "index {n} must be odd and at most {MAX_HARMONIC}"
        )));
    }
    Ok(())
}

impl DeformationCoeffs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(n: u32, a: Complex64) -> Result<Self> {
        let mut c = Self::new();
        c.set_a(n, a)?;
        Ok(c)
    }

    pub fn set_a(&mut self, n: u32, v: Complex64) -> Result<()> {
        check_index(n)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Parse(format!("a{n} is not finite")));
        }
        self.a.insert(n, v);
        Ok(())
    }

    pub fn set_b(&mut self, n: u32, v: Complex64) -> Result<()> {
        check_index(n)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Parse(format!("b{n} is not finite")));
        }
        self.b.insert(n, v);
        Ok(())
    }

    /// a_n for any integer n, with a_{−n} = conj(a_n) and even entries zero.
    pub fn a(&self, n: i64) -> Complex64 {
        let v = self.a.get(&(n.unsigned_abs() as u32)).copied().unwrap_or_default();
        if n < 0 {
            v.conj()
        } else {
            v
        }
    }

    pub fn b(&self, n: i64) -> Complex64 {
        let v = self.b.get(&(n.unsigned_abs() as u32)).copied().unwrap_or_default();
        if n < 0 {
            v.conj()
        } else {
            v
        }
    }

    pub fn a_terms(&self) -> impl Iterator<Item = (u32, Complex64)> + '_ {
        self.a.iter().map(|(&n, &v)| (n, v))
    }

    pub fn b_terms(&self) -> impl Iterator<Item = (u32, Complex64)> + '_ {
        self.b.iter().map(|(&n, &v)| (n, v))
    }

    /// Largest stored index (0 when empty).
    pub fn truncation(&self) -> u32 {
        let ka = self.a.keys().next_back().copied().unwrap_or(0);
        let kb = self.b.keys().next_back().copied().unwrap_or(0);
        ka.max(kb)
    }

    pub fn is_zero(&self) -> bool {
        self.a.values().chain(self.b.values()).all(|v| v.norm() == 0.0)
    }

    pub fn f(&self, phi: f64) -> [f64; 3] {
        harmonics(&self.a, phi)
    }

    pub fn g(&self, phi: f64) -> [f64; 3] {
        harmonics(&self.b, phi)
    }
}

/// Value and first two derivatives of Σ 2 Re(c_n e^{inφ}).
fn harmonics(map: &BTreeMap<u32, Complex64>, phi: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (&n, c) in map {
        let nf = n as f64;
        let (s, co) = (nf * phi).sin_cos();
        let re = c.re * co - c.im * s;
        let im = c.re * s + c.im * co;
        out[0] += 2.0 * re;
        out[1] -= 2.0 * nf * im;
        out[2] -= 2.0 * nf * nf * re;
    }
    out
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let t = s.trim();
    Complex64::from_str(t).map_err(|_| Error::Parse(format!("bad complex value '{s}'")))
}

impl FromStr for DeformationCoeffs {
    type Err = Error;

    /// `a3=0.1,a5=0.02+0.01i,b3=-0.05`. Indices must be odd; a repeated
    /// entry is an error.
    fn from_str(s: &str) -> Result<Self> {
        let mut c = Self::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, val) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("'{item}' is not of the form a3=0.1")))?;
            let key = key.trim();
            let mut chars = key.chars();
            let which = chars.next();
            let n: u32 = chars
                .as_str()
                .parse()
                .map_err(|_| Error::Parse(format!("bad index in '{key}'")))?;
            let v = parse_complex(val)?;
            let map = match which {
                Some('a') => &c.a,
                Some('b') => &c.b,
                _ => return Err(Error::Parse(format!("'{key}' must start with a or b"))),
            };
            if map.contains_key(&n) {
                return Err(Error::Parse(format!("{key} given twice")));
            }
            match which {
                Some('a') => c.set_a(n, v)?,
                _ => c.set_b(n, v)?,
            }
        }
        Ok(c)
    }
}

fn fmt_complex(v: Complex64) -> String {
    match (v.re != 0.0, v.im != 0.0) {
        (_, false) => format!("{}", v.re),
        (false, true) => format!("{}i", v.im),
        (true, true) if v.im < 0.0 => format!("{}{}i", v.re, v.im),
        (true, true) => format!("{}+{}i", v.re, v.im),
    }
}

impl fmt::Display for DeformationCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .a_terms()
            .map(|(n, v)| format!("a{n}={}", fmt_complex(v)))
            .chain(self.b_terms().map(|(n, v)| format!("b{n}={}", fmt_complex(v))))
            .collect();
        f.write_str(&parts.join(","))
    }
}

fn grid_angle(i: usize, n: usize) -> f64 {
    TAU * i as f64 / n as f64
}

/// Smallest positive root of 1 + εu + ε²v, or +∞.
fn first_positive_root(u: f64, v: f64) -> f64 {
    let scale = u.abs().max(v.abs().sqrt());
    if scale == 0.0 {
        return f64::INFINITY;
    }
    if v.abs() <= 1e-14 * u * u {
        return if u < 0.0 { -1.0 / u } else { f64::INFINITY };
    }
    let disc = u * u - 4.0 * v;
    if disc < 0.0 {
        return f64::INFINITY;
    }
    let sgn = if u >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (u + sgn * disc.sqrt());
    let mut best = f64::INFINITY;
    for r in [q / v, if q != 0.0 { 1.0 / q } else { f64::INFINITY }] {
        if r > 0.0 && r < best {
            best = r;
        }
    }
    best
}

fn convexity_root(c: &DeformationCoeffs, phi: f64) -> f64 {
    let f = c.f(phi);
    let g = c.g(phi);
    first_positive_root(f[0] + f[2], g[0] + g[2])
}

/// Largest ε̄ for which h + h'' stays positive, times the 0.99 safety
/// factor. The bound is the first sign change of 1 + ε(f+f'') + ε²(g+g''),
/// located on the 4096-point grid and then refined around the worst angle.
/// Returns +∞ when neither f + f'' nor g + g'' has any content.
pub fn epsilon_max(c: &DeformationCoeffs) -> f64 {
    let curved = c
        .a_terms()
        .chain(c.b_terms())
        .any(|(n, v)| n >= 3 && v.norm() > 0.0);
    if !curved {
        return f64::INFINITY;
    }
    let (mut worst, mut at) = (f64::INFINITY, 0usize);
    for i in 0..GRID {
        let r = convexity_root(c, grid_angle(i, GRID));
        if r < worst {
            worst = r;
            at = i;
        }
    }
    if !worst.is_finite() {
        return f64::INFINITY;
    }
    // golden-section refinement between the neighbouring grid angles
    let h = TAU / GRID as f64;
    let (mut lo, mut hi) = (grid_angle(at, GRID) - h, grid_angle(at, GRID) + h);
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - gr * (hi - lo);
    let mut x2 = lo + gr * (hi - lo);
    let (mut f1, mut f2) = (convexity_root(c, x1), convexity_root(c, x2));
    for _ in 0..60 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = convexity_root(c, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = convexity_root(c, x2);
        }
    }
    SAFETY * worst.min(f1).min(f2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Support {
    pub h: f64,
    pub dh: f64,
    pub d2h: f64,
}

impl Support {
    /// Radius of curvature h + h''.
    pub fn rho(&self) -> f64 {
        self.h + self.d2h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WidthReport {
    pub min_width: f64,
    pub max_width: f64,
    pub diameter: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantWidthBody {
    coeffs: DeformationCoeffs,
    epsilon: f64,
    epsilon_max: f64,
}

impl ConstantWidthBody {
    pub fn new(coeffs: DeformationCoeffs, epsilon: f64) -> Result<Self> {
        let emax = epsilon_max(&coeffs);
        if !(epsilon >= 0.0) || epsilon >= emax {
            return Err(Error::InvalidBody(format!(
                "epsilon {epsilon} outside [0, {emax})"
            )));
        }
        let body = Self { coeffs, epsilon, epsilon_max: emax };
        for i in 0..GRID {
            let s = body.support_value(grid_angle(i, GRID));
            if !(s.h > 0.0 && s.rho() > 0.0) {
                return Err(Error::InvalidBody(format!(
                    "h = {}, h + h'' = {} at grid angle {i}",
                    s.h,
                    s.rho()
                )));
            }
        }
        Ok(body)
    }

    pub fn disk() -> Self {
        Self {
            coeffs: DeformationCoeffs::new(),
            epsilon: 0.0,
            epsilon_max: f64::INFINITY,
        }
    }

    pub fn coeffs(&self) -> &DeformationCoeffs {
        &self.coeffs
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn epsilon_max(&self) -> f64 {
        self.epsilon_max
    }

    pub fn support_value(&self, phi: f64) -> Support {
        let e = self.epsilon;
        let f = self.coeffs.f(phi);
        let g = self.coeffs.g(phi);
        Support {
            h: 1.0 + e * f[0] + e * e * g[0],
            dh: e * f[1] + e * e * g[1],
            d2h: e * f[2] + e * e * g[2],
        }
    }

    /// Boundary point with outward normal (cos φ, sin φ).
    pub fn boundary_point(&self, phi: f64) -> (f64, f64) {
        let s = self.support_value(phi);
        let (sn, cs) = phi.sin_cos();
        (s.h * cs - s.dh * sn, s.h * sn + s.dh * cs)
    }

    /// Polar angle of the boundary point with normal angle φ. Increasing in
    /// φ with slope hρ/(h² + h'²) while h and ρ are positive.
    pub fn polar_angle(&self, phi: f64) -> f64 {
        let s = self.support_value(phi);
        phi + s.dh.atan2(s.h)
    }

    pub fn width_and_diameter(&self) -> WidthReport {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..GRID {
            let phi = grid_angle(i, GRID);
            let w = self.support_value(phi).h + self.support_value(phi + PI).h;
            lo = lo.min(w);
            hi = hi.max(w);
        }
        let pts: Vec<(f64, f64)> = (0..DIAMETER_SAMPLES)
            .map(|i| self.boundary_point(grid_angle(i, DIAMETER_SAMPLES)))
            .collect();
        let mut d2: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d2 = d2.max((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2));
            }
        }
        WidthReport { min_width: lo, max_width: hi, diameter: d2.sqrt() }
    }

    /// ½∮(h² − h'²) dφ; the periodic trapezoid rule is exact for these
    /// trigonometric polynomials.
    pub fn area(&self) -> f64 {
        let sum: f64 = (0..GRID)
            .map(|i| {
                let s = self.support_value(grid_angle(i, GRID));
                s.h * s.h - s.dh * s.dh
            })
            .sum();
        0.5 * sum * TAU / GRID as f64
    }

    /// R(θ) with (R cos θ, R sin θ) on the boundary.
    pub fn radius_exact(&self, theta: f64) -> Result<f64> {
        if self.epsilon == 0.0 || self.coeffs.is_zero() {
            return Ok(1.0);
        }
        let (mut lo, mut hi) = (theta - FRAC_PI_2, theta + FRAC_PI_2);
        if !(self.polar_angle(lo) < theta && self.polar_angle(hi) > theta) {
            return Err(Error::Convergence(format!("no polar-angle bracket at θ = {theta}")));
        }
        for _ in 0..36 {
            let mid = 0.5 * (lo + hi);
            if self.polar_angle(mid) < theta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut phi = 0.5 * (lo + hi);
        for _ in 0..8 {
            let s = self.support_value(phi);
            let slope = s.h * s.rho() / (s.h * s.h + s.dh * s.dh);
            let step = (self.polar_angle(phi) - theta) / slope;
            let next = (phi - step).clamp(lo, hi);
            let moved = (next - phi).abs();
            phi = next;
            if moved < 1e-16 {
                break;
            }
        }
        let (x, y) = self.boundary_point(phi);
        Ok(x.hypot(y))
    }

    /// 1 + εf(θ) + ε²(g(θ) − ½ f'(θ)²).
    pub fn radius_second_order(&self, theta: f64) -> f64 {
        let e = self.epsilon;
        let f = self.coeffs.f(theta);
        let g = self.coeffs.g(theta);
        1.0 + e * f[0] + e * e * (g[0] - 0.5 * f[1] * f[1])
    }

    pub fn to_svg(&self, points: usize) -> String {
        let n = points.max(3);
        let mut d = String::new();
        for i in 0..n {
            let (x, y) = self.boundary_point(grid_angle(i, n));
            let cmd = if i == 0 { 'M' } else { 'L' };
            d.push_str(&format!("{cmd}{x:.6} {:.6} ", -y));
        }
        d.push('Z');
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.5 -1.5 3 3\" width=\"600\" height=\"600\">\n\
             <path d=\"{d}\" fill=\"none\" stroke=\"black\" stroke-width=\"0.01\"/>\n</svg>\n"
        )
    }

    pub fn radius_rows(&self, points: usize) -> Result<Vec<RadiusRow>> {
        (0..points.max(1))
            .map(|i| {
                let theta = grid_angle(i, points.max(1));
                Ok(RadiusRow {
                    theta,
                    r_exact: self.radius_exact(theta)?,
                    r_second_order: self.radius_second_order(theta),
                })
            })
            .collect()
    }

    pub fn radius_csv(&self, points: usize) -> Result<String> {
        crate::io::rows_to_csv(&self.radius_rows(points)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusRow {
    pub theta: f64,
    pub r_exact: f64,
    pub r_second_order: f64,
}
