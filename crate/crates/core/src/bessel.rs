//! Bessel functions of the first kind, their zeros, and the log-derivative
//! F_n(x) = x J_n'(x) / J_n(x).
//!
//! Values come from the ascending series when x²/4 ≤ n + 1 and from Miller's
//! backward recurrence (normalized by J_0 + 2ΣJ_2k = 1) otherwise.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ORDER: u32 = 128;
pub const MAX_ARG: f64 = 512.0;
pub const MAX_ZERO_INDEX: u32 = 64;

/// |J_n| below this fraction of hypot(J_n, J_n') counts as sitting on a zero.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Absolute accuracy targeted by the zero finder.
pub const ZERO_TOL: f64 = 1e-12;

const NEWTON_CAP: usize = 60;
const RESCALE_AT: f64 = 1e250;

pub const DEFAULT_CACHE_PATH: &str = "./cache/bessel_zeros.csv";

fn check_domain(n: u32, x: f64) -> Result<()> {
    if n > MAX_ORDER {
        return Err(Error::Domain(format!("order {n} exceeds {MAX_ORDER}")));
    }
    if !(x > 0.0 && x <= MAX_ARG) {
        return Err(Error::Domain(format!("argument {x} outside (0, {MAX_ARG}]")));
    }
    Ok(())
}

#[inline]
fn series_region(n: u32, x: f64) -> bool {
    0.25 * x * x <= (n + 1) as f64
}

/// Σ_k (−x²/4)^k / (k! (n+1)_k), i.e. J_n(x) without its (x/2)^n/n! prefactor.
fn series_sum(n: u32, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..400u32 {
        term *= q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn series_prefactor(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    (1..=n).fold(1.0, |acc, k| acc * h / k as f64)
}

fn series_value(n: u32, x: f64) -> f64 {
    series_prefactor(n, x) * series_sum(n, x)
}

/// J_0(x), ..., J_nmax(x) by backward recurrence.
fn miller(nmax: usize, x: f64) -> Vec<f64> {
    let big = nmax.max(x.ceil() as usize);
    let mut start = big + 20 + (40.0 * big as f64).sqrt() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut out = vec![0.0; nmax + 1];
    let mut above = 0.0;
    let mut cur = 1.0;
    let mut sum = 2.0 * cur;
    for k in (1..=start).rev() {
        let below = 2.0 * k as f64 / x * cur - above;
        above = cur;
        cur = below;
        let idx = k - 1;
        if idx <= nmax {
            out[idx] = cur;
        }
        if idx % 2 == 0 {
            sum += if idx == 0 { cur } else { 2.0 * cur };
        }
        if cur.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            cur *= s;
            above *= s;
            sum *= s;
            out.iter_mut().for_each(|v| *v *= s);
        }
    }
    let norm = 1.0 / sum;
    out.iter_mut().for_each(|v| *v *= norm);
    out
}

/// All of J_0(x) ..= J_nmax(x). Used by the eigensolver, which needs every
/// order at each collocation point.
pub fn bessel_j_sequence(nmax: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut v = vec![0.0; nmax + 1];
        v[0] = 1.0;
        return v;
    }
    let x = x.abs();
    if x < 1e-6 {
        return (0..=nmax as u32).map(|n| series_value(n, x)).collect();
    }
    miller(nmax, x)
}

pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    check_domain(n, x)?;
    if series_region(n, x) {
        Ok(series_value(n, x))
    } else {
        Ok(miller(n as usize, x)[n as usize])
    }
}

/// (J_n(x), J_n'(x)) from one evaluation pass.
pub fn bessel_j_and_prime(n: u32, x: f64) -> Result<(f64, f64)> {
    check_domain(n, x)?;
    if series_region(n, x) {
        let jn = series_value(n, x);
        let jn1 = series_value(n + 1, x);
        Ok((jn, n as f64 / x * jn - jn1))
    } else {
        let seq = miller(n as usize + 1, x);
        let k = n as usize;
        let d = if k == 0 {
            -seq[1]
        } else {
            0.5 * (seq[k - 1] - seq[k + 1])
        };
        Ok((seq[k], d))
    }
}

pub fn bessel_j_prime(n: u32, x: f64) -> Result<f64> {
    Ok(bessel_j_and_prime(n, x)?.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselPoint {
    pub order: u32,
    pub argument: f64,
    pub value: f64,
    pub derivative: f64,
    /// None when x sits on a zero of J_n.
    pub logderiv: Option<f64>,
}

pub fn bessel_point(n: u32, x: f64) -> Result<BesselPoint> {
    let (value, derivative) = bessel_j_and_prime(n, x)?;
    Ok(BesselPoint {
        order: n,
        argument: x,
        value,
        derivative,
        logderiv: log_derivative(n, x).ok(),
    })
}

/// F_n(x) = x J_n'(x)/J_n(x) = n − x J_{n+1}(x)/J_n(x).
pub fn log_derivative(n: u32, x: f64) -> Result<f64> {
    check_domain(n, x)?;
    if series_region(n, x) {
        // J_n has no zero here, and the ratio of sums avoids underflow.
        let ratio = 0.5 * x / (n + 1) as f64 * series_sum(n + 1, x) / series_sum(n, x);
        return Ok(n as f64 - x * ratio);
    }
    let seq = miller(n as usize + 1, x);
    let k = n as usize;
    let (jn, jn1) = (seq[k], seq[k + 1]);
    let d = if k == 0 {
        -seq[1]
    } else {
        0.5 * (seq[k - 1] - seq[k + 1])
    };
    if jn.abs() < DEGENERACY_TOL * jn.hypot(d) {
        return Err(Error::Pole(format!(
            "J_{n}({x}) = {jn:e} is degenerate for the log-derivative"
        )));
    }
    Ok(n as f64 - x * jn1 / jn)
}

/// dF_n/dx from the Riccati equation x F' = n² − x² − F².
pub fn log_derivative_slope(n: u32, x: f64, f: f64) -> f64 {
    let nf = n as f64;
    (nf * nf - x * x - f * f) / x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    Zero,
    PrimeZero,
}

impl ZeroKind {
    pub fn tag(self) -> &'static str {
        match self {
            ZeroKind::Zero => "zero",
            ZeroKind::PrimeZero => "prime_zero",
        }
    }

    fn from_tag(s: &str) -> Option<Self> {
        match s.trim() {
            "zero" => Some(ZeroKind::Zero),
            "prime_zero" => Some(ZeroKind::PrimeZero),
            _ => None,
        }
    }
}

fn check_zero_index(m: u32, p: u32) -> Result<()> {
    if m > MAX_ORDER {
        return Err(Error::Domain(format!("order {m} exceeds {MAX_ORDER}")));
    }
    if p == 0 || p > MAX_ZERO_INDEX {
        return Err(Error::Domain(format!(
            "zero index {p} outside 1..={MAX_ZERO_INDEX}"
        )));
    }
    Ok(())
}

/// Value and slope of the function whose roots are sought.
fn zero_target(kind: ZeroKind, m: u32, x: f64) -> Result<(f64, f64)> {
    let (j, jp) = bessel_j_and_prime(m, x)?;
    Ok(match kind {
        ZeroKind::Zero => (j, jp),
        ZeroKind::PrimeZero => {
            let mf = m as f64;
            let jpp = -jp / x - (1.0 - mf * mf / (x * x)) * j;
            (jp, jpp)
        }
    })
}

fn refine(kind: ZeroKind, m: u32, mut lo: f64, mut hi: f64, flo: f64) -> Result<f64> {
    let mut x = 0.5 * (lo + hi);
    for _ in 0..NEWTON_CAP {
        let (f, df) = zero_target(kind, m, x)?;
        if f == 0.0 {
            return Ok(x);
        }
        if (f > 0.0) == (flo > 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - f / df;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 4.0 * f64::EPSILON * x || hi - lo <= 4.0 * f64::EPSILON * x {
            return Ok(x);
        }
    }
    Err(Error::Convergence(format!(
        "{} of order {m} in [{lo}, {hi}] after {NEWTON_CAP} iterations",
        kind.tag()
    )))
}

/// First `count` positive roots of J_m (or J_m') by sign-change scan and
/// safeguarded Newton. The scan step stays below the root spacing, and the
/// scan starts below the first root (Watson's bound for J_m, x = m for J_m').
pub fn find_zeros(kind: ZeroKind, m: u32, count: u32) -> Result<Vec<f64>> {
    check_zero_index(m, count.max(1))?;
    let mf = m as f64;
    let (mut a, step) = match kind {
        ZeroKind::Zero => ((mf * (mf + 2.0)).sqrt().max(1e-3), 1.0),
        ZeroKind::PrimeZero => (mf.max(0.5), 0.5),
    };
    let mut fa = zero_target(kind, m, a)?.0;
    let mut out = Vec::with_capacity(count as usize);
    while out.len() < count as usize {
        let b = a + step;
        if b > MAX_ARG {
            return Err(Error::Domain(format!(
                "{} {} of order {m} lies beyond {MAX_ARG}",
                kind.tag(),
                out.len() + 1
            )));
        }
        let fb = zero_target(kind, m, b)?.0;
        if fb == 0.0 {
            out.push(b);
            a = b + 1e-9;
            fa = zero_target(kind, m, a)?.0;
            continue;
        }
        if (fa > 0.0) != (fb > 0.0) {
            out.push(refine(kind, m, a, b, fa)?);
        }
        a = b;
        fa = fb;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub m: u32,
    pub p: u32,
    pub value: f64,
    pub kind: ZeroKind,
}

/// Zeros j_{m,p} and j'_{m,p}, memoized and optionally mirrored to an
/// append-only CSV file (`m,p,value,kind`). Reads are concurrent, writes
/// are serialized.
#[derive(Debug, Default)]
pub struct ZeroTable {
    entries: RwLock<BTreeMap<(ZeroKind, u32, u32), f64>>,
    sink: Mutex<Option<PathBuf>>,
}

impl ZeroTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cache(path: impl AsRef<Path>) -> Result<Self> {
        let t = Self::new();
        t.attach(path)?;
        Ok(t)
    }

    /// Loads any existing records from `path` and appends new ones there.
    /// Returns the number of records read.
    pub fn attach(&self, path: impl AsRef<Path>) -> Result<usize> {
        let path = path.as_ref().to_path_buf();
        let cache_err = |reason: String| Error::Cache {
            path: path.clone(),
            reason,
        };
        let mut loaded = 0;
        if path.exists() {
            let mut rdr = csv::ReaderBuilder::new()
                .has_headers(false)
                .comment(Some(b'#'))
                .trim(csv::Trim::All)
                .from_path(&path)
                .map_err(|e| cache_err(e.to_string()))?;
            let mut map = self.entries.write().expect("zero table poisoned");
            for rec in rdr.records() {
                let rec = rec.map_err(|e| cache_err(e.to_string()))?;
                if rec.len() != 4 {
                    return Err(cache_err(format!("bad record {:?}", rec)));
                }
                let m: u32 = rec[0].parse().map_err(|_| cache_err(format!("bad m in {rec:?}")))?;
                let p: u32 = rec[1].parse().map_err(|_| cache_err(format!("bad p in {rec:?}")))?;
                let v: f64 = rec[2]
                    .parse()
                    .map_err(|_| cache_err(format!("bad value in {rec:?}")))?;
                let kind = ZeroKind::from_tag(&rec[3])
                    .ok_or_else(|| cache_err(format!("bad kind in {rec:?}")))?;
                map.insert((kind, m, p), v);
                loaded += 1;
            }
        } else if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir).map_err(|e| cache_err(e.to_string()))?;
            }
        }
        *self.sink.lock().expect("zero sink poisoned") = Some(path);
        Ok(loaded)
    }

    pub fn zero(&self, m: u32, p: u32) -> Result<f64> {
        self.get(ZeroKind::Zero, m, p)
    }

    pub fn prime_zero(&self, m: u32, p: u32) -> Result<f64> {
        self.get(ZeroKind::PrimeZero, m, p)
    }

    /// j_{m,1}, ..., j_{m,count}.
    pub fn zeros(&self, m: u32, count: u32) -> Result<Vec<f64>> {
        self.get(ZeroKind::Zero, m, count)?;
        let map = self.entries.read().expect("zero table poisoned");
        Ok((1..=count).map(|p| map[&(ZeroKind::Zero, m, p)]).collect())
    }

    pub fn get(&self, kind: ZeroKind, m: u32, p: u32) -> Result<f64> {
        check_zero_index(m, p)?;
        if let Some(v) = self
            .entries
            .read()
            .expect("zero table poisoned")
            .get(&(kind, m, p))
        {
            return Ok(*v);
        }
        // Recompute the whole prefix so the result never depends on what
        // happened to be cached already.
        let all = find_zeros(kind, m, p)?;
        let mut fresh = Vec::new();
        {
            let mut map = self.entries.write().expect("zero table poisoned");
            for (i, &v) in all.iter().enumerate() {
                let key = (kind, m, i as u32 + 1);
                if !map.contains_key(&key) {
                    map.insert(key, v);
                    fresh.push(ZeroRecord {
                        m,
                        p: i as u32 + 1,
                        value: v,
                        kind,
                    });
                }
            }
        }
        self.append(&fresh)?;
        Ok(all[p as usize - 1])
    }

    fn append(&self, recs: &[ZeroRecord]) -> Result<()> {
        if recs.is_empty() {
            return Ok(());
        }
        let sink = self.sink.lock().expect("zero sink poisoned");
        let Some(path) = sink.as_ref() else {
            return Ok(());
        };
        let cache_err = |reason: String| Error::Cache {
            path: path.clone(),
            reason,
        };
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| cache_err(e.to_string()))?;
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        for r in recs {
            w.write_record([
                r.m.to_string(),
                r.p.to_string(),
                format!("{:.16e}", r.value),
                r.kind.tag().to_string(),
            ])
            .map_err(|e| cache_err(e.to_string()))?;
        }
        w.flush().map_err(|e| cache_err(e.to_string()))?;
        Ok(())
    }

    pub fn cache_path(&self) -> Option<PathBuf> {
        self.sink.lock().expect("zero sink poisoned").clone()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("zero table poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn precision(&self) -> f64 {
        ZERO_TOL
    }

    pub fn records(&self) -> Vec<ZeroRecord> {
        self.entries
            .read()
            .expect("zero table poisoned")
            .iter()
            .map(|(&(kind, m, p), &value)| ZeroRecord { m, p, value, kind })
            .collect()
    }

    /// Interlacing j_{m,p} < j_{m+1,p} < j_{m,p+1}, Watson's lower bound and
    /// j'_{m,1} ≤ j_{m,1}, checked on whatever is cached. Returns violations.
    pub fn check_invariants(&self) -> Vec<String> {
        let map = self.entries.read().expect("zero table poisoned");
        let mut bad = Vec::new();
        for (&(kind, m, p), &v) in map.iter() {
            if kind == ZeroKind::Zero {
                let mf = m as f64;
                if v < (mf * (mf + 2.0)).sqrt() {
                    bad.push(format!("j_{{{m},{p}}} = {v} below sqrt(m(m+2))"));
                }
                if let Some(&up) = map.get(&(kind, m + 1, p)) {
                    if up <= v {
                        bad.push(format!("j_{{{},{p}}} = {up} not above j_{{{m},{p}}} = {v}", m + 1));
                    }
                    if let Some(&next) = map.get(&(kind, m, p + 1)) {
                        if next <= up {
                            bad.push(format!("j_{{{m},{}}} = {next} not above j_{{{},{p}}} = {up}", p + 1, m + 1));
                        }
                    }
                }
                if m >= 1 && p == 1 {
                    if let Some(&d) = map.get(&(ZeroKind::PrimeZero, m, 1)) {
                        if d > v {
                            bad.push(format!("j'_{{{m},1}} = {d} above j_{{{m},1}} = {v}"));
                        }
                    }
                }
            }
        }
        bad
    }
}

static GLOBAL: OnceLock<ZeroTable> = OnceLock::new();

/// Process-wide table. Attach a cache file with `global_table().attach(..)`.
pub fn global_table() -> &'static ZeroTable {
    GLOBAL.get_or_init(ZeroTable::new)
}

pub fn bessel_zero(m: u32, p: u32) -> Result<f64> {
    global_table().zero(m, p)
}

/// p-th positive root of J_m'. For m = 0 this skips the stationary point at
/// the origin, so j'_{0,p} = j_{1,p}.
pub fn bessel_prime_zero(m: u32, p: u32) -> Result<f64> {
    global_table().prime_zero(m, p)
}

/// Order shifts n − m for which F_n at a zero of J_m is rational in j².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shift {
    MinusFive,
    MinusThree,
    MinusOne,
    PlusOne,
    PlusThree,
    PlusFive,
}

impl Shift {
    pub const ALL: [Shift; 6] = [
        Shift::MinusFive,
        Shift::MinusThree,
        Shift::MinusOne,
        Shift::PlusOne,
        Shift::PlusThree,
        Shift::PlusFive,
    ];

    pub fn offset(self) -> i64 {
        match self {
            Shift::MinusFive => -5,
            Shift::MinusThree => -3,
            Shift::MinusOne => -1,
            Shift::PlusOne => 1,
            Shift::PlusThree => 3,
            Shift::PlusFive => 5,
        }
    }

    pub fn from_offset(s: i64) -> Option<Self> {
        Self::ALL.into_iter().find(|sh| sh.offset() == s)
    }

    /// The (possibly negative) order m + s.
    pub fn order(self, m: u32) -> i64 {
        m as i64 + self.offset()
    }
}

impl std::fmt::Display for Shift {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = self.offset();
        if s < 0 {
            write!(f, "m-{}", -s)
        } else {
            write!(f, "m+{s}")
        }
    }
}

impl std::str::FromStr for Shift {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let off = t
            .strip_prefix('m')
            .and_then(|r| r.parse::<i64>().ok())
            .ok_or_else(|| Error::Parse(format!("shift '{s}', expected m-5 .. m+5")))?;
        Shift::from_offset(off).ok_or_else(|| Error::Parse(format!("unsupported shift '{s}'")))
    }
}

fn guarded_div(num: f64, den: f64, scale: f64, what: &str) -> Result<f64> {
    if den.abs() <= DEGENERACY_TOL * scale {
        return Err(Error::Pole(format!("{what}: denominator {den:e} vanishes")));
    }
    Ok(num / den)
}

/// F_{m+s}(j) at a zero j of J_m, as a rational function of j².
///
/// The forms follow from the three-term recurrence with J_m(j) = 0 and hold
/// for negative m + s as well, since F_{−n} = F_n.
pub fn ratio_closed_form(shift: Shift, m: u32, j: f64) -> Result<f64> {
    let m = m as f64;
    let t = j * j;
    let what = format!("F_{{{shift}}} at m={m}, j={j}");
    match shift {
        Shift::PlusOne => Ok(-(m + 1.0)),
        Shift::MinusOne => Ok(m - 1.0),
        Shift::PlusThree => {
            let a = 4.0 * (m + 2.0) * (m + 1.0);
            Ok(-(m + 3.0) + guarded_div(2.0 * (m + 1.0) * t, a - t, a.abs() + t, &what)?)
        }
        Shift::MinusThree => {
            let a = 4.0 * (m - 2.0) * (m - 1.0);
            Ok((m - 3.0) - guarded_div(2.0 * (m - 1.0) * t, a - t, a.abs() + t, &what)?)
        }
        Shift::PlusFive => {
            let c = 16.0 * (m + 4.0) * (m + 3.0) * (m + 2.0) * (m + 1.0);
            let b = 4.0 * t * (m + 2.0) * (3.0 * m + 9.0);
            let num = t * (8.0 * (m + 3.0) * (m + 2.0) * (m + 1.0) - 4.0 * t * (m + 2.0));
            let den = c - b + t * t;
            Ok(-(m + 5.0) + guarded_div(num, den, c.abs() + b.abs() + t * t, &what)?)
        }
        Shift::MinusFive => {
            let c = 16.0 * (m - 4.0) * (m - 3.0) * (m - 2.0) * (m - 1.0);
            let b = 4.0 * t * (m - 2.0) * (3.0 * m - 9.0);
            let num = t * (8.0 * (m - 3.0) * (m - 2.0) * (m - 1.0) - 4.0 * t * (m - 2.0));
            let den = c - b + t * t;
            Ok((m - 5.0) - guarded_div(num, den, c.abs() + b.abs() + t * t, &what)?)
        }
    }
}

/// The shift whose closed form gives F_n at a zero of J_m, if any.
pub fn closed_form_shift(n: u32, m: u32) -> Option<Shift> {
    let (n, m) = (n as i64, m as i64);
    Shift::from_offset(n - m).or_else(|| Shift::from_offset(-n - m))
}

/// F_n(j) at a zero j of J_m: closed form when one applies, direct otherwise.
/// The flag reports whether the closed form was used.
pub fn log_derivative_at_zero(n: u32, m: u32, j: f64) -> Result<(f64, bool)> {
    match closed_form_shift(n, m) {
        Some(sh) => Ok((ratio_closed_form(sh, m, j)?, true)),
        None => Ok((log_derivative(n, j)?, false)),
    }
}
