//! Dirichlet spectrum of the unit disk: λ = j_{m,p}², simple for m = 0 and
//! double otherwise, listed with flat 1-based indices κ.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bessel::{global_table, ZeroTable};
use crate::error::{Error, Result};

pub const MAX_COUNT: usize = 512;

/// Distinct modes closer than this abort the enumeration.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub m: u32,
    pub p: u32,
    pub zero: f64,
    pub multiplicity: u8,
}

impl Mode {
    pub fn is_double(&self) -> bool {
        self.multiplicity == 2
    }
}

/// Which eigenvalue of a (possibly split) disk eigenvalue an index follows.
/// For double modes the smaller index takes the lower branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Simple,
    Lower,
    Upper,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Simple => "simple",
            Branch::Lower => "lower",
            Branch::Upper => "upper",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub kappa: usize,
    pub mode: Mode,
    pub lambda: f64,
    pub branch: Branch,
}

/// Flat row used by the CSV and JSON dumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub kappa: usize,
    pub m: u32,
    pub p: u32,
    pub j: f64,
    pub lambda: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    entries: Vec<SpectrumEntry>,
}

pub fn enumerate_spectrum(count: usize) -> Result<SpectrumTable> {
    enumerate_spectrum_with(global_table(), count)
}

/// The first `count` eigenvalues (with multiplicity) of the unit disk.
///
/// All modes with j_{m,p} ≤ j_{0,P} + 1 are gathered; P grows until they
/// cover `count` indices, so no small zero of a high order can be missed.
pub fn enumerate_spectrum_with(table: &ZeroTable, count: usize) -> Result<SpectrumTable> {
    if count == 0 || count > MAX_COUNT {
        return Err(Error::OutOfRange(format!("count {count} outside 1..={MAX_COUNT}")));
    }
    let mut big_p = 1u32;
    let modes = loop {
        let bound = table.zero(0, big_p)? + 1.0;
        let mut modes = Vec::new();
        let mut m = 0u32;
        loop {
            let mut p = 1u32;
            loop {
                let z = table.zero(m, p)?;
                if z > bound {
                    break;
                }
                modes.push(Mode { m, p, zero: z, multiplicity: if m == 0 { 1 } else { 2 } });
                p += 1;
            }
            if p == 1 {
                break;
            }
            m += 1;
        }
        let covered: usize = modes.iter().map(|md| md.multiplicity as usize).sum();
        if covered >= count {
            break modes;
        }
        big_p += 1;
    };

    let mut modes = modes;
    modes.sort_by(|a, b| a.zero.total_cmp(&b.zero));
    for w in modes.windows(2) {
        if (w[1].zero - w[0].zero).abs() < TIE_TOL {
            return Err(Error::Tie(format!(
                "j_{{{},{}}} = {} and j_{{{},{}}} = {}",
                w[0].m, w[0].p, w[0].zero, w[1].m, w[1].p, w[1].zero
            )));
        }
    }

    let mut entries = Vec::with_capacity(count);
    'outer: for mode in modes {
        let branches: &[Branch] = if mode.is_double() {
            &[Branch::Lower, Branch::Upper]
        } else {
            &[Branch::Simple]
        };
        for &branch in branches {
            if entries.len() == count {
                break 'outer;
            }
            entries.push(SpectrumEntry {
                kappa: entries.len() + 1,
                mode,
                lambda: mode.zero * mode.zero,
                branch,
            });
        }
    }
    Ok(SpectrumTable { entries })
}

impl SpectrumTable {
    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, kappa: usize) -> Result<&SpectrumEntry> {
        if kappa == 0 || kappa > self.entries.len() {
            return Err(Error::OutOfRange(format!(
                "kappa {kappa} outside 1..={}",
                self.entries.len()
            )));
        }
        Ok(&self.entries[kappa - 1])
    }

    pub fn mode_of_index(&self, kappa: usize) -> Result<(Mode, Branch)> {
        let e = self.entry(kappa)?;
        Ok((e.mode, e.branch))
    }

    pub fn indices_of_mode(&self, m: u32, p: u32) -> Result<Vec<usize>> {
        let ks: Vec<usize> = self
            .entries
            .iter()
            .filter(|e| e.mode.m == m && e.mode.p == p)
            .map(|e| e.kappa)
            .collect();
        let want = if m == 0 { 1 } else { 2 };
        if ks.len() != want {
            return Err(Error::OutOfRange(format!(
                "mode ({m},{p}) not fully inside the first {} eigenvalues",
                self.entries.len()
            )));
        }
        Ok(ks)
    }

    pub fn rows(&self) -> Vec<SpectrumRow> {
        self.entries
            .iter()
            .map(|e| SpectrumRow {
                kappa: e.kappa,
                m: e.mode.m,
                p: e.mode.p,
                j: e.mode.zero,
                lambda: e.lambda,
                branch: e.branch,
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        crate::io::rows_to_csv(&self.rows())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.rows())?)
    }
}
