//! Published four-decimal tables of j_{n,p}, j'_{n,p} and of the first
//! eigenvalues of the unit disk, kept verbatim (misprints included) so that
//! computed values can be compared against them.

use serde::Serialize;

use crate::bessel::ZeroTable;
use crate::disk_spectrum::SpectrumTable;
use crate::error::Result;

/// Rows n = 0..=8, columns p = 1..=9.
pub const ZEROS: [[f64; 9]; 9] = [
    [2.4048, 5.5201, 8.6537, 11.7915, 14.9309, 18.0711, 21.2116, 24.3525, 27.4935],
    [3.8317, 7.0156, 10.1735, 13.3237, 16.4706, 19.6159, 22.7601, 25.9037, 29.0468],
    [5.1356, 8.4172, 11.6198, 14.7960, 21.1170, 27.4206, 30.5692, 33.7165, 40.0084],
    [6.3802, 9.7610, 13.0152, 16.2235, 19.4094, 22.5827, 25.7482, 28.9084, 32.0649],
    [7.5883, 11.0647, 14.3725, 17.6160, 20.8269, 24.0190, 27.1991, 30.3710, 33.5371],
    [8.7715, 12.3386, 15.7002, 18.9801, 22.2178, 25.4303, 28.6266, 31.8117, 34.9888],
    [9.9361, 13.5893, 17.0038, 20.3208, 23.5861, 26.8202, 30.0337, 33.2330, 36.4220],
    [11.0864, 14.8213, 18.2876, 21.6415, 24.9349, 28.1912, 31.4228, 34.6371, 37.8387],
    [12.2251, 16.0378, 19.5545, 22.9452, 26.2668, 29.5457, 32.7958, 36.0256, 39.2404],
];

/// Rows n = 0..=13, columns p = 1..=8. Row 0 counts the stationary point at
/// x = 0 as its first entry.
pub const PRIME_ZEROS: [[f64; 8]; 14] = [
    [0.0, 3.8317, 7.0156, 10.1735, 13.3237, 16.4706, 19.6159, 22.7601],
    [1.8411, 5.3314, 8.5363, 11.7060, 14.8635, 18.0155, 21.1643, 24.3113],
    [3.0542, 6.7061, 9.9694, 13.1703, 16.3475, 19.5129, 22.6715, 25.8260],
    [4.2011, 8.0152, 11.3459, 14.5858, 17.7887, 20.9724, 24.1448, 27.3100],
    [5.3175, 9.2823, 12.6819, 15.9641, 19.1960, 22.4010, 21.6415, 28.7678],
    [6.4156, 10.5198, 13.9871, 17.3128, 20.5755, 23.8035, 25.5897, 30.2028],
    [7.5012, 11.7349, 15.2681, 18.6374, 21.9317, 25.1839, 27.0103, 31.6178],
    [8.5778, 12.9323, 16.5293, 19.9418, 23.2680, 26.5450, 29.7907, 33.0151],
    [9.6474, 14.1155, 17.7740, 21.2290, 24.5871, 27.8892, 31.1553, 34.3966],
    [10.7114, 15.2867, 19.0045, 22.5013, 25.8912, 29.2185, 32.5052, 35.7637],
    [11.7709, 16.4479, 20.2230, 23.7607, 27.1820, 30.5345, 33.8420, 37.1180],
    [12.8265, 17.0603, 21.4309, 25.0085, 28.4609, 31.8384, 35.1667, 38.4604],
    [13.8788, 18.7451, 22.6293, 26.2460, 29.7290, 33.1314, 36.4805, 39.7919],
    [14.9284, 19.8832, 23.8194, 27.4743, 30.9874, 34.4145, 37.7844, 41.1135],
];

/// (first κ, m, p) for the eigenvalue listing of the first 104 indices.
/// The entry at κ = 62 repeats (1,5).
pub const SPECTRUM: &[(usize, u32, u32)] = &[
    (1, 0, 1), (2, 1, 1), (4, 2, 1), (6, 0, 2), (7, 3, 1),
    (9, 1, 2), (11, 4, 1), (13, 2, 2), (15, 0, 3), (16, 5, 1),
    (18, 3, 2), (20, 6, 1), (22, 1, 3), (24, 4, 2), (26, 7, 1),
    (28, 2, 3), (30, 0, 4), (31, 8, 1), (33, 5, 2), (35, 3, 3),
    (37, 1, 4), (39, 9, 1), (41, 6, 2), (43, 4, 3), (45, 10, 1),
    (47, 2, 4), (49, 7, 2), (51, 0, 5), (52, 11, 1), (54, 5, 3),
    (56, 8, 2), (58, 3, 4), (60, 1, 5), (62, 1, 5), (64, 12, 1),
    (66, 6, 3), (68, 9, 2), (70, 4, 4), (72, 13, 1), (74, 2, 5),
    (76, 0, 6), (77, 7, 3), (79, 10, 2), (81, 14, 1), (83, 5, 4),
    (85, 3, 5), (87, 8, 3), (89, 1, 6), (91, 11, 2), (93, 15, 1),
    (95, 6, 4), (97, 12, 2), (99, 9, 3), (101, 4, 5), (103, 16, 1),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableMismatch {
    pub table: &'static str,
    pub n: u32,
    pub p: u32,
    pub published: f64,
    pub computed: f64,
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

/// Entries of the two zero tables that disagree with the computed value
/// rounded to four decimals. Row 0 of the J′ table is compared in its own
/// convention (stationary point at the origin first).
pub fn zero_table_mismatches(table: &ZeroTable) -> Result<Vec<TableMismatch>> {
    let mut out = Vec::new();
    for (n, row) in ZEROS.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            let c = table.zero(n as u32, i as u32 + 1)?;
            if (round4(c) - v).abs() > 1.5e-4 {
                out.push(TableMismatch { table: "zeros", n: n as u32, p: i as u32 + 1, published: v, computed: c });
            }
        }
    }
    for (n, row) in PRIME_ZEROS.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            let p = i as u32 + 1;
            let c = if n == 0 {
                if p == 1 { 0.0 } else { table.prime_zero(0, p - 1)? }
            } else {
                table.prime_zero(n as u32, p)?
            };
            if (round4(c) - v).abs() > 1.5e-4 {
                out.push(TableMismatch { table: "prime_zeros", n: n as u32, p, published: v, computed: c });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumMismatch {
    pub kappa: usize,
    pub published: (u32, u32),
    pub computed: (u32, u32),
}

/// Published spectrum entries whose starting index maps to a different mode
/// in `spectrum`. Entries beyond the table's length are skipped.
pub fn spectrum_mismatches(spectrum: &SpectrumTable) -> Vec<SpectrumMismatch> {
    SPECTRUM
        .iter()
        .filter(|&&(k, _, _)| k <= spectrum.len())
        .filter_map(|&(k, m, p)| {
            let e = &spectrum.entries()[k - 1];
            let got = (e.mode.m, e.mode.p);
            (got != (m, p)).then_some(SpectrumMismatch { kappa: k, published: (m, p), computed: got })
        })
        .collect()
}
