//! Diagnostics CSV: fixed column order, full float64 round-trip formatting.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use ovlab_core::energy::LedgerSample;

use crate::{CliError, Result};

/// Column order of `diagnostics.csv`. The first ten columns are the
/// instantaneous norms; the remaining ones rebuild the energy ledger.
pub const DIAGNOSTICS_COLUMNS: [&str; 17] = [
    "t",
    "u_h1",
    "u_h2",
    "u_h3",
    "u_h4",
    "u_h5",
    "u_h6",
    "tau_h2",
    "tau_h6",
    "sigma_h2",
    "sup_low_cand",
    "int_low_integrand",
    "sup_high_cand",
    "int_high_integrand",
    "e_low",
    "e_high",
    "e_total",
];

/// 17 significant digits: round-trips any finite f64 bit pattern.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sample_row(s: &LedgerSample) -> String {
    let vals = [
        s.t,
        s.u_h[0],
        s.u_h[1],
        s.u_h[2],
        s.u_h[3],
        s.u_h[4],
        s.u_h[5],
        s.tau_h2,
        s.tau_h6,
        s.sigma_h2,
        s.sup_low_cand,
        s.int_low_integrand,
        s.sup_high_cand,
        s.int_high_integrand,
        s.e_low,
        s.e_high,
        s.e_total,
    ];
    let mut row = String::with_capacity(vals.len() * 26);
    for (i, v) in vals.iter().enumerate() {
        if i > 0 {
            row.push(',');
        }
        row.push_str(&fmt_f64(*v));
    }
    row
}

pub fn write_header(w: &mut impl Write) -> Result<()> {
    writeln!(w, "{}", DIAGNOSTICS_COLUMNS.join(",")).map_err(CliError::from)
}

/// Parse a diagnostics CSV back into raw rows.
pub fn read_diagnostics(path: &Path) -> Result<Vec<Vec<f64>>> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::io(format!("cannot open {}: {e}", path.display())))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::io("empty diagnostics file"))??;
    if header != DIAGNOSTICS_COLUMNS.join(",") {
        return Err(CliError::io(format!(
            "unexpected diagnostics header: {header}"
        )));
    }
    let mut rows = Vec::new();
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|f| f.parse::<f64>()).collect();
        let row = row.map_err(|e| CliError::io(format!("bad diagnostics row: {e}")))?;
        if row.len() != DIAGNOSTICS_COLUMNS.len() {
            return Err(CliError::io("diagnostics row has wrong column count"));
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_round_trips() {
        for x in [
            0.0,
            1.0,
            -1.0 / 3.0,
            std::f64::consts::PI * 1e17,
            4.9e-324,
            -2.2250738585072014e-308,
        ] {
            let back: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} did not round trip");
        }
    }
}
