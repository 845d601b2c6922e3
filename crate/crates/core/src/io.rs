//! CSV and JSON emission. Every CSV has a header row; numbers are written
//! with 17 significant digits so files round-trip bit-exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::charges::ChargeReport;
use crate::error::Result;
use crate::field::SimState;
use crate::stability::StabilityReport;

/// 17-significant-digit decimal form, enough to reconstruct the exact f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Field snapshot: `x,u,phi_1,...,phi_K`, one row per grid point.
pub fn write_snapshot_csv(path: &Path, state: &SimState) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let k = state.xi.k();
    write!(w, "x,u")?;
    for i in 1..=k {
        write!(w, ",phi_{i}")?;
    }
    writeln!(w)?;
    let grid = state.grid();
    for j in 0..grid.n() {
        write!(
            w,
            "{},{}",
            fmt17(grid.points()[j]),
            fmt17(state.u.values()[j])
        )?;
        for c in state.xi.components() {
            write!(w, ",{}", fmt17(c.values()[j]))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Charge time series: `t,H_half_1..K,H_1,V,M,h1_norm,apriori_bound`.
pub fn write_timeseries_csv(path: &Path, reports: &[ChargeReport]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let k = reports.first().map_or(0, |r| r.h_half.len());
    write!(w, "t")?;
    for i in 1..=k {
        write!(w, ",H_half_{i}")?;
    }
    writeln!(w, ",H_1,V,M,h1_norm,apriori_bound")?;
    for r in reports {
        write!(w, "{}", fmt17(r.t))?;
        for h in &r.h_half {
            write!(w, ",{}", fmt17(*h))?;
        }
        writeln!(
            w,
            ",{},{},{},{},{}",
            fmt17(r.h_1),
            fmt17(r.v),
            fmt17(r.m),
            fmt17(r.h1_norm),
            fmt17(r.apriori_bound)
        )?;
    }
    Ok(())
}

/// Stability run:
/// `t,d_I,d_II,dM_direct,dM_form,margin21,margin28,margin33,margin35,margin_1_6`.
pub fn write_stability_csv(path: &Path, report: &StabilityReport) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "t,d_I,d_II,dM_direct,dM_form,margin21,margin28,margin33,margin35,margin_1_6"
    )?;
    for r in &report.records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt17(r.t),
            fmt17(r.d_i),
            fmt17(r.d_ii),
            fmt17(r.dm_direct),
            fmt17(r.dm_form),
            fmt17(r.margin21),
            fmt17(r.margin28),
            fmt17(r.margin33),
            fmt17(r.margin35),
            fmt17(r.margin_one_sixth)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::CliffordField;
    use crate::grid::Grid;
    use crate::SimState;

    #[test]
    fn fmt17_round_trips_exactly() {
        for x in [
            0.0,
            1.0,
            -14.4,
            std::f64::consts::PI,
            1.2345678912345678e-11,
            -9.87e300,
        ] {
            let parsed: f64 = fmt17(x).parse().unwrap();
            assert_eq!(parsed.to_bits(), x.to_bits(), "{x}");
        }
    }

    #[test]
    fn snapshot_has_header_and_all_rows() {
        let g = Grid::new(16, 16.0).unwrap();
        let u = g.field_from_fn(|x| x);
        let s = SimState::new(0.0, u, CliffordField::zeros(&g, 2));
        let path = std::env::temp_dir().join("skdv_snapshot_test.csv");
        write_snapshot_csv(&path, &s).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x,u,phi_1,phi_2");
        assert_eq!(lines.count(), 16);
        std::fs::remove_file(&path).ok();
    }
}
