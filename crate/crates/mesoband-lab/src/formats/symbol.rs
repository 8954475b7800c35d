//! Symbol grids of `S` as CSV: one row per mode, columns `p1..pd, lambda`.

use crate::error::Result;
use mesoband::lattice::VarianceOperator;
use std::io::Write;

pub fn write_symbol_csv<W: Write>(op: &VarianceOperator, out: W) -> Result<()> {
    let d = op.geometry().dim();
    let mut wtr = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=d).map(|i| format!("p{i}")).collect();
    header.push("lambda".into());
    wtr.write_record(&header)?;
    let mut p = vec![0i64; d];
    for (q, lam) in op.symbol().iter().enumerate() {
        op.mode(q, &mut p);
        let mut row: Vec<String> = p.iter().map(|c| c.to_string()).collect();
        row.push(format!("{lam:.17e}"));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use mesoband::lattice::TorusGeometry;

    #[test]
    fn rows_and_zero_mode() {
        let g = TorusGeometry::step(2, 8, 2).unwrap();
        let op = VarianceOperator::new(&g).unwrap();
        let mut buf = Vec::new();
        write_symbol_csv(&op, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 65);
        assert_eq!(lines[0], "p1,p2,lambda");
        let zero: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(zero, g.iota());
    }
}
