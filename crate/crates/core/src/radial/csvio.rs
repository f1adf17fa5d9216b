use std::io::{Read, Write};
use std::sync::Arc;

use super::grid::RadialGrid;
use super::profile::RadialProfile;
use crate::error::{Error, Result};
use crate::numfmt::sig_digits;

/// Raw `(r, value)` rows of a profile file.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileTable {
    pub r: Vec<f64>,
    pub value: Vec<f64>,
}

/// Parse the `r,value` format. Rows must start at `r = 0` and increase strictly.
pub fn read_profile_csv<R: Read>(input: R) -> Result<ProfileTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers().map_err(|e| Error::Csv {
        line: 1,
        message: e.to_string(),
    })?;
    if headers.len() != 2 || &headers[0] != "r" || &headers[1] != "value" {
        return Err(Error::Csv {
            line: 1,
            message: format!("expected header `r,value`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut table = ProfileTable { r: Vec::new(), value: Vec::new() };
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 2 {
            return Err(Error::Csv { line, message: format!("expected 2 fields, found {}", rec.len()) });
        }
        let parse = |s: &str, what: &str| -> Result<f64> {
            let v: f64 = s.parse().map_err(|_| Error::Csv {
                line,
                message: format!("cannot parse {what} `{s}`"),
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Csv { line, message: format!("{what} is not finite") })
            }
        };
        let r = parse(&rec[0], "r")?;
        let v = parse(&rec[1], "value")?;
        match table.r.last() {
            None if r != 0.0 => {
                return Err(Error::Csv { line, message: "first row must have r = 0".into() })
            }
            Some(&prev) if r <= prev => {
                return Err(Error::Csv { line, message: format!("r = {r} does not increase") })
            }
            _ => {}
        }
        table.r.push(r);
        table.value.push(v);
    }
    if table.r.len() < 2 {
        return Err(Error::Csv { line: 1, message: "need at least two rows".into() });
    }
    Ok(table)
}

impl ProfileTable {
    pub fn last_radius(&self) -> f64 {
        *self.r.last().unwrap()
    }

    /// Linear interpolation, zero beyond the last row.
    pub fn eval(&self, r: f64) -> f64 {
        let last = self.last_radius();
        if r > last {
            return 0.0;
        }
        let i = self.r.partition_point(|&x| x <= r).clamp(1, self.r.len() - 1);
        let (a, b) = (self.r[i - 1], self.r[i]);
        let t = (r - a) / (b - a);
        self.value[i - 1] + t * (self.value[i] - self.value[i - 1])
    }

    /// Resample onto `grid`.
    pub fn resample(&self, grid: Arc<RadialGrid>) -> Result<RadialProfile> {
        RadialProfile::from_fn(grid, |r| self.eval(r))
    }
}

/// Write nodal values as `r,value` with 15 significant digits.
pub fn write_profile_csv<W: Write>(out: W, f: &RadialProfile) -> Result<()> {
    write_columns(out, &["r", "value"], &[f.grid().nodes(), f.values()])
}

/// Several equally long columns with a header line.
pub fn write_columns<W: Write>(out: W, header: &[&str], cols: &[&[f64]]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    let rows = cols.first().map_or(0, |c| c.len());
    for i in 0..rows {
        let rec: Vec<String> = cols.iter().map(|c| format_csv(c[i])).collect();
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

fn format_csv(x: f64) -> String {
    let v = sig_digits(x, 15);
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = Arc::new(crate::radial::make_grid(3, 1.0, 16, crate::radial::GridScheme::Uniform).unwrap());
        let f = RadialProfile::from_fn(g.clone(), |r| 1.0 - r * r).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &f).unwrap();
        let t = read_profile_csv(buf.as_slice()).unwrap();
        let back = t.resample(g).unwrap();
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn reports_line_numbers() {
        let text = "r,value\n0,1\n0.5,abc\n";
        match read_profile_csv(text.as_bytes()) {
            Err(Error::Csv { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let text = "r,value\n0,1\n0.5,1\n0.4,0\n";
        assert!(matches!(read_profile_csv(text.as_bytes()), Err(Error::Csv { line: 4, .. })));
        assert!(matches!(read_profile_csv("x,y\n0,1\n".as_bytes()), Err(Error::Csv { line: 1, .. })));
        assert!(matches!(read_profile_csv("r,value\n0.1,1\n1,0\n".as_bytes()), Err(Error::Csv { line: 2, .. })));
    }

    #[test]
    fn zero_beyond_last_row() {
        let t = read_profile_csv("r,value\n0,2\n1,0\n".as_bytes()).unwrap();
        assert_eq!(t.eval(0.5), 1.0);
        assert_eq!(t.eval(1.5), 0.0);
    }
}
