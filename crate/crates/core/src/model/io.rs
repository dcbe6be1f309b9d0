//! Two-column density text format: one `r rho` pair per line, whitespace
//! separated, radii strictly ascending. Blank lines and lines starting with
//! `#` are ignored.

use super::{RadialDensity, RadialGrid};
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::sync::Arc;

/// Parsed columns of a density file.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

/// Parses the two-column format. Rejects non-monotone radii, non-positive
/// radii, negative or non-finite densities and malformed lines.
pub fn parse_density_table(text: &str) -> Result<DensityTable> {
    let mut radii = Vec::new();
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace();
        let (Some(r_txt), Some(rho_txt), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(Error::Parse {
                line: line_no,
                detail: format!("expected two columns \"r rho\", got {line:?}"),
            });
        };
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line: line_no,
                detail: format!("{what} {s:?}: {e}"),
            })
        };
        let r = parse(r_txt, "radius")?;
        let rho = parse(rho_txt, "density")?;
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Parse {
                line: line_no,
                detail: format!("radius must be positive and finite, got {r}"),
            });
        }
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(Error::Parse {
                line: line_no,
                detail: format!("density must be nonnegative and finite, got {rho}"),
            });
        }
        if let Some(&prev) = radii.last() {
            if r <= prev {
                return Err(Error::Parse {
                    line: line_no,
                    detail: format!("radii must be strictly ascending ({r} after {prev})"),
                });
            }
        }
        radii.push(r);
        values.push(rho);
    }
    if radii.is_empty() {
        return Err(Error::Parse {
            line: 0,
            detail: "no data rows".into(),
        });
    }
    Ok(DensityTable { radii, values })
}

/// Parses the format into a density on the file's own nodes.
pub fn parse_density(text: &str) -> Result<RadialDensity> {
    let table = parse_density_table(text)?;
    let grid = Arc::new(RadialGrid::from_nodes(table.radii)?);
    RadialDensity::new(grid, table.values)
}

/// Writes the format; values use shortest round-trip formatting.
pub fn format_density(rho: &RadialDensity, header: &str) -> String {
    let mut out = String::new();
    for line in header.lines() {
        let _ = writeln!(out, "# {line}");
    }
    for (r, v) in rho.grid().nodes().iter().zip(rho.values()) {
        let _ = writeln!(out, "{r:e} {v:e}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let text = "# r rho\n\n0.1 1.0\n  0.2\t0.5  \n# mid comment\n0.4 0.25\n";
        let t = parse_density_table(text).unwrap();
        assert_eq!(t.radii, vec![0.1, 0.2, 0.4]);
        assert_eq!(t.values, vec![1.0, 0.5, 0.25]);
    }

    #[test]
    fn rejects_nonmonotone_radii_with_line_number() {
        let err = parse_density_table("0.1 1\n0.3 1\n0.2 1\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                detail: "radii must be strictly ascending (0.2 after 0.3)".into()
            }
        );
        assert!(parse_density_table("0.1 1\n0.1 1\n").is_err());
    }

    #[test]
    fn rejects_malformed_rows() {
        for bad in ["0.1", "0.1 1 2", "a 1", "0.1 b", "-1 1", "0 1", "0.1 -2", "0.1 nan", "inf 1", ""] {
            assert!(parse_density_table(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn density_needs_three_rows() {
        assert!(matches!(parse_density("0.1 1\n0.2 1\n"), Err(Error::Grid(_))));
    }

    #[test]
    fn format_then_parse_is_identity() {
        let grid = Arc::new(RadialGrid::log_spaced(1e-3, 20.0, 50).unwrap());
        let rho = RadialDensity::exponential(grid, 1.0, 2.0).unwrap();
        let back = parse_density(&format_density(&rho, "test\nsecond line")).unwrap();
        assert_eq!(back.values(), rho.values());
        assert_eq!(back.grid().nodes(), rho.grid().nodes());
    }
}
