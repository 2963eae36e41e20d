//! CSV emission with fixed, documented column orders and 17-significant-digit
//! floats (`{:.16e}`), so identical runs produce byte-identical files and
//! values round-trip exactly through text.

use std::fmt::Write as _;

/// One float, 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV builder: header once, then rows of floats (with optional trailing
/// string cells for tags).
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(columns: &[String]) -> Self {
        Self {
            buf: format!("{}\n", columns.join(",")),
        }
    }

    pub fn row(&mut self, values: &[f64]) {
        self.row_tagged(values, &[]);
    }

    pub fn row_tagged(&mut self, values: &[f64], tags: &[&str]) {
        let mut first = true;
        for v in values {
            if !first {
                self.buf.push(',');
            }
            let _ = write!(self.buf, "{v:.16e}");
            first = false;
        }
        for t in tags {
            if !first {
                self.buf.push(',');
            }
            self.buf.push_str(t);
            first = false;
        }
        self.buf.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf.into_bytes()
    }
}

/// Column names for full-mode trajectories:
/// `t, g_0_0 … g_{n-1}_{n-1} (row-major), om_0_1 … (upper triangle in pair
/// order (0,1), (0,2), …, (1,2), …), H, P, maxres`.
pub fn full_columns(n: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    for i in 0..n {
        for j in 0..n {
            cols.push(format!("g_{i}_{j}"));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            cols.push(format!("om_{i}_{j}"));
        }
    }
    cols.extend(["H", "P", "maxres"].map(String::from));
    cols
}

/// Column names for reduced-mode trajectories:
/// `t, q_0 … q_{n-1}, p_0 … p_{n-1}, H, P, mu`.
pub fn reduced_columns(n: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    for i in 0..n {
        cols.push(format!("q_{i}"));
    }
    for i in 0..n {
        cols.push(format!("p_{i}"));
    }
    cols.extend(["H", "P", "mu"].map(String::from));
    cols
}

/// Column names for cylindrical-cone trajectories: `t, A, B, P, D, H, F`.
pub fn cyl_columns() -> Vec<String> {
    ["t", "A", "B", "P", "D", "H", "F"].map(String::from).to_vec()
}

/// Column names for axisymmetric-canoe trajectories:
/// `t, q1, p1, P, H, stratum`.
pub fn axi_columns() -> Vec<String> {
    ["t", "q1", "p1", "P", "H", "stratum"]
        .map(String::from)
        .to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_are_emitted_with_17_significant_digits() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.5), "-5.0000000000000000e-1");
        // round trip is exact
        let x = core::f64::consts::PI * 1e-7;
        let s = fmt_f64(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_rows_join_floats_and_tags() {
        let mut csv = Csv::new(&cyl_columns());
        csv.row_tagged(&[0.0, 0.5], &["S3"]);
        let text = String::from_utf8(csv.into_bytes()).unwrap();
        assert_eq!(
            text,
            "t,A,B,P,D,H,F\n0.0000000000000000e0,5.0000000000000000e-1,S3\n"
        );
    }

    #[test]
    fn full_columns_cover_attitude_and_velocity() {
        let cols = full_columns(3);
        assert_eq!(cols.len(), 1 + 9 + 3 + 3);
        assert_eq!(cols[1], "g_0_0");
        assert_eq!(cols[10], "om_0_1");
        assert_eq!(cols.last().unwrap(), "maxres");
    }
}
