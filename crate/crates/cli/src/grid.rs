use crate::{CliError, CliResult};

/// A `lo:hi:step` range, inclusive of `hi` up to rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|k| self.lo + k as f64 * self.step).collect()
    }
}

impl std::str::FromStr for Range {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || CliError::Config(format!("range `{s}` is not lo:hi:step"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let v: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let r = Range {
            lo: v[0],
            hi: v[1],
            step: v[2],
        };
        if !(r.step > 0.0 && r.hi >= r.lo && r.lo.is_finite() && r.hi.is_finite()) {
            return Err(CliError::Config(format!("range `{s}` needs lo <= hi and step > 0")));
        }
        if (r.hi - r.lo) / r.step > 1e6 {
            return Err(CliError::Config(format!("range `{s}` has more than 1e6 points")));
        }
        Ok(r)
    }
}

/// Geometric grid with `count` points from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_expands() {
        let r: Range = "0.1:0.5:0.1".parse().unwrap();
        let v = r.values();
        assert_eq!(v.len(), 5);
        assert!((v[4] - 0.5).abs() < 1e-12);
        assert!("1:0:0.1".parse::<Range>().is_err());
        assert!("1:2".parse::<Range>().is_err());
        assert!("0:1:0".parse::<Range>().is_err());
    }

    #[test]
    fn log_grid_hits_both_ends() {
        let g = log_grid(0.1, 10.0, 5);
        assert!((g[0] - 0.1).abs() < 1e-15 && (g[4] - 10.0).abs() < 1e-12);
        assert!((g[2] - 1.0).abs() < 1e-12);
    }
}
