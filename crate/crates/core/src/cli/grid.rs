use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform inclusive grid `min:max:count`; a bare number is a one-point grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn point(v: f64) -> Self {
        Grid { min: v, max: v, count: 1 }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => vec![],
            1 => vec![self.min],
            n => (0..n)
                .map(|i| {
                    if i == n - 1 {
                        self.max
                    } else {
                        self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::invalid(format!("bad number '{t}' in grid '{s}'")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => Ok(Grid::point(num(v)?)),
            [a, b, n] => {
                let count: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad count '{n}' in grid '{s}'")))?;
                if count == 0 {
                    return Err(Error::invalid(format!("grid '{s}' has no points")));
                }
                let (min, max) = (num(a)?, num(b)?);
                if count > 1 && max < min {
                    return Err(Error::invalid(format!("grid '{s}' is decreasing")));
                }
                Ok(Grid { min, max, count })
            }
            _ => Err(Error::invalid(format!("grid '{s}' is not min:max:count"))),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.count == 1 && self.min == self.max {
            write!(f, "{}", self.min)
        } else {
            write!(f, "{}:{}:{}", self.min, self.max, self.count)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_endpoints() {
        let g: Grid = "-8:8:161".parse().unwrap();
        let v = g.values();
        assert_eq!(v.len(), 161);
        assert_eq!(v[0], -8.0);
        assert_eq!(v[160], 8.0);
        assert_eq!(v[80], 0.0);
        assert_eq!("2.5".parse::<Grid>().unwrap().values(), vec![2.5]);
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "1:2", "1:2:0", "a:2:3", "3:1:4", "1:2:3:4", "nan"] {
            assert!(s.parse::<Grid>().is_err(), "{s}");
        }
    }
}
