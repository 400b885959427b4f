//! Grid and range syntax for the free variables of a table.

use std::str::FromStr;

/// `start:stop:count[:log]`, or a single number for a one-point grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i + 1 == self.count {
                    return self.stop;
                }
                let u = i as f64 / last;
                if self.log {
                    (self.start.ln() + u * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + u * (self.stop - self.start)
                }
            })
            .collect()
    }
}

fn number(s: &str, what: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("{what} '{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{what} '{s}' is not finite"))
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let g = match parts.as_slice() {
            [v] => {
                let v = number(v, "value")?;
                Grid {
                    start: v,
                    stop: v,
                    count: 1,
                    log: false,
                }
            }
            [a, b, n] | [a, b, n, _] => {
                let count: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| format!("count '{n}' is not a non-negative integer"))?;
                let log = match parts.get(3).map(|m| m.trim()) {
                    None | Some("lin") => false,
                    Some("log") => true,
                    Some(m) => return Err(format!("spacing '{m}' must be 'log' or 'lin'")),
                };
                let g = Grid {
                    start: number(a, "start")?,
                    stop: number(b, "stop")?,
                    count,
                    log,
                };
                if g.count < 1 {
                    return Err("grid count must be at least 1".into());
                }
                if !(g.start < g.stop) {
                    return Err(format!("grid start {} must be below stop {}", g.start, g.stop));
                }
                if g.log && !(g.start > 0.0) {
                    return Err(format!("log spacing needs start > 0, got {}", g.start));
                }
                g
            }
            _ => return Err(format!("'{s}' is not of the form start:stop:count[:log]")),
        };
        Ok(g)
    }
}

/// Inclusive integer range `a:b`, or a single integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Range {
    pub start: u64,
    pub stop: u64,
}

impl Range {
    pub fn points(&self) -> impl Iterator<Item = u64> {
        self.start..=self.stop
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let int = |v: &str| -> Result<u64, String> {
            v.trim()
                .parse()
                .map_err(|_| format!("'{v}' is not a non-negative integer"))
        };
        let r = match s.split(':').collect::<Vec<_>>().as_slice() {
            [v] => {
                let v = int(v)?;
                Range { start: v, stop: v }
            }
            [a, b] => Range {
                start: int(a)?,
                stop: int(b)?,
            },
            _ => return Err(format!("'{s}' is not of the form start:stop")),
        };
        if r.start > r.stop {
            return Err(format!("range start {} exceeds stop {}", r.start, r.stop));
        }
        Ok(r)
    }
}
