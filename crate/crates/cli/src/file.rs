//! The curve file format: a few `key value` header lines, a `columns` line and
//! one whitespace-separated row per grid point, optionally followed by `left`
//! lines giving one-sided limits at jumps.
//!
//! ```text
//! spincurve-curve 1
//! sphere_dim 2
//! kind profile
//! n 4
//! meta family sigma
//! columns v kappa
//! 3.1415926535897931e0 1.7320508075688772e0
//! ...
//! left 2 3.1415926535897931e0 -1.7320508075688772e0
//! ```

use std::fmt::Write as _;
use std::path::Path;

use spincurve::curves::{Grid, SampledCurve, SampledProfile, SphereCurve};

use crate::error::CliError;

const MAGIC: &str = "spincurve-curve 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Columns `v, kappa[, tau]`.
    Profile,
    /// Point coordinates `x1 … x_{dim+1}`.
    Samples,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Profile => "profile",
            Kind::Samples => "samples",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveFile {
    pub sphere_dim: usize,
    pub kind: Kind,
    pub n: usize,
    /// Column-major data, each of length `n + 1`.
    pub columns: Vec<Vec<f64>>,
    pub left_limits: Vec<(usize, Vec<f64>)>,
    pub meta: Vec<(String, String)>,
}

fn column_names(dim: usize, kind: Kind) -> Vec<String> {
    match kind {
        Kind::Profile if dim == 2 => vec!["v".into(), "kappa".into()],
        Kind::Profile => vec!["v".into(), "kappa".into(), "tau".into()],
        Kind::Samples => (1..=dim + 1).map(|i| format!("x{i}")).collect(),
    }
}

fn bad(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{path}: {msg}"))
}

impl CurveFile {
    pub fn from_profile<const C: usize>(p: &SampledProfile<C>) -> Self {
        let grid = p.grid();
        Self {
            sphere_dim: C,
            kind: Kind::Profile,
            n: grid.n(),
            columns: (0..C).map(|c| p.column(c)).collect(),
            left_limits: p.left_limits().map(|(j, v)| (j, v.to_vec())).collect(),
            meta: Vec::new(),
        }
    }

    pub fn from_curve<const M: usize>(c: &SampledCurve<M>) -> Self {
        let grid = c.grid();
        Self {
            sphere_dim: M - 1,
            kind: Kind::Samples,
            n: grid.n(),
            columns: (0..M)
                .map(|k| c.points().iter().map(|x| x[k]).collect())
                .collect(),
            left_limits: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.meta.retain(|(k, _)| k != key);
        self.meta.push((key.into(), value.into()));
        self
    }

    #[cfg(test)]
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Ok(Grid::new(self.n)?)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{MAGIC}");
        let _ = writeln!(s, "sphere_dim {}", self.sphere_dim);
        let _ = writeln!(s, "kind {}", self.kind.name());
        let _ = writeln!(s, "n {}", self.n);
        for (k, v) in &self.meta {
            let _ = writeln!(s, "meta {k} {v}");
        }
        let _ = writeln!(
            s,
            "columns {}",
            column_names(self.sphere_dim, self.kind).join(" ")
        );
        for i in 0..=self.n {
            let row: Vec<String> = self
                .columns
                .iter()
                .map(|c| format!("{:.16e}", c[i]))
                .collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        for (j, v) in &self.left_limits {
            let row: Vec<String> = v.iter().map(|x| format!("{x:.16e}")).collect();
            let _ = writeln!(s, "left {j} {}", row.join(" "));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.render()).map_err(|e| bad(&path.display().to_string(), e))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| bad(&name, e))?;
        Self::parse(&text, &name)
    }

    pub fn parse(text: &str, name: &str) -> Result<Self, CliError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next().map(str::trim) != Some(MAGIC) {
            return Err(bad(name, "not a curve file"));
        }
        let (mut dim, mut kind, mut n) = (None, None, None);
        let mut meta = Vec::new();
        loop {
            let line = lines
                .next()
                .ok_or_else(|| bad(name, "missing columns line"))?;
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            let rest = rest.trim();
            match key {
                "sphere_dim" => dim = Some(rest.parse::<usize>().map_err(|e| bad(name, e))?),
                "kind" => {
                    kind = Some(match rest {
                        "profile" => Kind::Profile,
                        "samples" => Kind::Samples,
                        other => return Err(bad(name, format!("unknown kind {other}"))),
                    })
                }
                "n" => n = Some(rest.parse::<usize>().map_err(|e| bad(name, e))?),
                "meta" => {
                    let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
                    meta.push((k.to_string(), v.trim().to_string()));
                }
                "columns" => break,
                other => return Err(bad(name, format!("unknown header line {other}"))),
            }
        }
        let dim = dim.ok_or_else(|| bad(name, "missing sphere_dim"))?;
        let kind = kind.ok_or_else(|| bad(name, "missing kind"))?;
        let n = n.ok_or_else(|| bad(name, "missing n"))?;
        if dim != 2 && dim != 3 {
            return Err(bad(name, format!("sphere_dim {dim} is not 2 or 3")));
        }
        let width = column_names(dim, kind).len();
        let mut columns = vec![Vec::with_capacity(n + 1); width];
        let numbers = |s: &str| -> Result<Vec<f64>, CliError> {
            s.split_whitespace()
                .map(|x| x.parse::<f64>().map_err(|e| bad(name, format!("{x}: {e}"))))
                .collect()
        };
        for _ in 0..=n {
            let row = numbers(lines.next().ok_or_else(|| bad(name, "too few rows"))?)?;
            if row.len() != width {
                return Err(bad(
                    name,
                    format!("row with {} values, expected {width}", row.len()),
                ));
            }
            for (c, x) in columns.iter_mut().zip(row) {
                c.push(x);
            }
        }
        let mut left_limits = Vec::new();
        for line in lines {
            let rest = line
                .strip_prefix("left ")
                .ok_or_else(|| bad(name, format!("unexpected line {line}")))?;
            let (j, vals) = rest
                .trim()
                .split_once(' ')
                .ok_or_else(|| bad(name, "short left line"))?;
            let j = j.parse::<usize>().map_err(|e| bad(name, e))?;
            let vals = numbers(vals)?;
            if vals.len() != width {
                return Err(bad(name, "left limit of wrong width"));
            }
            left_limits.push((j, vals));
        }
        Ok(Self {
            sphere_dim: dim,
            kind,
            n,
            columns,
            left_limits,
            meta,
        })
    }

    fn profile<const C: usize>(&self) -> Result<SampledProfile<C>, CliError> {
        let grid = self.grid()?;
        let cols: [&[f64]; C] = std::array::from_fn(|c| self.columns[c].as_slice());
        let limits = self
            .left_limits
            .iter()
            .map(|(j, v)| (*j, std::array::from_fn(|c| v[c])))
            .collect();
        Ok(SampledProfile::from_columns(grid, cols)?.with_left_limits(limits)?)
    }

    fn curve<const M: usize>(&self) -> Result<SampledCurve<M>, CliError> {
        let grid = self.grid()?;
        let points = (0..=self.n)
            .map(|i| nalgebra::SVector::<f64, M>::from_fn(|k, _| self.columns[k][i]))
            .collect();
        Ok(SampledCurve::new(grid, points)?)
    }

    fn expect_dim(&self, dim: usize) -> Result<(), CliError> {
        if self.sphere_dim == dim {
            Ok(())
        } else {
            Err(CliError::Precondition(format!(
                "expected a curve on S{dim}, got one on S{}",
                self.sphere_dim
            )))
        }
    }

    /// The `(v, κ)` profile of a curve on S², computed from points if needed.
    pub fn profile2(&self) -> Result<SampledProfile<2>, CliError> {
        self.expect_dim(2)?;
        match self.kind {
            Kind::Profile => self.profile::<2>(),
            Kind::Samples => Ok(self.curve::<3>()?.profile()?),
        }
    }

    /// The `(v, κ, τ)` profile of a curve on S³, computed from points if needed.
    pub fn profile3(&self) -> Result<SampledProfile<3>, CliError> {
        self.expect_dim(3)?;
        match self.kind {
            Kind::Profile => self.profile::<3>(),
            Kind::Samples => Ok(self.curve::<4>()?.profile()?),
        }
    }

    pub fn curve2(&self) -> Result<SampledCurve<3>, CliError> {
        self.expect_dim(2)?;
        match self.kind {
            Kind::Samples => self.curve::<3>(),
            Kind::Profile => Ok(spincurve::frames_ode::curve_from_profile2(
                &self.profile::<2>()?,
                self.grid()?,
            )?
            .0),
        }
    }

    pub fn curve3(&self) -> Result<SampledCurve<4>, CliError> {
        self.expect_dim(3)?;
        match self.kind {
            Kind::Samples => self.curve::<4>(),
            Kind::Profile => Ok(spincurve::frames_ode::curve_from_profile3(
                &self.profile::<3>()?,
                self.grid()?,
            )?
            .0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        let grid = Grid::new(16).unwrap();
        let v: Vec<f64> = (0..=16)
            .map(|i| 1.0 + (i as f64 * 0.37).sin() / 3.0)
            .collect();
        let k: Vec<f64> = (0..=16)
            .map(|i| std::f64::consts::PI * (i as f64).sqrt() - 1e-300)
            .collect();
        let p = SampledProfile::from_columns(grid, [&v, &k])
            .unwrap()
            .with_left_limits(vec![(3, [0.1, -7.0 / 3.0])])
            .unwrap();
        let f = CurveFile::from_profile(&p).with_meta("family", "test curve");
        let g = CurveFile::parse(&f.render(), "mem").unwrap();
        assert_eq!(f, g);
        assert_eq!(g.meta("family"), Some("test curve"));
        let q = g.profile2().unwrap();
        assert_eq!(q.max_diff(&p), 0.0);
        assert_eq!(
            q.left_limits().collect::<Vec<_>>(),
            vec![(3, [0.1, -7.0 / 3.0])]
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(
            CurveFile::parse("hello", "mem"),
            Err(CliError::Io(_))
        ));
        let short = format!("{MAGIC}\nsphere_dim 2\nkind profile\nn 16\ncolumns v kappa\n1 2\n");
        assert!(CurveFile::parse(&short, "mem").is_err());
    }
}
