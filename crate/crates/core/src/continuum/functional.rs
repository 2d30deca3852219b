use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::sde::LimitPath;
use crate::codec::LatticePath;
use crate::error::{Error, Result};

/// Pointwise transforms of `(Y, Y̲)` that give the scaling limits of the
/// discrete coding paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Functional {
    /// `γ^{1/2} (Y - Y̲)`: Lukaciewicz path of the one-sided cluster.
    #[serde(rename = "lukaciewicz_R")]
    LukaciewiczR,
    /// `γ^{-1/2} (2Y - 3Y̲)`: height function of the one-sided cluster.
    #[serde(rename = "height_R")]
    HeightR,
    /// `2 γ^{-1/2} (Y - 2Y̲)`: height function of one side of the two-sided
    /// cluster, with `Y` solving the half-envelope equation.
    #[serde(rename = "height_side")]
    HeightSide,
}

impl Functional {
    pub fn apply(self, y: f64, ymin: f64, gamma: f64) -> f64 {
        match self {
            Functional::LukaciewiczR => gamma.sqrt() * (y - ymin),
            Functional::HeightR => (2.0 * y - 3.0 * ymin) / gamma.sqrt(),
            Functional::HeightSide => 2.0 * (y - 2.0 * ymin) / gamma.sqrt(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Functional::LukaciewiczR => "lukaciewicz_R",
            Functional::HeightR => "height_R",
            Functional::HeightSide => "height_side",
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "lukaciewicz_r" => Ok(Functional::LukaciewiczR),
            "height_r" => Ok(Functional::HeightR),
            "height_side" => Ok(Functional::HeightSide),
            _ => Err(Error::invalid(format!(
                "unknown functional `{s}` (expected lukaciewicz_R, height_R or height_side)"
            ))),
        }
    }
}

/// The functional evaluated along the whole path, on the same grid.
pub fn limit_functional(path: &LimitPath, which: Functional, gamma: f64) -> Result<LatticePath> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    let values = path
        .y()
        .iter()
        .zip(path.ymin())
        .map(|(&y, &m)| which.apply(y, m, gamma))
        .collect();
    LatticePath::with_step(values, path.dt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuum::sde::Variant;

    fn path() -> LimitPath {
        LimitPath::from_parts(0.5, vec![0.0, 0.4, -0.3, -0.1, -0.6, 0.2], Variant::Full, 1.0).unwrap()
    }

    #[test]
    fn parse_names() {
        for f in [Functional::LukaciewiczR, Functional::HeightR, Functional::HeightSide] {
            assert_eq!(f.name().parse::<Functional>().unwrap(), f);
        }
        assert_eq!("height-r".parse::<Functional>().unwrap(), Functional::HeightR);
        assert!("contour".parse::<Functional>().is_err());
    }

    #[test]
    fn examples() {
        let g = 0.5;
        let p = path();
        let v = limit_functional(&p, Functional::LukaciewiczR, g).unwrap();
        // Y = Y̲ at t = 1.0 and 2.0
        assert_eq!(v.values()[2], 0.0);
        assert_eq!(v.values()[4], 0.0);
        let h = limit_functional(&p, Functional::HeightR, g).unwrap();
        assert!((h.values()[1] - 2.0 * 0.4 / g.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn outputs_are_nonnegative_and_ordered() {
        for g in [0.5, 2.0 / 3.0, 0.9] {
            let p = path();
            let l = limit_functional(&p, Functional::LukaciewiczR, g).unwrap();
            let h = limit_functional(&p, Functional::HeightR, g).unwrap();
            let s = limit_functional(&p, Functional::HeightSide, g).unwrap();
            for i in 0..l.len() {
                assert!(l.values()[i] >= 0.0 && h.values()[i] >= 0.0 && s.values()[i] >= 0.0);
                assert!(h.values()[i] >= l.values()[i] * 2.0 / g - 1e-12);
            }
        }
        assert!(limit_functional(&path(), Functional::HeightR, 0.0).is_err());
    }
}
