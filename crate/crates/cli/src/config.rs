//! Curve selection, place selectors and degree windows.

use std::path::Path;
use std::str::FromStr;

use hecke_core::{Curve, Place};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A curve y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over F_{p^e}, with
/// coefficients encoded as integers in base p (the class of t is p).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub name: String,
    pub p: u32,
    #[serde(default = "one")]
    pub e: u32,
    pub a: [u32; 5],
    #[serde(default)]
    pub base: Option<[u32; 2]>,
}

fn one() -> u32 {
    1
}

impl CurveSpec {
    pub fn of(curve: &Curve) -> CurveSpec {
        CurveSpec {
            name: curve.name().to_string(),
            p: curve.p(),
            e: curve.tower().e(),
            a: curve.coefficients(),
            base: curve.base_point(1).coords.map(|(x, y)| [x, y]),
        }
    }

    pub fn build(&self) -> Result<Curve, CliError> {
        Ok(Curve::new(&self.name, self.p, self.e, self.a, self.base.map(|[x, y]| (x, y)))?)
    }
}

/// A built-in curve name, or a path to a TOML or JSON curve description.
pub fn load_curve(selector: &str) -> Result<Curve, CliError> {
    if Curve::NAMED.contains(&selector) {
        return Ok(Curve::named(selector)?);
    }
    let path = Path::new(selector);
    if !path.exists() {
        return Err(CliError::Config(format!(
            "'{selector}' is neither a built-in curve ({}) nor a file",
            Curve::NAMED.join(", ")
        )));
    }
    let text = std::fs::read_to_string(path)?;
    let spec: CurveSpec = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{selector}: {e}")))?
    } else {
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{selector}: {e}")))?
    };
    spec.build()
}

/// `degD:I` picks the I-th place of degree D in the curve's place order;
/// anything else is parsed as an explicit place such as `1:inf`.
pub fn select_place(curve: &Curve, selector: &str) -> Result<Place, CliError> {
    if let Some(rest) = selector.strip_prefix("deg") {
        let bad = || CliError::Config(format!("malformed place selector '{selector}'"));
        let (d, i) = rest.split_once(':').ok_or_else(bad)?;
        let d: u32 = d.parse().map_err(|_| bad())?;
        let i: usize = i.parse().map_err(|_| bad())?;
        let places = curve.places(d)?;
        return places.get(i).map(|p| p.place).ok_or_else(|| {
            CliError::Config(format!("{} has {} places of degree {d}, index {i} is out of range", curve.name(), places.len()))
        });
    }
    let place = Place::from_str(selector)?;
    curve.place_info(&place)?;
    Ok(place)
}

/// A nonempty degree window `lo..hi`, both ends included.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: i32,
    pub hi: i32,
}

impl FromStr for Window {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Window, CliError> {
        let bad = || CliError::Config(format!("malformed window '{s}', expected lo..hi"));
        let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
        let lo: i32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: i32 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(CliError::Config(format!("empty window {s}")));
        }
        Ok(Window { lo, hi })
    }
}
