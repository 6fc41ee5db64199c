//! JSON fan files (`"schema": 1`).
//!
//! ```json
//! { "schema": 1, "rank": 2, "rays": [[1,0],[0,1],[-1,-1]],
//!   "multiplicities": [1,1,1],
//!   "maximal": [{"verts": [0,1], "wplus": 1, "wminus": 0}, ...],
//!   "divisor": ["1","1","1"] }
//! ```
//!
//! Integers may be JSON numbers or decimal strings; rationals are `"p/q"`
//! strings.  A non-simplicial fan adds `"faces"`, the vertex sets of all
//! of its faces.

use crate::arith::{format_rational, parse_rational, Q, Z};
use crate::error::{Error, Result};
use crate::multifan::{EdgeVectors, GeneralFan, MaximalCone, MultiFan};
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::Path;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Int {
    Num(i64),
    Str(String),
}

impl Int {
    fn value(&self) -> std::result::Result<Z, String> {
        match self {
            Int::Num(n) => Ok(Z::from(*n)),
            Int::Str(s) => s.trim().parse().map_err(|_| format!("not an integer: {s:?}")),
        }
    }

    fn from_z(x: &Z) -> Self {
        match x.to_i64() {
            Some(n) => Int::Num(n),
            None => Int::Str(x.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConeJson {
    verts: Vec<usize>,
    #[serde(default = "one")]
    wplus: i64,
    #[serde(default)]
    wminus: i64,
}

fn one() -> i64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FanJson {
    schema: u32,
    rank: usize,
    rays: Vec<Vec<Int>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    multiplicities: Option<Vec<Int>>,
    maximal: Vec<ConeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    divisor: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    faces: Option<Vec<Vec<usize>>>,
}

/// Contents of a fan file.
#[derive(Debug, Clone, PartialEq)]
pub struct FanFile {
    pub rank: usize,
    pub rays: Vec<Vec<Z>>,
    pub multiplicities: Vec<Z>,
    pub maximal: Vec<MaximalCone>,
    pub divisor: Option<Vec<Q>>,
    /// Present only for non-simplicial fans.
    pub faces: Option<BTreeSet<Vec<usize>>>,
}

fn schema_err(msg: impl Into<String>) -> Error {
    Error::InvalidInput(format!("schema: {}", msg.into()))
}

impl FanFile {
    pub fn from_multifan(fan: &MultiFan, edges: &EdgeVectors, divisor: Option<&[Q]>) -> Self {
        FanFile {
            rank: fan.rank,
            rays: fan.rays.clone(),
            multiplicities: edges.mult.clone(),
            maximal: fan.maximal.clone(),
            divisor: divisor.map(|d| d.to_vec()),
            faces: None,
        }
    }

    pub fn is_simplicial(&self) -> bool {
        self.faces.is_none()
    }

    pub fn multifan(&self) -> Result<MultiFan> {
        if self.faces.is_some() {
            return Err(Error::NotSimplicial("fan file lists faces; read it as a general fan".into()));
        }
        Ok(MultiFan::from_maximal(self.rank, self.rays.clone(), self.maximal.clone()))
    }

    pub fn edges(&self) -> EdgeVectors {
        EdgeVectors { mult: self.multiplicities.clone() }
    }

    pub fn general_fan(&self) -> GeneralFan {
        GeneralFan { rank: self.rank, rays: self.rays.clone(), cones: self.maximal.clone() }
    }

    /// Sorted vertex lists; faces sorted and closed under the empty face.
    pub fn canonicalize(&mut self) {
        for c in &mut self.maximal {
            c.verts.sort_unstable();
        }
        if let Some(f) = &self.faces {
            let mut f: BTreeSet<Vec<usize>> = f
                .iter()
                .map(|s| {
                    let mut s = s.clone();
                    s.sort_unstable();
                    s
                })
                .collect();
            f.insert(Vec::new());
            self.faces = Some(f);
        }
    }

    fn from_json(j: FanJson) -> Result<Self> {
        if j.schema != SCHEMA {
            return Err(schema_err(format!("unsupported schema version {} (expected {SCHEMA})", j.schema)));
        }
        let m = j.rays.len();
        let mut rays = Vec::with_capacity(m);
        for (i, r) in j.rays.iter().enumerate() {
            if r.len() != j.rank {
                return Err(schema_err(format!("ray {i} has {} entries, rank is {}", r.len(), j.rank)));
            }
            rays.push(r.iter().map(Int::value).collect::<std::result::Result<Vec<Z>, _>>().map_err(schema_err)?);
        }
        let multiplicities = match &j.multiplicities {
            None => vec![Z::from(1); m],
            Some(c) => {
                if c.len() != m {
                    return Err(schema_err(format!("{} multiplicities for {m} rays", c.len())));
                }
                let c = c.iter().map(Int::value).collect::<std::result::Result<Vec<Z>, _>>().map_err(schema_err)?;
                if let Some(bad) = c.iter().position(|x| !x.is_positive()) {
                    return Err(schema_err(format!("multiplicity {bad} must be positive")));
                }
                c
            }
        };
        let mut maximal = Vec::with_capacity(j.maximal.len());
        for (k, c) in j.maximal.iter().enumerate() {
            if let Some(&bad) = c.verts.iter().find(|&&i| i >= m) {
                return Err(schema_err(format!("maximal cone {k} refers to ray {bad}, only {m} rays")));
            }
            maximal.push(MaximalCone::new(c.verts.clone(), c.wplus, c.wminus));
        }
        let divisor = match &j.divisor {
            None => None,
            Some(d) => {
                if d.len() != m {
                    return Err(schema_err(format!("{} divisor coefficients for {m} rays", d.len())));
                }
                let d = d
                    .iter()
                    .map(|s| parse_rational(s).ok_or_else(|| schema_err(format!("not a rational: {s:?}"))))
                    .collect::<Result<Vec<Q>>>()?;
                Some(d)
            }
        };
        let faces = j.faces.map(|f| f.into_iter().collect());
        let mut out = FanFile { rank: j.rank, rays, multiplicities, maximal, divisor, faces };
        out.canonicalize();
        Ok(out)
    }

    fn to_json(&self) -> FanJson {
        FanJson {
            schema: SCHEMA,
            rank: self.rank,
            rays: self.rays.iter().map(|r| r.iter().map(Int::from_z).collect()).collect(),
            multiplicities: Some(self.multiplicities.iter().map(Int::from_z).collect()),
            maximal: self
                .maximal
                .iter()
                .map(|c| ConeJson { verts: c.verts.clone(), wplus: c.wplus, wminus: c.wminus })
                .collect(),
            divisor: self.divisor.as_ref().map(|d| d.iter().map(format_rational).collect()),
            faces: self.faces.as_ref().map(|f| f.iter().cloned().collect()),
        }
    }
}

/// Parses a fan file; errors carry line and column.
pub fn parse(text: &str) -> Result<FanFile> {
    let j: FanJson = serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
    FanFile::from_json(j)
}

pub fn read(path: &Path) -> Result<FanFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        Error::InvalidInput(m) => Error::InvalidInput(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Canonical text: two-space indentation, fixed key order, trailing newline.
pub fn to_string(f: &FanFile) -> String {
    let mut c = f.clone();
    c.canonicalize();
    let mut s = serde_json::to_string_pretty(&c.to_json()).expect("fan serializes");
    s.push('\n');
    s
}

pub fn write(path: &Path, f: &FanFile) -> Result<()> {
    std::fs::write(path, to_string(f)).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qf;
    use crate::multifan::projective;

    const P2: &str = r#"{"schema":1,"rank":2,"rays":[[1,0],[0,1],[-1,-1]],
        "maximal":[{"verts":[1,0]},{"verts":[1,2]},{"verts":[0,2]}],"divisor":["1","3/2","-1"]}"#;

    #[test]
    fn round_trip_is_identity() {
        let f = parse(P2).unwrap();
        assert_eq!(f.maximal[0].verts, vec![0, 1]);
        assert_eq!(f.divisor.as_ref().unwrap()[1], qf(3, 2));
        let s = to_string(&f);
        let g = parse(&s).unwrap();
        assert_eq!(f, g);
        assert_eq!(s, to_string(&g));
        let (a, b) = (g.multifan().unwrap(), projective(2));
        assert_eq!((a.rays, a.simplices), (b.rays, b.simplices));
    }

    #[test]
    fn big_integers_as_strings() {
        let t = r#"{"schema":1,"rank":1,"rays":[["123456789012345678901234567890"],[-1]],"maximal":[{"verts":[0]},{"verts":[1]}]}"#;
        let f = parse(t).unwrap();
        assert_eq!(f.rays[0][0].to_string(), "123456789012345678901234567890");
        assert!(to_string(&f).contains("\"123456789012345678901234567890\""));
    }

    #[test]
    fn unknown_field_named() {
        let t = P2.replace("\"rank\"", "\"colour\":3,\"rank\"");
        let e = parse(&t).unwrap_err().to_string();
        assert!(e.contains("colour") && e.contains("line"), "{e}");
    }

    #[test]
    fn malformed_json_has_location() {
        let e = parse("{\"schema\":1,\n \"rank\": }").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
    }

    #[test]
    fn schema_violations() {
        for bad in [
            P2.replace("\"schema\":1", "\"schema\":2"),
            P2.replace("[-1,-1]", "[-1]"),
            P2.replace("[0,2]", "[0,5]"),
            P2.replace("\"3/2\"", "\"x\""),
            P2.replace("\"-1\"]", "\"-1\",\"2\"]"),
        ] {
            assert!(parse(&bad).is_err(), "{bad}");
        }
    }
}
