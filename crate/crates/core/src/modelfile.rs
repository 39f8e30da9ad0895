//! TOML model files. Coordinates are exact rationals written as `"p/q"`
//! strings, angles are `"m/n"` multiples of pi.

use crate::exactgeom::{self as eg, RatAngle, RatVec2, Q};
use crate::windtree::{self, Obstacle, WindTreeError, WindTreeModel};
use serde::{Deserialize, Serialize};
use std::ops::Range;
use thiserror::Error;
use toml::Spanned;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelFileError {
    #[error("{line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error(transparent)]
    Semantic(#[from] WindTreeError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingParams {
    pub xi: Option<RatAngle>,
    pub scale: Option<Q>,
    pub anchor: Option<RatVec2>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationParams {
    pub directions: usize,
    pub budget: usize,
    pub seed: u64,
}

impl Default for SimulationParams {
    fn default() -> Self {
        SimulationParams { directions: 100, budget: 100_000, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelFile {
    pub lattice: [RatVec2; 2],
    pub domain: Vec<RatVec2>,
    pub pairing: Vec<(usize, usize)>,
    pub obstacles: Vec<Obstacle>,
    pub embedding: Option<EmbeddingParams>,
    pub simulation: Option<SimulationParams>,
}

type SPoint = [Spanned<String>; 2];

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    tau1: SPoint,
    tau2: SPoint,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    vertices: Vec<SPoint>,
    pairing: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObstacle {
    vertices: Spanned<Vec<SPoint>>,
    edge_angles: Vec<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEmbedding {
    xi: Option<Spanned<String>>,
    scale: Option<Spanned<String>>,
    anchor: Option<SPoint>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    directions: Option<usize>,
    budget: Option<usize>,
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    lattice: RawLattice,
    domain: RawDomain,
    #[serde(default)]
    obstacles: Vec<RawObstacle>,
    embedding: Option<RawEmbedding>,
    simulation: Option<RawSimulation>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn err(&self, span: Range<usize>, message: impl Into<String>) -> ModelFileError {
        let (line, col) = line_col(self.text, span.start);
        ModelFileError::Parse { line, col, message: message.into() }
    }

    fn q(&self, s: &Spanned<String>) -> Result<Q, ModelFileError> {
        eg::parse_q(s.get_ref()).ok_or_else(|| self.err(s.span(), format!("`{}` is not an exact rational", s.get_ref())))
    }

    fn point(&self, p: &SPoint) -> Result<RatVec2, ModelFileError> {
        Ok(RatVec2::new(self.q(&p[0])?, self.q(&p[1])?))
    }

    fn angle(&self, s: &Spanned<String>) -> Result<RatAngle, ModelFileError> {
        let v = self.q(s)?;
        let (n, d) = (i64::try_from(v.numer()), i64::try_from(v.denom()));
        match (n, d) {
            (Ok(n), Ok(d)) => Ok(RatAngle::new(n, d)),
            _ => Err(self.err(s.span(), "angle out of range")),
        }
    }
}

pub fn parse_model(text: &str) -> Result<ModelFile, ModelFileError> {
    let raw: RawModel = toml::from_str(text).map_err(|e| {
        let (line, col) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        ModelFileError::Parse { line, col, message: e.message().to_string() }
    })?;
    let c = Ctx { text };
    let lattice = [c.point(&raw.lattice.tau1)?, c.point(&raw.lattice.tau2)?];
    let domain = raw.domain.vertices.iter().map(|p| c.point(p)).collect::<Result<Vec<_>, _>>()?;
    let mut obstacles = Vec::new();
    for o in &raw.obstacles {
        let v = o.vertices.get_ref().iter().map(|p| c.point(p)).collect::<Result<Vec<_>, _>>()?;
        let a = o.edge_angles.iter().map(|s| c.angle(s)).collect::<Result<Vec<_>, _>>()?;
        if v.len() != a.len() {
            return Err(c.err(o.vertices.span(), format!("{} vertices but {} edge angles", v.len(), a.len())));
        }
        obstacles.push(Obstacle::new(v, a));
    }
    let embedding = match &raw.embedding {
        Some(e) => Some(EmbeddingParams {
            xi: e.xi.as_ref().map(|s| c.angle(s)).transpose()?,
            scale: e.scale.as_ref().map(|s| c.q(s)).transpose()?,
            anchor: e.anchor.as_ref().map(|p| c.point(p)).transpose()?,
        }),
        None => None,
    };
    let simulation = raw.simulation.map(|s| {
        let d = SimulationParams::default();
        SimulationParams {
            directions: s.directions.unwrap_or(d.directions),
            budget: s.budget.unwrap_or(d.budget),
            seed: s.seed.unwrap_or(d.seed),
        }
    });
    Ok(ModelFile { lattice, domain, pairing: raw.domain.pairing, obstacles, embedding, simulation })
}

#[derive(Serialize)]
struct OutLattice {
    tau1: [String; 2],
    tau2: [String; 2],
}

#[derive(Serialize)]
struct OutDomain {
    vertices: Vec<[String; 2]>,
    pairing: Vec<(usize, usize)>,
}

#[derive(Serialize)]
struct OutObstacle {
    vertices: Vec<[String; 2]>,
    edge_angles: Vec<String>,
}

#[derive(Serialize)]
struct OutEmbedding {
    #[serde(skip_serializing_if = "Option::is_none")]
    xi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    anchor: Option<[String; 2]>,
}

#[derive(Serialize)]
struct OutSimulation {
    directions: usize,
    budget: usize,
    seed: u64,
}

#[derive(Serialize)]
struct OutModel {
    lattice: OutLattice,
    domain: OutDomain,
    obstacles: Vec<OutObstacle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    embedding: Option<OutEmbedding>,
    #[serde(skip_serializing_if = "Option::is_none")]
    simulation: Option<OutSimulation>,
}

fn out_point(v: &RatVec2) -> [String; 2] {
    [eg::format_q(&v.x), eg::format_q(&v.y)]
}

pub fn serialize_model(m: &ModelFile) -> String {
    let out = OutModel {
        lattice: OutLattice { tau1: out_point(&m.lattice[0]), tau2: out_point(&m.lattice[1]) },
        domain: OutDomain { vertices: m.domain.iter().map(out_point).collect(), pairing: m.pairing.clone() },
        obstacles: m
            .obstacles
            .iter()
            .map(|o| OutObstacle {
                vertices: o.vertices.iter().map(out_point).collect(),
                edge_angles: o.angles.iter().map(|a| a.to_string()).collect(),
            })
            .collect(),
        embedding: m.embedding.as_ref().map(|e| OutEmbedding {
            xi: e.xi.map(|a| a.to_string()),
            scale: e.scale.as_ref().map(eg::format_q),
            anchor: e.anchor.as_ref().map(out_point),
        }),
        simulation: m.simulation.as_ref().map(|s| OutSimulation { directions: s.directions, budget: s.budget, seed: s.seed }),
    };
    toml::to_string(&out).expect("model serializes")
}

impl ModelFile {
    pub fn from_model(m: &WindTreeModel) -> Self {
        ModelFile {
            lattice: m.lattice.clone(),
            domain: m.domain.clone(),
            pairing: m.pairing.clone(),
            obstacles: m.obstacles.clone(),
            embedding: None,
            simulation: None,
        }
    }

    /// Wind-tree model of the file, with the L pair added when the file has
    /// an `embedding` section.
    pub fn build(&self) -> Result<WindTreeModel, WindTreeError> {
        let m = windtree::build_model(self.lattice.clone(), self.domain.clone(), self.pairing.clone(), self.obstacles.clone())?;
        match &self.embedding {
            Some(e) => windtree::embed_l(&m, e.xi, e.scale.clone(), e.anchor.clone()),
            None => Ok(m),
        }
    }
}

pub fn load_model(text: &str) -> Result<(ModelFile, WindTreeModel), ModelFileError> {
    let f = parse_model(text)?;
    let m = f.build()?;
    Ok((f, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::q;

    const CLASSICAL: &str = r#"
[lattice]
tau1 = ["1", "0"]
tau2 = ["0", "1"]

[domain]
vertices = [["0", "0"], ["1", "0"], ["1", "1"], ["0", "1"]]
pairing = [[0, 2], [3, 1]]

[[obstacles]]
vertices = [["1/4", "1/3"], ["3/4", "1/3"], ["3/4", "2/3"], ["1/4", "2/3"]]
edge_angles = ["0", "1/2", "1", "3/2"]
"#;

    #[test]
    fn exact_values() {
        let (f, m) = load_model(CLASSICAL).unwrap();
        assert_eq!(m.n(), 2);
        assert_eq!(f.obstacles[0].vertices[0].y, q(1, 3));
        assert_eq!(parse_model(&serialize_model(&f)).unwrap(), f);
    }

    #[test]
    fn missing_field_is_located() {
        let text = CLASSICAL.replace("tau2 = [\"0\", \"1\"]\n", "");
        let ModelFileError::Parse { line, message, .. } = parse_model(&text).unwrap_err() else { panic!() };
        assert!(message.contains("tau2"), "{message}");
        assert_eq!(line, 2);
    }

    #[test]
    fn bad_rational_is_located() {
        let text = CLASSICAL.replace("\"1/3\"], [\"3/4\"", "\"0.33\"], [\"3/4\"");
        let err = parse_model(&text).unwrap_err();
        assert_eq!(err, ModelFileError::Parse { line: 11, col: 21, message: "`0.33` is not an exact rational".into() });
    }
}
