//! Shaped triangulations: tetrahedra with orientation signs, edge classes as lists of
//! `(tetrahedron, slot)` incidences, and the weight bookkeeping on top of them.
//!
//! Angles are stored as fractions of a full turn, so a tetrahedron's three angles sum to 1/2
//! and slot A of tetrahedron k contributes `2π·a_k` to every edge it is incident to.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute tolerance on edge weights (radians) and angle sums in [`is_angle_structure`].
pub const WEIGHT_TOL: f64 = 1e-9;

const IDEAL_73_JSON: &str = include_str!("../../data/ideal_73.json");
const H_73_JSON: &str = include_str!("../../data/h_73.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Slot {
    A,
    B,
    C,
}

impl Slot {
    pub const ALL: [Slot; 3] = [Slot::A, Slot::B, Slot::C];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Slot::A => "a",
            Slot::B => "b",
            Slot::C => "c",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tetrahedron {
    pub id: usize,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeClass {
    pub id: String,
    pub incidences: Vec<(usize, Slot)>,
}

/// On-disk layout; converted to [`Triangulation`] after validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TriangulationFile {
    tets: Vec<Tetrahedron>,
    edges: Vec<EdgeClass>,
    #[serde(default)]
    knot_edge: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    tetrahedra: Vec<Tetrahedron>,
    edges: Vec<EdgeClass>,
    knot_edge: Option<String>,
    index: HashMap<usize, usize>,
}

/// Angles of one tetrahedron as turn fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TetShape {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TetShape {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn get(&self, s: Slot) -> f64 {
        match s {
            Slot::A => self.a,
            Slot::B => self.b,
            Slot::C => self.c,
        }
    }

    pub fn sum(&self) -> f64 {
        self.a + self.b + self.c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeStructure {
    pub shapes: Vec<TetShape>,
}

impl ShapeStructure {
    pub fn new(shapes: Vec<TetShape>) -> Self {
        Self { shapes }
    }

    /// From `[a₁, b₁, c₁, a₂, …]`.
    pub fn from_flat(x: &[f64]) -> Self {
        assert!(x.len() % 3 == 0, "flat angle vector must have length 3N");
        Self {
            shapes: x.chunks(3).map(|c| TetShape::new(c[0], c[1], c[2])).collect(),
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.shapes.iter().flat_map(|s| [s.a, s.b, s.c]).collect()
    }

    /// Same angles on every tetrahedron.
    pub fn uniform(n: usize, shape: TetShape) -> Self {
        Self { shapes: vec![shape; n] }
    }

    /// The explicit interior point of the angle-structure polytope of the ideal 7_3
    /// triangulation.
    pub fn ideal_73_start() -> Self {
        Self::from_flat(&[
            1.0 / 4.0,
            1.0 / 8.0,
            1.0 / 8.0,
            3.0 / 8.0,
            1.0 / 16.0,
            1.0 / 16.0,
            3.0 / 16.0,
            1.0 / 8.0,
            3.0 / 16.0,
            1.0 / 8.0,
            1.0 / 16.0,
            5.0 / 16.0,
            1.0 / 16.0,
            3.0 / 16.0,
            1.0 / 4.0,
        ])
    }

    /// Angle of `slot` on the tetrahedron at position `k` (0-based).
    pub fn angle(&self, k: usize, slot: Slot) -> f64 {
        self.shapes[k].get(slot)
    }
}

/// Integer coefficients of an edge weight over `(tet id, slot)`, divided by 2π.
pub type LinearForm = BTreeMap<(usize, Slot), i32>;

impl Triangulation {
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: TriangulationFile = serde_json::from_str(s)?;
        Self::from_parts(raw.tets, raw.edges, raw.knot_edge)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let raw = TriangulationFile {
            tets: self.tetrahedra.clone(),
            edges: self.edges.clone(),
            knot_edge: self.knot_edge.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("triangulation serialises")
    }

    pub fn from_parts(tetrahedra: Vec<Tetrahedron>, edges: Vec<EdgeClass>, knot_edge: Option<String>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidTriangulation(m));
        if tetrahedra.is_empty() {
            return bad("no tetrahedra".into());
        }
        let mut index = HashMap::new();
        for (k, t) in tetrahedra.iter().enumerate() {
            if t.sign != 1 && t.sign != -1 {
                return bad(format!("tetrahedron {} has sign {}", t.id, t.sign));
            }
            if index.insert(t.id, k).is_some() {
                return bad(format!("duplicate tetrahedron id {}", t.id));
            }
        }
        let mut count: HashMap<(usize, Slot), usize> = HashMap::new();
        let mut seen = std::collections::HashSet::new();
        for e in &edges {
            if !seen.insert(e.id.clone()) {
                return bad(format!("duplicate edge id {}", e.id));
            }
            for &(t, s) in &e.incidences {
                if !index.contains_key(&t) {
                    return bad(format!("edge {} references unknown tetrahedron {t}", e.id));
                }
                *count.entry((t, s)).or_default() += 1;
            }
        }
        for t in &tetrahedra {
            for s in Slot::ALL {
                let c = count.get(&(t.id, s)).copied().unwrap_or(0);
                if c != 2 {
                    return bad(format!(
                        "slot {s}{} appears {c} times; every slot pairs two opposite edges",
                        t.id
                    ));
                }
            }
        }
        if let Some(k) = &knot_edge {
            if !seen.contains(k) {
                return bad(format!("knot edge {k} is not an edge"));
            }
        }
        Ok(Self {
            tetrahedra,
            edges,
            knot_edge,
            index,
        })
    }

    pub fn tetrahedra(&self) -> &[Tetrahedron] {
        &self.tetrahedra
    }

    pub fn edges(&self) -> &[EdgeClass] {
        &self.edges
    }

    pub fn knot_edge(&self) -> Option<&str> {
        self.knot_edge.as_deref()
    }

    pub fn num_tetrahedra(&self) -> usize {
        self.tetrahedra.len()
    }

    pub fn signs(&self) -> Vec<i8> {
        self.tetrahedra.iter().map(|t| t.sign).collect()
    }

    /// Position of a tetrahedron id in [`Self::tetrahedra`].
    pub fn position(&self, id: usize) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn edge(&self, id: &str) -> Result<&EdgeClass> {
        self.edges
            .iter()
            .find(|e| e.id == id)
            .ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    /// Edge weight as a linear form in the angles.
    pub fn weight_form(&self, id: &str) -> Result<LinearForm> {
        let mut f = LinearForm::new();
        for &inc in &self.edge(id)?.incidences {
            *f.entry(inc).or_default() += 1;
        }
        Ok(f)
    }

    /// Same as [`Self::weight_form`] but as a dense row over the flat angle vector.
    pub fn weight_row(&self, id: &str) -> Result<Vec<f64>> {
        let mut row = vec![0.0; 3 * self.num_tetrahedra()];
        for &(t, s) in &self.edge(id)?.incidences {
            row[3 * self.index[&t] + s.index()] += 1.0;
        }
        Ok(row)
    }

    /// Weight ω(e) = 2π Σ angle over the incidences of `e`.
    pub fn weight(&self, alpha: &ShapeStructure, id: &str) -> Result<f64> {
        self.check_len(alpha)?;
        let e = self.edge(id)?;
        Ok(2.0
            * PI
            * e.incidences
                .iter()
                .map(|&(t, s)| alpha.angle(self.index[&t], s))
                .sum::<f64>())
    }

    /// Target that is 2π on every edge except a knot edge, where it is 0.
    pub fn default_target(&self, id: &str) -> f64 {
        if self.knot_edge.as_deref() == Some(id) {
            0.0
        } else {
            2.0 * PI
        }
    }

    fn check_len(&self, alpha: &ShapeStructure) -> Result<()> {
        if alpha.shapes.len() != self.num_tetrahedra() {
            return Err(Error::Domain(format!(
                "shape structure has {} tetrahedra, triangulation has {}",
                alpha.shapes.len(),
                self.num_tetrahedra()
            )));
        }
        Ok(())
    }
}

/// The ideal triangulation of the complement of 7_3 (five tetrahedra, five edges).
pub fn builtin_ideal_73() -> Triangulation {
    Triangulation::from_json(IDEAL_73_JSON).expect("bundled ideal_73.json is valid")
}

/// The one-vertex H-triangulation of (S³, 7_3), six tetrahedra, knot edge `e0`.
pub fn builtin_h_73() -> Triangulation {
    Triangulation::from_json(H_73_JSON).expect("bundled h_73.json is valid")
}

/// Weight of edge `e`; see [`Triangulation::weight`].
pub fn weight(t: &Triangulation, alpha: &ShapeStructure, e: &str) -> Result<f64> {
    t.weight(alpha, e)
}

/// Every weight hits `target` and every angle is strictly inside `(0, 1/2)`.
pub fn is_angle_structure(t: &Triangulation, alpha: &ShapeStructure, target: impl Fn(&str) -> f64) -> bool {
    check_structure(t, alpha, target, false)
}

/// As [`is_angle_structure`] but angles may sit on the boundary `[0, 1/2]`.
pub fn is_extended_angle_structure(t: &Triangulation, alpha: &ShapeStructure, target: impl Fn(&str) -> f64) -> bool {
    check_structure(t, alpha, target, true)
}

fn check_structure(t: &Triangulation, alpha: &ShapeStructure, target: impl Fn(&str) -> f64, extended: bool) -> bool {
    if alpha.shapes.len() != t.num_tetrahedra() {
        return false;
    }
    for s in &alpha.shapes {
        if (s.sum() - 0.5).abs() > WEIGHT_TOL {
            return false;
        }
        for x in [s.a, s.b, s.c] {
            let ok = if extended {
                (-WEIGHT_TOL..=0.5 + WEIGHT_TOL).contains(&x)
            } else {
                x > 0.0 && x < 0.5
            };
            if !ok {
                return false;
            }
        }
    }
    t.edges.iter().all(|e| {
        let w = t.weight(alpha, &e.id).expect("edge exists");
        (w - target(&e.id)).abs() <= WEIGHT_TOL
    })
}

/// Gauge invariants `(λ, μ)` of a shape structure on the ideal 7_3 triangulation.
pub fn lambda_mu(alpha: &ShapeStructure) -> Result<(f64, f64)> {
    if alpha.shapes.len() != 5 {
        return Err(Error::Domain("lambda_mu needs five tetrahedra".into()));
    }
    let s = &alpha.shapes;
    let mu = s[2].a - s[3].a;
    let lambda = -2.0 * PI * (-s[3].c + s[4].b - 3.0 * s[2].a + 3.0 * s[3].a);
    Ok((lambda, mu))
}

/// Residuals of the reduced balance system of the ideal 7_3 triangulation,
/// valid once every tetrahedron satisfies a + b + c = 1/2.
pub fn ideal_73_reduced_residuals(alpha: &ShapeStructure) -> [f64; 4] {
    let s = &alpha.shapes;
    let (t1, t2, t3, t4, t5) = (s[0], s[1], s[2], s[3], s[4]);
    [
        t1.b + t2.b + t3.a - t4.a - t5.c,
        t2.a - 2.0 * t1.b - t1.c,
        t2.a + t3.b - t4.c - t5.b,
        t3.a - t1.b - t2.b,
    ]
}

/// Residuals of the reduced τ-system of the H-triangulation.
pub fn h_73_reduced_residuals(tau: &ShapeStructure) -> [f64; 6] {
    let s = &tau.shapes;
    [
        s[2].a + s[3].b - s[4].c - s[5].b,
        s[3].a - s[1].b - s[2].b,
        s[3].a - s[4].a,
        s[3].a - s[5].c,
        s[1].a - s[2].c - s[3].a,
        s[0].a,
    ]
}
