use serde::{Deserialize, Serialize};

use crate::calculus::normal_cone;
use crate::error::{check_dim, CalcError, Result};
use crate::exact::{Rat, RatVector};
use crate::polyhedron::{dd_convert, dd_convert_back, project_h, AffineMap, Constraint, Cone, HPolyhedron, VPolyhedron};

/// A set-valued map `F: ℚⁿ ⇉ ℚᵖ` given by its polyhedral graph in `ℚⁿ⁺ᵖ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MapJson", into = "MapJson")]
pub struct PolyhedralMap {
    n: usize,
    p: usize,
    graph: HPolyhedron,
}

impl PolyhedralMap {
    pub fn new(n: usize, p: usize, graph: HPolyhedron) -> Result<Self> {
        check_dim(n + p, graph.dim())?;
        Ok(PolyhedralMap { n, p, graph })
    }

    /// The single-valued map `x ↦ Ax + b`.
    pub fn from_affine(map: &AffineMap) -> Self {
        PolyhedralMap { n: map.input_dim(), p: map.output_dim(), graph: map.graph() }
    }

    /// The constant map `x ↦ C`.
    pub fn constant(n: usize, value: &HPolyhedron) -> Self {
        let p = value.dim();
        PolyhedralMap { n, p, graph: value.embed_block(n + p, n).expect("block fits") }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_affine(&AffineMap::identity(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn graph(&self) -> &HPolyhedron {
        &self.graph
    }

    /// `F(x̄)` as a polyhedron in `ℚᵖ`.
    pub fn value_at(&self, x: &RatVector) -> Result<HPolyhedron> {
        check_dim(self.n, x.dim())?;
        let mut assign: Vec<Option<Rat>> = x.iter().cloned().map(Some).collect();
        assign.extend(std::iter::repeat_n(None, self.p));
        self.graph.fix_coords(&assign)
    }

    /// `dom F`, the projection of the graph onto the first block.
    pub fn domain(&self) -> Result<HPolyhedron> {
        project_h(&self.graph, &(0..self.n).collect::<Vec<_>>())
    }

    pub(crate) fn base_in_graph(&self, x: &RatVector, y: &RatVector) -> Result<RatVector> {
        check_dim(self.n, x.dim())?;
        check_dim(self.p, y.dim())?;
        let base = x.concat(y);
        if !self.graph.contains(&base)? {
            return Err(CalcError::PointOutsideGraph);
        }
        Ok(base)
    }

    /// `N((x̄, ȳ); gph F)`.
    pub fn graph_normals(&self, x: &RatVector, y: &RatVector) -> Result<Cone> {
        let base = self.base_in_graph(x, y)?;
        normal_cone(&self.graph, &base)
    }

    /// `F₁ + F₂`, the projection of `{(x, y₁, y₂, y) | yᵢ ∈ Fᵢ(x), y = y₁ + y₂}` onto `(x, y)`.
    pub fn sum(&self, other: &PolyhedralMap) -> Result<PolyhedralMap> {
        check_dim(self.n, other.n)?;
        check_dim(self.p, other.p)?;
        let (n, p) = (self.n, self.p);
        let dim = n + 3 * p;
        let xs: Vec<usize> = (0..n).collect();
        let block = |start: usize| (start..start + p).collect::<Vec<_>>();
        let g1 = self.graph.embed(dim, &[xs.clone(), block(n)].concat())?;
        let g2 = other.graph.embed(dim, &[xs.clone(), block(n + p)].concat())?;
        let mut lifted = g1.intersect(&g2)?;
        for i in 0..p {
            let mut e = RatVector::zeros(dim);
            e[n + i] = Rat::from_integer(1.into());
            e[n + p + i] = Rat::from_integer(1.into());
            e[n + 2 * p + i] = Rat::from_integer((-1).into());
            lifted.add_eq(Constraint::new(e, Rat::from_integer(0.into())))?;
        }
        let graph = project_h(&lifted, &[xs, block(n + 2 * p)].concat())?;
        PolyhedralMap::new(n, p, graph)
    }

    /// `G ∘ F` for `F: ℚⁿ ⇉ ℚᵖ` (self) and `G: ℚᵖ ⇉ ℚ^q`.
    pub fn then(&self, g: &PolyhedralMap) -> Result<PolyhedralMap> {
        check_dim(self.p, g.n)?;
        let (n, p, q) = (self.n, self.p, g.p);
        let dim = n + p + q;
        let lifted = self.graph.embed_block(dim, 0)?.intersect(&g.graph.embed_block(dim, n)?)?;
        let keep: Vec<usize> = (0..n).chain(n + p..dim).collect();
        PolyhedralMap::new(n, q, project_h(&lifted, &keep)?)
    }

    /// `x ↦ F₁(x) ∩ F₂(x)`.
    pub fn intersect(&self, other: &PolyhedralMap) -> Result<PolyhedralMap> {
        check_dim(self.n, other.n)?;
        check_dim(self.p, other.p)?;
        PolyhedralMap::new(self.n, self.p, self.graph.intersect(&other.graph)?)
    }

    /// `F⁻¹(Θ) = {x | F(x) ∩ Θ ≠ ∅}`.
    pub fn preimage_of(&self, theta: &HPolyhedron) -> Result<HPolyhedron> {
        check_dim(self.p, theta.dim())?;
        let lifted = self.graph.intersect(&theta.embed_block(self.n + self.p, self.n)?)?;
        project_h(&lifted, &(0..self.n).collect::<Vec<_>>())
    }

    /// Solution map `S(x) = {y | 0 ∈ F(x, y) + G(x, y)}` for `F, G: ℚⁿ⁺ᵖ ⇉ ℚ^q`, with `n` given.
    pub fn solution_map(f: &PolyhedralMap, g: &PolyhedralMap, n: usize) -> Result<PolyhedralMap> {
        check_dim(f.n, g.n)?;
        check_dim(f.p, g.p)?;
        if n > f.n {
            return Err(CalcError::BadIndex { index: n, dim: f.n });
        }
        let m = f.n;
        let lifted = f.graph.intersect(&g.graph.reflect_tail(m)?)?;
        PolyhedralMap::new(n, m - n, project_h(&lifted, &(0..m).collect::<Vec<_>>())?)
    }

    /// Irredundant graph rows.
    pub fn tidy_graph(&self) -> Result<PolyhedralMap> {
        PolyhedralMap::new(self.n, self.p, dd_convert_back(&dd_convert(&self.graph)?)?)
    }

    pub fn graph_vertices(&self) -> Result<VPolyhedron> {
        dd_convert(&self.graph)
    }
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    n: usize,
    p: usize,
    graph: HPolyhedron,
}

impl TryFrom<MapJson> for PolyhedralMap {
    type Error = String;

    fn try_from(raw: MapJson) -> std::result::Result<Self, String> {
        if raw.graph.dim() != raw.n + raw.p {
            return Err(format!("graph.dim: expected n + p = {}, found {}", raw.n + raw.p, raw.graph.dim()));
        }
        Ok(PolyhedralMap { n: raw.n, p: raw.p, graph: raw.graph })
    }
}

impl From<PolyhedralMap> for MapJson {
    fn from(m: PolyhedralMap) -> MapJson {
        MapJson { n: m.n, p: m.p, graph: m.graph }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedron::set_equal;

    /// `F(x) = [x, ∞)`.
    fn above() -> PolyhedralMap {
        PolyhedralMap::new(1, 1, HPolyhedron::from_ints(2, &[(&[1, -1], 0)], &[])).unwrap()
    }

    #[test]
    fn values_and_domain() {
        let f = PolyhedralMap::new(1, 1, HPolyhedron::from_ints(2, &[(&[1, 0], 0), (&[0, -1], 0)], &[])).unwrap();
        let dom = f.domain().unwrap();
        assert!(set_equal(&dom, &HPolyhedron::from_ints(1, &[(&[1], 0)], &[])).unwrap());
        assert!(!f.value_at(&RatVector::from_ints(&[1])).unwrap().is_feasible());
        assert!(f.value_at(&RatVector::from_ints(&[-1])).unwrap().contains(&RatVector::from_ints(&[5])).unwrap());
    }

    #[test]
    fn composite_graphs() {
        let s = PolyhedralMap::identity(1).sum(&PolyhedralMap::constant(1, &HPolyhedron::from_ints(1, &[(&[-1], 0)], &[]))).unwrap();
        assert!(set_equal(s.graph(), above().graph()).unwrap());

        let twice = above().then(&above()).unwrap();
        assert!(set_equal(twice.graph(), above().graph()).unwrap());

        let pos = PolyhedralMap::constant(1, &HPolyhedron::from_ints(1, &[(&[-1], 0)], &[]));
        let meet = above().intersect(&pos).unwrap();
        assert!(meet.graph().contains(&RatVector::from_ints(&[-2, 0])).unwrap());
        assert!(!meet.graph().contains(&RatVector::from_ints(&[1, 0])).unwrap());

        let pre = above().preimage_of(&HPolyhedron::from_ints(1, &[(&[1], 0)], &[])).unwrap();
        assert!(set_equal(&pre, &HPolyhedron::from_ints(1, &[(&[1], 0)], &[])).unwrap());
    }

    #[test]
    fn solution_map_of_difference() {
        // F(x, y) = {y − x}, G ≡ {0}: S is the identity.
        let f = PolyhedralMap::new(2, 1, HPolyhedron::from_ints(3, &[], &[(&[-1, 1, -1], 0)])).unwrap();
        let g = PolyhedralMap::constant(2, &HPolyhedron::singleton(&RatVector::zeros(1)));
        let s = PolyhedralMap::solution_map(&f, &g, 1).unwrap();
        assert!(set_equal(s.graph(), PolyhedralMap::identity(1).graph()).unwrap());
    }

    #[test]
    fn json_checks_dimensions() {
        let ok = r#"{"n":1,"p":1,"graph":{"dim":2,"ineq":[{"a":[1,-1],"b":0}]}}"#;
        assert_eq!(serde_json::from_str::<PolyhedralMap>(ok).unwrap(), above());
        let bad = r#"{"n":1,"p":2,"graph":{"dim":2}}"#;
        assert!(serde_json::from_str::<PolyhedralMap>(bad).unwrap_err().to_string().contains("graph.dim"));
    }
}
