use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, CalcError, Result};
use crate::exact::rat::{self, Rat, RatJson};
use crate::exact::{lp_solve, LpOutcome, RatMatrix, RatVector, Sense};

use super::affine::AffineMap;

/// One linear row `⟨normal, x⟩ ≤ rhs` (or `= rhs` when stored as an equality).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub normal: RatVector,
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(normal: RatVector, rhs: Rat) -> Self {
        Constraint { normal, rhs }
    }

    pub fn from_ints(normal: &[i64], rhs: i64) -> Self {
        Constraint { normal: RatVector::from_ints(normal), rhs: rat::int(rhs) }
    }

    /// `rhs − ⟨normal, x⟩`.
    pub fn slack(&self, x: &RatVector) -> Rat {
        &self.rhs - self.normal.dot(x)
    }

    /// Scaled so that normal and rhs are coprime integers.
    pub fn primitive(&self) -> Constraint {
        let joined = self.normal.concat(&RatVector::new(vec![self.rhs.clone()]));
        let p = joined.primitive();
        let n = self.normal.dim();
        Constraint { normal: p.slice(0, n), rhs: p[n].clone() }
    }
}

/// A polyhedron `{x ∈ ℚⁿ | Ax ≤ b, Ex = d}`; possibly empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HJson", into = "HJson")]
pub struct HPolyhedron {
    dim: usize,
    ineqs: Vec<Constraint>,
    eqs: Vec<Constraint>,
}

impl HPolyhedron {
    pub fn new(dim: usize, ineqs: Vec<Constraint>, eqs: Vec<Constraint>) -> Result<Self> {
        for c in ineqs.iter().chain(&eqs) {
            check_dim(dim, c.normal.dim())?;
        }
        Ok(HPolyhedron { dim, ineqs, eqs })
    }

    /// Builds from integer rows; panics on ragged input. Intended for fixtures.
    pub fn from_ints(dim: usize, ineqs: &[(&[i64], i64)], eqs: &[(&[i64], i64)]) -> Self {
        let conv = |rows: &[(&[i64], i64)]| rows.iter().map(|(a, b)| Constraint::from_ints(a, *b)).collect();
        Self::new(dim, conv(ineqs), conv(eqs)).expect("ragged fixture")
    }

    pub fn universe(dim: usize) -> Self {
        HPolyhedron { dim, ineqs: Vec::new(), eqs: Vec::new() }
    }

    /// The canonical empty set `{x | 0 ≤ −1}`.
    pub fn empty(dim: usize) -> Self {
        HPolyhedron { dim, ineqs: vec![Constraint::new(RatVector::zeros(dim), -Rat::one())], eqs: Vec::new() }
    }

    /// The singleton `{point}`.
    pub fn singleton(point: &RatVector) -> Self {
        let dim = point.dim();
        let eqs = (0..dim).map(|i| Constraint::new(RatVector::unit(dim, i), point[i].clone())).collect();
        HPolyhedron { dim, ineqs: Vec::new(), eqs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ineqs(&self) -> &[Constraint] {
        &self.ineqs
    }

    pub fn eqs(&self) -> &[Constraint] {
        &self.eqs
    }

    pub fn a_matrix(&self) -> RatMatrix {
        RatMatrix::new(self.ineqs.iter().map(|c| c.normal.clone()).collect(), self.dim).expect("row dims checked")
    }

    pub fn b_vector(&self) -> RatVector {
        RatVector::new(self.ineqs.iter().map(|c| c.rhs.clone()).collect())
    }

    pub fn e_matrix(&self) -> RatMatrix {
        RatMatrix::new(self.eqs.iter().map(|c| c.normal.clone()).collect(), self.dim).expect("row dims checked")
    }

    pub fn d_vector(&self) -> RatVector {
        RatVector::new(self.eqs.iter().map(|c| c.rhs.clone()).collect())
    }

    pub fn add_ineq(&mut self, c: Constraint) -> Result<()> {
        check_dim(self.dim, c.normal.dim())?;
        self.ineqs.push(c);
        Ok(())
    }

    pub fn add_eq(&mut self, c: Constraint) -> Result<()> {
        check_dim(self.dim, c.normal.dim())?;
        self.eqs.push(c);
        Ok(())
    }

    pub fn contains(&self, x: &RatVector) -> Result<bool> {
        check_dim(self.dim, x.dim())?;
        Ok(self.ineqs.iter().all(|c| c.normal.dot(x) <= c.rhs) && self.eqs.iter().all(|c| c.normal.dot(x) == c.rhs))
    }

    /// Indices of inequality rows holding with equality at `x`.
    pub fn active_rows(&self, x: &RatVector) -> Vec<usize> {
        (0..self.ineqs.len()).filter(|&i| self.ineqs[i].slack(x).is_zero()).collect()
    }

    /// Whether `x` lies in the interior: no nontrivial equality and every nontrivial row strict.
    pub fn is_interior(&self, x: &RatVector) -> Result<bool> {
        if !self.contains(x)? {
            return Ok(false);
        }
        if self.eqs.iter().any(|c| !c.normal.is_zero()) {
            return Ok(false);
        }
        Ok(self.ineqs.iter().all(|c| c.normal.is_zero() || c.slack(x) > Rat::zero()))
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(
            lp_solve(&RatVector::zeros(self.dim), self, Sense::Minimize).expect("objective has matching dim"),
            LpOutcome::Infeasible { .. }
        )
    }

    /// Some point of the set, if nonempty.
    pub fn feasible_point(&self) -> Option<RatVector> {
        match lp_solve(&RatVector::zeros(self.dim), self, Sense::Minimize).expect("objective has matching dim") {
            LpOutcome::Optimal { point, .. } => Some(point),
            LpOutcome::Unbounded { feasible_point, .. } => Some(feasible_point),
            LpOutcome::Infeasible { .. } => None,
        }
    }

    /// Concatenation of the rows of both sets.
    pub fn intersect(&self, other: &HPolyhedron) -> Result<HPolyhedron> {
        check_dim(self.dim, other.dim)?;
        let mut out = self.clone();
        out.ineqs.extend(other.ineqs.iter().cloned());
        out.eqs.extend(other.eqs.iter().cloned());
        Ok(out)
    }

    /// Places coordinate `i` of this set at `positions[i]` of a space of dimension `new_dim`;
    /// the remaining coordinates are free. The result is the cylinder over the set.
    pub fn embed(&self, new_dim: usize, positions: &[usize]) -> Result<HPolyhedron> {
        check_dim(self.dim, positions.len())?;
        if let Some(&bad) = positions.iter().find(|&&p| p >= new_dim) {
            return Err(CalcError::BadIndex { index: bad, dim: new_dim });
        }
        let lift = |c: &Constraint| {
            let mut normal = RatVector::zeros(new_dim);
            for (i, &p) in positions.iter().enumerate() {
                normal[p] = c.normal[i].clone();
            }
            Constraint::new(normal, c.rhs.clone())
        };
        Ok(HPolyhedron {
            dim: new_dim,
            ineqs: self.ineqs.iter().map(lift).collect(),
            eqs: self.eqs.iter().map(lift).collect(),
        })
    }

    /// Cylinder over the set with `offset` free coordinates in front and the rest after.
    pub fn embed_block(&self, new_dim: usize, offset: usize) -> Result<HPolyhedron> {
        let positions: Vec<usize> = (offset..offset + self.dim).collect();
        self.embed(new_dim, &positions)
    }

    /// Substitutes fixed values for the coordinates where `assign` is `Some`;
    /// the result lives in the remaining coordinates, in their original order.
    pub fn fix_coords(&self, assign: &[Option<Rat>]) -> Result<HPolyhedron> {
        check_dim(self.dim, assign.len())?;
        let free: Vec<usize> = (0..self.dim).filter(|&i| assign[i].is_none()).collect();
        let restrict = |c: &Constraint| {
            let mut rhs = c.rhs.clone();
            for (i, v) in assign.iter().enumerate() {
                if let Some(v) = v {
                    rhs -= &c.normal[i] * v;
                }
            }
            Constraint::new(c.normal.select(&free), rhs)
        };
        Ok(HPolyhedron {
            dim: free.len(),
            ineqs: self.ineqs.iter().map(restrict).collect(),
            eqs: self.eqs.iter().map(restrict).collect(),
        })
    }

    /// `{x | B(x) ∈ self}`.
    pub fn preimage(&self, map: &AffineMap) -> Result<HPolyhedron> {
        check_dim(self.dim, map.output_dim())?;
        let at = map.matrix().transpose();
        let pull = |c: &Constraint| {
            let normal = at.mul_vec(&c.normal).expect("dims checked");
            Constraint::new(normal, &c.rhs - c.normal.dot(map.offset()))
        };
        Ok(HPolyhedron {
            dim: map.input_dim(),
            ineqs: self.ineqs.iter().map(pull).collect(),
            eqs: self.eqs.iter().map(pull).collect(),
        })
    }

    /// `{−x | x ∈ self}`.
    pub fn negated(&self) -> HPolyhedron {
        let flip = |c: &Constraint| Constraint::new(-&c.normal, c.rhs.clone());
        HPolyhedron { dim: self.dim, ineqs: self.ineqs.iter().map(flip).collect(), eqs: self.eqs.iter().map(flip).collect() }
    }

    /// `{(w, −z) | (w, z) ∈ self}` where `z` is the block starting at `start`.
    pub fn reflect_tail(&self, start: usize) -> Result<HPolyhedron> {
        if start > self.dim {
            return Err(CalcError::BadIndex { index: start, dim: self.dim });
        }
        let flip = |c: &Constraint| {
            let mut normal = c.normal.clone();
            for i in start..self.dim {
                normal[i] = -normal[i].clone();
            }
            Constraint::new(normal, c.rhs.clone())
        };
        Ok(HPolyhedron { dim: self.dim, ineqs: self.ineqs.iter().map(flip).collect(), eqs: self.eqs.iter().map(flip).collect() })
    }

    /// Drops rows with zero normal that hold trivially and duplicate rows.
    pub fn tidy(&self) -> HPolyhedron {
        let mut ineqs: Vec<Constraint> = Vec::new();
        for c in &self.ineqs {
            if c.normal.is_zero() && c.rhs >= Rat::zero() {
                continue;
            }
            let p = c.primitive();
            if !ineqs.contains(&p) {
                ineqs.push(p);
            }
        }
        let mut eqs: Vec<Constraint> = Vec::new();
        for c in &self.eqs {
            if c.normal.is_zero() && c.rhs.is_zero() {
                continue;
            }
            let p = c.primitive();
            if !eqs.contains(&p) && !eqs.contains(&Constraint::new(-&p.normal, -p.rhs.clone())) {
                eqs.push(p);
            }
        }
        HPolyhedron { dim: self.dim, ineqs, eqs }
    }
}

#[derive(Serialize, Deserialize)]
struct IneqJson {
    a: RatVector,
    b: RatJson,
}

#[derive(Serialize, Deserialize)]
struct EqJson {
    e: RatVector,
    d: RatJson,
}

#[derive(Serialize, Deserialize)]
struct HJson {
    dim: usize,
    #[serde(default)]
    ineq: Vec<IneqJson>,
    #[serde(default)]
    eq: Vec<EqJson>,
}

impl TryFrom<HJson> for HPolyhedron {
    type Error = String;

    fn try_from(raw: HJson) -> std::result::Result<Self, String> {
        if raw.dim == 0 {
            return Err("dim: must be positive".into());
        }
        let mut ineqs = Vec::with_capacity(raw.ineq.len());
        for (i, row) in raw.ineq.into_iter().enumerate() {
            if row.a.dim() != raw.dim {
                return Err(format!("ineq[{i}].a: expected {} entries, found {}", raw.dim, row.a.dim()));
            }
            ineqs.push(Constraint::new(row.a, row.b.0));
        }
        let mut eqs = Vec::with_capacity(raw.eq.len());
        for (i, row) in raw.eq.into_iter().enumerate() {
            if row.e.dim() != raw.dim {
                return Err(format!("eq[{i}].e: expected {} entries, found {}", raw.dim, row.e.dim()));
            }
            eqs.push(Constraint::new(row.e, row.d.0));
        }
        Ok(HPolyhedron { dim: raw.dim, ineqs, eqs })
    }
}

impl From<HPolyhedron> for HJson {
    fn from(p: HPolyhedron) -> HJson {
        HJson {
            dim: p.dim,
            ineq: p.ineqs.into_iter().map(|c| IneqJson { a: c.normal, b: RatJson(c.rhs) }).collect(),
            eq: p.eqs.into_iter().map(|c| EqJson { e: c.normal, d: RatJson(c.rhs) }).collect(),
        }
    }
}
