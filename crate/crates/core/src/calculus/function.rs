use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, CalcError, Result};
use crate::exact::rat::RatJson;
use crate::exact::{Rat, RatVector};
use crate::polyhedron::{AffineMap, Constraint, HPolyhedron};

/// Upper bound on the number of pieces of a derived function.
pub const PIECE_CAP: usize = 10_000;

/// The affine function `x ↦ ⟨a, x⟩ + b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Piece {
    pub a: RatVector,
    pub b: Rat,
}

impl Piece {
    pub fn new(a: RatVector, b: Rat) -> Self {
        Piece { a, b }
    }

    pub fn eval(&self, x: &RatVector) -> Rat {
        self.a.dot(x) + &self.b
    }
}

/// `f(x) = maxᵢ ⟨aᵢ, x⟩ + bᵢ` on a polyhedral domain, `+∞` outside it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FnJson", into = "FnJson")]
pub struct MaxAffineFunction {
    n: usize,
    pieces: Vec<Piece>,
    domain: HPolyhedron,
}

impl MaxAffineFunction {
    pub fn new(n: usize, pieces: Vec<Piece>, domain: HPolyhedron) -> Result<Self> {
        if pieces.is_empty() {
            return Err(CalcError::Parse("a max-affine function needs at least one piece".into()));
        }
        for p in &pieces {
            check_dim(n, p.a.dim())?;
        }
        check_dim(n, domain.dim())?;
        Ok(MaxAffineFunction { n, pieces, domain })
    }

    /// Full-domain function from integer pieces `(a, b)`. Intended for fixtures.
    pub fn from_ints(n: usize, pieces: &[(&[i64], i64)]) -> Self {
        let pieces = pieces.iter().map(|(a, b)| Piece::new(RatVector::from_ints(a), Rat::from_integer((*b).into()))).collect();
        Self::new(n, pieces, HPolyhedron::universe(n)).expect("ragged fixture")
    }

    pub fn affine(a: RatVector, b: Rat) -> Self {
        let n = a.dim();
        MaxAffineFunction { n, pieces: vec![Piece::new(a, b)], domain: HPolyhedron::universe(n) }
    }

    /// The indicator `δ(·; Ω)`.
    pub fn indicator(domain: HPolyhedron) -> Self {
        let n = domain.dim();
        MaxAffineFunction { n, pieces: vec![Piece::new(RatVector::zeros(n), Rat::zero())], domain }
    }

    pub fn with_domain(&self, domain: HPolyhedron) -> Result<Self> {
        Self::new(self.n, self.pieces.clone(), domain)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn domain(&self) -> &HPolyhedron {
        &self.domain
    }

    pub fn has_full_domain(&self) -> bool {
        self.domain.ineqs().iter().all(|c| c.normal.is_zero() && c.rhs >= Rat::zero())
            && self.domain.eqs().iter().all(|c| c.normal.is_zero() && c.rhs.is_zero())
    }

    pub fn in_domain(&self, x: &RatVector) -> Result<bool> {
        self.domain.contains(x)
    }

    /// `f(x)`, or `None` outside the domain.
    pub fn value(&self, x: &RatVector) -> Result<Option<Rat>> {
        if !self.in_domain(x)? {
            return Ok(None);
        }
        Ok(self.pieces.iter().map(|p| p.eval(x)).max())
    }

    pub(crate) fn value_in_domain(&self, x: &RatVector) -> Result<Rat> {
        self.value(x)?.ok_or(CalcError::PointOutsideDomain)
    }

    /// Pieces attaining the maximum at `x`.
    pub fn active_set(&self, x: &RatVector) -> Result<Vec<usize>> {
        let fx = self.value_in_domain(x)?;
        Ok((0..self.pieces.len()).filter(|&i| self.pieces[i].eval(x) == fx).collect())
    }

    /// `epi(f) = {(x, t) | ⟨aᵢ, x⟩ + bᵢ ≤ t, x ∈ dom f}` in `ℚⁿ⁺¹`.
    pub fn epigraph(&self) -> HPolyhedron {
        let n = self.n;
        let mut ineqs: Vec<Constraint> = self
            .pieces
            .iter()
            .map(|p| {
                let mut normal = p.a.clone();
                normal.push(-Rat::one());
                Constraint::new(normal, -p.b.clone())
            })
            .collect();
        let lifted = self.domain.embed(n + 1, &(0..n).collect::<Vec<_>>()).expect("positions in range");
        ineqs.extend(lifted.ineqs().iter().cloned());
        HPolyhedron::new(n + 1, ineqs, lifted.eqs().to_vec()).expect("consistent dims")
    }

    /// `f₁ + … + f_m`: one piece per choice of a piece from each summand.
    pub fn sum(fs: &[MaxAffineFunction]) -> Result<Self> {
        let first = fs.first().ok_or_else(|| CalcError::Internal("sum of no functions".into()))?;
        let n = first.n;
        let mut count: usize = 1;
        for f in fs {
            check_dim(n, f.n)?;
            count = count.saturating_mul(f.pieces.len());
            if count > PIECE_CAP {
                return Err(CalcError::PieceCapExceeded { pieces: count, cap: PIECE_CAP });
            }
        }
        let mut pieces = vec![Piece::new(RatVector::zeros(n), Rat::zero())];
        let mut domain = HPolyhedron::universe(n);
        for f in fs {
            let mut next = Vec::with_capacity(pieces.len() * f.pieces.len());
            for p in &pieces {
                for q in &f.pieces {
                    next.push(Piece::new(&p.a + &q.a, &p.b + &q.b));
                }
            }
            pieces = next;
            domain = domain.intersect(&f.domain)?;
        }
        Self::new(n, pieces, domain)
    }

    /// `max(f₁, …, f_m)`: the union of the pieces on the common domain.
    pub fn max_of(fs: &[MaxAffineFunction]) -> Result<Self> {
        let first = fs.first().ok_or_else(|| CalcError::Internal("max of no functions".into()))?;
        let n = first.n;
        let mut pieces = Vec::new();
        let mut domain = HPolyhedron::universe(n);
        for f in fs {
            check_dim(n, f.n)?;
            pieces.extend(f.pieces.iter().cloned());
            domain = domain.intersect(&f.domain)?;
        }
        if pieces.len() > PIECE_CAP {
            return Err(CalcError::PieceCapExceeded { pieces: pieces.len(), cap: PIECE_CAP });
        }
        Self::new(n, pieces, domain)
    }

    /// `f ∘ B`: pieces `(Aᵀaᵢ, ⟨aᵢ, b⟩ + bᵢ)` on `B⁻¹(dom f)`.
    pub fn compose_affine(&self, map: &AffineMap) -> Result<Self> {
        check_dim(self.n, map.output_dim())?;
        let at = map.matrix().transpose();
        let pieces = self
            .pieces
            .iter()
            .map(|p| Ok(Piece::new(at.mul_vec(&p.a)?, p.a.dot(map.offset()) + &p.b)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(map.input_dim(), pieces, self.domain.preimage(map)?)
    }
}

#[derive(Serialize, Deserialize)]
struct PieceJson {
    a: RatVector,
    b: RatJson,
}

#[derive(Serialize, Deserialize)]
struct FnJson {
    n: usize,
    pieces: Vec<PieceJson>,
    #[serde(default)]
    domain: Option<HPolyhedron>,
}

impl TryFrom<FnJson> for MaxAffineFunction {
    type Error = String;

    fn try_from(raw: FnJson) -> std::result::Result<Self, String> {
        if raw.pieces.is_empty() {
            return Err("pieces: at least one piece is required".into());
        }
        let mut pieces = Vec::with_capacity(raw.pieces.len());
        for (i, p) in raw.pieces.into_iter().enumerate() {
            if p.a.dim() != raw.n {
                return Err(format!("pieces[{i}].a: expected {} entries, found {}", raw.n, p.a.dim()));
            }
            pieces.push(Piece::new(p.a, p.b.0));
        }
        let domain = raw.domain.unwrap_or_else(|| HPolyhedron::universe(raw.n));
        if domain.dim() != raw.n {
            return Err(format!("domain.dim: expected {}, found {}", raw.n, domain.dim()));
        }
        Ok(MaxAffineFunction { n: raw.n, pieces, domain })
    }
}

impl From<MaxAffineFunction> for FnJson {
    fn from(f: MaxAffineFunction) -> FnJson {
        let full = f.has_full_domain();
        FnJson {
            n: f.n,
            pieces: f.pieces.into_iter().map(|p| PieceJson { a: p.a, b: RatJson(p.b) }).collect(),
            domain: if full { None } else { Some(f.domain) },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::int;

    fn abs() -> MaxAffineFunction {
        MaxAffineFunction::from_ints(1, &[(&[1], 0), (&[-1], 0)])
    }

    #[test]
    fn values_and_active_sets() {
        let f = abs();
        assert_eq!(f.value(&RatVector::from_ints(&[-3])).unwrap(), Some(int(3)));
        assert_eq!(f.active_set(&RatVector::from_ints(&[0])).unwrap(), vec![0, 1]);
        assert_eq!(f.active_set(&RatVector::from_ints(&[2])).unwrap(), vec![0]);
        let g = f.with_domain(HPolyhedron::from_ints(1, &[(&[1], 1)], &[])).unwrap();
        assert_eq!(g.value(&RatVector::from_ints(&[2])).unwrap(), None);
        assert_eq!(g.active_set(&RatVector::from_ints(&[2])), Err(CalcError::PointOutsideDomain));
    }

    #[test]
    fn epigraph_membership() {
        let epi = abs().epigraph();
        assert!(epi.contains(&RatVector::from_ints(&[-2, 2])).unwrap());
        assert!(!epi.contains(&RatVector::from_ints(&[-2, 1])).unwrap());
    }

    #[test]
    fn sums_and_maxima() {
        let shifted = MaxAffineFunction::from_ints(1, &[(&[1], -1), (&[-1], 1)]);
        let s = MaxAffineFunction::sum(&[abs(), shifted]).unwrap();
        assert_eq!(s.pieces().len(), 4);
        for x in -3..=3 {
            let x = RatVector::from_ints(&[x]);
            let expected = abs().value(&x).unwrap().unwrap() + num_traits::Signed::abs(&(&x[0] - int(1)));
            assert_eq!(s.value(&x).unwrap(), Some(expected));
        }
        let m = MaxAffineFunction::max_of(&[abs(), MaxAffineFunction::from_ints(1, &[(&[0], 2)])]).unwrap();
        assert_eq!(m.value(&RatVector::from_ints(&[1])).unwrap(), Some(int(2)));
    }

    #[test]
    fn affine_composition() {
        let f = MaxAffineFunction::from_ints(1, &[(&[1], 0), (&[0], 0)]);
        let b = AffineMap::linear(crate::exact::RatMatrix::from_ints(&[&[1, 1]]));
        let g = f.compose_affine(&b).unwrap();
        assert_eq!(g.value(&RatVector::from_ints(&[2, -5])).unwrap(), Some(int(0)));
        assert_eq!(g.value(&RatVector::from_ints(&[2, 5])).unwrap(), Some(int(7)));
    }

    #[test]
    fn json_forms() {
        let text = r#"{"n":1,"pieces":[{"a":[1],"b":0},{"a":[-1],"b":"0"}],"domain":null}"#;
        let f: MaxAffineFunction = serde_json::from_str(text).unwrap();
        assert_eq!(f, abs());
        let back: MaxAffineFunction = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<MaxAffineFunction>(r#"{"n":1,"pieces":[]}"#).is_err());
        let err = serde_json::from_str::<MaxAffineFunction>(r#"{"n":2,"pieces":[{"a":[1],"b":0}]}"#).unwrap_err();
        assert!(err.to_string().contains("pieces[0].a"));
    }
}
