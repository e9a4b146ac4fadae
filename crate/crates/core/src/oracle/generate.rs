use num_traits::One;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calculus::{MaxAffineFunction, Piece};
use crate::exact::{Rat, RatMatrix, RatVector};
use crate::polyhedron::{AffineMap, Constraint, HPolyhedron};
use crate::setvalued::PolyhedralMap;

/// Every rule the fuzz harness drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    Intersection,
    Sum,
    Chain,
    Max,
    OptimalValue,
    Componentwise,
    Preimage,
    CodSum,
    CodChain,
    CodIntersect,
    Domain,
    SolutionMap,
}

impl RuleKind {
    pub const ALL: [RuleKind; 12] = [
        RuleKind::Intersection,
        RuleKind::Sum,
        RuleKind::Chain,
        RuleKind::Max,
        RuleKind::OptimalValue,
        RuleKind::Componentwise,
        RuleKind::Preimage,
        RuleKind::CodSum,
        RuleKind::CodChain,
        RuleKind::CodIntersect,
        RuleKind::Domain,
        RuleKind::SolutionMap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Intersection => "intersection",
            RuleKind::Sum => "sum",
            RuleKind::Chain => "chain",
            RuleKind::Max => "max",
            RuleKind::OptimalValue => "optimal-value",
            RuleKind::Componentwise => "componentwise",
            RuleKind::Preimage => "preimage",
            RuleKind::CodSum => "cod-sum",
            RuleKind::CodChain => "cod-chain",
            RuleKind::CodIntersect => "cod-intersect",
            RuleKind::Domain => "domain",
            RuleKind::SolutionMap => "solution-map",
        }
    }

    pub fn parse(name: &str) -> Option<RuleKind> {
        RuleKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// Knobs of the random instance generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub seed: u64,
    /// Caps on the dimensions `n`, `p`, `q`; rules with lifted spaces clamp further.
    pub dims: [usize; 3],
    pub max_rows: usize,
    pub max_pieces: usize,
    /// Numerators lie in `[−bound, bound]`, denominators in `[1, bound]`.
    pub coef_bound: i64,
    /// When false, families are built so that the relative-interior qualification fails.
    pub qualified: bool,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        InstanceSpec { seed: 0, dims: [2, 2, 2], max_rows: 4, max_pieces: 4, coef_bound: 4, qualified: true }
    }
}

impl InstanceSpec {
    pub fn with_seed(seed: u64) -> Self {
        InstanceSpec { seed, ..Self::default() }
    }
}

/// A generated instance together with its base data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Instance {
    Intersection { sets: Vec<HPolyhedron>, x: RatVector },
    Sum { fns: Vec<MaxAffineFunction>, x: RatVector },
    Chain { f: MaxAffineFunction, map: AffineMap, x: RatVector },
    Max { fns: Vec<MaxAffineFunction>, x: RatVector },
    OptimalValue { phi: MaxAffineFunction, map: PolyhedralMap, x: RatVector },
    Componentwise { g: MaxAffineFunction, fns: Vec<MaxAffineFunction>, x: RatVector },
    Preimage { map: PolyhedralMap, theta: HPolyhedron, x: RatVector, y: RatVector },
    CodSum { f1: PolyhedralMap, f2: PolyhedralMap, x: RatVector, y: RatVector, v: RatVector },
    CodChain { f: PolyhedralMap, g: PolyhedralMap, x: RatVector, z: RatVector, w: RatVector },
    CodIntersect { f1: PolyhedralMap, f2: PolyhedralMap, x: RatVector, y: RatVector, v: RatVector },
    Domain { map: PolyhedralMap, x: RatVector },
    SolutionMap { f: PolyhedralMap, g: PolyhedralMap, x: RatVector, y: RatVector, v: RatVector },
}

impl Instance {
    pub fn kind(&self) -> RuleKind {
        match self {
            Instance::Intersection { .. } => RuleKind::Intersection,
            Instance::Sum { .. } => RuleKind::Sum,
            Instance::Chain { .. } => RuleKind::Chain,
            Instance::Max { .. } => RuleKind::Max,
            Instance::OptimalValue { .. } => RuleKind::OptimalValue,
            Instance::Componentwise { .. } => RuleKind::Componentwise,
            Instance::Preimage { .. } => RuleKind::Preimage,
            Instance::CodSum { .. } => RuleKind::CodSum,
            Instance::CodChain { .. } => RuleKind::CodChain,
            Instance::CodIntersect { .. } => RuleKind::CodIntersect,
            Instance::Domain { .. } => RuleKind::Domain,
            Instance::SolutionMap { .. } => RuleKind::SolutionMap,
        }
    }
}

/// Random exact data drawn from a seeded stream.
pub struct Gen<'a> {
    rng: &'a mut ChaCha8Rng,
    bound: i64,
    max_rows: usize,
    max_pieces: usize,
}

impl<'a> Gen<'a> {
    pub fn new(rng: &'a mut ChaCha8Rng, spec: &InstanceSpec) -> Self {
        Gen { rng, bound: spec.coef_bound.max(1), max_rows: spec.max_rows.max(1), max_pieces: spec.max_pieces.max(1) }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    /// A small rational; a quarter of the draws get a nontrivial denominator.
    pub fn rat(&mut self) -> Rat {
        let num = self.int(-self.bound, self.bound);
        let den = if self.chance(0.25) { self.int(1, self.bound) } else { 1 };
        Rat::new(num.into(), den.into())
    }

    fn positive(&mut self) -> Rat {
        let num = self.int(1, self.bound);
        let den = if self.chance(0.25) { self.int(1, self.bound) } else { 1 };
        Rat::new(num.into(), den.into())
    }

    pub fn int_vector(&mut self, dim: usize) -> RatVector {
        RatVector::new((0..dim).map(|_| Rat::from_integer(self.int(-self.bound, self.bound).into())).collect())
    }

    pub fn vector(&mut self, dim: usize) -> RatVector {
        RatVector::new((0..dim).map(|_| self.rat()).collect())
    }

    pub fn nonzero_vector(&mut self, dim: usize) -> RatVector {
        loop {
            let v = self.int_vector(dim);
            if !v.is_zero() {
                return v;
            }
        }
    }

    fn nonnegative_vector(&mut self, dim: usize) -> RatVector {
        RatVector::new((0..dim).map(|_| Rat::from_integer(self.int(0, self.bound).into())).collect())
    }

    /// A polyhedron with `anchor` strictly inside every inequality and `base` in the set;
    /// some rows are made active at `base` and an equality through both points is added
    /// now and then.
    pub fn set_through(&mut self, anchor: &RatVector, base: &RatVector) -> HPolyhedron {
        self.set_through_head(anchor, base, anchor.dim())
    }

    /// As `set_through`, with about a third of the rows involving only the first `head`
    /// coordinates.
    pub fn set_through_head(&mut self, anchor: &RatVector, base: &RatVector, head: usize) -> HPolyhedron {
        let dim = anchor.dim();
        let rows = self.int(1, self.max_rows as i64) as usize;
        let mut ineqs = Vec::with_capacity(rows);
        for _ in 0..rows {
            let a = if head > 0 && head < dim && self.chance(0.35) {
                self.nonzero_vector(head).concat(&RatVector::zeros(dim - head))
            } else {
                self.nonzero_vector(dim)
            };
            let at_anchor = a.dot(anchor);
            let at_base = a.dot(base);
            let rhs = if at_base > at_anchor && self.chance(0.6) {
                at_base
            } else {
                std::cmp::max(at_anchor, at_base) + self.positive()
            };
            ineqs.push(Constraint::new(a, rhs));
        }
        let mut eqs = Vec::new();
        if dim >= 2 && self.chance(0.2) {
            let d = base - anchor;
            let mut e = self.nonzero_vector(dim);
            if !d.is_zero() {
                e = e.add_scaled(&(-(e.dot(&d)) / d.norm_squared()), &d);
            }
            if !e.is_zero() {
                let rhs = e.dot(anchor);
                eqs.push(Constraint::new(e, rhs));
            }
        }
        HPolyhedron::new(dim, ineqs, eqs).expect("consistent dims")
    }

    /// A polyhedron with `anchor` strictly inside every row and equality-free.
    pub fn set_around(&mut self, anchor: &RatVector) -> HPolyhedron {
        let dim = anchor.dim();
        let rows = self.int(1, self.max_rows as i64) as usize;
        let ineqs = (0..rows)
            .map(|_| {
                let a = self.nonzero_vector(dim);
                let rhs = a.dot(anchor) + self.positive();
                Constraint::new(a, rhs)
            })
            .collect();
        HPolyhedron::new(dim, ineqs, Vec::new()).expect("consistent dims")
    }

    /// Pieces whose maximum at `x` equals `value`; the first piece is always active.
    pub fn pieces_at(&mut self, x: &RatVector, value: &Rat, gradient: impl Fn(&mut Self) -> RatVector) -> Vec<Piece> {
        let count = self.int(1, self.max_pieces as i64) as usize;
        (0..count)
            .map(|i| {
                let a = gradient(self);
                let mut b = value - a.dot(x);
                if i > 0 && self.chance(0.4) {
                    b -= self.positive();
                }
                Piece::new(a, b)
            })
            .collect()
    }

    /// A max-affine function on `dom` with prescribed value at `x`.
    pub fn function_at(&mut self, x: &RatVector, value: &Rat, domain: HPolyhedron) -> MaxAffineFunction {
        let n = x.dim();
        let pieces = self.pieces_at(x, value, |g| g.int_vector(n));
        MaxAffineFunction::new(n, pieces, domain).expect("consistent dims")
    }

    /// A bounded polytope containing `anchor` strictly and `base`.
    pub fn box_through(&mut self, anchor: &RatVector, base: &RatVector) -> HPolyhedron {
        let mut p = self.set_through(anchor, base);
        let dim = anchor.dim();
        for i in 0..dim {
            let hi = std::cmp::max(anchor[i].clone(), base[i].clone()) + Rat::from_integer(self.int(0, 2).into());
            let lo = std::cmp::min(anchor[i].clone(), base[i].clone()) - Rat::from_integer(self.int(0, 2).into());
            let hi = if hi == anchor[i] { hi + Rat::one() } else { hi };
            let lo = if lo == anchor[i] { lo - Rat::one() } else { lo };
            p.add_ineq(Constraint::new(RatVector::unit(dim, i), hi)).expect("dims");
            p.add_ineq(Constraint::new(-RatVector::unit(dim, i), -lo)).expect("dims");
        }
        p
    }

    fn map_through(&mut self, n: usize, anchor: &RatVector, base: &RatVector) -> PolyhedralMap {
        let graph = self.set_through_head(anchor, base, n);
        PolyhedralMap::new(n, anchor.dim() - n, graph).expect("consistent dims")
    }

    /// A direction `v` with `(u, −v)` normal to `gph F` at `(x, y)` for some `u`: a random
    /// combination of the rows active there, so the coderivative at `v` is nonempty. One
    /// draw in five is a plain random vector instead.
    pub fn coderivative_direction(&mut self, map: Option<PolyhedralMap>, x: &RatVector, y: &RatVector) -> RatVector {
        let p = y.dim();
        let Some(map) = map.filter(|_| !self.chance(0.2)) else {
            return self.int_vector(p);
        };
        let point = x.concat(y);
        let graph = map.graph();
        let mut normal = RatVector::zeros(point.dim());
        for i in graph.active_rows(&point) {
            let w = Rat::from_integer(self.int(0, 2).into());
            normal = normal.add_scaled(&w, &graph.ineqs()[i].normal);
        }
        for e in graph.eqs() {
            let w = Rat::from_integer(self.int(-2, 2).into());
            normal = normal.add_scaled(&w, &e.normal);
        }
        -normal.slice(x.dim(), x.dim() + p)
    }

    fn dim(&mut self, cap: usize) -> usize {
        self.int(1, cap.max(1) as i64) as usize
    }
}

/// Draws one instance of the given kind.
pub fn gen_instance(rng: &mut ChaCha8Rng, spec: &InstanceSpec, kind: RuleKind) -> Instance {
    let mut g = Gen::new(rng, spec);
    let [cap_n, cap_p, cap_q] = spec.dims;
    match kind {
        RuleKind::Intersection => {
            let n = g.dim(cap_n.min(4));
            let x = g.int_vector(n);
            if spec.qualified {
                let anchor = g.vector(n);
                let m = g.int(2, 3) as usize;
                let sets = (0..m).map(|_| g.set_through(&anchor, &x)).collect();
                Instance::Intersection { sets, x }
            } else {
                let (p1, p2) = reflected_pair(&mut g, &x);
                Instance::Intersection { sets: vec![p1, p2], x }
            }
        }
        RuleKind::Sum => {
            let n = g.dim(cap_n.min(3));
            let x = g.int_vector(n);
            let m = g.int(2, 3) as usize;
            let domains: Vec<HPolyhedron> = if spec.qualified {
                let anchor = g.vector(n);
                (0..m).map(|_| if g.chance(0.5) { HPolyhedron::universe(n) } else { g.set_through(&anchor, &x) }).collect()
            } else {
                let (p1, p2) = reflected_pair(&mut g, &x);
                let mut out = vec![p1, p2];
                out.extend((2..m).map(|_| HPolyhedron::universe(n)));
                out
            };
            let fns = domains
                .into_iter()
                .map(|d| {
                    let value = g.rat();
                    g.function_at(&x, &value, d)
                })
                .collect();
            Instance::Sum { fns, x }
        }
        RuleKind::Chain => {
            let n = g.dim(cap_n.min(3));
            let p = g.dim(cap_p.min(3));
            let a = RatMatrix::new((0..p).map(|_| g.int_vector(n)).collect(), n).expect("rectangular");
            let map = AffineMap::new(a, g.int_vector(p)).expect("consistent dims");
            let x = g.int_vector(n);
            let y = map.apply(&x).expect("dims");
            let domain = if g.chance(0.3) {
                HPolyhedron::universe(p)
            } else {
                let xhat = g.vector(n);
                let anchor = map.apply(&xhat).expect("dims");
                g.set_through(&anchor, &y)
            };
            let value = g.rat();
            let f = g.function_at(&y, &value, domain);
            Instance::Chain { f, map, x }
        }
        RuleKind::Max => {
            let n = g.dim(cap_n.min(3));
            let x = g.int_vector(n);
            let m = g.int(1, 3) as usize;
            let top = g.rat();
            let fns = (0..m)
                .map(|i| {
                    let domain = if g.chance(0.5) { HPolyhedron::universe(n) } else { g.set_around(&x) };
                    let value = if i == 0 || g.chance(0.6) { top.clone() } else { &top - g.positive() };
                    g.function_at(&x, &value, domain)
                })
                .collect();
            Instance::Max { fns, x }
        }
        RuleKind::OptimalValue => {
            let n = g.dim(cap_n.min(3));
            let p = g.dim(cap_p.min(3));
            let anchor = g.vector(n + p);
            let base = g.int_vector(n + p);
            let map = PolyhedralMap::new(n, p, g.box_through(&anchor, &base)).expect("dims");
            let domain = if g.chance(0.5) { HPolyhedron::universe(n + p) } else { g.set_through(&anchor, &base) };
            let value = g.rat();
            let phi = g.function_at(&base, &value, domain);
            Instance::OptimalValue { phi, map, x: base.slice(0, n) }
        }
        RuleKind::Componentwise => {
            let n = g.dim(cap_n.min(3));
            let p = g.dim(cap_p.min(3));
            let x = g.int_vector(n);
            let fns: Vec<MaxAffineFunction> = (0..p)
                .map(|_| {
                    let value = g.rat();
                    g.function_at(&x, &value, HPolyhedron::universe(n))
                })
                .collect();
            let y = RatVector::new(fns.iter().map(|f| f.value(&x).expect("dims").expect("full domain")).collect());
            let value = g.rat();
            let pieces = g.pieces_at(&y, &value, |g| g.nonnegative_vector(p));
            let outer = MaxAffineFunction::new(p, pieces, HPolyhedron::universe(p)).expect("dims");
            Instance::Componentwise { g: outer, fns, x }
        }
        RuleKind::Preimage => {
            let n = g.dim(cap_n.min(3));
            let p = g.dim(cap_p.min(3));
            let anchor = g.vector(n + p);
            let base = g.int_vector(n + p);
            let map = g.map_through(n, &anchor, &base);
            let y = base.slice(n, n + p);
            let theta = g.set_through(&anchor.slice(n, n + p), &y);
            Instance::Preimage { map, theta, x: base.slice(0, n), y }
        }
        RuleKind::CodSum => {
            let n = g.dim(cap_n.min(2));
            let p = g.dim(cap_p.min(2));
            let ax = g.vector(n);
            let x = g.int_vector(n);
            let (a1, a2) = (g.vector(p), g.vector(p));
            let (y1, y2) = (g.int_vector(p), g.int_vector(p));
            let f1 = g.map_through(n, &ax.concat(&a1), &x.concat(&y1));
            let f2 = g.map_through(n, &ax.concat(&a2), &x.concat(&y2));
            let y = &y1 + &y2;
            let v = g.coderivative_direction(f1.sum(&f2).ok(), &x, &y);
            Instance::CodSum { f1, f2, x, y, v }
        }
        RuleKind::CodChain => {
            let n = g.dim(cap_n.min(2));
            let p = g.dim(cap_p.min(2));
            let q = g.dim(cap_q.min(2));
            let (ax, ay, az) = (g.vector(n), g.vector(p), g.vector(q));
            let (x, y, z) = (g.int_vector(n), g.int_vector(p), g.int_vector(q));
            let f = g.map_through(n, &ax.concat(&ay), &x.concat(&y));
            let gm = g.map_through(p, &ay.concat(&az), &y.concat(&z));
            let w = g.coderivative_direction(f.then(&gm).ok(), &x, &z);
            Instance::CodChain { f, g: gm, x, z, w }
        }
        RuleKind::CodIntersect => {
            let n = g.dim(cap_n.min(3));
            let p = g.dim(cap_p.min(3));
            let anchor = g.vector(n + p);
            let base = g.int_vector(n + p);
            let (f1, f2) = if spec.qualified {
                (g.map_through(n, &anchor, &base), g.map_through(n, &anchor, &base))
            } else {
                let (g1, g2) = reflected_pair(&mut g, &base);
                (PolyhedralMap::new(n, p, g1).expect("dims"), PolyhedralMap::new(n, p, g2).expect("dims"))
            };
            let (x, y) = (base.slice(0, n), base.slice(n, n + p));
            let v = g.coderivative_direction(f1.intersect(&f2).ok(), &x, &y);
            Instance::CodIntersect { f1, f2, x, y, v }
        }
        RuleKind::Domain => {
            let n = g.dim(cap_n.min(3));
            let p = g.dim(cap_p.min(3));
            let anchor = g.vector(n + p);
            let base = g.int_vector(n + p);
            let map = g.map_through(n, &anchor, &base);
            Instance::Domain { map, x: base.slice(0, n) }
        }
        RuleKind::SolutionMap => {
            let n = g.dim(cap_n.min(2));
            let p = g.dim(cap_p.min(2));
            let q = g.dim(cap_q.min(2));
            let m = n + p;
            let (a, c) = (g.vector(m), g.vector(q));
            let (xy, z) = (g.int_vector(m), g.int_vector(q));
            let f = g.map_through(m, &a.concat(&c), &xy.concat(&z));
            let gm = g.map_through(m, &a.concat(&-&c), &xy.concat(&-&z));
            let (x, y) = (xy.slice(0, n), xy.slice(n, m));
            let v = g.coderivative_direction(PolyhedralMap::solution_map(&f, &gm, n).ok(), &x, &y);
            Instance::SolutionMap { f, g: gm, x, y, v }
        }
    }
}

/// Two polyhedra meeting at `x` from opposite sides of a hyperplane through it, so
/// their relative interiors are disjoint.
fn reflected_pair(g: &mut Gen<'_>, x: &RatVector) -> (HPolyhedron, HPolyhedron) {
    let n = x.dim();
    let a = g.nonzero_vector(n);
    let step = a.scale(&g.positive());
    let inside = x - &step;
    let outside = x + &step;
    let mut p1 = g.set_through(&inside, x);
    p1.add_ineq(Constraint::new(a.clone(), a.dot(x))).expect("dims");
    let mut p2 = if g.chance(0.5) { g.set_through(&outside, x) } else { HPolyhedron::universe(n) };
    p2.add_ineq(Constraint::new(-&a, -a.dot(x))).expect("dims");
    (p1, p2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use rand::SeedableRng;

    #[test]
    fn same_seed_same_bytes() {
        for kind in RuleKind::ALL {
            let draw = || {
                let mut rng = ChaCha8Rng::seed_from_u64(2);
                serde_json::to_string(&gen_instance(&mut rng, &InstanceSpec::with_seed(2), kind)).unwrap()
            };
            assert_eq!(draw(), draw());
        }
    }

    #[test]
    fn names_round_trip() {
        for kind in RuleKind::ALL {
            assert_eq!(RuleKind::parse(kind.name()), Some(kind));
        }
        assert_eq!(RuleKind::parse("nope"), None);
    }

    #[test]
    fn sets_contain_their_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let spec = InstanceSpec::with_seed(1);
        let mut g = Gen::new(&mut rng, &spec);
        for _ in 0..20 {
            let anchor = g.vector(3);
            let base = g.int_vector(3);
            let p = g.set_through(&anchor, &base);
            assert!(p.contains(&base).unwrap());
            assert!(p.ineqs().iter().all(|c| c.slack(&anchor).is_positive()));
            let b = g.box_through(&anchor, &base);
            assert!(b.contains(&base).unwrap() && b.ineqs().iter().all(|c| c.slack(&anchor).is_positive()));
        }
    }
}
