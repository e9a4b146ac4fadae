use num_traits::{One, Signed, Zero};

use crate::calculus::{normal_cone, slice_epigraph_normals, subdifferential, MaxAffineFunction, Piece, RuleReport, PIECE_CAP};
use crate::error::{check_dim, CalcError, Result};
use crate::exact::{lp_solve, LpOutcome, Rat, RatVector, Sense};
use crate::polyhedron::ops::strict_slack;
use crate::polyhedron::{
    dd_convert, dd_convert_back, implicit_equalities, intersect_v, joint_ri_nonempty, minkowski_sum, project_coords,
    project_h, ri_point, set_equal, Constraint, Cone, HPolyhedron, VPolyhedron,
};

use super::map::PolyhedralMap;

/// `{u | (u, tail) ∈ K}` for a cone `K` whose last `tail.dim()` coordinates are fixed.
fn cone_slice(cone: &Cone, tail: &RatVector) -> Result<VPolyhedron> {
    let h = dd_convert_back(&cone.to_vpolyhedron())?;
    slice_h(&h, tail)
}

fn slice_h(h: &HPolyhedron, tail: &RatVector) -> Result<VPolyhedron> {
    let head = h.dim() - tail.dim();
    let mut assign: Vec<Option<Rat>> = vec![None; head];
    assign.extend(tail.iter().cloned().map(Some));
    dd_convert(&h.fix_coords(&assign)?)
}

/// Places the coordinates of a cone at `positions` of a larger space.
fn embed_cone(cone: &Cone, dim: usize, positions: &[usize]) -> Result<Cone> {
    check_dim(cone.dim(), positions.len())?;
    let lift = |v: &RatVector| {
        let mut out = RatVector::zeros(dim);
        for (i, &p) in positions.iter().enumerate() {
            out[p] = v[i].clone();
        }
        out
    };
    Cone::new(dim, cone.generators().iter().map(lift).collect(), cone.lineality().iter().map(lift).collect())
}

/// The V-representation points of a polyhedron together with one relative interior point.
///
/// Per-point quantities that are monotone along faces attain their smallest value at the
/// relative interior point, so intersecting over this list equals intersecting over the set.
fn base_points(h: &HPolyhedron) -> Result<Vec<RatVector>> {
    let mut out = dd_convert(h)?.points().to_vec();
    let ri = ri_point(h)?.point;
    if !out.contains(&ri) {
        out.push(ri);
    }
    Ok(out)
}

/// Intersection of several sets and whether they all coincide.
fn intersect_all(sets: &[VPolyhedron]) -> Result<(VPolyhedron, bool)> {
    let mut acc = sets.first().cloned().ok_or_else(|| CalcError::Internal("no base points".into()))?;
    let mut agree = true;
    for s in &sets[1..] {
        if agree && !set_equal(&acc, s)? {
            agree = false;
        }
        acc = intersect_v(&acc, s)?;
    }
    Ok((acc, agree))
}

/// `D*F(x̄, ȳ)(v) = {u | (u, −v) ∈ N((x̄, ȳ); gph F)}`; possibly empty.
pub fn coderivative(f: &PolyhedralMap, x: &RatVector, y: &RatVector, v: &RatVector) -> Result<VPolyhedron> {
    check_dim(f.p(), v.dim())?;
    let cone = f.graph_normals(x, y)?;
    cone_slice(&cone, &-v)
}

/// `N(x̄; dom F)` against `D*F(x̄, ȳ)(0)` over the points of `F(x̄)`.
pub fn domain_normal(f: &PolyhedralMap, x: &RatVector) -> Result<RuleReport> {
    check_dim(f.n(), x.dim())?;
    let dom = f.domain()?;
    if !dom.contains(x)? {
        return Err(CalcError::PointOutsideDomain);
    }
    let lhs = normal_cone(&dom, x)?;
    let zero = RatVector::zeros(f.p());
    let per_base = base_points(&f.value_at(x)?)?
        .iter()
        .map(|y| coderivative(f, x, y, &zero))
        .collect::<Result<Vec<_>>>()?;
    let (rhs, agree) = intersect_all(&per_base)?;
    Ok(RuleReport::build("domain", lhs.to_vpolyhedron(), rhs, true)?.with_per_base(agree))
}

/// Optimal value `μ(x̄) = min φ(x̄, y)` over `y ∈ F(x̄)` with a minimizer.
pub fn optimal_value(phi: &MaxAffineFunction, f: &PolyhedralMap, x: &RatVector) -> Result<(RatVector, Rat)> {
    check_dim(f.n() + f.p(), phi.n())?;
    check_dim(f.n(), x.dim())?;
    let p = f.p();
    let lifted = lifted_epigraph(phi, f)?;
    let mut assign: Vec<Option<Rat>> = x.iter().cloned().map(Some).collect();
    assign.extend(std::iter::repeat_n(None, p + 1));
    let slice = lifted.fix_coords(&assign)?;
    match lp_solve(&RatVector::unit(p + 1, p), &slice, Sense::Minimize)? {
        LpOutcome::Optimal { value, point } => Ok((point.slice(0, p), value)),
        LpOutcome::Unbounded { .. } => Err(CalcError::ValueUnattained),
        LpOutcome::Infeasible { .. } => Err(CalcError::PointOutsideDomain),
    }
}

/// `{(x, y, t) | (x, y) ∈ gph F, t ≥ φ(x, y)}`.
fn lifted_epigraph(phi: &MaxAffineFunction, f: &PolyhedralMap) -> Result<HPolyhedron> {
    let m = f.n() + f.p();
    phi.epigraph().intersect(&f.graph().embed_block(m + 1, 0)?)
}

/// `epi μ`, the projection of the lifted epigraph onto `(x, t)`.
pub fn optimal_value_epigraph(phi: &MaxAffineFunction, f: &PolyhedralMap) -> Result<HPolyhedron> {
    let (n, p) = (f.n(), f.p());
    let keep: Vec<usize> = (0..n).chain([n + p]).collect();
    project_h(&lifted_epigraph(phi, f)?, &keep)
}

/// `∂μ(x̄)` against `{w | (w, 0) ∈ ∂φ(x̄, ȳ) + N((x̄, ȳ); gph F)}`.
///
/// The left side is the subdifferential of the marginal function itself, read off its
/// projected epigraph. The right side is the exact slice that the union over `∂φ`
/// collapses to.
pub fn optimal_value_subdiff(phi: &MaxAffineFunction, f: &PolyhedralMap, x: &RatVector) -> Result<RuleReport> {
    let (y, mu) = optimal_value(phi, f, x)?;
    let mut top = x.clone();
    top.push(mu);
    let lhs = slice_epigraph_normals(&optimal_value_epigraph(phi, f)?, &top)?;
    let xy = x.concat(&y);
    let dphi = subdifferential(phi, &xy)?;
    let normals = f.graph_normals(x, &y)?;
    let sum = minkowski_sum(&dphi, &normals.to_vpolyhedron())?;
    let rhs = slice_h(&dd_convert_back(&sum)?, &RatVector::zeros(f.p()))?;
    let qualified = joint_ri_nonempty(&[phi.domain().clone(), f.graph().clone()])?;
    RuleReport::build("optimal-value", lhs, rhs, qualified)
}

fn monotone_certificate(g: &MaxAffineFunction) -> Result<()> {
    for (i, piece) in g.pieces().iter().enumerate() {
        if piece.a.iter().any(Signed::is_negative) {
            return Err(CalcError::MonotonicityUncertified(format!("piece {i} has a negative gradient entry")));
        }
    }
    for (i, row) in g.domain().ineqs().iter().enumerate() {
        if row.normal.iter().any(Signed::is_negative) {
            return Err(CalcError::MonotonicityUncertified(format!("domain row {i} is not downward closed")));
        }
    }
    if g.domain().eqs().iter().any(|c| !c.normal.is_zero()) {
        return Err(CalcError::MonotonicityUncertified("domain has equality rows".into()));
    }
    Ok(())
}

/// All tuples picking one index below each bound.
fn index_tuples(bounds: &[usize]) -> Result<Vec<Vec<usize>>> {
    let total = bounds.iter().try_fold(1usize, |acc, &b| acc.checked_mul(b)).unwrap_or(usize::MAX);
    if total > PIECE_CAP {
        return Err(CalcError::PieceCapExceeded { pieces: total, cap: PIECE_CAP });
    }
    let mut out = vec![Vec::new()];
    for &b in bounds {
        out = out.into_iter().flat_map(|t| (0..b).map(move |k| [t.clone(), vec![k]].concat())).collect();
    }
    Ok(out)
}

/// `g ∘ (f₁, …, f_p)` expanded into max-affine form for nondecreasing `g`.
pub fn compose_componentwise(g: &MaxAffineFunction, fs: &[MaxAffineFunction]) -> Result<MaxAffineFunction> {
    check_dim(g.n(), fs.len())?;
    monotone_certificate(g)?;
    let n = fs.first().map(MaxAffineFunction::n).ok_or_else(|| CalcError::Internal("no inner functions".into()))?;
    for f in fs {
        check_dim(n, f.n())?;
        if !f.has_full_domain() {
            return Err(CalcError::BasePointInvalid("inner functions must be real-valued".into()));
        }
    }
    let tuples = index_tuples(&fs.iter().map(|f| f.pieces().len()).collect::<Vec<_>>())?;
    let combine = |weights: &RatVector, tuple: &[usize]| {
        let mut a = RatVector::zeros(n);
        let mut b = Rat::zero();
        for (i, &k) in tuple.iter().enumerate() {
            let piece = &fs[i].pieces()[k];
            a = a.add_scaled(&weights[i], &piece.a);
            b += &weights[i] * &piece.b;
        }
        (a, b)
    };
    let count = g.pieces().len() * tuples.len();
    if count > PIECE_CAP {
        return Err(CalcError::PieceCapExceeded { pieces: count, cap: PIECE_CAP });
    }
    let mut pieces = Vec::with_capacity(count);
    for gp in g.pieces() {
        for t in &tuples {
            let (a, b) = combine(&gp.a, t);
            pieces.push(Piece::new(a, b + &gp.b));
        }
    }
    let mut rows = Vec::new();
    for row in g.domain().ineqs() {
        for t in &tuples {
            let (a, b) = combine(&row.normal, t);
            rows.push(Constraint::new(a, &row.rhs - b));
        }
    }
    MaxAffineFunction::new(n, pieces, HPolyhedron::new(n, rows, Vec::new())?)
}

/// Existence of `(ū, λ̄)` with `λ̄ ∈ ri(dom g)` and `λ̄ᵢ > fᵢ(ū)`.
fn componentwise_qualification(g: &MaxAffineFunction, fs: &[MaxAffineFunction]) -> Result<bool> {
    let p = g.n();
    let n = fs[0].n();
    let implicit = match implicit_equalities(g.domain()) {
        Ok(rows) => rows,
        Err(CalcError::EmptySet) => return Ok(false),
        Err(e) => return Err(e),
    };
    let lifted_dom = g.domain().embed_block(n + p, n)?;
    let mut rows = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        for piece in f.pieces() {
            let mut normal = piece.a.concat(&RatVector::zeros(p));
            normal[n + i] = -Rat::one();
            rows.push(Constraint::new(normal, -piece.b.clone()));
        }
    }
    let graph_rows = HPolyhedron::new(n + p, rows, Vec::new())?;
    Ok(strict_slack(&[(&lifted_dom, implicit), (&graph_rows, Vec::new())], n + p)?.is_some_and(|(_, t)| t.is_positive()))
}

/// `∂(g ∘ h)(x̄)` against `co{Σγᵢvᵢ}` over vertices `γ` of `∂g(ȳ)` and `vᵢ` of `∂fᵢ(x̄)`.
pub fn componentwise_chain(g: &MaxAffineFunction, fs: &[MaxAffineFunction], x: &RatVector) -> Result<RuleReport> {
    let composite = compose_componentwise(g, fs)?;
    check_dim(composite.n(), x.dim())?;
    let y = RatVector::new(fs.iter().map(|f| f.value_in_domain(x)).collect::<Result<Vec<_>>>()?);
    if !g.in_domain(&y)? {
        return Err(CalcError::PointOutsideDomain);
    }
    let lhs = subdifferential(&composite, x)?;
    let dg = subdifferential(g, &y)?;
    let dfs = fs.iter().map(|f| subdifferential(f, x)).collect::<Result<Vec<_>>>()?;
    if !dg.is_bounded() || dfs.iter().any(|d| !d.is_bounded()) {
        return Err(CalcError::UnboundedSubdifferential);
    }
    let tuples = index_tuples(&dfs.iter().map(|d| d.points().len()).collect::<Vec<_>>())?;
    let mut points = Vec::new();
    for gamma in dg.points() {
        for t in &tuples {
            let mut acc = RatVector::zeros(x.dim());
            for (i, &k) in t.iter().enumerate() {
                acc = acc.add_scaled(&gamma[i], &dfs[i].points()[k]);
            }
            points.push(acc);
        }
    }
    let rhs = VPolyhedron::from_points(x.dim(), points)?;
    RuleReport::build("componentwise", lhs, rhs, componentwise_qualification(g, fs)?)
}

/// `N(x̄; F⁻¹(Θ))` against `D*F(x̄, ȳ)(N(ȳ; Θ))`.
pub fn preimage_normal(f: &PolyhedralMap, theta: &HPolyhedron, x: &RatVector, y: &RatVector) -> Result<RuleReport> {
    check_dim(f.p(), theta.dim())?;
    let graph_normals = match f.graph_normals(x, y) {
        Ok(c) => c,
        Err(CalcError::PointOutsideGraph) => return Err(CalcError::BasePointInvalid("ȳ ∉ F(x̄)".into())),
        Err(e) => return Err(e),
    };
    if !theta.contains(y)? {
        return Err(CalcError::BasePointInvalid("ȳ ∉ Θ".into()));
    }
    let (n, p) = (f.n(), f.p());
    let lhs = normal_cone(&f.preimage_of(theta)?, x)?;
    let theta_normals = embed_cone(&normal_cone(theta, y)?, n + p, &(n..n + p).collect::<Vec<_>>())?;
    let rhs = cone_slice(&graph_normals.sum(&theta_normals)?, &RatVector::zeros(p))?;
    let qualified = joint_ri_nonempty(&[f.graph().clone(), theta.embed_block(n + p, n)?])?;
    RuleReport::build("preimage", lhs.to_vpolyhedron(), rhs, qualified)
}

fn require_base(map: &PolyhedralMap, x: &RatVector, y: &RatVector, what: &str) -> Result<()> {
    match map.graph_normals(x, y) {
        Ok(_) => Ok(()),
        Err(CalcError::PointOutsideGraph) => Err(CalcError::BasePointInvalid(format!("base point not in the graph of {what}"))),
        Err(e) => Err(e),
    }
}

/// `D*(F₁ + F₂)(x̄, ȳ)(v)` against `⋂ [D*F₁(x̄, ȳ₁)(v) + D*F₂(x̄, ȳ₂)(v)]` over splittings `ȳ = ȳ₁ + ȳ₂`.
pub fn coderivative_sum(
    f1: &PolyhedralMap,
    f2: &PolyhedralMap,
    x: &RatVector,
    y: &RatVector,
    v: &RatVector,
) -> Result<RuleReport> {
    let total = f1.sum(f2)?;
    require_base(&total, x, y, "F₁ + F₂")?;
    let (n, p) = (f1.n(), f1.p());
    let lhs = coderivative(&total, x, y, v)?;

    let splits = f1.value_at(x)?.embed_block(2 * p, 0)?.intersect(&f2.value_at(x)?.embed_block(2 * p, p)?)?;
    let mut splits = splits;
    for i in 0..p {
        let mut e = RatVector::zeros(2 * p);
        e[i] = Rat::one();
        e[p + i] = Rat::one();
        splits.add_eq(Constraint::new(e, y[i].clone()))?;
    }
    let per_base = base_points(&splits)?
        .iter()
        .map(|s| {
            let (y1, y2) = (s.slice(0, p), s.slice(p, 2 * p));
            minkowski_sum(&coderivative(f1, x, &y1, v)?, &coderivative(f2, x, &y2, v)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let (rhs, agree) = intersect_all(&per_base)?;

    let dim = n + 2 * p;
    let xs: Vec<usize> = (0..n).collect();
    let g1 = f1.graph().embed(dim, &[xs.clone(), (n..n + p).collect()].concat())?;
    let g2 = f2.graph().embed(dim, &[xs, (n + p..dim).collect()].concat())?;
    let qualified = joint_ri_nonempty(&[g1, g2])?;
    Ok(RuleReport::build("cod-sum", lhs, rhs, qualified)?.with_per_base(agree))
}

/// `D*(G ∘ F)(x̄, z̄)(w)` against `⋂_{ȳ ∈ M(x̄, z̄)} D*F(x̄, ȳ) ∘ D*G(ȳ, z̄)(w)`.
pub fn coderivative_chain(
    f: &PolyhedralMap,
    g: &PolyhedralMap,
    x: &RatVector,
    z: &RatVector,
    w: &RatVector,
) -> Result<RuleReport> {
    let comp = f.then(g)?;
    require_base(&comp, x, z, "G ∘ F")?;
    let (n, p, q) = (f.n(), f.p(), g.p());
    let lhs = coderivative(&comp, x, z, w)?;

    let mut assign: Vec<Option<Rat>> = vec![None; p];
    assign.extend(z.iter().cloned().map(Some));
    let middle = f.value_at(x)?.intersect(&g.graph().fix_coords(&assign)?)?;
    let dim = n + p + q;
    let tail = RatVector::zeros(p).concat(&-w);
    let per_base = base_points(&middle)?
        .iter()
        .map(|y| {
            let nf = embed_cone(&f.graph_normals(x, y)?, dim, &(0..n + p).collect::<Vec<_>>())?;
            let ng = embed_cone(&g.graph_normals(y, z)?, dim, &(n..dim).collect::<Vec<_>>())?;
            cone_slice(&nf.sum(&ng)?, &tail)
        })
        .collect::<Result<Vec<_>>>()?;
    let (rhs, agree) = intersect_all(&per_base)?;

    let qualified = joint_ri_nonempty(&[f.graph().embed_block(dim, 0)?, g.graph().embed_block(dim, n)?])?;
    Ok(RuleReport::build("cod-chain", lhs, rhs, qualified)?.with_per_base(agree))
}

/// `D*(F₁ ∩ F₂)(x̄, ȳ)(v)` against `{u | (u, −v) ∈ N(gph F₁) + N(gph F₂)}`.
///
/// The left side uses an irredundant description of the intersected graph.
pub fn coderivative_intersect(
    f1: &PolyhedralMap,
    f2: &PolyhedralMap,
    x: &RatVector,
    y: &RatVector,
    v: &RatVector,
) -> Result<RuleReport> {
    require_base(f1, x, y, "F₁")?;
    require_base(f2, x, y, "F₂")?;
    let meet = f1.intersect(f2)?.tidy_graph()?;
    let lhs = coderivative(&meet, x, y, v)?;
    let sum = f1.graph_normals(x, y)?.sum(&f2.graph_normals(x, y)?)?;
    let rhs = cone_slice(&sum, &-v)?;
    let qualified = joint_ri_nonempty(&[f1.graph().clone(), f2.graph().clone()])?;
    RuleReport::build("cod-intersect", lhs, rhs, qualified)
}

/// `D*S(x̄, ȳ)(v)` for `S(x) = {y | 0 ∈ F(x, y) + G(x, y)}` against the union over `w` of
/// `{u | (u, −v) ∈ D*F((x̄, ȳ), z̄)(w) + D*G((x̄, ȳ), −z̄)(w)}`, taken as a projection.
pub fn solution_map_coderivative(
    f: &PolyhedralMap,
    g: &PolyhedralMap,
    x: &RatVector,
    y: &RatVector,
    v: &RatVector,
) -> Result<RuleReport> {
    let n = x.dim();
    check_dim(f.n(), n + y.dim())?;
    let s = PolyhedralMap::solution_map(f, g, n)?;
    require_base(&s, x, y, "S")?;
    let (m, q) = (f.n(), f.p());
    let xy = x.concat(y);
    let residual = f.value_at(&xy)?.intersect(&g.value_at(&xy)?.negated())?;
    if !residual.is_feasible() {
        return Err(CalcError::NoResidualPoint);
    }
    let lhs = coderivative(&s, x, y, v)?;

    let dim = m + 2 * q;
    let per_base = base_points(&residual)?
        .iter()
        .map(|z| {
            let head: Vec<usize> = (0..m).collect();
            let nf = embed_cone(&f.graph_normals(&xy, z)?, dim, &[head.clone(), (m..m + q).collect()].concat())?;
            let ng = embed_cone(&g.graph_normals(&xy, &-z)?, dim, &[head, (m + q..dim).collect()].concat())?;
            let mut lifted = dd_convert_back(&nf.sum(&ng)?.to_vpolyhedron())?;
            for i in 0..q {
                let mut e = RatVector::zeros(dim);
                e[m + i] = Rat::one();
                e[m + q + i] = -Rat::one();
                lifted.add_eq(Constraint::new(e, Rat::zero()))?;
            }
            let projected = project_coords(&dd_convert(&lifted)?, &(0..m).collect::<Vec<_>>())?;
            slice_h(&dd_convert_back(&projected)?, &-v)
        })
        .collect::<Result<Vec<_>>>()?;
    let (rhs, agree) = intersect_all(&per_base)?;

    let reflected = g.graph().reflect_tail(m)?;
    let qualified = joint_ri_nonempty(&[f.graph().clone(), reflected])?;
    Ok(RuleReport::build("solution-map", lhs, rhs, qualified)?.with_per_base(agree))
}
