//! Two-phase dense-tableau simplex over exact rationals with Bland's rule.
//!
//! Free variables are split as `x = x⁺ − x⁻`; every inequality row gets a
//! slack. Rows are sign-normalized so the right-hand side is nonnegative and
//! rows without a usable slack get an artificial. Phase one minimizes the sum
//! of artificials; its final reduced costs yield the Farkas certificate.

use num_traits::{One, Signed, Zero};

use super::rat::Rat;
use super::vector::RatVector;
use crate::error::{check_dim, Result};
use crate::polyhedron::HPolyhedron;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: RatVector },
    /// `ray` is a recession direction along which the objective improves without bound.
    Unbounded { feasible_point: RatVector, ray: RatVector },
    /// `y` with `y ≥ 0` on inequality rows, `yᵀ[A; E] = 0` and `yᵀ[b; d] < 0`;
    /// inequality rows come first, then equality rows.
    Infeasible { farkas_certificate: RatVector },
}

impl LpOutcome {
    pub fn optimal_value(&self) -> Option<&Rat> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LpStats {
    pub pivots: usize,
    pub rows: usize,
    pub cols: usize,
}

pub fn lp_solve(objective: &RatVector, p: &HPolyhedron, sense: Sense) -> Result<LpOutcome> {
    lp_solve_with_stats(objective, p, sense).map(|(outcome, _)| outcome)
}

pub fn lp_solve_with_stats(objective: &RatVector, p: &HPolyhedron, sense: Sense) -> Result<(LpOutcome, LpStats)> {
    check_dim(p.dim(), objective.dim())?;
    let mut t = Tableau::build(p);
    let stats_rows = t.rows.len();
    let stats_cols = t.ncols;

    if t.has_artificials() {
        t.phase_one();
        let residual = -&t.obj[t.ncols];
        if residual.is_positive() {
            let cert = t.farkas_certificate();
            debug_assert!(verify_farkas(p, &cert));
            let stats = LpStats { pivots: t.pivots, rows: stats_rows, cols: stats_cols };
            return Ok((LpOutcome::Infeasible { farkas_certificate: cert }, stats));
        }
        t.drive_out_artificials();
    }

    let cost = match sense {
        Sense::Minimize => objective.clone(),
        Sense::Maximize => -objective,
    };
    t.set_phase_two_costs(&cost);
    let outcome = match t.phase_two() {
        None => {
            let point = t.point();
            let value = objective.dot(&point);
            LpOutcome::Optimal { value, point }
        }
        Some(col) => {
            let feasible_point = t.point();
            let ray = t.ray(col);
            LpOutcome::Unbounded { feasible_point, ray }
        }
    };
    let stats = LpStats { pivots: t.pivots, rows: stats_rows, cols: stats_cols };
    Ok((outcome, stats))
}

/// Checks a Farkas certificate by direct multiplication.
pub fn verify_farkas(p: &HPolyhedron, y: &RatVector) -> bool {
    let m = p.ineqs().len();
    if y.dim() != m + p.eqs().len() {
        return false;
    }
    if (0..m).any(|i| y[i].is_negative()) {
        return false;
    }
    let mut combo = RatVector::zeros(p.dim());
    let mut rhs = Rat::zero();
    for (i, c) in p.ineqs().iter().chain(p.eqs()).enumerate() {
        combo = combo.add_scaled(&y[i], &c.normal);
        rhs += &y[i] * &c.rhs;
    }
    combo.is_zero() && rhs.is_negative()
}

struct Tableau {
    n: usize,
    /// Constraint rows; the last entry of each row is the right-hand side.
    rows: Vec<Vec<Rat>>,
    /// Reduced costs; the last entry is minus the current objective value.
    obj: Vec<Rat>,
    basis: Vec<usize>,
    ncols: usize,
    first_artificial: usize,
    /// Per row: the column that started as the unit vector of that row and its phase-one cost.
    unit_col: Vec<usize>,
    unit_cost: Vec<Rat>,
    /// Per row: −1 if the row was negated to make its right-hand side nonnegative.
    flipped: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    fn build(p: &HPolyhedron) -> Tableau {
        let n = p.dim();
        let m = p.ineqs().len();
        let k = p.eqs().len();
        let slack0 = 2 * n;
        let art0 = 2 * n + m;

        let mut flipped = Vec::with_capacity(m + k);
        let mut needs_art = Vec::with_capacity(m + k);
        for (i, c) in p.ineqs().iter().chain(p.eqs()).enumerate() {
            let neg = c.rhs.is_negative();
            flipped.push(neg);
            needs_art.push(i >= m || neg);
        }
        let n_art = needs_art.iter().filter(|&&b| b).count();
        let ncols = art0 + n_art;

        let mut rows = Vec::with_capacity(m + k);
        let mut basis = Vec::with_capacity(m + k);
        let mut unit_col = Vec::with_capacity(m + k);
        let mut unit_cost = Vec::with_capacity(m + k);
        let mut next_art = art0;
        for (i, c) in p.ineqs().iter().chain(p.eqs()).enumerate() {
            let s = if flipped[i] { -Rat::one() } else { Rat::one() };
            let mut row = vec![Rat::zero(); ncols + 1];
            for j in 0..n {
                if !c.normal[j].is_zero() {
                    row[j] = &s * &c.normal[j];
                    row[n + j] = -&row[j];
                }
            }
            if i < m {
                row[slack0 + i] = s.clone();
            }
            row[ncols] = &s * &c.rhs;
            if needs_art[i] {
                row[next_art] = Rat::one();
                basis.push(next_art);
                unit_col.push(next_art);
                unit_cost.push(Rat::one());
                next_art += 1;
            } else {
                basis.push(slack0 + i);
                unit_col.push(slack0 + i);
                unit_cost.push(Rat::zero());
            }
            rows.push(row);
        }
        Tableau {
            n,
            rows,
            obj: vec![Rat::zero(); ncols + 1],
            basis,
            ncols,
            first_artificial: art0,
            unit_col,
            unit_cost,
            flipped,
            pivots: 0,
        }
    }

    fn has_artificials(&self) -> bool {
        self.ncols > self.first_artificial
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let inv = Rat::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..=self.ncols).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rat>| {
            let factor = row[c].clone();
            if factor.is_zero() {
                return;
            }
            for &j in &nz {
                let delta = &factor * &pivot_row[j];
                row[j] -= delta;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Loads costs `c` and prices out the current basis.
    fn load_costs(&mut self, costs: &[Rat]) {
        let mut obj: Vec<Rat> = costs.to_vec();
        obj.push(Rat::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in self.rows[r].iter().enumerate() {
                if !v.is_zero() {
                    obj[j] -= cb * v;
                }
            }
        }
        self.obj = obj;
    }

    fn phase_one(&mut self) {
        let mut costs = vec![Rat::zero(); self.ncols];
        for c in costs.iter_mut().skip(self.first_artificial) {
            *c = Rat::one();
        }
        self.load_costs(&costs);
        let limit = self.ncols;
        let unbounded = self.run(limit);
        debug_assert!(unbounded.is_none(), "phase one is bounded below by zero");
    }

    /// Runs Bland's rule over columns `< limit`; returns the entering column on unboundedness.
    fn run(&mut self, limit: usize) -> Option<usize> {
        loop {
            let Some(c) = (0..limit).find(|&j| self.obj[j].is_negative()) else {
                return None;
            };
            let mut best: Option<(Rat, usize, usize)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[self.ncols] / &row[c];
                let better = match &best {
                    None => true,
                    Some((br, _, bb)) => ratio < *br || (ratio == *br && self.basis[r] < *bb),
                };
                if better {
                    best = Some((ratio, r, self.basis[r]));
                }
            }
            match best {
                None => return Some(c),
                Some((_, r, _)) => self.pivot(r, c),
            }
        }
    }

    fn farkas_certificate(&self) -> RatVector {
        let entries = (0..self.rows.len())
            .map(|r| {
                let y = &self.unit_cost[r] - &self.obj[self.unit_col[r]];
                if self.flipped[r] {
                    y
                } else {
                    -y
                }
            })
            .collect();
        RatVector::new(entries)
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows.len() {
            if self.basis[r] < self.first_artificial {
                continue;
            }
            if let Some(c) = (0..self.first_artificial).find(|&j| !self.rows[r][j].is_zero()) {
                self.pivot(r, c);
            }
        }
    }

    fn set_phase_two_costs(&mut self, cost: &RatVector) {
        let mut costs = vec![Rat::zero(); self.ncols];
        for j in 0..self.n {
            costs[j] = cost[j].clone();
            costs[self.n + j] = -&cost[j];
        }
        self.load_costs(&costs);
    }

    fn phase_two(&mut self) -> Option<usize> {
        let limit = self.first_artificial;
        self.run(limit)
    }

    fn values(&self) -> Vec<Rat> {
        let mut vals = vec![Rat::zero(); self.ncols];
        for (r, &b) in self.basis.iter().enumerate() {
            vals[b] = self.rows[r][self.ncols].clone();
        }
        vals
    }

    fn point(&self) -> RatVector {
        let vals = self.values();
        RatVector::new((0..self.n).map(|j| &vals[j] - &vals[self.n + j]).collect())
    }

    fn ray(&self, col: usize) -> RatVector {
        let mut d = vec![Rat::zero(); self.ncols];
        d[col] = Rat::one();
        for (r, &b) in self.basis.iter().enumerate() {
            d[b] = -&self.rows[r][col];
        }
        RatVector::new((0..self.n).map(|j| &d[j] - &d[self.n + j]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::int;

    fn check_optimal(p: &HPolyhedron, point: &RatVector) {
        assert!(p.contains(point).unwrap(), "optimal point must be feasible");
    }

    #[test]
    fn bounded_max() {
        let p = HPolyhedron::from_ints(2, &[(&[1, 0], 3)], &[(&[0, 1], 0)]);
        match lp_solve(&RatVector::from_ints(&[1, 0]), &p, Sense::Maximize).unwrap() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, int(3));
                assert_eq!(point[0], int(3));
                check_optimal(&p, &point);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_halfspace() {
        let p = HPolyhedron::from_ints(2, &[(&[-1, 0], 0)], &[]);
        match lp_solve(&RatVector::from_ints(&[1, 0]), &p, Sense::Maximize).unwrap() {
            LpOutcome::Unbounded { feasible_point, ray } => {
                assert!(p.contains(&feasible_point).unwrap());
                assert!(ray[0] > int(0));
                assert!(p.ineqs()[0].normal.dot(&ray) <= int(0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn contradictory_bounds() {
        let p = HPolyhedron::from_ints(1, &[(&[1], -1), (&[-1], 0)], &[]);
        match lp_solve(&RatVector::from_ints(&[1]), &p, Sense::Minimize).unwrap() {
            LpOutcome::Infeasible { farkas_certificate } => assert!(verify_farkas(&p, &farkas_certificate)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_equalities() {
        let p = HPolyhedron::from_ints(2, &[(&[1, 0], 5)], &[(&[1, 1], 1), (&[2, 2], 3)]);
        match lp_solve(&RatVector::zeros(2), &p, Sense::Minimize).unwrap() {
            LpOutcome::Infeasible { farkas_certificate } => assert!(verify_farkas(&p, &farkas_certificate)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_redundant_equalities() {
        // Duplicate equality rows leave an artificial basic at zero.
        let p = HPolyhedron::from_ints(2, &[(&[-1, 0], 0), (&[0, -1], 0)], &[(&[1, 1], 2), (&[2, 2], 4)]);
        let outcome = lp_solve(&RatVector::from_ints(&[1, 2]), &p, Sense::Minimize).unwrap();
        assert_eq!(outcome.optimal_value(), Some(&int(2)));
    }
}
