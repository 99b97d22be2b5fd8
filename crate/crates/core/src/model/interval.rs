use super::{ModelError, PolynomialExpr, QuadraticExpr};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    fn add(self, o: Interval) -> Interval {
        Interval::new(self.lo + o.lo, self.hi + o.hi)
    }

    fn scale(self, k: f64) -> Interval {
        if k >= 0.0 {
            Interval::new(k * self.lo, k * self.hi)
        } else {
            Interval::new(k * self.hi, k * self.lo)
        }
    }

    fn mul(self, o: Interval) -> Interval {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        Interval::new(
            p.iter().copied().fold(f64::INFINITY, f64::min),
            p.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    }

    /// `x^e` for `x` in the interval, exact for even powers straddling zero.
    fn powi(self, e: u32) -> Interval {
        if e == 0 {
            return Interval::point(1.0);
        }
        let a = self.lo.powi(e as i32);
        let b = self.hi.powi(e as i32);
        if e % 2 == 1 || self.lo >= 0.0 {
            Interval::new(a, b)
        } else if self.hi <= 0.0 {
            Interval::new(b, a)
        } else {
            Interval::new(0.0, a.max(b))
        }
    }
}

fn var_interval(bounds: &[(f64, f64)], i: usize) -> Result<Interval, ModelError> {
    let &(lo, hi) = bounds.get(i).ok_or(ModelError::DimensionMismatch {
        needed: i + 1,
        got: bounds.len(),
    })?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(ModelError::UnboundedVariable {
            name: format!("x{i}"),
        });
    }
    Ok(Interval::new(lo, hi))
}

/// Valid (not necessarily tight) range of `expr` over the box, built term by
/// term: `Q_ii x_i²`, `2 Q_ij x_i x_j`, `c_i x_i` and `d`.
pub fn interval_bound(expr: &QuadraticExpr, bounds: &[(f64, f64)]) -> Result<Interval, ModelError> {
    let mut acc = Interval::point(expr.constant_term());
    for (i, j, q) in expr.quad_entries() {
        let term = if i == j {
            var_interval(bounds, i)?.powi(2).scale(q)
        } else {
            var_interval(bounds, i)?
                .mul(var_interval(bounds, j)?)
                .scale(2.0 * q)
        };
        acc = acc.add(term);
    }
    for (i, c) in expr.linear_entries() {
        acc = acc.add(var_interval(bounds, i)?.scale(c));
    }
    Ok(acc)
}

/// Same as [`interval_bound`] for polynomial bodies, monomial by monomial.
pub fn interval_bound_poly(expr: &PolynomialExpr, bounds: &[(f64, f64)]) -> Result<Interval, ModelError> {
    let mut acc = Interval::point(0.0);
    for (m, c) in expr.terms() {
        let mut term = Interval::point(1.0);
        for &(i, e) in m.powers() {
            term = term.mul(var_interval(bounds, i)?.powi(e));
        }
        acc = acc.add(term.scale(c));
    }
    Ok(acc)
}
