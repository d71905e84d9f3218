//! Exact nonnegative piecewise-linear functions on compact one-dimensional
//! spaces.
//!
//! A [`PlFunction`] interpolates linearly between breakpoints inside each
//! component of its space; every component endpoint is itself a breakpoint.
//! All derived data — values, roots, superlevel sets, minima, domination
//! constants — stays in exact rational arithmetic.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::region::{Interval, Region, Space};
use crate::scalar::{format_rat, parse_rat, rat_int, Rat, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPl", into = "RawPl")]
pub struct PlFunction {
    space: Space,
    breakpoints: Vec<Rat>,
    values: Vec<Rat>,
}

#[derive(Serialize, Deserialize)]
struct RawPl {
    space: Region,
    bp: Vec<String>,
    val: Vec<String>,
}

impl TryFrom<RawPl> for PlFunction {
    type Error = Error;
    fn try_from(raw: RawPl) -> Result<Self> {
        let space = Space::new(raw.space)?;
        let bp = raw.bp.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>()?;
        let val = raw.val.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>()?;
        PlFunction::new(space, bp, val)
    }
}

impl From<PlFunction> for RawPl {
    fn from(f: PlFunction) -> RawPl {
        RawPl {
            space: f.space.region().clone(),
            bp: f.breakpoints.iter().map(format_rat).collect(),
            val: f.values.iter().map(format_rat).collect(),
        }
    }
}

/// An epsilon cutdown `(f - eps)_+` together with the epsilon that produced
/// it.
#[derive(Clone, Debug)]
pub struct CutdownResult {
    pub epsilon: Rat,
    pub function: PlFunction,
}

/// A closed component of a compact 1D space; `lo == hi` for isolated points.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub lo: Rat,
    pub hi: Rat,
}

impl PlFunction {
    /// Validates and builds a function. The space must be compact and
    /// one-dimensional; breakpoints must be strictly increasing, lie in the
    /// space, include every component endpoint, and carry nonnegative values.
    pub fn new(space: Space, breakpoints: Vec<Rat>, values: Vec<Rat>) -> Result<Self> {
        if space.dim() != 1 {
            return Err(Error::DimMismatch(1, space.dim()));
        }
        if !space.is_compact() {
            return Err(Error::NotCompact);
        }
        if breakpoints.len() != values.len() {
            return Err(Error::BadFunction("breakpoint/value length mismatch".into()));
        }
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::BadFunction("breakpoints must strictly increase".into()));
            }
        }
        for v in &values {
            if v.is_negative() {
                return Err(Error::BadFunction("negative value".into()));
            }
        }
        for x in &breakpoints {
            if !space.region().contains_point(std::slice::from_ref(x))? {
                return Err(Error::BadFunction("breakpoint outside the space".into()));
            }
        }
        let f = PlFunction { space, breakpoints, values };
        for c in f.components() {
            if f.index_of(&c.lo).is_none() || f.index_of(&c.hi).is_none() {
                return Err(Error::BadFunction(
                    "every component endpoint must be a breakpoint".into(),
                ));
            }
        }
        Ok(f)
    }

    /// The zero function on a space.
    pub fn zero(space: &Space) -> Result<Self> {
        PlFunction::constant(space, Rat::zero())
    }

    /// The constant function `c >= 0` on a space.
    pub fn constant(space: &Space, c: Rat) -> Result<Self> {
        if c.is_negative() {
            return Err(Error::BadFunction("negative constant".into()));
        }
        let mut bp = Vec::new();
        for comp in components_of(space)? {
            bp.push(comp.lo.clone());
            if comp.hi != comp.lo {
                bp.push(comp.hi.clone());
            }
        }
        let values = vec![c; bp.len()];
        PlFunction::new(space.clone(), bp, values)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn breakpoints(&self) -> &[Rat] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// Closed components of the underlying space, in increasing order.
    pub fn components(&self) -> Vec<Component> {
        components_of(&self.space).expect("space validated at construction")
    }

    fn index_of(&self, x: &Rat) -> Option<usize> {
        self.breakpoints.binary_search(x).ok()
    }

    /// Exact value at `x`; errors if `x` lies outside the space.
    pub fn eval(&self, x: &Rat) -> Result<Rat> {
        if !self.space.region().contains_point(std::slice::from_ref(x))? {
            return Err(Error::OutsideDomain);
        }
        match self.breakpoints.binary_search(x) {
            Ok(i) => Ok(self.values[i].clone()),
            Err(i) => {
                // Strictly between bp[i-1] and bp[i]; both exist because
                // component endpoints are breakpoints and x lies inside a
                // component.
                let (x0, v0) = (&self.breakpoints[i - 1], &self.values[i - 1]);
                let (x1, v1) = (&self.breakpoints[i], &self.values[i]);
                Ok(v0 + (v1 - v0) * (x - x0) / (x1 - x0))
            }
        }
    }

    /// Maximum value; attained at a breakpoint.
    pub fn max_value(&self) -> Rat {
        self.values.iter().cloned().fold(Rat::zero(), |a, b| a.max(b))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Rat::is_zero)
    }

    /// Consecutive breakpoint pairs inside one component: the linear pieces.
    /// Degenerate components yield no pieces.
    fn pieces(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for comp in self.components() {
            if comp.lo == comp.hi {
                continue;
            }
            let lo = self.index_of(&comp.lo).expect("validated");
            let hi = self.index_of(&comp.hi).expect("validated");
            for i in lo..hi {
                out.push((i, i + 1));
            }
        }
        out
    }

    /// Rebuilds the function on a refined breakpoint set. Extra points
    /// outside the space are ignored.
    fn refine(&self, extra: &[Rat]) -> PlFunction {
        let mut bp = self.breakpoints.clone();
        for x in extra {
            if self.space.region().contains_point(std::slice::from_ref(x)).unwrap_or(false) {
                bp.push(x.clone());
            }
        }
        bp.sort();
        bp.dedup();
        let values: Vec<Rat> = bp.iter().map(|x| self.eval(x).expect("inside space")).collect();
        PlFunction { space: self.space.clone(), breakpoints: bp, values }
    }

    /// Roots of `f(x) = t` strictly inside linear pieces.
    fn crossings(&self, t: &Rat) -> Vec<Rat> {
        let mut roots = Vec::new();
        for (i, j) in self.pieces() {
            let (x0, v0) = (&self.breakpoints[i], &self.values[i]);
            let (x1, v1) = (&self.breakpoints[j], &self.values[j]);
            if v0 == v1 {
                continue;
            }
            let r = x0 + (x1 - x0) * (t - v0) / (v1 - v0);
            if &r > x0 && &r < x1 {
                roots.push(r);
            }
        }
        roots
    }

    /// Pointwise `max(f - eps, 0)` for `eps > 0`, with breakpoints inserted
    /// exactly where `f` crosses `eps`.
    pub fn cutdown(&self, eps: &Rat) -> Result<CutdownResult> {
        if !eps.is_positive() {
            return Err(Error::NotPositive("epsilon"));
        }
        let refined = self.refine(&self.crossings(eps));
        let values = refined
            .values
            .iter()
            .map(|v| if v > eps { v - eps } else { Rat::zero() })
            .collect();
        Ok(CutdownResult {
            epsilon: eps.clone(),
            function: PlFunction {
                space: refined.space,
                breakpoints: refined.breakpoints,
                values,
            },
        })
    }

    /// The exact strict superlevel set `{x in space : f(x) > t}` for
    /// `t >= 0`; open in the subspace topology.
    pub fn superlevel(&self, t: &Rat) -> Result<Region> {
        if t.is_negative() {
            return Err(Error::NotPositive("threshold"));
        }
        let mut intervals: Vec<Interval> = Vec::new();
        for comp in self.components() {
            if comp.lo == comp.hi && &self.eval(&comp.lo)? > t {
                intervals.push(Interval::point(comp.lo.clone()));
            }
        }
        for (i, j) in self.pieces() {
            let (x0, v0) = (&self.breakpoints[i], &self.values[i]);
            let (x1, v1) = (&self.breakpoints[j], &self.values[j]);
            match (v0 > t, v1 > t) {
                (true, true) => intervals.push(Interval::closed(x0.clone(), x1.clone())),
                (false, false) => {}
                (true, false) => {
                    let r = x0 + (x1 - x0) * (v0 - t) / (v0 - v1);
                    intervals.push(
                        Interval::new(Scalar::Finite(x0.clone()), false, Scalar::Finite(r), true)
                            .expect("v0 > t forces r > x0"),
                    );
                }
                (false, true) => {
                    let r = x0 + (x1 - x0) * (t - v0) / (v1 - v0);
                    intervals.push(
                        Interval::new(Scalar::Finite(r), true, Scalar::Finite(x1.clone()), false)
                            .expect("v1 > t forces r < x1"),
                    );
                }
            }
        }
        let blocks = intervals
            .into_iter()
            .map(|iv| crate::region::Block::new(vec![iv]).expect("1d block"))
            .collect();
        Region::from_blocks(1, blocks)
    }

    /// `{x : f(x) != 0}`; equals `superlevel(f, 0)` for nonnegative `f`.
    pub fn open_support(&self) -> Region {
        self.superlevel(&Rat::zero()).expect("zero threshold is valid")
    }

    /// Exact minimum of `f` over a compact nonempty subset of its space.
    /// Attained at a breakpoint of `f` or an endpoint of the subset.
    pub fn min_over(&self, c: &Region) -> Result<Rat> {
        if c.is_empty() {
            return Err(Error::Empty("min over an empty region"));
        }
        if !c.is_compact() {
            return Err(Error::NotCompact);
        }
        if !c.is_subset(self.space.region())? {
            return Err(Error::NotInAmbient);
        }
        let mut best: Option<Rat> = None;
        let push = |v: Rat, best: &mut Option<Rat>| {
            *best = Some(match best.take() {
                Some(b) => b.min(v),
                None => v,
            });
        };
        for b in c.boxes() {
            let iv = &b.intervals()[0];
            let lo = iv.lo().as_finite().expect("compact").clone();
            let hi = iv.hi().as_finite().expect("compact").clone();
            push(self.eval(&lo)?, &mut best);
            push(self.eval(&hi)?, &mut best);
            for (i, x) in self.breakpoints.iter().enumerate() {
                if x > &lo && x < &hi {
                    push(self.values[i].clone(), &mut best);
                }
            }
        }
        Ok(best.expect("nonempty region"))
    }

    fn check_same_space(&self, other: &PlFunction) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    /// Pointwise sum on a common space.
    pub fn add(&self, other: &PlFunction) -> Result<PlFunction> {
        self.check_same_space(other)?;
        let a = self.refine(&other.breakpoints);
        let values = a
            .breakpoints
            .iter()
            .zip(&a.values)
            .map(|(x, v)| Ok(v + other.eval(x)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(PlFunction { space: a.space, breakpoints: a.breakpoints, values })
    }

    /// Pointwise scaling by `k >= 0`.
    pub fn scale(&self, k: &Rat) -> Result<PlFunction> {
        if k.is_negative() {
            return Err(Error::BadFunction("negative scale".into()));
        }
        Ok(PlFunction {
            space: self.space.clone(),
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * k).collect(),
        })
    }

    /// Pointwise `min(f, c)` for `c >= 0`, with crossings inserted.
    pub fn min_const(&self, c: &Rat) -> Result<PlFunction> {
        if c.is_negative() {
            return Err(Error::BadFunction("negative clip level".into()));
        }
        let refined = self.refine(&self.crossings(c));
        let values = refined.values.iter().map(|v| v.clone().min(c.clone())).collect();
        Ok(PlFunction {
            space: refined.space,
            breakpoints: refined.breakpoints,
            values,
        })
    }
}

/// Closed components of a compact 1D space, in increasing order.
pub fn components_of(space: &Space) -> Result<Vec<Component>> {
    space
        .region()
        .boxes()
        .iter()
        .map(|b| {
            let iv = &b.intervals()[0];
            match (iv.lo().as_finite(), iv.hi().as_finite()) {
                (Some(lo), Some(hi)) => Ok(Component { lo: lo.clone(), hi: hi.clone() }),
                _ => Err(Error::NotCompact),
            }
        })
        .collect()
}

/// Exact L-infinity distance from a point to a nonempty union of closed
/// intervals.
fn dist_to(blocks: &[Component], x: &Rat) -> Rat {
    blocks
        .iter()
        .map(|c| (&c.lo - x).max(x - &c.hi).max(Rat::zero()))
        .min()
        .expect("nonempty")
}

/// Builds the multiplier witness for `U` compactly contained in `V` inside a
/// compact 1D `K`: a piecewise-linear `e` with `0 <= e <= 1`, `e = 1` on the
/// relative closure of `U`, and the open support of `e` having compact
/// relative closure inside `V`.
///
/// The witness is `clamp(1 - dist(x, cl U) / (gap/2), 0, 1)` where `gap` is
/// the exact distance between `cl U` and `K - V`. Failure of the compact
/// containment precondition means no witness exists and is reported as an
/// error.
pub fn urysohn(u: &Region, v: &Region, k: &Space) -> Result<PlFunction> {
    if k.dim() != 1 {
        return Err(Error::DimMismatch(1, k.dim()));
    }
    if !k.is_compact() {
        return Err(Error::NotCompact);
    }
    if !k.compactly_contained(u, v)? {
        return Err(Error::NotCompactlyContained);
    }
    let cl_u = k.relative_closure(u)?;
    if cl_u.is_empty() {
        return PlFunction::zero(k);
    }
    let rest = k.region().difference(v)?;
    if rest.is_empty() {
        return PlFunction::constant(k, Rat::one());
    }
    let gap = cl_u.gap(&rest)?;
    let half = gap / rat_int(2);

    let a_blocks: Vec<Component> = cl_u
        .boxes()
        .iter()
        .map(|b| {
            let iv = &b.intervals()[0];
            Component {
                lo: iv.lo().as_finite().expect("compact").clone(),
                hi: iv.hi().as_finite().expect("compact").clone(),
            }
        })
        .collect();

    // Breakpoint candidates: every kink of the clamped ramp lies among the
    // space endpoints, the closure endpoints, the ramp feet, and the
    // midpoints between consecutive closure blocks.
    let mut candidates: Vec<Rat> = Vec::new();
    for c in components_of(k)? {
        candidates.push(c.lo.clone());
        candidates.push(c.hi.clone());
    }
    for (i, c) in a_blocks.iter().enumerate() {
        candidates.push(c.lo.clone());
        candidates.push(c.hi.clone());
        candidates.push(&c.lo - &half);
        candidates.push(&c.hi + &half);
        if let Some(next) = a_blocks.get(i + 1) {
            candidates.push((&c.hi + &next.lo) / rat_int(2));
        }
    }
    candidates.retain(|x| k.region().contains_point(std::slice::from_ref(x)).unwrap_or(false));
    candidates.sort();
    candidates.dedup();

    let values: Vec<Rat> = candidates
        .iter()
        .map(|x| {
            let e = Rat::one() - dist_to(&a_blocks, x) / &half;
            e.max(Rat::zero()).min(Rat::one())
        })
        .collect();
    PlFunction::new(k.clone(), candidates, values)
}

/// Exact rational `C` with `a(x) <= C * b(x)` everywhere, for `a` whose open
/// support is contained in the open support of `b`.
///
/// Candidates come from breakpoint-refined piecewise ratio analysis: ratios
/// of the two linear pieces at breakpoints, plus boundary slope ratios where
/// `a` vanishes at a piece endpoint. The returned constant is verified
/// exactly before return.
pub fn linear_domination_constant(a: &PlFunction, b: &PlFunction) -> Result<Rat> {
    a.check_same_space(b)?;
    if !a.open_support().is_subset(&b.open_support())? {
        return Err(Error::SupportNotContained);
    }
    let ag = a.refine(b.breakpoints());
    let bg = b.refine(a.breakpoints());
    debug_assert_eq!(ag.breakpoints, bg.breakpoints);

    let mut best = Rat::zero();
    let push = |c: Rat, best: &mut Rat| {
        if c > *best {
            *best = c;
        }
    };

    for comp in ag.components() {
        if comp.lo == comp.hi {
            let av = ag.eval(&comp.lo)?;
            let bv = bg.eval(&comp.lo)?;
            if bv.is_positive() {
                push(av / bv, &mut best);
            }
        }
    }
    for (i, j) in ag.pieces() {
        let (a0, a1) = (&ag.values[i], &ag.values[j]);
        let (b0, b1) = (&bg.values[i], &bg.values[j]);
        if a0.is_zero() && a1.is_zero() {
            continue;
        }
        let dx = &ag.breakpoints[j] - &ag.breakpoints[i];
        let sa = (a1 - a0) / &dx;
        let sb = (b1 - b0) / &dx;
        for (av, bv) in [(a0, b0), (a1, b1)] {
            if bv.is_positive() {
                push(av / bv, &mut best);
            }
            if av.is_zero() && !sb.is_zero() {
                push(sa.abs() / sb.abs(), &mut best);
            }
        }
    }

    // Exact verification at every refined breakpoint; linearity on pieces
    // makes this sufficient.
    for (x, av) in ag.breakpoints.iter().zip(&ag.values) {
        let bv = bg.eval(x)?;
        if av > &(&best * &bv) {
            return Err(Error::Internal(format!(
                "domination constant {} fails at {}",
                format_rat(&best),
                format_rat(x)
            )));
        }
    }
    Ok(best)
}

/// Exact sup-norm `||a - a * min(n*b, 1)||`, the quantitative gap of the
/// n-th comparison witness: the maximum of the piecewise-quadratic
/// `a * (1 - n*b)` over `{b < 1/n}`. Satisfies `gap <= C/n` for the linear
/// domination constant `C` and is nonincreasing in `n`.
pub fn cuntz_witness_gap(a: &PlFunction, b: &PlFunction, n: u32) -> Result<Rat> {
    a.check_same_space(b)?;
    if n == 0 {
        return Err(Error::NotPositive("n"));
    }
    if !a.open_support().is_subset(&b.open_support())? {
        return Err(Error::SupportNotContained);
    }
    let level = Rat::one() / rat_int(n as i64);
    let n_rat = rat_int(n as i64);
    let mut extra = b.crossings(&level);
    extra.extend_from_slice(a.breakpoints());
    let bg = b.refine(&extra);
    let ag = a.refine(&bg.breakpoints);
    debug_assert_eq!(ag.breakpoints, bg.breakpoints);

    let mut best = Rat::zero();
    let push = |v: Rat, best: &mut Rat| {
        if v > *best {
            *best = v;
        }
    };
    let weight = |av: &Rat, bv: &Rat| -> Rat {
        if bv >= &level {
            Rat::zero()
        } else {
            av * (Rat::one() - &n_rat * bv)
        }
    };

    for comp in ag.components() {
        if comp.lo == comp.hi {
            push(weight(&ag.eval(&comp.lo)?, &bg.eval(&comp.lo)?), &mut best);
        }
    }
    for (i, j) in ag.pieces() {
        let (b0, b1) = (&bg.values[i], &bg.values[j]);
        // After root insertion each piece sits on one side of the level.
        if b0 >= &level && b1 >= &level {
            continue;
        }
        let (x0, x1) = (&ag.breakpoints[i], &ag.breakpoints[j]);
        let (a0, a1) = (&ag.values[i], &ag.values[j]);
        push(weight(a0, b0), &mut best);
        push(weight(a1, b1), &mut best);

        // Interior critical point of the quadratic a*(1 - n*b).
        let dx = x1 - x0;
        let sa = (a1 - a0) / &dx;
        let c0 = Rat::one() - &n_rat * b0;
        let sc = -(&n_rat * ((b1 - b0) / &dx));
        let denom = rat_int(2) * &sa * &sc;
        if !denom.is_zero() {
            let t = -(a0 * &sc + &sa * &c0) / denom;
            if t.is_positive() && t < dx {
                let av = a0 + &sa * &t;
                let cv = &c0 + &sc * &t;
                push(av * cv, &mut best);
            }
        }
    }
    Ok(best)
}
