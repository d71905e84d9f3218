//! Exact rectilinear region algebra in `R^d`.
//!
//! A [`Region`] is a finite union of axis-aligned boxes with per-face
//! open/closed flags and exact rational endpoints. Regions are kept in a
//! canonical form that is unique for a given point set, so structural
//! equality decides point-set equality.
//!
//! Canonicalization works on the compressed coordinate grid: endpoint values
//! are collected per axis, the region is re-expressed as a set of grid atoms
//! (open cells, faces, vertices), redundant grid rails are dropped, and the
//! atoms are merged back into maximal boxes by a deterministic greedy scan in
//! axis index order.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{open_rep, rat_int, Rat, Scalar};

/// One axis factor of a box: an interval with open/closed endpoint flags.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    lo: Scalar,
    lo_open: bool,
    hi: Scalar,
    hi_open: bool,
}

#[derive(Deserialize)]
struct RawInterval {
    lo: Scalar,
    lo_open: bool,
    hi: Scalar,
    hi_open: bool,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;
    fn try_from(r: RawInterval) -> Result<Self> {
        Interval::new(r.lo, r.lo_open, r.hi, r.hi_open)
    }
}

impl Interval {
    /// Builds a nonempty interval. Degenerate intervals (`lo == hi`) must be
    /// closed on both sides; infinite endpoints must be open.
    pub fn new(lo: Scalar, lo_open: bool, hi: Scalar, hi_open: bool) -> Result<Self> {
        let iv = Interval { lo, lo_open, hi, hi_open };
        if iv.lo == Scalar::PosInf {
            return Err(Error::BadInterval("lower endpoint is inf".into()));
        }
        if iv.hi == Scalar::NegInf {
            return Err(Error::BadInterval("upper endpoint is -inf".into()));
        }
        if matches!(iv.lo, Scalar::NegInf) && !iv.lo_open {
            return Err(Error::BadInterval("closed infinite endpoint".into()));
        }
        if matches!(iv.hi, Scalar::PosInf) && !iv.hi_open {
            return Err(Error::BadInterval("closed infinite endpoint".into()));
        }
        match iv.lo.cmp(&iv.hi) {
            std::cmp::Ordering::Greater => Err(Error::BadInterval("lo > hi".into())),
            std::cmp::Ordering::Equal => {
                if iv.lo_open || iv.hi_open {
                    Err(Error::BadInterval("empty degenerate interval".into()))
                } else if !iv.lo.is_finite() {
                    Err(Error::BadInterval("degenerate infinite interval".into()))
                } else {
                    Ok(iv)
                }
            }
            std::cmp::Ordering::Less => Ok(iv),
        }
    }

    pub fn closed(lo: Rat, hi: Rat) -> Self {
        Interval::new(Scalar::Finite(lo), false, Scalar::Finite(hi), false)
            .expect("closed interval")
    }

    pub fn open(lo: Rat, hi: Rat) -> Self {
        Interval::new(Scalar::Finite(lo), true, Scalar::Finite(hi), true).expect("open interval")
    }

    pub fn point(p: Rat) -> Self {
        Interval::closed(p.clone(), p)
    }

    pub fn unbounded() -> Self {
        Interval::new(Scalar::NegInf, true, Scalar::PosInf, true).expect("line")
    }

    pub fn lo(&self) -> &Scalar {
        &self.lo
    }

    pub fn hi(&self) -> &Scalar {
        &self.hi
    }

    pub fn lo_open(&self) -> bool {
        self.lo_open
    }

    pub fn hi_open(&self) -> bool {
        self.hi_open
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: &Rat) -> bool {
        let above = match &self.lo {
            Scalar::NegInf => true,
            Scalar::PosInf => false,
            Scalar::Finite(lo) => match lo.cmp(x) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => !self.lo_open,
                std::cmp::Ordering::Greater => false,
            },
        };
        let below = match &self.hi {
            Scalar::PosInf => true,
            Scalar::NegInf => false,
            Scalar::Finite(hi) => match x.cmp(hi) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => !self.hi_open,
                std::cmp::Ordering::Greater => false,
            },
        };
        above && below
    }

    /// Closure in `R`: finite endpoints become closed.
    fn closure(&self) -> Interval {
        Interval {
            lo: self.lo.clone(),
            lo_open: !self.lo.is_finite(),
            hi: self.hi.clone(),
            hi_open: !self.hi.is_finite(),
        }
    }

    /// Minkowski sum with the closed interval `[-d, d]`, `d > 0`. Endpoint
    /// flags carry over; infinities absorb.
    fn inflate(&self, d: &Rat) -> Interval {
        Interval {
            lo: self.lo.sub_rat(d),
            lo_open: self.lo_open,
            hi: self.hi.add_rat(d),
            hi_open: self.hi_open,
        }
    }
}

/// An axis-aligned box: one interval per dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawBlock")]
pub struct Block {
    iv: Vec<Interval>,
}

#[derive(Deserialize)]
struct RawBlock {
    iv: Vec<Interval>,
}

impl TryFrom<RawBlock> for Block {
    type Error = Error;
    fn try_from(r: RawBlock) -> Result<Self> {
        Block::new(r.iv)
    }
}

impl Block {
    pub fn new(iv: Vec<Interval>) -> Result<Self> {
        if iv.is_empty() {
            return Err(Error::BadRegion("zero-dimensional box".into()));
        }
        Ok(Block { iv })
    }

    pub fn dim(&self) -> usize {
        self.iv.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.iv
    }

    pub fn contains(&self, p: &[Rat]) -> bool {
        debug_assert_eq!(p.len(), self.iv.len());
        self.iv.iter().zip(p).all(|(iv, x)| iv.contains(x))
    }

    fn closure(&self) -> Block {
        Block { iv: self.iv.iter().map(Interval::closure).collect() }
    }

    fn inflate(&self, d: &Rat) -> Block {
        Block { iv: self.iv.iter().map(|iv| iv.inflate(d)).collect() }
    }

    fn is_bounded(&self) -> bool {
        self.iv.iter().all(Interval::is_bounded)
    }
}

/// A canonical finite union of boxes in `R^dim`.
///
/// Two regions are equal as values exactly when they are equal as point
/// sets. Stored boxes never overlap.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRegion")]
pub struct Region {
    dim: usize,
    boxes: Vec<Block>,
}

#[derive(Deserialize)]
struct RawRegion {
    dim: usize,
    boxes: Vec<Block>,
}

impl TryFrom<RawRegion> for Region {
    type Error = Error;
    fn try_from(r: RawRegion) -> Result<Self> {
        Region::from_blocks(r.dim, r.boxes)
    }
}

/// One cell of the compressed grid along a single axis: either a grid value
/// or the open gap between two neighbouring grid values.
#[derive(Clone, Debug)]
enum AxisAtom {
    Point(Rat),
    Open(Scalar, Scalar),
}

impl AxisAtom {
    fn rep(&self) -> Rat {
        match self {
            AxisAtom::Point(p) => p.clone(),
            AxisAtom::Open(a, b) => open_rep(a, b),
        }
    }
}

fn axis_atoms(rails: &[Rat]) -> Vec<AxisAtom> {
    if rails.is_empty() {
        return vec![AxisAtom::Open(Scalar::NegInf, Scalar::PosInf)];
    }
    let mut atoms = Vec::with_capacity(2 * rails.len() + 1);
    atoms.push(AxisAtom::Open(Scalar::NegInf, Scalar::Finite(rails[0].clone())));
    for (i, r) in rails.iter().enumerate() {
        atoms.push(AxisAtom::Point(r.clone()));
        let next = match rails.get(i + 1) {
            Some(n) => Scalar::Finite(n.clone()),
            None => Scalar::PosInf,
        };
        atoms.push(AxisAtom::Open(Scalar::Finite(r.clone()), next));
    }
    atoms
}

/// Calls `f` for every coordinate tuple in the given per-axis ranges
/// (inclusive), in lexicographic order with axis 0 most significant.
fn each_coord(ranges: &[(usize, usize)], f: &mut impl FnMut(&[usize])) {
    let mut cur: Vec<usize> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&cur);
        let mut axis = ranges.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if cur[axis] < ranges[axis].1 {
                cur[axis] += 1;
                for later in axis + 1..ranges.len() {
                    cur[later] = ranges[later].0;
                }
                break;
            }
        }
    }
}

fn flat_index(coords: &[usize], counts: &[usize]) -> usize {
    let mut idx = 0;
    for (c, n) in coords.iter().zip(counts) {
        idx = idx * n + c;
    }
    idx
}

struct Grid {
    atoms: Vec<Vec<AxisAtom>>,
    counts: Vec<usize>,
    included: Vec<bool>,
}

impl Grid {
    fn build(rails: &[Vec<Rat>], pred: &dyn Fn(&[Rat]) -> bool) -> Grid {
        let atoms: Vec<Vec<AxisAtom>> = rails.iter().map(|r| axis_atoms(r)).collect();
        let counts: Vec<usize> = atoms.iter().map(Vec::len).collect();
        let total: usize = counts.iter().product();
        let mut included = vec![false; total];
        let ranges: Vec<(usize, usize)> = counts.iter().map(|&n| (0, n - 1)).collect();
        let mut point: Vec<Rat> = vec![Rat::zero(); counts.len()];
        each_coord(&ranges, &mut |coords| {
            for (axis, &c) in coords.iter().enumerate() {
                point[axis] = atoms[axis][c].rep();
            }
            included[flat_index(coords, &counts)] = pred(&point);
        });
        Grid { atoms, counts, included }
    }

    /// Keeps only the grid rails across which membership actually changes.
    fn essential_rails(&self, rails: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
        let dim = rails.len();
        let mut kept: Vec<Vec<Rat>> = Vec::with_capacity(dim);
        for axis in 0..dim {
            let mut keep = Vec::new();
            for (j, rail) in rails[axis].iter().enumerate() {
                let point_idx = 2 * j + 1;
                let mut essential = false;
                let ranges: Vec<(usize, usize)> = self
                    .counts
                    .iter()
                    .enumerate()
                    .map(|(a, &n)| if a == axis { (point_idx, point_idx) } else { (0, n - 1) })
                    .collect();
                each_coord(&ranges, &mut |coords| {
                    if essential {
                        return;
                    }
                    let mut c = coords.to_vec();
                    let at = self.included[flat_index(coords, &self.counts)];
                    c[axis] = point_idx - 1;
                    let before = self.included[flat_index(&c, &self.counts)];
                    c[axis] = point_idx + 1;
                    let after = self.included[flat_index(&c, &self.counts)];
                    if before != at || after != at {
                        essential = true;
                    }
                });
                if essential {
                    keep.push(rail.clone());
                }
            }
            kept.push(keep);
        }
        kept
    }

    /// Deterministic greedy merge of included atoms into maximal boxes,
    /// scanning axes in index order.
    fn greedy_boxes(&self) -> Vec<Block> {
        let dim = self.counts.len();
        let mut covered = vec![false; self.included.len()];
        let mut boxes = Vec::new();
        while let Some(seed) =
            (0..self.included.len()).find(|&i| self.included[i] && !covered[i])
        {
            let mut lo = vec![0usize; dim];
            let mut rem = seed;
            for axis in (0..dim).rev() {
                lo[axis] = rem % self.counts[axis];
                rem /= self.counts[axis];
            }
            let mut hi = lo.clone();
            for axis in 0..dim {
                'extend: while hi[axis] + 1 < self.counts[axis] {
                    let cand = hi[axis] + 1;
                    let ranges: Vec<(usize, usize)> = (0..dim)
                        .map(|a| if a == axis { (cand, cand) } else { (lo[a], hi[a]) })
                        .collect();
                    let mut ok = true;
                    each_coord(&ranges, &mut |coords| {
                        let i = flat_index(coords, &self.counts);
                        if !self.included[i] || covered[i] {
                            ok = false;
                        }
                    });
                    if !ok {
                        break 'extend;
                    }
                    hi[axis] = cand;
                }
            }
            let ranges: Vec<(usize, usize)> = (0..dim).map(|a| (lo[a], hi[a])).collect();
            each_coord(&ranges, &mut |coords| {
                covered[flat_index(coords, &self.counts)] = true;
            });
            let iv: Vec<Interval> = (0..dim)
                .map(|a| interval_from_atoms(&self.atoms[a], lo[a], hi[a]))
                .collect();
            boxes.push(Block { iv });
        }
        boxes
    }
}

fn interval_from_atoms(atoms: &[AxisAtom], lo: usize, hi: usize) -> Interval {
    let (lo_s, lo_open) = match &atoms[lo] {
        AxisAtom::Point(p) => (Scalar::Finite(p.clone()), false),
        AxisAtom::Open(a, _) => (a.clone(), true),
    };
    let (hi_s, hi_open) = match &atoms[hi] {
        AxisAtom::Point(p) => (Scalar::Finite(p.clone()), false),
        AxisAtom::Open(_, b) => (b.clone(), true),
    };
    Interval { lo: lo_s, lo_open, hi: hi_s, hi_open }
}

fn endpoint_rails(dim: usize, boxes: &[Block]) -> Vec<Vec<Rat>> {
    let mut rails: Vec<Vec<Rat>> = vec![Vec::new(); dim];
    for b in boxes {
        for (axis, iv) in b.iv.iter().enumerate() {
            if let Scalar::Finite(r) = &iv.lo {
                rails[axis].push(r.clone());
            }
            if let Scalar::Finite(r) = &iv.hi {
                rails[axis].push(r.clone());
            }
        }
    }
    for r in &mut rails {
        r.sort();
        r.dedup();
    }
    rails
}

fn merge_rails(a: Vec<Vec<Rat>>, b: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    a.into_iter()
        .zip(b)
        .map(|(mut x, y)| {
            x.extend(y);
            x.sort();
            x.dedup();
            x
        })
        .collect()
}

/// Canonical region for an arbitrary membership predicate whose truth value
/// is constant on every atom of the grid spanned by `rails`.
fn canonicalize(dim: usize, rails: Vec<Vec<Rat>>, pred: &dyn Fn(&[Rat]) -> bool) -> Region {
    let full = Grid::build(&rails, pred);
    let pruned = full.essential_rails(&rails);
    let grid = if pruned == rails { full } else { Grid::build(&pruned, pred) };
    Region { dim, boxes: grid.greedy_boxes() }
}

impl Region {
    /// The empty region of the given dimension (`dim >= 1`).
    pub fn empty(dim: usize) -> Region {
        assert!(dim >= 1, "regions are at least one-dimensional");
        Region { dim, boxes: Vec::new() }
    }

    /// All of `R^dim`.
    pub fn full(dim: usize) -> Region {
        assert!(dim >= 1);
        Region { dim, boxes: vec![Block { iv: vec![Interval::unbounded(); dim] }] }
    }

    /// Canonicalizes an arbitrary list of boxes into a region.
    pub fn from_blocks(dim: usize, boxes: Vec<Block>) -> Result<Region> {
        if dim == 0 {
            return Err(Error::BadRegion("dim must be positive".into()));
        }
        for b in &boxes {
            if b.dim() != dim {
                return Err(Error::DimMismatch(dim, b.dim()));
            }
        }
        let rails = endpoint_rails(dim, &boxes);
        Ok(canonicalize(dim, rails, &|p| boxes.iter().any(|b| b.contains(p))))
    }

    /// One-dimensional region from a single interval.
    pub fn from_interval(iv: Interval) -> Region {
        Region::from_blocks(1, vec![Block { iv: vec![iv] }]).expect("1d interval")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[Block] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.boxes.iter().all(Block::is_bounded)
    }

    fn contains_unchecked(&self, p: &[Rat]) -> bool {
        self.boxes.iter().any(|b| b.contains(p))
    }

    pub fn contains_point(&self, p: &[Rat]) -> Result<bool> {
        if p.len() != self.dim {
            return Err(Error::DimMismatch(self.dim, p.len()));
        }
        Ok(self.contains_unchecked(p))
    }

    fn check_dim(&self, other: &Region) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    fn combine(&self, other: &Region, f: impl Fn(bool, bool) -> bool) -> Result<Region> {
        self.check_dim(other)?;
        let rails = merge_rails(
            endpoint_rails(self.dim, &self.boxes),
            endpoint_rails(self.dim, &other.boxes),
        );
        Ok(canonicalize(self.dim, rails, &|p| {
            f(self.contains_unchecked(p), other.contains_unchecked(p))
        }))
    }

    pub fn union(&self, other: &Region) -> Result<Region> {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Region) -> Result<Region> {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Region) -> Result<Region> {
        self.combine(other, |a, b| a && !b)
    }

    /// Complement within `R^dim`.
    pub fn complement(&self) -> Region {
        let rails = endpoint_rails(self.dim, &self.boxes);
        canonicalize(self.dim, rails, &|p| !self.contains_unchecked(p))
    }

    /// Closure in `R^dim`. Distributes over the stored union of boxes.
    pub fn closure(&self) -> Region {
        let closed: Vec<Block> = self.boxes.iter().map(Block::closure).collect();
        Region::from_blocks(self.dim, closed).expect("closure")
    }

    /// Interior in `R^dim`, computed as the complement of the closure of the
    /// complement.
    pub fn interior(&self) -> Region {
        self.complement().closure().complement()
    }

    /// Cartesian product; lives in `R^{dim_a + dim_b}`.
    pub fn product(&self, other: &Region) -> Region {
        let dim = self.dim + other.dim;
        let mut blocks = Vec::with_capacity(self.boxes.len() * other.boxes.len());
        for a in &self.boxes {
            for b in &other.boxes {
                let mut iv = a.iv.clone();
                iv.extend(b.iv.iter().cloned());
                blocks.push(Block { iv });
            }
        }
        Region::from_blocks(dim, blocks).expect("product")
    }

    /// Minkowski sum with the closed L-infinity cube of radius `delta > 0`.
    pub fn dilate(&self, delta: &Rat) -> Result<Region> {
        if !delta.is_positive() {
            return Err(Error::NotPositive("delta"));
        }
        let blocks: Vec<Block> = self.boxes.iter().map(|b| b.inflate(delta)).collect();
        Region::from_blocks(self.dim, blocks)
    }

    /// Points whose closed `delta`-cube lies inside the region. Defined and
    /// computed as the complement of the dilation of the complement.
    pub fn erode(&self, delta: &Rat) -> Result<Region> {
        if !delta.is_positive() {
            return Err(Error::NotPositive("delta"));
        }
        Ok(self.complement().dilate(delta)?.complement())
    }

    /// True iff `self` is a subset of `other` as point sets.
    pub fn is_subset(&self, other: &Region) -> Result<bool> {
        self.check_dim(other)?;
        let rails = merge_rails(
            endpoint_rails(self.dim, &self.boxes),
            endpoint_rails(self.dim, &other.boxes),
        );
        let atoms: Vec<Vec<AxisAtom>> = rails.iter().map(|r| axis_atoms(r)).collect();
        let ranges: Vec<(usize, usize)> = atoms.iter().map(|a| (0, a.len() - 1)).collect();
        let mut point: Vec<Rat> = vec![Rat::zero(); self.dim];
        let mut ok = true;
        each_coord(&ranges, &mut |coords| {
            if !ok {
                return;
            }
            for (axis, &c) in coords.iter().enumerate() {
                point[axis] = atoms[axis][c].rep();
            }
            if self.contains_unchecked(&point) && !other.contains_unchecked(&point) {
                ok = false;
            }
        });
        Ok(ok)
    }

    /// True iff the region is closed in `R^dim` and bounded. The empty region
    /// is compact.
    pub fn is_compact(&self) -> bool {
        self.is_bounded() && self.closure() == *self
    }

    /// Exact L-infinity distance between two compact, nonempty, disjoint
    /// regions. Positive by compactness.
    pub fn gap(&self, other: &Region) -> Result<Rat> {
        self.check_dim(other)?;
        if self.is_empty() || other.is_empty() {
            return Err(Error::Empty("gap of an empty region"));
        }
        if !self.is_compact() || !other.is_compact() {
            return Err(Error::NotCompact);
        }
        if !self.intersect(other)?.is_empty() {
            return Err(Error::NotDisjoint);
        }
        let mut best: Option<Rat> = None;
        for a in &self.boxes {
            for b in &other.boxes {
                let mut axis_max = Rat::zero();
                for (ia, ib) in a.iv.iter().zip(&b.iv) {
                    let (alo, ahi) = (ia.lo.as_finite().unwrap(), ia.hi.as_finite().unwrap());
                    let (blo, bhi) = (ib.lo.as_finite().unwrap(), ib.hi.as_finite().unwrap());
                    let d = (blo - ahi).max(alo - bhi).max(Rat::zero());
                    axis_max = axis_max.max(d);
                }
                best = Some(match best {
                    Some(cur) => cur.min(axis_max),
                    None => axis_max,
                });
            }
        }
        Ok(best.expect("both regions nonempty"))
    }

    /// Per-axis lower and upper bounds, or `None` for the empty region.
    pub fn axis_bounds(&self, axis: usize) -> Option<(Scalar, Scalar)> {
        let mut bounds: Option<(Scalar, Scalar)> = None;
        for b in &self.boxes {
            let iv = &b.iv[axis];
            bounds = Some(match bounds {
                None => (iv.lo.clone(), iv.hi.clone()),
                Some((lo, hi)) => (lo.min(iv.lo.clone()), hi.max(iv.hi.clone())),
            });
        }
        bounds
    }
}

/// An ambient space: a region that is locally compact as a subspace of
/// `R^dim`, i.e. the intersection of a closed set with an open set.
///
/// Carries the relative-topology operations: relative closure, openness in
/// the subspace topology, compact containment, and the erosion-based
/// exhaustion of an open subset.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(try_from = "Region")]
pub struct Space {
    region: Region,
}

impl TryFrom<Region> for Space {
    type Error = Error;
    fn try_from(region: Region) -> Result<Self> {
        Space::new(region)
    }
}

impl Serialize for Space {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.region.serialize(ser)
    }
}

/// Outcome of the erosion exhaustion of `V` inside `K`, compared against the
/// direct compact-containment verdict for `U`.
#[derive(Clone, Debug)]
pub struct Exhaustion {
    /// Whether capture at a finite stage agrees with compact containment.
    pub consistent: bool,
    /// First stage `n` with `U` a subset of `V_n`, if any.
    pub captured_at: Option<u32>,
    pub compactly_contained: bool,
}

impl Space {
    /// Validates local compactness: the part of the closure that is missing
    /// from the region must itself be closed.
    pub fn new(region: Region) -> Result<Space> {
        let missing = region.closure().difference(&region)?;
        if !missing.closure().intersect(&region)?.is_empty() {
            return Err(Error::NotLocallyCompact);
        }
        Ok(Space { region })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn dim(&self) -> usize {
        self.region.dim()
    }

    pub fn is_compact(&self) -> bool {
        self.region.is_compact()
    }

    pub fn product(&self, other: &Space) -> Result<Space> {
        Space::new(self.region.product(&other.region))
    }

    fn check_inside(&self, u: &Region) -> Result<()> {
        if !u.is_subset(&self.region)? {
            return Err(Error::NotInAmbient);
        }
        Ok(())
    }

    /// Closure of `U` in the subspace topology: the `R^d` closure clipped
    /// back to the space.
    pub fn relative_closure(&self, u: &Region) -> Result<Region> {
        self.check_inside(u)?;
        u.closure().intersect(&self.region)
    }

    /// True iff `U` is open in the subspace topology, decided as
    /// `closure(K - U)` not meeting `U`.
    pub fn is_open_in(&self, u: &Region) -> Result<bool> {
        self.check_inside(u)?;
        let rest = self.region.difference(u)?;
        Ok(rest.closure().intersect(u)?.is_empty())
    }

    /// The way-below relation on open subsets of the space: the relative
    /// closure of `U` is compact and contained in `V`.
    ///
    /// Openness of `U` and `V` is a precondition and is reported as an error,
    /// never as a `false` verdict.
    pub fn compactly_contained(&self, u: &Region, v: &Region) -> Result<bool> {
        if !self.is_open_in(u)? || !self.is_open_in(v)? {
            return Err(Error::NotOpen);
        }
        if !u.is_subset(v)? {
            return Ok(false);
        }
        let cl = self.relative_closure(u)?;
        Ok(cl.is_compact() && cl.is_subset(v)?)
    }

    /// Complement of the space within `R^dim`.
    pub fn complement_region(&self) -> Region {
        self.region.complement()
    }

    /// Builds the canonical increasing open chain
    /// `V_n = interior(erode(V + complement(K), 1/n))` clipped to `K` for
    /// `n = 1..=n_max`, and reports whether capture of `U` at some finite
    /// stage agrees with the compact-containment verdict.
    ///
    /// Requires `K` compact and `U`, `V` open in `K` with `U` inside `V`.
    /// Disagreement at stage `n_max` is a `false` outcome, not an error.
    pub fn exhaustion_consistency(&self, u: &Region, v: &Region, n_max: u32) -> Result<Exhaustion> {
        if n_max == 0 {
            return Err(Error::NotPositive("n_max"));
        }
        if !self.is_compact() {
            return Err(Error::NotCompact);
        }
        if !self.is_open_in(u)? || !self.is_open_in(v)? {
            return Err(Error::NotOpen);
        }
        if !u.is_subset(v)? {
            return Err(Error::NotInAmbient);
        }
        let cc = self.compactly_contained(u, v)?;
        let widened = v.union(&self.complement_region())?;
        let mut captured_at = None;
        let mut prev: Option<Region> = None;
        for n in 1..=n_max {
            let step = rat_int(1) / rat_int(n as i64);
            let vn = widened.erode(&step)?.interior().intersect(&self.region)?;
            debug_assert!(vn.is_subset(v).unwrap(), "chain stays inside V");
            if let Some(p) = &prev {
                debug_assert!(p.is_subset(&vn).unwrap(), "chain is increasing");
            }
            if u.is_subset(&vn)? {
                captured_at = Some(n);
                break;
            }
            prev = Some(vn);
        }
        Ok(Exhaustion {
            consistent: captured_at.is_some() == cc,
            captured_at,
            compactly_contained: cc,
        })
    }
}
