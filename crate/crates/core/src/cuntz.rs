//! Commutative-model Cuntz comparison of positive elements.
//!
//! A positive element is a nonnegative piecewise-linear function on a compact
//! 1D space, or an elementary tensor of such factors acting on the product
//! space. Comparison is decided through open supports; the way-below relation
//! gets three independent deciders (closure containment, a strict margin
//! constant, an epsilon cutdown level) that provably agree on compact
//! spaces, plus a certificate layer for the tensor preservation statements.

use num_traits::{One, Signed};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plfn::PlFunction;
use crate::region::{Region, Space};
use crate::scalar::{rat_int, rat_string_opt, Rat};

/// A positive element of the commutative model: a single function or an
/// elementary tensor of at least two factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawElement", into = "RawElement")]
pub enum PositiveElement {
    Scalar(PlFunction),
    Tensor(Vec<PlFunction>),
}

#[derive(Serialize, Deserialize)]
struct RawElement {
    kind: String,
    factors: Vec<PlFunction>,
}

impl TryFrom<RawElement> for PositiveElement {
    type Error = Error;
    fn try_from(raw: RawElement) -> Result<Self> {
        match raw.kind.as_str() {
            "scalar" => {
                let mut f = raw.factors;
                if f.len() != 1 {
                    return Err(Error::ShapeMismatch);
                }
                Ok(PositiveElement::Scalar(f.remove(0)))
            }
            "tensor" => PositiveElement::tensor(raw.factors),
            other => Err(Error::BadFunction(format!("unknown element kind {:?}", other))),
        }
    }
}

impl From<PositiveElement> for RawElement {
    fn from(e: PositiveElement) -> RawElement {
        match e {
            PositiveElement::Scalar(f) => RawElement { kind: "scalar".into(), factors: vec![f] },
            PositiveElement::Tensor(fs) => RawElement { kind: "tensor".into(), factors: fs },
        }
    }
}

impl PositiveElement {
    pub fn scalar(f: PlFunction) -> Self {
        PositiveElement::Scalar(f)
    }

    pub fn tensor(factors: Vec<PlFunction>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::ShapeMismatch);
        }
        Ok(PositiveElement::Tensor(factors))
    }

    pub fn factors(&self) -> &[PlFunction] {
        match self {
            PositiveElement::Scalar(f) => std::slice::from_ref(f),
            PositiveElement::Tensor(fs) => fs,
        }
    }

    /// `h(x_1, ..., x_k) = prod_i f_i(x_i)`.
    pub fn eval(&self, point: &[Rat]) -> Result<Rat> {
        let fs = self.factors();
        if point.len() != fs.len() {
            return Err(Error::ShapeMismatch);
        }
        let mut acc = Rat::one();
        for (f, x) in fs.iter().zip(point) {
            acc *= f.eval(x)?;
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.factors().iter().any(PlFunction::is_zero)
    }
}

/// A Cuntz class, represented by a positive element; in the commutative
/// model the class is determined by the open support of the representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CuntzClass {
    element: PositiveElement,
}

impl CuntzClass {
    pub fn new(element: PositiveElement) -> Self {
        CuntzClass { element }
    }

    pub fn from_scalar(f: PlFunction) -> Self {
        CuntzClass::new(PositiveElement::Scalar(f))
    }

    pub fn element(&self) -> &PositiveElement {
        &self.element
    }

    pub fn factors(&self) -> &[PlFunction] {
        self.element.factors()
    }

    pub fn is_zero(&self) -> bool {
        self.element.is_zero()
    }

    /// Ambient space: the factor space, or the product of factor spaces.
    pub fn ambient(&self) -> Result<Space> {
        let mut it = self.factors().iter();
        let first = it.next().expect("at least one factor").space().clone();
        it.try_fold(first, |acc, f| acc.product(f.space()))
    }

    /// Open support; for tensors the product of the factor supports, which
    /// is exactly the support of the product function.
    pub fn support(&self) -> Region {
        let mut it = self.factors().iter();
        let first = it.next().expect("at least one factor").open_support();
        it.fold(first, |acc, f| acc.product(&f.open_support()))
    }
}

/// Support of a positive element (module-level spelling of
/// [`CuntzClass::support`]).
pub fn support(e: &PositiveElement) -> Region {
    CuntzClass::new(e.clone()).support()
}

fn check_shapes(a: &CuntzClass, b: &CuntzClass) -> Result<()> {
    if a.factors().len() != b.factors().len() {
        return Err(Error::ShapeMismatch);
    }
    for (f, g) in a.factors().iter().zip(b.factors()) {
        if f.space() != g.space() {
            return Err(Error::SpaceMismatch);
        }
    }
    Ok(())
}

fn check_ambient(a: &CuntzClass, k: &Space) -> Result<()> {
    if a.ambient()? != *k {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

/// Cuntz comparison `[a] <= [b]`: containment of open supports.
pub fn cuntz_leq(a: &CuntzClass, b: &CuntzClass) -> Result<bool> {
    check_shapes(a, b)?;
    a.support().is_subset(&b.support())
}

/// For 1D factor pairs with `[a_i] <= [b_i]`, compares the elementary
/// tensors. The result is always `true`; it is computed, not assumed.
pub fn tensor_leq(
    a1: &CuntzClass,
    b1: &CuntzClass,
    a2: &CuntzClass,
    b2: &CuntzClass,
) -> Result<bool> {
    if !(cuntz_leq(a1, b1)? && cuntz_leq(a2, b2)?) {
        return Err(Error::SupportNotContained);
    }
    let ta = CuntzClass::new(PositiveElement::tensor(
        [a1.factors(), a2.factors()].concat(),
    )?);
    let tb = CuntzClass::new(PositiveElement::tensor(
        [b1.factors(), b2.factors()].concat(),
    )?);
    cuntz_leq(&ta, &tb)
}

/// Way-below via supports: the relative closure of `supp(a)` is contained in
/// `supp(b)`.
pub fn way_below_support(a: &CuntzClass, b: &CuntzClass, k: &Space) -> Result<bool> {
    check_shapes(a, b)?;
    check_ambient(a, k)?;
    let cl = k.relative_closure(&a.support())?;
    cl.is_subset(&b.support())
}

/// Fallback margin/epsilon for a zero class: half the peak of `b`, or 1 when
/// `b` is itself zero (any positive value is vacuously valid).
fn zero_class_level(b: &PlFunction) -> Rat {
    let sup = b.max_value();
    if sup.is_positive() {
        sup / rat_int(2)
    } else {
        Rat::one()
    }
}

fn scalar_margin_star(a: &PlFunction, b: &PlFunction, k: &Space) -> Result<Option<Rat>> {
    let supp_a = a.open_support();
    if supp_a.is_empty() {
        return Ok(Some(zero_class_level(b) * rat_int(2)));
    }
    let cl = k.relative_closure(&supp_a)?;
    let min = b.min_over(&cl)?;
    Ok(if min.is_positive() { Some(min) } else { None })
}

/// Any-positive fallback for a zero class: factor-wise half peaks.
fn zero_class_product(b: &CuntzClass) -> Rat {
    b.factors()
        .iter()
        .fold(Rat::one(), |acc, fb| acc * zero_class_level(fb))
}

/// The strict margin constant: a `c > 0` with `a(x) > 0` implying
/// `b(x) > c`, chosen as half the minimum of `b` over the closed support of
/// `a`. For tensors the factor constants multiply. `None` when no such
/// constant exists.
pub fn way_below_margin(a: &CuntzClass, b: &CuntzClass, k: &Space) -> Result<Option<Rat>> {
    check_shapes(a, b)?;
    check_ambient(a, k)?;
    // A zero class (any factor zero) is way below everything; any positive
    // constant is vacuously valid.
    if a.is_zero() {
        return Ok(Some(zero_class_product(b)));
    }
    let mut c = Rat::one();
    for (fa, fb) in a.factors().iter().zip(b.factors()) {
        match scalar_margin_star(fa, fb, fa.space())? {
            Some(star) => c *= star / rat_int(2),
            None => return Ok(None),
        }
    }
    Ok(Some(c))
}

/// The epsilon level: an `eps > 0` with `supp(a)` inside the strict
/// superlevel set `{b > eps}`, chosen as half the minimum of `b` over the
/// closed support of `a` and re-verified exactly. For tensors the factor
/// epsilons multiply and validity is certified factor-wise. `None` when no
/// level exists.
pub fn way_below_epsilon(a: &CuntzClass, b: &CuntzClass, k: &Space) -> Result<Option<Rat>> {
    check_shapes(a, b)?;
    check_ambient(a, k)?;
    if a.is_zero() {
        return Ok(Some(zero_class_product(b)));
    }
    let mut eps = Rat::one();
    for (fa, fb) in a.factors().iter().zip(b.factors()) {
        match scalar_epsilon(fa, fb, fa.space())? {
            Some(e) => eps *= e,
            None => return Ok(None),
        }
    }
    Ok(Some(eps))
}

fn scalar_epsilon(a: &PlFunction, b: &PlFunction, k: &Space) -> Result<Option<Rat>> {
    let star = match scalar_margin_star(a, b, k)? {
        Some(s) => s,
        None => return Ok(None),
    };
    let eps = star / rat_int(2);
    if !a.open_support().is_subset(&b.superlevel(&eps)?)? {
        return Err(Error::Internal("epsilon level failed exact re-verification".into()));
    }
    Ok(Some(eps))
}

/// A compact class is one way-below itself. Two characterizations are
/// computed and must agree: the relative closure of the support stays inside
/// the support, and some epsilon level reproduces the support exactly.
pub fn is_compact_class(a: &CuntzClass, k: &Space) -> Result<bool> {
    check_ambient(a, k)?;
    let by_closure = way_below_support(a, a, k)?;

    let mut by_level = true;
    // The zero class (empty product support) is level-compact outright;
    // otherwise every factor support is nonempty and the level check
    // factorizes.
    let factors: &[PlFunction] = if a.is_zero() { &[] } else { a.factors() };
    for f in factors {
        let supp = f.open_support();
        let cl = f.space().relative_closure(&supp)?;
        if !cl.is_subset(&supp)? {
            by_level = false;
            break;
        }
        let min = f.min_over(&cl)?;
        if !min.is_positive() {
            by_level = false;
            break;
        }
        let eps = min / rat_int(2);
        if f.superlevel(&eps)? != supp {
            by_level = false;
            break;
        }
    }
    if by_closure != by_level {
        return Err(Error::Internal(
            "compactness characterizations disagree".into(),
        ));
    }
    Ok(by_closure)
}

/// Exact data of one factor of a module inner product: the pointwise product
/// of two piecewise-linear functions (itself piecewise-quadratic). Exposes
/// exact evaluation and the exact support `supp(f) /\ supp(g)`.
#[derive(Clone, Debug)]
pub struct FactorProduct {
    left: PlFunction,
    right: PlFunction,
}

impl FactorProduct {
    pub fn left(&self) -> &PlFunction {
        &self.left
    }

    pub fn right(&self) -> &PlFunction {
        &self.right
    }

    pub fn eval(&self, x: &Rat) -> Result<Rat> {
        Ok(self.left.eval(x)? * self.right.eval(x)?)
    }

    pub fn support(&self) -> Result<Region> {
        self.left.open_support().intersect(&self.right.open_support())
    }
}

/// Inner product of two elementary tensors, factorized as the tensor of the
/// factor products.
#[derive(Clone, Debug)]
pub struct InnerProduct {
    factors: Vec<FactorProduct>,
}

impl InnerProduct {
    pub fn factors(&self) -> &[FactorProduct] {
        &self.factors
    }

    pub fn eval(&self, point: &[Rat]) -> Result<Rat> {
        if point.len() != self.factors.len() {
            return Err(Error::ShapeMismatch);
        }
        let mut acc = Rat::one();
        for (f, x) in self.factors.iter().zip(point) {
            acc *= f.eval(x)?;
        }
        Ok(acc)
    }

    /// Product of the factor supports.
    pub fn support(&self) -> Result<Region> {
        let mut it = self.factors.iter();
        let first = it.next().expect("at least one factor").support()?;
        it.try_fold(first, |acc, f| Ok(acc.product(&f.support()?)))
    }

    pub fn is_zero(&self) -> Result<bool> {
        Ok(self.support()?.is_empty())
    }
}

/// `<s, t>` for elementary tensors: the factor-wise products
/// `(f_1 g_1) (x) (f_2 g_2) ...`, exact in every exposed quantity.
pub fn module_inner(s: &PositiveElement, t: &PositiveElement) -> Result<InnerProduct> {
    let (sf, tf) = match (s, t) {
        (PositiveElement::Tensor(sf), PositiveElement::Tensor(tf)) => (sf, tf),
        _ => return Err(Error::ShapeMismatch),
    };
    if sf.len() != tf.len() {
        return Err(Error::ShapeMismatch);
    }
    let mut factors = Vec::with_capacity(sf.len());
    for (f, g) in sf.iter().zip(tf) {
        if f.space() != g.space() {
            return Err(Error::SpaceMismatch);
        }
        factors.push(FactorProduct { left: f.clone(), right: g.clone() });
    }
    Ok(InnerProduct { factors })
}

/// Checks that `e1 (x) e2` is a valid multiplier witness for
/// `U1 x U2` compactly contained in `V1 x V2`: the product acts as the
/// identity on the closed product (factor minima multiply to 1) and its
/// support has compact relative closure inside the product, all verified
/// factor-wise plus once at the product level.
#[allow(clippy::too_many_arguments)]
pub fn tensor_witness_check(
    e1: &PlFunction,
    u1: &Region,
    v1: &Region,
    e2: &PlFunction,
    u2: &Region,
    v2: &Region,
    k1: &Space,
    k2: &Space,
) -> Result<bool> {
    if e1.space() != k1 || e2.space() != k2 {
        return Err(Error::SpaceMismatch);
    }
    let one = Rat::one();
    if e1.max_value() > one || e2.max_value() > one {
        return Err(Error::BadFunction("witness exceeds 1".into()));
    }

    let mut identity = Rat::one();
    for (e, u, k) in [(e1, u1, k1), (e2, u2, k2)] {
        let cl = k.relative_closure(u)?;
        if !cl.is_empty() {
            identity *= e.min_over(&cl)?;
        }
    }
    if identity != one {
        return Ok(false);
    }

    let mut closures = Vec::new();
    for (e, v, k) in [(e1, v1, k1), (e2, v2, k2)] {
        let cl = k.relative_closure(&e.open_support())?;
        if !(cl.is_compact() && cl.is_subset(v)?) {
            return Ok(false);
        }
        closures.push(cl);
    }

    // Product-level restatement of the factor facts.
    let prod_cl = closures[0].product(&closures[1]);
    let prod_support = e1.open_support().product(&e2.open_support());
    let k12 = k1.product(k2)?;
    Ok(prod_cl == k12.relative_closure(&prod_support)?
        && prod_cl.is_compact()
        && prod_cl.is_subset(&v1.product(v2))?)
}

/// One remembered subset check inside a certificate; `lhs` and `rhs` are
/// stored so the fact can be re-verified later.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContainmentFact {
    pub label: String,
    pub lhs: Region,
    pub rhs: Region,
    pub holds: bool,
}

impl ContainmentFact {
    fn check(label: &str, lhs: Region, rhs: Region) -> Result<ContainmentFact> {
        let holds = lhs.is_subset(&rhs)?;
        Ok(ContainmentFact { label: label.to_string(), lhs, rhs, holds })
    }

    pub fn reverify(&self) -> Result<bool> {
        Ok(self.lhs.is_subset(&self.rhs)? == self.holds)
    }
}

/// Summary of the randomized membership audit run for a tensor certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditReport {
    pub seed: u64,
    pub points: usize,
    pub violations: usize,
}

/// Configuration for the sampling audit of tensor certificates.
#[derive(Clone, Copy, Debug)]
pub struct AuditConfig {
    pub seed: u64,
    pub samples: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig { seed: 0, samples: 10_000 }
    }
}

/// Per-factor data of a way-below certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorCertificate {
    pub way_below: bool,
    #[serde(with = "rat_string_opt", default)]
    pub epsilon: Option<Rat>,
    #[serde(rename = "c", with = "rat_string_opt", default)]
    pub margin: Option<Rat>,
}

/// A verifiable record of a way-below verdict: per-factor epsilons and
/// margin constants, their exact products, every containment checked along
/// the way, and the sampling audit when one ran.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WayBelowCertificate {
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    pub factors: Vec<FactorCertificate>,
    #[serde(with = "rat_string_opt", default)]
    pub epsilon: Option<Rat>,
    #[serde(rename = "c", with = "rat_string_opt", default)]
    pub margin: Option<Rat>,
    pub containments: Vec<ContainmentFact>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub audit: Option<AuditReport>,
}

impl WayBelowCertificate {
    fn refused(reason: String, factors: Vec<FactorCertificate>) -> Self {
        WayBelowCertificate {
            verdict: false,
            reason: Some(reason),
            factors,
            epsilon: None,
            margin: None,
            containments: Vec::new(),
            audit: None,
        }
    }

    /// Re-checks everything the certificate records: multiplicativity of the
    /// combined epsilon and margin, every containment fact, and audit
    /// cleanliness.
    pub fn reverify(&self) -> Result<bool> {
        if self.verdict {
            let eps: Option<Rat> = self
                .factors
                .iter()
                .map(|f| f.epsilon.clone())
                .try_fold(Rat::one(), |acc, e| e.map(|e| acc * e));
            if eps != self.epsilon {
                return Ok(false);
            }
            let margin: Option<Rat> = self
                .factors
                .iter()
                .map(|f| f.margin.clone())
                .try_fold(Rat::one(), |acc, c| c.map(|c| acc * c));
            if margin != self.margin {
                return Ok(false);
            }
        }
        for fact in &self.containments {
            if !fact.reverify()? {
                return Ok(false);
            }
        }
        if let Some(audit) = &self.audit {
            if self.verdict && audit.violations != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Draws an exact rational point from compact 1D components: a uniformly
/// chosen component, then a dyadic position inside it.
fn sample_point(comps: &[crate::plfn::Component], rng: &mut ChaCha8Rng) -> Rat {
    let c = &comps[rng.gen_range(0..comps.len())];
    if c.lo == c.hi {
        return c.lo.clone();
    }
    let t = rat_int(rng.gen_range(0..=1024)) / rat_int(1024);
    &c.lo + (&c.hi - &c.lo) * t
}

/// Way-below certificate for a scalar pair over a compact space: runs the
/// three deciders (which must agree), records the epsilon and margin, and
/// stores the containment facts.
pub fn way_below_certificate(
    a: &CuntzClass,
    b: &CuntzClass,
    k: &Space,
) -> Result<WayBelowCertificate> {
    check_shapes(a, b)?;
    check_ambient(a, k)?;

    let by_support = way_below_support(a, b, k)?;
    let margin = way_below_margin(a, b, k)?;
    let epsilon = way_below_epsilon(a, b, k)?;
    if by_support != margin.is_some() || by_support != epsilon.is_some() {
        return Err(Error::Internal("way-below deciders disagree".into()));
    }

    let mut containments = Vec::new();
    let cl = k.relative_closure(&a.support())?;
    containments.push(ContainmentFact::check("closure_supp_a_in_supp_b", cl, b.support())?);
    let mut factors = Vec::new();
    for (fa, fb) in a.factors().iter().zip(b.factors()) {
        if a.is_zero() {
            // The zero class carries the vacuous per-factor levels; no
            // superlevel containment is meaningful.
            let level = zero_class_level(fb);
            factors.push(FactorCertificate {
                way_below: true,
                epsilon: Some(level.clone()),
                margin: Some(level),
            });
            continue;
        }
        let fk = fa.space();
        let f_eps = scalar_epsilon(fa, fb, fk)?;
        let f_margin = scalar_margin_star(fa, fb, fk)?.map(|s| s / rat_int(2));
        if let Some(e) = &f_eps {
            containments.push(ContainmentFact::check(
                "supp_a_in_superlevel_b_epsilon",
                fa.open_support(),
                fb.superlevel(e)?,
            )?);
        }
        factors.push(FactorCertificate {
            way_below: f_eps.is_some(),
            epsilon: f_eps,
            margin: f_margin,
        });
    }

    Ok(WayBelowCertificate {
        verdict: by_support,
        reason: if by_support {
            None
        } else {
            Some("closure of supp(a) escapes supp(b)".into())
        },
        factors,
        epsilon,
        margin,
        containments,
        audit: None,
    })
}

/// Tensor way-below certificate: decides `[a1 (x) a2] << [b1 (x) b2]` from
/// the factor verdicts.
///
/// When both factors are way-below, the certificate fixes
/// `eps = eps1 * eps2` and `c = c1 * c2`, verifies the cutdown-support chain
/// exactly at the factor level (supp(a_i) inside the eps_i superlevel of
/// b_i), restates the first link as an exact product containment, and runs a
/// randomized grid audit of the membership implications behind the second
/// link. A zero factor `a_i` is way-below anything; its epsilon defaults to
/// half the peak of `b_i`. A zero `b_i` is an error.
pub fn tensor_way_below(
    a1: &CuntzClass,
    b1: &CuntzClass,
    a2: &CuntzClass,
    b2: &CuntzClass,
    k1: &Space,
    k2: &Space,
    audit: AuditConfig,
) -> Result<WayBelowCertificate> {
    for (x, k) in [(a1, k1), (b1, k1), (a2, k2), (b2, k2)] {
        if x.factors().len() != 1 {
            return Err(Error::ShapeMismatch);
        }
        check_ambient(x, k)?;
    }
    let (fa1, fb1) = (&a1.factors()[0], &b1.factors()[0]);
    let (fa2, fb2) = (&a2.factors()[0], &b2.factors()[0]);
    if fb1.is_zero() || fb2.is_zero() {
        return Err(Error::ZeroElement);
    }

    let mut factors = Vec::new();
    for (i, (fa, fb, k)) in [(fa1, fb1, k1), (fa2, fb2, k2)].into_iter().enumerate() {
        let a_cls = CuntzClass::from_scalar(fa.clone());
        let b_cls = CuntzClass::from_scalar(fb.clone());
        let wb = way_below_support(&a_cls, &b_cls, k)?;
        if !wb {
            factors.push(FactorCertificate { way_below: false, epsilon: None, margin: None });
            return Ok(WayBelowCertificate::refused(
                format!("factor {} not compactly contained", i + 1),
                factors,
            ));
        }
        let eps = scalar_epsilon(fa, fb, k)?.expect("way-below factor yields an epsilon");
        let margin = scalar_margin_star(fa, fb, k)?.expect("way-below factor yields a margin")
            / rat_int(2);
        factors.push(FactorCertificate {
            way_below: true,
            epsilon: Some(eps),
            margin: Some(margin),
        });
    }

    let eps1 = factors[0].epsilon.clone().unwrap();
    let eps2 = factors[1].epsilon.clone().unwrap();
    let epsilon = &eps1 * &eps2;
    let margin =
        factors[0].margin.clone().unwrap() * factors[1].margin.clone().unwrap();

    // Link 1, factor-wise and as an exact product containment:
    // supp(a1) x supp(a2) inside superlevel(b1, eps1) x superlevel(b2, eps2).
    let sl1 = fb1.superlevel(&eps1)?;
    let sl2 = fb2.superlevel(&eps2)?;
    let containments = vec![
        ContainmentFact::check("supp_a1_in_superlevel_b1", fa1.open_support(), sl1.clone())?,
        ContainmentFact::check("supp_a2_in_superlevel_b2", fa2.open_support(), sl2.clone())?,
        ContainmentFact::check(
            "supp_product_in_superlevel_product",
            fa1.open_support().product(&fa2.open_support()),
            sl1.product(&sl2),
        )?,
        ContainmentFact::check(
            "closure_supp_a1_in_supp_b1",
            k1.relative_closure(&fa1.open_support())?,
            fb1.open_support(),
        )?,
        ContainmentFact::check(
            "closure_supp_a2_in_supp_b2",
            k2.relative_closure(&fa2.open_support())?,
            fb2.open_support(),
        )?,
    ];

    // Link 2 rests on factorization: membership in both factor superlevel
    // sets forces b1(x) * b2(y) > eps1 * eps2. The audit samples the
    // implications on a randomized grid; exact arithmetic, zero tolerance.
    let mut rng = ChaCha8Rng::seed_from_u64(audit.seed);
    let support_product = fa1.open_support().product(&fa2.open_support());
    let comps1 = crate::plfn::components_of(k1)?;
    let comps2 = crate::plfn::components_of(k2)?;
    let mut violations = 0usize;
    for _ in 0..audit.samples {
        let x = sample_point(&comps1, &mut rng);
        let y = sample_point(&comps2, &mut rng);
        let b_prod = fb1.eval(&x)? * fb2.eval(&y)?;
        let in_sl1 = sl1.contains_point(std::slice::from_ref(&x))?;
        let in_sl2 = sl2.contains_point(std::slice::from_ref(&y))?;
        if in_sl1 && in_sl2 && b_prod <= epsilon {
            violations += 1;
        }
        let a_prod = fa1.eval(&x)? * fa2.eval(&y)?;
        let in_supp = support_product.contains_point(&[x, y])?;
        if a_prod.is_positive() != in_supp {
            violations += 1;
        }
        if a_prod.is_positive() && b_prod <= margin {
            violations += 1;
        }
    }

    let verdict = containments.iter().all(|f| f.holds) && violations == 0;
    Ok(WayBelowCertificate {
        verdict,
        reason: if verdict { None } else { Some("certificate checks failed".into()) },
        factors,
        epsilon: Some(epsilon),
        margin: Some(margin),
        containments,
        audit: Some(AuditReport { seed: audit.seed, points: audit.samples, violations }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{Block, Interval};
    use crate::scalar::parse_rat;
    use num_traits::Zero;

    fn q(s: &str) -> Rat {
        parse_rat(s).unwrap()
    }

    fn space02() -> Space {
        Space::new(Region::from_interval(Interval::closed(q("0"), q("2")))).unwrap()
    }

    fn tent(c: &str, w: &str, h: &str) -> PlFunction {
        let (c, w, h) = (q(c), q(w), q(h));
        let k = space02();
        let left = &c - &w;
        let right = &c + &w;
        assert!(left >= q("0") && right <= q("2"));
        let mut bp = vec![q("0")];
        let mut val = vec![Rat::zero()];
        for (x, v) in [(left, Rat::zero()), (c, h), (right, Rat::zero())] {
            if x > q("0") && x < q("2") {
                bp.push(x);
                val.push(v);
            }
        }
        bp.push(q("2"));
        val.push(Rat::zero());
        PlFunction::new(k, bp, val).unwrap()
    }

    fn open_region(lo: &str, hi: &str) -> Region {
        Region::from_interval(Interval::open(q(lo), q(hi)))
    }

    #[test]
    fn support_examples() {
        let b = CuntzClass::from_scalar(tent("1", "1", "1"));
        assert_eq!(b.support(), open_region("0", "2"));

        let bb = CuntzClass::new(
            PositiveElement::tensor(vec![tent("1", "1", "1"), tent("1", "1", "1")]).unwrap(),
        );
        assert_eq!(bb.support(), open_region("0", "2").product(&open_region("0", "2")));

        let z = PlFunction::zero(&space02()).unwrap();
        let zb = CuntzClass::new(
            PositiveElement::tensor(vec![z, tent("1", "1", "1")]).unwrap(),
        );
        assert!(zb.support().is_empty());
    }

    #[test]
    fn tensor_support_matches_pointwise_product() {
        // Seeded rational grid; membership in the product support must match
        // positivity of the product of evaluations, with no exceptions.
        let f1 = tent("1", "1/2", "1");
        let f2 = tent("3/2", "1/4", "2");
        let t = CuntzClass::new(PositiveElement::tensor(vec![f1.clone(), f2.clone()]).unwrap());
        let supp = t.support();
        for i in 0..=100u32 {
            for j in 0..=100u32 {
                let x = rat_int(i as i64) / rat_int(50);
                let y = rat_int(j as i64) / rat_int(50);
                let pos = (f1.eval(&x).unwrap() * f2.eval(&y).unwrap()).is_positive();
                let inside = supp.contains_point(&[x, y]).unwrap();
                assert_eq!(pos, inside, "at grid point ({}, {})", i, j);
            }
        }
    }

    #[test]
    fn cuntz_leq_examples() {
        let a = CuntzClass::from_scalar(tent("1", "1/4", "1"));
        let b = CuntzClass::from_scalar(tent("1", "1", "1"));
        assert!(cuntz_leq(&b, &b).unwrap());
        assert!(cuntz_leq(&a, &b).unwrap());

        // A function positive at the left space endpoint has 0 in its
        // support; the open tent does not.
        let k = space02();
        let touches = PlFunction::new(
            k,
            vec![q("0"), q("1"), q("2")],
            vec![q("1"), q("0"), q("0")],
        )
        .unwrap();
        assert!(!cuntz_leq(&CuntzClass::from_scalar(touches), &b).unwrap());
    }

    #[test]
    fn tensor_leq_examples() {
        let a = CuntzClass::from_scalar(tent("1", "1/4", "1"));
        let b = CuntzClass::from_scalar(tent("1", "1", "1"));
        assert!(tensor_leq(&a, &b, &a, &b).unwrap());

        let z = CuntzClass::from_scalar(PlFunction::zero(&space02()).unwrap());
        assert!(tensor_leq(&z, &b, &a, &b).unwrap());
        assert!(tensor_leq(&b, &b, &b, &b).unwrap());

        // Factor comparison is a precondition.
        assert!(matches!(
            tensor_leq(&b, &a, &a, &b),
            Err(Error::SupportNotContained)
        ));
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let k = space02();
        let other = Space::new(Region::from_interval(Interval::closed(q("0"), q("1")))).unwrap();
        let a = CuntzClass::from_scalar(tent("1", "1/4", "1"));
        let b = CuntzClass::from_scalar(tent("1", "1", "1"));
        assert!(matches!(
            way_below_support(&a, &b, &other),
            Err(Error::SpaceMismatch)
        ));
        assert!(matches!(way_below_margin(&a, &b, &other), Err(Error::SpaceMismatch)));
        assert!(matches!(way_below_epsilon(&a, &b, &other), Err(Error::SpaceMismatch)));
        let _ = k;
    }

    #[test]
    fn way_below_support_examples() {
        let k = space02();
        let a = CuntzClass::from_scalar(tent("1", "1/4", "1"));
        let b = CuntzClass::from_scalar(tent("1", "1", "1"));
        assert!(way_below_support(&a, &b, &k).unwrap());
        assert!(!way_below_support(&b, &b, &k).unwrap());

        let z = CuntzClass::from_scalar(PlFunction::zero(&k).unwrap());
        assert!(way_below_support(&z, &b, &k).unwrap());
    }

    #[test]
    fn margin_examples() {
        let k = space02();
        let a = CuntzClass::from_scalar(tent("1", "1/4", "1"));
        let b = CuntzClass::from_scalar(tent("1", "1", "1"));
        // min of b over [3/4, 5/4] is 3/4; halved to 3/8.
        assert_eq!(way_below_margin(&a, &b, &k).unwrap(), Some(q("3/8")));
        assert_eq!(way_below_margin(&b, &b, &k).unwrap(), None);

        let k2 = k.product(&k).unwrap();
        let ta = CuntzClass::new(
            PositiveElement::tensor(vec![tent("1", "1/4", "1"), tent("1", "1/4", "1")]).unwrap(),
        );
        let tb = CuntzClass::new(
            PositiveElement::tensor(vec![tent("1", "1", "1"), tent("1", "1", "1")]).unwrap(),
        );
        assert_eq!(way_below_margin(&ta, &tb, &k2).unwrap(), Some(q("9/64")));
    }

    #[test]
    fn epsilon_examples() {
        let k = space02();
        let a = CuntzClass::from_scalar(tent("1", "1/4", "1"));
        let b = CuntzClass::from_scalar(tent("1", "1", "1"));
        let eps = way_below_epsilon(&a, &b, &k).unwrap().unwrap();
        assert_eq!(eps, q("3/8"));
        // supp(a) = (3/4, 5/4) sits inside {b > 3/8} = (3/8, 13/8).
        assert_eq!(
            b.factors()[0].superlevel(&eps).unwrap(),
            open_region("3/8", "13/8")
        );

        assert_eq!(way_below_epsilon(&b, &b, &k).unwrap(), None);

        let k2 = k.product(&k).unwrap();
        let ta = CuntzClass::new(
            PositiveElement::tensor(vec![tent("1", "1/4", "1"), tent("1", "1/4", "1")]).unwrap(),
        );
        let tb = CuntzClass::new(
            PositiveElement::tensor(vec![tent("1", "1", "1"), tent("1", "1", "1")]).unwrap(),
        );
        assert_eq!(way_below_epsilon(&ta, &tb, &k2).unwrap(), Some(q("9/64")));
    }

    #[test]
    fn decider_agreement_on_boundary_cases() {
        let k = space02();
        let b = tent("1", "1", "1");
        // Support of a shares the left endpoint of supp(b).
        let a = PlFunction::new(
            space02(),
            vec![q("0"), q("1/2"), q("1"), q("2")],
            vec![q("0"), q("1"), q("0"), q("0")],
        )
        .unwrap();
        let (a, b) = (CuntzClass::from_scalar(a), CuntzClass::from_scalar(b));
        let s = way_below_support(&a, &b, &k).unwrap();
        let m = way_below_margin(&a, &b, &k).unwrap();
        let e = way_below_epsilon(&a, &b, &k).unwrap();
        assert!(!s);
        assert_eq!(s, m.is_some());
        assert_eq!(s, e.is_some());
    }

    #[test]
    fn zero_tensor_factor_keeps_deciders_consistent() {
        // One zero factor makes the whole tensor the zero class, regardless
        // of the other factor.
        let k = space02();
        let k2 = k.product(&k).unwrap();
        let z = PlFunction::zero(&k).unwrap();
        let b = tent("1", "1", "1");
        let a_cls = CuntzClass::new(PositiveElement::tensor(vec![z, b.clone()]).unwrap());
        let b_cls = CuntzClass::new(PositiveElement::tensor(vec![b.clone(), b]).unwrap());
        assert!(way_below_support(&a_cls, &b_cls, &k2).unwrap());
        assert!(way_below_margin(&a_cls, &b_cls, &k2).unwrap().is_some());
        assert!(way_below_epsilon(&a_cls, &b_cls, &k2).unwrap().is_some());
        assert!(is_compact_class(&a_cls, &k2).unwrap());

        let cert = way_below_certificate(&a_cls, &b_cls, &k2).unwrap();
        assert!(cert.verdict);
        assert!(cert.reverify().unwrap());
    }

    #[test]
    fn compact_class_examples() {
        // Indicator of a clopen component.
        let k = Space::new(
            Region::from_blocks(
                1,
                vec![
                    Block::new(vec![Interval::closed(q("0"), q("1"))]).unwrap(),
                    Block::new(vec![Interval::closed(q("2"), q("3"))]).unwrap(),
                ],
            )
            .unwrap(),
        )
        .unwrap();
        let ind = PlFunction::new(
            k.clone(),
            vec![q("0"), q("1"), q("2"), q("3")],
            vec![q("0"), q("0"), q("1"), q("1")],
        )
        .unwrap();
        assert!(is_compact_class(&CuntzClass::from_scalar(ind), &k).unwrap());

        let k02 = space02();
        let b = CuntzClass::from_scalar(tent("1", "1", "1"));
        assert!(!is_compact_class(&b, &k02).unwrap());

        let z = CuntzClass::from_scalar(PlFunction::zero(&k02).unwrap());
        assert!(is_compact_class(&z, &k02).unwrap());
    }

    #[test]
    fn module_inner_examples() {
        let b = tent("1", "1", "1");
        let bb = PositiveElement::tensor(vec![b.clone(), b.clone()]).unwrap();
        let inner = module_inner(&bb, &bb).unwrap();
        assert_eq!(
            inner.support().unwrap(),
            open_region("0", "2").product(&open_region("0", "2"))
        );
        assert_eq!(inner.eval(&[q("1"), q("1")]).unwrap(), q("1"));

        let z = PlFunction::zero(&space02()).unwrap();
        let zb = PositiveElement::tensor(vec![z, b.clone()]).unwrap();
        let zero_inner = module_inner(&zb, &bb).unwrap();
        assert!(zero_inner.is_zero().unwrap());
    }

    #[test]
    fn inner_product_eval_matches_support() {
        let f1 = tent("1", "1/2", "1");
        let f2 = tent("1", "1", "2");
        let g1 = tent("5/4", "1/2", "1");
        let g2 = tent("3/4", "3/4", "1");
        let s = PositiveElement::tensor(vec![f1, f2]).unwrap();
        let t = PositiveElement::tensor(vec![g1, g2]).unwrap();
        let inner = module_inner(&s, &t).unwrap();
        let supp = inner.support().unwrap();
        for i in 0..=32i64 {
            for j in 0..=32i64 {
                let p = [rat_int(i) / rat_int(16), rat_int(j) / rat_int(16)];
                assert_eq!(
                    inner.eval(&p).unwrap().is_positive(),
                    supp.contains_point(&p).unwrap(),
                    "probe ({}, {})",
                    i,
                    j
                );
            }
        }
    }

    #[test]
    fn tensor_witness_examples() {
        let k = space02();
        let u = open_region("3/4", "5/4");
        let v = open_region("0", "2");
        let e = crate::plfn::urysohn(&u, &v, &k).unwrap();
        assert!(tensor_witness_check(&e, &u, &v, &e, &u, &v, &k, &k).unwrap());

        // Constant 1 witness on a compact space.
        let k1 = Space::new(Region::from_interval(Interval::closed(q("0"), q("1")))).unwrap();
        let one = PlFunction::constant(&k1, q("1")).unwrap();
        let all = k1.region().clone();
        assert!(tensor_witness_check(&one, &all, &all, &e, &u, &v, &k1, &k).unwrap());

        // A tampered witness that fails to act as the identity is rejected.
        let half = e.scale(&q("1/2")).unwrap();
        assert!(!tensor_witness_check(&half, &u, &v, &e, &u, &v, &k, &k).unwrap());
    }

    #[test]
    fn scalar_certificate() {
        let k = space02();
        let a = CuntzClass::from_scalar(tent("1", "1/4", "1"));
        let b = CuntzClass::from_scalar(tent("1", "1", "1"));
        let cert = way_below_certificate(&a, &b, &k).unwrap();
        assert!(cert.verdict);
        assert_eq!(cert.epsilon, Some(q("3/8")));
        assert_eq!(cert.margin, Some(q("3/8")));
        assert!(cert.reverify().unwrap());

        let refl = way_below_certificate(&b, &b, &k).unwrap();
        assert!(!refl.verdict);
        assert!(refl.reverify().unwrap());
    }

    #[test]
    fn tensor_certificate_worked_example() {
        let k = space02();
        let a = CuntzClass::from_scalar(tent("1", "1/4", "1"));
        let b = CuntzClass::from_scalar(tent("1", "1", "1"));
        let cert = tensor_way_below(
            &a,
            &b,
            &a,
            &b,
            &k,
            &k,
            AuditConfig { seed: 7, samples: 2_000 },
        )
        .unwrap();
        assert!(cert.verdict);
        assert_eq!(cert.factors[0].epsilon, Some(q("3/8")));
        assert_eq!(cert.factors[1].epsilon, Some(q("3/8")));
        assert_eq!(cert.epsilon, Some(q("9/64")));
        assert_eq!(cert.audit.as_ref().unwrap().violations, 0);
        assert!(cert.reverify().unwrap());
    }

    #[test]
    fn tensor_certificate_zero_and_refusal() {
        let k = space02();
        let b = CuntzClass::from_scalar(tent("1", "1", "1"));
        let z = CuntzClass::from_scalar(PlFunction::zero(&k).unwrap());
        let cert = tensor_way_below(
            &z,
            &b,
            &z,
            &b,
            &k,
            &k,
            AuditConfig { seed: 1, samples: 500 },
        )
        .unwrap();
        assert!(cert.verdict);
        // Zero factor: epsilon defaults to half the peak of b.
        assert_eq!(cert.factors[0].epsilon, Some(q("1/2")));

        let not_below = tensor_way_below(
            &b,
            &b,
            &z,
            &b,
            &k,
            &k,
            AuditConfig { seed: 1, samples: 500 },
        )
        .unwrap();
        assert!(!not_below.verdict);
        assert_eq!(not_below.reason.as_deref(), Some("factor 1 not compactly contained"));

        assert!(matches!(
            tensor_way_below(&z, &z, &z, &z, &k, &k, AuditConfig::default()),
            Err(Error::ZeroElement)
        ));
    }
}
