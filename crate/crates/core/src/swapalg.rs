//! The swapping algebra: the free commutative algebra on pairs of circle
//! points, modulo `XX = 0`, with the bracket
//! `{Xx,Yy}_a = [Xx,Yy](Xy.Yx + a.Xx.Yy)` extended by the Leibniz rule.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linking::{PointConfig, PointId};

/// Exact coefficient type.
pub type Coeff = BigRational;

pub fn coeff(num: i64, den: i64) -> Coeff {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn coeff_from_small(r: Rational64) -> Coeff {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// An ordered pair `Xx` of distinct points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratorPair {
    pub left: PointId,
    pub right: PointId,
}

impl GeneratorPair {
    /// `None` when `left == right`, i.e. the pair is zero.
    pub fn new(left: PointId, right: PointId) -> Option<Self> {
        (left != right).then_some(GeneratorPair { left, right })
    }
}

/// A sorted multiset of generator pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<GeneratorPair>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn from_pairs(mut pairs: Vec<GeneratorPair>) -> Self {
        pairs.sort_unstable();
        Monomial(pairs)
    }

    /// Product of `(left, right)` id pairs, `None` if any pair is degenerate.
    pub fn from_ids(ids: &[(PointId, PointId)]) -> Option<Self> {
        ids.iter()
            .map(|&(l, r)| GeneratorPair::new(l, r))
            .collect::<Option<Vec<_>>>()
            .map(Self::from_pairs)
    }

    pub fn pairs(&self) -> &[GeneratorPair] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            if self.0[i] <= other.0[j] {
                out.push(self.0[i]);
                i += 1;
            } else {
                out.push(other.0[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    pub fn mul_pair(&self, p: GeneratorPair) -> Monomial {
        let mut out = self.0.clone();
        let at = out.partition_point(|q| *q <= p);
        out.insert(at, p);
        Monomial(out)
    }

    /// Distinct factors with multiplicities.
    pub fn factor_counts(&self) -> Vec<(GeneratorPair, usize)> {
        let mut out: Vec<(GeneratorPair, usize)> = Vec::new();
        for p in &self.0 {
            match out.last_mut() {
                Some((q, k)) if q == p => *k += 1,
                _ => out.push((*p, 1)),
            }
        }
        out
    }

    pub fn count(&self, p: GeneratorPair) -> usize {
        self.0.iter().filter(|q| **q == p).count()
    }

    /// Remove one copy of `p`, if present.
    pub fn without(&self, p: GeneratorPair) -> Option<Monomial> {
        let at = self.0.iter().position(|q| *q == p)?;
        let mut out = self.0.clone();
        out.remove(at);
        Some(Monomial(out))
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = self.0.clone();
        for p in &other.0 {
            let at = out.iter().position(|q| q == p)?;
            out.remove(at);
        }
        Some(Monomial(out))
    }

    /// Least common multiple (maximum multiplicities).
    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (p, k) in other.factor_counts() {
            let have = self.count(p);
            for _ in have..k {
                out.push(p);
            }
        }
        Monomial::from_pairs(out)
    }

    /// Sorted multisets of left and right points.
    pub fn endpoint_multisets(&self) -> (Vec<PointId>, Vec<PointId>) {
        let mut l: Vec<PointId> = self.0.iter().map(|p| p.left).collect();
        let mut r: Vec<PointId> = self.0.iter().map(|p| p.right).collect();
        l.sort_unstable();
        r.sort_unstable();
        (l, r)
    }

    pub fn display<'a>(&'a self, cfg: &'a PointConfig) -> MonomialDisplay<'a> {
        MonomialDisplay { m: self, cfg }
    }
}

pub struct MonomialDisplay<'a> {
    m: &'a Monomial,
    cfg: &'a PointConfig,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m.is_one() {
            return write!(f, "1");
        }
        for (i, p) in self.m.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "[{} {}]", self.cfg.point(p.left).label, self.cfg.point(p.right).label)?;
        }
        Ok(())
    }
}

/// A finite sum of monomials with nonzero exact coefficients, over one [`PointConfig`].
#[derive(Clone)]
pub struct AlgebraElement {
    config: Arc<PointConfig>,
    terms: BTreeMap<Monomial, Coeff>,
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraElement({})", self)
    }
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.config.tag() == other.config.tag() && self.terms == other.terms
    }
}

impl Eq for AlgebraElement {}

fn add_term(terms: &mut BTreeMap<Monomial, Coeff>, m: Monomial, c: Coeff) {
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

impl AlgebraElement {
    pub fn zero(config: &Arc<PointConfig>) -> Self {
        AlgebraElement {
            config: Arc::clone(config),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(config: &Arc<PointConfig>, c: Coeff) -> Self {
        Self::term(config, Monomial::one(), c)
    }

    pub fn one(config: &Arc<PointConfig>) -> Self {
        Self::constant(config, Coeff::one())
    }

    pub fn term(config: &Arc<PointConfig>, m: Monomial, c: Coeff) -> Self {
        let mut e = Self::zero(config);
        add_term(&mut e.terms, m, c);
        e
    }

    pub fn monomial(config: &Arc<PointConfig>, m: Monomial) -> Self {
        Self::term(config, m, Coeff::one())
    }

    /// The generator `Xx`, or zero when `X = x`.
    pub fn generator(config: &Arc<PointConfig>, left: PointId, right: PointId) -> Self {
        match GeneratorPair::new(left, right) {
            Some(p) => Self::monomial(config, Monomial(vec![p])),
            None => Self::zero(config),
        }
    }

    /// The generator for two labels.
    pub fn generator_labels(config: &Arc<PointConfig>, left: &str, right: &str) -> Result<Self> {
        Ok(Self::generator(config, config.id(left)?, config.id(right)?))
    }

    pub fn from_terms(config: &Arc<PointConfig>, terms: impl IntoIterator<Item = (Monomial, Coeff)>) -> Self {
        let mut e = Self::zero(config);
        for (m, c) in terms {
            add_term(&mut e.terms, m, c);
        }
        e
    }

    pub fn config(&self) -> &Arc<PointConfig> {
        &self.config
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Coeff> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single monomial and coefficient, if the element has exactly one term.
    pub fn as_single_term(&self) -> Option<(&Monomial, &Coeff)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Maximum degree, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn same_config(&self, other: &Self) -> bool {
        self.config.tag() == other.config.tag()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.same_config(other) {
            Ok(())
        } else {
            Err(Error::ConfigMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            add_term(&mut out.terms, m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(&self.config);
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                add_term(&mut out.terms, m.mul(n), c * d);
            }
        }
        Ok(out)
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        let mut out = Self::zero(&self.config);
        for (n, c) in &self.terms {
            add_term(&mut out.terms, n.mul(m), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Coeff) -> Self {
        if s.is_zero() {
            return Self::zero(&self.config);
        }
        AlgebraElement {
            config: Arc::clone(&self.config),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    fn neg_ref(&self) -> Self {
        self.scale(&-Coeff::one())
    }

    /// Evaluate with a numeric value for each generator pair.
    pub fn evaluate<F: FnMut(GeneratorPair) -> f64>(&self, mut value: F) -> f64 {
        let mut cache: BTreeMap<GeneratorPair, f64> = BTreeMap::new();
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut prod = to_f64(c);
            for p in m.pairs() {
                prod *= *cache.entry(*p).or_insert_with(|| value(*p));
            }
            total += prod;
        }
        total
    }
}

pub fn to_f64(c: &Coeff) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(f64::NAN)
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&AlgebraElement> for &AlgebraElement {
            type Output = AlgebraElement;
            /// Panics when the operands live on different point configurations.
            fn $method(self, rhs: &AlgebraElement) -> AlgebraElement {
                self.$checked(rhs).expect("operands over different point configurations")
            }
        }
        impl $tr<AlgebraElement> for AlgebraElement {
            type Output = AlgebraElement;
            fn $method(self, rhs: AlgebraElement) -> AlgebraElement {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.neg_ref()
    }
}

impl Neg for AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.neg_ref()
    }
}

pub(crate) fn write_coeff_term(
    f: &mut fmt::Formatter<'_>,
    first: bool,
    c: &Coeff,
    body: Option<&dyn fmt::Display>,
) -> fmt::Result {
    let negative = c.is_negative();
    let mag = c.abs();
    match (first, negative) {
        (true, true) => write!(f, "-")?,
        (true, false) => {}
        (false, true) => write!(f, " - ")?,
        (false, false) => write!(f, " + ")?,
    }
    match body {
        None => write!(f, "{}", mag),
        Some(b) if mag.is_one() => write!(f, "{}", b),
        Some(b) => write!(f, "{}*{}", mag, b),
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if m.is_one() {
                write_coeff_term(f, i == 0, c, None)?;
            } else {
                let d = m.display(&self.config);
                write_coeff_term(f, i == 0, c, Some(&d))?;
            }
        }
        Ok(())
    }
}

/// `{p, q}_a` for two generator pairs, accumulated into `out` with factor `scale * rest`.
fn accumulate_pair_bracket(
    cfg: &PointConfig,
    p: GeneratorPair,
    q: GeneratorPair,
    rest: &Monomial,
    scale: &Coeff,
    alpha: &Coeff,
    out: &mut BTreeMap<Monomial, Coeff>,
) {
    let twice = cfg.twice_linking(p.left, p.right, q.left, q.right);
    if twice == 0 {
        return;
    }
    let c = scale * coeff(twice as i64, 2);
    if let (Some(a), Some(b)) = (GeneratorPair::new(p.left, q.right), GeneratorPair::new(q.left, p.right)) {
        add_term(out, rest.mul_pair(a).mul_pair(b), c.clone());
    }
    if !alpha.is_zero() {
        add_term(out, rest.mul_pair(p).mul_pair(q), c * alpha);
    }
}

/// The swapping bracket `{a, b}_alpha`.
pub fn swap_bracket(a: &AlgebraElement, b: &AlgebraElement, alpha: &Coeff) -> Result<AlgebraElement> {
    a.check(b)?;
    let cfg = &*a.config;
    let mut out = BTreeMap::new();
    for (m, cm) in &a.terms {
        let fm = m.factor_counts();
        if fm.is_empty() {
            continue;
        }
        for (n, cn) in &b.terms {
            let fnn = n.factor_counts();
            let cmn = cm * cn;
            for &(p, kp) in &fm {
                let m_rest = m.without(p).expect("factor present");
                for &(q, kq) in &fnn {
                    let rest = m_rest.mul(&n.without(q).expect("factor present"));
                    let scale = &cmn * coeff((kp * kq) as i64, 1);
                    accumulate_pair_bracket(cfg, p, q, &rest, &scale, alpha, &mut out);
                }
            }
        }
    }
    Ok(AlgebraElement {
        config: Arc::clone(&a.config),
        terms: out,
    })
}

/// `{{a,b},c} + {{b,c},a} + {{c,a},b}`.
pub fn jacobiator(a: &AlgebraElement, b: &AlgebraElement, c: &AlgebraElement, alpha: &Coeff) -> Result<AlgebraElement> {
    let t1 = swap_bracket(&swap_bracket(a, b, alpha)?, c, alpha)?;
    let t2 = swap_bracket(&swap_bracket(b, c, alpha)?, a, alpha)?;
    let t3 = swap_bracket(&swap_bracket(c, a, alpha)?, b, alpha)?;
    t1.checked_add(&t2)?.checked_add(&t3)
}
