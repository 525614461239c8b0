//! Fractions with monomial denominators: cross fractions, multi fractions,
//! elementary functions `T(g1,...,gp)` and length functions.
//!
//! Only monomial denominators are supported. Every object built here
//! (cross fractions, multi fractions, elementary functions and their
//! brackets) has one, and it keeps reduction canonical without
//! multivariate gcds.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linking::{PointConfig, PointId};
use crate::swapalg::{coeff, coeff_from_small, swap_bracket, write_coeff_term, AlgebraElement, Coeff, GeneratorPair, Monomial};
use crate::words::{action_label, minus_label, plus_label, Word};

/// `scale * numerator / denominator`, kept reduced.
#[derive(Clone)]
pub struct BalancedFraction {
    numerator: AlgebraElement,
    denominator: Monomial,
    scale: Coeff,
}

impl fmt::Debug for BalancedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BalancedFraction({})", self)
    }
}

impl PartialEq for BalancedFraction {
    /// Cross-multiplication equality.
    fn eq(&self, other: &Self) -> bool {
        if !self.numerator.same_config(&other.numerator) {
            return false;
        }
        let lhs = self.numerator_scaled().mul_monomial(&other.denominator);
        let rhs = other.numerator_scaled().mul_monomial(&self.denominator);
        lhs == rhs
    }
}

impl Eq for BalancedFraction {}

impl BalancedFraction {
    /// `numerator / denominator`, reduced.
    pub fn new(numerator: AlgebraElement, denominator: Monomial) -> Self {
        let mut f = BalancedFraction {
            numerator,
            denominator,
            scale: Coeff::one(),
        };
        f.reduce();
        f
    }

    pub fn from_element(e: AlgebraElement) -> Self {
        Self::new(e, Monomial::one())
    }

    pub fn zero(config: &Arc<PointConfig>) -> Self {
        Self::from_element(AlgebraElement::zero(config))
    }

    pub fn one(config: &Arc<PointConfig>) -> Self {
        Self::from_element(AlgebraElement::one(config))
    }

    pub fn config(&self) -> &Arc<PointConfig> {
        self.numerator.config()
    }

    /// Primitive numerator (integer coefficients, content 1, leading coefficient positive).
    pub fn numerator(&self) -> &AlgebraElement {
        &self.numerator
    }

    pub fn denominator(&self) -> &Monomial {
        &self.denominator
    }

    pub fn scale(&self) -> &Coeff {
        &self.scale
    }

    /// `scale * numerator`.
    pub fn numerator_scaled(&self) -> AlgebraElement {
        self.numerator.scale(&self.scale)
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.denominator.is_one()
            && self
                .numerator_scaled()
                .as_single_term()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    /// Cancel pair factors common to the denominator and every numerator
    /// monomial, then move the content of the numerator into `scale`.
    fn reduce(&mut self) {
        let cfg = Arc::clone(self.numerator.config());
        if self.numerator.is_zero() {
            self.denominator = Monomial::one();
            self.scale = Coeff::zero();
            return;
        }
        let mut cancel = Vec::new();
        for (p, k) in self.denominator.factor_counts() {
            let m = self.numerator.terms().keys().map(|mono| mono.count(p)).min().unwrap_or(0);
            for _ in 0..k.min(m) {
                cancel.push(p);
            }
        }
        if !cancel.is_empty() {
            let cm = Monomial::from_pairs(cancel);
            self.denominator = self.denominator.div(&cm).expect("common factor divides denominator");
            self.numerator = AlgebraElement::from_terms(
                &cfg,
                self.numerator
                    .terms()
                    .iter()
                    .map(|(m, c)| (m.div(&cm).expect("common factor divides numerator"), c.clone())),
            );
        }
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        for c in self.numerator.terms().values() {
            den_lcm = den_lcm.lcm(c.denom());
            num_gcd = num_gcd.gcd(c.numer());
        }
        let lead_negative = self.numerator.terms().values().next().is_some_and(|c| c.is_negative());
        let mut content = Coeff::new(num_gcd, den_lcm);
        if lead_negative {
            content = -content;
        }
        let inv = content.recip();
        self.numerator = self.numerator.scale(&inv);
        self.scale = &self.scale * &content;
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let num = self.numerator_scaled().checked_mul(&other.numerator_scaled())?;
        Ok(Self::new(num, self.denominator.mul(&other.denominator)))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let den = self.denominator.lcm(&other.denominator);
        let a = self
            .numerator_scaled()
            .mul_monomial(&den.div(&self.denominator).expect("lcm multiple"));
        let b = other
            .numerator_scaled()
            .mul_monomial(&den.div(&other.denominator).expect("lcm multiple"));
        Ok(Self::new(a.checked_add(&b)?, den))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale_by(&-Coeff::one()))
    }

    pub fn scale_by(&self, s: &Coeff) -> Self {
        Self::new(self.numerator_scaled().scale(s), self.denominator.clone())
    }

    /// The inverse, available when the numerator is a single monomial.
    pub fn inverse(&self) -> Result<Self> {
        let num = self.numerator_scaled();
        let (m, c) = num.as_single_term().ok_or(Error::NonMonomialDivisor)?;
        let cfg = self.config();
        Ok(Self::new(
            AlgebraElement::term(cfg, self.denominator.clone(), c.recip()),
            m.clone(),
        ))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if !self.numerator.same_config(&other.numerator) {
            return Err(Error::ConfigMismatch);
        }
        self.checked_mul(&other.inverse()?)
    }

    /// Every numerator monomial has the left and right point multisets of the denominator.
    pub fn is_balanced(&self) -> bool {
        let target = self.denominator.endpoint_multisets();
        self.numerator.terms().keys().all(|m| m.endpoint_multisets() == target)
    }

    /// The element itself, when the denominator is 1.
    pub fn as_element(&self) -> Option<AlgebraElement> {
        self.denominator.is_one().then(|| self.numerator_scaled())
    }

    /// Numeric value given values of generator pairs.
    pub fn evaluate<F: FnMut(GeneratorPair) -> f64>(&self, mut value: F) -> Result<f64> {
        let den: f64 = self.denominator.pairs().iter().map(|p| value(*p)).product();
        if den == 0.0 || !den.is_finite() {
            return Err(Error::DegenerateEvaluation("denominator evaluates to zero".into()));
        }
        Ok(self.numerator_scaled().evaluate(&mut value) / den)
    }
}

impl fmt::Display for BalancedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator.is_one() {
            return write!(f, "{}", self.numerator_scaled());
        }
        let cfg = self.config();
        let num = self.numerator_scaled();
        match num.as_single_term() {
            Some((m, c)) => {
                if m.is_one() {
                    write_coeff_term(f, true, c, None)?;
                } else {
                    let d = m.display(cfg);
                    write_coeff_term(f, true, c, Some(&d))?;
                }
            }
            None => write!(f, "({})", num)?,
        }
        if self.denominator.degree() == 1 {
            write!(f, " / {}", self.denominator.display(cfg))
        } else {
            write!(f, " / ({})", self.denominator.display(cfg))
        }
    }
}

fn monomial_element(cfg: &Arc<PointConfig>, m: &Monomial) -> AlgebraElement {
    AlgebraElement::monomial(cfg, m.clone())
}

/// `{f, g}_alpha` by the quotient rule:
/// `({N,M}DE - N{D,M}E - M{N,E}D + NM{D,E}) / (D^2 E^2)`.
pub fn fraction_bracket(f: &BalancedFraction, g: &BalancedFraction, alpha: &Coeff) -> Result<BalancedFraction> {
    if !f.numerator.same_config(&g.numerator) {
        return Err(Error::ConfigMismatch);
    }
    let cfg = Arc::clone(f.config());
    let n = f.numerator_scaled();
    let m = g.numerator_scaled();
    let d = monomial_element(&cfg, &f.denominator);
    let e = monomial_element(&cfg, &g.denominator);
    let t1 = swap_bracket(&n, &m, alpha)?
        .mul_monomial(&f.denominator)
        .mul_monomial(&g.denominator);
    let t2 = (&n * &swap_bracket(&d, &m, alpha)?).mul_monomial(&g.denominator);
    let t3 = (&m * &swap_bracket(&n, &e, alpha)?).mul_monomial(&f.denominator);
    let t4 = &(&n * &m) * &swap_bracket(&d, &e, alpha)?;
    let num = &(&(&t1 - &t2) - &t3) + &t4;
    let den = f.denominator.mul(&f.denominator).mul(&g.denominator).mul(&g.denominator);
    Ok(BalancedFraction::new(num, den))
}

/// `[X;Y;x;y]` as point ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossFractionSpec {
    pub big_x: PointId,
    pub big_y: PointId,
    pub x: PointId,
    pub y: PointId,
}

impl CrossFractionSpec {
    pub fn new(big_x: PointId, big_y: PointId, x: PointId, y: PointId) -> Self {
        CrossFractionSpec { big_x, big_y, x, y }
    }

    pub fn from_labels(cfg: &PointConfig, labels: [&str; 4]) -> Result<Self> {
        Ok(Self::new(cfg.id(labels[0])?, cfg.id(labels[1])?, cfg.id(labels[2])?, cfg.id(labels[3])?))
    }
}

/// `Xx.Yy / (Yx.Xy)`.
pub fn cross_fraction(cfg: &Arc<PointConfig>, s: CrossFractionSpec) -> Result<BalancedFraction> {
    let den = Monomial::from_ids(&[(s.big_y, s.x), (s.big_x, s.y)]).ok_or_else(|| {
        Error::DegenerateDenominator(format!(
            "cross fraction needs x != Y and y != X ({} / {})",
            cfg.point(s.x).label,
            cfg.point(s.y).label
        ))
    })?;
    let num = match Monomial::from_ids(&[(s.big_x, s.x), (s.big_y, s.y)]) {
        Some(m) => AlgebraElement::monomial(cfg, m),
        None => AlgebraElement::zero(cfg),
    };
    Ok(BalancedFraction::new(num, den))
}

/// `prod X_i x_sigma(i) / prod X_i x_i`, with `sigma` a permutation of `0..n`.
pub fn multi_fraction(cfg: &Arc<PointConfig>, big_x: &[PointId], x: &[PointId], sigma: &[usize]) -> Result<BalancedFraction> {
    let n = big_x.len();
    if x.len() != n || sigma.len() != n {
        return Err(Error::InvalidInput("multi fraction tuples and permutation differ in length".into()));
    }
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(Error::InvalidInput("sigma is not a permutation".into()));
        }
        seen[s] = true;
    }
    let den_ids: Vec<(PointId, PointId)> = (0..n).map(|i| (big_x[i], x[i])).collect();
    let den = Monomial::from_ids(&den_ids)
        .ok_or_else(|| Error::DegenerateDenominator("multi fraction needs X_i != x_i".into()))?;
    let num_ids: Vec<(PointId, PointId)> = (0..n).map(|i| (big_x[i], x[sigma[i]])).collect();
    let num = match Monomial::from_ids(&num_ids) {
        Some(m) => AlgebraElement::monomial(cfg, m),
        None => AlgebraElement::zero(cfg),
    };
    Ok(BalancedFraction::new(num, den))
}

/// Parse a permutation of `1..=n` given in cycle notation, e.g. `(1 2)(3 4)` or `()`.
/// Returns the zero-based images.
pub fn parse_cycles(text: &str, n: usize) -> Result<Vec<usize>> {
    let mut sigma: Vec<usize> = (0..n).collect();
    let mut moved = vec![false; n];
    let mut rest = text.trim();
    while !rest.is_empty() {
        let inner_end = rest
            .strip_prefix('(')
            .and_then(|r| r.find(')'))
            .ok_or_else(|| Error::InvalidInput(format!("invalid cycle notation `{}`", text)))?;
        let inner = &rest[1..=inner_end];
        let elems: Vec<usize> = inner
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().ok().filter(|&k| k >= 1 && k <= n).map(|k| k - 1))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidInput(format!("invalid cycle entry in `{}`", text)))?;
        for (i, &a) in elems.iter().enumerate() {
            if moved[a] {
                return Err(Error::InvalidInput(format!("cycles in `{}` are not disjoint", text)));
            }
            moved[a] = true;
            sigma[a] = elems[(i + 1) % elems.len()];
        }
        rest = rest[inner_end + 2..].trim_start();
    }
    Ok(sigma)
}

/// A tuple of group words `(g1,...,gp)`, indices cyclic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementarySpec {
    pub words: Vec<Word>,
}

impl ElementarySpec {
    pub fn new(words: Vec<Word>) -> Self {
        ElementarySpec { words }
    }

    pub fn parse(words: &[&str]) -> Result<Self> {
        Ok(Self::new(words.iter().map(|w| Word::parse(w)).collect::<Result<_>>()?))
    }
}

/// `(w^+, w^-)` point ids of a word.
pub fn fixed_point_ids(cfg: &PointConfig, w: &Word) -> Result<(PointId, PointId)> {
    let p = cfg.id(&plus_label(w))?;
    let m = cfg.id(&minus_label(w))?;
    if p == m {
        return Err(Error::Hypothesis(format!("fixed points of `{}` coincide", w)));
    }
    Ok((p, m))
}

fn resolve(cfg: &PointConfig, words: &[Word]) -> Result<Vec<(PointId, PointId)>> {
    words.iter().map(|w| fixed_point_ids(cfg, w)).collect()
}

/// `T` on resolved fixed-point pairs.
fn elementary_ids(cfg: &Arc<PointConfig>, fp: &[(PointId, PointId)]) -> BalancedFraction {
    let p = fp.len();
    let den = Monomial::from_ids(fp).expect("fixed points of a word are distinct");
    let num_ids: Vec<(PointId, PointId)> = (0..p).map(|i| (fp[(i + 1) % p].0, fp[i].1)).collect();
    let num = match Monomial::from_ids(&num_ids) {
        Some(m) => AlgebraElement::monomial(cfg, m),
        None => AlgebraElement::zero(cfg),
    };
    BalancedFraction::new(num, den)
}

/// `T(g1,...,gp) = prod g_{i+1}^+ g_i^- / prod g_i^+ g_i^-`.
pub fn elementary(cfg: &Arc<PointConfig>, spec: &ElementarySpec) -> Result<BalancedFraction> {
    if spec.words.is_empty() {
        return Err(Error::InvalidInput("elementary function needs at least one word".into()));
    }
    Ok(elementary_ids(cfg, &resolve(cfg, &spec.words)?))
}

fn coprime_cyclic(fp: &[(PointId, PointId)], what: &str) -> Result<()> {
    let p = fp.len();
    for i in 0..p {
        let (a, b) = (fp[i], fp[(i + 1) % p]);
        if a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1 {
            return Err(Error::Hypothesis(format!(
                "consecutive words {} and {} of {} share a fixed point",
                i + 1,
                (i + 1) % p + 1,
                what
            )));
        }
    }
    Ok(())
}

/// `{T_G, T_H}` assembled from the closed form for `{T_G,T_H}/(T_G T_H)`:
///
/// `sum_ij a_ij T(g_i,h_j) + b_ij T(h_{j+1},h_j,g_{i+1},g_i)/(T(h_j,h_{j+1})T(g_i,g_{i+1}))
///  - c_ij T(g_i,h_{j+1},h_j)/T(h_j,h_{j+1}) - d_ij T(h_j,g_{i+1},g_i)/T(g_i,g_{i+1})`
///
/// with `a_ij = [g_i^+ g_i^-, h_j^+ h_j^-]`, `b_ij = [g_{i+1}^+ g_i^-, h_{j+1}^+ h_j^-]`,
/// `c_ij = [g_i^+ g_i^-, h_{j+1}^+ h_j^-]`, `d_ij = [g_{i+1}^+ g_i^-, h_j^+ h_j^-]`.
pub fn elementary_bracket_closed_form(cfg: &Arc<PointConfig>, g: &ElementarySpec, h: &ElementarySpec) -> Result<BalancedFraction> {
    let gf = resolve(cfg, &g.words)?;
    let hf = resolve(cfg, &h.words)?;
    if gf.is_empty() || hf.is_empty() {
        return Err(Error::InvalidInput("elementary function needs at least one word".into()));
    }
    coprime_cyclic(&gf, "the first tuple")?;
    coprime_cyclic(&hf, "the second tuple")?;
    let (p, q) = (gf.len(), hf.len());
    let t = |ids: &[(PointId, PointId)]| elementary_ids(cfg, ids);
    let link = |a: (PointId, PointId), b: (PointId, PointId)| coeff_from_small(cfg.linking(a.0, a.1, b.0, b.1));
    let mut sum = BalancedFraction::zero(cfg);
    for i in 0..p {
        let (gi, gn) = (gf[i], gf[(i + 1) % p]);
        let t_gg = t(&[gi, gn]);
        for j in 0..q {
            let (hj, hn) = (hf[j], hf[(j + 1) % q]);
            let t_hh = t(&[hj, hn]);
            let a = link(gi, hj);
            let b = link((gn.0, gi.1), (hn.0, hj.1));
            let c = link(gi, (hn.0, hj.1));
            let d = link((gn.0, gi.1), hj);
            if !a.is_zero() {
                sum = sum.checked_add(&t(&[gi, hj]).scale_by(&a))?;
            }
            if !b.is_zero() {
                let term = t(&[hn, hj, gn, gi]).checked_div(&t_hh.checked_mul(&t_gg)?)?;
                sum = sum.checked_add(&term.scale_by(&b))?;
            }
            if !c.is_zero() {
                let term = t(&[gi, hn, hj]).checked_div(&t_hh)?;
                sum = sum.checked_sub(&term.scale_by(&c))?;
            }
            if !d.is_zero() {
                let term = t(&[hj, gn, gi]).checked_div(&t_gg)?;
                sum = sum.checked_sub(&term.scale_by(&d))?;
            }
        }
    }
    sum.checked_mul(&t(&gf))?.checked_mul(&t(&hf))
}

/// Both sides of `T(a,b,c)T(c,d)/(T(a,d,c)T(c,b)) = [b^+;d^+;a^-;c^-]`.
pub fn birelem_identity(cfg: &Arc<PointConfig>, a: &Word, b: &Word, c: &Word, d: &Word) -> Result<(BalancedFraction, BalancedFraction)> {
    let [fa, fb, fc, fd] = [a, b, c, d].map(|w| fixed_point_ids(cfg, w));
    let (fa, fb, fc, fd) = (fa?, fb?, fc?, fd?);
    let t = |ids: &[(PointId, PointId)]| elementary_ids(cfg, ids);
    let divisor = t(&[fa, fd, fc]).checked_mul(&t(&[fc, fb]))?;
    if divisor.is_zero() {
        return Err(Error::DegenerateDenominator("T(a,d,c).T(c,b) vanishes".into()));
    }
    let lhs = t(&[fa, fb, fc]).checked_mul(&t(&[fc, fd]))?.checked_div(&divisor)?;
    let rhs = cross_fraction(cfg, CrossFractionSpec::new(fb.0, fd.0, fa.1, fc.1))?;
    Ok((lhs, rhs))
}

/// The length function `log p_b(y)`, kept as its underlying fraction
/// `p_b(y) = (b^+ b^-1(y) . b^- b(y)) / (b^+ b(y) . b^- b^-1(y))`.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthSeries {
    pub base: Word,
    pub anchor: String,
    pub underlying: BalancedFraction,
}

/// Build `p_b(y)`. The configuration must register `b+`, `b-`, `b(y)` and `b'(y)`
/// (labels from [`action_label`]).
pub fn length_cross_fraction(cfg: &Arc<PointConfig>, beta: &Word, y: &str) -> Result<LengthSeries> {
    let (bp, bm) = fixed_point_ids(cfg, beta)?;
    let yid = cfg.id(y)?;
    if yid == bp || yid == bm {
        return Err(Error::Hypothesis(format!("anchor `{}` is a fixed point of `{}`", y, beta)));
    }
    let fwd = cfg.id(&action_label(beta, y))?;
    let back = cfg.id(&action_label(&beta.inverse(), y))?;
    let underlying = cross_fraction(cfg, CrossFractionSpec::new(bp, bm, back, fwd))?;
    Ok(LengthSeries {
        base: beta.clone(),
        anchor: y.to_string(),
        underlying,
    })
}

impl LengthSeries {
    /// `{log p, q} = {p, q} / p`.
    pub fn bracket_with(&self, q: &BalancedFraction, alpha: &Coeff) -> Result<BalancedFraction> {
        fraction_bracket(&self.underlying, q, alpha)?.checked_div(&self.underlying)
    }

    /// `{log p, log p'} = {p, p'} / (p p')`.
    pub fn bracket(&self, other: &LengthSeries, alpha: &Coeff) -> Result<BalancedFraction> {
        let pp = self.underlying.checked_mul(&other.underlying)?;
        fraction_bracket(&self.underlying, &other.underlying, alpha)?.checked_div(&pp)
    }
}

/// `[g^+ g^-, h^+ h^-] . sum_{v,v'} v v' T(g^v, h^v')`.
pub fn wolpert_rhs(cfg: &Arc<PointConfig>, g: &Word, h: &Word) -> Result<BalancedFraction> {
    let fg = fixed_point_ids(cfg, g)?;
    let fh = fixed_point_ids(cfg, h)?;
    let ids = [fg.0, fg.1, fh.0, fh.1];
    for i in 0..4 {
        for j in i + 1..4 {
            if ids[i] == ids[j] {
                return Err(Error::Hypothesis(format!("`{}` and `{}` share a fixed point", g, h)));
            }
        }
    }
    let link = coeff_from_small(cfg.linking(fg.0, fg.1, fh.0, fh.1));
    let flip = |p: (PointId, PointId)| (p.1, p.0);
    let mut sum = BalancedFraction::zero(cfg);
    for (sg, pg) in [(1i64, fg), (-1, flip(fg))] {
        for (sh, ph) in [(1i64, fh), (-1, flip(fh))] {
            let term = elementary_ids(cfg, &[pg, ph]).scale_by(&coeff(sg * sh, 1));
            sum = sum.checked_add(&term)?;
        }
    }
    Ok(sum.scale_by(&link))
}
