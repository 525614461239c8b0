//! Numeric evaluation of balanced fractions on matrix representations.
//!
//! Every symbolic point `w^+` / `w^-` resolves to a line `xi` and a
//! hyperplane `xi*` (given by a covector) of `R^n`:
//!
//! * `w^+`: line of the max-modulus eigenvector `R_1`, hyperplane
//!   `span(R_1..R_{n-1})`, i.e. the kernel of the left eigenvector `L_n`;
//! * `w^-`: line `R_n`, hyperplane `span(R_2..R_n) = ker L_1`.
//!
//! A pair `Xx` evaluates to `<xi*(x), xi(X)>`. With this choice
//! `T(g,h)` evaluates to `tr(p_1(g) p_1(h))` and, for `n = 2`, a pair
//! is the determinant `det(v_X, v_x)` up to per-point scales.

mod hyperbolic;

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::fractions::BalancedFraction;
use crate::linking::{PointConfig, PointId};
use crate::words::{FixedPoint, FixedSign, Word};

pub use hyperbolic::{hyperbolic_angle, trace_bracket_oracle, wolpert_check, AxisAngle, WolpertCheck};

/// Adjacent modulus ratios above this are not loxodromic.
pub const LOXODROMY_TOLERANCE: f64 = 1e-6;

/// Eigen-data of a purely loxodromic matrix, normalised to determinant 1.
#[derive(Debug, Clone)]
pub struct GroupElementData {
    pub label: String,
    pub matrix: DMatrix<f64>,
    /// Sorted by strictly decreasing modulus.
    pub eigenvalues: Vec<f64>,
    /// Unit right eigenvectors, aligned with `eigenvalues`.
    pub right: Vec<DVector<f64>>,
    /// Unit left eigenvectors (rows of `R^-1`, rescaled), aligned with `eigenvalues`.
    pub left: Vec<DVector<f64>>,
}

impl GroupElementData {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `log |lambda_1 / lambda_n|`.
    pub fn width(&self) -> f64 {
        (self.eigenvalues[0] / self.eigenvalues[self.dim() - 1]).abs().ln()
    }

    /// `max_{k>j} |lambda_k / lambda_j|`.
    pub fn girth(&self) -> f64 {
        self.eigenvalues
            .windows(2)
            .map(|w| (w[1] / w[0]).abs())
            .fold(0.0, f64::max)
    }

    /// The projector `R_i L_i^T / <L_i, R_i>`.
    pub fn projector(&self, i: usize) -> DMatrix<f64> {
        let r = &self.right[i];
        let l = &self.left[i];
        r * l.transpose() / l.dot(r)
    }
}

fn normalise_det(label: &str, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::InvalidInput(format!("`{}` is not a square matrix", label)));
    }
    let n = m.nrows();
    let det = m.determinant();
    if !det.is_finite() || det.abs() < 1e-300 {
        return Err(Error::InvalidInput(format!("`{}` is singular", label)));
    }
    if det < 0.0 {
        return Err(Error::InvalidInput(format!("`{}` has negative determinant", label)));
    }
    Ok(m * det.powf(-1.0 / n as f64))
}

fn null_vector(a: &DMatrix<f64>) -> DVector<f64> {
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, s)| if *s < acc.1 { (i, *s) } else { acc });
    v_t.row(k).transpose().normalize()
}

/// Sorted eigen-decomposition of a loxodromic matrix.
pub fn eigen_split(label: &str, matrix: &DMatrix<f64>) -> Result<GroupElementData> {
    let m = normalise_det(label, matrix)?;
    let n = m.nrows();
    let ev = m.complex_eigenvalues();
    let mut lambdas = Vec::with_capacity(n);
    for z in ev.iter() {
        if z.im.abs() > 1e-9 * z.re.abs().max(1.0) {
            return Err(Error::NotLoxodromic(format!("`{}` has complex eigenvalues", label)));
        }
        lambdas.push(z.re);
    }
    lambdas.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    for w in lambdas.windows(2) {
        if (w[1] / w[0]).abs() > 1.0 - LOXODROMY_TOLERANCE {
            return Err(Error::NotLoxodromic(format!("`{}` has eigenvalues of equal modulus", label)));
        }
    }
    let id = DMatrix::<f64>::identity(n, n);
    let right: Vec<DVector<f64>> = lambdas.iter().map(|l| null_vector(&(&m - &id * *l))).collect();
    let rmat = DMatrix::from_columns(&right);
    let rinv = rmat
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NotLoxodromic(format!("`{}` has a defective eigenbasis", label)))?;
    let left: Vec<DVector<f64>> = (0..n).map(|i| rinv.row(i).transpose().normalize()).collect();
    // Rayleigh quotients are more accurate than the Schur diagonal.
    let eigenvalues = (0..n)
        .map(|i| left[i].dot(&(&m * &right[i])) / left[i].dot(&right[i]))
        .collect();
    Ok(GroupElementData {
        label: label.to_string(),
        matrix: m,
        eigenvalues,
        right,
        left,
    })
}

/// The irreducible representation `SL2 -> SL3` on quadratic forms.
pub fn symmetric_square(g: &DMatrix<f64>) -> DMatrix<f64> {
    let (a, b, c, d) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    DMatrix::from_row_slice(
        3,
        3,
        &[a * a, 2.0 * a * b, b * b, a * c, a * d + b * c, b * d, c * c, 2.0 * c * d, d * d],
    )
}

/// Line and hyperplane of a resolved boundary point.
#[derive(Debug, Clone)]
pub struct PointData {
    pub vector: DVector<f64>,
    pub covector: DVector<f64>,
}

/// A representation given by generator matrices; words are evaluated on demand.
#[derive(Debug, Clone)]
pub struct Representation {
    n: usize,
    generators: BTreeMap<String, DMatrix<f64>>,
}

impl Representation {
    pub fn new(n: usize) -> Self {
        Representation {
            n,
            generators: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Register a generator; its determinant is normalised to 1.
    pub fn insert(&mut self, label: &str, matrix: DMatrix<f64>) -> Result<()> {
        if matrix.nrows() != self.n || matrix.ncols() != self.n {
            return Err(Error::InvalidInput(format!("`{}` is not {}x{}", label, self.n, self.n)));
        }
        let w = Word::parse(label)?;
        if w.letters().len() != 1 || w.letters()[0].inverse {
            return Err(Error::InvalidInput(format!("generator label `{}` must be a plain name", label)));
        }
        let m = normalise_det(label, &matrix)?;
        self.generators.insert(label.to_string(), m);
        Ok(())
    }

    pub fn with(mut self, label: &str, matrix: DMatrix<f64>) -> Result<Self> {
        self.insert(label, matrix)?;
        Ok(self)
    }

    pub fn generators(&self) -> impl Iterator<Item = (&str, &DMatrix<f64>)> {
        self.generators.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Parse `element <label> <n*n reals>` blocks; the dimension is inferred.
    /// Entries may wrap across lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens: Vec<(usize, String)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            tokens.extend(line.split_whitespace().map(|t| (i + 1, t.to_string())));
        }
        let mut blocks: Vec<(usize, String, Vec<f64>)> = Vec::new();
        let mut it = tokens.into_iter().peekable();
        while let Some((line, tok)) = it.next() {
            if tok != "element" {
                return Err(Error::Syntax {
                    line,
                    column: 1,
                    message: format!("expected `element`, found `{}`", tok),
                });
            }
            let (_, label) = it.next().ok_or_else(|| Error::Syntax {
                line,
                column: 1,
                message: "missing element label".into(),
            })?;
            let mut vals = Vec::new();
            while let Some((_, t)) = it.peek() {
                if t == "element" {
                    break;
                }
                let (l, t) = it.next().expect("peeked");
                vals.push(t.parse::<f64>().map_err(|_| Error::Syntax {
                    line: l,
                    column: 1,
                    message: format!("invalid number `{}`", t),
                })?);
            }
            blocks.push((line, label, vals));
        }
        let first = blocks
            .first()
            .ok_or_else(|| Error::InvalidInput("representation file has no elements".into()))?;
        let n = (first.2.len() as f64).sqrt().round() as usize;
        let mut rep = Representation::new(n);
        for (line, label, vals) in blocks {
            if vals.len() != n * n || n == 0 {
                return Err(Error::Syntax {
                    line,
                    column: 1,
                    message: format!("element `{}` needs {} entries, found {}", label, n * n, vals.len()),
                });
            }
            rep.insert(&label, DMatrix::from_row_slice(n, n, &vals))?;
        }
        Ok(rep)
    }

    /// Matrix of a word (product of generators, `'` meaning inverse).
    pub fn word_matrix(&self, w: &Word) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::<f64>::identity(self.n, self.n);
        for l in w.letters() {
            let g = self
                .generators
                .get(&l.name)
                .ok_or_else(|| Error::UnknownLabel(l.name.clone()))?;
            let g = if l.inverse {
                g.clone()
                    .try_inverse()
                    .ok_or_else(|| Error::InvalidInput(format!("`{}` is singular", l.name)))?
            } else {
                g.clone()
            };
            m *= g;
        }
        Ok(m)
    }

    pub fn element(&self, w: &Word) -> Result<GroupElementData> {
        eigen_split(&w.to_string(), &self.word_matrix(w)?)
    }

    /// Resolve `w^+` / `w^-` to its line and hyperplane.
    ///
    /// A conjugate `w = u c u^-1` is resolved as `u(c^+-)`, which is better
    /// conditioned than splitting the matrix of `w` itself.
    pub fn point(&self, p: &FixedPoint) -> Result<PointData> {
        let letters = p.word.letters();
        let m = letters.len();
        let mut k = 0;
        while 2 * k + 2 < m && letters[k].name == letters[m - 1 - k].name && letters[k].inverse != letters[m - 1 - k].inverse {
            k += 1;
        }
        if k > 0 {
            let core = FixedPoint::new(Word::from_letters(letters[k..m - k].to_vec()), p.sign);
            let inner = self.point(&core)?;
            let u = self.word_matrix(&Word::from_letters(letters[..k].to_vec()))?;
            let covector = u
                .transpose()
                .lu()
                .solve(&inner.covector)
                .ok_or_else(|| Error::InvalidInput("singular conjugating word".into()))?;
            return Ok(PointData {
                vector: (&u * inner.vector).normalize(),
                covector: covector.normalize(),
            });
        }
        let e = self.element(&p.word)?;
        let n = self.n;
        Ok(match p.sign {
            FixedSign::Plus => PointData {
                vector: e.right[0].clone(),
                covector: e.left[n - 1].clone(),
            },
            FixedSign::Minus => PointData {
                vector: e.right[n - 1].clone(),
                covector: e.left[0].clone(),
            },
        })
    }

    pub fn point_label(&self, label: &str) -> Result<PointData> {
        self.point(&FixedPoint::parse(label)?)
    }

    /// `g(p) = (g w g^-1)^sign`.
    pub fn act(&self, g: &Word, p: &FixedPoint) -> Result<FixedPoint> {
        let q = p.act(g);
        self.element(&q.word)?;
        Ok(q)
    }

    /// The pair `Xx`: `<xi*(x), xi(X)>`.
    pub fn eval_pair(&self, big_x: &FixedPoint, x: &FixedPoint) -> Result<f64> {
        let a = self.point(big_x)?;
        let b = self.point(x)?;
        Ok(pair_value(&a, &b))
    }

    /// The transposed pairing `<xi*(X), xi(x)>`, kept for comparison only.
    pub fn eval_pair_transposed(&self, big_x: &FixedPoint, x: &FixedPoint) -> Result<f64> {
        let a = self.point(big_x)?;
        let b = self.point(x)?;
        Ok(a.covector.dot(&b.vector))
    }

    /// Cross ratio `[X;Y;x;y] = Xx.Yy / (Yx.Xy)` evaluated directly.
    pub fn cross_ratio(&self, big_x: &FixedPoint, big_y: &FixedPoint, x: &FixedPoint, y: &FixedPoint) -> Result<f64> {
        let [a, b, c, d] = [big_x, big_y, x, y].map(|p| self.point(p));
        let (a, b, c, d) = (a?, b?, c?, d?);
        let den = pair_value(&b, &c) * pair_value(&a, &d);
        if den == 0.0 {
            return Err(Error::DegenerateEvaluation("cross ratio denominator vanishes".into()));
        }
        Ok(pair_value(&a, &c) * pair_value(&b, &d) / den)
    }

    /// Evaluate a balanced fraction whose point labels are symbolic points.
    pub fn eval_fraction(&self, f: &BalancedFraction) -> Result<f64> {
        if !f.is_balanced() {
            return Err(Error::ScaleDependent);
        }
        let cfg = f.config();
        let mut used: Vec<PointId> = Vec::new();
        for m in f.numerator().terms().keys().chain(std::iter::once(f.denominator())) {
            for p in m.pairs() {
                used.push(p.left);
                used.push(p.right);
            }
        }
        used.sort_unstable();
        used.dedup();
        let mut data: HashMap<PointId, PointData> = HashMap::new();
        for id in used {
            data.insert(id, self.point_label(&cfg.point(id).label)?);
        }
        f.evaluate(|p| pair_value(&data[&p.left], &data[&p.right]))
    }

    /// A point configuration for symbolic point labels.
    ///
    /// For `n = 2` positions come from the boundary circle `RP^1`, oriented
    /// so that the affine coordinate `z` increases; for other `n` labels get
    /// positions in the given (declared) cyclic order. Labels denoting the
    /// same point share a position.
    pub fn point_config(&self, labels: &[&str]) -> Result<PointConfig> {
        let mut canon: Vec<FixedPoint> = Vec::new();
        for l in labels {
            let p = FixedPoint::parse(l)?;
            if !canon.contains(&p) {
                canon.push(p);
            }
        }
        let k = canon.len().max(1) as i64;
        let mut pos: HashMap<FixedPoint, Rational64> = HashMap::new();
        for (i, p) in canon.iter().enumerate() {
            let r = if self.n == 2 {
                boundary_position(&self.point(p)?.vector)
            } else {
                Rational64::new(i as i64, k)
            };
            pos.insert(p.clone(), r);
        }
        let entries = labels
            .iter()
            .map(|l| Ok((l.to_string(), pos[&FixedPoint::parse(l)?])))
            .collect::<Result<Vec<_>>>()?;
        PointConfig::new(entries)
    }

    /// `|log| [g^-; g^+; y; g(y)] ||`, which equals the width for Hitchin representations.
    pub fn period(&self, g: &Word, y: &FixedPoint) -> Result<f64> {
        let gp = FixedPoint::plus(g);
        let gm = FixedPoint::minus(g);
        if *y == gp || *y == gm {
            return Err(Error::Hypothesis(format!("anchor `{}` is a fixed point of `{}`", y, g)));
        }
        let gy = self.act(g, y)?;
        Ok(self.cross_ratio(&gm, &gp, y, &gy)?.abs().ln().abs())
    }

    /// Value of the length fraction `p_g(y) = [g^+; g^-; g^-1(y); g(y)]`; equals `exp(+-2 width)`.
    pub fn length_value(&self, g: &Word, y: &FixedPoint) -> Result<f64> {
        let gy = self.act(g, y)?;
        let gy_back = self.act(&g.inverse(), y)?;
        self.cross_ratio(&FixedPoint::plus(g), &FixedPoint::minus(g), &gy_back, &gy)
    }

    pub fn width(&self, g: &Word) -> Result<f64> {
        Ok(self.element(g)?.width())
    }

    /// Largest adjacent eigenvalue-modulus ratio over the given words.
    pub fn girth(&self, words: &[Word]) -> Result<f64> {
        if words.is_empty() {
            return Err(Error::InvalidInput("girth needs at least one word".into()));
        }
        let mut g: f64 = 0.0;
        for w in words {
            g = g.max(self.element(w)?.girth());
        }
        Ok(g)
    }

    /// `tr(g^p h^p) / (tr(g^p) tr(h^p))`, with powers renormalised at each step.
    pub fn wilson_ratio(&self, g: &Word, h: &Word, p: u32) -> Result<f64> {
        if p == 0 {
            return Err(Error::InvalidInput("exponent must be positive".into()));
        }
        let a = normalised_power(&self.word_matrix(g)?, p);
        let b = normalised_power(&self.word_matrix(h)?, p);
        Ok((&a * &b).trace() / (a.trace() * b.trace()))
    }

    /// `det_{i,j>0} [X_i; X_0; x_j; x_0]`.
    pub fn chi_rank(&self, big_x: &[FixedPoint], x: &[FixedPoint]) -> Result<f64> {
        if big_x.len() != x.len() || big_x.len() < 2 {
            return Err(Error::InvalidInput("chi needs two tuples of equal length p+1 >= 2".into()));
        }
        let p = big_x.len() - 1;
        for i in 1..=p {
            if big_x[i] == x[0] || x[i] == big_x[0] {
                return Err(Error::Hypothesis("X_i = x_0 or x_i = X_0".into()));
            }
            for j in i + 1..=p {
                if big_x[i] == big_x[j] || x[i] == x[j] {
                    return Err(Error::Hypothesis("repeated point in a chi tuple".into()));
                }
            }
        }
        let mut m = DMatrix::<f64>::zeros(p, p);
        for i in 1..=p {
            for j in 1..=p {
                m[(i - 1, j - 1)] = self.cross_ratio(&big_x[i], &big_x[0], &x[j], &x[0])?;
            }
        }
        Ok(m.determinant())
    }
}

fn pair_value(big_x: &PointData, x: &PointData) -> f64 {
    x.covector.dot(&big_x.vector)
}

fn normalised_power(m: &DMatrix<f64>, p: u32) -> DMatrix<f64> {
    // Square-and-multiply keeps rounding error at O(log p) products.
    let mut acc = DMatrix::<f64>::identity(m.nrows(), m.ncols());
    let mut base = m / m.norm();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
            acc /= acc.norm();
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
            base /= base.norm();
        }
    }
    acc
}

/// Position in `[0,1)` of the line spanned by `(a, b)` in `RP^1`, increasing with `z = a/b`.
pub fn boundary_position(v: &DVector<f64>) -> Rational64 {
    let t = (-v[1].atan2(v[0]) / std::f64::consts::PI).rem_euclid(1.0);
    const DEN: i64 = 1 << 40;
    let k = ((t * DEN as f64).round() as i64).rem_euclid(DEN);
    Rational64::new(k, DEN)
}

/// Hyperbolic `SL2` matrix with given attracting / repelling fixed points and eigenvalue `lambda > 1`.
pub fn hyperbolic_from_fixed_points(attracting: f64, repelling: f64, lambda: f64) -> DMatrix<f64> {
    let p = DMatrix::from_row_slice(2, 2, &[attracting, repelling, 1.0, 1.0]);
    let d = DMatrix::from_row_slice(2, 2, &[lambda, 0.0, 0.0, 1.0 / lambda]);
    let pinv = p.clone().try_inverse().expect("distinct fixed points");
    p * d * pinv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[a, b, c, d])
    }

    #[test]
    fn eigen_split_diagonal() {
        let e = eigen_split("g", &m2(2.0, 0.0, 0.0, 0.5)).unwrap();
        assert!((e.eigenvalues[0] - 2.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 0.5).abs() < 1e-14);
        assert!((e.right[0][0].abs() - 1.0).abs() < 1e-14);
        assert!((e.right[1][1].abs() - 1.0).abs() < 1e-14);
        assert!((e.width() - 4f64.ln()).abs() < 1e-14);
        assert!((e.girth() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn rotation_is_not_loxodromic() {
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        assert!(matches!(eigen_split("r", &m2(c, -s, s, c)), Err(Error::NotLoxodromic(_))));
        assert!(matches!(eigen_split("u", &m2(1.0, 1.0, 0.0, 1.0)), Err(Error::NotLoxodromic(_))));
        assert!(eigen_split("n", &m2(0.0, 1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn projectors_resolve_identity() {
        let e = eigen_split("g", &m2(2.0, 1.0, 3.0, 2.0)).unwrap();
        let s = e.projector(0) + e.projector(1);
        assert!((s - DMatrix::<f64>::identity(2, 2)).norm() < 1e-12);
        assert!(e.left[0].dot(&e.right[1]).abs() < 1e-12);
    }

    #[test]
    fn determinant_pairing_example() {
        // X = infinity, x = 0 for g = diag(2, 1/2): pair is det((1,0),(0,1)) up to scale.
        let rep = Representation::new(2).with("g", m2(2.0, 0.0, 0.0, 0.5)).unwrap();
        let gp = FixedPoint::parse("g+").unwrap();
        let gm = FixedPoint::parse("g-").unwrap();
        assert!((rep.eval_pair(&gp, &gm).unwrap().abs() - 1.0).abs() < 1e-14);
        assert!(rep.eval_pair(&gp, &gp).unwrap().abs() < 1e-14);
    }

    #[test]
    fn symmetric_square_is_homomorphism() {
        let a = m2(2.0, 1.0, 3.0, 2.0);
        let b = m2(1.5, 0.2, 0.5, 0.733_333_333_333_333_3);
        let lhs = symmetric_square(&(&a * &b));
        let rhs = symmetric_square(&a) * symmetric_square(&b);
        assert!((lhs - rhs).norm() < 1e-12);
        assert!((symmetric_square(&a).determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parse_representation() {
        let rep = Representation::parse("# two elements\nelement a 2 0 0 0.5\nelement b\n 2 1\n 3 2\n").unwrap();
        assert_eq!(rep.dim(), 2);
        let w = Word::parse("a b a'").unwrap();
        let m = rep.word_matrix(&w).unwrap();
        assert!((m.determinant() - 1.0).abs() < 1e-12);
        assert!(Representation::parse("element a 1 2 3").is_err());
        assert!(Representation::parse("elem a 1 0 0 1").is_err());
        assert!(Representation::parse("element a -1 0 0 1").is_err());
    }
}
