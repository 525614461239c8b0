//! Periodic opers `psi^(n) + q_2 psi^(n-2) + ... + q_n psi = 0` on the circle,
//! integrated as first-order companion systems.
//!
//! The frame `Phi(t)` has rows indexed by derivative order and columns by
//! a solution basis with `Phi(0) = I`. The Frenet curve is read off its
//! rows: `xi(t)` is row 0 and the osculating hyperplane `xi*(t)` is spanned
//! by rows `0..n-1`, represented by its annihilator `Phi(t)^-1 e_{n-1}`.
//! The coordinate function is `F_{Y,y} = e_0^T Phi(Y) Phi(y)^-1 e_{n-1}`,
//! i.e. the solution with jet `(0,..,0,1)` at `y`, evaluated at `Y`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::fractions::{cross_fraction, fraction_bracket, CrossFractionSpec};
use crate::linking::{linking_positions, PointConfig};
use crate::swapalg::Coeff;

/// Holonomy distance to `+-I` below which an oper counts as trivial.
pub const TRIVIAL_HOLONOMY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub k: u32,
    pub cos: f64,
    pub sin: f64,
}

/// `sum cos_k cos(2 pi k t) + sin_k sin(2 pi k t)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrigPoly(pub Vec<Harmonic>);

impl TrigPoly {
    pub fn constant(c: f64) -> Self {
        TrigPoly(vec![Harmonic { k: 0, cos: c, sin: 0.0 }])
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0
            .iter()
            .map(|h| {
                let w = 2.0 * PI * h.k as f64 * t;
                h.cos * w.cos() + h.sin * w.sin()
            })
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        TrigPoly(self.0.iter().map(|h| Harmonic { k: h.k, cos: h.cos * s, sin: h.sin * s }).collect())
    }

    pub fn derivative(&self) -> Self {
        TrigPoly(
            self.0
                .iter()
                .map(|h| {
                    let w = 2.0 * PI * h.k as f64;
                    Harmonic { k: h.k, cos: w * h.sin, sin: -w * h.cos }
                })
                .collect(),
        )
    }

    /// Fourier projection of a 1-periodic function onto harmonics `0..=max_k`,
    /// from `samples` equispaced values.
    pub fn project<F: Fn(f64) -> f64>(f: F, max_k: u32, samples: usize) -> Self {
        let vals: Vec<f64> = (0..samples).map(|j| f(j as f64 / samples as f64)).collect();
        let mut out = Vec::new();
        for k in 0..=max_k {
            let (mut c, mut s) = (0.0, 0.0);
            for (j, v) in vals.iter().enumerate() {
                let w = 2.0 * PI * k as f64 * j as f64 / samples as f64;
                c += v * w.cos();
                s += v * w.sin();
            }
            let norm = if k == 0 { 1.0 } else { 2.0 } / samples as f64;
            out.push(Harmonic { k, cos: c * norm, sin: s * norm });
        }
        TrigPoly(out)
    }
}

/// Coefficients `q_2..q_n` of an order-`n` periodic operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperSpec {
    n: usize,
    q: Vec<TrigPoly>,
}

impl OperSpec {
    /// `q[0]` is `q_2`, ..., `q[n-2]` is `q_n`.
    pub fn new(n: usize, q: Vec<TrigPoly>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("oper order must be at least 2".into()));
        }
        if q.len() != n - 1 {
            return Err(Error::InvalidInput(format!("order {} needs {} coefficients", n, n - 1)));
        }
        Ok(OperSpec { n, q })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// `q_i(t)` for `2 <= i <= n`.
    pub fn q(&self, i: usize, t: f64) -> f64 {
        self.q[i - 2].eval(t)
    }

    pub fn coefficients(&self) -> &[TrigPoly] {
        &self.q
    }

    /// `n = 2` with constant `q_2`.
    pub fn hill_constant(q2: f64) -> Self {
        OperSpec { n: 2, q: vec![TrigPoly::constant(q2)] }
    }

    /// The oper whose solutions are `cos^(n-1-j)(pi t) sin^j(pi t)`: the
    /// symmetric power of `psi'' + pi^2 psi`. Its curve is the Veronese curve
    /// and its holonomy is `(-1)^(n-1) I`.
    pub fn veronese(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("oper order must be at least 2".into()));
        }
        // poly[i] = coefficient of D^i.
        let mut poly = vec![0.0; n + 1];
        poly[n % 2] = 1.0;
        let mut deg = n % 2;
        let mut f = n as i64 - 1;
        while f > 0 {
            let c = (f as f64 * PI).powi(2);
            let mut next = vec![0.0; n + 1];
            for i in 0..=deg {
                next[i + 2] += poly[i];
                next[i] += c * poly[i];
            }
            poly = next;
            deg += 2;
            f -= 2;
        }
        let q = (2..=n).map(|i| TrigPoly::constant(poly[n - i])).collect();
        OperSpec::new(n, q)
    }

    /// Pull back `psi'' + pi^2 psi` by the circle diffeomorphism
    /// `phi(t) = t + sum a_k sin(2 pi k t) / (2 pi k)`:
    /// `q = pi^2 phi'^2 + S(phi) / 2`, projected to `max_k` harmonics.
    pub fn hill_pullback(amps: &[(u32, f64)], max_k: u32) -> Result<Self> {
        if amps.iter().any(|(k, _)| *k == 0) || amps.iter().map(|(_, a)| a.abs()).sum::<f64>() >= 1.0 {
            return Err(Error::InvalidInput("diffeomorphism amplitudes must satisfy sum |a_k| < 1, k >= 1".into()));
        }
        let amps = amps.to_vec();
        let q = move |t: f64| {
            let (mut d1, mut d2, mut d3) = (1.0, 0.0, 0.0);
            for &(k, a) in &amps {
                let w = 2.0 * PI * k as f64;
                d1 += a * (w * t).cos();
                d2 -= a * w * (w * t).sin();
                d3 -= a * w * w * (w * t).cos();
            }
            let schwarzian = d3 / d1 - 1.5 * (d2 / d1).powi(2);
            PI * PI * d1 * d1 + 0.5 * schwarzian
        };
        OperSpec::new(2, vec![TrigPoly::project(q, max_k, 8 * max_k as usize + 8)])
    }

    /// The diffeomorphism used by [`OperSpec::hill_pullback`].
    pub fn pullback_phi(amps: &[(u32, f64)], t: f64) -> f64 {
        t + amps
            .iter()
            .map(|&(k, a)| {
                let w = 2.0 * PI * k as f64;
                a * (w * t).sin() / w
            })
            .sum::<f64>()
    }

    /// Order-3 oper whose solutions are products of solutions of
    /// `psi'' + q psi = 0`: `q_2 = 4q`, `q_3 = 2q'`.
    pub fn symmetric_square(&self) -> Result<Self> {
        if self.n != 2 {
            return Err(Error::InvalidInput("symmetric square needs an order-2 oper".into()));
        }
        let q = &self.q[0];
        OperSpec::new(3, vec![q.scale(4.0), q.derivative().scale(2.0)])
    }

    /// Parse `n = <int>` then lines `q<i>: k=<int> cos=<real> sin=<real>`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut q: Vec<TrigPoly> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| Error::Syntax { line: i + 1, column: 1, message: m };
            if let Some(rest) = line.strip_prefix('n') {
                let v = rest.trim().strip_prefix('=').ok_or_else(|| err("expected `n = <int>`".into()))?;
                let v: usize = v.trim().parse().map_err(|_| err(format!("invalid order `{}`", v.trim())))?;
                if v < 2 {
                    return Err(err("oper order must be at least 2".into()));
                }
                n = Some(v);
                q = vec![TrigPoly::default(); v - 1];
                continue;
            }
            let order = n.ok_or_else(|| err("`n = <int>` must come first".into()))?;
            let (head, body) = line.split_once(':').ok_or_else(|| err("expected `q<i>: ...`".into()))?;
            let idx: usize = head
                .trim()
                .strip_prefix('q')
                .and_then(|s| s.parse().ok())
                .filter(|&j| (2..=order).contains(&j))
                .ok_or_else(|| err(format!("invalid coefficient name `{}`", head.trim())))?;
            let mut h = Harmonic { k: 0, cos: 0.0, sin: 0.0 };
            for tok in body.split_whitespace() {
                let (key, val) = tok.split_once('=').ok_or_else(|| err(format!("expected key=value, found `{}`", tok)))?;
                match key {
                    "k" => h.k = val.parse().map_err(|_| err(format!("invalid harmonic `{}`", val)))?,
                    "cos" => h.cos = val.parse().map_err(|_| err(format!("invalid amplitude `{}`", val)))?,
                    "sin" => h.sin = val.parse().map_err(|_| err(format!("invalid amplitude `{}`", val)))?,
                    _ => return Err(err(format!("unknown key `{}`", key))),
                }
            }
            q[idx - 2].0.push(h);
        }
        let n = n.ok_or_else(|| Error::InvalidInput("oper file lacks `n = <int>`".into()))?;
        OperSpec::new(n, q)
    }
}

impl fmt::Display for OperSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}", self.n)?;
        for (i, p) in self.q.iter().enumerate() {
            for h in &p.0 {
                writeln!(f, "q{}: k={} cos={} sin={}", i + 2, h.k, h.cos, h.sin)?;
            }
        }
        Ok(())
    }
}

fn companion(oper: &OperSpec, t: f64) -> DMatrix<f64> {
    let n = oper.n;
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n - 1 {
        a[(i, i + 1)] = 1.0;
    }
    for i in 2..=n {
        a[(n - 1, n - i)] = -oper.q(i, t);
    }
    a
}

fn rk4_step(oper: &OperSpec, t: f64, h: f64, y: &DMatrix<f64>) -> DMatrix<f64> {
    let a0 = companion(oper, t);
    let am = companion(oper, t + h / 2.0);
    let a1 = companion(oper, t + h);
    let k1 = &a0 * y;
    let k2 = &am * (y + &k1 * (h / 2.0));
    let k3 = &am * (y + &k2 * (h / 2.0));
    let k4 = &a1 * (y + &k3 * h);
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Holonomy classification up to sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HolonomyClass {
    TrivialInPsl,
    Unipotent,
    Loxodromic,
    EllipticLike,
}

impl fmt::Display for HolonomyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HolonomyClass::TrivialInPsl => "trivial-in-PSL",
            HolonomyClass::Unipotent => "unipotent",
            HolonomyClass::Loxodromic => "loxodromic",
            HolonomyClass::EllipticLike => "elliptic-like",
        })
    }
}

/// Frames on the uniform grid of `[0,1]`.
#[derive(Debug, Clone)]
pub struct FundamentalSolution {
    oper: OperSpec,
    steps: usize,
    frames: Vec<DMatrix<f64>>,
    holonomy: DMatrix<f64>,
    holonomy_inv: DMatrix<f64>,
}

/// Classical RK4 on `M` uniform steps.
pub fn integrate(oper: &OperSpec, steps: usize) -> Result<FundamentalSolution> {
    if steps < 64 {
        return Err(Error::InvalidInput("at least 64 steps are required".into()));
    }
    let n = oper.n;
    let h = 1.0 / steps as f64;
    let mut frames = Vec::with_capacity(steps + 1);
    let mut y = DMatrix::<f64>::identity(n, n);
    frames.push(y.clone());
    for i in 0..steps {
        y = rk4_step(oper, i as f64 * h, h, &y);
        frames.push(y.clone());
    }
    let holonomy = y;
    let holonomy_inv = holonomy
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateEvaluation("singular holonomy".into()))?;
    Ok(FundamentalSolution {
        oper: oper.clone(),
        steps,
        frames,
        holonomy,
        holonomy_inv,
    })
}

/// One point of the Frenet curve: `xi` (row 0 of the frame) and the
/// annihilator of the osculating hyperplane, both unit-normalised.
#[derive(Debug, Clone)]
pub struct FrenetSample {
    pub t: f64,
    pub xi: DVector<f64>,
    pub xi_star: DVector<f64>,
}

/// A weighted tuple `((t_1, n_1), ..., (t_k, n_k))`.
pub type WeightedTuple = Vec<(f64, usize)>;

#[derive(Debug, Clone)]
pub struct FrenetReport {
    /// Wedge norm divided by the product of row norms, per tuple.
    pub normalised: Vec<f64>,
    /// Raw wedge norm `sqrt(det(S S^T))`, per tuple.
    pub raw: Vec<f64>,
    pub min_normalised: f64,
}

impl FundamentalSolution {
    pub fn oper(&self) -> &OperSpec {
        &self.oper
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn frames(&self) -> &[DMatrix<f64>] {
        &self.frames
    }

    /// Frame at 1 times the inverse frame at 0 (the latter is `I`).
    pub fn holonomy(&self) -> &DMatrix<f64> {
        &self.holonomy
    }

    /// Largest deviation of `det Phi` from 1 along the grid.
    pub fn determinant_drift(&self) -> f64 {
        self.frames.iter().map(|f| (f.determinant() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `min ||H -+ I||` (Frobenius) after normalising the determinant.
    pub fn holonomy_defect(&self) -> f64 {
        let n = self.oper.n;
        let det = self.holonomy.determinant();
        let h = &self.holonomy / det.abs().powf(1.0 / n as f64);
        let id = DMatrix::<f64>::identity(n, n);
        let plus = (&h - &id).norm();
        let minus = if n % 2 == 0 { (&h + &id).norm() } else { f64::INFINITY };
        plus.min(minus)
    }

    pub fn holonomy_class(&self) -> HolonomyClass {
        let n = self.oper.n;
        if self.holonomy_defect() < TRIVIAL_HOLONOMY_TOLERANCE {
            return HolonomyClass::TrivialInPsl;
        }
        let det = self.holonomy.determinant();
        let h = &self.holonomy / det.abs().powf(1.0 / n as f64);
        for sign in [1.0, -1.0] {
            if is_unipotent(&(&h * sign)) {
                return HolonomyClass::Unipotent;
            }
        }
        let ev = h.complex_eigenvalues();
        let real = ev.iter().all(|z| z.im.abs() <= 1e-9 * z.re.abs().max(1.0));
        if real {
            let mut m: Vec<f64> = ev.iter().map(|z| z.re.abs()).collect();
            m.sort_by(|a, b| b.total_cmp(a));
            if m.windows(2).all(|w| w[1] / w[0] < 1.0 - 1e-6) {
                return HolonomyClass::Loxodromic;
            }
        }
        HolonomyClass::EllipticLike
    }

    pub fn is_trivial(&self) -> bool {
        self.holonomy_class() == HolonomyClass::TrivialInPsl
    }

    fn frame_in_period(&self, s: f64) -> DMatrix<f64> {
        let m = self.steps;
        let i = ((s * m as f64).floor() as usize).min(m - 1);
        let t0 = i as f64 / m as f64;
        let h = s - t0;
        if h == 0.0 {
            self.frames[i].clone()
        } else {
            rk4_step(&self.oper, t0, h, &self.frames[i])
        }
    }

    /// `Phi(t)` for any real `t`, using `Phi(t + 1) = Phi(t) H`.
    pub fn frame_at(&self, t: f64) -> DMatrix<f64> {
        let k = t.floor();
        let mut f = self.frame_in_period(t - k);
        let step = if k >= 0.0 { &self.holonomy } else { &self.holonomy_inv };
        for _ in 0..(k.abs() as i64) {
            f = &f * step;
        }
        f
    }

    pub fn frenet_sample(&self, t: f64) -> Result<FrenetSample> {
        let f = self.frame_at(t);
        let n = self.oper.n;
        let xi = f.row(0).transpose().normalize();
        let lu = f.lu();
        let mut e = DVector::<f64>::zeros(n);
        e[n - 1] = 1.0;
        let xs = lu
            .solve(&e)
            .ok_or_else(|| Error::DegenerateEvaluation("singular frame".into()))?;
        Ok(FrenetSample { t, xi, xi_star: xs.normalize() })
    }

    fn require_trivial(&self) -> Result<()> {
        if self.is_trivial() {
            Ok(())
        } else {
            Err(Error::Multivalued)
        }
    }

    /// `<xi(x)|xi*(y)> <xi(z)|xi*(t)> / (<xi(z)|xi*(y)> <xi(x)|xi*(t)>)` from Frenet samples.
    pub fn weak_cross_ratio(&self, x: f64, y: f64, z: f64, t: f64) -> Result<f64> {
        self.require_trivial()?;
        self.weak_cross_ratio_raw(x, y, z, t)
    }

    fn weak_cross_ratio_raw(&self, x: f64, y: f64, z: f64, t: f64) -> Result<f64> {
        if z == y || x == t {
            return Err(Error::DegenerateEvaluation("weak cross ratio needs z != y and x != t".into()));
        }
        let [sx, sy, sz, st] = [x, y, z, t].map(|p| self.frenet_sample(p));
        let (sx, sy, sz, st) = (sx?, sy?, sz?, st?);
        let den = sz.xi.dot(&sy.xi_star) * sx.xi.dot(&st.xi_star);
        if den.abs() < 1e-300 {
            return Err(Error::DegenerateEvaluation("vanishing pairing".into()));
        }
        Ok(sx.xi.dot(&sy.xi_star) * sz.xi.dot(&st.xi_star) / den)
    }

    /// `<sigma*_Y(t), sigma_y(t)>`: the dual section with value `e_0^T` at `Y` and the
    /// section with value `e_{n-1}` at `y`, both transported to `t`.
    pub fn coordinate_function_at(&self, big_y: f64, y: f64, t: f64) -> Result<f64> {
        let n = self.oper.n;
        let fy = self.frame_at(y);
        let ft = self.frame_at(t);
        let f_big = self.frame_at(big_y);
        let mut e = DVector::<f64>::zeros(n);
        e[n - 1] = 1.0;
        let c = fy.lu().solve(&e).ok_or_else(|| Error::DegenerateEvaluation("singular frame".into()))?;
        let sigma = &ft * c;
        let row0 = f_big.row(0).transpose();
        let dual = ft
            .transpose()
            .lu()
            .solve(&row0)
            .ok_or_else(|| Error::DegenerateEvaluation("singular frame".into()))?;
        Ok(dual.dot(&sigma))
    }

    /// `F_{Y,y}`, transported to `t = y`.
    pub fn coordinate_function(&self, big_y: f64, y: f64) -> Result<f64> {
        self.coordinate_function_at(big_y, y, y)
    }

    /// `F_{X,y} F_{Y,x} / (F_{X,x} F_{Y,y})`; equals `weak_cross_ratio(X, y, Y, x)`.
    pub fn oper_cross_fraction(&self, big_x: f64, x: f64, big_y: f64, y: f64) -> Result<f64> {
        self.require_trivial()?;
        distinct(&[big_x, x])?;
        distinct(&[big_y, y])?;
        let f = |a, b| self.coordinate_function(a, b);
        let den = f(big_x, x)? * f(big_y, y)?;
        if den.abs() < 1e-300 {
            return Err(Error::DegenerateEvaluation("vanishing coordinate function".into()));
        }
        Ok(f(big_x, y)? * f(big_y, x)? / den)
    }

    /// `{F_{X,x}, F_{Y,y}} = [Xx,Yy] (F_{X,y} F_{Y,x} - F_{X,x} F_{Y,y} / n^2)`,
    /// with the linking number of the parameters on the circle.
    pub fn ds_pair_bracket(&self, p: (f64, f64), q: (f64, f64)) -> Result<f64> {
        distinct(&[p.0, p.1, q.0, q.1])?;
        self.pair_bracket_raw(p, q)
    }

    /// [`Self::ds_pair_bracket`] without the distinctness check; shared endpoints
    /// are handled by the linking form.
    fn pair_bracket_raw(&self, p: (f64, f64), q: (f64, f64)) -> Result<f64> {
        let link = linking_of(p.0, p.1, q.0, q.1);
        if link == 0.0 {
            return Ok(0.0);
        }
        let f = |a, b| self.coordinate_function(a, b);
        let n2 = (self.oper.n * self.oper.n) as f64;
        Ok(link * (f(p.0, q.1)? * f(q.0, p.1)? - f(p.0, p.1)? * f(q.0, q.1)? / n2))
    }

    /// The bracket of two cross fractions `[X;Y;x;y]` (parameters in `[0,1)`),
    /// computed twice: by the log-derivative rule over [`Self::ds_pair_bracket`],
    /// and by evaluating the symbolic swapping bracket at `Zz -> F_{Z,z}`.
    /// Each quadruple must be pairwise distinct; the two may share points.
    pub fn ds_crossfraction_bracket(&self, q0: [f64; 4], q1: [f64; 4], alpha: &Coeff) -> Result<(f64, f64)> {
        distinct(&q0)?;
        distinct(&q1)?;
        let all: Vec<f64> = q0.iter().chain(q1.iter()).copied().collect();
        let factors = |q: [f64; 4]| [((q[0], q[2]), 1.0), ((q[1], q[3]), 1.0), ((q[1], q[2]), -1.0), ((q[0], q[3]), -1.0)];
        let value = |q: [f64; 4]| -> Result<f64> {
            let mut v = 1.0;
            for ((a, b), e) in factors(q) {
                let fv = self.coordinate_function(a, b)?;
                v *= if e > 0.0 { fv } else { 1.0 / fv };
            }
            Ok(v)
        };
        let mut log_sum = 0.0;
        for (u, eu) in factors(q0) {
            for (v, ev) in factors(q1) {
                let fu = self.coordinate_function(u.0, u.1)?;
                let fv = self.coordinate_function(v.0, v.1)?;
                log_sum += eu * ev * self.pair_bracket_raw(u, v)? / (fu * fv);
            }
        }
        let ds_value = value(q0)? * value(q1)? * log_sum;

        let labels = ["X0", "Y0", "x0", "y0", "X1", "Y1", "x1", "y1"];
        let cfg = Arc::new(PointConfig::new(labels.iter().zip(all.iter()).map(|(l, p)| (l.to_string(), to_rational(*p))))?);
        let c0 = cross_fraction(&cfg, CrossFractionSpec::from_labels(&cfg, ["X0", "Y0", "x0", "y0"])?)?;
        let c1 = cross_fraction(&cfg, CrossFractionSpec::from_labels(&cfg, ["X1", "Y1", "x1", "y1"])?)?;
        let br = fraction_bracket(&c0, &c1, alpha)?;
        let param: Vec<f64> = (0..cfg.len())
            .map(|id| {
                let label = &cfg.point(id).label;
                let k = labels.iter().position(|l| l == label).expect("registered label");
                all[k]
            })
            .collect();
        let mut err = None;
        let swap_value = br.evaluate(|p| match self.coordinate_function(param[p.left], param[p.right]) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                f64::NAN
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        Ok((ds_value, swap_value))
    }

    /// Normalised wedges of jet blocks for weighted tuples with total weight at most `n`.
    pub fn frenet_validate(&self, tuples: &[WeightedTuple]) -> Result<FrenetReport> {
        self.require_trivial()?;
        let n = self.oper.n;
        let mut normalised = Vec::with_capacity(tuples.len());
        let mut raw = Vec::with_capacity(tuples.len());
        for tuple in tuples {
            let total: usize = tuple.iter().map(|(_, w)| *w).sum();
            if tuple.is_empty() || total > n || tuple.iter().any(|(_, w)| *w == 0) {
                return Err(Error::InvalidInput("weights must be positive with total at most n".into()));
            }
            for i in 0..tuple.len() {
                for j in i + 1..tuple.len() {
                    if (tuple[i].0 - tuple[j].0).rem_euclid(1.0) == 0.0 {
                        return Err(Error::InvalidInput("weighted tuple has repeated support points".into()));
                    }
                }
            }
            let mut rows: Vec<DVector<f64>> = Vec::with_capacity(total);
            for (t, w) in tuple {
                let f = self.frame_at(*t);
                for r in 0..*w {
                    rows.push(f.row(r).transpose());
                }
            }
            let s = DMatrix::from_columns(&rows).transpose();
            let gram = &s * s.transpose();
            let vol = gram.determinant().max(0.0).sqrt();
            let norms: f64 = rows.iter().map(|r| r.norm()).product();
            raw.push(vol);
            normalised.push(vol / norms);
        }
        let min_normalised = normalised.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(FrenetReport { normalised, raw, min_normalised })
    }
}

fn is_unipotent(h: &DMatrix<f64>) -> bool {
    // Faddeev-LeVerrier characteristic polynomial against (x - 1)^n.
    let n = h.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut c = vec![1.0];
    for k in 1..=n {
        m = h * &m + &id * c[k - 1];
        let ck = -(h * &m).trace() / k as f64;
        c.push(ck);
    }
    let mut binom = 1.0;
    for (k, ck) in c.iter().enumerate() {
        let expect = if k % 2 == 0 { binom } else { -binom };
        if (ck - expect).abs() > 1e-6 * binom.max(1.0) {
            return false;
        }
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    true
}

fn distinct(ps: &[f64]) -> Result<()> {
    for i in 0..ps.len() {
        for j in i + 1..ps.len() {
            if (ps[i] - ps[j]).rem_euclid(1.0) == 0.0 {
                return Err(Error::Hypothesis("points must be pairwise distinct on the circle".into()));
            }
        }
    }
    Ok(())
}

/// Exact position in `[0,1)` for a real parameter (denominator `2^40`).
pub fn to_rational(t: f64) -> Rational64 {
    const DEN: i64 = 1 << 40;
    let k = ((t.rem_euclid(1.0) * DEN as f64).round() as i64).rem_euclid(DEN);
    Rational64::new(k, DEN)
}

fn linking_of(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let l = linking_positions(to_rational(a), to_rational(b), to_rational(c), to_rational(d));
    *l.numer() as f64 / *l.denom() as f64
}

/// Observed order of `f(M)`, from values at `M`, `2M`, `4M`.
pub fn observed_order(v1: f64, v2: f64, v4: f64) -> f64 {
    ((v1 - v2).abs() / (v2 - v4).abs()).log2()
}

/// Observed RK4 order of the weak cross ratio at `(x,y,z,t)` from `M`, `2M`, `4M` steps.
/// Coarse grids need not meet the holonomy tolerance, so it is not checked here.
pub fn convergence_order(oper: &OperSpec, params: [f64; 4], steps: usize) -> Result<f64> {
    let [x, y, z, t] = params;
    let mut v = [0.0; 3];
    for (i, m) in [steps, 2 * steps, 4 * steps].into_iter().enumerate() {
        v[i] = integrate(oper, m)?.weak_cross_ratio_raw(x, y, z, t)?;
    }
    Ok(observed_order(v[0], v[1], v[2]))
}
