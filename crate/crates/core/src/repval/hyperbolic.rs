//! Upper half-plane geometry for hyperbolic `SL2` elements, used as an
//! independent check of the bracket of length functions.

use std::sync::Arc;

use nalgebra::DMatrix;

use super::Representation;
use crate::error::{Error, Result};
use crate::fractions::wolpert_rhs;
use crate::words::Word;

/// Angle data at the crossing of two oriented axes.
#[derive(Debug, Clone, Copy)]
pub struct AxisAngle {
    /// Cosine of the angle between the oriented tangents at the crossing.
    pub cos_theta: f64,
    /// Sign of `det(tangent_g, tangent_h)`.
    pub iota: f64,
    /// Crossing point in the upper half-plane (after the normalising rotation).
    pub point: (f64, f64),
}

fn det_one(m: &DMatrix<f64>) -> Result<[f64; 4]> {
    if m.nrows() != 2 || m.ncols() != 2 {
        return Err(Error::InvalidInput("expected a 2x2 matrix".into()));
    }
    let det = m.determinant();
    if det <= 0.0 {
        return Err(Error::InvalidInput("expected positive determinant".into()));
    }
    let s = det.sqrt();
    let mut e = [m[(0, 0)] / s, m[(0, 1)] / s, m[(1, 0)] / s, m[(1, 1)] / s];
    if e[0] + e[3] < 0.0 {
        e = e.map(|v| -v);
    }
    if e[0] + e[3] <= 2.0 + 1e-12 {
        return Err(Error::NotLoxodromic("2x2 matrix is not hyperbolic".into()));
    }
    Ok(e)
}

fn rotate(m: [f64; 4], phi: f64) -> [f64; 4] {
    let (c, s) = (phi.cos(), phi.sin());
    let r = [c, -s, s, c];
    let ri = [c, s, -s, c];
    let mul = |x: [f64; 4], y: [f64; 4]| {
        [
            x[0] * y[0] + x[1] * y[2],
            x[0] * y[1] + x[1] * y[3],
            x[2] * y[0] + x[3] * y[2],
            x[2] * y[1] + x[3] * y[3],
        ]
    };
    mul(mul(r, m), ri)
}

/// Attracting and repelling fixed points of `z -> (az+b)/(cz+d)`, both finite.
fn fixed_points(m: [f64; 4]) -> (f64, f64) {
    let [a, b, c, d] = m;
    let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
    let z1 = (a - d + disc) / (2.0 * c);
    let z2 = (a - d - disc) / (2.0 * c);
    // |f'(z)| = 1 / (cz+d)^2.
    if (c * z1 + d).abs() > (c * z2 + d).abs() {
        (z1, z2)
    } else {
        (z2, z1)
    }
}

/// Angle between the oriented axes of two hyperbolic elements, from the
/// semicircle picture of geodesics in the upper half-plane.
pub fn hyperbolic_angle(g: &DMatrix<f64>, h: &DMatrix<f64>) -> Result<AxisAngle> {
    let (g, h) = (det_one(g)?, det_one(h)?);
    // Rotating about i is an isometry; pick one that keeps all fixed points finite.
    let phi = (0..64)
        .map(|k| 0.1 + 0.37 * k as f64)
        .find(|&phi| {
            let (rg, rh) = (rotate(g, phi), rotate(h, phi));
            rg[2].abs() > 1e-3 && rh[2].abs() > 1e-3
        })
        .ok_or_else(|| Error::DegenerateEvaluation("no normalising rotation found".into()))?;
    let (gp, gm) = fixed_points(rotate(g, phi));
    let (hp, hm) = fixed_points(rotate(h, phi));
    let (c1, r1) = ((gp + gm) / 2.0, (gp - gm).abs() / 2.0);
    let (c2, r2) = ((hp + hm) / 2.0, (hp - hm).abs() / 2.0);
    if (c2 - c1).abs() < 1e-14 {
        return Err(Error::Hypothesis("axes are concentric and do not cross".into()));
    }
    let x = (r1 * r1 - r2 * r2 + c2 * c2 - c1 * c1) / (2.0 * (c2 - c1));
    let y2 = r1 * r1 - (x - c1) * (x - c1);
    if y2 <= 0.0 {
        return Err(Error::Hypothesis("axes do not cross".into()));
    }
    let y = y2.sqrt();
    let tangent = |c: f64, plus: f64, minus: f64| {
        let t = (-y, x - c);
        if t.0 * (plus - minus) < 0.0 {
            (-t.0, -t.1)
        } else {
            t
        }
    };
    let t1 = tangent(c1, gp, gm);
    let t2 = tangent(c2, hp, hm);
    let n1 = (t1.0 * t1.0 + t1.1 * t1.1).sqrt();
    let n2 = (t2.0 * t2.0 + t2.1 * t2.1).sqrt();
    let cross = t1.0 * t2.1 - t1.1 * t2.0;
    Ok(AxisAngle {
        cos_theta: (t1.0 * t2.0 + t1.1 * t2.1) / (n1 * n2),
        iota: cross.signum(),
        point: (x, y),
    })
}

/// `(tr(gh) - tr(g)tr(h)/2) / (sinh(l_g/2) sinh(l_h/2))`, the bracket of the
/// two length functions obtained from the trace form of the bracket.
pub fn trace_bracket_oracle(g: &DMatrix<f64>, h: &DMatrix<f64>) -> Result<f64> {
    let (a, b) = (det_one(g)?, det_one(h)?);
    let tr_a = a[0] + a[3];
    let tr_b = b[0] + b[3];
    let tr_ab = a[0] * b[0] + a[1] * b[2] + a[2] * b[1] + a[3] * b[3];
    let sh = |t: f64| ((t / 2.0) * (t / 2.0) - 1.0).sqrt();
    Ok((tr_ab - 0.5 * tr_a * tr_b) / (sh(tr_a) * sh(tr_b)))
}

/// Both sides of the length-bracket formula for two crossing hyperbolic elements.
#[derive(Debug, Clone, Copy)]
pub struct WolpertCheck {
    /// `iota * 2 cos(theta)` from the half-plane geometry.
    pub lhs: f64,
    /// Value of `[g^+g^-, h^+h^-] sum v v' T(g^v, h^v')`.
    pub rhs: f64,
    pub cos_theta: f64,
    pub iota: f64,
    /// The trace-form oracle (independent of both sides).
    pub trace_value: f64,
    /// The linking number `[g^+g^-, h^+h^-]`.
    pub linking: f64,
}

impl WolpertCheck {
    pub fn deviation(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Compare the evaluated fraction against the geometric angle.
///
/// Both sides carry the factor 2 of the trace normalisation of the bracket:
/// for `g = diag(l, 1/l)` and `h` with axis through `i` the alternating sum
/// of the four `T` values is `2 cos(theta)`.
pub fn wolpert_check(g: &DMatrix<f64>, h: &DMatrix<f64>) -> Result<WolpertCheck> {
    let rep = Representation::new(2).with("g", g.clone())?.with("h", h.clone())?;
    let cfg = Arc::new(rep.point_config(&["g+", "g-", "h+", "h-"])?);
    let ids = ["g+", "g-", "h+", "h-"].map(|l| cfg.id(l));
    let (a, b, c, d) = (ids[0].clone()?, ids[1].clone()?, ids[2].clone()?, ids[3].clone()?);
    let link = cfg.linking(a, b, c, d);
    if link == num_rational::Rational64::from_integer(0) {
        return Err(Error::Hypothesis("axes do not cross (fixed-point pairs unlinked)".into()));
    }
    let frac = wolpert_rhs(&cfg, &Word::letter("g"), &Word::letter("h"))?;
    let rhs = rep.eval_fraction(&frac)?;
    let angle = hyperbolic_angle(g, h)?;
    Ok(WolpertCheck {
        lhs: angle.iota * 2.0 * angle.cos_theta,
        rhs,
        cos_theta: angle.cos_theta,
        iota: angle.iota,
        trace_value: trace_bracket_oracle(g, h)?,
        linking: *link.numer() as f64 / *link.denom() as f64,
    })
}
