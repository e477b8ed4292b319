//! Hyperboloid model of a form of signature (n,1) at configurable precision.

mod geodesic;
mod plan;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rug::float::Constant;
use rug::ops::NegAssign;
use rug::{Float, Integer, Rational};
use serde::Serialize;
use thiserror::Error;

pub use geodesic::{
    build_broken_geodesic, check_certificate, BrokenGeodesic, Certificate, Endpoint,
    GeodesicBuilder, Joint, Segment, SegmentKind,
};
pub use plan::{plan_horoballs, power_stable_letters, HoroballPlan, PairDistance, PoweredGroup};

use crate::grouppres::GroupError;
use crate::lattice::{form_value, ExactMatrix, LatticeError};
use crate::qforms::DiagonalForm;

pub const DEFAULT_PRECISION: u32 = 256;
/// Certificate inequalities must clear this margin.
pub const MARGIN_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("vector is not timelike")]
    Spacelike,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("ray does not meet the horosphere")]
    NoIntersection,
    #[error("segments do not share the joint point: {0}")]
    NotJoined(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub fn rational_to_rug(r: &BigRational) -> Rational {
    let n: Integer = r.numer().to_string().parse().expect("decimal integer");
    let d: Integer = r.denom().to_string().parse().expect("decimal integer");
    Rational::from((n, d))
}

pub fn bigint_to_rug(n: &BigInt) -> Integer {
    n.to_string().parse().expect("decimal integer")
}

/// Form coefficients at a fixed working precision.
#[derive(Debug, Clone)]
pub struct Model {
    prec: u32,
    form: DiagonalForm,
    a: Vec<Float>,
    neg: usize,
}

impl Model {
    pub fn new(q: &DiagonalForm, prec: u32) -> Result<Model, GeomError> {
        if prec < 53 {
            return Err(GeomError::Precondition(format!(
                "precision {prec} is below 53 bits"
            )));
        }
        let neg = q
            .negative_index()
            .filter(|_| q.rank() >= 2)
            .ok_or_else(|| GeomError::Precondition("form must have signature (n,1)".into()))?;
        let a = q
            .coeffs()
            .iter()
            .map(|c| Float::with_val(prec, bigint_to_rug(c)))
            .collect();
        Ok(Model {
            prec,
            form: q.clone(),
            a,
            neg,
        })
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn form(&self) -> &DiagonalForm {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn negative_index(&self) -> usize {
        self.neg
    }

    pub fn coeffs(&self) -> &[Float] {
        &self.a
    }

    pub fn float<T>(&self, x: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.prec, x)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.prec, Constant::Pi)
    }

    /// Tolerance on cosh(d) - 1 for treating two points as equal.
    pub fn eps_join(&self) -> Float {
        Float::with_val(self.prec, 1) >> (self.prec / 4)
    }

    /// <x,y> = sum a_i x_i y_i.
    pub fn inner(&self, x: &[Float], y: &[Float]) -> Float {
        let mut s = Float::new(self.prec);
        let mut t = Float::new(self.prec);
        for ((a, xi), yi) in self.a.iter().zip(x).zip(y) {
            t.assign_mul(a, xi, yi);
            s += &t;
        }
        s
    }

    pub fn from_rational(&self, r: &BigRational) -> Float {
        Float::with_val(self.prec, rational_to_rug(r))
    }

    pub fn vector(&self, v: &[BigRational]) -> Vec<Float> {
        v.iter().map(|r| self.from_rational(r)).collect()
    }

    /// Exact isotropic vector oriented so its negative coordinate is positive.
    pub fn future(&self, u: &[BigRational]) -> Result<Vec<Float>, GeomError> {
        check_isotropic(&self.form, u)?;
        let mut v = self.vector(u);
        if u[self.neg].is_negative() {
            for x in v.iter_mut() {
                x.neg_assign();
            }
        }
        Ok(v)
    }

    pub fn apply(&self, g: &ExactMatrix, x: &[Float]) -> Vec<Float> {
        let n = g.dim();
        (0..n)
            .map(|i| {
                let mut s = Float::new(self.prec);
                for j in 0..n {
                    let gij = g.get(i, j);
                    if !gij.is_zero() {
                        s += Float::with_val(self.prec, &x[j] * &rational_to_rug(gij));
                    }
                }
                s
            })
            .collect()
    }

    /// Normalized basis vector of the negative coordinate.
    pub fn basepoint(&self) -> HPoint {
        let mut c = vec![Float::new(self.prec); self.dim()];
        c[self.neg] = Float::with_val(self.prec, -&self.a[self.neg])
            .sqrt()
            .recip();
        HPoint { coords: c }
    }
}

trait AssignMul {
    fn assign_mul(&mut self, a: &Float, b: &Float, c: &Float);
}

impl AssignMul for Float {
    fn assign_mul(&mut self, a: &Float, b: &Float, c: &Float) {
        use rug::Assign;
        self.assign(a * b);
        *self *= c;
    }
}

fn check_isotropic(q: &DiagonalForm, u: &[BigRational]) -> Result<(), GeomError> {
    if u.len() != q.rank() {
        return Err(GeomError::Precondition(format!(
            "vector of length {} for a form of rank {}",
            u.len(),
            q.rank()
        )));
    }
    if u.iter().all(Zero::is_zero) || !form_value(q, u).is_zero() {
        return Err(GeomError::Degenerate(
            "center is not a nonzero isotropic vector".into(),
        ));
    }
    Ok(())
}

/// Point on the upper sheet, <x,x> = -1.
#[derive(Debug, Clone, PartialEq)]
pub struct HPoint {
    coords: Vec<Float>,
}

impl HPoint {
    pub fn coords(&self) -> &[Float] {
        &self.coords
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|x| x.to_f64()).collect()
    }

    /// Trusted constructor for vectors already on the sheet.
    pub(crate) fn raw(coords: Vec<Float>) -> HPoint {
        HPoint { coords }
    }
}

pub fn normalize_point(m: &Model, x: &[Float]) -> Result<HPoint, GeomError> {
    if x.len() != m.dim() {
        return Err(GeomError::Precondition("dimension mismatch".into()));
    }
    let qx = m.inner(x, x);
    if qx >= 0 {
        return Err(GeomError::Spacelike);
    }
    let mut scale = Float::with_val(m.prec, -qx).sqrt().recip();
    if x[m.neg] < 0 {
        scale = -scale;
    }
    Ok(HPoint {
        coords: x
            .iter()
            .map(|c| Float::with_val(m.prec, c * &scale))
            .collect(),
    })
}

pub fn distance(m: &Model, x: &HPoint, y: &HPoint) -> Float {
    let c = -m.inner(&x.coords, &y.coords);
    if c <= 1 {
        Float::new(m.prec)
    } else {
        c.acosh()
    }
}

/// {x : |<x,u>| <= s}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Horoball {
    #[serde(with = "crate::io::rational_vec_str")]
    pub center: Vec<BigRational>,
    #[serde(with = "crate::io::rational_str")]
    pub level: BigRational,
}

impl Horoball {
    pub fn new(
        q: &DiagonalForm,
        center: Vec<BigRational>,
        level: BigRational,
    ) -> Result<Horoball, GeomError> {
        check_isotropic(q, &center)?;
        if !level.is_positive() {
            return Err(GeomError::Precondition("level must be positive".into()));
        }
        Ok(Horoball { center, level })
    }

    pub fn image(&self, g: &ExactMatrix) -> Result<Horoball, GeomError> {
        Ok(Horoball {
            center: g.apply(&self.center)?,
            level: self.level.clone(),
        })
    }
}

pub fn proportional(a: &[BigRational], b: &[BigRational]) -> bool {
    let n = a.len();
    (0..n).all(|i| (i + 1..n).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
        && (0..n).all(|i| (a[i].is_zero()) == (b[i].is_zero()))
}

/// Distance between the bounding horospheres, negative when they overlap.
pub fn horoball_distance(m: &Model, a: &Horoball, b: &Horoball) -> Result<Float, GeomError> {
    if proportional(&a.center, &b.center) {
        return Err(GeomError::Precondition("horoballs share a center".into()));
    }
    let ua = m.future(&a.center)?;
    let ub = m.future(&b.center)?;
    let ip = -m.inner(&ua, &ub);
    let den = m.from_rational(&(&a.level * &b.level * BigRational::from_integer(2.into())));
    Ok((ip / den).ln())
}

/// Unit-speed geodesic ray t -> x cosh t + w sinh t toward an ideal point.
#[derive(Debug, Clone)]
pub struct Ray {
    pub origin: HPoint,
    pub direction: Vec<Float>,
    /// Future-oriented isotropic vector at t = +inf.
    pub ideal: Vec<Float>,
    target: Option<Vec<BigRational>>,
}

impl Ray {
    pub fn point_at(&self, m: &Model, t: &Float) -> HPoint {
        let (sh, ch) = t.clone().sinh_cosh(Float::new(m.prec));
        HPoint {
            coords: self
                .origin
                .coords
                .iter()
                .zip(&self.direction)
                .map(|(x, w)| Float::with_val(m.prec, x * &ch) + Float::with_val(m.prec, w * &sh))
                .collect(),
        }
    }

    /// Isotropic vector at t = -inf.
    pub fn backward_ideal(&self, m: &Model) -> Vec<Float> {
        self.origin
            .coords
            .iter()
            .zip(&self.direction)
            .map(|(x, w)| Float::with_val(m.prec, x - w))
            .collect()
    }
}

pub fn ray_to_ideal(m: &Model, x: &HPoint, u: &[BigRational]) -> Result<Ray, GeomError> {
    let y = m.future(u)?;
    let c = -m.inner(&x.coords, &y);
    let direction = y
        .iter()
        .zip(&x.coords)
        .map(|(yi, xi)| Float::with_val(m.prec, yi / &c) - xi)
        .collect();
    Ok(Ray {
        origin: x.clone(),
        direction,
        ideal: y,
        target: Some(u.to_vec()),
    })
}

/// Point where the ray through x toward the future isotropic y meets the
/// horosphere |<p,y>| = s: (s/c) x + (1/(2s) - s/(2c^2)) y with c = -<x,y>.
pub(crate) fn truncate_toward(m: &Model, x: &[Float], y: &[Float], s: &Float) -> HPoint {
    let c = -m.inner(x, y);
    truncate_with_c(m, x, y, s, &c)
}

pub(crate) fn truncate_with_c(m: &Model, x: &[Float], y: &[Float], s: &Float, c: &Float) -> HPoint {
    let a = Float::with_val(m.prec, s / c);
    let two_s = Float::with_val(m.prec, s * 2u32);
    let b = two_s.clone().recip() - Float::with_val(m.prec, &a / c) / 2u32;
    HPoint {
        coords: x
            .iter()
            .zip(y)
            .map(|(xi, yi)| Float::with_val(m.prec, xi * &a) + Float::with_val(m.prec, yi * &b))
            .collect(),
    }
}

/// First point (t >= 0, up to rounding) where the ray meets the horosphere.
pub fn truncate_at_horosphere(m: &Model, ray: &Ray, h: &Horoball) -> Result<HPoint, GeomError> {
    let u = m.future(&h.center)?;
    let s = m.from_rational(&h.level);
    if let Some(t) = &ray.target {
        if proportional(t, &h.center) {
            let p = truncate_toward(m, &ray.origin.coords, &u, &s);
            let c = -m.inner(&ray.origin.coords, &u);
            if c < s {
                return Err(GeomError::NoIntersection);
            }
            return Ok(p);
        }
    }
    let alpha = m.inner(&ray.origin.coords, &u);
    let beta = m.inner(&ray.direction, &u);
    let a = Float::with_val(m.prec, &alpha + &beta) / 2u32;
    let b = Float::with_val(m.prec, &alpha - &beta) / 2u32;
    // a y^2 + s y + b = 0 with y = e^t
    let tol = Float::with_val(m.prec, 1) >> (m.prec / 2);
    let roots: Vec<Float> = if Float::with_val(m.prec, a.abs_ref()) <= tol {
        vec![-Float::with_val(m.prec, &b / &s)]
    } else {
        let disc = Float::with_val(m.prec, &s * &s) - Float::with_val(m.prec, &a * &b) * 4u32;
        if disc < 0 {
            return Err(GeomError::NoIntersection);
        }
        let r = disc.sqrt();
        let den = Float::with_val(m.prec, &a * 2u32);
        let mut v = vec![
            -Float::with_val(m.prec, &s + &r) / &den,
            Float::with_val(m.prec, &r - &s) / &den,
        ];
        v.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        v
    };
    let floor = Float::with_val(m.prec, 1) - &tol;
    for y in roots {
        if y >= floor {
            let t = if y < 1 { Float::new(m.prec) } else { y.ln() };
            return Ok(ray.point_at(m, &t));
        }
    }
    Err(GeomError::NoIntersection)
}

/// Unit tangent at p toward q (a point or an isotropic vector).
pub(crate) fn tangent(m: &Model, p: &[Float], q: &[Float]) -> Vec<Float> {
    let ip = m.inner(p, q);
    p.iter()
        .zip(q)
        .map(|(pi, qi)| Float::with_val(m.prec, pi * &ip) + qi)
        .collect()
}

pub(crate) fn cos_between(m: &Model, v: &[Float], w: &[Float]) -> Float {
    let vv = m.inner(v, v);
    let ww = m.inner(w, w);
    let c = m.inner(v, w) / (vv * ww).sqrt();
    c.clamp(&-1i32, &1i32)
}

pub fn segment_between(m: &Model, x: &HPoint, y: &HPoint) -> Segment {
    Segment {
        start: Endpoint::Point(x.clone()),
        end: Endpoint::Point(y.clone()),
        length: Some(distance(m, x, y)),
        kind: SegmentKind::Chord,
        carrier: String::new(),
    }
}

pub(crate) fn close(m: &Model, a: &HPoint, b: &HPoint) -> bool {
    let c = -m.inner(&a.coords, &b.coords) - 1u32;
    c <= m.eps_join()
}

/// Angle at p between two segments that both end (or start) at p.
pub fn angle_at(m: &Model, p: &HPoint, s1: &Segment, s2: &Segment) -> Result<Float, GeomError> {
    let f1 = s1
        .far_end(m, p)
        .ok_or_else(|| GeomError::NotJoined("first segment".into()))?;
    let f2 = s2
        .far_end(m, p)
        .ok_or_else(|| GeomError::NotJoined("second segment".into()))?;
    let v = tangent(m, &p.coords, f1);
    let w = tangent(m, &p.coords, f2);
    Ok(cos_between(m, &v, &w).acos())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PowerChoice {
    pub power: u64,
    pub displacement: f64,
    /// Displacement of power - 1 (absent when power = 1).
    pub previous_displacement: Option<f64>,
}

/// Least j with distance(x, p^j x) >= D for a fixture point x on the
/// horosphere of `h` inside the plane spanned by `plane`; doubling, then
/// bisection.
pub fn choose_power(
    m: &Model,
    p: &ExactMatrix,
    h: &Horoball,
    plane: &[usize],
    d: f64,
) -> Result<PowerChoice, GeomError> {
    if p.dim() != m.dim() {
        return Err(GeomError::Precondition("dimension mismatch".into()));
    }
    if p.apply(&h.center)? != h.center {
        return Err(GeomError::Precondition(
            "parabolic does not fix the horoball center".into(),
        ));
    }
    if !plane.contains(&m.neg) {
        return Err(GeomError::Precondition(
            "plane must contain the negative coordinate".into(),
        ));
    }
    if (0..m.dim()).any(|i| !plane.contains(&i) && !h.center[i].is_zero()) {
        return Err(GeomError::Precondition(
            "horoball center lies outside the plane".into(),
        ));
    }
    let u = m.future(&h.center)?;
    let s = m.from_rational(&h.level);
    let x = truncate_toward(m, &m.basepoint().coords, &u, &s);
    let disp = |j: u64| -> Result<Float, GeomError> {
        let pj = p.pow(j as i64)?;
        let y = HPoint::raw(m.apply(&pj, &x.coords));
        Ok(distance(m, &x, &y))
    };
    let d1 = disp(1)?;
    let tiny = Float::with_val(m.prec, 1) >> (m.prec / 4);
    if d1 <= tiny {
        return Err(GeomError::Degenerate(
            "parabolic fixes the fixture point".into(),
        ));
    }
    if d1 >= d {
        return Ok(PowerChoice {
            power: 1,
            displacement: d1.to_f64(),
            previous_displacement: None,
        });
    }
    let mut lo = 1u64;
    let mut hi = 2u64;
    loop {
        if disp(hi)? >= d {
            break;
        }
        lo = hi;
        hi = hi
            .checked_mul(2)
            .filter(|&h| h < 1 << 40)
            .ok_or_else(|| GeomError::Degenerate("displacement does not reach D".into()))?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if disp(mid)? >= d {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(PowerChoice {
        power: hi,
        displacement: disp(hi)?.to_f64(),
        previous_displacement: Some(disp(hi - 1)?.to_f64()),
    })
}
