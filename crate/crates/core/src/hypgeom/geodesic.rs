use num_rational::BigRational;
use num_traits::Zero;
use rug::Float;
use serde::Serialize;

use super::{
    angle_at, close, cos_between, proportional, tangent, truncate_toward, GeomError, HPoint,
    HoroballPlan, Model, MARGIN_EPS,
};
use crate::grouppres::{britton_reduce, Group, Word};
use crate::lattice::ExactMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum Endpoint {
    Point(HPoint),
    /// Future-oriented isotropic vector.
    Ideal(Vec<Float>),
}

impl Endpoint {
    fn coords(&self) -> &[Float] {
        match self {
            Endpoint::Point(p) => p.coords(),
            Endpoint::Ideal(v) => v,
        }
    }

    fn point(&self) -> Option<&HPoint> {
        match self {
            Endpoint::Point(p) => Some(p),
            Endpoint::Ideal(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    Ray,
    Chord,
    Connector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: Endpoint,
    pub end: Endpoint,
    /// None for rays (infinite length).
    pub length: Option<Float>,
    pub kind: SegmentKind,
    pub carrier: String,
}

impl Segment {
    /// The endpoint opposite to p, if p is one of the finite endpoints.
    pub fn far_end(&self, m: &Model, p: &HPoint) -> Option<&[Float]> {
        if self.start.point().is_some_and(|s| close(m, s, p)) {
            Some(self.end.coords())
        } else if self.end.point().is_some_and(|e| close(m, e, p)) {
            Some(self.start.coords())
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    /// Joint between segments `index` and `index + 1`.
    pub index: usize,
    pub point: HPoint,
}

#[derive(Debug, Clone)]
pub struct BrokenGeodesic {
    pub word: String,
    pub ell: usize,
    pub segments: Vec<Segment>,
    /// Exact horoball centers y_1, ..., y_{l-1}.
    pub centers: Vec<Vec<BigRational>>,
    /// Every consecutive pair of centers lies in the copy of H_G carrying
    /// the connector between them (exact check).
    pub carriers_exact: bool,
    /// Index of the third to last segment and the center it points at.
    pub designated: Option<(usize, Vec<Float>)>,
    pub basepoint: HPoint,
    pub endpoint: HPoint,
    /// Finite stand-in for each ray, at the rendering radius.
    pub render: Vec<Option<Vec<f64>>>,
}

impl BrokenGeodesic {
    pub fn joints(&self) -> Vec<Joint> {
        (0..self.segments.len().saturating_sub(1))
            .filter_map(|i| {
                self.segments[i].end.point().map(|p| Joint {
                    index: i,
                    point: p.clone(),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Certificate {
    #[serde(rename = "D")]
    pub d: f64,
    pub segment_count: usize,
    pub expected_count: usize,
    pub lengths: Vec<Option<f64>>,
    pub angles: Vec<f64>,
    pub min_length_margin: Option<f64>,
    pub min_angle_margin: Option<f64>,
    pub orthogonality_defect: Option<f64>,
    pub carriers_exact: bool,
    pub pass: bool,
    pub failures: Vec<String>,
}

/// Checks segment count, lengths >= D, angles > pi/2 and the right angle
/// at the designated joint.
pub fn check_certificate(m: &Model, bg: &BrokenGeodesic, d: f64, ell: usize) -> Certificate {
    let mut failures = Vec::new();
    let expected = (2 * ell).saturating_sub(1);
    if bg.segments.len() != expected {
        failures.push(format!("segment count {} != {expected}", bg.segments.len()));
    }
    let mut lengths = Vec::new();
    let mut min_len: Option<f64> = None;
    for (i, s) in bg.segments.iter().enumerate() {
        match &s.length {
            Some(l) => {
                let margin = Float::with_val(m.prec(), l - d).to_f64();
                if margin < -MARGIN_EPS {
                    failures.push(format!("segment {i} is shorter than D (margin {margin:e})"));
                }
                min_len = Some(min_len.map_or(margin, |x| x.min(margin)));
                lengths.push(Some(l.to_f64()));
            }
            None => lengths.push(None),
        }
    }
    let half_pi = m.pi() / 2u32;
    let mut angles = Vec::new();
    let mut min_angle: Option<f64> = None;
    for i in 0..bg.segments.len().saturating_sub(1) {
        let (a, b) = (&bg.segments[i], &bg.segments[i + 1]);
        let joint = match (a.end.point(), b.start.point()) {
            (Some(p), Some(q)) if close(m, p, q) => p,
            _ => {
                failures.push(format!("segments {i} and {} are not joined", i + 1));
                continue;
            }
        };
        match angle_at(m, joint, a, b) {
            Ok(theta) => {
                let margin = Float::with_val(m.prec(), &theta - &half_pi).to_f64();
                if margin <= MARGIN_EPS {
                    failures.push(format!(
                        "angle at joint {i} is not above pi/2 (margin {margin:e})"
                    ));
                }
                min_angle = Some(min_angle.map_or(margin, |x| x.min(margin)));
                angles.push(theta.to_f64());
            }
            Err(e) => failures.push(format!("joint {i}: {e}")),
        }
    }
    let mut orth = None;
    if let Some((k, center)) = &bg.designated {
        match bg
            .segments
            .get(*k)
            .and_then(|s| s.end.point().map(|p| (s, p)))
        {
            Some((s, p)) => {
                let far = s.far_end(m, p).expect("p is an endpoint");
                let v = tangent(m, p.coords(), far);
                let w = tangent(m, p.coords(), center);
                let defect = (cos_between(m, &v, &w) + 1u32).to_f64();
                if defect > MARGIN_EPS {
                    failures.push(format!(
                        "segment {k} does not meet its horoball at a right angle"
                    ));
                }
                orth = Some(defect);
            }
            None => failures.push(format!("designated segment {k} is missing")),
        }
    }
    if !bg.carriers_exact {
        failures.push("horoball centers do not lie in the expected copies of H_G".into());
    }
    Certificate {
        d,
        segment_count: bg.segments.len(),
        expected_count: expected,
        lengths,
        angles,
        min_length_margin: min_len,
        min_angle_margin: min_angle,
        orthogonality_defect: orth,
        carriers_exact: bg.carriers_exact,
        pass: failures.is_empty(),
        failures,
    }
}

/// The inductive construction of the broken geodesic for reduced words.
pub struct GeodesicBuilder<'a> {
    pub model: &'a Model,
    pub group: &'a Group,
    pub levels: Vec<BigRational>,
    pub basepoint: HPoint,
    pub render_radius: f64,
}

impl<'a> GeodesicBuilder<'a> {
    pub fn new(model: &'a Model, group: &'a Group, plan: &HoroballPlan, d: f64) -> Self {
        GeodesicBuilder {
            model,
            group,
            levels: plan.balls.iter().map(|b| b.level.clone()).collect(),
            basepoint: model.basepoint(),
            render_radius: 2.0 * d + 10.0,
        }
    }

    fn in_copy(&self, g_inv: &ExactMatrix, y: &[BigRational]) -> Result<bool, GeomError> {
        let v = g_inv.apply(y)?;
        let plane = &self.group.config().subform_indices;
        Ok((0..v.len()).all(|i| plane.contains(&i) || v[i].is_zero()))
    }

    fn render_point(&self, j: &HPoint, ideal: &[Float]) -> Vec<f64> {
        let m = self.model;
        let v = tangent(m, j.coords(), ideal);
        let norm = m.inner(&v, &v).sqrt();
        let r = m.float(self.render_radius);
        let (sh, ch) = r.sinh_cosh(Float::new(m.prec()));
        j.coords()
            .iter()
            .zip(&v)
            .map(|(p, vi)| {
                (Float::with_val(m.prec(), p * &ch) + Float::with_val(m.prec(), vi * &sh) / &norm)
                    .to_f64()
            })
            .collect()
    }

    pub fn build(&self, w: &Word) -> Result<BrokenGeodesic, GeomError> {
        let m = self.model;
        let g = self.group;
        if britton_reduce(w, g)? != *w {
            return Err(GeomError::Precondition(
                "word is not Britton-reduced".into(),
            ));
        }
        let ell = w.ell();
        if ell < 2 {
            return Err(GeomError::Precondition(
                "broken geodesics need l >= 2; use the matrix test for l = 1".into(),
            ));
        }
        let mut prefix = g.evaluate_base(&w.bases()[0])?;
        let mut centers: Vec<Vec<BigRational>> = Vec::new();
        let mut carriers_exact = true;
        for i in 0..ell - 1 {
            let (r, k) = w.stables()[i];
            let y = prefix.apply(&g.config().cusps[r].point)?;
            let h = &prefix * &g.stable_power(r, k)?;
            let next = &h * &g.evaluate_base(&w.bases()[i + 1])?;
            let next_inv = next.inverse()?;
            carriers_exact &=
                self.in_copy(&prefix.inverse()?, &y)? && self.in_copy(&next_inv, &y)?;
            if let Some(prev) = centers.last() {
                if proportional(prev, &y) {
                    return Err(GeomError::Degenerate(format!(
                        "consecutive horoball centers {} and {} coincide",
                        i - 1,
                        i
                    )));
                }
                carriers_exact &= self.in_copy(&prefix.inverse()?, prev)?;
            }
            centers.push(y);
            prefix = next;
        }
        let ys: Vec<Vec<Float>> = centers
            .iter()
            .map(|y| m.future(y))
            .collect::<Result<_, _>>()?;
        let ss: Vec<Float> = w.stables()[..ell - 1]
            .iter()
            .map(|&(r, _)| m.from_rational(&self.levels[r]))
            .collect();
        let x = self.basepoint.clone();
        let z = HPoint::raw(m.apply(&prefix, x.coords()));

        let mut segments = Vec::new();
        let mut render = Vec::new();
        let back = |p: &HPoint, y: &[Float]| -> Vec<Float> {
            let c = -m.inner(p.coords(), y);
            p.coords()
                .iter()
                .zip(y)
                .map(|(pi, yi)| {
                    Float::with_val(m.prec(), pi * 2u32) - Float::with_val(m.prec(), yi / &c)
                })
                .collect()
        };
        let p1 = truncate_toward(m, x.coords(), &ys[0], &ss[0]);
        let ideal0 = back(&x, &ys[0]);
        render.push(Some(self.render_point(&p1, &ideal0)));
        segments.push(Segment {
            start: Endpoint::Ideal(ideal0),
            end: Endpoint::Point(p1.clone()),
            length: None,
            kind: SegmentKind::Ray,
            carrier: "H_G".into(),
        });
        let mut entry = p1;
        for i in 0..ell - 2 {
            let (ya, yb) = (&ys[i], &ys[i + 1]);
            let (sa, sb) = (&ss[i], &ss[i + 1]);
            let c = -m.inner(ya, yb);
            let a = HPoint::raw(combine(
                m,
                ya,
                &Float::with_val(m.prec(), sa * 2u32).recip(),
                yb,
                &Float::with_val(m.prec(), sa / &c),
            ));
            let b = HPoint::raw(combine(
                m,
                ya,
                &Float::with_val(m.prec(), sb / &c),
                yb,
                &Float::with_val(m.prec(), sb * 2u32).recip(),
            ));
            segments.push(chord(m, &entry, &a, format!("ball {i}")));
            render.push(None);
            segments.push(Segment {
                start: Endpoint::Point(a.clone()),
                end: Endpoint::Point(b.clone()),
                length: Some(super::distance(m, &a, &b)),
                kind: SegmentKind::Connector,
                carrier: format!("copy {}", i + 1),
            });
            render.push(None);
            entry = b;
        }
        let last = ell - 2;
        let q = truncate_toward(m, z.coords(), &ys[last], &ss[last]);
        segments.push(chord(m, &entry, &q, format!("ball {last}")));
        render.push(None);
        let ideal_end = back(&z, &ys[last]);
        render.push(Some(self.render_point(&q, &ideal_end)));
        segments.push(Segment {
            start: Endpoint::Point(q),
            end: Endpoint::Ideal(ideal_end),
            length: None,
            kind: SegmentKind::Ray,
            carrier: "w H_G".into(),
        });
        let designated = Some((segments.len() - 3, ys[last].clone()));
        Ok(BrokenGeodesic {
            word: w.to_string(),
            ell,
            segments,
            centers,
            carriers_exact,
            designated,
            basepoint: x,
            endpoint: z,
            render,
        })
    }
}

fn combine(m: &Model, x: &[Float], a: &Float, y: &[Float], b: &Float) -> Vec<Float> {
    x.iter()
        .zip(y)
        .map(|(xi, yi)| Float::with_val(m.prec(), xi * a) + Float::with_val(m.prec(), yi * b))
        .collect()
}

fn chord(m: &Model, a: &HPoint, b: &HPoint, carrier: String) -> Segment {
    Segment {
        start: Endpoint::Point(a.clone()),
        end: Endpoint::Point(b.clone()),
        length: Some(super::distance(m, a, b)),
        kind: SegmentKind::Chord,
        carrier,
    }
}

pub fn build_broken_geodesic(
    m: &Model,
    w: &Word,
    g: &Group,
    plan: &HoroballPlan,
    d: f64,
) -> Result<BrokenGeodesic, GeomError> {
    GeodesicBuilder::new(m, g, plan, d).build(w)
}
