use std::time::Instant;

use num_rational::BigRational;
use num_traits::Zero;
use rug::{Assign, Float};
use serde::Serialize;

use super::PipelineError;
use crate::grouppres::{is_identity, Group, GroupError, Word, WordSpace};
use crate::hypgeom::{plan_horoballs, HoroballPlan, Model, MARGIN_EPS};
use crate::lattice::ExactMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepOptions {
    #[serde(rename = "L")]
    pub max_len: usize,
    #[serde(rename = "E")]
    pub max_power: i64,
    #[serde(rename = "B")]
    pub max_letters: usize,
    #[serde(rename = "D")]
    pub d: f64,
    pub precision_bits: u32,
    /// Build broken-geodesic certificates; when off only exact
    /// nontriviality is checked.
    pub certify: bool,
    #[serde(skip)]
    pub max_failures: usize,
}

impl SweepOptions {
    pub fn new(
        max_len: usize,
        max_power: i64,
        max_letters: usize,
        d: f64,
        precision_bits: u32,
    ) -> Self {
        SweepOptions {
            max_len,
            max_power,
            max_letters,
            d,
            precision_bits,
            certify: true,
            max_failures: 20,
        }
    }

    pub fn exact_only(self) -> Self {
        SweepOptions {
            certify: false,
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepFailure {
    pub word: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepReport {
    pub options: SweepOptions,
    pub words: u64,
    pub by_ell: Vec<u64>,
    /// Nonempty words whose matrix was shown to differ from I.
    pub nontrivial: u64,
    /// Words whose image fixes the basepoint, settled by the full matrix.
    pub full_matrix_checks: u64,
    pub certificates: u64,
    pub certificate_failures: u64,
    pub failures: Vec<SweepFailure>,
    pub min_length_margin: Option<f64>,
    pub min_length_word: Option<String>,
    pub min_angle_margin: Option<f64>,
    pub min_angle_word: Option<String>,
    pub max_orthogonality_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
}

type FMat = Vec<Float>;

fn fmat(m: &Model, e: &ExactMatrix) -> FMat {
    let n = e.dim();
    (0..n * n)
        .map(|k| m.from_rational(e.get(k / n, k % n)))
        .collect()
}

fn matmul(p: u32, n: usize, a: &[Float], b: &[Float]) -> FMat {
    let mut out = vec![Float::new(p); n * n];
    let mut t = Float::new(p);
    for i in 0..n {
        for k in 0..n {
            let aik = &a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                t.assign(aik * &b[k * n + j]);
                out[i * n + j] += &t;
            }
        }
    }
    out
}

fn matvec(p: u32, n: usize, a: &[Float], v: &[Float]) -> Vec<Float> {
    let mut t = Float::new(p);
    (0..n)
        .map(|i| {
            let mut s = Float::new(p);
            for j in 0..n {
                t.assign(&a[i * n + j] * &v[j]);
                s += &t;
            }
            s
        })
        .collect()
}

/// a^T (coeffs * v).
fn pullback(p: u32, n: usize, a: &[Float], coeffs: &[Float], v: &[Float]) -> Vec<Float> {
    let av: Vec<Float> = coeffs
        .iter()
        .zip(v)
        .map(|(c, x)| Float::with_val(p, c * x))
        .collect();
    let mut t = Float::new(p);
    (0..n)
        .map(|j| {
            let mut s = Float::new(p);
            for i in 0..n {
                t.assign(&a[i * n + j] * &av[i]);
                s += &t;
            }
            s
        })
        .collect()
}

fn lin(p: u32, x: &[Float], a: &Float, y: &[Float], b: &Float) -> Vec<Float> {
    x.iter()
        .zip(y)
        .map(|(xi, yi)| Float::with_val(p, xi * a) + Float::with_val(p, yi * b))
        .collect()
}

/// cos of the angle at a point between the directions toward f (with
/// <f,f> = nff, alpha = -<e,f>) and toward g (b = -<e,g>, <f,g> = fg).
fn cos_angle(p: u32, fg: &Float, alpha: &Float, nff: i32, b: &Float) -> Float {
    let num = Float::with_val(p, alpha * b) + fg;
    let d1 = Float::with_val(p, alpha * alpha) + nff;
    let d2 = Float::with_val(p, b * b) - 1u32;
    num / (d1 * d2).sqrt()
}

/// Geometry carried from a stable letter to everything after it.
#[derive(Clone)]
struct Geo {
    y: Vec<Float>,
    s: Float,
    e: Vec<Float>,
    f: Vec<Float>,
    alpha: Float,
    inv_den_f: Float,
    fy: Float,
    /// H^T A v for v = -Y, E, F.
    r_y: Vec<Float>,
    r_e: Vec<Float>,
    r_f: Vec<Float>,
}

struct Node {
    h: FMat,
    /// H^{-1} applied to the integral basepoint.
    v: Vec<BigRational>,
    geo: Option<Geo>,
    failure: Option<String>,
}

/// Values produced by one node or leaf, in segment and joint order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepValues {
    pub cosh_lengths: Vec<f64>,
    pub cos_angles: Vec<f64>,
    pub orthogonality_defect: Option<f64>,
}

struct Tables<'a> {
    m: &'a Model,
    g: &'a Group,
    space: WordSpace,
    n: usize,
    p: u32,
    base_f: Vec<FMat>,
    base_inv: Vec<ExactMatrix>,
    w_exact: Vec<Vec<BigRational>>,
    w_float: Vec<Vec<Float>>,
    stable_f: Vec<FMat>,
    stable_inv: Vec<ExactMatrix>,
    u_float: Vec<Vec<Float>>,
    levels: Vec<Float>,
    x_int: Vec<BigRational>,
    x_float: Vec<Float>,
    cosh_thr: Float,
    cos_thr: Float,
    certify: bool,
}

struct Stats {
    min_cosh: Option<Float>,
    min_cosh_pending: bool,
    min_cosh_word: Option<String>,
    max_cos: Option<Float>,
    max_cos_pending: bool,
    max_cos_word: Option<String>,
    max_defect: Option<f64>,
    by_ell: Vec<u64>,
    nontrivial: u64,
    full_checks: u64,
    certificates: u64,
    cert_failures: u64,
    failures: Vec<SweepFailure>,
    max_failures: usize,
}

impl Stats {
    fn length(&mut self, a: &Float) {
        if self.min_cosh.as_ref().is_none_or(|m| a < m) {
            self.min_cosh = Some(a.clone());
            self.min_cosh_pending = true;
        }
    }

    fn angle(&mut self, c: &Float) {
        if self.max_cos.as_ref().is_none_or(|m| c > m) {
            self.max_cos = Some(c.clone());
            self.max_cos_pending = true;
        }
    }

    fn defect(&mut self, d: f64) {
        if self.max_defect.is_none_or(|m| d > m) {
            self.max_defect = Some(d);
        }
    }
}

struct Scratch {
    c: Float,
    ee: Float,
    ef: Float,
    t: Float,
    sc: Float,
    kappa: Float,
    a: Float,
    fq: Float,
    sq: Float,
    cos1: Float,
    b: Float,
    beta: Float,
    gamma: Float,
    cos2: Float,
}

impl Scratch {
    fn new(p: u32) -> Scratch {
        let f = || Float::new(p);
        Scratch {
            c: f(),
            ee: f(),
            ef: f(),
            t: f(),
            sc: f(),
            kappa: f(),
            a: f(),
            fq: f(),
            sq: f(),
            cos1: f(),
            b: f(),
            beta: f(),
            gamma: f(),
            cos2: f(),
        }
    }
}

fn dot(out: &mut Float, t: &mut Float, r: &[Float], w: &[Float]) {
    out.assign(&r[0] * &w[0]);
    for j in 1..r.len() {
        t.assign(&r[j] * &w[j]);
        *out += &*t;
    }
}

impl<'a> Tables<'a> {
    fn new(
        m: &'a Model,
        g: &'a Group,
        plan: &HoroballPlan,
        opts: &SweepOptions,
    ) -> Result<Tables<'a>, PipelineError> {
        let space = WordSpace::new(g, opts.max_power, opts.max_letters)?;
        let n = g.dim();
        let p = m.prec();
        let mut x_int = vec![BigRational::zero(); n];
        x_int[m.negative_index()] = BigRational::from_integer(1.into());
        let x_float = m.basepoint().coords().to_vec();
        let mut base_f = Vec::new();
        let mut base_inv = Vec::new();
        let mut w_exact = Vec::new();
        let mut w_float = Vec::new();
        for s in &space.base_syllables {
            let mat = g.evaluate_base(s)?;
            base_f.push(fmat(m, &mat));
            base_inv.push(mat.inverse()?);
            w_exact.push(mat.apply(&x_int)?);
            w_float.push(m.apply(&mat, &x_float));
        }
        let mut stable_f = Vec::new();
        let mut stable_inv = Vec::new();
        for &(r, k) in &space.stables {
            stable_f.push(fmat(m, &g.stable_power(r, k)?));
            stable_inv.push(g.stable_power(r, -k)?);
        }
        let u_exact: Vec<Vec<BigRational>> =
            g.config().cusps.iter().map(|c| c.point.clone()).collect();
        let u_float = u_exact
            .iter()
            .map(|u| m.future(u))
            .collect::<Result<Vec<_>, _>>()?;
        let levels = plan
            .balls
            .iter()
            .map(|b| m.from_rational(&b.level))
            .collect();
        let cosh_thr = m.float(opts.d - MARGIN_EPS).cosh();
        let cos_thr = -m.float(MARGIN_EPS).sin();
        Ok(Tables {
            m,
            g,
            space,
            n,
            p,
            base_f,
            base_inv,
            w_exact,
            w_float,
            stable_f,
            stable_inv,
            u_float,
            levels,
            x_int,
            x_float,
            cosh_thr,
            cos_thr,
            certify: opts.certify,
        })
    }

    fn ok_len(&self, a: &Float) -> bool {
        *a >= self.cosh_thr
    }

    fn ok_cos(&self, c: &Float) -> bool {
        *c < self.cos_thr
    }

    /// Node for stable letter `t` after the prefix `gm` (through m_i).
    fn node(
        &self,
        gm: &FMat,
        v_g: &[BigRational],
        t: usize,
        parent: Option<&Node>,
        mut stats: Option<&mut Stats>,
        trace: Option<&mut StepValues>,
    ) -> Result<Node, PipelineError> {
        let (m, n, p) = (self.m, self.n, self.p);
        let (r, _) = self.space.stables[t];
        let h = matmul(p, n, gm, &self.stable_f[t]);
        let v = self.stable_inv[t].apply(v_g)?;
        let inherited = parent.and_then(|q| q.failure.clone());
        let prev_geo = parent.and_then(|q| q.geo.as_ref());
        if inherited.is_some() || (parent.is_some() && prev_geo.is_none()) {
            return Ok(Node {
                h,
                v,
                geo: None,
                failure: inherited,
            });
        }
        let mut y = matvec(p, n, gm, &self.u_float[r]);
        if y[m.negative_index()] < 0 {
            for x in y.iter_mut() {
                *x = Float::with_val(p, -&*x);
            }
        }
        let s = self.levels[r].clone();
        let half_inv_s = Float::with_val(p, &s * 2u32).recip();
        let mut failure = None;
        let mut values = StepValues::default();
        let (e, f, nff) = match prev_geo {
            None => {
                let x = &self.x_float;
                let c0 = -m.inner(x, &y);
                let sc0 = Float::with_val(p, &s / &c0);
                let kappa = Float::with_val(p, &half_inv_s - Float::with_val(p, &sc0 / &c0) / 2u32);
                let e = lin(p, x, &sc0, &y, &kappa);
                let f = lin(p, x, &m.float(2), &y, &-c0.recip());
                (e, f, 0)
            }
            Some(pg) => {
                let ya = &pg.y;
                let c = -m.inner(ya, &y);
                if c <= m.eps_join() {
                    return Err(PipelineError::Geom(crate::hypgeom::GeomError::Degenerate(
                        "consecutive horoball centers coincide".into(),
                    )));
                }
                let sa = &pg.s;
                let a_pt = lin(
                    p,
                    ya,
                    &Float::with_val(p, sa * 2u32).recip(),
                    &y,
                    &Float::with_val(p, sa / &c),
                );
                let b_pt = lin(p, ya, &Float::with_val(p, &s / &c), &y, &half_inv_s);
                let a = -m.inner(&pg.e, &a_pt);
                let fa = m.inner(&pg.f, &a_pt);
                let cos_e = Float::with_val(p, &fa + Float::with_val(p, &pg.alpha * &a))
                    * &pg.inv_den_f
                    / Float::with_val(p, Float::with_val(p, &a * &a) - 1u32).sqrt();
                let b = -m.inner(&a_pt, &b_pt);
                let eb = m.inner(&pg.e, &b_pt);
                let cos_a = cos_angle(p, &eb, &a, -1, &b);
                if !self.ok_len(&a) {
                    failure.get_or_insert_with(|| "chord shorter than D".to_string());
                }
                if !self.ok_len(&b) {
                    failure.get_or_insert_with(|| "connector shorter than D".to_string());
                }
                if !self.ok_cos(&cos_e) || !self.ok_cos(&cos_a) {
                    failure.get_or_insert_with(|| "angle not above pi/2".to_string());
                }
                values.cosh_lengths.extend([a.to_f64(), b.to_f64()]);
                values.cos_angles.extend([cos_e.to_f64(), cos_a.to_f64()]);
                if let Some(st) = stats.as_deref_mut() {
                    st.length(&a);
                    st.length(&b);
                    st.angle(&cos_e);
                    st.angle(&cos_a);
                }
                (b_pt, a_pt, -1)
            }
        };
        let alpha = -m.inner(&e, &f);
        let mut inv_den_f = Float::with_val(p, &alpha * &alpha);
        inv_den_f += nff;
        inv_den_f = inv_den_f.sqrt().recip();
        let fy = m.inner(&f, &y);
        let cos_d = Float::with_val(p, &fy + Float::with_val(p, &alpha * &s)) * &inv_den_f / &s;
        let defect = Float::with_val(p, cos_d + 1u32).to_f64();
        if !(defect <= MARGIN_EPS) {
            failure.get_or_insert_with(|| {
                "entry segment not orthogonal to the horosphere".to_string()
            });
        }
        values.orthogonality_defect = Some(defect);
        if let Some(st) = stats {
            st.defect(defect);
        }
        let neg_y: Vec<Float> = y.iter().map(|x| Float::with_val(p, -x)).collect();
        let coeffs = m.coeffs();
        let geo = Geo {
            r_y: pullback(p, n, &h, coeffs, &neg_y),
            r_e: pullback(p, n, &h, coeffs, &e),
            r_f: pullback(p, n, &h, coeffs, &f),
            y,
            s,
            e,
            f,
            alpha,
            inv_den_f,
            fy,
        };
        if let Some(tr) = trace {
            tr.cosh_lengths.extend(values.cosh_lengths.iter().copied());
            tr.cos_angles.extend(values.cos_angles.iter().copied());
            tr.orthogonality_defect = values.orthogonality_defect;
        }
        Ok(Node {
            h,
            v,
            geo: Some(geo),
            failure,
        })
    }

    /// Final chord and the two last angles for m_l = syllable `mi`.
    /// Returns the first failure, if any; values are left in `sc`.
    fn leaf(&self, geo: &Geo, w: &[Float], sc: &mut Scratch) -> Option<&'static str> {
        dot(&mut sc.c, &mut sc.t, &geo.r_y, w);
        dot(&mut sc.ee, &mut sc.t, &geo.r_e, w);
        dot(&mut sc.ef, &mut sc.t, &geo.r_f, w);
        let s = &geo.s;
        sc.sc.assign(s / &sc.c);
        sc.t.assign(&sc.sc / &sc.c);
        sc.t >>= 1;
        sc.kappa.assign(s.recip_ref());
        sc.kappa >>= 1;
        sc.kappa -= &sc.t;
        // a = kappa s - sc e_E
        sc.a.assign(&sc.kappa * s);
        sc.t.assign(&sc.sc * &sc.ee);
        sc.a -= &sc.t;
        // <F,Q> = sc e_F + kappa <F,Y>
        sc.fq.assign(&sc.sc * &sc.ef);
        sc.t.assign(&sc.kappa * &geo.fy);
        sc.fq += &sc.t;
        sc.sq.assign(sc.a.square_ref());
        sc.sq -= 1u32;
        sc.sq.sqrt_mut();
        sc.cos1.assign(&geo.alpha * &sc.a);
        sc.cos1 += &sc.fq;
        sc.cos1 *= &geo.inv_den_f;
        sc.cos1 /= &sc.sq;
        // b = sc + kappa c, beta = 2b - sc, gamma = 2 e_E + sc
        sc.b.assign(&sc.kappa * &sc.c);
        sc.b += &sc.sc;
        sc.beta.assign(&sc.b * 2u32);
        sc.beta -= &sc.sc;
        sc.gamma.assign(&sc.ee * 2u32);
        sc.gamma += &sc.sc;
        sc.cos2.assign(&sc.a * &sc.beta);
        sc.cos2 += &sc.gamma;
        sc.t.assign(&sc.beta * &sc.sq);
        sc.cos2 /= &sc.t;
        if !self.ok_len(&sc.a) {
            Some("final chord shorter than D")
        } else if !self.ok_cos(&sc.cos1) || !self.ok_cos(&sc.cos2) {
            Some("angle not above pi/2")
        } else {
            None
        }
    }

    fn word(&self, digits: &[usize]) -> Word {
        let bases: Vec<usize> = digits.iter().step_by(2).copied().collect();
        let stables: Vec<usize> = digits.iter().skip(1).step_by(2).copied().collect();
        self.space.word(&bases, &stables)
    }

    /// Exact nontriviality of the word `digits`; `v` is the inverse of
    /// everything before the last syllable applied to the basepoint.
    fn exact_check(
        &self,
        digits: &[usize],
        last: usize,
        v: &[BigRational],
        stats: &mut Stats,
    ) -> Result<(), PipelineError> {
        if self.w_exact[last].as_slice() != v {
            stats.nontrivial += 1;
            return Ok(());
        }
        stats.full_checks += 1;
        let w = self.word(digits);
        let verdict = is_identity(&w, self.g)?;
        if verdict.identity {
            return Err(PipelineError::Group(GroupError::FaithfulnessViolation {
                word: w.to_string(),
                reason: "reduced word evaluates to the identity".into(),
            }));
        }
        stats.nontrivial += 1;
        Ok(())
    }
}

struct Dfs<'t, 'a> {
    tb: &'t Tables<'a>,
    stats: Stats,
    sc: Scratch,
    digits: Vec<usize>,
}

impl Dfs<'_, '_> {
    fn note_word(&mut self) {
        if self.stats.min_cosh_pending || self.stats.max_cos_pending {
            let w = self.tb.word(&self.digits).to_string();
            if self.stats.min_cosh_pending {
                self.stats.min_cosh_word = Some(w.clone());
                self.stats.min_cosh_pending = false;
            }
            if self.stats.max_cos_pending {
                self.stats.max_cos_word = Some(w);
                self.stats.max_cos_pending = false;
            }
        }
    }

    fn fail(&mut self, reason: &str) {
        self.stats.cert_failures += 1;
        if self.stats.failures.len() < self.stats.max_failures {
            self.stats.failures.push(SweepFailure {
                word: self.tb.word(&self.digits).to_string(),
                reason: reason.to_string(),
            });
        }
    }

    /// Chooses m_i (and t_i unless i is the last position).
    fn level(
        &mut self,
        ell: usize,
        i: usize,
        parent: Option<&Node>,
        hp: &FMat,
        vp: &[BigRational],
    ) -> Result<(), PipelineError> {
        let tb = self.tb;
        let nsyl = tb.space.base_syllables.len();
        if i == ell - 1 {
            let node = parent.expect("l >= 2");
            for mi in 0..nsyl {
                self.digits.push(mi);
                tb.exact_check(&self.digits, mi, &node.v, &mut self.stats)?;
                self.stats.by_ell[ell] += 1;
                if !tb.certify {
                    self.digits.pop();
                    continue;
                }
                self.stats.certificates += 1;
                match (&node.failure, &node.geo) {
                    (Some(f), _) => {
                        let f = f.clone();
                        self.fail(&f);
                    }
                    (None, Some(geo)) => {
                        let bad = tb.leaf(geo, &tb.w_float[mi], &mut self.sc);
                        self.stats.length(&self.sc.a);
                        self.stats.angle(&self.sc.cos1);
                        self.stats.angle(&self.sc.cos2);
                        if let Some(reason) = bad {
                            self.fail(reason);
                        }
                    }
                    (None, None) => self.fail("missing geometry"),
                }
                self.note_word();
                self.digits.pop();
            }
            return Ok(());
        }
        for mi in 0..nsyl {
            let gm = matmul(tb.p, tb.n, hp, &tb.base_f[mi]);
            let vg = tb.base_inv[mi].apply(vp)?;
            self.digits.push(mi);
            for t in 0..tb.space.stables.len() {
                if i >= 1 && !tb.space.allowed_middle(self.digits[2 * i - 1], mi, t) {
                    continue;
                }
                let node = if !tb.certify {
                    Node {
                        h: matmul(tb.p, tb.n, &gm, &tb.stable_f[t]),
                        v: tb.stable_inv[t].apply(&vg)?,
                        geo: None,
                        failure: None,
                    }
                } else {
                    match tb.node(&gm, &vg, t, parent, Some(&mut self.stats), None) {
                        Ok(nd) => nd,
                        Err(PipelineError::Geom(e)) => Node {
                            h: matmul(tb.p, tb.n, &gm, &tb.stable_f[t]),
                            v: tb.stable_inv[t].apply(&vg)?,
                            geo: None,
                            failure: Some(e.to_string()),
                        },
                        Err(e) => return Err(e),
                    }
                };
                self.digits.push(t);
                let (h, v) = (node.h.clone(), node.v.clone());
                self.level(ell, i + 1, Some(&node), &h, &v)?;
                self.digits.pop();
            }
            self.digits.pop();
        }
        Ok(())
    }
}

/// Enumerates every reduced word within (L, E, B) in the order of
/// `enumerate_reduced_words`; proves each nonempty word nontrivial exactly
/// and certifies every word with l >= 2 by its broken geodesic.
pub fn faithfulness_sweep_with_plan(
    g: &Group,
    plan: &HoroballPlan,
    opts: &SweepOptions,
) -> Result<SweepReport, PipelineError> {
    let started = Instant::now();
    let m = Model::new(g.form(), opts.precision_bits)?;
    let tb = Tables::new(&m, g, plan, opts)?;
    let max_ell = opts.max_len.div_ceil(2);
    let mut stats = Stats {
        min_cosh: None,
        min_cosh_pending: false,
        min_cosh_word: None,
        max_cos: None,
        max_cos_pending: false,
        max_cos_word: None,
        max_defect: None,
        by_ell: vec![0; max_ell + 1],
        nontrivial: 0,
        full_checks: 0,
        certificates: 0,
        cert_failures: 0,
        failures: Vec::new(),
        max_failures: opts.max_failures,
    };
    stats.by_ell[0] = 1;
    if max_ell >= 1 {
        for mi in 1..tb.space.base_syllables.len() {
            tb.exact_check(&[mi], mi, &tb.x_int, &mut stats)?;
            stats.by_ell[1] += 1;
        }
    }
    let mut dfs = Dfs {
        tb: &tb,
        stats,
        sc: Scratch::new(m.prec()),
        digits: Vec::new(),
    };
    if !tb.space.stables.is_empty() {
        let id = fmat(&m, &ExactMatrix::identity(tb.n));
        for ell in 2..=max_ell {
            dfs.level(ell, 0, None, &id, &tb.x_int)?;
        }
    }
    let st = dfs.stats;
    let min_length_margin = st
        .min_cosh
        .map(|c| Float::with_val(m.prec(), c.acosh() - opts.d).to_f64());
    let half_pi = m.pi() / 2u32;
    let min_angle_margin = st
        .max_cos
        .map(|c| Float::with_val(m.prec(), c.clamp(&-1i32, &1i32).acos() - &half_pi).to_f64());
    let elapsed = started.elapsed().as_secs_f64();
    Ok(SweepReport {
        options: *opts,
        words: st.by_ell.iter().sum(),
        by_ell: st.by_ell,
        nontrivial: st.nontrivial,
        full_matrix_checks: st.full_checks,
        certificates: st.certificates,
        certificate_failures: st.cert_failures,
        failures: st.failures,
        min_length_margin,
        min_length_word: st.min_cosh_word,
        min_angle_margin,
        min_angle_word: st.max_cos_word,
        max_orthogonality_defect: st.max_defect,
        runtime_seconds: Some(elapsed),
    })
}

/// `faithfulness_sweep_with_plan` with the horoball family planned for D.
pub fn faithfulness_sweep(g: &Group, opts: &SweepOptions) -> Result<SweepReport, PipelineError> {
    let m = Model::new(g.form(), opts.precision_bits)?;
    let plan = plan_horoballs(&m, g, opts.d)?;
    faithfulness_sweep_with_plan(g, &plan, opts)
}

/// The values the sweep computes for a single word with l >= 2: cosh of
/// every finite segment and cos of every joint angle, in order.
pub fn sweep_values(
    g: &Group,
    plan: &HoroballPlan,
    opts: &SweepOptions,
    w: &Word,
) -> Result<StepValues, PipelineError> {
    let m = Model::new(g.form(), opts.precision_bits)?;
    let tb = Tables::new(&m, g, plan, opts)?;
    let ell = w.ell();
    if ell < 2 {
        return Err(PipelineError::Precondition(
            "sweep values need l >= 2".into(),
        ));
    }
    let p = m.prec();
    let mut out = StepValues::default();
    let mut h = fmat(&m, &ExactMatrix::identity(tb.n));
    let mut v = tb.x_int.clone();
    let mut parent: Option<Node> = None;
    for i in 0..ell - 1 {
        let gm = matmul(p, tb.n, &h, &fmat(&m, &g.evaluate_base(&w.bases()[i])?));
        let vg = g.evaluate_base(&w.bases()[i])?.inverse()?.apply(&v)?;
        let (r, k) = w.stables()[i];
        let t = tb
            .space
            .stables
            .iter()
            .position(|&x| x == (r, k))
            .ok_or_else(|| {
                PipelineError::Precondition(format!("t_{r}^{k} is outside the sweep bounds"))
            })?;
        let node = tb.node(&gm, &vg, t, parent.as_ref(), None, Some(&mut out))?;
        h = node.h.clone();
        v = node.v.clone();
        parent = Some(node);
    }
    let last = g.evaluate_base(&w.bases()[ell - 1])?;
    let geo = parent
        .as_ref()
        .and_then(|n| n.geo.clone())
        .expect("geometry present");
    let x = m.apply(&last, &tb.x_float);
    let mut sc = Scratch::new(p);
    tb.leaf(&geo, &x, &mut sc);
    out.cosh_lengths.push(sc.a.to_f64());
    out.cos_angles.extend([sc.cos1.to_f64(), sc.cos2.to_f64()]);
    Ok(out)
}
