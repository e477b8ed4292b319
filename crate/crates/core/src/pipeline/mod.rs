//! End-to-end construction: form, cusps, Eichler generators, stable
//! letters, faithfulness sweep and density hypotheses.

mod chain;
mod density;
mod sweep;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

pub use chain::{assign_stable_letters, full_chains, ChainAssignment, ChainEntry, ChainReading};
pub use density::{hyperplane_invariance_check, is_corner_block, DensityReport, MAX_GENERATORS};
pub use sweep::{
    faithfulness_sweep, faithfulness_sweep_with_plan, sweep_values, StepValues, SweepFailure,
    SweepOptions, SweepReport,
};

use crate::grouppres::toy::toy_config;
use crate::grouppres::{
    folded_presentation, CuspSpec, Group, GroupConfig, GroupError, NamedMatrix, Presentation,
};
use crate::hypgeom::{
    power_stable_letters, proportional, GeomError, HoroballPlan, Model, PowerChoice,
    DEFAULT_PRECISION,
};
use crate::lattice::linalg::{nullspace, rank, Row};
use crate::lattice::{
    eichler_transvection, form_value, to_rational_vec, ExactMatrix, LatticeError,
};
use crate::qforms::{
    select_isotropic_subform, subform_chain, DiagonalForm, FormError, LegendreReading,
    MontesinosParams, SubformChain, SubformSelection,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("cusp chain {i} has no parabolic p_({k},{i})")]
    MissingChainEntry { k: usize, i: usize },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal invariant failed: {0}")]
    Invariant(String),
    #[error("stage {stage}: {message}")]
    Stage { stage: String, message: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Form(#[from] FormError),
}

impl PipelineError {
    pub fn stage(&self) -> Option<&str> {
        match self {
            PipelineError::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }
}

fn tag<E: std::fmt::Display>(stage: &str) -> impl FnOnce(E) -> PipelineError + '_ {
    move |e| PipelineError::Stage {
        stage: stage.to_string(),
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub d: f64,
    pub max_len: usize,
    pub max_power: i64,
    pub max_letters: usize,
    pub precision_bits: u32,
    pub chain_reading: ChainReading,
    pub legendre: LegendreReading,
    /// Defaults to max(2, n - 2).
    pub cusps: Option<usize>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            d: 6.0,
            max_len: 5,
            max_power: 1,
            max_letters: 1,
            precision_bits: DEFAULT_PRECISION,
            chain_reading: ChainReading::Clamped,
            legendre: LegendreReading::default(),
            cusps: None,
        }
    }
}

impl PipelineOptions {
    fn sweep(&self) -> SweepOptions {
        SweepOptions::new(
            self.max_len,
            self.max_power,
            self.max_letters,
            self.d,
            self.precision_bits,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CuspConstruction {
    #[serde(with = "crate::io::rational_vec_str")]
    pub point: Vec<BigRational>,
    /// v with B(u,v) = 0 inside H_G.
    #[serde(with = "crate::io::rational_vec_str")]
    pub direction: Vec<BigRational>,
    /// Base generator E(u, lambda v).
    pub lambda: u64,
    /// 2 s sqrt(q(lambda v)) at the tangency level.
    pub horospherical_translation: f64,
}

/// Everything computed from a validated group configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CertificationReport {
    pub config: GroupConfig,
    pub presentation: Presentation,
    pub chain_assignment: ChainAssignment,
    pub horoballs: HoroballPlan,
    pub powers: Vec<PowerChoice>,
    pub powered_stable_letters: Vec<ExactMatrix>,
    pub sweep: SweepReport,
    pub density: DensityReport,
    pub density_base_only: DensityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PipelineReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<MontesinosParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<SubformSelection>,
    pub form: DiagonalForm,
    pub subform_chain: SubformChain,
    pub f_indices: Vec<usize>,
    pub extra_indices: Vec<usize>,
    pub cusps: Vec<CuspConstruction>,
    pub certification: CertificationReport,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PipelineInput {
    Params { s: BigInt, a: BigInt },
    Form(DiagonalForm),
}

fn unit(n: usize, i: usize) -> Vec<BigRational> {
    (0..n)
        .map(|j| {
            if i == j {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
        .collect()
}

fn embed(v: &[BigInt], indices: &[usize], n: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); n];
    for (x, &i) in v.iter().zip(indices) {
        out[i] = BigRational::from_integer(x.clone());
    }
    out
}

fn primitive(v: &[BigRational]) -> Vec<BigRational> {
    use num_integer::Integer;
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let g = if g.is_zero() { BigInt::one() } else { g };
    let mut out: Vec<BigInt> = ints.iter().map(|x| x / &g).collect();
    if out
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative())
    {
        out.iter_mut().for_each(|x| *x = -&*x);
    }
    to_rational_vec(&out)
}

/// Distinct isotropic lines obtained from the witness by flipping signs of
/// the coordinates with positive coefficient.
fn cusp_points(
    q: &DiagonalForm,
    witness: &[BigRational],
    f_idx: &[usize],
    count: usize,
) -> Result<Vec<Vec<BigRational>>, PipelineError> {
    let pos: Vec<usize> = f_idx
        .iter()
        .copied()
        .filter(|&i| q.coeffs()[i].is_positive())
        .collect();
    let mut out: Vec<Vec<BigRational>> = vec![primitive(witness)];
    for mask in 1u32..(1 << pos.len()) {
        if out.len() == count {
            break;
        }
        let mut u = witness.to_vec();
        for (b, &i) in pos.iter().enumerate() {
            if mask & (1 << b) != 0 {
                u[i] = -&u[i];
            }
        }
        let u = primitive(&u);
        if !out.iter().any(|x| proportional(x, &u)) {
            out.push(u);
        }
    }
    if out.len() < count {
        return Err(PipelineError::Precondition(format!(
            "only {} distinct cusps from the witness, {count} needed",
            out.len()
        )));
    }
    Ok(out)
}

/// Positive direction in f orthogonal to u, preferring one outside the
/// span of the cusp points and the directions chosen so far.
fn direction(
    q: &DiagonalForm,
    u: &[BigRational],
    f_idx: &[usize],
    span: &[Row],
) -> Result<Vec<BigRational>, PipelineError> {
    let n = q.rank();
    let row: Vec<BigRational> = f_idx
        .iter()
        .map(|&i| BigRational::from_integer(q.coeffs()[i].clone()) * &u[i])
        .collect();
    let basis: Vec<Row> = nullspace(&[row], f_idx.len())
        .into_iter()
        .map(|b| {
            let mut v = vec![BigRational::zero(); n];
            for (x, &i) in b.iter().zip(f_idx) {
                v[i] = x.clone();
            }
            v
        })
        .collect();
    let mut candidates = basis.clone();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            for sign in [1i64, -1] {
                let s = BigRational::from_integer(sign.into());
                candidates.push(
                    basis[i]
                        .iter()
                        .zip(&basis[j])
                        .map(|(x, y)| x + &s * y)
                        .collect(),
                );
            }
        }
    }
    let positive: Vec<Row> = candidates
        .into_iter()
        .filter(|v| form_value(q, v).is_positive())
        .collect();
    let base_rank = rank(span, n);
    let grows = |v: &Row| {
        let mut rows = span.to_vec();
        rows.push(v.clone());
        rank(&rows, n) > base_rank
    };
    positive
        .iter()
        .find(|v| grows(v))
        .or_else(|| positive.first())
        .map(|v| primitive(v))
        .ok_or_else(|| {
            PipelineError::Invariant("no positive direction orthogonal to the cusp".into())
        })
}

/// Least lambda with lambda^2 q(v) m > 2, m the least |<u_i,u_j>|.
fn ping_pong_lambda(qv: &BigRational, m: &BigRational) -> u64 {
    let two = BigRational::from_integer(2.into());
    (1u64..)
        .find(|&l| {
            let l = BigRational::from_integer(l.into());
            &l * &l * qv * m > two
        })
        .expect("unbounded search")
}

fn gram(q: &DiagonalForm, x: &[BigRational], y: &[BigRational]) -> BigRational {
    q.coeffs()
        .iter()
        .zip(x.iter().zip(y))
        .map(|(a, (xi, yi))| BigRational::from_integer(a.clone()) * xi * yi)
        .sum()
}

/// Builds the group configuration of a form with an isotropic rank-4
/// subform on `f_idx`: cusps from the witness, Eichler base generators,
/// chain parabolics in the extra coordinates and assigned stable letters.
pub fn construct_config(
    q: &DiagonalForm,
    f_idx: &[usize],
    witness: &[BigInt],
    opts: &PipelineOptions,
) -> Result<
    (
        GroupConfig,
        Vec<CuspConstruction>,
        Vec<usize>,
        ChainAssignment,
    ),
    PipelineError,
> {
    let dim = q.rank();
    let n = dim - 1;
    let extra: Vec<usize> = (0..dim).filter(|i| !f_idx.contains(i)).collect();
    let count = opts.cusps.unwrap_or_else(|| 2.max(n.saturating_sub(2)));
    let w = embed(witness, f_idx, dim);
    let points = cusp_points(q, &w, f_idx, count).map_err(tag("cusps"))?;
    let mut min_pair: Option<BigRational> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let g = gram(q, &points[i], &points[j]).abs();
            if min_pair.as_ref().is_none_or(|m| g < *m) {
                min_pair = Some(g);
            }
        }
    }
    let min_pair = min_pair.unwrap_or_else(BigRational::one);
    let names = |i: usize| -> String {
        if i < 26 {
            ((b'a' + i as u8) as char).to_string()
        } else {
            format!("g{i}")
        }
    };
    let mut base_generators = Vec::new();
    let mut cusps = Vec::new();
    let mut constructions = Vec::new();
    let mut span: Vec<Row> = points.clone();
    for (i, u) in points.iter().enumerate() {
        let v = direction(q, u, f_idx, &span).map_err(tag("generators"))?;
        span.push(v.clone());
        let qv = form_value(q, &v);
        let lambda = ping_pong_lambda(&qv, &min_pair);
        let lv: Vec<BigRational> = v
            .iter()
            .map(|x| x * BigRational::from_integer(lambda.into()))
            .collect();
        let mat = eichler_transvection(q, u, &lv).map_err(tag("generators"))?;
        let s_t2 = &min_pair / BigRational::from_integer(2.into());
        let tau = 2.0 * (f64_of(&s_t2) * f64_of(&form_value(q, &lv))).sqrt();
        base_generators.push(NamedMatrix {
            name: names(i),
            matrix: mat,
        });
        cusps.push(CuspSpec {
            point: u.clone(),
            generators: vec![vec![i as i32 + 1]],
        });
        constructions.push(CuspConstruction {
            point: u.clone(),
            direction: v,
            lambda,
            horospherical_translation: tau,
        });
    }
    let chains: Vec<Vec<usize>> = vec![(2..2 + extra.len()).collect(); points.len()];
    let assignment = assign_stable_letters(n, points.len(), &chains, opts.chain_reading)
        .map_err(tag("chain"))?;
    let mut stable_letters = Vec::new();
    for e in &assignment.table {
        let x = unit(dim, extra[e.k - 2]);
        stable_letters
            .push(eichler_transvection(q, &points[e.cusp], &x).map_err(tag("stable letters"))?);
    }
    let cfg = GroupConfig {
        form: q.clone(),
        subform_indices: f_idx.to_vec(),
        base_generators,
        cusps,
        stable_letters,
        d: Some(opts.d),
        precision_bits: Some(opts.precision_bits),
        sweep: Some(crate::grouppres::SweepBounds {
            l: opts.max_len,
            e: opts.max_power,
            b: opts.max_letters,
        }),
    };
    Ok((cfg, constructions, extra, assignment))
}

fn f64_of(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Presentation, stable-letter powers, sweep and density checks for a
/// configuration. The sweep runtime is dropped so reports are reproducible.
pub fn certify_config(
    cfg: GroupConfig,
    chain_assignment: Option<ChainAssignment>,
    opts: &PipelineOptions,
) -> Result<CertificationReport, PipelineError> {
    let group = Group::new(cfg.clone()).map_err(tag("group"))?;
    let presentation = folded_presentation(&group);
    let chain_assignment = match chain_assignment {
        Some(c) => c,
        None => {
            let n = group.dim() - 1;
            let chains = vec![vec![2]; group.cusp_count()];
            assign_stable_letters(n, group.cusp_count(), &chains, opts.chain_reading)
                .map_err(tag("chain"))?
        }
    };
    let model = Model::new(group.form(), opts.precision_bits).map_err(tag("model"))?;
    let powered = power_stable_letters(&model, &group, opts.d).map_err(tag("powers"))?;
    let mut sweep = faithfulness_sweep_with_plan(&powered.group, &powered.plan, &opts.sweep())
        .map_err(|e| match e {
            PipelineError::Group(GroupError::FaithfulnessViolation { .. }) => e,
            other => tag("sweep")(other),
        })?;
    sweep.runtime_seconds = None;
    let base: Vec<ExactMatrix> = cfg
        .base_generators
        .iter()
        .map(|b| b.matrix.clone())
        .collect();
    let mut all = base.clone();
    all.extend(powered.group.config().stable_letters.iter().cloned());
    let density = hyperplane_invariance_check(&all, group.form()).map_err(tag("density"))?;
    let density_base_only =
        hyperplane_invariance_check(&base, group.form()).map_err(tag("density"))?;
    Ok(CertificationReport {
        powered_stable_letters: powered.group.config().stable_letters.clone(),
        config: cfg,
        presentation,
        chain_assignment,
        horoballs: powered.plan,
        powers: powered.powers,
        sweep,
        density,
        density_base_only,
    })
}

pub fn run_pipeline(
    input: &PipelineInput,
    opts: &PipelineOptions,
) -> Result<PipelineReport, PipelineError> {
    let (params, selection, q, f_idx, witness) = match input {
        PipelineInput::Params { s, a } => {
            let params = MontesinosParams::with_reading(s.clone(), a.clone(), opts.legendre)
                .map_err(tag("validate"))?;
            let sel = select_isotropic_subform(&params).map_err(tag("subform"))?;
            let (q, idx, w) = (sel.q_used.clone(), sel.indices.clone(), sel.witness.clone());
            (Some(params), Some(sel), q, idx, w)
        }
        PipelineInput::Form(q) => {
            let chain = subform_chain(q).map_err(tag("subform chain"))?;
            let last = chain
                .last()
                .ok_or_else(|| tag("subform chain")("empty chain"))?;
            if let Some(t) = &chain.tail_failure {
                return Err(tag("subform chain")(t));
            }
            let w = last.isotropy.witness.clone().ok_or_else(|| {
                tag("subform chain")("no isotropy witness for the rank-4 subform")
            })?;
            (None, None, q.clone(), last.indices.clone(), w)
        }
    };
    let subform_chain = subform_chain(&q).map_err(tag("subform chain"))?;
    let (cfg, cusps, extra, assignment) = construct_config(&q, &f_idx, &witness, opts)?;
    let certification = certify_config(cfg, Some(assignment), opts)?;
    Ok(PipelineReport {
        params,
        selection,
        form: q,
        subform_chain,
        f_indices: f_idx,
        extra_indices: extra,
        cusps,
        certification,
    })
}

pub fn run_toy(name: &str, opts: &PipelineOptions) -> Result<CertificationReport, PipelineError> {
    let cfg = toy_config(name).map_err(tag("config"))?;
    certify_config(cfg, None, opts)
}

pub fn report_json<T: Serialize>(r: &T) -> String {
    serde_json::to_string_pretty(r).expect("reports serialize")
}
