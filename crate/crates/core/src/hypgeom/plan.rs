use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::{
    choose_power, horoball_distance, proportional, GeomError, Horoball, Model, PowerChoice,
};
use crate::grouppres::Group;
use crate::lattice::ExactMatrix;

const MAX_ROUNDS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDistance {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HoroballPlan {
    pub balls: Vec<Horoball>,
    pub rounds: u32,
    pub pairwise: Vec<PairDistance>,
    /// ln(1/(2 s_i s_j)) minimized over cusp pairs; a lower bound for the
    /// distance between any two distinct translates when every matrix and
    /// cusp point is integral.
    pub lattice_bound: Option<f64>,
}

fn integral(g: &Group) -> bool {
    let c = g.config();
    c.base_generators.iter().all(|b| b.matrix.is_integral())
        && c.stable_letters.iter().all(|t| t.is_integral())
        && c.cusps
            .iter()
            .all(|u| u.point.iter().all(|x| x.is_integer()))
}

fn generator_images(g: &Group) -> Result<Vec<ExactMatrix>, GeomError> {
    let c = g.config();
    let mut out = Vec::new();
    for x in c
        .base_generators
        .iter()
        .map(|b| &b.matrix)
        .chain(&c.stable_letters)
    {
        out.push(x.clone());
        out.push(x.inverse()?);
    }
    Ok(out)
}

/// Uniform levels, halved each round until the cusp horoballs, their images
/// under the generators and (for integral configurations) all of their
/// translates are D apart.
pub fn plan_horoballs(m: &Model, g: &Group, d: f64) -> Result<HoroballPlan, GeomError> {
    let lattice = integral(g);
    let images = generator_images(g)?;
    let mut level = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());
    for rounds in 0..=MAX_ROUNDS {
        let balls: Vec<Horoball> = g
            .config()
            .cusps
            .iter()
            .map(|c| Horoball::new(m.form(), c.point.clone(), level.clone()))
            .collect::<Result<_, _>>()?;
        let mut pairwise = Vec::new();
        for i in 0..balls.len() {
            for j in i + 1..balls.len() {
                let dist = horoball_distance(m, &balls[i], &balls[j])?;
                pairwise.push(PairDistance {
                    i,
                    j,
                    distance: dist.to_f64(),
                });
            }
        }
        let mut family: Vec<Horoball> = balls.clone();
        for b in &balls {
            for x in &images {
                let h = b.image(x)?;
                if !family.iter().any(|f| proportional(&f.center, &h.center)) {
                    family.push(h);
                }
            }
        }
        let mut images_ok = true;
        'outer: for i in 0..family.len() {
            for j in (i + 1).max(balls.len())..family.len() {
                if horoball_distance(m, &family[i], &family[j])?.to_f64() < d {
                    images_ok = false;
                    break 'outer;
                }
            }
        }
        let lattice_bound = lattice.then(|| {
            let two = m.from_rational(&(&level * &level * BigRational::from_integer(2.into())));
            two.recip().ln().to_f64()
        });
        let ok = images_ok
            && pairwise.iter().all(|p| p.distance >= d)
            && lattice_bound.is_none_or(|b| b >= d);
        if ok {
            return Ok(HoroballPlan {
                balls,
                rounds,
                pairwise,
                lattice_bound,
            });
        }
        level = &level * &half;
    }
    Err(GeomError::Degenerate(format!(
        "horoballs still closer than {d} after {MAX_ROUNDS} rounds"
    )))
}

#[derive(Debug, Clone)]
pub struct PoweredGroup {
    pub group: Group,
    pub plan: HoroballPlan,
    pub powers: Vec<PowerChoice>,
}

/// Plans the horoballs and replaces every stable letter p_i by p_i^{j_i}.
pub fn power_stable_letters(m: &Model, g: &Group, d: f64) -> Result<PoweredGroup, GeomError> {
    let plan = plan_horoballs(m, g, d)?;
    let plane = &g.config().subform_indices;
    let mut powers = Vec::new();
    let mut stables = Vec::new();
    for (i, t) in g.config().stable_letters.iter().enumerate() {
        let c = choose_power(m, t, &plan.balls[i], plane, d)?;
        stables.push(t.pow(c.power as i64)?);
        powers.push(c);
    }
    Ok(PoweredGroup {
        group: g.with_stable_letters(stables)?,
        plan,
        powers,
    })
}
