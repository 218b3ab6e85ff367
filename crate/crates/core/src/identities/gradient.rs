//! Gradient of the reduced equation at `f = 0` and its vanishing locus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::qmatrix::reduced_equation;
use super::IdentityError;
use crate::fields::Polynomial;
use crate::scalar::C64;

#[derive(Debug, Clone, Serialize)]
pub struct Partial {
    pub var: String,
    pub poly: String,
    /// Variables with a nonzero coefficient in this partial.
    pub support: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradientReport {
    pub n: usize,
    pub reduced_digest: String,
    pub partials: Vec<Partial>,
    /// Every partial at `f = 0` is a homogeneous linear form.
    pub linear: bool,
    /// Variables in the order the triangular system forces them to zero.
    pub forcing_order: Vec<String>,
    pub symbolic_pass: bool,
    pub samples: usize,
    pub min_gradient_norm: f64,
    pub sample_pass: bool,
}

impl GradientReport {
    pub fn passes(&self) -> bool {
        self.linear && self.symbolic_pass && self.sample_pass
    }
}

fn is_linear_form(p: &Polynomial) -> bool {
    p.terms().all(|(m, _)| m.iter().sum::<u32>() == 1)
}

/// Checks that at `f = 0` the gradient of `Q̃` in the middle variables
/// vanishes only where all of them vanish.
///
/// Symbolically: the partials are linear forms, and repeatedly picking an
/// equation with exactly one variable not yet forced to zero forces every
/// variable. Numerically: `samples` random nonzero points have nonzero
/// gradient.
pub fn gradient_singularity_check(n: usize, samples: usize, seed: u64) -> Result<GradientReport, IdentityError> {
    let red = reduced_equation(n)?;
    let at_zero = red.reduced.coefficient_of("f", 0);
    let mids = red.mid_vars();
    let grads: Vec<Polynomial> = mids.iter().map(|v| at_zero.partial_derivative(v)).collect();

    let partials: Vec<Partial> = mids
        .iter()
        .zip(&grads)
        .map(|(v, g)| Partial {
            var: v.clone(),
            poly: g.to_string(),
            support: mids
                .iter()
                .filter(|w| !num_traits::Zero::is_zero(&g.coefficient_of(w, 1)))
                .cloned()
                .collect(),
        })
        .collect();
    let linear = grads.iter().all(is_linear_form);

    let mut forced: Vec<String> = Vec::new();
    loop {
        let next = partials.iter().find_map(|p| {
            let open: Vec<&String> = p.support.iter().filter(|v| !forced.contains(v)).collect();
            (open.len() == 1).then(|| open[0].clone())
        });
        match next {
            Some(v) => forced.push(v),
            None => break,
        }
    }
    let symbolic_pass = linear && forced.len() == mids.len();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_norm = f64::INFINITY;
    for _ in 0..samples {
        let mut point: Vec<C64> = mids
            .iter()
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        point.push(C64::new(0.0, 0.0));
        let norm = grads
            .iter()
            .map(|g| g.align_to(&red.vars).evaluate(&point).map(|v| v.norm_sqr()))
            .sum::<Result<f64, _>>()?
            .sqrt();
        min_norm = min_norm.min(norm);
    }
    let sample_pass = samples == 0 || min_norm > 1e-12;

    Ok(GradientReport {
        n,
        reduced_digest: red.reduced.digest(),
        partials,
        linear,
        forcing_order: forced,
        symbolic_pass,
        samples,
        min_gradient_norm: if samples == 0 { 0.0 } else { min_norm },
        sample_pass,
    })
}
