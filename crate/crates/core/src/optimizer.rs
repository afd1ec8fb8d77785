//! Nelder-Mead simplex search over the gain triple.

use crate::control::PidGains;
use crate::error::{require, Result};
use crate::objective::ObjectiveSpec;

const DIM: usize = 3;
type Point = [f64; DIM];

/// Anything that assigns a scalar cost to a gain triple.
pub trait Objective {
    fn cost(&self, gains: PidGains) -> f64;
}

impl<F: Fn(PidGains) -> f64> Objective for F {
    fn cost(&self, gains: PidGains) -> f64 {
        self(gains)
    }
}

/// Panics if the spec is invalid; [`tune`] validates it up front.
impl Objective for ObjectiveSpec {
    fn cost(&self, gains: PidGains) -> f64 {
        self.evaluate(gains).expect("objective spec validated before search")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub initial_gains: PidGains,
    pub max_evaluations: usize,
    /// Initial simplex offset as a fraction of each nonzero seed coordinate.
    pub simplex_scale: f64,
    /// Absolute offset for seed coordinates that are exactly zero.
    pub zero_offset: f64,
    /// Stop once `worst - best` cost across the simplex is at most this.
    pub tolerance: f64,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

impl OptimizerConfig {
    pub fn new(initial_gains: PidGains) -> Self {
        Self {
            initial_gains,
            max_evaluations: 2000,
            simplex_scale: 0.05,
            zero_offset: 1.0,
            tolerance: 1e-6,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require(
            self.initial_gains.is_finite(),
            "initial_gains",
            f64::NAN,
            "must be finite",
        )?;
        require(
            self.max_evaluations > DIM,
            "max_evaluations",
            self.max_evaluations as f64,
            "must cover the initial simplex (>= 4)",
        )?;
        require(
            self.simplex_scale.is_finite() && self.simplex_scale > 0.0,
            "simplex_scale",
            self.simplex_scale,
            "must be > 0",
        )?;
        require(
            self.zero_offset.is_finite() && self.zero_offset > 0.0,
            "zero_offset",
            self.zero_offset,
            "must be > 0",
        )?;
        require(
            self.tolerance.is_finite() && self.tolerance > 0.0,
            "tolerance",
            self.tolerance,
            "must be > 0",
        )?;
        require(self.reflection > 0.0, "reflection", self.reflection, "must be > 0")?;
        require(
            self.expansion > 1.0 && self.expansion > self.reflection,
            "expansion",
            self.expansion,
            "must exceed 1 and the reflection coefficient",
        )?;
        require(
            self.contraction > 0.0 && self.contraction < 1.0,
            "contraction",
            self.contraction,
            "must lie in (0, 1)",
        )?;
        require(
            self.shrink > 0.0 && self.shrink < 1.0,
            "shrink",
            self.shrink,
            "must lie in (0, 1)",
        )
    }

    fn initial_simplex(&self) -> [Point; DIM + 1] {
        let seed = self.initial_gains.to_array();
        let mut simplex = [seed; DIM + 1];
        for (i, vertex) in simplex.iter_mut().skip(1).enumerate() {
            vertex[i] = if seed[i] == 0.0 {
                self.zero_offset
            } else {
                seed[i] * (1.0 + self.simplex_scale)
            };
        }
        simplex
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub best_gains: PidGains,
    pub best_cost: f64,
    pub initial_cost: f64,
    pub evaluation_count: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Best cost after building the simplex and after every iteration.
    pub cost_history: Vec<f64>,
}

/// Validate `spec` and minimize it.
pub fn tune(spec: &ObjectiveSpec, config: &OptimizerConfig) -> Result<TuneResult> {
    spec.validate()?;
    minimize(spec, config)
}

struct Counted<'a, O: ?Sized> {
    objective: &'a O,
    evaluations: usize,
}

impl<O: Objective + ?Sized> Counted<'_, O> {
    fn eval(&mut self, point: &Point) -> f64 {
        self.evaluations += 1;
        let cost = self.objective.cost(PidGains::from(*point));
        // NaN would break the vertex ordering
        if cost.is_nan() {
            f64::INFINITY
        } else {
            cost
        }
    }
}

fn lerp(from: &Point, to: &Point, t: f64) -> Point {
    std::array::from_fn(|i| from[i] + t * (to[i] - from[i]))
}

/// Nelder-Mead with a fixed evaluation budget. The budget is checked before
/// each iteration, so the count may overshoot it by at most one iteration's
/// worth of evaluations beyond the last check.
pub fn minimize<O: Objective + ?Sized>(
    objective: &O,
    config: &OptimizerConfig,
) -> Result<TuneResult> {
    config.validate()?;
    let mut f = Counted {
        objective,
        evaluations: 0,
    };

    let mut simplex: Vec<(Point, f64)> = config
        .initial_simplex()
        .into_iter()
        .map(|p| {
            let c = f.eval(&p);
            (p, c)
        })
        .collect();
    let initial_cost = simplex[0].1;

    // stable sort: equal costs keep their previous relative order
    let order = |s: &mut Vec<(Point, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    order(&mut simplex);

    let mut history = vec![simplex[0].1];
    let mut converged = false;
    let mut iterations = 0;

    loop {
        if simplex[DIM].1 - simplex[0].1 <= config.tolerance {
            converged = true;
            break;
        }
        if f.evaluations >= config.max_evaluations {
            break;
        }
        iterations += 1;

        let mut centroid = [0.0; DIM];
        for (p, _) in &simplex[..DIM] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / DIM as f64;
            }
        }
        let (worst, f_worst) = simplex[DIM];
        let f_best = simplex[0].1;
        let f_second_worst = simplex[DIM - 1].1;

        let reflected = lerp(&centroid, &worst, -config.reflection);
        let f_reflected = f.eval(&reflected);

        let mut replacement = None;
        if f_reflected < f_best {
            let expanded = lerp(&centroid, &worst, -config.reflection * config.expansion);
            let f_expanded = f.eval(&expanded);
            replacement = Some(if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            });
        } else if f_reflected < f_second_worst {
            replacement = Some((reflected, f_reflected));
        } else if f_reflected < f_worst {
            let outside = lerp(&centroid, &reflected, config.contraction);
            let f_outside = f.eval(&outside);
            if f_outside <= f_reflected {
                replacement = Some((outside, f_outside));
            }
        } else {
            let inside = lerp(&centroid, &worst, config.contraction);
            let f_inside = f.eval(&inside);
            if f_inside < f_worst {
                replacement = Some((inside, f_inside));
            }
        }

        match replacement {
            Some(vertex) => simplex[DIM] = vertex,
            None => {
                let best = simplex[0].0;
                for vertex in simplex.iter_mut().skip(1) {
                    vertex.0 = lerp(&best, &vertex.0, config.shrink);
                    vertex.1 = f.eval(&vertex.0);
                }
            }
        }
        order(&mut simplex);
        history.push(simplex[0].1);
    }

    Ok(TuneResult {
        best_gains: PidGains::from(simplex[0].0),
        best_cost: simplex[0].1,
        initial_cost,
        evaluation_count: f.evaluations,
        iterations,
        converged,
        cost_history: history,
    })
}
