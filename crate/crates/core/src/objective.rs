use crate::types::Bounds;

/// A bounded objective to maximize together with its input-perturbation law:
/// each coordinate is perturbed by an independent draw from
/// `U(-h[i], h[i])`, `h = perturbation_halfwidth()`.
///
/// `value` takes a raw slice because it sits in the Monte-Carlo hot loop;
/// callers guarantee `x.len() == dim()`. It must be finite on the whole of
/// `R^dim`, since perturbed samples may leave the box.
pub trait Objective: Sync {
    fn dim(&self) -> usize;

    fn bounds(&self) -> &Bounds;

    fn perturbation_halfwidth(&self) -> &[f64];

    fn value(&self, x: &[f64]) -> f64;
}

impl<O: Objective + ?Sized> Objective for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn bounds(&self) -> &Bounds {
        (**self).bounds()
    }

    fn perturbation_halfwidth(&self) -> &[f64] {
        (**self).perturbation_halfwidth()
    }

    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
}

/// Wraps a closure as an [`Objective`]; handy for synthetic landscapes.
pub struct FnObjective<F> {
    bounds: Bounds,
    halfwidth: Vec<f64>,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnObjective<F> {
    pub fn new(bounds: Bounds, halfwidth: f64, f: F) -> Self {
        let halfwidth = vec![halfwidth; bounds.dim()];
        FnObjective { bounds, halfwidth, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Objective for FnObjective<F> {
    fn dim(&self) -> usize {
        self.bounds.dim()
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn perturbation_halfwidth(&self) -> &[f64] {
        &self.halfwidth
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}
