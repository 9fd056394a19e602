use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("integration step must be positive, got {0}")]
    BadStep(f64),
    #[error("non-finite state at t = {0}")]
    NonFinite(f64),
    #[error("vector field evaluation failed at t = {t}: {reason}")]
    Field { t: f64, reason: String },
}

/// A time-dependent vector field `f(t, x, out)`. Errors abort the integration.
pub trait VectorField {
    fn eval(&mut self, t: f64, x: &[f64], out: &mut [f64]) -> Result<(), FlowError>;
}

impl<F> VectorField for F
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), FlowError>,
{
    fn eval(&mut self, t: f64, x: &[f64], out: &mut [f64]) -> Result<(), FlowError> {
        self(t, x, out)
    }
}

/// Classical fourth-order Runge–Kutta with a fixed step, reusable scratch buffers.
pub struct FlowStepper {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl FlowStepper {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    /// Advances `x` from `t` to `t + h` in place.
    pub fn step<F: VectorField>(&mut self, field: &mut F, t: f64, h: f64, x: &mut [f64]) -> Result<(), FlowError> {
        let d = x.len();
        field.eval(t, x, &mut self.k1)?;
        for i in 0..d {
            self.tmp[i] = x[i] + 0.5 * h * self.k1[i];
        }
        field.eval(t + 0.5 * h, &self.tmp, &mut self.k2)?;
        for i in 0..d {
            self.tmp[i] = x[i] + 0.5 * h * self.k2[i];
        }
        field.eval(t + 0.5 * h, &self.tmp, &mut self.k3)?;
        for i in 0..d {
            self.tmp[i] = x[i] + h * self.k3[i];
        }
        field.eval(t + h, &self.tmp, &mut self.k4)?;
        for i in 0..d {
            x[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(FlowError::NonFinite(t + h));
        }
        Ok(())
    }

    /// Integrates from `t0` to `t1` (either direction) with `ceil(|t1 − t0| / step)` equal steps.
    pub fn integrate<F: VectorField>(
        &mut self,
        field: &mut F,
        x: &mut [f64],
        t0: f64,
        t1: f64,
        step: f64,
    ) -> Result<(), FlowError> {
        if !(step > 0.0) {
            return Err(FlowError::BadStep(step));
        }
        let span = t1 - t0;
        if span == 0.0 {
            return Ok(());
        }
        let m = (span.abs() / step).ceil().max(1.0) as usize;
        let h = span / m as f64;
        for i in 0..m {
            self.step(field, t0 + i as f64 * h, h, x)?;
        }
        Ok(())
    }
}

pub fn integrate_flow<F: VectorField>(
    mut field: F,
    x0: &[f64],
    t0: f64,
    t1: f64,
    step: f64,
) -> Result<Vec<f64>, FlowError> {
    let mut x = x0.to_vec();
    FlowStepper::new(x0.len()).integrate(&mut field, &mut x, t0, t1, step)?;
    Ok(x)
}
