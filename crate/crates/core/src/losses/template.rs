use serde::{Deserialize, Serialize};

use crate::template::{PatchCollection, Template};
use crate::vec3::Vec3;

use super::LossError;

/// Exponential decay `gamma^(t / period)` of the template term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecaySchedule {
    pub gamma: f64,
    pub period: f64,
    /// Iteration counter.
    pub t: f64,
}

impl Default for DecaySchedule {
    fn default() -> Self {
        DecaySchedule {
            gamma: 0.4,
            period: 600.0,
            t: 0.0,
        }
    }
}

impl DecaySchedule {
    pub fn at(self, t: usize) -> Self {
        DecaySchedule { t: t as f64, ..self }
    }

    pub fn weight(&self) -> f64 {
        self.gamma.powf(self.t / self.period)
    }

    pub fn is_valid(&self) -> bool {
        self.gamma > 0.0 && self.gamma < 1.0 && self.period > 0.0 && self.t >= 0.0
    }
}

/// Decayed squared deviation from the rest pose, each point counted once
/// per patch that references it.
pub fn template_loss(pc: &PatchCollection, template: &Template, sched: &DecaySchedule) -> Result<(f64, Vec<Vec3>), LossError> {
    if pc.points.len() != template.points.len() {
        return Err(LossError::PointCount {
            expected: template.points.len(),
            got: pc.points.len(),
        });
    }
    let w = sched.weight();
    let mult = template.multiplicity();
    let mut value = 0.0;
    let mut grad = Vec::with_capacity(pc.points.len());
    for ((p, t), m) in pc.points.iter().zip(&template.points).zip(&mult) {
        let d = *p - *t;
        value += *m as f64 * d.norm_squared();
        grad.push(d * (2.0 * w * *m as f64));
    }
    Ok((w * value, grad))
}
