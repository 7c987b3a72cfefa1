use crate::error::{Error, Result};
use crate::store::Label;

fn check_lengths(context: &'static str, a: usize, b: usize) -> Result<()> {
    if a == 0 || b == 0 {
        return Err(Error::Empty(context));
    }
    if a != b {
        return Err(Error::LengthMismatch {
            context,
            left: a,
            right: b,
        });
    }
    Ok(())
}

/// `max(0, 1 - y * pred)` for a single sample.
#[inline]
pub fn hinge(prediction: f64, label: Label) -> f64 {
    (1.0 - label.sign() * prediction).max(0.0)
}

/// Mean hinge loss.
pub fn hinge_loss(predictions: &[f64], labels: &[Label]) -> Result<f64> {
    check_lengths("hinge_loss", predictions.len(), labels.len())?;
    let total: f64 = predictions
        .iter()
        .zip(labels)
        .map(|(&p, &y)| hinge(p, y))
        .sum();
    Ok(total / predictions.len() as f64)
}

/// Smooth-L1 with the knee at 1: `0.5 x^2` inside, `|x| - 0.5` outside.
#[inline]
pub fn smooth_l1(x: f64) -> f64 {
    let a = x.abs();
    if a < 1.0 {
        0.5 * x * x
    } else {
        a - 0.5
    }
}

/// Derivative of [`smooth_l1`].
#[inline]
pub fn smooth_l1_grad(x: f64) -> f64 {
    if x.abs() < 1.0 {
        x
    } else {
        x.signum()
    }
}

/// Mean Smooth-L1 of the residuals `prediction - target`.
pub fn smooth_l1_loss(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    check_lengths("smooth_l1_loss", predictions.len(), targets.len())?;
    let total: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(&p, &t)| smooth_l1(p - t))
        .sum();
    Ok(total / predictions.len() as f64)
}

/// Mean epsilon-insensitive loss `max(0, |pred - target| - eps)`.
pub fn epsilon_insensitive_loss(predictions: &[f64], targets: &[f64], epsilon: f64) -> Result<f64> {
    check_lengths("epsilon_insensitive_loss", predictions.len(), targets.len())?;
    let total: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(&p, &t)| ((p - t).abs() - epsilon).max(0.0))
        .sum();
    Ok(total / predictions.len() as f64)
}
