use crate::error::{Error, Result};
use crate::store::Label;

/// Good classification rate: fraction of exact label matches.
pub fn gcr(predicted: &[Label], truth: &[Label]) -> Result<f64> {
    if predicted.is_empty() || truth.is_empty() {
        return Err(Error::Empty("gcr"));
    }
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            context: "gcr",
            left: predicted.len(),
            right: truth.len(),
        });
    }
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / predicted.len() as f64)
}

/// Sample Pearson correlation between predicted and true scores.
pub fn lcc(predicted: &[f64], truth: &[f64]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            context: "lcc",
            left: predicted.len(),
            right: truth.len(),
        });
    }
    if predicted.len() < 2 {
        return Err(Error::Config(format!(
            "lcc needs at least 2 pairs, got {}",
            predicted.len()
        )));
    }
    let n = predicted.len() as f64;
    let mp = predicted.iter().sum::<f64>() / n;
    let mt = truth.iter().sum::<f64>() / n;
    let (mut spp, mut stt, mut spt) = (0.0, 0.0, 0.0);
    for (&p, &t) in predicted.iter().zip(truth) {
        let (dp, dt) = (p - mp, t - mt);
        spp += dp * dp;
        stt += dt * dt;
        spt += dp * dt;
    }
    if spp == 0.0 {
        return Err(Error::ZeroVariance("predicted scores"));
    }
    if stt == 0.0 {
        return Err(Error::ZeroVariance("true scores"));
    }
    Ok((spt / (spp.sqrt() * stt.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Label::{High, Low};

    #[test]
    fn gcr_examples() {
        assert_eq!(
            gcr(&[High, High, Low], &[High, Low, Low]).unwrap(),
            2.0 / 3.0
        );
        assert_eq!(gcr(&[Low, High], &[Low, High]).unwrap(), 1.0);
        assert!(matches!(gcr(&[], &[]), Err(Error::Empty(_))));
    }

    #[test]
    fn lcc_examples() {
        assert!((lcc(&[1., 2., 3.], &[2., 4., 6.]).unwrap() - 1.0).abs() < 1e-15);
        assert!((lcc(&[1., 2., 3.], &[3., 2., 1.]).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(
            lcc(&[1., 1., 1.], &[1., 2., 3.]),
            Err(Error::ZeroVariance(_))
        ));
        assert!(matches!(
            lcc(&[1., 2.], &[5., 5.]),
            Err(Error::ZeroVariance(_))
        ));
        assert!(lcc(&[1.], &[1.]).is_err());
    }

    #[test]
    fn lcc_textbook_value() {
        // Oracle: covariance / (std * std), computed independently with
        // sums of products.
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.1, 1.9, 3.2, 3.8];
        let n = 4.0;
        let sx: f64 = x.iter().sum();
        let sy: f64 = y.iter().sum();
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let sxx: f64 = x.iter().map(|a| a * a).sum();
        let syy: f64 = y.iter().map(|b| b * b).sum();
        let expected =
            (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt());
        assert!((lcc(&x, &y).unwrap() - expected).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn lcc_affine_invariance(
            pairs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..40),
            a in 0.1f64..5.0,
            c in -5.0f64..5.0,
        ) {
            let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let base = match lcc(&x, &y) { Ok(r) => r, Err(_) => return Ok(()) };
            prop_assert!((-1.0..=1.0).contains(&base));
            let up: Vec<f64> = x.iter().map(|v| a * v + c).collect();
            let down: Vec<f64> = x.iter().map(|v| -a * v + c).collect();
            prop_assert!((lcc(&up, &y).unwrap() - base).abs() < 1e-12);
            prop_assert!((lcc(&down, &y).unwrap() + base).abs() < 1e-12);
        }
    }
}
