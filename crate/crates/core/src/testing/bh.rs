use crate::error::{Error, Result};

/// Benjamini–Hochberg step-up decisions, `true` meaning reject.
///
/// Sorting is stable, so tied p-values keep their input order.
pub fn bh_correct(p_values: &[f64], alpha: f64) -> Result<Vec<bool>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if let Some(p) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidArgument(format!("p-value {p} outside [0, 1]")));
    }
    let m = p_values.len();
    let order = sorted_order(p_values);
    let cutoff = order
        .iter()
        .enumerate()
        .rev()
        .find(|&(i, &j)| p_values[j] <= bh_line(i + 1, m, alpha))
        .map_or(0, |(i, _)| i + 1);
    let mut reject = vec![false; m];
    for &j in &order[..cutoff] {
        reject[j] = true;
    }
    Ok(reject)
}

/// The BH threshold `i α / m` for rank `i` (1-based).
pub fn bh_line(rank: usize, m: usize, alpha: f64) -> f64 {
    rank as f64 * alpha / m as f64
}

pub(crate) fn sorted_order(p_values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p_values.len()).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_example() {
        let r = bh_correct(&[0.01, 0.02, 0.04, 0.5], 0.05).unwrap();
        assert_eq!(r, vec![true, true, false, false]);
        let r = bh_correct(&[0.5, 0.04, 0.01, 0.02], 0.05).unwrap();
        assert_eq!(r, vec![false, false, true, true]);
    }

    #[test]
    fn boundaries() {
        assert_eq!(bh_correct(&[1.0; 5], 0.05).unwrap(), vec![false; 5]);
        assert_eq!(bh_correct(&[0.0; 5], 0.05).unwrap(), vec![true; 5]);
        assert!(bh_correct(&[], 0.05).unwrap().is_empty());
        assert!(bh_correct(&[0.1], 0.0).is_err());
        assert!(bh_correct(&[0.1], 1.0).is_err());
        assert!(bh_correct(&[1.5], 0.05).is_err());
    }

    #[test]
    fn step_up_rescues_earlier_ranks() {
        // Rank 1 misses 0.0125 but rank 4 qualifies, so all four are rejected.
        let r = bh_correct(&[0.02, 0.03, 0.04, 0.05], 0.05).unwrap();
        assert_eq!(r, vec![true; 4]);
    }
}
