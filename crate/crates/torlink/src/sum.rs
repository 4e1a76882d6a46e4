//! Deterministic pairwise-tree summation.
//!
//! Quadrature cells are evaluated in parallel, collected in index order and
//! reduced with a fixed tree so the result is identical for any thread
//! count.

pub fn tree_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let mid = n / 2;
            tree_sum(&values[..mid]) + tree_sum(&values[mid..])
        }
    }
}

pub fn tree_sum_by<T, F: Fn(&T) -> f64>(items: &[T], f: F) -> f64 {
    fn go<T, F: Fn(&T) -> f64>(items: &[T], f: &F) -> f64 {
        match items.len() {
            0 => 0.0,
            1 => f(&items[0]),
            n => {
                let mid = n / 2;
                go(&items[..mid], f) + go(&items[mid..], f)
            }
        }
    }
    go(items, &f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_sequential_on_exact_inputs() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(tree_sum(&v), 499500.0);
        assert_eq!(tree_sum(&[]), 0.0);
        assert_eq!(tree_sum(&[3.5]), 3.5);
    }

    #[test]
    fn order_of_association_is_fixed() {
        // Summing a value and its negation placed symmetrically cancels.
        let v = vec![0.1, -0.1, 0.2, -0.2];
        assert_eq!(tree_sum(&v), 0.0);
    }
}
