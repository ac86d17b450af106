//! Graded enumeration helpers.

use alloc::vec::Vec;

/// All multisets of item indices (as non-decreasing index lists) whose
/// weights sum to `target` and whose degrees sum to at most `max_degree`.
///
/// Items are `(payload, weight, degree)`; every weight must be positive.
pub fn weighted_multisets<T>(items: &[(T, u32, u32)], target: u32, max_degree: u32) -> Vec<Vec<usize>> {
    fn rec<T>(
        items: &[(T, u32, u32)],
        start: usize,
        remaining: u32,
        degree_left: u32,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for i in start..items.len() {
            let (_, w, d) = &items[i];
            assert!(*w > 0, "zero-weight item in graded enumeration");
            if *w > remaining || *d > degree_left {
                continue;
            }
            current.push(i);
            rec(items, i, remaining - w, degree_left - d, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, 0, target, max_degree, &mut Vec::new(), &mut out);
    out
}
