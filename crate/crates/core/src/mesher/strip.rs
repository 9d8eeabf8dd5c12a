//! Triangulating the band between two vertex chains.

/// Triangulates the strip between a lower chain and an upper chain, both
/// running left to right with increasing parameters. Triangles are
/// `(lower_i, lower_{i+1}, upper_j)` or `(lower_i, upper_{j+1}, upper_j)`,
/// counterclockwise when "up" is to the left of the direction of travel.
///
/// At each step the chain whose next vertex has the smaller parameter
/// advances. Parameters within `tie` of each other fall back to `shorter`,
/// which gets `(lower_i, upper_{j+1}, lower_{i+1}, upper_j)` and returns true
/// when the diagonal `lower_i -- upper_{j+1}` should be used. When the
/// chosen triangle fails `valid` and the other one passes, the other wins.
pub fn stitch<F, G>(
    lower: &[(usize, f64)],
    upper: &[(usize, f64)],
    tie: f64,
    mut shorter: F,
    mut valid: G,
    out: &mut Vec<[usize; 3]>,
) where
    F: FnMut(usize, usize, usize, usize) -> bool,
    G: FnMut(usize, usize, usize) -> bool,
{
    assert!(!lower.is_empty() && !upper.is_empty() && lower.len() + upper.len() >= 3);
    let (mut i, mut j) = (0, 0);
    while i + 1 < lower.len() || j + 1 < upper.len() {
        let advance_lower = if i + 1 == lower.len() {
            false
        } else if j + 1 == upper.len() {
            true
        } else {
            let (pl, pu) = (lower[i + 1].1, upper[j + 1].1);
            let pick = if (pl - pu).abs() <= tie {
                !shorter(lower[i].0, upper[j + 1].0, lower[i + 1].0, upper[j].0)
            } else {
                pl < pu
            };
            let by_lower = valid(lower[i].0, lower[i + 1].0, upper[j].0);
            let by_upper = valid(lower[i].0, upper[j + 1].0, upper[j].0);
            if pick {
                by_lower || !by_upper
            } else {
                by_lower && !by_upper
            }
        };
        if advance_lower {
            out.push([lower[i].0, lower[i + 1].0, upper[j].0]);
            i += 1;
        } else {
            out.push([lower[i].0, upper[j + 1].0, upper[j].0]);
            j += 1;
        }
    }
}

/// Closed-loop version: both chains are cycles with parameters in `[0, 1)`
/// starting at 0; the seam at parameter 1 joins back to the first vertices.
pub fn stitch_cyclic<F>(lower: &[usize], upper: &[usize], shorter: F, out: &mut Vec<[usize; 3]>)
where
    F: FnMut(usize, usize, usize, usize) -> bool,
{
    let wrap = |c: &[usize]| -> Vec<(usize, f64)> {
        let n = c.len() as f64;
        c.iter()
            .enumerate()
            .map(|(k, &v)| (v, k as f64 / n))
            .chain(std::iter::once((c[0], 1.0)))
            .collect()
    };
    let (lo, up) = (wrap(lower), wrap(upper));
    stitch(&lo, &up, 1e-12, shorter, |_, _, _| true, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_counts() {
        let lower: Vec<_> = (0..5).map(|k| (k, k as f64 / 4.0)).collect();
        let upper: Vec<_> = (5..8).map(|k| (k, (k - 5) as f64 / 2.0)).collect();
        let mut t = Vec::new();
        stitch(&lower, &upper, 1e-12, |_, _, _, _| true, |_, _, _| true, &mut t);
        assert_eq!(t.len(), 4 + 2);
        let mut c = Vec::new();
        stitch_cyclic(&[0, 1, 2, 3, 4, 5, 6, 7], &[8, 9, 10, 11], |_, _, _, _| true, &mut c);
        assert_eq!(c.len(), 12);
    }

    #[test]
    fn fan_to_apex() {
        let lower: Vec<_> = (0..4).map(|k| (k, k as f64)).collect();
        let mut t = Vec::new();
        stitch(&lower, &[(9, 1.5)], 0.0, |_, _, _, _| true, |_, _, _| true, &mut t);
        assert_eq!(t, vec![[0, 1, 9], [1, 2, 9], [2, 3, 9]]);
    }
}
