//! Five-point explicit update for the two-dimensional heat equation.

/// One forward-Euler sweep over the interior of an `(m + 2) x (n + 2)`
/// row-major buffer.
///
/// Interior cells are rows `1..=m`, columns `1..=n`; the surrounding ring
/// holds boundary or halo values and is read, never written. The neighbor sum
/// groups as `(up + down) + (left + right)` so that a uniform field is a
/// bitwise fixed point: each pairwise sum of equal values and the final
/// doubling are exact, as is `4.0 * c`, leaving an update term of exactly
/// zero.
pub fn step_interior(cur: &[f64], next: &mut [f64], m: usize, n: usize, r: f64) {
    let w = n + 2;
    assert_eq!(cur.len(), (m + 2) * w, "buffer does not match {m}x{n} tile");
    assert_eq!(next.len(), (m + 2) * w, "buffer does not match {m}x{n} tile");
    for i in 1..=m {
        for j in 1..=n {
            let c = i * w + j;
            let vertical = cur[c - w] + cur[c + w];
            let horizontal = cur[c - 1] + cur[c + 1];
            next[c] = cur[c] + r * (vertical + horizontal - 4.0 * cur[c]);
        }
    }
}
