//! Helpers for the probability simplex: lattice enumeration, projection and
//! normalization. Both price vectors and Cobb-Douglas exponent vectors live here.

/// All points of the simplex in `dim` dimensions whose coordinates are
/// multiples of `1 / (resolution - 1)`, in lexicographic order of the
/// integer coordinates.
pub fn lattice(dim: usize, resolution: usize) -> Vec<Vec<f64>> {
    assert!(dim >= 1);
    assert!(resolution >= 2, "resolution must be at least 2");
    let total = resolution - 1;
    let mut out = Vec::new();
    let mut counts = vec![0usize; dim];
    fill(&mut counts, 0, total, &mut |c| {
        out.push(c.iter().map(|&k| k as f64 / total as f64).collect());
    });
    out
}

fn fill(counts: &mut [usize], pos: usize, remaining: usize, emit: &mut impl FnMut(&[usize])) {
    if pos == counts.len() - 1 {
        counts[pos] = remaining;
        emit(counts);
        return;
    }
    for k in 0..=remaining {
        counts[pos] = k;
        fill(counts, pos + 1, remaining - k, emit);
    }
}

/// Number of lattice points, `C(resolution - 2 + dim, dim - 1)`.
pub fn lattice_len(dim: usize, resolution: usize) -> usize {
    let n = resolution - 1 + dim - 1;
    let k = dim - 1;
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Euclidean projection onto `{x >= 0, sum x = 1}` (sort-based).
pub fn project(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumulative += uk;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Scales a nonnegative vector to sum to one. Returns `None` for a zero vector.
pub fn normalize(v: &[f64]) -> Option<Vec<f64>> {
    let s: f64 = v.iter().sum();
    if s > 0.0 && s.is_finite() {
        Some(v.iter().map(|x| x / s).collect())
    } else {
        None
    }
}

/// Ratios `v_j / v_0`; `None` when `v_0` is zero.
pub fn ratios_to_first(v: &[f64]) -> Option<Vec<f64>> {
    let first = *v.first()?;
    if first == 0.0 {
        return None;
    }
    Some(v.iter().map(|x| x / first).collect())
}

/// Directions `e_j - e_k` for all ordered pairs `j != k`; these positively
/// span the tangent space of the simplex.
pub fn transfer_directions(dim: usize) -> Vec<(usize, usize)> {
    let mut dirs = Vec::with_capacity(dim * dim.saturating_sub(1));
    for j in 0..dim {
        for k in 0..dim {
            if j != k {
                dirs.push((j, k));
            }
        }
    }
    dirs
}

/// Moves `step` of mass from coordinate `from` to coordinate `to`, clipping
/// at the boundary. Returns `None` when no mass can move.
pub fn transfer(x: &[f64], to: usize, from: usize, step: f64) -> Option<Vec<f64>> {
    let amount = step.min(x[from]);
    if amount <= 0.0 {
        return None;
    }
    let mut y = x.to_vec();
    y[from] -= amount;
    y[to] += amount;
    if y[from] < 0.0 {
        y[from] = 0.0;
    }
    normalize(&y)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}
