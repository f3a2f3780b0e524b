//! Chip-firing dynamics: stabilization, recurrence, and the
//! superstable normal forms.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A chip configuration on the nonsink vertices.
pub type Config = Vec<i64>;
/// A firing script: how many times each nonsink vertex fires.
pub type Script = Vec<i64>;

pub fn degree(c: &[i64]) -> i64 {
    c.iter().sum()
}

fn check_len(g: &Graph, c: &[i64]) -> Result<()> {
    if c.len() != g.n() {
        return Err(Error::invalid(format!(
            "configuration has {} entries, graph has {} nonsink vertices",
            c.len(),
            g.n()
        )));
    }
    Ok(())
}

/// Subtract `times` copies of reduced-Laplacian column `v` from `c`.
fn fire_vertex(g: &Graph, c: &mut [i64], v: usize, times: i64) {
    let n = g.n();
    c[v] -= times * (g.outdeg(v) - g.wt(v, v));
    for u in 0..n {
        if u != v {
            c[u] += times * g.wt(v, u);
        }
    }
}

/// Apply a firing script: `c - reduced_laplacian * sigma`.  The result
/// may be negative; callers check legality themselves.
pub fn fire(g: &Graph, c: &[i64], sigma: &[i64]) -> Result<Config> {
    check_len(g, c)?;
    check_len(g, sigma)?;
    let mut out = c.to_vec();
    for v in 0..g.n() {
        if sigma[v] != 0 {
            fire_vertex(g, &mut out, v, sigma[v]);
        }
    }
    Ok(out)
}

/// The maximal stable configuration: `outdeg(v) - 1` everywhere.
pub fn max_stable(g: &Graph) -> Config {
    (0..g.n()).map(|v| g.outdeg(v) - 1).collect()
}

pub fn is_stable(g: &Graph, c: &[i64]) -> bool {
    (0..g.n()).all(|v| c[v] < g.outdeg(v))
}

/// Stabilize a nonnegative configuration.  Returns the unique stable
/// result together with the firing script.
///
/// Uses a FIFO worklist and fires each popped vertex
/// `floor(c_v / outdeg(v))` times at once.
pub fn stabilize(g: &Graph, c: &[i64]) -> Result<(Config, Script)> {
    check_len(g, c)?;
    if c.iter().any(|&x| x < 0) {
        return Err(Error::invalid("stabilize requires a nonnegative configuration"));
    }
    let n = g.n();
    let mut cur = c.to_vec();
    let mut script = vec![0i64; n];
    let mut queued = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    for v in 0..n {
        if cur[v] >= g.outdeg(v) {
            queue.push_back(v);
            queued[v] = true;
        }
    }
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        let deg = g.outdeg(v);
        let times = cur[v].div_euclid(deg);
        if times <= 0 {
            continue;
        }
        fire_vertex(g, &mut cur, v, times);
        script[v] += times;
        for u in 0..n {
            if cur[u] >= g.outdeg(u) && !queued[u] {
                queue.push_back(u);
                queued[u] = true;
            }
        }
        // A loop or a large backfeed can leave v itself still unstable.
        if cur[v] >= deg && !queued[v] {
            queue.push_back(v);
            queued[v] = true;
        }
    }
    debug_assert!(is_stable(g, &cur));
    Ok((cur, script))
}

/// Stable addition: `(a + b)` stabilized.
pub fn stable_add(g: &Graph, a: &[i64], b: &[i64]) -> Result<Config> {
    check_len(g, a)?;
    check_len(g, b)?;
    let sum: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    Ok(stabilize(g, &sum)?.0)
}

/// The minimal burning configuration and its script.
///
/// Start from the sum of the reduced Laplacian columns (script of all
/// ones); while some entry is negative, add that vertex's column once
/// more.  Terminates because the sink is globally accessible.
pub fn min_burning_config(g: &Graph) -> (Config, Script) {
    let n = g.n();
    let cols = g.reduced_laplacian_cols();
    let mut b = vec![0i64; n];
    let mut script = vec![1i64; n];
    for v in 0..n {
        for u in 0..n {
            b[u] += cols[v][u];
        }
    }
    loop {
        let Some(v) = (0..n).find(|&v| b[v] < 0) else {
            return (b, script);
        };
        for u in 0..n {
            b[u] += cols[v][u];
        }
        script[v] += 1;
    }
}

/// Burning test: a stable nonnegative configuration is recurrent iff
/// adding the minimal burning configuration and stabilizing returns it.
pub fn is_recurrent(g: &Graph, c: &[i64]) -> Result<bool> {
    check_len(g, c)?;
    if c.iter().any(|&x| x < 0) || !is_stable(g, c) {
        return Err(Error::invalid("recurrence test needs a stable nonnegative configuration"));
    }
    let (b, _) = min_burning_config(g);
    Ok(stable_add(g, c, &b)? == c)
}

/// The identity of the sandpile group on recurrent configurations.
pub fn identity(g: &Graph) -> Result<Config> {
    let cmax = max_stable(g);
    let double: Vec<i64> = cmax.iter().map(|x| 2 * x).collect();
    let reduced = stabilize(g, &double)?.0;
    let diff: Vec<i64> = cmax.iter().zip(&reduced).map(|(m, r)| m - r).collect();
    stable_add(g, &diff, &cmax)
}

/// Enumerate nonzero scripts `0 < sigma <= bound` in graded
/// lexicographic order of total size.
pub(crate) fn scripts_in_box(bound: &[i64]) -> Vec<Script> {
    let mut all = vec![vec![]];
    for &b in bound {
        let mut next = Vec::new();
        for s in &all {
            for x in 0..=b {
                let mut t = s.clone();
                t.push(x);
                next.push(t);
            }
        }
        all = next;
    }
    all.retain(|s| s.iter().any(|&x| x > 0));
    all.sort_by_key(|s| s.iter().sum::<i64>());
    all
}

/// Find a legal nonzero script bounded by the burning script, if any.
fn legal_script(g: &Graph, c: &[i64], box_scripts: &[Script]) -> Option<Script> {
    for sigma in box_scripts {
        let fired = fire(g, c, sigma).expect("lengths checked");
        if fired.iter().all(|&x| x >= 0) {
            return Some(sigma.clone());
        }
    }
    None
}

/// Is `c` superstable (no legal nonzero script firing)?
///
/// Only scripts bounded by the burning script need checking: they are
/// exactly the exponents of the Groebner generators of the toppling
/// ideal, so one of them is legal whenever any script is.
pub fn is_superstable(g: &Graph, c: &[i64]) -> Result<bool> {
    check_len(g, c)?;
    if c.iter().any(|&x| x < 0) {
        return Err(Error::invalid("superstability is defined for nonnegative configurations"));
    }
    let (_, sigma_b) = min_burning_config(g);
    let box_scripts = scripts_in_box(&sigma_b);
    Ok(legal_script(g, c, &box_scripts).is_none())
}

/// Reduce `c` to the unique superstable configuration in its class.
/// Returns the result and the total script fired.
pub fn superstabilize(g: &Graph, c: &[i64]) -> Result<(Config, Script)> {
    check_len(g, c)?;
    if c.iter().any(|&x| x < 0) {
        return Err(Error::invalid("superstabilize requires a nonnegative configuration"));
    }
    let (_, sigma_b) = min_burning_config(g);
    let box_scripts = scripts_in_box(&sigma_b);
    let mut cur = c.to_vec();
    let mut total = vec![0i64; g.n()];
    while let Some(sigma) = legal_script(g, &cur, &box_scripts) {
        cur = fire(g, &cur, &sigma)?;
        for v in 0..g.n() {
            total[v] += sigma[v];
        }
    }
    Ok((cur, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn max_stable_running_example() {
        let g = running_example();
        assert_eq!(max_stable(&g), vec![3, 3, 4]);
    }

    #[test]
    fn stabilize_running_example() {
        let g = running_example();
        let (stable, script) = stabilize(&g, &[6, 6, 8]).unwrap();
        assert_eq!(stable, vec![2, 0, 4]);
        // verify the script reproduces the result through plain firing
        assert_eq!(fire(&g, &[6, 6, 8], &script).unwrap(), stable);
    }

    #[test]
    fn stabilize_rejects_negative() {
        let g = running_example();
        assert!(stabilize(&g, &[-1, 0, 0]).is_err());
        assert!(stabilize(&g, &[1, 1]).is_err());
    }

    #[test]
    fn burning_config_running_example() {
        let g = running_example();
        let (b, script) = min_burning_config(&g);
        assert_eq!(b, vec![0, 0, 3]);
        assert_eq!(script, vec![2, 1, 2]);
    }

    #[test]
    fn burning_config_square_example() {
        let g = square_example();
        let (b, script) = min_burning_config(&g);
        assert_eq!(b, vec![0, 1, 2]);
        assert_eq!(script, vec![1, 2, 1]);
    }

    #[test]
    fn burning_config_undirected_matches_sink_edges() {
        for g in [diamond(), triangle()] {
            let (b, script) = min_burning_config(&g);
            let expect: Vec<i64> = (0..g.n()).map(|v| g.wt(g.sink(), v)).collect();
            assert_eq!(b, expect);
            assert_eq!(script, vec![1; g.n()]);
        }
    }

    #[test]
    fn identity_running_example() {
        let g = running_example();
        let id = identity(&g).unwrap();
        assert_eq!(id, vec![3, 1, 4]);
        assert!(is_recurrent(&g, &id).unwrap());
        // identity is neutral on a recurrent element
        let r = stable_add(&g, &max_stable(&g), &[0, 0, 0]).unwrap();
        assert_eq!(stable_add(&g, &r, &id).unwrap(), r);
    }

    #[test]
    fn identity_on_tree_is_zero() {
        let g = directed_path3();
        assert_eq!(identity(&g).unwrap(), vec![0, 0]);
    }

    #[test]
    fn recurrent_examples() {
        let g = running_example();
        assert!(is_recurrent(&g, &max_stable(&g)).unwrap());
        assert!(is_recurrent(&g, &[2, 0, 4]).unwrap());
        assert!(!is_recurrent(&g, &[0, 0, 0]).unwrap());
        assert!(is_recurrent(&g, &[4, 0, 0]).is_err()); // unstable input
    }

    #[test]
    fn superstable_duality_spot_checks() {
        let g = diamond();
        for c in [[0, 0, 0], [1, 0, 1], [0, 2, 0]] {
            let cmax = max_stable(&g);
            let dual: Vec<i64> = cmax.iter().zip(c.iter()).map(|(m, x)| m - x).collect();
            assert_eq!(
                is_superstable(&g, &c).unwrap(),
                is_recurrent(&g, &dual).unwrap()
            );
        }
    }

    #[test]
    fn superstabilize_fixes_superstables() {
        let g = diamond();
        let (out, script) = superstabilize(&g, &[0, 1, 1]).unwrap();
        assert!(is_superstable(&g, &out).unwrap());
        assert_eq!(fire(&g, &[0, 1, 1], &script).unwrap(), out);
        let (again, zero) = superstabilize(&g, &out).unwrap();
        assert_eq!(again, out);
        assert_eq!(zero, vec![0; 3]);
    }
}
