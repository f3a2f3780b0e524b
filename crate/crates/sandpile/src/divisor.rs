//! Divisors on sandpile graphs: linear equivalence modulo the full
//! Laplacian lattice, complete linear systems, the rank function with
//! Riemann-Roch, and the correspondences around maximal superstables.

use crate::dynamics::{self, Config};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::group;
use crate::matrix::Lattice;
use crate::Int;

/// A divisor: one integer per vertex, sink last.
pub type Divisor = Vec<i64>;

pub fn degree(d: &[i64]) -> i64 {
    d.iter().sum()
}

fn check_len(g: &Graph, d: &[i64]) -> Result<()> {
    if d.len() != g.num_vertices() {
        return Err(Error::invalid(format!(
            "divisor has {} entries, graph has {} vertices",
            d.len(),
            g.num_vertices()
        )));
    }
    Ok(())
}

/// The principal-divisor lattice: integer column span of the full
/// Laplacian.
pub fn principal_lattice(g: &Graph) -> Lattice<Int> {
    Lattice::from_columns(&g.laplacian())
}

fn equivalent_in(lat: &Lattice<Int>, d1: &[i64], d2: &[i64]) -> bool {
    let diff: Vec<Int> = d1.iter().zip(d2).map(|(a, b)| Int::from(a - b)).collect();
    lat.contains(&diff)
}

pub fn is_equivalent(g: &Graph, d1: &[i64], d2: &[i64]) -> Result<bool> {
    check_len(g, d1)?;
    check_len(g, d2)?;
    Ok(equivalent_in(&principal_lattice(g), d1, d2))
}

/// Visit all effective divisors of the given degree (compositions of
/// `total` into `parts` entries), in lexicographic order.
fn for_each_composition(total: i64, parts: usize, mut f: impl FnMut(&[i64]) -> bool) {
    fn rec(total: i64, idx: usize, cur: &mut Vec<i64>, f: &mut impl FnMut(&[i64]) -> bool) -> bool {
        if idx + 1 == cur.len() {
            cur[idx] = total;
            return f(cur);
        }
        for x in 0..=total {
            cur[idx] = x;
            if !rec(total - x, idx + 1, cur, f) {
                return false;
            }
        }
        true
    }
    if total < 0 || parts == 0 {
        return;
    }
    let mut cur = vec![0i64; parts];
    rec(total, 0, &mut cur, &mut f);
}

fn composition_count(total: i64, parts: usize) -> u128 {
    // C(total + parts - 1, parts - 1)
    let mut c: u128 = 1;
    for i in 0..parts as u128 - 1 {
        c = c * (total as u128 + i + 1) / (i + 1);
    }
    c
}

const LINSYS_CAP: u128 = 20_000_000;

fn linear_system_in(lat: &Lattice<Int>, g: &Graph, d: &[i64]) -> Result<Vec<Divisor>> {
    let deg = degree(d);
    if deg < 0 {
        return Ok(Vec::new());
    }
    let parts = g.num_vertices();
    if composition_count(deg, parts) > LINSYS_CAP {
        return Err(Error::cap(format!(
            "linear system of degree {deg} on {parts} vertices is too large to enumerate"
        )));
    }
    let mut out = Vec::new();
    for_each_composition(deg, parts, |e| {
        if equivalent_in(lat, e, d) {
            out.push(e.to_vec());
        }
        true
    });
    Ok(out)
}

/// The complete linear system |d|: all effective divisors equivalent
/// to d, in lexicographic order.
pub fn linear_system(g: &Graph, d: &[i64]) -> Result<Vec<Divisor>> {
    check_len(g, d)?;
    linear_system_in(&principal_lattice(g), g, d)
}

fn has_effective(lat: &Lattice<Int>, g: &Graph, d: &[i64]) -> Result<bool> {
    let deg = degree(d);
    if deg < 0 {
        return Ok(false);
    }
    let parts = g.num_vertices();
    if composition_count(deg, parts) > LINSYS_CAP {
        return Err(Error::cap(format!(
            "effectivity scan of degree {deg} on {parts} vertices is too large"
        )));
    }
    let mut found = false;
    for_each_composition(deg, parts, |e| {
        if equivalent_in(lat, e, d) {
            found = true;
            return false;
        }
        true
    });
    Ok(found)
}

/// Divisor rank: the largest k such that |d - E| is nonempty for every
/// effective E of degree k; -1 when |d| itself is empty.  Brute force;
/// undirected graphs only.
pub fn rank(g: &Graph, d: &[i64]) -> Result<i64> {
    check_len(g, d)?;
    if !g.is_undirected() {
        return Err(Error::DirectedInput("divisor rank".into()));
    }
    let lat = principal_lattice(g);
    if !has_effective(&lat, g, d)? {
        return Ok(-1);
    }
    let parts = g.num_vertices();
    let mut k = 1i64;
    loop {
        let mut all_ok = true;
        let mut err = None;
        for_each_composition(k, parts, |e| {
            let shifted: Vec<i64> = d.iter().zip(e).map(|(a, b)| a - b).collect();
            match has_effective(&lat, g, &shifted) {
                Ok(true) => true,
                Ok(false) => {
                    all_ok = false;
                    false
                }
                Err(e) => {
                    err = Some(e);
                    false
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if !all_ok {
            return Ok(k - 1);
        }
        k += 1;
        // degree-k effective divisors with k > deg(d) always fail, so
        // this loop is bounded; guard anyway
        if k > degree(d) + 1 {
            return Err(Error::invalid("rank loop failed to terminate"));
        }
    }
}

/// The canonical divisor sum (deg(v) - 2) v of an undirected graph.
pub fn canonical(g: &Graph) -> Result<Divisor> {
    if !g.is_undirected() {
        return Err(Error::DirectedInput("canonical divisor".into()));
    }
    Ok((0..g.num_vertices()).map(|v| g.outdeg(v) - 2).collect())
}

/// r(d) - r(K - d) - (deg d + 1 - g); zero when Riemann-Roch holds.
pub fn riemann_roch_residual(g: &Graph, d: &[i64]) -> Result<i64> {
    check_len(g, d)?;
    let k = canonical(g)?;
    let genus = g.genus()?;
    let kd: Vec<i64> = k.iter().zip(d).map(|(a, b)| a - b).collect();
    Ok(rank(g, d)? - rank(g, &kd)? - (degree(d) + 1 - genus))
}

/// Superstables that are maximal (adding a grain anywhere breaks
/// superstability), sorted by degree then lex.
pub fn maximal_superstables(g: &Graph, max_order: u64) -> Result<Vec<Config>> {
    let all = group::enumerate_superstables(g, max_order)?;
    Ok(all
        .iter()
        .filter(|c| {
            (0..g.n()).all(|v| {
                let mut up = (*c).clone();
                up[v] += 1;
                !all.contains(&up)
            })
        })
        .cloned()
        .collect())
}

/// Nonspecial divisor class representatives c - s for maximal
/// superstables c, each verified to have an empty linear system.
pub fn nonspecial_divisors(g: &Graph, max_order: u64) -> Result<Vec<Divisor>> {
    if !g.is_undirected() {
        return Err(Error::DirectedInput("nonspecial divisors".into()));
    }
    let lat = principal_lattice(g);
    let mut out = Vec::new();
    for c in maximal_superstables(g, max_order)? {
        let mut d: Divisor = c;
        d.push(-1);
        if has_effective(&lat, g, &d)? {
            return Err(Error::invalid(
                "maximal superstable minus sink has an effective representative; internal error",
            ));
        }
        out.push(d);
    }
    Ok(out)
}

/// Recurrent configurations that stop being recurrent when any single
/// grain is removed.  For undirected graphs every one has degree
/// #E - deg(s) (asserted).
pub fn minimal_recurrents(g: &Graph, max_order: u64) -> Result<Vec<Config>> {
    let rec = group::enumerate_recurrents(g, max_order)?;
    let minimal: Vec<Config> = rec
        .iter()
        .filter(|c| {
            (0..g.n()).all(|v| {
                if c[v] == 0 {
                    return true;
                }
                let mut down = (*c).clone();
                down[v] -= 1;
                !rec.contains(&down)
            })
        })
        .cloned()
        .collect();
    if g.is_undirected() {
        let expect = g.num_edges_undirected()? - g.outdeg(g.sink());
        for c in &minimal {
            debug_assert_eq!(dynamics::degree(c), expect, "minimal recurrent degree");
        }
    }
    Ok(minimal)
}

/// One orientation of each undirected edge (pairs listed u -> v).
pub type Orientation = Vec<(usize, usize)>;

const ORIENTATION_CAP: u32 = 24;

/// All acyclic orientations with unique source s, paired with the
/// configuration indeg - 1 on nonsink vertices.  Parallel copies of an
/// edge must share a direction to avoid 2-cycles, so orientation is by
/// vertex pair.
pub fn acyclic_orientations_unique_source(g: &Graph) -> Result<Vec<(Orientation, Config)>> {
    if !g.is_undirected() {
        return Err(Error::DirectedInput("acyclic orientations".into()));
    }
    let m = g.num_vertices();
    if (0..m).any(|v| g.wt(v, v) > 0) {
        return Ok(Vec::new()); // loops forbid acyclicity
    }
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|u| (u + 1..m).map(move |v| (u, v)))
        .filter(|&(u, v)| g.wt(u, v) > 0)
        .collect();
    if pairs.len() as u32 > ORIENTATION_CAP {
        return Err(Error::cap(format!(
            "{} edges exceed the orientation scan cap",
            pairs.len()
        )));
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let oriented: Orientation = pairs
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| if mask >> i & 1 == 0 { (u, v) } else { (v, u) })
            .collect();
        // acyclicity by repeated removal of sources
        let mut indeg_pairs = vec![0usize; m];
        for &(_, v) in &oriented {
            indeg_pairs[v] += 1;
        }
        let mut removed = vec![false; m];
        let mut count = 0;
        loop {
            let Some(src) = (0..m).find(|&v| !removed[v] && indeg_pairs[v] == 0) else {
                break;
            };
            removed[src] = true;
            count += 1;
            for &(u, v) in &oriented {
                if u == src && !removed[v] {
                    indeg_pairs[v] -= 1;
                }
            }
        }
        if count != m {
            continue; // cyclic
        }
        // unique source: only the sink has no incoming edge
        let mut has_in = vec![false; m];
        for &(_, v) in &oriented {
            has_in[v] = true;
        }
        if has_in[g.sink()] || (0..m).any(|v| v != g.sink() && !has_in[v]) {
            continue;
        }
        let mut config = vec![-1i64; g.n()];
        for &(u, v) in &oriented {
            if v != g.sink() {
                config[v] += g.wt(u, v);
            }
        }
        out.push((oriented, config));
    }
    Ok(out)
}

/// Render a divisor as a compact digit string like "1021" when all
/// entries are single digits; falls back to comma separation.
pub fn render(d: &[i64]) -> String {
    if d.iter().all(|&x| (0..=9).contains(&x)) {
        d.iter().map(|x| x.to_string()).collect()
    } else {
        d.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    const CAP: u64 = 1_000_000;

    #[test]
    fn equivalence_basics() {
        let g = diamond();
        let d = vec![1, 0, 2, 1];
        assert!(is_equivalent(&g, &d, &d).unwrap());
        assert!(is_equivalent(&g, &d, &[2, 2, 0, 0]).unwrap());
        assert!(!is_equivalent(&g, &d, &[2, 2, 0, 1]).unwrap()); // degree differs
        assert!(!is_equivalent(&g, &d, &[0, 4, 0, 0]).unwrap());
    }

    #[test]
    fn linear_system_diamond_1021() {
        let g = diamond();
        let sys = linear_system(&g, &[1, 0, 2, 1]).unwrap();
        let mut got: Vec<String> = sys.iter().map(|d| render(d)).collect();
        got.sort();
        assert_eq!(got, vec!["0202", "0310", "1021", "2200"]);
    }

    #[test]
    fn linear_system_gorenstein_example() {
        let g = gorenstein_example();
        let sys = linear_system(&g, &[1, 0, 1, 1]).unwrap();
        let mut got: Vec<String> = sys.iter().map(|d| render(d)).collect();
        got.sort();
        // D, v2 + 2 v3, 3 v1, 2 v2 + v4
        assert_eq!(got, vec!["0120", "0201", "1011", "3000"]);
    }

    #[test]
    fn linear_system_trivial_cases() {
        let g = diamond();
        assert_eq!(
            linear_system(&g, &[0, 0, 0, 0]).unwrap(),
            vec![vec![0, 0, 0, 0]]
        );
        assert!(linear_system(&g, &[1, 0, 0, -2]).unwrap().is_empty());
    }

    #[test]
    fn rank_and_canonical_diamond() {
        let g = diamond();
        assert_eq!(rank(&g, &[0, 0, 0, 0]).unwrap(), 0);
        let k = canonical(&g).unwrap();
        assert_eq!(k, vec![0, 1, 1, 0]);
        assert_eq!(degree(&k), 2); // 2g - 2
        assert_eq!(rank(&g, &k).unwrap(), 1);
        // beyond 2g - 2 the rank is deg - g
        assert_eq!(rank(&g, &[2, 0, 2, 0]).unwrap(), 2);
        assert_eq!(rank(&g, &[-1, 0, 0, 0]).unwrap(), -1);
        assert!(rank(&running_example(), &[0, 0, 0, 0]).is_err());
    }

    #[test]
    fn riemann_roch_spot() {
        let g = diamond();
        for d in [
            vec![0, 0, 0, 0],
            vec![0, 1, 1, 0],
            vec![1, 1, 0, -1],
            vec![2, 0, 0, 1],
            vec![-1, 2, 1, 0],
        ] {
            assert_eq!(riemann_roch_residual(&g, &d).unwrap(), 0, "failed at {d:?}");
        }
    }

    #[test]
    fn maximal_superstables_diamond() {
        let g = diamond();
        let maxi = maximal_superstables(&g, CAP).unwrap();
        assert_eq!(
            maxi,
            vec![vec![0, 0, 2], vec![0, 2, 0], vec![1, 0, 1], vec![1, 1, 0]]
        );
        let ns = nonspecial_divisors(&g, CAP).unwrap();
        assert_eq!(ns.len(), 4);
        for d in &ns {
            assert_eq!(degree(d), 1); // g - 1
        }
    }

    #[test]
    fn minimal_recurrents_diamond_and_tree() {
        let g = diamond();
        let mut min = minimal_recurrents(&g, CAP).unwrap();
        min.sort();
        assert_eq!(
            min,
            vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2], vec![1, 2, 0]]
        );
        let t = Graph::parse("sink s\nuedge a s 1\nuedge b s 1\n").unwrap();
        assert_eq!(minimal_recurrents(&t, CAP).unwrap(), vec![vec![0, 0]]);
    }

    #[test]
    fn orientation_bijection() {
        let g = diamond();
        let orients = acyclic_orientations_unique_source(&g).unwrap();
        assert_eq!(orients.len(), 4);
        let mut configs: Vec<Config> = orients.into_iter().map(|(_, c)| c).collect();
        configs.sort();
        let maxi = maximal_superstables(&g, CAP).unwrap();
        assert_eq!(configs, maxi);

        let tri = triangle();
        let t_orients = acyclic_orientations_unique_source(&tri).unwrap();
        let mut cfgs: Vec<Config> = t_orients.into_iter().map(|(_, c)| c).collect();
        cfgs.sort();
        assert_eq!(cfgs, vec![vec![0, 1], vec![1, 0]]);

        let tree = Graph::parse("sink s\nuedge a s 1\nuedge b a 1\n").unwrap();
        let tr = acyclic_orientations_unique_source(&tree).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr[0].1, vec![0, 0]);
    }

    #[test]
    fn counting_chain() {
        // minimal recurrents = maximal superstables = nonspecial
        // classes = orientations = T(1,0)
        for g in [diamond(), triangle()] {
            let a = minimal_recurrents(&g, CAP).unwrap().len();
            let b = maximal_superstables(&g, CAP).unwrap().len();
            let c = nonspecial_divisors(&g, CAP).unwrap().len();
            let d = acyclic_orientations_unique_source(&g).unwrap().len();
            let t = crate::ideal::tutte(&g).unwrap().eval(1, 0) as usize;
            assert!(a == b && b == c && c == d && d == t);
        }
    }
}
