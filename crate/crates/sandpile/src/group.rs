//! The sandpile (critical) group: invariant factors, recurrent and
//! superstable enumerations, group arithmetic, and the character
//! orbit of the toppling ideal's zero set.

use std::collections::{HashSet, VecDeque};

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};

use crate::dynamics::{self, Config};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::Int;

/// Order of the sandpile group (= weighted spanning tree count).
pub fn order(g: &Graph) -> Int {
    g.spanning_tree_weight()
}

/// Invariant factors d_1 | d_2 | ... | d_n of the sandpile group,
/// including any leading ones.
pub fn invariant_factors(g: &Graph) -> Vec<Int> {
    let (_, d, _) = g.reduced_laplacian().smith();
    (0..g.n()).map(|i| d[(i, i)].clone()).collect()
}

fn order_capped(g: &Graph, max_order: u64) -> Result<u64> {
    let ord = order(g);
    match ord.to_u64() {
        Some(o) if o <= max_order && o > 0 => Ok(o),
        Some(0) | None => Err(Error::invalid("graph has no spanning tree into the sink")),
        Some(o) => Err(Error::cap(format!("group order {o} exceeds cap {max_order}"))),
    }
}

/// All recurrent configurations, found by breadth-first search from
/// the maximal stable configuration under single-grain stable
/// addition.  Deterministic order: sorted by degree, then
/// lexicographically.
pub fn enumerate_recurrents(g: &Graph, max_order: u64) -> Result<Vec<Config>> {
    let expected = order_capped(g, max_order)?;
    let start = dynamics::max_stable(g);
    let mut seen: HashSet<Config> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for v in 0..g.n() {
            let mut grain = vec![0i64; g.n()];
            grain[v] = 1;
            let next = dynamics::stable_add(g, &c, &grain)?;
            if seen.insert(next.clone()) {
                if seen.len() as u64 > expected {
                    return Err(Error::invalid(
                        "recurrent enumeration exceeded the group order; graph data inconsistent",
                    ));
                }
                queue.push_back(next);
            }
        }
    }
    debug_assert_eq!(seen.len() as u64, expected);
    let mut out: Vec<Config> = seen.into_iter().collect();
    out.sort_by_key(|c| (dynamics::degree(c), c.clone()));
    Ok(out)
}

/// All superstable configurations: complements of the recurrents in
/// the maximal stable configuration, sorted by degree then lex.
pub fn enumerate_superstables(g: &Graph, max_order: u64) -> Result<Vec<Config>> {
    let cmax = dynamics::max_stable(g);
    let mut out: Vec<Config> = enumerate_recurrents(g, max_order)?
        .into_iter()
        .map(|r| cmax.iter().zip(&r).map(|(m, x)| m - x).collect())
        .collect();
    out.sort_by_key(|c| (dynamics::degree(c), c.clone()));
    Ok(out)
}

/// Group addition on superstable representatives.
pub fn group_add(g: &Graph, a: &[i64], b: &[i64]) -> Result<Config> {
    let sum: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    if sum.len() != g.n() || a.len() != b.len() {
        return Err(Error::invalid("configuration length mismatch"));
    }
    Ok(dynamics::superstabilize(g, &sum)?.0)
}

/// One point of the toppling ideal's zero locus per group character:
/// coordinate v of the point for character chi is chi evaluated at the
/// class of the v-th standard basis vector.  All coordinates are roots
/// of unity.
pub fn orbit_points(g: &Graph, max_order: u64) -> Result<Vec<Vec<Complex64>>> {
    let ord = order_capped(g, max_order)? as i128;
    let n = g.n();
    let (u, d, _) = g.reduced_laplacian().smith();
    let factors: Vec<i128> = (0..n)
        .map(|i| d[(i, i)].to_i128().expect("factor divides the capped order"))
        .collect();

    // exponent[j][v] of the class of e_v in Z/d_j, scaled to a common
    // denominator `ord`
    let scaled: Vec<Vec<i128>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|v| {
                    let mut e = u[(j, v)].clone() % Int::from(factors[j]);
                    if e.is_negative() {
                        e += Int::from(factors[j]);
                    }
                    e.to_i128().expect("reduced residue") * (ord / factors[j])
                })
                .collect()
        })
        .collect();

    let mut points = Vec::with_capacity(ord as usize);
    let mut k = vec![0i128; n];
    loop {
        let point: Vec<Complex64> = (0..n)
            .map(|v| {
                let num: i128 = (0..n).map(|j| (k[j] * scaled[j][v]) % ord).sum::<i128>() % ord;
                let angle = 2.0 * std::f64::consts::PI * (num as f64) / (ord as f64);
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        points.push(point);
        // next character exponent tuple
        let mut j = 0;
        loop {
            if j == n {
                return Ok(points);
            }
            k[j] += 1;
            if k[j] < factors[j] {
                break;
            }
            k[j] = 0;
            j += 1;
        }
    }
}

/// Maximal absolute residual of every minimalized Groebner generator
/// over every orbit point.
pub fn verify_vanishing(g: &Graph, max_order: u64) -> Result<f64> {
    let basis = crate::ideal::groebner_basis(g, true)?;
    let points = orbit_points(g, max_order)?;
    let eval = |exps: &[i64], p: &[Complex64]| -> Complex64 {
        exps.iter()
            .zip(p)
            .map(|(&e, z)| z.powi(e as i32))
            .product()
    };
    let mut worst = 0.0f64;
    for p in &points {
        for b in &basis {
            let r = (eval(&b.plus, p) - eval(&b.minus, p)).norm();
            if r > worst {
                worst = r;
            }
        }
    }
    Ok(worst)
}

pub fn factors_nontrivial(factors: &[Int]) -> Vec<Int> {
    factors
        .iter()
        .filter(|d| **d != Int::from(1))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    const CAP: u64 = 1_000_000;

    #[test]
    fn invariant_factors_running_example() {
        let g = running_example();
        let f = invariant_factors(&g);
        assert_eq!(f, vec![Int::from(1), Int::from(1), Int::from(21)]);
        let prod: Int = f.iter().product();
        assert_eq!(prod, order(&g));
    }

    #[test]
    fn recurrents_running_example_count() {
        let g = running_example();
        let rec = enumerate_recurrents(&g, CAP).unwrap();
        assert_eq!(rec.len(), 21);
        for c in &rec {
            assert!(dynamics::is_recurrent(&g, c).unwrap());
        }
        // every stable config not in the list is non-recurrent
        let mut stable_total = 0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..5 {
                    let cfg = vec![a, b, c];
                    stable_total += 1;
                    assert_eq!(
                        rec.contains(&cfg),
                        dynamics::is_recurrent(&g, &cfg).unwrap()
                    );
                }
            }
        }
        assert_eq!(stable_total, 80);
    }

    #[test]
    fn superstables_diamond() {
        let g = diamond();
        let ss = enumerate_superstables(&g, CAP).unwrap();
        assert_eq!(ss.len(), 8);
        for c in &ss {
            assert!(dynamics::is_superstable(&g, c).unwrap());
        }
        assert_eq!(ss[0], vec![0, 0, 0]);
    }

    #[test]
    fn group_add_laws() {
        let g = diamond();
        let ss = enumerate_superstables(&g, CAP).unwrap();
        let zero = vec![0i64; 3];
        for a in &ss {
            assert_eq!(group_add(&g, a, &zero).unwrap(), *a);
            for b in &ss {
                let ab = group_add(&g, a, b).unwrap();
                assert_eq!(ab, group_add(&g, b, a).unwrap());
                assert!(ss.contains(&ab));
            }
        }
    }

    #[test]
    fn orbit_points_are_distinct_roots_of_unity() {
        let g = diamond();
        let pts = orbit_points(&g, CAP).unwrap();
        assert_eq!(pts.len(), 8);
        for p in &pts {
            for z in p {
                assert!((z.norm() - 1.0).abs() < 1e-12);
            }
        }
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let dist: f64 = pts[i]
                    .iter()
                    .zip(&pts[j])
                    .map(|(a, b)| (a - b).norm())
                    .sum();
                assert!(dist > 1e-6, "characters {i} and {j} coincide");
            }
        }
    }

    #[test]
    fn vanishing_residual_small() {
        for g in [diamond(), running_example(), square_example()] {
            let worst = verify_vanishing(&g, CAP).unwrap();
            assert!(worst < 1e-9, "residual {worst}");
        }
    }
}
