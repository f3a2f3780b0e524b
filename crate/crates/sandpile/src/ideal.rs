//! The toppling ideal of a sandpile graph: generators, Groebner
//! bases under the sink-distance graded reverse lexicographic order,
//! Hilbert data, and the Tutte polynomial.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::ToPrimitive;

use crate::dynamics;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::group;

/// Graded reverse lexicographic order for a fixed variable precedence.
///
/// `prec` lists variable indices from highest to lowest precedence.
#[derive(Clone, Debug)]
pub struct MonomialOrder {
    prec: Vec<usize>,
}

impl MonomialOrder {
    pub fn new(prec: Vec<usize>) -> Self {
        MonomialOrder { prec }
    }

    pub fn num_vars(&self) -> usize {
        self.prec.len()
    }

    /// Compare exponent vectors: total degree first, then the
    /// reverse-lex tie break (the monomial whose trailing difference
    /// entry is negative is the larger one).
    pub fn cmp(&self, a: &[i64], b: &[i64]) -> Ordering {
        let da: i64 = a.iter().sum();
        let db: i64 = b.iter().sum();
        match da.cmp(&db) {
            Ordering::Equal => {}
            other => return other,
        }
        for &v in self.prec.iter().rev() {
            match a[v] - b[v] {
                0 => continue,
                d if d < 0 => return Ordering::Greater,
                _ => return Ordering::Less,
            }
        }
        Ordering::Equal
    }
}

/// The order on nonsink variables: precedence decreases with distance
/// to the sink (farther vertices are bigger); among equal distances,
/// the earlier input index wins.
pub fn sandpile_order(g: &Graph) -> MonomialOrder {
    let dist = g.distances_to_sink();
    let mut vars: Vec<usize> = (0..g.n()).collect();
    vars.sort_by_key(|&v| (std::cmp::Reverse(dist[v].expect("sink accessible")), v));
    MonomialOrder::new(vars)
}

/// The compatible order on all n+1 variables with the sink variable
/// smallest.
pub fn extended_order(g: &Graph) -> MonomialOrder {
    let mut vars = sandpile_order(g).prec;
    vars.push(g.sink());
    MonomialOrder::new(vars)
}

/// A binomial `x^plus - x^minus` with disjoint supports, oriented so
/// the plus side is the leading term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binomial {
    pub plus: Vec<i64>,
    pub minus: Vec<i64>,
}

impl Binomial {
    /// Binomial of a lattice vector, oriented by `order`.
    pub fn from_lattice_vector(order: &MonomialOrder, l: &[i64]) -> Binomial {
        let plus: Vec<i64> = l.iter().map(|&x| x.max(0)).collect();
        let minus: Vec<i64> = l.iter().map(|&x| (-x).max(0)).collect();
        match order.cmp(&plus, &minus) {
            Ordering::Less => Binomial { plus: minus, minus: plus },
            _ => Binomial { plus, minus },
        }
    }

    pub fn render(&self, labels: &[String]) -> String {
        let side = |exps: &[i64]| -> String {
            let parts: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        labels[i].clone()
                    } else {
                        format!("{}^{}", labels[i], e)
                    }
                })
                .collect();
            if parts.is_empty() {
                "1".into()
            } else {
                parts.join("*")
            }
        };
        format!("{} - {}", side(&self.plus), side(&self.minus))
    }
}

fn divides(a: &[i64], m: &[i64]) -> bool {
    a.iter().zip(m).all(|(x, y)| x <= y)
}

/// The standard generators: one toppling binomial per nonsink vertex
/// (sink exponents dropped) plus `x^b - 1` for the minimal burning
/// configuration b.
pub fn toppling_generators(g: &Graph) -> Vec<Binomial> {
    let order = sandpile_order(g);
    let cols = g.reduced_laplacian_cols();
    let mut out: Vec<Binomial> = (0..g.n())
        .map(|v| Binomial::from_lattice_vector(&order, &cols[v]))
        .collect();
    let (b, _) = dynamics::min_burning_config(g);
    out.push(Binomial {
        plus: b,
        minus: vec![0; g.n()],
    });
    out
}

const SCRIPT_BOX_CAP: u64 = 4_000_000;

/// Groebner basis of the toppling ideal under the sandpile order: the
/// binomials of all lattice vectors `reduced_laplacian * sigma` for
/// nonzero scripts sigma bounded by the burning script.  With
/// `minimal`, generators whose leading term is divisible by another's
/// are dropped.  Sorted by leading term, ascending.
pub fn groebner_basis(g: &Graph, minimal: bool) -> Result<Vec<Binomial>> {
    let order = sandpile_order(g);
    let (_, sigma_b) = dynamics::min_burning_config(g);
    let box_size: u64 = sigma_b.iter().map(|&x| x as u64 + 1).product();
    if box_size > SCRIPT_BOX_CAP {
        return Err(Error::cap(format!(
            "burning script box has {box_size} scripts (limit {SCRIPT_BOX_CAP})"
        )));
    }
    let cols = g.reduced_laplacian_cols();
    let n = g.n();
    let mut basis: Vec<Binomial> = dynamics::scripts_in_box(&sigma_b)
        .iter()
        .map(|sigma| {
            let mut l = vec![0i64; n];
            for v in 0..n {
                for u in 0..n {
                    l[u] += sigma[v] * cols[v][u];
                }
            }
            Binomial::from_lattice_vector(&order, &l)
        })
        .collect();
    basis.sort_by(|a, b| order.cmp(&a.plus, &b.plus).then(a.cmp(b)));
    basis.dedup();
    if minimal {
        let mut kept: Vec<Binomial> = Vec::new();
        for b in basis {
            if !kept.iter().any(|k| divides(&k.plus, &b.plus)) {
                kept.push(b);
            }
        }
        basis = kept;
    }
    Ok(basis)
}

/// Normal form of a monomial against a basis of binomials: repeatedly
/// rewrite by the first generator whose leading term divides.
pub fn normal_form(basis: &[Binomial], m: &[i64]) -> Vec<i64> {
    let mut cur = m.to_vec();
    'outer: loop {
        for b in basis {
            if divides(&b.plus, &cur) {
                for i in 0..cur.len() {
                    cur[i] = cur[i] - b.plus[i] + b.minus[i];
                }
                continue 'outer;
            }
        }
        return cur;
    }
}

/// Does the binomial `x^a - x^b` reduce to zero against `basis`?
pub fn binomial_reduces_to_zero(basis: &[Binomial], a: &[i64], b: &[i64]) -> bool {
    normal_form(basis, a) == normal_form(basis, b)
}

/// Buchberger closure check: does the S-pair of two basis binomials
/// reduce to zero?
pub fn s_pair_reduces(basis: &[Binomial], f: &Binomial, h: &Binomial) -> bool {
    let n = f.plus.len();
    let lcm: Vec<i64> = (0..n).map(|i| f.plus[i].max(h.plus[i])).collect();
    let a: Vec<i64> = (0..n).map(|i| lcm[i] - f.plus[i] + f.minus[i]).collect();
    let b: Vec<i64> = (0..n).map(|i| lcm[i] - h.plus[i] + h.minus[i]).collect();
    binomial_reduces_to_zero(basis, &a, &b)
}

/// Is the homogenization hypothesis satisfied: does the sink column of
/// the full Laplacian lie in the integer span of the other columns?
pub fn homogenization_supported(g: &Graph) -> bool {
    let lap = g.laplacian();
    let m = g.num_vertices();
    let nonsink = crate::IntMatrix::from_fn(m, g.n(), |i, j| lap[(i, j)].clone());
    let lattice = crate::matrix::Lattice::from_columns(&nonsink);
    lattice.contains(&lap.col(g.sink()))
}

/// Groebner basis of the homogeneous toppling ideal in n+1 variables,
/// obtained by homogenizing the minimal basis with the sink variable.
/// Fails when the sink column of the Laplacian is outside the span of
/// the other columns (then homogenization does not commute with
/// saturation and this shortcut is invalid).
pub fn homogeneous_basis(g: &Graph) -> Result<Vec<Binomial>> {
    if !homogenization_supported(g) {
        return Err(Error::Unsupported(
            "sink Laplacian column is not an integer combination of the others; \
             the homogenized basis would not present the projective ideal"
                .into(),
        ));
    }
    let ext = extended_order(g);
    let mut out: Vec<Binomial> = groebner_basis(g, true)?
        .into_iter()
        .map(|b| {
            let gap: i64 = b.plus.iter().sum::<i64>() - b.minus.iter().sum::<i64>();
            debug_assert!(gap >= 0, "leading term has maximal degree");
            let mut plus = b.plus;
            plus.push(0);
            let mut minus = b.minus;
            minus.push(gap);
            Binomial { plus, minus }
        })
        .collect();
    out.sort_by(|a, b| ext.cmp(&a.plus, &b.plus).then(a.cmp(b)));
    Ok(out)
}

/// The h-vector: degree histogram of the superstable configurations.
pub fn h_vector(g: &Graph, max_order: u64) -> Result<Vec<i64>> {
    let ss = group::enumerate_superstables(g, max_order)?;
    let top = ss.iter().map(|c| dynamics::degree(c)).max().unwrap_or(0) as usize;
    let mut h = vec![0i64; top + 1];
    for c in &ss {
        h[dynamics::degree(c) as usize] += 1;
    }
    Ok(h)
}

/// Postulation number: the degree from which the affine Hilbert
/// function is constant.
pub fn postulation(h: &[i64]) -> usize {
    h.len() - 1
}

/// Affine Hilbert function values H(0), ..., H(postulation); beyond
/// the postulation number the function stays at the group order.
pub fn affine_hilbert(g: &Graph, max_order: u64) -> Result<Vec<i64>> {
    let h = h_vector(g, max_order)?;
    let mut acc = 0;
    Ok(h.iter()
        .map(|&x| {
            acc += x;
            acc
        })
        .collect())
}

/// A polynomial in two variables x, y with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly2(pub BTreeMap<(u32, u32), i64>);

impl Poly2 {
    pub fn one() -> Poly2 {
        Poly2(BTreeMap::from([((0, 0), 1)]))
    }

    pub fn monomial(i: u32, j: u32) -> Poly2 {
        Poly2(BTreeMap::from([((i, j), 1)]))
    }

    pub fn add_assign(&mut self, other: &Poly2) {
        for (&k, &c) in &other.0 {
            let e = self.0.entry(k).or_insert(0);
            *e += c;
            if *e == 0 {
                self.0.remove(&k);
            }
        }
    }

    pub fn mul_monomial(&self, i: u32, j: u32) -> Poly2 {
        Poly2(
            self.0
                .iter()
                .map(|(&(a, b), &c)| ((a + i, b + j), c))
                .collect(),
        )
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.0
            .iter()
            .map(|(&(i, j), &c)| c * x.pow(i) * y.pow(j))
            .sum()
    }

    /// Coefficient vector of the univariate polynomial T(1, y).
    pub fn at_x1(&self) -> Vec<i64> {
        let top = self.0.keys().map(|&(_, j)| j).max().unwrap_or(0) as usize;
        let mut out = vec![0i64; top + 1];
        for (&(_, j), &c) in &self.0 {
            out[j as usize] += c;
        }
        while out.len() > 1 && *out.last().unwrap() == 0 {
            out.pop();
        }
        out
    }
}

/// Loopless multigraph state for deletion/contraction, vertices
/// relabelled compactly.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct MultiGraph {
    n: usize,
    edges: Vec<(usize, usize, i64)>, // u < v, weight >= 1, sorted
}

impl MultiGraph {
    fn connected_without(&self, skip: usize, a: usize, b: usize) -> bool {
        // is b reachable from a if one copy of edge `skip` is removed?
        let mut adj = vec![Vec::new(); self.n];
        for (idx, &(u, v, w)) in self.edges.iter().enumerate() {
            if idx == skip && w == 1 {
                continue;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![a];
        seen[a] = true;
        while let Some(x) = stack.pop() {
            if x == b {
                return true;
            }
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        false
    }

    fn canonical(&self) -> MultiGraph {
        // drop isolated vertices, then pick the lexicographically
        // least relabelling (vertex counts stay tiny here)
        let mut used: Vec<usize> = self
            .edges
            .iter()
            .flat_map(|&(u, v, _)| [u, v])
            .collect();
        used.sort_unstable();
        used.dedup();
        let compact: Vec<(usize, usize, i64)> = self
            .edges
            .iter()
            .map(|&(u, v, w)| {
                let cu = used.binary_search(&u).unwrap();
                let cv = used.binary_search(&v).unwrap();
                (cu, cv, w)
            })
            .collect();
        let k = used.len();
        if k > 8 {
            let mut edges = compact;
            edges.sort_unstable();
            return MultiGraph { n: k, edges };
        }
        let best = (0..k)
            .permutations(k)
            .map(|perm| {
                let mut edges: Vec<(usize, usize, i64)> = compact
                    .iter()
                    .map(|&(u, v, w)| {
                        let (a, b) = (perm[u], perm[v]);
                        (a.min(b), a.max(b), w)
                    })
                    .collect();
                edges.sort_unstable();
                edges
            })
            .min()
            .unwrap_or_default();
        MultiGraph { n: k, edges: best }
    }
}

fn tutte_rec(mg: &MultiGraph, memo: &mut BTreeMap<MultiGraph, Poly2>) -> Poly2 {
    if mg.edges.is_empty() {
        return Poly2::one();
    }
    let key = mg.canonical();
    if let Some(p) = memo.get(&key) {
        return p.clone();
    }
    // find a copy that is not a bridge: any parallel copy qualifies,
    // otherwise any edge whose removal keeps its endpoints connected
    let pick = mg
        .edges
        .iter()
        .position(|&(_, _, w)| w >= 2)
        .or_else(|| {
            (0..mg.edges.len()).find(|&i| {
                let (u, v, _) = mg.edges[i];
                mg.connected_without(i, u, v)
            })
        });
    let result = match pick {
        None => {
            // everything left is a bridge
            let bridges: i64 = mg.edges.iter().map(|&(_, _, w)| w).sum();
            Poly2::monomial(bridges as u32, 0)
        }
        Some(i) => {
            let (u, v, w) = mg.edges[i];
            // delete one copy
            let mut del = mg.clone();
            if w == 1 {
                del.edges.remove(i);
            } else {
                del.edges[i].2 -= 1;
            }
            let mut total = tutte_rec(&del, memo);
            // contract: merge v into u; surviving parallel copies of
            // (u, v) become loops, i.e. a factor of y^(w-1)
            let mut contracted: BTreeMap<(usize, usize), i64> = BTreeMap::new();
            for &(a, b, wt) in &mg.edges {
                let (a, b) = (if a == v { u } else { a }, if b == v { u } else { b });
                if a == b {
                    continue; // only the contracted pair maps to loops
                }
                *contracted.entry((a.min(b), a.max(b))).or_insert(0) += wt;
            }
            let con = MultiGraph {
                n: mg.n,
                edges: contracted
                    .into_iter()
                    .map(|((a, b), wt)| (a, b, wt))
                    .collect(),
            };
            let part = tutte_rec(&con, memo).mul_monomial(0, w as u32 - 1);
            total.add_assign(&part);
            total
        }
    };
    memo.insert(key, result.clone());
    result
}

/// Tutte polynomial of an undirected graph, weights read as parallel
/// edge multiplicities.
pub fn tutte(g: &Graph) -> Result<Poly2> {
    if !g.is_undirected() {
        return Err(Error::DirectedInput("Tutte polynomial".into()));
    }
    let m = g.num_vertices();
    let mut edges = Vec::new();
    let mut loops = 0i64;
    for u in 0..m {
        for v in u..m {
            let w = g.wt(u, v);
            if w == 0 {
                continue;
            }
            if u == v {
                loops += w;
            } else {
                edges.push((u, v, w));
            }
        }
    }
    let mg = MultiGraph { n: m, edges };
    let mut memo = BTreeMap::new();
    Ok(tutte_rec(&mg, &mut memo).mul_monomial(0, loops as u32))
}

/// Outcome of comparing T(1, y) with the reversed h-vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MerinoReport {
    pub h: Vec<i64>,
    pub t1y: Vec<i64>,
    pub order: i64,
    pub holds: bool,
}

/// Check T(1, y) = sum_i h_(l-i) y^i and T(1, 1) = group order on an
/// undirected graph.
pub fn merino_check(g: &Graph, max_order: u64) -> Result<MerinoReport> {
    let t = tutte(g)?;
    let h = h_vector(g, max_order)?;
    let t1y = t.at_x1();
    let mut rev = h.clone();
    rev.reverse();
    let order = group::order(g)
        .to_i64()
        .ok_or_else(|| Error::cap("group order exceeds i64"))?;
    let holds = t1y == rev && t.eval(1, 1) == order;
    Ok(MerinoReport { h, t1y, order, holds })
}
