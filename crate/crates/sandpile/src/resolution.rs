//! Graded Betti numbers of the homogeneous toppling ideal, computed
//! as reduced homology ranks of divisor support complexes, plus the
//! connected-partition conjecture checker.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::divisor::{self, Divisor};
use crate::dynamics;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::group;
use crate::ideal;
use crate::matrix::{Lattice, Matrix};
use crate::Int;

/// A simplicial complex stored by its maximal faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    pub ground: usize,
    pub facets: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// Dimension, or None for the void complex (no faces at all).
    pub fn dim(&self) -> Option<i64> {
        self.facets.iter().map(|f| f.len() as i64 - 1).max()
    }

    /// All faces grouped by cardinality: `faces[k]` holds the faces
    /// with k vertices (so `faces[0]` is the empty face).
    fn faces_by_size(&self) -> Vec<Vec<Vec<usize>>> {
        let mut sets: Vec<BTreeSet<Vec<usize>>> = Vec::new();
        if self.facets.is_empty() {
            return Vec::new();
        }
        let top = self.facets.iter().map(|f| f.len()).max().unwrap_or(0);
        sets.resize(top + 1, BTreeSet::new());
        for f in &self.facets {
            // downward closure via subset masks
            let k = f.len();
            for mask in 0u64..(1u64 << k) {
                let sub: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                sets[sub.len()].insert(sub);
            }
        }
        sets.into_iter()
            .map(|s| s.into_iter().collect())
            .collect()
    }
}

/// The support complex of |d|: a set of vertices is a face iff it is
/// contained in the support of some effective divisor equivalent to d.
pub fn delta_complex(g: &Graph, d: &[i64]) -> Result<SimplicialComplex> {
    let sys = divisor::linear_system(g, d)?;
    let mut supports: Vec<Vec<usize>> = sys
        .iter()
        .map(|e| (0..e.len()).filter(|&v| e[v] != 0).collect())
        .collect();
    supports.sort_by_key(|s| std::cmp::Reverse(s.len()));
    let mut facets: Vec<Vec<usize>> = Vec::new();
    for s in supports {
        if !facets
            .iter()
            .any(|f| s.iter().all(|v| f.contains(v)))
        {
            facets.push(s);
        }
    }
    facets.sort();
    Ok(SimplicialComplex {
        ground: g.num_vertices(),
        facets,
    })
}

/// Boundary matrix from k-vertex faces to (k-1)-vertex faces.
fn boundary_matrix(lower: &[Vec<usize>], upper: &[Vec<usize>]) -> Matrix<Int> {
    Matrix::from_fn(lower.len(), upper.len(), |i, j| {
        // does removing one vertex of upper[j] give lower[i]?
        let up = &upper[j];
        for (pos, &v) in up.iter().enumerate() {
            let mut sub = up.clone();
            sub.remove(pos);
            if sub == lower[i] {
                return if pos % 2 == 0 {
                    Int::from(1)
                } else {
                    Int::from(-1)
                };
            }
            let _ = v;
        }
        Int::from(0)
    })
}

/// Ranks of the reduced rational homology groups, indexed from
/// dimension -1: `out[k]` is the rank in dimension k-1.  Empty output
/// for the void complex.
pub fn reduced_homology_ranks(c: &SimplicialComplex) -> Vec<i64> {
    let faces = c.faces_by_size();
    if faces.is_empty() {
        return Vec::new();
    }
    // chain group dimensions: faces[k] sits in homological degree k-1
    let dims: Vec<usize> = faces.iter().map(|f| f.len()).collect();
    let mut ranks = vec![0usize; dims.len() + 1];
    for k in 1..dims.len() {
        ranks[k] = boundary_matrix(&faces[k - 1], &faces[k]).rank();
    }
    (0..dims.len())
        .map(|k| dims[k] as i64 - ranks[k] as i64 - ranks[k + 1] as i64)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedEntry {
    pub i: usize,
    pub divisor: Divisor,
    pub multiplicity: i64,
}

#[derive(Clone, Debug)]
pub struct BettiTable {
    /// Nonsink vertex count: the resolution length.
    pub n: usize,
    /// Coarse Betti numbers beta_1 ... beta_n.
    pub coarse: Vec<i64>,
    /// Nonzero graded entries, ordered by (i, degree, divisor).
    pub graded: Vec<GradedEntry>,
    /// Highest divisor degree scanned.
    pub scan_bound: i64,
}

impl BettiTable {
    pub fn coarse_beta(&self, i: usize) -> i64 {
        self.coarse.get(i - 1).copied().unwrap_or(0)
    }
}

fn betti_scan(g: &Graph, superstables: &[Vec<i64>], bound: i64) -> Result<Vec<GradedEntry>> {
    let n = g.n();
    let cells: Vec<(i64, &Vec<i64>)> = (0..=bound)
        .flat_map(|d| superstables.iter().map(move |c| (d, c)))
        .collect();
    let results: Vec<Result<Vec<GradedEntry>>> = cells
        .par_iter()
        .map(|&(d, c)| {
            let mut dv: Divisor = c.clone();
            dv.push(d - dynamics::degree(c));
            let complex = delta_complex(g, &dv)?;
            let ranks = reduced_homology_ranks(&complex);
            let mut out = Vec::new();
            for i in 1..=n {
                let mult = ranks.get(i).copied().unwrap_or(0);
                if mult > 0 {
                    out.push(GradedEntry {
                        i,
                        divisor: dv.clone(),
                        multiplicity: mult,
                    });
                }
            }
            Ok(out)
        })
        .collect();
    let mut graded = Vec::new();
    for r in results {
        graded.extend(r?);
    }
    graded.sort_by_key(|e| {
        (
            e.i,
            divisor::degree(&e.divisor),
            e.divisor.clone(),
        )
    });
    Ok(graded)
}

/// Graded Betti numbers of the homogeneous toppling ideal.
///
/// Divisor classes of each degree d are represented by superstable
/// configurations lifted with a sink coefficient of d minus their
/// degree.  The scan runs degrees 0..=bound, starting at postulation
/// number + n and widening until the Euler-characteristic identity
/// certifies completeness.
pub fn graded_betti(g: &Graph, max_order: u64) -> Result<BettiTable> {
    if !ideal::homogenization_supported(g) {
        return Err(Error::Unsupported(
            "graded Betti numbers need the sink Laplacian column in the span of the others \
             so that divisor classes split over superstables"
                .into(),
        ));
    }
    let n = g.n();
    let superstables = group::enumerate_superstables(g, max_order)?;
    let h = ideal::h_vector(g, max_order)?;
    let mut bound = (ideal::postulation(&h) + n) as i64;
    for _ in 0..=10 {
        let mut graded = betti_scan(g, &superstables, bound)?;
        if g.is_undirected() {
            normalize_top_entries(g, max_order, &mut graded)?;
        }
        let mut coarse = vec![0i64; n];
        for e in &graded {
            coarse[e.i - 1] += e.multiplicity;
        }
        let table = BettiTable {
            n,
            coarse,
            graded,
            scan_bound: bound,
        };
        if euler_check(g, &table, &h) {
            return Ok(table);
        }
        bound += 1;
    }
    Err(Error::invalid(
        "Betti scan failed the Euler cross-check even after widening; internal error",
    ))
}

/// Rewrite the divisors of index-n entries of an undirected graph to
/// their minimally alive representatives, minimal recurrent + deg(s) s
/// (the canonical form in which top resolution degrees are quoted).
fn normalize_top_entries(g: &Graph, max_order: u64, graded: &mut [GradedEntry]) -> Result<()> {
    let n = g.n();
    let lat = Lattice::from_columns(&g.laplacian());
    let degs = g.outdeg(g.sink());
    let lifts: Vec<Divisor> = divisor::minimal_recurrents(g, max_order)?
        .into_iter()
        .map(|mut c| {
            c.push(degs);
            c
        })
        .collect();
    for e in graded.iter_mut().filter(|e| e.i == n) {
        let rep = lifts.iter().find(|d| {
            let diff: Vec<Int> = d.iter().zip(&e.divisor).map(|(a, b)| Int::from(a - b)).collect();
            lat.contains(&diff)
        });
        if let Some(rep) = rep {
            e.divisor = rep.clone();
        }
    }
    graded.sort_by_key(|e| (e.i, divisor::degree(&e.divisor), e.divisor.clone()));
    Ok(())
}

/// Check the Euler-characteristic identity
/// `1 + sum_i (-1)^i sum_D beta_(i,D) t^deg(D) = h(t) * (1-t)^n`.
pub fn euler_check(g: &Graph, table: &BettiTable, h: &[i64]) -> bool {
    let n = g.n();
    let top = (table.scan_bound as usize).max(h.len() + n);
    let mut lhs = vec![0i64; top + 1];
    lhs[0] = 1;
    for e in &table.graded {
        let d = divisor::degree(&e.divisor) as usize;
        let sign = if e.i % 2 == 0 { 1 } else { -1 };
        lhs[d] += sign * e.multiplicity;
    }
    // rhs = h(t) * (1-t)^n
    let mut rhs = vec![0i64; top + 1];
    rhs[..h.len()].copy_from_slice(h);
    for _ in 0..n {
        let mut next = vec![0i64; top + 1];
        for (i, &c) in rhs.iter().enumerate() {
            next[i] += c;
            if i + 1 <= top {
                next[i + 1] -= c;
            }
        }
        rhs = next;
    }
    lhs == rhs
}

/// A partition of the vertex set into blocks (each block sorted,
/// blocks ordered by smallest element).
pub type Partition = Vec<Vec<usize>>;

const PARTITION_VERTEX_CAP: usize = 12;

fn block_connected(g: &Graph, block: &[usize]) -> bool {
    if block.is_empty() {
        return false;
    }
    let mut seen = vec![false; block.len()];
    seen[0] = true;
    let mut stack = vec![block[0]];
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for (i, &v) in block.iter().enumerate() {
            if !seen[i] && (g.wt(u, v) > 0 || g.wt(v, u) > 0) {
                seen[i] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == block.len()
}

/// All partitions of the vertices into exactly k blocks with every
/// induced block connected.
pub fn connected_partitions(g: &Graph, k: usize) -> Result<Vec<Partition>> {
    if !g.is_undirected() {
        return Err(Error::DirectedInput("connected partitions".into()));
    }
    let m = g.num_vertices();
    if m > PARTITION_VERTEX_CAP {
        return Err(Error::cap(format!(
            "partition enumeration capped at {PARTITION_VERTEX_CAP} vertices"
        )));
    }
    if k == 0 || k > m {
        return Ok(Vec::new());
    }
    // restricted growth strings
    let mut out = Vec::new();
    let mut assign = vec![0usize; m];
    fn rec(
        g: &Graph,
        m: usize,
        k: usize,
        v: usize,
        used: usize,
        assign: &mut Vec<usize>,
        out: &mut Vec<Partition>,
    ) {
        if v == m {
            if used != k {
                return;
            }
            let mut blocks: Partition = vec![Vec::new(); k];
            for (vert, &b) in assign.iter().enumerate() {
                blocks[b].push(vert);
            }
            if blocks.iter().all(|b| block_connected(g, b)) {
                out.push(blocks);
            }
            return;
        }
        // prune: remaining vertices must be able to fill k blocks
        if used + (m - v) < k {
            return;
        }
        for b in 0..=used.min(k - 1) {
            assign[v] = b;
            let next_used = if b == used { used + 1 } else { used };
            rec(g, m, k, v + 1, next_used, assign, out);
        }
    }
    rec(g, m, k, 0, 0, &mut assign, &mut out);
    out.sort();
    Ok(out)
}

/// Quotient graph of a connected partition: blocks become vertices,
/// weights count cross edges, sink is the block containing the sink.
pub fn partition_graph(g: &Graph, p: &Partition) -> Result<Graph> {
    let m = g.num_vertices();
    let mut owner = vec![usize::MAX; m];
    for (b, block) in p.iter().enumerate() {
        for &v in block {
            if v >= m || owner[v] != usize::MAX {
                return Err(Error::invalid("not a partition of the vertex set"));
            }
            owner[v] = b;
        }
    }
    if owner.contains(&usize::MAX) {
        return Err(Error::invalid("partition misses vertices"));
    }
    let k = p.len();
    let sink_block = owner[g.sink()];
    // order blocks with the sink block last, otherwise by position
    let mut order: Vec<usize> = (0..k).filter(|&b| b != sink_block).collect();
    order.push(sink_block);
    let pos = |b: usize| order.iter().position(|&x| x == b).expect("present");
    let mut wt = vec![vec![0i64; k]; k];
    for u in 0..m {
        for v in 0..m {
            if owner[u] != owner[v] {
                wt[pos(owner[u])][pos(owner[v])] += g.wt(u, v);
            }
        }
    }
    let labels: Vec<String> = order
        .iter()
        .map(|&b| {
            p[b].iter()
                .map(|&v| g.label(v).to_string())
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect();
    Graph::from_weights(labels, wt)
}

#[derive(Clone, Debug)]
pub struct ConjectureRow {
    pub k: usize,
    pub beta: i64,
    pub contributions: Vec<i64>,
    pub rhs: i64,
    pub holds: bool,
}

/// Compare each coarse Betti number with the sum over connected
/// (k+1)-partitions of the number of minimal recurrent configurations
/// of the partition graphs.
pub fn conjecture_check(g: &Graph, max_order: u64) -> Result<Vec<ConjectureRow>> {
    if !g.is_undirected() {
        return Err(Error::DirectedInput("partition conjecture".into()));
    }
    let table = graded_betti(g, max_order)?;
    let mut rows = Vec::new();
    for k in 1..=g.n() {
        let parts = connected_partitions(g, k + 1)?;
        let contributions: Vec<i64> = parts
            .par_iter()
            .map(|p| {
                let quotient = partition_graph(g, p)?;
                Ok(divisor::minimal_recurrents(&quotient, max_order)?.len() as i64)
            })
            .collect::<Result<_>>()?;
        let rhs: i64 = contributions.iter().sum();
        let beta = table.coarse_beta(k);
        rows.push(ConjectureRow {
            k,
            beta,
            contributions,
            rhs,
            holds: beta == rhs,
        });
    }
    Ok(rows)
}
