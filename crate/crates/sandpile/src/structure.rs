//! Structural results: recovering a sandpile graph from a full-rank
//! lattice, mixed-dominating matrix tests, wirings, and the
//! complete-intersection / Gorenstein classification.

use num_traits::{Signed, Zero};

use crate::divisor;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ideal;
use crate::resolution;
use crate::{Int, IntMatrix};

fn col_deg(m: &IntMatrix, j: usize) -> Int {
    (0..m.rows()).map(|i| m[(i, j)].clone()).sum()
}

fn add_col(m: &mut IntMatrix, target: usize, source: usize, factor: &Int) {
    for i in 0..m.rows() {
        let add = factor.clone() * m[(i, source)].clone();
        m[(i, target)] = m[(i, target)].clone() + add;
    }
}

fn negate_col(m: &mut IntMatrix, j: usize) {
    for i in 0..m.rows() {
        m[(i, j)] = -m[(i, j)].clone();
    }
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let x = m[(i, a)].clone();
        m[(i, a)] = m[(i, b)].clone();
        m[(i, b)] = x;
    }
}

/// In-place Euclidean algorithm on the values `value(col)` over the
/// columns `lo..n`, using column additions only.  Ends with the gcd in
/// column `lo` (positive) and zeros elsewhere.  Ties in the pivot
/// choice go to the lowest index.
fn euclid_columns(m: &mut IntMatrix, lo: usize, value: impl Fn(&IntMatrix, usize) -> Int) {
    let n = m.cols();
    loop {
        let nonzero: Vec<usize> = (lo..n).filter(|&j| !value(m, j).is_zero()).collect();
        let Some(&pivot) = nonzero
            .iter()
            .min_by_key(|&&j| value(m, j).abs())
        else {
            return; // all zero; caller handles (rank violation)
        };
        if nonzero.len() == 1 {
            swap_cols(m, lo, pivot);
            if value(m, lo).is_negative() {
                negate_col(m, lo);
            }
            return;
        }
        let pv = value(m, pivot);
        for &j in &nonzero {
            if j == pivot {
                continue;
            }
            let q = -(value(m, j) / pv.clone());
            if q.is_zero() {
                // equal magnitudes with opposite signs
                add_col(m, j, pivot, &Int::from(1));
            } else {
                add_col(m, j, pivot, &q);
            }
        }
    }
}

/// Turn a full-rank integer lattice basis (columns of `m`) into a
/// sandpile graph on n+1 vertices, with a fresh sink, whose reduced
/// Laplacian spans the same column lattice.
///
/// Three phases of invertible column operations: concentrate the
/// column degrees into the first column, clear everything more than
/// one row above the diagonal (negative superdiagonals), then correct
/// the columns right to left until the sign pattern of a reduced
/// Laplacian holds.
pub fn lattice_to_laplacian(m: &IntMatrix) -> Result<Graph> {
    let n = m.rows();
    if n == 0 || m.cols() != n {
        return Err(Error::invalid("lattice basis must be square and nonempty"));
    }
    if m.det().is_zero() {
        return Err(Error::invalid("lattice basis is singular"));
    }
    let mut c = m.clone();

    // Phase 1: degrees to column 1.
    euclid_columns(&mut c, 0, col_deg);

    // Phase 2: clear above the superdiagonal; superdiagonals negative.
    for k in 1..n.saturating_sub(1) {
        euclid_columns(&mut c, k, |m, j| m[(k - 1, j)].clone());
        negate_col(&mut c, k);
    }
    if n >= 2 && c[(n - 2, n - 1)].is_positive() {
        negate_col(&mut c, n - 1);
    }

    // Phase 3: right-to-left corrections.
    for k in (0..n.saturating_sub(1)).rev() {
        for i in k + 2..n {
            while c[(i - 1, k)].is_positive() {
                add_col(&mut c, k, i, &Int::from(1));
            }
        }
        let mut v: Vec<Int> = (0..n).map(|i| -c[(i, k + 1)].clone()).collect();
        for i in k + 2..n {
            let scale = c[(i - 1, i)].abs();
            let vi = v[i - 1].clone();
            for r in 0..n {
                v[r] = scale.clone() * v[r].clone() + vi.clone() * c[(r, i)].clone();
            }
        }
        while !c[(k, k)].is_positive() || c[(n - 1, k)].is_positive() {
            for r in 0..n {
                c[(r, k)] = c[(r, k)].clone() + v[r].clone();
            }
        }
    }

    // Read the graph off the corrected columns.
    let mut wt = vec![vec![0i64; n + 1]; n + 1];
    let to_i64 = |x: &Int| -> Result<i64> {
        num_traits::ToPrimitive::to_i64(x)
            .ok_or_else(|| Error::cap("edge weight exceeds i64 after lattice reduction"))
    };
    for j in 0..n {
        for u in 0..n {
            if u != j {
                let w = to_i64(&c[(u, j)])?;
                debug_assert!(w <= 0, "off-diagonal must be nonpositive");
                wt[j][u] = -w;
            }
        }
        let diag = to_i64(&c[(j, j)])?;
        debug_assert!(diag > 0, "diagonal must be positive");
        let sink_w = to_i64(&col_deg(&c, j))?;
        debug_assert!(sink_w >= 0, "column degree must be nonnegative");
        wt[j][n] = sink_w;
    }
    let mut labels: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    labels.push("s".into());
    Graph::from_weights(labels, wt)
}

/// Is every column of the matrix mixed (contains both a positive and
/// a negative entry)?
pub fn is_mixed(m: &IntMatrix) -> bool {
    (0..m.cols()).all(|j| {
        let col = m.col(j);
        col.iter().any(|x| x.is_positive()) && col.iter().any(|x| x.is_negative())
    })
}

const MIXED_SCAN_CAP: usize = 8;

/// Does the matrix avoid mixed square submatrices entirely?  Empty
/// matrices qualify.  Decided by exhaustive submatrix scan, capped at
/// 8x8 inputs.
pub fn is_mixed_dominating(m: &IntMatrix) -> Result<bool> {
    let (r, c) = (m.rows(), m.cols());
    if r > MIXED_SCAN_CAP || c > MIXED_SCAN_CAP {
        return Err(Error::cap(format!(
            "mixed-dominating scan capped at {MIXED_SCAN_CAP}x{MIXED_SCAN_CAP}"
        )));
    }
    // 1x1 submatrices are never mixed, so scan sizes >= 2
    for size in 2..=r.min(c) {
        let row_sets = subsets_of_size(r, size);
        let col_sets = subsets_of_size(c, size);
        for rs in &row_sets {
            for cs in &col_sets {
                let mixed = cs.iter().all(|&j| {
                    rs.iter().any(|&i| m[(i, j)].is_positive())
                        && rs.iter().any(|&i| m[(i, j)].is_negative())
                });
                if mixed {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// The restricted Laplacian: full Laplacian with only the sink column
/// removed (all rows kept).
pub fn restricted_laplacian(g: &Graph) -> IntMatrix {
    let lap = g.laplacian();
    IntMatrix::from_fn(g.num_vertices(), g.n(), |i, j| lap[(i, j)].clone())
}

/// Wire `g1` into `g2`: identify the sink of `g1` as an internal
/// vertex of the combined graph, adding back-edges into `g1`
/// prescribed by the wiring divisor `d` and edges into `g2` with the
/// weights `beta` (indexed by the vertices of `g2`).
///
/// Requires absolute sinks on both inputs, a nonempty linear system
/// for `d` on `g1`, at least one positive `beta` entry, and the
/// balance deg(d) = sum(beta).
pub fn wire(g1: &Graph, g2: &Graph, d: &[i64], beta: &[i64]) -> Result<Graph> {
    if !g1.sink_is_absolute() || !g2.sink_is_absolute() {
        return Err(Error::invalid("wiring requires absolute sinks"));
    }
    let (m1, m2) = (g1.num_vertices(), g2.num_vertices());
    if d.len() != m1 || beta.len() != m2 {
        return Err(Error::invalid("wiring divisor or weight vector has wrong length"));
    }
    if beta.iter().any(|&b| b < 0) || beta.iter().all(|&b| b == 0) {
        return Err(Error::invalid(
            "weights into the second graph must be nonnegative with at least one positive",
        ));
    }
    if d[..m1 - 1].iter().any(|&x| x > 0) {
        return Err(Error::invalid(
            "wiring divisor must be nonpositive away from the first sink",
        ));
    }
    if divisor::degree(d) != beta.iter().sum::<i64>() {
        return Err(Error::invalid(
            "wiring divisor degree must equal the total weight into the second graph",
        ));
    }
    if divisor::linear_system(g1, d)?.is_empty() {
        return Err(Error::invalid("wiring divisor has an empty linear system"));
    }
    let mut overlap = g1.labels().iter().filter(|l| g2.index_of(l.as_str()).is_some());
    if let Some(l) = overlap.next() {
        return Err(Error::invalid(format!("vertex label {l:?} appears in both graphs")));
    }

    // order: nonsinks of g1, s1, all of g2 (sink last)
    let total = m1 + m2;
    let mut labels: Vec<String> = g1.labels().to_vec();
    labels.extend(g2.labels().iter().cloned());
    let mut wt = vec![vec![0i64; total]; total];
    for u in 0..m1 {
        for v in 0..m1 {
            wt[u][v] = g1.wt(u, v);
        }
    }
    for u in 0..m2 {
        for v in 0..m2 {
            wt[m1 + u][m1 + v] = g2.wt(u, v);
        }
    }
    let s1 = m1 - 1;
    for v in 0..m1 - 1 {
        wt[s1][v] = -d[v];
    }
    for (v, &b) in beta.iter().enumerate() {
        wt[s1][m1 + v] = b;
    }
    Graph::from_weights(labels, wt)
}

/// Complete intersection: the homogeneous toppling ideal needs only n
/// minimal generators, i.e. the first Betti number equals n.
pub fn is_complete_intersection(g: &Graph, max_order: u64) -> Result<bool> {
    let table = resolution::graded_betti(g, max_order)?;
    Ok(table.coarse_beta(1) == g.n() as i64)
}

/// Gorenstein: the last Betti number is 1.  Cross-checked against
/// h-vector symmetry whenever the homogenization shortcut applies.
pub fn is_gorenstein(g: &Graph, max_order: u64) -> Result<bool> {
    let table = resolution::graded_betti(g, max_order)?;
    let ans = table.coarse_beta(g.n()) == 1;
    if ideal::homogenization_supported(g) {
        let h = ideal::h_vector(g, max_order)?;
        let mut rev = h.clone();
        rev.reverse();
        if (h == rev) != ans {
            return Err(Error::invalid(
                "Betti-based and h-vector-based Gorenstein tests disagree; internal error",
            ));
        }
    }
    Ok(ans)
}

/// Combined classification report.
#[derive(Clone, Debug)]
pub struct Classification {
    pub loopy_tree: Option<bool>,
    pub complete_intersection: bool,
    pub gorenstein: bool,
    pub beta_1: i64,
    pub beta_n: i64,
    pub h_vector: Vec<i64>,
    pub h_symmetric: bool,
}

pub fn classify(g: &Graph, max_order: u64) -> Result<Classification> {
    let table = resolution::graded_betti(g, max_order)?;
    let h = ideal::h_vector(g, max_order)?;
    let mut rev = h.clone();
    rev.reverse();
    let gorenstein = is_gorenstein(g, max_order)?;
    Ok(Classification {
        loopy_tree: g.is_loopy_tree().ok(),
        complete_intersection: table.coarse_beta(1) == g.n() as i64,
        gorenstein,
        beta_1: table.coarse_beta(1),
        beta_n: table.coarse_beta(g.n()),
        h_vector: h.clone(),
        h_symmetric: h == rev,
    })
}
