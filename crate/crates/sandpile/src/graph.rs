//! Directed weighted multigraphs with a distinguished, globally
//! accessible sink.
//!
//! Vertices are indexed by first appearance in the input, except that
//! the sink is always moved to the last index.  Weights are collapsed
//! multiplicities: `wt(u, v)` counts parallel edges from u to v.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::Int;

#[derive(Clone, Debug)]
pub struct Graph {
    labels: Vec<String>,
    wt: Vec<Vec<i64>>,
}

impl Graph {
    /// Build a graph from explicit parts.  `labels` lists all vertices
    /// with the sink last; `wt[u][v]` is the edge multiplicity u -> v.
    pub fn from_weights(labels: Vec<String>, wt: Vec<Vec<i64>>) -> Result<Graph> {
        let m = labels.len();
        if m == 0 {
            return Err(Error::invalid("graph needs at least one vertex"));
        }
        if wt.len() != m || wt.iter().any(|row| row.len() != m) {
            return Err(Error::invalid("weight matrix shape mismatch"));
        }
        if wt.iter().flatten().any(|&w| w < 0) {
            return Err(Error::invalid("edge weights must be nonnegative"));
        }
        let g = Graph { labels, wt };
        g.check_sink_accessible()?;
        Ok(g)
    }

    /// Parse the line-oriented graph format:
    ///
    /// ```text
    /// # comment
    /// sink s
    /// vertex v1
    /// edge v1 v2 3
    /// uedge v2 s 1
    /// ```
    ///
    /// `sink` is required exactly once; `edge u v w` adds w parallel
    /// edges u -> v; `uedge` adds both directions; bare `vertex` lines
    /// introduce isolated vertices early to pin their order.
    pub fn parse(text: &str) -> Result<Graph> {
        let mut order: Vec<String> = Vec::new();
        let mut sink: Option<String> = None;
        let mut edges: Vec<(String, String, i64, bool)> = Vec::new();

        let note = |order: &mut Vec<String>, id: &str| {
            if !order.iter().any(|x| x == id) {
                order.push(id.to_string());
            }
        };

        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: String| Error::Parse {
                line: idx + 1,
                msg,
            };
            match toks[0] {
                "sink" => {
                    if toks.len() != 2 {
                        return Err(err("sink takes one vertex id".into()));
                    }
                    if sink.is_some() {
                        return Err(err("duplicate sink line".into()));
                    }
                    note(&mut order, toks[1]);
                    sink = Some(toks[1].to_string());
                }
                "vertex" => {
                    if toks.len() != 2 {
                        return Err(err("vertex takes one id".into()));
                    }
                    note(&mut order, toks[1]);
                }
                "edge" | "uedge" => {
                    if toks.len() != 4 {
                        return Err(err(format!("{} takes: <u> <v> <w>", toks[0])));
                    }
                    let w: i64 = toks[3]
                        .parse()
                        .map_err(|_| err(format!("bad weight {:?}", toks[3])))?;
                    if w < 1 {
                        return Err(err("edge weight must be >= 1".into()));
                    }
                    note(&mut order, toks[1]);
                    note(&mut order, toks[2]);
                    edges.push((
                        toks[1].to_string(),
                        toks[2].to_string(),
                        w,
                        toks[0] == "uedge",
                    ));
                }
                other => return Err(err(format!("unknown directive {other:?}"))),
            }
        }

        let sink = sink.ok_or_else(|| Error::invalid("missing sink line"))?;
        // Sink goes last; everything else keeps first-appearance order.
        let mut labels: Vec<String> = order.iter().filter(|&l| *l != sink).cloned().collect();
        labels.push(sink);
        let m = labels.len();
        let index = |id: &str| labels.iter().position(|l| l == id).expect("noted");
        let mut wt = vec![vec![0i64; m]; m];
        for (u, v, w, undirected) in edges {
            let (ui, vi) = (index(&u), index(&v));
            wt[ui][vi] += w;
            if undirected && ui != vi {
                wt[vi][ui] += w;
            }
        }
        Graph::from_weights(labels, wt)
    }

    fn check_sink_accessible(&self) -> Result<()> {
        let dist = self.distances_to_sink();
        for v in 0..self.num_vertices() {
            if dist[v].is_none() {
                return Err(Error::invalid(format!(
                    "vertex {} has no directed path to the sink",
                    self.labels[v]
                )));
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    /// Number of nonsink vertices.
    pub fn n(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn sink(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn wt(&self, u: usize, v: usize) -> i64 {
        self.wt[u][v]
    }

    pub fn outdeg(&self, v: usize) -> i64 {
        self.wt[v].iter().sum()
    }

    pub fn indeg(&self, v: usize) -> i64 {
        (0..self.num_vertices()).map(|u| self.wt[u][v]).sum()
    }

    pub fn is_undirected(&self) -> bool {
        let m = self.num_vertices();
        (0..m).all(|u| (0..m).all(|v| self.wt[u][v] == self.wt[v][u]))
    }

    pub fn is_eulerian(&self) -> bool {
        (0..self.num_vertices()).all(|v| self.indeg(v) == self.outdeg(v))
    }

    /// Weighted edge count of an undirected graph (each unordered pair
    /// counted once with its multiplicity; loops count their weight).
    pub fn num_edges_undirected(&self) -> Result<i64> {
        if !self.is_undirected() {
            return Err(Error::DirectedInput("edge count".into()));
        }
        let m = self.num_vertices();
        let mut e = 0;
        for u in 0..m {
            for v in u..m {
                e += self.wt[u][v];
            }
        }
        Ok(e)
    }

    /// Genus (cycle rank) of an undirected graph: #E - #V + 1.
    pub fn genus(&self) -> Result<i64> {
        Ok(self.num_edges_undirected()? - self.num_vertices() as i64 + 1)
    }

    /// Is this an undirected tree with extra loops allowed?
    pub fn is_loopy_tree(&self) -> Result<bool> {
        if !self.is_undirected() {
            return Err(Error::DirectedInput("loopy tree test".into()));
        }
        let m = self.num_vertices();
        // A loopy tree is a weighted tree (loops would not affect the
        // Laplacian), so weights are irrelevant: the underlying simple
        // graph must be a tree.  Connectivity is implied by sink
        // accessibility, so it suffices to count adjacent pairs.
        let simple_edges = (0..m)
            .flat_map(|u| (u + 1..m).map(move |v| (u, v)))
            .filter(|&(u, v)| self.wt[u][v] > 0)
            .count();
        Ok(simple_edges == m - 1)
    }

    /// Full (n+1)x(n+1) Laplacian; column v is
    /// `outdeg(v) e_v - sum_u wt(v, u) e_u`.
    pub fn laplacian(&self) -> Matrix<Int> {
        let m = self.num_vertices();
        Matrix::from_fn(m, m, |u, v| {
            if u == v {
                Int::from(self.outdeg(v) - self.wt[v][v])
            } else {
                Int::from(-self.wt[v][u])
            }
        })
    }

    /// Reduced Laplacian: the full Laplacian with the sink row and
    /// column deleted.
    pub fn reduced_laplacian(&self) -> Matrix<Int> {
        let n = self.n();
        Matrix::from_fn(n, n, |u, v| {
            if u == v {
                Int::from(self.outdeg(v) - self.wt[v][v])
            } else {
                Int::from(-self.wt[v][u])
            }
        })
    }

    /// Same data as [`reduced_laplacian`](Self::reduced_laplacian) in
    /// machine integers, column-indexed: `cols[v][u]` is entry (u, v).
    pub fn reduced_laplacian_cols(&self) -> Vec<Vec<i64>> {
        let n = self.n();
        (0..n)
            .map(|v| {
                (0..n)
                    .map(|u| {
                        if u == v {
                            self.outdeg(v) - self.wt[v][v]
                        } else {
                            -self.wt[v][u]
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Total weight of spanning trees directed into the sink
    /// (matrix-tree: the reduced Laplacian determinant).
    pub fn spanning_tree_weight(&self) -> Int {
        self.reduced_laplacian().det()
    }

    /// Unweighted directed distance from each vertex to the sink.
    pub fn distances_to_sink(&self) -> Vec<Option<u64>> {
        let m = self.num_vertices();
        let mut dist: Vec<Option<u64>> = vec![None; m];
        dist[self.sink()] = Some(0);
        let mut queue = std::collections::VecDeque::from([self.sink()]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].expect("queued vertices have distances");
            for u in 0..m {
                if self.wt[u][v] > 0 && dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Does the sink have no outgoing edges?
    pub fn sink_is_absolute(&self) -> bool {
        self.outdeg(self.sink()) == 0
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::Graph;

    /// Two cycles sharing structure, one heavy return edge at the sink.
    pub fn running_example() -> Graph {
        Graph::parse(
            "sink s\n\
             edge v1 v2 1\n\
             edge v2 v1 2\n\
             edge v2 s 1\n\
             edge v3 s 1\n\
             edge s v3 5\n\
             uedge v1 v3 3\n\
             uedge v2 v3 1\n",
        )
        .unwrap()
    }

    /// Four vertices, absolute sink, one weight-2 edge.
    pub fn square_example() -> Graph {
        Graph::parse(
            "sink v4\n\
             vertex v1\n\
             vertex v2\n\
             vertex v3\n\
             uedge v1 v2 1\n\
             edge v1 v3 1\n\
             edge v2 v4 1\n\
             edge v3 v2 2\n\
             edge v3 v4 1\n",
        )
        .unwrap()
    }

    /// Undirected genus-2 graph on four vertices.
    pub fn diamond() -> Graph {
        Graph::parse(
            "sink s\n\
             vertex x\n\
             vertex y\n\
             vertex z\n\
             uedge x y 1\n\
             uedge y s 1\n\
             uedge s z 1\n\
             uedge z x 1\n\
             uedge y z 1\n",
        )
        .unwrap()
    }

    /// Directed graph with an absolute sink and a Gorenstein ideal.
    pub fn gorenstein_example() -> Graph {
        Graph::parse(
            "sink v4\n\
             vertex v1\n\
             vertex v2\n\
             vertex v3\n\
             edge v1 v2 5\n\
             edge v2 v1 1\n\
             edge v2 v3 1\n\
             edge v3 v2 4\n\
             edge v3 v4 1\n\
             edge v3 v1 1\n",
        )
        .unwrap()
    }

    /// Undirected triangle.
    pub fn triangle() -> Graph {
        Graph::parse(
            "sink s\n\
             uedge a b 1\n\
             uedge b s 1\n\
             uedge s a 1\n",
        )
        .unwrap()
    }

    /// Directed path v1 -> v2 -> s.
    pub fn directed_path3() -> Graph {
        Graph::parse("sink s\nedge v1 v2 1\nedge v2 s 1\n").unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn vertex_order_sink_last() {
        let g = running_example();
        assert_eq!(g.labels(), &["v1", "v2", "v3", "s"]);
        assert_eq!(g.sink(), 3);
        assert_eq!(g.n(), 3);
    }

    #[test]
    fn reduced_laplacian_running_example() {
        let g = running_example();
        let expect = Matrix::from_i64_rows(&[vec![4, -2, -3], vec![-1, 4, -1], vec![-3, -1, 5]]);
        assert_eq!(g.reduced_laplacian(), expect);
        assert_eq!(g.spanning_tree_weight(), Int::from(21));
        assert!(!g.is_eulerian());
        assert!(!g.is_undirected());
        assert!(!g.sink_is_absolute());
    }

    #[test]
    fn laplacian_columns_sum_against_outdeg() {
        for g in [running_example(), square_example(), diamond()] {
            let lap = g.laplacian();
            let m = g.num_vertices();
            for v in 0..m {
                // column sums of the full Laplacian vanish
                let mut s = Int::from(0);
                for u in 0..m {
                    s += lap[(u, v)].clone();
                }
                assert!(s == Int::from(0), "column {v} sums to {s}");
                assert_eq!(lap[(v, v)], Int::from(g.outdeg(v) - g.wt(v, v)));
            }
        }
    }

    #[test]
    fn spanning_tree_weight_matches_enumeration() {
        // Oracle: pick one outgoing target per nonsink vertex, keep the
        // choices whose functional graph reaches the sink from
        // everywhere, and sum the weight products.
        for g in [
            running_example(),
            square_example(),
            diamond(),
            triangle(),
            directed_path3(),
        ] {
            let n = g.n();
            let m = g.num_vertices();
            let mut total = 0i64;
            let mut choice = vec![0usize; n];
            'outer: loop {
                let ok = (0..n).all(|v| g.wt(v, choice[v]) > 0);
                if ok {
                    // follow the chosen edges; all must drain to the sink
                    let drains = (0..n).all(|start| {
                        let mut cur = start;
                        for _ in 0..=m {
                            if cur == g.sink() {
                                return true;
                            }
                            cur = choice[cur];
                        }
                        false
                    });
                    if drains {
                        total += (0..n).map(|v| g.wt(v, choice[v])).product::<i64>();
                    }
                }
                for v in 0..n {
                    choice[v] += 1;
                    if choice[v] < m {
                        continue 'outer;
                    }
                    choice[v] = 0;
                }
                break;
            }
            assert_eq!(g.spanning_tree_weight(), Int::from(total), "graph mismatch");
        }
    }

    #[test]
    fn undirected_classification() {
        let d = diamond();
        assert!(d.is_undirected());
        assert!(d.is_eulerian());
        assert_eq!(d.genus().unwrap(), 2);
        assert_eq!(d.num_edges_undirected().unwrap(), 5);
        assert!(!d.is_loopy_tree().unwrap());

        // a weighted tree is still a loopy tree
        let path = Graph::parse("sink s\nuedge a b 2\nuedge b s 1\n");
        assert!(path.unwrap().is_loopy_tree().unwrap());
        let tree = Graph::parse("sink s\nuedge a b 1\nuedge b s 1\nedge b b 2\n").unwrap();
        assert!(tree.is_loopy_tree().unwrap());
        assert_eq!(tree.genus().unwrap(), 2);
    }

    #[test]
    fn distances_and_validation() {
        let g = running_example();
        let d = g.distances_to_sink();
        assert_eq!(d, vec![Some(2), Some(1), Some(1), Some(0)]);

        assert!(Graph::parse("sink s\nedge s a 1\n").is_err()); // a can't reach s
        assert!(Graph::parse("edge a b 1\n").is_err()); // no sink
        assert!(Graph::parse("sink s\nsink t\n").is_err());
        assert!(Graph::parse("sink s\nedge a s 0\n").is_err());
        assert!(Graph::parse("sink s\nfrob a s 1\n").is_err());
        assert!(Graph::parse("sink s\nvertex a\nuedge a s 1\nvertex lonely\n").is_err());
    }

    #[test]
    fn comments_and_accumulation() {
        let g = Graph::parse("# header\nsink s # trailing\nedge a s 1\nedge a s 2\n").unwrap();
        assert_eq!(g.wt(0, 1), 3);
        assert_eq!(g.outdeg(0), 3);
    }
}
