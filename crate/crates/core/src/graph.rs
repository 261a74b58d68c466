//! Finite symmetric graphs, graph signals and user-similarity graphs built from ratings.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

/// Undirected weighted graph stored as a dense symmetric weight matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    weights: Matrix,
}

impl Graph {
    /// Builds a graph from an undirected edge list. Unlisted pairs get weight 0.
    ///
    /// Repeating an edge (in either orientation) is accepted only when the weight agrees.
    pub fn new(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "a graph needs at least one node".into(),
            ));
        }
        let mut weights = Matrix::zeros(n, n);
        let mut seen = HashSet::new();
        for &(i, j, w) in edges {
            for idx in [i, j] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if !w.is_finite() {
                return Err(Error::NonFinite(format!("weight of edge ({i}, {j})")));
            }
            let key = (i.min(j), i.max(j));
            if !seen.insert(key) {
                let first = weights[(i, j)];
                if first != w {
                    return Err(Error::ConflictingEdge {
                        i,
                        j,
                        first,
                        second: w,
                    });
                }
            }
            weights[(i, j)] = w;
            weights[(j, i)] = w;
        }
        Ok(Self { weights })
    }

    /// Wraps an existing weight matrix. It must be square, finite and exactly symmetric.
    pub fn from_weights(weights: Matrix) -> Result<Self> {
        if !weights.is_square() || weights.rows() == 0 {
            return Err(Error::InvalidParameter(format!(
                "weight matrix must be square and non-empty, got {}x{}",
                weights.rows(),
                weights.cols()
            )));
        }
        if !weights.is_finite() {
            return Err(Error::NonFinite("weight matrix entry".into()));
        }
        let asymmetry = weights.asymmetry();
        if asymmetry != 0.0 {
            return Err(Error::NotSymmetric { asymmetry });
        }
        Ok(Self { weights })
    }

    pub fn n(&self) -> usize {
        self.weights.rows()
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    /// Nonzero upper-triangle entries as `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let w = self.weights[(i, j)];
                if w != 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    /// The shift operator; this library always uses the weight (adjacency) matrix.
    pub fn shift_operator(&self) -> ShiftOperator {
        ShiftOperator {
            matrix: self.weights.clone(),
        }
    }

    /// Relabels nodes so that node `i` becomes node `pi[i]`, carrying the signal along.
    pub fn permute(&self, x: &GraphSignal, pi: &Permutation) -> Result<(Graph, GraphSignal)> {
        let n = self.n();
        check_len(n, x.len())?;
        check_len(n, pi.len())?;
        let p = pi.as_slice();
        let mut weights = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                weights[(p[i], p[j])] = self.weights[(i, j)];
            }
        }
        let mut values = vec![0.0; n];
        for (i, &v) in x.values().iter().enumerate() {
            values[p[i]] = v;
        }
        Ok((Graph { weights }, GraphSignal { values }))
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// Real value per node.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphSignal {
    values: Vec<f64>,
}

impl GraphSignal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("signal value at node {i}")));
        }
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
        }
    }

    /// Checks that the signal lives on `g`.
    pub fn on(self, g: &Graph) -> Result<Self> {
        check_len(g.n(), self.len())?;
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        dot(&self.values, &self.values).sqrt()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftOperator {
    matrix: Matrix,
}

impl ShiftOperator {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }
}

/// A bijection on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut hit = vec![false; n];
        for &p in &map {
            if p >= n {
                return Err(Error::NotAPermutation(format!("{p} out of range for {n}")));
            }
            if std::mem::replace(&mut hit[p], true) {
                return Err(Error::NotAPermutation(format!("{p} appears twice")));
            }
        }
        Ok(Self(map))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Self(inv)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rating {
    pub user: usize,
    pub item: usize,
    pub rating: f64,
}

/// User/item ratings with 0-based ids. Ratings lie in `[1, 5]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatingTable {
    num_users: usize,
    num_items: usize,
    entries: Vec<Rating>,
    /// Per-user `(item, rating)` lists sorted by item.
    by_user: Vec<Vec<(usize, f64)>>,
}

pub const MIN_RATING: f64 = 1.0;
pub const MAX_RATING: f64 = 5.0;

impl RatingTable {
    pub fn new(num_users: usize, num_items: usize, entries: Vec<Rating>) -> Result<Self> {
        if num_users == 0 || num_items == 0 {
            return Err(Error::InvalidParameter(
                "rating table needs at least one user and one item".into(),
            ));
        }
        let mut by_user = vec![Vec::new(); num_users];
        for r in &entries {
            if r.user >= num_users {
                return Err(Error::IndexOutOfRange {
                    index: r.user,
                    n: num_users,
                });
            }
            if r.item >= num_items {
                return Err(Error::IndexOutOfRange {
                    index: r.item,
                    n: num_items,
                });
            }
            if !(MIN_RATING..=MAX_RATING).contains(&r.rating) {
                return Err(Error::OutOfRange {
                    value: r.rating,
                    lo: MIN_RATING,
                    hi: MAX_RATING,
                });
            }
            by_user[r.user].push((r.item, r.rating));
        }
        for (user, list) in by_user.iter_mut().enumerate() {
            list.sort_by_key(|&(item, _)| item);
            if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::Data(format!(
                    "duplicate rating for user {user}, item {}",
                    w[0].0
                )));
            }
        }
        Ok(Self {
            num_users,
            num_items,
            entries,
            by_user,
        })
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn entries(&self) -> &[Rating] {
        &self.entries
    }

    /// Items rated by `user`, sorted by item id.
    pub fn user_ratings(&self, user: usize) -> &[(usize, f64)] {
        &self.by_user[user]
    }

    pub fn rating(&self, user: usize, item: usize) -> Option<f64> {
        let list = &self.by_user[user];
        list.binary_search_by_key(&item, |&(i, _)| i)
            .ok()
            .map(|k| list[k].1)
    }

    pub fn user_mean(&self, user: usize) -> Option<f64> {
        let list = &self.by_user[user];
        if list.is_empty() {
            return None;
        }
        Some(list.iter().map(|&(_, r)| r).sum::<f64>() / list.len() as f64)
    }
}

/// Pearson correlation of two users over their co-rated items.
///
/// Zero when fewer than two items are shared or either restricted vector is constant.
pub fn pearson_correlation(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                xs.push(a[i].1);
                ys.push(b[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    if xs.len() < 2 {
        return 0.0;
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// User-similarity graph over `users` (in the given order) with Pearson weights.
pub fn pearson_similarity_graph(r: &RatingTable, users: &[usize]) -> Result<Graph> {
    if users.len() < 2 {
        return Err(Error::InvalidParameter(
            "a similarity graph needs at least two users".into(),
        ));
    }
    let mut seen = HashSet::new();
    for &u in users {
        if u >= r.num_users() {
            return Err(Error::IndexOutOfRange {
                index: u,
                n: r.num_users(),
            });
        }
        if !seen.insert(u) {
            return Err(Error::InvalidParameter(format!("user {u} selected twice")));
        }
    }
    let n = users.len();
    let mut weights = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let w = pearson_correlation(r.user_ratings(users[i]), r.user_ratings(users[j]));
            weights[(i, j)] = w;
            weights[(j, i)] = w;
        }
    }
    for (i, &user) in users.iter().enumerate() {
        if weights.row(i).iter().all(|&w| w == 0.0) {
            log::warn!("user {user} has no usable co-ratings with the other selected users");
        }
    }
    Graph::from_weights(weights)
}
