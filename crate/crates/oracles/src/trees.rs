//! Random acyclic decoding instances with known-consistent syndromes.

use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Debug)]
pub struct TreeInstance {
    pub h: Vec<Vec<u8>>,
    pub priors: Vec<f64>,
    pub syndrome: Vec<u8>,
    /// Longest path in the Tanner graph, in edges.
    pub diameter: usize,
}

fn multiply(h: &[Vec<u8>], e: &[u8]) -> Vec<u8> {
    h.iter()
        .map(|row| row.iter().zip(e).fold(0, |acc, (&a, &b)| acc ^ (a & b)))
        .collect()
}

/// Graph diameter of the Tanner graph by BFS from every node.
fn tanner_diameter(h: &[Vec<u8>], cols: usize) -> usize {
    let m = h.len();
    let nodes = cols + m;
    let mut adj = vec![Vec::new(); nodes];
    for (j, row) in h.iter().enumerate() {
        for (i, &b) in row.iter().enumerate() {
            if b == 1 {
                adj[i].push(cols + j);
                adj[cols + j].push(i);
            }
        }
    }
    let mut best = 0;
    for start in 0..nodes {
        let mut dist = vec![usize::MAX; nodes];
        dist[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    best = best.max(dist[v]);
                    queue.push_back(v);
                }
            }
        }
    }
    best
}

/// Adds checks of degree 2 to 4 over `vars` so that the checks and
/// variables form a forest.
fn grow_forest<R: Rng>(rng: &mut R, vars: &[usize], cols: usize) -> Vec<Vec<u8>> {
    let mut order = vars.to_vec();
    order.shuffle(rng);
    let mut rows = Vec::new();
    let mut placed: Vec<usize> = Vec::new();
    let mut pending = order.into_iter().peekable();
    if let Some(first) = pending.next() {
        placed.push(first);
    }
    while pending.peek().is_some() {
        // one already-placed variable joins 1..=3 fresh ones, keeping it a tree
        let anchor = placed[rng.gen_range(0..placed.len())];
        let fresh = rng.gen_range(1..=3);
        let mut row = vec![0u8; cols];
        row[anchor] = 1;
        for _ in 0..fresh {
            if let Some(v) = pending.next() {
                row[v] = 1;
                placed.push(v);
            }
        }
        rows.push(row);
    }
    rows
}

/// An acyclic instance on `cols` columns (a multiple of `col_multiple`)
/// with at most `max_vars` variables, check degrees of at least two and
/// priors in `[0.02, 0.45]`.
pub fn random_tree<R: Rng>(rng: &mut R, max_vars: usize, col_multiple: usize) -> TreeInstance {
    let vars = rng.gen_range(2..=max_vars);
    let cols = vars.div_ceil(col_multiple) * col_multiple;
    let all: Vec<usize> = (0..cols).collect();
    let used: Vec<usize> = all.choose_multiple(rng, vars).copied().collect();
    // keep the forest connected only over `used`; the rest stay isolated
    let h = grow_forest(rng, &used, cols);
    let h = if h.is_empty() { vec![vec![0u8; cols]] } else { h };
    let priors: Vec<f64> = (0..cols).map(|_| rng.gen_range(0.02..0.45)).collect();
    let e: Vec<u8> = priors.iter().map(|&p| rng.gen_bool(p) as u8).collect();
    let syndrome = multiply(&h, &e);
    let diameter = tanner_diameter(&h, cols);
    TreeInstance {
        h,
        priors,
        syndrome,
        diameter,
    }
}

/// A `3n`-column instance on which decoupled BP with the one-bit-per-qubit
/// restraint is exact.
///
/// Each qubit either has one live column (the other two carry zero prior)
/// taking part in an acyclic check forest, or two live columns that share
/// one isolated weight-2 check and appear nowhere else. At most
/// `max_live` columns have nonzero prior.
pub fn random_one_hot_forest<R: Rng>(rng: &mut R, max_live: usize) -> TreeInstance {
    let n = rng.gen_range(2..=max_live / 2 + 1);
    let cols = 3 * n;
    let mut priors = vec![0.0; cols];
    let mut singles = Vec::new();
    let mut pairs = Vec::new();
    let mut live = 0;
    for q in 0..n {
        let kind = rng.gen_range(0..10);
        if kind < 3 && live + 2 <= max_live {
            let mut ks = [0usize, 1, 2];
            ks.shuffle(rng);
            let (a, b) = (q + ks[0] * n, q + ks[1] * n);
            priors[a] = rng.gen_range(0.02..0.45);
            priors[b] = rng.gen_range(0.02..0.45);
            pairs.push((a, b));
            live += 2;
        } else if kind < 9 && live < max_live {
            let c = q + rng.gen_range(0..3) * n;
            priors[c] = rng.gen_range(0.02..0.45);
            singles.push(c);
            live += 1;
        }
    }
    let mut h = grow_forest(rng, &singles, cols);
    for &(a, b) in &pairs {
        let mut row = vec![0u8; cols];
        row[a] = 1;
        row[b] = 1;
        h.push(row);
    }
    if h.is_empty() {
        h.push(vec![0u8; cols]);
    }
    h.shuffle(rng);
    let e: Vec<u8> = loop {
        let e: Vec<u8> = priors.iter().map(|&p| rng.gen_bool(p) as u8).collect();
        if (0..n).all(|q| e[q] + e[q + n] + e[q + 2 * n] <= 1) {
            break e;
        }
    };
    let syndrome = multiply(&h, &e);
    let diameter = tanner_diameter(&h, cols);
    TreeInstance {
        h,
        priors,
        syndrome,
        diameter,
    }
}
