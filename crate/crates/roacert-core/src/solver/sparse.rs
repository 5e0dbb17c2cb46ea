//! Sparse kernels: compressed-sparse-column matrices, reverse Cuthill–McKee
//! ordering, and an up-looking LDLᵀ factorization for the quasi-definite
//! splitting systems.

use alloc::vec::Vec;

/// Compressed sparse column matrix.
#[derive(Debug, Clone)]
pub struct Csc {
    pub nrows: usize,
    pub ncols: usize,
    pub colptr: Vec<usize>,
    pub rowind: Vec<usize>,
    pub values: Vec<f64>,
}

impl Csc {
    /// Builds from (row, col, value) triplets, summing duplicates.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Csc {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&i| (triplets[i].1, triplets[i].0));
        let mut colptr = alloc::vec![0usize; ncols + 1];
        let mut rowind = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for i in order {
            let (r, c, v) = triplets[i];
            debug_assert!(r < nrows && c < ncols);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                colptr[c + 1] += 1;
                rowind.push(r);
                values.push(v);
                last = Some((r, c));
            }
        }
        for c in 0..ncols {
            colptr[c + 1] += colptr[c];
        }
        Csc { nrows, ncols, colptr, rowind, values }
    }

    /// out += A x
    pub fn matvec_acc(&self, x: &[f64], out: &mut [f64]) {
        for c in 0..self.ncols {
            let xc = x[c];
            if xc == 0.0 {
                continue;
            }
            for p in self.colptr[c]..self.colptr[c + 1] {
                out[self.rowind[p]] += self.values[p] * xc;
            }
        }
    }

    /// out += Aᵀ y
    pub fn matvec_t_acc(&self, y: &[f64], out: &mut [f64]) {
        for c in 0..self.ncols {
            let mut acc = 0.0;
            for p in self.colptr[c]..self.colptr[c + 1] {
                acc += self.values[p] * y[self.rowind[p]];
            }
            out[c] += acc;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.nrows];
        self.matvec_acc(x, &mut out);
        out
    }

    pub fn matvec_t(&self, y: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.ncols];
        self.matvec_t_acc(y, &mut out);
        out
    }
}

/// Reverse Cuthill–McKee ordering of a symmetric sparsity pattern given as an
/// adjacency list. Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut visited = alloc::vec![false; n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut queue: Vec<usize> = Vec::new();
    loop {
        // lowest-degree unvisited start node
        let start = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| adj[i].len());
        let Some(start) = start else { break };
        visited[start] = true;
        queue.push(start);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            order.push(u);
            let mut nbrs: Vec<usize> =
                adj[u].iter().copied().filter(|&v| !visited[v]).collect();
            nbrs.sort_by_key(|&v| (adj[v].len(), v));
            for v in nbrs {
                visited[v] = true;
                queue.push(v);
            }
        }
        queue.clear();
    }
    order.reverse();
    order
}

/// LDLᵀ factorization of a symmetric quasi-definite matrix, stored as the
/// upper triangle (diagonal included) in CSC with sorted row indices.
#[derive(Debug, Clone)]
pub struct LdlFactor {
    n: usize,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    d_inv: Vec<f64>,
}

impl LdlFactor {
    /// Up-looking factorization; returns `None` on a zero pivot (the matrix
    /// was not quasi-definite) or non-finite values.
    pub fn factor(upper: &Csc) -> Option<LdlFactor> {
        let n = upper.ncols;
        let mut parent = alloc::vec![usize::MAX; n];
        let mut flag = alloc::vec![usize::MAX; n];
        let mut lnz = alloc::vec![0usize; n];
        // symbolic: elimination tree and column counts
        for k in 0..n {
            flag[k] = k;
            for p in upper.colptr[k]..upper.colptr[k + 1] {
                let mut i = upper.rowind[p];
                while i < k && flag[i] != k {
                    if parent[i] == usize::MAX {
                        parent[i] = k;
                    }
                    lnz[i] += 1;
                    flag[i] = k;
                    i = parent[i];
                }
            }
        }
        let mut lp = alloc::vec![0usize; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + lnz[k];
        }
        let nnz = lp[n];
        let mut li = alloc::vec![0usize; nnz];
        let mut lx = alloc::vec![0.0f64; nnz];
        let mut d = alloc::vec![0.0f64; n];
        let mut y = alloc::vec![0.0f64; n];
        let mut pattern = alloc::vec![0usize; n];
        let mut next = alloc::vec![0usize; n]; // next free slot per column of L
        next.copy_from_slice(&lp[..n]);
        let mut flag2 = alloc::vec![usize::MAX; n];
        for k in 0..n {
            let mut top = n;
            flag2[k] = k;
            for p in upper.colptr[k]..upper.colptr[k + 1] {
                let i0 = upper.rowind[p];
                if i0 > k {
                    return None; // not upper triangular
                }
                y[i0] += upper.values[p];
                let mut len = 0usize;
                let mut i = i0;
                while flag2[i] != k {
                    pattern[len] = i;
                    len += 1;
                    flag2[i] = k;
                    i = parent[i];
                }
                while len > 0 {
                    len -= 1;
                    top -= 1;
                    pattern[top] = pattern[len];
                }
            }
            d[k] = y[k];
            y[k] = 0.0;
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = 0.0;
                for p in lp[i]..next[i] {
                    y[li[p]] -= lx[p] * yi;
                }
                let lki = yi / d[i];
                d[k] -= lki * yi;
                li[next[i]] = k;
                lx[next[i]] = lki;
                next[i] += 1;
            }
            if d[k] == 0.0 || !d[k].is_finite() {
                return None;
            }
        }
        let d_inv = d.iter().map(|&v| 1.0 / v).collect();
        Some(LdlFactor { n, lp, li, lx, d_inv })
    }

    /// In-place solve of (LDLᵀ) x = rhs.
    pub fn solve(&self, rhs: &mut [f64]) {
        debug_assert_eq!(rhs.len(), self.n);
        for j in 0..self.n {
            let xj = rhs[j];
            if xj != 0.0 {
                for p in self.lp[j]..self.lp[j + 1] {
                    rhs[self.li[p]] -= self.lx[p] * xj;
                }
            }
        }
        for j in 0..self.n {
            rhs[j] *= self.d_inv[j];
        }
        for j in (0..self.n).rev() {
            let mut acc = rhs[j];
            for p in self.lp[j]..self.lp[j + 1] {
                acc -= self.lx[p] * rhs[self.li[p]];
            }
            rhs[j] = acc;
        }
    }
}

/// Permuted LDLᵀ solver for a full symmetric matrix given as triplets of its
/// full (both triangles) pattern.
#[derive(Debug, Clone)]
pub struct PermutedLdl {
    factor: LdlFactor,
    perm: Vec<usize>,  // perm[new] = old
    iperm: Vec<usize>, // iperm[old] = new
}

impl PermutedLdl {
    /// `entries` must contain every nonzero of the symmetric matrix exactly
    /// once per (i, j) including both triangles and the diagonal.
    pub fn new(n: usize, entries: &[(usize, usize, f64)]) -> Option<PermutedLdl> {
        let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
        for &(i, j, _) in entries {
            if i != j {
                adj[i].push(j);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        let perm = reverse_cuthill_mckee(&adj);
        let mut iperm = alloc::vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }
        let permuted: Vec<(usize, usize, f64)> = entries
            .iter()
            .filter_map(|&(i, j, v)| {
                let (pi, pj) = (iperm[i], iperm[j]);
                (pi <= pj).then_some((pi, pj, v))
            })
            .collect();
        let upper = Csc::from_triplets(n, n, &permuted);
        let factor = LdlFactor::factor(&upper)?;
        Some(PermutedLdl { factor, perm, iperm })
    }

    pub fn solve(&self, rhs: &[f64], out: &mut [f64]) {
        let n = rhs.len();
        let mut work = alloc::vec![0.0; n];
        for old in 0..n {
            work[self.iperm[old]] = rhs[old];
        }
        self.factor.solve(&mut work);
        for new in 0..n {
            out[self.perm[new]] = work[new];
        }
    }
}
