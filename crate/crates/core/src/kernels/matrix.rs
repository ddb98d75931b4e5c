//! Symmetric block matrices backing step kernels.
//!
//! Embedded graphs can have tens of thousands of blocks, so besides a plain
//! dense matrix there are structured variants (circulant, lifted from a
//! coarser matrix, evaluated from a function) that only store what they need.
//! All of them expose the same two primitives: random access and a
//! matrix-vector product.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Scalar;

/// Function kernel evaluated at grid points.
pub type GridFn<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

/// Square symmetric matrix indexed by block.
#[derive(Clone)]
pub enum BlockMatrix<T: Scalar> {
    /// Row-major storage.
    Dense {
        size: usize,
        data: Arc<[T]>,
    },
    /// `value(h, k) = row[(k - h) mod size]`.
    Circulant(Arc<Circulant<T>>),
    /// `value(h, k) = base(map[h], map[k])`, optionally with a zeroed diagonal.
    Lifted {
        base: Arc<BlockMatrix<T>>,
        map: Arc<[usize]>,
        zero_diagonal: bool,
    },
    /// `value(h, k) = f(h / size, k / size)` off the diagonal, zero on it.
    Grid {
        size: usize,
        f: GridFn<T>,
    },
    Sum(Arc<BlockMatrix<T>>, Arc<BlockMatrix<T>>),
    Scaled(T, Arc<BlockMatrix<T>>),
}

impl<T: Scalar> fmt::Debug for BlockMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dense { size, .. } => write!(f, "Dense({size})"),
            Self::Circulant(c) => write!(f, "Circulant({})", c.row.len()),
            Self::Lifted {
                base,
                map,
                zero_diagonal,
            } => write!(
                f,
                "Lifted({} <- {base:?}, zero_diagonal={zero_diagonal})",
                map.len()
            ),
            Self::Grid { size, .. } => write!(f, "Grid({size})"),
            Self::Sum(a, b) => write!(f, "Sum({a:?}, {b:?})"),
            Self::Scaled(s, m) => write!(f, "Scaled({s}, {m:?})"),
        }
    }
}

/// Circulant matrix with a cached spectrum for FFT products.
pub struct Circulant<T: Scalar> {
    row: Vec<T>,
    spectrum: OnceLock<Spectrum<T>>,
}

struct Spectrum<T: Scalar> {
    eigen: Vec<Complex<T>>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

/// Below this size the circulant product is done directly.
const FFT_THRESHOLD: usize = 96;

impl<T: Scalar> Circulant<T> {
    pub fn new(row: Vec<T>) -> Self {
        Self {
            row,
            spectrum: OnceLock::new(),
        }
    }

    pub fn row(&self) -> &[T] {
        &self.row
    }

    fn spectrum(&self) -> &Spectrum<T> {
        self.spectrum.get_or_init(|| {
            let n = self.row.len();
            let mut planner = FftPlanner::new();
            let forward = planner.plan_fft_forward(n);
            let inverse = planner.plan_fft_inverse(n);
            let mut eigen: Vec<Complex<T>> = self
                .row
                .iter()
                .map(|&r| Complex::new(r, T::zero()))
                .collect();
            forward.process(&mut eigen);
            Spectrum {
                eigen,
                forward,
                inverse,
            }
        })
    }

    fn matvec(&self, x: &[T]) -> Vec<T> {
        let n = self.row.len();
        if n <= FFT_THRESHOLD {
            return (0..n)
                .map(|h| {
                    let mut acc = T::zero();
                    for (k, &xk) in x.iter().enumerate() {
                        acc += self.row[(k + n - h) % n] * xk;
                    }
                    acc
                })
                .collect();
        }
        // Symmetric circulant: the product is the circular convolution row * x.
        let spec = self.spectrum();
        let mut buf: Vec<Complex<T>> = x.iter().map(|&v| Complex::new(v, T::zero())).collect();
        spec.forward.process(&mut buf);
        for (b, e) in buf.iter_mut().zip(&spec.eigen) {
            *b *= *e;
        }
        spec.inverse.process(&mut buf);
        let inv_n = T::one() / T::from_usize_lossy(n);
        buf.into_iter().map(|c| c.re * inv_n).collect()
    }
}

impl<T: Scalar> BlockMatrix<T> {
    pub fn dense(size: usize, data: Vec<T>) -> Self {
        assert_eq!(
            data.len(),
            size * size,
            "dense block matrix must be size x size"
        );
        Self::Dense {
            size,
            data: data.into(),
        }
    }

    pub fn circulant(row: Vec<T>) -> Self {
        Self::Circulant(Arc::new(Circulant::new(row)))
    }

    pub fn lifted(base: BlockMatrix<T>, map: Vec<usize>, zero_diagonal: bool) -> Self {
        debug_assert!(map.iter().all(|&b| b < base.size()));
        Self::Lifted {
            base: Arc::new(base),
            map: map.into(),
            zero_diagonal,
        }
    }

    pub fn grid(size: usize, f: GridFn<T>) -> Self {
        Self::Grid { size, f }
    }

    pub fn size(&self) -> usize {
        match self {
            Self::Dense { size, .. } | Self::Grid { size, .. } => *size,
            Self::Circulant(c) => c.row.len(),
            Self::Lifted { map, .. } => map.len(),
            Self::Sum(a, _) => a.size(),
            Self::Scaled(_, m) => m.size(),
        }
    }

    #[inline]
    pub fn value(&self, h: usize, k: usize) -> T {
        match self {
            Self::Dense { size, data } => data[h * size + k],
            Self::Circulant(c) => {
                let n = c.row.len();
                c.row[(k + n - h) % n]
            }
            Self::Lifted {
                base,
                map,
                zero_diagonal,
            } => {
                if *zero_diagonal && h == k {
                    T::zero()
                } else {
                    base.value(map[h], map[k])
                }
            }
            Self::Grid { size, f } => {
                if h == k {
                    T::zero()
                } else {
                    let n = T::from_usize_lossy(*size);
                    f(T::from_usize_lossy(h) / n, T::from_usize_lossy(k) / n)
                }
            }
            Self::Sum(a, b) => a.value(h, k) + b.value(h, k),
            Self::Scaled(s, m) => *s * m.value(h, k),
        }
    }

    /// `y[h] = sum_k value(h, k) * x[k]`.
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.size());
        match self {
            Self::Dense { size, data } => data
                .chunks_exact(*size)
                .map(|row| {
                    row.iter()
                        .zip(x)
                        .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
                })
                .collect(),
            Self::Circulant(c) => c.matvec(x),
            Self::Lifted {
                base,
                map,
                zero_diagonal,
            } => {
                let mut agg = vec![T::zero(); base.size()];
                for (&b, &v) in map.iter().zip(x) {
                    agg[b] += v;
                }
                let z = base.matvec(&agg);
                map.iter()
                    .zip(x)
                    .map(|(&b, &v)| {
                        if *zero_diagonal {
                            z[b] - base.value(b, b) * v
                        } else {
                            z[b]
                        }
                    })
                    .collect()
            }
            Self::Grid { size, .. } => (0..*size)
                .map(|h| (0..*size).fold(T::zero(), |acc, k| acc + self.value(h, k) * x[k]))
                .collect(),
            Self::Sum(a, b) => {
                let mut y = a.matvec(x);
                for (yi, zi) in y.iter_mut().zip(b.matvec(x)) {
                    *yi += zi;
                }
                y
            }
            Self::Scaled(s, m) => m.matvec(x).into_iter().map(|v| *s * v).collect(),
        }
    }

    pub fn scaled(&self, factor: T) -> Self {
        match self {
            Self::Dense { size, data } => Self::Dense {
                size: *size,
                data: data.iter().map(|&v| v * factor).collect(),
            },
            Self::Circulant(c) => Self::circulant(c.row.iter().map(|&v| v * factor).collect()),
            Self::Lifted {
                base,
                map,
                zero_diagonal,
            } => Self::Lifted {
                base: Arc::new(base.scaled(factor)),
                map: map.clone(),
                zero_diagonal: *zero_diagonal,
            },
            Self::Scaled(s, m) => Self::Scaled(*s * factor, m.clone()),
            other => Self::Scaled(factor, Arc::new(other.clone())),
        }
    }

    pub fn plus(&self, other: &BlockMatrix<T>) -> Self {
        assert_eq!(self.size(), other.size());
        Self::Sum(Arc::new(self.clone()), Arc::new(other.clone()))
    }

    /// Row-major copy of all entries.
    pub fn to_dense_vec(&self) -> Vec<T> {
        let n = self.size();
        if let Self::Dense { data, .. } = self {
            return data.to_vec();
        }
        let mut out = Vec::with_capacity(n * n);
        for h in 0..n {
            for k in 0..n {
                out.push(self.value(h, k));
            }
        }
        out
    }

    /// Smallest and largest entry that can occur.
    pub fn entry_range(&self) -> (T, T) {
        fn range_of<T: Scalar>(xs: impl Iterator<Item = T>) -> (T, T) {
            xs.fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
        }
        match self {
            Self::Dense { data, .. } => range_of(data.iter().copied()),
            Self::Circulant(c) => range_of(c.row.iter().copied()),
            Self::Lifted {
                base,
                map,
                zero_diagonal,
            } => {
                let mut used = vec![false; base.size()];
                for &b in map.iter() {
                    used[b] = true;
                }
                let mut lo = T::infinity();
                let mut hi = T::neg_infinity();
                for a in 0..base.size() {
                    for b in 0..base.size() {
                        if used[a] && used[b] {
                            let v = base.value(a, b);
                            lo = lo.min(v);
                            hi = hi.max(v);
                        }
                    }
                }
                if *zero_diagonal {
                    lo = lo.min(T::zero());
                    hi = hi.max(T::zero());
                }
                (lo, hi)
            }
            other => {
                let n = other.size();
                range_of(
                    (0..n)
                        .flat_map(|h| (0..n).map(move |k| (h, k)))
                        .map(|(h, k)| other.value(h, k)),
                )
            }
        }
    }

    /// Exact symmetry check.
    pub fn is_symmetric(&self) -> bool {
        match self {
            Self::Dense { size, data } => {
                (0..*size).all(|h| (h + 1..*size).all(|k| data[h * size + k] == data[k * size + h]))
            }
            Self::Circulant(c) => {
                let n = c.row.len();
                (1..n).all(|d| c.row[d] == c.row[n - d])
            }
            Self::Lifted { base, .. } => base.is_symmetric(),
            Self::Grid { size, .. } => {
                (0..*size).all(|h| (h + 1..*size).all(|k| self.value(h, k) == self.value(k, h)))
            }
            Self::Sum(a, b) => a.is_symmetric() && b.is_symmetric(),
            Self::Scaled(_, m) => m.is_symmetric(),
        }
    }

    /// Connected components of the graph on blocks with `h ~ k` iff `value(h, k) > 0`.
    ///
    /// Components are sorted internally and ordered by smallest member.
    pub fn positive_components(&self) -> Vec<Vec<usize>> {
        let n = self.size();
        let mut dsu = DisjointSets::new(n);
        match self {
            Self::Circulant(c) => {
                // Offsets with positive weight generate a subgroup of Z_n; its cosets are the components.
                let mut g = n;
                for (d, &v) in c.row.iter().enumerate().skip(1) {
                    if v > T::zero() {
                        g = gcd(g, d);
                    }
                }
                for h in 0..n {
                    dsu.union(h, h % g);
                }
            }
            Self::Lifted {
                base,
                map,
                zero_diagonal: _,
            } => {
                let mut members: Vec<Vec<usize>> = vec![Vec::new(); base.size()];
                for (h, &b) in map.iter().enumerate() {
                    members[b].push(h);
                }
                for a in 0..base.size() {
                    if members[a].is_empty() {
                        continue;
                    }
                    for b in 0..base.size() {
                        if members[b].is_empty() || base.value(a, b) <= T::zero() {
                            continue;
                        }
                        if a == b {
                            // Distinct blocks lifted from a positive diagonal entry are adjacent.
                            for w in members[a].windows(2) {
                                dsu.union(w[0], w[1]);
                            }
                        } else {
                            let anchor = members[b][0];
                            for &h in &members[a] {
                                dsu.union(h, anchor);
                            }
                        }
                    }
                }
            }
            other => {
                for h in 0..n {
                    for k in h + 1..n {
                        if other.value(h, k) > T::zero() {
                            dsu.union(h, k);
                        }
                    }
                }
            }
        }
        dsu.groups()
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smallest index as root so group order is stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    fn groups(mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for h in 0..n {
            let r = self.find(h);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(h);
        }
        out
    }
}
