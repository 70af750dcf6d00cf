//! Band LU factorization with partial (row) pivoting.
//!
//! Column-major band storage in the LAPACK `gbtrf` layout: element (i, j)
//! lives at `j * ldab + kl + ku + i - j`, leaving `kl` extra super-diagonals
//! for pivoting fill-in.

#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularMatrix {
    pub column: usize,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            ldab,
            data: vec![0.0; n * ldab],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + self.kl + self.ku + i - j
    }

    /// Adds `v` at (i, j); the entry must lie inside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            i <= j + self.kl && j <= i + self.ku,
            "({i}, {j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i > j + self.kl || j > i + self.ku {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    pub fn factor(mut self) -> Result<BandLu, SingularMatrix> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let scale = self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let tiny = 1e-14 * scale.max(f64::MIN_POSITIVE);
        let mut ipiv = vec![0usize; n];
        for c in 0..n {
            let last = (c + kl).min(n - 1);
            let mut p = c;
            let mut best = self.data[self.idx(c, c)].abs();
            for r in c + 1..=last {
                let v = self.data[self.idx(r, c)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if !(best > tiny) {
                return Err(SingularMatrix { column: c });
            }
            ipiv[c] = p;
            let jmax = (c + kl + ku).min(n - 1);
            if p != c {
                for j in c..=jmax {
                    let (a, b) = (self.idx(c, j), self.idx(p, j));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.idx(c, c)];
            let col = self.idx(c + 1, c);
            let cnt = last - c;
            for v in &mut self.data[col..col + cnt] {
                *v /= pivot;
            }
            for j in c + 1..=jmax {
                let acj = self.data[self.idx(c, j)];
                if acj == 0.0 {
                    continue;
                }
                // column j is stored after column c, so the slices never overlap
                let dst = self.idx(c + 1, j);
                let (head, tail) = self.data.split_at_mut(dst);
                for (t, lv) in tail[..cnt].iter_mut().zip(&head[col..col + cnt]) {
                    *t -= lv * acj;
                }
            }
        }
        Ok(BandLu { m: self, ipiv })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    ipiv: Vec<usize>,
}

impl BandLu {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let m = &self.m;
        let (n, kl, ku) = (m.n, m.kl, m.ku);
        assert_eq!(b.len(), n);
        for c in 0..n {
            let p = self.ipiv[c];
            if p != c {
                b.swap(c, p);
            }
            let bc = b[c];
            if bc != 0.0 {
                for r in c + 1..=(c + kl).min(n - 1) {
                    b[r] -= m.data[m.idx(r, c)] * bc;
                }
            }
        }
        for c in (0..n).rev() {
            let mut s = b[c];
            for j in c + 1..=(c + kl + ku).min(n - 1) {
                s -= m.data[m.idx(c, j)] * b[j];
            }
            b[c] = s / m.data[m.idx(c, c)];
        }
    }
}
