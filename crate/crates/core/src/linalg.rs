//! Exact linear algebra over the integers and over Z/n.
//!
//! Two engines live here. Smith normal form over Z handles weight-lattice
//! membership and quotient invariants, where matrices are small and entries
//! stay modest. The Howell form over Z/n handles everything modular: solving
//! linear systems with zero divisors, nullspaces, and module membership for
//! the closure algorithms. Howell is the right echelon notion over Z/n: unlike
//! plain row echelon it certifies membership for submodules, not just spans
//! over fields.

fn checked_mul(a: i128, b: i128) -> i128 {
    a.checked_mul(b).expect("integer overflow in exact computation")
}

fn checked_add(a: i128, b: i128) -> i128 {
    a.checked_add(b).expect("integer overflow in exact computation")
}

/// Extended gcd: returns (g, x, y) with a*x + b*y = g and g >= 0.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

pub fn gcd_u(a: u64, b: u64) -> u64 {
    let mut a = a;
    let mut b = b;
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// ---------------------------------------------------------------------------
// Smith normal form over Z
// ---------------------------------------------------------------------------

/// Smith normal form data: u * a * v = d with u, v unimodular and
/// d diagonal with d[0] | d[1] | ... (trailing zeros allowed).
pub struct Snf {
    pub rows: usize,
    pub cols: usize,
    pub d: Vec<Vec<i128>>,
    pub u: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<i128> {
        (0..self.rows.min(self.cols)).map(|i| self.d[i][i]).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|&&x| x != 0).count()
    }
}

fn identity_i(n: usize) -> Vec<Vec<i128>> {
    let mut m = vec![vec![0; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

/// Smith normal form with transform tracking. Intended for small lattice
/// matrices; all arithmetic is checked i128.
pub fn smith(a: &[Vec<i128>]) -> Snf {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut d: Vec<Vec<i128>> = a.to_vec();
    let mut u = identity_i(rows);
    let mut v = identity_i(cols);

    let swap_rows = |d: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, i: usize, j: usize| {
        d.swap(i, j);
        u.swap(i, j);
    };
    let swap_cols = |d: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, i: usize, j: usize| {
        for row in d.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
    };

    let mut t = 0;
    while t < rows.min(cols) {
        // Locate a nonzero entry of minimal magnitude in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if d[i][j] != 0 && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        swap_rows(&mut d, &mut u, t, pi);
        swap_cols(&mut d, &mut v, t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if d[i][t] != 0 {
                    let q = d[i][t].div_euclid(d[t][t]);
                    for j in 0..cols {
                        d[i][j] = checked_add(d[i][j], -checked_mul(q, d[t][j]));
                    }
                    for j in 0..rows {
                        u[i][j] = checked_add(u[i][j], -checked_mul(q, u[t][j]));
                    }
                    if d[i][t] != 0 {
                        swap_rows(&mut d, &mut u, t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if d[t][j] != 0 {
                    let q = d[t][j].div_euclid(d[t][t]);
                    for i in 0..rows {
                        d[i][j] = checked_add(d[i][j], -checked_mul(q, d[i][t]));
                    }
                    for i in 0..cols {
                        v[i][j] = checked_add(v[i][j], -checked_mul(q, v[i][t]));
                    }
                    if d[t][j] != 0 {
                        swap_cols(&mut d, &mut v, t, j);
                        dirty = true;
                    }
                }
            }
            if !dirty {
                break;
            }
        }

        // Divisibility repair: d[t][t] must divide every trailing entry.
        let mut repaired = false;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if d[i][j] % d[t][t] != 0 {
                    for k in 0..cols {
                        d[t][k] = checked_add(d[t][k], d[i][k]);
                    }
                    for k in 0..rows {
                        u[t][k] = checked_add(u[t][k], u[i][k]);
                    }
                    repaired = true;
                    break 'scan;
                }
            }
        }
        if repaired {
            continue;
        }
        if d[t][t] < 0 {
            for k in 0..cols {
                d[t][k] = -d[t][k];
            }
            for k in 0..rows {
                u[t][k] = -u[t][k];
            }
        }
        t += 1;
    }
    Snf { rows, cols, d, u, v }
}

/// Solve a * x = b over Z. Returns one solution if any exists.
pub fn z_solve(a: &[Vec<i128>], b: &[i128]) -> Option<Vec<i128>> {
    let snf = smith(a);
    let rows = snf.rows;
    let cols = snf.cols;
    assert_eq!(b.len(), rows, "dimension mismatch in z_solve");
    let ub: Vec<i128> = (0..rows)
        .map(|i| {
            (0..rows).fold(0i128, |acc, j| checked_add(acc, checked_mul(snf.u[i][j], b[j])))
        })
        .collect();
    let mut y = vec![0i128; cols];
    for i in 0..rows {
        let di = if i < cols { snf.d[i][i] } else { 0 };
        if di == 0 {
            if ub[i] != 0 {
                return None;
            }
        } else {
            if ub[i] % di != 0 {
                return None;
            }
            y[i] = ub[i] / di;
        }
    }
    let x: Vec<i128> = (0..cols)
        .map(|i| {
            (0..cols).fold(0i128, |acc, j| checked_add(acc, checked_mul(snf.v[i][j], y[j])))
        })
        .collect();
    Some(x)
}

/// Invariant factors of the quotient of the lattice spanned by `outer` by the
/// sublattice spanned by `inner` (both given as generator rows in a common
/// ambient integer coordinate system). Every inner generator must lie in the
/// outer lattice and the quotient must be finite; both are checked.
pub fn quotient_invariants(outer: &[Vec<i128>], inner: &[Vec<i128>]) -> crate::Result<Vec<i128>> {
    let k = outer.len();
    // Coordinates of each inner generator with respect to the outer generators:
    // solve outer^T * c = g.
    let cols = if k == 0 { 0 } else { outer[0].len() };
    let at: Vec<Vec<i128>> = (0..cols).map(|j| (0..k).map(|i| outer[i][j]).collect()).collect();
    let mut coord_rows = Vec::with_capacity(inner.len());
    for g in inner {
        let c = z_solve(&at, g)
            .ok_or_else(|| crate::Error::Linalg("sublattice generator outside the outer lattice".into()))?;
        coord_rows.push(c);
    }
    let snf = smith(&coord_rows);
    let mut inv = snf.diagonal();
    while inv.len() < k {
        inv.push(0);
    }
    if inv.iter().any(|&d| d == 0) {
        return Err(crate::Error::Linalg("quotient of lattices is not finite".into()));
    }
    Ok(inv)
}

// ---------------------------------------------------------------------------
// Howell normal form over Z/n
// ---------------------------------------------------------------------------

fn mod_mul(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn mod_add(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + b as u128) % n as u128) as u64
}

/// Inverse of a unit modulo n.
pub fn mod_inv(a: u64, n: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd(a as i128, n as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(n as i128) as u64)
}

/// Row module of a matrix over Z/n in Howell normal form. Rows are kept
/// sorted by pivot column; pivots divide n; entries above a pivot are reduced
/// modulo it. The form is canonical for the module, so equality of modules is
/// equality of forms.
#[derive(Debug, Clone)]
pub struct Howell {
    pub n: u64,
    pub width: usize,
    pub rows: Vec<Vec<u64>>,
    pub pivots: Vec<usize>,
}

fn leading(row: &[u64]) -> Option<usize> {
    row.iter().position(|&x| x != 0)
}

fn row_scale(row: &[u64], c: u64, n: u64) -> Vec<u64> {
    row.iter().map(|&x| mod_mul(x, c, n)).collect()
}

fn row_combine(a: &[u64], ca: u64, b: &[u64], cb: u64, n: u64) -> Vec<u64> {
    a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| mod_add(mod_mul(x, ca, n), mod_mul(y, cb, n), n))
        .collect()
}

/// Find a unit u of Z/n with u * g == a (mod n), assuming g = gcd(a, n) and a != 0.
fn unit_cofactor(a: u64, g: u64, n: u64) -> u64 {
    let base = a / g;
    let step = n / g;
    let mut u = base % n;
    loop {
        if gcd_u(u, n) == 1 {
            return u;
        }
        u = (u + step) % n;
    }
}

impl Howell {
    pub fn new(n: u64, width: usize, rows: Vec<Vec<u64>>) -> Howell {
        assert!(n >= 2, "modulus must be at least 2");
        let mut h = Howell { n, width, rows: Vec::new(), pivots: Vec::new() };
        let mut queue: Vec<Vec<u64>> = rows
            .into_iter()
            .map(|r| {
                assert_eq!(r.len(), width, "row width mismatch");
                r.iter().map(|&x| x % n).collect()
            })
            .collect();
        // Triangularize with gcd transforms, then close under annihilators
        // until the module stabilizes.
        let mut slots: Vec<Option<Vec<u64>>> = vec![None; width];
        while let Some(mut row) = queue.pop() {
            loop {
                let Some(j) = leading(&row) else { break };
                match &slots[j] {
                    None => {
                        // Normalize the pivot to the canonical divisor of n.
                        let a = row[j];
                        let g = gcd_u(a, n);
                        let u = unit_cofactor(a, g, n);
                        let uinv = mod_inv(u, n).expect("unit cofactor is invertible");
                        let norm = row_scale(&row, uinv, n);
                        debug_assert_eq!(norm[j], g);
                        // Annihilator of the new pivot row joins the queue.
                        if g > 1 {
                            let ann = row_scale(&norm, n / g, n);
                            if leading(&ann).is_some() {
                                queue.push(ann);
                            }
                        }
                        slots[j] = Some(norm);
                        break;
                    }
                    Some(stored) => {
                        let a = stored[j] as i128;
                        let b = row[j] as i128;
                        let (g, p, q) = ext_gcd(a, b);
                        let pn = p.rem_euclid(n as i128) as u64;
                        let qn = q.rem_euclid(n as i128) as u64;
                        let merged = row_combine(stored, pn, &row, qn, n);
                        let ca = ((b / g).rem_euclid(n as i128)) as u64;
                        let cb = ((a / g).rem_euclid(n as i128)) as u64;
                        // merged has gcd at column j; eliminated has zero there.
                        let eliminated = row_combine(stored, (n - ca) % n, &row, cb, n);
                        debug_assert_eq!(eliminated[j], 0);
                        let a2 = merged[j];
                        let g2 = gcd_u(a2, n);
                        let u = unit_cofactor(a2, g2, n);
                        let uinv = mod_inv(u, n).expect("unit cofactor is invertible");
                        let norm = row_scale(&merged, uinv, n);
                        if g2 > 1 {
                            let ann = row_scale(&norm, n / g2, n);
                            if leading(&ann).is_some() {
                                queue.push(ann);
                            }
                        }
                        slots[j] = Some(norm);
                        row = eliminated;
                    }
                }
            }
        }
        // Reduce entries above each pivot modulo the pivot.
        let pivot_cols: Vec<usize> =
            (0..width).filter(|&j| slots[j].is_some()).collect();
        for &j in &pivot_cols {
            let pivot_row = slots[j].clone().expect("pivot slot populated");
            let g = pivot_row[j];
            for &k in &pivot_cols {
                if k == j {
                    continue;
                }
                let row = slots[k].as_mut().expect("pivot slot populated");
                let e = row[j];
                if e != 0 {
                    let lam = e / g;
                    if lam != 0 {
                        let newr = row_combine(row, 1, &pivot_row, n - (lam % n), n);
                        *row = newr;
                    }
                }
            }
        }
        for j in 0..width {
            if let Some(r) = slots[j].take() {
                h.rows.push(r);
                h.pivots.push(j);
            }
        }
        h
    }

    /// Reduce a vector modulo the row module. A zero result certifies
    /// membership.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.width);
        let mut v: Vec<u64> = v.iter().map(|&x| x % self.n).collect();
        for (row, &j) in self.rows.iter().zip(self.pivots.iter()) {
            let e = v[j];
            if e != 0 {
                let g = row[j];
                let lam = e / g;
                if lam != 0 {
                    v = row_combine(&v, 1, row, self.n - (lam % self.n), self.n);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Number of elements of the row module; None when it overflows u128.
    pub fn module_size(&self) -> Option<u128> {
        self.rows
            .iter()
            .zip(self.pivots.iter())
            .try_fold(1u128, |acc, (row, &j)| acc.checked_mul((self.n / row[j]) as u128))
    }

    /// True when the module is all of (Z/n)^width.
    pub fn is_full(&self) -> bool {
        self.rows.len() == self.width && self.rows.iter().zip(self.pivots.iter()).all(|(r, &j)| r[j] == 1)
    }
}

/// Solution of a linear system over Z/n: one particular solution plus
/// generators of the homogeneous solution module.
#[derive(Debug, Clone)]
pub struct LinSolution {
    pub particular: Vec<u64>,
    pub nullspace: Vec<Vec<u64>>,
}

/// Solve a * x = b over Z/n, where a is given in row-major form with
/// `a.len()` equations and `x` of length `cols`.
pub fn solve_mod(n: u64, a: &[Vec<u64>], b: &[u64], cols: usize) -> Option<LinSolution> {
    let m = a.len();
    assert_eq!(b.len(), m, "dimension mismatch in solve_mod");
    // Rows of [a^T | I] generate {(a*c, c)}; Howell certifies membership of
    // (b, *) and exposes the kernel as rows with vanishing first block.
    let mut rows = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut r = vec![0u64; m + cols];
        for i in 0..m {
            r[i] = a[i][j] % n;
        }
        r[m + j] = 1;
        rows.push(r);
    }
    let h = Howell::new(n, m + cols, rows);
    let mut v = vec![0u64; m + cols];
    for i in 0..m {
        v[i] = b[i] % n;
    }
    let red = h.reduce(&v);
    if red[..m].iter().any(|&x| x != 0) {
        return None;
    }
    let particular: Vec<u64> = red[m..].iter().map(|&x| (n - x) % n).collect();
    let mut nullspace = Vec::new();
    for (row, &j) in h.rows.iter().zip(h.pivots.iter()) {
        if j >= m {
            nullspace.push(row[m..].to_vec());
        }
    }
    Some(LinSolution { particular, nullspace })
}

/// Generators of {x : a * x = 0} over Z/n.
pub fn nullspace_mod(n: u64, a: &[Vec<u64>], cols: usize) -> Vec<Vec<u64>> {
    let b = vec![0u64; a.len()];
    solve_mod(n, a, &b, cols).expect("homogeneous system is solvable").nullspace
}
