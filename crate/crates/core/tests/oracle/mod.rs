//! Brute-force Betti numbers for trivial coefficients.
//!
//! Deliberately shares no code with the library: cochains are evaluated on
//! explicit argument tuples with inversion-count signs, and ranks come from
//! fraction-free integer elimination.

pub struct Algebra {
    pub dim: usize,
    /// `c[i][j][k]`: coefficient of `e_k` in `[e_i, e_j]`, fully antisymmetric in `i, j`.
    pub c: Vec<Vec<Vec<i64>>>,
}

impl Algebra {
    pub fn new(dim: usize, brackets: &[(usize, usize, usize, i64)]) -> Self {
        let mut c = vec![vec![vec![0; dim]; dim]; dim];
        for &(i, j, k, v) in brackets {
            c[i][j][k] += v;
            c[j][i][k] -= v;
        }
        Algebra { dim, c }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Value of the basis cochain dual to `target` on the basis tuple `args`.
fn eval(target: &[usize], args: &[usize]) -> i64 {
    let mut sorted = args.to_vec();
    sorted.sort();
    if sorted != target {
        return 0;
    }
    let mut inv = 0;
    for a in 0..args.len() {
        for b in a + 1..args.len() {
            if args[a] > args[b] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

fn differential(g: &Algebra, k: usize) -> Vec<Vec<i128>> {
    let src = subsets(g.dim, k);
    let dst = subsets(g.dim, k + 1);
    let mut m = vec![vec![0i128; src.len()]; dst.len()];
    for (r, t) in dst.iter().enumerate() {
        for (col, s) in src.iter().enumerate() {
            let mut total = 0i64;
            for i in 0..t.len() {
                for j in i + 1..t.len() {
                    let rest: Vec<usize> =
                        t.iter().enumerate().filter(|&(p, _)| p != i && p != j).map(|(_, &x)| x).collect();
                    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                    for kk in 0..g.dim {
                        let coef = g.c[t[i]][t[j]][kk];
                        if coef == 0 {
                            continue;
                        }
                        let mut args = vec![kk];
                        args.extend(&rest);
                        total += sign * coef * eval(s, &args);
                    }
                }
            }
            m[r][col] = total as i128;
        }
    }
    m
}

fn rank(mut m: Vec<Vec<i128>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(p, r);
        for i in r + 1..rows {
            for j in c + 1..cols {
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) / prev;
            }
            m[i][c] = 0;
        }
        prev = m[r][c];
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

pub fn betti(g: &Algebra) -> Vec<usize> {
    let n = g.dim;
    let ranks: Vec<usize> = (0..n).map(|k| rank(differential(g, k))).collect();
    (0..=n)
        .map(|k| {
            let dim = subsets(n, k).len();
            let out = if k < n { ranks[k] } else { 0 };
            let inc = if k > 0 { ranks[k - 1] } else { 0 };
            dim - out - inc
        })
        .collect()
}

/// The named oracle cases, in the same order as the fixture file.
pub fn cases() -> Vec<(String, Algebra)> {
    let mut out = vec![
        // x, y, z with [x, y] = z
        ("h3".to_string(), Algebra::new(3, &[(0, 1, 2, 1)])),
        // u, D with [D, u] = u
        ("bs_hull".to_string(), Algebra::new(2, &[(1, 0, 0, 1)])),
        // x, z, y, D with [x, y] = z, [D, x] = x, [D, z] = 2z, [D, y] = y
        (
            "heis_hull".to_string(),
            Algebra::new(4, &[(0, 2, 1, 1), (3, 0, 0, 1), (3, 1, 1, 2), (3, 2, 2, 1)]),
        ),
    ];
    for n in 1..=5 {
        out.push((format!("abelian{n}"), Algebra::new(n, &[])));
    }
    out
}
