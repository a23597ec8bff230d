//! Brute-force reference implementations used by the integration and
//! acceptance tests. Written against plain vectors so that they share no
//! code path with the library.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

/// Kendall's tau by explicit pair enumeration over two position vectors:
/// `a[i]` and `b[i]` are the positions of item `i` in each ranking.
pub fn tau_by_pairs(a: &[usize], b: &[usize]) -> f64 {
    let m = a.len();
    let (mut conc, mut disc) = (0i64, 0i64);
    for i in 0..m {
        for j in i + 1..m {
            let x = (a[i] as i64 - a[j] as i64).signum();
            let y = (b[i] as i64 - b[j] as i64).signum();
            if x * y > 0 {
                conc += 1;
            } else if x * y < 0 {
                disc += 1;
            }
        }
    }
    (conc - disc) as f64 / (m * (m - 1) / 2) as f64
}

/// Eq. (position -> rating) written out directly.
pub fn direct_rating(j: usize, m: usize, lo: f64, hi: f64) -> f64 {
    (hi - lo) * (m - j) as f64 / (m - 1) as f64 + lo
}

pub fn all_permutations(m: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..left.len() {
            let x = left.remove(i);
            prefix.push(x);
            rec(prefix, left, out);
            prefix.pop();
            left.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..m).collect(), &mut out);
    out
}

pub fn random_permutation<R: Rng>(rng: &mut R, m: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..m).collect();
    v.shuffle(rng);
    v
}

/// Dense matrix with `None` for missing cells.
pub type Dense = Vec<Vec<Option<f64>>>;

pub fn cosine_or_pearson(
    u: &[Option<f64>],
    v: &[Option<f64>],
    pearson: bool,
    min_overlap: usize,
) -> f64 {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for c in 0..u.len() {
        if let (Some(x), Some(y)) = (u[c], v[c]) {
            xs.push(x);
            ys.push(y);
        }
    }
    if xs.is_empty() || xs.len() < min_overlap {
        return 0.0;
    }
    if pearson {
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        for x in xs.iter_mut() {
            *x -= mx;
        }
        for y in ys.iter_mut() {
            *y -= my;
        }
    }
    let mut dot = 0.0;
    let mut nx = 0.0;
    let mut ny = 0.0;
    for k in 0..xs.len() {
        dot += xs[k] * ys[k];
        nx += xs[k] * xs[k];
        ny += ys[k] * ys[k];
    }
    if nx == 0.0 || ny == 0.0 {
        return 0.0;
    }
    (dot / (nx.sqrt() * ny.sqrt())).clamp(-1.0, 1.0)
}

/// Naive user-based prediction for column `target`. Rows are assumed to
/// be in dataset-id order so that index order breaks similarity ties.
#[allow(clippy::too_many_arguments)]
pub fn brute_force_predict(
    rows: &Dense,
    active: &[Option<f64>],
    target: usize,
    k: usize,
    pearson: bool,
    min_overlap: usize,
    lo: f64,
    hi: f64,
) -> f64 {
    let mut sims: Vec<(usize, f64)> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if row[target].is_none() {
            continue;
        }
        let s = cosine_or_pearson(active, row, pearson, min_overlap);
        if s != 0.0 {
            sims.push((i, s));
        }
    }
    // selection sort: pick the best remaining k times
    let mut chosen = Vec::new();
    for _ in 0..k {
        let mut best: Option<usize> = None;
        for (idx, &(i, s)) in sims.iter().enumerate() {
            match best {
                None => best = Some(idx),
                Some(b) => {
                    let (bi, bs) = sims[b];
                    if s > bs || (s == bs && i < bi) {
                        best = Some(idx);
                    }
                }
            }
        }
        match best {
            Some(b) => chosen.push(sims.remove(b)),
            None => break,
        }
    }
    if !chosen.is_empty() {
        let num: f64 = chosen
            .iter()
            .map(|&(i, s)| s * rows[i][target].unwrap())
            .sum();
        let den: f64 = chosen.iter().map(|&(_, s)| s.abs()).sum();
        return (num / den).max(lo).min(hi);
    }
    let col: Vec<f64> = rows.iter().filter_map(|r| r[target]).collect();
    if col.is_empty() {
        (lo + hi) / 2.0
    } else {
        col.iter().sum::<f64>() / col.len() as f64
    }
}
