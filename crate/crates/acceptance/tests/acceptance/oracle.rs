//! Reference implementations written independently of `hpi_core`.

/// Neumaier-compensated sum.
pub fn sum(v: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for x in v {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

pub fn mean(v: &[f64]) -> f64 {
    sum(v.iter().copied()) / v.len() as f64
}

pub fn rms(p: &[f64], o: &[f64]) -> f64 {
    (sum(p.iter().zip(o).map(|(a, b)| (a - b).powi(2))) / p.len() as f64).sqrt()
}

pub fn mae(p: &[f64], o: &[f64]) -> f64 {
    sum(p.iter().zip(o).map(|(a, b)| (a - b).abs())) / p.len() as f64
}

/// Two-pass population standard deviation of `o - p`.
pub fn residual_sd(p: &[f64], o: &[f64]) -> f64 {
    let r: Vec<f64> = o.iter().zip(p).map(|(a, b)| a - b).collect();
    let m = mean(&r);
    (sum(r.iter().map(|x| (x - m).powi(2))) / r.len() as f64).sqrt()
}

/// Terms of the literal MAPE, `|p - o| / o`.
pub fn mape_terms(p: &[f64], o: &[f64]) -> Vec<f64> {
    p.iter().zip(o).map(|(a, b)| (a - b).abs() / b).collect()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

pub fn inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| solve(a.to_vec(), (0..n).map(|i| f64::from(u8::from(i == j))).collect()))
        .collect();
    (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
}

/// Least squares through the normal equations. Returns coefficients and standard
/// errors `sqrt(σ² diag((XᵀX)⁻¹))` with `σ² = SSR / (n - p)`.
pub fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let p = x[0].len();
    let xtx: Vec<Vec<f64>> = (0..p)
        .map(|i| (0..p).map(|j| sum(x.iter().map(|r| r[i] * r[j]))).collect())
        .collect();
    let xty: Vec<f64> = (0..p).map(|i| sum(x.iter().zip(y).map(|(r, v)| r[i] * v))).collect();
    let beta = solve(xtx.clone(), xty);
    let ssr = sum(x.iter().zip(y).map(|(r, v)| {
        let fit: f64 = r.iter().zip(&beta).map(|(a, b)| a * b).sum();
        (v - fit).powi(2)
    }));
    let s2 = ssr / (y.len() - p) as f64;
    let inv = inverse(&xtx);
    let se = (0..p).map(|i| (s2 * inv[i][i]).sqrt()).collect();
    (beta, se)
}

/// Exhaustive-scan kNN: z-score with population statistics, rank every training row
/// by squared distance (ties to the lower index) and average the first `k` targets.
pub fn knn(x: &[Vec<f64>], y: &[f64], q: &[f64], k: usize) -> f64 {
    let d = q.len();
    let n = x.len() as f64;
    let mut mu = vec![0.0; d];
    let mut sd = vec![0.0; d];
    for j in 0..d {
        mu[j] = x.iter().map(|r| r[j]).sum::<f64>() / n;
        sd[j] = (x.iter().map(|r| (r[j] - mu[j]).powi(2)).sum::<f64>() / n).sqrt();
    }
    let z = |r: &[f64]| -> Vec<f64> { (0..d).map(|j| (r[j] - mu[j]) / sd[j]).collect() };
    let zq = z(q);
    let mut ranked: Vec<(f64, usize)> = x
        .iter()
        .enumerate()
        .map(|(i, r)| (z(r).iter().zip(&zq).map(|(a, b)| (a - b).powi(2)).sum(), i))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut idx: Vec<usize> = ranked[..k].iter().map(|p| p.1).collect();
    idx.sort_unstable();
    idx.iter().map(|&i| y[i]).sum::<f64>() / k as f64
}

/// Best single split of one feature by exhaustive search; returns training R².
pub fn stump_r2(x: &[f64], y: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let m = mean(y);
    let sst = sum(y.iter().map(|v| (v - m).powi(2)));
    let mut best = sst;
    for cut in 1..order.len() {
        if x[order[cut]] == x[order[cut - 1]] {
            continue;
        }
        let (l, r): (Vec<f64>, Vec<f64>) = (
            order[..cut].iter().map(|&i| y[i]).collect(),
            order[cut..].iter().map(|&i| y[i]).collect(),
        );
        let (ml, mr) = (mean(&l), mean(&r));
        let ssr = sum(l.iter().map(|v| (v - ml).powi(2))) + sum(r.iter().map(|v| (v - mr).powi(2)));
        best = best.min(ssr);
    }
    1.0 - best / sst
}

pub fn r2(pred: &[f64], obs: &[f64]) -> f64 {
    let m = mean(obs);
    let sst = sum(obs.iter().map(|v| (v - m).powi(2)));
    let ssr = sum(pred.iter().zip(obs).map(|(p, o)| (o - p).powi(2)));
    1.0 - ssr / sst
}
