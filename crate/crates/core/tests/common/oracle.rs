//! Straight-line reimplementation of the network density, written without
//! any of the library's node helpers.

use climact::model::{LatentState, ModelParameters, SubredditCatalog, UserObservation};

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn log_bern(y: bool, p: f64) -> f64 {
    if y {
        p.ln()
    } else {
        (1.0 - p).ln()
    }
}

fn log_normal(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * (2.0 * std::f64::consts::PI * var).ln() - (x - mean) * (x - mean) / (2.0 * var)
}

/// Log joint of observations, latents and parameters (priors on every
/// coefficient, on `ln theta_E`, on the sociodemographic latents).
pub fn naive_log_joint(
    p: &ModelParameters,
    lat: &LatentState,
    users: &[UserObservation],
    cat: &SubredditCatalog,
    var_s: f64,
    prior_mean_popularity: f64,
) -> f64 {
    let k = cat.len();
    let sc = cat.scores();
    let pop = cat.popularity();
    let mut total = 0.0;

    for (u, user) in users.iter().enumerate() {
        let d = lat.demographics[u];
        let s = lat.sympathy[u];
        for j in 0..4 {
            total += log_normal(d[j], 0.0, 1.0);
        }
        total += log_normal(user.e_short, p.beta_e1 * user.e_long + p.beta_e0, p.theta_e);
        for kk in 0..k {
            let dd = sc[kk][0] * d[0] + sc[kk][1] * d[1] + sc[kk][2] * d[2] + sc[kk][3] * d[3];
            let eta = p.beta_p_long1 * dd + p.beta_p_long2 * pop[kk] + p.beta_p_long3 * user.e_long + p.beta_p_long0;
            total += log_bern(user.p_long[kk], logistic(eta));
        }
        let mut ms = p.beta_s2 * user.e_long;
        for j in 0..4 {
            ms += p.beta_s1[j] * d[j];
        }
        for t in 0..3 {
            ms += p.beta_s3[t] * user.m_long[t];
        }
        total += log_normal(s, ms, var_s);
        for kk in 0..k {
            let mut load = 0.0;
            for j in 0..4 {
                load += p.beta_p_short1[j] * sc[kk][j];
            }
            let pl = if user.p_long[kk] { 1.0 } else { 0.0 };
            let eta = s * load
                + p.beta_p_short2 * pl
                + p.beta_p_short3 * pop[kk]
                + p.beta_p_short4 * user.e_short
                + p.beta_p_short0;
            total += log_bern(user.p_short[kk], logistic(eta));
        }
        let mut q = [0.0; 4];
        for kk in 0..k {
            if user.p_short[kk] {
                for j in 0..4 {
                    q[j] += sc[kk][j];
                }
            }
        }
        let mut eta = p.beta_i2 * user.e_short + p.beta_i0;
        for j in 0..4 {
            eta += p.beta_i1[j] * q[j];
        }
        total += log_bern(user.interacted, logistic(eta));
        let i = if user.interacted { 1.0 } else { 0.0 };
        let mut eta = p.beta_a1 * s + p.beta_a2 * i + p.beta_a5 * user.e_short + p.beta_a0;
        for t in 0..3 {
            eta += p.beta_a3[t] * user.m_short[t] + p.beta_a4[t] * user.m_long[t];
        }
        total += log_bern(user.activated, logistic(eta));
    }

    let mut coefs = vec![p.beta_e0, p.beta_e1, p.theta_e.ln(), p.beta_p_long0, p.beta_p_long1, p.beta_p_long3];
    coefs.extend(p.beta_s1);
    coefs.push(p.beta_s2);
    coefs.extend(p.beta_s3);
    coefs.push(p.beta_p_short0);
    coefs.extend(p.beta_p_short1);
    coefs.extend([p.beta_p_short2, p.beta_p_short4, p.beta_i0]);
    coefs.extend(p.beta_i1);
    coefs.extend([p.beta_i2, p.beta_a0, p.beta_a1, p.beta_a2]);
    coefs.extend(p.beta_a3);
    coefs.extend(p.beta_a4);
    coefs.push(p.beta_a5);
    for c in coefs {
        total += log_normal(c, 0.0, 1.0);
    }
    total += log_normal(p.beta_p_long2, prior_mean_popularity, 1.0);
    total += log_normal(p.beta_p_short3, prior_mean_popularity, 1.0);
    total
}

/// Standardized discrepancies between sampled nodes and their conditional
/// distributions given the true latents. Each entry is roughly standard
/// normal when the sampler is right.
pub fn calibration_z(
    p: &ModelParameters,
    lat: &LatentState,
    users: &[UserObservation],
    cat: &SubredditCatalog,
    var_s: f64,
) -> Vec<(&'static str, f64)> {
    let sc = cat.scores();
    let pop = cat.popularity();
    let n = users.len() as f64;
    let mut bern: [(f64, f64); 4] = [(0.0, 0.0); 4];
    let mut add = |slot: usize, y: bool, q: f64| {
        bern[slot].0 += f64::from(u8::from(y)) - q;
        bern[slot].1 += q * (1.0 - q);
    };
    let (mut es, mut es2, mut s1, mut s2) = (0.0, 0.0, 0.0, 0.0);
    let mut d1 = [0.0; 4];
    let mut d2 = [0.0; 4];
    for (u, user) in users.iter().enumerate() {
        let d = lat.demographics[u];
        let s = lat.sympathy[u];
        for j in 0..4 {
            d1[j] += d[j];
            d2[j] += d[j] * d[j];
        }
        let r = user.e_short - p.beta_e1 * user.e_long - p.beta_e0;
        es += r;
        es2 += r * r;
        let mut ms = p.beta_s2 * user.e_long;
        for j in 0..4 {
            ms += p.beta_s1[j] * d[j];
        }
        for t in 0..3 {
            ms += p.beta_s3[t] * user.m_long[t];
        }
        s1 += s - ms;
        s2 += (s - ms) * (s - ms);
        let mut q = [0.0; 4];
        for k in 0..cat.len() {
            let row = sc[k];
            let mut dd = 0.0;
            let mut load = 0.0;
            for j in 0..4 {
                dd += row[j] * d[j];
                load += p.beta_p_short1[j] * row[j];
            }
            let pl = logistic(p.beta_p_long1 * dd + p.beta_p_long2 * pop[k] + p.beta_p_long3 * user.e_long + p.beta_p_long0);
            add(0, user.p_long[k], pl);
            let was = if user.p_long[k] { 1.0 } else { 0.0 };
            let ps = logistic(
                s * load + p.beta_p_short2 * was + p.beta_p_short3 * pop[k] + p.beta_p_short4 * user.e_short + p.beta_p_short0,
            );
            add(1, user.p_short[k], ps);
            if user.p_short[k] {
                for j in 0..4 {
                    q[j] += row[j];
                }
            }
        }
        let mut ie = p.beta_i2 * user.e_short + p.beta_i0;
        for j in 0..4 {
            ie += p.beta_i1[j] * q[j];
        }
        add(2, user.interacted, logistic(ie));
        let mut ae = p.beta_a1 * s + p.beta_a5 * user.e_short + p.beta_a0;
        if user.interacted {
            ae += p.beta_a2;
        }
        for t in 0..3 {
            ae += p.beta_a3[t] * user.m_short[t] + p.beta_a4[t] * user.m_long[t];
        }
        add(3, user.activated, logistic(ae));
    }
    let gauss = |sum: f64, sq: f64, var: f64| {
        let mean_z = sum / n / (var / n).sqrt();
        let var_z = (sq / n - var) / (var * (2.0 / n).sqrt());
        (mean_z, var_z)
    };
    let mut out = Vec::new();
    let (a, b) = gauss(es, es2, p.theta_e);
    out.push(("E_S mean", a));
    out.push(("E_S variance", b));
    let (a, b) = gauss(s1, s2, var_s);
    out.push(("S mean", a));
    out.push(("S variance", b));
    for j in 0..4 {
        let (a, b) = gauss(d1[j], d2[j], 1.0);
        out.push((["D0 mean", "D1 mean", "D2 mean", "D3 mean"][j], a));
        out.push((["D0 variance", "D1 variance", "D2 variance", "D3 variance"][j], b));
    }
    for (name, (resid, var)) in ["P_L", "P_S", "I", "A"].into_iter().zip(bern) {
        out.push((name, resid / var.sqrt()));
    }
    out
}
