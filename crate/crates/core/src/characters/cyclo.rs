//! Exact sums of roots of unity via reduction modulo integer cyclotomic
//! polynomials.

use num_integer::Integer;

use crate::numtheory::{divisors, mobius};

/// Coefficients of the d-th cyclotomic polynomial, low degree first.
pub fn cyclotomic_poly(d: u64) -> Vec<i128> {
    assert!(d >= 1, "cyclotomic index must be positive");
    let divs = divisors(d).expect("d >= 1");
    let mut num: Vec<i128> = vec![1];
    let mut den = Vec::new();
    for &e in &divs {
        match mobius(d / e).expect("d/e >= 1") {
            1 => num = mul_xe_minus_one(&num, e as usize),
            -1 => den.push(e as usize),
            _ => {}
        }
    }
    for e in den {
        num = div_xe_minus_one(&num, e);
    }
    num
}

fn mul_xe_minus_one(f: &[i128], e: usize) -> Vec<i128> {
    let mut out = vec![0i128; f.len() + e];
    for (i, &c) in f.iter().enumerate() {
        out[i + e] += c;
        out[i] -= c;
    }
    out
}

fn div_xe_minus_one(g: &[i128], e: usize) -> Vec<i128> {
    let deg = g.len() - 1;
    let mut h = vec![0i128; deg + 1 - e];
    // g[i] = h[i - e] - h[i]
    for i in (e..=deg).rev() {
        let hi = if i < h.len() { h[i] } else { 0 };
        h[i - e] = g[i] + hi;
    }
    debug_assert!((0..e).all(|i| g[i] == -h.get(i).copied().unwrap_or(0)));
    h
}

/// Σ hist[e]·ζ_d^e reduced modulo Φ_d. Returns the value when it is a
/// rational integer.
pub fn reduce_root_sum(hist: &[i128], d: u64, phi_d: &[i128]) -> Option<i128> {
    let deg = phi_d.len() - 1;
    let mut r: Vec<i128> = hist.to_vec();
    r.resize((d as usize).max(deg + 1), 0);
    for i in (deg..r.len()).rev() {
        let c = r[i];
        if c != 0 {
            for (j, &f) in phi_d.iter().enumerate() {
                r[i - deg + j] -= c * f;
            }
        }
    }
    r[1..deg].iter().all(|&c| c == 0).then_some(r[0])
}

/// Σ_{b mod d, gcd(b,d)=1} ζ_d^{b·g}, summed exactly in Z[ζ_d].
pub fn unit_orbit_sum(d: u64, g: u64, phi_d: &[i128]) -> Option<i128> {
    let mut hist = vec![0i128; d as usize];
    for b in 0..d {
        if b.gcd(&d) == 1 {
            hist[((b as u128 * g as u128) % d as u128) as usize] += 1;
        }
    }
    reduce_root_sum(&hist, d, phi_d)
}

/// Ramanujan sum c_d(m) = Σ_{e | gcd(d,m)} μ(d/e)·e.
pub fn ramanujan_sum(d: u64, m: u64) -> i128 {
    let g = d.gcd(&m);
    divisors(g)
        .expect("g >= 1")
        .into_iter()
        .map(|e| mobius(d / e).expect("d/e >= 1") as i128 * e as i128)
        .sum()
}
