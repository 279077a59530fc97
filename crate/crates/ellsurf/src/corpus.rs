//! Families of short curves `y^2 = x^3 + a4(t) x + a6(t)` over `F_p`.
//!
//! The group `t -> alpha t + beta`, `(a4, a6) -> (u^4 a4, u^6 a6)` acts on a
//! family by isomorphisms of elliptic surfaces over `P^1` (infinity stays put),
//! so every invariant computed here is constant on orbits.

use ellsurf_core::gf::{Gf, Poly};
use ellsurf_core::wmodel::WeierstrassCurve;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::spec::CurveSpec;

/// Coefficient vectors are constant term first, padded to the family degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub p: u64,
    pub a4: Vec<u64>,
    pub a6: Vec<u64>,
    /// Number of family members isomorphic to this one via the group.
    pub orbit_size: usize,
}

impl Member {
    pub fn spec(&self) -> CurveSpec {
        let trim = |c: &[u64]| {
            let mut v: Vec<i64> = c.iter().map(|&x| x as i64).collect();
            while v.last() == Some(&0) {
                v.pop();
            }
            v
        };
        CurveSpec::short(self.p, &trim(&self.a4), &trim(&self.a6))
    }

    pub fn curve(&self, f: &Gf) -> Option<WeierstrassCurve> {
        WeierstrassCurve::short(Poly::new(f, self.a4.clone()), Poly::new(f, self.a6.clone())).ok()
    }
}

fn admissible(f: &Gf, a4: &[u64], a6: &[u64]) -> bool {
    WeierstrassCurve::short(Poly::new(f, a4.to_vec()), Poly::new(f, a6.to_vec())).is_ok_and(|e| e.is_nonisotrivial())
}

struct Action {
    p: u64,
    // subs[k][i] = coefficient of t^i in (alpha t + beta)^k, one table per (alpha, beta)
    subs: Vec<Vec<Vec<u64>>>,
    scales: Vec<(u64, u64)>,
}

impl Action {
    fn new(p: u64, max_deg: usize) -> Action {
        let mut subs = Vec::new();
        for alpha in 1..p {
            for beta in 0..p {
                let mut rows = vec![vec![0u64; max_deg + 1]; max_deg + 1];
                rows[0][0] = 1;
                for k in 1..=max_deg {
                    for i in 0..=k {
                        let from_t = if i > 0 { rows[k - 1][i - 1] * alpha } else { 0 };
                        rows[k][i] = (from_t + rows[k - 1][i] * beta) % p;
                    }
                }
                subs.push(rows);
            }
        }
        let mut scales: Vec<(u64, u64)> = (1..p).map(|u| (pow_mod(u, 4, p), pow_mod(u, 6, p))).collect();
        scales.sort_unstable();
        scales.dedup();
        Action { p, subs, scales }
    }

    fn apply(&self, sub: &[Vec<u64>], scale: u64, c: &[u64], out: &mut [u64]) {
        out.iter_mut().for_each(|x| *x = 0);
        for (k, &ck) in c.iter().enumerate() {
            if ck == 0 {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate().take(k + 1) {
                *o = (*o + ck * sub[k][i]) % self.p;
            }
        }
        out.iter_mut().for_each(|x| *x = *x * scale % self.p);
    }
}

fn pow_mod(b: u64, e: u32, p: u64) -> u64 {
    (0..e).fold(1, |acc, _| acc * b % p)
}

fn encode(p: u64, a4: &[u64], a6: &[u64]) -> usize {
    a6.iter().rev().chain(a4.iter().rev()).fold(0usize, |acc, &c| acc * p as usize + c as usize)
}

fn decode(p: u64, mut code: usize, d4: usize, d6: usize) -> (Vec<u64>, Vec<u64>) {
    let mut digits = Vec::with_capacity(d4 + d6 + 2);
    for _ in 0..d4 + d6 + 2 {
        digits.push((code % p as usize) as u64);
        code /= p as usize;
    }
    // a4 occupies the low digits
    (digits[..d4 + 1].to_vec(), digits[d4 + 1..].to_vec())
}

/// All members of the orbit of `(a4, a6)`, as codes.
fn orbit_codes(act: &Action, a4: &[u64], a6: &[u64]) -> Vec<usize> {
    let mut b4 = vec![0; a4.len()];
    let mut b6 = vec![0; a6.len()];
    let mut out = Vec::with_capacity(act.subs.len() * act.scales.len());
    for sub in &act.subs {
        for &(s4, s6) in &act.scales {
            act.apply(sub, s4, a4, &mut b4);
            act.apply(sub, s6, a6, &mut b6);
            out.push(encode(act.p, &b4, &b6));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Every non-isotrivial curve with `deg a4 <= d4`, `deg a6 <= d6`, listed in
/// code order.
pub fn full_family(p: u64, d4: usize, d6: usize) -> Vec<Member> {
    let f = Gf::prime(p).expect("prime");
    let total = (p as usize).pow((d4 + d6 + 2) as u32);
    (0..total)
        .filter_map(|code| {
            let (a4, a6) = decode(p, code, d4, d6);
            admissible(&f, &a4, &a6).then_some(Member { p, a4, a6, orbit_size: 1 })
        })
        .collect()
}

/// One representative (the smallest code) per orbit of non-isotrivial curves.
pub fn orbit_representatives(p: u64, d4: usize, d6: usize) -> Vec<Member> {
    let f = Gf::prime(p).expect("prime");
    let act = Action::new(p, d4.max(d6));
    let total = (p as usize).pow((d4 + d6 + 2) as u32);
    let mut seen = vec![false; total];
    let mut reps = Vec::new();
    for code in 0..total {
        if seen[code] {
            continue;
        }
        let (a4, a6) = decode(p, code, d4, d6);
        let orbit = orbit_codes(&act, &a4, &a6);
        for &c in &orbit {
            seen[c] = true;
        }
        if admissible(&f, &a4, &a6) {
            reps.push(Member { p, a4, a6, orbit_size: orbit.len() });
        }
    }
    reps
}

/// Sorted orbit of a member, as members.
pub fn orbit(m: &Member) -> Vec<Member> {
    let act = Action::new(m.p, m.a4.len().max(m.a6.len()) - 1);
    orbit_codes(&act, &m.a4, &m.a6)
        .into_iter()
        .map(|c| {
            let (a4, a6) = decode(m.p, c, m.a4.len() - 1, m.a6.len() - 1);
            Member { p: m.p, a4, a6, orbit_size: 1 }
        })
        .collect()
}

/// `count` distinct non-isotrivial curves drawn uniformly from the family
/// with a fixed seed.
pub fn random_members(p: u64, d4: usize, d6: usize, count: usize, seed: u64) -> Vec<Member> {
    let f = Gf::prime(p).expect("prime");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Member> = Vec::with_capacity(count);
    while out.len() < count {
        let a4: Vec<u64> = (0..=d4).map(|_| rng.next_u64() % p).collect();
        let a6: Vec<u64> = (0..=d6).map(|_| rng.next_u64() % p).collect();
        if out.iter().any(|m| m.a4 == a4 && m.a6 == a6) || !admissible(&f, &a4, &a6) {
            continue;
        }
        out.push(Member { p, a4, a6, orbit_size: 1 });
    }
    out
}

/// The validation corpus: orbit representatives over `F_5` with
/// `deg a4 <= 2`, `deg a6 <= 3`, then 20 seeded random curves over `F_7`.
pub fn validation_corpus() -> Vec<Member> {
    let mut v = orbit_representatives(5, 2, 3);
    v.extend(random_members(7, 2, 3, 20, 0xe115));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_round_trip() {
        for code in [0usize, 1, 77, 78124] {
            let (a4, a6) = decode(5, code, 2, 3);
            assert_eq!(encode(5, &a4, &a6), code);
        }
    }

    #[test]
    fn orbits_partition_small_family() {
        let reps = orbit_representatives(5, 1, 2);
        let all = full_family(5, 1, 2);
        assert_eq!(reps.iter().map(|m| m.orbit_size).sum::<usize>(), all.len());
        for m in reps.iter().take(10) {
            let o = orbit(m);
            assert_eq!(o.len(), m.orbit_size);
            assert!(o.iter().all(|x| all.contains(x)));
        }
    }

    #[test]
    fn random_members_are_deterministic() {
        let a = random_members(7, 2, 3, 5, 1);
        assert_eq!(a, random_members(7, 2, 3, 5, 1));
        assert_ne!(a, random_members(7, 2, 3, 5, 2));
    }
}
