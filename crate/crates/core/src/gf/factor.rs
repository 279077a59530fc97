//! Squarefree, distinct-degree and equal-degree factorization.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Gf, GfError, Poly};

const EDF_SEED: u64 = 0x5eed_f00d_cafe_0001;

/// Monic irreducible factors with multiplicities, sorted by degree then lex.
pub fn factor(f: &Poly) -> Result<Vec<(Poly, u32)>, GfError> {
    if f.is_zero() {
        return Err(GfError::ZeroPolynomial);
    }
    let mut out: Vec<(Poly, u32)> = Vec::new();
    for (sqf, mult) in squarefree(&f.monic()) {
        for (g, d) in distinct_degree(&sqf) {
            for h in equal_degree(&g, d) {
                out.push((h, mult));
            }
        }
    }
    out.sort();
    // merge equal factors (they cannot repeat, but keep the invariant cheap)
    out.dedup_by(|a, b| {
        if a.0 == b.0 {
            b.1 += a.1;
            true
        } else {
            false
        }
    });
    Ok(out)
}

fn pth_root(f: &Poly) -> Poly {
    let field = f.field();
    let p = field.characteristic() as usize;
    let e = field.order() / field.characteristic();
    let c: Vec<u64> = f.coeffs().iter().step_by(p).map(|&a| field.pow(a, e as u128)).collect();
    Poly::new(field, c)
}

/// Squarefree parts `(s_i, i)` with `f = prod s_i^i`, for monic `f`.
pub fn squarefree(f: &Poly) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let p = f.field().characteristic() as u32;
    let df = f.derivative();
    if df.is_zero() {
        for (g, m) in squarefree(&pth_root(f)) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = f.gcd(&df);
    let mut w = f.div_exact(&c).expect("gcd divides");
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div_exact(&y).expect("gcd divides");
        if !z.is_one() {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w).expect("divides");
    }
    if !c.is_one() {
        for (g, m) in squarefree(&pth_root(&c)) {
            out.push((g, m * p));
        }
    }
    out
}

/// Products of all irreducible factors of each degree, for squarefree monic `f`.
pub fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = Poly::x(f.field());
    let q = f.field().order() as u128;
    let mut h = x.rem(f).expect("nonzero");
    let mut d = 0usize;
    while rest.degree().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(q, &rest);
        let g = h.sub(&x).gcd(&rest);
        if !g.is_one() {
            rest = rest.div_exact(&g).expect("divides");
            h = h.rem(&rest).expect("nonzero");
            out.push((g, d));
        }
    }
    if let Some(k) = rest.degree() {
        if k > 0 {
            out.push((rest, k));
        }
    }
    out
}

/// Split a squarefree product of degree-`d` irreducibles (Cantor–Zassenhaus).
pub fn equal_degree(f: &Poly, d: usize) -> Vec<Poly> {
    let field = f.field().clone();
    let n = match f.degree() {
        None | Some(0) => return Vec::new(),
        Some(n) => n,
    };
    if n == d {
        return vec![f.monic()];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(EDF_SEED ^ n as u64);
    let mut stack = vec![f.monic()];
    let mut done = Vec::new();
    while let Some(g) = stack.pop() {
        let gd = g.degree().expect("nonzero");
        if gd == d {
            done.push(g);
            continue;
        }
        loop {
            let a = random_poly(&field, gd, &mut rng);
            if a.is_constant() {
                continue;
            }
            let b = splitter(&a, &g, d);
            let h = b.gcd(&g);
            let hd = h.degree().unwrap_or(0);
            if hd > 0 && hd < gd {
                let other = g.div_exact(&h).expect("divides");
                stack.push(h);
                stack.push(other);
                break;
            }
        }
    }
    done.sort();
    done
}

fn random_poly(field: &Gf, below: usize, rng: &mut ChaCha8Rng) -> Poly {
    let q = field.order();
    let c = (0..below).map(|_| rng.next_u64() % q).collect();
    Poly::new(field, c)
}

// a^((Q-1)/2) - 1 in odd characteristic, the trace map in characteristic 2.
fn splitter(a: &Poly, g: &Poly, d: usize) -> Poly {
    let field = g.field();
    let q = field.order() as u128;
    if field.characteristic() != 2 {
        let e = (q.pow(d as u32) - 1) / 2;
        return a.pow_mod(e, g).sub(&Poly::one(field));
    }
    let m = field.degree() as usize * d;
    let mut term = a.rem(g).expect("nonzero");
    let mut acc = term.clone();
    for _ in 1..m {
        term = term.mul(&term).rem(g).expect("nonzero");
        acc = acc.add(&term);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(field: &Gf, fs: &[(Poly, u32)]) -> Poly {
        fs.iter().fold(Poly::one(field), |acc, (g, m)| acc.mul(&g.pow(*m as u64)))
    }

    #[test]
    fn small_examples() {
        let f = Gf::prime(5).unwrap();
        let got = Poly::from_ints(&f, &[1, 0, 1]).factor().unwrap();
        assert_eq!(
            got,
            vec![(Poly::from_ints(&f, &[2, 1]), 1), (Poly::from_ints(&f, &[3, 1]), 1)]
        );
        let got = Poly::from_ints(&f, &[0, 0, 1]).factor().unwrap();
        assert_eq!(got, vec![(Poly::x(&f), 2)]);
        assert_eq!(Poly::zero(&f).factor().unwrap_err(), GfError::ZeroPolynomial);
    }

    #[test]
    fn inseparable_input() {
        let f = Gf::new(3, 2, None).unwrap();
        // (x^2 + 1)^3 * (x + 2)^4 has zero derivative pieces
        let a = Poly::from_ints(&f, &[1, 0, 1]).pow(3).mul(&Poly::from_ints(&f, &[2, 1]).pow(4));
        let fs = a.factor().unwrap();
        assert_eq!(product(&f, &fs), a);
        for (g, _) in &fs {
            assert!(g.is_irreducible());
        }
    }

    #[test]
    fn characteristic_two() {
        let f = Gf::new(2, 3, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_poly(&f, 9, &mut rng);
            if a.is_zero() {
                continue;
            }
            let fs = a.factor().unwrap();
            assert_eq!(product(&f, &fs), a.monic());
        }
    }
}
