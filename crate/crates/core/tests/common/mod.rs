//! Checks shared by the property and acceptance suites. Each returns `Err` with
//! the reproducing parameters on failure.

#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;

use ikdeg::charsum::{additive_char, gauss_sum, mult_char};
use ikdeg::galois;
use ikdeg::padic::{self, PadicEmbedding};
use ikdeg::{CharSpec, CycInt, Field, SumContext};

pub type Check = Result<(), String>;

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Fields small enough for exhaustive per-element checks.
pub const FIELDS: [(u64, u32); 10] = [
    (2, 1),
    (3, 1),
    (5, 1),
    (7, 1),
    (11, 1),
    (13, 1),
    (2, 2),
    (3, 2),
    (2, 3),
    (5, 2),
];

pub fn field(i: usize) -> Field {
    let (p, k) = FIELDS[i % FIELDS.len()];
    Field::new(p, k).unwrap()
}

/// `G(χ) G(χ̄) = χ(-1) q` for nontrivial `χ = ω^{-m}`.
pub fn gauss_norm(f: &Field, m: i64) -> Check {
    let chi = CharSpec::new(f, m);
    if chi.is_trivial() {
        return Ok(());
    }
    let g = gauss_sum(f, chi);
    let gbar = gauss_sum(f, CharSpec::new(f, -m));
    let minus_one = f.neg(f.one()).unwrap();
    let sign = mult_char(f, chi, minus_one)
        .unwrap()
        .change_conductor(g.conductor())
        .unwrap();
    ensure(&g * &gbar == sign.scale(&BigInt::from(f.q())), || {
        format!("gauss norm q={} m={m}", f.q())
    })
}

/// `Σ_{x≠0} χ(x)` is `q - 1` for trivial `χ` and `0` otherwise; `Σ_x ψ(x) = 0`.
pub fn orthogonality(f: &Field, m: i64) -> Check {
    let chi = CharSpec::new(f, m);
    let mut s = CycInt::zero((f.q() - 1) as usize);
    for x in f.units_by_log() {
        s.add_assign_ref(&mult_char(f, chi, x).unwrap());
    }
    let expected = if chi.is_trivial() {
        f.q() as i64 - 1
    } else {
        0
    };
    ensure(s == CycInt::from_int(s.conductor(), expected), || {
        format!("multiplicative orthogonality q={} m={m}", f.q())
    })?;
    let mut a = CycInt::zero(f.p() as usize);
    for x in f.elements() {
        a.add_assign_ref(&additive_char(f, x).unwrap());
    }
    ensure(a.is_zero(), || {
        format!("additive orthogonality q={}", f.q())
    })
}

/// `σ_a(q(q-1) IK_n(b)) = q(q-1) IK_n(b a^{-(n+1)})` for every `a` in `F_p^*`.
pub fn equivariance_all_a(p: u64, n: u32, b_index: u32) -> Check {
    let f = Arc::new(Field::prime(p).unwrap());
    let formula = SumContext::new(f.clone()).ik_formula(n).unwrap();
    let b = f.from_index(1 + b_index % (p as u32 - 1)).unwrap();
    for a in 1..p as i64 {
        ensure(galois::equivariance_check(&formula, b, a).unwrap(), || {
            format!("equivariance p={p} n={n} b={} a={a}", f.format(b))
        })?;
    }
    Ok(())
}

/// `T(a) T(b) = T(ab mod p)`.
pub fn teichmuller_multiplicative(p: u32, a: u32, b: u32, precision: usize) -> Check {
    let (a, b) = (1 + a % (p - 1), 1 + b % (p - 1));
    let ta = padic::teichmuller(p, a, precision).unwrap();
    let tb = padic::teichmuller(p, b, precision).unwrap();
    let tab = padic::teichmuller(p, (a * b) % p, precision).unwrap();
    ensure(&ta * &tb == tab, || {
        format!("teichmuller p={p} a={a} b={b} N={precision}")
    })
}

/// `embed(x y) = embed(x) embed(y)` and `embed(x + y) = embed(x) + embed(y)`.
pub fn embedding_ring_map(p: u64, xs: &[i64], ys: &[i64]) -> Check {
    let f = Field::prime(p).unwrap();
    let m = (p * (p - 1)) as usize;
    let emb = PadicEmbedding::new(&f, padic::default_precision(p as u32)).unwrap();
    let x = CycInt::from_i64(m, &xs[..m.min(xs.len())]);
    let y = CycInt::from_i64(m, &ys[..m.min(ys.len())]);
    let (ex, ey) = (emb.embed(&x).unwrap(), emb.embed(&y).unwrap());
    ensure(emb.embed(&(&x * &y)).unwrap() == &ex * &ey, || {
        format!("embedding product p={p} x={xs:?} y={ys:?}")
    })?;
    ensure(emb.embed(&(&x + &y)).unwrap() == &ex + &ey, || {
        format!("embedding sum p={p} x={xs:?} y={ys:?}")
    })
}
