//! Intermediates checked against a memoized textbook recursion with the
//! horizontal step written as its binomial closed form.

mod common;

use std::collections::HashMap;
use std::f64::consts::PI;

use rys_eri::kernel::intermediate_tensor;
use rys_eri::rys::prepare_quartet_rys;
use rys_eri::sample::random_quartet;
use rys_eri::shell::{QuartetClass, QuartetInput};

struct Lane {
    b00: f64,
    b10: f64,
    b01: f64,
    c: f64,
    cp: f64,
    origin: f64,
    memo: HashMap<(usize, usize), f64>,
}

impl Lane {
    /// `I(n, 0, m, 0)`.
    fn vrr(&mut self, n: usize, m: usize) -> f64 {
        if let Some(&v) = self.memo.get(&(n, m)) {
            return v;
        }
        let v = match (n, m) {
            (0, 0) => self.origin,
            (n, 0) => {
                let lower = if n >= 2 {
                    (n - 1) as f64 * self.b10 * self.vrr(n - 2, 0)
                } else {
                    0.0
                };
                self.c * self.vrr(n - 1, 0) + lower
            }
            (n, m) => {
                let lower = if m >= 2 {
                    (m - 1) as f64 * self.b01 * self.vrr(n, m - 2)
                } else {
                    0.0
                };
                let cross = if n >= 1 {
                    n as f64 * self.b00 * self.vrr(n - 1, m - 1)
                } else {
                    0.0
                };
                self.cp * self.vrr(n, m - 1) + lower + cross
            }
        };
        self.memo.insert((n, m), v);
        v
    }

    /// `I(i,j,k,l) = Σ_r Σ_s C(j,r) C(l,s) AB^{j-r} CD^{l-s} I(i+r, 0, k+s, 0)`.
    fn full(&mut self, i: usize, j: usize, k: usize, l: usize, ab: f64, cd: f64) -> f64 {
        let mut sum = 0.0;
        for r in 0..=j {
            for s in 0..=l {
                let coef = binom(j, r) * binom(l, s) * ab.powi((j - r) as i32) * cd.powi((l - s) as i32);
                sum += coef * self.vrr(i + r, k + s);
            }
        }
        sum
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check(q: &QuartetInput) -> f64 {
    let class = q.class();
    let [la, lb, lc, ld] = class.ls();
    let r = prepare_quartet_rys(q).unwrap();
    let tensor = intermediate_tensor::<f64>(q, &r);
    let [a, b, c, d] = q.shells;
    let (p, qq) = (a.exponent + b.exponent, c.exponent + d.exponent);
    let ctr = |x: &rys_eri::shell::PrimitiveShell, y: &rys_eri::shell::PrimitiveShell, s: f64| {
        std::array::from_fn::<f64, 3, _>(|i| (x.exponent * x.center[i] + y.exponent * y.center[i]) / s)
    };
    let (pc, qc) = (ctr(&a, &b, p), ctr(&c, &d, qq));
    let dist2 = |u: [f64; 3], v: [f64; 3]| (0..3).map(|i| (u[i] - v[i]).powi(2)).sum::<f64>();
    let k_ab = (-a.exponent * b.exponent / p * dist2(a.center, b.center)).exp();
    let k_cd = (-c.exponent * d.exponent / qq * dist2(c.center, d.center)).exp();
    let norms: f64 = q.shells.iter().map(|s| s.normalization()).product();
    let prefactor = 2.0 * PI.powf(2.5) / (p * qq * (p + qq).sqrt()) * k_ab * k_cd * norms;

    let mut worst: f64 = 0.0;
    for (mu, &t) in r.roots().iter().enumerate() {
        let u2 = t * t / (p + qq);
        for xi in 0..3 {
            let mut lane = Lane {
                b00: 0.5 * u2,
                b10: (1.0 - qq * u2) / (2.0 * p),
                b01: (1.0 - p * u2) / (2.0 * qq),
                c: pc[xi] - a.center[xi] - qq * u2 * (pc[xi] - qc[xi]),
                cp: qc[xi] - c.center[xi] + p * u2 * (pc[xi] - qc[xi]),
                origin: if xi == 2 { prefactor } else { 1.0 },
                memo: HashMap::new(),
            };
            let (ab, cd) = (a.center[xi] - b.center[xi], c.center[xi] - d.center[xi]);
            let mut pairs = Vec::new();
            for l in 0..=ld {
                for k in 0..=lc {
                    for j in 0..=lb {
                        for i in 0..=la {
                            pairs.push((lane.full(i, j, k, l, ab, cd), tensor.get(i, j, k, l, mu, xi)));
                        }
                    }
                }
            }
            let scale = pairs.iter().map(|p| p.0.abs()).fold(0.0, f64::max);
            for (reference, got) in pairs {
                worst = worst.max((reference - got).abs() / scale);
            }
        }
    }
    worst
}

#[test]
fn every_class_matches_reference_recursion() {
    let mut rng = common::rng(21);
    let mut worst: f64 = 0.0;
    for class in QuartetClass::all() {
        for _ in 0..3 {
            let dev = check(&random_quartet(&mut rng, &class));
            assert!(dev <= 1e-12, "{class}: {dev:e}");
            worst = worst.max(dev);
        }
    }
    println!("worst lane-relative deviation {worst:e}");
}
