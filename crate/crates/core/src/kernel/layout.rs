//! Extents, padding and flat index maps of the kernel buffers.

use crate::shell::QuartetClass;

/// Smallest power of two `>= n`.
#[inline(always)]
pub const fn pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Cartesian exponents of each shell, in component order.
pub(crate) const COMPONENTS: [&[[usize; 3]]; 4] = [
    &[[0, 0, 0]],
    &[[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    &[[2, 0, 0], [1, 1, 0], [1, 0, 1], [0, 2, 0], [0, 1, 1], [0, 0, 2]],
    &[
        [3, 0, 0],
        [2, 1, 0],
        [2, 0, 1],
        [1, 2, 0],
        [1, 1, 1],
        [1, 0, 2],
        [0, 3, 0],
        [0, 2, 1],
        [0, 1, 2],
        [0, 0, 3],
    ],
];

const fn n_g(l: usize) -> usize {
    (l + 1) * (l + 2) / 2
}

/// Class-dependent extents. Built from const generics in the specialized
/// kernels so every loop bound below folds to a constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dims {
    pub la: usize,
    pub lb: usize,
    pub lc: usize,
    pub ld: usize,
    pub n_rys: usize,
    /// Padded root extent (`μ`), shared by the slab and the final tensor.
    pub p_mu: usize,
    /// VRR slab: `i ∈ [0, La+Lb]`, `k ∈ [0, Lc+Ld]`, padded.
    pub slab_pi: usize,
    pub slab_pk: usize,
    /// Final tensor: `i ≤ La`, `j ≤ Lb`, `k ≤ Lc` padded, `l ≤ Ld` not padded.
    pub pi: usize,
    pub pj: usize,
    pub pk: usize,
    pub nl: usize,
    pub n_ga: usize,
    pub n_gb: usize,
    pub n_gc: usize,
    pub n_gd: usize,
    /// Padded fused `ab` extent of the ERI buffer.
    pub p_ab: usize,
}

impl Dims {
    #[inline(always)]
    pub const fn new(la: usize, lb: usize, lc: usize, ld: usize) -> Dims {
        let n_rys = (la + lb + lc + ld) / 2 + 1;
        Dims {
            la,
            lb,
            lc,
            ld,
            n_rys,
            p_mu: pow2(n_rys),
            slab_pi: pow2(la + lb + 1),
            slab_pk: pow2(lc + ld + 1),
            pi: pow2(la + 1),
            pj: pow2(lb + 1),
            pk: pow2(lc + 1),
            nl: ld + 1,
            n_ga: n_g(la),
            n_gb: n_g(lb),
            n_gc: n_g(lc),
            n_gd: n_g(ld),
            p_ab: pow2(n_g(la) * n_g(lb)),
        }
    }

    pub fn of(class: &QuartetClass) -> Dims {
        let [a, b, c, d] = class.ls();
        Dims::new(a, b, c, d)
    }

    /// Stride between consecutive `i` entries (one `μ × ξ` block).
    #[inline(always)]
    pub const fn lane_block(&self) -> usize {
        4 * self.p_mu
    }

    #[inline(always)]
    pub const fn slab_index(&self, i: usize, k: usize, mu: usize, xi: usize) -> usize {
        ((k * self.slab_pi + i) * 4 + xi) * self.p_mu + mu
    }

    pub const fn slab_len(&self) -> usize {
        self.slab_pk * self.slab_pi * self.lane_block()
    }

    #[inline(always)]
    pub const fn tensor_index(&self, i: usize, j: usize, k: usize, l: usize, mu: usize, xi: usize) -> usize {
        ((((l * self.pk + k) * self.pj + j) * self.pi + i) * 4 + xi) * self.p_mu + mu
    }

    pub const fn tensor_len(&self) -> usize {
        self.nl * self.pk * self.pj * self.pi * self.lane_block()
    }

    /// Entries of the final tensor excluding padding.
    pub const fn tensor_logical_len(&self) -> usize {
        (self.la + 1) * (self.lb + 1) * (self.lc + 1) * (self.ld + 1) * 3 * self.n_rys
    }

    #[inline(always)]
    pub const fn eri_index(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        (c * self.n_gd + d) * self.p_ab + a * self.n_gb + b
    }

    pub const fn eri_len(&self) -> usize {
        self.n_gc * self.n_gd * self.p_ab
    }

    pub const fn num_eriq(&self) -> usize {
        self.n_ga * self.n_gb * self.n_gc * self.n_gd
    }
}

/// Largest buffers over all classes, for reusable workspaces.
pub(crate) const MAX_DIMS: Dims = Dims::new(3, 3, 3, 3);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shell::cartesian_components;

    #[test]
    fn component_table_matches_shell_order() {
        for l in 0..4 {
            let comps = cartesian_components(l).unwrap();
            let table: Vec<[usize; 3]> = comps
                .iter()
                .map(|c| [c.ax as usize, c.ay as usize, c.az as usize])
                .collect();
            assert_eq!(table, COMPONENTS[l]);
        }
    }

    #[test]
    fn padded_extents() {
        let d = Dims::new(3, 2, 1, 0);
        assert_eq!(d.n_rys, 4);
        assert_eq!((d.p_mu, d.slab_pi, d.slab_pk), (4, 8, 2));
        assert_eq!((d.pi, d.pj, d.pk, d.nl), (4, 4, 2, 1));
        assert_eq!(d.p_ab, 64);
        let f = Dims::new(3, 3, 3, 3);
        assert_eq!(f.tensor_logical_len(), 5376);
        assert_eq!(Dims::new(0, 0, 0, 0).tensor_logical_len(), 3);
        assert!(f.tensor_len() >= f.tensor_logical_len());
    }

    #[test]
    fn tensor_index_is_injective_on_logical_range() {
        let d = Dims::new(2, 1, 3, 2);
        let mut seen = std::collections::HashSet::new();
        for l in 0..=d.ld {
            for k in 0..=d.lc {
                for j in 0..=d.lb {
                    for i in 0..=d.la {
                        for xi in 0..3 {
                            for mu in 0..d.n_rys {
                                let idx = d.tensor_index(i, j, k, l, mu, xi);
                                assert!(idx < d.tensor_len());
                                assert!(seen.insert(idx));
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(seen.len(), d.tensor_logical_len());
    }
}
