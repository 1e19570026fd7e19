use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::boys::boys;
use crate::oracle::{max_relative_deviation, md_eri, ssss_closed_form, RELATIVE_FLOOR};
use crate::rys::rys_roots_weights;
use crate::sample::random_quartet;
use crate::shell::PrimitiveShell;

fn quartet(centers: [[f64; 3]; 4], exps: [f64; 4], ls: [usize; 4]) -> QuartetInput {
    QuartetInput::new(std::array::from_fn(|i| {
        PrimitiveShell::new(centers[i], exps[i], ls[i]).unwrap()
    }))
}

#[test]
fn ssss_has_three_origins() {
    let q = quartet([[0.1, 0.2, 0.3]; 4], [1.5; 4], [0; 4]);
    let r = prepare_quartet_rys(&q).unwrap();
    let s = setup_stage::<f64>(&q, &r);
    let o = initial_intermediates(&s);
    assert_eq!(s.n_rys, 1);
    assert_eq!((o[0][0], o[1][0]), (1.0, 1.0));
    assert_eq!(o[2][0], s.prefactor);
    assert_eq!(Dims::new(0, 0, 0, 0).tensor_logical_len(), 3);
}

#[test]
fn coincident_centers_zero_c() {
    let q = quartet([[0.4, -1.0, 2.0]; 4], [0.7, 1.3, 2.0, 0.9], [3, 2, 1, 3]);
    let r = prepare_quartet_rys(&q).unwrap();
    assert!(r.argument() < 1e-28);
    let s = setup_stage::<f64>(&q, &r);
    for row in &s.c {
        assert!(row[..s.n_rys].iter().all(|&c| c.abs() < 1e-15));
    }
}

#[test]
fn first_vrr_steps() {
    let q = quartet(
        [[0.0, 0.0, 0.0], [1.0, 0.2, -0.3], [0.5, 0.9, 0.1], [-0.6, 0.4, 1.1]],
        [1.1, 0.6, 1.9, 0.8],
        [2, 1, 2, 1],
    );
    let r = prepare_quartet_rys(&q).unwrap();
    let d = Dims::of(&q.class());
    let s = setup_stage::<f64>(&q, &r);
    let o = initial_intermediates(&s);
    let mut slab = vec![0.0; d.slab_len()];
    vrr_stage(&d, &s, &o, &mut slab);
    for xi in 0..3 {
        for mu in 0..d.n_rys {
            let origin = slab[d.slab_index(0, 0, mu, xi)];
            assert_eq!(slab[d.slab_index(1, 0, mu, xi)], s.c[xi][mu] * origin);
            assert_eq!(slab[d.slab_index(0, 1, mu, xi)], s.c[3 + xi][mu] * origin);
        }
    }
}

#[test]
fn hrr_with_shared_centers() {
    let q = quartet(
        [[0.3, 0.3, 0.3], [0.3, 0.3, 0.3], [1.0, -0.5, 0.2], [1.0, -0.5, 0.2]],
        [1.0, 1.4, 0.8, 2.1],
        [1, 2, 2, 1],
    );
    let r = prepare_quartet_rys(&q).unwrap();
    let t = intermediate_tensor::<f64>(&q, &r);
    let dims = t.dims;
    let full = {
        // slab at full extent for the i+1 / k+1 lookups
        let s = setup_stage::<f64>(&q, &r);
        let mut slab = vec![0.0; dims.slab_len()];
        vrr_stage(&dims, &s, &initial_intermediates(&s), &mut slab);
        slab
    };
    for xi in 0..3 {
        for mu in 0..dims.n_rys {
            // one HRR step each way reduces to a shift
            for i in 0..=dims.la {
                for k in 0..=dims.lc {
                    assert_eq!(t.get(i, 1, k, 0, mu, xi), full[dims.slab_index(i + 1, k, mu, xi)]);
                }
            }
            for i in 0..=dims.la {
                for j in 0..=dims.lb {
                    assert_eq!(t.get(i, j, 0, 1, mu, xi), t.get(i, j, 1, 0, mu, xi));
                }
            }
        }
    }
}

#[test]
fn all_ones_tensor_gives_f0() {
    let t_arg = 3.7;
    let r = rys_roots_weights(4, t_arg).unwrap();
    let d = Dims::new(2, 2, 2, 1);
    let mut s = setup_stage::<f64>(
        &quartet([[0.0; 3]; 4], [1.0; 4], [2, 2, 2, 1]),
        &rys_roots_weights(d.n_rys, 0.0).unwrap(),
    );
    s.weights[..4].copy_from_slice(r.weights());
    let tensor = vec![1.0; d.tensor_len()];
    let mut wz = vec![0.0; d.tensor_len()];
    let mut eris = vec![0.0; d.eri_len()];
    quadrature_stage(&d, &s, &tensor, &mut wz, &mut eris);
    let f0 = boys(0, t_arg).unwrap().get(0);
    let out = QuartetERIs::from_padded(QuartetClass::new(2, 2, 2, 1).unwrap(), PrecisionMode::Double, eris);
    assert!(out.iter().all(|v| ((v - f0) / f0).abs() < 1e-14));
}

#[test]
fn ssss_matches_closed_form() {
    let q = quartet(
        [[0.0, 0.1, 0.2], [1.1, -0.4, 0.3], [-0.7, 0.9, 1.5], [0.2, 0.2, -1.0]],
        [0.8, 1.7, 0.45, 2.2],
        [0; 4],
    );
    let exact = ssss_closed_form(&q).unwrap();
    let dbl = compute_quartet(&q, PrecisionMode::Double).unwrap();
    let sgl = compute_quartet(&q, PrecisionMode::Single).unwrap();
    assert!(((dbl.get(0, 0, 0, 0) - exact) / exact).abs() < 1e-13);
    assert!(((sgl.get(0, 0, 0, 0) - exact) / exact).abs() < 1e-6);
    assert_eq!(dbl.b_max, dbl.get(0, 0, 0, 0).abs());
}

#[test]
fn specialized_equals_runtime_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for class in [
        QuartetClass::new(3, 1, 2, 0).unwrap(),
        QuartetClass::new(1, 1, 1, 1).unwrap(),
    ] {
        let q = random_quartet(&mut rng, &class);
        let r = prepare_quartet_rys(&q).unwrap();
        let d = Dims::of(&class);
        let mut a = Workspace::<f32>::new();
        let mut b = Workspace::<f32>::new();
        let ba = evaluate(&q, &r, &mut a);
        let bb = kernel_runtime(&q, &r, &mut b);
        assert_eq!(ba, bb);
        let n_ab = d.n_ga * d.n_gb;
        for row in 0..d.n_gc * d.n_gd {
            let span = row * d.p_ab..row * d.p_ab + n_ab;
            assert_eq!(a.eris()[span.clone()], b.eris()[span]);
        }
    }
}

#[test]
fn random_classes_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for idx in (0..256).step_by(7) {
        let class = QuartetClass::from_index(idx);
        let q = random_quartet(&mut rng, &class);
        let reference = md_eri(&q).values;
        let dbl = compute_quartet(&q, PrecisionMode::Double).unwrap().to_logical();
        let dev = max_relative_deviation(&reference, &dbl, RELATIVE_FLOOR);
        assert!(dev < 1e-9, "{class}: {dev:e}");
    }
}

#[test]
fn node_order_checked() {
    let q = quartet([[0.0; 3]; 4], [1.0; 4], [1, 0, 0, 0]);
    let r = rys_roots_weights(3, 0.0).unwrap();
    assert_eq!(
        compute_quartet_with_nodes(&q, &r, PrecisionMode::Double),
        Err(EriError::NodeOrder { expected: 1, found: 3 })
    );
}

#[test]
fn logical_round_trip() {
    let class = QuartetClass::new(2, 1, 1, 0).unwrap();
    let logical: Vec<f64> = (0..class.num_eriq()).map(|i| i as f64 - 20.0).collect();
    let e = QuartetERIs::from_logical(class, PrecisionMode::Double, &logical);
    assert_eq!(e.to_logical(), logical);
    assert_eq!(e.b_max, 33.0);
    assert_eq!(e.get(1, 2, 0, 0), logical[class.eri_index(1, 2, 0, 0)]);
}

#[test]
fn precision_mode_parsing() {
    assert_eq!(PrecisionMode::default(), PrecisionMode::Single);
    assert_eq!("double".parse::<PrecisionMode>(), Ok(PrecisionMode::Double));
    assert!("half".parse::<PrecisionMode>().is_err());
}
