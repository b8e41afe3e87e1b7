mod common;

use common::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use stabrel::affrel;
use stabrel::fplinalg::{intersect, sum_spaces};
use stabrel::qec::{self, CorrectionTable, StabilizerCode};
use stabrel::stab::{self, DoubledSystem, GradedRelation, WireType};
use stabrel::symp::{self, Classification, GradedSubspace, SymplecticSpace};
use stabrel::{AffineRelation, FpMatrix, Prime, Subspace};
use std::collections::BTreeMap;

fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn small_prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5]).prop_map(prime)
}

fn random_matrix(rng: &mut StdRng, p: Prime, rows: usize, cols: usize) -> FpMatrix {
    let data: Vec<Vec<u32>> = (0..rows).map(|_| random_vector(rng, p, cols)).collect();
    FpMatrix::from_residue_rows(p, cols, &data).unwrap()
}

fn random_code(rng: &mut StdRng, p: Prime, n: usize) -> StabilizerCode {
    let space = SymplecticSpace::new(p, n);
    let dim = rng.gen_range(n..=2 * n);
    let lin = space.random_coisotropic(dim, rng).unwrap();
    let shift = space.random_vector(rng);
    StabilizerCode::from_subspace(&GradedSubspace::affine(space, lin, &shift).unwrap()).unwrap()
}

fn span_set(s: &Subspace) -> PointSet {
    all_vectors(s.prime(), s.ambient()).into_iter().filter(|v| s.contains(v)).collect()
}

// ------------------------------------------------------------ linear algebra

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rref_preserves_rowspace(seed: u64, p in prop::sample::select(vec![2u64, 3]), r in 0usize..=4, c in 0usize..=4) {
        let mut g = rng(seed);
        let p = prime(p);
        let m = random_matrix(&mut g, p, r, c);
        let (red, pivots) = m.rref();
        let a = Subspace::span(p, c, &m.row_vecs()).unwrap();
        let b = Subspace::span(p, c, &red.row_vecs()).unwrap();
        prop_assert_eq!(span_set(&a), span_set(&b));
        prop_assert_eq!(pivots.len(), m.rank());
        prop_assert_eq!(m.kernel().dim() + m.rank(), c);
        for v in m.kernel().basis().row_vecs() {
            prop_assert!(m.mul_vec(&v).unwrap().iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn subspace_equality_is_basis_equality(seed: u64, p in small_prime(), n in 0usize..=4) {
        let mut g = rng(seed);
        let a = random_subspace(&mut g, p, n);
        // Re-span from a shuffled, redundant generating set.
        let mut gens = a.basis().row_vecs();
        let extra: Vec<Vec<u32>> = gens.iter().map(|v| v.iter().map(|&x| p.mul(x, 2 % p.get())).collect()).collect();
        gens.extend(extra);
        gens.reverse();
        let b = Subspace::span(p, n, &gens).unwrap();
        prop_assert_eq!(a.basis(), b.basis());
        prop_assert_eq!(a, b);
    }
}

#[test]
fn intersect_and_sum_match_sets_on_f2_4() {
    let p = prime(2);
    let vectors = all_vectors(p, 4);
    let mut spaces = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for mask in 0u32..(1 << 16) {
        if mask.count_ones() > 4 {
            continue;
        }
        let rows: Vec<Vec<u32>> = (0..16).filter(|i| mask >> i & 1 == 1).map(|i| vectors[i].clone()).collect();
        let v = Subspace::span(p, 4, &rows).unwrap();
        if seen.insert(v.basis().row_vecs()) {
            spaces.push(v);
        }
    }
    let sets: Vec<PointSet> = spaces.iter().map(span_set).collect();
    for (a, sa) in spaces.iter().zip(&sets) {
        for (b, sb) in spaces.iter().zip(&sets) {
            let meet: PointSet = sa.intersection(sb).cloned().collect();
            assert_eq!(span_set(&intersect(a, b).unwrap()), meet);
            let join = span_set(&sum_spaces(a, b).unwrap());
            // The sum is the smallest subspace containing both.
            assert!(sa.is_subset(&join) && sb.is_subset(&join));
            let sums: PointSet = sa
                .iter()
                .flat_map(|u| sb.iter().map(move |w| u.iter().zip(w).map(|(x, y)| (x + y) % 2).collect()))
                .collect();
            assert_eq!(join, sums);
            // Complement reverses inclusion.
            assert_eq!(
                a.is_subspace_of(b).unwrap(),
                b.orthogonal_complement().is_subspace_of(&a.orthogonal_complement()).unwrap()
            );
        }
    }
}

// ------------------------------------------------------------ relations

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn category_laws(seed: u64, p in small_prime()) {
        let mut g = rng(seed);
        let dims: Vec<usize> = (0..4).map(|_| g.gen_range(0..=2)).collect();
        let r = random_relation(&mut g, p, dims[0], dims[1]);
        let s = random_relation(&mut g, p, dims[1], dims[2]);
        let t = random_relation(&mut g, p, dims[2], dims[3]);
        let left = r.compose(&s).unwrap().compose(&t).unwrap();
        let right = r.compose(&s.compose(&t).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(affrel::identity(p, dims[0]).compose(&r).unwrap(), r.clone());
        prop_assert_eq!(r.compose(&affrel::identity(p, dims[1])).unwrap(), r.clone());
        // converse is a contravariant involution.
        prop_assert_eq!(r.converse().converse(), r.clone());
        prop_assert_eq!(r.compose(&s).unwrap().converse(), s.converse().compose(&r.converse()).unwrap());
        // The empty relation absorbs.
        let e = AffineRelation::empty(p, dims[1], dims[2]);
        prop_assert!(r.compose(&e).unwrap().is_empty());
        prop_assert!(r.tensor(&e).unwrap().is_empty());
    }

    #[test]
    fn tensor_is_functorial(seed: u64, p in small_prime()) {
        let mut g = rng(seed);
        let d: Vec<usize> = (0..6).map(|_| g.gen_range(0..=1)).collect();
        let r0 = random_relation(&mut g, p, d[0], d[1]);
        let r1 = random_relation(&mut g, p, d[1], d[2]);
        let s0 = random_relation(&mut g, p, d[3], d[4]);
        let s1 = random_relation(&mut g, p, d[4], d[5]);
        let lhs = r0.tensor(&s0).unwrap().compose(&r1.tensor(&s1).unwrap()).unwrap();
        let rhs = r0.compose(&r1).unwrap().tensor(&s0.compose(&s1).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn complement_is_an_order_reversing_involution(seed: u64, p in small_prime()) {
        let mut g = rng(seed);
        let (dom, cod) = (g.gen_range(0..=2), g.gen_range(0..=2));
        let v = random_linear_relation(&mut g, p, dom, cod);
        let vp = v.ortho_complement().unwrap();
        prop_assert_eq!(vp.ortho_complement().unwrap(), v.clone());
        let bigger = random_linear_relation(&mut g, p, dom, cod);
        prop_assert_eq!(
            v.subset(&bigger).unwrap(),
            bigger.ortho_complement().unwrap().subset(&vp).unwrap()
        );
    }
}

// ------------------------------------------------------------ symplectic layer

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symplectic_complement_laws(seed: u64, p in prop::sample::select(vec![3u64, 5]), n in 1usize..=3) {
        let mut g = rng(seed);
        let space = SymplecticSpace::new(prime(p), n);
        let l = random_subspace(&mut g, prime(p), 2 * n);
        let lw = space.complement(&l).unwrap();
        prop_assert_eq!(l.dim() + lw.dim(), 2 * n);
        prop_assert_eq!(space.complement(&lw).unwrap(), l.clone());
        let class = space.classify(&l).unwrap();
        let class_w = space.classify(&lw).unwrap();
        match class {
            Classification::Isotropic => prop_assert_eq!(class_w, Classification::Coisotropic),
            Classification::Coisotropic => prop_assert_eq!(class_w, Classification::Isotropic),
            Classification::Lagrangian => prop_assert_eq!(class_w, Classification::Lagrangian),
            Classification::Neither => prop_assert_eq!(class_w, Classification::Neither),
        }
        let m = random_subspace(&mut g, prime(p), 2 * n).sum(&l).unwrap();
        prop_assert!(space.complement(&m).unwrap().is_subspace_of(&lw).unwrap());
    }

    #[test]
    fn dilation_postconditions(seed: u64, p in small_prime(), n in 1usize..=4) {
        let mut g = rng(seed);
        let code = random_code(&mut g, p, n);
        let dil = code.dilation();
        let enc = code.encoder();
        prop_assert_eq!(enc.classify().unwrap(), Classification::Lagrangian);
        prop_assert_eq!(enc.compose(&enc.dagger()).unwrap(), stab::identity(p, dil.k()));
        prop_assert!(enc.relation().image().equal(&code.subspace().to_state()).unwrap());
        prop_assert_eq!(dil.encoder_circuit().unwrap(), enc.clone());
        // The unitary is a symplectomorphism: its graph is Lagrangian.
        let u = stab::symplectic_map(dil.unitary(), &vec![0; 2 * n]).unwrap();
        prop_assert_eq!(u.classify().unwrap(), Classification::Lagrangian);
        let space = dil.space();
        let form = space.form_matrix();
        let ut = dil.unitary().transpose();
        prop_assert_eq!(ut.mul(&form).unwrap().mul(dil.unitary()).unwrap(), form);
    }

    #[test]
    fn syndrome_is_linear(seed: u64, p in small_prime(), n in 1usize..=3) {
        let mut g = rng(seed);
        let code = random_code(&mut g, p, n);
        let space = code.dilation().space();
        let (e, f) = (space.random_vector(&mut g), space.random_vector(&mut g));
        let c = g.gen_range(0..p.get());
        let combo: Vec<u32> = e.iter().zip(&f).map(|(&a, &b)| p.add(a, p.mul(c, b))).collect();
        let (se, sf) = (code.syndrome(&e).unwrap(), code.syndrome(&f).unwrap());
        let expected: Vec<u32> = se.iter().zip(&sf).map(|(&a, &b)| p.add(a, p.mul(c, b))).collect();
        prop_assert_eq!(code.syndrome(&combo).unwrap(), expected);
    }
}

// ------------------------------------------------------------ doubled layer

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weyl_is_additive(seed: u64, p in small_prime(), n in 1usize..=3) {
        let mut g = rng(seed);
        let u = random_vector(&mut g, p, 2 * n);
        let v = random_vector(&mut g, p, 2 * n);
        let sum: Vec<u32> = u.iter().zip(&v).map(|(&a, &b)| p.add(a, b)).collect();
        let wu = stab::weyl_vec(p, &u).unwrap();
        prop_assert_eq!(wu.compose(&stab::weyl_vec(p, &v).unwrap()).unwrap(), stab::weyl_vec(p, &sum).unwrap());
        let neg: Vec<u32> = u.iter().map(|&a| p.neg(a)).collect();
        prop_assert_eq!(wu.dagger(), stab::weyl_vec(p, &neg).unwrap());
    }

    #[test]
    fn circuits_are_closed(seed: u64, p in small_prime(), with_discard: bool) {
        let mut g = rng(seed);
        let c = random_circuit(&mut g, p, with_discard);
        prop_assume!(!c.is_empty());
        let class = c.classify().unwrap();
        if with_discard {
            prop_assert!(matches!(class, Classification::Coisotropic | Classification::Lagrangian), "{class}");
        } else {
            prop_assert_eq!(class, Classification::Lagrangian);
        }
        // Discarding everything after the circuit is discarding the inputs.
        let q = WireType::Quantum;
        let mut s = DoubledSystem::new(p);
        let ins = s.wires(&vec![q; c.dom().len()]);
        let outs = s.wires(c.cod());
        s.constrain(&c, &ins, &outs).unwrap();
        let discarded = s.project(&ins, &[]);
        let mut t = DoubledSystem::new(p);
        let ins2 = t.wires(&vec![q; c.dom().len()]);
        let total = t.project(&ins2, &[]);
        prop_assert!(discarded.subset(&total).unwrap());
    }

    #[test]
    fn converse_and_conjugate_are_involutions(seed: u64, p in small_prime()) {
        let mut g = rng(seed);
        let c = random_circuit(&mut g, p, true);
        prop_assert_eq!(c.dagger().dagger(), c.clone());
        prop_assert_eq!(c.conjugate().conjugate(), c.clone());
        prop_assert_eq!(c.transpose().transpose(), c.clone());
    }

    #[test]
    fn pure_composition_matches_system_evaluation(seed: u64, p in small_prime()) {
        let mut g = rng(seed);
        let a = random_circuit(&mut g, p, false);
        let b = random_circuit(&mut g, p, false);
        prop_assume!(a.cod().len() == b.dom().len());
        let mut s = DoubledSystem::new(p);
        let ins = s.wires(a.dom());
        let mid = s.wires(a.cod());
        let outs = s.wires(b.cod());
        s.constrain(&a, &ins, &mid).unwrap();
        s.constrain(&b, &mid, &outs).unwrap();
        prop_assert_eq!(s.project(&ins, &outs), a.compose(&b).unwrap());
    }
}

// ------------------------------------------------------------ codes

fn identity_doubled(p: Prime, types: &[WireType]) -> GradedRelation {
    stab::identity_of(p, types)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn syndrome_measurement_is_idempotent(seed: u64, p in small_prime(), n in 1usize..=3) {
        let mut g = rng(seed);
        let code = random_code(&mut g, p, n);
        let m = n - code.k();
        let meas = code.syndrome_measurement();
        let cl = vec![WireType::Classical; m];
        let twice = meas
            .compose(&meas.tensor(&identity_doubled(p, &cl)).unwrap())
            .unwrap();
        // Expected: one measurement whose outcome is copied.
        let mut s = DoubledSystem::new(p);
        let ins = s.wires(&vec![WireType::Quantum; n]);
        let qs = s.wires(&vec![WireType::Quantum; n]);
        let cs = s.wires(&cl);
        let copies = s.wires(&cl);
        let outs: Vec<_> = qs.iter().chain(&cs).copied().collect();
        s.constrain(&meas, &ins, &outs).unwrap();
        s.constrain(&identity_doubled(p, &cl), &cs, &copies).unwrap();
        let all: Vec<_> = qs.iter().chain(&copies).chain(&cs).copied().collect();
        prop_assert_eq!(twice, s.project(&ins, &all));
    }

    #[test]
    fn weyl_conjugation_gives_weyl(seed: u64, p in small_prime(), n in 1usize..=3) {
        let mut g = rng(seed);
        let code = random_code(&mut g, p, n);
        let u = code.dilation().unitary_relation();
        let e = random_vector(&mut g, p, 2 * n);
        let conj = u.dagger().compose(&stab::weyl_vec(p, &e).unwrap()).unwrap().compose(&u).unwrap();
        let point = conj.relation().point().unwrap();
        let shift: Vec<u32> = (0..2 * n).map(|i| p.sub(point[2 * n + i], point[i])).collect();
        prop_assert_eq!(&conj, &stab::weyl_vec(p, &shift).unwrap());
        // The shift is the linear image of e.
        let image = code.dilation().unitary().mul_vec(&e).unwrap();
        prop_assert_eq!(shift, image);
    }

    #[test]
    fn error_protocol_theorem(seed: u64, p in prop::sample::select(vec![2u64, 3]), n in 1usize..=3) {
        let mut g = rng(seed);
        let p = prime(p);
        let code = random_code(&mut g, p, n);
        let space = code.dilation().space();
        let mut entries = BTreeMap::new();
        let mut errors = vec![vec![0; 2 * n]];
        for _ in 0..6 {
            let e = space.random_vector(&mut g);
            let d = code.syndrome(&e).unwrap();
            if d.iter().all(|&x| x == 0) || entries.contains_key(&d) {
                continue;
            }
            entries.insert(d, e.clone());
            errors.push(e);
        }
        let table = CorrectionTable::new(p, n - code.k(), 2 * n, entries).unwrap();
        let report = qec::verify_correction(&code, &errors, &table).unwrap();
        prop_assert!(report.all_passed(), "{report}");
    }
}

#[test]
fn stinespring_on_fixed_shapes() {
    // Lagrangian inputs dilate to k = 0 encoders, i.e. states.
    let p = prime(3);
    let space = SymplecticSpace::new(p, 2);
    let mut g = rng(7);
    let lag = space.random_coisotropic(2, &mut g).unwrap();
    let s = GradedSubspace::linear(space, lag).unwrap();
    let dil = symp::stinespring_dilate(&s).unwrap();
    assert_eq!(dil.k(), 0);
    assert!(dil.syndrome_basis().len() == 2);
}
