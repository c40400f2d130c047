//! Acceptance run: one PASS/FAIL line per criterion. All comparisons are
//! exact rational equalities (tolerance 0).

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use acm5_core::acms::{
    connection_tensor, covariant_derivative, nabla_phi, nabla_phi_endomorphism, nabla_phi_via_gamma, nabla_xi,
    nabla_xi_via_phi, nijenhuis_bracket, nijenhuis_covariant, nijenhuis_from_nabla_phi, pr_w, theta, vartheta,
    AdaptedStructure, Lambda2, Tensor3,
};
use acm5_core::connection::{compatibility, curvature};
use acm5_core::exterior::{d_squared_zero, metric_monomials, Form, DIM};
use acm5_core::family::{f_form, identify_group, replay, structure_equations, verify_identification};
use acm5_core::linalg::rank_of;
use acm5_core::scalar::{rat, Rational, Scalar};
use acm5_core::spinor::SpinorSpace;
use acm5_core::torsionclass::{
    cartan_decompose, torsion_conditions, w_space_basis, IntrinsicTorsion, TorsionConditions, WModule, WSubspaces,
};
use acm5_core::{build, FamilyParams};
use common::{params, random_frame, rng, small_rational, valid_params};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn z(q: &Rational) -> bool {
    Scalar::is_zero(q)
}

fn replay_set() -> Vec<FamilyParams> {
    [
        [1, 0, 0, 0],
        [0, 0, 1, 0],
        [-5, 0, 1, 0],
        [-2, 0, 1, 0],
        [1, 0, 2, 0],
        [3, 4, 0, 0],
        [0, 0, 3, 4],
        [1, 0, 1, 0],
        [-1, 0, 2, 0],
        [0, 0, 0, 0],
    ]
    .into_iter()
    .map(params)
    .collect()
}

fn family_curvature() -> Outcome {
    let inst = build(params([1, 0, 0, 0])).map_err(|e| e.to_string())?;
    ensure!(inst.alpha == rat(-4, 1), "alpha = {}", inst.alpha);
    let cc = inst.geometry().characteristic_connection().map_err(|e| e.to_string())?;
    let cd = curvature(&inst.coframe, &cc.omega_c).map_err(|e| e.to_string())?;
    let f = f_form();
    ensure!(cd.support() == vec![(0, 1), (2, 3)], "R support {:?}", cd.support());
    ensure!(cd.get(0, 1) == &f.scale(&rat(-4, 1)), "R12 = {}", cd.get(0, 1));
    ensure!(cd.get(2, 3) == &f.scale(&rat(4, 1)), "R34 = {}", cd.get(2, 3));
    for a in 0..DIM {
        for b in 0..DIM {
            let want = if a == b && a < 4 { rat(4, 1) } else { rat(0, 1) };
            ensure!(cd.ricci.get(a, b) == &want, "Ric({},{}) = {}", a + 1, b + 1, cd.ricci.get(a, b));
        }
    }
    ensure!(cd.holonomy_basis == vec![f.clone()], "holonomy basis {:?}", cd.holonomy_basis);
    Ok("alpha = -4, R12 = -4F, R34 = 4F, Ric = diag(4,4,4,4,0), hol = span{F}".into())
}

fn spinor_kernel() -> Outcome {
    let spin = SpinorSpace::new().map_err(|e| e.to_string())?;
    let kernel = spin.kernel(&f_form()).map_err(|e| e.to_string())?;
    ensure!(kernel.len() == 2, "kernel dim {}", kernel.len());
    let mut r = rng(2);
    for _ in 0..10 {
        let p = valid_params(&mut r);
        let inst = build(p.clone()).map_err(|e| e.to_string())?;
        let cc = inst.geometry().characteristic_connection().map_err(|e| e.to_string())?;
        for psi in &kernel {
            ensure!(spin.annihilates(&cc.omega_c, inst.coframe.len(), psi), "spin lift at {p} moves a kernel spinor");
        }
    }
    Ok("kernel dim 2, annihilated by the spin lift on 10 random instances".into())
}

fn classification_table() -> Outcome {
    let w = WSubspaces::<Rational>::new();
    let mut r = rng(3);
    for _ in 0..50 {
        let p = valid_params(&mut r);
        let inst = build(p.clone()).map_err(|e| e.to_string())?;
        let g = inst.geometry().intrinsic_torsion().map_err(|e| e.to_string())?;
        let c = w.classify(&g);
        let [a1, a2, a3, a4] = p.values();
        ensure!(z(&c.residual), "{p}: residual {}", c.residual);
        for m in [WModule::W3, WModule::W5, WModule::W6] {
            ensure!(z(c.norm(m)), "{p}: {m} norm {}", c.norm(m));
        }
        ensure!(z(c.norm(WModule::W7)) == (z(a3) && z(a4)), "{p}: W7 norm {}", c.norm(WModule::W7));
        ensure!(z(c.norm(WModule::W4)) == (z(a1) && z(a2)), "{p}: W4 norm {}", c.norm(WModule::W4));
        ensure!(c.total() == g.norm2(), "{p}: norms do not add up");
    }
    Ok("50 random instances in W4+W7 with the predicted strictness".into())
}

fn identity_replay() -> Outcome {
    let set = replay_set();
    for p in &set {
        let inst = build(p.clone()).map_err(|e| e.to_string())?;
        let report = replay(&inst).map_err(|e| format!("{p}: {e}"))?;
        let failed: Vec<_> = report.failures().iter().map(|i| i.name.clone()).collect();
        ensure!(failed.is_empty(), "{p}: {}", failed.join("; "));
    }
    Ok(format!("{} parameter points, all identities hold", set.len()))
}

fn integrability_gate() -> Outcome {
    let grid = [
        rat(-2, 1),
        rat(-1, 1),
        rat(-1, 2),
        rat(0, 1),
        rat(1, 3),
        rat(1, 2),
        rat(1, 1),
        rat(2, 1),
        rat(3, 1),
    ];
    let (mut built, mut rejected) = (0, 0);
    for a1 in &grid {
        for a2 in &grid {
            for a3 in &grid {
                for a4 in &grid {
                    let admissible = a1 * a4 == a2 * a3;
                    let values = [a1.clone(), a2.clone(), a3.clone(), a4.clone()];
                    match FamilyParams::new(a1.clone(), a2.clone(), a3.clone(), a4.clone()) {
                        Ok(p) => {
                            ensure!(admissible, "accepted {values:?}");
                            let inst = build(p).map_err(|e| e.to_string())?;
                            let d2 = d_squared_zero(&inst.coframe).map_err(|e| e.to_string())?;
                            ensure!(d2.entries.len() == 6 && d2.ok(), "d^2 != 0 at {values:?}");
                            built += 1;
                        }
                        Err(_) => {
                            ensure!(!admissible, "rejected {values:?}");
                            let d2 = d_squared_zero(&structure_equations(&values)).map_err(|e| e.to_string())?;
                            ensure!(!d2.ok(), "d^2 = 0 although a1 a4 != a2 a3 at {values:?}");
                            rejected += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{built} admissible points with d^2 = 0, {rejected} rejected (and non-integrable)"))
}

fn bullet_identities() -> Outcome {
    let mut r = rng(6);
    let l2 = Lambda2::<Rational>::new();
    let eta = AdaptedStructure::eta::<Rational>();
    for n in 0..100 {
        let pf = random_frame(&mut r);
        let h = nabla_phi(&pf);
        ensure!(h == nabla_phi_via_gamma(&l2.pr_w(&connection_tensor(&pf))), "frame {n}: nabla Phi via Gamma");
        let xi = nabla_xi(&pf);
        ensure!(xi == nabla_xi_via_phi(&h), "frame {n}: nabla xi");
        for x in 0..DIM {
            let d_eta = covariant_derivative(&pf, x, &eta);
            for y in 0..DIM {
                ensure!(&d_eta.eval(&[y]) == xi.get(x, y), "frame {n}: nabla eta");
            }
        }
        let g = nabla_phi_endomorphism(&pf);
        ensure!(g == Tensor3::from_fn(|x, a, b| h.get(x, b, a).clone()), "frame {n}: nabla phi");
        let nb = nijenhuis_bracket(&pf);
        ensure!(nb == nijenhuis_from_nabla_phi(&h), "frame {n}: N via nabla Phi");
        ensure!(nb == nijenhuis_covariant(&pf), "frame {n}: N via nabla phi");
    }
    Ok("100 random frames: nabla xi, nabla eta, nabla phi, N and nabla Phi formulas agree".into())
}

fn random_in(w: &WSubspaces<Rational>, modules: &[WModule], r: &mut rand::rngs::StdRng) -> Tensor3<Rational> {
    let mut t = Tensor3::zero();
    for &m in modules {
        for b in w.basis(m) {
            t = t.add(&b.scale(&small_rational(r)));
        }
    }
    t
}

fn equivalences() -> Outcome {
    use WModule::*;
    let w = WSubspaces::<Rational>::new();
    let basis = w_space_basis::<Rational>();
    let mut r = rng(7);
    type Cond = fn(&TorsionConditions) -> bool;
    let cases: [(&str, Vec<WModule>, Cond); 3] = [
        ("W3+W4+W5+W6 <=> N skew and xi Killing", vec![W3, W4, W5, W6], |c| {
            c.nijenhuis_totally_skew && c.xi_killing
        }),
        ("W3+W5+W6 <=> N skew and xi _| dPhi = 0", vec![W3, W5, W6], |c| {
            c.nijenhuis_totally_skew && c.xi_interior_d_phi_zero
        }),
        ("W3+W4+W5+W7 <=> generalized quasi-Sasaki", vec![W3, W4, W5, W7], |c| c.generalized_quasi_sasaki),
    ];
    for (name, modules, cond) in &cases {
        for k in 0..10 {
            let inside = random_in(&w, modules, &mut r);
            let g = IntrinsicTorsion::from_tensor(inside.clone()).map_err(|e| e.to_string())?;
            ensure!(cond(&torsion_conditions(&g)), "{name}: inside sample {k} fails the tensor condition");

            let mut other = Tensor3::zero();
            for b in &basis {
                other = other.add(&b.scale(&small_rational(&mut r)));
            }
            let outside = modules.iter().fold(other, |acc, &m| acc.sub(&w.project(m, &acc.clone())));
            ensure!(!outside.is_zero(), "{name}: degenerate outside sample");
            let g = IntrinsicTorsion::from_tensor(inside.add(&outside)).map_err(|e| e.to_string())?;
            ensure!(!cond(&torsion_conditions(&g)), "{name}: outside sample {k} passes the tensor condition");
        }
    }
    Ok("3 equivalences, 10 inside and 10 outside samples each".into())
}

fn characteristic_connection() -> Outcome {
    for p in replay_set() {
        let inst = build(p.clone()).map_err(|e| e.to_string())?;
        let cc = inst.geometry().characteristic_connection().map_err(|e| format!("{p}: {e}"))?;
        let compat = compatibility(&cc.omega_c, inst.coframe.len());
        ensure!(compat.all(), "{p}: {compat:?}");
        let parts = cartan_decompose(&cc.torsion);
        let [a1, a2, a3, a4] = p.values();
        ensure!(parts.is_skew() == (z(a3) && z(a4)), "{p}: skew = {}", parts.is_skew());
        ensure!(
            parts.is_traceless_cyclic() == (z(a1) && z(a2)),
            "{p}: traceless cyclic = {}",
            parts.is_traceless_cyclic()
        );
    }
    Ok("nabla^c xi = nabla^c eta = nabla^c phi = 0; torsion types as predicted".into())
}

fn group_certificates() -> Outcome {
    let mut lines = Vec::new();
    for (a, tag) in [
        ([3, 4, 0, 0], "su2+su2"),
        ([0, 0, 3, 4], "sl2+sl2"),
        ([1, 0, 1, 0], "abelian6"),
        ([-1, 0, 2, 0], "heis5+R"),
    ] {
        let p = params(a);
        let id = identify_group(&p).map_err(|e| e.to_string())?;
        let got = id.algebra.map(|x| x.tag()).unwrap_or("none");
        ensure!(got == tag, "{p}: identified as {got}");
        ensure!(verify_identification(&p, &id).map_err(|e| e.to_string())?, "{p}: certificate rejected");
        lines.push(format!("{p}->{tag}"));
    }
    Ok(lines.join(", "))
}

fn projector_algebra() -> Outcome {
    let mut r = rng(10);
    let l2 = Lambda2::<Rational>::new();
    let dims: Vec<usize> = (1..=4)
        .map(|p| {
            let images: Vec<Vec<Rational>> = metric_monomials(2)
                .into_iter()
                .map(|m| l2.project(&Form::monomial(m, rat(1, 1)), p).unwrap().metric_coordinates())
                .collect();
            rank_of(&images)
        })
        .collect();
    ensure!(dims == vec![1, 2, 3, 4], "Lambda^2 dims {dims:?}");
    for _ in 0..200 {
        let beta = Form::from_terms(2, metric_monomials(2).into_iter().map(|m| (m, small_rational(&mut r))));
        let parts: Vec<Form> = (1..=4).map(|p| l2.project(&beta, p).unwrap()).collect();
        let sum = parts.iter().fold(Form::zero(2), |a, b| a.add(b));
        ensure!(sum == beta, "Lambda^2 projectors incomplete");
        for (i, part) in parts.iter().enumerate() {
            for p in 1..=4 {
                let again = l2.project(part, p).unwrap();
                if p == i + 1 {
                    ensure!(&again == part, "Lambda^2 projector {p} not idempotent");
                } else {
                    ensure!(again.is_zero(), "Lambda^2 projectors {} and {p} overlap", i + 1);
                }
            }
        }
    }

    let units: Vec<Tensor3<Rational>> = (0..DIM)
        .flat_map(|x| {
            (0..DIM).flat_map(move |a| {
                (a + 1..DIM).map(move |b| {
                    Tensor3::from_fn(|y, c, d| if (y, c, d) == (x, a, b) { rat(1, 1) } else { rat(0, 1) })
                })
            })
        })
        .collect();
    let decomposed: Vec<_> = units.iter().map(cartan_decompose).collect();
    let rank = |f: &dyn Fn(&acm5_core::CartanParts) -> Tensor3<Rational>| {
        rank_of(&decomposed.iter().map(|p| f(p).components().to_vec()).collect::<Vec<_>>())
    };
    let cartan_dims = (rank(&|p| p.vectorial.clone()), rank(&|p| p.skew.clone()), rank(&|p| p.cyclic.clone()));
    ensure!(cartan_dims == (5, 10, 35), "Cartan dims {cartan_dims:?}");
    for _ in 0..200 {
        let a = Tensor3::from_fn(|_, _, _| small_rational(&mut r));
        let p = cartan_decompose(&a);
        ensure!(p.sum() == a && p.check(), "Cartan parts do not reassemble");
        let pv = cartan_decompose(&p.vectorial);
        let ps = cartan_decompose(&p.skew);
        let pc = cartan_decompose(&p.cyclic);
        ensure!(pv.vectorial == p.vectorial && pv.skew.is_zero() && pv.cyclic.is_zero(), "vectorial projector");
        ensure!(ps.skew == p.skew && ps.vectorial.is_zero() && ps.cyclic.is_zero(), "skew projector");
        ensure!(pc.cyclic == p.cyclic && pc.vectorial.is_zero() && pc.skew.is_zero(), "cyclic projector");
    }

    let w = WSubspaces::<Rational>::new();
    for a in w.spanning_set(WModule::W4) {
        for b in w.spanning_set(WModule::W7) {
            ensure!(z(&a.inner(b)), "S4 and S7 not orthogonal");
        }
    }
    // θ(Λ²) ⊕ ϑ(Λ²₂) has dimension 12; pr_W of it must keep rank 12
    let mut domain: Vec<Tensor3<Rational>> = Vec::new();
    for m in metric_monomials(2) {
        domain.push(theta(&Form::monomial(m, rat(1, 1))).unwrap());
    }
    for b in l2.basis(2) {
        domain.push(vartheta(&b).unwrap());
    }
    let comps = |ts: &[Tensor3<Rational>]| ts.iter().map(|t| t.components().to_vec()).collect::<Vec<_>>();
    ensure!(rank_of(&comps(&domain)) == 12, "domain rank");
    let image: Vec<_> = domain.iter().map(pr_w).collect();
    let image_rank = rank_of(&comps(&image));
    ensure!(image_rank == 12 && w.total_rank() == 12, "pr_W rank {image_rank}");
    Ok("Lambda^2 dims (1,2,3,4), Cartan dims (5,10,35), S4 _|_ S7, rank pr_W = 12".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("family curvature", family_curvature),
        ("spinor kernel", spinor_kernel),
        ("classification table", classification_table),
        ("identity replay", identity_replay),
        ("integrability gate", integrability_gate),
        ("system (bullet) identities", bullet_identities),
        ("subspace/tensor equivalences", equivalences),
        ("characteristic connection", characteristic_connection),
        ("group certificates", group_certificates),
        ("projector algebra", projector_algebra),
    ];
    println!("acceptance: tolerance = exact rational equality");
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{elapsed:.2?}]", k + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{elapsed:.2?}]", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
